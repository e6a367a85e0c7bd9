//! Markov-type surfaces `x^2+y^2+z^2+Exyz-Ax-By-Cz-D = 0`.

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::num::{rat, BigComplex, BigReal};
use crate::poly::Poly;

/// Exact surface coefficients. `E != 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SurfaceParams {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
    pub e: BigRational,
}

/// Numeric surface coefficients, possibly complex.
#[derive(Clone, Debug)]
pub struct NumParams {
    pub a: BigComplex,
    pub b: BigComplex,
    pub c: BigComplex,
    pub d: BigComplex,
    pub e: BigComplex,
}

/// Parameters as read from JSON: exact when every entry is rational.
#[derive(Clone, Debug)]
pub enum ParamsSpec {
    Exact(SurfaceParams),
    Numeric(NumParams),
}

pub type Pt = [BigComplex; 3];

/// Point with its defining-polynomial value.
#[derive(Clone, Debug)]
pub struct SurfacePoint {
    pub x: BigComplex,
    pub y: BigComplex,
    pub z: BigComplex,
    pub residual: BigComplex,
}

impl SurfacePoint {
    pub fn coords(&self) -> Pt {
        [self.x.clone(), self.y.clone(), self.z.clone()]
    }
}

/// The gradient `N = (2x+Eyz-A, 2y+Exz-B, 2z+Exy-C)` as exact polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalForm1 {
    pub n: [Poly; 3],
}

impl SurfaceParams {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational, e: BigRational) -> Result<Self> {
        if e.is_zero() {
            return Err(Error::InvalidParams("E must be nonzero".into()));
        }
        Ok(Self { a, b, c, d, e })
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64, e: i64) -> Result<Self> {
        Self::new(rat::int(a), rat::int(b), rat::int(c), rat::int(d), rat::int(e))
    }

    /// `x^2+y^2+z^2 = 3xyz`.
    pub fn markov() -> Self {
        Self::from_ints(0, 0, 0, 0, -3).unwrap()
    }

    pub fn defining_poly(&self) -> Poly {
        let mut p = Poly::mono(2, 0, 0).add(&Poly::mono(0, 2, 0)).add(&Poly::mono(0, 0, 2));
        p = p.add(&Poly::mono(1, 1, 1).scale(&self.e));
        p = p.sub(&Poly::x().scale(&self.a));
        p = p.sub(&Poly::y().scale(&self.b));
        p = p.sub(&Poly::z().scale(&self.c));
        p.sub(&Poly::constant(self.d.clone()))
    }

    /// Right-hand side of the reduction rule for `z^2`.
    pub fn z_squared(&self) -> Poly {
        Poly::mono(2, 0, 0)
            .add(&Poly::mono(0, 2, 0))
            .add(&Poly::mono(1, 1, 1).scale(&self.e))
            .sub(&Poly::x().scale(&self.a))
            .sub(&Poly::y().scale(&self.b))
            .sub(&Poly::z().scale(&self.c))
            .sub(&Poly::constant(self.d.clone()))
            .neg()
    }

    pub fn normal_form(&self) -> NormalForm1 {
        let p = self.defining_poly();
        NormalForm1 { n: p.grad() }
    }

    /// Symbolic `V^x, V^y, V^z` as coefficient triples of `(d/dx, d/dy, d/dz)`.
    pub fn v_fields(&self) -> [[Poly; 3]; 3] {
        let [nx, ny, nz] = self.normal_form().n;
        let z = Poly::zero;
        [
            [z(), nz.clone(), ny.neg()],
            [nz.neg(), z(), nx.clone()],
            [ny, nx.neg(), z()],
        ]
    }

    pub fn to_numeric(&self, prec: usize) -> NumParams {
        let f = |q: &BigRational| BigComplex::from_rational(q, prec);
        NumParams { a: f(&self.a), b: f(&self.b), c: f(&self.c), d: f(&self.d), e: f(&self.e) }
    }

    /// Applies `x -> y -> z -> x`, `A -> B -> C -> A` once.
    pub fn rotate(&self) -> Self {
        Self { a: self.c.clone(), b: self.a.clone(), c: self.b.clone(), d: self.d.clone(), e: self.e.clone() }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "A": rat::fmt(&self.a), "B": rat::fmt(&self.b), "C": rat::fmt(&self.c),
            "D": rat::fmt(&self.d), "E": rat::fmt(&self.e),
        })
    }

    pub fn is_markov(&self) -> bool {
        *self == Self::markov()
    }
}

impl NumParams {
    pub fn prec(&self) -> usize {
        self.e.prec()
    }

    pub fn with_prec(&self, prec: usize) -> Self {
        Self {
            a: self.a.clone().with_prec(prec),
            b: self.b.clone().with_prec(prec),
            c: self.c.clone().with_prec(prec),
            d: self.d.clone().with_prec(prec),
            e: self.e.clone().with_prec(prec),
        }
    }

    pub fn markov(prec: usize) -> Self {
        SurfaceParams::markov().to_numeric(prec)
    }

    /// `P(x,y,z)`.
    pub fn eval_p(&self, p: &Pt) -> BigComplex {
        let [x, y, z] = p;
        let xyz = &(x * y) * z;
        let mut r = &(x * x) + &(y * y);
        r = &r + &(z * z);
        r = &r + &(&self.e * &xyz);
        r = &r - &(&self.a * x);
        r = &r - &(&self.b * y);
        r = &r - &(&self.c * z);
        &r - &self.d
    }

    /// Size of the largest term of `P` at `p`, floored at 1.
    pub fn residual_scale(&self, p: &Pt) -> f64 {
        let [x, y, z] = p;
        let xyz = (&(x * y) * z).abs_f64() * self.e.abs_f64();
        let sq = x.abs_f64().powi(2) + y.abs_f64().powi(2) + z.abs_f64().powi(2);
        let lin = self.a.abs_f64() * x.abs_f64() + self.b.abs_f64() * y.abs_f64() + self.c.abs_f64() * z.abs_f64();
        1.0f64.max(xyz).max(sq).max(lin).max(self.d.abs_f64())
    }

    /// `N = grad P` at `p`.
    pub fn grad(&self, p: &Pt) -> Pt {
        let [x, y, z] = p;
        [
            &(&x.mul_i64(2) + &(&self.e * &(y * z))) - &self.a,
            &(&y.mul_i64(2) + &(&self.e * &(x * z))) - &self.b,
            &(&z.mul_i64(2) + &(&self.e * &(x * y))) - &self.c,
        ]
    }

    /// `[V^x, V^y, V^z]` at `p`.
    pub fn v_at(&self, p: &Pt) -> [Pt; 3] {
        let [nx, ny, nz] = self.grad(p);
        let z = BigComplex::zero(self.prec());
        [
            [z.clone(), nz.clone(), -&ny],
            [-&nz, z.clone(), nx.clone()],
            [ny, -&nx, z],
        ]
    }

    /// Solves for `z` given `x, y`; returns both roots of the quadratic.
    pub fn lift_z(&self, x: &BigComplex, y: &BigComplex) -> [BigComplex; 2] {
        let b = &(&self.e * &(x * y)) - &self.c;
        let c = &(&(&(x * x) + &(y * y)) - &(&self.a * x)) - &(&(&self.b * y) + &self.d);
        quadratic_roots(&BigComplex::one(self.prec()), &b, &c)
    }

    pub fn to_json(&self) -> Value {
        let f = |c: &BigComplex| json!([c.re.to_dec_string(), c.im.to_dec_string()]);
        json!({"A": f(&self.a), "B": f(&self.b), "C": f(&self.c), "D": f(&self.d), "E": f(&self.e)})
    }
}

/// Roots of `a t^2 + b t + c`, cancellation-free form.
pub fn quadratic_roots(a: &BigComplex, b: &BigComplex, c: &BigComplex) -> [BigComplex; 2] {
    let disc = (b * b) - (&(a * c)).mul_i64(4);
    let s = disc.sqrt();
    // choose the sign making |b + sign*s| large
    let plus = b + &s;
    let minus = b - &s;
    let q = if plus.abs_f64() >= minus.abs_f64() { plus } else { minus };
    let q = q.scale(&BigReal::from_f64(-0.5, a.prec()));
    if q.is_zero() {
        let z = BigComplex::zero(a.prec());
        return [z.clone(), z];
    }
    [&q / a, c / &q]
}

impl ParamsSpec {
    pub fn numeric(&self, prec: usize) -> NumParams {
        match self {
            ParamsSpec::Exact(p) => p.to_numeric(prec),
            ParamsSpec::Numeric(n) => n.with_prec(prec),
        }
    }

    pub fn exact(&self) -> Option<&SurfaceParams> {
        match self {
            ParamsSpec::Exact(p) => Some(p),
            ParamsSpec::Numeric(_) => None,
        }
    }

    /// Reads `{"A":…,"E":…}`; entries are `"p/q"`, decimal strings/numbers or `[re, im]`.
    pub fn from_json(v: &Value, prec: usize) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("params must be an object".into()))?;
        let mut exact: Vec<Option<BigRational>> = Vec::new();
        let mut num: Vec<BigComplex> = Vec::new();
        for key in ["A", "B", "C", "D", "E"] {
            let e = obj.get(key).or_else(|| obj.get(&key.to_lowercase()));
            let (q, c) = match e {
                None => (Some(BigRational::zero()), BigComplex::zero(prec)),
                Some(Value::String(s)) => match rat::parse(s) {
                    Some(q) => {
                        let c = BigComplex::from_rational(&q, prec);
                        (Some(q), c)
                    }
                    None => (None, BigComplex::parse(s, prec).ok_or_else(|| Error::Parse(format!("bad {}: {}", key, s)))?),
                },
                Some(Value::Number(n)) => {
                    let s = n.to_string();
                    let q = rat::parse(&s).ok_or_else(|| Error::Parse(format!("bad {}: {}", key, s)))?;
                    let c = BigComplex::from_rational(&q, prec);
                    (Some(q), c)
                }
                Some(Value::Array(a)) if a.len() == 2 => {
                    let part = |v: &Value| -> Result<BigReal> {
                        let s = match v {
                            Value::String(s) => s.clone(),
                            Value::Number(n) => n.to_string(),
                            _ => return Err(Error::Parse(format!("bad {}", key))),
                        };
                        BigReal::parse_dec(&s, prec).ok_or_else(|| Error::Parse(format!("bad {}: {}", key, s)))
                    };
                    let c = BigComplex::new(part(&a[0])?, part(&a[1])?);
                    let q = if c.im.is_zero() {
                        match &a[0] {
                            Value::String(s) => rat::parse(s),
                            Value::Number(n) => rat::parse(&n.to_string()),
                            _ => None,
                        }
                    } else {
                        None
                    };
                    (q, c)
                }
                Some(_) => return Err(Error::Parse(format!("bad {}", key))),
            };
            exact.push(q);
            num.push(c);
        }
        if exact.iter().all(|q| q.is_some()) {
            let q: Vec<BigRational> = exact.into_iter().map(|q| q.unwrap()).collect();
            return Ok(ParamsSpec::Exact(SurfaceParams::new(
                q[0].clone(),
                q[1].clone(),
                q[2].clone(),
                q[3].clone(),
                q[4].clone(),
            )?));
        }
        if num[4].is_zero() {
            return Err(Error::InvalidParams("E must be nonzero".into()));
        }
        let mut it = num.into_iter();
        let mut n = || it.next().unwrap();
        Ok(ParamsSpec::Numeric(NumParams { a: n(), b: n(), c: n(), d: n(), e: n() }))
    }
}

/// `|P(pt)| < tol`, together with the residual.
pub fn on_surface(params: &NumParams, pt: &Pt, tol: f64) -> (bool, BigComplex) {
    let r = params.eval_p(pt);
    (r.abs_f64() < tol, r)
}

/// Builds a `SurfacePoint`, recording the residual.
pub fn surface_point(params: &NumParams, pt: Pt) -> SurfacePoint {
    let residual = params.eval_p(&pt);
    let [x, y, z] = pt;
    SurfacePoint { x, y, z, residual }
}

fn cross_component(u: &Pt, v: &Pt, k: usize) -> BigComplex {
    let (i, j) = ((k + 1) % 3, (k + 2) % 3);
    &(&u[i] * &v[j]) - &(&u[j] * &v[i])
}

/// The three chart expressions `(u x v)_k / N_k`, `None` where `N_k = 0`.
pub fn omega_charts(params: &NumParams, pt: &Pt, u: &Pt, v: &Pt) -> [Option<BigComplex>; 3] {
    let n = params.grad(pt);
    let mut out: [Option<BigComplex>; 3] = [None, None, None];
    for k in 0..3 {
        if !n[k].is_zero() {
            out[k] = Some(&cross_component(u, v, k) / &n[k]);
        }
    }
    out
}

/// `omega(u, v)` via the chart with the largest denominator.
pub fn omega_eval(params: &NumParams, pt: &Pt, u: &Pt, v: &Pt) -> Result<BigComplex> {
    let n = params.grad(pt);
    let mut best = 0;
    let mut bmag = f64::NEG_INFINITY;
    for (k, nk) in n.iter().enumerate() {
        let m = nk.log2_abs();
        if m > bmag {
            bmag = m;
            best = k;
        }
    }
    let floor = -(params.prec() as f64) / 2.0;
    if bmag < floor {
        return Err(Error::AllChartsSingular);
    }
    Ok(&cross_component(u, v, best) / &n[best])
}

/// Rank of the matrix with rows `V^x, V^y, V^z` at `pt`; always 0 or 2.
pub fn spanning_rank(params: &NumParams, pt: &Pt, tol: f64) -> usize {
    // the matrix is antisymmetric with entries +-N_k, so its rank is 2 unless N = 0
    let n = params.grad(pt);
    let scale = params.residual_scale(pt).sqrt();
    if n.iter().all(|c| c.abs_f64() <= tol * scale) {
        0
    } else {
        2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: [i64; 3], prec: usize) -> Pt {
        v.map(|c| BigComplex::from_i64(c, prec))
    }

    #[test]
    fn membership_examples() {
        let m = NumParams::markov(128);
        assert!(on_surface(&m, &pt([1, 1, 1], 128), 1e-30).0);
        assert!(on_surface(&m, &pt([0, 0, 0], 128), 1e-30).0);
        let (ok, r) = on_surface(&m, &pt([1, 1, 3], 128), 1e-30);
        assert!(!ok);
        assert_eq!(r.to_f64_pair(), (2.0, 0.0));
    }

    #[test]
    fn rank_examples() {
        let m = NumParams::markov(128);
        assert_eq!(spanning_rank(&m, &pt([0, 0, 0], 128), 1e-20), 0);
        assert_eq!(spanning_rank(&m, &pt([1, 1, 1], 128), 1e-20), 2);
    }

    #[test]
    fn omega_antisymmetric() {
        let m = NumParams::markov(128);
        let p = pt([1, 2, 5], 128);
        let v = m.v_at(&p);
        assert!(omega_eval(&m, &p, &v[0], &v[0]).unwrap().is_zero());
        assert_eq!(omega_eval(&m, &pt([0, 0, 0], 128), &v[0], &v[1]), Err(Error::AllChartsSingular));
    }

    #[test]
    fn params_json_roundtrip() {
        let sp = SurfaceParams::new(rat::frac(1, 2), rat::int(0), rat::int(-3), rat::int(7), rat::int(1)).unwrap();
        let back = ParamsSpec::from_json(&sp.to_json(), 64).unwrap();
        assert_eq!(back.exact(), Some(&sp));
        let cx = serde_json::json!({"E": ["-3", "0.5"]});
        assert!(matches!(ParamsSpec::from_json(&cx, 64).unwrap(), ParamsSpec::Numeric(_)));
        assert!(ParamsSpec::from_json(&serde_json::json!({"E": "0"}), 64).is_err());
    }

    #[test]
    fn quadratic_roots_cancellation() {
        let one = BigComplex::one(128);
        let r = quadratic_roots(&one, &BigComplex::from_f64(-1e20, 128), &one);
        let small = if r[0].abs_f64() < r[1].abs_f64() { &r[0] } else { &r[1] };
        assert!((small.re.to_f64() - 1e-20).abs() < 1e-35);
    }

    #[test]
    fn v_fields_match_gradient() {
        let sp = SurfaceParams::markov();
        let v = sp.v_fields();
        assert_eq!(v[2][0], Poly::parse("2*y - 3*x*z").unwrap());
        assert_eq!(v[2][1], Poly::parse("-2*x + 3*y*z").unwrap());
    }
}
