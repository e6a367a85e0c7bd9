//! Closed-form complete flows of `V^x, V^y, V^z`, shears, and compositions.

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::interp::{horner, Barycentric};
use crate::num::{BigComplex, BigReal};
use crate::poly::Poly;
use crate::surface::{omega_eval, NumParams, Pt, SurfacePoint};

/// Series branch of `entire_trig` is used for `|t^2 w| < THETA`.
pub const THETA: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i % 3]
    }

    pub fn parse(s: &str) -> Result<Axis> {
        match s.trim() {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            o => Err(Error::Parse(format!("unknown axis {:?}", o))),
        }
    }

    pub fn name(self) -> &'static str {
        ["x", "y", "z"][self.index()]
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `(cos(t r), sin(t r)/r, (1 - cos(t r))/w)` with `r^2 = w`, entire in `w`.
pub fn entire_trig(w: &BigComplex, t: &BigComplex) -> (BigComplex, BigComplex, BigComplex) {
    let prec = w.prec().max(t.prec());
    let u = &(t * t) * w;
    if u.abs_f64() < THETA {
        // C0 = sum (-u)^n/(2n)!, S0 = t sum (-u)^n/(2n+1)!, V0 = t^2 sum (-u)^n/(2n+2)!
        let eps = -(prec as f64) - 8.0;
        let mut c = BigComplex::one(prec);
        let mut s = BigComplex::one(prec);
        let mut v = BigComplex::from_f64(0.5, prec);
        let mut tc = BigComplex::one(prec);
        let neg_u = -&u;
        let mut n: i64 = 1;
        loop {
            // tc = (-u)^n/(2n)!
            tc = &(&tc * &neg_u) / &BigComplex::from_i64((2 * n - 1) * (2 * n), prec);
            let ts = &tc / &BigComplex::from_i64(2 * n + 1, prec);
            let tv = &ts / &BigComplex::from_i64(2 * n + 2, prec);
            c = &c + &tc;
            s = &s + &ts;
            v = &v + &tv;
            if tc.is_zero() || tc.log2_abs() < eps {
                break;
            }
            n += 1;
        }
        let t2 = t * t;
        return (c, &s * t, &v * &t2);
    }
    let r = w.sqrt();
    let tr = t * &r;
    let c0 = tr.cos();
    let s0 = &tr.sin() / &r;
    let v0 = &(&BigComplex::one(prec) - &c0) / w;
    (c0, s0, v0)
}

/// Relative drift tolerance for the post-condition check: `2^-(prec/2)`.
pub fn drift_tolerance(prec: usize) -> f64 {
    2f64.powf(-(prec as f64) / 2.0)
}

/// Flow of `V^z` without the surface check; `z` is fixed.
pub fn flow_z_raw(np: &NumParams, pt: &Pt, t: &BigComplex) -> (Pt, f64) {
    let [x, y, z] = pt;
    let e = &np.e;
    let ez = e * z;
    let w = &BigComplex::from_i64(4, np.prec()) - &(&ez * &ez);
    let (c0, s0, v0) = entire_trig(&w, t);
    let n = np.grad(pt);
    let ka = &np.a.mul_i64(2) - &(&np.b * &ez);
    let kb = &np.b.mul_i64(2) - &(&np.a * &ez);
    let tx = [x * &c0, &n[1] * &s0, &ka * &v0];
    let ty = [y * &c0, -&(&n[0] * &s0), &kb * &v0];
    let size = tx.iter().chain(ty.iter()).map(|c| c.abs_f64()).fold(0.0, f64::max);
    let nx = &(&tx[0] + &tx[1]) + &tx[2];
    let ny = &(&ty[0] + &ty[1]) + &ty[2];
    ([nx, ny, z.clone()], size)
}

fn permute_in(axis: Axis, np: &NumParams, pt: &Pt) -> (NumParams, Pt) {
    match axis {
        Axis::Z => (np.clone(), pt.clone()),
        // (X,Y,Z) = (y,z,x), A' = B, B' = C, C' = A
        Axis::X => (
            NumParams { a: np.b.clone(), b: np.c.clone(), c: np.a.clone(), d: np.d.clone(), e: np.e.clone() },
            [pt[1].clone(), pt[2].clone(), pt[0].clone()],
        ),
        // (X,Y,Z) = (z,x,y), A' = C, B' = A, C' = B
        Axis::Y => (
            NumParams { a: np.c.clone(), b: np.a.clone(), c: np.b.clone(), d: np.d.clone(), e: np.e.clone() },
            [pt[2].clone(), pt[0].clone(), pt[1].clone()],
        ),
    }
}

fn permute_out(axis: Axis, q: Pt) -> Pt {
    let [a, b, c] = q;
    match axis {
        Axis::Z => [a, b, c],
        Axis::X => [c, a, b],
        Axis::Y => [b, c, a],
    }
}

/// Flow of `V^axis` for time `t`, no surface check. Returns the image and the
/// magnitude of the largest summand (for drift scaling).
pub fn flow_axis_raw(np: &NumParams, axis: Axis, pt: &Pt, t: &BigComplex) -> (Pt, f64) {
    let (p2, q) = permute_in(axis, np, pt);
    let (r, size) = flow_z_raw(&p2, &q, t);
    (permute_out(axis, r), size)
}

fn drift_check(np: &NumParams, before: &Pt, after: Pt, size: f64) -> Result<SurfacePoint> {
    let r0 = np.eval_p(before);
    let r1 = np.eval_p(&after);
    let diff = (&r1 - &r0).abs_f64();
    let scale = np.residual_scale(before).max(np.residual_scale(&after)).max(size * size).max(1.0);
    if !(diff <= drift_tolerance(np.prec()) * scale) {
        return Err(Error::SurfaceDrift { residual: format!("{:e}", diff) });
    }
    let [x, y, z] = after;
    Ok(SurfacePoint { x, y, z, residual: r1 })
}

/// Flow of `V^z`; the level set of `P` through `pt` is preserved.
pub fn flow_z(np: &NumParams, pt: &Pt, t: &BigComplex) -> Result<SurfacePoint> {
    flow_axis(np, Axis::Z, pt, t)
}

/// Flow of `V^axis`, checked against drift of `P`.
pub fn flow_axis(np: &NumParams, axis: Axis, pt: &Pt, t: &BigComplex) -> Result<SurfacePoint> {
    let (r, size) = flow_axis_raw(np, axis, pt, t);
    drift_check(np, pt, r, size)
}

/// Time function of a shear, in the coordinate fixed by its axis.
#[derive(Clone, Debug)]
pub enum TimePoly {
    /// Exact univariate polynomial in the fixed coordinate.
    Exact(Poly),
    /// Ascending monomial coefficients.
    Coeffs(Vec<BigComplex>),
    /// Barycentric interpolation data.
    Interp(Barycentric),
}

impl TimePoly {
    pub fn constant(t: BigComplex) -> Self {
        TimePoly::Coeffs(vec![t])
    }

    pub fn eval(&self, axis: Axis, c: &BigComplex) -> BigComplex {
        match self {
            TimePoly::Exact(p) => {
                let mut pt = [BigComplex::zero(c.prec()), BigComplex::zero(c.prec()), BigComplex::zero(c.prec())];
                pt[axis.index()] = c.clone();
                p.eval(&pt)
            }
            TimePoly::Coeffs(cs) => horner(cs, c),
            TimePoly::Interp(b) => b.eval(c),
        }
    }

    pub fn negated(&self) -> Self {
        match self {
            TimePoly::Exact(p) => TimePoly::Exact(p.neg()),
            TimePoly::Coeffs(cs) => TimePoly::Coeffs(cs.iter().map(|c| -c).collect()),
            TimePoly::Interp(b) => {
                TimePoly::Interp(Barycentric::new(b.nodes.clone(), b.values.iter().map(|c| -c).collect()))
            }
        }
    }
}

/// Flow of `f(c) V^axis` where `c` is the coordinate fixed by `V^axis`.
#[derive(Clone, Debug)]
pub struct ShearFlow {
    pub axis: Axis,
    pub time: TimePoly,
}

impl ShearFlow {
    pub fn axis_flow(axis: Axis, t: BigComplex) -> Self {
        Self { axis, time: TimePoly::constant(t) }
    }

    pub fn exact(axis: Axis, p: Poly) -> Result<Self> {
        let vars = p.vars();
        if (0..3).any(|v| v != axis.index() && vars[v]) {
            return Err(Error::InvalidParams(format!("time polynomial {} must depend on {} only", p, axis)));
        }
        Ok(Self { axis, time: TimePoly::Exact(p) })
    }

    pub fn inverse(&self) -> Self {
        Self { axis: self.axis, time: self.time.negated() }
    }

    pub fn apply(&self, np: &NumParams, pt: &Pt) -> Result<SurfacePoint> {
        let t = self.time.eval(self.axis, &pt[self.axis.index()]);
        flow_axis(np, self.axis, pt, &t)
    }

    pub fn apply_raw(&self, np: &NumParams, pt: &Pt) -> Pt {
        let t = self.time.eval(self.axis, &pt[self.axis.index()]);
        flow_axis_raw(np, self.axis, pt, &t).0
    }
}

/// Composition of shears, applied right to left.
#[derive(Clone, Debug, Default)]
pub struct Automorphism {
    pub shears: Vec<ShearFlow>,
}

impl Automorphism {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(shears: Vec<ShearFlow>) -> Self {
        Self { shears }
    }

    pub fn inverse(&self) -> Self {
        Self { shears: self.shears.iter().rev().map(|s| s.inverse()).collect() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Automorphism) -> Self {
        let mut shears = self.shears.clone();
        shears.extend(other.shears.iter().cloned());
        Self { shears }
    }

    pub fn apply(&self, np: &NumParams, pt: &Pt) -> Result<SurfacePoint> {
        let mut cur = pt.clone();
        let mut res = None;
        for s in self.shears.iter().rev() {
            let sp = s.apply(np, &cur)?;
            cur = sp.coords();
            res = Some(sp);
        }
        Ok(res.unwrap_or_else(|| crate::surface::surface_point(np, cur)))
    }

    pub fn apply_raw(&self, np: &NumParams, pt: &Pt) -> Pt {
        let mut cur = pt.clone();
        for s in self.shears.iter().rev() {
            cur = s.apply_raw(np, &cur);
        }
        cur
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.shears.iter().map(shear_to_json).collect())
    }

    pub fn from_json(v: &Value, prec: usize) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::Parse("automorphism must be an array".into()))?;
        let shears = arr.iter().map(|e| shear_from_json(e, prec)).collect::<Result<Vec<_>>>()?;
        Ok(Self { shears })
    }
}

fn cjson(c: &BigComplex) -> Value {
    json!([c.re.to_dec_string(), c.im.to_dec_string()])
}

pub fn complex_from_json(v: &Value, prec: usize) -> Result<BigComplex> {
    let bad = || Error::Parse(format!("bad complex value {}", v));
    let part = |v: &Value| -> Result<BigReal> {
        match v {
            Value::String(s) => BigReal::parse_dec(s, prec).ok_or_else(bad),
            Value::Number(n) => BigReal::parse_dec(&n.to_string(), prec).ok_or_else(bad),
            _ => Err(bad()),
        }
    };
    match v {
        Value::Array(a) if a.len() == 2 => Ok(BigComplex::new(part(&a[0])?, part(&a[1])?)),
        Value::String(s) => BigComplex::parse(s, prec).ok_or_else(bad),
        Value::Number(_) => Ok(BigComplex::from_real(part(v)?)),
        _ => Err(bad()),
    }
}

pub fn complex_to_json(c: &BigComplex) -> Value {
    cjson(c)
}

fn shear_to_json(s: &ShearFlow) -> Value {
    match &s.time {
        TimePoly::Exact(p) => json!({"axis": s.axis.name(), "time_poly": p.to_string()}),
        TimePoly::Coeffs(cs) => json!({"axis": s.axis.name(), "time_coeffs": cs.iter().map(cjson).collect::<Vec<_>>()}),
        TimePoly::Interp(b) => json!({
            "axis": s.axis.name(),
            "time_interp": {
                "nodes": b.nodes.iter().map(cjson).collect::<Vec<_>>(),
                "values": b.values.iter().map(cjson).collect::<Vec<_>>(),
            }
        }),
    }
}

fn shear_from_json(v: &Value, prec: usize) -> Result<ShearFlow> {
    let axis = Axis::parse(v.get("axis").and_then(|a| a.as_str()).ok_or_else(|| Error::Parse("missing axis".into()))?)?;
    if let Some(tp) = v.get("time_poly") {
        let s = tp.as_str().ok_or_else(|| Error::Parse("time_poly must be a string".into()))?;
        return ShearFlow::exact(axis, Poly::parse(s)?);
    }
    if let Some(tc) = v.get("time_coeffs") {
        let arr = tc.as_array().ok_or_else(|| Error::Parse("time_coeffs must be an array".into()))?;
        let cs = arr.iter().map(|c| complex_from_json(c, prec)).collect::<Result<Vec<_>>>()?;
        return Ok(ShearFlow { axis, time: TimePoly::Coeffs(cs) });
    }
    if let Some(ti) = v.get("time_interp") {
        let list = |k: &str| -> Result<Vec<BigComplex>> {
            ti.get(k)
                .and_then(|a| a.as_array())
                .ok_or_else(|| Error::Parse(format!("time_interp.{} missing", k)))?
                .iter()
                .map(|c| complex_from_json(c, prec))
                .collect()
        };
        let nodes = list("nodes")?;
        let values = list("values")?;
        if nodes.len() != values.len() {
            return Err(Error::Parse("time_interp nodes/values length mismatch".into()));
        }
        return Ok(ShearFlow { axis, time: TimePoly::Interp(Barycentric::new(nodes, values)) });
    }
    Err(Error::Parse("shear needs time_poly, time_coeffs or time_interp".into()))
}

/// Relative change of `omega` under the pushforward by `auto` at `pt`, with
/// tangent vectors pushed by central differences of step `h`.
pub fn check_symplectic(np: &NumParams, auto: &Automorphism, pt: &Pt, h: f64) -> Result<f64> {
    let prec = np.prec();
    let v = np.v_at(pt);
    let mut best: Option<(usize, usize, BigComplex)> = None;
    for (a, b) in [(0, 1), (1, 2), (2, 0)] {
        let w = match omega_eval(np, pt, &v[a], &v[b]) {
            Ok(w) => w,
            Err(_) => return Err(Error::DegenerateFrame),
        };
        if best.as_ref().map_or(true, |(_, _, bw)| w.abs_f64() > bw.abs_f64()) {
            best = Some((a, b, w));
        }
    }
    let (a, b, w0) = best.ok_or(Error::DegenerateFrame)?;
    if w0.is_zero() || w0.log2_abs() < -(prec as f64) / 2.0 {
        return Err(Error::DegenerateFrame);
    }
    let hh = BigComplex::from_f64(h, prec);
    let push = |axis: usize| -> Result<Pt> {
        let ax = Axis::from_index(axis);
        let fwd = flow_axis(np, ax, pt, &hh)?.coords();
        let bwd = flow_axis(np, ax, pt, &-&hh)?.coords();
        let f1 = auto.apply(np, &fwd)?.coords();
        let f0 = auto.apply(np, &bwd)?.coords();
        let inv = hh.mul_i64(2).recip();
        Ok([0, 1, 2].map(|k| &(&f1[k] - &f0[k]) * &inv))
    };
    let fu = push(a)?;
    let fv = push(b)?;
    let img = auto.apply(np, pt)?.coords();
    let w1 = omega_eval(np, &img, &fu, &fv).map_err(|_| Error::DegenerateFrame)?;
    Ok((&w1 - &w0).abs_f64() / w0.abs_f64())
}

/// Orbit samples `phi^axis_{k dt}(pt)` for `k = 0..=steps`.
pub fn orbit(np: &NumParams, axis: Axis, pt: &Pt, dt: &BigComplex, steps: usize) -> Result<Vec<Pt>> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(pt.clone());
    for k in 1..=steps {
        let t = dt * &BigComplex::from_i64(k as i64, np.prec());
        out.push(flow_axis(np, axis, pt, &t)?.coords());
    }
    Ok(out)
}
