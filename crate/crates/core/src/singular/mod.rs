//! Singular points of Markov-type surfaces and their ADE types.
//!
//! Singular points solve `N = 0, P = 0`. With `E = 1`, eliminating
//! `x = (A - yz)/2` leaves a linear and a quadratic equation in `y` whose
//! resultant is a quintic in `z`.

pub mod germ;
pub mod jet;
pub mod upoly;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::num::{best_rational, rat, BigComplex};
use crate::surface::{NumParams, Pt, SurfaceParams};
use jet::{kernel, solve, Approx, Jet, Scalar};
use upoly::{BiPoly, UPoly};

/// Taylor expansions are truncated above this total degree.
pub const JET_ORDER: u32 = 10;

/// Largest `k` the classification of Markov-type surfaces allows for `A_k`.
pub const EXPECTED_MAX_AK: u32 = 5;

/// `(x,y,z) -> (x/E, y/E, z/E)` and `P -> E^2 P`; returns the new parameters and `E`.
pub fn rescale_to_e1(sp: &SurfaceParams) -> (SurfaceParams, BigRational) {
    let e = sp.e.clone();
    let out = SurfaceParams {
        a: &sp.a * &e,
        b: &sp.b * &e,
        c: &sp.c * &e,
        d: &sp.d * &e * &e,
        e: BigRational::one(),
    };
    (out, e)
}

/// A singular or critical point, exact when recognized as rational.
#[derive(Clone, Debug)]
pub enum SingularPoint {
    Exact([BigRational; 3]),
    Numeric(Pt),
}

impl SingularPoint {
    pub fn numeric(&self, prec: usize) -> Pt {
        match self {
            SingularPoint::Exact(q) => [0, 1, 2].map(|i| BigComplex::from_rational(&q[i], prec)),
            SingularPoint::Numeric(p) => p.clone().map(|c| c.with_prec(prec)),
        }
    }

    pub fn exact(&self) -> Option<&[BigRational; 3]> {
        match self {
            SingularPoint::Exact(q) => Some(q),
            SingularPoint::Numeric(_) => None,
        }
    }

    /// Multiply every coordinate by `s`.
    pub fn scaled(&self, s: &BigRational) -> Self {
        match self {
            SingularPoint::Exact(q) => SingularPoint::Exact(q.clone().map(|c| c * s)),
            SingularPoint::Numeric(p) => {
                let k = BigComplex::from_rational(s, p[0].prec());
                SingularPoint::Numeric(p.clone().map(|c| &c * &k))
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            SingularPoint::Exact(q) => json!(q.iter().map(rat::fmt).collect::<Vec<_>>()),
            SingularPoint::Numeric(p) => {
                json!(p.iter().map(|c| json!([c.re.to_sci(30), c.im.to_sci(30)])).collect::<Vec<_>>())
            }
        }
    }

    pub fn from_json(v: &Value, prec: usize) -> Result<Self> {
        let arr = v.as_array().filter(|a| a.len() == 3).ok_or_else(|| Error::Parse("point must have 3 entries".into()))?;
        if arr.iter().all(|e| e.is_string() || e.is_i64()) {
            let q: Option<Vec<BigRational>> = arr
                .iter()
                .map(|e| match e {
                    Value::String(s) => rat::parse(s),
                    _ => e.as_i64().map(rat::int),
                })
                .collect();
            if let Some(q) = q {
                return Ok(SingularPoint::Exact([q[0].clone(), q[1].clone(), q[2].clone()]));
            }
        }
        let c: Result<Vec<BigComplex>> = arr.iter().map(|e| crate::flows::complex_from_json(e, prec)).collect();
        let c = c?;
        Ok(SingularPoint::Numeric([c[0].clone(), c[1].clone(), c[2].clone()]))
    }
}

/// Result of the singular-point search.
#[derive(Clone, Debug)]
pub struct SingularSearch {
    pub points: Vec<SingularPoint>,
    /// The elimination collapsed and multistart Newton was used instead.
    pub resultant_degenerate: bool,
}

fn zero_tol(prec: usize) -> f64 {
    -(prec as f64) / 2.0
}

fn hessian_num(np: &NumParams, p: &Pt) -> Vec<Vec<Approx>> {
    let two = BigComplex::from_i64(2, np.prec());
    let [x, y, z] = p;
    let w = |c: BigComplex| Approx::new(c, f64::NEG_INFINITY);
    vec![
        vec![w(two.clone()), w(&np.e * z), w(&np.e * y)],
        vec![w(&np.e * z), w(two.clone()), w(&np.e * x)],
        vec![w(&np.e * y), w(&np.e * x), w(two)],
    ]
}

/// Newton iteration on `N = 0`.
fn newton_critical(np: &NumParams, mut p: Pt, iters: usize) -> Option<Pt> {
    let target = -(np.prec() as f64) + 12.0;
    for _ in 0..iters {
        let n = np.grad(&p);
        if n.iter().all(|c| c.is_zero() || c.log2_abs() < target) {
            break;
        }
        let rhs: Vec<Approx> = n.iter().map(|c| Approx::new(c.clone(), f64::NEG_INFINITY)).collect();
        // singular Jacobian: degenerate critical point, keep the current estimate
        let Some(step) = solve(&hessian_num(np, &p), &rhs) else { break };
        let mut worst = f64::NEG_INFINITY;
        let prev = p.clone();
        for i in 0..3 {
            worst = worst.max(step[i].v.log2_abs() - p[i].log2_abs().max(0.0));
            p[i] = &p[i] - &step[i].v;
        }
        if !p.iter().all(|c| c.is_finite()) {
            return None;
        }
        let norm = |q: &Pt| np.grad(q).iter().map(|c| c.abs_f64()).fold(0.0, f64::max);
        if norm(&p) > 4.0 * norm(&prev) && norm(&prev) < 1e-6 {
            return Some(prev);
        }
        if worst < target {
            break;
        }
    }
    Some(p)
}

fn grad_small(np: &NumParams, p: &Pt) -> bool {
    let scale = np.residual_scale(p).sqrt().log2();
    np.grad(p).iter().all(|c| c.is_zero() || c.log2_abs() < zero_tol(np.prec()) + scale)
}

fn p_small(np: &NumParams, p: &Pt) -> bool {
    let r = np.eval_p(p);
    r.is_zero() || r.log2_abs() < zero_tol(np.prec()) + np.residual_scale(p).log2()
}

fn exact_grad_zero(sp: &SurfaceParams, q: &[BigRational; 3]) -> bool {
    sp.normal_form().n.iter().all(|n| Zero::is_zero(&n.eval_rational(q)))
}

/// Snap a numeric point to a nearby rational point if `N` vanishes there exactly.
fn snap(sp: &SurfaceParams, p: &Pt) -> Option<[BigRational; 3]> {
    if p.iter().any(|c| c.im.log2_abs() > -40.0 && !c.im.is_zero()) {
        return None;
    }
    let den = BigInt::from(1_000_000u32);
    let q = [0, 1, 2].map(|i| best_rational(&p[i].re.to_rational(), &den));
    exact_grad_zero(sp, &q).then_some(q)
}

fn same_point(a: &Pt, b: &Pt, prec: usize) -> bool {
    (0..3).all(|i| {
        let d = &a[i] - &b[i];
        d.is_zero() || d.log2_abs() < zero_tol(prec) + a[i].log2_abs().max(0.0)
    })
}

fn push_unique(out: &mut Vec<(Pt, Option<[BigRational; 3]>)>, p: Pt, q: Option<[BigRational; 3]>, prec: usize) {
    if let Some(qq) = &q {
        if out.iter().any(|(_, e)| e.as_ref() == Some(qq)) {
            return;
        }
    }
    if out.iter().any(|(o, _)| same_point(o, &p, prec)) {
        return;
    }
    out.push((p, q));
}

/// All critical points of `P` (solutions of `N = 0`), regardless of `D`. Requires `E = 1`.
pub fn find_critical_points(sp: &SurfaceParams, search_box: f64, prec: usize) -> Result<SingularSearch> {
    if !sp.e.is_one() {
        return Err(Error::InvalidParams("E must be 1; rescale first".into()));
    }
    let np = sp.to_numeric(prec);
    let two = rat::int(2);
    // F1 = y(4 - z^2) + (A z - 2B), F2 = -z y^2 + A y + (4z - 2C)
    let a1 = UPoly::from_ints(&[4, 0, -1]);
    let a0 = UPoly::new(vec![-(&two * &sp.b), sp.a.clone()]);
    let f1 = BiPoly(vec![a0.clone(), a1.clone()]);
    let f2 = BiPoly(vec![
        UPoly::new(vec![-(&two * &sp.c), rat::int(4)]),
        UPoly::new(vec![sp.a.clone()]),
        UPoly::from_ints(&[0, -1]),
    ]);
    let res = BiPoly::resultant_lin_quad(&f1, &f2);
    let mut found: Vec<(Pt, Option<[BigRational; 3]>)> = Vec::new();
    let degenerate = res.is_zero();
    let work = prec + 64;
    let npw = np.with_prec(work);
    let candidates: Vec<Pt> = if degenerate {
        multistart(&npw, search_box, 0x5eed, 64)
    } else {
        let mut c = Vec::new();
        let sq = res.squarefree();
        for z in sq.roots(work) {
            let a1z = a1.eval(&z);
            let a0z = a0.eval(&z);
            let ys: Vec<BigComplex> = if a1z.log2_abs() > -(work as f64) / 2.0 {
                vec![-&(&a0z / &a1z)]
            } else {
                let b2 = -&z;
                let b1 = BigComplex::from_rational(&sp.a, work);
                let b0 = &z.mul_i64(4) - &BigComplex::from_rational(&(&two * &sp.c), work);
                if b2.is_zero() {
                    if b1.is_zero() { vec![] } else { vec![-&(&b0 / &b1)] }
                } else {
                    crate::surface::quadratic_roots(&b2, &b1, &b0).to_vec()
                }
            };
            for y in ys {
                let x = (&BigComplex::from_rational(&sp.a, work) - &(&y * &z)).scale(&crate::num::BigReal::from_f64(0.5, work));
                c.push([x, y, z.clone()]);
            }
        }
        c
    };
    for p in candidates {
        let Some(p) = newton_critical(&npw, p, 200) else { continue };
        if !grad_small(&npw, &p) {
            continue;
        }
        let q = snap(sp, &p);
        let p = match &q {
            Some(q) => [0, 1, 2].map(|i| BigComplex::from_rational(&q[i], prec)),
            None => p.map(|c| c.with_prec(prec)),
        };
        push_unique(&mut found, p, q, prec);
    }
    let points = found
        .into_iter()
        .map(|(p, q)| match q {
            Some(q) => SingularPoint::Exact(q),
            None => SingularPoint::Numeric(p),
        })
        .collect();
    Ok(SingularSearch { points, resultant_degenerate: degenerate })
}

/// Newton from seeded random starts in `[-b, b]^3` (complex parts included).
fn multistart(np: &NumParams, b: f64, seed: u64, starts: usize) -> Vec<Pt> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prec = np.prec();
    (0..starts)
        .map(|_| {
            [0, 1, 2].map(|_| {
                BigComplex::from_f64_pair(rng.gen_range(-b..=b), 0.1 * rng.gen_range(-b..=b), prec)
            })
        })
        .collect()
}

/// Singular points of the surface (`N = 0` and `P = 0`). Requires `E = 1`.
pub fn find_singular_points(sp: &SurfaceParams, search_box: f64, prec: usize) -> Result<SingularSearch> {
    let crit = find_critical_points(sp, search_box, prec)?;
    let np = sp.to_numeric(prec);
    let points = crit
        .points
        .into_iter()
        .filter(|p| match p {
            SingularPoint::Exact(q) => Zero::is_zero(&sp.defining_poly().eval_rational(q)),
            SingularPoint::Numeric(x) => p_small(&np, x),
        })
        .collect();
    Ok(SingularSearch { points, resultant_degenerate: crit.resultant_degenerate })
}

/// Multistart Newton for complex parameters; `E` need not be 1.
pub fn find_singular_points_numeric(np: &NumParams, search_box: f64, prec: usize, seed: u64) -> Vec<SingularPoint> {
    let npw = np.with_prec(prec + 64);
    let mut found = Vec::new();
    for p in multistart(&npw, search_box, seed, 96) {
        let Some(p) = newton_critical(&npw, p, 200) else { continue };
        if grad_small(&npw, &p) && p_small(&npw, &p) {
            push_unique(&mut found, p.map(|c| c.with_prec(prec)), None, prec);
        }
    }
    found.into_iter().map(|(p, _)| SingularPoint::Numeric(p)).collect()
}

/// ADE type of a surface point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdeType {
    A(u32),
    D4,
    Smooth,
}

impl std::fmt::Display for AdeType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AdeType::A(k) => write!(f, "A{k}"),
            AdeType::D4 => write!(f, "D4"),
            AdeType::Smooth => write!(f, "Smooth"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SingularityReport {
    pub point: SingularPoint,
    pub hessian: [[String; 3]; 3],
    pub hessian_corank: usize,
    pub ade_type: AdeType,
    /// Reduction trace: kernel, residual series, discriminant.
    pub evidence: Vec<String>,
    pub warnings: Vec<String>,
}

impl SingularityReport {
    pub fn to_json(&self) -> Value {
        json!({
            "point": self.point.to_json(),
            "hessian": self.hessian,
            "hessianCorank": self.hessian_corank,
            "adeType": self.ade_type.to_string(),
            "evidence": self.evidence,
            "warnings": self.warnings,
        })
    }
}

struct Classified {
    hessian: [[String; 3]; 3],
    corank: usize,
    ade: AdeType,
    evidence: Vec<String>,
    warnings: Vec<String>,
}

fn fmt_vec<S: Scalar>(v: &[S]) -> String {
    format!("({})", v.iter().map(|c| c.describe()).collect::<Vec<_>>().join(", "))
}

/// Taylor expansion of `P` at `p` in shifted coordinates.
fn taylor<S: Scalar>(coef: &[S; 5], p: &[S; 3]) -> Jet<S, 3> {
    let proto = &coef[0];
    let [a, b, c, d, e] = coef;
    let v = [0, 1, 2].map(|i| Jet::<S, 3>::constant(p[i].clone(), 3).add(&Jet::var(proto, i, 3)));
    let [x, y, z] = &v;
    x.mul(x)
        .add(&y.mul(y))
        .add(&z.mul(z))
        .add(&x.mul(y).mul(z).scale(e))
        .sub(&x.scale(a))
        .sub(&y.scale(b))
        .sub(&z.scale(c))
        .sub(&Jet::constant(d.clone(), 3))
}

/// Eliminate the nondegenerate directions: returns the residual `g(t)` in the kernel variables.
fn split<S: Scalar, const M: usize>(f: &Jet<S, 3>, kern: &[Vec<S>], order: u32) -> Jet<S, M> {
    let proto = f.coeff(&[0, 0, 0]);
    let ns = 3 - M;
    // pivot coordinates of the kernel basis; the remaining ones span a complement
    let mut used = Vec::new();
    for k in kern {
        let m = (0..3)
            .filter(|i| !used.contains(i))
            .max_by(|&i, &j| k[i].magnitude().total_cmp(&k[j].magnitude()))
            .unwrap();
        used.push(m);
    }
    let comp: Vec<usize> = (0..3).filter(|i| !used.contains(i)).collect();
    // u = sum_a s_a e_{comp[a]} + sum_b t_b kern[b], variables ordered (s.., t..)
    let lin = |l: usize| -> Jet<S, 3> {
        let mut j = Jet::zero(&proto, order);
        for (a, &ci) in comp.iter().enumerate() {
            if ci == l {
                j = j.add(&Jet::var(&proto, a, order));
            }
        }
        for (b, kb) in kern.iter().enumerate() {
            j = j.add(&Jet::var(&proto, ns + b, order).scale(&kb[l]));
        }
        j
    };
    let mut fo = f.clone();
    fo.order = order;
    let fl = fo.compose(&[lin(0), lin(1), lin(2)], order);
    // Hessian block in s
    let hs: Vec<Vec<S>> = (0..ns)
        .map(|a| {
            (0..ns)
                .map(|b| {
                    let mut e = [0u32; 3];
                    e[a] += 1;
                    e[b] += 1;
                    let c = fl.coeff(&e);
                    if a == b { c.mul(&c.from_i64_like(2)) } else { c }
                })
                .collect()
        })
        .collect();
    let inv: Vec<Vec<S>> = (0..ns)
        .map(|i| {
            let mut e = vec![proto.zero_like(); ns];
            e[i] = proto.from_i64_like(1);
            solve(&hs, &e).expect("nondegenerate block")
        })
        .collect();
    let grads: Vec<Jet<S, 3>> = (0..ns).map(|a| fl.diff(a)).collect();
    let tvars: [Jet<S, M>; M] = std::array::from_fn(|b| Jet::var(&proto, b, order));
    let mut s: Vec<Jet<S, M>> = vec![Jet::zero(&proto, order); ns];
    let subst = |s: &[Jet<S, M>]| -> [Jet<S, M>; 3] {
        std::array::from_fn(|i| if i < ns { s[i].clone() } else { tvars[i - ns].clone() })
    };
    for _ in 0..=order {
        let sub = subst(&s);
        let g: Vec<Jet<S, M>> = grads.iter().map(|gj| gj.compose(&sub, order)).collect();
        if g.iter().all(|x| x.is_zero()) {
            break;
        }
        for a in 0..ns {
            let mut corr = Jet::zero(&proto, order);
            for (b, gb) in g.iter().enumerate() {
                // column b of inv equals row b since the block is symmetric
                corr = corr.add(&gb.scale(&inv[b][a]));
            }
            s[a] = s[a].sub(&corr);
        }
    }
    fl.compose(&subst(&s), order)
}

fn classify_generic<S: Scalar>(coef: &[S; 5], p: &[S; 3]) -> Result<Classified> {
    let f = taylor(coef, p);
    let c0 = f.coeff(&[0, 0, 0]);
    let lin: Vec<S> = (0..3).map(|i| f.coeff(&std::array::from_fn(|j| u32::from(i == j)))).collect();
    if !c0.is_zero() || lin.iter().any(|c| !c.is_zero()) {
        return Err(Error::NotSingular(format!("P = {}, N = {}", c0.describe(), fmt_vec(&lin))));
    }
    let h: Vec<Vec<S>> = (0..3)
        .map(|i| {
            (0..3)
                .map(|j| {
                    let mut e = [0u32; 3];
                    e[i] += 1;
                    e[j] += 1;
                    let c = f.coeff(&e);
                    if i == j { c.mul(&c.from_i64_like(2)) } else { c }
                })
                .collect()
        })
        .collect();
    let hessian = std::array::from_fn(|i| std::array::from_fn(|j| h[i][j].describe()));
    let (rank, kern) = kernel(&h);
    let corank = 3 - rank;
    let mut evidence = vec![format!("hessian rank {rank}")];
    let mut warnings = Vec::new();
    let ade = match corank {
        0 => {
            evidence.push("nondegenerate quadratic part".into());
            AdeType::A(1)
        }
        1 => {
            evidence.push(format!("kernel {}", fmt_vec(&kern[0])));
            let g = split::<S, 1>(&f, &kern, JET_ORDER);
            let terms: Vec<String> = g.terms.iter().map(|(e, c)| format!("{}*t^{}", c.describe(), e[0])).collect();
            evidence.push(format!("residual {}", if terms.is_empty() { "0".into() } else { terms.join(" + ") }));
            let Some(v) = g.valuation() else {
                return Err(Error::JetDegenerate(format!("residual vanishes through degree {JET_ORDER}")));
            };
            let k = v - 1;
            if k > EXPECTED_MAX_AK {
                warnings.push(format!("A{k} exceeds the expected bound k <= {EXPECTED_MAX_AK}"));
            }
            AdeType::A(k)
        }
        2 => {
            evidence.push(format!("kernel {} {}", fmt_vec(&kern[0]), fmt_vec(&kern[1])));
            let g = split::<S, 2>(&f, &kern, 3);
            let [a, b, c, d] = [[3, 0], [2, 1], [1, 2], [0, 3]].map(|e| g.coeff(&e));
            evidence.push(format!("cubic ({}, {}, {}, {})", a.describe(), b.describe(), c.describe(), d.describe()));
            let k = |i: i64| a.from_i64_like(i);
            // b^2c^2 - 4ac^3 - 4b^3d - 27a^2d^2 + 18abcd
            let disc = b.mul(&b).mul(&c).mul(&c)
                .sub(&k(4).mul(&a).mul(&c).mul(&c).mul(&c))
                .sub(&k(4).mul(&b).mul(&b).mul(&b).mul(&d))
                .sub(&k(27).mul(&a).mul(&a).mul(&d).mul(&d))
                .add(&k(18).mul(&a).mul(&b).mul(&c).mul(&d));
            evidence.push(format!("discriminant {}", disc.describe()));
            if disc.is_zero() {
                return Err(Error::JetDegenerate(format!("cubic 3-jet has a repeated factor: {}", evidence.join("; "))));
            }
            AdeType::D4
        }
        _ => return Err(Error::JetDegenerate("vanishing hessian".into())),
    };
    Ok(Classified { hessian, corank, ade, evidence, warnings })
}

fn report(point: &SingularPoint, c: Classified) -> SingularityReport {
    SingularityReport {
        point: point.clone(),
        hessian: c.hessian,
        hessian_corank: c.corank,
        ade_type: c.ade,
        evidence: c.evidence,
        warnings: c.warnings,
    }
}

/// Classify a singular point; exact arithmetic when the point is rational.
pub fn classify(sp: &SurfaceParams, point: &SingularPoint, prec: usize) -> Result<SingularityReport> {
    match point {
        SingularPoint::Exact(q) => {
            let coef = [sp.a.clone(), sp.b.clone(), sp.c.clone(), sp.d.clone(), sp.e.clone()];
            Ok(report(point, classify_generic(&coef, q)?))
        }
        SingularPoint::Numeric(_) => classify_numeric(&sp.to_numeric(prec), point, prec),
    }
}

/// Classify with approximate arithmetic; zero tests at half the working precision.
pub fn classify_numeric(np: &NumParams, point: &SingularPoint, prec: usize) -> Result<SingularityReport> {
    let p = point.numeric(prec);
    let scale = np.residual_scale(&p).log2();
    let w = |c: &BigComplex| Approx::new(c.clone().with_prec(prec), zero_tol(prec) + scale);
    let coef = [&np.a, &np.b, &np.c, &np.d, &np.e].map(w);
    let pp = [0, 1, 2].map(|i| w(&p[i]));
    Ok(report(point, classify_generic(&coef, &pp)?))
}

/// `Smooth` for regular surface points, otherwise the ADE type.
pub fn local_type(sp: &SurfaceParams, point: &SingularPoint, prec: usize) -> Result<SingularityReport> {
    match classify(sp, point, prec) {
        Err(Error::NotSingular(msg)) => {
            let np = sp.to_numeric(prec);
            let p = point.numeric(prec);
            if !p_small(&np, &p) {
                return Err(Error::NotSingular(format!("point is not on the surface: {msg}")));
            }
            Ok(SingularityReport {
                point: point.clone(),
                hessian: std::array::from_fn(|_| std::array::from_fn(|_| String::new())),
                hessian_corank: 0,
                ade_type: AdeType::Smooth,
                evidence: vec![format!("regular point: {msg}")],
                warnings: vec![],
            })
        }
        r => r,
    }
}

/// Find and classify every singular point; points are reported in the original coordinates.
pub fn classify_surface(sp: &SurfaceParams, search_box: f64, prec: usize) -> Result<(Vec<SingularityReport>, bool)> {
    let (sp1, e) = rescale_to_e1(sp);
    let search = find_singular_points(&sp1, search_box * rat::to_f64(&e).abs().max(1.0), prec)?;
    let inv = e.recip();
    let mut out = Vec::new();
    for p in &search.points {
        let mut r = classify(&sp1, p, prec)?;
        r.point = p.scaled(&inv);
        out.push(r);
    }
    Ok((out, search.resultant_degenerate))
}

/// One sign pattern `(A,B,C) = (sA m, sB m, sC m)` with `E = 1`.
#[derive(Clone, Debug)]
pub struct SignPatternResult {
    pub signs: [i8; 3],
    /// Corank-2 critical points and the `D` placing each on the surface.
    pub corank2: Vec<([BigRational; 3], BigRational)>,
    /// `classify` outcome on the surface with that `D`.
    pub types: Vec<AdeType>,
}

/// Which sign patterns admit a corank-2 singular point.
pub fn d4_sign_analysis(magnitude: i64, prec: usize) -> Result<Vec<SignPatternResult>> {
    let mut out = Vec::new();
    for mask in 0..8u8 {
        let signs: [i8; 3] = std::array::from_fn(|i| if mask >> i & 1 == 1 { -1 } else { 1 });
        let m = |i: usize| rat::int(magnitude * signs[i] as i64);
        let sp0 = SurfaceParams::new(m(0), m(1), m(2), BigRational::zero(), BigRational::one())?;
        let crit = find_critical_points(&sp0, 4.0 * magnitude as f64, prec)?;
        let mut corank2 = Vec::new();
        let mut types = Vec::new();
        for p in crit.points {
            let Some(q) = p.exact() else { continue };
            let [x, y, z] = q;
            let h = vec![
                vec![rat::int(2), z.clone(), y.clone()],
                vec![z.clone(), rat::int(2), x.clone()],
                vec![y.clone(), x.clone(), rat::int(2)],
            ];
            if kernel(&h).0 != 1 {
                continue;
            }
            let d = sp0.defining_poly().eval_rational(q);
            let sp = SurfaceParams { d: d.clone(), ..sp0.clone() };
            types.push(classify(&sp, &p, prec)?.ade_type);
            corank2.push((q.clone(), d));
        }
        out.push(SignPatternResult { signs, corank2, types });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(i: i64) -> BigRational {
        rat::int(i)
    }

    #[test]
    fn rescale_markov() {
        let (sp, e) = rescale_to_e1(&SurfaceParams::markov());
        assert_eq!(e, q(-3));
        assert_eq!(sp, SurfaceParams::from_ints(0, 0, 0, 0, 1).unwrap());
        let (same, _) = rescale_to_e1(&SurfaceParams::from_ints(8, 0, 0, 0, 1).unwrap());
        assert_eq!(same.a, q(8));
    }

    #[test]
    fn markov_singular_point() {
        let (sp, _) = rescale_to_e1(&SurfaceParams::markov());
        let s = find_singular_points(&sp, 10.0, 128).unwrap();
        assert_eq!(s.points.len(), 1);
        assert_eq!(s.points[0].exact().unwrap(), &[q(0), q(0), q(0)]);
        let r = classify(&sp, &s.points[0], 128).unwrap();
        assert_eq!(r.ade_type, AdeType::A(1));
        assert_eq!(r.hessian_corank, 0);
        assert_eq!(r.hessian[0], ["2", "0", "0"]);
    }

    #[test]
    fn a3_example() {
        let sp = SurfaceParams::from_ints(4, 0, 0, -4, 1).unwrap();
        let s = find_singular_points(&sp, 10.0, 128).unwrap();
        let p = s.points.iter().find(|p| p.exact() == Some(&[q(2), q(0), q(0)])).unwrap();
        let r = classify(&sp, p, 128).unwrap();
        assert_eq!(r.ade_type, AdeType::A(3));
        assert_eq!(r.hessian_corank, 1);
    }

    #[test]
    fn d4_example() {
        let sp = SurfaceParams::from_ints(8, 8, 8, -28, 1).unwrap();
        let s = find_singular_points(&sp, 10.0, 128).unwrap();
        let p = s.points.iter().find(|p| p.exact() == Some(&[q(2), q(2), q(2)])).unwrap();
        let r = classify(&sp, p, 128).unwrap();
        assert_eq!(r.ade_type, AdeType::D4);
        assert_eq!(r.hessian_corank, 2);
    }

    #[test]
    fn numeric_classification_agrees() {
        let sp = SurfaceParams::from_ints(4, 0, 0, -4, 1).unwrap();
        let p = SingularPoint::Numeric([2, 0, 0].map(|v| BigComplex::from_i64(v, 192)));
        let r = classify_numeric(&sp.to_numeric(192), &p, 192).unwrap();
        assert_eq!(r.ade_type, AdeType::A(3));
    }

    #[test]
    fn not_singular() {
        let sp = SurfaceParams::markov();
        let p = SingularPoint::Exact([q(1), q(1), q(1)]);
        assert_eq!(classify(&sp, &p, 64).unwrap_err().code(), "NotSingular");
        assert_eq!(local_type(&sp, &p, 64).unwrap().ade_type, AdeType::Smooth);
    }

    #[test]
    fn sign_patterns() {
        let res = d4_sign_analysis(8, 128).unwrap();
        for r in &res {
            let neg = r.signs.iter().filter(|&&s| s < 0).count();
            assert_eq!(!r.corank2.is_empty(), neg % 2 == 0, "{:?}", r.signs);
            for (_, d) in &r.corank2 {
                assert_eq!(d, &q(-28));
            }
            assert!(r.types.iter().all(|t| *t == AdeType::D4));
        }
    }
}
