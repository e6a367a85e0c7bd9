//! Automorphisms of the Markov surface realizing a prescribed injection of ordered triples.
//!
//! `F = G^{-1} o phi^x_{h(x)} o phi^y_{g(y)} o G` with `G = phi^z_{f(z)}`; the time
//! functions are Lagrange interpolants through the finitely many nodes involved.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::flows::{check_symplectic, complex_to_json, flow_axis_raw, Automorphism, Axis, ShearFlow, TimePoly};
use crate::interp::Barycentric;
use crate::markov::{enumerate_ordered, MarkovTriple};
use crate::num::{BigComplex, BigReal};
use crate::surface::{quadratic_roots, NumParams, Pt};

/// Default cap for automatic precision escalation.
pub const MAX_PRECISION: usize = 4096;

/// Coordinates moved by the flow of `V^axis`, in the order used by the flow formulas.
pub fn moving_coords(axis: Axis) -> [usize; 2] {
    match axis {
        Axis::Z => [0, 1],
        Axis::X => [1, 2],
        Axis::Y => [2, 0],
    }
}

/// Flow data in the frame where `axis` plays the role of `z`.
struct Frame {
    /// `(u, v)` moving coordinates and the fixed one.
    u: BigComplex,
    v: BigComplex,
    gamma: BigComplex,
    /// `N_u / gamma`, `N_v / gamma`.
    big_x: BigComplex,
    big_y: BigComplex,
    /// Centres of the affine part: `u(t) = Ku + (u - Ku) cos + Y sin`.
    ku: BigComplex,
    kv: BigComplex,
}

fn frame(np: &NumParams, axis: Axis, pt: &Pt) -> Result<Frame> {
    let prec = np.prec();
    let [iu, iv] = moving_coords(axis);
    let ic = axis.index();
    // parameters permuted as in the flows module
    let (a, b) = match axis {
        Axis::Z => (&np.a, &np.b),
        Axis::X => (&np.b, &np.c),
        Axis::Y => (&np.c, &np.a),
    };
    let ez = &np.e * &pt[ic];
    let w = &BigComplex::from_i64(4, prec) - &(&ez * &ez);
    if pt[ic].is_zero() || w.is_zero() || w.log2_abs() < -(prec as f64) / 2.0 {
        return Err(Error::ExcludedZ(format!("{} = {}", axis, pt[ic].to_sci(20))));
    }
    let gamma = w.sqrt();
    let n = np.grad(pt);
    let ka = &a.mul_i64(2) - &(b * &ez);
    let kb = &b.mul_i64(2) - &(a * &ez);
    Ok(Frame {
        u: pt[iu].clone(),
        v: pt[iv].clone(),
        big_x: &n[iu] / &gamma,
        big_y: &n[iv] / &gamma,
        ku: &ka / &w,
        kv: &kb / &w,
        gamma,
    })
}

/// Values entering the three non-vanishing conditions along one axis.
#[derive(Clone, Debug)]
pub struct SignReport {
    pub axis: Axis,
    pub gamma: BigComplex,
    pub big_x: BigComplex,
    pub big_y: BigComplex,
    /// `min |X +- i v|`.
    pub cond1: f64,
    /// `min |u +- i Y|`.
    pub cond2: f64,
    /// `|(iu - Y)/(iu + Y) - (X + iv)/(iv - X)|`.
    pub cond3: f64,
    pub holds: bool,
}

impl SignReport {
    pub fn to_json(&self) -> Value {
        json!({
            "axis": self.axis.name(),
            "gamma": complex_to_json(&self.gamma),
            "X": complex_to_json(&self.big_x),
            "Y": complex_to_json(&self.big_y),
            "cond1": format!("{:e}", self.cond1),
            "cond2": format!("{:e}", self.cond2),
            "cond3": format!("{:e}", self.cond3),
            "holds": self.holds,
        })
    }
}

/// Checks `X +- iv != 0`, `u +- iY != 0` and the cross-ratio inequality along `axis`.
pub fn sign_conditions_axis(np: &NumParams, axis: Axis, pt: &Pt) -> Result<SignReport> {
    let f = frame(np, axis, pt)?;
    let prec = np.prec();
    let i = BigComplex::i(prec);
    let iv = &i * &f.v;
    let iu = &i * &f.u;
    let scale = [&f.u, &f.v, &f.big_x, &f.big_y].iter().map(|c| c.abs_f64()).fold(1.0, f64::max);
    let cond1 = (&f.big_x + &iv).abs_f64().min((&f.big_x - &iv).abs_f64()) / scale;
    let iy = &i * &f.big_y;
    let cond2 = (&f.u + &iy).abs_f64().min((&f.u - &iy).abs_f64()) / scale;
    let l = &(&iu - &f.big_y) / &(&iu + &f.big_y);
    let r = &(&f.big_x + &iv) / &(&iv - &f.big_x);
    let cond3 = (&l - &r).abs_f64() / l.abs_f64().max(r.abs_f64()).max(1.0);
    let tol = 2f64.powf(-(prec as f64) / 2.0);
    let holds = cond1 > tol && cond2 > tol && cond3 > tol && cond3.is_finite();
    Ok(SignReport { axis, gamma: f.gamma, big_x: f.big_x, big_y: f.big_y, cond1, cond2, cond3, holds })
}

/// The conditions for the `z` axis.
pub fn sign_conditions(np: &NumParams, pt: &Pt) -> Result<SignReport> {
    sign_conditions_axis(np, Axis::Z, pt)
}

/// Times `t` (principal logarithm branch) with `coord(phi^axis_t(pt)) = target`.
///
/// With `T = exp(i gamma t)` the condition is a quadratic in `T`; roots `T = 0` are discarded.
pub fn solve_flow_time(np: &NumParams, axis: Axis, pt: &Pt, coord: usize, target: &BigComplex) -> Result<Vec<BigComplex>> {
    let prec = np.prec();
    let f = frame(np, axis, pt)?;
    let i = BigComplex::i(prec);
    let [iu, iv] = moving_coords(axis);
    let (a, b, c) = if coord == iu {
        let s = &i * &(&f.u - &f.ku);
        (&s + &f.big_y, (&i * &(&f.ku - target)).mul_i64(2), &s - &f.big_y)
    } else if coord == iv {
        let s = &i * &(&f.v - &f.kv);
        (&s - &f.big_x, (&i * &(&f.kv - target)).mul_i64(2), &s + &f.big_x)
    } else {
        return Err(Error::InvalidParams(format!("coordinate {coord} is fixed by the {axis} flow")));
    };
    let tiny = |z: &BigComplex, s: f64| z.is_zero() || z.log2_abs() < -(prec as f64) * 0.75 + s.max(1.0).log2();
    let scale = [&a, &b, &c].iter().map(|z| z.abs_f64()).fold(0.0, f64::max);
    let roots: Vec<BigComplex> = if tiny(&a, scale) {
        if tiny(&b, scale) {
            return Err(Error::NoSolution);
        }
        vec![-&(&c / &b)]
    } else {
        quadratic_roots(&a, &b, &c).to_vec()
    };
    let igamma = &i * &f.gamma;
    let times: Vec<BigComplex> = roots.into_iter().filter(|t| !tiny(t, 1.0)).map(|t| &t.ln() / &igamma).collect();
    if times.is_empty() {
        return Err(Error::NoSolution);
    }
    Ok(times)
}

/// Inputs of the construction.
#[derive(Clone, Debug)]
pub struct TameProblem {
    pub sources: Vec<MarkovTriple>,
    /// Available target triples; `eta[j]` indexes into this list.
    pub targets: Vec<MarkovTriple>,
    pub eta: Vec<usize>,
    pub precision: usize,
    pub seed: u64,
    pub retry_budget: usize,
    /// Relative separation margin for Step 1 images.
    pub margin: f64,
    /// Escalate precision on failure up to this cap.
    pub max_precision: usize,
    /// Acceptance threshold for the relative residual.
    pub tolerance: f64,
}

impl TameProblem {
    /// Sources are the first `n` ordered triples, targets the first `max(n, max image)`;
    /// `map` holds 1-based pairs `source -> target`, unlisted sources are fixed.
    pub fn first_n(n: usize, map: &[(usize, usize)], precision: usize, seed: u64) -> Result<Self> {
        let m = map.iter().map(|p| p.1).max().unwrap_or(0).max(n);
        let list = first_triples(m);
        let mut eta: Vec<usize> = (0..n).collect();
        for &(s, t) in map {
            if s == 0 || s > n || t == 0 {
                return Err(Error::InvalidParams(format!("map entry {s}:{t} out of range")));
            }
            eta[s - 1] = t - 1;
        }
        let mut seen = std::collections::BTreeSet::new();
        if !eta.iter().all(|e| seen.insert(*e)) {
            return Err(Error::InvalidParams("map is not injective".into()));
        }
        Ok(Self {
            sources: list[..n].to_vec(),
            targets: list,
            eta,
            precision: precision.max(64 * n),
            seed,
            retry_budget: 64,
            margin: 1e-3,
            max_precision: MAX_PRECISION,
            tolerance: 1e-15,
        })
    }

    /// Parses `"1:2,2:3"` into pairs.
    pub fn parse_map(s: &str) -> Result<Vec<(usize, usize)>> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Vec::new());
        }
        s.split(',')
            .map(|p| {
                let (a, b) = p.split_once(':').ok_or_else(|| Error::Parse(format!("bad map entry {p:?}")))?;
                let a = a.trim().parse().map_err(|_| Error::Parse(format!("bad map entry {p:?}")))?;
                let b = b.trim().parse().map_err(|_| Error::Parse(format!("bad map entry {p:?}")))?;
                Ok((a, b))
            })
            .collect()
    }
}

/// The first `m` ordered Markov triples in `(z, y, x)` order.
pub fn first_triples(m: usize) -> Vec<MarkovTriple> {
    let mut bound = BigInt::from(100);
    loop {
        let v = enumerate_ordered(&bound);
        if v.len() >= m {
            return v.into_iter().take(m).collect();
        }
        bound *= 100;
    }
}

#[derive(Clone, Debug)]
pub struct TameSolution {
    pub precision: usize,
    pub seed: u64,
    pub f: Barycentric,
    pub g: Barycentric,
    pub h: Barycentric,
    pub automorphism: Automorphism,
    pub sources: Vec<MarkovTriple>,
    pub images: Vec<MarkovTriple>,
    /// Relative residual of `F(p_j)` against `p_{eta(j)}`.
    pub residuals: Vec<f64>,
    /// `|G^{-1}(G(p_j)) - p_j|`, relative.
    pub roundtrip: Vec<f64>,
    pub step1_retries: usize,
}

impl TameSolution {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        let interp = |b: &Barycentric| {
            json!({
                "nodes": b.nodes.iter().map(complex_to_json).collect::<Vec<_>>(),
                "values": b.values.iter().map(complex_to_json).collect::<Vec<_>>(),
                "coeffs": b.monomial_coeffs().iter().map(complex_to_json).collect::<Vec<_>>(),
            })
        };
        json!({
            "precision": self.precision,
            "seed": self.seed,
            "f": interp(&self.f),
            "g": interp(&self.g),
            "h": interp(&self.h),
            "automorphism": self.automorphism.to_json(),
            "sources": self.sources.iter().map(|t| t.to_json()).collect::<Vec<_>>(),
            "images": self.images.iter().map(|t| t.to_json()).collect::<Vec<_>>(),
            "residuals": self.residuals.iter().map(|r| format!("{r:e}")).collect::<Vec<_>>(),
            "roundtrip": self.roundtrip.iter().map(|r| format!("{r:e}")).collect::<Vec<_>>(),
            "max_residual": format!("{:e}", self.max_residual()),
            "step1_retries": self.step1_retries,
        })
    }
}

fn triple_pt(t: &MarkovTriple, prec: usize) -> Pt {
    t.coords().map(|c| BigComplex::from_real(BigReal::from_bigint(&c, prec)))
}

fn rel_err(a: &Pt, b: &Pt) -> f64 {
    (0..3).map(|k| (&a[k] - &b[k]).abs_f64() / b[k].abs_f64().max(1.0)).fold(0.0, f64::max)
}

fn separated(a: &BigComplex, b: &BigComplex, eps: f64) -> bool {
    (a - b).abs_f64() > eps * a.abs_f64().max(b.abs_f64()).max(1.0)
}

/// Points excluded as fixed coordinates for the Markov surface: `0` and `+-2/3`.
fn excluded(prec: usize) -> [BigComplex; 3] {
    let two_thirds = BigComplex::from_real(BigReal::from_i64(2, prec).div(&BigReal::from_i64(3, prec)));
    [BigComplex::zero(prec), two_thirds.clone(), -&two_thirds]
}

struct Step1 {
    /// `z`-value to time `r`.
    nodes: Vec<(BigComplex, BigComplex)>,
    retries: usize,
}

/// Step 1: per distinct `z`, a time pushing the images away from earlier ones.
fn step1(np: &NumParams, triples: &[MarkovTriple], pb: &TameProblem, rng: &mut ChaCha8Rng) -> Result<Step1> {
    let prec = np.prec();
    let mut groups: BTreeMap<BigInt, Vec<&MarkovTriple>> = BTreeMap::new();
    for t in triples {
        groups.entry(t.z.clone()).or_default().push(t);
    }
    let excl = excluded(prec);
    let mut placed: Vec<(BigComplex, BigComplex)> = Vec::new();
    let mut nodes = Vec::new();
    let mut retries = 0;
    let mut mag = 1.0f64;
    for (z, group) in groups {
        let zc = BigComplex::from_real(BigReal::from_bigint(&z, prec));
        let pts: Vec<Pt> = group.iter().map(|t| triple_pt(t, prec)).collect();
        let gamma = frame(np, Axis::Z, &pts[0])?.gamma;
        let sigma0 = (1.0 + mag).ln() + 1.0;
        let mut ok = None;
        for attempt in 0..pb.retry_budget {
            let sigma = sigma0 + attempt as f64 * 0.5;
            let tau = rng.gen_range(0.0..std::f64::consts::TAU);
            // gamma t = tau - i sigma
            let r = &BigComplex::from_f64_pair(tau, -sigma, prec) / &gamma;
            let imgs: Vec<(BigComplex, BigComplex)> = pts
                .iter()
                .map(|p| {
                    let q = flow_axis_raw(np, Axis::Z, p, &r).0;
                    (q[0].clone(), q[1].clone())
                })
                .collect();
            let mut good = true;
            for (k, (x, y)) in imgs.iter().enumerate() {
                good &= excl.iter().all(|e| separated(x, e, pb.margin) && separated(y, e, pb.margin));
                good &= placed.iter().chain(imgs[..k].iter()).all(|(px, py)| separated(x, px, pb.margin) && separated(y, py, pb.margin));
            }
            if good {
                ok = Some((r, imgs));
                break;
            }
            retries += 1;
        }
        let Some((r, imgs)) = ok else {
            return Err(Error::RetryExhausted(pb.retry_budget));
        };
        for (x, y) in &imgs {
            mag = mag.max(x.abs_f64()).max(y.abs_f64());
        }
        placed.extend(imgs);
        nodes.push((zc, r));
    }
    Ok(Step1 { nodes, retries })
}

fn build_at(pb: &TameProblem, prec: usize) -> Result<TameSolution> {
    let np = NumParams::markov(prec);
    let n = pb.sources.len();
    if pb.eta.len() != n || pb.eta.iter().any(|&e| e >= pb.targets.len()) {
        return Err(Error::InvalidParams("eta must map every source into the target list".into()));
    }
    for t in pb.sources.iter().chain(pb.targets.iter()) {
        if !t.is_solution() {
            return Err(Error::InvalidParams(format!("{t} is not a Markov triple")));
        }
    }
    // every triple the construction touches: sources and used targets
    let mut all: Vec<MarkovTriple> = pb.sources.clone();
    for &e in &pb.eta {
        if !all.contains(&pb.targets[e]) {
            all.push(pb.targets[e].clone());
        }
    }
    let idx = |t: &MarkovTriple| all.iter().position(|a| a == t).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(pb.seed);
    let s1 = step1(&np, &all, pb, &mut rng)?;
    let f = Barycentric::new(s1.nodes.iter().map(|n| n.0.clone()).collect(), s1.nodes.iter().map(|n| n.1.clone()).collect());
    let g_shear = ShearFlow { axis: Axis::Z, time: TimePoly::Interp(f.clone()) };
    let orig: Vec<Pt> = all.iter().map(|t| triple_pt(t, prec)).collect();
    let primed: Vec<Pt> = orig.iter().map(|p| g_shear.apply_raw(&np, p)).collect();
    for (k, p) in primed.iter().enumerate() {
        for axis in [Axis::Z, Axis::Y, Axis::X] {
            let q = if axis == Axis::Z { &orig[k] } else { p };
            let rep = sign_conditions_axis(&np, axis, q)?;
            if !rep.holds {
                return Err(Error::RootSelectionFailure(format!("sign conditions fail along {axis} at {}", all[k])));
            }
        }
    }
    // Step 2: phi^y_{t_j} moves x of p'_j onto x of p'_{eta(j)}
    let mut g_nodes = Vec::new();
    let mut g_vals = Vec::new();
    let mut mid = Vec::new();
    for j in 0..n {
        let pj = &primed[idx(&pb.sources[j])];
        let target = &primed[idx(&pb.targets[pb.eta[j]])];
        let mut ts = solve_flow_time(&np, Axis::Y, pj, 0, &target[0])?;
        ts.sort_by(|a, b| a.abs_f64().total_cmp(&b.abs_f64()));
        let t = ts.swap_remove(0);
        mid.push(flow_axis_raw(&np, Axis::Y, pj, &t).0);
        g_nodes.push(pj[1].clone());
        g_vals.push(t);
    }
    let g = Barycentric::new(g_nodes, g_vals);
    // Step 3: phi^x_{s_j} matches both y and z of p'_{eta(j)}
    let mut h_nodes = Vec::new();
    let mut h_vals = Vec::new();
    for j in 0..n {
        let q = &mid[j];
        let target = &primed[idx(&pb.targets[pb.eta[j]])];
        let ts = solve_flow_time(&np, Axis::X, q, 1, &target[1])?;
        let mut best: Option<(f64, BigComplex)> = None;
        for t in ts {
            let img = flow_axis_raw(&np, Axis::X, q, &t).0;
            let e = rel_err(&img, target);
            if best.as_ref().map_or(true, |b| e < b.0) {
                best = Some((e, t));
            }
        }
        let (e, s) = best.ok_or(Error::NoSolution)?;
        if e > 1e-6 {
            return Err(Error::RootSelectionFailure(format!("no root matches y and z for source {} (error {e:e})", j + 1)));
        }
        h_nodes.push(q[0].clone());
        h_vals.push(s);
    }
    let h = Barycentric::new(h_nodes, h_vals);
    let gf = ShearFlow { axis: Axis::Z, time: TimePoly::Interp(f.clone()) };
    let automorphism = Automorphism::new(vec![
        gf.inverse(),
        ShearFlow { axis: Axis::X, time: TimePoly::Interp(h.clone()) },
        ShearFlow { axis: Axis::Y, time: TimePoly::Interp(g.clone()) },
        gf.clone(),
    ]);
    let g_only = Automorphism::new(vec![gf.inverse(), gf]);
    let mut residuals = Vec::new();
    let mut roundtrip = Vec::new();
    let mut table = Vec::new();
    for j in 0..n {
        let p = triple_pt(&pb.sources[j], prec);
        let want = triple_pt(&pb.targets[pb.eta[j]], prec);
        let got = automorphism.apply(&np, &p).map(|s| s.coords());
        let r = match &got {
            Ok(g) => rel_err(g, &want),
            Err(_) => f64::INFINITY,
        };
        residuals.push(r);
        roundtrip.push(rel_err(&g_only.apply_raw(&np, &p), &p));
        table.push(format!("{} -> {}: {r:e}", pb.sources[j], pb.targets[pb.eta[j]]));
    }
    let max = residuals.iter().cloned().fold(0.0, f64::max);
    if !(max < pb.tolerance) {
        return Err(Error::VerificationFailure { max_residual: format!("{max:e}"), table });
    }
    Ok(TameSolution {
        precision: prec,
        seed: pb.seed,
        f,
        g,
        h,
        automorphism,
        sources: pb.sources.clone(),
        images: pb.eta.iter().map(|&e| pb.targets[e].clone()).collect(),
        residuals,
        roundtrip,
        step1_retries: s1.retries,
    })
}

/// Builds `F` and verifies `F(p_j) = p_{eta(j)}`; doubles the precision on
/// verification or root-selection failure up to `max_precision`.
pub fn build_tame_automorphism(pb: &TameProblem) -> Result<TameSolution> {
    let mut prec = pb.precision;
    loop {
        match build_at(pb, prec) {
            Err(e @ (Error::VerificationFailure { .. } | Error::RootSelectionFailure(_))) => {
                if prec * 2 > pb.max_precision {
                    return Err(e);
                }
                prec *= 2;
            }
            r => return r,
        }
    }
}

/// Replays a solution: applies `F` to every source and compares with its image.
pub fn verify_solution(sol: &TameSolution) -> Vec<f64> {
    let np = NumParams::markov(sol.precision);
    sol.sources
        .iter()
        .zip(&sol.images)
        .map(|(s, t)| {
            let p = triple_pt(s, sol.precision);
            match sol.automorphism.apply(&np, &p) {
                Ok(img) => rel_err(&img.coords(), &triple_pt(t, sol.precision)),
                Err(_) => f64::INFINITY,
            }
        })
        .collect()
}

/// Replays a solution read back from its JSON form.
pub fn verify_solution_json(v: &Value) -> Result<Vec<f64>> {
    let prec = v.get("precision").and_then(|p| p.as_u64()).ok_or_else(|| Error::Parse("missing precision".into()))? as usize;
    let auto = Automorphism::from_json(v.get("automorphism").ok_or_else(|| Error::Parse("missing automorphism".into()))?, prec)?;
    let triples = |key: &str| -> Result<Vec<MarkovTriple>> {
        let arr = v.get(key).and_then(|a| a.as_array()).ok_or_else(|| Error::Parse(format!("missing {key}")))?;
        arr.iter()
            .map(|t| {
                let c = t.as_array().filter(|c| c.len() == 3).ok_or_else(|| Error::Parse(format!("bad triple {t}")))?;
                let n = |i: usize| -> Result<BigInt> {
                    c[i].as_str().and_then(|s| s.parse().ok()).ok_or_else(|| Error::Parse(format!("bad triple {t}")))
                };
                MarkovTriple::new(n(0)?, n(1)?, n(2)?)
            })
            .collect()
    };
    let sources = triples("sources")?;
    let images = triples("images")?;
    if sources.len() != images.len() {
        return Err(Error::Parse("sources and images differ in length".into()));
    }
    let np = NumParams::markov(prec);
    Ok(sources
        .iter()
        .zip(&images)
        .map(|(s, t)| match auto.apply(&np, &triple_pt(s, prec)) {
            Ok(img) => rel_err(&img.coords(), &triple_pt(t, prec)),
            Err(_) => f64::INFINITY,
        })
        .collect())
}

/// Maximum relative symplectic defect of `F` at seeded random smooth points.
pub fn verify_symplectic_at_points(sol: &TameSolution, samples: usize, h: f64, seed: u64) -> Result<f64> {
    let np = NumParams::markov(sol.precision);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < samples {
        let prec = sol.precision;
        let x = BigComplex::from_f64_pair(rng.gen_range(0.2..0.6), rng.gen_range(-0.3..0.3), prec);
        let y = BigComplex::from_f64_pair(rng.gen_range(0.2..0.6), rng.gen_range(-0.3..0.3), prec);
        let z = np.lift_z(&x, &y)[1].clone();
        match check_symplectic(&np, &sol.automorphism, &[x, y, z], h) {
            Ok(d) => {
                worst = worst.max(d);
                done += 1;
            }
            Err(Error::DegenerateFrame) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: [i64; 3], prec: usize) -> Pt {
        v.map(|c| BigComplex::from_i64(c, prec))
    }

    #[test]
    fn sign_conditions_small_triples() {
        let np = NumParams::markov(128);
        let r = sign_conditions(&np, &pt([1, 1, 1], 128)).unwrap();
        assert!(r.holds);
        assert!((&(&r.gamma * &r.gamma) + &BigComplex::from_i64(5, 128)).abs_f64() < 1e-30);
        assert!(sign_conditions(&np, &pt([1, 2, 5], 128)).unwrap().holds);
        assert_eq!(sign_conditions(&np, &pt([0, 0, 0], 128)).unwrap_err().code(), "ExcludedZ");
    }

    #[test]
    fn zero_time_is_a_solution() {
        let np = NumParams::markov(128);
        let p = pt([1, 2, 5], 128);
        let ts = solve_flow_time(&np, Axis::Z, &p, 0, &p[0].clone()).unwrap();
        assert!(ts.iter().any(|t| t.abs_f64() < 1e-30));
    }

    #[test]
    fn forward_then_invert() {
        let np = NumParams::markov(192);
        let p = pt([1, 1, 1], 192);
        let t0 = BigComplex::from_f64(0.3, 192);
        let q = flow_axis_raw(&np, Axis::Z, &p, &t0).0;
        let ts = solve_flow_time(&np, Axis::Z, &p, 0, &q[0]).unwrap();
        let period = frame(&np, Axis::Z, &p).unwrap().gamma;
        // t0 up to multiples of 2 pi / gamma
        let hit = ts.iter().any(|t| {
            let k = &(&(t - &t0) * &period) / &BigComplex::from_real(BigReal::pi(192).mul_i64(2));
            let (re, im) = k.to_f64_pair();
            (re - re.round()).abs() < 1e-25 && im.abs() < 1e-25
        });
        assert!(hit);
        // both roots land on the two v-candidates of the conic
        let vs: Vec<BigComplex> = ts.iter().map(|t| flow_axis_raw(&np, Axis::Z, &p, t).0[1].clone()).collect();
        assert_eq!(vs.len(), 2);
        assert!((&vs[0] - &vs[1]).abs_f64() > 1e-3);
    }

    #[test]
    fn other_axes_hit_target() {
        let np = NumParams::markov(192);
        let p = pt([2, 5, 29], 192);
        for (axis, coord) in [(Axis::X, 1), (Axis::X, 2), (Axis::Y, 0), (Axis::Y, 2)] {
            let target = BigComplex::from_f64_pair(0.7, -1.3, 192);
            for t in solve_flow_time(&np, axis, &p, coord, &target).unwrap() {
                let q = flow_axis_raw(&np, axis, &p, &t).0;
                assert!((&q[coord] - &target).abs_f64() < 1e-40, "{axis} {coord}");
            }
        }
    }

    #[test]
    fn identity_single_point() {
        let pb = TameProblem::first_n(1, &[], 256, 7).unwrap();
        let sol = build_tame_automorphism(&pb).unwrap();
        assert!(sol.max_residual() < 1e-40);
    }

    #[test]
    fn swap_three() {
        let pb = TameProblem::first_n(3, &[(2, 3), (3, 2)], 256, 1).unwrap();
        let sol = build_tame_automorphism(&pb).unwrap();
        assert!(sol.max_residual() < 1e-15);
        assert!(verify_solution(&sol).iter().all(|r| *r < 1e-15));
        let text = serde_json::to_string(&sol.to_json()).unwrap();
        let back: Value = serde_json::from_str(&text).unwrap();
        assert!(verify_solution_json(&back).unwrap().iter().all(|r| *r < 1e-15));
    }

    #[test]
    fn constructed_map_is_symplectic() {
        let pb = TameProblem::first_n(3, &[(2, 3), (3, 2)], 256, 1).unwrap();
        let sol = build_tame_automorphism(&pb).unwrap();
                // the interpolated shears have large derivatives, so the step must be tiny
        let d = verify_symplectic_at_points(&sol, 2, 1e-30, 9).unwrap();
        assert!(d < 1e-30, "{d:e}");
    }

    #[test]
    fn map_parsing() {
        assert_eq!(TameProblem::parse_map("1:2, 2:3").unwrap(), vec![(1, 2), (2, 3)]);
        assert!(TameProblem::first_n(2, &[(1, 2)], 64, 0).is_err());
    }
}
