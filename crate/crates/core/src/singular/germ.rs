//! Model germs `x^2+y^2+z^{k+1}` (A_k) and `x(y^2+x^{k-2})+z^2` (D_k) and their vector fields.
//!
//! On both models `d i_V omega = (div V - lambda) omega` whenever `V(f) = lambda f`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::num::{rat, BigComplex};
use crate::poisson::SymbolicField;
use crate::poly::{Mono, Poly};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GermKind {
    A(u32),
    D(u32),
}

impl GermKind {
    pub fn k(&self) -> u32 {
        match *self {
            GermKind::A(k) | GermKind::D(k) => k,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("germ kind must look like A3 or D4, got {s:?}"));
        let (head, tail) = s.split_at(1.min(s.len()));
        let k: u32 = tail.trim_matches(|c| c == '(' || c == ')').parse().map_err(|_| bad())?;
        match head {
            "A" | "a" => Ok(GermKind::A(k)),
            "D" | "d" => Ok(GermKind::D(k)),
            _ => Err(bad()),
        }
    }
}

impl std::fmt::Display for GermKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GermKind::A(k) => write!(f, "A{k}"),
            GermKind::D(k) => write!(f, "D{k}"),
        }
    }
}

/// Model surface with its named tangential fields.
#[derive(Clone, Debug)]
pub struct ModelGerm {
    pub kind: GermKind,
    pub poly: Poly,
    pub vx: SymbolicField,
    pub vy: SymbolicField,
    pub vz: SymbolicField,
    pub lambda: SymbolicField,
    /// Only for `D_k`.
    pub k_hat: Option<SymbolicField>,
}

fn p(s: &str) -> Poly {
    Poly::parse(s).expect("static polynomial")
}

/// Builds the model germ; tangency of every field is checked exactly.
pub fn model_fields(kind: GermKind) -> Result<ModelGerm> {
    let germ = match kind {
        GermKind::A(k) => {
            if k < 1 {
                return Err(Error::InvalidParams("A_k needs k >= 1".into()));
            }
            let k1 = (k + 1) as i64;
            let zk = Poly::mono(0, 0, k).scale_i(k1);
            ModelGerm {
                kind,
                poly: p("x^2 + y^2").add(&Poly::mono(0, 0, k + 1)),
                vx: SymbolicField::new(Poly::zero(), zk.clone(), p("-2*y")),
                vy: SymbolicField::new(zk.neg(), Poly::zero(), p("2*x")),
                vz: SymbolicField::new(p("2*y"), p("-2*x"), Poly::zero()),
                lambda: SymbolicField::new(Poly::x().scale_i(k1), Poly::y().scale_i(k1), p("2*z")),
                k_hat: None,
            }
        }
        GermKind::D(k) => {
            if k < 4 {
                return Err(Error::InvalidParams("D_k needs k >= 4".into()));
            }
            let xk2 = Poly::mono(k - 2, 0, 0);
            let ny = p("y^2").add(&xk2.scale_i(k as i64 - 1));
            ModelGerm {
                kind,
                poly: p("x*y^2 + z^2").add(&Poly::mono(k - 1, 0, 0)),
                vx: SymbolicField::new(Poly::zero(), p("2*z"), p("-2*x*y")),
                vy: SymbolicField::new(p("-2*z"), Poly::zero(), ny.clone()),
                vz: SymbolicField::new(p("2*x*y"), ny.neg(), Poly::zero()),
                lambda: SymbolicField::new(p("2*x"), Poly::y().scale_i(k as i64 - 2), Poly::z().scale_i(k as i64 - 1)),
                k_hat: Some(SymbolicField::new(Poly::zero(), p("y^2").add(&xk2), p("y*z"))),
            }
        }
    };
    for (name, f) in germ.named_fields() {
        if !germ.is_tangent(f) {
            return Err(Error::DecompositionFailure(format!("{name} is not tangential to {kind}")));
        }
    }
    Ok(germ)
}

impl ModelGerm {
    pub fn named_fields(&self) -> Vec<(&'static str, &SymbolicField)> {
        let mut v = vec![("Vx", &self.vx), ("Vy", &self.vy), ("Vz", &self.vz), ("Lambda", &self.lambda)];
        if let Some(k) = &self.k_hat {
            v.push(("K", k));
        }
        v
    }

    /// Rewrite rule `var^2 -> rest` for the model ideal: `x^2` for A_k, `z^2` for D_k.
    fn rule(&self) -> (usize, Poly) {
        let k = self.kind.k();
        match self.kind {
            GermKind::A(_) => (0, p("-y^2").sub(&Poly::mono(0, 0, k + 1))),
            GermKind::D(_) => (2, p("-x*y^2").sub(&Poly::mono(k - 1, 0, 0))),
        }
    }

    /// Normal form modulo the model polynomial (degree at most 1 in the rule variable).
    pub fn reduce(&self, f: &Poly) -> Poly {
        let (v, rest) = self.rule();
        let mut sq = [0u32; 3];
        sq[v] = 2;
        let sq = Mono(sq);
        let mut cur = f.clone();
        loop {
            let Some((m, c)) = cur.terms().rev().find(|(m, _)| m.0[v] >= 2).map(|(m, c)| (*m, c.clone())) else {
                return cur;
            };
            let q = m.div(&sq).unwrap();
            cur = cur.sub(&Poly::term(c.clone(), m)).add(&rest.mul_mono(&q).scale(&c));
        }
    }

    pub fn reduce_field(&self, w: &SymbolicField) -> SymbolicField {
        w.map(|c| self.reduce(c))
    }

    pub fn is_tangent(&self, w: &SymbolicField) -> bool {
        self.reduce(&w.apply(&self.poly)).is_zero()
    }

    /// `z` for A_k and `x` for D_k: the multiplier in the `Lambda` summands.
    pub fn lambda_var(&self) -> usize {
        match self.kind {
            GermKind::A(_) => 2,
            GermKind::D(_) => 0,
        }
    }

    /// Number of `Lambda` summands: `k` for A_k, `k-1` for D_k.
    pub fn lambda_count(&self) -> u32 {
        match self.kind {
            GermKind::A(k) => k,
            GermKind::D(k) => k - 1,
        }
    }

    /// `var^i Lambda`.
    pub fn lambda_term(&self, i: u32) -> SymbolicField {
        let mut e = [0; 3];
        e[self.lambda_var()] = i;
        self.lambda.mul_poly(&Poly::mono(e[0], e[1], e[2]))
    }

    /// Sum of `f_a V^a + sum lambda_i var^i Lambda + kappa K`, reduced.
    pub fn recompose(&self, d: &Decomposition) -> SymbolicField {
        let mut w = self.vx.mul_poly(&d.f[0]).add(&self.vy.mul_poly(&d.f[1])).add(&self.vz.mul_poly(&d.f[2]));
        for (i, l) in d.lambda.iter().enumerate() {
            if !l.is_zero() {
                w = w.add(&self.lambda_term(i as u32).map(|c| c.scale(l)));
            }
        }
        if let Some(k) = &self.k_hat {
            w = w.add(&k.map(|c| c.scale(&d.kappa)));
        }
        self.reduce_field(&w)
    }

    pub fn to_json(&self) -> Value {
        let f = |v: &SymbolicField| json!(v.c.iter().map(|c| c.to_string()).collect::<Vec<_>>());
        let mut fields = serde_json::Map::new();
        for (name, v) in self.named_fields() {
            fields.insert(name.into(), f(v));
        }
        json!({"kind": self.kind.to_string(), "poly": self.poly.to_string(), "fields": fields})
    }
}

/// `W = f_x V^x + f_y V^y + f_z V^z + sum lambda_i var^i Lambda (+ kappa K)` modulo the model ideal.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub f: [Poly; 3],
    pub lambda: Vec<BigRational>,
    pub kappa: BigRational,
}

impl Decomposition {
    pub fn to_json(&self) -> Value {
        json!({
            "fx": self.f[0].to_string(),
            "fy": self.f[1].to_string(),
            "fz": self.f[2].to_string(),
            "lambda": self.lambda.iter().map(rat::fmt).collect::<Vec<_>>(),
            "kappa": rat::fmt(&self.kappa),
        })
    }
}

type Key = (usize, Mono);
type SparseVec = BTreeMap<Key, BigRational>;

fn field_vec(w: &SymbolicField) -> SparseVec {
    let mut v = SparseVec::new();
    for (i, c) in w.c.iter().enumerate() {
        for (m, q) in c.terms() {
            v.insert((i, *m), q.clone());
        }
    }
    v
}

fn axpy(v: &mut SparseVec, a: &BigRational, x: &SparseVec) {
    for (k, q) in x {
        let e = v.entry(*k).or_insert_with(BigRational::zero);
        *e += a * q;
        if e.is_zero() {
            v.remove(k);
        }
    }
}

/// Echelon basis keyed by leading entry, with the combination of unknowns producing each row.
#[derive(Default)]
struct Echelon {
    rows: BTreeMap<Key, (SparseVec, BTreeMap<usize, BigRational>)>,
}

impl Echelon {
    fn reduce(&self, mut v: SparseVec, mut combo: BTreeMap<usize, BigRational>) -> (SparseVec, BTreeMap<usize, BigRational>) {
        while let Some((&top, c)) = v.last_key_value() {
            let Some((row, rc)) = self.rows.get(&top) else { break };
            let a = -(c / &row[&top]);
            axpy(&mut v, &a, row);
            for (j, q) in rc {
                let e = combo.entry(*j).or_insert_with(BigRational::zero);
                *e += &a * q;
                if e.is_zero() {
                    combo.remove(j);
                }
            }
        }
        (v, combo)
    }

    fn insert(&mut self, v: SparseVec, id: usize) {
        let (v, combo) = self.reduce(v, BTreeMap::from([(id, BigRational::one())]));
        if let Some((&top, _)) = v.last_key_value() {
            self.rows.insert(top, (v, combo));
        }
    }
}

/// Unknown attached to a column of the linear system.
#[derive(Clone, Debug)]
enum Unknown {
    F(usize, Mono),
    Lambda(u32),
    Kappa,
}

fn normal_monos(germ: &ModelGerm, d: u32) -> Vec<Mono> {
    let v = germ.rule().0;
    let mut out = Vec::new();
    for i in 0..=d {
        for j in 0..=(d - i) {
            let m = Mono([i, j, d - i - j]);
            if m.0[v] <= 1 {
                out.push(m);
            }
        }
    }
    out
}

/// Exact decomposition by an incremental sparse linear solve over the rationals.
pub fn decompose_tangent_field(germ: &ModelGerm, w: &SymbolicField) -> Result<Decomposition> {
    if !germ.is_tangent(w) {
        return Err(Error::NotTangential(format!("N(W) = {} mod ideal", germ.reduce(&w.apply(&germ.poly)))));
    }
    let target = germ.reduce_field(w);
    let k = germ.kind.k();
    let mut unknowns = Vec::new();
    let mut ech = Echelon::default();
    let add = |u: Unknown, f: SymbolicField, unknowns: &mut Vec<Unknown>, ech: &mut Echelon| {
        unknowns.push(u);
        ech.insert(field_vec(&germ.reduce_field(&f)), unknowns.len() - 1);
    };
    for i in 0..germ.lambda_count() {
        add(Unknown::Lambda(i), germ.lambda_term(i), &mut unknowns, &mut ech);
    }
    if let Some(kh) = &germ.k_hat {
        add(Unknown::Kappa, kh.clone(), &mut unknowns, &mut ech);
    }
    let wdeg = target.c.iter().filter_map(|c| c.degree()).max().unwrap_or(0);
    let fields = [&germ.vx, &germ.vy, &germ.vz];
    for d in 0..=(wdeg + k + 2) {
        for m in normal_monos(germ, d) {
            for (a, v) in fields.iter().enumerate() {
                add(Unknown::F(a, m), v.mul_poly(&Poly::mono(m.0[0], m.0[1], m.0[2])), &mut unknowns, &mut ech);
            }
        }
        let (rest, combo) = ech.reduce(field_vec(&target), BTreeMap::new());
        if !rest.is_empty() {
            continue;
        }
        let mut dec = Decomposition {
            f: [Poly::zero(), Poly::zero(), Poly::zero()],
            lambda: vec![BigRational::zero(); germ.lambda_count() as usize],
            kappa: BigRational::zero(),
        };
        // reduce(target) + sum combo_j col_j = 0
        for (j, q) in combo {
            let q = -q;
            match &unknowns[j] {
                Unknown::F(a, m) => dec.f[*a].add_term(*m, q),
                Unknown::Lambda(i) => dec.lambda[*i as usize] = q,
                Unknown::Kappa => dec.kappa = q,
            }
        }
        let back = germ.recompose(&dec);
        if back != target {
            return Err(Error::DecompositionFailure("recomposition differs from the input".into()));
        }
        return Ok(dec);
    }
    Err(Error::DecompositionFailure(format!("no decomposition with coefficients of degree <= {}", wdeg + k + 2)))
}

/// Random tangential field: polynomial combination of the named fields plus random `Lambda`/`K` parts.
pub fn random_tangent_field<R: Rng>(germ: &ModelGerm, deg: u32, rng: &mut R) -> SymbolicField {
    let rand_poly = |rng: &mut R| {
        let mut f = Poly::zero();
        for _ in 0..3 {
            let i = rng.gen_range(0..=deg);
            let j = rng.gen_range(0..=(deg - i));
            let l = rng.gen_range(0..=(deg - i - j));
            f.add_term(Mono([i, j, l]), rat::frac(rng.gen_range(-5..=5), rng.gen_range(1..=3)));
        }
        f
    };
    let mut w = SymbolicField::zero();
    for v in [&germ.vx, &germ.vy, &germ.vz, &germ.lambda] {
        w = w.add(&v.mul_poly(&rand_poly(rng)));
    }
    if let Some(k) = &germ.k_hat {
        w = w.add(&k.mul_poly(&rand_poly(rng)));
    }
    germ.reduce_field(&w)
}

/// One numeric check of [`germ_pairings`].
#[derive(Clone, Debug)]
pub struct PairingCheck {
    pub label: String,
    pub error: f64,
    pub tol: f64,
}

impl PairingCheck {
    pub fn pass(&self) -> bool {
        self.error <= self.tol
    }
}

#[derive(Clone, Debug)]
pub struct PairingReport {
    pub kind: GermKind,
    pub checks: Vec<PairingCheck>,
}

impl PairingReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.to_string(),
            "checks": self.checks.iter().map(|c| json!({"label": c.label, "error": format!("{:e}", c.error), "tol": format!("{:e}", c.tol), "pass": c.pass()})).collect::<Vec<_>>(),
        })
    }
}

type P3 = [BigComplex; 3];

fn eval_field(f: &SymbolicField, p: &P3) -> P3 {
    [0, 1, 2].map(|i| f.c[i].eval(p))
}

fn grad_at(germ: &ModelGerm, p: &P3) -> P3 {
    germ.poly.grad().map(|g| g.eval(p))
}

fn cross(u: &P3, v: &P3, k: usize) -> BigComplex {
    let (i, j) = ((k + 1) % 3, (k + 2) % 3);
    &(&u[i] * &v[j]) - &(&u[j] * &v[i])
}

fn best_chart(n: &P3) -> usize {
    (0..3).max_by(|&a, &b| n[a].abs_f64().total_cmp(&n[b].abs_f64())).unwrap()
}

/// Model symplectic form `(u x v)_m / N_m` in the chart with the largest `|N_m|`.
pub fn model_omega(germ: &ModelGerm, p: &P3, u: &P3, v: &P3) -> BigComplex {
    let n = grad_at(germ, p);
    let m = best_chart(&n);
    &cross(u, v, m) / &n[m]
}

/// Solve the model equation for coordinate `m`, starting from `p`.
fn project(germ: &ModelGerm, mut p: P3, m: usize) -> P3 {
    let dm = germ.poly.diff(m);
    for _ in 0..200 {
        let f = germ.poly.eval(&p);
        let step = &f / &dm.eval(&p);
        p[m] = &p[m] - &step;
        if step.is_zero() || step.log2_abs() < -(p[m].prec() as f64) + 8.0 {
            break;
        }
    }
    p
}

/// Random smooth point on the model surface.
pub fn random_model_point<R: Rng>(germ: &ModelGerm, rng: &mut R, prec: usize) -> P3 {
    let mut c = || BigComplex::from_f64_pair(rng.gen_range(0.3..1.2), rng.gen_range(-0.6..0.6), prec);
    let (x, y, z) = (c(), c(), c());
    // the rule variable is the one solved for: x for A_k, z for D_k
    let m = germ.rule().0;
    project(germ, [x, y, z], m)
}

/// `(d i_V omega) / omega` at `p` by central differences with step `h` in a graph chart.
pub fn fd_exterior_ratio(germ: &ModelGerm, field: &SymbolicField, p: &P3, h: f64) -> BigComplex {
    let prec = p[0].prec();
    let n = grad_at(germ, p);
    let m = best_chart(&n);
    let (i, j) = ((m + 1) % 3, (m + 2) % 3);
    // alpha_a(q) = omega(V, e_a - (N_a/N_m) e_m) on the surface near p
    let alpha = |q: &P3, a: usize| -> BigComplex {
        let nq = grad_at(germ, q);
        let mut e = [0, 1, 2].map(|_| BigComplex::zero(prec));
        e[a] = BigComplex::one(prec);
        e[m] = -&(&nq[a] / &nq[m]);
        model_omega(germ, q, &eval_field(field, q), &e)
    };
    let shifted = |a: usize, s: f64| -> P3 {
        let mut q = p.clone();
        q[a] = &q[a] + &BigComplex::from_f64(s, prec);
        project(germ, q, m)
    };
    let hh = BigComplex::from_f64(2.0 * h, prec);
    let d_i_aj = &(&alpha(&shifted(i, h), j) - &alpha(&shifted(i, -h), j)) / &hh;
    let d_j_ai = &(&alpha(&shifted(j, h), i) - &alpha(&shifted(j, -h), i)) / &hh;
    // omega(e_i', e_j') = 1 / N_m
    &(&d_i_aj - &d_j_ai) * &n[m]
}

/// Exact factor `c` with `d i_V omega = c omega`, from `V(f) = lambda f`: `c = div V - lambda`.
pub fn divergence_factor(germ: &ModelGerm, field: &SymbolicField) -> Option<Poly> {
    let vf = germ.reduce(&field.apply(&germ.poly));
    let div = field.c[0].diff(0).add(&field.c[1].diff(1)).add(&field.c[2].diff(2));
    // lambda from V(f) = lambda f as polynomials before reduction
    let raw = field.apply(&germ.poly);
    if !vf.is_zero() {
        return None;
    }
    let lambda = poly_div_exact(&raw, &germ.poly)?;
    Some(div.sub(&lambda))
}

/// `a / b` when `b` divides `a` exactly.
fn poly_div_exact(a: &Poly, b: &Poly) -> Option<Poly> {
    let (lm, lc) = b.leading().map(|(m, c)| (*m, c.clone()))?;
    let mut r = a.clone();
    let mut q = Poly::zero();
    while let Some((m, c)) = r.leading().map(|(m, c)| (*m, c.clone())) {
        let t = m.div(&lm)?;
        let coef = c / &lc;
        q.add_term(t, coef.clone());
        r = r.sub(&b.mul_mono(&t).scale(&coef));
    }
    Some(q)
}

/// Numeric checks of the pairings `omega(V^a, W) = -d x_a(W)` and of `d i_V omega = c omega`
/// for `Lambda` (and `K`), at seeded random points.
pub fn germ_pairings<R: Rng>(kind: GermKind, rng: &mut R, points: usize, prec: usize) -> Result<PairingReport> {
    let germ = model_fields(kind)?;
    let mut checks = Vec::new();
    let tol = 2f64.powi(-(prec as i32) / 2);
    for pi in 0..points {
        let pt = random_model_point(&germ, rng, prec);
        let n = grad_at(&germ, &pt);
        let r = [0, 1, 2].map(|_| BigComplex::from_f64_pair(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), prec));
        // W = N x r is tangent
        let w = [0, 1, 2].map(|k| cross(&n, &r, k));
        let scale = w.iter().map(|c| c.abs_f64()).fold(1.0, f64::max);
        for (a, v) in [&germ.vx, &germ.vy, &germ.vz].iter().enumerate() {
            let lhs = model_omega(&germ, &pt, &eval_field(v, &pt), &w);
            let err = (&lhs + &w[a]).abs_f64() / scale;
            checks.push(PairingCheck { label: format!("p{pi}: omega(V{}, W) + d{}(W)", ["x", "y", "z"][a], ["x", "y", "z"][a]), error: err, tol });
        }
        let vz = eval_field(&germ.vz, &pt);
        checks.push(PairingCheck { label: format!("p{pi}: omega(Vz, Vz)"), error: model_omega(&germ, &pt, &vz, &vz).abs_f64(), tol });
        let mut nonsym = vec![("Lambda", germ.lambda.clone())];
        if let Some(k) = &germ.k_hat {
            nonsym.push(("K", k.clone()));
        }
        for (name, field) in nonsym {
            let factor = divergence_factor(&germ, &field).expect("weighted field");
            let expect = factor.eval(&pt);
            let h = 1e-12;
            let got = fd_exterior_ratio(&germ, &field, &pt, h);
            let err = (&got - &expect).abs_f64() / expect.abs_f64().max(1.0);
            checks.push(PairingCheck { label: format!("p{pi}: d i_{name} omega / omega - ({factor})"), error: err, tol: 1e-18 });
        }
    }
    Ok(PairingReport { kind, checks })
}
