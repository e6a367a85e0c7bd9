//! Poisson-Lie closure of `1, x^k, y^k, z^k` inside the normal-form space of
//! bounded degree, with exact replayable certificates.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::num::rat;
use crate::poisson::bracket;
use crate::poly::{Mono, NormalPoly, Poly};
use crate::surface::SurfaceParams;

/// How a span element was produced.
#[derive(Clone, Debug, PartialEq)]
pub enum Derivation {
    /// Normal form of a seed `1, x^k, y^k, z^k`.
    Generator(Poly),
    /// `{node a, node b}` in normal form.
    Bracket(usize, usize),
}

#[derive(Clone, Debug)]
pub struct RawNode {
    pub poly: NormalPoly,
    pub derivation: Derivation,
}

#[derive(Clone, Debug)]
struct Row {
    poly: Poly,
    combo: BTreeMap<usize, BigRational>,
}

/// Knobs for `close_span`.
#[derive(Clone, Debug, Default)]
pub struct CloseOptions {
    /// Bracket new elements against every basis element, not only generators.
    pub full_pairing: bool,
    /// Shuffle the worklist with this seed (for order-independence checks).
    pub shuffle_seed: Option<u64>,
}

/// Reduced row echelon basis of the closure, with derivations.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    pub params: SurfaceParams,
    pub max_gen_deg: u32,
    pub max_deg: u32,
    pub nodes: Vec<RawNode>,
    rows: Vec<Row>,
    pivots: BTreeMap<Mono, usize>,
    /// Node indices of the seeds (including over-cap ones used only for pairing).
    pub generators: Vec<usize>,
    pub rounds: usize,
    pub brackets_evaluated: usize,
}

/// Replayable derivation of one target.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub target: Poly,
    /// Topologically ordered; `Bracket` indices refer to earlier entries.
    pub nodes: Vec<Derivation>,
    pub combination: Vec<(usize, BigRational)>,
}

/// Outcome of `certify_monomial`.
#[derive(Clone, Debug, PartialEq)]
pub enum Certified {
    Certificate(Certificate),
    NotInSpan,
}

/// Normal-form monomials `x^k y^m` and `x^k y^m z` of degree at most `d`.
pub fn normal_monomials(d: u32) -> Vec<Mono> {
    let mut out = Vec::new();
    for k in 0..=d {
        for m in 0..=(d - k) {
            out.push(Mono::new(k, m, 0));
            if k + m < d {
                out.push(Mono::new(k, m, 1));
            }
        }
    }
    out.sort();
    out
}

impl SpanBasis {
    fn empty(sp: &SurfaceParams, g: u32, d: u32) -> Self {
        Self {
            params: sp.clone(),
            max_gen_deg: g,
            max_deg: d,
            nodes: Vec::new(),
            rows: Vec::new(),
            pivots: BTreeMap::new(),
            generators: Vec::new(),
            rounds: 0,
            brackets_evaluated: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Rows of the reduced echelon form (leading coefficient 1), ascending by pivot.
    pub fn rows(&self) -> Vec<Poly> {
        self.pivots.values().map(|&r| self.rows[r].poly.clone()).collect()
    }

    pub fn pivot_monomials(&self) -> Vec<Mono> {
        self.pivots.keys().copied().collect()
    }

    /// Reduces `q` against the rows; returns remainder and the row multipliers used.
    fn reduce_against(&self, q: &Poly) -> (Poly, BTreeMap<usize, BigRational>) {
        let mut r = q.clone();
        let mut mult = BTreeMap::new();
        for (m, &ri) in self.pivots.iter().rev() {
            let c = r.coeff(m);
            if c.is_zero() {
                continue;
            }
            r = r.sub(&self.rows[ri].poly.scale(&c));
            mult.insert(ri, c);
        }
        (r, mult)
    }

    /// Inserts `poly` (already the value of node `node`) if it is a new direction.
    fn insert(&mut self, poly: &Poly, node: usize) -> bool {
        let (mut q, mult) = self.reduce_against(poly);
        if q.is_zero() {
            return false;
        }
        let mut combo: BTreeMap<usize, BigRational> = BTreeMap::new();
        combo.insert(node, BigRational::one());
        for (ri, c) in &mult {
            for (n, v) in &self.rows[*ri].combo {
                let e = combo.entry(*n).or_insert_with(BigRational::zero);
                *e -= c * v;
            }
        }
        combo.retain(|_, v| !v.is_zero());
        let (lead, lc) = {
            let (m, c) = q.leading().unwrap();
            (*m, c.clone())
        };
        let inv = lc.recip();
        q = q.scale(&inv);
        for v in combo.values_mut() {
            *v *= &inv;
        }
        for row in self.rows.iter_mut() {
            let c = row.poly.coeff(&lead);
            if c.is_zero() {
                continue;
            }
            row.poly = row.poly.sub(&q.scale(&c));
            for (n, v) in &combo {
                let e = row.combo.entry(*n).or_insert_with(BigRational::zero);
                *e -= &c * v;
            }
            row.combo.retain(|_, v| !v.is_zero());
        }
        self.pivots.insert(lead, self.rows.len());
        self.rows.push(Row { poly: q, combo });
        true
    }

    fn push_node(&mut self, poly: NormalPoly, derivation: Derivation) -> usize {
        self.nodes.push(RawNode { poly, derivation });
        self.nodes.len() - 1
    }

    /// Whether `p` (reduced) lies in the span.
    pub fn contains(&self, p: &Poly) -> bool {
        let q = p.reduce(&self.params).into_poly();
        self.reduce_against(&q).0.is_zero()
    }
}

/// Worklist closure of `{1, x^k, y^k, z^k : k <= max_gen_deg}` under the bracket,
/// discarding results of degree above `max_deg`.
pub fn close_span(sp: &SurfaceParams, max_gen_deg: u32, max_deg: u32, opts: &CloseOptions) -> Result<SpanBasis> {
    if max_gen_deg < 1 || max_deg < max_gen_deg {
        return Err(Error::InvalidParams("need max_deg >= max_gen_deg >= 1".into()));
    }
    let mut basis = SpanBasis::empty(sp, max_gen_deg, max_deg);
    let mut seeds = vec![Poly::one()];
    for k in 1..=max_gen_deg {
        for v in 0..3 {
            seeds.push(Poly::var(v).pow(k));
        }
    }
    let mut frontier = Vec::new();
    for s in seeds {
        let nf = s.reduce(sp);
        let within = nf.as_poly().degree().unwrap_or(0) <= max_deg;
        let id = basis.push_node(nf.clone(), Derivation::Generator(s));
        basis.generators.push(id);
        if within && basis.insert(nf.as_poly(), id) {
            frontier.push(id);
        }
    }
    let mut rng = opts.shuffle_seed.map(ChaCha8Rng::seed_from_u64);
    while !frontier.is_empty() {
        basis.rounds += 1;
        if let Some(r) = rng.as_mut() {
            frontier.shuffle(r);
        }
        let partners: Vec<usize> = if opts.full_pairing {
            (0..basis.nodes.len()).collect()
        } else {
            basis.generators.clone()
        };
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for &n in &frontier {
            for &g in &partners {
                if g != n {
                    pairs.push((g, n));
                }
            }
        }
        if let Some(r) = rng.as_mut() {
            pairs.shuffle(r);
        }
        basis.brackets_evaluated += pairs.len();
        let results = eval_pairs(&basis, &pairs);
        let mut next = Vec::new();
        for ((a, b), res) in pairs.into_iter().zip(results) {
            let Some(nf) = res else { continue };
            // cheap pre-check avoids storing nodes that add nothing
            if basis.reduce_against(nf.as_poly()).0.is_zero() {
                continue;
            }
            let id = basis.push_node(nf.clone(), Derivation::Bracket(a, b));
            if basis.insert(nf.as_poly(), id) {
                next.push(id);
            } else {
                basis.nodes.pop();
            }
        }
        frontier = next;
    }
    Ok(basis)
}

fn eval_one(basis: &SpanBasis, a: usize, b: usize) -> Option<NormalPoly> {
    let r = bracket(basis.nodes[a].poly.as_poly(), basis.nodes[b].poly.as_poly(), &basis.params);
    if r.is_zero() || r.as_poly().degree().unwrap_or(0) > basis.max_deg {
        None
    } else {
        Some(r)
    }
}

#[cfg(feature = "parallel")]
fn eval_pairs(basis: &SpanBasis, pairs: &[(usize, usize)]) -> Vec<Option<NormalPoly>> {
    use rayon::prelude::*;
    pairs.par_iter().map(|&(a, b)| eval_one(basis, a, b)).collect()
}

#[cfg(not(feature = "parallel"))]
fn eval_pairs(basis: &SpanBasis, pairs: &[(usize, usize)]) -> Vec<Option<NormalPoly>> {
    pairs.iter().map(|&(a, b)| eval_one(basis, a, b)).collect()
}

/// Derivation of `target` (any normal-form polynomial) from the basis.
pub fn certify(basis: &SpanBasis, target: &Poly) -> Certified {
    let t = target.reduce(&basis.params).into_poly();
    let (rem, mult) = basis.reduce_against(&t);
    if !rem.is_zero() {
        return Certified::NotInSpan;
    }
    let mut total: BTreeMap<usize, BigRational> = BTreeMap::new();
    for (ri, c) in &mult {
        for (n, v) in &basis.rows[*ri].combo {
            let e = total.entry(*n).or_insert_with(BigRational::zero);
            *e += c * v;
        }
    }
    total.retain(|_, v| !v.is_zero());
    // collect the ancestor closure
    let mut need: BTreeSet<usize> = BTreeSet::new();
    let mut stack: Vec<usize> = total.keys().copied().collect();
    while let Some(n) = stack.pop() {
        if need.insert(n) {
            if let Derivation::Bracket(a, b) = basis.nodes[n].derivation {
                stack.push(a);
                stack.push(b);
            }
        }
    }
    let index: BTreeMap<usize, usize> = need.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let nodes = need
        .iter()
        .map(|&n| match &basis.nodes[n].derivation {
            Derivation::Generator(p) => Derivation::Generator(p.clone()),
            Derivation::Bracket(a, b) => Derivation::Bracket(index[a], index[b]),
        })
        .collect();
    let combination = total.into_iter().map(|(n, c)| (index[&n], c)).collect();
    Certified::Certificate(Certificate { target: t, nodes, combination })
}

/// Certificate for a single normal-form monomial of degree at most `max_deg`.
pub fn certify_monomial(basis: &SpanBasis, m: Mono) -> Result<Certified> {
    if m.0[2] > 1 {
        return Err(Error::InvalidParams(format!("{} is not a normal-form monomial", Poly::term(BigRational::one(), m))));
    }
    if m.deg() > basis.max_deg {
        return Err(Error::InvalidParams(format!("degree {} exceeds the cap {}", m.deg(), basis.max_deg)));
    }
    Ok(certify(basis, &Poly::term(BigRational::one(), m)))
}

impl Certificate {
    /// Recomputes every node and the final combination exactly.
    pub fn replay(&self, sp: &SurfaceParams) -> Poly {
        let mut vals: Vec<Poly> = Vec::with_capacity(self.nodes.len());
        for d in &self.nodes {
            let v = match d {
                Derivation::Generator(p) => p.reduce(sp).into_poly(),
                Derivation::Bracket(a, b) => bracket(&vals[*a], &vals[*b], sp).into_poly(),
            };
            vals.push(v);
        }
        let mut r = Poly::zero();
        for (i, c) in &self.combination {
            r = r.add(&vals[*i].scale(c));
        }
        r
    }

    pub fn verify(&self, sp: &SurfaceParams) -> bool {
        self.replay(sp) == self.target
    }

    pub fn to_json(&self) -> Value {
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .map(|d| match d {
                Derivation::Generator(p) => json!({"generator": p.to_string()}),
                Derivation::Bracket(a, b) => json!({"bracket": [a, b]}),
            })
            .collect();
        let comb: Vec<Value> = self.combination.iter().map(|(i, c)| json!([i, rat::fmt(c)])).collect();
        json!({"target": self.target.to_string(), "nodes": nodes, "combination": comb})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |s: &str| Error::Parse(format!("certificate: {}", s));
        let target = Poly::parse(v.get("target").and_then(|t| t.as_str()).ok_or_else(|| bad("target"))?)?;
        let mut nodes = Vec::new();
        for n in v.get("nodes").and_then(|n| n.as_array()).ok_or_else(|| bad("nodes"))? {
            if let Some(g) = n.get("generator").and_then(|g| g.as_str()) {
                nodes.push(Derivation::Generator(Poly::parse(g)?));
            } else if let Some(b) = n.get("bracket").and_then(|b| b.as_array()) {
                let a = b.first().and_then(|x| x.as_u64()).ok_or_else(|| bad("bracket"))? as usize;
                let c = b.get(1).and_then(|x| x.as_u64()).ok_or_else(|| bad("bracket"))? as usize;
                if a >= nodes.len() || c >= nodes.len() {
                    return Err(bad("bracket refers forward"));
                }
                nodes.push(Derivation::Bracket(a, c));
            } else {
                return Err(bad("node"));
            }
        }
        let mut combination = Vec::new();
        for e in v.get("combination").and_then(|c| c.as_array()).ok_or_else(|| bad("combination"))? {
            let i = e.get(0).and_then(|x| x.as_u64()).ok_or_else(|| bad("combination"))? as usize;
            let c = e.get(1).and_then(|x| x.as_str()).and_then(rat::parse).ok_or_else(|| bad("coefficient"))?;
            if i >= nodes.len() {
                return Err(bad("combination index"));
            }
            combination.push((i, c));
        }
        Ok(Self { target, nodes, combination })
    }
}

/// One checked identity from the step-1/2/3 computations.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub label: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Default)]
pub struct LemmaReport {
    pub checks: Vec<IdentityCheck>,
}

impl LemmaReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// Monomials reached by step 1: at most two variables, one of them linear.
fn step1_family(m: &Mono) -> bool {
    let nz: Vec<u32> = m.0.iter().copied().filter(|&e| e > 0).collect();
    match nz.len() {
        0 | 1 => true,
        2 => nz.iter().any(|&e| e == 1),
        _ => false,
    }
}

/// Step-2 results `x^a yz, x^a y^2, x^a z^2` on top of step 1.
fn step2_family(m: &Mono) -> bool {
    step1_family(m) || matches!(m.0, [_, 1, 1] | [_, 2, 0] | [_, 0, 2])
}

/// Induction hypothesis of step 3 at level `mm`.
fn step3_family(m: &Mono, mm: u32) -> bool {
    step2_family(m) || (m.0[2] == 0 && m.0[1] <= mm) || (m.0[2] == 1 && m.0[1] < mm)
}

struct Checker<'a> {
    sp: &'a SurfaceParams,
    report: LemmaReport,
}

impl Checker<'_> {
    /// `lhs == main + known` modulo the surface, with `known` inside `family`.
    fn check(&mut self, label: String, lhs: &Poly, main: &Poly, known: &Poly, family: impl Fn(&Mono) -> bool) -> Result<()> {
        let diff = lhs.sub(main).sub(known).reduce(self.sp);
        let fam_ok = known.terms().all(|(m, _)| family(m));
        if !diff.is_zero() {
            return Err(Error::IdentityMismatch { label, diff: diff.to_string() });
        }
        if !fam_ok {
            return Err(Error::IdentityMismatch { label: format!("{} (remainder outside known family)", label), diff: known.to_string() });
        }
        self.report.checks.push(IdentityCheck { label, holds: true });
        Ok(())
    }
}

fn mono(i: u32, j: u32, k: u32) -> Poly {
    Poly::mono(i, j, k)
}

fn c(q: &BigRational, p: Poly) -> Poly {
    p.scale(q)
}

fn ci(q: i64, p: Poly) -> Poly {
    p.scale_i(q)
}

/// Expands the bracket identities behind the three generation steps for the
/// given `k, m, p` (`p <= k`) and checks them exactly in normal form.
pub fn verify_lemma_identities(sp: &SurfaceParams, k: u32, m: u32, p: u32) -> Result<LemmaReport> {
    if k < 1 || m < 1 || p > k {
        return Err(Error::InvalidParams("need k >= 1, m >= 1, p <= k".into()));
    }
    let (a, b, cc, e) = (&sp.a, &sp.b, &sp.c, &sp.e);
    let mut ck = Checker { sp, report: LemmaReport::default() };
    let br = |f: &Poly, g: &Poly| bracket(f, g, sp).into_poly();
    let z = Poly::zero();
    let (ki, mi, pi) = (k as i64, m as i64, p as i64);

    // step 1, six cyclic variants
    let s1: [(usize, Mono, Poly); 6] = [
        (0, Mono::new(k, 1, 0), ci(2, mono(k, 0, 1)).add(&c(e, mono(k + 1, 1, 0))).sub(&c(cc, mono(k, 0, 0)))),
        (1, Mono::new(0, k, 1), ci(2, mono(1, k, 0)).add(&c(e, mono(0, k + 1, 1))).sub(&c(a, mono(0, k, 0)))),
        (2, Mono::new(1, 0, k), ci(2, mono(0, 1, k)).add(&c(e, mono(1, 0, k + 1))).sub(&c(b, mono(0, 0, k)))),
        (0, Mono::new(k, 0, 1), ci(-2, mono(k, 1, 0)).sub(&c(e, mono(k + 1, 0, 1))).add(&c(b, mono(k, 0, 0)))),
        (1, Mono::new(1, k, 0), ci(-2, mono(0, k, 1)).sub(&c(e, mono(1, k + 1, 0))).add(&c(cc, mono(0, k, 0)))),
        (2, Mono::new(0, 1, k), ci(-2, mono(1, 0, k)).sub(&c(e, mono(0, 1, k + 1))).add(&c(a, mono(0, 0, k)))),
    ];
    for (n, (v, mo, rhs)) in s1.into_iter().enumerate() {
        let lhs = br(&Poly::var(v), &Poly::term(BigRational::one(), mo));
        ck.check(format!("step1[{}] k={}", n + 1, k), &lhs, &rhs, &z, |_| true)?;
    }

    // step 2 general expansion
    let lhs = br(&mono(k - p, 1, 0), &mono(p, 0, 1));
    let rhs = ci(-2 * (ki - pi), mono(k - 1, 2, 0))
        .add(&ci(-2 * pi, mono(k - 1, 0, 2)))
        .sub(&c(&(e * rat::int(ki - 1)), mono(k, 1, 1)))
        .add(&ci(2, mono(k + 1, 0, 0)))
        .sub(&c(a, mono(k, 0, 0)))
        .add(&c(&(cc * rat::int(pi)), mono(k - 1, 0, 1)))
        .add(&c(&(b * rat::int(ki - pi)), mono(k - 1, 1, 0)));
    ck.check(format!("step2 {{x^{}y, x^{}z}} k={} p={}", k - p, p, k, p), &lhs, &rhs, &z, |_| true)?;

    // (3) and (4): p = 0 and p = k with step-1 remainders
    let common = ci(2, mono(k + 1, 0, 0)).sub(&c(a, mono(k, 0, 0)));
    let eq3 = ci(-2 * ki, mono(k - 1, 2, 0)).sub(&c(&(e * rat::int(ki - 1)), mono(k, 1, 1)));
    let eq4 = ci(-2 * ki, mono(k - 1, 0, 2)).sub(&c(&(e * rat::int(ki - 1)), mono(k, 1, 1)));
    let known3 = common.add(&c(&(b * rat::int(ki)), mono(k - 1, 1, 0)));
    let known4 = common.add(&c(&(cc * rat::int(ki)), mono(k - 1, 0, 1)));
    ck.check(format!("step2 (3) k={}", k), &br(&mono(k, 1, 0), &Poly::z()), &eq3, &known3, step1_family)?;
    ck.check(format!("step2 (4) k={}", k), &br(&Poly::y(), &mono(k, 0, 1)), &eq4, &known4, step1_family)?;
    // (5): (3) - (4) = -4k x^{k-1}y^2 - 2kE x^k yz + step-1 terms
    let eq5 = ci(-4 * ki, mono(k - 1, 2, 0)).sub(&c(&(e * rat::int(2 * ki)), mono(k, 1, 1)));
    let known5 = ci(-2 * ki, mono(k + 1, 0, 0))
        .add(&c(&(a * rat::int(2 * ki)), mono(k, 0, 0)))
        .add(&c(&(b * rat::int(2 * ki)), mono(k - 1, 1, 0)))
        .add(&c(&(cc * rat::int(2 * ki)), mono(k - 1, 0, 1)))
        .add(&c(&(&sp.d * rat::int(2 * ki)), mono(k - 1, 0, 0)));
    ck.check(format!("step2 (5) k={}", k), &eq3.sub(&eq4), &eq5, &known5, step1_family)?;
    // (3) and (5) determine x^{k-1}y^2 and x^k yz: determinant 4kE
    let det = rat::int(-2 * ki) * (-(e * rat::int(2 * ki))) - (-(e * rat::int(ki - 1))) * rat::int(-4 * ki);
    ck.report.checks.push(IdentityCheck { label: format!("step2 solvable k={} (det {})", k, rat::fmt(&det)), holds: !det.is_zero() });
    if det.is_zero() {
        return Err(Error::IdentityMismatch { label: format!("step2 determinant k={}", k), diff: "0".into() });
    }

    // step 3 general expansion
    let lhs = br(&mono(k - p, m, 0), &mono(p, 0, 1));
    let coef_e = e * rat::int(mi - pi * mi - (ki - pi));
    let rhs = ci(2 * mi, mono(k + 1, m - 1, 0))
        .sub(&c(&(a * rat::int(mi)), mono(k, m - 1, 0)))
        .add(&c(&(b * rat::int(ki - pi)), mono(k - 1, m, 0)))
        .add(&ci(-2 * (ki - pi), mono(k - 1, m + 1, 0)))
        .add(&c(&coef_e, mono(k, m, 1)))
        .add(&ci(-2 * pi * mi, mono(k - 1, m - 1, 2)))
        .add(&c(&(cc * rat::int(pi * mi)), mono(k - 1, m - 1, 1)));
    ck.check(format!("step3 {{x^{}y^{}, x^{}z}} k={} m={} p={}", k - p, m, p, k, m, p), &lhs, &rhs, &z, |_| true)?;

    let fam3 = |mo: &Mono| step3_family(mo, m);
    // (6): p = 0
    let eq6 = ci(-2 * ki, mono(k - 1, m + 1, 0)).add(&c(&(e * rat::int(mi - ki)), mono(k, m, 1)));
    let known6 = ci(2 * mi, mono(k + 1, m - 1, 0))
        .sub(&c(&(a * rat::int(mi)), mono(k, m - 1, 0)))
        .add(&c(&(b * rat::int(ki)), mono(k - 1, m, 0)));
    ck.check(format!("step3 (6) k={} m={}", k, m), &br(&mono(k, m, 0), &Poly::z()), &eq6, &known6, fam3)?;
    // (7): p = k
    let eq7 = ci(-2 * ki * mi, mono(k - 1, m - 1, 2)).add(&c(&(e * rat::int(mi * (1 - ki))), mono(k, m, 1)));
    let known7 = ci(2 * mi, mono(k + 1, m - 1, 0))
        .sub(&c(&(a * rat::int(mi)), mono(k, m - 1, 0)))
        .add(&c(&(cc * rat::int(ki * mi)), mono(k - 1, m - 1, 1)));
    ck.check(format!("step3 (7) k={} m={}", k, m), &br(&mono(0, m, 0), &mono(k, 0, 1)), &eq7, &known7, fam3)?;
    // (8) = (1-k)/(2k) (6) - (m-k)/(2km) (7)
    let l1 = rat::frac(1 - ki, 2 * ki);
    let l2 = rat::frac(mi - ki, 2 * ki * mi);
    let comb = eq6.scale(&l1).sub(&eq7.scale(&l2));
    let pre8 = ci(-(1 - ki), mono(k - 1, m + 1, 0)).add(&ci(mi - ki, mono(k - 1, m - 1, 2)));
    // exact before using the surface equation
    if comb != pre8 {
        return Err(Error::IdentityMismatch { label: format!("step3 (8) combination k={} m={}", k, m), diff: comb.sub(&pre8).to_string() });
    }
    ck.report.checks.push(IdentityCheck { label: format!("step3 (8) combination k={} m={}", k, m), holds: true });
    let eq8 = ci(-(1 + mi - 2 * ki), mono(k - 1, m + 1, 0)).sub(&c(&(e * rat::int(mi - ki)), mono(k, m, 1)));
    let mk = rat::int(mi - ki);
    let known8 = ci(-(mi - ki), mono(k + 1, m - 1, 0))
        .add(&c(&(a * &mk), mono(k, m - 1, 0)))
        .add(&c(&(b * &mk), mono(k - 1, m, 0)))
        .add(&c(&(cc * &mk), mono(k - 1, m - 1, 1)))
        .add(&c(&(&sp.d * &mk), mono(k - 1, m - 1, 0)));
    ck.check(format!("step3 (8) k={} m={}", k, m), &pre8, &eq8, &known8, fam3)?;
    // (6) + (8) = -(1+m) x^{k-1} y^{m+1}
    let sum = eq6.add(&eq8);
    let want = ci(-(1 + mi), mono(k - 1, m + 1, 0));
    ck.check(format!("step3 (6)+(8) k={} m={}", k, m), &sum, &want, &z, |_| true)?;
    if k == m {
        // -2m^2 x^{m-1}y^{m-1}z^2 + m(1-m)E x^m y^m z = 2m^2 x^{m-1}y^{m+1} + m(1+m)E x^m y^m z + known
        let main = ci(2 * mi * mi, mono(m - 1, m + 1, 0)).add(&c(&(e * rat::int(mi * (1 + mi))), mono(m, m, 1)));
        let m2 = rat::int(2 * mi * mi);
        let known = c(&m2, mono(m + 1, m - 1, 0))
            .sub(&c(&(a * &m2), mono(m, m - 1, 0)))
            .sub(&c(&(b * &m2), mono(m - 1, m, 0)))
            .sub(&c(&(cc * &m2), mono(m - 1, m - 1, 1)))
            .sub(&c(&(&sp.d * &m2), mono(m - 1, m - 1, 0)));
        ck.check(format!("step3 k=m={}", m), &eq7, &main, &known, fam3)?;
    }
    Ok(ck.report)
}
