//! Truncated multivariate power series over an exact or approximate field.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::num::{rat, BigComplex};

/// Field operations needed by the splitting lemma.
pub trait Scalar: Clone + Debug {
    fn zero_like(&self) -> Self;
    fn from_rat_like(&self, q: &BigRational) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Magnitude used for pivoting.
    fn magnitude(&self) -> f64;
    fn describe(&self) -> String;

    fn from_i64_like(&self, i: i64) -> Self {
        self.from_rat_like(&rat::int(i))
    }
}

impl Scalar for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn from_rat_like(&self, q: &BigRational) -> Self {
        q.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn magnitude(&self) -> f64 {
        rat::to_f64(&self.abs())
    }
    fn describe(&self) -> String {
        rat::fmt(self)
    }
}

/// Complex number whose zero test is `log2|v| < zero_log2`.
#[derive(Clone, Debug)]
pub struct Approx {
    pub v: BigComplex,
    pub zero_log2: f64,
}

impl Approx {
    pub fn new(v: BigComplex, zero_log2: f64) -> Self {
        Self { v, zero_log2 }
    }

    fn wrap(&self, v: BigComplex) -> Self {
        Self { v, zero_log2: self.zero_log2 }
    }
}

impl Scalar for Approx {
    fn zero_like(&self) -> Self {
        self.wrap(BigComplex::zero(self.v.prec()))
    }
    fn from_rat_like(&self, q: &BigRational) -> Self {
        self.wrap(BigComplex::from_rational(q, self.v.prec()))
    }
    fn add(&self, o: &Self) -> Self {
        self.wrap(&self.v + &o.v)
    }
    fn sub(&self, o: &Self) -> Self {
        self.wrap(&self.v - &o.v)
    }
    fn mul(&self, o: &Self) -> Self {
        self.wrap(&self.v * &o.v)
    }
    fn div(&self, o: &Self) -> Self {
        self.wrap(&self.v / &o.v)
    }
    fn neg(&self) -> Self {
        self.wrap(-&self.v)
    }
    fn is_zero(&self) -> bool {
        self.v.is_zero() || self.v.log2_abs() < self.zero_log2
    }
    fn magnitude(&self) -> f64 {
        self.v.abs_f64()
    }
    fn describe(&self) -> String {
        if self.is_zero() {
            "0".into()
        } else {
            self.v.to_sci(20)
        }
    }
}

/// Power series in `N` variables truncated above total degree `order`.
#[derive(Clone, Debug)]
pub struct Jet<S: Scalar, const N: usize> {
    pub terms: BTreeMap<[u32; N], S>,
    pub order: u32,
    proto: S,
}

fn deg<const N: usize>(e: &[u32; N]) -> u32 {
    e.iter().sum()
}

impl<S: Scalar, const N: usize> Jet<S, N> {
    pub fn zero(proto: &S, order: u32) -> Self {
        Self { terms: BTreeMap::new(), order, proto: proto.zero_like() }
    }

    pub fn constant(c: S, order: u32) -> Self {
        let mut j = Self::zero(&c, order);
        j.add_term([0; N], c);
        j
    }

    /// The coordinate function `t_v`.
    pub fn var(proto: &S, v: usize, order: u32) -> Self {
        let mut j = Self::zero(proto, order);
        let mut e = [0; N];
        e[v] = 1;
        j.add_term(e, proto.from_i64_like(1));
        j
    }

    pub fn add_term(&mut self, e: [u32; N], c: S) {
        if deg(&e) > self.order {
            return;
        }
        let v = match self.terms.remove(&e) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(e, v);
        }
    }

    pub fn coeff(&self, e: &[u32; N]) -> S {
        self.terms.get(e).cloned().unwrap_or_else(|| self.proto.zero_like())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest total degree with a nonzero coefficient.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().map(deg).min()
    }

    pub fn homogeneous(&self, d: u32) -> Self {
        let mut r = Self::zero(&self.proto, self.order);
        for (e, c) in &self.terms {
            if deg(e) == d {
                r.terms.insert(*e, c.clone());
            }
        }
        r
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        r.order = self.order.min(o.order);
        r.terms.retain(|e, _| deg(e) <= r.order);
        for (e, c) in &o.terms {
            r.add_term(*e, c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        let mut r = self.clone();
        for c in r.terms.values_mut() {
            *c = c.neg();
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &S) -> Self {
        let mut r = Self::zero(&self.proto, self.order);
        for (e, c) in &self.terms {
            r.add_term(*e, c.mul(k));
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let mut r = Self::zero(&self.proto, order);
        for (e1, c1) in &self.terms {
            let d1 = deg(e1);
            for (e2, c2) in &o.terms {
                if d1 + deg(e2) > order {
                    continue;
                }
                let mut e = [0; N];
                for i in 0..N {
                    e[i] = e1[i] + e2[i];
                }
                r.add_term(e, c1.mul(c2));
            }
        }
        r
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut r = Self::constant(self.proto.from_i64_like(1), self.order);
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    pub fn diff(&self, v: usize) -> Self {
        let mut r = Self::zero(&self.proto, self.order.saturating_sub(1));
        for (e, c) in &self.terms {
            if e[v] > 0 {
                let mut e2 = *e;
                e2[v] -= 1;
                r.add_term(e2, c.mul(&c.from_i64_like(e[v] as i64)));
            }
        }
        r
    }

    /// Substitute series `s[i]` (in `M` variables, no constant term) for variable `i`.
    pub fn compose<const M: usize>(&self, s: &[Jet<S, M>; N], order: u32) -> Jet<S, M> {
        let mut r = Jet::<S, M>::zero(&self.proto, order);
        let mut powers: Vec<Vec<Jet<S, M>>> = Vec::with_capacity(N);
        for (i, si) in s.iter().enumerate() {
            let maxp = self.terms.keys().map(|e| e[i]).max().unwrap_or(0);
            let mut v = vec![Jet::constant(self.proto.from_i64_like(1), order)];
            for _ in 0..maxp {
                let next = v.last().unwrap().mul(si);
                v.push(next);
            }
            powers.push(v);
        }
        for (e, c) in &self.terms {
            let mut t = Jet::constant(c.clone(), order);
            for i in 0..N {
                if e[i] > 0 {
                    t = t.mul(&powers[i][e[i] as usize]);
                }
            }
            r = r.add(&t);
        }
        r
    }
}

/// Solve `m x = b` by Gaussian elimination with magnitude pivoting; `None` if singular.
pub fn solve<S: Scalar>(m: &[Vec<S>], b: &[S]) -> Option<Vec<S>> {
    let n = b.len();
    let mut a: Vec<Vec<S>> = m.iter().zip(b).map(|(r, bi)| {
        let mut r = r.clone();
        r.push(bi.clone());
        r
    }).collect();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].magnitude().total_cmp(&a[j][col].magnitude()))?;
        if a[p][col].is_zero() {
            return None;
        }
        a.swap(col, p);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].div(&a[col][col]);
                for c in col..=n {
                    let v = a[r][c].sub(&f.mul(&a[col][c]));
                    a[r][c] = v;
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n].div(&a[i][i])).collect())
}

/// Rank and a basis of the kernel of a square matrix.
pub fn kernel<S: Scalar>(m: &[Vec<S>]) -> (usize, Vec<Vec<S>>) {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut a = m.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let p = (r..rows).max_by(|&i, &j| a[i][c].magnitude().total_cmp(&a[j][c].magnitude())).unwrap();
        if a[p][c].is_zero() {
            continue;
        }
        a.swap(r, p);
        let piv = a[r][c].clone();
        for cc in 0..cols {
            a[r][cc] = a[r][cc].div(&piv);
        }
        for rr in 0..rows {
            if rr != r && !a[rr][c].is_zero() {
                let f = a[rr][c].clone();
                for cc in 0..cols {
                    let v = a[rr][cc].sub(&f.mul(&a[r][cc]));
                    a[rr][cc] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let proto = &m[0][0];
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![proto.zero_like(); cols];
        v[free] = proto.from_i64_like(1);
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = a[i][free].neg();
        }
        basis.push(v);
    }
    (pivots.len(), basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(i: i64) -> BigRational {
        rat::int(i)
    }

    #[test]
    fn compose_and_valuation() {
        // f = a^2 + b^3 with a = t, b = t + t^2
        let p = q(0);
        let a = Jet::<_, 2>::var(&p, 0, 6);
        let b = Jet::<_, 2>::var(&p, 1, 6);
        let f = a.pow(2).add(&b.pow(3));
        let t = Jet::<_, 1>::var(&p, 0, 6);
        let g = f.compose(&[t.clone(), t.add(&t.pow(2))], 6);
        assert_eq!(g.valuation(), Some(2));
        assert_eq!(g.coeff(&[3]), q(1));
        assert_eq!(g.coeff(&[4]), q(3));
    }

    #[test]
    fn kernel_of_rank_one() {
        let m = vec![vec![q(2), q(2), q(2)]; 3];
        let (r, k) = kernel(&m);
        assert_eq!(r, 1);
        assert_eq!(k.len(), 2);
        for v in k {
            assert_eq!(v.iter().fold(q(0), |a, b| a + b), q(0));
        }
    }

    #[test]
    fn solve_small() {
        let m = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        assert_eq!(solve(&m, &[q(3), q(4)]).unwrap(), vec![q(1), q(1)]);
    }
}
