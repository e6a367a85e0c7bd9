//! Markov triples `x^2+y^2+z^2 = 3xyz`, their Vieta tree, Lagrange values and growth fits.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::num::BigReal;

/// Positive solution with `x <= y <= z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkovTriple {
    pub x: BigInt,
    pub y: BigInt,
    pub z: BigInt,
}

impl MarkovTriple {
    /// Sorts the coordinates and checks the equation.
    pub fn new(a: BigInt, b: BigInt, c: BigInt) -> Result<Self> {
        let mut v = [a, b, c];
        v.sort();
        let [x, y, z] = v;
        let t = Self { x, y, z };
        if t.x < BigInt::one() || !t.is_solution() {
            return Err(Error::NotMarkovNumber(format!("{t} is not a Markov triple")));
        }
        Ok(t)
    }

    pub fn from_u64(a: u64, b: u64, c: u64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into())
    }

    pub fn root() -> Self {
        Self { x: BigInt::one(), y: BigInt::one(), z: BigInt::one() }
    }

    pub fn is_solution(&self) -> bool {
        let (x, y, z) = (&self.x, &self.y, &self.z);
        x * x + y * y + z * z == BigInt::from(3) * x * y * z
    }

    pub fn coords(&self) -> [BigInt; 3] {
        [self.x.clone(), self.y.clone(), self.z.clone()]
    }

    /// Sort key `(z, y, x)`.
    pub fn key(&self) -> (BigInt, BigInt, BigInt) {
        (self.z.clone(), self.y.clone(), self.x.clone())
    }

    pub fn to_json(&self) -> Value {
        json!([self.x.to_string(), self.y.to_string(), self.z.to_string()])
    }
}

impl std::fmt::Display for MarkovTriple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

/// Replace coordinate `i` (of the sorted triple) by `3 * (product of the others) - itself`, unsorted.
pub fn vieta_move_raw(c: &[BigInt; 3], i: usize) -> [BigInt; 3] {
    let mut out = c.clone();
    let (j, k) = ((i + 1) % 3, (i + 2) % 3);
    out[i] = BigInt::from(3) * &c[j] * &c[k] - &c[i];
    out
}

/// The three Vieta neighbours, each re-sorted.
pub fn vieta_moves(t: &MarkovTriple) -> [MarkovTriple; 3] {
    let c = t.coords();
    [0, 1, 2].map(|i| {
        let mut v = vieta_move_raw(&c, i);
        v.sort();
        let [x, y, z] = v;
        MarkovTriple { x, y, z }
    })
}

/// All ordered triples with `z <= bound`, sorted by `(z, y, x)`.
pub fn enumerate_ordered(bound: &BigInt) -> Vec<MarkovTriple> {
    let mut seen = BTreeSet::new();
    if bound < &BigInt::one() {
        return Vec::new();
    }
    let mut queue = VecDeque::from([MarkovTriple::root()]);
    seen.insert(MarkovTriple::root());
    while let Some(t) = queue.pop_front() {
        for c in vieta_moves(&t) {
            // moves other than the one back to the parent strictly increase the maximum
            if c.z <= *bound && c.z >= t.z && !seen.contains(&c) {
                seen.insert(c.clone());
                queue.push_back(c);
            }
        }
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort_by_key(|t| t.key());
    out
}

/// Distinct maximal coordinates up to `bound`, increasing.
pub fn markov_numbers_upto(bound: &BigInt) -> Vec<BigInt> {
    let set: BTreeSet<BigInt> = enumerate_ordered(bound).into_iter().map(|t| t.z).collect();
    set.into_iter().collect()
}

/// The first `n` Markov numbers.
pub fn first_markov_numbers(n: usize) -> Vec<BigInt> {
    let mut bound = BigInt::from(1000);
    loop {
        let v = markov_numbers_upto(&bound);
        if v.len() >= n {
            return v.into_iter().take(n).collect();
        }
        bound *= 1000;
    }
}

pub fn is_markov_number(z: &BigInt) -> bool {
    enumerate_ordered(z).iter().any(|t| &t.z == z)
}

/// `sqrt(9 z^2 - 4) / z`.
pub fn lagrange_value(z: &BigInt, prec: usize) -> Result<BigReal> {
    if !is_markov_number(z) {
        return Err(Error::NotMarkovNumber(z.to_string()));
    }
    let zr = BigReal::from_bigint(z, prec);
    let v = BigReal::from_bigint(&(BigInt::from(9) * z * z - 4), prec);
    Ok(v.sqrt().div(&zr))
}

/// Triples sharing a maximal coordinate; empty when uniqueness holds up to `bound`.
pub fn uniqueness_scan(bound: &BigInt) -> Vec<(BigInt, Vec<MarkovTriple>)> {
    let mut by_z: BTreeMap<BigInt, Vec<MarkovTriple>> = BTreeMap::new();
    for t in enumerate_ordered(bound) {
        by_z.entry(t.z.clone()).or_default().push(t);
    }
    by_z.into_iter().filter(|(_, v)| v.len() > 1).collect()
}

/// Least-squares fit of `log(3 m_n)` against `sqrt(n)` over `n in [lo, hi]` (1-based).
#[derive(Clone, Debug)]
pub struct ZagierFit {
    pub lo: usize,
    pub hi: usize,
    pub slope: f64,
    pub intercept: f64,
    /// `log(3 m_n) - (slope sqrt(n) + intercept)`.
    pub residuals: Vec<f64>,
}

impl ZagierFit {
    pub fn max_abs_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a, r| a.max(r.abs()))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "window": [self.lo, self.hi],
            "C_estimate": format!("{}", self.slope),
            "intercept": format!("{}", self.intercept),
            "max_abs_residual": format!("{:e}", self.max_abs_residual()),
            "residuals": self.residuals.iter().map(|r| format!("{r:e}")).collect::<Vec<_>>(),
        })
    }
}

fn ln_big(m: &BigInt) -> f64 {
    // log via the leading 53 bits so huge values stay finite
    let bits = m.bits();
    if bits <= 1000 {
        m.to_f64().unwrap().ln()
    } else {
        let shift = bits - 64;
        (m >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Fit over an explicit list of Markov numbers (index 1 is the first).
pub fn zagier_fit_window(numbers: &[BigInt], lo: usize, hi: usize) -> Result<ZagierFit> {
    if lo < 1 || hi > numbers.len() || hi < lo + 2 {
        return Err(Error::InvalidParams(format!("bad window [{lo}, {hi}] for {} numbers", numbers.len())));
    }
    let pts: Vec<(f64, f64)> = (lo..=hi).map(|n| ((n as f64).sqrt(), ln_big(&(BigInt::from(3) * &numbers[n - 1])))).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = pts.iter().map(|p| p.1 - (slope * p.0 + intercept)).collect();
    Ok(ZagierFit { lo, hi, slope, intercept, residuals })
}

/// Fit over the first `n` Markov numbers.
pub fn zagier_fit(n: usize) -> Result<ZagierFit> {
    if n < 10 {
        return Err(Error::InvalidParams("need at least 10 Markov numbers".into()));
    }
    let m = first_markov_numbers(n);
    zagier_fit_window(&m, 1, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(a: u64, b: u64, c: u64) -> MarkovTriple {
        MarkovTriple::from_u64(a, b, c).unwrap()
    }

    #[test]
    fn moves_from_root() {
        for c in vieta_moves(&MarkovTriple::root()) {
            assert_eq!(c, t(1, 1, 2));
        }
        let m = vieta_moves(&t(1, 2, 5));
        assert!(m.contains(&t(2, 5, 29)) && m.contains(&t(1, 5, 13)));
    }

    #[test]
    fn move_is_involution() {
        let c = t(2, 5, 29).coords();
        for i in 0..3 {
            assert_eq!(vieta_move_raw(&vieta_move_raw(&c, i), i), c);
        }
    }

    #[test]
    fn small_bounds() {
        let got = enumerate_ordered(&BigInt::from(30));
        assert_eq!(got, vec![t(1, 1, 1), t(1, 1, 2), t(1, 2, 5), t(1, 5, 13), t(2, 5, 29)]);
        assert_eq!(enumerate_ordered(&BigInt::one()), vec![t(1, 1, 1)]);
    }

    #[test]
    fn bound_1000() {
        let got = enumerate_ordered(&BigInt::from(1000));
        assert_eq!(got.len(), 13);
        assert_eq!(got.last().unwrap(), &t(2, 169, 985));
        assert!(got.contains(&t(5, 29, 433)) && got.contains(&t(1, 34, 89)));
    }

    #[test]
    fn rejects_non_triple() {
        assert!(MarkovTriple::from_u64(1, 2, 3).is_err());
    }

    #[test]
    fn lagrange_values() {
        let v = lagrange_value(&BigInt::one(), 128).unwrap().to_f64();
        assert!((v - 5f64.sqrt()).abs() < 1e-15);
        let v = lagrange_value(&BigInt::from(2), 128).unwrap().to_f64();
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(lagrange_value(&BigInt::from(3), 64).unwrap_err().code(), "NotMarkovNumber");
    }

    #[test]
    fn markov_number_200() {
        let m = first_markov_numbers(200);
        assert_eq!(m[199], "93139301545921".parse::<BigInt>().unwrap());
    }

    #[test]
    fn small_fit_is_finite() {
        let f = zagier_fit(10).unwrap();
        assert!(f.slope.is_finite() && f.residuals.len() == 10);
    }
}
