//! Dense univariate polynomials over the rationals, plus complex root finding.

use num_rational::BigRational;
use num_traits::Zero;

use crate::num::{BigComplex, BigReal};

/// Ascending coefficients; no trailing zeros (the zero polynomial is empty).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly(pub Vec<BigRational>);

impl UPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Self(c)
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| BigRational::from_integer(v.into())).collect())
    }

    pub fn zero() -> Self {
        Self(Vec::new())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> BigRational {
        self.0.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self::new((0..n).map(|i| self.get(i) + o.get(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self::new((0..n).map(|i| self.get(i) - o.get(i)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut r = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                r[i + j] += a * b;
            }
        }
        Self::new(r)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(self.0.iter().map(|c| c * k).collect())
    }

    fn get(&self, i: usize) -> BigRational {
        self.0.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(i.into())).collect())
    }

    /// Euclidean division.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.0.len() - 1;
        let mut r = self.0.clone();
        if r.len() < d.0.len() {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        let lc = d.lead();
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] / &lc;
            if !c.is_zero() {
                for (j, dj) in d.0.iter().enumerate() {
                    r[i + j] -= &c * dj;
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&self.lead().recip())
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Square-free part `p / gcd(p, p')`, monic.
    pub fn squarefree(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.divrem(&g).0.monic()
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval(&self, x: &BigComplex) -> BigComplex {
        let mut acc = BigComplex::zero(x.prec());
        for c in self.0.iter().rev() {
            acc = &(&acc * x) + &BigComplex::from_rational(c, x.prec());
        }
        acc
    }

    /// All complex roots (with multiplicity) by Durand-Kerner iteration.
    pub fn roots(&self, prec: usize) -> Vec<BigComplex> {
        let Some(n) = self.degree() else { return Vec::new() };
        if n == 0 {
            return Vec::new();
        }
        let m = self.monic();
        let coeffs: Vec<BigComplex> = m.0.iter().map(|c| BigComplex::from_rational(c, prec)).collect();
        let ev = |x: &BigComplex| -> BigComplex {
            let mut acc = BigComplex::zero(prec);
            for c in coeffs.iter().rev() {
                acc = &(&acc * x) + c;
            }
            acc
        };
        // Cauchy bound for the initial circle
        let bound = 1.0 + m.0[..n].iter().map(|c| crate::num::rat::to_f64(c).abs()).fold(0.0, f64::max);
        let seed = BigComplex::from_f64_pair(0.4, 0.9, prec);
        let mut z: Vec<BigComplex> = (0..n)
            .map(|k| seed.powi(k as u32).scale(&BigReal::from_f64(bound.min(1e6) * 0.5 + 0.1, prec)))
            .collect();
        let tol = -(prec as f64) + 16.0;
        for _ in 0..(2000 + 20 * prec) {
            let mut worst = f64::NEG_INFINITY;
            for i in 0..n {
                let mut den = BigComplex::one(prec);
                for j in 0..n {
                    if i != j {
                        den = &den * &(&z[i] - &z[j]);
                    }
                }
                if den.is_zero() {
                    den = BigComplex::from_f64(1e-30, prec);
                }
                let step = &ev(&z[i]) / &den;
                let rel = step.log2_abs() - z[i].log2_abs().max(0.0);
                worst = worst.max(rel);
                z[i] = &z[i] - &step;
            }
            if worst < tol {
                break;
            }
        }
        z
    }
}

/// Polynomial in `y` with coefficients in `Q[z]`, ascending in `y`.
#[derive(Clone, Debug)]
pub struct BiPoly(pub Vec<UPoly>);

impl BiPoly {
    /// Resultant with respect to `y` of a degree-1 and a degree-2 polynomial.
    pub fn resultant_lin_quad(f: &BiPoly, g: &BiPoly) -> UPoly {
        let z = UPoly::zero();
        let (a0, a1) = (f.0.first().unwrap_or(&z), f.0.get(1).unwrap_or(&z));
        let (b0, b1, b2) = (g.0.first().unwrap_or(&z), g.0.get(1).unwrap_or(&z), g.0.get(2).unwrap_or(&z));
        // det of the Sylvester matrix [[a1,a0,0],[0,a1,a0],[b2,b1,b0]]
        let t1 = b2.mul(a0).mul(a0);
        let t2 = b1.mul(a0).mul(a1);
        let t3 = b0.mul(a1).mul(a1);
        t1.sub(&t2).add(&t3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    #[test]
    fn gcd_and_squarefree() {
        // (z-2)^2 (z+1)
        let p = UPoly::from_ints(&[4, 0, -3, 1]);
        assert_eq!(p.squarefree(), UPoly::from_ints(&[-2, -1, 1]));
        let q = UPoly::from_ints(&[-2, 1]);
        assert_eq!(p.gcd(&q), q);
    }

    #[test]
    fn roots_of_cubic() {
        let p = UPoly::from_ints(&[-6, 11, -6, 1]);
        let mut r: Vec<f64> = p.roots(128).iter().map(|c| c.re.to_f64()).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-30);
        }
    }

    #[test]
    fn complex_roots() {
        let p = UPoly::from_ints(&[1, 0, 1]);
        let r = p.roots(128);
        assert!(r.iter().all(|c| (c.im.to_f64().abs() - 1.0).abs() < 1e-30));
    }

    #[test]
    fn resultant_matches_substitution() {
        // f = (z+1) y - 2, g = y^2 - z
        let f = BiPoly(vec![UPoly::from_ints(&[-2]), UPoly::from_ints(&[1, 1])]);
        let g = BiPoly(vec![UPoly::from_ints(&[0, -1]), UPoly::zero(), UPoly::from_ints(&[1])]);
        let r = BiPoly::resultant_lin_quad(&f, &g);
        // y = 2/(z+1): 4 - z (z+1)^2
        assert_eq!(r, UPoly::from_ints(&[4, -1, -2, -1]));
        assert_eq!(r.eval_rational(&rat::int(1)), rat::int(0));
    }
}
