//! Barycentric Lagrange interpolation in arbitrary precision.

use crate::num::BigComplex;

/// Interpolant through `(nodes[j], values[j])`; nodes pairwise distinct.
#[derive(Clone, Debug)]
pub struct Barycentric {
    pub nodes: Vec<BigComplex>,
    pub values: Vec<BigComplex>,
    pub weights: Vec<BigComplex>,
}

impl Barycentric {
    pub fn new(nodes: Vec<BigComplex>, values: Vec<BigComplex>) -> Self {
        assert_eq!(nodes.len(), values.len());
        let weights = (0..nodes.len())
            .map(|j| {
                let mut d = BigComplex::one(nodes[j].prec());
                for (k, xk) in nodes.iter().enumerate() {
                    if k != j {
                        d = &d * &(&nodes[j] - xk);
                    }
                }
                d.recip()
            })
            .collect();
        Self { nodes, values, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Second (true) barycentric form; exact at the nodes.
    pub fn eval(&self, x: &BigComplex) -> BigComplex {
        let prec = x.prec().max(self.nodes.first().map_or(64, |n| n.prec()));
        if self.nodes.is_empty() {
            return BigComplex::zero(prec);
        }
        let mut num = BigComplex::zero(prec);
        let mut den = BigComplex::zero(prec);
        for j in 0..self.nodes.len() {
            let d = x - &self.nodes[j];
            if d.is_zero() {
                return self.values[j].clone();
            }
            let c = &self.weights[j] / &d;
            num = &num + &(&c * &self.values[j]);
            den = &den + &c;
        }
        &num / &den
    }

    /// Monomial coefficients (ascending) via Newton divided differences.
    pub fn monomial_coeffs(&self) -> Vec<BigComplex> {
        let n = self.nodes.len();
        if n == 0 {
            return Vec::new();
        }
        let mut dd = self.values.clone();
        for lvl in 1..n {
            for i in (lvl..n).rev() {
                dd[i] = &(&dd[i] - &dd[i - 1]) / &(&self.nodes[i] - &self.nodes[i - lvl]);
            }
        }
        let prec = self.nodes[0].prec();
        let mut coeffs = vec![BigComplex::zero(prec); n];
        // Horner on the Newton form: p = dd[n-1]; p = p*(x - x_i) + dd[i]
        coeffs[0] = dd[n - 1].clone();
        let mut deg = 0;
        for i in (0..n - 1).rev() {
            // multiply by (x - nodes[i])
            let mut next = vec![BigComplex::zero(prec); n];
            for k in 0..=deg {
                next[k + 1] = &next[k + 1] + &coeffs[k];
                next[k] = &next[k] - &(&coeffs[k] * &self.nodes[i]);
            }
            deg += 1;
            next[0] = &next[0] + &dd[i];
            coeffs = next;
        }
        coeffs
    }
}

/// Horner evaluation of ascending coefficients.
pub fn horner(coeffs: &[BigComplex], x: &BigComplex) -> BigComplex {
    let mut acc = BigComplex::zero(x.prec());
    for c in coeffs.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> BigComplex {
        BigComplex::from_f64(v, 200)
    }

    #[test]
    fn reproduces_quadratic() {
        let nodes = vec![c(1.0), c(2.0), c(5.0)];
        let vals: Vec<_> = nodes.iter().map(|x| &(x * x) - &c(3.0)).collect();
        let b = Barycentric::new(nodes, vals);
        assert!((&b.eval(&c(3.5)) - &c(9.25)).abs_f64() < 1e-50);
        let m = b.monomial_coeffs();
        assert!((&m[0] - &c(-3.0)).abs_f64() < 1e-50);
        assert!(m[1].abs_f64() < 1e-50);
        assert!((&m[2] - &c(1.0)).abs_f64() < 1e-50);
        assert!((&horner(&m, &c(3.5)) - &c(9.25)).abs_f64() < 1e-50);
    }

    #[test]
    fn exact_at_nodes() {
        let b = Barycentric::new(vec![c(1.0), c(29.0)], vec![c(0.25), c(-7.0)]);
        assert_eq!(b.eval(&c(29.0)).to_f64_pair(), (-7.0, 0.0));
    }

    #[test]
    fn single_node_is_constant() {
        let b = Barycentric::new(vec![c(2.0)], vec![c(0.5)]);
        assert_eq!(b.eval(&c(100.0)).to_f64_pair(), (0.5, 0.0));
        assert_eq!(b.monomial_coeffs().len(), 1);
    }
}
