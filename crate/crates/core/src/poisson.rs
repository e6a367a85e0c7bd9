//! Jacobian Poisson bracket `{f,g} = det(grad f, grad g, grad P)` with Casimir `P`.
//!
//! Sign convention: `hamiltonian_field(f) = grad P x grad f`, so that
//! `X_f(g) = {f,g}`, `X_x = V^x`, `i_{X_f} omega = -df` and
//! `omega(X_f, X_g) = {f,g}`.

use std::collections::HashMap;

use crate::poly::{Mono, NormalPoly, Poly};
use crate::surface::SurfaceParams;

/// Bracket before reduction modulo the surface.
pub fn bracket_raw(f: &Poly, g: &Poly, sp: &SurfaceParams) -> Poly {
    let n = sp.normal_form().n;
    bracket_with_grad(f, g, &n)
}

/// `{f,g}` for a Casimir with gradient `n`.
pub fn bracket_with_grad(f: &Poly, g: &Poly, n: &[Poly; 3]) -> Poly {
    let df = f.grad();
    let dg = g.grad();
    let mut r = Poly::zero();
    for k in 0..3 {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        let c = df[i].mul(&dg[j]).sub(&df[j].mul(&dg[i]));
        if !c.is_zero() {
            r = r.add(&c.mul(&n[k]));
        }
    }
    r
}

/// `{f,g}` in normal form.
pub fn bracket(f: &Poly, g: &Poly, sp: &SurfaceParams) -> NormalPoly {
    bracket_raw(f, g, sp).reduce(sp)
}

/// `{P, f}` before any reduction; identically zero.
pub fn casimir_check(f: &Poly, sp: &SurfaceParams) -> Poly {
    bracket_raw(&sp.defining_poly(), f, sp)
}

/// Generator brackets `{x,y}, {y,z}, {z,x}` and their Leibniz extension.
#[derive(Clone, Debug)]
pub struct BracketTable {
    pub params: SurfaceParams,
    pub xy: Poly,
    pub yz: Poly,
    pub zx: Poly,
}

impl BracketTable {
    pub fn new(sp: &SurfaceParams) -> Self {
        let [nx, ny, nz] = sp.normal_form().n;
        Self { params: sp.clone(), xy: nz, yz: nx, zx: ny }
    }

    /// `{x_a, x_b}` from the table.
    pub fn gen(&self, a: usize, b: usize) -> Poly {
        match (a, b) {
            (0, 1) => self.xy.clone(),
            (1, 0) => self.xy.neg(),
            (1, 2) => self.yz.clone(),
            (2, 1) => self.yz.neg(),
            (2, 0) => self.zx.clone(),
            (0, 2) => self.zx.neg(),
            _ => Poly::zero(),
        }
    }

    /// Bilinear Leibniz extension over monomials; independent of the determinant.
    pub fn extend(&self, f: &Poly, g: &Poly) -> Poly {
        let mut memo = HashMap::new();
        let mut r = Poly::zero();
        for (m1, c1) in f.terms() {
            for (m2, c2) in g.terms() {
                let b = self.mono_bracket(*m1, *m2, &mut memo);
                r = r.add(&b.scale(&(c1 * c2)));
            }
        }
        r
    }

    fn mono_bracket(&self, m1: Mono, m2: Mono, memo: &mut HashMap<(Mono, Mono), Poly>) -> Poly {
        if m1.deg() == 0 || m2.deg() == 0 {
            return Poly::zero();
        }
        if let Some(p) = memo.get(&(m1, m2)) {
            return p.clone();
        }
        let r = if m1.deg() > 1 {
            // {v m', g} = v {m', g} + m' {v, g}
            let v = (0..3).find(|&v| m1.0[v] > 0).unwrap();
            let mut e = [0; 3];
            e[v] = 1;
            let rest = m1.div(&Mono(e)).unwrap();
            let a = self.mono_bracket(rest, m2, memo).mul_mono(&Mono(e));
            let b = self.mono_bracket(Mono(e), m2, memo).mul_mono(&rest);
            a.add(&b)
        } else if m2.deg() > 1 {
            let v = (0..3).find(|&v| m2.0[v] > 0).unwrap();
            let mut e = [0; 3];
            e[v] = 1;
            let rest = m2.div(&Mono(e)).unwrap();
            let a = self.mono_bracket(m1, rest, memo).mul_mono(&Mono(e));
            let b = self.mono_bracket(m1, Mono(e), memo).mul_mono(&rest);
            a.add(&b)
        } else {
            let a = (0..3).find(|&v| m1.0[v] > 0).unwrap();
            let b = (0..3).find(|&v| m2.0[v] > 0).unwrap();
            self.gen(a, b)
        };
        memo.insert((m1, m2), r.clone());
        r
    }
}

/// Polynomial vector field `c[0] d/dx + c[1] d/dy + c[2] d/dz`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SymbolicField {
    pub c: [Poly; 3],
}

impl SymbolicField {
    pub fn new(cx: Poly, cy: Poly, cz: Poly) -> Self {
        Self { c: [cx, cy, cz] }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|p| p.is_zero())
    }

    /// Derivation `V(g)`.
    pub fn apply(&self, g: &Poly) -> Poly {
        let dg = g.grad();
        let mut r = Poly::zero();
        for k in 0..3 {
            r = r.add(&self.c[k].mul(&dg[k]));
        }
        r
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { c: [0, 1, 2].map(|k| self.c[k].add(&o.c[k])) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { c: [0, 1, 2].map(|k| self.c[k].sub(&o.c[k])) }
    }

    pub fn mul_poly(&self, f: &Poly) -> Self {
        Self { c: [0, 1, 2].map(|k| self.c[k].mul(f)) }
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        Self { c: [f(&self.c[0]), f(&self.c[1]), f(&self.c[2])] }
    }

    pub fn reduce(&self, sp: &SurfaceParams) -> Self {
        self.map(|p| p.reduce(sp).into_poly())
    }

    /// `N(V)` reduced modulo the surface vanishes.
    pub fn is_tangent(&self, sp: &SurfaceParams) -> bool {
        self.apply(&sp.defining_poly()).reduce(sp).is_zero()
    }
}

/// `X_f = grad P x grad f`, so that `X_f(g) = {f,g}` and `X_x = V^x`.
pub fn hamiltonian_field(f: &Poly, sp: &SurfaceParams) -> SymbolicField {
    let n = sp.normal_form().n;
    let df = f.grad();
    SymbolicField {
        c: [0, 1, 2].map(|k| {
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            n[i].mul(&df[j]).sub(&n[j].mul(&df[i]))
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn markov() -> SurfaceParams {
        SurfaceParams::markov()
    }

    fn p(s: &str) -> Poly {
        Poly::parse(s).unwrap()
    }

    #[test]
    fn generator_brackets() {
        let sp = markov();
        assert_eq!(bracket(&Poly::x(), &Poly::y(), &sp).to_string(), "2*z^1-3*x^1*y^1");
        assert_eq!(bracket(&Poly::y(), &Poly::z(), &sp).as_poly(), &p("2*x - 3*y*z"));
        assert_eq!(bracket(&Poly::z(), &Poly::x(), &sp).as_poly(), &p("2*y - 3*x*z"));
        assert!(bracket(&p("x^2*y+z"), &p("x^2*y+z"), &sp).is_zero());
    }

    #[test]
    fn step1_example_k3() {
        let sp = SurfaceParams::from_ints(2, -1, 5, 3, 7).unwrap();
        let lhs = bracket(&Poly::x(), &p("x^3*y"), &sp);
        let rhs = p("2*x^3*z + 7*x^4*y - 5*x^3").reduce(&sp);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn hamiltonian_conventions() {
        let sp = markov();
        let v = sp.v_fields();
        assert_eq!(hamiltonian_field(&Poly::x(), &sp).c, v[0]);
        assert_eq!(hamiltonian_field(&Poly::z(), &sp).c, v[2]);
        assert!(hamiltonian_field(&Poly::int(7), &sp).is_zero());
        let hx = hamiltonian_field(&Poly::x(), &sp);
        assert_eq!(hamiltonian_field(&p("x^2"), &sp), hx.mul_poly(&p("2*x")));
    }

    #[test]
    fn field_acts_as_bracket() {
        let sp = SurfaceParams::from_ints(1, 2, 3, 4, -2).unwrap();
        let f = p("x*y^2 - z^3 + 2");
        let g = p("x^2*z + y");
        assert_eq!(hamiltonian_field(&f, &sp).apply(&g), bracket_raw(&f, &g, &sp));
        assert!(hamiltonian_field(&f, &sp).is_tangent(&sp));
    }

    #[test]
    fn casimir_examples() {
        let sp = markov();
        assert!(casimir_check(&Poly::x(), &sp).is_zero());
        assert!(casimir_check(&sp.defining_poly(), &sp).is_zero());
        assert!(casimir_check(&p("x^2*y*z^3"), &sp).is_zero());
    }

    #[test]
    fn table_matches_determinant() {
        let sp = SurfaceParams::from_ints(3, 0, -1, 2, 5).unwrap();
        let t = BracketTable::new(&sp);
        let f = p("x^2*y - 3*z^2 + x*y*z");
        let g = p("y^3 + 1/2*x*z");
        assert_eq!(t.extend(&f, &g), bracket_raw(&f, &g, &sp));
    }
}
