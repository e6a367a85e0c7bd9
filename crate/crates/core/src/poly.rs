//! Exact polynomials in `x, y, z` over the rationals.
//!
//! Terms are kept in graded-lex order with `x > y > z`; the canonical text
//! form lists them ascending, e.g. `2*z^1-3*x^1*y^1`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::num::{rat, BigComplex};
use crate::surface::SurfaceParams;

/// Exponent triple `x^i y^j z^k`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Mono(pub [u32; 3]);

impl Mono {
    pub const ONE: Mono = Mono([0, 0, 0]);

    pub fn new(i: u32, j: u32, k: u32) -> Self {
        Mono([i, j, k])
    }

    pub fn deg(&self) -> u32 {
        self.0[0] + self.0[1] + self.0[2]
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        Mono([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }

    pub fn divides(&self, o: &Mono) -> bool {
        (0..3).all(|v| self.0[v] <= o.0[v])
    }

    pub fn div(&self, o: &Mono) -> Option<Mono> {
        if o.divides(self) {
            Some(Mono([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]]))
        } else {
            None
        }
    }
}

impl Ord for Mono {
    fn cmp(&self, o: &Self) -> Ordering {
        self.deg()
            .cmp(&o.deg())
            .then(self.0[0].cmp(&o.0[0]))
            .then(self.0[1].cmp(&o.0[1]))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Sparse polynomial; never stores a zero coefficient.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct Poly {
    terms: BTreeMap<Mono, BigRational>,
}

/// A polynomial already reduced modulo the surface ideal (z-degree at most 1).
#[derive(Clone, PartialEq, Eq, Default, Hash, Debug)]
pub struct NormalPoly(Poly);

impl NormalPoly {
    pub fn as_poly(&self) -> &Poly {
        &self.0
    }

    pub fn into_poly(self) -> Poly {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Display for NormalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::term(c, Mono::ONE)
    }

    pub fn int(c: i64) -> Self {
        Self::constant(rat::int(c))
    }

    pub fn term(c: BigRational, m: Mono) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn mono(i: u32, j: u32, k: u32) -> Self {
        Self::term(BigRational::one(), Mono::new(i, j, k))
    }

    pub fn x() -> Self {
        Self::mono(1, 0, 0)
    }

    pub fn y() -> Self {
        Self::mono(0, 1, 0)
    }

    pub fn z() -> Self {
        Self::mono(0, 0, 1)
    }

    /// Coordinate function for variable index 0,1,2.
    pub fn var(v: usize) -> Self {
        let mut e = [0; 3];
        e[v] = 1;
        Self::term(BigRational::one(), Mono(e))
    }

    pub fn add_term(&mut self, m: Mono, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Mono) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Largest monomial in graded-lex order.
    pub fn leading(&self) -> Option<(&Mono, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.deg()).max()
    }

    pub fn deg_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0)
    }

    /// Lowest total degree present.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.deg()).min()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| *m == Mono::ONE)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(&Mono::ONE)
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, -c);
        }
        r
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect() }
    }

    pub fn scale_i(&self, k: i64) -> Self {
        self.scale(&rat::int(k))
    }

    pub fn mul_mono(&self, m: &Mono) -> Self {
        Self { terms: self.terms.iter().map(|(n, c)| (n.mul(m), c.clone())).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(m1.mul(m2), c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative in variable 0,1,2.
    pub fn diff(&self, v: usize) -> Self {
        let mut r = Self::zero();
        for (m, c) in &self.terms {
            let e = m.0[v];
            if e == 0 {
                continue;
            }
            let mut n = *m;
            n.0[v] -= 1;
            r.add_term(n, c * rat::int(e as i64));
        }
        r
    }

    pub fn grad(&self) -> [Poly; 3] {
        [self.diff(0), self.diff(1), self.diff(2)]
    }

    /// Substitutes polynomials for `x, y, z`.
    pub fn compose(&self, s: &[Poly; 3]) -> Self {
        let mut cache: [Vec<Poly>; 3] = [vec![Poly::one()], vec![Poly::one()], vec![Poly::one()]];
        let mut r = Self::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for v in 0..3 {
                let e = m.0[v] as usize;
                while cache[v].len() <= e {
                    let next = cache[v].last().unwrap().mul(&s[v]);
                    cache[v].push(next);
                }
                t = t.mul(&cache[v][e]);
            }
            r = r.add(&t);
        }
        r
    }

    /// Drops all terms of total degree above `d`.
    pub fn truncate(&self, d: u32) -> Self {
        Self { terms: self.terms.iter().filter(|(m, _)| m.deg() <= d).map(|(m, c)| (*m, c.clone())).collect() }
    }

    /// Homogeneous part of degree `d`.
    pub fn homogeneous(&self, d: u32) -> Self {
        Self { terms: self.terms.iter().filter(|(m, _)| m.deg() == d).map(|(m, c)| (*m, c.clone())).collect() }
    }

    pub fn eval_rational(&self, p: &[BigRational; 3]) -> BigRational {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for v in 0..3 {
                for _ in 0..m.0[v] {
                    t *= &p[v];
                }
            }
            acc += t;
        }
        acc
    }

    /// Numeric evaluation at the precision of the point.
    pub fn eval(&self, p: &[BigComplex; 3]) -> BigComplex {
        let prec = p.iter().map(|c| c.prec()).max().unwrap_or(64);
        let mut pw: [Vec<BigComplex>; 3] = Default::default();
        for v in 0..3 {
            let d = self.deg_in(v) as usize;
            pw[v].push(BigComplex::one(prec));
            for e in 1..=d {
                let next = &pw[v][e - 1] * &p[v];
                pw[v].push(next);
            }
        }
        let mut acc = BigComplex::zero(prec);
        for (m, c) in &self.terms {
            let mut t = BigComplex::from_rational(c, prec);
            for v in 0..3 {
                if m.0[v] > 0 {
                    t = &t * &pw[v][m.0[v] as usize];
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    pub fn eval_f64(&self, p: [f64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| rat::to_f64(c) * p[0].powi(m.0[0] as i32) * p[1].powi(m.0[1] as i32) * p[2].powi(m.0[2] as i32))
            .sum()
    }

    /// Normal form modulo the surface ideal: `z^2 -> Ax+By+Cz+D-x^2-y^2-Exyz`.
    pub fn reduce(&self, sp: &SurfaceParams) -> NormalPoly {
        let z2 = sp.z_squared();
        let mut cur = self.clone();
        loop {
            let kmax = cur.deg_in(2);
            if kmax < 2 {
                return NormalPoly(cur);
            }
            let mut next = Poly::zero();
            for (m, c) in cur.terms {
                if m.0[2] == kmax {
                    let base = Mono([m.0[0], m.0[1], m.0[2] - 2]);
                    for (n, d) in &z2.terms {
                        next.add_term(base.mul(n), &c * d);
                    }
                } else {
                    next.add_term(m, c);
                }
            }
            cur = next;
        }
    }

    /// Wraps a polynomial already known to be reduced.
    pub fn into_normal(self) -> Option<NormalPoly> {
        if self.deg_in(2) <= 1 {
            Some(NormalPoly(self))
        } else {
            None
        }
    }

    /// Exact division by a monomial, if every term is divisible.
    pub fn div_mono(&self, m: &Mono) -> Option<Self> {
        let mut r = Self::zero();
        for (n, c) in &self.terms {
            r.add_term(n.div(m)?, c.clone());
        }
        Some(r)
    }

    /// Univariate coefficient list in variable `v` (panics if other variables occur).
    pub fn univariate(&self, v: usize) -> Option<Vec<BigRational>> {
        let mut out = vec![BigRational::zero(); self.deg_in(v) as usize + 1];
        for (m, c) in &self.terms {
            if (0..3).any(|u| u != v && m.0[u] != 0) {
                return None;
            }
            out[m.0[v] as usize] = c.clone();
        }
        Some(out)
    }

    /// Variables that actually occur.
    pub fn vars(&self) -> [bool; 3] {
        let mut o = [false; 3];
        for m in self.terms.keys() {
            for v in 0..3 {
                o[v] |= m.0[v] > 0;
            }
        }
        o
    }

    /// Parses the canonical text form (and ordinary infix input).
    pub fn parse(s: &str) -> Result<Self, Error> {
        let toks = lex(s)?;
        let mut p = Parser { toks: &toks, pos: 0 };
        let r = p.expr()?;
        if p.pos != toks.len() {
            return Err(Error::Parse(format!("unexpected token at position {} in {:?}", p.pos, s)));
        }
        Ok(r)
    }

    pub fn max_abs_coeff(&self) -> BigRational {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(BigRational::zero)
    }

    pub fn lcm_denominator(&self) -> BigInt {
        use num_integer::Integer;
        self.terms.values().fold(BigInt::one(), |a, c| a.lcm(c.denom()))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = ["x", "y", "z"];
        for (n, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if neg {
                write!(f, "-")?;
            } else if n > 0 {
                write!(f, "+")?;
            }
            write!(f, "{}", rat::fmt(&c.abs()))?;
            for v in 0..3 {
                if m.0[v] > 0 {
                    write!(f, "*{}^{}", names[v], m.0[v])?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Var(usize),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>, Error> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            let lit: String = cs[st..i].iter().collect();
            let q = rat::parse_decimal(&lit).ok_or_else(|| Error::Parse(format!("bad number {:?}", lit)))?;
            out.push(Tok::Num(q));
        } else if let Some(v) = "xyz".find(c) {
            out.push(Tok::Var(v));
            i += 1;
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {:?} in {:?}", c, s)));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly, Error> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, Error> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat('/') {
                let d = self.unary()?;
                if !d.is_constant() || d.is_zero() {
                    return Err(Error::Parse("division only by nonzero constants".into()));
                }
                acc = acc.scale(&d.constant_term().recip());
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, Error> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Poly, Error> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Num(q)) if q.is_integer() && !q.is_negative() => {
                    self.pos += 1;
                    let e: u32 = q.to_integer().try_into().map_err(|_| Error::Parse("exponent too large".into()))?;
                    return Ok(base.pow(e));
                }
                _ => return Err(Error::Parse("exponent must be a non-negative integer".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, Error> {
        match self.peek().cloned() {
            Some(Tok::Num(q)) => {
                self.pos += 1;
                Ok(Poly::constant(q))
            }
            Some(Tok::Var(v)) => {
                self.pos += 1;
                Ok(Poly::var(v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            t => Err(Error::Parse(format!("unexpected token {:?}", t))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn markov() -> SurfaceParams {
        SurfaceParams::markov()
    }

    #[test]
    fn canonical_order_and_format() {
        let p = Poly::parse("x^2 + x*y + x*z + y^2 + y*z + z^2 + z + y + x + 1").unwrap();
        assert_eq!(
            p.to_string(),
            "1+1*z^1+1*y^1+1*x^1+1*z^2+1*y^1*z^1+1*y^2+1*x^1*z^1+1*x^1*y^1+1*x^2"
        );
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!(Poly::parse("-3/2*x*y + 2*z").unwrap().to_string(), "2*z^1-3/2*x^1*y^1");
    }

    #[test]
    fn parse_roundtrip() {
        let p = Poly::parse("(x - 2*y)^3 - 7/3*z^4 + 0.5").unwrap();
        assert_eq!(Poly::parse(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn parse_errors() {
        assert!(Poly::parse("x^-1").is_err());
        assert!(Poly::parse("x/y").is_err());
        assert!(Poly::parse("w").is_err());
        assert!(Poly::parse("(x").is_err());
    }

    #[test]
    fn reduce_z_squared_markov() {
        let r = Poly::z().pow(2).reduce(&markov());
        assert_eq!(r.as_poly(), &Poly::parse("3*x*y*z - x^2 - y^2").unwrap());
    }

    #[test]
    fn reduce_leaves_z_free() {
        let p = Poly::parse("x^3*y").unwrap();
        assert_eq!(p.reduce(&markov()).into_poly(), p);
    }

    #[test]
    fn reduce_z_cubed_markov() {
        // z^3 = z(3xyz - x^2 - y^2) = 3xy z^2 - x^2 z - y^2 z
        let want = Poly::parse("3*x*y*(3*x*y*z - x^2 - y^2) - x^2*z - y^2*z").unwrap();
        assert_eq!(Poly::z().pow(3).reduce(&markov()).into_poly(), want);
    }

    #[test]
    fn diff_and_compose() {
        let p = Poly::parse("x^2*y + 3*z").unwrap();
        assert_eq!(p.diff(0), Poly::parse("2*x*y").unwrap());
        let s = [Poly::parse("x+1").unwrap(), Poly::y(), Poly::z()];
        assert_eq!(p.compose(&s), Poly::parse("(x+1)^2*y + 3*z").unwrap());
    }

    #[test]
    fn eval_markov_triples() {
        let p = markov().defining_poly();
        for t in [[1, 1, 1], [1, 2, 5], [2, 5, 29]] {
            let pt = t.map(|v| BigComplex::from_i64(v, 128));
            assert!(p.eval(&pt).is_zero());
        }
        assert!(Poly::zero().eval(&[0, 0, 0].map(|v| BigComplex::from_i64(v, 64))).is_zero());
    }
}
