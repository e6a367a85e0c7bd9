//! Arbitrary-precision real and complex scalars.
//!
//! Thin wrappers over `astro_float::BigFloat`. Every value carries its own
//! working precision in bits; binary operations run at the larger of the two.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_cc<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Real number with explicit binary precision.
#[derive(Clone)]
pub struct BigReal {
    v: BigFloat,
    prec: usize,
}

impl BigReal {
    pub fn zero(prec: usize) -> Self {
        Self { v: BigFloat::from_i64(0, prec), prec }
    }

    pub fn one(prec: usize) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(i: i64, prec: usize) -> Self {
        Self { v: BigFloat::from_i64(i, prec), prec }
    }

    pub fn from_f64(f: f64, prec: usize) -> Self {
        Self { v: BigFloat::from_f64(f, prec), prec }
    }

    pub fn from_bigint(i: &BigInt, prec: usize) -> Self {
        if let Some(s) = i.to_i64() {
            return Self::from_i64(s, prec);
        }
        Self::parse_dec(&i.to_string(), prec).expect("integer literal")
    }

    pub fn from_rational(q: &BigRational, prec: usize) -> Self {
        let n = Self::from_bigint(q.numer(), prec + 64);
        let d = Self::from_bigint(q.denom(), prec + 64);
        let mut r = n.div(&d);
        r.set_prec(prec);
        r
    }

    /// Parses a decimal literal (`-1.25e-3`, `17`, `3/4`).
    pub fn parse_dec(s: &str, prec: usize) -> Option<Self> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let q = BigRational::new(a.trim().parse().ok()?, b.trim().parse().ok()?);
            return Some(Self::from_rational(&q, prec));
        }
        if s.is_empty() {
            return None;
        }
        let v = with_cc(|cc| BigFloat::parse(s, Radix::Dec, prec, RM, cc));
        if v.is_nan() || v.is_inf() {
            return None;
        }
        Some(Self { v, prec })
    }

    pub fn pi(prec: usize) -> Self {
        Self { v: with_cc(|cc| cc.pi(prec, RM)), prec }
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn set_prec(&mut self, prec: usize) {
        let _ = self.v.set_precision(prec, RM);
        self.prec = prec;
    }

    pub fn with_prec(mut self, prec: usize) -> Self {
        self.set_prec(prec);
        self
    }

    fn wrap(v: BigFloat, prec: usize) -> Self {
        Self { v, prec }
    }

    fn p2(&self, o: &Self) -> usize {
        self.prec.max(o.prec)
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.p2(o);
        Self::wrap(self.v.add(&o.v, p, RM), p)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let p = self.p2(o);
        Self::wrap(self.v.sub(&o.v, p, RM), p)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.p2(o);
        Self::wrap(self.v.mul(&o.v, p, RM), p)
    }

    pub fn div(&self, o: &Self) -> Self {
        let p = self.p2(o);
        Self::wrap(self.v.div(&o.v, p, RM), p)
    }

    pub fn neg(&self) -> Self {
        Self::wrap((&self.v).neg(), self.prec)
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.v.abs(), self.prec)
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.v.sqrt(self.prec, RM), self.prec)
    }

    pub fn exp(&self) -> Self {
        Self::wrap(with_cc(|cc| self.v.exp(self.prec, RM, cc)), self.prec)
    }

    pub fn ln(&self) -> Self {
        Self::wrap(with_cc(|cc| self.v.ln(self.prec, RM, cc)), self.prec)
    }

    pub fn sin(&self) -> Self {
        Self::wrap(with_cc(|cc| self.v.sin(self.prec, RM, cc)), self.prec)
    }

    pub fn cos(&self) -> Self {
        Self::wrap(with_cc(|cc| self.v.cos(self.prec, RM, cc)), self.prec)
    }

    pub fn sinh(&self) -> Self {
        Self::wrap(with_cc(|cc| self.v.sinh(self.prec, RM, cc)), self.prec)
    }

    pub fn cosh(&self) -> Self {
        Self::wrap(with_cc(|cc| self.v.cosh(self.prec, RM, cc)), self.prec)
    }

    pub fn atan(&self) -> Self {
        Self::wrap(with_cc(|cc| self.v.atan(self.prec, RM, cc)), self.prec)
    }

    /// Four-quadrant arctangent of `self / x` in `(-pi, pi]`.
    pub fn atan2(&self, x: &Self) -> Self {
        let p = self.p2(x);
        if x.is_zero() {
            if self.is_zero() {
                return Self::zero(p);
            }
            let h = Self::pi(p).div(&Self::from_i64(2, p));
            return if self.is_negative() { h.neg() } else { h };
        }
        let a = self.div(x).atan();
        if x.is_positive() {
            a
        } else if self.is_negative() {
            a.sub(&Self::pi(p))
        } else {
            a.add(&Self::pi(p))
        }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        self.mul(&Self::from_i64(k, self.prec))
    }

    pub fn powi(&self, n: usize) -> Self {
        Self::wrap(self.v.powi(n, self.prec, RM), self.prec)
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        !self.v.is_zero() && self.v.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        !self.v.is_zero() && self.v.is_positive()
    }

    pub fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }

    pub fn cmp_total(&self, o: &Self) -> Ordering {
        match self.v.cmp(&o.v) {
            Some(c) if c < 0 => Ordering::Less,
            Some(c) if c > 0 => Ordering::Greater,
            _ => Ordering::Equal,
        }
    }

    pub fn max(&self, o: &Self) -> Self {
        if self.cmp_total(o) == Ordering::Less {
            o.clone()
        } else {
            self.clone()
        }
    }

    /// Binary exponent `e` with `2^(e-1) <= |self| < 2^e`; `None` for zero.
    pub fn exponent(&self) -> Option<i64> {
        if self.v.is_zero() {
            None
        } else {
            self.v.exponent().map(|e| e as i64)
        }
    }

    /// Nearest `f64`; saturates to `±inf` / `0` outside the double range.
    pub fn to_f64(&self) -> f64 {
        if self.v.is_zero() {
            return 0.0;
        }
        if self.v.is_nan() {
            return f64::NAN;
        }
        if self.v.is_inf() {
            return if self.v.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        let Some((m, _, s, e, _)) = self.v.as_raw_parts() else {
            return f64::NAN;
        };
        let wbits = (std::mem::size_of::<astro_float::Word>() * 8) as i32;
        // at least 64 leading bits, whatever the word size
        let mut f = 0.0;
        let mut scale = 1.0;
        for w in m.iter().rev().take((64 / wbits).max(1) as usize) {
            scale *= 2f64.powi(-wbits);
            f += *w as f64 * scale;
        }
        let e = e as i64;
        if e > 1100 {
            f = f64::INFINITY;
        } else if e < -1100 {
            f = 0.0;
        } else {
            f *= 2f64.powi(e as i32);
        }
        if s == Sign::Neg {
            -f
        } else {
            f
        }
    }

    /// log2 of the magnitude, defined for arbitrarily large exponents.
    pub fn log2_abs(&self) -> f64 {
        match self.exponent() {
            None => f64::NEG_INFINITY,
            Some(e) => {
                let m = self.abs();
                let mut s = m.clone();
                s.v.set_exponent(0);
                s.to_f64().log2() + e as f64
            }
        }
    }

    /// Decimal string with all significant digits of the working precision.
    pub fn to_dec_string(&self) -> String {
        if self.v.is_zero() {
            return "0".into();
        }
        with_cc(|cc| self.v.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".into())
    }

    /// Decimal string rounded to `digits` significant digits.
    pub fn to_sci(&self, digits: usize) -> String {
        if self.v.is_zero() {
            return "0".into();
        }
        let bits = ((digits as f64) * std::f64::consts::LOG2_10).ceil() as usize + 4;
        let mut r = self.clone();
        r.set_prec(bits.max(8));
        r.to_dec_string()
    }

    /// Exact conversion to a rational (the binary value is always dyadic).
    pub fn to_rational(&self) -> BigRational {
        if self.v.is_zero() {
            return BigRational::zero();
        }
        let Some((m, _, s, e, _)) = self.v.as_raw_parts() else {
            return BigRational::zero();
        };
        let wbits = std::mem::size_of::<astro_float::Word>() * 8;
        let mut n = BigInt::zero();
        for w in m.iter().rev() {
            n = (n << wbits) + BigInt::from(*w as u64);
        }
        let shift = e as i64 - (m.len() * wbits) as i64;
        let mut q = BigRational::from_integer(n);
        if shift >= 0 {
            q *= BigRational::from_integer(BigInt::from(1) << (shift as usize));
        } else {
            q /= BigRational::from_integer(BigInt::from(1) << ((-shift) as usize));
        }
        if s == Sign::Neg {
            -q
        } else {
            q
        }
    }

    /// Nearest rational with denominator at most `max_den` (continued fractions).
    pub fn to_rational_approx(&self, max_den: &BigInt) -> BigRational {
        let x = self.to_rational();
        best_rational(&x, max_den)
    }

    pub fn floor_bigint(&self) -> BigInt {
        let q = self.to_rational();
        q.floor().to_integer()
    }
}

/// Best rational approximation of `x` with denominator `<= max_den`.
pub fn best_rational(x: &BigRational, max_den: &BigInt) -> BigRational {
    use num_traits::One;
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut r = x.clone();
    loop {
        let a = r.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if &q2 > max_den {
            break;
        }
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = &r - BigRational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        r = frac.recip();
    }
    if q1.is_zero() {
        return BigRational::from_integer(x.floor().to_integer());
    }
    BigRational::new(p1, q1)
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci(20))
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dec_string())
    }
}

impl PartialEq for BigReal {
    fn eq(&self, o: &Self) -> bool {
        self.cmp_total(o) == Ordering::Equal
    }
}

/// Complex number; both parts share one precision.
#[derive(Clone, PartialEq)]
pub struct BigComplex {
    pub re: BigReal,
    pub im: BigReal,
}

impl BigComplex {
    pub fn new(re: BigReal, im: BigReal) -> Self {
        let p = re.prec.max(im.prec);
        Self { re: re.with_prec(p), im: im.with_prec(p) }
    }

    pub fn zero(prec: usize) -> Self {
        Self { re: BigReal::zero(prec), im: BigReal::zero(prec) }
    }

    pub fn one(prec: usize) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn i(prec: usize) -> Self {
        Self { re: BigReal::zero(prec), im: BigReal::one(prec) }
    }

    pub fn from_real(re: BigReal) -> Self {
        let p = re.prec;
        Self { re, im: BigReal::zero(p) }
    }

    pub fn from_i64(i: i64, prec: usize) -> Self {
        Self::from_real(BigReal::from_i64(i, prec))
    }

    pub fn from_f64(f: f64, prec: usize) -> Self {
        Self::from_real(BigReal::from_f64(f, prec))
    }

    pub fn from_f64_pair(re: f64, im: f64, prec: usize) -> Self {
        Self { re: BigReal::from_f64(re, prec), im: BigReal::from_f64(im, prec) }
    }

    pub fn from_rational(q: &BigRational, prec: usize) -> Self {
        Self::from_real(BigReal::from_rational(q, prec))
    }

    pub fn prec(&self) -> usize {
        self.re.prec.max(self.im.prec)
    }

    pub fn with_prec(self, prec: usize) -> Self {
        Self { re: self.re.with_prec(prec), im: self.im.with_prec(prec) }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn norm_sqr(&self) -> BigReal {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn abs(&self) -> BigReal {
        self.norm_sqr().sqrt()
    }

    /// Cheap magnitude as f64 (may saturate).
    pub fn abs_f64(&self) -> f64 {
        let a = self.re.to_f64();
        let b = self.im.to_f64();
        if a.is_finite() && b.is_finite() {
            a.hypot(b)
        } else {
            self.log2_abs().exp2()
        }
    }

    pub fn log2_abs(&self) -> f64 {
        self.re.log2_abs().max(self.im.log2_abs()) + 0.5 * {
            let a = self.re.log2_abs();
            let b = self.im.log2_abs();
            let (hi, lo) = if a > b { (a, b) } else { (b, a) };
            if hi.is_infinite() {
                0.0
            } else {
                (1.0 + (2f64).powf(2.0 * (lo - hi))).log2()
            }
        }
    }

    pub fn arg(&self) -> BigReal {
        self.im.atan2(&self.re)
    }

    pub fn scale(&self, r: &BigReal) -> Self {
        Self { re: self.re.mul(r), im: self.im.mul(r) }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        Self { re: self.re.mul_i64(k), im: self.im.mul_i64(k) }
    }

    pub fn mul_i(&self) -> Self {
        Self { re: self.im.neg(), im: self.re.clone() }
    }

    pub fn recip(&self) -> Self {
        let d = self.norm_sqr();
        Self { re: self.re.div(&d), im: self.im.neg().div(&d) }
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one(self.prec());
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// Principal square root (branch cut on the negative real axis).
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return Self::zero(p);
        }
        let r = self.abs();
        let two = BigReal::from_i64(2, p);
        if !self.re.is_negative() {
            let s = r.add(&self.re).div(&two).sqrt();
            let im = self.im.div(&s.mul_i64(2));
            Self { re: s, im }
        } else {
            let t = r.sub(&self.re).div(&two).sqrt();
            let re = self.im.abs().div(&t.mul_i64(2));
            let im = if self.im.is_negative() { t.neg() } else { t };
            Self { re, im }
        }
    }

    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        Self { re: m.mul(&self.im.cos()), im: m.mul(&self.im.sin()) }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        Self { re: self.abs().ln(), im: self.arg() }
    }

    pub fn cos(&self) -> Self {
        Self {
            re: self.re.cos().mul(&self.im.cosh()),
            im: self.re.sin().mul(&self.im.sinh()).neg(),
        }
    }

    pub fn sin(&self) -> Self {
        Self {
            re: self.re.sin().mul(&self.im.cosh()),
            im: self.re.cos().mul(&self.im.sinh()),
        }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// `"re"` if the imaginary part is zero, else `"re+imi"` / `"re-imi"`.
    pub fn to_dec_string(&self) -> String {
        fmt_complex(&self.re.to_dec_string(), &self.im, |r| r.to_dec_string())
    }

    pub fn to_sci(&self, digits: usize) -> String {
        fmt_complex(&self.re.to_sci(digits), &self.im, |r| r.to_sci(digits))
    }

    /// Parses `"a"`, `"a+bi"`, `"a-bi"`, `"bi"`; parts may be `p/q` rationals.
    pub fn parse(s: &str, prec: usize) -> Option<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return None;
        }
        if let Some(body) = t.strip_suffix('i') {
            // split at the last sign that is not part of an exponent
            let bytes = body.as_bytes();
            let mut cut = None;
            for k in (1..bytes.len()).rev() {
                let c = bytes[k];
                if (c == b'+' || c == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                    cut = Some(k);
                    break;
                }
            }
            let (re, im) = match cut {
                Some(k) => (&body[..k], &body[k..]),
                None => ("0", body),
            };
            let im = match im {
                "" | "+" => "1",
                "-" => "-1",
                x => x.strip_prefix('+').unwrap_or(x),
            };
            return Some(Self::new(BigReal::parse_dec(re, prec)?, BigReal::parse_dec(im, prec)?));
        }
        Some(Self::from_real(BigReal::parse_dec(&t, prec)?))
    }
}

fn fmt_complex(re: &str, im: &BigReal, f: impl Fn(&BigReal) -> String) -> String {
    if im.is_zero() {
        return re.to_string();
    }
    if im.is_negative() {
        format!("{}-{}i", re, f(&im.neg()))
    } else {
        format!("{}+{}i", re, f(im))
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci(20))
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dec_string())
    }
}

impl<'a> Add<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn add(self, o: &BigComplex) -> BigComplex {
        BigComplex { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }
}

impl<'a> Sub<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn sub(self, o: &BigComplex) -> BigComplex {
        BigComplex { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }
}

impl<'a> Mul<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn mul(self, o: &BigComplex) -> BigComplex {
        if self.im.is_zero() && o.im.is_zero() {
            let p = self.prec().max(o.prec());
            return BigComplex { re: self.re.mul(&o.re), im: BigReal::zero(p) };
        }
        BigComplex {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }
}

impl<'a> Div<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn div(self, o: &BigComplex) -> BigComplex {
        if o.im.is_zero() {
            return BigComplex { re: self.re.div(&o.re), im: self.im.div(&o.re) };
        }
        let d = o.norm_sqr();
        let n = self * &o.conj();
        BigComplex { re: n.re.div(&d), im: n.im.div(&d) }
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex { re: self.re.neg(), im: self.im.neg() }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, o: BigComplex) -> BigComplex {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, o: &BigComplex) -> BigComplex {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<BigComplex> for &'a BigComplex {
            type Output = BigComplex;
            fn $m(self, o: BigComplex) -> BigComplex {
                self.$m(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
owned_ops!(Div, div);

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        -&self
    }
}

/// Rational helpers shared by the exact modules.
pub mod rat {
    use super::*;
    use num_traits::One;

    pub fn int(i: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(i))
    }

    pub fn frac(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// `"n"` or `"n/d"`.
    pub fn fmt(q: &BigRational) -> String {
        if q.denom().is_one() {
            q.numer().to_string()
        } else {
            format!("{}/{}", q.numer(), q.denom())
        }
    }

    pub fn parse(s: &str) -> Option<BigRational> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let d: BigInt = b.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            return Some(BigRational::new(a.trim().parse().ok()?, d));
        }
        if let Ok(i) = s.parse::<BigInt>() {
            return Some(BigRational::from_integer(i));
        }
        parse_decimal(s)
    }

    /// Exact value of a finite decimal literal such as `-1.25e-3`.
    pub fn parse_decimal(s: &str) -> Option<BigRational> {
        let (mant, exp) = match s.find(['e', 'E']) {
            Some(k) => (&s[..k], s[k + 1..].parse::<i64>().ok()?),
            None => (s, 0),
        };
        let (neg, mant) = match mant.strip_prefix('-') {
            Some(m) => (true, m),
            None => (false, mant.strip_prefix('+').unwrap_or(mant)),
        };
        let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
        if ip.is_empty() && fp.is_empty() {
            return None;
        }
        if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits: BigInt = format!("0{}{}", ip, fp).parse().ok()?;
        let e = exp - fp.len() as i64;
        let ten = BigInt::from(10);
        let mut q = BigRational::from_integer(digits);
        if e >= 0 {
            q *= BigRational::from_integer(num_traits::pow(ten, e as usize));
        } else {
            q /= BigRational::from_integer(num_traits::pow(ten, (-e) as usize));
        }
        Some(if neg { -q } else { q })
    }

    pub fn abs(q: &BigRational) -> BigRational {
        q.abs()
    }

    pub fn to_f64(q: &BigRational) -> f64 {
        BigReal::from_rational(q, 64).to_f64()
    }

    pub fn is_int(q: &BigRational) -> bool {
        q.denom().is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_branch() {
        let z = BigComplex::from_i64(-4, 128);
        let r = z.sqrt();
        assert!(r.re.to_f64().abs() < 1e-30);
        assert!((r.im.to_f64() - 2.0).abs() < 1e-30);
        let w = BigComplex::from_f64_pair(-4.0, -0.0, 128);
        assert!(w.sqrt().im.to_f64() > 0.0 || w.im.is_zero());
    }

    #[test]
    fn exp_ln_roundtrip() {
        let z = BigComplex::from_f64_pair(0.3, -2.5, 256);
        let back = z.ln().exp();
        assert!((&back - &z).abs_f64() < 1e-70);
    }

    #[test]
    fn trig_identity() {
        let z = BigComplex::from_f64_pair(1.7, 0.9, 256);
        let s = z.sin();
        let c = z.cos();
        let one = &(&s * &s) + &(&c * &c);
        assert!((&one - &BigComplex::one(256)).abs_f64() < 1e-70);
    }

    #[test]
    fn parse_complex() {
        let z = BigComplex::parse("1.5-2e-3i", 128).unwrap();
        assert_eq!(z.to_f64_pair(), (1.5, -0.002));
        let w = BigComplex::parse("-i", 64).unwrap();
        assert_eq!(w.to_f64_pair(), (0.0, -1.0));
        let q = BigComplex::parse("3/4", 64).unwrap();
        assert_eq!(q.to_f64_pair(), (0.75, 0.0));
    }

    #[test]
    fn to_rational_exact() {
        let r = BigReal::from_f64(-0.375, 64);
        assert_eq!(r.to_rational(), rat::frac(-3, 8));
        let big = BigReal::from_i64(1 << 40, 64).mul(&BigReal::from_i64(3, 64));
        assert_eq!(big.to_rational(), rat::int(3 << 40));
    }

    #[test]
    fn best_rational_recovers() {
        let x = BigReal::from_rational(&rat::frac(22, 7), 200);
        assert_eq!(x.to_rational_approx(&BigInt::from(1000)), rat::frac(22, 7));
    }

    #[test]
    fn decimal_literals() {
        assert_eq!(rat::parse_decimal("-1.25e-3").unwrap(), rat::frac(-1, 800));
        assert_eq!(rat::parse("7/-14").unwrap(), rat::frac(-1, 2));
    }

    #[test]
    fn log2_of_huge() {
        let r = BigReal::from_i64(2, 128).powi(5000);
        assert!((r.log2_abs() - 5000.0).abs() < 1e-9);
    }
}
