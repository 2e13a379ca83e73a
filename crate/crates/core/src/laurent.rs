//! Truncated Laurent series over a prime field.
//!
//! A [`LaurentSeries`] is an element of `K = F_p((π))` known modulo
//! `π^prec`. Coefficients at exponents `>= prec` are unknown; everything
//! below is exact. Zero is never exact: it is always "zero up to `prec`".

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("modulus {0} is not prime")]
    NotPrime(u32),
    #[error("p = 2 is not supported; an odd prime is required")]
    EvenPrime,
    #[error("modulus {0} is too large")]
    ModulusTooLarge(u32),
    #[error("precision {prec} must exceed the valuation {val}")]
    PrecisionBelowValuation { val: i64, prec: i64 },
    #[error("moduli differ: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("cannot invert a series that is zero to precision {0}")]
    ZeroDivision(i64),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("cannot parse series: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, SeriesError>;

/// Largest modulus accepted; products of residues must fit in a `u64`.
pub const MAX_MODULUS: u32 = 1 << 31;

/// Checks that `p` is an odd prime within range.
pub fn check_prime(p: u32) -> Result<()> {
    if p == 2 {
        return Err(SeriesError::EvenPrime);
    }
    if p > MAX_MODULUS {
        return Err(SeriesError::ModulusTooLarge(p));
    }
    if p < 2 || (2..).take_while(|d: &u32| (*d as u64) * (*d as u64) <= p as u64).any(|d| p.is_multiple_of(d)) {
        return Err(SeriesError::NotPrime(p));
    }
    Ok(())
}

pub(crate) fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

pub(crate) fn pow_mod(mut base: u32, mut exp: u64, p: u32) -> u32 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue modulo the prime `p`.
pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, (p - 2) as u64, p)
}

pub(crate) fn reduce_i64(v: i64, p: u32) -> u32 {
    v.rem_euclid(p as i64) as u32
}

/// An element of the prime field `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u32,
    value: u32,
}

impl Fp {
    pub fn new(p: u32, value: i64) -> Result<Self> {
        check_prime(p)?;
        Ok(Fp { p, value: reduce_i64(value, p) })
    }

    pub(crate) fn raw(p: u32, value: u32) -> Self {
        Fp { p, value: value % p }
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, exp: u64) -> Self {
        Fp { p: self.p, value: pow_mod(self.value, exp, self.p) }
    }

    pub fn inv(self) -> Option<Self> {
        (self.value != 0).then(|| Fp { p: self.p, value: inv_mod(self.value, self.p) })
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        assert_eq!(self.p, rhs.p, "modulus mismatch");
        Fp { p: self.p, value: ((self.value as u64 + rhs.value as u64) % self.p as u64) as u32 }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        self + (-rhs)
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp { p: self.p, value: (self.p - self.value) % self.p }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        assert_eq!(self.p, rhs.p, "modulus mismatch");
        Fp { p: self.p, value: mul_mod(self.value, rhs.value, self.p) }
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A Laurent series in `π` over `F_p`, truncated at `π^prec`.
///
/// Normal form: `coeffs[0]` is the (nonzero) coefficient of `π^val`, there
/// are no trailing zeros, and every stored exponent is below `prec`. The
/// zero series has no coefficients and stores `val == prec`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentSeries {
    p: u32,
    val: i64,
    coeffs: Vec<u32>,
    prec: i64,
}

impl LaurentSeries {
    /// Builds `Σ coeffs[i] π^(val+i) + O(π^prec)`.
    ///
    /// Leading zero coefficients are skipped and coefficients at or above
    /// `prec` are dropped.
    pub fn new(p: u32, val: i64, coeffs: &[Fp], prec: i64) -> Result<Self> {
        check_prime(p)?;
        if let Some(c) = coeffs.iter().find(|c| c.p != p) {
            return Err(SeriesError::ModulusMismatch(p, c.p));
        }
        Self::from_residues(p, val, coeffs.iter().map(|c| c.value).collect(), prec)
    }

    /// Like [`LaurentSeries::new`] but with raw integer coefficients reduced mod `p`.
    pub fn from_ints(p: u32, val: i64, coeffs: &[i64], prec: i64) -> Result<Self> {
        check_prime(p)?;
        Self::from_residues(p, val, coeffs.iter().map(|&c| reduce_i64(c, p)).collect(), prec)
    }

    fn from_residues(p: u32, val: i64, coeffs: Vec<u32>, prec: i64) -> Result<Self> {
        if prec <= val {
            return Err(SeriesError::PrecisionBelowValuation { val, prec });
        }
        Ok(Self::normalized(p, val, coeffs, prec))
    }

    fn normalized(p: u32, mut val: i64, mut coeffs: Vec<u32>, prec: i64) -> Self {
        let lead = coeffs.iter().position(|&c| c != 0);
        match lead {
            None => coeffs.clear(),
            Some(k) => {
                coeffs.drain(..k);
                val += k as i64;
            }
        }
        let room = (prec - val).max(0) as usize;
        coeffs.truncate(room);
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            val = prec;
        }
        LaurentSeries { p, val, coeffs, prec }
    }

    /// The series that is zero modulo `π^prec`.
    pub fn zero(p: u32, prec: i64) -> Self {
        LaurentSeries { p, val: prec, coeffs: Vec::new(), prec }
    }

    pub fn one(p: u32, prec: i64) -> Self {
        Self::monomial(p, 1, 0, prec)
    }

    /// `c π^exp + O(π^prec)`; the zero series when `c ≡ 0` or `exp >= prec`.
    pub fn monomial(p: u32, c: u32, exp: i64, prec: i64) -> Self {
        let c = c % p;
        if c == 0 || exp >= prec {
            return Self::zero(p, prec);
        }
        LaurentSeries { p, val: exp, coeffs: vec![c], prec }
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Valuation of the leading term, or `None` for zero-to-precision.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }

    /// Lower bound on the valuation: the true valuation, or `prec` when zero.
    pub fn valuation_bound(&self) -> i64 {
        self.val
    }

    pub fn leading_coefficient(&self) -> Option<Fp> {
        self.coeffs.first().map(|&c| Fp::raw(self.p, c))
    }

    /// Coefficient of `π^exp`, or `None` if `exp` lies at or above the precision.
    pub fn coeff(&self, exp: i64) -> Option<Fp> {
        if exp >= self.prec {
            return None;
        }
        let idx = exp - self.val;
        let c = if idx < 0 { 0 } else { self.coeffs.get(idx as usize).copied().unwrap_or(0) };
        Some(Fp::raw(self.p, c))
    }

    /// Nonzero terms as `(exponent, coefficient)` in ascending order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, u32)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0).map(move |(i, &c)| (self.val + i as i64, c))
    }

    /// Same series with a lower precision.
    pub fn truncate(&self, prec: i64) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        Self::normalized(self.p, self.val.min(prec), self.coeffs_from(self.val.min(prec), prec), prec)
    }

    fn coeffs_from(&self, start: i64, end: i64) -> Vec<u32> {
        (start..end).map(|e| self.coeff(e).map_or(0, |c| c.value)).collect()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(SeriesError::ModulusMismatch(self.p, other.p))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.combine(other, false))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.combine(other, true))
    }

    fn combine(&self, other: &Self, subtract: bool) -> Self {
        let p = self.p;
        let prec = self.prec.min(other.prec);
        let lo = self.val.min(other.val).min(prec);
        let len = (prec - lo).max(0) as usize;
        let mut out = vec![0u32; len];
        for (e, c) in self.terms() {
            if e < prec {
                out[(e - lo) as usize] = c;
            }
        }
        for (e, c) in other.terms() {
            if e < prec {
                let slot = &mut out[(e - lo) as usize];
                let c = if subtract { (p - c) % p } else { c };
                *slot = ((*slot as u64 + c as u64) % p as u64) as u32;
            }
        }
        Self::normalized(p, lo, out, prec)
    }

    /// Product, with precision `min(v(a) + prec(b), v(b) + prec(a))`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let p = self.p;
        let prec = (self.val + other.prec).min(other.val + self.prec);
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(p, prec));
        }
        let val = self.val + other.val;
        let len = ((prec - val).max(0) as usize).min(self.coeffs.len() + other.coeffs.len() - 1);
        let mut acc = vec![0u64; len];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 || i >= len {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(len - i) {
                if b != 0 {
                    let slot = &mut acc[i + j];
                    *slot = (*slot + a as u64 * b as u64) % p as u64;
                }
            }
        }
        Ok(Self::normalized(p, val, acc.into_iter().map(|c| c as u32).collect(), prec))
    }

    pub fn scale(&self, c: Fp) -> Self {
        assert_eq!(c.p, self.p, "modulus mismatch");
        let coeffs = self.coeffs.iter().map(|&a| mul_mod(a, c.value, self.p)).collect();
        Self::normalized(self.p, self.val, coeffs, self.prec)
    }

    /// Multiplication by `π^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentSeries { p: self.p, val: self.val + k, coeffs: self.coeffs.clone(), prec: self.prec + k }
    }

    /// Multiplicative inverse. A unit known to relative precision `r` has an
    /// inverse known to the same relative precision.
    pub fn invert(&self) -> Result<Self> {
        let Some(v) = self.valuation() else {
            return Err(SeriesError::ZeroDivision(self.prec));
        };
        let p = self.p;
        let rel = (self.prec - v) as usize;
        let u0_inv = inv_mod(self.coeffs[0], p);
        let mut w = vec![0u32; rel];
        w[0] = u0_inv;
        for n in 1..rel {
            let mut s = 0u64;
            for i in 1..=n.min(self.coeffs.len() - 1) {
                s = (s + self.coeffs[i] as u64 * w[n - i] as u64) % p as u64;
            }
            w[n] = mul_mod((p - s as u32) % p, u0_inv, p);
        }
        Ok(Self::normalized(p, -v, w, self.prec - 2 * v))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one(self.p, i64::MAX / 4);
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Frobenius `a ↦ a^p`: coefficients are fixed, exponents scale by `p`.
    pub fn frobenius(&self) -> Self {
        let p = self.p as i64;
        let mut coeffs = Vec::new();
        if !self.coeffs.is_empty() {
            coeffs = vec![0u32; (self.coeffs.len() - 1) * self.p as usize + 1];
            for (i, &c) in self.coeffs.iter().enumerate() {
                coeffs[i * self.p as usize] = c;
            }
        }
        let prec = self.prec.saturating_mul(p);
        Self::normalized(self.p, self.val.saturating_mul(p), coeffs, prec)
    }

    /// The Artin-Schreier operator `℘(a) = a^p - a`.
    pub fn wp(&self) -> Self {
        &self.frobenius() - self
    }

    /// True when the two series agree up to their common precision.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.p == other.p && self.combine(other, true).is_zero()
    }
}

impl Add for &LaurentSeries {
    type Output = LaurentSeries;
    /// Panics on a modulus mismatch; see [`LaurentSeries::checked_add`].
    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.checked_add(rhs).expect("series modulus mismatch")
    }
}

impl Sub for &LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.checked_sub(rhs).expect("series modulus mismatch")
    }
}

impl Mul for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.checked_mul(rhs).expect("series modulus mismatch")
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        self.scale(Fp::raw(self.p, self.p - 1))
    }
}

/// `p=3 prec=20 : -1:1 0:2 3:1` for `π^-1 + 2 + π^3 + O(π^20)`.
impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} prec={} :", self.p, self.prec)?;
        for (e, c) in self.terms() {
            write!(f, " {e}:{c}")?;
        }
        Ok(())
    }
}

impl FromStr for LaurentSeries {
    type Err = SeriesError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| SeriesError::Parse(format!("{m} in {s:?}"));
        let (head, body) = s.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        let mut p = None;
        let mut prec = None;
        for tok in head.split_whitespace() {
            match tok.split_once('=') {
                Some(("p", v)) => p = Some(v.parse::<u32>().map_err(|_| bad("bad p"))?),
                Some(("prec", v)) => prec = Some(v.parse::<i64>().map_err(|_| bad("bad prec"))?),
                _ => return Err(bad("unexpected header token")),
            }
        }
        let p = p.ok_or_else(|| bad("missing p"))?;
        let prec = prec.ok_or_else(|| bad("missing prec"))?;
        check_prime(p)?;
        let mut terms: Vec<(i64, u32)> = Vec::new();
        for tok in body.split_whitespace() {
            let (e, c) = tok.split_once(':').ok_or_else(|| bad("term must be exp:coeff"))?;
            let e: i64 = e.parse().map_err(|_| bad("bad exponent"))?;
            let c: u32 = c.parse().map_err(|_| bad("bad coefficient"))?;
            if c >= p {
                return Err(bad("coefficient out of range"));
            }
            if e >= prec {
                return Err(bad("exponent at or above precision"));
            }
            if terms.last().is_some_and(|&(last, _)| last >= e) {
                return Err(bad("exponents must be strictly ascending"));
            }
            terms.push((e, c));
        }
        let Some(&(lo, _)) = terms.first() else {
            return Ok(Self::zero(p, prec));
        };
        let mut coeffs = vec![0u32; (terms.last().unwrap().0 - lo + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - lo) as usize] = c;
        }
        Ok(Self::normalized(p, lo, coeffs, prec))
    }
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn series(p: u32) -> impl Strategy<Value = LaurentSeries> {
        (-8i64..6, prop::collection::vec(0u32..p, 1..8), 10i64..30)
            .prop_map(move |(val, coeffs, prec)| LaurentSeries::from_residues(p, val, coeffs, prec).unwrap())
    }

    fn nonzero(p: u32) -> impl Strategy<Value = LaurentSeries> {
        series(p).prop_filter("nonzero", |s| !s.is_zero())
    }

    proptest! {
        #[test]
        fn valuation_is_additive(a in nonzero(5), b in nonzero(5)) {
            let c = &a * &b;
            prop_assert_eq!(c.valuation(), Some(a.valuation().unwrap() + b.valuation().unwrap()));
        }

        #[test]
        fn inverse_is_inverse(a in nonzero(3)) {
            let inv = a.invert().unwrap();
            prop_assert_eq!(inv.valuation(), Some(-a.valuation().unwrap()));
            let prod = &a * &inv;
            prop_assert!(prod.agrees_with(&LaurentSeries::one(3, prod.precision())));
        }

        #[test]
        fn wp_is_additive(a in series(3), b in series(3)) {
            let lhs = (&a + &b).wp();
            let rhs = &a.wp() + &b.wp();
            prop_assert!(lhs.agrees_with(&rhs));
            prop_assert_eq!(lhs.precision(), rhs.precision());
        }

        #[test]
        fn frobenius_matches_power(a in series(3)) {
            prop_assert!(a.frobenius().agrees_with(&a.pow(3)));
        }

        #[test]
        fn wp_scales_negative_valuation(a in nonzero(5)) {
            let v = a.valuation().unwrap();
            if v < 0 {
                prop_assert_eq!(a.wp().valuation(), Some(5 * v));
            }
        }

        #[test]
        fn ultrametric(a in nonzero(3), b in nonzero(3)) {
            let (va, vb) = (a.valuation().unwrap(), b.valuation().unwrap());
            let sum = &a + &b;
            prop_assert!(sum.valuation_bound() >= va.min(vb));
            if va != vb && va.min(vb) < sum.precision() {
                prop_assert_eq!(sum.valuation(), Some(va.min(vb)));
            }
        }

        #[test]
        fn text_round_trip(a in series(5)) {
            prop_assert_eq!(a.to_string().parse::<LaurentSeries>().unwrap(), a);
        }
    }
}
