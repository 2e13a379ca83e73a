//! Break multisets and the Herbrand conversion between lower and upper
//! numbering for a totally ramified extension of degree `m p^n`, `p ∤ m`.
//!
//! Positive breaks are exact rationals. The tame break `0` is carried as a
//! flag (present iff `m > 1`) and never appears in the positive multiset.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::Zero;
use thiserror::Error;

use crate::laurent::check_prime;

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BreakError {
    #[error("expected {expected} numbering, found {found}")]
    WrongNumbering { expected: Numbering, found: Numbering },
    #[error("multiset is not realizable: lower break {0} is not a positive integer")]
    NonIntegralLower(Rational),
    #[error("breaks must be positive, found {0}")]
    NonPositive(Rational),
    #[error("tame degree m = {m} must be positive and prime to p = {p}")]
    BadTameDegree { m: u64, p: u64 },
    #[error("p = {0} is not an odd prime")]
    BadPrime(u64),
    #[error("parameters differ: {0}")]
    Mismatch(String),
    #[error("multisets share the break {0}; the union rule needs disjoint inputs")]
    NotDisjoint(Rational),
    #[error("composition is only defined for p-extensions (m = 1)")]
    TameComposition,
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("cannot parse multiset: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, BreakError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Numbering {
    Lower,
    Upper,
}

impl fmt::Display for Numbering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Numbering::Lower => "lower",
            Numbering::Upper => "upper",
        })
    }
}

/// Sorted multiset of positive breaks with the tame degree `m` and prime `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BreakMultiset {
    m: u64,
    p: u64,
    numbering: Numbering,
    breaks: Vec<Rational>,
}

impl BreakMultiset {
    pub fn new(numbering: Numbering, m: u64, p: u64, mut breaks: Vec<Rational>) -> Result<Self> {
        if p > u32::MAX as u64 || check_prime(p as u32).is_err() {
            return Err(BreakError::BadPrime(p));
        }
        if m == 0 || m.is_multiple_of(p) {
            return Err(BreakError::BadTameDegree { m, p });
        }
        if let Some(&b) = breaks.iter().find(|b| **b <= Rational::zero()) {
            return Err(BreakError::NonPositive(b));
        }
        if numbering == Numbering::Lower {
            if let Some(&b) = breaks.iter().find(|b| !b.is_integer()) {
                return Err(BreakError::NonIntegralLower(b));
            }
        }
        breaks.sort();
        Ok(BreakMultiset { m, p, numbering, breaks })
    }

    pub fn upper(m: u64, p: u64, breaks: Vec<Rational>) -> Result<Self> {
        Self::new(Numbering::Upper, m, p, breaks)
    }

    pub fn lower(m: u64, p: u64, breaks: Vec<i64>) -> Result<Self> {
        Self::new(Numbering::Lower, m, p, breaks.into_iter().map(Rational::from_integer).collect())
    }

    pub fn numbering(&self) -> Numbering {
        self.numbering
    }

    pub fn tame_degree(&self) -> u64 {
        self.m
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn breaks(&self) -> &[Rational] {
        &self.breaks
    }

    pub fn len(&self) -> usize {
        self.breaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breaks.is_empty()
    }

    /// Whether `0` is also a break, which happens exactly when `m > 1`.
    pub fn has_zero_break(&self) -> bool {
        self.m > 1
    }

    pub fn max(&self) -> Option<Rational> {
        self.breaks.last().copied()
    }

    pub fn contains(&self, x: Rational) -> bool {
        self.breaks.binary_search(&x).is_ok()
    }

    /// Errors unless the multiset uses numbering `n`.
    pub fn ensure_numbering(&self, n: Numbering) -> Result<()> {
        if self.numbering == n {
            Ok(())
        } else {
            Err(BreakError::WrongNumbering { expected: n, found: self.numbering })
        }
    }

    /// Same parameters, different breaks.
    pub fn with_breaks(&self, breaks: Vec<Rational>) -> Result<Self> {
        Self::new(self.numbering, self.m, self.p, breaks)
    }

    /// Multiset with one copy of `x` added.
    pub fn inserted(&self, x: Rational) -> Result<Self> {
        let mut b = self.breaks.clone();
        b.push(x);
        self.with_breaks(b)
    }

    /// Multiset with one copy of `x` removed, if present.
    pub fn removed(&self, x: Rational) -> Option<Self> {
        let idx = self.breaks.iter().position(|&b| b == x)?;
        let mut b = self.breaks.clone();
        b.remove(idx);
        Some(BreakMultiset { breaks: b, ..self.clone() })
    }

    /// `u_1 = b_1/m`, `u_{i+1} - u_i = (b_{i+1} - b_i)/(m p^i)`.
    pub fn lower_to_upper(&self) -> Result<Self> {
        self.ensure_numbering(Numbering::Lower)?;
        let m = self.m as i64;
        let p = self.p as i64;
        let mut out = Vec::with_capacity(self.breaks.len());
        let mut scale = m;
        for (i, &b) in self.breaks.iter().enumerate() {
            let u = if i == 0 {
                b / m
            } else {
                scale *= p;
                out[i - 1] + (b - self.breaks[i - 1]) / scale
            };
            out.push(u);
        }
        Ok(BreakMultiset { numbering: Numbering::Upper, breaks: out, ..self.clone() })
    }

    /// Inverse of [`lower_to_upper`](Self::lower_to_upper); fails if a lower
    /// break comes out non-integral.
    pub fn upper_to_lower(&self) -> Result<Self> {
        self.ensure_numbering(Numbering::Upper)?;
        let m = self.m as i64;
        let p = self.p as i64;
        let mut out: Vec<Rational> = Vec::with_capacity(self.breaks.len());
        let mut scale = m;
        for (i, &u) in self.breaks.iter().enumerate() {
            let b = if i == 0 { u * m } else { out[i - 1] + (u - self.breaks[i - 1]) * scale };
            if !b.is_integer() || b <= Rational::zero() {
                return Err(BreakError::NonIntegralLower(b));
            }
            out.push(b);
            scale *= p;
        }
        Ok(BreakMultiset { numbering: Numbering::Lower, breaks: out, ..self.clone() })
    }

    /// Lower breaks as integers.
    pub fn lower_integers(&self) -> Result<Vec<i64>> {
        self.ensure_numbering(Numbering::Lower)?;
        Ok(self.breaks.iter().map(|b| b.to_integer()).collect())
    }

    /// Union of the upper breaks of two `p`-extensions with disjoint break sets.
    pub fn compose_disjoint(&self, other: &Self) -> Result<Self> {
        self.ensure_numbering(Numbering::Upper)?;
        other.ensure_numbering(Numbering::Upper)?;
        if self.p != other.p {
            return Err(BreakError::Mismatch(format!("p = {} vs {}", self.p, other.p)));
        }
        if self.m != 1 || other.m != 1 {
            return Err(BreakError::TameComposition);
        }
        if let Some(&x) = self.breaks.iter().find(|x| other.contains(**x)) {
            return Err(BreakError::NotDisjoint(x));
        }
        let mut all = self.breaks.clone();
        all.extend_from_slice(&other.breaks);
        self.with_breaks(all)
    }

    /// Whether `self` is a sub-multiset of `full`.
    pub fn is_submultiset_of(&self, full: &Self) -> Result<bool> {
        self.ensure_numbering(Numbering::Upper)?;
        full.ensure_numbering(Numbering::Upper)?;
        let mut j = 0;
        for &x in &self.breaks {
            while j < full.breaks.len() && full.breaks[j] < x {
                j += 1;
            }
            if j == full.breaks.len() || full.breaks[j] != x {
                return Ok(false);
            }
            j += 1;
        }
        Ok(true)
    }
}

/// Which intermediate field carries which break when a central `C_p^2`
/// quotient adds two new upper breaks `u < v` on top of `U_M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fact1Result {
    /// Lower break of `N/K` matching `u`.
    pub lower_u: i64,
    /// Lower break of `N/K` matching `v`.
    pub lower_v: i64,
    /// `U_{L_0/K} = U_M ∪ {u}`.
    pub distinguished_upper: BreakMultiset,
    /// Break of `N/L_0`, equal to `lower_v`.
    pub distinguished_top: i64,
    /// `U_{L/K} = U_M ∪ {v}` for every other `L`.
    pub others_upper: BreakMultiset,
    /// Break of `N/L` for those `L`, equal to `lower_u`.
    pub others_top: i64,
    /// Group-theoretic hypotheses that multisets alone cannot check.
    pub assumptions: Vec<&'static str>,
    pub warnings: Vec<String>,
}

pub const FACT1_ASSUMPTIONS: [&str; 2] =
    ["Gal(N/M) is a central subgroup isomorphic to C_p x C_p", "v occurs in U_N with multiplicity one"];

/// Resolves the lower breaks and the distinguished subextension.
pub fn fact1_resolve(u_m: &BreakMultiset, u: Rational, v: Rational) -> Result<Fact1Result> {
    u_m.ensure_numbering(Numbering::Upper)?;
    if u >= v {
        return Err(BreakError::Hypothesis(format!("u = {u} must be below v = {v}")));
    }
    for x in [u, v] {
        if u_m.contains(x) {
            return Err(BreakError::Hypothesis(format!("{x} already lies in U_M")));
        }
    }
    let full = u_m.inserted(u)?.inserted(v)?;
    let lower = full.upper_to_lower()?;
    let pos = |x: Rational| full.breaks.iter().position(|&b| b == x).unwrap();
    let lower_u = lower.breaks[pos(u)].to_integer();
    let lower_v = lower.breaks[pos(v)].to_integer();
    let mut warnings = Vec::new();
    if let Some(top) = u_m.max() {
        if u < top {
            warnings.push(format!("u = {u} lies below max(U_M) = {top}"));
        }
    }
    Ok(Fact1Result {
        lower_u,
        lower_v,
        distinguished_upper: u_m.inserted(u)?,
        distinguished_top: lower_v,
        others_upper: u_m.inserted(v)?,
        others_top: lower_u,
        assumptions: FACT1_ASSUMPTIONS.to_vec(),
        warnings,
    })
}

pub fn format_rational(x: Rational) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || BreakError::Parse(format!("bad rational {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// `upper m=1 p=3 : 1, 4, 13/3`
impl fmt::Display for BreakMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} m={} p={} :", self.numbering, self.m, self.p)?;
        for (i, &b) in self.breaks.iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}{}", format_rational(b))?;
        }
        Ok(())
    }
}

impl FromStr for BreakMultiset {
    type Err = BreakError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| BreakError::Parse(format!("{m} in {s:?}"));
        let (head, body) = s.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        let mut toks = head.split_whitespace();
        let numbering = match toks.next() {
            Some("upper") => Numbering::Upper,
            Some("lower") => Numbering::Lower,
            _ => return Err(bad("expected 'upper' or 'lower'")),
        };
        let (mut m, mut p) = (None, None);
        for tok in toks {
            match tok.split_once('=') {
                Some(("m", v)) => m = Some(v.parse::<u64>().map_err(|_| bad("bad m"))?),
                Some(("p", v)) => p = Some(v.parse::<u64>().map_err(|_| bad("bad p"))?),
                _ => return Err(bad("unexpected header token")),
            }
        }
        let m = m.ok_or_else(|| bad("missing m"))?;
        let p = p.ok_or_else(|| bad("missing p"))?;
        let breaks = if body.trim().is_empty() {
            Vec::new()
        } else {
            body.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?
        };
        BreakMultiset::new(numbering, m, p, breaks)
    }
}

/// `true` iff `x` has denominator `> 1`.
pub fn is_nonintegral(x: Rational) -> bool {
    !x.is_integer()
}

/// `x` rounded up to an integer.
pub fn ceil_int(x: Rational) -> i64 {
    x.ceil().to_integer()
}

impl BreakMultiset {
    /// The unique non-integral break, if exactly one exists.
    pub fn sole_nonintegral(&self) -> Option<Rational> {
        let mut it = self.breaks.iter().filter(|b| !b.is_integer());
        let first = *it.next()?;
        it.next().is_none().then_some(first)
    }

    pub fn all_integral(&self) -> bool {
        self.breaks.iter().all(|b| b.is_integer())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn ri(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn up(m: u64, p: u64, b: &[Rational]) -> BreakMultiset {
        BreakMultiset::upper(m, p, b.to_vec()).unwrap()
    }

    #[test]
    fn lower_to_upper_examples() {
        let u = BreakMultiset::lower(1, 3, vec![1, 10, 13]).unwrap().lower_to_upper().unwrap();
        assert_eq!(u.breaks(), &[ri(1), ri(4), r(13, 3)]);
        let u = BreakMultiset::lower(1, 3, vec![5]).unwrap().lower_to_upper().unwrap();
        assert_eq!(u.breaks(), &[ri(5)]);
        let u = BreakMultiset::lower(2, 3, vec![2]).unwrap().lower_to_upper().unwrap();
        assert_eq!(u.breaks(), &[ri(1)]);
        assert!(u.has_zero_break());
    }

    #[test]
    fn upper_to_lower_examples() {
        let l = up(1, 3, &[ri(1), ri(4), r(13, 3)]).upper_to_lower().unwrap();
        assert_eq!(l.lower_integers().unwrap(), vec![1, 10, 13]);
        let l = up(1, 3, &[ri(1), ri(4)]).upper_to_lower().unwrap();
        assert_eq!(l.lower_integers().unwrap(), vec![1, 10]);
        let back = l.lower_to_upper().unwrap();
        assert_eq!(back, up(1, 3, &[ri(1), ri(4)]));
    }

    #[test]
    fn unrealizable_upper() {
        let err = up(1, 3, &[r(1, 3)]).upper_to_lower().unwrap_err();
        assert_eq!(err, BreakError::NonIntegralLower(r(1, 3)));
        assert!(matches!(
            BreakMultiset::lower(1, 3, vec![1]).unwrap().upper_to_lower(),
            Err(BreakError::WrongNumbering { .. })
        ));
    }

    #[test]
    fn compose_examples() {
        let a = up(1, 3, &[ri(1), ri(4), r(13, 3)]);
        let b = up(1, 3, &[ri(6)]);
        assert_eq!(a.compose_disjoint(&b).unwrap().breaks(), &[ri(1), ri(4), r(13, 3), ri(6)]);
        let c = up(1, 3, &[ri(1)]).compose_disjoint(&up(1, 3, &[ri(4)])).unwrap();
        assert_eq!(c.breaks(), &[ri(1), ri(4)]);
        assert_eq!(up(1, 3, &[ri(1)]).compose_disjoint(&up(1, 3, &[ri(1)])), Err(BreakError::NotDisjoint(ri(1))));
        assert_eq!(up(2, 3, &[ri(1)]).compose_disjoint(&up(1, 3, &[ri(2)])), Err(BreakError::TameComposition));
    }

    #[test]
    fn subset_examples() {
        let full = up(1, 3, &[ri(1), ri(4), r(13, 3)]);
        assert!(up(1, 3, &[ri(1), ri(4)]).is_submultiset_of(&full).unwrap());
        assert!(up(1, 3, &[]).is_submultiset_of(&full).unwrap());
        assert!(!up(1, 3, &[ri(2)]).is_submultiset_of(&full).unwrap());
        assert!(!up(1, 3, &[ri(1), ri(1)]).is_submultiset_of(&full).unwrap());
    }

    #[test]
    fn fact1_examples() {
        let res = fact1_resolve(&up(1, 3, &[]), ri(1), ri(4)).unwrap();
        assert_eq!((res.lower_u, res.lower_v), (1, 10));
        assert_eq!(res.distinguished_upper.breaks(), &[ri(1)]);
        assert_eq!(res.distinguished_top, 10);
        assert_eq!(res.others_upper.breaks(), &[ri(4)]);
        assert_eq!(res.others_top, 1);
        assert!(res.warnings.is_empty());
        assert_eq!(res.assumptions.len(), 2);

        // lowers of {5, 6, 29/3}: 5, 5 + 1·3 = 8, 8 + (11/3)·9 = 41
        let res = fact1_resolve(&up(1, 3, &[ri(5)]), ri(6), r(29, 3)).unwrap();
        assert_eq!((res.lower_u, res.lower_v), (8, 41));
        assert_eq!(res.distinguished_upper.breaks(), &[ri(5), ri(6)]);
        assert_eq!(res.others_upper.breaks(), &[ri(5), r(29, 3)]);

        // only the literal preconditions are enforced; ordering is a warning
        let res = fact1_resolve(&up(1, 3, &[ri(6)]), ri(1), ri(4)).unwrap();
        assert_eq!(res.warnings.len(), 1);
        assert_eq!((res.lower_u, res.lower_v), (1, 10));
    }

    #[test]
    fn fact1_errors() {
        assert!(matches!(fact1_resolve(&up(1, 3, &[ri(1)]), ri(1), ri(4)), Err(BreakError::Hypothesis(_))));
        assert!(matches!(fact1_resolve(&up(1, 3, &[]), ri(4), ri(1)), Err(BreakError::Hypothesis(_))));
        assert!(matches!(fact1_resolve(&up(1, 3, &[]), ri(1), r(5, 4)), Err(BreakError::NonIntegralLower(_))));
    }

    #[test]
    fn text_format() {
        let ms: BreakMultiset = "upper m=1 p=3 : 1, 4, 13/3".parse().unwrap();
        assert_eq!(ms.to_string(), "upper m=1 p=3 : 1, 4, 13/3");
        let empty: BreakMultiset = "upper m=1 p=3 :".parse().unwrap();
        assert!(empty.is_empty());
        assert_eq!(empty.to_string(), "upper m=1 p=3 :");
        assert!("lower m=1 p=3 : 1/2".parse::<BreakMultiset>().is_err());
        assert!("upper m=3 p=3 : 1".parse::<BreakMultiset>().is_err());
        assert!("sideways m=1 p=3 : 1".parse::<BreakMultiset>().is_err());
    }

    #[test]
    fn tame_upper_break_is_legal() {
        let u = BreakMultiset::lower(2, 3, vec![3]).unwrap().lower_to_upper().unwrap();
        assert_eq!(u.to_string(), "upper m=2 p=3 : 3/2");
    }
}
