//! Certificates for towers with a nonintegral upper ramification break.
//!
//! A certificate is an ordered list of rule applications. Every step is
//! produced by the same executor that the verifier runs, so re-execution
//! from the text reproduces each `output` exactly. Group-theoretic facts
//! about Galois actions that are not recomputed from field data enter as
//! named assumptions.

mod certificate;
mod derive;
mod rules;
mod verify;

use thiserror::Error;

use crate::astower::TowerError;
use crate::laurent::{check_prime, inv_mod, SeriesError};
use crate::pgroups::GroupError;
use crate::ramcalc::{ceil_int, BreakError, Rational};

pub use certificate::{Assumption, Certificate, CertificateKind, Step};
pub use derive::{build_p3_tower, derive_chat, derive_nonint, NonintKind};
pub use rules::Rule;
pub use verify::{verify_certificate, VerifyReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForgeError {
    #[error("parameter constraint violated: {0}")]
    Constraint(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Breaks(#[from] BreakError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("step {step} ({rule}): {detail}")]
    Mismatch { step: usize, rule: String, detail: String },
    #[error("certificate differs from its regeneration at line {line}: expected {expected:?}, found {found:?}")]
    Regeneration { line: usize, expected: String, found: String },
    #[error("cannot parse certificate: {0}")]
    Parse(String),
    #[error("unknown rule {0:?}")]
    UnknownRule(String),
}

impl ForgeError {
    /// True when the failure traces back to exhausted series precision.
    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            ForgeError::Series(SeriesError::InsufficientPrecision(_))
                | ForgeError::Tower(TowerError::InsufficientPrecision(_))
                | ForgeError::Tower(TowerError::Series(SeriesError::InsufficientPrecision(_)))
        )
    }
}

pub type Result<T> = std::result::Result<T, ForgeError>;

/// Series precision and group materialization limit for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForgeConfig {
    pub precision: i64,
    pub limit: usize,
}

impl Default for ForgeConfig {
    fn default() -> Self {
        ForgeConfig { precision: 400, limit: crate::pgroups::DEFAULT_LIMIT }
    }
}

/// `(p, b, a)` with `p ∤ b`, `a > b`, `a ≢ 0, -b (mod p)`, plus the derived
/// `a = bt + ps` with `1 ≤ t ≤ p-2` and `r = (t+1)⁻¹` in `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct P3Parameters {
    pub p: u32,
    pub b: i64,
    pub a: i64,
    pub t: u32,
    pub s: i64,
    pub r: u32,
    /// `β = unit · π^{-b}`.
    pub unit: u32,
}

impl P3Parameters {
    pub fn new(p: u32, b: i64, a: i64) -> Result<Self> {
        Self::with_unit(p, b, a, 1)
    }

    pub fn with_unit(p: u32, b: i64, a: i64, unit: u32) -> Result<Self> {
        if p <= 2 {
            return Err(ForgeError::Constraint(format!("p > 2 required, got p = {p}")));
        }
        check_prime(p).map_err(|_| ForgeError::Constraint(format!("p = {p} is not prime")))?;
        let pi = p as i64;
        if b < 1 {
            return Err(ForgeError::Constraint(format!("b >= 1 required, got b = {b}")));
        }
        if b % pi == 0 {
            return Err(ForgeError::Constraint(format!("p ∤ b required, but b = {b} ≡ 0 mod {p}")));
        }
        if a <= b {
            return Err(ForgeError::Constraint(format!("a > b required, got a = {a}, b = {b}")));
        }
        if a % pi == 0 {
            return Err(ForgeError::Constraint(format!("a ≢ 0 mod p required, but a = {a} ≡ 0 mod {p}")));
        }
        if (a + b) % pi == 0 {
            return Err(ForgeError::Constraint(format!("a ≢ −b mod p required, but a = {a} ≡ −b mod {p}")));
        }
        if unit.is_multiple_of(p) {
            return Err(ForgeError::Constraint(format!("unit must be nonzero mod {p}")));
        }
        let b_inv = inv_mod(b.rem_euclid(pi) as u32, p) as i64;
        let t = (a.rem_euclid(pi) * b_inv % pi) as u32;
        let s = (a - b * t as i64) / pi;
        debug_assert_eq!(a, b * t as i64 + pi * s);
        debug_assert!((1..=p - 2).contains(&t));
        let r = inv_mod(t + 1, p);
        Ok(P3Parameters { p, b, a, t, s, r, unit: unit % p })
    }

    /// `2b + p(a - b)`, the break of `E/F`.
    pub fn ef_break(&self) -> i64 {
        2 * self.b + self.p as i64 * (self.a - self.b)
    }

    /// `-pa + pb - 2b`, the valuation after the first reduction step.
    pub fn residual_valuation(&self) -> i64 {
        -self.ef_break()
    }

    /// `a + b/p`.
    pub fn witness(&self) -> Rational {
        Rational::new(self.a * self.p as i64 + self.b, self.p as i64)
    }
}

/// The lexicographically least `(b, a)` with `a > b > v`, `p ∤ b` and
/// `a ≢ 0, -b (mod p)`.
pub fn pick_parameters(p: u32, v: Rational) -> Result<(i64, i64)> {
    if v < Rational::from_integer(0) {
        return Err(ForgeError::Constraint(format!("v >= 0 required, got {v}")));
    }
    let pi = p as i64;
    let mut b = ceil_int(v);
    if Rational::from_integer(b) == v {
        b += 1;
    }
    while b % pi == 0 {
        b += 1;
    }
    Ok((b, pick_a(p, b, Rational::from_integer(b))?))
}

/// The least integer `a > v` with `a ≢ 0, -b (mod p)`.
pub fn pick_a(p: u32, b: i64, v: Rational) -> Result<i64> {
    if p <= 2 {
        return Err(ForgeError::Constraint(format!("p > 2 required, got p = {p}")));
    }
    let pi = p as i64;
    let mut a = ceil_int(v);
    if Rational::from_integer(a) == v {
        a += 1;
    }
    while a % pi == 0 || (a + b) % pi == 0 {
        a += 1;
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn parameter_derivation() {
        let pr = P3Parameters::new(3, 1, 4).unwrap();
        assert_eq!((pr.t, pr.s, pr.r), (1, 1, 2));
        assert_eq!(pr.ef_break(), 11);
        assert_eq!(pr.witness(), q(13, 3));
        let pr = P3Parameters::new(5, 3, 4).unwrap();
        assert_eq!((pr.t, pr.s, pr.r), (3, -1, 4));
        assert_eq!(pr.ef_break(), 11);
        assert_eq!(pr.witness(), q(23, 5));
        let pr = P3Parameters::new(3, 5, 8).unwrap();
        assert_eq!(pr.ef_break(), 19);
    }

    #[test]
    fn constraint_messages() {
        let msg = |r: Result<P3Parameters>| r.unwrap_err().to_string();
        assert!(msg(P3Parameters::new(3, 1, 2)).contains("a ≢ −b"));
        assert!(msg(P3Parameters::new(3, 1, 3)).contains("a ≢ 0"));
        assert!(msg(P3Parameters::new(2, 1, 4)).contains("p > 2"));
        assert!(msg(P3Parameters::new(3, 3, 4)).contains("p ∤ b"));
        assert!(msg(P3Parameters::new(3, 4, 4)).contains("a > b"));
        assert!(msg(P3Parameters::new(9, 1, 4)).contains("not prime"));
    }

    #[test]
    fn pick_parameters_examples() {
        assert_eq!(pick_parameters(3, q(13, 3)).unwrap(), (5, 8));
        assert_eq!(pick_parameters(3, q(0, 1)).unwrap(), (1, 4));
        assert_eq!(pick_parameters(5, q(0, 1)).unwrap(), (1, 2));
        assert_eq!(pick_parameters(3, q(2, 1)).unwrap(), (4, 7));
        assert!(pick_parameters(3, q(-1, 1)).is_err());
    }

    #[test]
    fn pick_a_skips_forbidden_residues() {
        assert_eq!(pick_a(3, 1, q(4, 1)).unwrap(), 7);
        assert_eq!(pick_a(3, 1, q(3, 1)).unwrap(), 4);
        assert_eq!(pick_a(5, 2, q(2, 1)).unwrap(), 4);
    }
}
