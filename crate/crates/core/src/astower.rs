//! Arithmetic in one Artin-Schreier extension `F = K(y)`, `y^p - y = β`,
//! and Artin-Schreier reduction over `K` and over `F`.
//!
//! Reduction repeatedly subtracts `℘(w)` to kill a leading term whose
//! valuation is divisible by `p`. When the valuation ends up negative and
//! prime to `p` it is the ramification break of the `C_p`-extension cut
//! out by the datum.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::laurent::{inv_mod, mul_mod, pow_mod, Fp, LaurentSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("Artin-Schreier datum must have negative valuation, got {0:?}")]
    NonNegativeDatum(Option<i64>),
    #[error("valuation -{b} of the datum is divisible by p = {p}; reduce it first")]
    DatumDivisibleByP { p: u32, b: i64 },
    #[error("elements belong to different extensions")]
    ExtensionMismatch,
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("cannot parse element: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, TowerError>;

/// Result of an Artin-Schreier reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BreakOutcome {
    /// The datum reduces to negative valuation `-break` with `p ∤ break`.
    Wild(u64),
    /// The datum reduces to valuation `>= 0`: unramified or split.
    NonnegativeResidual,
}

impl BreakOutcome {
    pub fn wild_break(self) -> Option<u64> {
        match self {
            BreakOutcome::Wild(b) => Some(b),
            BreakOutcome::NonnegativeResidual => None,
        }
    }
}

impl fmt::Display for BreakOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BreakOutcome::Wild(b) => write!(f, "break={b}"),
            BreakOutcome::NonnegativeResidual => f.write_str("nonnegative-residual"),
        }
    }
}

/// A reduced datum `reduced = delta - ℘(witness)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction<T> {
    pub reduced: T,
    pub witness: T,
    pub outcome: BreakOutcome,
    pub steps: usize,
}

/// Artin-Schreier reduction of `delta ∈ K`.
pub fn reduce_in_base(delta: &LaurentSeries) -> Result<Reduction<LaurentSeries>> {
    let p = delta.modulus();
    let mut reduced = delta.clone();
    let mut witness = LaurentSeries::zero(p, delta.precision().max(0));
    let mut steps = 0;
    loop {
        let Some(v) = reduced.valuation() else {
            if reduced.precision() >= 0 {
                return Ok(Reduction { reduced, witness, outcome: BreakOutcome::NonnegativeResidual, steps });
            }
            return Err(TowerError::InsufficientPrecision(format!(
                "datum vanishes to precision {} < 0",
                reduced.precision()
            )));
        };
        if v >= 0 {
            return Ok(Reduction { reduced, witness, outcome: BreakOutcome::NonnegativeResidual, steps });
        }
        if v % p as i64 != 0 {
            return Ok(Reduction { reduced, witness, outcome: BreakOutcome::Wild((-v) as u64), steps });
        }
        // c^{1/p} = c over F_p
        let c = reduced.leading_coefficient().unwrap().value();
        let j = v / p as i64;
        let w = LaurentSeries::monomial(p, c, j, exact_prec(reduced.precision(), p));
        reduced = &reduced - &w.wp();
        witness = &witness + &w;
        steps += 1;
    }
}

/// A precision for a monomial witness whose `℘`-image does not lower `prec`.
fn exact_prec(prec: i64, p: u32) -> i64 {
    prec.max(prec.div_euclid(p as i64) + 1).max(1)
}

/// The extension `F = K(y)` with `y^p - y = β`, `v_K(β) = -b`, `p ∤ b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ASExtension {
    p: u32,
    beta: LaurentSeries,
    b: i64,
    /// `β^0, …, β^{p-1}`.
    beta_powers: Vec<LaurentSeries>,
}

impl ASExtension {
    pub fn new(beta: LaurentSeries) -> Result<Arc<Self>> {
        let p = beta.modulus();
        let v = beta.valuation();
        let b = match v {
            Some(v) if v < 0 => -v,
            other => return Err(TowerError::NonNegativeDatum(other)),
        };
        if b % p as i64 == 0 {
            return Err(TowerError::DatumDivisibleByP { p, b });
        }
        let mut beta_powers = vec![LaurentSeries::one(p, beta.precision() + b * p as i64)];
        for i in 1..p as usize {
            let next = &beta_powers[i - 1] * &beta;
            beta_powers.push(next);
        }
        Ok(Arc::new(ASExtension { p, beta, b, beta_powers }))
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn beta(&self) -> &LaurentSeries {
        &self.beta
    }

    /// The ramification break of `F/K`.
    pub fn break_number(&self) -> i64 {
        self.b
    }

    pub fn precision(&self) -> i64 {
        self.beta.precision()
    }
}

/// `Σ c_i y^i` with `0 <= i < p`, an element of `F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ASElement {
    ext: Arc<ASExtension>,
    comps: Vec<LaurentSeries>,
}

impl ASElement {
    /// Builds `Σ comps[i] y^i`; missing components are zero at the extension precision.
    pub fn new(ext: &Arc<ASExtension>, comps: Vec<LaurentSeries>) -> Result<Self> {
        if comps.len() > ext.p as usize {
            return Err(TowerError::Parse(format!("{} components for p = {}", comps.len(), ext.p)));
        }
        if let Some(c) = comps.iter().find(|c| c.modulus() != ext.p) {
            return Err(SeriesError::ModulusMismatch(ext.p, c.modulus()).into());
        }
        let mut comps = comps;
        comps.resize(ext.p as usize, LaurentSeries::zero(ext.p, ext.precision()));
        Ok(ASElement { ext: ext.clone(), comps })
    }

    pub fn zero(ext: &Arc<ASExtension>) -> Self {
        ASElement { ext: ext.clone(), comps: vec![LaurentSeries::zero(ext.p, ext.precision()); ext.p as usize] }
    }

    pub fn from_base(ext: &Arc<ASExtension>, c: LaurentSeries) -> Self {
        Self::monomial_series(ext, c, 0)
    }

    /// The generator `y`.
    pub fn generator(ext: &Arc<ASExtension>) -> Self {
        Self::monomial_series(ext, LaurentSeries::one(ext.p, ext.precision()), 1)
    }

    /// `c · y^i` for `c ∈ K`.
    pub fn monomial_series(ext: &Arc<ASExtension>, c: LaurentSeries, i: usize) -> Self {
        assert!(i < ext.p as usize, "y-degree {i} must be below p");
        let mut out = Self::zero(ext);
        out.comps[i] = c;
        out
    }

    pub fn extension(&self) -> &Arc<ASExtension> {
        &self.ext
    }

    pub fn components(&self) -> &[LaurentSeries] {
        &self.comps
    }

    fn same_ext(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ext, &other.ext) || self.ext == other.ext {
            Ok(())
        } else {
            Err(TowerError::ExtensionMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_ext(other)?;
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect();
        Ok(ASElement { ext: self.ext.clone(), comps })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_ext(other)?;
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect();
        Ok(ASElement { ext: self.ext.clone(), comps })
    }

    /// Product, reducing `y`-degrees with `y^p = y + β`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_ext(other)?;
        let p = self.ext.p as usize;
        let prec = self.ext.precision();
        let mut prod = vec![LaurentSeries::zero(self.ext.p, prec); 2 * p - 1];
        let mut touched = vec![false; 2 * p - 1];
        for (i, a) in self.comps.iter().enumerate() {
            for (j, b) in other.comps.iter().enumerate() {
                let term = a * b;
                prod[i + j] = if touched[i + j] { &prod[i + j] + &term } else { term };
                touched[i + j] = true;
            }
        }
        for k in (p..2 * p - 1).rev() {
            let top = prod[k].clone();
            prod[k - p + 1] = &prod[k - p + 1] + &top;
            prod[k - p] = &prod[k - p] + &(&top * &self.ext.beta);
        }
        prod.truncate(p);
        Ok(ASElement { ext: self.ext.clone(), comps: prod })
    }

    pub fn scale(&self, c: &LaurentSeries) -> Self {
        ASElement { ext: self.ext.clone(), comps: self.comps.iter().map(|x| x * c).collect() }
    }

    /// `u^p = Σ c_i^p (y + β)^i`.
    pub fn frobenius(&self) -> Self {
        let p = self.ext.p;
        let mut out: Vec<Option<LaurentSeries>> = vec![None; p as usize];
        for (i, c) in self.comps.iter().enumerate() {
            let fc = c.frobenius();
            for (k, slot) in out.iter_mut().enumerate().take(i + 1) {
                let binom = binomial_mod(i as u32, k as u32, p);
                if binom == 0 {
                    continue;
                }
                let term = (&fc * &self.ext.beta_powers[i - k]).scale(Fp::raw(p, binom));
                *slot = Some(match slot.take() {
                    Some(acc) => &acc + &term,
                    None => term,
                });
            }
        }
        let comps = out
            .into_iter()
            .map(|c| c.unwrap_or_else(|| LaurentSeries::zero(p, self.ext.precision().saturating_mul(p as i64))))
            .collect();
        ASElement { ext: self.ext.clone(), comps }
    }

    /// `℘(u) = u^p - u`.
    pub fn wp(&self) -> Self {
        self.frobenius().sub(self).expect("same extension")
    }

    fn term_valuation(&self, i: usize, v: i64) -> i64 {
        self.ext.p as i64 * v - i as i64 * self.ext.b
    }

    /// The element is known modulo `π_F^precision`.
    pub fn precision(&self) -> i64 {
        self.comps.iter().enumerate().map(|(i, c)| self.term_valuation(i, c.precision())).min().unwrap()
    }

    /// The unique component attaining `v_F`, with that valuation.
    pub fn leading_component(&self) -> Option<(usize, i64)> {
        let best = self
            .comps
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.valuation().map(|v| (i, self.term_valuation(i, v))))
            .min_by_key(|&(_, v)| v)?;
        (best.1 < self.precision()).then_some(best)
    }

    /// `v_F`, normalized so that `v_F(F^×) = Z`; `None` for zero to precision.
    pub fn valuation(&self) -> Option<i64> {
        self.leading_component().map(|(_, v)| v)
    }

    /// True when the two elements agree up to their common precision.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.comps.len() == other.comps.len() && self.comps.iter().zip(&other.comps).all(|(a, b)| a.agrees_with(b))
    }

    /// Artin-Schreier reduction of `self` over `F`.
    pub fn reduce(&self) -> Result<Reduction<ASElement>> {
        let ext = &self.ext;
        let p = ext.p;
        let pi = p as i64;
        let b_inv = inv_mod(ext.b.rem_euclid(pi) as u32, p);
        let beta_lead = ext.beta.leading_coefficient().unwrap().value();
        let mut reduced = self.clone();
        let mut witness = ASElement::zero(ext);
        let mut steps = 0;
        loop {
            let Some((idx, v)) = reduced.leading_component() else {
                if reduced.precision() >= 0 {
                    return Ok(Reduction { reduced, witness, outcome: BreakOutcome::NonnegativeResidual, steps });
                }
                return Err(TowerError::InsufficientPrecision(format!(
                    "element of F vanishes to precision {} < 0",
                    reduced.precision()
                )));
            };
            if v >= 0 {
                return Ok(Reduction { reduced, witness, outcome: BreakOutcome::NonnegativeResidual, steps });
            }
            if v % pi != 0 {
                return Ok(Reduction { reduced, witness, outcome: BreakOutcome::Wild((-v) as u64), steps });
            }
            debug_assert_eq!(idx, 0, "only the constant component has valuation divisible by p");
            let lead = &reduced.comps[0];
            let j = lead.valuation().unwrap();
            let c = lead.leading_coefficient().unwrap().value();
            // i' ≡ -j/b (mod p), j' = (j + i'b)/p, c' β_lead^{i'} = c
            let i_new = mul_mod(reduce(-j, p), b_inv, p);
            let j_new = (j + i_new as i64 * ext.b) / pi;
            let c_new = mul_mod(c, inv_mod(pow_mod(beta_lead, i_new as u64, p), p), p);
            let monomial = LaurentSeries::monomial(p, c_new, j_new, exact_prec(ext.precision(), p));
            let w = ASElement::monomial_series(ext, monomial, i_new as usize);
            let next = reduced.sub(&w.wp())?;
            match next.valuation() {
                Some(nv) if nv <= v => {
                    return Err(TowerError::InsufficientPrecision(format!(
                        "reduction step failed to raise v_F above {v}"
                    )))
                }
                _ => {}
            }
            reduced = next;
            witness = witness.add(&w)?;
            steps += 1;
        }
    }
}

fn reduce(v: i64, p: u32) -> u32 {
    v.rem_euclid(p as i64) as u32
}

pub(crate) fn binomial_mod(n: u32, k: u32, p: u32) -> u32 {
    if k > n {
        return 0;
    }
    // n < p here, so the factorials are units.
    let mut num = 1u32;
    let mut den = 1u32;
    for i in 0..k {
        num = mul_mod(num, n - i, p);
        den = mul_mod(den, i + 1, p);
    }
    mul_mod(num, inv_mod(den, p), p)
}

/// `y^0: <series> | y^1: <series> | …`
impl fmt::Display for ASElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.comps.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "y^{i}: {c}")?;
        }
        Ok(())
    }
}

impl ASElement {
    /// Parses the textual form produced by `Display` inside a given extension.
    pub fn parse(ext: &Arc<ASExtension>, s: &str) -> Result<Self> {
        let mut comps = Vec::new();
        for (i, part) in s.split('|').enumerate() {
            let part = part.trim();
            let (tag, series) =
                part.split_once(':').ok_or_else(|| TowerError::Parse(format!("missing 'y^i:' in {part:?}")))?;
            if tag.trim() != format!("y^{i}") {
                return Err(TowerError::Parse(format!("expected y^{i}, found {tag:?}")));
            }
            comps.push(LaurentSeries::from_str(series.trim())?);
        }
        ASElement::new(ext, comps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(p: u32, c: u32, e: i64) -> LaurentSeries {
        LaurentSeries::monomial(p, c, e, 200)
    }

    fn ext(p: u32, b: i64) -> Arc<ASExtension> {
        ASExtension::new(mono(p, 1, -b)).unwrap()
    }

    #[test]
    fn ext_make_examples() {
        assert_eq!(ext(3, 1).break_number(), 1);
        assert_eq!(ext(5, 3).break_number(), 3);
        assert_eq!(ASExtension::new(mono(3, 1, -3)).unwrap_err(), TowerError::DatumDivisibleByP { p: 3, b: 3 });
        assert!(matches!(ASExtension::new(mono(3, 1, 2)), Err(TowerError::NonNegativeDatum(Some(2)))));
    }

    #[test]
    fn defining_relation() {
        let e = ext(3, 1);
        let y = ASElement::generator(&e);
        let y2 = y.mul(&y).unwrap();
        let y3 = y.mul(&y2).unwrap();
        let expected = ASElement::new(&e, vec![mono(3, 1, -1), LaurentSeries::one(3, 200)]).unwrap();
        assert!(y3.agrees_with(&expected));
    }

    #[test]
    fn element_arithmetic_examples() {
        let e = ext(3, 1);
        let y = ASElement::generator(&e);
        let one = ASElement::from_base(&e, LaurentSeries::one(3, 200));
        let diff = y.add(&one).unwrap().sub(&y).unwrap();
        assert!(diff.agrees_with(&one));

        let alpha = mono(3, 1, -4);
        let ay = y.scale(&alpha);
        assert_eq!(ay.components()[1].terms().collect::<Vec<_>>(), vec![(-4, 1)]);
        assert_eq!(ay.valuation(), Some(-13));
    }

    #[test]
    fn valuation_examples() {
        let e = ext(3, 1);
        assert_eq!(ASElement::generator(&e).valuation(), Some(-1));
        assert_eq!(ASElement::from_base(&e, mono(3, 1, 1)).valuation(), Some(3));
        // α y + 2αβ with α = π^-4, β = π^-1
        let u = ASElement::new(&e, vec![mono(3, 2, -5), mono(3, 1, -4)]).unwrap();
        assert_eq!(u.valuation(), Some(-15));
        assert_eq!(ASElement::zero(&e).valuation(), None);
    }

    #[test]
    fn reduce_in_base_examples() {
        let r = reduce_in_base(&mono(3, 1, -1)).unwrap();
        assert_eq!(r.outcome, BreakOutcome::Wild(1));
        assert_eq!(r.steps, 0);

        // π^-3 - ℘(π^-1) = π^-1
        let r = reduce_in_base(&mono(3, 1, -3)).unwrap();
        assert_eq!(r.outcome, BreakOutcome::Wild(1));
        assert_eq!(r.reduced.terms().collect::<Vec<_>>(), vec![(-1, 1)]);
        assert_eq!(r.witness.terms().collect::<Vec<_>>(), vec![(-1, 1)]);

        assert_eq!(reduce_in_base(&LaurentSeries::one(3, 50)).unwrap().outcome, BreakOutcome::NonnegativeResidual);
    }

    #[test]
    fn reduce_in_base_insufficient_precision() {
        let z = LaurentSeries::zero(3, -4);
        assert!(matches!(reduce_in_base(&z), Err(TowerError::InsufficientPrecision(_))));
    }

    #[test]
    fn reduce_tower_datum() {
        // p=3, b=1, a=4: t=1, s=1, r=2; δ = αy + rαβ
        let e = ext(3, 1);
        let alpha = mono(3, 1, -4);
        let delta = ASElement::new(&e, vec![(&alpha * e.beta()).scale(Fp::raw(3, 2)), alpha]).unwrap();
        let red = delta.reduce().unwrap();
        assert_eq!(red.outcome, BreakOutcome::Wild(11));
        assert_eq!(red.reduced.valuation(), Some(-11));
        assert!(delta.sub(&red.witness.wp()).unwrap().agrees_with(&red.reduced));
    }

    #[test]
    fn reduce_in_f_trivial_cases() {
        let e = ext(3, 1);
        let y = ASElement::generator(&e);
        let r = y.wp().reduce().unwrap();
        assert_eq!(r.outcome, BreakOutcome::NonnegativeResidual);
        let r = y.reduce().unwrap();
        assert_eq!(r.outcome, BreakOutcome::Wild(1));
        assert_eq!(r.steps, 0);
    }

    #[test]
    fn text_round_trip() {
        let e = ext(5, 3);
        let u = ASElement::new(&e, vec![mono(5, 2, -5), mono(5, 1, -4)]).unwrap();
        let text = u.to_string();
        assert!(text.starts_with("y^0: p=5 prec=200 : -5:2 | y^1: p=5 prec=200 : -4:1 | y^2:"));
        assert_eq!(ASElement::parse(&e, &text).unwrap(), u);
        assert!(ASElement::parse(&e, "y^1: p=5 prec=3 :").is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial_mod(4, 2, 5), 1);
        assert_eq!(binomial_mod(3, 1, 5), 3);
        assert_eq!(binomial_mod(2, 3, 5), 0);
    }
}
