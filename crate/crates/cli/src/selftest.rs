//! Randomized self-checks and their replayable corpora.
//!
//! A corpus directory holds `herbrand.txt` (one lower multiset per line) and
//! `reduction.txt` (lines `b ; <series> | <series> ...`, the components of
//! `δ` over `F = K(y)`, `y^p - y = π^{-b}`). Existing lines are replayed
//! before new cases are drawn; new cases are appended.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use ramforge::astower::{ASElement, ASExtension, BreakOutcome};
use ramforge::laurent::LaurentSeries;
use ramforge::ramcalc::{BreakMultiset, Numbering};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Series precision for generated `δ`; well above every generated valuation.
pub const DELTA_PRECISION: i64 = 120;

/// A realizable lower multiset with `m ∈ {1,2,4}`, `p ∈ {3,5}`, at most six
/// breaks.
pub fn random_lower(rng: &mut impl Rng) -> BreakMultiset {
    let m = [1u64, 2, 4][rng.random_range(0..3)];
    let p = [3u64, 5][rng.random_range(0..2)];
    let n = rng.random_range(1..=6);
    let mut b = rng.random_range(1..=20i64);
    let mut breaks = Vec::with_capacity(n);
    for _ in 0..n {
        breaks.push(b);
        b += rng.random_range(0..=40);
    }
    BreakMultiset::lower(m, p, breaks).expect("positive breaks with valid m, p")
}

/// `upper_to_lower ∘ lower_to_upper = id`.
pub fn check_herbrand(lower: &BreakMultiset) -> Result<(), String> {
    lower.ensure_numbering(Numbering::Lower).map_err(|e| e.to_string())?;
    let upper = lower.lower_to_upper().map_err(|e| e.to_string())?;
    let back = upper.upper_to_lower().map_err(|e| format!("{upper}: {e}"))?;
    if &back == lower {
        Ok(())
    } else {
        Err(format!("{lower} -> {upper} -> {back}"))
    }
}

/// The extension `y^p - y = π^{-b}` at [`DELTA_PRECISION`].
pub fn extension(p: u32, b: i64) -> std::sync::Arc<ASExtension> {
    ASExtension::new(LaurentSeries::monomial(p, 1, -b, DELTA_PRECISION)).expect("p prime, b > 0 prime to p")
}

/// A random `δ = Σ c_i y^i` with `v_K(c_i) ≥ -12`.
pub fn random_delta(rng: &mut impl Rng, p: u32, b: i64) -> ASElement {
    let ext = extension(p, b);
    let comps = (0..p)
        .map(|_| {
            let val = rng.random_range(-12i64..4);
            let len = rng.random_range(0..6);
            let coeffs: Vec<i64> = (0..len).map(|_| rng.random_range(0..p as i64)).collect();
            LaurentSeries::from_ints(p, val, &coeffs, DELTA_PRECISION).expect("valid series")
        })
        .collect();
    ASElement::new(&ext, comps).expect("p components")
}

/// `reduced = δ - ℘(witness)` and the outcome matches the final valuation.
pub fn check_reduction(delta: &ASElement) -> Result<BreakOutcome, String> {
    let red = delta.reduce().map_err(|e| e.to_string())?;
    let recomputed = delta.sub(&red.witness.wp()).map_err(|e| e.to_string())?;
    if !recomputed.agrees_with(&red.reduced) {
        return Err(format!("reduced datum differs from delta - wp(witness) for {delta}"));
    }
    let p = delta.extension().modulus() as i64;
    match (red.outcome, red.reduced.valuation()) {
        (BreakOutcome::Wild(b), Some(v)) if v == -(b as i64) && v % p != 0 => Ok(red.outcome),
        (BreakOutcome::NonnegativeResidual, v) if v.is_none_or(|v| v >= 0) => Ok(red.outcome),
        (outcome, v) => Err(format!("outcome {outcome} inconsistent with valuation {v:?} for {delta}")),
    }
}

fn delta_line(b: i64, delta: &ASElement) -> String {
    let comps: Vec<String> = delta.components().iter().map(ToString::to_string).collect();
    format!("{b} ; {}", comps.join(" | "))
}

fn parse_delta_line(line: &str) -> Result<ASElement, String> {
    let (b, rest) = line.split_once(" ; ").ok_or("expected `b ; components`")?;
    let b: i64 = b.trim().parse().map_err(|_| format!("bad b {b:?}"))?;
    let comps = rest
        .split(" | ")
        .map(|c| c.parse::<LaurentSeries>().map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let p = comps.first().ok_or("no components")?.modulus();
    let ext = ASExtension::new(LaurentSeries::monomial(p, 1, -b, comps[0].precision())).map_err(|e| e.to_string())?;
    ASElement::new(&ext, comps).map_err(|e| e.to_string())
}

/// Counts from a selftest run.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct SelftestSummary {
    pub replayed: usize,
    pub generated: usize,
    pub failures: Vec<String>,
}

/// Replays the corpus in `dir` (if any), then draws `cases` new cases of
/// each kind from `seed` and appends them.
pub fn run_selftest(dir: Option<&Path>, seed: u64, cases: usize) -> std::io::Result<SelftestSummary> {
    let mut summary = SelftestSummary::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
        for line in read_lines(&dir.join("herbrand.txt"))? {
            summary.replayed += 1;
            let res = line.parse::<BreakMultiset>().map_err(|e| e.to_string()).and_then(|ms| check_herbrand(&ms));
            if let Err(e) = res {
                summary.failures.push(format!("herbrand corpus: {e}"));
            }
        }
        for line in read_lines(&dir.join("reduction.txt"))? {
            summary.replayed += 1;
            if let Err(e) = parse_delta_line(&line).and_then(|d| check_reduction(&d)) {
                summary.failures.push(format!("reduction corpus: {e}"));
            }
        }
    }
    let mut herbrand_new = Vec::with_capacity(cases);
    let mut reduction_new = Vec::with_capacity(cases);
    for i in 0..cases {
        let lower = random_lower(&mut rng);
        if let Err(e) = check_herbrand(&lower) {
            summary.failures.push(format!("herbrand case {i}: {e}"));
        }
        herbrand_new.push(lower.to_string());
        let (p, b) = [(3, 1), (3, 2), (5, 1)][i % 3];
        let delta = random_delta(&mut rng, p, b);
        if let Err(e) = check_reduction(&delta) {
            summary.failures.push(format!("reduction case {i}: {e}"));
        }
        reduction_new.push(delta_line(b, &delta));
        summary.generated += 2;
    }
    if let Some(dir) = dir {
        append_lines(&dir.join("herbrand.txt"), &herbrand_new)?;
        append_lines(&dir.join("reduction.txt"), &reduction_new)?;
    }
    Ok(summary)
}

fn read_lines(path: &Path) -> std::io::Result<Vec<String>> {
    match fs::read_to_string(path) {
        Ok(text) => Ok(text.lines().filter(|l| !l.trim().is_empty()).map(str::to_string).collect()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(e) => Err(e),
    }
}

fn append_lines(path: &Path, lines: &[String]) -> std::io::Result<()> {
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
    for l in lines {
        writeln!(f, "{l}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_lines_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (p, b) in [(3, 1), (5, 1)] {
            let d = random_delta(&mut rng, p, b);
            let back = parse_delta_line(&delta_line(b, &d)).unwrap();
            assert!(back.agrees_with(&d));
        }
    }

    #[test]
    fn corpus_is_replayed() {
        let dir = tempfile::tempdir().unwrap();
        let first = run_selftest(Some(dir.path()), 1, 5).unwrap();
        assert_eq!((first.replayed, first.generated), (0, 10));
        assert!(first.failures.is_empty(), "{:?}", first.failures);
        let second = run_selftest(Some(dir.path()), 2, 1).unwrap();
        assert_eq!(second.replayed, 10);
        assert!(second.failures.is_empty(), "{:?}", second.failures);
    }
}
