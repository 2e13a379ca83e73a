//! Line-oriented certificate text.
//!
//! ```text
//! CERTIFICATE kind=p3-tower
//! PARAMS p=3 b=1 a=4 ...
//! step 1: RULE as_reduce_K cite "..." inputs delta=[...] output break=1
//! ASSUMPTIONS:
//! A1: <statement> cite "..."
//! PREDICTED: upper m=1 p=3 : 1, 4, 13/3
//! VERIFIED: upper m=1 p=3 : 1, 4
//! WITNESS: 13/3
//! ```
//!
//! Values containing spaces are written in brackets; bracketed values never
//! contain `[` or `]`.

use std::fmt;
use std::str::FromStr;

use super::{ForgeError, Result, Rule};
use crate::ramcalc::{format_rational, parse_rational, BreakMultiset, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CertificateKind {
    P3Tower,
    NonintH,
    NonintA,
    NonintA1d,
    Pchat,
    Chat,
}

impl CertificateKind {
    pub fn name(self) -> &'static str {
        match self {
            CertificateKind::P3Tower => "p3-tower",
            CertificateKind::NonintH => "nonint-H",
            CertificateKind::NonintA => "nonint-A",
            CertificateKind::NonintA1d => "nonint-A1d",
            CertificateKind::Pchat => "pchat",
            CertificateKind::Chat => "chat",
        }
    }
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CertificateKind {
    type Err = ForgeError;

    fn from_str(s: &str) -> Result<Self> {
        [
            CertificateKind::P3Tower,
            CertificateKind::NonintH,
            CertificateKind::NonintA,
            CertificateKind::NonintA1d,
            CertificateKind::Pchat,
            CertificateKind::Chat,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| ForgeError::Parse(format!("unknown certificate kind {s:?}")))
    }
}

/// One rule application. Inputs keep their textual form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub rule: Rule,
    pub inputs: Vec<(String, String)>,
    pub output: String,
}

impl Step {
    pub fn input(&self, key: &str) -> Option<&str> {
        self.inputs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// A named hypothesis that the certificate does not verify.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assumption {
    pub id: String,
    pub statement: String,
    pub cite: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub params: Vec<(String, String)>,
    pub steps: Vec<Step>,
    pub assumptions: Vec<Assumption>,
    pub predicted: Option<BreakMultiset>,
    pub verified: Option<BreakMultiset>,
    pub witness: Option<Rational>,
}

impl Certificate {
    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Index (1-based) of the first step whose text differs from `other`.
    pub fn first_differing_step(&self, other: &Certificate) -> Option<usize> {
        let n = self.steps.len().max(other.steps.len());
        (0..n).find(|&i| self.steps.get(i) != other.steps.get(i)).map(|i| i + 1)
    }
}

pub(crate) fn format_value(v: &str) -> String {
    if v.is_empty() || v.contains(char::is_whitespace) {
        format!("[{v}]")
    } else {
        v.to_string()
    }
}

pub(crate) fn format_pairs(pairs: &[(String, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k}={}", format_value(v))).collect::<Vec<_>>().join(" ")
}

/// Splits `k=v k=[v w] …` into pairs.
pub(crate) fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut rest = text.trim_start();
    while !rest.is_empty() {
        let eq = rest.find('=').ok_or_else(|| ForgeError::Parse(format!("expected key=value at {rest:?}")))?;
        let key = &rest[..eq];
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(ForgeError::Parse(format!("bad key {key:?}")));
        }
        rest = &rest[eq + 1..];
        let value;
        if let Some(inner) = rest.strip_prefix('[') {
            let close = inner.find(']').ok_or_else(|| ForgeError::Parse(format!("unclosed bracket for {key}")))?;
            value = &inner[..close];
            rest = &inner[close + 1..];
            if !(rest.is_empty() || rest.starts_with(char::is_whitespace)) {
                return Err(ForgeError::Parse(format!("junk after bracketed value for {key}")));
            }
        } else {
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            value = &rest[..end];
            rest = &rest[end..];
        }
        out.push((key.to_string(), value.to_string()));
        rest = rest.trim_start();
    }
    Ok(out)
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CERTIFICATE kind={}", self.kind)?;
        writeln!(f, "PARAMS {}", format_pairs(&self.params))?;
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(
                f,
                "step {}: RULE {} cite \"{}\" inputs {} output {}",
                i + 1,
                s.rule.name(),
                s.rule.cite(),
                format_pairs(&s.inputs),
                s.output
            )?;
        }
        writeln!(f, "ASSUMPTIONS:")?;
        for a in &self.assumptions {
            writeln!(f, "{}: {} cite \"{}\"", a.id, a.statement, a.cite)?;
        }
        let opt = |m: &Option<BreakMultiset>| m.as_ref().map_or("none".to_string(), ToString::to_string);
        writeln!(f, "PREDICTED: {}", opt(&self.predicted))?;
        writeln!(f, "VERIFIED: {}", opt(&self.verified))?;
        writeln!(f, "WITNESS: {}", self.witness.map_or("none".to_string(), format_rational))
    }
}

fn parse_step(line: &str, expected: usize) -> Result<Step> {
    let bad = |what: &str| ForgeError::Parse(format!("step {expected}: {what}"));
    let rest = line.strip_prefix(&format!("step {expected}: RULE ")).ok_or_else(|| bad("expected `step N: RULE`"))?;
    let (name, rest) = rest.split_once(' ').ok_or_else(|| bad("missing rule name"))?;
    let rule = Rule::from_name(name).ok_or_else(|| ForgeError::UnknownRule(name.to_string()))?;
    let rest = rest.strip_prefix("cite \"").ok_or_else(|| bad("missing cite"))?;
    let (cite, rest) = rest.split_once('"').ok_or_else(|| bad("unterminated cite"))?;
    if cite != rule.cite() {
        return Err(bad(&format!("cite for {name} does not match the rule")));
    }
    let rest = rest.strip_prefix(" inputs ").ok_or_else(|| bad("missing inputs"))?;
    // `output` never appears inside an input: keys are identifiers and values are bracketed or bare.
    let split = find_output(rest).ok_or_else(|| bad("missing output"))?;
    let inputs = parse_pairs(&rest[..split])?;
    let output = rest[split + " output ".len()..].to_string();
    Ok(Step { rule, inputs, output })
}

/// Byte offset of ` output ` outside brackets.
fn find_output(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            ' ' if depth == 0 && s[i..].starts_with(" output ") => return Some(i),
            _ => {}
        }
    }
    None
}

impl FromStr for Certificate {
    type Err = ForgeError;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut next = |what: &str| lines.next().ok_or_else(|| ForgeError::Parse(format!("missing {what}")));

        let head = next("CERTIFICATE line")?;
        let kind = head
            .strip_prefix("CERTIFICATE kind=")
            .ok_or_else(|| ForgeError::Parse("first line must be `CERTIFICATE kind=...`".into()))?
            .parse()?;
        let params = parse_pairs(
            next("PARAMS line")?.strip_prefix("PARAMS ").ok_or_else(|| ForgeError::Parse("expected PARAMS".into()))?,
        )?;

        let mut steps = Vec::new();
        let mut line = next("ASSUMPTIONS:")?;
        while line.starts_with("step ") {
            steps.push(parse_step(line, steps.len() + 1)?);
            line = next("ASSUMPTIONS:")?;
        }
        if line != "ASSUMPTIONS:" {
            return Err(ForgeError::Parse(format!("expected ASSUMPTIONS:, found {line:?}")));
        }
        let mut assumptions = Vec::new();
        line = next("PREDICTED:")?;
        while !line.starts_with("PREDICTED:") {
            let (id, rest) =
                line.split_once(": ").ok_or_else(|| ForgeError::Parse(format!("bad assumption {line:?}")))?;
            let (statement, cite) =
                rest.split_once(" cite \"").ok_or_else(|| ForgeError::Parse(format!("assumption {id} has no cite")))?;
            let cite = cite
                .strip_suffix('"')
                .ok_or_else(|| ForgeError::Parse(format!("assumption {id}: unterminated cite")))?;
            assumptions.push(Assumption { id: id.into(), statement: statement.into(), cite: cite.into() });
            line = next("PREDICTED:")?;
        }
        let multiset = |l: &str, tag: &str| -> Result<Option<BreakMultiset>> {
            let v = l.strip_prefix(tag).ok_or_else(|| ForgeError::Parse(format!("expected {tag}")))?.trim();
            if v == "none" {
                Ok(None)
            } else {
                Ok(Some(v.parse()?))
            }
        };
        let predicted = multiset(line, "PREDICTED:")?;
        let verified = multiset(next("VERIFIED:")?, "VERIFIED:")?;
        let w = next("WITNESS:")?
            .strip_prefix("WITNESS:")
            .ok_or_else(|| ForgeError::Parse("expected WITNESS:".into()))?
            .trim();
        let witness = if w == "none" { None } else { Some(parse_rational(w)?) };
        if let Some(extra) = lines.next() {
            return Err(ForgeError::Parse(format!("trailing line {extra:?}")));
        }
        Ok(Certificate { kind, params, steps, assumptions, predicted, verified, witness })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_round_trip() {
        let pairs = vec![
            ("p".to_string(), "3".to_string()),
            ("base".to_string(), "upper m=1 p=3 : 1, 4".to_string()),
            ("empty".to_string(), String::new()),
        ];
        let text = format_pairs(&pairs);
        assert_eq!(text, "p=3 base=[upper m=1 p=3 : 1, 4] empty=[]");
        assert_eq!(parse_pairs(&text).unwrap(), pairs);
    }

    #[test]
    fn pairs_errors() {
        assert!(parse_pairs("p").is_err());
        assert!(parse_pairs("p=[3").is_err());
        assert!(parse_pairs("p=[3]x").is_err());
        assert!(parse_pairs("=3").is_err());
    }

    #[test]
    fn output_split_ignores_brackets() {
        let s = "x=[a output b] y=1 output done";
        assert_eq!(&s[find_output(s).unwrap()..], " output done");
    }

    #[test]
    fn kinds_round_trip() {
        for k in ["p3-tower", "nonint-H", "nonint-A", "nonint-A1d", "pchat", "chat"] {
            assert_eq!(k.parse::<CertificateKind>().unwrap().name(), k);
        }
        assert!("tower".parse::<CertificateKind>().is_err());
    }
}
