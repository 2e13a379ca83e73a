//! Independent re-execution of certificate text.

use super::certificate::{Certificate, CertificateKind};
use super::derive::{build_p3_tower, derive_chat, derive_nonint, NonintKind};
use super::rules::execute;
use super::{ForgeConfig, ForgeError, P3Parameters, Result};
use crate::ramcalc::Rational;

/// What a successful verification established.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub kind: CertificateKind,
    pub steps: usize,
    pub assumptions: usize,
    pub witness: Option<Rational>,
}

/// Re-executes every step, then regenerates the certificate from its
/// `PARAMS` and requires the text to match line for line.
pub fn verify_certificate(text: &str) -> Result<VerifyReport> {
    let cert: Certificate = text.parse()?;
    for (i, step) in cert.steps.iter().enumerate() {
        let detail = match execute(step.rule, &step.inputs) {
            Ok(out) if out == step.output => continue,
            Ok(out) => format!("re-execution gives {out:?}, certificate records {:?}", step.output),
            Err(e) => format!("re-execution failed: {e}"),
        };
        return Err(ForgeError::Mismatch { step: i + 1, rule: step.rule.name().into(), detail });
    }

    let regenerated = regenerate(&cert)?;
    if let Some(k) = regenerated.first_differing_step(&cert) {
        let rule = cert.steps.get(k - 1).or(regenerated.steps.get(k - 1)).expect("step exists").rule;
        return Err(ForgeError::Mismatch {
            step: k,
            rule: rule.name().into(),
            detail: "step differs from the derivation regenerated from PARAMS".into(),
        });
    }
    let expected = regenerated.to_string();
    for (i, (e, f)) in expected.lines().zip(text.lines()).enumerate() {
        if e != f {
            return Err(ForgeError::Regeneration { line: i + 1, expected: e.into(), found: f.into() });
        }
    }
    let (ne, nf) = (expected.lines().count(), text.lines().count());
    if ne != nf {
        let line = ne.min(nf) + 1;
        return Err(ForgeError::Regeneration {
            line,
            expected: expected.lines().nth(line - 1).unwrap_or("<end>").into(),
            found: text.lines().nth(line - 1).unwrap_or("<end>").into(),
        });
    }
    Ok(VerifyReport {
        kind: cert.kind,
        steps: cert.steps.len(),
        assumptions: cert.assumptions.len(),
        witness: cert.witness,
    })
}

fn param<T: std::str::FromStr>(cert: &Certificate, key: &str) -> Result<T> {
    let raw = cert.param(key).ok_or_else(|| ForgeError::Parse(format!("PARAMS lacks {key}")))?;
    raw.parse().map_err(|_| ForgeError::Parse(format!("PARAMS {key}={raw:?} is malformed")))
}

fn config(cert: &Certificate) -> Result<ForgeConfig> {
    let mut config = ForgeConfig { precision: param(cert, "precision")?, ..ForgeConfig::default() };
    if cert.param("limit").is_some() {
        config.limit = param(cert, "limit")?;
    }
    Ok(config)
}

fn regenerate(cert: &Certificate) -> Result<Certificate> {
    let config = config(cert)?;
    match cert.kind {
        CertificateKind::P3Tower => {
            let pr =
                P3Parameters::with_unit(param(cert, "p")?, param(cert, "b")?, param(cert, "a")?, param(cert, "unit")?)?;
            build_p3_tower(&pr, config)
        }
        CertificateKind::NonintH | CertificateKind::NonintA | CertificateKind::NonintA1d => {
            let kind: NonintKind = param(cert, "family")?;
            let base = match cert.param("base") {
                None | Some("auto") => None,
                Some(text) => Some(text.parse()?),
            };
            derive_nonint(kind, param(cert, "p")?, param(cert, "n")?, param(cert, "d")?, base.as_ref(), config)
        }
        CertificateKind::Pchat | CertificateKind::Chat => {
            let group = param(cert, "group")?;
            let action = cert.param("action").ok_or_else(|| ForgeError::Parse("PARAMS lacks action".into()))?;
            derive_chat(&group, param(cert, "m")?, Some(action), config)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tower() -> String {
        build_p3_tower(&P3Parameters::new(3, 1, 4).unwrap(), ForgeConfig::default()).unwrap().to_string()
    }

    #[test]
    fn genuine_certificate_verifies() {
        let report = verify_certificate(&tower()).unwrap();
        assert_eq!(report.kind, CertificateKind::P3Tower);
        assert_eq!(report.witness, Some(Rational::new(13, 3)));
    }

    #[test]
    fn tampered_output_is_located() {
        let text = tower().replace("output break=11", "output break=10");
        match verify_certificate(&text) {
            Err(ForgeError::Mismatch { step, rule, .. }) => assert_eq!((step, rule.as_str()), (3, "as_reduce_F")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tampered_summary_is_caught() {
        let text = tower().replace("WITNESS: 13/3", "WITNESS: 14/3");
        assert!(matches!(verify_certificate(&text), Err(ForgeError::Regeneration { .. })));
    }

    #[test]
    fn tampered_params_are_caught() {
        // Steps still re-execute, but no longer match the derivation for b=2.
        let text = tower().replacen("b=1 a=4", "b=2 a=4", 1);
        assert!(verify_certificate(&text).is_err());
    }

    #[test]
    fn unknown_rule_is_reported() {
        let text = tower().replacen("RULE as_reduce_K", "RULE magic", 1);
        assert!(matches!(verify_certificate(&text), Err(ForgeError::UnknownRule(_))));
    }

    #[test]
    fn other_kinds_verify() {
        let c = derive_nonint(NonintKind::A1d, 3, 1, 1, None, ForgeConfig::default()).unwrap();
        verify_certificate(&c.to_string()).unwrap();
        let g = "kind=H p=3 n=1 d=1".parse().unwrap();
        let c = derive_chat(&g, 2, None, ForgeConfig::default()).unwrap();
        verify_certificate(&c.to_string()).unwrap();
    }
}
