//! The rule executor shared by certificate construction and verification.

use std::fmt;

use super::certificate::parse_pairs;
use super::derive::{build_p3_tower, derive_nonint, NonintKind};
use super::{pick_a, pick_parameters, ForgeConfig, ForgeError, P3Parameters, Result};
use crate::astower::{reduce_in_base, ASElement, ASExtension, BreakOutcome};
use crate::laurent::LaurentSeries;
use crate::pgroups::{
    burnside_action_check, classify_minimal, is_isomorphic, minimal_nonabelian_quotient, Automorphism, GroupDescriptor,
    GroupError,
};
use crate::ramcalc::{fact1_resolve, format_rational, parse_rational, BreakMultiset, Numbering, Rational};

macro_rules! rules {
    ($($variant:ident => $name:literal, $cite:literal;)*) => {
        /// A derivation rule. Each rule has a fixed name and citation.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum Rule {
            $($variant,)*
        }

        impl Rule {
            pub const ALL: &'static [Rule] = &[$(Rule::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(Rule::$variant => $name,)*
                }
            }

            pub fn cite(self) -> &'static str {
                match self {
                    $(Rule::$variant => $cite,)*
                }
            }
        }
    };
}

rules! {
    AsReduceK => "as_reduce_K",
        "Artin-Schreier reduction over K; a reduced valuation -u < 0 with p not dividing u is the break";
    AsAdjoin => "as_adjoin",
        "adjoining an Artin-Schreier root adds its break to a disjoint upper multiset";
    AsReduceF => "as_reduce_F",
        "Artin-Schreier reduction over F = K(y) with v_F(c y^i) = p v_K(c) - i b";
    BreakFormula => "break_formula",
        "closed forms 2b + p(a - b) for break(E/F) and -pa + pb - 2b for the first residual";
    WpResidual => "wp_residual",
        "valuation of delta - wp(w) for the explicit first reduction element w = r pi^-s y^(t+1)";
    Fact1 => "fact1_resolve",
        "break bookkeeping for a central C_p x C_p quotient adding upper breaks u < v";
    ComposeDisjoint => "compose_disjoint",
        "upper breaks of a compositum of extensions with disjoint break sets";
    FiberProduct => "fiber_product",
        "upper breaks of a compositum over a shared C_p subextension";
    UpperToLower => "upper_to_lower",
        "inverse Herbrand function; integral lower breaks certify realizability";
    LowerToUpper => "lower_to_upper",
        "Herbrand function u_1 = b_1/m, u_(i+1) - u_i = (b_(i+1) - b_i)/(m p^i)";
    LowerMerge => "lower_merge",
        "the break of the smallest ramification subgroup extends the lower breaks of the quotient";
    Witness => "nonintegral_witness",
        "the unique nonintegral upper break, required to be the largest";
    PickParameters => "pick_parameters",
        "least a > b > v with p not dividing b and a not congruent to 0 or -b mod p";
    PickA => "pick_a",
        "least a > v with a not congruent to 0 or -b mod p";
    FirstBreak => "first_break",
        "the degree p subextension of a cyclic extension carries its least upper break";
    CyclicChain => "cyclic_chain",
        "upper breaks 1, p, ..., p^(k-1) of a cyclic extension of degree p^k";
    P3Tower => "p3_tower",
        "field-verified Heisenberg tower with upper breaks b, a, a + b/p";
    PeelTop => "peel_top",
        "the top upper break belongs to the smallest nontrivial ramification subgroup";
    GroupIso => "group_iso",
        "isomorphism test by generator-image search";
    Classify => "classify",
        "classification of minimal nonabelian p-groups into H(n,d) and A(n,d)";
    MinQuot => "minimal_quotient",
        "largest normal subgroup with minimal nonabelian quotient";
    Burnside => "burnside",
        "a p'-automorphism trivial on the Frattini quotient is trivial";
    Nonint => "nonint",
        "nonintegral-break certificate for a minimal nonabelian group";
    TameCompositum => "tame_compositum",
        "a tame C_m compositum keeps the positive upper breaks";
}

impl Rule {
    pub fn from_name(name: &str) -> Option<Self> {
        Rule::ALL.iter().copied().find(|r| r.name() == name)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

struct Inputs<'a>(&'a [(String, String)]);

impl Inputs<'_> {
    fn get(&self, key: &str) -> Result<&str> {
        self.0
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| ForgeError::Parse(format!("missing input {key}")))
    }

    fn opt(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn int<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let v = self.get(key)?;
        v.parse().map_err(|_| ForgeError::Parse(format!("input {key}={v} is not an integer")))
    }

    fn rational(&self, key: &str) -> Result<Rational> {
        Ok(parse_rational(self.get(key)?)?)
    }

    fn series(&self, key: &str) -> Result<LaurentSeries> {
        Ok(self.get(key)?.parse()?)
    }

    fn multiset(&self, key: &str) -> Result<BreakMultiset> {
        Ok(self.get(key)?.parse()?)
    }

    fn group(&self, key: &str) -> Result<GroupDescriptor> {
        Ok(self.get(key)?.parse()?)
    }

    fn config(&self) -> Result<ForgeConfig> {
        let d = ForgeConfig::default();
        Ok(ForgeConfig {
            precision: self.opt("precision").map_or(Ok(d.precision), |_| self.int("precision"))?,
            limit: self.opt("limit").map_or(Ok(d.limit), |_| self.int("limit"))?,
        })
    }
}

fn singleton(template: &BreakMultiset, x: Rational) -> Result<BreakMultiset> {
    Ok(template.with_breaks(vec![x])?)
}

fn outcome_break(o: BreakOutcome) -> Result<i64> {
    o.wild_break()
        .map(|b| b as i64)
        .ok_or_else(|| ForgeError::Constraint("datum reduces to a nonnegative residual".into()))
}

/// Reads `key=value` from a rule output.
pub(crate) fn output_field(output: &str, key: &str) -> Result<String> {
    parse_pairs(output)?
        .into_iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v)
        .ok_or_else(|| ForgeError::Parse(format!("output {output:?} has no {key}")))
}

/// Runs `rule` on `inputs` and renders its output.
pub(crate) fn execute(rule: Rule, inputs: &[(String, String)]) -> Result<String> {
    let inp = Inputs(inputs);
    match rule {
        Rule::AsReduceK => Ok(reduce_in_base(&inp.series("delta")?)?.outcome.to_string()),
        Rule::AsAdjoin => {
            let base = inp.multiset("base")?;
            let b = outcome_break(reduce_in_base(&inp.series("delta")?)?.outcome)?;
            Ok(base.compose_disjoint(&singleton(&base, Rational::from_integer(b))?)?.to_string())
        }
        Rule::AsReduceF => {
            let ext = ASExtension::new(inp.series("beta")?)?;
            let delta = ASElement::parse(&ext, inp.get("delta")?)?;
            Ok(delta.reduce()?.outcome.to_string())
        }
        Rule::BreakFormula => {
            let (p, b, a): (i64, i64, i64) = (inp.int("p")?, inp.int("b")?, inp.int("a")?);
            Ok(format!("ef={} residual={}", 2 * b + p * (a - b), -p * a + p * b - 2 * b))
        }
        Rule::WpResidual => {
            let ext = ASExtension::new(inp.series("beta")?)?;
            let delta = ASElement::parse(&ext, inp.get("delta")?)?;
            let w = ASElement::parse(&ext, inp.get("w")?)?;
            let residual = delta.sub(&w.wp())?;
            match residual.valuation() {
                Some(v) => Ok(format!("v_F={v}")),
                None => Err(ForgeError::Tower(crate::astower::TowerError::InsufficientPrecision(
                    "residual vanishes to the working precision".into(),
                ))),
            }
        }
        Rule::Fact1 => {
            let r = fact1_resolve(&inp.multiset("base")?, inp.rational("u")?, inp.rational("v")?)?;
            Ok(format!(
                "distinguished=[{}] top={} others=[{}] others_top={}",
                r.distinguished_upper, r.distinguished_top, r.others_upper, r.others_top
            ))
        }
        Rule::ComposeDisjoint => Ok(inp.multiset("lhs")?.compose_disjoint(&inp.multiset("rhs")?)?.to_string()),
        Rule::FiberProduct => {
            let (lhs, rhs, shared) = (inp.multiset("lhs")?, inp.multiset("rhs")?, inp.rational("shared")?);
            if lhs.breaks().first() != Some(&shared) || rhs.breaks().first() != Some(&shared) {
                return Err(ForgeError::Constraint(format!(
                    "shared break {} must be the least break of both sides",
                    format_rational(shared)
                )));
            }
            let rest = rhs.removed(shared).expect("shared break present");
            Ok(lhs.compose_disjoint(&rest)?.to_string())
        }
        Rule::UpperToLower => Ok(inp.multiset("upper")?.upper_to_lower()?.to_string()),
        Rule::LowerToUpper => Ok(inp.multiset("lower")?.lower_to_upper()?.to_string()),
        Rule::LowerMerge => {
            let lower = inp.multiset("lower")?;
            lower.ensure_numbering(Numbering::Lower)?;
            let extra = Rational::from_integer(inp.int("extra")?);
            if lower.max().is_some_and(|top| extra <= top) {
                return Err(ForgeError::Constraint(format!(
                    "new lower break {} must exceed the existing ones",
                    format_rational(extra)
                )));
            }
            Ok(lower.inserted(extra)?.to_string())
        }
        Rule::Witness => {
            let upper = inp.multiset("upper")?;
            let w = upper.sole_nonintegral().ok_or_else(|| {
                ForgeError::Constraint(format!("{upper} does not have exactly one nonintegral break"))
            })?;
            if upper.max() != Some(w) {
                return Err(ForgeError::Constraint(format!(
                    "nonintegral break {} is not the largest",
                    format_rational(w)
                )));
            }
            Ok(format_rational(w))
        }
        Rule::PickParameters => {
            let (b, a) = pick_parameters(inp.int("p")?, inp.rational("v")?)?;
            Ok(format!("b={b} a={a}"))
        }
        Rule::PickA => Ok(format!("a={}", pick_a(inp.int("p")?, inp.int("b")?, inp.rational("v")?)?)),
        Rule::FirstBreak => {
            let base = inp.multiset("upper")?;
            let b = *base.breaks().first().ok_or_else(|| ForgeError::Constraint("empty multiset".into()))?;
            if !b.is_integer() || b.to_integer() % base.prime() as i64 == 0 {
                return Err(ForgeError::Constraint(format!(
                    "least break {} must be an integer prime to p",
                    format_rational(b)
                )));
            }
            Ok(format!("b={}", b.to_integer()))
        }
        Rule::CyclicChain => {
            let (p, k): (u64, u32) = (inp.int("p")?, inp.int("k")?);
            let breaks = (0..k).map(|i| Rational::from_integer((p as i64).pow(i))).collect();
            Ok(BreakMultiset::upper(1, p, breaks)?.to_string())
        }
        Rule::P3Tower => {
            let params = P3Parameters::with_unit(inp.int("p")?, inp.int("b")?, inp.int("a")?, inp.int("unit")?)?;
            let cert = build_p3_tower(&params, inp.config()?)?;
            Ok(format!(
                "predicted=[{}] verified=[{}] witness={}",
                cert.predicted.expect("tower predicts breaks"),
                cert.verified.expect("tower verifies breaks"),
                format_rational(cert.witness.expect("tower has a witness"))
            ))
        }
        Rule::PeelTop => {
            let upper = inp.multiset("upper")?;
            let top = upper.max().ok_or_else(|| ForgeError::Constraint("empty multiset".into()))?;
            Ok(upper.removed(top).expect("top present").to_string())
        }
        Rule::GroupIso => {
            let limit: usize = inp.int("limit")?;
            let built = inp.group("lhs")?.build(limit).and_then(|g| Ok((g, inp_group(&inp, "rhs", limit)?)));
            match built {
                Ok((g, h)) => Ok(if is_isomorphic(&g, &h)? { "isomorphic" } else { "not-isomorphic" }.to_string()),
                Err(GroupError::LimitExceeded { .. }) => Ok(format!("unchecked order-exceeds-limit={limit}")),
                Err(e) => Err(e.into()),
            }
        }
        Rule::Classify => {
            let g = inp.group("group")?.build(inp.int("limit")?)?;
            Ok(classify_minimal(&g)?.to_string())
        }
        Rule::MinQuot => {
            let g = inp.group("group")?.build(inp.int("limit")?)?;
            let mq = minimal_nonabelian_quotient(&g)?;
            Ok(format!("kernel_order={} class=[{}]", mq.kernel.order(), mq.class))
        }
        Rule::Burnside => {
            let g = inp.group("group")?.build(inp.int("limit")?)?;
            let alpha = Automorphism::parse(&g, inp.get("action")?)?;
            let r = burnside_action_check(&g, &alpha, inp.int("m")?)?;
            Ok(format!(
                "nontrivial_on_p={} nontrivial_on_frattini_quotient={}",
                r.nontrivial_on_p, r.nontrivial_on_frattini_quotient
            ))
        }
        Rule::Nonint => {
            let kind: NonintKind = inp.get("kind")?.parse()?;
            let base = match inp.opt("base") {
                Some(_) => Some(inp.multiset("base")?),
                None => None,
            };
            let cert = derive_nonint(kind, inp.int("p")?, inp.int("n")?, inp.int("d")?, base.as_ref(), inp.config()?)?;
            Ok(format!(
                "predicted=[{}] verified=[{}] witness={}",
                cert.predicted.expect("nonint predicts breaks"),
                cert.verified.expect("nonint verifies breaks"),
                format_rational(cert.witness.expect("nonint has a witness"))
            ))
        }
        Rule::TameCompositum => {
            let upper = inp.multiset("upper")?;
            upper.ensure_numbering(Numbering::Upper)?;
            if upper.tame_degree() != 1 {
                return Err(ForgeError::Constraint("input must be a p-extension".into()));
            }
            Ok(BreakMultiset::upper(inp.int("m")?, upper.prime(), upper.breaks().to_vec())?.to_string())
        }
    }
}

fn inp_group(inp: &Inputs<'_>, key: &str, limit: usize) -> std::result::Result<crate::pgroups::PGroup, GroupError> {
    let d: GroupDescriptor = inp.get(key).map_err(|e| GroupError::Parse(e.to_string()))?.parse()?;
    d.build(limit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(rule: Rule, pairs: &[(&str, &str)]) -> Result<String> {
        let inputs: Vec<(String, String)> = pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        execute(rule, &inputs)
    }

    #[test]
    fn names_are_unique_and_round_trip() {
        for (i, r) in Rule::ALL.iter().enumerate() {
            assert_eq!(Rule::from_name(r.name()), Some(*r));
            assert!(!r.cite().contains('"'));
            assert!(Rule::ALL[i + 1..].iter().all(|s| s.name() != r.name()));
        }
        assert_eq!(Rule::from_name("frobnicate"), None);
    }

    #[test]
    fn arithmetic_rules() {
        assert_eq!(run(Rule::BreakFormula, &[("p", "3"), ("b", "1"), ("a", "4")]).unwrap(), "ef=11 residual=-11");
        assert_eq!(run(Rule::PickParameters, &[("p", "3"), ("v", "13/3")]).unwrap(), "b=5 a=8");
        assert_eq!(run(Rule::PickA, &[("p", "3"), ("b", "1"), ("v", "4")]).unwrap(), "a=7");
        assert_eq!(run(Rule::CyclicChain, &[("p", "3"), ("k", "3")]).unwrap(), "upper m=1 p=3 : 1, 3, 9");
        assert_eq!(run(Rule::PeelTop, &[("upper", "upper m=1 p=3 : 1, 4, 13/3")]).unwrap(), "upper m=1 p=3 : 1, 4");
        assert_eq!(run(Rule::Witness, &[("upper", "upper m=1 p=3 : 1, 4, 13/3")]).unwrap(), "13/3");
        assert!(run(Rule::Witness, &[("upper", "upper m=1 p=3 : 1, 13/3, 5")]).is_err());
        assert_eq!(
            run(Rule::LowerMerge, &[("lower", "lower m=1 p=3 : 1, 7"), ("extra", "13")]).unwrap(),
            "lower m=1 p=3 : 1, 7, 13"
        );
        assert!(run(Rule::LowerMerge, &[("lower", "lower m=1 p=3 : 1, 7"), ("extra", "5")]).is_err());
        assert_eq!(
            run(
                Rule::FiberProduct,
                &[("lhs", "upper m=1 p=3 : 1, 4"), ("rhs", "upper m=1 p=3 : 1, 7, 22/3"), ("shared", "1")]
            )
            .unwrap(),
            "upper m=1 p=3 : 1, 4, 7, 22/3"
        );
        assert_eq!(
            run(Rule::TameCompositum, &[("upper", "upper m=1 p=3 : 1, 4, 13/3"), ("m", "2")]).unwrap(),
            "upper m=2 p=3 : 1, 4, 13/3"
        );
    }

    #[test]
    fn reduction_rules() {
        assert_eq!(run(Rule::AsReduceK, &[("delta", "p=3 prec=20 : -3:1")]).unwrap(), "break=1");
        assert_eq!(
            run(Rule::AsAdjoin, &[("base", "upper m=1 p=3 : 1"), ("delta", "p=3 prec=20 : -4:1")]).unwrap(),
            "upper m=1 p=3 : 1, 4"
        );
        assert!(run(Rule::AsAdjoin, &[("base", "upper m=1 p=3 : 1"), ("delta", "p=3 prec=20 : 2:1")]).is_err());
    }

    #[test]
    fn group_rules() {
        let h11 = "kind=H p=3 n=1 d=1";
        assert_eq!(run(Rule::Classify, &[("group", h11), ("limit", "10000")]).unwrap(), "H n=1 d=1");
        assert_eq!(
            run(Rule::GroupIso, &[("lhs", h11), ("rhs", "kind=A p=3 n=1 d=1"), ("limit", "10000")]).unwrap(),
            "not-isomorphic"
        );
        assert_eq!(
            run(Rule::GroupIso, &[("lhs", "kind=H p=3 n=3 d=1"), ("rhs", "kind=H p=3 n=3 d=1"), ("limit", "100")])
                .unwrap(),
            "unchecked order-exceeds-limit=100"
        );
        assert_eq!(
            run(Rule::Burnside, &[("group", h11), ("action", "x1,y1^-1,z^-1"), ("m", "2"), ("limit", "10000")])
                .unwrap(),
            "nontrivial_on_p=true nontrivial_on_frattini_quotient=true"
        );
    }

    #[test]
    fn missing_and_malformed_inputs() {
        assert!(matches!(run(Rule::BreakFormula, &[("p", "3")]), Err(ForgeError::Parse(_))));
        assert!(matches!(run(Rule::BreakFormula, &[("p", "x"), ("b", "1"), ("a", "4")]), Err(ForgeError::Parse(_))));
    }
}
