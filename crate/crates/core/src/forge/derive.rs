//! Certificate construction.

use std::fmt;
use std::str::FromStr;

use super::certificate::{Assumption, Certificate, CertificateKind, Step};
use super::rules::{execute, output_field};
use super::{ForgeConfig, ForgeError, P3Parameters, Result, Rule};
use crate::astower::{ASElement, ASExtension};
use crate::laurent::{check_prime, LaurentSeries};
use crate::pgroups::GroupDescriptor;
use crate::ramcalc::{format_rational, parse_rational, BreakMultiset, Numbering, Rational};

/// Records rule applications through the shared executor.
#[derive(Default)]
struct Builder {
    steps: Vec<Step>,
}

impl Builder {
    fn run(&mut self, rule: Rule, inputs: &[(&str, String)]) -> Result<String> {
        let inputs: Vec<(String, String)> = inputs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        let output = execute(rule, &inputs)?;
        self.steps.push(Step { rule, inputs, output: output.clone() });
        Ok(output)
    }

    /// Fails unless the last output equals `expected`.
    fn expect(&self, found: &str, expected: impl fmt::Display) -> Result<()> {
        let expected = expected.to_string();
        if found == expected {
            return Ok(());
        }
        let last = self.steps.last().expect("a step ran");
        Err(ForgeError::Mismatch {
            step: self.steps.len(),
            rule: last.rule.name().into(),
            detail: format!("computed {found:?} but the derivation requires {expected:?}"),
        })
    }
}

fn pairs(items: &[(&str, String)]) -> Vec<(String, String)> {
    items.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn assumption(id: &str, statement: &str, cite: &str) -> Assumption {
    Assumption { id: id.into(), statement: statement.into(), cite: cite.into() }
}

fn upper(p: u32, breaks: Vec<Rational>) -> Result<BreakMultiset> {
    Ok(BreakMultiset::upper(1, p as u64, breaks)?)
}

fn int(x: i64) -> Rational {
    Rational::from_integer(x)
}

/// The full tower `L ⊃ M ⊃ F ⊃ K` with `Gal(L/K) ≅ H(1,1)`; every field
/// break is recomputed by Artin-Schreier reduction and compared with its
/// closed form.
pub fn build_p3_tower(pr: &P3Parameters, config: ForgeConfig) -> Result<Certificate> {
    let (p, b, a) = (pr.p, pr.b, pr.a);
    let pi = p as i64;
    let prec = config.precision;
    let mut bld = Builder::default();

    let beta = LaurentSeries::monomial(p, pr.unit, -b, prec);
    let out = bld.run(Rule::AsReduceK, &[("delta", beta.to_string())])?;
    bld.expect(&out, format!("break={b}"))?;

    let alpha = &LaurentSeries::monomial(p, 1, -pi * pr.s, prec) * &beta.pow(pr.t);
    let u_f = upper(p, vec![int(b)])?;
    let u_m = bld.run(Rule::AsAdjoin, &[("base", u_f.to_string()), ("delta", alpha.to_string())])?;
    bld.expect(&u_m, upper(p, vec![int(b), int(a)])?)?;

    let ext = ASExtension::new(beta.clone())?;
    let r_alpha_beta = (&alpha * &beta).scale(crate::laurent::Fp::new(p, pr.r as i64)?);
    let delta = ASElement::new(&ext, vec![r_alpha_beta, alpha.clone()])?;
    let out = bld.run(Rule::AsReduceF, &[("beta", beta.to_string()), ("delta", delta.to_string())])?;
    bld.expect(&out, format!("break={}", pr.ef_break()))?;

    let out = bld.run(Rule::BreakFormula, &[("p", p.to_string()), ("b", b.to_string()), ("a", a.to_string())])?;
    bld.expect(&out, format!("ef={} residual={}", pr.ef_break(), pr.residual_valuation()))?;

    let w = ASElement::monomial_series(&ext, LaurentSeries::monomial(p, pr.r, -pr.s, prec), pr.t as usize + 1);
    let out =
        bld.run(Rule::WpResidual, &[("beta", beta.to_string()), ("delta", delta.to_string()), ("w", w.to_string())])?;
    bld.expect(&out, format!("v_F={}", pr.residual_valuation()))?;

    let mf = b + pi * (a - b);
    let out = bld.run(
        Rule::Fact1,
        &[
            ("base", upper(p, vec![])?.to_string()),
            ("u", b.to_string()),
            ("v", a.to_string()),
            ("assumes", "A1".into()),
        ],
    )?;
    bld.expect(&output_field(&out, "top")?, mf)?;

    let l_over_f = bld.run(
        Rule::ComposeDisjoint,
        &[("lhs", upper(p, vec![int(mf)])?.to_string()), ("rhs", upper(p, vec![int(pr.ef_break())])?.to_string())],
    )?;
    let lower_lf = bld.run(Rule::UpperToLower, &[("upper", l_over_f)])?;
    bld.expect(&lower_lf, BreakMultiset::lower(1, p as u64, vec![mf, b + pi * a])?)?;

    let lower_mk = bld.run(Rule::UpperToLower, &[("upper", u_m.clone())])?;
    let lower_lk = bld
        .run(Rule::LowerMerge, &[("lower", lower_mk), ("extra", (b + pi * a).to_string()), ("assumes", "A2".into())])?;
    bld.expect(&lower_lk, BreakMultiset::lower(1, p as u64, vec![b, mf, b + pi * a])?)?;

    let predicted = bld.run(Rule::LowerToUpper, &[("lower", lower_lk)])?;
    bld.expect(&predicted, upper(p, vec![int(b), int(a), pr.witness()])?)?;
    let witness = bld.run(Rule::Witness, &[("upper", predicted.clone())])?;

    Ok(Certificate {
        kind: CertificateKind::P3Tower,
        params: pairs(&[
            ("p", p.to_string()),
            ("b", b.to_string()),
            ("a", a.to_string()),
            ("unit", pr.unit.to_string()),
            ("precision", prec.to_string()),
            ("t", pr.t.to_string()),
            ("s", pr.s.to_string()),
            ("r", pr.r.to_string()),
        ]),
        steps: bld.steps,
        assumptions: vec![
            assumption(
                "A1",
                "Gal(L/K) is a Heisenberg group of order p^3 whose quotient Gal(M/K) is C_p x C_p with F the fixed field of the break-b character",
                "an Artin-Schreier extension of F with datum alpha y + gamma, alpha and gamma in K, is Galois over K with Heisenberg group",
            ),
            assumption(
                "A2",
                "Gal(L/M) = [Gal(L/K), Gal(L/K)] has the largest lower break of L/K",
                "ramification numbers satisfy i(sigma^p) > i(sigma) and i([sigma, tau]) > i(tau)",
            ),
        ],
        predicted: Some(predicted.parse()?),
        verified: Some(u_m.parse()?),
        witness: Some(parse_rational(&witness)?),
    })
}

/// The family of a nonintegral-break certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NonintKind {
    H,
    A,
    A1d,
}

impl fmt::Display for NonintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NonintKind::H => "H",
            NonintKind::A => "A",
            NonintKind::A1d => "A1d",
        })
    }
}

impl FromStr for NonintKind {
    type Err = ForgeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" => Ok(NonintKind::H),
            "A" => Ok(NonintKind::A),
            "A1d" => Ok(NonintKind::A1d),
            _ => Err(ForgeError::Parse(format!("unknown family {s:?}; expected H, A or A1d"))),
        }
    }
}

const EMBEDDING: (&str, &str) = (
    "the base extension N_1/K exists, is totally ramified and has the stated upper breaks",
    "embedding problems with p-group kernel over local fields of characteristic p are solvable",
);

const PEEL: (&str, &str) = (
    "for each factor the top upper break belongs to the smallest nontrivial ramification subgroup, which is the central subgroup of order p identified in the quotient",
    "the last nontrivial upper ramification group of a totally ramified extension with minimal nonabelian group is its central subgroup of order p",
);

const FACT1: (&str, &str) = (
    "the identified subgroup B and its complement span a central C_p x C_p and the larger new break has multiplicity one",
    "break bookkeeping for a central C_p x C_p quotient",
);

const SHARED_F: (&str, &str) = (
    "N_1 and N_2 intersect in the degree p subextension F whose break is b",
    "freedom in the choice of a for a fixed F in the Heisenberg tower construction",
);

const CYCLIC: (&str, &str) = (
    "a cyclic extension of degree p^k with upper breaks 1, p, ..., p^(k-1) exists",
    "upper breaks of cyclic p-extensions in characteristic p satisfy u_(i+1) >= p u_i",
);

/// A certificate that a totally ramified `H(n,d)`- or `A(n,d)`-extension
/// with a nonintegral top upper break exists, assuming a base extension with
/// upper breaks `base`. Without `base` the base is derived recursively.
pub fn derive_nonint(
    kind: NonintKind,
    p: u32,
    n: u32,
    d: u32,
    base: Option<&BreakMultiset>,
    config: ForgeConfig,
) -> Result<Certificate> {
    if p <= 2 {
        return Err(ForgeError::Constraint(format!("p > 2 required, got p = {p}")));
    }
    check_prime(p).map_err(|_| ForgeError::Constraint(format!("p = {p} is not prime")))?;
    if d == 0 || n == 0 {
        return Err(ForgeError::Constraint("n >= 1 and d >= 1 required".into()));
    }
    if let Some(base) = base {
        base.ensure_numbering(Numbering::Upper)?;
        if base.prime() != p as u64 || base.tame_degree() != 1 {
            return Err(ForgeError::Constraint(format!("base must be an upper multiset with m=1 p={p}")));
        }
    }
    match kind {
        NonintKind::A1d if n != 1 => Err(ForgeError::Constraint("A1d requires n = 1".into())),
        NonintKind::A1d | NonintKind::A if n == 1 => nonint_a1d(p, d, base, config),
        NonintKind::H if n == 1 && d == 1 && base.is_none() => nonint_h11(p, config),
        _ => nonint_central(kind, p, n, d, base, config),
    }
}

fn nonint_params(
    family: &str,
    p: u32,
    n: u32,
    d: u32,
    base: Option<&BreakMultiset>,
    config: ForgeConfig,
) -> Vec<(String, String)> {
    pairs(&[
        ("family", family.to_string()),
        ("p", p.to_string()),
        ("n", n.to_string()),
        ("d", d.to_string()),
        ("base", base.map_or("auto".to_string(), ToString::to_string)),
        ("precision", config.precision.to_string()),
        ("limit", config.limit.to_string()),
    ])
}

fn config_inputs(config: ForgeConfig) -> [(&'static str, String); 2] {
    [("precision", config.precision.to_string()), ("limit", config.limit.to_string())]
}

/// Runs the tower for `(p, b, a)` and returns `(predicted, verified, witness)`.
fn tower_step(bld: &mut Builder, p: u32, b: i64, a: i64, config: ForgeConfig) -> Result<(String, String, String)> {
    let out = bld.run(
        Rule::P3Tower,
        &[
            ("p", p.to_string()),
            ("b", b.to_string()),
            ("a", a.to_string()),
            ("unit", "1".into()),
            ("precision", config.precision.to_string()),
        ],
    )?;
    Ok((output_field(&out, "predicted")?, output_field(&out, "verified")?, output_field(&out, "witness")?))
}

fn nonint_h11(p: u32, config: ForgeConfig) -> Result<Certificate> {
    let mut bld = Builder::default();
    let out = bld.run(Rule::PickParameters, &[("p", p.to_string()), ("v", "0".into())])?;
    let b: i64 = output_field(&out, "b")?.parse().map_err(|_| ForgeError::Parse(out.clone()))?;
    let a: i64 = output_field(&out, "a")?.parse().map_err(|_| ForgeError::Parse(out.clone()))?;
    let (predicted, verified, _) = tower_step(&mut bld, p, b, a, config)?;
    let witness = bld.run(Rule::Witness, &[("upper", predicted.clone())])?;
    Ok(Certificate {
        kind: CertificateKind::NonintH,
        params: nonint_params("H", p, 1, 1, None, config),
        steps: bld.steps,
        assumptions: vec![],
        predicted: Some(predicted.parse()?),
        verified: Some(verified.parse()?),
        witness: Some(parse_rational(&witness)?),
    })
}

/// How a base multiset is derived when none is given.
enum AutoBase {
    /// A recursive nonint step for the smaller group.
    Nonint { kind: NonintKind, n: u32, d: u32 },
    /// The break chain of a cyclic extension of degree `p^k`.
    CyclicChain { k: u32 },
}

/// Obtains the base multiset, recording how it was obtained.
fn base_multiset(
    bld: &mut Builder,
    assumptions: &mut Vec<Assumption>,
    given: Option<&BreakMultiset>,
    auto: AutoBase,
    p: u32,
    config: ForgeConfig,
) -> Result<BreakMultiset> {
    if let Some(b) = given {
        return Ok(b.clone());
    }
    match auto {
        AutoBase::Nonint { kind, n, d } => {
            let mut inputs =
                vec![("kind", kind.to_string()), ("p", p.to_string()), ("n", n.to_string()), ("d", d.to_string())];
            inputs.extend(config_inputs(config));
            let out = bld.run(Rule::Nonint, &inputs)?;
            Ok(output_field(&out, "predicted")?.parse()?)
        }
        AutoBase::CyclicChain { k } => {
            let id = next_id(assumptions);
            let out =
                bld.run(Rule::CyclicChain, &[("p", p.to_string()), ("k", k.to_string()), ("assumes", id.clone())])?;
            assumptions.push(assumption(&id, CYCLIC.0, CYCLIC.1));
            Ok(out.parse()?)
        }
    }
}

fn next_id(assumptions: &[Assumption]) -> String {
    format!("A{}", assumptions.len() + 1)
}

fn expect_group(bld: &Builder, out: &str, want_iso: bool) -> Result<()> {
    let contradicts = if want_iso { out == "not-isomorphic" } else { out == "isomorphic" };
    if contradicts {
        bld.expect(out, if want_iso { "isomorphic" } else { "not-isomorphic" })?;
    }
    Ok(())
}

/// `H(n,d)` or `A(n,d)` as the central product of the base group with `H(1,1)`.
fn nonint_central(
    kind: NonintKind,
    p: u32,
    n: u32,
    d: u32,
    base: Option<&BreakMultiset>,
    config: ForgeConfig,
) -> Result<Certificate> {
    let fam = if kind == NonintKind::H { "H" } else { "A" };
    let mut bld = Builder::default();
    let mut assumptions = vec![assumption("A1", EMBEDDING.0, EMBEDDING.1)];
    let auto = match (kind, n - 1) {
        (_, 0) => AutoBase::CyclicChain { k: d },
        (NonintKind::A, 1) => AutoBase::Nonint { kind: NonintKind::A1d, n: 1, d },
        (kind, n) => AutoBase::Nonint { kind, n, d },
    };
    let base_ms = base_multiset(&mut bld, &mut assumptions, base, auto, p, config)?;
    let expected_len = (2 * (n - 1) + d) as usize;
    if base_ms.len() != expected_len {
        return Err(ForgeError::Constraint(format!(
            "base for {fam}({},{d}) must have {expected_len} upper breaks, found {}",
            n - 1,
            base_ms.len()
        )));
    }
    bld.run(Rule::UpperToLower, &[("upper", base_ms.to_string())])?;
    let v = base_ms.max().expect("nonempty base");
    let out = bld.run(Rule::PickParameters, &[("p", p.to_string()), ("v", format_rational(v))])?;
    let b: i64 = output_field(&out, "b")?.parse().map_err(|_| ForgeError::Parse(out.clone()))?;
    let a: i64 = output_field(&out, "a")?.parse().map_err(|_| ForgeError::Parse(out.clone()))?;
    let (n2, verified, w) = tower_step(&mut bld, p, b, a, config)?;
    bld.run(Rule::ComposeDisjoint, &[("lhs", base_ms.to_string()), ("rhs", n2.clone())])?;

    let peel_id = next_id(&assumptions);
    assumptions.push(assumption(&peel_id, PEEL.0, PEEL.1));
    let base_peeled = bld.run(Rule::PeelTop, &[("upper", base_ms.to_string()), ("assumes", peel_id.clone())])?;
    let n2_peeled = bld.run(Rule::PeelTop, &[("upper", n2), ("assumes", peel_id)])?;
    let u_m = bld.run(Rule::ComposeDisjoint, &[("lhs", base_peeled), ("rhs", n2_peeled)])?;

    let fact1_id = next_id(&assumptions);
    assumptions.push(assumption(&fact1_id, FACT1.0, FACT1.1));
    let out = bld.run(Rule::Fact1, &[("base", u_m), ("u", format_rational(v)), ("v", w), ("assumes", fact1_id)])?;
    let others = output_field(&out, "others")?;

    let base_desc = if n == 1 {
        GroupDescriptor::Cyclic { p, d }.to_string()
    } else {
        format!("kind={fam} p={p} n={} d={d}", n - 1)
    };
    let target = format!("kind={fam} p={p} n={n} d={d}");
    let cp = format!("kind=C p={p} d=1");
    let limit = config.limit.to_string();
    let out = bld.run(
        Rule::GroupIso,
        &[("lhs", format!("{base_desc} * {cp} * {cp}")), ("rhs", target.clone()), ("limit", limit.clone())],
    )?;
    expect_group(&bld, &out, false)?;
    let out = bld.run(
        Rule::GroupIso,
        &[("lhs", format!("{base_desc} o kind=H p={p} n=1 d=1")), ("rhs", target), ("limit", limit)],
    )?;
    expect_group(&bld, &out, true)?;

    bld.run(Rule::UpperToLower, &[("upper", others.clone())])?;
    let witness = bld.run(Rule::Witness, &[("upper", others.clone())])?;
    Ok(Certificate {
        kind: if kind == NonintKind::H { CertificateKind::NonintH } else { CertificateKind::NonintA },
        params: nonint_params(fam, p, n, d, base, config),
        steps: bld.steps,
        assumptions,
        predicted: Some(others.parse()?),
        verified: Some(verified.parse()?),
        witness: Some(parse_rational(&witness)?),
    })
}

/// `A(1,d)` from a cyclic `C_{p^{d+1}}`-extension and a Heisenberg tower
/// sharing its degree `p` subfield.
fn nonint_a1d(p: u32, d: u32, base: Option<&BreakMultiset>, config: ForgeConfig) -> Result<Certificate> {
    let mut bld = Builder::default();
    let mut assumptions = vec![assumption("A1", EMBEDDING.0, EMBEDDING.1)];
    let base_ms = base_multiset(&mut bld, &mut assumptions, base, AutoBase::CyclicChain { k: d + 1 }, p, config)?;
    if base_ms.len() != d as usize + 1 {
        return Err(ForgeError::Constraint(format!(
            "base for A(1,{d}) must be a cyclic chain of {} upper breaks, found {}",
            d + 1,
            base_ms.len()
        )));
    }
    bld.run(Rule::UpperToLower, &[("upper", base_ms.to_string())])?;
    let out = bld.run(Rule::FirstBreak, &[("upper", base_ms.to_string())])?;
    let b: i64 = output_field(&out, "b")?.parse().map_err(|_| ForgeError::Parse(out.clone()))?;
    let v = base_ms.max().expect("nonempty base");
    let out = bld.run(Rule::PickA, &[("p", p.to_string()), ("b", b.to_string()), ("v", format_rational(v))])?;
    let a: i64 = output_field(&out, "a")?.parse().map_err(|_| ForgeError::Parse(out.clone()))?;
    let (n2, verified, w) = tower_step(&mut bld, p, b, a, config)?;

    let shared_id = next_id(&assumptions);
    assumptions.push(assumption(&shared_id, SHARED_F.0, SHARED_F.1));
    bld.run(
        Rule::FiberProduct,
        &[("lhs", base_ms.to_string()), ("rhs", n2.clone()), ("shared", b.to_string()), ("assumes", shared_id.clone())],
    )?;
    let peel_id = next_id(&assumptions);
    assumptions.push(assumption(&peel_id, PEEL.0, PEEL.1));
    let base_peeled = bld.run(Rule::PeelTop, &[("upper", base_ms.to_string()), ("assumes", peel_id.clone())])?;
    let n2_peeled = bld.run(Rule::PeelTop, &[("upper", n2), ("assumes", peel_id)])?;
    let u_m = bld.run(
        Rule::FiberProduct,
        &[("lhs", base_peeled), ("rhs", n2_peeled), ("shared", b.to_string()), ("assumes", shared_id)],
    )?;
    let fact1_id = next_id(&assumptions);
    assumptions.push(assumption(&fact1_id, FACT1.0, FACT1.1));
    let out = bld.run(Rule::Fact1, &[("base", u_m), ("u", format_rational(v)), ("v", w), ("assumes", fact1_id)])?;
    let others = output_field(&out, "others")?;

    let target = format!("kind=A p={p} n=1 d={d}");
    let limit = config.limit.to_string();
    let out = bld.run(
        Rule::GroupIso,
        &[
            ("lhs", format!("kind=C p={p} d={} * kind=C p={p} d=1", d + 1)),
            ("rhs", target.clone()),
            ("limit", limit.clone()),
        ],
    )?;
    expect_group(&bld, &out, false)?;
    let out = bld.run(Rule::GroupIso, &[("lhs", format!("kind=Gd p={p} d={d}")), ("rhs", target), ("limit", limit)])?;
    expect_group(&bld, &out, true)?;

    bld.run(Rule::UpperToLower, &[("upper", others.clone())])?;
    let witness = bld.run(Rule::Witness, &[("upper", others.clone())])?;
    Ok(Certificate {
        kind: CertificateKind::NonintA1d,
        params: nonint_params("A1d", p, 1, d, base, config),
        steps: bld.steps,
        assumptions,
        predicted: Some(others.parse()?),
        verified: Some(verified.parse()?),
        witness: Some(parse_rational(&witness)?),
    })
}

/// A certificate for `G = P ⋊ C_m`, the action of a generator of `C_m`
/// given by generator images `action` (`None` for the trivial action).
pub fn derive_chat(group: &GroupDescriptor, m: u64, action: Option<&str>, config: ForgeConfig) -> Result<Certificate> {
    let pgroup = group.build(config.limit)?;
    let p = pgroup.prime();
    if m == 0 || m.is_multiple_of(p as u64) {
        return Err(ForgeError::Constraint(format!("gcd(m, p) = 1 required, got m = {m}, p = {p}")));
    }
    let action = match action {
        Some(a) => a.to_string(),
        None => (1..=pgroup.generators().len()).map(|i| format!("g{i}")).collect::<Vec<_>>().join(","),
    };
    let mut bld = Builder::default();
    let group_text = group.to_string();
    let limit = config.limit.to_string();
    let out = bld.run(
        Rule::Burnside,
        &[("group", group_text.clone()), ("action", action.clone()), ("m", m.to_string()), ("limit", limit.clone())],
    )?;
    let nontrivial = output_field(&out, "nontrivial_on_p")? == "true";
    let kind = if m == 1 { CertificateKind::Pchat } else { CertificateKind::Chat };
    let params = pairs(&[
        ("group", group_text.clone()),
        ("m", m.to_string()),
        ("action", action),
        ("precision", config.precision.to_string()),
        ("limit", limit.clone()),
    ]);

    if nontrivial {
        return Ok(Certificate {
            kind,
            params,
            steps: bld.steps,
            assumptions: vec![
                assumption(
                    "A1",
                    "a totally ramified G-extension L/K exists",
                    "existence of totally ramified extensions of local fields with prescribed solvable Galois group",
                ),
                assumption(
                    "A2",
                    "if C_m acts nontrivially on P then every totally ramified G-extension has a nonintegral upper break",
                    "the tame character acts on each wild ramification quotient through a power fixed by the break",
                ),
            ],
            predicted: None,
            verified: None,
            witness: None,
        });
    }

    if pgroup.is_abelian() {
        return Err(ForgeError::Constraint(format!(
            "{group_text} is abelian and the action is trivial, so G is abelian and all upper breaks are integers"
        )));
    }
    let out = bld.run(Rule::MinQuot, &[("group", group_text), ("limit", limit)])?;
    let class = output_field(&out, "class")?;
    let mut fields = class.split_whitespace();
    let fam = fields.next().unwrap_or_default();
    let field = |s: Option<&str>, key: &str| -> Result<String> {
        s.and_then(|t| t.strip_prefix(key)).map(str::to_string).ok_or_else(|| ForgeError::Parse(class.clone()))
    };
    let (qn, qd) = (field(fields.next(), "n=")?, field(fields.next(), "d=")?);
    let mut inputs = vec![("kind", fam.to_string()), ("p", p.to_string()), ("n", qn), ("d", qd)];
    inputs.extend(config_inputs(config));
    let out = bld.run(Rule::Nonint, &inputs)?;
    let (mut predicted, mut verified) = (output_field(&out, "predicted")?, output_field(&out, "verified")?);

    let mut assumptions = vec![
        assumption(
            "A1",
            "the quotient extension with group Gbar x C_m embeds in a totally ramified G-extension",
            "embedding problems with p-group kernel over local fields of characteristic p are solvable",
        ),
        assumption(
            "A2",
            "upper breaks of the quotient extension are upper breaks of the G-extension",
            "upper numbering is compatible with passage to quotients",
        ),
    ];
    if m > 1 {
        assumptions.push(assumption(
            "A3",
            "the tame C_m-extension is linearly disjoint from the p-part",
            "a tame extension of degree prime to p meets a p-extension trivially",
        ));
        predicted =
            bld.run(Rule::TameCompositum, &[("upper", predicted), ("m", m.to_string()), ("assumes", "A3".into())])?;
        verified =
            bld.run(Rule::TameCompositum, &[("upper", verified), ("m", m.to_string()), ("assumes", "A3".into())])?;
    }
    let witness = bld.run(Rule::Witness, &[("upper", predicted.clone())])?;
    Ok(Certificate {
        kind,
        params,
        steps: bld.steps,
        assumptions,
        predicted: Some(predicted.parse()?),
        verified: Some(verified.parse()?),
        witness: Some(parse_rational(&witness)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn cfg() -> ForgeConfig {
        ForgeConfig::default()
    }

    #[test]
    fn tower_examples() {
        for (p, b, a, ef, w) in
            [(3, 1, 4, 11, q(13, 3)), (5, 1, 2, 7, q(11, 5)), (5, 3, 4, 11, q(23, 5)), (3, 5, 8, 19, q(29, 3))]
        {
            let c = build_p3_tower(&P3Parameters::new(p, b, a).unwrap(), cfg()).unwrap();
            assert_eq!(c.steps[2].output, format!("break={ef}"));
            assert_eq!(c.steps[4].output, format!("v_F={}", -ef));
            assert_eq!(c.witness, Some(w));
            assert_eq!(c.predicted.as_ref().unwrap().breaks(), &[q(b, 1), q(a, 1), w]);
        }
    }

    #[test]
    fn tower_with_unit() {
        let c = build_p3_tower(&P3Parameters::with_unit(5, 1, 2, 3).unwrap(), cfg()).unwrap();
        assert_eq!(c.steps[2].output, "break=7");
    }

    #[test]
    fn tower_is_deterministic() {
        let pr = P3Parameters::new(3, 2, 11).unwrap();
        assert_eq!(build_p3_tower(&pr, cfg()).unwrap().to_string(), build_p3_tower(&pr, cfg()).unwrap().to_string());
    }

    #[test]
    fn nonint_h21_from_given_base() {
        let base: BreakMultiset = "upper m=1 p=3 : 1, 4, 13/3".parse().unwrap();
        let c = derive_nonint(NonintKind::H, 3, 2, 1, Some(&base), cfg()).unwrap();
        assert_eq!(c.witness, Some(q(29, 3)));
        assert_eq!(c.predicted.unwrap().to_string(), "upper m=1 p=3 : 1, 4, 5, 8, 29/3");
        assert!(c
            .steps
            .iter()
            .any(|s| s.rule == Rule::P3Tower && s.input("b") == Some("5") && s.input("a") == Some("8")));
    }

    #[test]
    fn nonint_h21_auto_base_matches() {
        let c = derive_nonint(NonintKind::H, 3, 2, 1, None, cfg()).unwrap();
        assert_eq!(c.witness, Some(q(29, 3)));
    }

    #[test]
    fn nonint_h11_is_a_tower() {
        let c = derive_nonint(NonintKind::H, 3, 1, 1, None, cfg()).unwrap();
        assert_eq!(c.witness, Some(q(13, 3)));
        assert!(c.assumptions.is_empty());
    }

    #[test]
    fn nonint_a1d_example() {
        let base: BreakMultiset = "upper m=1 p=3 : 1, 4".parse().unwrap();
        let c = derive_nonint(NonintKind::A1d, 3, 1, 1, Some(&base), cfg()).unwrap();
        assert_eq!(c.witness, Some(q(22, 3)));
        assert_eq!(c.predicted.unwrap().to_string(), "upper m=1 p=3 : 1, 7, 22/3");
        let auto = derive_nonint(NonintKind::A, 3, 1, 1, None, cfg()).unwrap();
        assert_eq!(auto.witness, Some(q(13, 3)));
    }

    #[test]
    fn nonint_a21_recurses_through_a1d() {
        let c = derive_nonint(NonintKind::A, 3, 2, 1, None, cfg()).unwrap();
        assert_eq!(c.kind, CertificateKind::NonintA);
        assert!(c.steps.iter().any(|s| s.rule == Rule::Nonint && s.input("kind") == Some("A1d")));
        let w = c.witness.unwrap();
        assert!(!w.is_integer());
        assert_eq!(c.predicted.unwrap().max(), Some(w));
    }

    #[test]
    fn nonint_rejects_bad_bases() {
        let short: BreakMultiset = "upper m=1 p=3 : 1".parse().unwrap();
        assert!(matches!(derive_nonint(NonintKind::H, 3, 2, 1, Some(&short), cfg()), Err(ForgeError::Constraint(_))));
        let bad: BreakMultiset = "upper m=1 p=3 : 1, 4/3, 2".parse().unwrap();
        assert!(derive_nonint(NonintKind::H, 3, 2, 1, Some(&bad), cfg()).is_err());
        assert!(derive_nonint(NonintKind::A1d, 3, 2, 1, None, cfg()).is_err());
    }

    #[test]
    fn chat_branches() {
        let s3: GroupDescriptor = "kind=C p=3 d=1".parse().unwrap();
        let c = derive_chat(&s3, 2, Some("g1^-1"), cfg()).unwrap();
        assert_eq!(c.kind, CertificateKind::Chat);
        assert_eq!(c.witness, None);
        assert_eq!(c.steps[0].output, "nontrivial_on_p=true nontrivial_on_frattini_quotient=true");

        let h: GroupDescriptor = "kind=H p=3 n=1 d=1".parse().unwrap();
        let c = derive_chat(&h, 2, None, cfg()).unwrap();
        assert_eq!(c.witness, Some(q(13, 3)));
        assert_eq!(c.predicted.unwrap().to_string(), "upper m=2 p=3 : 1, 4, 13/3");

        let hc: GroupDescriptor = "kind=H p=3 n=1 d=1 * kind=C p=3 d=1".parse().unwrap();
        let c = derive_chat(&hc, 1, None, cfg()).unwrap();
        assert_eq!(c.kind, CertificateKind::Pchat);
        assert!(c.steps[1].output.contains("class=[H n=1 d=1]"));

        assert!(matches!(derive_chat(&s3, 2, None, cfg()), Err(ForgeError::Constraint(_))));
        assert!(matches!(derive_chat(&h, 3, None, cfg()), Err(ForgeError::Constraint(_))));
    }
}
