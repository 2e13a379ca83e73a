//! Command dispatch for the `ramforge` binary.
//!
//! Exit codes: 0 success, 2 parse or parameter constraint, 3 verification
//! mismatch, 4 precision exhausted, 5 group materialization limit, 6
//! unrealizable break multiset. Artifacts go to stdout, diagnostics to
//! stderr.

pub mod selftest;

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ramforge::astower::TowerError;
use ramforge::forge::{
    build_p3_tower, derive_chat, derive_nonint, verify_certificate, ForgeConfig, ForgeError, NonintKind, P3Parameters,
};
use ramforge::laurent::SeriesError;
use ramforge::pgroups::{
    classify_minimal, is_isomorphic, is_minimal_nonabelian, minimal_nonabelian_quotient, FamilyKind, GroupDescriptor,
    GroupError, PGroup,
};
use ramforge::ramcalc::{fact1_resolve, format_rational, parse_rational, BreakError, BreakMultiset};
use rayon::prelude::*;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_MISMATCH: u8 = 3;
pub const EXIT_PRECISION: u8 = 4;
pub const EXIT_LIMIT: u8 = 5;
pub const EXIT_UNREALIZABLE: u8 = 6;

#[derive(Debug, Parser)]
#[command(name = "ramforge", version, about = "Certificates for nonintegral upper ramification breaks")]
pub struct Cli {
    /// Laurent series precision in coefficients.
    #[arg(long, global = true, default_value_t = 400, env = "RAMFORGE_PRECISION",
          value_parser = clap::value_parser!(i64).range(64..))]
    pub precision: i64,
    /// Largest group order that may be materialized.
    #[arg(long, global = true, default_value_t = 10_000, value_parser = parse_limit)]
    pub limit: usize,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_limit(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("{s:?} is not a nonnegative integer"))?;
    if v < 27 {
        return Err("limit must be at least 27".into());
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// Human-readable reports.
    Text,
    /// One `key=value` per line.
    Structured,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certificate for the Heisenberg tower with parameters (p, b, a).
    P3 {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        b: i64,
        #[arg(long)]
        a: i64,
        /// β = unit · π^{-b}.
        #[arg(long, default_value_t = 1)]
        unit: u32,
    },
    /// Certificate for a nonintegral break of an H(n,d)- or A(n,d)-extension.
    Nonint {
        #[arg(long, value_parser = parse_nonint_kind)]
        kind: NonintKind,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
        /// Upper breaks of the base extension; derived when omitted.
        #[arg(long, value_parser = parse_multiset)]
        base: Option<BreakMultiset>,
    },
    /// Certificate for G = P ⋊ C_m.
    Chat {
        /// Descriptor for P, e.g. `kind=H p=3 n=1 d=1 * kind=C p=3 d=1`.
        #[arg(long, value_parser = parse_descriptor)]
        group: GroupDescriptor,
        #[arg(long, default_value_t = 1)]
        m: u64,
        /// Images of P's generators under a generator of C_m, e.g. `g1^-1,g2`.
        #[arg(long)]
        action: Option<String>,
    },
    /// Finite p-group constructions and tests.
    #[command(subcommand)]
    Group(GroupCommand),
    /// Upper and lower numbering of break multisets.
    #[command(subcommand)]
    Breaks(BreaksCommand),
    /// Re-executes certificates; files are checked in parallel, reported in order.
    Verify {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Randomized Herbrand and reduction checks.
    Selftest {
        /// Corpus directory to replay and extend.
        #[arg(long)]
        seed_corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}

#[derive(Debug, Args)]
pub struct GroupSource {
    #[arg(long, value_parser = ["H", "A", "C", "Gd"])]
    pub kind: Option<String>,
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, default_value_t = 1)]
    pub d: u32,
    /// Descriptor text, as an alternative to --kind.
    #[arg(long, conflicts_with_all = ["kind", "table"])]
    pub desc: Option<String>,
    /// Cayley table file.
    #[arg(long, conflicts_with = "kind")]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GroupCommand {
    /// Builds a group and reports its order, or prints its Cayley table.
    Make {
        #[command(flatten)]
        source: GroupSource,
        #[arg(long)]
        emit_table: bool,
    },
    /// Order, center, commutator and Frattini subgroups, rank, exponent.
    Basics {
        #[command(flatten)]
        source: GroupSource,
    },
    /// Kind and parameters of a minimal nonabelian group.
    Classify {
        #[command(flatten)]
        source: GroupSource,
    },
    /// The first normal subgroup (by decreasing order) with minimal nonabelian quotient.
    Minquot {
        #[command(flatten)]
        source: GroupSource,
    },
    /// Isomorphism test; each side is a descriptor or `@file` with a Cayley table.
    Iso {
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum BreaksCommand {
    /// Upper to lower numbering.
    Tolower {
        #[arg(value_parser = parse_multiset)]
        multiset: BreakMultiset,
    },
    /// Lower to upper numbering.
    Toupper {
        #[arg(value_parser = parse_multiset)]
        multiset: BreakMultiset,
    },
    /// Lower breaks and subextension breaks when a central C_p x C_p adds u < v.
    Fact1 {
        #[arg(long, value_parser = parse_multiset)]
        base: BreakMultiset,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
    },
    /// Upper breaks of a compositum of linearly disjoint extensions.
    Compose {
        #[arg(value_parser = parse_multiset)]
        lhs: BreakMultiset,
        #[arg(value_parser = parse_multiset)]
        rhs: BreakMultiset,
    },
}

fn parse_multiset(s: &str) -> Result<BreakMultiset, String> {
    s.parse().map_err(|e: BreakError| e.to_string())
}

fn parse_descriptor(s: &str) -> Result<GroupDescriptor, String> {
    s.parse().map_err(|e: GroupError| e.to_string())
}

fn parse_nonint_kind(s: &str) -> Result<NonintKind, String> {
    s.parse().map_err(|e: ForgeError| e.to_string())
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }
}

fn series_code(e: &SeriesError) -> u8 {
    match e {
        SeriesError::InsufficientPrecision(_) => EXIT_PRECISION,
        _ => EXIT_USAGE,
    }
}

fn tower_code(e: &TowerError) -> u8 {
    match e {
        TowerError::InsufficientPrecision(_) => EXIT_PRECISION,
        TowerError::Series(s) => series_code(s),
        _ => EXIT_USAGE,
    }
}

fn group_code(e: &GroupError) -> u8 {
    match e {
        GroupError::LimitExceeded { .. } => EXIT_LIMIT,
        GroupError::Internal(_) => EXIT_MISMATCH,
        _ => EXIT_USAGE,
    }
}

fn breaks_code(e: &BreakError) -> u8 {
    match e {
        BreakError::NonIntegralLower(_) => EXIT_UNREALIZABLE,
        _ => EXIT_USAGE,
    }
}

/// The documented exit code for a forge failure.
pub fn forge_code(e: &ForgeError) -> u8 {
    match e {
        ForgeError::Series(s) => series_code(s),
        ForgeError::Tower(t) => tower_code(t),
        ForgeError::Group(g) => group_code(g),
        ForgeError::Breaks(b) => breaks_code(b),
        ForgeError::Mismatch { .. } | ForgeError::Regeneration { .. } => EXIT_MISMATCH,
        ForgeError::Constraint(_) | ForgeError::Parse(_) | ForgeError::UnknownRule(_) => EXIT_USAGE,
    }
}

impl From<ForgeError> for CliError {
    fn from(e: ForgeError) -> Self {
        CliError { code: forge_code(&e), message: e.to_string() }
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        CliError { code: group_code(&e), message: e.to_string() }
    }
}

impl From<BreakError> for CliError {
    fn from(e: BreakError) -> Self {
        CliError { code: breaks_code(&e), message: e.to_string() }
    }
}

/// What a command printed and how it ended. Diagnostics are collected so
/// that partial output (such as batch verification) survives a failure.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, ..Outcome::default() }
    }
}

/// Key-value report rendered per `--output`.
struct Report(Vec<(&'static str, String)>);

impl Report {
    fn render(&self, format: OutputFormat) -> String {
        let mut out = String::new();
        for (k, v) in &self.0 {
            match format {
                OutputFormat::Text => writeln!(out, "{k}: {v}"),
                OutputFormat::Structured if v.contains(char::is_whitespace) => writeln!(out, "{k}=[{v}]"),
                OutputFormat::Structured => writeln!(out, "{k}={v}"),
            }
            .expect("writing to a String");
        }
        out
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let config = ForgeConfig { precision: cli.precision, limit: cli.limit };
    let result = match &cli.command {
        Command::P3 { p, b, a, unit } => P3Parameters::with_unit(*p, *b, *a, *unit)
            .and_then(|pr| build_p3_tower(&pr, config))
            .map(|c| c.to_string())
            .map_err(CliError::from),
        Command::Nonint { kind, p, n, d, base } => {
            derive_nonint(*kind, *p, *n, *d, base.as_ref(), config).map(|c| c.to_string()).map_err(CliError::from)
        }
        Command::Chat { group, m, action } => {
            derive_chat(group, *m, action.as_deref(), config).map(|c| c.to_string()).map_err(CliError::from)
        }
        Command::Group(cmd) => run_group(cmd, cli.limit, cli.output),
        Command::Breaks(cmd) => run_breaks(cmd, cli.output),
        Command::Verify { files } => return run_verify(files),
        Command::Selftest { seed_corpus, seed, cases } => return run_selftest(seed_corpus.as_deref(), *seed, *cases),
    };
    match result {
        Ok(stdout) => Outcome::ok(stdout),
        Err(e) => Outcome { stdout: String::new(), stderr: format!("error: {}\n", e.message), code: e.code },
    }
}

fn load_group(source: &GroupSource, limit: usize) -> Result<PGroup, CliError> {
    if let Some(path) = &source.table {
        let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        return Ok(PGroup::from_cayley_table(&text, limit)?);
    }
    let desc: GroupDescriptor = match (&source.desc, &source.kind) {
        (Some(text), _) => text.parse()?,
        (None, Some(kind)) => {
            let p = source.p.ok_or_else(|| CliError::usage("--p is required with --kind"))?;
            let (n, d) = (source.n, source.d);
            match kind.as_str() {
                "H" => GroupDescriptor::Family { kind: FamilyKind::H, p, n, d },
                "A" => GroupDescriptor::Family { kind: FamilyKind::A, p, n, d },
                "C" => GroupDescriptor::Cyclic { p, d },
                _ => GroupDescriptor::Gd { p, d },
            }
        }
        (None, None) => return Err(CliError::usage("one of --kind, --desc or --table is required")),
    };
    Ok(desc.build(limit)?)
}

/// A descriptor, or `@path` naming a Cayley table file.
fn load_operand(text: &str, limit: usize) -> Result<PGroup, CliError> {
    match text.strip_prefix('@') {
        Some(path) => {
            let src = GroupSource { kind: None, p: None, n: 1, d: 1, desc: None, table: Some(path.into()) };
            load_group(&src, limit)
        }
        None => Ok(text.parse::<GroupDescriptor>()?.build(limit)?),
    }
}

fn family_name(kind: FamilyKind, n: u32, d: u32) -> String {
    format!("{kind}({n},{d})")
}

fn run_group(cmd: &GroupCommand, limit: usize, format: OutputFormat) -> Result<String, CliError> {
    match cmd {
        GroupCommand::Make { source, emit_table } => {
            let g = load_group(source, limit)?;
            if *emit_table {
                return Ok(g.cayley_table_text());
            }
            Ok(Report(vec![
                ("group", g.name().to_string()),
                ("order", g.order().to_string()),
                ("generators", g.generator_names().join(",")),
            ])
            .render(format))
        }
        GroupCommand::Basics { source } => {
            let g = load_group(source, limit)?;
            let b = g.basics();
            let minimal = !g.is_abelian() && is_minimal_nonabelian(&g)?;
            Ok(Report(vec![
                ("group", g.name().to_string()),
                ("order", b.order.to_string()),
                ("center_order", b.center.order().to_string()),
                ("commutator_order", b.commutator_subgroup.order().to_string()),
                ("frattini_order", b.frattini.order().to_string()),
                ("rank", b.rank.to_string()),
                ("exponent", b.exponent.to_string()),
                ("abelian", g.is_abelian().to_string()),
                ("minimal_nonabelian", minimal.to_string()),
            ])
            .render(format))
        }
        GroupCommand::Classify { source } => {
            let g = load_group(source, limit)?;
            let c = classify_minimal(&g)?;
            Ok(match format {
                OutputFormat::Text => format!("{c}\n"),
                OutputFormat::Structured => {
                    Report(vec![("kind", c.kind.to_string()), ("n", c.n.to_string()), ("d", c.d.to_string())])
                        .render(format)
                }
            })
        }
        GroupCommand::Minquot { source } => {
            let g = load_group(source, limit)?;
            let q = minimal_nonabelian_quotient(&g)?;
            let name = family_name(q.class.kind, q.class.n, q.class.d);
            Ok(match format {
                OutputFormat::Text => {
                    format!("quotient {name}\nkernel_order: {}\nclass: {}\n", q.kernel.order(), q.class)
                }
                OutputFormat::Structured => Report(vec![
                    ("quotient", name),
                    ("kernel_order", q.kernel.order().to_string()),
                    ("class", q.class.to_string()),
                ])
                .render(format),
            })
        }
        GroupCommand::Iso { lhs, rhs } => {
            let (g, h) = (load_operand(lhs, limit)?, load_operand(rhs, limit)?);
            let verdict = if is_isomorphic(&g, &h)? { "isomorphic" } else { "not-isomorphic" };
            Ok(match format {
                OutputFormat::Text => format!("{verdict}\n"),
                OutputFormat::Structured => Report(vec![("result", verdict.to_string())]).render(format),
            })
        }
    }
}

fn run_breaks(cmd: &BreaksCommand, format: OutputFormat) -> Result<String, CliError> {
    match cmd {
        BreaksCommand::Tolower { multiset } => Ok(format!("{}\n", multiset.upper_to_lower()?)),
        BreaksCommand::Toupper { multiset } => Ok(format!("{}\n", multiset.lower_to_upper()?)),
        BreaksCommand::Compose { lhs, rhs } => Ok(format!("{}\n", lhs.compose_disjoint(rhs)?)),
        BreaksCommand::Fact1 { base, u, v } => {
            let r = fact1_resolve(base, parse_rational(u)?, parse_rational(v)?)?;
            let mut rows = vec![
                ("lower_u", r.lower_u.to_string()),
                ("lower_v", r.lower_v.to_string()),
                ("distinguished_upper", r.distinguished_upper.to_string()),
                ("distinguished_top", r.distinguished_top.to_string()),
                ("others_upper", r.others_upper.to_string()),
                ("others_top", r.others_top.to_string()),
            ];
            rows.extend(r.assumptions.iter().map(|a| ("assumption", a.to_string())));
            rows.extend(r.warnings.iter().map(|w| ("warning", w.clone())));
            Ok(Report(rows).render(format))
        }
    }
}

fn run_verify(files: &[PathBuf]) -> Outcome {
    let results: Vec<Result<String, CliError>> = files
        .par_iter()
        .map(|path| {
            let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            let report = verify_certificate(&text).map_err(CliError::from)?;
            let witness = report.witness.map_or("none".to_string(), format_rational);
            Ok(format!(
                "OK {} kind={} steps={} assumptions={} witness={witness}\n",
                path.display(),
                report.kind,
                report.steps,
                report.assumptions
            ))
        })
        .collect();
    let mut out = Outcome::default();
    for (path, res) in files.iter().zip(results) {
        match res {
            Ok(line) => out.stdout.push_str(&line),
            Err(e) => {
                writeln!(out.stderr, "FAIL {}: {}", path.display(), e.message).expect("writing to a String");
                if out.code == EXIT_OK {
                    out.code = e.code;
                }
            }
        }
    }
    out
}

fn run_selftest(dir: Option<&std::path::Path>, seed: u64, cases: usize) -> Outcome {
    match selftest::run_selftest(dir, seed, cases) {
        Ok(s) => {
            let mut out = Outcome::ok(format!(
                "replayed={} generated={} failures={}\n",
                s.replayed,
                s.generated,
                s.failures.len()
            ));
            if !s.failures.is_empty() {
                out.stderr = s.failures.iter().map(|f| format!("FAIL {f}\n")).collect();
                out.code = EXIT_MISMATCH;
            }
            out
        }
        Err(e) => Outcome { stderr: format!("error: corpus: {e}\n"), code: EXIT_USAGE, ..Outcome::default() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        let cli = Cli::try_parse_from(std::iter::once("ramforge").chain(args.iter().copied())).unwrap();
        run(&cli)
    }

    #[test]
    fn p3_constraints_map_to_exit_2() {
        let out = run_args(&["p3", "--p", "3", "--b", "1", "--a", "2"]);
        assert_eq!(out.code, EXIT_USAGE);
        assert!(out.stderr.contains("≡ −b mod 3"), "{}", out.stderr);
        assert!(out.stdout.is_empty());
        let out = run_args(&["p3", "--p", "2", "--b", "1", "--a", "4"]);
        assert_eq!(out.code, EXIT_USAGE);
        assert!(out.stderr.contains("p > 2 required"));
    }

    #[test]
    fn flag_minimums_are_enforced() {
        assert!(
            Cli::try_parse_from(["ramforge", "--precision", "63", "p3", "--p", "3", "--b", "1", "--a", "4"]).is_err()
        );
        assert!(Cli::try_parse_from(["ramforge", "--limit", "26", "p3", "--p", "3", "--b", "1", "--a", "4"]).is_err());
    }

    #[test]
    fn breaks_examples() {
        assert_eq!(
            run_args(&["breaks", "tolower", "upper m=1 p=3 : 1, 4, 13/3"]).stdout,
            "lower m=1 p=3 : 1, 10, 13\n"
        );
        assert_eq!(run_args(&["breaks", "toupper", "lower m=1 p=3 : 5"]).stdout, "upper m=1 p=3 : 5\n");
        assert_eq!(run_args(&["breaks", "toupper", "lower m=2 p=3 : 3"]).stdout, "upper m=2 p=3 : 3/2\n");
        assert_eq!(run_args(&["breaks", "tolower", "upper m=1 p=3 : 1, 5/4"]).code, EXIT_UNREALIZABLE);
    }

    #[test]
    fn group_examples() {
        assert_eq!(
            run_args(&["group", "classify", "--kind", "H", "--p", "3", "--n", "1", "--d", "2"]).stdout,
            "H n=1 d=2\n"
        );
        let out = run_args(&[
            "group",
            "iso",
            "--lhs",
            "kind=H p=3 n=1 d=1 o kind=H p=3 n=1 d=1",
            "--rhs",
            "kind=H p=3 n=2 d=1",
        ]);
        assert_eq!(out.stdout, "isomorphic\n");
        let out = run_args(&["--limit", "100", "group", "basics", "--kind", "H", "--p", "3", "--n", "2", "--d", "1"]);
        assert_eq!(out.code, EXIT_LIMIT);
    }
}
