//! The `capelli` command line.

pub mod expr;

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::sync::Arc;

use capelli_core::bsat::{self, verify_all};
use capelli_core::capalg::confluence_fuzz;
use capelli_core::gradmod::{
    break_points, build_ladder, equivalence_witness_with, psi_of_ladder_with,
};
use capelli_core::{
    instantiate, list_cases, APresentation, BCertificate, CaseInstance, Error as CoreError,
    GradedModule, Rational, SizeSet, Verdict, Violation, Window,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::expr::{eval_expr, parse_expr};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "capelli", version, about = "Bernstein-Sato polynomials, Capelli algebras and ladder modules")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// The eight catalog rows.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// b-functions by differentiation.
    #[command(subcommand)]
    Bs(BsCmd),
    /// Normal forms in the algebra A = C<f, theta, delta>.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Graded ladder modules.
    #[command(subcommand)]
    Module(ModuleCmd),
}

#[derive(Subcommand, Debug)]
pub enum CatalogCmd {
    List {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug, Clone, Copy)]
pub struct CaseArgs {
    #[arg(long = "case")]
    pub case_id: u32,
    #[arg(long)]
    pub size: u32,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Sizes {
    Default,
    Min,
}

#[derive(Subcommand, Debug)]
pub enum BsCmd {
    /// Certificate for one (case, size).
    Compute {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long)]
        json: bool,
    },
    /// Certificates for a fixed list of sizes.
    VerifyAll {
        #[arg(long, value_enum, default_value = "default")]
        sizes: Sizes,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum AlgebraCmd {
    /// Normal form of an expression.
    Nf {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Random associativity and rewriting-order checks.
    Fuzz {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct LadderArgs {
    #[command(flatten)]
    pub case: CaseArgs,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_rational)]
    pub lambda: Rational,
    #[arg(long, allow_hyphen_values = true)]
    pub window: Window,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse().map_err(|e: CoreError| e.to_string())
}

#[derive(Subcommand, Debug)]
pub enum ModuleCmd {
    /// Ladder built from the presentation, with its validation.
    Ladder {
        #[command(flatten)]
        args: LadderArgs,
        #[arg(long)]
        json: bool,
    },
    /// Ladder computed by differentiation, compared with the presentation.
    Psi {
        #[command(flatten)]
        args: LadderArgs,
    },
    /// Indices where the lowering edge vanishes.
    Breaks {
        #[command(flatten)]
        args: LadderArgs,
    },
}

/// JSON body of `module ladder --json`.
#[derive(Debug, Serialize, Deserialize)]
pub struct LadderReport {
    pub module: GradedModule,
    pub violations: Vec<Violation>,
}

enum Failure {
    Usage(String),
    Failed(String),
}

/// Exit code for a library error: bad case, size, window or number is a
/// usage error, anything else a failure.
pub fn error_exit_code(e: &CoreError) -> i32 {
    match e {
        CoreError::UnknownCase(_)
        | CoreError::InvalidSize { .. }
        | CoreError::InvalidWindow { .. }
        | CoreError::ParseRational(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        if error_exit_code(&e) == EXIT_USAGE {
            Failure::Usage(e.to_string())
        } else {
            Failure::Failed(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Failed(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

/// Runs the command line; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Failed(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAILURE
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Catalog(CatalogCmd::List { json }) => catalog_list(json, out),
        Command::Bs(BsCmd::Compute { case, json }) => bs_compute(case, json, out, err),
        Command::Bs(BsCmd::VerifyAll { sizes, json }) => bs_verify_all(sizes, json, out, err),
        Command::Algebra(AlgebraCmd::Nf { case, expr }) => algebra_nf(case, &expr, out),
        Command::Algebra(AlgebraCmd::Fuzz { case, trials, seed }) => {
            algebra_fuzz(case, trials, seed, out)
        }
        Command::Module(ModuleCmd::Ladder { args, json }) => module_ladder(&args, json, out),
        Command::Module(ModuleCmd::Psi { args }) => module_psi(&args, out),
        Command::Module(ModuleCmd::Breaks { args }) => module_breaks(&args, out),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn setup(case: CaseArgs) -> Result<(CaseInstance, Arc<APresentation>), Failure> {
    let inst = instantiate(case.case_id, case.size)?;
    let pres = Arc::new(APresentation::for_instance(&inst)?);
    Ok((inst, pres))
}

fn catalog_list(json: bool, out: &mut dyn Write) -> Outcome {
    let cases = list_cases();
    if json {
        writeln!(out, "{}", to_json(&cases))?;
        return Ok(EXIT_OK);
    }
    writeln!(out, "{:<4} {:<30} {:<16} {:<6} {:<28} disputed", "row", "space", "size", "deg f", "b(s)")?;
    for c in &cases {
        writeln!(
            out,
            "{:<4} {:<30} {:<16} {:<6} {:<28} {}",
            format!("({})", c.case_id),
            c.name,
            c.size_rule,
            c.deg_f_rule,
            c.b_factor_rule,
            if c.disputed { "yes" } else { "no" }
        )?;
        if let Some(rule) = &c.b_factor_rule_corrected {
            writeln!(out, "     corrected b(s): {rule}")?;
        }
    }
    Ok(EXIT_OK)
}

fn warn_disputed(cert: &BCertificate, err: &mut dyn Write) -> std::io::Result<()> {
    if cert.verdict == Verdict::MismatchDisputedRow {
        writeln!(
            err,
            "warning: row ({}) n={} is disputed: table prints {}, computed {}",
            cert.case_id,
            cert.size,
            cert.b_expected.display_factored(),
            cert.b_monic.display_factored()
        )?;
    }
    Ok(())
}

/// Only a hard mismatch fails; disputed rows are reported as warnings.
pub fn verdict_exit_code(verdict: Verdict) -> i32 {
    if verdict.is_hard_failure() {
        EXIT_FAILURE
    } else {
        EXIT_OK
    }
}

fn bs_compute(case: CaseArgs, json: bool, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let cert = bsat::verify_table(case.case_id, case.size)?;
    if json {
        writeln!(out, "{}", to_json(&cert))?;
    } else {
        let roots: Vec<String> = cert.roots.iter().map(Rational::to_string).collect();
        writeln!(out, "case ({}) n={}", cert.case_id, cert.size)?;
        writeln!(out, "b(s)     = {}", cert.b_monic.display_factored())?;
        writeln!(out, "c        = {}", cert.c)?;
        writeln!(out, "expected = {}", cert.b_expected.display_factored())?;
        writeln!(out, "roots    = {}", roots.join(", "))?;
        writeln!(out, "verdict  = {}", cert.verdict.as_str())?;
    }
    warn_disputed(&cert, err)?;
    Ok(verdict_exit_code(cert.verdict))
}

fn bs_verify_all(sizes: Sizes, json: bool, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let set = match sizes {
        Sizes::Default => SizeSet::Default,
        Sizes::Min => SizeSet::Min,
    };
    let mut certs = Vec::new();
    let mut code = EXIT_OK;
    for ((case_id, size), result) in verify_all(&set.cases()) {
        match result {
            Ok(cert) => certs.push(cert),
            Err(e) => {
                writeln!(err, "error: case ({case_id}) n={size}: {e}")?;
                code = EXIT_FAILURE;
            }
        }
    }
    if json {
        writeln!(out, "{}", to_json(&certs))?;
    }
    let mut disputed = 0;
    let mut hard = 0;
    for cert in &certs {
        if !json {
            writeln!(
                out,
                "({}) n={:<3} b(s) = {:<28} c = {:<6} {}",
                cert.case_id,
                cert.size,
                cert.b_monic.display_factored(),
                cert.c.to_string(),
                cert.verdict.as_str()
            )?;
        }
        warn_disputed(cert, err)?;
        match cert.verdict {
            Verdict::Match => {}
            Verdict::MismatchDisputedRow => disputed += 1,
            Verdict::Mismatch => {
                hard += 1;
                code = EXIT_FAILURE;
            }
        }
    }
    if !json {
        writeln!(
            out,
            "{} certificates: {} match, {disputed} disputed, {hard} mismatch",
            certs.len(),
            certs.len() - disputed - hard
        )?;
    }
    Ok(code)
}

fn algebra_nf(case: CaseArgs, text: &str, out: &mut dyn Write) -> Outcome {
    let e = parse_expr(text).map_err(|e| Failure::Usage(e.to_string()))?;
    let (_, pres) = setup(case)?;
    writeln!(out, "{}", eval_expr(&e, &pres))?;
    Ok(EXIT_OK)
}

fn algebra_fuzz(case: CaseArgs, trials: usize, seed: u64, out: &mut dyn Write) -> Outcome {
    let (_, pres) = setup(case)?;
    let report = confluence_fuzz(&pres, trials, seed);
    writeln!(
        out,
        "words checked: {}, comparisons: {}, discrepancies: {}",
        report.words_checked,
        report.comparisons,
        report.discrepancies.len()
    )?;
    for d in &report.discrepancies {
        writeln!(out, "  {} ({}): {} vs {}", d.word, d.check, d.left, d.right)?;
    }
    Ok(if report.is_clean() { EXIT_OK } else { EXIT_FAILURE })
}

fn write_edges(m: &GradedModule, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "{:<10} {:<10} {:<10}", "weight", "f edge", "delta edge")?;
    let scalar = |x: &Option<capelli_core::QMatrix>, open: bool| match x {
        _ if open => "-".to_string(),
        Some(m) if m.rows() == 1 && m.cols() == 1 => m.get(0, 0).to_string(),
        Some(m) => format!("{m:?}"),
        None => "0".to_string(),
    };
    for (weight, s) in m.spaces() {
        let top = s.top_open.iter().all(|&b| b);
        let bottom = s.bottom_open.iter().all(|&b| b);
        writeln!(
            out,
            "{:<10} {:<10} {:<10}",
            weight.to_string(),
            scalar(&s.raise, top),
            scalar(&s.lower, bottom)
        )?;
    }
    Ok(())
}

fn write_violations(v: &[Violation], out: &mut dyn Write) -> std::io::Result<()> {
    if v.is_empty() {
        writeln!(out, "validate: ok")
    } else {
        writeln!(out, "validate: {} violation(s)", v.len())?;
        for x in v {
            writeln!(out, "  {:?} at weight {}", x.kind, x.weight)?;
        }
        Ok(())
    }
}

fn module_ladder(args: &LadderArgs, json: bool, out: &mut dyn Write) -> Outcome {
    let (_, pres) = setup(args.case)?;
    let module = build_ladder(&pres, &args.lambda, args.window);
    let violations = module.validate();
    let code = if violations.is_empty() { EXIT_OK } else { EXIT_FAILURE };
    if json {
        writeln!(out, "{}", to_json(&LadderReport { module, violations }))?;
    } else {
        writeln!(out, "B(theta) = {}", pres.big_b())?;
        write_edges(&module, out)?;
        write_violations(&violations, out)?;
    }
    Ok(code)
}

fn module_psi(args: &LadderArgs, out: &mut dyn Write) -> Outcome {
    let (inst, pres) = setup(args.case)?;
    let psi = psi_of_ladder_with(&inst, &pres, &args.lambda, args.window)?;
    write_edges(&psi, out)?;
    let violations = psi.validate();
    write_violations(&violations, out)?;
    let witness = equivalence_witness_with(&inst, &pres, &args.lambda, args.window)?;
    writeln!(out, "witness: {}", if witness.passed { "pass" } else { "fail" })?;
    Ok(if witness.passed && violations.is_empty() { EXIT_OK } else { EXIT_FAILURE })
}

fn module_breaks(args: &LadderArgs, out: &mut dyn Write) -> Outcome {
    let (_, pres) = setup(args.case)?;
    let ks: BTreeSet<i64> = break_points(&pres, &args.lambda, args.window);
    let list: Vec<String> = ks.iter().map(i64::to_string).collect();
    writeln!(out, "{{{}}}", list.join(", "))?;
    Ok(EXIT_OK)
}
