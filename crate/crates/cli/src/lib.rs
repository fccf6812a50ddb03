//! Command-line front end. [`run`] does all the work and returns what a
//! process would print, so the binary is a thin wrapper and tests can call
//! it directly.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use tabsynth_core::checker::holds_at_root;
use tabsynth_core::models::{load_model, load_synthesized, save_model, ExtensionPolicy};
use tabsynth_core::oracle::{oracle_epm, oracle_mcpm, EnumerationBudget, OracleResult};
use tabsynth_core::solver::{solve_formula, solve_sat, Run, SolveOptions};
use tabsynth_core::syntax::{negation_nnf, parse, Formula, LogicId};
use tabsynth_core::{dot, PartialModel};

/// Exit status and captured output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser)]
#[command(
    name = "tabsynth",
    version,
    about = "Tableau-based synthesis and checking over partial models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extend the model so that the formula holds at its root.
    Solve(SolveArgs),
    /// Is there an admissible extension satisfying the formula?
    Epm(SolveArgs),
    /// Do all admissible extensions satisfy the formula?
    Mcpm(SolveArgs),
    /// Satisfiability with model building.
    Sat(SatArgs),
    /// Check a complete model directly.
    Mc(McArgs),
    /// Bounded brute-force answer to `epm`.
    OracleEpm(OracleArgs),
    /// Bounded brute-force answer to `mcpm`.
    OracleMcpm(OracleArgs),
}

#[derive(Args)]
struct FormulaArgs {
    /// k, ltl or ctl.
    #[arg(long, value_parser = parse_logic)]
    logic: LogicId,
    #[arg(
        long,
        conflicts_with = "formula_file",
        required_unless_present = "formula_file"
    )]
    formula: Option<String>,
    /// Read the formula from a file instead.
    #[arg(long, value_name = "FILE")]
    formula_file: Option<PathBuf>,
    /// `machine` prints one JSON object without timings.
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: FormulaArgs,
    /// Partial model as JSON.
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    /// grow, fixed-states or complete.
    #[arg(long, value_parser = parse_policy, default_value = "grow")]
    policy: ExtensionPolicy,
    /// Where to write the synthesized model.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Where to write the final tableau and the model as Graphviz.
    #[arg(long, value_name = "FILE")]
    dot: Option<PathBuf>,
    /// Log tableau rule applications to stderr.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct SatArgs {
    #[command(flatten)]
    common: FormulaArgs,
    /// Where to write the synthesized model.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Where to write the final tableau and the model as Graphviz.
    #[arg(long, value_name = "FILE")]
    dot: Option<PathBuf>,
    /// Log tableau rule applications to stderr.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct McArgs {
    #[command(flatten)]
    common: FormulaArgs,
    /// Complete model as JSON, or a synthesized model document.
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: FormulaArgs,
    /// Partial model as JSON.
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    /// grow, fixed-states or complete.
    #[arg(long, value_parser = parse_policy, default_value = "grow")]
    policy: ExtensionPolicy,
    /// Maximum number of new states, at most 4.
    #[arg(long, default_value_t = 2)]
    bound: usize,
    /// Where to write the witness (or counterexample) extension.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

fn parse_logic(s: &str) -> Result<LogicId, String> {
    s.parse()
}

fn parse_policy(s: &str) -> Result<ExtensionPolicy, String> {
    s.parse()
}

/// A failure that maps to exit status 2.
struct Failure(String);

impl Failure {
    fn at(what: &str, e: impl std::fmt::Display) -> Failure {
        Failure(format!("{what}: {e}"))
    }
}

type Reported = Result<Report, Failure>;

/// What a command found, before formatting.
struct Report {
    fields: Map<String, Value>,
    /// Human-readable lines, in order.
    lines: Vec<(String, String)>,
    yes: bool,
    trace: Vec<String>,
}

impl Report {
    fn new(command: &'static str, logic: LogicId, formula: &Formula) -> Report {
        let mut r = Report {
            fields: Map::new(),
            lines: Vec::new(),
            yes: false,
            trace: Vec::new(),
        };
        r.field("command", json!(command));
        r.field("logic", json!(logic.name()));
        r.field("formula", json!(formula.to_string()));
        r
    }

    fn field(&mut self, key: &str, value: Value) {
        let shown = match &value {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        self.lines.push((key.to_string(), shown));
        self.fields.insert(key.to_string(), value);
    }

    fn artifact(&mut self, key: &str, path: &Path) {
        self.field(key, json!(path.display().to_string()));
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    if let Ok(seed) = std::env::var("TABSYNTH_SEED") {
        // Reserved for randomized heuristics; nothing consumes it yet.
        if seed.parse::<u64>().is_err() {
            return failure(Failure::at(
                "TABSYNTH_SEED",
                format!("`{seed}` is not an unsigned integer"),
            ));
        }
    }
    let started = Instant::now();
    let (result, format) = match cli.command {
        Command::Solve(a) => (solve_like("solve", &a), a.common.format),
        Command::Epm(a) => (solve_like("epm", &a), a.common.format),
        Command::Mcpm(a) => (mcpm(&a), a.common.format),
        Command::Sat(a) => (sat(&a), a.common.format),
        Command::Mc(a) => (mc(&a), a.common.format),
        Command::OracleEpm(a) => (oracle("oracle-epm", &a), a.common.format),
        Command::OracleMcpm(a) => (oracle("oracle-mcpm", &a), a.common.format),
    };
    match result {
        Ok(mut report) => {
            let code = if report.yes { 0 } else { 1 };
            report.fields.insert("exit_status".into(), json!(code));
            let stdout = match format {
                Format::Machine => {
                    let mut s = serde_json::to_string_pretty(&Value::Object(report.fields))
                        .expect("reports serialize");
                    s.push('\n');
                    s
                }
                Format::Human => {
                    let width = report.lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                    let mut s = String::new();
                    for (k, v) in &report.lines {
                        let _ = writeln!(s, "{k:width$}  {v}");
                    }
                    let _ = writeln!(
                        s,
                        "{:width$}  {:.3} ms",
                        "duration",
                        started.elapsed().as_secs_f64() * 1e3
                    );
                    let _ = writeln!(s, "{:width$}  {code}", "exit_status");
                    s
                }
            };
            let mut stderr = String::new();
            for line in &report.trace {
                stderr.push_str(line);
                stderr.push('\n');
            }
            Outcome {
                code,
                stdout,
                stderr,
            }
        }
        Err(f) => failure(f),
    }
}

fn failure(f: Failure) -> Outcome {
    Outcome {
        code: 2,
        stdout: String::new(),
        stderr: format!("error: {}\n", f.0),
    }
}

fn read(path: &Path, flag: &str) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::at(&format!("{flag} {}", path.display()), e))
}

fn write(path: &Path, flag: &str, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| Failure::at(&format!("{flag} {}", path.display()), e))
}

fn formula(args: &FormulaArgs) -> Result<Formula, Failure> {
    let (text, source) = match (&args.formula, &args.formula_file) {
        (Some(text), None) => (text.clone(), "--formula".to_string()),
        (None, Some(path)) => {
            let bytes = read(path, "--formula-file")?;
            let text = String::from_utf8(bytes)
                .map_err(|e| Failure::at(&format!("--formula-file {}", path.display()), e))?;
            (
                text.trim().to_string(),
                format!("--formula-file {}", path.display()),
            )
        }
        _ => {
            return Err(Failure(
                "exactly one of --formula and --formula-file is required".into(),
            ))
        }
    };
    parse(&text, args.logic).map_err(|e| Failure::at(&source, e))
}

fn model(path: &Path, logic: LogicId) -> Result<PartialModel, Failure> {
    let what = format!("--model {}", path.display());
    let m = load_model(&read(path, "--model")?).map_err(|e| Failure::at(&what, e))?;
    check_logic(&m, logic, &what)?;
    Ok(m)
}

fn check_logic(m: &PartialModel, logic: LogicId, what: &str) -> Result<(), Failure> {
    if m.logic() != logic {
        return Err(Failure::at(
            what,
            format!("model is declared {} but --logic is {}", m.logic(), logic),
        ));
    }
    Ok(())
}

fn stats(report: &mut Report, run: &Run) {
    let value = serde_json::to_value(&run.verdict.stats).expect("stats serialize");
    if let Value::Object(map) = &value {
        for (k, v) in map {
            report.lines.push((format!("  {k}"), v.to_string()));
        }
    }
    report.fields.insert("stats".into(), value);
}

fn emit(
    report: &mut Report,
    run: &Run,
    out: Option<&PathBuf>,
    dot_path: Option<&PathBuf>,
) -> Result<(), Failure> {
    if let (Some(path), Some(model)) = (out, &run.verdict.model) {
        write(path, "--out", &save_model(model))?;
        report.artifact("out", path);
    }
    if let Some(path) = dot_path {
        let mut text = dot::tableau_dot(&run.tableau);
        if let Some(model) = &run.verdict.model {
            text.push_str(&dot::model_dot(model));
        }
        write(path, "--dot", text.as_bytes())?;
        report.artifact("dot", path);
    }
    Ok(())
}

fn solve_run(a: &SolveArgs, phi: &Formula) -> Result<Run, Failure> {
    let m = model(&a.model, a.common.logic)?;
    let options = SolveOptions {
        policy: a.policy,
        trace: a.trace,
    };
    solve_formula(phi, &m, a.common.logic, options)
        .map_err(|e| Failure::at(&format!("--model {}", a.model.display()), e))
}

fn solve_like(command: &'static str, a: &SolveArgs) -> Reported {
    let phi = formula(&a.common)?;
    let run = solve_run(a, &phi)?;
    let mut report = Report::new(command, a.common.logic, &phi);
    report.field("policy", json!(a.policy.name()));
    report.yes = run.verdict.is_open();
    if command == "solve" {
        report.field("status", json!(run.verdict.status));
    } else {
        report.field("result", json!(report.yes));
    }
    report.trace = run.tableau.trace().to_vec();
    emit(&mut report, &run, a.out.as_ref(), a.dot.as_ref())?;
    stats(&mut report, &run);
    Ok(report)
}

/// All extensions satisfy `phi` iff none satisfies its negation; a model
/// of the negation, if any, is the counterexample written to `--out`.
fn mcpm(a: &SolveArgs) -> Reported {
    let phi = formula(&a.common)?;
    let negated = negation_nnf(&phi);
    let run = solve_run(a, &negated)?;
    let mut report = Report::new("mcpm", a.common.logic, &phi);
    report.field("policy", json!(a.policy.name()));
    report.yes = !run.verdict.is_open();
    report.field("result", json!(report.yes));
    report.trace = run.tableau.trace().to_vec();
    emit(&mut report, &run, a.out.as_ref(), a.dot.as_ref())?;
    stats(&mut report, &run);
    Ok(report)
}

fn sat(a: &SatArgs) -> Reported {
    let phi = formula(&a.common)?;
    let run = solve_sat(&phi, a.common.logic, a.trace).map_err(|e| Failure::at("--formula", e))?;
    let mut report = Report::new("sat", a.common.logic, &phi);
    report.yes = run.verdict.is_open();
    report.field("status", json!(run.verdict.status));
    report.trace = run.tableau.trace().to_vec();
    emit(&mut report, &run, a.out.as_ref(), a.dot.as_ref())?;
    stats(&mut report, &run);
    Ok(report)
}

fn mc(a: &McArgs) -> Reported {
    let phi = formula(&a.common)?;
    let what = format!("--model {}", a.model.display());
    // Synthesized models (with an embedding section) are accepted as well.
    let m = load_synthesized(&read(&a.model, "--model")?)
        .map_err(|e| Failure::at(&what, e))?
        .model;
    check_logic(&m, a.common.logic, &what)?;
    let yes = holds_at_root(&m, &phi).map_err(|e| Failure::at(&what, e))?;
    let mut report = Report::new("mc", a.common.logic, &phi);
    report.yes = yes;
    report.field("result", json!(yes));
    Ok(report)
}

fn oracle(command: &'static str, a: &OracleArgs) -> Reported {
    let phi = formula(&a.common)?;
    let m = model(&a.model, a.common.logic)?;
    let budget = EnumerationBudget::new(a.bound).map_err(|e| Failure::at("--bound", e))?;
    let what = format!("--model {}", a.model.display());
    let result: OracleResult = if command == "oracle-epm" {
        oracle_epm(&phi, &m, a.policy, budget, a.common.logic)
    } else {
        oracle_mcpm(&phi, &m, a.policy, budget, a.common.logic)
    }
    .map_err(|e| Failure::at(&what, e))?;
    let mut report = Report::new(command, a.common.logic, &phi);
    report.field("policy", json!(a.policy.name()));
    report.field("bound", json!(a.bound));
    report.yes = result.value;
    report.field("result", json!(result.value));
    report.field("bounded", json!(result.bounded));
    if let (Some(path), Some(w)) = (&a.out, &result.witness) {
        write(path, "--out", &save_model(w))?;
        report.artifact(
            if command == "oracle-epm" {
                "witness"
            } else {
                "counterexample"
            },
            path,
        );
    }
    Ok(report)
}
