use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use leibniz_ce::action::{act_on_params, elementary_to_adapted, read_params, AdaptedTransform, ElementaryTransform};
use leibniz_ce::algebra::{is_filiform, lower_central_series, StructureTensor};
use leibniz_ce::classification::{classify_with, exceptional_orbits, isomorphic_with, representatives, ExtraOrbit, RepresentativeEntry};
use leibniz_ce::family::{build_table, random_params, solve_leibniz_constraints, ExtensionParams};
use leibniz_ce::verify::verify_all;
use leibniz_ce::Tolerance;

/// Flag decisions closer than this to the zero threshold are reported on stderr.
const MARGIN_WARNING: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "leibniz-ce")]
#[command(about = "Central extensions of graded filiform Lie algebras as Leibniz algebras: build, act, classify, verify")]
#[command(version)]
struct Cli {
    /// Dimension parameter n (the algebra has dimension n + 1)
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Seed for every random choice
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Trials per check for verify-paper
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,

    /// Relative part of the zero test
    #[arg(long, global = true)]
    tol_rel: Option<f64>,

    /// Absolute part of the zero test
    #[arg(long, global = true)]
    tol_abs: Option<f64>,

    /// Input JSON file, or - for stdin
    #[arg(long, global = true)]
    input: Option<String>,

    /// Output file, or - for stdout
    #[arg(long, global = true, default_value = "-")]
    output: String,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Parameters to multiplication table; samples parameters when only --n is given
    Build,
    /// Leibniz residual, filiform test and lower central series of a table
    Check,
    /// Apply an adapted transform: input {"params", "transform"}
    Act,
    /// Subset, canonical representative and witness of a parameter tuple
    Classify,
    /// Decide isomorphism: input {"p", "q"}
    Isomorphic,
    /// Representative of every subset for --n
    Representatives,
    /// Solve the Leibniz constraints of the general ansatz for --n
    DeriveConstraints,
    /// Run the full verification suite
    VerifyPaper,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Domain(#[from] leibniz_ce::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(format!("malformed JSON: {e}"))
    }
}

/// Parameters, or a table in adapted form from which they are read.
#[derive(Deserialize)]
#[serde(untagged)]
enum AlgebraInput {
    Table(StructureTensor),
    Params(ExtensionParams),
}

impl AlgebraInput {
    fn params(self) -> Result<ExtensionParams, CliError> {
        match self {
            AlgebraInput::Params(p) => Ok(p),
            AlgebraInput::Table(t) => Ok(read_params(&t)?),
        }
    }

    fn table(self) -> Result<StructureTensor, CliError> {
        match self {
            AlgebraInput::Params(p) => Ok(build_table(&p)?),
            AlgebraInput::Table(t) => Ok(t),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TransformInput {
    Adapted(AdaptedTransform),
    Elementary(ElementaryTransform),
}

#[derive(Deserialize)]
struct ActInput {
    params: AlgebraInput,
    transform: TransformInput,
}

#[derive(Deserialize)]
struct PairInput {
    p: AlgebraInput,
    q: AlgebraInput,
}

#[derive(Serialize)]
struct CheckOutput {
    dim: usize,
    leibniz_residual: f64,
    worst_triple: (usize, usize, usize),
    filiform: bool,
    series: Vec<usize>,
}

#[derive(Serialize)]
struct RepresentativeTable {
    n: usize,
    subsets: Vec<RepresentativeEntry>,
    extra_orbits: Vec<ExtraOrbit>,
}

struct Outcome {
    value: Value,
    table: Option<String>,
    failed: bool,
}

impl Outcome {
    fn of<T: Serialize>(v: &T) -> Result<Self, CliError> {
        Ok(Outcome { value: serde_json::to_value(v)?, table: None, failed: false })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(failed) => ExitCode::from(u8::from(failed)),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let out = dispatch(cli)?;
    let text = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&out.value)?;
            s.push('\n');
            s
        }
        Format::Table => out.table.unwrap_or_else(|| flatten(&out.value)),
    };
    write_output(&cli.output, &text)?;
    Ok(out.failed)
}

fn tolerance(cli: &Cli) -> Result<Tolerance, CliError> {
    let d = Tolerance::default();
    let tol = Tolerance::new(cli.tol_abs.unwrap_or(d.abs), cli.tol_rel.unwrap_or(d.rel));
    if !(tol.abs >= 0.0 && tol.rel >= 0.0 && tol.abs.is_finite() && tol.rel.is_finite()) {
        return Err(CliError::Input("tolerances must be finite and non-negative".into()));
    }
    Ok(tol)
}

fn require_n(cli: &Cli) -> Result<usize, CliError> {
    cli.n.ok_or_else(|| CliError::Input("--n is required".into()))
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let tol = tolerance(cli)?;
    match cli.command {
        Command::Build => {
            let p = match (cli.input.as_deref(), cli.n) {
                (None, Some(n)) => random_params(n, None, cli.seed)?,
                _ => parse::<AlgebraInput>(cli)?.params()?,
            };
            Outcome::of(&build_table(&p)?)
        }
        Command::Check => {
            let t = parse::<AlgebraInput>(cli)?.table()?;
            let defect = t.leibniz_defect();
            Outcome::of(&CheckOutput {
                dim: t.dim(),
                leibniz_residual: defect.max,
                worst_triple: defect.triple,
                filiform: is_filiform(&t),
                series: lower_central_series(&t).dims,
            })
        }
        Command::Act => {
            let input: ActInput = parse(cli)?;
            let p = input.params.params()?;
            let t = match input.transform {
                TransformInput::Adapted(t) => t,
                TransformInput::Elementary(e) => elementary_to_adapted(&e, p.n)?,
            };
            Outcome::of(&act_on_params(&t, &p)?)
        }
        Command::Classify => {
            let p = parse::<AlgebraInput>(cli)?.params()?;
            let c = classify_with(&p, &tol)?;
            if c.label.flag_margin < MARGIN_WARNING {
                eprintln!(
                    "warning: a zero/nonzero decision is within {:.1e} of the threshold; the subset may depend on --tol-rel/--tol-abs",
                    c.label.flag_margin
                );
            }
            Outcome::of(&c)
        }
        Command::Isomorphic => {
            let input: PairInput = parse(cli)?;
            Outcome::of(&isomorphic_with(&input.p.params()?, &input.q.params()?, &tol)?)
        }
        Command::Representatives => {
            let n = require_n(cli)?;
            Outcome::of(&RepresentativeTable { n, subsets: representatives(n)?, extra_orbits: exceptional_orbits(n)? })
        }
        Command::DeriveConstraints => Outcome::of(&solve_leibniz_constraints(require_n(cli)?)?),
        Command::VerifyPaper => {
            let report = verify_all(cli.seed, cli.trials)?;
            let mut out = Outcome::of(&report)?;
            out.table = Some(report.to_table());
            out.failed = !report.all_passed();
            Ok(out)
        }
    }
}

fn read_input(cli: &Cli) -> Result<String, CliError> {
    let path = cli.input.as_deref().unwrap_or("-");
    let mut s = String::new();
    if path == "-" {
        io::stdin().read_to_string(&mut s).map_err(|e| CliError::Input(format!("reading stdin: {e}")))?;
    } else {
        s = fs::read_to_string(path).map_err(|e| CliError::Input(format!("reading {path}: {e}")))?;
    }
    Ok(s)
}

fn parse<T: for<'de> Deserialize<'de>>(cli: &Cli) -> Result<T, CliError> {
    let text = read_input(cli)?;
    let value: Value = serde_json::from_str(&text)?;
    // untagged enums hide the field-level reason; `hint` recovers it
    serde_json::from_value(value.clone()).map_err(|e| CliError::Input(format!("unexpected input shape: {e}; {}", hint(&value))))
}

fn hint(v: &Value) -> String {
    let err = if v.get("gamma").is_some() {
        serde_json::from_value::<StructureTensor>(v.clone()).err().map(|e| format!("as a table: {e}"))
    } else if v.get("n").is_some() {
        serde_json::from_value::<ExtensionParams>(v.clone()).err().map(|e| format!("as parameters: {e}"))
    } else {
        None
    };
    err.unwrap_or_else(|| "expected parameters, a table, or an object with the documented fields".into())
}

fn write_output(path: &str, text: &str) -> Result<(), CliError> {
    if path == "-" {
        let mut out = io::stdout().lock();
        out.write_all(text.as_bytes()).map_err(|e| CliError::Input(format!("writing stdout: {e}")))
    } else {
        fs::write(path, text).map_err(|e| CliError::Input(format!("writing {path}: {e}")))
    }
}

/// One `path<TAB>value` line per leaf; `[re, im]` pairs print as complex numbers.
fn flatten(v: &Value) -> String {
    let mut lines = Vec::new();
    walk(v, String::new(), &mut lines);
    let mut s = lines.join("\n");
    s.push('\n');
    s
}

fn walk(v: &Value, path: String, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                walk(x, if path.is_empty() { k.clone() } else { format!("{path}.{k}") }, out);
            }
        }
        Value::Array(items) => {
            if let [Value::Number(re), Value::Number(im)] = items.as_slice() {
                let (re, im) = (re.as_f64().unwrap_or(f64::NAN), im.as_f64().unwrap_or(f64::NAN));
                out.push(format!("{path}\t{re}{}{}i", if im < 0.0 { "-" } else { "+" }, im.abs()));
                return;
            }
            for (i, x) in items.iter().enumerate() {
                walk(x, format!("{path}[{i}]"), out);
            }
        }
        leaf => out.push(format!("{path}\t{leaf}")),
    }
}
