use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use posmon_core::classify::{witness_search, SearchConfig, WitnessReport};
use posmon_core::factor::{factorizations_with, lengths_with};
use posmon_core::monoid::{atom_divisors_with, atoms, divisor_set_with, is_member, Limits};
use posmon_core::semiring::{biffs_equivalence, cyclic_suite, SemiringSpec, SuiteOutcome};
use posmon_core::{classify, parse_spec, truncate, Error, GeneratorSpec, PositiveRational};

const EXIT_USAGE: u8 = 1;
const EXIT_GUARD: u8 = 2;

#[derive(Parser)]
#[command(name = "posmon", version, about = "Factorization invariants of rational positive monoids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Atoms of a truncation
    Atoms {
        spec: PathBuf,
        #[arg(long, default_value_t = 4)]
        depth: u32,
    },
    /// Factorizations, lengths, divisors and atom divisors of an element
    Factor {
        spec: PathBuf,
        x: PositiveRational,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[command(flatten)]
        caps: Caps,
    },
    /// Divisors and atom divisors of an element
    Divisors {
        spec: PathBuf,
        x: PositiveRational,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[command(flatten)]
        caps: Caps,
    },
    /// Atomic / ACCP / BFM / FFM verdicts
    Classify {
        spec: PathBuf,
        #[command(flatten)]
        run: RunConfig,
    },
    /// Limit-point witness search
    Witness {
        spec: PathBuf,
        #[command(flatten)]
        run: RunConfig,
    },
    /// Six-statement report for the cyclic semiring N[r]
    Semiring {
        /// `n/d`, or `r = n/d`
        r: String,
        #[command(flatten)]
        run: RunConfig,
    },
}

#[derive(Args, Clone)]
struct Caps {
    /// Element cap for enumerations
    #[arg(long = "cap", default_value_t = Limits::default().element_cap)]
    element_cap: usize,
    #[arg(long, default_value_t = Limits::default().factorization_cap)]
    factorization_cap: usize,
}

impl Caps {
    fn limits(&self) -> Limits {
        Limits { element_cap: self.element_cap, factorization_cap: self.factorization_cap }
    }
}

#[derive(Args, Clone)]
struct RunConfig {
    #[arg(long, value_delimiter = ',', default_values_t = [2u32, 4, 6, 8])]
    depths: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_values = ["1/2", "1/5", "1/10", "1/20", "1/50"])]
    epsilons: Vec<PositiveRational>,
    #[arg(long)]
    x_bound: Option<PositiveRational>,
    #[command(flatten)]
    caps: Caps,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

impl RunConfig {
    fn search(&self) -> Result<SearchConfig, Error> {
        let config = SearchConfig {
            depths: self.depths.clone(),
            epsilons: self.epsilons.clone(),
            x_bound: self.x_bound.clone(),
            limits: self.caps.limits(),
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

/// What a command prints and how it exits.
struct Outcome {
    body: String,
    partial: bool,
}

impl Outcome {
    fn json(value: &impl Serialize) -> Self {
        Outcome { body: serde_json::to_string_pretty(value).expect("reports serialize"), partial: false }
    }

    fn partial(mut self, partial: bool) -> Self {
        self.partial = partial;
        self
    }
}

fn load(path: &Path) -> Result<GeneratorSpec, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse { line: 0, message: format!("cannot read {}: {e}", path.display()) })?;
    parse_spec(&text)
}

fn run(command: Command) -> Result<Outcome, Error> {
    match command {
        Command::Atoms { spec, depth } => {
            let spec = load(&spec)?;
            let t = truncate(&spec, depth)?;
            Ok(Outcome::json(&json!({
                "command": "atoms",
                "spec": spec.to_string(),
                "depth": depth,
                "atoms": atoms(&t),
            })))
        }
        Command::Factor { spec, x, depth, caps } => {
            let spec = load(&spec)?;
            let t = truncate(&spec, depth)?;
            let limits = caps.limits();
            let mut report = json!({
                "command": "factor",
                "spec": spec.to_string(),
                "depth": depth,
                "x": x,
                "member": is_member(&x, &t),
            });
            if is_member(&x, &t) {
                let zs = factorizations_with(&x, &t, &limits)?;
                report["factorizations"] = json!(zs);
                report["lengths"] = json!(lengths_with(&x, &t, &limits)?);
                report["divisors"] = json!(divisor_set_with(&x, &t, &limits)?);
                report["atom_divisors"] = json!(atom_divisors_with(&x, &t, &limits)?);
            }
            Ok(Outcome::json(&report))
        }
        Command::Divisors { spec, x, depth, caps } => {
            let spec = load(&spec)?;
            let t = truncate(&spec, depth)?;
            let limits = caps.limits();
            let mut report = json!({
                "command": "divisors",
                "spec": spec.to_string(),
                "depth": depth,
                "x": x,
                "member": is_member(&x, &t),
            });
            if is_member(&x, &t) {
                report["divisors"] = json!(divisor_set_with(&x, &t, &limits)?);
                report["atom_divisors"] = json!(atom_divisors_with(&x, &t, &limits)?);
            }
            Ok(Outcome::json(&report))
        }
        Command::Classify { spec, run } => {
            let spec = load(&spec)?;
            let c = classify(&spec, &run.search()?)?;
            let partial = c.witness_search.as_ref().is_some_and(|r| r.guard_trips().next().is_some());
            Ok(Outcome::json(&c).partial(partial))
        }
        Command::Witness { spec, run } => {
            let spec = load(&spec)?;
            let report = witness_search(&spec, &run.search()?)?;
            let partial = report.guard_trips().next().is_some();
            let out = match run.format {
                Format::Json => Outcome::json(&json!({ "spec": spec.to_string(), "report": report })),
                Format::Csv => Outcome { body: witness_csv(&report), partial: false },
            };
            Ok(out.partial(partial))
        }
        Command::Semiring { r, run } => {
            let literal = r.trim().strip_prefix('r').map_or(r.trim(), |s| s.trim_start().trim_start_matches('=')).trim();
            let r: PositiveRational = literal.parse()?;
            let config = run.search()?;
            let suite = cyclic_suite(&r, &config)?;
            let biffs = match suite.outcome {
                SuiteOutcome::NotApplicable => Value::Null,
                _ => json!(biffs_equivalence(&SemiringSpec::cyclic(r.clone())?, &config)?),
            };
            Ok(Outcome::json(&json!({ "command": "semiring", "r": r, "suite": suite, "biffs": biffs })))
        }
    }
}

fn witness_csv(report: &WitnessReport) -> String {
    let mut out = String::from("depth,x,delta\n");
    for w in &report.witnesses {
        for step in &w.deltas {
            out.push_str(&format!("{},{},{}\n", step.depth, w.x, step.delta));
        }
    }
    out
}

fn error_json(e: &Error) -> Value {
    let kind = match e {
        Error::Parse { .. } => "parse",
        e if e.is_guard_trip() => "guard_trip",
        Error::NotInMonoid(_) => "not_in_monoid",
        _ => "invalid_input",
    };
    let mut v = json!({ "error": kind, "message": e.to_string() });
    if let Error::Parse { line, .. } = e {
        v["line"] = json!(line);
    }
    v
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let newline = if out.body.ends_with('\n') { "" } else { "\n" };
            // a closed pipe (e.g. `| head`) is not an error for a report printer
            let _ = write!(stdout, "{}{newline}", out.body);
            if out.partial {
                ExitCode::from(EXIT_GUARD)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(if e.is_guard_trip() { EXIT_GUARD } else { EXIT_USAGE })
        }
    }
}
