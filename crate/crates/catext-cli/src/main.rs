//! Batch front-end: one JSON request per invocation, one JSON report on
//! stdout. Payloads come from a file argument or stdin; `psu-demo` needs
//! only flags. Exit codes: 0 ok, 1 violations found (report still emitted),
//! 2 malformed input, 3 resource refusal.

mod cmd;
mod wire;

use catext::Error;
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "catext", version, about = "Exact cohomology and extension calculus over finite categories")]
struct Cli {
    /// Indent the JSON report.
    #[arg(long, global = true)]
    pretty: bool,

    /// Cell budget for cochain enumeration (default 262144; env
    /// CATEXT_MAX_CELLS applies when the flag is absent).
    #[arg(long, global = true, value_name = "N")]
    max_cells: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the laws of a category, functor, extension, or toral datum.
    Validate { input: Option<PathBuf> },
    /// Cohomology of a category with functor coefficients, degrees 0..=n.
    Cohom {
        input: Option<PathBuf>,
        /// Top cohomological degree.
        #[arg(long, default_value_t = 2)]
        degree: usize,
    },
    /// Extension class of a validated extension.
    ExtClass { input: Option<PathBuf> },
    /// Build an extension from coefficients and a 2-cocycle.
    ExtBuild { input: Option<PathBuf> },
    /// Decide equivalence of two extensions over the same base.
    ExtEquiv { input: Option<PathBuf> },
    /// Decide whether the projection splits functorially.
    ExtSplit { input: Option<PathBuf> },
    /// Automorphisms over the identity modulo inner, via first cohomology.
    ExtAut { input: Option<PathBuf> },
    /// Scalar-coefficient self-morphism test against the class criterion.
    ExtScalarAut {
        input: Option<PathBuf>,
        /// The coefficient scalar.
        #[arg(long)]
        degree: i64,
    },
    /// Adams automorphisms of a truncated toral datum.
    Adams {
        input: Option<PathBuf>,
        /// Check one candidate degree instead of enumerating.
        #[arg(long)]
        degree: Option<i64>,
        /// Unit precision for --degree (defaults to the torus level).
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Group cohomology from a multiplication table, degrees 0..=n.
    GroupCohom {
        input: Option<PathBuf>,
        /// Top cohomological degree.
        #[arg(long, default_value_t = 2)]
        degree: usize,
    },
    /// First-cohomology vanishing report for a Weyl-style action.
    WeylH1 { input: Option<PathBuf> },
    /// The projective monomial-group obstruction at an odd prime.
    PsuDemo {
        #[arg(long)]
        p: u64,
        #[arg(long = "K")]
        k: u32,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Cohom { .. } => "cohom",
            Command::ExtClass { .. } => "ext-class",
            Command::ExtBuild { .. } => "ext-build",
            Command::ExtEquiv { .. } => "ext-equiv",
            Command::ExtSplit { .. } => "ext-split",
            Command::ExtAut { .. } => "ext-aut",
            Command::ExtScalarAut { .. } => "ext-scalar-aut",
            Command::Adams { .. } => "adams",
            Command::GroupCohom { .. } => "group-cohom",
            Command::WeylH1 { .. } => "weyl-h1",
            Command::PsuDemo { .. } => "psu-demo",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Status {
    Ok,
    Violations,
    Malformed,
    Refused,
}

impl Status {
    fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Violations => 1,
            Status::Malformed => 2,
            Status::Refused => 3,
        }
    }
}

fn status_of(e: &Error) -> Status {
    match e {
        Error::Malformed(_) => Status::Malformed,
        Error::Invalid(_) | Error::NoSolution => Status::Violations,
        Error::Refused(_) => Status::Refused,
    }
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    status: Status,
    #[serde(skip_serializing_if = "Value::is_null")]
    result: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    witnesses: Vec<String>,
    elapsed_ms: u128,
}

fn read_payload(input: &Option<PathBuf>) -> std::io::Result<String> {
    match input {
        Some(path) if path.as_os_str() != "-" => std::fs::read_to_string(path),
        _ => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            Ok(buf)
        }
    }
}

fn dispatch(command: &Command, max_cells: u64) -> catext::Result<cmd::CmdOut> {
    let payload = |input: &Option<PathBuf>| -> catext::Result<String> {
        read_payload(input).map_err(|e| Error::Malformed(format!("cannot read input: {e}")))
    };
    match command {
        Command::Validate { input } => cmd::validate(&payload(input)?),
        Command::Cohom { input, degree } => cmd::cohom(&payload(input)?, *degree, max_cells),
        Command::ExtClass { input } => cmd::ext_class(&payload(input)?, max_cells),
        Command::ExtBuild { input } => cmd::ext_build(&payload(input)?, max_cells),
        Command::ExtEquiv { input } => cmd::ext_equiv(&payload(input)?, max_cells),
        Command::ExtSplit { input } => cmd::ext_split(&payload(input)?, max_cells),
        Command::ExtAut { input } => cmd::ext_aut(&payload(input)?, max_cells),
        Command::ExtScalarAut { input, degree } => {
            cmd::ext_scalar_aut(&payload(input)?, *degree, max_cells)
        }
        Command::Adams { input, degree, precision } => {
            cmd::adams(&payload(input)?, *degree, *precision, max_cells)
        }
        Command::GroupCohom { input, degree } => {
            cmd::group_cohom(&payload(input)?, *degree, max_cells)
        }
        Command::WeylH1 { input } => cmd::weyl_h1(&payload(input)?),
        Command::PsuDemo { p, k } => cmd::psu_demo(*p, *k),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();

    let budget = match cli.max_cells {
        Some(n) => Ok(n),
        None => match std::env::var("CATEXT_MAX_CELLS") {
            Ok(v) => v.parse::<u64>().map_err(|_| {
                Error::Malformed(format!("CATEXT_MAX_CELLS is not a cell count: {v:?}"))
            }),
            Err(_) => Ok(1 << 18),
        },
    };

    let outcome = budget.and_then(|max_cells| dispatch(&cli.command, max_cells));
    let (status, result, witnesses) = match outcome {
        Ok(out) => {
            let status = if out.violated { Status::Violations } else { Status::Ok };
            (status, out.result, out.witnesses)
        }
        Err(e) => (status_of(&e), Value::Null, vec![e.to_string()]),
    };

    let report = Report {
        command: cli.command.name(),
        status,
        result,
        witnesses,
        elapsed_ms: started.elapsed().as_millis(),
    };
    let text = if cli.pretty {
        serde_json::to_string_pretty(&report)
    } else {
        serde_json::to_string(&report)
    }
    .expect("report serialization");
    println!("{text}");
    ExitCode::from(status.exit_code())
}
