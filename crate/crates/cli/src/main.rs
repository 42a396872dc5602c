use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qgw_core::qfun::{AlgebraKind, GroupModel};
use qgw_core::report::{self, CheckKind, ReportError, RunConfig};
use qgw_core::rmat::Series;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "qgw", version, about = "Exact checks for quantized coordinate rings of classical matrix groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one verification suite.
    Check {
        #[arg(value_enum)]
        check: CheckArg,
        #[command(flatten)]
        opts: Opts,
    },
    /// Run every suite at default caps and write one consolidated report.
    Report {
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args)]
struct Opts {
    #[arg(long, value_enum)]
    series: SeriesArg,
    #[arg(long)]
    rank: usize,
    #[arg(long, value_enum)]
    algebra: Option<AlgebraArg>,
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[arg(long)]
    max_degree: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckArg {
    Qybe,
    Cybe,
    Flatness,
    Twist,
    Jacobi,
    Semiclassical,
    Center,
    Freeness,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
    #[value(name = "C", alias = "c")]
    C,
    #[value(name = "D", alias = "d")]
    D,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgebraArg {
    Frt,
    Re,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Free,
    Sharp,
    Unitf,
}

impl From<CheckArg> for CheckKind {
    fn from(c: CheckArg) -> Self {
        match c {
            CheckArg::Qybe => CheckKind::Qybe,
            CheckArg::Cybe => CheckKind::Cybe,
            CheckArg::Flatness => CheckKind::Flatness,
            CheckArg::Twist => CheckKind::Twist,
            CheckArg::Jacobi => CheckKind::Jacobi,
            CheckArg::Semiclassical => CheckKind::Semiclassical,
            CheckArg::Center => CheckKind::Center,
            CheckArg::Freeness => CheckKind::Freeness,
        }
    }
}

impl Opts {
    fn config(&self) -> RunConfig {
        let series = match self.series {
            SeriesArg::A => Series::A,
            SeriesArg::B => Series::B,
            SeriesArg::C => Series::C,
            SeriesArg::D => Series::D,
        };
        RunConfig {
            series,
            rank: self.rank,
            algebra: self.algebra.map(|a| match a {
                AlgebraArg::Frt => AlgebraKind::Frt,
                AlgebraArg::Re => AlgebraKind::Re,
            }),
            model: self.model.map(|m| match m {
                ModelArg::Free => GroupModel::Free,
                ModelArg::Sharp => GroupModel::Sharp,
                ModelArg::Unitf => GroupModel::UnitF,
            }),
            max_degree: self.max_degree,
            seed: self.seed,
        }
    }
}

fn emit(doc: &Value, out: &Option<PathBuf>) -> Result<(), String> {
    let text = serde_json::to_string_pretty(doc).map_err(|e| e.to_string())? + "\n";
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fail(e: ReportError) -> ExitCode {
    eprintln!("qgw: {e}");
    match e {
        ReportError::Config(_) => ExitCode::from(2),
        ReportError::Compute(_) => ExitCode::from(1),
    }
}

fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::Check { check, opts } => {
            let cfg = opts.config();
            let kind = CheckKind::from(check);
            let start = Instant::now();
            let outcome = match report::run_check(kind, &cfg) {
                Ok(o) => o,
                Err(e) => return fail(e),
            };
            let ms = start.elapsed().as_millis();
            let mut doc = report::check_document(&outcome, &cfg);
            doc["timing_ms"] = json!(ms);
            if let Err(e) = emit(&doc, &opts.out) {
                eprintln!("qgw: {e}");
                return ExitCode::from(2);
            }
            let verdict = if outcome.pass { "pass" } else { "fail" };
            if opts.out.is_some() {
                println!("{}: {verdict} ({ms} ms)", kind.name());
            } else {
                eprintln!("{}: {verdict} ({ms} ms)", kind.name());
            }
            ExitCode::from(if outcome.pass { 0 } else { 1 })
        }
        Command::Report { opts } => {
            let cfg = opts.config();
            let start = Instant::now();
            let (doc, outcomes) = match report::report_all(&cfg) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            if let Err(e) = emit(&doc, &opts.out) {
                eprintln!("qgw: {e}");
                return ExitCode::from(2);
            }
            let summary: Vec<String> =
                outcomes.iter().map(|o| format!("{}: {}", o.kind.name(), if o.pass { "pass" } else { "fail" })).collect();
            let line = format!("{} ({} ms)", summary.join(", "), start.elapsed().as_millis());
            if opts.out.is_some() {
                println!("{line}");
            } else {
                eprintln!("{line}");
            }
            ExitCode::from(if outcomes.iter().all(|o| o.pass) { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    run(cli)
}
