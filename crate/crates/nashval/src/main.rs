//! Command-line interface: reads germ documents (JSON, single or batched),
//! runs the requested analysis, and prints a table or JSON report.
//!
//! Exit codes: 0 success, 1 validation rejection, 2 insufficient
//! truncation, 3 undecided verdicts under `--strict`.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nashval::report::{
    analyze_with, is_truncation_error, parse_batch, render, AnalyzeOptions, Format, InputDoc,
    ReportDoc,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Table,
    Json,
}

#[derive(Parser)]
#[command(
    name = "nashval",
    about = "Exact divisorial-valuation analysis of threefold germs xy = f(z,u) in C^4/(1/r)(a,-a,1,0)",
    version
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "table")]
    format: OutputFormat,
    /// Cross-check the closed-form enumeration against the resolution walk.
    #[arg(long, global = true)]
    oracle: bool,
    /// Exit with code 3 when any verdict is undecided.
    #[arg(long, global = true)]
    strict: bool,
    /// Override the truncation bound of every input document.
    #[arg(long, global = true)]
    trunc: Option<i64>,
    /// Extend or limit the printed weight table.
    #[arg(long = "max-k", global = true)]
    max_k: Option<i64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full report: weights, factorization, classification, verdicts.
    Analyze { input: Option<PathBuf> },
    /// Newton-weight table and stabilization depth only.
    Mk { input: Option<PathBuf> },
    /// Nash valuations (discrepancy at most one).
    Nash { input: Option<PathBuf> },
    /// Essentiality classification and the surjectivity verdict.
    Essential { input: Option<PathBuf> },
    /// Dump of the stepwise resolution and its divisors.
    Resolve { input: Option<PathBuf> },
    /// Factorization of the defining series and Q-factoriality.
    Factor { input: Option<PathBuf> },
    /// Compare the closed-form enumeration with the resolution walk.
    OracleCheck { input: Option<PathBuf> },
}

impl Command {
    fn input(&self) -> &Option<PathBuf> {
        match self {
            Command::Analyze { input }
            | Command::Mk { input }
            | Command::Nash { input }
            | Command::Essential { input }
            | Command::Resolve { input }
            | Command::Factor { input }
            | Command::OracleCheck { input } => input,
        }
    }

    fn options(&self, oracle_flag: bool, max_k: Option<i64>) -> AnalyzeOptions {
        let mut opts = match self {
            Command::Analyze { .. } => AnalyzeOptions::full(oracle_flag),
            Command::Mk { .. } => AnalyzeOptions::default(),
            Command::Nash { .. } | Command::Essential { .. } => AnalyzeOptions::full(false),
            Command::Resolve { .. } => AnalyzeOptions { tree: true, ..AnalyzeOptions::default() },
            Command::Factor { .. } => {
                AnalyzeOptions { factor: true, ..AnalyzeOptions::default() }
            }
            Command::OracleCheck { .. } => {
                AnalyzeOptions { oracle: true, ..AnalyzeOptions::default() }
            }
        };
        if oracle_flag {
            opts.oracle = true;
        }
        opts.max_k = max_k;
        opts
    }

    /// Keeps only the sections the subcommand is about.
    fn project(&self, report: &mut ReportDoc) {
        match self {
            Command::Analyze { .. } | Command::Essential { .. } => {}
            Command::Mk { .. } | Command::Resolve { .. } | Command::OracleCheck { .. } => {
                report.q_factorial = None;
                report.valuations = None;
                report.extra_valuations = None;
                report.surjectivity = None;
                report.counts = None;
            }
            Command::Nash { .. } => {
                report.q_factorial = None;
                report.surjectivity = None;
                if let Some(vals) = &mut report.valuations {
                    vals.retain(|v| v.nash);
                }
            }
            Command::Factor { .. } => {
                report.valuations = None;
                report.extra_valuations = None;
                report.surjectivity = None;
                report.counts = None;
            }
        }
    }
}

fn read_input(path: &Option<PathBuf>) -> std::io::Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p),
        _ => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            Ok(buf)
        }
    }
}

fn run_one(doc: &InputDoc, cli: &Cli) -> (String, u8) {
    let opts = cli.command.options(cli.oracle || doc.options.oracle, cli.max_k);
    match analyze_with(doc, opts) {
        Ok(mut report) => {
            cli.command.project(&mut report);
            let strict = cli.strict || doc.options.strict;
            let code = if strict && report.has_unknowns() { 3 } else { 0 };
            let format = match cli.format {
                OutputFormat::Table => Format::Table,
                OutputFormat::Json => Format::Json,
            };
            (render(&report, format), code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            (String::new(), if is_truncation_error(&e) { 2 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let raw = match read_input(cli.command.input()) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot read input: {e}");
            return ExitCode::from(1);
        }
    };
    let docs = match parse_batch(&raw) {
        Ok(docs) => docs,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if matches!(cli.trunc, Some(t) if t < 1) {
        eprintln!("error: --trunc must be positive");
        return ExitCode::from(1);
    }
    let docs: Vec<InputDoc> = docs
        .into_iter()
        .map(|mut d| {
            if let Some(t) = cli.trunc {
                d.trunc = t;
            }
            d
        })
        .collect();

    // batch entries are independent; run them on separate threads
    let results: Vec<(String, u8)> = if docs.len() > 1 {
        std::thread::scope(|scope| {
            let handles: Vec<_> = docs
                .iter()
                .map(|doc| scope.spawn(|| run_one(doc, &cli)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    } else {
        docs.iter().map(|doc| run_one(doc, &cli)).collect()
    };

    let mut worst = 0u8;
    for (text, code) in results {
        print!("{text}");
        worst = worst.max(code);
    }
    ExitCode::from(worst)
}
