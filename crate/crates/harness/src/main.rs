use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use diskconn_harness::report::{write_csv, write_summary};
use diskconn_harness::{generate, run, run_checked, Check, GenParams, Kind, Mode, Trace};

/// Replays disk-graph connectivity traces and reports per-op timings.
///
/// Without `--kind`, a generated trace is printed instead of replayed.
#[derive(Parser, Debug)]
#[command(name = "diskconn", version)]
struct Cli {
    /// udg, bdg, bdg-ref, inc, dec-bounded, dec-general or oracle.
    #[arg(long)]
    kind: Option<Kind>,
    /// Trace file to replay.
    #[arg(long, conflicts_with = "generate")]
    trace: Option<PathBuf>,
    /// Generate the trace from --n, --ops, --psi, --spread and --mode.
    #[arg(long)]
    generate: bool,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    ops: usize,
    #[arg(long, default_value_t = 1.0)]
    psi: f64,
    #[arg(long, default_value_t = 100.0)]
    spread: f64,
    #[arg(long, default_value = "fully-dynamic")]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Compare every answer with brute force; exit 1 with a report on mismatch.
    #[arg(long)]
    check_oracle: bool,
    /// Write the summary JSON here.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Write the per-op CSV here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn fail(code: u8, error: impl ToString) -> ExitCode {
    let doc = serde_json::json!({ "status": "error", "error": error.to_string() });
    println!("{doc}");
    ExitCode::from(code)
}

fn load(cli: &Cli) -> Result<Trace, String> {
    if cli.generate {
        let params = GenParams { mode: cli.mode, n: cli.n, ops: cli.ops, psi: cli.psi, spread: cli.spread, seed: cli.seed };
        return generate(params).map_err(|e| e.to_string());
    }
    let path = cli.trace.as_ref().ok_or("give --trace <file> or --generate")?;
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    text.parse().map_err(|e: diskconn_harness::TraceError| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let trace = match load(&cli) {
        Ok(t) => t,
        Err(e) => return fail(2, e),
    };
    let Some(kind) = cli.kind else {
        print!("{trace}");
        return ExitCode::SUCCESS;
    };
    let out = if cli.check_oracle {
        match run_checked(kind, &trace, cli.seed) {
            Ok(out) => out,
            Err(report) if report.minimal_prefix_len > 0 => {
                println!("{}", serde_json::to_string(&report).expect("serializable report"));
                return ExitCode::from(1);
            }
            Err(report) => return fail(2, &report.error),
        }
    } else {
        match run(kind, &trace, Check::None, cli.seed) {
            Ok(out) => out,
            Err(e) => return fail(2, e),
        }
    };
    let written = (|| -> Result<(), Box<dyn std::error::Error>> {
        match &cli.csv {
            Some(path) => write_csv(BufWriter::new(File::create(path)?), &out.records)?,
            None => write_csv(io::stdout().lock(), &out.records)?,
        }
        if let Some(path) = &cli.stats {
            let mut f = BufWriter::new(File::create(path)?);
            write_summary(&mut f, &out.summary)?;
            f.flush()?;
        }
        Ok(())
    })();
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(2, e),
    }
}
