use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use cocycle_cli::{run, Format, Overrides, Scenario, Verb};

/// Rigidity experiments for matrix cocycles over shifts.
#[derive(Debug, Parser)]
#[command(name = "cocycle", version)]
struct Args {
    #[arg(value_enum)]
    verb: Verb,

    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,

    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Directory receiving `<verb>.txt` or `<verb>.records`.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "text")]
    format: Format,

    /// Overrides the end-to-end tolerance.
    #[arg(long)]
    tol: Option<f64>,

    /// Overrides the bunching horizon.
    #[arg(long)]
    horizon: Option<usize>,

    /// Overrides the sample count.
    #[arg(long)]
    samples: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let scenario = match Scenario::load(&args.scenario) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let overrides = Overrides {
        seed: args.seed,
        tol: args.tol,
        horizon: args.horizon,
        samples: args.samples,
    };
    let scenario = overrides.apply(&scenario);
    let report = match run(args.verb, &scenario) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let rendered = report.render(args.format);
    match &args.out {
        Some(dir) => {
            let ext = match args.format {
                Format::Text => "txt",
                Format::Records => "records",
            };
            let path = dir.join(format!("{}.{ext}", args.verb.name()));
            if let Err(e) = fs::create_dir_all(dir).and_then(|_| fs::write(&path, &rendered)) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{rendered}"),
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        for r in report.failures().take(10) {
            eprintln!("failed: {} value {:e}", r.check, r.value);
        }
        ExitCode::from(1)
    }
}
