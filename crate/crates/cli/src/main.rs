use clap::{Parser, ValueEnum};
use qha_cli::{registry_listing, run_experiment, write_outputs, write_plot, CliError, ExperimentConfig, PlotKind};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

/// Flag names clap owns; any other `--key=value` is a config override.
const FLAGS: &[&str] = &["config", "seed", "N", "out", "workers", "kind", "help", "version"];

#[derive(Parser, Debug)]
#[command(
    name = "qha",
    version,
    about = "Run quantum harmonic analysis experiments",
    after_help = "Any further --key=value is a config override; `qha list` prints the experiments."
)]
struct Args {
    /// Experiment name, `list`, or `plot`.
    command: String,
    /// CSV file for `plot`.
    input: Option<PathBuf>,
    /// JSON config file (flat object of keys).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Base truncation; the experiment also runs at 2N.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Output directory (or output file for `plot`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; never changes reported values.
    #[arg(long)]
    workers: Option<usize>,
    /// Plot kind for `plot`.
    #[arg(long, value_enum)]
    kind: Option<Kind>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    LoglogSpectrum,
    RatioCurve,
}

fn split_overrides(argv: Vec<String>) -> (Vec<String>, Vec<String>) {
    let mut args = Vec::new();
    let mut overrides = Vec::new();
    for a in argv {
        match a.strip_prefix("--").and_then(|s| s.split_once('=')) {
            Some((k, _)) if !FLAGS.contains(&k) => overrides.push(a[2..].to_string()),
            _ => args.push(a),
        }
    }
    (args, overrides)
}

fn run(args: Args, overrides: Vec<String>) -> Result<i32, CliError> {
    if let Some(w) = args.workers {
        if w == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global().map_err(|e| CliError::Usage(format!("cannot size the worker pool: {e}")))?;
    }
    match args.command.as_str() {
        "list" => {
            print!("{}", registry_listing());
            return Ok(0);
        }
        "plot" => {
            let input = args.input.ok_or_else(|| CliError::Usage("plot needs a CSV path".into()))?;
            let kind = match args.kind {
                Some(Kind::RatioCurve) => PlotKind::RatioCurve,
                _ => PlotKind::LoglogSpectrum,
            };
            let out = args.out.unwrap_or_else(|| input.with_extension("svg"));
            write_plot(&input, kind, &out)?;
            println!("wrote {}", out.display());
            return Ok(0);
        }
        _ => {}
    }
    if args.input.is_some() {
        return Err(CliError::Usage("unexpected positional argument".into()));
    }
    let mut cfg = ExperimentConfig::new(&args.command)?;
    if let Some(path) = &args.config {
        cfg.merge_file(path)?;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(n) = args.n {
        cfg.n = Some(n);
    }
    for o in &overrides {
        cfg.apply_override(o)?;
    }
    if let Some(out) = args.out {
        cfg.out = out;
    }
    let start = Instant::now();
    let output = run_experiment(&cfg)?;
    let meta = serde_json::json!({
        "timestamp_unix": SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        "elapsed_seconds": start.elapsed().as_secs_f64(),
        "workers": rayon::current_num_threads(),
        "version": env!("CARGO_PKG_VERSION"),
    });
    write_outputs(&output, &cfg.out, &meta)?;
    let r = &output.report;
    for g in &r.gates {
        println!("{} gate {}: max error {:.3e} (tolerance {:e})", if g.passed { "PASS" } else { "FAIL" }, g.name, g.max_error, g.tolerance);
    }
    for c in &r.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("report: {}", cfg.out.join("report.json").display());
    Ok(r.exit_code())
}

fn main() -> ExitCode {
    let (argv, overrides) = split_overrides(std::env::args().collect());
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(args, overrides) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
