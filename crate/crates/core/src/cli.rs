//! Command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 numeric failure,
//! 3 I/O failure. Diagnostics go to stderr; data goes to files under the
//! output directory.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::characteristics::CharacteristicsReport;
use crate::config::Config;
use crate::convergence::{crossing_localizer, EventContext};
use crate::error::{Error, Result};
use crate::generators::{catalog, Generator};
use crate::montecarlo::{self, write_atomic};
use crate::suite::{Scale, Suite, SuiteConfig, LOCALIZER_TOP};
use crate::transforms::TransformBundle;

#[derive(Debug, Parser)]
#[command(name = "jumpmart", version, about = "Simulate and check local martingales with jumps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit one sample path with its transforms and characteristics.
    Gen(PathArgs),
    /// Event flags, verdict and localizer report for one sample path.
    Analyze(PathArgs),
    /// Run a Monte Carlo experiment.
    Mc(McArgs),
    /// Run the acceptance battery.
    Suite(SuiteArgs),
    /// List the generator presets.
    Presets,
}

#[derive(Debug, Args)]
struct Source {
    /// Experiment file (TOML).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Preset name; see `jumpmart presets`.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Debug, Args)]
struct OutArg {
    /// Output directory.
    #[arg(long, env = "JUMPMART_OUT")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PathArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct McArgs {
    #[command(flatten)]
    source: Source,
    /// Base seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Trial count; overrides the config.
    #[arg(long)]
    trials: Option<usize>,
    /// Worker cap; overrides the config.
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct SuiteArgs {
    /// Reduced battery: at most 10³ trials per experiment.
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = SuiteConfig::default().seed)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    out: OutArg,
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("jumpmart: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::Analyze(a) => analyze(a),
        Command::Mc(a) => mc(a),
        Command::Suite(a) => suite(a),
        Command::Presets => {
            let mut out = std::io::stdout().lock();
            for (name, about) in catalog::PRESETS {
                writeln!(out, "{name:<30} {about}").map_err(|e| Error::io("<stdout>", e))?;
            }
            Ok(())
        }
    }
}

fn load(source: &Source) -> Result<Config> {
    match (&source.config, &source.preset) {
        (Some(path), _) => Config::load(path),
        (None, Some(name)) => Config::from_preset(name),
        (None, None) => Err(Error::Config("one of --config or --preset is required".into())),
    }
}

fn out_dir(flag: &OutArg, cfg: &Config) -> PathBuf {
    flag.out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn csv_bytes(write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(buf)
}

fn gen(a: PathArgs) -> Result<()> {
    let cfg = load(&a.source)?;
    let dir = out_dir(&a.out, &cfg);
    let g = Generator::new(cfg.generator.clone())?;
    let s = g.sample(a.seed)?;
    let path_csv = csv_bytes(|b| s.path.write_csv(b))?;
    let chars = CharacteristicsReport::build(&g, &s.path, &s.latent, &cfg.integrands)?;
    let chars_csv = csv_bytes(|b| chars.write_csv(b))?;
    let transform_csv = if g.spec().is_local_martingale() {
        let bundle = TransformBundle::build(&g, &s.path, &s.latent)?;
        Some(csv_bytes(|b| bundle.write_csv(b))?)
    } else {
        None
    };
    write_atomic(&dir.join("path.csv"), &path_csv)?;
    write_atomic(&dir.join("characteristics.csv"), &chars_csv)?;
    if let Some(t) = transform_csv {
        write_atomic(&dir.join("transforms.csv"), &t)?;
    }
    eprintln!("wrote {} grid points to {}", s.path.len(), dir.display());
    Ok(())
}

fn analyze(a: PathArgs) -> Result<()> {
    let cfg = load(&a.source)?;
    let dir = out_dir(&a.out, &cfg);
    let g = Generator::new(cfg.generator.clone())?;
    let s = g.sample(a.seed)?;
    let ctx = EventContext::new(g.clone(), cfg.params)?;
    let report = ctx.evaluate(&s)?;
    let levels: Vec<f64> = (1..=LOCALIZER_TOP).map(f64::from).collect();
    let loc = crossing_localizer(&s.path, &levels)?;
    let json = serde_json::json!({
        "seed": a.seed,
        "generator": cfg.generator,
        "params": cfg.params,
        "final_value": s.path.final_value(),
        "report": report,
        "localizer": loc,
    });
    let bytes = serde_json::to_vec_pretty(&json).map_err(|e| Error::Numeric(e.to_string()))?;
    write_atomic(&dir.join("report.json"), &bytes)?;
    println!(
        "{} X_T={:.6} [X,X]_T={:.6} log|E|={:.6}",
        report.verdict.label,
        s.path.final_value(),
        report.qv,
        report.log_e
    );
    Ok(())
}

fn mc(a: McArgs) -> Result<()> {
    let mut cfg = load(&a.source)?;
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    let threads = a.threads.or(cfg.threads);
    let dir = out_dir(&a.out, &cfg);
    let spec = cfg.experiment();
    let (results, files) = montecarlo::run_to_dir(&spec, threads, &dir)?;
    for row in results.summary()? {
        if row.kind == "marginal" || row.kind == "agreement" {
            println!("{:<10} {:<20} {:.4}", row.kind, row.name, row.estimate);
        }
    }
    eprintln!(
        "wrote {}, {} and {}",
        files.results.display(),
        files.summary.display(),
        files.manifest.display()
    );
    Ok(())
}

fn suite(a: SuiteArgs) -> Result<()> {
    let cfg = SuiteConfig {
        scale: if a.quick { Scale::Quick } else { Scale::Full },
        seed: a.seed,
        threads: a.threads,
        out: a.out.out,
    };
    if let Some(dir) = &cfg.out {
        ensure_dir(dir)?;
    }
    let outcomes = Suite::new(cfg).run(|o| println!("{o}"))?;
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} criteria passed", outcomes.len());
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}
