//! Batch front end: `analyze` one function, `verify` the theorem suite,
//! `reproduce` the reference table.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pshsymm::config::{OutputFormat, RunConfig};
use pshsymm::runner;

#[derive(Parser)]
#[command(name = "pshsymm", version, about = "Singularity invariants of S1-invariant psh functions under Schwarz symmetrization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CommonOpts {
    /// Seed for all Monte Carlo streams (falls back to $PSH_SYMM_SEED, then 42).
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo samples per volume estimate.
    #[arg(long)]
    mc_samples: Option<usize>,
    /// Depth of the symmetrization grid (negative).
    #[arg(long, allow_hyphen_values = true)]
    t_min: Option<f64>,
    /// Relative tolerance of the adaptive quadrature.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Output formats (comma separated): json, csv, svg.
    #[arg(long, value_delimiter = ',')]
    format: Vec<String>,
    /// Optional JSON config file; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one function: invariants, symmetrization, reports.
    Analyze {
        /// Catalog name (e.g. ex-4.1, demailly, log-norm) or a JSON spec path.
        target: Option<String>,
        /// Explicit JSON spec path.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Explicit catalog name.
        #[arg(long)]
        catalog: Option<String>,
        /// Complex dimension for the log-norm family.
        #[arg(long)]
        n: Option<usize>,
        /// Parameter(s) for the Demailly family; the first is used.
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run the theorem suite over catalog entries.
    Verify {
        /// Entries to verify; empty plus --all means the whole catalog.
        names: Vec<String>,
        /// Verify every catalog entry.
        #[arg(long)]
        all: bool,
        /// Demailly parameters to expand a bare "demailly" name into.
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Reproduce the reference invariant table of the worked examples.
    Reproduce {
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn build_config(common: &CommonOpts) -> Result<RunConfig, String> {
    let mut config = RunConfig::default();
    // precedence: flags > config file > environment seed > defaults
    if let Ok(seed) = std::env::var("PSH_SYMM_SEED") {
        config.seed = seed
            .parse()
            .map_err(|_| format!("PSH_SYMM_SEED is not a u64: {seed}"))?;
    }
    if let Some(path) = &common.config {
        let body = std::fs::read_to_string(path).map_err(|e| format!("config file: {e}"))?;
        let v: serde_json::Value =
            serde_json::from_str(&body).map_err(|e| format!("config file: {e}"))?;
        if let Some(x) = v.get("seed").and_then(|x| x.as_u64()) {
            config.seed = x;
        }
        if let Some(x) = v.get("mc_samples").and_then(|x| x.as_u64()) {
            config.mc_samples = x as usize;
        }
        if let Some(x) = v.get("t_floor").and_then(|x| x.as_f64()) {
            config.t_floor = x;
        }
        if let Some(x) = v.get("quad_rel_tol").and_then(|x| x.as_f64()) {
            config.quad_rel_tol = x;
        }
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(s) = common.mc_samples {
        if s == 0 {
            return Err("--mc-samples must be positive".to_string());
        }
        config.mc_samples = s;
    }
    if let Some(t) = common.t_min {
        if !(t < -1.0) {
            return Err("--t-min must be < -1".to_string());
        }
        config.t_floor = t;
    }
    if let Some(r) = common.rel_tol {
        if !(r > 0.0) {
            return Err("--rel-tol must be positive".to_string());
        }
        config.quad_rel_tol = r;
    }
    config.out_dir = common.out.clone();
    if !common.format.is_empty() {
        let mut formats = BTreeSet::new();
        for f in &common.format {
            formats.insert(match f.as_str() {
                "json" => OutputFormat::Json,
                "csv" => OutputFormat::Csv,
                "svg" => OutputFormat::Svg,
                other => return Err(format!("unknown format {other:?}")),
            });
        }
        config.formats = formats;
    }
    Ok(config)
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            1
        }
    };
    ExitCode::from(code as u8)
}

fn run(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Analyze {
            target,
            spec,
            catalog,
            n,
            eps,
            common,
        } => {
            let config = build_config(&common)?;
            let target = spec
                .map(|p| p.to_string_lossy().into_owned())
                .or(catalog)
                .or(target)
                .ok_or("analyze needs a target: positional NAME, --spec PATH or --catalog NAME")?;
            runner::run_analyze(&target, n, eps.first().copied(), &config)
                .map_err(|e| e.to_string())
        }
        Command::Verify {
            names,
            all,
            eps,
            common,
        } => {
            let config = build_config(&common)?;
            let mut expanded: Vec<String> = Vec::new();
            for name in &names {
                if name == "demailly" && !eps.is_empty() {
                    for e in &eps {
                        expanded.push(format!("demailly-{e}"));
                    }
                } else {
                    expanded.push(name.clone());
                }
            }
            if all {
                expanded.clear();
            } else if expanded.is_empty() {
                return Err("verify needs entry names or --all".to_string());
            }
            runner::run_verify(&expanded, &config).map_err(|e| e.to_string())
        }
        Command::Reproduce { common } => {
            let config = build_config(&common)?;
            runner::run_reproduce(&config).map_err(|e| e.to_string())
        }
    }
}
