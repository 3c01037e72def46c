mod commands;
mod config;
mod error;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bergman_coorbit::frames::ReconstructionMethod;
use clap::{Parser, Subcommand, ValueEnum};

use config::{expand_sweep, ExperimentConfig};
use error::CliError;

#[derive(Parser)]
#[command(
    name = "bergman-coorbit",
    version,
    about = "Atomic decompositions and sampling for weighted Bergman spaces on the ball"
)]
struct Cli {
    /// JSON experiment configuration; defaults apply to missing fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output` from the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// `KEY=v1,v2,...`: run once per value of a numeric config field.
    #[arg(long, global = true)]
    sweep: Option<String>,
    /// Worker threads for the numerical kernels.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant checks and write `verify.json`.
    Verify,
    /// Generate the sampling lattice.
    Lattice,
    /// Estimate frame bounds on the truncated polynomial space.
    FrameBounds,
    /// Decompose a function into atoms.
    Decompose {
        #[arg(long)]
        input: PathBuf,
    },
    /// Reconstruct a function from its samples.
    Reconstruct {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::LeastSquares)]
        method: Method,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    LeastSquares,
    AtomProjection,
}

impl From<Method> for ReconstructionMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::LeastSquares => ReconstructionMethod::LeastSquares,
            Method::AtomProjection => ReconstructionMethod::AtomProjection,
        }
    }
}

fn run_one(
    command: &Command,
    cfg: &ExperimentConfig,
    dir: &Path,
) -> Result<(&'static [&'static str], Vec<String>), CliError> {
    std::fs::create_dir_all(dir)?;
    Ok(match command {
        Command::Verify => {
            let pass = commands::verify_cmd(cfg, dir)?;
            (&["all_pass"], vec![pass.to_string()])
        }
        Command::Lattice => (commands::LATTICE_SUMMARY, commands::lattice_cmd(cfg, dir)?),
        Command::FrameBounds => (
            commands::FRAME_BOUNDS_SUMMARY,
            commands::frame_bounds_cmd(cfg, dir)?,
        ),
        Command::Decompose { input } => {
            let f = commands::load_function(input, cfg.n)?;
            (
                commands::DECOMPOSE_SUMMARY,
                commands::decompose_cmd(cfg, &f, dir)?,
            )
        }
        Command::Reconstruct { input, method } => {
            let f = commands::load_function(input, cfg.n)?;
            (
                commands::RECONSTRUCT_SUMMARY,
                commands::reconstruct_cmd(cfg, &f, (*method).into(), dir)?,
            )
        }
    })
}

fn run(cli: Cli) -> Result<bool, CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::config("--threads", "must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    let mut base = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = cli.out {
        base.output = out;
    }
    let out = base.output.clone();
    let runs = match &cli.sweep {
        Some(s) => {
            let key = s
                .split_once('=')
                .map(|(k, _)| k.trim().to_string())
                .unwrap_or_default();
            expand_sweep(&base, s)?
                .into_iter()
                .map(|(v, cfg)| (Some((key.clone(), v)), cfg))
                .collect()
        }
        None => vec![(None, base)],
    };
    std::fs::create_dir_all(&out)?;
    let mut header: Vec<&str> = Vec::new();
    let mut rows = Vec::new();
    let mut all_pass = true;
    for (label, cfg) in &runs {
        let dir = match label {
            Some((k, v)) => out.join(format!("{k}={v}")),
            None => out.clone(),
        };
        let (h, row) = run_one(&cli.command, cfg, &dir)?;
        if matches!(cli.command, Command::Verify) && row[0] == "false" {
            all_pass = false;
        }
        header = match label {
            Some(_) => std::iter::once("sweep_value")
                .chain(h.iter().copied())
                .collect(),
            None => h.to_vec(),
        };
        rows.push(match label {
            Some((_, v)) => std::iter::once(v.clone()).chain(row).collect(),
            None => row,
        });
    }
    report::write_csv(&out.join("summary.csv"), &header, &rows)?;
    Ok(all_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error[verification_failed]: one or more invariant checks failed");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
