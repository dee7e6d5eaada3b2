use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use regge::app::{error_json, exit_code, run, Command, GridSpec};
use regge::config::RunConfig;
use regge::error::Error;

#[derive(Parser)]
#[command(name = "regge", version, about = "Regge poles and inverse scattering on warped balls")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, short)]
    config: PathBuf,
    /// Override a config key, e.g. `--set numerics.kernel_n=256`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (beats REGGE_OUT_DIR, which beats `outputs.dir`).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Tabulate Q_f on [0, a].
    Potential,
    /// Solve for the transformation kernel.
    Kernel,
    /// Sample psi(0, z) on a grid.
    Jost {
        /// re0:re1:im0:im1:n
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
    },
    /// Locate Regge poles.
    Poles,
    /// Compare located poles with the asymptotic predictors.
    VerifyAsymptotics,
    /// Rebuild m(z) from its poles.
    WtReconstruct {
        /// CSV with columns z_re,z_im.
        #[arg(long)]
        test_points: Option<PathBuf>,
    },
    /// Dirichlet-to-Neumann multipliers per sphere mode.
    Dtn,
    /// Q_f to scattering data and back.
    MarchenkoRoundtrip,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match go(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

fn go(cli: Cli) -> Result<(), Error> {
    let cfg = match RunConfig::load(&cli.config, &cli.set) {
        Err(Error::Io(e)) => return Err(Error::Config { path: cli.config.display().to_string(), msg: e.to_string() }),
        r => r?,
    };
    let cmd = match cli.cmd {
        Sub::Potential => Command::Potential,
        Sub::Kernel => Command::Kernel,
        Sub::Jost { grid } => Command::Jost { grid: grid.parse::<GridSpec>()? },
        Sub::Poles => Command::Poles,
        Sub::VerifyAsymptotics => Command::VerifyAsymptotics,
        Sub::WtReconstruct { test_points } => Command::WtReconstruct { test_points },
        Sub::Dtn => Command::Dtn,
        Sub::MarchenkoRoundtrip => Command::MarchenkoRoundtrip,
    };
    if cfg.numerics.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.numerics.threads)
            .build_global()
            .map_err(|e| Error::Config { path: "numerics.threads".into(), msg: e.to_string() })?;
    }
    let out = cfg.out_dir(cli.out_dir.as_deref());
    let manifest = run(&cmd, &cfg, &out)?;
    println!("{}", serde_json::to_string(&manifest).expect("manifest serializes"));
    Ok(())
}
