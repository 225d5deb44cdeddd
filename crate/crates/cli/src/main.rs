use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use subdyn::algorithms::sweep_seeds;
use subdyn_cli::config::Overrides;
use subdyn_cli::{audit, output_dir, parse_seed_range, prepare, run_to, CliError};

#[derive(Parser)]
#[command(
    name = "subdyn",
    version,
    about = "Online submodular minimization experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Number of rounds T.
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// OSPGD step scale; the step size is delta / sqrt(T).
    #[arg(long)]
    delta: Option<f64>,
    /// Regret factor.
    #[arg(long)]
    alpha: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            rounds: self.rounds,
            seed: self.seed,
            delta: self.delta,
            alpha: self.alpha,
            out: self.out.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write trace.csv and summary.json.
    Run(RunArgs),
    /// Audit a set-function fixture with the exhaustive oracles.
    Audit {
        /// Audit fixture (JSON).
        #[arg(long)]
        config: PathBuf,
    },
    /// Run one replica per seed, each into OUT/seed-<k>.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Seed range, `A..B` or `A..=B`.
        #[arg(long)]
        seeds: String,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SUBDYN_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(&args),
        Command::Audit { config } => run_audit(&config),
        Command::Sweep { run, seeds } => sweep(&run, &seeds),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(args: &RunArgs) -> Result<(), CliError> {
    let prepared = prepare(&args.config, &args.overrides())?;
    let dir = output_dir(&prepared);
    let art = run_to(&prepared, &dir)?;
    log::info!("wrote {} in {:.3} s", dir.display(), art.summary.wall_time);
    Ok(())
}

fn sweep(args: &RunArgs, seeds: &str) -> Result<(), CliError> {
    let seeds = parse_seed_range(seeds)
        .map_err(|e| CliError::Invalid(subdyn_cli::config::ValidationError(e)))?;
    let base = prepare(&args.config, &args.overrides())?;
    let root = output_dir(&base);
    let results = sweep_seeds(&seeds, |seed| {
        let mut p = base.clone();
        p.config.seed = seed;
        run_to(&p, &root.join(format!("seed-{seed}")))
    });
    let mut failed = None;
    for (seed, r) in seeds.iter().zip(results) {
        if let Err(e) = r {
            eprintln!("seed {seed}: {e}");
            failed.get_or_insert(e);
        }
    }
    failed.map_or(Ok(()), Err)
}

fn run_audit(path: &PathBuf) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Invalid(subdyn_cli::config::ValidationError(format!(
            "cannot read {}: {e}",
            path.display()
        )))
    })?;
    let (fixture, fns) = audit::load(&text)?;
    print!("{}", audit::audit(&fixture, &fns));
    Ok(())
}
