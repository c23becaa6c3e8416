use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use idtlab_cli::{calibrate_cmd, export_paths, load_config, report, run, CliError, CliResult, Overrides};

#[derive(Parser)]
#[command(name = "idtlab", version, about = "Generate α-IDT process ensembles and run distributional checks")]
struct Cli {
    /// Worker threads (never affects results). Defaults to all cores.
    #[arg(long, global = true, env = "IDTLAB_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    config: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the ensemble size.
    #[arg(long = "paths")]
    paths: Option<usize>,
    /// Override the output directory.
    #[arg(long = "out")]
    out: Option<PathBuf>,
}

impl ConfigArgs {
    fn overrides(&self) -> Overrides {
        Overrides { seed: self.seed, n_paths: self.paths, output_dir: self.out.clone() }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the tests of a config and write reports.
    Run(ConfigArgs),
    /// Calibrate thresholds for the tests of a config.
    Calibrate(ConfigArgs),
    /// Write the config's ensemble as CSV and/or binary.
    Export(ConfigArgs),
    /// Pretty-print the summary in an output directory.
    Report { dir: PathBuf },
}

fn dispatch(cmd: Command) -> CliResult<u8> {
    match cmd {
        Command::Run(a) => {
            let cfg = load_config(&a.config, &a.overrides())?;
            let summary = run(&cfg)?;
            let (text, _) = report(&cfg.output_dir)?;
            print!("{text}");
            Ok(summary.exit_code())
        }
        Command::Calibrate(a) => {
            let cfg = load_config(&a.config, &a.overrides())?;
            let path = calibrate_cmd(&cfg)?;
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::Export(a) => {
            let cfg = load_config(&a.config, &a.overrides())?;
            for p in export_paths(&cfg)? {
                println!("wrote {}", p.display());
            }
            Ok(0)
        }
        Command::Report { dir } => {
            let (text, summary) = report(&dir)?;
            print!("{text}");
            Ok(summary.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = cli.threads {
        if k == 0 {
            eprintln!("idtlab: --threads must be at least 1");
            return ExitCode::from(2);
        }
        builder = builder.num_threads(k);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("idtlab: cannot start thread pool: {e}");
            return ExitCode::from(3);
        }
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("idtlab: {e}");
            ExitCode::from(CliError::exit_code(&e))
        }
    }
}
