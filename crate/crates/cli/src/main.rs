use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zplane_cli::{run, Command, Failure, Options, EXIT_CONFIG};

#[derive(Parser)]
#[command(name = "zplane", version, about = "Charge-plane resonance search")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Eigenvalues of the rotated charge operator at one energy.
    Eigs(Common),
    /// Eigenvalue trajectories over an energy grid (CSV, optional SVG).
    Sweep(Common),
    /// Newton refinement from a starting energy.
    Find(Common),
    /// Automatic crossing search over an Im E schedule.
    Scan(Common),
    /// Refinement followed by a (lambda, theta, N) stability scan.
    Stability(Common),
    /// Compare against the embedded reference tables.
    Table(Common),
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Directory for output files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps and scans.
    #[arg(long)]
    threads: Option<usize>,
    /// Also write an SVG trajectory plot (sweep only).
    #[arg(long)]
    svg: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Sub::Eigs(c) => (Command::Eigs, c),
        Sub::Sweep(c) => (Command::Sweep, c),
        Sub::Find(c) => (Command::Find, c),
        Sub::Scan(c) => (Command::Scan, c),
        Sub::Stability(c) => (Command::Stability, c),
        Sub::Table(c) => (Command::Table, c),
    };
    let opts = Options { out: common.out, svg: common.svg };

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = common.threads {
        if k == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
        builder = builder.num_threads(k);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };

    let result: Result<(), Failure> = pool.install(|| {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        run(command, &common.config, &opts, &mut lock)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
