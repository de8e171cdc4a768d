use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hrom_core::sim::ControllerMode;
use hrom_sim::app::{self, Overrides, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_OK};

#[derive(Parser)]
#[command(name = "hrom-sim", version, about = "Reduced-order quadruped simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    #[value(name = "open_loop")]
    OpenLoop,
    #[value(name = "pid_roll")]
    PidRoll,
    #[value(name = "mpc")]
    Mpc,
}

impl From<Mode> for ControllerMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::OpenLoop => ControllerMode::OpenLoop,
            Mode::PidRoll => ControllerMode::PidRoll,
            Mode::Mpc => ControllerMode::Mpc,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write log.csv and summary.txt.
    Run {
        scenario: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Simulated time, s.
        #[arg(long, allow_negative_numbers = true)]
        duration: Option<f64>,
        /// Exit with status 3 if any MPC solve hit its iteration cap.
        #[arg(long)]
        strict: bool,
    },
    /// Recompute the summary of a log.
    Metrics { log: PathBuf },
    /// Print the scenario's gait schedule.
    Gait {
        scenario: PathBuf,
        /// Print the trajectory matrices.
        #[arg(long, required = true)]
        emit_blocks: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK });
        }
    };
    let result = match cli.command {
        Command::Run { scenario, out, mode, duration, strict } => {
            let overrides = Overrides { out, mode: mode.map(Into::into), duration };
            app::run(&scenario, &overrides).map(|report| {
                print!("{}", report.summary);
                eprintln!("wrote {}", report.out_dir.display());
                if strict && report.log.mpc_warnings > 0 {
                    eprintln!("error: {} MPC solves hit the iteration cap", report.log.mpc_warnings);
                    EXIT_CONVERGENCE
                } else {
                    EXIT_OK
                }
            })
        }
        Command::Metrics { log } => app::metrics(&log).map(|s| {
            print!("{s}");
            EXIT_OK
        }),
        Command::Gait { scenario, .. } => app::gait_blocks(&scenario).map(|s| {
            print!("{s}");
            EXIT_OK
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
