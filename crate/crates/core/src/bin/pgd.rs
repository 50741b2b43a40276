use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pgd_core::config::{CaseConfig, Overrides};
use pgd_core::pgd::Method;
use pgd_core::report::emit_reports;
use pgd_core::run::{run_case, summary};
use pgd_core::{verify, PgdError};

const EXIT_SOLVER: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(name = "pgd", version, about = "Space-time PGD reduced models of the 1D wave equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one case and write CSV reports.
    Run {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
        case: Option<u8>,
        /// Coarse mesh and time grid (56 elements, 256 steps, 24 modes).
        #[arg(long)]
        desk_scale: bool,
        #[arg(long)]
        m_max: Option<usize>,
        /// Comma-separated subset of lpgd1, lpgd2, hpgd.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<Method>>,
        /// Output directory; defaults to $PGD_OUT_DIR, then the config, then out/case<N>.
        #[arg(long, env = "PGD_OUT_DIR")]
        out: Option<PathBuf>,
        /// TOML configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the acceptance checks.
    Verify {
        /// Run only these checks (1 to 12).
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<u8>>,
    },
}

fn exit_code(e: &PgdError) -> u8 {
    match e {
        PgdError::Config { .. } | PgdError::InvalidArgument(_) | PgdError::Io { .. } => EXIT_CONFIG,
        _ => EXIT_SOLVER,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match cli.command {
        Command::Run {
            case,
            desk_scale,
            m_max,
            methods,
            out,
            config,
        } => {
            let overrides = Overrides {
                case,
                desk_scale,
                m_max,
                methods,
                out_dir: out,
            };
            let cfg = match CaseConfig::resolve(config.as_deref(), &overrides) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("configuration error: {e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            let run = match run_case(&cfg) {
                Ok(run) => run,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(exit_code(&e));
                }
            };
            for line in summary(&run) {
                println!("{line}");
            }
            match emit_reports(&cfg, Some(&run), &cfg.out_dir) {
                Ok(files) => println!("wrote {} files to {}", files.len(), cfg.out_dir.display()),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(exit_code(&e));
                }
            }
            if run.any_failure() {
                ExitCode::from(EXIT_SOLVER)
            } else {
                ExitCode::SUCCESS
            }
        }
        Command::Verify { only } => {
            let ids = only.unwrap_or_else(|| (1..=12).collect());
            let mut all = true;
            for id in ids {
                match verify::check(id) {
                    Some(outcome) => {
                        all &= outcome.passed;
                        println!("{outcome}");
                    }
                    None => {
                        eprintln!("no check numbered {id}");
                        return ExitCode::from(EXIT_CONFIG);
                    }
                }
            }
            if all {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
