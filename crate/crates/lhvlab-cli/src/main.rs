//! `lhvlab`: decide Bell locality and EPR steerability of scene files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lhvlab_core::scene::{error_exit_code, run_scene_file, ParamOverrides};

#[derive(Parser)]
#[command(name = "lhvlab", version, about = "Bell locality / EPR steerability decision toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scene file and report the verdict with its certificate.
    Run {
        /// Scene description (JSON).
        scene: PathBuf,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for the steering solver (default 1, reproducible).
        #[arg(long)]
        threads: Option<usize>,
        /// Steering membership tolerance.
        #[arg(long)]
        dist_tol: Option<f64>,
        /// Target duality gap for the steering solver.
        #[arg(long)]
        gap_tol: Option<f64>,
        /// Feasibility tolerance for the Bell LP.
        #[arg(long)]
        feas_tol: Option<f64>,
        /// Iteration budget for the steering solver.
        #[arg(long)]
        max_iters: Option<usize>,
        /// Seed echoed into the report (the deciders are deterministic).
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            scene,
            out,
            threads,
            dist_tol,
            gap_tol,
            feas_tol,
            max_iters,
            seed,
        } => {
            let overrides = ParamOverrides {
                dist_tol,
                gap_tol,
                feas_tol,
                max_iters,
                threads,
                seed,
            };
            match run_scene_file(&scene, out.as_deref(), &overrides) {
                Ok(report) => {
                    eprintln!("{}", report.summary());
                    if out.is_none() {
                        match report.to_json() {
                            Ok(text) => println!("{text}"),
                            Err(e) => {
                                eprintln!("error: {e}");
                                return ExitCode::from(1);
                            }
                        }
                    }
                    ExitCode::from(report.exit_code as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(error_exit_code(&e) as u8)
                }
            }
        }
    }
}
