use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gneseek::bench::run::{error_exit_code, OUTPUT_ROOT_ENV};
use gneseek::bench::{matrix, run_batch, run_experiment, ExperimentConfig};
use gneseek::compensators::{
    check_output_strict_passivity, check_positive_real, check_storage_certificate,
    check_zero_dc_gain, solve_regulator_equations, BlockData, FrequencyGrid,
};
use gneseek::game::{monotonicity_report, solve_gne_newton, solve_gne_oracle};
use gneseek::Error;

#[derive(Parser)]
#[command(name = "gneseek", version, about = "Passivity-based GNE seeking dynamics")]
struct Cli {
    /// Output root directory.
    #[arg(long, global = true, env = OUTPUT_ROOT_ENV)]
    output_root: Option<PathBuf>,
    /// Override the experiment seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the integration step.
    #[arg(long, global = true)]
    h: Option<f64>,
    /// Override the integration horizon.
    #[arg(long, global = true)]
    horizon: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config.
    Run { config: PathBuf },
    /// Run a named experiment matrix in parallel.
    Bench { matrix: String },
    /// Check a compensator block file against every certificate.
    VerifyCompensator { block: PathBuf },
    /// Solve a game config for its variational GNE.
    Oracle { config: PathBuf },
}

fn apply_overrides(cli: &Cli, c: &mut ExperimentConfig) {
    if let Some(s) = cli.seed {
        c.seed = s;
    }
    if let Some(h) = cli.h {
        c.integrator.h = h;
    }
    if let Some(t) = cli.horizon {
        c.integrator.horizon = t;
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(error_exit_code(e) as u8)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let root = cli.output_root.clone();
    match &cli.command {
        Command::Run { config } => {
            let mut c = match ExperimentConfig::load(config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            apply_overrides(&cli, &mut c);
            match run_experiment(&c, root.as_deref()) {
                Ok(out) => {
                    let s = &out.summary;
                    println!(
                        "{}: {:?} at t = {:.3}, residual {:.3e}, written to {}",
                        s.name,
                        s.terminal_reason,
                        s.final_time,
                        s.residual.total,
                        out.directory.as_ref().map(|d| d.display().to_string()).unwrap_or_default()
                    );
                    ExitCode::from(out.exit_code() as u8)
                }
                Err(e) => fail(&e),
            }
        }
        Command::Bench { matrix: name } => {
            let mut configs = match matrix(name) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            for c in &mut configs {
                apply_overrides(&cli, c);
            }
            let mut worst = 0;
            for (name, res) in run_batch(&configs, root.as_deref()) {
                let code = match &res {
                    Ok(o) => o.exit_code(),
                    Err(e) => error_exit_code(e),
                };
                match res {
                    Ok(o) => println!(
                        "{name}: exit {code}, {:?} at t = {:.3}, residual {:.3e}",
                        o.summary.terminal_reason, o.summary.final_time, o.summary.residual.total
                    ),
                    Err(e) => println!("{name}: exit {code}, {e}"),
                }
                worst = worst.max(code);
            }
            ExitCode::from(worst as u8)
        }
        Command::VerifyCompensator { block } => {
            let block = match std::fs::read_to_string(block)
                .map_err(Error::from)
                .and_then(|t| Ok(serde_json::from_str::<BlockData>(&t)?))
                .and_then(|d| d.build())
            {
                Ok(b) => b,
                Err(e) => return fail(&e),
            };
            let grid = FrequencyGrid::default();
            let pr = check_positive_real(&block, &grid);
            let osp = check_output_strict_passivity(&block, &grid);
            let report = serde_json::json!({
                "positive_real": pr,
                "output_strict_passivity": osp,
                "zero_dc_gain": check_zero_dc_gain(&block).map_err(|e| e.to_string()),
                "regulator": solve_regulator_equations(&block, false)
                    .map(|p| gneseek::linalg::to_rows(&p))
                    .map_err(|e| e.to_string()),
                "certificate": check_storage_certificate(&block, osp.delta).map_err(|e| e.to_string()),
            });
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable report"));
            ExitCode::SUCCESS
        }
        Command::Oracle { config } => {
            let c = match ExperimentConfig::load(config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let res = c.build_game().and_then(|g| {
                let graph = c.build_graph(&g)?;
                let k = if g.is_linear_quadratic() {
                    solve_gne_oracle(&g, &graph)?
                } else {
                    solve_gne_newton(&g, &graph)?
                };
                Ok((monotonicity_report(&g, 1000, c.seed), k))
            });
            match res {
                Ok((mono, k)) => {
                    let out = serde_json::json!({ "monotonicity": mono, "kkt_point": k });
                    println!("{}", serde_json::to_string_pretty(&out).expect("serializable point"));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
    }
}
