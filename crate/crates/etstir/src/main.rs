use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use etstir::{run_from_config, RunOptions};
use etstir_core::driver::SteadyState;

const DEFAULT_OUT: &str = "etstir_out";

/// AC electrothermal stirring and surface binding in a 2-D microchannel.
#[derive(Debug, Parser)]
#[command(name = "etstir", version)]
struct Cli {
    /// Case or sweep config file (TOML).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Override a config value, e.g. --set drive.v_rms=10. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory. Defaults to $ETSTIR_OUT, then ./etstir_out.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Cases solved in parallel during a sweep.
    #[arg(long, default_value_t = 1, value_name = "N")]
    workers: usize,
    /// Write potential, temperature, velocity, pressure and concentration fields.
    #[arg(long)]
    dump_fields: bool,
    /// Write an SVG of coverage against time.
    #[arg(long)]
    plot: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli
        .out
        .or_else(|| std::env::var_os("ETSTIR_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let opts = RunOptions {
        out,
        workers: cli.workers.max(1),
        dump_fields: cli.dump_fields,
        plot: cli.plot,
    };
    let report = match run_from_config(&cli.config, &cli.set, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("etstir: {e}");
            return ExitCode::FAILURE;
        }
    };

    println!("{}", report.table.axis.column());
    for row in &report.table.rows {
        match &row.outcome {
            Ok(r) => {
                let t = match r.t_steady {
                    SteadyState::Reached(t) => format!("{t:.1}"),
                    SteadyState::NotReached => "not reached".into(),
                };
                println!(
                    "{:e}  dT_max {:.3} K  v_down {:.3e} m/s  u_max {:.3e} m/s  t_steady {}  ({:.1} s wall)",
                    row.value, r.dt_max, r.v_down_max, r.u_max, t, row.wall_seconds
                );
            }
            Err(e) => println!("{:e}  error: {e}", row.value),
        }
    }
    println!("wrote {} artifacts to {}", report.manifest.artifacts.len(), report.manifest.output_dir.display());

    let failures = report.failures();
    if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        for (v, e) in failures {
            eprintln!("etstir: case {v:e} failed: {e}");
        }
        ExitCode::FAILURE
    }
}
