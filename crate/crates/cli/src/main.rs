use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coopcast::bounds::broadcast_lower_bound;
use coopcast::continuum::continuum_growth_from;
use coopcast::harness::{
    classify_regimes, estimate_broadcast_prob, run_sweep, run_table1, ClassifyConfig, Metric, SweepSpec, CSV_HEADER,
    SEED_HASH,
};
use coopcast::{Dimension, Error, ModelParams, Window};

#[derive(Parser)]
#[command(name = "coopcast", version, about = "Cooperative broadcast simulator for Poisson networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the broadcast probability of one parameter cell.
    Simulate {
        #[arg(long, value_parser = parse_dim)]
        dim: Dimension,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        lambda: f64,
        /// Window half-width.
        #[arg(long)]
        extent: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "full")]
        metric: Metric,
        #[arg(long, default_value_t = 1.0)]
        p_t: f64,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
    },
    /// Run a parameter sweep described by a JSON file; CSV goes to stdout
    /// unless --csv is given.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Also print regime labels (stderr).
        #[arg(long)]
        classify: bool,
        #[arg(long, default_value_t = 0.5)]
        ratio: f64,
        #[arg(long, default_value_t = 0.05)]
        floor: f64,
    },
    /// Lower bound on the broadcast probability, as JSON.
    Bounds {
        #[arg(long, value_parser = parse_dim)]
        dim: Dimension,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        lambda: f64,
        /// Truncation level; defaults to the smallest giving a tail
        /// correction of 0.99.
        #[arg(long = "K")]
        k: Option<u64>,
    },
    /// Frontier trajectory of the continuum model, as CSV.
    Continuum {
        #[arg(long, value_parser = parse_dim)]
        dim: Dimension,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        /// Initial radius.
        #[arg(long, default_value_t = 1.0)]
        r0: f64,
    },
    /// Run the built-in regime grid and print one label per row.
    Table1 {
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        ratio: f64,
        #[arg(long, default_value_t = 0.05)]
        floor: f64,
    },
}

fn parse_dim(s: &str) -> Result<Dimension, String> {
    let d: u8 = s.parse().map_err(|_| format!("'{s}' is not 1 or 2"))?;
    Dimension::try_from(d).map_err(|e| e.to_string())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 2,
        Error::Invariant(_) | Error::Quadrature { .. } => 3,
        _ => 1,
    }
}

fn classify_config(ratio: f64, floor: f64) -> Result<ClassifyConfig, Error> {
    if !(ratio > 0.0 && ratio <= 1.0) || !(0.0..1.0).contains(&floor) {
        return Err(Error::InvalidParameter("need 0 < ratio <= 1 and 0 <= floor < 1".into()));
    }
    Ok(ClassifyConfig { ratio, floor })
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Simulate { dim, alpha, lambda, extent, trials, seed, metric, p_t, tau } => {
            let params = ModelParams::new(alpha, lambda, p_t, tau)?;
            let window = Window::new(dim, extent)?;
            let cell = estimate_broadcast_prob(&params, &window, trials, seed, metric)?;
            println!("{CSV_HEADER}");
            println!("{}", cell.csv_row());
        }
        Command::Sweep { spec, csv, json, classify, ratio, floor } => {
            let config = classify_config(ratio, floor)?;
            let spec = SweepSpec::from_json_file(&spec)?;
            let result = run_sweep(&spec)?;
            match &csv {
                Some(path) => result.write_csv(path)?,
                None => print!("{}", result.to_csv()),
            }
            if let Some(path) = &json {
                result.write_json(path)?;
            }
            if classify {
                for row in classify_regimes(&result, config)? {
                    eprintln!("dim={} alpha={} lambda={} {}", row.dim, row.alpha, row.lambda, row.regime);
                }
            }
        }
        Command::Bounds { dim, alpha, lambda, k } => {
            let report = broadcast_lower_bound(dim, lambda, alpha, k)?;
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
            if dim == Dimension::Two {
                eprintln!("note: 2-D level k >= 2 requires ceil(2^alpha (k+1)^(alpha/2)) nodes; the 2^alpha factor applies at every level");
            }
        }
        Command::Continuum { dim, alpha, rho, steps, tau, r0 } => {
            let state = continuum_growth_from(dim, r0, rho, tau, alpha, steps)?;
            print!("{}", state.to_csv());
            if state.stalled {
                eprintln!("frontier stalled after {} steps", state.frontier_history.len() - 1);
            }
            if state.overflowed {
                eprintln!("frontier left the floating-point range after {} steps", state.frontier_history.len() - 1);
            }
        }
        Command::Table1 { trials, seed, ratio, floor } => {
            let config = classify_config(ratio, floor)?;
            let rows = run_table1(trials, seed, config)?;
            println!("# trials={trials} seed={seed} seed_hash={SEED_HASH}");
            println!("dim,alpha,lambda,expected,observed,status,p_hat_by_extent");
            for row in &rows {
                let status = if row.matches() {
                    "ok"
                } else if row.is_failure() {
                    "MISMATCH"
                } else {
                    "boundary-inconclusive"
                };
                let p: Vec<String> = row.cells.iter().map(|c| format!("{}:{:.4}", c.extent, c.p_hat)).collect();
                println!(
                    "{},{},{},{},{},{},{}",
                    row.dim,
                    row.alpha,
                    row.lambda,
                    row.expected,
                    row.observed,
                    status,
                    p.join(" ")
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
