use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use fpe_sim::runner::{self, RunReport};
use fpe_sim::{acceptance, config_dir, list_scenarios, resolve, CliError, Scenario};

#[derive(Parser)]
#[command(name = "fpe-sim", version, about = "Similarity solutions of the Fokker-Planck equation: scenarios and cross-checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run built-in scenarios, config files, or user configs by name.
    Run {
        #[arg(required = true)]
        targets: Vec<String>,
        /// Output directory; overrides `out_dir` in the config.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Monte Carlo seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Finite-volume grid size.
        #[arg(long)]
        cells: Option<usize>,
        /// Monte Carlo path count.
        #[arg(long)]
        paths: Option<usize>,
        /// Run up to N scenarios concurrently, each in its own subdirectory.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        jobs: u32,
    },
    /// List built-in and user scenarios.
    List,
    /// Run the acceptance suite.
    Verify,
}

fn print_report(r: &RunReport) {
    println!("{}: {}", r.scenario.name, r.scenario.description);
    println!("  {:>8} {:>9} {:>12} {:>12} {:>12} {:>12}", "t", "engine", "mass", "peak_x", "peak", "L1/analytic");
    for row in &r.rows {
        let l1 = row.l1_vs_analytic.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "-".into());
        println!(
            "  {:>8} {:>9} {:>12.9} {:>12.6} {:>12.6} {:>12}",
            row.t,
            row.engine.name(),
            row.mass,
            row.peak_x,
            row.peak_value,
            l1
        );
    }
    if let Some(c) = &r.convergence {
        for (n, e) in &c.levels {
            println!("  cells {n:>5}: L1 {e:.3e}");
        }
        println!("  fitted order {:.3}", c.order);
    }
}

fn run(
    targets: &[String],
    out_dir: Option<PathBuf>,
    seed: Option<u64>,
    cells: Option<usize>,
    paths: Option<usize>,
    jobs: u32,
) -> ExitCode {
    let dir = config_dir();
    let mut scenarios: Vec<Scenario> = Vec::new();
    for t in targets {
        match resolve(t, dir.as_deref()).and_then(|mut s| s.apply_overrides(seed, cells, paths).map(|_| s)) {
            Ok(s) => scenarios.push(s),
            Err(e) => {
                eprintln!("{}", e.reason_line(t));
                return ExitCode::from(e.exit_code() as u8);
            }
        }
    }
    let several = scenarios.len() > 1;
    if several {
        let mut names: Vec<&str> = scenarios.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            let e = CliError::Config("the same scenario name appears twice; outputs would collide".into());
            eprintln!("{}", e.reason_line(names[0]));
            return ExitCode::from(e.exit_code() as u8);
        }
    }
    let target_dir = |s: &Scenario| {
        let base = out_dir.clone().unwrap_or_else(|| s.out_dir.clone());
        if several {
            base.join(&s.name)
        } else {
            base
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs as usize).build() {
        Ok(p) => p,
        Err(e) => {
            let e = CliError::Engine(format!("cannot start worker pool: {e}"));
            eprintln!("{}", e.reason_line("-"));
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    // the engines parallelize internally; --jobs only adds scenario-level concurrency
    let results: Vec<Result<RunReport, CliError>> = if jobs > 1 {
        pool.install(|| scenarios.par_iter().map(|s| runner::run(s, &target_dir(s))).collect())
    } else {
        scenarios.iter().map(|s| runner::run(s, &target_dir(s))).collect()
    };

    let mut code = 0;
    for (s, res) in scenarios.iter().zip(results) {
        match res {
            Ok(r) => {
                print_report(&r);
                println!("  wrote {}", target_dir(s).display());
            }
            Err(e) => {
                eprintln!("{}", e.reason_line(&s.name));
                // the most severe class wins: engine > config > tolerance
                code = code.max(e.exit_code());
            }
        }
    }
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { targets, out_dir, seed, cells, paths, jobs } => run(&targets, out_dir, seed, cells, paths, jobs),
        Command::List => {
            let listing = list_scenarios(config_dir().as_deref());
            for w in &listing.warnings {
                eprintln!("fpe-sim: warning: {w}");
            }
            for (name, desc) in &listing.entries {
                println!("{name:<16} {desc}");
            }
            ExitCode::SUCCESS
        }
        Command::Verify => {
            let mut failed = false;
            for id in 1..=8 {
                let r = acceptance::run_criterion(id).expect("ids 1..=8 exist");
                println!("{r}");
                failed |= !r.passed;
            }
            if failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
