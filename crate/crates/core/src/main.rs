use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use epigame::cli::{self, CrossRates, RunOptions, Scenario};
use epigame::sir::ActionProfile;
use epigame::Error;

#[derive(Debug, Parser)]
#[command(name = "epigame", version, about = "Networked SIR control game: equilibria, social optimum, PoA, PoC")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the dynamics for one profile and write the trajectory CSV
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Comma-separated profile, one value per region (default: u_min)
        #[arg(long, value_delimiter = ',')]
        u: Option<Vec<f64>>,
        /// Accept a profile that is not on the action grid
        #[arg(long)]
        off_grid: bool,
    },
    /// Enumerate grid equilibria and the social optimum; report PoA, PoC and condition margins
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Report existence/uniqueness condition margins only
    Conditions {
        #[command(flatten)]
        common: Common,
    },
    /// Vary each region's incoming cross rates and record PoA/PoC per point
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Write the resolved scenario as a scenario file
    Export {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Builtin {
    Table1,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file (JSON)
    #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
    scenario: Option<PathBuf>,
    /// Built-in scenario
    #[arg(long, value_enum)]
    builtin: Option<Builtin>,
    /// Cross rates of the built-in scenario: `nu-beta`, `zero`, or a number
    #[arg(long, default_value = "nu-beta", requires = "builtin")]
    cross_rates: String,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Integration step in days
    #[arg(long)]
    step: Option<f64>,
    /// Points per action grid
    #[arg(long)]
    grid_points: Option<usize>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Maximum number of grid profiles to enumerate
    #[arg(long, default_value_t = 1_000_000)]
    budget: u128,
}

fn parse_cross_rates(text: &str) -> Result<CrossRates, Error> {
    match text {
        "nu-beta" | "nu_beta" => Ok(CrossRates::NuBeta),
        "zero" => Ok(CrossRates::Zero),
        other => other
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite() && *v >= 0.0)
            .map(CrossRates::Uniform)
            .ok_or_else(|| Error::Invalid {
                field: "--cross-rates".into(),
                reason: format!("expected nu-beta, zero or a rate >= 0, got {other:?}"),
            }),
    }
}

impl Common {
    fn scenario(&self) -> Result<Scenario, Error> {
        let mut scenario = match (&self.scenario, self.builtin) {
            (Some(path), _) => cli::load_scenario(path)?,
            (None, Some(Builtin::Table1)) => cli::table1(parse_cross_rates(&self.cross_rates)?),
            (None, None) => unreachable!("clap requires one of --scenario / --builtin"),
        };
        if let Some(step) = self.step {
            scenario.spec = scenario.spec.with_step(step)?;
        }
        if let Some(n) = self.grid_points {
            let grid = scenario.spec.actions.with_points(n)?;
            scenario.spec = scenario.spec.with_actions(grid)?;
        }
        Ok(scenario)
    }

    fn options(&self) -> RunOptions {
        RunOptions {
            seed: self.seed,
            budget: self.budget,
        }
    }

    fn write(&self, text: &str) -> Result<(), Error> {
        match &self.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Simulate { common, u, off_grid } => {
            let scenario = common.scenario()?;
            let u = match u {
                Some(u) => ActionProfile::new(u)?,
                None => scenario.spec.actions.min_profile(),
            };
            common.write(&cli::simulate(&scenario.spec, &u, off_grid)?)
        }
        Command::Solve { common } => {
            let scenario = common.scenario()?;
            let report = cli::solve(&scenario.spec, common.options())?;
            let eq = &report.equilibrium;
            eprintln!(
                "{} equilibria, PoA = {}, PoC = {}, social optimum {}",
                eq.ne_profiles.len(),
                cli::fmt_sig(eq.poa),
                cli::fmt_sig(eq.poc),
                cli::fmt_profile(&eq.social_opt_profile)
            );
            common.write(&cli::to_json(&report))
        }
        Command::Conditions { common } => {
            let scenario = common.scenario()?;
            common.write(&cli::to_json(&cli::check_conditions(&scenario.spec, common.options())?))
        }
        Command::Sweep { common } => {
            let scenario = common.scenario()?;
            let plan = scenario
                .sweep
                .clone()
                .ok_or_else(|| Error::Invalid { field: "sweep".into(), reason: "scenario has no sweep section".into() })?;
            let rows = cli::sweep(&scenario.spec, &plan, common.options());
            for row in rows.iter().filter(|r| r.error.is_some()) {
                eprintln!(
                    "region {} rate {}: {}",
                    row.varied_region,
                    cli::fmt_sig(row.cross_rate),
                    row.error.as_deref().unwrap_or_default()
                );
            }
            if let Some(out) = &common.out {
                let meta = cli::sweep_metadata(&scenario.spec, &plan, common.options());
                std::fs::write(sidecar(out), cli::to_json(&meta))?;
            }
            common.write(&cli::sweep_csv(&rows))
        }
        Command::Export { common } => {
            let scenario = common.scenario()?;
            common.write(&cli::emit_scenario(&scenario))
        }
    }
}

fn workers(command: &Command) -> Option<usize> {
    match command {
        Command::Simulate { common, .. }
        | Command::Solve { common }
        | Command::Conditions { common }
        | Command::Sweep { common }
        | Command::Export { common } => common.workers,
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers(&args.command) {
        pool = pool.num_threads(n.max(1));
    }
    let pool = match pool.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::FAILURE;
        }
    };
    match pool.install(|| run(args.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::NoEquilibrium) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
