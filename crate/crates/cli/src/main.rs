use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use starcov_core::experiments::{default_output_path, run_scenario, Scenario, Scheme};
use starcov_core::oracle::DEFAULT_GRID_N;
use starcov_core::selftest;
use starcov_core::{Error, Result, SystemParams};

#[derive(Parser)]
#[command(name = "starcov", version, about = "Coverage range of STAR-RIS assisted two-user links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset (fig2, fig3, fig4) or a JSON scenario file and write its CSV.
    Run {
        scenario: String,
        #[arg(long)]
        trials: Option<usize>,
        /// Seed of the first trial.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Solve a single channel realization and print the solution as JSON.
    Solve {
        #[arg(long, default_value = "star-noma")]
        scheme: Scheme,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Compare the solver against the grid-search oracle on one realization.
    Oracle {
        #[arg(long, default_value = "star-noma")]
        scheme: Scheme,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_GRID_N)]
        grid_n: usize,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Run the invariant suites; exits non-zero if any fails.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Overrides on top of the default (or scenario) parameters.
#[derive(Args, Default)]
struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    rho0_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    sigma2_dbm: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pmax_dbm: Option<f64>,
    #[arg(long)]
    alpha_ru: Option<f64>,
    #[arg(long)]
    alpha_ar: Option<f64>,
    #[arg(long)]
    k_ru: Option<f64>,
    #[arg(long)]
    k_ar: Option<f64>,
    /// Sets both Rician factors.
    #[arg(long, conflicts_with_all = ["k_ru", "k_ar"])]
    k_factor: Option<f64>,
    #[arg(long)]
    d_ap_ris: Option<f64>,
    #[arg(long)]
    m_elements: Option<usize>,
    #[arg(long)]
    gamma_t: Option<f64>,
    #[arg(long)]
    gamma_r: Option<f64>,
    /// Priority of the T user; mu_r follows unless given.
    #[arg(long)]
    mu_t: Option<f64>,
    #[arg(long)]
    mu_r: Option<f64>,
}

impl ParamArgs {
    fn apply(&self, base: SystemParams) -> Result<SystemParams> {
        let mut p = base;
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut p.rho0_db, self.rho0_db);
        set(&mut p.sigma2_dbm, self.sigma2_dbm);
        set(&mut p.pmax_dbm, self.pmax_dbm);
        set(&mut p.alpha_ru, self.alpha_ru);
        set(&mut p.alpha_ar, self.alpha_ar);
        set(&mut p.k_ru, self.k_ru.or(self.k_factor));
        set(&mut p.k_ar, self.k_ar.or(self.k_factor));
        set(&mut p.d_ap_ris, self.d_ap_ris);
        set(&mut p.gamma_t, self.gamma_t);
        set(&mut p.gamma_r, self.gamma_r);
        if let Some(m) = self.m_elements {
            p.m_elements = m;
        }
        match (self.mu_t, self.mu_r) {
            (Some(t), Some(r)) => {
                p.mu_t = t;
                p.mu_r = r;
            }
            (Some(t), None) => p = p.with_mu_t(t),
            (None, Some(r)) => p = p.with_mu_t(1.0 - r),
            (None, None) => {}
        }
        p.validate()?;
        Ok(p)
    }
}

fn load_scenario(arg: &str) -> Result<Scenario> {
    if let Some(s) = Scenario::preset(arg) {
        return Ok(s);
    }
    let text = std::fs::read_to_string(arg).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::InvalidArgument(format!(
                "{arg:?} is neither a preset (fig2, fig3, fig4) nor a readable file"
            ))
        } else {
            Error::io(arg, e)
        }
    })?;
    Scenario::from_json(&text)
}

fn print_json(value: serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(&value)?);
    Ok(())
}

fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Run { scenario, trials, seed, out, params } => {
            let mut s = load_scenario(&scenario)?;
            s.base = params.apply(s.base)?;
            if let Some(t) = trials {
                s.trials = t;
            }
            if let Some(seed) = seed {
                s.seed = seed;
            }
            let path = out
                .or_else(|| s.output_path.clone())
                .unwrap_or_else(|| default_output_path(&s.name));
            s.output_path = Some(path.clone());
            let table = run_scenario(&s)?;
            for r in &table.rows {
                eprintln!(
                    "{}={:<8} {:<9} D0 {:>10.4} +- {:<8.4} infeasible {}",
                    r.swept_name,
                    r.swept_value,
                    r.scheme,
                    r.mean_d0,
                    r.stderr_d0(),
                    r.infeasible_count
                );
            }
            println!("{}", path.display());
            Ok(true)
        }
        Command::Solve { scheme, seed, params } => {
            let p = params.apply(SystemParams::default())?;
            let gains = scheme.gains(&p, seed)?;
            print_json(serde_json::to_value(scheme.solve(&gains, &p)?)?)?;
            Ok(true)
        }
        Command::Oracle { scheme, seed, grid_n, params } => {
            let p = params.apply(SystemParams::default())?;
            let gains = scheme.gains(&p, seed)?;
            let sol = scheme.solve(&gains, &p)?;
            let oracle = scheme.oracle(&gains, &p, grid_n)?;
            let solver_d0 = if sol.feasible { sol.d0 } else { 0.0 };
            let gap = solver_d0 - oracle.d0;
            let agrees = sol.feasible == oracle.feasible && gap.abs() <= oracle.slack + 1e-9;
            print_json(serde_json::json!({
                "scheme": scheme,
                "seed": seed,
                "solver": sol,
                "oracle": oracle,
                "gap": gap,
                "within_slack": agrees,
            }))?;
            Ok(agrees)
        }
        Command::Selftest { seed } => {
            let outcomes = selftest::run_all(seed);
            for o in &outcomes {
                println!(
                    "{} {:<32} {:>6} cases {:>8.3}s{}",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.name,
                    o.cases,
                    o.elapsed_s,
                    o.detail.as_deref().map(|d| format!("  {d}")).unwrap_or_default()
                );
            }
            Ok(outcomes.iter().all(|o| o.passed))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
