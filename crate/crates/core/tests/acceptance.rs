//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. A substring argument selects criteria by id.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use starcov_core::experiments::{run_scenario, ResultTable, Scenario, Scheme};
use starcov_core::oracle::{oracle_noma, oracle_oma, OracleResult};
use starcov_core::rates::{noma_rate, oma_rate};
use starcov_core::selftest;
use starcov_core::{
    effective_gain, generate_channel, Access, CoverageSolution, EffectiveGains, Surface,
    SystemParams, User,
};

const ORACLE_SEEDS: u64 = 20;
const ORACLE_GRID: usize = 256;
const ORACLE_BUDGET: Duration = Duration::from_secs(60);
const SELFTEST_BUDGET: Duration = Duration::from_secs(120);
const TRIALS: usize = 100;

const RATE_SLACK: f64 = 1e-6;
const POWER_SLACK: f64 = 1e-9;
const BETA_SUM_TOL: f64 = 1e-9;
const RANGE_SLACK: f64 = 1e-6;
const SIC_SLACK: f64 = 1e-9;
const DOMINANCE_TOL: f64 = 1e-6;
const STAR_GAIN_BAND: (f64, f64) = (1.5, 2.5);
const LINEAR_R2: f64 = 0.98;

/// Criterion outcome: pass flag and a one-line summary.
type Verdict = (bool, String);

fn defaults() -> SystemParams {
    SystemParams { gamma_t: 5.0, gamma_r: 5.0, ..SystemParams::default() }.with_mu_t(0.6)
}

fn star_gains(params: &SystemParams, seed: u64) -> EffectiveGains {
    effective_gain(&generate_channel(params, seed).unwrap())
}

fn random_params(rng: &mut ChaCha8Rng) -> SystemParams {
    SystemParams {
        pmax_dbm: rng.random_range(20.0..40.0),
        m_elements: rng.random_range(20..=200),
        gamma_t: rng.random_range(0.5..8.0),
        gamma_r: rng.random_range(0.5..8.0),
        k_ru: rng.random_range(0.5..20.0),
        ..SystemParams::default()
    }
    .with_mu_t(rng.random_range(0.05..0.95))
}

fn oracle_equivalence(access: Access) -> Verdict {
    let params = defaults();
    let start = Instant::now();
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_gap: f64 = 0.0;
    let mut coupling_cells: f64 = 0.0;
    let mut bad = Vec::new();
    for seed in 0..ORACLE_SEEDS {
        let gains = star_gains(&params, seed);
        let scheme = if access == Access::Noma { Scheme::StarNoma } else { Scheme::StarOma };
        let sol = scheme.solve(&gains, &params).unwrap();
        let oracle: OracleResult = match access {
            Access::Noma => oracle_noma(&gains, &params, ORACLE_GRID).unwrap(),
            Access::Oma => oracle_oma(&gains, &params, ORACLE_GRID).unwrap(),
        };
        let gap = (sol.d0 - oracle.d0).abs();
        worst_gap = worst_gap.max(gap);
        worst_excess = worst_excess.max(gap - oracle.slack);
        if !(sol.feasible && oracle.feasible && gap <= oracle.slack) {
            bad.push(format!("seed {seed}: solver {} oracle {} slack {}", sol.d0, oracle.d0, oracle.slack));
        }
        if access == Access::Oma {
            let cell = oracle.argmax.unwrap();
            let cells = (cell.p_t / params.pmax() - cell.beta_t).abs() * ORACLE_GRID as f64;
            coupling_cells = coupling_cells.max(cells);
            if cells > 2.0 {
                bad.push(format!("seed {seed}: oracle p_t/beta_t off by {cells:.2} cells"));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > ORACLE_BUDGET {
        bad.push(format!("took {elapsed:?}"));
    }
    let mut msg = format!(
        "{ORACLE_SEEDS} seeds, grid {ORACLE_GRID}: max |gap| {worst_gap:.4} m, max gap-slack {worst_excess:.4} m, {:.1}s",
        elapsed.as_secs_f64()
    );
    if access == Access::Oma {
        msg += &format!(", argmax power/energy split within {coupling_cells:.2} cells");
    }
    if let Some(b) = bad.first() {
        msg += &format!("; {} violations, first: {b}", bad.len());
    }
    (bad.is_empty(), msg)
}

fn ac1() -> Verdict {
    oracle_equivalence(Access::Noma)
}

fn ac2() -> Verdict {
    oracle_equivalence(Access::Oma)
}

/// Independent re-evaluation of the raw rate and range constraints.
fn violations(sol: &CoverageSolution, gains: &EffectiveGains, params: &SystemParams) -> Vec<String> {
    let a = &sol.alloc;
    let mut out = Vec::new();
    let ln2 = std::f64::consts::LN_2;
    let h = |u: User| params.rho0() * a.beta(u) * gains.get(u) / a.distance(u).powf(params.alpha_ru);
    for user in User::BOTH {
        let rate = match sol.scheme {
            Access::Noma => {
                let order = a.order.expect("NOMA solution carries an order");
                let interference = if order.weak() == user { a.power(user.other()) * h(user) } else { 0.0 };
                let r = (a.power(user) * h(user) / (interference + params.sigma2())).ln_1p() / ln2;
                let lib = noma_rate(user, a, gains, params).unwrap();
                if (r - lib).abs() > 1e-9 * r.max(1.0) {
                    out.push(format!("{user}: library NOMA rate {lib} vs {r}"));
                }
                r
            }
            Access::Oma => {
                let w = a.omega(user);
                let r = w * (a.power(user) * h(user) / (w * params.sigma2())).ln_1p() / ln2;
                let lib = oma_rate(user, a, gains, params).unwrap();
                if (r - lib).abs() > 1e-9 * r.max(1.0) {
                    out.push(format!("{user}: library OMA rate {lib} vs {r}"));
                }
                r
            }
        };
        if rate < params.gamma(user) - RATE_SLACK {
            out.push(format!("{user}: rate {rate} < {}", params.gamma(user)));
        }
        let need = (params.mu(user) * sol.d0).max(1.0);
        if a.distance(user) < need - RANGE_SLACK {
            out.push(format!("{user}: D {} < {need}", a.distance(user)));
        }
    }
    if a.p_t + a.p_r > params.pmax() * (1.0 + POWER_SLACK) {
        out.push(format!("power {} > {}", a.p_t + a.p_r, params.pmax()));
    }
    if sol.surface() == Surface::Star && (a.beta_t + a.beta_r - 1.0).abs() > BETA_SUM_TOL {
        out.push(format!("beta sum {}", a.beta_t + a.beta_r));
    }
    if sol.scheme == Access::Oma && a.omega_t + a.omega_r > 1.0 + BETA_SUM_TOL {
        out.push(format!("omega sum {}", a.omega_t + a.omega_r));
    }
    if let (Access::Noma, Some(order)) = (sol.scheme, a.order) {
        let (s, w) = (h(order.strong()), h(order.weak()));
        if s < w * (1.0 - SIC_SLACK) {
            out.push(format!("SIC order: strong gain {s} < weak gain {w}"));
        }
    }
    out
}

fn ac3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut instances: Vec<(SystemParams, u64)> = (0..ORACLE_SEEDS).map(|s| (defaults(), s)).collect();
    instances.extend((0..200).map(|s| (random_params(&mut rng), 1000 + s)));
    for preset in ["fig2", "fig3", "fig4"] {
        let sc = Scenario::preset(preset).unwrap();
        for &v in &sc.swept.values {
            let p = sc.swept.variable.apply(&sc.base, v).unwrap();
            instances.extend((0..5).map(|s| (p, s)));
        }
    }
    let (mut checked, mut infeasible) = (0, 0);
    let mut bad = Vec::new();
    for (params, seed) in &instances {
        for scheme in Scheme::ALL {
            let gains = scheme.gains(params, *seed).unwrap();
            let sol = scheme.solve(&gains, params).unwrap();
            if !sol.feasible {
                infeasible += 1;
                continue;
            }
            checked += 1;
            for v in violations(&sol, &gains, params) {
                bad.push(format!("{scheme} seed {seed}: {v}"));
            }
        }
    }
    let mut msg = format!("{checked} feasible solutions re-verified ({infeasible} infeasible skipped)");
    if let Some(b) = bad.first() {
        msg += &format!("; {} violations, first: {b}", bad.len());
    }
    (bad.is_empty() && checked > 0, msg)
}

fn ac4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = f64::INFINITY;
    let mut bad = Vec::new();
    for i in 0..100u64 {
        let params = random_params(&mut rng);
        let gains = star_gains(&params, 500 + i);
        let d = |s: Scheme| {
            let sol = s.solve(&gains, &params).unwrap();
            if sol.feasible { sol.d0 } else { 0.0 }
        };
        let (noma, oma) = (d(Scheme::StarNoma), d(Scheme::StarOma));
        worst = worst.min(noma - oma);
        if noma < oma - DOMINANCE_TOL {
            bad.push(format!("instance {i}: NOMA {noma} < OMA {oma}"));
        }
    }
    let mut msg = format!("100 random instances, min NOMA-OMA {worst:.6} m");
    if let Some(b) = bad.first() {
        msg += &format!("; first violation: {b}");
    }
    (bad.is_empty(), msg)
}

fn sweep(preset: &str, values: &[f64]) -> ResultTable {
    let mut sc = Scenario::preset(preset).unwrap();
    sc.swept.values = values.to_vec();
    sc.trials = TRIALS;
    run_scenario(&sc).unwrap()
}

fn mean_d0(t: &ResultTable, v: f64, s: Scheme) -> f64 {
    let r = t.row(v, s).unwrap();
    assert_eq!(r.infeasible_count, 0, "{r:?}");
    r.mean_d0
}

fn ac5() -> Verdict {
    let t = sweep("fig2", &[0.6]);
    let ratio = |star, cr| mean_d0(&t, 0.6, star) / mean_d0(&t, 0.6, cr);
    let noma = ratio(Scheme::StarNoma, Scheme::CrNoma);
    let oma = ratio(Scheme::StarOma, Scheme::CrOma);
    let inside = |r: f64| (STAR_GAIN_BAND.0..=STAR_GAIN_BAND.1).contains(&r);
    (
        inside(noma) && inside(oma),
        format!(
            "STAR/CR mean D0 ratio: NOMA {noma:.4}, OMA {oma:.4} (band [{}, {}])",
            STAR_GAIN_BAND.0, STAR_GAIN_BAND.1
        ),
    )
}

fn ac6() -> Verdict {
    let t = sweep("fig3", &[5.0]);
    let gap = |n, o| mean_d0(&t, 5.0, n) - mean_d0(&t, 5.0, o);
    let star = gap(Scheme::StarNoma, Scheme::StarOma);
    let cr = gap(Scheme::CrNoma, Scheme::CrOma);
    (star > cr, format!("NOMA-OMA gap at gamma_t=5: STAR {star:.4} m, CR {cr:.4} m"))
}

fn r_squared(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy * sxy / (sxx * syy)
}

fn ac7() -> Verdict {
    let t = sweep("fig4", &[60.0, 80.0, 100.0, 120.0, 140.0]);
    let mut ok = true;
    let mut parts = Vec::new();
    for s in Scheme::ALL {
        let rows = t.series(s);
        let x: Vec<f64> = rows.iter().map(|r| r.swept_value).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.mean_dt).collect();
        let r2 = r_squared(&x, &y);
        ok &= r2 >= LINEAR_R2 && rows.iter().all(|r| r.infeasible_count == 0);
        parts.push(format!("{s} {r2:.5}"));
    }
    (ok, format!("R^2 of mean D_t on M: {} (min {LINEAR_R2})", parts.join(", ")))
}

fn ac8() -> Verdict {
    let t = sweep("fig2", &[0.5, 0.9]);
    let gap = |v| mean_d0(&t, v, Scheme::StarNoma) - mean_d0(&t, v, Scheme::StarOma);
    let (homo, hetero) = (gap(0.5), gap(0.9));
    (
        homo < hetero,
        format!("STAR NOMA-OMA gap: mu_t=0.5 {homo:.4} m, mu_t=0.9 {hetero:.4} m"),
    )
}

fn ac9() -> Verdict {
    let start = Instant::now();
    let outcomes = selftest::run_all(0);
    let elapsed = start.elapsed();
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| format!("{}: {}", o.name, o.detail.as_deref().unwrap_or("")))
        .collect();
    let mut msg = format!("{} suites, {:.2}s", outcomes.len(), elapsed.as_secs_f64());
    if !failed.is_empty() {
        msg += &format!("; failed: {}", failed.join("; "));
    }
    (failed.is_empty() && elapsed <= SELFTEST_BUDGET, msg)
}

type Criterion = (&'static str, &'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("AC1", "oracle equivalence (NOMA)", ac1),
        ("AC2", "oracle equivalence (OMA) + power/energy coupling", ac2),
        ("AC3", "feasibility re-verification", ac3),
        ("AC4", "NOMA covers at least OMA", ac4),
        ("AC5", "STAR gain over conventional RIS", ac5),
        ("AC6", "NOMA gain larger on STAR than CR", ac6),
        ("AC7", "near-linear M scaling", ac7),
        ("AC8", "homogeneous priority shrinks NOMA gain", ac8),
        ("AC9", "invariant suites", ac9),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, title, run) in criteria {
        if !filters.is_empty() && !filters.iter().any(|f| id.contains(f.as_str())) {
            continue;
        }
        let (ok, msg) = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| {
                let why = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {why}"))
            });
        println!("{} {id} {title}: {msg}", if ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
