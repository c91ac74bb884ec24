//! Invariant suites run by `starcov selftest`.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::baseline::{conventional_gains, solve_conventional};
use crate::channel::{coherent_gain, effective_gain, generate_channel, EffectiveGains};
use crate::error::Result;
use crate::noma::{is_feasible, solve_noma};
use crate::oma::solve_oma;
use crate::solution::{Access, CoverageSolution};
use crate::units::SystemParams;

pub const CONVEXITY_SAMPLES: usize = 10_000;
pub const PHASE_GRID: usize = 720;
/// Relative slack allowed on monotone comparisons of solver output.
const MONO_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    /// First violation or error, if any.
    pub detail: Option<String>,
    pub elapsed_s: f64,
}

/// Cases examined and the first violation found.
type Tally = (usize, Option<String>);

fn record(name: &'static str, f: impl FnOnce() -> Result<Tally>) -> CheckOutcome {
    let start = Instant::now();
    let (cases, detail) = match f() {
        Ok(t) => t,
        Err(e) => (0, Some(format!("error: {e}"))),
    };
    CheckOutcome {
        name,
        passed: detail.is_none(),
        cases,
        detail,
        elapsed_s: start.elapsed().as_secs_f64(),
    }
}

/// Runs every suite; `seed` drives all random sampling.
pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    vec![
        record("midpoint_convexity", || Ok(midpoint_convexity(seed))),
        record("phase_grid_gain_oracle", || Ok(phase_grid_oracle(seed))),
        record("monotone_coverage", || monotone_coverage(seed)),
        record("bisection_monotone_feasibility", || bisection_probe(seed)),
        record("noma_dominates_oma", || noma_dominates_oma(seed)),
    ]
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(100 + stream);
    r
}

fn log_uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (r.random_range(lo.ln()..hi.ln())).exp()
}

/// `y^a / x` is jointly convex on the positive quadrant for `a >= 2`:
/// checks the midpoint inequality on random pairs.
pub fn midpoint_convexity(seed: u64) -> Tally {
    let mut r = rng(seed, 0);
    let f = |x: f64, y: f64, a: f64| y.powf(a) / x;
    for i in 0..CONVEXITY_SAMPLES {
        let a = r.random_range(2.0..=4.0);
        let (x1, x2) = (log_uniform(&mut r, 1e-2, 1e2), log_uniform(&mut r, 1e-2, 1e2));
        let (y1, y2) = (log_uniform(&mut r, 1e-2, 1e2), log_uniform(&mut r, 1e-2, 1e2));
        let mid = f((x1 + x2) / 2.0, (y1 + y2) / 2.0, a);
        let chord = (f(x1, y1, a) + f(x2, y2, a)) / 2.0;
        if mid > chord * (1.0 + 1e-12) {
            return (
                i + 1,
                Some(format!("a={a} ({x1},{y1}) ({x2},{y2}): {mid} > {chord}")),
            );
        }
    }
    (CONVEXITY_SAMPLES, None)
}

/// Largest `|sum_m q_m e^{j theta_m}|^2` over a uniform phase grid, with
/// the first phase fixed (a common rotation does not change the modulus).
pub fn phase_grid_max(q: &[(f64, f64)]) -> f64 {
    let phases: Vec<(f64, f64)> = (0..PHASE_GRID)
        .map(|i| (2.0 * PI * i as f64 / PHASE_GRID as f64).sin_cos())
        .map(|(s, c)| (c, s))
        .collect();
    let rot = |(a, b): (f64, f64), (c, s): (f64, f64)| (a * c - b * s, a * s + b * c);
    fn go(
        rest: &[(f64, f64)],
        acc: (f64, f64),
        phases: &[(f64, f64)],
        rot: &dyn Fn((f64, f64), (f64, f64)) -> (f64, f64),
    ) -> f64 {
        match rest.split_first() {
            None => acc.0 * acc.0 + acc.1 * acc.1,
            Some((&q, tail)) => phases
                .iter()
                .map(|&p| {
                    let (re, im) = rot(q, p);
                    go(tail, (acc.0 + re, acc.1 + im), phases, rot)
                })
                .fold(0.0, f64::max),
        }
    }
    match q.split_first() {
        None => 0.0,
        Some((&first, tail)) => go(tail, first, &phases, &rot),
    }
}

/// Coherent gain against a brute-force phase search for `M <= 3`.
pub fn phase_grid_oracle(seed: u64) -> Tally {
    let mut r = rng(seed, 1);
    // Each element is misaligned by at most half a grid step.
    let lower = (PI / PHASE_GRID as f64).cos().powi(2);
    let mut cases = 0;
    for m in 1..=3 {
        for _ in 0..3 {
            let q: Vec<(f64, f64)> = (0..m)
                .map(|_| (r.sample(StandardNormal), r.sample(StandardNormal)))
                .collect();
            let mags: Vec<f64> = q.iter().map(|&(a, b): &(f64, f64)| a.hypot(b)).collect();
            let c = coherent_gain(&mags);
            let grid = phase_grid_max(&q);
            cases += 1;
            if grid > c * (1.0 + 1e-12) || grid < c * lower * (1.0 - 1e-12) {
                return (cases, Some(format!("M={m}: grid {grid} vs coherent {c}")));
            }
        }
    }
    (cases, None)
}

fn random_params(r: &mut ChaCha8Rng) -> SystemParams {
    SystemParams {
        gamma_t: r.random_range(1.0..6.0),
        gamma_r: r.random_range(1.0..6.0),
        ..SystemParams::default()
    }
    .with_mu_t(r.random_range(0.2..0.8))
}

fn solve(access: Access, star: bool, params: &SystemParams, seed: u64) -> Result<f64> {
    let sol: CoverageSolution = if star {
        let g = effective_gain(&generate_channel(params, seed)?);
        match access {
            Access::Noma => solve_noma(&g, params)?,
            Access::Oma => solve_oma(&g, params)?,
        }
    } else {
        solve_conventional(access, &conventional_gains(params, seed)?, params)?
    };
    Ok(if sol.feasible { sol.d0 } else { 0.0 })
}

/// `D0` rises with `P_max` and `M` and falls with either rate target.
pub fn monotone_coverage(seed: u64) -> Result<Tally> {
    let mut r = rng(seed, 2);
    let mut cases = 0;
    for trial in 0..6 {
        let base = random_params(&mut r);
        let chan_seed = seed.wrapping_add(trial);
        let variants: [(&str, SystemParams, bool); 4] = [
            ("pmax +3 dB", SystemParams { pmax_dbm: base.pmax_dbm + 3.0, ..base }, true),
            ("M +20", SystemParams { m_elements: base.m_elements + 20, ..base }, true),
            ("gamma_t +1", SystemParams { gamma_t: base.gamma_t + 1.0, ..base }, false),
            ("gamma_r +1", SystemParams { gamma_r: base.gamma_r + 1.0, ..base }, false),
        ];
        for access in [Access::Noma, Access::Oma] {
            for star in [true, false] {
                let d = solve(access, star, &base, chan_seed)?;
                for (label, p, up) in &variants {
                    let d2 = solve(access, star, p, chan_seed)?;
                    cases += 1;
                    let slack = MONO_TOL * d.max(d2).max(1.0);
                    let ok = if *up { d2 >= d - slack } else { d2 <= d + slack };
                    if !ok {
                        let surf = if star { "STAR" } else { "CR" };
                        return Ok((
                            cases,
                            Some(format!("{surf}-{access} seed {chan_seed} {label}: {d} -> {d2}")),
                        ));
                    }
                }
            }
        }
    }
    Ok((cases, None))
}

/// Feasibility of a target range is downward closed, and the solver's `D0`
/// sits on the boundary.
pub fn bisection_probe(seed: u64) -> Result<Tally> {
    let mut r = rng(seed, 3);
    let mut cases = 0;
    for trial in 0..8 {
        let params = random_params(&mut r);
        let gains: EffectiveGains = effective_gain(&generate_channel(&params, seed.wrapping_add(trial))?);
        let sol = solve_noma(&gains, &params)?;
        if !sol.feasible {
            continue;
        }
        let mut probes: Vec<f64> = (0..64).map(|_| r.random_range(0.02..2.0) * sol.d0).collect();
        probes.sort_by(f64::total_cmp);
        let mut seen_infeasible = false;
        for d in probes {
            let ok = is_feasible(d, &gains, &params)?;
            cases += 1;
            let fail = if ok && seen_infeasible {
                Some("feasible above an infeasible range")
            } else if ok && d > sol.d0 * (1.0 + 1e-6) {
                Some("feasible beyond the solver optimum")
            } else if !ok && d < sol.d0 * (1.0 - 1e-6) {
                Some("infeasible below the solver optimum")
            } else {
                None
            };
            if let Some(why) = fail {
                return Ok((cases, Some(format!("{why}: D={d}, D0*={}", sol.d0))));
            }
            seen_infeasible |= !ok;
        }
    }
    Ok((cases, None))
}

/// Superposition coding never covers less than orthogonal access.
pub fn noma_dominates_oma(seed: u64) -> Result<Tally> {
    let mut r = rng(seed, 4);
    let mut cases = 0;
    for trial in 0..20 {
        let params = random_params(&mut r);
        let s = seed.wrapping_add(trial);
        for star in [true, false] {
            let noma = solve(Access::Noma, star, &params, s)?;
            let oma = solve(Access::Oma, star, &params, s)?;
            cases += 1;
            if noma < oma - 1e-6 {
                return Ok((cases, Some(format!("seed {s}: NOMA {noma} < OMA {oma}"))));
            }
        }
    }
    Ok((cases, None))
}
