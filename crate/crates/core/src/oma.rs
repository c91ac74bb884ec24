//! Coverage maximization under OMA.
//!
//! On a STAR surface the optimal powers are locked to the energy split,
//! `p_k = P_max beta_k`, so for a fixed resource split user `k` can be served
//! out to
//!
//! ```text
//! D_k^alpha = beta_k^2 P_max rho0 c_k / (omega_k (2^(gamma_k/omega_k) - 1) sigma^2)
//! ```
//!
//! Each reach grows with the user's own share, so for fixed `omega_t` the
//! best split equalizes `D_t/mu_t` and `D_r/mu_r`, unless the 1 m floor of
//! one user binds first. The outer problem over `omega_t` is a coarse grid
//! followed by golden-section refinement.
//!
//! Conventional surfaces pass full energy on each side, so the free share is
//! the power fraction instead and the reach is linear (not quadratic) in it.

use crate::channel::{EffectiveGains, User};
use crate::error::{Error, Result};
use crate::noma::{floor_range, BETA_EPS};
use crate::rates::{Allocation, Surface};
use crate::search::golden_section_max;
use crate::solution::{Access, CoverageSolution};
use crate::units::SystemParams;

/// Resource fractions below this cannot carry a positive rate target.
pub const OMEGA_FLOOR: f64 = 1e-6;
/// Number of cells of the coarse `omega_t` grid.
pub const OMEGA_GRID: usize = 512;
/// Golden-section tolerance on `omega_t`.
pub const OMEGA_TOL: f64 = 1e-6;

/// `ln(omega (2^(gamma/omega) - 1))`, stable for large `gamma/omega`.
fn ln_rate_cost(gamma: f64, omega: f64) -> f64 {
    let x = gamma / omega * std::f64::consts::LN_2;
    let ln_excess = if x > 30.0 {
        x + (-(-x).exp()).ln_1p()
    } else {
        x.exp_m1().ln()
    };
    omega.ln() + ln_excess
}

/// `ln(D_k^alpha)` at unit share: `ln(P_max rho0 c_k / sigma^2) - ln cost`.
fn ln_reach_scale(user: User, omega: f64, gains: &EffectiveGains, params: &SystemParams) -> f64 {
    (params.pmax() * params.snr_scale() * gains.get(user)).ln()
        - ln_rate_cost(params.gamma(user), omega)
}

/// Exponent of the share in `D_k^alpha`: `beta^2` on STAR (power locked to
/// beta), power fraction to the first power on conventional surfaces.
fn share_exponent(surface: Surface) -> f64 {
    match surface {
        Surface::Star => 2.0,
        Surface::Conventional => 1.0,
    }
}

/// Largest distance at which user `k` meets its rate target on a STAR
/// surface with split `beta_k`, resource fraction `omega_k` and `p_k = P_max beta_k`.
///
/// Returns 0 when `omega_k` is below [`OMEGA_FLOOR`].
pub fn oma_reach(
    beta_k: f64,
    omega_k: f64,
    user: User,
    gains: &EffectiveGains,
    params: &SystemParams,
) -> Result<f64> {
    if !(beta_k > 0.0 && beta_k <= 1.0) {
        return Err(Error::InvalidArgument(format!("beta must lie in (0, 1], got {beta_k}")));
    }
    if !(0.0..=1.0).contains(&omega_k) {
        return Err(Error::InvalidArgument(format!("omega must lie in [0, 1], got {omega_k}")));
    }
    gains.check_user(user)?;
    if omega_k < OMEGA_FLOOR {
        return Ok(0.0);
    }
    let ln = 2.0 * beta_k.ln() + ln_reach_scale(user, omega_k, gains, params);
    Ok((ln / params.alpha_ru).exp())
}

/// Optimal share for one fixed resource split.
#[derive(Debug, Clone, Copy)]
struct FixedSplit {
    d0: f64,
    /// `beta_t` (STAR) or `p_t / P_max` (conventional).
    share_t: f64,
    feasible: bool,
}

fn best_share(
    surface: Surface,
    omega_t: f64,
    gains: &EffectiveGains,
    params: &SystemParams,
) -> FixedSplit {
    let omega_r = 1.0 - omega_t;
    let n = share_exponent(surface);
    let alpha = params.alpha_ru;
    let infeasible = FixedSplit { d0: f64::NEG_INFINITY, share_t: 0.5, feasible: false };
    if omega_t < OMEGA_FLOOR || omega_r < OMEGA_FLOOR {
        return infeasible;
    }
    let ln_g_t = ln_reach_scale(User::T, omega_t, gains, params);
    let ln_g_r = ln_reach_scale(User::R, omega_r, gains, params);

    // shares putting each user exactly at the 1 m floor
    let lo = (-ln_g_t / n).exp().max(BETA_EPS);
    let hi = (1.0 - (-ln_g_r / n).exp()).min(1.0 - BETA_EPS);

    let (mu_t, mu_r) = (params.mu_t, params.mu_r);
    let target = if mu_t == 0.0 {
        lo
    } else if mu_r == 0.0 {
        hi
    } else {
        let ln_ratio = (ln_g_r - ln_g_t + alpha * (mu_t.ln() - mu_r.ln())) / n;
        1.0 / (1.0 + (-ln_ratio).exp())
    };
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return FixedSplit { share_t: target.clamp(BETA_EPS, 1.0 - BETA_EPS), ..infeasible };
    }
    let x = target.clamp(lo, hi);
    let reach_t = ((n * x.ln() + ln_g_t) / alpha).exp();
    let reach_r = ((n * (1.0 - x).ln() + ln_g_r) / alpha).exp();
    let mut d0 = f64::INFINITY;
    if mu_t > 0.0 {
        d0 = d0.min(reach_t / mu_t);
    }
    if mu_r > 0.0 {
        d0 = d0.min(reach_r / mu_r);
    }
    FixedSplit { d0, share_t: x, feasible: true }
}

fn allocation(
    surface: Surface,
    omega_t: f64,
    split: &FixedSplit,
    d0: f64,
    params: &SystemParams,
) -> Allocation {
    let x = split.share_t;
    let pmax = params.pmax();
    let (beta_t, beta_r) = match surface {
        Surface::Star => (x, 1.0 - x),
        Surface::Conventional => (1.0, 1.0),
    };
    Allocation {
        p_t: pmax * x,
        p_r: pmax * (1.0 - x),
        beta_t,
        beta_r,
        omega_t,
        omega_r: 1.0 - omega_t,
        d_t: params.required_distance(User::T, d0),
        d_r: params.required_distance(User::R, d0),
        order: None,
        surface,
    }
}

fn build(
    surface: Surface,
    omega_t: f64,
    split: FixedSplit,
    gains: &EffectiveGains,
    params: &SystemParams,
) -> CoverageSolution {
    let d0 = if split.feasible { split.d0 } else { floor_range(params) };
    let alloc = allocation(surface, omega_t, &split, d0, params);
    CoverageSolution::assemble(Access::Oma, d0, alloc, split.feasible, gains, params)
}

fn check_inputs(gains: &EffectiveGains, params: &SystemParams) -> Result<bool> {
    params.validate()?;
    Ok(gains.check_user(User::T).is_ok() && gains.check_user(User::R).is_ok())
}

/// Best STAR-surface OMA coverage with `omega_t` fixed and `omega_r = 1 - omega_t`.
pub fn solve_oma_fixed_omega(
    omega_t: f64,
    gains: &EffectiveGains,
    params: &SystemParams,
) -> Result<CoverageSolution> {
    solve_fixed_on(Surface::Star, omega_t, gains, params)
}

pub(crate) fn solve_fixed_on(
    surface: Surface,
    omega_t: f64,
    gains: &EffectiveGains,
    params: &SystemParams,
) -> Result<CoverageSolution> {
    if !(omega_t > 0.0 && omega_t < 1.0) {
        return Err(Error::InvalidArgument(format!("omega_t must lie in (0, 1), got {omega_t}")));
    }
    if !check_inputs(gains, params)? {
        return Ok(build(surface, omega_t, FixedSplit { d0: 0.0, share_t: 0.5, feasible: false }, gains, params));
    }
    Ok(build(surface, omega_t, best_share(surface, omega_t, gains, params), gains, params))
}

/// Solves the OMA coverage problem on a STAR surface.
pub fn solve_oma(gains: &EffectiveGains, params: &SystemParams) -> Result<CoverageSolution> {
    solve_oma_on(Surface::Star, gains, params)
}

pub(crate) fn solve_oma_on(
    surface: Surface,
    gains: &EffectiveGains,
    params: &SystemParams,
) -> Result<CoverageSolution> {
    if !check_inputs(gains, params)? {
        return Ok(build(surface, 0.5, FixedSplit { d0: 0.0, share_t: 0.5, feasible: false }, gains, params));
    }
    let value = |w: f64| best_share(surface, w, gains, params).d0;

    let step = 1.0 / OMEGA_GRID as f64;
    let mut best: Option<(f64, f64)> = None;
    for k in 1..OMEGA_GRID {
        let w = k as f64 * step;
        let v = value(w);
        if v.is_finite() && best.is_none_or(|(_, bv)| v > bv) {
            best = Some((w, v));
        }
    }
    let Some((w_grid, v_grid)) = best else {
        return Ok(build(surface, 0.5, best_share(surface, 0.5, gains, params), gains, params));
    };

    let a = (w_grid - step).max(OMEGA_FLOOR);
    let b = (w_grid + step).min(1.0 - OMEGA_FLOOR);
    let (w_ref, v_ref) = golden_section_max(a, b, OMEGA_TOL, value);
    let omega_t = if v_ref > v_grid { w_ref } else { w_grid };
    Ok(build(surface, omega_t, best_share(surface, omega_t, gains, params), gains, params))
}
