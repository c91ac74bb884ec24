//! Coverage maximization under NOMA.
//!
//! For a fixed total range `D0` the users sit at `D_k = max(mu_k D0, 1)`.
//! With both QoS constraints active, a decoding order with strong user `s`
//! and weak user `w` needs
//!
//! ```text
//! p_s = (2^g_s - 1) n_s / beta_s
//! p_w = (2^g_w - 1) (n_w / beta_w + p_s)
//! ```
//!
//! where `n_k = sigma^2 D_k^alpha / (rho0 c_k)`. The total power is
//! `X_w / beta_w + X_s / beta_s` with `X_w = (2^g_w - 1) n_w` and
//! `X_s = 2^g_w (2^g_s - 1) n_s`, which is minimized in closed form over the
//! energy split. The SIC ordering constraint becomes the linear bound
//! `beta_s <= kappa beta_w` (see [`sic_beta_bound`]). Minimum power is
//! nondecreasing in `D0`, so the largest feasible `D0` is found by bisection.

use crate::channel::{EffectiveGains, User};
use crate::error::{Error, Result};
use crate::rates::{Allocation, DecodingOrder, Surface, GAIN_TIE_TOL};
use crate::search::{max_feasible, MaxFeasible};
use crate::solution::{Access, CoverageSolution};
use crate::units::SystemParams;

/// Smallest energy coefficient a served user may receive.
pub const BETA_EPS: f64 = 1e-9;
/// Bisection tolerance on `D0`, meters.
pub const D0_TOL: f64 = 1e-9;
/// Upper limit of the `D0` bracket, meters.
pub const D0_CAP: f64 = (1u64 << 20) as f64;

/// `2^x - 1` without cancellation for small `x`.
pub(crate) fn pow2_m1(x: f64) -> f64 {
    (x * std::f64::consts::LN_2).exp_m1()
}

/// Linear energy-split bound that replaces the SIC ordering constraint.
///
/// For `RStrong` the constraint is `beta_r <= kappa * beta_t` with
/// `kappa = 2^gt (2^gr - 1) / (2^gt - 1)`; for `TStrong` it is
/// `beta_t <= kappa' * beta_r` with the roles swapped.
pub fn sic_beta_bound(gamma_t: f64, gamma_r: f64, order: DecodingOrder) -> Result<f64> {
    if !(gamma_t > 0.0 && gamma_r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "rate targets must be positive (gamma_t = {gamma_t}, gamma_r = {gamma_r})"
        )));
    }
    let (g_strong, g_weak) = match order {
        DecodingOrder::RStrong => (gamma_r, gamma_t),
        DecodingOrder::TStrong => (gamma_t, gamma_r),
    };
    Ok(g_weak.exp2() * pow2_m1(g_strong) / pow2_m1(g_weak))
}

/// Minimum total power for one decoding order at a given range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinPower {
    /// `p_t + p_r`, watts; infinite when the order admits no energy split.
    pub power: f64,
    pub beta_t: f64,
    pub p_t: f64,
    pub p_r: f64,
    pub d_t: f64,
    pub d_r: f64,
    /// Whether the split was pushed onto a boundary of its feasible interval.
    pub clamped: bool,
}

impl MinPower {
    pub fn beta_r(&self) -> f64 {
        1.0 - self.beta_t
    }
}

/// Noise-normalized inverse gains `n_k` and distances at range `d0`.
struct Burden {
    n_t: f64,
    n_r: f64,
    d_t: f64,
    d_r: f64,
}

impl Burden {
    fn at(d0: f64, gains: &EffectiveGains, params: &SystemParams) -> Self {
        let d_t = params.required_distance(User::T, d0);
        let d_r = params.required_distance(User::R, d0);
        let scale = params.sigma2() / params.rho0();
        Burden {
            n_t: scale * d_t.powf(params.alpha_ru) / gains.c_t,
            n_r: scale * d_r.powf(params.alpha_ru) / gains.c_r,
            d_t,
            d_r,
        }
    }

    fn n(&self, user: User) -> f64 {
        match user {
            User::T => self.n_t,
            User::R => self.n_r,
        }
    }
}

/// Power coefficients `(X_w, X_s)` of `1/beta_w` and `1/beta_s`.
fn coefficients(order: DecodingOrder, burden: &Burden, params: &SystemParams) -> (f64, f64) {
    let (s, w) = (order.strong(), order.weak());
    let e_s = pow2_m1(params.gamma(s));
    let e_w = pow2_m1(params.gamma(w));
    let x_w = e_w * burden.n(w);
    let x_s = params.gamma(w).exp2() * e_s * burden.n(s);
    (x_w, x_s)
}

/// Powers meeting both QoS targets with equality for the given split.
fn qos_powers(
    order: DecodingOrder,
    beta_t: f64,
    beta_r: f64,
    burden: &Burden,
    params: &SystemParams,
) -> (f64, f64) {
    let (s, w) = (order.strong(), order.weak());
    let beta = |u: User| if u == User::T { beta_t } else { beta_r };
    let p_s = pow2_m1(params.gamma(s)) * burden.n(s) / beta(s);
    let p_w = pow2_m1(params.gamma(w)) * (burden.n(w) / beta(w) + p_s);
    match s {
        User::T => (p_s, p_w),
        User::R => (p_w, p_s),
    }
}

fn check_range(d0: f64) -> Result<()> {
    if d0.is_finite() && d0 > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("D0 must be positive, got {d0}")))
    }
}

/// Minimum total power serving both users at range `d0` on a STAR surface
/// with decoding order `order`, and the split achieving it.
///
/// The unconstrained minimizer of `X_w/beta_w + X_s/(1 - beta_w)` is
/// `beta_w = 1 / (1 + sqrt(X_s/X_w))`; it is clamped to the interval allowed
/// by [`sic_beta_bound`] and by [`BETA_EPS`].
pub fn min_power_at(
    d0: f64,
    order: DecodingOrder,
    gains: &EffectiveGains,
    params: &SystemParams,
) -> Result<MinPower> {
    check_range(d0)?;
    gains.check_user(User::T)?;
    gains.check_user(User::R)?;
    Ok(star_min_power(d0, order, gains, params))
}

fn star_min_power(
    d0: f64,
    order: DecodingOrder,
    gains: &EffectiveGains,
    params: &SystemParams,
) -> MinPower {
    let burden = Burden::at(d0, gains, params);
    let (x_w, x_s) = coefficients(order, &burden, params);
    let kappa = g_bound(params, order);

    let lo = (1.0 / (1.0 + kappa)).max(BETA_EPS);
    let hi = 1.0 - BETA_EPS;
    let unconstrained = 1.0 / (1.0 + (x_s / x_w).sqrt());
    let (beta_w, clamped, power) = if lo > hi {
        (unconstrained, true, f64::INFINITY)
    } else {
        let b = unconstrained.clamp(lo, hi);
        (b, b != unconstrained, x_w / b + x_s / (1.0 - b))
    };
    let beta_t = match order.weak() {
        User::T => beta_w,
        User::R => 1.0 - beta_w,
    };
    let (p_t, p_r) = qos_powers(order, beta_t, 1.0 - beta_t, &burden, params);
    MinPower {
        power,
        beta_t,
        p_t,
        p_r,
        d_t: burden.d_t,
        d_r: burden.d_r,
        clamped,
    }
}

fn g_bound(params: &SystemParams, order: DecodingOrder) -> f64 {
    // params are validated on every public path, so the targets are positive
    sic_beta_bound(params.gamma_t, params.gamma_r, order).unwrap_or(f64::INFINITY)
}

/// Conventional surfaces: both energy coefficients pinned to 1. The order is
/// admissible only if the raw gain ordering agrees with it.
fn pinned_min_power(
    d0: f64,
    order: DecodingOrder,
    gains: &EffectiveGains,
    params: &SystemParams,
) -> MinPower {
    let burden = Burden::at(d0, gains, params);
    let (x_w, x_s) = coefficients(order, &burden, params);
    let (p_t, p_r) = qos_powers(order, 1.0, 1.0, &burden, params);
    // |h_k|^2 is proportional to 1 / n_k with unit betas
    let (hs, hw) = (1.0 / burden.n(order.strong()), 1.0 / burden.n(order.weak()));
    let admissible = hs >= hw || (hw - hs) <= GAIN_TIE_TOL * hw;
    MinPower {
        power: if admissible { x_w + x_s } else { f64::INFINITY },
        beta_t: 1.0,
        p_t,
        p_r,
        d_t: burden.d_t,
        d_r: burden.d_r,
        clamped: false,
    }
}

fn min_power_for(
    surface: Surface,
    d0: f64,
    order: DecodingOrder,
    gains: &EffectiveGains,
    params: &SystemParams,
) -> MinPower {
    match surface {
        Surface::Star => star_min_power(d0, order, gains, params),
        Surface::Conventional => pinned_min_power(d0, order, gains, params),
    }
}

/// Cheapest admissible order at `d0`; ties go to `RStrong`.
fn best_order(
    surface: Surface,
    d0: f64,
    gains: &EffectiveGains,
    params: &SystemParams,
) -> (DecodingOrder, MinPower) {
    let r = min_power_for(surface, d0, DecodingOrder::RStrong, gains, params);
    let t = min_power_for(surface, d0, DecodingOrder::TStrong, gains, params);
    if t.power < r.power {
        (DecodingOrder::TStrong, t)
    } else {
        (DecodingOrder::RStrong, r)
    }
}

/// Whether both users can be served at total range `d0` on a STAR surface.
pub fn is_feasible(d0: f64, gains: &EffectiveGains, params: &SystemParams) -> Result<bool> {
    check_range(d0)?;
    params.validate()?;
    if gains.check_user(User::T).is_err() || gains.check_user(User::R).is_err() {
        return Ok(false);
    }
    Ok(best_order(Surface::Star, d0, gains, params).1.power <= params.pmax())
}

/// Lower probe of the `D0` bracket: both users at the 1 m floor.
pub(crate) fn floor_range(params: &SystemParams) -> f64 {
    1.0 / params.mu_t.max(params.mu_r)
}

/// Solves the NOMA coverage problem on a STAR surface.
pub fn solve_noma(gains: &EffectiveGains, params: &SystemParams) -> Result<CoverageSolution> {
    solve_noma_on(Surface::Star, gains, params)
}

fn found(outcome: MaxFeasible) -> Option<f64> {
    match outcome {
        MaxFeasible::Infeasible => None,
        MaxFeasible::Found(d) | MaxFeasible::Unbounded(d) => Some(d),
    }
}

pub(crate) fn solve_noma_on(
    surface: Surface,
    gains: &EffectiveGains,
    params: &SystemParams,
) -> Result<CoverageSolution> {
    params.validate()?;
    let d_lo = floor_range(params);
    let pmax = params.pmax();

    if gains.check_user(User::T).is_err() || gains.check_user(User::R).is_err() {
        return Ok(degenerate(surface, d_lo, gains, params));
    }

    let best = match surface {
        Surface::Star => {
            // One bisection per order; the better order wins, R_STRONG on ties.
            let per_order: Vec<(DecodingOrder, Option<f64>)> = DecodingOrder::BOTH
                .iter()
                .map(|&order| {
                    let reach = max_feasible(d_lo, D0_CAP, D0_TOL, |d| {
                        star_min_power(d, order, gains, params).power <= pmax
                    });
                    (order, found(reach))
                })
                .collect();
            pick_order(&per_order, gains, params)
        }
        Surface::Conventional => {
            let reach = max_feasible(d_lo, D0_CAP, D0_TOL, |d| {
                best_order(surface, d, gains, params).1.power <= pmax
            });
            found(reach).map(|d0| (best_order(surface, d0, gains, params).0, d0))
        }
    };

    Ok(match best {
        Some((order, d0)) => {
            let mp = min_power_for(surface, d0, order, gains, params);
            let alloc = allocation(surface, order, &mp);
            CoverageSolution::assemble(Access::Noma, d0, alloc, true, gains, params)
        }
        None => {
            let (order, mp) = best_order(surface, d_lo, gains, params);
            let alloc = allocation(surface, order, &mp);
            CoverageSolution::assemble(Access::Noma, d_lo, alloc, false, gains, params)
        }
    })
}

fn pick_order(
    per_order: &[(DecodingOrder, Option<f64>)],
    gains: &EffectiveGains,
    params: &SystemParams,
) -> Option<(DecodingOrder, f64)> {
    let mut candidates: Vec<(DecodingOrder, f64)> = per_order
        .iter()
        .filter_map(|&(o, d)| d.map(|d| (o, d)))
        .collect();
    // larger D0 first; DecodingOrder::BOTH lists R_STRONG first so a stable
    // sort keeps it ahead on exact ties
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1));
    let &(first, d_first) = candidates.first()?;
    let tie = 1e-7 * d_first.max(1.0);
    let tied: Vec<_> = candidates
        .iter()
        .filter(|(_, d)| d_first - d <= tie)
        .copied()
        .collect();
    if tied.len() < 2 {
        return Some((first, d_first));
    }
    // Near-ties: keep R_STRONG when its split honours the raw gain ordering.
    let consistent = |order: DecodingOrder, d0: f64| {
        let mp = star_min_power(d0, order, gains, params);
        let alloc = allocation(Surface::Star, order, &mp);
        crate::solution::residuals(Access::Noma, d0, &alloc, gains, params)
            .sic
            .is_some_and(|s| s >= -crate::solution::SIC_TOL)
    };
    for order in DecodingOrder::BOTH {
        if let Some(&(o, d)) = tied.iter().find(|(o, _)| *o == order) {
            if consistent(o, d) {
                return Some((o, d));
            }
        }
    }
    Some((first, d_first))
}

fn allocation(surface: Surface, order: DecodingOrder, mp: &MinPower) -> Allocation {
    let (beta_t, beta_r) = match surface {
        Surface::Star => (mp.beta_t, mp.beta_r()),
        Surface::Conventional => (1.0, 1.0),
    };
    Allocation {
        p_t: mp.p_t,
        p_r: mp.p_r,
        beta_t,
        beta_r,
        omega_t: 0.0,
        omega_r: 0.0,
        d_t: mp.d_t,
        d_r: mp.d_r,
        order: Some(order),
        surface,
    }
}

pub(crate) fn degenerate(
    surface: Surface,
    d_lo: f64,
    gains: &EffectiveGains,
    params: &SystemParams,
) -> CoverageSolution {
    let (beta_t, beta_r) = match surface {
        Surface::Star => (0.5, 0.5),
        Surface::Conventional => (1.0, 1.0),
    };
    let alloc = Allocation {
        p_t: 0.0,
        p_r: 0.0,
        beta_t,
        beta_r,
        omega_t: 0.0,
        omega_r: 0.0,
        d_t: params.required_distance(User::T, d_lo),
        d_r: params.required_distance(User::R, d_lo),
        order: Some(DecodingOrder::RStrong),
        surface,
    };
    CoverageSolution::assemble(Access::Noma, d_lo, alloc, false, gains, params)
}
