//! Solver output and its re-verification against the raw problem constraints.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::{EffectiveGains, User};
use crate::rates::{self, Allocation, Surface, POWER_TOL, SPLIT_TOL};
use crate::units::SystemParams;

/// Multiple-access scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Access {
    #[serde(rename = "NOMA")]
    Noma,
    #[serde(rename = "OMA")]
    Oma,
}

impl fmt::Display for Access {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Access::Noma => "NOMA",
            Access::Oma => "OMA",
        })
    }
}

/// Rate slack below which a QoS constraint counts as violated.
pub const RATE_TOL: f64 = 1e-6;
/// Distance slack below which a range constraint counts as violated, meters.
pub const RANGE_TOL: f64 = 1e-6;
/// Relative slack on the SIC gain ordering.
pub const SIC_TOL: f64 = 1e-9;

/// Constraint slacks; nonnegative means satisfied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `r_t - gamma_t`, bps/Hz.
    pub rate_t: f64,
    /// `r_r - gamma_r`, bps/Hz.
    pub rate_r: f64,
    /// `P_max - p_t - p_r`, watts.
    pub power: f64,
    /// `|beta_t + beta_r - 1|` on a STAR surface, 0 otherwise.
    pub beta_sum_error: f64,
    /// `D_t - max(mu_t D0, 1)`, meters.
    pub range_t: f64,
    /// `D_r - max(mu_r D0, 1)`, meters.
    pub range_r: f64,
    /// `1 - omega_t - omega_r` (OMA only).
    pub omega: Option<f64>,
    /// `(|h_s|^2 - |h_w|^2) / max` for the declared strong user (NOMA only).
    pub sic: Option<f64>,
}

impl Residuals {
    /// Whether every slack is within the verification tolerances.
    pub fn satisfied(&self, params: &SystemParams) -> bool {
        self.rate_t >= -RATE_TOL
            && self.rate_r >= -RATE_TOL
            && self.power >= -POWER_TOL * params.pmax()
            && self.beta_sum_error <= SPLIT_TOL
            && self.range_t >= -RANGE_TOL
            && self.range_r >= -RANGE_TOL
            && self.omega.is_none_or(|w| w >= -SPLIT_TOL)
            && self.sic.is_none_or(|s| s >= -SIC_TOL)
    }
}

/// Optimizer output for one channel realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageSolution {
    pub scheme: Access,
    /// Total coverage range `D0`, meters.
    pub d0: f64,
    #[serde(flatten)]
    pub alloc: Allocation,
    pub residuals: Residuals,
    pub feasible: bool,
}

impl CoverageSolution {
    pub fn d_t(&self) -> f64 {
        self.alloc.d_t
    }

    pub fn d_r(&self) -> f64 {
        self.alloc.d_r
    }

    pub fn surface(&self) -> Surface {
        self.alloc.surface
    }

    /// Builds a solution, computing residuals from the raw rate expressions.
    /// `feasible` is the solver's claim and the residual check combined.
    pub(crate) fn assemble(
        scheme: Access,
        d0: f64,
        alloc: Allocation,
        claimed_feasible: bool,
        gains: &EffectiveGains,
        params: &SystemParams,
    ) -> Self {
        let residuals = residuals(scheme, d0, &alloc, gains, params);
        let feasible = claimed_feasible && residuals.satisfied(params);
        CoverageSolution {
            scheme,
            d0,
            alloc,
            residuals,
            feasible,
        }
    }
}

/// Evaluates every constraint of the raw coverage problem at `alloc`.
pub fn residuals(
    scheme: Access,
    d0: f64,
    alloc: &Allocation,
    gains: &EffectiveGains,
    params: &SystemParams,
) -> Residuals {
    let rate = |user: User| match (scheme, alloc.order) {
        (Access::Noma, Some(order)) => rates::noma_rate_raw(user, order, alloc, gains, params),
        (Access::Noma, None) => f64::NEG_INFINITY,
        (Access::Oma, _) => rates::oma_rate_raw(user, alloc, gains, params),
    };
    let sic = match (scheme, alloc.order) {
        (Access::Noma, Some(order)) => {
            let hs = rates::channel_power_gain(order.strong(), alloc, gains, params);
            let hw = rates::channel_power_gain(order.weak(), alloc, gains, params);
            let scale = hs.max(hw);
            Some(if scale > 0.0 { (hs - hw) / scale } else { 0.0 })
        }
        (Access::Noma, None) => Some(f64::NEG_INFINITY),
        (Access::Oma, _) => None,
    };
    Residuals {
        rate_t: rate(User::T) - params.gamma_t,
        rate_r: rate(User::R) - params.gamma_r,
        power: params.pmax() - alloc.p_t - alloc.p_r,
        beta_sum_error: match alloc.surface {
            Surface::Star => (alloc.beta_t + alloc.beta_r - 1.0).abs(),
            Surface::Conventional => 0.0,
        },
        range_t: alloc.d_t - params.required_distance(User::T, d0),
        range_r: alloc.d_r - params.required_distance(User::R, d0),
        omega: match scheme {
            Access::Oma => Some(1.0 - alloc.omega_t - alloc.omega_r),
            Access::Noma => None,
        },
        sic,
    }
}
