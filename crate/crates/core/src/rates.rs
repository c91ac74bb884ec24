//! Achievable rates evaluated directly from the untransformed rate
//! expressions. Every solver output is re-checked through here.

use serde::{Deserialize, Serialize};

use crate::channel::{EffectiveGains, User};
use crate::error::{Error, Result};
use crate::units::SystemParams;

/// Relative tolerance of the `p_t + p_r <= P_max` check.
pub const POWER_TOL: f64 = 1e-9;
/// Absolute tolerance on `beta_t + beta_r = 1` and `omega_t + omega_r <= 1`.
pub const SPLIT_TOL: f64 = 1e-9;

/// SIC decoding order: which user decodes (and cancels) the other first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DecodingOrder {
    /// The T user is the strong user (`lambda(t) = 1`).
    #[serde(rename = "T_STRONG")]
    TStrong,
    /// The R user is the strong user (`lambda(r) = 1`).
    #[serde(rename = "R_STRONG")]
    RStrong,
}

impl DecodingOrder {
    pub const BOTH: [DecodingOrder; 2] = [DecodingOrder::RStrong, DecodingOrder::TStrong];

    pub fn strong(self) -> User {
        match self {
            DecodingOrder::TStrong => User::T,
            DecodingOrder::RStrong => User::R,
        }
    }

    pub fn weak(self) -> User {
        self.strong().other()
    }
}

/// Surface type serving the two users.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Surface {
    /// One STAR surface; the energy split obeys `beta_t + beta_r = 1`.
    #[serde(rename = "STAR")]
    Star,
    /// A transmit-only and a reflect-only surface, each passing all its energy.
    #[serde(rename = "CR")]
    Conventional,
}

/// Outcome of comparing `|h_t|^2` against `|h_r|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainOrdering {
    TStronger,
    RStronger,
    Equal,
}

impl GainOrdering {
    /// Whether the ordering permits `order` (ties permit either).
    pub fn admits(self, order: DecodingOrder) -> bool {
        matches!(
            (self, order),
            (GainOrdering::Equal, _)
                | (GainOrdering::TStronger, DecodingOrder::TStrong)
                | (GainOrdering::RStronger, DecodingOrder::RStrong)
        )
    }
}

/// Powers, energy split, resource split and user distances for both users.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub p_t: f64,
    pub p_r: f64,
    pub beta_t: f64,
    pub beta_r: f64,
    pub omega_t: f64,
    pub omega_r: f64,
    pub d_t: f64,
    pub d_r: f64,
    /// Only meaningful for NOMA.
    pub order: Option<DecodingOrder>,
    pub surface: Surface,
}

impl Allocation {
    pub fn power(&self, user: User) -> f64 {
        match user {
            User::T => self.p_t,
            User::R => self.p_r,
        }
    }

    pub fn beta(&self, user: User) -> f64 {
        match user {
            User::T => self.beta_t,
            User::R => self.beta_r,
        }
    }

    pub fn omega(&self, user: User) -> f64 {
        match user {
            User::T => self.omega_t,
            User::R => self.omega_r,
        }
    }

    pub fn distance(&self, user: User) -> f64 {
        match user {
            User::T => self.d_t,
            User::R => self.d_r,
        }
    }

    /// Checks the allocation invariants against the power budget.
    pub fn validate(&self, params: &SystemParams) -> Result<()> {
        let fail = |m: String| Err(Error::ContractViolation(m));
        let fields = [
            self.p_t, self.p_r, self.beta_t, self.beta_r, self.omega_t, self.omega_r, self.d_t,
            self.d_r,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return fail(format!("non-finite allocation {self:?}"));
        }
        if self.p_t < 0.0 || self.p_r < 0.0 {
            return fail("negative power".into());
        }
        let pmax = params.pmax();
        if self.p_t + self.p_r > pmax * (1.0 + POWER_TOL) {
            return fail(format!(
                "total power {} exceeds budget {pmax}",
                self.p_t + self.p_r
            ));
        }
        for b in [self.beta_t, self.beta_r] {
            if !(0.0..=1.0).contains(&b) {
                return fail(format!("energy coefficient {b} outside [0, 1]"));
            }
        }
        if self.surface == Surface::Star && (self.beta_t + self.beta_r - 1.0).abs() > SPLIT_TOL {
            return fail(format!(
                "beta_t + beta_r = {} (must be 1)",
                self.beta_t + self.beta_r
            ));
        }
        if self.omega_t < 0.0 || self.omega_r < 0.0 || self.omega_t + self.omega_r > 1.0 + SPLIT_TOL
        {
            return fail(format!(
                "resource split ({}, {}) is not a sub-partition of 1",
                self.omega_t, self.omega_r
            ));
        }
        if self.d_t < 1.0 || self.d_r < 1.0 {
            return fail(format!(
                "user distances ({}, {}) inside the 1 m far-field floor",
                self.d_t, self.d_r
            ));
        }
        Ok(())
    }
}

/// Received signal power per unit transmit power, `rho0 beta_k c_k / D_k^alpha`.
pub fn channel_power_gain(
    user: User,
    alloc: &Allocation,
    gains: &EffectiveGains,
    params: &SystemParams,
) -> f64 {
    params.rho0() * alloc.beta(user) * gains.get(user)
        / alloc.distance(user).powf(params.alpha_ru)
}

/// NOMA rate of `user`: the weak user sees the strong user's signal as
/// interference, the strong user has cancelled the weak user's signal.
pub fn noma_rate(
    user: User,
    alloc: &Allocation,
    gains: &EffectiveGains,
    params: &SystemParams,
) -> Result<f64> {
    alloc.validate(params)?;
    let order = alloc
        .order
        .ok_or_else(|| Error::ContractViolation("NOMA rate needs a decoding order".into()))?;
    Ok(noma_rate_raw(user, order, alloc, gains, params))
}

pub(crate) fn noma_rate_raw(
    user: User,
    order: DecodingOrder,
    alloc: &Allocation,
    gains: &EffectiveGains,
    params: &SystemParams,
) -> f64 {
    let h = params.rho0() * alloc.beta(user) * gains.get(user);
    let signal = alloc.power(user) * h;
    let interference = if order.weak() == user {
        alloc.power(user.other()) * h
    } else {
        0.0
    };
    let noise = alloc.distance(user).powf(params.alpha_ru) * params.sigma2();
    (signal / (interference + noise)).ln_1p() / std::f64::consts::LN_2
}

/// OMA rate of `user` on its resource fraction `omega_k` (0 when `omega_k = 0`).
pub fn oma_rate(
    user: User,
    alloc: &Allocation,
    gains: &EffectiveGains,
    params: &SystemParams,
) -> Result<f64> {
    alloc.validate(params)?;
    Ok(oma_rate_raw(user, alloc, gains, params))
}

pub(crate) fn oma_rate_raw(
    user: User,
    alloc: &Allocation,
    gains: &EffectiveGains,
    params: &SystemParams,
) -> f64 {
    let omega = alloc.omega(user);
    if omega == 0.0 {
        return 0.0;
    }
    let signal = params.rho0() * alloc.power(user) * alloc.beta(user) * gains.get(user);
    let noise = omega * alloc.distance(user).powf(params.alpha_ru) * params.sigma2();
    omega * (signal / noise).ln_1p() / std::f64::consts::LN_2
}

/// Relative tolerance under which the two users' channel gains count as equal.
pub const GAIN_TIE_TOL: f64 = 1e-12;

/// Compares `|h_t|^2` against `|h_r|^2` at the given allocation.
pub fn channel_gain_order(
    alloc: &Allocation,
    gains: &EffectiveGains,
    params: &SystemParams,
) -> Result<GainOrdering> {
    alloc.validate(params)?;
    let ht = channel_power_gain(User::T, alloc, gains, params);
    let hr = channel_power_gain(User::R, alloc, gains, params);
    Ok(if (ht - hr).abs() <= GAIN_TIE_TOL * ht.max(hr) {
        GainOrdering::Equal
    } else if ht > hr {
        GainOrdering::TStronger
    } else {
        GainOrdering::RStronger
    })
}
