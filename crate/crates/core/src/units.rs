//! Unit conversions and the canonical parameter container.
//!
//! Configuration is expressed in dB/dBm where that is the customary unit.
//! Everything past this module works in linear watts, meters and bps/Hz;
//! the accessors on [`SystemParams`] perform the conversion.

use serde::{Deserialize, Serialize};

use crate::channel::User;
use crate::error::{Error, Result};

/// Tolerance on `mu_t + mu_r = 1` (the factors are usually decimal literals).
pub const MU_SUM_TOL: f64 = 1e-12;

fn finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::InvalidArgument(format!("{what} must be finite, got {x}")))
    }
}

/// `10^(x/10)`.
pub fn db_to_linear(x_db: f64) -> Result<f64> {
    Ok(10f64.powf(finite(x_db, "dB value")? / 10.0))
}

/// `10 log10(x)`; `x` must be positive.
pub fn linear_to_db(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "linear ratio must be positive and finite, got {x}"
        )));
    }
    Ok(10.0 * x.log10())
}

/// dBm to watts: `10^((x - 30)/10)`.
pub fn dbm_to_watts(x_dbm: f64) -> Result<f64> {
    Ok(10f64.powf((finite(x_dbm, "dBm value")? - 30.0) / 10.0))
}

pub fn watts_to_dbm(w: f64) -> Result<f64> {
    Ok(linear_to_db(w)? + 30.0)
}

/// Physical and protocol constants for one STAR-RIS deployment.
///
/// Field names double as the JSON configuration keys. Missing keys fall
/// back to [`SystemParams::default`]; when only `mu_t` is given, `mu_r` is
/// taken as `1 - mu_t` (and vice versa).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct SystemParams {
    /// Path loss at the 1 m reference distance, dB.
    pub rho0_db: f64,
    /// Receiver noise power, dBm.
    pub sigma2_dbm: f64,
    /// Total transmit power budget, dBm.
    pub pmax_dbm: f64,
    /// RIS to user path-loss exponent.
    pub alpha_ru: f64,
    /// AP to RIS path-loss exponent.
    pub alpha_ar: f64,
    /// RIS to user Rician factor (linear).
    pub k_ru: f64,
    /// AP to RIS Rician factor (linear).
    pub k_ar: f64,
    /// AP to RIS distance, meters.
    pub d_ap_ris: f64,
    /// Number of surface elements.
    pub m_elements: usize,
    /// Rate target of the transmission-side user, bps/Hz.
    pub gamma_t: f64,
    /// Rate target of the reflection-side user, bps/Hz.
    pub gamma_r: f64,
    /// Coverage allocation factor of the transmission-side user.
    pub mu_t: f64,
    /// Coverage allocation factor of the reflection-side user.
    pub mu_r: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            rho0_db: -30.0,
            sigma2_dbm: -80.0,
            pmax_dbm: 30.0,
            alpha_ru: 2.2,
            alpha_ar: 2.2,
            k_ru: 10.0,
            k_ar: 10.0,
            d_ap_ris: 50.0,
            m_elements: 100,
            gamma_t: 5.0,
            gamma_r: 5.0,
            mu_t: 0.6,
            mu_r: 0.4,
        }
    }
}

impl SystemParams {
    /// Checks every invariant; all solvers call this on entry.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        for (name, v) in [
            ("rho0_db", self.rho0_db),
            ("sigma2_dbm", self.sigma2_dbm),
            ("pmax_dbm", self.pmax_dbm),
            ("alpha_ru", self.alpha_ru),
            ("alpha_ar", self.alpha_ar),
            ("k_ru", self.k_ru),
            ("k_ar", self.k_ar),
            ("d_ap_ris", self.d_ap_ris),
            ("gamma_t", self.gamma_t),
            ("gamma_r", self.gamma_r),
            ("mu_t", self.mu_t),
            ("mu_r", self.mu_r),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite, got {v}"));
            }
        }
        if self.alpha_ru < 2.0 || self.alpha_ar < 2.0 {
            return bad(format!(
                "path-loss exponents must be >= 2 (alpha_ru = {}, alpha_ar = {})",
                self.alpha_ru, self.alpha_ar
            ));
        }
        if self.k_ru < 0.0 || self.k_ar < 0.0 {
            return bad("Rician factors must be nonnegative".into());
        }
        if self.d_ap_ris <= 0.0 {
            return bad(format!("d_ap_ris must be positive, got {}", self.d_ap_ris));
        }
        if self.m_elements == 0 {
            return bad("m_elements must be at least 1".into());
        }
        if self.gamma_t <= 0.0 || self.gamma_r <= 0.0 {
            return bad(format!(
                "rate targets must be positive (gamma_t = {}, gamma_r = {})",
                self.gamma_t, self.gamma_r
            ));
        }
        if self.mu_t < 0.0 || self.mu_r < 0.0 {
            return bad("coverage allocation factors must be nonnegative".into());
        }
        if (self.mu_t + self.mu_r - 1.0).abs() > MU_SUM_TOL {
            return bad(format!(
                "mu_t + mu_r must equal 1, got {} + {}",
                self.mu_t, self.mu_r
            ));
        }
        Ok(())
    }

    /// Returns a copy with `mu_t` set and `mu_r = 1 - mu_t`.
    pub fn with_mu_t(mut self, mu_t: f64) -> Self {
        self.mu_t = mu_t;
        self.mu_r = 1.0 - mu_t;
        self
    }

    /// Reference path loss, linear.
    pub fn rho0(&self) -> f64 {
        10f64.powf(self.rho0_db / 10.0)
    }

    /// Noise power, watts.
    pub fn sigma2(&self) -> f64 {
        10f64.powf((self.sigma2_dbm - 30.0) / 10.0)
    }

    /// Power budget, watts.
    pub fn pmax(&self) -> f64 {
        10f64.powf((self.pmax_dbm - 30.0) / 10.0)
    }

    pub fn gamma(&self, user: User) -> f64 {
        match user {
            User::T => self.gamma_t,
            User::R => self.gamma_r,
        }
    }

    pub fn mu(&self, user: User) -> f64 {
        match user {
            User::T => self.mu_t,
            User::R => self.mu_r,
        }
    }

    /// Distance a user must be served at for a given total range:
    /// `max(mu_k * d0, 1)`.
    pub fn required_distance(&self, user: User, d0: f64) -> f64 {
        (self.mu(user) * d0).max(1.0)
    }

    /// `rho0 / sigma2`: received SNR per watt per unit of effective gain at 1 m.
    pub fn snr_scale(&self) -> f64 {
        self.rho0() / self.sigma2()
    }

    /// Parses a JSON document, applying defaults for missing keys, and validates it.
    pub fn from_json(text: &str) -> Result<Self> {
        let params: SystemParams = serde_json::from_str(text)?;
        Ok(params)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    rho0_db: Option<f64>,
    sigma2_dbm: Option<f64>,
    pmax_dbm: Option<f64>,
    alpha_ru: Option<f64>,
    alpha_ar: Option<f64>,
    k_ru: Option<f64>,
    k_ar: Option<f64>,
    d_ap_ris: Option<f64>,
    m_elements: Option<usize>,
    gamma_t: Option<f64>,
    gamma_r: Option<f64>,
    mu_t: Option<f64>,
    mu_r: Option<f64>,
}

impl TryFrom<RawParams> for SystemParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        let d = SystemParams::default();
        let (mu_t, mu_r) = match (raw.mu_t, raw.mu_r) {
            (Some(t), Some(r)) => (t, r),
            (Some(t), None) => (t, 1.0 - t),
            (None, Some(r)) => (1.0 - r, r),
            (None, None) => (d.mu_t, d.mu_r),
        };
        let params = SystemParams {
            rho0_db: raw.rho0_db.unwrap_or(d.rho0_db),
            sigma2_dbm: raw.sigma2_dbm.unwrap_or(d.sigma2_dbm),
            pmax_dbm: raw.pmax_dbm.unwrap_or(d.pmax_dbm),
            alpha_ru: raw.alpha_ru.unwrap_or(d.alpha_ru),
            alpha_ar: raw.alpha_ar.unwrap_or(d.alpha_ar),
            k_ru: raw.k_ru.unwrap_or(d.k_ru),
            k_ar: raw.k_ar.unwrap_or(d.k_ar),
            d_ap_ris: raw.d_ap_ris.unwrap_or(d.d_ap_ris),
            m_elements: raw.m_elements.unwrap_or(d.m_elements),
            gamma_t: raw.gamma_t.unwrap_or(d.gamma_t),
            gamma_r: raw.gamma_r.unwrap_or(d.gamma_r),
            mu_t,
            mu_r,
        };
        params.validate()?;
        Ok(params)
    }
}
