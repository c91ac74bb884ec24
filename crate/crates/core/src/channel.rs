//! Rician channel draws and the coherent effective gains.
//!
//! The AP-to-surface vector `g` and the surface-to-user vectors `r_t`, `r_r`
//! each use an all-ones LoS component plus circularly-symmetric Gaussian
//! scatter. The RIS-to-user path loss is left out on purpose: the solvers
//! apply it explicitly because the user distance is an optimization variable.
//!
//! Random streams: every realization is drawn from `ChaCha8Rng` seeded with
//! the caller's seed, with one stream per vector (`g` on stream 0, the T
//! user on stream 1, the R user on stream 2). Vectors are drawn element by
//! element, so a realization for `M` elements is a prefix of the one for
//! `M + 1` elements with the same seed.

use std::fmt;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::SystemParams;

/// The transmission-side (T) or reflection-side (R) user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum User {
    T,
    R,
}

impl User {
    pub const BOTH: [User; 2] = [User::T, User::R];

    pub fn other(self) -> User {
        match self {
            User::T => User::R,
            User::R => User::T,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            User::T => "transmission",
            User::R => "reflection",
        }
    }
}

impl fmt::Display for User {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            User::T => "t",
            User::R => "r",
        })
    }
}

/// Stream ids used for one surface: (AP link, T user link, R user link).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Streams {
    pub ap: u64,
    pub t: u64,
    pub r: u64,
}

pub(crate) const STAR_STREAMS: Streams = Streams { ap: 0, t: 1, r: 2 };

/// Per-element cascaded channel magnitudes `|q_{m,k}| = |rbar_{m,k}| |g_m|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    pub q_mag_t: Vec<f64>,
    pub q_mag_r: Vec<f64>,
    pub seed: u64,
}

/// Coherent combining gains after optimal phase alignment.
///
/// They include the AP-to-surface path loss but neither the surface-to-user
/// path loss nor the energy split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveGains {
    pub c_t: f64,
    pub c_r: f64,
}

impl EffectiveGains {
    pub fn new(c_t: f64, c_r: f64) -> Self {
        EffectiveGains { c_t, c_r }
    }

    pub fn get(&self, user: User) -> f64 {
        match user {
            User::T => self.c_t,
            User::R => self.c_r,
        }
    }

    /// Multiplies both gains by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        EffectiveGains::new(self.c_t * s, self.c_r * s)
    }

    pub(crate) fn check_user(&self, user: User) -> Result<f64> {
        let c = self.get(user);
        if c.is_finite() && c > 0.0 {
            Ok(c)
        } else {
            Err(Error::DegenerateGain(user.label()))
        }
    }
}

/// Draws one standard circularly-symmetric complex Gaussian as `(re, im)`.
fn complex_normal(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    (re * std::f64::consts::FRAC_1_SQRT_2, im * std::f64::consts::FRAC_1_SQRT_2)
}

/// `|sqrt(K/(K+1)) + sqrt(1/(K+1)) n|` for `n ~ CN(0,1)`, element by element.
fn rician_magnitudes(k: f64, m: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let los = (k / (k + 1.0)).sqrt();
    let nlos = (1.0 / (k + 1.0)).sqrt();
    (0..m)
        .map(|_| {
            let (re, im) = complex_normal(&mut rng);
            (los + nlos * re).hypot(nlos * im)
        })
        .collect()
}

pub(crate) fn generate_with(
    params: &SystemParams,
    m: usize,
    seed: u64,
    streams: Streams,
) -> ChannelRealization {
    let ap_scale = (params.rho0() / params.d_ap_ris.powf(params.alpha_ar)).sqrt();
    let g = rician_magnitudes(params.k_ar, m, seed, streams.ap);
    let r_t = rician_magnitudes(params.k_ru, m, seed, streams.t);
    let r_r = rician_magnitudes(params.k_ru, m, seed, streams.r);
    let cascade = |r: &[f64]| -> Vec<f64> {
        r.iter().zip(&g).map(|(r, g)| r * g * ap_scale).collect()
    };
    ChannelRealization {
        q_mag_t: cascade(&r_t),
        q_mag_r: cascade(&r_r),
        seed,
    }
}

/// Draws the cascaded channel magnitudes for all `M` elements of the surface.
pub fn generate_channel(params: &SystemParams, seed: u64) -> Result<ChannelRealization> {
    params.validate()?;
    Ok(generate_with(params, params.m_elements, seed, STAR_STREAMS))
}

/// `(sum_m |q_m|)^2`, the largest `|q v|^2` over unit-modulus `v`.
pub fn coherent_gain(q_mag: &[f64]) -> f64 {
    let s: f64 = q_mag.iter().sum();
    s * s
}

/// Phase-aligned effective gains of both users.
pub fn effective_gain(chan: &ChannelRealization) -> EffectiveGains {
    EffectiveGains::new(coherent_gain(&chan.q_mag_t), coherent_gain(&chan.q_mag_r))
}

impl ChannelRealization {
    pub fn len(&self) -> usize {
        self.q_mag_t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q_mag_t.is_empty()
    }

    /// Writes `m,q_mag_t,q_mag_r` rows (1-based `m`).
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "m,q_mag_t,q_mag_r")?;
        for (i, (t, r)) in self.q_mag_t.iter().zip(&self.q_mag_r).enumerate() {
            writeln!(out, "{},{:e},{:e}", i + 1, t, r)?;
        }
        Ok(())
    }

    pub fn dump_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
            .map_err(|e| Error::io(path, e))
    }
}
