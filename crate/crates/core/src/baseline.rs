//! Conventional-RIS benchmark: a transmit-only and a reflect-only surface,
//! colocated with the STAR surface and sharing its element budget.
//!
//! Each surface passes all of its energy to its own side, so the energy
//! split is pinned at `beta_t = beta_r = 1`; everything else (power budget,
//! rate targets, decoding-order enumeration) is shared with the STAR solvers.

use crate::channel::{coherent_gain, generate_with, EffectiveGains, Streams};
use crate::error::Result;
use crate::rates::Surface;
use crate::solution::{Access, CoverageSolution};
use crate::units::SystemParams;
use crate::{noma, oma};

// Disjoint from the STAR streams so both benchmarks can share a seed.
const TRANSMIT_STREAMS: Streams = Streams { ap: 3, t: 4, r: 5 };
const REFLECT_STREAMS: Streams = Streams { ap: 6, t: 7, r: 8 };

/// Element counts `(transmit, reflect)`; an odd element goes to the reflect surface.
pub fn split_elements(m: usize) -> (usize, usize) {
    (m / 2, m - m / 2)
}

/// Effective gains of the two half-size single-mode surfaces.
pub fn conventional_gains(params: &SystemParams, seed: u64) -> Result<EffectiveGains> {
    params.validate()?;
    let (m_t, m_r) = split_elements(params.m_elements);
    let transmit = generate_with(params, m_t, seed, TRANSMIT_STREAMS);
    let reflect = generate_with(params, m_r, seed, REFLECT_STREAMS);
    Ok(EffectiveGains::new(
        coherent_gain(&transmit.q_mag_t),
        coherent_gain(&reflect.q_mag_r),
    ))
}

/// Solves the coverage problem for the conventional pair under `scheme`.
pub fn solve_conventional(
    scheme: Access,
    gains: &EffectiveGains,
    params: &SystemParams,
) -> Result<CoverageSolution> {
    match scheme {
        Access::Noma => noma::solve_noma_on(Surface::Conventional, gains, params),
        Access::Oma => oma::solve_oma_on(Surface::Conventional, gains, params),
    }
}
