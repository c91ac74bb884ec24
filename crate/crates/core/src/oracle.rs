//! Brute-force grid optimizers over the untransformed coverage problems.
//!
//! These never use the closed forms the solvers rely on: the NOMA oracle
//! grids the energy split, the power split and both decoding orders, and
//! checks the raw SIC gain ordering directly; the OMA oracle grids the
//! energy, resource and power splits without assuming any coupling between
//! power and energy split. For each grid cell the rate constraints are
//! inverted exactly for the user distances, so `D0` itself is not gridded.

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::EffectiveGains;
use crate::error::{Error, Result};
use crate::rates::{DecodingOrder, Surface};
use crate::units::SystemParams;

pub const DEFAULT_GRID_N: usize = 256;
pub const MIN_GRID_N: usize = 32;

/// Best grid cell found by an oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleCell {
    pub order: Option<DecodingOrder>,
    pub beta_t: f64,
    pub omega_t: Option<f64>,
    pub p_t: f64,
    pub p_r: f64,
    pub d0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleResult {
    /// Best `D0` over the grid; 0 when no cell is feasible.
    pub d0: f64,
    pub feasible: bool,
    /// Largest `D0` change between the best cell and any feasible neighbour
    /// (one step along any combination of axes): the grid's resolution at
    /// the optimum.
    pub slack: f64,
    pub argmax: Option<OracleCell>,
    pub grid_n: usize,
}

/// Best `D0` in a row of cells and the cell's indices.
type Best<I> = (f64, I);

fn grid_value(i: usize, n: usize) -> f64 {
    i as f64 / n as f64
}

fn check_grid(grid_n: usize) -> Result<()> {
    if grid_n < MIN_GRID_N {
        return Err(Error::InvalidArgument(format!(
            "grid_n must be at least {MIN_GRID_N}, got {grid_n}"
        )));
    }
    Ok(())
}

/// Shared per-instance constants.
struct Setup {
    g_t: f64,
    g_r: f64,
    pmax: f64,
    alpha: f64,
    mu_t: f64,
    mu_r: f64,
    gamma_t: f64,
    gamma_r: f64,
    surface: Surface,
}

impl Setup {
    fn new(surface: Surface, gains: &EffectiveGains, params: &SystemParams) -> Self {
        let scale = params.rho0() / params.sigma2();
        Setup {
            g_t: gains.c_t * scale,
            g_r: gains.c_r * scale,
            pmax: params.pmax(),
            alpha: params.alpha_ru,
            mu_t: params.mu_t,
            mu_r: params.mu_r,
            gamma_t: params.gamma_t,
            gamma_r: params.gamma_r,
            surface,
        }
    }

    fn betas(&self, beta_t: f64) -> (f64, f64) {
        match self.surface {
            Surface::Star => (beta_t, 1.0 - beta_t),
            Surface::Conventional => (1.0, 1.0),
        }
    }

    /// `D0` from per-user `reach^alpha`, or `None` if a user cannot make 1 m.
    fn d0_from(&self, reach_t: f64, reach_r: f64) -> Option<f64> {
        if !(reach_t >= 1.0 && reach_r >= 1.0) {
            return None;
        }
        let mut d0 = f64::INFINITY;
        if self.mu_t > 0.0 {
            d0 = d0.min(reach_t.powf(1.0 / self.alpha) / self.mu_t);
        }
        if self.mu_r > 0.0 {
            d0 = d0.min(reach_r.powf(1.0 / self.alpha) / self.mu_r);
        }
        Some(d0)
    }

    fn distance(&self, mu: f64, d0: f64) -> f64 {
        (mu * d0).max(1.0)
    }

    fn noma_cell(&self, order: DecodingOrder, beta_t: f64, frac_t: f64) -> Option<f64> {
        let (beta_t, beta_r) = self.betas(beta_t);
        let (p_t, p_r) = (frac_t * self.pmax, (1.0 - frac_t) * self.pmax);
        let sinr_t = self.gamma_t.exp2() - 1.0;
        let sinr_r = self.gamma_r.exp2() - 1.0;
        // weak user: p_w b g / (p_s b g + D^a) >= sinr  =>  D^a <= b g (p_w / sinr - p_s)
        let (reach_t, reach_r) = match order {
            DecodingOrder::RStrong => (
                beta_t * self.g_t * (p_t / sinr_t - p_r),
                p_r * beta_r * self.g_r / sinr_r,
            ),
            DecodingOrder::TStrong => (
                p_t * beta_t * self.g_t / sinr_t,
                beta_r * self.g_r * (p_r / sinr_r - p_t),
            ),
        };
        let d0 = self.d0_from(reach_t, reach_r)?;
        let h_t = beta_t * self.g_t / self.distance(self.mu_t, d0).powf(self.alpha);
        let h_r = beta_r * self.g_r / self.distance(self.mu_r, d0).powf(self.alpha);
        let (strong, weak) = match order {
            DecodingOrder::RStrong => (h_r, h_t),
            DecodingOrder::TStrong => (h_t, h_r),
        };
        (strong >= weak * (1.0 - 1e-12)).then_some(d0)
    }

    fn oma_cell(&self, beta_t: f64, omega_t: f64, frac_t: f64) -> Option<f64> {
        let (beta_t, beta_r) = self.betas(beta_t);
        let omega_r = 1.0 - omega_t;
        let (p_t, p_r) = (frac_t * self.pmax, (1.0 - frac_t) * self.pmax);
        // w log2(1 + p b g / (w D^a)) >= gamma  =>  D^a <= p b g / (w (2^(gamma/w) - 1))
        let reach_t = p_t * beta_t * self.g_t / (omega_t * ((self.gamma_t / omega_t).exp2() - 1.0));
        let reach_r = p_r * beta_r * self.g_r / (omega_r * ((self.gamma_r / omega_r).exp2() - 1.0));
        self.d0_from(reach_t, reach_r)
    }
}

fn pick_best<I: Copy>(rows: Vec<Option<(f64, I)>>) -> Option<(f64, I)> {
    rows.into_iter().flatten().fold(None, |acc, (v, idx)| match acc {
        Some((bv, _)) if bv >= v => acc,
        _ => Some((v, idx)),
    })
}

/// NOMA oracle on a STAR surface.
pub fn oracle_noma(gains: &EffectiveGains, params: &SystemParams, grid_n: usize) -> Result<OracleResult> {
    oracle_noma_on(Surface::Star, gains, params, grid_n)
}

/// NOMA oracle for either surface type (the conventional pair has a single
/// energy split, so only the power split is gridded).
pub fn oracle_noma_on(
    surface: Surface,
    gains: &EffectiveGains,
    params: &SystemParams,
    grid_n: usize,
) -> Result<OracleResult> {
    check_grid(grid_n)?;
    params.validate()?;
    let setup = Setup::new(surface, gains, params);
    let n = grid_n;
    let beta_cells: Vec<usize> = match surface {
        Surface::Star => (1..n).collect(),
        Surface::Conventional => vec![n / 2],
    };
    let rows: Vec<(DecodingOrder, usize)> = DecodingOrder::BOTH
        .iter()
        .flat_map(|&o| beta_cells.iter().map(move |&i| (o, i)))
        .collect();
    let cell = |o: DecodingOrder, i: usize, j: usize| setup.noma_cell(o, grid_value(i, n), grid_value(j, n));

    let row_best: Vec<Option<Best<(DecodingOrder, usize, usize)>>> = rows
        .par_iter()
        .map(|&(o, i)| {
            pick_best((1..n).map(|j| cell(o, i, j).map(|v| (v, (o, i, j)))).collect())
        })
        .collect();

    let Some((d0, (order, i, j))) = pick_best(row_best) else {
        return Ok(infeasible(grid_n));
    };
    let di_range: &[isize] = match surface {
        Surface::Star => &[-1, 0, 1],
        Surface::Conventional => &[0],
    };
    let mut slack: f64 = 0.0;
    for &di in di_range {
        for dj in [-1isize, 0, 1] {
            let (ni, nj) = (i as isize + di, j as isize + dj);
            if (di, dj) == (0, 0) || ni < 1 || nj < 1 || ni >= n as isize || nj >= n as isize {
                continue;
            }
            if let Some(v) = cell(order, ni as usize, nj as usize) {
                slack = slack.max((v - d0).abs());
            }
        }
    }
    let frac = grid_value(j, n);
    Ok(OracleResult {
        d0,
        feasible: true,
        slack,
        argmax: Some(OracleCell {
            order: Some(order),
            beta_t: setup.betas(grid_value(i, n)).0,
            omega_t: None,
            p_t: frac * setup.pmax,
            p_r: (1.0 - frac) * setup.pmax,
            d0,
        }),
        grid_n,
    })
}

/// OMA oracle on a STAR surface.
pub fn oracle_oma(gains: &EffectiveGains, params: &SystemParams, grid_n: usize) -> Result<OracleResult> {
    oracle_oma_on(Surface::Star, gains, params, grid_n)
}

pub fn oracle_oma_on(
    surface: Surface,
    gains: &EffectiveGains,
    params: &SystemParams,
    grid_n: usize,
) -> Result<OracleResult> {
    check_grid(grid_n)?;
    params.validate()?;
    let setup = Setup::new(surface, gains, params);
    let n = grid_n;
    let beta_cells: Vec<usize> = match surface {
        Surface::Star => (1..n).collect(),
        Surface::Conventional => vec![n / 2],
    };
    let cell = |i: usize, w: usize, j: usize| {
        setup.oma_cell(grid_value(i, n), grid_value(w, n), grid_value(j, n))
    };

    let row_best: Vec<Option<Best<(usize, usize, usize)>>> = beta_cells
        .par_iter()
        .map(|&i| {
            let mut best: Option<(f64, (usize, usize, usize))> = None;
            for w in 1..n {
                for j in 1..n {
                    if let Some(v) = cell(i, w, j) {
                        if best.is_none_or(|(bv, _)| v > bv) {
                            best = Some((v, (i, w, j)));
                        }
                    }
                }
            }
            best
        })
        .collect();

    let Some((d0, (i, w, j))) = pick_best(row_best) else {
        return Ok(infeasible(grid_n));
    };
    let di_range: &[isize] = match surface {
        Surface::Star => &[-1, 0, 1],
        Surface::Conventional => &[0],
    };
    let inside = |x: isize| x >= 1 && x < n as isize;
    let mut slack: f64 = 0.0;
    for &di in di_range {
        for dw in [-1isize, 0, 1] {
            for dj in [-1isize, 0, 1] {
                let (ni, nw, nj) = (i as isize + di, w as isize + dw, j as isize + dj);
                if (di, dw, dj) == (0, 0, 0) || !inside(ni) || !inside(nw) || !inside(nj) {
                    continue;
                }
                if let Some(v) = cell(ni as usize, nw as usize, nj as usize) {
                    slack = slack.max((v - d0).abs());
                }
            }
        }
    }
    let frac = grid_value(j, n);
    Ok(OracleResult {
        d0,
        feasible: true,
        slack,
        argmax: Some(OracleCell {
            order: None,
            beta_t: setup.betas(grid_value(i, n)).0,
            omega_t: Some(grid_value(w, n)),
            p_t: frac * setup.pmax,
            p_r: (1.0 - frac) * setup.pmax,
            d0,
        }),
        grid_n,
    })
}

fn infeasible(grid_n: usize) -> OracleResult {
    OracleResult { d0: 0.0, feasible: false, slack: 0.0, argmax: None, grid_n }
}
