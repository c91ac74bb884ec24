//! Monte Carlo sweeps behind the coverage figures.
//!
//! Each grid value of a [`Scenario`] is solved once per channel seed for
//! every requested scheme; the table reports per-scheme means and standard
//! deviations over the seeds. Trial `i` always uses seed `scenario.seed + i`,
//! so all grid values and schemes share the same channel draws.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{conventional_gains, solve_conventional};
use crate::channel::{effective_gain, generate_channel, EffectiveGains};
use crate::error::{Error, Result};
use crate::noma::solve_noma;
use crate::oma::solve_oma;
use crate::oracle::{oracle_noma_on, oracle_oma_on, OracleResult};
use crate::rates::Surface;
use crate::solution::{Access, CoverageSolution};
use crate::units::SystemParams;

/// Environment variable naming the default directory for CSV output.
pub const OUT_DIR_ENV: &str = "STARCOV_OUT_DIR";

pub const CSV_HEADER: &str =
    "swept_name,swept_value,scheme,trials,mean_d0,std_d0,mean_dt,mean_dr,infeasible_count";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "STAR-NOMA", alias = "star-noma")]
    StarNoma,
    #[serde(rename = "STAR-OMA", alias = "star-oma")]
    StarOma,
    #[serde(rename = "CR-NOMA", alias = "cr-noma")]
    CrNoma,
    #[serde(rename = "CR-OMA", alias = "cr-oma")]
    CrOma,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::StarNoma, Scheme::StarOma, Scheme::CrNoma, Scheme::CrOma];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::StarNoma => "STAR-NOMA",
            Scheme::StarOma => "STAR-OMA",
            Scheme::CrNoma => "CR-NOMA",
            Scheme::CrOma => "CR-OMA",
        }
    }

    pub fn access(self) -> Access {
        match self {
            Scheme::StarNoma | Scheme::CrNoma => Access::Noma,
            Scheme::StarOma | Scheme::CrOma => Access::Oma,
        }
    }

    pub fn is_star(self) -> bool {
        matches!(self, Scheme::StarNoma | Scheme::StarOma)
    }

    pub fn surface(self) -> Surface {
        if self.is_star() {
            Surface::Star
        } else {
            Surface::Conventional
        }
    }

    /// Grid-search reference for the same problem `solve` answers.
    pub fn oracle(
        self,
        gains: &EffectiveGains,
        params: &SystemParams,
        grid_n: usize,
    ) -> Result<OracleResult> {
        match self.access() {
            Access::Noma => oracle_noma_on(self.surface(), gains, params, grid_n),
            Access::Oma => oracle_oma_on(self.surface(), gains, params, grid_n),
        }
    }

    /// Solves one realization; `gains` must match the surface type.
    pub fn solve(self, gains: &EffectiveGains, params: &SystemParams) -> Result<CoverageSolution> {
        match self {
            Scheme::StarNoma => solve_noma(gains, params),
            Scheme::StarOma => solve_oma(gains, params),
            Scheme::CrNoma | Scheme::CrOma => solve_conventional(self.access(), gains, params),
        }
    }

    /// Draws the gains this scheme's surface sees for `seed`.
    pub fn gains(self, params: &SystemParams, seed: u64) -> Result<EffectiveGains> {
        if self.is_star() {
            Ok(effective_gain(&generate_channel(params, seed)?))
        } else {
            conventional_gains(params, seed)
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scheme {s:?}")))
    }
}

/// Parameter varied across a scenario's grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptVar {
    MuT,
    GammaT,
    MElements,
}

impl SweptVar {
    pub fn name(self) -> &'static str {
        match self {
            SweptVar::MuT => "mu_t",
            SweptVar::GammaT => "gamma_t",
            SweptVar::MElements => "m_elements",
        }
    }

    /// `base` with this variable set to `value`; `mu_r` follows `mu_t`.
    pub fn apply(self, base: &SystemParams, value: f64) -> Result<SystemParams> {
        let params = match self {
            SweptVar::MuT => base.with_mu_t(value),
            SweptVar::GammaT => SystemParams { gamma_t: value, ..*base },
            SweptVar::MElements => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "m_elements must be a positive integer, got {value}"
                    )));
                }
                SystemParams { m_elements: value as usize, ..*base }
            }
        };
        params.validate()?;
        Ok(params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub variable: SweptVar,
    pub values: Vec<f64>,
}

fn default_trials() -> usize {
    100
}

fn default_name() -> String {
    "custom".into()
}

fn all_schemes() -> Vec<Scheme> {
    Scheme::ALL.to_vec()
}

/// One figure experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_name")]
    pub name: String,
    pub swept: Sweep,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base: SystemParams,
    #[serde(default = "all_schemes")]
    pub schemes: Vec<Scheme>,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    /// Seed of the first trial.
    #[serde(default)]
    pub seed: u64,
}

impl Scenario {
    fn preset_with(name: &str, variable: SweptVar, values: Vec<f64>, base: SystemParams) -> Self {
        Scenario {
            name: name.into(),
            swept: Sweep { variable, values },
            trials: default_trials(),
            base,
            schemes: all_schemes(),
            output_path: None,
            seed: 0,
        }
    }

    /// Coverage pairs over the priority split, `gamma_k = 5`.
    pub fn fig2() -> Self {
        let values = (1..=9).map(|i| i as f64 / 10.0).collect();
        let base = SystemParams { gamma_t: 5.0, gamma_r: 5.0, ..SystemParams::default() };
        Self::preset_with("fig2", SweptVar::MuT, values, base)
    }

    /// Total range over the T user's rate target, `gamma_r = 5`, `mu_t = 0.6`.
    pub fn fig3() -> Self {
        let values = (1..=8).map(f64::from).collect();
        let base = SystemParams { gamma_r: 5.0, ..SystemParams::default() }.with_mu_t(0.6);
        Self::preset_with("fig3", SweptVar::GammaT, values, base)
    }

    /// T-user range over the element count, `gamma_k = 3`, `mu_t = 0.6`.
    pub fn fig4() -> Self {
        let values = vec![60.0, 80.0, 100.0, 120.0, 140.0];
        let base = SystemParams { gamma_t: 3.0, gamma_r: 3.0, ..SystemParams::default() }
            .with_mu_t(0.6);
        Self::preset_with("fig4", SweptVar::MElements, values, base)
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "fig2" => Some(Self::fig2()),
            "fig3" => Some(Self::fig3()),
            "fig4" => Some(Self::fig4()),
            _ => None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.swept.values.is_empty() {
            return Err(Error::InvalidArgument("scenario grid is empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidArgument("scenario lists no schemes".into()));
        }
        self.base.validate()?;
        for &v in &self.swept.values {
            self.swept.variable.apply(&self.base, v)?;
        }
        Ok(())
    }
}

/// Aggregate over the trials of one (grid value, scheme) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub swept_name: String,
    pub swept_value: f64,
    pub scheme: Scheme,
    pub trials: usize,
    /// Means and deviation are over feasible trials only; NaN if there are none.
    pub mean_d0: f64,
    pub std_d0: f64,
    pub mean_dt: f64,
    pub mean_dr: f64,
    pub infeasible_count: usize,
}

impl ResultRow {
    /// Standard error of `mean_d0`.
    pub fn stderr_d0(&self) -> f64 {
        let n = self.trials - self.infeasible_count;
        if n == 0 {
            f64::NAN
        } else {
            self.std_d0 / (n as f64).sqrt()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn row(&self, swept_value: f64, scheme: Scheme) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.scheme == scheme && r.swept_value == swept_value)
    }

    /// Rows of one scheme in grid order.
    pub fn series(&self, scheme: Scheme) -> Vec<&ResultRow> {
        self.rows.iter().filter(|r| r.scheme == scheme).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.swept_name,
                fmt_sig9(r.swept_value),
                r.scheme,
                r.trials,
                fmt_sig9(r.mean_d0),
                fmt_sig9(r.std_d0),
                fmt_sig9(r.mean_dt),
                fmt_sig9(r.mean_dr),
                r.infeasible_count
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_csv(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }
}

/// `%.9g`-style formatting: 9 significant digits, trailing zeros removed.
pub fn fmt_sig9(x: f64) -> String {
    const SIG: i32 = 9;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (SIG - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..SIG).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mantissa), sign, exp.abs())
    } else {
        let decimals = (SIG - 1 - exp) as usize;
        trim(&format!("{:.*}", decimals, x))
    }
}

/// Per-trial solver outcome: `(d0, d_t, d_r)` when feasible.
type Outcome = Option<(f64, f64, f64)>;

fn solve_trial(scheme: Scheme, params: &SystemParams, seed: u64) -> Result<Outcome> {
    let gains = scheme.gains(params, seed)?;
    let sol = scheme.solve(&gains, params)?;
    Ok(sol.feasible.then_some((sol.d0, sol.d_t(), sol.d_r())))
}

fn aggregate(name: &str, value: f64, scheme: Scheme, outcomes: &[Outcome]) -> ResultRow {
    let ok: Vec<(f64, f64, f64)> = outcomes.iter().flatten().copied().collect();
    let n = ok.len() as f64;
    let mean = |f: fn(&(f64, f64, f64)) -> f64| {
        if ok.is_empty() {
            f64::NAN
        } else {
            ok.iter().map(f).sum::<f64>() / n
        }
    };
    let mean_d0 = mean(|o| o.0);
    let std_d0 = match ok.len() {
        0 => f64::NAN,
        1 => 0.0,
        _ => (ok.iter().map(|o| (o.0 - mean_d0).powi(2)).sum::<f64>() / (n - 1.0)).sqrt(),
    };
    ResultRow {
        swept_name: name.to_string(),
        swept_value: value,
        scheme,
        trials: outcomes.len(),
        mean_d0,
        std_d0,
        mean_dt: mean(|o| o.1),
        mean_dr: mean(|o| o.2),
        infeasible_count: outcomes.len() - ok.len(),
    }
}

/// Runs every (grid value, scheme) pair of the scenario and writes the CSV
/// if `output_path` is set.
pub fn run_scenario(scenario: &Scenario) -> Result<ResultTable> {
    scenario.validate()?;
    let var = scenario.swept.variable;
    let mut schemes = scenario.schemes.clone();
    schemes.sort_by_key(|s| s.name());
    schemes.dedup();

    let mut values = scenario.swept.values.clone();
    values.sort_by(f64::total_cmp);
    values.dedup();

    let mut rows = Vec::with_capacity(values.len() * schemes.len());
    for &value in &values {
        let params = var.apply(&scenario.base, value)?;
        for &scheme in &schemes {
            let outcomes = (0..scenario.trials as u64)
                .into_par_iter()
                .map(|t| solve_trial(scheme, &params, scenario.seed.wrapping_add(t)))
                .collect::<Result<Vec<_>>>()?;
            rows.push(aggregate(var.name(), value, scheme, &outcomes));
        }
    }
    let table = ResultTable { rows };
    if let Some(path) = &scenario.output_path {
        table.save_csv(path)?;
    }
    Ok(table)
}

/// `$STARCOV_OUT_DIR/<name>.csv`, or `<name>.csv` in the working directory.
pub fn default_output_path(name: &str) -> PathBuf {
    let file = format!("{name}.csv");
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(file),
        _ => PathBuf::from(file),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_formatting() {
        assert_eq!(fmt_sig9(0.0), "0");
        assert_eq!(fmt_sig9(60.0), "60");
        assert_eq!(fmt_sig9(0.1), "0.1");
        assert_eq!(fmt_sig9(12.345678912345), "12.3456789");
        assert_eq!(fmt_sig9(-2.5), "-2.5");
        assert_eq!(fmt_sig9(123456789.0), "123456789");
        assert_eq!(fmt_sig9(1234567890.0), "1.23456789e+09");
        assert_eq!(fmt_sig9(0.0001), "0.0001");
        assert_eq!(fmt_sig9(0.00001234), "1.234e-05");
        assert_eq!(fmt_sig9(9.9999999999), "10");
        assert_eq!(fmt_sig9(f64::NAN), "nan");
    }

    #[test]
    fn presets() {
        let f2 = Scenario::fig2();
        assert_eq!(f2.swept.values.len(), 9);
        assert_eq!(f2.base.gamma_t, 5.0);
        let f3 = Scenario::fig3();
        assert_eq!((f3.base.gamma_r, f3.base.mu_t), (5.0, 0.6));
        let f4 = Scenario::fig4();
        assert_eq!(f4.swept.values, vec![60.0, 80.0, 100.0, 120.0, 140.0]);
        assert_eq!(f4.base.gamma_t, 3.0);
        for s in [f2, f3, f4] {
            s.validate().unwrap();
            assert_eq!(s.trials, 100);
        }
        assert!(Scenario::preset("fig9").is_none());
    }

    #[test]
    fn sweep_application() {
        let base = SystemParams::default();
        let p = SweptVar::MuT.apply(&base, 0.3).unwrap();
        assert!((p.mu_r - 0.7).abs() < 1e-15);
        assert_eq!(SweptVar::MElements.apply(&base, 80.0).unwrap().m_elements, 80);
        assert!(SweptVar::MElements.apply(&base, 80.5).is_err());
        assert!(SweptVar::GammaT.apply(&base, 0.0).is_err());
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
            assert_eq!(s.name().to_lowercase().parse::<Scheme>().unwrap(), s);
        }
        assert!("TDMA".parse::<Scheme>().is_err());
    }

    #[test]
    fn scenario_json() {
        let s = Scenario::from_json(
            r#"{"swept": {"variable": "m_elements", "values": [40, 20]}, "trials": 3,
                "base": {"gamma_t": 3, "gamma_r": 3}, "schemes": ["STAR-OMA", "cr-noma"]}"#,
        )
        .unwrap();
        assert_eq!(s.name, "custom");
        assert_eq!(s.schemes, vec![Scheme::StarOma, Scheme::CrNoma]);
        assert_eq!(s.base.mu_t, 0.6);
        assert!(Scenario::from_json(r#"{"swept": {"variable": "mu_t", "values": []}}"#).is_err());
        assert!(Scenario::from_json(
            r#"{"swept": {"variable": "mu_t", "values": [0.5]}, "trials": 0}"#
        )
        .is_err());
    }

    #[test]
    fn aggregate_statistics() {
        let outcomes = [Some((2.0, 1.0, 1.0)), None, Some((4.0, 3.0, 1.0))];
        let r = aggregate("mu_t", 0.5, Scheme::StarOma, &outcomes);
        assert_eq!(r.trials, 3);
        assert_eq!(r.infeasible_count, 1);
        assert_eq!(r.mean_d0, 3.0);
        assert!((r.std_d0 - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(r.mean_dt, 2.0);
        assert!((r.stderr_d0() - 1.0).abs() < 1e-15);
        let none = aggregate("mu_t", 0.5, Scheme::StarOma, &[None]);
        assert!(none.mean_d0.is_nan());
    }
}
