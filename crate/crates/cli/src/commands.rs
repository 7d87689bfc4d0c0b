//! The four table-producing commands.

use std::f64::consts::LN_2;
use std::fmt::Write as _;

use cellgeom_core::analytic::{mean_energy_efficiency, sinr_ccdf, sinr_ccdf_explicit, sir_ccdf_explicit};
use cellgeom_core::simulate::simulate_typical_users;
use cellgeom_core::stats::convergence_sweep;
use cellgeom_core::{
    EmpiricalCdf, InversionConfig, PatternSpec, Result, ShadowingSpec, SinrLaw, SirLaw, TypicalUserSample,
};

use crate::config::RunConfig;
use crate::units::{db_to_linear, dbm_to_watts};

pub const DEFAULT_SIGMA_DB: [f64; 7] = [0.0, 3.0, 6.0, 9.0, 12.0, 15.0, 20.0];

// Random stream families of the simulated columns.
const STREAM_SHADOW: u64 = 0;
const STREAM_NO_SHADOW: u64 = 1;
const STREAM_POISSON: u64 = 2;

/// CSV text: a header, data rows and optional trailing `#` lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub comments: Vec<String>,
}

impl Table {
    fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new(), comments: Vec::new() }
    }

    /// Missing values become empty fields; numbers use the shortest
    /// representation that parses back to the same value.
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default()).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.header.iter().position(|h| *h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// `from, from + step, …` up to and including `to`.
fn db_grid(from: f64, to: f64, step: f64) -> Vec<f64> {
    let n = ((to - from) / step).round() as usize;
    (0..=n).map(|i| from + step * i as f64).collect()
}

fn sir_values(samples: &[TypicalUserSample]) -> Vec<f64> {
    samples.iter().map(|s| s.sir).collect()
}

fn simulate(
    cfg: &RunConfig,
    pattern: &PatternSpec,
    shadow: &ShadowingSpec,
    stream: u64,
) -> Result<Vec<TypicalUserSample>> {
    simulate_typical_users(pattern, &cfg.propagation(), shadow, cfg.samples, cfg.seed, stream)
}

/// Empirical SIR CDF on the configured pattern against the Poisson law.
pub fn fig_sir(cfg: &RunConfig) -> Result<Table> {
    let samples = simulate(cfg, &cfg.pattern_spec(), &cfg.shadowing(), STREAM_SHADOW)?;
    let ecdf = EmpiricalCdf::new(&sir_values(&samples))?;
    let law = SirLaw::new(cfg.beta, InversionConfig::default())?;
    let mut table = Table::new(vec!["sir_db", "cdf_hex_sim", "cdf_poisson_analytic", "cdf_explicit_eq13"]);
    for db in db_grid(-15.0, 30.0, 0.5) {
        let t = db_to_linear(db);
        let explicit = if t >= 1.0 { Some(1.0 - sir_ccdf_explicit(cfg.beta, t)?) } else { None };
        table.rows.push(vec![Some(db), Some(ecdf.eval(t)), Some(law.cdf(t)), explicit]);
    }
    Ok(table)
}

/// SINR CDFs at the configured transmit power.
pub fn fig_sinr(cfg: &RunConfig) -> Result<Table> {
    let prop = cfg.propagation();
    let shadow = cfg.shadowing();
    let with = |s: &[TypicalUserSample]| EmpiricalCdf::new(&s.iter().map(|x| x.sinr).collect::<Vec<_>>());
    let hex = with(&simulate(cfg, &cfg.pattern_spec(), &shadow, STREAM_SHADOW)?)?;
    let hex_plain = with(&simulate(cfg, &cfg.pattern_spec(), &ShadowingSpec::Unit, STREAM_NO_SHADOW)?)?;
    let poisson = with(&simulate(cfg, &cfg.poisson_spec(), &shadow, STREAM_POISSON)?)?;
    let law = SinrLaw::from_model(cfg.lambda_per_km2(), &prop, &shadow)?;
    let mut table = Table::new(vec![
        "sinr_db",
        "cdf_hex_shadow",
        "cdf_hex_noshadow",
        "cdf_poisson_finite",
        "cdf_poisson_infinite",
        "cdf_explicit_eq18",
    ]);
    for db in db_grid(-15.0, 30.0, 0.5) {
        let t = db_to_linear(db);
        let explicit = if t >= 1.0 { Some(1.0 - sinr_ccdf_explicit(&law, t)?) } else { None };
        table.rows.push(vec![
            Some(db),
            Some(hex.eval(t)),
            Some(hex_plain.eval(t)),
            Some(poisson.eval(t)),
            Some(1.0 - sinr_ccdf(&law, t)?),
            explicit,
        ]);
    }
    Ok(table)
}

/// Mean energy efficiency `W E[log₂(1 + SINR(P))]/(cP + d)` of simulated
/// users, in bits/s/W, reusing the same users at every power.
pub fn simulated_energy_efficiency(cfg: &RunConfig, samples: &[TypicalUserSample], power_w: f64) -> f64 {
    let prop = cfg.propagation();
    let n = prop.noise_w / power_w;
    let mean_nats = samples.iter().map(|s| s.sinr_with(n).ln_1p()).sum::<f64>() / samples.len() as f64;
    prop.bandwidth_hz * mean_nats / (LN_2 * prop.consumed_power(power_w))
}

fn argmax(xs: &[f64], ys: &[f64]) -> f64 {
    let (i, _) =
        ys.iter().enumerate().fold((0, f64::NEG_INFINITY), |best, (i, &y)| if y > best.1 { (i, y) } else { best });
    xs[i]
}

pub fn default_power_grid() -> Vec<f64> {
    db_grid(30.0, 80.0, 1.0)
}

/// Energy efficiency against transmit power, plus a trailing line with the
/// grid argmax of each curve.
pub fn fig_energy(cfg: &RunConfig, grid_dbm: &[f64]) -> Result<Table> {
    let prop = cfg.propagation();
    let shadow = cfg.shadowing();
    let hex = simulate(cfg, &cfg.pattern_spec(), &shadow, STREAM_SHADOW)?;
    let hex_plain = simulate(cfg, &cfg.pattern_spec(), &ShadowingSpec::Unit, STREAM_NO_SHADOW)?;
    let law = SinrLaw::from_model(cfg.lambda_per_km2(), &prop, &shadow)?;
    let mut table = Table::new(vec!["P_dbm", "ee_hex_shadow_sim", "ee_hex_noshadow_sim", "ee_poisson_analytic"]);
    let mut cols: [Vec<f64>; 3] = Default::default();
    for &dbm in grid_dbm {
        let p = dbm_to_watts(dbm);
        let values = [
            simulated_energy_efficiency(cfg, &hex, p),
            simulated_energy_efficiency(cfg, &hex_plain, p),
            mean_energy_efficiency(&law, &prop, p)?,
        ];
        for (c, v) in cols.iter_mut().zip(values) {
            c.push(v);
        }
        table.rows.push(vec![Some(dbm), Some(values[0]), Some(values[1]), Some(values[2])]);
    }
    table.comments.push(format!(
        "argmax_dbm ee_hex_shadow_sim={} ee_hex_noshadow_sim={} ee_poisson_analytic={}",
        argmax(grid_dbm, &cols[0]),
        argmax(grid_dbm, &cols[1]),
        argmax(grid_dbm, &cols[2]),
    ));
    Ok(table)
}

/// The shadowing-strength sweep on the configured pattern.
pub fn converge(cfg: &RunConfig, sigma_db: &[f64]) -> Result<Table> {
    let rows =
        convergence_sweep(&cfg.pattern_spec(), &cfg.propagation(), sigma_db, cfg.realizations, cfg.samples, cfg.seed)?;
    let mut table = Table::new(vec!["sigma_db", "pass_fraction", "median_ks_d", "realizations"]);
    for r in rows {
        table.rows.push(vec![Some(r.sigma_db), Some(r.pass_fraction), Some(r.median_d), Some(r.realizations as f64)]);
    }
    Ok(table)
}
