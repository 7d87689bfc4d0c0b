//! `key = value` run configuration.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use cellgeom_core::{PatternSpec, PropagationModel, ShadowingSpec};

use crate::units::dbm_to_watts;

const KEYS: &[&str] = &[
    "k_per_km",
    "beta",
    "sigma_db",
    "lambda_per_km2",
    "cell_radius_km",
    "n_side",
    "noise_dbm",
    "power_dbm",
    "bandwidth_hz",
    "c",
    "d_watts",
    "seed",
    "realizations",
    "samples",
    "pattern",
    "displacement_km",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternKey {
    Hex,
    Poisson,
    PerturbedHex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub k_per_km: f64,
    pub beta: f64,
    pub sigma_db: f64,
    pub cell_radius_km: f64,
    pub n_side: usize,
    pub noise_dbm: f64,
    pub power_dbm: f64,
    pub bandwidth_hz: f64,
    pub c: f64,
    pub d_watts: f64,
    pub seed: u64,
    pub realizations: usize,
    pub samples: usize,
    pub pattern: PatternKey,
    pub displacement_km: f64,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        text.parse()
    }

    pub fn propagation(&self) -> PropagationModel {
        PropagationModel {
            k_per_km: self.k_per_km,
            beta: self.beta,
            noise_w: dbm_to_watts(self.noise_dbm),
            power_w: dbm_to_watts(self.power_dbm),
            bandwidth_hz: self.bandwidth_hz,
            power_slope: self.c,
            power_offset_w: self.d_watts,
        }
    }

    pub fn shadowing(&self) -> ShadowingSpec {
        ShadowingSpec::LogNormal { sigma_db: self.sigma_db }
    }

    /// Stations per km², from the equal-area cell radius.
    pub fn lambda_per_km2(&self) -> f64 {
        1.0 / (PI * self.cell_radius_km * self.cell_radius_km)
    }

    /// The configured lattice-like pattern.
    pub fn pattern_spec(&self) -> PatternSpec {
        match self.pattern {
            PatternKey::Hex => self.hex_spec(),
            PatternKey::Poisson => self.poisson_spec(),
            PatternKey::PerturbedHex => PatternSpec::PerturbedHexagonal {
                cell_radius_km: self.cell_radius_km,
                n_side: self.n_side,
                displacement_km: self.displacement_km,
            },
        }
    }

    pub fn hex_spec(&self) -> PatternSpec {
        PatternSpec::Hexagonal { cell_radius_km: self.cell_radius_km, n_side: self.n_side }
    }

    /// Poisson stations of the same density on the same torus.
    pub fn poisson_spec(&self) -> PatternSpec {
        PatternSpec::poisson_like_hex(self.cell_radius_km, self.n_side)
    }
}

impl std::str::FromStr for RunConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        let mut map: HashMap<&str, (usize, &str)> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!("line {}: expected `key = value`", i + 1));
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return err(format!("line {}: unknown key `{key}`", i + 1));
            }
            if map.insert(key, (i + 1, value)).is_some() {
                return err(format!("line {}: duplicate key `{key}`", i + 1));
            }
        }
        let fields = Fields { map };
        let cell_radius_km = match (fields.opt_f64("cell_radius_km")?, fields.opt_f64("lambda_per_km2")?) {
            (Some(_), Some(_)) => return err("give either cell_radius_km or lambda_per_km2, not both"),
            (Some(r), None) => r,
            (None, Some(l)) if l > 0.0 => 1.0 / (PI * l).sqrt(),
            (None, Some(l)) => return err(format!("lambda_per_km2 must be positive, got {l}")),
            (None, None) => return err("missing key `cell_radius_km` (or `lambda_per_km2`)"),
        };
        let pattern = match fields.opt_str("pattern").unwrap_or("hex") {
            "hex" => PatternKey::Hex,
            "poisson" => PatternKey::Poisson,
            "perturbed-hex" => PatternKey::PerturbedHex,
            other => return err(format!("pattern must be hex, poisson or perturbed-hex, got `{other}`")),
        };
        let cfg = RunConfig {
            k_per_km: fields.f64("k_per_km")?,
            beta: fields.f64("beta")?,
            sigma_db: fields.f64("sigma_db")?,
            cell_radius_km,
            n_side: fields.usize("n_side")?,
            noise_dbm: fields.f64("noise_dbm")?,
            power_dbm: fields.f64("power_dbm")?,
            bandwidth_hz: fields.f64("bandwidth_hz")?,
            c: fields.f64("c")?,
            d_watts: fields.f64("d_watts")?,
            seed: fields.opt_parse("seed")?.unwrap_or(0),
            realizations: fields.opt_parse("realizations")?.unwrap_or(10),
            samples: fields.opt_parse("samples")?.unwrap_or(10_000),
            pattern,
            displacement_km: fields.opt_f64("displacement_km")?.unwrap_or(0.0),
        };
        cfg.check()?;
        Ok(cfg)
    }
}

impl RunConfig {
    fn check(&self) -> Result<(), ConfigError> {
        if !(self.cell_radius_km > 0.0) || !self.cell_radius_km.is_finite() {
            return err(format!("cell radius must be positive, got {}", self.cell_radius_km));
        }
        if self.n_side < 2 || !self.n_side.is_multiple_of(2) {
            return err(format!("n_side must be even and at least 2, got {}", self.n_side));
        }
        if !(self.sigma_db >= 0.0) || !self.sigma_db.is_finite() {
            return err(format!("sigma_db must be finite and >= 0, got {}", self.sigma_db));
        }
        if !(self.displacement_km >= 0.0) || !self.displacement_km.is_finite() {
            return err(format!("displacement_km must be finite and >= 0, got {}", self.displacement_km));
        }
        if self.realizations == 0 || self.samples == 0 {
            return err("realizations and samples must be positive");
        }
        self.propagation().validate().map_err(|e| ConfigError(e.to_string()))
    }
}

struct Fields<'a> {
    map: HashMap<&'a str, (usize, &'a str)>,
}

impl Fields<'_> {
    fn opt_str(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|&(_, v)| v)
    }

    fn opt_parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.map.get(key) {
            None => Ok(None),
            Some(&(line, v)) => {
                v.parse().map(Some).map_err(|_| ConfigError(format!("line {line}: cannot parse `{v}` for `{key}`")))
            }
        }
    }

    fn opt_f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.opt_parse::<f64>(key)? {
            Some(v) if !v.is_finite() => err(format!("`{key}` must be finite, got {v}")),
            other => Ok(other),
        }
    }

    fn f64(&self, key: &str) -> Result<f64, ConfigError> {
        self.opt_f64(key)?.ok_or_else(|| ConfigError(format!("missing key `{key}`")))
    }

    fn usize(&self, key: &str) -> Result<usize, ConfigError> {
        self.opt_parse(key)?.ok_or_else(|| ConfigError(format!("missing key `{key}`")))
    }
}
