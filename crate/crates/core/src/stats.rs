//! Empirical distributions, the one-sample Kolmogorov-Smirnov test and the
//! shadowing-strength sweep of lattice networks against the Poisson SIR law.

use std::f64::consts::PI;

use crate::analytic::SirLaw;
use crate::error::{invalid, Result};
use crate::model::{PropagationModel, ShadowingSpec};
use crate::numerics::InversionConfig;
use crate::simulate::{simulate_typical_users, PatternSpec};

/// Significance level of a single sweep test.
pub const SWEEP_ALPHA: f64 = 0.10;

const KS_TERM_CUTOFF: f64 = 1e-12;
/// Below this value of `√n·D` the theta-function form of the Kolmogorov
/// distribution converges faster than the alternating series.
const KS_SMALL_LAMBDA: f64 = 1.18;

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    /// Sorted copy of `samples`. NaNs are rejected.
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid("an empirical CDF needs at least one sample"));
        }
        if samples.iter().any(|x| x.is_nan()) {
            return Err(invalid("samples contain NaN"));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted_samples(&self) -> &[f64] {
        &self.sorted
    }

    /// `#{x_i ≤ x} / n`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&s| s <= x) as f64 / self.len() as f64
    }
}

pub fn empirical_cdf(samples: &[f64]) -> Result<EmpiricalCdf> {
    EmpiricalCdf::new(samples)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

impl KsResult {
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value > alpha
    }
}

/// One-sample Kolmogorov-Smirnov test of `ecdf` against `cdf`, with the
/// asymptotic p-value.
pub fn ks_test<F>(ecdf: &EmpiricalCdf, cdf: F) -> KsResult
where
    F: Fn(f64) -> f64,
{
    let xs = ecdf.sorted_samples();
    let n = xs.len();
    let nf = n as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < n {
        let x = xs[i];
        let mut j = i + 1;
        while j < n && xs[j] == x {
            j += 1;
        }
        let f = cdf(x).clamp(0.0, 1.0);
        d = d.max((j as f64 / nf - f).abs()).max((f - i as f64 / nf).abs());
        i = j;
    }
    KsResult { statistic: d, p_value: kolmogorov_p_value(nf.sqrt() * d), n }
}

/// `P(K > λ)` for the Kolmogorov distribution,
/// `2 Σ_{k≥1} (-1)^{k-1} e^{-2k²λ²}`.
pub fn kolmogorov_p_value(lambda: f64) -> f64 {
    if !(lambda > 0.0) {
        return 1.0;
    }
    if lambda < KS_SMALL_LAMBDA {
        // P(K ≤ λ) = (√(2π)/λ) Σ_{k≥1} e^{-(2k-1)²π²/(8λ²)}
        let scale = -PI * PI / (8.0 * lambda * lambda);
        let mut sum = 0.0;
        for k in 1.. {
            let m = (2 * k - 1) as f64;
            let term = (scale * m * m).exp();
            sum += term;
            if term < KS_TERM_CUTOFF * sum || term == 0.0 {
                break;
            }
        }
        return (1.0 - (2.0 * PI).sqrt() / lambda * sum).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1.. {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += sign * term;
        if term < KS_TERM_CUTOFF {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One row of [`convergence_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sigma_db: f64,
    /// Fraction of realizations whose K-S p-value exceeds [`SWEEP_ALPHA`].
    pub pass_fraction: f64,
    pub median_d: f64,
    pub realizations: usize,
    /// Per-realization test results, in realization order.
    pub tests: Vec<KsResult>,
}

/// For each shadowing strength, simulates `realizations` independent batches
/// of `samples` typical-user SIR values on `pattern` and K-S tests each
/// batch against the noise-free Poisson SIR law.
///
/// Every sample carries its own user position and shadowing draws. Batch
/// `r` of the `i`-th strength uses random stream `i * realizations + r`, so
/// the table depends on `seed` only.
pub fn convergence_sweep(
    pattern: &PatternSpec,
    prop: &PropagationModel,
    sigma_db_list: &[f64],
    realizations: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    if sigma_db_list.is_empty() {
        return Err(invalid("the sweep needs at least one shadowing strength"));
    }
    if sigma_db_list.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("shadowing strengths must be strictly ascending"));
    }
    if realizations == 0 || samples == 0 {
        return Err(invalid("realizations and samples must be positive"));
    }
    let reference = SirLaw::new(prop.beta, InversionConfig::default())?;
    let mut rows = Vec::with_capacity(sigma_db_list.len());
    for (i, &sigma_db) in sigma_db_list.iter().enumerate() {
        let shadow = ShadowingSpec::LogNormal { sigma_db };
        shadow.validate()?;
        let mut tests = Vec::with_capacity(realizations);
        for r in 0..realizations {
            let stream = (i * realizations + r) as u64;
            let sir: Vec<f64> = simulate_typical_users(pattern, prop, &shadow, samples, seed, stream)?
                .into_iter()
                .map(|s| s.sir)
                .collect();
            let ecdf = EmpiricalCdf::new(&sir)?;
            tests.push(ks_test(&ecdf, |t| reference.cdf(t)));
        }
        let passed = tests.iter().filter(|t| t.passes(SWEEP_ALPHA)).count();
        let mut ds: Vec<f64> = tests.iter().map(|t| t.statistic).collect();
        rows.push(SweepRow {
            sigma_db,
            pass_fraction: passed as f64 / realizations as f64,
            median_d: median(&mut ds),
            realizations,
            tests,
        });
    }
    Ok(rows)
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}
