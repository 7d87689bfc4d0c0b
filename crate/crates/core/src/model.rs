//! Physical parameters and the equivalent Poisson intensity of the
//! propagation-loss process seen by the typical user.
//!
//! Units are fixed: distances in km, powers in watts, bandwidth in Hz. The
//! only decibel quantity accepted here is the shadowing spread `sigma_db`.

use std::f64::consts::{LN_10, PI};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};

/// Natural-log standard deviation of a log-normal variable whose decibel
/// spread is `sigma_db`.
pub fn sigma_from_db(sigma_db: f64) -> f64 {
    sigma_db * LN_10 / 10.0
}

/// Distance loss `(K|x|)^β`, transmit/noise powers and the affine
/// consumed-power model `P' = cP + d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationModel {
    /// Path-gain constant `K`, km⁻¹.
    pub k_per_km: f64,
    /// Path-loss exponent, strictly above 2.
    pub beta: f64,
    pub noise_w: f64,
    pub power_w: f64,
    pub bandwidth_hz: f64,
    /// Slope of the consumed-power model.
    pub power_slope: f64,
    /// Offset of the consumed-power model, W.
    pub power_offset_w: f64,
}

impl PropagationModel {
    /// Urban macro-cell setting: COST-Hata distance loss (`K = 4250 km⁻¹`,
    /// `β = 3.52`), `N = -93 dBm`, `P = 58.5 dBm`, `W = 10 MHz`,
    /// `c = 21.45`, `d = 354.44 W`.
    pub fn urban_macro() -> Self {
        Self {
            k_per_km: 4250.0,
            beta: 3.52,
            noise_w: 10f64.powf(-93.0 / 10.0) * 1e-3,
            power_w: 10f64.powf(58.5 / 10.0) * 1e-3,
            bandwidth_hz: 10e6,
            power_slope: 21.45,
            power_offset_w: 354.44,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let Self { k_per_km, beta, noise_w, power_w, bandwidth_hz, power_slope, power_offset_w } = *self;
        if !(beta > 2.0) || !beta.is_finite() {
            return Err(invalid(format!("path-loss exponent must exceed 2, got {beta}")));
        }
        if !(k_per_km > 0.0) || !k_per_km.is_finite() {
            return Err(invalid(format!("K must be positive, got {k_per_km}")));
        }
        if !(noise_w >= 0.0) || !noise_w.is_finite() {
            return Err(invalid(format!("noise power must be >= 0, got {noise_w}")));
        }
        if !(power_w > 0.0) || !power_w.is_finite() {
            return Err(invalid(format!("transmit power must be positive, got {power_w}")));
        }
        if !(bandwidth_hz > 0.0) || !bandwidth_hz.is_finite() {
            return Err(invalid(format!("bandwidth must be positive, got {bandwidth_hz}")));
        }
        if !(power_slope > 0.0) {
            return Err(invalid(format!("power slope c must be positive, got {power_slope}")));
        }
        if !(power_offset_w >= 0.0) {
            return Err(invalid(format!("power offset d must be >= 0, got {power_offset_w}")));
        }
        Ok(())
    }

    /// `N/P`, the noise term entering `SINR = 1/(N L / P + f)`.
    pub fn noise_over_power(&self) -> f64 {
        self.noise_w / self.power_w
    }

    pub fn with_power(&self, power_w: f64) -> Self {
        Self { power_w, ..*self }
    }

    pub fn with_k(&self, k_per_km: f64) -> Self {
        Self { k_per_km, ..*self }
    }

    /// Consumed power `cP + d` for emitted power `P`.
    pub fn consumed_power(&self, power_w: f64) -> f64 {
        self.power_slope * power_w + self.power_offset_w
    }

    pub fn distance_loss(&self, distance_km: f64) -> f64 {
        (self.k_per_km * distance_km).powf(self.beta)
    }
}

/// Distribution of the iid shadowing/fading variables `S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShadowingSpec {
    /// `S ≡ 1`.
    Unit,
    /// `S = exp(-σ²/2 + σZ)` with `σ = sigma_db·ln10/10`, so `E[S] = 1`.
    LogNormal { sigma_db: f64 },
    /// Only `E[S^{2/β}]` is given. Sampling uses the constant shadowing with
    /// that moment, `S ≡ m^{β/2}`.
    RawMoment { moment_2_over_beta: f64 },
}

impl ShadowingSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ShadowingSpec::Unit => Ok(()),
            ShadowingSpec::LogNormal { sigma_db } if sigma_db >= 0.0 && sigma_db.is_finite() => Ok(()),
            ShadowingSpec::LogNormal { sigma_db } => {
                Err(invalid(format!("sigma_db must be finite and >= 0, got {sigma_db}")))
            }
            ShadowingSpec::RawMoment { moment_2_over_beta: m } if m > 0.0 && m.is_finite() => Ok(()),
            ShadowingSpec::RawMoment { moment_2_over_beta: m } => {
                Err(invalid(format!("2/beta moment must be positive, got {m}")))
            }
        }
    }

    /// `E[S^{2/β}]`.
    pub fn moment_2_over_beta(&self, beta: f64) -> Result<f64> {
        self.validate()?;
        match *self {
            ShadowingSpec::Unit => check_beta(beta).map(|_| 1.0),
            ShadowingSpec::LogNormal { sigma_db } => lognormal_moment(sigma_db, beta),
            ShadowingSpec::RawMoment { moment_2_over_beta } => check_beta(beta).map(|_| moment_2_over_beta),
        }
    }

    /// Natural-log spread `σ`; zero for non-log-normal kinds.
    pub fn sigma(&self) -> f64 {
        match *self {
            ShadowingSpec::LogNormal { sigma_db } => sigma_from_db(sigma_db),
            _ => 0.0,
        }
    }

    /// Returns a sampler for `ln S`; `beta` is only needed by the
    /// raw-moment kind.
    pub fn log_sampler(&self, beta: f64) -> Result<LogShadowSampler> {
        self.validate()?;
        Ok(match *self {
            ShadowingSpec::Unit => LogShadowSampler { mean: 0.0, sigma: 0.0 },
            ShadowingSpec::LogNormal { sigma_db } => {
                let sigma = sigma_from_db(sigma_db);
                LogShadowSampler { mean: -0.5 * sigma * sigma, sigma }
            }
            ShadowingSpec::RawMoment { moment_2_over_beta } => {
                check_beta(beta)?;
                LogShadowSampler { mean: 0.5 * beta * moment_2_over_beta.ln(), sigma: 0.0 }
            }
        })
    }
}

/// Draws `ln S = mean + σZ` with `Z` standard normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogShadowSampler {
    mean: f64,
    sigma: f64,
}

impl LogShadowSampler {
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.sigma == 0.0 {
            self.mean
        } else {
            let z: f64 = rng.sample(StandardNormal);
            self.mean + self.sigma * z
        }
    }
}

/// Intensity constant `a` of `Λ([0, t)) = a t^{2/β}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalentPoisson {
    pub a: f64,
    pub beta: f64,
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 2.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("path-loss exponent must exceed 2, got {beta}")))
    }
}

/// `E[S^{2/β}] = exp(σ²(2-β)/β²)` for mean-one log-normal shadowing.
pub fn lognormal_moment(sigma_db: f64, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if !(sigma_db >= 0.0) || !sigma_db.is_finite() {
        return Err(invalid(format!("sigma_db must be finite and >= 0, got {sigma_db}")));
    }
    let sigma = sigma_from_db(sigma_db);
    Ok((sigma * sigma * (2.0 - beta) / (beta * beta)).exp())
}

/// `a = λπ E[S^{2/β}] / K²`.
pub fn equivalent_poisson(
    lambda_per_km2: f64,
    prop: &PropagationModel,
    shadow: &ShadowingSpec,
) -> Result<EquivalentPoisson> {
    prop.validate()?;
    if !(lambda_per_km2 > 0.0) || !lambda_per_km2.is_finite() {
        return Err(invalid(format!("intensity must be positive, got {lambda_per_km2}")));
    }
    let moment = shadow.moment_2_over_beta(prop.beta)?;
    let k = prop.k_per_km;
    Ok(EquivalentPoisson { a: lambda_per_km2 * PI * moment / (k * k), beta: prop.beta })
}

/// `K̃ = K / √E[S^{2/β}]`: the network without shadowing and constant `K̃`
/// has the same propagation-loss process as the shadowed one.
pub fn effective_k(prop: &PropagationModel, shadow: &ShadowingSpec) -> Result<f64> {
    prop.validate()?;
    let moment = shadow.moment_2_over_beta(prop.beta)?;
    Ok(prop.k_per_km / moment.sqrt())
}

/// `K(σ) = K exp(-σ²(β-2)/(2β²))`, which offsets the moment of log-normal
/// shadowing of spread `σ` so that the intensity constant stays `λπ/K²`.
pub fn k_sigma(k_per_km: f64, beta: f64, sigma: f64) -> Result<f64> {
    check_beta(beta)?;
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(invalid(format!("sigma must be finite and >= 0, got {sigma}")));
    }
    if !(k_per_km > 0.0) {
        return Err(invalid(format!("K must be positive, got {k_per_km}")));
    }
    Ok(k_per_km * (-sigma * sigma * (beta - 2.0) / (2.0 * beta * beta)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit_model(k: f64, beta: f64) -> PropagationModel {
        PropagationModel { k_per_km: k, beta, ..PropagationModel::urban_macro() }
    }

    #[test]
    fn lognormal_moment_examples() {
        assert_eq!(lognormal_moment(0.0, 3.52).unwrap(), 1.0);
        assert_relative_eq!(lognormal_moment(12.0, 3.52).unwrap(), 0.39195, epsilon = 1e-4);
        assert_relative_eq!(lognormal_moment(30.0, 2.0 + 1e-12).unwrap(), 1.0, epsilon = 1e-9);
        assert!(lognormal_moment(12.0, 2.0).is_err());
        assert!(lognormal_moment(12.0, 1.5).is_err());
    }

    #[test]
    fn sigma_conversion() {
        assert_relative_eq!(sigma_from_db(12.0), 2.763_102, epsilon = 1e-6);
    }

    #[test]
    fn equivalent_poisson_examples() {
        let a = equivalent_poisson(1.0, &unit_model(1.0, 4.0), &ShadowingSpec::Unit).unwrap();
        assert_relative_eq!(a.a, PI, max_relative = 1e-15);

        let lambda = 1.0 / (PI * 0.26 * 0.26);
        assert_relative_eq!(lambda, 4.708_72, epsilon = 1e-5);
        let p = PropagationModel::urban_macro();
        let a = equivalent_poisson(lambda, &p, &ShadowingSpec::LogNormal { sigma_db: 12.0 }).unwrap();
        assert_relative_eq!(a.a, 3.210e-7, max_relative = 1e-3);

        let a2 = equivalent_poisson(2.0 * lambda, &p, &ShadowingSpec::LogNormal { sigma_db: 12.0 }).unwrap();
        assert_relative_eq!(a2.a, 2.0 * a.a, max_relative = 1e-15);
    }

    #[test]
    fn effective_k_examples() {
        let p = PropagationModel::urban_macro();
        assert_eq!(effective_k(&p, &ShadowingSpec::Unit).unwrap(), p.k_per_km);
        let k = effective_k(&p, &ShadowingSpec::RawMoment { moment_2_over_beta: 4.0 }).unwrap();
        assert_relative_eq!(k, p.k_per_km / 2.0, max_relative = 1e-15);
        let k = effective_k(&p, &ShadowingSpec::LogNormal { sigma_db: 12.0 }).unwrap();
        assert_relative_eq!(k, 6788.6, max_relative = 1e-4);
    }

    #[test]
    fn k_sigma_examples() {
        assert_eq!(k_sigma(4250.0, 3.52, 0.0).unwrap(), 4250.0);
        assert_relative_eq!(k_sigma(1.0, 4.0, 2.0).unwrap(), (-0.25f64).exp(), max_relative = 1e-15);
        assert!(k_sigma(1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn raw_moment_sampler_reproduces_moment() {
        let beta = 3.52;
        let spec = ShadowingSpec::RawMoment { moment_2_over_beta: 0.3 };
        let ln_s = spec.log_sampler(beta).unwrap().sample(&mut rand::rng());
        assert_relative_eq!((2.0 / beta * ln_s).exp(), 0.3, max_relative = 1e-14);
    }

    #[test]
    fn equal_moments_give_identical_intensity() {
        let p = PropagationModel::urban_macro();
        let m = lognormal_moment(12.0, p.beta).unwrap();
        let ln = equivalent_poisson(3.0, &p, &ShadowingSpec::LogNormal { sigma_db: 12.0 }).unwrap();
        let raw = equivalent_poisson(3.0, &p, &ShadowingSpec::RawMoment { moment_2_over_beta: m }).unwrap();
        assert_eq!(ln.a.to_bits(), raw.a.to_bits());
    }

    proptest! {
        #[test]
        fn effective_k_with_unit_shadowing_keeps_a(
            sigma_db in 0.0f64..30.0, beta in 2.05f64..6.0, k in 1.0f64..1e4, lambda in 0.01f64..100.0
        ) {
            let p = unit_model(k, beta);
            let shadow = ShadowingSpec::LogNormal { sigma_db };
            let a = equivalent_poisson(lambda, &p, &shadow).unwrap().a;
            let k_eff = effective_k(&p, &shadow).unwrap();
            let a_eff = equivalent_poisson(lambda, &p.with_k(k_eff), &ShadowingSpec::Unit).unwrap().a;
            prop_assert!((a - a_eff).abs() <= 1e-12 * a);
        }

        #[test]
        fn k_sigma_compensates_moment(sigma_db in 0.0f64..30.0, beta in 2.05f64..6.0, k in 1.0f64..1e4) {
            let sigma = sigma_from_db(sigma_db);
            let ks = k_sigma(k, beta, sigma).unwrap();
            let lhs = PI / (ks * ks) * lognormal_moment(sigma_db, beta).unwrap();
            let rhs = PI / (k * k);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }
    }
}
