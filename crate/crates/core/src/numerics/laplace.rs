use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, numeric, Result};

/// Parameters of the trapezoidal Bromwich inversion with Euler summation.
///
/// The contour sits at `Re z = A/(2y)` and the cosine integral is sampled
/// with step `π/(2y)`, which makes the discretization error about `e^{-A}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionConfig {
    pub error_exponent: f64,
    /// Number of terms of the alternating series (partial sums `s_0..s_n`).
    pub partial_sums: usize,
    /// The last `m + 1` partial sums are binomially averaged.
    pub euler_terms: usize,
}

impl InversionConfig {
    pub fn new(error_exponent: f64, partial_sums: usize, euler_terms: usize) -> Result<Self> {
        let cfg = Self { error_exponent, partial_sums, euler_terms };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.error_exponent > 0.0) || !self.error_exponent.is_finite() {
            return Err(invalid(format!("error exponent must be positive, got {}", self.error_exponent)));
        }
        if self.euler_terms < 1 || self.partial_sums < self.euler_terms {
            return Err(invalid(format!(
                "need partial_sums >= euler_terms >= 1, got {} and {}",
                self.partial_sums, self.euler_terms
            )));
        }
        Ok(())
    }

    /// Abscissae `z_k = (A + 2kπi)/(2y)`, `k = 0..=n`, at which
    /// [`invert_laplace_ccdf`] samples the transform for argument `y`.
    pub fn abscissae(&self, y: f64) -> impl Iterator<Item = Complex64> {
        let a = self.error_exponent;
        (0..=self.partial_sums).map(move |k| Complex64::new(a, 2.0 * PI * k as f64) / (2.0 * y))
    }

    /// Combines transform values taken at [`Self::abscissae`] into the
    /// inverted value at `y`.
    pub fn combine(&self, y: f64, values: &[Complex64]) -> Result<f64> {
        let n = self.partial_sums;
        let m = self.euler_terms;
        debug_assert_eq!(values.len(), n + 1);
        let scale = (0.5 * self.error_exponent).exp() / y;
        let mut partial = 0.5 * values[0].re;
        let mut sums = Vec::with_capacity(m + 1);
        for (k, v) in values.iter().enumerate().skip(1) {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            partial += sign * v.re;
            if k >= n - m {
                sums.push(partial);
            }
        }
        if n == m {
            sums.insert(0, 0.5 * values[0].re);
        }
        // Binomial (Euler) average of s_{n-m}, ..., s_n.
        let mut weight = 0.5f64.powi(m as i32);
        let mut acc = 0.0;
        for (j, s) in sums.iter().enumerate() {
            acc += weight * s;
            weight *= (m - j) as f64 / (j + 1) as f64;
        }
        let v = scale * acc;
        if !v.is_finite() {
            return Err(numeric(format!("inverted value at y={y} is {v}")));
        }
        Ok(v.clamp(0.0, 1.0))
    }
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self { error_exponent: 18.4, partial_sums: 38, euler_terms: 11 }
    }
}

/// Recovers `G(y)` from the Laplace transform `Ĝ(z) = ∫_0^∞ e^{-zt} G(t) dt`
/// of a complementary CDF `G`, via the cosine form of the Bromwich integral
///
/// `G(y) = (2 e^{γy}/π) ∫_0^∞ Re Ĝ(γ + iu) cos(uy) du`
///
/// discretized by the trapezoidal rule and accelerated by Euler summation.
/// The result is clamped to `[0, 1]`.
pub fn invert_laplace_ccdf<F>(transform: F, y: f64, cfg: &InversionConfig) -> Result<f64>
where
    F: Fn(Complex64) -> Complex64,
{
    cfg.validate()?;
    if !(y > 0.0) || !y.is_finite() {
        return Err(invalid(format!("inversion point must be positive and finite, got {y}")));
    }
    let mut values = Vec::with_capacity(cfg.partial_sums + 1);
    for z in cfg.abscissae(y) {
        let v = transform(z);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(numeric(format!("transform is {v} at z = {z}")));
        }
        values.push(v);
    }
    cfg.combine(y, &values)
}
