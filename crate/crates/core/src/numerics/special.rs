use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, numeric, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Terms of the `gamma_star` power series stop once the next one is below
/// this fraction of the partial sum.
const SERIES_REL_CUTOFF: f64 = 1e-15;
const SERIES_MAX_TERMS: usize = 200;

const CF_EPS: f64 = 4.0 * f64::EPSILON;
const CF_MAX_ITER: usize = 10_000;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Euler's Gamma function on the real line (Lanczos, `g = 7`), with the
/// reflection formula below `x = 1/2`.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain(format!("gamma of non-finite argument {x}")));
    }
    if is_nonpositive_integer(x) {
        return Err(domain(format!("gamma has a pole at {x}")));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma_unchecked(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS_COEF[0];
        for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
    }
}

/// `1/Γ(α+1)`, which is entire; zero at the poles of Γ.
fn recip_gamma_shifted(alpha: f64) -> f64 {
    let x = alpha + 1.0;
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / gamma_unchecked(x)
    }
}

fn check_star_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() {
        return Err(domain(format!("gamma_star order {alpha} is not finite")));
    }
    if alpha <= -1.0 && alpha == alpha.floor() {
        return Err(domain(format!("gamma_star order {alpha} is a negative integer")));
    }
    Ok(())
}

/// Power series `e^{-z} Σ_k z^k / Γ(α+k+1)` of the modified incomplete gamma
/// function. Accurate as long as `|z| - Re z` is small; see
/// [`gamma_star_complex`] for the general case.
fn gamma_star_series(alpha: f64, z: Complex64) -> Result<Complex64> {
    let mut term = Complex64::new(recip_gamma_shifted(alpha), 0.0);
    let mut sum = term;
    for k in 1..SERIES_MAX_TERMS {
        term = term * z / (alpha + k as f64);
        sum += term;
        if term.norm() < SERIES_REL_CUTOFF * sum.norm() {
            return Ok((-z).exp() * sum);
        }
    }
    if term.norm() == 0.0 {
        return Ok((-z).exp() * sum);
    }
    Err(numeric(format!("gamma_star series for alpha={alpha}, z={z} did not converge in {SERIES_MAX_TERMS} terms")))
}

/// Continued fraction for the upper incomplete gamma function, returned in
/// the scaled form `h = Γ(a, z) e^{z} z^{-a}`. Converges for `Re z > 0`,
/// quickly once `|z|` is beyond a few units.
pub(crate) fn upper_gamma_cf_scaled(a: f64, z: Complex64) -> Result<Complex64> {
    const TINY: f64 = 1e-300;
    let mut b = z + 1.0 - a;
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = if b.norm() < TINY { Complex64::new(1.0 / TINY, 0.0) } else { b.inv() };
    let mut h = d;
    for i in 1..=CF_MAX_ITER {
        let i = i as f64;
        let an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if d.norm() < TINY {
            d = Complex64::new(TINY, 0.0);
        }
        c = b + an / c;
        if c.norm() < TINY {
            c = Complex64::new(TINY, 0.0);
        }
        d = d.inv();
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).norm() < CF_EPS {
            return Ok(h);
        }
    }
    Err(numeric(format!("incomplete gamma continued fraction for a={a}, z={z} did not converge")))
}

/// Upper incomplete gamma `Γ(a, z)` for real `a` and `Re z > 0`.
pub fn upper_gamma_complex(a: f64, z: Complex64) -> Result<Complex64> {
    let h = upper_gamma_cf_scaled(a, z)?;
    Ok((-z).exp() * z.powf(a) * h)
}

/// Whether the series for `gamma_star` can be summed at `z` without
/// losing more than a few digits to cancellation.
pub(crate) fn series_is_safe(z: Complex64) -> bool {
    let r = z.norm();
    r <= 50.0 && r - z.re <= 3.0
}

/// Modified incomplete gamma function
/// `γ*(α, z) = z^{-α} γ(α, z) / Γ(α) = e^{-z} Σ_{k≥0} z^k / Γ(α+k+1)`
/// for real `z ≥ 0`, summed from its power series.
///
/// Validated for `z ≤ 50`; beyond that the 200-term series may fail to
/// converge and an error is returned.
pub fn gamma_star(alpha: f64, z: f64) -> Result<f64> {
    check_star_alpha(alpha)?;
    if !(z >= 0.0) || !z.is_finite() {
        return Err(domain(format!("gamma_star argument {z} must be finite and >= 0")));
    }
    gamma_star_series(alpha, Complex64::new(z, 0.0)).map(|v| v.re)
}

/// `γ*(α, z)` at complex `z`. Uses the power series near the positive real
/// axis and the upper-gamma continued fraction elsewhere (`Re z > 0` needed
/// there). Requires `α > -1` on the continued-fraction branch when `α` is
/// not positive, as the relation through `Γ(α)` is used.
pub fn gamma_star_complex(alpha: f64, z: Complex64) -> Result<Complex64> {
    check_star_alpha(alpha)?;
    if series_is_safe(z) {
        return gamma_star_series(alpha, z);
    }
    if z.re <= 0.0 {
        return Err(domain(format!("gamma_star continued fraction needs Re z > 0, got {z}")));
    }
    if alpha == 0.0 {
        // γ*(0, z) = 1 identically.
        return Ok(Complex64::new(1.0, 0.0));
    }
    // γ(α,z) = Γ(α) - Γ(α,z), so γ* = 1/z^α·(1/Γ(α))·(Γ(α) - Γ(α,z)).
    let h = upper_gamma_cf_scaled(alpha, z)?;
    let g = gamma_fn(alpha)?;
    let z_neg_alpha = z.powf(-alpha);
    Ok(z_neg_alpha - (-z).exp() * h / g)
}

/// Lower incomplete gamma `γ(α, z) = ∫_0^z t^{α-1} e^{-t} dt` for `α > 0`.
pub fn lower_gamma(alpha: f64, z: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(domain(format!("lower_gamma needs alpha > 0, got {alpha}")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let g = gamma_fn(alpha)?;
    let star = if z <= 50.0 { gamma_star(alpha, z)? } else { gamma_star_complex(alpha, Complex64::new(z, 0.0))?.re };
    Ok(g * z.powf(alpha) * star)
}

/// Complementary error function, via `erfc(x) = Γ(1/2, x²)/√π`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x > 27.0 {
        return 0.0;
    }
    let z = x * x;
    if z < 2.0 {
        // erf(x) = x γ*(1/2, x²)
        let star = gamma_star_series(0.5, Complex64::new(z, 0.0)).expect("series converges for small arguments").re;
        1.0 - x * star
    } else {
        let h = upper_gamma_cf_scaled(0.5, Complex64::new(z, 0.0))
            .expect("continued fraction converges on the positive axis")
            .re;
        (-z).exp() * x * h / PI.sqrt()
    }
}

/// Standard Gaussian CDF.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn gamma_known_values() {
        assert_relative_eq!(gamma_fn(1.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(gamma_fn(0.5).unwrap(), PI.sqrt(), max_relative = 1e-13);
        // Γ(4.5) = 3.5·2.5·1.5·0.5·√π
        let expected = 3.5 * 2.5 * 1.5 * 0.5 * PI.sqrt();
        assert_relative_eq!(gamma_fn(4.5).unwrap(), expected, max_relative = 1e-13);
        assert_relative_eq!(gamma_fn(4.5).unwrap(), 11.631_728_396_567_448, max_relative = 1e-12);
        assert_relative_eq!(gamma_fn(10.0).unwrap(), 362_880.0, max_relative = 1e-13);
        // Γ(-1/2) = -2√π
        assert_relative_eq!(gamma_fn(-0.5).unwrap(), -2.0 * PI.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn gamma_poles_are_rejected() {
        for x in [0.0, -1.0, -2.0, -17.0] {
            assert!(matches!(gamma_fn(x), Err(crate::Error::Domain(_))));
        }
    }

    #[test]
    fn gamma_star_examples() {
        let g15 = gamma_fn(1.5).unwrap();
        assert_relative_eq!(gamma_star(0.5, 0.0).unwrap(), 1.0 / g15, max_relative = 1e-14);
        assert_relative_eq!(gamma_star(0.5, 0.0).unwrap(), std::f64::consts::FRAC_2_SQRT_PI, max_relative = 1e-14);
        let z: f64 = 2.0;
        assert_relative_eq!(gamma_star(1.0, z).unwrap(), (1.0 - (-z).exp()) / z, max_relative = 1e-14);
    }

    #[test]
    fn gamma_star_negative_half_at_one() {
        // γ*(-1/2, 1) = e^{-1} Σ 1/Γ(k + 1/2). Summed independently here.
        let mut sum = 0.0;
        for k in 0..60 {
            sum += 1.0 / gamma_fn(k as f64 + 0.5).unwrap();
        }
        let expected = (-1.0f64).exp() * sum;
        assert_relative_eq!(gamma_star(-0.5, 1.0).unwrap(), expected, max_relative = 1e-13);
        assert_relative_eq!(expected, 1.050_25, max_relative = 1e-5);
    }

    #[test]
    fn gamma_star_rejects_negative_integer_order() {
        assert!(gamma_star(-1.0, 1.0).is_err());
        assert!(gamma_star(-3.0, 0.5).is_err());
        assert!(gamma_star(0.5, -1.0).is_err());
    }

    #[test]
    fn gamma_star_branches_agree() {
        // Both representations are valid in the overlap.
        for &alpha in &[-0.8, -0.5, -0.2, 0.3, 1.7] {
            for &(re, im) in &[(3.0, 2.0), (5.0, -4.0), (10.0, 6.0), (20.0, 3.0)] {
                let z = Complex64::new(re, im);
                let s = gamma_star_series(alpha, z).unwrap();
                let h = upper_gamma_cf_scaled(alpha, z).unwrap();
                let cf = z.powf(-alpha) - (-z).exp() * h / gamma_fn(alpha).unwrap();
                assert!((s - cf).norm() < 1e-11 * s.norm(), "alpha={alpha} z={z}: {s} vs {cf}");
            }
        }
    }

    #[test]
    fn normal_cdf_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert_eq!(std_normal_cdf(40.0), 1.0);
        assert_relative_eq!(std_normal_cdf(1.0), 0.841_344_746_068_542_9, epsilon = 1e-14);
        assert_relative_eq!(std_normal_cdf(-3.0), 1.349_898_031_630_094_6e-3, max_relative = 1e-12);
        assert_relative_eq!(std_normal_cdf(-10.0), 7.619_853_024_160_527e-24, max_relative = 1e-10);
        assert_relative_eq!(erfc(1.0), 0.157_299_207_050_285_13, max_relative = 1e-13);
    }

    proptest! {
        #[test]
        fn normal_cdf_symmetry(x in -12.0f64..12.0) {
            let s = std_normal_cdf(x) + std_normal_cdf(-x);
            prop_assert!((s - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn gamma_recurrence(x in 0.1f64..20.0) {
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs());
        }
    }
}
