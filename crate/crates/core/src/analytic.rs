//! Distributions of the typical user in the infinite Poisson model.
//!
//! Everything is expressed through the intensity constant `a` of the
//! propagation-loss process and the exponent `β`. The path-loss factor `L`
//! (minimum loss) is Fréchet; the interference factor `f = 1/SIR` is known
//! through its Laplace transform `1/φ_β`; the SINR law comes from inverting
//! the transform of `f` conditionally on `L` and integrating over `L`.
//!
//! Efficiencies are computed in nats internally; [`mean_energy_efficiency`]
//! reports bits/s/W.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{domain, invalid, Result};
use crate::model::{equivalent_poisson, EquivalentPoisson, PropagationModel, ShadowingSpec};
use crate::numerics::{
    gamma_fn, gamma_star, gamma_star_complex, try_integrate_unit_interval, try_integrate_unit_interval_with_floor,
    try_maximize_scalar, InversionConfig, QuadratureConfig,
};

/// Ratio below which the integrand of the explicit SINR tail is dropped.
const EXPLICIT_TRUNCATION: f64 = 1e-12;
/// Spectral-efficiency integral stops where the SINR tail drops below this.
const SE_TAIL_CUTOFF: f64 = 1e-8;
const Y_CDF_C_MAX: f64 = 48.0;
/// The inverted conditional CDF is itself only good to about `1e-8`.
const Y_CDF_PANEL_ABS_TOL: f64 = 1e-8;
const Y_CDF_PANELS: [f64; 8] = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, Y_CDF_C_MAX];

fn check_beta(beta: f64) -> Result<()> {
    if beta > 2.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("path-loss exponent must exceed 2, got {beta}")))
    }
}

/// Law of the path-loss factor: `P(L ≤ t) = 1 - exp(-a t^{2/β})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossLaw {
    pub a: f64,
    pub beta: f64,
}

impl PathLossLaw {
    pub fn new(eq: EquivalentPoisson) -> Result<Self> {
        check_beta(eq.beta)?;
        if !(eq.a > 0.0) || !eq.a.is_finite() {
            return Err(invalid(format!("intensity constant must be positive, got {}", eq.a)));
        }
        Ok(Self { a: eq.a, beta: eq.beta })
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        -(-self.a * t.powf(2.0 / self.beta)).exp_m1()
    }

    /// `(2a/β) t^{2/β-1} exp(-a t^{2/β})`.
    pub fn density(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let e = 2.0 / self.beta;
        2.0 * self.a / self.beta * t.powf(e - 1.0) * (-self.a * t.powf(e)).exp()
    }

    pub fn quantile(&self, p: f64) -> f64 {
        (-(-p).ln_1p() / self.a).powf(self.beta / 2.0)
    }
}

pub fn pathloss_cdf(law: &PathLossLaw, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(invalid(format!("path-loss threshold must be >= 0, got {t}")));
    }
    Ok(law.cdf(t))
}

/// `φ_β(z) = e^{-z} + z^{2/β} γ(1-2/β, z)`, evaluated as
/// `Γ(1-2/β) γ*(-2/β, z)` from the power series of `γ*`.
/// Beyond `z = 50` the continued-fraction branch takes over.
pub fn phi_beta(beta: f64, z: f64) -> Result<f64> {
    check_beta(beta)?;
    if !(z >= 0.0) || !z.is_finite() {
        return Err(invalid(format!("phi_beta argument must be finite and >= 0, got {z}")));
    }
    let g = gamma_fn(1.0 - 2.0 / beta)?;
    if z <= 50.0 {
        Ok(g * gamma_star(-2.0 / beta, z)?)
    } else {
        Ok(g * gamma_star_complex(-2.0 / beta, Complex64::new(z, 0.0))?.re)
    }
}

/// `φ_β` on the right half-plane, needed by the Bromwich inversions.
pub fn phi_beta_complex(beta: f64, z: Complex64) -> Result<Complex64> {
    check_beta(beta)?;
    let g = gamma_fn(1.0 - 2.0 / beta)?;
    Ok(gamma_star_complex(-2.0 / beta, z)? * g)
}

/// `C'(β) = 2π / (β sin(2π/β))`.
pub fn c_prime(beta: f64) -> f64 {
    2.0 * PI / (beta * (2.0 * PI / beta).sin())
}

/// `E[e^{-zf}] = 1/φ_β(z)`. Does not depend on the intensity.
pub fn laplace_f(beta: f64, z: f64) -> Result<f64> {
    Ok(1.0 / phi_beta(beta, z)?)
}

/// `P(SIR ≥ t) = t^{-2/β} / C'(β)`, valid for `t ≥ 1` only.
pub fn sir_ccdf_explicit(beta: f64, t: f64) -> Result<f64> {
    check_beta(beta)?;
    if !(t >= 1.0) {
        return Err(domain(format!("the closed-form SIR tail holds for t >= 1 only, got {t}")));
    }
    Ok(t.powf(-2.0 / beta) / c_prime(beta))
}

/// `P(f > y)` for the unconditional interference factor, from inverting
/// `(1 - 1/φ_β(z))/z`.
pub fn interference_ccdf(beta: f64, y: f64, inversion: &InversionConfig) -> Result<f64> {
    check_beta(beta)?;
    if y <= 0.0 {
        return Ok(1.0);
    }
    let values = inversion
        .abscissae(y)
        .map(|z| phi_beta_complex(beta, z).map(|phi| (1.0 - phi.inv()) / z))
        .collect::<Result<Vec<_>>>()?;
    inversion.combine(y, &values)
}

/// `e^w - 1` without cancellation for small `|w|`.
fn expm1_complex(w: Complex64) -> Complex64 {
    let (s, c) = w.im.sin_cos();
    let half = (0.5 * w.im).sin();
    Complex64::new(w.re.exp_m1() * c - 2.0 * half * half, w.re.exp() * s)
}

/// Joint law of the path-loss factor and the SINR denominator
/// `Y = (N/P)·L + f`, with the numerical settings used to evaluate it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrLaw {
    pub a: f64,
    pub beta: f64,
    /// `N/P` in the loss units of `a`.
    pub noise_over_power: f64,
    pub inversion: InversionConfig,
    pub quadrature: QuadratureConfig,
}

impl SinrLaw {
    pub fn new(eq: EquivalentPoisson, noise_over_power: f64) -> Result<Self> {
        let law = Self {
            a: eq.a,
            beta: eq.beta,
            noise_over_power,
            inversion: InversionConfig::default(),
            quadrature: QuadratureConfig::default(),
        };
        law.validate()?;
        Ok(law)
    }

    /// Law of the network with intensity `lambda`, propagation `prop`
    /// (noise over transmit power taken from it) and shadowing `shadow`.
    pub fn from_model(lambda_per_km2: f64, prop: &PropagationModel, shadow: &ShadowingSpec) -> Result<Self> {
        let eq = equivalent_poisson(lambda_per_km2, prop, shadow)?;
        Self::new(eq, prop.noise_over_power())
    }

    pub fn validate(&self) -> Result<()> {
        check_beta(self.beta)?;
        if !(self.a > 0.0) || !self.a.is_finite() {
            return Err(invalid(format!("intensity constant must be positive, got {}", self.a)));
        }
        if !(self.noise_over_power >= 0.0) {
            return Err(invalid(format!("noise over power must be >= 0, got {}", self.noise_over_power)));
        }
        self.inversion.validate()?;
        self.quadrature.validate()
    }

    pub fn with_noise_over_power(&self, noise_over_power: f64) -> Self {
        Self { noise_over_power, ..*self }
    }

    pub fn with_quadrature(&self, quadrature: QuadratureConfig) -> Self {
        Self { quadrature, ..*self }
    }

    pub fn with_inversion(&self, inversion: InversionConfig) -> Self {
        Self { inversion, ..*self }
    }

    pub fn path_loss(&self) -> PathLossLaw {
        PathLossLaw { a: self.a, beta: self.beta }
    }

    /// `P(f ≥ y | L = s)` from the transform
    /// `(1 - exp(-a[φ_β(z)-1] s^{2/β}))/z`, written with `c = a s^{2/β}`.
    /// `phi` holds `φ_β` at the inversion abscissae of `y`.
    fn conditional_ccdf(&self, c: f64, y: f64, phi: &[Complex64]) -> Result<f64> {
        let values: Vec<Complex64> =
            self.inversion.abscissae(y).zip(phi).map(|(z, &p)| -expm1_complex(-c * (p - 1.0)) / z).collect();
        self.inversion.combine(y, &values)
    }

    fn phi_at_abscissae(&self, y: f64) -> Result<Vec<Complex64>> {
        self.inversion.abscissae(y).map(|z| phi_beta_complex(self.beta, z)).collect()
    }
}

/// `E[e^{-zf} | L = s] = exp(-a[φ_β(z) - 1] s^{2/β})`.
pub fn laplace_f_given_l(law: &SinrLaw, z: f64, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(invalid(format!("path loss must be positive, got {s}")));
    }
    let phi = phi_beta(law.beta, z)?;
    Ok((-law.a * (phi - 1.0) * s.powf(2.0 / law.beta)).exp())
}

/// `P(Y < x)` for `Y = (N/P)L + f`.
///
/// The conditional CDF `F_s(x - Ns)` of `f` given `L = s` is inverted from
/// its transform and integrated against the law of `L` after the change of
/// variable `u = exp(-a s^{2/β})`, under which the law of `L` is uniform on
/// `(0, 1)`. Values of `u` with `x - Ns ≤ 0` contribute nothing.
///
/// The conditional CDF moves on a scale proportional to `u` near `u = 0`,
/// so `(0, 1)` is cut into panels `u ∈ (e^{-c_{j+1}}, e^{-c_j})` with
/// dyadic `c_j`, and `u < e^{-48}` is dropped.
pub fn y_cdf(law: &SinrLaw, x: f64) -> Result<f64> {
    law.validate()?;
    if !(x > 0.0) {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let n = law.noise_over_power;
    let half_beta = 0.5 * law.beta;
    // Beyond c_max = -ln u0 the noise alone exceeds x.
    let c_max = if n > 0.0 { (law.a * (x / n).powf(2.0 / law.beta)).min(Y_CDF_C_MAX) } else { Y_CDF_C_MAX };
    let shared_phi = if n == 0.0 { Some(law.phi_at_abscissae(x)?) } else { None };
    let integrand = |u: f64| -> Result<f64> {
        let c = -u.ln();
        if c <= 0.0 {
            return Ok(1.0);
        }
        let y = if n > 0.0 { x - n * (c / law.a).powf(half_beta) } else { x };
        if y <= 0.0 {
            return Ok(0.0);
        }
        let ccdf = match &shared_phi {
            Some(phi) => law.conditional_ccdf(c, y, phi)?,
            None => law.conditional_ccdf(c, y, &law.phi_at_abscissae(y)?)?,
        };
        Ok(1.0 - ccdf)
    };
    let mut total = 0.0;
    let mut c_lo = 0.0f64;
    for c_hi in Y_CDF_PANELS {
        let c_hi = c_hi.min(c_max);
        if c_hi <= c_lo {
            break;
        }
        let (u_lo, u_hi) = ((-c_hi).exp(), (-c_lo).exp());
        let width = u_hi - u_lo;
        // Near u = e^{-c_max} the conditional tail behaves like y^{-2/β}
        // with y → 0; grading the nodes with v = w^q, q = β/(β-2), evens
        // it out.
        let q = if c_hi == c_max && n > 0.0 { law.beta / (law.beta - 2.0) } else { 1.0 };
        total += width
            * try_integrate_unit_interval_with_floor(
                |w| Ok(q * w.powf(q - 1.0) * integrand(u_lo + width * w.powf(q))?),
                &law.quadrature,
                Y_CDF_PANEL_ABS_TOL / width,
            )?;
        c_lo = c_hi;
    }
    Ok(total.clamp(0.0, 1.0))
}

/// `P(SINR ≥ t) = P(Y ≤ 1/t)`, valid for every `t > 0`.
pub fn sinr_ccdf(law: &SinrLaw, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(invalid(format!("SINR threshold must be positive, got {t}")));
    }
    y_cdf(law, 1.0 / t)
}

/// Closed form of `P(SINR ≥ t)` for `t ≥ 1`:
/// `(2t^{-2/β}/Γ(1+2/β)) ∫_0^∞ r exp(-r²Γ(1-2/β) - N a^{-β/2} r^β) dr`.
///
/// With `v = r²Γ(1-2/β)` the integral becomes
/// `(1/2Γ(1-2/β)) ∫_0^∞ e^{-v} exp(-b (v/Γ(1-2/β))^{β/2}) dv`,
/// `b = N a^{-β/2}`, truncated where the integrand falls below `1e-12`.
pub fn sinr_ccdf_explicit(law: &SinrLaw, t: f64) -> Result<f64> {
    law.validate()?;
    if !(t >= 1.0) {
        return Err(domain(format!("the closed-form SINR tail holds for t >= 1 only, got {t}")));
    }
    let beta = law.beta;
    let g_minus = gamma_fn(1.0 - 2.0 / beta)?;
    let g_plus = gamma_fn(1.0 + 2.0 / beta)?;
    let prefactor = t.powf(-2.0 / beta) / (g_plus * g_minus);
    let b = law.noise_over_power * law.a.powf(-0.5 * beta);
    if b == 0.0 {
        return Ok(prefactor);
    }
    let exponent = |v: f64| v + b * (v / g_minus).powf(0.5 * beta);
    let cut = -EXPLICIT_TRUNCATION.ln();
    // exponent is increasing; bracket then bisect exponent(v) = cut.
    let mut hi = cut;
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if exponent(mid) > cut {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let v_max = hi;
    let integral = try_integrate_unit_interval(|w| Ok((-exponent(w * v_max)).exp()), &law.quadrature)?;
    Ok((prefactor * v_max * integral).clamp(0.0, 1.0))
}

/// `E[ln(1 + SINR)] = ∫_0^∞ P(SINR ≥ e^u - 1) du`, in nats.
///
/// The range is split at `u = ln 2` (SINR = 1) and cut where the noise-free
/// tail `t^{-2/β}/C'(β)` drops below `1e-8`. Below the split the tail is
/// inverted from its transform. Above it the closed form factors as
/// `t^{-2/β}` times a constant, so only `∫ (e^u - 1)^{-2/β} du` is left.
pub fn mean_spectral_efficiency(law: &SinrLaw) -> Result<f64> {
    law.validate()?;
    let beta = law.beta;
    let t_max = (c_prime(beta) * SE_TAIL_CUTOFF).powf(-0.5 * beta);
    let u_split = LN_2;
    let u_max = t_max.ln_1p();
    // Strong noise confines the head to tiny u, with a tail decaying like
    // u^{-2/β}; u = u_split w^q, q = β/(β-2), flattens it.
    let q = beta / (beta - 2.0);
    let head = try_integrate_unit_interval(
        |w| {
            let u = u_split * w.powf(q);
            Ok(q * w.powf(q - 1.0) * sinr_ccdf(law, u.exp_m1().max(f64::MIN_POSITIVE))?)
        },
        &law.quadrature,
    )?;
    let at_one = sinr_ccdf_explicit(law, 1.0)?;
    let tail_width = u_max - u_split;
    let shape =
        try_integrate_unit_interval(|v| Ok((u_split + v * tail_width).exp_m1().powf(-2.0 / beta)), &law.quadrature)?;
    Ok(head * u_split + at_one * shape * tail_width)
}

/// Mean energy efficiency `W E[log₂(1 + SINR(P))] / (cP + d)` in bits/s/W.
/// `law` supplies `a`, `β` and numerical settings; its noise term is
/// replaced by `N/P` from `prop` at the given power.
pub fn mean_energy_efficiency(law: &SinrLaw, prop: &PropagationModel, power_w: f64) -> Result<f64> {
    if !(power_w > 0.0) || !power_w.is_finite() {
        return Err(invalid(format!("transmit power must be positive, got {power_w}")));
    }
    let law = law.with_noise_over_power(prop.noise_w / power_w);
    let se = mean_spectral_efficiency(&law)?;
    Ok(prop.bandwidth_hz * se / (LN_2 * prop.consumed_power(power_w)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerOptimum {
    pub power_w: f64,
    /// bits/s/W
    pub efficiency: f64,
    /// The maximizer sits at an edge of the bracket, so no interior
    /// optimum was found.
    pub at_boundary: bool,
}

/// Golden-section maximization of [`mean_energy_efficiency`] over `ln P`
/// on `[p_lo, p_hi]`, to 0.01 dB. Assumes a unimodal efficiency curve.
pub fn optimal_power(
    prop: &PropagationModel,
    shadow: &ShadowingSpec,
    lambda_per_km2: f64,
    p_lo_w: f64,
    p_hi_w: f64,
) -> Result<PowerOptimum> {
    if !(p_lo_w > 0.0 && p_lo_w < p_hi_w) {
        return Err(invalid(format!("power bracket [{p_lo_w}, {p_hi_w}] W is invalid")));
    }
    let law = SinrLaw::from_model(lambda_per_km2, prop, shadow)?;
    optimal_power_for_law(&law, prop, p_lo_w, p_hi_w)
}

/// As [`optimal_power`] for a prepared law.
pub fn optimal_power_for_law(law: &SinrLaw, prop: &PropagationModel, p_lo_w: f64, p_hi_w: f64) -> Result<PowerOptimum> {
    let tol = 0.001 * std::f64::consts::LN_10;
    let (lo, hi) = (p_lo_w.ln(), p_hi_w.ln());
    let g = try_maximize_scalar(|x| mean_energy_efficiency(law, prop, x.exp()), lo, hi, tol)?;
    let at_boundary = g.argmax - lo <= 2.0 * tol || hi - g.argmax <= 2.0 * tol;
    Ok(PowerOptimum { power_w: g.argmax.exp(), efficiency: g.max, at_boundary })
}

/// Noise-free SIR law, `P(SIR ≤ t)`, for goodness-of-fit testing.
///
/// For `t ≥ 1` the closed form is used. Below, `P(SIR < t) = P(f > 1/t)` is
/// inverted once per node of a log-spaced table and interpolated linearly
/// in `ln t`; thresholds below the table are inverted directly.
#[derive(Debug, Clone)]
pub struct SirLaw {
    beta: f64,
    inversion: InversionConfig,
    ln_t_min: f64,
    step: f64,
    table: Vec<f64>,
}

impl SirLaw {
    const LN_T_MIN: f64 = -20.0;
    const NODES: usize = 2001;

    pub fn new(beta: f64, inversion: InversionConfig) -> Result<Self> {
        check_beta(beta)?;
        inversion.validate()?;
        let step = -Self::LN_T_MIN / (Self::NODES - 1) as f64;
        let table = (0..Self::NODES)
            .map(|i| {
                let ln_t = Self::LN_T_MIN + step * i as f64;
                if i + 1 == Self::NODES {
                    Ok(1.0 - 1.0 / c_prime(beta))
                } else {
                    interference_ccdf(beta, (-ln_t).exp(), &inversion)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { beta, inversion, ln_t_min: Self::LN_T_MIN, step, table })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `P(SIR ≤ t)`.
    pub fn cdf(&self, t: f64) -> f64 {
        if t.is_nan() {
            return f64::NAN;
        }
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0 - t.powf(-2.0 / self.beta) / c_prime(self.beta);
        }
        let ln_t = t.ln();
        if ln_t < self.ln_t_min {
            return interference_ccdf(self.beta, 1.0 / t, &self.inversion).unwrap_or(f64::NAN);
        }
        let pos = (ln_t - self.ln_t_min) / self.step;
        let i = (pos.floor() as usize).min(self.table.len() - 2);
        let frac = pos - i as f64;
        self.table[i] + frac * (self.table[i + 1] - self.table[i])
    }

    /// `P(SIR ≥ t)`.
    pub fn ccdf(&self, t: f64) -> f64 {
        1.0 - self.cdf(t)
    }
}
