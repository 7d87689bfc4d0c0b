use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{invalid, numeric, Result};

/// Largest rule the doubling loop of [`integrate_unit_interval`] will try.
const MAX_NODES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Gauss-Legendre order of the first estimate.
    pub node_count: usize,
    /// Relative change tolerated between an estimate and the next doubling.
    pub rel_tol: f64,
}

impl QuadratureConfig {
    pub fn new(node_count: usize, rel_tol: f64) -> Result<Self> {
        let cfg = Self { node_count, rel_tol };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count < 2 {
            return Err(invalid(format!("node_count must be >= 2, got {}", self.node_count)));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(invalid(format!("rel_tol must lie in (0,1), got {}", self.rel_tol)));
        }
        Ok(())
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { node_count: 16, rel_tol: 1e-6 }
    }
}

/// Gauss-Legendre rule mapped onto `(0, 1)`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds an `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // Map [-1, 1] to [0, 1].
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        Self { nodes, weights }
    }

    /// Shared, lazily built rule of order `n`.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard.entry(n).or_insert_with(|| Arc::new(GaussLegendre::new(n))).clone()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `∫_lo^hi f`, failing on the first non-finite integrand value.
    pub fn integrate<F>(&self, lo: f64, hi: f64, mut f: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let width = hi - lo;
        let mut acc = 0.0;
        for (u, w) in self.nodes() {
            let x = lo + width * u;
            let v = f(x)?;
            if !v.is_finite() {
                return Err(numeric(format!("integrand is {v} at interior node {x}")));
            }
            acc += w * v;
        }
        Ok(acc * width)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss-Legendre integral over `(0, 1)`. The order starts at
/// `cfg.node_count` and doubles until two successive estimates agree to
/// `cfg.rel_tol`; the finer estimate is returned.
pub fn integrate_unit_interval<F>(mut f: F, cfg: &QuadratureConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_unit_interval(|u| Ok(f(u)), cfg)
}

/// Fallible-integrand variant of [`integrate_unit_interval`].
pub fn try_integrate_unit_interval<F>(f: F, cfg: &QuadratureConfig) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    try_integrate_unit_interval_with_floor(f, cfg, 0.0)
}

/// As [`try_integrate_unit_interval`], but also accepts two estimates that
/// differ by at most `abs_tol`. Meant for pieces of a larger integral whose
/// own size may be negligible.
pub fn try_integrate_unit_interval_with_floor<F>(mut f: F, cfg: &QuadratureConfig, abs_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    cfg.validate()?;
    let mut n = cfg.node_count;
    let mut prev = GaussLegendre::cached(n).integrate(0.0, 1.0, &mut f)?;
    while n < MAX_NODES {
        n *= 2;
        let next = GaussLegendre::cached(n).integrate(0.0, 1.0, &mut f)?;
        if (next - prev).abs() <= (cfg.rel_tol * next.abs()).max(abs_tol) {
            return Ok(next);
        }
        prev = next;
    }
    Err(numeric(format!("Gauss-Legendre estimate still moving at {n} nodes (last {prev})")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(5);
        // Degree 9 is the limit for 5 nodes.
        let v = rule.integrate(0.0, 1.0, |x| Ok(x.powi(9))).unwrap();
        assert_relative_eq!(v, 0.1, max_relative = 1e-14);
        let w: f64 = rule.nodes().map(|(_, w)| w).sum();
        assert_relative_eq!(w, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn large_rules_are_accurate() {
        let rule = GaussLegendre::new(1024);
        let v = rule.integrate(0.0, PI, |x| Ok(x.sin())).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-13);
    }

    #[test]
    fn unit_interval_examples() {
        let cfg = QuadratureConfig::default();
        assert_relative_eq!(integrate_unit_interval(|_| 1.0, &cfg).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(integrate_unit_interval(|u| u, &cfg).unwrap(), 0.5, max_relative = 1e-14);
        assert_relative_eq!(
            integrate_unit_interval(f64::exp, &cfg).unwrap(),
            std::f64::consts::E - 1.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn doubling_changes_less_than_tolerance() {
        let cfg = QuadratureConfig::new(8, 1e-10).unwrap();
        let f = |u: f64| (-(u * 7.0).powi(2)).exp() * (3.0 * u).cos();
        let v = integrate_unit_interval(f, &cfg).unwrap();
        let finer = GaussLegendre::new(512).integrate(0.0, 1.0, |u| Ok(f(u))).unwrap();
        assert!((v - finer).abs() < 1e-10 * finer.abs());
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let cfg = QuadratureConfig::default();
        let r = integrate_unit_interval(|u| if u > 0.5 { f64::NAN } else { 1.0 }, &cfg);
        assert!(matches!(r, Err(crate::Error::Numeric(_))));
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::new(1, 1e-6).is_err());
        assert!(QuadratureConfig::new(4, 0.0).is_err());
        assert!(QuadratureConfig::new(4, 1.0).is_err());
    }
}
