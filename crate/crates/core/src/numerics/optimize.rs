use crate::error::{invalid, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenSection {
    pub argmax: f64,
    pub max: f64,
    pub iterations: usize,
}

/// Golden-section maximization of a unimodal `f` on `[lo, hi]`; the
/// returned abscissa is within `tol` of the true maximizer.
pub fn maximize_scalar<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    try_maximize_scalar(|x| Ok(f(x)), lo, hi, tol).map(|g| (g.argmax, g.max))
}

pub fn try_maximize_scalar<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<GoldenSection>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(invalid(format!("bracket [{lo}, {hi}] is empty or not finite")));
    }
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut iterations = 0;
    while b - a > tol {
        iterations += 1;
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    let (argmax, max) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    Ok(GoldenSection { argmax, max, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn examples() {
        let (x, _) = maximize_scalar(|x| -(x - 2.0).powi(2), 0.0, 5.0, 1e-6).unwrap();
        assert_abs_diff_eq!(x, 2.0, epsilon = 1e-6);
        let (x, m) = maximize_scalar(|x| x * (-x).exp(), 0.0, 10.0, 1e-6).unwrap();
        assert_abs_diff_eq!(x, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(m, (-1.0f64).exp(), epsilon = 1e-12);
        let (x, _) = maximize_scalar(f64::sin, 0.0, PI, 1e-8).unwrap();
        assert_abs_diff_eq!(x, PI / 2.0, epsilon = 1e-8);
    }

    #[test]
    fn empty_bracket_is_rejected() {
        assert!(maximize_scalar(|x| x, 1.0, 1.0, 1e-3).is_err());
        assert!(maximize_scalar(|x| x, 2.0, 1.0, 1e-3).is_err());
    }

    #[test]
    fn monotone_function_goes_to_the_edge() {
        let (x, _) = maximize_scalar(|x| -x, 0.0, 1.0, 1e-7).unwrap();
        assert!(x < 2e-7);
    }

    proptest! {
        #[test]
        fn bracket_shrinks_geometrically(
            lo in -100.0f64..0.0, width in 0.01f64..200.0,
            frac in 0.0f64..1.0, tol in 1e-9f64..1e-2
        ) {
            let hi = lo + width;
            let peak = lo + frac * width;
            let g = try_maximize_scalar(|x| Ok(-(x - peak).abs()), lo, hi, tol).unwrap();
            let bound = (((hi - lo) / tol).ln() / (1.0 / INV_PHI).ln()).ceil() as usize + 2;
            prop_assert!(g.iterations <= bound);
            prop_assert!((g.argmax - peak).abs() <= tol);
        }
    }
}
