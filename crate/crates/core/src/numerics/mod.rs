//! Numerical building blocks shared by the rest of the crate.
//!
//! Everything here is a pure function of its arguments. Improper integrals
//! are never handled here; call sites map their domains onto `(0, 1)`.

mod laplace;
mod optimize;
mod quadrature;
mod special;

pub use laplace::{invert_laplace_ccdf, InversionConfig};
pub use optimize::{maximize_scalar, try_maximize_scalar, GoldenSection};
pub use quadrature::{
    integrate_unit_interval, try_integrate_unit_interval, try_integrate_unit_interval_with_floor, GaussLegendre,
    QuadratureConfig,
};
pub use special::{erfc, gamma_fn, gamma_star, gamma_star_complex, lower_gamma, std_normal_cdf, upper_gamma_complex};
