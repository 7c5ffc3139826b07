//! Special functions and quadrature.

mod gamma;
mod hyper;
mod poly;
mod quad;

pub use gamma::{gamma, ln_factorial, log_gamma, log_gamma_real, pochhammer, rgamma};
pub use hyper::{hahn, hyp2f1, hyp3f2_unit};
#[allow(unused_imports)]
pub(crate) use hyper::Neumaier;
pub use poly::{jacobi, jacobi_real, laguerre};
pub use quad::{integrate, integrate_2d, integrate_adaptive, nodes, Domain, QuadratureSpec, Rule, Transform};

/// Complex scalar used for complex parameters throughout the crate.
pub type ComplexValue = num_complex::Complex64;

/// ln cosh x without overflow.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// ln |sinh x| without overflow.
pub fn ln_sinh_abs(x: f64) -> f64 {
    let a = x.abs();
    if a < 1.0 {
        return x.sinh().abs().ln();
    }
    a + (-(-2.0 * a).exp()).ln_1p() - std::f64::consts::LN_2
}
