use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn lanczos(z: C64) -> C64 {
    let z = z - 1.0;
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

// Branch reference: shift up to Re >= 1/2 and subtract principal logs.
fn recurrence_branch(z: C64) -> C64 {
    let n = (0.5 - z.re).ceil().max(0.0) as usize;
    let mut acc = lanczos(z + n as f64);
    for k in 0..n {
        acc -= (z + k as f64).ln();
    }
    acc
}

/// Principal branch of ln Γ(z).
///
/// Lanczos (g = 7, nine coefficients) for Re z >= 1/2, reflection otherwise.
/// The imaginary part is the one obtained by continuation along horizontal
/// lines from the positive real axis (cut along the negative real axis,
/// approached from above).
pub fn log_gamma(z: C64) -> Result<C64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite(z.re));
    }
    if is_nonpositive_integer(z) {
        return Err(Error::Pole(z.re));
    }
    if z.re >= 0.5 {
        return Ok(lanczos(z));
    }
    let s = (PI * z).sin();
    let r = PI.ln() - s.ln() - lanczos(1.0 - z);
    let reference = recurrence_branch(z);
    let k = ((reference.im - r.im) / (2.0 * PI)).round();
    Ok(C64::new(r.re, r.im + 2.0 * PI * k))
}

/// ln Γ of a real argument as a complex number (imaginary part a multiple of π).
pub fn log_gamma_real(x: f64) -> Result<C64> {
    log_gamma(C64::new(x, 0.0))
}

/// Γ(z), via `log_gamma`.
pub fn gamma(z: C64) -> Result<C64> {
    Ok(log_gamma(z)?.exp())
}

/// 1/Γ(z); zero at the poles of Γ.
pub fn rgamma(z: C64) -> C64 {
    if is_nonpositive_integer(z) {
        return C64::new(0.0, 0.0);
    }
    match log_gamma(z) {
        Ok(v) => (-v).exp(),
        Err(_) => C64::new(0.0, 0.0),
    }
}

/// Rising factorial (z)_n as a product.
pub fn pochhammer(z: C64, n: usize) -> C64 {
    let mut p = C64::new(1.0, 0.0);
    for k in 0..n {
        p *= z + k as f64;
    }
    p
}

/// ln n! for small non-negative integers, exact summation of logs.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 30 {
        return (2..=n).map(|k| (k as f64).ln()).sum();
    }
    lanczos(C64::new(n as f64 + 1.0, 0.0)).re
}
