use num_complex::Complex64 as C64;

/// Generalized Laguerre polynomial L_n^a(x) by forward recurrence.
pub fn laguerre(n: usize, a: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = 1.0 + a - x;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0 + a - x) * p1 - (kf + a) * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

// Generalized binomial coefficient C(z, j) as a finite product.
fn binom(z: C64, j: usize) -> C64 {
    let mut p = C64::new(1.0, 0.0);
    for i in 1..=j {
        p *= (z - j as f64 + i as f64) / i as f64;
    }
    p
}

fn jacobi_sum(n: usize, a: C64, b: C64, x: C64) -> C64 {
    let lo = (x - 1.0) * 0.5;
    let hi = (x + 1.0) * 0.5;
    let mut s = C64::new(0.0, 0.0);
    for k in 0..=n {
        s += binom(a + n as f64, n - k) * binom(b + n as f64, k) * lo.powu(k as u32) * hi.powu((n - k) as u32);
    }
    s
}

/// Jacobi polynomial P_n^{(a,b)}(x) for complex parameters and argument.
///
/// Three-term recurrence; falls back to the explicit binomial sum when a
/// recurrence denominator vanishes (a + b a small negative integer).
pub fn jacobi(n: usize, a: C64, b: C64, x: C64) -> C64 {
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    let p1 = (a + 1.0) + (a + b + 2.0) * (x - 1.0) * 0.5;
    if n == 1 {
        return p1;
    }
    let scale = 1.0 + a.norm() + b.norm();
    let mut p0 = C64::new(1.0, 0.0);
    let mut p1 = p1;
    for k in 2..=n {
        let kf = k as f64;
        let c = a + b + 2.0 * kf;
        let a1 = 2.0 * kf * (a + b + kf) * (c - 2.0);
        if a1.norm() < 1e-12 * scale * scale * kf {
            return jacobi_sum(n, a, b, x);
        }
        let a2 = (c - 1.0) * (a * a - b * b);
        let a3 = (c - 2.0) * (c - 1.0) * c;
        let a4 = 2.0 * (a + kf - 1.0) * (b + kf - 1.0) * c;
        let p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Real-parameter Jacobi polynomial.
pub fn jacobi_real(n: usize, a: f64, b: f64, x: f64) -> f64 {
    jacobi(n, C64::new(a, 0.0), C64::new(b, 0.0), C64::new(x, 0.0)).re
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn laguerre_low_orders() {
        assert_eq!(laguerre(0, 2.5, 3.0), 1.0);
        assert!((laguerre(1, 2.5, 3.0) - 0.5).abs() < 1e-15);
        assert!((laguerre(2, 0.0, 2.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn laguerre_explicit_sum() {
        // L_n^a(x) = Σ (-1)^k C(n+a, n-k) x^k / k!
        let (n, a, x) = (5usize, 1.5f64, 0.7f64);
        let mut s = 0.0;
        let mut kf = 1.0;
        for k in 0..=n {
            if k > 0 {
                kf *= k as f64;
            }
            s += (-1f64).powi(k as i32) * binom(c(n as f64 + a, 0.0), n - k).re * x.powi(k as i32) / kf;
        }
        assert!((laguerre(n, a, x) - s).abs() < 1e-13);
    }

    #[test]
    fn jacobi_low_orders() {
        let (a, b, x) = (c(0.3, 0.2), c(-1.1, 0.5), c(0.4, -0.7));
        assert_eq!(jacobi(0, a, b, x), c(1.0, 0.0));
        let p1 = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
        assert!((jacobi(1, a, b, x) - p1).norm() < 1e-15);
        assert!((jacobi_real(2, 0.0, 0.0, 0.5) + 0.125).abs() < 1e-15);
    }

    #[test]
    fn jacobi_recurrence_matches_sum() {
        let (a, b, x) = (c(1.5, 0.0), c(-7.0, 0.0), c(3.2, 0.0));
        for n in 0..6 {
            let r = jacobi(n, a, b, x);
            let s = jacobi_sum(n, a, b, x);
            assert!((r - s).norm() < 1e-10 * (1.0 + s.norm()), "{n}");
        }
    }

    #[test]
    fn jacobi_degenerate_parameters() {
        // a + b = -2 makes the k = 2 recurrence denominator vanish
        let (a, b, x) = (c(0.5, 0.0), c(-2.5, 0.0), c(0.3, 0.0));
        let s = jacobi_sum(3, a, b, x);
        assert!((jacobi(3, a, b, x) - s).norm() < 1e-14);
        assert!(s.re.is_finite());
    }
}
