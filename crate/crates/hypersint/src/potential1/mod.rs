//! The first potential V1 = α²/w2² − γ²/(w0−w1)² + β²(w0+w1)/(w0−w1)³.

mod parabolic;
mod states;

pub use parabolic::{
    ep_zero_equations, hp_zero_equations, p1_ep_lambda, p1_ep_roots, p1_hp_roots, p1_hp_tau,
    p1_wf_elliptic_parabolic, p1_wf_hyperbolic_parabolic, BetheRoots, RootSystem, SolverOptions,
};
pub use states::{p1_wf_equidistant, p1_wf_horicyclic, s1_factor, s2_factor, psi1_factor, psi2_factor, P1Quantum, P1State};

pub(crate) use states::{lg, s1_log, s1_log_norm};

use crate::error::{Error, Result};
use crate::geometry::{guard, AmbientPoint};
use std::f64::consts::SQRT_2;

const WINDOW_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P1Params {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// sqrt(2α² + 1/4)
    pub d: f64,
    /// γ²/(√2 β)
    pub s: f64,
}

impl P1Params {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(P1Params {
            alpha,
            beta,
            gamma,
            d: (2.0 * alpha * alpha + 0.25).sqrt(),
            s: gamma * gamma / (SQRT_2 * beta),
        })
    }

    /// √2 β, the scale of the Laguerre arguments.
    pub fn c(&self) -> f64 {
        SQRT_2 * self.beta
    }

    /// β/√2, the Gaussian rate in the parabolic charts.
    pub fn kappa(&self) -> f64 {
        self.beta / SQRT_2
    }

    /// sqrt(−2E_N + 1/4) = s − d − 2N − 2 at level N (may be non-positive).
    pub fn nu(&self, n: usize) -> f64 {
        self.s - self.d - 2.0 * n as f64 - 2.0
    }

    /// Highest bound level, excluding the E = 1/8 boundary; None if the spectrum is empty.
    pub fn nmax(&self) -> Option<usize> {
        let x = (self.s - self.d - 2.0) / 2.0;
        if x < 0.0 {
            return None;
        }
        let mut n = x.floor() as usize;
        if self.nu(n) <= WINDOW_EPS {
            if n == 0 {
                return None;
            }
            n -= 1;
        }
        Some(n)
    }

    /// Largest m of the μ window, floor((s − 1)/2).
    pub fn m_max(&self) -> Option<usize> {
        let x = (self.s - 1.0) / 2.0;
        (x >= 0.0).then(|| (x + WINDOW_EPS).floor() as usize)
    }

    /// The admissible (n, m) pairs of level N, ordered by m.
    pub fn level_states(&self, n_level: usize) -> Result<Vec<(usize, usize)>> {
        p1_energy(self, n_level)?;
        let mut out = Vec::new();
        for m in 0..=n_level {
            let n = n_level - m;
            if self.check_nm(n, m).is_ok() {
                out.push((n, m));
            }
        }
        Ok(out)
    }

    pub fn check_nm(&self, n: usize, m: usize) -> Result<f64> {
        let mu = p1_mu(self, m)?;
        if mu - self.d - 2.0 * n as f64 - 1.0 <= WINDOW_EPS {
            return Err(Error::OutOfWindow(format!("n = {n} needs mu - d - 2n - 1 > 0 (mu = {mu})")));
        }
        Ok(mu)
    }
}

/// V1 at an ambient point.
pub fn v1_ambient(p: &P1Params, q: &AmbientPoint) -> Result<f64> {
    if q.w2 == 0.0 || q.w0 == q.w1 {
        return Err(Error::Singular(format!("V1 needs w2 != 0 and w0 != w1 at {q:?}")));
    }
    let dm = q.w0 - q.w1;
    Ok(p.alpha.powi(2) / (q.w2 * q.w2) - p.gamma.powi(2) / (dm * dm) + p.beta.powi(2) * (q.w0 + q.w1) / dm.powi(3))
}

/// V1 in equidistant coordinates.
pub fn v1_equidistant(p: &P1Params, t1: f64, t2: f64) -> f64 {
    let e = t2.cosh() - t2.sinh();
    p.alpha.powi(2) / t1.sinh().powi(2)
        + (p.beta.powi(2) - p.gamma.powi(2) * e * e) / (t1.cosh().powi(2) * e.powi(4))
}

/// V1 in horicyclic coordinates.
pub fn v1_horicyclic(p: &P1Params, x: f64, y: f64) -> f64 {
    y * y * (p.alpha.powi(2) / (x * x) + p.beta.powi(2) * (x * x + y * y) - p.gamma.powi(2))
}

/// Guarded multiplication coefficient for operators: V1(q).
pub(crate) fn v1_coeff(p: &P1Params, q: &AmbientPoint) -> Result<f64> {
    guard(q.w2, "w2")?;
    guard(q.w0 - q.w1, "w0 - w1")?;
    v1_ambient(p, q)
}

/// E_N = −(2N + 2 + d − s)²/2 + 1/8.
pub fn p1_energy(p: &P1Params, n_level: usize) -> Result<f64> {
    let top = (p.s - p.d - 2.0) / 2.0;
    if top < 0.0 || n_level as f64 > top + WINDOW_EPS {
        return Err(Error::NoBoundState(format!("N = {n_level} outside 0..=floor((s - d - 2)/2) with s = {}, d = {}", p.s, p.d)));
    }
    if p.nu(n_level).abs() <= WINDOW_EPS {
        return Err(Error::BoundaryState);
    }
    let x = 2.0 * n_level as f64 + 2.0 + p.d - p.s;
    Ok(-0.5 * x * x + 0.125)
}

/// μ = s − 2m − 1.
pub fn p1_mu(p: &P1Params, m: usize) -> Result<f64> {
    match p.m_max() {
        Some(mm) if m <= mm => Ok(p.s - 2.0 * m as f64 - 1.0),
        _ => Err(Error::OutOfWindow(format!("m = {m} outside 0..=floor((s - 1)/2) with s = {}", p.s))),
    }
}

/// Horicyclic separation constants (λ1, λ2) at energy `e`.
pub fn horicyclic_lambdas(p: &P1Params, n1: usize, n2: usize, e: f64) -> Result<(f64, f64)> {
    let arg = -2.0 * e + 0.25;
    if arg <= 0.0 {
        return Err(Error::BoundaryState);
    }
    let c = p.c() / p.gamma.powi(2);
    Ok((c * (2.0 * n1 as f64 + p.d + 1.0) - 1.0, c * (2.0 * n2 as f64 + arg.sqrt() + 1.0) + 1.0))
}

/// Energy obtained by solving λ1 + λ2 = 1 for E at level N.
pub fn horicyclic_energy(p: &P1Params, n_level: usize) -> Result<f64> {
    p1_energy(p, n_level)?;
    // λ1 + λ2 = (√2β/γ²)(2N + d + ν + 2) = 1
    let nu = p.gamma.powi(2) / p.c() - 2.0 * n_level as f64 - p.d - 2.0;
    Ok(-0.5 * nu * nu + 0.125)
}

/// Energy from the elliptic-parabolic quantization condition at level N.
pub fn elliptic_parabolic_energy(p: &P1Params, n_level: usize) -> Result<f64> {
    p1_energy(p, n_level)?;
    let root = p.s - p.d - 2.0 * n_level as f64 - 2.0;
    Ok(-(root * root - 0.25) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{chart_to_ambient, Chart, ChartPoint};

    pub(crate) fn fixture() -> P1Params {
        P1Params::new(1.0, 1.0 / SQRT_2, 2.0 * SQRT_2).unwrap()
    }

    #[test]
    fn derived_constants() {
        let p = fixture();
        assert!((p.d - 1.5).abs() < 1e-15 && (p.s - 8.0).abs() < 1e-14);
        assert_eq!(p.nmax(), Some(2));
        assert_eq!(p.m_max(), Some(3));
    }

    #[test]
    fn energies() {
        let p = fixture();
        for (n, e) in [(0, -10.0), (1, -3.0), (2, 0.0)] {
            assert!((p1_energy(&p, n).unwrap() - e).abs() < 1e-12);
        }
        assert!(matches!(p1_energy(&p, 3), Err(Error::NoBoundState(_))));
        let q = P1Params::new(1.0, 10.0, 1.0).unwrap();
        assert_eq!(q.nmax(), None);
        assert!(matches!(p1_energy(&q, 0), Err(Error::NoBoundState(_))));
    }

    #[test]
    fn boundary_state_rejected() {
        // s − d − 2 = 0 exactly: d = 1/2 needs α → 0, so use s = d + 4 at N = 1
        let alpha = 1.0;
        let d = (2.0f64 + 0.25).sqrt();
        let beta = 1.0;
        let gamma = ((d + 4.0) * SQRT_2 * beta).sqrt();
        let p = P1Params::new(alpha, beta, gamma).unwrap();
        assert_eq!(p1_energy(&p, 1), Err(Error::BoundaryState));
        assert_eq!(p.nmax(), Some(0));
    }

    #[test]
    fn mu_window() {
        let p = fixture();
        assert!((p1_mu(&p, 0).unwrap() - 7.0).abs() < 1e-14);
        assert!((p1_mu(&p, 3).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(p1_mu(&p, 4), Err(Error::OutOfWindow(_))));
    }

    #[test]
    fn degeneracy() {
        let p = fixture();
        for n in 0..=2 {
            assert_eq!(p.level_states(n).unwrap().len(), n + 1);
        }
    }

    #[test]
    fn potential_forms_agree() {
        let p = P1Params::new(0.7, 1.3, 2.1).unwrap();
        for (t1, t2) in [(0.3, -0.4), (1.2, 0.8), (-0.6, 0.1)] {
            let q = chart_to_ambient(&ChartPoint::new(Chart::Equidistant, t1, t2)).unwrap();
            let a = v1_ambient(&p, &q).unwrap();
            assert!((a - v1_equidistant(&p, t1, t2)).abs() < 1e-12 * a.abs().max(1.0));
        }
        for (x, y) in [(0.3, 0.4), (-1.2, 2.0)] {
            let q = chart_to_ambient(&ChartPoint::new(Chart::Horicyclic, x, y)).unwrap();
            let a = v1_ambient(&p, &q).unwrap();
            assert!((a - v1_horicyclic(&p, x, y)).abs() < 1e-12 * a.abs().max(1.0));
        }
        assert!(matches!(v1_ambient(&p, &AmbientPoint::new(1.0, 0.0, 0.0)), Err(Error::Singular(_))));
    }

    #[test]
    fn lambdas_sum_to_one() {
        let p = fixture();
        for n in 0..=2 {
            let e = p1_energy(&p, n).unwrap();
            for n1 in 0..=n {
                let (l1, l2) = horicyclic_lambdas(&p, n1, n - n1, e).unwrap();
                assert!((l1 + l2 - 1.0).abs() < 1e-12);
            }
            assert!((horicyclic_energy(&p, n).unwrap() - e).abs() < 1e-12);
            assert!((elliptic_parabolic_energy(&p, n).unwrap() - e).abs() < 1e-12);
        }
    }
}
