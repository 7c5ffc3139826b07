use std::f64::consts::SQRT_2;

use super::parabolic::{self, BetheRoots};
use super::{p1_energy, P1Params};
use crate::error::{Error, Result};
use crate::geometry::{ambient_to_chart, chart_to_ambient, AmbientPoint, Chart, ChartPoint};
use crate::specfun::{jacobi_real, laguerre, ln_cosh, ln_factorial, ln_sinh_abs, log_gamma_real};

pub(crate) fn lg(x: f64) -> Result<f64> {
    Ok(log_gamma_real(x)?.re)
}

/// Quantum numbers of a V1 state in one of its four separable charts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum P1Quantum {
    Equidistant { n: usize, m: usize },
    Horicyclic { n1: usize, n2: usize },
    /// `p` roots in [0, 1], `q` in [1, ∞)
    EllipticParabolic { level: usize, p: usize, q: usize },
    /// `k` roots in [−1, 0], `l` in [0, ∞)
    HyperbolicParabolic { level: usize, l: usize, k: usize },
}

impl P1Quantum {
    pub fn chart(&self) -> Chart {
        match self {
            P1Quantum::Equidistant { .. } => Chart::Equidistant,
            P1Quantum::Horicyclic { .. } => Chart::Horicyclic,
            P1Quantum::EllipticParabolic { .. } => Chart::EllipticParabolic,
            P1Quantum::HyperbolicParabolic { .. } => Chart::HyperbolicParabolic,
        }
    }

    pub fn level(&self) -> usize {
        match *self {
            P1Quantum::Equidistant { n, m } => n + m,
            P1Quantum::Horicyclic { n1, n2 } => n1 + n2,
            P1Quantum::EllipticParabolic { level, .. } | P1Quantum::HyperbolicParabolic { level, .. } => level,
        }
    }
}

/// A normalized bound state of V1 on the half sheet w2 > 0.
///
/// `log_norm` is the logarithm of the constant multiplying the bare product
/// form; for the equidistant and horicyclic states it is the closed-form
/// normalization, for the parabolic states it comes from quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct P1State {
    pub params: P1Params,
    pub quantum: P1Quantum,
    pub roots: Option<BetheRoots>,
    pub log_norm: f64,
}

impl P1State {
    pub fn equidistant(p: &P1Params, n: usize, m: usize) -> Result<Self> {
        let mu = p.check_nm(n, m)?;
        p1_energy(p, n + m)?;
        let log_norm = s1_log_norm(p.d, n, mu)? + s2_log_norm(m, mu)?;
        Ok(P1State { params: *p, quantum: P1Quantum::Equidistant { n, m }, roots: None, log_norm })
    }

    pub fn horicyclic(p: &P1Params, n1: usize, n2: usize) -> Result<Self> {
        let nu = horicyclic_nu(p, n1 + n2)?;
        let c = p.c();
        let log_norm = osc_log_norm(n1, p.d, c)? + osc_log_norm(n2, nu, c)? + 0.5 * (4.0 * nu / c).ln();
        Ok(P1State { params: *p, quantum: P1Quantum::Horicyclic { n1, n2 }, roots: None, log_norm })
    }

    /// Elliptic-parabolic state built on a root configuration, normalized by quadrature.
    pub fn elliptic_parabolic(p: &P1Params, roots: BetheRoots) -> Result<Self> {
        parabolic::build_state(p, roots, Chart::EllipticParabolic)
    }

    /// Hyperbolic-parabolic state built on a root configuration, normalized by quadrature.
    pub fn hyperbolic_parabolic(p: &P1Params, roots: BetheRoots) -> Result<Self> {
        parabolic::build_state(p, roots, Chart::HyperbolicParabolic)
    }

    pub fn chart(&self) -> Chart {
        self.quantum.chart()
    }

    pub fn level(&self) -> usize {
        self.quantum.level()
    }

    pub fn energy(&self) -> Result<f64> {
        p1_energy(&self.params, self.level())
    }

    /// Value at chart coordinates of the state's own chart.
    pub fn eval_chart(&self, u1: f64, u2: f64) -> Result<f64> {
        let pt = ChartPoint::new(self.chart(), u1, u2);
        pt.check()?;
        let p = &self.params;
        match self.quantum {
            P1Quantum::Equidistant { n, m } => {
                let mu = p.s - 2.0 * m as f64 - 1.0;
                let (s1, l1) = s1_log(p.d, n, mu, u1);
                let (s2, l2) = s2_log(p, m, mu, u2);
                let v = s1 * s2 * (self.log_norm + l1 + l2 - 0.5 * ln_cosh(u1)).exp();
                finite(v, u1)
            }
            P1Quantum::Horicyclic { n1, n2 } => {
                let nu = horicyclic_nu(p, n1 + n2)?;
                let (a, la) = osc_log(n1, p.d, p.c(), u1);
                let (b, lb) = osc_log(n2, nu, p.c(), u2);
                finite(a * b * (self.log_norm + la + lb).exp(), u1)
            }
            P1Quantum::EllipticParabolic { .. } | P1Quantum::HyperbolicParabolic { .. } => {
                let roots = self.roots.as_ref().ok_or_else(|| Error::InvalidParams("parabolic state without roots".into()))?;
                let (sg, l) = parabolic::log_raw(p, self.chart(), roots, u1, u2);
                finite(sg * (self.log_norm + l).exp(), u1)
            }
        }
    }

    /// Value at an ambient point; the point is mapped to the state's chart.
    pub fn eval_ambient(&self, q: &AmbientPoint) -> Result<f64> {
        if self.chart() == Chart::Horicyclic {
            let dm = q.w0 - q.w1;
            return self.eval_chart(q.w2 / dm, 1.0 / dm);
        }
        let c = ambient_to_chart(q, self.chart(), None)?;
        self.eval_chart(c.u1, c.u2)
    }

    /// Map chart coordinates of this state's chart to the hyperboloid.
    pub fn chart_point(&self, u1: f64, u2: f64) -> Result<AmbientPoint> {
        chart_to_ambient(&ChartPoint::new(self.chart(), u1, u2))
    }
}

fn finite(v: f64, at: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(at))
    }
}

fn horicyclic_nu(p: &P1Params, level: usize) -> Result<f64> {
    let e = p1_energy(p, level)?;
    let arg = -2.0 * e + 0.25;
    if arg <= 0.0 {
        return Err(Error::BoundaryState);
    }
    Ok(arg.sqrt())
}

pub(crate) fn s1_log_norm(d: f64, n: usize, mu: f64) -> Result<f64> {
    let nf = n as f64;
    Ok(0.5
        * ((2.0 * (mu - d - 2.0 * nf - 1.0)).ln() + lg(mu - nf)? + ln_factorial(n)
            - lg(mu - d - nf)?
            - lg(1.0 + nf + d)?))
}

fn s2_log_norm(m: usize, mu: f64) -> Result<f64> {
    Ok(0.5 * ((2.0 * mu).ln() + ln_factorial(m) - lg(m as f64 + mu + 1.0)?))
}

fn osc_log_norm(n: usize, a: f64, c: f64) -> Result<f64> {
    Ok(0.5 * (ln_factorial(n) + 0.5 * c.ln() - lg(n as f64 + a + 1.0)?))
}

// sign and log magnitude of P_n^{(a,b)}(cosh 2t), asymptotic far out
fn jacobi_cosh2_log(n: usize, a: f64, b: f64, t: f64) -> (f64, f64) {
    let ly = ln_cosh(2.0 * t);
    if ly < 80.0 || n == 0 {
        let v = jacobi_real(n, a, b, (2.0 * t).cosh());
        return (v.signum(), v.abs().ln());
    }
    // leading coefficient (n + a + b + 1)_n / (2^n n!)
    let mut lead = 1.0;
    for k in 0..n {
        lead *= (n as f64 + a + b + 1.0 + k as f64) / (2.0 * (k as f64 + 1.0));
    }
    if lead == 0.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    (lead.signum(), lead.abs().ln() + n as f64 * ly)
}

/// Sign and log magnitude of the bare τ1 factor (without its normalization).
pub(crate) fn s1_log(d: f64, n: usize, mu: f64, t1: f64) -> (f64, f64) {
    if t1 == 0.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    let (sg, lp) = jacobi_cosh2_log(n, d, -mu, t1);
    (sg, (0.5 + d) * ln_sinh_abs(t1) + (0.5 - mu) * ln_cosh(t1) + lp)
}

/// Sign and log magnitude of the bare τ2 factor.
fn s2_log(p: &P1Params, m: usize, mu: f64, t2: f64) -> (f64, f64) {
    let lz = p.c().ln() + 2.0 * t2;
    if lz > 20.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    let z = lz.exp();
    let l = laguerre(m, mu, z);
    (l.signum(), -0.5 * z + 0.5 * mu * lz + l.abs().ln())
}

/// Sign and log magnitude of e^{−u/2} u^{(1/2+a)/2} L_n^a(u), u = c x².
fn osc_log(n: usize, a: f64, c: f64, x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    let u = c * x * x;
    if u > 1e6 {
        return (0.0, f64::NEG_INFINITY);
    }
    let l = laguerre(n, a, u);
    (l.signum(), -0.5 * u + 0.5 * (0.5 + a) * u.ln() + l.abs().ln())
}

/// Normalized τ1 factor S1 (unit norm on τ1 > 0).
pub fn s1_factor(p: &P1Params, n: usize, m: usize, t1: f64) -> Result<f64> {
    let mu = p.check_nm(n, m)?;
    let (sg, l) = s1_log(p.d, n, mu, t1);
    finite(sg * (s1_log_norm(p.d, n, mu)? + l).exp(), t1)
}

/// Normalized τ2 factor S2 (unit norm on the whole line).
pub fn s2_factor(p: &P1Params, m: usize, t2: f64) -> Result<f64> {
    let mu = super::p1_mu(p, m)?;
    let (sg, l) = s2_log(p, m, mu, t2);
    finite(sg * (s2_log_norm(m, mu)? + l).exp(), t2)
}

/// Horicyclic x factor; ∫ψ1² dx = 1 over the whole line.
pub fn psi1_factor(p: &P1Params, n1: usize, x: f64) -> Result<f64> {
    let (sg, l) = osc_log(n1, p.d, p.c(), x);
    finite(sg * (osc_log_norm(n1, p.d, p.c())? + l).exp(), x)
}

/// Horicyclic y factor at level N, scaled so that ∫₀^∞ ψ2² dy = 1.
pub fn psi2_factor(p: &P1Params, n_level: usize, n2: usize, y: f64) -> Result<f64> {
    if n2 > n_level {
        return Err(Error::InvalidParams(format!("n2 = {n2} above level {n_level}")));
    }
    let nu = horicyclic_nu(p, n_level)?;
    let (sg, l) = osc_log(n2, nu, p.c(), y);
    finite(SQRT_2 * sg * (osc_log_norm(n2, nu, p.c())? + l).exp(), y)
}

/// Ψ_{nm}(τ1, τ2) of the equidistant chart.
pub fn p1_wf_equidistant(state: &P1State, t1: f64, t2: f64) -> Result<f64> {
    match state.quantum {
        P1Quantum::Equidistant { .. } => state.eval_chart(t1, t2),
        _ => Err(Error::InvalidParams("not an equidistant state".into())),
    }
}

/// ψ_{n1 n2}(x, y) of the horicyclic chart.
pub fn p1_wf_horicyclic(state: &P1State, x: f64, y: f64) -> Result<f64> {
    match state.quantum {
        P1Quantum::Horicyclic { .. } => state.eval_chart(x, y),
        _ => Err(Error::InvalidParams("not a horicyclic state".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential1::tests::fixture;
    use crate::specfun::{integrate_adaptive, QuadratureSpec};

    #[test]
    fn s2_normalized_and_nodeless() {
        let p = fixture();
        for m in 0..=3 {
            let (v, _) =
                integrate_adaptive(|t| s2_factor(&p, m, t).unwrap().powi(2), &QuadratureSpec::real_line(3), 1e-11, 9).unwrap();
            assert!((v - 1.0).abs() < 1e-8, "m = {m}: {v}");
        }
        let signs: Vec<f64> = (-40..10).map(|k| s2_factor(&p, 0, k as f64 * 0.25).unwrap().signum()).collect();
        assert!(signs.iter().all(|&s| s > 0.0));
    }

    #[test]
    fn s1_normalized_on_half_line() {
        let p = fixture();
        for (n, m) in [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (0, 2)] {
            let (v, _) =
                integrate_adaptive(|t| s1_factor(&p, n, m, t).unwrap().powi(2), &QuadratureSpec::half_line(3, 0.0), 1e-11, 9)
                    .unwrap();
            assert!((v - 1.0).abs() < 1e-8, "({n},{m}): {v}");
        }
    }

    #[test]
    fn s1_first_excited_has_one_zero() {
        let p = fixture();
        let vals: Vec<f64> = (1..2000).map(|k| s1_factor(&p, 1, 0, k as f64 * 0.005).unwrap()).collect();
        let changes = vals.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
        assert_eq!(changes, 1);
    }

    #[test]
    fn horicyclic_factors_normalized() {
        let p = fixture();
        for n1 in 0..=2 {
            let (v, _) =
                integrate_adaptive(|x| psi1_factor(&p, n1, x).unwrap().powi(2), &QuadratureSpec::real_line(3), 1e-11, 9).unwrap();
            assert!((v - 1.0).abs() < 1e-8, "{v}");
        }
        for n in 0..=2 {
            for n2 in 0..=n {
                let (v, _) = integrate_adaptive(
                    |y| psi2_factor(&p, n, n2, y).unwrap().powi(2),
                    &QuadratureSpec::half_line(3, 0.0),
                    1e-11,
                    9,
                )
                .unwrap();
                assert!((v - 1.0).abs() < 1e-8, "{v}");
            }
        }
        let a = psi1_factor(&p, 1, 0.7).unwrap();
        assert!((psi1_factor(&p, 1, -0.7).unwrap() - a).abs() < 1e-15);
    }

    #[test]
    fn far_tails_are_zero_not_nan() {
        let p = fixture();
        let st = P1State::equidistant(&p, 2, 0).unwrap();
        for (a, b) in [(400.0, 0.0), (0.5, 400.0), (0.5, -400.0), (800.0, -800.0)] {
            let v = st.eval_chart(a, b).unwrap();
            assert!(v.is_finite() && v.abs() < 1e-80, "{v}");
        }
        let h = P1State::horicyclic(&p, 1, 1).unwrap();
        assert_eq!(h.eval_chart(1e6, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn ambient_evaluation_matches_chart() {
        let p = fixture();
        let st = P1State::equidistant(&p, 1, 1).unwrap();
        let q = st.chart_point(0.6, -0.2).unwrap();
        assert!((st.eval_ambient(&q).unwrap() - st.eval_chart(0.6, -0.2).unwrap()).abs() < 1e-13);
        let h = P1State::horicyclic(&p, 1, 0).unwrap();
        let q = h.chart_point(0.4, 0.9).unwrap();
        assert!((h.eval_ambient(&q).unwrap() - h.eval_chart(0.4, 0.9).unwrap()).abs() < 1e-13);
    }
}
