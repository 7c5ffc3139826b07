//! The second potential
//! V2 = α²/w2² + γ² w0 w1/(w0²+w1²)² + (α²−β²)(w0²−w1²)/(w0²+w1²)².

mod semihyperbolic;

pub use semihyperbolic::{
    p2_sh_energy, p2_sh_lambda, p2_sh_lambda_printed, p2_sh_roots, p2_wf_semihyperbolic, sh_factor_partial_fractions,
    sh_factor_rational, sh_zero_equations, ComplexBetheRoots, ShSolverOptions,
};

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::geometry::{ambient_to_chart, chart_to_ambient, AmbientPoint, Chart, ChartPoint, SemiHyperbolicParams};
use crate::potential1::{lg, s1_log, s1_log_norm};
use crate::specfun::{jacobi, ln_cosh, ln_factorial, log_gamma};

const WINDOW_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P2Params {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// 2β² − 2α² + 1
    pub b: f64,
    /// sqrt(B + sqrt(B² + γ⁴))/√2
    pub m_big: f64,
    /// Root of a² = (B − iγ²)/4 with Re a < 0.
    pub a: C64,
    /// sqrt(2α² + 1/4)
    pub d: f64,
}

impl P2Params {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive and finite, got {v}")));
            }
        }
        let b = 2.0 * beta * beta - 2.0 * alpha * alpha + 1.0;
        let r = b.hypot(gamma * gamma);
        let scale = 2f64.powf(1.5);
        // r − b loses digits when γ² ≪ |b|; use (r − b)(r + b) = γ⁴
        let (re, im) = if b >= 0.0 {
            let p = (r + b).sqrt();
            (-p / scale, gamma * gamma / p / scale)
        } else {
            let q = (r - b).sqrt();
            (-(gamma * gamma) / q / scale, q / scale)
        };
        Ok(P2Params {
            alpha,
            beta,
            gamma,
            b,
            m_big: -2.0 * re,
            a: C64::new(re, im),
            d: (2.0 * alpha * alpha + 0.25).sqrt(),
        })
    }

    /// (k1, k2, k3) = (a, a*, d).
    pub fn k(&self) -> [C64; 3] {
        [self.a, self.a.conj(), C64::new(self.d, 0.0)]
    }

    pub fn nu(&self, n: usize) -> f64 {
        self.m_big - self.d - 2.0 * n as f64 - 2.0
    }

    /// floor(M/2 − d/2 − 1), excluding the E = 1/8 boundary.
    pub fn nmax(&self) -> Option<usize> {
        let x = self.m_big / 2.0 - self.d / 2.0 - 1.0;
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

    /// floor((M − 1)/2), the integer bound included.
    pub fn m_max(&self) -> Option<usize> {
        let x = (self.m_big - 1.0) / 2.0;
        (x >= -WINDOW_EPS).then(|| (x + WINDOW_EPS).floor() as usize)
    }

    pub fn check_nm(&self, n: usize, m: usize) -> Result<f64> {
        let mu = p2_mu(self, m)?;
        if mu - self.d - 2.0 * n as f64 - 1.0 <= WINDOW_EPS {
            return Err(Error::OutOfWindow(format!("n = {n} needs mu - d - 2n - 1 > 0 (mu = {mu})")));
        }
        Ok(mu)
    }

    pub fn level_states(&self, n_level: usize) -> Result<Vec<(usize, usize)>> {
        p2_energy(self, n_level)?;
        Ok((0..=n_level).map(|m| (n_level - m, m)).filter(|&(n, m)| self.check_nm(n, m).is_ok()).collect())
    }
}

/// V2 at an ambient point.
pub fn v2_ambient(p: &P2Params, q: &AmbientPoint) -> Result<f64> {
    if q.w2 == 0.0 {
        return Err(Error::Singular("V2 needs w2 != 0".into()));
    }
    let r = q.w0 * q.w0 + q.w1 * q.w1;
    let (a2, b2, g2) = (p.alpha.powi(2), p.beta.powi(2), p.gamma.powi(2));
    Ok(a2 / (q.w2 * q.w2) + g2 * q.w0 * q.w1 / (r * r) + (a2 - b2) * (q.w0 * q.w0 - q.w1 * q.w1) / (r * r))
}

fn v2_equidistant_signed(p: &P2Params, t1: f64, t2: f64, sign: f64) -> f64 {
    let (a2, b2, g2) = (p.alpha.powi(2), p.beta.powi(2), p.gamma.powi(2));
    let (c2, s2) = (t2.cosh(), t2.sinh());
    let w = c2 * c2 + s2 * s2;
    sign * a2 / t1.sinh().powi(2) + (a2 - b2 + g2 * c2 * s2) / (t1.cosh().powi(2) * w * w)
}

/// V2 in equidistant coordinates, with the α² term as +α²/sinh²τ1.
pub fn v2_equidistant(p: &P2Params, t1: f64, t2: f64) -> f64 {
    v2_equidistant_signed(p, t1, t2, 1.0)
}

/// The equidistant form as transcribed, with −α²/sinh²τ1.
pub fn v2_equidistant_printed(p: &P2Params, t1: f64, t2: f64) -> f64 {
    v2_equidistant_signed(p, t1, t2, -1.0)
}

/// μ = M − 2m − 1.
pub fn p2_mu(p: &P2Params, m: usize) -> Result<f64> {
    match p.m_max() {
        Some(mm) if m <= mm => Ok(p.m_big - 2.0 * m as f64 - 1.0),
        _ => Err(Error::OutOfWindow(format!("m = {m} outside 0..=floor((M - 1)/2) with M = {}", p.m_big))),
    }
}

/// E_N = −(2N + 2 + d − M)²/2 + 1/8.
pub fn p2_energy(p: &P2Params, n_level: usize) -> Result<f64> {
    let top = p.m_big / 2.0 - p.d / 2.0 - 1.0;
    if top < 0.0 || n_level as f64 > top + WINDOW_EPS {
        return Err(Error::NoBoundState(format!("N = {n_level} outside 0..=floor(M/2 - d/2 - 1) with M = {}, d = {}", p.m_big, p.d)));
    }
    if p.nu(n_level).abs() <= WINDOW_EPS {
        return Err(Error::BoundaryState);
    }
    let x = 2.0 * n_level as f64 + 2.0 + p.d - p.m_big;
    Ok(-0.5 * x * x + 0.125)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum P2Quantum {
    Equidistant { n: usize, m: usize },
    SemiHyperbolic { level: usize },
}

/// A bound state of V2, normalized on the half sheet w2 > 0 and divided by a
/// constant phase so that it is real.
#[derive(Debug, Clone, PartialEq)]
pub struct P2State {
    pub params: P2Params,
    pub quantum: P2Quantum,
    pub roots: Option<ComplexBetheRoots>,
    pub chart_params: Option<SemiHyperbolicParams>,
    pub log_norm: f64,
    /// Unit-modulus constant removed from the bare product form.
    pub phase: C64,
}

impl P2State {
    pub fn equidistant(p: &P2Params, n: usize, m: usize) -> Result<Self> {
        let mu = p.check_nm(n, m)?;
        p2_energy(p, n + m)?;
        let log_norm = s1_log_norm(p.d, n, mu)? + s_log_norm(p, m, mu)?;
        let at0 = s_log(p, m, 0.0);
        let phase = if at0.re > -600.0 { C64::from_polar(1.0, at0.im) } else { C64::new(1.0, 0.0) };
        Ok(P2State { params: *p, quantum: P2Quantum::Equidistant { n, m }, roots: None, chart_params: None, log_norm, phase })
    }

    /// Semi-hyperbolic state on a root configuration, normalized by quadrature.
    pub fn semi_hyperbolic(p: &P2Params, roots: ComplexBetheRoots) -> Result<Self> {
        semihyperbolic::build_state(p, roots)
    }

    pub fn chart(&self) -> Chart {
        match self.quantum {
            P2Quantum::Equidistant { .. } => Chart::Equidistant,
            P2Quantum::SemiHyperbolic { .. } => Chart::SemiHyperbolic,
        }
    }

    pub fn level(&self) -> usize {
        match self.quantum {
            P2Quantum::Equidistant { n, m } => n + m,
            P2Quantum::SemiHyperbolic { level } => level,
        }
    }

    pub fn energy(&self) -> Result<f64> {
        p2_energy(&self.params, self.level())
    }

    pub fn eval_ambient(&self, q: &AmbientPoint) -> Result<C64> {
        match self.quantum {
            P2Quantum::Equidistant { .. } => {
                let c = ambient_to_chart(q, Chart::Equidistant, None)?;
                self.eval_chart(c.u1, c.u2)
            }
            P2Quantum::SemiHyperbolic { .. } => semihyperbolic::eval(self, q),
        }
    }

    /// Value at coordinates of the state's chart; (μ, ν) for semi-hyperbolic.
    pub fn eval_chart(&self, u1: f64, u2: f64) -> Result<C64> {
        match self.quantum {
            P2Quantum::Equidistant { n, m } => {
                let p = &self.params;
                let mu = p.m_big - 2.0 * m as f64 - 1.0;
                let (sg, lz) = s1_log(p.d, n, mu, u1);
                let ls = s_log(p, m, u2);
                let l = ls + (self.log_norm + lz - 0.5 * ln_cosh(u1));
                let v = sg * l.exp() / self.phase;
                if v.re.is_finite() && v.im.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFinite(u1))
                }
            }
            P2Quantum::SemiHyperbolic { .. } => {
                let cp = self.chart_params.ok_or_else(|| Error::InvalidParams("chart params missing".into()))?;
                let q = chart_to_ambient(&ChartPoint::semi_hyperbolic(u1, u2, cp))?;
                semihyperbolic::eval(self, &q)
            }
        }
    }
}

fn s_log_norm(p: &P2Params, m: usize, mu: f64) -> Result<f64> {
    let ma = C64::new(-(m as f64), 0.0) - p.a;
    let v = ln_factorial(m) + 2.0 * log_gamma(ma)?.re - lg(p.m_big - m as f64)? + mu.ln()
        - PI.ln()
        - (1.0 - p.m_big) * std::f64::consts::LN_2;
    Ok(0.5 * v)
}

// complex log of the bare τ2 factor (1+ix)^{a/2+1/4}(1−ix)^{a*/2+1/4}P_m^{(a,a*)}(−ix), x = sinh 2τ2
fn s_log(p: &P2Params, m: usize, t2: f64) -> C64 {
    if t2.abs() > 300.0 {
        return C64::new(f64::NEG_INFINITY, 0.0);
    }
    let x = (2.0 * t2).sinh();
    let ln_mod = if x.abs() > 1.0 { x.abs().ln() + 0.5 * (1.0 / (x * x)).ln_1p() } else { 0.5 * (x * x).ln_1p() };
    let arg = x.atan();
    let lp = C64::new(ln_mod, arg);
    let lm = C64::new(ln_mod, -arg);
    let ac = p.a.conj();
    let mut acc = (p.a / 2.0 + 0.25) * lp + (ac / 2.0 + 0.25) * lm;
    if m > 0 {
        let y = C64::new(0.0, -x);
        let pm = if x.abs() > 1e30 {
            // leading term (m + a + a* + 1)_m/(2^m m!) y^m
            let mut lead = C64::new(1.0, 0.0);
            for k in 0..m {
                lead *= (p.a + ac + (m + k) as f64 + 1.0) / (2.0 * (k as f64 + 1.0));
            }
            lead.ln() + m as f64 * y.ln()
        } else {
            jacobi(m, p.a, ac, y).ln()
        };
        acc += pm;
    }
    acc
}

/// Normalized τ2 factor S_m divided by its phase at τ2 = 0.
pub fn s_factor(p: &P2Params, m: usize, t2: f64) -> Result<C64> {
    let mu = p2_mu(p, m)?;
    let at0 = s_log(p, m, 0.0);
    let v = (s_log(p, m, t2) + s_log_norm(p, m, mu)? - C64::new(0.0, at0.im)).exp();
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(t2))
    }
}

/// Ψ_{nm}(τ1, τ2) of the equidistant chart.
pub fn p2_wf_equidistant(state: &P2State, t1: f64, t2: f64) -> Result<C64> {
    match state.quantum {
        P2Quantum::Equidistant { .. } => state.eval_chart(t1, t2),
        _ => Err(Error::InvalidParams("not an equidistant state".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate_adaptive, QuadratureSpec};

    pub(crate) fn fixture() -> P2Params {
        P2Params::new(0.1, 3.0, 1.0).unwrap()
    }

    #[test]
    fn branch_and_constants() {
        let p = fixture();
        let res = p.a * p.a - C64::new(p.b, -p.gamma.powi(2)) / 4.0;
        assert!(res.norm() < 1e-13);
        assert!(p.a.re < 0.0);
        assert!((2.0 * p.a.re + p.m_big).abs() < 1e-12);
        assert!((p.m_big - 4.358114573).abs() < 1e-8);
        assert_eq!(p.nmax(), Some(0));
        assert_eq!(p.m_max(), Some(1));
    }

    #[test]
    fn energy_window() {
        let p = fixture();
        assert!((p2_energy(&p, 0).unwrap() + 1.5650398946).abs() < 1e-9);
        assert!(matches!(p2_energy(&p, 1), Err(Error::NoBoundState(_))));
        let mu = p2_mu(&p, 0).unwrap();
        assert_eq!(mu + 1.0 - p.m_big, 0.0);
        let via_a = -1.0 - (p.a + p.a.conj()).re;
        assert!((mu - via_a).abs() < 1e-12);
    }

    #[test]
    fn alpha_sign_in_chart_form() {
        let p = P2Params::new(0.7, 1.2, 0.9).unwrap();
        for (t1, t2) in [(0.3, 0.2), (1.1, -0.7), (-0.4, 0.5)] {
            let q = chart_to_ambient(&ChartPoint::new(Chart::Equidistant, t1, t2)).unwrap();
            let v = v2_ambient(&p, &q).unwrap();
            assert!((v - v2_equidistant(&p, t1, t2)).abs() < 1e-12 * v.abs().max(1.0));
            assert!((v - v2_equidistant_printed(&p, t1, t2)).abs() > 1e-3);
        }
        assert!(v2_ambient(&p, &AmbientPoint::new(1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn s_factor_normalized_and_real() {
        let p = P2Params::new(0.1, 5.0, 1.0).unwrap();
        for m in 0..=p.m_max().unwrap() {
            let (v, _) =
                integrate_adaptive(|t| s_factor(&p, m, t).unwrap().norm_sqr(), &QuadratureSpec::real_line(3), 1e-11, 9).unwrap();
            assert!((v - 1.0).abs() < 1e-8, "m = {m}: {v}");
            for k in -30..30 {
                let s = s_factor(&p, m, k as f64 * 0.1).unwrap();
                assert!(s.im.abs() <= 1e-10 * (1.0 + s.norm()), "{m} {k} {s}");
            }
        }
        let s0 = s_factor(&p, 0, 0.0).unwrap();
        assert!(s0.re > 0.0 && s0.im == 0.0);
    }

    #[test]
    fn equidistant_state_normalized() {
        let p = fixture();
        let st = P2State::equidistant(&p, 0, 0).unwrap();
        let f = |t1: f64| {
            if t1 > 300.0 {
                return 0.0;
            }
            let (v, _) = integrate_adaptive(
                |t2| st.eval_chart(t1, t2).unwrap().norm_sqr() * t1.cosh(),
                &QuadratureSpec::real_line(3),
                1e-12,
                9,
            )
            .unwrap();
            v
        };
        let (v, _) = integrate_adaptive(f, &QuadratureSpec::half_line(3, 0.0), 1e-10, 8).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
    }
}
