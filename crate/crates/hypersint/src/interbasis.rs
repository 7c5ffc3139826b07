//! Expansion of the horicyclic states of V1 over the equidistant states of
//! the same level: Ψ_{n1 n2} = Σ_m W[n1][m] Ψ_{n m}, n = N − m.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::potential1::{lg, p1_energy, P1Params, P1State};
use crate::specfun::{hahn, hyp3f2_unit, integrate, jacobi_real, ln_factorial, log_gamma, QuadratureSpec, Rule, Transform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WMethod {
    Quadrature,
    Hyp3F2,
    Hahn,
    PrintedQuadrature,
    Printed3F2,
    PrintedHahn,
}

impl WMethod {
    pub fn name(self) -> &'static str {
        match self {
            WMethod::Quadrature => "quadrature",
            WMethod::Hyp3F2 => "3f2",
            WMethod::Hahn => "hahn",
            WMethod::PrintedQuadrature => "printed-quadrature",
            WMethod::Printed3F2 => "printed-3f2",
            WMethod::PrintedHahn => "printed-hahn",
        }
    }
}

impl fmt::Display for WMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for WMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "quadrature" => WMethod::Quadrature,
            "3f2" => WMethod::Hyp3F2,
            "hahn" => WMethod::Hahn,
            "printed-quadrature" => WMethod::PrintedQuadrature,
            "printed-3f2" => WMethod::Printed3F2,
            "printed-hahn" => WMethod::PrintedHahn,
            _ => return Err(Error::Config(format!("unknown interbasis method '{s}'"))),
        })
    }
}

/// Coefficients of one level; row n1, column m. Entries a transcription
/// cannot produce (pole, divergent integral) are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct InterbasisMatrix {
    pub level: usize,
    pub method: WMethod,
    pub w: DMatrix<f64>,
}

impl InterbasisMatrix {
    pub fn get(&self, n1: usize, m: usize) -> f64 {
        self.w[(n1, m)]
    }

    /// max |WᵀW − I|.
    pub fn orthogonality_defect(&self) -> f64 {
        let k = self.w.nrows();
        (self.w.transpose() * &self.w - DMatrix::identity(k, k)).abs().max()
    }

    /// max |A − B| entrywise; NaN entries count as infinite.
    pub fn max_diff(&self, other: &InterbasisMatrix) -> f64 {
        self.w.iter().zip(other.w.iter()).fold(0.0f64, |m, (a, b)| {
            let d = (a - b).abs();
            if d.is_nan() {
                f64::INFINITY
            } else {
                m.max(d)
            }
        })
    }
}

struct Entry {
    n: usize,
    n1: usize,
    n2: usize,
    m: usize,
    mu: f64,
    nu: f64,
    d: f64,
}

fn entries(p: &P1Params, n_level: usize) -> Result<Vec<Entry>> {
    p1_energy(p, n_level)?;
    let nu = p.nu(n_level);
    let mut out = Vec::new();
    for n1 in 0..=n_level {
        for m in 0..=n_level {
            let mu = p.check_nm(n_level - m, m)?;
            out.push(Entry { n: n_level - m, n1, n2: n_level - n1, m, mu, nu, d: p.d });
        }
    }
    Ok(out)
}

fn sign(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

// ∫₀^∞ sinh^{1+2d+2n1} cosh^{−c_exp} P_n^{(d,−μ)}(cosh 2a) da after u = tanh a, u = 1 − w²
fn overlap_integral(e: &Entry, c_exp: f64) -> Result<f64> {
    let s_exp = 1.0 + 2.0 * e.d + 2.0 * e.n1 as f64;
    // power of (1 − u²) after the substitution, P_n's pole included
    let tail = (c_exp - s_exp) / 2.0 - 1.0 - e.n as f64;
    if tail <= -1.0 {
        return Err(Error::QuadratureFailure(format!("divergent overlap integral (tail exponent {tail})")));
    }
    let f = |w: f64| {
        let u = 1.0 - w * w;
        if u <= 0.0 || w <= 0.0 {
            return 0.0;
        }
        let v = (1.0 - u) * (1.0 + u);
        let x = (1.0 + u * u) / v;
        // (1 − u²)^n P_n(x), finite as u → 1
        let pn = jacobi_real(e.n, e.d, -e.mu, x) * v.powi(e.n as i32);
        u.powf(s_exp) * v.powf(tail) * pn * 2.0 * w
    };
    let mut prev = None;
    for level in 3..=10 {
        let spec = QuadratureSpec::new(Rule::GaussLegendre, level, 0.0, 1.0, Transform::None);
        let (v, _) = integrate(f, &spec)?;
        if let Some(p) = prev {
            let diff: f64 = v - p;
            if diff.abs() <= 1e-10 * v.abs().max(1e-300) {
                return Ok(v);
            }
        }
        prev = Some(v);
    }
    Err(Error::QuadratureFailure("overlap integral did not reach 1e-10 by level 10".into()))
}

// common log prefactor of the closed forms
fn closed_log_prefactor(e: &Entry) -> Result<f64> {
    let (n, n1, n2, m) = (e.n as f64, e.n1 as f64, e.n2 as f64, e.m as f64);
    let (mu, nu, d) = (e.mu, e.nu, e.d);
    Ok(0.5
        * (mu.ln() + ln_factorial(e.m) + lg(n1 + d + 1.0)?
            - ln_factorial(e.n)
            - ln_factorial(e.n1)
            - ln_factorial(e.n2)
            - lg(n2 + nu + 1.0)?
            - lg(n + d + 1.0)?
            - lg(mu - d - n)?
            - lg(mu + m + 1.0)?
            - lg(mu - n)?))
}

fn real_gamma(x: f64) -> Result<f64> {
    Ok(log_gamma(C64::new(x, 0.0))?.exp().re)
}

fn quadrature_entry(e: &Entry) -> Result<f64> {
    let (n, n1, n2, m) = (e.n as f64, e.n1 as f64, e.n2 as f64, e.m as f64);
    let (mu, nu, d) = (e.mu, e.nu, e.d);
    let lp = 0.5
        * ((4.0 * mu).ln() + ln_factorial(e.m) + ln_factorial(e.n) + lg(mu + m + 1.0)? + lg(mu - n)?
            - ln_factorial(e.n1)
            - ln_factorial(e.n2)
            - lg(n1 + d + 1.0)?
            - lg(n2 + nu + 1.0)?
            - lg(n + d + 1.0)?
            - lg(mu - d - n)?);
    let b = overlap_integral(e, 1.0 + 2.0 * mu + 2.0 * m)?;
    Ok(sign(e.n) * lp.exp() * b)
}

fn hyp3f2_entry(e: &Entry) -> Result<f64> {
    let (n, n1, m) = (e.n as f64, e.n1 as f64, e.m as f64);
    let (mu, d) = (e.mu, e.d);
    let r = |x: f64| C64::new(x, 0.0);
    let f = hyp3f2_unit(e.n, r(n + d - mu + 1.0), r(-mu - m), r(1.0 - mu), r(1.0 + d + n1 - mu - m))?;
    let g = (log_gamma(r(mu))? + log_gamma(r(mu + m - d - n1))?).exp();
    Ok(sign(e.n) * closed_log_prefactor(e)?.exp() * (g * f).re)
}

fn hahn_entry(e: &Entry) -> Result<f64> {
    let (n, n1, m) = (e.n as f64, e.n1 as f64, e.m as f64);
    let (mu, d) = (e.mu, e.d);
    let big_n = mu + m - d - n1;
    let r = |x: f64| C64::new(x, 0.0);
    let h = hahn(e.n, r(d), r(-mu), r(mu + m), r(big_n))?;
    let g = (log_gamma(r(big_n - n))? + log_gamma(r(mu - n))?).exp();
    Ok(sign(e.n) * closed_log_prefactor(e)?.exp() * (ln_factorial(e.n).exp() * g * h).re)
}

// the transcriptions below keep the displayed prefactors, Gamma arguments and
// Hahn/₃F₂ parameters, with d in Γ(n2 + d + 1)
fn printed_quadrature_entry(p: &P1Params, e: &Entry) -> Result<f64> {
    let (n, n1, n2, m) = (e.n as f64, e.n1 as f64, e.n2 as f64, e.m as f64);
    let (mu, d) = (e.mu, e.d);
    let lp = 0.5
        * (ln_factorial(e.m) + ln_factorial(e.n) + (p.c() * (mu - d - 2.0 * n - 1.0)).ln() + lg(mu + m + 1.0)? + lg(mu - n)?
            - ln_factorial(e.n1)
            - ln_factorial(e.n2)
            - mu.ln()
            - lg(n1 + d + 1.0)?
            - lg(n2 + d + 1.0)?
            - lg(n + d + 1.0)?
            - lg(mu - d - n)?);
    let b = 2.0 * overlap_integral(e, 2.0 * mu + 2.0 * m - 1.0)?;
    Ok(sign(e.n) * lp.exp() * b)
}

fn printed_hyp3f2_entry(p: &P1Params, e: &Entry) -> Result<f64> {
    let (n, n1, n2, m) = (e.n as f64, e.n1 as f64, e.n2 as f64, e.m as f64);
    let (mu, d) = (e.mu, e.d);
    let g = real_gamma;
    let pref = (ln_factorial(e.m).exp() * p.c() * (mu - d - 2.0 * n - 1.0) * (mu + m) * g(n1 + d + 1.0)?
        / (ln_factorial(e.n).exp()
            * ln_factorial(e.n1).exp()
            * ln_factorial(e.n2).exp()
            * mu
            * g(n2 + d + 1.0)?
            * g(n + d + 1.0)?
            * g(mu - n - d)?))
        .sqrt();
    let gam = g(mu)? * g(mu + m - d - n1 - 1.0)? / (g(mu - n)? * g(mu + m)?).sqrt();
    let r = |x: f64| C64::new(x, 0.0);
    let f = hyp3f2_unit(e.n, r(n + d - mu + 1.0), r(1.0 - mu - m), r(1.0 - mu), r(2.0 + n1 + d - mu - m))?;
    Ok(sign(e.n) / 2.0 * pref * gam * f.re)
}

fn printed_hahn_entry(p: &P1Params, e: &Entry) -> Result<f64> {
    let (n, n1, n2, m) = (e.n as f64, e.n1 as f64, e.n2 as f64, e.m as f64);
    let (mu, d) = (e.mu, e.d);
    let g = real_gamma;
    let pref = (ln_factorial(e.m).exp() * ln_factorial(e.n).exp() * p.c() * (mu - d - 2.0 * n - 1.0) * (mu + m)
        / (ln_factorial(e.n1).exp() * ln_factorial(e.n2).exp() * mu * g(n + d + 1.0)? * g(mu - n - d)?))
        .sqrt();
    let p2 = (g(n1 + d + 1.0)? * g(mu - n)? / (g(n2 + d + 1.0)? * g(mu + m)?)).sqrt();
    let r = |x: f64| C64::new(x, 0.0);
    let h = hahn(e.n, r(d), r(-mu), r(mu + m + 1.0), r(mu + m - d - n1 - 1.0))?;
    Ok(sign(e.n) / 2.0 * pref * p2 * g(mu + m - d - n1 - n - 1.0)? * h.re)
}

fn assemble(p: &P1Params, n_level: usize, method: WMethod) -> Result<InterbasisMatrix> {
    let k = n_level + 1;
    let mut w = DMatrix::from_element(k, k, f64::NAN);
    for e in entries(p, n_level)? {
        let v = match method {
            WMethod::Quadrature => quadrature_entry(&e)?,
            WMethod::Hyp3F2 => hyp3f2_entry(&e)?,
            WMethod::Hahn => hahn_entry(&e)?,
            WMethod::PrintedQuadrature => printed_quadrature_entry(p, &e).unwrap_or(f64::NAN),
            WMethod::Printed3F2 => printed_hyp3f2_entry(p, &e).unwrap_or(f64::NAN),
            WMethod::PrintedHahn => printed_hahn_entry(p, &e).unwrap_or(f64::NAN),
        };
        w[(e.n1, e.m)] = v;
    }
    Ok(InterbasisMatrix { level: n_level, method, w })
}

/// W from the overlap integral, evaluated by Gauss–Legendre quadrature.
pub fn w_quadrature(p: &P1Params, n_level: usize) -> Result<InterbasisMatrix> {
    assemble(p, n_level, WMethod::Quadrature)
}

/// W in closed form through a terminating ₃F₂ at unit argument.
pub fn w_3f2(p: &P1Params, n_level: usize) -> Result<InterbasisMatrix> {
    assemble(p, n_level, WMethod::Hyp3F2)
}

/// W in closed form through Hahn polynomials.
pub fn w_hahn(p: &P1Params, n_level: usize) -> Result<InterbasisMatrix> {
    assemble(p, n_level, WMethod::Hahn)
}

/// Any of the six constructions, including the literal transcriptions.
pub fn w_matrix(p: &P1Params, n_level: usize, method: WMethod) -> Result<InterbasisMatrix> {
    assemble(p, n_level, method)
}

/// max over points and rows of |Ψ_{n1 n2}(x, y) − Σ_m W Ψ_{nm}(a, b)| / scale,
/// with x = e^b tanh a, y = e^b / cosh a and scale the largest |Ψ_{n1 n2}| seen.
pub fn verify_expansion(p: &P1Params, w: &InterbasisMatrix, points: &[(f64, f64)]) -> Result<f64> {
    let n_level = w.level;
    let eq: Vec<P1State> = (0..=n_level).map(|m| P1State::equidistant(p, n_level - m, m)).collect::<Result<_>>()?;
    let hc: Vec<P1State> = (0..=n_level).map(|n1| P1State::horicyclic(p, n1, n_level - n1)).collect::<Result<_>>()?;
    let mut scale = 0.0f64;
    let mut worst = 0.0f64;
    for &(a, b) in points {
        let (x, y) = (b.exp() * a.tanh(), b.exp() / a.cosh());
        let ev: Vec<f64> = eq.iter().map(|s| s.eval_chart(a, b)).collect::<Result<_>>()?;
        for (n1, h) in hc.iter().enumerate() {
            let lhs = h.eval_chart(x, y)?;
            let rhs: f64 = (0..=n_level).map(|m| w.get(n1, m) * ev[m]).sum();
            scale = scale.max(lhs.abs());
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

/// Default sample points (a, b) for `verify_expansion`.
pub fn default_sample_points(count: usize) -> Vec<(f64, f64)> {
    (0..count)
        .map(|i| {
            let t = (i as f64 + 0.5) / count as f64;
            (0.1 + 2.0 * t, -1.5 + 2.5 * ((7.0 * t).sin() * 0.5 + 0.5))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn fixture() -> P1Params {
        P1Params::new(1.0, 1.0 / SQRT_2, 2.0 * SQRT_2).unwrap()
    }

    #[test]
    fn fixture_values() {
        let p = fixture();
        let w1 = w_3f2(&p, 1).unwrap();
        let e1 = [[-0.6454972244, 0.7637626158], [0.7637626158, 0.6454972244]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((w1.get(i, j) - e1[i][j]).abs() < 1e-9);
            }
        }
        let w2 = w_hahn(&p, 2).unwrap();
        let e2 = [
            [0.5400617249, -0.7216878365, 0.4330127019],
            [-0.7637626158, -0.2041241452, 0.6123724357],
            [0.3535533906, 0.6614378278, 0.6614378278],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!((w2.get(i, j) - e2[i][j]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn three_methods_agree() {
        let p = fixture();
        for n in 0..=2 {
            let q = w_quadrature(&p, n).unwrap();
            let f = w_3f2(&p, n).unwrap();
            let h = w_hahn(&p, n).unwrap();
            assert!(q.max_diff(&f) <= 1e-8, "{n}: {}", q.max_diff(&f));
            assert!(f.max_diff(&h) <= 1e-10);
            assert!(q.orthogonality_defect() <= 1e-8);
        }
        assert!((w_quadrature(&p, 0).unwrap().get(0, 0).abs() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn expansion_holds_pointwise() {
        let p = fixture();
        for n in 0..=2 {
            let w = w_3f2(&p, n).unwrap();
            let r = verify_expansion(&p, &w, &default_sample_points(50)).unwrap();
            assert!(r <= 1e-8, "{n}: {r}");
        }
    }

    #[test]
    fn other_parameters() {
        let p = P1Params::new(0.6, 0.45, 2.3).unwrap();
        let top = p.nmax().unwrap().min(3);
        for n in 0..=top {
            let q = w_quadrature(&p, n).unwrap();
            let f = w_3f2(&p, n).unwrap();
            assert!(q.max_diff(&f) <= 1e-8);
            assert!(f.orthogonality_defect() <= 1e-8);
            assert!(verify_expansion(&p, &f, &default_sample_points(30)).unwrap() <= 1e-7);
        }
    }

    #[test]
    fn printed_forms_are_reported() {
        let p = fixture();
        let pr = w_matrix(&p, 1, WMethod::Printed3F2).unwrap();
        assert_eq!(pr.method, WMethod::Printed3F2);
        assert_eq!(pr.w.nrows(), 2);
    }

    #[test]
    fn laguerre_large_argument_limit() {
        use crate::specfun::laguerre;
        let x: f64 = 1e4;
        let ratio = |n: usize, a: f64| laguerre(n, a, x) * ln_factorial(n).exp() / (sign(n) * x.powi(n as i32));
        assert!((ratio(1, -0.5) - 1.0).abs() <= 1e-4);
        assert!((ratio(2, -1.8) - 1.0).abs() <= 1e-4);
        // leading correction is −n(n + a)/x
        for (n, a) in [(1, 1.5), (2, 1.5), (3, 2.0), (4, 0.5)] {
            let dev = ratio(n, a) - 1.0;
            let first = -(n as f64) * (n as f64 + a) / x;
            assert!((dev - first).abs() <= 1e-6, "{n} {a}: {dev}");
        }
    }

    #[test]
    fn jacobi_as_hypergeometric() {
        use crate::specfun::{hyp2f1, pochhammer};
        let (a, b) = (1.5, -3.3);
        for n in 0..=4 {
            for x in [-0.7, 0.2, 1.9, 3.4] {
                let lhs = jacobi_real(n, a, b, x);
                let r = |v: f64| C64::new(v, 0.0);
                let f = hyp2f1(r(-(n as f64)), r(n as f64 + a + b + 1.0), r(b + 1.0), r((1.0 + x) / 2.0)).unwrap();
                let rhs = sign(n) * pochhammer(r(b + 1.0), n).re / ln_factorial(n).exp() * f.re;
                assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0), "{n} {x}");
            }
        }
    }
}
