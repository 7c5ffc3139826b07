//! The semi-hyperbolic system of V2 on the complexified sphere.

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{p2_energy, P2Params, P2Quantum, P2State};
use crate::error::{Error, Result};
use crate::geometry::{semi_hyperbolic_squares, AmbientPoint, SemiHyperbolicParams};
use crate::solve::{self, NewtonOptions};
use crate::specfun::{integrate_2d, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShSolverOptions {
    pub tol: f64,
    pub seed: u64,
    pub max_iter: usize,
}

impl Default for ShSolverOptions {
    fn default() -> Self {
        ShSolverOptions { tol: 1e-10, seed: 0, max_iter: 200 }
    }
}

/// A solved configuration of the semi-hyperbolic zero equations.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexBetheRoots {
    pub chart_params: SemiHyperbolicParams,
    pub level: usize,
    /// Sorted by real then imaginary part.
    pub roots: Vec<C64>,
    pub residual: f64,
    /// Whether the set is closed under complex conjugation, which is what
    /// makes the product wavefunction real up to a constant phase.
    pub conjugate_closed: bool,
}

impl ComplexBetheRoots {
    fn new(p: &P2Params, cp: SemiHyperbolicParams, mut roots: Vec<C64>) -> Self {
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let residual = sh_zero_equations(p, &cp, &roots).iter().fold(0.0f64, |m, v| m.max(v.norm()));
        let conjugate_closed = roots
            .iter()
            .all(|r| roots.iter().any(|s| (s - r.conj()).norm() <= 1e-8 * (1.0 + r.norm())));
        ComplexBetheRoots { chart_params: cp, level: roots.len(), roots, residual, conjugate_closed }
    }
}

/// Σ_l (k_l + 1)/(θ_m − e_l) + Σ_{j≠m} 2/(θ_m − θ_j) for every root.
pub fn sh_zero_equations(p: &P2Params, cp: &SemiHyperbolicParams, th: &[C64]) -> Vec<C64> {
    sh_system(p, cp, th).0
}

fn sh_system(p: &P2Params, cp: &SemiHyperbolicParams, th: &[C64]) -> (Vec<C64>, Vec<Vec<C64>>) {
    let k = p.k();
    let e = cp.foci();
    let n = th.len();
    let mut f = vec![C64::new(0.0, 0.0); n];
    let mut j = vec![vec![C64::new(0.0, 0.0); n]; n];
    for m in 0..n {
        let mut diag = C64::new(0.0, 0.0);
        for l in 0..3 {
            let r = 1.0 / (th[m] - e[l]);
            f[m] += (k[l] + 1.0) * r;
            diag -= (k[l] + 1.0) * r * r;
        }
        for i in 0..n {
            if i != m {
                let r = 1.0 / (th[m] - th[i]);
                f[m] += 2.0 * r;
                diag -= 2.0 * r * r;
                j[m][i] = 2.0 * r * r;
            }
        }
        j[m][m] = diag;
    }
    (f, j)
}

fn to_complex(x: &[f64]) -> Vec<C64> {
    x.chunks(2).map(|c| C64::new(c[0], c[1])).collect()
}

/// All root configurations at level N for the chart parameters `cp`.
pub fn p2_sh_roots(
    p: &P2Params,
    n_level: usize,
    cp: &SemiHyperbolicParams,
    opt: &ShSolverOptions,
) -> Result<Vec<ComplexBetheRoots>> {
    p2_energy(p, n_level)?;
    if n_level == 0 {
        return Ok(vec![ComplexBetheRoots::new(p, *cp, Vec::new())]);
    }
    let e = cp.foci();
    let sys = |x: &[f64]| -> Option<(Vec<f64>, DMatrix<f64>)> {
        let th = to_complex(x);
        if th.iter().any(|t| e.iter().any(|&el| *t == el)) {
            return None;
        }
        for i in 0..th.len() {
            for l in 0..i {
                if th[i] == th[l] {
                    return None;
                }
            }
        }
        let (f, j) = sh_system(p, cp, &th);
        let n = th.len();
        let mut fr = vec![0.0; 2 * n];
        let mut jr = DMatrix::zeros(2 * n, 2 * n);
        for a in 0..n {
            fr[2 * a] = f[a].re;
            fr[2 * a + 1] = f[a].im;
            for b in 0..n {
                let c = j[a][b];
                jr[(2 * a, 2 * b)] = c.re;
                jr[(2 * a, 2 * b + 1)] = -c.im;
                jr[(2 * a + 1, 2 * b)] = c.im;
                jr[(2 * a + 1, 2 * b + 1)] = c.re;
            }
        }
        Some((fr, jr))
    };
    let reach = 3.0 * e.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    let mut rng = solve::rng(opt.seed);
    let starts: Vec<Vec<f64>> =
        (0..30 * (n_level + 1)).map(|_| (0..2 * n_level).map(|_| solve::jitter(&mut rng, -reach, reach)).collect()).collect();
    let canon = |x: &[f64]| {
        let mut th = to_complex(x);
        th.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        th.iter().flat_map(|z| [z.re, z.im]).collect::<Vec<f64>>()
    };
    let accept = |x: &[f64]| {
        let th = to_complex(x);
        th.iter().all(|t| t.norm() < 1e6 && e.iter().all(|el| (t - el).norm() > 1e-8))
            && (0..th.len()).all(|i| (0..i).all(|l| (th[i] - th[l]).norm() > 1e-8 * (1.0 + th[i].norm())))
    };
    let nopt = NewtonOptions { tol: opt.tol, max_iter: opt.max_iter };
    let found = solve::multistart(&sys, starts, 2, &canon, &accept, opt.seed, nopt);
    if found.solutions.is_empty() {
        return Err(Error::SolverFailure {
            msg: format!("semi-hyperbolic: no root configuration at N = {n_level} reached {:e}", opt.tol),
            best_residual: found.best_residual,
        });
    }
    let mut out: Vec<ComplexBetheRoots> =
        found.solutions.into_iter().map(|(x, _)| ComplexBetheRoots::new(p, *cp, to_complex(&x))).collect();
    out.sort_by(|a, b| a.roots[0].re.total_cmp(&b.roots[0].re).then(a.roots[0].im.total_cmp(&b.roots[0].im)));
    Ok(out)
}

/// E = −(2N + 2 + k1 + k2 + k3)²/2 + 1/8.
pub fn p2_sh_energy(p: &P2Params, n_level: usize) -> C64 {
    let k = p.k();
    let x = k[0] + k[1] + k[2] + 2.0 * n_level as f64 + 2.0;
    -0.5 * x * x + 0.125
}

fn lambda_parts(p: &P2Params, roots: &[C64], cp: &SemiHyperbolicParams, second_factor: f64) -> C64 {
    let [k1, k2, k3] = p.k();
    let [e1, e2, e3] = cp.foci();
    let sum = |el: C64| roots.iter().map(|t| 1.0 / (t - el)).sum::<C64>();
    -2.0 * (k1 * (e2 + e3) + k2 * (e1 + e3) + k3 * (e1 + e2))
        - 2.0 * (e3 * k1 * k2 + e2 * k1 * k3 + e1 * k2 * k3)
        - 1.5 * (e1 + e2 + e3)
        - 4.0 * e2 * e3 * (k1 + 1.0) * sum(e1)
        - second_factor * e1 * e3 * (k2 + 1.0) * sum(e2)
        - 4.0 * e1 * e2 * (k3 + 1.0) * sum(e3)
}

/// Separation constant as transcribed.
pub fn p2_sh_lambda_printed(p: &P2Params, roots: &[C64], cp: &SemiHyperbolicParams) -> C64 {
    lambda_parts(p, roots, cp, 1.0)
}

/// Separation constant: eigenvalue of e3 L12 + e2 L13 + e1 L23 plus its
/// constant Σ_l e_l(k_l² − Σ_{j≠l} k_j² + 1/4).
pub fn p2_sh_lambda(p: &P2Params, roots: &[C64], cp: &SemiHyperbolicParams) -> C64 {
    let k = p.k();
    let e = cp.foci();
    let mut c = C64::new(0.0, 0.0);
    for l in 0..3 {
        let mut t = k[l] * k[l] + 0.25;
        for j in 0..3 {
            if j != l {
                t -= k[j] * k[j];
            }
        }
        c += e[l] * t;
    }
    lambda_parts(p, roots, cp, 4.0) + c
}

/// Σ_l s_l²/(θ − e_l) at elliptic coordinates (μ, ν).
pub fn sh_factor_partial_fractions(mu: f64, nu: f64, theta: C64, cp: &SemiHyperbolicParams) -> C64 {
    let s2 = semi_hyperbolic_squares(mu, nu, cp);
    let e = cp.foci();
    (0..3).map(|l| s2[l] / (theta - e[l])).sum()
}

/// (μ − θ)(ν − θ)/Π_l(θ − e_l).
pub fn sh_factor_rational(mu: f64, nu: f64, theta: C64, cp: &SemiHyperbolicParams) -> C64 {
    let e = cp.foci();
    (mu - theta) * (nu - theta) / ((theta - e[0]) * (theta - e[1]) * (theta - e[2]))
}

// complex log of the bare product form
fn log_raw(p: &P2Params, roots: &[C64], cp: &SemiHyperbolicParams, q: &AmbientPoint) -> Result<C64> {
    if q.w2 <= 0.0 {
        return Err(Error::OutOfDomain("semi-hyperbolic state lives on w2 > 0".into()));
    }
    if q.w0 > 1e100 {
        return Ok(C64::new(f64::NEG_INFINITY, 0.0));
    }
    let k = p.k();
    let e = cp.foci();
    let s = [C64::new(q.w0, q.w1) / SQRT_2, C64::new(q.w0, -q.w1) / SQRT_2, C64::new(0.0, q.w2)];
    let mut acc = C64::new(0.0, 0.0);
    for l in 0..3 {
        acc += (k[l] + 0.5) * s[l].ln();
    }
    for t in roots {
        let f: C64 = (0..3).map(|l| s[l] * s[l] / (t - e[l])).sum();
        acc += f.ln();
    }
    Ok(acc)
}

pub(crate) fn eval(state: &P2State, q: &AmbientPoint) -> Result<C64> {
    let roots = state.roots.as_ref().ok_or_else(|| Error::InvalidParams("semi-hyperbolic state without roots".into()))?;
    let l = log_raw(&state.params, &roots.roots, &roots.chart_params, q)?;
    let v = (l + state.log_norm).exp() / state.phase;
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(q.w0))
    }
}

fn equi(t1: f64, t2: f64) -> AmbientPoint {
    let c1 = t1.cosh();
    AmbientPoint::new(c1 * t2.cosh(), c1 * t2.sinh(), t1.sinh())
}

pub(crate) fn build_state(p: &P2Params, roots: ComplexBetheRoots) -> Result<P2State> {
    p2_energy(p, roots.level)?;
    let cp = roots.chart_params;
    let mut best = C64::new(f64::NEG_INFINITY, 0.0);
    for i in 1..30 {
        for j in -20..20 {
            let l = log_raw(p, &roots.roots, &cp, &equi(i as f64 * 0.1, j as f64 * 0.1))?;
            if l.re > best.re {
                best = l;
            }
        }
    }
    if !best.re.is_finite() {
        return Err(Error::NonFinite(best.re));
    }
    let shift = best.re;
    let f = |t1: f64, t2: f64| {
        if t1 <= 0.0 || t1.abs() > 200.0 || t2.abs() > 200.0 {
            return 0.0;
        }
        match log_raw(p, &roots.roots, &cp, &equi(t1, t2)) {
            Ok(l) => (2.0 * (l.re - shift)).exp() * t1.cosh(),
            Err(_) => 0.0,
        }
    };
    let (v, _) = integrate_2d(f, &QuadratureSpec::half_line(3, 0.0), &QuadratureSpec::real_line(3), 1e-11, 9)?;
    let level = roots.level;
    Ok(P2State {
        params: *p,
        quantum: P2Quantum::SemiHyperbolic { level },
        roots: Some(roots),
        chart_params: Some(cp),
        log_norm: -shift - 0.5 * v.ln(),
        phase: C64::from_polar(1.0, best.im),
    })
}

/// Ψ at an ambient point with w2 > 0, real up to the removed constant phase.
pub fn p2_wf_semihyperbolic(state: &P2State, q: &AmbientPoint) -> Result<C64> {
    match state.quantum {
        P2Quantum::SemiHyperbolic { .. } => eval(state, q),
        _ => Err(Error::InvalidParams("not a semi-hyperbolic state".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ambient_to_chart, Chart};
    use crate::potential2::tests::fixture;

    fn cp() -> SemiHyperbolicParams {
        SemiHyperbolicParams::new(0.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn ground_configuration_is_empty() {
        let p = fixture();
        let r = p2_sh_roots(&p, 0, &cp(), &ShSolverOptions::default()).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].roots.is_empty() && r[0].conjugate_closed);
    }

    #[test]
    fn single_root_quadratic() {
        let p = P2Params::new(0.1, 5.0, 1.0).unwrap();
        let cp = cp();
        let r = p2_sh_roots(&p, 1, &cp, &ShSolverOptions::default()).unwrap();
        // (k1+1)(θ−e2)(θ−e3) + (k2+1)(θ−e1)(θ−e3) + (k3+1)(θ−e1)(θ−e2) = 0
        let k = p.k();
        let e = cp.foci();
        let quad = |t: C64| (k[0] + 1.0) * (t - e[1]) * (t - e[2]) + (k[1] + 1.0) * (t - e[0]) * (t - e[2]) + (k[2] + 1.0) * (t - e[0]) * (t - e[1]);
        assert_eq!(r.len(), 2);
        for c in &r {
            assert!(c.residual <= 1e-10);
            assert!(quad(c.roots[0]).norm() < 1e-10);
            assert!(c.conjugate_closed);
        }
        assert!((r[0].roots[0].re + 0.65758).abs() < 1e-5 && (r[1].roots[0].re - 0.63824).abs() < 1e-5);
    }

    #[test]
    fn factor_identity() {
        let cp = SemiHyperbolicParams::new(0.3, 1.2, -0.4).unwrap();
        for (mu, nu, t) in [(1.0, -2.0, C64::new(0.2, 0.1)), (3.5, -0.5, C64::new(-1.0, 0.0))] {
            let a = sh_factor_partial_fractions(mu, nu, t, &cp);
            let b = sh_factor_rational(mu, nu, t, &cp);
            assert!((a - b).norm() < 1e-10 * b.norm().max(1.0));
        }
    }

    #[test]
    fn energies_agree() {
        let p = P2Params::new(0.1, 5.0, 1.0).unwrap();
        for n in 0..=p.nmax().unwrap() {
            let e = p2_sh_energy(&p, n);
            assert!((e.re - p2_energy(&p, n).unwrap()).abs() < 1e-12 && e.im.abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_real_and_symmetric() {
        let p = P2Params::new(0.1, 5.0, 1.0).unwrap();
        let cp = cp();
        for c in p2_sh_roots(&p, 1, &cp, &ShSolverOptions::default()).unwrap() {
            assert!(p2_sh_lambda(&p, &c.roots, &cp).im.abs() < 1e-9);
        }
        let th = [C64::new(0.3, 0.2), C64::new(0.3, -0.2)];
        let rev = [th[1], th[0]];
        assert!((p2_sh_lambda(&p, &th, &cp) - p2_sh_lambda(&p, &rev, &cp)).norm() < 1e-14);
    }

    #[test]
    fn states_real_and_nodeless() {
        let p = P2Params::new(0.1, 5.0, 1.0).unwrap();
        let cp = cp();
        let g = P2State::semi_hyperbolic(&p, p2_sh_roots(&p, 0, &cp, &ShSolverOptions::default()).unwrap().remove(0)).unwrap();
        let e = P2State::equidistant(&p, 0, 0).unwrap();
        for i in 1..12 {
            for j in -6..6 {
                let q = equi(i as f64 * 0.2, j as f64 * 0.2);
                let v = p2_wf_semihyperbolic(&g, &q).unwrap();
                assert!(v.re > 0.0 && v.im.abs() < 1e-8 * v.norm(), "{v}");
                // ground states of the two charts coincide
                let w = e.eval_ambient(&q).unwrap();
                assert!((v - w).norm() < 1e-7 * w.norm(), "{v} {w}");
            }
        }
        let c = ambient_to_chart(&equi(0.5, 0.3), Chart::SemiHyperbolic, Some(&cp)).unwrap();
        let v = g.eval_chart(c.u1, c.u2).unwrap();
        assert!((v - p2_wf_semihyperbolic(&g, &equi(0.5, 0.3)).unwrap()).norm() < 1e-10 * v.norm());
    }
}
