//! Zero equations and product wavefunctions of the two parabolic charts.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;

use super::states::{P1Quantum, P1State};
use super::{p1_energy, P1Params};
use crate::error::{Error, Result};
use crate::geometry::Chart;
use crate::solve::{self, NewtonOptions};
use crate::specfun::{integrate_2d, ln_cosh, ln_sinh_abs, QuadratureSpec};

/// Which transcription of the zero equations to solve.
///
/// `Printed` keeps the coefficients as they appear in the source text;
/// `Corrected` is the system whose roots give Schrödinger eigenfunctions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RootSystem {
    Printed,
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub system: RootSystem,
    /// Acceptance threshold on the max-norm residual.
    pub tol: f64,
    pub seed: u64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { system: RootSystem::Corrected, tol: 1e-10, seed: 0, max_iter: 200 }
    }
}

/// One solved root configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BetheRoots {
    pub chart: Chart,
    pub system: RootSystem,
    pub level: usize,
    /// Sorted ascending.
    pub roots: Vec<f64>,
    pub residual: f64,
    /// (p, q) = roots in [0,1], [1,∞) for elliptic-parabolic;
    /// (k, l) = roots in [−1,0], [0,∞) for hyperbolic-parabolic.
    pub zone_counts: (usize, usize),
    /// Roots lying in neither zone.
    pub out_of_zone: usize,
}

impl BetheRoots {
    fn new(p: &P1Params, chart: Chart, system: RootSystem, mut roots: Vec<f64>) -> Self {
        roots.sort_by(f64::total_cmp);
        let level = roots.len();
        let residual = solve::max_abs(&equations(p, chart, system, &roots));
        let (lo, mid) = if chart == Chart::EllipticParabolic { (0.0, 1.0) } else { (-1.0, 0.0) };
        let inner = roots.iter().filter(|&&t| (lo..=mid).contains(&t)).count();
        let outer = roots.iter().filter(|&&t| t > mid).count();
        BetheRoots { chart, system, level, roots, residual, zone_counts: (inner, outer), out_of_zone: level - inner - outer }
    }

    pub fn sum(&self) -> f64 {
        self.roots.iter().sum()
    }
}

fn equations(p: &P1Params, chart: Chart, system: RootSystem, th: &[f64]) -> Vec<f64> {
    match chart {
        Chart::EllipticParabolic => ep_zero_equations(p, th, system),
        _ => hp_zero_equations(p, th, system),
    }
}

/// Left-hand sides of the elliptic-parabolic zero equations.
pub fn ep_zero_equations(p: &P1Params, th: &[f64], system: RootSystem) -> Vec<f64> {
    ep_system(p, th, system).0
}

/// Left-hand sides of the hyperbolic-parabolic zero equations.
pub fn hp_zero_equations(p: &P1Params, th: &[f64], system: RootSystem) -> Vec<f64> {
    hp_system(p, th, system).0
}

fn ep_system(p: &P1Params, th: &[f64], system: RootSystem) -> (Vec<f64>, DMatrix<f64>) {
    let n = th.len();
    let nf = n as f64;
    let k = p.kappa();
    let (slope, cst) = match system {
        RootSystem::Printed => (p.s / 2.0, p.s + p.d + 1.0),
        RootSystem::Corrected => (p.s, 1.0 + p.d - p.s),
    };
    let mut f = vec![0.0; n];
    let mut j = DMatrix::zeros(n, n);
    for i in 0..n {
        let t = th[i];
        let (mut sum, mut sum2) = (0.0, 0.0);
        for (l, &u) in th.iter().enumerate() {
            if l != i {
                let r = 1.0 / (u - t);
                sum += r;
                sum2 += r * r;
                j[(i, l)] = -2.0 * t * (1.0 - t) * r * r;
            }
        }
        f[i] = 2.0 * t * (1.0 - t) * (sum + k) + 2.0 * nf * (1.0 - t) + slope * t + cst;
        j[(i, i)] = 2.0 * (1.0 - 2.0 * t) * (sum + k) + 2.0 * t * (1.0 - t) * sum2 - 2.0 * nf + slope;
    }
    (f, j)
}

fn hp_system(p: &P1Params, th: &[f64], system: RootSystem) -> (Vec<f64>, DMatrix<f64>) {
    let n = th.len();
    let nf = n as f64;
    let k = p.kappa();
    let slope = match system {
        RootSystem::Printed => p.s / 2.0,
        RootSystem::Corrected => p.s,
    };
    let cst = p.s - p.d - 1.0;
    let mut f = vec![0.0; n];
    let mut j = DMatrix::zeros(n, n);
    for i in 0..n {
        let t = th[i];
        let (mut sum, mut sum2) = (0.0, 0.0);
        for (l, &u) in th.iter().enumerate() {
            if l != i {
                let r = 1.0 / (t - u);
                sum += r;
                sum2 += r * r;
                j[(i, l)] = 2.0 * t * (1.0 + t) * r * r;
            }
        }
        f[i] = 2.0 * t * (1.0 + t) * (sum - k) - 2.0 * nf * (1.0 + t) + slope * t + cst;
        j[(i, i)] = 2.0 * (1.0 + 2.0 * t) * (sum - k) - 2.0 * t * (1.0 + t) * sum2 - 2.0 * nf + slope;
    }
    (f, j)
}

fn find_roots(p: &P1Params, n_level: usize, chart: Chart, opt: &SolverOptions) -> Result<Vec<BetheRoots>> {
    p1_energy(p, n_level)?;
    if n_level == 0 {
        return Ok(vec![BetheRoots::new(p, chart, opt.system, Vec::new())]);
    }
    let ep = chart == Chart::EllipticParabolic;
    let sys = |x: &[f64]| -> Option<(Vec<f64>, DMatrix<f64>)> {
        for i in 0..x.len() {
            for l in 0..i {
                if x[i] == x[l] {
                    return None;
                }
            }
        }
        Some(if ep { ep_system(p, x, opt.system) } else { hp_system(p, x, opt.system) })
    };
    let nf = n_level as f64;
    let reach = (4.0 * nf + 2.0 * p.s + 4.0) / (2.0 * p.kappa());
    let (lo, mid) = if ep { (0.0, 1.0) } else { (-1.0, 0.0) };
    let mut rng = solve::rng(opt.seed);
    let mut starts = Vec::new();
    for inner in 0..=n_level {
        let outer = n_level - inner;
        for _ in 0..4 {
            let mut x = Vec::with_capacity(n_level);
            for j in 0..inner {
                let base = lo + (mid - lo) * (j as f64 + 0.5) / inner as f64;
                x.push(base + solve::jitter(&mut rng, -0.1, 0.1) / inner as f64);
            }
            for j in 0..outer {
                let base = mid + reach * (j as f64 + 0.5) / outer as f64;
                x.push(base + solve::jitter(&mut rng, -0.2, 0.2) * reach / outer as f64);
            }
            starts.push(x);
        }
    }
    for _ in 0..10 * (n_level + 1) {
        starts.push((0..n_level).map(|_| solve::jitter(&mut rng, lo - reach, mid + reach)).collect());
    }
    let canon = |x: &[f64]| {
        let mut v = x.to_vec();
        v.sort_by(f64::total_cmp);
        v
    };
    let accept = |x: &[f64]| {
        let v = canon(x);
        v.iter().all(|t| t.abs() < 1e8) && v.windows(2).all(|w| w[1] - w[0] > 1e-8 * (1.0 + w[1].abs()))
    };
    let nopt = NewtonOptions { tol: opt.tol, max_iter: opt.max_iter };
    let found = solve::multistart(&sys, starts, 1, &canon, &accept, opt.seed, nopt);
    if found.solutions.is_empty() {
        return Err(Error::SolverFailure {
            msg: format!("{chart}: no root configuration at N = {n_level} reached {:e}", opt.tol),
            best_residual: found.best_residual,
        });
    }
    let mut out: Vec<BetheRoots> = found.solutions.into_iter().map(|(x, _)| BetheRoots::new(p, chart, opt.system, x)).collect();
    out.sort_by(|a, b| b.zone_counts.0.cmp(&a.zone_counts.0).then(a.roots[0].total_cmp(&b.roots[0])));
    Ok(out)
}

/// All real root configurations of the elliptic-parabolic zero equations at level N.
pub fn p1_ep_roots(p: &P1Params, n_level: usize, opt: &SolverOptions) -> Result<Vec<BetheRoots>> {
    find_roots(p, n_level, Chart::EllipticParabolic, opt)
}

/// All real root configurations of the hyperbolic-parabolic zero equations at level N.
pub fn p1_hp_roots(p: &P1Params, n_level: usize, opt: &SolverOptions) -> Result<Vec<BetheRoots>> {
    find_roots(p, n_level, Chart::HyperbolicParabolic, opt)
}

/// λ = 4√2β Σθ − (s − 1)² + 2√2β(1 + d) − 2γ².
pub fn p1_ep_lambda(p: &P1Params, roots: &[f64]) -> f64 {
    let c = p.c();
    4.0 * c * roots.iter().sum::<f64>() - (p.s - 1.0).powi(2) + 2.0 * c * (1.0 + p.d) - 2.0 * p.gamma.powi(2)
}

/// τ = 4√2β Σθ − (s − 1)² − 2√2β(1 + d) + 2γ².
pub fn p1_hp_tau(p: &P1Params, roots: &[f64]) -> f64 {
    let c = p.c();
    4.0 * c * roots.iter().sum::<f64>() - (p.s - 1.0).powi(2) - 2.0 * c * (1.0 + p.d) + 2.0 * p.gamma.powi(2)
}

/// Sign and log magnitude of the bare product form at chart coordinates.
pub(crate) fn log_raw(p: &P1Params, chart: Chart, roots: &BetheRoots, u1: f64, u2: f64) -> (f64, f64) {
    if u1 > 300.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    let e = p.nu(roots.level) + 0.5;
    let k = p.kappa();
    let mut sign = 1.0;
    let mut acc;
    let (x, y);
    if chart == Chart::EllipticParabolic {
        // X = cosh² a, Y = cos² θ
        x = u1.cosh().powi(2);
        y = u2.cos().powi(2);
        acc = (0.5 + p.d) * (ln_sinh_abs(u1) + u2.sin().abs().ln()) + e * (ln_cosh(u1) + u2.cos().abs().ln()) - k * (x + y);
        for &t in &roots.roots {
            let f = (x - t) * (y - t);
            sign *= f.signum();
            acc += f.abs().ln();
        }
    } else {
        // X = sinh² b, Y = sin² θ
        x = u1.sinh().powi(2);
        y = u2.sin().powi(2);
        acc = (0.5 + p.d) * (ln_cosh(u1) + u2.cos().abs().ln()) + e * (ln_sinh_abs(u1) + u2.sin().abs().ln()) - k * (x - y);
        for &t in &roots.roots {
            let f = (x - t) * (y + t);
            sign *= f.signum();
            acc += f.abs().ln();
        }
    }
    if acc == f64::NEG_INFINITY {
        sign = 0.0;
    }
    (sign, acc)
}

/// Riemannian density of the parabolic charts.
pub(crate) fn density(chart: Chart, u1: f64, u2: f64) -> f64 {
    if chart == Chart::EllipticParabolic {
        let (x, y) = (u1.cosh().powi(2), u2.cos().powi(2));
        (x - y) / (x * y)
    } else {
        let (x, y) = (u1.sinh().powi(2), u2.sin().powi(2));
        (x + y) / (x * y)
    }
}

pub(crate) fn build_state(p: &P1Params, roots: BetheRoots, chart: Chart) -> Result<P1State> {
    if roots.chart != chart {
        return Err(Error::InvalidParams(format!("roots belong to the {} chart", roots.chart)));
    }
    p1_energy(p, roots.level)?;
    // log-scale shift so the normalization integral stays in range
    let mut shift = f64::NEG_INFINITY;
    for i in 1..40 {
        for j in 1..20 {
            let (_, l) = log_raw(p, chart, &roots, i as f64 * 0.1, j as f64 * FRAC_PI_2 / 20.0);
            shift = shift.max(l);
        }
    }
    if !shift.is_finite() {
        return Err(Error::NonFinite(shift));
    }
    let f = |a: f64, t: f64| {
        if a <= 0.0 || t <= 0.0 || t >= FRAC_PI_2 {
            return 0.0;
        }
        let (sg, l) = log_raw(p, chart, &roots, a, t);
        if sg == 0.0 {
            return 0.0;
        }
        (2.0 * (l - shift)).exp() * density(chart, a, t)
    };
    let (v, _) = integrate_2d(f, &QuadratureSpec::half_line(3, 0.0), &QuadratureSpec::finite(3, 0.0, FRAC_PI_2), 1e-12, 9)?;
    let log_norm = -shift - 0.5 * v.ln();
    let (a, b) = roots.zone_counts;
    let quantum = if chart == Chart::EllipticParabolic {
        P1Quantum::EllipticParabolic { level: roots.level, p: a, q: b }
    } else {
        P1Quantum::HyperbolicParabolic { level: roots.level, l: b, k: a }
    };
    Ok(P1State { params: *p, quantum, roots: Some(roots), log_norm })
}

/// Ψ(a, θ) of the elliptic-parabolic chart.
pub fn p1_wf_elliptic_parabolic(state: &P1State, a: f64, theta: f64) -> Result<f64> {
    match state.quantum {
        P1Quantum::EllipticParabolic { .. } => state.eval_chart(a, theta),
        _ => Err(Error::InvalidParams("not an elliptic-parabolic state".into())),
    }
}

/// Ψ(b, θ) of the hyperbolic-parabolic chart.
pub fn p1_wf_hyperbolic_parabolic(state: &P1State, b: f64, theta: f64) -> Result<f64> {
    match state.quantum {
        P1Quantum::HyperbolicParabolic { .. } => state.eval_chart(b, theta),
        _ => Err(Error::InvalidParams("not a hyperbolic-parabolic state".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential1::tests::fixture;

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(f64::total_cmp);
        v
    }

    fn all_roots(cs: &[BetheRoots]) -> Vec<f64> {
        sorted(cs.iter().flat_map(|c| c.roots.clone()).collect())
    }

    #[test]
    fn ground_level_is_empty() {
        let p = fixture();
        let r = p1_ep_roots(&p, 0, &SolverOptions::default()).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].roots.is_empty() && r[0].residual == 0.0);
        assert!((p1_ep_lambda(&p, &r[0].roots) + 60.0).abs() < 1e-12);
    }

    #[test]
    fn printed_single_root_quadratic() {
        let p = fixture();
        let opt = SolverOptions { system: RootSystem::Printed, ..Default::default() };
        let r = p1_ep_roots(&p, 1, &opt).unwrap();
        let s59 = 59f64.sqrt();
        let got = all_roots(&r);
        assert_eq!(got.len(), 2);
        assert!((got[0] - (3.0 - s59) / 2.0).abs() < 1e-10);
        assert!((got[1] - (3.0 + s59) / 2.0).abs() < 1e-10);
        let h = p1_hp_roots(&p, 1, &opt).unwrap();
        let s15 = 15f64.sqrt();
        let got = all_roots(&h);
        assert!((got[0] - (1.0 - s15) / 2.0).abs() < 1e-10 && (got[1] - (1.0 + s15) / 2.0).abs() < 1e-10);
    }

    #[test]
    fn corrected_single_root_quadratic() {
        let p = fixture();
        let r = p1_ep_roots(&p, 1, &SolverOptions::default()).unwrap();
        let s35 = 35f64.sqrt();
        let got = all_roots(&r);
        assert!((got[0] - (7.0 - s35) / 2.0).abs() < 1e-10 && (got[1] - (7.0 + s35) / 2.0).abs() < 1e-10);
        assert_eq!(r[0].zone_counts, (1, 0));
        assert_eq!(r[1].zone_counts, (0, 1));
        let h = p1_hp_roots(&p, 1, &SolverOptions::default()).unwrap();
        let s39 = 39f64.sqrt();
        let got = all_roots(&h);
        assert!((got[0] - (5.0 - s39) / 2.0).abs() < 1e-10 && (got[1] - (5.0 + s39) / 2.0).abs() < 1e-10);
    }

    #[test]
    fn level_two_configurations() {
        let p = fixture();
        let r = p1_ep_roots(&p, 2, &SolverOptions::default()).unwrap();
        assert_eq!(r.len(), 3);
        let expect = [[0.172, 0.597], [0.305, 6.548], [3.461, 7.916]];
        for (c, e) in r.iter().zip(expect) {
            assert!(c.residual <= 1e-10);
            assert!((c.roots[0] - e[0]).abs() < 1e-3 && (c.roots[1] - e[1]).abs() < 1e-3, "{:?}", c.roots);
        }
        let h = p1_hp_roots(&p, 2, &SolverOptions::default()).unwrap();
        assert_eq!(h.len(), 3);
        assert!(h.iter().all(|c| c.residual <= 1e-10 && c.out_of_zone == 0));
    }

    #[test]
    fn lambda_is_symmetric() {
        let p = fixture();
        assert_eq!(p1_ep_lambda(&p, &[0.3, 6.5]), p1_ep_lambda(&p, &[6.5, 0.3]));
    }

    #[test]
    fn ground_states_are_nodeless_and_normalized() {
        let p = fixture();
        let opt = SolverOptions::default();
        let ep = P1State::elliptic_parabolic(&p, p1_ep_roots(&p, 0, &opt).unwrap().remove(0)).unwrap();
        let hp = P1State::hyperbolic_parabolic(&p, p1_hp_roots(&p, 0, &opt).unwrap().remove(0)).unwrap();
        for i in 1..20 {
            for j in 1..10 {
                let (a, t) = (i as f64 * 0.15, j as f64 * 0.15);
                assert!(p1_wf_elliptic_parabolic(&ep, a, t).unwrap() > 0.0);
                assert!(p1_wf_hyperbolic_parabolic(&hp, a, t).unwrap() > 0.0);
            }
        }
        // the three ground states are the same function up to sign
        let eq = P1State::equidistant(&p, 0, 0).unwrap();
        let q = eq.chart_point(0.4, 0.3).unwrap();
        let v = eq.eval_ambient(&q).unwrap();
        assert!((ep.eval_ambient(&q).unwrap() - v).abs() < 1e-8 * v.abs());
        assert!((hp.eval_ambient(&q).unwrap() - v).abs() < 1e-8 * v.abs());
    }
}
