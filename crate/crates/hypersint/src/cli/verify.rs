use num_complex::Complex64 as C64;

use super::commands::{meta, p1, p2, sh_solver, solver};
use super::config::{Potential, RunConfig, Suite};
use super::output::{Document, Record};
use crate::algebra::{
    build_operator, check_linear_relations, check_quadratic_algebra, eigen_residual, eigen_residual_plain,
    linear_relation_orders, multiplet_matrices, project_r, r_consistency, AlgebraReport, ChartRelationPoints,
    OperatorId, OperatorParams, EIGEN_STEP,
};
use crate::error::{Error, Result};
use crate::geometry::{chart_to_ambient, AmbientPoint, Chart, ChartPoint, OperatorExpr, ScalarFn};
use crate::interbasis::{default_sample_points, verify_expansion, w_matrix, WMethod};
use crate::potential1::{
    elliptic_parabolic_energy, horicyclic_energy, p1_energy, p1_ep_lambda, p1_ep_roots, p1_hp_roots, p1_hp_tau,
    P1Params, P1State,
};
use crate::potential2::{p2_energy, p2_sh_energy, p2_sh_lambda, p2_sh_roots, P2Params, P2State};
use crate::specfun::{nodes, QuadratureSpec};

/// One verification check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub hard: bool,
    pub notes: String,
}

impl Check {
    fn hard(id: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check { id: id.into(), residual, tolerance, pass: residual <= tolerance, hard: true, notes: String::new() }
    }

    fn soft(id: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check { hard: false, ..Self::hard(id, residual, tolerance) }
    }

    /// Observed convergence order; passes when at least `min`.
    fn order(id: impl Into<String>, order: f64, min: f64) -> Self {
        Check {
            id: id.into(),
            residual: order,
            tolerance: min,
            pass: order >= min,
            hard: true,
            notes: "residual is the observed order in h; pass means order >= tolerance".into(),
        }
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.notes = s.into();
        self
    }

    fn record(&self) -> Record {
        Record::new()
            .with("id", self.id.as_str())
            .with("residual", self.residual)
            .with("tolerance", self.tolerance)
            .with("pass", self.pass)
            .with("hard", self.hard)
            .with("notes", self.notes.as_str())
    }
}

impl From<AlgebraReport> for Check {
    fn from(r: AlgebraReport) -> Self {
        let mut notes = r.notes;
        if let Some(c) = r.offset {
            if notes.is_empty() {
                notes = format!("offset {c:e}");
            }
        }
        Check { id: r.id.name().to_string(), residual: r.residual, tolerance: r.tolerance, pass: r.pass, hard: r.hard, notes }
    }
}

/// True when every hard check passed.
pub fn all_hard_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| !c.hard || c.pass)
}

pub fn run_suite(cfg: &RunConfig, suite: Suite) -> Result<Vec<Check>> {
    match (suite, cfg.potential) {
        (Suite::Orthonormality, Potential::V1) => p1_orthonormality(&p1(cfg)?, cfg.quad_level),
        (Suite::Orthonormality, Potential::V2) => p2_orthonormality(&p2(cfg)?, cfg.quad_level),
        (Suite::Eigen, Potential::V1) => p1_eigen(cfg),
        (Suite::Eigen, Potential::V2) => p2_eigen(cfg),
        (Suite::CrossChart, Potential::V1) => p1_cross_chart(&p1(cfg)?),
        (Suite::CrossChart, Potential::V2) => p2_cross_chart(&p2(cfg)?),
        (Suite::LinearRelations, Potential::V1) => linear_relations(cfg),
        (Suite::QuadraticAlgebra, Potential::V1) => quadratic_algebra(cfg),
        (Suite::Interbasis, Potential::V1) => interbasis(cfg),
        (s, Potential::V2) => Err(Error::Config(format!("suite {} is defined for v1 only", s.name()))),
    }
}

/// Run the suite and render the report; the flag is false on a hard failure.
pub fn cmd_verify(cfg: &RunConfig) -> Result<(Document, bool)> {
    let suite = cfg.suite.ok_or_else(|| Error::Config("verify needs --suite".into()))?;
    let checks = run_suite(cfg, suite)?;
    let ok = all_hard_pass(&checks);
    let m = meta(cfg)
        .with("suite", suite.name())
        .with("checks", checks.len())
        .with("hard_failures", checks.iter().filter(|c| c.hard && !c.pass).count())
        .with("soft_failures", checks.iter().filter(|c| !c.hard && !c.pass).count());
    Ok((Document { meta: m, records: checks.iter().map(Check::record).collect() }, ok))
}

fn levels(nmax: Option<usize>, only: Option<usize>) -> Vec<usize> {
    match (nmax, only) {
        (None, _) => Vec::new(),
        (Some(top), Some(n)) if n <= top => vec![n],
        (Some(_), Some(_)) => Vec::new(),
        (Some(top), None) => (0..=top).collect(),
    }
}

fn equidistant_nodes(level: u32) -> Result<(Vec<(f64, f64)>, Vec<(f64, f64)>)> {
    Ok((nodes(&QuadratureSpec::half_line(level, 0.0))?, nodes(&QuadratureSpec::real_line(level))?))
}

// Gram matrix of real or complex values over the tensor rule with weight cosh τ1
fn gram(cols: &[Vec<C64>], weights: &[f64]) -> Vec<Vec<C64>> {
    cols.iter()
        .map(|a| cols.iter().map(|b| a.iter().zip(b).zip(weights).map(|((x, y), w)| x.conj() * y * *w).sum()).collect())
        .collect()
}

fn gram_checks(labels: &[String], cols: &[Vec<C64>], weights: &[f64]) -> Vec<Check> {
    const TOL: f64 = 1e-7;
    let g = gram(cols, weights);
    let mut out = Vec::new();
    for (i, row) in g.iter().enumerate() {
        out.push(Check::hard(format!("norm {}", labels[i]), (row[i] - 1.0).norm(), TOL));
    }
    let mut off = 0.0f64;
    for (i, row) in g.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i != j {
                off = off.max(v.norm());
            }
        }
    }
    if labels.len() > 1 {
        out.push(Check::hard("overlap max", off, TOL).note(format!("{} states", labels.len())));
    }
    out
}

fn tensor<T>(level: u32, f: impl Fn(f64, f64) -> Result<T>) -> Result<(Vec<T>, Vec<f64>)> {
    let (n1, n2) = equidistant_nodes(level)?;
    let mut vals = Vec::with_capacity(n1.len() * n2.len());
    let mut w = Vec::with_capacity(n1.len() * n2.len());
    for &(t1, w1) in &n1 {
        for &(t2, w2) in &n2 {
            // bound states decay faster than cosh τ1 grows; far nodes where
            // the weight overflows contribute nothing
            let wt = w1 * w2 * t1.cosh();
            if !wt.is_finite() {
                continue;
            }
            vals.push(f(t1, t2)?);
            w.push(wt);
        }
    }
    Ok((vals, w))
}

fn p1_orthonormality(p: &P1Params, level: u32) -> Result<Vec<Check>> {
    let mut labels = Vec::new();
    let mut cols = Vec::new();
    let mut weights = Vec::new();
    for n in levels(p.nmax(), None) {
        for (a, m) in p.level_states(n)? {
            let s = P1State::equidistant(p, a, m)?;
            let (v, w) = tensor(level, |t1, t2| s.eval_chart(t1, t2).map(|x| C64::new(x, 0.0)))?;
            labels.push(format!("n={a} m={m}"));
            cols.push(v);
            weights = w;
        }
    }
    Ok(gram_checks(&labels, &cols, &weights))
}

fn p2_orthonormality(p: &P2Params, level: u32) -> Result<Vec<Check>> {
    let mut labels = Vec::new();
    let mut cols = Vec::new();
    let mut weights = Vec::new();
    for n in levels(p.nmax(), None) {
        for (a, m) in p.level_states(n)? {
            let s = P2State::equidistant(p, a, m)?;
            let (v, w) = tensor(level, |t1, t2| s.eval_chart(t1, t2))?;
            labels.push(format!("n={a} m={m}"));
            cols.push(v);
            weights = w;
        }
    }
    Ok(gram_checks(&labels, &cols, &weights))
}

/// 50 interior points spread over the equidistant chart.
pub fn eigen_points(count: usize) -> Result<Vec<AmbientPoint>> {
    (0..count)
        .map(|i| {
            let t = (i as f64 + 0.5) / count as f64;
            chart_to_ambient(&ChartPoint::new(Chart::Equidistant, 0.2 + 1.3 * t, -0.9 + 1.6 * (7.0 * t).sin().abs()))
        })
        .collect()
}

const EIGEN_TOL: f64 = 1e-6;
const EIGEN_POINTS: usize = 50;

// relative residual max|(opΨ − λΨ)/Ψ| / max(|λ|, 1)
fn eigen_check(
    id: String,
    op: &OperatorExpr,
    psi: &ScalarFn,
    pts: &[AmbientPoint],
    lambda: C64,
    h: f64,
    tol: f64,
    hard: bool,
) -> Result<Check> {
    let r = eigen_residual(op, psi, pts, lambda, h)? / lambda.norm().max(1.0);
    let c = if hard { Check::hard(id, r, tol) } else { Check::soft(id, r, tol) };
    Ok(c.note(format!("eigenvalue {}, {} points, step {h}", fmt_c(lambda), pts.len())))
}

fn fmt_c(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

fn p1_eigen(cfg: &RunConfig) -> Result<Vec<Check>> {
    let p = p1(cfg)?;
    let pp = OperatorParams::P1(p);
    let h = cfg.diff_step.unwrap_or(EIGEN_STEP);
    let pts = eigen_points(EIGEN_POINTS)?;
    let l1 = build_operator(OperatorId::L1, &pp)?;
    let l2 = build_operator(OperatorId::L2, &pp)?;
    let l3 = build_operator(OperatorId::L3, &pp)?;
    let l4 = build_operator(OperatorId::L4, &pp)?;
    let ham = build_operator(OperatorId::HP1, &pp)?;
    let mut out = Vec::new();
    for n in levels(p.nmax(), cfg.level) {
        let e = C64::new(p1_energy(&p, n)?, 0.0);
        for (a, m) in p.level_states(n)? {
            let s = P1State::equidistant(&p, a, m)?;
            let f = |q: &AmbientPoint| Ok(C64::new(s.eval_ambient(q)?, 0.0));
            let mu = p.check_nm(a, m)?;
            out.push(eigen_check(format!("L1 n={a} m={m}"), &l1, &f, &pts, C64::new(mu * mu, 0.0), h, EIGEN_TOL, true)?);
            out.push(eigen_check(format!("H n={a} m={m}"), &ham, &f, &pts, e, h, EIGEN_TOL, true)?);
        }
        for n1 in 0..=n {
            let s = P1State::horicyclic(&p, n1, n - n1)?;
            let f = |q: &AmbientPoint| Ok(C64::new(s.eval_ambient(q)?, 0.0));
            let ev = 2.0 * p.gamma * p.gamma - 2.0 * p.c() * (2.0 * n1 as f64 + p.d + 1.0);
            out.push(eigen_check(format!("L2 n1={n1} n2={}", n - n1), &l2, &f, &pts, C64::new(ev, 0.0), h, EIGEN_TOL, true)?);
        }
        for (j, roots) in p1_ep_roots(&p, n, &solver(cfg))?.into_iter().enumerate() {
            let lam = p1_ep_lambda(&p, &roots.roots);
            let s = P1State::elliptic_parabolic(&p, roots)?;
            let f = |q: &AmbientPoint| Ok(C64::new(s.eval_ambient(q)?, 0.0));
            out.push(eigen_check(format!("L3 N={n} j={j}"), &l3, &f, &pts, C64::new(lam, 0.0), h, 1e-5, false)?);
        }
        for (j, roots) in p1_hp_roots(&p, n, &solver(cfg))?.into_iter().enumerate() {
            let tau = p1_hp_tau(&p, &roots.roots);
            let s = P1State::hyperbolic_parabolic(&p, roots)?;
            let f = |q: &AmbientPoint| Ok(C64::new(s.eval_ambient(q)?, 0.0));
            out.push(eigen_check(format!("L4 N={n} j={j}"), &l4, &f, &pts, C64::new(tau, 0.0), h, 1e-5, false)?);
        }
    }
    // step refinement of the L1 residual on the first state, plain differences
    if let Some(&(a, m)) = levels(p.nmax(), cfg.level).first().and_then(|&n| p.level_states(n).ok()).as_ref().and_then(|v| v.first()) {
        let s = P1State::equidistant(&p, a, m)?;
        let f = |q: &AmbientPoint| Ok(C64::new(s.eval_ambient(q)?, 0.0));
        let mu = p.check_nm(a, m)?;
        let ev = C64::new(mu * mu, 0.0);
        let sub = &pts[..8];
        let coarse = eigen_residual_plain(&l1, &f, sub, ev, 2e-2)?;
        let fine = eigen_residual_plain(&l1, &f, sub, ev, 1e-2)?;
        out.push(Check::order(format!("L1 order n={a} m={m}"), (coarse / fine).log2(), 1.9));
    }
    Ok(out)
}

fn p2_eigen(cfg: &RunConfig) -> Result<Vec<Check>> {
    let p = p2(cfg)?;
    let h = cfg.diff_step.unwrap_or(EIGEN_STEP);
    let pts = eigen_points(EIGEN_POINTS)?;
    let pp = OperatorParams::P2 { params: p, chart: cfg.chart_params };
    let l1 = build_operator(OperatorId::L1, &pp)?;
    let ham = build_operator(OperatorId::HP2, &pp)?;
    let mut out = Vec::new();
    for n in levels(p.nmax(), cfg.level) {
        let e = C64::new(p2_energy(&p, n)?, 0.0);
        for (a, m) in p.level_states(n)? {
            let s = P2State::equidistant(&p, a, m)?;
            let f = |q: &AmbientPoint| s.eval_ambient(q);
            let mu = p.check_nm(a, m)?;
            out.push(eigen_check(format!("L1 n={a} m={m}"), &l1, &f, &pts, C64::new(mu * mu, 0.0), h, EIGEN_TOL, true)?);
            out.push(eigen_check(format!("H n={a} m={m}"), &ham, &f, &pts, e, h, EIGEN_TOL, true)?);
        }
        if let Some(cp) = cfg.chart_params {
            let l2 = build_operator(OperatorId::L2, &pp)?;
            for (j, roots) in p2_sh_roots(&p, n, &cp, &sh_solver(cfg))?.into_iter().enumerate() {
                let lam = p2_sh_lambda(&p, &roots.roots, &cp);
                let s = P2State::semi_hyperbolic(&p, roots)?;
                let f = |q: &AmbientPoint| s.eval_ambient(q);
                out.push(eigen_check(format!("H semi-hyperbolic N={n} j={j}"), &ham, &f, &pts, e, h, EIGEN_TOL, true)?);
                out.push(eigen_check(format!("L2 semi-hyperbolic N={n} j={j}"), &l2, &f, &pts, lam, h, 1e-5, false)?);
            }
        }
    }
    Ok(out)
}

const ENERGY_TOL: f64 = 1e-12;

fn p1_cross_chart(p: &P1Params) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in levels(p.nmax(), None) {
        let e = p1_energy(p, n)?;
        out.push(Check::hard(format!("horicyclic E N={n}"), (horicyclic_energy(p, n)? - e).abs(), ENERGY_TOL));
        out.push(Check::hard(format!("elliptic-parabolic E N={n}"), (elliptic_parabolic_energy(p, n)? - e).abs(), ENERGY_TOL));
    }
    Ok(out)
}

fn p2_cross_chart(p: &P2Params) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in levels(p.nmax(), None) {
        let e = p2_energy(p, n)?;
        let z = p2_sh_energy(p, n);
        out.push(Check::hard(format!("semi-hyperbolic E N={n}"), (z - e).norm(), ENERGY_TOL));
    }
    Ok(out)
}

fn linear_relations(cfg: &RunConfig) -> Result<Vec<Check>> {
    let p = p1(cfg)?;
    let h = cfg.diff_step.unwrap_or(EIGEN_STEP);
    let f = |q: &AmbientPoint| Ok(C64::new(q.w2 * (-q.w0).exp(), 0.0));
    let g = |q: &AmbientPoint| Ok(C64::new((0.3 * q.w1 - 0.2 * q.w0).cos() / q.w0, 0.0));
    let k = |q: &AmbientPoint| Ok(C64::new((q.w1 * q.w2).sin() / (q.w0 * q.w0), 0.0));
    let fns: [&ScalarFn; 3] = [&f, &g, &k];
    let pts = ChartRelationPoints::default();
    let mut out: Vec<Check> = check_linear_relations(&p, &fns, &pts, h)?.into_iter().map(Check::from).collect();
    let orders = linear_relation_orders(&p, &fns, &pts, 2e-2)?;
    out.push(Check::order("linRel3 order", orders[0], 1.9));
    out.push(Check::order("linRel4 order", orders[1], 1.9));
    Ok(out)
}

fn quadratic_algebra(cfg: &RunConfig) -> Result<Vec<Check>> {
    let p = p1(cfg)?;
    let h = cfg.diff_step.unwrap_or(5e-3);
    let pts: Vec<(f64, f64)> = (0..8).map(|i| (0.4 + 0.12 * i as f64, -0.3 + 0.1 * i as f64)).collect();
    let mut out = Vec::new();
    for n in levels(p.nmax(), cfg.level) {
        let w = w_matrix(&p, n, WMethod::Hyp3F2)?;
        let rep = multiplet_matrices(&p, n, &w)?;
        out.push(Check::hard(format!("Rconsistency N={n}"), r_consistency(&p, &rep, &w), 1e-10));
        if n > 0 {
            let rp = project_r(&p, n, &pts, h)?;
            let d = (rp - &rep.r).abs().max() / rep.r.abs().max();
            out.push(Check::hard(format!("Rprojection N={n}"), d, 1e-5).note(format!("{} collocation points, step {h}", pts.len())));
        }
        for r in check_quadratic_algebra(&rep, &p) {
            let mut c = Check::from(r);
            c.id = format!("{} N={n}", c.id);
            out.push(c);
        }
    }
    Ok(out)
}

fn interbasis(cfg: &RunConfig) -> Result<Vec<Check>> {
    let p = p1(cfg)?;
    let pts = default_sample_points(50);
    let mut out = Vec::new();
    for n in levels(p.nmax(), cfg.level) {
        let q = w_matrix(&p, n, WMethod::Quadrature)?;
        let f = w_matrix(&p, n, WMethod::Hyp3F2)?;
        let hh = w_matrix(&p, n, WMethod::Hahn)?;
        let agree = q.max_diff(&f).max(q.max_diff(&hh)).max(f.max_diff(&hh));
        out.push(Check::hard(format!("three-method agreement N={n}"), agree, 1e-8));
        out.push(Check::hard(format!("orthogonality N={n}"), f.orthogonality_defect(), 1e-8));
        out.push(Check::hard(format!("expansion N={n}"), verify_expansion(&p, &f, &pts)?, 1e-6).note("50 points"));
        for m in [WMethod::PrintedQuadrature, WMethod::Printed3F2, WMethod::PrintedHahn] {
            let pw = w_matrix(&p, n, m)?;
            out.push(
                Check::soft(format!("{} vs quadrature N={n}", m.name()), q.max_diff(&pw), 1e-8)
                    .note(format!("orthogonality defect {:e}", pw.orthogonality_defect())),
            );
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::{Command, Flags};

    fn cfg(args: &[(&str, &str)], suite: Suite) -> RunConfig {
        let mut f = Flags::default();
        for (k, v) in args {
            let v = Some(v.to_string());
            match *k {
                "potential" => f.potential = v,
                "alpha" => f.alpha = v,
                "beta" => f.beta = v,
                "gamma" => f.gamma = v,
                "chart" => f.chart = v,
                _ => unreachable!(),
            }
        }
        let mut c = RunConfig::resolve(Command::Verify, &f, 0).unwrap();
        c.suite = Some(suite);
        c
    }

    fn fixture(suite: Suite) -> RunConfig {
        cfg(&[("potential", "v1"), ("alpha", "1"), ("beta", "sqrt(2)/2"), ("gamma", "2*sqrt(2)")], suite)
    }

    #[test]
    fn cross_chart_fixture() {
        let c = run_suite(&fixture(Suite::CrossChart), Suite::CrossChart).unwrap();
        assert_eq!(c.len(), 6);
        assert!(all_hard_pass(&c));
    }

    #[test]
    fn v1_only_suite_rejected_for_v2() {
        let c = cfg(&[("potential", "v2"), ("alpha", "0.1"), ("beta", "3"), ("gamma", "1")], Suite::Interbasis);
        assert!(matches!(run_suite(&c, Suite::Interbasis), Err(Error::Config(_))));
    }

    #[test]
    fn empty_window_gives_no_checks() {
        let c = cfg(&[("potential", "v1"), ("alpha", "1"), ("beta", "10"), ("gamma", "1")], Suite::CrossChart);
        assert!(run_suite(&c, Suite::CrossChart).unwrap().is_empty());
    }

    #[test]
    fn soft_failures_do_not_fail() {
        let checks = vec![Check::hard("a", 0.0, 1.0), Check::soft("b", 2.0, 1.0)];
        assert!(all_hard_pass(&checks));
        assert!(!all_hard_pass(&[Check::hard("c", 2.0, 1.0)]));
        assert!(Check::order("o", 2.0, 1.9).pass);
    }
}
