use num_complex::Complex64 as C64;

use super::config::{GridSpec, Potential, RunConfig};
use super::output::{Document, Field, Record};
use crate::error::{Error, Result};
use crate::geometry::{Chart, SemiHyperbolicParams};
use crate::interbasis::{w_matrix, WMethod};
use crate::potential1::{
    p1_energy, p1_ep_lambda, p1_ep_roots, p1_hp_roots, p1_hp_tau, BetheRoots, P1Params, P1State, RootSystem,
    SolverOptions,
};
use crate::potential2::{
    p2_energy, p2_sh_lambda, p2_sh_lambda_printed, p2_sh_roots, ComplexBetheRoots, P2Params, P2State, ShSolverOptions,
};

pub(crate) fn meta(cfg: &RunConfig) -> Record {
    let mut r = Record::new()
        .with("tool", "hypersint")
        .with("version", env!("CARGO_PKG_VERSION"))
        .with("command", cfg.command.name())
        .with("potential", cfg.potential.name())
        .with("alpha", cfg.alpha)
        .with("beta", cfg.beta)
        .with("gamma", cfg.gamma)
        .with("chart", cfg.chart.name());
    if let Some(cp) = cfg.chart_params {
        r = r.with("chart_params", vec![cp.a, cp.b, cp.e3]);
    }
    r.with("seed", cfg.seed)
}

pub(crate) fn p1(cfg: &RunConfig) -> Result<P1Params> {
    P1Params::new(cfg.alpha, cfg.beta, cfg.gamma)
}

pub(crate) fn p2(cfg: &RunConfig) -> Result<P2Params> {
    P2Params::new(cfg.alpha, cfg.beta, cfg.gamma)
}

pub(crate) fn solver(cfg: &RunConfig) -> SolverOptions {
    SolverOptions { system: cfg.system, tol: cfg.solver_tol, seed: cfg.seed, ..SolverOptions::default() }
}

pub(crate) fn sh_solver(cfg: &RunConfig) -> ShSolverOptions {
    ShSolverOptions { tol: cfg.solver_tol, seed: cfg.seed, ..ShSolverOptions::default() }
}

fn chart_params(cfg: &RunConfig) -> Result<SemiHyperbolicParams> {
    cfg.chart_params.ok_or_else(|| Error::Config("semi-hyperbolic chart needs --chart-params".into()))
}

fn p1_roots(cfg: &RunConfig, p: &P1Params, n: usize) -> Result<Vec<BetheRoots>> {
    match cfg.chart {
        Chart::EllipticParabolic => p1_ep_roots(p, n, &solver(cfg)),
        Chart::HyperbolicParabolic => p1_hp_roots(p, n, &solver(cfg)),
        c => Err(Error::Config(format!("chart {c} has no root equations"))),
    }
}

fn p1_constant(cfg: &RunConfig, p: &P1Params, roots: &[f64]) -> f64 {
    match cfg.chart {
        Chart::EllipticParabolic => p1_ep_lambda(p, roots),
        _ => p1_hp_tau(p, roots),
    }
}

fn no_bound_states() -> Record {
    Record::new()
        .with("N", Field::Null)
        .with("E", Field::Null)
        .with("degeneracy", 0usize)
        .with("labels", "no bound states")
        .with("values", Field::Null)
}

/// Bound-state energies with per-state labels of the chosen chart.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Document> {
    let mut records = Vec::new();
    match cfg.potential {
        Potential::V1 => {
            let p = p1(cfg)?;
            for n in 0..=p.nmax().map_or(-1, |x| x as i64) {
                let n = n as usize;
                let e = p1_energy(&p, n)?;
                let (labels, values): (Vec<String>, Vec<f64>) = match cfg.chart {
                    Chart::Equidistant => p
                        .level_states(n)?
                        .into_iter()
                        .map(|(a, m)| Ok((format!("n={a} m={m}"), p.check_nm(a, m)?)))
                        .collect::<Result<Vec<_>>>()?
                        .into_iter()
                        .unzip(),
                    Chart::Horicyclic => (0..=n)
                        .map(|n1| {
                            let ev = 2.0 * p.gamma * p.gamma - 2.0 * p.c() * (2.0 * n1 as f64 + p.d + 1.0);
                            (format!("n1={n1} n2={}", n - n1), ev)
                        })
                        .unzip(),
                    _ => p1_roots(cfg, &p, n)?
                        .iter()
                        .enumerate()
                        .map(|(j, r)| (format!("j={j}"), p1_constant(cfg, &p, &r.roots)))
                        .unzip(),
                };
                records.push(
                    Record::new()
                        .with("N", n)
                        .with("E", e)
                        .with("degeneracy", labels.len())
                        .with("labels", labels.join(";"))
                        .with("values", values),
                );
            }
        }
        Potential::V2 => {
            let p = p2(cfg)?;
            for n in 0..=p.nmax().map_or(-1, |x| x as i64) {
                let n = n as usize;
                let e = p2_energy(&p, n)?;
                let (labels, values): (Vec<String>, Vec<f64>) = match cfg.chart {
                    Chart::Equidistant => p
                        .level_states(n)?
                        .into_iter()
                        .map(|(a, m)| Ok((format!("n={a} m={m}"), p.check_nm(a, m)?)))
                        .collect::<Result<Vec<_>>>()?
                        .into_iter()
                        .unzip(),
                    _ => {
                        let cp = chart_params(cfg)?;
                        p2_sh_roots(&p, n, &cp, &sh_solver(cfg))?
                            .iter()
                            .enumerate()
                            .map(|(j, r)| (format!("j={j}"), p2_sh_lambda(&p, &r.roots, &cp).re))
                            .unzip()
                    }
                };
                records.push(
                    Record::new()
                        .with("N", n)
                        .with("E", e)
                        .with("degeneracy", labels.len())
                        .with("labels", labels.join(";"))
                        .with("values", values),
                );
            }
        }
    }
    if records.is_empty() {
        records.push(no_bound_states());
    }
    Ok(Document { meta: meta(cfg).with("values", value_label(cfg)), records })
}

fn value_label(cfg: &RunConfig) -> &'static str {
    match (cfg.potential, cfg.chart) {
        (_, Chart::Equidistant) => "mu",
        (_, Chart::Horicyclic) => "L2 eigenvalue",
        (_, Chart::EllipticParabolic) => "lambda",
        (_, Chart::HyperbolicParabolic) => "tau",
        (_, Chart::SemiHyperbolic) => "lambda",
    }
}

fn default_grid(chart: Chart) -> Option<GridSpec> {
    let g = |lo1, hi1, lo2, hi2| Some(GridSpec { n1: 50, n2: 50, lo1, hi1, lo2, hi2 });
    match chart {
        Chart::Equidistant => g(0.05, 3.0, -3.0, 3.0),
        Chart::Horicyclic => g(0.05, 3.0, 0.05, 3.0),
        Chart::EllipticParabolic | Chart::HyperbolicParabolic => g(0.05, 3.0, 0.05, 1.5),
        Chart::SemiHyperbolic => None,
    }
}

enum AnyState {
    P1(P1State),
    P2(P2State),
}

impl AnyState {
    fn eval(&self, u1: f64, u2: f64) -> Result<C64> {
        match self {
            AnyState::P1(s) => Ok(C64::new(s.eval_chart(u1, u2)?, 0.0)),
            AnyState::P2(s) => s.eval_chart(u1, u2),
        }
    }
}

fn pick_config<T>(mut all: Vec<T>, j: usize, n: usize) -> Result<T> {
    if j >= all.len() {
        return Err(Error::OutOfWindow(format!("level {n} has {} root configurations, index {j} requested", all.len())));
    }
    Ok(all.swap_remove(j))
}

fn build_state(cfg: &RunConfig) -> Result<(AnyState, f64)> {
    let (a, b) = cfg.quantum.ok_or_else(|| Error::Config("wavefunction needs --quantum".into()))?;
    match cfg.potential {
        Potential::V1 => {
            let p = p1(cfg)?;
            let s = match cfg.chart {
                Chart::Equidistant => P1State::equidistant(&p, a, b)?,
                Chart::Horicyclic => P1State::horicyclic(&p, a, b)?,
                Chart::EllipticParabolic => P1State::elliptic_parabolic(&p, pick_config(p1_roots(cfg, &p, a)?, b, a)?)?,
                Chart::HyperbolicParabolic => {
                    P1State::hyperbolic_parabolic(&p, pick_config(p1_roots(cfg, &p, a)?, b, a)?)?
                }
                Chart::SemiHyperbolic => unreachable!("rejected by config"),
            };
            let e = s.energy()?;
            Ok((AnyState::P1(s), e))
        }
        Potential::V2 => {
            let p = p2(cfg)?;
            let s = match cfg.chart {
                Chart::Equidistant => P2State::equidistant(&p, a, b)?,
                _ => {
                    let cp = chart_params(cfg)?;
                    let all: Vec<ComplexBetheRoots> = p2_sh_roots(&p, a, &cp, &sh_solver(cfg))?;
                    P2State::semi_hyperbolic(&p, pick_config(all, b, a)?)?
                }
            };
            let e = s.energy()?;
            Ok((AnyState::P2(s), e))
        }
    }
}

/// Ψ and |Ψ|² on a chart grid.
pub fn cmd_wavefunction(cfg: &RunConfig) -> Result<Document> {
    let grid = cfg
        .grid
        .or_else(|| default_grid(cfg.chart))
        .ok_or_else(|| Error::Config(format!("chart {} needs an explicit --grid", cfg.chart)))?;
    let (state, energy) = build_state(cfg)?;
    let (a, b) = cfg.quantum.expect("checked in build_state");
    let mut records = Vec::with_capacity(grid.n1 * grid.n2);
    for (u1, u2) in grid.points() {
        let v = state.eval(u1, u2)?;
        records.push(
            Record::new().with("u1", u1).with("u2", u2).with("psi_re", v.re).with("psi_im", v.im).with("prob", v.norm_sqr()),
        );
    }
    let log_norm = match &state {
        AnyState::P1(s) => s.log_norm,
        AnyState::P2(s) => s.log_norm,
    };
    let m = meta(cfg)
        .with("quantum", vec![a, b])
        .with("energy", energy)
        .with("log_norm", log_norm)
        .with("normalization", "unit L2 norm over the chart domain with the invariant measure")
        .with("grid", vec![grid.n1 as f64, grid.n2 as f64, grid.lo1, grid.hi1, grid.lo2, grid.hi2]);
    Ok(Document { meta: m, records })
}

/// Root configurations of level N with their separation constants.
pub fn cmd_roots(cfg: &RunConfig) -> Result<Document> {
    let n = cfg.level.ok_or_else(|| Error::Config("roots needs --N".into()))?;
    let mut records = Vec::new();
    match cfg.potential {
        Potential::V1 => {
            let p = p1(cfg)?;
            for (j, r) in p1_roots(cfg, &p, n)?.into_iter().enumerate() {
                records.push(
                    Record::new()
                        .with("N", n)
                        .with("j", j)
                        .with("roots", r.roots.clone())
                        .with("residual", r.residual)
                        .with("constant", p1_constant(cfg, &p, &r.roots))
                        .with("inner", r.zone_counts.0)
                        .with("outer", r.zone_counts.1)
                        .with("out_of_zone", r.out_of_zone),
                );
            }
        }
        Potential::V2 => {
            if cfg.chart != Chart::SemiHyperbolic {
                return Err(Error::Config("roots for v2 needs --chart semi-hyperbolic".into()));
            }
            let p = p2(cfg)?;
            let cp = chart_params(cfg)?;
            for (j, r) in p2_sh_roots(&p, n, &cp, &sh_solver(cfg))?.into_iter().enumerate() {
                let lam = p2_sh_lambda(&p, &r.roots, &cp);
                let lam_p = p2_sh_lambda_printed(&p, &r.roots, &cp);
                records.push(
                    Record::new()
                        .with("N", n)
                        .with("j", j)
                        .with("roots_re", r.roots.iter().map(|z| z.re).collect::<Vec<_>>())
                        .with("roots_im", r.roots.iter().map(|z| z.im).collect::<Vec<_>>())
                        .with("residual", r.residual)
                        .with("constant", lam.re)
                        .with("constant_im", lam.im)
                        .with("printed_constant_re", lam_p.re)
                        .with("printed_constant_im", lam_p.im)
                        .with("conjugate_closed", r.conjugate_closed),
                );
            }
        }
    }
    let system = match cfg.system {
        RootSystem::Corrected => "corrected",
        RootSystem::Printed => "printed",
    };
    Ok(Document { meta: meta(cfg).with("N", n).with("system", system).with("solver_tol", cfg.solver_tol), records })
}

const ALL_METHODS: [WMethod; 6] = [
    WMethod::Quadrature,
    WMethod::Hyp3F2,
    WMethod::Hahn,
    WMethod::PrintedQuadrature,
    WMethod::Printed3F2,
    WMethod::PrintedHahn,
];

/// Interbasis matrices of level N, one record per entry and method.
pub fn cmd_interbasis(cfg: &RunConfig) -> Result<Document> {
    if cfg.potential != Potential::V1 {
        return Err(Error::Config("interbasis coefficients exist for v1 only".into()));
    }
    let p = p1(cfg)?;
    let n = cfg.level.ok_or_else(|| Error::Config("interbasis needs --N".into()))?;
    let reference = w_matrix(&p, n, WMethod::Quadrature)?;
    let methods: Vec<WMethod> = cfg.method.map_or(ALL_METHODS.to_vec(), |m| vec![m]);
    let mut records = Vec::new();
    for m in methods {
        let w = w_matrix(&p, n, m)?;
        for n1 in 0..=n {
            for col in 0..=n {
                let v = w.get(n1, col);
                records.push(
                    Record::new()
                        .with("method", m.name())
                        .with("n1", n1)
                        .with("m", col)
                        .with("value", v)
                        .with("diff_vs_quadrature", (v - reference.get(n1, col)).abs()),
                );
            }
        }
    }
    let m = meta(cfg)
        .with("N", n)
        .with("orientation", "row n1 (horicyclic), column m (equidistant)")
        .with("orthogonality_defect", reference.orthogonality_defect());
    Ok(Document { meta: m, records })
}
