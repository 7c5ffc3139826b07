//! Symmetry operators of both potentials as `OperatorExpr` values, eigenvalue
//! residuals, the linear relations among the V1 integrals and the quadratic
//! algebra on degenerate multiplets.

mod multiplet;
mod relations;

pub use multiplet::{
    anticommutator, check_quadratic_algebra, multiplet_matrices, project_r, r_consistency, symmetrizer3, Basis,
    MultipletRep,
};
pub use relations::{
    check_linear_relations, ep_chart_l3, hp_chart_l4, linear_relation_orders, ChartRelationPoints,
};

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{guard, AmbientPoint, Coeff, Generator, OperatorExpr, ScalarFn, SemiHyperbolicParams};
use crate::potential1::{v1_coeff, P1Params};
use crate::potential2::{v2_ambient, P2Params};

use Generator::{K2, K3, M1};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorId {
    L1,
    L2,
    L3,
    L4,
    N1,
    N2,
    R,
    L12,
    L13,
    L23,
    HP1,
    HP2,
}

impl OperatorId {
    pub fn name(self) -> &'static str {
        match self {
            OperatorId::L1 => "L1",
            OperatorId::L2 => "L2",
            OperatorId::L3 => "L3",
            OperatorId::L4 => "L4",
            OperatorId::N1 => "N1",
            OperatorId::N2 => "N2",
            OperatorId::R => "R",
            OperatorId::L12 => "L12",
            OperatorId::L13 => "L13",
            OperatorId::L23 => "L23",
            OperatorId::HP1 => "H_p1",
            OperatorId::HP2 => "H_p2",
        }
    }
}

impl fmt::Display for OperatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters an operator is built for. V2's L2 needs the semi-hyperbolic
/// chart parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorParams {
    P1(P1Params),
    P2 { params: P2Params, chart: Option<SemiHyperbolicParams> },
}

/// Identity checked by an algebra report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum IdentityId {
    #[serde(rename = "linRel3")]
    LinRel3,
    #[serde(rename = "linRel4")]
    LinRel4,
    #[serde(rename = "commRN2")]
    CommRN2,
    #[serde(rename = "commRN1")]
    CommRN1,
    #[serde(rename = "Rsquared")]
    RSquared,
    #[serde(rename = "Rconsistency")]
    RConsistency,
}

impl IdentityId {
    pub fn name(self) -> &'static str {
        match self {
            IdentityId::LinRel3 => "linRel3",
            IdentityId::LinRel4 => "linRel4",
            IdentityId::CommRN2 => "commRN2",
            IdentityId::CommRN1 => "commRN1",
            IdentityId::RSquared => "Rsquared",
            IdentityId::RConsistency => "Rconsistency",
        }
    }
}

/// Outcome of one identity check. `hard` checks decide exit codes; soft ones
/// carry a discrepancy report in `offset` and `notes` when they fail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraReport {
    pub id: IdentityId,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub hard: bool,
    /// Best constant c with LHS − RHS ≈ c·I, reported on failure.
    pub offset: Option<f64>,
    pub notes: String,
}

fn real(f: impl Fn(&AmbientPoint) -> Result<f64> + Send + Sync + 'static) -> Coeff {
    Arc::new(move |q| Ok(C64::new(f(q)?, 0.0)))
}

fn cplx(f: impl Fn(&AmbientPoint) -> Result<C64> + Send + Sync + 'static) -> Coeff {
    Arc::new(f)
}

fn dm(q: &AmbientPoint) -> Result<f64> {
    guard(q.w0 - q.w1, "w0 - w1")
}

fn w2(q: &AmbientPoint) -> Result<f64> {
    guard(q.w2, "w2")
}

/// (K2 − M1)².
fn k2_minus_m1_sq(c: f64) -> OperatorExpr {
    OperatorExpr::new().word(c, &[K2, K2]).word(-c, &[K2, M1]).word(-c, &[M1, K2]).word(c, &[M1, M1])
}

/// (M1 + σ i K2)² = M1² + σ i (M1K2 + K2M1) − K2².
fn m1_plus_i_k2_sq(sigma: f64, c: f64) -> OperatorExpr {
    let i = C64::new(0.0, sigma * c);
    OperatorExpr::new()
        .word(c, &[M1, M1])
        .complex_word(i, &[M1, K2])
        .complex_word(i, &[K2, M1])
        .word(-c, &[K2, K2])
}

fn p1_l1(p: &P1Params) -> OperatorExpr {
    let (b2, g2) = (p.beta * p.beta, p.gamma * p.gamma);
    OperatorExpr::new().word(1.0, &[K3, K3]).multiply(
        "-2β²((w0+w1)/D)² + 2γ²(w0+w1)/D",
        real(move |q| {
            let x = (q.w0 + q.w1) / dm(q)?;
            Ok(-2.0 * b2 * x * x + 2.0 * g2 * x)
        }),
    )
}

fn p1_l2(p: &P1Params) -> OperatorExpr {
    let (a2, b2, g2) = (p.alpha * p.alpha, p.beta * p.beta, p.gamma * p.gamma);
    k2_minus_m1_sq(1.0)
        .multiply(
            "-2β²w2²/D² - 2α²D²/w2²",
            real(move |q| {
                let r = w2(q)? / dm(q)?;
                Ok(-2.0 * b2 * r * r - 2.0 * a2 / (r * r))
            }),
        )
        .plus_constant(2.0 * g2)
}

fn p1_l3(p: &P1Params) -> OperatorExpr {
    let (a2, b2, g2) = (p.alpha * p.alpha, p.beta * p.beta, p.gamma * p.gamma);
    k2_minus_m1_sq(-1.0).word(-1.0, &[K3, K3]).multiply(
        "2β²((w0+w1)²+w2²)/D² + 2α²D²/w2² - 4γ²w0/D",
        real(move |q| {
            let (d, y) = (dm(q)?, w2(q)?);
            let s = q.w0 + q.w1;
            Ok(2.0 * b2 * (s * s + y * y) / (d * d) + 2.0 * a2 * d * d / (y * y) - 4.0 * g2 * q.w0 / d)
        }),
    )
}

fn p1_l4(p: &P1Params) -> OperatorExpr {
    let (a2, b2, g2) = (p.alpha * p.alpha, p.beta * p.beta, p.gamma * p.gamma);
    k2_minus_m1_sq(1.0).word(-1.0, &[K3, K3]).multiply(
        "2β²((w0+w1)²-w2²)/D² - 2α²D²/w2² - 4γ²w1/D",
        real(move |q| {
            let (d, y) = (dm(q)?, w2(q)?);
            let s = q.w0 + q.w1;
            Ok(2.0 * b2 * (s * s - y * y) / (d * d) - 2.0 * a2 * d * d / (y * y) - 4.0 * g2 * q.w1 / d)
        }),
    )
}

fn p1_r(p: &P1Params) -> OperatorExpr {
    let (a2, b2, g2) = (p.alpha * p.alpha, p.beta * p.beta, p.gamma * p.gamma);
    OperatorExpr::new()
        // 2{K3,{K2,M1}}
        .word(2.0, &[K3, K2, M1])
        .word(2.0, &[K3, M1, K2])
        .word(2.0, &[K2, M1, K3])
        .word(2.0, &[M1, K2, K3])
        .word(-2.0, &[K3, K2, K2])
        .word(-2.0, &[K2, K2, K3])
        .word(-2.0, &[K3, M1, M1])
        .word(-2.0, &[M1, M1, K3])
        .term(
            "8(α²D²/w2² + β²w2²/D²)",
            &[K3],
            real(move |q| {
                let r = w2(q)? / dm(q)?;
                Ok(8.0 * (a2 / (r * r) + b2 * r * r))
            }),
        )
        .term(
            "16β²w2w0/D² - 8γ²w2/D",
            &[K2],
            real(move |q| {
                let (d, y) = (dm(q)?, w2(q)?);
                Ok(16.0 * b2 * y * q.w0 / (d * d) - 8.0 * g2 * y / d)
            }),
        )
        .term(
            "-16β²w2w1/D² + 8γ²w2/D",
            &[M1],
            real(move |q| {
                let (d, y) = (dm(q)?, w2(q)?);
                Ok(-16.0 * b2 * y * q.w1 / (d * d) + 8.0 * g2 * y / d)
            }),
        )
        .multiply(
            "-4(γ² + 2α²D²/w2² - 2β²(1+2w2²)/D²)",
            real(move |q| {
                let (d, y) = (dm(q)?, w2(q)?);
                Ok(-4.0 * (g2 + 2.0 * a2 * d * d / (y * y) - 2.0 * b2 * (1.0 + 2.0 * y * y) / (d * d)))
            }),
        )
}

fn hamiltonian(v: Coeff) -> OperatorExpr {
    OperatorExpr::laplace_beltrami().scaled(C64::new(-0.5, 0.0)).multiply("V", v)
}

fn p2_l1(p: &P2Params) -> OperatorExpr {
    let (a2, b2, g2) = (p.alpha * p.alpha, p.beta * p.beta, p.gamma * p.gamma);
    OperatorExpr::new().word(1.0, &[K3, K3]).multiply(
        "-2(α²-β²)((w0²-w1²)/r)² - 2γ²w0w1(w0²-w1²)/r²",
        real(move |q| {
            let r = q.w0 * q.w0 + q.w1 * q.w1;
            let x = (q.w0 * q.w0 - q.w1 * q.w1) / r;
            Ok(-2.0 * (a2 - b2) * x * x - 2.0 * g2 * q.w0 * q.w1 * x / r)
        }),
    )
}

fn p2_l12(p: &P2Params) -> OperatorExpr {
    let [k1, k2, _] = p.k();
    let (c1, c2) = (0.25 - k1 * k1, 0.25 - k2 * k2);
    OperatorExpr::new().word(-1.0, &[K3, K3]).multiply(
        "(1/4-k1²)(z̄/z)² + (1/4-k2²)(z/z̄)²",
        cplx(move |q| {
            let (zp, zm) = (C64::new(q.w0, q.w1), C64::new(q.w0, -q.w1));
            let r = zm / zp;
            Ok(c1 * r * r + c2 / (r * r))
        }),
    )
}

/// σ = −1 gives L13, σ = +1 gives L23.
fn p2_l13_l23(p: &P2Params, sigma: f64) -> OperatorExpr {
    let (a2, b2, g2) = (p.alpha * p.alpha, p.beta * p.beta, p.gamma * p.gamma);
    let c = C64::new(b2 - a2, sigma * g2 / 2.0);
    m1_plus_i_k2_sq(sigma, 0.5).multiply(
        "(β²-α²∓iγ²/2)w2²/z² + α²z²/w2²",
        cplx(move |q| {
            let y = w2(q)?;
            let z = C64::new(q.w0, -sigma * q.w1);
            let r = y * y / (z * z);
            Ok(c * r + a2 / r)
        }),
    )
}

/// Constant Σ_l e_l (k_l² − Σ_{j≠l} k_j² + 1/4) completing the V2 second integral.
pub fn p2_l2_constant(p: &P2Params, cp: &SemiHyperbolicParams) -> C64 {
    let k = p.k();
    let e = cp.foci();
    (0..3)
        .map(|l| {
            let others: C64 = (0..3).filter(|&j| j != l).map(|j| k[j] * k[j]).sum();
            e[l] * (k[l] * k[l] - others + 0.25)
        })
        .sum()
}

/// Operator `id` with exact ambient coefficients.
pub fn build_operator(id: OperatorId, params: &OperatorParams) -> Result<OperatorExpr> {
    let wrong = || Error::InvalidParams(format!("operator {id} is not defined for these parameters"));
    match *params {
        OperatorParams::P1(p) => Ok(match id {
            OperatorId::L1 | OperatorId::N1 => p1_l1(&p),
            OperatorId::L2 => p1_l2(&p),
            OperatorId::N2 => p1_l2(&p).plus_constant(-2.0 * p.gamma * p.gamma),
            OperatorId::L3 => p1_l3(&p),
            OperatorId::L4 => p1_l4(&p),
            OperatorId::R => p1_r(&p),
            OperatorId::HP1 => hamiltonian(real(move |q| v1_coeff(&p, q))),
            _ => return Err(wrong()),
        }),
        OperatorParams::P2 { params: p, chart } => Ok(match id {
            OperatorId::L1 => p2_l1(&p),
            OperatorId::L12 => p2_l12(&p),
            OperatorId::L13 => p2_l13_l23(&p, -1.0),
            OperatorId::L23 => p2_l13_l23(&p, 1.0),
            OperatorId::L2 => {
                let cp = chart.ok_or_else(|| Error::InvalidParams("L2 of V2 needs semi-hyperbolic chart params".into()))?;
                let [e1, e2, e3] = cp.foci();
                p2_l12(&p)
                    .scaled(e3)
                    .add(p2_l13_l23(&p, -1.0).scaled(e2))
                    .add(p2_l13_l23(&p, 1.0).scaled(e1))
                    .plus_complex_constant(p2_l2_constant(&p, &cp))
            }
            OperatorId::HP2 => hamiltonian(real(move |q| {
                w2(q)?;
                v2_ambient(&p, q)
            })),
            _ => return Err(wrong()),
        }),
    }
}

/// Step used for eigenvalue checks. With one Richardson level the truncation
/// error at this step is far below the cancellation error of 1e-4.
pub const EIGEN_STEP: f64 = 1e-3;

/// max over points of |(op Ψ − λ Ψ)/Ψ|.
pub fn eigen_residual(op: &OperatorExpr, psi: &ScalarFn, points: &[AmbientPoint], expected: C64, h: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for q in points {
        let v = psi(q)?;
        if v.norm() < 1e-290 {
            return Err(Error::Singular(format!("wavefunction vanishes at {q:?}")));
        }
        let lv = op.apply(psi, q, h)?;
        worst = worst.max(((lv - expected * v) / v).norm());
    }
    Ok(worst)
}

/// Same measure with plain central differences, for step-refinement scans.
pub fn eigen_residual_plain(
    op: &OperatorExpr,
    psi: &ScalarFn,
    points: &[AmbientPoint],
    expected: C64,
    h: f64,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for q in points {
        let v = psi(q)?;
        let lv = op.apply_plain(psi, q, h)?;
        worst = worst.max(((lv - expected * v) / v).norm());
    }
    Ok(worst)
}
