use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{build_operator, AlgebraReport, IdentityId, OperatorId, OperatorParams};
use crate::error::{Error, Result};
use crate::geometry::{chart_to_ambient, AmbientPoint, Chart, ChartPoint};
use crate::interbasis::InterbasisMatrix;
use crate::potential1::{p1_energy, P1Params, P1State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Equidistant,
    Horicyclic,
}

/// N1, N2 and R restricted to one degenerate level. In the equidistant basis
/// row and column index m; N2 = Wᵀ diag(ℓ) W with W rows n1, columns m.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipletRep {
    pub level: usize,
    pub energy: f64,
    pub basis: Basis,
    pub n1: DMatrix<f64>,
    pub n2: DMatrix<f64>,
    pub r: DMatrix<f64>,
}

/// {A, B} = AB + BA.
pub fn anticommutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b + b * a
}

/// Sum over the six orderings of A, B, C.
pub fn symmetrizer3(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>) -> DMatrix<f64> {
    a * b * c + a * c * b + b * a * c + b * c * a + c * a * b + c * b * a
}

/// Eigenvalue of N2 = L2 − 2γ² on Ψ_{n1 n2}.
pub fn n2_eigenvalue(p: &P1Params, n1: usize) -> f64 {
    -2.0 * p.c() * (2.0 * n1 as f64 + p.d + 1.0)
}

pub fn multiplet_matrices(p: &P1Params, n_level: usize, w: &InterbasisMatrix) -> Result<MultipletRep> {
    if w.level != n_level {
        return Err(Error::InvalidParams(format!("W is for level {}, not {n_level}", w.level)));
    }
    let energy = p1_energy(p, n_level)?;
    let k = n_level + 1;
    let mut mus = Vec::with_capacity(k);
    for m in 0..k {
        let mu = p.check_nm(n_level - m, m)?;
        mus.push(mu * mu);
    }
    let n1 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(mus));
    let ell = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(k, (0..k).map(|i| n2_eigenvalue(p, i))));
    let n2 = w.w.transpose() * ell * &w.w;
    let r = &n1 * &n2 - &n2 * &n1;
    Ok(MultipletRep { level: n_level, energy, basis: Basis::Equidistant, n1, n2, r })
}

/// [N1, N2] computed in the horicyclic basis and rotated back, against `rep.r`.
pub fn r_consistency(p: &P1Params, rep: &MultipletRep, w: &InterbasisMatrix) -> f64 {
    let k = rep.level + 1;
    let ell = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(k, (0..k).map(|i| n2_eigenvalue(p, i))));
    let n1h = &w.w * &rep.n1 * w.w.transpose();
    let rh = &n1h * &ell - &ell * &n1h;
    let back = w.w.transpose() * rh * &w.w;
    (back - &rep.r).abs().max()
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.abs().max()
}

fn report(id: IdentityId, lhs: DMatrix<f64>, terms: Vec<DMatrix<f64>>, tol: f64) -> AlgebraReport {
    let scale = terms.iter().map(max_abs).fold(max_abs(&lhs), f64::max).max(f64::MIN_POSITIVE);
    let rhs = terms.into_iter().fold(DMatrix::zeros(lhs.nrows(), lhs.ncols()), |acc, t| acc + t);
    let diff = &lhs - rhs;
    let residual = max_abs(&diff) / scale;
    let pass = residual <= tol;
    let (offset, notes) = if pass {
        (None, String::new())
    } else {
        let k = diff.nrows();
        let c = diff.trace() / k as f64;
        let rest = max_abs(&(&diff - DMatrix::identity(k, k) * c)) / scale;
        (Some(c), format!("LHS - RHS = {c:.6e} I + remainder of relative size {rest:.3e}"))
    };
    AlgebraReport { id, residual, tolerance: tol, pass, hard: false, offset, notes }
}

/// [R,N2], [R,N1] and R² on the multiplet with H = E·I, each normalized by
/// the largest term.
pub fn check_quadratic_algebra(rep: &MultipletRep, p: &P1Params) -> [AlgebraReport; 3] {
    const TOL: f64 = 1e-6;
    let k = rep.level + 1;
    let (a2, b2, g2) = (p.alpha * p.alpha, p.beta * p.beta, p.gamma * p.gamma);
    let id = DMatrix::<f64>::identity(k, k);
    let h = &id * rep.energy;
    let (n1, n2, r) = (&rep.n1, &rep.n2, &rep.r);

    let rn2 = report(
        IdentityId::CommRN2,
        r * n2 - n2 * r,
        vec![n2 * n2 * 8.0, &h * (64.0 * b2), n2 * (16.0 * g2), n1 * (32.0 * b2), &id * (16.0 * b2 * (1.0 - 4.0 * a2))],
        TOL,
    );
    let rn1 = report(
        IdentityId::CommRN1,
        r * n1 - n1 * r,
        vec![
            anticommutator(n1, n2) * -8.0,
            &h * (-32.0 * g2),
            n2 * 16.0,
            n1 * (-16.0 * g2),
            &id * (16.0 * g2 * (1.0 - 2.0 * a2)),
        ],
        TOL,
    );
    let r2 = report(
        IdentityId::RSquared,
        r * r,
        vec![
            symmetrizer3(n2, n2, n1) * (8.0 / 3.0),
            n2 * n2 * (-176.0 / 3.0),
            n1 * n1 * (32.0 * b2),
            &h * &h * (128.0 * b2),
            &h * n2 * (64.0 * g2),
            &h * n1 * (128.0 * b2),
            anticommutator(n1, n2) * (16.0 * g2),
            &h * ((128.0 / 3.0 + 256.0 * a2) * b2),
            n2 * (64.0 * a2 * g2 - 352.0 / 3.0 * g2),
            n1 * ((352.0 / 3.0 - 128.0 * a2) * b2),
            &id * (128.0 * a2 * a2 * b2 + 128.0 * g2 * g2 * a2 - 128.0 / 3.0 * a2 * b2 - 64.0 / 3.0 * b2
                - 48.0 * g2 * g2),
        ],
        TOL,
    );
    [rn2, rn1, r2]
}

/// Matrix of the differential operator R on the equidistant multiplet: R is
/// applied pointwise to each basis function and the result is fitted to the
/// basis by least squares over equidistant collocation points (τ1, τ2).
pub fn project_r(p: &P1Params, n_level: usize, points: &[(f64, f64)], h: f64) -> Result<DMatrix<f64>> {
    let k = n_level + 1;
    if points.len() < k {
        return Err(Error::InvalidParams(format!("need at least {k} collocation points")));
    }
    let op = build_operator(OperatorId::R, &OperatorParams::P1(*p))?;
    let states: Vec<P1State> = (0..k).map(|m| P1State::equidistant(p, n_level - m, m)).collect::<Result<_>>()?;
    let qs: Vec<AmbientPoint> =
        points.iter().map(|&(a, b)| chart_to_ambient(&ChartPoint::new(Chart::Equidistant, a, b))).collect::<Result<_>>()?;
    let mut basis = DMatrix::zeros(qs.len(), k);
    let mut image = DMatrix::zeros(qs.len(), k);
    for (j, s) in states.iter().enumerate() {
        let f = |q: &AmbientPoint| Ok(C64::new(s.eval_ambient(q)?, 0.0));
        for (i, q) in qs.iter().enumerate() {
            basis[(i, j)] = s.eval_ambient(q)?;
            image[(i, j)] = op.apply(&f, q, h)?.re;
        }
    }
    let svd = basis.svd(true, true);
    svd.solve(&image, 1e-14).map_err(|e| Error::Singular(format!("collocation fit: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interbasis::w_3f2;
    use std::f64::consts::SQRT_2;

    fn fixture() -> P1Params {
        P1Params::new(1.0, 1.0 / SQRT_2, 2.0 * SQRT_2).unwrap()
    }

    #[test]
    fn diagonal_entries() {
        let p = fixture();
        let w = w_3f2(&p, 2).unwrap();
        let rep = multiplet_matrices(&p, 2, &w).unwrap();
        let d: Vec<f64> = rep.n1.diagonal().iter().copied().collect();
        for (a, b) in d.iter().zip([49.0, 25.0, 9.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let ev = rep.n2.symmetric_eigenvalues();
        let mut ev: Vec<f64> = ev.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip([-13.0, -9.0, -5.0]) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!((&rep.n2 - rep.n2.transpose()).abs().max() < 1e-10);
        assert!((&rep.r + rep.r.transpose()).abs().max() < 1e-10);
        assert!(r_consistency(&p, &rep, &w) < 1e-10);
    }

    #[test]
    fn scalar_level() {
        let p = fixture();
        let w = w_3f2(&p, 0).unwrap();
        let rep = multiplet_matrices(&p, 0, &w).unwrap();
        assert_eq!(rep.r[(0, 0)], 0.0);
        for r in check_quadratic_algebra(&rep, &p) {
            assert!(r.residual.is_finite());
        }
    }

    #[test]
    fn identities_hold() {
        let p = fixture();
        for n in 0..=2 {
            let w = w_3f2(&p, n).unwrap();
            let rep = multiplet_matrices(&p, n, &w).unwrap();
            for r in check_quadratic_algebra(&rep, &p) {
                assert!(r.pass, "{n} {:?}", r);
            }
        }
    }

    #[test]
    fn symmetrizer_of_equal_arguments() {
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -0.5, 3.0]);
        let d = symmetrizer3(&x, &x, &x) - &x * &x * &x * 6.0;
        assert!(d.abs().max() < 1e-12);
    }

    #[test]
    fn projected_r_matches_commutator() {
        let p = fixture();
        let pts: Vec<(f64, f64)> = (0..8).map(|i| (0.4 + 0.12 * i as f64, -0.3 + 0.1 * i as f64)).collect();
        for n in 1..=2 {
            let w = w_3f2(&p, n).unwrap();
            let rep = multiplet_matrices(&p, n, &w).unwrap();
            let rp = project_r(&p, n, &pts, 5e-3).unwrap();
            let d = (rp - &rep.r).abs().max() / rep.r.abs().max();
            assert!(d < 1e-5, "{n}: {d}");
        }
    }
}
