//! Deflated multi-start Newton iteration shared by the root solvers.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Residual vector and Jacobian of a square system.
pub(crate) type System<'a> = dyn Fn(&[f64]) -> Option<(Vec<f64>, DMatrix<f64>)> + 'a;

#[derive(Debug, Clone, Copy)]
pub(crate) struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

// ∇ ln M for M(x) = Π_k (1/|x − x_k|² + 1)
fn deflation_grad(x: &[f64], known: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let mut m = 1.0;
    let mut g = vec![0.0; x.len()];
    for k in known {
        let r2: f64 = x.iter().zip(k).map(|(a, b)| (a - b) * (a - b)).sum();
        let mk = 1.0 / r2 + 1.0;
        m *= mk;
        for (gi, (a, b)) in g.iter_mut().zip(x.iter().zip(k)) {
            *gi += -2.0 * (a - b) / (r2 * r2 * mk);
        }
    }
    (m, g)
}

fn newton_step(sys: &System, x: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let (f, j) = sys(x)?;
    if f.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let rhs = DVector::from_iterator(f.len(), f.iter().map(|v| -v));
    let d = j.lu().solve(&rhs)?;
    if d.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some((f, d.iter().copied().collect()))
}

/// Newton from `x0` with deflation of the `known` solutions. Returns the
/// final point and its undeflated residual (max norm).
pub(crate) fn deflated_newton(sys: &System, x0: &[f64], known: &[Vec<f64>], opt: NewtonOptions) -> Option<(Vec<f64>, f64)> {
    let mut x = x0.to_vec();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for _ in 0..opt.max_iter {
        let (f, mut d) = newton_step(sys, &x)?;
        let res = max_abs(&f);
        if best.as_ref().map_or(true, |b| res < b.1) {
            best = Some((x.clone(), res));
        }
        if res < opt.tol * 1e-3 {
            break;
        }
        if !known.is_empty() {
            let (_, g) = deflation_grad(&x, known);
            let gd: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
            let den = 1.0 - gd;
            if den.abs() < 1e-14 {
                return best;
            }
            d.iter_mut().for_each(|v| *v /= den);
        }
        let merit = |y: &[f64]| -> Option<f64> {
            let (fy, _) = sys(y)?;
            let (m, _) = deflation_grad(y, known);
            let v = m * norm2(&fy);
            v.is_finite().then_some(v)
        };
        let m0 = merit(&x)?;
        let mut lam = 1.0;
        let mut next = None;
        while lam > 1e-6 {
            let y: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + lam * b).collect();
            if let Some(m) = merit(&y) {
                if m < m0 || lam < 2e-6 {
                    next = Some(y);
                    break;
                }
            }
            lam *= 0.5;
        }
        let y = next.unwrap_or_else(|| x.iter().zip(&d).map(|(a, b)| a + lam * b).collect());
        let step = max_abs(&y.iter().zip(&x).map(|(a, b)| a - b).collect::<Vec<_>>());
        x = y;
        if step < 1e-15 * (1.0 + max_abs(&x)) {
            break;
        }
    }
    // polish without deflation
    for _ in 0..8 {
        let Some((f, d)) = newton_step(sys, &x) else { break };
        let res = max_abs(&f);
        if best.as_ref().map_or(true, |b| res < b.1) {
            best = Some((x.clone(), res));
        }
        if res == 0.0 {
            break;
        }
        x = x.iter().zip(&d).map(|(a, b)| a + b).collect();
    }
    if let Some((f, _)) = sys(&x) {
        let res = max_abs(&f);
        if res.is_finite() && best.as_ref().map_or(true, |b| res < b.1) {
            best = Some((x, res));
        }
    }
    best
}

/// Outcome of a multi-start search.
pub(crate) struct SearchResult {
    pub solutions: Vec<(Vec<f64>, f64)>,
    pub best_residual: f64,
}

/// Permutation-aware key for comparing configurations.
pub(crate) type Canon<'a> = dyn Fn(&[f64]) -> Vec<f64> + 'a;

fn permutations(v: &[Vec<f64>]) -> Vec<Vec<Vec<f64>>> {
    if v.len() <= 1 {
        return vec![v.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut rest = v.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head.clone());
            out.push(p);
        }
    }
    out
}

/// Images of a solution under the permutation symmetry of the unknowns,
/// which come in blocks of `block` consecutive coordinates.
fn images(x: &[f64], block: usize) -> Vec<Vec<f64>> {
    let n = x.len() / block;
    let blocks: Vec<Vec<f64>> = x.chunks(block).map(|c| c.to_vec()).collect();
    if n > 5 {
        return vec![x.to_vec()];
    }
    permutations(&blocks).into_iter().map(|p| p.concat()).collect()
}

/// Run deflated Newton from every start (order shuffled by `seed`), keeping
/// distinct solutions whose residual is below `opt.tol`.
pub(crate) fn multistart(
    sys: &System,
    mut starts: Vec<Vec<f64>>,
    block: usize,
    canon: &Canon,
    accept: &dyn Fn(&[f64]) -> bool,
    seed: u64,
    opt: NewtonOptions,
) -> SearchResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    starts.shuffle(&mut rng);
    let mut known: Vec<Vec<f64>> = Vec::new();
    let mut sols: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut best = f64::INFINITY;
    for s in starts {
        let Some((x, res)) = deflated_newton(sys, &s, &known, opt) else { continue };
        if !x.iter().all(|v| v.is_finite()) {
            continue;
        }
        best = best.min(res);
        if res > opt.tol || !accept(&x) {
            continue;
        }
        let key = canon(&x);
        let scale = 1.0 + max_abs(&key);
        let dup = sols.iter().any(|(y, _)| {
            let ky = canon(y);
            key.iter().zip(&ky).all(|(a, b)| (a - b).abs() < 1e-7 * scale)
        });
        if dup {
            continue;
        }
        known.extend(images(&x, block));
        sols.push((key, res));
    }
    SearchResult { solutions: sols, best_residual: best }
}

/// Uniform jitter helper for start generation.
pub(crate) fn jitter(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_both_roots_of_a_quadratic() {
        let sys = |x: &[f64]| {
            let f = vec![x[0] * x[0] - 3.0 * x[0] - 12.5];
            Some((f, DMatrix::from_element(1, 1, 2.0 * x[0] - 3.0)))
        };
        let starts = vec![vec![0.0], vec![0.5], vec![1.0], vec![2.0]];
        let canon = |x: &[f64]| x.to_vec();
        let opt = NewtonOptions { tol: 1e-12, max_iter: 100 };
        let r = multistart(&sys, starts, 1, &canon, &|_| true, 0, opt);
        let mut roots: Vec<f64> = r.solutions.iter().map(|s| s.0[0]).collect();
        roots.sort_by(f64::total_cmp);
        assert_eq!(roots.len(), 2);
        let s59 = 59f64.sqrt();
        assert!((roots[0] - (3.0 - s59) / 2.0).abs() < 1e-12);
        assert!((roots[1] - (3.0 + s59) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn permutation_images() {
        let im = images(&[1.0, 2.0, 3.0, 4.0], 2);
        assert_eq!(im.len(), 2);
        assert!(im.contains(&vec![3.0, 4.0, 1.0, 2.0]));
    }
}
