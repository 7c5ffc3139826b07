//! L3 = −L2 − L1 and L4 = L2 − L1, with L3 and L4 applied in their own
//! parabolic charts and L1, L2 as ambient words.

use num_complex::Complex64 as C64;

use super::{build_operator, AlgebraReport, IdentityId, OperatorId, OperatorParams};
use crate::error::Result;
use crate::geometry::{chart_to_ambient, guard, AmbientPoint, Chart, ChartPoint, ScalarFn};
use crate::potential1::P1Params;

/// Chart points (u1, u2) for the two relations.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartRelationPoints {
    pub elliptic: Vec<(f64, f64)>,
    pub hyperbolic: Vec<(f64, f64)>,
}

impl Default for ChartRelationPoints {
    fn default() -> Self {
        let grid = |lo: f64, hi: f64| -> Vec<(f64, f64)> {
            (0..5).flat_map(|i| (0..4).map(move |j| (lo + (hi - lo) * i as f64 / 4.0, 0.25 + 0.3 * j as f64))).collect()
        };
        ChartRelationPoints { elliptic: grid(0.3, 1.1), hyperbolic: grid(0.4, 1.2) }
    }
}

fn d2(g: impl Fn(f64) -> Result<C64>, x: f64, h: f64) -> Result<C64> {
    Ok((g(x + h)? - 2.0 * g(x)? + g(x - h)?) / (h * h))
}

fn d2x(g: impl Fn(f64) -> Result<C64>, x: f64, h: f64, extrapolate: bool) -> Result<C64> {
    if extrapolate {
        let coarse = d2(&g, x, h)?;
        let fine = d2(&g, x, 0.5 * h)?;
        Ok((4.0 * fine - coarse) / 3.0)
    } else {
        d2(g, x, h)
    }
}

fn on_chart<'a>(f: &'a ScalarFn, chart: Chart) -> impl Fn(f64, f64) -> Result<C64> + 'a {
    move |u1, u2| f(&chart_to_ambient(&ChartPoint::new(chart, u1, u2))?)
}

/// L3 in elliptic-parabolic coordinates (a, θ).
pub fn ep_chart_l3(p: &P1Params, f: &ScalarFn, a: f64, th: f64, h: f64, extrapolate: bool) -> Result<C64> {
    let (a2, b2, g2) = (p.alpha * p.alpha, p.beta * p.beta, p.gamma * p.gamma);
    let g = on_chart(f, Chart::EllipticParabolic);
    let (ch, c, sh, s) = (a.cosh(), th.cos(), a.sinh(), th.sin());
    let den = guard(c * c - ch * ch, "cos²θ − cosh²a")?;
    let faa = d2x(|x| g(x, th), a, h, extrapolate)?;
    let ftt = d2x(|x| g(a, x), th, h, extrapolate)?;
    let pot = -2.0 * b2 * (ch.powi(4) * sh * sh + c.powi(4) * s * s) + 2.0 * g2 * (ch.powi(4) - c.powi(4))
        - 2.0 * a2 * (1.0 / a.tanh().powi(2) + 1.0 / th.tan().powi(2));
    Ok((ch * ch * faa + c * c * ftt + pot * g(a, th)?) / den)
}

/// L4 in hyperbolic-parabolic coordinates (b, θ).
pub fn hp_chart_l4(p: &P1Params, f: &ScalarFn, b: f64, th: f64, h: f64, extrapolate: bool) -> Result<C64> {
    let (a2, b2, g2) = (p.alpha * p.alpha, p.beta * p.beta, p.gamma * p.gamma);
    let g = on_chart(f, Chart::HyperbolicParabolic);
    let (ch, c, sh, s) = (b.cosh(), th.cos(), b.sinh(), th.sin());
    let den = guard(sh * sh + s * s, "sinh²b + sin²θ")?;
    let fbb = d2x(|x| g(x, th), b, h, extrapolate)?;
    let ftt = d2x(|x| g(b, x), th, h, extrapolate)?;
    let pot = -2.0 * b2 * (ch * ch * sh.powi(4) - c * c * s.powi(4)) + 2.0 * g2 * (sh.powi(4) - s.powi(4))
        + 2.0 * a2 * (b.tanh().powi(2) + th.tan().powi(2));
    Ok(-(sh * sh * fbb - s * s * ftt + pot * g(b, th)?) / den)
}

// max over functions and points of |chart + σ L2 + L1| / largest term
fn relation_residual(
    p: &P1Params,
    testfns: &[&ScalarFn],
    pts: &ChartRelationPoints,
    which: IdentityId,
    h: f64,
    extrapolate: bool,
) -> Result<f64> {
    let pp = OperatorParams::P1(*p);
    let l1 = build_operator(OperatorId::L1, &pp)?;
    let l2 = build_operator(OperatorId::L2, &pp)?;
    let (chart, list, sigma) = match which {
        IdentityId::LinRel3 => (Chart::EllipticParabolic, &pts.elliptic, 1.0),
        _ => (Chart::HyperbolicParabolic, &pts.hyperbolic, -1.0),
    };
    let mut worst = 0.0f64;
    for f in testfns {
        for &(u1, u2) in list {
            let q: AmbientPoint = chart_to_ambient(&ChartPoint::new(chart, u1, u2))?;
            let lc = match which {
                IdentityId::LinRel3 => ep_chart_l3(p, *f, u1, u2, h, extrapolate)?,
                _ => hp_chart_l4(p, *f, u1, u2, h, extrapolate)?,
            };
            let (a1, a2) = if extrapolate {
                (l1.apply(*f, &q, h)?, l2.apply(*f, &q, h)?)
            } else {
                (l1.apply_plain(*f, &q, h)?, l2.apply_plain(*f, &q, h)?)
            };
            // L3 + L2 + L1 = 0, L4 − L2 + L1 = 0
            let scale = lc.norm().max(a1.norm()).max(a2.norm());
            if scale == 0.0 {
                continue;
            }
            worst = worst.max((lc + sigma * a2 + a1).norm() / scale);
        }
    }
    Ok(worst)
}

/// Residuals of (L3 + L2 + L1) f and (L4 − L2 + L1) f with extrapolated
/// differences at step `h`.
pub fn check_linear_relations(
    p: &P1Params,
    testfns: &[&ScalarFn],
    pts: &ChartRelationPoints,
    h: f64,
) -> Result<[AlgebraReport; 2]> {
    const TOL: f64 = 1e-5;
    let mut out = Vec::with_capacity(2);
    for id in [IdentityId::LinRel3, IdentityId::LinRel4] {
        let residual = relation_residual(p, testfns, pts, id, h, true)?;
        out.push(AlgebraReport {
            id,
            residual,
            tolerance: TOL,
            pass: residual <= TOL,
            hard: true,
            offset: None,
            notes: format!("{} test functions, step {h}", testfns.len()),
        });
    }
    Ok([out[0].clone(), out[1].clone()])
}

/// Observed orders log2(r(h)/r(h/2)) of both relations with plain differences.
pub fn linear_relation_orders(p: &P1Params, testfns: &[&ScalarFn], pts: &ChartRelationPoints, h: f64) -> Result<[f64; 2]> {
    let mut out = [0.0; 2];
    for (i, id) in [IdentityId::LinRel3, IdentityId::LinRel4].into_iter().enumerate() {
        let coarse = relation_residual(p, testfns, pts, id, h, false)?;
        let fine = relation_residual(p, testfns, pts, id, 0.5 * h, false)?;
        out[i] = (coarse / fine).log2();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn fixture() -> P1Params {
        P1Params::new(1.0, 1.0 / SQRT_2, 2.0 * SQRT_2).unwrap()
    }

    #[test]
    fn constant_function() {
        let f = |_: &AmbientPoint| Ok(C64::new(1.0, 0.0));
        let r = check_linear_relations(&fixture(), &[&f], &ChartRelationPoints::default(), 1e-3).unwrap();
        for x in r {
            assert!(x.residual <= 1e-12, "{x:?}");
        }
    }

    #[test]
    fn smooth_function() {
        let f = |q: &AmbientPoint| Ok(C64::new(q.w2 * (-q.w0).exp(), 0.0));
        let g = |q: &AmbientPoint| Ok(C64::new((0.3 * q.w1 - 0.2 * q.w0).cos() / q.w0, 0.0));
        let p = fixture();
        let pts = ChartRelationPoints::default();
        for x in check_linear_relations(&p, &[&f, &g], &pts, 1e-3).unwrap() {
            assert!(x.pass, "{x:?}");
        }
        let orders = linear_relation_orders(&p, &[&f, &g], &pts, 2e-2).unwrap();
        assert!(orders.iter().all(|&o| o >= 1.9), "{orders:?}");
    }
}
