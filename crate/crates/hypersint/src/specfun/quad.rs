use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    GaussLegendre,
    TanhSinh,
}

/// Variable transform for infinite domains.
///
/// `ExpMap` is the double-exponential exp-sinh (half line) or sinh-sinh
/// (whole line) map and is only available with tanh-sinh. `AlgebraicMap`
/// is x = lo + t/(1−t) on a half line and x = t/(1−t²) on the whole line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    None,
    ExpMap,
    AlgebraicMap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
    pub transform: Transform,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rule: Rule,
    pub level: u32,
    pub domain: Domain,
}

impl QuadratureSpec {
    pub fn new(rule: Rule, level: u32, lo: f64, hi: f64, transform: Transform) -> Self {
        QuadratureSpec { rule, level, domain: Domain { lo, hi, transform } }
    }

    /// Tanh-sinh on a finite interval.
    pub fn finite(level: u32, lo: f64, hi: f64) -> Self {
        Self::new(Rule::TanhSinh, level, lo, hi, Transform::None)
    }

    /// Exp-sinh on [lo, ∞).
    pub fn half_line(level: u32, lo: f64) -> Self {
        Self::new(Rule::TanhSinh, level, lo, f64::INFINITY, Transform::ExpMap)
    }

    /// Sinh-sinh on (−∞, ∞).
    pub fn real_line(level: u32) -> Self {
        Self::new(Rule::TanhSinh, level, f64::NEG_INFINITY, f64::INFINITY, Transform::ExpMap)
    }

    pub fn validate(&self) -> Result<()> {
        let Domain { lo, hi, transform } = self.domain;
        if self.level < 1 {
            return Err(Error::InvalidSpec("level must be at least 1".into()));
        }
        if self.rule == Rule::GaussLegendre && self.level > 10 {
            return Err(Error::InvalidSpec("gauss-legendre level above 10".into()));
        }
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::InvalidSpec(format!("need lo < hi, got [{lo}, {hi}]")));
        }
        let infinite = lo.is_infinite() || hi.is_infinite();
        match transform {
            Transform::None if infinite => {
                Err(Error::InvalidSpec("infinite endpoint needs a transform".into()))
            }
            Transform::ExpMap | Transform::AlgebraicMap if !infinite => {
                Err(Error::InvalidSpec("transform declared on a finite interval".into()))
            }
            Transform::ExpMap if self.rule == Rule::GaussLegendre => {
                Err(Error::InvalidSpec("exp-map is a tanh-sinh transform".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Base node on [−1, 1] with both endpoint distances kept to full precision.
#[derive(Clone, Copy)]
struct BaseNode {
    w: f64,
    from_lo: f64,
    from_hi: f64,
}

fn legendre_nodes(n: usize) -> Vec<BaseNode> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(BaseNode { w, from_lo: 1.0 + x, from_hi: 1.0 - x });
    }
    out.reverse();
    out
}

const TS_TMAX: f64 = 4.0;
const DE_TMAX: f64 = 4.5;

fn tanh_sinh_nodes(h: f64) -> Vec<BaseNode> {
    let k = (TS_TMAX / h).ceil() as i64;
    let mut out = Vec::with_capacity(2 * k as usize + 1);
    for j in -k..=k {
        let t = j as f64 * h;
        let u = FRAC_PI_2 * t.sinh();
        let ch = u.cosh();
        let w = h * FRAC_PI_2 * t.cosh() / (ch * ch);
        // 1 − tanh|u| = 2/(1 + e^{2|u|})
        let comp = 2.0 / (1.0 + (2.0 * u.abs()).exp());
        let (from_lo, from_hi) = if u >= 0.0 { (2.0 - comp, comp) } else { (comp, 2.0 - comp) };
        if w > 0.0 && from_lo > 0.0 && from_hi > 0.0 {
            out.push(BaseNode { w, from_lo, from_hi });
        }
    }
    out
}

fn base_nodes(rule: Rule, level: u32) -> Vec<BaseNode> {
    match rule {
        Rule::GaussLegendre => legendre_nodes(1usize << (level + 2)),
        Rule::TanhSinh => tanh_sinh_nodes((0.5f64).powi(level as i32)),
    }
}

fn map_base(domain: Domain, nodes: &[BaseNode]) -> Vec<(f64, f64)> {
    let Domain { lo, hi, .. } = domain;
    let mut out = Vec::with_capacity(nodes.len());
    for n in nodes {
        let (x, w) = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => {
                let half = 0.5 * (hi - lo);
                let x = if n.from_lo <= n.from_hi { lo + half * n.from_lo } else { hi - half * n.from_hi };
                (x, half * n.w)
            }
            // t = from_lo/2 on [0,1), x = lo + t/(1−t)
            (true, false) => (lo + n.from_lo / n.from_hi, 2.0 * n.w / (n.from_hi * n.from_hi)),
            (false, true) => (hi - n.from_hi / n.from_lo, 2.0 * n.w / (n.from_lo * n.from_lo)),
            (false, false) => {
                let y = 0.5 * (n.from_lo - n.from_hi);
                let q = n.from_lo * n.from_hi;
                (y / q, n.w * (1.0 + y * y) / (q * q))
            }
        };
        if x > lo && x < hi && w.is_finite() {
            out.push((x, w));
        }
    }
    out
}

fn de_nodes(domain: Domain, h: f64) -> Vec<(f64, f64)> {
    let Domain { lo, hi, .. } = domain;
    let k = (DE_TMAX / h).ceil() as i64;
    let mut out = Vec::with_capacity(2 * k as usize + 1);
    for j in -k..=k {
        let t = j as f64 * h;
        let u = FRAC_PI_2 * t.sinh();
        let du = h * FRAC_PI_2 * t.cosh();
        let (x, w) = match (lo.is_finite(), hi.is_finite()) {
            (true, false) => (lo + u.exp(), du * u.exp()),
            (false, true) => (hi - (-u).exp(), du * (-u).exp()),
            _ => (u.sinh(), du * u.cosh()),
        };
        if x > lo && x < hi && w > 0.0 && w.is_finite() && x.is_finite() {
            out.push((x, w));
        }
    }
    out
}

/// Mapped quadrature nodes and weights for a validated spec.
pub fn nodes(spec: &QuadratureSpec) -> Result<Vec<(f64, f64)>> {
    spec.validate()?;
    Ok(nodes_at(spec, spec.level))
}

fn nodes_at(spec: &QuadratureSpec, level: u32) -> Vec<(f64, f64)> {
    match spec.domain.transform {
        Transform::ExpMap => de_nodes(spec.domain, (0.5f64).powi(level as i32)),
        _ => map_base(spec.domain, &base_nodes(spec.rule, level)),
    }
}

fn apply(f: &dyn Fn(f64) -> f64, nodes: &[(f64, f64)]) -> Result<f64> {
    let mut s = 0.0;
    let mut c = 0.0;
    for &(x, w) in nodes {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::NonFinite(x));
        }
        let y = w * v - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    Ok(s)
}

/// Integrate `f` under `spec`, returning (value, error estimate).
///
/// The error estimate is the difference to the same rule one level lower
/// (level 0 meaning 4 Gauss–Legendre nodes or step 1 for tanh-sinh).
pub fn integrate(f: impl Fn(f64) -> f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    spec.validate()?;
    let v = apply(&f, &nodes_at(spec, spec.level))?;
    let coarse = apply(&f, &nodes_at(spec, spec.level - 1))?;
    Ok((v, (v - coarse).abs()))
}

/// Raise the level until two successive levels agree to `tol` (absolute or
/// relative to the value), up to `max_level`.
pub fn integrate_adaptive(
    f: impl Fn(f64) -> f64,
    spec: &QuadratureSpec,
    tol: f64,
    max_level: u32,
) -> Result<(f64, f64)> {
    spec.validate()?;
    let mut prev = apply(&f, &nodes_at(spec, spec.level))?;
    for level in spec.level + 1..=max_level {
        let v = apply(&f, &nodes_at(spec, level))?;
        let err = (v - prev).abs();
        if err <= tol * v.abs().max(1.0) {
            return Ok((v, err));
        }
        prev = v;
    }
    Err(Error::QuadratureFailure(format!("no agreement to {tol:e} by level {max_level}")))
}

/// Tensor-product integral of `f(x, y)`, raising both levels together until
/// two successive levels agree to `tol`.
pub fn integrate_2d(
    f: impl Fn(f64, f64) -> f64,
    sx: &QuadratureSpec,
    sy: &QuadratureSpec,
    tol: f64,
    max_level: u32,
) -> Result<(f64, f64)> {
    sx.validate()?;
    sy.validate()?;
    let sum = |lx: u32, ly: u32| -> Result<f64> {
        let ny = nodes_at(sy, ly);
        let inner = |x: f64| -> f64 {
            let mut s = 0.0;
            for &(y, w) in &ny {
                s += w * f(x, y);
            }
            s
        };
        apply(&inner, &nodes_at(sx, lx))
    };
    let mut prev = sum(sx.level, sy.level)?;
    for k in 1..=max_level.saturating_sub(sx.level.max(sy.level)) {
        let v = sum(sx.level + k, sy.level + k)?;
        let err = (v - prev).abs();
        if err <= tol * v.abs().max(1e-300) {
            return Ok((v, err));
        }
        prev = v;
    }
    Err(Error::QuadratureFailure(format!("2d: no agreement to {tol:e} by level {max_level}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::poly::jacobi_real;

    #[test]
    fn product_integral() {
        let sx = QuadratureSpec::half_line(3, 0.0);
        let sy = QuadratureSpec::finite(3, 0.0, 1.0);
        let (v, _) = integrate_2d(|x, y| (-x).exp() * y * y, &sx, &sy, 1e-12, 9).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn exponential_on_half_line() {
        let (v, _) = integrate(|x| (-x).exp(), &QuadratureSpec::half_line(6, 0.0)).unwrap();
        assert!((v - 1.0).abs() < 1e-13, "{v}");
        let spec = QuadratureSpec::new(Rule::GaussLegendre, 8, 0.0, f64::INFINITY, Transform::AlgebraicMap);
        let (v, _) = integrate(|x| (-x).exp(), &spec).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn beta_integral_fixture() {
        let (v, _) = integrate(|t| t.tanh() / t.cosh().powi(2), &QuadratureSpec::half_line(6, 0.0)).unwrap();
        assert!((v - 0.5).abs() < 1e-13);
    }

    #[test]
    fn legendre_orthogonality() {
        let p = |n: usize, x: f64| jacobi_real(n, 0.0, 0.0, x);
        for rule in [Rule::GaussLegendre, Rule::TanhSinh] {
            let spec = QuadratureSpec::new(rule, 4, -1.0, 1.0, Transform::None);
            let (v, _) = integrate(|x| p(2, x) * p(3, x), &spec).unwrap();
            assert!(v.abs() < 1e-14);
            let (v, _) = integrate(|x| p(3, x) * p(3, x), &spec).unwrap();
            assert!((v - 2.0 / 7.0).abs() < 1e-13);
        }
    }

    #[test]
    fn gaussian_on_real_line() {
        let (v, err) = integrate(|x| (-x * x).exp(), &QuadratureSpec::real_line(6)).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        assert!(err < 1e-8);
        let spec = QuadratureSpec::new(Rule::TanhSinh, 6, f64::NEG_INFINITY, f64::INFINITY, Transform::AlgebraicMap);
        let (v, _) = integrate(|x| 1.0 / (1.0 + x * x), &spec).unwrap();
        assert!((v - std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn endpoint_singularity() {
        let (v, _) = integrate(|x| 1.0 / x.sqrt(), &QuadratureSpec::finite(6, 0.0, 1.0)).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_specs() {
        let bad = [
            QuadratureSpec::new(Rule::TanhSinh, 0, 0.0, 1.0, Transform::None),
            QuadratureSpec::new(Rule::TanhSinh, 3, 1.0, 0.0, Transform::None),
            QuadratureSpec::new(Rule::TanhSinh, 3, 0.0, f64::INFINITY, Transform::None),
            QuadratureSpec::new(Rule::GaussLegendre, 3, 0.0, f64::INFINITY, Transform::ExpMap),
            QuadratureSpec::new(Rule::TanhSinh, 3, 0.0, 1.0, Transform::AlgebraicMap),
        ];
        for s in bad {
            assert!(matches!(integrate(|x| x, &s), Err(Error::InvalidSpec(_))), "{s:?}");
        }
    }

    #[test]
    fn nonfinite_integrand() {
        let r = integrate(|x| if x > 0.5 { f64::NAN } else { 1.0 }, &QuadratureSpec::finite(3, 0.0, 1.0));
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }

    #[test]
    fn adaptive_doubling() {
        let spec = QuadratureSpec::new(Rule::GaussLegendre, 1, -1.0, 1.0, Transform::None);
        let (v, _) = integrate_adaptive(|x| (3.0 * x).cos(), &spec, 1e-12, 10).unwrap();
        assert!((v - 2.0 * 3f64.sin() / 3.0).abs() < 1e-13);
    }

    #[test]
    fn deterministic() {
        let s = QuadratureSpec::half_line(5, 0.0);
        let a = integrate(|x| (-x).exp() * x.sin(), &s).unwrap();
        let b = integrate(|x| (-x).exp() * x.sin(), &s).unwrap();
        assert_eq!(a.0.to_bits(), b.0.to_bits());
    }
}
