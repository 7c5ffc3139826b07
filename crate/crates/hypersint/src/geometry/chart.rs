use num_complex::Complex64 as C64;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Point of R^{2,1}; on the upper sheet when `hyperboloid_residual` is small and w0 >= 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientPoint {
    pub w0: f64,
    pub w1: f64,
    pub w2: f64,
}

impl AmbientPoint {
    pub fn new(w0: f64, w1: f64, w2: f64) -> Self {
        AmbientPoint { w0, w1, w2 }
    }

    /// Lift (w1, w2) to the upper sheet.
    pub fn lift(w1: f64, w2: f64) -> Self {
        AmbientPoint { w0: (1.0 + w1 * w1 + w2 * w2).sqrt(), w1, w2 }
    }
}

/// |w0² − w1² − w2² − 1|
pub fn hyperboloid_residual(q: &AmbientPoint) -> f64 {
    (q.w0 * q.w0 - q.w1 * q.w1 - q.w2 * q.w2 - 1.0).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chart {
    Equidistant,
    Horicyclic,
    EllipticParabolic,
    HyperbolicParabolic,
    SemiHyperbolic,
}

impl Chart {
    pub const ALL: [Chart; 5] = [
        Chart::Equidistant,
        Chart::Horicyclic,
        Chart::EllipticParabolic,
        Chart::HyperbolicParabolic,
        Chart::SemiHyperbolic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Chart::Equidistant => "equidistant",
            Chart::Horicyclic => "horicyclic",
            Chart::EllipticParabolic => "elliptic-parabolic",
            Chart::HyperbolicParabolic => "hyperbolic-parabolic",
            Chart::SemiHyperbolic => "semi-hyperbolic",
        }
    }
}

impl std::str::FromStr for Chart {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Chart::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown chart '{s}'")))
    }
}

impl std::fmt::Display for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Sign of w2 selected for the semi-hyperbolic chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheet {
    Positive,
    Negative,
}

/// Foci e1 = a + ib, e2 = a − ib and real e3 of the semi-hyperbolic chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiHyperbolicParams {
    pub a: f64,
    pub b: f64,
    pub e3: f64,
    pub sheet: Sheet,
}

impl SemiHyperbolicParams {
    pub fn new(a: f64, b: f64, e3: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && e3.is_finite()) || b == 0.0 {
            return Err(Error::InvalidParams(format!("semi-hyperbolic chart params ({a}, {b}, {e3}) need b != 0")));
        }
        Ok(SemiHyperbolicParams { a, b, e3, sheet: Sheet::Positive })
    }

    pub fn foci(&self) -> [C64; 3] {
        [C64::new(self.a, self.b), C64::new(self.a, -self.b), C64::new(self.e3, 0.0)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub chart: Chart,
    pub u1: f64,
    pub u2: f64,
    pub chart_params: Option<SemiHyperbolicParams>,
}

impl ChartPoint {
    pub fn new(chart: Chart, u1: f64, u2: f64) -> Self {
        ChartPoint { chart, u1, u2, chart_params: None }
    }

    pub fn semi_hyperbolic(mu: f64, nu: f64, params: SemiHyperbolicParams) -> Self {
        ChartPoint { chart: Chart::SemiHyperbolic, u1: mu, u2: nu, chart_params: Some(params) }
    }

    /// Check the chart domain.
    pub fn check(&self) -> Result<()> {
        let (u1, u2) = (self.u1, self.u2);
        let bad = |what: &str| Err(Error::OutOfDomain(format!("{}: {what} (u1 = {u1}, u2 = {u2})", self.chart)));
        if !u1.is_finite() || !u2.is_finite() {
            return bad("non-finite coordinate");
        }
        match self.chart {
            Chart::Equidistant => Ok(()),
            Chart::Horicyclic if u2 <= 0.0 => bad("need y > 0"),
            Chart::EllipticParabolic if u1 <= 0.0 || u2.abs() >= FRAC_PI_2 => bad("need a > 0, |theta| < pi/2"),
            Chart::HyperbolicParabolic if u1 <= 0.0 || u2 <= 0.0 || u2 >= FRAC_PI_2 => {
                bad("need b > 0, 0 < theta < pi/2")
            }
            Chart::SemiHyperbolic => match self.chart_params {
                None => bad("chart params required"),
                Some(p) if !(u2 < p.e3 && p.e3 < u1) => bad("need nu < e3 < mu"),
                _ => Ok(()),
            },
            _ => Ok(()),
        }
    }
}

/// Squares s_l² of the complex-sphere coordinates at elliptic coordinates (μ, ν).
pub fn semi_hyperbolic_squares(mu: f64, nu: f64, p: &SemiHyperbolicParams) -> [C64; 3] {
    let e = p.foci();
    let mut out = [C64::new(0.0, 0.0); 3];
    for l in 0..3 {
        let mut den = C64::new(1.0, 0.0);
        for j in 0..3 {
            if j != l {
                den *= e[l] - e[j];
            }
        }
        out[l] = (mu - e[l]) * (nu - e[l]) / den;
    }
    out
}

pub fn chart_to_ambient(p: &ChartPoint) -> Result<AmbientPoint> {
    p.check()?;
    let (u1, u2) = (p.u1, p.u2);
    Ok(match p.chart {
        Chart::Equidistant => {
            let c1 = u1.cosh();
            AmbientPoint::new(c1 * u2.cosh(), c1 * u2.sinh(), u1.sinh())
        }
        Chart::Horicyclic => {
            let (x, y) = (u1, u2);
            let r = x * x + y * y;
            AmbientPoint::new((r + 1.0) / (2.0 * y), (r - 1.0) / (2.0 * y), x / y)
        }
        Chart::EllipticParabolic => {
            let (ch, c) = (u1.cosh(), u2.cos());
            let (sh, s) = (u1.sinh(), u2.sin());
            let den = 2.0 * ch * c;
            AmbientPoint::new((ch * ch + c * c) / den, (sh * sh - s * s) / den, u1.tanh() * u2.tan())
        }
        Chart::HyperbolicParabolic => {
            let (ch, c) = (u1.cosh(), u2.cos());
            let (sh, s) = (u1.sinh(), u2.sin());
            let den = 2.0 * sh * s;
            AmbientPoint::new((ch * ch + c * c) / den, (sh * sh - s * s) / den, 1.0 / (u1.tanh() * u2.tan()))
        }
        Chart::SemiHyperbolic => {
            let params = p.chart_params.expect("checked");
            let s2 = semi_hyperbolic_squares(u1, u2, &params);
            // w0 + i w1 = sqrt(2 s1²), principal root; s3² = −w2²
            let z = (2.0 * s2[0]).sqrt();
            let w2 = (-s2[2].re).max(0.0).sqrt();
            let w2 = if params.sheet == Sheet::Negative { -w2 } else { w2 };
            AmbientPoint::new(z.re, z.im, w2)
        }
    })
}

/// Inverse chart map. For the semi-hyperbolic chart `params` must be given;
/// the sheet is read off the sign of w2.
pub fn ambient_to_chart(q: &AmbientPoint, chart: Chart, params: Option<&SemiHyperbolicParams>) -> Result<ChartPoint> {
    let AmbientPoint { w0, w1, w2 } = *q;
    let dm = w0 - w1;
    let out = match chart {
        Chart::Equidistant => ChartPoint::new(chart, w2.asinh(), (w1 / w0).atanh()),
        Chart::Horicyclic => {
            if dm <= 0.0 {
                return Err(Error::OutOfDomain("horicyclic: w0 - w1 must be positive".into()));
            }
            ChartPoint::new(chart, w2 / dm, 1.0 / dm)
        }
        Chart::EllipticParabolic => {
            // X = cosh² a, Y = cos² θ: X + Y = 2 w0/D, X Y = 1/D²
            let (x, y) = ep_xy(q)?;
            let a = x.sqrt().acosh();
            let th = y.sqrt().clamp(-1.0, 1.0).acos();
            let th = if w2 < 0.0 { -th } else { th };
            ChartPoint::new(chart, a, th)
        }
        Chart::HyperbolicParabolic => {
            if w2 <= 0.0 {
                return Err(Error::OutOfDomain("hyperbolic-parabolic: needs w2 > 0".into()));
            }
            let (x, y) = hp_xy(q)?;
            ChartPoint::new(chart, x.sqrt().asinh(), y.sqrt().clamp(0.0, 1.0).asin())
        }
        Chart::SemiHyperbolic => {
            let params = *params.ok_or_else(|| Error::OutOfDomain("semi-hyperbolic: chart params required".into()))?;
            let e = params.foci();
            let s2 = [
                C64::new(w0, w1) * C64::new(w0, w1) * 0.5,
                C64::new(w0, -w1) * C64::new(w0, -w1) * 0.5,
                C64::new(-w2 * w2, 0.0),
            ];
            // Σ s_l² Π_{j≠l}(ρ − e_j) = (ρ − μ)(ρ − ν)
            let mut lin = C64::new(0.0, 0.0);
            let mut cst = C64::new(0.0, 0.0);
            for l in 0..3 {
                let (j, k) = ((l + 1) % 3, (l + 2) % 3);
                lin -= s2[l] * (e[j] + e[k]);
                cst += s2[l] * e[j] * e[k];
            }
            let (b, c) = (lin.re, cst.re);
            let disc = (b * b - 4.0 * c).max(0.0).sqrt();
            let mu = if b <= 0.0 { (-b + disc) / 2.0 } else { 2.0 * c / (-b - disc) };
            let nu = if mu != 0.0 { c / mu } else { (-b - disc) / 2.0 };
            let (mu, nu) = if mu >= nu { (mu, nu) } else { (nu, mu) };
            let sheet = if w2 < 0.0 { Sheet::Negative } else { Sheet::Positive };
            ChartPoint::semi_hyperbolic(mu, nu, SemiHyperbolicParams { sheet, ..params })
        }
    };
    out.check()?;
    Ok(out)
}

/// (cosh² a, cos² θ) of the elliptic-parabolic chart.
pub fn ep_xy(q: &AmbientPoint) -> Result<(f64, f64)> {
    let dm = q.w0 - q.w1;
    if dm <= 0.0 {
        return Err(Error::OutOfDomain("elliptic-parabolic: w0 - w1 must be positive".into()));
    }
    let sum = 2.0 * q.w0 / dm;
    let prod = 1.0 / (dm * dm);
    let disc = (sum * sum - 4.0 * prod).max(0.0).sqrt();
    let x = (sum + disc) / 2.0;
    Ok((x, prod / x))
}

/// (sinh² b, sin² θ) of the hyperbolic-parabolic chart.
pub fn hp_xy(q: &AmbientPoint) -> Result<(f64, f64)> {
    let dm = q.w0 - q.w1;
    if dm <= 0.0 {
        return Err(Error::OutOfDomain("hyperbolic-parabolic: w0 - w1 must be positive".into()));
    }
    let diff = 2.0 * q.w1 / dm;
    let prod = 1.0 / (dm * dm);
    let disc = (diff * diff + 4.0 * prod).sqrt();
    let x = if diff >= 0.0 { (diff + disc) / 2.0 } else { 2.0 * prod / (disc - diff) };
    Ok((x, prod / x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: AmbientPoint, b: AmbientPoint, tol: f64) -> bool {
        (a.w0 - b.w0).abs() < tol && (a.w1 - b.w1).abs() < tol && (a.w2 - b.w2).abs() < tol
    }

    #[test]
    fn fixed_points() {
        let o = AmbientPoint::new(1.0, 0.0, 0.0);
        assert!(close(chart_to_ambient(&ChartPoint::new(Chart::Equidistant, 0.0, 0.0)).unwrap(), o, 1e-15));
        assert!(close(chart_to_ambient(&ChartPoint::new(Chart::Horicyclic, 0.0, 1.0)).unwrap(), o, 1e-15));
        let q = chart_to_ambient(&ChartPoint::new(Chart::EllipticParabolic, 2f64.acosh(), 0.0)).unwrap();
        assert!(close(q, AmbientPoint::new(1.25, 0.75, 0.0), 1e-15));
        assert!(hyperboloid_residual(&q) < 1e-15);
    }

    #[test]
    fn residual_values() {
        assert_eq!(hyperboloid_residual(&AmbientPoint::new(1.0, 0.0, 0.0)), 0.0);
        assert!(hyperboloid_residual(&AmbientPoint::new(1f64.cosh(), 1f64.sinh(), 0.0)) < 1e-15);
        assert_eq!(hyperboloid_residual(&AmbientPoint::new(2.0, 1.0, 1.0)), 1.0);
    }

    #[test]
    fn domain_violations() {
        for p in [
            ChartPoint::new(Chart::Horicyclic, 0.3, -1.0),
            ChartPoint::new(Chart::EllipticParabolic, -0.1, 0.2),
            ChartPoint::new(Chart::HyperbolicParabolic, 0.5, 1.7),
            ChartPoint::new(Chart::SemiHyperbolic, 1.0, -1.0),
        ] {
            assert!(matches!(chart_to_ambient(&p), Err(Error::OutOfDomain(_))), "{p:?}");
        }
    }

    #[test]
    fn round_trips() {
        let sp = SemiHyperbolicParams::new(0.0, 1.0, 0.0).unwrap();
        let cases = [
            ChartPoint::new(Chart::Equidistant, 0.4, -1.3),
            ChartPoint::new(Chart::Horicyclic, -0.7, 0.4),
            ChartPoint::new(Chart::EllipticParabolic, 0.9, -0.6),
            ChartPoint::new(Chart::HyperbolicParabolic, 0.8, 0.3),
            ChartPoint::semi_hyperbolic(1.7, -0.4, sp),
        ];
        for p in cases {
            let q = chart_to_ambient(&p).unwrap();
            assert!(hyperboloid_residual(&q) < 1e-13 && q.w0 >= 1.0, "{p:?}");
            let back = ambient_to_chart(&q, p.chart, p.chart_params.as_ref()).unwrap();
            assert!((back.u1 - p.u1).abs() < 1e-10 && (back.u2 - p.u2).abs() < 1e-10, "{p:?} {back:?}");
        }
    }

    #[test]
    fn semi_hyperbolic_squares_on_sphere() {
        let sp = SemiHyperbolicParams::new(0.3, 0.8, -0.2).unwrap();
        let s = semi_hyperbolic_squares(2.0, -1.5, &sp);
        assert!((s[0] + s[1] + s[2] - 1.0).norm() < 1e-14);
        assert!((s[0] - s[1].conj()).norm() < 1e-14);
        assert!(s[2].im.abs() < 1e-15 && s[2].re < 0.0);
    }

    #[test]
    fn semi_hyperbolic_sheet_flag() {
        let mut sp = SemiHyperbolicParams::new(0.0, 1.0, 0.0).unwrap();
        let up = chart_to_ambient(&ChartPoint::semi_hyperbolic(1.2, -0.5, sp)).unwrap();
        sp.sheet = Sheet::Negative;
        let down = chart_to_ambient(&ChartPoint::semi_hyperbolic(1.2, -0.5, sp)).unwrap();
        assert!(up.w2 > 0.0 && (down.w2 + up.w2).abs() < 1e-15 && down.w1 == up.w1);
    }
}
