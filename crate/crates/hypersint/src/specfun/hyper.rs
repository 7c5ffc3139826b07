use num_complex::Complex64 as C64;

use super::gamma::{log_gamma, pochhammer, rgamma};
use crate::error::{Error, Result};

const SERIES_EPS: f64 = 1e-17;
const SERIES_MAX_TERMS: usize = 10_000;

fn nonpositive_integer(z: C64) -> Option<usize> {
    let r = z.re.round();
    if z.im.abs() < 1e-14 && r <= 0.0 && (z.re - r).abs() < 1e-12 {
        Some((-r) as usize)
    } else {
        None
    }
}

/// Compensated (Neumaier) accumulator for complex sums.
#[derive(Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: C64,
    comp: C64,
}

impl Neumaier {
    fn add1(s: f64, c: f64, x: f64) -> (f64, f64) {
        let t = s + x;
        let c = if s.abs() >= x.abs() { c + ((s - t) + x) } else { c + ((x - t) + s) };
        (t, c)
    }

    pub fn add(&mut self, x: C64) {
        let (re, cre) = Self::add1(self.sum.re, self.comp.re, x.re);
        let (im, cim) = Self::add1(self.sum.im, self.comp.im, x.im);
        self.sum = C64::new(re, im);
        self.comp = C64::new(cre, cim);
    }

    pub fn value(&self) -> C64 {
        self.sum + self.comp
    }
}

fn series_2f1(a: C64, b: C64, c: C64, z: C64, terms: Option<usize>) -> Result<C64> {
    let mut acc = Neumaier::default();
    let mut t = C64::new(1.0, 0.0);
    acc.add(t);
    let limit = terms.unwrap_or(SERIES_MAX_TERMS);
    for k in 0..limit {
        let kf = k as f64;
        let den = (c + kf) * (kf + 1.0);
        if den.norm() == 0.0 {
            return Err(Error::ParameterPole(k));
        }
        t *= (a + kf) * (b + kf) / den * z;
        acc.add(t);
        if terms.is_none() && t.norm() < SERIES_EPS * acc.value().norm() {
            return Ok(acc.value());
        }
        if t.norm() == 0.0 {
            break;
        }
    }
    Ok(acc.value())
}

fn direct(a: C64, b: C64, c: C64, z: C64) -> Result<C64> {
    if let Some(n) = nonpositive_integer(a).or(nonpositive_integer(b)) {
        if let Some(m) = nonpositive_integer(c) {
            if m < n {
                return Err(Error::ParameterPole(m));
            }
        }
        return series_2f1(a, b, c, z, Some(n));
    }
    if z.norm() >= 1.0 {
        return Err(Error::NoConvergence(z.norm()));
    }
    series_2f1(a, b, c, z, None)
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z).
///
/// Terminating sums are exact. Otherwise the power series is used for
/// |z| <= 1/2; for 1/2 < |z| < 1 the Pfaff or 1 − z transformation with the
/// smallest resulting argument is applied.
pub fn hyp2f1(a: C64, b: C64, c: C64, z: C64) -> Result<C64> {
    if nonpositive_integer(a).is_some() || nonpositive_integer(b).is_some() {
        return direct(a, b, c, z);
    }
    if z.norm() >= 1.0 {
        return Err(Error::NoConvergence(z.norm()));
    }
    if z.norm() <= 0.5 {
        return direct(a, b, c, z);
    }
    let pfaff = z / (z - 1.0);
    let one_minus = 1.0 - z;
    let cab = c - a - b;
    let reflect_ok = (cab.re - cab.re.round()).abs() > 1e-8 || cab.im.abs() > 1e-8;
    let best_direct = z.norm();
    let best_pfaff = pfaff.norm();
    let best_reflect = if reflect_ok { one_minus.norm() } else { f64::INFINITY };
    if best_pfaff <= best_reflect && best_pfaff < best_direct {
        // (1−z)^{−a} ₂F₁(a, c−b; c; z/(z−1))
        return Ok(one_minus.powc(-a) * direct(a, c - b, c, pfaff)?);
    }
    if best_reflect < best_direct {
        let lc = log_gamma(c)?;
        let t1 = if rgamma(c - a) == C64::new(0.0, 0.0) || rgamma(c - b) == C64::new(0.0, 0.0) {
            C64::new(0.0, 0.0)
        } else {
            (lc + log_gamma(cab)? - log_gamma(c - a)? - log_gamma(c - b)?).exp()
                * direct(a, b, a + b - c + 1.0, one_minus)?
        };
        let t2 = if rgamma(a) == C64::new(0.0, 0.0) || rgamma(b) == C64::new(0.0, 0.0) {
            C64::new(0.0, 0.0)
        } else {
            one_minus.powc(cab)
                * (lc + log_gamma(-cab)? - log_gamma(a)? - log_gamma(b)?).exp()
                * direct(c - a, c - b, cab + 1.0, one_minus)?
        };
        return Ok(t1 + t2);
    }
    direct(a, b, c, z)
}

/// Terminating ₃F₂(−n, b, c; d, e; 1) as a compensated finite sum.
pub fn hyp3f2_unit(n: usize, b: C64, c: C64, d: C64, e: C64) -> Result<C64> {
    let mut acc = Neumaier::default();
    let mut t = C64::new(1.0, 0.0);
    acc.add(t);
    let mn = -(n as f64);
    for k in 0..n {
        let kf = k as f64;
        let num = (mn + kf) * (b + kf) * (c + kf);
        if num.norm() == 0.0 {
            break;
        }
        let den = (d + kf) * (e + kf) * (kf + 1.0);
        if den.norm() == 0.0 {
            return Err(Error::ParameterPole(k));
        }
        t *= num / den;
        acc.add(t);
    }
    Ok(acc.value())
}

/// Hahn polynomial h_n^{(α,β)}(x, N).
///
/// (−1)^n (N−n)_n (β+1)_n / n! · ₃F₂(−n, α+β+n+1, −x; β+1, 1−N; 1); the
/// Gamma ratios Γ(N)/Γ(N−n) and Γ(β+n+1)/Γ(β+1) are kept as Pochhammer
/// symbols so integer β is allowed.
pub fn hahn(n: usize, alpha: C64, beta: C64, x: C64, big_n: C64) -> Result<C64> {
    let mut pref = pochhammer(big_n - n as f64, n) * pochhammer(beta + 1.0, n);
    for k in 1..=n {
        pref /= k as f64;
    }
    if n % 2 == 1 {
        pref = -pref;
    }
    let f = hyp3f2_unit(n, alpha + beta + n as f64 + 1.0, -x, beta + 1.0, 1.0 - big_n)?;
    Ok(pref * f)
}
