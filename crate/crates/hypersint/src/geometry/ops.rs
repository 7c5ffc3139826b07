use num_complex::Complex64 as C64;
use std::fmt;
use std::sync::Arc;

use super::chart::AmbientPoint;
use crate::error::{Error, Result};

/// Default differentiation step.
pub const DEFAULT_STEP: f64 = 1e-4;
/// Coefficient denominators below this magnitude reject the evaluation point.
pub const DENOMINATOR_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    K2,
    K3,
    M1,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::K2 => "K2",
            Generator::K3 => "K3",
            Generator::M1 => "M1",
        })
    }
}

/// Exact one-parameter subgroup: K3 boosts (w0, w1), K2 boosts (w0, w2), M1 rotates (w1, w2).
pub fn generator_flow(g: Generator, t: f64, q: &AmbientPoint) -> AmbientPoint {
    let AmbientPoint { w0, w1, w2 } = *q;
    match g {
        Generator::K3 => {
            let (c, s) = (t.cosh(), t.sinh());
            AmbientPoint::new(c * w0 + s * w1, s * w0 + c * w1, w2)
        }
        Generator::K2 => {
            let (c, s) = (t.cosh(), t.sinh());
            AmbientPoint::new(c * w0 + s * w2, w1, s * w0 + c * w2)
        }
        Generator::M1 => {
            let (s, c) = t.sin_cos();
            AmbientPoint::new(w0, c * w1 - s * w2, s * w1 + c * w2)
        }
    }
}

/// Complex scalar function on the hyperboloid.
pub type ScalarFn<'a> = dyn Fn(&AmbientPoint) -> Result<C64> + 'a;

fn finite(v: C64, q: &AmbientPoint) -> Result<C64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(q.w0))
    }
}

fn central(g: Generator, f: &ScalarFn, q: &AmbientPoint, h: f64) -> Result<C64> {
    let p = f(&generator_flow(g, h, q))?;
    let m = f(&generator_flow(g, -h, q))?;
    Ok((p - m) / (2.0 * h))
}

/// Apply a word of generators (rightmost first) with one Richardson level per factor.
pub fn apply_word(word: &[Generator], f: &ScalarFn, q: &AmbientPoint, h: f64) -> Result<C64> {
    match word.split_first() {
        None => finite(f(q)?, q),
        Some((&g, rest)) => {
            let inner = |p: &AmbientPoint| apply_word(rest, f, p, h);
            let coarse = central(g, &inner, q, h)?;
            let fine = central(g, &inner, q, 0.5 * h)?;
            finite((4.0 * fine - coarse) / 3.0, q)
        }
    }
}

/// Plain central difference without extrapolation, for convergence studies.
pub fn apply_word_plain(word: &[Generator], f: &ScalarFn, q: &AmbientPoint, h: f64) -> Result<C64> {
    match word.split_first() {
        None => finite(f(q)?, q),
        Some((&g, rest)) => {
            let inner = |p: &AmbientPoint| apply_word_plain(rest, f, p, h);
            finite(central(g, &inner, q, h)?, q)
        }
    }
}

/// Real-valued generator application.
pub fn apply_generator(g: Generator, f: &dyn Fn(&AmbientPoint) -> f64, q: &AmbientPoint, h: f64) -> Result<f64> {
    if h <= 0.0 {
        return Err(Error::InvalidParams("step must be positive".into()));
    }
    let cf = |p: &AmbientPoint| Ok(C64::new(f(p), 0.0));
    Ok(apply_word(&[g], &cf, q, h)?.re)
}

/// Coefficient function of an operator term.
pub type Coeff = Arc<dyn Fn(&AmbientPoint) -> Result<C64> + Send + Sync>;

/// Reject points where a coefficient denominator is too small.
pub fn guard(den: f64, what: &str) -> Result<f64> {
    if den.abs() < DENOMINATOR_GUARD || !den.is_finite() {
        Err(Error::Singular(format!("{what} = {den:e}")))
    } else {
        Ok(den)
    }
}

#[derive(Clone)]
pub struct Term {
    pub coeff: Coeff,
    pub word: Vec<Generator>,
    pub label: String,
}

/// Σ coeff(q)·word + constant.
#[derive(Clone, Default)]
pub struct OperatorExpr {
    pub terms: Vec<Term>,
    pub constant: C64,
    pub step: Option<f64>,
}

impl fmt::Debug for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let w: String = t.word.iter().map(|g| g.to_string()).collect();
                format!("{}·{}", t.label, if w.is_empty() { "1".into() } else { w })
            })
            .collect();
        write!(f, "OperatorExpr[{} + {}]", labels.join(" + "), self.constant)
    }
}

impl OperatorExpr {
    pub fn new() -> Self {
        Self::default()
    }

    /// Laplace–Beltrami operator K3² + K2² − M1².
    pub fn laplace_beltrami() -> Self {
        Self::new()
            .word(1.0, &[Generator::K3, Generator::K3])
            .word(1.0, &[Generator::K2, Generator::K2])
            .word(-1.0, &[Generator::M1, Generator::M1])
    }

    pub fn term(mut self, label: &str, word: &[Generator], coeff: Coeff) -> Self {
        assert!(word.len() <= 3, "word length above 3");
        self.terms.push(Term { coeff, word: word.to_vec(), label: label.to_string() });
        self
    }

    /// Constant-coefficient word.
    pub fn word(self, c: f64, word: &[Generator]) -> Self {
        self.term(&format!("{c}"), word, Arc::new(move |_| Ok(C64::new(c, 0.0))))
    }

    pub fn complex_word(self, c: C64, word: &[Generator]) -> Self {
        self.term(&format!("{c}"), word, Arc::new(move |_| Ok(c)))
    }

    /// Multiplication by a function.
    pub fn multiply(self, label: &str, coeff: Coeff) -> Self {
        self.term(label, &[], coeff)
    }

    pub fn plus_constant(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }

    pub fn plus_complex_constant(mut self, c: C64) -> Self {
        self.constant += c;
        self
    }

    pub fn with_step(mut self, h: f64) -> Self {
        self.step = Some(h);
        self
    }

    pub fn scaled(mut self, c: C64) -> Self {
        self.terms = self
            .terms
            .into_iter()
            .map(|t| {
                let inner = t.coeff.clone();
                Term { coeff: Arc::new(move |q| Ok(c * inner(q)?)), word: t.word, label: format!("{c}*{}", t.label) }
            })
            .collect();
        self.constant *= c;
        self
    }

    pub fn add(mut self, other: OperatorExpr) -> Self {
        self.terms.extend(other.terms);
        self.constant += other.constant;
        self.step = match (self.step, other.step) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        self
    }

    pub fn max_order(&self) -> usize {
        self.terms.iter().map(|t| t.word.len()).max().unwrap_or(0)
    }

    /// Evaluate (expr f)(q) with step `h` (the expression's override wins).
    pub fn apply(&self, f: &ScalarFn, q: &AmbientPoint, h: f64) -> Result<C64> {
        let h = self.step.unwrap_or(h);
        if h <= 0.0 {
            return Err(Error::InvalidParams("step must be positive".into()));
        }
        let mut acc = self.constant * finite(f(q)?, q)?;
        for t in &self.terms {
            let c = (t.coeff)(q)?;
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            acc += c * apply_word(&t.word, f, q, h)?;
        }
        finite(acc, q)
    }

    /// Same with plain central differences.
    pub fn apply_plain(&self, f: &ScalarFn, q: &AmbientPoint, h: f64) -> Result<C64> {
        let mut acc = self.constant * f(q)?;
        for t in &self.terms {
            let c = (t.coeff)(q)?;
            acc += c * apply_word_plain(&t.word, f, q, h)?;
        }
        finite(acc, q)
    }
}

/// (expr f)(q) with the default step.
pub fn apply_operator(expr: &OperatorExpr, f: &ScalarFn, q: &AmbientPoint, h: f64) -> Result<C64> {
    expr.apply(f, q, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart::hyperboloid_residual;

    fn pt() -> AmbientPoint {
        AmbientPoint::lift(0.37, -0.52)
    }

    #[test]
    fn flows() {
        let q = pt();
        let r = generator_flow(Generator::M1, std::f64::consts::FRAC_PI_2, &q);
        assert!((r.w1 + q.w2).abs() < 1e-15 && (r.w2 - q.w1).abs() < 1e-15 && r.w0 == q.w0);
        let b = generator_flow(Generator::K3, 0.8, &AmbientPoint::new(1.0, 0.0, 0.0));
        assert!((b.w0 - 0.8f64.cosh()).abs() < 1e-15 && (b.w1 - 0.8f64.sinh()).abs() < 1e-15);
        for g in [Generator::K2, Generator::K3, Generator::M1] {
            let back = generator_flow(g, -0.6, &generator_flow(g, 0.6, &q));
            assert!((back.w0 - q.w0).abs() < 1e-14 && (back.w1 - q.w1).abs() < 1e-14 && (back.w2 - q.w2).abs() < 1e-14);
            assert!(hyperboloid_residual(&generator_flow(g, 1.3, &q)) < 1e-13);
        }
    }

    #[test]
    fn generators_on_coordinates() {
        let q = pt();
        let v = apply_generator(Generator::K3, &|p| p.w1, &AmbientPoint::new(1.0, 0.0, 0.0), 1e-4).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let v = apply_generator(Generator::M1, &|p| p.w2, &q, 1e-4).unwrap();
        assert!((v - q.w1).abs() < 1e-12);
    }

    #[test]
    fn laplacian_on_simple_functions() {
        let q = pt();
        let lb = OperatorExpr::laplace_beltrami();
        let one = |_: &AmbientPoint| Ok(C64::new(1.0, 0.0));
        assert!(lb.apply(&one, &q, DEFAULT_STEP).unwrap().norm() < 1e-10);
        let w0 = |p: &AmbientPoint| Ok(C64::new(p.w0, 0.0));
        let v = lb.apply(&w0, &q, DEFAULT_STEP).unwrap();
        assert!((v.re - 2.0 * q.w0).abs() < 1e-7, "{v}");
    }

    #[test]
    fn single_word_is_generator() {
        let q = pt();
        let f = |p: &AmbientPoint| (p.w0 * p.w2).sin();
        let a = apply_generator(Generator::K3, &f, &q, 1e-3).unwrap();
        let e = OperatorExpr::new().word(1.0, &[Generator::K3]);
        let b = e.apply(&|p: &AmbientPoint| Ok(C64::new(f(p), 0.0)), &q, 1e-3).unwrap();
        assert_eq!(a, b.re);
    }

    #[test]
    fn singular_coefficient() {
        let e = OperatorExpr::new().multiply("1/w2", Arc::new(|q| Ok(C64::new(1.0 / guard(q.w2, "w2")?, 0.0))));
        let q = AmbientPoint::new(1.0, 0.0, 0.0);
        let r = e.apply(&|_| Ok(C64::new(1.0, 0.0)), &q, 1e-4);
        assert!(matches!(r, Err(Error::Singular(_))));
    }
}
