//! Charts of the upper hyperboloid sheet, the so(2,1) generators and
//! finite-difference application of operators built from them.

mod chart;
mod ops;

pub use chart::{
    ambient_to_chart, chart_to_ambient, ep_xy, hp_xy, hyperboloid_residual, semi_hyperbolic_squares, AmbientPoint,
    Chart, ChartPoint, SemiHyperbolicParams, Sheet,
};
pub use ops::{
    apply_generator, apply_operator, apply_word, apply_word_plain, generator_flow, guard, Coeff, Generator,
    OperatorExpr, ScalarFn, Term, DEFAULT_STEP, DENOMINATOR_GUARD,
};
