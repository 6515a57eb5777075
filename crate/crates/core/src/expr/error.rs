use thiserror::Error;

/// Failure to evaluate an expression at a point.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("logarithm of non-positive value {0}")]
    LogOfNonPositive(f64),
    #[error("square root of negative value {0}")]
    SqrtOfNegative(f64),
    #[error("power with non-integer exponent {exponent} needs a positive base, got {base}")]
    PowDomain { base: f64, exponent: f64 },
    #[error("non-finite intermediate value")]
    NonFinite,
    #[error("argument {value} outside tabulated range [{lo}, {hi}] of table `{name}`")]
    OutsideTable { name: String, value: f64, lo: f64, hi: f64 },
    #[error("adaptive quadrature did not converge on [{from}, {to}]")]
    QuadratureNonConvergence { from: f64, to: f64 },
}

/// Errors of the numeric helpers built on top of expressions.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum ExprError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("integrand must depend on {expected} only, found {found}")]
    NotSingleVariable { expected: String, found: String },
    #[error("constancy test needs at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("invalid interval [{0}, {1}]")]
    InvalidInterval(f64, f64),
}
