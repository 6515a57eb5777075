use super::{EvalError, Func, Node, Point, ScalarField};

fn finite(v: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite)
    }
}

pub(crate) fn func_value(func: Func, x: f64) -> Result<f64, EvalError> {
    let v = match func {
        Func::Exp => x.exp(),
        Func::Ln => {
            if x <= 0.0 {
                return Err(EvalError::LogOfNonPositive(x));
            }
            x.ln()
        }
        Func::Sin => x.sin(),
        Func::Cos => x.cos(),
        Func::Sqrt => {
            if x < 0.0 {
                return Err(EvalError::SqrtOfNegative(x));
            }
            x.sqrt()
        }
    };
    finite(v)
}

/// Integer exponents accept any base; other exponents need a positive base.
pub(crate) fn pow_value(base: f64, exponent: f64) -> Result<f64, EvalError> {
    if exponent.fract() == 0.0 && exponent.abs() <= f64::from(i32::MAX) {
        if base == 0.0 && exponent < 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        return finite(base.powi(exponent as i32));
    }
    if base <= 0.0 {
        return Err(EvalError::PowDomain { base, exponent });
    }
    finite(base.powf(exponent))
}

impl ScalarField {
    /// Evaluates the field at `p`.
    pub fn eval(&self, p: Point) -> Result<f64, EvalError> {
        match self.node() {
            Node::Const(c) => Ok(*c),
            Node::Var(a) => Ok(p[a.index()]),
            Node::Add(a, b) => finite(a.eval(p)? + b.eval(p)?),
            Node::Sub(a, b) => finite(a.eval(p)? - b.eval(p)?),
            Node::Mul(a, b) => finite(a.eval(p)? * b.eval(p)?),
            Node::Div(a, b) => {
                let num = a.eval(p)?;
                let den = b.eval(p)?;
                if den == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                finite(num / den)
            }
            Node::Neg(a) => Ok(-a.eval(p)?),
            Node::Pow(a, b) => pow_value(a.eval(p)?, b.eval(p)?),
            Node::Func(f, a) => func_value(*f, a.eval(p)?),
            Node::Primitive(prim, arg) => prim.value(arg.eval(p)?),
            Node::Table { table, order, arg } => table.eval(*order, arg.eval(p)?),
        }
    }
}
