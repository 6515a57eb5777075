use super::{Axis, Func, Node, ScalarField};

impl ScalarField {
    /// Exact partial derivative with respect to `axis`.
    ///
    /// The result is only simplified by constant folding.
    pub fn diff(&self, axis: Axis) -> ScalarField {
        match self.node() {
            Node::Const(_) => ScalarField::zero(),
            Node::Var(a) => {
                if *a == axis {
                    ScalarField::one()
                } else {
                    ScalarField::zero()
                }
            }
            Node::Add(a, b) => a.diff(axis) + b.diff(axis),
            Node::Sub(a, b) => a.diff(axis) - b.diff(axis),
            Node::Mul(a, b) => a.diff(axis) * b.clone() + a.clone() * b.diff(axis),
            Node::Div(a, b) => {
                let da = a.diff(axis);
                let db = b.diff(axis);
                if db.is_zero() {
                    return da / b.clone();
                }
                (da * b.clone() - a.clone() * db) / b.clone().powi(2)
            }
            Node::Neg(a) => -a.diff(axis),
            Node::Pow(base, exponent) => {
                let db = base.diff(axis);
                let de = exponent.diff(axis);
                if de.is_zero() {
                    // d(u^c) = c u^(c-1) u'
                    let lowered = exponent.clone() - 1.0;
                    exponent.clone() * base.clone().pow(lowered) * db
                } else {
                    // d(u^v) = u^v (v' ln u + v u'/u)
                    self.clone() * (de * base.clone().ln() + exponent.clone() * db / base.clone())
                }
            }
            Node::Func(f, u) => {
                let du = u.diff(axis);
                if du.is_zero() {
                    return ScalarField::zero();
                }
                let outer = match f {
                    Func::Exp => self.clone(),
                    Func::Ln => return du / u.clone(),
                    Func::Sin => u.clone().cos(),
                    Func::Cos => -u.clone().sin(),
                    Func::Sqrt => return du / (2.0 * self.clone()),
                };
                outer * du
            }
            Node::Primitive(prim, arg) => {
                let darg = arg.diff(axis);
                if darg.is_zero() {
                    return ScalarField::zero();
                }
                prim.integrand().substitute(prim.axis(), arg) * darg
            }
            Node::Table { table, order, arg } => {
                let darg = arg.diff(axis);
                if darg.is_zero() {
                    return ScalarField::zero();
                }
                ScalarField::table(table.clone(), order + 1, arg.clone()) * darg
            }
        }
    }

    /// Partial derivatives along all three axes.
    pub fn gradient(&self) -> [ScalarField; 3] {
        Axis::ALL.map(|a| self.diff(a))
    }
}
