//! Closed-form scalar fields on R³.
//!
//! A [`ScalarField`] is an immutable, reference-counted expression tree over the
//! coordinates `x1`, `x2`, `x3`. Trees are built either by [`parse`] (which keeps
//! the structure of the source text) or by the arithmetic operators and helper
//! methods on `ScalarField`, which fold constants as they go.
//!
//! Two node kinds exist that the text grammar cannot express: numeric
//! primitives ([`Antiderivative`]) and tabulated cubic Hermite splines
//! ([`HermiteTable`]). The latter can be parsed back when a table registry is
//! supplied, see [`parse_with_tables`].

mod antiderivative;
mod constancy;
mod diff;
mod display;
mod error;
mod eval;
mod parse;
mod table;

use std::collections::BTreeSet;
use std::fmt;
use std::ops;
use std::sync::Arc;

pub use antiderivative::{Antiderivative, ANCHOR_SPACING, DEFAULT_QUADRATURE_TOL, MAX_QUADRATURE_DEPTH};
pub use constancy::{is_constant, Constancy, DEFAULT_CONSTANCY_SAMPLES, DEFAULT_CONSTANCY_TOL, MIN_CONSTANCY_SAMPLES};
pub use error::{EvalError, ExprError};
pub(crate) use parse::is_reserved;
pub use parse::{parse, parse_with_tables, ParseError, TableRegistry};
pub use table::{HermiteTable, TableError};

/// A point of R³ in standard coordinates.
pub type Point = [f64; 3];

/// One of the three standard coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X1,
    X2,
    X3,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X1, Axis::X2, Axis::X3];

    /// Zero-based index.
    pub fn index(self) -> usize {
        match self {
            Axis::X1 => 0,
            Axis::X2 => 1,
            Axis::X3 => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Axis> {
        Axis::ALL.get(i).copied()
    }

    /// Axis from its 1-based number as written in `x1`, `x2`, `x3`.
    pub fn from_number(n: usize) -> Option<Axis> {
        n.checked_sub(1).and_then(Axis::from_index)
    }

    pub fn number(self) -> usize {
        self.index() + 1
    }

    /// The other two axes, in increasing order.
    pub fn others(self) -> [Axis; 2] {
        match self {
            Axis::X1 => [Axis::X2, Axis::X3],
            Axis::X2 => [Axis::X1, Axis::X3],
            Axis::X3 => [Axis::X1, Axis::X2],
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.number())
    }
}

/// Built-in unary functions of the grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 5] = [Func::Exp, Func::Ln, Func::Sin, Func::Cos, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// A node of the expression tree.
#[derive(Debug)]
pub enum Node {
    Const(f64),
    Var(Axis),
    Add(ScalarField, ScalarField),
    Sub(ScalarField, ScalarField),
    Mul(ScalarField, ScalarField),
    Div(ScalarField, ScalarField),
    Neg(ScalarField),
    Pow(ScalarField, ScalarField),
    Func(Func, ScalarField),
    /// Numeric primitive applied to an argument: `F(arg)` with `F' = integrand`.
    Primitive(Arc<Antiderivative>, ScalarField),
    /// Derivative of the given order of a tabulated spline, applied to an argument.
    Table {
        table: Arc<HermiteTable>,
        order: u8,
        arg: ScalarField,
    },
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        use Node::*;
        match (self, other) {
            (Const(a), Const(b)) => a == b,
            (Var(a), Var(b)) => a == b,
            (Add(a, b), Add(c, d))
            | (Sub(a, b), Sub(c, d))
            | (Mul(a, b), Mul(c, d))
            | (Div(a, b), Div(c, d))
            | (Pow(a, b), Pow(c, d)) => a == c && b == d,
            (Neg(a), Neg(b)) => a == b,
            (Func(f, a), Func(g, b)) => f == g && a == b,
            (Primitive(p, a), Primitive(q, b)) => Arc::ptr_eq(p, q) && a == b,
            (
                Table {
                    table: t,
                    order: o,
                    arg: a,
                },
                Table {
                    table: u,
                    order: p,
                    arg: b,
                },
            ) => Arc::ptr_eq(t, u) && o == p && a == b,
            _ => false,
        }
    }
}

/// Immutable expression over `x1`, `x2`, `x3`. Cloning is cheap.
#[derive(Clone)]
pub struct ScalarField(Arc<Node>);

impl PartialEq for ScalarField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarField({self})")
    }
}

impl From<f64> for ScalarField {
    fn from(c: f64) -> Self {
        ScalarField::constant(c)
    }
}

impl ScalarField {
    /// Wraps a node without any simplification.
    pub fn from_node(node: Node) -> Self {
        ScalarField(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(c: f64) -> Self {
        ScalarField::from_node(Node::Const(c))
    }

    pub fn zero() -> Self {
        ScalarField::constant(0.0)
    }

    pub fn one() -> Self {
        ScalarField::constant(1.0)
    }

    pub fn var(axis: Axis) -> Self {
        ScalarField::from_node(Node::Var(axis))
    }

    /// The value of a constant node, if this is one.
    pub fn as_constant(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }

    fn is_one(&self) -> bool {
        self.as_constant() == Some(1.0)
    }

    /// Coordinates that occur anywhere in the tree.
    pub fn variables(&self) -> BTreeSet<Axis> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<Axis>) {
        match self.node() {
            Node::Const(_) => {}
            Node::Var(a) => {
                out.insert(*a);
            }
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
            Node::Neg(a) | Node::Func(_, a) | Node::Primitive(_, a) | Node::Table { arg: a, .. } => {
                a.collect_variables(out)
            }
        }
    }

    /// Syntactic dependence: whether `axis` occurs in the tree.
    pub fn depends_on(&self, axis: Axis) -> bool {
        self.variables().contains(&axis)
    }

    /// True when no coordinate occurs in the tree.
    pub fn is_constant_expr(&self) -> bool {
        self.variables().is_empty()
    }

    /// True when every occurring coordinate is in `allowed`.
    pub fn depends_only_on(&self, allowed: &[Axis]) -> bool {
        self.variables().iter().all(|a| allowed.contains(a))
    }

    /// Rebuilds the tree bottom-up through the folding constructors.
    pub fn folded(&self) -> ScalarField {
        match self.node() {
            Node::Const(_) | Node::Var(_) => self.clone(),
            Node::Add(a, b) => a.folded() + b.folded(),
            Node::Sub(a, b) => a.folded() - b.folded(),
            Node::Mul(a, b) => a.folded() * b.folded(),
            Node::Div(a, b) => a.folded() / b.folded(),
            Node::Neg(a) => -a.folded(),
            Node::Pow(a, b) => a.folded().pow(b.folded()),
            Node::Func(f, a) => a.folded().apply(*f),
            Node::Primitive(p, a) => ScalarField::primitive(p.clone(), a.folded()),
            Node::Table { table, order, arg } => ScalarField::table(table.clone(), *order, arg.folded()),
        }
    }

    /// Replaces every occurrence of `axis` by `with`.
    pub fn substitute(&self, axis: Axis, with: &ScalarField) -> ScalarField {
        match self.node() {
            Node::Const(_) => self.clone(),
            Node::Var(a) if *a == axis => with.clone(),
            Node::Var(_) => self.clone(),
            Node::Add(a, b) => a.substitute(axis, with) + b.substitute(axis, with),
            Node::Sub(a, b) => a.substitute(axis, with) - b.substitute(axis, with),
            Node::Mul(a, b) => a.substitute(axis, with) * b.substitute(axis, with),
            Node::Div(a, b) => a.substitute(axis, with) / b.substitute(axis, with),
            Node::Neg(a) => -a.substitute(axis, with),
            Node::Pow(a, b) => a.substitute(axis, with).pow(b.substitute(axis, with)),
            Node::Func(f, a) => a.substitute(axis, with).apply(*f),
            Node::Primitive(p, a) => ScalarField::primitive(p.clone(), a.substitute(axis, with)),
            Node::Table { table, order, arg } => ScalarField::table(table.clone(), *order, arg.substitute(axis, with)),
        }
    }

    /// Calls `visit` on every primitive node of the tree.
    pub fn for_each_primitive(&self, visit: &mut dyn FnMut(&Arc<Antiderivative>, &ScalarField)) {
        match self.node() {
            Node::Const(_) | Node::Var(_) => {}
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
                a.for_each_primitive(visit);
                b.for_each_primitive(visit);
            }
            Node::Neg(a) | Node::Func(_, a) | Node::Table { arg: a, .. } => a.for_each_primitive(visit),
            Node::Primitive(p, a) => {
                visit(p, a);
                a.for_each_primitive(visit);
            }
        }
    }

    /// Rebuilds the tree, letting `replace` substitute primitive nodes.
    pub fn map_primitives(
        &self,
        replace: &mut dyn FnMut(&Arc<Antiderivative>, ScalarField) -> ScalarField,
    ) -> ScalarField {
        match self.node() {
            Node::Const(_) | Node::Var(_) => self.clone(),
            Node::Add(a, b) => a.map_primitives(replace) + b.map_primitives(replace),
            Node::Sub(a, b) => a.map_primitives(replace) - b.map_primitives(replace),
            Node::Mul(a, b) => a.map_primitives(replace) * b.map_primitives(replace),
            Node::Div(a, b) => a.map_primitives(replace) / b.map_primitives(replace),
            Node::Neg(a) => -a.map_primitives(replace),
            Node::Pow(a, b) => a.map_primitives(replace).pow(b.map_primitives(replace)),
            Node::Func(f, a) => a.map_primitives(replace).apply(*f),
            Node::Primitive(p, a) => {
                let arg = a.map_primitives(replace);
                replace(p, arg)
            }
            Node::Table { table, order, arg } => ScalarField::table(table.clone(), *order, arg.map_primitives(replace)),
        }
    }

    pub fn primitive(prim: Arc<Antiderivative>, arg: ScalarField) -> ScalarField {
        ScalarField::from_node(Node::Primitive(prim, arg))
    }

    pub fn table(table: Arc<HermiteTable>, order: u8, arg: ScalarField) -> ScalarField {
        if order > 3 {
            // cubic pieces
            return ScalarField::zero();
        }
        ScalarField::from_node(Node::Table { table, order, arg })
    }

    /// `self ^ exponent` with constant folding.
    pub fn pow(self, exponent: impl Into<ScalarField>) -> ScalarField {
        let exponent = exponent.into();
        if let Some(e) = exponent.as_constant() {
            if e == 0.0 {
                return ScalarField::one();
            }
            if e == 1.0 {
                return self;
            }
            if let Some(b) = self.as_constant() {
                if let Ok(v) = eval::pow_value(b, e) {
                    return ScalarField::constant(v);
                }
            }
        }
        ScalarField::from_node(Node::Pow(self, exponent))
    }

    pub fn powi(self, n: i32) -> ScalarField {
        self.pow(f64::from(n))
    }

    /// Applies a built-in function, folding constant arguments.
    pub fn apply(self, func: Func) -> ScalarField {
        if let Some(c) = self.as_constant() {
            if let Ok(v) = eval::func_value(func, c) {
                return ScalarField::constant(v);
            }
        }
        ScalarField::from_node(Node::Func(func, self))
    }

    pub fn exp(self) -> ScalarField {
        self.apply(Func::Exp)
    }

    pub fn ln(self) -> ScalarField {
        self.apply(Func::Ln)
    }

    pub fn sin(self) -> ScalarField {
        self.apply(Func::Sin)
    }

    pub fn cos(self) -> ScalarField {
        self.apply(Func::Cos)
    }

    pub fn sqrt(self) -> ScalarField {
        self.apply(Func::Sqrt)
    }

    pub fn recip(self) -> ScalarField {
        ScalarField::one() / self
    }
}

fn finite_const(v: f64) -> Option<ScalarField> {
    v.is_finite().then(|| ScalarField::constant(v))
}

impl ops::Add for ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: ScalarField) -> ScalarField {
        if let (Some(a), Some(b)) = (self.as_constant(), rhs.as_constant()) {
            if let Some(c) = finite_const(a + b) {
                return c;
            }
        }
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        ScalarField::from_node(Node::Add(self, rhs))
    }
}

impl ops::Sub for ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: ScalarField) -> ScalarField {
        if let (Some(a), Some(b)) = (self.as_constant(), rhs.as_constant()) {
            if let Some(c) = finite_const(a - b) {
                return c;
            }
        }
        if rhs.is_zero() {
            return self;
        }
        if self.is_zero() {
            return -rhs;
        }
        if self == rhs {
            return ScalarField::zero();
        }
        ScalarField::from_node(Node::Sub(self, rhs))
    }
}

impl ops::Mul for ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: ScalarField) -> ScalarField {
        if let (Some(a), Some(b)) = (self.as_constant(), rhs.as_constant()) {
            if let Some(c) = finite_const(a * b) {
                return c;
            }
        }
        if self.is_zero() || rhs.is_zero() {
            return ScalarField::zero();
        }
        if self.is_one() {
            return rhs;
        }
        if rhs.is_one() {
            return self;
        }
        if self.as_constant() == Some(-1.0) {
            return -rhs;
        }
        if rhs.as_constant() == Some(-1.0) {
            return -self;
        }
        ScalarField::from_node(Node::Mul(self, rhs))
    }
}

impl ops::Div for ScalarField {
    type Output = ScalarField;
    fn div(self, rhs: ScalarField) -> ScalarField {
        if let (Some(a), Some(b)) = (self.as_constant(), rhs.as_constant()) {
            if b != 0.0 {
                if let Some(c) = finite_const(a / b) {
                    return c;
                }
            }
        }
        if self.is_zero() && rhs.as_constant() != Some(0.0) {
            return ScalarField::zero();
        }
        if rhs.is_one() {
            return self;
        }
        ScalarField::from_node(Node::Div(self, rhs))
    }
}

impl ops::Neg for ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        if let Some(c) = self.as_constant() {
            return ScalarField::constant(-c);
        }
        if let Node::Neg(inner) = self.node() {
            return inner.clone();
        }
        ScalarField::from_node(Node::Neg(self))
    }
}

macro_rules! ref_and_scalar_ops {
    ($($tr:ident $method:ident),*) => {$(
        impl ops::$tr<&ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: &ScalarField) -> ScalarField {
                ops::$tr::$method(self.clone(), rhs.clone())
            }
        }
        impl ops::$tr<&ScalarField> for ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: &ScalarField) -> ScalarField {
                ops::$tr::$method(self, rhs.clone())
            }
        }
        impl ops::$tr<ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: ScalarField) -> ScalarField {
                ops::$tr::$method(self.clone(), rhs)
            }
        }
        impl ops::$tr<f64> for &ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: f64) -> ScalarField {
                ops::$tr::$method(self.clone(), ScalarField::constant(rhs))
            }
        }
        impl ops::$tr<f64> for ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: f64) -> ScalarField {
                ops::$tr::$method(self, ScalarField::constant(rhs))
            }
        }
        impl ops::$tr<ScalarField> for f64 {
            type Output = ScalarField;
            fn $method(self, rhs: ScalarField) -> ScalarField {
                ops::$tr::$method(ScalarField::constant(self), rhs)
            }
        }
    )*};
}

ref_and_scalar_ops!(Add add, Sub sub, Mul mul, Div div);

impl ops::Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        -self.clone()
    }
}
