//! Printing in the input grammar, with the fewest parentheses that keep the
//! tree shape on re-parse.

use std::fmt;

use super::{Node, ScalarField};

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn precedence(node: &Node) -> u8 {
    match node {
        Node::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => UNARY,
        Node::Const(_) | Node::Var(_) | Node::Func(..) | Node::Primitive(..) | Node::Table { .. } => ATOM,
        Node::Add(..) | Node::Sub(..) => SUM,
        Node::Mul(..) | Node::Div(..) => PRODUCT,
        Node::Neg(_) => UNARY,
        Node::Pow(..) => POWER,
    }
}

fn format_number(c: f64) -> String {
    let a = c.abs();
    if a == 0.0 || (1e-5..1e15).contains(&a) {
        format!("{c}")
    } else {
        format!("{c:e}")
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &ScalarField, min: u8) -> fmt::Result {
    if precedence(e.node()) < min {
        write!(f, "(")?;
        write_node(f, e)?;
        write!(f, ")")
    } else {
        write_node(f, e)
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, e: &ScalarField) -> fmt::Result {
    match e.node() {
        Node::Const(c) => write!(f, "{}", format_number(*c)),
        Node::Var(a) => write!(f, "{a}"),
        Node::Add(a, b) | Node::Sub(a, b) => {
            write_at(f, a, SUM)?;
            let op = if matches!(e.node(), Node::Add(..)) {
                " + "
            } else {
                " - "
            };
            write!(f, "{op}")?;
            write_at(f, b, PRODUCT)
        }
        Node::Mul(a, b) | Node::Div(a, b) => {
            write_at(f, a, PRODUCT)?;
            let op = if matches!(e.node(), Node::Mul(..)) { "*" } else { "/" };
            write!(f, "{op}")?;
            write_at(f, b, UNARY)
        }
        Node::Neg(a) => {
            write!(f, "-")?;
            write_at(f, a, UNARY)
        }
        Node::Pow(a, b) => {
            write_at(f, a, ATOM)?;
            write!(f, "^")?;
            write_at(f, b, UNARY)
        }
        Node::Func(func, a) => {
            write!(f, "{}(", func.name())?;
            write_node(f, a)?;
            write!(f, ")")
        }
        Node::Primitive(prim, arg) => {
            write!(f, "integral_{}[{}](", prim.axis(), prim.integrand())?;
            write_node(f, arg)?;
            write!(f, ")")
        }
        Node::Table { table, order, arg } => {
            write!(f, "{}{}(", table.name(), "'".repeat(*order as usize))?;
            write_node(f, arg)?;
            write!(f, ")")
        }
    }
}

/// Text in the input grammar. Trees holding primitives or derived tables print
/// in an informational form that does not parse.
impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, self)
    }
}
