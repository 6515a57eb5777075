//! Text export of generated fields.
//!
//! Quadrature-backed primitives have no closed form in the expression
//! grammar. On export each distinct primitive is tabulated over the domain
//! interval of its axis as a cubic Hermite table (values from the quadrature,
//! slopes from the integrand) and referenced by name, e.g. `-2*T1(x1) + x3`.
//! Importing the text with the tables gives back an evaluable,
//! differentiable field.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::{self, EvalError, HermiteTable, ParseError, ScalarField, TableError, TableRegistry};
use crate::killing::FrameVectorField;
use crate::metric::DomainBox;

/// Knots per exported table.
pub const EXPORT_KNOTS: usize = 129;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ExportError {
    #[error("tabulating primitive failed: {0}")]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("table name `{0}` is reserved or not an identifier")]
    ReservedName(String),
    #[error("duplicate table name `{0}`")]
    DuplicateName(String),
    #[error("cannot re-read exported component: {0}")]
    Parse(#[from] ParseError),
}

/// A field as three expression strings plus the tables they reference.
#[derive(Clone, Debug, PartialEq)]
pub struct ExportedField {
    pub components: [String; 3],
    pub tables: Vec<HermiteTable>,
}

impl ExportedField {
    pub fn registry(&self) -> Result<TableRegistry, ExportError> {
        registry_from(self.tables.iter().cloned())
    }

    /// Parses the components back, resolving table references.
    pub fn import(&self) -> Result<FrameVectorField, ExportError> {
        let reg = self.registry()?;
        let p = |s: &str| expr::parse_with_tables(s, &reg);
        Ok(FrameVectorField::new([
            p(&self.components[0])?,
            p(&self.components[1])?,
            p(&self.components[2])?,
        ]))
    }
}

/// Registry keyed by table name. Names must be identifiers distinct from
/// the grammar's variables and functions.
pub fn registry_from(tables: impl IntoIterator<Item = HermiteTable>) -> Result<TableRegistry, ExportError> {
    let mut reg = TableRegistry::new();
    for t in tables {
        let name = t.name().to_string();
        let ident = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ident || expr::is_reserved(&name) {
            return Err(ExportError::ReservedName(name));
        }
        if reg.insert(name.clone(), Arc::new(t)).is_some() {
            return Err(ExportError::DuplicateName(name));
        }
    }
    Ok(reg)
}

/// Exports `v`, tabulating primitives on `domain` with `knots` knots.
pub fn export_field(v: &FrameVectorField, domain: &DomainBox, knots: usize) -> Result<ExportedField, ExportError> {
    let mut names: HashMap<*const expr::Antiderivative, Arc<HermiteTable>> = HashMap::new();
    let mut tables = Vec::new();
    let mut failure = None;
    let components = v.components().clone().map(|c| {
        let out = c.map_primitives(&mut |prim, arg| {
            let key = Arc::as_ptr(prim);
            if let Some(t) = names.get(&key) {
                return ScalarField::table(t.clone(), 0, arg);
            }
            let (a, b) = domain.interval(prim.axis());
            let name = format!("T{}", tables.len() + 1);
            let tabulated = HermiteTable::tabulate(name, a, b, knots, |x| {
                let mut p = [0.0; 3];
                p[prim.axis().index()] = x;
                Ok::<_, EvalError>((prim.value(x)?, prim.integrand().eval(p)?))
            });
            match tabulated {
                Ok(Ok(t)) => {
                    let t = Arc::new(t);
                    tables.push((*t).clone());
                    names.insert(key, t.clone());
                    ScalarField::table(t, 0, arg)
                }
                Ok(Err(e)) => {
                    failure.get_or_insert(ExportError::Table(e));
                    ScalarField::zero()
                }
                Err(e) => {
                    failure.get_or_insert(ExportError::Eval(e));
                    ScalarField::zero()
                }
            }
        });
        out.to_string()
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(ExportedField { components, tables }),
    }
}
