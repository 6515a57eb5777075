//! Bundled reference metrics and Killing fields, and a runner that verifies
//! them.
//!
//! Fields are stored the way they are usually written, in coordinate
//! components `Σ W^k ∂_k`, and converted to the frame on load.
//!
//! One entry is an audit rather than an assertion: the field printed for the
//! exponential split metric `g = e^{-2x¹}dx¹² + e^{-2x²}dx²² + dx³²` does not
//! satisfy the Killing system as printed (the `12` equation leaves
//! `e^{2x¹} - e^{2x²}`), while the closed-form split family with
//! `F_i = -e^{-x^i}` does. The runner checks the printed field, that
//! closed-form counterpart and the generator's own output, and reports all
//! three.

use thiserror::Error;

use crate::expr::{self, ParseError, ScalarField};
use crate::families::{FamilyError, FamilyGenerator, FamilyParams, FamilyTag};
use crate::killing::{self, FrameVectorField, KillingError, Oracle};
use crate::metric::{DiagonalMetric, DomainBox, MetricError};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CatalogError {
    #[error("example `{name}`: {source}")]
    Metric { name: &'static str, source: MetricError },
    #[error("example `{name}`: {source}")]
    Parse { name: &'static str, source: ParseError },
    #[error("example `{name}`: {source}")]
    Killing { name: &'static str, source: KillingError },
    #[error("example `{name}`: {source}")]
    Family { name: &'static str, source: FamilyError },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExampleMode {
    /// The field is expected to be Killing.
    Asserted,
    /// Printed field checked alongside its closed-form counterpart; the
    /// printed field is not expected to pass.
    Audit,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceExample {
    pub name: &'static str,
    pub description: &'static str,
    pub metric: [&'static str; 3],
    /// Coordinate components `W^k`.
    pub coordinate_field: [&'static str; 3],
    pub mode: ExampleMode,
}

pub const FRAME_FIELD_E1: ReferenceExample = ReferenceExample {
    name: "frame-field-e1",
    description: "E1 = e^{x1} d/dx1 on g = e^{-2x1}dx1² + e^{x2+x3}dx2² + e^{x2x3}dx3²",
    metric: ["exp(x1)", "exp(-(x2+x3)/2)", "exp(-(x2*x3)/2)"],
    coordinate_field: ["exp(x1)", "0", "0"],
    mode: ExampleMode::Asserted,
};

/// `k = (1, 2, 3)`: `W = (k₁²(-k₃x² + k₂x³), k₂²(k₃x¹ - k₁x³), k₃²(-k₂x¹ + k₁x²))`.
pub const CONSTANT_METRIC: ReferenceExample = ReferenceExample {
    name: "constant-metric",
    description: "rotation-type field on g = dx1² + dx2²/4 + dx3²/9",
    metric: ["1", "2", "3"],
    coordinate_field: ["1*(-3*x2 + 2*x3)", "4*(3*x1 - 1*x3)", "9*(-2*x1 + 1*x2)"],
    mode: ExampleMode::Asserted,
};

pub const PR1_TRANSLATION: ReferenceExample = ReferenceExample {
    name: "pr1-translation",
    description: "d/dx2 + d/dx3 on g = e^{x1}dx1² + e^{2x1}dx2² + e^{3x1}dx3²",
    metric: ["exp(-x1/2)", "exp(-x1)", "exp(-3*x1/2)"],
    coordinate_field: ["0", "1", "1"],
    mode: ExampleMode::Asserted,
};

pub const PR2_EXPONENTIAL: ReferenceExample = ReferenceExample {
    name: "pr2-exponential",
    description: "Σ e^{xi} d/dxi on g = Σ e^{-2xi} dxi²",
    metric: ["exp(x1)", "exp(x2)", "exp(x3)"],
    coordinate_field: ["exp(x1)", "exp(x2)", "exp(x3)"],
    mode: ExampleMode::Asserted,
};

pub const SPLIT_EXPONENTIAL: ReferenceExample = ReferenceExample {
    name: "split-exponential",
    description: "printed field on g = e^{-2x1}dx1² + e^{-2x2}dx2² + dx3² (audit)",
    metric: ["exp(x1)", "exp(x2)", "1"],
    coordinate_field: [
        "exp(x1)*(x3 - exp(x2))",
        "exp(x2)*(x3 + exp(x1))",
        "-(exp(x1) + exp(x2))",
    ],
    mode: ExampleMode::Audit,
};

/// Frame components of the split family with `c = a₁ = b₁ = 1`, other
/// parameters zero and `F_i = -e^{-x^i}`.
pub const SPLIT_CLOSED_FORM_FRAME: [&str; 3] = ["x3 + exp(-x2)", "x3 - exp(-x1)", "exp(-x1) + exp(-x2)"];

pub const REFERENCE_EXAMPLES: [ReferenceExample; 5] = [
    FRAME_FIELD_E1,
    CONSTANT_METRIC,
    PR1_TRANSLATION,
    PR2_EXPONENTIAL,
    SPLIT_EXPONENTIAL,
];

impl ReferenceExample {
    pub fn metric_on(&self, domain: DomainBox) -> Result<DiagonalMetric, CatalogError> {
        let [a, b, c] = self.metric;
        DiagonalMetric::from_strs(a, b, c, domain).map_err(|source| CatalogError::Metric {
            name: self.name,
            source,
        })
    }

    pub fn metric(&self) -> Result<DiagonalMetric, CatalogError> {
        self.metric_on(DomainBox::default())
    }

    /// The stored field in frame components for `m`.
    pub fn frame_field(&self, m: &DiagonalMetric) -> Result<FrameVectorField, CatalogError> {
        let w = parse3(self.name, self.coordinate_field)?;
        Ok(m.coordinate_to_frame(&w))
    }
}

fn parse3(name: &'static str, s: [&str; 3]) -> Result<[ScalarField; 3], CatalogError> {
    let p = |t: &str| expr::parse(t).map_err(|source| CatalogError::Parse { name, source });
    Ok([p(s[0])?, p(s[1])?, p(s[2])?])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunConfig {
    pub grid: [usize; 3],
    pub tol: f64,
    pub domain: DomainBox,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid: killing::DEFAULT_GRID,
            tol: killing::DEFAULT_RESIDUAL_TOL,
            domain: DomainBox::default(),
        }
    }
}

/// Verdict of one field against both oracles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldCheck {
    pub killing: bool,
    pub max_residual: f64,
    pub max_residual_coordinate: f64,
}

fn check(
    name: &'static str,
    m: &DiagonalMetric,
    v: &FrameVectorField,
    config: &RunConfig,
) -> Result<FieldCheck, CatalogError> {
    let wrap = |source| CatalogError::Killing { name, source };
    let frame = killing::max_residual_grid_with(m, v, config.grid, Oracle::Frame).map_err(wrap)?;
    let coord = killing::max_residual_grid_with(m, v, config.grid, Oracle::Coordinate).map_err(wrap)?;
    Ok(FieldCheck {
        killing: frame.max_abs <= config.tol,
        max_residual: frame.max_abs,
        max_residual_coordinate: coord.max_abs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuditDetail {
    pub printed: FieldCheck,
    pub closed_form: FieldCheck,
    pub generated: FieldCheck,
}

impl AuditDetail {
    /// The printed field fails while both counterparts pass.
    pub fn discrepancy(&self) -> bool {
        !self.printed.killing && self.closed_form.killing && self.generated.killing
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExampleOutcome {
    pub name: &'static str,
    pub mode: ExampleMode,
    /// For audits, the check of the printed field.
    pub check: FieldCheck,
    pub audit: Option<AuditDetail>,
}

impl ExampleOutcome {
    /// Asserted examples must verify; audits must verify their counterparts.
    pub fn as_expected(&self) -> bool {
        match (self.mode, &self.audit) {
            (ExampleMode::Asserted, _) => self.check.killing,
            (ExampleMode::Audit, Some(a)) => a.closed_form.killing && a.generated.killing,
            (ExampleMode::Audit, None) => false,
        }
    }
}

pub fn run_example(example: &ReferenceExample, config: &RunConfig) -> Result<ExampleOutcome, CatalogError> {
    let name = example.name;
    let m = example.metric_on(config.domain)?;
    let v = example.frame_field(&m)?;
    let printed = check(name, &m, &v, config)?;
    let audit = match example.mode {
        ExampleMode::Asserted => None,
        ExampleMode::Audit => {
            let closed = FrameVectorField::new(parse3(name, SPLIT_CLOSED_FORM_FRAME)?);
            let family = |source| CatalogError::Family { name, source };
            let generated = FamilyGenerator::new(&m)
                .and_then(|g| {
                    g.generate(
                        FamilyTag::SplitX1X2K3,
                        &FamilyParams::named([("a1", 1.0), ("b1", 1.0), ("c", 1.0)]),
                    )
                })
                .map_err(family)?;
            Some(AuditDetail {
                printed,
                closed_form: check(name, &m, &closed, config)?,
                generated: check(name, &m, &generated, config)?,
            })
        }
    };
    Ok(ExampleOutcome {
        name,
        mode: example.mode,
        check: printed,
        audit,
    })
}

pub fn run_examples(config: &RunConfig) -> Result<Vec<ExampleOutcome>, CatalogError> {
    REFERENCE_EXAMPLES.iter().map(|e| run_example(e, config)).collect()
}
