//! Job spec files (TOML).
//!
//! ```toml
//! [metric]            # frame scales f_i = 1/sqrt(g_ii)
//! f1 = "exp(x1)"
//! f2 = "exp(-(x2+x3)/2)"
//! f3 = "exp(-(x2*x3)/2)"
//!
//! [field]             # optional; exactly one of frame / coordinate
//! coordinate = ["exp(x1)", "0", "0"]
//!
//! [domain]            # optional
//! min = [-1, -1, -1]
//! max = [1, 1, 1]
//! grid = [5, 5, 5]
//!
//! [tolerances]        # optional
//! residual = 1e-7
//! quadrature = 1e-10
//! constancy = 1e-8
//!
//! [[tables]]          # optional Hermite tables referenced as NAME(arg)
//! name = "T1"
//! knots = [...]
//! values = [...]
//! slopes = [...]
//! ```

use std::path::Path;

use anyhow::{bail, Context, Result};
use diagkill::export::registry_from;
use diagkill::expr::{parse_with_tables, HermiteTable, ScalarField, TableRegistry};
use diagkill::killing::{FrameVectorField, DEFAULT_GRID, DEFAULT_RESIDUAL_TOL};
use diagkill::metric::{DiagonalMetric, DomainBox};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub metric: MetricSpec,
    #[serde(default)]
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub domain: DomainSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub tables: Vec<TableSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    pub f1: String,
    pub f2: String,
    pub f3: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub frame: Option<[String; 3]>,
    pub coordinate: Option<[String; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DomainSpec {
    pub min: [f64; 3],
    pub max: [f64; 3],
    pub grid: [usize; 3],
}

impl Default for DomainSpec {
    fn default() -> Self {
        DomainSpec {
            min: [-1.0; 3],
            max: [1.0; 3],
            grid: DEFAULT_GRID,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub residual: f64,
    pub quadrature: f64,
    pub constancy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual: DEFAULT_RESIDUAL_TOL,
            quadrature: diagkill::expr::DEFAULT_QUADRATURE_TOL,
            constancy: diagkill::expr::DEFAULT_CONSTANCY_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    pub name: String,
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
}

impl TableSpec {
    pub fn from_table(t: &HermiteTable) -> Self {
        TableSpec {
            name: t.name().to_string(),
            knots: t.knots().to_vec(),
            values: t.values().to_vec(),
            slopes: t.slopes().to_vec(),
        }
    }
}

/// Command-line overrides applied on top of the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub grid: Option<[usize; 3]>,
    pub tol: Option<f64>,
    pub domain: Option<(f64, f64)>,
    pub constancy: Option<f64>,
}

impl JobSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        JobSpec::from_toml(&text).with_context(|| format!("invalid spec {}", path.display()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: JobSpec = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(g) = o.grid {
            self.domain.grid = g;
        }
        if let Some(t) = o.tol {
            self.tolerances.residual = t;
        }
        if let Some((a, b)) = o.domain {
            self.domain.min = [a; 3];
            self.domain.max = [b; 3];
        }
        if let Some(c) = o.constancy {
            self.tolerances.constancy = c;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..3 {
            if !(self.domain.min[i] < self.domain.max[i]) {
                bail!("domain: min must be below max on axis {}", i + 1);
            }
            if self.domain.grid[i] < 2 {
                bail!("domain: grid counts must be at least 2");
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("residual", t.residual),
            ("quadrature", t.quadrature),
            ("constancy", t.constancy),
        ] {
            if !(v > 0.0) {
                bail!("tolerances: {name} must be positive, got {v}");
            }
        }
        if let Some(f) = &self.field {
            if f.frame.is_some() == f.coordinate.is_some() {
                bail!("field: give exactly one of `frame` or `coordinate`");
            }
        }
        Ok(())
    }

    pub fn domain_box(&self) -> Result<DomainBox> {
        Ok(DomainBox::new(self.domain.min, self.domain.max)?)
    }

    fn registry(&self) -> Result<TableRegistry> {
        let tables = self
            .tables
            .iter()
            .map(|t| HermiteTable::new(t.name.clone(), t.knots.clone(), t.values.clone(), t.slopes.clone()))
            .collect::<Result<Vec<_>, _>>()
            .context("tables")?;
        Ok(registry_from(tables)?)
    }

    fn parse(&self, what: &str, text: &str, reg: &TableRegistry) -> Result<ScalarField> {
        parse_with_tables(text, reg).with_context(|| format!("{what}: cannot parse `{text}`"))
    }

    pub fn metric(&self) -> Result<DiagonalMetric> {
        let reg = self.registry()?;
        let m = &self.metric;
        let f = [("f1", &m.f1), ("f2", &m.f2), ("f3", &m.f3)].map(|(n, s)| self.parse(&format!("metric.{n}"), s, &reg));
        let [f1, f2, f3] = f;
        Ok(DiagonalMetric::new(f1?, f2?, f3?, self.domain_box()?)?)
    }

    /// The field in frame components, converting coordinate input.
    pub fn field(&self, m: &DiagonalMetric) -> Result<Option<FrameVectorField>> {
        let Some(f) = &self.field else { return Ok(None) };
        let reg = self.registry()?;
        let parse3 = |what: &str, s: &[String; 3]| -> Result<[ScalarField; 3]> {
            Ok([
                self.parse(&format!("{what}[1]"), &s[0], &reg)?,
                self.parse(&format!("{what}[2]"), &s[1], &reg)?,
                self.parse(&format!("{what}[3]"), &s[2], &reg)?,
            ])
        };
        Ok(Some(match (&f.frame, &f.coordinate) {
            (Some(v), None) => FrameVectorField::new(parse3("field.frame", v)?),
            (None, Some(w)) => m.coordinate_to_frame(&parse3("field.coordinate", w)?),
            _ => bail!("field: give exactly one of `frame` or `coordinate`"),
        }))
    }
}
