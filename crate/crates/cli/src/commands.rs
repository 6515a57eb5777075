use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use diagkill::catalog::{self, ExampleMode, FieldCheck, RunConfig};
use diagkill::export::{export_field, EXPORT_KNOTS};
use diagkill::families::{ClassifierConfig, FamilyError, FamilyGenerator, FamilyParams, FamilyTag, GeneratorConfig};
use diagkill::flow::Flow;
use diagkill::killing::{self, FrameVectorField, ENTRY_NAMES};
use diagkill::metric::{DiagonalMetric, DomainBox};

use crate::report::{verdict, AuditReport, ExampleReport, FieldVerdict, FlowSummary, GeneratedField, Report};
use crate::spec::{JobSpec, Overrides, TableSpec};
use crate::Outcome;

fn load(path: &Path, o: &Overrides) -> Result<(JobSpec, DiagonalMetric)> {
    let mut spec = JobSpec::load(path)?;
    spec.apply(o)?;
    let m = spec.metric().context("metric")?;
    Ok((spec, m))
}

fn require_field(spec: &JobSpec, m: &DiagonalMetric) -> Result<FrameVectorField> {
    spec.field(m)?.ok_or_else(|| anyhow!("spec has no [field] section"))
}

fn classifier(spec: &JobSpec) -> ClassifierConfig {
    ClassifierConfig {
        tolerance: spec.tolerances.constancy,
        ..Default::default()
    }
}

pub fn verify(path: &Path, o: &Overrides) -> Result<Outcome> {
    let (spec, m) = load(path, o)?;
    let v = require_field(&spec, &m)?;
    let cmp = killing::compare_oracles(&m, &v, spec.domain.grid)?;
    let pass = cmp.frame.max_abs <= spec.tolerances.residual;
    let mut r = Report::new("verify");
    r.verdict = verdict(pass);
    r.max_residual_frame = Some(cmp.frame.max_abs);
    r.max_residual_coordinate = Some(cmp.coordinate.max_abs);
    r.oracle_gap = Some(cmp.gap);
    r.worst_point = Some(cmp.frame.worst_point);
    r.worst_residual = Some(
        ENTRY_NAMES
            .iter()
            .zip(cmp.frame.worst.as_array())
            .map(|(n, x)| (n.to_string(), x))
            .collect(),
    );
    Ok(Outcome { report: r, pass })
}

pub fn classify(path: &Path, o: &Overrides) -> Result<Outcome> {
    let (spec, m) = load(path, o)?;
    let d = diagkill::families::classify_with(&m, &classifier(&spec))?;
    let mut r = Report::new("classify");
    r.verdict = "classified".into();
    r.descriptor = Some(d.tag.to_string());
    r.k = d.k;
    r.frame_killing_fields = Some(d.frame_fields.names());
    r.applicable = Some(d.applicable.iter().map(ToString::to_string).collect());
    r.dimension = Some(d.dimension);
    r.reason = d.reason.clone();
    Ok(Outcome { report: r, pass: true })
}

/// `1,0,2` (positional) or `c1=1,c3=2` (named).
pub fn parse_params(s: &str) -> Result<FamilyParams> {
    let items: Vec<&str> = s.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
    if items.iter().all(|t| !t.contains('=')) {
        let v = items
            .iter()
            .map(|t| t.parse::<f64>().with_context(|| format!("parameter `{t}`")))
            .collect::<Result<Vec<_>>>()?;
        return Ok(FamilyParams::positional(v));
    }
    let mut pairs = Vec::new();
    for t in items {
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| anyhow!("mixing named and positional parameters: `{t}`"))?;
        pairs.push((
            k.trim().to_string(),
            v.trim().parse::<f64>().with_context(|| format!("parameter `{t}`"))?,
        ));
    }
    Ok(FamilyParams::named(pairs))
}

fn self_check(
    tag: FamilyTag,
    names: &[&'static str],
    values: Vec<f64>,
    v: &FrameVectorField,
    m: &DiagonalMetric,
    spec: &JobSpec,
) -> Result<GeneratedField> {
    let grid = spec.domain.grid;
    let residual = killing::max_residual_grid(m, v, grid)?.max_abs;
    let exported = export_field(v, m.domain(), EXPORT_KNOTS)?;
    let reread = exported.import()?;
    let residual_exported = killing::max_residual_grid(m, &reread, grid)?.max_abs;
    Ok(GeneratedField {
        family: tag.to_string(),
        params: names.iter().map(|n| n.to_string()).zip(values).collect(),
        frame: exported.components.clone(),
        tables: exported.tables.iter().map(TableSpec::from_table).collect(),
        verdict: verdict(residual <= spec.tolerances.residual),
        max_residual: residual,
        max_residual_exported: residual_exported,
    })
}

pub fn generate(path: &Path, o: &Overrides, family: &str, params: Option<&str>, basis: bool) -> Result<Outcome> {
    let (spec, m) = load(path, o)?;
    let tag: FamilyTag = family.parse()?;
    let config = GeneratorConfig {
        quadrature_tol: spec.tolerances.quadrature,
        classifier: classifier(&spec),
        ..Default::default()
    };
    let generator = FamilyGenerator::with_config(&m, config)?;
    let d = generator.descriptor();
    let mut r = Report::new("generate");
    r.descriptor = Some(d.tag.to_string());
    r.k = d.k;
    r.applicable = Some(d.applicable.iter().map(ToString::to_string).collect());
    r.frame_killing_fields = Some(d.frame_fields.names());

    let names = generator.param_names(tag);
    let fields = if basis {
        generator.basis(tag).map(|b| {
            b.into_iter()
                .enumerate()
                .map(|(i, v)| {
                    let mut unit = vec![0.0; names.len()];
                    unit[i] = 1.0;
                    (unit, v)
                })
                .collect::<Vec<_>>()
        })
    } else {
        let p = match params {
            Some(s) => parse_params(s)?,
            None => bail!("give --params or --basis"),
        };
        let values = resolved(&p, &names);
        generator.generate(tag, &p).map(|v| vec![(values, v)])
    };
    let fields = match fields {
        Ok(f) => f,
        Err(FamilyError::CaseNotApplicable { reason, .. }) => {
            r.verdict = "not_applicable".into();
            r.reason = Some(reason);
            return Ok(Outcome { report: r, pass: false });
        }
        Err(e) => return Err(e.into()),
    };
    r.dimension = Some(names.len());
    for (values, v) in &fields {
        r.fields.push(self_check(tag, &names, values.clone(), v, &m, &spec)?);
    }
    let pass = r.fields.iter().all(|f| f.verdict == "pass");
    r.verdict = verdict(pass);
    Ok(Outcome { report: r, pass })
}

fn resolved(p: &FamilyParams, names: &[&'static str]) -> Vec<f64> {
    match p {
        FamilyParams::Positional(v) => v.clone(),
        FamilyParams::Named(pairs) => names
            .iter()
            .map(|n| pairs.iter().rev().find(|(k, _)| k == n).map_or(0.0, |(_, v)| *v))
            .collect(),
    }
}

fn field_verdict(c: &FieldCheck) -> FieldVerdict {
    FieldVerdict {
        verdict: verdict(c.killing),
        max_residual: c.max_residual,
        max_residual_coordinate: c.max_residual_coordinate,
    }
}

pub fn paper_examples(o: &Overrides) -> Result<Outcome> {
    let mut config = RunConfig::default();
    if let Some(g) = o.grid {
        config.grid = g;
    }
    if let Some(t) = o.tol {
        config.tol = t;
    }
    if let Some((a, b)) = o.domain {
        config.domain = DomainBox::cube(a, b)?;
    }
    let outcomes = catalog::run_examples(&config)?;
    let mut r = Report::new("paper-examples");
    let mut pass = true;
    for (o, e) in outcomes.iter().zip(catalog::REFERENCE_EXAMPLES.iter()) {
        pass &= o.as_expected();
        let audit = o.audit.map(|a| AuditReport {
            printed: field_verdict(&a.printed),
            closed_form: field_verdict(&a.closed_form),
            generated: field_verdict(&a.generated),
            discrepancy: a.discrepancy(),
        });
        let v = match o.mode {
            ExampleMode::Asserted => verdict(o.check.killing),
            ExampleMode::Audit => "audit".into(),
        };
        r.examples.push(ExampleReport {
            name: o.name.to_string(),
            verdict: v,
            max_residual: o.check.max_residual,
            description: e.description.to_string(),
            audit,
        });
    }
    r.verdict = verdict(pass);
    Ok(Outcome { report: r, pass })
}

pub fn flow_check(path: &Path, o: &Overrides, t: f64, steps: usize, flow_tol: f64) -> Result<Outcome> {
    let (spec, m) = load(path, o)?;
    let v = require_field(&spec, &m)?;
    let g = spec.domain.grid;
    if g.iter().any(|&n| n < 3) {
        bail!("flow-check needs at least 3 grid points per axis to have interior points");
    }
    let points = m.domain().interior_grid(g.map(|n| n - 2));
    let flow = Flow::new(&m, &v);
    let mut worst = (0.0f64, points[0]);
    for &p in &points {
        let d = flow.isometry_defect(p, t, steps)?;
        if d > worst.0 {
            worst = (d, p);
        }
    }
    let pass = worst.0 <= flow_tol;
    let mut r = Report::new("flow-check");
    r.verdict = verdict(pass);
    r.flow = Some(FlowSummary {
        t,
        steps,
        points: points.len(),
        max_defect: worst.0,
        worst_point: worst.1,
        tolerance: flow_tol,
    });
    Ok(Outcome { report: r, pass })
}
