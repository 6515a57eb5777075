//! Machine-readable command output.
//!
//! Keys serialize in declaration order; `timing_ms` is last and is the only
//! field that varies between runs of the same job.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::spec::TableSpec;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_residual_frame: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_residual_coordinate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descriptor: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_killing_fields: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub examples: Vec<ExampleReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_point: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_residual: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub applicable: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<GeneratedField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowSummary>,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldVerdict {
    pub verdict: String,
    pub max_residual: f64,
    pub max_residual_coordinate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub printed: FieldVerdict,
    pub closed_form: FieldVerdict,
    pub generated: FieldVerdict,
    pub discrepancy: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleReport {
    pub name: String,
    pub verdict: String,
    pub max_residual: f64,
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratedField {
    pub family: String,
    pub params: BTreeMap<String, f64>,
    pub frame: [String; 3],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tables: Vec<TableSpec>,
    pub verdict: String,
    pub max_residual: f64,
    /// Residual of the exported text form (tables included), re-read.
    pub max_residual_exported: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowSummary {
    pub t: f64,
    pub steps: usize,
    pub points: usize,
    pub max_defect: f64,
    pub worst_point: [f64; 3],
    pub tolerance: f64,
}

pub fn verdict(pass: bool) -> String {
    if pass { "pass" } else { "fail" }.to_string()
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            ..Default::default()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only finite numbers and strings")
    }

    /// Plain text rendering for terminals.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(s, "{k:<24}{v}");
        };
        line("command", self.command.clone());
        line("verdict", self.verdict.clone());
        let num = |x: f64| format!("{x:.3e}");
        if let Some(x) = self.max_residual_frame {
            line("max residual (frame)", num(x));
        }
        if let Some(x) = self.max_residual_coordinate {
            line("max residual (coord)", num(x));
        }
        if let Some(x) = self.oracle_gap {
            line("oracle gap", num(x));
        }
        if let Some(p) = self.worst_point {
            line("worst point", format!("({}, {}, {})", p[0], p[1], p[2]));
        }
        if let Some(d) = &self.descriptor {
            line("family", d.clone());
        }
        if let Some(k) = self.k {
            line("k", format!("{k}"));
        }
        if let Some(d) = self.dimension {
            line("dimension", d.to_string());
        }
        if let Some(r) = &self.reason {
            line("reason", r.clone());
        }
        if let Some(a) = &self.applicable {
            line("applicable", a.join(", "));
        }
        if let Some(f) = &self.frame_killing_fields {
            line("killing frame fields", format!("{{{}}}", f.join(",")));
        }
        for e in &self.examples {
            line(
                &format!("example {}", e.name),
                format!("{} (max residual {})", e.verdict, num(e.max_residual)),
            );
            if let Some(a) = &e.audit {
                line(
                    "  printed field",
                    format!("{} ({})", a.printed.verdict, num(a.printed.max_residual)),
                );
                line(
                    "  closed form",
                    format!("{} ({})", a.closed_form.verdict, num(a.closed_form.max_residual)),
                );
                line(
                    "  generated",
                    format!("{} ({})", a.generated.verdict, num(a.generated.max_residual)),
                );
                line("  discrepancy", a.discrepancy.to_string());
            }
        }
        for (i, f) in self.fields.iter().enumerate() {
            let params: Vec<String> = f.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            line(
                &format!("field {}", i + 1),
                format!("{} [{}]", f.verdict, params.join(", ")),
            );
            for (n, c) in f.frame.iter().enumerate() {
                line(&format!("  V{}", n + 1), c.clone());
            }
            for t in &f.tables {
                let (a, b) = (t.knots[0], t.knots[t.knots.len() - 1]);
                line(
                    &format!("  {}", t.name),
                    format!("Hermite table, {} knots on [{a}, {b}]", t.knots.len()),
                );
            }
            line("  max residual", num(f.max_residual));
        }
        if let Some(fl) = &self.flow {
            line("flow t / steps", format!("{} / {}", fl.t, fl.steps));
            line(
                "max isometry defect",
                format!("{} over {} points", num(fl.max_defect), fl.points),
            );
        }
        if let Some(t) = self.timing_ms {
            line("timing", format!("{t:.1} ms"));
        }
        s
    }
}
