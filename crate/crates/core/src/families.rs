//! Solved regimes of the Killing system and their closed-form families.
//!
//! [`classify`] decides, from the variable dependence of the `f_i` and the
//! constancy of the classifier function
//!
//! ```text
//! k = (f₁/f₂)² [ (f₁'/f₁)(f₂'/f₂) + (f₂'/f₂)' ]
//! ```
//!
//! which generator applies. Generators return [`FrameVectorField`]s built from
//! the closed-form solutions, with every primitive realised as an
//! [`Antiderivative`] node:
//!
//! | tag            | hypotheses                                 | dim |
//! |----------------|--------------------------------------------|-----|
//! | `TE1_I`        | f₁(x¹), f₂(x¹), f₃ = k₃                    | 2   |
//! | `TE1_II`       | as above with f₂ = k₂                      | 6   |
//! | `TE1_III`      | as above with k ≡ 0, f₂ nonconstant        | 4   |
//! | `TE1_IV`/`_V`  | as above with k constant, > 0 / < 0        | 4   |
//! | `SPLIT_X1X2K3` | f₁(x¹), f₂(x²), f₃ = k₃                    | 6   |
//! | `CONST_METRIC` | all f_i constant                           | 6   |
//! | `PR1_RESTRICTED` | all f_i of x¹; fields of x¹ only         | 2–3 |
//! | `PR2_RESTRICTED` | f_i of x^i; fields with V^i of x^i only  | 3   |
//! | `FRAME_FIELD_Ei` | E_i itself is Killing                    | 1   |
//!
//! Primitives are taken with base point 0 by default; the integration
//! constants they drop are absorbed by the free parameters.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::expr::{
    is_constant, Antiderivative, Axis, Constancy, ExprError, ScalarField, DEFAULT_CONSTANCY_SAMPLES,
    DEFAULT_CONSTANCY_TOL, DEFAULT_QUADRATURE_TOL,
};
use crate::killing::{self, FrameVectorField, KillingError, DEFAULT_GRID, DEFAULT_RESIDUAL_TOL};
use crate::metric::DiagonalMetric;

/// `|k|` below this counts as zero when choosing between the te1 cases.
pub const K_ZERO_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilyTag {
    Te1I,
    Te1II,
    Te1III,
    Te1IV,
    Te1V,
    SplitX1X2K3,
    ConstMetric,
    FrameField(Axis),
    Pr1Restricted,
    Pr2Restricted,
    None,
}

impl FamilyTag {
    pub const GENERATED: [FamilyTag; 12] = [
        FamilyTag::Te1I,
        FamilyTag::Te1II,
        FamilyTag::Te1III,
        FamilyTag::Te1IV,
        FamilyTag::Te1V,
        FamilyTag::SplitX1X2K3,
        FamilyTag::ConstMetric,
        FamilyTag::FrameField(Axis::X1),
        FamilyTag::FrameField(Axis::X2),
        FamilyTag::FrameField(Axis::X3),
        FamilyTag::Pr1Restricted,
        FamilyTag::Pr2Restricted,
    ];

    pub fn te1_case(self) -> Option<Te1Case> {
        match self {
            FamilyTag::Te1I => Some(Te1Case::I),
            FamilyTag::Te1II => Some(Te1Case::II),
            FamilyTag::Te1III => Some(Te1Case::III),
            FamilyTag::Te1IV => Some(Te1Case::IV),
            FamilyTag::Te1V => Some(Te1Case::V),
            _ => None,
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyTag::Te1I => "TE1_I",
            FamilyTag::Te1II => "TE1_II",
            FamilyTag::Te1III => "TE1_III",
            FamilyTag::Te1IV => "TE1_IV",
            FamilyTag::Te1V => "TE1_V",
            FamilyTag::SplitX1X2K3 => "SPLIT_X1X2K3",
            FamilyTag::ConstMetric => "CONST_METRIC",
            FamilyTag::FrameField(a) => return write!(f, "FRAME_FIELD_E{}", a.number()),
            FamilyTag::Pr1Restricted => "PR1_RESTRICTED",
            FamilyTag::Pr2Restricted => "PR2_RESTRICTED",
            FamilyTag::None => "NONE",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown family tag `{0}`")]
pub struct UnknownTag(pub String);

impl FromStr for FamilyTag {
    type Err = UnknownTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase().replace('-', "_");
        let tag = match upper.as_str() {
            "TE1_I" => FamilyTag::Te1I,
            "TE1_II" => FamilyTag::Te1II,
            "TE1_III" => FamilyTag::Te1III,
            "TE1_IV" => FamilyTag::Te1IV,
            "TE1_V" => FamilyTag::Te1V,
            "SPLIT_X1X2K3" | "SPLIT" => FamilyTag::SplitX1X2K3,
            "CONST_METRIC" | "CONST" => FamilyTag::ConstMetric,
            "FRAME_FIELD_E1" => FamilyTag::FrameField(Axis::X1),
            "FRAME_FIELD_E2" => FamilyTag::FrameField(Axis::X2),
            "FRAME_FIELD_E3" => FamilyTag::FrameField(Axis::X3),
            "PR1_RESTRICTED" | "PR1" => FamilyTag::Pr1Restricted,
            "PR2_RESTRICTED" | "PR2" => FamilyTag::Pr2Restricted,
            "NONE" => FamilyTag::None,
            _ => return Err(UnknownTag(s.to_string())),
        };
        Ok(tag)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Te1Case {
    I,
    II,
    III,
    IV,
    V,
}

impl Te1Case {
    pub fn tag(self) -> FamilyTag {
        match self {
            Te1Case::I => FamilyTag::Te1I,
            Te1Case::II => FamilyTag::Te1II,
            Te1Case::III => FamilyTag::Te1III,
            Te1Case::IV => FamilyTag::Te1IV,
            Te1Case::V => FamilyTag::Te1V,
        }
    }
}

/// Which of `E₁, E₂, E₃` are Killing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FrameFieldSet([bool; 3]);

impl FrameFieldSet {
    pub fn contains(&self, axis: Axis) -> bool {
        self.0[axis.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = Axis> + '_ {
        Axis::ALL.into_iter().filter(|a| self.contains(*a))
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Names such as `"E1"`.
    pub fn names(&self) -> Vec<String> {
        self.iter().map(|a| format!("E{}", a.number())).collect()
    }
}

impl fmt::Display for FrameFieldSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names().join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum FamilyError {
    #[error("{tag} does not apply to this metric: {reason}")]
    CaseNotApplicable { tag: FamilyTag, reason: String },
    #[error("{tag} takes {expected} parameters, got {got}")]
    ParamDimensionMismatch {
        tag: FamilyTag,
        expected: usize,
        got: usize,
    },
    #[error("{tag} has no parameter `{name}` (expected one of {expected:?})")]
    UnknownParameter {
        tag: FamilyTag,
        name: String,
        expected: Vec<&'static str>,
    },
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Killing(#[from] KillingError),
}

/// Classification result.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyDescriptor {
    pub tag: FamilyTag,
    /// Every family whose hypotheses hold, the primary tag included.
    pub applicable: Vec<FamilyTag>,
    /// Witness value of `k` when it was computed and found constant.
    pub k: Option<f64>,
    pub frame_fields: FrameFieldSet,
    /// Why the primary tag is `NONE`, when it is.
    pub reason: Option<String>,
    /// Dimension of the primary family.
    pub dimension: usize,
}

impl FamilyDescriptor {
    pub fn admits(&self, tag: FamilyTag) -> bool {
        self.applicable.contains(&tag)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifierConfig {
    pub samples: usize,
    pub tolerance: f64,
    /// Sampling interval for constancy tests; the metric's x¹ range if unset.
    pub interval: Option<(f64, f64)>,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            samples: DEFAULT_CONSTANCY_SAMPLES,
            tolerance: DEFAULT_CONSTANCY_TOL,
            interval: None,
        }
    }
}

impl ClassifierConfig {
    fn interval_for(&self, m: &DiagonalMetric, axis: Axis) -> (f64, f64) {
        self.interval.unwrap_or_else(|| m.domain().interval(axis))
    }
}

fn only(f: &ScalarField, axes: &[Axis]) -> bool {
    f.depends_only_on(axes)
}

/// The te1 hypotheses: `f₁ = f₁(x¹)`, `f₂ = f₂(x¹)`, `f₃` constant.
pub fn te1_hypotheses(m: &DiagonalMetric) -> bool {
    let [f1, f2, f3] = m.lames();
    only(f1, &[Axis::X1]) && only(f2, &[Axis::X1]) && f3.is_constant_expr()
}

/// `f₁ = f₁(x¹)`, `f₂ = f₂(x²)`, `f₃` constant.
pub fn split_hypotheses(m: &DiagonalMetric) -> bool {
    let [f1, f2, f3] = m.lames();
    only(f1, &[Axis::X1]) && only(f2, &[Axis::X2]) && f3.is_constant_expr()
}

/// All `f_i` depend on x¹ only.
pub fn pr1_hypotheses(m: &DiagonalMetric) -> bool {
    m.lames().iter().all(|f| only(f, &[Axis::X1]))
}

/// Each `f_i` depends on x^i only.
pub fn pr2_hypotheses(m: &DiagonalMetric) -> bool {
    Axis::ALL.iter().all(|&a| only(m.lame(a), &[a]))
}

/// `E_i` is Killing iff `f_i` depends on x^i only and the other two `f_j`
/// do not depend on x^i.
pub fn killing_frame_fields(m: &DiagonalMetric) -> FrameFieldSet {
    FrameFieldSet(Axis::ALL.map(|a| only(m.lame(a), &[a]) && a.others().iter().all(|&b| !m.lame(b).depends_on(a))))
}

/// The classifier function `k` of the te1 regime, as an expression in x¹.
pub fn k_expression(m: &DiagonalMetric) -> ScalarField {
    let [f1, f2, _] = m.lames();
    let d = |f: &ScalarField| f.diff(Axis::X1);
    let r2 = &d(f2) / f2;
    let bracket = (&d(f1) / f1) * &r2 + r2.diff(Axis::X1);
    (f1 / f2).powi(2) * bracket
}

fn family_dimension(m: &DiagonalMetric, tag: FamilyTag) -> usize {
    param_names(m, tag).len()
}

/// Parameter names of a family in canonical order.
pub fn param_names(m: &DiagonalMetric, tag: FamilyTag) -> Vec<&'static str> {
    const C: [&str; 6] = ["c1", "c2", "c3", "c4", "c5", "c6"];
    match tag {
        FamilyTag::Te1I => C[..2].to_vec(),
        FamilyTag::Te1II => C.to_vec(),
        FamilyTag::Te1III | FamilyTag::Te1IV | FamilyTag::Te1V => C[..4].to_vec(),
        FamilyTag::SplitX1X2K3 => vec!["a1", "a2", "b1", "b2", "b3", "c"],
        FamilyTag::ConstMetric => vec!["a1", "a2", "a3", "b1", "b2", "b3"],
        FamilyTag::Pr1Restricted => {
            if pr1_translation_allowed(m) {
                C[..3].to_vec()
            } else {
                C[1..3].to_vec()
            }
        }
        FamilyTag::Pr2Restricted => C[..3].to_vec(),
        FamilyTag::FrameField(_) => vec!["c"],
        FamilyTag::None => vec![],
    }
}

/// Under the pr1 hypotheses `V¹` may be a nonzero constant only when `f₂`
/// and `f₃` are constant.
fn pr1_translation_allowed(m: &DiagonalMetric) -> bool {
    m.lame(Axis::X2).is_constant_expr() && m.lame(Axis::X3).is_constant_expr()
}

pub fn classify(m: &DiagonalMetric) -> Result<FamilyDescriptor, FamilyError> {
    classify_with(m, &ClassifierConfig::default())
}

/// Decision tree: constant metric; te1 hypotheses (sub-cases by `f₂` and
/// `k`); split hypotheses; then the restricted regimes and single frame
/// fields; otherwise `NONE`.
pub fn classify_with(m: &DiagonalMetric, config: &ClassifierConfig) -> Result<FamilyDescriptor, FamilyError> {
    let frame_fields = killing_frame_fields(m);
    let mut applicable = BTreeSet::new();
    let mut k = None;
    let mut reason = None;

    let te1 = te1_hypotheses(m);
    let te1_tag = if te1 {
        applicable.insert(FamilyTag::Te1I);
        let kc = constancy(&k_expression(m), Axis::X1, config, m)?;
        if m.lame(Axis::X2).is_constant_expr() {
            k = Some(kc.mean);
            Some(FamilyTag::Te1II)
        } else if kc.constant {
            k = Some(kc.mean);
            Some(if kc.mean.abs() <= K_ZERO_THRESHOLD {
                FamilyTag::Te1III
            } else if kc.mean > 0.0 {
                FamilyTag::Te1IV
            } else {
                FamilyTag::Te1V
            })
        } else {
            reason = Some("k nonconstant".to_string());
            None
        }
    } else {
        None
    };
    applicable.extend(te1_tag);

    let split = split_hypotheses(m);
    if split {
        applicable.insert(FamilyTag::SplitX1X2K3);
    }
    let constant = m.is_constant();
    if constant {
        applicable.insert(FamilyTag::ConstMetric);
    }
    if pr1_hypotheses(m) {
        applicable.insert(FamilyTag::Pr1Restricted);
    }
    if pr2_hypotheses(m) {
        applicable.insert(FamilyTag::Pr2Restricted);
    }
    applicable.extend(frame_fields.iter().map(FamilyTag::FrameField));

    let tag = if constant {
        FamilyTag::ConstMetric
    } else if te1 {
        te1_tag.unwrap_or(FamilyTag::None)
    } else if split {
        FamilyTag::SplitX1X2K3
    } else if applicable.contains(&FamilyTag::Pr2Restricted) {
        FamilyTag::Pr2Restricted
    } else if applicable.contains(&FamilyTag::Pr1Restricted) {
        FamilyTag::Pr1Restricted
    } else if let Some(a) = frame_fields.iter().next() {
        FamilyTag::FrameField(a)
    } else {
        reason = Some("no solved regime applies".to_string());
        FamilyTag::None
    };

    let mut applicable: Vec<FamilyTag> = applicable.into_iter().collect();
    // primary tag first
    if let Some(pos) = applicable.iter().position(|t| *t == tag) {
        applicable.remove(pos);
        applicable.insert(0, tag);
    }
    Ok(FamilyDescriptor {
        tag,
        applicable,
        k,
        frame_fields,
        reason,
        dimension: family_dimension(m, tag),
    })
}

fn constancy(
    f: &ScalarField,
    axis: Axis,
    config: &ClassifierConfig,
    m: &DiagonalMetric,
) -> Result<Constancy, ExprError> {
    is_constant(f, axis, config.interval_for(m, axis), config.samples, config.tolerance)
}

/// Free parameters of a family, positional or by name.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilyParams {
    /// Values in the family's canonical order; the count must match.
    Positional(Vec<f64>),
    /// Named values; unnamed parameters are zero.
    Named(Vec<(String, f64)>),
}

impl FamilyParams {
    pub fn positional(values: impl Into<Vec<f64>>) -> Self {
        FamilyParams::Positional(values.into())
    }

    pub fn named<S: Into<String>>(pairs: impl IntoIterator<Item = (S, f64)>) -> Self {
        FamilyParams::Named(pairs.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    fn resolve(&self, tag: FamilyTag, names: &[&'static str]) -> Result<Vec<f64>, FamilyError> {
        match self {
            FamilyParams::Positional(v) => {
                if v.len() != names.len() {
                    return Err(FamilyError::ParamDimensionMismatch {
                        tag,
                        expected: names.len(),
                        got: v.len(),
                    });
                }
                Ok(v.clone())
            }
            FamilyParams::Named(pairs) => {
                let mut out = vec![0.0; names.len()];
                for (name, value) in pairs {
                    let i = names
                        .iter()
                        .position(|n| n == name)
                        .ok_or_else(|| FamilyError::UnknownParameter {
                            tag,
                            name: name.clone(),
                            expected: names.to_vec(),
                        })?;
                    out[i] = *value;
                }
                Ok(out)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorConfig {
    /// Base point of every primitive.
    pub base_point: f64,
    pub quadrature_tol: f64,
    pub classifier: ClassifierConfig,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            base_point: 0.0,
            quadrature_tol: DEFAULT_QUADRATURE_TOL,
            classifier: ClassifierConfig::default(),
        }
    }
}

/// Generator bound to one metric. Primitives are built on first use and
/// shared by every generated field, so their quadrature caches are too.
pub struct FamilyGenerator<'m> {
    metric: &'m DiagonalMetric,
    descriptor: FamilyDescriptor,
    config: GeneratorConfig,
    // F' = 1/f₁, F₀' = -f₂²/f₁, F₂' = 1/f₂ (in x²)
    f: OnceLock<Result<ScalarField, ExprError>>,
    f0: OnceLock<Result<ScalarField, ExprError>>,
    f2: OnceLock<Result<ScalarField, ExprError>>,
}

impl<'m> FamilyGenerator<'m> {
    pub fn new(metric: &'m DiagonalMetric) -> Result<Self, FamilyError> {
        FamilyGenerator::with_config(metric, GeneratorConfig::default())
    }

    pub fn with_config(metric: &'m DiagonalMetric, config: GeneratorConfig) -> Result<Self, FamilyError> {
        let descriptor = classify_with(metric, &config.classifier)?;
        Ok(FamilyGenerator {
            metric,
            descriptor,
            config,
            f: OnceLock::new(),
            f0: OnceLock::new(),
            f2: OnceLock::new(),
        })
    }

    pub fn descriptor(&self) -> &FamilyDescriptor {
        &self.descriptor
    }

    pub fn metric(&self) -> &DiagonalMetric {
        self.metric
    }

    pub fn param_names(&self, tag: FamilyTag) -> Vec<&'static str> {
        param_names(self.metric, tag)
    }

    fn primitive(&self, integrand: ScalarField, axis: Axis) -> Result<ScalarField, ExprError> {
        let prim = Antiderivative::new(
            integrand.folded(),
            axis,
            self.config.base_point,
            self.config.quadrature_tol,
        )?;
        Ok(ScalarField::primitive(Arc::new(prim), ScalarField::var(axis)))
    }

    fn cached(
        &self,
        slot: &OnceLock<Result<ScalarField, ExprError>>,
        build: impl FnOnce() -> Result<ScalarField, ExprError>,
    ) -> Result<ScalarField, FamilyError> {
        slot.get_or_init(build).clone().map_err(FamilyError::from)
    }

    /// `F` with `F' = 1/f₁` (also `F₁` of the split family).
    fn big_f(&self) -> Result<ScalarField, FamilyError> {
        self.cached(&self.f, || {
            self.primitive(self.metric.lame(Axis::X1).clone().recip(), Axis::X1)
        })
    }

    /// `F₀` with `F₀' = -f₂²/f₁`.
    fn big_f0(&self) -> Result<ScalarField, FamilyError> {
        self.cached(&self.f0, || {
            let [f1, f2, _] = self.metric.lames();
            self.primitive(-(f2.clone().powi(2) / f1), Axis::X1)
        })
    }

    /// `F₂` with `F₂' = 1/f₂` in x².
    fn big_f2(&self) -> Result<ScalarField, FamilyError> {
        self.cached(&self.f2, || {
            self.primitive(self.metric.lame(Axis::X2).clone().recip(), Axis::X2)
        })
    }

    fn require(&self, tag: FamilyTag) -> Result<(), FamilyError> {
        if self.descriptor.admits(tag) {
            return Ok(());
        }
        let reason = match tag {
            FamilyTag::Te1I | FamilyTag::Te1II | FamilyTag::Te1III | FamilyTag::Te1IV | FamilyTag::Te1V
                if !te1_hypotheses(self.metric) =>
            {
                "needs f1, f2 functions of x1 only and f3 constant".to_string()
            }
            FamilyTag::Te1I => "needs f1, f2 functions of x1 only and f3 constant".to_string(),
            FamilyTag::Te1II => "needs f2 constant".to_string(),
            FamilyTag::Te1III | FamilyTag::Te1IV | FamilyTag::Te1V => match self.descriptor.k {
                Some(k) => format!("classifier selected k = {k}"),
                None => "k nonconstant".to_string(),
            },
            FamilyTag::SplitX1X2K3 => "needs f1 = f1(x1), f2 = f2(x2), f3 constant".to_string(),
            FamilyTag::ConstMetric => "needs all f_i constant".to_string(),
            FamilyTag::Pr1Restricted => "needs all f_i functions of x1 only".to_string(),
            FamilyTag::Pr2Restricted => "needs each f_i a function of x^i only".to_string(),
            FamilyTag::FrameField(a) => format!("E{} is not Killing", a.number()),
            FamilyTag::None => "NONE has no family".to_string(),
        };
        Err(FamilyError::CaseNotApplicable { tag, reason })
    }

    fn constant_of(&self, axis: Axis) -> f64 {
        self.metric
            .lame(axis)
            .as_constant()
            .expect("hypotheses guarantee a constant coefficient")
    }

    pub fn generate(&self, tag: FamilyTag, params: &FamilyParams) -> Result<FrameVectorField, FamilyError> {
        self.require(tag)?;
        let names = self.param_names(tag);
        let c = params.resolve(tag, &names)?;
        self.build(tag, &c)
    }

    /// One field per unit parameter vector, in canonical parameter order.
    pub fn basis(&self, tag: FamilyTag) -> Result<Vec<FrameVectorField>, FamilyError> {
        self.require(tag)?;
        let n = self.param_names(tag).len();
        (0..n)
            .map(|i| {
                let mut c = vec![0.0; n];
                c[i] = 1.0;
                self.build(tag, &c)
            })
            .collect()
    }

    fn build(&self, tag: FamilyTag, c: &[f64]) -> Result<FrameVectorField, FamilyError> {
        let x = ScalarField::var;
        let k = |v: f64| ScalarField::constant(v);
        let [_, f2, f3] = self.metric.lames();
        let v = match tag {
            FamilyTag::Te1I => [ScalarField::zero(), c[0] / f2.clone(), k(c[1])],
            FamilyTag::Te1II => {
                let (k2, k3) = (self.constant_of(Axis::X2), self.constant_of(Axis::X3));
                let f = self.big_f()?;
                [
                    c[0] * x(Axis::X2) + c[1] * x(Axis::X3) + c[2],
                    (-c[0] * k2) * f.clone() - (c[3] * k2) * x(Axis::X3) + c[4],
                    (-c[1] * k3) * f + (c[3] * k3) * x(Axis::X2) + c[5],
                ]
            }
            FamilyTag::Te1III | FamilyTag::Te1IV | FamilyTag::Te1V => {
                let a = self.amplitude();
                let f0 = self.big_f0()?;
                let x2 = x(Axis::X2);
                let (v1, g) = match tag {
                    FamilyTag::Te1III => (
                        c[0] * x2.clone() + c[1],
                        (0.5 * c[0]) * x2.clone().powi(2) + c[1] * x2 + c[2],
                    ),
                    FamilyTag::Te1IV => {
                        let s = self.k_witness().sqrt();
                        let (cs, sn) = ((s * x2.clone()).cos(), (s * x2).sin());
                        (
                            c[0] * cs.clone() + c[1] * sn.clone(),
                            (c[0] / s) * sn - (c[1] / s) * cs + c[2],
                        )
                    }
                    _ => {
                        let s = (-self.k_witness()).sqrt();
                        let (ep, em) = ((s * x2.clone()).exp(), (-s * x2).exp());
                        (
                            c[0] * ep.clone() + c[1] * em.clone(),
                            (c[0] / s) * ep - (c[1] / s) * em + c[2],
                        )
                    }
                };
                // (iii) pairs c₁ with F₀; (iv)/(v) pair c₃ k with it
                let f0_coeff = if tag == FamilyTag::Te1III {
                    c[0]
                } else {
                    c[2] * self.k_witness()
                };
                let v2 = a * g + (f0_coeff * f0 + c[3]) / f2;
                [v1, v2, k(c[2])]
            }
            FamilyTag::SplitX1X2K3 => {
                let k3 = self.constant_of(Axis::X3);
                let (big_f1, big_f2) = (self.big_f()?, self.big_f2()?);
                let [a1, a2, b1, b2, b3, cc] = [c[0], c[1], c[2], c[3], c[4], c[5]];
                [
                    -cc * big_f2.clone() + a1 * x(Axis::X3) + a2,
                    cc * big_f1.clone() + b1 * x(Axis::X3) + b2,
                    (-a1 * k3) * big_f1 - (b1 * k3) * big_f2 + b3,
                ]
            }
            FamilyTag::ConstMetric => {
                let [k1, k2, k3] = Axis::ALL.map(|a| self.constant_of(a));
                let [a1, a2, a3, b1, b2, b3] = [c[0], c[1], c[2], c[3], c[4], c[5]];
                [
                    (-a1 / k2) * x(Axis::X2) + (a2 / k3) * x(Axis::X3) + b1,
                    (a1 / k1) * x(Axis::X1) - (a3 / k3) * x(Axis::X3) + b2,
                    (-a2 / k1) * x(Axis::X1) + (a3 / k2) * x(Axis::X2) + b3,
                ]
            }
            FamilyTag::Pr1Restricted => {
                let (v1, rest) = if c.len() == 3 {
                    (k(c[0]), &c[1..])
                } else {
                    (ScalarField::zero(), c)
                };
                [v1, rest[0] / f2.clone(), rest[1] / f3.clone()]
            }
            FamilyTag::Pr2Restricted => [k(c[0]), k(c[1]), k(c[2])],
            FamilyTag::FrameField(a) => {
                let mut v = [ScalarField::zero(), ScalarField::zero(), ScalarField::zero()];
                v[a.index()] = k(c[0]);
                v
            }
            FamilyTag::None => unreachable!("require rejects NONE"),
        };
        Ok(FrameVectorField::new(v))
    }

    /// `A = f₁ f₂' / f₂²`.
    fn amplitude(&self) -> ScalarField {
        let [f1, f2, _] = self.metric.lames();
        f1 * f2.diff(Axis::X1) / f2.clone().powi(2)
    }

    fn k_witness(&self) -> f64 {
        self.descriptor
            .k
            .expect("te1 (iii)-(v) are only admitted with a constant k")
    }
}

/// te1 case `case` with the default configuration.
pub fn generate_te1(m: &DiagonalMetric, case: Te1Case, params: &FamilyParams) -> Result<FrameVectorField, FamilyError> {
    FamilyGenerator::new(m)?.generate(case.tag(), params)
}

pub fn generate_split(m: &DiagonalMetric, params: &FamilyParams) -> Result<FrameVectorField, FamilyError> {
    FamilyGenerator::new(m)?.generate(FamilyTag::SplitX1X2K3, params)
}

pub fn generate_const_metric(m: &DiagonalMetric, params: &FamilyParams) -> Result<FrameVectorField, FamilyError> {
    FamilyGenerator::new(m)?.generate(FamilyTag::ConstMetric, params)
}

pub fn generate(m: &DiagonalMetric, tag: FamilyTag, params: &FamilyParams) -> Result<FrameVectorField, FamilyError> {
    FamilyGenerator::new(m)?.generate(tag, params)
}

/// Whether `v` is one of the solutions under the restricted-dependence
/// hypotheses:
///
/// - all `f_i`, `V^i` functions of x¹: `V¹ = c₁` (nonzero only with `f₂, f₃`
///   constant), `V² = c₂/f₂`, `V³ = c₃/f₃`;
/// - `f_i`, `V^i` functions of x^i: all `V^i` constant.
///
/// Checks the residual on the default grid and the structural form by
/// constancy tests.
pub fn restricted_family_check(m: &DiagonalMetric, v: &FrameVectorField) -> Result<bool, FamilyError> {
    restricted_family_check_with(m, v, &ClassifierConfig::default())
}

pub fn restricted_family_check_with(
    m: &DiagonalMetric,
    v: &FrameVectorField,
    config: &ClassifierConfig,
) -> Result<bool, FamilyError> {
    let fields_of_x1 = v.components().iter().all(|c| only(c, &[Axis::X1]));
    let fields_of_own = Axis::ALL.iter().all(|&a| only(v.component(a), &[a]));
    let pr1 = pr1_hypotheses(m) && fields_of_x1;
    let pr2 = pr2_hypotheses(m) && fields_of_own;
    if !pr1 && !pr2 {
        return Err(FamilyError::HypothesisViolation(
            "needs f_i and V^i all functions of x1, or each f_i and V^i a function of x^i".to_string(),
        ));
    }
    if !killing::is_killing(m, v, DEFAULT_GRID, DEFAULT_RESIDUAL_TOL)? {
        return Ok(false);
    }
    let constant = |f: &ScalarField, a: Axis| -> Result<bool, ExprError> { Ok(constancy(f, a, config, m)?.constant) };
    if pr2 {
        for a in Axis::ALL {
            if !constant(v.component(a), a)? {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    let v1 = constancy(v.component(Axis::X1), Axis::X1, config, m)?;
    if !v1.constant {
        return Ok(false);
    }
    if v1.mean.abs() > config.tolerance && !pr1_translation_allowed(m) {
        return Ok(false);
    }
    for a in [Axis::X2, Axis::X3] {
        if !constant(&(m.lame(a) * v.component(a)), Axis::X1)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Constancy of the two functions of condition (B) for a te1 pair:
/// `h = (f₁/f₂)(f₁f₂'/f₂²)' + (f₁f₂'/f₂²)²` and `l = f₁ (f₁f₂'/f₂³)'`.
/// With `f₁ = f₂ = f` these are `f''/f` and `f''/f - 2(f'/f)²`, and both are
/// constant only for `f = k₀ e^{λt}`, `λ = √((h - l)/2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchB {
    pub h: Constancy,
    pub l: Constancy,
}

impl BranchB {
    pub fn holds(&self) -> bool {
        self.h.constant && self.l.constant
    }

    /// `|λ|` of the exponential profile when both functions are constant.
    pub fn exponential_rate(&self) -> Option<f64> {
        self.holds()
            .then(|| (0.5 * (self.h.mean - self.l.mean)).max(0.0).sqrt())
    }
}

pub fn branch_b(m: &DiagonalMetric, config: &ClassifierConfig) -> Result<BranchB, FamilyError> {
    if !te1_hypotheses(m) {
        return Err(FamilyError::HypothesisViolation(
            "branch B needs f1, f2 functions of x1 only and f3 constant".to_string(),
        ));
    }
    let [f1, f2, _] = m.lames();
    let d = |f: &ScalarField| f.diff(Axis::X1);
    let a = f1 * d(f2) / f2.clone().powi(2);
    let h = (f1 / f2) * d(&a) + a.clone().powi(2);
    let l = f1 * d(&(f1 * d(f2) / f2.clone().powi(3)));
    Ok(BranchB {
        h: constancy(&h, Axis::X1, config, m)?,
        l: constancy(&l, Axis::X1, config, m)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::killing::max_residual_grid;
    use crate::metric::DomainBox;

    fn metric(f1: &str, f2: &str, f3: &str) -> DiagonalMetric {
        DiagonalMetric::from_strs(f1, f2, f3, DomainBox::default()).unwrap()
    }

    #[test]
    fn tags_round_trip_through_text() {
        for tag in FamilyTag::GENERATED.into_iter().chain([FamilyTag::None]) {
            assert_eq!(tag.to_string().parse::<FamilyTag>().unwrap(), tag);
        }
        assert!("TE1_VI".parse::<FamilyTag>().is_err());
    }

    #[test]
    fn k_constant_for_equal_exponentials() {
        let m = metric("exp(x1)", "exp(x1)", "1");
        let d = classify(&m).unwrap();
        assert_eq!(d.tag, FamilyTag::Te1IV);
        assert!((d.k.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(d.dimension, 4);
        assert!(d.admits(FamilyTag::Te1I));
    }

    #[test]
    fn k_nonconstant_reported() {
        let d = classify(&metric("exp(2*x1)", "exp(x1)", "1")).unwrap();
        assert_eq!(d.tag, FamilyTag::None);
        assert_eq!(d.reason.as_deref(), Some("k nonconstant"));
        assert!(d.admits(FamilyTag::Te1I));
    }

    #[test]
    fn k_zero_branch() {
        let d = classify(&metric("1", "exp(x1)", "1")).unwrap();
        assert_eq!(d.tag, FamilyTag::Te1III);
        assert!(d.k.unwrap().abs() < 1e-12);
    }

    #[test]
    fn constant_and_split() {
        let d = classify(&metric("1", "2", "3")).unwrap();
        assert_eq!(d.tag, FamilyTag::ConstMetric);
        assert_eq!(d.dimension, 6);
        assert_eq!(d.frame_fields.len(), 3);
        let d = classify(&metric("exp(x1)", "exp(x2)", "1")).unwrap();
        assert_eq!(d.tag, FamilyTag::SplitX1X2K3);
    }

    #[test]
    fn first_example_frame_fields() {
        let m = metric("exp(x1)", "exp(-(x2+x3)/2)", "exp(-(x2*x3)/2)");
        let d = classify(&m).unwrap();
        assert_eq!(d.frame_fields.names(), ["E1"]);
        assert_eq!(d.tag, FamilyTag::FrameField(Axis::X1));
        let fs = killing_frame_fields(&metric("exp(x2)", "1", "1"));
        assert!(!fs.contains(Axis::X1));
        assert!(fs.contains(Axis::X3));
    }

    #[test]
    fn te1_case_i_shape() {
        let m = metric("2 + x1", "exp(x1)", "1");
        let v = generate_te1(&m, Te1Case::I, &FamilyParams::positional([1.0, 0.0])).unwrap();
        assert!(v.component(Axis::X1).is_zero());
        assert!(v.component(Axis::X3).is_zero());
        assert!((v.component(Axis::X2).eval([0.5, 0.0, 0.0]).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn te1_case_ii_flat_rotation() {
        let m = metric("1", "1", "1");
        let v = generate_te1(&m, Te1Case::II, &FamilyParams::named([("c1", 1.0)])).unwrap();
        let p = [0.3, -0.6, 0.2];
        let got = v.eval(p).unwrap();
        assert!((got[0] - p[1]).abs() < 1e-12 && (got[1] + p[0]).abs() < 1e-12 && got[2] == 0.0);
        assert!(max_residual_grid(&m, &v, DEFAULT_GRID).unwrap().max_abs <= 1e-12);
    }

    #[test]
    fn te1_case_iv_equal_exponentials() {
        let m = metric("exp(x1)", "exp(x1)", "1");
        let v = generate_te1(&m, Te1Case::IV, &FamilyParams::positional([1.0, 0.0, 0.0, 0.0])).unwrap();
        let p = [0.4, 0.7, -0.1];
        let got = v.eval(p).unwrap();
        assert!((got[0] - 0.7f64.cos()).abs() < 1e-12);
        assert!((got[1] - 0.7f64.sin()).abs() < 1e-12);
        assert!(max_residual_grid(&m, &v, DEFAULT_GRID).unwrap().max_abs <= 1e-7);
    }

    #[test]
    fn wrong_case_and_params_rejected() {
        let m = metric("exp(x1)", "exp(x1)", "1");
        let err = generate_te1(&m, Te1Case::V, &FamilyParams::positional([0.0; 4])).unwrap_err();
        assert!(matches!(
            err,
            FamilyError::CaseNotApplicable {
                tag: FamilyTag::Te1V,
                ..
            }
        ));
        let err = generate_te1(&m, Te1Case::IV, &FamilyParams::positional([0.0; 3])).unwrap_err();
        assert_eq!(
            err,
            FamilyError::ParamDimensionMismatch {
                tag: FamilyTag::Te1IV,
                expected: 4,
                got: 3
            }
        );
        let err = generate_te1(&m, Te1Case::IV, &FamilyParams::named([("c9", 1.0)])).unwrap_err();
        assert!(matches!(err, FamilyError::UnknownParameter { .. }));
        let err = generate_split(&m, &FamilyParams::positional([0.0; 6])).unwrap_err();
        assert!(matches!(err, FamilyError::CaseNotApplicable { .. }));
    }

    #[test]
    fn split_rotation_on_euclidean_space() {
        let m = metric("1", "1", "1");
        let v = generate_split(&m, &FamilyParams::named([("c", 1.0)])).unwrap();
        let got = v.eval([0.25, 0.5, 0.0]).unwrap();
        assert!((got[0] + 0.5).abs() < 1e-12 && (got[1] - 0.25).abs() < 1e-12);
        let zero = generate_split(&m, &FamilyParams::positional([0.0; 6])).unwrap();
        assert!(zero.is_zero());
    }

    #[test]
    fn const_metric_rotation() {
        let m = metric("1", "1", "1");
        let v = generate_const_metric(&m, &FamilyParams::named([("a1", 1.0)])).unwrap();
        assert_eq!(v, FrameVectorField::from_strs("-x2", "x1", "0").unwrap());
    }

    #[test]
    fn restricted_examples() {
        let m = metric("exp(-x1/2)", "exp(-x1)", "exp(-3*x1/2)");
        let ok = m.coordinate_to_frame(&[ScalarField::zero(), ScalarField::one(), ScalarField::one()]);
        assert!(restricted_family_check(&m, &ok).unwrap());
        let m = metric("exp(x1)", "exp(x2)", "exp(x3)");
        let ok = FrameVectorField::from_strs("1", "1", "1").unwrap();
        assert!(restricted_family_check(&m, &ok).unwrap());
        let bad = FrameVectorField::from_strs("x1", "1", "1").unwrap();
        assert!(!restricted_family_check(&m, &bad).unwrap());
        let off = FrameVectorField::from_strs("x2", "0", "0").unwrap();
        assert!(matches!(
            restricted_family_check(&m, &off),
            Err(FamilyError::HypothesisViolation(_))
        ));
    }

    #[test]
    fn branch_b_detects_exponential_profile() {
        let cfg = ClassifierConfig::default();
        let b = branch_b(&metric("2*exp(0.7*x1)", "2*exp(0.7*x1)", "1"), &cfg).unwrap();
        assert!(b.holds());
        assert!((b.exponential_rate().unwrap() - 0.7).abs() < 1e-8);
        let b = branch_b(&metric("1 + x1^2/10", "1 + x1^2/10", "1"), &cfg).unwrap();
        assert!(!b.holds());
    }
}
