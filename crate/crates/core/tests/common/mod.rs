//! Random metrics and fields shared by the integration tests.
#![allow(dead_code)]

use diagkill::metric::{DiagonalMetric, DomainBox};
use diagkill::{FrameVectorField, Point};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn coef<R: Rng>(rng: &mut R) -> String {
    format!("{:.3}", rng.gen_range(-1.0..1.0))
}

fn var<R: Rng>(rng: &mut R) -> &'static str {
    ["x1", "x2", "x3"][rng.gen_range(0..3)]
}

/// A smooth term in up to two variables.
pub fn random_term<R: Rng>(rng: &mut R) -> String {
    let (a, b) = (coef(rng), coef(rng));
    let (u, v) = (var(rng), var(rng));
    match rng.gen_range(0..5) {
        0 => format!("{a}*{u}"),
        1 => format!("{a}*{u}*{v}"),
        2 => format!("{a}*sin({b}*{u} + {v})"),
        3 => format!("{a}*exp({b}*{u})"),
        _ => format!("{a}*cos({u})*{v}^2"),
    }
}

pub fn random_expr<R: Rng>(rng: &mut R) -> String {
    let n = rng.gen_range(1..=3);
    let terms: Vec<String> = (0..n).map(|_| random_term(rng)).collect();
    terms.join(" + ")
}

/// `f_i = c·exp(p_i)` with `p_i` a random smooth expression: positive everywhere.
pub fn random_metric<R: Rng>(rng: &mut R) -> DiagonalMetric {
    let f = |rng: &mut R| format!("{:.3}*exp(0.5*({}))", rng.gen_range(0.5..2.0), random_expr(rng));
    let (a, b, c) = (f(rng), f(rng), f(rng));
    DiagonalMetric::from_strs(&a, &b, &c, DomainBox::default()).expect("positive metric")
}

pub fn random_field<R: Rng>(rng: &mut R) -> FrameVectorField {
    let (a, b, c) = (random_expr(rng), random_expr(rng), random_expr(rng));
    FrameVectorField::from_strs(&a, &b, &c).expect("valid field")
}

pub fn random_point<R: Rng>(rng: &mut R, half: f64) -> Point {
    [
        rng.gen_range(-half..half),
        rng.gen_range(-half..half),
        rng.gen_range(-half..half),
    ]
}

pub fn params<R: Rng>(rng: &mut R, n: usize, range: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-range..range)).collect()
}

/// Largest |V^i - W^i| over the points.
pub fn max_diff(v: &FrameVectorField, w: &FrameVectorField, points: &[Point]) -> f64 {
    let mut worst = 0.0f64;
    for &p in points {
        let (a, b) = (v.eval(p).unwrap(), w.eval(p).unwrap());
        for i in 0..3 {
            worst = worst.max((a[i] - b[i]).abs());
        }
    }
    worst
}

/// Relative to the magnitude of the reference entries.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// A metric admitting `tag`, with the box it is sampled on.
pub fn metric_for(tag: diagkill::FamilyTag) -> DiagonalMetric {
    use diagkill::FamilyTag as T;
    let (f, half) = match tag {
        T::Te1I => (["1 + x1^2/4", "exp(x1/2)", "1.5"], 2.0),
        T::Te1II => (["1 + x1^2/4", "2", "1.5"], 2.0),
        T::Te1III => (["1", "exp(x1)", "1"], 2.0),
        T::Te1IV => (["exp(x1)", "exp(x1)", "1"], 2.0),
        // k ≡ -1: f₂ = a e^{-x¹} forces f₁² = C - a² e^{-2x¹}; small a keeps
        // f₁ ≤ 1, so flows stay in the box
        T::Te1V => (["sqrt(1 - 0.01*exp(-2*x1))", "0.1*exp(-x1)", "1"], 2.0),
        T::SplitX1X2K3 => (["1 + x1^2/4", "exp(x2/2)", "2"], 2.0),
        T::ConstMetric => (["1", "2", "3"], 2.0),
        T::Pr1Restricted => (["exp(-x1/2)", "exp(-x1)", "exp(-3*x1/2)"], 1.0),
        T::Pr2Restricted => (["exp(x1)", "exp(x2)", "exp(x3)"], 1.0),
        other => panic!("no test metric for {other}"),
    };
    DiagonalMetric::from_strs(f[0], f[1], f[2], DomainBox::cube(-half, half).unwrap()).unwrap()
}

pub const SOUND_FAMILIES: [diagkill::FamilyTag; 7] = [
    diagkill::FamilyTag::Te1I,
    diagkill::FamilyTag::Te1II,
    diagkill::FamilyTag::Te1III,
    diagkill::FamilyTag::Te1IV,
    diagkill::FamilyTag::Te1V,
    diagkill::FamilyTag::SplitX1X2K3,
    diagkill::FamilyTag::ConstMetric,
];

/// Fields evaluated at `points`, one column per field.
pub fn sample_matrix(fields: &[FrameVectorField], points: &[Point]) -> nalgebra::DMatrix<f64> {
    let mut a = nalgebra::DMatrix::zeros(3 * points.len(), fields.len());
    for (j, f) in fields.iter().enumerate() {
        for (n, &p) in points.iter().enumerate() {
            let v = f.eval(p).unwrap();
            for i in 0..3 {
                a[(3 * n + i, j)] = v[i];
            }
        }
    }
    a
}

/// Least-squares residual of `target` against the span of `basis`.
pub fn span_residual(basis: &[FrameVectorField], target: &FrameVectorField, points: &[Point]) -> f64 {
    let a = sample_matrix(basis, points);
    let b = sample_matrix(std::slice::from_ref(target), points);
    let x = a.clone().svd(true, true).solve(&b, 1e-12).unwrap();
    (a * x - b).amax()
}

pub fn rank(fields: &[FrameVectorField], points: &[Point]) -> usize {
    sample_matrix(fields, points).rank(1e-9)
}
