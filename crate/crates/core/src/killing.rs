//! The Killing equations of a diagonal metric in its orthonormal frame.
//!
//! For `V = Σ V^k E_k` the six numbers
//!
//! ```text
//! r_ii = E_i(V^i) + Σ_k V^k ⟨∇_{E_i} E_k, E_i⟩                 (= ½ (£_V g)(E_i, E_i))
//! r_ij = E_i(V^j) + E_j(V^i) + Σ_k V^k (⟨∇_{E_i} E_k, E_j⟩ + ⟨∇_{E_j} E_k, E_i⟩)
//! ```
//!
//! vanish identically iff `V` is Killing. They are always reported in the
//! order `(11, 22, 33, 12, 23, 31)`.
//!
//! [`residual_coordinate_oracle`] computes the same numbers without the
//! connection, from the coordinate formula for `£_V g`; the two paths agreeing
//! is the main consistency check of the crate.

use thiserror::Error;

use crate::expr::{self, Axis, EvalError, ParseError, Point, ScalarField};
use crate::metric::DiagonalMetric;

pub const DEFAULT_GRID: [usize; 3] = [5, 5, 5];
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-7;

/// Index pairs of the residual entries, in reporting order.
pub const ENTRY_ORDER: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (2, 0)];
pub const ENTRY_NAMES: [&str; 6] = ["r11", "r22", "r33", "r12", "r23", "r31"];

#[derive(Clone, Debug, PartialEq, Error)]
pub enum KillingError {
    #[error("evaluation failed at {point:?}: {source}")]
    Eval { point: Point, source: EvalError },
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("grid counts must be at least 1, got {0:?}")]
    InvalidGrid([usize; 3]),
}

/// A vector field by its components in the orthonormal frame `E_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameVectorField {
    v: [ScalarField; 3],
}

impl FrameVectorField {
    pub fn new(components: [ScalarField; 3]) -> Self {
        FrameVectorField {
            v: components.map(|c| c.folded()),
        }
    }

    pub fn from_strs(v1: &str, v2: &str, v3: &str) -> Result<Self, ParseError> {
        Ok(FrameVectorField::new([
            expr::parse(v1)?,
            expr::parse(v2)?,
            expr::parse(v3)?,
        ]))
    }

    pub fn zero() -> Self {
        FrameVectorField {
            v: [ScalarField::zero(), ScalarField::zero(), ScalarField::zero()],
        }
    }

    /// The frame field `E_i` itself.
    pub fn unit(axis: Axis) -> Self {
        let mut v = FrameVectorField::zero();
        v.v[axis.index()] = ScalarField::one();
        v
    }

    pub fn components(&self) -> &[ScalarField; 3] {
        &self.v
    }

    pub fn component(&self, axis: Axis) -> &ScalarField {
        &self.v[axis.index()]
    }

    pub fn scale(&self, c: f64) -> Self {
        FrameVectorField {
            v: std::array::from_fn(|k| &self.v[k] * c),
        }
    }

    pub fn add(&self, other: &FrameVectorField) -> Self {
        FrameVectorField {
            v: std::array::from_fn(|k| &self.v[k] + &other.v[k]),
        }
    }

    pub fn sub(&self, other: &FrameVectorField) -> Self {
        FrameVectorField {
            v: std::array::from_fn(|k| &self.v[k] - &other.v[k]),
        }
    }

    /// `Σ c_n X_n`.
    pub fn linear_combination<'a>(terms: impl IntoIterator<Item = (f64, &'a FrameVectorField)>) -> Self {
        terms
            .into_iter()
            .fold(FrameVectorField::zero(), |acc, (c, x)| acc.add(&x.scale(c)))
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().all(ScalarField::is_zero)
    }

    pub fn eval(&self, p: Point) -> Result<[f64; 3], EvalError> {
        Ok([self.v[0].eval(p)?, self.v[1].eval(p)?, self.v[2].eval(p)?])
    }
}

/// Left-hand sides of the Killing system at one point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KillingResidual {
    pub r11: f64,
    pub r22: f64,
    pub r33: f64,
    pub r12: f64,
    pub r23: f64,
    pub r31: f64,
}

impl KillingResidual {
    pub fn from_array(r: [f64; 6]) -> Self {
        KillingResidual {
            r11: r[0],
            r22: r[1],
            r33: r[2],
            r12: r[3],
            r23: r[4],
            r31: r[5],
        }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.r11, self.r22, self.r33, self.r12, self.r23, self.r31]
    }

    pub fn max_abs(&self) -> f64 {
        self.as_array().iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// Largest entrywise difference.
    pub fn gap(&self, other: &KillingResidual) -> f64 {
        let (a, b) = (self.as_array(), other.as_array());
        (0..6).fold(0.0, |m, i| m.max((a[i] - b[i]).abs()))
    }
}

/// Which of the two residual computations to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Oracle {
    Frame,
    Coordinate,
}

/// Residual expressions of one field, built once and evaluated pointwise.
#[derive(Clone, Debug)]
pub struct FrameResidual {
    exprs: [ScalarField; 6],
}

impl FrameResidual {
    pub fn new(m: &DiagonalMetric, v: &FrameVectorField) -> Self {
        let conn = m.connection();
        let e = |i: usize, h: &ScalarField| m.lames()[i].clone() * h.diff(Axis::ALL[i]);
        // ⟨∇_{E_i} E_k, E_j⟩
        let gamma = |i: usize, k: usize, j: usize| conn.coeff(Axis::ALL[i], Axis::ALL[k], Axis::ALL[j]);
        let exprs = ENTRY_ORDER.map(|(i, j)| {
            if i == j {
                (0..3).fold(e(i, &v.v[i]), |acc, k| acc + &v.v[k] * gamma(i, k, i))
            } else {
                (0..3).fold(e(i, &v.v[j]) + e(j, &v.v[i]), |acc, k| {
                    acc + &v.v[k] * (gamma(i, k, j) + gamma(j, k, i))
                })
            }
        });
        FrameResidual { exprs }
    }

    pub fn exprs(&self) -> &[ScalarField; 6] {
        &self.exprs
    }

    pub fn eval(&self, p: Point) -> Result<KillingResidual, EvalError> {
        let mut r = [0.0; 6];
        for (slot, e) in r.iter_mut().zip(&self.exprs) {
            *slot = e.eval(p)?;
        }
        Ok(KillingResidual::from_array(r))
    }
}

/// `(£_V g)(∂_i, ∂_j) = W^k ∂_k g_ij + g_kj ∂_i W^k + g_ik ∂_j W^k` with
/// `W^k = f_k V^k` and `g_ii = f_i⁻²`, rescaled to the frame by `f_i f_j`.
#[derive(Clone, Debug)]
pub struct CoordinateResidual {
    f: [ScalarField; 3],
    w: [ScalarField; 3],
    /// `dw[k][a] = ∂_a W^k`
    dw: [[ScalarField; 3]; 3],
    g: [ScalarField; 3],
    /// `dg[i][a] = ∂_a g_ii`
    dg: [[ScalarField; 3]; 3],
}

impl CoordinateResidual {
    pub fn new(m: &DiagonalMetric, v: &FrameVectorField) -> Self {
        let f = m.lames().clone();
        let w: [ScalarField; 3] = std::array::from_fn(|k| &f[k] * &v.v[k]);
        let g: [ScalarField; 3] = std::array::from_fn(|i| f[i].clone().powi(-2));
        let dw = std::array::from_fn(|k| w[k].gradient());
        let dg = std::array::from_fn(|i| g[i].gradient());
        CoordinateResidual { f, w, dw, g, dg }
    }

    pub fn eval(&self, p: Point) -> Result<KillingResidual, EvalError> {
        let ev3 = |xs: &[ScalarField; 3]| -> Result<[f64; 3], EvalError> {
            Ok([xs[0].eval(p)?, xs[1].eval(p)?, xs[2].eval(p)?])
        };
        let f = ev3(&self.f)?;
        let w = ev3(&self.w)?;
        let g = ev3(&self.g)?;
        let dw = [ev3(&self.dw[0])?, ev3(&self.dw[1])?, ev3(&self.dw[2])?];
        let dg = [ev3(&self.dg[0])?, ev3(&self.dg[1])?, ev3(&self.dg[2])?];
        let lie = |i: usize, j: usize| -> f64 {
            let mut s = g[j] * dw[j][i] + g[i] * dw[i][j];
            if i == j {
                s += (0..3).map(|k| w[k] * dg[i][k]).sum::<f64>();
            }
            s
        };
        let r = ENTRY_ORDER.map(|(i, j)| {
            let frame = f[i] * f[j] * lie(i, j);
            if i == j {
                0.5 * frame
            } else {
                frame
            }
        });
        Ok(KillingResidual::from_array(r))
    }
}

/// Residual at `p` from the frame form of the Killing system.
pub fn residual_frame(m: &DiagonalMetric, v: &FrameVectorField, p: Point) -> Result<KillingResidual, EvalError> {
    FrameResidual::new(m, v).eval(p)
}

/// Residual at `p` from the coordinate Lie derivative; same normalization as
/// [`residual_frame`].
pub fn residual_coordinate_oracle(
    m: &DiagonalMetric,
    v: &FrameVectorField,
    p: Point,
) -> Result<KillingResidual, EvalError> {
    CoordinateResidual::new(m, v).eval(p)
}

/// Worst residual over a set of sample points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridResidual {
    pub max_abs: f64,
    pub worst_point: Point,
    pub worst: KillingResidual,
    pub points: usize,
}

fn check_grid(counts: [usize; 3]) -> Result<(), KillingError> {
    if counts.contains(&0) {
        return Err(KillingError::InvalidGrid(counts));
    }
    Ok(())
}

fn scan(
    points: &[Point],
    mut eval: impl FnMut(Point) -> Result<KillingResidual, EvalError>,
) -> Result<GridResidual, KillingError> {
    let mut best = GridResidual {
        max_abs: 0.0,
        worst_point: points.first().copied().unwrap_or_default(),
        worst: KillingResidual::default(),
        points: points.len(),
    };
    for &p in points {
        let r = eval(p).map_err(|source| KillingError::Eval { point: p, source })?;
        let a = r.max_abs();
        if a > best.max_abs {
            best.max_abs = a;
            best.worst_point = p;
            best.worst = r;
        }
    }
    Ok(best)
}

/// Maximum of `max_abs` of the chosen oracle over explicit points.
pub fn max_residual_points(
    m: &DiagonalMetric,
    v: &FrameVectorField,
    points: &[Point],
    oracle: Oracle,
) -> Result<GridResidual, KillingError> {
    match oracle {
        Oracle::Frame => {
            let op = FrameResidual::new(m, v);
            scan(points, |p| op.eval(p))
        }
        Oracle::Coordinate => {
            let op = CoordinateResidual::new(m, v);
            scan(points, |p| op.eval(p))
        }
    }
}

/// Maximum frame residual over an `n₁×n₂×n₃` grid of the metric's domain.
pub fn max_residual_grid(
    m: &DiagonalMetric,
    v: &FrameVectorField,
    grid: [usize; 3],
) -> Result<GridResidual, KillingError> {
    max_residual_grid_with(m, v, grid, Oracle::Frame)
}

pub fn max_residual_grid_with(
    m: &DiagonalMetric,
    v: &FrameVectorField,
    grid: [usize; 3],
    oracle: Oracle,
) -> Result<GridResidual, KillingError> {
    check_grid(grid)?;
    max_residual_points(m, v, &m.domain().grid(grid), oracle)
}

/// Both oracles on one grid, with their largest entrywise disagreement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleComparison {
    pub frame: GridResidual,
    pub coordinate: GridResidual,
    pub gap: f64,
}

pub fn compare_oracles(
    m: &DiagonalMetric,
    v: &FrameVectorField,
    grid: [usize; 3],
) -> Result<OracleComparison, KillingError> {
    check_grid(grid)?;
    let points = m.domain().grid(grid);
    let frame_op = FrameResidual::new(m, v);
    let coord_op = CoordinateResidual::new(m, v);
    let mut gap = 0.0f64;
    let mut coords = Vec::with_capacity(points.len());
    let frame = scan(&points, |p| {
        let a = frame_op.eval(p)?;
        let b = coord_op.eval(p)?;
        gap = gap.max(a.gap(&b));
        coords.push(b);
        Ok(a)
    })?;
    let mut it = coords.into_iter();
    let coordinate = scan(&points, |_| Ok(it.next().unwrap_or_default()))?;
    Ok(OracleComparison { frame, coordinate, gap })
}

/// `max_residual_grid ≤ tol`.
pub fn is_killing(m: &DiagonalMetric, v: &FrameVectorField, grid: [usize; 3], tol: f64) -> Result<bool, KillingError> {
    if !(tol > 0.0) {
        return Err(KillingError::NonPositiveTolerance(tol));
    }
    Ok(max_residual_grid(m, v, grid)?.max_abs <= tol)
}

/// `[V, W]` in frame components, computed through coordinate components
/// with `[V, W]^i = V(W^i) - W(V^i)`.
pub fn lie_bracket(m: &DiagonalMetric, v: &FrameVectorField, w: &FrameVectorField) -> FrameVectorField {
    let vc = m.frame_to_coordinate(v);
    let wc = m.frame_to_coordinate(w);
    let coord: [ScalarField; 3] = std::array::from_fn(|i| {
        (0..3).fold(ScalarField::zero(), |acc, k| {
            let a = Axis::ALL[k];
            acc + &vc[k] * wc[i].diff(a) - &wc[k] * vc[i].diff(a)
        })
    });
    m.coordinate_to_frame(&coord)
}
