//! Diagonal metrics `g = Σ f_i⁻² dx^i ⊗ dx^i`, their orthonormal frame and
//! the Levi-Civita connection expressed in that frame.
//!
//! The stored quantities are the frame scales `f_i = 1/√g_ii`, so that
//! `E_i = f_i ∂/∂x^i` is orthonormal.

use std::sync::OnceLock;

use nalgebra::Matrix3;
use thiserror::Error;

use crate::expr::{self, Axis, EvalError, ParseError, Point, ScalarField};
use crate::killing::FrameVectorField;

/// Samples per axis used to validate that the `f_i` do not vanish.
pub const VALIDATION_SAMPLES: usize = 9;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum MetricError {
    #[error("f{index} vanishes, is non-finite or changes sign near {point:?}")]
    ZeroLameCoefficient { index: usize, point: Point },
    #[error("degenerate domain box: min {min:?}, max {max:?}")]
    DegenerateDomain { min: Point, max: Point },
    #[error("cannot parse f{index}: {source}")]
    Parse { index: usize, source: ParseError },
}

/// Axis-aligned box `[min, max]` in R³.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainBox {
    min: Point,
    max: Point,
}

impl Default for DomainBox {
    fn default() -> Self {
        DomainBox {
            min: [-1.0; 3],
            max: [1.0; 3],
        }
    }
}

impl DomainBox {
    pub fn new(min: Point, max: Point) -> Result<Self, MetricError> {
        let ok = (0..3).all(|i| min[i].is_finite() && max[i].is_finite() && min[i] < max[i]);
        if !ok {
            return Err(MetricError::DegenerateDomain { min, max });
        }
        Ok(DomainBox { min, max })
    }

    /// `[a, b]³`.
    pub fn cube(a: f64, b: f64) -> Result<Self, MetricError> {
        DomainBox::new([a; 3], [b; 3])
    }

    pub fn min(&self) -> Point {
        self.min
    }

    pub fn max(&self) -> Point {
        self.max
    }

    pub fn interval(&self, axis: Axis) -> (f64, f64) {
        (self.min[axis.index()], self.max[axis.index()])
    }

    pub fn center(&self) -> Point {
        std::array::from_fn(|i| 0.5 * (self.min[i] + self.max[i]))
    }

    pub fn contains(&self, p: Point) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    /// Tensor grid with `counts[i]` evenly spaced samples per axis, endpoints
    /// included. A count of 1 samples the midpoint.
    pub fn grid(&self, counts: [usize; 3]) -> Vec<Point> {
        let axis = |i: usize| -> Vec<f64> {
            let (a, b) = (self.min[i], self.max[i]);
            match counts[i] {
                0 => vec![],
                1 => vec![0.5 * (a + b)],
                n => (0..n)
                    .map(|j| {
                        if j + 1 == n {
                            b
                        } else {
                            a + (b - a) * j as f64 / (n - 1) as f64
                        }
                    })
                    .collect(),
            }
        };
        product(axis(0), axis(1), axis(2))
    }

    /// Like [`grid`](Self::grid) but strictly inside the box: `counts[i]`
    /// samples at the interior points of `counts[i] + 1` equal subintervals.
    pub fn interior_grid(&self, counts: [usize; 3]) -> Vec<Point> {
        let axis = |i: usize| -> Vec<f64> {
            let (a, b) = (self.min[i], self.max[i]);
            let n = counts[i];
            (1..=n).map(|j| a + (b - a) * j as f64 / (n + 1) as f64).collect()
        };
        product(axis(0), axis(1), axis(2))
    }
}

fn product(xs: Vec<f64>, ys: Vec<f64>, zs: Vec<f64>) -> Vec<Point> {
    let mut out = Vec::with_capacity(xs.len() * ys.len() * zs.len());
    for &x in &xs {
        for &y in &ys {
            for &z in &zs {
                out.push([x, y, z]);
            }
        }
    }
    out
}

/// The six `f_ij = (f_j / f_i) ∂f_i/∂x^j`, `i ≠ j`.
#[derive(Clone, Debug)]
pub struct FrameCoefficients {
    f: [[ScalarField; 3]; 3],
}

impl FrameCoefficients {
    /// `f_ij`; zero on the diagonal.
    pub fn get(&self, i: Axis, j: Axis) -> &ScalarField {
        &self.f[i.index()][j.index()]
    }
}

/// Frame components of `∇_{E_i} E_j`: `coeff(i, j, k)` is the `E_k`
/// component.
#[derive(Clone, Debug)]
pub struct ConnectionTable {
    coeffs: [[[ScalarField; 3]; 3]; 3],
}

impl ConnectionTable {
    pub fn coeff(&self, i: Axis, j: Axis, k: Axis) -> &ScalarField {
        &self.coeffs[i.index()][j.index()][k.index()]
    }

    /// `∇_{E_i} E_j` as a frame triple.
    pub fn covariant_derivative(&self, i: Axis, j: Axis) -> &[ScalarField; 3] {
        &self.coeffs[i.index()][j.index()]
    }
}

#[derive(Clone, Debug)]
pub struct DiagonalMetric {
    f: [ScalarField; 3],
    domain: DomainBox,
    frame: OnceLock<FrameCoefficients>,
    connection: OnceLock<ConnectionTable>,
}

impl DiagonalMetric {
    /// Validates that each `f_i` is finite, nonzero and of constant sign on a
    /// 9×9×9 sample grid of `domain`.
    pub fn new(f1: ScalarField, f2: ScalarField, f3: ScalarField, domain: DomainBox) -> Result<Self, MetricError> {
        let f = [f1.folded(), f2.folded(), f3.folded()];
        let grid = domain.grid([VALIDATION_SAMPLES; 3]);
        for (i, fi) in f.iter().enumerate() {
            let mut sign = 0.0;
            for &p in &grid {
                let bad = MetricError::ZeroLameCoefficient { index: i + 1, point: p };
                let v = fi.eval(p).map_err(|_| bad.clone())?;
                if v == 0.0 {
                    return Err(bad);
                }
                if sign == 0.0 {
                    sign = v.signum();
                } else if v.signum() != sign {
                    return Err(bad);
                }
            }
        }
        Ok(DiagonalMetric {
            f,
            domain,
            frame: OnceLock::new(),
            connection: OnceLock::new(),
        })
    }

    pub fn from_strs(f1: &str, f2: &str, f3: &str, domain: DomainBox) -> Result<Self, MetricError> {
        let p = |index: usize, s: &str| expr::parse(s).map_err(|source| MetricError::Parse { index, source });
        DiagonalMetric::new(p(1, f1)?, p(2, f2)?, p(3, f3)?, domain)
    }

    pub fn euclidean(domain: DomainBox) -> Self {
        DiagonalMetric::new(ScalarField::one(), ScalarField::one(), ScalarField::one(), domain)
            .expect("unit coefficients never vanish")
    }

    /// `f_i` for the given axis.
    pub fn lame(&self, axis: Axis) -> &ScalarField {
        &self.f[axis.index()]
    }

    pub fn lames(&self) -> &[ScalarField; 3] {
        &self.f
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    /// The same coefficients on another box, revalidated.
    pub fn with_domain(&self, domain: DomainBox) -> Result<Self, MetricError> {
        let [a, b, c] = self.f.clone();
        DiagonalMetric::new(a, b, c, domain)
    }

    /// `diag(1/f_1², 1/f_2², 1/f_3²)` at `p`.
    pub fn metric_tensor_at(&self, p: Point) -> Result<Matrix3<f64>, EvalError> {
        let mut g = Matrix3::zeros();
        for i in 0..3 {
            let fi = self.f[i].eval(p)?;
            g[(i, i)] = 1.0 / (fi * fi);
        }
        Ok(g)
    }

    pub fn frame_coefficients(&self) -> &FrameCoefficients {
        self.frame.get_or_init(|| {
            let f = std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    if i == j {
                        ScalarField::zero()
                    } else {
                        &(&self.f[j] / &self.f[i]) * &self.f[i].diff(Axis::ALL[j])
                    }
                })
            });
            FrameCoefficients { f }
        })
    }

    pub fn connection(&self) -> &ConnectionTable {
        self.connection.get_or_init(|| {
            let fc = self.frame_coefficients();
            let coeffs = std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    std::array::from_fn(|k| {
                        let (ai, ak) = (Axis::ALL[i], Axis::ALL[k]);
                        if i == j {
                            // ∇_{E_i} E_i = Σ_{k≠i} f_ik E_k
                            fc.get(ai, ak).clone()
                        } else if k == i {
                            // ∇_{E_i} E_j = -f_ij E_i
                            -fc.get(ai, Axis::ALL[j])
                        } else {
                            ScalarField::zero()
                        }
                    })
                })
            });
            ConnectionTable { coeffs }
        })
    }

    /// Coordinate components `W^k = f_k V^k`.
    pub fn frame_to_coordinate(&self, v: &FrameVectorField) -> [ScalarField; 3] {
        std::array::from_fn(|k| &v.components()[k] * &self.f[k])
    }

    /// Frame components `V^k = W^k / f_k`.
    pub fn coordinate_to_frame(&self, w: &[ScalarField; 3]) -> FrameVectorField {
        FrameVectorField::new(std::array::from_fn(|k| &w[k] / &self.f[k]))
    }

    /// True when every `f_i` is a constant expression.
    pub fn is_constant(&self) -> bool {
        self.f.iter().all(ScalarField::is_constant_expr)
    }
}
