//! Flows of frame vector fields and the isometry defect of the flow map.
//!
//! A field is Killing iff its flow `Φ_t` preserves the metric, i.e.
//! `DΦ_tᵀ G(Φ_t(p)) DΦ_t = G(p)`. This is checked numerically with RK4 for
//! `Φ_t` and central differences for `DΦ_t`, independently of the residual
//! computations in [`crate::killing`].

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::expr::{EvalError, Point, ScalarField};
use crate::killing::FrameVectorField;
use crate::metric::DiagonalMetric;

/// Offset of the central differences for the flow Jacobian.
pub const JACOBIAN_OFFSET: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum FlowError {
    #[error("trajectory left the domain at {point:?} (t = {time})")]
    TrajectoryLeftDomain { point: Point, time: f64 },
    #[error("evaluation failed at {point:?}: {source}")]
    Eval { point: Point, source: EvalError },
    #[error("step count must be positive")]
    ZeroSteps,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowResult {
    pub endpoint: Point,
    /// Central-difference estimate of `DΦ_t` at the start point.
    pub jacobian: Matrix3<f64>,
    pub steps: usize,
    pub step_size: f64,
}

/// RK4 integrator for `ẋ = W(x)`, `W^k = f_k V^k`.
pub struct Flow<'m> {
    metric: &'m DiagonalMetric,
    w: [ScalarField; 3],
}

impl<'m> Flow<'m> {
    pub fn new(metric: &'m DiagonalMetric, v: &FrameVectorField) -> Self {
        Flow {
            metric,
            w: metric.frame_to_coordinate(v),
        }
    }

    fn velocity(&self, p: Point, time: f64) -> Result<Vector3<f64>, FlowError> {
        if !self.metric.domain().contains(p) {
            return Err(FlowError::TrajectoryLeftDomain { point: p, time });
        }
        let mut out = Vector3::zeros();
        for k in 0..3 {
            out[k] = self.w[k]
                .eval(p)
                .map_err(|source| FlowError::Eval { point: p, source })?;
        }
        Ok(out)
    }

    /// `Φ_t(p)` with `steps` classical RK4 steps. Every stage point must stay
    /// inside the metric's domain box.
    pub fn endpoint(&self, p: Point, t: f64, steps: usize) -> Result<Point, FlowError> {
        if steps == 0 {
            return Err(FlowError::ZeroSteps);
        }
        let h = t / steps as f64;
        let mut x = Vector3::from(p);
        let at = |v: Vector3<f64>| -> Point { [v[0], v[1], v[2]] };
        for n in 0..steps {
            let s = n as f64 * h;
            let k1 = self.velocity(at(x), s)?;
            let k2 = self.velocity(at(x + k1 * (0.5 * h)), s + 0.5 * h)?;
            let k3 = self.velocity(at(x + k2 * (0.5 * h)), s + 0.5 * h)?;
            let k4 = self.velocity(at(x + k3 * h), s + h)?;
            x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        let end = at(x);
        if !self.metric.domain().contains(end) {
            return Err(FlowError::TrajectoryLeftDomain { point: end, time: t });
        }
        Ok(end)
    }

    pub fn flow_map(&self, p: Point, t: f64, steps: usize) -> Result<FlowResult, FlowError> {
        let endpoint = self.endpoint(p, t, steps)?;
        let mut jacobian = Matrix3::zeros();
        for j in 0..3 {
            let (mut plus, mut minus) = (p, p);
            plus[j] += JACOBIAN_OFFSET;
            minus[j] -= JACOBIAN_OFFSET;
            // the representable offset, so that J(0) = I exactly
            let spread = plus[j] - minus[j];
            let (a, b) = (self.endpoint(plus, t, steps)?, self.endpoint(minus, t, steps)?);
            for i in 0..3 {
                jacobian[(i, j)] = (a[i] - b[i]) / spread;
            }
        }
        Ok(FlowResult {
            endpoint,
            jacobian,
            steps,
            step_size: t / steps as f64,
        })
    }

    /// `max |Jᵀ G(Φ_t(p)) J − G(p)|`.
    pub fn isometry_defect(&self, p: Point, t: f64, steps: usize) -> Result<f64, FlowError> {
        let r = self.flow_map(p, t, steps)?;
        let g = |q: Point| {
            self.metric
                .metric_tensor_at(q)
                .map_err(|source| FlowError::Eval { point: q, source })
        };
        let pulled = r.jacobian.transpose() * g(r.endpoint)? * r.jacobian;
        Ok((pulled - g(p)?).abs().max())
    }
}

pub fn flow_map(
    m: &DiagonalMetric,
    v: &FrameVectorField,
    p: Point,
    t: f64,
    steps: usize,
) -> Result<FlowResult, FlowError> {
    Flow::new(m, v).flow_map(p, t, steps)
}

pub fn isometry_defect(
    m: &DiagonalMetric,
    v: &FrameVectorField,
    p: Point,
    t: f64,
    steps: usize,
) -> Result<f64, FlowError> {
    Flow::new(m, v).isometry_defect(p, t, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::DomainBox;

    #[test]
    fn zero_field_is_identity() {
        let m = DiagonalMetric::euclidean(DomainBox::default());
        let r = flow_map(&m, &FrameVectorField::zero(), [0.1, 0.2, 0.3], 0.7, 10).unwrap();
        assert_eq!(r.endpoint, [0.1, 0.2, 0.3]);
        assert_eq!(r.jacobian, Matrix3::identity());
    }

    #[test]
    fn time_zero_is_identity() {
        let m = DiagonalMetric::from_strs("exp(x1)", "2 + x2", "1", DomainBox::default()).unwrap();
        let v = FrameVectorField::from_strs("x2", "sin(x1)", "x3^2").unwrap();
        let r = flow_map(&m, &v, [0.3, -0.2, 0.5], 0.0, 5).unwrap();
        assert_eq!(r.endpoint, [0.3, -0.2, 0.5]);
        assert!((r.jacobian - Matrix3::identity()).abs().max() <= 1e-12);
    }

    #[test]
    fn rotation_quarter_turn() {
        let m = DiagonalMetric::euclidean(DomainBox::cube(-2.0, 2.0).unwrap());
        let v = FrameVectorField::from_strs("-x2", "x1", "0").unwrap();
        let q = flow_map(&m, &v, [1.0, 0.0, 0.0], std::f64::consts::FRAC_PI_2, 1000)
            .unwrap()
            .endpoint;
        assert!(q[0].abs() < 1e-9 && (q[1] - 1.0).abs() < 1e-9 && q[2] == 0.0);
    }

    #[test]
    fn constant_frame_field_translates_with_scale() {
        let m = DiagonalMetric::from_strs("0.5", "2", "0.25", DomainBox::cube(-3.0, 3.0).unwrap()).unwrap();
        let v = FrameVectorField::from_strs("1", "1", "1").unwrap();
        let q = flow_map(&m, &v, [0.0; 3], 1.0, 10).unwrap().endpoint;
        assert!((q[0] - 0.5).abs() < 1e-14 && (q[1] - 2.0).abs() < 1e-14 && (q[2] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn leaving_the_box_is_an_error() {
        let m = DiagonalMetric::euclidean(DomainBox::default());
        let v = FrameVectorField::from_strs("1", "0", "0").unwrap();
        assert!(matches!(
            flow_map(&m, &v, [0.5, 0.0, 0.0], 1.0, 10),
            Err(FlowError::TrajectoryLeftDomain { .. })
        ));
        assert_eq!(flow_map(&m, &v, [0.0; 3], 1.0, 0), Err(FlowError::ZeroSteps));
    }

    #[test]
    fn shear_is_not_an_isometry() {
        // J = [[1, t, 0], [0, 1, 0], [0, 0, 1]], so JᵀJ - I has entries t and t²
        let m = DiagonalMetric::euclidean(DomainBox::cube(-2.0, 2.0).unwrap());
        let v = FrameVectorField::from_strs("x2", "0", "0").unwrap();
        let d = isometry_defect(&m, &v, [0.0, 1.0, 0.0], 0.5, 100).unwrap();
        assert!((d - 0.5).abs() < 1e-8);
    }
}
