use super::{Axis, ExprError, ScalarField};

pub const DEFAULT_CONSTANCY_SAMPLES: usize = 64;
pub const DEFAULT_CONSTANCY_TOL: f64 = 1e-8;
pub const MIN_CONSTANCY_SAMPLES: usize = 16;

/// Outcome of a sampled constancy test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constancy {
    pub constant: bool,
    /// Sample mean, used as the witness value.
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Samples `f` at `samples` evenly spaced points of `interval` along `axis`
/// (other coordinates zero) and declares it constant when
/// `max - min <= rel_tol * (1 + |mean|)`.
pub fn is_constant(
    f: &ScalarField,
    axis: Axis,
    interval: (f64, f64),
    samples: usize,
    rel_tol: f64,
) -> Result<Constancy, ExprError> {
    if samples < MIN_CONSTANCY_SAMPLES {
        return Err(ExprError::TooFewSamples {
            min: MIN_CONSTANCY_SAMPLES,
            got: samples,
        });
    }
    if !(rel_tol > 0.0) {
        return Err(ExprError::NonPositiveTolerance(rel_tol));
    }
    let (a, b) = interval;
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(ExprError::InvalidInterval(a, b));
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for i in 0..samples {
        let t = a + (b - a) * i as f64 / (samples - 1) as f64;
        let mut p = [0.0; 3];
        p[axis.index()] = t;
        let v = f.eval(p)?;
        min = min.min(v);
        max = max.max(v);
        sum += v;
    }
    let mean = sum / samples as f64;
    Ok(Constancy {
        constant: max - min <= rel_tol * (1.0 + mean.abs()),
        mean,
        min,
        max,
    })
}
