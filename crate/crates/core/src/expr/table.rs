use thiserror::Error;

use super::EvalError;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum TableError {
    #[error("table needs at least two knots, got {0}")]
    TooFewKnots(usize),
    #[error("knots, values and slopes must have equal length ({knots}, {values}, {slopes})")]
    LengthMismatch { knots: usize, values: usize, slopes: usize },
    #[error("knots must be finite and strictly increasing (index {0})")]
    UnorderedKnots(usize),
    #[error("non-finite table entry at index {0}")]
    NonFinite(usize),
}

/// Piecewise cubic Hermite interpolant through `(knot, value, slope)` triples.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteTable {
    name: String,
    knots: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl HermiteTable {
    pub fn new(
        name: impl Into<String>,
        knots: Vec<f64>,
        values: Vec<f64>,
        slopes: Vec<f64>,
    ) -> Result<Self, TableError> {
        if knots.len() < 2 {
            return Err(TableError::TooFewKnots(knots.len()));
        }
        if knots.len() != values.len() || knots.len() != slopes.len() {
            return Err(TableError::LengthMismatch {
                knots: knots.len(),
                values: values.len(),
                slopes: slopes.len(),
            });
        }
        for i in 0..knots.len() {
            if !knots[i].is_finite() || (i > 0 && knots[i] <= knots[i - 1]) {
                return Err(TableError::UnorderedKnots(i));
            }
            if !values[i].is_finite() || !slopes[i].is_finite() {
                return Err(TableError::NonFinite(i));
            }
        }
        Ok(HermiteTable {
            name: name.into(),
            knots,
            values,
            slopes,
        })
    }

    /// Samples `f`, which returns `(value, slope)`, on `n` uniform knots of `[a, b]`.
    pub fn tabulate<E>(
        name: impl Into<String>,
        a: f64,
        b: f64,
        n: usize,
        mut f: impl FnMut(f64) -> Result<(f64, f64), E>,
    ) -> Result<Result<Self, TableError>, E> {
        let n = n.max(2);
        let mut knots = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        let mut slopes = Vec::with_capacity(n);
        for i in 0..n {
            let x = if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            };
            let (v, s) = f(x)?;
            knots.push(x);
            values.push(v);
            slopes.push(s);
        }
        Ok(HermiteTable::new(name, knots, values, slopes))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn range(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    /// Value (`order = 0`) or derivative of the given order at `x`.
    pub fn eval(&self, order: u8, x: f64) -> Result<f64, EvalError> {
        let (lo, hi) = self.range();
        let slack = 1e-12 * (hi - lo).max(1.0);
        if !(x >= lo - slack && x <= hi + slack) {
            return Err(EvalError::OutsideTable {
                name: self.name.clone(),
                value: x,
                lo,
                hi,
            });
        }
        let x = x.clamp(lo, hi);
        let i = self.knots.partition_point(|&k| k <= x).clamp(1, self.knots.len() - 1) - 1;
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let h = x1 - x0;
        let s = (x - x0) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let (s2, s3) = (s * s, s * s * s);
        let v = match order {
            0 => {
                (2.0 * s3 - 3.0 * s2 + 1.0) * y0
                    + (s3 - 2.0 * s2 + s) * m0
                    + (-2.0 * s3 + 3.0 * s2) * y1
                    + (s3 - s2) * m1
            }
            1 => {
                ((6.0 * s2 - 6.0 * s) * y0
                    + (3.0 * s2 - 4.0 * s + 1.0) * m0
                    + (-6.0 * s2 + 6.0 * s) * y1
                    + (3.0 * s2 - 2.0 * s) * m1)
                    / h
            }
            2 => {
                ((12.0 * s - 6.0) * y0 + (6.0 * s - 4.0) * m0 + (-12.0 * s + 6.0) * y1 + (6.0 * s - 2.0) * m1) / (h * h)
            }
            3 => (12.0 * y0 + 6.0 * m0 - 12.0 * y1 + 6.0 * m1) / (h * h * h),
            _ => 0.0,
        };
        Ok(v)
    }
}
