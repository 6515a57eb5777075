//! Numeric primitives of one-variable fields by adaptive Simpson quadrature.
//!
//! `F(t) = ∫_base^t f` is assembled from a chain of anchor points spaced
//! [`ANCHOR_SPACING`] apart, starting at the base point. Anchor values are
//! computed in order and memoised, so every `t` maps to the same sum of
//! quadrature pieces no matter which values were requested before.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use super::{Axis, EvalError, ExprError, ScalarField};

pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-10;
pub const MAX_QUADRATURE_DEPTH: u32 = 40;
pub const ANCHOR_SPACING: f64 = 1.0 / 16.0;

pub struct Antiderivative {
    integrand: ScalarField,
    axis: Axis,
    base_point: f64,
    tolerance: f64,
    anchors: Mutex<HashMap<i64, f64>>,
}

impl fmt::Debug for Antiderivative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Antiderivative")
            .field("integrand", &self.integrand)
            .field("axis", &self.axis)
            .field("base_point", &self.base_point)
            .field("tolerance", &self.tolerance)
            .finish()
    }
}

impl Antiderivative {
    /// Primitive of `integrand` along `axis`, vanishing at `base_point`.
    ///
    /// The integrand may not depend on any other coordinate.
    pub fn new(integrand: ScalarField, axis: Axis, base_point: f64, tolerance: f64) -> Result<Self, ExprError> {
        let vars = integrand.variables();
        if vars.iter().any(|a| *a != axis) {
            let found = vars.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", ");
            return Err(ExprError::NotSingleVariable {
                expected: axis.to_string(),
                found,
            });
        }
        if !(tolerance > 0.0) {
            return Err(ExprError::NonPositiveTolerance(tolerance));
        }
        if !base_point.is_finite() {
            return Err(ExprError::InvalidInterval(base_point, base_point));
        }
        Ok(Antiderivative {
            integrand,
            axis,
            base_point,
            tolerance,
            anchors: Mutex::new(HashMap::new()),
        })
    }

    pub fn integrand(&self) -> &ScalarField {
        &self.integrand
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn base_point(&self) -> f64 {
        self.base_point
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// The primitive as a field of its own axis.
    pub fn into_field(self) -> ScalarField {
        let axis = self.axis;
        ScalarField::primitive(Arc::new(self), ScalarField::var(axis))
    }

    fn integrand_at(&self, t: f64) -> Result<f64, EvalError> {
        let mut p = [0.0; 3];
        p[self.axis.index()] = t;
        self.integrand.eval(p)
    }

    fn anchor_position(&self, j: i64) -> f64 {
        self.base_point + j as f64 * ANCHOR_SPACING
    }

    fn anchor_value(&self, j: i64) -> Result<f64, EvalError> {
        if j == 0 {
            return Ok(0.0);
        }
        if let Some(v) = self.lock().get(&j) {
            return Ok(*v);
        }
        let step = j.signum();
        // walk back to the nearest known anchor
        let mut known = j - step;
        let mut value = loop {
            if known == 0 {
                break 0.0;
            }
            if let Some(v) = self.lock().get(&known) {
                break *v;
            }
            known -= step;
        };
        while known != j {
            let next = known + step;
            value += self.integrate(self.anchor_position(known), self.anchor_position(next))?;
            self.lock().insert(next, value);
            known = next;
        }
        Ok(value)
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, HashMap<i64, f64>> {
        self.anchors.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// `F(t)`, with `F(base_point) = 0`.
    pub fn value(&self, t: f64) -> Result<f64, EvalError> {
        if !t.is_finite() {
            return Err(EvalError::NonFinite);
        }
        let offset = (t - self.base_point) / ANCHOR_SPACING;
        if offset.abs() > 1e7 {
            return Err(EvalError::QuadratureNonConvergence {
                from: self.base_point,
                to: t,
            });
        }
        let j = offset.trunc() as i64;
        let anchor = self.anchor_value(j)?;
        Ok(anchor + self.integrate(self.anchor_position(j), t)?)
    }

    /// `∫_a^b f` to absolute accuracy `tolerance · |b - a|`.
    fn integrate(&self, a: f64, b: f64) -> Result<f64, EvalError> {
        if a == b {
            return Ok(0.0);
        }
        let fa = self.integrand_at(a)?;
        let fb = self.integrand_at(b)?;
        let m = 0.5 * (a + b);
        let fm = self.integrand_at(m)?;
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        let eps = self.tolerance * (b - a).abs();
        self.adaptive(a, b, fa, fm, fb, whole, eps, MAX_QUADRATURE_DEPTH)
            .map_err(|e| match e {
                EvalError::QuadratureNonConvergence { .. } => EvalError::QuadratureNonConvergence { from: a, to: b },
                other => other,
            })
    }

    #[allow(clippy::too_many_arguments)]
    fn adaptive(
        &self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> Result<f64, EvalError> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.integrand_at(lm)?;
        let frm = self.integrand_at(rm)?;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * eps {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(EvalError::QuadratureNonConvergence { from: a, to: b });
        }
        Ok(self.adaptive(a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)?
            + self.adaptive(m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)?)
    }
}
