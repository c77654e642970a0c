//! Orthonormal polynomials for the weights `x^α e^{-N V(x)}` on `[0, ∞)` and
//! `|x|^β e^{-N W(x)}` on the real line (`W(x) = V(x^2)/2`), their
//! correlation kernels, and the quadratic transformation between the two
//! families.

mod kernel;
mod stieltjes;
mod transform;

use thiserror::Error;

use crate::equilibrium::{Domain, Potential};
use crate::numcore::NumError;

pub use kernel::{orthonormal_values, weighted_values, CDKernelContext};
pub use stieltjes::{stieltjes_table, write_recurrence_csv, PrecisionMode, RecurrenceTable};
pub use transform::{quad_transform_residual, TransformResiduals};

/// `log(1e-280)`: the weight is treated as zero past this drop from its peak.
const LOG_CUTOFF: f64 = -644.7238260383328;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrthoError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("recurrence coefficient a_{k} lost positivity in {mode:?} precision; retry in extended mode")]
    PrecisionFailure { k: usize, mode: PrecisionMode },
    #[error("recurrence coefficients changed by {change:e} under the last refinement ({panels} panels)")]
    NotConverged { change: f64, panels: usize },
    #[error("overflow in the polynomial recurrence at x = {x}; retry in extended mode")]
    Overflow { x: f64 },
    #[error(transparent)]
    Numeric(#[from] NumError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightKind {
    /// `x^alpha e^{-N V(x)}` on `[0, ∞)`
    HardEdge { alpha: f64 },
    /// `|x|^beta e^{-N V(x^2)/2}` on ℝ
    Symmetric { beta: f64 },
}

#[derive(Debug, Clone)]
pub struct WeightSpec {
    pub kind: WeightKind,
    /// The half-line potential `V`. Symmetric weights use `W(x) = V(x^2)/2`.
    pub potential: Potential,
    pub n_field: f64,
    /// Beyond `|x| > x_max` the weight is below `1e-280` of its peak.
    pub x_max: f64,
    /// Peak of the log weight, located while searching for `x_max`.
    log_peak: f64,
}

impl WeightSpec {
    pub fn hard_edge(alpha: f64, v: Potential, n_field: f64) -> Result<Self, OrthoError> {
        Self::build(WeightKind::HardEdge { alpha }, v, n_field)
    }

    pub fn symmetric(beta: f64, v: Potential, n_field: f64) -> Result<Self, OrthoError> {
        Self::build(WeightKind::Symmetric { beta }, v, n_field)
    }

    fn build(kind: WeightKind, v: Potential, n_field: f64) -> Result<Self, OrthoError> {
        let e = match kind {
            WeightKind::HardEdge { alpha } => alpha,
            WeightKind::Symmetric { beta } => beta,
        };
        if !(e > -1.0) || !e.is_finite() {
            return Err(OrthoError::Domain(format!("exponent must exceed -1, got {e}")));
        }
        if !(n_field > 0.0) || !n_field.is_finite() {
            return Err(OrthoError::Domain(format!("N must be positive, got {n_field}")));
        }
        if v.domain() != Domain::HalfLine {
            return Err(OrthoError::Domain("weights are built from a half-line potential".into()));
        }
        if !v.growth_ok() {
            return Err(OrthoError::Domain("potential grows too slowly for a finite zeroth moment".into()));
        }
        let mut w = WeightSpec { kind, potential: v, n_field, x_max: f64::NAN, log_peak: f64::NAN };
        w.locate_cutoff()?;
        Ok(w)
    }

    pub fn exponent(&self) -> f64 {
        match self.kind {
            WeightKind::HardEdge { alpha } => alpha,
            WeightKind::Symmetric { beta } => beta,
        }
    }

    pub fn domain(&self) -> Domain {
        match self.kind {
            WeightKind::HardEdge { .. } => Domain::HalfLine,
            WeightKind::Symmetric { .. } => Domain::RealLine,
        }
    }

    pub fn in_domain(&self, x: f64) -> bool {
        x.is_finite() && (self.domain() == Domain::RealLine || x >= 0.0)
    }

    /// `N V(x)` or `N W(x)`.
    pub fn field(&self, x: f64) -> f64 {
        match self.kind {
            WeightKind::HardEdge { .. } => self.n_field * self.potential.value(x),
            WeightKind::Symmetric { .. } => 0.5 * self.n_field * self.potential.value(x * x),
        }
    }

    /// Natural log of the weight; `-∞` where it vanishes.
    pub fn log_weight(&self, x: f64) -> f64 {
        let e = self.exponent();
        let r = x.abs();
        let power = if e == 0.0 {
            0.0
        } else if r == 0.0 {
            if e > 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        } else {
            e * r.ln()
        };
        power - self.field(x)
    }

    pub fn weight(&self, x: f64) -> f64 {
        self.log_weight(x).exp()
    }

    /// Walks outwards geometrically until the log weight has dropped
    /// `|LOG_CUTOFF|` below the running maximum, then bisects.
    fn locate_cutoff(&mut self) -> Result<(), OrthoError> {
        let mut peak = f64::NEG_INFINITY;
        let mut prev = 0.0;
        let mut x = 1e-8;
        for _ in 0..2000 {
            let lw = self.log_weight(x);
            if !lw.is_nan() && lw > peak {
                peak = lw;
            }
            if lw < peak + LOG_CUTOFF && x > 1.0 {
                let (mut lo, mut hi) = (prev, x);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if self.log_weight(mid) < peak + LOG_CUTOFF {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                self.x_max = hi;
                self.log_peak = peak;
                return Ok(());
            }
            prev = x;
            x *= 1.02;
        }
        Err(OrthoError::Domain("weight does not decay; zeroth moment is not finite".into()))
    }

    pub(crate) fn log_peak(&self) -> f64 {
        self.log_peak
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear() -> Potential {
        Potential::custom("linear", |x| x, |_| 1.0).unwrap()
    }

    #[test]
    fn cutoff_for_laguerre_weight() {
        let w = WeightSpec::hard_edge(0.0, linear(), 1.0).unwrap();
        // e^{-x} < 1e-280 past x = 280 ln 10
        assert!((w.x_max - 644.7238260383328).abs() < 1e-6, "{}", w.x_max);
        assert!(w.weight(w.x_max) <= 1.0001e-280);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(WeightSpec::hard_edge(-1.0, linear(), 1.0).is_err());
        assert!(WeightSpec::hard_edge(0.5, linear(), 0.0).is_err());
        assert!(WeightSpec::symmetric(0.5, Potential::symmetrized(linear()), 1.0).is_err());
    }

    #[test]
    fn symmetric_weight_is_even() {
        let v = Potential::model_vc(1.0).unwrap();
        let w = WeightSpec::symmetric(1.6, v, 4.0).unwrap();
        for &x in &[0.1, 0.7, 1.3, 2.5] {
            assert_eq!(w.weight(x), w.weight(-x));
        }
        assert_eq!(w.weight(0.0), 0.0);
    }
}
