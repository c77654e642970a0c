use std::fmt;
use std::sync::Arc;

use super::EquilibriumError;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// `[0, ∞)`
    HalfLine,
    /// `ℝ`
    RealLine,
}

/// External field. `Symmetrized(V)` is `W(x) = V(x^2)/2` on the real line.
#[derive(Clone)]
pub enum Potential {
    ModelVc { c: f64 },
    Custom { name: String, value: RealFn, derivative: RealFn },
    Symmetrized(Box<Potential>),
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::ModelVc { c } => write!(f, "V_c(c = {c})"),
            Potential::Custom { name, .. } => write!(f, "custom({name})"),
            Potential::Symmetrized(v) => write!(f, "symmetrized({v:?})"),
        }
    }
}

impl Potential {
    pub fn model_vc(c: f64) -> Result<Self, EquilibriumError> {
        if c > 0.0 && c.is_finite() {
            Ok(Potential::ModelVc { c })
        } else {
            Err(EquilibriumError::Domain(format!("c must be positive, got {c}")))
        }
    }

    /// User potential on `[0, ∞)` given with its derivative. Fails the
    /// growth check `V(x) / log(x^2 + 1) >= 10` at `x = 1e6`.
    pub fn custom(
        name: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, EquilibriumError> {
        let p = Potential::Custom { name: name.into(), value: Arc::new(value), derivative: Arc::new(derivative) };
        if !p.growth_ok() {
            return Err(EquilibriumError::Domain("potential grows too slowly at infinity".into()));
        }
        Ok(p)
    }

    pub fn symmetrized(v: Potential) -> Self {
        Potential::Symmetrized(Box::new(v))
    }

    pub fn domain(&self) -> Domain {
        match self {
            Potential::Symmetrized(_) => Domain::RealLine,
            _ => Domain::HalfLine,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Potential::ModelVc { c } => (x - 2.0).powi(2) / (2.0 * c),
            Potential::Custom { value, .. } => value(x),
            Potential::Symmetrized(v) => 0.5 * v.value(x * x),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Potential::ModelVc { c } => (x - 2.0) / c,
            Potential::Custom { derivative, .. } => derivative(x),
            Potential::Symmetrized(v) => x * v.derivative(x * x),
        }
    }

    /// Numerical surrogate for `V(x)/log(1 + x^2) → ∞`.
    pub fn growth_ok(&self) -> bool {
        let x = 1e6;
        let r = self.value(x) / (x * x + 1.0).ln();
        r.is_finite() && r >= 10.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_values() {
        let v = Potential::model_vc(2.0).unwrap();
        assert_eq!(v.value(2.0), 0.0);
        assert_eq!(v.value(0.0), 1.0);
        assert_eq!(v.derivative(4.0), 1.0);
        assert!(v.growth_ok());
    }

    #[test]
    fn symmetrized_values() {
        let w = Potential::symmetrized(Potential::model_vc(1.0).unwrap());
        assert_eq!(w.domain(), Domain::RealLine);
        assert!(w.value(2f64.sqrt()).abs() < 1e-30);
        assert!((w.value(1.0) - 0.25).abs() < 1e-15);
        // d/dx [V(x^2)/2] = x V'(x^2)
        let h = 1e-6;
        let fd = (w.value(1.3 + h) - w.value(1.3 - h)) / (2.0 * h);
        assert!((fd - w.derivative(1.3)).abs() < 1e-8);
    }

    #[test]
    fn growth_check_rejects_log_potential() {
        assert!(Potential::custom("log", |x| (1.0 + x).ln(), |x| 1.0 / (1.0 + x)).is_err());
        assert!(Potential::custom("quartic", |x| x * x, |x| 2.0 * x).is_ok());
    }
}
