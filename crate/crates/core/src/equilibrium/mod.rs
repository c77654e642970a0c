//! Equilibrium measures for the quadratic family `V_c(x) = (x - 2)^2 / (2c)`
//! on `[0, ∞)`, closed-form measures for user potentials, and the map to the
//! symmetrized field `W(x) = V(x^2) / 2` on the real line.

mod potential;
mod variational;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::numcore::{integrate_edge_smoothed_gaps, NumError};

pub use potential::{Domain, Potential};
pub use variational::{check_variational, singularity_report, SingularPoint, SingularityReport, VariationalReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquilibriumError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] NumError),
    #[error("operation needs a single-interval support, got {0} intervals")]
    NotSingleInterval(usize),
}

/// Behaviour of the density at the hard wall x = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeType {
    /// Support reaches 0 with an inverse square-root blow-up.
    HardOnly,
    /// Support reaches 0 and the density vanishes like a square root there.
    SoftMeetsHard,
    /// Support stays away from 0.
    InteriorGap,
}

impl fmt::Display for EdgeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeType::HardOnly => "hard_only",
            EdgeType::SoftMeetsHard => "soft_meets_hard",
            EdgeType::InteriorGap => "interior_gap",
        })
    }
}

type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Density {
    Semicircle { c: f64 },
    /// `(x + a) sqrt(b - x) / (2 pi c sqrt(x))` on `[0, b]`
    HardEdge { c: f64, a: f64 },
    Closure(DensityFn),
    Symmetrized(Arc<EquilibriumMeasure>),
}

#[derive(Clone)]
enum Omega {
    Arcsine,
    Symmetrized(Arc<EquilibriumMeasure>),
}

/// Equilibrium measure together with its constants.
#[derive(Clone)]
pub struct EquilibriumMeasure {
    pub support: Vec<(f64, f64)>,
    pub ell: f64,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub edge_type_at_zero: EdgeType,
    pub potential: Potential,
    density: Density,
    omega: Omega,
}

impl fmt::Debug for EquilibriumMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EquilibriumMeasure")
            .field("potential", &self.potential)
            .field("support", &self.support)
            .field("ell", &self.ell)
            .field("c1", &self.c1)
            .field("c2", &self.c2)
            .field("edge_type_at_zero", &self.edge_type_at_zero)
            .finish()
    }
}

/// Support endpoints `(a, b)` of the `c > 1` density `(x + a) sqrt(b - x) / (2 pi c sqrt x)`.
pub fn hard_edge_parameters(c: f64) -> (f64, f64) {
    let r = (1.0 + 3.0 * c).sqrt();
    (-4.0 / 3.0 + 2.0 / 3.0 * r, 4.0 / 3.0 + 4.0 / 3.0 * r)
}

/// Equilibrium measure of `V_c` on `[0, ∞)`.
pub fn equilibrium_vc(c: f64) -> Result<EquilibriumMeasure, EquilibriumError> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(EquilibriumError::Domain(format!("c must be positive, got {c}")));
    }
    let potential = Potential::model_vc(c)?;
    if c < 1.0 {
        let r = 2.0 * c.sqrt();
        let support = vec![(2.0 - r, 2.0 + r)];
        Ok(EquilibriumMeasure {
            omega: Omega::Arcsine,
            support,
            ell: 1.0 - c.ln(),
            c1: None,
            c2: None,
            edge_type_at_zero: EdgeType::InteriorGap,
            potential,
            density: Density::Semicircle { c },
        })
    } else {
        let (a, b) = hard_edge_parameters(c);
        let mut m = EquilibriumMeasure {
            support: vec![(0.0, b)],
            ell: f64::NAN,
            c1: None,
            c2: None,
            edge_type_at_zero: if c == 1.0 { EdgeType::SoftMeetsHard } else { EdgeType::HardOnly },
            potential,
            density: Density::HardEdge { c, a },
            omega: Omega::Arcsine,
        };
        if c == 1.0 {
            // sqrt(x(4-x))/(2 pi): x^{-1/2} psi -> 1/pi, sqrt(x) omega -> 1/(2 pi)
            m.c1 = Some(0.5);
            m.c2 = Some(2f64.powf(1.0 / 3.0));
        }
        m.ell = m.fit_ell_at(0.5 * b)?;
        Ok(m)
    }
}

impl EquilibriumMeasure {
    /// Measure from a user-supplied closed-form density on a single
    /// interval. The Lagrange constant, the edge type at 0 and (for soft
    /// meets hard) the constants c1, c2 are obtained numerically.
    pub fn from_closed_form(
        potential: Potential,
        support: (f64, f64),
        psi: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, EquilibriumError> {
        let (lo, hi) = support;
        if !(lo < hi) || lo < 0.0 {
            return Err(EquilibriumError::Domain(format!("bad support [{lo}, {hi}]")));
        }
        let mut m = EquilibriumMeasure {
            support: vec![support],
            ell: f64::NAN,
            c1: None,
            c2: None,
            edge_type_at_zero: EdgeType::InteriorGap,
            potential,
            density: Density::Closure(Arc::new(psi)),
            omega: Omega::Arcsine,
        };
        m.edge_type_at_zero = m.classify_edge_at_zero();
        if m.edge_type_at_zero == EdgeType::SoftMeetsHard {
            m.c1 = Some(PI / 2.0 * m.limit_psi_over_sqrt());
            m.c2 = Some(2.0 * PI / m.c1.unwrap().powf(1.0 / 3.0) * m.limit_sqrt_omega());
        }
        m.ell = m.fit_ell_at(0.5 * (lo + hi))?;
        Ok(m)
    }

    pub fn domain(&self) -> Domain {
        self.potential.domain()
    }

    pub fn in_support(&self, x: f64) -> bool {
        self.interval_of(x).is_some()
    }

    fn interval_of(&self, x: f64) -> Option<(f64, f64)> {
        self.support.iter().copied().find(|&(a, b)| x >= a && x <= b)
    }

    /// Density ψ(x); zero off the support.
    pub fn psi(&self, x: f64) -> f64 {
        match self.interval_of(x) {
            Some((a, b)) => self.psi_gapped(x, x - a, b - x, (a, b)),
            None => 0.0,
        }
    }

    /// Equilibrium density of the support itself (unit mass).
    pub fn omega(&self, x: f64) -> f64 {
        match self.interval_of(x) {
            Some((a, b)) => self.omega_gapped(x, x - a, b - x, (a, b)),
            None => 0.0,
        }
    }

    /// ψ at `x` inside `interval`, given the distances to its ends. Using
    /// the distances keeps square-root edges accurate under quadrature.
    fn psi_gapped(&self, x: f64, da: f64, db: f64, interval: (f64, f64)) -> f64 {
        match &self.density {
            Density::Semicircle { c } => (da * db).max(0.0).sqrt() / (2.0 * PI * c),
            Density::HardEdge { c, a, .. } => {
                if da <= 0.0 {
                    return if *c == 1.0 { 0.0 } else { f64::INFINITY };
                }
                (da + a) * db.max(0.0).sqrt() / (2.0 * PI * c * da.sqrt())
            }
            Density::Closure(f) => f(x),
            Density::Symmetrized(v) => {
                let (s, slo, shi, parent) = symmetrized_gaps(x, da, db, interval);
                s.sqrt() * v.psi_gapped(s, slo, shi, parent)
            }
        }
    }

    fn omega_gapped(&self, x: f64, da: f64, db: f64, interval: (f64, f64)) -> f64 {
        match &self.omega {
            Omega::Arcsine => 1.0 / (PI * (da * db).max(0.0).sqrt()),
            Omega::Symmetrized(v) => {
                let (s, slo, shi, parent) = symmetrized_gaps(x, da, db, interval);
                s.sqrt() * v.omega_gapped(s, slo, shi, parent)
            }
        }
    }

    /// Integral of `f(x) ψ(x)` over the support.
    pub fn integrate_against(
        &self,
        f: impl Fn(f64) -> f64,
        tol: f64,
    ) -> Result<f64, EquilibriumError> {
        let mut total = 0.0;
        for &iv in &self.support {
            total += integrate_edge_smoothed_gaps(
                |x, da, db| f(x) * self.psi_gapped(x, da, db, iv),
                iv.0,
                iv.1,
                tol,
                tol,
            )?
            .value;
        }
        Ok(total)
    }

    pub fn total_mass(&self) -> Result<f64, EquilibriumError> {
        self.integrate_against(|_| 1.0, 1e-14)
    }

    pub fn omega_mass(&self) -> Result<f64, EquilibriumError> {
        let mut total = 0.0;
        for &iv in &self.support {
            total += integrate_edge_smoothed_gaps(|x, da, db| self.omega_gapped(x, da, db, iv), iv.0, iv.1, 1e-14, 1e-14)?
                .value;
        }
        Ok(total)
    }

    /// `∫ log|x - y| ψ(y) dy`, splitting the support at `x` so that the
    /// logarithmic singularity sits at a panel end.
    pub fn log_potential(&self, x: f64) -> Result<f64, EquilibriumError> {
        let mut total = 0.0;
        for &(a, b) in &self.support {
            let mut cuts = vec![a];
            if x > a && x < b {
                cuts.push(x);
            }
            cuts.push(b);
            for w in cuts.windows(2) {
                let mid = 0.5 * (w[0] + w[1]);
                for (lo, hi) in [(w[0], mid), (mid, w[1])] {
                    let integrand = |y: f64, dlo: f64, dhi: f64| {
                        // distance to x without cancellation when x is a panel end
                        let d = if x == lo {
                            dlo
                        } else if x == hi {
                            dhi
                        } else {
                            (x - y).abs()
                        };
                        if d == 0.0 {
                            return 0.0;
                        }
                        let (da, db) = ((lo - a) + dlo, (b - hi) + dhi);
                        d.ln() * self.psi_gapped(y, da, db, (a, b))
                    };
                    total += integrate_edge_smoothed_gaps(integrand, lo, hi, 1e-14, 1e-14)?.value;
                }
            }
        }
        Ok(total)
    }

    /// `ℓ = V(x) - 2 ∫ log|x - y| ψ(y) dy` at a support point `x`.
    pub fn fit_ell_at(&self, x: f64) -> Result<f64, EquilibriumError> {
        Ok(self.potential.value(x) - 2.0 * self.log_potential(x)?)
    }

    /// Richardson-extrapolated `lim_{x→0+} x^{-1/2} ψ(x)` from x = 1e-4, 1e-6.
    pub fn limit_psi_over_sqrt(&self) -> f64 {
        let g = |x: f64| self.psi(x) / x.sqrt();
        (100.0 * g(1e-6) - g(1e-4)) / 99.0
    }

    /// Richardson-extrapolated `lim_{x→0+} sqrt(x) ω(x)` from x = 1e-4, 1e-6.
    pub fn limit_sqrt_omega(&self) -> f64 {
        let g = |x: f64| x.sqrt() * self.omega(x);
        (100.0 * g(1e-6) - g(1e-4)) / 99.0
    }

    fn classify_edge_at_zero(&self) -> EdgeType {
        let left = self.support.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
        if left > 1e-12 {
            return EdgeType::InteriorGap;
        }
        let eps = 1e-6;
        let limit = self.limit_psi_over_sqrt();
        let at_eps = self.psi(eps) / eps.sqrt();
        if limit.is_finite() && limit > 0.0 && (at_eps - limit).abs() <= 1e-3 * limit.max(1e-3) {
            EdgeType::SoftMeetsHard
        } else {
            EdgeType::HardOnly
        }
    }

    /// Equilibrium measure of `W(x) = V(x^2)/2` on the real line:
    /// `ψ_W(x) = |x| ψ_V(x^2)`, `ω_W(x) = |x| ω_V(x^2)`, with
    /// `c1_W = c1_V / 2` and `c2_W = 2^{-2/3} c2_V`.
    pub fn symmetrize(&self) -> Result<EquilibriumMeasure, EquilibriumError> {
        if self.domain() != Domain::HalfLine {
            return Err(EquilibriumError::Domain("measure is already on the real line".into()));
        }
        let parent = Arc::new(self.clone());
        let mut support = Vec::new();
        for &(a, b) in &self.support {
            let (ra, rb) = (a.max(0.0).sqrt(), b.sqrt());
            if ra == 0.0 {
                support.push((-rb, rb));
            } else {
                support.push((-rb, -ra));
                support.push((ra, rb));
            }
        }
        support.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut m = EquilibriumMeasure {
            support,
            ell: f64::NAN,
            c1: self.c1.map(|c| 0.5 * c),
            c2: self.c2.map(|c| c * 2f64.powf(-2.0 / 3.0)),
            edge_type_at_zero: self.edge_type_at_zero,
            potential: Potential::symmetrized(self.potential.clone()),
            density: Density::Symmetrized(parent.clone()),
            omega: Omega::Symmetrized(parent),
        };
        // W(x) = V(x^2)/2 and log|x^2 - y^2| = log|x - y| + log|x + y| give ℓ_W = ℓ_V / 2
        m.ell = 0.5 * self.ell;
        Ok(m)
    }

    /// Central second difference of ψ at 0 with step `h`.
    pub fn psi_second_derivative_at_zero(&self, h: f64) -> f64 {
        (self.psi(h) - 2.0 * self.psi(0.0) + self.psi(-h)) / (h * h)
    }
}

/// Maps a point of a symmetrized support interval, with its end distances,
/// to `s = x^2` with the end distances in the parent interval.
fn symmetrized_gaps(x: f64, da: f64, db: f64, interval: (f64, f64)) -> (f64, f64, f64, (f64, f64)) {
    let (lo, hi) = interval;
    // at x = 0 the product |x| ψ_V(x^2) is a 0 * ∞ limit; step off by one tiny
    // increment, which changes nothing representable
    let x = if x == 0.0 { f64::MIN_POSITIVE.sqrt() } else { x };
    let ax = x.abs();
    let s = x * x;
    if lo < 0.0 && hi > 0.0 {
        let rb = hi;
        let to_edge = if x >= 0.0 { db } else { da };
        (s, s, to_edge * (rb + ax), (0.0, rb * rb))
    } else if lo >= 0.0 {
        let (ra, rb) = (lo, hi);
        (s, da * (ax + ra), db * (rb + ax), (ra * ra, rb * rb))
    } else {
        let (ra, rb) = (-hi, -lo);
        (s, db * (ax + ra), da * (rb + ax), (ra * ra, rb * rb))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semicircle_support_and_centre() {
        let m = equilibrium_vc(0.7).unwrap();
        let (a, b) = m.support[0];
        assert!((a - (2.0 - 2.0 * 0.7f64.sqrt())).abs() < 1e-15);
        assert!((b - (2.0 + 2.0 * 0.7f64.sqrt())).abs() < 1e-15);
        assert!((a - 0.32668).abs() < 1e-5 && (b - 3.67332).abs() < 1e-5);
        assert!((m.psi(2.0) - 1.0 / (PI * 0.7f64.sqrt())).abs() < 1e-15);
        assert_eq!(m.edge_type_at_zero, EdgeType::InteriorGap);
    }

    #[test]
    fn hard_edge_parameters_at_1_2() {
        let (a, b) = hard_edge_parameters(1.2);
        assert!((a - 0.0965074).abs() < 1e-7);
        assert!((b - 4.1930147).abs() < 1e-7);
        let m = equilibrium_vc(1.2).unwrap();
        assert_eq!(m.edge_type_at_zero, EdgeType::HardOnly);
        assert!(m.c1.is_none());
    }

    #[test]
    fn critical_constants() {
        let m = equilibrium_vc(1.0).unwrap();
        assert_eq!(m.support, vec![(0.0, 4.0)]);
        assert_eq!(m.edge_type_at_zero, EdgeType::SoftMeetsHard);
        for &x in &[0.1, 1.0, 2.0, 3.9] {
            assert!((m.psi(x) - (x * (4.0 - x)).sqrt() / (2.0 * PI)).abs() < 1e-15);
        }
        // numerical limits behind c1 and c2
        let c1 = PI / 2.0 * m.limit_psi_over_sqrt();
        let c2 = 2.0 * PI / c1.powf(1.0 / 3.0) * m.limit_sqrt_omega();
        assert!((c1 - 0.5).abs() < 1e-8);
        assert!((c2 - 2f64.powf(1.0 / 3.0)).abs() < 1e-8);
        assert_eq!(m.c1, Some(0.5));
        assert!((m.c2.unwrap() - 1.2599210).abs() < 1e-7);
    }

    #[test]
    fn limits_at_sample_points() {
        let m = equilibrium_vc(1.0).unwrap();
        for &x in &[1e-2, 1e-4, 1e-6] {
            let r = m.psi(x) / x.sqrt();
            let w = x.sqrt() * m.omega(x);
            // first-order behaviour: error proportional to x
            assert!((r - 1.0 / PI).abs() <= x);
            assert!((w - 1.0 / (2.0 * PI)).abs() <= x);
        }
        assert!((m.limit_psi_over_sqrt() - 1.0 / PI).abs() <= 1e-6);
        assert!((m.limit_sqrt_omega() - 1.0 / (2.0 * PI)).abs() <= 1e-6);
    }

    #[test]
    fn unit_mass_for_all_tested_c() {
        for &c in &[0.5, 0.8, 1.0, 1.1, 1.5] {
            let m = equilibrium_vc(c).unwrap();
            assert!((m.total_mass().unwrap() - 1.0).abs() <= 1e-10, "c = {c}");
            assert!((m.omega_mass().unwrap() - 1.0).abs() <= 1e-10, "c = {c}");
        }
    }

    #[test]
    fn semicircle_ell_closed_form_matches_quadrature() {
        let m = equilibrium_vc(0.7).unwrap();
        assert!((m.fit_ell_at(1.3).unwrap() - m.ell).abs() < 1e-9);
    }

    #[test]
    fn rejects_nonpositive_c() {
        assert!(equilibrium_vc(0.0).is_err());
        assert!(equilibrium_vc(-1.0).is_err());
    }

    #[test]
    fn symmetrized_critical_measure() {
        let v = equilibrium_vc(1.0).unwrap();
        let w = v.symmetrize().unwrap();
        assert_eq!(w.support, vec![(-2.0, 2.0)]);
        assert!(w.psi(0.0) < 1e-300);
        // psi_W(x) = x^2 sqrt(4 - x^2) / (2 pi) has zero slope at 0
        assert!((w.psi(1e-4) - w.psi(-1e-4)).abs() < 1e-20);
        let second = w.psi_second_derivative_at_zero(1e-3);
        assert!((second - 2.0 / PI).abs() < 1e-6);
        assert!((second - 2.0 * v.limit_psi_over_sqrt()).abs() < 1e-6);
        assert!((w.c1.unwrap() - 0.25).abs() < 1e-15);
        assert!((PI / 8.0 * second - 0.25).abs() < 1e-6);
        assert!((w.c2.unwrap() - 2f64.powf(-1.0 / 3.0)).abs() < 1e-15);
        assert!((PI / w.c1.unwrap().powf(1.0 / 3.0) * w.omega(1e-9) - w.c2.unwrap()).abs() < 1e-8);
        assert!((w.total_mass().unwrap() - 1.0).abs() <= 1e-10);
        assert!((w.omega_mass().unwrap() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn change_of_variables_identity() {
        for &c in &[0.7, 1.0, 1.2] {
            let v = equilibrium_vc(c).unwrap();
            let w = v.symmetrize().unwrap();
            for k in 0..3 {
                let lhs = w.integrate_against(|x| (x * x).powi(k), 1e-14).unwrap();
                let rhs = v.integrate_against(|s| s.powi(k), 1e-14).unwrap();
                assert!((lhs - rhs).abs() <= 1e-10, "c = {c}, k = {k}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn closed_form_constructor_recovers_critical_constants() {
        let m = EquilibriumMeasure::from_closed_form(Potential::model_vc(1.0).unwrap(), (0.0, 4.0), |x| {
            (x * (4.0 - x)).max(0.0).sqrt() / (2.0 * PI)
        })
        .unwrap();
        assert_eq!(m.edge_type_at_zero, EdgeType::SoftMeetsHard);
        assert!((m.c1.unwrap() - 0.5).abs() < 1e-8);
        assert!((m.c2.unwrap() - 2f64.powf(1.0 / 3.0)).abs() < 1e-8);
        let reference = equilibrium_vc(1.0).unwrap();
        assert!((m.ell - reference.ell).abs() < 1e-10);
    }
}
