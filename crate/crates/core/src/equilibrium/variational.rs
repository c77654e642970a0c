use super::{Domain, EquilibriumError, EquilibriumMeasure, Potential};

#[derive(Debug, Clone, PartialEq)]
pub struct VariationalReport {
    /// `max |U(x)|` over grid points in the support.
    pub max_equality_residual: f64,
    /// `min(-U(x))` over grid points off the support (`+∞` if there are none).
    pub min_off_support_slack: f64,
    /// Mean of `V(x) - 2 ∫ log|x-y| ψ(y) dy` over the support points.
    pub fitted_ell: f64,
    /// `(x, U(x))` for every grid point, in grid order.
    pub values: Vec<(f64, f64)>,
}

impl VariationalReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.max_equality_residual <= tol && self.min_off_support_slack > 0.0
    }
}

/// Evaluates `U(x) = 2 ∫ log|x - y| ψ(y) dy - V(x) + ℓ` on `grid`.
pub fn check_variational(
    measure: &EquilibriumMeasure,
    field: &Potential,
    grid: &[f64],
) -> Result<VariationalReport, EquilibriumError> {
    let mut values = Vec::with_capacity(grid.len());
    let mut max_eq: f64 = 0.0;
    let mut min_slack = f64::INFINITY;
    let mut ell_sum = 0.0;
    let mut ell_count = 0usize;
    for &x in grid {
        if field.domain() == Domain::HalfLine && x < 0.0 {
            return Err(EquilibriumError::Domain(format!("grid point {x} outside [0, ∞)")));
        }
        let lp = 2.0 * measure.log_potential(x)?;
        let u = lp - field.value(x) + measure.ell;
        if measure.in_support(x) {
            max_eq = max_eq.max(u.abs());
            ell_sum += field.value(x) - lp;
            ell_count += 1;
        } else {
            min_slack = min_slack.min(-u);
        }
        values.push((x, u));
    }
    let fitted_ell = if ell_count > 0 { ell_sum / ell_count as f64 } else { f64::NAN };
    Ok(VariationalReport { max_equality_residual: max_eq, min_off_support_slack: min_slack, fitted_ell, values })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularPoint {
    pub x: f64,
    /// Distance of the sampled quantity from the singular threshold.
    pub margin: f64,
}

/// Grid-sampled singular points: I = equality in the variational
/// inequality off the support, II = density vanishing inside the support,
/// III = density vanishing faster than a square root at a soft edge.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SingularityReport {
    pub case_i_points: Vec<SingularPoint>,
    pub case_ii_points: Vec<SingularPoint>,
    pub case_iii_points: Vec<SingularPoint>,
}

impl SingularityReport {
    pub fn is_regular(&self) -> bool {
        self.case_i_points.is_empty() && self.case_ii_points.is_empty() && self.case_iii_points.is_empty()
    }
}

/// Samples `samples` points per support interval (and as many in a band of
/// width `off_band` on either side) and flags singular points.
pub fn singularity_report(
    measure: &EquilibriumMeasure,
    samples: usize,
    off_band: f64,
) -> Result<SingularityReport, EquilibriumError> {
    let mut report = SingularityReport::default();
    let tol = 1e-6;
    let half_line = measure.domain() == Domain::HalfLine;

    // case I: U(x) = 0 off the support
    let mut off = Vec::new();
    for &(a, b) in &measure.support {
        for k in 1..=samples {
            let t = off_band * k as f64 / samples as f64;
            for x in [a - t, b + t] {
                if (half_line && x < 0.0) || measure.in_support(x) {
                    continue;
                }
                off.push(x);
            }
        }
    }
    let rep = check_variational(measure, &measure.potential, &off)?;
    for (x, u) in rep.values {
        if u > -tol {
            report.case_i_points.push(SingularPoint { x, margin: -u });
        }
    }

    // case II: psi vanishing at interior points
    let peak = measure
        .support
        .iter()
        .flat_map(|&(a, b)| (1..samples).map(move |k| a + (b - a) * k as f64 / samples as f64))
        .map(|x| measure.psi(x))
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    for &(a, b) in &measure.support {
        let h = (b - a) / samples as f64;
        let xs: Vec<f64> = (1..samples).map(|k| a + h * k as f64).collect();
        for w in xs.windows(3) {
            let (l, m, r) = (measure.psi(w[0]), measure.psi(w[1]), measure.psi(w[2]));
            if m <= l && m <= r && m < tol * peak {
                report.case_ii_points.push(SingularPoint { x: w[1], margin: m / peak });
            }
        }
        // interior point exactly on a sample that is an interval seam (e.g. 0 for W)
        if a < 0.0 && b > 0.0 && measure.psi(0.0) < tol * peak && !report.case_ii_points.iter().any(|p| p.x.abs() < h) {
            report.case_ii_points.push(SingularPoint { x: 0.0, margin: measure.psi(0.0) / peak });
        }
    }

    // case III: faster-than-square-root vanishing at soft edges
    for &(a, b) in &measure.support {
        for (edge, dir) in [(a, 1.0), (b, -1.0)] {
            if half_line && edge == 0.0 {
                continue; // hard wall
            }
            let r1 = measure.psi(edge + dir * 1e-4) / 1e-2;
            let r2 = measure.psi(edge + dir * 1e-6) / 1e-3;
            if r1.is_finite() && r2 < 0.5 * r1 {
                report.case_iii_points.push(SingularPoint { x: edge, margin: r2 / r1 });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::super::equilibrium_vc;
    use super::*;

    #[test]
    fn critical_measure_satisfies_equality() {
        let m = equilibrium_vc(1.0).unwrap();
        let grid: Vec<f64> = (0..50).map(|k| 4.0 * (k as f64 + 0.5) / 50.0).collect();
        let rep = check_variational(&m, &m.potential, &grid).unwrap();
        assert!(rep.max_equality_residual <= 1e-7, "{}", rep.max_equality_residual);
    }

    #[test]
    fn strict_inequality_off_support() {
        let m = equilibrium_vc(0.7).unwrap();
        let rep = check_variational(&m, &m.potential, &[0.1]).unwrap();
        assert!(rep.values[0].1 < 0.0);
        assert!(rep.min_off_support_slack > 1e-3);
        for &c in &[1.0, 1.2] {
            let m = equilibrium_vc(c).unwrap();
            let b = m.support[0].1;
            let rep = check_variational(&m, &m.potential, &[b + 0.05, b + 1.0, b + 5.0]).unwrap();
            assert!(rep.min_off_support_slack > 0.0, "c = {c}");
        }
    }

    #[test]
    fn ell_is_one_constant() {
        let m = equilibrium_vc(1.2).unwrap();
        let g1: Vec<f64> = (0..10).map(|k| 0.1 + 0.15 * k as f64).collect();
        let g2: Vec<f64> = (0..10).map(|k| 2.2 + 0.18 * k as f64).collect();
        let e1 = check_variational(&m, &m.potential, &g1).unwrap().fitted_ell;
        let e2 = check_variational(&m, &m.potential, &g2).unwrap().fitted_ell;
        assert!((e1 - e2).abs() <= 1e-7);
        assert!((e1 - m.ell).abs() <= 1e-7);
    }

    #[test]
    fn model_family_is_regular() {
        for &c in &[0.7, 0.9, 1.0, 1.2] {
            let m = equilibrium_vc(c).unwrap();
            let rep = singularity_report(&m, 40, 1.0).unwrap();
            assert!(rep.is_regular(), "c = {c}: {rep:?}");
        }
    }

    #[test]
    fn symmetrized_critical_measure_has_interior_zero() {
        let w = equilibrium_vc(1.0).unwrap().symmetrize().unwrap();
        let rep = singularity_report(&w, 40, 1.0).unwrap();
        assert!(rep.case_i_points.is_empty());
        assert!(rep.case_iii_points.is_empty());
        assert_eq!(rep.case_ii_points.len(), 1);
        assert_eq!(rep.case_ii_points[0].x, 0.0);
        let grid: Vec<f64> = (0..21).map(|k| -1.9 + 0.19 * k as f64).collect();
        let var = check_variational(&w, &w.potential, &grid).unwrap();
        assert!(var.max_equality_residual <= 1e-7);
    }
}
