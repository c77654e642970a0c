use std::f64::consts::PI;
use std::sync::Arc;

use super::asymptotic::CritSeries;
use super::{check_hm, LimitKernelError, DIAGONAL_PATCH};
use crate::numcore::{ode_solve_with, DenseSolution, OdeOptions};
use crate::painleve::{shared_cache, HastingsMcLeod};

/// `(F_1, F_2)` on `z_min <= |z| <= z_max`; stored for `z > 0` and extended
/// with `F_1` even, `F_2` odd.
#[derive(Debug, Clone)]
pub struct CritIIContext {
    pub beta: f64,
    pub s: f64,
    pub q: f64,
    pub r: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub hm: Arc<HastingsMcLeod>,
    pub boundary_truncation: f64,
    dense: DenseSolution,
}

/// `z_max = √x_max`, integrating down to `z = 1e-2`.
pub fn solve_crit_ii(beta: f64, s: f64, x_max: f64) -> Result<CritIIContext, LimitKernelError> {
    if !(beta > -0.5) {
        return Err(LimitKernelError::Domain(format!("beta must exceed -1/2, got {beta}")));
    }
    let hm = shared_cache().get(beta)?;
    solve_crit_ii_with(hm, beta, s, x_max.sqrt(), 1e-2, 1e-12)
}

pub fn solve_crit_ii_with(
    hm: Arc<HastingsMcLeod>,
    beta: f64,
    s: f64,
    z_max: f64,
    z_min: f64,
    rtol: f64,
) -> Result<CritIIContext, LimitKernelError> {
    if !(beta > -0.5) || !beta.is_finite() {
        return Err(LimitKernelError::Domain(format!("beta must exceed -1/2, got {beta}")));
    }
    if !(z_max * z_max >= 30.0) || !(z_min > 0.0 && z_min < 1.0) {
        return Err(LimitKernelError::Domain(format!("need z_max^2 >= 30 and 0 < z_min < 1, got [{z_min}, {z_max}]")));
    }
    check_hm(&hm, beta, s)?;
    let (q, r) = (hm.q(s), hm.r(s));
    let (f1, f2, truncation) = CritSeries::new(beta, s, q, r).eval(z_max);
    let mut ode = OdeOptions::new(rtol, rtol * 1e-2);
    ode.max_steps = 2_000_000;
    let dense = ode_solve_with(
        |z, y, dy| {
            let (a, b) = rhs(beta, s, q, r, z, y[0], y[1]);
            dy[0] = a;
            dy[1] = b;
        },
        z_max,
        z_min,
        &[f1, f2],
        &ode,
    )?;
    Ok(CritIIContext { beta, s, q, r, z_min, z_max, hm, boundary_truncation: truncation, dense })
}

fn rhs(beta: f64, s: f64, q: f64, r: f64, z: f64, f1: f64, f2: f64) -> (f64, f64) {
    let a = 4.0 * z * q + beta / z;
    let b = 4.0 * z * z + s + 2.0 * q * q + 2.0 * r;
    let c = -4.0 * z * z - s - 2.0 * q * q + 2.0 * r;
    (a * f1 + b * f2, c * f1 - a * f2)
}

impl CritIIContext {
    /// `(F_1(z), F_2(z))`
    pub fn f(&self, z: f64) -> Result<(f64, f64), LimitKernelError> {
        let a = z.abs();
        if !(a >= self.z_min && a <= self.z_max) {
            return Err(LimitKernelError::Domain(format!("|z| = {a} outside [{}, {}]", self.z_min, self.z_max)));
        }
        let mut y = [0.0; 2];
        self.dense.eval_into(a, &mut y)?;
        Ok(if z < 0.0 { (y[0], -y[1]) } else { (y[0], y[1]) })
    }

    /// `(F_1, F_2, F_1', F_2')`
    pub fn f_with_derivatives(&self, z: f64) -> Result<(f64, f64, f64, f64), LimitKernelError> {
        let (a, b) = self.f(z.abs())?;
        let (da, db) = rhs(self.beta, self.s, self.q, self.r, z.abs(), a, b);
        Ok(if z < 0.0 { (a, -b, -da, db) } else { (a, b, da, db) })
    }

    pub fn diagonal(&self, z: f64) -> Result<f64, LimitKernelError> {
        let (f1, f2, d1, d2) = self.f_with_derivatives(z)?;
        Ok((d1 * f2 - f1 * d2) / PI)
    }

    /// `(F_1(x) F_2(y) - F_1(y) F_2(x)) / (π (x - y))`
    pub fn eval(&self, x: f64, y: f64) -> Result<f64, LimitKernelError> {
        if (x - y).abs() <= DIAGONAL_PATCH * x.abs().max(1.0) {
            self.f(x)?;
            self.f(y)?;
            return self.diagonal(0.5 * (x + y));
        }
        let (a1, a2) = self.f(x)?;
        let (b1, b2) = self.f(y)?;
        Ok((a1 * b2 - b1 * a2) / (PI * (x - y)))
    }
}

#[cfg(test)]
mod tests {
    use super::super::solve_fg;
    use super::*;

    #[test]
    fn substitution_matches_direct_system() {
        let c = solve_crit_ii(0.5, 0.0, 60.0).unwrap();
        let fg = solve_fg(0.0, 0.0, 60.0, 1e-12).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..=100 {
            let x = 0.25 + (9.0 - 0.25) * k as f64 / 100.0;
            let (f1, f2) = c.f(x.sqrt()).unwrap();
            let (f, g) = fg.fg(x).unwrap();
            worst = worst.max((x.powf(-0.25) * f1 - f).abs()).max((x.powf(0.25) * f2 - g).abs());
        }
        assert!(worst <= 1e-6, "{worst}");
    }

    #[test]
    fn parity_and_symmetry() {
        let c = solve_crit_ii(0.5, 0.0, 60.0).unwrap();
        let (a, b) = (c.f(1.3).unwrap(), c.f(-1.3).unwrap());
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, -b.1);
        for &(x, y) in &[(0.4, -1.1), (-2.0, 0.7), (1.5, 2.5), (-0.3, -0.9)] {
            assert!((c.eval(x, y).unwrap() - c.eval(y, x).unwrap()).abs() <= 1e-15);
        }
        let d = (c.diagonal(-0.8).unwrap() - c.diagonal(0.8).unwrap()).abs();
        assert!(d <= 1e-15, "{d}");
    }

    #[test]
    fn zeros_follow_the_phase() {
        let beta = 0.5;
        let c = solve_crit_ii(beta, 0.0, 60.0).unwrap();
        let theta = |x: f64| 4.0 * x.powi(3) / 3.0 - 0.5 * PI * beta;
        // predicted zero: θ = π/2 + kπ closest to x = 5
        let k = ((theta(5.0) - 0.5 * PI) / PI).round();
        let target = 0.5 * PI + k * PI;
        let (mut lo, mut hi) = (4.9, 5.1);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if (theta(mid) - target) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let predicted = 0.5 * (lo + hi);
        let (mut a, mut b) = (predicted - 0.01, predicted + 0.01);
        let fa = c.f(a).unwrap().0;
        assert!(fa * c.f(b).unwrap().0 < 0.0, "no sign change within 1e-2 of {predicted}");
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if c.f(m).unwrap().0 * fa > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        assert!((0.5 * (a + b) - predicted).abs() <= 1e-2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(solve_crit_ii(-0.5, 0.0, 60.0).is_err());
        assert!(solve_crit_ii(0.5, 0.0, 10.0).is_err());
        let c = solve_crit_ii(0.5, 0.0, 60.0).unwrap();
        assert!(c.f(0.0).is_err());
        assert!(c.f(-9.0).is_err());
    }
}
