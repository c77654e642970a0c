use super::{HastingsMcLeod, PainleveError};
use crate::numcore::integrate_adaptive;
use crate::specfun::airy_ai;

/// Past `s_max + TAIL` the Airy tail contributes below `1e-60`.
const TAIL: f64 = 30.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TWTable {
    pub x: Vec<f64>,
    pub cdf: Vec<f64>,
    pub density: Vec<f64>,
}

fn require_classical(hm: &HastingsMcLeod, x: f64) -> Result<(), PainleveError> {
    if hm.nu != 0.0 {
        return Err(PainleveError::Domain(format!("Tracy-Widom needs nu = 0, got {}", hm.nu)));
    }
    if !(x >= hm.s_min) || !x.is_finite() {
        return Err(PainleveError::Domain(format!("x = {x} below s_min = {}", hm.s_min)));
    }
    Ok(())
}

/// `∫_x^∞ (y - x)^k q(y)^2 dy` with `q = Ai` past `s_max`.
fn moment(hm: &HastingsMcLeod, x: f64, k: i32) -> Result<f64, PainleveError> {
    let inner = if x < hm.s_max {
        integrate_adaptive(|y| (y - x).powi(k) * hm.q(y).powi(2), x, hm.s_max, 1e-15, 1e-13, 2000)?.value
    } else {
        0.0
    };
    let start = x.max(hm.s_max);
    let tail = integrate_adaptive(|y| (y - x).powi(k) * airy_ai(y).0.powi(2), start, start + TAIL, 1e-18, 1e-13, 2000)?;
    Ok(inner + tail.value)
}

/// `F(x) = exp(-∫_x^∞ (y - x) q(y)^2 dy)` for the classical solution.
pub fn tw_cdf(hm: &HastingsMcLeod, x: f64) -> Result<f64, PainleveError> {
    require_classical(hm, x)?;
    Ok((-moment(hm, x, 1)?).exp())
}

/// `F'(x) = F(x) ∫_x^∞ q(y)^2 dy`.
pub fn tw_density(hm: &HastingsMcLeod, x: f64) -> Result<f64, PainleveError> {
    require_classical(hm, x)?;
    Ok((-moment(hm, x, 1)?).exp() * moment(hm, x, 0)?)
}

pub fn tw_table(hm: &HastingsMcLeod, x: &[f64]) -> Result<TWTable, PainleveError> {
    let mut cdf = Vec::with_capacity(x.len());
    let mut density = Vec::with_capacity(x.len());
    for &v in x {
        cdf.push(tw_cdf(hm, v)?);
        density.push(tw_density(hm, v)?);
    }
    Ok(TWTable { x: x.to_vec(), cdf, density })
}

#[cfg(test)]
mod tests {
    use super::super::{hm_solve, DEFAULT_S_MAX, DEFAULT_S_MIN, DEFAULT_TOL};
    use super::*;

    fn classical() -> HastingsMcLeod {
        hm_solve(0.0, DEFAULT_S_MIN, DEFAULT_S_MAX, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn limits_and_monotonicity() {
        let hm = classical();
        assert!(tw_cdf(&hm, 6.0).unwrap() >= 1.0 - 1e-6);
        let (a, b, c) = (tw_cdf(&hm, -2.0).unwrap(), tw_cdf(&hm, 0.0).unwrap(), tw_cdf(&hm, 2.0).unwrap());
        assert!(a < b && b < c);
        assert!(tw_cdf(&hm, -8.0).unwrap() <= 1e-3);
        assert!(1.0 - tw_cdf(&hm, 4.0).unwrap() <= 1e-3);
    }

    #[test]
    fn density_integrates_to_cdf_increment() {
        let hm = classical();
        let total = integrate_adaptive(|x| tw_density(&hm, x).unwrap(), -8.0, 4.0, 1e-12, 1e-12, 500).unwrap();
        let inc = tw_cdf(&hm, 4.0).unwrap() - tw_cdf(&hm, -8.0).unwrap();
        assert!((total.value - inc).abs() <= 1e-8, "{} vs {inc}", total.value);
    }

    #[test]
    fn table_is_nondecreasing() {
        let hm = classical();
        let xs: Vec<f64> = (0..25).map(|k| -8.0 + 0.5 * k as f64).collect();
        let t = tw_table(&hm, &xs).unwrap();
        assert!(t.cdf.windows(2).all(|w| w[0] <= w[1]));
        assert!(t.density.iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn rejects_other_parameters_and_points() {
        let hm = classical();
        assert!(tw_cdf(&hm, DEFAULT_S_MIN - 1.0).is_err());
        let other = hm_solve(0.5, DEFAULT_S_MIN, DEFAULT_S_MAX, DEFAULT_TOL).unwrap();
        assert!(tw_cdf(&other, 0.0).is_err());
    }
}
