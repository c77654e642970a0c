use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::gamma::gamma;
use super::SpecfunError;
use crate::numcore::DoubleDouble;

/// Above this argument the Hankel expansion replaces the ascending series.
const BESSEL_SWITCH: f64 = 25.0;

/// Bessel function of the first kind J_ν(x) for ν > -1 and x >= 0.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64, SpecfunError> {
    if !(nu > -1.0) {
        return Err(SpecfunError::Domain(format!("Bessel order must exceed -1, got {nu}")));
    }
    if !(x >= 0.0) {
        return Err(SpecfunError::Domain(format!("Bessel argument must be nonnegative, got {x}")));
    }
    if x == 0.0 {
        return if nu == 0.0 {
            Ok(1.0)
        } else if nu > 0.0 {
            Ok(0.0)
        } else {
            Err(SpecfunError::Domain(format!("J_{nu} is unbounded at the origin")))
        };
    }
    if x <= BESSEL_SWITCH.max(nu * nu) {
        Ok(series(nu, x))
    } else {
        Ok(hankel(nu, x))
    }
}

/// Derivative J_ν'(x) = (ν/x) J_ν(x) - J_{ν+1}(x), for x > 0.
pub fn bessel_j_prime(nu: f64, x: f64) -> Result<f64, SpecfunError> {
    if !(x > 0.0) {
        return Err(SpecfunError::Domain(format!("derivative needs x > 0, got {x}")));
    }
    Ok(nu / x * bessel_j(nu, x)? - bessel_j(nu + 1.0, x)?)
}

fn series(nu: f64, x: f64) -> f64 {
    // (x/2)^ν Σ (-x²/4)^k / (k! Γ(ν+k+1)), summed in double-double
    let q = DoubleDouble::from_f64(x * 0.5);
    let mq2 = -(q * q);
    let mut term = DoubleDouble::ONE;
    let mut sum = term;
    let mut k = 1usize;
    loop {
        let kf = k as f64;
        // the denominator is formed exactly; rounding it would be amplified
        // by the size of the largest terms
        let den = DoubleDouble::from_f64(nu).add_f64(kf).mul_f64(kf);
        term = term * mq2 / den;
        sum += term;
        if kf > 0.5 * x && term.abs().to_f64() <= 1e-33 * sum.abs().to_f64().max(1e-300) {
            break;
        }
        if k > 1000 {
            break;
        }
        k += 1;
    }
    (0.5 * x).powf(nu) / gamma(nu + 1.0) * sum.to_f64()
}

fn hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p: f64 = 0.0;
    let mut qs: f64 = 0.0;
    let mut a: f64 = 1.0;
    let mut last = f64::INFINITY;
    let mut xk: f64 = 1.0;
    for k in 0..200 {
        let term = a / xk;
        if k > 2 && (term.abs() > last || term.abs() < 1e-17 * p.abs().max(1e-300)) {
            break;
        }
        last = term.abs();
        // (-1)^{floor(k/2)}, even terms go to P, odd to Q
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            qs += sign * term;
        }
        let kn = (k + 1) as f64;
        a *= (mu - (2.0 * kn - 1.0).powi(2)) / (8.0 * kn);
        xk *= x;
    }
    let w = x - nu * FRAC_PI_2 - FRAC_PI_4;
    let (s, c) = w.sin_cos();
    (2.0 / (PI * x)).sqrt() * (c * p - s * qs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1.0, 0.0).unwrap(), 0.0);
        assert!(bessel_j(0.5, -1.0).is_err());
        assert!(bessel_j(-1.5, 1.0).is_err());
    }

    #[test]
    fn half_order_closed_form() {
        let x = PI / 2.0;
        assert!(rel(bessel_j(0.5, x).unwrap(), 2.0 / PI) < 1e-14);
        for &x in &[0.3, 2.0, 11.0, 24.0, 26.0, 37.5, 49.0] {
            let want = (2.0 / (PI * x)).sqrt() * x.sin();
            assert!(rel(bessel_j(0.5, x).unwrap(), want) < 1e-10, "x = {x}");
            let want = (2.0 / (PI * x)).sqrt() * x.cos();
            assert!(rel(bessel_j(-0.5, x).unwrap(), want) < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn reference_values() {
        // mpmath
        assert!(rel(bessel_j(0.3, 7.5).unwrap(), 0.290774853350082) < 1e-12);
        assert!(rel(bessel_j(2.5, 40.0).unwrap(), -0.0875143114093235) < 1e-12);
        assert!(rel(bessel_j(-0.5, 3.0).unwrap(), -0.456048820794633) < 1e-12);
    }

    #[test]
    fn series_and_hankel_overlap() {
        for &nu in &[-0.7, 0.0, 0.3, 1.0, 2.5] {
            for &x in &[24.0, 25.0, 26.0] {
                let (a, b) = (series(nu, x), hankel(nu, x));
                assert!((a - b).abs() < 1e-12, "nu = {nu}, x = {x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn three_term_recurrence() {
        for &nu in &[-0.4, 0.2, 1.7] {
            for &x in &[0.5, 3.0, 17.0, 33.0, 48.0] {
                let lhs = bessel_j(nu, x).unwrap() + bessel_j(nu + 2.0, x).unwrap();
                let rhs = 2.0 * (nu + 1.0) / x * bessel_j(nu + 1.0, x).unwrap();
                assert!((lhs - rhs).abs() < 1e-12, "nu = {nu}, x = {x}");
            }
        }
    }
}
