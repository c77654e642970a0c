//! Airy function Ai and its derivative on the real line.
//!
//! For |x| <= 8 the Maclaurin series is summed in double-double, which
//! absorbs the cancellation between the two power series for positive x.
//! Beyond that the standard large-argument expansions are truncated at
//! their smallest term.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::numcore::DoubleDouble;

/// Handoff between the series and the asymptotic expansions.
pub const AIRY_SWITCH: f64 = 8.0;

/// Ai(0) = 3^{-2/3}/Γ(2/3) as a double-double.
pub const AI0: DoubleDouble = DoubleDouble::new(0.3550280538878172, 2.05233632436212e-17);
/// -Ai'(0) = 3^{-1/3}/Γ(1/3) as a double-double.
pub const MINUS_AIP0: DoubleDouble = DoubleDouble::new(0.2588194037928068, -2.522243111610832e-17);

/// Returns `(Ai(x), Ai'(x))`.
pub fn airy_ai(x: f64) -> (f64, f64) {
    if x.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    if x.abs() <= AIRY_SWITCH {
        airy_series(x)
    } else if x > 0.0 {
        airy_asymptotic_positive(x)
    } else {
        airy_asymptotic_negative(-x)
    }
}

/// Maclaurin series in double-double; accurate for moderate |x|.
pub fn airy_series(x: f64) -> (f64, f64) {
    let (ai, aip) = airy_series_dd(x);
    (ai.to_f64(), aip.to_f64())
}

pub fn airy_series_dd(x: f64) -> (DoubleDouble, DoubleDouble) {
    let xd = DoubleDouble::from_f64(x);
    let x3 = xd * xd * xd;
    let tiny = 1e-34;

    // f = sum t_k, g = sum u_k and their derivatives
    let mut t = DoubleDouble::ONE;
    let mut u = xd;
    let mut f = t;
    let mut g = u;
    let mut fp = DoubleDouble::ZERO;
    let mut gp = DoubleDouble::ONE;
    let mut tp = (xd * xd).mul_f64(0.5);
    let mut up = DoubleDouble::ONE;
    fp += tp;
    let mut k = 1usize;
    loop {
        let kf = k as f64;
        t = t * x3 / DoubleDouble::from_f64((3.0 * kf - 1.0) * (3.0 * kf));
        u = u * x3 / DoubleDouble::from_f64((3.0 * kf) * (3.0 * kf + 1.0));
        up = up * x3 / DoubleDouble::from_f64((3.0 * kf) * (3.0 * kf - 2.0));
        f += t;
        g += u;
        gp += up;
        if k >= 2 {
            tp = tp * x3 / DoubleDouble::from_f64((3.0 * kf - 1.0) * (3.0 * kf - 3.0));
            fp += tp;
        }
        let small = |term: DoubleDouble, sum: DoubleDouble| {
            term.abs().to_f64() <= tiny * sum.abs().to_f64().max(1e-300)
        };
        if k > 3 && small(t, f) && small(u, g) && small(tp, fp) && small(up, gp) {
            break;
        }
        if k > 400 {
            break;
        }
        k += 1;
    }
    let ai = AI0 * f - MINUS_AIP0 * g;
    let aip = AI0 * fp - MINUS_AIP0 * gp;
    (ai, aip)
}

/// Coefficients u_k of the large-argument expansions, up to `n` terms.
fn u_coeffs(n: usize) -> Vec<f64> {
    let mut u = Vec::with_capacity(n);
    u.push(1.0);
    for k in 1..n {
        let kf = k as f64;
        let prev = u[k - 1];
        u.push(prev * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf));
    }
    u
}

fn v_from_u(u: &[f64]) -> Vec<f64> {
    u.iter()
        .enumerate()
        .map(|(k, &uk)| {
            let kf = k as f64;
            -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk
        })
        .collect()
}

/// Index range where the terms `c_k / zeta^k` are still decreasing.
fn useful_terms(c: &[f64], zeta: f64) -> usize {
    let mut last = f64::INFINITY;
    let mut zk = 1.0;
    for (k, ck) in c.iter().enumerate() {
        let term = (ck / zk).abs();
        if k > 1 && (term > last || term < 1e-18) {
            return k;
        }
        last = term;
        zk *= zeta;
    }
    c.len()
}

fn airy_asymptotic_positive(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let u = u_coeffs(80);
    let v = v_from_u(&u);
    let nu = useful_terms(&u, zeta);
    let nv = useful_terms(&v, zeta);
    let mut su = 0.0;
    let mut zk = 1.0;
    for (k, uk) in u.iter().enumerate().take(nu) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        su += sign * uk / zk;
        zk *= zeta;
    }
    let mut sv = 0.0;
    zk = 1.0;
    for (k, vk) in v.iter().enumerate().take(nv) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sv += sign * vk / zk;
        zk *= zeta;
    }
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let q = x.powf(0.25);
    (e / q * su, -e * q * sv)
}

fn airy_asymptotic_negative(z: f64) -> (f64, f64) {
    // z = -x > 0
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let u = u_coeffs(80);
    let v = v_from_u(&u);
    let n = useful_terms(&u, zeta).min(useful_terms(&v, zeta));
    let (mut ue, mut uo, mut ve, mut vo) = (0.0, 0.0, 0.0, 0.0);
    let mut zk = 1.0;
    for k in 0..n {
        // sign (-1)^{floor(k/2)}
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            ue += sign * u[k] / zk;
            ve += sign * v[k] / zk;
        } else {
            uo += sign * u[k] / zk;
            vo += sign * v[k] / zk;
        }
        zk *= zeta;
    }
    let (s, c) = (zeta - FRAC_PI_4).sin_cos();
    let q = z.powf(0.25);
    let rpi = 1.0 / PI.sqrt();
    let ai = rpi / q * (c * ue + s * uo);
    let aip = rpi * q * (s * ve - c * vo);
    (ai, aip)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn values_at_origin() {
        let (ai, aip) = airy_ai(0.0);
        assert!(rel(ai, 0.3550280538878172) < 1e-15);
        assert!(rel(aip, -0.2588194037928068) < 1e-15);
    }

    #[test]
    fn origin_constants_from_gamma() {
        use crate::specfun::gamma::gamma;
        assert!(rel(AI0.to_f64(), 3f64.powf(-2.0 / 3.0) / gamma(2.0 / 3.0)) < 1e-14);
        assert!(rel(MINUS_AIP0.to_f64(), 3f64.powf(-1.0 / 3.0) / gamma(1.0 / 3.0)) < 1e-14);
    }

    #[test]
    fn reference_values() {
        // mpmath, 30 digits
        let cases = [
            (5.0, 1.0834442813607441e-4),
            (-5.0, 0.350761009024114),
            (-15.0, 0.278217490870829),
            (8.0, 4.6922076160992316e-8),
            (10.0, 1.1047532552898686e-10),
        ];
        for (x, want) in cases {
            let (ai, _) = airy_ai(x);
            assert!(rel(ai, want) < 1e-12, "Ai({x}) = {ai}, want {want}");
        }
    }

    #[test]
    fn series_and_asymptotics_overlap() {
        for &x in &[7.5, 8.0, 8.5, -7.5, -8.0, -8.5] {
            let (a1, d1) = airy_series(x);
            let (a2, d2) = if x > 0.0 { airy_asymptotic_positive(x) } else { airy_asymptotic_negative(-x) };
            assert!(rel(a2, a1) < 1e-11, "x = {x}: {a1} vs {a2}");
            assert!(rel(d2, d1) < 1e-11, "x = {x}: {d1} vs {d2}");
        }
    }

    #[test]
    fn satisfies_airy_equation() {
        // Ai'' = x Ai via a five-point difference of Ai'
        let h = 1e-3;
        for k in 0..=60 {
            let x = -15.0 + 0.5 * k as f64;
            let d = |t: f64| airy_ai(t).1;
            let app = (-d(x + 2.0 * h) + 8.0 * d(x + h) - 8.0 * d(x - h) + d(x - 2.0 * h)) / (12.0 * h);
            let (ai, _) = airy_ai(x);
            assert!((app - x * ai).abs() <= 1e-9, "x = {x}: {app} vs {}", x * ai);
        }
    }
}
