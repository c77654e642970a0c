use std::f64::consts::PI;

use super::airy::airy_ai;
use super::bessel::{bessel_j, bessel_j_prime};
use super::SpecfunError;

/// Below this separation the diagonal formula (at the midpoint) replaces
/// the divided difference.
pub const DIAGONAL_PATCH: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassicalKernelTag {
    Sine,
    Airy,
    Bessel { alpha: f64 },
}

impl ClassicalKernelTag {
    pub fn bessel(alpha: f64) -> Result<Self, SpecfunError> {
        if alpha > -1.0 {
            Ok(Self::Bessel { alpha })
        } else {
            Err(SpecfunError::Domain(format!("Bessel kernel needs alpha > -1, got {alpha}")))
        }
    }
}

pub fn classical_kernel(tag: ClassicalKernelTag, x: f64, y: f64) -> Result<f64, SpecfunError> {
    match tag {
        ClassicalKernelTag::Sine => Ok(sine_kernel(x, y)),
        ClassicalKernelTag::Airy => Ok(airy_kernel(x, y)),
        ClassicalKernelTag::Bessel { alpha } => bessel_kernel(alpha, x, y),
    }
}

fn sine_kernel(x: f64, y: f64) -> f64 {
    let d = PI * (x - y);
    if (x - y).abs() < DIAGONAL_PATCH {
        let d2 = d * d;
        1.0 - d2 / 6.0 * (1.0 - d2 / 20.0)
    } else {
        d.sin() / d
    }
}

pub fn airy_kernel_diagonal(x: f64) -> f64 {
    let (a, ap) = airy_ai(x);
    ap * ap - x * a * a
}

fn airy_kernel(x: f64, y: f64) -> f64 {
    if (x - y).abs() < DIAGONAL_PATCH {
        // symmetric in (x - y), so the midpoint diagonal is first-order exact
        return airy_kernel_diagonal(0.5 * (x + y));
    }
    let (ax, apx) = airy_ai(x);
    let (ay, apy) = airy_ai(y);
    (ax * apy - apx * ay) / (x - y)
}

pub fn bessel_kernel_diagonal(alpha: f64, x: f64) -> Result<f64, SpecfunError> {
    if !(x > 0.0) {
        return Err(SpecfunError::Domain(format!("Bessel kernel needs x > 0, got {x}")));
    }
    let u = x.sqrt();
    let j = bessel_j(alpha, u)?;
    let jp = bessel_j_prime(alpha, u)?;
    Ok(0.25 * ((1.0 - alpha * alpha / x) * j * j + jp * jp))
}

fn bessel_kernel(alpha: f64, x: f64, y: f64) -> Result<f64, SpecfunError> {
    if !(alpha > -1.0) {
        return Err(SpecfunError::Domain(format!("Bessel kernel needs alpha > -1, got {alpha}")));
    }
    if !(x > 0.0 && y > 0.0) {
        return Err(SpecfunError::Domain(format!("Bessel kernel needs x, y > 0, got ({x}, {y})")));
    }
    if (x - y).abs() < DIAGONAL_PATCH {
        return bessel_kernel_diagonal(alpha, 0.5 * (x + y));
    }
    let (u, v) = (x.sqrt(), y.sqrt());
    let (ju, jv) = (bessel_j(alpha, u)?, bessel_j(alpha, v)?);
    let (jpu, jpv) = (bessel_j_prime(alpha, u)?, bessel_j_prime(alpha, v)?);
    Ok((ju * v * jpv - jv * u * jpu) / (2.0 * (x - y)))
}
