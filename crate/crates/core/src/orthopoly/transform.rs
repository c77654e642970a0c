use std::sync::Arc;

use super::{orthonormal_values, stieltjes_table, CDKernelContext, OrthoError, PrecisionMode, WeightSpec};
use crate::equilibrium::Potential;

/// Polynomial identities are compared on this many points of `(0, 2)`.
const POLY_GRID: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformResiduals {
    pub res_plus: f64,
    /// Only for `alpha > 0`.
    pub res_minus: Option<f64>,
    pub res_p2n: f64,
    /// Only for `alpha > 0`.
    pub res_q2n1: Option<f64>,
}

/// Compares the half-line kernel `K^{(α,V)}_{n,N}` against the even/odd
/// parts of the symmetric kernels `K^{(2α±1,W)}_{2n,2N}` at `pairs`, and the
/// polynomials `P_{2n}(x)`, `Q_{2n+1}(x)` against `p_n(x^2)`, `x p_n(x^2)`.
pub fn quad_transform_residual(
    alpha: f64,
    v: &Potential,
    n: usize,
    n_field: f64,
    pairs: &[(f64, f64)],
) -> Result<TransformResiduals, OrthoError> {
    if n == 0 {
        return Err(OrthoError::Domain("n must be at least 1".into()));
    }
    if pairs.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(OrthoError::Domain("transform pairs must be positive".into()));
    }
    let wv = WeightSpec::hard_edge(alpha, v.clone(), n_field)?;
    let tv = Arc::new(stieltjes_table(&wv, n + 1, PrecisionMode::Auto)?);
    let kv = CDKernelContext::new(wv, tv.clone(), n)?;
    let poly_x: Vec<f64> = (0..POLY_GRID).map(|k| 2.0 * (k as f64 + 0.5) / POLY_GRID as f64).collect();

    let plus = symmetric_side(2.0 * alpha + 1.0, v, n, n_field)?;
    let res_plus = kernel_residual(&kv, &plus, pairs, 1.0)?;
    let res_p2n = poly_residual(&tv, &plus, n, 2 * n, &poly_x, false)?;

    let (res_minus, res_q2n1) = if alpha > 0.0 {
        let minus = symmetric_side(2.0 * alpha - 1.0, v, n, n_field)?;
        (
            Some(kernel_residual(&kv, &minus, pairs, -1.0)?),
            Some(poly_residual(&tv, &minus, n, 2 * n + 1, &poly_x, true)?),
        )
    } else {
        (None, None)
    };
    Ok(TransformResiduals { res_plus, res_minus, res_p2n, res_q2n1 })
}

fn symmetric_side(beta: f64, v: &Potential, n: usize, n_field: f64) -> Result<CDKernelContext, OrthoError> {
    let w = WeightSpec::symmetric(beta, v.clone(), 2.0 * n_field)?;
    let t = stieltjes_table(&w, 2 * n + 2, PrecisionMode::Auto)?;
    CDKernelContext::new(w, Arc::new(t), 2 * n)
}

fn kernel_residual(
    kv: &CDKernelContext,
    kw: &CDKernelContext,
    pairs: &[(f64, f64)],
    sign: f64,
) -> Result<f64, OrthoError> {
    let mut worst: f64 = 0.0;
    for &(x, y) in pairs {
        let (sx, sy) = (x.sqrt(), y.sqrt());
        let rhs = 0.5 * (x * y).powf(-0.25) * (kw.cd_kernel(sx, sy)? + sign * kw.cd_kernel(sx, -sy)?);
        worst = worst.max((kv.cd_kernel(x, y)? - rhs).abs());
    }
    Ok(worst)
}

fn poly_residual(
    tv: &super::RecurrenceTable,
    kw: &CDKernelContext,
    n: usize,
    degree: usize,
    xs: &[f64],
    odd: bool,
) -> Result<f64, OrthoError> {
    let mut worst: f64 = 0.0;
    for &x in xs {
        let big = orthonormal_values(&kw.table, x, degree + 1)?[degree];
        let small = orthonormal_values(tv, x * x, n + 1)?[n];
        let rhs = if odd { x * small } else { small };
        worst = worst.max((big - rhs).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Deterministic points in `(0.2, 4)^2` from a fixed linear congruential walk.
    pub(crate) fn pairs(count: usize) -> Vec<(f64, f64)> {
        let mut state: u64 = 0x2545_f491_4f6c_dd1d;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            0.2 + 3.8 * ((state >> 11) as f64 / (1u64 << 53) as f64)
        };
        (0..count).map(|_| (next(), next())).collect()
    }

    #[test]
    fn plus_relation() {
        let v = Potential::model_vc(1.0).unwrap();
        let r = quad_transform_residual(0.3, &v, 3, 3.0, &pairs(20)).unwrap();
        assert!(r.res_plus <= 1e-10, "{r:?}");
        let r0 = quad_transform_residual(0.0, &v, 3, 3.0, &pairs(20)).unwrap();
        assert!(r0.res_plus <= 1e-10, "{r0:?}");
        assert!(r0.res_minus.is_none() && r0.res_q2n1.is_none());
    }

    #[test]
    fn minus_relation() {
        let v = Potential::model_vc(1.0).unwrap();
        let r = quad_transform_residual(0.7, &v, 3, 3.0, &pairs(20)).unwrap();
        assert!(r.res_plus <= 1e-10, "{r:?}");
        assert!(r.res_minus.unwrap() <= 1e-10, "{r:?}");
        assert!(r.res_q2n1.unwrap() <= 1e-10, "{r:?}");
    }

    #[test]
    fn even_polynomial_identity() {
        let v = Potential::model_vc(1.0).unwrap();
        let r = quad_transform_residual(0.3, &v, 4, 4.0, &pairs(5)).unwrap();
        assert!(r.res_p2n <= 1e-10, "{r:?}");
    }

    #[test]
    fn symmetric_family_has_parity() {
        let v = Potential::model_vc(0.8).unwrap();
        let k = symmetric_side(1.6, &v, 5, 5.0).unwrap();
        for &x in &[0.15, 0.6, 1.1, 1.9] {
            let p = orthonormal_values(&k.table, x, 12).unwrap();
            let m = orthonormal_values(&k.table, -x, 12).unwrap();
            for j in 0..12 {
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                assert!((p[j] - s * m[j]).abs() <= 1e-12 * p[j].abs().max(1.0), "j = {j}, x = {x}");
            }
        }
    }

    #[test]
    fn rejects_nonpositive_pairs() {
        let v = Potential::model_vc(1.0).unwrap();
        assert!(quad_transform_residual(0.3, &v, 2, 2.0, &[(0.0, 1.0)]).is_err());
    }
}
