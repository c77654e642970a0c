//! Fredholm determinants `det(I - K)` by symmetrised Nyström discretisation,
//! and the gap probabilities built from them.

use std::io::{self, Write};

use nalgebra::DMatrix;
use rayon::prelude::*;
use thiserror::Error;

use crate::limitkernel::{LimitKernelContext, LimitKernelError};
use crate::numcore::{gauss_legendre_rule, NumError};
use crate::painleve::{shared_cache, tw_cdf, PainleveError};
use crate::specfun::kernels::airy_kernel_diagonal;
use crate::specfun::{classical_kernel, ClassicalKernelTag};

pub const DEFAULT_TOL: f64 = 1e-9;
const START_ORDER: usize = 16;
const MAX_ORDER: usize = 512;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FredholmError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("determinant not converged at m = {m}: {last} vs {previous}")]
    NotConverged { last: f64, previous: f64, m: usize },
    #[error(transparent)]
    Kernel(#[from] LimitKernelError),
    #[error(transparent)]
    Painleve(#[from] PainleveError),
    #[error(transparent)]
    Numeric(#[from] NumError),
}

/// `K` on `(a, b)`; `b = +∞` is handled by `t = a + u / (1 - u)`.
pub struct FredholmOperator<K> {
    pub kernel: K,
    pub a: f64,
    pub b: f64,
    /// Starting quadrature order; doubled until converged.
    pub m: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FredholmDet {
    pub det: f64,
    /// Order at which `|det_m - det_{m/2}| <= tol`.
    pub m: usize,
    pub change: f64,
}

impl<K> FredholmOperator<K>
where
    K: Fn(f64, f64) -> Result<f64, FredholmError> + Sync,
{
    pub fn new(kernel: K, a: f64, b: f64) -> Self {
        FredholmOperator { kernel, a, b, m: START_ORDER, tol: DEFAULT_TOL }
    }

    fn nodes(&self, m: usize) -> Result<(Vec<f64>, Vec<f64>), FredholmError> {
        if self.b.is_infinite() {
            let rule = gauss_legendre_rule(m, 0.0, 1.0)?;
            let t = rule.nodes.iter().map(|&u| self.a + u / (1.0 - u)).collect();
            let w = rule.nodes.iter().zip(&rule.weights).map(|(&u, &w)| w / ((1.0 - u) * (1.0 - u))).collect();
            Ok((t, w))
        } else {
            let rule = gauss_legendre_rule(m, self.a, self.b)?;
            Ok((rule.nodes, rule.weights))
        }
    }

    /// `det(δ_ij - √w_i K(t_i, t_j) √w_j)` at a fixed order.
    pub fn det_at(&self, m: usize) -> Result<f64, FredholmError> {
        let (t, w) = self.nodes(m)?;
        let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
        let rows: Vec<Vec<f64>> = (0..m)
            .into_par_iter()
            .map(|i| (i..m).map(|j| (self.kernel)(t[i], t[j]).map(|k| sw[i] * k * sw[j])).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()?;
        let mut a = DMatrix::<f64>::identity(m, m);
        for (i, row) in rows.iter().enumerate() {
            for (off, v) in row.iter().enumerate() {
                let j = i + off;
                a[(i, j)] -= v;
                if j != i {
                    a[(j, i)] -= v;
                }
            }
        }
        let det = a.lu().determinant();
        if !det.is_finite() {
            return Err(NumError::NonFinite { what: "Fredholm determinant" }.into());
        }
        Ok(det)
    }
}

pub fn fredholm_det<K>(op: &FredholmOperator<K>) -> Result<FredholmDet, FredholmError>
where
    K: Fn(f64, f64) -> Result<f64, FredholmError> + Sync,
{
    if op.m < 4 {
        return Err(FredholmError::Domain(format!("quadrature order must be at least 4, got {}", op.m)));
    }
    if !(op.b > op.a) || !op.a.is_finite() || op.b.is_nan() || op.b == f64::NEG_INFINITY {
        return Err(FredholmError::Domain(format!("bad interval ({}, {})", op.a, op.b)));
    }
    let mut m = op.m;
    let mut previous = op.det_at(m)?;
    loop {
        m *= 2;
        let det = op.det_at(m)?;
        let change = (det - previous).abs();
        if change <= op.tol {
            return Ok(FredholmDet { det, m, change });
        }
        if m >= MAX_ORDER {
            return Err(FredholmError::NotConverged { last: det, previous, m });
        }
        previous = det;
    }
}

/// Right end beyond which the Airy kernel diagonal drops below `1e-16`.
fn airy_cutoff(s: f64) -> f64 {
    let mut b = s.max(0.0) + 1.0;
    while airy_kernel_diagonal(b) >= 1e-16 {
        b += 0.5;
    }
    b
}

/// `det(I - K_Airy)` on `(s, ∞)`, truncated where the diagonal is negligible.
pub fn airy_det(s: f64) -> Result<FredholmDet, FredholmError> {
    let kernel = |x: f64, y: f64| Ok(classical_kernel(ClassicalKernelTag::Airy, x, y).expect("airy kernel is total"));
    fredholm_det(&FredholmOperator::new(kernel, s, airy_cutoff(s)))
}

/// Same determinant through the rational map of `(s, ∞)`.
pub fn airy_det_mapped(s: f64) -> Result<FredholmDet, FredholmError> {
    let kernel = |x: f64, y: f64| Ok(classical_kernel(ClassicalKernelTag::Airy, x, y).expect("airy kernel is total"));
    let mut op = FredholmOperator::new(kernel, s, f64::INFINITY);
    op.m = 32;
    fredholm_det(&op)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapComparison {
    pub x: f64,
    /// `det(I - K)` on `(0, x)`.
    pub gap: f64,
    /// `F(-x) / F(0)` for the classical Tracy–Widom law.
    pub tw_ratio: f64,
    pub m: usize,
}

/// Probability of no point in `(0, x)` for the `α = 0` kernel, next to the
/// Tracy–Widom ratio. Nodes below `x_min` are evaluated at `x_min`.
pub fn smallest_eig_cdf(x: f64, ctx: &LimitKernelContext) -> Result<GapComparison, FredholmError> {
    if ctx.alpha != 0.0 {
        return Err(FredholmError::Domain(format!("needs alpha = 0, got {}", ctx.alpha)));
    }
    if !(x > 0.0 && x <= ctx.x_max) {
        return Err(FredholmError::Domain(format!("x = {x} outside (0, {}]", ctx.x_max)));
    }
    let lo = ctx.x_min;
    let kernel = |u: f64, v: f64| Ok(ctx.eval_soft_hard(u.max(lo), v.max(lo))?);
    let det = fredholm_det(&FredholmOperator::new(kernel, 0.0, x))?;
    let hm = shared_cache().get(0.0)?;
    let tw_ratio = tw_cdf(&hm, -x)? / tw_cdf(&hm, 0.0)?;
    Ok(GapComparison { x, gap: det.det, tw_ratio, m: det.m })
}

/// Columns `x, gap, tw_ratio, abs_diff`.
pub fn write_gap_csv<W: Write>(rows: &[GapComparison], mut out: W) -> io::Result<()> {
    writeln!(out, "x,gap,tw_ratio,abs_diff")?;
    for r in rows {
        writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", r.x, r.gap, r.tw_ratio, (r.gap - r.tw_ratio).abs())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limitkernel::solve_fg;

    #[test]
    fn zero_kernel() {
        let op = FredholmOperator::new(|_, _| Ok(0.0), 0.0, 1.0);
        assert_eq!(fredholm_det(&op).unwrap().det, 1.0);
    }

    #[test]
    fn rank_one_on_half_line() {
        let op = FredholmOperator::new(|x: f64, y: f64| Ok((-x - y).exp()), 0.0, f64::INFINITY);
        let d = fredholm_det(&op).unwrap();
        assert!((d.det - 0.5).abs() <= 1e-10, "{d:?}");
    }

    #[test]
    fn sine_kernel_gap_matches_series() {
        // det(I - K_sine) on (0, t) for small t: 1 - t + π² t⁴/36 + O(t⁶)
        let t = 0.03;
        let op = FredholmOperator::new(|x, y| Ok(classical_kernel(ClassicalKernelTag::Sine, x, y).unwrap()), 0.0, t);
        let d = fredholm_det(&op).unwrap().det;
        let series = 1.0 - t + std::f64::consts::PI.powi(2) * t.powi(4) / 36.0;
        assert!((d - series).abs() <= 1e-8, "{d} vs {series}");
    }

    #[test]
    fn airy_determinant_is_tracy_widom() {
        let hm = shared_cache().get(0.0).unwrap();
        for &s in &[-2.0, 0.0, 1.0] {
            let a = airy_det(s).unwrap();
            let b = airy_det_mapped(s).unwrap();
            let f = tw_cdf(&hm, s).unwrap();
            assert!((a.det - f).abs() <= 1e-5, "s = {s}: {} vs {f}", a.det);
            assert!((a.det - b.det).abs() <= 1e-8, "s = {s}: {} vs {}", a.det, b.det);
        }
    }

    #[test]
    fn soft_hard_gap_behaviour() {
        let ctx = solve_fg(0.0, 0.0, 60.0, 1e-12).unwrap();
        let small = smallest_eig_cdf(1e-3, &ctx).unwrap();
        assert!(small.gap >= 1.0 - 1e-2, "{small:?}");
        let g: Vec<f64> = [0.5, 2.0, 5.0].iter().map(|&x| smallest_eig_cdf(x, &ctx).unwrap().gap).collect();
        assert!(g[0] > g[1] && g[1] > g[2], "{g:?}");
        let xs: Vec<f64> = (1..=12).map(|k| 0.25 * k as f64).collect();
        let gaps: Vec<f64> = xs.iter().map(|&x| smallest_eig_cdf(x, &ctx).unwrap().gap).collect();
        for w in gaps.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{gaps:?}");
            assert!(w[1] / w[0] > 0.0 && w[1] / w[0] <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn gap_is_tracy_widom_ratio_at_rescaled_argument() {
        let ctx = solve_fg(0.0, 0.0, 60.0, 1e-12).unwrap();
        let hm = shared_cache().get(0.0).unwrap();
        let f0 = tw_cdf(&hm, 0.0).unwrap();
        let c = 2f64.powf(2.0 / 3.0);
        for &x in &[0.5, 1.0, 2.0] {
            let gap = smallest_eig_cdf(x, &ctx).unwrap().gap;
            let want = tw_cdf(&hm, -c * x).unwrap() / f0;
            assert!((gap - want).abs() <= 1e-8, "x = {x}: {gap} vs {want}");
        }
    }

    #[test]
    fn doubling_convergence_for_shipped_kernels() {
        let ctx = solve_fg(0.0, 0.0, 60.0, 1e-12).unwrap();
        let lo = ctx.x_min;
        let mut op = FredholmOperator::new(|u: f64, v: f64| Ok(ctx.eval_soft_hard(u.max(lo), v.max(lo))?), 0.0, 2.0);
        op.tol = 1e-7;
        assert!(fredholm_det(&op).unwrap().change <= 1e-7);
        let bessel = |x: f64, y: f64| Ok(classical_kernel(ClassicalKernelTag::Bessel { alpha: 0.5 }, x, y).unwrap());
        let mut op = FredholmOperator::new(bessel, 0.0, 2.0);
        op.tol = 1e-7;
        let d = fredholm_det(&op).unwrap();
        assert!(d.det > 0.0 && d.det <= 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        let mut op = FredholmOperator::new(|_, _| Ok(0.0), 0.0, 1.0);
        op.m = 3;
        assert!(fredholm_det(&op).is_err());
        assert!(fredholm_det(&FredholmOperator::new(|_, _| Ok(0.0), 1.0, 0.0)).is_err());
        let ctx = solve_fg(0.5, 0.0, 60.0, 1e-12).unwrap();
        assert!(smallest_eig_cdf(1.0, &ctx).is_err());
        let ctx = solve_fg(0.0, 0.0, 60.0, 1e-12).unwrap();
        assert!(smallest_eig_cdf(100.0, &ctx).is_err());
    }

    #[test]
    fn gap_csv() {
        let row = GapComparison { x: 1.0, gap: 0.5, tw_ratio: 0.25, m: 32 };
        let mut buf = Vec::new();
        write_gap_csv(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,gap,tw_ratio,abs_diff\n"));
        assert!(text.contains("2.5000000000000000e-1"));
    }
}
