//! The limiting kernels `K_α^{soft/hard}(x, y; s)` and `K_β^{crit,II}(x, y; s)`
//! built from solutions of linear systems whose coefficients come from the
//! Hastings–McLeod solution, plus the identities tying them together.

mod asymptotic;
mod consistency;
mod crit;

use std::f64::consts::PI;
use std::io::{self, Write};
use std::sync::Arc;

use thiserror::Error;

use crate::numcore::{ode_solve_with, DenseSolution, NumError, OdeOptions};
use crate::painleve::{shared_cache, HastingsMcLeod, PainleveError};
use asymptotic::CritSeries;

pub use consistency::{consistency_residual, cross_route_residual, xmax_drift, ConsistencyReport};
pub use crit::{solve_crit_ii, solve_crit_ii_with, CritIIContext};

/// Below this separation the difference quotient is replaced by the
/// diagonal formula at the midpoint.
const DIAGONAL_PATCH: f64 = 1e-9;

/// Below this point the sweep continues in `ln x`, where the `1/x`
/// coefficients are bounded.
const SPLIT: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LimitKernelError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("residual {residual:e} of the integrated system exceeds {tol:e}")]
    Residual { residual: f64, tol: f64 },
    #[error(transparent)]
    Painleve(#[from] PainleveError),
    #[error(transparent)]
    Numeric(#[from] NumError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FgOptions {
    pub x_max: f64,
    pub x_min: f64,
    pub rtol: f64,
}

impl Default for FgOptions {
    fn default() -> Self {
        FgOptions { x_max: 60.0, x_min: 1e-4, rtol: 1e-12 }
    }
}

/// Dense solution `(f_α, g_α)` on `[x_min, x_max]` for fixed `s`.
#[derive(Debug, Clone)]
pub struct LimitKernelContext {
    pub alpha: f64,
    pub s: f64,
    pub q: f64,
    pub r: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub hm: Arc<HastingsMcLeod>,
    /// Size of the first omitted term of the boundary expansion.
    pub boundary_truncation: f64,
    /// `[SPLIT, x_max]` in `x`.
    outer: DenseSolution,
    /// `[x_min, SPLIT]` in `t = ln x`.
    inner: DenseSolution,
}

fn check_hm(hm: &HastingsMcLeod, nu: f64, s: f64) -> Result<(), LimitKernelError> {
    if (hm.nu - nu).abs() > 1e-14 {
        return Err(LimitKernelError::Domain(format!("need the solution with nu = {nu}, got {}", hm.nu)));
    }
    if !hm.contains(s) {
        return Err(LimitKernelError::Domain(format!("s = {s} outside [{}, {}]", hm.s_min, hm.s_max)));
    }
    Ok(())
}

/// Builds `(f_α, g_α)` with the shared Hastings–McLeod cache.
pub fn solve_fg(alpha: f64, s: f64, x_max: f64, rtol: f64) -> Result<LimitKernelContext, LimitKernelError> {
    if !(alpha > -1.0) {
        return Err(LimitKernelError::Domain(format!("alpha must exceed -1, got {alpha}")));
    }
    let hm = shared_cache().get(alpha + 0.5)?;
    solve_fg_with(hm, alpha, s, FgOptions { x_max, rtol, ..FgOptions::default() })
}

/// Starts from the large-`x` expansion at `x_max` and integrates the system
/// backwards to `x_min`.
pub fn solve_fg_with(
    hm: Arc<HastingsMcLeod>,
    alpha: f64,
    s: f64,
    opts: FgOptions,
) -> Result<LimitKernelContext, LimitKernelError> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(LimitKernelError::Domain(format!("alpha must exceed -1, got {alpha}")));
    }
    if !(opts.x_max >= 30.0) || !(opts.x_min > 0.0 && opts.x_min < 1.0) {
        return Err(LimitKernelError::Domain(format!("need x_max >= 30 and 0 < x_min < 1, got [{}, {}]", opts.x_min, opts.x_max)));
    }
    check_hm(&hm, alpha + 0.5, s)?;
    let (q, r) = (hm.q(s), hm.r(s));
    let series = CritSeries::new(alpha + 0.5, s, q, r);
    let z = opts.x_max.sqrt();
    let (f1, f2, truncation) = series.eval(z);
    let y0 = [opts.x_max.powf(-0.25) * f1, opts.x_max.powf(0.25) * f2];
    let field = FgField { alpha, s, q, r };
    let mut ode = OdeOptions::new(opts.rtol, opts.rtol * 1e-2);
    ode.max_steps = 2_000_000;
    let outer = ode_solve_with(
        |x, y, dy| {
            let (a, b) = field.rhs(x, y[0], y[1]);
            dy[0] = a;
            dy[1] = b;
        },
        opts.x_max,
        SPLIT,
        &y0,
        &ode,
    )?;
    let inner = ode_solve_with(
        |t, y, dy| {
            let x = t.exp();
            let (a, b) = field.rhs(x, y[0], y[1]);
            dy[0] = x * a;
            dy[1] = x * b;
        },
        0.0,
        opts.x_min.ln(),
        &outer.eval(SPLIT)?,
        &ode,
    )?;
    Ok(LimitKernelContext {
        alpha,
        s,
        q,
        r,
        x_min: opts.x_min,
        x_max: opts.x_max,
        hm,
        boundary_truncation: truncation,
        outer,
        inner,
    })
}

#[derive(Debug, Clone, Copy)]
struct FgField {
    alpha: f64,
    s: f64,
    q: f64,
    r: f64,
}

impl FgField {
    fn rhs(&self, x: f64, f: f64, g: f64) -> (f64, f64) {
        let (q, r, s) = (self.q, self.r, self.s);
        let a = 2.0 * q + self.alpha / (2.0 * x);
        let b = 2.0 + (q * q + r + 0.5 * s) / x;
        let c = -2.0 * x - q * q + r - 0.5 * s;
        (a * f + b * g, c * f - a * g)
    }
}

impl LimitKernelContext {
    fn field(&self) -> FgField {
        FgField { alpha: self.alpha, s: self.s, q: self.q, r: self.r }
    }

    fn check(&self, x: f64) -> Result<(), LimitKernelError> {
        if x >= self.x_min && x <= self.x_max {
            Ok(())
        } else {
            Err(LimitKernelError::Domain(format!("x = {x} outside [{}, {}]", self.x_min, self.x_max)))
        }
    }

    /// `(f(x), g(x))`
    pub fn fg(&self, x: f64) -> Result<(f64, f64), LimitKernelError> {
        self.check(x)?;
        let mut y = [0.0; 2];
        if x >= SPLIT {
            self.outer.eval_into(x, &mut y)?;
        } else {
            self.inner.eval_into(x.ln().max(self.x_min.ln()), &mut y)?;
        }
        Ok((y[0], y[1]))
    }

    /// `(f, g, f', g')` with derivatives from the system.
    pub fn fg_with_derivatives(&self, x: f64) -> Result<(f64, f64, f64, f64), LimitKernelError> {
        let (f, g) = self.fg(x)?;
        let (df, dg) = self.field().rhs(x, f, g);
        Ok((f, g, df, dg))
    }

    pub fn diagonal(&self, x: f64) -> Result<f64, LimitKernelError> {
        let (f, g, df, dg) = self.fg_with_derivatives(x)?;
        Ok((df * g - f * dg) / PI)
    }

    /// `(f(x) g(y) - f(y) g(x)) / (π (x - y))`
    pub fn eval_soft_hard(&self, x: f64, y: f64) -> Result<f64, LimitKernelError> {
        self.check(x)?;
        self.check(y)?;
        if (x - y).abs() <= DIAGONAL_PATCH * x.abs().max(1.0) {
            return self.diagonal(0.5 * (x + y));
        }
        let (fx, gx) = self.fg(x)?;
        let (fy, gy) = self.fg(y)?;
        Ok((fx * gy - fy * gx) / (PI * (x - y)))
    }

    /// Largest `|d/dx (f, g) - A(x) (f, g)|` over `points`, with the
    /// derivative of the dense output taken by a five-point stencil.
    pub fn system_residual(&self, points: &[f64]) -> Result<f64, LimitKernelError> {
        let mut worst: f64 = 0.0;
        for &x in points {
            let h = 1e-4 * x.min(1.0);
            self.check(x - 2.0 * h)?;
            self.check(x + 2.0 * h)?;
            let v = |k: f64| self.fg(x + k * h);
            let (a, b, c, d) = (v(2.0)?, v(1.0)?, v(-1.0)?, v(-2.0)?);
            let df = (-a.0 + 8.0 * b.0 - 8.0 * c.0 + d.0) / (12.0 * h);
            let dg = (-a.1 + 8.0 * b.1 - 8.0 * c.1 + d.1) / (12.0 * h);
            let (_, _, ef, eg) = self.fg_with_derivatives(x)?;
            worst = worst.max((df - ef).abs()).max((dg - eg).abs());
        }
        Ok(worst)
    }

    /// Detects which of `f x^{-α/2}` and `f x^{α/2}` settles to a finite
    /// nonzero limit as `x → x_min`; returns the exponent `e` with
    /// `f ~ x^e`, or `None` if neither does.
    pub fn indicial_exponent(&self) -> Result<Option<f64>, LimitKernelError> {
        let a = self.alpha / 2.0;
        let x0 = self.x_min;
        let (f0, _) = self.fg(x0)?;
        let (f1, _) = self.fg(4.0 * x0)?;
        for e in [-a, a] {
            let (l0, l1) = (f0 * x0.powf(-e), f1 * (4.0 * x0).powf(-e));
            if l0.abs() > 1e-8 && ((l0 - l1) / l0).abs() < 0.05 {
                return Ok(Some(e));
            }
        }
        Ok(None)
    }

    /// Columns `x, y, K`.
    pub fn write_kernel_csv<W: Write>(&self, xs: &[f64], ys: &[f64], mut out: W) -> io::Result<()> {
        writeln!(out, "x,y,K")?;
        for &x in xs {
            for &y in ys {
                let k = self.eval_soft_hard(x, y).map_err(io::Error::other)?;
                writeln!(out, "{x:.16e},{y:.16e},{k:.16e}")?;
            }
        }
        Ok(())
    }

    /// Columns `x, Kxx`.
    pub fn write_diagonal_csv<W: Write>(&self, xs: &[f64], mut out: W) -> io::Result<()> {
        writeln!(out, "x,Kxx")?;
        for &x in xs {
            let k = self.diagonal(x).map_err(io::Error::other)?;
            writeln!(out, "{x:.16e},{k:.16e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx(alpha: f64, s: f64) -> LimitKernelContext {
        solve_fg(alpha, s, 60.0, 1e-12).unwrap()
    }

    #[test]
    fn envelope_at_half_range() {
        let c = ctx(0.0, 0.0);
        let x = 30.0;
        let (f, _) = c.fg(x).unwrap();
        assert!((f * x.powf(0.25)).abs() <= 1.2);
    }

    #[test]
    fn diagonal_growth() {
        let c = ctx(0.0, 0.0);
        let ratio = c.diagonal(25.0).unwrap() * PI / (2.0 * 25f64.sqrt());
        assert!((ratio - 1.0).abs() <= 2e-2, "{ratio}");
        for &s in &[-2.0, 0.0, 2.0] {
            let c = ctx(0.0, s);
            for k in 0..=20 {
                let x = 20.0 + 0.5 * k as f64;
                let ratio = c.diagonal(x).unwrap() * PI / (2.0 * x.sqrt());
                assert!((0.97..=1.03).contains(&ratio), "s = {s}, x = {x}: {ratio}");
            }
        }
    }

    #[test]
    fn rebuilt_context_agrees() {
        let hm = shared_cache().get(0.5).unwrap();
        let a = solve_fg_with(hm.clone(), 0.0, 0.0, FgOptions { x_max: 60.0, ..Default::default() }).unwrap();
        let b = solve_fg_with(hm, 0.0, 0.0, FgOptions { x_max: 30.0, ..Default::default() }).unwrap();
        let d = (a.eval_soft_hard(1.0, 1.0).unwrap() - b.eval_soft_hard(1.0, 1.0).unwrap()).abs();
        assert!(d <= 1e-6, "{d}");
    }

    #[test]
    fn symmetry_positivity_continuity() {
        let c = ctx(0.0, 0.0);
        assert_eq!(c.eval_soft_hard(1.0, 2.0).unwrap(), c.eval_soft_hard(2.0, 1.0).unwrap());
        for &x in &[0.1, 0.5, 1.0, 2.0, 5.0] {
            assert!(c.diagonal(x).unwrap() >= 0.0);
        }
        let d = (c.eval_soft_hard(1.0, 1.0).unwrap() - c.eval_soft_hard(1.0, 1.0 + 1e-6).unwrap()).abs();
        assert!(d <= 1e-5, "{d}");
    }

    #[test]
    fn integrated_system_residual() {
        let pts: Vec<f64> = (0..60).map(|k| 1e-3 * (30.0f64 / 1e-3).powf(k as f64 / 59.0)).collect();
        for &alpha in &[-0.5, 0.0, 0.5, 1.0] {
            for &s in &[-2.0, 0.0, 2.0] {
                let c = ctx(alpha, s);
                let res = c.system_residual(&pts[..59]).unwrap();
                assert!(res <= 1e-7, "alpha {alpha}, s {s}: {res}");
            }
        }
    }

    #[test]
    fn indicial_behaviour_near_origin() {
        let c = ctx(0.5, 0.0);
        let e = c.indicial_exponent().unwrap();
        assert!(e == Some(-0.25) || e == Some(0.25), "{e:?}");
    }

    #[test]
    fn parameter_s_acts() {
        let a = ctx(0.0, 0.0);
        let b = ctx(0.0, 0.1);
        let mut worst: f64 = 0.0;
        for i in 0..8 {
            for j in 0..8 {
                let (x, y) = (0.5 + 0.5 * i as f64, 0.5 + 0.5 * j as f64);
                worst = worst.max((a.eval_soft_hard(x, y).unwrap() - b.eval_soft_hard(x, y).unwrap()).abs());
            }
        }
        assert!(worst <= 0.5 && worst >= 1e-4, "{worst}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(solve_fg(-1.0, 0.0, 60.0, 1e-10).is_err());
        assert!(solve_fg(0.0, 0.0, 20.0, 1e-10).is_err());
        assert!(solve_fg(0.0, 100.0, 60.0, 1e-10).is_err());
        let c = ctx(0.0, 0.0);
        assert!(c.eval_soft_hard(0.0, 1.0).is_err());
        assert!(c.eval_soft_hard(1.0, 61.0).is_err());
    }

    #[test]
    fn csv_tables() {
        let c = ctx(0.0, 0.0);
        let mut buf = Vec::new();
        c.write_kernel_csv(&[0.5, 1.0], &[0.5, 2.0], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 5);
        let mut buf = Vec::new();
        c.write_diagonal_csv(&[0.5, 1.0, 1.5], &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("x,Kxx\n"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn kernel_is_symmetric(x in 0.01f64..20.0, y in 0.01f64..20.0) {
            let c = ctx(0.3, -0.5);
            prop_assert_eq!(c.eval_soft_hard(x, y).unwrap(), c.eval_soft_hard(y, x).unwrap());
        }
    }
}
