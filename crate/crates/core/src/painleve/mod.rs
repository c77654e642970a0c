//! The Hastings–McLeod solution of `q'' = s q + 2 q^3 - ν`, its
//! diagnostics, and the Tracy–Widom distribution built from the `ν = 0`
//! solution.

mod chebyshev;
mod diagnostics;
mod tw;

use std::collections::HashMap;
use std::io::{self, Write};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::numcore::{dense_solve, NumError};
use crate::specfun::airy_ai;
use chebyshev::ChebGrid;

pub use diagnostics::{hm_diagnostics, HmDiagnostics};
pub use tw::{tw_cdf, tw_density, tw_table, TWTable};

pub const DEFAULT_S_MIN: f64 = -16.0;
pub const DEFAULT_S_MAX: f64 = 12.0;
pub const DEFAULT_TOL: f64 = 1e-10;

const CONTINUATION_STEP: f64 = 0.25;
const START_POINTS: usize = 160;
const MAX_POINTS: usize = 720;
const POLE_BOUND: f64 = 1e6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PainleveError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("Newton iteration for nu = {nu} stalled with residual {residual:e}")]
    NewtonDivergence { nu: f64, residual: f64 },
    #[error("|q| exceeded 1e6 near s = {s}: left the Hastings-McLeod branch")]
    Pole { s: f64 },
    #[error("collocation residual {residual:e} above tolerance {tol:e} with {points} points")]
    NotCertified { residual: f64, tol: f64, points: usize },
    #[error(transparent)]
    Numeric(#[from] NumError),
}

/// Collocated Hastings–McLeod solution with `r = q'`.
#[derive(Debug, Clone)]
pub struct HastingsMcLeod {
    pub nu: f64,
    pub s_min: f64,
    pub s_max: f64,
    grid: ChebGrid,
    q: Vec<f64>,
    r: Vec<f64>,
    dr: Vec<f64>,
    /// Largest `|r' - s q - 2 q^3 + ν|` and `|q' - r|` between grid points.
    pub ode_residual: f64,
    pub newton_iterations: usize,
}

impl HastingsMcLeod {
    pub fn points(&self) -> usize {
        self.grid.n + 1
    }

    pub fn contains(&self, s: f64) -> bool {
        s >= self.s_min && s <= self.s_max
    }

    pub fn q(&self, s: f64) -> f64 {
        self.grid.interpolate(&self.q, s)
    }

    pub fn r(&self, s: f64) -> f64 {
        self.grid.interpolate(&self.r, s)
    }

    /// `r'` from the interpolant (not from the equation).
    pub fn r_prime(&self, s: f64) -> f64 {
        self.grid.interpolate(&self.dr, s)
    }

    /// `q` on `[s_min, ∞)`: the interpolant inside the domain and the
    /// right boundary law (`Ai(s)` for `ν = 0`, `ν/s` otherwise) beyond it.
    pub fn q_extended(&self, s: f64) -> Result<f64, PainleveError> {
        if s < self.s_min || s.is_nan() {
            return Err(PainleveError::Domain(format!("s = {s} below s_min = {}", self.s_min)));
        }
        if s <= self.s_max {
            Ok(self.q(s))
        } else {
            Ok(right_boundary(self.nu, s))
        }
    }

    /// `(s, q, q')` rows.
    pub fn write_csv<W: Write>(&self, grid: &[f64], mut out: W) -> io::Result<()> {
        writeln!(out, "s,q,q_prime")?;
        for &s in grid {
            writeln!(out, "{s:.16e},{:.16e},{:.16e}", self.q(s), self.r(s))?;
        }
        Ok(())
    }

    pub(crate) fn grid(&self) -> &ChebGrid {
        &self.grid
    }

    pub(crate) fn nodes_q(&self) -> &[f64] {
        &self.q
    }

    pub(crate) fn nodes_r(&self) -> &[f64] {
        &self.r
    }
}

fn right_boundary(nu: f64, s: f64) -> f64 {
    if nu == 0.0 {
        airy_ai(s).0
    } else {
        nu / s
    }
}

fn left_boundary(s: f64) -> f64 {
    (-s / 2.0).sqrt()
}

fn check_args(nu: f64, s_min: f64, s_max: f64, tol: f64) -> Result<(), PainleveError> {
    if !(nu > -0.5) || !nu.is_finite() {
        return Err(PainleveError::Domain(format!("nu must exceed -1/2, got {nu}")));
    }
    if !(s_min <= -10.0 && s_max >= 8.0) || !s_min.is_finite() || !s_max.is_finite() {
        return Err(PainleveError::Domain(format!("domain [{s_min}, {s_max}] must contain [-10, 8]")));
    }
    if !(tol > 0.0) {
        return Err(PainleveError::Domain(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// Solves the two-point problem by collocation with damped Newton, walking
/// from `ν = 0` to `nu` in steps of at most 1/4 and refining the grid until
/// the Chebyshev tail of `q` is negligible.
pub fn hm_solve(nu: f64, s_min: f64, s_max: f64, tol: f64) -> Result<HastingsMcLeod, PainleveError> {
    check_args(nu, s_min, s_max, tol)?;
    let mut grid = ChebGrid::new(START_POINTS, s_min, s_max);
    let (mut q, mut r) = initial_guess(&grid, 0.0);
    let mut iterations = 0;
    let steps = (nu.abs() / CONTINUATION_STEP).ceil().max(1.0) as usize;
    for k in 0..=steps {
        let nu_k = if k == 0 { 0.0 } else { nu * k as f64 / steps as f64 };
        if k > 0 && nu_k == 0.0 {
            continue;
        }
        iterations += newton(&grid, nu_k, &mut q, &mut r)?;
    }
    loop {
        let tail = tail_size(&grid, &q);
        if tail <= 1e-13 || grid.n >= MAX_POINTS {
            break;
        }
        let finer = ChebGrid::new((grid.n * 3 / 2).min(MAX_POINTS), s_min, s_max);
        q = finer.s.iter().map(|&s| grid.interpolate(&q, s)).collect();
        r = finer.s.iter().map(|&s| grid.interpolate(&r, s)).collect();
        grid = finer;
        iterations += newton(&grid, nu, &mut q, &mut r)?;
    }
    finish(grid, nu, q, r, iterations, tol)
}

/// Solves for `nu` in one Newton run started from an existing solution on
/// the same domain.
pub fn hm_solve_from(nu: f64, start: &HastingsMcLeod, tol: f64) -> Result<HastingsMcLeod, PainleveError> {
    check_args(nu, start.s_min, start.s_max, tol)?;
    let grid = start.grid.clone();
    let (mut q, mut r) = (start.q.clone(), start.r.clone());
    let iterations = newton(&grid, nu, &mut q, &mut r)?;
    finish(grid, nu, q, r, iterations, tol)
}

fn finish(
    grid: ChebGrid,
    nu: f64,
    q: Vec<f64>,
    r: Vec<f64>,
    iterations: usize,
    tol: f64,
) -> Result<HastingsMcLeod, PainleveError> {
    let d = grid.diff_matrix();
    let dr = ChebGrid::apply(&d, &r);
    let dq = ChebGrid::apply(&d, &q);
    let mut residual: f64 = 0.0;
    // midpoints between interior nodes, away from the replaced boundary rows
    for j in 1..grid.n - 1 {
        let s = 0.5 * (grid.s[j] + grid.s[j + 1]);
        let (qs, rs) = (grid.interpolate(&q, s), grid.interpolate(&r, s));
        let ode = grid.interpolate(&dr, s) - (s * qs + 2.0 * qs * qs * qs - nu);
        let first = grid.interpolate(&dq, s) - rs;
        residual = residual.max(ode.abs()).max(first.abs());
    }
    if !(residual <= tol) {
        return Err(PainleveError::NotCertified { residual, tol, points: grid.n + 1 });
    }
    Ok(HastingsMcLeod {
        nu,
        s_min: grid.s[grid.n],
        s_max: grid.s[0],
        grid,
        q,
        r,
        dr,
        ode_residual: residual,
        newton_iterations: iterations,
    })
}

fn tail_size(grid: &ChebGrid, q: &[f64]) -> f64 {
    let c = grid.coefficients(q);
    let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    c[c.len() - 8..].iter().fold(0.0f64, |m, v| m.max(v.abs())) / scale
}

/// Logistic blend of `sqrt(-s/2)` on the left with `Ai(s) + ν s/(1+s^2)`
/// on the right.
fn initial_guess(grid: &ChebGrid, nu: f64) -> (Vec<f64>, Vec<f64>) {
    let q: Vec<f64> = grid
        .s
        .iter()
        .map(|&s| {
            let sigma = 1.0 / (1.0 + s.exp());
            let right = if s > -30.0 { airy_ai(s).0 } else { 0.0 } + nu * s / (1.0 + s * s);
            sigma * (s.min(0.0) / -2.0).sqrt() + (1.0 - sigma) * right
        })
        .collect();
    let r = ChebGrid::apply(&grid.diff_matrix(), &q);
    (q, r)
}

/// Residual of the collocation system. Row `n` of the `q' = r` block and
/// row `0` of the `r' = f` block carry the boundary values.
fn collocation_residual(grid: &ChebGrid, d: &DMatrix<f64>, nu: f64, q: &[f64], r: &[f64]) -> Vec<f64> {
    let n = grid.n;
    let dq = ChebGrid::apply(d, q);
    let dr = ChebGrid::apply(d, r);
    let mut f = vec![0.0; 2 * (n + 1)];
    for i in 0..=n {
        f[i] = dq[i] - r[i];
        let s = grid.s[i];
        f[n + 1 + i] = dr[i] - (s * q[i] + 2.0 * q[i].powi(3) - nu);
    }
    f[n] = q[n] - left_boundary(grid.s[n]);
    f[n + 1] = q[0] - right_boundary(nu, grid.s[0]);
    f
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn newton(grid: &ChebGrid, nu: f64, q: &mut [f64], r: &mut [f64]) -> Result<usize, PainleveError> {
    let n = grid.n;
    let m = n + 1;
    let d = grid.diff_matrix();
    let mut f = collocation_residual(grid, &d, nu, q, r);
    let mut fnorm = norm(&f);
    for it in 1..=60 {
        let mut jac = DMatrix::zeros(2 * m, 2 * m);
        jac.view_mut((0, 0), (m, m)).copy_from(&d);
        jac.view_mut((m, m), (m, m)).copy_from(&d);
        for i in 0..m {
            jac[(i, m + i)] = -1.0;
            jac[(m + i, i)] = -(grid.s[i] + 6.0 * q[i] * q[i]);
        }
        for j in 0..2 * m {
            jac[(n, j)] = 0.0;
            jac[(m, j)] = 0.0;
        }
        jac[(n, n)] = 1.0;
        jac[(m, 0)] = 1.0;
        let rhs = DVector::from_iterator(2 * m, f.iter().map(|v| -v));
        let step = dense_solve(&jac, &rhs)?;

        let mut lambda = 1.0;
        loop {
            let qt: Vec<f64> = (0..m).map(|i| q[i] + lambda * step[i]).collect();
            let rt: Vec<f64> = (0..m).map(|i| r[i] + lambda * step[m + i]).collect();
            if let Some(i) = qt.iter().position(|v| !(v.abs() < POLE_BOUND)) {
                if lambda < 1e-3 {
                    return Err(PainleveError::Pole { s: grid.s[i] });
                }
                lambda *= 0.5;
                continue;
            }
            let ft = collocation_residual(grid, &d, nu, &qt, &rt);
            let fnew = norm(&ft);
            if fnew <= (1.0 - 0.25 * lambda) * fnorm || lambda < 1e-3 || fnew < 1e-11 {
                q.copy_from_slice(&qt);
                r.copy_from_slice(&rt);
                f = ft;
                fnorm = fnew;
                break;
            }
            lambda *= 0.5;
        }
        let step_size = step.amax();
        if step_size * lambda <= 1e-13 * (1.0 + q.iter().fold(0.0f64, |a, v| a.max(v.abs()))) || fnorm < 1e-11 {
            return Ok(it);
        }
        if lambda < 1e-3 && it > 20 {
            break;
        }
    }
    Err(PainleveError::NewtonDivergence { nu, residual: fnorm })
}

/// Thread-safe store of solutions on the default domain, keyed by `ν`.
#[derive(Debug, Default)]
pub struct HmCache {
    solutions: Mutex<HashMap<u64, Arc<HastingsMcLeod>>>,
}

impl HmCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, nu: f64) -> Result<Arc<HastingsMcLeod>, PainleveError> {
        let key = nu.to_bits();
        if let Some(hm) = self.solutions.lock().expect("cache poisoned").get(&key) {
            return Ok(hm.clone());
        }
        let hm = Arc::new(hm_solve(nu, DEFAULT_S_MIN, DEFAULT_S_MAX, DEFAULT_TOL)?);
        self.solutions.lock().expect("cache poisoned").insert(key, hm.clone());
        Ok(hm)
    }
}

/// Process-wide cache used by the convenience constructors downstream.
pub fn shared_cache() -> &'static HmCache {
    static CACHE: OnceLock<HmCache> = OnceLock::new();
    CACHE.get_or_init(HmCache::new)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(nu: f64) -> HastingsMcLeod {
        hm_solve(nu, DEFAULT_S_MIN, DEFAULT_S_MAX, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn classical_solution_follows_airy() {
        let hm = solve(0.0);
        assert!((hm.q(5.0) - airy_ai(5.0).0).abs() <= 1e-6, "{}", hm.q(5.0));
        // oracle: shoot backwards from Airy data at s = 8, where the cubic
        // term is below 1e-23 relative to q
        let (ai, aip) = airy_ai(8.0);
        let sol = crate::numcore::ode_solve(
            |s, y, dy| {
                dy[0] = y[1];
                dy[1] = s * y[0] + 2.0 * y[0].powi(3);
            },
            8.0,
            0.0,
            &[ai, aip],
            1e-13,
            1e-300,
        )
        .unwrap();
        let y = sol.eval(0.0).unwrap();
        assert!((hm.q(0.0) - y[0]).abs() < 1e-9, "{} vs {}", hm.q(0.0), y[0]);
        assert!((hm.r(0.0) - y[1]).abs() < 1e-9, "{} vs {}", hm.r(0.0), y[1]);
        assert!((y[0] - 0.36706155).abs() < 1e-8);
    }

    #[test]
    fn rational_branch_boundary_values() {
        let hm = solve(0.5);
        assert!((hm.q(10.0) - 0.05).abs() <= 1e-3);
        assert!((hm.q(-10.0) - 5f64.sqrt()).abs() <= 3e-2);
        assert!(hm.ode_residual <= 1e-8);
    }

    #[test]
    fn residual_certificates() {
        for &nu in &[0.0, 0.25, 0.5, 1.0, 1.5] {
            let hm = hm_solve(nu, -12.0, 10.0, 1e-8).unwrap();
            assert!(hm.ode_residual <= 1e-8, "nu = {nu}: {}", hm.ode_residual);
        }
    }

    #[test]
    fn decay_toward_rational_asymptote() {
        for &nu in &[0.5, 1.0] {
            let hm = solve(nu);
            assert!((hm.q(8.0) - nu / 8.0).abs() >= (hm.q(10.0) - nu / 10.0).abs());
        }
    }

    #[test]
    fn continuation_paths_agree() {
        let base = solve(0.0);
        let direct = hm_solve_from(1.0, &base, DEFAULT_TOL).unwrap();
        let half = hm_solve_from(0.5, &base, DEFAULT_TOL).unwrap();
        let via = hm_solve_from(1.0, &half, DEFAULT_TOL).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..=200 {
            let s = DEFAULT_S_MIN + (DEFAULT_S_MAX - DEFAULT_S_MIN) * k as f64 / 200.0;
            worst = worst.max((direct.q(s) - via.q(s)).abs());
        }
        assert!(worst <= 1e-9, "{worst}");
    }

    #[test]
    fn negative_parameter_is_supported() {
        let hm = solve(-0.25);
        assert!(hm.q(10.0) < 0.0);
        assert!(hm.ode_residual <= 1e-8);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(hm_solve(-0.5, -12.0, 10.0, 1e-8).is_err());
        assert!(hm_solve(0.5, -5.0, 10.0, 1e-8).is_err());
        assert!(hm_solve(0.5, -12.0, 6.0, 1e-8).is_err());
    }

    #[test]
    fn extension_beyond_domain() {
        let hm = solve(0.0);
        assert_eq!(hm.q_extended(20.0).unwrap(), airy_ai(20.0).0);
        assert!(hm.q_extended(-20.0).is_err());
    }

    #[test]
    fn csv_rows() {
        let hm = solve(0.5);
        let mut buf = Vec::new();
        hm.write_csv(&[-1.0, 0.0, 1.0], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("s,q,q_prime\n"));
    }

    #[test]
    fn cache_returns_shared_solution() {
        let cache = HmCache::new();
        let a = cache.get(0.5).unwrap();
        let b = cache.get(0.5).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }
}
