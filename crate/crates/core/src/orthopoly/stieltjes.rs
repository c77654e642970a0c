use std::io::{self, Write};

use super::{OrthoError, WeightKind, WeightSpec};
use crate::numcore::{gauss_jacobi_rule, gauss_legendre_rule, gauss_rule_from_recurrence, DoubleDouble, QuadratureRule, Real};

const POINTS_PER_PANEL: usize = 32;
const FIRST_PANELS: usize = 8;
const MAX_PANELS: usize = 1024;
const REFINEMENT_TOL: f64 = 1e-13;
const AUTO_EXTENDED_ABOVE: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecisionMode {
    Native,
    Extended,
    /// Extended when `n_max > 40` or when the native run fails.
    Auto,
}

/// Jacobi matrix of the orthonormal family:
/// `x p_k = a_{k+1} p_{k+1} + b_k p_k + a_k p_{k-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceTable {
    /// `b_0 .. b_{n_max-1}`
    pub b: Vec<f64>,
    /// `a_1 .. a_{n_max}` (stored at index `k - 1`)
    pub a: Vec<f64>,
    pub mu0: f64,
    pub ln_mu0: f64,
    /// Precision actually used; never `Auto`.
    pub precision_mode: PrecisionMode,
    pub panels: usize,
    /// Largest relative coefficient change under the last panel doubling.
    pub refinement_change: f64,
}

impl RecurrenceTable {
    pub fn n_max(&self) -> usize {
        self.b.len()
    }

    /// `a_k` for `1 <= k <= n_max`.
    pub fn a_k(&self, k: usize) -> f64 {
        self.a[k - 1]
    }

    /// n-point Gauss rule of the weight, `n <= n_max`.
    pub fn gauss_rule(&self, n: usize, interval: (f64, f64)) -> Result<QuadratureRule, OrthoError> {
        if n == 0 || n > self.n_max() {
            return Err(OrthoError::Domain(format!("rule size {n} outside 1..={}", self.n_max())));
        }
        Ok(gauss_rule_from_recurrence(&self.b[..n], &self.a[..n - 1], self.mu0, interval)?)
    }
}

/// Discretized Stieltjes procedure on composite Gauss panels over
/// `[0, x_max]` (mirrored for symmetric weights). The panel count doubles
/// until the coefficients settle to `1e-13`.
pub fn stieltjes_table(weight: &WeightSpec, n_max: usize, mode: PrecisionMode) -> Result<RecurrenceTable, OrthoError> {
    if n_max == 0 {
        return Err(OrthoError::Domain("n_max must be at least 1".into()));
    }
    match mode {
        PrecisionMode::Native | PrecisionMode::Extended => refine(weight, n_max, mode),
        PrecisionMode::Auto if n_max > AUTO_EXTENDED_ABOVE => refine(weight, n_max, PrecisionMode::Extended),
        PrecisionMode::Auto => match refine(weight, n_max, PrecisionMode::Native) {
            Ok(t) => Ok(t),
            Err(OrthoError::PrecisionFailure { .. }) | Err(OrthoError::NotConverged { .. }) => {
                refine(weight, n_max, PrecisionMode::Extended)
            }
            Err(e) => Err(e),
        },
    }
}

fn refine(weight: &WeightSpec, n_max: usize, mode: PrecisionMode) -> Result<RecurrenceTable, OrthoError> {
    let mut panels = FIRST_PANELS;
    let mut prev = run(weight, n_max, mode, panels)?;
    let mut change = f64::INFINITY;
    while panels < MAX_PANELS {
        panels *= 2;
        let next = run(weight, n_max, mode, panels)?;
        change = coefficient_change(&prev, &next);
        prev = next;
        if change <= REFINEMENT_TOL {
            prev.refinement_change = change;
            return Ok(prev);
        }
    }
    Err(OrthoError::NotConverged { change, panels })
}

fn coefficient_change(p: &RecurrenceTable, q: &RecurrenceTable) -> f64 {
    let mut d = ((p.ln_mu0 - q.ln_mu0).abs()).min(1.0);
    for k in 0..p.n_max() {
        let scale = q.b[k].abs() + q.a[k];
        d = d.max((p.b[k] - q.b[k]).abs() / scale);
        d = d.max((p.a[k] - q.a[k]).abs() / q.a[k]);
    }
    d
}

fn run(weight: &WeightSpec, n_max: usize, mode: PrecisionMode, panels: usize) -> Result<RecurrenceTable, OrthoError> {
    let (x, w) = discretize(weight, panels)?;
    let (b, a, mass) = match mode {
        PrecisionMode::Extended => core::<DoubleDouble>(&x, &w, n_max),
        _ => core::<f64>(&x, &w, n_max),
    }
    .map_err(|k| OrthoError::PrecisionFailure { k, mode })?;
    let ln_mu0 = weight.log_peak() + mass.ln();
    Ok(RecurrenceTable {
        b,
        a,
        mu0: ln_mu0.exp(),
        ln_mu0,
        precision_mode: mode,
        panels,
        refinement_change: f64::NAN,
    })
}

/// Nodes and weights (scaled by `e^{-log_peak}`) of the composite rule.
fn discretize(weight: &WeightSpec, panels: usize) -> Result<(Vec<f64>, Vec<f64>), OrthoError> {
    let h = weight.x_max / panels as f64;
    let e = weight.exponent();
    let peak = weight.log_peak();
    let mut x = Vec::with_capacity(2 * panels * POINTS_PER_PANEL);
    let mut w = Vec::with_capacity(x.capacity());
    let first = gauss_jacobi_rule(POINTS_PER_PANEL, 0.0, e, 0.0, h)?;
    for (&t, &v) in first.nodes.iter().zip(&first.weights) {
        x.push(t);
        w.push(v * (-weight.field(t) - peak).exp());
    }
    let reference = gauss_legendre_rule(POINTS_PER_PANEL, -1.0, 1.0)?;
    for p in 1..panels {
        let (lo, hi) = (h * p as f64, h * (p + 1) as f64);
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for (&t, &v) in reference.nodes.iter().zip(&reference.weights) {
            let xi = mid + half * t;
            x.push(xi);
            w.push(half * v * (weight.log_weight(xi) - peak).exp());
        }
    }
    if let WeightKind::Symmetric { .. } = weight.kind {
        let n = x.len();
        for i in 0..n {
            x.push(-x[i]);
            w.push(w[i]);
        }
    }
    Ok((x, w))
}

/// Returns `(b, a, mu0)` or the index `k` of the first `a_k` that is not
/// positive and finite.
fn core<T: Real>(x: &[f64], w: &[f64], n_max: usize) -> Result<(Vec<f64>, Vec<f64>, f64), usize> {
    let xs: Vec<T> = x.iter().map(|&v| T::from_f64(v)).collect();
    let ws: Vec<T> = w.iter().map(|&v| T::from_f64(v)).collect();
    let mut mu0 = T::zero();
    for &v in &ws {
        mu0 = mu0 + v;
    }
    if !(mu0.to_f64() > 0.0) || !mu0.is_finite() {
        return Err(0);
    }
    let p0 = T::one() / mu0.sqrt();
    let mut p = vec![p0; xs.len()];
    let mut p_prev = vec![T::zero(); xs.len()];
    let mut r = vec![T::zero(); xs.len()];
    let mut a_prev = T::zero();
    let mut b_out = Vec::with_capacity(n_max);
    let mut a_out = Vec::with_capacity(n_max);
    for k in 0..n_max {
        let mut bk = T::zero();
        for i in 0..xs.len() {
            bk = bk + ws[i] * xs[i] * p[i] * p[i];
        }
        let mut norm = T::zero();
        for i in 0..xs.len() {
            r[i] = (xs[i] - bk) * p[i] - a_prev * p_prev[i];
            norm = norm + ws[i] * r[i] * r[i];
        }
        let ak = norm.sqrt();
        if !(ak.to_f64() > 0.0) || !ak.is_finite() {
            return Err(k + 1);
        }
        for i in 0..xs.len() {
            p_prev[i] = p[i];
            p[i] = r[i] / ak;
        }
        a_prev = ak;
        b_out.push(bk.to_f64());
        a_out.push(ak.to_f64());
    }
    Ok((b_out, a_out, mu0.to_f64()))
}

/// Columns `k, a_k, b_k` for `k = 0..=n_max`; `a_0` is written as 0 and
/// `b_{n_max}` is left empty.
pub fn write_recurrence_csv<W: Write>(table: &RecurrenceTable, mut out: W) -> io::Result<()> {
    writeln!(out, "k,a_k,b_k")?;
    for k in 0..=table.n_max() {
        let a = if k == 0 { 0.0 } else { table.a_k(k) };
        if k < table.n_max() {
            writeln!(out, "{k},{a:.16e},{:.16e}", table.b[k])?;
        } else {
            writeln!(out, "{k},{a:.16e},")?;
        }
    }
    Ok(())
}
