use std::sync::Arc;

use rayon::prelude::*;

use super::{OrthoError, RecurrenceTable, WeightSpec};

const RESCALE_ABOVE: f64 = 1e150;

/// Correlation kernel `K_n(x, y) = sqrt(w(x) w(y)) Σ_{j<n} p_j(x) p_j(y)`.
#[derive(Debug, Clone)]
pub struct CDKernelContext {
    pub weight: WeightSpec,
    pub table: Arc<RecurrenceTable>,
    pub n: usize,
}

impl CDKernelContext {
    pub fn new(weight: WeightSpec, table: Arc<RecurrenceTable>, n: usize) -> Result<Self, OrthoError> {
        if n == 0 || n > table.n_max() {
            return Err(OrthoError::Domain(format!("kernel degree {n} outside 1..={}", table.n_max())));
        }
        Ok(CDKernelContext { weight, table, n })
    }

    pub fn n_field(&self) -> f64 {
        self.weight.n_field
    }

    pub fn cd_kernel(&self, x: f64, y: f64) -> Result<f64, OrthoError> {
        let fx = weighted_values(&self.weight, &self.table, x, self.n)?;
        let fy = weighted_values(&self.weight, &self.table, y, self.n)?;
        Ok(dot(&fx, &fy))
    }

    pub fn diagonal(&self, x: f64) -> Result<f64, OrthoError> {
        let f = weighted_values(&self.weight, &self.table, x, self.n)?;
        Ok(dot(&f, &f))
    }

    /// `K(xs[i], ys[j])` as rows over `xs`.
    pub fn kernel_matrix(&self, xs: &[f64], ys: &[f64]) -> Result<Vec<Vec<f64>>, OrthoError> {
        let fy: Vec<Vec<f64>> = ys
            .par_iter()
            .map(|&y| weighted_values(&self.weight, &self.table, y, self.n))
            .collect::<Result<_, _>>()?;
        xs.par_iter()
            .map(|&x| {
                let fx = weighted_values(&self.weight, &self.table, x, self.n)?;
                Ok(fy.iter().map(|f| dot(&fx, f)).collect())
            })
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// `p_0(x), ..., p_{n-1}(x)` by forward recurrence.
pub fn orthonormal_values(table: &RecurrenceTable, x: f64, n: usize) -> Result<Vec<f64>, OrthoError> {
    scaled_recurrence(table, x, n, -0.5 * table.ln_mu0)
}

/// `sqrt(w(x)) p_j(x)` for `j < n`. The recurrence carries a separate log
/// scale so that large polynomial values meet tiny weights without overflow.
pub fn weighted_values(weight: &WeightSpec, table: &RecurrenceTable, x: f64, n: usize) -> Result<Vec<f64>, OrthoError> {
    if !weight.in_domain(x) {
        return Err(OrthoError::Domain(format!("x = {x} outside the weight's domain")));
    }
    let lw = weight.log_weight(x);
    if lw == f64::NEG_INFINITY {
        return Ok(vec![0.0; n]);
    }
    if !lw.is_finite() {
        return Err(OrthoError::Domain(format!("weight is singular at x = {x}")));
    }
    scaled_recurrence(table, x, n, 0.5 * (lw - table.ln_mu0))
}

fn scaled_recurrence(table: &RecurrenceTable, x: f64, n: usize, log_scale: f64) -> Result<Vec<f64>, OrthoError> {
    if n > table.n_max() {
        return Err(OrthoError::Domain(format!("degree {n} exceeds table size {}", table.n_max())));
    }
    let mut out = Vec::with_capacity(n);
    let mut scale = log_scale;
    let (mut prev, mut cur) = (0.0, 1.0);
    for j in 0..n {
        out.push(cur * scale.exp());
        if j + 1 == n {
            break;
        }
        let a_j = if j == 0 { 0.0 } else { table.a_k(j) };
        let mut next = ((x - table.b[j]) * cur - a_j * prev) / table.a_k(j + 1);
        if !next.is_finite() {
            return Err(OrthoError::Overflow { x });
        }
        if next.abs() > RESCALE_ABOVE {
            next /= RESCALE_ABOVE;
            cur /= RESCALE_ABOVE;
            scale += RESCALE_ABOVE.ln();
        }
        prev = cur;
        cur = next;
    }
    Ok(out)
}
