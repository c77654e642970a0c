use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

/// Chebyshev–Lobatto points `s_j = mid + half cos(j pi / n)`, `j = 0..=n`,
/// so `s_0` is the right endpoint.
#[derive(Debug, Clone)]
pub(crate) struct ChebGrid {
    pub n: usize,
    pub mid: f64,
    pub half: f64,
    pub x: Vec<f64>,
    pub s: Vec<f64>,
}

impl ChebGrid {
    pub fn new(n: usize, lo: f64, hi: f64) -> Self {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let x: Vec<f64> = (0..=n).map(|j| (PI * j as f64 / n as f64).cos()).collect();
        let mut s: Vec<f64> = x.iter().map(|&t| mid + half * t).collect();
        s[0] = hi;
        s[n] = lo;
        ChebGrid { n, mid, half, x, s }
    }

    /// Differentiation matrix in the `s` variable. Node differences use the
    /// product-of-sines form and the diagonal is the negative row sum.
    pub fn diff_matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        let nf = n as f64;
        let c = |j: usize| {
            let e = if j == 0 || j == n { 2.0 } else { 1.0 };
            if j % 2 == 0 {
                e
            } else {
                -e
            }
        };
        let mut d = DMatrix::zeros(n + 1, n + 1);
        for i in 0..=n {
            let mut row = 0.0;
            for j in 0..=n {
                if i == j {
                    continue;
                }
                let dx = -2.0 * (PI * (i + j) as f64 / (2.0 * nf)).sin() * (PI * (i as f64 - j as f64) / (2.0 * nf)).sin();
                let v = c(i) / c(j) / dx;
                d[(i, j)] = v;
                row += v;
            }
            d[(i, i)] = -row;
        }
        d / self.half
    }

    pub fn apply(d: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
        (d * DVector::from_column_slice(v)).iter().copied().collect()
    }

    /// Barycentric interpolation of node values at `s`.
    pub fn interpolate(&self, values: &[f64], s: f64) -> f64 {
        let x = (s - self.mid) / self.half;
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..=self.n {
            let diff = x - self.x[j];
            if diff == 0.0 {
                return values[j];
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == self.n {
                w *= 0.5;
            }
            let t = w / diff;
            num += t * values[j];
            den += t;
        }
        num / den
    }

    /// Chebyshev coefficients of the interpolant.
    pub fn coefficients(&self, values: &[f64]) -> Vec<f64> {
        let n = self.n;
        let nf = n as f64;
        (0..=n)
            .map(|k| {
                let mut sum = 0.0;
                for (j, &v) in values.iter().enumerate() {
                    let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                    sum += w * v * (PI * ((j * k) % (2 * n)) as f64 / nf).cos();
                }
                let scale = if k == 0 || k == n { 1.0 / nf } else { 2.0 / nf };
                scale * sum
            })
            .collect()
    }
}
