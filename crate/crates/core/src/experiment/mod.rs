//! Convergence of rescaled finite-`n` kernels to the soft/hard limit, with
//! flat-file configuration and report emission.

mod config;
mod report;
mod svg;

use rayon::prelude::*;
use thiserror::Error;

use crate::equilibrium::{equilibrium_vc, EdgeType, EquilibriumError, Potential};
use crate::limitkernel::{solve_fg, LimitKernelError};
use crate::orthopoly::{stieltjes_table, CDKernelContext, OrthoError, PrecisionMode, WeightSpec};

pub use config::{ConfigError, ExperimentConfig};
pub use report::{convergence_artifacts, density_artifacts, diagonal_artifacts, emit_report, Artifact, ReportError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
    #[error(transparent)]
    LimitKernel(#[from] LimitKernelError),
}

/// Quantities fixed by `n` and the configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derived {
    pub n: usize,
    /// `N = n / (1 + L n^{-2/3})`
    pub big_n: f64,
    /// `(c_1 n)^{2/3}`
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub derived: Derived,
    /// `None` when the recurrence could not be built at this `n`.
    pub error: Option<f64>,
    pub precision_mode: Option<PrecisionMode>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub s: f64,
    pub c1: f64,
    pub c2: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Least-squares slope of `log E` against `log n` over available rows.
    pub fn empirical_rate(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter_map(|r| r.error.filter(|e| *e > 0.0).map(|e| ((r.derived.n as f64).ln(), e.ln())))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let k = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    }

    pub fn errors(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.error).collect()
    }
}

/// `(c_1, c_2)` of `V_c`; only the soft-meets-hard case has them.
pub fn critical_constants(c: f64) -> Result<(f64, f64), ExperimentError> {
    let eq = equilibrium_vc(c)?;
    match (eq.edge_type_at_zero, eq.c1, eq.c2) {
        (EdgeType::SoftMeetsHard, Some(c1), Some(c2)) => Ok((c1, c2)),
        _ => Err(ConfigError::Invalid(format!("c = {c} does not give a soft edge meeting the hard edge")).into()),
    }
}

pub fn run_converge(cfg: &ExperimentConfig) -> Result<ConvergenceTable, ExperimentError> {
    cfg.validate()?;
    let (c1, c2) = critical_constants(cfg.c)?;
    let s = c2 * cfg.l;
    let limit = solve_fg(cfg.alpha, s, cfg.x_max, 1e-12)?;
    let grid = cfg.window_grid();
    let target: Vec<Vec<f64>> = grid
        .iter()
        .map(|&x| grid.iter().map(|&y| limit.eval_soft_hard(x, y)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;

    let rows = cfg
        .n_list
        .par_iter()
        .map(|&n| {
            let derived = cfg.derived(n, c1);
            match finite_n_error(cfg, derived, &grid, &target) {
                Ok((e, mode)) => {
                    ConvergenceRow { derived, error: Some(e), precision_mode: Some(mode), note: String::new() }
                }
                Err(err) => ConvergenceRow { derived, error: None, precision_mode: None, note: err.to_string() },
            }
        })
        .collect();
    Ok(ConvergenceTable { s, c1, c2, rows })
}

fn finite_n_error(
    cfg: &ExperimentConfig,
    d: Derived,
    grid: &[f64],
    target: &[Vec<f64>],
) -> Result<(f64, PrecisionMode), OrthoError> {
    let v = Potential::model_vc(cfg.c).map_err(|e| OrthoError::Domain(e.to_string()))?;
    let weight = WeightSpec::hard_edge(cfg.alpha, v, d.big_n)?;
    let table = stieltjes_table(&weight, d.n, PrecisionMode::Auto)?;
    let mode = table.precision_mode;
    let ctx = CDKernelContext::new(weight, table.into(), d.n)?;
    let scaled: Vec<f64> = grid.iter().map(|&x| x / d.scale).collect();
    let k = ctx.kernel_matrix(&scaled, &scaled)?;
    let mut worst: f64 = 0.0;
    for (i, row) in k.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            worst = worst.max((v / d.scale - target[i][j]).abs());
        }
    }
    Ok((worst, mode))
}
