use super::chebyshev::ChebGrid;
use super::{hm_solve, HastingsMcLeod, PainleveError};

const CHECK_LO: f64 = -8.0;
const CHECK_HI: f64 = 6.0;
const CHECK_POINTS: usize = 561;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HmDiagnostics {
    pub ode_residual: f64,
    /// `max |2 p p'' - 4 p^3 + 2 s p^2 - p'^2 + α^2|` for `p = q^2 + r + s/2`.
    pub pxxxiv_p1: f64,
    /// Same with `p = q^2 - r + s/2` and `(α + 1)^2`.
    pub pxxxiv_p2: f64,
    /// `max |Δq|` on `[-8, 6]` after doubling `[s_min, s_max]`.
    pub drift: f64,
}

/// The Painlevé XXXIV checks differentiate the interpolant of `p` rather
/// than using the equation for `q''`, so they are not algebraic identities.
pub fn hm_diagnostics(hm: &HastingsMcLeod) -> Result<HmDiagnostics, PainleveError> {
    let grid = hm.grid();
    let d = grid.diff_matrix();
    let alpha = hm.nu - 0.5;
    let (q, r) = (hm.nodes_q(), hm.nodes_r());
    let mut out = [0.0f64; 2];
    for (slot, sign, c) in [(0usize, 1.0, alpha * alpha), (1, -1.0, (alpha + 1.0).powi(2))] {
        let p: Vec<f64> = (0..q.len()).map(|j| q[j] * q[j] + sign * r[j] + 0.5 * grid.s[j]).collect();
        let dp = ChebGrid::apply(&d, &p);
        let ddp = ChebGrid::apply(&d, &dp);
        for s in check_points() {
            let (pv, dv, ddv) = (grid.interpolate(&p, s), grid.interpolate(&dp, s), grid.interpolate(&ddp, s));
            let res = 2.0 * pv * ddv - 4.0 * pv.powi(3) + 2.0 * s * pv * pv - dv * dv + c;
            out[slot] = out[slot].max(res.abs());
        }
    }
    let wide = hm_solve(hm.nu, 2.0 * hm.s_min, 2.0 * hm.s_max, hm.ode_residual.max(1e-10) * 10.0)?;
    let drift = check_points().map(|s| (wide.q(s) - hm.q(s)).abs()).fold(0.0, f64::max);
    Ok(HmDiagnostics { ode_residual: hm.ode_residual, pxxxiv_p1: out[0], pxxxiv_p2: out[1], drift })
}

fn check_points() -> impl Iterator<Item = f64> {
    (0..CHECK_POINTS).map(|k| CHECK_LO + (CHECK_HI - CHECK_LO) * k as f64 / (CHECK_POINTS - 1) as f64)
}
