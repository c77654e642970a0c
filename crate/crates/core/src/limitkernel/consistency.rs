use super::crit::solve_crit_ii;
use super::{solve_fg, LimitKernelError};

/// Step in `s` for the central difference in the Lax check.
const LAX_DELTA: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyReport {
    pub res_plus_route: f64,
    /// Present only for `α > 0`.
    pub res_minus_route: Option<f64>,
    pub res_lax: f64,
}

/// Compares the kernel from `(f, g)` against the two crit-II routes on
/// `pairs`, and checks `∂_s f = q f + g`, `∂_s g = -x f - q g` on the
/// coordinates appearing in `pairs`.
pub fn consistency_residual(alpha: f64, s: f64, pairs: &[(f64, f64)]) -> Result<ConsistencyReport, LimitKernelError> {
    if pairs.is_empty() {
        return Err(LimitKernelError::Domain("no evaluation pairs".into()));
    }
    let x_max = 60.0;
    let ctx = solve_fg(alpha, s, x_max, 1e-12)?;
    let plus = solve_crit_ii(alpha + 0.5, s, x_max)?;
    let minus = if alpha > 0.0 { Some(solve_crit_ii(alpha - 0.5, s, x_max)?) } else { None };

    let mut res_plus: f64 = 0.0;
    let mut res_minus: f64 = 0.0;
    for &(x, y) in pairs {
        let k = ctx.eval_soft_hard(x, y)?;
        let (u, v) = (x.sqrt(), y.sqrt());
        let pre = 0.5 * (x * y).powf(-0.25);
        let via_plus = pre * (plus.eval(u, v)? + plus.eval(u, -v)?);
        res_plus = res_plus.max((k - via_plus).abs());
        if let Some(m) = &minus {
            let via_minus = pre * (m.eval(u, v)? - m.eval(u, -v)?);
            res_minus = res_minus.max((k - via_minus).abs());
        }
    }

    let up = solve_fg(alpha, s + LAX_DELTA, x_max, 1e-12)?;
    let down = solve_fg(alpha, s - LAX_DELTA, x_max, 1e-12)?;
    let mut res_lax: f64 = 0.0;
    for x in pairs.iter().flat_map(|&(x, y)| [x, y]) {
        let (f, g) = ctx.fg(x)?;
        let (fu, gu) = up.fg(x)?;
        let (fd, gd) = down.fg(x)?;
        let dfs = (fu - fd) / (2.0 * LAX_DELTA);
        let dgs = (gu - gd) / (2.0 * LAX_DELTA);
        let r = (dfs - (ctx.q * f + g)).abs() + (dgs - (-x * f - ctx.q * g)).abs();
        res_lax = res_lax.max(r);
    }
    Ok(ConsistencyReport { res_plus_route: res_plus, res_minus_route: minus.map(|_| res_minus), res_lax })
}

/// Largest difference between the two crit-II routes to the soft/hard
/// kernel, built on independent Hastings–McLeod solutions (`α > 0`).
pub fn cross_route_residual(alpha: f64, s: f64, pairs: &[(f64, f64)]) -> Result<f64, LimitKernelError> {
    if !(alpha > 0.0) {
        return Err(LimitKernelError::Domain(format!("second route needs alpha > 0, got {alpha}")));
    }
    let x_max = 60.0;
    let plus = solve_crit_ii(alpha + 0.5, s, x_max)?;
    let minus = solve_crit_ii(alpha - 0.5, s, x_max)?;
    let mut worst: f64 = 0.0;
    for &(x, y) in pairs {
        let (u, v) = (x.sqrt(), y.sqrt());
        let pre = 0.5 * (x * y).powf(-0.25);
        let a = pre * (plus.eval(u, v)? + plus.eval(u, -v)?);
        let b = pre * (minus.eval(u, v)? - minus.eval(u, -v)?);
        worst = worst.max((a - b).abs());
    }
    Ok(worst)
}

/// `|K(x, x)|` change when `x_max` is doubled.
pub fn xmax_drift(alpha: f64, s: f64, x: f64, x_max: f64) -> Result<f64, LimitKernelError> {
    let a = solve_fg(alpha, s, x_max, 1e-12)?;
    let b = solve_fg(alpha, s, 2.0 * x_max, 1e-12)?;
    Ok((a.diagonal(x)? - b.diagonal(x)?).abs())
}
