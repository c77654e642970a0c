//! The eight acceptance criteria, each reduced to one pass/fail line.
//!
//! A criterion that fails its literal tolerance may carry an `explanation`:
//! an independent computation showing what the measured value actually is.
//! The line still reads FAIL.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use crate::equilibrium::{check_variational, equilibrium_vc, Potential};
use crate::experiment::{run_converge, ExperimentConfig};
use crate::fredholm::{airy_det, smallest_eig_cdf};
use crate::limitkernel::{consistency_residual, cross_route_residual, solve_fg, xmax_drift};
use crate::orthopoly::quad_transform_residual;
use crate::painleve::{hm_diagnostics, shared_cache, tw_cdf};
use crate::specfun::airy::airy_series;
use crate::specfun::kernels::airy_kernel_diagonal;
use crate::specfun::{classical_kernel, gamma, ClassicalKernelTag};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Independent account of a literal failure, when one was verified.
    pub explanation: Option<String>,
    pub seconds: f64,
    pub limit_seconds: Option<f64>,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {} [{status}] {}: {} ({:.1} s", self.id, self.title, self.detail, self.seconds)?;
        if let Some(l) = self.limit_seconds {
            write!(f, " / limit {l:.0} s")?;
        }
        write!(f, ")")?;
        if let Some(e) = &self.explanation {
            write!(f, "; {e}")?;
        }
        Ok(())
    }
}

pub const TITLES: [&str; 8] = [
    "quadratic transformation exactness",
    "equilibrium closed forms",
    "Hastings-McLeod certification",
    "limiting kernel construction",
    "cross-route identity",
    "universality convergence",
    "Tracy-Widom coherence",
    "classical kernel sanity",
];

const LIMITS: [Option<f64>; 8] = [Some(30.0), Some(10.0), Some(60.0), None, None, Some(600.0), Some(120.0), None];

type Check = Result<(bool, String, Option<String>), String>;

/// Runs criterion `id` (1 to 8).
pub fn run_criterion(id: u8) -> Outcome {
    assert!((1..=8).contains(&id), "criteria are numbered 1 to 8");
    let start = Instant::now();
    let result = match id {
        1 => quadratic_transformation(),
        2 => equilibrium_closed_forms(),
        3 => hastings_mcleod(),
        4 => limit_kernel(),
        5 => cross_route(),
        6 => universality(),
        7 => tracy_widom(),
        _ => classical_kernels(),
    };
    let seconds = start.elapsed().as_secs_f64();
    let limit_seconds = LIMITS[id as usize - 1];
    let in_time = limit_seconds.is_none_or(|l| seconds <= l);
    let (passed, mut detail, explanation) = match result {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}"), None),
    };
    if !in_time {
        detail.push_str("; over time limit");
    }
    Outcome { id, title: TITLES[id as usize - 1], passed: passed && in_time, detail, explanation, seconds, limit_seconds }
}

pub fn run_all() -> Vec<Outcome> {
    (1..=8).map(run_criterion).collect()
}

fn pairs(count: usize, lo: f64, hi: f64, seed: u64) -> Vec<(f64, f64)> {
    let mut state = seed;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        lo + (hi - lo) * ((state >> 11) as f64 / (1u64 << 53) as f64)
    };
    (0..count).map(|_| (next(), next())).collect()
}

fn square_grid(lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let pts: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * (k as f64 + 0.5) / n as f64).collect();
    pts.iter().flat_map(|&x| pts.iter().map(move |&y| (x, y))).collect()
}

fn quadratic_transformation() -> Check {
    let (mut plus, mut minus, mut p2n, mut q2n1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut seed: u64 = 0x2545_f491_4f6c_dd1d;
    for &alpha in &[0.3, 0.7, 1.5] {
        for &c in &[0.8, 1.0, 1.2] {
            let v = Potential::model_vc(c).map_err(|e| e.to_string())?;
            for n in 1..=6 {
                seed = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
                let r = quad_transform_residual(alpha, &v, n, n as f64, &pairs(20, 0.2, 4.0, seed))
                    .map_err(|e| e.to_string())?;
                plus = plus.max(r.res_plus);
                minus = minus.max(r.res_minus.ok_or("missing minus residual")?);
                p2n = p2n.max(r.res_p2n);
                q2n1 = q2n1.max(r.res_q2n1.ok_or("missing odd residual")?);
            }
        }
    }
    let ok = plus <= 1e-9 && minus <= 1e-9 && p2n <= 1e-10 && q2n1 <= 1e-10;
    Ok((ok, format!("res_plus {plus:.2e}, res_minus {minus:.2e}, res_P2n {p2n:.2e}, res_Q2n1 {q2n1:.2e}"), None))
}

fn equilibrium_closed_forms() -> Check {
    let mut closed: f64 = 0.0;
    let mut mass: f64 = 0.0;
    let mut eq_res: f64 = 0.0;
    let mut slack = f64::INFINITY;
    for &c in &[0.7, 1.0, 1.2] {
        let m = equilibrium_vc(c).map_err(|e| e.to_string())?;
        let (lo, hi, density): (f64, f64, Box<dyn Fn(f64) -> f64>) = if c < 1.0 {
            (2.0 - 2.0 * c.sqrt(), 2.0 + 2.0 * c.sqrt(), Box::new(move |x: f64| (4.0 * c - (x - 2.0).powi(2)).sqrt() / (2.0 * PI * c)))
        } else {
            let r = (1.0 + 3.0 * c).sqrt();
            let (a, b) = (-4.0 / 3.0 + 2.0 / 3.0 * r, 4.0 / 3.0 + 4.0 / 3.0 * r);
            (0.0, b, Box::new(move |x: f64| (x + a) * (b - x).sqrt() / (2.0 * PI * c * x.sqrt())))
        };
        closed = closed.max((m.support[0].0 - lo).abs()).max((m.support[0].1 - hi).abs());
        for k in 1..200 {
            let x = lo + (hi - lo) * k as f64 / 200.0;
            closed = closed.max((m.psi(x) - density(x)).abs());
        }
        mass = mass.max((m.total_mass().map_err(|e| e.to_string())? - 1.0).abs());
        let mut grid: Vec<f64> = (1..40).map(|k| lo + (hi - lo) * k as f64 / 40.0).collect();
        grid.extend((1..=10).map(|k| hi + 0.3 * k as f64));
        if lo > 0.0 {
            grid.extend((0..8).map(|k| lo * k as f64 / 8.0));
        }
        let rep = check_variational(&m, &m.potential, &grid).map_err(|e| e.to_string())?;
        eq_res = eq_res.max(rep.max_equality_residual);
        slack = slack.min(rep.min_off_support_slack);
    }
    let m = equilibrium_vc(1.0).map_err(|e| e.to_string())?;
    let c1 = PI / 2.0 * m.limit_psi_over_sqrt();
    let c2 = 2.0 * PI / c1.powf(1.0 / 3.0) * m.limit_sqrt_omega();
    let consts = (c1 - 0.5).abs().max((c2 - 2f64.powf(1.0 / 3.0)).abs());
    let ok = closed <= 1e-12 && mass <= 1e-10 && eq_res <= 1e-7 && slack > 0.0 && consts <= 1e-8;
    Ok((
        ok,
        format!(
            "closed-form {closed:.2e}, mass {mass:.2e}, variational {eq_res:.2e}, off-support slack {slack:.2e}, c1/c2 {consts:.2e}"
        ),
        None,
    ))
}

/// `√(t/2) + ν/(2t) - t^{-5/2} (1/(8√2) + 3ν²/(4√2))` at `s = -t`.
fn hm_negative_expansion(nu: f64, t: f64) -> f64 {
    let r2 = 2f64.sqrt();
    (t / 2.0).sqrt() + nu / (2.0 * t) - t.powf(-2.5) * (1.0 / (8.0 * r2) + 3.0 * nu * nu / (4.0 * r2))
}

fn hastings_mcleod() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    let mut explained = true;
    let mut notes = Vec::new();
    for &nu in &[0.0, 0.5, 1.0] {
        let hm = shared_cache().get(nu).map_err(|e| e.to_string())?;
        let d = hm_diagnostics(&hm).map_err(|e| e.to_string())?;
        let right = nu / 10.0;
        let dr = (hm.q(10.0) - right).abs();
        let dl = (hm.q(-10.0) - 5f64.sqrt()).abs();
        let pass = hm.ode_residual <= 1e-8 && dr <= 1e-3 && dl <= 2e-2 && d.pxxxiv_p1 <= 1e-5 && d.pxxxiv_p2 <= 1e-5;
        ok &= pass;
        parts.push(format!(
            "nu={nu}: ode {:.1e}, q(10) {dr:.1e}, q(-10)-sqrt5 {dl:.2e}, pxxxiv {:.1e}/{:.1e}",
            hm.ode_residual, d.pxxxiv_p1, d.pxxxiv_p2
        ));
        if !pass {
            let three_term = (hm.q(-10.0) - hm_negative_expansion(nu, 10.0)).abs();
            let other_ok = hm.ode_residual <= 1e-8 && dr <= 1e-3 && d.pxxxiv_p1 <= 1e-5 && d.pxxxiv_p2 <= 1e-5;
            explained &= other_ok && three_term <= 3e-4;
            notes.push(format!("nu={nu}: q(-10) is sqrt5 + nu/20 + O(10^-2.5), three-term expansion off by {three_term:.1e}"));
        }
    }
    let explanation = (!ok && explained).then(|| notes.join("; "));
    Ok((ok, parts.join("; "), explanation))
}

fn limit_kernel() -> Check {
    let pts: Vec<f64> = (0..59).map(|k| 1e-3 * (30.0f64 / 1e-3).powf(k as f64 / 59.0)).collect();
    let mut residual: f64 = 0.0;
    for &alpha in &[-0.5, 0.0, 0.5, 1.0] {
        for &s in &[-2.0, 0.0, 2.0] {
            let c = solve_fg(alpha, s, 60.0, 1e-12).map_err(|e| e.to_string())?;
            residual = residual.max(c.system_residual(&pts).map_err(|e| e.to_string())?);
        }
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &s in &[-2.0, 0.0, 2.0] {
        let c = solve_fg(0.0, s, 60.0, 1e-12).map_err(|e| e.to_string())?;
        for k in 0..=40 {
            let x = 20.0 + 0.25 * k as f64;
            let r = c.diagonal(x).map_err(|e| e.to_string())? * PI / (2.0 * x.sqrt());
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    let drift = xmax_drift(0.0, 0.0, 1.0, 60.0).map_err(|e| e.to_string())?;
    let lax = consistency_residual(0.0, 0.0, &square_grid(0.3, 6.0, 6)).map_err(|e| e.to_string())?.res_lax;
    let ok = residual <= 1e-7 && lo >= 0.97 && hi <= 1.03 && drift <= 1e-6 && lax <= 1e-4;
    Ok((
        ok,
        format!("residual {residual:.2e}, diagonal ratio [{lo:.4}, {hi:.4}], drift {drift:.2e}, res_lax {lax:.2e}"),
        None,
    ))
}

fn cross_route() -> Check {
    let grid = square_grid(0.3, 6.0, 12);
    let mut worst: f64 = 0.0;
    for &s in &[-1.0, 0.0, 1.0] {
        worst = worst.max(cross_route_residual(0.5, s, &grid).map_err(|e| e.to_string())?);
    }
    Ok((worst <= 1e-5, format!("max |plus route - minus route| {worst:.2e}"), None))
}

fn universality() -> Check {
    let t = run_converge(&ExperimentConfig::default()).map_err(|e| e.to_string())?;
    let e: Vec<f64> = t.errors().into_iter().collect::<Option<_>>().ok_or("a row was unavailable")?;
    let decreasing = e.windows(2).all(|w| w[1] < w[0]);
    let ratio = e[2] / e[0];
    let rate = t.empirical_rate().unwrap_or(f64::NAN);
    Ok((
        decreasing && ratio <= 0.6,
        format!("E(20) {:.4e}, E(40) {:.4e}, E(60) {:.4e}, E(60)/E(20) {ratio:.3}, empirical rate n^{rate:.2}", e[0], e[1], e[2]),
        None,
    ))
}

fn tracy_widom() -> Check {
    let hm = shared_cache().get(0.0).map_err(|e| e.to_string())?;
    let f0 = tw_cdf(&hm, 0.0).map_err(|e| e.to_string())?;
    let det = airy_det(0.0).map_err(|e| e.to_string())?.det;
    let first = (f0 - det).abs();
    let ctx = solve_fg(0.0, 0.0, 60.0, 1e-12).map_err(|e| e.to_string())?;
    let g = smallest_eig_cdf(1.0, &ctx).map_err(|e| e.to_string())?;
    let second = (g.gap - g.tw_ratio).abs();
    let ok = first <= 1e-5 && second <= 1e-3;
    let detail = format!("|F(0) - det(I - K_Airy)| {first:.2e}; gap(1) {:.6}, F(-1)/F(0) {:.6}, diff {second:.2e}", g.gap, g.tw_ratio);
    let explanation = if !ok && first <= 1e-5 {
        let c = 2f64.powf(2.0 / 3.0);
        let rescaled = tw_cdf(&hm, -c).map_err(|e| e.to_string())? / f0;
        let d = (g.gap - rescaled).abs();
        (d <= 1e-8).then(|| format!("gap(1) equals F(-2^(2/3))/F(0) = {rescaled:.6} to {d:.1e}"))
    } else {
        None
    };
    Ok((ok, detail, explanation))
}

fn classical_kernels() -> Check {
    let mut sine: f64 = 0.0;
    for &x in &[-3.0, 0.0, 0.25, 1.7, 10.0] {
        sine = sine.max((classical_kernel(ClassicalKernelTag::Sine, x, x).map_err(|e| e.to_string())? - 1.0).abs());
    }
    let oracle = airy_series(0.0).1.powi(2);
    // Ai'(0) = -1 / (3^{1/3} Γ(1/3))
    let closed = (3f64.powf(1.0 / 3.0) * gamma(1.0 / 3.0)).powi(-2);
    let airy = (classical_kernel(ClassicalKernelTag::Airy, 0.0, 0.0).map_err(|e| e.to_string())? - oracle)
        .abs()
        .max((airy_kernel_diagonal(0.0) - oracle).abs())
        .max((oracle - closed).abs());
    let mut asym: f64 = 0.0;
    for &alpha in &[-0.5, 0.0, 0.5, 2.0] {
        for (x, y) in pairs(20, 0.05, 30.0, 7) {
            let tag = ClassicalKernelTag::Bessel { alpha };
            let a = classical_kernel(tag, x, y).map_err(|e| e.to_string())?;
            let b = classical_kernel(tag, y, x).map_err(|e| e.to_string())?;
            asym = asym.max((a - b).abs());
        }
    }
    let ok = sine <= 1e-15 && airy <= 1e-10 && asym <= 1e-14;
    Ok((ok, format!("sine diagonal {sine:.1e}, Airy diagonal vs series {airy:.1e}, Bessel asymmetry {asym:.1e}"), None))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_oracle_matches_solution_far_left() {
        let hm = shared_cache().get(1.0).unwrap();
        let d = (hm.q(-14.0) - hm_negative_expansion(1.0, 14.0)).abs();
        assert!(d <= 2e-4, "{d}");
    }

    #[test]
    fn outcome_line_format() {
        let o = Outcome {
            id: 3,
            title: TITLES[2],
            passed: false,
            detail: "x".into(),
            explanation: Some("y".into()),
            seconds: 1.0,
            limit_seconds: Some(60.0),
        };
        assert_eq!(o.to_string(), "criterion 3 [FAIL] Hastings-McLeod certification: x (1.0 s / limit 60 s); y");
    }
}
