//! Gauss rules via Golub–Welsch and adaptive Gauss–Kronrod integration.

use std::collections::BinaryHeap;
use std::cmp::Ordering;

use super::eigen::tridiagonal_eigen_first_components;
use super::NumError;
use crate::specfun::gamma::ln_gamma;

/// Nodes and positive weights of an interpolatory rule on `interval`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: (f64, f64),
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// The same rule affinely moved onto `(a, b)`. Weights scale by the
    /// length ratio, so this is only meaningful for rules with a constant
    /// weight function.
    pub fn mapped(&self, a: f64, b: f64) -> QuadratureRule {
        let (a0, b0) = self.interval;
        let scale = (b - a) / (b0 - a0);
        QuadratureRule {
            nodes: self.nodes.iter().map(|&x| a + (x - a0) * scale).collect(),
            weights: self.weights.iter().map(|&w| w * scale).collect(),
            interval: (a, b),
        }
    }
}

/// Gauss rule for the measure whose monic Jacobi matrix has diagonal `diag`
/// and off-diagonal `offdiag` (recurrence coefficients `a_1..a_{m-1}`), with
/// total mass `mu0`.
pub fn gauss_rule_from_recurrence(
    diag: &[f64],
    offdiag: &[f64],
    mu0: f64,
    interval: (f64, f64),
) -> Result<QuadratureRule, NumError> {
    let (nodes, first) = tridiagonal_eigen_first_components(diag, offdiag)?;
    let weights = first.iter().map(|z| mu0 * z * z).collect();
    Ok(QuadratureRule { nodes, weights, interval })
}

/// m-point Gauss–Legendre rule on `(a, b)`.
pub fn gauss_legendre_rule(m: usize, a: f64, b: f64) -> Result<QuadratureRule, NumError> {
    if m == 0 {
        return Err(NumError::InvalidArgument("quadrature order must be positive".into()));
    }
    if !(a < b) {
        return Err(NumError::InvalidArgument(format!("empty interval ({a}, {b})")));
    }
    let diag = vec![0.0; m];
    let offdiag: Vec<f64> = (1..m)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let reference = gauss_rule_from_recurrence(&diag, &offdiag, 2.0, (-1.0, 1.0))?;
    let mut rule = reference.mapped(a, b);
    // exact symmetry of the reference rule, removes O(eps) drift in the nodes
    for i in 0..m / 2 {
        let j = m - 1 - i;
        let w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.weights[i] = w;
        rule.weights[j] = w;
        let t = 0.5 * (reference.nodes[j] - reference.nodes[i]);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        rule.nodes[i] = mid - half * t;
        rule.nodes[j] = mid + half * t;
    }
    if m % 2 == 1 {
        rule.nodes[m / 2] = 0.5 * (a + b);
    }
    Ok(rule)
}

/// m-point Gauss–Jacobi rule on `(a, b)` for the weight
/// `(b - x)^alpha (x - a)^beta`, `alpha, beta > -1`.
pub fn gauss_jacobi_rule(
    m: usize,
    alpha: f64,
    beta: f64,
    a: f64,
    b: f64,
) -> Result<QuadratureRule, NumError> {
    if m == 0 {
        return Err(NumError::InvalidArgument("quadrature order must be positive".into()));
    }
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(NumError::InvalidArgument(format!(
            "Jacobi exponents must exceed -1, got ({alpha}, {beta})"
        )));
    }
    if !(a < b) {
        return Err(NumError::InvalidArgument(format!("empty interval ({a}, {b})")));
    }
    let ab = alpha + beta;
    let mut diag = Vec::with_capacity(m);
    for k in 0..m {
        let kf = k as f64;
        let v = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        diag.push(v);
    }
    let mut offdiag = Vec::with_capacity(m.saturating_sub(1));
    for k in 1..m {
        let kf = k as f64;
        let v = if k == 1 {
            4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            let t = 2.0 * kf + ab;
            4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (t * t * (t + 1.0) * (t - 1.0))
        };
        offdiag.push(v.sqrt());
    }
    let ln_mu0 = (ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(ab + 2.0);
    let reference = gauss_rule_from_recurrence(&diag, &offdiag, ln_mu0.exp(), (-1.0, 1.0))?;
    let half = 0.5 * (b - a);
    let scale = half.powf(ab + 1.0);
    Ok(QuadratureRule {
        nodes: reference.nodes.iter().map(|&t| a + half * (t + 1.0)).collect(),
        weights: reference.weights.iter().map(|&w| w * scale).collect(),
        interval: (a, b),
    })
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrationResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) integration of `f` over `(a, b)`.
///
/// Stops once the summed error estimate is below
/// `max(abs_tol, rel_tol * |integral|)`; fails after `max_segments`
/// bisections, reporting the midpoint of the worst segment.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Result<IntegrationResult, NumError> {
    if a == b {
        return Ok(IntegrationResult { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let (value, error) = gk15(&mut f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    loop {
        if !total.is_finite() {
            return Err(NumError::NonFinite { what: "adaptive quadrature" });
        }
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(IntegrationResult { value: total, error: total_err, evaluations });
        }
        if heap.len() >= max_segments {
            let worst = heap.peek().map(|s| 0.5 * (s.a + s.b)).unwrap_or(a);
            return Err(NumError::QuadratureNoConvergence { worst_point: worst, error: total_err });
        }
        let seg = heap.pop().expect("heap is never empty here");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            // interval collapsed to adjacent floats; nothing more to gain
            return Err(NumError::QuadratureNoConvergence { worst_point: mid, error: total_err });
        }
        let (v1, e1) = gk15(&mut f, seg.a, mid);
        let (v2, e2) = gk15(&mut f, mid, seg.b);
        evaluations += 30;
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
        // guard against drift of the running sums
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
}

/// Integrates over `(a, b)` after the change of variables
/// `x = a + (b - a) t^2 (3 - 2t)`, whose Jacobian vanishes quadratically at
/// both ends. Square-root (and inverse square-root) endpoint behaviour
/// becomes smooth; logarithmic endpoint singularities become mild.
pub fn integrate_edge_smoothed<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<IntegrationResult, NumError> {
    integrate_edge_smoothed_gaps(|x, _, _| f(x), a, b, abs_tol, rel_tol)
}

/// As [`integrate_edge_smoothed`], but the integrand also receives the
/// distances `x - a` and `b - x`, computed without cancellation.
pub fn integrate_edge_smoothed_gaps<F: FnMut(f64, f64, f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<IntegrationResult, NumError> {
    let len = b - a;
    integrate_adaptive(
        |t| {
            let u = 1.0 - t;
            let da = len * t * t * (3.0 - 2.0 * t);
            let db = len * u * u * (1.0 + 2.0 * t);
            let jac = 6.0 * len * t * u;
            if jac == 0.0 {
                return 0.0;
            }
            let x = if t < 0.5 { a + da } else { b - db };
            f(x, da, db) * jac
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
        4000,
    )
}
