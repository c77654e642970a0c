//! Dormand–Prince 5(4) with continuous (dense) output.

use super::NumError;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// continuous extension of order 4
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step magnitude; chosen automatically when `None`.
    pub first_step: Option<f64>,
    /// Largest allowed step magnitude.
    pub max_step: f64,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, first_step: None, max_step: f64::INFINITY, max_steps: 2_000_000 }
    }
}

/// One accepted step of the continuous extension.
#[derive(Debug, Clone)]
struct Segment {
    t0: f64,
    h: f64,
    coeffs: [Vec<f64>; 5],
}

impl Segment {
    fn eval_into(&self, t: f64, out: &mut [f64]) {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let [r1, r2, r3, r4, r5] = &self.coeffs;
        for i in 0..out.len() {
            out[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        }
    }
}

/// Dense solution of an initial value problem on the closed range between
/// `t_start` and `t_end` (either orientation).
#[derive(Debug, Clone)]
pub struct DenseSolution {
    t_start: f64,
    t_end: f64,
    dim: usize,
    segments: Vec<Segment>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub evaluations: usize,
}

impl DenseSolution {
    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Step boundaries in integration order.
    pub fn mesh(&self) -> Vec<f64> {
        let mut m: Vec<f64> = self.segments.iter().map(|s| s.t0).collect();
        m.push(self.t_end);
        m
    }

    pub fn contains(&self, t: f64) -> bool {
        let (lo, hi) = if self.t_start <= self.t_end {
            (self.t_start, self.t_end)
        } else {
            (self.t_end, self.t_start)
        };
        t >= lo && t <= hi
    }

    fn segment_for(&self, t: f64) -> &Segment {
        let forward = self.h_sign() > 0.0;
        // segments are ordered along the integration direction
        let idx = self.segments.partition_point(|s| if forward { s.t0 <= t } else { s.t0 >= t });
        &self.segments[idx.saturating_sub(1).min(self.segments.len() - 1)]
    }

    fn h_sign(&self) -> f64 {
        if self.t_end >= self.t_start {
            1.0
        } else {
            -1.0
        }
    }

    /// Interpolated state at `t`, which must lie in the solved range.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>, NumError> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out)?;
        Ok(out)
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<(), NumError> {
        if !self.contains(t) {
            return Err(NumError::InvalidArgument(format!(
                "t = {t} outside solved range [{}, {}]",
                self.t_start.min(self.t_end),
                self.t_start.max(self.t_end)
            )));
        }
        self.segment_for(t).eval_into(t, out);
        Ok(())
    }
}

fn error_norm(err: &[f64], y: &[f64], y_new: &[f64], rtol: f64, atol: f64) -> f64 {
    let n = err.len() as f64;
    let s: f64 = err
        .iter()
        .zip(y.iter().zip(y_new))
        .map(|(e, (a, b))| {
            let sc = atol + rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (s / n).sqrt()
}

/// Integrates `y' = field(t, y)` from `t0` to `t1` with default options.
pub fn ode_solve<F>(
    field: F,
    t0: f64,
    t1: f64,
    y0: &[f64],
    rtol: f64,
    atol: f64,
) -> Result<DenseSolution, NumError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    ode_solve_with(field, t0, t1, y0, &OdeOptions::new(rtol, atol))
}

/// Integrates `y' = field(t, y)` from `t0` to `t1`; `t1 < t0` integrates
/// backward.
pub fn ode_solve_with<F>(
    mut field: F,
    t0: f64,
    t1: f64,
    y0: &[f64],
    opts: &OdeOptions,
) -> Result<DenseSolution, NumError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if t0 == t1 || !t0.is_finite() || !t1.is_finite() {
        return Err(NumError::InvalidArgument(format!("bad integration range [{t0}, {t1}]")));
    }
    if !(opts.rtol > 0.0 && opts.atol >= 0.0) {
        return Err(NumError::InvalidArgument("tolerances must be positive".into()));
    }
    let n = y0.len();
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    let mut err = vec![0.0; n];
    field(t, &y, &mut k1);
    let mut evaluations = 1;

    let mut h = match opts.first_step {
        Some(h) => h.abs().min(span),
        None => {
            // Hairer's starting-step heuristic
            let sc: Vec<f64> = y.iter().map(|v| opts.atol + opts.rtol * v.abs()).collect();
            let d0 = (y.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / n as f64).sqrt();
            let d1 = (k1.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / n as f64).sqrt();
            let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            let h0 = h0.min(span);
            for i in 0..n {
                ytmp[i] = y[i] + dir * h0 * k1[i];
            }
            field(t + dir * h0, &ytmp, &mut k2);
            evaluations += 1;
            let d2 = (k2
                .iter()
                .zip(&k1)
                .zip(&sc)
                .map(|((a, b), s)| ((a - b) / s).powi(2))
                .sum::<f64>()
                / n as f64)
                .sqrt()
                / h0;
            let h1 = if d1.max(d2) <= 1e-15 {
                (h0 * 1e-3).max(1e-6)
            } else {
                (0.01 / d1.max(d2)).powf(0.2)
            };
            (100.0 * h0).min(h1).min(span)
        }
    };
    h = h.min(opts.max_step);

    let mut segments = Vec::new();
    let mut accepted = 0;
    let mut rejected = 0;
    let mut last_rejected = false;

    loop {
        let remaining = (t1 - t) * dir;
        if remaining <= 0.0 {
            break;
        }
        if accepted + rejected >= opts.max_steps {
            return Err(NumError::TooManySteps { t, steps: accepted + rejected });
        }
        let min_h = 16.0 * f64::EPSILON * t.abs().max(span * 1e-3);
        if h < min_h {
            return Err(NumError::StepSizeUnderflow { t });
        }
        let mut hs = h;
        let mut last = false;
        if hs >= remaining || remaining - hs < 1e-12 * span {
            hs = remaining;
            last = true;
        }
        let hd = dir * hs;

        for i in 0..n {
            ytmp[i] = y[i] + hd * A21 * k1[i];
        }
        field(t + C2 * hd, &ytmp, &mut k2);
        for i in 0..n {
            ytmp[i] = y[i] + hd * (A31 * k1[i] + A32 * k2[i]);
        }
        field(t + C3 * hd, &ytmp, &mut k3);
        for i in 0..n {
            ytmp[i] = y[i] + hd * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        field(t + C4 * hd, &ytmp, &mut k4);
        for i in 0..n {
            ytmp[i] = y[i] + hd * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        field(t + C5 * hd, &ytmp, &mut k5);
        for i in 0..n {
            ytmp[i] = y[i] + hd * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let t_new = if last { t1 } else { t + hd };
        field(t + hd, &ytmp, &mut k6);
        for i in 0..n {
            ynew[i] = y[i] + hd * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        field(t_new, &ynew, &mut k7);
        evaluations += 6;
        for i in 0..n {
            err[i] = hd * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let en = error_norm(&err, &y, &ynew, opts.rtol, opts.atol);
        if !en.is_finite() {
            if ynew.iter().any(|v| !v.is_finite()) && hs <= min_h * 4.0 {
                return Err(NumError::NonFinite { what: "Runge-Kutta stage" });
            }
            h = hs * 0.1;
            rejected += 1;
            last_rejected = true;
            continue;
        }
        if en <= 1.0 {
            let mut r1 = vec![0.0; n];
            let mut r2 = vec![0.0; n];
            let mut r3 = vec![0.0; n];
            let mut r4 = vec![0.0; n];
            let mut r5 = vec![0.0; n];
            for i in 0..n {
                let ydiff = ynew[i] - y[i];
                let bspl = hd * k1[i] - ydiff;
                r1[i] = y[i];
                r2[i] = ydiff;
                r3[i] = bspl;
                r4[i] = ydiff - hd * k7[i] - bspl;
                r5[i] = hd * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            segments.push(Segment { t0: t, h: t_new - t, coeffs: [r1, r2, r3, r4, r5] });
            accepted += 1;
            t = t_new;
            std::mem::swap(&mut y, &mut ynew);
            std::mem::swap(&mut k1, &mut k7);
            let mut fac = 0.9 * en.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 5.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            last_rejected = false;
            h = (hs * fac).min(opts.max_step);
            if last {
                break;
            }
        } else {
            let fac = (0.9 * en.powf(-0.2)).max(0.2);
            h = hs * fac;
            rejected += 1;
            last_rejected = true;
        }
    }

    Ok(DenseSolution {
        t_start: t0,
        t_end: t1,
        dim: n,
        segments,
        accepted_steps: accepted,
        rejected_steps: rejected,
        evaluations,
    })
}
