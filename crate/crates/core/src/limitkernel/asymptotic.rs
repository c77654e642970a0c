use std::f64::consts::PI;

use num_complex::Complex64 as C;

type M2 = [[C; 2]; 2];

const ZERO: M2 = [[C::new(0.0, 0.0); 2]; 2];
const MAX_TERMS: usize = 120;

fn add(a: &M2, b: &M2) -> M2 {
    let mut o = ZERO;
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = a[i][j] + b[i][j];
        }
    }
    o
}

fn scale(a: &M2, c: C) -> M2 {
    let mut o = *a;
    for row in o.iter_mut() {
        for v in row.iter_mut() {
            *v *= c;
        }
    }
    o
}

fn mul(a: &M2, b: &M2) -> M2 {
    let mut o = ZERO;
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    o
}

fn diag_part(a: &M2) -> M2 {
    let mut o = ZERO;
    o[0][0] = a[0][0];
    o[1][1] = a[1][1];
    o
}

fn off_part(a: &M2) -> M2 {
    let mut o = ZERO;
    o[0][1] = a[0][1];
    o[1][0] = a[1][0];
    o
}

fn sigma1() -> M2 {
    let mut o = ZERO;
    o[0][1] = C::new(1.0, 0.0);
    o[1][0] = C::new(1.0, 0.0);
    o
}

fn sigma3() -> M2 {
    let mut o = ZERO;
    o[0][0] = C::new(1.0, 0.0);
    o[1][1] = C::new(-1.0, 0.0);
    o
}

fn commutator_s3(a: &M2) -> M2 {
    let s3 = sigma3();
    let l = mul(&s3, a);
    let r = mul(a, &s3);
    add(&l, &scale(&r, C::new(-1.0, 0.0)))
}

fn norm(a: &M2) -> f64 {
    a.iter().flatten().fold(0.0, |m, v| m.max(v.norm()))
}

/// Formal large-`z` expansion `Y(z) = Σ m_k z^{-k}` of the matrix solution
/// `Y e^{-iθσ_3}`, `θ = 4z^3/3 + s z`, of the complex system behind
/// `(F_1, F_2)`, and its real-line image.
#[derive(Debug, Clone)]
pub(crate) struct CritSeries {
    beta: f64,
    s: f64,
    coeffs: Vec<M2>,
}

impl CritSeries {
    pub fn new(beta: f64, s: f64, q: f64, r: f64) -> Self {
        let i = C::new(0.0, 1.0);
        let s1 = sigma1();
        let s3 = sigma3();
        let mut b0 = ZERO;
        b0[0][0] = C::new(0.0, -2.0 * q * q);
        b0[1][1] = C::new(0.0, 2.0 * q * q);
        b0[0][1] = C::new(0.0, 2.0 * r);
        b0[1][0] = C::new(0.0, -2.0 * r);

        let mut m: Vec<M2> = vec![ZERO; MAX_TERMS + 4];
        m[0][0][0] = C::new(1.0, 0.0);
        m[0][1][1] = C::new(1.0, 0.0);
        let get = |m: &Vec<M2>, k: i64| if k < 0 { ZERO } else { m[k as usize] };

        // Off-diagonal part of equation j solved for m_{j+3}, where
        // -j m_j = -4i[σ3, m_{j+3}] - is[σ3, m_{j+1}] + 4qσ1 m_{j+2} + B0 m_{j+1} + βσ1 m_j
        // and [σ3, O] = 2σ3 O for off-diagonal O.
        let off_next = |m: &Vec<M2>, j: i64| -> M2 {
            let mj = get(m, j);
            let mut rhs = scale(&mj, C::new(-(j as f64), 0.0));
            rhs = add(&rhs, &scale(&commutator_s3(&get(m, j + 1)), i * s));
            rhs = add(&rhs, &scale(&mul(&s1, &get(m, j + 2)), C::new(-4.0 * q, 0.0)));
            rhs = add(&rhs, &scale(&mul(&b0, &get(m, j + 1)), C::new(-1.0, 0.0)));
            rhs = add(&rhs, &scale(&mul(&s1, &mj), C::new(-beta, 0.0)));
            scale(&mul(&s3, &off_part(&rhs)), i / 8.0)
        };
        let diag_at = |m: &Vec<M2>, j: i64| -> M2 {
            let mut rhs = scale(&mul(&s1, &get(m, j + 2)), C::new(4.0 * q, 0.0));
            rhs = add(&rhs, &mul(&b0, &get(m, j + 1)));
            rhs = add(&rhs, &scale(&mul(&s1, &get(m, j)), C::new(beta, 0.0)));
            scale(&diag_part(&rhs), C::new(-1.0 / j as f64, 0.0))
        };

        m[1] = off_next(&m, -2);
        for j in 1..=MAX_TERMS as i64 {
            let ju = j as usize;
            // provisional: D_j and D_{j+1} cancel from the diagonal equation j
            m[ju] = off_part(&m[ju]);
            m[ju + 1] = off_next(&m, j - 2);
            m[ju + 2] = off_next(&m, j - 1);
            let d = diag_at(&m, j);
            m[ju] = add(&off_part(&m[ju]), &d);
            m[ju + 1] = off_next(&m, j - 2);
            m[ju + 2] = ZERO;
        }
        m.truncate(MAX_TERMS + 1);
        CritSeries { beta, s, coeffs: m }
    }

    /// `Y(z)` summed until the terms drop below `1e-18` or, since sizes
    /// oscillate with period 3, until a window of three terms grows.
    /// Returns the sum and the size of the last window.
    fn y(&self, z: f64) -> (M2, f64) {
        let mut sum = self.coeffs[0];
        let mut zk = 1.0;
        let mut window = [f64::INFINITY; 2];
        let mut current: f64 = 0.0;
        for k in 1..self.coeffs.len() {
            zk /= z;
            let term = scale(&self.coeffs[k], C::new(zk, 0.0));
            let size = norm(&term);
            current = current.max(size);
            if k % 3 == 0 {
                if current > window[1] && k > 3 {
                    return (sum, window[1]);
                }
                window = [window[1], current];
                current = 0.0;
            }
            sum = add(&sum, &term);
            if size <= 1e-18 && k % 3 == 2 {
                return (sum, size);
            }
        }
        (sum, window[1])
    }

    /// `(F_1(z), F_2(z))` for large positive `z`, with the truncation size.
    pub fn eval(&self, z: f64) -> (f64, f64, f64) {
        let (y, err) = self.y(z);
        let theta = 4.0 * z * z * z / 3.0 + self.s * z;
        let i = C::new(0.0, 1.0);
        let phi1 = (-i * theta).exp() * y[0][0] + (-i * PI * self.beta).exp() * (i * theta).exp() * y[0][1];
        let w = (i * 0.5 * PI * self.beta).exp() * phi1;
        (w.re, w.im, err)
    }

    #[cfg(test)]
    pub fn coefficient(&self, k: usize) -> M2 {
        self.coeffs[k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rhs(beta: f64, s: f64, q: f64, r: f64, z: f64, f: (f64, f64)) -> (f64, f64) {
        let a = 4.0 * z * q + beta / z;
        let b = 4.0 * z * z + s + 2.0 * q * q + 2.0 * r;
        let c = -4.0 * z * z - s - 2.0 * q * q + 2.0 * r;
        (a * f.0 + b * f.1, c * f.0 - a * f.1)
    }

    #[test]
    fn first_coefficient() {
        let (q, r) = (0.6, -0.2);
        let ser = CritSeries::new(0.5, 0.3, q, r);
        let m1 = ser.coefficient(1);
        assert!((m1[0][1] - C::new(0.0, -q / 2.0)).norm() < 1e-15);
        assert!((m1[1][0] - C::new(0.0, q / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn series_satisfies_real_system() {
        // central differences of the summed series against the right-hand side
        for &(beta, s, q, r) in &[(0.5, 0.0, 0.6386857857, -0.2381651), (1.0, -1.0, 1.1, -0.3), (0.0, 2.0, 0.0135, -0.02)] {
            let ser = CritSeries::new(beta, s, q, r);
            for &z in &[5.0, 6.5, 8.0] {
                let h = 1e-5;
                let p = |k: f64| ser.eval(z + k * h);
                let (a, b, c, e) = (p(2.0), p(1.0), p(-1.0), p(-2.0));
                let (f1, f2, err) = ser.eval(z);
                let d = (
                    (-a.0 + 8.0 * b.0 - 8.0 * c.0 + e.0) / (12.0 * h),
                    (-a.1 + 8.0 * b.1 - 8.0 * c.1 + e.1) / (12.0 * h),
                );
                let want = rhs(beta, s, q, r, z, (f1, f2));
                let scale = 4.0 * z * z;
                if z >= 6.5 {
                    assert!(err < 1e-15, "truncation {err} at z = {z}");
                }
                assert!((d.0 - want.0).abs() <= 2e-7 * scale, "beta {beta} z {z}: {} vs {}", d.0, want.0);
                assert!((d.1 - want.1).abs() <= 2e-7 * scale, "beta {beta} z {z}: {} vs {}", d.1, want.1);
            }
        }
    }

    #[test]
    fn series_matches_integration() {
        let (beta, s, q, r) = (0.7, 0.4, 0.8, -0.25);
        let ser = CritSeries::new(beta, s, q, r);
        let (z0, z1) = (8.0, 4.5);
        let (f1, f2, _) = ser.eval(z0);
        let sol = crate::numcore::ode_solve(
            |z, y, dy| {
                let d = rhs(beta, s, q, r, z, (y[0], y[1]));
                dy[0] = d.0;
                dy[1] = d.1;
            },
            z0,
            z1,
            &[f1, f2],
            1e-13,
            1e-14,
        )
        .unwrap();
        let y = sol.eval(z1).unwrap();
        let (g1, g2, _) = ser.eval(z1);
        assert!((y[0] - g1).abs() < 1e-9 && (y[1] - g2).abs() < 1e-9, "{y:?} vs ({g1}, {g2})");
    }

    #[test]
    fn leading_behaviour() {
        let ser = CritSeries::new(0.5, 0.0, 0.6, -0.2);
        let z = 30.0;
        let (f1, f2, _) = ser.eval(z);
        let th = 4.0 * z * z * z / 3.0 - 0.25 * PI;
        assert!((f1 - th.cos()).abs() < 0.05);
        assert!((f2 + th.sin()).abs() < 0.05);
    }
}
