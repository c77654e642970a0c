use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_P: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (z - 1)
    let mut a = LANCZOS_P[0];
    for (i, &p) in LANCZOS_P.iter().enumerate().skip(1) {
        a += p / (x + i as f64);
    }
    a
}

/// Gamma function for real arguments (Lanczos, g = 7, with reflection
/// below 1/2). Poles return NaN.
pub fn gamma(z: f64) -> f64 {
    if z < 0.5 {
        if z == z.floor() {
            return f64::NAN;
        }
        PI / ((PI * z).sin() * gamma(1.0 - z))
    } else {
        let x = z - 1.0;
        let t = x + LANCZOS_G + 0.5;
        // split the power to delay overflow
        let p = t.powf(0.5 * (x + 0.5));
        (2.0 * PI).sqrt() * p * (-t).exp() * p * lanczos_sum(x)
    }
}

/// Natural logarithm of |Γ(z)|.
pub fn ln_gamma(z: f64) -> f64 {
    if z < 0.5 {
        (PI / (PI * z).sin().abs()).ln() - ln_gamma(1.0 - z)
    } else {
        let x = z - 1.0;
        let t = x + LANCZOS_G + 0.5;
        0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + lanczos_sum(x).ln()
    }
}
