use super::NumError;

const MAX_SWEEPS: usize = 60;

/// Eigenvalues of a symmetric tridiagonal matrix together with the first
/// component of each normalized eigenvector, sorted by eigenvalue.
///
/// `diag` has length `m`, `offdiag` has length `m - 1` (`offdiag[i]` couples
/// rows `i` and `i + 1`). Implicit-shift QL; only the first row of the
/// eigenvector matrix is accumulated.
pub fn tridiagonal_eigen_first_components(
    diag: &[f64],
    offdiag: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), NumError> {
    let m = diag.len();
    if m == 0 {
        return Err(NumError::InvalidArgument("empty tridiagonal matrix".into()));
    }
    if offdiag.len() + 1 != m {
        return Err(NumError::InvalidArgument(format!(
            "off-diagonal length {} does not match dimension {}",
            offdiag.len(),
            m
        )));
    }
    let mut d = diag.to_vec();
    // e[i] couples i and i+1; e[m-1] is workspace
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; m];
    z[0] = 1.0;

    for l in 0..m {
        let mut sweeps = 0;
        loop {
            let mut mm = l;
            while mm < m - 1 {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= f64::EPSILON * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(NumError::NoConvergence {
                    what: "tridiagonal QL eigensolve",
                    iterations: MAX_SWEEPS,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[mm] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = mm;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&k| d[k]).collect();
    let first = order.iter().map(|&k| z[k]).collect();
    Ok((values, first))
}
