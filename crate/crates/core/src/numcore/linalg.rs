use nalgebra::{DMatrix, DVector};

use super::NumError;

/// LU with partial pivoting. Returns the solution (when `rhs` is given) and
/// the determinant. An exactly singular matrix yields a zero determinant;
/// asking for a solve in that case is an error.
pub fn dense_solve_det(
    a: &DMatrix<f64>,
    rhs: Option<&DVector<f64>>,
) -> Result<(Option<DVector<f64>>, f64), NumError> {
    if a.nrows() == 0 || a.nrows() != a.ncols() {
        return Err(NumError::InvalidArgument(format!(
            "expected a non-empty square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if let Some(b) = rhs {
        if b.len() != a.nrows() {
            return Err(NumError::InvalidArgument(format!(
                "right-hand side has length {}, matrix has {} rows",
                b.len(),
                a.nrows()
            )));
        }
    }
    let lu = a.clone().lu();
    let det = lu.determinant();
    if !det.is_finite() {
        return Err(NumError::NonFinite { what: "LU determinant" });
    }
    let solution = match rhs {
        None => None,
        Some(b) => {
            if det == 0.0 {
                return Err(NumError::Singular);
            }
            Some(lu.solve(b).ok_or(NumError::Singular)?)
        }
    };
    Ok((solution, det))
}

/// Solve only, for systems whose determinant would overflow.
pub fn dense_solve(a: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>, NumError> {
    if a.nrows() == 0 || a.nrows() != a.ncols() || rhs.len() != a.nrows() {
        return Err(NumError::InvalidArgument(format!(
            "incompatible system: {}x{} matrix, right-hand side of length {}",
            a.nrows(),
            a.ncols(),
            rhs.len()
        )));
    }
    let x = a.clone().lu().solve(rhs).ok_or(NumError::Singular)?;
    if x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(NumError::NonFinite { what: "LU solve" })
    }
}
