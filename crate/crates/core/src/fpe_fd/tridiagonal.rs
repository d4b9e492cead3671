//! Thomas algorithm for tridiagonal systems.

use crate::error::{Error, Result};

/// Solves `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
///
/// `lower[0]` and `upper[n-1]` are ignored. No pivoting, so the matrix
/// should be diagonally dominant (the implicit FPE operators are).
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if lower.len() != n || upper.len() != n || rhs.len() != n {
        return Err(Error::InvalidState(format!(
            "tridiagonal bands have mismatched lengths ({}, {n}, {}, {})",
            lower.len(),
            upper.len(),
            rhs.len()
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut pivot = diag[0];
    for i in 0..n {
        if i > 0 {
            pivot = diag[i] - lower[i] * c[i - 1];
        }
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::InvalidState(format!("zero pivot in tridiagonal solve at row {i}")));
        }
        c[i] = if i + 1 < n { upper[i] / pivot } else { 0.0 };
        let prev = if i > 0 { lower[i] * x[i - 1] } else { 0.0 };
        x[i] = (rhs[i] - prev) / pivot;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_dense_product() {
        let lower = [0.0, -1.0, 0.5, -0.25, 1.0];
        let diag = [4.0, 5.0, 3.0, 6.0, 4.5];
        let upper = [1.0, -2.0, 0.75, 1.5, 0.0];
        let want = [1.0, -2.0, 3.0, 0.5, -1.5];
        let rhs: Vec<f64> = (0..5)
            .map(|i| {
                let mut r = diag[i] * want[i];
                if i > 0 {
                    r += lower[i] * want[i - 1];
                }
                if i < 4 {
                    r += upper[i] * want[i + 1];
                }
                r
            })
            .collect();
        let x = solve_tridiagonal(&lower, &diag, &upper, &rhs).unwrap();
        for (a, b) in x.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(solve_tridiagonal(&[0.0], &[1.0, 2.0], &[0.0, 0.0], &[1.0, 1.0]).is_err());
        assert!(solve_tridiagonal(&[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]).is_err());
        assert!(solve_tridiagonal(&[], &[], &[], &[]).unwrap().is_empty());
    }
}
