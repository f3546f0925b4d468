use nalgebra::{DMatrix, DVector};

/// Condition number above which a Newton step is refused.
pub const MAX_CONDITION: f64 = 1e14;

/// Solves `a x = b`, returning `None` when `a` is singular or its
/// 2-norm condition number exceeds [`MAX_CONDITION`].
pub fn solve_checked(a: &DMatrix<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let sv = a.singular_values();
    let smax = sv.max();
    let smin = sv.min();
    if !(smin > 0.0) || !smax.is_finite() || smax / smin > MAX_CONDITION {
        return None;
    }
    let x = a.clone().lu().solve(&DVector::from_column_slice(b))?;
    if x.iter().all(|v| v.is_finite()) {
        Some(x.iter().copied().collect())
    } else {
        None
    }
}

/// Minimum-norm least-squares solution of `a x = b` via SVD.
pub fn lstsq(a: &DMatrix<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let svd = a.clone().svd(true, true);
    let eps = 1e-12 * svd.singular_values.max().max(f64::MIN_POSITIVE);
    let x = svd.solve(&DVector::from_column_slice(b), eps).ok()?;
    Some(x.iter().copied().collect())
}

pub fn determinant(a: &DMatrix<f64>) -> f64 {
    a.clone().lu().determinant()
}
