//! Small dense vector helpers.
//!
//! Everything here runs in a fixed left-to-right order so repeated runs are
//! bit-identical; several trace invariants recompute these quantities and
//! compare exactly.

/// Dot product. Panics in debug builds on length mismatch.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm, computed as `dot(v, v).sqrt()` so that callers which
/// recombine `norm(v)^2` with other terms see consistent rounding.
pub fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Max-norm; 0 for the empty vector.
pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// `a - b`.
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `acc += step * v`, in place.
pub fn add_scaled(acc: &mut [f64], step: f64, v: &[f64]) {
    debug_assert_eq!(acc.len(), v.len());
    for (a, x) in acc.iter_mut().zip(v) {
        *a += step * x;
    }
}

/// Linear combination of Jacobian columns: `sum_i weights[i] * columns[i]`.
///
/// Constraint Jacobians are stored as `m` columns of length `n`, one gradient
/// per constraint, so this computes the `R^n` vector `grad_h(x) * weights`.
pub fn columns_times(columns: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    debug_assert_eq!(columns.len(), weights.len());
    let n = columns.first().map_or(0, Vec::len);
    let mut out = vec![0.0; n];
    for (col, &w) in columns.iter().zip(weights) {
        add_scaled(&mut out, w, col);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_and_norms() {
        assert_eq!(dot(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]), 32.0);
        assert_eq!(norm(&[3.0, 4.0]), 5.0);
        assert_eq!(norm_inf(&[-7.0, 2.0]), 7.0);
        assert_eq!(norm_inf(&[]), 0.0);
    }

    #[test]
    fn column_combination_matches_manual_expansion() {
        // Two constraints in R^3.
        let cols = vec![vec![1.0, 0.0, 2.0], vec![0.0, -1.0, 1.0]];
        let v = columns_times(&cols, &[3.0, 2.0]);
        assert_eq!(v, vec![3.0, -2.0, 8.0]);
    }

    #[test]
    fn empty_jacobian_yields_empty_vector() {
        assert!(columns_times(&[], &[]).is_empty());
    }

    #[test]
    fn add_scaled_accumulates() {
        let mut acc = vec![1.0, 1.0];
        add_scaled(&mut acc, 0.5, &[2.0, -4.0]);
        assert_eq!(acc, vec![2.0, -1.0]);
    }
}
