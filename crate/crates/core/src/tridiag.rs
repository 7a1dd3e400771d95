//! Symmetric tridiagonal kernels: Sturm counts for matrix pencils and the
//! Thomas solve.

const PIVOT_GUARD: f64 = 1e-300;

/// Number of eigenvalues of the pencil `(A, M)` strictly below `sigma`,
/// for symmetric tridiagonal `A` and symmetric positive definite tridiagonal
/// `M`.
///
/// By Sylvester's law of inertia this is the number of negative pivots in
/// the LDLᵀ factorization of `A - sigma * M`.
pub fn pencil_count_below(
    a_diag: &[f64],
    a_off: &[f64],
    m_diag: &[f64],
    m_off: &[f64],
    sigma: f64,
) -> usize {
    let n = a_diag.len();
    if n == 0 {
        return 0;
    }
    let mut count = 0;
    let mut pivot = a_diag[0] - sigma * m_diag[0];
    if pivot < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let safe = if pivot.abs() < PIVOT_GUARD {
            PIVOT_GUARD.copysign(pivot)
        } else {
            pivot
        };
        let off = a_off[i - 1] - sigma * m_off[i - 1];
        pivot = (a_diag[i] - sigma * m_diag[i]) - off * off / safe;
        if pivot < 0.0 {
            count += 1;
        }
    }
    count
}

/// Solves `T x = rhs` for symmetric tridiagonal `T` with diagonal `diag` and
/// off-diagonal `off`. Returns `None` on a zero pivot.
pub fn solve_symmetric(diag: &[f64], off: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    debug_assert_eq!(rhs.len(), n);
    debug_assert_eq!(off.len() + 1, n.max(1));
    if n == 0 {
        return Some(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom == 0.0 {
        return None;
    }
    if n > 1 {
        c[0] = off[0] / denom;
    }
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - off[i - 1] * c[i - 1];
        if denom == 0.0 || !denom.is_finite() {
            return None;
        }
        if i + 1 < n {
            c[i] = off[i] / denom;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Some(d)
}
