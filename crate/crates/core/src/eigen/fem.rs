use super::RobinBC;
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::tridiag::pencil_count_below;

/// ∫ f g over [c, d] for linear f, g given by their endpoint values.
fn linear_product(len: f64, f: (f64, f64), g: (f64, f64)) -> f64 {
    len / 6.0 * (2.0 * f.0 * g.0 + f.0 * g.1 + f.1 * g.0 + 2.0 * f.1 * g.1)
}

/// Smallest eigenvalue of the P1 finite-element discretization of
/// `∫y'² + k₀²y(0)² + k₁²y(1)² − ∫q y² − Σ w y(ζ)²` against `∫y²` on a
/// uniform grid of `n_nodes` nodes.
///
/// Step integrals are exact per element; each delta is moved to the nearest
/// node so both matrices stay tridiagonal. The eigenvalue is located by
/// bisection on the Sturm count of `A − σM`.
pub fn lambda1_fd(q: &Potential, bc: &RobinBC, n_nodes: usize) -> Result<f64> {
    if n_nodes < 32 {
        return Err(Error::InvalidArgument(format!(
            "n_nodes must be >= 32, got {n_nodes}"
        )));
    }
    let elements = n_nodes - 1;
    let h = 1.0 / elements as f64;
    let node = |i: usize| if i == elements { 1.0 } else { i as f64 * h };

    let mut a_diag = vec![0.0; n_nodes];
    let mut a_off = vec![-1.0 / h; elements];
    let mut m_diag = vec![0.0; n_nodes];
    let m_off = vec![h / 6.0; elements];
    for e in 0..elements {
        a_diag[e] += 1.0 / h;
        a_diag[e + 1] += 1.0 / h;
        m_diag[e] += h / 3.0;
        m_diag[e + 1] += h / 3.0;
    }
    a_diag[0] += bc.k0sq();
    a_diag[elements] += bc.k1sq();

    for (a, b, height) in q.step().cells() {
        if height == 0.0 {
            continue;
        }
        let first = ((a / h).floor() as usize).min(elements - 1);
        let last = ((b / h).ceil() as usize).clamp(first + 1, elements);
        for e in first..last {
            let (xl, xr) = (node(e), node(e + 1));
            let (c, d) = (a.max(xl), b.min(xr));
            if d <= c {
                continue;
            }
            // hat functions of nodes e and e + 1 at c and d
            let right = |x: f64| (x - xl) / (xr - xl);
            let phi_r = (right(c), right(d));
            let phi_l = (1.0 - phi_r.0, 1.0 - phi_r.1);
            let len = d - c;
            a_diag[e] -= height * linear_product(len, phi_l, phi_l);
            a_diag[e + 1] -= height * linear_product(len, phi_r, phi_r);
            a_off[e] -= height * linear_product(len, phi_l, phi_r);
        }
    }
    for delta in q.deltas() {
        let j = ((delta.site() / h).round() as usize).min(elements);
        a_diag[j] -= delta.weight();
    }

    let count = |sigma: f64| pencil_count_below(&a_diag, &a_off, &m_diag, &m_off, sigma);
    let mut lo = -1.0;
    let mut hi = 1.0;
    for _ in 0..2000 {
        if count(lo) == 0 {
            break;
        }
        lo *= 2.0;
    }
    for _ in 0..2000 {
        if count(hi) >= 1 {
            break;
        }
        hi *= 2.0;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * mid.abs().max(1.0) {
            break;
        }
        if count(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
