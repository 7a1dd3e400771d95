use super::RobinBC;
use std::f64::consts::PI;

/// λ₁ of `y'' + λy = 0` with the Robin conditions `bc`.
///
/// For `λ = ω² > 0` the conditions reduce to
/// `tan ω (ω² − k₀²k₁²) = ω (k₀² + k₁²)`. The root is bracketed on (0, π)
/// using `sin ω (k₀²k₁² − ω²)/ω + cos ω (k₀² + k₁²)`, which is the same
/// equation multiplied through by `cos ω / ω` and has no poles.
pub fn lambda1_zero(bc: &RobinBC) -> f64 {
    let product = bc.k0sq() * bc.k1sq();
    let sum = bc.k0sq() + bc.k1sq();
    if sum == 0.0 {
        return 0.0;
    }
    let sinc = |w: f64| if w == 0.0 { 1.0 } else { w.sin() / w };
    // positive at 0⁺, equal to -sum < 0 at π
    let g = |w: f64| sinc(w) * (product - w * w) + w.cos() * sum;
    let (mut lo, mut hi) = (0.0f64, PI);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let omega = 0.5 * (lo + hi);
    omega * omega
}
