use std::f64::consts::PI;

use super::{EigenResult, Integrator, RobinBC, SolverConfig};
use crate::error::{Error, Result};
use crate::potential::{merge_breakpoints, Potential};

/// Ordered pieces of a potential as seen by a left-to-right sweep.
#[derive(Debug, Clone, Copy)]
enum Piece {
    Span { len: f64, height: f64 },
    Jump { weight: f64 },
}

fn pieces(q: &Potential) -> Vec<Piece> {
    let deltas = q.deltas();
    let mut out = Vec::with_capacity(q.step().num_cells() + 2 * deltas.len());
    let mut next = 0;
    for (a, b, height) in q.step().cells() {
        let mut x = a;
        while next < deltas.len() && deltas[next].site() < b {
            let site = deltas[next].site();
            out.push(Piece::Span {
                len: site - x,
                height,
            });
            out.push(Piece::Jump {
                weight: deltas[next].weight(),
            });
            x = site;
            next += 1;
        }
        out.push(Piece::Span { len: b - x, height });
    }
    // deltas sitting at x = 1
    for d in &deltas[next..] {
        out.push(Piece::Jump { weight: d.weight() });
    }
    out
}

/// Splits `theta` into `(k, r)` with `theta = kπ + r`, `r ∈ [0, π)`.
fn split_period(theta: f64) -> (f64, f64) {
    let mut k = (theta / PI).floor();
    let mut r = theta - k * PI;
    if r < 0.0 {
        k -= 1.0;
        r += PI;
    } else if r >= PI {
        k += 1.0;
        r -= PI;
    }
    (k, r)
}

/// Advances θ across an interval of length `len` where `λ + q ≡ mu`, using
/// the closed-form solution of `y'' + mu y = 0` and tracking the winding.
fn advance_exact(theta: f64, mu: f64, len: f64) -> f64 {
    if len <= 0.0 {
        return theta;
    }
    let (k, r) = split_period(theta);
    let (y, dy) = r.sin_cos();
    if mu > 0.0 {
        // Scaled angle φ with cot φ = cot θ / ω advances linearly.
        let omega = mu.sqrt();
        let phi = k * PI + (omega * y).atan2(dy) + omega * len;
        let (k_end, s) = split_period(phi);
        return k_end * PI + s.sin().atan2(omega * s.cos());
    }
    // At most one zero of y on the interval when mu <= 0.
    let (y1, dy1) = if mu == 0.0 {
        (y + dy * len, dy)
    } else {
        let kappa = (-mu).sqrt();
        let t = (kappa * len).tanh();
        (y + dy * t / kappa, y * kappa * t + dy)
    };
    if y1 < 0.0 || (y1 == 0.0 && dy1 < 0.0) {
        (k + 1.0) * PI + (-y1).atan2(-dy1)
    } else {
        k * PI + y1.atan2(dy1)
    }
}

fn advance_rk4(theta: f64, mu: f64, len: f64, min_steps: usize) -> f64 {
    if len <= 0.0 {
        return theta;
    }
    let steps = min_steps.max((4.0 * len * (1.0 + mu.abs())).ceil() as usize);
    let h = len / steps as f64;
    let rhs = |t: f64| {
        let (s, c) = t.sin_cos();
        c * c + mu * s * s
    };
    let mut th = theta;
    for _ in 0..steps {
        let k1 = rhs(th);
        let k2 = rhs(th + 0.5 * h * k1);
        let k3 = rhs(th + 0.5 * h * k2);
        let k4 = rhs(th + h * k3);
        th += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    th
}

/// `cot θ⁺ = cot θ⁻ - w`, staying in the same π-period.
fn apply_jump(theta: f64, weight: f64) -> f64 {
    let (k, r) = split_period(theta);
    if r == 0.0 {
        return theta;
    }
    let (y, dy) = r.sin_cos();
    k * PI + y.atan2(dy - weight * y)
}

fn sweep(pieces: &[Piece], theta0: f64, lambda: f64, cfg: &SolverConfig) -> f64 {
    let mut theta = theta0;
    for piece in pieces {
        theta = match *piece {
            Piece::Span { len, height } => match cfg.integrator {
                Integrator::Exact => advance_exact(theta, lambda + height, len),
                Integrator::Rk4 => {
                    advance_rk4(theta, lambda + height, len, cfg.ode_steps_per_cell)
                }
            },
            Piece::Jump { weight } => apply_jump(theta, weight),
        };
    }
    theta
}

/// Prüfer angle θ(1; λ), where `cot θ = y'/y` and θ(0) = arccot(k₀²).
pub fn theta_end(q: &Potential, bc: &RobinBC, lambda: f64, cfg: &SolverConfig) -> f64 {
    sweep(&pieces(q), bc.theta_start(), lambda, cfg)
}

/// Smallest eigenvalue by bracketing and bisection on θ(1; λ) = θ_target.
pub fn lambda1(q: &Potential, bc: &RobinBC, cfg: &SolverConfig) -> Result<EigenResult> {
    cfg.validate()?;
    let pieces = pieces(q);
    let theta0 = bc.theta_start();
    let target = bc.theta_target();
    let theta = |lambda: f64| sweep(&pieces, theta0, lambda, cfg);

    let mut lo = -1.0 - q.delta_mass() - q.step().max_height();
    let mut hi = 1.0 + PI * PI;
    let mut expansions = 0;
    while theta(lo) >= target {
        if expansions >= cfg.max_bracket_expansions {
            return Err(Error::BracketNotFound { expansions, lo, hi });
        }
        lo *= 2.0;
        expansions += 1;
    }
    while theta(hi) <= target {
        if expansions >= cfg.max_bracket_expansions {
            return Err(Error::BracketNotFound { expansions, lo, hi });
        }
        hi *= 2.0;
        expansions += 1;
    }

    let mut iterations = 0;
    loop {
        let mid = if lo < 0.0 && hi > 0.0 { 0.0 } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            break;
        }
        let th = theta(mid);
        iterations += 1;
        if th == target {
            lo = mid;
            hi = mid;
            break;
        }
        if th < target {
            lo = mid;
        } else {
            hi = mid;
        }
        let narrow = hi - lo <= cfg.lambda_tolerance * mid.abs().max(1.0);
        if narrow && (th - target).abs() <= cfg.theta_tolerance {
            break;
        }
    }
    let lambda = 0.5 * (lo + hi);
    Ok(EigenResult {
        lambda1: lambda,
        residual: (theta(lambda) - target).abs(),
        bracket: (lo, hi),
        iterations,
        eigenfunction_samples: None,
    })
}

/// [`lambda1`] plus the eigenfunction sampled on `n_intervals + 1` uniform
/// points merged with the breakpoints and delta sites of `q`.
pub fn lambda1_with_eigenfunction(
    q: &Potential,
    bc: &RobinBC,
    cfg: &SolverConfig,
    n_intervals: usize,
) -> Result<EigenResult> {
    let mut res = lambda1(q, bc, cfg)?;
    res.eigenfunction_samples = Some(eigenfunction(q, bc, res.lambda1, n_intervals)?);
    Ok(res)
}

/// Solution of the initial value problem at `x = 0` for the given λ,
/// sampled as `(x, y(x))` and scaled to `max |y| = 1`.
pub fn eigenfunction(
    q: &Potential,
    bc: &RobinBC,
    lambda: f64,
    n_intervals: usize,
) -> Result<Vec<(f64, f64)>> {
    if n_intervals < 1 {
        return Err(Error::InvalidArgument("need at least one sample interval".into()));
    }
    let mut grid: Vec<f64> = (0..=n_intervals)
        .map(|i| i as f64 / n_intervals as f64)
        .collect();
    grid[n_intervals] = 1.0;
    let grid = merge_breakpoints(&grid, q.step().breakpoints());
    let sites: Vec<f64> = q.deltas().iter().map(|d| d.site()).collect();
    let grid = merge_breakpoints(&grid, &sites);

    let (mut y, mut dy) = bc.theta_start().sin_cos();
    let mut log_scale = 0.0;
    let mut raw = Vec::with_capacity(grid.len());
    let mut next_delta = 0;
    for (i, &x) in grid.iter().enumerate() {
        raw.push((x, y, log_scale));
        while next_delta < q.deltas().len() && q.deltas()[next_delta].site() == x {
            dy -= q.deltas()[next_delta].weight() * y;
            next_delta += 1;
        }
        let Some(&x_next) = grid.get(i + 1) else {
            break;
        };
        let len = x_next - x;
        let mu = lambda + q.step().value_at(0.5 * (x + x_next));
        let (ny, ndy, growth) = transfer(y, dy, mu, len);
        y = ny;
        dy = ndy;
        log_scale += growth;
        let m = y.abs().max(dy.abs());
        if m > 1e100 || (m > 0.0 && m < 1e-100) {
            y /= m;
            dy /= m;
            log_scale += m.ln();
        }
    }

    let peak = raw
        .iter()
        .filter(|(_, v, _)| *v != 0.0)
        .map(|(_, v, s)| v.abs().ln() + s)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(raw
        .into_iter()
        .map(|(x, v, s)| {
            if v == 0.0 {
                (x, 0.0)
            } else {
                (x, v.signum() * (v.abs().ln() + s - peak).exp())
            }
        })
        .collect())
}

/// Propagates `(y, y')` across `len` with `y'' = -mu y`. The third
/// component is a log-factor that has been divided out of the result.
fn transfer(y: f64, dy: f64, mu: f64, len: f64) -> (f64, f64, f64) {
    if mu > 0.0 {
        let omega = mu.sqrt();
        let (s, c) = (omega * len).sin_cos();
        (c * y + s / omega * dy, -omega * s * y + c * dy, 0.0)
    } else if mu < 0.0 {
        let kappa = (-mu).sqrt();
        let arg = kappa * len;
        if arg < 300.0 {
            let (ch, sh) = (arg.cosh(), arg.sinh());
            (ch * y + sh / kappa * dy, kappa * sh * y + ch * dy, 0.0)
        } else {
            (y + dy / kappa, kappa * y + dy, arg - std::f64::consts::LN_2)
        }
    } else {
        (y + len * dy, dy, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::StepPotential;
    use approx::assert_relative_eq;

    fn neumann() -> RobinBC {
        RobinBC::neumann()
    }

    /// Fine RK4 on the scalar angle equation, sharing nothing with the
    /// closed-form path.
    fn reference_theta(theta0: f64, mu: f64, len: f64) -> f64 {
        let n = 200_000;
        let h = len / n as f64;
        let f = |t: f64| t.cos().powi(2) + mu * t.sin().powi(2);
        let mut th = theta0;
        for _ in 0..n {
            let k1 = f(th);
            let k2 = f(th + 0.5 * h * k1);
            let k3 = f(th + 0.5 * h * k2);
            let k4 = f(th + h * k3);
            th += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        th
    }

    #[test]
    fn stationary_at_half_pi() {
        let cfg = SolverConfig::default();
        let th = theta_end(&Potential::zero(), &neumann(), 0.0, &cfg);
        assert_relative_eq!(th, PI / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn second_neumann_value() {
        let cfg = SolverConfig::default();
        let th = theta_end(&Potential::zero(), &neumann(), PI * PI, &cfg);
        assert_relative_eq!(th, 1.5 * PI, max_relative = 1e-14);
        assert_relative_eq!(reference_theta(PI / 2.0, PI * PI, 1.0), 1.5 * PI, max_relative = 1e-10);
    }

    #[test]
    fn delta_jump_at_half() {
        // θ stays at π/2 up to x = ½, jumps to 3π/4, then follows θ' = cos²θ,
        // i.e. cot θ(x) = -1 / (1 - (x - ½)), so θ(1) = π - arccot(2).
        let q = Potential::delta(0.5, 1.0).unwrap();
        let cfg = SolverConfig::default();
        let th = theta_end(&q, &neumann(), 0.0, &cfg);
        assert_relative_eq!(th, PI - 0.5f64.atan(), max_relative = 1e-14);
        let half = Potential::new(StepPotential::zero(), vec![]).unwrap();
        assert_eq!(theta_end(&half, &neumann(), 0.0, &cfg), PI / 2.0);
        assert_relative_eq!(apply_jump(PI / 2.0, 1.0), 0.75 * PI, max_relative = 1e-15);
    }

    #[test]
    fn exact_matches_reference_integration() {
        for &(theta0, mu, len) in &[
            (0.3, 7.0, 0.8),
            (1.2, -5.0, 1.0),
            (2.9, -40.0, 0.3),
            (0.01, 0.0, 1.0),
            (2.0, 150.0, 0.5),
            (3.0, -0.5, 1.0),
        ] {
            let exact = advance_exact(theta0, mu, len);
            let reference = reference_theta(theta0, mu, len);
            assert!(
                (exact - reference).abs() < 1e-9,
                "theta0={theta0} mu={mu}: {exact} vs {reference}"
            );
        }
    }

    #[test]
    fn rk4_path_agrees_with_exact() {
        let q: Potential = StepPotential::new(vec![0.0, 0.3, 0.7, 1.0], vec![5.0, 0.0, 12.0])
            .unwrap()
            .into();
        let bc = RobinBC::new(1.0, 2.0).unwrap();
        let exact = lambda1(&q, &bc, &SolverConfig::default()).unwrap();
        let rk4_cfg = SolverConfig {
            ode_steps_per_cell: 400,
            integrator: Integrator::Rk4,
            ..SolverConfig::default()
        };
        let rk4 = lambda1(&q, &bc, &rk4_cfg).unwrap();
        assert!((exact.lambda1 - rk4.lambda1).abs() < 1e-8);
    }

    #[test]
    fn neumann_zero_potential() {
        let res = lambda1(&Potential::zero(), &neumann(), &SolverConfig::default()).unwrap();
        assert!(res.lambda1.abs() < 1e-12);
        assert!(res.bracket.0 <= res.lambda1 && res.lambda1 <= res.bracket.1);
        assert!(res.residual <= 1e-10);
    }

    #[test]
    fn constant_shift() {
        let cfg = SolverConfig::default();
        for bc in [neumann(), RobinBC::new(1.0, 1.0).unwrap(), RobinBC::new(3.0, 0.5).unwrap()] {
            let base = lambda1(&Potential::zero(), &bc, &cfg).unwrap().lambda1;
            for c in [0.5, 3.0, 40.0] {
                let q: Potential = StepPotential::constant(c).unwrap().into();
                let l = lambda1(&q, &bc, &cfg).unwrap().lambda1;
                assert!((l - (base - c)).abs() < 1e-9, "{l} vs {}", base - c);
            }
        }
    }

    #[test]
    fn bracket_exhaustion_is_reported() {
        let q = Potential::delta(0.5, 1e6).unwrap();
        let cfg = SolverConfig {
            max_bracket_expansions: 2,
            ..SolverConfig::default()
        };
        assert!(matches!(
            lambda1(&q, &neumann(), &cfg),
            Err(Error::BracketNotFound { .. })
        ));
    }

    #[test]
    fn eigenfunction_is_positive_and_satisfies_bc() {
        let q: Potential = StepPotential::new(vec![0.0, 0.4, 1.0], vec![3.0, 8.0]).unwrap().into();
        let bc = RobinBC::new(2.0, 0.5).unwrap();
        let res = lambda1_with_eigenfunction(&q, &bc, &SolverConfig::default(), 4000).unwrap();
        let s = res.eigenfunction_samples.unwrap();
        assert!(s.iter().all(|&(_, v)| v > 0.0));
        let peak = s.iter().map(|p| p.1).fold(0.0, f64::max);
        assert_relative_eq!(peak, 1.0, max_relative = 1e-12);
        let (x0, y0) = s[0];
        let (x1, y1) = s[1];
        let slope = (y1 - y0) / (x1 - x0);
        assert!((slope - 2.0 * y0).abs() < 1e-2);
    }
}
