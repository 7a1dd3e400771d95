use super::RobinBC;
use crate::error::{Error, Result};
use crate::potential::Potential;

fn quadratic_mean(len: f64, ya: f64, yb: f64) -> f64 {
    len * (ya * ya + ya * yb + yb * yb) / 3.0
}

/// Rayleigh quotient of the piecewise-linear interpolant of `samples`.
///
/// All integrals are exact for the interpolant, so the value is the quotient
/// of an admissible trial function and bounds λ₁(q) from above.
pub fn rayleigh(q: &Potential, bc: &RobinBC, samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    if samples.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::NonFinite("sample".into()));
    }
    if samples[0].0 != 0.0 || samples[samples.len() - 1].0 != 1.0 {
        return Err(Error::InvalidArgument("samples must cover [0, 1]".into()));
    }
    if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::InvalidArgument(
            "sample abscissae must be strictly increasing".into(),
        ));
    }

    let interp = |x: f64| {
        let i = samples.partition_point(|s| s.0 <= x).clamp(1, samples.len() - 1);
        let (xa, ya) = samples[i - 1];
        let (xb, yb) = samples[i];
        ya + (yb - ya) * (x - xa) / (xb - xa)
    };

    let mut gradient = 0.0;
    let mut mass = 0.0;
    for w in samples.windows(2) {
        let ((xa, ya), (xb, yb)) = (w[0], w[1]);
        let len = xb - xa;
        gradient += (yb - ya).powi(2) / len;
        mass += quadratic_mean(len, ya, yb);
    }
    if mass == 0.0 {
        return Err(Error::ZeroFunction);
    }

    let mut potential = 0.0;
    for (a, b, height) in q.step().cells() {
        if height == 0.0 {
            continue;
        }
        let start = samples.partition_point(|s| s.0 <= a);
        let mut cuts = vec![a];
        cuts.extend(samples[start..].iter().map(|s| s.0).take_while(|&x| x < b));
        cuts.push(b);
        for c in cuts.windows(2) {
            potential += height * quadratic_mean(c[1] - c[0], interp(c[0]), interp(c[1]));
        }
    }
    let point_masses: f64 = q
        .deltas()
        .iter()
        .map(|d| d.weight() * interp(d.site()).powi(2))
        .sum();

    let y0 = samples[0].1;
    let y1 = samples[samples.len() - 1].1;
    let boundary = bc.k0sq() * y0 * y0 + bc.k1sq() * y1 * y1;
    Ok((gradient + boundary - potential - point_masses) / mass)
}
