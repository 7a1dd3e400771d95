//! W₂¹ norms of sampled functions and W₂⁻¹ norms of signed step + delta
//! measures.
//!
//! The dual norm is computed in the P1 space of a uniform grid: the Riesz
//! representer `u` solves `∫u'v' + ∫uv = ⟨f, v⟩` for every hat function `v`
//! and the discrete norm is `sqrt(⟨f, u⟩)`. Refining the grid enlarges the
//! test space, so the value increases toward the continuous norm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{merge_breakpoints, resample, validate_breakpoints, Potential};
use crate::tridiag::solve_symmetric;

/// A signed point mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedDelta {
    pub site: f64,
    pub weight: f64,
}

/// Signed step function plus signed Dirac masses on [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct SignedMeasure {
    breakpoints: Vec<f64>,
    heights: Vec<f64>,
    deltas: Vec<SignedDelta>,
}

#[derive(Serialize, Deserialize)]
struct RawMeasure {
    breakpoints: Vec<f64>,
    heights: Vec<f64>,
    #[serde(default)]
    deltas: Vec<SignedDelta>,
}

impl TryFrom<RawMeasure> for SignedMeasure {
    type Error = Error;

    fn try_from(raw: RawMeasure) -> Result<Self> {
        SignedMeasure::new(raw.breakpoints, raw.heights, raw.deltas)
    }
}

impl From<SignedMeasure> for RawMeasure {
    fn from(m: SignedMeasure) -> Self {
        RawMeasure {
            breakpoints: m.breakpoints,
            heights: m.heights,
            deltas: m.deltas,
        }
    }
}

impl From<&Potential> for SignedMeasure {
    fn from(q: &Potential) -> Self {
        SignedMeasure {
            breakpoints: q.step().breakpoints().to_vec(),
            heights: q.step().heights().to_vec(),
            deltas: q
                .deltas()
                .iter()
                .map(|d| SignedDelta {
                    site: d.site(),
                    weight: d.weight(),
                })
                .collect(),
        }
    }
}

impl From<Potential> for SignedMeasure {
    fn from(q: Potential) -> Self {
        SignedMeasure::from(&q)
    }
}

impl SignedMeasure {
    pub fn new(breakpoints: Vec<f64>, heights: Vec<f64>, deltas: Vec<SignedDelta>) -> Result<Self> {
        validate_breakpoints(&breakpoints)?;
        if heights.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidPotential(
                "heights must have one entry per cell".into(),
            ));
        }
        if heights.iter().any(|h| !h.is_finite()) {
            return Err(Error::NonFinite("height".into()));
        }
        for d in &deltas {
            if !d.site.is_finite() || !d.weight.is_finite() {
                return Err(Error::NonFinite("delta".into()));
            }
            if !(0.0..=1.0).contains(&d.site) {
                return Err(Error::InvalidPotential(format!(
                    "delta site {} outside [0, 1]",
                    d.site
                )));
            }
        }
        let mut m = SignedMeasure {
            breakpoints,
            heights,
            deltas,
        };
        m.merge_deltas();
        Ok(m)
    }

    pub fn zero() -> Self {
        SignedMeasure {
            breakpoints: vec![0.0, 1.0],
            heights: vec![0.0],
            deltas: Vec::new(),
        }
    }

    /// `weight * δ_site`.
    pub fn delta(site: f64, weight: f64) -> Result<Self> {
        Self::new(vec![0.0, 1.0], vec![0.0], vec![SignedDelta { site, weight }])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn deltas(&self) -> &[SignedDelta] {
        &self.deltas
    }

    fn merge_deltas(&mut self) {
        self.deltas.sort_by(|a, b| a.site.total_cmp(&b.site));
        let mut merged: Vec<SignedDelta> = Vec::with_capacity(self.deltas.len());
        for d in self.deltas.drain(..) {
            match merged.last_mut() {
                Some(last) if last.site == d.site => last.weight += d.weight,
                _ => merged.push(d),
            }
        }
        self.deltas = merged;
    }

    pub fn scaled(&self, c: f64) -> Self {
        SignedMeasure {
            breakpoints: self.breakpoints.clone(),
            heights: self.heights.iter().map(|h| h * c).collect(),
            deltas: self
                .deltas
                .iter()
                .map(|d| SignedDelta {
                    site: d.site,
                    weight: d.weight * c,
                })
                .collect(),
        }
    }

    /// `self + c * other` on the merged breakpoint set.
    pub fn add_scaled(&self, other: &Self, c: f64) -> Self {
        let fine = merge_breakpoints(&self.breakpoints, &other.breakpoints);
        let a = resample(&self.breakpoints, &self.heights, &fine);
        let b = resample(&other.breakpoints, &other.heights, &fine);
        let heights = a.iter().zip(&b).map(|(x, y)| x + c * y).collect();
        let mut deltas = self.deltas.clone();
        deltas.extend(other.deltas.iter().map(|d| SignedDelta {
            site: d.site,
            weight: c * d.weight,
        }));
        let mut m = SignedMeasure {
            breakpoints: fine,
            heights,
            deltas,
        };
        m.merge_deltas();
        m
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(other, -1.0)
    }

    fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.heights)
            .map(|(w, &h)| (w[0], w[1], h))
    }
}

/// Nodal values of a continuous piecewise-linear function on a uniform grid
/// of `N = values.len() - 1` intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::InvalidArgument(
                "need at least two grid intervals".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("sample value".into()));
        }
        Ok(Self { values })
    }

    /// Samples `f` at `i / n`, `i = 0..=n`.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..=n).map(|i| f(i as f64 / n as f64)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn node(&self, i: usize) -> f64 {
        let n = self.intervals();
        if i == n {
            1.0
        } else {
            i as f64 / n as f64
        }
    }

    /// Linear interpolation.
    pub fn value_at(&self, x: f64) -> f64 {
        let n = self.intervals();
        let e = ((x * n as f64).floor() as usize).min(n - 1);
        let (xl, xr) = (self.node(e), self.node(e + 1));
        let s = (x - xl) / (xr - xl);
        self.values[e] * (1.0 - s) + self.values[e + 1] * s
    }
}

/// `sqrt(∫z'² + ∫z²)` of the piecewise-linear interpolant.
pub fn w1_norm(z: &SampledFunction) -> f64 {
    let h = 1.0 / z.intervals() as f64;
    let sum: f64 = z
        .values
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            (b - a).powi(2) / h + h * (a * a + a * b + b * b) / 3.0
        })
        .sum();
    sum.sqrt()
}

/// Calls `visit(element, left, right, height)` for every overlap of a step
/// cell with an element of the uniform grid with `n` intervals.
fn for_each_overlap(m: &SignedMeasure, n: usize, mut visit: impl FnMut(usize, f64, f64, f64)) {
    let h = 1.0 / n as f64;
    let node = |i: usize| if i == n { 1.0 } else { i as f64 * h };
    for (a, b, height) in m.cells() {
        if height == 0.0 {
            continue;
        }
        let first = ((a / h).floor() as usize).min(n - 1);
        let last = ((b / h).ceil() as usize).clamp(first + 1, n);
        for e in first..last {
            let (c, d) = (a.max(node(e)), b.min(node(e + 1)));
            if d > c {
                visit(e, c, d, height);
            }
        }
    }
}

/// `⟨f, z⟩ = ∫ f_step z + Σ wᵢ z(ζᵢ)`, exact for piecewise-linear `z`.
pub fn pairing(f: &SignedMeasure, z: &SampledFunction) -> f64 {
    let mut total = 0.0;
    for_each_overlap(f, z.intervals(), |_, c, d, height| {
        total += height * (d - c) * 0.5 * (z.value_at(c) + z.value_at(d));
    });
    total + f.deltas.iter().map(|d| d.weight * z.value_at(d.site)).sum::<f64>()
}

/// Load vector `bᵢ = ⟨f, φᵢ⟩` against the hat functions of an `n`-interval
/// grid.
fn load_vector(f: &SignedMeasure, n: usize) -> Vec<f64> {
    let h = 1.0 / n as f64;
    let mut load = vec![0.0; n + 1];
    for_each_overlap(f, n, |e, c, d, height| {
        let xl = e as f64 * h;
        let right_c = ((c - xl) / h).clamp(0.0, 1.0);
        let right_d = ((d - xl) / h).clamp(0.0, 1.0);
        let len = d - c;
        load[e] += height * len * (2.0 - right_c - right_d) * 0.5;
        load[e + 1] += height * len * (right_c + right_d) * 0.5;
    });
    for d in &f.deltas {
        let e = ((d.site * n as f64).floor() as usize).min(n - 1);
        let s = ((d.site - e as f64 * h) / h).clamp(0.0, 1.0);
        load[e] += d.weight * (1.0 - s);
        load[e + 1] += d.weight * s;
    }
    load
}

/// Discrete W₂⁻¹ norm on a uniform grid of `grid_n` intervals.
pub fn wminus1_norm(f: &SignedMeasure, grid_n: usize) -> Result<f64> {
    Ok(riesz_representer(f, grid_n)?.1)
}

/// Riesz representer nodal values and the resulting norm.
pub fn riesz_representer(f: &SignedMeasure, grid_n: usize) -> Result<(SampledFunction, f64)> {
    if grid_n < 64 {
        return Err(Error::InvalidArgument(format!(
            "grid_n must be >= 64, got {grid_n}"
        )));
    }
    let h = 1.0 / grid_n as f64;
    let load = load_vector(f, grid_n);
    if load.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("measure".into()));
    }
    let mut diag = vec![2.0 / h + 2.0 * h / 3.0; grid_n + 1];
    diag[0] = 1.0 / h + h / 3.0;
    diag[grid_n] = diag[0];
    let off = vec![-1.0 / h + h / 6.0; grid_n];
    let u = solve_symmetric(&diag, &off, &load)
        .ok_or_else(|| Error::NonFinite("Riesz system".into()))?;
    let energy: f64 = load.iter().zip(&u).map(|(b, x)| b * x).sum();
    Ok((SampledFunction { values: u }, energy.max(0.0).sqrt()))
}

/// `wminus1_norm(f - g, grid_n)`.
pub fn wminus1_dist(f: &SignedMeasure, g: &SignedMeasure, grid_n: usize) -> Result<f64> {
    wminus1_norm(&f.sub(g), grid_n)
}
