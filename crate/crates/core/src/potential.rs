//! Potentials on [0, 1]: nonnegative step functions plus Dirac masses.
//!
//! Every integral over a [`StepPotential`] is a finite sum over its cells, so
//! norms and normalizations here carry no quadrature error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Checks that `breakpoints` starts at 0, ends at 1 and is strictly increasing.
pub(crate) fn validate_breakpoints(breakpoints: &[f64]) -> Result<()> {
    if breakpoints.len() < 2 {
        return Err(Error::InvalidPotential(
            "need at least two breakpoints".into(),
        ));
    }
    if breakpoints.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("breakpoint".into()));
    }
    if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
        return Err(Error::InvalidPotential(
            "breakpoints must start at 0 and end at 1".into(),
        ));
    }
    if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidPotential(
            "breakpoints must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Sorted union of two breakpoint sets, exact duplicates removed.
pub(crate) fn merge_breakpoints(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(&x), Some(&y)) if y < x => {
                j += 1;
                y
            }
            (Some(&x), Some(_)) => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        if out.last() != Some(&next) {
            out.push(next);
        }
    }
    out
}

/// Index of the cell containing `x`; cells are half-open `[x_{i-1}, x_i)`
/// except the last, which also contains 1.
pub(crate) fn cell_index(breakpoints: &[f64], x: f64) -> usize {
    let cells = breakpoints.len() - 1;
    let idx = breakpoints.partition_point(|&b| b <= x);
    idx.saturating_sub(1).min(cells - 1)
}

/// Values of a step function resampled onto a finer breakpoint set.
pub(crate) fn resample(breakpoints: &[f64], values: &[f64], fine: &[f64]) -> Vec<f64> {
    fine.windows(2)
        .map(|w| values[cell_index(breakpoints, 0.5 * (w[0] + w[1]))])
        .collect()
}

/// Piecewise-constant nonnegative function on [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStep")]
pub struct StepPotential {
    breakpoints: Vec<f64>,
    heights: Vec<f64>,
}

#[derive(Deserialize)]
struct RawStep {
    breakpoints: Vec<f64>,
    heights: Vec<f64>,
}

impl TryFrom<RawStep> for StepPotential {
    type Error = Error;

    fn try_from(raw: RawStep) -> Result<Self> {
        StepPotential::new(raw.breakpoints, raw.heights)
    }
}

impl StepPotential {
    pub fn new(breakpoints: Vec<f64>, heights: Vec<f64>) -> Result<Self> {
        validate_breakpoints(&breakpoints)?;
        if heights.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidPotential(format!(
                "{} breakpoints need {} heights, got {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                heights.len()
            )));
        }
        if heights.iter().any(|h| !h.is_finite()) {
            return Err(Error::NonFinite("height".into()));
        }
        if heights.iter().any(|&h| h < 0.0) {
            return Err(Error::InvalidPotential("heights must be >= 0".into()));
        }
        Ok(Self {
            breakpoints,
            heights,
        })
    }

    /// The constant function `c` on a single cell.
    pub fn constant(c: f64) -> Result<Self> {
        Self::new(vec![0.0, 1.0], vec![c])
    }

    /// The zero potential.
    pub fn zero() -> Self {
        Self {
            breakpoints: vec![0.0, 1.0],
            heights: vec![0.0],
        }
    }

    /// Heights on `heights.len()` cells of equal width.
    pub fn uniform(heights: Vec<f64>) -> Result<Self> {
        let k = heights.len();
        if k == 0 {
            return Err(Error::InvalidPotential("need at least one cell".into()));
        }
        let mut breakpoints: Vec<f64> = (0..=k).map(|i| i as f64 / k as f64).collect();
        breakpoints[k] = 1.0;
        Self::new(breakpoints, heights)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn num_cells(&self) -> usize {
        self.heights.len()
    }

    /// Iterator over `(left, right, height)` triples.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.heights)
            .map(|(w, &h)| (w[0], w[1], h))
    }

    pub fn value_at(&self, x: f64) -> f64 {
        self.heights[cell_index(&self.breakpoints, x)]
    }

    pub fn max_height(&self) -> f64 {
        self.heights.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_height(&self) -> f64 {
        self.heights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// ∫₀¹ q dx.
    pub fn integral(&self) -> f64 {
        self.cells().map(|(a, b, h)| h * (b - a)).sum()
    }

    /// Pointwise product with a nonnegative constant.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.breakpoints.clone(),
            self.heights.iter().map(|h| h * c).collect(),
        )
    }

    /// Restriction onto a finer breakpoint set that contains all of ours.
    pub fn refine_to(&self, fine: &[f64]) -> Result<Self> {
        Self::new(
            fine.to_vec(),
            resample(&self.breakpoints, &self.heights, fine),
        )
    }
}

/// A Dirac mass `weight * δ(x - site)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDelta")]
pub struct DeltaComponent {
    site: f64,
    weight: f64,
}

#[derive(Deserialize)]
struct RawDelta {
    site: f64,
    weight: f64,
}

impl TryFrom<RawDelta> for DeltaComponent {
    type Error = Error;

    fn try_from(raw: RawDelta) -> Result<Self> {
        DeltaComponent::new(raw.site, raw.weight)
    }
}

impl DeltaComponent {
    pub fn new(site: f64, weight: f64) -> Result<Self> {
        if !site.is_finite() || !weight.is_finite() {
            return Err(Error::NonFinite("delta component".into()));
        }
        if !(0.0..=1.0).contains(&site) {
            return Err(Error::InvalidPotential(format!(
                "delta site {site} outside [0, 1]"
            )));
        }
        if weight <= 0.0 {
            return Err(Error::InvalidPotential(format!(
                "delta weight {weight} must be > 0"
            )));
        }
        Ok(Self { site, weight })
    }

    pub fn site(&self) -> f64 {
        self.site
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

/// Generalized potential: a step part plus finitely many Dirac masses.
///
/// Deltas are kept sorted by site; deltas sharing a site are merged by
/// adding their weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPotential", into = "RawPotential")]
pub struct Potential {
    step: StepPotential,
    deltas: Vec<DeltaComponent>,
}

#[derive(Serialize, Deserialize)]
struct RawPotential {
    breakpoints: Vec<f64>,
    heights: Vec<f64>,
    #[serde(default)]
    deltas: Vec<DeltaComponent>,
}

impl TryFrom<RawPotential> for Potential {
    type Error = Error;

    fn try_from(raw: RawPotential) -> Result<Self> {
        Potential::new(StepPotential::new(raw.breakpoints, raw.heights)?, raw.deltas)
    }
}

impl From<Potential> for RawPotential {
    fn from(p: Potential) -> Self {
        RawPotential {
            breakpoints: p.step.breakpoints,
            heights: p.step.heights,
            deltas: p.deltas,
        }
    }
}

impl From<StepPotential> for Potential {
    fn from(step: StepPotential) -> Self {
        Potential {
            step,
            deltas: Vec::new(),
        }
    }
}

impl Potential {
    pub fn new(step: StepPotential, mut deltas: Vec<DeltaComponent>) -> Result<Self> {
        deltas.sort_by(|a, b| a.site.total_cmp(&b.site));
        let mut merged: Vec<DeltaComponent> = Vec::with_capacity(deltas.len());
        for d in deltas {
            match merged.last_mut() {
                Some(last) if last.site == d.site => last.weight += d.weight,
                _ => merged.push(d),
            }
        }
        Ok(Self {
            step,
            deltas: merged,
        })
    }

    pub fn zero() -> Self {
        StepPotential::zero().into()
    }

    /// `weight * δ_site` on top of the zero step function.
    pub fn delta(site: f64, weight: f64) -> Result<Self> {
        Self::new(StepPotential::zero(), vec![DeltaComponent::new(site, weight)?])
    }

    pub fn step(&self) -> &StepPotential {
        &self.step
    }

    pub fn deltas(&self) -> &[DeltaComponent] {
        &self.deltas
    }

    pub fn has_deltas(&self) -> bool {
        !self.deltas.is_empty()
    }

    /// Sum of delta weights.
    pub fn delta_mass(&self) -> f64 {
        self.deltas.iter().map(|d| d.weight).sum()
    }

    /// The step part, or a contract error when deltas are present.
    pub fn step_only(&self) -> Result<&StepPotential> {
        if self.has_deltas() {
            return Err(Error::InvalidArgument(
                "operation is defined for step potentials without delta components".into(),
            ));
        }
        Ok(&self.step)
    }
}

/// Exponent `p` of the norm family; `p = 0` selects the geometric mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormExponent(f64);

impl NormExponent {
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::NonFinite(format!("norm exponent {p}")));
        }
        Ok(Self(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Exponent γ ≠ 0 of the constraint ∫ q^γ = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaConstraint(f64);

impl GammaConstraint {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::NonFinite(format!("gamma {gamma}")));
        }
        if gamma == 0.0 {
            return Err(Error::InvalidArgument("gamma must be nonzero".into()));
        }
        Ok(Self(gamma))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn exponent(self) -> NormExponent {
        NormExponent(self.0)
    }
}

/// `(∫ |y|^p)^{1/p}`, or `exp(∫ ln|y|)` at `p = 0`.
///
/// Evaluated as `h_ref * exp(ln(1 + Σ expm1(p ln(h/h_ref)) Δx) / p)` with
/// `h_ref` the largest (p > 0) or smallest (p < 0) height, which keeps every
/// term bounded and stays accurate as `p → 0`.
pub fn pnorm(y: &StepPotential, p: NormExponent) -> Result<f64> {
    let p = p.value();
    if p <= 0.0 && y.heights.contains(&0.0) {
        return Err(Error::NonPositiveExponentOnVanishingFunction { p });
    }
    if p == 0.0 {
        let log_mean: f64 = y.cells().map(|(a, b, h)| h.ln() * (b - a)).sum();
        return Ok(log_mean.exp());
    }
    let reference = if p > 0.0 {
        y.max_height()
    } else {
        y.min_height()
    };
    if reference == 0.0 {
        return Ok(0.0);
    }
    // Σ Δx differs from 1 by rounding only; keep it so constants stay exact.
    let mut excess = -1.0;
    for (a, b, h) in y.cells() {
        let dx = b - a;
        excess += dx;
        excess += (p * (h / reference).ln()).exp_m1() * dx;
    }
    Ok(reference * (excess.ln_1p() / p).exp())
}

/// Rescales `f` into A_γ. Returns `(f / κ, κ)` with `κ = ‖f‖_γ`.
pub fn normalize_gamma(f: &StepPotential, gamma: GammaConstraint) -> Result<(StepPotential, f64)> {
    let kappa = match pnorm(f, gamma.exponent()) {
        Ok(k) => k,
        Err(Error::NonPositiveExponentOnVanishingFunction { .. }) => {
            return Err(Error::ZeroPotential)
        }
        Err(e) => return Err(e),
    };
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::ZeroPotential);
    }
    let q = StepPotential::new(
        f.breakpoints.clone(),
        f.heights.iter().map(|h| h / kappa).collect(),
    )?;
    Ok((q, kappa))
}

/// Adds `c` to every height. Fails when a height would become negative.
pub fn shift(q: &StepPotential, c: f64) -> Result<StepPotential> {
    if !c.is_finite() {
        return Err(Error::NonFinite(format!("shift {c}")));
    }
    let mut heights = Vec::with_capacity(q.heights.len());
    for &h in &q.heights {
        let v = h + c;
        if v < 0.0 {
            return Err(Error::NegativeResult {
                height: h,
                shift: c,
            });
        }
        heights.push(v);
    }
    StepPotential::new(q.breakpoints.clone(), heights)
}

/// Re-expresses both step functions on the union of their breakpoints.
pub fn refine_common(a: &StepPotential, b: &StepPotential) -> (StepPotential, StepPotential) {
    let fine = merge_breakpoints(&a.breakpoints, &b.breakpoints);
    let ra = StepPotential {
        heights: resample(&a.breakpoints, &a.heights, &fine),
        breakpoints: fine.clone(),
    };
    let rb = StepPotential {
        heights: resample(&b.breakpoints, &b.heights, &fine),
        breakpoints: fine,
    };
    (ra, rb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(v: f64) -> NormExponent {
        NormExponent::new(v).unwrap()
    }

    fn halves(a: f64, b: f64) -> StepPotential {
        StepPotential::new(vec![0.0, 0.5, 1.0], vec![a, b]).unwrap()
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(StepPotential::new(vec![0.0, 0.5], vec![1.0]).is_err());
        assert!(StepPotential::new(vec![0.0, 0.5, 0.5, 1.0], vec![1.0; 3]).is_err());
        assert!(StepPotential::new(vec![0.1, 1.0], vec![1.0]).is_err());
        assert!(StepPotential::new(vec![0.0, 1.0], vec![-1.0]).is_err());
        assert!(StepPotential::new(vec![0.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(StepPotential::new(vec![0.0, 1.0], vec![f64::NAN]).is_err());
    }

    #[test]
    fn constant_one_has_unit_norm_for_every_p() {
        let one = StepPotential::constant(1.0).unwrap();
        for v in [-3.0, -1.0, -1e-9, 0.0, 1e-9, 0.5, 1.0, 2.0, 7.5] {
            assert_relative_eq!(pnorm(&one, p(v)).unwrap(), 1.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn symmetric_geometric_mean() {
        let y = halves(2.0, 0.5);
        assert_relative_eq!(pnorm(&y, p(0.0)).unwrap(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn spike_half_norm() {
        let y = StepPotential::new(vec![0.0, 0.25, 1.0], vec![4.0, 0.0]).unwrap();
        assert_relative_eq!(pnorm(&y, p(0.5)).unwrap(), 0.25, max_relative = 1e-14);
    }

    #[test]
    fn zero_height_rejected_for_nonpositive_p() {
        let y = halves(1.0, 0.0);
        for v in [0.0, -0.5] {
            assert!(matches!(
                pnorm(&y, p(v)),
                Err(Error::NonPositiveExponentOnVanishingFunction { .. })
            ));
        }
        assert!(pnorm(&y, p(0.5)).is_ok());
        assert_eq!(pnorm(&StepPotential::zero(), p(2.0)).unwrap(), 0.0);
    }

    #[test]
    fn normalize_constant() {
        let (q, kappa) =
            normalize_gamma(&StepPotential::constant(4.0).unwrap(), GammaConstraint::new(0.5).unwrap())
                .unwrap();
        assert_relative_eq!(kappa, 4.0, max_relative = 1e-15);
        assert_relative_eq!(q.heights()[0], 1.0, max_relative = 1e-15);
        for (c, g) in [(0.3, -2.0), (17.0, 3.0), (2.5, 0.1)] {
            let (q, kappa) = normalize_gamma(
                &StepPotential::constant(c).unwrap(),
                GammaConstraint::new(g).unwrap(),
            )
            .unwrap();
            assert_relative_eq!(kappa, c, max_relative = 1e-14);
            assert_relative_eq!(q.heights()[0], 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn normalize_two_cells_gamma_two() {
        let f = halves(3.0, 1.0);
        let (q, kappa) = normalize_gamma(&f, GammaConstraint::new(2.0).unwrap()).unwrap();
        // independent recheck: ∫f² = 9/2 + 1/2
        let expected = (9.0f64 / 2.0 + 1.0 / 2.0).sqrt();
        assert_relative_eq!(kappa, expected, max_relative = 1e-15);
        assert_relative_eq!(q.heights()[0], 3.0 / 5f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(q.heights()[1], 1.0 / 5f64.sqrt(), max_relative = 1e-15);
        let square_integral: f64 = q.cells().map(|(a, b, h)| h * h * (b - a)).sum();
        assert_relative_eq!(square_integral, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn normalize_errors() {
        let g = GammaConstraint::new(2.0).unwrap();
        assert_eq!(normalize_gamma(&StepPotential::zero(), g), Err(Error::ZeroPotential));
        let neg = GammaConstraint::new(-1.0).unwrap();
        assert_eq!(normalize_gamma(&halves(1.0, 0.0), neg), Err(Error::ZeroPotential));
        assert!(GammaConstraint::new(0.0).is_err());
    }

    #[test]
    fn shift_cases() {
        assert_eq!(shift(&StepPotential::zero(), 5.0).unwrap().heights(), &[5.0]);
        assert_eq!(shift(&halves(1.0, 2.0), -1.0).unwrap().heights(), &[0.0, 1.0]);
        assert!(matches!(
            shift(&halves(1.0, 2.0), -1.5),
            Err(Error::NegativeResult { .. })
        ));
    }

    #[test]
    fn refine_cases() {
        let a = StepPotential::constant(2.0).unwrap();
        let b = halves(1.0, 3.0);
        let (ra, rb) = refine_common(&a, &b);
        assert_eq!(ra.breakpoints(), &[0.0, 0.5, 1.0]);
        assert_eq!(ra.heights(), &[2.0, 2.0]);
        assert_eq!(rb, b);

        let (rb2, rb3) = refine_common(&b, &b);
        assert_eq!(rb2, b);
        assert_eq!(rb3, b);

        let third = StepPotential::new(vec![0.0, 1.0 / 3.0, 1.0], vec![1.0, 2.0]).unwrap();
        let (r1, r2) = refine_common(&third, &b);
        assert_eq!(r1.breakpoints(), &[0.0, 1.0 / 3.0, 0.5, 1.0]);
        assert_eq!(r1.heights(), &[1.0, 2.0, 2.0]);
        assert_eq!(r2.heights(), &[1.0, 1.0, 3.0]);
    }

    #[test]
    fn deltas_merge_and_sort() {
        let d = Potential::new(
            StepPotential::zero(),
            vec![
                DeltaComponent::new(0.7, 1.0).unwrap(),
                DeltaComponent::new(0.2, 0.5).unwrap(),
                DeltaComponent::new(0.7, 2.0).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(d.deltas().len(), 2);
        assert_eq!(d.deltas()[0].site(), 0.2);
        assert_eq!(d.deltas()[1].weight(), 3.0);
        assert!(DeltaComponent::new(1.5, 1.0).is_err());
        assert!(DeltaComponent::new(0.5, 0.0).is_err());
        assert!(d.step_only().is_err());
    }

    #[test]
    fn json_shape() {
        let q: Potential =
            serde_json::from_str(r#"{"breakpoints":[0,1],"heights":[0]}"#).unwrap();
        assert_eq!(q, Potential::zero());
        let text = serde_json::to_string(&Potential::delta(0.5, 1.0).unwrap()).unwrap();
        assert_eq!(
            text,
            r#"{"breakpoints":[0.0,1.0],"heights":[0.0],"deltas":[{"site":0.5,"weight":1.0}]}"#
        );
        assert!(serde_json::from_str::<Potential>(r#"{"breakpoints":[0,1],"heights":[-1]}"#).is_err());
    }
}
