//! Explicit potential sequences and the experiments built on them.
//!
//! * [`statement1_family`]: unit-mass spikes `n · 1_{(ζ−1/n)⁺ + (0, 1/n)}`,
//!   whose γ-norm `n^{(γ−1)/γ}` vanishes for γ ∈ (0, 1) while they converge
//!   to `δ_ζ` in W₂⁻¹.
//! * [`statement2_family`]: a floor plus a train of tall spikes, normalized
//!   into A_γ, approximating a constant level ρ* from below after scaling.
//! * [`statement3_family`]: `n^{1/γ} · 1_{(0, 1/n)}`, members of A_γ for
//!   γ > 1 whose mass `n^{1/γ−1}` vanishes.
//!
//! [`verify_thm1`] and [`verify_thm2`] evaluate λ₁ along these sequences.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{lambda1, lambda1_zero, RobinBC, SolverConfig};
use crate::error::{Error, Result};
use crate::potential::{normalize_gamma, pnorm, GammaConstraint, NormExponent, StepPotential};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpikeFamilySpec {
    pub zeta: f64,
    pub n: u64,
}

impl SpikeFamilySpec {
    pub fn new(zeta: f64, n: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&zeta) {
            return Err(Error::InvalidArgument(format!("zeta {zeta} outside [0, 1]")));
        }
        if n < 2 {
            return Err(Error::InvalidArgument(format!("n must be >= 2, got {n}")));
        }
        Ok(Self { zeta, n })
    }

    /// Support `((ζ − 1/n)⁺, (ζ − 1/n)⁺ + 1/n)`.
    pub fn support(&self) -> (f64, f64) {
        let width = 1.0 / self.n as f64;
        let start = self.zeta - width;
        if start > 0.0 {
            (start, self.zeta)
        } else {
            (0.0, width)
        }
    }
}

/// Step function equal to `height` on `(a, b)` and zero elsewhere.
pub fn box_potential(a: f64, b: f64, height: f64) -> Result<StepPotential> {
    let mut breakpoints = vec![0.0];
    let mut heights = Vec::new();
    if a > 0.0 {
        breakpoints.push(a);
        heights.push(0.0);
    }
    heights.push(height);
    if b < 1.0 {
        breakpoints.push(b);
        heights.push(0.0);
    }
    breakpoints.push(1.0);
    StepPotential::new(breakpoints, heights)
}

/// Height-`n` spike of width `1/n` ending at ζ (clipped into [0, 1]), with its
/// γ-norm `n^{(γ−1)/γ}`.
pub fn statement1_family(spec: &SpikeFamilySpec, gamma: f64) -> Result<(StepPotential, f64)> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )));
    }
    let (a, b) = spec.support();
    let n = spec.n as f64;
    let q = box_potential(a, b, n)?;
    Ok((q, n.powf((gamma - 1.0) / gamma)))
}

/// Height `n^{1/γ}` on `(0, 1/n)`; `∫ q^γ = 1` and `∫ q = n^{1/γ − 1}`.
pub fn statement3_family(gamma: f64, n: u64) -> Result<StepPotential> {
    if !(gamma > 1.0) || !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!("gamma must be > 1, got {gamma}")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    let n = n as f64;
    box_potential(0.0, 1.0 / n, n.powf(1.0 / gamma))
}

/// Parameters of `f = r + ψ`, where ψ is `m` equal spikes of height `h`
/// carrying mass `(ρ* − r)/m` each, centred at `(j − ½)/m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpikeTrainSpec {
    pub target_level: f64,
    pub floor: f64,
    pub spike_count: usize,
    pub spike_height: f64,
    pub nu: f64,
}

impl SpikeTrainSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.target_level > 0.0) || !self.target_level.is_finite() {
            return bad(format!("target level must be > 0, got {}", self.target_level));
        }
        if !(self.floor > 0.0 && self.floor < 1.0) {
            return bad(format!("floor must lie in (0, 1), got {}", self.floor));
        }
        if self.floor >= self.target_level {
            return bad("floor must be below the target level".into());
        }
        if self.spike_count == 0 {
            return bad("spike_count must be >= 1".into());
        }
        if !(self.spike_height > 0.0) || !self.spike_height.is_finite() {
            return bad(format!("spike height must be > 0, got {}", self.spike_height));
        }
        if self.spike_width() > 1.0 / self.spike_count as f64 {
            return bad("spikes overlap: raise spike_height".into());
        }
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return bad(format!("nu must lie in (0, 1), got {}", self.nu));
        }
        Ok(())
    }

    pub fn spike_width(&self) -> f64 {
        (self.target_level - self.floor) / (self.spike_count as f64 * self.spike_height)
    }

    /// `‖f‖_ν` from the closed form `(m w (h + r)^ν + (1 − m w) r^ν)^{1/ν}`.
    pub fn nu_norm_closed_form(&self) -> f64 {
        let covered = self.spike_count as f64 * self.spike_width();
        let r = self.floor;
        let sum = covered * (self.spike_height + r).powf(self.nu) + (1.0 - covered) * r.powf(self.nu);
        sum.powf(1.0 / self.nu)
    }

    /// Spike height at which the closed-form ν-norm drops to about 0.9.
    pub fn suggested_height(&self) -> f64 {
        let budget = 0.9f64.powf(self.nu) - self.floor.powf(self.nu);
        let mass = self.target_level - self.floor;
        if budget <= 0.0 {
            return f64::INFINITY;
        }
        (mass / budget).powf(1.0 / (1.0 - self.nu)).max(self.spike_height * 2.0)
    }

    /// The unnormalized potential `f = r + ψ`.
    pub fn build(&self) -> Result<StepPotential> {
        self.validate()?;
        let m = self.spike_count;
        let half = 0.5 * self.spike_width();
        let mut breakpoints = Vec::with_capacity(2 * m + 2);
        breakpoints.push(0.0);
        for j in 0..m {
            let centre = (j as f64 + 0.5) / m as f64;
            breakpoints.push((centre - half).max(0.0));
            breakpoints.push((centre + half).min(1.0));
        }
        breakpoints.push(1.0);
        breakpoints.dedup();
        let heights = breakpoints
            .windows(2)
            .map(|w| {
                let x = 0.5 * (w[0] + w[1]);
                let j = ((x * m as f64).floor() as usize).min(m - 1);
                let centre = (j as f64 + 0.5) / m as f64;
                if (x - centre).abs() < half {
                    self.spike_height + self.floor
                } else {
                    self.floor
                }
            })
            .collect();
        StepPotential::new(breakpoints, heights)
    }
}

/// Output of [`statement2_family`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikeTrainMember {
    /// `f / κ`, a member of A_γ.
    pub q: StepPotential,
    /// `κ = ‖f‖_γ ∈ (0, 1)`.
    pub kappa: f64,
    pub f: StepPotential,
    pub nu_norm: f64,
}

/// Normalizes the spike train `f` into A_γ, returning `q = f/‖f‖_γ` and
/// `κ = ‖f‖_γ`. Requires `‖f‖_ν < 1`, which forces `κ < 1`.
pub fn statement2_family(spec: &SpikeTrainSpec, gamma: f64) -> Result<SpikeTrainMember> {
    let g = GammaConstraint::new(gamma)?;
    if !(gamma < 1.0) {
        return Err(Error::InvalidArgument(format!("gamma must be < 1, got {gamma}")));
    }
    if !(spec.nu > gamma.max(0.0) && spec.nu < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "nu must lie in ({}, 1), got {}",
            gamma.max(0.0),
            spec.nu
        )));
    }
    let f = spec.build()?;
    let nu_norm = pnorm(&f, NormExponent::new(spec.nu)?)?;
    if nu_norm >= 1.0 {
        return Err(Error::NormBudgetExceeded {
            norm: nu_norm,
            suggested_height: spec.suggested_height(),
        });
    }
    let (q, kappa) = normalize_gamma(&f, g)?;
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::NormBudgetExceeded {
            norm: kappa,
            suggested_height: spec.suggested_height(),
        });
    }
    Ok(SpikeTrainMember {
        q,
        kappa,
        f,
        nu_norm,
    })
}

/// One row of a convergence or unboundedness table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n_or_rho: f64,
    pub lambda1: f64,
    pub reference: f64,
    pub gap: f64,
}

pub const TABLE_HEADER: &str = "n_or_rho,lambda1,reference,gap";

/// CSV with a header row; every value printed with 17 significant digits.
pub fn rows_to_csv(rows: &[TableRow]) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            r.n_or_rho, r.lambda1, r.reference, r.gap
        );
    }
    out
}

/// λ₁ along [`statement3_family`]; `reference` is λ₁(0) and `gap` is
/// `λ₁(0) − λ₁(q_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub gamma: f64,
    pub bc: RobinBC,
    pub rows: Vec<TableRow>,
    /// Every `λ₁(q_n) ≤ λ₁(0) + tolerance`.
    pub below_ceiling: bool,
    /// Gaps never increase by more than the tolerance.
    pub gap_nonincreasing: bool,
    pub tolerance: f64,
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        rows_to_csv(&self.rows)
    }
}

/// Absolute slack allowed for solver error in the monotonicity checks.
fn solver_slack(cfg: &SolverConfig, scale: f64) -> f64 {
    1e-8 + 100.0 * cfg.lambda_tolerance * scale.abs().max(1.0)
}

pub fn verify_thm2(
    gamma: f64,
    bc: &RobinBC,
    n_list: &[u64],
    cfg: &SolverConfig,
) -> Result<ConvergenceTable> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("n_list is empty".into()));
    }
    let reference = lambda1_zero(bc);
    let rows = n_list
        .par_iter()
        .map(|&n| {
            let q = statement3_family(gamma, n)?;
            let l = lambda1(&q.into(), bc, cfg)?.lambda1;
            Ok(TableRow {
                n_or_rho: n as f64,
                lambda1: l,
                reference,
                gap: reference - l,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let tolerance = solver_slack(cfg, reference);
    let below_ceiling = rows.iter().all(|r| r.lambda1 <= reference + tolerance);
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| a.n_or_rho.total_cmp(&b.n_or_rho));
    let gap_nonincreasing = sorted.windows(2).all(|w| w[1].gap <= w[0].gap + tolerance);
    Ok(ConvergenceTable {
        gamma,
        bc: *bc,
        rows,
        below_ceiling,
        gap_nonincreasing,
        tolerance,
    })
}

/// How [`verify_thm1`] shapes the spike train for each target level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainTuning {
    pub floor: f64,
    /// Spike count is `max(min_spikes, ceil(spikes_per_sqrt_rho · √ρ*))`.
    pub spikes_per_sqrt_rho: f64,
    pub min_spikes: usize,
    /// ν; `None` picks `γ⁺ + (1 − γ⁺)/10`.
    pub nu: Option<f64>,
    /// Height doublings tried before giving up.
    pub max_height_doublings: usize,
}

impl Default for TrainTuning {
    fn default() -> Self {
        Self {
            floor: 0.1,
            spikes_per_sqrt_rho: 10.0,
            min_spikes: 16,
            nu: None,
            max_height_doublings: 60,
        }
    }
}

impl TrainTuning {
    /// A spike-train spec for level `rho` whose ν-norm is below 1.
    pub fn spec_for(&self, gamma: f64, rho: f64) -> Result<SpikeTrainSpec> {
        let positive = gamma.max(0.0);
        let nu = self.nu.unwrap_or(positive + 0.1 * (1.0 - positive));
        let spike_count = self
            .min_spikes
            .max((self.spikes_per_sqrt_rho * rho.sqrt()).ceil() as usize);
        let mut spec = SpikeTrainSpec {
            target_level: rho,
            floor: self.floor,
            spike_count,
            spike_height: 1.0,
            nu,
        };
        spec.spike_height = spec
            .suggested_height()
            .max((rho - self.floor) + 1.0);
        for _ in 0..=self.max_height_doublings {
            if spec.validate().is_ok() && spec.nu_norm_closed_form() < 1.0 {
                return Ok(spec);
            }
            spec.spike_height *= 2.0;
        }
        Err(Error::NormBudgetExceeded {
            norm: spec.nu_norm_closed_form(),
            suggested_height: spec.suggested_height(),
        })
    }
}

/// Evidence that a member of A_γ has λ₁ below the requested level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub rho: f64,
    pub lambda1: f64,
    /// `‖q‖_γ`, recomputed from the returned potential.
    pub gamma_norm: f64,
    pub kappa: f64,
    pub spike_count: usize,
    pub spike_height: f64,
    pub nu: f64,
    /// `λ₁(0) − ρ* + slack`; λ₁ must not exceed it.
    pub bound: f64,
    pub certified: bool,
}

/// λ₁ of spike-train members of A_γ for increasing target levels ρ*;
/// `reference` is `λ₁(0) − ρ*` and `gap` is `reference − λ₁(q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnboundednessTable {
    pub gamma: f64,
    pub bc: RobinBC,
    pub rows: Vec<TableRow>,
    pub certificates: Vec<Certificate>,
    pub all_certified: bool,
    pub strictly_decreasing: bool,
}

impl UnboundednessTable {
    pub fn to_csv(&self) -> String {
        rows_to_csv(&self.rows)
    }
}

/// Runs the spike-train construction for each ρ* in `rho_list`.
///
/// Since `q ≥ f` pointwise and the constant trial function gives
/// `λ₁(f) ≤ k₀² + k₁² − ∫f = k₀² + k₁² − ρ*`, every member satisfies
/// `λ₁(q) ≤ λ₁(0) − ρ* + (k₀² + k₁² − λ₁(0))`; that last term plus solver
/// tolerance is the slack used in the certificate.
pub fn verify_thm1(
    gamma: f64,
    bc: &RobinBC,
    rho_list: &[f64],
    cfg: &SolverConfig,
    tuning: &TrainTuning,
) -> Result<UnboundednessTable> {
    GammaConstraint::new(gamma)?;
    if !(gamma < 1.0) {
        return Err(Error::InvalidArgument(format!("gamma must be < 1, got {gamma}")));
    }
    if rho_list.is_empty() {
        return Err(Error::InvalidArgument("rho_list is empty".into()));
    }
    if rho_list.iter().any(|&r| !(r > 1.0) || !r.is_finite()) {
        return Err(Error::InvalidArgument("every rho must be > 1".into()));
    }
    if rho_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("rho_list must be increasing".into()));
    }
    let base = lambda1_zero(bc);
    let trial_gap = bc.k0sq() + bc.k1sq() - base;
    let results = rho_list
        .par_iter()
        .map(|&rho| {
            let spec = tuning.spec_for(gamma, rho)?;
            let member = statement2_family(&spec, gamma)?;
            let l = lambda1(&member.q.clone().into(), bc, cfg)?.lambda1;
            let gamma_norm = pnorm(&member.q, NormExponent::new(gamma)?)?;
            let reference = base - rho;
            let bound = reference + trial_gap + solver_slack(cfg, l);
            let certified = l <= bound && (gamma_norm - 1.0).abs() <= 1e-10;
            let row = TableRow {
                n_or_rho: rho,
                lambda1: l,
                reference,
                gap: reference - l,
            };
            let cert = Certificate {
                rho,
                lambda1: l,
                gamma_norm,
                kappa: member.kappa,
                spike_count: spec.spike_count,
                spike_height: spec.spike_height,
                nu: spec.nu,
                bound,
                certified,
            };
            Ok((row, cert))
        })
        .collect::<Result<Vec<_>>>()?;
    let (rows, certificates): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let all_certified = certificates.iter().all(|c| c.certified);
    let strictly_decreasing = rows.windows(2).all(|w| w[1].lambda1 < w[0].lambda1);
    Ok(UnboundednessTable {
        gamma,
        bc: *bc,
        rows,
        certificates,
        all_certified,
        strictly_decreasing,
    })
}
