//! Random coordinate search for extremal λ₁ over K-cell step potentials in
//! A_γ.
//!
//! Each proposal multiplies one cell by `exp(±step)` and renormalizes with
//! [`normalize_gamma`], so every iterate lies exactly on the constraint set.
//! Only improving proposals are accepted; the step shrinks after a run of
//! rejections and the search stops once it falls below `min_step`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::eigen::{lambda1, RobinBC, SolverConfig};
use crate::error::{Error, Result};
use crate::potential::{normalize_gamma, GammaConstraint, StepPotential};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Min,
    Max,
}

impl SearchMode {
    fn improves(self, candidate: f64, best: f64) -> bool {
        match self {
            SearchMode::Min => candidate < best,
            SearchMode::Max => candidate > best,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremumSearchSpec {
    pub gamma: f64,
    pub mode: SearchMode,
    pub cells: usize,
    pub max_iters: usize,
    pub initial_step: f64,
    pub min_step: f64,
    /// Step multiplier applied after `2K` consecutive rejections.
    pub shrink: f64,
    /// Proposals with any normalized height above the cap are rejected.
    pub height_cap: Option<f64>,
    pub seed: u64,
}

impl ExtremumSearchSpec {
    pub fn new(gamma: f64, mode: SearchMode, cells: usize) -> Self {
        Self {
            gamma,
            mode,
            cells,
            max_iters: 500,
            initial_step: 0.5,
            min_step: 1e-6,
            shrink: 0.5,
            height_cap: None,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        GammaConstraint::new(self.gamma)?;
        if self.cells < 2 {
            return Err(Error::InvalidArgument("cells must be >= 2".into()));
        }
        if !(self.initial_step > 0.0) || !(self.min_step > 0.0) {
            return Err(Error::InvalidArgument("step sizes must be > 0".into()));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::InvalidArgument("shrink must lie in (0, 1)".into()));
        }
        if let Some(cap) = self.height_cap {
            if !(cap >= 1.0) {
                // the uniform start q ≡ 1 must be admissible
                return Err(Error::InvalidArgument("height_cap must be >= 1".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub cell: usize,
    pub factor: f64,
    pub candidate_lambda: f64,
    pub accepted: bool,
    pub best_lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_q: StepPotential,
    pub best_lambda: f64,
    pub trace: Vec<TraceEntry>,
}

/// Search started from the uniform potential `q ≡ 1`, which lies in every A_γ.
pub fn search_extremum(
    spec: &ExtremumSearchSpec,
    bc: &RobinBC,
    cfg: &SolverConfig,
) -> Result<SearchResult> {
    let start = StepPotential::uniform(vec![1.0; spec.cells])?;
    search_extremum_from(spec, start, bc, cfg)
}

/// Search started from `start`, which is first renormalized into A_γ.
pub fn search_extremum_from(
    spec: &ExtremumSearchSpec,
    start: StepPotential,
    bc: &RobinBC,
    cfg: &SolverConfig,
) -> Result<SearchResult> {
    spec.validate()?;
    let gamma = GammaConstraint::new(spec.gamma)?;
    let (mut best_q, _) = normalize_gamma(&start, gamma)?;
    let mut best_lambda = lambda1(&best_q.clone().into(), bc, cfg)?.lambda1;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut step = spec.initial_step;
    let mut rejections = 0;
    let mut trace = Vec::with_capacity(spec.max_iters);

    for iteration in 0..spec.max_iters {
        let cell = rng.gen_range(0..best_q.num_cells());
        let factor = if rng.gen::<bool>() { step.exp() } else { (-step).exp() };
        let mut heights = best_q.heights().to_vec();
        heights[cell] *= factor;
        let proposal = StepPotential::new(best_q.breakpoints().to_vec(), heights)?;
        let candidate = match normalize_gamma(&proposal, gamma) {
            Ok((q, _)) => Some(q),
            Err(Error::ZeroPotential) => None,
            Err(e) => return Err(e),
        };
        let candidate =
            candidate.filter(|q| spec.height_cap.is_none_or(|cap| q.max_height() <= cap));
        let (candidate_lambda, accepted) = match candidate {
            Some(q) => {
                let l = lambda1(&q.clone().into(), bc, cfg)?.lambda1;
                if spec.mode.improves(l, best_lambda) {
                    best_q = q;
                    best_lambda = l;
                    (l, true)
                } else {
                    (l, false)
                }
            }
            None => (f64::NAN, false),
        };
        trace.push(TraceEntry {
            iteration,
            cell,
            factor,
            candidate_lambda,
            accepted,
            best_lambda,
        });
        if accepted {
            rejections = 0;
        } else {
            rejections += 1;
            if rejections >= 2 * spec.cells {
                step *= spec.shrink;
                rejections = 0;
                if step < spec.min_step {
                    break;
                }
            }
        }
    }
    Ok(SearchResult {
        best_q,
        best_lambda,
        trace,
    })
}

/// Repeats the search under each height cap in turn, warm-starting every
/// round from the previous best. Returns one result per cap.
pub fn search_with_caps(
    spec: &ExtremumSearchSpec,
    caps: &[f64],
    bc: &RobinBC,
    cfg: &SolverConfig,
) -> Result<Vec<SearchResult>> {
    let mut start = StepPotential::uniform(vec![1.0; spec.cells])?;
    let mut out = Vec::with_capacity(caps.len());
    for (round, &cap) in caps.iter().enumerate() {
        let round_spec = ExtremumSearchSpec {
            height_cap: Some(cap),
            seed: spec.seed.wrapping_add(round as u64),
            ..*spec
        };
        let res = search_extremum_from(&round_spec, start, bc, cfg)?;
        start = res.best_q.clone();
        out.push(res);
    }
    Ok(out)
}
