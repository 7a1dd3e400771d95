//! First eigenvalue of the Sturm–Liouville problem `y'' + q y + λ y = 0` on
//! [0, 1] with Robin conditions, and numerical experiments on its extrema
//! over potentials with `q ≥ 0`, `∫ q^γ = 1`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigen;
pub mod error;
pub mod families;
pub mod potential;
pub mod search;
pub mod sobolev;
pub mod tridiag;

pub use eigen::{
    eigenfunction, lambda1, lambda1_fd, lambda1_with_eigenfunction, lambda1_zero, rayleigh,
    theta_end, EigenResult, Integrator, RobinBC, SolverConfig,
};
pub use error::{Error, Result};
pub use families::{
    statement1_family, statement2_family, statement3_family, verify_thm1, verify_thm2,
    Certificate, ConvergenceTable, SpikeFamilySpec, SpikeTrainMember, SpikeTrainSpec, TableRow,
    TrainTuning, UnboundednessTable,
};
pub use potential::{
    normalize_gamma, pnorm, refine_common, shift, DeltaComponent, GammaConstraint, NormExponent,
    Potential, StepPotential,
};
pub use search::{
    search_extremum, search_extremum_from, search_with_caps, ExtremumSearchSpec, SearchMode,
    SearchResult, TraceEntry,
};
pub use sobolev::{
    pairing, riesz_representer, w1_norm, wminus1_dist, wminus1_norm, SampledFunction,
    SignedDelta, SignedMeasure,
};
