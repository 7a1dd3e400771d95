#![allow(dead_code)]

use rand::Rng;
use sl_extremal::{RobinBC, StepPotential};

/// Random step potential with 1..=max_cells cells of random widths and
/// heights drawn from [0, max_height].
pub fn random_step(rng: &mut impl Rng, max_cells: usize, max_height: f64) -> StepPotential {
    let cells = rng.gen_range(1..=max_cells);
    let mut interior: Vec<f64> = (0..cells - 1).map(|_| rng.gen_range(0.02..0.98)).collect();
    interior.sort_by(f64::total_cmp);
    interior.dedup();
    let mut breakpoints = vec![0.0];
    breakpoints.extend(interior);
    breakpoints.push(1.0);
    let heights = (0..breakpoints.len() - 1)
        .map(|_| rng.gen_range(0.0..=max_height))
        .collect();
    StepPotential::new(breakpoints, heights).unwrap()
}

/// Like [`random_step`] with heights in [min_height, max_height].
pub fn random_positive_step(
    rng: &mut impl Rng,
    max_cells: usize,
    min_height: f64,
    max_height: f64,
) -> StepPotential {
    let base = random_step(rng, max_cells, 1.0);
    let heights = base
        .heights()
        .iter()
        .map(|_| rng.gen_range(min_height..=max_height))
        .collect();
    StepPotential::new(base.breakpoints().to_vec(), heights).unwrap()
}

pub fn random_bc(rng: &mut impl Rng, max: f64) -> RobinBC {
    RobinBC::new(rng.gen_range(0.0..=max), rng.gen_range(0.0..=max)).unwrap()
}
