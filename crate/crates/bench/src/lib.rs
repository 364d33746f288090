//! Shared fixtures for the benchmarks.

use circlab_core::monitored::{hybrid_step, Boundary};
use circlab_core::rng::{rng_from_seed, SimRng};
use circlab_core::GraphState;

pub fn rng(seed: u64) -> SimRng {
    rng_from_seed(seed)
}

/// A chain of `l` sites after `2l` hybrid steps at rate `p`, and the generator that made it.
pub fn scrambled_chain(l: usize, p: f64, seed: u64) -> (GraphState, SimRng) {
    let mut r = rng(seed);
    let mut g = GraphState::new_zero_state(l).expect("state");
    for t in 0..2 * l {
        hybrid_step(&mut g, l, t, p, Boundary::Periodic, &mut r).expect("step");
    }
    (g, r)
}
