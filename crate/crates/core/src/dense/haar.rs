//! Monitored brickwork circuits of Haar-random two-qubit gates.
//!
//! Same spacetime layout as the Clifford driver: step `t` applies the
//! half-brickwork layer of parity `t mod 2`, then measures each site in Z
//! with probability `p`.

use super::{haar_unitary4, DenseState};
use crate::error::{Error, Result};
use crate::monitored::{brickwork_bonds, Boundary};
use crate::rng::{rng_from_seed, trajectory_seed};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const MAX_HAAR_SITES: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HaarConfig {
    pub l: usize,
    pub p: f64,
    pub steps: usize,
    pub boundary: Boundary,
    pub seed: u64,
    /// First completed-step count at which `S(L/2)` is recorded.
    pub record_from: usize,
    /// Evaluate `I3` of quarter arcs on the final state.
    pub final_i3: bool,
}

impl HaarConfig {
    /// Periodic chain, `T = 2L`, recording every step.
    pub fn new(l: usize, p: f64, seed: u64) -> Self {
        Self { l, p, steps: 2 * l, boundary: Boundary::Periodic, seed, record_from: 1, final_i3: false }
    }

    /// Records only the last `L/2` steps.
    pub fn steady_state_window(mut self) -> Self {
        self.record_from = self.steps.saturating_sub(self.l / 2) + 1;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.l < 2 {
            return Err(Error::InvalidConfig("need at least 2 sites".into()));
        }
        if self.l > MAX_HAAR_SITES {
            return Err(Error::TooManyQubits { n: self.l, max: MAX_HAAR_SITES });
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidConfig(format!("p = {} outside [0, 1]", self.p)));
        }
        if self.final_i3 && self.l % 4 != 0 {
            return Err(Error::InvalidConfig("I3 needs L divisible by 4".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HaarRecord {
    /// Completed-step counts at which `s_half` was recorded.
    pub times: Vec<usize>,
    /// Half-chain von Neumann entropy (nats).
    pub s_half: Vec<f64>,
    /// Final-state `I3` of quarter arcs (nats).
    pub i3: Option<f64>,
    pub measurement_count: usize,
}

impl HaarRecord {
    pub fn mean_s_half(&self) -> f64 {
        self.s_half.iter().sum::<f64>() / self.s_half.len().max(1) as f64
    }
}

fn quarter_i3(s: &DenseState, l: usize) -> Result<f64> {
    let q = l / 4;
    let arc = |k: usize| (k * q..(k + 1) * q).collect::<Vec<_>>();
    let (a, b, c) = (arc(0), arc(1), arc(2));
    let join = |x: &[usize], y: &[usize]| [x, y].concat();
    let e = |set: &[usize]| s.von_neumann_entropy(set);
    Ok(e(&a)? + e(&b)? + e(&c)? - e(&join(&a, &b))? - e(&join(&a, &c))? - e(&join(&b, &c))?
        + e(&[a.clone(), b.clone(), c.clone()].concat())?)
}

/// One trajectory with seed `config.seed`.
pub fn monitored_haar_run(config: &HaarConfig) -> Result<HaarRecord> {
    config.validate()?;
    let mut rng = rng_from_seed(config.seed);
    run_with(config, &mut rng)
}

fn run_with<R: Rng + ?Sized>(config: &HaarConfig, rng: &mut R) -> Result<HaarRecord> {
    let l = config.l;
    let mut s = DenseState::new_zero(l)?;
    let half: Vec<usize> = (0..l / 2).collect();
    let mut s_half = Vec::with_capacity(config.steps);
    let mut times = Vec::with_capacity(config.steps);
    let mut count = 0;
    for t in 0..config.steps {
        for (a, b) in brickwork_bonds(l, t, config.boundary) {
            s.apply_two_unchecked(a, b, &haar_unitary4(rng));
        }
        if config.p > 0.0 {
            for x in 0..l {
                if rng.gen_bool(config.p) {
                    s.measure_z(x, rng)?;
                    count += 1;
                }
            }
        }
        if t + 1 >= config.record_from {
            times.push(t + 1);
            s_half.push(s.von_neumann_entropy(&half)?);
        }
    }
    let i3 = if config.final_i3 { Some(quarter_i3(&s, l)?) } else { None };
    Ok(HaarRecord { times, s_half, i3, measurement_count: count })
}

/// `n` trajectories seeded by `trajectory_seed(config.seed, k)`, in order.
pub fn monitored_haar_ensemble(config: &HaarConfig, n: usize) -> Result<Vec<HaarRecord>> {
    config.validate()?;
    (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let mut c = config.clone();
            c.seed = trajectory_seed(config.seed, k);
            monitored_haar_run(&c)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_measurement_disentangles() {
        let r = monitored_haar_run(&HaarConfig::new(8, 1.0, 1)).unwrap();
        assert!(r.s_half.iter().all(|&s| s.abs() < 1e-10));
        assert_eq!(r.measurement_count, 8 * 16);
    }

    #[test]
    fn unitary_dynamics_approach_page() {
        let mut c = HaarConfig::new(8, 0.0, 2);
        c.final_i3 = true;
        let r = monitored_haar_run(&c).unwrap();
        let page = 4.0 * std::f64::consts::LN_2 - 0.5;
        assert!((r.s_half.last().unwrap() - page).abs() < 0.3);
        assert!(r.i3.unwrap() < 0.0);
    }

    #[test]
    fn validation() {
        assert!(HaarConfig::new(24, 0.1, 0).validate().is_err());
        let mut c = HaarConfig::new(6, 0.1, 0);
        c.final_i3 = true;
        assert!(c.validate().is_err());
    }
}
