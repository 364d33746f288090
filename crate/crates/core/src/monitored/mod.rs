//! Hybrid Clifford circuits: brickwork of uniform two-qubit Cliffords plus
//! random projective Z measurements.
//!
//! One time step is one half-brickwork layer (bonds `(i, i+1)` with `i`
//! even on even steps, odd on odd steps) followed by one measurement round
//! in which every site is measured independently with probability `p`.

mod mincut;

pub use mincut::{hartley_min_cut, SpacetimeLayout};

use crate::clifford::sample_uniform_two_qubit;
use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::graph_state::GraphState;
use crate::rng::{rng_from_seed, trajectory_seed};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Open,
}

/// Which observables a trajectory records.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observables {
    pub s_half: bool,
    pub i3: bool,
    /// `I2(A:C)` between antipodal quarter arcs.
    pub i2: bool,
    /// Keep the spacetime measurement layout for min-cut analysis.
    pub layout: bool,
}

impl Default for Observables {
    fn default() -> Self {
        Self { s_half: true, i3: true, i2: false, layout: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitConfig {
    pub l: usize,
    pub p: f64,
    pub steps: usize,
    pub boundary: Boundary,
    pub seed: u64,
    pub record_every: usize,
    /// First step (1-based count of completed steps) eligible for recording.
    pub record_from: usize,
    pub observables: Observables,
}

impl CircuitConfig {
    /// Periodic chain with `T = 4L` steps, recording every step.
    pub fn new(l: usize, p: f64, seed: u64) -> Self {
        Self {
            l,
            p,
            steps: 4 * l,
            boundary: Boundary::Periodic,
            seed,
            record_every: 1,
            record_from: 0,
            observables: Observables::default(),
        }
    }

    /// Restricts recording to the steady-state window (last `L` steps).
    pub fn steady_state_window(mut self) -> Self {
        self.record_from = self.steps.saturating_sub(self.l) + 1;
        self
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(0.0..=1.0).contains(&self.p) || self.p.is_nan() {
            return bad(format!("p = {} outside [0, 1]", self.p));
        }
        if self.l < 2 {
            return bad(format!("L = {} is too small", self.l));
        }
        if self.steps == 0 {
            return bad("steps must be at least 1".into());
        }
        if self.record_every == 0 {
            return bad("record_every must be at least 1".into());
        }
        if self.boundary == Boundary::Periodic && self.l % 2 == 1 {
            return bad(format!("periodic brickwork needs even L, got {}", self.l));
        }
        if (self.observables.i3 || self.observables.i2) && (self.l % 4 != 0 || self.l < 4) {
            return bad(format!("quarter-arc observables need L divisible by 4, got {}", self.l));
        }
        Ok(())
    }

    fn records_at(&self, t: usize) -> bool {
        t >= self.record_from && t % self.record_every == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub config: CircuitConfig,
    /// Completed-step counts at which observables were recorded.
    pub times: Vec<usize>,
    pub s_half: Vec<i64>,
    pub i3: Vec<i64>,
    pub i2_pairs: Option<Vec<i64>>,
    pub measurement_count: u64,
    #[serde(skip)]
    pub layout: Option<SpacetimeLayout>,
}

impl TrajectoryRecord {
    /// Mean of a series over records with `time >= from`.
    pub fn window_mean(&self, series: &[i64], from: usize) -> Option<f64> {
        let vals: Vec<f64> = self
            .times
            .iter()
            .zip(series)
            .filter(|(t, _)| **t >= from)
            .map(|(_, v)| *v as f64)
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

/// Bonds of the brickwork layer at step `t` as `(left, right)` site pairs.
pub fn brickwork_bonds(l: usize, t: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(l / 2);
    let mut i = t % 2;
    while i < l {
        if i + 1 < l {
            out.push((i, i + 1));
        } else if boundary == Boundary::Periodic && l > 2 {
            out.push((i, 0));
        }
        i += 2;
    }
    out
}

/// One hybrid step on qubits `0..l` of `state`. Returns the measured sites.
pub fn hybrid_step<R: Rng + ?Sized>(
    state: &mut GraphState,
    l: usize,
    t: usize,
    p: f64,
    boundary: Boundary,
    rng: &mut R,
) -> Result<Vec<usize>> {
    for (a, b) in brickwork_bonds(l, t, boundary) {
        let g = sample_uniform_two_qubit(rng);
        state.apply_two_qubit(a, b, g)?;
    }
    let mut measured = Vec::new();
    if p > 0.0 {
        for x in 0..l {
            if rng.gen_bool(p) {
                state.measure_z(x, rng)?;
                measured.push(x);
            }
        }
    }
    Ok(measured)
}

/// Quarter arcs `[0, L/4)`, `[L/4, L/2)`, `[L/2, 3L/4)`, `[3L/4, L)` as masks over `n` qubits.
pub fn quarter_arcs(l: usize, n: usize) -> Result<[BitVec; 4]> {
    if l % 4 != 0 || l < 4 {
        return Err(Error::InvalidConfig(format!("L = {l} is not divisible by 4")));
    }
    let q = l / 4;
    Ok([0, 1, 2, 3].map(|k| BitVec::from_indices(n, k * q..(k + 1) * q)))
}

fn union(a: &BitVec, b: &BitVec) -> BitVec {
    let mut u = a.clone();
    for i in b.ones() {
        u.set(i, true);
    }
    u
}

/// `I3(A:B:C) = S_A + S_B + S_C − S_AB − S_AC − S_BC + S_ABC`, in bits.
pub fn tripartite_information_sets(state: &GraphState, a: &BitVec, b: &BitVec, c: &BitVec) -> Result<i64> {
    for (x, y) in [(a, b), (a, c), (b, c)] {
        let mut m = x.clone();
        m.and_assign(y);
        let first = m.ones().next();
        if let Some(q) = first {
            return Err(Error::OverlappingSubsets(q));
        }
    }
    let s = |m: &BitVec| state.entropy_of_mask(m) as i64;
    let ab = union(a, b);
    let ac = union(a, c);
    let bc = union(b, c);
    let abc = union(&ab, c);
    Ok(s(a) + s(b) + s(c) - s(&ab) - s(&ac) - s(&bc) + s(&abc))
}

/// I3 over the first three quarter arcs of the chain on qubits `0..l`.
pub fn tripartite_information(state: &GraphState, l: usize) -> Result<i64> {
    let [a, b, c, _] = quarter_arcs(l, state.n())?;
    tripartite_information_sets(state, &a, &b, &c)
}

/// `I2(A:B) = S_A + S_B − S_AB`, in bits.
pub fn mutual_information(state: &GraphState, a: &[usize], b: &[usize]) -> Result<i64> {
    let n = state.n();
    for &q in a.iter().chain(b) {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, n });
        }
    }
    let ma = BitVec::from_indices(n, a.iter().copied());
    let mb = BitVec::from_indices(n, b.iter().copied());
    if let Some(&q) = a.iter().find(|q| mb.get(**q)) {
        return Err(Error::OverlappingSubsets(q));
    }
    let ab = union(&ma, &mb);
    Ok(state.entropy_of_mask(&ma) as i64 + state.entropy_of_mask(&mb) as i64 - state.entropy_of_mask(&ab) as i64)
}

/// Runs one trajectory from `|0⟩^⊗L` using `config.seed` directly.
pub fn run_trajectory(config: &CircuitConfig) -> Result<TrajectoryRecord> {
    config.validate()?;
    let l = config.l;
    let obs = config.observables;
    let mut rng = rng_from_seed(config.seed);
    let mut state = GraphState::new_zero_state(l)?;
    let half = BitVec::from_indices(l, 0..l / 2);
    let arcs = if obs.i3 || obs.i2 { Some(quarter_arcs(l, l)?) } else { None };
    let mut layout = obs.layout.then(|| SpacetimeLayout::new(l, config.steps, config.boundary));
    let mut rec = TrajectoryRecord {
        config: config.clone(),
        times: Vec::new(),
        s_half: Vec::new(),
        i3: Vec::new(),
        i2_pairs: obs.i2.then(Vec::new),
        measurement_count: 0,
        layout: None,
    };
    for t in 0..config.steps {
        let measured = hybrid_step(&mut state, l, t, config.p, config.boundary, &mut rng)?;
        rec.measurement_count += measured.len() as u64;
        if let Some(lay) = layout.as_mut() {
            for x in measured {
                lay.set_measured(t, x);
            }
        }
        let done = t + 1;
        if config.records_at(done) {
            rec.times.push(done);
            if obs.s_half {
                rec.s_half.push(state.entropy_of_mask(&half) as i64);
            }
            if let Some([a, b, c, _]) = arcs.as_ref() {
                if obs.i3 {
                    rec.i3.push(tripartite_information_sets(&state, a, b, c)?);
                }
                if let Some(v) = rec.i2_pairs.as_mut() {
                    let ac = union(a, c);
                    v.push(state.entropy_of_mask(a) as i64 + state.entropy_of_mask(c) as i64 - state.entropy_of_mask(&ac) as i64);
                }
            }
        }
    }
    rec.layout = layout;
    Ok(rec)
}

/// `n` trajectories; trajectory `k` uses seed `trajectory_seed(config.seed, k)`.
/// Results are ordered by `k` and independent of the thread count.
pub fn run_ensemble(config: &CircuitConfig, n: usize) -> Result<Vec<TrajectoryRecord>> {
    config.validate()?;
    (0..n as u64)
        .into_par_iter()
        .map(|k| run_trajectory(&config.with_seed(trajectory_seed(config.seed, k))))
        .collect()
}

/// Mean and standard error of per-trajectory steady-state averages.
pub fn ensemble_mean(records: &[TrajectoryRecord], pick: impl Fn(&TrajectoryRecord) -> Option<f64>) -> (f64, f64) {
    let vals: Vec<f64> = records.iter().filter_map(pick).collect();
    mean_stderr(&vals)
}

pub fn mean_stderr(vals: &[f64]) -> (f64, f64) {
    let n = vals.len() as f64;
    if vals.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = vals.iter().sum::<f64>() / n;
    if vals.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::CliffordOne;

    #[test]
    fn bonds() {
        assert_eq!(brickwork_bonds(6, 0, Boundary::Open), vec![(0, 1), (2, 3), (4, 5)]);
        assert_eq!(brickwork_bonds(6, 1, Boundary::Open), vec![(1, 2), (3, 4)]);
        assert_eq!(brickwork_bonds(6, 1, Boundary::Periodic), vec![(1, 2), (3, 4), (5, 0)]);
    }

    #[test]
    fn full_measurement_kills_entanglement() {
        let mut c = CircuitConfig::new(16, 1.0, 3);
        c.steps = 20;
        let r = run_trajectory(&c).unwrap();
        assert!(r.s_half.iter().all(|&s| s == 0));
        assert!(r.i3.iter().all(|&s| s == 0));
        assert_eq!(r.measurement_count, 16 * 20);
    }

    #[test]
    fn unitary_dynamics_reach_volume_law() {
        let mut c = CircuitConfig::new(32, 0.0, 4);
        c.observables.i3 = false;
        let r = run_trajectory(&c).unwrap();
        let last = *r.s_half.last().unwrap();
        assert!(last as f64 >= 0.3 * 32.0, "{last}");
        assert!(last <= 16);
    }

    #[test]
    fn trajectories_are_deterministic() {
        let mut c = CircuitConfig::new(16, 0.2, 99);
        c.observables.i2 = true;
        let a = run_ensemble(&c, 4).unwrap();
        let b = run_ensemble(&c, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a[0].s_half, a[1].s_half);
    }

    #[test]
    fn steady_window() {
        let c = CircuitConfig::new(16, 0.1, 1).steady_state_window();
        let r = run_trajectory(&c).unwrap();
        assert_eq!(r.times.first(), Some(&49));
        assert_eq!(r.times.len(), 16);
    }

    #[test]
    fn bell_pair_mutual_information() {
        let mut g = GraphState::new_zero_state(4).unwrap();
        g.apply_one_qubit(0, CliffordOne::h()).unwrap();
        g.apply_one_qubit(1, CliffordOne::h()).unwrap();
        g.apply_cz(0, 1).unwrap();
        assert_eq!(mutual_information(&g, &[0], &[1]).unwrap(), 2);
        assert_eq!(mutual_information(&g, &[2], &[3]).unwrap(), 0);
        assert!(matches!(mutual_information(&g, &[0, 1], &[1]), Err(Error::OverlappingSubsets(1))));
        assert_eq!(tripartite_information(&GraphState::new_zero_state(8).unwrap(), 8).unwrap(), 0);
        assert!(tripartite_information(&g, 6).is_err());
    }

    #[test]
    fn invalid_configs() {
        let mut c = CircuitConfig::new(16, 1.5, 0);
        assert!(c.validate().is_err());
        c.p = 0.5;
        c.l = 14;
        assert!(c.validate().is_err());
        c.observables.i3 = false;
        assert!(c.validate().is_ok());
        c.steps = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn i3_is_partition_independent_for_pure_states() {
        let l = 16;
        for seed in 0..20u64 {
            let mut rng = rng_from_seed(seed);
            let mut g = GraphState::new_zero_state(l).unwrap();
            for t in 0..30 {
                hybrid_step(&mut g, l, t, 0.1, Boundary::Periodic, &mut rng).unwrap();
            }
            let arcs = quarter_arcs(l, l).unwrap();
            let base = tripartite_information_sets(&g, &arcs[0], &arcs[1], &arcs[2]).unwrap();
            for perm in [[1, 2, 3], [0, 2, 3], [3, 1, 0], [2, 0, 1]] {
                let v = tripartite_information_sets(&g, &arcs[perm[0]], &arcs[perm[1]], &arcs[perm[2]]).unwrap();
                assert_eq!(v, base);
            }
        }
    }
}
