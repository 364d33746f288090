//! Purification dynamics and reference-qubit probes.
//!
//! Purification: system qubit `i` starts Bell-paired with reference `L+i`,
//! so the system marginal is maximally mixed. The hybrid circuit acts on
//! the system only, and `S(refs)` equals the system's entropy.
//!
//! Probes: after a scramble of `t0` hybrid steps, each reference `R` is
//! Bell-paired with a probe site by a swap-in construction: `R` and a
//! parking qubit `E` are put in a Bell pair (H on R, CNOT R→E), then `E` is
//! swapped with the site. The site ends up maximally entangled with `R`
//! and its previous state is parked in `E`, which is never touched again.
//! Qubit layout: system `0..L`, then `(R_j, E_j) = (L+2j, L+2j+1)`.

use crate::clifford::{CliffordOne, CliffordTwo};
use crate::error::{Error, Result};
use crate::graph_state::GraphState;
use crate::monitored::{hybrid_step, mean_stderr, Boundary, CircuitConfig};
use crate::rng::{rng_from_seed, trajectory_seed, SimRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurificationConfig {
    pub base: CircuitConfig,
    pub purity_threshold_bits: f64,
    pub max_steps: usize,
}

impl PurificationConfig {
    pub fn new(base: CircuitConfig) -> Self {
        let max_steps = base.steps;
        Self { base, purity_threshold_bits: 0.5, max_steps }
    }

    pub fn validate(&self) -> Result<()> {
        let mut b = self.base.clone();
        b.observables.i3 = false;
        b.observables.i2 = false;
        b.validate()?;
        if !(self.purity_threshold_bits > 0.0 && self.purity_threshold_bits <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "purity threshold {} outside (0, 1]",
                self.purity_threshold_bits
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurificationResult {
    /// First step at which `S(refs) ≤ threshold`; `None` if never within `max_steps`.
    pub t_p: Option<usize>,
    /// `S(refs)` in bits after each step `1..=max_steps`.
    pub s_ref: Vec<usize>,
}

fn bell_pair(g: &mut GraphState, a: usize, b: usize) -> Result<()> {
    g.apply_one_qubit(a, CliffordOne::h())?;
    g.apply_two_qubit(a, b, CliffordTwo::cnot())
}

/// One purification trajectory with seed `config.base.seed`.
pub fn purification_run(config: &PurificationConfig) -> Result<PurificationResult> {
    config.validate()?;
    let l = config.base.l;
    let mut rng = rng_from_seed(config.base.seed);
    let mut g = GraphState::new_zero_state(2 * l)?;
    for i in 0..l {
        bell_pair(&mut g, i, l + i)?;
    }
    let refs: Vec<usize> = (l..2 * l).collect();
    let mut s_ref = Vec::with_capacity(config.max_steps);
    let mut t_p = None;
    for t in 0..config.max_steps {
        hybrid_step(&mut g, l, t, config.base.p, config.base.boundary, &mut rng)?;
        let s = g.entanglement_entropy_bits(&refs);
        s_ref.push(s);
        if t_p.is_none() && s as f64 <= config.purity_threshold_bits {
            t_p = Some(t + 1);
        }
        if s == 0 {
            // pure from here on: the entropy cannot increase
            s_ref.resize(config.max_steps, 0);
            break;
        }
    }
    Ok(PurificationResult { t_p, s_ref })
}

/// `n` purification runs with per-trajectory seeds, ordered by index.
pub fn purification_ensemble(config: &PurificationConfig, n: usize) -> Result<Vec<PurificationResult>> {
    config.validate()?;
    (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let mut c = config.clone();
            c.base.seed = trajectory_seed(config.base.seed, k);
            purification_run(&c)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub base: CircuitConfig,
    pub t0: usize,
    pub t1: usize,
    pub probe_sites: Vec<usize>,
    /// Attach probes at the chain ends with open boundaries.
    pub surface: bool,
}

impl ProbeConfig {
    /// One bulk probe at `L/2`, `t0 = t1 = 2L`.
    pub fn single(base: CircuitConfig) -> Self {
        let l = base.l;
        Self { t0: 2 * l, t1: 2 * l, probe_sites: vec![l / 2], surface: false, base }
    }

    /// Two bulk probes at `L/4` and `3L/4`.
    pub fn pair(base: CircuitConfig) -> Self {
        let l = base.l;
        Self { t0: 2 * l, t1: 2 * l, probe_sites: vec![l / 4, 3 * l / 4], surface: false, base }
    }

    /// Probes at the chain ends, open boundaries.
    pub fn surface(mut base: CircuitConfig, two: bool) -> Self {
        let l = base.l;
        base.boundary = Boundary::Open;
        let sites = if two { vec![0, l - 1] } else { vec![0] };
        Self { t0: 2 * l, t1: 2 * l, probe_sites: sites, surface: true, base }
    }

    pub fn validate(&self) -> Result<()> {
        let mut b = self.base.clone();
        b.observables.i3 = false;
        b.observables.i2 = false;
        b.validate()?;
        let l = self.base.l;
        if self.probe_sites.is_empty() || self.probe_sites.len() > 2 {
            return Err(Error::InvalidConfig("one or two probe sites required".into()));
        }
        for &x in &self.probe_sites {
            if x >= l {
                return Err(Error::QubitOutOfRange { index: x, n: l });
            }
        }
        if self.probe_sites.len() == 2 && self.probe_sites[0] == self.probe_sites[1] {
            return Err(Error::SameQubit(self.probe_sites[0]));
        }
        if self.surface && self.base.boundary != Boundary::Open {
            return Err(Error::InvalidConfig("surface probes need open boundaries".into()));
        }
        Ok(())
    }
}

/// Final state of one probe trajectory plus the reference indices.
pub fn probe_trajectory(config: &ProbeConfig, rng: &mut SimRng) -> Result<(GraphState, Vec<usize>)> {
    config.validate()?;
    let l = config.base.l;
    let k = config.probe_sites.len();
    let mut g = GraphState::new_zero_state(l + 2 * k)?;
    let (p, bc) = (config.base.p, config.base.boundary);
    for t in 0..config.t0 {
        hybrid_step(&mut g, l, t, p, bc, rng)?;
    }
    let mut refs = Vec::with_capacity(k);
    for (j, &x) in config.probe_sites.iter().enumerate() {
        let (r, e) = (l + 2 * j, l + 2 * j + 1);
        bell_pair(&mut g, r, e)?;
        g.apply_two_qubit(e, x, CliffordTwo::swap())?;
        refs.push(r);
    }
    for t in config.t0..config.t0 + config.t1 {
        hybrid_step(&mut g, l, t, p, bc, rng)?;
    }
    Ok((g, refs))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

fn estimate(vals: &[f64]) -> ProbeEstimate {
    let (mean, stderr) = mean_stderr(vals);
    ProbeEstimate { mean, stderr, n: vals.len() }
}

/// Per-trajectory `S(R)` in bits for a single probe.
pub fn order_parameter_samples(config: &ProbeConfig, ensemble: usize) -> Result<Vec<f64>> {
    config.validate()?;
    if config.probe_sites.len() != 1 {
        return Err(Error::InvalidConfig("order-parameter probe takes one site".into()));
    }
    (0..ensemble as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_from_seed(trajectory_seed(config.base.seed, k));
            let (g, refs) = probe_trajectory(config, &mut rng)?;
            Ok(g.entanglement_entropy_bits(&refs) as f64)
        })
        .collect()
}

/// Ensemble-averaged `S(R)` in bits.
pub fn order_parameter_probe(config: &ProbeConfig, ensemble: usize) -> Result<ProbeEstimate> {
    Ok(estimate(&order_parameter_samples(config, ensemble)?))
}

/// Per-trajectory `I2(R1:R2)` in bits.
pub fn correlation_samples(config: &ProbeConfig, ensemble: usize) -> Result<Vec<f64>> {
    config.validate()?;
    if config.probe_sites.len() != 2 {
        return Err(Error::InvalidConfig("correlation probe takes two sites".into()));
    }
    (0..ensemble as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_from_seed(trajectory_seed(config.base.seed, k));
            let (g, refs) = probe_trajectory(config, &mut rng)?;
            Ok(crate::monitored::mutual_information(&g, &refs[..1], &refs[1..])? as f64)
        })
        .collect()
}

/// Ensemble-averaged `I2(R1:R2)` in bits.
pub fn correlation_probe(config: &ProbeConfig, ensemble: usize) -> Result<ProbeEstimate> {
    Ok(estimate(&correlation_samples(config, ensemble)?))
}
