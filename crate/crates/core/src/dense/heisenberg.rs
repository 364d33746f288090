//! Isotropic spin-½ Heisenberg chain `H = Σ S_ℓ·S_{ℓ+1}` with open ends,
//! evolved by even/odd bond splitting.
//!
//! A bond term is `h = P_T/4 − 3P_S/4` (triplet/singlet projectors), so
//! `e^{−ihτ}` is exact in closed form; each bond kernel conserves `Sᶻ`.

use super::grid::{grid_shape, snake_index};
use super::DenseState;
use crate::error::{Error, Result};
use crate::linalg::{M4, ZERO};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrotterOrder {
    /// `e^{−iH_e δt} e^{−iH_o δt}` per step.
    #[default]
    Lie,
    /// `e^{−iH_o δt/2} e^{−iH_e δt} e^{−iH_o δt/2}` per step.
    Strang,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergChain {
    pub l: usize,
    pub dt: f64,
    pub order: TrotterOrder,
    /// Grid on which the chain is laid out as a snake; `rows · cols = l`.
    pub rows: usize,
    pub cols: usize,
}

impl HeisenbergChain {
    pub fn new(l: usize) -> Self {
        let (rows, cols) = grid_shape(l);
        Self { l, dt: 0.5, order: TrotterOrder::Lie, rows, cols }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_order(mut self, order: TrotterOrder) -> Self {
        self.order = order;
        self
    }

    /// Chain index of grid site `(r, c)`.
    pub fn chain_index(&self, r: usize, c: usize) -> usize {
        snake_index(self.cols, r, c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l < 2 {
            return Err(Error::InvalidConfig("chain needs at least 2 sites".into()));
        }
        if self.rows * self.cols != self.l {
            return Err(Error::InvalidConfig(format!("grid {}x{} does not hold {} sites", self.rows, self.cols, self.l)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("time step {} must be positive", self.dt)));
        }
        Ok(())
    }

    fn bonds(&self, parity: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        (parity..self.l.saturating_sub(1)).step_by(2).map(|i| (i, i + 1))
    }
}

/// `e^{−i h z}` for complex `z`: real `z` is real time, `z = −iτ` gives `e^{−hτ}`.
pub fn bond_propagator(z: Complex64) -> M4 {
    let i = Complex64::new(0.0, 1.0);
    let trip = (-i * z * 0.25).exp();
    let sing = (i * z * 0.75).exp();
    let mut m = [[ZERO; 4]; 4];
    m[0][0] = trip;
    m[3][3] = trip;
    m[1][1] = (trip + sing) * 0.5;
    m[2][2] = m[1][1];
    m[1][2] = (trip - sing) * 0.5;
    m[2][1] = m[1][2];
    m
}

fn layer(state: &mut DenseState, chain: &HeisenbergChain, parity: usize, kernel: &M4) {
    for (a, b) in chain.bonds(parity) {
        state.apply_two_unchecked(a, b, kernel);
    }
}

/// One split step with complex step `z` (real time `δt`, or `−iδβ`).
fn split_step(state: &mut DenseState, chain: &HeisenbergChain, z: Complex64, order: TrotterOrder) {
    match order {
        TrotterOrder::Lie => {
            let k = bond_propagator(z);
            layer(state, chain, 1, &k);
            layer(state, chain, 0, &k);
        }
        TrotterOrder::Strang => {
            let half = bond_propagator(z * 0.5);
            layer(state, chain, 1, &half);
            layer(state, chain, 0, &bond_propagator(z));
            layer(state, chain, 1, &half);
        }
    }
}

fn step_count(t: f64, dt: f64) -> Result<usize> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::NonIntegerSteps { t, dt });
    }
    let n = (t / dt).round();
    if (n * dt - t).abs() > 1e-9 * dt.max(1.0) {
        return Err(Error::NonIntegerSteps { t, dt });
    }
    Ok(n as usize)
}

/// Evolves by `t = N·dt` with the chain's split order.
pub fn trotter_evolve(state: &mut DenseState, chain: &HeisenbergChain, t: f64) -> Result<()> {
    chain.validate()?;
    if state.n() != chain.l {
        return Err(Error::InvalidConfig(format!("state has {} qubits, chain {}", state.n(), chain.l)));
    }
    for _ in 0..step_count(t, chain.dt)? {
        split_step(state, chain, Complex64::new(chain.dt, 0.0), chain.order);
    }
    Ok(())
}

/// `|ψ⟩ → e^{−τH}|ψ⟩` by Strang split steps of size `dtau`; the last step is shortened to land on `τ`.
pub fn imaginary_time_evolve(state: &mut DenseState, chain: &HeisenbergChain, tau: f64, dtau: f64) -> Result<()> {
    chain.validate()?;
    if tau < 0.0 {
        return Err(Error::InvalidConfig(format!("imaginary time {tau} must be ≥ 0")));
    }
    if tau == 0.0 {
        return Ok(());
    }
    let n = (tau / dtau).ceil().max(1.0) as usize;
    let step = tau / n as f64;
    for _ in 0..n {
        split_step(state, chain, Complex64::new(0.0, -step), TrotterOrder::Strang);
    }
    Ok(())
}

/// `H|ψ⟩` applied bond by bond.
pub(crate) fn apply_hamiltonian(state: &DenseState, l: usize) -> DenseState {
    let mut out = DenseState::from_amplitudes(vec![ZERO; state.dim()]).expect("same size");
    let amps = state.amplitudes();
    let o = out.amplitudes_mut();
    for i in 0..l - 1 {
        let (bi, bj) = (1usize << i, 1usize << (i + 1));
        for (x, a) in amps.iter().enumerate() {
            let aligned = (x & bi == 0) == (x & bj == 0);
            if aligned {
                o[x] += a * 0.25;
            } else {
                o[x] -= a * 0.25;
                o[x ^ bi ^ bj] += a * 0.5;
            }
        }
    }
    out
}

/// Reference evolution `e^{−iHt}` by Taylor series on short sub-steps, accurate to ~1e-13.
pub fn exact_evolve(state: &mut DenseState, l: usize, t: f64) -> Result<()> {
    if state.n() != l || l < 2 {
        return Err(Error::InvalidConfig(format!("state has {} qubits, chain {}", state.n(), l)));
    }
    let bound = 0.75 * (l - 1) as f64;
    let n = ((t.abs() * bound) / 0.5).ceil().max(1.0) as usize;
    let h = t / n as f64;
    let minus_ih = Complex64::new(0.0, -h);
    for _ in 0..n {
        let mut term = state.clone();
        let mut acc = state.clone();
        for k in 1..40 {
            term = apply_hamiltonian(&term, l);
            term.scale(minus_ih / k as f64);
            for (a, b) in acc.amplitudes_mut().iter_mut().zip(term.amplitudes()) {
                *a += b;
            }
            if term.norm_sqr().sqrt() < 1e-17 {
                break;
            }
        }
        *state = acc;
    }
    Ok(())
}

/// Dense `H` for small chains (exact-diagonalization oracle).
pub fn hamiltonian_matrix(l: usize) -> Result<DMatrix<f64>> {
    if !(2..=14).contains(&l) {
        return Err(Error::TooManyQubits { n: l, max: 14 });
    }
    let dim = 1usize << l;
    let mut h = DMatrix::zeros(dim, dim);
    for i in 0..l - 1 {
        let (bi, bj) = (1usize << i, 1usize << (i + 1));
        for x in 0..dim {
            if (x & bi == 0) == (x & bj == 0) {
                h[(x, x)] += 0.25;
            } else {
                h[(x, x)] -= 0.25;
                h[(x ^ bi ^ bj, x)] += 0.5;
            }
        }
    }
    Ok(h)
}
