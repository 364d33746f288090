//! Random circuits on a 2D grid, Porter-Thomas statistics and XEB.
//!
//! Grid site `(r, c)` is qubit [`snake_index`]`(r, c)`: rows are read
//! left-to-right and right-to-left alternately, so consecutive qubits are
//! grid neighbours and a chain model can live on the same register.
//!
//! Two-qubit patterns (`rows × cols` grid, `=` marks a gate):
//!
//! ```text
//! A: (r, c)=(r, c+1), c even      B: (r, c)=(r, c+1), c odd
//! C: (r, c)=(r+1, c), r even      D: (r, c)=(r+1, c), r odd
//! ```
//!
//! Cycle `k` applies a one-qubit layer then pattern `k mod 4`.

use super::DenseState;
use crate::error::{Error, Result};
use crate::linalg::{M2, M4, ONE, ZERO};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OneQubitGate {
    SqrtX,
    SqrtY,
    T,
}

impl OneQubitGate {
    pub const ALL: [OneQubitGate; 3] = [OneQubitGate::SqrtX, OneQubitGate::SqrtY, OneQubitGate::T];

    /// `X^½ = e^{−iπX/4}`, `Y^½ = e^{−iπY/4}`, `T = diag(1, e^{iπ/4})`.
    pub fn matrix(self) -> M2 {
        let h = FRAC_1_SQRT_2;
        match self {
            OneQubitGate::SqrtX => {
                [[Complex64::new(h, 0.0), Complex64::new(0.0, -h)], [Complex64::new(0.0, -h), Complex64::new(h, 0.0)]]
            }
            OneQubitGate::SqrtY => {
                [[Complex64::new(h, 0.0), Complex64::new(-h, 0.0)], [Complex64::new(h, 0.0), Complex64::new(h, 0.0)]]
            }
            OneQubitGate::T => [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Entangler {
    #[default]
    Cz,
    Cnot,
}

impl Entangler {
    fn matrix(self) -> M4 {
        match self {
            Entangler::Cz => crate::clifford::cz_matrix(),
            Entangler::Cnot => crate::clifford::cnot_matrix(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pattern {
    A,
    B,
    C,
    D,
}

impl Pattern {
    pub const CYCLE: [Pattern; 4] = [Pattern::A, Pattern::B, Pattern::C, Pattern::D];
}

/// Qubit index of grid site `(r, c)` along the boustrophedon path.
pub fn snake_index(cols: usize, r: usize, c: usize) -> usize {
    if r % 2 == 0 {
        r * cols + c
    } else {
        r * cols + (cols - 1 - c)
    }
}

/// Most square `rows × cols` factorization of `l` with `rows ≤ cols`.
pub fn grid_shape(l: usize) -> (usize, usize) {
    let mut rows = (l as f64).sqrt() as usize;
    while rows > 1 && l % rows != 0 {
        rows -= 1;
    }
    let rows = rows.max(1);
    (rows, l / rows)
}

/// Qubit pairs of one pattern, in snake indices. The first entry is the control.
pub fn pattern_pairs(rows: usize, cols: usize, pattern: Pattern) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let other = match pattern {
                Pattern::A if c % 2 == 0 && c + 1 < cols => Some((r, c + 1)),
                Pattern::B if c % 2 == 1 && c + 1 < cols => Some((r, c + 1)),
                Pattern::C if r % 2 == 0 && r + 1 < rows => Some((r + 1, c)),
                Pattern::D if r % 2 == 1 && r + 1 < rows => Some((r + 1, c)),
                _ => None,
            };
            if let Some((r2, c2)) = other {
                out.push((snake_index(cols, r, c), snake_index(cols, r2, c2)));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCircuit {
    pub rows: usize,
    pub cols: usize,
    pub entangler: Entangler,
    /// `one_qubit[cycle][qubit]`.
    pub one_qubit: Vec<Vec<OneQubitGate>>,
}

impl GridCircuit {
    /// Draws one-qubit gates uniformly, never repeating a site's gate in consecutive cycles.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, depth: usize, entangler: Entangler, rng: &mut R) -> Self {
        let n = rows * cols;
        let mut one_qubit: Vec<Vec<OneQubitGate>> = Vec::with_capacity(depth);
        for k in 0..depth {
            let layer = (0..n)
                .map(|q| match k {
                    0 => OneQubitGate::ALL[rng.gen_range(0..3)],
                    _ => {
                        let prev = one_qubit[k - 1][q];
                        let others: Vec<_> = OneQubitGate::ALL.into_iter().filter(|&g| g != prev).collect();
                        others[rng.gen_range(0..2)]
                    }
                })
                .collect();
            one_qubit.push(layer);
        }
        Self { rows, cols, entangler, one_qubit }
    }

    pub fn depth(&self) -> usize {
        self.one_qubit.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.rows * self.cols
    }
}

/// Runs the circuit on `|0…0⟩`, skipping every gate that touches `excluded`.
pub fn run_grid_circuit(grid: &GridCircuit, excluded: Option<usize>) -> Result<DenseState> {
    let n = grid.n_qubits();
    if let Some(x) = excluded {
        if x >= n {
            return Err(Error::QubitOutOfRange { index: x, n });
        }
    }
    let mut s = DenseState::new_zero(n)?;
    let ent = grid.entangler.matrix();
    let mats: Vec<M2> = OneQubitGate::ALL.iter().map(|g| g.matrix()).collect();
    for (k, layer) in grid.one_qubit.iter().enumerate() {
        for (q, g) in layer.iter().enumerate() {
            if Some(q) != excluded {
                s.apply_one_unchecked(q, &mats[*g as usize]);
            }
        }
        for (a, b) in pattern_pairs(grid.rows, grid.cols, Pattern::CYCLE[k % 4]) {
            if Some(a) != excluded && Some(b) != excluded {
                s.apply_two_unchecked(a, b, &ent);
            }
        }
    }
    Ok(s)
}

/// Draws a grid circuit and runs it.
pub fn random_grid_state<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    depth: usize,
    entangler: Entangler,
    excluded: Option<usize>,
    rng: &mut R,
) -> Result<DenseState> {
    let grid = GridCircuit::random(rows, cols, depth, entangler, rng);
    run_grid_circuit(&grid, excluded)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PorterThomas {
    /// `(bin centre of D·z, empirical density)`.
    pub histogram: Vec<(f64, f64)>,
    pub ks_distance: f64,
}

/// KS distance of the probabilities `z` (pooled over any number of states of
/// dimension `dim`) from `p(z) = (D−1)(1−z)^{D−2}`.
pub fn porter_thomas_test(z: &[f64], dim: usize) -> PorterThomas {
    let d = dim as f64;
    let cdf = |x: f64| 1.0 - (1.0 - x.clamp(0.0, 1.0)).powf(d - 1.0);
    let mut sorted = z.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut ks: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        ks = ks.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    let (bins, width) = (40usize, 0.25);
    let mut counts = vec![0usize; bins];
    for &x in z {
        let b = (x * d / width) as usize;
        if b < bins {
            counts[b] += 1;
        }
    }
    let histogram = counts
        .iter()
        .enumerate()
        .map(|(b, &c)| ((b as f64 + 0.5) * width, c as f64 / (n * width)))
        .collect();
    PorterThomas { histogram, ks_distance: ks }
}

/// `−(1/N) Σ ln p(k)` over sampled indices.
pub fn xeb(samples: &[usize], ideal_probs: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("no samples".into()));
    }
    let bits = ideal_probs.len().max(2).trailing_zeros() as usize;
    let mut acc = 0.0;
    for &k in samples {
        let p = ideal_probs.get(k).copied().unwrap_or(0.0);
        if p <= 0.0 {
            return Err(Error::ZeroProbability { bitstring: format!("{:0width$b}", k, width = bits) });
        }
        acc -= p.ln();
    }
    Ok(acc / samples.len() as f64)
}
