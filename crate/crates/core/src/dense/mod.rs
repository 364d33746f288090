//! Dense statevector engine.
//!
//! Qubit `q` is bit `q` of the amplitude index (little-endian). For a
//! two-qubit gate on targets `[a, b]` the local 4×4 index is
//! `2·bit(a) + bit(b)`, so `a` is the first tensor factor. `|0⟩` is spin up.

mod grid;
mod haar;
mod heisenberg;
mod random;
mod typicality;

pub use grid::{
    grid_shape, pattern_pairs, porter_thomas_test, random_grid_state, run_grid_circuit, snake_index, xeb, Entangler,
    GridCircuit, OneQubitGate, Pattern, PorterThomas,
};
pub use haar::{monitored_haar_ensemble, monitored_haar_run, HaarConfig, HaarRecord, MAX_HAAR_SITES};
pub use heisenberg::{
    bond_propagator, exact_evolve, hamiltonian_matrix, imaginary_time_evolve, trotter_evolve, HeisenbergChain,
    TrotterOrder,
};
pub use random::{gaussian_state, haar_state, haar_unitary, haar_unitary4};
pub use typicality::{
    bond_energy, exact_correlation, sample_and_reconstruct, sz, thermal_typicality, transport_profile,
    hamiltonian, two_point_typicality, typicality_correlation, typicality_trace, Applier, Estimate, TransportProfile,
    TypicalityRun,
};

use crate::error::{Error, Result};
use crate::linalg::{unitarity_defect, M2, M4};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

pub const MAX_QUBITS: usize = 26;
/// Gates whose `U†U` deviates from the identity by more than this are rejected.
pub const UNITARITY_TOL: f64 = 1e-12;
/// Eigenvalues below this count as zero in `S₀`.
pub const RANK_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

#[inline]
fn insert_zero(x: usize, q: usize) -> usize {
    let low = x & ((1 << q) - 1);
    ((x >> q) << (q + 1)) | low
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyRegister);
    }
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
    }
    Ok(())
}

impl DenseState {
    /// `|0…0⟩`.
    pub fn new_zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_size(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::QubitOutOfRange { index, n: dim });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Wraps raw amplitudes; the length must be a power of two. No normalization.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidConfig(format!("amplitude count {dim} is not a power of two ≥ 2")));
        }
        let n = dim.trailing_zeros() as usize;
        check_size(n)?;
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`, summed in index order.
    pub fn inner(&self, other: &DenseState) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&mut self, s: Complex64) {
        for a in &mut self.amps {
            *a *= s;
        }
    }

    pub fn normalize(&mut self) -> Result<f64> {
        let norm = self.norm_sqr().sqrt();
        if norm < 1e-300 {
            return Err(Error::VanishingNormalization(0));
        }
        self.scale(Complex64::new(norm.recip(), 0.0));
        Ok(norm)
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::QubitOutOfRange { index: q, n: self.n });
        }
        Ok(())
    }

    /// Applies a `2^k × 2^k` row-major unitary to `targets` (k = 1 or 2).
    pub fn apply_gate(&mut self, matrix: &[Complex64], targets: &[usize]) -> Result<()> {
        let k = targets.len();
        if !(1..=2).contains(&k) || matrix.len() != 1 << (2 * k) {
            return Err(Error::InvalidConfig(format!(
                "{} matrix entries for {} targets",
                matrix.len(),
                k
            )));
        }
        let d = 1 << k;
        let rows: Vec<Vec<Complex64>> = matrix.chunks(d).map(|r| r.to_vec()).collect();
        let defect = unitarity_defect(&rows);
        if defect > UNITARITY_TOL {
            return Err(Error::NonUnitary(defect));
        }
        if k == 1 {
            self.check_qubit(targets[0])?;
            self.apply_one_unchecked(targets[0], &[[matrix[0], matrix[1]], [matrix[2], matrix[3]]]);
        } else {
            let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
            for (i, row) in m.iter_mut().enumerate() {
                row.copy_from_slice(&matrix[4 * i..4 * i + 4]);
            }
            self.apply_two(targets[0], targets[1], &m)?;
        }
        Ok(())
    }

    pub fn apply_one(&mut self, q: usize, m: &M2) -> Result<()> {
        self.check_qubit(q)?;
        let rows = vec![vec![m[0][0], m[0][1]], vec![m[1][0], m[1][1]]];
        let defect = unitarity_defect(&rows);
        if defect > UNITARITY_TOL {
            return Err(Error::NonUnitary(defect));
        }
        self.apply_one_unchecked(q, m);
        Ok(())
    }

    pub fn apply_two(&mut self, a: usize, b: usize, m: &M4) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::SameQubit(a));
        }
        let rows: Vec<Vec<Complex64>> = m.iter().map(|r| r.to_vec()).collect();
        let defect = unitarity_defect(&rows);
        if defect > UNITARITY_TOL {
            return Err(Error::NonUnitary(defect));
        }
        self.apply_two_unchecked(a, b, m);
        Ok(())
    }

    /// Applies any 2×2 matrix without validation (also used for non-unitary kernels).
    pub(crate) fn apply_one_unchecked(&mut self, q: usize, m: &M2) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() / 2 {
            let x0 = insert_zero(i, q);
            let x1 = x0 | bit;
            let (a0, a1) = (self.amps[x0], self.amps[x1]);
            self.amps[x0] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[x1] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    /// Applies any 4×4 matrix without validation.
    pub(crate) fn apply_two_unchecked(&mut self, a: usize, b: usize, m: &M4) {
        let (ba, bb) = (1usize << a, 1usize << b);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        for i in 0..self.amps.len() / 4 {
            let x = insert_zero(insert_zero(i, lo), hi);
            let idx = [x, x | bb, x | ba, x | ba | bb];
            let v = [self.amps[idx[0]], self.amps[idx[1]], self.amps[idx[2]], self.amps[idx[3]]];
            for (r, &k) in idx.iter().enumerate() {
                self.amps[k] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
            }
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Probability that qubit `q` reads `bit`.
    pub fn probability_of(&self, q: usize, bit: u8) -> Result<f64> {
        self.check_qubit(q)?;
        let want = (bit as usize) << q;
        let mask = 1usize << q;
        let p: f64 = self.amps.iter().enumerate().filter(|(x, _)| x & mask == want).map(|(_, a)| a.norm_sqr()).sum();
        Ok(p / self.norm_sqr())
    }

    /// Projects qubit `q` onto `bit` and renormalizes; returns the Born probability.
    pub fn project(&mut self, q: usize, bit: u8) -> Result<f64> {
        let p = self.probability_of(q, bit)?;
        if p <= 0.0 {
            return Err(Error::ZeroProbability { bitstring: format!("qubit {q} = {bit}") });
        }
        let mask = 1usize << q;
        let want = (bit as usize) << q;
        for (x, a) in self.amps.iter_mut().enumerate() {
            if x & mask != want {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        self.normalize()?;
        Ok(p)
    }

    /// Born-rule Z measurement: `+1` for `|0⟩`, `−1` for `|1⟩`.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<i8> {
        let p0 = self.probability_of(q, 0)?;
        let bit = if rng.gen::<f64>() < p0 { 0 } else { 1 };
        self.project(q, bit)?;
        Ok(if bit == 0 { 1 } else { -1 })
    }

    /// `⟨σᶻ_q⟩` (twice `⟨Sᶻ_q⟩`).
    pub fn expectation_z(&self, q: usize) -> Result<f64> {
        self.check_qubit(q)?;
        let mask = 1usize << q;
        let s: f64 = self
            .amps
            .iter()
            .enumerate()
            .map(|(x, a)| if x & mask == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum();
        Ok(s / self.norm_sqr())
    }

    /// `N_s` Born samples of full basis-state indices.
    pub fn sample<R: Rng + ?Sized>(&self, n_s: usize, rng: &mut R) -> Vec<usize> {
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let last = self.amps.len() - 1;
        (0..n_s)
            .map(|_| {
                let u = rng.gen::<f64>() * acc;
                cdf.partition_point(|&c| c <= u).min(last)
            })
            .collect()
    }

    /// `−Σ p ln p` over the computational basis (nats).
    pub fn participation_entropy(&self) -> f64 {
        let norm = self.norm_sqr();
        -self
            .amps
            .iter()
            .map(|a| a.norm_sqr() / norm)
            .filter(|&p| p > 0.0)
            .map(|p| p * p.ln())
            .sum::<f64>()
    }

    fn check_subset(&self, subset: &[usize]) -> Result<Vec<bool>> {
        let mut mark = vec![false; self.n];
        for &q in subset {
            self.check_qubit(q)?;
            if mark[q] {
                return Err(Error::OverlappingSubsets(q));
            }
            mark[q] = true;
        }
        Ok(mark)
    }

    /// Reduced density matrix of `subset`; row index bit `i` is `subset[i]`.
    pub fn reduced_density_matrix(&self, subset: &[usize]) -> Result<DMatrix<Complex64>> {
        let mark = self.check_subset(subset)?;
        let rest: Vec<usize> = (0..self.n).filter(|&q| !mark[q]).collect();
        let rho = self.gram(subset, &rest);
        Ok(rho / Complex64::new(self.norm_sqr(), 0.0))
    }

    /// `M M†` with `M[a][r] = ψ(a on rows, r on cols)`.
    fn gram(&self, rows: &[usize], cols: &[usize]) -> DMatrix<Complex64> {
        let (dr, dc) = (1usize << rows.len(), 1usize << cols.len());
        let zero = Complex64::new(0.0, 0.0);
        // row-major so each row is contiguous
        let mut m = vec![zero; dr * dc];
        for (x, a) in self.amps.iter().enumerate() {
            let r = rows.iter().enumerate().fold(0, |acc, (i, &q)| acc | ((x >> q & 1) << i));
            let c = cols.iter().enumerate().fold(0, |acc, (i, &q)| acc | ((x >> q & 1) << i));
            m[r * dc + c] = *a;
        }
        let mut rho = DMatrix::from_element(dr, dr, zero);
        for a in 0..dr {
            let ra = &m[a * dc..(a + 1) * dc];
            for b in a..dr {
                let rb = &m[b * dc..(b + 1) * dc];
                let (mut re, mut im) = (0.0, 0.0);
                for (u, v) in ra.iter().zip(rb) {
                    re += u.re * v.re + u.im * v.im;
                    im += u.im * v.re - u.re * v.im;
                }
                rho[(a, b)] = Complex64::new(re, im);
                rho[(b, a)] = Complex64::new(re, -im);
            }
        }
        rho
    }

    /// Schmidt spectrum across `subset | rest`, descending, summing to 1.
    /// Eigenvalues below [`RANK_TOL`] are roundoff and are set to zero.
    pub fn entanglement_spectrum(&self, subset: &[usize]) -> Result<Vec<f64>> {
        let mark = self.check_subset(subset)?;
        let rest: Vec<usize> = (0..self.n).filter(|&q| !mark[q]).collect();
        if subset.is_empty() || rest.is_empty() {
            return Ok(vec![1.0]);
        }
        let (small, large) = if subset.len() <= rest.len() { (subset, &rest[..]) } else { (&rest[..], subset) };
        let rho = self.gram(small, large);
        let mut lam: Vec<f64> = rho.symmetric_eigenvalues().iter().map(|&l| l.max(0.0)).collect();
        let total: f64 = lam.iter().sum();
        if total <= 0.0 {
            return Err(Error::VanishingNormalization(0));
        }
        for l in &mut lam {
            *l /= total;
            if *l < RANK_TOL {
                *l = 0.0;
            }
        }
        let kept: f64 = lam.iter().sum();
        for l in &mut lam {
            *l /= kept;
        }
        lam.sort_by(|a, b| b.total_cmp(a));
        Ok(lam)
    }

    /// Rényi entropy of order `order` in nats. `order = 1` is von Neumann,
    /// `0` counts eigenvalues above [`RANK_TOL`], `f64::INFINITY` is `−ln λ_max`.
    pub fn renyi_entropy(&self, subset: &[usize], order: f64) -> Result<f64> {
        if order.is_nan() || order < 0.0 {
            return Err(Error::InvalidConfig(format!("Rényi order {order} must be ≥ 0")));
        }
        Ok(renyi_from_spectrum(&self.entanglement_spectrum(subset)?, order))
    }

    pub fn von_neumann_entropy(&self, subset: &[usize]) -> Result<f64> {
        self.renyi_entropy(subset, 1.0)
    }

    /// Von Neumann entropy in bits.
    pub fn entropy_bits(&self, subset: &[usize]) -> Result<f64> {
        Ok(self.von_neumann_entropy(subset)? / std::f64::consts::LN_2)
    }
}

pub fn renyi_from_spectrum(lam: &[f64], order: f64) -> f64 {
    if order == 0.0 {
        (lam.iter().filter(|&&l| l > RANK_TOL).count() as f64).ln()
    } else if order == 1.0 {
        -lam.iter().filter(|&&l| l > 0.0).map(|&l| l * l.ln()).sum::<f64>()
    } else if order.is_infinite() {
        -lam.iter().cloned().fold(0.0, f64::max).ln()
    } else {
        lam.iter().filter(|&&l| l > 0.0).map(|&l| l.powf(order)).sum::<f64>().ln() / (1.0 - order)
    }
}
