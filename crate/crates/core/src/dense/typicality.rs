//! Trace estimation with random states and infinite-temperature spin
//! correlations `C_{ℓ,ℓ'}(t) = tr[Sᶻ_ℓ(t) Sᶻ_ℓ'] / 2^L`.
//!
//! Typicality estimate: `|ψ⟩ = |↑⟩_ℓ' ⊗ R|0⟩` with `R` a deep grid circuit
//! on the other sites, then `C ≈ ½⟨ψ(t)|Sᶻ_ℓ|ψ(t)⟩`. The global spin flip
//! maps the `↓_ℓ'` half of the trace onto the `↑_ℓ'` half.

use super::grid::{run_grid_circuit, Entangler, GridCircuit};
use super::heisenberg::{apply_hamiltonian, imaginary_time_evolve, trotter_evolve, HeisenbergChain};
use super::{gaussian_state, DenseState};
use crate::error::{Error, Result};
use crate::monitored::mean_stderr;
use crate::rng::{rng_from_seed, trajectory_seed};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// An operator given by its action on states.
pub type Applier<'a> = dyn Fn(&DenseState) -> DenseState + Sync + 'a;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

/// `Sᶻ` on one site.
pub fn sz(site: usize) -> impl Fn(&DenseState) -> DenseState + Sync {
    move |s: &DenseState| {
        let mut out = s.clone();
        let bit = 1usize << site;
        for (x, a) in out.amplitudes_mut().iter_mut().enumerate() {
            *a *= if x & bit == 0 { 0.5 } else { -0.5 };
        }
        out
    }
}

/// `S_i · S_{i+1}`.
pub fn bond_energy(i: usize) -> impl Fn(&DenseState) -> DenseState + Sync {
    move |s: &DenseState| {
        let (bi, bj) = (1usize << i, 1usize << (i + 1));
        let amps = s.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for (x, a) in amps.iter().enumerate() {
            if (x & bi == 0) == (x & bj == 0) {
                out[x] += a * 0.25;
            } else {
                out[x] -= a * 0.25;
                out[x ^ bi ^ bj] += a * 0.5;
            }
        }
        DenseState::from_amplitudes(out).expect("same size")
    }
}

/// `D·⟨ψ|O|ψ⟩/⟨ψ|ψ⟩` averaged over Gaussian random states.
pub fn typicality_trace<R: Rng + ?Sized>(obs: &Applier, n: usize, n_samples: usize, rng: &mut R) -> Result<Estimate> {
    if n_samples == 0 {
        return Err(Error::InsufficientData("no samples".into()));
    }
    let mut vals = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let psi = gaussian_state(n, rng)?;
        let d = psi.dim() as f64;
        vals.push(d * psi.inner(&obs(&psi)).re / psi.norm_sqr());
    }
    let (mean, stderr) = mean_stderr(&vals);
    Ok(Estimate { mean, stderr, n: n_samples })
}

/// Ratio-of-sums estimate with a jackknife standard error.
fn ratio_estimate(num: &[f64], den: &[f64]) -> Estimate {
    let (sn, sd): (f64, f64) = (num.iter().sum(), den.iter().sum());
    let n = num.len();
    let mean = sn / sd;
    let stderr = if n < 2 {
        f64::NAN
    } else {
        let loo: Vec<f64> = (0..n).map(|k| (sn - num[k]) / (sd - den[k])).collect();
        let m = loo.iter().sum::<f64>() / n as f64;
        ((n - 1) as f64 / n as f64 * loo.iter().map(|v| (v - m).powi(2)).sum::<f64>()).sqrt()
    };
    Estimate { mean, stderr, n }
}

const DBETA: f64 = 0.05;

fn thermal_vector<R: Rng + ?Sized>(chain: &HeisenbergChain, beta: f64, rng: &mut R) -> Result<DenseState> {
    if !(beta >= 0.0) {
        return Err(Error::InvalidConfig(format!("inverse temperature {beta} must be ≥ 0")));
    }
    let mut psi = gaussian_state(chain.l, rng)?;
    imaginary_time_evolve(&mut psi, chain, beta / 2.0, DBETA / 2.0)?;
    Ok(psi)
}

/// `⟨O⟩_β ≈ Σ⟨ψ_β|O|ψ_β⟩ / Σ⟨ψ_β|ψ_β⟩` with `|ψ_β⟩ = e^{−βH/2}|ψ⟩`.
/// The statistical error shrinks like `1/√d_eff` per sample.
pub fn thermal_typicality<R: Rng + ?Sized>(
    chain: &HeisenbergChain,
    beta: f64,
    obs: &Applier,
    n_samples: usize,
    rng: &mut R,
) -> Result<Estimate> {
    if n_samples == 0 {
        return Err(Error::InsufficientData("no samples".into()));
    }
    let (mut num, mut den) = (Vec::new(), Vec::new());
    for _ in 0..n_samples {
        let psi = thermal_vector(chain, beta, rng)?;
        num.push(psi.inner(&obs(&psi)).re);
        den.push(psi.norm_sqr());
    }
    Ok(ratio_estimate(&num, &den))
}

/// `⟨O₁(t) O₂⟩_β` at each time: `Σ⟨ψ_β(t)|O₁|φ_β(t)⟩ / Σ⟨ψ_β|ψ_β⟩` with
/// `|φ_β(t)⟩ = e^{−iHt} O₂ |ψ_β⟩`. Times must be non-decreasing multiples of `dt`.
pub fn two_point_typicality<R: Rng + ?Sized>(
    chain: &HeisenbergChain,
    beta: f64,
    o1: &Applier,
    o2: &Applier,
    times: &[f64],
    n_samples: usize,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if n_samples == 0 {
        return Err(Error::InsufficientData("no samples".into()));
    }
    check_times(times)?;
    let mut num = vec![Complex64::new(0.0, 0.0); times.len()];
    let mut den = 0.0;
    for _ in 0..n_samples {
        let mut psi = thermal_vector(chain, beta, rng)?;
        den += psi.norm_sqr();
        let mut phi = o2(&psi);
        let mut now = 0.0;
        for (k, &t) in times.iter().enumerate() {
            trotter_evolve(&mut psi, chain, t - now)?;
            trotter_evolve(&mut phi, chain, t - now)?;
            now = t;
            num[k] += psi.inner(&o1(&phi));
        }
    }
    Ok(num.into_iter().map(|v| v / den).collect())
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.first().is_some_and(|&t| t < 0.0) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidConfig("times must be non-negative and non-decreasing".into()));
    }
    Ok(())
}

/// Correlation profiles from typicality: `profiles[r][k][ℓ]` for realization `r`, time `k`, site `ℓ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypicalityRun {
    pub times: Vec<f64>,
    pub source: usize,
    pub profiles: Vec<Vec<Vec<f64>>>,
}

impl TypicalityRun {
    /// Realization-averaged `C_{ℓ,source}(t_k)` as `[k][ℓ]`.
    pub fn mean_profile(&self) -> Vec<Vec<f64>> {
        let r = self.profiles.len() as f64;
        let mut out = vec![vec![0.0; self.profiles[0][0].len()]; self.times.len()];
        for p in &self.profiles {
            for (o, row) in out.iter_mut().zip(p) {
                for (a, b) in o.iter_mut().zip(row) {
                    *a += b / r;
                }
            }
        }
        out
    }

    pub fn site_series(&self, realization: usize, site: usize) -> Vec<f64> {
        self.profiles[realization].iter().map(|row| row[site]).collect()
    }

    pub fn mean_series(&self, site: usize) -> Vec<f64> {
        self.mean_profile().iter().map(|row| row[site]).collect()
    }
}

fn local_profile(s: &DenseState) -> Vec<f64> {
    // ½⟨Sᶻ_ℓ⟩ = ¼⟨σᶻ_ℓ⟩
    let n = s.n();
    let norm = s.norm_sqr();
    let mut out = vec![0.0; n];
    for (x, a) in s.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        for (q, o) in out.iter_mut().enumerate() {
            *o += if x >> q & 1 == 0 { p } else { -p };
        }
    }
    out.into_iter().map(|v| 0.25 * v / norm).collect()
}

fn evolve_profiles(mut s: DenseState, chain: &HeisenbergChain, times: &[f64]) -> Result<Vec<Vec<f64>>> {
    let mut now = 0.0;
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        trotter_evolve(&mut s, chain, t - now)?;
        now = t;
        rows.push(local_profile(&s));
    }
    Ok(rows)
}

/// Typicality estimate of `C_{ℓ,source}(t)` for every `ℓ`, one grid circuit
/// of depth `depth` per realization. Realization `r` uses `trajectory_seed(seed, r)`.
pub fn typicality_correlation(
    chain: &HeisenbergChain,
    source: usize,
    depth: usize,
    times: &[f64],
    n_realizations: usize,
    seed: u64,
) -> Result<TypicalityRun> {
    chain.validate()?;
    check_times(times)?;
    if source >= chain.l {
        return Err(Error::QubitOutOfRange { index: source, n: chain.l });
    }
    if n_realizations == 0 {
        return Err(Error::InsufficientData("no realizations".into()));
    }
    let profiles = (0..n_realizations as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_from_seed(trajectory_seed(seed, r));
            let grid = GridCircuit::random(chain.rows, chain.cols, depth, Entangler::Cz, &mut rng);
            let s = run_grid_circuit(&grid, Some(source))?;
            evolve_profiles(s, chain, times)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TypicalityRun { times: times.to_vec(), source, profiles })
}

/// Exact trace `C_{ℓ,source}(t)` as `[k][ℓ]`, evolving every basis state with `source` up.
pub fn exact_correlation(chain: &HeisenbergChain, source: usize, times: &[f64]) -> Result<Vec<Vec<f64>>> {
    chain.validate()?;
    check_times(times)?;
    if source >= chain.l {
        return Err(Error::QubitOutOfRange { index: source, n: chain.l });
    }
    let dim = 1usize << chain.l;
    let ups: Vec<usize> = (0..dim).filter(|x| x >> source & 1 == 0).collect();
    let parts = ups
        .par_iter()
        .map(|&x| evolve_profiles(DenseState::basis(chain.l, x)?, chain, times))
        .collect::<Result<Vec<_>>>()?;
    // each basis profile carries ¼⟨σᶻ⟩ = ½⟨Sᶻ⟩; C = 2^{-L} · 2 · Σ_↑ ⟨Sᶻ⟩ · ½ = 2^{-L} Σ_↑ ⟨Sᶻ⟩
    let scale = 2.0 / dim as f64;
    let mut out = vec![vec![0.0; chain.l]; times.len()];
    for part in &parts {
        for (o, row) in out.iter_mut().zip(part) {
            for (a, b) in o.iter_mut().zip(row) {
                *a += scale * b;
            }
        }
    }
    Ok(out)
}

/// Born-sampled estimate of `⟨Sᶻ_site⟩ = ½(f↑ − f↓)` from `n_s` bitstrings.
pub fn sample_and_reconstruct<R: Rng + ?Sized>(state: &DenseState, site: usize, n_s: usize, rng: &mut R) -> Result<f64> {
    if site >= state.n() {
        return Err(Error::QubitOutOfRange { index: site, n: state.n() });
    }
    if n_s == 0 {
        return Err(Error::InsufficientData("no samples".into()));
    }
    let up = state.sample(n_s, rng).iter().filter(|&&k| k >> site & 1 == 0).count() as f64;
    let n = n_s as f64;
    Ok(0.5 * (up / n - (n - up) / n))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportProfile {
    /// Times with `t > 0` at which the exponents are evaluated.
    pub times: Vec<f64>,
    pub sigma2: Vec<f64>,
    /// `−d ln C̃_{source,source} / d ln t` on the normalized profile.
    pub alpha: Vec<f64>,
    /// `d ln Σ² / d ln t`.
    pub beta_transport: Vec<f64>,
}

/// Spread of a correlation profile `[k][ℓ]` released at `source`.
pub fn transport_profile(times: &[f64], profile: &[Vec<f64>], source: usize) -> Result<TransportProfile> {
    if times.len() != profile.len() {
        return Err(Error::InvalidConfig("times and profile rows differ in length".into()));
    }
    let mut ts = Vec::new();
    let mut sigma2 = Vec::new();
    let mut auto = Vec::new();
    for (k, (&t, row)) in times.iter().zip(profile).enumerate() {
        let total: f64 = row.iter().sum();
        if total.abs() < 1e-12 {
            return Err(Error::VanishingNormalization(k));
        }
        let w: Vec<f64> = row.iter().map(|c| c / total).collect();
        let m1: f64 = w.iter().enumerate().map(|(l, c)| l as f64 * c).sum();
        let m2: f64 = w.iter().enumerate().map(|(l, c)| (l as f64).powi(2) * c).sum();
        if t > 0.0 {
            ts.push(t);
            sigma2.push(m2 - m1 * m1);
            auto.push(w[source]);
        }
    }
    // undefined exponents (a non-positive series) come back as NaN
    let slope = |ys: &[f64]| match crate::scaling::log_derivative(&ts, ys) {
        Ok(v) => v,
        Err(Error::NonPositive { .. }) | Err(Error::InsufficientData(_)) => vec![f64::NAN; ts.len()],
        Err(e) => panic!("{e}"),
    };
    let alpha = slope(&auto).into_iter().map(|a| -a).collect();
    let beta_transport = slope(&sigma2);
    Ok(TransportProfile { times: ts, sigma2, alpha, beta_transport })
}

/// `H|ψ⟩` for the chain, for use as an observable.
pub fn hamiltonian(l: usize) -> impl Fn(&DenseState) -> DenseState + Sync {
    move |s: &DenseState| apply_hamiltonian(s, l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::hamiltonian_matrix;
    use approx::assert_abs_diff_eq;

    #[test]
    fn trace_of_simple_operators() {
        let mut rng = rng_from_seed(1);
        let id = |s: &DenseState| s.clone();
        let e = typicality_trace(&id, 6, 5, &mut rng).unwrap();
        assert_abs_diff_eq!(e.mean, 64.0, epsilon = 1e-9);
        let z = typicality_trace(&sz(3), 12, 200, &mut rng).unwrap();
        assert!(z.mean.abs() < 3.0 * z.stderr, "{z:?}");
        let proj = |s: &DenseState| {
            let mut o = DenseState::new_zero(s.n()).unwrap();
            o.amplitudes_mut()[0] = s.amplitudes()[0];
            o
        };
        let p = typicality_trace(&proj, 8, 2000, &mut rng).unwrap();
        assert!((p.mean - 1.0).abs() < 3.0 * p.stderr, "{p:?}");
    }

    #[test]
    fn initial_correlations() {
        let chain = HeisenbergChain::new(8);
        let ex = exact_correlation(&chain, 2, &[0.0]).unwrap();
        for (l, c) in ex[0].iter().enumerate() {
            assert_abs_diff_eq!(*c, if l == 2 { 0.25 } else { 0.0 }, epsilon = 1e-14);
        }
        let run = typicality_correlation(&chain, 2, 20, &[0.0], 1, 0).unwrap();
        assert_abs_diff_eq!(run.profiles[0][0][2], 0.25, epsilon = 1e-12);
    }

    #[test]
    fn exact_correlation_sum_rule() {
        let chain = HeisenbergChain::new(8);
        let ex = exact_correlation(&chain, 0, &[0.0, 1.0, 2.5]).unwrap();
        for row in &ex {
            assert_abs_diff_eq!(row.iter().sum::<f64>(), 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn reconstruction_from_samples() {
        let mut rng = rng_from_seed(2);
        let up = DenseState::new_zero(5).unwrap();
        assert_eq!(sample_and_reconstruct(&up, 3, 17, &mut rng).unwrap(), 0.5);
        let s = crate::dense::haar_state(6, &mut rng).unwrap();
        let want = 0.5 * s.expectation_z(1).unwrap();
        let got = sample_and_reconstruct(&s, 1, 200_000, &mut rng).unwrap();
        assert!((got - want).abs() < 5.0 * 0.5 / (200_000f64).sqrt());
    }

    fn exact_thermal(l: usize, beta: f64, op: &Applier) -> f64 {
        let h = hamiltonian_matrix(l).unwrap();
        let eig = nalgebra::SymmetricEigen::new(h);
        let dim = 1 << l;
        let (mut num, mut z) = (0.0, 0.0);
        for k in 0..dim {
            let w = (-beta * eig.eigenvalues[k]).exp();
            let v: Vec<Complex64> = eig.eigenvectors.column(k).iter().map(|&x| Complex64::new(x, 0.0)).collect();
            let s = DenseState::from_amplitudes(v).unwrap();
            num += w * s.inner(&op(&s)).re;
            z += w;
        }
        num / z
    }

    #[test]
    fn thermal_bond_energy_matches_diagonalization() {
        let l = 8;
        let chain = HeisenbergChain::new(l);
        let op = bond_energy(3);
        let want = exact_thermal(l, 1.0, &op);
        let got = thermal_typicality(&chain, 1.0, &op, 100, &mut rng_from_seed(3)).unwrap();
        assert!((got.mean - want).abs() < 3.0 * got.stderr + 2e-3, "{got:?} vs {want}");
    }

    #[test]
    fn beta_zero_reduces_to_trace() {
        let chain = HeisenbergChain::new(6);
        let op = bond_energy(2);
        let a = thermal_typicality(&chain, 0.0, &op, 1, &mut rng_from_seed(4)).unwrap();
        let b = typicality_trace(&op, 6, 1, &mut rng_from_seed(4)).unwrap();
        assert_abs_diff_eq!(a.mean, b.mean / 64.0, epsilon = 1e-12);
        assert!(thermal_typicality(&chain, -1.0, &op, 1, &mut rng_from_seed(4)).is_err());
    }

    #[test]
    fn large_beta_approaches_ground_state() {
        let l = 4;
        let chain = HeisenbergChain::new(l);
        let e0 = nalgebra::SymmetricEigen::new(hamiltonian_matrix(l).unwrap()).eigenvalues.min();
        let h = hamiltonian(l);
        let e = thermal_typicality(&chain, 40.0, &h, 4, &mut rng_from_seed(5)).unwrap();
        assert!((e.mean - e0).abs() < 1e-3, "{} vs {e0}", e.mean);
    }

    #[test]
    fn two_point_limits() {
        let l = 8;
        let chain = HeisenbergChain::new(l);
        let id = |s: &DenseState| s.clone();
        let op = bond_energy(1);
        let mut r1 = rng_from_seed(6);
        let mut r2 = rng_from_seed(6);
        let tp = two_point_typicality(&chain, 0.7, &op, &id, &[0.0, 1.0], 3, &mut r1).unwrap();
        let th = thermal_typicality(&chain, 0.7, &op, 3, &mut r2).unwrap();
        assert_abs_diff_eq!(tp[0].re, th.mean, epsilon = 1e-12);
        // t = 0 against diagonalization of O₁O₂
        let o1 = sz(2);
        let o2 = sz(3);
        let prod = |s: &DenseState| o1(&o2(s));
        let want = exact_thermal(l, 0.5, &prod);
        let got: Vec<f64> = (0..5)
            .map(|k| two_point_typicality(&chain, 0.5, &o1, &o2, &[0.0], 40, &mut rng_from_seed(10 + k)).unwrap()[0].re)
            .collect();
        let (m, se) = mean_stderr(&got);
        assert!((m - want).abs() < 3.0 * se + 2e-3, "{m} ± {se} vs {want}");
    }

    #[test]
    fn transport_limits() {
        let times = [0.0, 1.0, 2.0, 4.0];
        let delta: Vec<Vec<f64>> = times.iter().map(|_| vec![0.25, 0.0, 0.0]).collect();
        let tp = transport_profile(&times, &delta, 0).unwrap();
        assert!(tp.sigma2.iter().all(|&s| s == 0.0));
        assert!(tp.beta_transport.iter().all(|b| b.is_nan()));
        // Gaussian spreading with Σ² ∝ t
        let sites = 41;
        let gauss: Vec<Vec<f64>> = times
            .iter()
            .map(|&t| {
                let var = (t + 1e-9) * 1.5;
                (0..sites).map(|l| (-((l as f64 - 20.0).powi(2)) / (2.0 * var)).exp()).collect()
            })
            .collect();
        let tp = transport_profile(&times, &gauss, 20).unwrap();
        assert!(tp.beta_transport.iter().all(|b| (b - 1.0).abs() < 1e-3), "{:?}", tp.beta_transport);
        assert!(tp.alpha.iter().all(|a| (a - 0.5).abs() < 1e-3), "{:?}", tp.alpha);
        let zero = vec![vec![0.0; 3]; 4];
        assert_eq!(transport_profile(&times, &zero, 0), Err(Error::VanishingNormalization(0)));
    }
}
