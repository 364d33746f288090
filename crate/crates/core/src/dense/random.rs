//! Random states and Haar-random unitaries.

use super::DenseState;
use crate::error::Result;
use crate::linalg::M4;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Unnormalized state whose real and imaginary parts are i.i.d. standard normals.
pub fn gaussian_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<DenseState> {
    let mut s = DenseState::new_zero(n)?;
    for a in s.amplitudes_mut() {
        *a = gaussian(rng);
    }
    Ok(s)
}

/// Haar-random pure state (normalized Gaussian vector).
pub fn haar_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<DenseState> {
    let mut s = gaussian_state(n, rng)?;
    s.normalize()?;
    Ok(s)
}

/// Haar-random `dim × dim` unitary, as rows.
///
/// Gram-Schmidt on the columns of a complex Gaussian matrix. This is QR with
/// a positive-diagonal `R`, which is the phase fix that makes the result
/// Haar-distributed.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Vec<Complex64>> {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
        // two passes keep the columns orthogonal to machine precision
        for _ in 0..2 {
            for c in &cols {
                let proj: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, a) in v.iter_mut().zip(c) {
                    *x -= proj * a;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        for x in &mut v {
            *x /= norm;
        }
        cols.push(v);
    }
    (0..dim).map(|i| (0..dim).map(|j| cols[j][i]).collect()).collect()
}

pub fn haar_unitary4<R: Rng + ?Sized>(rng: &mut R) -> M4 {
    let u = haar_unitary(4, rng);
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        m[i].copy_from_slice(&u[i]);
    }
    m
}
