//! Fixed-size complex matrix helpers for one- and two-qubit operators.

use num_complex::Complex64;

pub type M2 = [[Complex64; 2]; 2];
pub type M4 = [[Complex64; 4]; 4];

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn m2_identity() -> M2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn m4_identity() -> M4 {
    let mut m = [[ZERO; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn m2_mul(a: &M2, b: &M2) -> M2 {
    let mut c = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn m4_mul(a: &M4, b: &M4) -> M4 {
    let mut c = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

pub fn m2_dagger(a: &M2) -> M2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn m4_dagger(a: &M4) -> M4 {
    let mut c = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = a[j][i].conj();
        }
    }
    c
}

/// `a ⊗ b`: `a` acts on the high (first) local bit.
pub fn kron(a: &M2, b: &M2) -> M4 {
    let mut c = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = a[i >> 1][j >> 1] * b[i & 1][j & 1];
        }
    }
    c
}

pub fn m2_approx_eq(a: &M2, b: &M2, tol: f64) -> bool {
    a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).norm() <= tol)
}

pub fn m4_approx_eq(a: &M4, b: &M4, tol: f64) -> bool {
    a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).norm() <= tol)
}

/// Equality up to a global phase, for vectors or flattened matrices.
pub fn eq_up_to_phase(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let Some((k, _)) = a
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
    else {
        return true;
    };
    if b[k].norm() < tol {
        return a.iter().chain(b).all(|z| z.norm() <= tol);
    }
    let phase = a[k] / b[k];
    if (phase.norm() - 1.0).abs() > tol.sqrt().max(tol) {
        return false;
    }
    a.iter().zip(b).all(|(x, y)| (x - phase * y).norm() <= tol)
}

pub fn flatten2(m: &M2) -> [Complex64; 4] {
    [m[0][0], m[0][1], m[1][0], m[1][1]]
}

pub fn flatten4(m: &M4) -> Vec<Complex64> {
    m.iter().flatten().copied().collect()
}

pub fn m2_apply(m: &M2, v: [Complex64; 2]) -> [Complex64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

pub fn m4_apply(m: &M4, v: &[Complex64; 4]) -> [Complex64; 4] {
    let mut out = [ZERO; 4];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..4).map(|k| m[i][k] * v[k]).sum();
    }
    out
}

/// Max deviation of `m† m` from the identity.
pub fn unitarity_defect(m: &[Vec<Complex64>]) -> f64 {
    let n = m.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let s: Complex64 = (0..n).map(|k| m[k][i].conj() * m[k][j]).sum();
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((s - target).norm());
        }
    }
    worst
}
