//! Test-side oracles: explicit gate matrices written independently of the
//! library tables, and a driver that runs one random Clifford circuit on
//! both engines.
#![allow(dead_code)]

use circlab_core::clifford::{Gen1, Gen2};
use circlab_core::dense::DenseState;
use circlab_core::{CliffordOne, CliffordTwo, GraphState, PauliKind, Sign};
use num_complex::Complex64;
use rand::Rng;

pub type Mat = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> Mat {
    (0..d).map(|i| (0..d).map(|j| c((i == j) as u8 as f64, 0.0)).collect()).collect()
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

pub fn dagger(a: &Mat) -> Mat {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].conj()).collect()).collect()
}

/// `a ⊗ b` with `a` as the first (high-bit) factor.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (na, nb) = (a.len(), b.len());
    (0..na * nb)
        .map(|i| (0..na * nb).map(|j| a[i / nb][j / nb] * b[i % nb][j % nb]).collect())
        .collect()
}

pub fn pauli(k: PauliKind) -> Mat {
    match k {
        PauliKind::I => identity(2),
        PauliKind::X => vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]],
        PauliKind::Y => vec![vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]],
        PauliKind::Z => vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]],
    }
}

pub fn hadamard() -> Mat {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![vec![c(h, 0.0), c(h, 0.0)], vec![c(h, 0.0), c(-h, 0.0)]]
}

pub fn phase_s() -> Mat {
    vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 1.0)]]
}

pub fn cz() -> Mat {
    let mut m = identity(4);
    m[3][3] = c(-1.0, 0.0);
    m
}

pub fn gen1(g: Gen1) -> Mat {
    match g {
        Gen1::H => hadamard(),
        Gen1::S => phase_s(),
    }
}

pub fn gen2(g: Gen2) -> Mat {
    let id = identity(2);
    match g {
        Gen2::H1 => kron(&hadamard(), &id),
        Gen2::H2 => kron(&id, &hadamard()),
        Gen2::S1 => kron(&phase_s(), &id),
        Gen2::S2 => kron(&id, &phase_s()),
        Gen2::Cz => cz(),
    }
}

/// Product of a word, first letter applied first.
pub fn word_unitary<G: Copy>(word: &[G], d: usize, f: impl Fn(G) -> Mat) -> Mat {
    word.iter().fold(identity(d), |m, &g| mul(&f(g), &m))
}

pub fn approx_eq(a: &Mat, b: &Mat, tol: f64) -> bool {
    a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).norm() <= tol)
}

pub fn scaled(a: &Mat, s: f64) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

/// `U† P U == sign · (k0 ⊗ k1)` for every generator image of a two-qubit element.
pub fn two_qubit_word_is_consistent(g: CliffordTwo) -> bool {
    let u = word_unitary(g.word(), 4, gen2);
    if !approx_eq(&mul(&dagger(&u), &u), &identity(4), 1e-12) {
        return false;
    }
    let id = identity(2);
    let gens = [
        kron(&pauli(PauliKind::X), &id),
        kron(&pauli(PauliKind::Z), &id),
        kron(&id, &pauli(PauliKind::X)),
        kron(&id, &pauli(PauliKind::Z)),
    ];
    g.action().iter().zip(&gens).all(|(&(sign, k0, k1), p)| {
        let lhs = mul(&dagger(&u), &mul(p, &u));
        let rhs = scaled(&kron(&pauli(k0), &pauli(k1)), if sign == Sign::Plus { 1.0 } else { -1.0 });
        approx_eq(&lhs, &rhs, 1e-12)
    })
}

pub fn one_qubit_word_is_consistent(g: CliffordOne) -> bool {
    let u = word_unitary(g.word(), 2, gen1);
    let [ix, iz] = g.action();
    [(PauliKind::X, ix), (PauliKind::Z, iz)].iter().all(|&(k, img)| {
        let lhs = mul(&dagger(&u), &mul(&pauli(k), &u));
        let rhs = scaled(&pauli(img.kind), img.sign.value() as f64);
        approx_eq(&lhs, &rhs, 1e-12)
    })
}

pub struct CircuitCheck {
    pub amplitudes_match: bool,
    pub max_born_error: f64,
    pub entropy_mismatches: usize,
    pub cuts_checked: usize,
}

/// Runs one random circuit of one-qubit, two-qubit and Z-measurement steps on
/// both engines and compares them.
pub fn random_circuit_check<R: Rng>(n: usize, gates: usize, rng: &mut R) -> CircuitCheck {
    let mut g = GraphState::new_zero_state(n).unwrap();
    let mut d = DenseState::new_zero(n).unwrap();
    let mut max_born_error: f64 = 0.0;
    for _ in 0..gates {
        match rng.gen_range(0..10) {
            0..=3 => {
                let q = rng.gen_range(0..n);
                let c = CliffordOne::from_index(rng.gen_range(0..24)).unwrap();
                g.apply_one_qubit(q, c).unwrap();
                d.apply_one(q, &c.matrix()).unwrap();
            }
            4..=8 if n > 1 => {
                let a = rng.gen_range(0..n);
                let b = (a + rng.gen_range(1..n)) % n;
                let c = CliffordTwo::from_index(rng.gen_range(0..11520)).unwrap();
                g.apply_two_qubit(a, b, c).unwrap();
                d.apply_two(a, b, &c.matrix()).unwrap();
            }
            _ => {
                let q = rng.gen_range(0..n);
                let out = g.measure_z(q, rng).unwrap();
                let bit = if out.value == 1 { 0 } else { 1 };
                let p = d.project(q, bit).unwrap();
                max_born_error = max_born_error.max((p - out.born_probability).abs());
            }
        }
    }
    let sv = g.to_statevector().unwrap();
    let amplitudes_match = circlab_core::linalg::eq_up_to_phase(&sv, d.amplitudes(), 1e-10);
    let mut cuts: Vec<Vec<usize>> = (1..n).map(|k| (0..k).collect()).collect();
    for _ in 0..4 {
        let s: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        cuts.push(s);
    }
    let mut entropy_mismatches = 0;
    for cut in &cuts {
        let exact = d.entropy_bits(cut).unwrap();
        let stab = g.entanglement_entropy_bits(cut) as f64;
        if (exact - stab).abs() > 1e-8 {
            entropy_mismatches += 1;
        }
    }
    CircuitCheck { amplitudes_match, max_born_error, entropy_mismatches, cuts_checked: cuts.len() }
}
