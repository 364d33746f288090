//! Single-qubit Pauli operators with sign tracking.
//!
//! Phase convention: `Y = i X Z`. Internally a Pauli on one or two qubits is
//! stored in symplectic form `i^phase · Π_q X_q^{x_q} Z_q^{z_q}`, which makes
//! products exact over the phases {±1, ±i}.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliKind {
    I,
    X,
    Y,
    Z,
}

impl PauliKind {
    pub const ALL: [PauliKind; 4] = [PauliKind::I, PauliKind::X, PauliKind::Y, PauliKind::Z];

    /// (x, z) bits of the symplectic representation.
    #[inline]
    pub fn bits(self) -> (u8, u8) {
        match self {
            PauliKind::I => (0, 0),
            PauliKind::X => (1, 0),
            PauliKind::Y => (1, 1),
            PauliKind::Z => (0, 1),
        }
    }

    #[inline]
    pub fn from_bits(x: u8, z: u8) -> Self {
        match (x & 1, z & 1) {
            (0, 0) => PauliKind::I,
            (1, 0) => PauliKind::X,
            (1, 1) => PauliKind::Y,
            _ => PauliKind::Z,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i8) -> Self {
        if v < 0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// A power of `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Phase(pub u8);

impl Phase {
    pub const ONE: Phase = Phase(0);

    pub fn value(self) -> Complex64 {
        match self.0 & 3 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

/// A Hermitian single-qubit Pauli operator `±P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pauli {
    pub kind: PauliKind,
    pub sign: Sign,
}

impl Pauli {
    pub const I: Pauli = Pauli::plus(PauliKind::I);
    pub const X: Pauli = Pauli::plus(PauliKind::X);
    pub const Y: Pauli = Pauli::plus(PauliKind::Y);
    pub const Z: Pauli = Pauli::plus(PauliKind::Z);

    pub const fn new(kind: PauliKind, sign: Sign) -> Self {
        Self { kind, sign }
    }

    pub const fn plus(kind: PauliKind) -> Self {
        Self { kind, sign: Sign::Plus }
    }

    pub fn neg(self) -> Self {
        Self { kind: self.kind, sign: self.sign.flip() }
    }

    /// `self · rhs = phase · result` with `result` carrying a plus sign.
    pub fn product(self, rhs: Pauli) -> (Phase, PauliKind) {
        let w = PauliWord::from_pauli(self, 0).mul(PauliWord::from_pauli(rhs, 0));
        let kind = PauliKind::from_bits(w.x, w.z);
        let ny = (w.x & w.z & 1) as u8;
        (Phase((w.phase + 4 - ny) & 3), kind)
    }

    /// Whether the two operators commute.
    pub fn commutes_with(self, rhs: Pauli) -> bool {
        let (x1, z1) = self.kind.bits();
        let (x2, z2) = rhs.kind.bits();
        (x1 & z2) ^ (z1 & x2) == 0
    }

    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let m = match self.kind {
            PauliKind::I => [[l, o], [o, l]],
            PauliKind::X => [[o, l], [l, o]],
            PauliKind::Y => [[o, -i], [i, o]],
            PauliKind::Z => [[l, o], [o, -l]],
        };
        let s = self.sign.value() as f64;
        m.map(|r| r.map(|c| c * s))
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign == Sign::Plus { '+' } else { '-' };
        write!(f, "{s}{:?}", self.kind)
    }
}

/// `i^phase · Π_q X_q^{x_q} Z_q^{z_q}` on up to eight qubits (bit `q` of the masks).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct PauliWord {
    pub x: u8,
    pub z: u8,
    pub phase: u8,
}

impl PauliWord {
    pub const IDENTITY: PauliWord = PauliWord { x: 0, z: 0, phase: 0 };

    pub fn from_pauli(p: Pauli, qubit: u8) -> Self {
        let (x, z) = p.kind.bits();
        let sign = if p.sign == Sign::Minus { 2 } else { 0 };
        PauliWord { x: x << qubit, z: z << qubit, phase: (x & z) + sign }.normalized()
    }

    pub fn single_x(qubit: u8) -> Self {
        PauliWord { x: 1 << qubit, z: 0, phase: 0 }
    }

    pub fn single_z(qubit: u8) -> Self {
        PauliWord { x: 0, z: 1 << qubit, phase: 0 }
    }

    #[inline]
    fn normalized(mut self) -> Self {
        self.phase &= 3;
        self
    }

    #[inline]
    pub fn mul(self, rhs: PauliWord) -> PauliWord {
        let anti = (self.z & rhs.x).count_ones() as u8;
        PauliWord {
            x: self.x ^ rhs.x,
            z: self.z ^ rhs.z,
            phase: (self.phase + rhs.phase + 2 * anti) & 3,
        }
    }

    /// Hermitian words have a real overall sign once the Y factors are absorbed.
    #[cfg(test)]
    pub fn is_hermitian(self) -> bool {
        (self.phase + 4 - ((self.x & self.z).count_ones() as u8 & 3)) % 2 == 0
    }

    /// Sign of a Hermitian word relative to the plain tensor product of X/Y/Z factors.
    pub fn sign(self) -> Sign {
        let rel = (self.phase + 4 - ((self.x & self.z).count_ones() as u8 & 3)) & 3;
        debug_assert!(rel % 2 == 0, "non-Hermitian word");
        if rel == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn kind_on(self, qubit: u8) -> PauliKind {
        PauliKind::from_bits(self.x >> qubit & 1, self.z >> qubit & 1)
    }

    /// Interprets a one-qubit Hermitian word as a signed Pauli.
    pub fn to_pauli(self) -> Pauli {
        Pauli::new(self.kind_on(0), self.sign())
    }

    /// Compact key for Hermitian words on two qubits: x | z<<2 | sign<<4.
    pub fn key2(self) -> u32 {
        (self.x as u32 & 3) | (self.z as u32 & 3) << 2 | ((self.sign() == Sign::Minus) as u32) << 4
    }
}
