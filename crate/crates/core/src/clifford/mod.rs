//! The one-qubit (24 elements) and two-qubit (11520 elements) Clifford groups.
//!
//! Elements are labelled by their conjugation action `P ↦ C† P C` on the
//! Pauli generators, signs included and global phase dropped. Tables are
//! enumerated once from the gate set `{H, S}` (one qubit) and
//! `{H₁, H₂, S₁, S₂, CZ}` (two qubits), with generator actions read off the
//! explicit matrices, so every sign follows from the `Y = iXZ` convention.
//!
//! A word `[g₁, g₂, …, g_k]` means `g₁` is applied first: its unitary is
//! `g_k ⋯ g₂ g₁`. On two qubits, leg 0 is the first tensor factor (the high
//! bit of the 4×4 local index).

mod cache;

pub use cache::{load_or_build, load_tables, save_tables, CACHE_MAGIC, CACHE_VERSION};

use crate::error::{Error, Result};
use crate::linalg::{self, kron, m2_dagger, m2_mul, m4_dagger, m4_mul, M2, M4, ONE, ZERO};
use crate::pauli::{Pauli, PauliKind, PauliWord, Sign};
use rand::Rng;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::cmp::Reverse;
use std::sync::OnceLock;

pub const C1_ORDER: usize = 24;
pub const C2_ORDER: usize = 11520;

/// A one-qubit Clifford element, identified by its table index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CliffordOne(pub(crate) u8);

/// Generators of the one-qubit group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gen1 {
    H,
    S,
}

/// Generators of the two-qubit group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gen2 {
    H1,
    H2,
    S1,
    S2,
    Cz,
}

impl Gen2 {
    pub const ALL: [Gen2; 5] = [Gen2::H1, Gen2::H2, Gen2::S1, Gen2::S2, Gen2::Cz];

    pub fn label(self) -> &'static str {
        match self {
            Gen2::H1 => "H1",
            Gen2::H2 => "H2",
            Gen2::S1 => "S1",
            Gen2::S2 => "S2",
            Gen2::Cz => "CZ",
        }
    }

    fn code(self) -> u8 {
        self as u8
    }

    fn from_code(c: u8) -> Option<Gen2> {
        Gen2::ALL.get(c as usize).copied()
    }
}

/// A two-qubit Clifford element, identified by its table index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CliffordTwo(pub(crate) u16);

/// Gate-level replay form of a two-qubit element: merged one-qubit frames and CZs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op2 {
    One { leg: u8, c: CliffordOne },
    Cz,
}

#[derive(Clone, Debug)]
pub struct OneEntry {
    /// Images of X and Z under `C† · C`.
    pub(crate) action: [PauliWord; 2],
    pub word: Vec<Gen1>,
    pub matrix: M2,
}

#[derive(Clone, Debug)]
pub struct TwoEntry {
    /// Images of X₀, Z₀, X₁, Z₁.
    pub(crate) action: [PauliWord; 4],
    pub word: Vec<Gen2>,
    pub ops: Vec<Op2>,
}

/// Immutable group tables; see [`tables`].
#[derive(Debug)]
pub struct CliffordTables {
    pub one: Vec<OneEntry>,
    /// `mul1[a][b]` is the element with unitary `U_a U_b`.
    pub mul1: Vec<[u8; C1_ORDER]>,
    pub inv1: Vec<u8>,
    /// `conj1[c][k]` is `C† P_k C` for `P_k ∈ {I, X, Y, Z}`.
    pub conj1: Vec<[Pauli; 4]>,
    pub commutes_with_cz: [bool; C1_ORDER],
    pub two: Vec<TwoEntry>,
    pub max_word_len: usize,
    pub max_cz_count: usize,
    two_index: HashMap<u64, u16>,
    named: Named,
}

#[derive(Clone, Copy, Debug)]
struct Named {
    id: u8,
    h: u8,
    s: u8,
    sdg: u8,
    x: u8,
    y: u8,
    z: u8,
    sqrt_x: u8,
    sqrt_x_dg: u8,
    two_id: u16,
    cnot: u16,
    swap: u16,
}

pub(crate) fn h_matrix() -> M2 {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let a = ONE * r;
    [[a, a], [a, -a]]
}

pub(crate) fn s_matrix() -> M2 {
    [[ONE, ZERO], [ZERO, linalg::I]]
}

pub(crate) fn cz_matrix() -> M4 {
    let mut m = linalg::m4_identity();
    m[3][3] = -ONE;
    m
}

pub(crate) fn cnot_matrix() -> M4 {
    // control on leg 0 (high bit)
    let mut m = [[ZERO; 4]; 4];
    m[0][0] = ONE;
    m[1][1] = ONE;
    m[2][3] = ONE;
    m[3][2] = ONE;
    m
}

pub(crate) fn swap_matrix() -> M4 {
    let mut m = [[ZERO; 4]; 4];
    m[0][0] = ONE;
    m[1][2] = ONE;
    m[2][1] = ONE;
    m[3][3] = ONE;
    m
}

pub(crate) fn gen1_matrix(g: Gen1) -> M2 {
    match g {
        Gen1::H => h_matrix(),
        Gen1::S => s_matrix(),
    }
}

pub(crate) fn gen2_matrix(g: Gen2) -> M4 {
    let id = linalg::m2_identity();
    match g {
        Gen2::H1 => kron(&h_matrix(), &id),
        Gen2::H2 => kron(&id, &h_matrix()),
        Gen2::S1 => kron(&s_matrix(), &id),
        Gen2::S2 => kron(&id, &s_matrix()),
        Gen2::Cz => cz_matrix(),
    }
}

/// Matrix of `i^phase X^x Z^z` on one qubit.
pub(crate) fn word_matrix1(w: PauliWord) -> M2 {
    let x = Pauli::X.matrix();
    let z = Pauli::Z.matrix();
    let mut m = linalg::m2_identity();
    if w.x & 1 == 1 {
        m = m2_mul(&m, &x);
    }
    if w.z & 1 == 1 {
        m = m2_mul(&m, &z);
    }
    let ph = crate::pauli::Phase(w.phase).value();
    m.map(|r| r.map(|c| c * ph))
}

/// Matrix of a two-qubit Pauli word; bit 0 of the masks is leg 0.
pub(crate) fn word_matrix2(w: PauliWord) -> M4 {
    let leg = |q: u8| {
        word_matrix1(PauliWord { x: w.x >> q & 1, z: w.z >> q & 1, phase: 0 })
    };
    let ph = crate::pauli::Phase(w.phase).value();
    kron(&leg(0), &leg(1)).map(|r| r.map(|c| c * ph))
}

fn all_words(nq: u8) -> Vec<PauliWord> {
    let n = 1u8 << nq;
    let mut out = Vec::new();
    for x in 0..n {
        for z in 0..n {
            for phase in 0..4 {
                out.push(PauliWord { x, z, phase });
            }
        }
    }
    out
}

/// Reads `U† P U` off the matrices for `P ∈ {X, Z}`.
fn action_from_matrix1(u: &M2) -> Option<[PauliWord; 2]> {
    let ud = m2_dagger(u);
    let cands = all_words(1);
    let mut out = [PauliWord::IDENTITY; 2];
    for (k, p) in [PauliWord::single_x(0), PauliWord::single_z(0)].into_iter().enumerate() {
        let conj = m2_mul(&m2_mul(&ud, &word_matrix1(p)), u);
        out[k] = *cands
            .iter()
            .find(|w| linalg::m2_approx_eq(&conj, &word_matrix1(**w), 1e-9))?;
    }
    Some(out)
}

/// Reads `U† P U` off the matrices for `P ∈ {X₀, Z₀, X₁, Z₁}`.
pub(crate) fn action_from_matrix2(u: &M4) -> Option<[PauliWord; 4]> {
    let ud = m4_dagger(u);
    let cands = all_words(2);
    let gens = [
        PauliWord::single_x(0),
        PauliWord::single_z(0),
        PauliWord::single_x(1),
        PauliWord::single_z(1),
    ];
    let mut out = [PauliWord::IDENTITY; 4];
    for (k, p) in gens.into_iter().enumerate() {
        let conj = m4_mul(&m4_mul(&ud, &word_matrix2(p)), u);
        out[k] = *cands
            .iter()
            .find(|w| linalg::m4_approx_eq(&conj, &word_matrix2(**w), 1e-9))?;
    }
    Some(out)
}

/// Applies an action (images of X_q, Z_q) to an arbitrary word.
#[inline]
pub(crate) fn act(images: &[PauliWord], w: PauliWord) -> PauliWord {
    let nq = images.len() / 2;
    let mut r = PauliWord { x: 0, z: 0, phase: w.phase & 3 };
    for q in 0..nq {
        if w.x >> q & 1 == 1 {
            r = r.mul(images[2 * q]);
        }
    }
    for q in 0..nq {
        if w.z >> q & 1 == 1 {
            r = r.mul(images[2 * q + 1]);
        }
    }
    r
}

/// Action of `g · U` (g applied after U): `P ↦ conj_U(conj_g(P))`.
fn compose<const N: usize>(u: &[PauliWord; N], g: &[PauliWord; N]) -> [PauliWord; N] {
    let mut out = [PauliWord::IDENTITY; N];
    for k in 0..N {
        out[k] = act(u, g[k]);
    }
    out
}

fn key1(a: &[PauliWord; 2]) -> u16 {
    let k = |w: PauliWord| (w.x as u16 & 1) | (w.z as u16 & 1) << 1 | ((w.sign() == Sign::Minus) as u16) << 2;
    k(a[0]) | k(a[1]) << 3
}

fn key2(a: &[PauliWord; 4]) -> u64 {
    a.iter().enumerate().fold(0u64, |acc, (i, w)| acc | (w.key2() as u64) << (5 * i))
}

fn internal(msg: impl Into<String>) -> Error {
    Error::Internal(msg.into())
}

fn build_one() -> Result<(Vec<OneEntry>, HashMap<u16, u8>)> {
    let gens: Vec<(Gen1, [PauliWord; 2])> = [Gen1::H, Gen1::S]
        .into_iter()
        .map(|g| Ok((g, action_from_matrix1(&gen1_matrix(g)).ok_or_else(|| internal("generator is not Clifford"))?)))
        .collect::<Result<_>>()?;
    let identity = [PauliWord::single_x(0), PauliWord::single_z(0)];
    let mut entries = vec![OneEntry { action: identity, word: vec![], matrix: linalg::m2_identity() }];
    let mut index = HashMap::from([(key1(&identity), 0u8)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(cur) = queue.pop_front() {
        for (g, ga) in &gens {
            let a = compose(&entries[cur].action, ga);
            let k = key1(&a);
            if index.contains_key(&k) {
                continue;
            }
            let mut word = entries[cur].word.clone();
            word.push(*g);
            let matrix = m2_mul(&gen1_matrix(*g), &entries[cur].matrix);
            index.insert(k, entries.len() as u8);
            queue.push_back(entries.len());
            entries.push(OneEntry { action: a, word, matrix });
        }
    }
    if entries.len() != C1_ORDER {
        return Err(internal(format!("one-qubit group has {} elements, expected {C1_ORDER}", entries.len())));
    }
    Ok((entries, index))
}

fn gen2_actions() -> Result<Vec<[PauliWord; 4]>> {
    Gen2::ALL
        .iter()
        .map(|g| action_from_matrix2(&gen2_matrix(*g)).ok_or_else(|| internal("generator is not Clifford")))
        .collect()
}

const IDENTITY2: [PauliWord; 4] = [
    PauliWord { x: 1, z: 0, phase: 0 },
    PauliWord { x: 0, z: 1, phase: 0 },
    PauliWord { x: 2, z: 0, phase: 0 },
    PauliWord { x: 0, z: 2, phase: 0 },
];

/// Weight of a CZ relative to a one-qubit generator in the shortest-word search.
const CZ_WEIGHT: u32 = 64;

/// Shortest words, minimising the CZ count first, by Dijkstra over the Cayley graph.
fn build_two_words() -> Result<Vec<([PauliWord; 4], Vec<Gen2>)>> {
    let gens = gen2_actions()?;
    let mut best: HashMap<u64, (u32, usize)> = HashMap::new();
    let mut nodes: Vec<([PauliWord; 4], Vec<Gen2>)> = vec![(IDENTITY2, vec![])];
    let mut done = vec![false];
    let mut order = Vec::with_capacity(C2_ORDER);
    best.insert(key2(&IDENTITY2), (0, 0));
    let mut heap = BinaryHeap::from([Reverse((0u32, 0usize))]);
    while let Some(Reverse((cost, idx))) = heap.pop() {
        if done[idx] {
            continue;
        }
        done[idx] = true;
        order.push(idx);
        for (g, ga) in Gen2::ALL.iter().zip(&gens) {
            let a = compose(&nodes[idx].0, ga);
            let c = cost + if *g == Gen2::Cz { CZ_WEIGHT } else { 1 };
            let k = key2(&a);
            match best.get(&k) {
                Some(&(old, _)) if old <= c => continue,
                Some(&(_, j)) if done[j] => continue,
                Some(&(_, j)) => {
                    let mut w = nodes[idx].1.clone();
                    w.push(*g);
                    nodes[j] = (a, w);
                    best.insert(k, (c, j));
                    heap.push(Reverse((c, j)));
                }
                None => {
                    let mut w = nodes[idx].1.clone();
                    w.push(*g);
                    let j = nodes.len();
                    nodes.push((a, w));
                    done.push(false);
                    best.insert(k, (c, j));
                    heap.push(Reverse((c, j)));
                }
            }
        }
    }
    if order.len() != C2_ORDER {
        return Err(internal(format!("two-qubit group has {} elements, expected {C2_ORDER}", order.len())));
    }
    Ok(order.into_iter().map(|i| nodes[i].clone()).collect())
}

fn compile_ops(word: &[Gen2], h: u8, s: u8, mul1: &[[u8; C1_ORDER]]) -> Vec<Op2> {
    let mut pending = [0u8; 2];
    let mut ops = Vec::new();
    let flush = |pending: &mut [u8; 2], ops: &mut Vec<Op2>| {
        for leg in 0..2 {
            if pending[leg] != 0 {
                ops.push(Op2::One { leg: leg as u8, c: CliffordOne(pending[leg]) });
                pending[leg] = 0;
            }
        }
    };
    for g in word {
        match g {
            Gen2::H1 => pending[0] = mul1[h as usize][pending[0] as usize],
            Gen2::H2 => pending[1] = mul1[h as usize][pending[1] as usize],
            Gen2::S1 => pending[0] = mul1[s as usize][pending[0] as usize],
            Gen2::S2 => pending[1] = mul1[s as usize][pending[1] as usize],
            Gen2::Cz => {
                flush(&mut pending, &mut ops);
                ops.push(Op2::Cz);
            }
        }
    }
    flush(&mut pending, &mut ops);
    ops
}

/// Replays a generator word on the identity frame.
pub(crate) fn replay_word2(word: &[Gen2]) -> Result<[PauliWord; 4]> {
    let gens = gen2_actions()?;
    Ok(word.iter().fold(IDENTITY2, |a, g| compose(&a, &gens[g.code() as usize])))
}

/// Builds every table from scratch. Deterministic.
pub fn build_tables() -> Result<CliffordTables> {
    let words = build_two_words()?;
    assemble(words)
}

/// Completes the tables from an ordered list of two-qubit elements.
pub(crate) fn assemble(two_words: Vec<([PauliWord; 4], Vec<Gen2>)>) -> Result<CliffordTables> {
    let (one, one_index) = build_one()?;

    let mut mul1 = vec![[0u8; C1_ORDER]; C1_ORDER];
    for a in 0..C1_ORDER {
        for b in 0..C1_ORDER {
            // U_a U_b: b applied first
            let act_ab = compose(&one[b].action, &one[a].action);
            mul1[a][b] = *one_index
                .get(&key1(&act_ab))
                .ok_or_else(|| internal("one-qubit product left the group"))?;
        }
    }
    let mut inv1 = vec![0u8; C1_ORDER];
    for a in 0..C1_ORDER {
        inv1[a] = (0..C1_ORDER as u8)
            .find(|&b| mul1[a][b as usize] == 0)
            .ok_or_else(|| internal("missing inverse"))?;
    }
    let conj1: Vec<[Pauli; 4]> = one
        .iter()
        .map(|e| {
            PauliKind::ALL.map(|k| {
                let w = PauliWord::from_pauli(Pauli::plus(k), 0);
                act(&e.action, w).to_pauli()
            })
        })
        .collect();

    let cz = cz_matrix();
    let mut commutes_with_cz = [false; C1_ORDER];
    for (c, e) in one.iter().enumerate() {
        let u = kron(&e.matrix, &linalg::m2_identity());
        let lhs = m4_mul(&cz, &u);
        let rhs = m4_mul(&u, &cz);
        commutes_with_cz[c] = linalg::eq_up_to_phase(&linalg::flatten4(&lhs), &linalg::flatten4(&rhs), 1e-9);
    }

    let h1 = one_index[&key1(&action_from_matrix1(&h_matrix()).ok_or_else(|| internal("H is not Clifford"))?)];
    let s1 = one_index[&key1(&action_from_matrix1(&s_matrix()).ok_or_else(|| internal("S is not Clifford"))?)];
    let mut two = Vec::with_capacity(C2_ORDER);
    let mut two_index = HashMap::with_capacity(C2_ORDER);
    for (i, (action, word)) in two_words.into_iter().enumerate() {
        if two_index.insert(key2(&action), i as u16).is_some() {
            return Err(internal("duplicate two-qubit element"));
        }
        let ops = compile_ops(&word, h1, s1, &mul1);
        two.push(TwoEntry { action, word, ops });
    }
    if two.len() != C2_ORDER {
        return Err(internal(format!("two-qubit group has {} elements, expected {C2_ORDER}", two.len())));
    }
    let max_word_len = two.iter().map(|e| e.word.len()).max().unwrap_or(0);
    let max_cz_count = two
        .iter()
        .map(|e| e.word.iter().filter(|g| **g == Gen2::Cz).count())
        .max()
        .unwrap_or(0);

    let find1 = |m: &M2| -> Result<u8> {
        let a = action_from_matrix1(m).ok_or_else(|| internal("named gate is not Clifford"))?;
        one_index.get(&key1(&a)).copied().ok_or_else(|| internal("named gate missing"))
    };
    let find2 = |m: &M4| -> Result<u16> {
        let a = action_from_matrix2(m).ok_or_else(|| internal("named gate is not Clifford"))?;
        two_index.get(&key2(&a)).copied().ok_or_else(|| internal("named gate missing"))
    };
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let sqrt_x: M2 = [[ONE * r, linalg::I * r], [linalg::I * r, ONE * r]];
    let named = Named {
        id: find1(&linalg::m2_identity())?,
        h: find1(&h_matrix())?,
        s: find1(&s_matrix())?,
        sdg: find1(&m2_dagger(&s_matrix()))?,
        x: find1(&Pauli::X.matrix())?,
        y: find1(&Pauli::Y.matrix())?,
        z: find1(&Pauli::Z.matrix())?,
        sqrt_x: find1(&sqrt_x)?,
        sqrt_x_dg: find1(&m2_dagger(&sqrt_x))?,
        two_id: find2(&linalg::m4_identity())?,
        cnot: find2(&cnot_matrix())?,
        swap: find2(&swap_matrix())?,
    };
    if named.id != 0 || named.two_id != 0 {
        return Err(internal("identity is not the first element"));
    }

    Ok(CliffordTables {
        one,
        mul1,
        inv1,
        conj1,
        commutes_with_cz,
        two,
        max_word_len,
        max_cz_count,
        two_index,
        named,
    })
}

static TABLES: OnceLock<CliffordTables> = OnceLock::new();

/// The process-wide tables, built on first use.
pub fn tables() -> &'static CliffordTables {
    TABLES.get_or_init(|| build_tables().expect("Clifford table construction failed"))
}

impl CliffordTables {
    pub fn one_count(&self) -> usize {
        self.one.len()
    }

    pub fn two_count(&self) -> usize {
        self.two.len()
    }

    /// Looks up a one-qubit Clifford from its unitary (up to global phase).
    pub fn find_one(&self, m: &M2) -> Option<CliffordOne> {
        let a = action_from_matrix1(m)?;
        self.one.iter().position(|e| key1(&e.action) == key1(&a)).map(|i| CliffordOne(i as u8))
    }

    /// Looks up a two-qubit Clifford from its 4×4 unitary (up to global phase).
    pub fn find_two(&self, m: &M4) -> Option<CliffordTwo> {
        let a = action_from_matrix2(m)?;
        self.two_index.get(&key2(&a)).map(|&i| CliffordTwo(i))
    }

    /// The two-qubit element `a ⊗ b` (a on leg 0).
    pub fn product_two(&self, a: CliffordOne, b: CliffordOne) -> CliffordTwo {
        let ea = &self.one[a.index()].action;
        let eb = &self.one[b.index()].action;
        let lift = |w: PauliWord, q: u8| PauliWord { x: w.x << q, z: w.z << q, phase: w.phase };
        let action = [lift(ea[0], 0), lift(ea[1], 0), lift(eb[0], 1), lift(eb[1], 1)];
        CliffordTwo(self.two_index[&key2(&action)])
    }
}

impl CliffordOne {
    pub fn from_index(id: usize) -> Option<Self> {
        (id < C1_ORDER).then_some(CliffordOne(id as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn identity() -> Self {
        CliffordOne(0)
    }
    pub fn h() -> Self {
        CliffordOne(tables().named.h)
    }
    pub fn s() -> Self {
        CliffordOne(tables().named.s)
    }
    pub fn sdg() -> Self {
        CliffordOne(tables().named.sdg)
    }
    pub fn x() -> Self {
        CliffordOne(tables().named.x)
    }
    pub fn y() -> Self {
        CliffordOne(tables().named.y)
    }
    pub fn z() -> Self {
        CliffordOne(tables().named.z)
    }
    /// `exp(iπ/4 X)` up to phase.
    pub fn sqrt_x() -> Self {
        CliffordOne(tables().named.sqrt_x)
    }
    pub fn sqrt_x_dg() -> Self {
        CliffordOne(tables().named.sqrt_x_dg)
    }

    /// `self · rhs` as unitaries (rhs applied first).
    pub fn mul(self, rhs: CliffordOne) -> CliffordOne {
        CliffordOne(tables().mul1[self.index()][rhs.index()])
    }

    pub fn inverse(self) -> CliffordOne {
        CliffordOne(tables().inv1[self.index()])
    }

    /// Images `[C† X C, C† Z C]`.
    pub fn action(self) -> [Pauli; 2] {
        let t = tables();
        [t.conj1[self.index()][1], t.conj1[self.index()][3]]
    }

    pub fn matrix(self) -> M2 {
        tables().one[self.index()].matrix
    }

    pub fn word(self) -> &'static [Gen1] {
        &tables().one[self.index()].word
    }

    pub fn commutes_with_cz(self) -> bool {
        tables().commutes_with_cz[self.index()]
    }

    pub fn all() -> impl Iterator<Item = CliffordOne> {
        (0..C1_ORDER as u8).map(CliffordOne)
    }
}

/// The signed Pauli `C† P C`.
pub fn conjugate_pauli(c: CliffordOne, p: Pauli) -> Pauli {
    let img = tables().conj1[c.index()][p.kind.index()];
    if p.sign == Sign::Minus {
        img.neg()
    } else {
        img
    }
}

impl CliffordTwo {
    pub fn from_index(id: usize) -> Option<Self> {
        (id < C2_ORDER).then_some(CliffordTwo(id as u16))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn identity() -> Self {
        CliffordTwo(0)
    }

    /// CNOT with control on leg 0.
    pub fn cnot() -> Self {
        CliffordTwo(tables().named.cnot)
    }

    pub fn swap() -> Self {
        CliffordTwo(tables().named.swap)
    }

    pub fn word(self) -> &'static [Gen2] {
        &tables().two[self.index()].word
    }

    pub fn ops(self) -> &'static [Op2] {
        &tables().two[self.index()].ops
    }

    /// Images of `X₀, Z₀, X₁, Z₁` as (sign, kind on leg 0, kind on leg 1).
    pub fn action(self) -> [(Sign, PauliKind, PauliKind); 4] {
        tables().two[self.index()].action.map(|w| (w.sign(), w.kind_on(0), w.kind_on(1)))
    }

    /// The 4×4 unitary obtained by multiplying out the word.
    pub fn matrix(self) -> M4 {
        self.word()
            .iter()
            .fold(linalg::m4_identity(), |m, g| m4_mul(&gen2_matrix(*g), &m))
    }
}

/// Draws an element uniformly from the two-qubit group.
pub fn sample_uniform_two_qubit<R: Rng + ?Sized>(rng: &mut R) -> CliffordTwo {
    CliffordTwo(rng.gen_range(0..C2_ORDER as u16))
}

pub(crate) fn gen2_from_code(c: u8) -> Option<Gen2> {
    Gen2::from_code(c)
}

pub(crate) fn gen2_code(g: Gen2) -> u8 {
    g.code()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_orders() {
        let t = tables();
        assert_eq!(t.one_count(), 24);
        assert_eq!(t.two_count(), 11520);
    }

    #[test]
    fn h_squared_is_identity() {
        let h = CliffordOne::h();
        assert_eq!(h.mul(h), CliffordOne::identity());
    }

    #[test]
    fn named_conjugations() {
        assert_eq!(conjugate_pauli(CliffordOne::h(), Pauli::Z), Pauli::X);
        assert_eq!(conjugate_pauli(CliffordOne::identity(), Pauli::Y), Pauli::Y);
        // S† X S = -Y with Y = iXZ
        assert_eq!(conjugate_pauli(CliffordOne::s(), Pauli::X), Pauli::Y.neg());
    }

    #[test]
    fn conjugation_matches_matrices() {
        for c in CliffordOne::all() {
            let u = c.matrix();
            for k in PauliKind::ALL {
                for s in [Sign::Plus, Sign::Minus] {
                    let p = Pauli::new(k, s);
                    let direct = m2_mul(&m2_mul(&m2_dagger(&u), &p.matrix()), &u);
                    let img = conjugate_pauli(c, p);
                    assert!(linalg::m2_approx_eq(&direct, &img.matrix(), 1e-12), "{c:?} {p}");
                }
            }
        }
    }

    #[test]
    fn mul1_is_a_group() {
        let t = tables();
        for a in 0..24 {
            assert_eq!(t.mul1[0][a], a as u8);
            assert_eq!(t.mul1[a][0], a as u8);
            assert_eq!(t.mul1[a][t.inv1[a] as usize], 0);
            for b in 0..24 {
                let ab = t.mul1[a][b] as usize;
                for c in 0..24 {
                    let bc = t.mul1[b][c] as usize;
                    assert_eq!(t.mul1[ab][c], t.mul1[a][bc]);
                }
            }
        }
    }

    #[test]
    fn mul1_matches_matrices() {
        for a in CliffordOne::all() {
            for b in CliffordOne::all() {
                let m = m2_mul(&a.matrix(), &b.matrix());
                assert!(linalg::eq_up_to_phase(&linalg::flatten2(&m), &linalg::flatten2(&a.mul(b).matrix()), 1e-12));
            }
        }
    }

    #[test]
    fn conjugation_preserves_products() {
        for c in CliffordOne::all() {
            for p in PauliKind::ALL {
                for q in PauliKind::ALL {
                    let (ph, pq) = Pauli::plus(p).product(Pauli::plus(q));
                    let (ph2, img) = conjugate_pauli(c, Pauli::plus(p)).product(conjugate_pauli(c, Pauli::plus(q)));
                    let lhs = conjugate_pauli(c, Pauli::plus(pq));
                    // C†(PQ)C = phase·C† pq C
                    let l = Pauli::plus(lhs.kind).matrix().map(|r| r.map(|z| z * ph.value() * lhs.sign.value() as f64));
                    let r = Pauli::plus(img).matrix().map(|r| r.map(|z| z * ph2.value()));
                    assert!(linalg::m2_approx_eq(&l, &r, 1e-12));
                }
            }
        }
    }

    #[test]
    fn diagonal_elements_commute_with_cz() {
        let t = tables();
        let diag: Vec<usize> = (0..24).filter(|&c| t.commutes_with_cz[c]).collect();
        assert_eq!(diag.len(), 4);
        for c in [CliffordOne::identity(), CliffordOne::s(), CliffordOne::sdg(), CliffordOne::z()] {
            assert!(c.commutes_with_cz());
        }
        assert!(!CliffordOne::h().commutes_with_cz());
    }

    #[test]
    fn product_two_is_tensor() {
        let t = tables();
        let e = t.product_two(CliffordOne::h(), CliffordOne::s());
        let m = kron(&h_matrix(), &s_matrix());
        assert!(linalg::eq_up_to_phase(&linalg::flatten4(&e.matrix()), &linalg::flatten4(&m), 1e-12));
    }

    #[test]
    fn word_statistics() {
        let t = tables();
        assert!(t.max_cz_count <= 3);
        assert!(t.max_word_len <= 20, "max word length {}", t.max_word_len);
        let e = CliffordTwo::swap();
        assert_eq!(e.word().iter().filter(|g| **g == Gen2::Cz).count(), 3);
    }
}
