//! Stabilizer states as graph states with a local Clifford frame.
//!
//! A [`GraphState`] on `n` qubits stores an adjacency matrix `Γ` over GF(2)
//! and one-qubit Cliffords `C_i`; it represents `(⊗ᵢ Cᵢ) |G⟩` where
//! `|G⟩ = Π_{(i,j)∈E} CZ_ij |+⟩^⊗n`.
//!
//! Local complementation at `a` uses the identity
//! `|G⟩ = exp(iπ/4 X_a) Π_{b∈N(a)} exp(-iπ/4 Z_b) |τ_a(G)⟩`, so the frame
//! picks up `√(iX)` on `a` and `S` (up to phase) on each neighbour.
//!
//! Debug dump format (line oriented, used by fixtures):
//!
//! ```text
//! graph <n>
//! vop <qubit> <clifford index>     one line per qubit
//! edge <i> <j>                     one line per edge, i < j
//! ```

use crate::clifford::{tables, CliffordOne, CliffordTwo, Op2, C1_ORDER};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec, XorBasis};
use crate::linalg;
use crate::pauli::{Pauli, PauliKind, Sign};
use num_complex::Complex64;
use rand::Rng;
use std::collections::VecDeque;
use std::fmt::Write as _;
use std::sync::OnceLock;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementOutcome {
    /// Eigenvalue `±1` of the measured operator.
    pub value: i8,
    pub was_deterministic: bool,
    pub born_probability: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphState {
    n: usize,
    adj: BitMatrix,
    vops: Vec<CliffordOne>,
    scratch: Scratch,
}

/// Reusable buffers; never part of the state's value.
#[derive(Clone, Debug, Default)]
struct Scratch {
    nbrs: Vec<usize>,
    mask: Vec<u64>,
}

impl PartialEq for Scratch {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Scratch {}

/// Frequently used frame elements and their right-multiplication rows, resolved once.
#[derive(Clone, Copy)]
struct Frame {
    h: CliffordOne,
    s: CliffordOne,
    sqrt_x: CliffordOne,
    /// `times_x[c]` is the index of `c · x`.
    times_s: [u8; C1_ORDER],
    times_sqrt_x: [u8; C1_ORDER],
    times_z: [u8; C1_ORDER],
    times_h: [u8; C1_ORDER],
    times_hz: [u8; C1_ORDER],
    diag: [bool; C1_ORDER],
}

fn frame() -> &'static Frame {
    static F: OnceLock<Frame> = OnceLock::new();
    F.get_or_init(|| {
        let row = |g: CliffordOne| {
            let mut r = [0u8; C1_ORDER];
            for c in CliffordOne::all() {
                r[c.index()] = c.mul(g).0;
            }
            r
        };
        Frame {
            h: CliffordOne::h(),
            s: CliffordOne::s(),
            sqrt_x: CliffordOne::sqrt_x(),
            times_s: row(CliffordOne::s()),
            times_sqrt_x: row(CliffordOne::sqrt_x()),
            times_z: row(CliffordOne::z()),
            times_h: row(CliffordOne::h()),
            times_hz: row(CliffordOne::h().mul(CliffordOne::z())),
            diag: tables().commutes_with_cz,
        }
    })
}

#[inline]
fn push_ones(words: &[u64], out: &mut Vec<usize>) {
    for (wi, &w) in words.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            out.push(wi * 64 + w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
}

/// Gauge moves available when stripping a frame element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Move {
    /// Local complementation at the vertex itself: frame ← frame · √(iX).
    SelfLc,
    /// Local complementation at a neighbour: frame ← frame · S.
    NeighbourLc,
}

struct CzTables {
    /// Shortest move sequence `m₁…m_k` with `C · m₁ ⋯ m_k` diagonal, indexed by `C`.
    strip: Vec<Vec<Move>>,
    /// `(va, vb, edge) → (va', vb', edge')` for isolated pairs.
    corner: Vec<(u8, u8, bool)>,
}

fn corner_index(va: usize, vb: usize, e: bool) -> usize {
    (va * C1_ORDER + vb) * 2 + e as usize
}

fn cz_tables() -> &'static CzTables {
    static T: OnceLock<CzTables> = OnceLock::new();
    T.get_or_init(|| build_cz_tables().expect("CZ table construction failed"))
}

fn build_cz_tables() -> Result<CzTables> {
    let f = frame();
    // Shortest right-appended move sequence taking each frame into the diagonal subgroup.
    let diag = tables().commutes_with_cz;
    let mut strip = Vec::with_capacity(C1_ORDER);
    for start in CliffordOne::all() {
        let mut seen: Vec<Option<Vec<Move>>> = vec![None; C1_ORDER];
        seen[start.index()] = Some(vec![]);
        let mut queue = VecDeque::from([start]);
        let mut found = None;
        while let Some(c) = queue.pop_front() {
            if diag[c.index()] {
                found = seen[c.index()].clone();
                break;
            }
            for (m, g) in [(Move::SelfLc, f.sqrt_x), (Move::NeighbourLc, f.s)] {
                let next = c.mul(g);
                if seen[next.index()].is_none() {
                    let mut w = seen[c.index()].clone().unwrap();
                    w.push(m);
                    seen[next.index()] = Some(w);
                    queue.push_back(next);
                }
            }
        }
        strip.push(found.ok_or_else(|| Error::Internal("frame moves cannot reach the diagonal subgroup".into()))?);
    }

    // Two-qubit corner cases against explicit 4-vectors.
    let plus = Complex64::new(0.5, 0.0);
    let cz = crate::clifford::cz_matrix();
    let pair_state = |va: usize, vb: usize, e: bool| -> [Complex64; 4] {
        let mut v = [plus; 4];
        if e {
            v[3] = -v[3];
        }
        let u = linalg::kron(&tables().one[va].matrix, &tables().one[vb].matrix);
        linalg::m4_apply(&u, &v)
    };
    let mut candidates = Vec::with_capacity(C1_ORDER * C1_ORDER * 2);
    for e in [false, true] {
        for va in 0..C1_ORDER {
            for vb in 0..C1_ORDER {
                candidates.push((va, vb, e, pair_state(va, vb, e)));
            }
        }
    }
    let diag = &tables().commutes_with_cz;
    let mut corner = vec![(0u8, 0u8, false); C1_ORDER * C1_ORDER * 2];
    for va in 0..C1_ORDER {
        for vb in 0..C1_ORDER {
            for e in [false, true] {
                let target = linalg::m4_apply(&cz, &pair_state(va, vb, e));
                let hit = candidates.iter().find(|(ca, cb, _, v)| {
                    (!diag[va] || diag[*ca])
                        && (!diag[vb] || diag[*cb])
                        && linalg::eq_up_to_phase(v, &target, 1e-9)
                });
                let (ca, cb, ce, _) = hit.ok_or_else(|| {
                    Error::Internal(format!("no corner rewrite for ({va}, {vb}, {e})"))
                })?;
                corner[corner_index(va, vb, e)] = (*ca as u8, *cb as u8, *ce);
            }
        }
    }
    Ok(CzTables { strip, corner })
}

impl GraphState {
    /// `|0⟩^⊗n`: the edgeless graph with every frame equal to `H`.
    pub fn new_zero_state(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        Ok(Self { n, adj: BitMatrix::zeros(n, n), vops: vec![frame().h; n], scratch: Scratch::default() })
    }

    /// `|+⟩^⊗n`.
    pub fn new_plus_state(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        Ok(Self { n, adj: BitMatrix::zeros(n, n), vops: vec![CliffordOne::identity(); n], scratch: Scratch::default() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacency(&self) -> &BitMatrix {
        &self.adj
    }

    pub fn vops(&self) -> &[CliffordOne] {
        &self.vops
    }

    pub fn vop(&self, q: usize) -> CliffordOne {
        self.vops[q]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj.get(i, j)
    }

    pub fn degree(&self, q: usize) -> usize {
        self.adj.row_count(q)
    }

    pub fn neighbours(&self, q: usize) -> Vec<usize> {
        self.adj.row_ones(q).collect()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| self.adj.row_ones(i).filter(move |&j| j > i).map(move |j| (i, j)))
            .collect()
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.n {
            Err(Error::QubitOutOfRange { index: q, n: self.n })
        } else {
            Ok(())
        }
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        self.check(i)?;
        self.check(j)?;
        if i == j {
            return Err(Error::SameQubit(i));
        }
        Ok(())
    }

    #[inline]
    fn toggle_edge(&mut self, i: usize, j: usize) {
        self.adj.toggle(i, j);
        self.adj.toggle(j, i);
    }

    /// Applies `c` to qubit `q`.
    pub fn apply_one_qubit(&mut self, q: usize, c: CliffordOne) -> Result<()> {
        self.check(q)?;
        self.vops[q] = c.mul(self.vops[q]);
        Ok(())
    }

    /// Toggles the edges inside `N(a)` and updates the frame; the state is unchanged.
    pub fn local_complementation(&mut self, a: usize) -> Result<()> {
        self.check(a)?;
        self.lc(a);
        Ok(())
    }

    fn lc(&mut self, a: usize) {
        let f = frame();
        let mut nbrs = std::mem::take(&mut self.scratch.nbrs);
        nbrs.clear();
        push_ones(self.adj.row(a), &mut nbrs);
        let d = nbrs.len();
        if d >= 2 {
            let row_cost = d * self.adj.row(a).len();
            let pair_cost = d * (d - 1) / 2;
            if pair_cost <= row_cost {
                for (k, &b) in nbrs.iter().enumerate() {
                    for &c in &nbrs[k + 1..] {
                        self.toggle_edge(b, c);
                    }
                }
            } else {
                let mut mask = std::mem::take(&mut self.scratch.mask);
                mask.clear();
                mask.extend_from_slice(self.adj.row(a));
                for &b in &nbrs {
                    self.adj.xor_words_into(&mask, b);
                    self.adj.toggle(b, b);
                }
                self.scratch.mask = mask;
            }
        }
        self.vops[a] = CliffordOne(f.times_sqrt_x[self.vops[a].index()]);
        for &b in &nbrs {
            self.vops[b] = CliffordOne(f.times_s[self.vops[b].index()]);
        }
        self.scratch.nbrs = nbrs;
    }

    fn first_neighbour_except(&self, a: usize, avoid: usize) -> Option<usize> {
        self.adj.row_ones(a).find(|&c| c != avoid)
    }

    /// Neighbour of `a` other than `avoid` with the smallest degree.
    fn cheapest_neighbour_except(&self, a: usize, avoid: usize) -> Option<usize> {
        self.adj.row_ones(a).filter(|&c| c != avoid).min_by_key(|&c| self.adj.row_count(c))
    }

    /// Makes the frame of `a` commute with CZ by gauge moves, never
    /// complementing at `avoid`. Requires a neighbour of `a` other than `avoid`.
    fn strip_vop(&mut self, a: usize, avoid: usize) {
        let moves = &cz_tables().strip[self.vops[a].index()];
        for m in moves {
            match m {
                Move::SelfLc => self.lc(a),
                Move::NeighbourLc => {
                    let c = self.cheapest_neighbour_except(a, avoid).expect("strip_vop needs a neighbour");
                    self.lc(c);
                }
            }
        }
        debug_assert!(frame().diag[self.vops[a].index()]);
    }

    /// Applies `CZ` between qubits `a` and `b`.
    ///
    /// A frame that commutes with CZ is left alone; otherwise it is stripped
    /// by gauge moves when the vertex has a neighbour besides the partner.
    /// Any remaining non-commuting frame then sits on a vertex whose only
    /// possible neighbour is the partner, which the corner table resolves.
    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_pair(a, b)?;
        let diag = &frame().diag;
        if !diag[self.vops[a].index()] && self.first_neighbour_except(a, b).is_some() {
            self.strip_vop(a, b);
        }
        if !diag[self.vops[b].index()] && self.first_neighbour_except(b, a).is_some() {
            self.strip_vop(b, a);
        }
        if !diag[self.vops[a].index()] && self.first_neighbour_except(a, b).is_some() {
            self.strip_vop(a, b);
        }
        let (va, vb) = (self.vops[a].index(), self.vops[b].index());
        if diag[va] && diag[vb] {
            self.toggle_edge(a, b);
        } else {
            let e = self.adj.get(a, b);
            let (na, nb, ne) = cz_tables().corner[corner_index(va, vb, e)];
            self.vops[a] = CliffordOne(na);
            self.vops[b] = CliffordOne(nb);
            if ne != e {
                self.toggle_edge(a, b);
            }
        }
        Ok(())
    }

    /// Applies a two-qubit Clifford with leg 0 on `i` and leg 1 on `j`.
    pub fn apply_two_qubit(&mut self, i: usize, j: usize, c: CliffordTwo) -> Result<()> {
        self.check_pair(i, j)?;
        for op in c.ops() {
            match *op {
                Op2::One { leg, c } => {
                    let q = if leg == 0 { i } else { j };
                    self.vops[q] = c.mul(self.vops[q]);
                }
                Op2::Cz => self.apply_cz(i, j)?,
            }
        }
        Ok(())
    }

    /// Measures `Z` on the graph (frame-free) at `a` with outcome `mu`.
    fn project_graph_z(&mut self, a: usize, mu: i8) {
        let f = frame();
        let mut nbrs = std::mem::take(&mut self.scratch.nbrs);
        nbrs.clear();
        push_ones(self.adj.row(a), &mut nbrs);
        for &b in &nbrs {
            self.adj.toggle(b, a);
            if mu < 0 {
                self.vops[b] = CliffordOne(f.times_z[self.vops[b].index()]);
            }
        }
        self.adj.row_mut(a).fill(0);
        let v = self.vops[a].index();
        self.vops[a] = CliffordOne(if mu > 0 { f.times_h[v] } else { f.times_hz[v] });
        self.scratch.nbrs = nbrs;
    }

    /// Measures the Pauli `p` on qubit `q`.
    ///
    /// `forced` fixes the outcome of a random measurement (for replay); forcing
    /// the opposite of a deterministic outcome is an error.
    pub fn measure_pauli<R: Rng + ?Sized>(
        &mut self,
        q: usize,
        p: Pauli,
        rng: &mut R,
        forced: Option<i8>,
    ) -> Result<MeasurementOutcome> {
        self.check(q)?;
        if p.kind == PauliKind::I {
            return deterministic(p.sign.value(), forced);
        }
        loop {
            let pp = crate::clifford::conjugate_pauli(self.vops[q], p);
            let s = pp.sign.value();
            match pp.kind {
                PauliKind::Z => {
                    let lambda = match forced {
                        Some(v) => v.signum(),
                        None => {
                            if rng.gen::<bool>() {
                                1
                            } else {
                                -1
                            }
                        }
                    };
                    self.project_graph_z(q, lambda * s);
                    return Ok(MeasurementOutcome { value: lambda, was_deterministic: false, born_probability: 0.5 });
                }
                PauliKind::Y => self.lc(q),
                PauliKind::X => match self.first_neighbour_except(q, usize::MAX) {
                    None => return deterministic(s, forced),
                    Some(b) => self.lc(b),
                },
                PauliKind::I => unreachable!(),
            }
        }
    }

    /// Shorthand for a Z-basis measurement.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<MeasurementOutcome> {
        self.measure_pauli(q, Pauli::Z, rng, None)
    }

    /// Entanglement entropy of `a` (in bits): the GF(2) rank of `Γ_{A,Ā}`.
    pub fn entanglement_entropy_bits(&self, a: &[usize]) -> usize {
        let mask = BitVec::from_indices(self.n, a.iter().copied().filter(|&q| q < self.n));
        self.entropy_of_mask(&mask)
    }

    /// As [`Self::entanglement_entropy_bits`] with the subset given as a bit mask.
    pub fn entropy_of_mask(&self, a: &BitVec) -> usize {
        debug_assert_eq!(a.len(), self.n);
        let na = a.count_ones();
        if na == 0 || na == self.n {
            return 0;
        }
        let b = a.not();
        let (rows, cols) = if na <= self.n - na { (a, &b) } else { (&b, a) };
        let mut basis = XorBasis::new(self.n);
        let mut buf = vec![0u64; cols.words().len()];
        let limit = rows.count_ones().min(cols.count_ones());
        for i in rows.ones() {
            for (o, (r, m)) in buf.iter_mut().zip(self.adj.row(i).iter().zip(cols.words())) {
                *o = r & m;
            }
            if basis.insert(&mut buf) && basis.rank() == limit {
                break;
            }
        }
        basis.rank()
    }

    /// Line-oriented text dump; see the module docs.
    pub fn dump(&self) -> String {
        let mut s = format!("graph {}\n", self.n);
        for (q, v) in self.vops.iter().enumerate() {
            let _ = writeln!(s, "vop {q} {}", v.index());
        }
        for (i, j) in self.edges() {
            let _ = writeln!(s, "edge {i} {j}");
        }
        s
    }

    /// Parses the output of [`Self::dump`].
    pub fn from_dump(text: &str) -> Result<Self> {
        let bad = |l: &str| Error::InvalidConfig(format!("bad graph dump line: {l:?}"));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let head = lines.next().ok_or_else(|| bad(""))?;
        let n: usize = head
            .strip_prefix("graph ")
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| bad(head))?;
        let mut g = Self::new_plus_state(n)?;
        for l in lines {
            let parts: Vec<&str> = l.split_whitespace().collect();
            let nums: Vec<usize> = parts[1..].iter().map(|x| x.parse()).collect::<std::result::Result<_, _>>().map_err(|_| bad(l))?;
            match (parts[0], nums.as_slice()) {
                ("vop", [q, c]) if *q < n => {
                    g.vops[*q] = CliffordOne::from_index(*c).ok_or_else(|| bad(l))?;
                }
                ("edge", [i, j]) if *i < n && *j < n && i != j => {
                    g.adj.set(*i, *j, true);
                    g.adj.set(*j, *i, true);
                }
                _ => return Err(bad(l)),
            }
        }
        Ok(g)
    }

    /// Dense amplitudes (qubit `q` is bit `q` of the basis index). Feasible for small `n`.
    pub fn to_statevector(&self) -> Result<Vec<Complex64>> {
        if self.n > crate::dense::MAX_QUBITS {
            return Err(Error::TooManyQubits { n: self.n, max: crate::dense::MAX_QUBITS });
        }
        let dim = 1usize << self.n;
        let amp = (dim as f64).sqrt().recip();
        let edges = self.edges();
        let mut psi: Vec<Complex64> = (0..dim)
            .map(|x| {
                let parity = edges.iter().filter(|(i, j)| x >> i & 1 == 1 && x >> j & 1 == 1).count();
                Complex64::new(if parity % 2 == 0 { amp } else { -amp }, 0.0)
            })
            .collect();
        for (q, v) in self.vops.iter().enumerate() {
            let m = v.matrix();
            let bit = 1usize << q;
            for x in 0..dim {
                if x & bit == 0 {
                    let (a0, a1) = (psi[x], psi[x | bit]);
                    psi[x] = m[0][0] * a0 + m[0][1] * a1;
                    psi[x | bit] = m[1][0] * a0 + m[1][1] * a1;
                }
            }
        }
        Ok(psi)
    }
}

fn deterministic(value: i8, forced: Option<i8>) -> Result<MeasurementOutcome> {
    if let Some(f) = forced {
        if f.signum() != value {
            return Err(Error::ImpossibleOutcome { forced: f.signum(), actual: value });
        }
    }
    Ok(MeasurementOutcome { value, was_deterministic: true, born_probability: 1.0 })
}

/// Signed Pauli from a kind and a ±1 value.
pub fn signed(kind: PauliKind, sign: i8) -> Pauli {
    Pauli::new(kind, Sign::from_value(sign))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eq_up_to_phase;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    /// Minimal statevector oracle, independent of the engine under test.
    struct Oracle {
        n: usize,
        psi: Vec<Complex64>,
    }

    impl Oracle {
        fn zero(n: usize) -> Self {
            let mut psi = vec![Complex64::new(0.0, 0.0); 1 << n];
            psi[0] = Complex64::new(1.0, 0.0);
            Self { n, psi }
        }
        fn one(&mut self, q: usize, m: &linalg::M2) {
            for x in 0..self.psi.len() {
                if x >> q & 1 == 0 {
                    let y = x | 1 << q;
                    let (a, b) = (self.psi[x], self.psi[y]);
                    self.psi[x] = m[0][0] * a + m[0][1] * b;
                    self.psi[y] = m[1][0] * a + m[1][1] * b;
                }
            }
        }
        fn two(&mut self, i: usize, j: usize, m: &linalg::M4) {
            for x in 0..self.psi.len() {
                if x >> i & 1 == 0 && x >> j & 1 == 0 {
                    let idx = [x, x | 1 << j, x | 1 << i, x | 1 << i | 1 << j];
                    let v = idx.map(|k| self.psi[k]);
                    for (r, &k) in idx.iter().enumerate() {
                        self.psi[k] = (0..4).map(|c| m[r][c] * v[c]).sum();
                    }
                }
            }
        }
        fn cz(&mut self, i: usize, j: usize) {
            for x in 0..self.psi.len() {
                if x >> i & 1 == 1 && x >> j & 1 == 1 {
                    self.psi[x] = -self.psi[x];
                }
            }
        }
        /// Probability of +1 for `P` on `q`, then projection onto `value`.
        fn measure(&mut self, q: usize, p: Pauli, value: i8) -> f64 {
            let m = p.matrix();
            let mut proj = self.psi.clone();
            let mut o = Oracle { n: self.n, psi: self.psi.clone() };
            o.one(q, &m);
            for (a, b) in proj.iter_mut().zip(&o.psi) {
                *a = (*a + *b * value as f64) * 0.5;
            }
            let prob: f64 = proj.iter().map(|z| z.norm_sqr()).sum();
            if prob > 1e-12 {
                let s = prob.sqrt().recip();
                self.psi = proj.into_iter().map(|z| z * s).collect();
            }
            prob
        }
        fn entropy_bits(&self, a: &[usize]) -> f64 {
            let amask: usize = a.iter().map(|q| 1 << q).sum();
            let na = a.len();
            let nb = self.n - na;
            let mut m = nalgebra::DMatrix::<Complex64>::zeros(1 << na, 1 << nb);
            for x in 0..self.psi.len() {
                let (mut ia, mut ib, mut ka, mut kb) = (0, 0, 0, 0);
                for q in 0..self.n {
                    if amask >> q & 1 == 1 {
                        ia |= (x >> q & 1) << ka;
                        ka += 1;
                    } else {
                        ib |= (x >> q & 1) << kb;
                        kb += 1;
                    }
                }
                m[(ia, ib)] = self.psi[x];
            }
            let rho = &m * m.adjoint();
            let ev = rho.symmetric_eigenvalues();
            -ev.iter().filter(|&&l| l > 1e-12).map(|l| l * l.log2()).sum::<f64>()
        }
    }

    fn random_circuit(g: &mut GraphState, o: &mut Oracle, gates: usize, rng: &mut crate::rng::SimRng) {
        let n = g.n();
        for _ in 0..gates {
            if rng.gen_bool(0.5) {
                let q = rng.gen_range(0..n);
                let c = CliffordOne::from_index(rng.gen_range(0..24)).unwrap();
                g.apply_one_qubit(q, c).unwrap();
                o.one(q, &c.matrix());
            } else {
                let i = rng.gen_range(0..n);
                let j = (i + rng.gen_range(1..n)) % n;
                if rng.gen_bool(0.5) {
                    g.apply_cz(i, j).unwrap();
                    o.cz(i, j);
                } else {
                    let c = crate::clifford::sample_uniform_two_qubit(rng);
                    g.apply_two_qubit(i, j, c).unwrap();
                    o.two(i, j, &c.matrix());
                }
            }
        }
    }

    #[test]
    fn zero_state_is_deterministic() {
        let mut g = GraphState::new_zero_state(3).unwrap();
        let mut rng = rng_from_seed(1);
        for q in 0..3 {
            let m = g.measure_z(q, &mut rng).unwrap();
            assert_eq!(m.value, 1);
            assert!(m.was_deterministic);
            assert_eq!(m.born_probability, 1.0);
        }
        assert_eq!(g.entanglement_entropy_bits(&[0]), 0);
        assert!(GraphState::new_zero_state(0).is_err());
    }

    #[test]
    fn plus_state_is_random() {
        let mut ones = 0;
        for seed in 0..400 {
            let mut g = GraphState::new_zero_state(1).unwrap();
            g.apply_one_qubit(0, CliffordOne::h()).unwrap();
            let mut rng = rng_from_seed(seed);
            let m = g.measure_z(0, &mut rng).unwrap();
            assert!(!m.was_deterministic);
            ones += (m.value == 1) as usize;
        }
        assert!((150..250).contains(&ones), "{ones}");
    }

    #[test]
    fn bell_pair() {
        let mut g = GraphState::new_zero_state(2).unwrap();
        g.apply_one_qubit(0, CliffordOne::h()).unwrap();
        g.apply_one_qubit(1, CliffordOne::h()).unwrap();
        g.apply_cz(0, 1).unwrap();
        assert_eq!(g.edges(), vec![(0, 1)]);
        assert_eq!(g.vops(), &[CliffordOne::identity(); 2]);
        assert_eq!(g.entanglement_entropy_bits(&[0]), 1);

        let mut rng = rng_from_seed(5);
        let a = g.measure_pauli(0, Pauli::Z, &mut rng, None).unwrap();
        assert!(!a.was_deterministic);
        assert_eq!(g.entanglement_entropy_bits(&[0]), 0);
        // |G⟩ on an edge: measuring X on the other leg is fixed by the Z outcome
        let b = g.measure_pauli(1, Pauli::X, &mut rng, None).unwrap();
        assert!(b.was_deterministic);
        assert_eq!(b.value, a.value);
    }

    #[test]
    fn cz_twice_restores() {
        let mut g = GraphState::new_plus_state(4).unwrap();
        g.apply_cz(0, 1).unwrap();
        g.apply_cz(1, 2).unwrap();
        let before = g.clone();
        g.apply_cz(2, 3).unwrap();
        g.apply_cz(2, 3).unwrap();
        assert_eq!(g, before);
    }

    #[test]
    fn one_qubit_gates() {
        let mut g = GraphState::new_plus_state(3).unwrap();
        g.apply_cz(0, 1).unwrap();
        let before = g.clone();
        g.apply_one_qubit(1, CliffordOne::identity()).unwrap();
        assert_eq!(g, before);
        g.apply_one_qubit(1, CliffordOne::h()).unwrap();
        g.apply_one_qubit(1, CliffordOne::h()).unwrap();
        assert_eq!(g, before);
        assert!(g.apply_one_qubit(3, CliffordOne::h()).is_err());
        assert!(g.apply_cz(1, 1).is_err());
    }

    #[test]
    fn triangle_complementation() {
        let mut g = GraphState::new_plus_state(3).unwrap();
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            g.apply_cz(i, j).unwrap();
        }
        let psi = g.to_statevector().unwrap();
        g.local_complementation(0).unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (0, 2)]);
        assert!(eq_up_to_phase(&psi, &g.to_statevector().unwrap(), 1e-10));

        let mut iso = GraphState::new_plus_state(2).unwrap();
        let psi = iso.to_statevector().unwrap();
        iso.local_complementation(1).unwrap();
        assert!(iso.edges().is_empty());
        assert!(eq_up_to_phase(&psi, &iso.to_statevector().unwrap(), 1e-10));
    }

    #[test]
    fn star_entropy() {
        let mut g = GraphState::new_plus_state(6).unwrap();
        for j in 1..6 {
            g.apply_cz(0, j).unwrap();
        }
        assert_eq!(g.entanglement_entropy_bits(&[0]), 1);
        assert_eq!(g.entanglement_entropy_bits(&[1, 2, 3, 4, 5]), 1);
        assert_eq!(g.entanglement_entropy_bits(&[]), 0);
        assert_eq!(GraphState::new_plus_state(5).unwrap().entanglement_entropy_bits(&[0, 1]), 0);
    }

    #[test]
    fn random_circuits_match_dense() {
        let mut rng = rng_from_seed(11);
        for _ in 0..30 {
            let mut g = GraphState::new_zero_state(8).unwrap();
            let mut o = Oracle::zero(8);
            random_circuit(&mut g, &mut o, 200, &mut rng);
            assert!(eq_up_to_phase(&g.to_statevector().unwrap(), &o.psi, 1e-9));
        }
    }

    #[test]
    fn local_complementation_is_gauge() {
        let mut rng = rng_from_seed(12);
        for _ in 0..40 {
            let mut g = GraphState::new_zero_state(7).unwrap();
            let mut o = Oracle::zero(7);
            random_circuit(&mut g, &mut o, 60, &mut rng);
            let psi = g.to_statevector().unwrap();
            let ent: Vec<usize> = (1..7).map(|k| g.entanglement_entropy_bits(&(0..k).collect::<Vec<_>>())).collect();
            for _ in 0..5 {
                g.local_complementation(rng.gen_range(0..7)).unwrap();
            }
            assert!(eq_up_to_phase(&psi, &g.to_statevector().unwrap(), 1e-9));
            let ent2: Vec<usize> = (1..7).map(|k| g.entanglement_entropy_bits(&(0..k).collect::<Vec<_>>())).collect();
            assert_eq!(ent, ent2);
        }
    }

    #[test]
    fn measurements_match_born_rule() {
        let mut rng = rng_from_seed(13);
        let kinds = [PauliKind::X, PauliKind::Y, PauliKind::Z];
        for _ in 0..60 {
            let mut g = GraphState::new_zero_state(6).unwrap();
            let mut o = Oracle::zero(6);
            random_circuit(&mut g, &mut o, 50, &mut rng);
            for _ in 0..6 {
                let q = rng.gen_range(0..6);
                let p = signed(kinds[rng.gen_range(0..3)], if rng.gen_bool(0.5) { 1 } else { -1 });
                let m = g.measure_pauli(q, p, &mut rng, None).unwrap();
                let prob = o.measure(q, p, m.value);
                assert!((prob - m.born_probability).abs() < 1e-9, "p={prob} vs {m:?}");
                assert!(eq_up_to_phase(&g.to_statevector().unwrap(), &o.psi, 1e-9));
            }
        }
    }

    #[test]
    fn forced_outcomes() {
        let mut rng = rng_from_seed(3);
        let mut g = GraphState::new_zero_state(2).unwrap();
        assert_eq!(
            g.measure_pauli(0, Pauli::Z, &mut rng, Some(-1)),
            Err(Error::ImpossibleOutcome { forced: -1, actual: 1 })
        );
        g.apply_one_qubit(0, CliffordOne::h()).unwrap();
        let m = g.measure_pauli(0, Pauli::Z, &mut rng, Some(-1)).unwrap();
        assert_eq!(m.value, -1);
        let again = g.measure_pauli(0, Pauli::Z, &mut rng, None).unwrap();
        assert_eq!(again.value, -1);
        assert!(again.was_deterministic);
    }

    #[test]
    fn entropies_match_dense() {
        let mut rng = rng_from_seed(14);
        for _ in 0..10 {
            let mut g = GraphState::new_zero_state(10).unwrap();
            let mut o = Oracle::zero(10);
            random_circuit(&mut g, &mut o, 150, &mut rng);
            for k in 1..10 {
                let a: Vec<usize> = (0..k).collect();
                let s = o.entropy_bits(&a);
                assert!((s - g.entanglement_entropy_bits(&a) as f64).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn measurement_does_not_raise_entropy() {
        let mut rng = rng_from_seed(15);
        let kinds = [PauliKind::X, PauliKind::Y, PauliKind::Z];
        for _ in 0..100 {
            let mut g = GraphState::new_zero_state(8).unwrap();
            let mut o = Oracle::zero(8);
            random_circuit(&mut g, &mut o, 80, &mut rng);
            let a: Vec<usize> = (0..4).collect();
            let before = g.entanglement_entropy_bits(&a);
            let q = rng.gen_range(0..8);
            g.measure_pauli(q, Pauli::plus(kinds[rng.gen_range(0..3)]), &mut rng, None).unwrap();
            assert!(g.entanglement_entropy_bits(&a) <= before);
        }
    }

    #[test]
    fn dump_round_trip() {
        let mut rng = rng_from_seed(16);
        let mut g = GraphState::new_zero_state(5).unwrap();
        let mut o = Oracle::zero(5);
        random_circuit(&mut g, &mut o, 40, &mut rng);
        let text = g.dump();
        assert!(text.starts_with("graph 5\n"));
        assert_eq!(GraphState::from_dump(&text).unwrap(), g);
        assert!(GraphState::from_dump("graph 2\nedge 0 0\n").is_err());
    }
}
