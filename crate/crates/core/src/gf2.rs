//! Bit-packed vectors and matrices over GF(2).

/// A fixed-length bit vector stored in 64-bit words.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.set(i, true);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn and_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// Bitwise complement restricted to the valid length.
    pub fn not(&self) -> BitVec {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        out.clear_tail();
        out
    }

    fn clear_tail(&mut self) {
        let rem = self.len & 63;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Iterates the indices of set bits in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        iter_ones(&self.words)
    }
}

/// Iterates set-bit positions of a word slice.
pub(crate) fn iter_ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            }
        })
    })
}

/// Incremental XOR basis used for rank computations.
///
/// Each stored row has a distinct lowest set bit; inserting a vector reduces
/// it against the stored rows and keeps it if a nonzero remainder survives.
#[derive(Clone, Debug)]
pub struct XorBasis {
    width_words: usize,
    pivot_of_bit: Vec<u32>,
    rows: Vec<u64>,
}

const NO_PIVOT: u32 = u32::MAX;

impl XorBasis {
    pub fn new(bits: usize) -> Self {
        Self {
            width_words: words_for(bits),
            pivot_of_bit: vec![NO_PIVOT; bits.max(1)],
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len() / self.width_words.max(1)
    }

    /// Inserts `v` (a word slice of the basis width); returns whether it was independent.
    pub fn insert(&mut self, v: &mut [u64]) -> bool {
        let ww = self.width_words;
        debug_assert_eq!(v.len(), ww);
        loop {
            let Some(low) = lowest_bit(v) else {
                return false;
            };
            let p = self.pivot_of_bit[low];
            if p == NO_PIVOT {
                self.pivot_of_bit[low] = (self.rows.len() / ww) as u32;
                self.rows.extend_from_slice(v);
                return true;
            }
            let start = p as usize * ww;
            // both share `low` as lowest bit, so words below it are already zero
            for k in (low >> 6)..ww {
                v[k] ^= self.rows[start + k];
            }
        }
    }
}

#[inline]
fn lowest_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
}

/// A dense GF(2) matrix stored as bit-packed rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &b) in r.iter().enumerate() {
                if b {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.stride + (j >> 6)] >> (j & 63) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let w = &mut self.data[i * self.stride + (j >> 6)];
        let mask = 1u64 << (j & 63);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize, j: usize) {
        self.data[i * self.stride + (j >> 6)] ^= 1u64 << (j & 63);
    }

    /// XORs row `src` into row `dst`.
    pub fn xor_row_into(&mut self, src: usize, dst: usize) {
        if src == dst {
            self.row_mut(dst).fill(0);
            return;
        }
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s..src * s + s], &mut hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[..s] as &[u64], &mut lo[dst * s..dst * s + s])
        };
        for (d, x) in b.iter_mut().zip(a) {
            *d ^= x;
        }
    }

    /// XORs a word mask into row `dst`.
    pub fn xor_words_into(&mut self, mask: &[u64], dst: usize) {
        for (d, x) in self.row_mut(dst).iter_mut().zip(mask) {
            *d ^= x;
        }
    }

    pub fn row_ones(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        iter_ones(self.row(i))
    }

    pub fn row_count(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Rank over GF(2).
    pub fn rank(&self) -> usize {
        let mut basis = XorBasis::new(self.cols);
        let mut buf = vec![0u64; self.stride];
        for i in 0..self.rows {
            buf.copy_from_slice(self.row(i));
            basis.insert(&mut buf);
        }
        basis.rank()
    }

    /// Rank of the sub-block with rows `row_set` and columns selected by `col_mask`.
    pub fn block_rank(&self, row_set: impl IntoIterator<Item = usize>, col_mask: &BitVec) -> usize {
        debug_assert_eq!(col_mask.len(), self.cols);
        let mut basis = XorBasis::new(self.cols);
        let mut buf = vec![0u64; self.stride];
        for i in row_set {
            for (b, (r, m)) in buf.iter_mut().zip(self.row(i).iter().zip(col_mask.words())) {
                *b = r & m;
            }
            basis.insert(&mut buf);
        }
        basis.rank()
    }
}
