//! Bit-packed linear algebra over GF(2).

use std::fmt;

/// A fixed-length bit vector packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut b = Bits::zeros(len);
        for i in idx {
            b.flip(i);
        }
        b
    }

    pub fn from_bools(v: &[bool]) -> Self {
        let mut b = Bits::zeros(v.len());
        for (i, &x) in v.iter().enumerate() {
            if x {
                b.set(i, true);
            }
        }
        b
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i & 63);
        if v {
            self.words[i >> 6] |= m;
        } else {
            self.words[i >> 6] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn and_parity(&self, other: &Bits) -> bool {
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
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

    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn first_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + t)
                }
            })
        })
    }

    pub fn ones(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    /// Grow or shrink, keeping the low bits.
    pub fn resize(&mut self, len: usize) {
        self.words.resize(len.div_ceil(64), 0);
        self.len = len;
        let r = len & 63;
        if r != 0 {
            let last = self.words.len() - 1;
            self.words[last] &= (1u64 << r) - 1;
        }
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "Bits({s})")
    }
}

/// Dense row-major binary matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: Vec<Bits>,
    ncols: usize,
}

/// Result of reduced row-echelon elimination.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub matrix: BitMatrix,
    pub pivots: Vec<usize>,
}

impl BitMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        BitMatrix { rows: vec![Bits::zeros(ncols); nrows], ncols }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<Bits>, ncols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == ncols));
        BitMatrix { rows, ncols }
    }

    pub fn from_dense(rows: &[Vec<u8>]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| Bits::from_indices(ncols, r.iter().enumerate().filter(|(_, &v)| v != 0).map(|(i, _)| i)))
            .collect();
        BitMatrix { rows, ncols }
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        self.rows.iter().map(|r| (0..self.ncols).map(|c| r.get(c) as u8).collect()).collect()
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.rows[r].set(c, v)
    }

    pub fn row(&self, r: usize) -> &Bits {
        &self.rows[r]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut Bits {
        &mut self.rows[r]
    }

    pub fn rows(&self) -> &[Bits] {
        &self.rows
    }

    pub fn push_row(&mut self, row: Bits) {
        assert_eq!(row.len(), self.ncols);
        self.rows.push(row);
    }

    pub fn column(&self, c: usize) -> Bits {
        Bits::from_indices(self.nrows(), (0..self.nrows()).filter(|&r| self.get(r, c)))
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.ncols, self.nrows());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.iter_ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.ncols, other.nrows());
        let mut out = BitMatrix::zeros(self.nrows(), other.ncols);
        for (r, row) in self.rows.iter().enumerate() {
            for k in row.iter_ones() {
                out.rows[r].xor_assign(&other.rows[k]);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &Bits) -> Bits {
        assert_eq!(self.ncols, v.len());
        Bits::from_indices(self.nrows(), (0..self.nrows()).filter(|&r| self.rows[r].and_parity(v)))
    }

    pub fn add(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.ncols, other.ncols);
        assert_eq!(self.nrows(), other.nrows());
        let mut out = self.clone();
        for (a, b) in out.rows.iter_mut().zip(&other.rows) {
            a.xor_assign(b);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.nrows() == self.ncols && *self == BitMatrix::identity(self.ncols)
    }

    pub fn pow(&self, e: u64) -> BitMatrix {
        assert_eq!(self.nrows(), self.ncols);
        let mut acc = BitMatrix::identity(self.ncols);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.nrows() + other.nrows(), self.ncols + other.ncols);
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.iter_ones() {
                out.set(r, c, true);
            }
        }
        for (r, row) in other.rows.iter().enumerate() {
            for c in row.iter_ones() {
                out.set(self.nrows() + r, self.ncols + c, true);
            }
        }
        out
    }

    /// Horizontal concatenation.
    pub fn hstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.nrows(), other.nrows());
        let ncols = self.ncols + other.ncols;
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut r = a.clone();
                r.resize(ncols);
                for c in b.iter_ones() {
                    r.set(self.ncols + c, true);
                }
                r
            })
            .collect();
        BitMatrix { rows, ncols }
    }

    pub fn vstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.ncols, other.ncols);
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        BitMatrix { rows, ncols: self.ncols }
    }

    /// Reduced row-echelon form, pivoting on columns left to right.
    pub fn rref(&self) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.ncols {
            if r == m.nrows() {
                break;
            }
            let Some(p) = (r..m.nrows()).find(|&i| m.rows[i].get(c)) else {
                continue;
            };
            m.rows.swap(r, p);
            let pivot = m.rows[r].clone();
            for i in 0..m.nrows() {
                if i != r && m.rows[i].get(c) {
                    m.rows[i].xor_assign(&pivot);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        // Forward elimination only.
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for c in 0..self.ncols {
            let Some(p) = (rank..rows.len()).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for row in rows.iter_mut().skip(rank + 1) {
                if row.get(c) {
                    row.xor_assign(&pivot);
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Basis of the right null space {v : M v = 0}, one basis vector per row.
    pub fn nullspace(&self) -> BitMatrix {
        let e = self.rref();
        let mut is_pivot = vec![false; self.ncols];
        for &p in &e.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.ncols).filter(|&c| !is_pivot[c]) {
            let mut v = Bits::zeros(self.ncols);
            v.set(free, true);
            for (r, &p) in e.pivots.iter().enumerate() {
                if e.matrix.get(r, free) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        BitMatrix { rows: basis, ncols: self.ncols }
    }

    /// Some x with M x = b, or None when b is outside the column space.
    pub fn solve(&self, b: &Bits) -> Option<Bits> {
        assert_eq!(b.len(), self.nrows());
        let aug = self.hstack(&BitMatrix::from_rows(
            (0..self.nrows()).map(|r| Bits::from_indices(1, b.get(r).then_some(0))).collect(),
            1,
        ));
        let e = aug.rref();
        if e.pivots.last() == Some(&self.ncols) {
            return None;
        }
        let mut x = Bits::zeros(self.ncols);
        for (r, &p) in e.pivots.iter().enumerate() {
            if e.matrix.get(r, self.ncols) {
                x.set(p, true);
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<BitMatrix> {
        let n = self.nrows();
        if n != self.ncols {
            return None;
        }
        let e = self.hstack(&BitMatrix::identity(n)).rref();
        if e.pivots.len() < n || e.pivots[n - 1] != n - 1 {
            return None;
        }
        let rows = e
            .matrix
            .rows
            .iter()
            .map(|r| Bits::from_indices(n, r.iter_ones().filter(|&c| c >= n).map(|c| c - n)))
            .collect();
        Some(BitMatrix { rows, ncols: n })
    }

    /// Row space membership.
    pub fn row_space_contains(&self, v: &Bits) -> bool {
        let mut m = self.clone();
        m.push_row(v.clone());
        m.rank() == self.rank()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.nrows(), self.ncols)?;
        for r in &self.rows {
            let s: String = (0..self.ncols).map(|c| if r.get(c) { '1' } else { '.' }).collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

/// Incremental basis supporting membership tests and decomposition.
///
/// Each stored vector is reduced against earlier pivots; `combo` records
/// which inserted vectors were summed to obtain it.
#[derive(Clone, Debug)]
pub struct IncrementalBasis {
    len: usize,
    rows: Vec<(usize, Bits, Bits)>,
    inserted: usize,
    track: usize,
}

impl IncrementalBasis {
    /// `track` bounds how many insertions are tracked in the combination vectors.
    pub fn new(len: usize, track: usize) -> Self {
        IncrementalBasis { len, rows: Vec::new(), inserted: 0, track }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v`; returns the residual and the set of inserted vectors used.
    pub fn reduce(&self, v: &Bits) -> (Bits, Bits) {
        let mut v = v.clone();
        let mut combo = Bits::zeros(self.track);
        for (p, row, c) in &self.rows {
            if v.get(*p) {
                v.xor_assign(row);
                combo.xor_assign(c);
            }
        }
        (v, combo)
    }

    /// Insert `v`. Returns `Err(combo)` when `v` is already in the span,
    /// with `combo` the inserted vectors summing to it.
    pub fn insert(&mut self, v: &Bits) -> Result<(), Bits> {
        assert_eq!(v.len(), self.len);
        let id = self.inserted;
        self.inserted += 1;
        let (r, mut combo) = self.reduce(v);
        match r.first_one() {
            None => Err(combo),
            Some(p) => {
                if id < self.track {
                    combo.flip(id);
                }
                // Keep earlier rows reduced in column p.
                for (_, row, c) in self.rows.iter_mut() {
                    if row.get(p) {
                        row.xor_assign(&r);
                        c.xor_assign(&combo);
                    }
                }
                self.rows.push((p, r, combo));
                Ok(())
            }
        }
    }
}
