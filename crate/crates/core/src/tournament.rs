use std::fmt;

use crate::error::{Error, Result};

/// An orientation of the complete graph on `n` labeled vertices.
///
/// Row `v` is the out-neighborhood of `v`, packed into `u64` words.
/// Bits at positions `>= n` and the diagonal are always clear.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tournament {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

impl Tournament {
    /// Builds a tournament from a predicate: for `i < j`, `i -> j` iff `f(i, j)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut t = Self::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                if f(i, j) {
                    t.set_bit(i, j);
                } else {
                    t.set_bit(j, i);
                }
            }
        }
        t
    }

    /// All-zero rows; callers must orient every pair before handing it out.
    pub(crate) fn empty(n: usize) -> Self {
        let words = words_for(n);
        Tournament {
            n,
            words,
            rows: vec![0; n * words],
        }
    }

    pub(crate) fn from_rows(n: usize, rows: Vec<u64>) -> Self {
        let words = words_for(n);
        debug_assert_eq!(rows.len(), n * words);
        let t = Tournament { n, words, rows };
        debug_assert!(t.is_valid());
        t
    }

    /// Decodes the upper-triangle bitstring. Pairs `(i, j)`, `i < j`, are
    /// taken in lexicographic order; `'1'` means `i -> j`.
    pub fn from_bits(n: usize, bits: &str) -> Result<Self> {
        if n == 0 {
            return Err(Error::Malformed("tournament needs at least one vertex".into()));
        }
        let expected = n * (n - 1) / 2;
        if bits.len() != expected {
            return Err(Error::Malformed(format!(
                "bitstring length {} does not match n(n-1)/2 = {expected} for n = {n}",
                bits.len()
            )));
        }
        let bytes = bits.as_bytes();
        let mut t = Self::empty(n);
        let mut p = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                match bytes[p] {
                    b'1' => t.set_bit(i, j),
                    b'0' => t.set_bit(j, i),
                    c => {
                        return Err(Error::Malformed(format!(
                            "unexpected character {:?} at position {p}",
                            c as char
                        )))
                    }
                }
                p += 1;
            }
        }
        Ok(t)
    }

    pub fn to_bits(&self) -> String {
        let mut s = String::with_capacity(self.n * (self.n.saturating_sub(1)) / 2);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                s.push(if self.arc(i, j) { '1' } else { '0' });
            }
        }
        s
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub(crate) fn words(&self) -> usize {
        self.words
    }

    /// True iff the arc points `i -> j`.
    #[inline]
    pub fn arc(&self, i: usize, j: usize) -> bool {
        (self.rows[i * self.words + j / 64] >> (j % 64)) & 1 == 1
    }

    #[inline]
    fn set_bit(&mut self, i: usize, j: usize) {
        self.rows[i * self.words + j / 64] |= 1 << (j % 64);
    }

    #[inline]
    fn clear_bit(&mut self, i: usize, j: usize) {
        self.rows[i * self.words + j / 64] &= !(1 << (j % 64));
    }

    /// Orients the pair `{i, j}` as `i -> j`.
    pub fn set_arc(&mut self, i: usize, j: usize) {
        assert!(i != j && i < self.n && j < self.n);
        self.set_bit(i, j);
        self.clear_bit(j, i);
    }

    /// Reverses the single arc between `i` and `j`.
    pub fn flip(&mut self, i: usize, j: usize) {
        if self.arc(i, j) {
            self.set_arc(j, i);
        } else {
            self.set_arc(i, j);
        }
    }

    /// Out-neighborhood bitset of `v`.
    #[inline]
    pub fn out_row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    /// In-neighborhood bitset of `v`, computed as the complement of the out-row.
    pub fn in_row(&self, v: usize) -> Vec<u64> {
        let mask = self.vertex_mask();
        let mut row: Vec<u64> = self
            .out_row(v)
            .iter()
            .zip(&mask)
            .map(|(w, m)| !w & m)
            .collect();
        row[v / 64] &= !(1 << (v % 64));
        row
    }

    /// In-rows of every vertex, flattened with the same stride as the out-rows.
    pub(crate) fn in_rows(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.rows.len());
        for v in 0..self.n {
            out.extend(self.in_row(v));
        }
        out
    }

    /// Bitset with bits `0..n` set.
    pub(crate) fn vertex_mask(&self) -> Vec<u64> {
        let mut mask = vec![u64::MAX; self.words];
        let rem = self.n % 64;
        if rem != 0 {
            mask[self.words - 1] = (1u64 << rem) - 1;
        }
        if self.n == 0 {
            mask[0] = 0;
        }
        mask
    }

    #[inline]
    pub fn out_degree(&self, v: usize) -> usize {
        self.out_row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.out_degree(v)).collect()
    }

    pub fn out_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| u != v && self.arc(v, u))
    }

    pub fn in_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| u != v && self.arc(u, v))
    }

    /// Checks the tournament invariants: no loops, exactly one arc per pair,
    /// no stray bits beyond `n`.
    pub fn is_valid(&self) -> bool {
        let mask = self.vertex_mask();
        for v in 0..self.n {
            if self.arc(v, v) {
                return false;
            }
            if self.out_row(v).iter().zip(&mask).any(|(w, m)| w & !m != 0) {
                return false;
            }
        }
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.arc(i, j) == self.arc(j, i) {
                    return false;
                }
            }
        }
        let total: usize = self.out_degrees().iter().sum();
        total == self.n * (self.n.saturating_sub(1)) / 2
    }

    /// The converse tournament: every arc reversed.
    pub fn reverse(&self) -> Self {
        let mut rows = Vec::with_capacity(self.rows.len());
        for v in 0..self.n {
            rows.extend(self.in_row(v));
        }
        Tournament::from_rows(self.n, rows)
    }

    /// Subtournament on `vertices`, relabeled in increasing vertex order.
    pub fn induce(&self, vertices: &[usize]) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Malformed("induced subset must be non-empty".into()));
        }
        let mut s = vertices.to_vec();
        s.sort_unstable();
        if let Some(&bad) = s.iter().find(|&&v| v >= self.n) {
            return Err(Error::Malformed(format!(
                "vertex {bad} out of range for n = {}",
                self.n
            )));
        }
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Malformed("induced subset has repeated vertices".into()));
        }
        Ok(self.induce_ordered(&s))
    }

    /// Subtournament where new vertex `k` is old vertex `vertices[k]`. No checks.
    pub(crate) fn induce_ordered(&self, vertices: &[usize]) -> Self {
        Tournament::from_fn(vertices.len(), |a, b| self.arc(vertices[a], vertices[b]))
    }

    /// Removes `v`; vertices above `v` shift down by one.
    pub fn delete_vertex(&self, v: usize) -> Result<Self> {
        if v >= self.n {
            return Err(Error::Malformed(format!("vertex {v} out of range")));
        }
        if self.n == 1 {
            return Err(Error::Malformed("cannot delete the only vertex".into()));
        }
        let keep: Vec<usize> = (0..self.n).filter(|&u| u != v).collect();
        Ok(self.induce_ordered(&keep))
    }

    /// Appends a twin `n` of `v`: same arcs as `v` to every other vertex,
    /// and `v -> n` iff `twin_arc_to_copy`.
    pub fn duplicate_vertex(&self, v: usize, twin_arc_to_copy: bool) -> Result<Self> {
        if v >= self.n {
            return Err(Error::Malformed(format!("vertex {v} out of range")));
        }
        let m = self.n + 1;
        let copy = self.n;
        let t = Tournament::from_fn(m, |i, j| {
            // i < j, so only j can be the copy
            if j == copy {
                if i == v {
                    twin_arc_to_copy
                } else {
                    self.arc(i, v)
                }
            } else {
                self.arc(i, j)
            }
        });
        Ok(t)
    }

    /// Relabels vertex `i` as `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::Malformed("permutation length mismatch".into()));
        }
        let mut inverse = vec![usize::MAX; self.n];
        for (i, &p) in perm.iter().enumerate() {
            if p >= self.n || inverse[p] != usize::MAX {
                return Err(Error::Malformed("not a permutation".into()));
            }
            inverse[p] = i;
        }
        Ok(Tournament::from_fn(self.n, |a, b| self.arc(inverse[a], inverse[b])))
    }

    /// True iff no induced cyclic triangle exists (score sequence is 0..n-1).
    pub fn is_transitive(&self) -> bool {
        let mut seen = vec![false; self.n];
        for d in self.out_degrees() {
            if seen[d] {
                return false;
            }
            seen[d] = true;
        }
        true
    }
}

impl fmt::Debug for Tournament {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n <= 32 {
            write!(f, "Tournament({}, {})", self.n, self.to_bits())
        } else {
            write!(f, "Tournament(n = {})", self.n)
        }
    }
}
