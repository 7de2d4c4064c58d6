//! Canonical labeling for small tournaments.
//!
//! The canonical form is the lexicographically smallest upper-triangle
//! bitstring (pair order `(0,1), (0,2), …, (n-2,n-1)`) over all vertex
//! relabelings. The search fixes one position at a time. Once the vertex at
//! position `k` is chosen, the smallest possible row `k` places its
//! in-neighbors before its out-neighbors inside every unresolved cell, so the
//! cells refine and only candidates producing the minimal row are branched on.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tournament::Tournament;

pub const MAX_CANON_N: usize = 16;

/// Label-invariant normal form. Ordering is by `n`, then by bitstring.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    n: u8,
    /// Pair `p` sits at bit `m - 1 - p`, so integer order is string order.
    bits: u128,
}

impl CanonicalForm {
    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn bitstring(&self) -> String {
        let m = self.pairs();
        (0..m)
            .map(|p| if (self.bits >> (m - 1 - p)) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn to_tournament(&self) -> Tournament {
        Tournament::from_bits(self.n(), &self.bitstring()).expect("canonical bits are well formed")
    }

    fn pairs(&self) -> usize {
        self.n() * (self.n().saturating_sub(1)) / 2
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm({}, {})", self.n, self.bitstring())
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.bitstring())
    }
}

impl Serialize for CanonicalForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.bitstring())
    }
}

struct Search {
    n: usize,
    out: [u16; MAX_CANON_N],
    inn: [u16; MAX_CANON_N],
    cur: [u32; MAX_CANON_N],
    cur_perm: [u8; MAX_CANON_N],
    best: Option<([u32; MAX_CANON_N], [u8; MAX_CANON_N])>,
}

impl Search {
    fn new(t: &Tournament) -> Self {
        let n = t.n();
        let all: u16 = if n == 16 { u16::MAX } else { (1u16 << n) - 1 };
        let mut out = [0u16; MAX_CANON_N];
        let mut inn = [0u16; MAX_CANON_N];
        for v in 0..n {
            out[v] = t.out_row(v)[0] as u16;
            inn[v] = !out[v] & all & !(1 << v);
        }
        Search {
            n,
            out,
            inn,
            cur: [0; MAX_CANON_N],
            cur_perm: [0; MAX_CANON_N],
            best: None,
        }
    }

    /// Row bits of `v` placed first in `cells[0]`, over the remaining positions.
    fn row_of(&self, v: usize, cells: &[u16]) -> u32 {
        let mut row = 0u32;
        for (idx, &cell) in cells.iter().enumerate() {
            let cell = if idx == 0 { cell & !(1 << v) } else { cell };
            let size = cell.count_ones();
            let ones = (cell & self.out[v]).count_ones();
            row = (row << size) | ((1u32 << ones) - 1);
        }
        row
    }

    fn prefix_cmp(&self, k: usize) -> std::cmp::Ordering {
        match &self.best {
            None => std::cmp::Ordering::Less,
            Some((b, _)) => self.cur[..k].cmp(&b[..k]),
        }
    }

    fn descend(&mut self, k: usize, cells: &[u16]) {
        let n = self.n;
        if k + 1 >= n {
            let last = cells.first().map(|c| c.trailing_zeros() as u8).unwrap_or(0);
            if n >= 1 {
                self.cur_perm[n - 1] = last;
            }
            let better = match &self.best {
                None => true,
                Some((b, _)) => self.cur[..n.saturating_sub(1)] < b[..n.saturating_sub(1)],
            };
            if better {
                self.best = Some((self.cur, self.cur_perm));
            }
            return;
        }
        let first = cells[0];
        let mut min_row = u32::MAX;
        let mut candidates: Vec<(usize, u32)> = Vec::with_capacity(first.count_ones() as usize);
        let mut c = first;
        while c != 0 {
            let v = c.trailing_zeros() as usize;
            c &= c - 1;
            let row = self.row_of(v, cells);
            min_row = min_row.min(row);
            candidates.push((v, row));
        }
        for (v, row) in candidates {
            if row != min_row {
                continue;
            }
            // Siblings may have improved `best`; recheck before descending.
            match self.prefix_cmp(k) {
                std::cmp::Ordering::Greater => return,
                std::cmp::Ordering::Equal => {
                    let b = self.best.as_ref().unwrap().0[k];
                    if row > b {
                        return;
                    }
                }
                std::cmp::Ordering::Less => {}
            }
            self.cur[k] = row;
            self.cur_perm[k] = v as u8;
            let mut next: Vec<u16> = Vec::with_capacity(cells.len() + 4);
            for (idx, &cell) in cells.iter().enumerate() {
                let cell = if idx == 0 { cell & !(1 << v) } else { cell };
                let lo = cell & self.inn[v];
                let hi = cell & self.out[v];
                if lo != 0 {
                    next.push(lo);
                }
                if hi != 0 {
                    next.push(hi);
                }
            }
            self.descend(k + 1, &next);
        }
    }
}

/// Canonical form plus a relabeling `perm` with `perm[old] = new` that maps
/// `t` onto it.
pub fn canonical_labeling(t: &Tournament) -> Result<(CanonicalForm, Vec<usize>)> {
    let n = t.n();
    if n > MAX_CANON_N {
        return Err(Error::UnsupportedSize {
            what: "canonical labeling",
            limit: MAX_CANON_N,
            got: n,
        });
    }
    let mut s = Search::new(t);
    let all: u16 = if n == 16 { u16::MAX } else { (1u16 << n) - 1 };
    s.descend(0, &[all]);
    let (rows, order) = s.best.expect("search visits at least one leaf");
    let mut bits = 0u128;
    for (k, &row) in rows.iter().enumerate().take(n.saturating_sub(1)) {
        let len = n - 1 - k;
        bits = (bits << len) | row as u128;
    }
    let mut perm = vec![0; n];
    for (pos, &v) in order.iter().enumerate().take(n) {
        perm[v as usize] = pos;
    }
    Ok((CanonicalForm { n: n as u8, bits }, perm))
}

pub fn canonical_form(t: &Tournament) -> Result<CanonicalForm> {
    canonical_labeling(t).map(|(c, _)| c)
}

/// Isomorphism test through canonical forms; different orders are simply
/// not isomorphic.
pub fn is_isomorphic(a: &Tournament, b: &Tournament) -> Result<bool> {
    if a.n() != b.n() {
        return Ok(false);
    }
    Ok(canonical_form(a)? == canonical_form(b)?)
}
