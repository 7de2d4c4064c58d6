//! Exact induced 3- and 4-vertex censuses.
//!
//! [`census_bruteforce`] classifies every subset directly and is the oracle.
//! [`census_fast`] counts C3 from the score sequence, C3+ as the sum over
//! apex vertices of the cyclic triangles in each out-neighborhood (C3- the
//! same over in-neighborhoods), and then recovers C4 and TT4 from the exact
//! lifting identity
//!
//! ```text
//! c3 * (n - 3) = 2 * c4 + c3plus + c3minus
//! ```

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::canon::{canonical_form, CanonicalForm};
use crate::error::{Error, Result};
use crate::pattern::PatternId;
use crate::rational::{binomial, ratio, Exact};
use crate::tournament::Tournament;

/// Upper bound on `(n choose k)` for pattern counting by subset enumeration.
pub const MAX_ENUMERATED_SUBSETS: u128 = 100_000_000;

/// Exact counts of every 3- and 4-vertex induced type. The 4-vertex fields
/// are zero (and serialised as `null`) when `n < 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Census {
    pub n: usize,
    pub tt3: u128,
    pub c3: u128,
    pub tt4: u128,
    pub c3plus: u128,
    pub c3minus: u128,
    pub c4: u128,
}

impl Census {
    pub fn has_four(&self) -> bool {
        self.n >= 4
    }

    pub fn count(&self, pattern: &PatternId) -> Option<u128> {
        Some(match pattern {
            PatternId::Tt3 => self.tt3,
            PatternId::C3 => self.c3,
            PatternId::Tt4 => self.tt4,
            PatternId::C3Plus => self.c3plus,
            PatternId::C3Minus => self.c3minus,
            PatternId::C4 => self.c4,
            PatternId::Custom(_) => return None,
        })
    }

    /// Both integer lifting identities (C3 and TT3 lifted to 4-sets) plus the
    /// two subset totals. Vacuously true for `n < 4` when the totals agree.
    pub fn satisfies_lifting_identities(&self) -> bool {
        let n = self.n as u128;
        if self.tt3 + self.c3 != binomial(n, 3) {
            return false;
        }
        if !self.has_four() {
            return true;
        }
        if self.tt4 + self.c3plus + self.c3minus + self.c4 != binomial(n, 4) {
            return false;
        }
        let c3_lift = self.c3 * (n - 3) == 2 * self.c4 + self.c3plus + self.c3minus;
        let tt3_lift =
            self.tt3 * (n - 3) == 4 * self.tt4 + 3 * (self.c3plus + self.c3minus) + 2 * self.c4;
        c3_lift && tt3_lift
    }

    /// Reversal swaps the roles of C3+ and C3-.
    pub fn reversed(&self) -> Census {
        Census {
            c3plus: self.c3minus,
            c3minus: self.c3plus,
            ..*self
        }
    }

    pub fn densities(&self) -> DensityReport {
        let n = self.n as u128;
        let three = binomial(n, 3);
        let four = binomial(n, 4);
        let d = |c: u128, total: u128| {
            if total == 0 {
                None
            } else {
                Some(ratio(c, total))
            }
        };
        DensityReport {
            tt3: d(self.tt3, three),
            c3: d(self.c3, three),
            tt4: d(self.tt4, four),
            c3plus: d(self.c3plus, four),
            c3minus: d(self.c3minus, four),
            c4: d(self.c4, four),
        }
    }

    pub fn to_json(&self) -> Value {
        let four = |c: u128| {
            if self.has_four() {
                json!(c)
            } else {
                Value::Null
            }
        };
        json!({
            "tt3": self.tt3,
            "c3": self.c3,
            "tt4": four(self.tt4),
            "c3plus": four(self.c3plus),
            "c3minus": four(self.c3minus),
            "c4": four(self.c4),
        })
    }
}

/// Exact densities `count / (n choose |H|)`; `None` when the host is smaller
/// than the pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport {
    pub tt3: Option<BigRational>,
    pub c3: Option<BigRational>,
    pub tt4: Option<BigRational>,
    pub c3plus: Option<BigRational>,
    pub c3minus: Option<BigRational>,
    pub c4: Option<BigRational>,
}

impl DensityReport {
    pub fn entries(&self) -> [(&'static str, &Option<BigRational>); 6] {
        [
            ("tt3", &self.tt3),
            ("c3", &self.c3),
            ("tt4", &self.tt4),
            ("c3plus", &self.c3plus),
            ("c3minus", &self.c3minus),
            ("c4", &self.c4),
        ]
    }

    pub fn approx(&self, pattern: &PatternId) -> Option<f64> {
        let r = match pattern {
            PatternId::Tt3 => &self.tt3,
            PatternId::C3 => &self.c3,
            PatternId::Tt4 => &self.tt4,
            PatternId::C3Plus => &self.c3plus,
            PatternId::C3Minus => &self.c3minus,
            PatternId::C4 => &self.c4,
            PatternId::Custom(_) => return None,
        };
        r.as_ref().map(crate::rational::to_f64)
    }

    pub fn to_json(&self) -> Value {
        let mut map = serde_json::Map::new();
        for (name, r) in self.entries() {
            map.insert(
                name.to_string(),
                match r {
                    Some(r) => serde_json::to_value(Exact::from(r)).unwrap(),
                    None => Value::Null,
                },
            );
        }
        Value::Object(map)
    }
}

/// `{n, counts, densities}` document used by the `count` command.
pub fn census_document(c: &Census) -> Value {
    json!({
        "n": c.n,
        "counts": c.to_json(),
        "densities": c.densities().to_json(),
    })
}

/// Per-vertex C3+ loads, split by the role the vertex plays in each copy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexLoad {
    /// Copies containing `v`.
    pub loads: Vec<u128>,
    /// Copies where `v` is the source: cyclic triangles inside `N+(v)`.
    pub apex: Vec<u128>,
    /// Copies where `v` is on the cyclic triangle.
    pub cycle: Vec<u128>,
}

impl VertexLoad {
    pub fn total(&self) -> u128 {
        self.loads.iter().sum()
    }

    /// Largest minus smallest load.
    pub fn spread(&self) -> u128 {
        let max = self.loads.iter().copied().max().unwrap_or(0);
        let min = self.loads.iter().copied().min().unwrap_or(0);
        max - min
    }
}

/// The four 4-vertex tournament types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FourType {
    Tt4,
    C3Plus,
    C3Minus,
    C4,
}

impl FourType {
    fn from_sorted_scores(s: [u8; 4]) -> FourType {
        match s {
            [0, 1, 2, 3] => FourType::Tt4,
            [1, 1, 1, 3] => FourType::C3Plus,
            [0, 2, 2, 2] => FourType::C3Minus,
            [1, 1, 2, 2] => FourType::C4,
            _ => unreachable!("not a 4-vertex score sequence: {s:?}"),
        }
    }

    pub fn pattern(self) -> PatternId {
        match self {
            FourType::Tt4 => PatternId::Tt4,
            FourType::C3Plus => PatternId::C3Plus,
            FourType::C3Minus => PatternId::C3Minus,
            FourType::C4 => PatternId::C4,
        }
    }
}

/// Pair order within a sorted 4-set `[a, b, c, d]`: ab, ac, ad, bc, bd, cd.
const FOUR_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn four_type_of_mask(mask: u8) -> FourType {
    let mut scores = [0u8; 4];
    for (bit, &(x, y)) in FOUR_PAIRS.iter().enumerate() {
        if (mask >> bit) & 1 == 1 {
            scores[x] += 1;
        } else {
            scores[y] += 1;
        }
    }
    scores.sort_unstable();
    FourType::from_sorted_scores(scores)
}

static FOUR_TABLE: std::sync::LazyLock<[FourType; 64]> =
    std::sync::LazyLock::new(|| std::array::from_fn(|m| four_type_of_mask(m as u8)));

/// Type of the 4-set `q` (any vertex order).
#[inline]
pub fn four_type(t: &Tournament, q: [usize; 4]) -> FourType {
    let mut mask = 0u8;
    for (bit, &(x, y)) in FOUR_PAIRS.iter().enumerate() {
        if t.arc(q[x], q[y]) {
            mask |= 1 << bit;
        }
    }
    FOUR_TABLE[mask as usize]
}

#[inline]
fn is_cyclic_triple(t: &Tournament, a: usize, b: usize, c: usize) -> bool {
    let ab = t.arc(a, b);
    ab == t.arc(b, c) && ab == t.arc(c, a)
}

/// Direct classification of every 3- and 4-subset. `O(n^4)`.
pub fn census_bruteforce(t: &Tournament) -> Census {
    let n = t.n();
    let mut c = Census {
        n,
        tt3: 0,
        c3: 0,
        tt4: 0,
        c3plus: 0,
        c3minus: 0,
        c4: 0,
    };
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                if is_cyclic_triple(t, i, j, k) {
                    c.c3 += 1;
                } else {
                    c.tt3 += 1;
                }
                for l in (k + 1)..n {
                    let q = [i, j, k, l];
                    let mut scores = [0u8; 4];
                    for x in 0..4 {
                        for y in 0..4 {
                            if x != y && t.arc(q[x], q[y]) {
                                scores[x] += 1;
                            }
                        }
                    }
                    scores.sort_unstable();
                    match scores {
                        [0, 1, 2, 3] => c.tt4 += 1,
                        [1, 1, 1, 3] => c.c3plus += 1,
                        [0, 2, 2, 2] => c.c3minus += 1,
                        [1, 1, 2, 2] => c.c4 += 1,
                        _ => unreachable!(),
                    }
                }
            }
        }
    }
    c
}

#[inline]
fn and_count(a: &[u64], b: &[u64]) -> u128 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as u128).sum()
}

/// Number of cyclic triangles inside the set `row` (a neighborhood of some
/// vertex), where `rows` supplies the matching neighborhood of each member.
fn cyclic_triangles_within(row: &[u64], rows: &[u64], words: usize) -> u128 {
    let size: u128 = row.iter().map(|w| w.count_ones() as u128).sum();
    let mut transitive = 0u128;
    for (wi, &word) in row.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let u = wi * 64 + bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let d = and_count(&rows[u * words..(u + 1) * words], row);
            transitive += d * d.saturating_sub(1) / 2;
        }
    }
    binomial(size, 3) - transitive
}

/// Census from score sequences and neighborhood triangle counts; identical to
/// [`census_bruteforce`] on every input. Parallel over vertices.
pub fn census_fast(t: &Tournament) -> Census {
    let n = t.n();
    let words = t.words();
    let out: Vec<u64> = (0..n).flat_map(|v| t.out_row(v).to_vec()).collect();
    let inn = t.in_rows();

    let tt3: u128 = t
        .out_degrees()
        .iter()
        .map(|&d| binomial(d as u128, 2))
        .sum();
    let c3 = binomial(n as u128, 3) - tt3;

    let (c3plus, c3minus) = (0..n)
        .into_par_iter()
        .map(|v| {
            let plus = cyclic_triangles_within(&out[v * words..(v + 1) * words], &out, words);
            let minus = cyclic_triangles_within(&inn[v * words..(v + 1) * words], &inn, words);
            (plus, minus)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let (tt4, c4) = if n >= 4 {
        let lifted = c3 * (n as u128 - 3);
        let twice_c4 = lifted - c3plus - c3minus;
        debug_assert_eq!(twice_c4 % 2, 0);
        let c4 = twice_c4 / 2;
        (binomial(n as u128, 4) - c3plus - c3minus - c4, c4)
    } else {
        (0, 0)
    };
    Census {
        n,
        tt3,
        c3,
        tt4,
        c3plus,
        c3minus,
        c4,
    }
}

/// Checks both integer lifting identities against a brute-force census, so
/// the check is independent of the fast path (which relies on them).
pub fn verify_lifting_identities(t: &Tournament) -> bool {
    census_bruteforce(t).satisfies_lifting_identities()
}

/// Iterates over all `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // rightmost position that can still advance
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Decides whether a vertex subset induces a given pattern.
#[derive(Clone, Debug)]
pub(crate) enum Matcher {
    Trivial(usize),
    Three { cyclic: bool },
    Four(FourType),
    General { k: usize, form: CanonicalForm },
}

impl Matcher {
    pub fn new(pattern: &PatternId) -> Result<Self> {
        let h = pattern.tournament();
        let k = h.n();
        Ok(match k {
            1 | 2 => Matcher::Trivial(k),
            3 => Matcher::Three {
                cyclic: !h.is_transitive(),
            },
            4 => Matcher::Four(four_type(&h, [0, 1, 2, 3])),
            _ => Matcher::General {
                k,
                form: canonical_form(&h)?,
            },
        })
    }

    pub fn order(&self) -> usize {
        match self {
            Matcher::Trivial(k) => *k,
            Matcher::Three { .. } => 3,
            Matcher::Four(_) => 4,
            Matcher::General { k, .. } => *k,
        }
    }

    #[inline]
    pub fn matches(&self, t: &Tournament, s: &[usize]) -> bool {
        match self {
            Matcher::Trivial(_) => true,
            Matcher::Three { cyclic } => is_cyclic_triple(t, s[0], s[1], s[2]) == *cyclic,
            Matcher::Four(ty) => four_type(t, [s[0], s[1], s[2], s[3]]) == *ty,
            Matcher::General { form, .. } => {
                canonical_form(&t.induce_ordered(s)).is_ok_and(|c| c == *form)
            }
        }
    }
}

/// Counts subsets inducing `pattern` by direct enumeration (any order up to 8).
pub(crate) fn count_by_enumeration(matcher: &Matcher, t: &Tournament) -> u128 {
    let n = t.n();
    let k = matcher.order();
    if k > n {
        return 0;
    }
    // split on the smallest element so the work parallelises
    (0..=(n - k))
        .into_par_iter()
        .map(|first| {
            let rest = n - first - 1;
            let mut count = 0u128;
            let mut subset = vec![first; k];
            for_each_subset(rest, k - 1, |tail| {
                for (slot, &x) in subset[1..].iter_mut().zip(tail) {
                    *slot = first + 1 + x;
                }
                if matcher.matches(t, &subset) {
                    count += 1;
                }
            });
            count
        })
        .sum()
}

/// Exact number of `|H|`-subsets of `t` inducing `pattern`.
pub fn count_pattern(pattern: &PatternId, t: &Tournament) -> Result<u128> {
    let k = pattern.order();
    if k > t.n() {
        return Ok(0);
    }
    if let PatternId::Custom(h) = pattern {
        if let Some(named) = named_equivalent(h)? {
            return count_pattern(&named, t);
        }
        let subsets = binomial(t.n() as u128, k as u128);
        if subsets > MAX_ENUMERATED_SUBSETS {
            return Err(Error::UnsupportedSize {
                what: "subset enumeration for custom pattern",
                limit: MAX_ENUMERATED_SUBSETS as usize,
                got: usize::try_from(subsets).unwrap_or(usize::MAX),
            });
        }
        return Ok(count_by_enumeration(&Matcher::new(pattern)?, t));
    }
    Ok(census_fast(t).count(pattern).expect("named pattern"))
}

fn named_equivalent(h: &Tournament) -> Result<Option<PatternId>> {
    if h.n() != 3 && h.n() != 4 {
        return Ok(None);
    }
    let form = canonical_form(h)?;
    for p in [
        PatternId::Tt3,
        PatternId::C3,
        PatternId::Tt4,
        PatternId::C3Plus,
        PatternId::C3Minus,
        PatternId::C4,
    ] {
        if p.order() == h.n() && canonical_form(&p.tournament())? == form {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// Per-vertex C3+ loads from the two roles a vertex can play: the source
/// (a cyclic triangle inside `N+(v)`) or a cycle vertex (a transitive triple
/// whose source and sink lie in `N-(v)` and whose middle lies in `N+(v)`).
pub fn vertex_loads_c3plus(t: &Tournament) -> VertexLoad {
    let n = t.n();
    let words = t.words();
    let out: Vec<u64> = (0..n).flat_map(|v| t.out_row(v).to_vec()).collect();
    let inn = t.in_rows();

    let per_vertex: Vec<(u128, u128)> = (0..n)
        .into_par_iter()
        .map(|v| {
            let out_v = &out[v * words..(v + 1) * words];
            let in_v = &inn[v * words..(v + 1) * words];
            let apex = cyclic_triangles_within(out_v, &out, words);

            // cyclic triangles v -> m -> x -> v, each weighted by the number
            // of common in-neighbors of all three
            let mut cycle = 0u128;
            let mut scratch = vec![0u64; words];
            for (wi, &word) in out_v.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let m = wi * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let out_m = &out[m * words..(m + 1) * words];
                    let in_m = &inn[m * words..(m + 1) * words];
                    for k in 0..words {
                        scratch[k] = in_v[k] & in_m[k];
                    }
                    for (xi, (&om, &iv)) in out_m.iter().zip(in_v).enumerate() {
                        let mut xs = om & iv;
                        while xs != 0 {
                            let x = xi * 64 + xs.trailing_zeros() as usize;
                            xs &= xs - 1;
                            cycle += and_count(&scratch, &inn[x * words..(x + 1) * words]);
                        }
                    }
                }
            }
            (apex, cycle)
        })
        .collect();
    let apex: Vec<u128> = per_vertex.iter().map(|p| p.0).collect();
    let cycle: Vec<u128> = per_vertex.iter().map(|p| p.1).collect();
    let loads = apex.iter().zip(&cycle).map(|(a, c)| a + c).collect();
    VertexLoad { loads, apex, cycle }
}

pub(crate) struct PairCounter<'a> {
    t: &'a Tournament,
    words: usize,
    inn: Vec<u64>,
}

impl<'a> PairCounter<'a> {
    pub fn new(t: &'a Tournament) -> Self {
        PairCounter {
            t,
            words: t.words(),
            inn: t.in_rows(),
        }
    }

    fn in_row(&self, v: usize) -> &[u64] {
        &self.inn[v * self.words..(v + 1) * self.words]
    }

    /// Number of C3+ copies containing both `v` and `w`.
    pub fn count(&self, v: usize, w: usize) -> u128 {
        let t = self.t;
        let n = t.n();
        let words = self.words;
        let mut twice = 0u128;
        let mut exclude = vec![u64::MAX; words];
        exclude[v / 64] &= !(1 << (v % 64));
        exclude[w / 64] &= !(1 << (w % 64));
        for a in 0..n {
            if a == v || a == w {
                continue;
            }
            let q = [v, w, a];
            for pattern in 0u8..8 {
                // bit i set: b -> q[i]
                let mut scores = [0u8; 4];
                for x in 0..3 {
                    for y in 0..3 {
                        if x != y && t.arc(q[x], q[y]) {
                            scores[x] += 1;
                        }
                    }
                    if (pattern >> x) & 1 == 1 {
                        scores[3] += 1;
                    } else {
                        scores[x] += 1;
                    }
                }
                scores.sort_unstable();
                if scores != [1, 1, 1, 3] {
                    continue;
                }
                let mut total = 0u128;
                for k in 0..words {
                    let mut m = exclude[k];
                    if k == a / 64 {
                        m &= !(1 << (a % 64));
                    }
                    for (i, &x) in q.iter().enumerate() {
                        m &= if (pattern >> i) & 1 == 1 {
                            self.in_row(x)[k]
                        } else {
                            t.out_row(x)[k]
                        };
                    }
                    total += m.count_ones() as u128;
                }
                twice += total;
            }
        }
        twice / 2
    }
}

/// Number of induced C3+ containing both `v` and `w`.
pub fn pair_count_c3plus(t: &Tournament, v: usize, w: usize) -> Result<u128> {
    if v == w {
        return Err(Error::Malformed("pair count needs two distinct vertices".into()));
    }
    if v >= t.n() || w >= t.n() {
        return Err(Error::Malformed(format!("vertex out of range for n = {}", t.n())));
    }
    Ok(PairCounter::new(t).count(v, w))
}

/// Full symmetric matrix of pair counts (row-major, zero diagonal).
pub fn pair_counts_c3plus(t: &Tournament) -> Vec<u128> {
    let n = t.n();
    let pc = PairCounter::new(t);
    let upper: Vec<Vec<u128>> = (0..n)
        .into_par_iter()
        .map(|v| ((v + 1)..n).map(|w| pc.count(v, w)).collect())
        .collect();
    let mut m = vec![0u128; n * n];
    for (v, row) in upper.iter().enumerate() {
        for (off, &c) in row.iter().enumerate() {
            let w = v + 1 + off;
            m[v * n + w] = c;
            m[w * n + v] = c;
        }
    }
    m
}
