//! Generators: transitive tournaments, carousels, seeded random tournaments
//! and the iterated blow-up whose sink side is random.

use std::collections::BTreeSet;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::closed_alpha;
use crate::canon::{canonical_form, CanonicalForm, MAX_CANON_N};
use crate::error::{Error, Result};
use crate::tournament::{words_for, Tournament};

/// `i -> j` iff `i < j`.
pub fn transitive(n: usize) -> Tournament {
    Tournament::from_fn(n, |_, _| true)
}

/// Carousel parameters. Odd `n` needs no diagonal bits; for even `n`, bit
/// `i` (for `i < n/2`) orients the antipodal pair `v_i -> v_{i+n/2}` when set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CarouselSpec {
    pub n: usize,
    pub diagonal_bits: Option<Vec<bool>>,
}

impl CarouselSpec {
    pub fn build(&self) -> Result<Tournament> {
        let n = self.n;
        if n < 3 {
            return Err(Error::Malformed(format!("carousel needs n >= 3, got {n}")));
        }
        match (&self.diagonal_bits, n % 2) {
            (None, 1) => Ok(odd_carousel(n)),
            (Some(_), 1) => Err(Error::Malformed("odd carousels take no diagonal bits".into())),
            (Some(bits), _) if bits.len() == n / 2 => Ok(even_carousel(n, bits)),
            (Some(bits), _) => Err(Error::Malformed(format!(
                "even carousel on {n} vertices needs {} diagonal bits, got {}",
                n / 2,
                bits.len()
            ))),
            (None, _) => Err(Error::Malformed("even carousels need diagonal bits".into())),
        }
    }
}

fn odd_carousel(n: usize) -> Tournament {
    Tournament::from_fn(n, |i, j| (j - i) <= (n - 1) / 2)
}

fn even_carousel(n: usize, bits: &[bool]) -> Tournament {
    let half = n / 2;
    Tournament::from_fn(n, |i, j| {
        let d = j - i;
        if d == half {
            bits[i]
        } else {
            d < half
        }
    })
}

/// The distinguished carousel `C_n`: the arc rule for odd `n`, and for even
/// `n` the odd carousel on `n + 1` vertices with its last vertex deleted.
pub fn carousel(n: usize) -> Tournament {
    assert!(n >= 3, "carousel needs n >= 3");
    if n % 2 == 1 {
        odd_carousel(n)
    } else {
        odd_carousel(n + 1)
            .delete_vertex(n)
            .expect("vertex n exists in C_{n+1}")
    }
}

/// Every carousel on `n` vertices up to isomorphism, sorted by canonical form.
pub fn carousel_class(n: usize) -> Result<Vec<CanonicalForm>> {
    if n < 3 {
        return Err(Error::Malformed(format!("carousel needs n >= 3, got {n}")));
    }
    if n > MAX_CANON_N {
        return Err(Error::UnsupportedSize {
            what: "carousel class",
            limit: MAX_CANON_N,
            got: n,
        });
    }
    if n % 2 == 1 {
        return Ok(vec![canonical_form(&odd_carousel(n))?]);
    }
    let half = n / 2;
    let forms: Result<BTreeSet<CanonicalForm>> = (0u32..(1 << half))
        .map(|code| {
            let bits: Vec<bool> = (0..half).map(|i| (code >> i) & 1 == 1).collect();
            canonical_form(&even_carousel(n, &bits))
        })
        .collect();
    Ok(forms?.into_iter().collect())
}

/// Every vertex has a transitive in- and out-neighborhood and out-degree in
/// `{(n-2)/2, (n-1)/2, n/2}`.
pub fn is_locally_transitive_balanced(t: &Tournament) -> bool {
    if !is_near_regular(t) {
        return false;
    }
    let words = t.words();
    let out: Vec<u64> = (0..t.n()).flat_map(|v| t.out_row(v).to_vec()).collect();
    let inn = t.in_rows();
    let transitive_within = |set: &[u64], rows: &[u64]| -> bool {
        let size: usize = set.iter().map(|w| w.count_ones() as usize).sum();
        let mut seen = vec![false; size];
        for (wi, &word) in set.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let u = wi * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let d: usize = rows[u * words..(u + 1) * words]
                    .iter()
                    .zip(set)
                    .map(|(a, b)| (a & b).count_ones() as usize)
                    .sum();
                if seen[d] {
                    return false;
                }
                seen[d] = true;
            }
        }
        true
    };
    (0..t.n()).all(|v| {
        transitive_within(&out[v * words..(v + 1) * words], &out)
            && transitive_within(&inn[v * words..(v + 1) * words], &out)
    })
}

/// All out-degrees in `{(n-2)/2, (n-1)/2, n/2}`.
pub fn is_near_regular(t: &Tournament) -> bool {
    let n = t.n();
    t.out_degrees().iter().all(|&d| {
        let twice = 2 * d;
        twice + 2 == n || twice + 1 == n || twice == n
    })
}

/// Words `0..words` of the keystream for row `i`. Bit `j % 64` of word
/// `j / 64` decides the pair `(i, j)` for `i < j`.
fn keyed_row(seed: u64, i: usize, words: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    (0..words).map(|_| rng.next_u64()).collect()
}

/// Orients every pair `i < j` within `range` by the keyed bit for `(seed, i, j)`.
fn fill_random(rows: &mut [u64], words: usize, seed: u64, range: std::ops::Range<usize>) {
    let lo = range.start;
    let hi = range.end;
    if hi <= lo + 1 {
        return;
    }
    // each pair's bit depends only on (seed, i, j), so rows can be drawn in parallel
    let streams: Vec<Vec<u64>> = (lo..hi)
        .into_par_iter()
        .map(|i| keyed_row(seed, i, words))
        .collect();
    for (off, stream) in streams.iter().enumerate() {
        let i = lo + off;
        for j in (i + 1)..hi {
            if (stream[j / 64] >> (j % 64)) & 1 == 1 {
                rows[i * words + j / 64] |= 1 << (j % 64);
            } else {
                rows[j * words + i / 64] |= 1 << (i % 64);
            }
        }
    }
}

/// Uniform random tournament; the pair `(i, j)` is decided by a counter-based
/// ChaCha8 keystream keyed by `(seed, i, j)`, so output is platform independent.
pub fn random_tournament(n: usize, seed: u64) -> Tournament {
    let words = words_for(n);
    let mut rows = vec![0u64; n * words];
    fill_random(&mut rows, words, seed, 0..n);
    Tournament::from_rows(n, rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Alpha {
    /// The optimal closed-form fraction.
    Auto,
    Fixed(f64),
}

impl Alpha {
    pub fn value(self) -> f64 {
        match self {
            Alpha::Auto => closed_alpha(),
            Alpha::Fixed(a) => a,
        }
    }
}

impl std::str::FromStr for Alpha {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Alpha::Auto);
        }
        s.parse::<f64>()
            .map(Alpha::Fixed)
            .map_err(|_| Error::Malformed(format!("alpha must be 'auto' or a number, got {s:?}")))
    }
}

/// Parameters of the iterated blow-up.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlowupSpec {
    pub n: usize,
    pub alpha: Alpha,
    pub seed: u64,
    pub base_cutoff: usize,
}

impl BlowupSpec {
    pub fn new(n: usize, alpha: Alpha, seed: u64) -> Self {
        BlowupSpec {
            n,
            alpha,
            seed,
            base_cutoff: 4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.alpha.value();
        if !(0.0..1.0).contains(&a) {
            return Err(Error::Domain(format!("alpha must lie in [0, 1), got {a}")));
        }
        if self.base_cutoff < 1 {
            return Err(Error::Domain("base cutoff must be at least 1".into()));
        }
        if self.n < 1 {
            return Err(Error::Domain("blow-up needs n >= 1".into()));
        }
        Ok(())
    }

    /// Sizes `(m, h)` of every recursion level from the top, where `m` is the
    /// current part and `h` its dominating sub-part. The last entry is the
    /// transitive base (with `h = 0`).
    pub fn levels(&self) -> Vec<(usize, usize)> {
        let a = self.alpha.value();
        let mut out = Vec::new();
        let mut m = self.n;
        loop {
            if m < self.base_cutoff || m <= 1 {
                out.push((m, 0));
                return out;
            }
            // ceil(alpha m), kept below m so the random side is never empty
            let h = ((a * m as f64).ceil() as usize).min(m - 1);
            out.push((m, h));
            if h == 0 {
                return out;
            }
            m = h;
        }
    }
}

/// An iterated blow-up with the nesting level of every vertex.
#[derive(Clone, Debug)]
pub struct Blowup {
    pub tournament: Tournament,
    /// 0 for the top random part, 1 for the random part one level down, and
    /// so on; the transitive base gets the deepest level.
    pub levels: Vec<u32>,
}

impl Blowup {
    /// The top-level split `(H, L)`: `H` are vertices of level > 0.
    pub fn top_partition(&self) -> (Vec<usize>, Vec<usize>) {
        let (h, l): (Vec<usize>, Vec<usize>) =
            (0..self.levels.len()).partition(|&v| self.levels[v] > 0);
        (h, l)
    }
}

/// Builds the iterated construction. Vertices `0..h` form the dominating part
/// (recursively built), vertices `h..m` carry a random tournament, and every
/// arc between the parts points from the dominating part to the random part.
/// Below `base_cutoff` the remaining part is transitive.
pub fn iterated_blowup(spec: &BlowupSpec) -> Result<Blowup> {
    spec.validate()?;
    let n = spec.n;
    let words = words_for(n);
    let mut rows = vec![0u64; n * words];
    let mut levels = vec![0u32; n];
    let plan = spec.levels();
    for (depth, &(m, h)) in plan.iter().enumerate() {
        if h == 0 && (m < spec.base_cutoff || m <= 1) {
            // transitive base on 0..m
            for i in 0..m {
                for j in (i + 1)..m {
                    rows[i * words + j / 64] |= 1 << (j % 64);
                }
                levels[i] = depth as u32;
            }
            continue;
        }
        // random part h..m, dominated by 0..h
        fill_random(&mut rows, words, spec.seed, h..m);
        levels[h..m].fill(depth as u32);
        for i in 0..h {
            for j in h..m {
                rows[i * words + j / 64] |= 1 << (j % 64);
            }
        }
    }
    Ok(Blowup {
        tournament: Tournament::from_rows(n, rows),
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::is_isomorphic;
    use crate::census::{census_bruteforce, census_fast};
    use crate::pattern::PatternId;

    #[test]
    fn transitive_basics() {
        assert_eq!(transitive(1).n(), 1);
        assert_eq!(census_fast(&transitive(4)).tt4, 1);
        assert_eq!(census_fast(&transitive(9)).tt3, 84);
        assert!(transitive(6).is_transitive());
    }

    #[test]
    fn odd_carousels_are_regular() {
        for n in [3, 5, 7, 9, 11] {
            let t = carousel(n);
            assert!(t.is_valid());
            assert!(t.out_degrees().iter().all(|&d| d == (n - 1) / 2));
        }
        let c7 = census_fast(&carousel(7));
        assert_eq!((c7.c4, c7.c3plus, c7.c3minus), (28, 0, 0));
    }

    #[test]
    fn carousel_four_is_c4() {
        assert!(is_isomorphic(&carousel(4), &PatternId::C4.tournament()).unwrap());
        assert_eq!(carousel_class(4).unwrap().len(), 1);
    }

    #[test]
    fn even_carousel_is_a_duplicate_of_the_smaller_odd_one() {
        // C_n for even n can be grown from C_{n-1} by duplicating a vertex
        for n in [4usize, 6, 8, 10] {
            let target = carousel(n);
            let base = carousel(n - 1);
            let found = (0..n - 1).any(|v| {
                [true, false].iter().any(|&dir| {
                    is_isomorphic(&base.duplicate_vertex(v, dir).unwrap(), &target).unwrap()
                })
            });
            assert!(found, "n = {n}");
        }
    }

    #[test]
    fn carousel_class_sizes() {
        assert_eq!(carousel_class(5).unwrap(), vec![canonical_form(&carousel(5)).unwrap()]);
        // 2^3 labeled diagonal choices, grouped by canonical form
        let six = carousel_class(6).unwrap();
        let mut by_hand = BTreeSet::new();
        for code in 0..8u32 {
            let bits: Vec<bool> = (0..3).map(|i| (code >> i) & 1 == 1).collect();
            let t = CarouselSpec { n: 6, diagonal_bits: Some(bits) }.build().unwrap();
            by_hand.insert(canonical_form(&t).unwrap());
        }
        assert_eq!(six, by_hand.into_iter().collect::<Vec<_>>());
        assert!(six.contains(&canonical_form(&carousel(6)).unwrap()));
        assert!(six.len() > 1);
        assert!(carousel_class(17).is_err());
    }

    #[test]
    fn carousel_spec_validation() {
        assert!(CarouselSpec { n: 5, diagonal_bits: Some(vec![]) }.build().is_err());
        assert!(CarouselSpec { n: 6, diagonal_bits: Some(vec![true]) }.build().is_err());
        assert!(CarouselSpec { n: 6, diagonal_bits: None }.build().is_err());
        assert!(CarouselSpec { n: 2, diagonal_bits: None }.build().is_err());
        assert_eq!(CarouselSpec { n: 7, diagonal_bits: None }.build().unwrap(), carousel(7));
    }

    #[test]
    fn local_transitivity_predicate() {
        assert!(is_locally_transitive_balanced(&carousel(9)));
        assert!(!is_locally_transitive_balanced(&transitive(9)));
        for form in carousel_class(8).unwrap() {
            assert!(is_locally_transitive_balanced(&form.to_tournament()));
        }
    }

    #[test]
    fn random_is_deterministic_and_keyed_per_pair() {
        let a = random_tournament(150, 42);
        assert_eq!(a, random_tournament(150, 42));
        assert_ne!(a, random_tournament(150, 43));
        // a prefix of the vertex set is a prefix tournament
        let b = random_tournament(90, 42);
        let sub: Vec<usize> = (0..90).collect();
        assert_eq!(a.induce(&sub).unwrap(), b);
        assert!(a.is_valid());
    }

    #[test]
    fn blowup_with_zero_alpha_is_random() {
        let b = iterated_blowup(&BlowupSpec::new(200, Alpha::Fixed(0.0), 9)).unwrap();
        assert_eq!(b.tournament, random_tournament(200, 9));
        assert!(b.levels.iter().all(|&l| l == 0));
    }

    #[test]
    fn blowup_structure() {
        let spec = BlowupSpec::new(300, Alpha::Auto, 7);
        let b = iterated_blowup(&spec).unwrap();
        let t = &b.tournament;
        assert!(t.is_valid());
        for u in 0..300 {
            for w in 0..300 {
                if b.levels[u] > b.levels[w] {
                    assert!(t.arc(u, w), "level {} vertex {u} must beat level {} vertex {w}", b.levels[u], b.levels[w]);
                }
            }
        }
        let plan = spec.levels();
        assert_eq!(plan[0], (300, 44));
        let (h, l) = b.top_partition();
        assert_eq!(h.len(), 44);
        assert_eq!(l.len(), 256);
    }

    #[test]
    fn blowup_c3plus_copies_never_straddle_with_two_on_top() {
        let b = iterated_blowup(&BlowupSpec::new(40, Alpha::Auto, 3)).unwrap();
        let t = &b.tournament;
        let top = |v: usize| b.levels[v] > 0;
        crate::census::for_each_subset(40, 4, |q| {
            if crate::census::four_type(t, [q[0], q[1], q[2], q[3]]) == crate::census::FourType::C3Plus {
                let k = q.iter().filter(|&&v| top(v)).count();
                assert!(k == 0 || k == 1 || k == 4, "{q:?}");
            }
        });
        assert_eq!(census_fast(t), census_bruteforce(t));
    }

    #[test]
    fn blowup_validation_and_small_cases() {
        assert!(iterated_blowup(&BlowupSpec::new(10, Alpha::Fixed(1.0), 0)).is_err());
        assert!(iterated_blowup(&BlowupSpec::new(10, Alpha::Fixed(-0.1), 0)).is_err());
        let mut spec = BlowupSpec::new(10, Alpha::Fixed(0.95), 0);
        spec.base_cutoff = 0;
        assert!(iterated_blowup(&spec).is_err());
        // large alpha still terminates: the random side keeps at least one vertex
        let b = iterated_blowup(&BlowupSpec::new(30, Alpha::Fixed(0.99), 1)).unwrap();
        assert!(b.tournament.is_valid());
        let b = iterated_blowup(&BlowupSpec::new(1, Alpha::Auto, 1)).unwrap();
        assert_eq!(b.tournament.n(), 1);
        assert_eq!("auto".parse::<Alpha>().unwrap(), Alpha::Auto);
        assert_eq!("0.25".parse::<Alpha>().unwrap(), Alpha::Fixed(0.25));
        assert!("x".parse::<Alpha>().is_err());
    }
}
