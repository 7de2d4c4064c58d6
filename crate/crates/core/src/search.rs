//! Enumeration up to isomorphism, exhaustive maximisation and local search.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::canon::{canonical_form, CanonicalForm};
use crate::census::{count_pattern, for_each_subset, pair_counts_c3plus, vertex_loads_c3plus, Matcher};
use crate::constructions::random_tournament;
use crate::error::{Error, Result};
use crate::pattern::PatternId;
use crate::rational::{binomial, ratio, Exact};
use crate::tournament::Tournament;

pub const MAX_ENUMERATION_N: usize = 9;

type ClassList = Arc<Vec<CanonicalForm>>;

fn class_cache() -> &'static Mutex<HashMap<usize, ClassList>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, ClassList>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Canonical forms of all `n`-vertex tournaments, sorted.
///
/// Each class on `n - 1` vertices is extended by a new vertex in all
/// `2^(n-1)` ways; the extensions are canonicalised and deduplicated.
pub fn enumerate_classes(n: usize) -> Result<ClassList> {
    if n == 0 || n > MAX_ENUMERATION_N {
        return Err(Error::UnsupportedSize {
            what: "tournament enumeration",
            limit: MAX_ENUMERATION_N,
            got: n,
        });
    }
    if let Some(hit) = class_cache().lock().unwrap().get(&n) {
        return Ok(hit.clone());
    }
    let classes: Vec<CanonicalForm> = if n == 1 {
        vec![canonical_form(&Tournament::from_fn(1, |_, _| true))?]
    } else {
        let smaller = enumerate_classes(n - 1)?;
        let parts: Vec<BTreeSet<CanonicalForm>> = smaller
            .par_iter()
            .map(|c| {
                let base = c.to_tournament();
                let mut seen = BTreeSet::new();
                for mask in 0u32..(1 << (n - 1)) {
                    // bit i of mask: i -> new vertex
                    let t = Tournament::from_fn(n, |i, j| {
                        if j == n - 1 {
                            (mask >> i) & 1 == 1
                        } else {
                            base.arc(i, j)
                        }
                    });
                    seen.insert(canonical_form(&t).expect("n <= 9"));
                }
                seen
            })
            .collect();
        let mut all = BTreeSet::new();
        for p in parts {
            all.extend(p);
        }
        all.into_iter().collect()
    };
    let classes = Arc::new(classes);
    class_cache().lock().unwrap().insert(n, classes.clone());
    Ok(classes)
}

/// One representative per isomorphism class, each in canonical labeling.
pub fn enumerate_tournaments(n: usize) -> Result<Vec<Tournament>> {
    Ok(enumerate_classes(n)?.iter().map(|c| c.to_tournament()).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exhaustive,
    Local,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LocalStats {
    pub restarts: usize,
    /// Best count reached by each restart, in restart order.
    pub restart_best: Vec<u128>,
    /// Restarts whose best equals the overall best.
    pub restarts_at_best: usize,
    pub improving_moves: usize,
    pub plateau_moves: usize,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub pattern: PatternId,
    pub n: usize,
    pub best_count: u128,
    /// Sorted canonical forms; exhaustive mode only.
    pub maximizers: Vec<CanonicalForm>,
    pub mode: SearchMode,
    /// Best tournament found; local mode only.
    pub witness: Option<Tournament>,
    pub stats: Option<LocalStats>,
}

impl SearchResult {
    pub fn density(&self) -> BigRational {
        ratio(self.best_count, binomial(self.n as u128, self.pattern.order() as u128))
    }

    pub fn to_json(&self) -> Value {
        let mut doc = json!({
            "pattern": self.pattern.name(),
            "n": self.n,
            "mode": self.mode,
            "best_count": self.best_count,
            "density": Exact::from(&self.density()),
        });
        match self.mode {
            SearchMode::Exhaustive => {
                doc["maximizers"] = json!(self.maximizers);
            }
            SearchMode::Local => {
                doc["witness"] = json!(self.witness.as_ref().map(|t| t.to_bits()));
                doc["stats"] = json!(self.stats);
            }
        }
        doc
    }
}

fn check_exhaustive(pattern: &PatternId, n: usize) -> Result<()> {
    if n < pattern.order() || n > MAX_ENUMERATION_N {
        return Err(Error::UnsupportedSize {
            what: "exhaustive search host size",
            limit: MAX_ENUMERATION_N,
            got: n,
        });
    }
    Ok(())
}

/// Exact maximum of `I(pattern, T)` over all `n`-vertex `T` and the full
/// maximizer set.
pub fn exhaustive_max(pattern: &PatternId, n: usize) -> Result<SearchResult> {
    check_exhaustive(pattern, n)?;
    let classes = enumerate_classes(n)?;
    let counts: Vec<u128> = classes
        .par_iter()
        .map(|c| count_pattern(pattern, &c.to_tournament()))
        .collect::<Result<_>>()?;
    let best = counts.iter().copied().max().unwrap_or(0);
    let maximizers = classes
        .iter()
        .zip(&counts)
        .filter(|(_, &k)| k == best)
        .map(|(c, _)| *c)
        .collect();
    Ok(SearchResult {
        pattern: pattern.clone(),
        n,
        best_count: best,
        maximizers,
        mode: SearchMode::Exhaustive,
        witness: None,
        stats: None,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub n: usize,
    pub best_count: u128,
    #[serde(skip)]
    pub density: BigRational,
}

impl TableRow {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "best_count": self.best_count,
            "density": Exact::from(&self.density),
        })
    }
}

/// Exhaustive maxima for each `n` in the range.
pub fn max_table(pattern: &PatternId, n_range: std::ops::RangeInclusive<usize>) -> Result<Vec<TableRow>> {
    n_range
        .map(|n| {
            let r = exhaustive_max(pattern, n)?;
            Ok(TableRow {
                n,
                best_count: r.best_count,
                density: r.density(),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoveSet {
    pub arc_flip: bool,
    pub duplicate_delete: bool,
}

impl Default for MoveSet {
    fn default() -> Self {
        MoveSet {
            arc_flip: true,
            duplicate_delete: false,
        }
    }
}

impl std::str::FromStr for MoveSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut m = MoveSet {
            arc_flip: false,
            duplicate_delete: false,
        };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "arc_flip" => m.arc_flip = true,
                "duplicate_delete" => m.duplicate_delete = true,
                other => return Err(Error::Malformed(format!("unknown move `{other}`"))),
            }
        }
        if !m.arc_flip && !m.duplicate_delete {
            return Err(Error::Malformed("empty move set".into()));
        }
        Ok(m)
    }
}

#[derive(Clone, Debug)]
pub struct LocalSearchConfig {
    pub seed: u64,
    pub restarts: usize,
    pub moves: MoveSet,
    pub first_improvement: bool,
    /// Equal-value moves allowed between strict improvements; `None` means `2n`.
    pub plateau_budget: Option<usize>,
    /// Recount from scratch after every accepted move.
    pub audit: bool,
}

impl LocalSearchConfig {
    pub fn new(seed: u64, restarts: usize) -> Self {
        LocalSearchConfig {
            seed,
            restarts,
            moves: MoveSet::default(),
            first_improvement: false,
            plateau_budget: None,
            audit: false,
        }
    }
}

/// Seed of restart `r`, drawn from its own ChaCha stream.
fn restart_seed(seed: u64, r: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64 + 1);
    rng.random()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Move {
    Flip(usize, usize),
    /// Delete the first vertex, add a twin of the second.
    DupDel(usize, usize),
}

fn apply(t: &Tournament, mv: Move) -> Tournament {
    match mv {
        Move::Flip(i, j) => {
            let mut s = t.clone();
            s.flip(i, j);
            s
        }
        Move::DupDel(v, w) => t
            .duplicate_vertex(w, true)
            .and_then(|d| d.delete_vertex(v))
            .expect("vertices in range"),
    }
}

/// Copies of the pattern containing both `i` and `j`.
fn copies_through_pair(matcher: &Matcher, t: &Tournament, i: usize, j: usize) -> u128 {
    let n = t.n();
    let k = matcher.order();
    let others: Vec<usize> = (0..n).filter(|&x| x != i && x != j).collect();
    let mut subset = vec![0usize; k];
    let mut count = 0;
    for_each_subset(others.len(), k - 2, |idx| {
        subset[0] = i;
        subset[1] = j;
        for (slot, &x) in subset[2..].iter_mut().zip(idx) {
            *slot = others[x];
        }
        subset.sort_unstable();
        if matcher.matches(t, &subset) {
            count += 1;
        }
    });
    count
}

fn flip_gain(matcher: &Matcher, t: &mut Tournament, i: usize, j: usize) -> i128 {
    let before = copies_through_pair(matcher, t, i, j) as i128;
    t.flip(i, j);
    let after = copies_through_pair(matcher, t, i, j) as i128;
    t.flip(i, j);
    after - before
}

/// Gains of every duplicate/delete move, in `(v, w)` order.
fn dupdel_gains(pattern: &PatternId, t: &Tournament, current: u128) -> Result<Vec<(Move, i128)>> {
    let n = t.n();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|v| (0..n).filter(move |&w| w != v).map(move |w| (v, w)))
        .collect();
    let host = match pattern {
        PatternId::C3Plus => Some(t.clone()),
        PatternId::C3Minus => Some(t.reverse()),
        _ => None,
    };
    if let Some(h) = host {
        // exact for twin-free patterns: load(w) - load(v) - pair(v, w)
        let loads = vertex_loads_c3plus(&h).loads;
        let pair = pair_counts_c3plus(&h);
        return Ok(pairs
            .into_iter()
            .map(|(v, w)| {
                let g = loads[w] as i128 - loads[v] as i128 - pair[v * n + w] as i128;
                (Move::DupDel(v, w), g)
            })
            .collect());
    }
    pairs
        .into_par_iter()
        .map(|(v, w)| {
            let mv = Move::DupDel(v, w);
            let after = count_pattern(pattern, &apply(t, mv))?;
            Ok((mv, after as i128 - current as i128))
        })
        .collect()
}

struct Climb {
    best: u128,
    witness: Tournament,
    improving: usize,
    plateau: usize,
}

fn climb(
    pattern: &PatternId,
    matcher: &Matcher,
    start: Tournament,
    cfg: &LocalSearchConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Climb> {
    let n = start.n();
    let budget = cfg.plateau_budget.unwrap_or(2 * n);
    let mut t = start;
    let mut count = count_pattern(pattern, &t)?;
    let mut plateau_left = budget;
    let mut improving = 0;
    let mut plateau = 0;
    // the previous plateau move is never undone immediately
    let mut last: Option<Move> = None;
    loop {
        let mut gains: Vec<(Move, i128)> = Vec::new();
        if cfg.moves.arc_flip {
            let pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
            let flips: Vec<(Move, i128)> = if cfg.first_improvement {
                let mut out = Vec::new();
                let mut scratch = t.clone();
                for (i, j) in pairs {
                    let g = flip_gain(matcher, &mut scratch, i, j);
                    out.push((Move::Flip(i, j), g));
                    if g > 0 {
                        break;
                    }
                }
                out
            } else {
                pairs
                    .into_par_iter()
                    .map(|(i, j)| {
                        let mut scratch = t.clone();
                        (Move::Flip(i, j), flip_gain(matcher, &mut scratch, i, j))
                    })
                    .collect()
            };
            gains.extend(flips);
        }
        let found_positive = cfg.first_improvement && gains.iter().any(|g| g.1 > 0);
        if cfg.moves.duplicate_delete && !found_positive {
            gains.extend(dupdel_gains(pattern, &t, count)?);
        }

        let chosen = if cfg.first_improvement {
            gains.iter().find(|g| g.1 > 0).copied()
        } else {
            gains.iter().copied().reduce(|a, b| if b.1 > a.1 { b } else { a })
        };
        let step = match chosen {
            Some(g) if g.1 > 0 => {
                plateau_left = budget;
                improving += 1;
                Some(g)
            }
            _ if plateau_left > 0 => {
                let flat: Vec<(Move, i128)> = gains
                    .iter()
                    .copied()
                    .filter(|g| g.1 == 0 && Some(g.0) != last)
                    .collect();
                if flat.is_empty() {
                    None
                } else {
                    plateau_left -= 1;
                    plateau += 1;
                    Some(flat[rng.random_range(0..flat.len())])
                }
            }
            _ => None,
        };
        let Some((mv, gain)) = step else { break };
        t = apply(&t, mv);
        count = (count as i128 + gain) as u128;
        last = Some(mv);
        if cfg.audit {
            let fresh = count_pattern(pattern, &t)?;
            if fresh != count {
                return Err(Error::Domain(format!(
                    "incremental gain disagrees with recount after {mv:?}: {count} vs {fresh}"
                )));
            }
        }
    }
    Ok(Climb {
        best: count,
        witness: t,
        improving,
        plateau,
    })
}

/// Seeded hill climbing. Each restart starts from its own random
/// tournament; the earliest restart reaching the best count supplies the
/// witness. With zero restarts the first start tournament is returned as is.
pub fn local_search(pattern: &PatternId, n: usize, cfg: &LocalSearchConfig) -> Result<SearchResult> {
    if n < pattern.order() {
        return Err(Error::UnsupportedSize {
            what: "local search host smaller than pattern",
            limit: pattern.order(),
            got: n,
        });
    }
    let matcher = Matcher::new(pattern)?;
    if cfg.restarts == 0 {
        let t = random_tournament(n, restart_seed(cfg.seed, 0));
        let best = count_pattern(pattern, &t)?;
        return Ok(SearchResult {
            pattern: pattern.clone(),
            n,
            best_count: best,
            maximizers: Vec::new(),
            mode: SearchMode::Local,
            witness: Some(t),
            stats: Some(LocalStats::default()),
        });
    }
    let climbs: Vec<Climb> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let s = restart_seed(cfg.seed, r);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            climb(pattern, &matcher, random_tournament(n, s), cfg, &mut rng)
        })
        .collect::<Result<_>>()?;
    let best = climbs.iter().map(|c| c.best).max().unwrap_or(0);
    let winner = climbs.iter().find(|c| c.best == best).expect("non-empty");
    let recount = count_pattern(pattern, &winner.witness)?;
    assert_eq!(recount, best, "witness count must match the reported best");
    let stats = LocalStats {
        restarts: cfg.restarts,
        restart_best: climbs.iter().map(|c| c.best).collect(),
        restarts_at_best: climbs.iter().filter(|c| c.best == best).count(),
        improving_moves: climbs.iter().map(|c| c.improving).sum(),
        plateau_moves: climbs.iter().map(|c| c.plateau).sum(),
    };
    Ok(SearchResult {
        pattern: pattern.clone(),
        n,
        best_count: best,
        maximizers: Vec::new(),
        mode: SearchMode::Local,
        witness: Some(winner.witness.clone()),
        stats: Some(stats),
    })
}
