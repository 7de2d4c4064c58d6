//! Structure audits: degree bands, cut detection, quasi-randomness scores,
//! density inequalities and symmetrization gaps.

use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::census::{census_fast, vertex_loads_c3plus, PairCounter};
use crate::rational::{from_f64, ratio, to_f64, Exact};
use crate::tournament::Tournament;

/// Band endpoints as exact fractions.
pub const LOW_BAND_END: (u128, u128) = (416, 1000);
pub const MID_BAND_END: (u128, u128) = (44057, 100000);
pub const HIGH_BAND_END: (u128, u128) = (8849, 10000);
/// Upper bound on the low part of the cut.
pub const L_FRACTION_BOUND: (u128, u128) = (6, 7);
pub const C3PLUS_UPPER: (u128, u128) = (157500672, 1_000_000_000);
pub const HISTOGRAM_BINS: usize = 100;

fn frac(p: (u128, u128)) -> BigRational {
    ratio(p.0, p.1)
}

/// Which of the four bands `d / n` falls in.
fn band_of(d: usize, n: usize) -> usize {
    let (d, n) = (d as u128, n as u128);
    if d * LOW_BAND_END.1 <= LOW_BAND_END.0 * n {
        0
    } else if d * MID_BAND_END.1 < MID_BAND_END.0 * n {
        1
    } else if d * HIGH_BAND_END.1 <= HIGH_BAND_END.0 * n {
        2
    } else {
        3
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeHistogram {
    pub n: usize,
    pub out_degrees: Vec<usize>,
    pub bin_width: f64,
    /// Vertex counts per bin `[k/100, (k+1)/100)`.
    pub bins: Vec<usize>,
    /// Counts for `[0, 0.416]`, `(0.416, 0.44057)`, `[0.44057, 0.8849]`, `(0.8849, 1]`.
    pub band_counts: [usize; 4],
    /// Vertices in the first or third band.
    pub forbidden: Vec<usize>,
}

impl DegreeHistogram {
    pub fn outside_forbidden_fraction(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (self.n - self.forbidden.len()) as f64 / self.n as f64
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "bin_width": self.bin_width,
            "bins": self.bins,
            "band_counts": {
                "[0,0.416]": self.band_counts[0],
                "(0.416,0.44057)": self.band_counts[1],
                "[0.44057,0.8849]": self.band_counts[2],
                "(0.8849,1]": self.band_counts[3],
            },
            "forbidden_count": self.forbidden.len(),
            "outside_forbidden_fraction": self.outside_forbidden_fraction(),
        })
    }
}

pub fn degree_report(t: &Tournament) -> DegreeHistogram {
    let n = t.n();
    let out_degrees = t.out_degrees();
    let mut bins = vec![0; HISTOGRAM_BINS];
    let mut band_counts = [0; 4];
    let mut forbidden = Vec::new();
    for (v, &d) in out_degrees.iter().enumerate() {
        bins[(d * HISTOGRAM_BINS / n).min(HISTOGRAM_BINS - 1)] += 1;
        let b = band_of(d, n);
        band_counts[b] += 1;
        if b == 0 || b == 2 {
            forbidden.push(v);
        }
    }
    DegreeHistogram {
        n,
        out_degrees,
        bin_width: 1.0 / HISTOGRAM_BINS as f64,
        bins,
        band_counts,
        forbidden,
    }
}

#[derive(Clone, Debug)]
pub struct Partition {
    pub h: Vec<usize>,
    pub l: Vec<usize>,
    /// Arcs `x -> y` with `x` in L and `y` in H.
    pub cut_violations: Vec<(usize, usize)>,
    pub l_fraction: BigRational,
}

impl Partition {
    pub fn l_fraction_below_bound(&self) -> bool {
        self.l_fraction < frac(L_FRACTION_BOUND)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "h_size": self.h.len(),
            "l_size": self.l.len(),
            "cut_violation_count": self.cut_violations.len(),
            "cut_violations": self.cut_violations,
            "l_fraction": Exact::from(&self.l_fraction),
            "l_fraction_bound": Exact::from(&frac(L_FRACTION_BOUND)),
            "l_fraction_below_bound": self.l_fraction_below_bound(),
        })
    }
}

/// Splits on normalised out-degree strictly above `threshold` and lists
/// every arc pointing from L into H.
pub fn detect_cut(t: &Tournament, threshold: &BigRational) -> Partition {
    let n = t.n();
    let n_big = BigRational::from_integer(n.into());
    let (h, l): (Vec<usize>, Vec<usize>) = (0..n).partition(|&v| {
        BigRational::from_integer(t.out_degree(v).into()) > threshold * &n_big
    });
    let cut_violations = l
        .par_iter()
        .flat_map_iter(|&x| h.iter().filter(move |&&y| t.arc(x, y)).map(move |&y| (x, y)))
        .collect();
    Partition {
        l_fraction: ratio(l.len() as u128, n as u128),
        h,
        l,
        cut_violations,
    }
}

pub fn default_cut_threshold() -> BigRational {
    frac(HIGH_BAND_END)
}

/// Default finite-n tolerance, `4 / sqrt(n)`.
pub fn default_tolerance(n: usize) -> BigRational {
    from_f64(4.0 / (n.max(1) as f64).sqrt()).expect("finite")
}

#[derive(Clone, Debug)]
pub struct QrScore {
    pub tol: BigRational,
    /// `|i(C3) - 1/4|`, `|i(C3+) - 1/8|`, `|i(C4) - 3/8|`, `|i(C3-) - 1/8|`.
    pub c3: BigRational,
    pub c3plus: BigRational,
    pub c4: BigRational,
    pub c3minus: BigRational,
}

impl QrScore {
    pub fn deviations(&self) -> [(&'static str, &BigRational); 4] {
        [
            ("c3", &self.c3),
            ("c3plus", &self.c3plus),
            ("c4", &self.c4),
            ("c3minus", &self.c3minus),
        ]
    }

    pub fn max_deviation(&self) -> f64 {
        self.deviations().iter().map(|d| to_f64(d.1)).fold(0.0, f64::max)
    }

    pub fn within(&self, tol: &BigRational) -> bool {
        self.deviations().iter().all(|d| d.1 <= tol)
    }

    pub fn to_json(&self) -> Value {
        let mut devs = serde_json::Map::new();
        for (k, v) in self.deviations() {
            devs.insert(k.into(), json!(Exact::from(v)));
        }
        json!({
            "deviations": devs,
            "tol": Exact::from(&self.tol),
            "quasi_random": self.within(&self.tol),
        })
    }
}

/// Deviations of the exact census densities from the random-tournament
/// values. Hosts with fewer than 4 vertices give `None`.
pub fn qr_score(t: &Tournament, tol: Option<BigRational>) -> Option<QrScore> {
    if t.n() < 4 {
        return None;
    }
    let d = census_fast(t).densities();
    let dev = |x: &Option<BigRational>, p: u128, q: u128| (x.clone().unwrap() - ratio(p, q)).abs();
    Some(QrScore {
        tol: tol.unwrap_or_else(|| default_tolerance(t.n())),
        c3: dev(&d.c3, 1, 4),
        c3plus: dev(&d.c3plus, 1, 8),
        c4: dev(&d.c4, 3, 8),
        c3minus: dev(&d.c3minus, 1, 8),
    })
}

#[derive(Clone, Debug)]
pub struct InequalityAudit {
    pub tol: BigRational,
    /// `3 i(C3+) + 2 i(C3)`.
    pub combined: BigRational,
    /// `7/8 + tol - combined`; negative means exceeded.
    pub combined_margin: BigRational,
    pub c3plus: BigRational,
    /// `0.157500672 + tol - i(C3+)`.
    pub c3plus_margin: BigRational,
}

impl InequalityAudit {
    pub fn combined_holds(&self) -> bool {
        !self.combined_margin.is_negative()
    }

    pub fn c3plus_holds(&self) -> bool {
        !self.c3plus_margin.is_negative()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "tol": Exact::from(&self.tol),
            "combined": Exact::from(&self.combined),
            "combined_bound": Exact::from(&ratio(7, 8)),
            "combined_margin": Exact::from(&self.combined_margin),
            "combined_holds": self.combined_holds(),
            "c3plus": Exact::from(&self.c3plus),
            "c3plus_bound": Exact::from(&frac(C3PLUS_UPPER)),
            "c3plus_margin": Exact::from(&self.c3plus_margin),
            "c3plus_holds": self.c3plus_holds(),
        })
    }
}

/// Evaluates both density inequalities. Violations are reported through
/// the margins, never raised.
pub fn audit_inequalities(t: &Tournament, tol: Option<BigRational>) -> Option<InequalityAudit> {
    if t.n() < 4 {
        return None;
    }
    let tol = tol.unwrap_or_else(|| default_tolerance(t.n()));
    let d = census_fast(t).densities();
    let c3plus = d.c3plus.unwrap();
    let c3 = d.c3.unwrap();
    let combined = BigRational::from_integer(3.into()) * &c3plus + BigRational::from_integer(2.into()) * c3;
    Some(InequalityAudit {
        combined_margin: ratio(7, 8) + &tol - &combined,
        c3plus_margin: frac(C3PLUS_UPPER) + &tol - &c3plus,
        combined,
        c3plus,
        tol,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetrizationGap {
    /// Largest `load(w) - load(v) - pair(v, w)` over ordered pairs.
    pub max_gain: i128,
    /// Lexicographically first `(v, w)` attaining it.
    pub argmax: Option<(usize, usize)>,
}

/// Best gain of deleting `v` and adding a twin of `w`, for C3+.
pub fn symmetrization_gaps(t: &Tournament) -> SymmetrizationGap {
    let n = t.n();
    if n < 2 {
        return SymmetrizationGap {
            max_gain: 0,
            argmax: None,
        };
    }
    let loads = vertex_loads_c3plus(t).loads;
    let pc = PairCounter::new(t);
    let mut by_load: Vec<usize> = (0..n).collect();
    by_load.sort_by_key(|&v| (loads[v], v));
    // every row is scanned against w in decreasing load until the bound
    // load(w) - load(v) can no longer beat what the row has seen
    let rows: Vec<(i128, (usize, usize))> = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut best: Option<(i128, (usize, usize))> = None;
            for &w in by_load.iter().rev() {
                if w == v {
                    continue;
                }
                let bound = loads[w] as i128 - loads[v] as i128;
                if let Some((b, _)) = best {
                    if bound < b {
                        break;
                    }
                }
                let g = bound - pc.count(v, w) as i128;
                let better = match best {
                    None => true,
                    Some((b, (_, bw))) => g > b || (g == b && w < bw),
                };
                if better {
                    best = Some((g, (v, w)));
                }
            }
            best.expect("n >= 2")
        })
        .collect();
    let (max_gain, argmax) = rows
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .unwrap();
    SymmetrizationGap {
        max_gain,
        argmax: Some(argmax),
    }
}

/// Largest `n` for which the diagnose report includes symmetrization gaps.
pub const GAP_REPORT_LIMIT: usize = 400;

/// Full audit bundle for one tournament.
pub fn diagnose(t: &Tournament, tol: Option<BigRational>, threshold: Option<BigRational>) -> Value {
    let threshold = threshold.unwrap_or_else(default_cut_threshold);
    let census = census_fast(t);
    let gaps = (t.n() <= GAP_REPORT_LIMIT).then(|| symmetrization_gaps(t));
    json!({
        "n": t.n(),
        "census": crate::census::census_document(&census),
        "degrees": degree_report(t).to_json(),
        "cut": {
            "threshold": Exact::from(&threshold),
            "partition": detect_cut(t, &threshold).to_json(),
        },
        "quasi_randomness": qr_score(t, tol.clone()).map(|q| q.to_json()),
        "inequalities": audit_inequalities(t, tol).map(|a| a.to_json()),
        "symmetrization": gaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::pair_count_c3plus;
    use crate::constructions::{carousel, random_tournament, transitive};
    use crate::pattern::PatternId;
    use crate::search::exhaustive_max;
    use proptest::prelude::*;

    #[test]
    fn degree_bands() {
        let h = degree_report(&carousel(9));
        assert_eq!(h.bins.iter().filter(|&&b| b > 0).count(), 1);
        assert!(h.out_degrees.iter().all(|&d| d == 4));
        // 4/9 = 0.444.. sits in the third band
        assert_eq!(h.band_counts, [0, 0, 9, 0]);

        let h = degree_report(&transitive(10));
        assert_eq!(h.band_counts.iter().sum::<usize>(), 10);
        for k in 0..10 {
            assert_eq!(h.bins[k * 10], 1);
        }
        // endpoints: 0..=4 low, 5..=8 third band, 9 top
        assert_eq!(h.band_counts, [5, 0, 4, 1]);
    }

    #[test]
    fn band_endpoints_are_exact() {
        assert_eq!(band_of(416, 1000), 0);
        assert_eq!(band_of(417, 1000), 1);
        assert_eq!(band_of(44056, 100000), 1);
        assert_eq!(band_of(44057, 100000), 2);
        assert_eq!(band_of(8849, 10000), 2);
        assert_eq!(band_of(8850, 10000), 3);
    }

    #[test]
    fn cut_on_transitive_and_random() {
        let t = transitive(20);
        let p = detect_cut(&t, &default_cut_threshold());
        // degrees 19..0 over 20: 0.95 and 0.9 exceed 0.8849
        assert_eq!(p.h, vec![0, 1]);
        assert!(p.cut_violations.is_empty());
        assert_eq!(p.l_fraction, ratio(18, 20));
        assert!(!p.l_fraction_below_bound());

        let r = random_tournament(1000, 1);
        let p = detect_cut(&r, &default_cut_threshold());
        assert!(p.h.is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn cut_violations_match_a_direct_scan(n in 5usize..40, seed in any::<u64>(), th in 1u128..10) {
            let t = random_tournament(n, seed);
            let threshold = ratio(th, 20);
            let p = detect_cut(&t, &threshold);
            prop_assert_eq!(p.h.len() + p.l.len(), n);
            let mut direct = Vec::new();
            for x in 0..n {
                for y in 0..n {
                    let hx = ratio(t.out_degree(x) as u128, n as u128) > threshold;
                    let hy = ratio(t.out_degree(y) as u128, n as u128) > threshold;
                    if !hx && hy && t.arc(x, y) {
                        direct.push((x, y));
                    }
                }
            }
            let mut got = p.cut_violations.clone();
            got.sort_unstable();
            prop_assert_eq!(got, direct);
        }

        #[test]
        fn qr_reversal_swaps_the_cone_entries(n in 4usize..30, seed in any::<u64>()) {
            let t = random_tournament(n, seed);
            let a = qr_score(&t, None).unwrap();
            let b = qr_score(&t.reverse(), None).unwrap();
            prop_assert_eq!(&a.c3, &b.c3);
            prop_assert_eq!(&a.c4, &b.c4);
            prop_assert_eq!(&a.c3plus, &b.c3minus);
            prop_assert_eq!(&a.c3minus, &b.c3plus);
        }
    }

    #[test]
    fn qr_examples() {
        let q = qr_score(&transitive(100), None).unwrap();
        assert_eq!(q.c3, ratio(1, 4));
        let q = qr_score(&carousel(101), None).unwrap();
        assert_eq!(q.c3plus, ratio(1, 8));
        assert_eq!(q.c3minus, ratio(1, 8));
        assert!(qr_score(&transitive(3), None).is_none());
    }

    #[test]
    fn audit_surfaces_small_violations() {
        let a = audit_inequalities(&PatternId::C3Plus.tournament(), Some(ratio(0, 1))).unwrap();
        assert_eq!(a.c3plus, ratio(1, 1));
        assert!(!a.c3plus_holds());
        assert_eq!(a.combined, ratio(3, 1) + ratio(2, 1) * ratio(1, 4));
        assert!(!a.combined_holds());
    }

    #[test]
    fn gaps_on_transitive_are_zero() {
        let g = symmetrization_gaps(&transitive(12));
        assert_eq!(g.max_gain, 0);
        assert_eq!(g.argmax, Some((0, 1)));
    }

    fn brute_gap(t: &Tournament) -> (i128, (usize, usize)) {
        let loads = vertex_loads_c3plus(t).loads;
        let n = t.n();
        let mut best = (i128::MIN, (0, 0));
        for v in 0..n {
            for w in 0..n {
                if v != w {
                    let g = loads[w] as i128 - loads[v] as i128
                        - pair_count_c3plus(t, v, w).unwrap() as i128;
                    if g > best.0 {
                        best = (g, (v, w));
                    }
                }
            }
        }
        best
    }

    fn surgery_delta(t: &Tournament, v: usize, w: usize) -> i128 {
        let before = census_fast(t).c3plus as i128;
        let s = t.duplicate_vertex(w, true).unwrap().delete_vertex(v).unwrap();
        census_fast(&s).c3plus as i128 - before
    }

    #[test]
    fn gap_matches_brute_force_and_surgery() {
        for seed in 0..6 {
            let t = random_tournament(14 + seed as usize, seed);
            let g = symmetrization_gaps(&t);
            let (bg, barg) = brute_gap(&t);
            assert_eq!(g.max_gain, bg);
            assert_eq!(g.argmax, Some(barg));
        }
        let t = random_tournament(50, 9);
        let g = symmetrization_gaps(&t);
        let (v, w) = g.argmax.unwrap();
        assert_eq!(surgery_delta(&t, v, w), g.max_gain);
    }

    #[test]
    fn gain_formula_matches_surgery_on_random_probes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let n = rng.random_range(5..24);
            let t = random_tournament(n, rng.random());
            let v = rng.random_range(0..n);
            let mut w = rng.random_range(0..n - 1);
            if w >= v {
                w += 1;
            }
            let loads = vertex_loads_c3plus(&t).loads;
            let g = loads[w] as i128 - loads[v] as i128 - pair_count_c3plus(&t, v, w).unwrap() as i128;
            assert_eq!(g, surgery_delta(&t, v, w));
        }
    }

    #[test]
    fn maximizers_at_seven_have_no_positive_gap() {
        let r = exhaustive_max(&PatternId::C3Plus, 7).unwrap();
        for c in &r.maximizers {
            assert!(symmetrization_gaps(&c.to_tournament()).max_gain <= 0);
        }
    }

    #[test]
    fn diagnose_document_shape() {
        let doc = diagnose(&carousel(9), None, None);
        assert_eq!(doc["n"], 9);
        assert!(doc["symmetrization"]["max_gain"].is_number());
        assert_eq!(doc["cut"]["partition"]["cut_violation_count"], 0);
    }
}
