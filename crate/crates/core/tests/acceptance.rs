//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::time::Instant;

use tourney::analysis::{c4_max_formula, closed_value, construction_density_prediction, optimize_alpha};
use tourney::census::{census_bruteforce, census_fast, verify_lifting_identities};
use tourney::cli::{oracle_corpus, run};
use tourney::constructions::{carousel_class, is_near_regular, iterated_blowup, random_tournament, Alpha, BlowupSpec};
use tourney::diagnostics::{default_cut_threshold, degree_report, detect_cut, qr_score, symmetrization_gaps};
use tourney::rational::{parse_decimal, ratio, to_f64};
use tourney::search::{enumerate_classes, exhaustive_max, local_search, max_table, LocalSearchConfig};
use tourney::PatternId;

const BLOWUP_N: usize = 4000;
const BLOWUP_SEED: u64 = 7;
const RANDOM_SEED: u64 = 1;

type Check = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn c4_counts() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for n in 4..=8 {
        let best = exhaustive_max(&PatternId::C4, n).unwrap().best_count;
        let formula = c4_max_formula(n).unwrap();
        pass &= best == formula;
        details.push(format!("n={n}: {best}/{formula}"));
    }
    outcome(pass, details.join(", "))
}

fn c4_maximizer_sets() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for n in 4..=8 {
        let got = exhaustive_max(&PatternId::C4, n).unwrap().maximizers;
        let class = carousel_class(n).unwrap();
        pass &= got == class;
        details.push(format!("n={n}: {} vs {}", got.len(), class.len()));
    }
    outcome(pass, details.join(", "))
}

fn c3_maximizers_near_regular() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for n in 3..=7 {
        let got = exhaustive_max(&PatternId::C3, n).unwrap().maximizers;
        let near: Vec<_> = enumerate_classes(n)
            .unwrap()
            .iter()
            .filter(|c| is_near_regular(&c.to_tournament()))
            .copied()
            .collect();
        pass &= got == near;
        details.push(format!("n={n}: {} classes", got.len()));
    }
    outcome(pass, details.join(", "))
}

fn lifting_identities() -> Outcome {
    let random = (0..1000u64)
        .filter(|&s| verify_lifting_identities(&random_tournament(25, s)))
        .count();
    let mut enumerated = 0;
    let mut total = 0;
    for n in 1..=7 {
        for c in enumerate_classes(n).unwrap().iter() {
            total += 1;
            enumerated += verify_lifting_identities(&c.to_tournament()) as usize;
        }
    }
    outcome(
        random == 1000 && enumerated == total,
        format!("random n=25: {random}/1000, enumerated n<=7: {enumerated}/{total}"),
    )
}

fn census_oracle() -> Outcome {
    let corpus = oracle_corpus().unwrap();
    let sizes: BTreeSet<usize> = corpus.iter().map(|(_, t)| t.n()).collect();
    let kinds: BTreeSet<&str> = corpus.iter().map(|(l, _)| l.split(':').next().unwrap()).collect();
    let bad = corpus
        .iter()
        .filter(|(_, t)| census_fast(t) != census_bruteforce(t))
        .count();
    let spans = sizes.first() == Some(&4) && sizes.last() == Some(&30);
    outcome(
        bad == 0 && corpus.len() >= 200 && spans && kinds.len() >= 5,
        format!("{} hosts, kinds {:?}, mismatches {bad}", corpus.len(), kinds),
    )
}

fn alpha_optimum() -> Outcome {
    let r = optimize_alpha(1e-9).unwrap();
    let pass = (r.alpha_star - 0.1435836).abs() <= 1e-7 && (r.value - 0.1575006670).abs() <= 1e-9;
    outcome(pass, format!("alpha* = {:.12}, value = {:.12}", r.alpha_star, r.value))
}

fn blowup_spec() -> BlowupSpec {
    BlowupSpec::new(BLOWUP_N, Alpha::Auto, BLOWUP_SEED)
}

fn construction_density() -> Outcome {
    let spec = blowup_spec();
    let t = iterated_blowup(&spec).unwrap().tournament;
    let measured = to_f64(census_fast(&t).densities().c3plus.as_ref().unwrap());
    let predicted = construction_density_prediction(&spec).unwrap();
    let pass = (measured - 0.1575006670).abs() <= 0.01 && (measured - predicted).abs() <= 0.005;
    outcome(
        pass,
        format!("measured {measured:.6}, limit {:.6}, predicted {predicted:.6}", closed_value()),
    )
}

fn construction_structure() -> Outcome {
    let t = iterated_blowup(&blowup_spec()).unwrap().tournament;
    let p = detect_cut(&t, &default_cut_threshold());
    let h = degree_report(&t);
    let outside = h.outside_forbidden_fraction();
    let pass = p.cut_violations.is_empty() && p.l_fraction < ratio(6, 7) && outside >= 0.95;
    outcome(
        pass,
        format!(
            "L->H arcs {}, L fraction {:.5}, outside forbidden bands {:.4} (bands {:?})",
            p.cut_violations.len(),
            to_f64(&p.l_fraction),
            outside,
            h.band_counts
        ),
    )
}

fn quasi_randomness() -> Outcome {
    let q = qr_score(&random_tournament(2000, RANDOM_SEED), None).unwrap();
    let tol = parse_decimal("0.02").unwrap();
    let devs: Vec<String> = q
        .deviations()
        .iter()
        .map(|(k, v)| format!("{k} {:.2e}", to_f64(v)))
        .collect();
    outcome(q.within(&tol), devs.join(", "))
}

fn c3plus_monotone() -> Outcome {
    let rows = max_table(&PatternId::C3Plus, 4..=8).unwrap();
    let monotone = rows.windows(2).all(|w| w[1].density <= w[0].density);
    let last = &rows.last().unwrap().density;
    let dominates = *last >= parse_decimal("0.157500667").unwrap();
    let ds: Vec<String> = rows.iter().map(|r| format!("{:.6}", to_f64(&r.density))).collect();
    outcome(monotone && dominates, format!("densities n=4..8: {}", ds.join(", ")))
}

fn c3plus_gaps() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for n in [7, 8] {
        let r = exhaustive_max(&PatternId::C3Plus, n).unwrap();
        let worst = r
            .maximizers
            .iter()
            .map(|c| symmetrization_gaps(&c.to_tournament()).max_gain)
            .max()
            .unwrap();
        pass &= worst <= 0;
        details.push(format!("n={n}: {} maximizers, max gain {worst}", r.maximizers.len()));
    }
    outcome(pass, details.join(", "))
}

fn local_search_sanity() -> Outcome {
    let cfg = LocalSearchConfig::new(2024, 20);
    let r15 = local_search(&PatternId::C4, 15, &cfg).unwrap();
    let target = 0.95 * c4_max_formula(15).unwrap() as f64;
    let r7 = local_search(&PatternId::C4, 7, &cfg).unwrap();
    let exact7 = exhaustive_max(&PatternId::C4, 7).unwrap().best_count;
    let hits7 = r7.stats.as_ref().unwrap().restart_best.iter().filter(|&&b| b == exact7).count();
    outcome(
        r15.best_count as f64 >= target && hits7 >= 1,
        format!(
            "n=15 best {} (target {target}), n=7 restarts at optimum {hits7}/20",
            r15.best_count
        ),
    )
}

fn schedule_independence() -> Outcome {
    let commands: [&[&str]; 5] = [
        &["verify", "--suite", "theorem1", "--n-max", "8"],
        &["verify", "--suite", "prop1", "--n-max", "7"],
        &["verify", "--suite", "lifting"],
        &["verify", "--suite", "census-oracle"],
        &["optimize-alpha", "--tol", "1e-9"],
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for cmd in commands {
        let outputs: Vec<(i32, String)> = ["1", "8"]
            .iter()
            .map(|th| {
                let mut args = vec!["tourney", "--threads", th];
                args.extend_from_slice(cmd);
                run(args)
            })
            .collect();
        let same = outputs[0] == outputs[1] && outputs[0].0 == 0;
        pass &= same;
        details.push(format!("{} {}", cmd[..cmd.len().min(3)].join(" "), if same { "identical" } else { "DIFFERS" }));
    }
    outcome(pass, details.join("; "))
}

fn main() {
    let criteria: [Check; 13] = [
        ("c4-maximum-counts", c4_counts),
        ("c4-maximizer-sets", c4_maximizer_sets),
        ("c3-maximizers-near-regular", c3_maximizers_near_regular),
        ("lifting-identities", lifting_identities),
        ("census-oracle", census_oracle),
        ("alpha-optimum", alpha_optimum),
        ("construction-density", construction_density),
        ("construction-structure", construction_structure),
        ("quasi-randomness", quasi_randomness),
        ("c3plus-monotone-and-bounded", c3plus_monotone),
        ("c3plus-symmetrization", c3plus_gaps),
        ("local-search", local_search_sanity),
        ("schedule-independence", schedule_independence),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        failed += !o.pass as usize;
        println!(
            "{verdict} {:>2} {name} [{:.1}s] {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
