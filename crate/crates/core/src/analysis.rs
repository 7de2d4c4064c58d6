//! Closed forms and the density optimisation of the iterated blow-up.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::canon::CanonicalForm;
use crate::constructions::{carousel, carousel_class, BlowupSpec};
use crate::error::{Error, Result};
use crate::pattern::PatternId;
use crate::rational::{binomial, from_f64};
use crate::search::exhaustive_max;

/// Cube root of 3, to 15 significant digits.
pub const CBRT_3_LITERAL: f64 = 1.442_249_570_307_41;
/// Cube root of 9, to 15 significant digits.
pub const CBRT_9_LITERAL: f64 = 2.080_083_823_051_90;
/// Optimal top fraction, `(2 cbrt 9 - 2 - cbrt 3) / 5`.
pub const ALPHA_LITERAL: f64 = 0.143_583_615_159;
/// Limit C3+ density of the construction, `(8 - 9 cbrt 3 + 3 cbrt 9) / 8`.
pub const VALUE_LITERAL: f64 = 0.157_500_667_049;

/// Upper end of the search interval is `1 - ALPHA_EPS`.
const ALPHA_EPS: f64 = 1e-6;
const SCAN_POINTS: usize = 10_000;

pub fn closed_alpha() -> f64 {
    (2.0 * 9f64.cbrt() - 2.0 - 3f64.cbrt()) / 5.0
}

pub fn closed_value() -> f64 {
    (8.0 - 9.0 * 3f64.cbrt() + 3.0 * 9f64.cbrt()) / 8.0
}

/// Normalised size of the random part in the limit, `(7 + cbrt 3 - 2 cbrt 9) / 5`.
pub fn closed_low_fraction() -> f64 {
    (7.0 + 3f64.cbrt() - 2.0 * 9f64.cbrt()) / 5.0
}

/// Maximum number of induced C4 over `n`-vertex tournaments.
pub fn c4_max_formula(n: usize) -> Result<u128> {
    if n < 4 {
        return Err(Error::Malformed(format!("C4 formula needs n >= 4, got {n}")));
    }
    let n = n as u128;
    let numerator = if n % 2 == 1 {
        n * (n * n - 1) * (n - 3)
    } else {
        n * (n * n - 4) * (n - 3)
    };
    assert_eq!(numerator % 48, 0, "numerator not divisible by 48 at n = {n}");
    Ok(numerator / 48)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    Ok(())
}

/// `(a(1-a)^3 + (1-a)^4 / 8) / (1 - a^4)`.
pub fn alpha_objective(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let b = 1.0 - alpha;
    Ok((alpha * b.powi(3) + b.powi(4) / 8.0) / (1.0 - alpha.powi(4)))
}

/// The objective evaluated exactly at a rational point.
pub fn alpha_objective_exact(alpha: &BigRational) -> BigRational {
    let one = BigRational::one();
    let b = &one - alpha;
    let b3 = &b * &b * &b;
    let num = alpha * &b3 + &b3 * &b / BigRational::from_integer(BigInt::from(8));
    let a2 = alpha * alpha;
    let den = &one - &a2 * &a2;
    num / den
}

/// Golden-section maximisation on `[lo, hi]` with a caller-supplied
/// comparison of objective values. Returns `(x, iterations, final width)`.
pub fn golden_section_max(
    mut compare: impl FnMut(f64, f64) -> Ordering,
    lo: f64,
    hi: f64,
    tol: f64,
) -> (f64, usize, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut iterations = 0;
    while (b - a) > tol && iterations < 500 {
        if compare(c, d) == Ordering::Less {
            a = c;
            c = d;
            d = a + inv_phi * (b - a);
        } else {
            b = d;
            d = c;
            c = b - inv_phi * (b - a);
        }
        iterations += 1;
        // the interior points collapse once the bracket hits float spacing
        if !(a < c && c < d && d < b) {
            break;
        }
    }
    ((a + b) / 2.0, iterations, b - a)
}

#[derive(Clone, Debug, Serialize)]
pub struct AlphaResult {
    pub alpha_star: f64,
    pub value: f64,
    pub closed_alpha: f64,
    pub closed_value: f64,
    pub iterations: usize,
    pub bracket_width: f64,
    pub scan_argmax: f64,
}

/// Verifies unimodality on a uniform scan and returns the scan's argmax.
fn unimodality_scan(lo: f64, hi: f64) -> Result<f64> {
    let xs: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64)
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| alpha_objective(x)).collect::<Result<_>>()?;
    let mut descending = false;
    for (i, w) in ys.windows(2).enumerate() {
        if w[1] < w[0] {
            descending = true;
        } else if w[1] > w[0] && descending {
            return Err(Error::NotUnimodal(format!(
                "objective rises again at alpha = {}",
                xs[i + 1]
            )));
        }
    }
    let arg = ys
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| xs[i])
        .unwrap();
    Ok(arg)
}

/// Maximises the blow-up density over `alpha`. Comparisons inside the
/// golden-section loop use exact rational arithmetic, so the bracket can
/// shrink well below the flatness limit of float evaluation.
pub fn optimize_alpha(tol: f64) -> Result<AlphaResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let (lo, hi) = (0.0, 1.0 - ALPHA_EPS);
    let scan_argmax = unimodality_scan(lo, hi)?;
    let (alpha_star, iterations, bracket_width) = golden_section_max(
        |x, y| {
            let fx = alpha_objective_exact(&from_f64(x).expect("finite"));
            let fy = alpha_objective_exact(&from_f64(y).expect("finite"));
            fx.cmp(&fy)
        },
        lo,
        hi,
        tol,
    );
    Ok(AlphaResult {
        alpha_star,
        value: alpha_objective(alpha_star)?,
        closed_alpha: closed_alpha(),
        closed_value: closed_value(),
        iterations,
        bracket_width,
        scan_argmax,
    })
}

/// Expected C3+ count of the construction from its actual level sizes:
/// each level with dominating part `h` and random part `l` contributes
/// `C(l,4)/8 + h C(l,3)/4`. `max_depth` truncates the recursion.
pub fn predicted_c3plus_count(spec: &BlowupSpec, max_depth: Option<usize>) -> Result<f64> {
    spec.validate()?;
    let mut total = 0.0;
    for (depth, &(m, h)) in spec.levels().iter().enumerate() {
        if max_depth.is_some_and(|d| depth >= d) {
            break;
        }
        if h == 0 && (m < spec.base_cutoff || m <= 1) {
            continue;
        }
        let l = (m - h) as u128;
        total += binomial(l, 4) as f64 / 8.0 + h as f64 * binomial(l, 3) as f64 / 4.0;
    }
    Ok(total)
}

/// Predicted C3+ density of the built construction.
pub fn construction_density_prediction(spec: &BlowupSpec) -> Result<f64> {
    let count = predicted_c3plus_count(spec, None)?;
    let total = binomial(spec.n as u128, 4);
    if total == 0 {
        return Ok(0.0);
    }
    Ok(count / total as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem1Row {
    pub n: usize,
    pub formula: u128,
    pub best_count: u128,
    pub maximizers: Vec<CanonicalForm>,
    pub carousel_class: Vec<CanonicalForm>,
    pub count_matches: bool,
    pub set_matches: bool,
    pub pass: bool,
}

/// Exhaustive check of the C4 maximum and maximizer set for `4..=n_max`.
pub fn theorem1_verify(n_max: usize) -> Result<Vec<Theorem1Row>> {
    if !(4..=9).contains(&n_max) {
        return Err(Error::UnsupportedSize {
            what: "exhaustive C4 verification",
            limit: 9,
            got: n_max,
        });
    }
    (4..=n_max)
        .map(|n| {
            let res = exhaustive_max(&PatternId::C4, n)?;
            let formula = c4_max_formula(n)?;
            let class = carousel_class(n)?;
            let count_matches = res.best_count == formula;
            let set_matches = res.maximizers == class;
            Ok(Theorem1Row {
                n,
                formula,
                best_count: res.best_count,
                maximizers: res.maximizers,
                carousel_class: class,
                count_matches,
                set_matches,
                pass: count_matches && set_matches,
            })
        })
        .collect()
}

/// C4 count of the carousel with the arc `(i, j)` reversed.
pub fn perturbed_carousel_c4(n: usize, i: usize, j: usize) -> u128 {
    let mut t = carousel(n);
    t.flip(i, j);
    crate::census::census_fast(&t).c4
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::Alpha;

    #[test]
    fn c4_formula_values() {
        assert_eq!(c4_max_formula(4).unwrap(), 1);
        assert_eq!(c4_max_formula(5).unwrap(), 5);
        assert_eq!(c4_max_formula(6).unwrap(), 12);
        assert_eq!(c4_max_formula(7).unwrap(), 28);
        assert_eq!(c4_max_formula(8).unwrap(), 50);
        assert_eq!(c4_max_formula(9).unwrap(), 90);
        assert_eq!(c4_max_formula(15).unwrap(), 840);
        assert!(c4_max_formula(3).is_err());
        for n in 4..300 {
            c4_max_formula(n).unwrap();
        }
        let r = c4_max_formula(1000).unwrap() as f64 / binomial(1000, 4) as f64;
        assert!((r - 0.5).abs() < 0.01);
    }

    #[test]
    fn constants_agree_with_literals() {
        assert!((3f64.cbrt() - CBRT_3_LITERAL).abs() < 1e-14);
        assert!((9f64.cbrt() - CBRT_9_LITERAL).abs() < 1e-14);
        assert!((closed_alpha() - ALPHA_LITERAL).abs() < 1e-12);
        assert!((closed_value() - VALUE_LITERAL).abs() < 1e-12);
        assert!((closed_alpha() - 0.1435836).abs() < 1e-7);
        assert!((closed_value() - 0.1575006670).abs() < 1e-10);
        assert!((1.0 - closed_alpha() - closed_low_fraction()).abs() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn objective_values() {
        assert_eq!(alpha_objective(0.0).unwrap(), 0.125);
        assert!((alpha_objective(0.5).unwrap() - 0.075).abs() < 1e-15);
        assert!((alpha_objective(closed_alpha()).unwrap() - 0.1575006670).abs() < 1e-9);
        assert!(alpha_objective(1.0).is_err());
        assert!(alpha_objective(-0.1).is_err());
        let half = crate::rational::ratio(1, 2);
        assert_eq!(alpha_objective_exact(&half), crate::rational::ratio(3, 40));
    }

    #[test]
    fn optimisation_hits_the_closed_form() {
        let r = optimize_alpha(1e-9).unwrap();
        assert!((r.alpha_star - 0.1435836).abs() < 1e-7);
        assert!((r.value - 0.1575006670).abs() < 1e-9);
        assert!((r.alpha_star - r.closed_alpha).abs() <= 1e-9);
        assert!(r.bracket_width <= 1e-9);
        for da in [-0.01, 0.01] {
            assert!(alpha_objective(r.alpha_star + da).unwrap() < r.value);
        }
        assert!((r.scan_argmax - r.closed_alpha).abs() < 2e-4);
        assert!(optimize_alpha(0.0).is_err());
    }

    #[test]
    fn golden_section_on_a_parabola() {
        let (x, _, w) = golden_section_max(
            |a, b| (-(a - 0.3f64).powi(2)).partial_cmp(&-(b - 0.3f64).powi(2)).unwrap(),
            0.0,
            1.0,
            1e-8,
        );
        assert!((x - 0.3).abs() < 1e-7);
        assert!(w <= 1e-8);
    }

    #[test]
    fn prediction_cases() {
        let spec = BlowupSpec::new(100, Alpha::Fixed(0.0), 1);
        let p = predicted_c3plus_count(&spec, None).unwrap();
        assert_eq!(p, binomial(100, 4) as f64 / 8.0);
        assert!((construction_density_prediction(&spec).unwrap() - 0.125).abs() < 1e-15);

        let spec = BlowupSpec::new(1000, Alpha::Auto, 1);
        let one = predicted_c3plus_count(&spec, Some(1)).unwrap();
        let (m, h) = spec.levels()[0];
        let l = (m - h) as u128;
        assert_eq!(one, binomial(l, 4) as f64 / 8.0 + h as f64 * binomial(l, 3) as f64 / 4.0);

        // large n approaches the limit objective
        let spec = BlowupSpec::new(2_000_000, Alpha::Auto, 1);
        let d = construction_density_prediction(&spec).unwrap();
        assert!((d - closed_value()).abs() < 1e-4, "{d}");
    }

    #[test]
    fn perturbation_loses_c4() {
        let base = c4_max_formula(7).unwrap();
        for (i, j) in [(0, 1), (0, 3), (2, 5)] {
            assert!(perturbed_carousel_c4(7, i, j) < base);
        }
    }

    #[test]
    fn theorem1_small() {
        let rows = theorem1_verify(7).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.pass), "{rows:?}");
        assert!(theorem1_verify(3).is_err());
    }
}
