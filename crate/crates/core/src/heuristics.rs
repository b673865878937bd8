//! Density heuristics for duplicates, in the spirit of Cramér's model:
//! treat "n has a representation" as an independent event with
//! probability s_k(x)/x and ask how often two such events coincide.
//!
//! Whether the predicted count of coincidences diverges is decided by
//! the exponent on x in the per-n probability: above -1 diverges, below
//! -1 converges, and exactly -1 converges when a positive power of
//! log x also divides the term. The exponents are rational in k, so the
//! classification is computed with exact integer arithmetic.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Infinite,
    Finite,
}

/// One evaluated density estimate.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HeuristicEstimate {
    pub x: f64,
    pub k: u32,
    pub k_prime: Option<u32>,
    pub probability_per_n: f64,
    pub expected_count_to_x: f64,
    pub classification: Classification,
}

/// The comparator d(x) = x^{1/3} / (log x)^{5/3} for counts of integers
/// with two square-chain representations.
pub fn d_of_x(x: f64) -> Result<f64> {
    if !(x > 1.0) {
        return Err(Error::domain(format!("d(x) needs x > 1, got {x}")));
    }
    Ok(x.cbrt() / x.ln().powf(5.0 / 3.0))
}

fn check_x(x: f64) -> Result<f64> {
    if !(x > std::f64::consts::E) {
        return Err(Error::domain(format!(
            "density estimates need x > e, got {x}"
        )));
    }
    Ok(x)
}

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::domain(format!("exponent k = {k} is below 2")));
    }
    Ok(())
}

/// Divergence decision for a term x^{num/den} / (log x)^w with den > 0.
fn classify(num: i64, den: i64, positive_log_power: bool) -> Classification {
    debug_assert!(den > 0);
    if num > -den {
        Classification::Infinite
    } else if num == -den && !positive_log_power {
        Classification::Infinite
    } else {
        Classification::Finite
    }
}

/// Per-n probability that n carries two length-distinct chains of k-th
/// powers: 18 / (x^{2/3} (log x)^{5/3}) for k = 2, and
/// (k^3 (k+1) / (2 (k-1))) x^{4/(k+1) - 2} / (log x)^{(3k-1)/(k+1)}
/// for k >= 3.
pub fn same_k_duplicate_density(x: f64, k: u32) -> Result<HeuristicEstimate> {
    check_k(k)?;
    let x = check_x(x)?;
    let kf = k as f64;
    let (probability, classification) = if k == 2 {
        let p = 18.0 / (x.powf(2.0 / 3.0) * x.ln().powf(5.0 / 3.0));
        (p, classify(-2, 3, true))
    } else {
        let coeff = kf.powi(3) * (kf + 1.0) / (2.0 * (kf - 1.0));
        let p = coeff * x.powf(4.0 / (kf + 1.0) - 2.0) / x.ln().powf((3.0 * kf - 1.0) / (kf + 1.0));
        // x-exponent 4/(k+1) - 2 = (2 - 2k)/(k+1).
        (p, classify(2 - 2 * k as i64, k as i64 + 1, true))
    };
    Ok(HeuristicEstimate {
        x,
        k,
        k_prime: None,
        probability_per_n: probability,
        expected_count_to_x: x * probability,
        classification,
    })
}

/// The naive first estimate (s_k(x)/x)^2, kept as the comparator the
/// refined model improves on:
/// x^{4/(k+1) - 2} k^4 / (log x)^{2k/(k+1)}.
pub fn first_try_same_k_density(x: f64, k: u32) -> Result<f64> {
    check_k(k)?;
    let x = check_x(x)?;
    let kf = k as f64;
    Ok(x.powf(4.0 / (kf + 1.0) - 2.0) * kf.powi(4) / x.ln().powf(2.0 * kf / (kf + 1.0)))
}

fn check_pair(k: u32, k_prime: u32) -> Result<()> {
    check_k(k)?;
    if k >= k_prime {
        return Err(Error::domain(format!(
            "cross pair needs k < k', got k = {k}, k' = {k_prime}"
        )));
    }
    Ok(())
}

/// Per-n probability that n carries chains for both exponents:
/// (k k')^2 x^{2/(k+1) + 2/(k'+1) - 2} / (log x)^{2k/(k+1) + 2k'/(k'+1)}.
pub fn cross_k_probability(x: f64, k: u32, k_prime: u32) -> Result<f64> {
    check_pair(k, k_prime)?;
    let x = check_x(x)?;
    let kf = k as f64;
    let kp = k_prime as f64;
    let exp_x = 2.0 / (kf + 1.0) + 2.0 / (kp + 1.0) - 2.0;
    let exp_log = 2.0 * kf / (kf + 1.0) + 2.0 * kp / (kp + 1.0);
    Ok((kf * kp).powi(2) * x.powf(exp_x) / x.ln().powf(exp_log))
}

/// Expect infinitely many cross duplicates exactly when
/// 2/(k+1) + 2/(k'+1) > 1.
pub fn cross_k_classifier(k: u32, k_prime: u32) -> Result<Classification> {
    check_pair(k, k_prime)?;
    let (ki, kpi) = (k as i64, k_prime as i64);
    // x-exponent 2/(k+1) + 2/(k'+1) - 2 over denominator (k+1)(k'+1).
    let den = (ki + 1) * (kpi + 1);
    let num = 2 * (kpi + 1) + 2 * (ki + 1) - 2 * den;
    Ok(classify(num, den, true))
}

pub fn cross_k_estimate(x: f64, k: u32, k_prime: u32) -> Result<HeuristicEstimate> {
    let probability = cross_k_probability(x, k, k_prime)?;
    Ok(HeuristicEstimate {
        x,
        k,
        k_prime: Some(k_prime),
        probability_per_n: probability,
        expected_count_to_x: x * probability,
        classification: cross_k_classifier(k, k_prime)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn d_spot_values() {
        assert!(close(d_of_x(1e18).unwrap(), 2014.5884682, 1e-8));
        assert!(close(d_of_x(1e10).unwrap(), 11.5604263753, 1e-8));
        let e = std::f64::consts::E;
        let closed_form = (e / 3.0).exp() / (5.0f64 / 3.0).exp();
        assert!(close(d_of_x(e.exp()).unwrap(), closed_form, 1e-12));
        assert!(d_of_x(1.0).is_err());
        assert!(d_of_x(0.5).is_err());
    }

    #[test]
    fn d_is_increasing_past_two_hundred() {
        let mut prev = d_of_x(200.0).unwrap();
        let mut x = 200.0;
        while x < 1e12 {
            x *= 1.37;
            let cur = d_of_x(x).unwrap();
            assert!(cur > prev, "d not increasing at {x}");
            prev = cur;
        }
    }

    #[test]
    fn refined_square_estimate_is_eighteen_d() {
        for x in [1e6, 1e10, 1e14, 1e18] {
            let est = same_k_duplicate_density(x, 2).unwrap();
            assert_eq!(est.classification, Classification::Infinite);
            assert!(close(
                est.expected_count_to_x,
                18.0 * d_of_x(x).unwrap(),
                1e-12
            ));
        }
    }

    #[test]
    fn higher_powers_are_finite() {
        for k in [3u32, 4, 5, 10, 20] {
            let est = same_k_duplicate_density(1e12, k).unwrap();
            assert_eq!(est.classification, Classification::Finite, "k = {k}");
        }
    }

    #[test]
    fn naive_vs_refined_ratio_grows_like_cuberoot_log() {
        // naive / refined = (8/9) (log x)^{1/3} exactly for k = 2.
        for x in [1e6_f64, 1e10, 1e14, 1e18] {
            let naive = first_try_same_k_density(x, 2).unwrap();
            let refined = same_k_duplicate_density(x, 2).unwrap().probability_per_n;
            let ratio = naive / refined;
            assert!(close(ratio, 8.0 / 9.0 * x.ln().cbrt(), 1e-12), "x = {x}");
        }
    }

    #[test]
    fn naive_density_is_little_o_of_one_over_x_for_k_four() {
        let mut prev = f64::INFINITY;
        for x in [1e6_f64, 1e12, 1e18] {
            let v = x * first_try_same_k_density(x, 4).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn classifier_boundary() {
        assert_eq!(cross_k_classifier(2, 3).unwrap(), Classification::Infinite);
        assert_eq!(cross_k_classifier(2, 4).unwrap(), Classification::Infinite);
        assert_eq!(cross_k_classifier(2, 5).unwrap(), Classification::Finite);
        assert_eq!(cross_k_classifier(3, 4).unwrap(), Classification::Finite);
    }

    #[test]
    fn classifier_exhaustive_to_twenty() {
        let mut infinite = Vec::new();
        for k in 2..=20u32 {
            for k_prime in (k + 1)..=20 {
                if cross_k_classifier(k, k_prime).unwrap() == Classification::Infinite {
                    infinite.push((k, k_prime));
                }
            }
        }
        assert_eq!(infinite, vec![(2, 3), (2, 4)]);
    }

    #[test]
    fn domain_errors() {
        assert!(same_k_duplicate_density(1e6, 1).is_err());
        assert!(same_k_duplicate_density(2.0, 2).is_err());
        assert!(cross_k_classifier(3, 3).is_err());
        assert!(cross_k_classifier(4, 3).is_err());
        assert!(cross_k_probability(1e6, 5, 2).is_err());
    }

    #[test]
    fn densities_decrease_in_x() {
        for k in [2u32, 3, 5] {
            let mut prev = f64::INFINITY;
            for e in 3..=20 {
                let x = 10f64.powi(e);
                let p = same_k_duplicate_density(x, k).unwrap().probability_per_n;
                assert!(p > 0.0 && p < prev, "k = {k}, x = {x}");
                prev = p;
            }
        }
    }
}
