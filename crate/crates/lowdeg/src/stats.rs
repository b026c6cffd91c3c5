//! Small statistics toolbox: Wilson intervals, chi-square goodness of fit,
//! Kolmogorov–Smirnov checks, and binned total-variation estimation.
//!
//! Everything here backs either a tester report (Wilson intervals) or an
//! empirical verification of a distributional claim at desk scale.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Wilson score interval for a binomial proportion.
///
/// Returns `(lower, upper)` at `z` standard normal quantiles (z = 1.96 for
/// 95%, z = 3.0 for the 3-sigma slack the check suite uses).
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Chi-square goodness-of-fit p-value of observed counts against expected
/// counts. Bins with expected count below `min_expected` are pooled into
/// their neighbor to keep the asymptotics honest.
pub fn chi_square_gof_p(observed: &[u64], expected: &[f64], min_expected: f64) -> f64 {
    assert_eq!(observed.len(), expected.len());
    // Pool consecutive bins until each pooled bin has enough expected mass.
    let mut obs_pooled: Vec<f64> = Vec::new();
    let mut exp_pooled: Vec<f64> = Vec::new();
    let mut o_acc = 0.0;
    let mut e_acc = 0.0;
    for (o, e) in observed.iter().zip(expected) {
        o_acc += *o as f64;
        e_acc += *e;
        if e_acc >= min_expected {
            obs_pooled.push(o_acc);
            exp_pooled.push(e_acc);
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if e_acc > 0.0 {
        if let (Some(o_last), Some(e_last)) = (obs_pooled.last_mut(), exp_pooled.last_mut()) {
            *o_last += o_acc;
            *e_last += e_acc;
        } else {
            obs_pooled.push(o_acc);
            exp_pooled.push(e_acc);
        }
    }
    let k = obs_pooled.len();
    if k < 2 {
        return 1.0;
    }
    let stat: f64 = obs_pooled
        .iter()
        .zip(&exp_pooled)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum();
    let dof = (k - 1) as f64;
    let chi = ChiSquared::new(dof).expect("dof >= 1");
    1.0 - chi.cdf(stat)
}

/// Two-sample Kolmogorov–Smirnov test: returns `true` when the hypothesis
/// "same distribution" is *not* rejected at significance `alpha`.
pub fn ks_two_sample_pass(a: &mut [f64], b: &mut [f64], alpha: f64) -> bool {
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let d = ks_statistic_sorted(a, b);
    let n = a.len() as f64;
    let m = b.len() as f64;
    // Asymptotic critical value c(alpha) * sqrt((n+m)/(n m)).
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    d <= c * ((n + m) / (n * m)).sqrt()
}

/// One-sample KS pass/fail of sorted-able samples against a CDF.
pub fn ks_one_sample_pass(samples: &mut [f64], cdf: impl Fn(f64) -> f64, alpha: f64) -> bool {
    samples.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in samples.iter().enumerate() {
        let f = cdf(*x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    d <= c / n.sqrt()
}

fn ks_statistic_sorted(a: &[f64], b: &[f64]) -> f64 {
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        // Advance past every copy of the current smallest value in both
        // arrays before recording a gap; measuring mid-tie would manufacture
        // spurious ECDF differences on discrete data.
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] == v {
            i += 1;
        }
        while j < b.len() && b[j] == v {
            j += 1;
        }
        let fa = i as f64 / a.len() as f64;
        let fb = j as f64 / b.len() as f64;
        d = d.max((fa - fb).abs());
    }
    d
}

/// Binned L1/2 total-variation estimate between two scalar samples over a
/// common equal-width binning of their joint range.
pub fn tv_binned(a: &[f64], b: &[f64], bins: usize) -> f64 {
    assert!(bins >= 1 && !a.is_empty() && !b.is_empty());
    let lo = a
        .iter()
        .chain(b)
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let hi = a
        .iter()
        .chain(b)
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let width = ((hi - lo) / bins as f64).max(f64::MIN_POSITIVE);
    let mut ca = vec![0.0f64; bins];
    let mut cb = vec![0.0f64; bins];
    for &x in a {
        let k = (((x - lo) / width) as usize).min(bins - 1);
        ca[k] += 1.0 / a.len() as f64;
    }
    for &x in b {
        let k = (((x - lo) / width) as usize).min(bins - 1);
        cb[k] += 1.0 / b.len() as f64;
    }
    0.5 * ca
        .iter()
        .zip(&cb)
        .map(|(x, y)| (x - y).abs())
        .sum::<f64>()
}

/// Total variation between an empirical count vector and an exact PMF given
/// on the same support (both renormalized defensively).
pub fn tv_counts_vs_pmf(counts: &[u64], pmf: &[f64]) -> f64 {
    assert_eq!(counts.len(), pmf.len());
    let n: u64 = counts.iter().sum();
    let z: f64 = pmf.iter().sum();
    0.5 * counts
        .iter()
        .zip(pmf)
        .map(|(c, p)| (*c as f64 / n as f64 - p / z).abs())
        .sum::<f64>()
}

/// Sample median (average of middle pair for even length).
pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Empirical quantile (nearest-rank) of a sample; `q` in [0,1].
pub fn quantile(values: &mut [f64], q: f64) -> f64 {
    assert!(!values.is_empty() && (0.0..=1.0).contains(&q));
    values.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let idx = ((values.len() as f64 - 1.0) * q).round() as usize;
    values[idx]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn wilson_basics() {
        let (lo, hi) = wilson_interval(200, 200, 1.96);
        assert!(lo > 0.97 && (hi - 1.0).abs() < 1e-12);
        let (lo, hi) = wilson_interval(100, 200, 1.96);
        assert!(lo < 0.5 && hi > 0.5);
    }

    #[test]
    fn chi_square_accepts_its_own_pmf() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pmf = [0.2, 0.3, 0.4, 0.1];
        let n = 100_000u64;
        let mut counts = [0u64; 4];
        for _ in 0..n {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            for (k, p) in pmf.iter().enumerate() {
                acc += p;
                if u < acc {
                    counts[k] += 1;
                    break;
                }
            }
        }
        let expected: Vec<f64> = pmf.iter().map(|p| p * n as f64).collect();
        assert!(chi_square_gof_p(&counts, &expected, 5.0) > 0.001);
    }

    #[test]
    fn chi_square_rejects_wrong_pmf() {
        let counts = [50_000u64, 50_000];
        let expected = [75_000.0, 25_000.0];
        assert!(chi_square_gof_p(&counts, &expected, 5.0) < 1e-6);
    }

    #[test]
    fn ks_same_distribution_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut a: Vec<f64> = (0..20_000).map(|_| rng.gen::<f64>()).collect();
        let mut b: Vec<f64> = (0..20_000).map(|_| rng.gen::<f64>()).collect();
        assert!(ks_two_sample_pass(&mut a, &mut b, 0.01));
    }

    #[test]
    fn ks_different_distribution_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut a: Vec<f64> = (0..20_000).map(|_| rng.gen::<f64>()).collect();
        let mut b: Vec<f64> = (0..20_000).map(|_| rng.gen::<f64>() * 1.2).collect();
        assert!(!ks_two_sample_pass(&mut a, &mut b, 0.01));
    }

    #[test]
    fn tv_of_identical_counts_is_zero() {
        assert_eq!(tv_counts_vs_pmf(&[10, 30], &[0.25, 0.75]), 0.0);
    }

    #[test]
    fn median_and_quantile() {
        let mut v = vec![3.0, 1.0, 2.0];
        assert_eq!(median(&mut v), 2.0);
        let mut v = vec![4.0, 1.0, 2.0, 3.0];
        assert_eq!(median(&mut v), 2.5);
        let mut v: Vec<f64> = (0..101).map(|i| i as f64).collect();
        assert_eq!(quantile(&mut v, 0.9), 90.0);
    }
}
