//! Noise-tolerant additivity testing: given oracle access to f that is
//! pointwise α-close to some additive g (g(x+y) = g(x)+g(y)), accept; reject
//! functions far from every additive function under the sampling
//! distribution.
//!
//! Structure: a batch of three direct additivity checks at threshold δ = 3α,
//! then a main loop that self-corrects f at each sampled point via the
//! contraction p ↦ p/κ_p into the small ball B(0, r), r = 1/50, and compares
//! f(p) against the corrected value at threshold 5δn^{3/2}κ_p. The
//! concentrated variant skips points outside B(0, R); the multiplicative
//! variant runs the same loop on an arbitrary sampler without the skip, its
//! guarantee degrading multiplicatively with ‖p‖ through κ_p.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::compare::Comparison;
use crate::error::Error;
use crate::oracle::{ConcentratedDistribution, FunctionOracle};
use crate::sampling::sample_centered;
use crate::stats::median;
use crate::verdict::{RejectSite, Verdict, Witness};
use crate::Result;

/// Which published NO-case separation constant a report cites. The source
/// material states both; we expose the choice instead of adjudicating it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoCaseBound {
    /// β = 21015·R·n^{3/2}·α.
    RadiusScaled,
    /// β = 4515·n²·α.
    DimensionSquared,
}

impl NoCaseBound {
    pub fn beta(&self, n: usize, mass_radius: f64, alpha: f64) -> f64 {
        match self {
            NoCaseBound::RadiusScaled => {
                21015.0 * mass_radius * (n as f64).powf(1.5) * alpha
            }
            NoCaseBound::DimensionSquared => 4515.0 * (n as f64).powi(2) * alpha,
        }
    }
}

/// Tester parameters; `new` fills the documented defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditivityConfig {
    pub alpha: f64,
    pub eps: f64,
    /// Concentration radius R (ignored by the multiplicative variant).
    pub mass_radius: f64,
    /// Contraction ball radius; 1/50 unless overridden.
    pub r: f64,
    pub n_add: u32,
    pub n_main: u32,
    pub n_approx: u32,
    /// Separation constant cited in reports.
    pub no_case: NoCaseBound,
    pub comparison: Comparison,
}

impl AdditivityConfig {
    pub fn new(alpha: f64, eps: f64, mass_radius: f64) -> Result<Self> {
        if alpha < 0.0 {
            return Err(Error::InvalidParameter("alpha must be >= 0".into()));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter("eps must lie in (0, 1)".into()));
        }
        if !(mass_radius > 0.0) {
            return Err(Error::InvalidParameter("R must be > 0".into()));
        }
        const C: f64 = 48.0;
        Ok(AdditivityConfig {
            alpha,
            eps,
            mass_radius,
            r: 1.0 / 50.0,
            n_add: C as u32,
            n_main: (C / eps).ceil() as u32,
            n_approx: (C * (1.0 / eps).ln()).ceil().max(2.0) as u32,
            no_case: NoCaseBound::RadiusScaled,
            comparison: Comparison::default(),
        })
    }

    /// δ = 3α.
    pub fn delta(&self) -> f64 {
        3.0 * self.alpha
    }

    /// Contraction factor κ_p = ⌈‖p‖/r⌉ (1 inside the ball).
    pub fn kappa(&self, p: &[f64]) -> u64 {
        let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= self.r {
            1
        } else {
            (norm / self.r).ceil() as u64
        }
    }

    /// Main-loop rejection threshold at p: 5·δ·n^{3/2}·κ_p.
    pub fn final_threshold(&self, n: usize, kappa: u64) -> f64 {
        5.0 * self.delta() * (n as f64).powf(1.5) * kappa as f64
    }

    fn validate(&self) -> Result<()> {
        if self.n_add == 0 || self.n_main == 0 || self.n_approx == 0 {
            return Err(Error::InvalidParameter(
                "repetition counts must be >= 1".into(),
            ));
        }
        if !(self.r > 0.0) {
            return Err(Error::InvalidParameter("r must be > 0".into()));
        }
        Ok(())
    }
}

fn fmt_point(p: &[f64]) -> String {
    let coords: Vec<String> = p.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", coords.join(", "))
}

// ---------------------------------------------------------------------------
// Direct checks
// ---------------------------------------------------------------------------

/// N_add rounds of the three direct checks on Gaussian samples x, y, z:
///  1. |f(−x) + f(x)| ≤ δ,
///  2. |f(x−y) − (f(x) − f(y))| ≤ δ,
///  3. |f((x−y)/√2) − (f((x−z)/√2) + f((z−y)/√2))| ≤ δ.
pub fn test_additivity<R: Rng + ?Sized>(
    f: &FunctionOracle,
    cfg: &AdditivityConfig,
    rng: &mut R,
) -> Result<Verdict> {
    cfg.validate()?;
    let n = f.n();
    let delta = cfg.delta();
    for _ in 0..cfg.n_add {
        let x = sample_centered(n, 1.0, rng);
        let y = sample_centered(n, 1.0, rng);
        let z = sample_centered(n, 1.0, rng);
        let neg_x: Vec<f64> = x.iter().map(|v| -v).collect();
        let diff_xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let s = std::f64::consts::SQRT_2.recip();
        let h_xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| (a - b) * s).collect();
        let h_xz: Vec<f64> = x.iter().zip(&z).map(|(a, b)| (a - b) * s).collect();
        let h_zy: Vec<f64> = z.iter().zip(&y).map(|(a, b)| (a - b) * s).collect();
        let checks: [(u8, f64, f64, String); 3] = {
            let (fx, fnx) = (f.eval(&x), f.eval(&neg_x));
            let (fxy, fy) = (f.eval(&diff_xy), f.eval(&y));
            let (fhxy, fhxz, fhzy) = (f.eval(&h_xy), f.eval(&h_xz), f.eval(&h_zy));
            [
                (1, fnx + fx, fnx.abs() + fx.abs(), fmt_point(&x)),
                (
                    2,
                    fxy - (fx - fy),
                    fxy.abs() + fx.abs() + fy.abs(),
                    format!("x={}, y={}", fmt_point(&x), fmt_point(&y)),
                ),
                (
                    3,
                    fhxy - (fhxz + fhzy),
                    fhxy.abs() + fhxz.abs() + fhzy.abs(),
                    format!(
                        "x={}, y={}, z={}",
                        fmt_point(&x),
                        fmt_point(&y),
                        fmt_point(&z)
                    ),
                ),
            ]
        };
        for (check, stat, scale, sample) in checks {
            if cfg.comparison.exceeds(stat, delta, scale) {
                return Ok(Verdict::reject(
                    RejectSite::AdditivityCheck { check },
                    Witness {
                        sample,
                        statistic: stat,
                    },
                    f.queries(),
                ));
            }
        }
    }
    Ok(Verdict::accept(f.queries()))
}

// ---------------------------------------------------------------------------
// Self-correction
// ---------------------------------------------------------------------------

/// Outcome of one self-corrected evaluation.
#[derive(Debug, Clone)]
pub enum AdditiveQueryOutcome {
    Value(f64),
    Reject { site: RejectSite, witness: Witness },
}

/// Self-corrected value κ_p·g_{x₁}(p/κ_p), where g_x(q) = f(q − x) + f(x);
/// rejects if any of N_approx draws strays more than 2δ from the first.
pub fn approximate_g_additive<R: Rng + ?Sized>(
    f: &FunctionOracle,
    p: &[f64],
    cfg: &AdditivityConfig,
    rng: &mut R,
) -> Result<AdditiveQueryOutcome> {
    cfg.validate()?;
    let n = f.n();
    let kappa = cfg.kappa(p);
    let contracted: Vec<f64> = p.iter().map(|v| v / kappa as f64).collect();
    let gap = 2.0 * cfg.delta();
    let mut first: Option<(f64, f64)> = None; // (value, scale)
    for j in 1..=cfg.n_approx {
        let x = sample_centered(n, 1.0, rng);
        let shifted: Vec<f64> = contracted.iter().zip(&x).map(|(a, b)| a - b).collect();
        let (fs, fx) = (f.eval(&shifted), f.eval(&x));
        let g = fs + fx;
        let scale = fs.abs() + fx.abs();
        match first {
            None => first = Some((g, scale)),
            Some((g1, scale1)) => {
                if cfg.comparison.exceeds(g - g1, gap, scale + scale1) {
                    return Ok(AdditiveQueryOutcome::Reject {
                        site: RejectSite::AdditivityGap,
                        witness: Witness {
                            sample: format!("p={}, draw j={j}", fmt_point(p)),
                            statistic: g - g1,
                        },
                    });
                }
            }
        }
    }
    let (g1, _) = first.expect("n_approx >= 1");
    Ok(AdditiveQueryOutcome::Value(kappa as f64 * g1))
}

// ---------------------------------------------------------------------------
// Full testers
// ---------------------------------------------------------------------------

fn main_loop<R: Rng + ?Sized>(
    f: &FunctionOracle,
    cfg: &AdditivityConfig,
    rng: &mut R,
    mut next_point: impl FnMut(&mut R) -> Vec<f64>,
    skip_outside_ball: bool,
) -> Result<Verdict> {
    let direct = test_additivity(f, cfg, rng)?;
    if !direct.is_accept() {
        return Ok(direct);
    }
    let n = f.n();
    for _ in 0..cfg.n_main {
        let p = next_point(rng);
        if skip_outside_ball {
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > cfg.mass_radius {
                continue;
            }
        }
        match approximate_g_additive(f, &p, cfg, rng)? {
            AdditiveQueryOutcome::Reject { site, witness } => {
                return Ok(Verdict::reject(site, witness, f.queries()))
            }
            AdditiveQueryOutcome::Value(g) => {
                let fp = f.eval(&p);
                let kappa = cfg.kappa(&p);
                let threshold = cfg.final_threshold(n, kappa);
                if cfg
                    .comparison
                    .exceeds(fp - g, threshold, fp.abs() + g.abs())
                {
                    return Ok(Verdict::reject(
                        RejectSite::MainMismatch,
                        Witness {
                            sample: fmt_point(&p),
                            statistic: fp - g,
                        },
                        f.queries(),
                    ));
                }
            }
        }
    }
    Ok(Verdict::accept(f.queries()))
}

/// Concentrated-distribution tester: direct checks, then N_main samples from
/// `dist` with points outside B(0, R) skipped.
pub fn approx_additivity_test<R: Rng + ?Sized>(
    f: &FunctionOracle,
    dist: &ConcentratedDistribution,
    cfg: &AdditivityConfig,
    rng: &mut R,
) -> Result<Verdict> {
    main_loop(f, cfg, rng, |rng| dist.sample(rng), true)
}

/// Distribution-free multiplicative variant: identical loop over an arbitrary
/// sampler with no ball-membership skip; the effective error guarantee scales
/// as O((1 + ‖p‖)·n^{3/2}·α) through κ_p.
pub fn mult_approx_additivity_test<R: Rng + ?Sized>(
    f: &FunctionOracle,
    sampler: impl FnMut(&mut R) -> Vec<f64>,
    cfg: &AdditivityConfig,
    rng: &mut R,
) -> Result<Verdict> {
    main_loop(f, cfg, rng, sampler, false)
}

// ---------------------------------------------------------------------------
// Empirical-invariant helpers (shared with the check suite)
// ---------------------------------------------------------------------------

/// Bridging statistics for the sample median of g_x(q) draws at q = p/κ_p:
/// returns (fraction of draws within `delta` of the median, pairwise
/// far-fraction η̂ estimated from `pair_trials` random pairs).
pub fn median_bridging_stats<R: Rng + ?Sized>(
    f: &FunctionOracle,
    p: &[f64],
    delta: f64,
    cfg: &AdditivityConfig,
    draws: usize,
    pair_trials: usize,
    rng: &mut R,
) -> (f64, f64) {
    let n = f.n();
    let kappa = cfg.kappa(p);
    let contracted: Vec<f64> = p.iter().map(|v| v / kappa as f64).collect();
    let mut gs: Vec<f64> = (0..draws)
        .map(|_| {
            let x = sample_centered(n, 1.0, rng);
            let shifted: Vec<f64> = contracted.iter().zip(&x).map(|(a, b)| a - b).collect();
            f.eval(&shifted) + f.eval(&x)
        })
        .collect();
    let mut far_pairs = 0usize;
    for _ in 0..pair_trials {
        let a = gs[rng.gen_range(0..gs.len())];
        let b = gs[rng.gen_range(0..gs.len())];
        if (a - b).abs() > delta {
            far_pairs += 1;
        }
    }
    let eta_hat = far_pairs as f64 / pair_trials as f64;
    let med = median(&mut gs);
    let close = gs.iter().filter(|g| (*g - med).abs() < delta).count();
    (close as f64 / gs.len() as f64, eta_hat)
}

/// Constructive additive approximation of a δ-additive g on B(0, r): per-axis
/// least-squares linear fits through the origin, h(x) = Σᵢ hᵢ·xᵢ. Returns the
/// fitted slopes.
pub fn constructive_additive_fit(
    g: &dyn Fn(&[f64]) -> f64,
    n: usize,
    r: f64,
    grid: usize,
) -> Vec<f64> {
    assert!(grid >= 2 && r > 0.0);
    (0..n)
        .map(|i| {
            let mut num = 0.0;
            let mut den = 0.0;
            for k in 0..grid {
                let t = -r + 2.0 * r * k as f64 / (grid - 1) as f64;
                let mut x = vec![0.0; n];
                x[i] = t;
                num += t * g(&x);
                den += t * t;
            }
            num / den
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::DistSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_cfg(alpha: f64, eps: f64, mass_radius: f64) -> AdditivityConfig {
        let mut cfg = AdditivityConfig::new(alpha, eps, mass_radius).unwrap();
        cfg.n_add = 10;
        cfg.n_main = 15;
        cfg.n_approx = 5;
        cfg
    }

    fn gaussian_dist(n: usize, sigma: f64, mass_radius: f64) -> ConcentratedDistribution {
        ConcentratedDistribution::new(
            DistSpec::Gaussian { n, sigma },
            mass_radius,
            0.05,
            7,
        )
        .unwrap()
    }

    #[test]
    fn config_defaults() {
        let cfg = AdditivityConfig::new(0.01, 0.1, 3.0).unwrap();
        assert_eq!(cfg.delta(), 0.03);
        assert_eq!(cfg.r, 0.02);
        // κ for ‖p‖ = 0.5, r = 1/50 is ⌈25⌉ = 25.
        assert_eq!(cfg.kappa(&[0.5, 0.0]), 25);
        assert_eq!(cfg.kappa(&[0.01, 0.0]), 1);
        assert_eq!(
            cfg.final_threshold(4, 25),
            5.0 * 0.03 * 8.0 * 25.0
        );
    }

    #[test]
    fn no_case_constants() {
        assert_eq!(NoCaseBound::RadiusScaled.beta(4, 2.0, 0.01), 21015.0 * 2.0 * 8.0 * 0.01);
        assert_eq!(NoCaseBound::DimensionSquared.beta(4, 2.0, 0.01), 4515.0 * 16.0 * 0.01);
    }

    #[test]
    fn direct_checks_accept_noisy_additive() {
        // Each statistic combines at most 3 α-perturbations, hence ≤ 3α = δ.
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let f = FunctionOracle::additive_plus_noise_oracle(vec![1.5, -0.7, 0.2], 0.05, 3).unwrap();
        let cfg = small_cfg(0.05, 0.1, 3.0);
        for _ in 0..10 {
            assert!(test_additivity(&f, &cfg, &mut rng).unwrap().is_accept());
        }
    }

    #[test]
    fn direct_checks_exact_linear_alpha_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        let f = FunctionOracle::additive_plus_noise_oracle(vec![2.0, -1.0], 0.0, 0).unwrap();
        let cfg = small_cfg(0.0, 0.1, 3.0);
        assert!(test_additivity(&f, &cfg, &mut rng).unwrap().is_accept());
    }

    #[test]
    fn direct_checks_reject_norm_squared() {
        // f(x) = ‖x‖²: the difference check's statistic is |2‖y‖² − 2⟨x,y⟩|,
        // typically far above δ.
        let f = FunctionOracle::custom(3, "norm2", |x| x.iter().map(|v| v * v).sum());
        let cfg = small_cfg(0.01, 0.1, 3.0);
        let mut rejected = 0;
        for seed in 0..30 {
            let mut rng = ChaCha8Rng::seed_from_u64(73 + seed);
            if !test_additivity(&f, &cfg, &mut rng).unwrap().is_accept() {
                rejected += 1;
            }
        }
        assert!(rejected >= 28, "rejected {rejected}/30");
    }

    #[test]
    fn approximate_g_is_close_on_yes_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(74);
        let c = vec![1.2, -0.4];
        let alpha = 0.02;
        let f = FunctionOracle::additive_plus_noise_oracle(c.clone(), alpha, 9).unwrap();
        let cfg = small_cfg(alpha, 0.1, 3.0);
        for _ in 0..25 {
            let p = sample_centered(2, 1.0, &mut rng);
            let kappa = cfg.kappa(&p);
            match approximate_g_additive(&f, &p, &cfg, &mut rng).unwrap() {
                AdditiveQueryOutcome::Value(v) => {
                    let truth: f64 = p.iter().zip(&c).map(|(a, b)| a * b).sum();
                    assert!(
                        (v - truth).abs() <= 2.0 * cfg.delta() * kappa as f64 + alpha,
                        "corrected value strayed: |{v} - {truth}| with kappa {kappa}"
                    );
                }
                AdditiveQueryOutcome::Reject { .. } => panic!("YES instance rejected"),
            }
        }
    }

    #[test]
    fn approximate_g_exact_linear_recovers_f() {
        let mut rng = ChaCha8Rng::seed_from_u64(75);
        let c = vec![0.9, 2.0];
        let f = FunctionOracle::additive_plus_noise_oracle(c.clone(), 0.0, 0).unwrap();
        let cfg = small_cfg(0.0, 0.1, 3.0);
        let p = [1.3, -0.6];
        match approximate_g_additive(&f, &p, &cfg, &mut rng).unwrap() {
            AdditiveQueryOutcome::Value(v) => {
                let truth: f64 = p.iter().zip(&c).map(|(a, b)| a * b).sum();
                assert!((v - truth).abs() < 1e-12);
            }
            AdditiveQueryOutcome::Reject { .. } => panic!("exact linear rejected"),
        }
    }

    #[test]
    fn concentrated_tester_accepts_yes_instances() {
        let dist = gaussian_dist(2, 1.0, 4.0);
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(76 + seed);
            let f =
                FunctionOracle::additive_plus_noise_oracle(vec![1.0, -2.5], 0.03, seed).unwrap();
            let cfg = small_cfg(0.03, 0.1, 4.0);
            let v = approx_additivity_test(&f, &dist, &cfg, &mut rng).unwrap();
            assert!(v.is_accept(), "rejected at {:?}", v.reject_site);
        }
    }

    #[test]
    fn concentrated_tester_rejects_localized_jump() {
        // Linear plus a jump on {x₁ > θ} with dist mass well above 2ε.
        let dist = gaussian_dist(2, 1.0, 4.0);
        let cfg = small_cfg(0.01, 0.2, 4.0);
        let jump = 10.0 * cfg.final_threshold(2, 1 + (4.0f64 / cfg.r) as u64);
        let f = FunctionOracle::custom(2, "linear_jump", move |x| {
            x[0] - x[1] + if x[0] > 0.3 { jump } else { 0.0 }
        });
        let mut rejections = 0;
        for seed in 0..30 {
            let mut rng = ChaCha8Rng::seed_from_u64(600 + seed);
            if !approx_additivity_test(&f, &dist, &cfg, &mut rng)
                .unwrap()
                .is_accept()
            {
                rejections += 1;
            }
        }
        assert!(rejections >= 20, "rejections {rejections}/30");
    }

    #[test]
    fn multiplicative_tester_accepts_any_distribution() {
        // A wildly spread sampler (no concentration) over an exact linear f.
        let f = FunctionOracle::additive_plus_noise_oracle(vec![3.0, 0.5], 0.0, 0).unwrap();
        let cfg = small_cfg(0.0, 0.1, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let v = mult_approx_additivity_test(
            &f,
            |rng: &mut ChaCha8Rng| {
                let scale = 10f64.powi(rng.gen_range(-2..4));
                sample_centered(2, scale * scale, rng)
            },
            &cfg,
            &mut rng,
        )
        .unwrap();
        assert!(v.is_accept());
    }

    #[test]
    fn multiplicative_tester_does_not_skip_far_points() {
        // Counterpart to the skip rule: a jump living far outside B(0, R)
        // still gets probed by the multiplicative variant.
        let cfg = small_cfg(0.01, 0.2, 1.0);
        let jump = 1e6;
        let f = FunctionOracle::custom(1, "far_jump", move |x| {
            x[0] + if x[0] > 5.0 { jump } else { 0.0 }
        });
        let mut rejections = 0;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(700 + seed);
            let v = mult_approx_additivity_test(
                &f,
                |rng: &mut ChaCha8Rng| vec![rng.gen_range(4.0..8.0)],
                &cfg,
                &mut rng,
            )
            .unwrap();
            if !v.is_accept() {
                rejections += 1;
            }
        }
        assert!(rejections >= 15, "rejections {rejections}/20");
    }

    #[test]
    fn median_bridging_on_yes_instances() {
        // For each test point the fraction of draws within δ of the sample
        // median must be at least 1 − 4η̂ (η̂ = measured pairwise far-fraction).
        let mut rng = ChaCha8Rng::seed_from_u64(78);
        let alpha = 0.05;
        let f = FunctionOracle::additive_plus_noise_oracle(vec![1.0, 0.7], alpha, 5).unwrap();
        let cfg = small_cfg(alpha, 0.1, 3.0);
        for _ in 0..8 {
            let p = sample_centered(2, 1.0, &mut rng);
            let (close_frac, eta_hat) =
                median_bridging_stats(&f, &p, cfg.delta(), &cfg, 2000, 20_000, &mut rng);
            assert!(
                close_frac >= 1.0 - 4.0 * eta_hat - 0.02,
                "close {close_frac}, eta {eta_hat}"
            );
        }
    }

    #[test]
    fn constructive_fit_tracks_delta_additive_functions() {
        // 20 synthetic δ-additive functions on B(0, r): linear plus a bounded
        // perturbation of size ≤ δ/3 (so every additivity defect is ≤ δ).
        // The per-axis fit must stay within the constructive 9nδ bound.
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        let delta = 0.01;
        for trial in 0..20 {
            let n = 1 + (trial as usize % 5);
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let phase: f64 = rng.gen_range(0.0..10.0);
            let r = 0.02;
            let cc = c.clone();
            let g = move |x: &[f64]| -> f64 {
                let lin: f64 = x.iter().zip(&cc).map(|(a, b)| a * b).sum();
                let wiggle: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (1000.0 * v + phase + i as f64).sin())
                    .sum::<f64>()
                    / n as f64;
                lin + delta / 3.0 * wiggle
            };
            let slopes = constructive_additive_fit(&g, n, r, 64);
            let mut worst: f64 = 0.0;
            for _ in 0..300 {
                // Uniform-ish points inside B(0, r).
                let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-r..r)).collect();
                let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > r {
                    for v in &mut x {
                        *v *= r / norm;
                    }
                }
                let h: f64 = x.iter().zip(&slopes).map(|(a, b)| a * b).sum();
                worst = worst.max((g(&x) - h).abs());
            }
            assert!(
                worst <= 9.0 * n as f64 * delta,
                "n={n}: sup |g - h| = {worst} > {}",
                9.0 * n as f64 * delta
            );
        }
    }
}
