//! The noise-tolerant low-degree tester: one-sided testing of "f is
//! pointwise α-close to a degree-≤d polynomial" under a distribution
//! concentrated in B(0, R).
//!
//! Same architecture as the exact tester, with every equality check widened
//! to a threshold: the characterization statistic may move by δ = 2^{d+1}α,
//! in-ball self-correction draws may disagree by 2^{d+2}δ, and the final
//! f-vs-g comparison uses either the certified theoretical threshold
//! 2·2^{(2n)^{45d}}·R^d·δ — carried in log2-space, since it overflows every
//! float format for nontrivial (n, d) — or a practical override (default
//! 10³·δ·R^d). Out-of-ball points are corrected by extrapolating through
//! Chebyshev-node multiples of p, whose interior placement (|cos| < 1) needs
//! no boundary shrink.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chebyshev::cheb_nodes;
use crate::compare::Comparison;
use crate::difference::{alpha_coeffs_f64, char_sum_detailed};
use crate::error::Error;
use crate::logmag::LogMag;
use crate::oracle::{ConcentratedDistribution, FunctionOracle};
use crate::poly::lagrange_eval_f64;
use crate::sampling::sample_centered;
use crate::verdict::{RejectSite, Verdict, Witness};
use crate::Result;

/// How the final |f(p) − g(p)| comparison is thresholded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ThresholdMode {
    /// The certified 2·2^{(2n)^{45d}}·R^d·δ, compared in log2-space.
    Theoretical,
    /// factor·δ·R^d in ordinary floats (default factor 10³).
    Practical { factor: f64 },
}

impl Default for ThresholdMode {
    fn default() -> Self {
        ThresholdMode::Practical { factor: 1e3 }
    }
}

/// Tester parameters; `new` fills the documented defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxTesterConfig {
    pub d: u32,
    pub eps: f64,
    /// Pointwise closeness parameter α ≥ 0.
    pub alpha: f64,
    /// Self-correction ball radius; default (4d)⁻⁶.
    pub r: f64,
    /// Concentration radius R of the sampling distribution.
    pub mass_radius: f64,
    pub n_char: u32,
    pub n_main: u32,
    pub n_inball: u32,
    #[serde(default)]
    pub threshold: ThresholdMode,
    #[serde(default)]
    pub comparison: Comparison,
}

impl ApproxTesterConfig {
    pub fn new(d: u32, eps: f64, alpha: f64, mass_radius: f64) -> Result<ApproxTesterConfig> {
        if d == 0 {
            return Err(Error::InvalidParameter("degree must be >= 1".into()));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter("eps must lie in (0, 1)".into()));
        }
        if alpha < 0.0 || !(mass_radius > 0.0) {
            return Err(Error::InvalidParameter(
                "alpha must be >= 0 and R > 0".into(),
            ));
        }
        let dd = d as f64;
        Ok(ApproxTesterConfig {
            d,
            eps,
            alpha,
            r: (4.0 * dd).powi(-6),
            mass_radius,
            n_char: (crate::exact::C1 * dd * dd).ceil() as u32,
            n_main: (crate::exact::C2 / eps).ceil() as u32,
            n_inball: inball_count(d, eps),
            threshold: ThresholdMode::default(),
            comparison: Comparison::default(),
        })
    }

    /// δ = 2^{d+1}·α, the slack the characterization statistic is allowed.
    pub fn delta(&self) -> f64 {
        (self.d as f64 + 1.0).exp2() * self.alpha
    }

    /// The in-ball disagreement threshold 2^{d+2}·δ.
    pub fn inball_gap(&self) -> f64 {
        (self.d as f64 + 2.0).exp2() * self.delta()
    }

    /// log2 of the theoretical final threshold 2·2^{(2n)^{45d}}·R^d·δ for
    /// dimension `n`: 1 + (2n)^{45d} + d·log2 R + log2 δ. Infinite when the
    /// tower exponent overflows `f64` — every finite statistic then passes.
    pub fn theoretical_threshold_log2(&self, n: usize) -> f64 {
        let tower = (45.0 * self.d as f64 * (2.0 * n as f64).log2()).exp2();
        1.0 + tower + self.d as f64 * self.mass_radius.log2() + self.delta().log2()
    }

    /// The practical final threshold factor·δ·R^d (None in theoretical mode).
    pub fn practical_threshold(&self) -> Option<f64> {
        match self.threshold {
            ThresholdMode::Theoretical => None,
            ThresholdMode::Practical { factor } => {
                Some(factor * self.delta() * self.mass_radius.powi(self.d as i32))
            }
        }
    }

    pub fn char_queries(&self) -> u64 {
        let d = self.d as u64;
        self.n_char as u64 * (d + 1) * (2 * (d + 2) + 1) * (d + 2)
    }

    fn validate(&self) -> Result<()> {
        if self.d == 0 || self.n_char == 0 || self.n_main == 0 || self.n_inball == 0 {
            return Err(Error::InvalidParameter(
                "degree and repetition counts must be >= 1".into(),
            ));
        }
        if !(self.r > 0.0) || self.alpha < 0.0 {
            return Err(Error::InvalidParameter("r must be > 0, alpha >= 0".into()));
        }
        if matches!(self.comparison, Comparison::Exact) {
            return Err(Error::InvalidParameter(
                "the noise-tolerant tester is float-only; use the Tolerant policy".into(),
            ));
        }
        Ok(())
    }
}

/// Least N ≥ 1 with (7d)⁻ᴺ ≤ ε/(4(d+1)).
fn inball_count(d: u32, eps: f64) -> u32 {
    let target = eps / (4.0 * (d as f64 + 1.0));
    let n = (target.recip().ln() / (7.0 * d as f64).ln()).ceil();
    (n as u32).max(1)
}

fn norm(p: &[f64]) -> f64 {
    p.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn fmt_point(p: &[f64]) -> String {
    let coords: Vec<String> = p.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", coords.join(", "))
}

/// A self-corrected value with the term-magnitude scale of its computation.
#[derive(Debug, Clone, Copy)]
pub struct ApproxGValue {
    pub value: f64,
    pub scale: f64,
}

/// Outcome of a thresholded g query.
#[derive(Debug, Clone)]
pub enum ApproxQueryOutcome {
    Value(ApproxGValue),
    Reject { site: RejectSite, witness: Witness },
}

// ---------------------------------------------------------------------------
// Characterization
// ---------------------------------------------------------------------------

/// The exact tester's paired-variance schedule with the zero test widened to
/// |Σ α_i f(p+iq)| > δ.
pub fn approx_characterization_test<R: Rng + ?Sized>(
    f: &FunctionOracle,
    cfg: &ApproxTesterConfig,
    rng: &mut R,
) -> Result<Verdict> {
    cfg.validate()?;
    let n = f.n();
    let d = cfg.d;
    let delta = cfg.delta();
    for _ in 0..cfg.n_char {
        for j in 1..=d + 1 {
            let j2 = (j * j) as f64;
            for t in 0..=d + 1 {
                let t2p1 = (t * t + 1) as f64;
                for pairing in 0..2u8 {
                    let (vp, vq) = if pairing == 0 {
                        (j2 * t2p1, 1.0)
                    } else {
                        (j2, t2p1)
                    };
                    let p = sample_centered(n, vp, rng);
                    let q = sample_centered(n, vq, rng);
                    let (s, scale) = char_sum_detailed(f, &p, &q, d)?;
                    if cfg.comparison.exceeds(s, delta, scale) {
                        return Ok(Verdict::reject(
                            RejectSite::CharTest {
                                j,
                                t: Some(t),
                                pairing,
                            },
                            Witness {
                                sample: format!("p={}, q={}", fmt_point(&p), fmt_point(&q)),
                                statistic: s,
                            },
                            f.queries(),
                        ));
                    }
                }
            }
            let p = sample_centered(n, j2, rng);
            let q = sample_centered(n, j2, rng);
            let (s, scale) = char_sum_detailed(f, &p, &q, d)?;
            if cfg.comparison.exceeds(s, delta, scale) {
                return Ok(Verdict::reject(
                    RejectSite::CharTest {
                        j,
                        t: None,
                        pairing: 2,
                    },
                    Witness {
                        sample: format!("p={}, q={}", fmt_point(&p), fmt_point(&q)),
                        statistic: s,
                    },
                    f.queries(),
                ));
            }
        }
    }
    Ok(Verdict::accept(f.queries()))
}

// ---------------------------------------------------------------------------
// Querying g
// ---------------------------------------------------------------------------

fn g_q(f: &FunctionOracle, p: &[f64], q: &[f64], d: u32) -> Result<(f64, f64)> {
    let alphas = alpha_coeffs_f64(d + 1)?;
    let mut sum = 0.0;
    let mut scale = 0.0;
    for (i, a) in alphas.iter().enumerate().skip(1) {
        let point: Vec<f64> = p
            .iter()
            .zip(q)
            .map(|(pj, qj)| pj + i as f64 * qj)
            .collect();
        let term = a * f.eval(&point);
        sum += term;
        scale += term.abs();
    }
    Ok((sum, scale))
}

/// Self-corrected value inside B(0, r): rejects when two draws of g_q(p)
/// differ by more than 2^{d+2}δ.
pub fn approx_query_g_in_ball<R: Rng + ?Sized>(
    f: &FunctionOracle,
    p: &[f64],
    cfg: &ApproxTesterConfig,
    rng: &mut R,
) -> Result<ApproxQueryOutcome> {
    cfg.validate()?;
    if norm(p) >= cfg.r {
        return Err(Error::InvalidParameter(format!(
            "approx_query_g_in_ball needs ‖p‖ < r = {}, got {}",
            cfg.r,
            norm(p)
        )));
    }
    let gap = cfg.inball_gap();
    let mut first: Option<(f64, f64)> = None;
    for j in 1..=cfg.n_inball {
        let q = sample_centered(f.n(), 1.0, rng);
        let (g, scale) = g_q(f, p, &q, cfg.d)?;
        match first {
            None => first = Some((g, scale)),
            Some((g1, scale1)) => {
                if cfg.comparison.exceeds(g - g1, gap, scale + scale1) {
                    return Ok(ApproxQueryOutcome::Reject {
                        site: RejectSite::InBallGap,
                        witness: Witness {
                            sample: format!("p={}, draw j={j}", fmt_point(p)),
                            statistic: g - g1,
                        },
                    });
                }
            }
        }
    }
    let (value, scale) = first.expect("n_inball >= 1");
    Ok(ApproxQueryOutcome::Value(ApproxGValue { value, scale }))
}

/// Self-corrected value anywhere: outside the ball, g is sampled at the
/// Chebyshev-node multiples c_i·p with c_i = (r/‖p‖)·cos(π(i+1/2)/(d+1)),
/// i = 0..d (symmetric about 0, strictly interior), and the degree-d
/// interpolant through (c_i, g(c_i·p)) is read off at 1.
pub fn approx_query_g<R: Rng + ?Sized>(
    f: &FunctionOracle,
    p: &[f64],
    cfg: &ApproxTesterConfig,
    rng: &mut R,
) -> Result<ApproxQueryOutcome> {
    cfg.validate()?;
    let np = norm(p);
    if np < cfg.r {
        return approx_query_g_in_ball(f, p, cfg, rng);
    }
    let mut nodes: Vec<(f64, f64)> = Vec::with_capacity(cfg.d as usize + 1);
    let mut scale_in = 0.0f64;
    for c_i in cheb_nodes(cfg.d, cfg.r / np) {
        let scaled: Vec<f64> = p.iter().map(|x| c_i * x).collect();
        match approx_query_g_in_ball(f, &scaled, cfg, rng)? {
            ApproxQueryOutcome::Reject { site, witness } => {
                return Ok(ApproxQueryOutcome::Reject { site, witness })
            }
            ApproxQueryOutcome::Value(v) => {
                scale_in = scale_in.max(v.scale);
                nodes.push((c_i, v.value));
            }
        }
    }
    let (value, lagrange_scale) = lagrange_eval_f64(&nodes, 1.0)?;
    Ok(ApproxQueryOutcome::Value(ApproxGValue {
        value,
        scale: lagrange_scale.max(scale_in),
    }))
}

// ---------------------------------------------------------------------------
// Full tester
// ---------------------------------------------------------------------------

/// Outcome of a full run, including how often the sampler fell outside
/// B(0, R): those points are skipped with zero queries, and a run in which
/// every point was skipped is vacuous.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxRunReport {
    pub verdict: Verdict,
    pub sampled: u32,
    pub skipped: u32,
    /// True when the main loop never tested a point (vacuous accept).
    pub degenerate: bool,
}

/// Characterization, then N_main rounds of sampling p ∼ dist, skipping
/// points outside B(0, R) without querying, and rejecting when
/// |f(p) − g(p)| exceeds the configured final threshold.
pub fn approx_low_degree_test<R: Rng + ?Sized>(
    f: &FunctionOracle,
    dist: &ConcentratedDistribution,
    cfg: &ApproxTesterConfig,
    rng: &mut R,
) -> Result<ApproxRunReport> {
    cfg.validate()?;
    let char_verdict = approx_characterization_test(f, cfg, rng)?;
    if !char_verdict.is_accept() {
        return Ok(ApproxRunReport {
            verdict: char_verdict,
            sampled: 0,
            skipped: 0,
            degenerate: false,
        });
    }
    let mut skipped = 0u32;
    let mut tested = 0u32;
    for _ in 0..cfg.n_main {
        let p = dist.sample(rng);
        if norm(&p) > cfg.mass_radius {
            skipped += 1;
            continue;
        }
        tested += 1;
        match approx_query_g(f, &p, cfg, rng)? {
            ApproxQueryOutcome::Reject { site, witness } => {
                return Ok(ApproxRunReport {
                    verdict: Verdict::reject(site, witness, f.queries()),
                    sampled: cfg.n_main,
                    skipped,
                    degenerate: false,
                });
            }
            ApproxQueryOutcome::Value(g) => {
                let fp = f.eval(&p);
                let diff = fp - g.value;
                let fires = match cfg.threshold {
                    ThresholdMode::Practical { .. } => {
                        let tau = cfg.practical_threshold().expect("practical mode");
                        cfg.comparison.exceeds(diff, tau, fp.abs().max(g.scale))
                    }
                    ThresholdMode::Theoretical => {
                        LogMag::from_f64(diff.abs())
                            > LogMag::exp2_of(cfg.theoretical_threshold_log2(f.n()))
                    }
                };
                if fires {
                    return Ok(ApproxRunReport {
                        verdict: Verdict::reject(
                            RejectSite::MainMismatch,
                            Witness {
                                sample: fmt_point(&p),
                                statistic: diff,
                            },
                            f.queries(),
                        ),
                        sampled: cfg.n_main,
                        skipped,
                        degenerate: false,
                    });
                }
            }
        }
    }
    Ok(ApproxRunReport {
        verdict: Verdict::accept(f.queries()),
        sampled: cfg.n_main,
        skipped,
        degenerate: tested == 0,
    })
}
