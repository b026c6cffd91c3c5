//! The exact low-degree tester: a one-sided, distribution-free tester for
//! "f is a degree-≤d polynomial" given query access to f: ℝⁿ → ℝ and sample
//! access to an arbitrary distribution.
//!
//! Pipeline: a characterization test hammers the finite-difference statistic
//! Σ α_i f(p+iq) at a schedule of paired Gaussian variances, then a main loop
//! compares f against its self-corrected version g at sampled points. g is
//! evaluated through in-ball difference queries and, outside the small ball
//! B(0, r), by interpolating a degree-d restriction through d+1 collinear
//! in-ball points.
//!
//! Two arithmetic modes, selected by the comparison policy:
//! `Comparison::Exact` runs the whole g pipeline over rationals (every `f64`
//! sample is a dyadic rational, so conversion is lossless) and realizes the
//! paper-style "reject iff ≠ 0" literally; the tolerant mode stays in floats
//! and scales its zero-tests with the magnitude of the summed terms, which
//! matters because extrapolation from radius r to radius 1 amplifies node
//! error by roughly r^{−d}.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::compare::Comparison;
use crate::difference::{alpha_coeffs, alpha_coeffs_f64, char_sum_detailed};
use crate::error::Error;
use crate::oracle::{ConcentratedDistribution, FunctionOracle};
use crate::poly::{
    lagrange_eval_f64, lagrange_interpolate, rat_from_f64, rat_point, rat_to_f64, Rat,
};
use crate::sampling::sample_centered;
use crate::verdict::{RejectSite, Verdict, Witness};
use crate::Result;
use num_traits::{One, Signed, Zero};

/// Distinguished out-of-ball nodes are pulled strictly inside the open ball:
/// the largest node radius i·r/(d+1) at i = d+1 touches ∂B(0, r) exactly.
pub const BOUNDARY_SHRINK: f64 = 1.0 - 1.0 / (1u64 << 20) as f64;

/// Repetition constants. C₁ repeats the characterization schedule often
/// enough to catch any sub-test failing with probability above (30d)⁻²;
/// C₂ drives the main loop's (1 − ε/2)^N acceptance bound below 1/3;
/// N_inball is sized so the in-ball misreport probability (7d)^{−N} is at
/// most ε/(4d).
pub const C1: f64 = 900.0;
pub const C2: f64 = 48.0;

/// Tester parameters. `new` fills the documented defaults; every field may
/// be overridden afterwards (the experiment harness does so to fit desk-scale
/// budgets — the statistical content is monotone in the counts).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactTesterConfig {
    /// Degree bound d ≥ 1.
    pub d: u32,
    /// Farness parameter ε ∈ (0, 1).
    pub eps: f64,
    /// Self-correction ball radius; default (3d)⁻⁶.
    pub r: f64,
    /// Outer repetitions of the characterization schedule; default ⌈C₁·d²⌉.
    pub n_char: u32,
    /// Main-loop samples; default ⌈C₂/ε⌉.
    pub n_main: u32,
    /// In-ball agreement draws; default the least N with (7d)⁻ᴺ ≤ ε/(4d).
    pub n_inball: u32,
    /// Equality semantics (rational pipeline vs scale-aware floats).
    #[serde(default)]
    pub comparison: Comparison,
}

impl ExactTesterConfig {
    pub fn new(d: u32, eps: f64) -> Result<ExactTesterConfig> {
        if d == 0 {
            return Err(Error::InvalidParameter("degree must be >= 1".into()));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter("eps must lie in (0, 1)".into()));
        }
        let dd = d as f64;
        Ok(ExactTesterConfig {
            d,
            eps,
            r: (3.0 * dd).powi(-6),
            n_char: (C1 * dd * dd).ceil() as u32,
            n_main: (C2 / eps).ceil() as u32,
            n_inball: inball_count(d, eps),
            comparison: Comparison::default(),
        })
    }

    /// Oracle queries one characterization invocation makes:
    /// N_char·(d+1)·(2(d+2)+1)·(d+2).
    pub fn char_queries(&self) -> u64 {
        let d = self.d as u64;
        self.n_char as u64 * (d + 1) * (2 * (d + 2) + 1) * (d + 2)
    }

    /// Oracle queries one in-ball g evaluation makes: N_inball·(d+1).
    pub fn inball_queries(&self) -> u64 {
        self.n_inball as u64 * (self.d as u64 + 1)
    }

    /// Worst-case queries of one g evaluation (out-of-ball branch).
    pub fn query_g_max_queries(&self) -> u64 {
        (self.d as u64 + 1) * self.inball_queries()
    }

    /// Worst-case total queries of one full tester run.
    pub fn max_total_queries(&self) -> u64 {
        self.char_queries() + self.n_main as u64 * (1 + self.query_g_max_queries())
    }

    fn validate(&self) -> Result<()> {
        if self.d == 0 || self.n_char == 0 || self.n_main == 0 || self.n_inball == 0 {
            return Err(Error::InvalidParameter(
                "degree and repetition counts must be >= 1".into(),
            ));
        }
        if !(self.r > 0.0) {
            return Err(Error::InvalidParameter("r must be > 0".into()));
        }
        Ok(())
    }
}

/// Least N ≥ 1 with (7d)⁻ᴺ ≤ ε/(4d).
fn inball_count(d: u32, eps: f64) -> u32 {
    let target = eps / (4.0 * d as f64);
    let base = 7.0 * d as f64;
    let n = (target.recip().ln() / base.ln()).ceil();
    (n as u32).max(1)
}

// ---------------------------------------------------------------------------
// Values flowing out of the g pipeline
// ---------------------------------------------------------------------------

/// A self-corrected value g(p), with its exact form when the rational
/// pipeline produced it and the term magnitude downstream equality checks
/// must scale against.
#[derive(Debug, Clone)]
pub struct GValue {
    pub value: f64,
    pub exact: Option<Rat>,
    pub scale: f64,
}

/// Outcome of a g query: a value, or a rejection to propagate.
#[derive(Debug, Clone)]
pub enum QueryOutcome {
    Value(GValue),
    Reject { site: RejectSite, witness: Witness },
}

fn norm(p: &[f64]) -> f64 {
    p.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn fmt_point(p: &[f64]) -> String {
    let coords: Vec<String> = p.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", coords.join(", "))
}

// ---------------------------------------------------------------------------
// Characterization test
// ---------------------------------------------------------------------------

/// The paired-variance characterization schedule. Each of `n_char` outer
/// repetitions runs, for every j ∈ {1..d+1}: for every t ∈ {0..d+1} a
/// [p ∼ N(0, j²(t²+1)·I), q ∼ N(0, I)] test and a [p ∼ N(0, j²·I),
/// q ∼ N(0, (t²+1)·I)] test, then a single [j², j²] test. A test fires when
/// the difference statistic Σ α_i f(p+iq) is nonzero under the policy.
pub fn characterization_test<R: Rng + ?Sized>(
    f: &FunctionOracle,
    cfg: &ExactTesterConfig,
    rng: &mut R,
) -> Result<Verdict> {
    cfg.validate()?;
    let n = f.n();
    let d = cfg.d;
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
                    if let Some(w) = char_check(f, &p, &q, d, &cfg.comparison)? {
                        return Ok(Verdict::reject(
                            RejectSite::CharTest {
                                j,
                                t: Some(t),
                                pairing,
                            },
                            w,
                            f.queries(),
                        ));
                    }
                }
            }
            let p = sample_centered(n, j2, rng);
            let q = sample_centered(n, j2, rng);
            if let Some(w) = char_check(f, &p, &q, d, &cfg.comparison)? {
                return Ok(Verdict::reject(
                    RejectSite::CharTest {
                        j,
                        t: None,
                        pairing: 2,
                    },
                    w,
                    f.queries(),
                ));
            }
        }
    }
    Ok(Verdict::accept(f.queries()))
}

/// One statistic evaluation; `Some(witness)` when it is judged nonzero.
fn char_check(
    f: &FunctionOracle,
    p: &[f64],
    q: &[f64],
    d: u32,
    cmp: &Comparison,
) -> Result<Option<Witness>> {
    match cmp {
        Comparison::Exact => {
            let s = crate::difference::char_sum_exact(f, &rat_point(p), &rat_point(q), d)?;
            if s.is_zero() {
                Ok(None)
            } else {
                Ok(Some(Witness {
                    sample: format!("p={}, q={}", fmt_point(p), fmt_point(q)),
                    statistic: rat_to_f64(&s),
                }))
            }
        }
        Comparison::Tolerant { .. } => {
            let (s, scale) = char_sum_detailed(f, p, q, d)?;
            if cmp.is_zero(s, scale) {
                Ok(None)
            } else {
                Ok(Some(Witness {
                    sample: format!("p={}, q={}", fmt_point(p), fmt_point(q)),
                    statistic: s,
                }))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Querying g
// ---------------------------------------------------------------------------

/// g_q(p) = Σ_{i=1}^{d+1} α_i·f(p + i·q) in floats, with the term-magnitude
/// scale.
fn g_q_float(f: &FunctionOracle, p: &[f64], q: &[f64], d: u32) -> Result<(f64, f64)> {
    let alphas = alpha_coeffs_f64(d + 1)?;
    let mut sum = 0.0;
    let mut scale = 0.0;
    for i in 1..=d as usize + 1 {
        let point: Vec<f64> = p
            .iter()
            .zip(q)
            .map(|(pj, qj)| pj + i as f64 * qj)
            .collect();
        let term = alphas[i] * f.eval(&point);
        sum += term;
        scale += term.abs();
    }
    Ok((sum, scale))
}

/// The rational twin of [`g_q_float`].
fn g_q_exact(f: &FunctionOracle, p: &[Rat], q: &[Rat], d: u32) -> Result<Rat> {
    let coeffs = alpha_coeffs(d + 1)?;
    let mut sum = Rat::zero();
    for i in 1..=d as usize + 1 {
        let i_rat = crate::poly::rat_int(i as i64);
        let point: Vec<Rat> = p
            .iter()
            .zip(q)
            .map(|(pj, qj)| pj + &i_rat * qj)
            .collect();
        sum += Rat::from_integer(coeffs.alphas[i].clone()) * f.eval_exact(&point)?;
    }
    Ok(sum)
}

/// Rational in-ball pipeline on an exactly-specified point (the out-of-ball
/// branch forms c_i·p as a true rational product — rounding the scaled point
/// to `f64` first would break the interpolation identity).
fn in_ball_exact<R: Rng + ?Sized>(
    f: &FunctionOracle,
    p_rat: &[Rat],
    cfg: &ExactTesterConfig,
    rng: &mut R,
) -> Result<QueryOutcome> {
    if !f.supports_exact() {
        return Err(Error::ExactUnavailable(
            "rational pipeline requires an exact-capable oracle".into(),
        ));
    }
    let p_show: Vec<f64> = p_rat.iter().map(rat_to_f64).collect();
    let mut first: Option<Rat> = None;
    for j in 1..=cfg.n_inball {
        let q = sample_centered(f.n(), 1.0, rng);
        let g = g_q_exact(f, p_rat, &rat_point(&q), cfg.d)?;
        match &first {
            None => first = Some(g),
            Some(g1) => {
                if g != *g1 {
                    return Ok(QueryOutcome::Reject {
                        site: RejectSite::InBallGap,
                        witness: Witness {
                            sample: format!("p={}, draw j={j}", fmt_point(&p_show)),
                            statistic: rat_to_f64(&(&g - g1)),
                        },
                    });
                }
            }
        }
    }
    let g1 = first.expect("n_inball >= 1");
    Ok(QueryOutcome::Value(GValue {
        value: rat_to_f64(&g1),
        scale: rat_to_f64(&g1).abs(),
        exact: Some(g1),
    }))
}

/// Self-corrected value at a point strictly inside B(0, r): draws
/// q₁..q_{N_inball} ∼ N(0, I), rejects when any g_{q_j}(p) disagrees with
/// g_{q₁}(p), otherwise reports g_{q₁}(p).
pub fn query_g_in_ball<R: Rng + ?Sized>(
    f: &FunctionOracle,
    p: &[f64],
    cfg: &ExactTesterConfig,
    rng: &mut R,
) -> Result<QueryOutcome> {
    cfg.validate()?;
    if norm(p) >= cfg.r {
        return Err(Error::InvalidParameter(format!(
            "query_g_in_ball needs ‖p‖ < r = {}, got {}",
            cfg.r,
            norm(p)
        )));
    }
    match cfg.comparison {
        Comparison::Exact => in_ball_exact(f, &rat_point(p), cfg, rng),
        Comparison::Tolerant { .. } => {
            let mut first: Option<(f64, f64)> = None;
            for j in 1..=cfg.n_inball {
                let q = sample_centered(f.n(), 1.0, rng);
                let (g, scale) = g_q_float(f, p, &q, cfg.d)?;
                match first {
                    None => first = Some((g, scale)),
                    Some((g1, scale1)) => {
                        if !cfg.comparison.is_zero(g - g1, scale + scale1) {
                            return Ok(QueryOutcome::Reject {
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
            let (g1, scale1) = first.expect("n_inball >= 1");
            Ok(QueryOutcome::Value(GValue {
                value: g1,
                exact: None,
                scale: scale1,
            }))
        }
    }
}

/// Self-corrected value at an arbitrary point. Inside B(0, r) this delegates
/// to [`query_g_in_ball`]; outside, g is evaluated at the d+1 collinear
/// points c_i·p with c_i = i·r/((d+1)·‖p‖) (shrunk by [`BOUNDARY_SHRINK`] to
/// stay strictly interior) and the unique degree-d univariate interpolant
/// through (c_i, g(c_i·p)) is read off at 1.
pub fn query_g<R: Rng + ?Sized>(
    f: &FunctionOracle,
    p: &[f64],
    cfg: &ExactTesterConfig,
    rng: &mut R,
) -> Result<QueryOutcome> {
    cfg.validate()?;
    let np = norm(p);
    if np < cfg.r {
        return query_g_in_ball(f, p, cfg, rng);
    }
    if np == 0.0 {
        return Err(Error::InvalidParameter(
            "zero point cannot lie outside the ball".into(),
        ));
    }
    let d = cfg.d;
    let mut nodes_f: Vec<(f64, f64)> = Vec::with_capacity(d as usize + 1);
    let mut nodes_r: Vec<(Rat, Rat)> = Vec::with_capacity(d as usize + 1);
    let exact = matches!(cfg.comparison, Comparison::Exact);
    let p_rat = if exact { Some(rat_point(p)) } else { None };
    let mut scale_in = 0.0f64;
    for i in 1..=d + 1 {
        // The f64 image of c_i is itself an exact rational scalar, adopted
        // verbatim by the rational pipeline; the products c_i·p, however,
        // must be formed exactly there — rounding them would interpolate
        // through subtly wrong points.
        let c_i = BOUNDARY_SHRINK * i as f64 * cfg.r / ((d as f64 + 1.0) * np);
        let outcome = if let Some(p_rat) = &p_rat {
            let c_rat = rat_from_f64(c_i);
            let scaled: Vec<Rat> = p_rat.iter().map(|x| &c_rat * x).collect();
            in_ball_exact(f, &scaled, cfg, rng)?
        } else {
            let scaled: Vec<f64> = p.iter().map(|x| c_i * x).collect();
            query_g_in_ball(f, &scaled, cfg, rng)?
        };
        match outcome {
            QueryOutcome::Reject { site, witness } => {
                return Ok(QueryOutcome::Reject { site, witness })
            }
            QueryOutcome::Value(v) => {
                scale_in = scale_in.max(v.scale);
                if exact {
                    nodes_r.push((rat_from_f64(c_i), v.exact.expect("exact pipeline")));
                } else {
                    nodes_f.push((c_i, v.value));
                }
            }
        }
    }
    if exact {
        let interp = lagrange_interpolate(&nodes_r)?;
        let at_one = interp.eval_exact(&Rat::one());
        Ok(QueryOutcome::Value(GValue {
            value: rat_to_f64(&at_one),
            scale: rat_to_f64(&at_one.abs()),
            exact: Some(at_one),
        }))
    } else {
        let (value, lagrange_scale) = lagrange_eval_f64(&nodes_f, 1.0)?;
        // The extrapolation weights amplify in-ball noise; the reported
        // scale carries both the weight mass and the node-level term scale.
        let weight_mass = lagrange_scale.max(1.0);
        Ok(QueryOutcome::Value(GValue {
            value,
            exact: None,
            scale: lagrange_scale.max(weight_mass / nodes_f.len() as f64 * scale_in),
        }))
    }
}

// ---------------------------------------------------------------------------
// Full tester
// ---------------------------------------------------------------------------

/// The complete tester: characterization, then N_main rounds of sampling
/// p ∼ dist and rejecting when f(p) disagrees with the self-corrected g(p).
pub fn low_degree_test<R: Rng + ?Sized>(
    f: &FunctionOracle,
    dist: &ConcentratedDistribution,
    cfg: &ExactTesterConfig,
    rng: &mut R,
) -> Result<Verdict> {
    cfg.validate()?;
    let char_verdict = characterization_test(f, cfg, rng)?;
    if !char_verdict.is_accept() {
        return Ok(char_verdict);
    }
    for _ in 0..cfg.n_main {
        let p = dist.sample(rng);
        match query_g(f, &p, cfg, rng)? {
            QueryOutcome::Reject { site, witness } => {
                return Ok(Verdict::reject(site, witness, f.queries()))
            }
            QueryOutcome::Value(g) => {
                let mismatch = match (&cfg.comparison, &g.exact) {
                    (Comparison::Exact, Some(g_exact)) => {
                        f.eval_exact(&rat_point(&p))? != *g_exact
                    }
                    _ => {
                        let fp = f.eval(&p);
                        !cfg.comparison
                            .is_zero(fp - g.value, fp.abs().max(g.scale))
                    }
                };
                if mismatch {
                    let fp = f.eval(&p); // display only; not part of the audit trail
                    return Ok(Verdict::reject(
                        RejectSite::MainMismatch,
                        Witness {
                            sample: fmt_point(&p),
                            statistic: fp - g.value,
                        },
                        f.queries(),
                    ));
                }
            }
        }
    }
    Ok(Verdict::accept(f.queries()))
}
