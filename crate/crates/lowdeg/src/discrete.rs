//! The lattice low-degree tester: one-sided testing of "f restricted to
//! ℒ = (1/B)ℤⁿ is a degree-≤d polynomial", with every arithmetic step exact.
//!
//! The architecture mirrors the continuous exact tester with discrete
//! Gaussians in place of continuous ones: the characterization schedule draws
//! p ∼ 𝒢(jℒ, j·√(t²+1)) (realized by scaling a 𝒢(ℒ, √(t²+1)) draw by j) and
//! q ∼ 𝒢(ℒ, 1); in-ball self-correction draws q ∼ 𝒢(ℒ′, 1) on the finer
//! query lattice ℒ′ = (1/B′)ℤⁿ (B′ a multiple of B); and the out-of-ball
//! branch interpolates through d+1 distinct points of ℒ′ on the segment from
//! the origin to p. All points are exact rationals, all zero tests are literal
//! equalities, and every query is audited for ℒ′ membership before it is
//! issued.
//!
//! The certified parameter regime wants B′ ≥ 16·max{n^{5/2+2d}·d^{2d},
//! B²R²/√n} — astronomically dense even for small (n, d). Desk experiments
//! deliberately run below it, so regime violations warn rather than refuse.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::compare::Comparison;
use crate::difference::alpha_coeffs;
use crate::error::Error;
use crate::oracle::{ConcentratedDistribution, FunctionOracle};
use crate::poly::{lagrange_interpolate, rat_from_f64, rat_int, rat_to_f64, Rat};
use crate::sampling::{DiscreteGaussianSampler, DiscreteGaussianSpec, LatticeSpec};
use crate::verdict::{RejectSite, Verdict, Witness};
use crate::Result;

/// Tester parameters; `new` fills the documented defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteTesterConfig {
    pub d: u32,
    pub eps: f64,
    /// Concentration radius R of the sampling distribution.
    pub mass_radius: f64,
    /// Density of the support lattice ℒ = (1/B)ℤⁿ.
    pub b: u64,
    /// Density of the query lattice ℒ′ = (1/B′)ℤⁿ; must be a multiple of B.
    pub b_prime: u64,
    pub n_char: u32,
    pub n_main: u32,
    pub n_inball: u32,
}

impl DiscreteTesterConfig {
    pub fn new(d: u32, eps: f64, mass_radius: f64, b: u64, b_prime: u64) -> Result<Self> {
        if d == 0 || b == 0 || b_prime == 0 {
            return Err(Error::InvalidParameter(
                "degree and lattice densities must be >= 1".into(),
            ));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter("eps must lie in (0, 1)".into()));
        }
        if !(mass_radius > 0.0) {
            return Err(Error::InvalidParameter("R must be > 0".into()));
        }
        if b_prime % b != 0 {
            return Err(Error::InvalidParameter(
                "B' must be a multiple of B".into(),
            ));
        }
        let dd = d as f64;
        Ok(DiscreteTesterConfig {
            d,
            eps,
            mass_radius,
            b,
            b_prime,
            n_char: (crate::exact::C1 * dd * dd).ceil() as u32,
            n_main: (crate::exact::C2 / eps).ceil() as u32,
            n_inball: inball_count(d, eps),
        })
    }

    /// r² = d²·n/(4B²) as an exact rational (r = d√n/(2B) is irrational;
    /// every ball-membership comparison happens on squared norms).
    pub fn r_squared(&self, n: usize) -> Rat {
        Rat::new(
            BigInt::from(self.d as u64 * self.d as u64 * n as u64),
            BigInt::from(4 * self.b * self.b),
        )
    }

    /// r as a float, for display and for placing interpolation targets.
    pub fn r_f64(&self, n: usize) -> f64 {
        self.d as f64 * (n as f64).sqrt() / (2.0 * self.b as f64)
    }

    /// The certified density floor 16·max{n^{5/2+2d}·d^{2d}, B²R²/√n}; a
    /// B′ below it earns a warning, not a refusal.
    pub fn regime_warnings(&self, n: usize) -> Vec<String> {
        let nn = n as f64;
        let dd = self.d as f64;
        let floor = 16.0
            * (nn.powf(2.5 + 2.0 * dd) * dd.powf(2.0 * dd))
                .max(self.b as f64 * self.b as f64 * self.mass_radius * self.mass_radius
                    / nn.sqrt());
        let mut warnings = Vec::new();
        if (self.b_prime as f64) < floor {
            warnings.push(format!(
                "query lattice density B' = {} is below the certified floor {:.3e}; \
                 soundness guarantees do not apply at these parameters",
                self.b_prime, floor
            ));
        }
        warnings
    }

    pub fn char_queries(&self) -> u64 {
        let d = self.d as u64;
        self.n_char as u64 * (d + 1) * (2 * (d + 2) + 1) * (d + 2)
    }

    pub fn max_total_queries(&self) -> u64 {
        let d = self.d as u64;
        let inball = self.n_inball as u64 * (d + 1);
        self.char_queries() + self.n_main as u64 * (1 + (d + 1) * inball)
    }

    fn validate(&self) -> Result<()> {
        if self.n_char == 0 || self.n_main == 0 || self.n_inball == 0 {
            return Err(Error::InvalidParameter(
                "repetition counts must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Least N ≥ 1 with (4(d+2))⁻ᴺ ≤ ε/(2(d+1)).
fn inball_count(d: u32, eps: f64) -> u32 {
    let target = eps / (2.0 * (d as f64 + 1.0));
    let n = (target.recip().ln() / (4.0 * (d as f64 + 2.0)).ln()).ceil();
    (n as u32).max(1)
}

fn norm2(p: &[Rat]) -> Rat {
    p.iter().map(|x| x * x).sum()
}

fn fmt_point(p: &[Rat]) -> String {
    let coords: Vec<String> = p.iter().map(|x| format!("{:.6}", rat_to_f64(x))).collect();
    format!("({})", coords.join(", "))
}

/// ℒ′ membership audit: B′·x_i must be an integer for every coordinate.
/// Every oracle query in this module passes through here first.
fn audit_membership(x: &[Rat], b_prime: u64) -> Result<()> {
    let bp = rat_int(b_prime as i64);
    for xi in x {
        if !(&bp * xi).is_integer() {
            return Err(Error::InvalidParameter(format!(
                "membership audit failed: {} * {} is not an integer",
                b_prime,
                rat_to_f64(xi)
            )));
        }
    }
    Ok(())
}

fn eval_audited(f: &FunctionOracle, x: &[Rat], b_prime: u64) -> Result<Rat> {
    audit_membership(x, b_prime)?;
    f.eval_exact(x)
}

/// Σ_{i=0}^{d+1} α_i·f(p + i·q), exact, with every query audited.
fn char_sum_audited(
    f: &FunctionOracle,
    p: &[Rat],
    q: &[Rat],
    d: u32,
    b_prime: u64,
) -> Result<Rat> {
    let coeffs = alpha_coeffs(d + 1)?;
    let mut sum = Rat::zero();
    for (i, a) in coeffs.alphas.iter().enumerate() {
        let i_rat = rat_int(i as i64);
        let point: Vec<Rat> = p.iter().zip(q).map(|(pj, qj)| pj + &i_rat * qj).collect();
        sum += Rat::from_integer(a.clone()) * eval_audited(f, &point, b_prime)?;
    }
    Ok(sum)
}

/// g_q(p) = Σ_{i=1}^{d+1} α_i·f(p + i·q), exact and audited.
fn g_q_audited(f: &FunctionOracle, p: &[Rat], q: &[Rat], d: u32, b_prime: u64) -> Result<Rat> {
    let coeffs = alpha_coeffs(d + 1)?;
    let mut sum = Rat::zero();
    for i in 1..=d as usize + 1 {
        let i_rat = rat_int(i as i64);
        let point: Vec<Rat> = p.iter().zip(q).map(|(pj, qj)| pj + &i_rat * qj).collect();
        sum += Rat::from_integer(coeffs.alphas[i].clone()) * eval_audited(f, &point, b_prime)?;
    }
    Ok(sum)
}

// ---------------------------------------------------------------------------
// Characterization
// ---------------------------------------------------------------------------

/// The paired-variance schedule over discrete Gaussians. Draws from 𝒢(jℒ, js)
/// are realized by scaling 𝒢(ℒ, s) draws by the integer j.
pub fn discrete_characterization_test<R: Rng + ?Sized>(
    f: &FunctionOracle,
    cfg: &DiscreteTesterConfig,
    rng: &mut R,
) -> Result<Verdict> {
    cfg.validate()?;
    let n = f.n();
    let d = cfg.d;
    let lattice = LatticeSpec::unit_over(n, rat_int(cfg.b as i64))?;
    // One sampler per width √(t²+1), t = 0..d+1 (the t = 0 table doubles as
    // the unit-width sampler for q and the diagonal test).
    let samplers: Vec<DiscreteGaussianSampler> = (0..=d + 1)
        .map(|t| {
            DiscreteGaussianSampler::new(&DiscreteGaussianSpec {
                lattice: lattice.clone(),
                s: ((t * t + 1) as f64).sqrt(),
            })
        })
        .collect::<Result<_>>()?;
    let scale_by = |v: Vec<Rat>, j: u32| -> Vec<Rat> {
        let j_rat = rat_int(j as i64);
        v.into_iter().map(|x| x * &j_rat).collect()
    };
    for _ in 0..cfg.n_char {
        for j in 1..=d + 1 {
            for t in 0..=d + 1 {
                for pairing in 0..2u8 {
                    // [j²(t²+1) vs 1]: p ∼ 𝒢(jℒ, j√(t²+1)), q ∼ 𝒢(ℒ, 1).
                    // [j² vs t²+1]:    p ∼ 𝒢(jℒ, j),        q ∼ 𝒢(ℒ, √(t²+1)).
                    let (p, q) = if pairing == 0 {
                        (
                            scale_by(samplers[t as usize].sample(rng), j),
                            samplers[0].sample(rng),
                        )
                    } else {
                        (
                            scale_by(samplers[0].sample(rng), j),
                            samplers[t as usize].sample(rng),
                        )
                    };
                    let s = char_sum_audited(f, &p, &q, d, cfg.b_prime)?;
                    if !s.is_zero() {
                        return Ok(Verdict::reject(
                            RejectSite::CharTest {
                                j,
                                t: Some(t),
                                pairing,
                            },
                            Witness {
                                sample: format!("p={}, q={}", fmt_point(&p), fmt_point(&q)),
                                statistic: rat_to_f64(&s),
                            },
                            f.queries(),
                        ));
                    }
                }
            }
            // [j² vs j²]: p, q ∼ 𝒢(jℒ, j).
            let p = scale_by(samplers[0].sample(rng), j);
            let q = scale_by(samplers[0].sample(rng), j);
            let s = char_sum_audited(f, &p, &q, d, cfg.b_prime)?;
            if !s.is_zero() {
                return Ok(Verdict::reject(
                    RejectSite::CharTest {
                        j,
                        t: None,
                        pairing: 2,
                    },
                    Witness {
                        sample: format!("p={}, q={}", fmt_point(&p), fmt_point(&q)),
                        statistic: rat_to_f64(&s),
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

/// Outcome of an exact g query.
#[derive(Debug, Clone)]
pub enum DiscreteQueryOutcome {
    Value(Rat),
    Reject { site: RejectSite, witness: Witness },
}

fn in_ball<R: Rng + ?Sized>(
    f: &FunctionOracle,
    p: &[Rat],
    cfg: &DiscreteTesterConfig,
    fine_sampler: &DiscreteGaussianSampler,
    rng: &mut R,
) -> Result<DiscreteQueryOutcome> {
    let mut first: Option<Rat> = None;
    for j in 1..=cfg.n_inball {
        let q = fine_sampler.sample(rng);
        let g = g_q_audited(f, p, &q, cfg.d, cfg.b_prime)?;
        match &first {
            None => first = Some(g),
            Some(g1) => {
                if g != *g1 {
                    return Ok(DiscreteQueryOutcome::Reject {
                        site: RejectSite::InBallGap,
                        witness: Witness {
                            sample: format!("p={}, draw j={j}", fmt_point(p)),
                            statistic: rat_to_f64(&(&g - g1)),
                        },
                    });
                }
            }
        }
    }
    Ok(DiscreteQueryOutcome::Value(first.expect("n_inball >= 1")))
}

/// The admissible interpolation abscissae: t·p ∈ ℒ′ exactly when t is a
/// multiple of 1/((B′/B)·gcd(B·p)). Returns the step, or an error when p is
/// not on ℒ.
fn admissible_step(p: &[Rat], b: u64, b_prime: u64) -> Result<Rat> {
    let b_rat = rat_int(b as i64);
    let mut g = BigInt::zero();
    for pi in p {
        let scaled = &b_rat * pi;
        if !scaled.is_integer() {
            return Err(Error::InvalidParameter(
                "point is not a member of the support lattice".into(),
            ));
        }
        g = g.gcd(&scaled.to_integer());
    }
    if g.is_zero() {
        return Err(Error::InvalidParameter(
            "cannot build interpolation nodes toward the origin".into(),
        ));
    }
    Ok(Rat::new(
        BigInt::one(),
        BigInt::from(b_prime / b) * g,
    ))
}

/// Self-corrected value at p ∈ ℒ ∩ B(0, R). Inside B(0, r) one in-ball
/// evaluation; outside, the prescribed abscissae i·r/((d+1)‖p‖) are rounded
/// to the nearest distinct admissible multiples of the fine-lattice step,
/// clamped strictly inside the ball, and the degree-d interpolant through the
/// d+1 exact node values is read off at 1.
pub fn discrete_query_g<R: Rng + ?Sized>(
    f: &FunctionOracle,
    p: &[Rat],
    cfg: &DiscreteTesterConfig,
    rng: &mut R,
) -> Result<DiscreteQueryOutcome> {
    cfg.validate()?;
    let n = f.n();
    let fine = LatticeSpec::unit_over(n, rat_int(cfg.b_prime as i64))?;
    let fine_sampler = DiscreteGaussianSampler::new(&DiscreteGaussianSpec {
        lattice: fine,
        s: 1.0,
    })?;
    let r2 = cfg.r_squared(n);
    let p2 = norm2(p);
    if p2 < r2 {
        return in_ball(f, p, cfg, &fine_sampler, rng);
    }
    let d = cfg.d;
    let step = admissible_step(p, cfg.b, cfg.b_prime)?;
    // Largest admissible multiple strictly inside the ball: m²·step²·‖p‖² < r².
    let step2 = &step * &step;
    let m_max_f = (rat_to_f64(&r2) / rat_to_f64(&(&step2 * &p2))).sqrt().ceil() as i64 + 1;
    let mut m_max = m_max_f;
    while m_max > 0 {
        let m_rat = rat_int(m_max);
        if &m_rat * &m_rat * &step2 * &p2 < r2 {
            break;
        }
        m_max -= 1;
    }
    if m_max < (d as i64 + 1) {
        return Err(Error::Config(format!(
            "only {m_max} fine-lattice points fit on the segment toward the ball; \
             need {} — the query lattice is too coarse for this point",
            d + 1
        )));
    }
    // Round the prescribed abscissae to admissible multiples, then repair to
    // distinct values in [1, m_max].
    let np = rat_to_f64(&p2).sqrt();
    let r = cfg.r_f64(n);
    let step_f = rat_to_f64(&step);
    let mut ms: Vec<i64> = (1..=d as i64 + 1)
        .map(|i| {
            let target = i as f64 * r / ((d as f64 + 1.0) * np);
            ((target / step_f).round() as i64).clamp(1, m_max)
        })
        .collect();
    for i in 1..ms.len() {
        if ms[i] <= ms[i - 1] {
            ms[i] = ms[i - 1] + 1;
        }
    }
    if *ms.last().unwrap() > m_max {
        // Push the tail back down while keeping distinctness.
        let mut hi = m_max;
        for m in ms.iter_mut().rev() {
            *m = (*m).min(hi);
            hi = *m - 1;
        }
        if ms[0] < 1 {
            return Err(Error::Config(
                "could not place distinct interpolation nodes inside the ball".into(),
            ));
        }
    }
    let mut nodes: Vec<(Rat, Rat)> = Vec::with_capacity(d as usize + 1);
    for &m in &ms {
        let c = rat_int(m) * &step;
        let scaled: Vec<Rat> = p.iter().map(|x| &c * x).collect();
        debug_assert!(norm2(&scaled) < r2);
        match in_ball(f, &scaled, cfg, &fine_sampler, rng)? {
            DiscreteQueryOutcome::Reject { site, witness } => {
                return Ok(DiscreteQueryOutcome::Reject { site, witness })
            }
            DiscreteQueryOutcome::Value(v) => nodes.push((c, v)),
        }
    }
    let interp = lagrange_interpolate(&nodes)?;
    Ok(DiscreteQueryOutcome::Value(interp.eval_exact(&Rat::one())))
}

// ---------------------------------------------------------------------------
// Full tester
// ---------------------------------------------------------------------------

/// Characterization, then N_main samples from a lattice-supported
/// distribution; points outside B(0, R) are skipped without queries, and
/// f(p) is compared with g(p) by exact equality.
pub fn discrete_low_degree_test<R: Rng + ?Sized>(
    f: &FunctionOracle,
    dist: &ConcentratedDistribution,
    cfg: &DiscreteTesterConfig,
    rng: &mut R,
) -> Result<Verdict> {
    cfg.validate()?;
    if !dist.is_lattice() {
        return Err(Error::InvalidParameter(
            "the discrete tester needs a lattice-supported distribution".into(),
        ));
    }
    let char_verdict = discrete_characterization_test(f, cfg, rng)?;
    if !char_verdict.is_accept() {
        return Ok(char_verdict);
    }
    let r2_mass = {
        let r = rat_from_f64(cfg.mass_radius);
        &r * &r
    };
    let b_rat = rat_int(cfg.b as i64);
    for _ in 0..cfg.n_main {
        let p = dist
            .sample_exact(rng)
            .expect("lattice distribution yields exact samples");
        // Distribution contract: samples must lie on ℒ.
        for pi in &p {
            if !(&b_rat * pi).is_integer() {
                return Err(Error::InvalidParameter(
                    "distribution produced a point off the support lattice".into(),
                ));
            }
        }
        if norm2(&p) > r2_mass {
            continue;
        }
        match discrete_query_g(f, &p, cfg, rng)? {
            DiscreteQueryOutcome::Reject { site, witness } => {
                return Ok(Verdict::reject(site, witness, f.queries()))
            }
            DiscreteQueryOutcome::Value(g) => {
                let fp = eval_audited(f, &p, cfg.b_prime)?;
                if fp != g {
                    return Ok(Verdict::reject(
                        RejectSite::MainMismatch,
                        Witness {
                            sample: fmt_point(&p),
                            statistic: rat_to_f64(&(&fp - &g)),
                        },
                        f.queries(),
                    ));
                }
            }
        }
    }
    Ok(Verdict::accept(f.queries()))
}

/// The comparison policy this module effectively runs under (everything is
/// exact); exposed so reports can state it.
pub fn comparison_policy() -> Comparison {
    Comparison::Exact
}
