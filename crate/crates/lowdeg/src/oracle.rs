//! The function-oracle abstraction all testers consume, plus constructors
//! for the YES/NO instance families the experiments need.
//!
//! An oracle wraps a pure evaluator with a tamper-proof query counter.
//! Function semantics are guaranteed by construction: noisy families derive
//! their noise deterministically from a hash of the (quantized) query point,
//! never from per-query randomness.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::poly::{rat_from_f64, rat_to_f64, MultiPoly, Rat};
use crate::sampling::{self, DiscreteGaussianSampler, DiscreteGaussianSpec, LatticeSpec};
use crate::stats;
use crate::Result;

// ---------------------------------------------------------------------------
// FunctionOracle
// ---------------------------------------------------------------------------

enum Evaluator {
    /// Exact polynomial.
    Poly(MultiPoly),
    /// Polynomial plus deterministic bounded noise ν(x) ∈ [−α, α].
    NoisyPoly {
        poly: MultiPoly,
        alpha: f64,
        seed: u64,
    },
    /// Polynomial plus a jump on the half-space ⟨dir, x⟩ > θ.
    Jump {
        poly: MultiPoly,
        dir: Vec<Rat>,
        dir_f: Vec<f64>,
        theta: Rat,
        theta_f: f64,
        jump: Rat,
        jump_f: f64,
    },
    /// Additive (linear, no constant term) function plus deterministic noise.
    AdditiveNoise {
        coeffs: Vec<f64>,
        alpha: f64,
        seed: u64,
    },
    /// Arbitrary user-supplied float evaluator (no exact path).
    Custom(Box<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

struct OracleInner {
    n: usize,
    label: String,
    counter: AtomicU64,
    eval: Arc<Evaluator>,
}

/// A queryable real-valued function on ℝⁿ with a monotone query counter.
///
/// Cloning shares the counter — a tester and its harness observe the same
/// query total. Repeated queries at the identical point return the identical
/// value for every built-in family.
#[derive(Clone)]
pub struct FunctionOracle {
    inner: Arc<OracleInner>,
}

impl std::fmt::Debug for FunctionOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FunctionOracle")
            .field("n", &self.inner.n)
            .field("label", &self.inner.label)
            .field("queries", &self.queries())
            .finish()
    }
}

/// Deterministic noise: quantize the point at 2⁻⁴⁰ resolution, hash it with
/// the seed, map the digest uniformly to [−α, α].
fn hash_noise(seed: u64, x: &[f64], alpha: f64) -> f64 {
    if alpha == 0.0 {
        return 0.0;
    }
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    for &xi in x {
        let q = (xi * (1u64 << 40) as f64).round() as i64;
        h.update(q.to_le_bytes());
    }
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    let u = u64::from_le_bytes(bytes) as f64 / u64::MAX as f64;
    (2.0 * u - 1.0) * alpha
}

impl FunctionOracle {
    fn new(n: usize, label: impl Into<String>, eval: Evaluator) -> FunctionOracle {
        FunctionOracle {
            inner: Arc::new(OracleInner {
                n,
                label: label.into(),
                counter: AtomicU64::new(0),
                eval: Arc::new(eval),
            }),
        }
    }

    /// Exact evaluation of a polynomial (YES instance for degree ≥ its total
    /// degree).
    pub fn poly_oracle(p: MultiPoly) -> FunctionOracle {
        let n = p.n();
        FunctionOracle::new(n, "poly", Evaluator::Poly(p))
    }

    /// Polynomial plus deterministic point-hash noise bounded by `alpha`.
    pub fn noisy_poly_oracle(p: MultiPoly, alpha: f64, seed: u64) -> Result<FunctionOracle> {
        if alpha < 0.0 {
            return Err(Error::InvalidParameter("alpha must be >= 0".into()));
        }
        let n = p.n();
        Ok(FunctionOracle::new(
            n,
            format!("noisy_poly(alpha={alpha})"),
            Evaluator::NoisyPoly {
                poly: p,
                alpha,
                seed,
            },
        ))
    }

    /// Additive function ⟨c, x⟩ plus deterministic noise bounded by `alpha`.
    pub fn additive_plus_noise_oracle(c: Vec<f64>, alpha: f64, seed: u64) -> Result<FunctionOracle> {
        if alpha < 0.0 {
            return Err(Error::InvalidParameter("alpha must be >= 0".into()));
        }
        let n = c.len();
        Ok(FunctionOracle::new(
            n,
            format!("additive_noise(alpha={alpha})"),
            Evaluator::AdditiveNoise {
                coeffs: c,
                alpha,
                seed,
            },
        ))
    }

    /// Arbitrary float evaluator; callers are responsible for function
    /// semantics and boundedness.
    pub fn custom(
        n: usize,
        label: impl Into<String>,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> FunctionOracle {
        FunctionOracle::new(n, label, Evaluator::Custom(Box::new(f)))
    }

    /// A new oracle over the same function whose query counter starts at
    /// zero and is not shared with `self`; the harness meters each run with
    /// one of these.
    pub fn detached(&self) -> FunctionOracle {
        FunctionOracle {
            inner: Arc::new(OracleInner {
                n: self.inner.n,
                label: self.inner.label.clone(),
                counter: AtomicU64::new(0),
                eval: Arc::clone(&self.inner.eval),
            }),
        }
    }

    /// Dimension of the domain.
    pub fn n(&self) -> usize {
        self.inner.n
    }

    /// Provenance label.
    pub fn label(&self) -> &str {
        &self.inner.label
    }

    /// Total queries so far (float and exact combined).
    pub fn queries(&self) -> u64 {
        self.inner.counter.load(Ordering::Relaxed)
    }

    /// Floating-point query. Increments the counter by exactly one.
    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.inner.n, "query dimension mismatch");
        self.inner.counter.fetch_add(1, Ordering::Relaxed);
        match &*self.inner.eval {
            Evaluator::Poly(p) => p.eval_f64(x),
            Evaluator::NoisyPoly { poly, alpha, seed } => {
                poly.eval_f64(x) + hash_noise(*seed, x, *alpha)
            }
            Evaluator::Jump {
                poly,
                dir_f,
                theta_f,
                jump_f,
                ..
            } => {
                let proj: f64 = x.iter().zip(dir_f).map(|(a, b)| a * b).sum();
                poly.eval_f64(x) + if proj > *theta_f { *jump_f } else { 0.0 }
            }
            Evaluator::AdditiveNoise { coeffs, alpha, seed } => {
                let lin: f64 = x.iter().zip(coeffs).map(|(a, b)| a * b).sum();
                lin + hash_noise(*seed, x, *alpha)
            }
            Evaluator::Custom(f) => f(x),
        }
    }

    /// Whether the oracle supports exact rational queries.
    pub fn supports_exact(&self) -> bool {
        matches!(
            *self.inner.eval,
            Evaluator::Poly(_) | Evaluator::Jump { .. }
        )
    }

    /// Exact rational query. Increments the counter by exactly one.
    /// Available for the polynomial and jump families (the ones the exact and
    /// discrete testers run on).
    pub fn eval_exact(&self, x: &[Rat]) -> Result<Rat> {
        assert_eq!(x.len(), self.inner.n, "query dimension mismatch");
        match &*self.inner.eval {
            Evaluator::Poly(p) => {
                self.inner.counter.fetch_add(1, Ordering::Relaxed);
                Ok(p.eval_exact(x))
            }
            Evaluator::Jump {
                poly,
                dir,
                theta,
                jump,
                ..
            } => {
                self.inner.counter.fetch_add(1, Ordering::Relaxed);
                let proj: Rat = x.iter().zip(dir).map(|(a, b)| a * b).sum();
                let mut v = poly.eval_exact(x);
                if proj > *theta {
                    v += jump.clone();
                }
                Ok(v)
            }
            _ => Err(Error::ExactUnavailable(format!(
                "oracle family '{}' has no exact rational path",
                self.inner.label
            ))),
        }
    }
}

// ---------------------------------------------------------------------------
// Concentrated distributions
// ---------------------------------------------------------------------------

/// Serializable description of the sampling distribution 𝒟.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DistSpec {
    /// Centered isotropic Gaussian N(0, σ²I).
    Gaussian { n: usize, sigma: f64 },
    /// Uniform on the solid ball of the given radius.
    Ball { n: usize, radius: f64 },
    /// Discrete Gaussian 𝒢((1/B)ℤⁿ, s) (exact lattice support).
    LatticeGaussian { n: usize, b: u64, s: f64 },
}

impl DistSpec {
    pub fn n(&self) -> usize {
        match self {
            DistSpec::Gaussian { n, .. } => *n,
            DistSpec::Ball { n, .. } => *n,
            DistSpec::LatticeGaussian { n, .. } => *n,
        }
    }
}

/// An (ε̄, R)-concentrated distribution: Pr[‖x‖₂ ≤ R] ≥ 1 − ε̄, verified
/// empirically at construction.
#[derive(Debug, Clone)]
pub struct ConcentratedDistribution {
    spec: DistSpec,
    mass_radius: f64,
    mass_deficit: f64,
    /// Cached sampler table for the lattice family.
    lattice_sampler: Option<DiscreteGaussianSampler>,
    /// Wilson lower bound on the in-ball mass measured at construction.
    pub verified_mass_lower: f64,
}

impl ConcentratedDistribution {
    /// Build and empirically verify concentration with 10⁵ samples and a
    /// 3-sigma Wilson lower bound on Pr[‖x‖ ≤ R].
    pub fn new(
        spec: DistSpec,
        mass_radius: f64,
        mass_deficit: f64,
        verify_seed: u64,
    ) -> Result<ConcentratedDistribution> {
        if mass_radius <= 0.0 || !(0.0..=1.0).contains(&mass_deficit) {
            return Err(Error::InvalidParameter(
                "need R > 0 and mass deficit in [0,1]".into(),
            ));
        }
        let lattice_sampler = match &spec {
            DistSpec::LatticeGaussian { n, b, s } => {
                let lattice = LatticeSpec::unit_over(*n, crate::poly::rat_int(*b as i64))?;
                Some(DiscreteGaussianSampler::new(&DiscreteGaussianSpec {
                    lattice,
                    s: *s,
                })?)
            }
            _ => None,
        };
        let mut dist = ConcentratedDistribution {
            spec,
            mass_radius,
            mass_deficit,
            lattice_sampler,
            verified_mass_lower: 0.0,
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(verify_seed);
        use rand::SeedableRng;
        let trials = 100_000u64;
        let mut inside = 0u64;
        for _ in 0..trials {
            let x = dist.sample(&mut rng);
            let norm2: f64 = x.iter().map(|v| v * v).sum();
            if norm2.sqrt() <= mass_radius {
                inside += 1;
            }
        }
        let (lo, _) = stats::wilson_interval(inside, trials, 3.0);
        dist.verified_mass_lower = lo;
        if lo < 1.0 - mass_deficit {
            return Err(Error::InvalidParameter(format!(
                "distribution is not ({mass_deficit}, {mass_radius})-concentrated: \
                 verified in-ball mass lower bound {lo}"
            )));
        }
        Ok(dist)
    }

    pub fn spec(&self) -> &DistSpec {
        &self.spec
    }

    /// Concentration radius R.
    pub fn mass_radius(&self) -> f64 {
        self.mass_radius
    }

    /// Allowed out-of-ball mass ε̄.
    pub fn mass_deficit(&self) -> f64 {
        self.mass_deficit
    }

    /// Draw one point as floats.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match &self.spec {
            DistSpec::Gaussian { n, sigma } => {
                sampling::sample_centered(*n, sigma * sigma, rng)
            }
            DistSpec::Ball { n, radius } => loop {
                let x: Vec<f64> = (0..*n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
                    return x.into_iter().map(|v| v * radius).collect();
                }
            },
            DistSpec::LatticeGaussian { .. } => self
                .sample_exact(rng)
                .expect("lattice family")
                .iter()
                .map(rat_to_f64)
                .collect(),
        }
    }

    /// Draw one point with exact lattice coordinates (lattice family only).
    pub fn sample_exact<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Vec<Rat>> {
        self.lattice_sampler.as_ref().map(|s| s.sample(rng))
    }

    /// Whether samples are exact lattice points.
    pub fn is_lattice(&self) -> bool {
        self.lattice_sampler.is_some()
    }
}

// ---------------------------------------------------------------------------
// Far (NO) instances
// ---------------------------------------------------------------------------

/// Construction report for a far instance: the achieved indicator-region
/// mass and the empirical distance certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FarInstanceReport {
    /// Monte-Carlo estimate of the jump region's mass under the distribution.
    pub region_mass: f64,
    /// The threshold θ the quantile search selected.
    pub theta: f64,
    /// ε the construction targeted.
    pub eps: f64,
}

/// NO instance: f = p + jump·1[x₁ > θ], with θ chosen by empirical quantile
/// so the jump region has distribution mass in [2ε, min(4ε, 0.5)].
///
/// The jump direction is the first coordinate axis, which keeps the exact
/// rational path available (the indicator is a rational comparison). The
/// farness itself is certified empirically by the harness, not by proof.
pub fn far_oracle(
    p: MultiPoly,
    dist: &ConcentratedDistribution,
    eps: f64,
    jump: Rat,
    seed: u64,
) -> Result<(FunctionOracle, FarInstanceReport)> {
    if jump.is_negative() || jump.is_zero() {
        return Err(Error::InvalidParameter("jump must be > 0".into()));
    }
    if !(0.0 < eps && eps < 0.5) {
        return Err(Error::InvalidParameter("eps must be in (0, 0.5)".into()));
    }
    let n = p.n();
    if n != dist.spec().n() {
        return Err(Error::InvalidParameter("dimension mismatch".into()));
    }
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let trials = 100_000usize;
    let mut projections: Vec<f64> = (0..trials).map(|_| dist.sample(&mut rng)[0]).collect();
    // Target mass 3ε (inside the mandated [2ε, min(4ε, 0.5)] window).
    let target = (3.0 * eps).min(0.45);
    let theta_f = stats::quantile(&mut projections, 1.0 - target);
    let achieved = projections.iter().filter(|&&v| v > theta_f).count() as f64 / trials as f64;
    if !(2.0 * eps..=(4.0 * eps).min(0.5)).contains(&achieved) {
        return Err(Error::Degenerate(format!(
            "quantile search achieved region mass {achieved}, outside [2ε, min(4ε, 0.5)] \
             for ε = {eps} (degenerate distribution?)"
        )));
    }
    let mut dir = vec![Rat::zero(); n];
    dir[0] = crate::poly::rat_int(1);
    let theta = rat_from_f64(theta_f);
    let report = FarInstanceReport {
        region_mass: achieved,
        theta: theta_f,
        eps,
    };
    let jump_f = rat_to_f64(&jump);
    let oracle = FunctionOracle::new(
        n,
        format!("far(jump={jump_f},theta={theta_f:.4})"),
        Evaluator::Jump {
            poly: p,
            dir_f: dir.iter().map(rat_to_f64).collect(),
            dir,
            theta_f,
            theta,
            jump_f,
            jump,
        },
    );
    Ok((oracle, report))
}

/// Quantize a far oracle's threshold onto a lattice-friendly rational: used
/// by discrete-tester experiments, where the polynomial, jump, and θ must
/// all be exact rationals with modest denominators.
pub fn far_oracle_on_lattice(
    p: MultiPoly,
    dist: &ConcentratedDistribution,
    eps: f64,
    jump: Rat,
    b: u64,
    seed: u64,
) -> Result<(FunctionOracle, FarInstanceReport)> {
    let (oracle, mut report) = far_oracle(p.clone(), dist, eps, jump.clone(), seed)?;
    // Snap θ to the lattice step grid so the indicator is decided by exact
    // comparisons between lattice rationals. Mass shifts by at most the mass
    // of one lattice column; re-measure and re-verify the window.
    let step = 1.0 / b as f64;
    let theta_snapped = (report.theta / step).floor() * step + step / 2.0;
    let n = p.n();
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    let trials = 100_000usize;
    let achieved = (0..trials)
        .filter(|_| dist.sample(&mut rng)[0] > theta_snapped)
        .count() as f64
        / trials as f64;
    if !(2.0 * eps..=(4.0 * eps).min(0.5)).contains(&achieved) {
        return Err(Error::Degenerate(format!(
            "lattice-snapped region mass {achieved} left the [2ε, 4ε] window"
        )));
    }
    report.theta = theta_snapped;
    report.region_mass = achieved;
    let mut dir = vec![Rat::zero(); n];
    dir[0] = crate::poly::rat_int(1);
    let theta = rat_from_f64(theta_snapped);
    let jump_f = rat_to_f64(&jump);
    drop(oracle);
    let oracle = FunctionOracle::new(
        n,
        format!("far_lattice(jump={jump_f},theta={theta_snapped:.4})"),
        Evaluator::Jump {
            poly: p,
            dir_f: dir.iter().map(rat_to_f64).collect(),
            dir,
            theta_f: theta_snapped,
            theta,
            jump_f,
            jump,
        },
    );
    Ok((oracle, report))
}
