//! Continuous isotropic Gaussians, scaled integer lattices, exact discrete
//! Gaussian samplers, and the closed-form total-variation / smoothing bounds
//! the testers' analyses rely on.
//!
//! Only lattices of the form t·(1/B)ℤⁿ are supported — every lattice the
//! testers need is of this shape. The 1-D discrete sampler is a table-based
//! inverse CDF with tail truncation below 2⁻¹⁰⁰, rebuilt per (step, width)
//! and cacheable by the caller.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::poly::{rat_int, Rat};
use crate::Result;

// ---------------------------------------------------------------------------
// Continuous Gaussians
// ---------------------------------------------------------------------------

/// Isotropic Gaussian N(mean, σ²·I).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSpec {
    pub n: usize,
    pub mean: Vec<f64>,
    /// σ² (the common variance of every coordinate).
    pub variance_scale: f64,
}

impl GaussianSpec {
    pub fn centered(n: usize, variance_scale: f64) -> Result<GaussianSpec> {
        GaussianSpec::new(n, vec![0.0; n], variance_scale)
    }

    pub fn new(n: usize, mean: Vec<f64>, variance_scale: f64) -> Result<GaussianSpec> {
        if variance_scale <= 0.0 || !variance_scale.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "variance scale must be positive and finite, got {variance_scale}"
            )));
        }
        if mean.len() != n {
            return Err(Error::InvalidParameter("mean dimension mismatch".into()));
        }
        Ok(GaussianSpec {
            n,
            mean,
            variance_scale,
        })
    }
}

/// Draw one point from N(mean, σ²I): i.i.d. standard normals scaled by σ and
/// translated. Deterministic given the RNG state.
pub fn sample_gaussian<R: Rng + ?Sized>(spec: &GaussianSpec, rng: &mut R) -> Vec<f64> {
    let sigma = spec.variance_scale.sqrt();
    (0..spec.n)
        .map(|i| {
            let z: f64 = rng.sample(StandardNormal);
            spec.mean[i] + sigma * z
        })
        .collect()
}

/// Convenience: a centered standard-normal-scaled draw, v ∼ N(0, βI).
pub fn sample_centered<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> Vec<f64> {
    let spec = GaussianSpec::centered(n, beta).expect("beta > 0");
    sample_gaussian(&spec, rng)
}

/// Certified bound on dtv(N(0, kI), N(p, kI)) for any shift with ‖p‖₂ ≤ r:
/// k·r/2.
pub fn tv_bound_shifted(k: u32, r: f64) -> f64 {
    assert!(k >= 1, "k must be a positive integer");
    k as f64 * r / 2.0
}

// ---------------------------------------------------------------------------
// Lattices
// ---------------------------------------------------------------------------

/// The scaled integer lattice t·(1/B)ℤⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    pub n: usize,
    /// Lattice density denominator B > 0 (rational).
    pub b: Rat,
    /// Scale multiplier t (the lattice is t·(1/B)ℤⁿ).
    pub t: Rat,
}

impl LatticeSpec {
    /// (1/B)ℤⁿ.
    pub fn unit_over(n: usize, b: Rat) -> Result<LatticeSpec> {
        LatticeSpec::new(n, b, rat_int(1))
    }

    pub fn new(n: usize, b: Rat, t: Rat) -> Result<LatticeSpec> {
        if !b.is_positive() {
            return Err(Error::InvalidParameter("lattice denominator B must be > 0".into()));
        }
        if t.is_zero() {
            return Err(Error::InvalidParameter("lattice multiplier t must be nonzero".into()));
        }
        Ok(LatticeSpec { n, b, t })
    }

    /// The generator step t/B of each coordinate.
    pub fn step(&self) -> Rat {
        &self.t / &self.b
    }

    /// Exact membership: x ∈ t·(1/B)ℤⁿ iff B·x_i ∈ t·ℤ for every i.
    pub fn contains(&self, x: &[Rat]) -> bool {
        x.len() == self.n
            && x.iter().all(|xi| {
                let q = &self.b * xi / &self.t;
                q.is_integer()
            })
    }

    /// The lattice scaled by an integer multiplier j (j·ℒ).
    pub fn scaled(&self, j: i64) -> LatticeSpec {
        LatticeSpec {
            n: self.n,
            b: self.b.clone(),
            t: &self.t * rat_int(j),
        }
    }
}

/// A discrete Gaussian 𝒢(ℒ, s): mass ∝ exp(−π‖x‖²/s²) on lattice points.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteGaussianSpec {
    pub lattice: LatticeSpec,
    /// Width s.
    pub s: f64,
}

// ---------------------------------------------------------------------------
// 1-D discrete Gaussian sampler
// ---------------------------------------------------------------------------

/// Inverse-CDF table for 𝒢(step·ℤ, s) in one dimension.
///
/// Support is truncated at |j| ≤ ⌈12·s/step⌉; the discarded tail mass is
/// below exp(−π·144) < 2⁻¹⁰⁰. The width must satisfy the practical floor
/// s ≥ step/10 (below it the truncated table degenerates to a point mass and
/// the sampler's fidelity claims are void).
#[derive(Debug, Clone)]
pub struct DiscreteGaussian1d {
    step: Rat,
    /// CDF over j = −j_max..=j_max, cumulative and normalized.
    cdf: Vec<f64>,
    /// Normalized PMF on the same support (kept for goodness-of-fit tests).
    pmf: Vec<f64>,
    j_max: i64,
}

impl DiscreteGaussian1d {
    pub fn new(step: Rat, s: f64) -> Result<DiscreteGaussian1d> {
        if !step.is_positive() {
            return Err(Error::InvalidParameter("step must be > 0".into()));
        }
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::InvalidParameter("width s must be positive".into()));
        }
        let step_f = crate::poly::rat_to_f64(&step);
        if s < step_f / 10.0 {
            return Err(Error::InvalidParameter(format!(
                "width s = {s} below the practical floor step/10 = {}",
                step_f / 10.0
            )));
        }
        let j_max = (12.0 * s / step_f).ceil() as i64;
        let mut weights = Vec::with_capacity((2 * j_max + 1) as usize);
        for j in -j_max..=j_max {
            let x = j as f64 * step_f;
            weights.push((-std::f64::consts::PI * x * x / (s * s)).exp());
        }
        let total: f64 = weights.iter().sum();
        let pmf: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let mut cdf = Vec::with_capacity(pmf.len());
        let mut acc = 0.0;
        for p in &pmf {
            acc += p;
            cdf.push(acc);
        }
        Ok(DiscreteGaussian1d {
            step,
            cdf,
            pmf,
            j_max,
        })
    }

    /// Draw an exact lattice point j·step.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Rat {
        let u: f64 = rng.gen();
        let idx = self.cdf.partition_point(|c| *c < u).min(self.cdf.len() - 1);
        let j = idx as i64 - self.j_max;
        &self.step * rat_int(j)
    }

    /// The truncated, normalized target PMF over `support()`.
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Support indices j for `pmf()`, in order.
    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        -self.j_max..=self.j_max
    }

    pub fn step(&self) -> &Rat {
        &self.step
    }
}

/// One-shot draw from 𝒢(step·ℤ, s). Builds the table; hot loops should build
/// a [`DiscreteGaussian1d`] once and reuse it.
pub fn sample_discrete_gaussian_1d<R: Rng + ?Sized>(step: Rat, s: f64, rng: &mut R) -> Result<Rat> {
    Ok(DiscreteGaussian1d::new(step, s)?.sample(rng))
}

/// Cached n-dimensional sampler for 𝒢(ℒ, s) on a scaled integer lattice.
/// The density factorizes over coordinates, so coordinates are sampled
/// independently from the 1-D table.
#[derive(Debug, Clone)]
pub struct DiscreteGaussianSampler {
    table: DiscreteGaussian1d,
    n: usize,
}

impl DiscreteGaussianSampler {
    pub fn new(spec: &DiscreteGaussianSpec) -> Result<DiscreteGaussianSampler> {
        let step = spec.lattice.step().abs();
        Ok(DiscreteGaussianSampler {
            table: DiscreteGaussian1d::new(step, spec.s)?,
            n: spec.lattice.n,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Rat> {
        (0..self.n).map(|_| self.table.sample(rng)).collect()
    }
}

/// One-shot draw from 𝒢(ℒ, s).
pub fn sample_discrete_gaussian<R: Rng + ?Sized>(
    spec: &DiscreteGaussianSpec,
    rng: &mut R,
) -> Result<Vec<Rat>> {
    Ok(DiscreteGaussianSampler::new(spec)?.sample(rng))
}

/// Closed-form sandwich for the smoothing parameter of (1/B)ℤⁿ at
/// ϑ = 2⁻ⁿ: returns (√(n/π)/B, √n/B).
pub fn smoothing_bounds(n: usize, b: f64) -> (f64, f64) {
    assert!(n >= 1 && b > 0.0);
    let nf = n as f64;
    ((nf / std::f64::consts::PI).sqrt() / b, nf.sqrt() / b)
}

/// Helper shared by regime validators: gcd of the integer coordinates of
/// B·x for a lattice point x ∈ (1/B)ℤⁿ (0 for the origin).
pub fn lattice_coord_gcd(x: &[Rat], b: &Rat) -> BigInt {
    let mut g = BigInt::zero();
    for xi in x {
        let v = (b * xi).to_integer();
        g = g.gcd(&v);
    }
    if g.is_zero() {
        BigInt::one()
    } else {
        g
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegimeWarning {
    pub message: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, rat_to_f64};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gaussian_moments_at_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let spec = GaussianSpec::centered(1, 1.0).unwrap();
        let n = 100_000;
        let samples: Vec<f64> = (0..n).map(|_| sample_gaussian(&spec, &mut rng)[0]).collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
        assert!(GaussianSpec::centered(1, 0.0).is_err());
    }

    #[test]
    fn gaussian_scaling_matches_direct_sampling() {
        // √β·v with v ∼ N(0,I) is distributed as N(0, βI).
        let beta: f64 = 3.7;
        let mut rng1 = ChaCha8Rng::seed_from_u64(6);
        let mut rng2 = ChaCha8Rng::seed_from_u64(7);
        let mut scaled: Vec<f64> = (0..50_000)
            .map(|_| beta.sqrt() * sample_centered(1, 1.0, &mut rng1)[0])
            .collect();
        let mut direct: Vec<f64> = (0..50_000)
            .map(|_| sample_centered(1, beta, &mut rng2)[0])
            .collect();
        assert!(crate::stats::ks_two_sample_pass(&mut scaled, &mut direct, 0.01));
    }

    #[test]
    fn gaussian_translation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = [5.0, -2.0];
        let spec = GaussianSpec::new(2, c.to_vec(), 1.0).unwrap();
        let n = 50_000;
        let mut mean = [0.0f64; 2];
        for _ in 0..n {
            let x = sample_gaussian(&spec, &mut rng);
            mean[0] += x[0];
            mean[1] += x[1];
        }
        assert!((mean[0] / n as f64 - 5.0).abs() < 0.05);
        assert!((mean[1] / n as f64 + 2.0).abs() < 0.05);
    }

    #[test]
    fn tv_bound_formula() {
        assert_eq!(tv_bound_shifted(1, 0.02), 0.01);
        let d = 2.0f64;
        let r = (3.0 * d).powi(-6);
        assert!((tv_bound_shifted(4, r) - 4.0 * 6.0f64.powi(-6) / 2.0).abs() < 1e-18);
    }

    #[test]
    fn shifted_gaussian_tv_is_below_bound() {
        // Estimate TV between N(0, kI) and N(p, kI) on the 1-D sufficient
        // statistic ⟨x, p⟩/‖p‖ for random small shifts.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let k = rand::Rng::gen_range(&mut rng, 1u32..5);
            let r = rand::Rng::gen_range(&mut rng, 0.05..0.4);
            let n = 3usize;
            let mut p: Vec<f64> = (0..n)
                .map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0))
                .collect();
            let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            for v in &mut p {
                *v *= r / norm; // ‖p‖ = r exactly at the boundary of the bound's regime
            }
            let m = 100_000;
            let dir: Vec<f64> = p.iter().map(|v| v / r).collect();
            let a: Vec<f64> = (0..m)
                .map(|_| {
                    let x = sample_centered(n, k as f64, &mut rng);
                    x.iter().zip(&dir).map(|(xi, di)| xi * di).sum()
                })
                .collect();
            let b: Vec<f64> = (0..m)
                .map(|_| {
                    let x = sample_centered(n, k as f64, &mut rng);
                    x.iter()
                        .zip(&dir)
                        .zip(&p)
                        .map(|((xi, di), pi)| (xi + pi) * di)
                        .sum()
                })
                .collect();
            let tv = crate::stats::tv_binned(&a, &b, 200);
            // Estimator bias is positive (binning + sampling noise), so allow
            // a small additive budget on top of the certified bound.
            assert!(
                tv <= tv_bound_shifted(k, r) + 0.03,
                "tv {tv} vs bound {}",
                tv_bound_shifted(k, r)
            );
        }
    }

    #[test]
    fn lattice_membership_and_scaling() {
        let l = LatticeSpec::unit_over(2, rat_int(4)).unwrap();
        assert!(l.contains(&[rat(1, 4), rat(3, 2)]));
        assert!(!l.contains(&[rat(1, 3), rat_int(0)]));
        let l2 = l.scaled(3);
        assert!(l2.contains(&[rat(3, 4), rat(3, 2)]));
        assert!(!l2.contains(&[rat(1, 4), rat_int(0)]));
    }

    #[test]
    fn table_pmf_ratio_is_exp_pi() {
        // step=1, s=1: PMF(0)/PMF(1) = e^π ≈ 23.1407.
        let t = DiscreteGaussian1d::new(rat_int(1), 1.0).unwrap();
        let j_max = (t.pmf().len() as i64 - 1) / 2;
        let p0 = t.pmf()[j_max as usize];
        let p1 = t.pmf()[(j_max + 1) as usize];
        assert!((p0 / p1 - std::f64::consts::PI.exp()).abs() < 1e-9);
        assert!((p0 / p1 - 23.1407).abs() < 1e-3);
    }

    #[test]
    fn sampler_is_symmetric_and_fits_its_pmf() {
        let t = DiscreteGaussian1d::new(rat_int(1), 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let n = 1_000_000usize;
        let j_max = (t.pmf().len() - 1) / 2;
        let mut counts = vec![0u64; t.pmf().len()];
        let mut sum = 0.0f64;
        for _ in 0..n {
            let v = t.sample(&mut rng);
            let f = rat_to_f64(&v);
            sum += f;
            let idx = (f.round() as i64 + j_max as i64) as usize;
            counts[idx] += 1;
        }
        // Mean within 3σ/√N of zero.
        let sigma = 1.0 / std::f64::consts::PI.sqrt() * std::f64::consts::FRAC_1_SQRT_2 * 2.0;
        assert!((sum / n as f64).abs() < 3.0 * sigma / (n as f64).sqrt() + 1e-3);
        let expected: Vec<f64> = t.pmf().iter().map(|p| p * n as f64).collect();
        let p = crate::stats::chi_square_gof_p(&counts, &expected, 5.0);
        assert!(p >= 0.001, "chi-square p = {p}");
    }

    #[test]
    fn discrete_scaling_law() {
        // j·𝒢(ℒ, s) is distributed as 𝒢(jℒ, js): compare per-coordinate KS.
        let l = LatticeSpec::unit_over(1, rat_int(2)).unwrap();
        let s1 = DiscreteGaussianSampler::new(&DiscreteGaussianSpec {
            lattice: l.clone(),
            s: 1.3,
        })
        .unwrap();
        let s2 = DiscreteGaussianSampler::new(&DiscreteGaussianSpec {
            lattice: l.scaled(3),
            s: 3.0 * 1.3,
        })
        .unwrap();
        let mut rng1 = ChaCha8Rng::seed_from_u64(11);
        let mut rng2 = ChaCha8Rng::seed_from_u64(12);
        let m = 50_000;
        let mut a: Vec<f64> = (0..m)
            .map(|_| 3.0 * rat_to_f64(&s1.sample(&mut rng1)[0]))
            .collect();
        let mut b: Vec<f64> = (0..m).map(|_| rat_to_f64(&s2.sample(&mut rng2)[0])).collect();
        assert!(crate::stats::ks_two_sample_pass(&mut a, &mut b, 0.01));
    }

    #[test]
    fn nd_sampler_stays_on_lattice_and_has_factorized_mass() {
        let l = LatticeSpec::unit_over(2, rat_int(1)).unwrap();
        let spec = DiscreteGaussianSpec { lattice: l.clone(), s: 1.0 };
        let sampler = DiscreteGaussianSampler::new(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..1000 {
            let x = sampler.sample(&mut rng);
            assert!(l.contains(&x));
        }
        // Pr[(0,0)]/Pr[(1,0)] = e^π for the factorized PMF.
        let t = DiscreteGaussian1d::new(rat_int(1), 1.0).unwrap();
        let j_max = (t.pmf().len() - 1) / 2;
        let ratio = (t.pmf()[j_max] * t.pmf()[j_max]) / (t.pmf()[j_max + 1] * t.pmf()[j_max]);
        assert!((ratio - std::f64::consts::PI.exp()).abs() < 1e-9);
    }

    #[test]
    fn smoothing_bound_examples() {
        let (lo, hi) = smoothing_bounds(4, 100.0);
        assert!((lo - 0.011284).abs() < 1e-5);
        assert!((hi - 0.02).abs() < 1e-12);
        let (lo, hi) = smoothing_bounds(1, 1.0);
        assert!((lo - 0.564190).abs() < 1e-5);
        assert!((hi - 1.0).abs() < 1e-12);
        assert!(lo < hi);
    }

    #[test]
    fn width_floor_is_enforced() {
        assert!(DiscreteGaussian1d::new(rat_int(1), 0.05).is_err());
        assert!(DiscreteGaussian1d::new(rat_int(1), 0.2).is_ok());
    }
}
