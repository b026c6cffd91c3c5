//! Empirical verifiers for the structural facts the testers' correctness
//! rests on: median bridging, slice-interpolation reconstruction, degree
//! reduction via Chebyshev tails, the bounded-difference stability probe,
//! integer combinations of discrete Gaussians, the discrete local
//! characterization recurrence, and the Chebyshev numerical invariants.
//!
//! Each check runs a concrete finite experiment at a fixed seed and emits a
//! machine-readable [`CheckReport`]; a passing report has zero violations.
//! Statistical margins carry explicit 3-sigma slack. One claim has no
//! finite-sample analogue (boundedness of the self-corrected g on the small
//! ball) and is deliberately not checked here.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chebyshev::{
    anticoncentration_search, cheb_eval, cheb_nodes, project_fn, radial_cheb_coeffs,
    stability_bound,
};
use crate::error::Error;
use crate::poly::{
    lagrange_eval_f64, lagrange_interpolate, rat, rat_int, rat_to_f64, MultiPoly, Rat, UniPoly,
};
use crate::sampling::{sample_discrete_gaussian_1d, DiscreteGaussian1d};
use crate::stats::median;
use crate::Result;

/// Outcome of one empirical check: a named claim, how many trials probed it,
/// how many violated it, and the worst margin observed (sign convention:
/// negative or zero margins are comfortable, positive would be violations).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub lemma_id: String,
    pub trials: u64,
    pub violations: u64,
    pub worst_margin: f64,
    pub parameters: BTreeMap<String, serde_json::Value>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// One JSON object per line, for machine consumption.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn param(v: impl Into<serde_json::Value>) -> serde_json::Value {
    v.into()
}

// ---------------------------------------------------------------------------
// Median bridging
// ---------------------------------------------------------------------------

/// The sample median is within δ of a typical draw: with η̂ the fraction of
/// random pairs farther than δ apart, at most 4η̂ (+3σ estimator slack) of the
/// values may be farther than δ from the median. When 4η̂ ≥ 1 the bound is
/// vacuous; the report flags this and passes.
pub fn check_median_close<R: Rng + ?Sized>(
    values: &[f64],
    delta: f64,
    rng: &mut R,
) -> Result<CheckReport> {
    if values.len() < 1000 {
        return Err(Error::InvalidParameter(
            "median check needs at least 1000 values".into(),
        ));
    }
    let pair_trials = 100_000usize;
    let mut far_pairs = 0usize;
    for _ in 0..pair_trials {
        let a = values[rng.gen_range(0..values.len())];
        let b = values[rng.gen_range(0..values.len())];
        if (a - b).abs() > delta {
            far_pairs += 1;
        }
    }
    let eta_hat = far_pairs as f64 / pair_trials as f64;
    let mut sorted = values.to_vec();
    let med = median(&mut sorted);
    let far_from_med = values.iter().filter(|v| (*v - med).abs() > delta).count();
    let m_hat = far_from_med as f64 / values.len() as f64;
    // 3-sigma binomial slack on both estimates.
    let slack = 3.0
        * ((0.25 / pair_trials as f64).sqrt() * 4.0 + (0.25 / values.len() as f64).sqrt());
    let vacuous = 4.0 * eta_hat >= 1.0;
    let margin = m_hat - (4.0 * eta_hat + slack);
    let violations = if !vacuous && margin > 0.0 { 1 } else { 0 };
    let mut parameters = BTreeMap::new();
    parameters.insert("delta".into(), param(delta));
    parameters.insert("eta_hat".into(), param(eta_hat));
    parameters.insert("m_hat".into(), param(m_hat));
    parameters.insert("slack".into(), param(slack));
    parameters.insert("vacuous".into(), param(vacuous));
    Ok(CheckReport {
        lemma_id: "median_close".into(),
        trials: values.len() as u64,
        violations,
        worst_margin: margin,
        parameters,
    })
}

// ---------------------------------------------------------------------------
// Slice interpolation (local-to-global)
// ---------------------------------------------------------------------------

fn random_poly<R: Rng + ?Sized>(n: usize, d: u32, rng: &mut R) -> MultiPoly {
    MultiPoly::from_terms(
        n,
        (0..6).map(|_| {
            let mut left = d;
            let e: Vec<u32> = (0..n)
                .map(|_| {
                    let k = rng.gen_range(0..=left);
                    left -= k;
                    k
                })
                .collect();
            (e, rat(rng.gen_range(-9..10), rng.gen_range(1..5)))
        }),
    )
    .expect("valid exponents")
}

/// Gluing d+1 degree-d slices along distinct abscissae c_0..c_d of the last
/// coordinate reproduces a planted degree-d polynomial exactly, and the glued
/// function's radial restrictions have degree exactly d — while a planted
/// degree-(d+1) polynomial exhibits a radial line of degree d+1, found by
/// coefficient search over directions.
pub fn check_local_to_global<R: Rng + ?Sized>(
    d: u32,
    n: usize,
    grid: usize,
    rng: &mut R,
) -> Result<CheckReport> {
    if n < 2 || n > 4 {
        return Err(Error::InvalidParameter(
            "slice check needs 2 <= n <= 4".into(),
        ));
    }
    let abscissae: Vec<Rat> = (0..=d as i64).map(|i| rat(i - 1, 2)).collect();
    for (i, a) in abscissae.iter().enumerate() {
        if abscissae[..i].contains(a) {
            return Err(Error::InvalidParameter(
                "slice abscissae must be distinct".into(),
            ));
        }
    }
    let p = random_poly(n, d, rng);
    let mut trials = 0u64;
    let mut violations = 0u64;
    let mut worst = 0.0f64;
    // Reconstruction on a dense grid: for each x, interpolate the slice
    // values p(x', c_i) through the abscissae and evaluate at x_n.
    for _ in 0..grid {
        let x: Vec<Rat> = (0..n).map(|_| rat(rng.gen_range(-6..7), 3)).collect();
        let nodes: Vec<(Rat, Rat)> = abscissae
            .iter()
            .map(|c| {
                let mut slice_point = x.clone();
                slice_point[n - 1] = c.clone();
                (c.clone(), p.eval_exact(&slice_point))
            })
            .collect();
        let glued = lagrange_interpolate(&nodes)?.eval_exact(&x[n - 1]);
        let truth = p.eval_exact(&x);
        trials += 1;
        if glued != truth {
            violations += 1;
            worst = worst.max(rat_to_f64(&(&glued - &truth)).abs());
        }
    }
    // Radial degree witness: restrictions never exceed d, and some direction
    // attains d.
    let origin = vec![Rat::zero(); n];
    let mut attained = 0usize;
    for _ in 0..40 {
        let a: Vec<Rat> = (0..n).map(|_| rat(rng.gen_range(-5..6), 2)).collect();
        let restricted = p.restrict_to_line(&origin, &a);
        trials += 1;
        if restricted.degree() > d as usize {
            violations += 1;
        }
        if restricted.degree() == d as usize {
            attained += 1;
        }
    }
    if attained == 0 && p.total_degree() == d {
        violations += 1;
    }
    // A degree-(d+1) plant must expose a radial line of degree d+1 under the
    // same coefficient search.
    let q = {
        let mut e = vec![0u32; n];
        e[0] = d + 1;
        let mut terms: Vec<(Vec<u32>, Rat)> = p
            .terms()
            .iter()
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        terms.push((e, rat_int(1)));
        MultiPoly::from_terms(n, terms)?
    };
    let mut exposed = false;
    for _ in 0..40 {
        let a: Vec<Rat> = (0..n).map(|_| rat(rng.gen_range(-5..6), 2)).collect();
        if q.restrict_to_line(&origin, &a).degree() == d as usize + 1 {
            exposed = true;
            break;
        }
    }
    trials += 1;
    if !exposed {
        violations += 1;
    }
    let mut parameters = BTreeMap::new();
    parameters.insert("d".into(), param(d));
    parameters.insert("n".into(), param(n as u64));
    parameters.insert("grid".into(), param(grid as u64));
    Ok(CheckReport {
        lemma_id: "local_to_global".into(),
        trials,
        violations,
        worst_margin: worst,
        parameters,
    })
}

// ---------------------------------------------------------------------------
// Degree reduction via Chebyshev tails
// ---------------------------------------------------------------------------

/// Along every radial direction, each above-degree-d Chebyshev coefficient of
/// the restriction is at most √2 times the truncation fit error on [−1, 1];
/// and on [−m, m]ⁿ (m ≤ 1) the full polynomial stays within its high-degree
/// coefficient mass of its degree-d truncation.
pub fn check_degree_reduction<R: Rng + ?Sized>(
    p: &MultiPoly,
    d: u32,
    m: f64,
    rng: &mut R,
) -> Result<CheckReport> {
    let ell = p.total_degree();
    if ell > 6 || p.n() > 4 {
        return Err(Error::InvalidParameter(
            "degree-reduction check needs total degree <= 6 and n <= 4".into(),
        ));
    }
    if !(0.0 < m && m <= 1.0) {
        return Err(Error::InvalidParameter("need 0 < m <= 1".into()));
    }
    let n = p.n();
    let mut trials = 0u64;
    let mut violations = 0u64;
    let mut worst = f64::NEG_INFINITY;
    let directions = 200usize;
    for _ in 0..directions {
        let a: Vec<Rat> = (0..n).map(|_| rat(rng.gen_range(-4..5), 4)).collect();
        let exp = radial_cheb_coeffs(p, &a, ell)?;
        // Truncation fit error on [−1, 1]: sup of the tail Σ_{k>d} q_k T_k.
        let tail: Vec<f64> = (0..=exp.degree())
            .map(|k| {
                if k > d as usize {
                    rat_to_f64(&exp.coeff(k))
                } else {
                    0.0
                }
            })
            .collect();
        let mut eps_hat = 0.0f64;
        for i in 0..=400 {
            let t = -1.0 + 2.0 * i as f64 / 400.0;
            let v: f64 = tail
                .iter()
                .enumerate()
                .map(|(k, c)| c * cheb_eval(k as u32, t))
                .sum();
            eps_hat = eps_hat.max(v.abs());
        }
        for (_k, c) in tail.iter().enumerate().skip(d as usize + 1) {
            trials += 1;
            let margin = c.abs() - std::f64::consts::SQRT_2 * eps_hat;
            worst = worst.max(margin);
            if margin > 1e-12 {
                violations += 1;
            }
        }
    }
    // Grid sup of |p − p^{≤d}| against the high-degree coefficient mass.
    let trunc = p.truncate(d);
    let tail_mass = rat_to_f64(&p.tail_coeff_mass(d));
    let mut d_hat = 0.0f64;
    for _ in 0..2000 {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-m..m)).collect();
        d_hat = d_hat.max((p.eval_f64(&x) - trunc.eval_f64(&x)).abs());
    }
    trials += 1;
    if d_hat > tail_mass * (1.0 + 1e-9) + 1e-12 {
        violations += 1;
        worst = worst.max(d_hat - tail_mass);
    }
    let mut parameters = BTreeMap::new();
    parameters.insert("d".into(), param(d));
    parameters.insert("ell".into(), param(ell));
    parameters.insert("m".into(), param(m));
    parameters.insert("d_hat".into(), param(d_hat));
    parameters.insert("tail_mass".into(), param(tail_mass));
    Ok(CheckReport {
        lemma_id: "degree_reduction".into(),
        trials,
        violations,
        worst_margin: if worst.is_finite() { worst } else { 0.0 },
        parameters,
    })
}

// ---------------------------------------------------------------------------
// Bounded-difference stability probe
// ---------------------------------------------------------------------------

/// A function on [0, 1] whose (d+1)-st finite differences are all at most φ
/// stays within 2^{8d²}·φ of its best degree-d fit (Chebyshev projection).
/// The bound is compared in log-space; it is finite for d ≤ 3.
pub fn check_gajda_probe(f: &dyn Fn(f64) -> f64, d: u32, grid: usize) -> Result<CheckReport> {
    if d > 3 {
        return Err(Error::InvalidParameter(
            "stability probe supports d <= 3".into(),
        ));
    }
    if grid < 8 * (d as usize + 2) {
        return Err(Error::InvalidParameter("grid too coarse".into()));
    }
    // φ̂ = sup over in-range (x, h) of |Δ_h^{(d+1)} f(x)|, with x and h on the
    // grid and x + (d+1)h ≤ 1.
    let m = d + 1;
    let binom: Vec<f64> = (0..=m)
        .map(|i| {
            let mut acc = 1.0f64;
            for k in 0..i {
                acc = acc * (m - k) as f64 / (k + 1) as f64;
            }
            acc
        })
        .collect();
    let mut phi_hat = 0.0f64;
    for hi in 1..=grid {
        let h = hi as f64 / grid as f64;
        if (m as f64) * h > 1.0 {
            break;
        }
        for xi in 0..=grid {
            let x = xi as f64 / grid as f64;
            if x + m as f64 * h > 1.0 {
                break;
            }
            let mut diff = 0.0;
            for i in 0..=m {
                let sign = if (m - i) % 2 == 0 { 1.0 } else { -1.0 };
                diff += sign * binom[i as usize] * f(x + i as f64 * h);
            }
            phi_hat = phi_hat.max(diff.abs());
        }
    }
    // Best degree-d fit: Chebyshev projection of f mapped onto [−1, 1].
    let mapped = |t: f64| f(0.5 * (t + 1.0));
    let coeffs = project_fn(mapped, d, 256);
    let fit = |x: f64| -> f64 {
        let t = 2.0 * x - 1.0;
        coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * cheb_eval(k as u32, t))
            .sum()
    };
    let mut err = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..=grid {
        let x = i as f64 / grid as f64;
        let v = f(x);
        scale = scale.max(v.abs());
        err = err.max((v - fit(x)).abs());
    }
    // log2(err) ≤ 8d² + log2(φ̂); degenerate φ̂ = 0 demands a near-exact fit.
    let (violations, margin) = if phi_hat == 0.0 {
        let tol = 1e-9 * scale.max(1.0);
        ((err > tol) as u64, err - tol)
    } else {
        let margin = err.log2() - (8.0 * (d as f64) * (d as f64) + phi_hat.log2());
        ((margin > 0.0) as u64, margin)
    };
    let mut parameters = BTreeMap::new();
    parameters.insert("d".into(), param(d));
    parameters.insert("grid".into(), param(grid as u64));
    parameters.insert("phi_hat".into(), param(phi_hat));
    parameters.insert("fit_error".into(), param(err));
    Ok(CheckReport {
        lemma_id: "bounded_difference_stability".into(),
        trials: 1,
        violations,
        worst_margin: margin,
        parameters,
    })
}

// ---------------------------------------------------------------------------
// Integer combinations of discrete Gaussians
// ---------------------------------------------------------------------------

/// Σ z_i·y_i with independent y_i ∼ 𝒢((1/B)ℤ, s_i) lands on gcd(z)·(1/B)ℤ
/// and matches 𝒢(gcd(z)·(1/B)ℤ, √Σ(z_i s_i)²) within a total-variation
/// budget (estimator noise plus theorem slack).
pub fn check_indsum<R: Rng + ?Sized>(
    b: u64,
    z: &[i64],
    s: &[f64],
    trials: usize,
    tv_budget: f64,
    rng: &mut R,
) -> Result<CheckReport> {
    if z.is_empty() || z.len() > 3 || z.len() != s.len() {
        return Err(Error::InvalidParameter(
            "indsum check needs 1..=3 matched (z, s) entries".into(),
        ));
    }
    if z.iter().any(|v| *v == 0) {
        return Err(Error::InvalidParameter("z entries must be nonzero".into()));
    }
    let step = rat(1, b as i64);
    let gcd = z.iter().fold(0i64, |g, v| num_integer::gcd(g, v.abs()));
    let target_step = rat(gcd, b as i64);
    let target_s = s
        .iter()
        .zip(z)
        .map(|(si, zi)| (si * *zi as f64).powi(2))
        .sum::<f64>()
        .sqrt();
    let target = DiscreteGaussian1d::new(target_step.clone(), target_s)?;
    let support: Vec<i64> = target.support().collect();
    let offset = -support[0];
    let mut counts = vec![0u64; support.len()];
    let mut membership_violations = 0u64;
    let mut outside = 0u64;
    for _ in 0..trials {
        let mut w = Rat::zero();
        for (zi, si) in z.iter().zip(s) {
            let y = sample_discrete_gaussian_1d(step.clone(), *si, rng)?;
            w += rat_int(*zi) * y;
        }
        let idx = &w / &target_step;
        if !idx.is_integer() {
            membership_violations += 1;
            continue;
        }
        let k = idx.to_integer();
        let k: i64 = match TryInto::<i64>::try_into(k) {
            Ok(v) => v,
            Err(_) => {
                outside += 1;
                continue;
            }
        };
        let pos = k + offset;
        if pos < 0 || pos as usize >= counts.len() {
            outside += 1;
        } else {
            counts[pos as usize] += 1;
        }
    }
    let mut tv = crate::stats::tv_counts_vs_pmf(&counts, target.pmf());
    tv += outside as f64 / trials as f64;
    let margin = tv - tv_budget;
    let violations = membership_violations + (margin > 0.0) as u64;
    let mut parameters = BTreeMap::new();
    parameters.insert("b".into(), param(b));
    parameters.insert("z".into(), param(z.to_vec()));
    parameters.insert("target_s".into(), param(target_s));
    parameters.insert("tv".into(), param(tv));
    parameters.insert("tv_budget".into(), param(tv_budget));
    Ok(CheckReport {
        lemma_id: "indsum".into(),
        trials: trials as u64,
        violations,
        worst_margin: margin,
        parameters,
    })
}

// ---------------------------------------------------------------------------
// Discrete local characterization
// ---------------------------------------------------------------------------

/// On an equispaced grid, either every in-range (d+1)-st difference vanishes
/// and the values agree everywhere with the interpolant of the first d+1 of
/// them, or some difference is nonzero and some later value deviates from
/// that interpolant. Exact rational arithmetic throughout.
pub fn check_discrete_characterization(values: &[Rat], d: u32) -> Result<CheckReport> {
    let m = values.len().saturating_sub(1);
    if m < d as usize + 1 {
        return Err(Error::InvalidParameter(
            "need at least d+2 grid values".into(),
        ));
    }
    let order = d as usize + 1;
    let binom: Vec<Rat> = (0..=order)
        .map(|i| {
            let mut acc = Rat::from_integer(1.into());
            for k in 0..i {
                acc = acc * rat_int((order - k) as i64) / rat_int((k + 1) as i64);
            }
            acc
        })
        .collect();
    let mut all_vanish = true;
    let mut worst = 0.0f64;
    for j in 0..=m - order {
        let mut diff = Rat::zero();
        for i in 0..=order {
            let sign = if (order - i) % 2 == 0 { 1 } else { -1 };
            diff += rat_int(sign) * &binom[i] * &values[j + i];
        }
        if !diff.is_zero() {
            all_vanish = false;
            worst = worst.max(rat_to_f64(&diff.abs()));
        }
    }
    let nodes: Vec<(Rat, Rat)> = (0..order)
        .map(|j| (rat_int(j as i64), values[j].clone()))
        .collect();
    let interp = lagrange_interpolate(&nodes)?;
    let deviations = (0..=m)
        .filter(|j| interp.eval_exact(&rat_int(*j as i64)) != values[*j])
        .count();
    let violations = if all_vanish {
        deviations as u64
    } else {
        (deviations == 0) as u64
    };
    let mut parameters = BTreeMap::new();
    parameters.insert("d".into(), param(d));
    parameters.insert("grid_points".into(), param(values.len() as u64));
    parameters.insert("all_vanish".into(), param(all_vanish));
    parameters.insert("deviations".into(), param(deviations as u64));
    Ok(CheckReport {
        lemma_id: "discrete_characterization".into(),
        trials: (m - order + 1) as u64 + 1,
        violations,
        worst_margin: worst,
        parameters,
    })
}

// ---------------------------------------------------------------------------
// Chebyshev numerical invariants
// ---------------------------------------------------------------------------

/// Discrete orthogonality at the Chebyshev quadrature points, within 1e−10.
pub fn check_cheb_orthogonality(dmax: u32) -> Result<CheckReport> {
    let mut trials = 0u64;
    let mut violations = 0u64;
    let mut worst = 0.0f64;
    let nodes = cheb_nodes(dmax, 1.0);
    let n = nodes.len() as f64;
    for j in 0..=dmax {
        for k in j..=dmax {
            let sum: f64 = nodes
                .iter()
                .map(|x| cheb_eval(j, *x) * cheb_eval(k, *x))
                .sum();
            let expected = if j != k {
                0.0
            } else if j == 0 {
                n
            } else {
                n / 2.0
            };
            trials += 1;
            let err = (sum - expected).abs();
            worst = worst.max(err);
            if err > 1e-10 {
                violations += 1;
            }
        }
    }
    let mut parameters = BTreeMap::new();
    parameters.insert("dmax".into(), param(dmax));
    Ok(CheckReport {
        lemma_id: "cheb_orthogonality".into(),
        trials,
        violations,
        worst_margin: worst,
        parameters,
    })
}

/// The monic minimax witness: 2^{1−d}·T_d has sup-norm exactly 2^{1−d} on
/// [−1, 1], attained on a dense grid.
pub fn check_cheb_monic_bound(dmax: u32) -> Result<CheckReport> {
    let mut trials = 0u64;
    let mut violations = 0u64;
    let mut worst = 0.0f64;
    for d in 1..=dmax {
        let bound = (1.0 - d as f64).exp2();
        let mut sup = 0.0f64;
        for i in 0..=4000 {
            let x = -1.0 + 2.0 * i as f64 / 4000.0;
            sup = sup.max((bound * cheb_eval(d, x)).abs());
        }
        trials += 1;
        let err = (sup - bound).abs();
        worst = worst.max(err);
        if err > 1e-12 {
            violations += 1;
        }
    }
    let mut parameters = BTreeMap::new();
    parameters.insert("dmax".into(), param(dmax));
    Ok(CheckReport {
        lemma_id: "cheb_monic_bound".into(),
        trials,
        violations,
        worst_margin: worst,
        parameters,
    })
}

/// Interpolation through the Chebyshev nodes is stable: values bounded by ε
/// at the nodes keep the interpolant below √2·(d+1)·ε on a 10⁴-point grid.
pub fn check_cheb_stability<R: Rng + ?Sized>(dmax: u32, rng: &mut R) -> Result<CheckReport> {
    let mut trials = 0u64;
    let mut violations = 0u64;
    let mut worst = f64::NEG_INFINITY;
    for d in 1..=dmax {
        let nodes = cheb_nodes(d, 1.0);
        for _ in 0..20 {
            let eps: f64 = 10f64.powi(rng.gen_range(-6..1));
            let values: Vec<f64> = nodes.iter().map(|_| rng.gen_range(-eps..eps)).collect();
            let bound = stability_bound(&values, d)?;
            debug_assert!(bound <= std::f64::consts::SQRT_2 * (d as f64 + 1.0) * eps);
            let pairs: Vec<(f64, f64)> = nodes.iter().cloned().zip(values).collect();
            let mut sup = 0.0f64;
            for i in 0..=10_000 {
                let t = -1.0 + 2.0 * i as f64 / 10_000.0;
                sup = sup.max(lagrange_eval_f64(&pairs, t)?.0.abs());
            }
            trials += 1;
            let margin = sup - bound;
            worst = worst.max(margin);
            if margin > 1e-12 * bound.max(1.0) {
                violations += 1;
            }
        }
    }
    let mut parameters = BTreeMap::new();
    parameters.insert("dmax".into(), param(dmax));
    Ok(CheckReport {
        lemma_id: "cheb_stability".into(),
        trials,
        violations,
        worst_margin: worst,
        parameters,
    })
}

/// Anti-concentration witness for d ≤ 8: any polynomial with a coefficient of
/// index ≥ 1 at least η attains magnitude 2^{−2d²}·η somewhere on [−1, 1];
/// the search must succeed on random instances.
pub fn check_cheb_anticoncentration<R: Rng + ?Sized>(dmax: u32, rng: &mut R) -> Result<CheckReport> {
    if dmax > 8 {
        return Err(Error::InvalidParameter(
            "anti-concentration check supports d <= 8".into(),
        ));
    }
    let mut trials = 0u64;
    let mut violations = 0u64;
    let mut worst = 0.0f64;
    for d in 1..=dmax {
        for _ in 0..10 {
            let eta_num = rng.gen_range(1..100);
            let eta = eta_num as f64 / 100.0;
            let mut coeffs: Vec<Rat> = (0..=d as usize)
                .map(|_| rat(rng.gen_range(-50..51), 100))
                .collect();
            let idx = rng.gen_range(1..=d as usize);
            coeffs[idx] = rat(eta_num, 100);
            let p = UniPoly::from_coeffs(coeffs);
            trials += 1;
            match anticoncentration_search(&p, eta, 1.0) {
                Ok((_, v)) => worst = worst.max(-v),
                Err(_) => violations += 1,
            }
        }
    }
    let mut parameters = BTreeMap::new();
    parameters.insert("dmax".into(), param(dmax));
    Ok(CheckReport {
        lemma_id: "cheb_anticoncentration".into(),
        trials,
        violations,
        worst_margin: worst,
        parameters,
    })
}
