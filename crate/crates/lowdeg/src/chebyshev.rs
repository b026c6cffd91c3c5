//! Chebyshev polynomials of the first kind and the numerical machinery built
//! on them: interpolation nodes, the √2·(d+1)·ε stability bound, exact
//! monomial→Chebyshev conversion, radial-line expansions, anti-concentration
//! search, isolating exponent vectors, and node-based extrapolation with a
//! certified error bound carried in log space.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::Error;
use crate::logmag::LogMag;
use crate::poly::{lagrange_eval_f64, rat_to_f64, MultiPoly, Rat, UniPoly};
use crate::Result;

// ---------------------------------------------------------------------------
// Evaluation and nodes
// ---------------------------------------------------------------------------

/// T_k(x) via the three-term recurrence T_{k+1} = 2x·T_k − T_{k−1}.
pub fn cheb_eval(k: u32, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 2..=k {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// T_k as an exact univariate polynomial.
pub fn cheb_unipoly(k: u32) -> UniPoly {
    let mut prev = UniPoly::from_coeffs(vec![Rat::one()]);
    if k == 0 {
        return prev;
    }
    let t = UniPoly::from_coeffs(vec![Rat::zero(), Rat::one()]);
    let mut cur = t.clone();
    let two_t = t.scale(&Rat::from_integer(BigInt::from(2)));
    for _ in 2..=k {
        let next = two_t.mul(&cur).add(&prev.scale(&-Rat::one()));
        prev = cur;
        cur = next;
    }
    cur
}

/// The d+1 roots of T_{d+1} scaled to [−m, m]:
/// c_k = m·cos(π·(k+1/2)/(d+1)), k = 0..d, strictly decreasing in k.
pub fn cheb_nodes(d: u32, m: f64) -> Vec<f64> {
    assert!(m > 0.0, "node scale must be positive");
    (0..=d)
        .map(|k| m * (std::f64::consts::PI * (k as f64 + 0.5) / (d as f64 + 1.0)).cos())
        .collect()
}

/// Certified sup bound on [−m, m] for any degree-d polynomial whose values at
/// the d+1 Chebyshev nodes have the given magnitudes: √2·(d+1)·max|values|.
pub fn stability_bound(node_values: &[f64], d: u32) -> Result<f64> {
    if node_values.len() != d as usize + 1 {
        return Err(Error::InvalidParameter(format!(
            "stability_bound expects exactly d+1 = {} node values, got {}",
            d + 1,
            node_values.len()
        )));
    }
    let max = node_values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    Ok(std::f64::consts::SQRT_2 * (d as f64 + 1.0) * max)
}

// ---------------------------------------------------------------------------
// Exact basis conversion
// ---------------------------------------------------------------------------

/// Exact coefficients of t^r in the Chebyshev basis: t^r = Σ_k β_{k,r}·T_k(t)
/// with
///   β_{k,r} = 0                      when k ≢ r (mod 2),
///   β_{k,r} = 2^{1−r}·C(r, (r−k)/2)  when k ≡ r (mod 2), k ≠ 0,
///   β_{0,r} = 2^{−r}·C(r, r/2)       when r even.
/// Only nonzero entries are returned.
pub fn monomial_to_cheb(r: u32) -> BTreeMap<u32, Rat> {
    let mut out = BTreeMap::new();
    if r == 0 {
        out.insert(0, Rat::one());
        return out;
    }
    let pow = BigInt::from(1u8) << r as usize;
    for k in (0..=r).rev().step_by(2) {
        let binom = binomial_big(r, (r - k) / 2);
        let coeff = if k == 0 {
            Rat::new(binom, pow.clone())
        } else {
            Rat::new(binom * 2, pow.clone())
        };
        out.insert(k, coeff);
    }
    out
}

fn binomial_big(m: u32, i: u32) -> BigInt {
    let mut acc = BigInt::one();
    for k in 0..i.min(m - i) {
        acc = acc * BigInt::from(m - k) / BigInt::from(k + 1);
    }
    acc
}

/// A finite Chebyshev expansion f(t) = Σ_k γ_k·T_k(t/m) with exact rational
/// coefficients and domain scale m (nodes and arguments live in [−m, m]).
#[derive(Debug, Clone, PartialEq)]
pub struct ChebExpansion {
    coeffs: Vec<Rat>,
    scale: f64,
}

impl ChebExpansion {
    pub fn new(coeffs: Vec<Rat>, scale: f64) -> ChebExpansion {
        assert!(scale > 0.0, "domain scale must be positive");
        let mut c = ChebExpansion { coeffs, scale };
        while c.coeffs.last().map_or(false, |g| g.is_zero()) {
            c.coeffs.pop();
        }
        c
    }

    /// Exact conversion from the monomial basis (domain scale 1).
    pub fn from_unipoly(p: &UniPoly) -> ChebExpansion {
        let mut coeffs = vec![Rat::zero(); p.degree() + 1];
        for (r, a) in p.coeffs().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, beta) in monomial_to_cheb(r as u32) {
                coeffs[k as usize] += a * beta;
            }
        }
        ChebExpansion::new(coeffs, 1.0)
    }

    /// Exact conversion back to the monomial basis (for domain scale 1).
    pub fn to_unipoly(&self) -> UniPoly {
        let mut acc = UniPoly::zero();
        for (k, g) in self.coeffs.iter().enumerate() {
            if !g.is_zero() {
                acc = acc.add(&cheb_unipoly(k as u32).scale(g));
            }
        }
        acc
    }

    /// γ_k (zero beyond the stored length).
    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Keep only γ_0..γ_d — the Chebyshev-projection best degree-d fit.
    pub fn truncate(&self, d: u32) -> ChebExpansion {
        let keep = (d as usize + 1).min(self.coeffs.len());
        ChebExpansion::new(self.coeffs[..keep].to_vec(), self.scale)
    }

    /// Clenshaw evaluation of Σ γ_k T_k(t/scale).
    pub fn eval_f64(&self, t: f64) -> f64 {
        let x = t / self.scale;
        let mut b1 = 0.0f64;
        let mut b2 = 0.0f64;
        for g in self.coeffs.iter().rev() {
            let b0 = 2.0 * x * b1 - b2 + rat_to_f64(g);
            b2 = b1;
            b1 = b0;
        }
        // Clenshaw downward pass ends with f = b1 − x·b2... adjusted for T_0.
        b1 - x * b2
    }
}

/// The Chebyshev coefficients q_k(a) of the radial restriction t ↦ p(a·t),
/// computed exactly. Errors when the restriction exceeds the cap `ell`.
pub fn radial_cheb_coeffs(p: &MultiPoly, a: &[Rat], ell: u32) -> Result<ChebExpansion> {
    let origin = vec![Rat::zero(); p.n()];
    let restricted = p.restrict_to_line(&origin, a);
    if restricted.degree() > ell as usize {
        return Err(Error::InvalidParameter(format!(
            "radial restriction has degree {} > cap {ell}",
            restricted.degree()
        )));
    }
    Ok(ChebExpansion::from_unipoly(&restricted))
}

/// Numerical Chebyshev projection of an arbitrary scalar function on [−1, 1]
/// to degree ℓ, via Gauss–Chebyshev quadrature with `quad` abscissae:
/// γ_k ≈ (2 − [k=0])/N · Σ_j f(cos θ_j)·cos(k·θ_j), θ_j = π(j+1/2)/N.
pub fn project_fn(f: impl Fn(f64) -> f64, ell: u32, quad: usize) -> Vec<f64> {
    assert!(quad > ell as usize, "quadrature must exceed the degree cap");
    let n = quad as f64;
    let thetas: Vec<f64> = (0..quad)
        .map(|j| std::f64::consts::PI * (j as f64 + 0.5) / n)
        .collect();
    let values: Vec<f64> = thetas.iter().map(|t| f(t.cos())).collect();
    (0..=ell)
        .map(|k| {
            let w = if k == 0 { 1.0 } else { 2.0 };
            w / n
                * thetas
                    .iter()
                    .zip(&values)
                    .map(|(t, v)| v * (k as f64 * t).cos())
                    .sum::<f64>()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Anti-concentration search
// ---------------------------------------------------------------------------

/// The guaranteed floor for [`anticoncentration_search`] on [−m, m]:
/// 2^{−2d²}·m^d·η.
pub fn anticoncentration_floor(d: u32, eta: f64, m: f64) -> f64 {
    (-2.0 * (d as f64) * (d as f64)).exp2() * m.powi(d as i32) * eta
}

/// Finds x ∈ [−m, m] with |p(x)| ≥ 2^{−2d²}·m^d·η, given that some
/// coefficient α_i with i ≥ 1 has |α_i| ≥ η. Dense grid (10⁵ points) plus
/// golden-section refinement around the best cell. Fails only if the
/// guarantee cannot be met numerically, which would falsify the bound.
pub fn anticoncentration_search(p: &UniPoly, eta: f64, m: f64) -> Result<(f64, f64)> {
    if eta <= 0.0 || m <= 0.0 {
        return Err(Error::InvalidParameter(
            "anticoncentration_search needs eta > 0 and m > 0".into(),
        ));
    }
    // Compared in floats with a relative epsilon: callers state eta in
    // decimal, whose f64 image may sit a hair above the exact coefficient.
    let has_large = p
        .coeffs()
        .iter()
        .skip(1)
        .any(|c| rat_to_f64(&c.abs()) >= eta * (1.0 - 1e-12));
    if !has_large {
        return Err(Error::InvalidParameter(
            "no coefficient of index >= 1 reaches eta".into(),
        ));
    }
    let d = p.degree() as u32;
    let grid = 100_000usize;
    let mut best_x = -m;
    let mut best_v = p.eval_f64(-m).abs();
    for i in 1..=grid {
        let x = -m + 2.0 * m * i as f64 / grid as f64;
        let v = p.eval_f64(x).abs();
        if v > best_v {
            best_v = v;
            best_x = x;
        }
    }
    // Golden-section refinement of |p| on the bracketing cells.
    let cell = 2.0 * m / grid as f64;
    let (mut lo, mut hi) = ((best_x - cell).max(-m), (best_x + cell).min(m));
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let a = hi - phi * (hi - lo);
        let b = lo + phi * (hi - lo);
        if p.eval_f64(a).abs() < p.eval_f64(b).abs() {
            lo = a;
        } else {
            hi = b;
        }
    }
    let x = 0.5 * (lo + hi);
    let v = p.eval_f64(x).abs();
    let (x, v) = if v > best_v { (x, v) } else { (best_x, best_v) };
    let floor = anticoncentration_floor(d, eta, m);
    if v < floor {
        return Err(Error::SearchFailed(format!(
            "anti-concentration floor {floor} not met: best |p({x})| = {v}"
        )));
    }
    Ok((x, v))
}

// ---------------------------------------------------------------------------
// Isolating exponent vectors
// ---------------------------------------------------------------------------

/// Samples y ∈ {0, …, n^{8d}}ⁿ such that ⟨y, z⟩ ≠ 0 for every nonzero
/// z ∈ {−d, …, d}ⁿ with at most 4d nonzero entries. Verified exhaustively
/// when the z-set has at most 10⁷ elements, otherwise by 10⁶ randomized spot
/// checks. Retries a bounded number of times before giving up.
pub fn isolating_exponents<R: Rng + ?Sized>(n: usize, d: u32, rng: &mut R) -> Result<Vec<BigInt>> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidParameter(
            "isolating_exponents needs n >= 1, d >= 1".into(),
        ));
    }
    let k = BigUint::from(n).pow(8 * d);
    let z_set_size = (2u128 * d as u128 + 1).checked_pow(n as u32);
    let exhaustive = matches!(z_set_size, Some(s) if s <= 10_000_000);
    for _ in 0..32 {
        let y: Vec<BigInt> = (0..n)
            .map(|_| BigInt::from(sample_biguint_inclusive(&k, rng)))
            .collect();
        let ok = if exhaustive {
            verify_isolating_exhaustive(&y, d)
        } else {
            verify_isolating_sampled(&y, d, rng)
        };
        if ok {
            return Ok(y);
        }
    }
    Err(Error::SearchFailed(
        "no isolating exponent vector found in 32 attempts".into(),
    ))
}

/// Uniform sample from {0, …, bound} by rejection on the bit width.
fn sample_biguint_inclusive<R: Rng + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    let bits = bound.bits();
    if bits == 0 {
        return BigUint::zero();
    }
    let bytes = bits.div_ceil(8) as usize;
    let top_mask = if bits % 8 == 0 { 0xffu8 } else { (1u8 << (bits % 8)) - 1 };
    loop {
        let mut buf = vec![0u8; bytes];
        rng.fill_bytes(&mut buf);
        buf[bytes - 1] &= top_mask;
        let v = BigUint::from_bytes_le(&buf);
        if &v <= bound {
            return v;
        }
    }
}

/// Check ⟨y, z⟩ ≠ 0 for all admissible z, by full enumeration of {−d..d}ⁿ.
fn verify_isolating_exhaustive(y: &[BigInt], d: u32) -> bool {
    let n = y.len();
    let base = 2 * d as i64 + 1;
    let mut z = vec![-(d as i64); n];
    loop {
        let support = z.iter().filter(|&&zi| zi != 0).count();
        if support > 0 && support <= 4 * d as usize {
            let dot: BigInt = y
                .iter()
                .zip(&z)
                .map(|(yi, &zi)| yi * BigInt::from(zi))
                .sum();
            if dot.is_zero() {
                return false;
            }
        }
        // Odometer increment over {−d..d}ⁿ.
        let mut i = 0;
        loop {
            if i == n {
                return true;
            }
            z[i] += 1;
            if z[i] <= d as i64 {
                break;
            }
            z[i] -= base;
            i += 1;
        }
    }
}

fn verify_isolating_sampled<R: Rng + ?Sized>(y: &[BigInt], d: u32, rng: &mut R) -> bool {
    let n = y.len();
    for _ in 0..1_000_000 {
        let mut z = vec![0i64; n];
        let support = rng.gen_range(1..=(4 * d as usize).min(n));
        for _ in 0..support {
            let i = rng.gen_range(0..n);
            z[i] = rng.gen_range(-(d as i64)..=d as i64);
        }
        if z.iter().all(|&zi| zi == 0) {
            continue;
        }
        let dot: BigInt = y
            .iter()
            .zip(&z)
            .map(|(yi, &zi)| yi * BigInt::from(zi))
            .sum();
        if dot.is_zero() {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Radial extrapolation
// ---------------------------------------------------------------------------

/// Evaluates the degree-d interpolant through Chebyshev-node samples
/// (c_i, v_i) at `t_target`, and certifies how far node errors can move the
/// result: error_bound = √2·(d+1)²·(2·t_target/r')^d·η_in, where r' is the
/// node scale (recovered from max|c_i| = r'·cos(π/(2(d+1)))) and η_in is the
/// caller's bound on per-node error. The bound is carried in log space — for
/// the theoretical parameter regimes it can exceed every float.
pub fn extrapolate_radial(
    node_values: &[(f64, f64)],
    t_target: f64,
    d: u32,
    eta_in: f64,
) -> Result<(f64, LogMag)> {
    if node_values.len() != d as usize + 1 {
        return Err(Error::InvalidParameter(format!(
            "extrapolate_radial expects d+1 = {} nodes, got {}",
            d + 1,
            node_values.len()
        )));
    }
    let value = lagrange_eval_f64(node_values, t_target)?.0;
    if eta_in == 0.0 {
        return Ok((value, LogMag::ZERO));
    }
    let c_max = node_values
        .iter()
        .fold(0.0f64, |acc, (c, _)| acc.max(c.abs()));
    let r_prime = c_max / (std::f64::consts::PI / (2.0 * (d as f64 + 1.0))).cos();
    let dp1 = d as f64 + 1.0;
    let bound = LogMag::from_f64(std::f64::consts::SQRT_2 * dp1 * dp1)
        .mul(LogMag::from_f64(2.0 * t_target.abs() / r_prime).powi(d))
        .mul_f64(eta_in);
    Ok((value, bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, rat_int};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uni(coeffs: &[i64]) -> UniPoly {
        UniPoly::from_coeffs(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    #[test]
    fn eval_examples() {
        assert_eq!(cheb_eval(0, 0.3), 1.0);
        assert_eq!(cheb_eval(2, 0.5), -0.5); // T₂ = 2x² − 1
        for k in 0..=20 {
            assert!((cheb_eval(k, 1.0) - 1.0).abs() < 1e-12);
        }
        // Boundedness on [−1, 1].
        for k in 0..=10 {
            for i in 0..=100 {
                let x = -1.0 + i as f64 / 50.0;
                assert!(cheb_eval(k, x).abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn unipoly_matches_recurrence_eval() {
        for k in 0..=12u32 {
            let p = cheb_unipoly(k);
            for i in 0..40 {
                let x = -1.0 + i as f64 / 20.0;
                assert!((p.eval_f64(x) - cheb_eval(k, x)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn node_examples() {
        let n = cheb_nodes(1, 1.0);
        assert!((n[0] - 0.707107).abs() < 1e-6);
        assert!((n[1] + 0.707107).abs() < 1e-6);
        let n = cheb_nodes(0, 2.0);
        assert!(n[0].abs() < 1e-15);
        // Roots of T_{d+1}, strictly interior, strictly decreasing.
        for d in 0..8u32 {
            let m = 1.7;
            let nodes = cheb_nodes(d, m);
            for w in nodes.windows(2) {
                assert!(w[0] > w[1]);
            }
            for c in nodes {
                assert!(c.abs() < m);
                assert!(cheb_eval(d + 1, c / m).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn stability_bound_examples() {
        let b = stability_bound(&[0.1, -0.05], 1).unwrap();
        assert!((b - 0.282843).abs() < 1e-6);
        assert_eq!(stability_bound(&[0.0, 0.0, 0.0], 2).unwrap(), 0.0);
        assert!(stability_bound(&[1.0], 1).is_err());
    }

    #[test]
    fn stability_bound_dominates_grid_sup() {
        // Random degree-d polynomials: measured sup on a 10⁴ grid never
        // exceeds the certified bound from the node magnitudes.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let d = rng.gen_range(1..6u32);
            let coeffs: Vec<i64> = (0..=d).map(|_| rng.gen_range(-9..10)).collect();
            let p = uni(&coeffs);
            let m = rng.gen_range(0.5..2.0);
            let values: Vec<f64> = cheb_nodes(d, m).iter().map(|&c| p.eval_f64(c)).collect();
            let bound = stability_bound(&values, d).unwrap();
            let sup = (0..=10_000)
                .map(|i| p.eval_f64(-m + 2.0 * m * i as f64 / 10_000.0).abs())
                .fold(0.0f64, f64::max);
            assert!(sup <= bound * (1.0 + 1e-12), "sup {sup} > bound {bound}");
        }
    }

    #[test]
    fn monomial_conversion_examples() {
        let b2 = monomial_to_cheb(2);
        assert_eq!(b2.get(&0), Some(&rat(1, 2)));
        assert_eq!(b2.get(&2), Some(&rat(1, 2)));
        assert_eq!(b2.len(), 2);
        let b3 = monomial_to_cheb(3);
        assert_eq!(b3.get(&1), Some(&rat(3, 4)));
        assert_eq!(b3.get(&3), Some(&rat(1, 4)));
        let b1 = monomial_to_cheb(1);
        assert_eq!(b1.get(&1), Some(&rat_int(1)));
        // Leading coefficient: β_{r,r} = 2^{1−r} for r ≥ 1, so the leading
        // Chebyshev coefficient of t^{d+1} is 2^{−d}.
        for r in 1..=12u32 {
            let lead = monomial_to_cheb(r).get(&r).cloned().unwrap();
            assert_eq!(lead, Rat::new(BigInt::from(2), BigInt::from(1) << r as usize));
        }
    }

    #[test]
    fn basis_round_trip_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..30 {
            let deg = rng.gen_range(0..=30usize);
            let coeffs: Vec<Rat> = (0..=deg)
                .map(|_| rat(rng.gen_range(-20..21), rng.gen_range(1..9)))
                .collect();
            let p = UniPoly::from_coeffs(coeffs);
            let back = ChebExpansion::from_unipoly(&p).to_unipoly();
            assert_eq!(p, back);
        }
    }

    #[test]
    fn discrete_orthogonality() {
        // Σ_k T_i(ĉ_k)·T_j(ĉ_k) over the d+1 nodes of T_{d+1} is 0 for
        // i ≠ j, d+1 for i = j = 0, (d+1)/2 for i = j ≥ 1.
        for d in 0..=10u32 {
            let nodes = cheb_nodes(d, 1.0);
            for i in 0..=d {
                for j in 0..=d {
                    let s: f64 = nodes.iter().map(|&c| cheb_eval(i, c) * cheb_eval(j, c)).sum();
                    let expected = if i != j {
                        0.0
                    } else if i == 0 {
                        d as f64 + 1.0
                    } else {
                        (d as f64 + 1.0) / 2.0
                    };
                    assert!((s - expected).abs() < 1e-10, "d={d} i={i} j={j} s={s}");
                }
            }
        }
    }

    #[test]
    fn monic_extremal_bound() {
        // Every monic degree-d polynomial reaches 2^{1−d} somewhere on
        // [−1, 1]; 2^{1−d}·T_d attains it exactly.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..500 {
            let d = rng.gen_range(1..=8usize);
            let mut coeffs: Vec<Rat> =
                (0..d).map(|_| rat(rng.gen_range(-8..9), rng.gen_range(1..5))).collect();
            coeffs.push(Rat::one());
            let p = UniPoly::from_coeffs(coeffs);
            let sup = (0..=20_000)
                .map(|i| p.eval_f64(-1.0 + i as f64 / 10_000.0).abs())
                .fold(0.0f64, f64::max);
            let floor = (1.0 - d as f64).exp2();
            assert!(sup >= floor * (1.0 - 1e-9), "d={d} sup={sup} < {floor}");
        }
        // Equality witness.
        for d in 1..=8u32 {
            let extremal = cheb_unipoly(d).scale(&Rat::new(BigInt::from(2), BigInt::from(1) << d as usize));
            let sup = (0..=20_000)
                .map(|i| extremal.eval_f64(-1.0 + i as f64 / 10_000.0).abs())
                .fold(0.0f64, f64::max);
            assert!((sup - (1.0 - d as f64).exp2()).abs() < 1e-12);
        }
    }

    #[test]
    fn high_order_coefficients_are_small() {
        // If the truncated expansion (the Chebyshev-projection degree-d fit)
        // leaves sup residual ε on [−1, 1], every discarded coefficient obeys
        // |γ_k| ≤ √2·ε.
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..40 {
            let n = rng.gen_range(1..4usize);
            let terms: Vec<(Vec<u32>, Rat)> = (0..5)
                .map(|_| {
                    let e: Vec<u32> = (0..n).map(|_| rng.gen_range(0..3u32)).collect();
                    (e, rat(rng.gen_range(-6..7), rng.gen_range(1..4)))
                })
                .collect();
            let p = MultiPoly::from_terms(n, terms).unwrap();
            let a: Vec<Rat> = (0..n).map(|_| rat(rng.gen_range(-3..4), 2)).collect();
            let d = rng.gen_range(0..3u32);
            let exp = radial_cheb_coeffs(&p, &a, 3 * n as u32).unwrap();
            if exp.degree() <= d as usize {
                continue;
            }
            let resid = exp.to_unipoly().add(&exp.truncate(d).to_unipoly().scale(&-Rat::one()));
            let eps = (0..=4000)
                .map(|i| resid.eval_f64(-1.0 + i as f64 / 2000.0).abs())
                .fold(0.0f64, f64::max);
            for k in (d as usize + 1)..=exp.degree() {
                let g = rat_to_f64(&exp.coeff(k)).abs();
                assert!(g <= std::f64::consts::SQRT_2 * eps + 1e-12, "γ_{k}={g} ε={eps}");
            }
        }
    }

    #[test]
    fn radial_coeff_examples() {
        // p = x₁² along any direction a: q₀ = a₁²/2, q₂ = a₁²/2.
        let p = MultiPoly::from_terms(2, vec![(vec![2, 0], rat_int(1))]).unwrap();
        let a = vec![rat(3, 2), rat(7, 5)];
        let exp = radial_cheb_coeffs(&p, &a, 2).unwrap();
        assert_eq!(exp.coeff(0), rat(9, 8));
        assert_eq!(exp.coeff(1), rat_int(0));
        assert_eq!(exp.coeff(2), rat(9, 8));
        // Linear restriction: q_k = 0 for k ≥ 2.
        let lin = MultiPoly::from_terms(2, vec![(vec![1, 0], rat_int(4)), (vec![0, 1], rat(1, 3))])
            .unwrap();
        let exp = radial_cheb_coeffs(&lin, &a, 5).unwrap();
        assert!(exp.degree() <= 1);
        // Degree cap enforced.
        assert!(radial_cheb_coeffs(&p, &a, 1).is_err());
    }

    #[test]
    fn radial_reconstruction_matches_restriction() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let p = MultiPoly::from_terms(
            3,
            vec![
                (vec![2, 1, 0], rat(5, 3)),
                (vec![0, 0, 3], rat_int(-2)),
                (vec![1, 0, 0], rat(1, 7)),
            ],
        )
        .unwrap();
        let a: Vec<Rat> = (0..3).map(|_| rat(rng.gen_range(-4..5), 3)).collect();
        let exp = radial_cheb_coeffs(&p, &a, 3).unwrap();
        let af: Vec<f64> = a.iter().map(rat_to_f64).collect();
        for i in 0..100 {
            let t = -1.0 + i as f64 / 49.5;
            let direct = p.eval_f64(&[af[0] * t, af[1] * t, af[2] * t]);
            assert!((exp.eval_f64(t) - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn anticoncentration_examples() {
        // p = η·x: x = ±1 achieves η ≥ 2^{−2}·η.
        let eta = 0.25;
        let p = UniPoly::from_coeffs(vec![Rat::zero(), rat(1, 4)]);
        let (x, v) = anticoncentration_search(&p, eta, 1.0).unwrap();
        assert!(v >= anticoncentration_floor(1, eta, 1.0));
        assert!((v - eta).abs() < 1e-6 && x.abs() > 0.999);
        // p = 0.001·x²: grid finds the endpoints with value 0.001 ≥ 2^{−8}·0.001.
        let p = UniPoly::from_coeffs(vec![Rat::zero(), Rat::zero(), rat(1, 1000)]);
        let (_, v) = anticoncentration_search(&p, 0.001, 1.0).unwrap();
        assert!((v - 0.001).abs() < 1e-9);
        // Scaled cube: floor scales by m^d.
        let (_, v) = anticoncentration_search(&p, 0.001, 0.5).unwrap();
        assert!(v >= anticoncentration_floor(2, 0.001, 0.5));
        // Precondition violation.
        let small = UniPoly::from_coeffs(vec![rat_int(5), rat(1, 10_000)]);
        assert!(anticoncentration_search(&small, 0.5, 1.0).is_err());
    }

    #[test]
    fn anticoncentration_random_trials() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        for _ in 0..100 {
            let d = rng.gen_range(1..=8usize);
            let coeffs: Vec<Rat> = (0..=d)
                .map(|_| rat(rng.gen_range(-50..51), rng.gen_range(1..20)))
                .collect();
            let p = UniPoly::from_coeffs(coeffs);
            let eta = p
                .coeffs()
                .iter()
                .skip(1)
                .map(|c| rat_to_f64(&c.abs()))
                .fold(0.0f64, f64::max);
            if eta == 0.0 {
                continue;
            }
            anticoncentration_search(&p, eta * 0.999, 1.0).expect("floor must hold");
        }
    }

    #[test]
    fn isolating_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        // n=1, d=1: any y=(y₁) with y₁ ≥ 1 works; sampled vectors verify.
        let y = isolating_exponents(1, 1, &mut rng).unwrap();
        assert!(verify_isolating_exhaustive(&y, 1));
        // Hand-built y = (1, 3) for n=2, d=1: inner products in {±1,…,±4}.
        let y = vec![BigInt::from(1), BigInt::from(3)];
        assert!(verify_isolating_exhaustive(&y, 1));
        // A colliding vector fails: y = (1, 1) has z = (1, −1) with ⟨y,z⟩ = 0.
        let y = vec![BigInt::from(1), BigInt::from(1)];
        assert!(!verify_isolating_exhaustive(&y, 1));
        // Sampled vectors pass for the dimensions the testers use.
        for (n, d) in [(2, 1), (2, 2), (3, 2), (3, 3)] {
            let y = isolating_exponents(n, d, &mut rng).unwrap();
            assert_eq!(y.len(), n);
            assert!(verify_isolating_exhaustive(&y, d));
        }
    }

    #[test]
    fn extrapolation_exact_and_bounded() {
        // Exact degree-d node samples, η_in = 0: value exact, bound zero.
        let p = uni(&[2, -1, 3]);
        let nodes: Vec<(f64, f64)> = cheb_nodes(2, 0.5)
            .into_iter()
            .map(|c| (c, p.eval_f64(c)))
            .collect();
        let (v, bound) = extrapolate_radial(&nodes, 1.0, 2, 0.0).unwrap();
        assert!((v - p.eval_f64(1.0)).abs() < 1e-9);
        assert!(bound.is_zero());
        // d=1, r'=1, target 2, η=0.01: certified bound stays under the
        // looser (12·R/r')^d·η = 0.24 envelope.
        let nodes: Vec<(f64, f64)> = cheb_nodes(1, 1.0).into_iter().map(|c| (c, c)).collect();
        let (_, bound) = extrapolate_radial(&nodes, 2.0, 1, 0.01).unwrap();
        assert!(bound.to_f64() <= 0.24, "bound {}", bound.to_f64());
        // Wrong node count.
        assert!(extrapolate_radial(&nodes, 2.0, 2, 0.0).is_err());
    }

    #[test]
    fn extrapolation_bound_dominates_perturbations() {
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        for _ in 0..1000 {
            let d = rng.gen_range(1..5u32);
            let r_prime = rng.gen_range(0.2..1.0);
            let coeffs: Vec<i64> = (0..=d).map(|_| rng.gen_range(-5..6)).collect();
            let p = uni(&coeffs);
            let base: Vec<(f64, f64)> = cheb_nodes(d, r_prime)
                .into_iter()
                .map(|c| (c, p.eval_f64(c)))
                .collect();
            let eta = rng.gen_range(1e-6..1e-2);
            let noisy: Vec<(f64, f64)> = base
                .iter()
                .map(|&(c, v)| (c, v + rng.gen_range(-eta..eta)))
                .collect();
            let t = rng.gen_range(r_prime..3.0 * r_prime);
            let (v0, _) = extrapolate_radial(&base, t, d, 0.0).unwrap();
            let (v1, bound) = extrapolate_radial(&noisy, t, d, eta).unwrap();
            assert!(
                (v1 - v0).abs() <= bound.to_f64() * (1.0 + 1e-9),
                "shift {} > bound {}",
                (v1 - v0).abs(),
                bound.to_f64()
            );
        }
    }

    #[test]
    fn projection_recovers_polynomial_coefficients() {
        let p = uni(&[1, 0, -2, 4]);
        let exact = ChebExpansion::from_unipoly(&p);
        let approx = project_fn(|t| p.eval_f64(t), 3, 64);
        for k in 0..=3usize {
            assert!((approx[k] - rat_to_f64(&exact.coeff(k))).abs() < 1e-10);
        }
    }
}
