//! Finite forward differences and the characterization test statistic.
//!
//! The m-th forward difference Δ_h^{(m)}[f](x) has the closed form
//! (−1)^{m+1}·Σ_{i=0}^{m} α_i·f(x + i·h) with α_i = (−1)^{i+1}·C(m, i).
//! Bounded functions whose (d+1)-st difference vanishes identically are
//! exactly the degree-d polynomials, which is the local characterization the
//! testers probe: the statistic Σ_{i=0}^{d+1} α_i·f(p + i·q) vanishes for
//! every degree-≤d polynomial and every p, q.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::Error;
use crate::oracle::FunctionOracle;
use crate::poly::Rat;
use crate::Result;

/// The signed binomial weights of an order-`m` forward difference.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffCoeffs {
    pub m: u32,
    /// α_0..α_m with α_i = (−1)^{i+1}·C(m, i). Σ α_i = 0 for m ≥ 1.
    pub alphas: Vec<BigInt>,
}

/// Exact binomial coefficient C(m, i).
fn binomial(m: u32, i: u32) -> BigInt {
    let mut acc = BigInt::from(1);
    for k in 0..i.min(m - i) {
        acc = acc * BigInt::from(m - k) / BigInt::from(k + 1);
    }
    acc
}

/// α_i = (−1)^{i+1}·C(m, i) for i = 0..m. Order 0 is rejected.
pub fn alpha_coeffs(m: u32) -> Result<DiffCoeffs> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "order-0 finite difference is undefined".into(),
        ));
    }
    let alphas = (0..=m)
        .map(|i| {
            let b = binomial(m, i);
            if i % 2 == 0 {
                -b
            } else {
                b
            }
        })
        .collect();
    Ok(DiffCoeffs { m, alphas })
}

/// The α_i as exactly-representable floats (binomials up to the degrees in
/// play fit in f64 with no rounding).
pub fn alpha_coeffs_f64(m: u32) -> Result<Vec<f64>> {
    Ok(alpha_coeffs(m)?
        .alphas
        .iter()
        .map(|a| a.to_f64().expect("small binomial"))
        .collect())
}

/// Characterization statistic Σ_{i=0}^{d+1} α_i·f(p + i·q), queried in
/// floating point. Makes exactly d+2 oracle queries.
pub fn char_sum(f: &FunctionOracle, p: &[f64], q: &[f64], d: u32) -> Result<f64> {
    Ok(char_sum_detailed(f, p, q, d)?.0)
}

/// As [`char_sum`], additionally returning Σ|α_i·f(p+iq)| — the magnitude a
/// tolerant zero-test should scale against.
pub fn char_sum_detailed(f: &FunctionOracle, p: &[f64], q: &[f64], d: u32) -> Result<(f64, f64)> {
    let alphas = alpha_coeffs_f64(d + 1)?;
    let mut sum = 0.0;
    let mut scale = 0.0;
    for (i, a) in alphas.iter().enumerate() {
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

/// Exact-rational characterization statistic; requires an oracle with an
/// exact path. Makes exactly d+2 oracle queries.
pub fn char_sum_exact(f: &FunctionOracle, p: &[Rat], q: &[Rat], d: u32) -> Result<Rat> {
    let coeffs = alpha_coeffs(d + 1)?;
    let mut sum = Rat::zero();
    for (i, a) in coeffs.alphas.iter().enumerate() {
        let i_rat = crate::poly::rat_int(i as i64);
        let point: Vec<Rat> = p
            .iter()
            .zip(q)
            .map(|(pj, qj)| pj + &i_rat * qj)
            .collect();
        sum += Rat::from_integer(a.clone()) * f.eval_exact(&point)?;
    }
    Ok(sum)
}

/// Δ_h^{(m)}[f](x) for a univariate oracle, via the closed-form α-sum
/// (m+1 queries). Sign convention: Δ_h^{(m)} = (−1)^{m+1}·Σ α_i f(x+ih),
/// matching the inductive definition Δ_h[f](x) = f(x+h) − f(x).
pub fn forward_diff(f: &FunctionOracle, x: f64, h: f64, m: u32) -> Result<f64> {
    if f.n() != 1 {
        return Err(Error::InvalidParameter(
            "forward_diff expects a univariate oracle".into(),
        ));
    }
    let alphas = alpha_coeffs_f64(m)?;
    let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
    let mut sum = 0.0;
    for (i, a) in alphas.iter().enumerate() {
        sum += a * f.eval(&[x + i as f64 * h]);
    }
    Ok(sign * sum)
}

/// The discrete differential D_t[f](x) = Σ_{S⊆[k]} (−1)^{|S|}·f(x + t_S)
/// with t_S = Σ_{j∈S} t_j. For t = h·𝟙 of length m this collapses to
/// Σ_i (−1)^i·C(m,i)·f(x+ih) = (−1)^m·Δ_h^{(m)}[f](x) (check m = 1:
/// D = f(x) − f(x+h) = −Δ_h[f](x)).
pub fn discrete_differential(f: &FunctionOracle, x: f64, t: &[f64]) -> Result<f64> {
    if t.is_empty() {
        return Err(Error::Degenerate("empty step vector".into()));
    }
    if t.iter().any(|&tj| tj == 0.0) {
        return Err(Error::InvalidParameter("all steps must be nonzero".into()));
    }
    if f.n() != 1 {
        return Err(Error::InvalidParameter(
            "discrete_differential expects a univariate oracle".into(),
        ));
    }
    let k = t.len();
    let mut sum = 0.0;
    for mask in 0u32..(1u32 << k) {
        let t_s: f64 = (0..k).filter(|j| mask >> j & 1 == 1).map(|j| t[j]).sum();
        let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * f.eval(&[x + t_s]);
    }
    Ok(sum)
}
