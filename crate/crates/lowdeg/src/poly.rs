//! Exact multivariate and univariate polynomial arithmetic over the rationals.
//!
//! Coefficients are arbitrary-precision rationals so that evaluation at
//! rational points is exact — the exact and discrete testers depend on exact
//! equality. Evaluation at floating-point arguments goes through a cached
//! float view of the coefficients and promotes to `f64` at the last step.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::Result;

/// Exact rational scalar.
pub type Rat = BigRational;

/// Exact conversion of a finite `f64` into a rational (every finite float is
/// a dyadic rational).
pub fn rat_from_f64(v: f64) -> Rat {
    Rat::from_float(v).expect("finite float")
}

/// Exact conversion of a float vector.
pub fn rat_point(x: &[f64]) -> Vec<Rat> {
    x.iter().map(|&v| rat_from_f64(v)).collect()
}

/// Lossy conversion back to `f64`.
pub fn rat_to_f64(v: &Rat) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Rational from an integer.
pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Rational p/q from integers.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

// ---------------------------------------------------------------------------
// MultiPoly
// ---------------------------------------------------------------------------

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Invariants: no stored zero coefficients; every exponent vector has length
/// `n`; the total degree is the maximum 1-norm of a stored exponent vector
/// (0 for the zero polynomial). Immutable after construction.
#[derive(Clone, Debug)]
pub struct MultiPoly {
    n: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
    /// Float view of the terms, precomputed so that `eval_f64` does not touch
    /// bignum arithmetic.
    fterms: Vec<(Vec<u32>, f64)>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.terms == other.terms
    }
}

impl MultiPoly {
    /// The zero polynomial in `n` variables.
    pub fn zero(n: usize) -> MultiPoly {
        MultiPoly {
            n,
            terms: BTreeMap::new(),
            fterms: Vec::new(),
        }
    }

    /// Constant polynomial.
    pub fn constant(n: usize, c: Rat) -> MultiPoly {
        Self::from_terms(n, [(vec![0u32; n], c)]).expect("well-formed constant")
    }

    /// Build from (exponent vector, coefficient) pairs; zero coefficients are
    /// dropped, duplicate exponents are summed.
    pub fn from_terms(
        n: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, Rat)>,
    ) -> Result<MultiPoly> {
        let mut map: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        for (exp, coeff) in terms {
            if exp.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "exponent vector of length {} in a {}-variable polynomial",
                    exp.len(),
                    n
                )));
            }
            let entry = map.entry(exp).or_insert_with(Rat::zero);
            *entry += coeff;
        }
        map.retain(|_, c| !c.is_zero());
        let fterms = map
            .iter()
            .map(|(e, c)| (e.clone(), rat_to_f64(c)))
            .collect();
        Ok(MultiPoly {
            n,
            terms: map,
            fterms,
        })
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        self.n
    }

    /// The stored (exponent, coefficient) map.
    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rat> {
        &self.terms
    }

    /// Maximum 1-norm of a stored exponent vector; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Exact evaluation at a rational point.
    pub fn eval_exact(&self, x: &[Rat]) -> Rat {
        assert_eq!(x.len(), self.n, "point dimension mismatch");
        // Per-variable power tables keep bignum multiplications linear in the
        // degree rather than quadratic.
        let mut max_exp = vec![0u32; self.n];
        for e in self.terms.keys() {
            for (m, &v) in max_exp.iter_mut().zip(e) {
                *m = (*m).max(v);
            }
        }
        let pow_tables: Vec<Vec<Rat>> = (0..self.n)
            .map(|j| {
                let mut tbl = Vec::with_capacity(max_exp[j] as usize + 1);
                tbl.push(Rat::one());
                for k in 1..=max_exp[j] as usize {
                    let next = &tbl[k - 1] * &x[j];
                    tbl.push(next);
                }
                tbl
            })
            .collect();
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (j, &k) in e.iter().enumerate() {
                if k > 0 {
                    term *= &pow_tables[j][k as usize];
                }
            }
            acc += term;
        }
        acc
    }

    /// Floating-point evaluation (promotes to `f64` at the last step).
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n);
        let mut acc = 0.0f64;
        for (e, c) in &self.fterms {
            let mut term = *c;
            for (j, &k) in e.iter().enumerate() {
                if k > 0 {
                    term *= x[j].powi(k as i32);
                }
            }
            acc += term;
        }
        acc
    }

    /// Restriction to the line t ↦ a + t·b, as an exact univariate polynomial.
    pub fn restrict_to_line(&self, a: &[Rat], b: &[Rat]) -> UniPoly {
        assert_eq!(a.len(), self.n);
        assert_eq!(b.len(), self.n);
        let mut acc = UniPoly::zero();
        for (e, c) in &self.terms {
            let mut term = UniPoly::from_coeffs(vec![c.clone()]);
            for (j, &k) in e.iter().enumerate() {
                if k > 0 {
                    let line = UniPoly::from_coeffs(vec![a[j].clone(), b[j].clone()]);
                    for _ in 0..k {
                        term = term.mul(&line);
                    }
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Truncation to total degree `d`: retains exactly the terms with
    /// ‖exponent‖₁ ≤ d. Idempotent.
    pub fn truncate(&self, d: u32) -> MultiPoly {
        let kept = self
            .terms
            .iter()
            .filter(|(e, _)| e.iter().sum::<u32>() <= d)
            .map(|(e, c)| (e.clone(), c.clone()));
        MultiPoly::from_terms(self.n, kept).expect("subset of a valid polynomial")
    }

    /// Sum of |coefficients| over terms of total degree > d — the certified
    /// sup bound for |p − p^{≤d}| on [−1,1]ⁿ.
    pub fn tail_coeff_mass(&self, d: u32) -> Rat {
        self.terms
            .iter()
            .filter(|(e, _)| e.iter().sum::<u32>() > d)
            .map(|(_, c)| c.abs())
            .sum()
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: Vec<u32>,
    num: String,
    den: String,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    n: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = PolyRepr {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRepr {
                    exp: e.clone(),
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for t in repr.terms {
            let num = BigInt::from_str(&t.num).map_err(D::Error::custom)?;
            let den = BigInt::from_str(&t.den).map_err(D::Error::custom)?;
            if den.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            terms.push((t.exp, Rat::new(num, den)));
        }
        MultiPoly::from_terms(repr.n, terms).map_err(D::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// UniPoly
// ---------------------------------------------------------------------------

/// Dense univariate polynomial c₀ + c₁x + … with exact rational coefficients.
///
/// Invariant: the leading coefficient is nonzero unless this is the zero
/// polynomial (empty coefficient vector).
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn zero() -> UniPoly {
        UniPoly { coeffs: Vec::new() }
    }

    /// Build from c₀..c_k; trailing zeros are trimmed.
    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> UniPoly {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Coefficient of x^k (zero beyond the stored degree).
    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn eval_exact(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rat_to_f64(c);
        }
        acc
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(len);
        for k in 0..len {
            out.push(self.coeff(k) + other.coeff(k));
        }
        UniPoly::from_coeffs(out)
    }

    pub fn scale(&self, c: &Rat) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(out)
    }
}

/// Exact Lagrange interpolation: the unique polynomial of degree < #nodes
/// through all `(x, y)` pairs. Errors on duplicate abscissae.
pub fn lagrange_interpolate(nodes: &[(Rat, Rat)]) -> Result<UniPoly> {
    if nodes.is_empty() {
        return Err(Error::Degenerate("no interpolation nodes".into()));
    }
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if nodes[i].0 == nodes[j].0 {
                return Err(Error::Degenerate(format!(
                    "duplicate interpolation abscissa {}",
                    nodes[i].0
                )));
            }
        }
    }
    let mut acc = UniPoly::zero();
    for (i, (xi, yi)) in nodes.iter().enumerate() {
        // ℓ_i(x) = Π_{j≠i} (x − x_j)/(x_i − x_j), scaled by y_i.
        let mut basis = UniPoly::from_coeffs(vec![Rat::one()]);
        let mut denom = Rat::one();
        for (j, (xj, _)) in nodes.iter().enumerate() {
            if j != i {
                basis = basis.mul(&UniPoly::from_coeffs(vec![-xj.clone(), Rat::one()]));
                denom *= xi - xj;
            }
        }
        acc = acc.add(&basis.scale(&(yi / denom)));
    }
    Ok(acc)
}

/// Floating-point Lagrange evaluation at `t`, returning `(value, scale)`
/// where `scale = Σ|ℓ_i(t)·v_i|` — the conditioning mass a tolerant
/// comparison should absorb.
pub fn lagrange_eval_f64(nodes: &[(f64, f64)], t: f64) -> Result<(f64, f64)> {
    if nodes.is_empty() {
        return Err(Error::Degenerate("no interpolation nodes".into()));
    }
    let mut value = 0.0;
    let mut scale = 0.0;
    for (i, (xi, vi)) in nodes.iter().enumerate() {
        let mut li = 1.0;
        for (j, (xj, _)) in nodes.iter().enumerate() {
            if j != i {
                let denom = xi - xj;
                if denom == 0.0 {
                    return Err(Error::Degenerate("duplicate interpolation abscissa".into()));
                }
                li *= (t - xj) / denom;
            }
        }
        value += li * vi;
        scale += (li * vi).abs();
    }
    Ok((value, scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn p_x1x2() -> MultiPoly {
        // x₁·x₂ in two variables.
        MultiPoly::from_terms(2, [(vec![1, 1], rat_int(1))]).unwrap()
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let p = MultiPoly::from_terms(2, [(vec![1, 0], rat_int(0)), (vec![0, 1], rat_int(2))])
            .unwrap();
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.total_degree(), 1);
        assert_eq!(MultiPoly::zero(3).total_degree(), 0);
    }

    #[test]
    fn exact_and_float_eval_agree_on_small_points() {
        let p = MultiPoly::from_terms(
            2,
            [
                (vec![2, 0], rat(3, 2)),
                (vec![0, 1], rat_int(-1)),
                (vec![0, 0], rat_int(5)),
            ],
        )
        .unwrap();
        let x = [rat(1, 2), rat_int(3)];
        let exact = p.eval_exact(&x);
        // 3/2·(1/4) − 3 + 5 = 3/8 + 2 = 19/8
        assert_eq!(exact, rat(19, 8));
        let xf = [0.5, 3.0];
        assert!((p.eval_f64(&xf) - 19.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn restrict_to_line_examples() {
        // p = x₁x₂, a=(0,0), b=(1,1) → x².
        let r = p_x1x2().restrict_to_line(&[rat_int(0), rat_int(0)], &[rat_int(1), rat_int(1)]);
        assert_eq!(
            r,
            UniPoly::from_coeffs(vec![rat_int(0), rat_int(0), rat_int(1)])
        );
        // p = x₁² + x₂, a=(1,0), b=(0,1) → 1 + x.
        let p = MultiPoly::from_terms(2, [(vec![2, 0], rat_int(1)), (vec![0, 1], rat_int(1))])
            .unwrap();
        let r = p.restrict_to_line(&[rat_int(1), rat_int(0)], &[rat_int(0), rat_int(1)]);
        assert_eq!(r, UniPoly::from_coeffs(vec![rat_int(1), rat_int(1)]));
        // Constant restricts to itself.
        let c = MultiPoly::constant(2, rat(7, 3));
        let r = c.restrict_to_line(&[rat_int(4), rat_int(5)], &[rat_int(1), rat_int(2)]);
        assert_eq!(r, UniPoly::from_coeffs(vec![rat(7, 3)]));
    }

    #[test]
    fn restriction_evaluates_like_substitution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let p = MultiPoly::from_terms(
                3,
                (0..4).map(|_| {
                    let exp: Vec<u32> = (0..3).map(|_| rng.gen_range(0..3)).collect();
                    (exp, rat(rng.gen_range(-9..10), rng.gen_range(1..7)))
                }),
            )
            .unwrap();
            let a: Vec<Rat> = (0..3).map(|_| rat(rng.gen_range(-5..6), 3)).collect();
            let b: Vec<Rat> = (0..3).map(|_| rat(rng.gen_range(-5..6), 2)).collect();
            let t = rat(rng.gen_range(-7..8), 5);
            let point: Vec<Rat> = a
                .iter()
                .zip(&b)
                .map(|(ai, bi)| ai + &t * bi)
                .collect();
            assert_eq!(p.restrict_to_line(&a, &b).eval_exact(&t), p.eval_exact(&point));
        }
    }

    #[test]
    fn truncate_examples() {
        // p = 3x₁² + x₂, d=1 → x₂.
        let p = MultiPoly::from_terms(2, [(vec![2, 0], rat_int(3)), (vec![0, 1], rat_int(1))])
            .unwrap();
        let t = p.truncate(1);
        assert_eq!(
            t,
            MultiPoly::from_terms(2, [(vec![0, 1], rat_int(1))]).unwrap()
        );
        // p = x₁x₂x₃ unchanged at d=3.
        let p = MultiPoly::from_terms(3, [(vec![1, 1, 1], rat_int(1))]).unwrap();
        assert_eq!(p.truncate(3), p);
        // Idempotence and restriction degree bound.
        assert_eq!(t.truncate(1), t);
    }

    #[test]
    fn truncation_tail_bound_on_unit_cube() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = MultiPoly::from_terms(
            2,
            (0..6).map(|_| {
                let exp: Vec<u32> = (0..2).map(|_| rng.gen_range(0..4)).collect();
                (exp, rat(rng.gen_range(-9..10), rng.gen_range(1..5)))
            }),
        )
        .unwrap();
        let d = 2;
        let bound = rat_to_f64(&p.tail_coeff_mass(d));
        let trunc = p.truncate(d);
        for _ in 0..2000 {
            let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert!((p.eval_f64(&x) - trunc.eval_f64(&x)).abs() <= bound + 1e-9);
        }
    }

    #[test]
    fn lagrange_examples() {
        // {(0,1),(1,2)} → 1 + x.
        let p = lagrange_interpolate(&[(rat_int(0), rat_int(1)), (rat_int(1), rat_int(2))]).unwrap();
        assert_eq!(p, UniPoly::from_coeffs(vec![rat_int(1), rat_int(1)]));
        // {(0,0),(1,1),(2,4)} → x².
        let p = lagrange_interpolate(&[
            (rat_int(0), rat_int(0)),
            (rat_int(1), rat_int(1)),
            (rat_int(2), rat_int(4)),
        ])
        .unwrap();
        assert_eq!(
            p,
            UniPoly::from_coeffs(vec![rat_int(0), rat_int(0), rat_int(1)])
        );
        // Duplicate abscissae rejected.
        assert!(lagrange_interpolate(&[(rat_int(1), rat_int(0)), (rat_int(1), rat_int(1))]).is_err());
    }

    #[test]
    fn lagrange_reproduces_sampled_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let d = rng.gen_range(0..5usize);
            let p = UniPoly::from_coeffs(
                (0..=d).map(|_| rat(rng.gen_range(-9..10), rng.gen_range(1..4))).collect(),
            );
            let nodes: Vec<(Rat, Rat)> = (0..=d as i64)
                .map(|k| {
                    let x = rat(k - 2, 1);
                    let y = p.eval_exact(&x);
                    (x, y)
                })
                .collect();
            assert_eq!(lagrange_interpolate(&nodes).unwrap(), p);
        }
    }

    #[test]
    fn json_round_trip_matches_schema() {
        let p = MultiPoly::from_terms(2, [(vec![2, 0], rat(3, 7)), (vec![0, 1], rat_int(-2))])
            .unwrap();
        let json = serde_json::to_value(&p).unwrap();
        assert_eq!(json["n"], 2);
        assert_eq!(json["terms"][1]["exp"], serde_json::json!([2, 0]));
        assert_eq!(json["terms"][1]["num"], "3");
        assert_eq!(json["terms"][1]["den"], "7");
        let back: MultiPoly = serde_json::from_value(json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn float_lagrange_matches_exact_on_benign_nodes() {
        let nodes = [(0.0, 1.0), (1.0, 2.0), (2.0, 5.0)];
        let (v, scale) = lagrange_eval_f64(&nodes, 3.0).unwrap();
        // Through (0,1),(1,2),(2,5): x²+1 → 10 at x=3.
        assert!((v - 10.0).abs() < 1e-12);
        assert!(scale >= v.abs());
    }
}
