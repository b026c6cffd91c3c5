//! Property tests for the arithmetic core: identities that must hold for all
//! inputs, exercised over randomized strategies.

use approx::assert_relative_eq;
use num_traits::Zero;
use proptest::prelude::*;

use lowdeg::difference::{alpha_coeffs, char_sum_exact};
use lowdeg::logmag::LogMag;
use lowdeg::poly::{lagrange_interpolate, rat, rat_from_f64, rat_to_f64, Rat};
use lowdeg::{FunctionOracle, MultiPoly};

fn small_rat() -> impl Strategy<Value = Rat> {
    (-20i64..=20, 1i64..=6).prop_map(|(p, q)| rat(p, q))
}

fn poly_of_degree(n: usize, d: u32) -> impl Strategy<Value = MultiPoly> {
    proptest::collection::vec(
        (
            proptest::collection::vec(0u32..=d, n),
            -9i64..=9,
            1i64..=4,
        ),
        1..5,
    )
    .prop_map(move |raw| {
        let terms = raw.into_iter().filter_map(|(mut e, p, q)| {
            // Clamp the exponent vector to total degree d.
            let mut left = d;
            for k in e.iter_mut() {
                *k = (*k).min(left);
                left -= *k;
            }
            Some((e, rat(p, q)))
        });
        MultiPoly::from_terms(n, terms).expect("valid exponents")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The difference coefficients α_i = (−1)^{i+1}·C(m, i) sum to zero —
    /// constants are annihilated.
    #[test]
    fn alpha_coefficients_sum_to_zero(m in 1u32..=10) {
        let coeffs = alpha_coeffs(m).unwrap();
        let total: num_bigint::BigInt = coeffs.alphas.iter().sum();
        prop_assert!(total.is_zero());
    }

    /// The characterization statistic vanishes identically on degree-≤d
    /// polynomials, at every rational (p, q) pair.
    #[test]
    fn char_sum_annihilates_low_degree(
        poly in poly_of_degree(2, 3),
        p in proptest::collection::vec(small_rat(), 2),
        q in proptest::collection::vec(small_rat(), 2),
    ) {
        let d = poly.total_degree().max(1);
        let f = FunctionOracle::poly_oracle(poly);
        prop_assert!(char_sum_exact(&f, &p, &q, d).unwrap().is_zero());
    }

    /// The polynomial JSON schema round-trips exactly.
    #[test]
    fn multipoly_json_roundtrip(poly in poly_of_degree(3, 4)) {
        let text = serde_json::to_string(&poly).unwrap();
        let back: MultiPoly = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, poly);
    }

    /// Finite floats embed into the rationals losslessly.
    #[test]
    fn rational_embedding_is_lossless(x in proptest::num::f64::NORMAL) {
        prop_assert_eq!(rat_to_f64(&rat_from_f64(x)), x);
    }

    /// The interpolant passes through its own nodes.
    #[test]
    fn lagrange_passes_through_nodes(
        ys in proptest::collection::vec(-50i64..=50, 4)
    ) {
        let nodes: Vec<(Rat, Rat)> = ys
            .iter()
            .enumerate()
            .map(|(i, y)| (rat(i as i64, 1), rat(*y, 3)))
            .collect();
        let p = lagrange_interpolate(&nodes).unwrap();
        for (x, y) in &nodes {
            prop_assert_eq!(p.eval_exact(x), y.clone());
            assert_relative_eq!(
                p.eval_f64(rat_to_f64(x)),
                rat_to_f64(y),
                max_relative = 1e-9,
                epsilon = 1e-9
            );
        }
    }

    /// Log-magnitude comparison agrees with f64 comparison wherever both are
    /// defined.
    #[test]
    fn logmag_orders_like_f64(a in 1e-300f64..1e300, b in 1e-300f64..1e300) {
        let (la, lb) = (LogMag::from_f64(a), LogMag::from_f64(b));
        prop_assert_eq!(la.partial_cmp(&lb), a.partial_cmp(&b));
    }
}
