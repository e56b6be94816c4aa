use proptest::prelude::*;
use rug::{Float, Rational};

use setcount::powerseries::{self, SeriesExact, DEFAULT_PRECISION_BITS};
use setcount::species::{builtin, BlockKind, BlockSpec};

fn series_from(nums: &[i32], zero_constant: bool) -> SeriesExact {
    let coeffs = nums
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if i == 0 && zero_constant {
                Rational::new()
            } else {
                Rational::from((v, 1 + (i as u32 % 3)))
            }
        })
        .collect();
    SeriesExact::from_rationals(coeffs)
}

fn small_series(zero_constant: bool) -> impl Strategy<Value = SeriesExact> {
    prop::collection::vec(-4i32..=4, 1..=13).prop_map(move |v| series_from(&v, zero_constant))
}

/// Non-negative coefficients, as for every EGF the toolkit handles; relative
/// agreement is meaningless under cancellation.
fn counting_series(zero_constant: bool) -> impl Strategy<Value = SeriesExact> {
    prop::collection::vec(0i32..=4, 1..=13).prop_map(move |v| series_from(&v, zero_constant))
}

/// `Σ uⁿ/n!` through order `t`.
fn exp_of_u(t: usize) -> SeriesExact {
    let mut coeffs = vec![Rational::from(1)];
    let mut f = Rational::from(1);
    for n in 1..=t {
        f /= n as u32;
        coeffs.push(f.clone());
    }
    SeriesExact::from_rationals(coeffs)
}

/// Relative agreement to `2^{-prec/2}`.
fn close(a: &Float, b: &Rational, prec: u32) -> bool {
    let b = Float::with_val(prec, b);
    let diff = Float::with_val(prec, a - &b).abs();
    let scale = Float::with_val(prec, b.abs_ref()).max(&Float::with_val(prec, 1e-300));
    diff <= scale * Float::with_val(prec, Float::i_exp(1, -((prec / 2) as i32)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exp_equals_composition_with_exponential(g in small_series(true), t in 0usize..=12) {
        let direct = powerseries::exp(&g, t).unwrap();
        let composed = powerseries::compose(&exp_of_u(t), &g, t).unwrap();
        prop_assert_eq!(direct.coeffs(), composed.coeffs());
    }

    #[test]
    fn pow_equals_repeated_product(a in small_series(false), m in 0u64..=5, t in 0usize..=12) {
        let mut acc = SeriesExact::one(t, ());
        for _ in 0..m {
            acc = powerseries::mul(&acc, &a, t);
        }
        let p = powerseries::pow(&a, m, t);
        prop_assert_eq!(p.coeffs(), acc.coeffs());
    }

    #[test]
    fn float_flavor_tracks_exact(a in counting_series(false), g in counting_series(true), t in 0usize..=12) {
        let prec = DEFAULT_PRECISION_BITS;
        let (af, gf) = (a.to_float(prec), g.to_float(prec));
        let prod_e = powerseries::mul(&a, &g, t);
        let prod_f = powerseries::mul(&af, &gf, t);
        let exp_e = powerseries::exp(&g, t).unwrap();
        let exp_f = powerseries::exp(&gf, t).unwrap();
        let comp_e = powerseries::compose(&a, &g, t).unwrap();
        let comp_f = powerseries::compose(&af, &gf, t).unwrap();
        for n in 0..=t {
            prop_assert!(close(&prod_f.coeff(n), &prod_e.coeff(n), prec));
            prop_assert!(close(&exp_f.coeff(n), &exp_e.coeff(n), prec));
            prop_assert!(close(&comp_f.coeff(n), &comp_e.coeff(n), prec));
        }
    }
}

#[test]
fn float_fixed_point_tracks_exact_to_order_200() {
    let prec = DEFAULT_PRECISION_BITS;
    let spec = builtin("cacti").unwrap().block_spec().unwrap().clone();
    let t = 200;
    let exact = powerseries::solve_block_fixed_point(&spec.bprime_series_exact(t), t).unwrap();
    let float = powerseries::solve_block_fixed_point(&spec.bprime_series_float(t, prec), t).unwrap();
    for n in 0..=t {
        assert!(close(&float.coeff(n), &exact.coeff(n), prec), "n = {n}");
    }
}

#[test]
fn block_route_equals_fixed_point_route() {
    let specs = [
        BlockSpec::new(BlockKind::Edges).unwrap(),
        BlockSpec::new(BlockKind::EdgesAndCycles).unwrap(),
        BlockSpec::new(BlockKind::Complete).unwrap(),
        BlockSpec::new(BlockKind::Finite(vec![1.into(), 1.into(), 10.into()])).unwrap(),
    ];
    let t = 30;
    for spec in specs {
        let y = powerseries::solve_block_fixed_point(&spec.bprime_series_exact(t), t).unwrap();
        // cross-checks every coefficient internally and errors on mismatch
        let c = powerseries::c_series_from_blocks(&y, &spec.b_series_exact(t), &spec.bprime_series_exact(t), t)
            .unwrap();
        assert_eq!(c.coeffs(), powerseries::egf_from_y(&y).coeffs());
    }
}
