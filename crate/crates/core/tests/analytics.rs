use proptest::prelude::*;

use setcount::asymptotics::{
    class_constants, constant_above, estimate, recipe_constants, solve_supercritical, solve_zeta, ClassScalars,
    Regime,
};
use setcount::species::{builtin, synthetic, BUILTIN_NAMES};

#[test]
fn solved_scalars_have_small_residuals() {
    for name in BUILTIN_NAMES {
        let class = builtin(name).unwrap();
        let spec = class.block_spec().unwrap();
        let zeta = solve_zeta(spec).unwrap();
        assert!((zeta * spec.b2(zeta) - 1.0).abs() < 1e-10, "{name}");
        let ls = recipe_constants(&class).unwrap().lambda_star;
        for i in 1..10 {
            let lambda = ls + (1.0 - ls) * i as f64 / 10.0;
            let p = solve_supercritical(&class, lambda).unwrap();
            let y = p.y_lambda;
            assert!((1.0 - spec.b1(y) + spec.b(y) / y - lambda).abs() < 1e-10, "{name} {lambda}");
            assert!((y * (-spec.b1(y)).exp() - p.x_lambda).abs() < 1e-10);
            // the tuning point has mean component size 1/λ
            let m = ClassScalars::new(&class).unwrap().moments(p.x_lambda).unwrap();
            assert!((m.mean() - 1.0 / lambda).abs() < 1e-9, "{name} {lambda}");
            assert!((m.s0 - p.c_x_lambda).abs() < 1e-10);
        }
    }
}

#[test]
fn series_route_agrees_with_block_route() {
    // cacti through an explicit coefficient list with its growth data
    let cacti = builtin("cacti").unwrap();
    let listed = setcount::species::from_json_str(
        &serde_json::to_string(&cacti.export(400).unwrap()).unwrap(),
    )
    .unwrap();
    let a = class_constants(&cacti).unwrap();
    let b = class_constants(&listed).unwrap();
    // at ρ the list route sums a first-order model tail beyond n = 400,
    // whose relative error there is about 1e-3
    assert!((a.lambda_star - b.lambda_star).abs() < 2e-5, "{} vs {}", a.lambda_star, b.lambda_star);
    assert!((a.c_rho - b.c_rho).abs() < 2e-5);
    let p = solve_supercritical(&cacti, 0.8).unwrap();
    let q = solve_supercritical(&listed, 0.8).unwrap();
    assert!((p.x_lambda - q.x_lambda).abs() < 1e-9);
    assert!((p.sigma2 - q.sigma2).abs() < 1e-6 * p.sigma2);
}

#[test]
fn alpha_three_threshold_is_finite() {
    let s = synthetic(1.0, 0.5, 3.0).unwrap();
    let k = class_constants(&s).unwrap();
    let m = ClassScalars::new(&s).unwrap().moments(0.5).unwrap();
    assert!(m.variance().is_finite() && m.variance() > 0.0);
    assert!(constant_above(&s, k.lambda_star).unwrap().is_finite());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn estimate_is_sum_of_factors(n in 4u64..5000, lambda in 0.05f64..0.99, which in 0usize..3) {
        let class = builtin(BUILTIN_NAMES[which]).unwrap();
        if let Ok(e) = estimate(&class, n, lambda) {
            let f = e.factors;
            let sum = f.log_constant + f.n_power_log + f.log_power_log + f.log_rho_inv_n + f.n_log_h
                + f.log_factorial_ratio;
            prop_assert_eq!(e.log_count, sum);
            prop_assert!(e.log_count.is_finite());
            let ls = class_constants(&class).unwrap().lambda_star;
            prop_assert_eq!(e.regime == Regime::Below, lambda < ls);
        }
    }

    #[test]
    fn mean_size_is_monotone(i in 1u32..200, which in 0usize..3) {
        let class = builtin(BUILTIN_NAMES[which]).unwrap();
        let sc = ClassScalars::new(&class).unwrap();
        let rho = sc.rho();
        let a = sc.moments(rho * i as f64 / 200.0).unwrap().mean();
        let b = sc.moments(rho * (i as f64 + 0.5) / 200.0).unwrap().mean();
        prop_assert!(b > a);
    }
}
