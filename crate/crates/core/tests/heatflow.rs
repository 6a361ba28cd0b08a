use blc_core::gaussian::solve_euler_lagrange;
use blc_core::heatflow::{certify_monotone, dissipation, evolve, geometric_times, FlowGrid, FlowProblem, Profile};
use blc_core::scalar::rational;
use blc_core::{Configuration, ExponentVector, Matrix, TolerancePolicy};

fn four_vectors() -> (Configuration, ExponentVector) {
    let a = Matrix::from_columns(2, &[vec![1., 0.], vec![0., 1.], vec![1., 1.], vec![1., -1.]]).unwrap();
    let c = Configuration::new(a, TolerancePolicy::default()).unwrap();
    let z = ExponentVector::from_rationals(vec![rational(3, 5), rational(1, 2), rational(9, 20), rational(9, 20)]);
    (c, z)
}

#[test]
fn asymmetric_flow_is_monotone_and_bounded_by_the_gaussian_constant() {
    let (c, z) = four_vectors();
    let tol = TolerancePolicy::default();
    let sol = solve_euler_lagrange(&c, &z, &tol).unwrap();
    let initial = vec![
        Profile::new(vec![-1.0, 0.0, 0.5], vec![1.0, 2.0]).unwrap(),
        Profile::indicator(-0.5, 1.5).unwrap(),
        Profile::sampled(-2.0, 2.0, 64, |y| 1.0 + y.sin()).unwrap(),
        Profile::new(vec![-1.0, -0.2, 0.3, 1.0], vec![0.5, 3.0, 1.0]).unwrap(),
    ];
    let p = FlowProblem::from_solution(&c, &z, &sol, initial, FlowGrid::from_policy(&tol)).unwrap();
    let trace = evolve(&p, &geometric_times(0.01, 100.0, 2)).unwrap();
    for (k, norms) in trace.norms.iter().enumerate() {
        for (a, b) in norms.iter().zip(&trace.initial_norms) {
            assert!((a - b).abs() <= 1e-6 * b, "t = {}: {a} vs {b}", trace.times[k]);
        }
    }
    let report = certify_monotone(&trace);
    assert!(report.monotone, "{report:?}");
    let ratios = trace.ratios();
    let last = *ratios.last().unwrap();
    assert!(last <= sol.d_value * (1.0 + 1e-6));
    assert!(last >= 0.99 * sol.d_value, "{last} vs {}", sol.d_value);
    for t in [0.05, 1.0] {
        let d = dissipation(&p, t, 300, 4).unwrap();
        assert!(d.samples > 0 && d.min_form >= -1e-9, "{d:?}");
    }
}
