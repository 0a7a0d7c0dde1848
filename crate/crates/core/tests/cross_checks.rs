//! Cross-module consistency checks: solver witnesses against independent
//! POVM validation, entropic relations across the state and table paths,
//! and agreement between the moment-matrix and compatibility thresholds.

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use povmkit_core::{
    joint_table, measured_conditional_entropy, memory_bound, moments, noisy_spin, positivity_threshold,
    sharp_spin, solve_feasibility, threshold, validate, Axis, ComplexMat, DensityOp,
    GrandPovmProblem, HermitianOp, SolveConfig, ThresholdMode, Verdict, Xoshiro256StarStar,
};

fn random_axis(rng: &mut Xoshiro256StarStar) -> Axis {
    loop {
        let v = [
            rng.next_f64() * 2.0 - 1.0,
            rng.next_f64() * 2.0 - 1.0,
            rng.next_f64() * 2.0 - 1.0,
        ];
        if let Ok(axis) = Axis::new(v[0], v[1], v[2]) {
            return axis;
        }
    }
}

fn random_two_qubit_state(rng: &mut Xoshiro256StarStar) -> DensityOp {
    let mut m = ComplexMat::zeros(4);
    for i in 0..4 {
        m.set(i, i, Complex64::new(rng.next_f64(), 0.0));
        for j in (i + 1)..4 {
            let z = Complex64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5);
            m.set(i, j, z);
            m.set(j, i, z.conj());
        }
    }
    let h = HermitianOp::new(m).unwrap();
    // H² is PSD; normalize to unit trace.
    let sq = h.mul(h.mat());
    let trace = sq.trace().re;
    DensityOp::new(HermitianOp::new(sq.scale(1.0 / trace)).unwrap()).unwrap()
}

#[test]
fn feasible_witnesses_pass_independent_validation() {
    // Random unbiased pairs with unsharpness safely inside the analytic
    // compatibility region must produce witnesses that survive POVM
    // validation and marginal checks computed outside the solver.
    let mut rng = Xoshiro256StarStar::from_seed(7);
    let cfg = SolveConfig::default();
    for _ in 0..25 {
        let n1 = random_axis(&mut rng);
        let n2 = random_axis(&mut rng);
        let u1 = n1.unit();
        let u2 = n2.unit();
        let norm = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let eta_star = 2.0
            / (norm([u1[0] + u2[0], u1[1] + u2[1], u1[2] + u2[2]])
                + norm([u1[0] - u2[0], u1[1] - u2[1], u1[2] - u2[2]]));
        let eta = (eta_star - 5e-3) * rng.next_f64();
        let targets = vec![noisy_spin(&n1, eta).unwrap(), noisy_spin(&n2, eta).unwrap()];
        let problem = GrandPovmProblem::new(targets.clone()).unwrap();
        let report = solve_feasibility(&problem, &cfg);
        assert_eq!(report.verdict, Verdict::Feasible, "eta = {eta}");

        let witness = report.witness.expect("feasible carries witness");
        assert!(witness.max_marginal_error(&targets).unwrap() <= 1e-7);
        let as_povm = witness.to_povm().unwrap();
        let validation = validate(&as_povm);
        assert!(validation.ok, "witness failed validation: {validation:?}");
        for effect in witness.effects() {
            assert!(effect.is_valid(1e-8));
        }
    }
}

#[test]
fn shannon_conditional_entropy_dominates_quantum() {
    // H(X|X') from any joint table is at least the measured conditional
    // entropy S(𝔼_X|B) of the same Alice observable.
    let mut rng = Xoshiro256StarStar::from_seed(40);
    for _ in 0..15 {
        let rho = random_two_qubit_state(&mut rng);
        let alice = noisy_spin(&random_axis(&mut rng), 0.3 + 0.7 * rng.next_f64()).unwrap();
        let bob = noisy_spin(&random_axis(&mut rng), rng.next_f64()).unwrap();
        let shannon = joint_table(&rho, &alice, &bob)
            .unwrap()
            .conditional_entropy_given_b();
        let quantum = measured_conditional_entropy(&rho, &alice).unwrap();
        assert!(
            shannon >= quantum - 1e-9,
            "H = {shannon} < S = {quantum}"
        );
    }
}

#[test]
fn measured_entropy_sum_respects_memory_bound() {
    // The memory-assisted relation holds on random states with the
    // sharp mutually unbiased pair.
    let mut rng = Xoshiro256StarStar::from_seed(61);
    let px = sharp_spin(&Axis::x());
    let pz = sharp_spin(&Axis::z());
    for _ in 0..15 {
        let rho = random_two_qubit_state(&mut rng);
        let lhs = measured_conditional_entropy(&rho, &px).unwrap()
            + measured_conditional_entropy(&rho, &pz).unwrap();
        let bound = memory_bound(&rho, &px, &pz).unwrap();
        assert!(lhs >= bound - 1e-9, "lhs = {lhs} below bound = {bound}");
    }
}

#[test]
fn moment_positivity_threshold_matches_compatibility_threshold() {
    let axes = moments::trine_axes();
    let positivity = positivity_threshold(&axes, &DensityOp::maximally_mixed(2)).unwrap();
    let compat = threshold(&axes, ThresholdMode::Full, &SolveConfig::default())
        .unwrap()
        .eta_star;
    assert_abs_diff_eq!(positivity, compat, epsilon = 5e-3);
    assert_abs_diff_eq!(positivity, 2.0 / 3.0, epsilon = 1e-4);
}
