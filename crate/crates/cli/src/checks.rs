//! The `repro-all` battery: every headline number recomputed in one run,
//! each with its pinned expectation and tolerance.

use povmkit_core::{
    beating_threshold, binary_entropy, canonical_pair_grand_povm, conditional_vn_entropy,
    empirical_correlation, joint_table, lgi_value, measured_conditional_entropy, memory_bound,
    moments, noisy_spin, pair_criterion_unbiased, positivity_threshold, run_game, sample_table,
    sharp_spin, singlet, solve_feasibility, threshold, Axis, CorrelationTriple, DensityOp,
    GrandPovmProblem, SolveConfig, ThresholdMode, Verdict, Xoshiro256StarStar,
};

const SQRT_2_INV: f64 = std::f64::consts::FRAC_1_SQRT_2;
const SQRT_3_INV: f64 = 0.5773502691896258;
const SQRT_3_MINUS_1: f64 = 0.7320508075688772;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub expected: String,
    pub pass: bool,
}

impl Check {
    fn near(name: &'static str, value: f64, target: f64, tol: f64) -> Self {
        Self {
            name,
            value,
            expected: format!("{target} ± {tol:e}"),
            pass: (value - target).abs() <= tol,
        }
    }

    fn at_most(name: &'static str, value: f64, limit: f64) -> Self {
        Self {
            name,
            value,
            expected: format!("≤ {limit:e}"),
            pass: value <= limit,
        }
    }

    fn at_least(name: &'static str, value: f64, limit: f64) -> Self {
        Self {
            name,
            value,
            expected: format!("≥ {limit}"),
            pass: value >= limit,
        }
    }

    fn exact(name: &'static str, value: f64, target: f64) -> Self {
        Self {
            name,
            value,
            expected: format!("= {target} exactly"),
            pass: value == target,
        }
    }
}

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

/// Worst violation of `0 ≤ G ≤ 1` across a grand POVM's effects.
fn effect_violation(grand: &povmkit_core::GrandPovm) -> f64 {
    grand
        .effects()
        .iter()
        .map(|e| (-e.min_eigenvalue()).max(e.max_eigenvalue() - 1.0).max(0.0))
        .fold(0.0, f64::max)
}

pub fn run_all(seed: u64) -> Vec<Check> {
    let cfg = SolveConfig::default();
    let mut checks = Vec::new();

    // Compatibility thresholds.
    let xz = [Axis::x(), Axis::z()];
    let xyz = [Axis::x(), Axis::y(), Axis::z()];
    let trine = moments::trine_axes();
    let pair_xz = threshold(&xz, ThresholdMode::Full, &cfg).unwrap().eta_star;
    checks.push(Check::near("thresholds.pair_xz", pair_xz, SQRT_2_INV, 5e-3));
    checks.push(Check::near(
        "thresholds.triple_xyz",
        threshold(&xyz, ThresholdMode::Full, &cfg).unwrap().eta_star,
        SQRT_3_INV,
        5e-3,
    ));
    checks.push(Check::near(
        "thresholds.trine_pairwise",
        threshold(&trine, ThresholdMode::Pairwise, &cfg).unwrap().eta_star,
        SQRT_3_MINUS_1,
        5e-3,
    ));
    let trine_triple = threshold(&trine, ThresholdMode::Full, &cfg).unwrap().eta_star;
    checks.push(Check::near(
        "thresholds.trine_triplewise",
        trine_triple,
        2.0 / 3.0,
        5e-3,
    ));

    // Witness validity at η = 0.70 for {x̂, ẑ}.
    let targets = vec![
        noisy_spin(&Axis::x(), 0.70).unwrap(),
        noisy_spin(&Axis::z(), 0.70).unwrap(),
    ];
    let report = solve_feasibility(&GrandPovmProblem::new(targets.clone()).unwrap(), &cfg);
    match (report.verdict, report.witness) {
        (Verdict::Feasible, Some(witness)) => {
            checks.push(Check::at_most(
                "witness.solver_marginal_error",
                witness.max_marginal_error(&targets).unwrap(),
                1e-7,
            ));
            checks.push(Check::at_most(
                "witness.solver_effect_violation",
                effect_violation(&witness),
                1e-8,
            ));
        }
        _ => {
            checks.push(Check::at_most("witness.solver_marginal_error", f64::NAN, 1e-7));
            checks.push(Check::at_most("witness.solver_effect_violation", f64::NAN, 1e-8));
        }
    }
    let canonical = canonical_pair_grand_povm(0.70).unwrap();
    checks.push(Check::at_most(
        "witness.canonical_marginal_error",
        canonical.max_marginal_error(&targets).unwrap(),
        1e-12,
    ));
    checks.push(Check::at_most(
        "witness.canonical_effect_violation",
        effect_violation(&canonical),
        1e-12,
    ));

    // Solver verdicts against the analytic unbiased-pair criterion.
    let mut rng = Xoshiro256StarStar::from_seed(seed);
    let mut disagreements = 0u32;
    let mut tried = 0u32;
    while tried < 200 {
        let n1 = random_axis(&mut rng);
        let n2 = random_axis(&mut rng);
        let eta = rng.next_f64();
        let u1 = n1.unit();
        let u2 = n2.unit();
        let norm = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let eta_star = 2.0
            / (norm([u1[0] + u2[0], u1[1] + u2[1], u1[2] + u2[2]])
                + norm([u1[0] - u2[0], u1[1] - u2[1], u1[2] - u2[2]]));
        if (eta - eta_star).abs() < 2e-3 {
            continue;
        }
        let expected = pair_criterion_unbiased(
            [eta * u1[0], eta * u1[1], eta * u1[2]],
            [eta * u2[0], eta * u2[1], eta * u2[2]],
        );
        let problem = GrandPovmProblem::noisy_spins(&[n1, n2], eta).unwrap();
        let got = solve_feasibility(&problem, &cfg).verdict == Verdict::Feasible;
        if got != expected {
            disagreements += 1;
        }
        tried += 1;
    }
    checks.push(Check::at_most("oracle.disagreements", disagreements as f64, 0.0));

    // Memory game closed form and steering.
    let mut worst_gap = 0.0f64;
    for &eta in &[0.0, 0.25, SQRT_2_INV, 0.78, 0.9, 1.0] {
        let game = run_game(eta).unwrap();
        worst_gap = worst_gap.max((game.lhs - game.closed_form).abs());
    }
    checks.push(Check::at_most("game.closed_form_max_abs_diff", worst_gap, 1e-9));

    let beating = beating_threshold();
    checks.push(Check {
        name: "game.beating_threshold",
        value: beating,
        expected: "rounds to 0.78".into(),
        pass: (beating * 100.0).round() / 100.0 == 0.78,
    });

    let mut min_lhs = f64::INFINITY;
    let mut eta = 0.0;
    while eta <= SQRT_2_INV + 1e-6 {
        min_lhs = min_lhs.min(run_game(eta.min(1.0)).unwrap().lhs);
        eta += 0.01;
    }
    checks.push(Check::at_least("game.steering_min_lhs", min_lhs, 1.0));

    // Memory-assisted bound at the equality point.
    let s = singlet();
    let px = sharp_spin(&Axis::x());
    let pz = sharp_spin(&Axis::z());
    let entropy_sum = measured_conditional_entropy(&s, &px).unwrap()
        + measured_conditional_entropy(&s, &pz).unwrap();
    checks.push(Check::near("memory.entropy_sum", entropy_sum, 0.0, 1e-9));
    checks.push(Check::near(
        "memory.bound_rhs",
        memory_bound(&s, &px, &pz).unwrap(),
        0.0,
        1e-9,
    ));
    checks.push(Check::near(
        "memory.conditional_entropy",
        conditional_vn_entropy(&s).unwrap(),
        -1.0,
        1e-10,
    ));

    // Moment-matrix pipeline.
    let mixed = DensityOp::maximally_mixed(2);
    let mut corr_err = 0.0f64;
    let mut eig_err = 0.0f64;
    for &eta in &[0.0, 0.25, 0.5, 2.0 / 3.0, 1.0] {
        let c = moments::sequential_correlations(&trine, &mixed, eta).unwrap();
        for v in [c.c12(), c.c23(), c.c13()] {
            corr_err = corr_err.max((v + eta / 2.0).abs());
        }
        let eigs = moments::moment_eigenvalues(&moments::build_moment_matrix(&c));
        eig_err = eig_err.max((eigs[0] - (2.0 - 3.0 * eta) / 2.0).abs());
        for &e in &eigs[1..] {
            eig_err = eig_err.max((e - (2.0 + eta) / 2.0).abs());
        }
    }
    checks.push(Check::at_most("moments.correlation_max_abs_err", corr_err, 1e-12));
    checks.push(Check::at_most("moments.eigenvalue_max_abs_err", eig_err, 1e-12));

    let positivity = positivity_threshold(&trine, &mixed).unwrap();
    checks.push(Check::near("moments.positivity_threshold", positivity, 2.0 / 3.0, 1e-4));
    checks.push(Check::near(
        "moments.threshold_agreement",
        positivity - trine_triple,
        0.0,
        5e-3,
    ));

    // Monte Carlo consistency at n = 10^6 with the fixed seed.
    let n = 1_000_000u64;
    let game_table = joint_table(
        &singlet(),
        &sharp_spin(&Axis::x()),
        &noisy_spin(&Axis::x(), 0.5).unwrap(),
    )
    .unwrap();
    let run_a = sample_table(&game_table, n, seed).unwrap();
    let run_b = sample_table(&game_table, n, seed).unwrap();
    let sigma_game = ((1.0 - 0.25) / n as f64).sqrt();
    checks.push(Check::at_most(
        "sampling.game_correlation_sigmas",
        (empirical_correlation(&run_a) + 0.5).abs() / sigma_game,
        4.0,
    ));
    checks.push(Check::exact(
        "sampling.determinism",
        (run_a == run_b) as u8 as f64,
        1.0,
    ));

    let trine_table =
        moments::sequential_pair_table(&mixed, &trine[0], &trine[1], 0.5).unwrap();
    let trine_run = sample_table(&trine_table, n, seed).unwrap();
    let sigma_trine = ((1.0 - 0.0625) / n as f64).sqrt();
    checks.push(Check::at_most(
        "sampling.trine_correlation_sigmas",
        (empirical_correlation(&trine_run) + 0.25).abs() / sigma_trine,
        4.0,
    ));

    // Closed-form sanity on the sampled tables.
    let h_sampled = povmkit_core::empirical_conditional_entropy(&run_a);
    checks.push(Check::near(
        "sampling.game_entropy",
        h_sampled,
        binary_entropy(0.75).unwrap(),
        0.01,
    ));

    // Leggett-Garg arithmetic maximum.
    let triple = CorrelationTriple::new(0.5, 0.5, -0.5).unwrap();
    checks.push(Check::exact("lgi.arithmetic_max", lgi_value(&triple), 1.5));

    checks
}
