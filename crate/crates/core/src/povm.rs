//! Effects, POVMs, sharp and noisy spin constructors, Lüders updates, and
//! outcome statistics.

use crate::error::{Error, Result};
use crate::linalg::{pauli_dot, real_trace_product, sqrt_psd, eig_hermitian, HermitianOp};
use crate::states::DensityOp;

/// Effect eigenvalues may stray this far below 0 or above 1.
pub const EFFECT_TOL: f64 = 1e-10;

/// Max-abs tolerance on `Σ_x E(x) - 1`.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// Probabilities in `[-PROB_CLAMP, 0)` are reported as 0; anything more
/// negative is a logic bug, not float noise.
pub const PROB_CLAMP: f64 = 1e-12;

/// Unit direction on the Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    n: [f64; 3],
}

impl Axis {
    /// Normalizes the given vector; rejects vectors of near-zero length.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if norm < 1e-12 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            n: [x / norm, y / norm, z / norm],
        })
    }

    pub fn x() -> Self {
        Self { n: [1.0, 0.0, 0.0] }
    }

    pub fn y() -> Self {
        Self { n: [0.0, 1.0, 0.0] }
    }

    pub fn z() -> Self {
        Self { n: [0.0, 0.0, 1.0] }
    }

    pub fn unit(&self) -> [f64; 3] {
        self.n
    }

    pub fn dot(&self, other: &Axis) -> f64 {
        self.n.iter().zip(other.n.iter()).map(|(a, b)| a * b).sum()
    }

    /// The spin observable `σ⃗ · n̂` along this axis.
    pub fn spin_op(&self) -> HermitianOp {
        pauli_dot(self.n)
    }
}

/// A measurement effect: positive operator with `0 ≤ E ≤ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Effect {
    op: HermitianOp,
}

impl Effect {
    /// Checked constructor; spectrum must lie in `[-1e-10, 1 + 1e-10]`.
    pub fn new(op: HermitianOp) -> Result<Self> {
        let eig = eig_hermitian(&op);
        let min = eig.values[0];
        let max = *eig.values.last().unwrap();
        if min < -EFFECT_TOL || max > 1.0 + EFFECT_TOL {
            return Err(Error::NotEffect { min, max });
        }
        Ok(Self { op })
    }

    /// Bypasses the spectrum check so invalid candidates can still be
    /// assembled and diagnosed through [`validate`].
    pub fn unchecked(op: HermitianOp) -> Self {
        Self { op }
    }

    pub fn op(&self) -> &HermitianOp {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

/// One labelled POVM outcome with its numeric value (±1 for dichotomic
/// observables) and effect.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub label: i64,
    pub value: f64,
    pub effect: Effect,
}

/// An ordered POVM. Outcome order is canonical: descending value, so
/// dichotomic observables always list +1 before -1.
#[derive(Clone, Debug)]
pub struct Povm {
    outcomes: Vec<Outcome>,
    dim: usize,
}

impl Povm {
    /// Checked constructor: consistent dimensions, unique labels, effects
    /// summing to the identity within [`COMPLETENESS_TOL`].
    pub fn new(outcomes: Vec<Outcome>) -> Result<Self> {
        let povm = Self::unchecked(outcomes)?;
        let report = validate(&povm);
        if report.completeness_residual > COMPLETENESS_TOL {
            return Err(Error::Incomplete(report.completeness_residual));
        }
        Ok(povm)
    }

    /// Structural checks only (dimensions, labels, canonical ordering);
    /// numeric validity is left to [`validate`].
    pub fn unchecked(mut outcomes: Vec<Outcome>) -> Result<Self> {
        let dim = match outcomes.first() {
            Some(o) => o.effect.dim(),
            None => return Err(Error::Internal("empty POVM".into())),
        };
        for o in &outcomes {
            if o.effect.dim() != dim {
                return Err(Error::DimMismatch(o.effect.dim(), dim));
            }
        }
        outcomes.sort_by(|a, b| b.value.partial_cmp(&a.value).unwrap());
        let mut labels: Vec<i64> = outcomes.iter().map(|o| o.label).collect();
        labels.sort_unstable();
        for w in labels.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateLabel(w[0]));
            }
        }
        Ok(Self { outcomes, dim })
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn labels(&self) -> Vec<i64> {
        self.outcomes.iter().map(|o| o.label).collect()
    }
}

/// Diagnostic report from [`validate`]; never an error.
#[derive(Clone, Copy, Debug)]
pub struct ValidationReport {
    pub ok: bool,
    /// Worst violation of `0 ≤ E ≤ 1` across all effects (0 when clean).
    pub max_negativity: f64,
    /// Max-abs entry of `Σ_x E(x) - 1`.
    pub completeness_residual: f64,
}

/// Checks the POVM invariants and reports the worst violations.
pub fn validate(povm: &Povm) -> ValidationReport {
    let mut max_negativity = 0.0f64;
    for o in povm.outcomes() {
        let eig = eig_hermitian(o.effect.op());
        let min = eig.values[0];
        let max = *eig.values.last().unwrap();
        max_negativity = max_negativity.max(-min).max(max - 1.0);
    }
    let mut sum = povm.outcomes[0].effect.op().mat().clone();
    for o in &povm.outcomes[1..] {
        sum = sum.add(o.effect.op().mat());
    }
    let completeness_residual =
        sum.max_abs_diff(HermitianOp::identity(povm.dim()).mat());
    ValidationReport {
        ok: max_negativity <= EFFECT_TOL && completeness_residual <= COMPLETENESS_TOL,
        max_negativity,
        completeness_residual,
    }
}

/// Sharp (projection-valued) spin measurement along an axis:
/// `Π(±1) = (1 ± σ⃗·n̂)/2`.
pub fn sharp_spin(axis: &Axis) -> Povm {
    noisy_spin(axis, 1.0).expect("η = 1 is in range")
}

/// Noisy spin measurement `E(x) = (1 + η x σ⃗·n̂)/2` for `η ∈ [0, 1]`.
///
/// At η = 1 this is the sharp projective pair; at η = 0 both effects
/// degenerate to `1/2`.
pub fn noisy_spin(axis: &Axis, eta: f64) -> Result<Povm> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::EtaOutOfRange { eta, max: 1.0 });
    }
    let spin = axis.spin_op();
    let identity = HermitianOp::identity(2);
    let mut outcomes = Vec::with_capacity(2);
    for x in [1.0f64, -1.0] {
        let op = HermitianOp::new(identity.add(&spin.scale(eta * x)).scale(0.5))?;
        outcomes.push(Outcome {
            label: x as i64,
            value: x,
            effect: Effect::new(op)?,
        });
    }
    Povm::new(outcomes)
}

/// Outcome probabilities `p(x) = Tr[ρ E(x)]` in canonical outcome order.
///
/// Values in `[-1e-12, 0)` clamp to zero; more negative values indicate a
/// corrupted input and are rejected.
pub fn outcome_distribution(rho: &DensityOp, povm: &Povm) -> Result<Vec<f64>> {
    if rho.dim() != povm.dim() {
        return Err(Error::DimMismatch(rho.dim(), povm.dim()));
    }
    povm.outcomes()
        .iter()
        .map(|o| {
            let p = real_trace_product(rho.op().mat(), o.effect.op().mat());
            if p < -PROB_CLAMP {
                Err(Error::NegativeProbability(p))
            } else {
                Ok(p.max(0.0))
            }
        })
        .collect()
}

/// Lüders update `ρ → √E ρ √E / Tr[ρE]`, returning the post-measurement
/// state and the branch probability.
pub fn luders_update(rho: &DensityOp, effect: &Effect) -> Result<(DensityOp, f64)> {
    if rho.dim() != effect.dim() {
        return Err(Error::DimMismatch(rho.dim(), effect.dim()));
    }
    let prob = real_trace_product(rho.op().mat(), effect.op().mat());
    if prob <= PROB_CLAMP {
        return Err(Error::ZeroProbabilityBranch(prob));
    }
    let root = sqrt_psd(effect.op())?;
    let post = root.mul(rho.op().mat()).mul(root.mat()).scale(1.0 / prob);
    Ok((DensityOp::new(HermitianOp::new(post)?)?, prob))
}

/// Expectation value `Σ_x x·Tr[ρ E(x)]` of the observable.
pub fn expectation(rho: &DensityOp, povm: &Povm) -> Result<f64> {
    let probs = outcome_distribution(rho, povm)?;
    Ok(povm
        .outcomes()
        .iter()
        .zip(probs)
        .map(|(o, p)| o.value * p)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli_x, ComplexMat};
    use crate::sampling::Xoshiro256StarStar;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

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

    fn ket0() -> DensityOp {
        DensityOp::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap()
    }

    #[test]
    fn axis_normalizes_and_rejects_zero() {
        let a = Axis::new(0.0, 0.0, 2.5).unwrap();
        assert_eq!(a.unit(), [0.0, 0.0, 1.0]);
        assert!(matches!(Axis::new(0.0, 0.0, 0.0), Err(Error::ZeroNorm)));
    }

    #[test]
    fn sharp_z_is_the_pair_of_z_projectors() {
        let povm = sharp_spin(&Axis::z());
        let plus = HermitianOp::from_diag(&[1.0, 0.0]).unwrap();
        let minus = HermitianOp::from_diag(&[0.0, 1.0]).unwrap();
        assert_eq!(povm.outcomes()[0].label, 1);
        assert!(povm.outcomes()[0].effect.op().max_abs_diff(plus.mat()) <= 1e-15);
        assert!(povm.outcomes()[1].effect.op().max_abs_diff(minus.mat()) <= 1e-15);
    }

    #[test]
    fn sharp_x_has_half_off_diagonals() {
        let povm = sharp_spin(&Axis::x());
        let plus = povm.outcomes()[0].effect.op();
        assert_abs_diff_eq!(plus.get(0, 1).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(plus.get(0, 0).re, 0.5, epsilon = 1e-15);
        let expected = HermitianOp::new(pauli_x().add(&ComplexMat::identity(2)).scale(0.5)).unwrap();
        assert!(plus.max_abs_diff(expected.mat()) <= 1e-15);
    }

    #[test]
    fn sharp_projectors_are_orthogonal() {
        let mut rng = Xoshiro256StarStar::from_seed(3);
        for _ in 0..20 {
            let povm = sharp_spin(&random_axis(&mut rng));
            let prod = povm.outcomes()[0]
                .effect
                .op()
                .mul(povm.outcomes()[1].effect.op().mat());
            assert!(prod.max_abs() <= 1e-15);
        }
    }

    #[test]
    fn noisy_at_eta_one_is_sharp() {
        let axis = Axis::z();
        let a = noisy_spin(&axis, 1.0).unwrap();
        let b = sharp_spin(&axis);
        for (x, y) in a.outcomes().iter().zip(b.outcomes()) {
            assert!(x.effect.op().max_abs_diff(y.effect.op().mat()) == 0.0);
        }
    }

    #[test]
    fn noisy_at_eta_zero_is_trivial() {
        let povm = noisy_spin(&Axis::x(), 0.0).unwrap();
        let half = HermitianOp::identity(2).scale(0.5);
        for o in povm.outcomes() {
            assert!(o.effect.op().max_abs_diff(&half) <= 1e-15);
        }
    }

    #[test]
    fn noisy_half_spectrum() {
        let povm = noisy_spin(&Axis::x(), 0.5).unwrap();
        let eig = eig_hermitian(povm.outcomes()[0].effect.op());
        assert_abs_diff_eq!(eig.values[0], 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.values[1], 0.75, epsilon = 1e-14);
    }

    #[test]
    fn noisy_rejects_eta_out_of_range() {
        assert!(matches!(
            noisy_spin(&Axis::x(), 1.5),
            Err(Error::EtaOutOfRange { .. })
        ));
        assert!(matches!(
            noisy_spin(&Axis::x(), -0.1),
            Err(Error::EtaOutOfRange { .. })
        ));
    }

    #[test]
    fn noisy_effects_are_affine_in_eta() {
        // Both printed forms of the noisy effect agree:
        // (1 + ηxσ·n̂)/2 = ηΠ(x) + (1-η)/2.
        let mut rng = Xoshiro256StarStar::from_seed(8);
        for _ in 0..10 {
            let axis = random_axis(&mut rng);
            let sharp = sharp_spin(&axis);
            for &eta in &[0.0, 0.3, 0.5, 0.75, 1.0] {
                let noisy = noisy_spin(&axis, eta).unwrap();
                for (n, s) in noisy.outcomes().iter().zip(sharp.outcomes()) {
                    let blend = s
                        .effect
                        .op()
                        .scale(eta)
                        .add(&HermitianOp::identity(2).scale((1.0 - eta) * 0.5));
                    assert!(n.effect.op().max_abs_diff(&blend) <= 1e-15);
                }
            }
        }
    }

    #[test]
    fn validate_flags_constructed_violation() {
        let bad = Povm::unchecked(vec![
            Outcome {
                label: 1,
                value: 1.0,
                effect: Effect::unchecked(HermitianOp::from_diag(&[1.2, 0.0]).unwrap()),
            },
            Outcome {
                label: -1,
                value: -1.0,
                effect: Effect::unchecked(HermitianOp::from_diag(&[-0.2, 1.0]).unwrap()),
            },
        ])
        .unwrap();
        let report = validate(&bad);
        assert!(!report.ok);
        assert_abs_diff_eq!(report.max_negativity, 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(report.completeness_residual, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn validate_accepts_spin_povms() {
        assert!(validate(&sharp_spin(&Axis::z())).ok);
        assert!(validate(&noisy_spin(&Axis::x(), 0.7).unwrap()).ok);
    }

    #[test]
    fn checked_constructor_rejects_incomplete_sets() {
        let outcomes = vec![
            Outcome {
                label: 1,
                value: 1.0,
                effect: Effect::new(HermitianOp::from_diag(&[0.5, 0.5]).unwrap()).unwrap(),
            },
            Outcome {
                label: -1,
                value: -1.0,
                effect: Effect::new(HermitianOp::from_diag(&[0.3, 0.3]).unwrap()).unwrap(),
            },
        ];
        assert!(matches!(Povm::new(outcomes), Err(Error::Incomplete(_))));
    }

    #[test]
    fn duplicate_labels_rejected() {
        let e = Effect::new(HermitianOp::from_diag(&[0.5, 0.5]).unwrap()).unwrap();
        let outcomes = vec![
            Outcome { label: 1, value: 1.0, effect: e.clone() },
            Outcome { label: 1, value: -1.0, effect: e },
        ];
        assert!(matches!(
            Povm::new(outcomes),
            Err(Error::DuplicateLabel(1))
        ));
    }

    #[test]
    fn distribution_for_maximally_mixed_is_uniform() {
        let rho = DensityOp::maximally_mixed(2);
        for &eta in &[0.0, 0.4, 1.0] {
            let povm = noisy_spin(&Axis::z(), eta).unwrap();
            let p = outcome_distribution(&rho, &povm).unwrap();
            assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-14);
            assert_abs_diff_eq!(p[1], 0.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn distribution_for_eigenstate() {
        let p = outcome_distribution(&ket0(), &sharp_spin(&Axis::z())).unwrap();
        assert_abs_diff_eq!(p[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p[1], 0.0, epsilon = 1e-14);

        let p = outcome_distribution(&ket0(), &noisy_spin(&Axis::z(), 0.6).unwrap()).unwrap();
        assert_abs_diff_eq!(p[0], 0.8, epsilon = 1e-14);
        assert_abs_diff_eq!(p[1], 0.2, epsilon = 1e-14);
    }

    #[test]
    fn distribution_shrinks_toward_uniform_with_noise() {
        // p_η(x) = η p_sharp(x) + (1-η)/2.
        let mut rng = Xoshiro256StarStar::from_seed(21);
        for _ in 0..10 {
            let axis = random_axis(&mut rng);
            let rho = ket0();
            let sharp = outcome_distribution(&rho, &sharp_spin(&axis)).unwrap();
            for &eta in &[0.2, 0.6, 0.9] {
                let noisy =
                    outcome_distribution(&rho, &noisy_spin(&axis, eta).unwrap()).unwrap();
                for (pn, ps) in noisy.iter().zip(&sharp) {
                    assert_abs_diff_eq!(*pn, eta * ps + (1.0 - eta) / 2.0, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let rho4 = DensityOp::maximally_mixed(4);
        assert!(matches!(
            outcome_distribution(&rho4, &sharp_spin(&Axis::z())),
            Err(Error::DimMismatch(4, 2))
        ));
    }

    #[test]
    fn luders_on_mixed_state_returns_the_effect() {
        // For ρ = 1/2: √E ρ √E / p = E / (2p) with p = Tr[E]/2 = 1/2.
        let povm = noisy_spin(&Axis::x(), 0.7).unwrap();
        let rho = DensityOp::maximally_mixed(2);
        let (post, prob) = luders_update(&rho, &povm.outcomes()[0].effect).unwrap();
        assert_abs_diff_eq!(prob, 0.5, epsilon = 1e-14);
        assert!(post.op().max_abs_diff(povm.outcomes()[0].effect.op().mat()) <= 1e-12);
    }

    #[test]
    fn luders_fixed_point_and_zero_branch() {
        let sharp = sharp_spin(&Axis::z());
        let (post, prob) = luders_update(&ket0(), &sharp.outcomes()[0].effect).unwrap();
        assert_abs_diff_eq!(prob, 1.0, epsilon = 1e-14);
        assert!(post.op().max_abs_diff(ket0().op().mat()) <= 1e-12);

        assert!(matches!(
            luders_update(&ket0(), &sharp.outcomes()[1].effect),
            Err(Error::ZeroProbabilityBranch(_))
        ));
    }

    #[test]
    fn luders_branches_recombine_to_unit_trace() {
        let mut rng = Xoshiro256StarStar::from_seed(13);
        for _ in 0..10 {
            let axis = random_axis(&mut rng);
            let state_axis = random_axis(&mut rng);
            // Mixed state (1 + 0.8 σ·m̂)/2, full rank so no branch vanishes.
            let rho = DensityOp::new(
                HermitianOp::new(
                    HermitianOp::identity(2)
                        .add(&state_axis.spin_op().scale(0.8))
                        .scale(0.5),
                )
                .unwrap(),
            )
            .unwrap();
            let povm = noisy_spin(&axis, 0.9).unwrap();
            let mut total = 0.0;
            for o in povm.outcomes() {
                let (_, p) = luders_update(&rho, &o.effect).unwrap();
                total += p;
            }
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn expectation_examples() {
        let rho_mixed = DensityOp::maximally_mixed(2);
        let mut rng = Xoshiro256StarStar::from_seed(9);
        let axis = random_axis(&mut rng);
        assert_abs_diff_eq!(
            expectation(&rho_mixed, &noisy_spin(&axis, 0.7).unwrap()).unwrap(),
            0.0,
            epsilon = 1e-14
        );
        for &eta in &[0.0, 0.3, 1.0] {
            assert_abs_diff_eq!(
                expectation(&ket0(), &noisy_spin(&Axis::z(), eta).unwrap()).unwrap(),
                eta,
                epsilon = 1e-14
            );
        }
        assert_abs_diff_eq!(
            expectation(&ket0(), &sharp_spin(&Axis::x())).unwrap(),
            0.0,
            epsilon = 1e-14
        );
    }
}
