//! Density operators, bipartite qubit states, von Neumann entropies, and
//! the classical-quantum post-measurement constructions.
//!
//! Entropies are in bits (log base 2) throughout.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, kron, partial_trace, ComplexMat, HermitianOp, Subsystem,
};
use crate::povm::Povm;

/// Trace must sit within this distance of 1.
pub const TRACE_TOL: f64 = 1e-10;

/// Eigenvalues may stray this far below zero before a state is rejected.
pub const PSD_TOL: f64 = 1e-10;

/// Validated density operator: Hermitian, unit trace, positive
/// semidefinite within tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOp {
    op: HermitianOp,
}

impl DensityOp {
    pub fn new(op: HermitianOp) -> Result<Self> {
        let trace = op.trace_real();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(trace));
        }
        let min = eig_hermitian(&op).values[0];
        if min < -PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { op })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: HermitianOp::identity(dim).into_scaled(1.0 / dim as f64),
        }
    }

    /// Pure state `|ψ⟩⟨ψ|` from an unnormalized ket.
    pub fn pure(ket: &[Complex64]) -> Result<Self> {
        let d = ket.len();
        let norm_sq: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq < 1e-24 {
            return Err(Error::ZeroNorm);
        }
        let mut m = ComplexMat::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, ket[i] * ket[j].conj() / norm_sq);
            }
        }
        Self::new(HermitianOp::new(m)?)
    }

    pub fn op(&self) -> &HermitianOp {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn purity(&self) -> f64 {
        self.op.mul(self.op.mat()).trace().re
    }
}

impl std::ops::Deref for DensityOp {
    type Target = HermitianOp;

    fn deref(&self) -> &HermitianOp {
        &self.op
    }
}

impl HermitianOp {
    fn into_scaled(self, s: f64) -> HermitianOp {
        HermitianOp::new(self.scale(s)).expect("scaling preserves Hermiticity")
    }
}

/// The two-qubit singlet `(|01⟩ - |10⟩)/√2` as a density operator.
pub fn singlet() -> DensityOp {
    let z = Complex64::new(0.0, 0.0);
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    DensityOp::pure(&[z, r, -r, z]).expect("singlet ket is normalized")
}

fn entropy_bits_from(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut h = 0.0;
    for l in values {
        // Clamp the PSD noise floor; 0·log 0 = 0.
        let l = if l < 0.0 { 0.0 } else { l };
        if l > 0.0 {
            h -= l * l.log2();
        }
    }
    h
}

/// Shannon entropy in bits of a probability vector.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    entropy_bits_from(probs.iter().copied())
}

/// Von Neumann entropy `S(ρ) = -Tr[ρ log₂ ρ]` in bits.
pub fn von_neumann_entropy(rho: &DensityOp) -> f64 {
    entropy_bits_from(eig_hermitian(rho.op()).values)
}

/// Conditional von Neumann entropy `S(A|B) = S(ρ_AB) - S(ρ_B)` of a
/// two-qubit state.
pub fn conditional_vn_entropy(rho_ab: &DensityOp) -> Result<f64> {
    if rho_ab.dim() != 4 {
        return Err(Error::BadDim(rho_ab.dim()));
    }
    let rho_b = DensityOp::new(HermitianOp::new(partial_trace(
        rho_ab.op().mat(),
        Subsystem::B,
    )?)?)?;
    Ok(von_neumann_entropy(rho_ab) - von_neumann_entropy(&rho_b))
}

/// Classical-quantum state: outcome probabilities paired with the
/// conditional states left on B.
///
/// The entropy of the full cq block matrix decomposes exactly as
/// `H(p) + Σ_x p_x S(ρ_B^x)`, so the branches are stored instead of a
/// `2n × 2n` matrix.
#[derive(Clone, Debug)]
pub struct CqState {
    branches: Vec<(f64, DensityOp)>,
}

impl CqState {
    pub fn branches(&self) -> &[(f64, DensityOp)] {
        &self.branches
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.branches.iter().map(|(p, _)| *p).collect()
    }

    /// `S(ρ_cq) = H(p) + Σ_x p_x S(ρ_B^x)` in bits.
    pub fn entropy(&self) -> f64 {
        let probs = self.probabilities();
        shannon_entropy(&probs)
            + self
                .branches
                .iter()
                .map(|(p, rho)| p * von_neumann_entropy(rho))
                .sum::<f64>()
    }
}

/// Post-measurement cq state after measuring `povm_a` on subsystem A:
/// branch `x` carries `p(x) = Tr[ρ_AB (E(x) ⊗ 1)]` and the normalized
/// conditional state `Tr_A[ρ_AB (E(x) ⊗ 1)] / p(x)` on B.
///
/// Zero-probability branches keep a maximally mixed placeholder; they
/// contribute nothing to any entropy.
pub fn cq_post_measurement(rho_ab: &DensityOp, povm_a: &Povm) -> Result<CqState> {
    if rho_ab.dim() != 4 || povm_a.dim() != 2 {
        return Err(Error::DimMismatch(rho_ab.dim(), povm_a.dim()));
    }
    let identity = HermitianOp::identity(2);
    let mut branches = Vec::with_capacity(povm_a.len());
    for outcome in povm_a.outcomes() {
        let proj = kron(outcome.effect.op(), &identity)?;
        let weighted = rho_ab.op().mul(proj.mat());
        let reduced = partial_trace(&weighted, Subsystem::B)?;
        let p = reduced.trace().re;
        if p < -crate::povm::PROB_CLAMP {
            return Err(Error::NegativeProbability(p));
        }
        let p = p.max(0.0);
        if p <= crate::povm::PROB_CLAMP {
            branches.push((0.0, DensityOp::maximally_mixed(2)));
        } else {
            let cond = DensityOp::new(HermitianOp::new(reduced.scale(1.0 / p))?)?;
            branches.push((p, cond));
        }
    }
    Ok(CqState { branches })
}

/// `S(𝔼|B) = S(ρ_cq) - S(ρ_B)`: conditional entropy after measuring
/// `povm_a` on A and storing the outcome classically.
pub fn measured_conditional_entropy(rho_ab: &DensityOp, povm_a: &Povm) -> Result<f64> {
    let cq = cq_post_measurement(rho_ab, povm_a)?;
    let rho_b = DensityOp::new(HermitianOp::new(partial_trace(
        rho_ab.op().mat(),
        Subsystem::B,
    )?)?)?;
    Ok(cq.entropy() - von_neumann_entropy(&rho_b))
}

/// Product state `ρ_A ⊗ ρ_B` of two qubits.
pub fn product_state(a: &DensityOp, b: &DensityOp) -> Result<DensityOp> {
    DensityOp::new(kron(a.op(), b.op())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli_x;
    use crate::linalg::pauli_z;
    use crate::povm::{noisy_spin, sharp_spin, Axis};
    use approx::assert_abs_diff_eq;

    fn ket0() -> DensityOp {
        DensityOp::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap()
    }

    fn ket1() -> DensityOp {
        DensityOp::pure(&[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn density_constructor_validates() {
        assert!(matches!(
            DensityOp::new(HermitianOp::from_diag(&[0.7, 0.7]).unwrap()),
            Err(Error::InvalidTrace(_))
        ));
        assert!(matches!(
            DensityOp::new(HermitianOp::from_diag(&[1.5, -0.5]).unwrap()),
            Err(Error::NotPsd(_))
        ));
    }

    #[test]
    fn singlet_is_pure_with_mixed_marginals() {
        let s = singlet();
        assert_abs_diff_eq!(s.purity(), 1.0, epsilon = 1e-14);
        for keep in [Subsystem::A, Subsystem::B] {
            let marginal = partial_trace(s.op().mat(), keep).unwrap();
            assert!(marginal.max_abs_diff(&ComplexMat::identity(2).scale(0.5)) <= 1e-14);
        }
    }

    #[test]
    fn singlet_is_fully_anticorrelated() {
        let s = singlet();
        for op in [pauli_z(), pauli_x()] {
            let obs = kron(&op, &op).unwrap();
            let expect = crate::linalg::real_trace_product(s.op().mat(), obs.mat());
            assert_abs_diff_eq!(expect, -1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn entropy_examples() {
        assert_abs_diff_eq!(
            von_neumann_entropy(&DensityOp::maximally_mixed(2)),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(von_neumann_entropy(&ket0()), 0.0, epsilon = 1e-12);
        let rho = DensityOp::new(HermitianOp::from_diag(&[0.8, 0.2]).unwrap()).unwrap();
        assert_abs_diff_eq!(
            von_neumann_entropy(&rho),
            0.7219280948873623,
            epsilon = 1e-12
        );
    }

    #[test]
    fn conditional_entropy_examples() {
        assert_abs_diff_eq!(conditional_vn_entropy(&singlet()).unwrap(), -1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(
            conditional_vn_entropy(&DensityOp::maximally_mixed(4)).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let product = product_state(&ket0(), &ket1()).unwrap();
        assert_abs_diff_eq!(conditional_vn_entropy(&product).unwrap(), 0.0, epsilon = 1e-12);
        assert!(matches!(
            conditional_vn_entropy(&DensityOp::maximally_mixed(2)),
            Err(Error::BadDim(2))
        ));

        // Asymmetric product: S(A|B) = S(ρ_A), pinning which side is traced.
        let rho_a = DensityOp::new(HermitianOp::from_diag(&[0.8, 0.2]).unwrap()).unwrap();
        let skew = product_state(&rho_a, &ket1()).unwrap();
        assert_abs_diff_eq!(
            conditional_vn_entropy(&skew).unwrap(),
            0.7219280948873623,
            epsilon = 1e-12
        );
    }

    #[test]
    fn cq_branches_for_singlet_sharp_z() {
        let cq = cq_post_measurement(&singlet(), &sharp_spin(&Axis::z())).unwrap();
        let branches = cq.branches();
        assert_abs_diff_eq!(branches[0].0, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(branches[1].0, 0.5, epsilon = 1e-14);
        // Outcome +1 on A leaves B in |1⟩⟨1| for the singlet.
        assert!(branches[0].1.op().max_abs_diff(ket1().op().mat()) <= 1e-12);
        assert!(branches[1].1.op().max_abs_diff(ket0().op().mat()) <= 1e-12);
    }

    #[test]
    fn cq_on_product_state_has_constant_conditionals() {
        let rho_b = DensityOp::new(HermitianOp::from_diag(&[0.3, 0.7]).unwrap()).unwrap();
        let rho = product_state(&ket0(), &rho_b).unwrap();
        let cq = cq_post_measurement(&rho, &noisy_spin(&Axis::x(), 0.8).unwrap()).unwrap();
        for (_, cond) in cq.branches() {
            assert!(cond.op().max_abs_diff(rho_b.op().mat()) <= 1e-12);
        }
    }

    #[test]
    fn cq_with_trivial_measurement() {
        let cq = cq_post_measurement(&singlet(), &noisy_spin(&Axis::z(), 0.0).unwrap()).unwrap();
        for (p, cond) in cq.branches() {
            assert_abs_diff_eq!(*p, 0.5, epsilon = 1e-14);
            assert!(cond.op().max_abs_diff(&ComplexMat::identity(2).scale(0.5)) <= 1e-12);
        }
    }

    #[test]
    fn cq_probabilities_sum_to_one() {
        for eta in [0.0, 0.5, 1.0] {
            let cq =
                cq_post_measurement(&singlet(), &noisy_spin(&Axis::x(), eta).unwrap()).unwrap();
            let total: f64 = cq.probabilities().iter().sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn cq_zero_probability_branch_is_harmless() {
        let rho = product_state(&ket0(), &ket0()).unwrap();
        let cq = cq_post_measurement(&rho, &sharp_spin(&Axis::z())).unwrap();
        assert_abs_diff_eq!(cq.branches()[0].0, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cq.branches()[1].0, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cq.entropy(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn measured_conditional_entropy_examples() {
        let s = singlet();
        assert_abs_diff_eq!(
            measured_conditional_entropy(&s, &sharp_spin(&Axis::z())).unwrap(),
            0.0,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            measured_conditional_entropy(&s, &sharp_spin(&Axis::x())).unwrap(),
            0.0,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            measured_conditional_entropy(&DensityOp::maximally_mixed(4), &sharp_spin(&Axis::z()))
                .unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn memory_assisted_equality_for_singlet() {
        // For the singlet with sharp σx, σz: S(𝔼_X|B) + S(𝔼_Z|B) = 0 and
        // the bound -2log₂C + S(A|B) = 1 - 1 = 0 holds with equality.
        let s = singlet();
        let sum = measured_conditional_entropy(&s, &sharp_spin(&Axis::x())).unwrap()
            + measured_conditional_entropy(&s, &sharp_spin(&Axis::z())).unwrap();
        assert_abs_diff_eq!(sum, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(
            1.0 + conditional_vn_entropy(&s).unwrap(),
            0.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn product_state_measured_entropy_is_outcome_shannon() {
        let rho_a = DensityOp::new(HermitianOp::from_diag(&[0.8, 0.2]).unwrap()).unwrap();
        let rho_b = DensityOp::new(HermitianOp::from_diag(&[0.6, 0.4]).unwrap()).unwrap();
        let rho = product_state(&rho_a, &rho_b).unwrap();
        for eta in [0.25, 0.9] {
            let povm = noisy_spin(&Axis::z(), eta).unwrap();
            let probs = crate::povm::outcome_distribution(&rho_a, &povm).unwrap();
            assert_abs_diff_eq!(
                measured_conditional_entropy(&rho, &povm).unwrap(),
                shannon_entropy(&probs),
                epsilon = 1e-12
            );
        }
    }
}
