//! Entropic uncertainty bounds without and with quantum memory, the
//! singlet prediction game, and the entropic steering inequality.

use crate::error::{Error, Result};
use crate::linalg::{kron, real_trace_product, sqrt_psd, trace_norm};
use crate::povm::{noisy_spin, sharp_spin, Axis, Povm, PROB_CLAMP};
use crate::states::{conditional_vn_entropy, singlet, DensityOp};

/// Max-abs tolerance on a probability table's total.
pub const TABLE_TOTAL_TOL: f64 = 1e-10;

/// Joint probabilities over two discrete outcome sets, row-major with
/// rows indexed by the A labels.
#[derive(Clone, Debug, PartialEq)]
pub struct JointProbTable {
    labels_a: Vec<i64>,
    labels_b: Vec<i64>,
    p: Vec<f64>,
}

impl JointProbTable {
    /// Entries in `[-1e-12, 0)` clamp to zero; the table must total 1.
    pub fn new(labels_a: Vec<i64>, labels_b: Vec<i64>, p: Vec<f64>) -> Result<Self> {
        if p.len() != labels_a.len() * labels_b.len() {
            return Err(Error::DimMismatch(p.len(), labels_a.len() * labels_b.len()));
        }
        let mut clamped = Vec::with_capacity(p.len());
        for &v in &p {
            if v < -PROB_CLAMP {
                return Err(Error::NegativeProbability(v));
            }
            clamped.push(v.max(0.0));
        }
        let total: f64 = clamped.iter().sum();
        if (total - 1.0).abs() > TABLE_TOTAL_TOL {
            return Err(Error::BadTableTotal(total));
        }
        Ok(Self {
            labels_a,
            labels_b,
            p: clamped,
        })
    }

    pub fn labels_a(&self) -> &[i64] {
        &self.labels_a
    }

    pub fn labels_b(&self) -> &[i64] {
        &self.labels_b
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.labels_b.len() + j]
    }

    pub fn marginal_a(&self) -> Vec<f64> {
        (0..self.labels_a.len())
            .map(|i| (0..self.labels_b.len()).map(|j| self.prob(i, j)).sum())
            .collect()
    }

    pub fn marginal_b(&self) -> Vec<f64> {
        (0..self.labels_b.len())
            .map(|j| (0..self.labels_a.len()).map(|i| self.prob(i, j)).sum())
            .collect()
    }

    /// `H(A|B) = -Σ p(x, x') log₂ p(x|x')` in bits; zero-probability
    /// columns and cells contribute nothing.
    pub fn conditional_entropy_given_b(&self) -> f64 {
        let pb = self.marginal_b();
        let mut h = 0.0;
        for (j, &col_total) in pb.iter().enumerate() {
            if col_total <= 0.0 {
                continue;
            }
            for i in 0..self.labels_a.len() {
                let p = self.prob(i, j);
                if p > 0.0 {
                    h -= p * (p / col_total).log2();
                }
            }
        }
        h
    }
}

/// Maximal effect overlap `C(𝔼_X, 𝔼_Z) = max_{x,z} ‖√E_X(x) √E_Z(z)‖`
/// in the trace norm.
///
/// For sharp pairs the products are rank one, where the trace and
/// operator norms coincide; for general unsharp effects they differ and
/// this function deliberately uses the trace norm.
pub fn overlap_c(px: &Povm, pz: &Povm) -> Result<f64> {
    if px.dim() != pz.dim() {
        return Err(Error::DimMismatch(px.dim(), pz.dim()));
    }
    let roots_x: Vec<_> = px
        .outcomes()
        .iter()
        .map(|o| sqrt_psd(o.effect.op()))
        .collect::<Result<_>>()?;
    let roots_z: Vec<_> = pz
        .outcomes()
        .iter()
        .map(|o| sqrt_psd(o.effect.op()))
        .collect::<Result<_>>()?;
    let mut best = 0.0f64;
    for rx in &roots_x {
        for rz in &roots_z {
            best = best.max(trace_norm(&rx.mul(rz.mat())));
        }
    }
    Ok(best)
}

/// Preparation-independent uncertainty bound `-2 log₂ C(𝔼_X, 𝔼_Z)` in bits.
pub fn mu_bound(px: &Povm, pz: &Povm) -> Result<f64> {
    Ok(-2.0 * overlap_c(px, pz)?.log2())
}

/// Memory-assisted bound `-2 log₂ C + S(A|B)`; negative for sufficiently
/// entangled states.
pub fn memory_bound(rho_ab: &DensityOp, px: &Povm, pz: &Povm) -> Result<f64> {
    Ok(mu_bound(px, pz)? + conditional_vn_entropy(rho_ab)?)
}

/// Joint outcome table `p(x, x') = Tr[ρ_AB E_A(x) ⊗ E_B(x')]`.
pub fn joint_table(rho_ab: &DensityOp, povm_a: &Povm, povm_b: &Povm) -> Result<JointProbTable> {
    if rho_ab.dim() != 4 {
        return Err(Error::BadDim(rho_ab.dim()));
    }
    if povm_a.dim() != 2 || povm_b.dim() != 2 {
        return Err(Error::DimMismatch(povm_a.dim(), povm_b.dim()));
    }
    let mut p = Vec::with_capacity(povm_a.len() * povm_b.len());
    for oa in povm_a.outcomes() {
        for ob in povm_b.outcomes() {
            let joint = kron(oa.effect.op(), ob.effect.op())?;
            p.push(real_trace_product(rho_ab.op().mat(), joint.mat()));
        }
    }
    JointProbTable::new(povm_a.labels(), povm_b.labels(), p)
}

/// Shannon binary entropy `H(p) = -p log₂ p - (1-p) log₂(1-p)` in bits.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::POutOfRange(p));
    }
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if p < 1.0 {
        h -= (1.0 - p) * (1.0 - p).log2();
    }
    Ok(h)
}

/// `H(X|X') + H(Z|Z')` for arbitrary measurement pairs on a two-qubit
/// state: Alice measures `alice.0`/`alice.1`, Bob `bob.0`/`bob.1`.
pub fn game_lhs(
    rho_ab: &DensityOp,
    alice: (&Povm, &Povm),
    bob: (&Povm, &Povm),
) -> Result<f64> {
    let hx = joint_table(rho_ab, alice.0, bob.0)?.conditional_entropy_given_b();
    let hz = joint_table(rho_ab, alice.1, bob.1)?.conditional_entropy_given_b();
    Ok(hx + hz)
}

/// Outcome of one run of the singlet prediction game.
#[derive(Clone, Copy, Debug)]
pub struct GameReport {
    pub eta: f64,
    /// Table-computed `H(X|X') + H(Z|Z')` in bits.
    pub lhs: f64,
    /// The closed form `2H[(1+η)/2]`.
    pub closed_form: f64,
    /// `-2 log₂ C` for Alice's sharp pair: one bit.
    pub bound_no_memory: f64,
    /// `-2 log₂ C + S(A|B)` for the singlet: zero.
    pub bound_with_memory: f64,
    /// True when the steering inequality `lhs ≥ bound_no_memory` breaks.
    pub steering_violated: bool,
}

/// Plays the singlet game: Alice measures sharp σ_x/σ_z, Bob the noisy
/// pair at unsharpness `eta`, and the conditional-entropy sum is compared
/// against both uncertainty bounds.
///
/// The table computation is checked against the closed form
/// `2H[(1+η)/2]` to 1e-9; a mismatch would be an internal defect.
pub fn run_game(eta: f64) -> Result<GameReport> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::EtaOutOfRange { eta, max: 1.0 });
    }
    let rho = singlet();
    let alice_x = sharp_spin(&Axis::x());
    let alice_z = sharp_spin(&Axis::z());
    let bob_x = noisy_spin(&Axis::x(), eta)?;
    let bob_z = noisy_spin(&Axis::z(), eta)?;

    let lhs = game_lhs(&rho, (&alice_x, &alice_z), (&bob_x, &bob_z))?;
    let closed_form = 2.0 * binary_entropy((1.0 + eta) / 2.0)?;
    if (lhs - closed_form).abs() > 1e-9 {
        return Err(Error::Internal(format!(
            "game entropies {lhs} diverge from closed form {closed_form}"
        )));
    }

    let bound_no_memory = mu_bound(&alice_x, &alice_z)?;
    let bound_with_memory = memory_bound(&rho, &alice_x, &alice_z)?;
    Ok(GameReport {
        eta,
        lhs,
        closed_form,
        bound_no_memory,
        bound_with_memory,
        steering_violated: lhs < bound_no_memory - 1e-12,
    })
}

/// Unsharpness above which Bob beats the no-memory bound: the root of
/// `2H[(1+η)/2] = 1`, located by bisection to 1e-9.
pub fn beating_threshold() -> f64 {
    let f = |eta: f64| 2.0 * binary_entropy((1.0 + eta) / 2.0).unwrap() - 1.0;
    let mut lo = 0.0;
    let mut hi = 1.0;
    // f(0) = 1 > 0, f(1) = -1 < 0, strictly decreasing.
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
