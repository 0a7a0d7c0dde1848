//! Sequential unsharp-sharp statistics on trine axes, moment-matrix
//! construction, positivity, and the three-term Leggett-Garg inequality.
//!
//! The sequential statistics run through the actual Lüders machinery; the
//! closed forms the tables obey for the maximally mixed state serve as
//! test oracles, not as the implementation.

use crate::error::{Error, Result};
use crate::linalg::eig_hermitian;
use crate::povm::{luders_update, noisy_spin, outcome_distribution, Axis};
use crate::states::DensityOp;
use crate::uncertainty::JointProbTable;

/// Three coplanar axes separated by 120°, so every pair has dot product
/// `-1/2`.
pub fn trine_axes() -> [Axis; 3] {
    let axis = |k: f64| {
        let angle = 2.0 * std::f64::consts::PI * k / 3.0;
        Axis::new(angle.cos(), angle.sin(), 0.0).expect("unit vector")
    };
    [axis(0.0), axis(1.0), axis(2.0)]
}

/// Sequential measurement: first the unsharp observable along
/// `axis_first` at unsharpness `eta` (with Lüders update), then the sharp
/// observable along `axis_second`. Returns `p(x_k, x_l)` with the first
/// outcome on rows.
pub fn sequential_pair_table(
    rho: &DensityOp,
    axis_first: &Axis,
    axis_second: &Axis,
    eta: f64,
) -> Result<JointProbTable> {
    sequential_pair_table_general(rho, (axis_first, eta), (axis_second, 1.0))
}

/// General two-stage variant with independent unsharpness per stage.
pub fn sequential_pair_table_general(
    rho: &DensityOp,
    first: (&Axis, f64),
    second: (&Axis, f64),
) -> Result<JointProbTable> {
    if rho.dim() != 2 {
        return Err(Error::BadDim(rho.dim()));
    }
    let povm_first = noisy_spin(first.0, first.1)?;
    let povm_second = noisy_spin(second.0, second.1)?;
    let cols = povm_second.len();
    let mut p = vec![0.0; povm_first.len() * cols];
    for (i, outcome) in povm_first.outcomes().iter().enumerate() {
        match luders_update(rho, &outcome.effect) {
            Ok((post, prob)) => {
                let conditional = outcome_distribution(&post, &povm_second)?;
                for (j, q) in conditional.iter().enumerate() {
                    p[i * cols + j] = prob * q;
                }
            }
            Err(Error::ZeroProbabilityBranch(_)) => {
                // Branch never occurs; its row stays zero.
            }
            Err(e) => return Err(e),
        }
    }
    JointProbTable::new(povm_first.labels(), povm_second.labels(), p)
}

/// `⟨X_k X_l⟩ = Σ p(x_k, x_l) x_k x_l` with labels as outcome values.
pub fn pair_correlation(table: &JointProbTable) -> f64 {
    let mut acc = 0.0;
    for (i, &xa) in table.labels_a().iter().enumerate() {
        for (j, &xb) in table.labels_b().iter().enumerate() {
            acc += table.prob(i, j) * xa as f64 * xb as f64;
        }
    }
    acc
}

/// The three pairwise correlations `⟨X₁X₂⟩, ⟨X₂X₃⟩, ⟨X₁X₃⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationTriple {
    c12: f64,
    c23: f64,
    c13: f64,
}

impl CorrelationTriple {
    pub fn new(c12: f64, c23: f64, c13: f64) -> Result<Self> {
        for &c in &[c12, c23, c13] {
            if !(-1.0..=1.0).contains(&c) {
                return Err(Error::CorrelationOutOfRange(c));
            }
        }
        Ok(Self { c12, c23, c13 })
    }

    pub fn c12(&self) -> f64 {
        self.c12
    }

    pub fn c23(&self) -> f64 {
        self.c23
    }

    pub fn c13(&self) -> f64 {
        self.c13
    }
}

/// Runs the sequential unsharp-sharp protocol on the ordered pairs
/// (1,2), (2,3), (1,3) of the given axes, with the lower index measured
/// first.
pub fn sequential_correlations(
    axes: &[Axis; 3],
    rho: &DensityOp,
    eta: f64,
) -> Result<CorrelationTriple> {
    let c = |k: usize, l: usize| -> Result<f64> {
        Ok(pair_correlation(&sequential_pair_table(
            rho, &axes[k], &axes[l], eta,
        )?))
    };
    CorrelationTriple::new(c(0, 1)?, c(1, 2)?, c(0, 2)?)
}

/// Symmetric 4x4 moment matrix over the monomial row
/// `ξᵀ = (1, x₁x₂, x₂x₃, x₁x₃)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentMatrix {
    m: [[f64; 4]; 4],
}

impl MomentMatrix {
    pub fn entries(&self) -> &[[f64; 4]; 4] {
        &self.m
    }
}

/// Builds the moment matrix in the fixed monomial arrangement.
pub fn build_moment_matrix(c: &CorrelationTriple) -> MomentMatrix {
    let (p, q, r) = (c.c12, c.c23, c.c13);
    MomentMatrix {
        m: [
            [1.0, p, q, r],
            [p, 1.0, r, q],
            [q, r, 1.0, p],
            [r, q, p, 1.0],
        ],
    }
}

/// Ascending eigenvalues of the moment matrix, computed numerically.
///
/// For the fixed arrangement they coincide with the four even sign
/// combinations `1 ± c12 ± c23 ± c13`.
pub fn moment_eigenvalues(m: &MomentMatrix) -> [f64; 4] {
    let flat: Vec<f64> = m.m.iter().flatten().copied().collect();
    let h = crate::linalg::HermitianOp::from_real(4, &flat).expect("moment matrix is symmetric");
    let values = eig_hermitian(&h).values;
    [values[0], values[1], values[2], values[3]]
}

/// Three-term Leggett-Garg combination `⟨X₁X₂⟩ + ⟨X₂X₃⟩ - ⟨X₁X₃⟩`;
/// classical joint distributions keep it at or below 1.
pub fn lgi_value(c: &CorrelationTriple) -> f64 {
    c.c12 + c.c23 - c.c13
}

/// Largest unsharpness at which the sequentially measured moment matrix
/// stays positive semidefinite (min eigenvalue ≥ -1e-12), located by
/// bisection to a gap of 1e-6.
pub fn positivity_threshold(axes: &[Axis; 3], rho: &DensityOp) -> Result<f64> {
    let positive = |eta: f64| -> Result<bool> {
        let c = sequential_correlations(axes, rho, eta)?;
        let eigs = moment_eigenvalues(&build_moment_matrix(&c));
        Ok(eigs[0] >= -1e-12)
    };
    if positive(1.0)? {
        return Ok(1.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if positive(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
