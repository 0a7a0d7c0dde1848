//! Joint measurability of dichotomic qubit POVMs.
//!
//! A collection of POVMs is compatible exactly when a grand POVM exists
//! whose marginals reproduce every member. For qubit effects written in
//! Bloch form `G = a·1 + b⃗·σ⃗`, positivity of `G` and of `1 - G` are the
//! two second-order-cone conditions `|b⃗| ≤ a` and `|b⃗| ≤ 1 - a`, so the
//! grand-POVM search becomes a convex feasibility problem over real Bloch
//! coordinates:
//!
//! * an affine subspace holding the marginal and completeness equations,
//!   projected via a precomputed orthonormalization of the constraint rows;
//! * per-outcome effect-validity cones with analytic projections.
//!
//! The solver runs Dykstra's alternating projections (correction terms on
//! the cone sets, plain projection on the affine subspace, which is exact
//! for subspaces). A verdict of `Feasible` is only issued once an explicit
//! witness has been extracted and revalidated independently of the solver
//! path.

use crate::error::{Error, Result};
use crate::linalg::{pauli_x, pauli_y, pauli_z, real_trace_product, HermitianOp};
use crate::povm::{noisy_spin, Axis, Effect, Outcome, Povm};

/// Marginal equations must hold on a witness to this max-abs tolerance.
pub const WITNESS_MARGINAL_TOL: f64 = 1e-7;

/// Bisection gap used by [`threshold`] searches.
pub const THRESHOLD_GAP: f64 = 1e-3;

/// Qubit effect in Bloch coordinates: `E = a·1 + b⃗·σ⃗`.
///
/// The spectrum is `a ± |b⃗|`, so `E` is a valid effect iff `|b⃗| ≤ a` and
/// `|b⃗| ≤ 1 - a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochEffect {
    pub a: f64,
    pub b: [f64; 3],
}

impl BlochEffect {
    pub fn from_hermitian(op: &HermitianOp) -> Result<Self> {
        if op.dim() != 2 {
            return Err(Error::BadDim(op.dim()));
        }
        let half = 0.5;
        Ok(Self {
            a: op.trace_real() * half,
            b: [
                real_trace_product(op.mat(), pauli_x().mat()) * half,
                real_trace_product(op.mat(), pauli_y().mat()) * half,
                real_trace_product(op.mat(), pauli_z().mat()) * half,
            ],
        })
    }

    pub fn to_hermitian(&self) -> HermitianOp {
        let mut m = HermitianOp::identity(2).scale(self.a);
        m = m.add(&pauli_x().scale(self.b[0]));
        m = m.add(&pauli_y().scale(self.b[1]));
        m = m.add(&pauli_z().scale(self.b[2]));
        HermitianOp::new(m).expect("Bloch combination is Hermitian")
    }

    pub fn bloch_norm(&self) -> f64 {
        (self.b[0] * self.b[0] + self.b[1] * self.b[1] + self.b[2] * self.b[2]).sqrt()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.a - self.bloch_norm()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.a + self.bloch_norm()
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        let n = self.bloch_norm();
        n <= self.a + tol && n <= 1.0 - self.a + tol
    }
}

/// A grand POVM over `n` dichotomic observables: one Bloch effect per
/// outcome tuple `(x_1, …, x_n)`, `x_i = ±1`.
///
/// Tuples are indexed with observable 0 in the most significant position
/// and bit value 1 meaning outcome +1, so for n = 2 the order is
/// `(+,+), (+,-), (-,+), (-,-)` reading indices 3, 2, 1, 0.
#[derive(Clone, Debug)]
pub struct GrandPovm {
    n_observables: usize,
    effects: Vec<BlochEffect>,
}

impl GrandPovm {
    pub fn new(n_observables: usize, effects: Vec<BlochEffect>) -> Result<Self> {
        if !(2..=3).contains(&n_observables) {
            return Err(Error::UnsupportedArity(n_observables));
        }
        if effects.len() != 1 << n_observables {
            return Err(Error::DimMismatch(effects.len(), 1 << n_observables));
        }
        Ok(Self {
            n_observables,
            effects,
        })
    }

    pub fn n_observables(&self) -> usize {
        self.n_observables
    }

    pub fn effects(&self) -> &[BlochEffect] {
        &self.effects
    }

    /// Outcome tuple of storage index `idx`, entries ±1.
    pub fn outcome_tuple(&self, idx: usize) -> Vec<i8> {
        (0..self.n_observables)
            .map(|i| {
                if (idx >> (self.n_observables - 1 - i)) & 1 == 1 {
                    1
                } else {
                    -1
                }
            })
            .collect()
    }

    /// Marginal effect `Σ_{λ: λ_i = outcome} G(λ)` for observable `i`.
    pub fn marginal(&self, observable: usize, outcome: i8) -> BlochEffect {
        let want = if outcome > 0 { 1 } else { 0 };
        let shift = self.n_observables - 1 - observable;
        let mut a = 0.0;
        let mut b = [0.0; 3];
        for (idx, e) in self.effects.iter().enumerate() {
            if (idx >> shift) & 1 == want {
                a += e.a;
                for (acc, &v) in b.iter_mut().zip(&e.b) {
                    *acc += v;
                }
            }
        }
        BlochEffect { a, b }
    }

    /// Worst max-abs deviation of any marginal from its target effect.
    pub fn max_marginal_error(&self, targets: &[Povm]) -> Result<f64> {
        if targets.len() != self.n_observables {
            return Err(Error::DimMismatch(targets.len(), self.n_observables));
        }
        let mut worst = 0.0f64;
        for (i, povm) in targets.iter().enumerate() {
            for outcome in povm.outcomes() {
                let got = self.marginal(i, outcome.value as i8).to_hermitian();
                worst = worst.max(got.max_abs_diff(outcome.effect.op().mat()));
            }
        }
        Ok(worst)
    }

    /// Repackages the grand POVM as an ordinary [`Povm`]; labels are the
    /// tuple indices and values decrease with the index so the all-plus
    /// tuple comes first.
    pub fn to_povm(&self) -> Result<Povm> {
        let outcomes = self
            .effects
            .iter()
            .enumerate()
            .map(|(idx, e)| Outcome {
                label: idx as i64,
                value: idx as f64,
                effect: Effect::unchecked(e.to_hermitian()),
            })
            .collect();
        Povm::unchecked(outcomes)
    }
}

/// Feasibility problem: find a grand POVM with the given target marginals.
#[derive(Clone, Debug)]
pub struct GrandPovmProblem {
    targets: Vec<Povm>,
}

impl GrandPovmProblem {
    /// Targets must be valid dichotomic qubit POVMs, two or three of them.
    pub fn new(targets: Vec<Povm>) -> Result<Self> {
        if !(2..=3).contains(&targets.len()) {
            return Err(Error::UnsupportedArity(targets.len()));
        }
        for povm in &targets {
            if povm.dim() != 2 {
                return Err(Error::BadDim(povm.dim()));
            }
            if povm.len() != 2 {
                return Err(Error::UnsupportedArity(povm.len()));
            }
            // The constraint builder drops each observable's second marginal
            // equation as redundant, which is only sound for true POVMs.
            let report = crate::povm::validate(povm);
            if report.completeness_residual > crate::povm::COMPLETENESS_TOL {
                return Err(Error::Incomplete(report.completeness_residual));
            }
            if report.max_negativity > crate::povm::EFFECT_TOL {
                return Err(Error::NotEffect {
                    min: -report.max_negativity,
                    max: 1.0 + report.max_negativity,
                });
            }
        }
        Ok(Self { targets })
    }

    /// Noisy spin observables along the given axes at unsharpness `eta`.
    pub fn noisy_spins(axes: &[Axis], eta: f64) -> Result<Self> {
        let targets = axes
            .iter()
            .map(|ax| noisy_spin(ax, eta))
            .collect::<Result<Vec<_>>>()?;
        Self::new(targets)
    }

    pub fn n_observables(&self) -> usize {
        self.targets.len()
    }

    pub fn targets(&self) -> &[Povm] {
        &self.targets
    }

    pub fn n_variables(&self) -> usize {
        4 * (1 << self.targets.len())
    }

    /// Builds the affine marginal system over Bloch coordinates.
    ///
    /// Rows: completeness `Σ_λ G(λ) = 1` (4 scalar rows) plus, per
    /// observable, the outcome `+1` marginal equation (4 scalar rows).
    /// The outcome `-1` equations are deduplicated away: they follow from
    /// completeness because each target's own effect pair sums to the
    /// identity.
    pub fn marginal_constraints(&self) -> AffineSystem {
        let n = self.targets.len();
        let n_vars = self.n_variables();
        let mut rows = Vec::with_capacity(4 * (n + 1));
        let mut rhs = Vec::with_capacity(4 * (n + 1));

        for comp in 0..4 {
            let mut row = vec![0.0; n_vars];
            for idx in 0..(1 << n) {
                row[4 * idx + comp] = 1.0;
            }
            rows.push(row);
            rhs.push(if comp == 0 { 1.0 } else { 0.0 });
        }

        for (i, povm) in self.targets.iter().enumerate() {
            let plus = BlochEffect::from_hermitian(povm.outcomes()[0].effect.op())
                .expect("targets are qubit effects");
            let shift = n - 1 - i;
            for comp in 0..4 {
                let mut row = vec![0.0; n_vars];
                for idx in 0..(1 << n) {
                    if (idx >> shift) & 1 == 1 {
                        row[4 * idx + comp] = 1.0;
                    }
                }
                rows.push(row);
                rhs.push(match comp {
                    0 => plus.a,
                    c => plus.b[c - 1],
                });
            }
        }

        AffineSystem { n_vars, rows, rhs }
    }
}

/// Affine system `A x = c` over the flattened Bloch coordinates
/// `(a, bx, by, bz)` per outcome tuple.
#[derive(Clone, Debug)]
pub struct AffineSystem {
    n_vars: usize,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl AffineSystem {
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Max-abs residual `|A x - c|` at a point.
    pub fn residual_max(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, c)| (dot(row, x) - c).abs())
            .fold(0.0, f64::max)
    }

    /// Orthonormalizes the rows (modified Gram-Schmidt, run twice) into a
    /// projector; detects redundant and inconsistent rows.
    fn orthonormalize(&self) -> OrthoOutcome {
        let mut qs: Vec<Vec<f64>> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        for (row, &c) in self.rows.iter().zip(&self.rhs) {
            let mut r = row.clone();
            let mut cc = c;
            for _ in 0..2 {
                for (q, beta) in qs.iter().zip(&betas) {
                    let t = dot(q, &r);
                    axpy(-t, q, &mut r);
                    cc -= t * beta;
                }
            }
            let norm = dot(&r, &r).sqrt();
            if norm < 1e-12 {
                if cc.abs() > 1e-9 {
                    return OrthoOutcome::Inconsistent { residual: cc.abs() };
                }
                continue; // redundant row
            }
            for v in r.iter_mut() {
                *v /= norm;
            }
            qs.push(r);
            betas.push(cc / norm);
        }
        OrthoOutcome::Projector(AffineProjector { qs, betas })
    }

    /// Rank of the row system after deduplication.
    pub fn rank(&self) -> usize {
        match self.orthonormalize() {
            OrthoOutcome::Projector(p) => p.qs.len(),
            OrthoOutcome::Inconsistent { .. } => 0,
        }
    }
}

enum OrthoOutcome {
    Projector(AffineProjector),
    Inconsistent { residual: f64 },
}

struct AffineProjector {
    qs: Vec<Vec<f64>>,
    betas: Vec<f64>,
}

impl AffineProjector {
    /// Exact orthogonal projection onto `{x : A x = c}`.
    fn project(&self, x: &mut [f64]) {
        for (q, beta) in self.qs.iter().zip(&self.betas) {
            let t = dot(q, x) - beta;
            axpy(-t, q, x);
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Projection onto the second-order cone `{(s, v) : |v| ≤ s}` in place on
/// a 4-slot `(s, v0, v1, v2)` chunk.
fn soc_project(chunk: &mut [f64]) {
    let s = chunk[0];
    let nv = (chunk[1] * chunk[1] + chunk[2] * chunk[2] + chunk[3] * chunk[3]).sqrt();
    if nv <= s {
        return;
    }
    if nv <= -s {
        chunk.fill(0.0);
        return;
    }
    let alpha = 0.5 * (s + nv);
    chunk[0] = alpha;
    let scale = alpha / nv;
    for v in &mut chunk[1..] {
        *v *= scale;
    }
}

/// Projection onto the upper cone `{(a, v) : |v| ≤ 1 - a}` via `t = 1 - a`.
fn upper_project(chunk: &mut [f64]) {
    chunk[0] = 1.0 - chunk[0];
    soc_project(chunk);
    chunk[0] = 1.0 - chunk[0];
}

/// Exact projection onto the effect-validity lens
/// `{(a, v) : |v| ≤ a and |v| ≤ 1 - a}` for one Bloch chunk.
///
/// Used for residual measurement and witness extraction; the Dykstra loop
/// itself keeps the two cones as separate sets.
fn lens_project(chunk: &[f64]) -> [f64; 4] {
    let a = chunk[0];
    let v = [chunk[1], chunk[2], chunk[3]];
    let nv = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if nv <= a && nv <= 1.0 - a {
        return [a, v[0], v[1], v[2]];
    }
    let mut lower = [a, v[0], v[1], v[2]];
    soc_project(&mut lower);
    let nl = (lower[1] * lower[1] + lower[2] * lower[2] + lower[3] * lower[3]).sqrt();
    if nl <= 1.0 - lower[0] + 1e-15 {
        return lower;
    }
    let mut upper = [a, v[0], v[1], v[2]];
    upper_project(&mut upper);
    let nu = (upper[1] * upper[1] + upper[2] * upper[2] + upper[3] * upper[3]).sqrt();
    if nu <= upper[0] + 1e-15 {
        return upper;
    }
    // Both cone constraints active: nearest point on the rim circle
    // a = 1/2, |v| = 1/2. nv > 0 here since v = 0 never reaches this arm.
    [0.5, 0.5 * v[0] / nv, 0.5 * v[1] / nv, 0.5 * v[2] / nv]
}

fn lens_residual(x: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for chunk in x.chunks_exact(4) {
        let proj = lens_project(chunk);
        for (orig, p) in chunk.iter().zip(&proj) {
            worst = worst.max((orig - p).abs());
        }
    }
    worst
}

fn lens_all(x: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    for chunk in x.chunks_exact(4) {
        out.extend_from_slice(&lens_project(chunk));
    }
    out
}

/// Solver configuration. The defaults are the module contract: 20000
/// iterations, feasibility residual 1e-8, infeasibility floor 1e-5.
#[derive(Clone, Copy, Debug)]
pub struct SolveConfig {
    pub max_iter: usize,
    pub tol_feas: f64,
    pub tol_infeas: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            max_iter: 20_000,
            tol_feas: 1e-8,
            tol_infeas: 1e-5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Feasible,
    Infeasible,
    Indeterminate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Feasible => "feasible",
            Verdict::Infeasible => "infeasible",
            Verdict::Indeterminate => "indeterminate",
        };
        f.write_str(s)
    }
}

/// Outcome of a feasibility solve. `verdict == Feasible` guarantees the
/// witness is present, passes POVM validation, and reproduces every
/// marginal within [`WITNESS_MARGINAL_TOL`].
#[derive(Clone, Debug)]
pub struct FeasibilityReport {
    pub verdict: Verdict,
    pub residual: f64,
    pub iterations: usize,
    pub witness: Option<GrandPovm>,
}

/// Decides joint measurability by Dykstra alternating projections between
/// the marginal subspace and the per-outcome effect-validity cones.
pub fn solve_feasibility(problem: &GrandPovmProblem, cfg: &SolveConfig) -> FeasibilityReport {
    solve_with_start(problem, cfg, None)
}

fn solve_with_start(
    problem: &GrandPovmProblem,
    cfg: &SolveConfig,
    start: Option<&[f64]>,
) -> FeasibilityReport {
    let system = problem.marginal_constraints();
    let projector = match system.orthonormalize() {
        OrthoOutcome::Projector(p) => p,
        OrthoOutcome::Inconsistent { residual } => {
            return FeasibilityReport {
                verdict: Verdict::Infeasible,
                residual,
                iterations: 0,
                witness: None,
            };
        }
    };

    let n = problem.n_observables();
    let n_vars = problem.n_variables();
    let mut x = match start {
        Some(x0) if x0.len() == n_vars => x0.to_vec(),
        _ => {
            // Center of the trivial grand POVM G(λ) = 1/2ⁿ.
            let mut x0 = vec![0.0; n_vars];
            for idx in 0..(1 << n) {
                x0[4 * idx] = 1.0 / (1 << n) as f64;
            }
            x0
        }
    };
    let mut corr_lower = vec![0.0; n_vars];
    let mut corr_upper = vec![0.0; n_vars];
    let mut checkpoint: Option<f64> = None;
    let mut residual = f64::INFINITY;

    for iter in 1..=cfg.max_iter {
        projector.project(&mut x);
        residual = lens_residual(&x);

        if residual < cfg.tol_feas {
            if let Some(witness) = extract_witness(&x, &projector, problem) {
                return FeasibilityReport {
                    verdict: Verdict::Feasible,
                    residual,
                    iterations: iter,
                    witness: Some(witness),
                };
            }
        }

        if iter % 100 == 0 {
            if let Some(prev) = checkpoint {
                if (residual - prev).abs() < 1e-12 && residual > cfg.tol_infeas {
                    return FeasibilityReport {
                        verdict: Verdict::Infeasible,
                        residual,
                        iterations: iter,
                        witness: None,
                    };
                }
            }
            checkpoint = Some(residual);
        }

        dykstra_cone_step(&mut x, &mut corr_lower, soc_project);
        dykstra_cone_step(&mut x, &mut corr_upper, upper_project);
    }

    FeasibilityReport {
        verdict: Verdict::Indeterminate,
        residual,
        iterations: cfg.max_iter,
        witness: None,
    }
}

fn dykstra_cone_step(x: &mut [f64], correction: &mut [f64], proj: fn(&mut [f64])) {
    for (xi, ci) in x.iter_mut().zip(correction.iter()) {
        *xi += ci;
    }
    let before = x.to_vec();
    for chunk in x.chunks_exact_mut(4) {
        proj(chunk);
    }
    for ((ci, bi), xi) in correction.iter_mut().zip(before).zip(x.iter()) {
        *ci = bi - xi;
    }
}

/// Polishes the affine iterate with plain alternating projections, snaps
/// it onto the cones, and accepts it only if the result independently
/// passes POVM validation and the marginal equations.
fn extract_witness(
    x: &[f64],
    projector: &AffineProjector,
    problem: &GrandPovmProblem,
) -> Option<GrandPovm> {
    let mut w = x.to_vec();
    for _ in 0..200 {
        let snapped = lens_all(&w);
        let moved = w
            .iter()
            .zip(&snapped)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if moved < 1e-13 {
            break;
        }
        w = snapped;
        projector.project(&mut w);
    }
    let candidate = lens_all(&w);

    let effects: Vec<BlochEffect> = candidate
        .chunks_exact(4)
        .map(|c| BlochEffect {
            a: c[0],
            b: [c[1], c[2], c[3]],
        })
        .collect();
    let grand = GrandPovm::new(problem.n_observables(), effects).ok()?;

    if grand.max_marginal_error(problem.targets()).ok()? > WITNESS_MARGINAL_TOL {
        return None;
    }
    let povm = grand.to_povm().ok()?;
    if !crate::povm::validate(&povm).ok {
        return None;
    }
    Some(grand)
}

/// Analytic compatibility criterion for a pair of unbiased dichotomic
/// qubit POVMs with observable Bloch vectors `b⃗_i = η_i n̂_i`:
/// compatible iff `|b⃗₁ + b⃗₂| + |b⃗₁ - b⃗₂| ≤ 2`.
pub fn pair_criterion_unbiased(b1: [f64; 3], b2: [f64; 3]) -> bool {
    let norm = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let sum = [b1[0] + b2[0], b1[1] + b2[1], b1[2] + b2[2]];
    let diff = [b1[0] - b2[0], b1[1] - b2[1], b1[2] - b2[2]];
    norm(sum) + norm(diff) <= 2.0 + 1e-12
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThresholdMode {
    /// Every pair of observables must be jointly measurable.
    Pairwise,
    /// All observables must share a single grand POVM.
    Full,
}

/// One bisection probe: the unsharpness tried and the solver outcome.
#[derive(Clone, Copy, Debug)]
pub struct ThresholdProbe {
    pub eta: f64,
    pub feasible: bool,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct ThresholdSearch {
    pub eta_star: f64,
    pub probes: Vec<ThresholdProbe>,
}

/// Locates the largest unsharpness at which the axes remain compatible,
/// by bisection over solver verdicts down to a gap of [`THRESHOLD_GAP`].
///
/// `Indeterminate` probes count as infeasible, which biases the estimate
/// conservatively; feasible probes warm-start later ones.
pub fn threshold(axes: &[Axis], mode: ThresholdMode, cfg: &SolveConfig) -> Result<ThresholdSearch> {
    threshold_with_gap(axes, mode, cfg, THRESHOLD_GAP)
}

/// [`threshold`] with an explicit bisection gap.
pub fn threshold_with_gap(
    axes: &[Axis],
    mode: ThresholdMode,
    cfg: &SolveConfig,
    gap: f64,
) -> Result<ThresholdSearch> {
    if !(2..=3).contains(&axes.len()) {
        return Err(Error::UnsupportedArity(axes.len()));
    }
    let pairs: Vec<(usize, usize)> = match mode {
        ThresholdMode::Full => vec![],
        ThresholdMode::Pairwise => (0..axes.len())
            .flat_map(|i| ((i + 1)..axes.len()).map(move |j| (i, j)))
            .collect(),
    };

    let mut warm: Vec<Option<Vec<f64>>> = vec![None; pairs.len().max(1)];
    let mut probes = Vec::new();

    let mut probe = |eta: f64, warm: &mut Vec<Option<Vec<f64>>>| -> Result<bool> {
        let mut feasible = true;
        let mut worst_residual = 0.0f64;
        let mut total_iters = 0usize;
        let problems: Vec<GrandPovmProblem> = match mode {
            ThresholdMode::Full => vec![GrandPovmProblem::noisy_spins(axes, eta)?],
            ThresholdMode::Pairwise => pairs
                .iter()
                .map(|&(i, j)| GrandPovmProblem::noisy_spins(&[axes[i], axes[j]], eta))
                .collect::<Result<Vec<_>>>()?,
        };
        for (k, problem) in problems.iter().enumerate() {
            let report = solve_with_start(problem, cfg, warm[k].as_deref());
            worst_residual = worst_residual.max(report.residual);
            total_iters += report.iterations;
            match report.verdict {
                Verdict::Feasible => {
                    let flat: Vec<f64> = report
                        .witness
                        .as_ref()
                        .expect("feasible verdict carries a witness")
                        .effects()
                        .iter()
                        .flat_map(|e| [e.a, e.b[0], e.b[1], e.b[2]])
                        .collect();
                    warm[k] = Some(flat);
                }
                _ => feasible = false,
            }
        }
        probes.push(ThresholdProbe {
            eta,
            feasible,
            residual: worst_residual,
            iterations: total_iters,
        });
        Ok(feasible)
    };

    let eta_star = if probe(1.0, &mut warm)? {
        1.0
    } else {
        let mut lo = 0.0;
        let mut hi = 1.0;
        let lo_ok = probe(0.0, &mut warm)?;
        debug_assert!(lo_ok, "eta = 0 must always be feasible");
        while hi - lo > gap {
            let mid = 0.5 * (lo + hi);
            if probe(mid, &mut warm)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };

    // Verdict monotonicity over the probe history: feasibility can only be
    // lost, never regained, as eta grows.
    let max_feasible = probes
        .iter()
        .filter(|p| p.feasible)
        .map(|p| p.eta)
        .fold(0.0, f64::max);
    let min_infeasible = probes
        .iter()
        .filter(|p| !p.feasible)
        .map(|p| p.eta)
        .fold(f64::INFINITY, f64::min);
    debug_assert!(
        max_feasible <= min_infeasible,
        "non-monotone probe history: feasible at {max_feasible}, infeasible at {min_infeasible}"
    );

    Ok(ThresholdSearch { eta_star, probes })
}

/// The explicit pair grand POVM `G(x, z) = (1 + ηxσ_x + ηzσ_z)/4`, valid
/// exactly on `0 ≤ η ≤ 1/√2`.
pub fn canonical_pair_grand_povm(eta: f64) -> Result<GrandPovm> {
    let max = std::f64::consts::FRAC_1_SQRT_2;
    if !(0.0..=max + 1e-12).contains(&eta) {
        return Err(Error::EtaOutOfRange { eta, max });
    }
    let mut effects = Vec::with_capacity(4);
    // Index 3 = (+,+), 2 = (+,-), 1 = (-,+), 0 = (-,-); observable order (x, z).
    for idx in 0..4usize {
        let x = if (idx >> 1) & 1 == 1 { 1.0 } else { -1.0 };
        let z = if idx & 1 == 1 { 1.0 } else { -1.0 };
        effects.push(BlochEffect {
            a: 0.25,
            b: [0.25 * eta * x, 0.0, 0.25 * eta * z],
        });
    }
    GrandPovm::new(2, effects)
}
