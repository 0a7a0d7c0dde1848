//! Dense complex-Hermitian linear algebra for dimensions 2 and 4.
//!
//! Everything here is sized for qubit and two-qubit operators: closed-form
//! eigendecomposition for 2x2, cyclic complex Jacobi for 4x4, PSD square
//! roots, trace norms via singular values, tensor products, and partial
//! traces. No external linear-algebra dependency; the matrices are tiny and
//! the dimensions fixed.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum tolerated asymmetry `max |H_ij - conj(H_ji)|` at construction.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Off-diagonal Frobenius norm at which the Jacobi sweep stops.
const JACOBI_OFFDIAG_TOL: f64 = 1e-14;

/// Jacobi sweep cap; exceeding it is an internal defect, not an input error.
const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense square complex matrix in row-major layout.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMat {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMat {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds from a row-major slice; the length must be `dim * dim`.
    pub fn from_slice(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimMismatch(entries.len(), dim * dim));
        }
        Ok(Self {
            dim,
            data: entries.to_vec(),
        })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimMismatch(entries.len(), dim * dim));
        }
        Ok(Self {
            dim,
            data: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let aik = self.get(i, k);
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..d {
                    let v = out.get(i, j) + aik * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        assert_eq!(self.dim, rhs.dim, "matrix comparison dimension mismatch");
        self.data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `Re Tr[a b]` without forming the product; both operands must be square
/// with equal dimension.
pub fn real_trace_product(a: &ComplexMat, b: &ComplexMat) -> f64 {
    assert_eq!(a.dim, b.dim, "trace product dimension mismatch");
    let d = a.dim;
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            acc += (a.get(i, j) * b.get(j, i)).re;
        }
    }
    acc
}

/// Validated Hermitian operator of dimension 2 or 4.
///
/// Construction symmetrizes `(H + H†)/2` to absorb float noise and rejects
/// asymmetry beyond [`HERMITICITY_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOp {
    mat: ComplexMat,
}

impl HermitianOp {
    pub fn new(mat: ComplexMat) -> Result<Self> {
        let d = mat.dim;
        if d != 2 && d != 4 {
            return Err(Error::BadDim(d));
        }
        let mut asym: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                asym = asym.max((mat.get(i, j) - mat.get(j, i).conj()).norm());
            }
        }
        if asym > HERMITICITY_TOL {
            return Err(Error::NotHermitian(asym));
        }
        let mut sym = ComplexMat::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let v = (mat.get(i, j) + mat.get(j, i).conj()) * 0.5;
                sym.set(i, j, v);
            }
        }
        Ok(Self { mat: sym })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(ComplexMat::from_real(dim, entries)?)
    }

    pub fn from_diag(diag: &[f64]) -> Result<Self> {
        let d = diag.len();
        let mut m = ComplexMat::zeros(d);
        for (i, &x) in diag.iter().enumerate() {
            m.set(i, i, Complex64::new(x, 0.0));
        }
        Self::new(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(ComplexMat::identity(dim)).expect("identity is Hermitian")
    }

    pub fn mat(&self) -> &ComplexMat {
        &self.mat
    }

    pub fn trace_real(&self) -> f64 {
        self.mat.trace().re
    }
}

impl std::ops::Deref for HermitianOp {
    type Target = ComplexMat;

    fn deref(&self) -> &ComplexMat {
        &self.mat
    }
}

pub fn pauli_x() -> HermitianOp {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    HermitianOp::new(ComplexMat::from_slice(2, &[o, one, one, o]).unwrap()).unwrap()
}

pub fn pauli_y() -> HermitianOp {
    let o = Complex64::new(0.0, 0.0);
    HermitianOp::new(
        ComplexMat::from_slice(2, &[o, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), o])
            .unwrap(),
    )
    .unwrap()
}

pub fn pauli_z() -> HermitianOp {
    HermitianOp::from_diag(&[1.0, -1.0]).unwrap()
}

/// The spin operator `σ⃗ · n⃗` for an arbitrary real direction vector.
pub fn pauli_dot(n: [f64; 3]) -> HermitianOp {
    let m = ComplexMat::from_slice(
        2,
        &[
            Complex64::new(n[2], 0.0),
            Complex64::new(n[0], -n[1]),
            Complex64::new(n[0], n[1]),
            Complex64::new(-n[2], 0.0),
        ],
    )
    .unwrap();
    HermitianOp::new(m).unwrap()
}

/// Eigendecomposition of a Hermitian operator: ascending real eigenvalues
/// and orthonormal eigenvectors as matrix columns.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMat,
}

impl Eigen {
    /// `V diag(λ) V†`, for round-trip checks.
    pub fn reconstruct(&self) -> ComplexMat {
        let d = self.vectors.dim();
        let mut scaled = self.vectors.clone();
        for j in 0..d {
            for i in 0..d {
                let v = scaled.get(i, j) * self.values[j];
                scaled.set(i, j, v);
            }
        }
        scaled.mul(&self.vectors.adjoint())
    }
}

/// Eigendecomposition dispatcher: closed form for d = 2, cyclic complex
/// Jacobi for d = 4.
pub fn eig_hermitian(h: &HermitianOp) -> Eigen {
    match h.dim() {
        2 => eig2(h.mat()),
        4 => jacobi(h.mat()),
        d => unreachable!("HermitianOp admits only d in {{2, 4}}, got {d}"),
    }
}

/// Closed-form 2x2 Hermitian eigendecomposition via trace and determinant.
fn eig2(m: &ComplexMat) -> Eigen {
    let a = m.get(0, 0).re;
    let c = m.get(1, 1).re;
    let b = m.get(0, 1);
    let bn = b.norm();

    if bn < 1e-300 {
        // Effectively diagonal; order the basis by eigenvalue.
        let (values, vectors) = if a <= c {
            (vec![a, c], ComplexMat::identity(2))
        } else {
            let mut v = ComplexMat::zeros(2);
            v.set(0, 1, Complex64::new(1.0, 0.0));
            v.set(1, 0, Complex64::new(1.0, 0.0));
            (vec![c, a], v)
        };
        return Eigen { values, vectors };
    }

    let mid = 0.5 * (a + c);
    let rad = (0.25 * (a - c) * (a - c) + bn * bn).sqrt();
    let lo = mid - rad;
    let hi = mid + rad;

    // (b, hi - a) is an eigenvector for hi; its orthogonal complement
    // (-(hi - a), conj(b)) belongs to lo. hi - a is real.
    let r = hi - a;
    let norm = (bn * bn + r * r).sqrt();
    let mut vectors = ComplexMat::zeros(2);
    vectors.set(0, 0, Complex64::new(-r / norm, 0.0));
    vectors.set(1, 0, b.conj() / norm);
    vectors.set(0, 1, b / norm);
    vectors.set(1, 1, Complex64::new(r / norm, 0.0));

    Eigen {
        values: vec![lo, hi],
        vectors,
    }
}

fn offdiag_frobenius(m: &ComplexMat) -> f64 {
    let d = m.dim();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                acc += m.get(i, j).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Cyclic complex Jacobi: each pivot applies the exact eigenbasis of its
/// 2x2 Hermitian block, annihilating that off-diagonal entry.
fn jacobi(m: &ComplexMat) -> Eigen {
    let d = m.dim();
    let mut a = m.clone();
    let mut v = ComplexMat::identity(d);

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if offdiag_frobenius(&a) <= JACOBI_OFFDIAG_TOL {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a.get(p, q);
                if apq.norm() < 1e-300 {
                    continue;
                }
                let block = ComplexMat::from_slice(
                    2,
                    &[
                        Complex64::new(a.get(p, p).re, 0.0),
                        apq,
                        apq.conj(),
                        Complex64::new(a.get(q, q).re, 0.0),
                    ],
                )
                .unwrap();
                let g = eig2(&block).vectors;
                let (g00, g01) = (g.get(0, 0), g.get(0, 1));
                let (g10, g11) = (g.get(1, 0), g.get(1, 1));

                // Column update A <- A G on columns p, q.
                for k in 0..d {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * g00 + akq * g10);
                    a.set(k, q, akp * g01 + akq * g11);
                }
                // Row update A <- G† A on rows p, q.
                for k in 0..d {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, g00.conj() * apk + g10.conj() * aqk);
                    a.set(q, k, g01.conj() * apk + g11.conj() * aqk);
                }
                // Accumulate V <- V G.
                for k in 0..d {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * g00 + vkq * g10);
                    v.set(k, q, vkp * g01 + vkq * g11);
                }
            }
        }
    }
    if !converged && offdiag_frobenius(&a) > JACOBI_OFFDIAG_TOL {
        panic!(
            "Jacobi eigensolver failed to converge in {JACOBI_MAX_SWEEPS} sweeps \
             (off-diagonal norm {:.3e}); this is an internal defect",
            offdiag_frobenius(&a)
        );
    }

    let mut order: Vec<usize> = (0..d).collect();
    let diag: Vec<f64> = (0..d).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let mut vectors = ComplexMat::zeros(d);
    let mut values = Vec::with_capacity(d);
    for (col, &idx) in order.iter().enumerate() {
        values.push(diag[idx]);
        for row in 0..d {
            vectors.set(row, col, v.get(row, idx));
        }
    }
    Eigen { values, vectors }
}

/// Principal square root of a PSD Hermitian operator.
///
/// Eigenvalues in `[-1e-10, 0)` are clamped to zero; anything lower is a
/// genuine positivity violation and yields [`Error::NotPsd`].
pub fn sqrt_psd(h: &HermitianOp) -> Result<HermitianOp> {
    let eig = eig_hermitian(h);
    let min = eig.values[0];
    if min < -1e-10 {
        return Err(Error::NotPsd(min));
    }
    let d = h.dim();
    let mut scaled = eig.vectors.clone();
    for j in 0..d {
        let root = eig.values[j].max(0.0).sqrt();
        for i in 0..d {
            let v = scaled.get(i, j) * root;
            scaled.set(i, j, v);
        }
    }
    HermitianOp::new(scaled.mul(&eig.vectors.adjoint()))
}

/// Trace norm `Tr[√(A†A)]`, i.e. the sum of singular values.
///
/// Accepts general (non-Hermitian) square input: overlap computations apply
/// it to products `√E_X √E_Z` which are not Hermitian.
pub fn trace_norm(a: &ComplexMat) -> f64 {
    let gram = HermitianOp::new(a.adjoint().mul(a))
        .expect("A†A is Hermitian by construction");
    eig_hermitian(&gram)
        .values
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .sum()
}

/// Tensor product with lexicographic block layout: index `(iA·dimB + iB)`.
pub fn kron(a: &HermitianOp, b: &HermitianOp) -> Result<HermitianOp> {
    let (da, db) = (a.dim(), b.dim());
    if da * db > 4 {
        return Err(Error::ResultDimUnsupported(da * db));
    }
    let d = da * db;
    let mut out = ComplexMat::zeros(d);
    for ia in 0..da {
        for ja in 0..da {
            let f = a.get(ia, ja);
            for ib in 0..db {
                for jb in 0..db {
                    out.set(ia * db + ib, ja * db + jb, f * b.get(ib, jb));
                }
            }
        }
    }
    HermitianOp::new(out)
}

/// Which tensor factor `partial_trace` keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Partial trace of a two-qubit (4x4) operator down to the kept qubit.
///
/// Accepts a general matrix so products like `ρ (E ⊗ 1)` can be traced
/// directly; the Hermitian wrapper is the caller's job when it applies.
pub fn partial_trace(ab: &ComplexMat, keep: Subsystem) -> Result<ComplexMat> {
    if ab.dim() != 4 {
        return Err(Error::BadDim(ab.dim()));
    }
    let mut out = ComplexMat::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..2 {
                acc += match keep {
                    Subsystem::A => ab.get(i * 2 + k, j * 2 + k),
                    Subsystem::B => ab.get(k * 2 + i, k * 2 + j),
                };
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}
