//! Dense complex linear algebra primitives with an explicit tolerance policy.
//!
//! Everything else in the crate builds on [`ComplexMatrix`], a square matrix
//! of `Complex64` entries. The only numerical kernels used are the Hermitian
//! eigensolver and the SVD; non-normal eigenproblems are avoided by
//! construction.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Absolute comparison thresholds used throughout the crate.
///
/// All instances are desk-scale (dimension at most a few dozen, entries O(1)),
/// so comparisons are entrywise-absolute rather than relative.
#[derive(Clone, Copy, Debug)]
pub struct TolerancePolicy {
    /// Entrywise absolute equality threshold.
    pub eps_eq: f64,
    /// Minimum-eigenvalue threshold for positivity checks.
    pub eps_psd: f64,
    /// Residual / singular-value cutoff for rank decisions.
    pub eps_rank: f64,
}

impl TolerancePolicy {
    pub fn new(eps_eq: f64, eps_psd: f64, eps_rank: f64) -> Result<Self> {
        if eps_eq <= 0.0 || eps_psd <= 0.0 || eps_rank <= 0.0 {
            return Err(Error::InvalidTolerance);
        }
        Ok(Self { eps_eq, eps_psd, eps_rank })
    }

    /// Policy with all three thresholds set to `eps`.
    pub fn uniform(eps: f64) -> Result<Self> {
        Self::new(eps, eps, eps)
    }
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self { eps_eq: 1e-9, eps_psd: 1e-9, eps_rank: 1e-9 }
    }
}

/// A trace functional on square matrices of a fixed (or any) dimension.
///
/// `Weighted` is the trace of a block algebra `⊕_j M_{d_j}` with weights
/// `c_j`: `τ(x) = Σ_j c_j · tr_{d_j}(x_j)`, evaluated on the block-diagonal
/// part of `x`.
#[derive(Clone, Debug, PartialEq)]
pub enum Trace {
    /// Unnormalized trace `Tr`.
    Total,
    /// Normalized trace `tr = Tr / dim`.
    Normalized,
    /// Block-weighted trace; pairs are `(block_dim, weight)`.
    Weighted(Vec<(usize, f64)>),
}

impl Trace {
    /// Evaluate the functional on `m`.
    pub fn eval(&self, m: &ComplexMatrix) -> Result<Complex64> {
        match self {
            Trace::Total => Ok(m.trace()),
            Trace::Normalized => Ok(m.trace() / (m.dim() as f64)),
            Trace::Weighted(blocks) => {
                let total: usize = blocks.iter().map(|(d, _)| d).sum();
                if total != m.dim() {
                    return Err(Error::DimensionMismatch(total, m.dim()));
                }
                let mut acc = Complex64::ZERO;
                let mut off = 0;
                for &(d, c) in blocks {
                    let mut block_tr = Complex64::ZERO;
                    for p in 0..d {
                        block_tr += m.at(off + p, off + p);
                    }
                    acc += block_tr * (c / d as f64);
                    off += d;
                }
                Ok(acc)
            }
        }
    }
}

/// Dense square matrix of complex scalars; the universal carrier of the crate.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Wrap an owned matrix; must be square.
    pub fn new(data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::NotSquare { rows: data.nrows(), cols: data.ncols() });
        }
        Ok(Self { data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { data: DMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { data: DMatrix::identity(dim, dim) }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self { data: DMatrix::from_fn(dim, dim, f) }
    }

    /// Build from nested rows; all rows must have length `rows.len()`.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let d = rows.len();
        for r in rows {
            if r.len() != d {
                return Err(Error::NotSquare { rows: d, cols: r.len() });
            }
        }
        Ok(Self::from_fn(d, |i, j| rows[i][j]))
    }

    /// Real-entry convenience constructor.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        for r in rows {
            if r.len() != d {
                return Err(Error::NotSquare { rows: d, cols: r.len() });
            }
        }
        Ok(Self::from_fn(d, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        Self::from_fn(entries.len(), |i, j| if i == j { entries[i] } else { Complex64::ZERO })
    }

    /// Standard matrix unit `e_ij` in `M_d`.
    pub fn matrix_unit(dim: usize, i: usize, j: usize) -> Self {
        assert!(i < dim && j < dim, "matrix unit index out of range");
        Self::from_fn(dim, |r, c| {
            if r == i && c == j { Complex64::ONE } else { Complex64::ZERO }
        })
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[(i, j)] = value;
    }

    pub fn as_ref(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self { data: self.data.adjoint() }
    }

    pub fn transpose(&self) -> Self {
        Self { data: self.data.transpose() }
    }

    pub fn conj(&self) -> Self {
        Self { data: self.data.map(|z| z.conj()) }
    }

    /// Unnormalized trace `Tr`.
    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    /// Normalized trace `tr = Tr / dim`.
    pub fn normalized_trace(&self) -> Complex64 {
        self.trace() / (self.dim() as f64)
    }

    /// Kronecker product, `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self { data: self.data.kronecker(&other.data) }
    }

    /// Hilbert–Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise absolute difference. Panics on dimension mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "max_abs_diff: dimension mismatch");
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                worst = worst.max((self.at(i, j) - other.at(i, j)).norm());
            }
        }
        worst
    }

    pub fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        self.dim() == other.dim() && self.max_abs_diff(other) <= eps
    }

    pub fn is_hermitian(&self, eps: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= eps
    }

    pub fn is_unitary(&self, eps: f64) -> bool {
        let d = self.dim();
        (&self.data * self.data.adjoint() - DMatrix::<Complex64>::identity(d, d)).norm() <= eps
    }

    /// Hermitian eigendecomposition, eigenvalues ascending.
    ///
    /// The input must be Hermitian within `eps`; it is symmetrized as
    /// `(m + m*)/2` before the solve so the decomposition is exactly of a
    /// Hermitian matrix.
    pub fn hermitian_eigen(&self, eps: f64) -> Result<HermitianEigen> {
        let dev = self.max_abs_diff(&self.adjoint());
        if dev > eps {
            return Err(Error::NotHermitian(dev));
        }
        let sym = (&self.data + self.data.adjoint()).scale(0.5);
        let eig = sym.symmetric_eigen();
        let d = self.dim();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(d, d, |i, k| eig.eigenvectors[(i, order[k])]);
        Ok(HermitianEigen { values, vectors: Self { data: vectors } })
    }

    /// Minimum eigenvalue of the symmetrized matrix.
    pub fn min_eigenvalue(&self, eps: f64) -> Result<f64> {
        Ok(self.hermitian_eigen(eps)?.values[0])
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        self.data.clone().svd(false, false).singular_values.iter().copied().collect()
    }

    /// Number of singular values above `cutoff`.
    pub fn rank(&self, cutoff: f64) -> usize {
        self.singular_values().iter().filter(|&&s| s > cutoff).count()
    }

    /// Row-major flattening of the matrix into a vector of length `dim²`.
    pub fn vec_row_major(&self) -> DVector<Complex64> {
        let d = self.dim();
        DVector::from_fn(d * d, |k, _| self.at(k / d, k % d))
    }

    /// Inverse of [`vec_row_major`](Self::vec_row_major).
    pub fn from_vec_row_major(dim: usize, v: &DVector<Complex64>) -> Result<Self> {
        if v.len() != dim * dim {
            return Err(Error::DimensionMismatch(v.len(), dim * dim));
        }
        Ok(Self::from_fn(dim, |i, j| v[i * dim + j]))
    }

    /// Matrix of the map `x ↦ self · x` on row-major flattened coordinates.
    pub fn left_mul_operator(&self) -> Self {
        self.kron(&Self::identity(self.dim()))
    }

    /// Matrix of the map `x ↦ x · self` on row-major flattened coordinates.
    pub fn right_mul_operator(&self) -> Self {
        Self::identity(self.dim()).kron(&self.transpose())
    }

    /// Matrix of the map `x ↦ x·self − self·x` on flattened coordinates.
    pub fn commutator_operator(&self) -> Self {
        let mut op = self.right_mul_operator();
        op.data -= self.left_mul_operator().data;
        op
    }

    /// Apply a `d²×d²` operator matrix to a `d×d` matrix via flattening.
    pub fn apply_to_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = int_sqrt(self.dim()).ok_or(Error::NotFlattened(self.dim()))?;
        if x.dim() != d {
            return Err(Error::DimensionMismatch(x.dim(), d));
        }
        let image = &self.data * x.vec_row_major();
        ComplexMatrix::from_vec_row_major(d, &image)
    }
}

/// Result of a Hermitian eigendecomposition: `values` ascending, eigenvector
/// `k` in column `k` of `vectors`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

fn int_sqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl std::ops::$trait for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix { data: &self.data $op &rhs.data }
            }
        }
        impl std::ops::$trait for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                &self $op &rhs
            }
        }
    };
}

impl_binop!(Add, add, +);
impl_binop!(Sub, sub, -);
impl_binop!(Mul, mul, *);

impl std::ops::Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix { data: -&self.data }
    }
}

impl std::ops::Mul<Complex64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Complex64) -> ComplexMatrix {
        ComplexMatrix { data: self.data.map(|z| z * rhs) }
    }
}

impl std::ops::Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> ComplexMatrix {
        ComplexMatrix { data: self.data.map(|z| z * rhs) }
    }
}

/// Inner product `⟨a, b⟩_τ = τ(b* a)` induced by a trace functional.
///
/// Conjugate-symmetric and linear in the first argument.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix, tau: &Trace) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    tau.eval(&(&b.adjoint() * a))
}

/// Norm induced by `hs_inner`; requires the inner product to be PSD.
pub fn hs_norm_under(a: &ComplexMatrix, tau: &Trace) -> Result<f64> {
    let sq = hs_inner(a, a, tau)?.re;
    if sq < -1e-12 {
        return Err(Error::IndefiniteInner(sq));
    }
    Ok(sq.max(0.0).sqrt())
}

/// Positive semidefiniteness test: true iff the minimum eigenvalue of the
/// symmetrized input is at least `−eps_psd`. Errors if the input deviates
/// from Hermitian by more than `eps_eq`.
pub fn is_psd(m: &ComplexMatrix, pol: &TolerancePolicy) -> Result<bool> {
    Ok(m.min_eigenvalue(pol.eps_eq)? >= -pol.eps_psd)
}

/// Orthonormal basis of the linear span of `vectors` with respect to the
/// inner product induced by `inner`.
///
/// Modified Gram–Schmidt with one reorthogonalization pass; a vector whose
/// residual norm falls below `eps_rank` is dropped, so the output size equals
/// the span dimension.
pub fn orthonormal_basis(
    vectors: &[ComplexMatrix],
    inner: &Trace,
    pol: &TolerancePolicy,
) -> Result<Vec<ComplexMatrix>> {
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    for v in vectors {
        if let Some(first) = basis.first() {
            if first.dim() != v.dim() {
                return Err(Error::DimensionMismatch(first.dim(), v.dim()));
            }
        }
        let mut w = v.clone();
        for _pass in 0..2 {
            for b in &basis {
                let coeff = hs_inner(&w, b, inner)?;
                w = &w - &(b * coeff);
            }
        }
        let norm = hs_norm_under(&w, inner)?;
        if norm >= pol.eps_rank {
            w = &w * Complex64::new(1.0 / norm, 0.0);
            basis.push(w);
        }
    }
    Ok(basis)
}

/// Orthogonal projection of `x` onto the span of a pairwise-orthogonal
/// family, `Σ_k ⟨x,u_k⟩/⟨u_k,u_k⟩ · u_k`. Members with vanishing τ-norm are
/// skipped.
pub fn orthogonal_project(
    x: &ComplexMatrix,
    family: &[ComplexMatrix],
    inner: &Trace,
) -> Result<ComplexMatrix> {
    let mut acc = ComplexMatrix::zeros(x.dim());
    for u in family {
        let nsq = hs_inner(u, u, inner)?.re;
        if nsq <= 1e-14 {
            continue;
        }
        let coeff = hs_inner(x, u, inner)? / nsq;
        acc = &acc + &(u * coeff);
    }
    Ok(acc)
}

/// Orthonormal basis of the common kernel of a family of operator matrices
/// acting on the same flattened `d²`-dimensional space.
///
/// Computed from the SVD of the vertically stacked system; right singular
/// vectors with singular value at most `eps_rank` span the kernel. Ties at
/// the threshold count as kernel, so rank decisions are conservative.
/// Orthonormal basis of the kernel of a rectangular matrix, at a singular
/// value cutoff. Matrices with fewer rows than columns are padded with zero
/// rows so the thin SVD still carries the full set of right singular vectors.
pub(crate) fn kernel_cols(a: &DMatrix<Complex64>, cutoff: f64) -> Vec<DVector<Complex64>> {
    let m = a.ncols();
    let padded;
    let work = if a.nrows() < m {
        padded = {
            let mut p = DMatrix::zeros(m, m);
            p.view_mut((0, 0), (a.nrows(), m)).copy_from(a);
            p
        };
        &padded
    } else {
        a
    };
    let svd = work.clone().svd(false, true);
    let v_t = svd.v_t.expect("svd with v_t requested");
    let mut kernel = Vec::new();
    for k in 0..v_t.nrows() {
        let sigma = if k < svd.singular_values.len() { svd.singular_values[k] } else { 0.0 };
        if sigma <= cutoff {
            kernel.push(v_t.row(k).adjoint());
        }
    }
    kernel
}

pub(crate) fn stacked_kernel(
    maps: &[&ComplexMatrix],
    pol: &TolerancePolicy,
) -> Result<Vec<DVector<Complex64>>> {
    let m = maps.first().ok_or(Error::EmptyInput("stacked_kernel needs at least one map"))?.dim();
    for map in maps {
        if map.dim() != m {
            return Err(Error::DimensionMismatch(map.dim(), m));
        }
    }
    let rows = maps.len() * m;
    let stacked = DMatrix::from_fn(rows, m, |r, c| maps[r / m].at(r % m, c));
    Ok(kernel_cols(&stacked, pol.eps_rank))
}

/// Orthonormal basis of the kernel of a linear map on `M_d`, supplied as its
/// `d²×d²` matrix over row-major flattened coordinates. Basis elements are
/// returned reshaped as `d×d` matrices.
pub fn null_space(linear_map: &ComplexMatrix, pol: &TolerancePolicy) -> Result<Vec<ComplexMatrix>> {
    let d = int_sqrt(linear_map.dim()).ok_or(Error::NotFlattened(linear_map.dim()))?;
    stacked_kernel(&[linear_map], pol)?
        .iter()
        .map(|v| ComplexMatrix::from_vec_row_major(d, v))
        .collect()
}

/// Deterministic generator for a given seed; all randomness in the crate
/// flows through explicitly seeded generators.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian matrix (Ginibre ensemble).
pub fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(dim, |_, _| {
        Complex64::new(
            rng.sample::<f64, _>(StandardNormal) * scale,
            rng.sample::<f64, _>(StandardNormal) * scale,
        )
    })
}

/// Haar-distributed random unitary: QR of a Ginibre matrix with the diagonal
/// of R phase-normalized.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(dim, rng);
    let qr = g.data.qr();
    let q = qr.q();
    let r = qr.r();
    let phases = DVector::from_fn(dim, |i, _| {
        let rii = r[(i, i)];
        if rii.norm() < f64::EPSILON {
            Complex64::ONE
        } else {
            rii / rii.norm()
        }
    });
    let data = DMatrix::from_fn(dim, dim, |i, j| q[(i, j)] * phases[j]);
    ComplexMatrix { data }
}

/// Random Hermitian matrix with Gaussian entries (GUE-like, unnormalized).
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(dim, rng);
    &(&g + &g.adjoint()) * 0.5
}

/// Pauli X in `M_2`.
pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
}

/// Pauli Y in `M_2`.
pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 1) => Complex64::new(0.0, -1.0),
        (1, 0) => Complex64::new(0.0, 1.0),
        _ => Complex64::ZERO,
    })
}

/// Pauli Z in `M_2`.
pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap()
}

/// The swap unitary on `C^n ⊗ C^n`.
pub fn swap_matrix(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n * n, |row, col| {
        let (i, k) = (row / n, row % n);
        let (j, l) = (col / n, col % n);
        if i == l && k == j {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    })
}
