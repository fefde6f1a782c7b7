//! Choi-matrix calculus for linear maps on `M_n`: construction, recovery,
//! verification, ancilla realization, and embedding adjoints.
//!
//! The Choi matrix of a linear map `T` is `C_T = Σ_ij e_ij ⊗ T(e_ij)`,
//! indexed by pairs: row `(i,k)`, column `(j,ℓ)` carry the coefficient
//! `C_T(i,j;k,ℓ) = ⟨T(e_ij), e_kℓ⟩_Tr`. The first tensor factor indexes the
//! input copy; this order is fixed here since conventions vary in the
//! literature.

use num_complex::Complex64;

use crate::algebra::FiniteTracialAlgebra;
use crate::error::{Error, Result};
use crate::matrix::{hs_inner, is_psd, ComplexMatrix, TolerancePolicy, Trace};
use crate::units::{generator_blocks, MatrixUnitSystem};

/// A linear map on `M_n` represented by its `n²×n²` Choi matrix.
#[derive(Clone, Debug)]
pub struct Channel {
    n: usize,
    choi: ComplexMatrix,
}

/// Verification outcome for a Choi matrix: completely positive, unital, and
/// trace-preserving flags together with the witnessing residuals.
#[derive(Clone, Debug)]
pub struct ChannelReport {
    pub cp: bool,
    pub unital: bool,
    pub trace_preserving: bool,
    /// Minimum eigenvalue of the (symmetrized) Choi matrix.
    pub min_eigenvalue: f64,
    /// `max |(Tr ⊗ id)(C) − 1|` entrywise.
    pub unital_residual: f64,
    /// `max |(id ⊗ Tr)(C) − 1|` entrywise.
    pub tp_residual: f64,
}

impl ChannelReport {
    pub fn is_quantum_channel(&self) -> bool {
        self.cp && self.unital && self.trace_preserving
    }
}

impl Channel {
    /// Wrap an `n²×n²` matrix as a Choi matrix.
    pub fn from_choi(n: usize, choi: ComplexMatrix) -> Result<Self> {
        if choi.dim() != n * n {
            return Err(Error::DimensionMismatch(choi.dim(), n * n));
        }
        Ok(Self { n, choi })
    }

    /// Assemble `C_T = Σ_ij e_ij ⊗ T(e_ij)` from the images of the standard
    /// matrix units, listed row-major (`images[i*n + j] = T(e_ij)`).
    pub fn from_images(n: usize, images: &[ComplexMatrix]) -> Result<Self> {
        if images.len() != n * n {
            return Err(Error::DimensionMismatch(images.len(), n * n));
        }
        for im in images {
            if im.dim() != n {
                return Err(Error::DimensionMismatch(im.dim(), n));
            }
        }
        let choi = ComplexMatrix::from_fn(n * n, |row, col| {
            let (i, k) = (row / n, row % n);
            let (j, l) = (col / n, col % n);
            images[i * n + j].at(k, l)
        });
        Ok(Self { n, choi })
    }

    /// Assemble the Choi matrix of a map given as a closure.
    pub fn from_map(n: usize, mut map: impl FnMut(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        let images: Vec<ComplexMatrix> =
            (0..n * n).map(|k| map(&ComplexMatrix::matrix_unit(n, k / n, k % n))).collect();
        Self::from_images(n, &images)
    }

    /// The identity channel on `M_n`.
    pub fn identity(n: usize) -> Self {
        Self::from_map(n, |x| x.clone()).expect("identity map is well-formed")
    }

    /// The completely depolarizing channel `x ↦ tr_n(x)·1`.
    pub fn depolarizing(n: usize) -> Self {
        Self::from_map(n, |x| &ComplexMatrix::identity(n) * x.normalized_trace())
            .expect("depolarizing map is well-formed")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    /// The coefficient `C_T(i,j;k,ℓ) = ⟨T(e_ij), e_kℓ⟩_Tr`.
    pub fn coeff(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.choi.at(i * self.n + k, j * self.n + l)
    }

    /// `(Tr ⊗ id)(C_T) = T(1)`.
    pub fn trace_out_input(&self) -> ComplexMatrix {
        let n = self.n;
        ComplexMatrix::from_fn(n, |k, l| (0..n).map(|i| self.coeff(i, i, k, l)).sum())
    }

    /// `(id ⊗ Tr)(C_T)`, the matrix `[Tr T(e_ij)]_ij`.
    pub fn trace_out_output(&self) -> ComplexMatrix {
        let n = self.n;
        ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| self.coeff(i, j, k, k)).sum())
    }
}

/// Assemble the Choi matrix of a linear map on `M_n` from its values on the
/// standard matrix units.
pub fn choi_of_map(n: usize, images: &[ComplexMatrix]) -> Result<Channel> {
    Channel::from_images(n, images)
}

/// Recover the map from its Choi matrix: the linear extension of
/// `T(e_ij) = Σ_kl C_T(i,j;k,ℓ) e_kℓ`.
pub fn apply_choi(ch: &Channel, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = ch.n();
    if x.dim() != n {
        return Err(Error::DimensionMismatch(x.dim(), n));
    }
    let mut image = ComplexMatrix::zeros(n);
    for k in 0..n {
        for l in 0..n {
            let mut acc = Complex64::ZERO;
            for i in 0..n {
                for j in 0..n {
                    acc += x.at(i, j) * ch.coeff(i, j, k, l);
                }
            }
            image.set(k, l, acc);
        }
    }
    Ok(image)
}

/// Check complete positivity (Choi positivity), unitality and trace
/// preservation of a Choi matrix at the given tolerances.
pub fn verify_channel(ch: &Channel, pol: &TolerancePolicy) -> Result<ChannelReport> {
    let n = ch.n();
    let hermitian_dev = ch.choi.max_abs_diff(&ch.choi.adjoint());
    let (cp, min_eigenvalue) = if hermitian_dev > pol.eps_eq {
        // a non-Hermitian Choi matrix is never positive
        (false, f64::NEG_INFINITY)
    } else {
        let min = ch.choi.min_eigenvalue(pol.eps_eq)?;
        (min >= -pol.eps_psd, min)
    };
    let id = ComplexMatrix::identity(n);
    let unital_residual = ch.trace_out_input().max_abs_diff(&id);
    let tp_residual = ch.trace_out_output().max_abs_diff(&id);
    Ok(ChannelReport {
        cp,
        unital: unital_residual <= pol.eps_eq,
        trace_preserving: tp_residual <= pol.eps_eq,
        min_eigenvalue,
        unital_residual,
        tp_residual,
    })
}

/// The channel `x ↦ (id_n ⊗ τ_N)(u (x ⊗ 1_N) u*)` realized by a unitary `u`
/// in `M_n ⊗ N` over a block-weighted ancilla `(N, τ_N)`.
///
/// `u` is given in the Kronecker layout on `M_{n·dim N}` and must be unitary
/// and lie in `M_n ⊗ N`, i.e. have block-diagonal `d×d` blocks with respect
/// to the ancilla's block pattern.
pub fn channel_from_ancilla(
    u: &ComplexMatrix,
    n: usize,
    ancilla: &FiniteTracialAlgebra,
    pol: &TolerancePolicy,
) -> Result<Channel> {
    let big_dim = n * ancilla.total_dim();
    if u.dim() != big_dim {
        return Err(Error::DimensionMismatch(u.dim(), big_dim));
    }
    if !u.is_unitary(pol.eps_eq) {
        let residual =
            (&(u * &u.adjoint()) - &ComplexMatrix::identity(big_dim)).hs_norm();
        return Err(Error::NotUnitary(residual));
    }
    for block in generator_blocks(u, n)? {
        let residual = ancilla.off_block_residual(&block)?;
        if residual > pol.eps_eq {
            return Err(Error::NotBlockDiagonal(residual));
        }
    }

    let dim_n = ancilla.total_dim();
    // diagonal weight of ancilla coordinate p
    let mut point_weight = vec![0.0f64; dim_n];
    for j in 0..ancilla.block_count() {
        let off = ancilla.block_offset(j);
        let w = ancilla.weights()[j] / ancilla.block_dims()[j] as f64;
        for p in 0..ancilla.block_dims()[j] {
            point_weight[off + p] = w;
        }
    }

    let uh = u.adjoint();
    let id_ancilla = ComplexMatrix::identity(dim_n);
    let mut images = Vec::with_capacity(n * n);
    for idx in 0..n * n {
        let unit = ComplexMatrix::matrix_unit(n, idx / n, idx % n).kron(&id_ancilla);
        let conj = &(u * &unit) * &uh;
        // weighted partial trace over the ancilla
        images.push(ComplexMatrix::from_fn(n, |k, l| {
            (0..dim_n)
                .map(|p| conj.at(k * dim_n + p, l * dim_n + p) * point_weight[p])
                .sum()
        }));
    }
    Channel::from_images(n, &images)
}

/// Adjoint of the unital embedding described by a matrix-unit system, with
/// respect to `τ_M` on the ambient algebra and `tr_n` on `M_n`:
/// `β*(y) = Σ_ij n·⟨y, f_ij⟩_{τ_M} · e_ij`.
///
/// Satisfies `⟨β(x), y⟩_{τ_M} = ⟨x, β*(y)⟩_{tr_n}` and `β* ∘ β = id`.
pub fn embedding_adjoint(
    y: &ComplexMatrix,
    beta_units: &MatrixUnitSystem,
    tau_m: &Trace,
    pol: &TolerancePolicy,
) -> Result<ComplexMatrix> {
    if y.dim() != beta_units.ambient_dim() {
        return Err(Error::DimensionMismatch(y.dim(), beta_units.ambient_dim()));
    }
    let report = beta_units.validate(pol);
    if !report.pass {
        return Err(Error::InvalidUnits(format!(
            "embedding adjoint needs valid units: {} (residual {:.3e})",
            report.worst_relation, report.max_residual
        )));
    }
    let n = beta_units.order();
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let coeff = hs_inner(y, beta_units.unit(i, j), tau_m)? * (n as f64);
            out.set(i, j, coeff);
        }
    }
    Ok(out)
}

/// Normalized Hilbert–Schmidt distance of Choi matrices, `‖C_a − C_b‖ / n`.
pub fn channel_distance(a: &Channel, b: &Channel) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch(a.n(), b.n()));
    }
    Ok((a.choi() - b.choi()).hs_norm() / a.n() as f64)
}

/// Convenience check that a Choi matrix is completely positive.
pub fn is_completely_positive(ch: &Channel, pol: &TolerancePolicy) -> Result<bool> {
    is_psd(ch.choi(), pol)
}
