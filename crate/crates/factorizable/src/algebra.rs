//! Finite-dimensional *-subalgebra engine: generated algebras, commutants,
//! block (Wedderburn) structure, conditional expectations, and trace kernel
//! ideals.
//!
//! A [`StarSubalgebra`] is stored as a Hilbert–Schmidt-orthonormal basis of
//! its linear span inside an ambient `M_d`. Generated algebras are computed
//! by span saturation: adjoin adjoints, then repeatedly multiply basis
//! elements and re-orthonormalize until the dimension stabilizes (it is
//! capped by `d²`, so this terminates).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::{hs_inner, kernel_cols, ComplexMatrix, TolerancePolicy, Trace};
use crate::units::MatrixUnitSystem;

/// A finite direct sum of full matrix blocks `⊕_j M_{d_j}` carrying the
/// tracial state `τ(x) = Σ_j c_j · tr_{d_j}(x_j)`, with weights `c_j ≥ 0`
/// summing to one. Elements are represented block-diagonally in `M_{Σ d_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteTracialAlgebra {
    dims: Vec<usize>,
    weights: Vec<f64>,
}

impl FiniteTracialAlgebra {
    pub fn new(dims: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::EmptyInput("algebra needs at least one block"));
        }
        if dims.len() != weights.len() {
            return Err(Error::InvalidWeights(format!(
                "{} blocks but {} weights",
                dims.len(),
                weights.len()
            )));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidWeights("block dimensions must be positive".into()));
        }
        if weights.iter().any(|&c| c < 0.0) {
            return Err(Error::InvalidWeights("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidWeights(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self { dims, weights })
    }

    /// The full matrix algebra `M_d` with its normalized trace.
    pub fn full(d: usize) -> Self {
        Self { dims: vec![d], weights: vec![1.0] }
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn block_count(&self) -> usize {
        self.dims.len()
    }

    /// Dimension of the block-diagonal matrix representation.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn block_offset(&self, j: usize) -> usize {
        self.dims[..j].iter().sum()
    }

    /// The trace as a reusable functional.
    pub fn trace_functional(&self) -> Trace {
        Trace::Weighted(self.dims.iter().copied().zip(self.weights.iter().copied()).collect())
    }

    /// The normalized trace `tr_n ⊗ τ` of `M_n ⊗ self` in the Kronecker
    /// layout on `M_{n·total_dim}`: the block pattern of `self` repeats `n`
    /// times with weights scaled by `1/n`.
    pub fn composite_trace(&self, n: usize) -> Trace {
        let mut blocks = Vec::with_capacity(n * self.dims.len());
        for _ in 0..n {
            for (&d, &c) in self.dims.iter().zip(self.weights.iter()) {
                blocks.push((d, c / n as f64));
            }
        }
        Trace::Weighted(blocks)
    }

    /// Evaluate `τ_M` on a representing matrix.
    pub fn trace(&self, x: &ComplexMatrix) -> Result<Complex64> {
        self.trace_functional().eval(x)
    }

    pub fn unit(&self) -> ComplexMatrix {
        ComplexMatrix::identity(self.total_dim())
    }

    /// Central projection onto block `j`, as a representing matrix.
    pub fn block_projection(&self, j: usize) -> ComplexMatrix {
        let off = self.block_offset(j);
        let d = self.dims[j];
        ComplexMatrix::from_fn(self.total_dim(), |r, c| {
            if r == c && r >= off && r < off + d {
                Complex64::ONE
            } else {
                Complex64::ZERO
            }
        })
    }

    /// The `d_j×d_j` compression of `x` to block `j`.
    pub fn extract_block(&self, x: &ComplexMatrix, j: usize) -> Result<ComplexMatrix> {
        if x.dim() != self.total_dim() {
            return Err(Error::DimensionMismatch(x.dim(), self.total_dim()));
        }
        let off = self.block_offset(j);
        Ok(ComplexMatrix::from_fn(self.dims[j], |r, c| x.at(off + r, off + c)))
    }

    /// Embed a `d_j×d_j` matrix into block `j` (zero elsewhere).
    pub fn embed_block(&self, j: usize, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.dim() != self.dims[j] {
            return Err(Error::DimensionMismatch(m.dim(), self.dims[j]));
        }
        let off = self.block_offset(j);
        let d = self.dims[j];
        Ok(ComplexMatrix::from_fn(self.total_dim(), |r, c| {
            if r >= off && r < off + d && c >= off && c < off + d {
                m.at(r - off, c - off)
            } else {
                Complex64::ZERO
            }
        }))
    }

    /// Assemble a block-diagonal representative from per-block matrices.
    pub fn assemble(&self, blocks: &[ComplexMatrix]) -> Result<ComplexMatrix> {
        if blocks.len() != self.dims.len() {
            return Err(Error::DimensionMismatch(blocks.len(), self.dims.len()));
        }
        let mut acc = ComplexMatrix::zeros(self.total_dim());
        for (j, b) in blocks.iter().enumerate() {
            acc = &acc + &self.embed_block(j, b)?;
        }
        Ok(acc)
    }

    /// Largest entry outside the block-diagonal pattern.
    pub fn off_block_residual(&self, x: &ComplexMatrix) -> Result<f64> {
        if x.dim() != self.total_dim() {
            return Err(Error::DimensionMismatch(x.dim(), self.total_dim()));
        }
        let mut block_of = vec![0usize; self.total_dim()];
        for j in 0..self.dims.len() {
            let off = self.block_offset(j);
            for p in 0..self.dims[j] {
                block_of[off + p] = j;
            }
        }
        let mut worst = 0.0f64;
        for r in 0..x.dim() {
            for c in 0..x.dim() {
                if block_of[r] != block_of[c] {
                    worst = worst.max(x.at(r, c).norm());
                }
            }
        }
        Ok(worst)
    }

    pub fn is_block_diagonal(&self, x: &ComplexMatrix, eps: f64) -> Result<bool> {
        Ok(self.off_block_residual(x)? <= eps)
    }
}

/// A *-closed, multiplicatively closed linear span inside `M_d`, stored as a
/// Hilbert–Schmidt orthonormal basis.
#[derive(Clone, Debug)]
pub struct StarSubalgebra {
    ambient_dim: usize,
    basis: Vec<ComplexMatrix>,
    contains_unit: bool,
}

impl StarSubalgebra {
    pub(crate) fn from_orthonormal_basis(
        ambient_dim: usize,
        basis: Vec<ComplexMatrix>,
        pol: &TolerancePolicy,
    ) -> Self {
        let contains_unit = if basis.is_empty() {
            false
        } else {
            let id = ComplexMatrix::identity(ambient_dim);
            let mut residual = id.clone();
            for b in &basis {
                let coeff = hs_inner(&residual, b, &Trace::Total).expect("same dimension");
                residual = &residual - &(b * coeff);
            }
            residual.hs_norm() <= pol.eps_eq.max(1e-10) * (ambient_dim as f64)
        };
        Self { ambient_dim, basis, contains_unit }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Linear dimension of the span.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Hilbert–Schmidt orthonormal basis of the span.
    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn contains_unit(&self) -> bool {
        self.contains_unit
    }

    /// Orthogonal projection of `x` onto the span.
    pub fn project(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch(x.dim(), self.ambient_dim));
        }
        let mut acc = ComplexMatrix::zeros(self.ambient_dim);
        for b in &self.basis {
            let coeff = hs_inner(x, b, &Trace::Total)?;
            acc = &acc + &(b * coeff);
        }
        Ok(acc)
    }

    /// Hilbert–Schmidt distance from `x` to the span.
    pub fn residual(&self, x: &ComplexMatrix) -> Result<f64> {
        Ok((x - &self.project(x)?).hs_norm())
    }

    pub fn contains(&self, x: &ComplexMatrix, eps: f64) -> Result<bool> {
        Ok(self.residual(x)? <= eps)
    }

    /// True if the two algebras have the same span: equal dimensions and
    /// mutual basis residuals within `eps`.
    pub fn same_span(&self, other: &StarSubalgebra, eps: f64) -> Result<bool> {
        if self.ambient_dim != other.ambient_dim || self.dim() != other.dim() {
            return Ok(false);
        }
        for b in other.basis() {
            if self.residual(b)? > eps {
                return Ok(false);
            }
        }
        for b in self.basis() {
            if other.residual(b)? > eps {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Incrementally extend an orthonormal set of flattened rows by candidates,
/// dropping candidates whose residual norm falls below `eps`. Returns the
/// newly added rows.
fn extend_orthonormal_rows(
    rows: &mut Vec<DVector<Complex64>>,
    candidates: &[DVector<Complex64>],
    eps: f64,
) -> Vec<DVector<Complex64>> {
    let mut added: Vec<DVector<Complex64>> = Vec::new();
    if candidates.is_empty() {
        return added;
    }
    let m = candidates[0].len();

    // Batched projection against the existing rows (two passes), then
    // sequential Gram-Schmidt among the survivors.
    let mut residuals: Vec<DVector<Complex64>> = candidates.to_vec();
    if !rows.is_empty() {
        let b = DMatrix::from_fn(rows.len(), m, |r, c| rows[r][c]);
        let c_mat = DMatrix::from_fn(residuals.len(), m, |r, c| residuals[r][c]);
        let mut r_mat = c_mat;
        for _ in 0..2 {
            let coeffs = &r_mat * b.adjoint();
            r_mat -= coeffs * &b;
        }
        for (k, row) in residuals.iter_mut().enumerate() {
            *row = r_mat.row(k).transpose();
        }
    }

    for mut v in residuals {
        if v.norm() < eps {
            continue;
        }
        for _ in 0..2 {
            for b in &added {
                let coeff = b.dotc(&v);
                v -= b * coeff;
            }
        }
        let norm = v.norm();
        if norm >= eps {
            v /= Complex64::new(norm, 0.0);
            added.push(v);
        }
    }
    rows.extend(added.iter().cloned());
    added
}

fn rows_to_matrices(d: usize, rows: &[DVector<Complex64>]) -> Vec<ComplexMatrix> {
    rows.iter()
        .map(|v| ComplexMatrix::from_vec_row_major(d, v).expect("row has length d²"))
        .collect()
}

/// Smallest *-closed, multiplicatively closed linear span containing the
/// generators (and the identity when `unital`).
///
/// Span saturation multiplies the elements added in the previous round with
/// the whole current basis on both sides and re-orthonormalizes; it stops
/// after a full round with no growth, or as soon as the span is all of
/// `M_d`.
pub fn generated_algebra(
    ambient_dim: usize,
    generators: &[ComplexMatrix],
    unital: bool,
    pol: &TolerancePolicy,
) -> Result<StarSubalgebra> {
    let d = ambient_dim;
    for g in generators {
        if g.dim() != d {
            return Err(Error::DimensionMismatch(g.dim(), d));
        }
    }

    let mut seed: Vec<ComplexMatrix> = Vec::new();
    if unital {
        seed.push(ComplexMatrix::identity(d));
    }
    for g in generators {
        seed.push(g.clone());
        seed.push(g.adjoint());
    }

    let mut rows: Vec<DVector<Complex64>> = Vec::new();
    let seed_rows: Vec<DVector<Complex64>> = seed.iter().map(|g| g.vec_row_major()).collect();
    let added = extend_orthonormal_rows(&mut rows, &seed_rows, pol.eps_rank);
    let mut fresh = rows_to_matrices(d, &added);
    let mut basis = fresh.clone();

    while !fresh.is_empty() && basis.len() < d * d {
        let mut candidates: Vec<DVector<Complex64>> = Vec::new();
        for b in &basis {
            for f in &fresh {
                candidates.push((b * f).vec_row_major());
                candidates.push((f * b).vec_row_major());
            }
        }
        let added = extend_orthonormal_rows(&mut rows, &candidates, pol.eps_rank);
        fresh = rows_to_matrices(d, &added);
        basis.extend(fresh.iter().cloned());
    }

    Ok(StarSubalgebra::from_orthonormal_basis(d, basis, pol))
}

/// The commutant `{x ∈ M_d : xb = bx for every basis element b}`, computed
/// as the common kernel of the stacked commutator maps. Always a unital
/// *-subalgebra.
pub fn commutant(alg: &StarSubalgebra, pol: &TolerancePolicy) -> Result<StarSubalgebra> {
    let d = alg.ambient_dim();
    if alg.basis().is_empty() {
        // the commutant of the zero algebra is everything
        let basis = (0..d * d)
            .map(|k| ComplexMatrix::matrix_unit(d, k / d, k % d))
            .collect();
        return Ok(StarSubalgebra::from_orthonormal_basis(d, basis, pol));
    }
    let maps: Vec<ComplexMatrix> = alg.basis().iter().map(|b| b.commutator_operator()).collect();
    let map_refs: Vec<&ComplexMatrix> = maps.iter().collect();
    let kernel = crate::matrix::stacked_kernel(&map_refs, pol)?;
    Ok(StarSubalgebra::from_orthonormal_basis(d, rows_to_matrices(d, &kernel), pol))
}

/// Wedderburn data of a unital *-subalgebra: full matrix blocks `M_{m_j}`
/// with multiplicities `k_j`, together with the minimal central projections.
#[derive(Clone, Debug)]
pub struct BlockStructure {
    /// Pairs `(block_dim m_j, multiplicity k_j)`.
    pub blocks: Vec<(usize, usize)>,
    pub central_projections: Vec<ComplexMatrix>,
}

/// Eigenvalue clusters of the generic central element are merged when gaps
/// fall below this threshold.
pub const CENTER_CLUSTER_GAP: f64 = 1e-6;

/// Block structure via the spectral projections of a generic self-adjoint
/// central element; see [`block_structure_with_gap`].
pub fn block_structure<R: Rng + ?Sized>(
    alg: &StarSubalgebra,
    pol: &TolerancePolicy,
    rng: &mut R,
) -> Result<BlockStructure> {
    block_structure_with_gap(alg, pol, rng, CENTER_CLUSTER_GAP)
}

/// Block structure of a unital *-subalgebra.
///
/// The center `alg ∩ alg'` is computed by solving the commutation equations
/// in the coefficient space of the basis. A random real Gaussian combination
/// of a Hermitian center basis is then eigendecomposed; eigenvalue clusters
/// (merged at `cluster_gap`) yield the minimal central projections. A
/// generic element separates the blocks almost surely, and integrality
/// checks (`Σ m_j² =` algebra dimension, `m_j | rank e_j`) guard against a
/// degenerate draw; on failure a fresh element is drawn, up to five times.
pub fn block_structure_with_gap<R: Rng + ?Sized>(
    alg: &StarSubalgebra,
    pol: &TolerancePolicy,
    rng: &mut R,
    cluster_gap: f64,
) -> Result<BlockStructure> {
    if !alg.contains_unit() {
        return Err(Error::InvalidTrace("block structure requires a unital algebra".into()));
    }
    let d = alg.ambient_dim();
    let k = alg.dim();

    // Center basis in coefficient space: x = Σ c_i b_i commutes with every
    // b_j iff the stacked linear system below annihilates c.
    let rows = k * d * d;
    let mut constraint = DMatrix::<Complex64>::zeros(rows, k);
    for (j, bj) in alg.basis().iter().enumerate() {
        for (i, bi) in alg.basis().iter().enumerate() {
            let comm = &(bi * bj) - &(bj * bi);
            let flat = comm.vec_row_major();
            for t in 0..d * d {
                constraint[(j * d * d + t, i)] = flat[t];
            }
        }
    }
    let coeff_kernel = kernel_cols(&constraint, pol.eps_rank);
    let mut center_mats: Vec<ComplexMatrix> = Vec::new();
    for c in &coeff_kernel {
        let mut z = ComplexMatrix::zeros(d);
        for (i, b) in alg.basis().iter().enumerate() {
            z = &z + &(b * c[i]);
        }
        center_mats.push(z);
    }
    // Hermitian spanning family of the center.
    let mut herm_candidates: Vec<DVector<Complex64>> = Vec::new();
    for z in &center_mats {
        let re = &(z + &z.adjoint()) * 0.5;
        let im = &(z - &z.adjoint()) * Complex64::new(0.0, -0.5);
        herm_candidates.push(re.vec_row_major());
        herm_candidates.push(im.vec_row_major());
    }
    let mut herm_rows: Vec<DVector<Complex64>> = Vec::new();
    extend_orthonormal_rows(&mut herm_rows, &herm_candidates, pol.eps_rank);
    let center_herm = rows_to_matrices(d, &herm_rows);
    if center_herm.is_empty() {
        return Err(Error::CenterDegenerate(0));
    }

    const MAX_ATTEMPTS: usize = 5;
    for _attempt in 0..MAX_ATTEMPTS {
        let mut z = ComplexMatrix::zeros(d);
        for h in &center_herm {
            let g: f64 = rng.sample(StandardNormal);
            z = &z + &(h * g);
        }
        // the combination is Hermitian up to the orthonormalization noise
        let eig = match z.hermitian_eigen(1e-7) {
            Ok(e) => e,
            Err(_) => continue,
        };

        // cluster eigenvalues by consecutive gaps
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for idx in 0..d {
            match clusters.last_mut() {
                Some(cluster)
                    if eig.values[idx] - eig.values[*cluster.last().unwrap()] < cluster_gap =>
                {
                    cluster.push(idx)
                }
                _ => clusters.push(vec![idx]),
            }
        }

        let mut blocks = Vec::new();
        let mut projections = Vec::new();
        let mut ok = true;
        let mut dim_sum = 0usize;
        for cluster in &clusters {
            let mut proj = ComplexMatrix::zeros(d);
            for &idx in cluster {
                let col = eig.vectors.as_ref().column(idx);
                let rank_one = ComplexMatrix::from_fn(d, |r, c| col[r] * col[c].conj());
                proj = &proj + &rank_one;
            }
            // compressed algebra e·A·e determines the block dimension
            let compressed: Vec<DVector<Complex64>> = alg
                .basis()
                .iter()
                .map(|b| (&(&proj * b) * &proj).vec_row_major())
                .collect();
            let mut comp_rows: Vec<DVector<Complex64>> = Vec::new();
            extend_orthonormal_rows(&mut comp_rows, &compressed, pol.eps_rank);
            let span = comp_rows.len();
            let m = (span as f64).sqrt().round() as usize;
            let rank = proj.trace().re.round() as usize;
            if m * m != span || m == 0 || rank % m != 0 {
                ok = false;
                break;
            }
            dim_sum += span;
            blocks.push((m, rank / m));
            projections.push(proj);
        }
        if ok && dim_sum == alg.dim() {
            return Ok(BlockStructure { blocks, central_projections: projections });
        }
    }
    Err(Error::CenterDegenerate(MAX_ATTEMPTS))
}

/// Trace-preserving conditional expectation onto the range of a unital
/// matrix-unit system: `E(x) = Σ_ij n·⟨x, f_ij⟩_τ · f_ij`.
///
/// `tau` must be the faithful trace of the ambient algebra, normalized so
/// that `τ(1) = 1`.
pub fn conditional_expectation(
    x: &ComplexMatrix,
    units: &MatrixUnitSystem,
    tau: &Trace,
    pol: &TolerancePolicy,
) -> Result<ComplexMatrix> {
    if x.dim() != units.ambient_dim() {
        return Err(Error::DimensionMismatch(x.dim(), units.ambient_dim()));
    }
    let report = units.validate(pol);
    if !report.pass {
        return Err(Error::InvalidUnits(format!(
            "conditional expectation needs valid units: {} (residual {:.3e})",
            report.worst_relation, report.max_residual
        )));
    }
    let n = units.order();
    let mut acc = ComplexMatrix::zeros(x.dim());
    for i in 0..n {
        for j in 0..n {
            let f = units.unit(i, j);
            let coeff = hs_inner(x, f, tau)? * (n as f64);
            acc = &acc + &(f * coeff);
        }
    }
    Ok(acc)
}

/// The trace kernel ideal of a block-weighted tracial algebra: the span of
/// the zero-weight blocks, returned as the central projection onto those
/// blocks plus a matrix-unit basis.
#[derive(Clone, Debug)]
pub struct KernelIdeal {
    /// Central projection onto the zero-weight blocks.
    pub projection: ComplexMatrix,
    /// Matrix-unit basis of the ideal (embedded in the ambient dimension).
    pub basis: Vec<ComplexMatrix>,
    /// Indices of the zero-weight blocks.
    pub zero_blocks: Vec<usize>,
}

impl KernelIdeal {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The trace is faithful iff the ideal is zero.
    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }
}

/// Kernel ideal `{a : τ(a*a) = 0}` of the algebra's trace: the direct sum of
/// the blocks with zero weight.
pub fn trace_kernel_ideal(alg: &FiniteTracialAlgebra, pol: &TolerancePolicy) -> Result<KernelIdeal> {
    let mut projection = ComplexMatrix::zeros(alg.total_dim());
    let mut basis = Vec::new();
    let mut zero_blocks = Vec::new();
    for (j, &weight) in alg.weights().iter().enumerate() {
        if weight < 0.0 {
            return Err(Error::InvalidWeights("weights must be nonnegative".into()));
        }
        if weight <= pol.eps_eq {
            zero_blocks.push(j);
            projection = &projection + &alg.block_projection(j);
            let dj = alg.block_dims()[j];
            for p in 0..dj {
                for q in 0..dj {
                    basis.push(alg.embed_block(j, &ComplexMatrix::matrix_unit(dj, p, q))?);
                }
            }
        }
    }
    Ok(KernelIdeal { projection, basis, zero_blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ginibre, seeded_rng};
    use crate::units::standard_units;

    fn pol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn e(d: usize, i: usize, j: usize) -> ComplexMatrix {
        ComplexMatrix::matrix_unit(d, i, j)
    }

    fn assert_star_and_mult_closed(alg: &StarSubalgebra) {
        for b in alg.basis() {
            assert!(alg.residual(&b.adjoint()).unwrap() < 1e-9, "span not *-closed");
        }
        for a in alg.basis() {
            for b in alg.basis() {
                assert!(alg.residual(&(a * b)).unwrap() < 1e-8, "span not multiplicatively closed");
            }
        }
    }

    #[test]
    fn corner_and_offdiagonal_unit_generate_full_matrix_algebra() {
        // e_21 = e_12*, e_22 = e_21 e_12: saturation reaches all of M_2
        let alg = generated_algebra(2, &[e(2, 0, 0), e(2, 0, 1)], true, &pol()).unwrap();
        assert_eq!(alg.dim(), 4);
        assert!(alg.contains_unit());
        assert_star_and_mult_closed(&alg);
    }

    #[test]
    fn identity_generates_scalars() {
        let alg = generated_algebra(3, &[ComplexMatrix::identity(3)], true, &pol()).unwrap();
        assert_eq!(alg.dim(), 1);
        assert!(alg.contains_unit());
    }

    #[test]
    fn generic_diagonal_generates_diagonal_algebra() {
        let g = ComplexMatrix::diagonal(&[Complex64::ONE, Complex64::new(2.0, 0.0)]);
        let alg = generated_algebra(2, &[g], true, &pol()).unwrap();
        assert_eq!(alg.dim(), 2);
        assert_star_and_mult_closed(&alg);
    }

    #[test]
    fn empty_generators_give_zero_or_scalar_algebra() {
        let zero = generated_algebra(2, &[], false, &pol()).unwrap();
        assert_eq!(zero.dim(), 0);
        assert!(!zero.contains_unit());
        let scalars = generated_algebra(2, &[], true, &pol()).unwrap();
        assert_eq!(scalars.dim(), 1);
        assert!(scalars.contains_unit());
    }

    #[test]
    fn commutant_of_full_algebra_is_scalars() {
        let full = generated_algebra(2, &[e(2, 0, 0), e(2, 0, 1)], true, &pol()).unwrap();
        let comm = commutant(&full, &pol()).unwrap();
        assert_eq!(comm.dim(), 1);
        assert!(comm.contains_unit());
    }

    #[test]
    fn commutant_of_scalars_is_everything() {
        let scalars = generated_algebra(4, &[], true, &pol()).unwrap();
        let comm = commutant(&scalars, &pol()).unwrap();
        assert_eq!(comm.dim(), 16);
    }

    #[test]
    fn commutant_of_diagonal_algebra_is_itself() {
        let g = ComplexMatrix::diagonal(&[Complex64::ONE, Complex64::new(2.0, 0.0)]);
        let diag = generated_algebra(2, &[g], true, &pol()).unwrap();
        let comm = commutant(&diag, &pol()).unwrap();
        assert_eq!(comm.dim(), 2);
        assert!(comm.same_span(&diag, 1e-9).unwrap());
    }

    #[test]
    fn bicommutant_on_random_generators() {
        for seed in 0..8u64 {
            let mut rng = seeded_rng(seed);
            let d = 2 + (seed as usize % 5); // up to 6
            let count = 1 + (seed as usize % 2);
            let gens: Vec<ComplexMatrix> = (0..count).map(|_| ginibre(d, &mut rng)).collect();
            let alg = generated_algebra(d, &gens, true, &pol()).unwrap();
            let double = commutant(&commutant(&alg, &pol()).unwrap(), &pol()).unwrap();
            assert_eq!(alg.dim(), double.dim(), "seed {seed}");
            assert!(alg.same_span(&double, 1e-8).unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn block_structure_of_full_matrix_algebra() {
        let full = generated_algebra(3, &[e(3, 0, 1), e(3, 1, 2)], true, &pol()).unwrap();
        assert_eq!(full.dim(), 9);
        let bs = block_structure(&full, &pol(), &mut seeded_rng(0)).unwrap();
        assert_eq!(bs.blocks, vec![(3, 1)]);
        assert!(bs.central_projections[0].max_abs_diff(&ComplexMatrix::identity(3)) < 1e-9);
    }

    #[test]
    fn block_structure_of_diagonal_algebra() {
        let g = ComplexMatrix::diagonal(&[Complex64::ONE, Complex64::new(2.0, 0.0)]);
        let diag = generated_algebra(2, &[g], true, &pol()).unwrap();
        let bs = block_structure(&diag, &pol(), &mut seeded_rng(1)).unwrap();
        assert_eq!(bs.blocks.len(), 2);
        assert!(bs.blocks.iter().all(|&b| b == (1, 1)));
        let sum = &bs.central_projections[0] + &bs.central_projections[1];
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-8);
    }

    #[test]
    fn block_structure_of_amplified_matrix_algebra() {
        // M_2 ⊗ I_3 inside M_6: span dimension 4, unit has rank 6
        let id3 = ComplexMatrix::identity(3);
        let gens: Vec<ComplexMatrix> =
            vec![e(2, 0, 0).kron(&id3), e(2, 0, 1).kron(&id3)];
        let alg = generated_algebra(6, &gens, true, &pol()).unwrap();
        assert_eq!(alg.dim(), 4);
        let bs = block_structure(&alg, &pol(), &mut seeded_rng(2)).unwrap();
        assert_eq!(bs.blocks, vec![(2, 3)]);
    }

    #[test]
    fn block_structure_dimension_bookkeeping() {
        // two-block algebra M_2 ⊕ M_1 inside M_3
        let mut g1 = ComplexMatrix::zeros(3);
        g1.set(0, 1, Complex64::ONE);
        let alg = generated_algebra(3, &[g1], true, &pol()).unwrap();
        let bs = block_structure(&alg, &pol(), &mut seeded_rng(3)).unwrap();
        let span_sum: usize = bs.blocks.iter().map(|&(m, _)| m * m).sum();
        assert_eq!(span_sum, alg.dim());
        let mut proj_sum = ComplexMatrix::zeros(3);
        for p in &bs.central_projections {
            proj_sum = &proj_sum + p;
        }
        assert!(proj_sum.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-8);
    }

    #[test]
    fn conditional_expectation_fixes_range_elements() {
        let mut rng = seeded_rng(4);
        let units = crate::units::random_unital_embedding(2, 4, &mut rng).unwrap();
        let x = units.embed(&ginibre(2, &mut rng)).unwrap();
        let ex = conditional_expectation(&x, &units, &Trace::Normalized, &pol()).unwrap();
        assert!(ex.max_abs_diff(&x) < 1e-9);
    }

    #[test]
    fn conditional_expectation_onto_scalars() {
        // the order-one unital system in M_3 is {1}; E(x) = tr(x)·1
        let units =
            MatrixUnitSystem::from_units(1, vec![ComplexMatrix::identity(3)]).unwrap();
        let mut rng = seeded_rng(5);
        let x = ginibre(3, &mut rng);
        let ex = conditional_expectation(&x, &units, &Trace::Normalized, &pol()).unwrap();
        let expected = &ComplexMatrix::identity(3) * x.normalized_trace();
        assert!(ex.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn diagonal_compression_via_orthogonal_projection() {
        // E onto the diagonal algebra of M_2 under tr_2 sends [[a,b],[c,d]]
        // to diag(a,d); evaluated directly from the projection formula.
        let x = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let family = vec![e(2, 0, 0), e(2, 1, 1)];
        let ex = crate::matrix::orthogonal_project(&x, &family, &Trace::Normalized).unwrap();
        let expected = ComplexMatrix::diagonal(&[Complex64::ONE, Complex64::new(4.0, 0.0)]);
        assert!(ex.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn conditional_expectation_is_idempotent_and_bimodular() {
        let mut rng = seeded_rng(6);
        let units = crate::units::random_unital_embedding(2, 6, &mut rng).unwrap();
        let tau = Trace::Normalized;
        let x = ginibre(6, &mut rng);
        let ex = conditional_expectation(&x, &units, &tau, &pol()).unwrap();
        let exx = conditional_expectation(&ex, &units, &tau, &pol()).unwrap();
        assert!(exx.max_abs_diff(&ex) < 1e-9);

        // E(f_ab · x · f_cd) = f_ab · E(x) · f_cd
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        let lhs = conditional_expectation(
                            &(&(units.unit(a, b) * &x) * units.unit(c, d)),
                            &units,
                            &tau,
                            &pol(),
                        )
                        .unwrap();
                        let rhs = &(units.unit(a, b) * &ex) * units.unit(c, d);
                        assert!(lhs.max_abs_diff(&rhs) < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn conditional_expectation_preserves_trace_and_is_selfadjoint() {
        let mut rng = seeded_rng(7);
        let units = crate::units::random_unital_embedding(3, 6, &mut rng).unwrap();
        let tau = Trace::Normalized;
        let x = ginibre(6, &mut rng);
        let y = ginibre(6, &mut rng);
        let ex = conditional_expectation(&x, &units, &tau, &pol()).unwrap();
        let ey = conditional_expectation(&y, &units, &tau, &pol()).unwrap();
        assert!((tau.eval(&ex).unwrap() - tau.eval(&x).unwrap()).norm() < 1e-12);
        let lhs = hs_inner(&ex, &y, &tau).unwrap();
        let rhs = hs_inner(&x, &ey, &tau).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn conditional_expectation_rejects_invalid_units() {
        let mut units: Vec<ComplexMatrix> = standard_units(2).units().to_vec();
        units[1] = &units[1] * 2.0;
        let sys = MatrixUnitSystem::from_units(2, units).unwrap();
        let x = ComplexMatrix::identity(2);
        assert!(matches!(
            conditional_expectation(&x, &sys, &Trace::Normalized, &pol()),
            Err(Error::InvalidUnits(_))
        ));
    }

    #[test]
    fn kernel_ideal_of_faithful_trace_is_zero() {
        let alg = FiniteTracialAlgebra::full(3);
        let ideal = trace_kernel_ideal(&alg, &pol()).unwrap();
        assert!(ideal.is_zero());
        assert_eq!(ideal.dim(), 0);
    }

    #[test]
    fn kernel_ideal_of_half_killed_sum() {
        let alg = FiniteTracialAlgebra::new(vec![2, 2], vec![1.0, 0.0]).unwrap();
        let ideal = trace_kernel_ideal(&alg, &pol()).unwrap();
        assert_eq!(ideal.dim(), 4);
        assert_eq!(ideal.zero_blocks, vec![1]);
        let expected = alg.block_projection(1);
        assert!(ideal.projection.max_abs_diff(&expected) == 0.0);
        // τ(a*a) vanishes on the ideal
        let tau = alg.trace_functional();
        for a in &ideal.basis {
            let v = tau.eval(&(&a.adjoint() * a)).unwrap();
            assert!(v.norm() < 1e-12);
        }
    }

    #[test]
    fn kernel_ideal_of_balanced_sum_is_zero() {
        let alg = FiniteTracialAlgebra::new(vec![2, 2], vec![0.5, 0.5]).unwrap();
        assert!(trace_kernel_ideal(&alg, &pol()).unwrap().is_zero());
    }

    #[test]
    fn tracial_algebra_rejects_bad_weights() {
        assert!(FiniteTracialAlgebra::new(vec![2], vec![0.5]).is_err());
        assert!(FiniteTracialAlgebra::new(vec![2, 2], vec![1.5, -0.5]).is_err());
        assert!(FiniteTracialAlgebra::new(vec![], vec![]).is_err());
    }

    #[test]
    fn weighted_trace_is_tracial_on_block_diagonal_elements() {
        let alg = FiniteTracialAlgebra::new(vec![2, 3], vec![0.25, 0.75]).unwrap();
        let mut rng = seeded_rng(8);
        let x = alg.assemble(&[ginibre(2, &mut rng), ginibre(3, &mut rng)]).unwrap();
        let y = alg.assemble(&[ginibre(2, &mut rng), ginibre(3, &mut rng)]).unwrap();
        let xy = alg.trace(&(&x * &y)).unwrap();
        let yx = alg.trace(&(&y * &x)).unwrap();
        assert!((xy - yx).norm() < 1e-12);
    }

    #[test]
    fn off_block_residual_detects_coupling() {
        let alg = FiniteTracialAlgebra::new(vec![1, 1], vec![0.5, 0.5]).unwrap();
        let x = e(2, 0, 1);
        assert!(!alg.is_block_diagonal(&x, 1e-9).unwrap());
        assert!((alg.off_block_residual(&x).unwrap() - 1.0).abs() < 1e-15);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(12))]

            #[test]
            fn bicommutant_fixes_generated_algebras(seed in 0u64..300, d in 2usize..6) {
                let p = pol();
                let mut rng = seeded_rng(seed);
                let gens = vec![ginibre(d, &mut rng)];
                let alg = generated_algebra(d, &gens, true, &p).unwrap();
                let double = commutant(&commutant(&alg, &p).unwrap(), &p).unwrap();
                prop_assert_eq!(alg.dim(), double.dim());
                prop_assert!(alg.same_span(&double, 1e-8).unwrap());
            }

            #[test]
            fn generated_algebra_basis_is_orthonormal(seed in 0u64..300) {
                let p = pol();
                let mut rng = seeded_rng(seed);
                let gens = vec![ginibre(3, &mut rng), ginibre(3, &mut rng)];
                let alg = generated_algebra(3, &gens, true, &p).unwrap();
                for (i, a) in alg.basis().iter().enumerate() {
                    for (j, b) in alg.basis().iter().enumerate() {
                        let g = hs_inner(a, b, &Trace::Total).unwrap();
                        let expect = if i == j { 1.0 } else { 0.0 };
                        prop_assert!((g - Complex64::new(expect, 0.0)).norm() < 1e-9);
                    }
                }
            }
        }
    }
}
