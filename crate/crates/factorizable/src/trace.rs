//! Finite-dimensional tracial states on the unital free product
//! `M_n * M_n` and the correspondence with factorizable channels.
//!
//! A trace here is concrete data: a block-weighted tracial algebra `(M, τ_M)`
//! together with two unital matrix-unit systems inside it, the images of the
//! two canonical copies of `M_n`. Every word in the two copies can be
//! evaluated, and the channel associated to the trace has Choi coefficients
//! `C_T(i,j;k,ℓ) = n·τ_M(f_kℓ* g_ij)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{
    block_structure, generated_algebra, FiniteTracialAlgebra, StarSubalgebra,
};
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::matrix::{hs_inner, ComplexMatrix, TolerancePolicy};
use crate::units::{random_unital_embedding, standard_units, MatrixUnitSystem};

/// Which canonical copy of `M_n` a word letter belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// The first copy, mapped through the `g` units.
    First,
    /// The second copy, mapped through the `f` units.
    Second,
}

/// A finite-dimensional tracial state on `M_n * M_n`: two block-wise
/// matrix-unit systems inside one block-weighted tracial algebra.
#[derive(Clone, Debug)]
pub struct FiniteDimTrace {
    n: usize,
    algebra: FiniteTracialAlgebra,
    g_units: MatrixUnitSystem,
    f_units: MatrixUnitSystem,
}

/// The `n⁴` values `K(i,j;k,ℓ) = τ_M(f_kℓ* g_ij)` identifying the channel of
/// a trace. Stored as an `n²×n²` matrix in the Choi index layout (row
/// `(i,k)`, column `(j,ℓ)`).
#[derive(Clone, Debug)]
pub struct CorrelationMatrix {
    n: usize,
    values: ComplexMatrix,
}

impl CorrelationMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.values.at(i * self.n + k, j * self.n + l)
    }

    /// The values in the Choi index layout.
    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.values
    }

    pub fn max_abs_diff(&self, other: &CorrelationMatrix) -> f64 {
        self.values.max_abs_diff(&other.values)
    }
}

impl FiniteDimTrace {
    /// Validate and package trace data.
    ///
    /// Both systems must be valid unital matrix-unit systems of order `n`
    /// in the algebra's representation dimension, block-diagonal with
    /// respect to its block pattern; every block dimension must be a
    /// multiple of `n` (otherwise no unital embedding exists).
    pub fn new(
        n: usize,
        algebra: FiniteTracialAlgebra,
        g_units: MatrixUnitSystem,
        f_units: MatrixUnitSystem,
        pol: &TolerancePolicy,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidTrace("order must be at least 1".into()));
        }
        for &d in algebra.block_dims() {
            if d % n != 0 {
                return Err(Error::IndivisibleDimension { n, d });
            }
        }
        for (name, units) in [("g", &g_units), ("f", &f_units)] {
            if units.order() != n {
                return Err(Error::InvalidTrace(format!(
                    "{name} units have order {}, expected {n}",
                    units.order()
                )));
            }
            if units.ambient_dim() != algebra.total_dim() {
                return Err(Error::DimensionMismatch(
                    units.ambient_dim(),
                    algebra.total_dim(),
                ));
            }
            let report = units.validate(pol);
            if !report.pass {
                return Err(Error::InvalidTrace(format!(
                    "{name} units fail {} (residual {:.3e})",
                    report.worst_relation, report.max_residual
                )));
            }
            for u in units.units() {
                let residual = algebra.off_block_residual(u)?;
                if residual > pol.eps_eq {
                    return Err(Error::NotBlockDiagonal(residual));
                }
            }
        }
        Ok(Self { n, algebra, g_units, f_units })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn algebra(&self) -> &FiniteTracialAlgebra {
        &self.algebra
    }

    /// Units of the first copy (`ι_1`).
    pub fn g_units(&self) -> &MatrixUnitSystem {
        &self.g_units
    }

    /// Units of the second copy (`ι_2`).
    pub fn f_units(&self) -> &MatrixUnitSystem {
        &self.f_units
    }

    /// The *-algebra generated by both unit systems inside the representing
    /// dimension, computed block by block.
    pub fn image_algebra(&self, pol: &TolerancePolicy) -> Result<StarSubalgebra> {
        let mut basis = Vec::new();
        for b in 0..self.algebra.block_count() {
            let gens = self.block_generators(b)?;
            let alg_b = generated_algebra(self.algebra.block_dims()[b], &gens, true, pol)?;
            for m in alg_b.basis() {
                basis.push(self.algebra.embed_block(b, m)?);
            }
        }
        Ok(crate::algebra::StarSubalgebra::from_orthonormal_basis(
            self.algebra.total_dim(),
            basis,
            pol,
        ))
    }

    /// All `2n²` unit compressions to ambient block `b`.
    fn block_generators(&self, b: usize) -> Result<Vec<ComplexMatrix>> {
        let mut gens = Vec::with_capacity(2 * self.n * self.n);
        for u in self.g_units.units().iter().chain(self.f_units.units()) {
            gens.push(self.algebra.extract_block(u, b)?);
        }
        Ok(gens)
    }
}

/// Package trace data after validation; the channel of the result has Choi
/// matrix `n·[τ(f_kℓ* g_ij)]` by construction.
pub fn trace_from_pair(
    n: usize,
    g_units: MatrixUnitSystem,
    f_units: MatrixUnitSystem,
    algebra: FiniteTracialAlgebra,
    pol: &TolerancePolicy,
) -> Result<FiniteDimTrace> {
    FiniteDimTrace::new(n, algebra, g_units, f_units, pol)
}

/// Evaluate the trace on a word in the two copies of `M_n`: each letter
/// `(side, x)` is sent through the corresponding unit system and the
/// block-wise product is traced. The empty word evaluates to `τ(1) = 1`.
pub fn evaluate_word(tr: &FiniteDimTrace, word: &[(Side, ComplexMatrix)]) -> Result<Complex64> {
    let mut product = ComplexMatrix::identity(tr.algebra().total_dim());
    for (side, x) in word {
        let units = match side {
            Side::First => tr.g_units(),
            Side::Second => tr.f_units(),
        };
        product = &product * &units.embed(x)?;
    }
    tr.algebra().trace(&product)
}

/// The correlation matrix `K(i,j;k,ℓ) = τ_M(f_kℓ* g_ij)`.
pub fn correlation_matrix(tr: &FiniteDimTrace) -> Result<CorrelationMatrix> {
    let n = tr.n();
    let tau = tr.algebra().trace_functional();
    let mut values = ComplexMatrix::zeros(n * n);
    for i in 0..n {
        for j in 0..n {
            let g = tr.g_units().unit(i, j);
            for k in 0..n {
                for l in 0..n {
                    let v = hs_inner(g, tr.f_units().unit(k, l), &tau)?;
                    values.set(i * n + k, j * n + l, v);
                }
            }
        }
    }
    Ok(CorrelationMatrix { n, values })
}

/// The channel associated to a trace: `C_T(i,j;k,ℓ) = n·τ(f_kℓ* g_ij)`.
///
/// The result is always completely positive, unital and trace-preserving.
pub fn phi(tr: &FiniteDimTrace) -> Result<Channel> {
    let k = correlation_matrix(tr)?;
    let choi = &k.values * (tr.n() as f64);
    Channel::from_choi(tr.n(), choi)
}

/// Whether two traces induce the same channel: their correlation matrices
/// (equivalently, their restrictions to the span of `ι_1(x)ι_2(y)`) agree
/// within `eps_eq`.
pub fn same_phi_fiber(
    t1: &FiniteDimTrace,
    t2: &FiniteDimTrace,
    pol: &TolerancePolicy,
) -> Result<bool> {
    if t1.n() != t2.n() {
        return Err(Error::DimensionMismatch(t1.n(), t2.n()));
    }
    let k1 = correlation_matrix(t1)?;
    let k2 = correlation_matrix(t2)?;
    Ok(k1.max_abs_diff(&k2) <= pol.eps_eq)
}

/// Decompose a trace into extremal components, one per Wedderburn block of
/// the algebra generated by the two unit systems.
///
/// Each component lives on a single full matrix block (the compression to a
/// minimal central projection of the generated algebra) and carries weight
/// `τ(central projection)`; weights sum to one and zero-weight blocks are
/// dropped. Recombining the components with their weights lands in the same
/// channel fiber as the input.
pub fn decompose_trace<R: Rng + ?Sized>(
    tr: &FiniteDimTrace,
    pol: &TolerancePolicy,
    rng: &mut R,
) -> Result<Vec<(f64, FiniteDimTrace)>> {
    let n = tr.n();
    let mut components = Vec::new();
    for b in 0..tr.algebra().block_count() {
        let weight_b = tr.algebra().weights()[b];
        if weight_b <= pol.eps_eq {
            continue;
        }
        let d_b = tr.algebra().block_dims()[b];
        let gens = tr.block_generators(b)?;
        let alg_b = generated_algebra(d_b, &gens, true, pol)?;
        let blocks = block_structure(&alg_b, pol, rng)?;
        for proj in &blocks.central_projections {
            let eig = proj.hermitian_eigen(pol.eps_eq)?;
            let range: Vec<usize> =
                (0..d_b).filter(|&k| eig.values[k] > 0.5).collect();
            let rank = range.len();
            // isometry from C^rank onto the range of the projection
            let v = DMatrix::from_fn(d_b, rank, |r, c| eig.vectors.at(r, range[c]));
            let vh = v.adjoint();
            let compress = |u: &ComplexMatrix, block: usize| -> Result<ComplexMatrix> {
                let part = tr.algebra().extract_block(u, block)?;
                ComplexMatrix::new(&vh * part.as_ref() * &v)
            };
            let g = (0..n * n)
                .map(|k| compress(&tr.g_units().units()[k], b))
                .collect::<Result<Vec<_>>>()?;
            let f = (0..n * n)
                .map(|k| compress(&tr.f_units().units()[k], b))
                .collect::<Result<Vec<_>>>()?;
            let component = FiniteDimTrace::new(
                n,
                FiniteTracialAlgebra::full(rank),
                MatrixUnitSystem::from_units(n, g)?,
                MatrixUnitSystem::from_units(n, f)?,
                pol,
            )?;
            components.push((weight_b * rank as f64 / d_b as f64, component));
        }
    }
    Ok(components)
}

/// Direct-sum combination of traces: block lists concatenate and weights
/// scale by the coefficients, so the correlation matrix (hence the channel)
/// is the coefficient-weighted sum of the inputs'.
pub fn convex_combine(
    traces: &[FiniteDimTrace],
    coeffs: &[f64],
    pol: &TolerancePolicy,
) -> Result<FiniteDimTrace> {
    if traces.is_empty() {
        return Err(Error::EmptyInput("convex combination of no traces"));
    }
    if traces.len() != coeffs.len() {
        return Err(Error::InvalidWeights(format!(
            "{} traces but {} coefficients",
            traces.len(),
            coeffs.len()
        )));
    }
    if coeffs.iter().any(|&c| c < 0.0) {
        return Err(Error::InvalidWeights("coefficients must be nonnegative".into()));
    }
    let total: f64 = coeffs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidWeights(format!("coefficients sum to {total}, expected 1")));
    }
    let n = traces[0].n();
    if traces.iter().any(|t| t.n() != n) {
        return Err(Error::InvalidTrace("traces have different orders".into()));
    }

    let mut dims = Vec::new();
    let mut weights = Vec::new();
    for (t, c) in traces.iter().zip(coeffs) {
        dims.extend_from_slice(t.algebra().block_dims());
        weights.extend(t.algebra().weights().iter().map(|w| w * c));
    }
    let algebra = FiniteTracialAlgebra::new(dims, weights)?;

    let total_dim = algebra.total_dim();
    let mut offsets = Vec::with_capacity(traces.len());
    let mut acc = 0usize;
    for t in traces {
        offsets.push(acc);
        acc += t.algebra().total_dim();
    }

    let direct_sum = |pick: &dyn Fn(&FiniteDimTrace) -> &MatrixUnitSystem| -> Result<MatrixUnitSystem> {
        let mut units = Vec::with_capacity(n * n);
        for k in 0..n * n {
            let mut big = ComplexMatrix::zeros(total_dim);
            for (t, &off) in traces.iter().zip(&offsets) {
                let u = &pick(t).units()[k];
                for r in 0..u.dim() {
                    for c in 0..u.dim() {
                        big.set(off + r, off + c, u.at(r, c));
                    }
                }
            }
            units.push(big);
        }
        MatrixUnitSystem::from_units(n, units)
    };

    FiniteDimTrace::new(
        n,
        algebra,
        direct_sum(&|t| t.g_units())?,
        direct_sum(&|t| t.f_units())?,
        pol,
    )
}

/// Combination with geometric weights `2^{-k}` renormalized to sum to one:
/// the kernel ideal of the result is the intersection of the inputs' kernel
/// ideals, so combining faithful traces (or traces whose zero-weight blocks
/// differ) yields a faithful trace on the surviving blocks.
pub fn faithful_combination(
    traces: &[FiniteDimTrace],
    pol: &TolerancePolicy,
) -> Result<FiniteDimTrace> {
    if traces.is_empty() {
        return Err(Error::EmptyInput("faithful combination of no traces"));
    }
    let len = traces.len() as i32;
    let norm = 1.0 - 2f64.powi(-len);
    let coeffs: Vec<f64> =
        (0..traces.len()).map(|k| 2f64.powi(-(k as i32 + 1)) / norm).collect();
    convex_combine(traces, &coeffs, pol)
}

/// The trace with `ι_1 = ι_2` the identity representation of `M_n`; its
/// channel is the identity channel.
pub fn identity_pair_trace(n: usize, pol: &TolerancePolicy) -> Result<FiniteDimTrace> {
    FiniteDimTrace::new(
        n,
        FiniteTracialAlgebra::full(n),
        standard_units(n),
        standard_units(n),
        pol,
    )
}

/// The trace on `M_n ⊗ M_n` with `ι_1(x) = x ⊗ 1` and `ι_2(x) = 1 ⊗ x`; its
/// channel is the completely depolarizing channel.
pub fn tensor_pair_trace(n: usize, pol: &TolerancePolicy) -> Result<FiniteDimTrace> {
    let id = ComplexMatrix::identity(n);
    let g = (0..n * n)
        .map(|k| ComplexMatrix::matrix_unit(n, k / n, k % n).kron(&id))
        .collect();
    let f = (0..n * n)
        .map(|k| id.kron(&ComplexMatrix::matrix_unit(n, k / n, k % n)))
        .collect();
    FiniteDimTrace::new(
        n,
        FiniteTracialAlgebra::full(n * n),
        MatrixUnitSystem::from_units(n, g)?,
        MatrixUnitSystem::from_units(n, f)?,
        pol,
    )
}

/// The trace realizing an ancilla channel: `ι_1(x) = u(x ⊗ 1)u*` and
/// `ι_2(x) = x ⊗ 1` inside `M_n ⊗ N` with the trace `tr_n ⊗ τ_N`.
///
/// The channel of the result coincides with
/// [`channel_from_ancilla`](crate::channel::channel_from_ancilla). Elements
/// of `M_n ⊗ N` are re-indexed from the Kronecker layout to the
/// block-diagonal layout of `⊕_j M_{n·d_j}`.
pub fn ancilla_pair_trace(
    u: &ComplexMatrix,
    n: usize,
    ancilla: &FiniteTracialAlgebra,
    pol: &TolerancePolicy,
) -> Result<FiniteDimTrace> {
    let dim_n = ancilla.total_dim();
    let big = n * dim_n;
    if u.dim() != big {
        return Err(Error::DimensionMismatch(u.dim(), big));
    }
    if !u.is_unitary(pol.eps_eq) {
        let residual = (&(u * &u.adjoint()) - &ComplexMatrix::identity(big)).hs_norm();
        return Err(Error::NotUnitary(residual));
    }

    // permutation from the Kronecker index i·dim_N + (off_j + q) to the
    // block-diagonal index n·off_j + i·d_j + q
    let mut to_new = vec![0usize; big];
    for j in 0..ancilla.block_count() {
        let off = ancilla.block_offset(j);
        let d_j = ancilla.block_dims()[j];
        for i in 0..n {
            for q in 0..d_j {
                to_new[i * dim_n + off + q] = n * off + i * d_j + q;
            }
        }
    }
    let shuffle = |x: &ComplexMatrix| -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(big);
        for r in 0..big {
            for c in 0..big {
                out.set(to_new[r], to_new[c], x.at(r, c));
            }
        }
        out
    };

    let dims: Vec<usize> = ancilla.block_dims().iter().map(|d| n * d).collect();
    let algebra = FiniteTracialAlgebra::new(dims, ancilla.weights().to_vec())?;

    let id_ancilla = ComplexMatrix::identity(dim_n);
    let uh = u.adjoint();
    let mut g = Vec::with_capacity(n * n);
    let mut f = Vec::with_capacity(n * n);
    for k in 0..n * n {
        let lifted = ComplexMatrix::matrix_unit(n, k / n, k % n).kron(&id_ancilla);
        g.push(shuffle(&(&(u * &lifted) * &uh)));
        f.push(shuffle(&lifted));
    }
    FiniteDimTrace::new(
        n,
        algebra,
        MatrixUnitSystem::from_units(n, g)?,
        MatrixUnitSystem::from_units(n, f)?,
        pol,
    )
}

/// Random finite-dimensional trace: independent Haar-random unital
/// embeddings per block for both copies. Every block dimension must be a
/// multiple of `n`.
pub fn random_trace<R: Rng + ?Sized>(
    n: usize,
    dims: &[usize],
    weights: &[f64],
    pol: &TolerancePolicy,
    rng: &mut R,
) -> Result<FiniteDimTrace> {
    let algebra = FiniteTracialAlgebra::new(dims.to_vec(), weights.to_vec())?;
    let mut embed_random = || -> Result<MatrixUnitSystem> {
        let mut block_systems = Vec::new();
        for &d in dims {
            block_systems.push(random_unital_embedding(n, d, rng)?);
        }
        let mut units = Vec::with_capacity(n * n);
        for k in 0..n * n {
            let blocks: Vec<ComplexMatrix> =
                block_systems.iter().map(|s| s.units()[k].clone()).collect();
            units.push(algebra.assemble(&blocks)?);
        }
        MatrixUnitSystem::from_units(n, units)
    };
    let g = embed_random()?;
    let f = embed_random()?;
    FiniteDimTrace::new(n, algebra, g, f, pol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::trace_kernel_ideal;
    use crate::channel::{channel_distance, channel_from_ancilla, verify_channel};
    use crate::matrix::{haar_unitary, seeded_rng};

    fn pol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn e(d: usize, i: usize, j: usize) -> ComplexMatrix {
        ComplexMatrix::matrix_unit(d, i, j)
    }

    #[test]
    fn single_letter_diagonal_unit_evaluates_to_one_over_n() {
        for n in [2usize, 3] {
            let tr = random_trace(n, &[2 * n, 3 * n], &[0.4, 0.6], &pol(), &mut seeded_rng(1))
                .unwrap();
            for side in [Side::First, Side::Second] {
                let v = evaluate_word(&tr, &[(side, e(n, 0, 0))]).unwrap();
                assert!((v - Complex64::new(1.0 / n as f64, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn empty_word_evaluates_to_one() {
        let tr = identity_pair_trace(2, &pol()).unwrap();
        let v = evaluate_word(&tr, &[]).unwrap();
        assert!((v - Complex64::ONE).norm() < 1e-15);
    }

    #[test]
    fn word_evaluation_is_tracial() {
        let mut rng = seeded_rng(2);
        let tr = random_trace(2, &[4, 2], &[0.5, 0.5], &pol(), &mut rng).unwrap();
        for _ in 0..10 {
            let w1: Vec<(Side, ComplexMatrix)> = vec![
                (Side::First, crate::matrix::ginibre(2, &mut rng)),
                (Side::Second, crate::matrix::ginibre(2, &mut rng)),
            ];
            let w2: Vec<(Side, ComplexMatrix)> = vec![
                (Side::Second, crate::matrix::ginibre(2, &mut rng)),
                (Side::First, crate::matrix::ginibre(2, &mut rng)),
            ];
            let mut ww = w1.clone();
            ww.extend(w2.clone());
            let mut ww_rev = w2;
            ww_rev.extend(w1);
            let a = evaluate_word(&tr, &ww).unwrap();
            let b = evaluate_word(&tr, &ww_rev).unwrap();
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn identity_pair_correlations() {
        // K(i,j;k,ℓ) = tr_n(e_ℓk e_ij) = δ_ik δ_jℓ / n
        let n = 2;
        let k = correlation_matrix(&identity_pair_trace(n, &pol()).unwrap()).unwrap();
        for i in 0..n {
            for j in 0..n {
                for kk in 0..n {
                    for l in 0..n {
                        let expect = if i == kk && j == l { 1.0 / n as f64 } else { 0.0 };
                        assert!((k.value(i, j, kk, l) - Complex64::new(expect, 0.0)).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_pair_correlations() {
        // product trace factorizes: K(i,j;k,ℓ) = δ_ij δ_kℓ / n²
        let n = 2;
        let k = correlation_matrix(&tensor_pair_trace(n, &pol()).unwrap()).unwrap();
        for i in 0..n {
            for j in 0..n {
                for kk in 0..n {
                    for l in 0..n {
                        let expect = if i == j && kk == l { 0.25 } else { 0.0 };
                        assert!((k.value(i, j, kk, l) - Complex64::new(expect, 0.0)).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn phi_of_identity_pair_is_identity_channel() {
        for n in [2usize, 3] {
            let ch = phi(&identity_pair_trace(n, &pol()).unwrap()).unwrap();
            assert!(ch.choi().max_abs_diff(Channel::identity(n).choi()) < 1e-12);
        }
    }

    #[test]
    fn phi_of_tensor_pair_is_depolarizing_channel() {
        for n in [2usize, 3] {
            let ch = phi(&tensor_pair_trace(n, &pol()).unwrap()).unwrap();
            let expected = &ComplexMatrix::identity(n * n) * (1.0 / n as f64);
            assert!(ch.choi().max_abs_diff(&expected) < 1e-12);
        }
    }

    #[test]
    fn phi_of_conjugation_pair_matches_ancilla_channel() {
        let n = 2;
        let mut rng = seeded_rng(3);
        let v = haar_unitary(n, &mut rng);
        // g_ij = v e_ij v*, f standard, trace tr_n
        let g: Vec<ComplexMatrix> =
            (0..n * n).map(|k| &(&v * &e(n, k / n, k % n)) * &v.adjoint()).collect();
        let tr = FiniteDimTrace::new(
            n,
            FiniteTracialAlgebra::full(n),
            MatrixUnitSystem::from_units(n, g).unwrap(),
            standard_units(n),
            &pol(),
        )
        .unwrap();
        let via_phi = phi(&tr).unwrap();
        // same data through the trivial-ancilla unitary u = v ⊗ 1
        let ancilla = FiniteTracialAlgebra::full(1);
        let via_ancilla = channel_from_ancilla(&v, n, &ancilla, &pol()).unwrap();
        assert!(via_phi.choi().max_abs_diff(via_ancilla.choi()) < 1e-12);
    }

    #[test]
    fn phi_always_lands_in_quantum_channels() {
        let mut rng = seeded_rng(4);
        for n in [2usize, 3] {
            for _ in 0..5 {
                let tr =
                    random_trace(n, &[n, 2 * n], &[0.3, 0.7], &pol(), &mut rng).unwrap();
                let report = verify_channel(&phi(&tr).unwrap(), &pol()).unwrap();
                assert!(report.is_quantum_channel(), "{report:?}");
            }
        }
    }

    #[test]
    fn ancilla_pair_trace_matches_channel_pipeline() {
        // the coordinates chain: both pipelines produce the same Choi matrix
        let mut rng = seeded_rng(5);
        for (n, d) in [(2usize, 2usize), (2, 3), (3, 2)] {
            let ancilla = FiniteTracialAlgebra::full(d);
            let u = haar_unitary(n * d, &mut rng);
            let via_channel = channel_from_ancilla(&u, n, &ancilla, &pol()).unwrap();
            let tr = ancilla_pair_trace(&u, n, &ancilla, &pol()).unwrap();
            let via_trace = phi(&tr).unwrap();
            assert!(via_channel.choi().max_abs_diff(via_trace.choi()) < 1e-9);
        }
    }

    #[test]
    fn ancilla_pair_trace_with_block_ancilla() {
        // block-diagonal ancilla with nontrivial weights
        let n = 2;
        let ancilla = FiniteTracialAlgebra::new(vec![2, 1], vec![0.6, 0.4]).unwrap();
        let mut rng = seeded_rng(6);
        // block-diagonal unitary in M_2 ⊗ N
        let u_blocks = [haar_unitary(4, &mut rng), haar_unitary(2, &mut rng)];
        let big = 6;
        let mut u = ComplexMatrix::zeros(big);
        for (j, uj) in u_blocks.iter().enumerate() {
            let d_j = ancilla.block_dims()[j];
            let off = ancilla.block_offset(j);
            for r in 0..n * d_j {
                for c in 0..n * d_j {
                    let (ri, rq) = (r / d_j, r % d_j);
                    let (ci, cq) = (c / d_j, c % d_j);
                    u.set(ri * 3 + off + rq, ci * 3 + off + cq, uj.at(r, c));
                }
            }
        }
        let via_channel = channel_from_ancilla(&u, n, &ancilla, &pol()).unwrap();
        let tr = ancilla_pair_trace(&u, n, &ancilla, &pol()).unwrap();
        let via_trace = phi(&tr).unwrap();
        assert!(via_channel.choi().max_abs_diff(via_trace.choi()) < 1e-9);
    }

    #[test]
    fn trace_from_pair_rejects_indivisible_blocks() {
        let n = 2;
        let algebra = FiniteTracialAlgebra::new(vec![3], vec![1.0]).unwrap();
        let units = standard_units(n);
        assert!(matches!(
            trace_from_pair(n, units.clone(), units, algebra, &pol()),
            Err(Error::IndivisibleDimension { n: 2, d: 3 })
        ));
    }

    #[test]
    fn decompose_two_block_trace() {
        let mut rng = seeded_rng(7);
        let tr = random_trace(2, &[4, 6], &[0.3, 0.7], &pol(), &mut rng).unwrap();
        let parts = decompose_trace(&tr, &pol(), &mut rng).unwrap();
        assert_eq!(parts.len(), 2);
        let mut weights: Vec<f64> = parts.iter().map(|(w, _)| *w).collect();
        weights.sort_by(f64::total_cmp);
        assert!((weights[0] - 0.3).abs() < 1e-10);
        assert!((weights[1] - 0.7).abs() < 1e-10);
    }

    #[test]
    fn decompose_single_block_trace_is_itself() {
        let mut rng = seeded_rng(8);
        let tr = random_trace(2, &[4], &[1.0], &pol(), &mut rng).unwrap();
        let parts = decompose_trace(&tr, &pol(), &mut rng).unwrap();
        assert_eq!(parts.len(), 1);
        assert!((parts[0].0 - 1.0).abs() < 1e-12);
        assert!(same_phi_fiber(&tr, &parts[0].1, &pol()).unwrap());
    }

    #[test]
    fn decompose_then_recombine_preserves_fiber() {
        let mut rng = seeded_rng(9);
        let tr = random_trace(2, &[4, 2], &[0.45, 0.55], &pol(), &mut rng).unwrap();
        let parts = decompose_trace(&tr, &pol(), &mut rng).unwrap();
        let weights: Vec<f64> = parts.iter().map(|(w, _)| *w).collect();
        let traces: Vec<FiniteDimTrace> = parts.into_iter().map(|(_, t)| t).collect();
        let back = convex_combine(&traces, &weights, &pol()).unwrap();
        assert!(same_phi_fiber(&tr, &back, &pol()).unwrap());
        let k1 = correlation_matrix(&tr).unwrap();
        let k2 = correlation_matrix(&back).unwrap();
        assert!(k1.max_abs_diff(&k2) < 1e-10);
    }

    #[test]
    fn decompose_splits_reducible_single_block() {
        // ι_1 = ι_2 with a block-diagonal embedding of M_2 into M_4 whose
        // two sub-blocks differ by conjugation: the generated algebra is a
        // proper subalgebra and may split into several central summands
        let n = 2;
        let mut rng = seeded_rng(10);
        let w = haar_unitary(2, &mut rng);
        let units: Vec<ComplexMatrix> = (0..4)
            .map(|k| {
                let x = e(2, k / 2, k % 2);
                let twisted = &(&w * &x) * &w.adjoint();
                // diag(x, w x w*) in M_4
                ComplexMatrix::from_fn(4, |r, c| match (r / 2, c / 2) {
                    (0, 0) => x.at(r % 2, c % 2),
                    (1, 1) => twisted.at(r % 2, c % 2),
                    _ => Complex64::ZERO,
                })
            })
            .collect();
        let sys = MatrixUnitSystem::from_units(2, units).unwrap();
        let tr = FiniteDimTrace::new(
            n,
            FiniteTracialAlgebra::full(4),
            sys.clone(),
            sys,
            &pol(),
        )
        .unwrap();
        let parts = decompose_trace(&tr, &pol(), &mut rng).unwrap();
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        assert!((total - 1.0).abs() < 1e-10);
        // recombination stays in the fiber regardless of how fine the split is
        let weights: Vec<f64> = parts.iter().map(|(w, _)| *w).collect();
        let traces: Vec<FiniteDimTrace> = parts.into_iter().map(|(_, t)| t).collect();
        let back = convex_combine(&traces, &weights, &pol()).unwrap();
        assert!(same_phi_fiber(&tr, &back, &pol()).unwrap());
    }

    #[test]
    fn combine_with_degenerate_coefficients_keeps_first_correlations() {
        let mut rng = seeded_rng(11);
        let t1 = random_trace(2, &[2], &[1.0], &pol(), &mut rng).unwrap();
        let t2 = random_trace(2, &[4], &[1.0], &pol(), &mut rng).unwrap();
        let combined = convex_combine(&[t1.clone(), t2], &[1.0, 0.0], &pol()).unwrap();
        let k1 = correlation_matrix(&t1).unwrap();
        let kc = correlation_matrix(&combined).unwrap();
        assert!(k1.max_abs_diff(&kc) < 1e-12);
    }

    #[test]
    fn phi_is_affine_on_combinations() {
        let mut rng = seeded_rng(12);
        let t1 = random_trace(2, &[2], &[1.0], &pol(), &mut rng).unwrap();
        let t2 = random_trace(2, &[4], &[1.0], &pol(), &mut rng).unwrap();
        let c = 0.35;
        let combined = convex_combine(&[t1.clone(), t2.clone()], &[c, 1.0 - c], &pol()).unwrap();
        let lhs = phi(&combined).unwrap();
        let rhs_mat =
            &(phi(&t1).unwrap().choi() * c) + &(phi(&t2).unwrap().choi() * (1.0 - c));
        assert!(lhs.choi().max_abs_diff(&rhs_mat) < 1e-10);
    }

    #[test]
    fn combine_concatenates_blocks_and_scales_weights() {
        let mut rng = seeded_rng(13);
        let t1 = random_trace(2, &[2, 4], &[0.5, 0.5], &pol(), &mut rng).unwrap();
        let t2 = random_trace(2, &[6], &[1.0], &pol(), &mut rng).unwrap();
        let combined = convex_combine(&[t1, t2], &[0.25, 0.75], &pol()).unwrap();
        assert_eq!(combined.algebra().block_dims(), &[2, 4, 6]);
        let w = combined.algebra().weights();
        assert!((w[0] - 0.125).abs() < 1e-12);
        assert!((w[1] - 0.125).abs() < 1e-12);
        assert!((w[2] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn combine_rejects_bad_coefficients() {
        let mut rng = seeded_rng(14);
        let t = random_trace(2, &[2], &[1.0], &pol(), &mut rng).unwrap();
        assert!(convex_combine(&[t.clone(), t.clone()], &[0.5, 0.4], &pol()).is_err());
        assert!(convex_combine(&[t.clone(), t], &[1.5, -0.5], &pol()).is_err());
    }

    #[test]
    fn faithful_combination_weights_are_renormalized_powers_of_two() {
        let mut rng = seeded_rng(15);
        let ts: Vec<FiniteDimTrace> = (0..3)
            .map(|_| random_trace(2, &[2], &[1.0], &pol(), &mut rng).unwrap())
            .collect();
        let combined = faithful_combination(&ts, &pol()).unwrap();
        let w = combined.algebra().weights();
        assert!((w[0] - 4.0 / 7.0).abs() < 1e-12);
        assert!((w[1] - 2.0 / 7.0).abs() < 1e-12);
        assert!((w[2] - 1.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn faithful_combination_of_single_faithful_trace() {
        let mut rng = seeded_rng(16);
        let t = random_trace(2, &[4], &[1.0], &pol(), &mut rng).unwrap();
        let combined = faithful_combination(&[t.clone()], &pol()).unwrap();
        assert!((combined.algebra().weights()[0] - 1.0).abs() < 1e-12);
        let ideal = trace_kernel_ideal(combined.algebra(), &pol()).unwrap();
        assert!(ideal.is_zero());
        assert!(same_phi_fiber(&t, &combined, &pol()).unwrap());
    }

    #[test]
    fn faithful_combination_keeps_blocks_positive_somewhere() {
        // each input kills one block; the combination's kernel ideal is the
        // direct sum of the killed blocks (the intersection of the ideals)
        let mut rng = seeded_rng(17);
        let t1 = random_trace(2, &[2, 4], &[1.0, 0.0], &pol(), &mut rng).unwrap();
        let t2 = random_trace(2, &[6, 2], &[0.0, 1.0], &pol(), &mut rng).unwrap();
        let i1 = trace_kernel_ideal(t1.algebra(), &pol()).unwrap();
        let i2 = trace_kernel_ideal(t2.algebra(), &pol()).unwrap();
        let combined = faithful_combination(&[t1, t2], &pol()).unwrap();
        let ideal = trace_kernel_ideal(combined.algebra(), &pol()).unwrap();
        assert_eq!(ideal.dim(), i1.dim() + i2.dim());
        assert_eq!(ideal.zero_blocks, vec![1, 2]);
    }

    #[test]
    fn fiber_detects_padding_with_duplicate_block() {
        let mut rng = seeded_rng(18);
        let t = random_trace(2, &[4], &[1.0], &pol(), &mut rng).unwrap();
        // pad with a duplicate of the same block at split weights
        let padded = convex_combine(&[t.clone(), t.clone()], &[0.5, 0.5], &pol()).unwrap();
        assert!(same_phi_fiber(&t, &padded, &pol()).unwrap());
        assert!(channel_distance(&phi(&t).unwrap(), &phi(&padded).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn fiber_separates_identity_and_tensor_pairs() {
        let t1 = identity_pair_trace(2, &pol()).unwrap();
        let t2 = tensor_pair_trace(2, &pol()).unwrap();
        assert!(!same_phi_fiber(&t1, &t2, &pol()).unwrap());
        assert!(channel_distance(&phi(&t1).unwrap(), &phi(&t2).unwrap()).unwrap() > 0.1);
    }

    #[test]
    fn fiber_agrees_with_channel_distance() {
        let mut rng = seeded_rng(19);
        let t1 = random_trace(2, &[2, 2], &[0.5, 0.5], &pol(), &mut rng).unwrap();
        let t2 = random_trace(2, &[4], &[1.0], &pol(), &mut rng).unwrap();
        let same = same_phi_fiber(&t1, &t2, &pol()).unwrap();
        let dist = channel_distance(&phi(&t1).unwrap(), &phi(&t2).unwrap()).unwrap();
        assert_eq!(same, dist < 1e-9);
    }

    #[test]
    fn image_algebra_of_random_trace_is_full_per_block() {
        let mut rng = seeded_rng(20);
        let tr = random_trace(2, &[2, 4], &[0.5, 0.5], &pol(), &mut rng).unwrap();
        // two independent Haar embeddings generate each full block
        let alg = tr.image_algebra(&pol()).unwrap();
        assert_eq!(alg.dim(), 4 + 16);
        assert!(alg.contains_unit());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(10))]

            #[test]
            fn phi_lands_in_quantum_channels(seed in 0u64..500, n in 2usize..4) {
                let p = pol();
                let mut rng = seeded_rng(seed);
                let tr = random_trace(n, &[n, 2 * n], &[0.5, 0.5], &p, &mut rng).unwrap();
                let report = verify_channel(&phi(&tr).unwrap(), &p).unwrap();
                prop_assert!(report.is_quantum_channel());
            }

            #[test]
            fn word_traciality_on_longer_words(seed in 0u64..500) {
                let p = pol();
                let mut rng = seeded_rng(seed);
                let tr = random_trace(2, &[2, 2], &[0.5, 0.5], &p, &mut rng).unwrap();
                let letters: Vec<(Side, ComplexMatrix)> = (0..4)
                    .map(|k| {
                        let side = if k % 2 == 0 { Side::First } else { Side::Second };
                        (side, crate::matrix::ginibre(2, &mut rng))
                    })
                    .collect();
                let (head, tail) = letters.split_at(2);
                let mut forward = head.to_vec();
                forward.extend(tail.to_vec());
                let mut backward = tail.to_vec();
                backward.extend(head.to_vec());
                let a = evaluate_word(&tr, &forward).unwrap();
                let b = evaluate_word(&tr, &backward).unwrap();
                prop_assert!((a - b).norm() < 1e-10);
            }
        }
    }
}
