//! Systems of matrix units: construction, validation, random unital
//! embeddings, intertwining unitaries, and the matrix-unit construction from
//! a family of unitaries.
//!
//! A matrix-unit system of order `n` in `M_d` is a family `{f_ij}` with
//! `f_ij f_kl = δ_jk f_il`, `f_ij* = f_ji` and `Σ_i f_ii = 1`; it is the same
//! data as a unital embedding `M_n → M_d`.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::{haar_unitary, ComplexMatrix, TolerancePolicy};

/// An `n×n` family of `d×d` matrices satisfying the matrix-unit relations.
#[derive(Clone, Debug)]
pub struct MatrixUnitSystem {
    n: usize,
    ambient_dim: usize,
    /// Row-major: `units[i*n + j]` is `f_ij`.
    units: Vec<ComplexMatrix>,
}

/// Outcome of a matrix-unit validation run.
#[derive(Clone, Debug)]
pub struct UnitsReport {
    pub pass: bool,
    pub max_residual: f64,
    /// Human-readable description of the worst-violating relation.
    pub worst_relation: String,
}

impl MatrixUnitSystem {
    /// Package a raw family without validating the relations; indices are
    /// row-major, `units[i*n + j] = f_ij`.
    pub fn from_units(n: usize, units: Vec<ComplexMatrix>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidUnits("order must be at least 1".into()));
        }
        if units.len() != n * n {
            return Err(Error::InvalidUnits(format!(
                "expected {} matrices, got {}",
                n * n,
                units.len()
            )));
        }
        let ambient_dim = units[0].dim();
        if units.iter().any(|u| u.dim() != ambient_dim) {
            return Err(Error::InvalidUnits("units have inconsistent dimensions".into()));
        }
        Ok(Self { n, ambient_dim, units })
    }

    /// Same as [`from_units`](Self::from_units) but rejects families that
    /// fail the relations at the given policy.
    pub fn from_units_validated(
        n: usize,
        units: Vec<ComplexMatrix>,
        pol: &TolerancePolicy,
    ) -> Result<Self> {
        let sys = Self::from_units(n, units)?;
        let report = sys.validate(pol);
        if !report.pass {
            return Err(Error::InvalidUnits(format!(
                "relations fail: {} (residual {:.3e})",
                report.worst_relation, report.max_residual
            )));
        }
        Ok(sys)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// The unit `f_ij`.
    pub fn unit(&self, i: usize, j: usize) -> &ComplexMatrix {
        assert!(i < self.n && j < self.n, "unit index out of range");
        &self.units[i * self.n + j]
    }

    pub fn units(&self) -> &[ComplexMatrix] {
        &self.units
    }

    /// Linear extension `x ↦ Σ_ij x_ij f_ij` of the embedding `M_n → M_d`.
    pub fn embed(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch(x.dim(), self.n));
        }
        let mut acc = ComplexMatrix::zeros(self.ambient_dim);
        for i in 0..self.n {
            for j in 0..self.n {
                let c = x.at(i, j);
                if c != Complex64::ZERO {
                    acc = &acc + &(self.unit(i, j) * c);
                }
            }
        }
        Ok(acc)
    }

    /// Check the three matrix-unit relations entrywise and report the worst
    /// residual. Failures are report entries, never errors.
    pub fn validate(&self, pol: &TolerancePolicy) -> UnitsReport {
        let n = self.n;
        let mut worst = 0.0f64;
        let mut worst_relation = String::from("all relations hold");

        let mut check = |residual: f64, describe: &dyn Fn() -> String| {
            if residual > worst {
                worst = residual;
                worst_relation = describe();
            }
        };

        // f_ij* = f_ji
        for i in 0..n {
            for j in 0..n {
                let r = self.unit(i, j).adjoint().max_abs_diff(self.unit(j, i));
                check(r, &|| format!("f_{}{}* = f_{}{}", i + 1, j + 1, j + 1, i + 1));
            }
        }
        // f_ij f_kl = delta_jk f_il
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let prod = self.unit(i, j) * self.unit(k, l);
                        let expected = if j == k {
                            self.unit(i, l).clone()
                        } else {
                            ComplexMatrix::zeros(self.ambient_dim)
                        };
                        let r = prod.max_abs_diff(&expected);
                        let rhs = if j == k { format!("f_{}{}", i + 1, l + 1) } else { "0".into() };
                        check(r, &|| format!("f_{}{} · f_{}{} = {}", i + 1, j + 1, k + 1, l + 1, rhs));
                    }
                }
            }
        }
        // sum f_ii = 1
        let mut diag_sum = ComplexMatrix::zeros(self.ambient_dim);
        for i in 0..n {
            diag_sum = &diag_sum + self.unit(i, i);
        }
        let r = diag_sum.max_abs_diff(&ComplexMatrix::identity(self.ambient_dim));
        check(r, &|| "Σ f_ii = 1".to_string());

        UnitsReport { pass: worst <= pol.eps_eq, max_residual: worst, worst_relation }
    }
}

/// The standard matrix units `e_ij` of `M_n`.
pub fn standard_units(n: usize) -> MatrixUnitSystem {
    let units = (0..n * n)
        .map(|k| ComplexMatrix::matrix_unit(n, k / n, k % n))
        .collect();
    MatrixUnitSystem::from_units(n, units).expect("standard units are well-formed")
}

/// Validate a system against the matrix-unit relations.
pub fn validate_units(sys: &MatrixUnitSystem, pol: &TolerancePolicy) -> UnitsReport {
    sys.validate(pol)
}

/// Haar-random unital embedding `M_n → M_d`: conjugates the block system
/// `e_ij ⊗ 1_{d/n}` by a random unitary. Requires `n | d`.
pub fn random_unital_embedding<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    rng: &mut R,
) -> Result<MatrixUnitSystem> {
    if n == 0 || d == 0 || d % n != 0 {
        return Err(Error::IndivisibleDimension { n, d });
    }
    let m = d / n;
    let u = haar_unitary(d, rng);
    let uh = u.adjoint();
    let idm = ComplexMatrix::identity(m);
    let units = (0..n * n)
        .map(|k| {
            let block = ComplexMatrix::matrix_unit(n, k / n, k % n).kron(&idm);
            &(&u * &block) * &uh
        })
        .collect();
    MatrixUnitSystem::from_units(n, units)
}

/// A unitary `u` with `u · fp_ij · u* = f_ij` for all `i,j`.
///
/// Both systems must be unital of the same order in the same ambient
/// dimension. The unitary is assembled as `u = Σ_k f_k1 · w · fp_1k` where
/// `w` is an isometry from the range of `fp_11` onto the range of `f_11`;
/// the isometry maps eigenbasis to eigenbasis in index order, and any other
/// choice differs by a unitary in the relative commutant.
pub fn intertwiner(f: &MatrixUnitSystem, fp: &MatrixUnitSystem) -> Result<ComplexMatrix> {
    if f.order() != fp.order() {
        return Err(Error::DimensionMismatch(f.order(), fp.order()));
    }
    if f.ambient_dim() != fp.ambient_dim() {
        return Err(Error::DimensionMismatch(f.ambient_dim(), fp.ambient_dim()));
    }
    let d = f.ambient_dim();

    let range_basis = |p: &ComplexMatrix| -> Result<Vec<nalgebra::DVector<Complex64>>> {
        let eig = p.hermitian_eigen(1e-9)?;
        let mut cols = Vec::new();
        for (k, &lambda) in eig.values.iter().enumerate() {
            if lambda > 0.5 {
                cols.push(eig.vectors.as_ref().column(k).clone_owned());
            }
        }
        Ok(cols)
    };

    let target = range_basis(f.unit(0, 0))?;
    let source = range_basis(fp.unit(0, 0))?;
    if target.len() != source.len() {
        return Err(Error::InvalidUnits(format!(
            "corner projections have different ranks: {} vs {}",
            target.len(),
            source.len()
        )));
    }
    // w = sum_t a_t b_t*, mapping range(fp_11) onto range(f_11)
    let mut w = ComplexMatrix::zeros(d);
    for (a, b) in target.iter().zip(source.iter()) {
        let rank_one = ComplexMatrix::from_fn(d, |i, j| a[i] * b[j].conj());
        w = &w + &rank_one;
    }

    let mut u = ComplexMatrix::zeros(d);
    for k in 0..f.order() {
        u = &u + &(&(f.unit(k, 0) * &w) * fp.unit(0, k));
    }
    Ok(u)
}

/// [`intertwiner`] plus the worst residual over `‖u·fp_ij·u* − f_ij‖` and
/// `‖uu* − 1‖`, measured entrywise.
pub fn intertwiner_checked(
    f: &MatrixUnitSystem,
    fp: &MatrixUnitSystem,
) -> Result<(ComplexMatrix, f64)> {
    let u = intertwiner(f, fp)?;
    let d = f.ambient_dim();
    let uh = u.adjoint();
    let mut worst = (&u * &uh).max_abs_diff(&ComplexMatrix::identity(d));
    for i in 0..f.order() {
        for j in 0..f.order() {
            let moved = &(&u * fp.unit(i, j)) * &uh;
            worst = worst.max(moved.max_abs_diff(f.unit(i, j)));
        }
    }
    Ok((u, worst))
}

/// Matrix-unit system of order `n` in `M_n ⊗ M_d` built from unitaries
/// `u_2, …, u_n` in `M_d`: `f_11 = e_11 ⊗ 1`, `f_1j = e_1j ⊗ u_j`, and
/// `f_ij = f_1i* · f_1j`.
pub fn units_from_unitaries(
    n: usize,
    unitaries: &[ComplexMatrix],
    pol: &TolerancePolicy,
) -> Result<MatrixUnitSystem> {
    if n < 2 {
        return Err(Error::InvalidUnits("order must be at least 2".into()));
    }
    if unitaries.len() != n - 1 {
        return Err(Error::InvalidUnits(format!(
            "expected {} unitaries u_2..u_{}, got {}",
            n - 1,
            n,
            unitaries.len()
        )));
    }
    let d = unitaries[0].dim();
    for u in unitaries {
        if u.dim() != d {
            return Err(Error::DimensionMismatch(u.dim(), d));
        }
        if !u.is_unitary(pol.eps_eq) {
            let residual = (&(u * &u.adjoint()) - &ComplexMatrix::identity(d)).hs_norm();
            return Err(Error::NotUnitary(residual));
        }
    }

    let id = ComplexMatrix::identity(d);
    let mut first_row = Vec::with_capacity(n);
    first_row.push(ComplexMatrix::matrix_unit(n, 0, 0).kron(&id));
    for (j, u) in unitaries.iter().enumerate() {
        first_row.push(ComplexMatrix::matrix_unit(n, 0, j + 1).kron(u));
    }

    let mut units = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            units.push(&first_row[i].adjoint() * &first_row[j]);
        }
    }
    MatrixUnitSystem::from_units(n, units)
}

/// Decompose `b ∈ M_n ⊗ M_d` into its `n×n` array of `d×d` blocks, the
/// unique `g_ij` with `b = Σ e_ij ⊗ g_ij`.
pub fn generator_blocks(b: &ComplexMatrix, n: usize) -> Result<Vec<ComplexMatrix>> {
    if n == 0 || b.dim() % n != 0 {
        return Err(Error::IndivisibleDimension { n, d: b.dim() });
    }
    let d = b.dim() / n;
    let mut blocks = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            blocks.push(ComplexMatrix::from_fn(d, |p, q| b.at(i * d + p, j * d + q)));
        }
    }
    Ok(blocks)
}

/// Inverse of [`generator_blocks`]: assemble `Σ e_ij ⊗ g_ij`.
pub fn assemble_blocks(n: usize, blocks: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    if blocks.len() != n * n {
        return Err(Error::DimensionMismatch(blocks.len(), n * n));
    }
    let d = blocks[0].dim();
    if blocks.iter().any(|g| g.dim() != d) {
        return Err(Error::InvalidUnits("blocks have inconsistent dimensions".into()));
    }
    Ok(ComplexMatrix::from_fn(n * d, |r, c| blocks[(r / d) * n + (c / d)].at(r % d, c % d)))
}
