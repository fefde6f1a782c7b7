//! Two unital copies of M_n can generate surprisingly large algebras:
//! whenever A is generated by n−1 unitaries, M_n ⊗ A is generated by the
//! standard copy x ⊗ 1 together with the system f_11 = e_11 ⊗ 1,
//! f_1j = e_1j ⊗ u_j.
//!
//! The span dimension of the generated algebra is n² · dim A, which this
//! example verifies by direct saturation.
//!
//! Run with `cargo run --example two_copies_generate`.

use factorizable::algebra::generated_algebra;
use factorizable::matrix::{pauli_x, pauli_z, ComplexMatrix, TolerancePolicy};
use factorizable::units::{standard_units, units_from_unitaries, validate_units};
use num_complex::Complex64;

fn generated_dimension(n: usize, unitaries: &[ComplexMatrix], pol: &TolerancePolicy) -> usize {
    let d = unitaries[0].dim();
    let f = units_from_unitaries(n, unitaries, pol).unwrap();
    assert!(validate_units(&f, pol).pass);
    let id = ComplexMatrix::identity(d);
    let mut gens: Vec<ComplexMatrix> =
        standard_units(n).units().iter().map(|e| e.kron(&id)).collect();
    gens.extend(f.units().iter().cloned());
    generated_algebra(n * d, &gens, true, pol).unwrap().dim()
}

fn main() {
    let pol = TolerancePolicy::default();

    // Pauli X and Z generate all of M_2 (dimension 4), so two copies of M_3
    // generate all of M_3 ⊗ M_2 = M_6: dimension 9 · 4 = 36.
    let dim = generated_dimension(3, &[pauli_x(), pauli_z()], &pol);
    println!("n = 3, u_2 = X, u_3 = Z in M_2:");
    println!("  generated dimension {dim} (n²·dim M_2 = 9·4 = 36)");
    println!();

    // diag(1,-1) only generates the diagonal algebra of M_2 (dimension 2),
    // so the two copies generate a proper subalgebra of M_4: dimension
    // 4 · 2 = 8.
    let sign = ComplexMatrix::diagonal(&[Complex64::ONE, -Complex64::ONE]);
    let dim = generated_dimension(2, &[sign], &pol);
    println!("n = 2, u_2 = diag(1,-1) in M_2:");
    println!("  generated dimension {dim} (n²·dim(diagonal algebra) = 4·2 = 8)");
    println!();

    // A unitary with three distinct eigenvalues generates the full diagonal
    // algebra of M_3: dimension 4 · 3 = 12 inside M_2 ⊗ M_3.
    let phases = ComplexMatrix::diagonal(&[
        Complex64::ONE,
        Complex64::new(0.0, 1.0),
        -Complex64::ONE,
    ]);
    let dim = generated_dimension(2, &[phases], &pol);
    println!("n = 2, u_2 = diag(1, i, -1) in M_3:");
    println!("  generated dimension {dim} (n²·dim(diagonal algebra of M_3) = 4·3 = 12)");
}
