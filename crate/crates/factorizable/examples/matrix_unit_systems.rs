//! Matrix-unit systems are unital embeddings of M_n: building them, checking
//! the defining relations, and conjugating one system onto another.
//!
//! Run with `cargo run --example matrix_unit_systems`.

use factorizable::matrix::{pauli_x, pauli_z, seeded_rng, TolerancePolicy};
use factorizable::units::{
    intertwiner_checked, random_unital_embedding, standard_units, units_from_unitaries,
    validate_units,
};

fn main() {
    let pol = TolerancePolicy::default();

    // The standard units of M_3 satisfy the relations exactly.
    let std3 = standard_units(3);
    let report = validate_units(&std3, &pol);
    println!(
        "standard units of M_3:       pass={} max residual {:.1e}",
        report.pass, report.max_residual
    );

    // A Haar-random unital embedding M_2 -> M_6; the corner projection f_11
    // has rank d/n = 3.
    let mut rng = seeded_rng(8);
    let sys = random_unital_embedding(2, 6, &mut rng).unwrap();
    let report = validate_units(&sys, &pol);
    println!(
        "random embedding M_2 -> M_6: pass={} max residual {:.1e}, rank(f_11) = {}",
        report.pass,
        report.max_residual,
        sys.unit(0, 0).rank(pol.eps_rank)
    );

    // No unital embedding exists when n does not divide d.
    match random_unital_embedding(2, 5, &mut rng) {
        Err(e) => println!("M_2 -> M_5 is rejected:      {e}"),
        Ok(_) => unreachable!(),
    }
    println!();

    // An order-3 system inside M_3 ⊗ M_2 built from two unitaries of M_2:
    // f_11 = e_11 ⊗ 1, f_1j = e_1j ⊗ u_j, f_ij = f_1i* f_1j.
    let sys = units_from_unitaries(3, &[pauli_x(), pauli_z()], &pol).unwrap();
    let report = validate_units(&sys, &pol);
    println!(
        "units from Pauli X, Z:       pass={} max residual {:.1e} (ambient M_6)",
        report.pass, report.max_residual
    );
    println!();

    // Any two unital embeddings of the same order are unitarily equivalent;
    // the intertwiner maps one system onto the other.
    let f = random_unital_embedding(2, 8, &mut rng).unwrap();
    let fp = random_unital_embedding(2, 8, &mut rng).unwrap();
    let (u, residual) = intertwiner_checked(&f, &fp).unwrap();
    println!("intertwiner between two random embeddings M_2 -> M_8:");
    println!("  worst residual over uu* = 1 and u f'_ij u* = f_ij: {residual:.3e}");
    println!("  u is {}x{}, unitary: {}", u.dim(), u.dim(), u.is_unitary(1e-9));
}
