//! The finite-dimensional *-algebra engine: span saturation, commutants,
//! the bicommutant theorem at matrix scale, and Wedderburn block structure.
//!
//! Run with `cargo run --example generated_algebras`.

use factorizable::algebra::{block_structure, commutant, generated_algebra};
use factorizable::matrix::{ginibre, seeded_rng, ComplexMatrix, TolerancePolicy};
use num_complex::Complex64;

fn main() {
    let pol = TolerancePolicy::default();

    // e_11 and e_12 generate all of M_2: adjoints give e_21, products e_22.
    let e11 = ComplexMatrix::matrix_unit(2, 0, 0);
    let e12 = ComplexMatrix::matrix_unit(2, 0, 1);
    let full = generated_algebra(2, &[e11.clone(), e12.clone()], true, &pol).unwrap();
    println!("<e_11, e_12>        in M_2: dimension {} (all of M_2)", full.dim());

    // A generic diagonal matrix generates the diagonal algebra.
    let diag = ComplexMatrix::diagonal(&[Complex64::ONE, Complex64::new(2.0, 0.0)]);
    let diag_alg = generated_algebra(2, &[diag], true, &pol).unwrap();
    println!("<diag(1,2)>         in M_2: dimension {} (diagonal algebra)", diag_alg.dim());

    // Commutants: the commutant of M_2 is the scalars, the commutant of the
    // diagonal algebra is itself.
    let comm_full = commutant(&full, &pol).unwrap();
    let comm_diag = commutant(&diag_alg, &pol).unwrap();
    println!("commutant of M_2:            dimension {}", comm_full.dim());
    println!("commutant of the diagonal:   dimension {}", comm_diag.dim());
    println!();

    // Bicommutant: A'' recovers A for generated *-algebras.
    let mut rng = seeded_rng(31);
    for d in [3usize, 4, 5] {
        let gens = vec![ginibre(d, &mut rng)];
        let alg = generated_algebra(d, &gens, true, &pol).unwrap();
        let double = commutant(&commutant(&alg, &pol).unwrap(), &pol).unwrap();
        println!(
            "M_{d}, one random generator: dim A = {:>2}, dim A'' = {:>2}, same span: {}",
            alg.dim(),
            double.dim(),
            alg.same_span(&double, 1e-8).unwrap()
        );
    }
    println!();

    // Block structure of M_2 ⊗ 1_3 acting in M_6: one block of dimension 2
    // with multiplicity 3.
    let id3 = ComplexMatrix::identity(3);
    let amplified = generated_algebra(
        6,
        &[e11.kron(&id3), e12.kron(&id3)],
        true,
        &pol,
    )
    .unwrap();
    let bs = block_structure(&amplified, &pol, &mut rng).unwrap();
    println!("M_2 ⊗ 1_3 inside M_6: span dimension {}, blocks {:?}", amplified.dim(), bs.blocks);

    // A two-block algebra: M_2 ⊕ M_1 inside M_3.
    let mut g = ComplexMatrix::zeros(3);
    g.set(0, 1, Complex64::ONE);
    let two_blocks = generated_algebra(3, &[g], true, &pol).unwrap();
    let bs = block_structure(&two_blocks, &pol, &mut rng).unwrap();
    println!("<e_12> in M_3:        span dimension {}, blocks {:?}", two_blocks.dim(), bs.blocks);
    let ranks: Vec<usize> =
        bs.central_projections.iter().map(|p| p.trace().re.round() as usize).collect();
    println!("central projection ranks: {ranks:?}");
}
