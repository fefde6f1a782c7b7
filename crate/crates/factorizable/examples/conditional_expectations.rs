//! Trace-preserving conditional expectations onto an embedded copy of M_n:
//! `E(x) = Σ_ij n·⟨x, f_ij⟩_τ f_ij` projects onto the span of the units,
//! preserves the trace, and is a bimodule map over the subalgebra.
//!
//! Run with `cargo run --example conditional_expectations`.

use factorizable::algebra::conditional_expectation;
use factorizable::matrix::{
    ginibre, hs_inner, orthogonal_project, seeded_rng, ComplexMatrix, TolerancePolicy, Trace,
};
use factorizable::units::random_unital_embedding;

fn main() {
    let pol = TolerancePolicy::default();
    let tau = Trace::Normalized;
    let mut rng = seeded_rng(12);

    // A random copy of M_2 inside M_6 and a random element to compress.
    let units = random_unital_embedding(2, 6, &mut rng).unwrap();
    let x = ginibre(6, &mut rng);
    let ex = conditional_expectation(&x, &units, &tau, &pol).unwrap();

    // E is idempotent and trace-preserving.
    let exx = conditional_expectation(&ex, &units, &tau, &pol).unwrap();
    println!("E(E(x)) = E(x) up to {:.3e}", exx.max_abs_diff(&ex));
    println!(
        "τ(E(x)) − τ(x) = {:.3e}",
        (tau.eval(&ex).unwrap() - tau.eval(&x).unwrap()).norm()
    );

    // E is self-adjoint for the τ-inner product.
    let y = ginibre(6, &mut rng);
    let ey = conditional_expectation(&y, &units, &tau, &pol).unwrap();
    let lhs = hs_inner(&ex, &y, &tau).unwrap();
    let rhs = hs_inner(&x, &ey, &tau).unwrap();
    println!("⟨E(x), y⟩ − ⟨x, E(y)⟩ = {:.3e}", (lhs - rhs).norm());

    // Elements already in the range are fixed.
    let in_range = units.embed(&ginibre(2, &mut rng)).unwrap();
    let fixed = conditional_expectation(&in_range, &units, &tau, &pol).unwrap();
    println!("E fixes the range: residual {:.3e}", fixed.max_abs_diff(&in_range));
    println!();

    // Compression to the diagonal: projecting onto the orthogonal family
    // {e_11, e_22} under tr_2 keeps exactly the diagonal entries.
    let x = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
    let family = vec![ComplexMatrix::matrix_unit(2, 0, 0), ComplexMatrix::matrix_unit(2, 1, 1)];
    let diag = orthogonal_project(&x, &family, &tau).unwrap();
    println!(
        "projection of [[1,2],[3,4]] onto the diagonal algebra: diag({}, {})",
        diag.at(0, 0).re,
        diag.at(1, 1).re
    );
}
