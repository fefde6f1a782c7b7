//! The two faces of factorizability, numerically identified.
//!
//! A channel with ancilla `(N, τ_N)` and unitary `u` can be computed two
//! ways: directly as `x ↦ (id ⊗ τ_N)(u(x ⊗ 1)u*)`, or by packaging
//! `g_ij = u(e_ij ⊗ 1)u*` and `f_ij = e_ij ⊗ 1` as a trace on the free
//! product and reading the Choi matrix off the correlations
//! `n·τ(f_kℓ* g_ij)`. Both give the same channel, and the adjoint picture
//! `T = β* ∘ α` writes the same map as embed, rotate, project back.
//!
//! Run with `cargo run --example factorization_pipeline`.

use factorizable::algebra::FiniteTracialAlgebra;
use factorizable::channel::{
    channel_from_ancilla, embedding_adjoint, verify_channel, Channel,
};
use factorizable::matrix::{haar_unitary, seeded_rng, ComplexMatrix, TolerancePolicy};
use factorizable::trace::{ancilla_pair_trace, phi};
use factorizable::units::MatrixUnitSystem;

fn main() {
    let pol = TolerancePolicy::default();
    let (n, d) = (2usize, 3usize);
    let ancilla = FiniteTracialAlgebra::full(d);
    let mut rng = seeded_rng(2024);
    let u = haar_unitary(n * d, &mut rng);

    // pipeline 1: weighted partial trace over the ancilla
    let direct = channel_from_ancilla(&u, n, &ancilla, &pol).unwrap();

    // pipeline 2: through the trace on the free product
    let tr = ancilla_pair_trace(&u, n, &ancilla, &pol).unwrap();
    let via_trace = phi(&tr).unwrap();

    println!("random unitary over M_{n} ⊗ M_{d}:");
    println!(
        "  Choi matrices of the two pipelines differ by {:.3e}",
        direct.choi().max_abs_diff(via_trace.choi())
    );
    let report = verify_channel(&direct, &pol).unwrap();
    println!(
        "  channel verification: cp={} unital={} trace-preserving={}",
        report.cp, report.unital, report.trace_preserving
    );
    println!();

    // pipeline 3: T = β* ∘ Ad_u ∘ α with β(x) = x ⊗ 1. The adjoint β* is
    // the trace-preserving conditional expectation onto the image of β,
    // read back through β.
    let id_d = ComplexMatrix::identity(d);
    let beta_units: Vec<ComplexMatrix> = (0..n * n)
        .map(|k| ComplexMatrix::matrix_unit(n, k / n, k % n).kron(&id_d))
        .collect();
    let beta = MatrixUnitSystem::from_units(n, beta_units).unwrap();
    let tau_m = ancilla.composite_trace(n);

    let composed = Channel::from_map(n, |x| {
        let alpha_x = &(&u * &x.kron(&id_d)) * &u.adjoint();
        embedding_adjoint(&alpha_x, &beta, &tau_m, &pol).unwrap()
    })
    .unwrap();
    println!(
        "adjoint picture β* ∘ Ad_u ∘ α differs from the direct channel by {:.3e}",
        composed.choi().max_abs_diff(direct.choi())
    );

    // β* really is the adjoint: ⟨β(x), y⟩_{τ_M} = ⟨x, β*(y)⟩_{tr_n}, and it
    // inverts β on its image.
    let y = &(&u * &ComplexMatrix::matrix_unit(n, 0, 1).kron(&id_d)) * &u.adjoint();
    let back = embedding_adjoint(&beta.embed(&ComplexMatrix::matrix_unit(n, 0, 1)).unwrap(), &beta, &tau_m, &pol).unwrap();
    println!(
        "β*(β(e_12)) = e_12 up to {:.3e}; β*(y) of a rotated unit has norm {:.4}",
        back.max_abs_diff(&ComplexMatrix::matrix_unit(n, 0, 1)),
        embedding_adjoint(&y, &beta, &tau_m, &pol).unwrap().hs_norm()
    );
}
