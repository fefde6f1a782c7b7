//! Channels realized by a unitary over a tracial ancilla:
//! `T(x) = (id ⊗ τ_N)(u (x ⊗ 1) u*)`.
//!
//! Every such map is automatically a unital quantum channel, and familiar
//! channels arise from simple unitaries.
//!
//! Run with `cargo run --example ancilla_channels`.

use factorizable::algebra::FiniteTracialAlgebra;
use factorizable::channel::{channel_distance, channel_from_ancilla, verify_channel, Channel};
use factorizable::matrix::{haar_unitary, seeded_rng, swap_matrix, ComplexMatrix, TolerancePolicy};

fn main() {
    let pol = TolerancePolicy::default();
    let n = 2;

    // u = 1: nothing happens
    let ancilla = FiniteTracialAlgebra::full(3);
    let u = ComplexMatrix::identity(n * 3);
    let ch = channel_from_ancilla(&u, n, &ancilla, &pol).unwrap();
    println!(
        "u = 1 over M_3:            distance to identity channel      {:.3e}",
        channel_distance(&ch, &Channel::identity(n)).unwrap()
    );

    // u = swap over the ancilla M_n with its normalized trace: the system is
    // replaced by the maximally mixed state
    let ancilla = FiniteTracialAlgebra::full(n);
    let ch = channel_from_ancilla(&swap_matrix(n), n, &ancilla, &pol).unwrap();
    println!(
        "u = swap over M_2:         distance to depolarizing channel  {:.3e}",
        channel_distance(&ch, &Channel::depolarizing(n)).unwrap()
    );

    // u = v ⊗ 1: unitary conjugation by v
    let mut rng = seeded_rng(5);
    let v = haar_unitary(n, &mut rng);
    let ancilla = FiniteTracialAlgebra::new(vec![2, 1], vec![0.5, 0.5]).unwrap();
    let u = v.kron(&ComplexMatrix::identity(3));
    let ch = channel_from_ancilla(&u, n, &ancilla, &pol).unwrap();
    let conj = Channel::from_map(n, |x| &(&v * x) * &v.adjoint()).unwrap();
    println!(
        "u = v ⊗ 1, random v:       distance to conjugation by v      {:.3e}",
        channel_distance(&ch, &conj).unwrap()
    );
    println!();

    // A generic unitary over a block-weighted ancilla: always a channel.
    // The unitary must respect the block pattern of the ancilla, so draw it
    // block by block.
    let ancilla = FiniteTracialAlgebra::new(vec![2, 2], vec![0.25, 0.75]).unwrap();
    let total = ancilla.total_dim();
    let mut u = ComplexMatrix::zeros(n * total);
    for j in 0..ancilla.block_count() {
        let dj = ancilla.block_dims()[j];
        let off = ancilla.block_offset(j);
        let uj = haar_unitary(n * dj, &mut rng);
        for r in 0..n * dj {
            for c in 0..n * dj {
                u.set(
                    (r / dj) * total + off + r % dj,
                    (c / dj) * total + off + c % dj,
                    uj.at(r, c),
                );
            }
        }
    }
    let ch = channel_from_ancilla(&u, n, &ancilla, &pol).unwrap();
    let report = verify_channel(&ch, &pol).unwrap();
    println!("random u over N = M_2 ⊕ M_2 with weights (1/4, 3/4):");
    println!(
        "  cp={} unital={} trace-preserving={}  (min eigenvalue {:+.6})",
        report.cp, report.unital, report.trace_preserving, report.min_eigenvalue
    );
    println!("  Choi diagonal:");
    let choi = ch.choi();
    let diag: Vec<String> = (0..n * n).map(|k| format!("{:.4}", choi.at(k, k).re)).collect();
    println!("  [{}]", diag.join(", "));
}
