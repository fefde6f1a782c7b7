//! From a trace on the free product of two copies of M_n to a quantum
//! channel: a trace is a pair of matrix-unit systems in a common tracial
//! algebra, and the channel's Choi coefficients are `n·τ(f_kℓ* g_ij)`.
//!
//! Run with `cargo run --example trace_to_channel`.

use factorizable::channel::{channel_distance, verify_channel, Channel};
use factorizable::matrix::{seeded_rng, ComplexMatrix, TolerancePolicy};
use factorizable::trace::{
    correlation_matrix, evaluate_word, identity_pair_trace, phi, random_trace,
    tensor_pair_trace, Side,
};

fn main() {
    let pol = TolerancePolicy::default();
    let n = 2;

    // Two closed forms. When both copies are the identity representation the
    // correlations are δ_ik δ_jℓ / n and the channel is the identity; when
    // the copies live on opposite tensor legs the correlations factorize and
    // the channel is completely depolarizing.
    let id_pair = identity_pair_trace(n, &pol).unwrap();
    let tensor_pair = tensor_pair_trace(n, &pol).unwrap();
    println!(
        "identity pair:  distance(phi, identity channel)      = {:.3e}",
        channel_distance(&phi(&id_pair).unwrap(), &Channel::identity(n)).unwrap()
    );
    println!(
        "tensor pair:    distance(phi, depolarizing channel)  = {:.3e}",
        channel_distance(&phi(&tensor_pair).unwrap(), &Channel::depolarizing(n)).unwrap()
    );
    println!();

    // A random trace: two independent Haar embeddings per block of
    // M_4 ⊕ M_6 with weights 0.3 and 0.7.
    let mut rng = seeded_rng(42);
    let tr = random_trace(n, &[4, 6], &[0.3, 0.7], &pol, &mut rng).unwrap();

    // Words in the two copies evaluate through the representing algebra.
    let e11 = ComplexMatrix::matrix_unit(n, 0, 0);
    let e01 = ComplexMatrix::matrix_unit(n, 0, 1);
    let single = evaluate_word(&tr, &[(Side::First, e11.clone())]).unwrap();
    let mixed = evaluate_word(
        &tr,
        &[(Side::First, e11.clone()), (Side::Second, e01.clone()), (Side::First, e01)],
    )
    .unwrap();
    println!("word values on the random trace:");
    println!("  τ(ι_1(e_11))                         = {:.6} (= 1/n)", single.re);
    println!("  τ(ι_1(e_11) ι_2(e_12) ι_1(e_12))     = {:.6}{:+.6}i", mixed.re, mixed.im);
    println!();

    // The correlation matrix determines the channel; its channel always
    // verifies as completely positive, unital and trace-preserving.
    let k = correlation_matrix(&tr).unwrap();
    println!("correlation values K(i,j;k,l) = τ(f_kl* g_ij), first row:");
    for j in 0..n {
        for l in 0..n {
            let v = k.value(0, j, 0, l);
            print!("  K(1,{};1,{}) = {:+.4}{:+.4}i", j + 1, l + 1, v.re, v.im);
        }
    }
    println!("\n");

    let ch = phi(&tr).unwrap();
    let report = verify_channel(&ch, &pol).unwrap();
    println!(
        "channel of the trace: cp={} unital={} trace-preserving={}",
        report.cp, report.unital, report.trace_preserving
    );
    println!("min eigenvalue of the Choi matrix: {:+.6}", report.min_eigenvalue);
}
