//! Convex structure of finite-dimensional traces: extremal decomposition,
//! convex combinations, faithful combinations, kernel ideals, and the fibers
//! of the trace-to-channel map.
//!
//! Run with `cargo run --example trace_simplex`.

use factorizable::algebra::trace_kernel_ideal;
use factorizable::matrix::{seeded_rng, TolerancePolicy};
use factorizable::trace::{
    convex_combine, decompose_trace, faithful_combination, phi, random_trace, same_phi_fiber,
};
use factorizable::channel::channel_distance;

fn main() {
    let pol = TolerancePolicy::default();
    let mut rng = seeded_rng(77);

    // A two-block trace decomposes into one extremal component per central
    // summand of the algebra its unit systems generate.
    let tr = random_trace(2, &[4, 6], &[0.3, 0.7], &pol, &mut rng).unwrap();
    let parts = decompose_trace(&tr, &pol, &mut rng).unwrap();
    println!("decomposition of a trace on M_4 ⊕ M_6 with weights (0.3, 0.7):");
    for (w, component) in &parts {
        println!(
            "  weight {:.4} on a single block of dimension {}",
            w,
            component.algebra().block_dims()[0]
        );
    }

    // Recombining the components with their weights stays in the same fiber:
    // the channel only sees the correlation values.
    let weights: Vec<f64> = parts.iter().map(|(w, _)| *w).collect();
    let comps: Vec<_> = parts.into_iter().map(|(_, t)| t).collect();
    let back = convex_combine(&comps, &weights, &pol).unwrap();
    println!(
        "recombination is in the same fiber: {} (channel distance {:.3e})",
        same_phi_fiber(&tr, &back, &pol).unwrap(),
        channel_distance(&phi(&tr).unwrap(), &phi(&back).unwrap()).unwrap()
    );
    println!();

    // The map to channels is affine but far from injective: padding the
    // algebra with a duplicate block at split weights changes the trace data
    // but not a single correlation value.
    let padded = convex_combine(&[tr.clone(), tr.clone()], &[0.5, 0.5], &pol).unwrap();
    println!(
        "padding with a duplicate block keeps the fiber: {}",
        same_phi_fiber(&tr, &padded, &pol).unwrap()
    );
    println!();

    // Kernel ideals: a zero-weight block is invisible to the trace. The
    // geometric-weight combination keeps every block that is positive in at
    // least one input, so its kernel ideal is the intersection of the
    // inputs' ideals.
    let t1 = random_trace(2, &[4, 4], &[1.0, 0.0], &pol, &mut rng).unwrap();
    let t2 = random_trace(2, &[6, 2], &[0.0, 1.0], &pol, &mut rng).unwrap();
    let i1 = trace_kernel_ideal(t1.algebra(), &pol).unwrap();
    let i2 = trace_kernel_ideal(t2.algebra(), &pol).unwrap();
    println!("two traces, each killing one block:");
    println!("  ideal dimensions {} and {}", i1.dim(), i2.dim());

    let combined = faithful_combination(&[t1, t2], &pol).unwrap();
    let ideal = trace_kernel_ideal(combined.algebra(), &pol).unwrap();
    println!(
        "  combination carries weights {:?}",
        combined
            .algebra()
            .weights()
            .iter()
            .map(|w| format!("{w:.4}"))
            .collect::<Vec<_>>()
    );
    println!(
        "  its ideal has dimension {} = {} + {}, zero blocks at {:?}",
        ideal.dim(),
        i1.dim(),
        i2.dim(),
        ideal.zero_blocks
    );

    // Combining faithful traces yields a faithful trace (weights 4/7, 2/7,
    // 1/7 for a three-element list).
    let faithful: Vec<_> = (0..3)
        .map(|_| random_trace(2, &[4], &[1.0], &pol, &mut rng).unwrap())
        .collect();
    let combo = faithful_combination(&faithful, &pol).unwrap();
    println!();
    println!(
        "faithful combination of three faithful traces: weights {:?}, ideal is zero: {}",
        combo.algebra().weights().iter().map(|w| format!("{w:.4}")).collect::<Vec<_>>(),
        trace_kernel_ideal(combo.algebra(), &pol).unwrap().is_zero()
    );
}
