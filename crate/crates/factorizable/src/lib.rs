//! Choi-matrix calculus for factorizable quantum channels and
//! finite-dimensional tracial states on the unital free product of two
//! matrix algebras.
//!
//! A unital quantum channel on `M_n` is *factorizable* when it can be
//! written as `x ↦ (id ⊗ τ_N)(u (x ⊗ 1) u*)` for a unitary `u` over a
//! tracial ancilla `(N, τ_N)` — equivalently as `β* ∘ α` for two unital
//! trace-preserving embeddings of `M_n` into a tracial algebra. At finite
//! dimension that data is the same thing as a pair of matrix-unit systems
//! inside a block-weighted algebra, i.e. a finite-dimensional trace on
//! `M_n * M_n`, and the channel is read off from the correlation values
//! `τ(f_kℓ* g_ij)`. This crate makes the whole correspondence computable:
//!
//! - [`matrix`] — dense complex matrices, tolerance policy, Hermitian
//!   eigendecomposition, Haar-random unitaries, span and kernel primitives.
//! - [`units`] — matrix-unit systems: standard, Haar-random unital
//!   embeddings, systems built from unitaries, intertwining unitaries.
//! - [`algebra`] — finite-dimensional *-subalgebras: generated algebras,
//!   commutants, Wedderburn block structure, conditional expectations,
//!   block-weighted tracial algebras and their kernel ideals.
//! - [`channel`] — Choi matrices: assembly, recovery, CP/unital/TP
//!   verification, ancilla realization, embedding adjoints.
//! - [`trace`] — finite-dimensional traces on `M_n * M_n`: word evaluation,
//!   correlation matrices, the trace-to-channel map, convex structure.
//! - [`json`] / [`cli`] — JSON wire formats and the command-line surface.
//!
//! # Quick start
//!
//! ```
//! use factorizable::matrix::{haar_unitary, seeded_rng, TolerancePolicy};
//! use factorizable::algebra::FiniteTracialAlgebra;
//! use factorizable::channel::{channel_from_ancilla, verify_channel};
//! use factorizable::trace::{ancilla_pair_trace, phi};
//!
//! let pol = TolerancePolicy::default();
//! let ancilla = FiniteTracialAlgebra::full(3);
//! let u = haar_unitary(2 * 3, &mut seeded_rng(7));
//!
//! // realize the channel directly ...
//! let direct = channel_from_ancilla(&u, 2, &ancilla, &pol).unwrap();
//! assert!(verify_channel(&direct, &pol).unwrap().is_quantum_channel());
//!
//! // ... or through the trace on the free product; both agree
//! let tr = ancilla_pair_trace(&u, 2, &ancilla, &pol).unwrap();
//! let via_trace = phi(&tr).unwrap();
//! assert!(direct.choi().max_abs_diff(via_trace.choi()) < 1e-9);
//! ```
//!
//! Runnable walkthroughs live in the `examples/` directory, one per major
//! capability; `cargo run --example choi_basics` is a good place to start.

pub mod algebra;
pub mod channel;
pub mod cli;
pub mod error;
pub mod json;
pub mod matrix;
pub mod trace;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;
