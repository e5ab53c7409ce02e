//! Deterministic CPU re-creation of a GPU-style execution model, with the
//! matrix kernels that motivated it and a benchmark harness around them.
//!
//! The crate has three layers:
//!
//! * [`engine`] — a grid/block/thread launch model: per-block shared
//!   memory, a block-wide barrier, deterministic scheduling, and launch
//!   validation against device capability profiles.
//! * [`kernels`] and [`reference`] — matrix multiplication written three
//!   ways against the engine (single-block, global-memory grid, and
//!   shared-memory tiled), elementwise add/subtract, plus sequential
//!   oracles including a Strassen variant.
//! * [`bench`] and [`fixture`] — a timing/instrumentation harness with a
//!   fixed CSV contract, and a binary matrix-fixture format.
//!
//! Everything is generic over the scalar kinds in [`scalar`] (f32, f64,
//! complex-of-f32), and every code path is deterministic: seeded inputs,
//! fixed reduction orders, and bit-identical results regardless of the
//! worker count driving the engine.

pub mod bench;
pub mod counter;
pub mod engine;
pub mod fixture;
pub mod kernels;
pub mod matrix;
pub mod reference;
pub mod rng;
pub mod scalar;

pub use counter::OpCounter;
pub use num_complex::Complex32;
pub use matrix::{ErrorMetric, Fill, Matrix, MatrixError};
pub use rng::SplitMix64;
pub use scalar::{Scalar, ScalarKind};

/// Single-precision real matrix.
pub type MatrixF32 = Matrix<f32>;
/// Double-precision real matrix.
pub type MatrixF64 = Matrix<f64>;
/// Single-precision complex matrix (8 bytes per element).
pub type MatrixC64 = Matrix<num_complex::Complex32>;
