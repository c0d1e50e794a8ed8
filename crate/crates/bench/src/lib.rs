//! Criterion benchmarks for the collision kernels; see `benches/kernels.rs`.
