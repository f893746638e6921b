//! Benchmark-only package. The benches live in `benches/kernels.rs`.
