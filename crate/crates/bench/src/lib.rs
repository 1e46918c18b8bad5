//! Criterion benchmarks for the modwave kernels; see `benches/`.
