//! Benchmarks for the spectral pipeline; see `benches/pipeline.rs`.
