//! Criterion benchmarks for reasm-core; see `benches/ks.rs`.
