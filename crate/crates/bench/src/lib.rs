//! Criterion benchmarks for `etaprove`; see `benches/`.
