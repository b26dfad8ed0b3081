//! Criterion benchmarks for `trapz-core`; see `benches/`.
