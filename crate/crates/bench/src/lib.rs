//! Criterion benchmarks for `oddzeta-core`; see `benches/series.rs`.
