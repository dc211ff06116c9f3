//! Benchmarks for `combmetric`; see `benches/core.rs`.
