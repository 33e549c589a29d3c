//! Criterion benchmarks for the sextic numerics; see `benches/`.
