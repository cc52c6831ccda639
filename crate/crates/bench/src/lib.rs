//! Criterion benchmarks for the solvers live in `benches/solvers.rs`; run
//! them with `cargo bench -p cbpp-bench`.
