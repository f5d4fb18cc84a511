//! Benchmark-only crate; see `benches/qpe_benches.rs`.
