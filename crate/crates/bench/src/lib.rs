//! Criterion benchmarks for rabi-core; see benches/.
