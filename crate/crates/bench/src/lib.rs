//! Criterion benchmark harness for the latshift crate; see `benches/`.
