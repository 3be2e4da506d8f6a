// Benchmarks live under benches/; this crate exists to host them.
