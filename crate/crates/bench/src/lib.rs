// Benchmark-only crate; see benches/integrator.rs.
