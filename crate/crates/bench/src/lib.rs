//! Criterion benchmarks for the steady-state solvers and the time-domain
//! integrator live in `benches/`.
