//! Experiments with implicit Runge-Kutta methods on small test problems.

pub mod experiments;
pub mod problems;
pub mod solver;

pub use experiments::{contractivity_experiment, convergence_study, ContractionRatio, ConvergenceStudy};
pub use problems::{catalogued_problems, problem_by_name, OdeProblem};
pub use solver::{integrate, irk_step, IntegrationResult};
