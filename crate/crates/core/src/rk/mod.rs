//! Butcher tableaux: construction from SBP-SAT operators and from classical
//! simplifying conditions, and the stability certificates built on them.

pub mod conditions;
pub mod reconstruct;
pub mod report;
pub mod ssp;
pub mod stability;
pub mod tableau;

pub use conditions::{check_condition_c, check_condition_d, quadrature_order, ConditionCheck};
pub use reconstruct::{reconstruct_sbp, reconstruct_sbp_with, ReconstructionResult, DEFAULT_PERTURBATIONS};
pub use report::{full_report, full_report_with, StabilityReport};
pub use ssp::ssp_coefficient;
pub use stability::{
    algebraic_stability_matrix, check_a_stability, check_algebraic_stability, check_l_stability,
    stability_function, RationalStabilityFunction,
};
pub use tableau::{classical_tableau, tableau_from_sbp_sat, tableau_from_sbp_sat_with, ButcherTableau, ClassicalKind};
