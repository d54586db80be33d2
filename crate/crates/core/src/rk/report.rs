//! Aggregated stability certificate for a tableau.

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use super::conditions::{check_condition_c_with, check_condition_d_with, quadrature_order_with};
use super::ssp::ssp_coefficient_with;
use super::stability::{
    algebraic_stability_eigenvalues, check_a_stability_with, check_l_stability_with, stability_function,
};
use super::tableau::ButcherTableau;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct OrderConditions {
    pub eta: usize,
    pub c_holds: bool,
    pub zeta: usize,
    pub d_holds: bool,
    pub quadrature_order: usize,
}

/// Serialized as `{"C(η)": bool, "D(ζ)": bool, "quadrature_order": n}`.
impl Serialize for OrderConditions {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(3))?;
        map.serialize_entry(&format!("C({})", self.eta), &self.c_holds)?;
        map.serialize_entry(&format!("D({})", self.zeta), &self.d_holds)?;
        map.serialize_entry("quadrature_order", &self.quadrature_order)?;
        map.end()
    }
}

/// Infinite SSP coefficients are written as the string `"inf"`.
pub fn serialize_ssp<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    if value.is_infinite() {
        serializer.serialize_str("inf")
    } else {
        serializer.serialize_f64(*value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub label: String,
    pub a_stable: bool,
    pub l_stable: bool,
    pub algebraically_stable: bool,
    pub alg_stability_eigenvalues: Vec<f64>,
    pub b_nonneg: bool,
    #[serde(serialize_with = "serialize_ssp")]
    pub ssp_coefficient: f64,
    pub order_conditions: OrderConditions,
    pub a_entries_nonneg: bool,
    /// B-stability follows from algebraic stability for these methods.
    pub b_stable_via_algebraic: bool,
}

/// Runs every certificate, checking `C(s)` and `D(s)`.
pub fn full_report(t: &ButcherTableau) -> StabilityReport {
    full_report_with(t, t.s(), t.s(), &Tolerances::DEFAULT)
}

pub fn full_report_with(t: &ButcherTableau, eta: usize, zeta: usize, tol: &Tolerances) -> StabilityReport {
    let r = stability_function(t);
    let a_stable = check_a_stability_with(&r, tol);
    let l_stable = a_stable && check_l_stability_with(&r, tol);
    let alg_stability_eigenvalues = algebraic_stability_eigenvalues(t).unwrap_or_default();
    let b_nonneg = t.b().iter().all(|&v| v >= -tol.weight_sign);
    let min_alg = alg_stability_eigenvalues.first().copied().unwrap_or(f64::NEG_INFINITY);
    let algebraically_stable = b_nonneg && min_alg >= -tol.algebraic_eigenvalue;
    StabilityReport {
        label: t.label().to_string(),
        a_stable,
        l_stable,
        algebraically_stable,
        alg_stability_eigenvalues,
        b_nonneg,
        ssp_coefficient: ssp_coefficient_with(t, tol),
        order_conditions: OrderConditions {
            eta,
            c_holds: check_condition_c_with(t, eta, tol).holds,
            zeta,
            d_holds: check_condition_d_with(t, zeta, tol).holds,
            quadrature_order: quadrature_order_with(t, tol),
        },
        a_entries_nonneg: t.a().iter().all(|&v| v >= -tol.ssp_sign),
        b_stable_via_algebraic: algebraically_stable,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{quadrature, Family};
    use crate::rk::tableau::tableau_from_sbp_sat;
    use crate::sbp::SbpOperator;

    #[test]
    fn radau_right_sbp_report() {
        let op = SbpOperator::from_quadrature(&quadrature(Family::RadauRight, 3).unwrap(), 1.0).unwrap();
        let rep = full_report(&tableau_from_sbp_sat(&op).unwrap());
        assert!(rep.a_stable && rep.l_stable && rep.algebraically_stable);
        assert_eq!(rep.ssp_coefficient, 0.0);
    }

    #[test]
    fn non_sbp_tableau_report() {
        let rep = full_report(&ButcherTableau::algebraically_stable_non_sbp());
        assert!(rep.a_stable && rep.l_stable && rep.algebraically_stable && rep.b_nonneg);
    }

    #[test]
    fn explicit_euler_report() {
        let rep = full_report(&ButcherTableau::explicit_euler());
        assert!(!rep.a_stable && !rep.l_stable && !rep.algebraically_stable);
        assert!(rep.b_nonneg);
        assert_eq!(rep.ssp_coefficient, 1.0);
    }

    #[test]
    fn serialization_shape() {
        let rep = full_report(&ButcherTableau::implicit_euler());
        let v = serde_json::to_value(&rep).unwrap();
        assert_eq!(v["ssp_coefficient"], "inf");
        assert_eq!(v["order_conditions"]["C(1)"], true);
        assert_eq!(v["order_conditions"]["D(1)"], false);
        assert_eq!(v["order_conditions"]["quadrature_order"], 1);
    }
}
