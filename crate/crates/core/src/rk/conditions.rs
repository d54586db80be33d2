//! Simplifying conditions `C(η)`, `D(ζ)` and the quadrature order.

use serde::Serialize;

use super::tableau::ButcherTableau;
use crate::tolerance::Tolerances;

/// Outcome of a linear order-condition check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub holds: bool,
    pub max_defect: f64,
}

fn powi(x: f64, k: usize) -> f64 {
    x.powi(k as i32)
}

/// `C(η)`: `Σ_j a_ij c_j^{q−1} = c_i^q / q` for all `i` and `q ≤ η`.
pub fn check_condition_c(t: &ButcherTableau, eta: usize) -> ConditionCheck {
    check_condition_c_with(t, eta, &Tolerances::DEFAULT)
}

pub fn check_condition_c_with(t: &ButcherTableau, eta: usize, tol: &Tolerances) -> ConditionCheck {
    let (a, c) = (t.a(), t.c());
    let s = t.s();
    let mut max_defect = 0.0f64;
    for q in 1..=eta {
        for i in 0..s {
            let lhs: f64 = (0..s).map(|j| a[(i, j)] * powi(c[j], q - 1)).sum();
            let rhs = powi(c[i], q) / q as f64;
            max_defect = max_defect.max((lhs - rhs).abs());
        }
    }
    ConditionCheck {
        holds: max_defect < tol.condition_defect,
        max_defect,
    }
}

/// `D(ζ)`: `Σ_i b_i c_i^{q−1} a_ij = b_j (1 − c_j^q) / q` for all `j` and `q ≤ ζ`.
pub fn check_condition_d(t: &ButcherTableau, zeta: usize) -> ConditionCheck {
    check_condition_d_with(t, zeta, &Tolerances::DEFAULT)
}

pub fn check_condition_d_with(t: &ButcherTableau, zeta: usize, tol: &Tolerances) -> ConditionCheck {
    let (a, b, c) = (t.a(), t.b(), t.c());
    let s = t.s();
    let mut max_defect = 0.0f64;
    for q in 1..=zeta {
        for j in 0..s {
            let lhs: f64 = (0..s).map(|i| b[i] * powi(c[i], q - 1) * a[(i, j)]).sum();
            let rhs = b[j] * (1.0 - powi(c[j], q)) / q as f64;
            max_defect = max_defect.max((lhs - rhs).abs());
        }
    }
    ConditionCheck {
        holds: max_defect < tol.condition_defect,
        max_defect,
    }
}

/// Largest `p ≤ 2s` with `Σ_i b_i c_i^{k−1} = 1/k` for all `k ≤ p`.
///
/// Defects are divided by `max(1, ‖b‖∞)`.
pub fn quadrature_order(t: &ButcherTableau) -> usize {
    quadrature_order_with(t, &Tolerances::DEFAULT)
}

pub fn quadrature_order_with(t: &ButcherTableau, tol: &Tolerances) -> usize {
    let (b, c) = (t.b(), t.c());
    let scale = b.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let mut order = 0;
    for k in 1..=2 * t.s() {
        let sum: f64 = b.iter().zip(c.iter()).map(|(bi, ci)| bi * powi(*ci, k - 1)).sum();
        if (sum - 1.0 / k as f64).abs() / scale >= tol.condition_defect {
            break;
        }
        order = k;
    }
    order
}
