//! Radius of absolute monotonicity, which equals the SSP coefficient.

use super::tableau::ButcherTableau;
use crate::linalg::{self, Matrix, Vector};
use crate::tolerance::Tolerances;

/// `K = [[A, 0], [bᵀ, 0]]`.
fn extended_matrix(t: &ButcherTableau) -> Matrix {
    let s = t.s();
    let mut k = Matrix::zeros(s + 1, s + 1);
    k.view_mut((0, 0), (s, s)).copy_from(t.a());
    for j in 0..s {
        k[(s, j)] = t.b()[j];
    }
    k
}

/// Whether `I + rK` is invertible with `rK (I + rK)⁻¹ ≥ 0` and
/// `(I + rK)⁻¹ 1 ≥ 0` entrywise.
pub fn is_absolutely_monotonic(t: &ButcherTableau, r: f64, tol: &Tolerances) -> bool {
    let k = extended_matrix(t);
    let n = k.nrows();
    let x = Matrix::identity(n, n) + &k * r;
    let Ok(inv) = linalg::inverse(&x) else {
        return false;
    };
    let p = &k * r * &inv;
    let q = &inv * Vector::from_element(n, 1.0);
    p.iter().chain(q.iter()).all(|&v| v >= -tol.ssp_sign)
}

/// SSP coefficient of a Runge-Kutta method.
///
/// Zero whenever `A` or `b` has a negative entry; otherwise found by
/// doubling an upper bracket and bisecting. Values beyond the configured
/// cap are reported as `f64::INFINITY`.
pub fn ssp_coefficient(t: &ButcherTableau) -> f64 {
    ssp_coefficient_with(t, &Tolerances::DEFAULT)
}

pub fn ssp_coefficient_with(t: &ButcherTableau, tol: &Tolerances) -> f64 {
    if t.a().iter().chain(t.b().iter()).any(|&v| v < -tol.ssp_sign) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while is_absolutely_monotonic(t, hi, tol) {
        lo = hi;
        hi *= 2.0;
        if hi > tol.ssp_cap {
            return f64::INFINITY;
        }
    }
    while hi - lo > tol.ssp_bisection {
        let mid = 0.5 * (lo + hi);
        if is_absolutely_monotonic(t, mid, tol) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{quadrature, Family};
    use crate::rk::tableau::{classical_tableau, tableau_from_sbp_sat, ClassicalKind};
    use crate::sbp::SbpOperator;

    #[test]
    fn explicit_euler_has_unit_coefficient() {
        assert_eq!(ssp_coefficient(&ButcherTableau::explicit_euler()), 1.0);
    }

    #[test]
    fn implicit_euler_is_unconditional() {
        assert_eq!(ssp_coefficient(&ButcherTableau::implicit_euler()), f64::INFINITY);
    }

    #[test]
    fn implicit_midpoint_has_coefficient_two() {
        // R(z) = (1 + z/2)/(1 − z/2) is absolutely monotonic on [−2, 0]
        let r = ssp_coefficient(&ButcherTableau::implicit_midpoint());
        assert!((r - 2.0).abs() <= 1e-6, "{r}");
    }

    #[test]
    fn ssp_example_value() {
        // reference radius 2.26505597 from an independent LP-free evaluation
        // of the same feasibility conditions (NumPy and NodePy agree)
        let t = tableau_from_sbp_sat(&SbpOperator::ssp_example()).unwrap();
        let r = ssp_coefficient(&t);
        assert!((r - 2.265056).abs() <= 2e-6, "{r}");
        let tol = Tolerances::DEFAULT;
        assert!(is_absolutely_monotonic(&t, 2.2650, &tol));
        assert!(!is_absolutely_monotonic(&t, 2.2651, &tol));
    }

    #[test]
    fn negative_entries_give_zero() {
        let op = SbpOperator::from_quadrature(&quadrature(Family::Gauss, 2).unwrap(), 1.0).unwrap();
        assert_eq!(ssp_coefficient(&tableau_from_sbp_sat(&op).unwrap()), 0.0);
        assert_eq!(ssp_coefficient(&classical_tableau(ClassicalKind::RadauIIA, 2).unwrap()), 0.0);
    }
}
