//! Linear stability: the rational stability function `R(z) = P(z) / Q(z)`,
//! A- and L-stability, and algebraic stability.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::tableau::ButcherTableau;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexValue, Matrix, Vector};
use crate::poly::{poly_from_det_samples, Polynomial};
use crate::tolerance::Tolerances;

/// `R(z) = P(z) / Q(z)` with `P(0) = Q(0) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalStabilityFunction {
    pub numerator: Polynomial,
    pub denominator: Polynomial,
}

impl RationalStabilityFunction {
    pub fn new(numerator: Polynomial, denominator: Polynomial) -> Self {
        let q0 = denominator.coeff(0);
        RationalStabilityFunction {
            numerator: numerator.scale(1.0 / q0),
            denominator: denominator.scale(1.0 / q0),
        }
    }

    pub fn eval(&self, z: ComplexValue) -> ComplexValue {
        self.numerator.eval_complex(z) / self.denominator.eval_complex(z)
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.numerator.eval(x) / self.denominator.eval(x)
    }
}

/// `P(z) = det(I − zA + z 1 bᵀ)` and `Q(z) = det(I − zA)`, recovered from
/// determinant samples at the integers `0..=s`.
pub fn stability_function(t: &ButcherTableau) -> RationalStabilityFunction {
    let s = t.s();
    let id = Matrix::identity(s, s);
    let ones = Vector::from_element(s, 1.0);
    let shifted = t.a() - &ones * t.b().transpose();
    let p = poly_from_det_samples(|z| linalg::determinant(&(&id - &shifted * z)), s);
    let q = poly_from_det_samples(|z| linalg::determinant(&(&id - t.a() * z)), s);
    RationalStabilityFunction::new(p, q)
}

/// Resolvent form `1 + z bᵀ (I − zA)⁻¹ 1`.
pub fn stability_resolvent(t: &ButcherTableau, z: ComplexValue) -> Result<ComplexValue> {
    let s = t.s();
    let a = t.a().map(|x| ComplexValue::new(x, 0.0));
    let m = DMatrix::<ComplexValue>::identity(s, s) - a * z;
    let ones = DVector::from_element(s, ComplexValue::new(1.0, 0.0));
    let k = m.lu().solve(&ones).ok_or(Error::SingularMatrix {
        pivot: 0.0,
        threshold: 0.0,
    })?;
    let bk: ComplexValue = t.b().iter().zip(k.iter()).map(|(b, k)| k * *b).sum();
    Ok(ComplexValue::new(1.0, 0.0) + z * bk)
}

/// Coefficients (in `y`) of `p(iy) p(−iy)` together with the absolute sums
/// of their contributions, which measure cancellation.
fn modulus_squared_on_axis(p: &Polynomial) -> (Vec<f64>, Vec<f64>) {
    let n = p.coefficients().len();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut value = vec![0.0; 2 * n - 1];
    let mut scale = vec![0.0; 2 * n - 1];
    let i = ComplexValue::new(0.0, 1.0);
    for (k, pk) in p.coefficients().iter().enumerate() {
        for (l, pl) in p.coefficients().iter().enumerate() {
            // i^k (−i)^l
            let phase = i.powu(k as u32) * (-i).powu(l as u32);
            value[k + l] += (phase * pk * pl).re;
            scale[k + l] += (pk * pl).abs();
        }
    }
    (value, scale)
}

/// The polynomial `F(x)` with `F(y²) = |Q(iy)|² − |P(iy)|²`, its
/// coefficient-wise cancellation scale, and `G(x) = |Q(i√x)|²`.
#[derive(Debug, Clone)]
pub struct ImaginaryAxisDefect {
    pub defect: Vec<f64>,
    pub scale: Vec<f64>,
    pub denominator: Vec<f64>,
}

impl ImaginaryAxisDefect {
    pub fn new(r: &RationalStabilityFunction, tol: &Tolerances) -> Self {
        let (qq, qs) = modulus_squared_on_axis(&r.denominator);
        let (pp, ps) = modulus_squared_on_axis(&r.numerator);
        let n = qq.len().max(pp.len());
        let get = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
        let half = n.div_ceil(2);
        let mut defect = Vec::with_capacity(half);
        let mut scale = Vec::with_capacity(half);
        let mut denominator = Vec::with_capacity(half);
        for j in 0..half {
            let k = 2 * j;
            let sc = get(&qs, k) + get(&ps, k);
            let mut e = get(&qq, k) - get(&pp, k);
            if e.abs() <= tol.a_stability * sc {
                e = 0.0;
            }
            defect.push(e);
            scale.push(sc);
            denominator.push(get(&qq, k));
        }
        ImaginaryAxisDefect {
            defect,
            scale,
            denominator,
        }
    }

    fn eval(coeffs: &[f64], x: f64) -> f64 {
        coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Whether `F(x) ≥ −tol · S(x)` on the test points derived from the
    /// positive real roots of `F`.
    pub fn is_nonnegative(&self, tol: &Tolerances) -> Result<bool> {
        let f = Polynomial::trimmed(self.defect.clone(), 0.0);
        if f.is_zero() {
            return Ok(true);
        }
        let mut roots: Vec<f64> = f
            .roots()?
            .into_iter()
            .filter(|z| z.im.abs() <= 1e-7 * z.re.abs().max(1.0) && z.re > 0.0)
            .map(|z| z.re)
            .collect();
        roots.sort_by(f64::total_cmp);
        let mut points = vec![0.0];
        let mut prev = 0.0;
        for &r in &roots {
            points.push(0.5 * (prev + r));
            prev = r;
        }
        points.push(2.0 * prev + 1.0);
        points.push(1e3 * (prev + 1.0));
        let ok = points.iter().all(|&x| {
            Self::eval(&self.defect, x) >= -tol.a_stability * Self::eval(&self.scale, x)
        });
        let lead = *f.coefficients().last().expect("nonzero polynomial");
        Ok(ok && lead >= 0.0)
    }
}

/// A-stability: all poles strictly in the right half-plane and
/// `|R(iy)| ≤ 1` on the imaginary axis.
pub fn check_a_stability(r: &RationalStabilityFunction) -> bool {
    check_a_stability_with(r, &Tolerances::DEFAULT)
}

pub fn check_a_stability_with(r: &RationalStabilityFunction, tol: &Tolerances) -> bool {
    let poles_ok = match r.denominator.roots() {
        Ok(roots) => roots.iter().all(|z| z.re > tol.a_stability),
        Err(_) => false,
    };
    poles_ok
        && ImaginaryAxisDefect::new(r, tol)
            .is_nonnegative(tol)
            .unwrap_or(false)
}

/// L-stability: A-stability and `R(∞) = 0`, i.e. `deg P < deg Q` once
/// coefficients below `1e-10` of the largest coefficient of `P` or `Q`
/// are discarded.
pub fn check_l_stability(r: &RationalStabilityFunction) -> bool {
    check_l_stability_with(r, &Tolerances::DEFAULT)
}

pub fn check_l_stability_with(r: &RationalStabilityFunction, tol: &Tolerances) -> bool {
    if !check_a_stability_with(r, tol) {
        return false;
    }
    let (p, q) = decay_degrees(r, tol);
    p < q || r.numerator.is_zero()
}

fn decay_degrees(r: &RationalStabilityFunction, tol: &Tolerances) -> (usize, usize) {
    let scale = r
        .numerator
        .coefficients()
        .iter()
        .chain(r.denominator.coefficients())
        .fold(0.0f64, |m, c| m.max(c.abs()));
    let degree = |p: &Polynomial| {
        p.coefficients()
            .iter()
            .rposition(|c| c.abs() > tol.l_stability_trim * scale)
            .unwrap_or(0)
    };
    (degree(&r.numerator), degree(&r.denominator))
}

/// `diag(b) A + Aᵀ diag(b) − b bᵀ`.
pub fn algebraic_stability_matrix(t: &ButcherTableau) -> Matrix {
    let ba = Matrix::from_diagonal(t.b()) * t.a();
    &ba + ba.transpose() - t.b() * t.b().transpose()
}

/// Eigenvalues of the algebraic stability matrix, ascending.
pub fn algebraic_stability_eigenvalues(t: &ButcherTableau) -> Result<Vec<f64>> {
    let m = algebraic_stability_matrix(t);
    linalg::symmetric_eigenvalues(&((&m + m.transpose()) * 0.5))
}

/// Non-negative weights and a positive semidefinite algebraic stability
/// matrix.
pub fn check_algebraic_stability(t: &ButcherTableau) -> bool {
    check_algebraic_stability_with(t, &Tolerances::DEFAULT)
}

pub fn check_algebraic_stability_with(t: &ButcherTableau, tol: &Tolerances) -> bool {
    let b_ok = t.b().iter().all(|&b| b >= -tol.weight_sign);
    b_ok && algebraic_stability_eigenvalues(t)
        .map(|e| e[0] >= -tol.algebraic_eigenvalue)
        .unwrap_or(false)
}
