//! Real polynomials in ascending coefficient order.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{self, ComplexValue, Matrix};

/// Relative threshold below which trailing coefficients are dropped.
pub const TRIM_TOLERANCE: f64 = 1e-12;

/// A real polynomial `c0 + c1 x + c2 x² + …`.
///
/// Trailing coefficients that are small relative to the largest one are
/// trimmed on construction; the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<f64>", from = "Vec<f64>")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self::trimmed(coeffs, TRIM_TOLERANCE)
    }

    /// Builds a polynomial, dropping trailing coefficients below
    /// `rel_tol · max |c_k|`.
    pub fn trimmed(mut coeffs: Vec<f64>, rel_tol: f64) -> Self {
        let scale = coeffs.iter().fold(0.0, |acc: f64, c| acc.max(c.abs()));
        while let Some(&last) = coeffs.last() {
            if last.abs() <= rel_tol * scale || last == 0.0 {
                coeffs.pop();
            } else {
                break;
            }
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Degree after re-trimming at a coarser relative tolerance.
    pub fn degree_trimmed(&self, rel_tol: f64) -> usize {
        Self::trimmed(self.coeffs.clone(), rel_tol).degree()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: ComplexValue) -> ComplexValue {
        self.coeffs
            .iter()
            .rev()
            .fold(ComplexValue::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// All complex roots, as eigenvalues of the companion matrix.
    pub fn roots(&self) -> Result<Vec<ComplexValue>> {
        let n = self.degree();
        if self.is_zero() || n == 0 {
            return Ok(Vec::new());
        }
        // exact roots at the origin are split off; the companion matrix of
        // z^k is nilpotent and stalls the QR iteration
        let zeros = self.coeffs.iter().take_while(|&&c| c == 0.0).count();
        let m = n - zeros;
        let mut roots = vec![ComplexValue::new(0.0, 0.0); zeros];
        if m > 0 {
            let lead = self.coeffs[n];
            let mut companion = Matrix::zeros(m, m);
            for i in 1..m {
                companion[(i, i - 1)] = 1.0;
            }
            for i in 0..m {
                companion[(i, m - 1)] = -self.coeffs[zeros + i] / lead;
            }
            roots.extend(linalg::eigenvalues(&companion)?);
        }
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Ok(roots)
    }
}

impl From<Vec<f64>> for Polynomial {
    fn from(coeffs: Vec<f64>) -> Self {
        Polynomial::new(coeffs)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, " {} ", if *c < 0.0 { '-' } else { '+' })?;
            } else if *c < 0.0 {
                write!(f, "-")?;
            }
            match k {
                0 => write!(f, "{:.6}", c.abs())?,
                1 => write!(f, "{:.6} z", c.abs())?,
                _ => write!(f, "{:.6} z^{k}", c.abs())?,
            }
        }
        Ok(())
    }
}

/// Recovers a polynomial of degree at most `degree_bound` from its values at
/// the integers `0, 1, …, degree_bound`.
///
/// Newton divided differences on the integer grid, expanded to monomial form.
pub fn poly_from_det_samples<F>(evaluator: F, degree_bound: usize) -> Polynomial
where
    F: Fn(f64) -> f64,
{
    let n = degree_bound;
    let xs: Vec<f64> = (0..=n).map(|k| k as f64).collect();
    let mut dd: Vec<f64> = xs.iter().map(|&x| evaluator(x)).collect();
    for level in 1..=n {
        for i in (level..=n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    // Horner expansion of c0 + (x - x0)(c1 + (x - x1)(c2 + …))
    let mut coeffs = vec![dd[n]];
    for k in (0..n).rev() {
        let mut next = vec![0.0; coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= xs[k] * c;
        }
        next[0] += dd[k];
        coeffs = next;
    }
    Polynomial::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn trims_trailing_zeros() {
        let p = Polynomial::new(vec![1.0, 2.0, 1e-14, 0.0]);
        assert_eq!(p.coefficients(), &[1.0, 2.0]);
        assert!(Polynomial::new(vec![0.0, 0.0]).is_zero());
    }

    #[test]
    fn implicit_euler_denominator() {
        let p = poly_from_det_samples(|z| 1.0 - z, 1);
        assert_abs_diff_eq!(p.coeff(0), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.coeff(1), -1.0, epsilon = 1e-14);
    }

    #[test]
    fn lobatto_iiic_two_stage_denominator() {
        // det [[1 - z/2, z/2], [-z/2, 1 - z/2]] = 1 - z + z^2/2
        let q = poly_from_det_samples(
            |z| (1.0 - z / 2.0) * (1.0 - z / 2.0) + z * z / 4.0,
            2,
        );
        assert_abs_diff_eq!(q.coeff(0), 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(q.coeff(1), -1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(q.coeff(2), 0.5, epsilon = 1e-13);
    }

    #[test]
    fn degree_bound_above_true_degree() {
        let p = poly_from_det_samples(|z| 3.0 + z, 4);
        assert_eq!(p.degree(), 1);
    }

    #[test]
    fn companion_roots() {
        // (z - 1)(z - 2)(z^2 + 1)
        let p = &Polynomial::new(vec![2.0, -3.0, 1.0]) * &Polynomial::new(vec![1.0, 0.0, 1.0]);
        let mut roots = p.roots().unwrap();
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let expected = [
            ComplexValue::new(0.0, -1.0),
            ComplexValue::new(0.0, 1.0),
            ComplexValue::new(1.0, 0.0),
            ComplexValue::new(2.0, 0.0),
        ];
        for (r, e) in roots.iter().zip(expected.iter()) {
            assert!((r - e).norm() < 1e-12, "{r} vs {e}");
        }
    }

    proptest! {
        #[test]
        fn sampling_reproduces_known_polynomial(coeffs in proptest::collection::vec(-5.0f64..5.0, 1..7)) {
            prop_assume!(coeffs.last().unwrap().abs() > 1e-3);
            let p = Polynomial::new(coeffs.clone());
            let q = poly_from_det_samples(|z| p.eval(z), coeffs.len() - 1);
            let scale = coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
            for (k, c) in coeffs.iter().enumerate() {
                prop_assert!((q.coeff(k) - c).abs() <= 1e-9 * scale);
            }
        }
    }
}
