//! Dense linear algebra for the small matrices that appear in SBP operators
//! and Butcher tableaux (at most a few dozen rows).
//!
//! Storage and factorizations come from `nalgebra`; this module pins the
//! singularity, symmetry and convergence thresholds on top of them.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;
pub type ComplexValue = Complex64;

/// Total QR sweep budget for the nonsymmetric eigensolver.
pub const EIGEN_ITERATION_CAP: usize = 10_000;

/// Sweep budget for the symmetric eigensolver.
pub const SYMMETRIC_ITERATION_CAP: usize = 10_000;

/// Maximum absolute row sum.
pub fn inf_norm(m: &Matrix) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Maximum absolute entry of a vector.
pub fn vec_inf_norm(v: &Vector) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Maximum absolute entry of a matrix.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// `n × n` matrix from nested rows.
pub fn from_rows(rows: &[&[f64]]) -> Matrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    Matrix::from_fn(n, m, |i, j| rows[i][j])
}

fn check_square(m: &Matrix, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{what} needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Smallest pivot of the partially pivoted LU factorization, with the
/// threshold it is compared against.
fn pivot_check(m: &Matrix, tol: &Tolerances) -> Result<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>> {
    check_square(m, "LU")?;
    let threshold = tol.lu_pivot * inf_norm(m);
    let lu = m.clone().lu();
    let u = lu.u();
    let pivot = u.diagonal().iter().fold(f64::INFINITY, |acc, x| acc.min(x.abs()));
    if m.nrows() > 0 && (pivot < threshold || pivot == 0.0) {
        return Err(Error::SingularMatrix { pivot, threshold });
    }
    Ok(lu)
}

/// Solves `m x = rhs` by LU with partial pivoting.
pub fn lu_solve(m: &Matrix, rhs: &Vector) -> Result<Vector> {
    if rhs.len() != m.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "rhs has length {}, matrix has {} rows",
            rhs.len(),
            m.nrows()
        )));
    }
    let lu = pivot_check(m, &Tolerances::DEFAULT)?;
    lu.solve(rhs).ok_or(Error::SingularMatrix {
        pivot: 0.0,
        threshold: 0.0,
    })
}

/// Inverse via LU, with the same singularity threshold as [`lu_solve`].
pub fn inverse(m: &Matrix) -> Result<Matrix> {
    let lu = pivot_check(m, &Tolerances::DEFAULT)?;
    lu.try_inverse().ok_or(Error::SingularMatrix {
        pivot: 0.0,
        threshold: 0.0,
    })
}

/// Determinant via LU with pivot sign tracking. Singular input yields a
/// value that is zero up to rounding.
pub fn determinant(m: &Matrix) -> f64 {
    assert_eq!(m.nrows(), m.ncols(), "determinant of a non-square matrix");
    if m.nrows() == 0 {
        return 1.0;
    }
    m.clone().lu().determinant()
}

/// All eigenvalues of a real square matrix, with multiplicity, sorted by
/// real part and then imaginary part.
pub fn eigenvalues(m: &Matrix) -> Result<Vec<ComplexValue>> {
    check_square(m, "eigenvalues")?;
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, EIGEN_ITERATION_CAP).ok_or(
        Error::NoConvergence {
            iterations: EIGEN_ITERATION_CAP,
        },
    )?;
    let mut eig: Vec<ComplexValue> = schur.complex_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(eig)
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn symmetric_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    symmetric_eigenvalues_with(m, &Tolerances::DEFAULT)
}

pub fn symmetric_eigenvalues_with(m: &Matrix, tol: &Tolerances) -> Result<Vec<f64>> {
    check_square(m, "symmetric_eigenvalues")?;
    let defect = max_abs(&(m - m.transpose()));
    if defect > tol.symmetry * max_abs(m).max(1.0) {
        return Err(Error::NotSymmetric { defect });
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, SYMMETRIC_ITERATION_CAP).ok_or(
        Error::NoConvergence {
            iterations: SYMMETRIC_ITERATION_CAP,
        },
    )?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Unit eigenvector for a real eigenvalue, by inverse iteration.
///
/// The sign is fixed so that the entry of largest magnitude is positive.
pub fn eigenvector(m: &Matrix, eigenvalue: f64) -> Result<Vector> {
    check_square(m, "eigenvector")?;
    let n = m.nrows();
    let scale = inf_norm(m).max(1.0);
    let shift = eigenvalue + 1e-10 * scale;
    let shifted = m - Matrix::identity(n, n) * shift;
    let lu = shifted.lu();
    let mut x = Vector::from_fn(n, |i, _| 1.0 + 0.1 * i as f64);
    for _ in 0..8 {
        let y = lu.solve(&x).ok_or(Error::SingularMatrix {
            pivot: 0.0,
            threshold: 0.0,
        })?;
        let norm = y.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NoConvergence { iterations: 8 });
        }
        x = y / norm;
    }
    let (imax, _) = x
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
    if x[imax] < 0.0 {
        x = -x;
    }
    Ok(x)
}


#[cfg(test)]
mod properties {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
        Matrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0))
    }

    fn condition_number(m: &Matrix) -> f64 {
        let sv = m.clone().singular_values();
        sv.max() / sv.min()
    }

    #[test]
    fn lu_residual_on_well_conditioned_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut trials = 0;
        while trials < 1000 {
            let n = rng.gen_range(1..=12);
            let m = random_matrix(&mut rng, n);
            if condition_number(&m) >= 1e6 {
                continue;
            }
            let rhs = Vector::from_fn(n, |_, _| rng.gen_range(-10.0..10.0));
            let x = lu_solve(&m, &rhs).unwrap();
            let residual = vec_inf_norm(&(&m * &x - &rhs));
            assert!(residual <= 1e-10 * (1.0 + vec_inf_norm(&rhs)));
            trials += 1;
        }
    }

    #[test]
    fn eigenvalues_match_trace_and_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(1..=10);
            let m = random_matrix(&mut rng, n);
            let eig = eigenvalues(&m).unwrap();
            assert_eq!(eig.len(), n);
            let sum: ComplexValue = eig.iter().sum();
            let prod: ComplexValue = eig.iter().product();
            let scale = inf_norm(&m).max(1.0);
            assert!((sum.re - m.trace()).abs() <= 1e-8 * scale);
            assert!(sum.im.abs() <= 1e-8 * scale);
            let det = determinant(&m);
            assert!((prod.re - det).abs() <= 1e-8 * det.abs().max(1e-3 * scale.powi(n as i32)));
        }
    }

    #[test]
    fn gram_matrices_are_positive_semidefinite() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(1..=10);
            let b = random_matrix(&mut rng, n);
            let gram = b.transpose() * &b;
            let e = symmetric_eigenvalues(&gram).unwrap();
            assert!(e.iter().all(|&x| x >= -1e-10));
        }
    }
}
