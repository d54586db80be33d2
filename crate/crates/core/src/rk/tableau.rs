use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::quadrature::{quadrature, Family};
use crate::sbp::{verify_sbp_with, SbpOperator};
use crate::tolerance::Tolerances;

/// Butcher coefficients `(A, b, c)` of an `s`-stage Runge-Kutta method
/// normalized to the unit step.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    label: String,
    a: Matrix,
    b: Vector,
    c: Vector,
}

impl ButcherTableau {
    pub fn new(label: impl Into<String>, a: Matrix, b: Vector, c: Vector) -> Result<Self> {
        let s = b.len();
        if s == 0 || a.shape() != (s, s) || c.len() != s {
            return Err(Error::DimensionMismatch(format!(
                "tableau with A {:?}, b {}, c {}",
                a.shape(),
                b.len(),
                c.len()
            )));
        }
        if !a.iter().chain(b.iter()).chain(c.iter()).all(|x| x.is_finite()) {
            return Err(Error::InvalidInput("tableau entries must be finite".into()));
        }
        Ok(ButcherTableau {
            label: label.into(),
            a,
            b,
            c,
        })
    }

    pub fn s(&self) -> usize {
        self.b.len()
    }
    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn a(&self) -> &Matrix {
        &self.a
    }
    pub fn b(&self) -> &Vector {
        &self.b
    }
    pub fn c(&self) -> &Vector {
        &self.c
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// True when the abscissae are pairwise distinct.
    pub fn is_nonconfluent(&self) -> bool {
        let s = self.s();
        (0..s).all(|i| (0..i).all(|j| self.c[i] != self.c[j]))
    }

    fn scalar(label: &str, a: f64, b: f64, c: f64) -> Self {
        Self::new(
            label,
            Matrix::from_element(1, 1, a),
            Vector::from_element(1, b),
            Vector::from_element(1, c),
        )
        .expect("scalar tableau")
    }

    pub fn implicit_euler() -> Self {
        Self::scalar("implicit-euler", 1.0, 1.0, 1.0)
    }

    pub fn explicit_euler() -> Self {
        Self::scalar("explicit-euler", 0.0, 1.0, 0.0)
    }

    pub fn implicit_midpoint() -> Self {
        Self::scalar("implicit-midpoint", 0.5, 1.0, 0.5)
    }

    pub fn explicit_midpoint() -> Self {
        Self::new(
            "explicit-midpoint",
            linalg::from_rows(&[&[0.0, 0.0], &[0.5, 0.0]]),
            Vector::from_column_slice(&[0.0, 1.0]),
            Vector::from_column_slice(&[0.0, 0.5]),
        )
        .expect("fixed tableau")
    }

    /// Four-stage method on the nodes `{0, 1/3, 2/3, 1}` that is A-, L-, B-
    /// and algebraically stable with positive weights and invertible `A`,
    /// yet admits no SBP-SAT representation with a positive definite norm.
    pub fn algebraically_stable_non_sbp() -> Self {
        let r6 = 6f64.sqrt();
        let a = linalg::from_rows(&[
            &[27.0, -33.0 - 6.0 * r6, -3.0, 9.0 + 6.0 * r6],
            &[-7.0 + 2.0 * r6, 33.0, -9.0 - 2.0 * r6, -1.0],
            &[7.0, 3.0 + 2.0 * r6, 33.0, -11.0 - 2.0 * r6],
            &[21.0 - 6.0 * r6, 21.0, -21.0 + 6.0 * r6, 27.0],
        ]) / 48.0;
        let b = Vector::from_column_slice(&[1.0, 3.0, 3.0, 1.0]) / 8.0;
        let c = Vector::from_column_slice(&[0.0, 1.0, 2.0, 3.0]) / 3.0;
        Self::new("non-sbp-alg-stable", a, b, c).expect("fixed tableau")
    }
}

impl fmt::Display for ButcherTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} (s = {})", self.label, self.s())?;
        for i in 0..self.s() {
            write!(f, "{:>12.6} |", self.c[i])?;
            for j in 0..self.s() {
                write!(f, " {:>12.6}", self.a[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "{:>12} |", "")?;
        for j in 0..self.s() {
            write!(f, " {:>12.6}", self.b[j])?;
        }
        Ok(())
    }
}

/// Both algebraic forms of the SAT inverse:
/// `(D + M⁻¹ t_L t_Lᵀ)⁻¹` and `(M D + t_L t_Lᵀ)⁻¹ M`, each divided by `T`.
pub fn sat_inverse_forms(op: &SbpOperator) -> Result<(Matrix, Matrix)> {
    let singular = |op: &SbpOperator| -> Error {
        let min_abs_eigenvalue = op
            .sat_matrix(1.0)
            .and_then(|m| linalg::eigenvalues(&m))
            .map(|e| e.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min))
            .unwrap_or(0.0);
        Error::SingularSatMatrix { min_abs_eigenvalue }
    };
    let t = op.interval();
    let sat = op.sat_matrix(1.0)?;
    let first = linalg::inverse(&sat).map_err(|_| singular(op))? / t;
    let tl = op.t_left();
    let weighted = op.m() * op.d() + tl * tl.transpose();
    let second = (linalg::inverse(&weighted).map_err(|_| singular(op))? * op.m()) / t;
    Ok((first, second))
}

/// Runge-Kutta form of the SBP-SAT discretization with `σ = 1`:
/// `A = (D + M⁻¹ t_L t_Lᵀ)⁻¹ / T`, `b = M 1 / T`, `c = τ / T`.
pub fn tableau_from_sbp_sat(op: &SbpOperator) -> Result<ButcherTableau> {
    tableau_from_sbp_sat_with(op, &Tolerances::DEFAULT)
}

pub fn tableau_from_sbp_sat_with(op: &SbpOperator, tol: &Tolerances) -> Result<ButcherTableau> {
    let residual = verify_sbp_with(op, tol).sbp_residual;
    if residual > tol.sbp_precondition {
        return Err(Error::SbpViolation { residual });
    }
    let t = op.interval();
    let (a, _) = sat_inverse_forms(op)?;
    let b = op.m() * Vector::from_element(op.s(), 1.0) / t;
    let c = op.nodes() / t;
    ButcherTableau::new(format!("sbp-sat s={}", op.s()), a, b, c)
}

/// Classical collocation-type families defined by simplifying conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassicalKind {
    /// Left Radau nodes, `A` fixed by `D(s)`.
    RadauIA,
    /// Right Radau nodes, `A` fixed by `C(s)`.
    RadauIIA,
    /// Lobatto nodes, `A` fixed by `C(s−1)` and `a_{i1} = b_1`.
    LobattoIIIC,
    /// Gauss nodes, `A` fixed by `C(s)`.
    Gauss,
}

impl ClassicalKind {
    pub const ALL: [ClassicalKind; 4] = [
        ClassicalKind::RadauIA,
        ClassicalKind::RadauIIA,
        ClassicalKind::LobattoIIIC,
        ClassicalKind::Gauss,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassicalKind::RadauIA => "radau-ia",
            ClassicalKind::RadauIIA => "radau-iia",
            ClassicalKind::LobattoIIIC => "lobatto-iiic",
            ClassicalKind::Gauss => "gauss",
        }
    }

    /// Quadrature family providing `b` and `c`.
    pub fn family(self) -> Family {
        match self {
            ClassicalKind::RadauIA => Family::RadauLeft,
            ClassicalKind::RadauIIA => Family::RadauRight,
            ClassicalKind::LobattoIIIC => Family::Lobatto,
            ClassicalKind::Gauss => Family::Gauss,
        }
    }

    /// Classical kind matching an SBP operator family, where one exists.
    pub fn for_family(family: Family) -> ClassicalKind {
        match family {
            Family::RadauLeft => ClassicalKind::RadauIA,
            Family::RadauRight => ClassicalKind::RadauIIA,
            Family::Lobatto => ClassicalKind::LobattoIIIC,
            Family::Gauss => ClassicalKind::Gauss,
        }
    }

    /// Classical convergence order.
    pub fn order(self, s: usize) -> usize {
        match self {
            ClassicalKind::Gauss => 2 * s,
            ClassicalKind::RadauIA | ClassicalKind::RadauIIA => 2 * s - 1,
            ClassicalKind::LobattoIIIC => 2 * s - 2,
        }
    }
}

impl fmt::Display for ClassicalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassicalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassicalKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown classical tableau '{s}'")))
    }
}

/// Classical tableau: `b`, `c` from the quadrature rule and `A` from the
/// defining linear conditions.
pub fn classical_tableau(kind: ClassicalKind, s: usize) -> Result<ButcherTableau> {
    let rule = quadrature(kind.family(), s).map_err(|_| Error::InvalidStageCount {
        family: kind.name().to_string(),
        stages: s,
    })?;
    let (b, c) = (rule.weights, rule.nodes);
    let pow = |x: f64, k: usize| x.powi(k as i32);
    let mut a = Matrix::zeros(s, s);
    match kind {
        ClassicalKind::RadauIIA | ClassicalKind::Gauss => {
            // C(s): Σ_j a_ij c_j^{q-1} = c_i^q / q, row by row
            let v = Matrix::from_fn(s, s, |q, j| pow(c[j], q));
            for i in 0..s {
                let rhs = Vector::from_fn(s, |q, _| pow(c[i], q + 1) / (q as f64 + 1.0));
                let row = linalg::lu_solve(&v, &rhs)?;
                a.set_row(i, &row.transpose());
            }
        }
        ClassicalKind::RadauIA => {
            // D(s): Σ_i b_i c_i^{q-1} a_ij = b_j (1 - c_j^q) / q, column by column
            let w = Matrix::from_fn(s, s, |q, i| b[i] * pow(c[i], q));
            for j in 0..s {
                let rhs = Vector::from_fn(s, |q, _| {
                    b[j] * (1.0 - pow(c[j], q + 1)) / (q as f64 + 1.0)
                });
                let col = linalg::lu_solve(&w, &rhs)?;
                a.set_column(j, &col);
            }
        }
        ClassicalKind::LobattoIIIC => {
            // a_i1 = b_1 and C(s-1) on the remaining s-1 columns (c_1 = 0)
            let v = Matrix::from_fn(s - 1, s - 1, |q, j| pow(c[j + 1], q));
            for i in 0..s {
                let rhs = Vector::from_fn(s - 1, |q, _| {
                    let first = if q == 0 { b[0] } else { 0.0 };
                    pow(c[i], q + 1) / (q as f64 + 1.0) - first
                });
                let rest = linalg::lu_solve(&v, &rhs)?;
                a[(i, 0)] = b[0];
                for j in 1..s {
                    a[(i, j)] = rest[j - 1];
                }
            }
        }
    }
    ButcherTableau::new(format!("{} s={s}", kind.name()), a, b, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::quadrature;
    use approx::assert_abs_diff_eq;

    fn assert_matrix(got: &Matrix, want: &[&[f64]], eps: f64) {
        let want = linalg::from_rows(want);
        assert!(linalg::max_abs(&(got - &want)) < eps, "{got} vs {want}");
    }

    #[test]
    fn trapezoid_operator_gives_lobatto_iiic() {
        let op = SbpOperator::from_quadrature(&quadrature(Family::Lobatto, 2).unwrap(), 1.0).unwrap();
        let t = tableau_from_sbp_sat(&op).unwrap();
        assert_matrix(t.a(), &[&[0.5, -0.5], &[0.5, 0.5]], 1e-15);
        assert_eq!(t.b().as_slice(), &[0.5, 0.5]);
        assert_eq!(t.c().as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn singular_sat_matrix() {
        let op = SbpOperator::zero_eigenvalue_example();
        match tableau_from_sbp_sat(&op) {
            Err(Error::SingularSatMatrix { min_abs_eigenvalue }) => assert!(min_abs_eigenvalue < 1e-10),
            other => panic!("expected SingularSatMatrix, got {other:?}"),
        }
    }

    #[test]
    fn ssp_example_tableau() {
        let t = tableau_from_sbp_sat(&SbpOperator::ssp_example()).unwrap();
        let want = [
            [2725.0, 2180.0, 95.0],
            [4390.0, 5512.0, 98.0],
            [3495.0, 6796.0, 4709.0],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(t.a()[(i, j)], want[i][j] / 20000.0, epsilon = 1e-11);
            }
        }
        assert_eq!(t.b().as_slice(), &[0.25, 0.5, 0.25]);
        assert_eq!(t.c().as_slice(), &[0.25, 0.5, 0.75]);
    }

    #[test]
    fn both_inverse_forms_agree() {
        for family in Family::ALL {
            for s in family.min_stages()..=6 {
                for interval in [1.0, 0.3, 4.0] {
                    let op = SbpOperator::from_quadrature(&quadrature(family, s).unwrap(), interval).unwrap();
                    let (a1, a2) = sat_inverse_forms(&op).unwrap();
                    assert!(linalg::max_abs(&(&a1 - &a2)) < 1e-9);
                    let t = tableau_from_sbp_sat(&op).unwrap();
                    let inv = linalg::inverse(t.a()).unwrap();
                    assert!(linalg::max_abs(&(t.a() * inv - Matrix::identity(s, s))) < 1e-9);
                    assert!((t.b().sum() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn interval_length_is_normalized_out() {
        let rule = quadrature(Family::RadauRight, 3).unwrap();
        let unit = tableau_from_sbp_sat(&SbpOperator::from_quadrature(&rule, 1.0).unwrap()).unwrap();
        let long = tableau_from_sbp_sat(&SbpOperator::from_quadrature(&rule, 7.0).unwrap()).unwrap();
        assert!(linalg::max_abs(&(unit.a() - long.a())) < 1e-12);
        assert!(linalg::vec_inf_norm(&(unit.c() - long.c())) < 1e-15);
    }

    #[test]
    fn non_sbp_tableau_weights() {
        let t = ButcherTableau::algebraically_stable_non_sbp();
        assert_abs_diff_eq!(t.b().sum(), 1.0, epsilon = 1e-15);
        // row sums equal c
        for i in 0..4 {
            assert_abs_diff_eq!(t.a().row(i).sum(), t.c()[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn classical_small_cases() {
        let l = classical_tableau(ClassicalKind::LobattoIIIC, 2).unwrap();
        assert_matrix(l.a(), &[&[0.5, -0.5], &[0.5, 0.5]], 1e-14);

        let r = classical_tableau(ClassicalKind::RadauIIA, 2).unwrap();
        assert_matrix(r.a(), &[&[5.0 / 12.0, -1.0 / 12.0], &[0.75, 0.25]], 1e-14);
        assert_abs_diff_eq!(r.b()[0], 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(r.c()[0], 1.0 / 3.0, epsilon = 1e-15);

        let r = classical_tableau(ClassicalKind::RadauIA, 1).unwrap();
        assert_eq!(r.a()[(0, 0)], 1.0);
        assert_eq!(r.b()[0], 1.0);
        assert_eq!(r.c()[0], 0.0);

        let g = classical_tableau(ClassicalKind::Gauss, 1).unwrap();
        assert_abs_diff_eq!(g.a()[(0, 0)], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn radau_iia_three_stage_closed_form() {
        let r6 = 6f64.sqrt();
        let want: [[f64; 3]; 3] = [
            [11.0 / 45.0 - 7.0 * r6 / 360.0, 37.0 / 225.0 - 169.0 * r6 / 1800.0, -2.0 / 225.0 + r6 / 75.0],
            [37.0 / 225.0 + 169.0 * r6 / 1800.0, 11.0 / 45.0 + 7.0 * r6 / 360.0, -2.0 / 225.0 - r6 / 75.0],
            [4.0 / 9.0 - r6 / 36.0, 4.0 / 9.0 + r6 / 36.0, 1.0 / 9.0],
        ];
        let t = classical_tableau(ClassicalKind::RadauIIA, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(t.a()[(i, j)], want[i][j], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn invalid_classical_stage_counts() {
        assert!(matches!(
            classical_tableau(ClassicalKind::LobattoIIIC, 1),
            Err(Error::InvalidStageCount { .. })
        ));
        assert!(classical_tableau(ClassicalKind::RadauIA, 0).is_err());
    }

    #[test]
    fn dimension_checks() {
        assert!(ButcherTableau::new(
            "bad",
            Matrix::zeros(2, 2),
            Vector::zeros(3),
            Vector::zeros(3)
        )
        .is_err());
    }
}
