//! Summation-by-parts operators `(D, M, t_L, t_R)` on a grid in `[0, T]`.
//!
//! An SBP operator mimics integration by parts:
//! `M D + Dᵀ M = t_R t_Rᵀ − t_L t_Lᵀ`. This module builds collocation and
//! finite-difference operators, ships two hand-made operators with unusual
//! properties, verifies operators numerically and certifies the eigenvalue
//! condition on the SAT matrix `D + σ M⁻¹ t_L t_Lᵀ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexValue, Matrix, Vector};
use crate::quadrature::{self, QuadratureRule};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Diagonal,
    Dense,
}

/// An SBP operator on `[0, T]`.
///
/// Operators built through [`SbpOperator::new`] satisfy the SBP property,
/// have a symmetric positive definite norm matrix and are exact on
/// monomials up to `claimed_order`. Operators built through
/// [`SbpOperator::new_unchecked`] carry `unchecked = true` and no guarantee.
#[derive(Debug, Clone, PartialEq)]
pub struct SbpOperator {
    nodes: Vector,
    interval: f64,
    d: Matrix,
    m: Matrix,
    t_left: Vector,
    t_right: Vector,
    claimed_order: usize,
    norm_kind: NormKind,
    unchecked: bool,
}

/// Residuals and measured orders reported by [`verify_sbp`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SbpVerification {
    /// `max |M D + Dᵀ M − t_R t_Rᵀ + t_L t_Lᵀ|`.
    pub sbp_residual: f64,
    /// `max |M − Mᵀ|`.
    pub symmetry_defect: f64,
    /// Smallest eigenvalue of the symmetric part of `M`.
    pub min_norm_eigenvalue: f64,
    /// Largest `k` such that `D` is exact on all monomials of degree `≤ k`.
    pub derivative_order: Option<usize>,
    pub left_order: Option<usize>,
    pub right_order: Option<usize>,
    pub claimed_order: usize,
}

impl SbpVerification {
    /// Whether every invariant of a checked operator holds.
    pub fn passes(&self, tol: &Tolerances) -> bool {
        let p = Some(self.claimed_order);
        self.sbp_residual <= tol.sbp_residual
            && self.symmetry_defect <= tol.symmetry
            && self.min_norm_eigenvalue > 0.0
            && self.derivative_order >= p
            && self.left_order >= p
            && self.right_order >= p
    }

    /// Measured accuracy: the smallest of the three measured orders.
    pub fn measured_order(&self) -> Option<usize> {
        self.derivative_order
            .min(self.left_order)
            .min(self.right_order)
    }
}

impl SbpOperator {
    /// Builds an operator and checks every invariant.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        nodes: Vector,
        interval: f64,
        d: Matrix,
        m: Matrix,
        t_left: Vector,
        t_right: Vector,
        claimed_order: usize,
    ) -> Result<Self> {
        let op = Self::new_unchecked(nodes, interval, d, m, t_left, t_right, claimed_order)?;
        let report = verify_sbp(&op);
        let tol = Tolerances::DEFAULT;
        if report.sbp_residual > tol.sbp_residual {
            return Err(Error::SbpViolation {
                residual: report.sbp_residual,
            });
        }
        if !report.passes(&tol) {
            return Err(Error::InvalidInput(format!(
                "operator fails verification: {report:?}"
            )));
        }
        Ok(SbpOperator {
            unchecked: false,
            ..op
        })
    }

    /// Builds an operator checking only dimensions and finiteness.
    pub fn new_unchecked(
        nodes: Vector,
        interval: f64,
        d: Matrix,
        m: Matrix,
        t_left: Vector,
        t_right: Vector,
        claimed_order: usize,
    ) -> Result<Self> {
        let s = nodes.len();
        if s == 0 {
            return Err(Error::InvalidInput("operator needs at least one node".into()));
        }
        let shapes_ok = d.shape() == (s, s)
            && m.shape() == (s, s)
            && t_left.len() == s
            && t_right.len() == s;
        if !shapes_ok {
            return Err(Error::DimensionMismatch(format!(
                "operator with {s} nodes has D {:?}, M {:?}, tL {}, tR {}",
                d.shape(),
                m.shape(),
                t_left.len(),
                t_right.len()
            )));
        }
        let finite = nodes.iter().chain(d.iter()).chain(m.iter())
            .chain(t_left.iter()).chain(t_right.iter())
            .all(|x| x.is_finite());
        if !finite || !(interval > 0.0 && interval.is_finite()) {
            return Err(Error::InvalidInput("operator entries must be finite and T > 0".into()));
        }
        let norm_kind = if m.iter().enumerate().all(|(k, x)| k % (s + 1) == 0 || *x == 0.0) {
            NormKind::Diagonal
        } else {
            NormKind::Dense
        };
        Ok(SbpOperator {
            nodes,
            interval,
            d,
            m,
            t_left,
            t_right,
            claimed_order,
            norm_kind,
            unchecked: true,
        })
    }

    pub fn s(&self) -> usize {
        self.nodes.len()
    }
    pub fn nodes(&self) -> &Vector {
        &self.nodes
    }
    /// Interval length `T`.
    pub fn interval(&self) -> f64 {
        self.interval
    }
    pub fn d(&self) -> &Matrix {
        &self.d
    }
    pub fn m(&self) -> &Matrix {
        &self.m
    }
    pub fn t_left(&self) -> &Vector {
        &self.t_left
    }
    pub fn t_right(&self) -> &Vector {
        &self.t_right
    }
    pub fn claimed_order(&self) -> usize {
        self.claimed_order
    }
    pub fn norm_kind(&self) -> NormKind {
        self.norm_kind
    }
    pub fn is_unchecked(&self) -> bool {
        self.unchecked
    }

    /// Whether the grid contains the left or right end of `[0, T]`.
    pub fn contains_endpoint(&self) -> bool {
        let s = self.s();
        self.nodes[0] == 0.0 || self.nodes[s - 1] == self.interval
    }

    /// The SAT matrix `D + σ M⁻¹ t_L t_Lᵀ`.
    pub fn sat_matrix(&self, sigma: f64) -> Result<Matrix> {
        let penalty = linalg::lu_solve(&self.m, &self.t_left)?;
        Ok(&self.d + (penalty * self.t_left.transpose()) * sigma)
    }

    /// Collocation operator on the nodes of a quadrature rule, scaled to `[0, T]`.
    pub fn from_quadrature(rule: &QuadratureRule, interval: f64) -> Result<Self> {
        if !(interval > 0.0) {
            return Err(Error::InvalidInput(format!("interval length must be positive, got {interval}")));
        }
        let d = quadrature::differentiation_matrix(&rule.nodes)? / interval;
        let m = Matrix::from_diagonal(&(&rule.weights * interval));
        let t_left = quadrature::interpolation_vector(&rule.nodes, 0.0)?;
        let t_right = quadrature::interpolation_vector(&rule.nodes, 1.0)?;
        Self::new(
            &rule.nodes * interval,
            interval,
            d,
            m,
            t_left,
            t_right,
            rule.s - 1,
        )
    }

    /// Classical second-order interior / first-order boundary finite
    /// difference operator on `s` uniform nodes.
    pub fn fd2(s: usize, interval: f64) -> Result<Self> {
        if s < 3 {
            return Err(Error::InvalidStageCount {
                family: "fd2".into(),
                stages: s,
            });
        }
        if !(interval > 0.0) {
            return Err(Error::InvalidInput(format!("interval length must be positive, got {interval}")));
        }
        let h = interval / (s - 1) as f64;
        let mut d = Matrix::zeros(s, s);
        d[(0, 0)] = -1.0 / h;
        d[(0, 1)] = 1.0 / h;
        d[(s - 1, s - 2)] = -1.0 / h;
        d[(s - 1, s - 1)] = 1.0 / h;
        for i in 1..s - 1 {
            d[(i, i - 1)] = -0.5 / h;
            d[(i, i + 1)] = 0.5 / h;
        }
        let mut weights = Vector::from_element(s, h);
        weights[0] = 0.5 * h;
        weights[s - 1] = 0.5 * h;
        let nodes = Vector::from_fn(s, |i, _| if i == s - 1 { interval } else { i as f64 * h });
        let mut t_left = Vector::zeros(s);
        t_left[0] = 1.0;
        let mut t_right = Vector::zeros(s);
        t_right[s - 1] = 1.0;
        Self::new(nodes, interval, d, Matrix::from_diagonal(&weights), t_left, t_right, 1)
    }

    /// First-order operator on four uniform nodes in `[0, 1]` whose SAT
    /// matrix has the eigenvalue zero for every penalty `σ`, with
    /// eigenvector `(0, −1, 1, 0)`.
    ///
    /// The SBP property and first-order accuracy hold; the operator is
    /// flagged `unchecked` because it violates the eigenvalue condition.
    pub fn zero_eigenvalue_example() -> Self {
        let d = linalg::from_rows(&[
            &[-2.0, 1.0, 1.0, 0.0],
            &[-1.0, 0.0, 0.0, 1.0],
            &[-1.0, 0.0, 0.0, 1.0],
            &[0.0, -1.0, -1.0, 2.0],
        ]);
        let nodes = Vector::from_column_slice(&[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]);
        let m = Matrix::identity(4, 4) * 0.25;
        let t_left = Vector::from_column_slice(&[1.0, 0.0, 0.0, 0.0]);
        let t_right = Vector::from_column_slice(&[0.0, 0.0, 0.0, 1.0]);
        Self::new_unchecked(nodes, 1.0, d, m, t_left, t_right, 1).expect("fixed operator")
    }

    /// First-order diagonal-norm operator on the interior nodes
    /// `{1/4, 1/2, 3/4}` whose Runge-Kutta form has only non-negative
    /// coefficients.
    pub fn ssp_example() -> Self {
        let d = linalg::from_rows(&[
            &[-2079.0, 3646.0, -1567.0],
            &[271.0, -1054.0, 783.0],
            &[-479.0, 446.0, 33.0],
        ]) / 128.0;
        let nodes = Vector::from_column_slice(&[0.25, 0.5, 0.75]);
        let m = Matrix::from_diagonal(&Vector::from_column_slice(&[0.25, 0.5, 0.25]));
        let t_left = Vector::from_column_slice(&[3.0, -3.0, 1.0]);
        let t_right = Vector::from_column_slice(&[-15.0, 14.0, 17.0]) / 16.0;
        Self::new(nodes, 1.0, d, m, t_left, t_right, 1).expect("fixed operator")
    }
}

fn monomials(nodes: &Vector, k: usize) -> Vector {
    nodes.map(|t| t.powi(k as i32))
}

/// Largest `k ≤ cap` with `check(j)` passing for all `j ≤ k`.
fn measured_order(cap: usize, check: impl Fn(usize) -> bool) -> Option<usize> {
    let mut order = None;
    for k in 0..=cap {
        if !check(k) {
            break;
        }
        order = Some(k);
    }
    order
}

/// Residual norms and measured accuracy orders of an operator.
///
/// Orders are probed up to degree `2s`; a monomial passes when the defect,
/// relative to `max(1, ‖exact‖∞)`, is below the accuracy tolerance.
pub fn verify_sbp(op: &SbpOperator) -> SbpVerification {
    verify_sbp_with(op, &Tolerances::DEFAULT)
}

pub fn verify_sbp_with(op: &SbpOperator, tol: &Tolerances) -> SbpVerification {
    let s = op.s();
    let t = op.interval;
    let md = &op.m * &op.d;
    let residual = &md + md.transpose() - &op.t_right * op.t_right.transpose()
        + &op.t_left * op.t_left.transpose();
    let symmetry_defect = linalg::max_abs(&(&op.m - op.m.transpose()));
    let sym = (&op.m + op.m.transpose()) * 0.5;
    let min_norm_eigenvalue = linalg::symmetric_eigenvalues(&sym)
        .map(|e| e[0])
        .unwrap_or(f64::NAN);

    // exactness is probed on monomials of τ/T so that the verdict does not
    // depend on the interval length
    let x = &op.nodes / t;
    let scaled_d = &op.d * t;
    let cap = 2 * s;
    let derivative_order = measured_order(cap, |k| {
        let du = &scaled_d * monomials(&x, k);
        let exact = if k == 0 {
            Vector::zeros(s)
        } else {
            monomials(&x, k - 1) * k as f64
        };
        linalg::vec_inf_norm(&(du - &exact)) <= tol.accuracy * linalg::vec_inf_norm(&exact).max(1.0)
    });
    let boundary_order = |v: &Vector, point: f64| {
        measured_order(cap, |k| {
            let exact = if k == 0 { 1.0 } else { point.powi(k as i32) };
            (v.dot(&monomials(&x, k)) - exact).abs() <= tol.accuracy * exact.abs().max(1.0)
        })
    };
    SbpVerification {
        sbp_residual: linalg::max_abs(&residual),
        symmetry_defect,
        min_norm_eigenvalue,
        derivative_order,
        left_order: boundary_order(&op.t_left, 0.0),
        right_order: boundary_order(&op.t_right, 1.0),
        claimed_order: op.claimed_order,
    }
}

/// Outcome of sampling the SAT eigenvalue condition over a `σ` grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub sigma_samples: Vec<f64>,
    /// Smallest real part of the spectrum of `D + σ M⁻¹ t_L t_Lᵀ` per sample.
    pub min_real_part_per_sigma: Vec<f64>,
    pub satisfied: bool,
    pub threshold: f64,
    /// `σ` with the smallest minimal real part.
    pub witness_sigma: f64,
    #[serde(serialize_with = "serialize_complex")]
    pub witness_eigenvalue: ComplexValue,
    /// Unit eigenvector of a real witness eigenvalue.
    pub witness_eigenvector: Option<Vec<f64>>,
}

fn serialize_complex<S: serde::Serializer>(z: &ComplexValue, ser: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = ser.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}

/// Default `σ` grid: 64 uniform samples on `[0.501, 2]`.
pub const DEFAULT_SIGMA_MIN: f64 = 0.5 + 1e-3;
pub const DEFAULT_SIGMA_MAX: f64 = 2.0;
pub const DEFAULT_SIGMA_SAMPLES: usize = 64;

/// Uniform grid of `samples` points on `[lo, hi]`, both ends included.
pub fn sigma_grid(lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    if samples <= 1 {
        return vec![lo];
    }
    (0..samples)
        .map(|k| lo + (hi - lo) * k as f64 / (samples - 1) as f64)
        .collect()
}

/// Samples the smallest real part of the SAT spectrum on a `σ` grid.
///
/// The condition holds iff every sampled minimum exceeds the tolerance.
pub fn check_assumption(op: &SbpOperator, sigma_min: f64, sigma_max: f64, samples: usize) -> Result<AssumptionReport> {
    check_assumption_with(op, sigma_min, sigma_max, samples, &Tolerances::DEFAULT)
}

pub fn check_assumption_with(
    op: &SbpOperator,
    sigma_min: f64,
    sigma_max: f64,
    samples: usize,
    tol: &Tolerances,
) -> Result<AssumptionReport> {
    if !(sigma_min > 0.5) || sigma_max < sigma_min {
        return Err(Error::InvalidInput(format!(
            "sigma range must satisfy 1/2 < sigma_min <= sigma_max, got [{sigma_min}, {sigma_max}]"
        )));
    }
    if samples == 0 {
        return Err(Error::InvalidInput("at least one sigma sample is required".into()));
    }
    let sigma_samples = sigma_grid(sigma_min, sigma_max, samples);
    let mut min_real_part_per_sigma = Vec::with_capacity(samples);
    let mut witness: Option<(f64, ComplexValue)> = None;
    for &sigma in &sigma_samples {
        let eig = linalg::eigenvalues(&op.sat_matrix(sigma)?)?;
        let worst = eig
            .into_iter()
            .min_by(|a, b| a.re.total_cmp(&b.re))
            .expect("non-empty spectrum");
        min_real_part_per_sigma.push(worst.re);
        if witness.is_none_or(|(_, w)| worst.re < w.re) {
            witness = Some((sigma, worst));
        }
    }
    let (witness_sigma, witness_eigenvalue) = witness.expect("at least one sample");
    let scale = linalg::inf_norm(&op.sat_matrix(witness_sigma)?).max(1.0);
    let witness_eigenvector = if witness_eigenvalue.im.abs() <= 1e-9 * scale {
        linalg::eigenvector(&op.sat_matrix(witness_sigma)?, witness_eigenvalue.re)
            .ok()
            .map(|v| v.iter().copied().collect())
    } else {
        None
    };
    let satisfied = min_real_part_per_sigma
        .iter()
        .all(|&r| r > tol.assumption_real_part);
    Ok(AssumptionReport {
        sigma_samples,
        min_real_part_per_sigma,
        satisfied,
        threshold: tol.assumption_real_part,
        witness_sigma,
        witness_eigenvalue,
        witness_eigenvector,
    })
}
