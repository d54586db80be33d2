//! Test problems `u' = f(t, u)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

pub type Rhs = Arc<dyn Fn(f64, &Vector) -> Vector + Send + Sync>;
pub type Jacobian = Arc<dyn Fn(f64, &Vector) -> Matrix + Send + Sync>;
pub type ExactSolution = Arc<dyn Fn(f64) -> Vector + Send + Sync>;

#[derive(Clone)]
pub struct OdeProblem {
    pub name: String,
    pub rhs: Rhs,
    pub jacobian: Option<Jacobian>,
    pub t0: f64,
    pub u0: Vector,
    pub t_end: f64,
    /// One-sided Lipschitz constant of `f` in the Euclidean inner product.
    pub one_sided_lipschitz: Option<f64>,
    pub exact_solution: Option<ExactSolution>,
}

impl fmt::Debug for OdeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OdeProblem")
            .field("name", &self.name)
            .field("t0", &self.t0)
            .field("u0", &self.u0.as_slice())
            .field("t_end", &self.t_end)
            .field("one_sided_lipschitz", &self.one_sided_lipschitz)
            .field("jacobian", &self.jacobian.is_some())
            .field("exact_solution", &self.exact_solution.is_some())
            .finish()
    }
}

impl OdeProblem {
    pub fn new(
        name: impl Into<String>,
        rhs: impl Fn(f64, &Vector) -> Vector + Send + Sync + 'static,
        t0: f64,
        u0: Vector,
        t_end: f64,
    ) -> Self {
        OdeProblem {
            name: name.into(),
            rhs: Arc::new(rhs),
            jacobian: None,
            t0,
            u0,
            t_end,
            one_sided_lipschitz: None,
            exact_solution: None,
        }
    }

    pub fn with_jacobian(mut self, j: impl Fn(f64, &Vector) -> Matrix + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(j));
        self
    }

    pub fn with_exact(mut self, e: impl Fn(f64) -> Vector + Send + Sync + 'static) -> Self {
        self.exact_solution = Some(Arc::new(e));
        self
    }

    pub fn with_lipschitz(mut self, nu: f64) -> Self {
        self.one_sided_lipschitz = Some(nu);
        self
    }

    pub fn with_interval(mut self, t0: f64, t_end: f64) -> Self {
        self.t0 = t0;
        self.t_end = t_end;
        self
    }

    pub fn dimension(&self) -> usize {
        self.u0.len()
    }

    pub fn eval(&self, t: f64, u: &Vector) -> Vector {
        (self.rhs)(t, u)
    }

    pub fn exact(&self, t: f64) -> Option<Vector> {
        self.exact_solution.as_ref().map(|e| e(t))
    }

    /// Scalar linear test equation `u' = λu`, `u(0) = 1` on `[0, 1]`.
    pub fn dahlquist(lambda: f64) -> Self {
        OdeProblem::new("dahlquist", move |_, u| u * lambda, 0.0, Vector::from_element(1, 1.0), 1.0)
            .with_jacobian(move |_, _| Matrix::from_element(1, 1, lambda))
            .with_exact(move |t| Vector::from_element(1, (lambda * t).exp()))
            .with_lipschitz(lambda)
    }

    /// `u' = −u + sin t`, `u(0) = 1` on `[0, 4.5]`. The interval keeps
    /// order fits over 10 to 80 blocks clear of both the coarse-step regime
    /// and the round-off floor for methods up to order six.
    pub fn forced_linear() -> Self {
        let u0 = 1.0;
        OdeProblem::new("forced-linear", |t, u| -u + Vector::from_element(1, t.sin()), 0.0, Vector::from_element(1, u0), 4.5)
            .with_jacobian(|_, _| Matrix::from_element(1, 1, -1.0))
            .with_exact(move |t| Vector::from_element(1, 0.5 * (t.sin() - t.cos()) + (u0 + 0.5) * (-t).exp()))
            .with_lipschitz(-1.0)
    }

    /// `u' = −u³`, `u(0) = 1` on `[0, 1]`; monotone with `ν = 0`.
    pub fn cubic() -> Self {
        OdeProblem::new("cubic", |_, u| u.map(|x| -x * x * x), 0.0, Vector::from_element(1, 1.0), 1.0)
            .with_jacobian(|_, u| Matrix::from_diagonal(&u.map(|x| -3.0 * x * x)))
            .with_exact(|t| Vector::from_element(1, 1.0 / (1.0 + 2.0 * t).sqrt()))
            .with_lipschitz(0.0)
    }

    /// `u' = L u` with `L = Q diag(−1, −10⁴) Qᵀ` for a fixed rotation `Q`,
    /// `u(0) = (1, 1)` on `[0, 1]`.
    pub fn stiff_rotated() -> Self {
        let q = stiff_rotation();
        let l = &q * Matrix::from_diagonal(&Vector::from_vec(vec![-1.0, -1e4])) * q.transpose();
        let u0 = Vector::from_vec(vec![1.0, 1.0]);
        let w0 = q.transpose() * &u0;
        let l_rhs = l.clone();
        OdeProblem::new("stiff-2d", move |_, u| &l_rhs * u, 0.0, u0, 1.0)
            .with_jacobian(move |_, _| l.clone())
            .with_exact(move |t| &q * Vector::from_vec(vec![w0[0] * (-t).exp(), w0[1] * (-1e4 * t).exp()]))
            .with_lipschitz(-1.0)
    }
}

fn stiff_rotation() -> Matrix {
    let theta: f64 = 0.5;
    let (s, c) = theta.sin_cos();
    Matrix::from_row_slice(2, 2, &[c, -s, s, c])
}

pub const PROBLEM_NAMES: [&str; 4] = ["dahlquist", "forced-linear", "cubic", "stiff-2d"];

/// Looks up a catalogued problem; `lambda` only affects `dahlquist`.
pub fn problem_by_name(name: &str, lambda: f64) -> Result<OdeProblem> {
    match name {
        "dahlquist" => Ok(OdeProblem::dahlquist(lambda)),
        "forced-linear" => Ok(OdeProblem::forced_linear()),
        "cubic" => Ok(OdeProblem::cubic()),
        "stiff-2d" => Ok(OdeProblem::stiff_rotated()),
        other => Err(Error::InvalidInput(format!(
            "unknown problem {other:?} (expected one of {})",
            PROBLEM_NAMES.join(", ")
        ))),
    }
}

pub fn catalogued_problems() -> Vec<OdeProblem> {
    vec![
        OdeProblem::dahlquist(-1.0),
        OdeProblem::forced_linear(),
        OdeProblem::cubic(),
        OdeProblem::stiff_rotated(),
    ]
}
