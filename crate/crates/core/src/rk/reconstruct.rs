//! Search for an SBP-SAT representation of a given Runge-Kutta method.
//!
//! On the unit interval an SBP-SAT method has `A⁻¹ = D + M⁻¹ t_L t_Lᵀ` and
//! `b = M 1`. Consistency then pins `t_R = A⁻ᵀ b` and `t_L = M A⁻¹ 1`, and
//! `D = A⁻¹ − A⁻¹ 1 t_Lᵀ`, so the only unknown is the symmetric norm
//! matrix `M`. The SBP property becomes the quadratic system
//! `M A⁻¹ + A⁻ᵀ M − t_L t_Lᵀ − t_R t_Rᵀ = 0`, supplemented by the linear
//! accuracy conditions `t_Lᵀ 1 = 1` and `t_Lᵀ c = 0`. The system is solved
//! by Levenberg–Marquardt from several starting points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::tableau::ButcherTableau;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::tolerance::Tolerances;

pub const DEFAULT_PERTURBATIONS: usize = 16;
const MAX_ITERATIONS: usize = 400;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionResult {
    pub t_right: Vec<f64>,
    pub t_left: Vec<f64>,
    /// Row-major symmetric norm matrix of the best start.
    pub m: Vec<f64>,
    /// Row-major derivative matrix of the best start.
    pub d: Vec<f64>,
    /// Largest violated constraint at the best start.
    pub residual: f64,
    pub m_eigenvalues: Vec<f64>,
    pub sbp_exists_with_pd_norm: bool,
    pub best_start: usize,
}

/// The constraint map `M ↦ F(M)` and its Jacobian.
struct System {
    s: usize,
    a_inv: Matrix,
    ones_image: Vector,
    t_right: Vector,
    c: Vector,
}

impl System {
    fn unknowns(&self) -> usize {
        self.s * (self.s + 1) / 2
    }

    fn equations(&self) -> usize {
        self.s * self.s + 2
    }

    /// Upper-triangle index pairs in parameter order.
    fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.s)
            .flat_map(|i| (i..self.s).map(move |j| (i, j)))
            .collect()
    }

    fn to_matrix(&self, params: &Vector) -> Matrix {
        let mut m = Matrix::zeros(self.s, self.s);
        for (k, (i, j)) in self.pairs().into_iter().enumerate() {
            m[(i, j)] = params[k];
            m[(j, i)] = params[k];
        }
        m
    }

    fn to_params(&self, m: &Matrix) -> Vector {
        Vector::from_iterator(self.unknowns(), self.pairs().into_iter().map(|(i, j)| m[(i, j)]))
    }

    fn t_left(&self, m: &Matrix) -> Vector {
        m * &self.ones_image
    }

    fn derivative(&self, t_left: &Vector) -> Matrix {
        &self.a_inv - &self.ones_image * t_left.transpose()
    }

    fn residual(&self, params: &Vector) -> Vector {
        let m = self.to_matrix(params);
        let tl = self.t_left(&m);
        let ma = &m * &self.a_inv;
        let sbp = &ma + ma.transpose() - &tl * tl.transpose() - &self.t_right * self.t_right.transpose();
        let mut f = Vector::zeros(self.equations());
        for i in 0..self.s {
            for j in 0..self.s {
                f[i * self.s + j] = sbp[(i, j)];
            }
        }
        f[self.s * self.s] = tl.sum() - 1.0;
        f[self.s * self.s + 1] = tl.dot(&self.c);
        f
    }

    fn jacobian(&self, params: &Vector) -> Matrix {
        let m = self.to_matrix(params);
        let tl = self.t_left(&m);
        let mut jac = Matrix::zeros(self.equations(), self.unknowns());
        for (k, (p, q)) in self.pairs().into_iter().enumerate() {
            let mut e = Matrix::zeros(self.s, self.s);
            e[(p, q)] = 1.0;
            e[(q, p)] = 1.0;
            let dtl = &e * &self.ones_image;
            let ea = &e * &self.a_inv;
            let d = &ea + ea.transpose() - &dtl * tl.transpose() - &tl * dtl.transpose();
            for i in 0..self.s {
                for j in 0..self.s {
                    jac[(i * self.s + j, k)] = d[(i, j)];
                }
            }
            jac[(self.s * self.s, k)] = dtl.sum();
            jac[(self.s * self.s + 1, k)] = dtl.dot(&self.c);
        }
        jac
    }

    /// Levenberg–Marquardt from `start`; returns the final parameters and
    /// max-norm residual.
    fn solve(&self, start: Vector) -> (Vector, f64) {
        let mut x = start;
        let mut f = self.residual(&x);
        let mut cost = f.norm_squared();
        let mut mu = 1e-3;
        for _ in 0..MAX_ITERATIONS {
            if linalg::vec_inf_norm(&f) < 1e-15 {
                break;
            }
            let jac = self.jacobian(&x);
            let jtj = jac.transpose() * &jac;
            let grad = jac.transpose() * &f;
            let mut improved = false;
            for _ in 0..30 {
                let damped = &jtj + Matrix::from_diagonal(&jtj.diagonal().map(|d| mu * d.max(1e-12)));
                let Some(step) = damped.lu().solve(&(-&grad)) else {
                    mu *= 10.0;
                    continue;
                };
                let trial = &x + &step;
                let ft = self.residual(&trial);
                let ct = ft.norm_squared();
                if ct < cost {
                    let small = step.norm() <= 1e-16 * (1.0 + x.norm());
                    x = trial;
                    f = ft;
                    cost = ct;
                    mu = (mu / 3.0).max(1e-15);
                    improved = !small;
                    break;
                }
                mu *= 4.0;
            }
            if !improved {
                break;
            }
        }
        (x, linalg::vec_inf_norm(&f))
    }
}

/// Attempts to write the method as an SBP-SAT scheme on `[0, 1]`.
///
/// Start 0 is `M = diag(b)`; `perturbations` further starts perturb it by
/// random symmetric matrices drawn from a ChaCha stream seeded with `seed`.
/// The start with the smallest residual wins, ties going to the lower index.
pub fn reconstruct_sbp(t: &ButcherTableau) -> Result<ReconstructionResult> {
    reconstruct_sbp_with(t, DEFAULT_PERTURBATIONS, 0, &Tolerances::DEFAULT)
}

pub fn reconstruct_sbp_with(
    t: &ButcherTableau,
    perturbations: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<ReconstructionResult> {
    let s = t.s();
    let a_inv = linalg::inverse(t.a()).map_err(|_| Error::SingularTableau)?;
    let ones = Vector::from_element(s, 1.0);
    let system = System {
        s,
        t_right: a_inv.transpose() * t.b(),
        ones_image: &a_inv * &ones,
        a_inv,
        c: t.c().clone(),
    };
    let base = system.to_params(&Matrix::from_diagonal(t.b()));
    let scale = linalg::vec_inf_norm(t.b()).max(1e-3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(usize, Vector, f64)> = None;
    for index in 0..=perturbations {
        let start = if index == 0 {
            base.clone()
        } else {
            base.map(|v| v + 0.25 * scale * rng.gen_range(-1.0..1.0))
        };
        let (x, residual) = system.solve(start);
        if !residual.is_finite() {
            continue;
        }
        if best.as_ref().is_none_or(|(_, _, r)| residual < *r) {
            best = Some((index, x, residual));
        }
    }
    let (best_start, params, residual) =
        best.ok_or(Error::NoConvergence { iterations: MAX_ITERATIONS })?;
    let m = system.to_matrix(&params);
    let t_left = system.t_left(&m);
    let d = system.derivative(&t_left);
    let m_eigenvalues = linalg::symmetric_eigenvalues(&m)?;
    let sbp_exists_with_pd_norm =
        residual < tol.reconstruction_residual && m_eigenvalues[0] > tol.reconstruction_eigenvalue;
    let row_major = |x: &Matrix| x.transpose().iter().copied().collect::<Vec<f64>>();
    Ok(ReconstructionResult {
        t_right: system.t_right.iter().copied().collect(),
        t_left: t_left.iter().copied().collect(),
        m: row_major(&m),
        d: row_major(&d),
        residual,
        m_eigenvalues,
        sbp_exists_with_pd_norm,
        best_start,
    })
}
