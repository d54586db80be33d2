//! Implicit Runge-Kutta steps with Newton stage solves.

use serde::Serialize;

use super::problems::OdeProblem;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::rk::ButcherTableau;
use crate::tolerance::Tolerances;

pub const MAX_NEWTON_ITERATIONS: usize = 50;
const DIVERGENCE_GROWTH: f64 = 1e6;
const FD_STEP: f64 = 1e-7;
const LINE_SEARCH_HALVINGS: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrationResult {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub newton_iterations_total: usize,
    pub converged: bool,
}

impl IntegrationResult {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("at least the initial state")
    }
}

/// Forward-difference Jacobian with step `1e-7 (1 + |u_k|)`.
fn fd_jacobian(p: &OdeProblem, t: f64, u: &Vector, fu: &Vector) -> Matrix {
    let d = u.len();
    let mut j = Matrix::zeros(d, d);
    for k in 0..d {
        let h = FD_STEP * (1.0 + u[k].abs());
        let mut up = u.clone();
        up[k] += h;
        let col = (p.eval(t, &up) - fu) / h;
        j.set_column(k, &col);
    }
    j
}

struct StageSystem<'a> {
    tableau: &'a ButcherTableau,
    problem: &'a OdeProblem,
    tn: f64,
    un: &'a Vector,
    dt: f64,
}

impl StageSystem<'_> {
    fn dim(&self) -> usize {
        self.un.len()
    }

    fn stage_time(&self, i: usize) -> f64 {
        self.tn + self.tableau.c()[i] * self.dt
    }

    fn stage(u: &Vector, i: usize, d: usize) -> Vector {
        u.rows(i * d, d).into_owned()
    }

    fn stage_rhs(&self, u: &Vector) -> Vec<Vector> {
        let d = self.dim();
        (0..self.tableau.s())
            .map(|i| self.problem.eval(self.stage_time(i), &Self::stage(u, i, d)))
            .collect()
    }

    /// `G(U)_i = U_i − u_n − dt Σ_j a_ij f(t_n + c_j dt, U_j)`.
    fn residual(&self, u: &Vector, f: &[Vector]) -> Vector {
        let (s, d) = (self.tableau.s(), self.dim());
        let a = self.tableau.a();
        let mut g = u.clone();
        for i in 0..s {
            let mut row = g.rows_mut(i * d, d);
            row -= self.un;
            for j in 0..s {
                if a[(i, j)] != 0.0 {
                    row.axpy(-self.dt * a[(i, j)], &f[j], 1.0);
                }
            }
        }
        g
    }

    /// `I − dt (A ⊗ I)·blockdiag(J_j)`.
    fn jacobian(&self, u: &Vector, f: &[Vector]) -> Matrix {
        let (s, d) = (self.tableau.s(), self.dim());
        let a = self.tableau.a();
        let mut jac = Matrix::identity(s * d, s * d);
        for j in 0..s {
            let uj = Self::stage(u, j, d);
            let t = self.stage_time(j);
            let jj = match &self.problem.jacobian {
                Some(analytic) => analytic(t, &uj),
                None => fd_jacobian(self.problem, t, &uj, &f[j]),
            };
            for i in 0..s {
                if a[(i, j)] != 0.0 {
                    let mut block = jac.view_mut((i * d, j * d), (d, d));
                    block -= &jj * (self.dt * a[(i, j)]);
                }
            }
        }
        jac
    }
}

fn divergence(iterations: usize, residual: f64) -> Error {
    Error::NewtonDivergence {
        block: None,
        iterations,
        residual,
    }
}

/// One step of the Runge-Kutta method from `(tn, un)`, returning
/// `u_n + dt Σ b_i f(t_n + c_i dt, U_i)` and the Newton iteration count.
pub fn irk_step_counted(
    t: &ButcherTableau,
    p: &OdeProblem,
    tn: f64,
    un: &Vector,
    dt: f64,
    tol: &Tolerances,
) -> Result<(Vector, usize)> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidInput(format!("step size must be positive, got {dt}")));
    }
    let (s, d) = (t.s(), un.len());
    let sys = StageSystem {
        tableau: t,
        problem: p,
        tn,
        un,
        dt,
    };
    let target = tol.newton_residual * (1.0 + linalg::vec_inf_norm(un));
    let mut u = Vector::from_fn(s * d, |k, _| un[k % d]);
    let mut f = sys.stage_rhs(&u);
    let mut g = sys.residual(&u, &f);
    let mut norm = linalg::vec_inf_norm(&g);
    let initial = norm.max(target);
    let mut iterations = 0;
    while norm >= target {
        if iterations == MAX_NEWTON_ITERATIONS || !norm.is_finite() || norm > DIVERGENCE_GROWTH * initial {
            return Err(divergence(iterations, norm));
        }
        iterations += 1;
        let jac = sys.jacobian(&u, &f);
        let delta = linalg::lu_solve(&jac, &(-&g)).map_err(|_| divergence(iterations, norm))?;
        // backtrack on ‖G‖∞; the full step is kept when nothing decreases
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=LINE_SEARCH_HALVINGS {
            let trial = &u + &delta * lambda;
            let ft = sys.stage_rhs(&trial);
            let gt = sys.residual(&trial, &ft);
            let nt = linalg::vec_inf_norm(&gt);
            if nt < norm {
                accepted = Some((trial, ft, gt, nt));
                break;
            }
            lambda *= 0.5;
        }
        let negligible = linalg::vec_inf_norm(&delta) <= 4.0 * f64::EPSILON * (1.0 + linalg::vec_inf_norm(&u));
        match accepted {
            Some((nu, nf, ng, nn)) => {
                u = nu;
                f = nf;
                g = ng;
                norm = nn;
            }
            None if negligible => break,
            None => {
                u += &delta;
                f = sys.stage_rhs(&u);
                g = sys.residual(&u, &f);
                norm = linalg::vec_inf_norm(&g);
            }
        }
        if negligible {
            break;
        }
    }
    let mut next = un.clone();
    for i in 0..s {
        next.axpy(dt * t.b()[i], &f[i], 1.0);
    }
    Ok((next, iterations))
}

pub fn irk_step(t: &ButcherTableau, p: &OdeProblem, tn: f64, un: &Vector, dt: f64) -> Result<Vector> {
    irk_step_counted(t, p, tn, un, dt, &Tolerances::DEFAULT).map(|(u, _)| u)
}

/// Applies the method over `n_blocks` uniform blocks of `[t0, t_end]`.
pub fn integrate(t: &ButcherTableau, p: &OdeProblem, n_blocks: usize) -> Result<IntegrationResult> {
    integrate_with(t, p, n_blocks, &Tolerances::DEFAULT)
}

pub fn integrate_with(
    t: &ButcherTableau,
    p: &OdeProblem,
    n_blocks: usize,
    tol: &Tolerances,
) -> Result<IntegrationResult> {
    if n_blocks == 0 {
        return Err(Error::InvalidInput("at least one block is required".into()));
    }
    if !(p.t_end > p.t0) {
        return Err(Error::InvalidInput(format!("empty interval [{}, {}]", p.t0, p.t_end)));
    }
    let dt = (p.t_end - p.t0) / n_blocks as f64;
    let mut times = vec![p.t0];
    let mut states = vec![p.u0.iter().copied().collect::<Vec<_>>()];
    let mut u = p.u0.clone();
    let mut total = 0;
    for k in 0..n_blocks {
        let tn = p.t0 + k as f64 * dt;
        let (next, its) = irk_step_counted(t, p, tn, &u, dt, tol).map_err(|e| match e {
            Error::NewtonDivergence {
                iterations,
                residual,
                ..
            } => Error::NewtonDivergence {
                block: Some(k),
                iterations,
                residual,
            },
            other => other,
        })?;
        total += its;
        u = next;
        times.push(if k + 1 == n_blocks { p.t_end } else { p.t0 + (k + 1) as f64 * dt });
        states.push(u.iter().copied().collect());
    }
    Ok(IntegrationResult {
        times,
        states,
        newton_iterations_total: total,
        converged: true,
    })
}
