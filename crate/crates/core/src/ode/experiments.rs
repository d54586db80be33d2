//! Empirical order and contractivity measurements.

use serde::Serialize;

use super::problems::OdeProblem;
use super::solver::{integrate_with, irk_step_counted};
use crate::error::{Error, Result};
use crate::linalg::{self, Vector};
use crate::rk::ButcherTableau;
use crate::tolerance::Tolerances;

/// Local slopes inside the fitting window may differ by less than this.
pub const SLOPE_SPREAD: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceSample {
    pub blocks: usize,
    pub dt: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub samples: Vec<ConvergenceSample>,
    pub local_slopes: Vec<f64>,
    /// Inclusive sample range used for the fit.
    pub window: (usize, usize),
    pub order: f64,
}

/// Least-squares slope of `y` against `x`.
fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Largest run of consecutive samples whose local slopes stay within
/// [`SLOPE_SPREAD`]; among equally long runs the one at smaller `dt` wins.
fn asymptotic_window(slopes: &[f64]) -> (usize, usize) {
    let mut best = (0, 1);
    for start in 0..slopes.len() {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for end in start..slopes.len() {
            lo = lo.min(slopes[end]);
            hi = hi.max(slopes[end]);
            if hi - lo >= SLOPE_SPREAD {
                break;
            }
            let len = end + 1 - start;
            if len >= best.1 - best.0 {
                best = (start, end + 1);
            }
        }
    }
    best
}

/// Max-norm errors at `t_end` for each block count and the fitted order.
pub fn convergence_study(t: &ButcherTableau, p: &OdeProblem, block_counts: &[usize]) -> Result<ConvergenceStudy> {
    convergence_study_with(t, p, block_counts, &Tolerances::DEFAULT)
}

pub fn convergence_study_with(
    t: &ButcherTableau,
    p: &OdeProblem,
    block_counts: &[usize],
    tol: &Tolerances,
) -> Result<ConvergenceStudy> {
    if block_counts.len() < 3 {
        return Err(Error::InvalidInput("a convergence study needs at least three block counts".into()));
    }
    let exact = p
        .exact(p.t_end)
        .ok_or_else(|| Error::InvalidInput(format!("problem {} has no exact solution", p.name)))?;
    let mut counts = block_counts.to_vec();
    counts.sort_unstable();
    counts.dedup();
    if counts.len() < 3 {
        return Err(Error::InvalidInput("block counts must contain three distinct values".into()));
    }
    let mut samples = Vec::with_capacity(counts.len());
    for &blocks in &counts {
        let r = integrate_with(t, p, blocks, tol)?;
        let error = linalg::vec_inf_norm(&(Vector::from_column_slice(r.final_state()) - &exact));
        samples.push(ConvergenceSample {
            blocks,
            dt: (p.t_end - p.t0) / blocks as f64,
            error,
        });
    }
    if samples.iter().any(|s| !(s.error > 0.0)) {
        return Err(Error::InvalidInput("errors vanish; no order can be fitted".into()));
    }
    let logs: Vec<(f64, f64)> = samples.iter().map(|s| (s.dt.ln(), s.error.ln())).collect();
    let local_slopes: Vec<f64> = logs
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    let (first, last_slope) = asymptotic_window(&local_slopes);
    let window = (first, last_slope);
    let (x, y): (Vec<f64>, Vec<f64>) = logs[window.0..=window.1].iter().copied().unzip();
    Ok(ConvergenceStudy {
        order: fit_slope(&x, &y),
        samples,
        local_slopes,
        window,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionRatio {
    pub dt: f64,
    pub ratio: f64,
}

/// One step from `u0` and from `v0` for each `dt`, reporting
/// `‖u₊ − v₊‖₂ / ‖u₀ − v₀‖₂`.
pub fn contractivity_experiment(
    t: &ButcherTableau,
    p: &OdeProblem,
    u0: &Vector,
    v0: &Vector,
    dts: &[f64],
) -> Result<Vec<ContractionRatio>> {
    contractivity_experiment_with(t, p, u0, v0, dts, &Tolerances::DEFAULT)
}

pub fn contractivity_experiment_with(
    t: &ButcherTableau,
    p: &OdeProblem,
    u0: &Vector,
    v0: &Vector,
    dts: &[f64],
    tol: &Tolerances,
) -> Result<Vec<ContractionRatio>> {
    match p.one_sided_lipschitz {
        Some(nu) if nu <= 0.0 => {}
        _ => {
            return Err(Error::InvalidInput(format!(
                "problem {} is not known to be contractive (one-sided Lipschitz constant must be ≤ 0)",
                p.name
            )))
        }
    }
    let initial = (u0 - v0).norm();
    if !(initial > 0.0) {
        return Err(Error::InvalidInput("initial states must differ".into()));
    }
    dts.iter()
        .map(|&dt| {
            let (u, _) = irk_step_counted(t, p, p.t0, u0, dt, tol)?;
            let (v, _) = irk_step_counted(t, p, p.t0, v0, dt, tol)?;
            Ok(ContractionRatio {
                dt,
                ratio: (u - v).norm() / initial,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rk::{classical_tableau, ClassicalKind};

    fn scalar(x: f64) -> Vector {
        Vector::from_element(1, x)
    }

    const BLOCKS: [usize; 4] = [10, 20, 40, 80];

    #[test]
    fn radau_iia_two_stages_is_third_order() {
        let t = classical_tableau(ClassicalKind::RadauIIA, 2).unwrap();
        let study = convergence_study(&t, &OdeProblem::forced_linear(), &BLOCKS).unwrap();
        assert!((study.order - 3.0).abs() <= 0.2, "{study:?}");
    }

    #[test]
    fn lobatto_iiic_three_stages_is_fourth_order() {
        let t = classical_tableau(ClassicalKind::LobattoIIIC, 3).unwrap();
        let study = convergence_study(&t, &OdeProblem::forced_linear(), &BLOCKS).unwrap();
        assert!((study.order - 4.0).abs() <= 0.2, "{study:?}");
    }

    #[test]
    fn implicit_euler_is_first_order() {
        let study = convergence_study(&ButcherTableau::implicit_euler(), &OdeProblem::forced_linear(), &BLOCKS).unwrap();
        assert!((study.order - 1.0).abs() <= 0.1, "{study:?}");
    }

    #[test]
    fn study_preconditions() {
        let t = ButcherTableau::implicit_euler();
        assert!(convergence_study(&t, &OdeProblem::forced_linear(), &[10, 20]).is_err());
        let mut p = OdeProblem::forced_linear();
        p.exact_solution = None;
        assert!(convergence_study(&t, &p, &BLOCKS).is_err());
    }

    #[test]
    fn window_skips_round_off_floor() {
        let slopes = [3.0, 3.05, 2.95, 0.4];
        assert_eq!(asymptotic_window(&slopes), (0, 3));
        let slopes = [1.0, 3.0, 3.1];
        assert_eq!(asymptotic_window(&slopes), (1, 3));
    }

    #[test]
    fn slope_fit_recovers_power_law() {
        let x: Vec<f64> = [0.1f64, 0.05, 0.025].iter().map(|h| h.ln()).collect();
        let y: Vec<f64> = [0.1f64, 0.05, 0.025].iter().map(|h| (7.0 * h.powi(5)).ln()).collect();
        assert!((fit_slope(&x, &y) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn radau_iia_contracts_on_cubic() {
        let t = classical_tableau(ClassicalKind::RadauIIA, 2).unwrap();
        let ratios = contractivity_experiment(&t, &OdeProblem::cubic(), &scalar(1.0), &scalar(-0.5), &[0.1, 1.0, 10.0, 100.0]).unwrap();
        assert!(ratios.iter().all(|r| r.ratio <= 1.0), "{ratios:?}");
    }

    #[test]
    fn zero_rhs_ratio_is_one() {
        let p = OdeProblem::new("zero", |_, u: &Vector| u * 0.0, 0.0, scalar(0.0), 1.0).with_lipschitz(0.0);
        let t = classical_tableau(ClassicalKind::LobattoIIIC, 3).unwrap();
        let ratios = contractivity_experiment(&t, &p, &scalar(1.0), &scalar(3.0), &[0.5, 50.0]).unwrap();
        assert!(ratios.iter().all(|r| r.ratio == 1.0));
    }

    #[test]
    fn explicit_euler_expands() {
        let ratios = contractivity_experiment(
            &ButcherTableau::explicit_euler(),
            &OdeProblem::dahlquist(-1.0),
            &scalar(1.0),
            &scalar(0.0),
            &[3.0],
        )
        .unwrap();
        assert_eq!(ratios[0].ratio, 2.0);
    }

    #[test]
    fn contractivity_preconditions() {
        let t = ButcherTableau::implicit_euler();
        assert!(contractivity_experiment(&t, &OdeProblem::dahlquist(1.0), &scalar(1.0), &scalar(0.0), &[1.0]).is_err());
        assert!(contractivity_experiment(&t, &OdeProblem::cubic(), &scalar(1.0), &scalar(1.0), &[1.0]).is_err());
    }
}
