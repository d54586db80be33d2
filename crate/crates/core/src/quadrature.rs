//! Gauss, Radau and Lobatto quadrature on `[0, 1]` and the collocation
//! operators (differentiation matrix, interpolation vectors) on arbitrary
//! node sets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// Iteration cap for the Newton root polishing.
const NEWTON_MAX_ITER: usize = 100;

/// Quadrature families. Radau-left contains `0`, radau-right contains `1`,
/// Lobatto contains both endpoints and Gauss neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Gauss,
    RadauLeft,
    RadauRight,
    Lobatto,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Gauss,
        Family::RadauLeft,
        Family::RadauRight,
        Family::Lobatto,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Gauss => "gauss",
            Family::RadauLeft => "radau-left",
            Family::RadauRight => "radau-right",
            Family::Lobatto => "lobatto",
        }
    }

    pub fn min_stages(self) -> usize {
        match self {
            Family::Lobatto => 2,
            _ => 1,
        }
    }

    /// Highest polynomial degree integrated exactly by the `s`-point rule.
    pub fn exactness_degree(self, s: usize) -> usize {
        match self {
            Family::Gauss => 2 * s - 1,
            Family::RadauLeft | Family::RadauRight => 2 * s - 2,
            Family::Lobatto => 2 * s - 3,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown quadrature family '{s}'")))
    }
}

/// Nodes and weights of a quadrature rule on `[0, 1]`, nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub family: Family,
    pub s: usize,
    pub nodes: Vector,
    pub weights: Vector,
}

/// Legendre polynomial `P_n` and its first two derivatives at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64, f64) {
    if n == 0 {
        return (1.0, 0.0, 0.0);
    }
    // (P_{k-1}, P_k) and the same for first and second derivatives
    let (mut p0, mut p1) = (1.0, x);
    let (mut d0, mut d1) = (0.0, 1.0);
    let (mut dd0, mut dd1) = (0.0, 0.0);
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        let d2 = d0 + (2.0 * kf + 1.0) * p1;
        let dd2 = dd0 + (2.0 * kf + 1.0) * d1;
        (p0, p1) = (p1, p2);
        (d0, d1) = (d1, d2);
        (dd0, dd1) = (dd1, dd2);
    }
    (p1, d1, dd1)
}

/// Newton iteration with Maehly deflation against `known` roots.
///
/// `f` returns the value and derivative of the target function.
fn polish_root<F>(f: F, guess: f64, known: &[f64]) -> f64
where
    F: Fn(f64) -> (f64, f64),
{
    let mut x = guess;
    for _ in 0..NEWTON_MAX_ITER {
        let (v, d) = f(x);
        if v == 0.0 {
            break;
        }
        let deflation: f64 = known.iter().map(|r| 1.0 / (x - r)).sum();
        let dx = -1.0 / (d / v - deflation);
        x += dx;
        if dx.abs() <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

/// Gauss, Radau or Lobatto rule with `s` nodes on `[0, 1]`.
///
/// Nodes are roots of the relevant Legendre combination on `[-1, 1]`,
/// located by Newton iteration from Chebyshev-type starting points, then
/// mapped affinely to `[0, 1]`.
pub fn quadrature(family: Family, s: usize) -> Result<QuadratureRule> {
    if s < family.min_stages() {
        return Err(Error::InvalidStageCount {
            family: family.name().to_string(),
            stages: s,
        });
    }
    let sf = s as f64;
    let pi = std::f64::consts::PI;
    // nodes/weights on [-1, 1]
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(s);
    match family {
        Family::Gauss => {
            let mut roots = Vec::with_capacity(s);
            for k in 0..s {
                let guess = (pi * (k as f64 + 0.75) / (sf + 0.5)).cos();
                let x = polish_root(
                    |x| {
                        let (p, d, _) = legendre(s, x);
                        (p, d)
                    },
                    guess,
                    &roots,
                );
                roots.push(x);
            }
            for x in roots {
                let (_, d, _) = legendre(s, x);
                pairs.push((x, 2.0 / ((1.0 - x * x) * d * d)));
            }
        }
        Family::RadauRight | Family::RadauLeft => {
            // roots of P_s - P_{s-1}; x = 1 is one of them
            let mut roots = vec![1.0];
            for k in 1..s {
                let guess = (2.0 * pi * k as f64 / (2.0 * sf - 1.0)).cos();
                let x = polish_root(
                    |x| {
                        let (p, d, _) = legendre(s, x);
                        let (q, e, _) = legendre(s - 1, x);
                        (p - q, d - e)
                    },
                    guess,
                    &roots,
                );
                roots.push(x);
            }
            pairs.push((1.0, 2.0 / (sf * sf)));
            for &x in &roots[1..] {
                let (q, _, _) = legendre(s - 1, x);
                pairs.push((x, (1.0 + x) / (sf * sf * q * q)));
            }
        }
        Family::Lobatto => {
            // interior nodes: roots of P'_{s-1}
            let mut roots: Vec<f64> = Vec::with_capacity(s.saturating_sub(2));
            for k in 1..s - 1 {
                let guess = (pi * k as f64 / (sf - 1.0)).cos();
                let x = polish_root(
                    |x| {
                        let (_, d, dd) = legendre(s - 1, x);
                        (d, dd)
                    },
                    guess,
                    &roots,
                );
                roots.push(x);
            }
            let end = 2.0 / (sf * (sf - 1.0));
            pairs.push((-1.0, end));
            pairs.push((1.0, end));
            for x in roots {
                let (p, _, _) = legendre(s - 1, x);
                pairs.push((x, end / (p * p)));
            }
        }
    }
    let mut mapped: Vec<(f64, f64)> = pairs
        .into_iter()
        .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect();
    if family == Family::RadauLeft {
        mapped = mapped.into_iter().map(|(t, w)| (1.0 - t, w)).collect();
    }
    mapped.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(QuadratureRule {
        family,
        s,
        nodes: Vector::from_iterator(s, mapped.iter().map(|p| p.0)),
        weights: Vector::from_iterator(s, mapped.iter().map(|p| p.1)),
    })
}

fn check_distinct(nodes: &Vector) -> Result<()> {
    let scale = nodes.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    for i in 0..nodes.len() {
        for j in 0..i {
            if (nodes[i] - nodes[j]).abs() <= 1e-14 * scale {
                return Err(Error::DuplicateNodes);
            }
        }
    }
    Ok(())
}

/// Barycentric weights `1 / Π_{k≠j} (x_j − x_k)`.
fn barycentric_weights(nodes: &Vector) -> Vec<f64> {
    (0..nodes.len())
        .map(|j| {
            1.0 / (0..nodes.len())
                .filter(|&k| k != j)
                .map(|k| nodes[j] - nodes[k])
                .product::<f64>()
        })
        .collect()
}

/// Matrix mapping point values of a polynomial of degree `< s` at `nodes`
/// to point values of its derivative.
pub fn differentiation_matrix(nodes: &Vector) -> Result<Matrix> {
    check_distinct(nodes)?;
    let s = nodes.len();
    let w = barycentric_weights(nodes);
    let mut d = Matrix::zeros(s, s);
    for i in 0..s {
        let mut diag = 0.0;
        for j in 0..s {
            if i != j {
                let v = (w[j] / w[i]) / (nodes[i] - nodes[j]);
                d[(i, j)] = v;
                diag -= v;
            }
        }
        d[(i, i)] = diag;
    }
    Ok(d)
}

/// Lagrange basis values at `point`, so that `v·u` evaluates the
/// interpolant of `u` there.
pub fn interpolation_vector(nodes: &Vector, point: f64) -> Result<Vector> {
    check_distinct(nodes)?;
    let s = nodes.len();
    Ok(Vector::from_fn(s, |j, _| {
        (0..s)
            .filter(|&k| k != j)
            .map(|k| (point - nodes[k]) / (nodes[j] - nodes[k]))
            .product()
    }))
}
