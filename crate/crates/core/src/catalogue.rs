//! Built-in operators and tableaux used by the experiments and the CLI.

use crate::quadrature::{quadrature, Family};
use crate::rk::{classical_tableau, tableau_from_sbp_sat, ButcherTableau, ClassicalKind};
use crate::sbp::SbpOperator;

/// Largest stage count catalogued for the quadrature and classical families.
pub const MAX_STAGES: usize = 5;
/// Stage counts catalogued for the second-order finite-difference operator.
pub const FD2_STAGES: std::ops::RangeInclusive<usize> = 3..=10;

#[derive(Debug, Clone)]
pub struct NamedOperator {
    pub name: String,
    pub operator: SbpOperator,
}

/// Every checked operator on `[0, 1]`: quadrature collocation for each
/// family up to [`MAX_STAGES`], fd2 over [`FD2_STAGES`] and the SSP example.
/// The zero-eigenvalue example is not included since it has no tableau.
pub fn operators() -> Vec<NamedOperator> {
    let mut out = Vec::new();
    for family in Family::ALL {
        for s in family.min_stages()..=MAX_STAGES {
            let rule = quadrature(family, s).expect("catalogued stage count");
            out.push(NamedOperator {
                name: format!("{family} s={s}"),
                operator: SbpOperator::from_quadrature(&rule, 1.0).expect("catalogued operator"),
            });
        }
    }
    for s in FD2_STAGES {
        out.push(NamedOperator {
            name: format!("fd2 s={s}"),
            operator: SbpOperator::fd2(s, 1.0).expect("catalogued operator"),
        });
    }
    out.push(NamedOperator {
        name: "example-ssp".into(),
        operator: SbpOperator::ssp_example(),
    });
    out
}

/// SBP-SAT tableaux of [`operators`], the classical families up to
/// [`MAX_STAGES`], and the small reference methods.
pub fn tableaux() -> Vec<ButcherTableau> {
    let mut out: Vec<ButcherTableau> = operators()
        .into_iter()
        .map(|n| {
            tableau_from_sbp_sat(&n.operator)
                .expect("catalogued operators have invertible SAT matrices")
                .with_label(format!("sbp-sat {}", n.name))
        })
        .collect();
    for kind in ClassicalKind::ALL {
        for s in kind.family().min_stages()..=MAX_STAGES {
            out.push(classical_tableau(kind, s).expect("catalogued stage count"));
        }
    }
    out.extend([
        ButcherTableau::algebraically_stable_non_sbp(),
        ButcherTableau::implicit_euler(),
        ButcherTableau::implicit_midpoint(),
        ButcherTableau::explicit_euler(),
        ButcherTableau::explicit_midpoint(),
    ]);
    out
}
