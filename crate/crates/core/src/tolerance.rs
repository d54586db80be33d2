//! Numerical thresholds shared by every check in the crate.
//!
//! The defaults are the values the test-suite pins. [`Tolerances::scaled`]
//! multiplies every verification threshold by a common factor, which is what
//! the command-line `SBPRK_TOL_OVERRIDE` variable feeds.

/// Verification tolerances.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Pivot threshold relative to `‖m‖∞` below which LU reports singularity.
    pub lu_pivot: f64,
    /// Maximal asymmetry accepted by the symmetric eigensolver.
    pub symmetry: f64,
    /// Relative trimming threshold for polynomial coefficients.
    pub poly_trim: f64,
    /// Entrywise SBP residual accepted by `verify_sbp`.
    pub sbp_residual: f64,
    /// SBP residual required before converting an operator into a tableau.
    pub sbp_precondition: f64,
    /// Monomial exactness threshold used when measuring accuracy orders.
    pub accuracy: f64,
    /// Real parts must exceed this for the eigenvalue assumption to hold.
    pub assumption_real_part: f64,
    /// Defect threshold for the simplifying conditions C and D.
    pub condition_defect: f64,
    /// Slack for the A-stability decision procedure.
    pub a_stability: f64,
    /// Relative trimming used to decide `deg P < deg Q`.
    pub l_stability_trim: f64,
    /// Smallest eigenvalue accepted as positive semidefinite.
    pub algebraic_eigenvalue: f64,
    /// Smallest weight accepted as non-negative.
    pub weight_sign: f64,
    /// Entries below `-ssp_sign` rule out absolute monotonicity.
    pub ssp_sign: f64,
    /// Absolute bisection tolerance for the SSP coefficient.
    pub ssp_bisection: f64,
    /// SSP coefficients above this are reported as infinite.
    pub ssp_cap: f64,
    /// Residual below which a reconstructed SBP form counts as exact.
    pub reconstruction_residual: f64,
    /// Smallest eigenvalue of a reconstructed norm matrix counted as positive.
    pub reconstruction_eigenvalue: f64,
    /// Entrywise agreement required between two tableaux.
    pub equivalence: f64,
    /// Relative stage residual that ends the Newton iteration.
    pub newton_residual: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        lu_pivot: 1e-13,
        symmetry: 1e-12,
        poly_trim: 1e-12,
        sbp_residual: 1e-10,
        sbp_precondition: 1e-9,
        accuracy: 1e-9,
        assumption_real_part: 1e-9,
        condition_defect: 1e-9,
        a_stability: 1e-9,
        l_stability_trim: 1e-10,
        algebraic_eigenvalue: 1e-10,
        weight_sign: 1e-12,
        ssp_sign: 1e-12,
        ssp_bisection: 1e-6,
        ssp_cap: 1e8,
        reconstruction_residual: 1e-7,
        reconstruction_eigenvalue: 1e-7,
        equivalence: 1e-9,
        newton_residual: 1e-11,
    };

    /// Scales every verification threshold by `factor`.
    ///
    /// Algorithmic parameters (LU pivoting, polynomial trimming, SSP
    /// bisection and cap, Newton stopping) are left untouched.
    pub fn scaled(&self, factor: f64) -> Tolerances {
        Tolerances {
            symmetry: self.symmetry * factor,
            sbp_residual: self.sbp_residual * factor,
            sbp_precondition: self.sbp_precondition * factor,
            accuracy: self.accuracy * factor,
            assumption_real_part: self.assumption_real_part * factor,
            condition_defect: self.condition_defect * factor,
            a_stability: self.a_stability * factor,
            l_stability_trim: self.l_stability_trim * factor,
            algebraic_eigenvalue: self.algebraic_eigenvalue * factor,
            weight_sign: self.weight_sign * factor,
            ssp_sign: self.ssp_sign * factor,
            reconstruction_residual: self.reconstruction_residual * factor,
            reconstruction_eigenvalue: self.reconstruction_eigenvalue * factor,
            equivalence: self.equivalence * factor,
            ..self.clone()
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances::DEFAULT
    }
}
