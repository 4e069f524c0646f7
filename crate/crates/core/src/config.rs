//! Numerical thresholds shared by every module.

/// Central tolerance record. Library routines use [`Tolerances::DEFAULT`];
/// the scenario runner may tighten or loosen its own check thresholds but
/// never these internal ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// `‖M†M − I‖_max` bound for a matrix to count as unitary.
    pub unitary: f64,
    /// Column Gram deviation bound for an isometry.
    pub isometry: f64,
    /// Candidates below this residual norm are skipped during completion.
    pub completion_skip: f64,
    /// Singular values at or below this are exact zeros (Schmidt rank).
    pub rank: f64,
    /// `|‖ψ‖ − 1|` bound for normalized vectors and unit traces.
    pub normalization: f64,
    /// `‖Σ M†M − I‖_max` bound for instruments.
    pub completeness: f64,
    /// Hermiticity bound for density operators.
    pub hermitian: f64,
    /// Smallest eigenvalue allowed for a density operator.
    pub psd: f64,
    /// Branch probability under which the post-measurement state is replaced
    /// by the maximally mixed state.
    pub branch_floor: f64,
    /// Per-tuple agreement required between temporal and spatial tables.
    pub equivalence: f64,
    /// Agreement required between simulated and closed-form projective chains.
    pub factorization: f64,
    /// Infidelity bound for regenerated states and corrected MBQC outputs.
    pub fidelity: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        unitary: 1e-10,
        isometry: 1e-8,
        completion_skip: 1e-8,
        rank: 1e-10,
        normalization: 1e-10,
        completeness: 1e-10,
        hermitian: 1e-12,
        psd: 1e-10,
        branch_floor: 1e-14,
        equivalence: 1e-9,
        factorization: 1e-10,
        fidelity: 1e-9,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub(crate) const TOL: Tolerances = Tolerances::DEFAULT;
