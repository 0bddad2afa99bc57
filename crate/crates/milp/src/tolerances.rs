/// Numerical tolerances shared by the simplex and branch-and-bound code.
///
/// Feasibility and optimality tolerances are absolute and apply to the
/// scaled problem the engine works on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub primal_feasibility: f64,
    pub dual_feasibility: f64,
    pub integrality: f64,
    pub pivot: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        primal_feasibility: 1e-7,
        dual_feasibility: 1e-7,
        integrality: 1e-6,
        pivot: 1e-9,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Default relative optimality gap for branch-and-bound.
pub const DEFAULT_REL_GAP: f64 = 1e-9;
