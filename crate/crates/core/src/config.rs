/// Floating-point tolerances shared by every module.
///
/// `construction` guards the validity checks on distributions and kernels,
/// `identity` is the slack for exact algebraic identities evaluated in
/// floating point, and `inequality` is the slack for bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub construction: f64,
    pub identity: f64,
    pub inequality: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        construction: 1e-12,
        identity: 1e-10,
        inequality: 1e-8,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Largest state space accepted by the dense routines (d ≤ 12 spins).
pub const MAX_STATES: usize = 4096;
