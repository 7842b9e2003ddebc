//! Frobenius objectives: the singleton half-approximation and MM with the
//! `ζ` majoriser.

use serde::{Deserialize, Serialize};

use super::kl::minimize_set_function;
use super::{mass_of, to_state_set, DescentTrace, Iterate};
use crate::chain::{check_dim, eigenvalues_reversible, Matrix, StationaryDistribution, TransitionKernel};
use crate::error::{Error, Result};
use crate::objectives::cut_flow_indicator;
use crate::partitions::{CutSet, StateSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FrobeniusTarget {
    /// `‖G_S P − Π‖²`, i.e. `1 − g(S,P²)`.
    Gp,
    /// `‖G_S P G_S − Π‖` for positive semidefinite `P`, i.e. `1 − g(S,P)`.
    Gpg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InnerSolver {
    /// Exhaustive for `n ≤ 12`, local search beyond.
    #[default]
    ExhaustiveSmall,
    GreedyLocal,
}

pub const MASS_CLAMP: f64 = 1e-6;
const PSD_TOLERANCE: f64 = 1e-10;

fn require_psd(p: &TransitionKernel, pi: &StationaryDistribution) -> Result<()> {
    let min = eigenvalues_reversible(p, pi)?.min_eigenvalue();
    if min < -PSD_TOLERANCE {
        return Err(Error::NotPositiveSemidefinite(min));
    }
    Ok(())
}

fn target_matrix(p: &TransitionKernel, pi: &StationaryDistribution, target: FrobeniusTarget) -> Result<Matrix> {
    check_dim(pi.len(), p.n())?;
    p.require_reversible(pi)?;
    match target {
        FrobeniusTarget::Gp => Ok(p.matrix() * p.matrix()),
        FrobeniusTarget::Gpg => {
            require_psd(p, pi)?;
            Ok(p.matrix().clone())
        }
    }
}

fn objective(s: &[bool], q: &Matrix, pi: &[f64]) -> f64 {
    let m = mass_of(s, pi);
    1.0 - cut_flow_indicator(s, q, pi) / (m * (1.0 - m))
}

#[derive(Debug, Clone, Serialize)]
pub struct HalfApprox {
    pub cut: CutSet,
    pub target: FrobeniusTarget,
    /// `1 − g(U*, Q)`.
    pub objective: f64,
    /// `1 − Q(x*,x*)`.
    pub h_value: f64,
    /// Upper bound on `f(U*) − min_S f(S)`, never above `1/2`.
    pub certified_gap: f64,
}

/// The singleton `U* = {x*}` maximising `1 − Q(x,x)`, lowest index on ties,
/// with `Q = P²` for [`FrobeniusTarget::Gp`] and `Q = P` for
/// [`FrobeniusTarget::Gpg`].
pub fn half_approx_singleton(
    p: &TransitionKernel,
    pi: &StationaryDistribution,
    target: FrobeniusTarget,
) -> Result<HalfApprox> {
    let q = target_matrix(p, pi, target)?;
    let n = pi.len();
    if n < 2 {
        return Err(Error::TrivialCut);
    }
    let mut best = 0;
    for x in 1..n {
        if q[(x, x)] < q[(best, best)] {
            best = x;
        }
    }
    let h_value = 1.0 - q[(best, best)];
    if h_value <= 0.0 {
        return Err(Error::NotErgodic("no state leaves itself".into()));
    }
    let cut = CutSet::new(StateSet::singleton(n, best), pi)?;
    let value = objective(&cut.indicator(), &q, pi.masses());
    let floor = (1.0 - 2.0 * h_value).max(0.0);
    Ok(HalfApprox {
        cut,
        target,
        objective: value,
        h_value,
        certified_gap: (value - floor).clamp(0.0, 0.5),
    })
}

fn zeta_indicator(s: &[bool], s0: f64, q: &Matrix, pi: &[f64]) -> f64 {
    let n = s.len();
    let m = mass_of(s, pi);
    let mut inner_in = 0.0;
    let mut inner_out = 0.0;
    for x in 0..n {
        let mut a = 0.0;
        for y in 0..n {
            if s[x] == s[y] {
                a += q[(x, y)];
            }
        }
        if s[x] {
            inner_in += pi[x] * a;
        } else {
            inner_out += pi[x] * a;
        }
    }
    let d0 = s0 * (1.0 - s0);
    3.0 - 1.0 / d0 + (1.0 - 2.0 * s0) / (d0 * d0) * (m - s0) + inner_out / m + inner_in / (1.0 - m)
}

/// `ζ(S; S₀)`, a supermodular majoriser of the Frobenius objective that is
/// tight at `S₀`.
pub fn zeta_majorizer(
    s: &CutSet,
    anchor: &CutSet,
    p: &TransitionKernel,
    pi: &StationaryDistribution,
    target: FrobeniusTarget,
) -> Result<f64> {
    check_dim(pi.len(), s.n())?;
    check_dim(pi.len(), anchor.n())?;
    let q = target_matrix(p, pi, target)?;
    Ok(zeta_indicator(&s.indicator(), anchor.pi_mass(), &q, pi.masses()))
}

/// MM on the Frobenius objective. Iterates whose mass leaves
/// `[ε, 1 − ε]` are rejected and flag the trace as clamped.
pub fn mm_minimize_frobenius(
    p: &TransitionKernel,
    pi: &StationaryDistribution,
    init: &CutSet,
    target: FrobeniusTarget,
    solver: InnerSolver,
    max_iters: usize,
) -> Result<DescentTrace> {
    check_dim(pi.len(), init.n())?;
    let q = target_matrix(p, pi, target)?;
    let masses = pi.masses();
    let mut cur = init.indicator();
    let mut cur_val = objective(&cur, &q, masses);
    let mut path = vec![cur.clone()];
    let mut values = vec![cur_val];
    let mut converged = false;
    let mut clamped = false;
    for _ in 0..max_iters {
        let s0 = mass_of(&cur, masses);
        let zeta = |s: &[bool]| zeta_indicator(s, s0, &q, masses);
        let next = minimize_set_function(zeta, &cur, solver == InnerSolver::ExhaustiveSmall);
        let m = mass_of(&next, masses);
        if !(MASS_CLAMP..=1.0 - MASS_CLAMP).contains(&m) {
            clamped = true;
            converged = true;
            break;
        }
        let next_val = objective(&next, &q, masses);
        if next_val < cur_val - 1e-15 {
            cur = next;
            cur_val = next_val;
            path.push(cur.clone());
            values.push(cur_val);
        } else {
            converged = true;
            break;
        }
    }
    let iterates = path
        .iter()
        .map(|s| CutSet::new(to_state_set(s), pi).map(Iterate::Cut))
        .collect::<Result<Vec<_>>>()?;
    Ok(DescentTrace {
        seed: 0,
        iterates,
        objective_values: values,
        converged,
        clamped,
    })
}
