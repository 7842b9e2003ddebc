//! Modular bounds and the descent algorithms built on them.
//!
//! All KL objectives handled here reduce to the form `T̃(S) − U(S)` plus a
//! constant, with `T̃` supermodular and `U(S) = φ(π(S)) + φ(π(S'))`. The
//! majorisation–minimisation engine in [`kl`] replaces `U` by its tangent and
//! `T̃` by a permutation-chain modular majoriser, then minimises the resulting
//! modular surrogate exactly.

pub mod frobenius;
pub mod kl;
pub mod pair;
pub mod recursive;

use serde::Serialize;

use crate::partitions::{CutSet, StateSet};

pub use frobenius::{
    half_approx_singleton, mm_minimize_frobenius, zeta_majorizer, FrobeniusTarget, HalfApprox, InnerSolver,
};
pub use kl::{modular_lower_u, modular_upper_t, mm_minimize_kl, t_function, u_function, BoundMode, PERMUTATION_RETRIES};
pub use pair::{coordinate_descent_pair, DEFAULT_INNER_STARTS, psi_function, psi_split_parts, varphi_objective};
pub use recursive::{
    a_l_audit, recursive_singleton, AlAudit, MetropolisLazyRestriction, RecursiveLevel, RestrictionStrategy,
};

/// `base + Σ_{x∈S} weights[x]`.
#[derive(Debug, Clone, Serialize)]
pub struct ModularBound {
    pub base_value: f64,
    pub weights: Vec<f64>,
    pub anchor: StateSet,
}

impl ModularBound {
    pub fn evaluate(&self, s: &StateSet) -> f64 {
        self.base_value + s.iter().map(|x| self.weights[x]).sum::<f64>()
    }

    pub fn evaluate_indicator(&self, s: &[bool]) -> f64 {
        self.base_value
            + s.iter()
                .zip(&self.weights)
                .filter(|(b, _)| **b)
                .map(|(_, w)| w)
                .sum::<f64>()
    }
}

/// One point of a descent: a cut, or a `(V, S)` pair.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Iterate {
    Cut(CutSet),
    Pair { v: CutSet, s: CutSet },
}

#[derive(Debug, Clone, Serialize)]
pub struct DescentTrace {
    pub seed: u64,
    pub iterates: Vec<Iterate>,
    /// Non-increasing.
    pub objective_values: Vec<f64>,
    pub converged: bool,
    /// Set when an iterate hit the mass guard and was replaced by the best
    /// iterate seen.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub clamped: bool,
}

impl DescentTrace {
    pub fn final_value(&self) -> f64 {
        *self.objective_values.last().expect("traces are never empty")
    }

    pub fn final_cut(&self) -> Option<&CutSet> {
        match self.iterates.last()? {
            Iterate::Cut(c) => Some(c),
            Iterate::Pair { .. } => None,
        }
    }

    pub fn final_pair(&self) -> Option<(&CutSet, &CutSet)> {
        match self.iterates.last()? {
            Iterate::Pair { v, s } => Some((v, s)),
            Iterate::Cut(_) => None,
        }
    }

    pub fn is_monotone(&self) -> bool {
        self.objective_values.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn to_json(&self) -> crate::Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SetFunctionKind {
    Submodular,
    Supermodular,
    Modular,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubmodularityVerdict {
    pub kind: SetFunctionKind,
    pub holds: bool,
    /// Violating pair `(A, B)` as masks.
    pub witness: Option<(u64, u64)>,
    /// `f(A∩B) + f(A∪B) − f(A) − f(B)` at the witness.
    pub margin: f64,
}

pub const MAX_CHECK_STATES: usize = 8;

/// Exhaustive check of `f(A∩B) + f(A∪B) ≤ f(A) + f(B)` (or the reverse, or
/// both) over all pairs of subsets of an `n`-element ground set.
///
/// Infinite values are compared with IEEE semantics; a comparison that is
/// undefined (NaN) counts as satisfied.
pub fn check_submodularity<F: Fn(u64) -> f64>(f: F, n: usize, kind: SetFunctionKind, slack: f64) -> crate::Result<SubmodularityVerdict> {
    if n > MAX_CHECK_STATES {
        return Err(crate::Error::TooLarge {
            n,
            limit: MAX_CHECK_STATES,
        });
    }
    let size = 1u64 << n;
    let values: Vec<f64> = (0..size).map(&f).collect();
    let mut worst = (0.0f64, None);
    for a in 0..size {
        for b in a + 1..size {
            let lhs = values[(a & b) as usize] + values[(a | b) as usize];
            let rhs = values[a as usize] + values[b as usize];
            let margin = lhs - rhs;
            let scale = 1.0f64.max(lhs.abs()).max(rhs.abs());
            let violated = match kind {
                SetFunctionKind::Submodular => lhs > rhs + slack * scale,
                SetFunctionKind::Supermodular => lhs < rhs - slack * scale,
                SetFunctionKind::Modular => (margin).abs() > slack * scale,
            };
            if violated && (worst.1.is_none() || margin.abs() > worst.0.abs()) {
                worst = (margin, Some((a, b)));
            }
        }
    }
    Ok(SubmodularityVerdict {
        kind,
        holds: worst.1.is_none(),
        witness: worst.1,
        margin: worst.0,
    })
}

#[cfg(test)]
pub(crate) fn indicator_of_mask(n: usize, mask: u64) -> Vec<bool> {
    (0..n).map(|x| mask >> x & 1 == 1).collect()
}

pub(crate) fn mass_of(s: &[bool], pi: &[f64]) -> f64 {
    s.iter().zip(pi).filter(|(b, _)| **b).map(|(_, p)| p).sum()
}

pub(crate) fn is_trivial(s: &[bool]) -> bool {
    s.iter().all(|b| *b) || s.iter().all(|b| !*b)
}

pub(crate) fn to_state_set(s: &[bool]) -> StateSet {
    let mut out = StateSet::empty(s.len());
    for (x, b) in s.iter().enumerate() {
        if *b {
            out.insert(x);
        }
    }
    out
}
