//! Exhaustive minimisation over cuts and cut pairs.
//!
//! Objectives are evaluated from the averaged matrices themselves (block
//! averaging, `O(n²)` per cut), never through the closed forms in
//! [`crate::objectives`], so the oracle doubles as an independent check on
//! them. Every objective here depends on `S` only through `G_S`, which is
//! invariant under `S ↦ S'`, so cuts are enumerated with state 0 pinned.

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{check_dim, distance_to_pi_sq, Matrix, StationaryDistribution, TransitionKernel};
use crate::error::{Error, Result};
use crate::objectives::kl_to_pi;
use crate::partitions::{cut_masks, left_average, right_average, CutMasks, CutSet, OrbitPartition};

/// Ties within this absolute distance of the minimum are reported.
pub const TIE_TOLERANCE: f64 = 1e-12;
pub const MAX_CUT_STATES: usize = 20;
pub const MAX_PAIR_STATES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Objective {
    /// `D_KL(G_S P G_S‖Π)`.
    KlGpg,
    /// `D_KL(P G_S‖Π)`.
    KlPg,
    /// `D_KL(G_S P‖Π)`.
    KlGp,
    /// `‖G_S P − Π‖²_{F,π}`.
    FrobGp,
    /// `‖G_S P G_S − Π‖²_{F,π}`.
    FrobGpg,
    /// `D_KL(G_V P G_S‖Π)`, pairs only.
    KlGvpgs,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::KlGpg => "KL_GPG",
            Objective::KlPg => "KL_PG",
            Objective::KlGp => "KL_GP",
            Objective::FrobGp => "FROB_GP",
            Objective::FrobGpg => "FROB_GPG",
            Objective::KlGvpgs => "KL_GVPGS",
        }
    }
}

fn two_block(mask: u64, pi: &StationaryDistribution) -> OrbitPartition {
    let labels: Vec<usize> = (0..pi.len()).map(|x| (mask >> x & 1 == 0) as usize).collect();
    OrbitPartition::from_labels(&labels, pi).expect("non-trivial mask")
}

/// Matrix-level value of a single-cut objective.
pub fn evaluate_mask(objective: Objective, mask: u64, p: &Matrix, pi: &StationaryDistribution) -> Result<f64> {
    let part = two_block(mask, pi);
    match objective {
        Objective::KlGpg => kl_to_pi(&right_average(&left_average(p, &part, pi), &part, pi), pi),
        Objective::KlPg => kl_to_pi(&right_average(p, &part, pi), pi),
        Objective::KlGp => kl_to_pi(&left_average(p, &part, pi), pi),
        Objective::FrobGp => distance_to_pi_sq(&left_average(p, &part, pi), pi),
        Objective::FrobGpg => distance_to_pi_sq(&right_average(&left_average(p, &part, pi), &part, pi), pi),
        Objective::KlGvpgs => Err(Error::Config("KL_GVPGS is a pair objective".into())),
    }
}

pub fn evaluate_cut(objective: Objective, cut: &CutSet, p: &TransitionKernel, pi: &StationaryDistribution) -> Result<f64> {
    check_dim(pi.len(), cut.n())?;
    let mask = cut
        .mask()
        .ok_or(Error::TooLarge { n: cut.n(), limit: 64 })?;
    evaluate_mask(objective, mask, p.matrix(), pi)
}

/// `D_KL(G_V P G_S‖Π)` from the matrices.
pub fn evaluate_pair_masks(v: u64, s: u64, p: &Matrix, pi: &StationaryDistribution) -> Result<f64> {
    let pv = two_block(v, pi);
    let ps = two_block(s, pi);
    kl_to_pi(&right_average(&left_average(p, &pv, pi), &ps, pi), pi)
}

#[derive(Debug, Clone, Serialize)]
pub struct CutPair {
    pub v: CutSet,
    pub s: CutSet,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Minimisers {
    Cuts(Vec<CutSet>),
    Pairs(Vec<CutPair>),
}

impl Minimisers {
    pub fn len(&self) -> usize {
        match self {
            Minimisers::Cuts(c) => c.len(),
            Minimisers::Pairs(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cuts(&self) -> Option<&[CutSet]> {
        match self {
            Minimisers::Cuts(c) => Some(c),
            Minimisers::Pairs(_) => None,
        }
    }

    pub fn pairs(&self) -> Option<&[CutPair]> {
        match self {
            Minimisers::Pairs(p) => Some(p),
            Minimisers::Cuts(_) => None,
        }
    }
}

/// Counting conventions for optimal pairs `(V, S)`: which coordinates are
/// identified with their complements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairDedup {
    Both,
    SOnly,
    VOnly,
    None,
}

impl PairDedup {
    pub const ALL: [PairDedup; 4] = [PairDedup::Both, PairDedup::SOnly, PairDedup::VOnly, PairDedup::None];

    fn multiplicity(self) -> usize {
        match self {
            PairDedup::Both => 1,
            PairDedup::SOnly | PairDedup::VOnly => 2,
            PairDedup::None => 4,
        }
    }

    /// Number of pairs in the search space under this convention.
    pub fn search_space(self, n: usize) -> u64 {
        let dedup = CutMasks::count(n, true);
        let full = CutMasks::count(n, false);
        match self {
            PairDedup::Both => dedup * dedup,
            PairDedup::SOnly => full * dedup,
            PairDedup::VOnly => dedup * full,
            PairDedup::None => full * full,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    pub objective: Objective,
    pub min_value: f64,
    /// Minimisers, each cut represented by its member containing state 0.
    pub minimisers: Minimisers,
    /// Number of cuts (or pairs) evaluated.
    pub evaluated: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value_table: Option<Vec<(u64, f64)>>,
}

impl OracleResult {
    /// Optimal count under a pair convention; for single-cut results `Both`
    /// and `SOnly` count deduped cuts and the others count both members.
    pub fn count(&self, mode: PairDedup) -> usize {
        match &self.minimisers {
            Minimisers::Pairs(p) => p.len() * mode.multiplicity(),
            Minimisers::Cuts(c) => match mode {
                PairDedup::Both | PairDedup::SOnly => c.len(),
                _ => 2 * c.len(),
            },
        }
    }

    /// Value table as CSV with a `#` schema line.
    pub fn table_csv(&self) -> Option<String> {
        let table = self.value_table.as_ref()?;
        let mut out = format!("# columns: mask,{}\nmask,value\n", self.objective.name());
        for (mask, v) in table {
            out.push_str(&format!("{mask:#x},{v:.17e}\n"));
        }
        Some(out)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OracleOptions {
    pub keep_table: bool,
}

fn collect_minimisers(values: &[(u64, f64)]) -> (f64, Vec<u64>) {
    let min = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let winners = values
        .iter()
        .filter(|v| v.1 <= min + TIE_TOLERANCE)
        .map(|v| v.0)
        .collect();
    (min, winners)
}

/// Exact minimisers of a single-cut objective over all non-trivial cuts.
pub fn brute_force_cut(
    objective: Objective,
    p: &TransitionKernel,
    pi: &StationaryDistribution,
    options: OracleOptions,
) -> Result<OracleResult> {
    let n = pi.len();
    check_dim(n, p.n())?;
    if n > MAX_CUT_STATES {
        return Err(Error::TooLarge { n, limit: MAX_CUT_STATES });
    }
    if objective == Objective::KlGvpgs {
        return brute_force_pair(p, pi, options);
    }
    let masks: Vec<u64> = cut_masks(n, true)?.collect();
    let m = p.matrix();
    let values: Vec<(u64, f64)> = masks
        .par_iter()
        .map(|&mask| evaluate_mask(objective, mask, m, pi).map(|v| (mask, v)))
        .collect::<Result<_>>()?;
    let (min_value, winners) = collect_minimisers(&values);
    let minimisers = winners
        .into_iter()
        .map(|mask| CutSet::from_mask(n, mask, pi))
        .collect::<Result<_>>()?;
    Ok(OracleResult {
        objective,
        min_value,
        minimisers: Minimisers::Cuts(minimisers),
        evaluated: values.len() as u64,
        value_table: options.keep_table.then_some(values),
    })
}

/// Exact minimisers of `D_KL(G_V P G_S‖Π)` over pairs of non-trivial cuts,
/// both coordinates deduped. The table key packs `V` in the high 32 bits.
pub fn brute_force_pair(
    p: &TransitionKernel,
    pi: &StationaryDistribution,
    options: OracleOptions,
) -> Result<OracleResult> {
    let n = pi.len();
    check_dim(n, p.n())?;
    if n > MAX_PAIR_STATES {
        return Err(Error::TooLarge { n, limit: MAX_PAIR_STATES });
    }
    let masks: Vec<u64> = cut_masks(n, true)?.collect();
    let m = p.matrix();
    let values: Vec<(u64, f64)> = masks
        .par_iter()
        .flat_map_iter(|&v| {
            masks
                .iter()
                .map(move |&s| evaluate_pair_masks(v, s, m, pi).map(|val| (v << 32 | s, val)))
        })
        .collect::<Result<_>>()?;
    let (min_value, winners) = collect_minimisers(&values);
    let pairs = winners
        .into_iter()
        .map(|key| {
            Ok(CutPair {
                v: CutSet::from_mask(n, key >> 32, pi)?,
                s: CutSet::from_mask(n, key & 0xffff_ffff, pi)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(OracleResult {
        objective: Objective::KlGvpgs,
        min_value,
        minimisers: Minimisers::Pairs(pairs),
        evaluated: values.len() as u64,
        value_table: options.keep_table.then_some(values),
    })
}

/// `{x_min}` for a state of least mass, lowest index on ties.
pub fn optimal_pi_singleton(pi: &StationaryDistribution) -> Result<CutSet> {
    if pi.len() < 2 {
        return Err(Error::Degenerate("need at least two states".into()));
    }
    let min = pi.min_mass();
    let x = (0..pi.len()).find(|&x| pi.mass(x) == min).expect("minimum exists");
    CutSet::from_states(&[x], pi)
}
