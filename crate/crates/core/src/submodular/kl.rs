//! `D_KL(P G_S ‖ Π) = T(S) − U(S)` and its majorisation–minimisation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{is_trivial, mass_of, to_state_set, DescentTrace, Iterate, ModularBound};
use crate::chain::{check_dim, Matrix, StationaryDistribution, TransitionKernel};
use crate::error::{Error, Result};
use crate::objectives::xlogx;
use crate::partitions::{CutSet, StateSet};

/// `T(S) = Σ_x π(x) [φ(P(x,S)) + φ(P(x,S'))]` with `φ(t) = t log t`.
pub fn t_function(s: &StateSet, p: &TransitionKernel, pi: &StationaryDistribution) -> Result<f64> {
    check_dim(pi.len(), s.n())?;
    check_dim(pi.len(), p.n())?;
    let ind: Vec<bool> = (0..s.n()).map(|x| s.contains(x)).collect();
    Ok(t_indicator(&ind, p.matrix(), pi.masses()))
}

pub(crate) fn t_indicator(s: &[bool], p: &Matrix, pi: &[f64]) -> f64 {
    let n = s.len();
    let mut total = 0.0;
    for x in 0..n {
        let mut inside = 0.0;
        for y in 0..n {
            if s[y] {
                inside += p[(x, y)];
            }
        }
        let outside = (1.0 - inside).max(0.0);
        total += pi[x] * (xlogx(inside) + xlogx(outside));
    }
    total
}

/// `U(S) = φ(π(S)) + φ(π(S'))`.
pub fn u_function(cut: &CutSet) -> f64 {
    u_of_mass(cut.pi_mass())
}

pub(crate) fn u_of_mass(s: f64) -> f64 {
    xlogx(s) + xlogx(1.0 - s)
}

/// Tangent of `U` at the anchor: a modular lower bound tight at the anchor.
pub fn modular_lower_u(anchor: &CutSet, pi: &StationaryDistribution) -> Result<ModularBound> {
    check_dim(pi.len(), anchor.n())?;
    let s = anchor.pi_mass();
    let slope = (s / (1.0 - s)).ln();
    Ok(ModularBound {
        base_value: u_of_mass(s) - slope * s,
        weights: pi.masses().iter().map(|m| slope * m).collect(),
        anchor: anchor.set().clone(),
    })
}

/// Permutation-chain upper bound of the supermodular `T`, tight on every
/// prefix of `permutation`. The permutation must list the anchor first.
pub fn modular_upper_t(
    anchor: &StateSet,
    permutation: &[usize],
    p: &TransitionKernel,
    pi: &StationaryDistribution,
) -> Result<ModularBound> {
    let n = pi.len();
    check_dim(n, anchor.n())?;
    check_dim(n, p.n())?;
    check_permutation(permutation, n)?;
    let k = anchor.len();
    if !permutation[..k].iter().all(|x| anchor.contains(*x)) {
        return Err(Error::Config("permutation must start with the anchor".into()));
    }
    let (base_value, weights) = chain_bound(|s| t_indicator(s, p.matrix(), pi.masses()), permutation);
    Ok(ModularBound {
        base_value,
        weights,
        anchor: anchor.clone(),
    })
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    check_dim(n, perm.len())?;
    let mut seen = vec![false; n];
    for &x in perm {
        if x >= n || seen[x] {
            return Err(Error::Config("not a permutation".into()));
        }
        seen[x] = true;
    }
    Ok(())
}

pub(crate) fn chain_bound<F: Fn(&[bool]) -> f64>(f: F, perm: &[usize]) -> (f64, Vec<f64>) {
    let n = perm.len();
    let mut set = vec![false; n];
    let base = f(&set);
    let mut prev = base;
    let mut weights = vec![0.0; n];
    for &y in perm {
        set[y] = true;
        let cur = f(&set);
        weights[y] = cur - prev;
        prev = cur;
    }
    (base, weights)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BoundMode {
    /// Both `T` and `U` replaced by modular bounds; each step is exact.
    #[default]
    BothModular,
    /// Only `U` linearised; the supermodular step is solved exhaustively for
    /// small `n` and by single-flip local search otherwise.
    LowerOnly,
}

pub(crate) const EXHAUSTIVE_LIMIT: usize = 12;
/// Fresh permutations drawn after a chain bound fails to improve, before
/// the descent stops.
pub const PERMUTATION_RETRIES: usize = 1;

pub const DEFAULT_MAX_ITERS: usize = 100;

/// `T̃(S) − U(S) + offset` with `T̃` supermodular.
pub(crate) struct DsObjective<'a> {
    pub pi: &'a [f64],
    pub t: Box<dyn Fn(&[bool]) -> f64 + 'a>,
    pub offset: f64,
}

impl DsObjective<'_> {
    pub fn value(&self, s: &[bool]) -> f64 {
        (self.t)(s) - u_of_mass(mass_of(s, self.pi)) + self.offset
    }
}

pub(crate) struct DsOutcome {
    pub path: Vec<Vec<bool>>,
    pub values: Vec<f64>,
    pub converged: bool,
}

/// Minimiser of `Σ_{y∈S} c(y)` over non-trivial `S`.
pub(crate) fn minimize_modular(c: &[f64]) -> Vec<bool> {
    let mut s: Vec<bool> = c.iter().map(|w| *w < 0.0).collect();
    if s.iter().all(|b| !*b) {
        s[argmin(c)] = true;
    } else if s.iter().all(|b| *b) {
        s[argmax(c)] = false;
    }
    s
}

fn argmin(c: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in c.iter().enumerate() {
        if *v < c[best] {
            best = i;
        }
    }
    best
}

fn argmax(c: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in c.iter().enumerate() {
        if *v > c[best] {
            best = i;
        }
    }
    best
}

/// Exhaustive or single-flip local minimisation of `f` over non-trivial sets.
pub(crate) fn minimize_set_function<F: Fn(&[bool]) -> f64>(f: F, start: &[bool], exhaustive: bool) -> Vec<bool> {
    let n = start.len();
    if exhaustive && n <= EXHAUSTIVE_LIMIT {
        let mut best = start.to_vec();
        let mut best_val = f(start);
        let mut s = vec![false; n];
        for mask in 1..(1u64 << n) - 1 {
            for (x, b) in s.iter_mut().enumerate() {
                *b = mask >> x & 1 == 1;
            }
            let v = f(&s);
            if v < best_val {
                best_val = v;
                best.copy_from_slice(&s);
            }
        }
        return best;
    }
    let mut cur = start.to_vec();
    let mut cur_val = f(&cur);
    loop {
        let mut best: Option<(usize, f64)> = None;
        for x in 0..n {
            cur[x] = !cur[x];
            if !is_trivial(&cur) {
                let v = f(&cur);
                if v < cur_val && best.is_none_or(|(_, b)| v < b) {
                    best = Some((x, v));
                }
            }
            cur[x] = !cur[x];
        }
        match best {
            Some((x, v)) => {
                cur[x] = !cur[x];
                cur_val = v;
            }
            None => return cur,
        }
    }
}

pub(crate) fn random_nontrivial<R: Rng>(n: usize, rng: &mut R) -> Vec<bool> {
    loop {
        let s: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        if !is_trivial(&s) {
            return s;
        }
    }
}

pub(crate) fn ds_descent<R: Rng>(
    obj: &DsObjective<'_>,
    init: Vec<bool>,
    rng: &mut R,
    max_iters: usize,
    mode: BoundMode,
) -> DsOutcome {
    let n = init.len();
    let mut cur = init;
    let mut cur_val = obj.value(&cur);
    let mut path = vec![cur.clone()];
    let mut values = vec![cur_val];
    let mut fails = 0;
    for _ in 0..max_iters {
        let s = mass_of(&cur, obj.pi);
        let slope = (s / (1.0 - s)).ln();
        let next = match mode {
            BoundMode::BothModular => {
                let mut inside: Vec<usize> = (0..n).filter(|x| cur[*x]).collect();
                let mut outside: Vec<usize> = (0..n).filter(|x| !cur[*x]).collect();
                inside.shuffle(rng);
                outside.shuffle(rng);
                inside.extend(outside);
                let (_, weights) = chain_bound(&obj.t, &inside);
                let c: Vec<f64> = weights.iter().zip(obj.pi).map(|(w, m)| w - slope * m).collect();
                minimize_modular(&c)
            }
            BoundMode::LowerOnly => {
                let surrogate = |x: &[bool]| (obj.t)(x) - slope * mass_of(x, obj.pi);
                minimize_set_function(surrogate, &cur, true)
            }
        };
        let next_val = obj.value(&next);
        if next_val < cur_val - 1e-15 {
            cur = next;
            cur_val = next_val;
            path.push(cur.clone());
            values.push(cur_val);
            fails = 0;
        } else if fails < PERMUTATION_RETRIES && mode == BoundMode::BothModular {
            fails += 1;
        } else {
            return DsOutcome {
                path,
                values,
                converged: true,
            };
        }
    }
    DsOutcome {
        path,
        values,
        converged: false,
    }
}

/// Minimises `D_KL(P G_S ‖ Π)` over cuts by alternating modular
/// majorisation and exact minimisation. With no `init` the starting set is
/// drawn uniformly from the non-trivial subsets.
pub fn mm_minimize_kl(
    p: &TransitionKernel,
    pi: &StationaryDistribution,
    init: Option<&CutSet>,
    seed: u64,
    max_iters: usize,
    mode: BoundMode,
) -> Result<DescentTrace> {
    let n = pi.len();
    check_dim(n, p.n())?;
    p.require_stationary(pi)?;
    if n < 2 {
        return Err(Error::TrivialCut);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = match init {
        Some(c) => {
            check_dim(n, c.n())?;
            c.indicator()
        }
        None => random_nontrivial(n, &mut rng),
    };
    let masses = pi.masses();
    let obj = DsObjective {
        pi: masses,
        t: Box::new(|s: &[bool]| t_indicator(s, p.matrix(), masses)),
        offset: 0.0,
    };
    let out = ds_descent(&obj, start, &mut rng, max_iters, mode);
    let iterates = out
        .path
        .iter()
        .map(|s| CutSet::new(to_state_set(s), pi).map(Iterate::Cut))
        .collect::<Result<Vec<_>>>()?;
    Ok(DescentTrace {
        seed,
        iterates,
        objective_values: out.values,
        converged: out.converged,
        clamped: false,
    })
}
