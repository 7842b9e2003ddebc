//! The two-sided objective `D_KL(G_V P G_S ‖ Π)` and its coordinate descent.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::kl::{ds_descent, random_nontrivial, u_of_mass, BoundMode, DsObjective, DEFAULT_MAX_ITERS};
use super::{mass_of, to_state_set, DescentTrace, Iterate};
use crate::chain::{check_dim, Matrix, StationaryDistribution, TransitionKernel};
use crate::error::{Error, Result};
use crate::objectives::xlogx;
use crate::partitions::{CutSet, StateSet};

fn flow_between(a: &[bool], b: &[bool], p: &Matrix, pi: &[f64]) -> f64 {
    let n = a.len();
    let mut total = 0.0;
    for x in 0..n {
        if !a[x] {
            continue;
        }
        let mut row = 0.0;
        for y in 0..n {
            if b[y] {
                row += p[(x, y)];
            }
        }
        total += pi[x] * row;
    }
    total
}

fn indicator(s: &StateSet) -> Vec<bool> {
    (0..s.n()).map(|x| s.contains(x)).collect()
}

/// `ψ(A,B) = −F log F` with `F = Σ_{x∈A} π(x)P(x,B)` and `0 log 0 = 0`.
pub fn psi_function(a: &StateSet, b: &StateSet, p: &TransitionKernel, pi: &StationaryDistribution) -> Result<f64> {
    check_dim(pi.len(), a.n())?;
    check_dim(pi.len(), b.n())?;
    check_dim(pi.len(), p.n())?;
    Ok(-xlogx(flow_between(&indicator(a), &indicator(b), p.matrix(), pi.masses())))
}

fn times_log(c: f64, f: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else if f <= 0.0 {
        f64::NEG_INFINITY
    } else {
        c * f.ln()
    }
}

/// For fixed `S`, the pieces `A(V) = Σ_{y∈S} π(y)P(y,V') log F(V,S)` and
/// `B(V) = π(S) log F(V,S)` with `ψ(V,S) = A(V) − B(V)` for reversible `P`.
/// Both are `−∞` when `F(V,S) = 0` and the prefactor is positive.
pub fn psi_split_parts(v: &StateSet, s: &StateSet, p: &TransitionKernel, pi: &StationaryDistribution) -> Result<(f64, f64)> {
    check_dim(pi.len(), v.n())?;
    check_dim(pi.len(), s.n())?;
    check_dim(pi.len(), p.n())?;
    let (vi, si) = (indicator(v), indicator(s));
    let vc: Vec<bool> = vi.iter().map(|b| !b).collect();
    let m = p.matrix();
    let f = flow_between(&vi, &si, m, pi.masses());
    let escape = flow_between(&si, &vc, m, pi.masses());
    let ps = mass_of(&si, pi.masses());
    Ok((times_log(escape, f), times_log(ps, f)))
}

/// `Σ_{A∈{V,V'}, B∈{S,S'}} φ(F(A,B))`, symmetric in `V` and `S` for
/// reversible `P`.
pub(crate) fn pair_t(v: &[bool], s: &[bool], p: &Matrix, pi: &[f64]) -> f64 {
    let f = flow_between(v, s, p, pi);
    let pv = mass_of(v, pi);
    let ps = mass_of(s, pi);
    xlogx(f) + xlogx(pv - f) + xlogx(ps - f) + xlogx(1.0 - pv - ps + f)
}

/// `−U(S) + H(π̄^V) − Σ_{A,B} ψ(A,B)`, equal to `D_KL(G_V P G_S ‖ Π)`.
pub fn varphi_objective(v: &CutSet, s: &CutSet, p: &TransitionKernel, pi: &StationaryDistribution) -> Result<f64> {
    check_dim(pi.len(), v.n())?;
    check_dim(pi.len(), s.n())?;
    check_dim(pi.len(), p.n())?;
    Ok(pair_value(&v.indicator(), &s.indicator(), p.matrix(), pi.masses()))
}

fn pair_value(v: &[bool], s: &[bool], p: &Matrix, pi: &[f64]) -> f64 {
    pair_t(v, s, p, pi) - u_of_mass(mass_of(s, pi)) - u_of_mass(mass_of(v, pi))
}

pub const DEFAULT_INNER_STARTS: usize = 16;

/// Alternates MM descents in `S` (with `V` fixed) and in `V` (with `S`
/// fixed) until a full round improves neither. Each coordinate step keeps the
/// best of `inner_starts` MM runs: one warm-started at the current set, the
/// rest from random sets.
pub fn coordinate_descent_pair(
    p: &TransitionKernel,
    pi: &StationaryDistribution,
    init_v: Option<&CutSet>,
    init_s: Option<&CutSet>,
    seed: u64,
    max_rounds: usize,
    mode: BoundMode,
    inner_starts: usize,
) -> Result<DescentTrace> {
    let n = pi.len();
    check_dim(n, p.n())?;
    p.require_reversible(pi)?;
    if n < 2 {
        return Err(Error::TrivialCut);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = match init_v {
        Some(c) => {
            check_dim(n, c.n())?;
            c.indicator()
        }
        None => random_nontrivial(n, &mut rng),
    };
    let mut s = match init_s {
        Some(c) => {
            check_dim(n, c.n())?;
            c.indicator()
        }
        None => random_nontrivial(n, &mut rng),
    };
    let m = p.matrix();
    let masses = pi.masses();
    let mut cur_val = pair_value(&v, &s, m, masses);
    let mut pairs = vec![(v.clone(), s.clone())];
    let mut values = vec![cur_val];
    let mut converged = false;
    for _ in 0..max_rounds {
        let mut improved = false;
        for step in 0..2 {
            let (moving, fixed) = if step == 0 { (&mut s, &v) } else { (&mut v, &s) };
            let fixed_now = fixed.clone();
            let obj = DsObjective {
                pi: masses,
                t: Box::new(move |x: &[bool]| pair_t(&fixed_now, x, m, masses)),
                offset: -u_of_mass(mass_of(fixed, masses)),
            };
            let mut found: Option<(Vec<bool>, f64)> = None;
            for k in 0..inner_starts.max(1) {
                let start = if k == 0 { moving.clone() } else { random_nontrivial(n, &mut rng) };
                let out = ds_descent(&obj, start, &mut rng, DEFAULT_MAX_ITERS, mode);
                let val = *out.values.last().expect("non-empty");
                if found.as_ref().is_none_or(|f| val < f.1) {
                    found = Some((out.path.last().expect("non-empty").clone(), val));
                }
            }
            let (cand, best) = found.expect("at least one start");
            if best < cur_val - 1e-15 {
                *moving = cand;
                cur_val = best;
                improved = true;
                pairs.push((v.clone(), s.clone()));
                values.push(cur_val);
            }
        }
        if !improved {
            converged = true;
            break;
        }
    }
    let iterates = pairs
        .into_iter()
        .map(|(v, s)| {
            Ok(Iterate::Pair {
                v: CutSet::new(to_state_set(&v), pi)?,
                s: CutSet::new(to_state_set(&s), pi)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DescentTrace {
        seed,
        iterates,
        objective_values: values,
        converged,
        clamped: false,
    })
}
