//! Recursive singleton peeling on positive semidefinite reversible chains.

use serde::Serialize;

use crate::chain::{check_dim, distance_to_pi_sq, eigenvalues_reversible, power, Matrix, StationaryDistribution, TransitionKernel};
use crate::error::{Error, Result};

/// Produces the chain on the remaining states after one state is removed.
/// The result must be reversible and positive semidefinite with respect to
/// the conditional distribution.
pub trait RestrictionStrategy {
    fn restrict(&self, p: &Matrix, removed: usize) -> Matrix;
}

/// Keeps the off-diagonal moves among the remaining states, folds moves into
/// the removed state onto the diagonal, then lazifies by one half.
#[derive(Debug, Clone, Copy, Default)]
pub struct MetropolisLazyRestriction;

impl RestrictionStrategy for MetropolisLazyRestriction {
    fn restrict(&self, p: &Matrix, removed: usize) -> Matrix {
        let keep: Vec<usize> = (0..p.nrows()).filter(|x| *x != removed).collect();
        let k = keep.len();
        let mut out = Matrix::zeros(k, k);
        for (i, &x) in keep.iter().enumerate() {
            for (j, &y) in keep.iter().enumerate() {
                out[(i, j)] = 0.5 * p[(x, y)];
            }
            out[(i, i)] += 0.5 * p[(x, removed)] + 0.5;
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RecursiveLevel {
    pub level: usize,
    /// Removed state, as an index of the original chain.
    pub state: usize,
    /// Mass of the removed state under the level's distribution.
    pub pi_mass: f64,
    /// `‖G P_i G − Π_i‖` for the singleton cut at this level.
    pub distance: f64,
}

struct Stage {
    states: Vec<usize>,
    pi: StationaryDistribution,
    p: Matrix,
    local: usize,
    distance: f64,
}

const TOL: f64 = 1e-10;

fn stages(p: &TransitionKernel, pi: &StationaryDistribution, strategy: &dyn RestrictionStrategy) -> Result<Vec<Stage>> {
    check_dim(pi.len(), p.n())?;
    let mut cur_p = p.clone();
    let mut cur_pi = pi.clone();
    let mut states: Vec<usize> = (0..pi.len()).collect();
    let mut out = Vec::new();
    while states.len() >= 2 {
        cur_p.require_reversible(&cur_pi)?;
        let min = eigenvalues_reversible(&cur_p, &cur_pi)?.min_eigenvalue();
        if min < -TOL {
            return Err(Error::NotPositiveSemidefinite(min));
        }
        let m = cur_p.matrix();
        let score = |x: usize| (m[(x, x)] - cur_pi.mass(x)) / (1.0 - cur_pi.mass(x));
        let mut best = 0;
        for x in 1..states.len() {
            if score(x) < score(best) {
                best = x;
            }
        }
        let next_states: Vec<usize> = states.iter().enumerate().filter(|(i, _)| *i != best).map(|(_, s)| *s).collect();
        let next = if next_states.len() >= 2 {
            let masses: Vec<f64> = (0..states.len()).filter(|i| *i != best).map(|i| cur_pi.mass(i)).collect();
            let next_pi = StationaryDistribution::from_weights(masses)?;
            let next_p = TransitionKernel::new(strategy.restrict(m, best))?;
            Some((next_pi, next_p))
        } else {
            None
        };
        out.push(Stage {
            states: states.clone(),
            pi: cur_pi.clone(),
            p: m.clone(),
            local: best,
            distance: score(best).abs(),
        });
        match next {
            Some((np, nk)) => {
                cur_pi = np;
                cur_p = nk;
                states = next_states;
            }
            None => break,
        }
    }
    Ok(out)
}

/// Peels one state per level, each time the singleton minimising
/// `(P_i(x,x) − π_i(x)) / (1 − π_i(x))`. Returns `n − 1` levels.
pub fn recursive_singleton(
    p: &TransitionKernel,
    pi: &StationaryDistribution,
    strategy: &dyn RestrictionStrategy,
) -> Result<Vec<RecursiveLevel>> {
    Ok(stages(p, pi, strategy)?
        .into_iter()
        .enumerate()
        .map(|(level, st)| RecursiveLevel {
            level,
            state: st.states[st.local],
            pi_mass: st.pi.mass(st.local),
            distance: st.distance,
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct AlAudit {
    pub level: usize,
    pub l: u32,
    /// `‖A_l P_i A_l − Π_i‖`.
    pub lhs: f64,
    /// `2‖(G P_{i+1} G)^l − Π_{i+1}‖ + ‖G P_i G − Π_i‖`.
    pub rhs: f64,
    pub holds: bool,
}

fn singleton_gpg(p: &Matrix, pi: &StationaryDistribution, x: usize) -> Matrix {
    let n = p.nrows();
    let g = Matrix::from_fn(n, n, |a, b| {
        let same = (a == x) == (b == x);
        if !same {
            0.0
        } else if a == x {
            1.0
        } else {
            pi.mass(b) / (1.0 - pi.mass(x))
        }
    });
    &g * p * &g
}

/// Checks the two-level composition bound at every level that has a
/// successor with at least two states.
pub fn a_l_audit(
    p: &TransitionKernel,
    pi: &StationaryDistribution,
    strategy: &dyn RestrictionStrategy,
    l: u32,
) -> Result<Vec<AlAudit>> {
    let st = stages(p, pi, strategy)?;
    let mut out = Vec::new();
    for i in 0..st.len().saturating_sub(1) {
        let (cur, next) = (&st[i], &st[i + 1]);
        let b = power(&singleton_gpg(&next.p, &next.pi, next.local), l);
        let n = cur.p.nrows();
        let keep: Vec<usize> = (0..n).filter(|x| *x != cur.local).collect();
        let mut a = Matrix::zeros(n, n);
        a[(cur.local, cur.local)] = 1.0;
        for (r, &x) in keep.iter().enumerate() {
            for (c, &y) in keep.iter().enumerate() {
                a[(x, y)] = b[(r, c)];
            }
        }
        let lhs = distance_to_pi_sq(&(&a * &cur.p * &a), &cur.pi)?.max(0.0).sqrt();
        let rhs = 2.0 * distance_to_pi_sq(&b, &next.pi)?.max(0.0).sqrt() + cur.distance;
        out.push(AlAudit {
            level: i,
            l,
            lhs,
            rhs,
            holds: lhs <= rhs + 1e-10,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::random_reversible;
    use crate::objectives::frob_gpg_norm;
    use crate::partitions::CutSet;

    #[test]
    fn restriction_preserves_reversibility_and_psd() {
        for seed in 0..10 {
            let (p, pi) = random_reversible(6, seed, true).unwrap();
            let r = MetropolisLazyRestriction.restrict(p.matrix(), 2);
            let k = TransitionKernel::new(r).unwrap();
            let w: Vec<f64> = [0, 1, 3, 4, 5].iter().map(|x| pi.mass(*x)).collect();
            let pi2 = StationaryDistribution::from_weights(w).unwrap();
            assert!(k.is_reversible(&pi2, 1e-12));
            assert!(eigenvalues_reversible(&k, &pi2).unwrap().min_eigenvalue() >= -1e-12);
        }
    }

    #[test]
    fn levels_pick_the_best_singleton() {
        let (p, pi) = random_reversible(7, 4, true).unwrap();
        let levels = recursive_singleton(&p, &pi, &MetropolisLazyRestriction).unwrap();
        assert_eq!(levels.len(), 6);
        let mut seen: Vec<usize> = levels.iter().map(|l| l.state).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 6);
        let first = &levels[0];
        for x in 0..7 {
            let cut = CutSet::from_states(&[x], &pi).unwrap();
            assert!(first.distance <= frob_gpg_norm(&cut, &p, &pi, 1).unwrap() + 1e-12);
        }
        let cut = CutSet::from_states(&[first.state], &pi).unwrap();
        assert!((first.distance - frob_gpg_norm(&cut, &p, &pi, 1).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn audit_holds() {
        for seed in 0..10 {
            let (p, pi) = random_reversible(6, seed, true).unwrap();
            for l in [1, 3] {
                let audit = a_l_audit(&p, &pi, &MetropolisLazyRestriction, l).unwrap();
                assert_eq!(audit.len(), 4);
                assert!(audit.iter().all(|a| a.holds), "{audit:?}");
            }
        }
    }

    #[test]
    fn rejects_non_psd() {
        let flip = TransitionKernel::from_rows(&[vec![0.1, 0.9], vec![0.9, 0.1]]).unwrap();
        let pi = StationaryDistribution::uniform(2).unwrap();
        assert!(matches!(
            recursive_singleton(&flip, &pi, &MetropolisLazyRestriction),
            Err(Error::NotPositiveSemidefinite(_))
        ));
    }
}
