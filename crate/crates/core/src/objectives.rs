//! Distances and divergences to stationarity, and their closed forms on cuts.
//!
//! Natural logarithms throughout. For a cut `S` and a π-stationary `Q` the
//! basic quantities are the cross flow `Σ_{x∈S, y∈S'} π(x)Q(x,y)` and
//!
//! - `g(S,Q) = flow / (π(S)π(S'))`
//! - `h(S,Q) = flow / π(S)`
//!
//! in terms of which, for reversible `P`,
//! `‖G_S P − Π‖² = 1 − g(S,P²)` and `‖(G_S P G_S)^l − Π‖² = (1 − g(S,P))^{2l}`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chain::{check_dim, distance_to_pi_sq, power, Matrix, StationaryDistribution, TransitionKernel};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::partitions::{
    averaged_kernels, cut_masks, project_matrix, CutSet, OrbitPartition, StateSet,
};

/// `t log t` with `0 log 0 = 0`.
#[inline]
pub fn xlogx(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t * t.ln()
    }
}

/// `D^π_KL(P‖Q) = Σ π(x)P(x,y) log(P(x,y)/Q(x,y))`; `+∞` when `P ≪ Q` fails.
pub fn kl_kernels(p: &TransitionKernel, q: &TransitionKernel, pi: &StationaryDistribution) -> Result<f64> {
    kl_matrices(p.matrix(), q.matrix(), pi)
}

pub fn kl_matrices(p: &Matrix, q: &Matrix, pi: &StationaryDistribution) -> Result<f64> {
    check_dim(pi.len(), p.nrows())?;
    check_dim(p.nrows(), q.nrows())?;
    check_dim(p.ncols(), q.ncols())?;
    let mut total = 0.0;
    for x in 0..p.nrows() {
        let mut row = 0.0;
        for y in 0..p.ncols() {
            let a = p[(x, y)];
            if a <= 0.0 {
                continue;
            }
            let b = q[(x, y)];
            if b <= 0.0 {
                return Ok(f64::INFINITY);
            }
            row += a * (a / b).ln();
        }
        total += pi.mass(x) * row;
    }
    Ok(total.max(0.0))
}

/// `D^π_KL(M‖Π)`.
pub fn kl_to_pi(m: &Matrix, pi: &StationaryDistribution) -> Result<f64> {
    check_dim(pi.len(), m.nrows())?;
    check_dim(pi.len(), m.ncols())?;
    let mut total = 0.0;
    for x in 0..m.nrows() {
        let mut row = 0.0;
        for y in 0..m.ncols() {
            let a = m[(x, y)];
            if a > 0.0 {
                row += a * (a / pi.mass(y)).ln();
            }
        }
        total += pi.mass(x) * row;
    }
    Ok(total.max(0.0))
}

pub fn entropy(pi: &StationaryDistribution) -> f64 {
    entropy_of(pi.masses())
}

pub fn entropy_of(masses: &[f64]) -> f64 {
    -masses.iter().map(|&m| xlogx(m)).sum::<f64>()
}

/// `H(s, 1 − s)`.
pub fn binary_entropy(s: f64) -> f64 {
    -(xlogx(s) + xlogx(1.0 - s))
}

/// `H_π(P) = −Σ π(x)P(x,y) log P(x,y)`.
pub fn entropy_rate(p: &TransitionKernel, pi: &StationaryDistribution) -> Result<f64> {
    check_dim(pi.len(), p.n())?;
    let m = p.matrix();
    let mut total = 0.0;
    for x in 0..m.nrows() {
        let row: f64 = m.row(x).iter().map(|&v| xlogx(v)).sum();
        total -= pi.mass(x) * row;
    }
    Ok(total)
}

/// `Σ_{x∈S, y∉S} π(x)Q(x,y)` with `S` given as a membership vector.
pub fn cut_flow_indicator(in_s: &[bool], q: &Matrix, pi: &[f64]) -> f64 {
    let n = in_s.len();
    let mut flow = 0.0;
    for x in 0..n {
        if !in_s[x] {
            continue;
        }
        let mut row = 0.0;
        for y in 0..n {
            if !in_s[y] {
                row += q[(x, y)];
            }
        }
        flow += pi[x] * row;
    }
    flow
}

pub fn cut_flow(cut: &CutSet, q: &Matrix, pi: &StationaryDistribution) -> Result<f64> {
    check_dim(pi.len(), cut.n())?;
    check_dim(pi.len(), q.nrows())?;
    Ok(cut_flow_indicator(&cut.indicator(), q, pi.masses()))
}

pub fn g_functional(cut: &CutSet, q: &TransitionKernel, pi: &StationaryDistribution) -> Result<f64> {
    let s = cut.pi_mass();
    Ok(cut_flow(cut, q.matrix(), pi)? / (s * (1.0 - s)))
}

pub fn h_functional(cut: &CutSet, q: &TransitionKernel, pi: &StationaryDistribution) -> Result<f64> {
    Ok(cut_flow(cut, q.matrix(), pi)? / cut.pi_mass())
}

/// `f(S) = ‖G_S P − Π‖²_{F,π} = 1 − g(S,P²)`.
pub fn frob_gp_objective(cut: &CutSet, p: &TransitionKernel, pi: &StationaryDistribution) -> Result<f64> {
    p.require_reversible(pi)?;
    let p2 = p.compose(p);
    Ok(1.0 - g_functional(cut, &p2, pi)?)
}

/// `‖(G_S P G_S)^l − Π‖²_{F,π} = (1 − g(S,P))^{2l}`.
pub fn frob_gpg_objective(
    cut: &CutSet,
    p: &TransitionKernel,
    pi: &StationaryDistribution,
    l: u32,
) -> Result<f64> {
    p.require_reversible(pi)?;
    let lambda = 1.0 - g_functional(cut, p, pi)?;
    Ok(lambda.powi(2 * l as i32))
}

/// Unsquared `‖(G_S P G_S)^l − Π‖_{F,π} = |1 − g(S,P)|^l`.
pub fn frob_gpg_norm(cut: &CutSet, p: &TransitionKernel, pi: &StationaryDistribution, l: u32) -> Result<f64> {
    Ok(frob_gpg_objective(cut, p, pi, l)?.sqrt())
}

fn require_nondegenerate(x: usize, pi: &StationaryDistribution) -> Result<f64> {
    if x >= pi.len() {
        return Err(Error::DimensionMismatch {
            expected: pi.len(),
            got: x + 1,
        });
    }
    let m = pi.mass(x);
    if 1.0 - m <= 0.0 {
        return Err(Error::Degenerate(format!("state {x} carries all the mass")));
    }
    Ok(m)
}

/// `(1 − P²(x,x)) / (1 − π(x))`, the value of `g({x}, P²)`.
pub fn singleton_gp_score(x: usize, p: &TransitionKernel, pi: &StationaryDistribution) -> Result<f64> {
    check_dim(pi.len(), p.n())?;
    let m = require_nondegenerate(x, pi)?;
    let row = p.matrix().row(x);
    let col = p.matrix().column(x);
    let p2xx = row.dot(&col.transpose());
    Ok((1.0 - p2xx) / (1.0 - m))
}

/// `((P(x,x) − π(x)) / (1 − π(x)))²`, the value of `‖G_{x}PG_{x} − Π‖²`.
pub fn singleton_gpg_score(x: usize, p: &TransitionKernel, pi: &StationaryDistribution) -> Result<f64> {
    check_dim(pi.len(), p.n())?;
    let m = require_nondegenerate(x, pi)?;
    Ok(((p.get(x, x) - m) / (1.0 - m)).powi(2))
}

#[derive(Debug, Clone, Serialize)]
pub struct CheegerReport {
    /// `Φ*(P)`: minimum of `flow/π(S)` over `0 < π(S) ≤ 1/2`.
    pub classical: f64,
    /// `φ*(P)`: minimum of `flow/(π(S)π(S'))` over all non-trivial cuts.
    pub symmetrised: f64,
    pub classical_cut: CutSet,
    pub symmetrised_cut: CutSet,
}

pub fn cheeger_constants(p: &TransitionKernel, pi: &StationaryDistribution) -> Result<CheegerReport> {
    check_dim(pi.len(), p.n())?;
    p.require_stationary(pi)?;
    let n = pi.len();
    let mut classical = (f64::INFINITY, 0u64);
    let mut symmetrised = (f64::INFINITY, 0u64);
    let mut in_s = vec![false; n];
    for mask in cut_masks(n, true)? {
        for (x, b) in in_s.iter_mut().enumerate() {
            *b = mask >> x & 1 == 1;
        }
        let s: f64 = (0..n).filter(|&x| in_s[x]).map(|x| pi.mass(x)).sum();
        let flow = cut_flow_indicator(&in_s, p.matrix(), pi.masses());
        let g = flow / (s * (1.0 - s));
        if g < symmetrised.0 {
            symmetrised = (g, mask);
        }
        let full = (1u64 << n) - 1;
        for (mass, m) in [(s, mask), (1.0 - s, full ^ mask)] {
            if mass <= 0.5 {
                let v = flow / mass;
                if v < classical.0 {
                    classical = (v, m);
                }
            }
        }
    }
    Ok(CheegerReport {
        classical: classical.0,
        symmetrised: symmetrised.0,
        classical_cut: CutSet::from_mask(n, classical.1, pi)?,
        symmetrised_cut: CutSet::from_mask(n, symmetrised.1, pi)?,
    })
}

/// Log-Sobolev constant `α(P̄²)` of a reversible two-state projection chain.
///
/// The states are reordered internally so the smaller mass comes first.
/// Within `1e-9` of equal masses the analytic limit `P̄²(1,2)` is used.
pub fn log_sobolev_two_state(pbar: &TransitionKernel, pibar: &StationaryDistribution) -> Result<f64> {
    if pbar.n() != 2 || pibar.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: pbar.n().max(pibar.len()),
        });
    }
    let sq = pbar.matrix() * pbar.matrix();
    let (small, large) = if pibar.mass(0) <= pibar.mass(1) { (0, 1) } else { (1, 0) };
    let s = pibar.mass(small);
    let sc = pibar.mass(large);
    let cross = sq[(small, large)];
    if (s - 0.5).abs() < 1e-9 {
        return Ok(cross);
    }
    Ok(cross * (1.0 - 2.0 * s) / (sc * (sc / s).ln()))
}

/// Variational log-Sobolev constant
/// `α(K) = min ⟨(I−K)f,f⟩_π / 𝓛(f)` over positive `f`, by gradient descent on
/// `log f` from `starts` random initial points. Heuristic: the result is an
/// upper estimate of the true minimum.
pub fn log_sobolev_variational(
    k: &TransitionKernel,
    pi: &StationaryDistribution,
    starts: usize,
    seed: u64,
) -> Result<f64> {
    check_dim(pi.len(), k.n())?;
    k.require_reversible(pi)?;
    let n = pi.len();
    let w = pi.masses();
    let km = k.matrix();

    let eval = |u: &[f64]| -> Option<(f64, Vec<f64>)> {
        let f: Vec<f64> = u.iter().map(|v| v.exp()).collect();
        let norm: f64 = (0..n).map(|x| w[x] * f[x] * f[x]).sum();
        let kf: Vec<f64> = (0..n).map(|x| (0..n).map(|y| km[(x, y)] * f[y]).sum()).collect();
        let energy: f64 = (0..n).map(|x| w[x] * f[x] * (f[x] - kf[x])).sum();
        let logs: Vec<f64> = (0..n).map(|x| (f[x] * f[x] / norm).ln()).collect();
        let ent: f64 = (0..n).map(|x| w[x] * f[x] * f[x] * logs[x]).sum();
        if ent <= 1e-14 * norm {
            return None;
        }
        let r = energy / ent;
        let grad = (0..n)
            .map(|x| {
                let de = 2.0 * w[x] * (f[x] - kf[x]);
                let dl = 2.0 * w[x] * f[x] * logs[x];
                f[x] * (de - r * dl) / ent
            })
            .collect();
        Some((r, grad))
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for _ in 0..starts {
        let mut u: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let Some((mut r, mut g)) = eval(&u) else { continue };
        let mut step = 1.0;
        for _ in 0..2000 {
            let mut improved = false;
            while step > 1e-14 {
                let trial: Vec<f64> = u.iter().zip(&g).map(|(a, b)| a - step * b).collect();
                if let Some((rt, gt)) = eval(&trial) {
                    if rt < r {
                        let gain = r - rt;
                        u = trial;
                        r = rt;
                        g = gt;
                        step *= 2.0;
                        improved = gain > 1e-15 * r.abs().max(1e-300);
                        break;
                    }
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        best = best.min(r);
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::Degenerate("log-Sobolev functional never defined".into()))
    }
}

/// `(1 − α(P̄²))^l H(π̄)`, an upper bound on `D_KL((GPG)^l‖Π)`.
pub fn kl_decay_bound(
    p: &TransitionKernel,
    partition: &OrbitPartition,
    pi: &StationaryDistribution,
    l: u32,
) -> Result<f64> {
    p.require_reversible(pi)?;
    let (pbar, pibar) = crate::partitions::projection_chain(p, partition, pi)?;
    let alpha = if partition.k() == 2 {
        log_sobolev_two_state(&pbar, &pibar)?
    } else if partition.k() == 1 {
        return Ok(0.0);
    } else {
        let sq = pbar.compose(&pbar);
        log_sobolev_variational(&sq, &pibar, 20, 0)?
    };
    Ok((1.0 - alpha).powi(l as i32) * entropy(&pibar))
}

/// Values in the chains
/// `D((GPG)^l) ≤ D((PG)^l) = D((GP)^l) ≤ D((GPG)^{l−1})`
/// for a divergence or norm `D` to `Π`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SandwichReport {
    pub gpg_l: f64,
    pub pg_l: f64,
    pub gp_l: f64,
    pub gpg_l_minus_1: Option<f64>,
}

impl SandwichReport {
    fn verify(self, slack: f64, what: &str) -> Result<Self> {
        let mut ok = self.gpg_l <= self.pg_l + slack
            && (self.pg_l - self.gp_l).abs() <= slack.max(1e-10 * self.pg_l.abs());
        if let Some(u) = self.gpg_l_minus_1 {
            ok &= self.pg_l <= u + slack;
        }
        if ok {
            Ok(self)
        } else {
            Err(Error::InequalityViolated(format!("{what} sandwich: {self:?}")))
        }
    }
}

fn averaged_powers(
    p: &TransitionKernel,
    partition: &OrbitPartition,
    pi: &StationaryDistribution,
    l: u32,
) -> Result<(Matrix, Matrix, Matrix, Matrix)> {
    p.require_reversible(pi)?;
    let avg = averaged_kernels(p, partition, pi)?;
    Ok((
        power(avg.gpg.matrix(), l),
        power(avg.pg.matrix(), l),
        power(avg.gp.matrix(), l),
        power(avg.gpg.matrix(), l.saturating_sub(1)),
    ))
}

/// KL chain, `l ≥ 2`.
pub fn kl_sandwich(
    p: &TransitionKernel,
    partition: &OrbitPartition,
    pi: &StationaryDistribution,
    l: u32,
) -> Result<SandwichReport> {
    if l < 2 {
        return Err(Error::Config("the KL sandwich needs l >= 2".into()));
    }
    let (a, b, c, d) = averaged_powers(p, partition, pi, l)?;
    SandwichReport {
        gpg_l: kl_to_pi(&a, pi)?,
        pg_l: kl_to_pi(&b, pi)?,
        gp_l: kl_to_pi(&c, pi)?,
        gpg_l_minus_1: Some(kl_to_pi(&d, pi)?),
    }
    .verify(Tolerances::DEFAULT.identity, "KL")
}

/// Unsquared Frobenius chain; the upper end is present for `l ≥ 2`.
pub fn frobenius_sandwich(
    p: &TransitionKernel,
    partition: &OrbitPartition,
    pi: &StationaryDistribution,
    l: u32,
) -> Result<SandwichReport> {
    if l < 1 {
        return Err(Error::Config("the Frobenius sandwich needs l >= 1".into()));
    }
    let (a, b, c, d) = averaged_powers(p, partition, pi, l)?;
    SandwichReport {
        gpg_l: distance_to_pi_sq(&a, pi)?.max(0.0).sqrt(),
        pg_l: distance_to_pi_sq(&b, pi)?.max(0.0).sqrt(),
        gp_l: distance_to_pi_sq(&c, pi)?.max(0.0).sqrt(),
        gpg_l_minus_1: if l >= 2 {
            Some(distance_to_pi_sq(&d, pi)?.max(0.0).sqrt())
        } else {
            None
        },
    }
    .verify(Tolerances::DEFAULT.identity, "Frobenius")
}

/// Both sandwiches at once.
pub fn sandwich_check(
    p: &TransitionKernel,
    partition: &OrbitPartition,
    pi: &StationaryDistribution,
    l: u32,
) -> Result<(SandwichReport, SandwichReport)> {
    Ok((kl_sandwich(p, partition, pi, l)?, frobenius_sandwich(p, partition, pi, l)?))
}

/// Two-state projection `(P̄, π̄)` of a cut from its cross flow.
pub fn two_state_projection(s: f64, flow: f64) -> (DMatrix<f64>, [f64; 2]) {
    let a = flow / s;
    let b = flow / (1.0 - s);
    (DMatrix::from_row_slice(2, 2, &[1.0 - a, a, b, 1.0 - b]), [s, 1.0 - s])
}

/// `D_KL((G_S P G_S)^l‖Π) = D_KL(P̄^l‖Π̄)` from the cut flow alone.
pub fn kl_gpg_closed_form(s: f64, flow: f64, l: u32) -> f64 {
    let (pbar, pibar) = two_state_projection(s, flow);
    let m = power(&pbar, l);
    let mut total = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let v = m[(i, j)];
            if v > 0.0 {
                total += pibar[i] * v * (v / pibar[j]).ln();
            }
        }
    }
    total.max(0.0)
}

/// `D_KL(G_S P G_S‖Π)` for a reversible `P`.
pub fn kl_gpg_objective(cut: &CutSet, p: &TransitionKernel, pi: &StationaryDistribution, l: u32) -> Result<f64> {
    p.require_stationary(pi)?;
    Ok(kl_gpg_closed_form(cut.pi_mass(), cut_flow(cut, p.matrix(), pi)?, l))
}

/// `D_KL(P G_S‖Π)` through the projection of each row onto the cut.
pub fn kl_pg_objective(cut: &CutSet, p: &TransitionKernel, pi: &StationaryDistribution) -> Result<f64> {
    check_dim(pi.len(), cut.n())?;
    p.require_stationary(pi)?;
    let partition = OrbitPartition::from_cut(cut, pi)?;
    let m = project_rows(p.matrix(), &partition);
    let s = cut.pi_mass();
    let mut total = 0.0;
    for x in 0..pi.len() {
        let a = m[(x, 0)];
        let b = m[(x, 1)];
        total += pi.mass(x) * (xlogx(a) - a * s.ln() + xlogx(b) - b * (1.0 - s).ln());
    }
    Ok(total.max(0.0))
}

/// Row masses `P(x, 𝒪_j)` as an `n × k` matrix.
pub(crate) fn project_rows(m: &Matrix, partition: &OrbitPartition) -> Matrix {
    let mut out = Matrix::zeros(m.nrows(), partition.k());
    for x in 0..m.nrows() {
        for y in 0..m.ncols() {
            out[(x, partition.block_of(y))] += m[(x, y)];
        }
    }
    out
}

/// Every objective for one cut, evaluated through the closed forms.
#[derive(Debug, Clone, Serialize)]
pub struct ObjectiveReport {
    pub cut: CutSet,
    pub kl_gpg: f64,
    pub kl_pg: f64,
    /// `‖G_S P − Π‖²_{F,π}`.
    pub frob_gp_sq: f64,
    /// `‖G_S P G_S − Π‖²_{F,π}`.
    pub frob_gpg_sq: f64,
    /// `‖G_S P G_S − Π‖_{F,π}` (unsquared).
    pub frob_gpg: f64,
    /// `g(S,P)`.
    pub g_value: f64,
    /// `g(S,P²)`.
    pub g_p2_value: f64,
    /// `h(S,P²)`.
    pub h_value: f64,
}

impl ObjectiveReport {
    pub fn evaluate(cut: &CutSet, p: &TransitionKernel, pi: &StationaryDistribution) -> Result<Self> {
        p.require_reversible(pi)?;
        let p2 = p.compose(p);
        let s = cut.pi_mass();
        let flow = cut_flow(cut, p.matrix(), pi)?;
        let flow2 = cut_flow(cut, p2.matrix(), pi)?;
        let g = flow / (s * (1.0 - s));
        let g2 = flow2 / (s * (1.0 - s));
        Ok(Self {
            cut: cut.clone(),
            kl_gpg: kl_gpg_closed_form(s, flow, 1),
            kl_pg: kl_pg_objective(cut, p, pi)?,
            frob_gp_sq: 1.0 - g2,
            frob_gpg_sq: (1.0 - g).powi(2),
            frob_gpg: (1.0 - g).abs(),
            g_value: g,
            g_p2_value: g2,
            h_value: flow2 / s,
        })
    }

    pub const CSV_HEADER: &'static str =
        "mask,pi_mass,kl_gpg,kl_pg,frob_gp_sq,frob_gpg_sq,frob_gpg,g,g_p2,h_p2";

    pub fn csv_row(&self) -> String {
        let vals = [
            self.cut.pi_mass(),
            self.kl_gpg,
            self.kl_pg,
            self.frob_gp_sq,
            self.frob_gpg_sq,
            self.frob_gpg,
            self.g_value,
            self.g_p2_value,
            self.h_value,
        ];
        let mut row = self.cut.to_hex();
        for v in vals {
            row.push_str(&format!(",{v:.17e}"));
        }
        row
    }
}

/// Two-block partition helper for callers holding a raw set.
pub fn cut_partition(set: &StateSet, pi: &StationaryDistribution) -> Result<OrbitPartition> {
    OrbitPartition::from_cut(&CutSet::new(set.clone(), pi)?, pi)
}

/// `D_KL^{π̄}(P̄^l‖Π̄)` for any partition.
pub fn kl_projection(
    p: &TransitionKernel,
    partition: &OrbitPartition,
    pi: &StationaryDistribution,
    l: u32,
) -> Result<f64> {
    p.require_stationary(pi)?;
    let pbar = project_matrix(p.matrix(), partition, pi);
    let pibar = partition.projected_distribution()?;
    kl_to_pi(&power(&pbar, l), &pibar)
}
