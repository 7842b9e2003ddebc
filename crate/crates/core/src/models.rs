//! Benchmark chains: Curie–Weiss Gibbs measures with Glauber dynamics, the lazy
//! hypercube walk, and seeded random reversible ensembles.
//!
//! Spin configurations of `d` sites are indexed by integers in `0..2^d`; bit
//! `i` set means site `i` carries spin `+1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{Matrix, StationaryDistribution, TransitionKernel};
use crate::error::{Error, Result};
use crate::partitions::{CutSet, StateSet};

pub const MAX_SPINS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurieWeissParams {
    pub d: usize,
    #[serde(rename = "T")]
    pub temperature: f64,
    #[serde(rename = "h")]
    pub field: f64,
}

impl CurieWeissParams {
    pub fn new(d: usize, temperature: f64, field: f64) -> Result<Self> {
        let p = Self {
            d,
            temperature,
            field,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d > MAX_SPINS {
            return Err(Error::Config(format!("d must be in 1..={MAX_SPINS}, got {}", self.d)));
        }
        if !(self.temperature > 0.0) || !self.temperature.is_finite() {
            return Err(Error::Config(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        if !self.field.is_finite() {
            return Err(Error::Config("field must be finite".into()));
        }
        Ok(())
    }

    pub fn n_states(&self) -> usize {
        1 << self.d
    }
}

#[inline]
pub fn spin(state: usize, i: usize) -> f64 {
    if state >> i & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// `m_x = Σ_i x^i`.
pub fn magnetisation(state: usize, d: usize) -> i32 {
    2 * (state.count_ones() as i32) - d as i32
}

/// `H(x) = −Σ_{i,j} 2^{−|i−j|} x^i x^j − h Σ_i x^i`, diagonal terms included.
pub fn curie_weiss_hamiltonian(params: &CurieWeissParams, state: usize) -> f64 {
    let d = params.d;
    let mut interaction = 0.0;
    for i in 0..d {
        for j in 0..d {
            let c = 0.5f64.powi((i as i32 - j as i32).abs());
            interaction += c * spin(state, i) * spin(state, j);
        }
    }
    let m: f64 = (0..d).map(|i| spin(state, i)).sum();
    -interaction - params.field * m
}

pub fn curie_weiss_pi(params: &CurieWeissParams) -> Result<StationaryDistribution> {
    params.validate()?;
    let logw: Vec<f64> = (0..params.n_states())
        .map(|x| -curie_weiss_hamiltonian(params, x) / params.temperature)
        .collect();
    let max = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|l| (l - max).exp()).collect();
    StationaryDistribution::from_weights(w)
}

/// Single-site Metropolis chain:
/// `P(x, x^{(i)}) = (1/d) exp(−(H(x^{(i)}) − H(x))_+ / T)`, residual on the
/// diagonal.
pub fn glauber_kernel(params: &CurieWeissParams) -> Result<TransitionKernel> {
    params.validate()?;
    let n = params.n_states();
    let d = params.d;
    let energy: Vec<f64> = (0..n).map(|x| curie_weiss_hamiltonian(params, x)).collect();
    let mut m = Matrix::zeros(n, n);
    for x in 0..n {
        let mut off = 0.0;
        for i in 0..d {
            let y = x ^ (1 << i);
            let delta = (energy[y] - energy[x]).max(0.0);
            let v = (-delta / params.temperature).exp() / d as f64;
            m[(x, y)] = v;
            off += v;
        }
        m[(x, x)] = 1.0 - off;
    }
    TransitionKernel::new(m)
}

/// `(P + I)/2`.
pub fn lazify(p: &TransitionKernel) -> TransitionKernel {
    let n = p.n();
    let m = (p.matrix() + Matrix::identity(n, n)) * 0.5;
    TransitionKernel::from_matrix_unchecked(m)
}

/// Lazy simple random walk on `{−1,+1}^d`, uniform `π`, and the cut
/// `S = {x : x(1) = −1}` (bit 0 clear).
pub fn hypercube_lazy_walk(d: usize) -> Result<(TransitionKernel, StationaryDistribution, CutSet)> {
    if !(3..=MAX_SPINS).contains(&d) {
        return Err(Error::Config(format!("hypercube dimension must be in 3..={MAX_SPINS}, got {d}")));
    }
    let n = 1usize << d;
    let mut m = Matrix::zeros(n, n);
    for x in 0..n {
        m[(x, x)] = 0.5;
        for i in 0..d {
            m[(x, x ^ (1 << i))] = 0.5 / d as f64;
        }
    }
    let pi = StationaryDistribution::uniform(n)?;
    let mut s = StateSet::empty(n);
    for x in (0..n).filter(|x| x & 1 == 0) {
        s.insert(x);
    }
    let cut = CutSet::new(s, &pi)?;
    Ok((TransitionKernel::new(m)?, pi, cut))
}

/// Random reversible pair `(P, π)`.
///
/// `π` is a normalised vector of `Exp(1)` draws and
/// `P(x,y) = c·π(y)·u(x,y)` off the diagonal with `u` symmetric in `(0,1)`,
/// raised to a random power for variety, and `c` the largest scale keeping
/// every row substochastic. The diagonal takes the residual mass.
pub fn random_reversible(
    n: usize,
    seed: u64,
    positive_semidefinite: bool,
) -> Result<(TransitionKernel, StationaryDistribution)> {
    if n < 2 {
        return Err(Error::Config(format!("need at least two states, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-3).collect();
    let pi = StationaryDistribution::from_weights(w)?;
    let exponent = [1.0, 2.0, 4.0][rng.random_range(0..3)];
    let mut u = Matrix::zeros(n, n);
    for x in 0..n {
        for y in x + 1..n {
            let v = rng.random::<f64>().powf(exponent);
            u[(x, y)] = v;
            u[(y, x)] = v;
        }
    }
    let max_row = (0..n)
        .map(|x| (0..n).filter(|&y| y != x).map(|y| pi.mass(y) * u[(x, y)]).sum::<f64>())
        .fold(0.0, f64::max);
    let scale = if max_row > 0.0 {
        rng.random_range(0.5..1.0) / max_row
    } else {
        0.0
    };
    let mut m = Matrix::zeros(n, n);
    for x in 0..n {
        let mut off = 0.0;
        for y in 0..n {
            if y != x {
                let v = scale * pi.mass(y) * u[(x, y)];
                m[(x, y)] = v;
                off += v;
            }
        }
        m[(x, x)] = (1.0 - off).max(0.0);
    }
    let p = TransitionKernel::new(m)?;
    Ok((if positive_semidefinite { lazify(&p) } else { p }, pi))
}

/// `π`-mass aggregated by magnetisation level, in increasing `m`.
pub fn magnetisation_levels(d: usize, weights: &[f64]) -> Vec<(i32, f64)> {
    let mut out: Vec<(i32, f64)> = (0..=d).map(|k| (2 * k as i32 - d as i32, 0.0)).collect();
    for (x, w) in weights.iter().enumerate() {
        out[x.count_ones() as usize].1 += w;
    }
    out
}

/// Serialisable model description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelDescriptor {
    CurieWeiss {
        d: usize,
        #[serde(rename = "T")]
        temperature: f64,
        #[serde(rename = "h")]
        field: f64,
        #[serde(default)]
        lazy: bool,
    },
    Hypercube {
        d: usize,
    },
}

impl ModelDescriptor {
    pub fn build(&self) -> Result<(TransitionKernel, StationaryDistribution)> {
        match *self {
            ModelDescriptor::CurieWeiss {
                d,
                temperature,
                field,
                lazy,
            } => {
                let params = CurieWeissParams::new(d, temperature, field)?;
                let p = glauber_kernel(&params)?;
                Ok((if lazy { lazify(&p) } else { p }, curie_weiss_pi(&params)?))
            }
            ModelDescriptor::Hypercube { d } => {
                let (p, pi, _) = hypercube_lazy_walk(d)?;
                Ok((p, pi))
            }
        }
    }
}
