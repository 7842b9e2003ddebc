//! π-weighted linear algebra on finite state spaces.
//!
//! Kernels are dense row-stochastic matrices. The π-adjoint of a matrix `M`
//! is `M*(x, y) = π(y) M(y, x) / π(x)`, and the Frobenius inner product is
//! `⟨M, N⟩ = Tr(M* N)`. The stationary projector `Π` (every row equal to
//! `π`) is only materialised on request.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::config::{Tolerances, MAX_STATES};
use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

/// Strictly positive probability vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryDistribution {
    masses: Vec<f64>,
}

impl StationaryDistribution {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::InvalidDistribution("empty state space".into()));
        }
        if masses.len() > MAX_STATES {
            return Err(Error::TooLarge {
                n: masses.len(),
                limit: MAX_STATES,
            });
        }
        if let Some((x, m)) = masses
            .iter()
            .enumerate()
            .find(|(_, m)| !(m.is_finite() && **m > 0.0))
        {
            return Err(Error::InvalidDistribution(format!(
                "mass at state {x} is {m}, expected strictly positive"
            )));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > Tolerances::DEFAULT.construction {
            return Err(Error::InvalidDistribution(format!(
                "masses sum to {total}, expected 1"
            )));
        }
        Ok(Self { masses })
    }

    /// Normalises non-negative weights into a distribution.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}"
            )));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, x: usize) -> f64 {
        self.masses[x]
    }

    /// The rank-one kernel `Π` whose rows all equal `π`.
    pub fn projector(&self) -> TransitionKernel {
        let n = self.len();
        TransitionKernel {
            entries: Matrix::from_fn(n, n, |_, y| self.masses[y]),
        }
    }

    pub fn min_mass(&self) -> f64 {
        self.masses.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Row-stochastic square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionKernel {
    entries: Matrix,
}

impl TransitionKernel {
    pub fn new(entries: Matrix) -> Result<Self> {
        Self::with_tolerance(entries, Tolerances::DEFAULT.construction)
    }

    /// Validates with a caller-chosen row-sum tolerance. Products of many
    /// kernels accumulate rounding and are checked against the identity
    /// tolerance instead.
    pub fn with_tolerance(entries: Matrix, tol: f64) -> Result<Self> {
        let (r, c) = entries.shape();
        if r != c {
            return Err(Error::InvalidKernel(format!("matrix is {r}x{c}")));
        }
        if r == 0 {
            return Err(Error::InvalidKernel("empty matrix".into()));
        }
        if r > MAX_STATES {
            return Err(Error::TooLarge {
                n: r,
                limit: MAX_STATES,
            });
        }
        for x in 0..r {
            let row = entries.row(x);
            if let Some(v) = row
                .iter()
                .find(|v| !v.is_finite() || **v < -tol || **v > 1.0 + tol)
            {
                return Err(Error::InvalidKernel(format!(
                    "entry {v} in row {x} outside [0, 1]"
                )));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > tol {
                return Err(Error::InvalidKernel(format!("row {x} sums to {s}")));
            }
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidKernel("rows must have length n".into()));
        }
        Self::new(Matrix::from_fn(n, n, |x, y| rows[x][y]))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: Matrix::identity(n, n),
        }
    }

    pub(crate) fn from_matrix_unchecked(entries: Matrix) -> Self {
        Self { entries }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.entries
    }

    pub fn into_matrix(self) -> Matrix {
        self.entries
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.entries[(x, y)]
    }

    /// Kernel product `self · other`.
    pub fn compose(&self, other: &TransitionKernel) -> TransitionKernel {
        Self {
            entries: &self.entries * &other.entries,
        }
    }

    /// `max_y |(πP)(y) − π(y)|`.
    pub fn stationarity_defect(&self, pi: &StationaryDistribution) -> Result<f64> {
        check_dim(self.n(), pi.len())?;
        let n = self.n();
        let mut worst = 0.0_f64;
        for y in 0..n {
            let flow: f64 = (0..n).map(|x| pi.mass(x) * self.entries[(x, y)]).sum();
            worst = worst.max((flow - pi.mass(y)).abs());
        }
        Ok(worst)
    }

    /// `max_{x,y} |π(x)P(x,y) − π(y)P(y,x)|`.
    pub fn reversibility_defect(&self, pi: &StationaryDistribution) -> Result<f64> {
        check_dim(self.n(), pi.len())?;
        let n = self.n();
        let mut worst = 0.0_f64;
        for x in 0..n {
            for y in (x + 1)..n {
                let d = pi.mass(x) * self.entries[(x, y)] - pi.mass(y) * self.entries[(y, x)];
                worst = worst.max(d.abs());
            }
        }
        Ok(worst)
    }

    pub fn is_stationary(&self, pi: &StationaryDistribution, tol: f64) -> bool {
        self.stationarity_defect(pi).is_ok_and(|d| d <= tol)
    }

    pub fn is_reversible(&self, pi: &StationaryDistribution, tol: f64) -> bool {
        self.reversibility_defect(pi).is_ok_and(|d| d <= tol)
    }

    pub(crate) fn require_reversible(&self, pi: &StationaryDistribution) -> Result<()> {
        let d = self.reversibility_defect(pi)?;
        if d > Tolerances::DEFAULT.identity {
            return Err(Error::NotReversible(d));
        }
        Ok(())
    }

    pub(crate) fn require_stationary(&self, pi: &StationaryDistribution) -> Result<()> {
        let d = self.stationarity_defect(pi)?;
        if d > Tolerances::DEFAULT.identity {
            return Err(Error::NotStationary(d));
        }
        Ok(())
    }

    /// Row-major CSV with full-precision scientific floats.
    pub fn to_csv(&self) -> String {
        matrix_to_csv(&self.entries)
    }
}

impl AsRef<Matrix> for TransitionKernel {
    fn as_ref(&self) -> &Matrix {
        &self.entries
    }
}

/// Real spectrum of a reversible kernel, sorted non-increasing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
}

impl SpectrumReport {
    pub fn lambda2(&self) -> Option<f64> {
        self.eigenvalues.get(1).copied()
    }

    /// Right spectral gap `1 − λ₂`.
    pub fn spectral_gap(&self) -> Option<f64> {
        self.lambda2().map(|l| 1.0 - l)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::NAN)
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

fn check_square(m: &Matrix, n: usize) -> Result<()> {
    check_dim(n, m.nrows())?;
    check_dim(n, m.ncols())
}

/// `⟨f, g⟩_π = Σ_x f(x) g(x) π(x)`.
pub fn pi_inner_product(f: &[f64], g: &[f64], pi: &StationaryDistribution) -> Result<f64> {
    check_dim(pi.len(), f.len())?;
    check_dim(pi.len(), g.len())?;
    Ok(f.iter()
        .zip(g)
        .zip(pi.masses())
        .map(|((a, b), p)| a * b * p)
        .sum())
}

/// π-adjoint of an arbitrary square matrix.
pub fn raw_adjoint(m: &Matrix, pi: &StationaryDistribution) -> Result<Matrix> {
    let n = pi.len();
    check_square(m, n)?;
    Ok(Matrix::from_fn(n, n, |x, y| pi.mass(y) * m[(y, x)] / pi.mass(x)))
}

/// Time reversal `P*(x,y) = π(y)P(y,x)/π(x)` of a π-stationary kernel.
pub fn adjoint(p: &TransitionKernel, pi: &StationaryDistribution) -> Result<TransitionKernel> {
    p.require_stationary(pi)?;
    Ok(TransitionKernel::from_matrix_unchecked(raw_adjoint(
        p.matrix(),
        pi,
    )?))
}

/// `⟨M, N⟩_{F,π} = Tr(M* N) = Σ_{x,z} π(z)/π(x) · M(z,x) N(z,x)`.
pub fn frobenius_inner(m: &Matrix, n_mat: &Matrix, pi: &StationaryDistribution) -> Result<f64> {
    let n = pi.len();
    check_square(m, n)?;
    check_square(n_mat, n)?;
    let mut acc = 0.0;
    for z in 0..n {
        for x in 0..n {
            acc += pi.mass(z) / pi.mass(x) * m[(z, x)] * n_mat[(z, x)];
        }
    }
    Ok(acc)
}

/// `‖M − Π‖²_{F,π}` for an arbitrary square matrix.
pub fn distance_to_pi_sq(m: &Matrix, pi: &StationaryDistribution) -> Result<f64> {
    let n = pi.len();
    check_square(m, n)?;
    let mut acc = 0.0;
    for z in 0..n {
        for x in 0..n {
            let d = m[(z, x)] - pi.mass(x);
            acc += pi.mass(z) / pi.mass(x) * d * d;
        }
    }
    Ok(acc)
}

/// `‖P − Π‖²_{F,π}`.
pub fn frobenius_dist_to_pi(p: &TransitionKernel, pi: &StationaryDistribution) -> Result<f64> {
    distance_to_pi_sq(p.matrix(), pi)
}

/// Spectrum of a π-reversible kernel via the symmetric matrix
/// `D^{1/2} P D^{-1/2}`, `D = diag(π)`.
pub fn eigenvalues_reversible(
    p: &TransitionKernel,
    pi: &StationaryDistribution,
) -> Result<SpectrumReport> {
    p.require_reversible(pi)?;
    let n = p.n();
    let sqrt_pi: Vec<f64> = pi.masses().iter().map(|m| m.sqrt()).collect();
    let sym = Matrix::from_fn(n, n, |x, y| {
        let a = sqrt_pi[x] * p.get(x, y) / sqrt_pi[y];
        let b = sqrt_pi[y] * p.get(y, x) / sqrt_pi[x];
        0.5 * (a + b)
    });
    let mut eigenvalues: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    Ok(SpectrumReport { eigenvalues })
}

/// `P^l` by repeated squaring; `l = 0` yields the identity.
pub fn matrix_power(p: &TransitionKernel, l: u32) -> TransitionKernel {
    TransitionKernel::from_matrix_unchecked(power(p.matrix(), l))
}

pub(crate) fn power(m: &Matrix, mut l: u32) -> Matrix {
    let n = m.nrows();
    let mut result = Matrix::identity(n, n);
    let mut base = m.clone();
    while l > 0 {
        if l & 1 == 1 {
            result = &result * &base;
        }
        l >>= 1;
        if l > 0 {
            base = &base * &base;
        }
    }
    result
}

/// `max_x ‖P^t(x,·) − π‖_TV` for `t = 1..=t_max`.
///
/// At `t = 0` the value would be `1 − min_x π(x)`; it is not emitted.
pub fn worst_case_tv(p: &Matrix, pi: &StationaryDistribution, t_max: usize) -> Result<Vec<f64>> {
    let n = pi.len();
    check_square(p, n)?;
    let mut current = p.clone();
    let mut out = Vec::with_capacity(t_max);
    for t in 1..=t_max {
        if t > 1 {
            current = &current * p;
        }
        let worst = (0..n)
            .map(|x| {
                0.5 * (0..n)
                    .map(|y| (current[(x, y)] - pi.mass(y)).abs())
                    .sum::<f64>()
            })
            .fold(0.0_f64, f64::max);
        out.push(worst.min(1.0));
    }
    Ok(out)
}

pub fn matrix_to_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for x in 0..m.nrows() {
        for y in 0..m.ncols() {
            if y > 0 {
                out.push(',');
            }
            let _ = write!(out, "{:.17e}", m[(x, y)]);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state(p: f64, q: f64) -> TransitionKernel {
        TransitionKernel::from_rows(&[vec![1.0 - p, p], vec![q, 1.0 - q]]).unwrap()
    }

    #[test]
    fn distribution_validation() {
        assert!(StationaryDistribution::new(vec![0.5, 0.5]).is_ok());
        assert!(StationaryDistribution::new(vec![1.0, 0.0]).is_err());
        assert!(StationaryDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(StationaryDistribution::new(vec![]).is_err());
        let pi = StationaryDistribution::from_weights(vec![1.0, 3.0]).unwrap();
        assert_eq!(pi.masses(), &[0.25, 0.75]);
    }

    #[test]
    fn kernel_validation() {
        assert!(TransitionKernel::from_rows(&[vec![0.5, 0.5], vec![0.2, 0.7]]).is_err());
        assert!(TransitionKernel::from_rows(&[vec![1.5, -0.5], vec![0.2, 0.8]]).is_err());
        assert!(TransitionKernel::new(Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let pi = StationaryDistribution::new(vec![0.25, 0.75]).unwrap();
        assert!((pi_inner_product(&[1.0, 1.0], &[1.0, 1.0], &pi).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(pi_inner_product(&[1.0, 0.0], &[0.0, 1.0], &pi).unwrap(), 0.0);
        assert!((pi_inner_product(&[1.0, 2.0], &[3.0, 4.0], &pi).unwrap() - 6.75).abs() < 1e-15);
        assert!(matches!(
            pi_inner_product(&[1.0], &[1.0, 2.0], &pi),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn adjoint_of_reversible_and_projector() {
        // Two-state chains are always reversible w.r.t. their stationary law.
        let p = two_state(0.3, 0.1);
        let pi = StationaryDistribution::new(vec![0.25, 0.75]).unwrap();
        let a = adjoint(&p, &pi).unwrap();
        assert!((a.matrix() - p.matrix()).abs().max() < 1e-12);
        let proj = pi.projector();
        let a = adjoint(&proj, &pi).unwrap();
        assert!((a.matrix() - proj.matrix()).abs().max() < 1e-12);
    }

    #[test]
    fn adjoint_rejects_non_stationary() {
        let p = two_state(0.3, 0.1);
        let pi = StationaryDistribution::uniform(2).unwrap();
        assert!(matches!(adjoint(&p, &pi), Err(Error::NotStationary(_))));
        assert!(raw_adjoint(p.matrix(), &pi).is_ok());
    }

    #[test]
    fn frobenius_examples() {
        let pi = StationaryDistribution::new(vec![0.2, 0.3, 0.5]).unwrap();
        let z = Matrix::zeros(3, 3);
        assert_eq!(frobenius_inner(&z, &z, &pi).unwrap(), 0.0);
        let i = Matrix::identity(3, 3);
        assert!((frobenius_inner(&i, &i, &pi).unwrap() - 3.0).abs() < 1e-14);
        assert!(frobenius_dist_to_pi(&pi.projector(), &pi).unwrap().abs() < 1e-15);
        let u = StationaryDistribution::uniform(5).unwrap();
        let d = frobenius_dist_to_pi(&TransitionKernel::identity(5), &u).unwrap();
        assert!((d - 4.0).abs() < 1e-12);
    }

    #[test]
    fn spectrum_of_projector_and_identity() {
        let pi = StationaryDistribution::new(vec![0.2, 0.3, 0.5]).unwrap();
        let s = eigenvalues_reversible(&pi.projector(), &pi).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-10);
        assert!(s.eigenvalues[1..].iter().all(|l| l.abs() < 1e-10));
        let s = eigenvalues_reversible(&TransitionKernel::identity(3), &pi).unwrap();
        assert!(s.eigenvalues.iter().all(|l| (l - 1.0).abs() < 1e-12));
        assert_eq!(s.spectral_gap(), Some(0.0));
    }

    #[test]
    fn spectrum_rejects_non_reversible() {
        // Deterministic 3-cycle: uniform-stationary but not reversible.
        let p = TransitionKernel::from_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ])
        .unwrap();
        let pi = StationaryDistribution::uniform(3).unwrap();
        assert!(matches!(
            eigenvalues_reversible(&p, &pi),
            Err(Error::NotReversible(_))
        ));
    }

    #[test]
    fn powers() {
        let p = two_state(0.3, 0.1);
        assert_eq!(matrix_power(&p, 1).matrix(), p.matrix());
        assert_eq!(matrix_power(&p, 0).matrix(), &Matrix::identity(2, 2));
        let naive = p.matrix() * p.matrix() * p.matrix();
        assert!((matrix_power(&p, 3).matrix() - naive).abs().max() < 1e-15);
        let pi = StationaryDistribution::new(vec![0.2, 0.3, 0.5]).unwrap();
        let proj = pi.projector();
        assert!((matrix_power(&proj, 7).matrix() - proj.matrix()).abs().max() < 1e-14);
    }

    #[test]
    fn tv_of_projector_is_zero() {
        let pi = StationaryDistribution::new(vec![0.2, 0.3, 0.5]).unwrap();
        let tv = worst_case_tv(pi.projector().matrix(), &pi, 5).unwrap();
        assert!(tv.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn csv_is_row_major() {
        let p = two_state(0.5, 0.25);
        let csv = p.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("5.00000000000000000e-1,"));
    }
}
