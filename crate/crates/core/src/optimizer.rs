//! Deterministic multistart Nelder-Mead over a box, plus the parametrizations
//! the correlation measures search over: qubit projective bases and
//! pure-state decompositions of a mixed state.
//!
//! Start points come from a Halton sequence shifted by a seed-dependent
//! offset, so restart `k` is the same point whatever the total number of
//! restarts. Restarts run in parallel; the reduction picks the lowest value
//! and breaks ties by restart index.

use crate::correlations::DecompositionEnsemble;
use crate::entropy::ProbabilityVector;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::measurement::ObservableBasis;
use crate::random::rng_from_seed;
use crate::state::{DensityOperator, Ket};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, TAU};

/// Eigenvalues at or below this are outside the support of a state.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub f_tol: f64,
    pub x_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 32,
            max_iterations: 400,
            f_tol: 1e-9,
            x_tol: 1e-7,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        OptimizerConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "restarts and max_iterations must be positive".into(),
            ));
        }
        if !(self.f_tol > 0.0 && self.x_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub params: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

struct LocalResult {
    x: Vec<f64>,
    fx: f64,
    evaluations: usize,
    converged: bool,
}

fn first_primes(n: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(n);
    let mut candidate = 2u64;
    while primes.len() < n {
        if primes.iter().take_while(|&&p| p * p <= candidate).all(|&p| !candidate.is_multiple_of(p)) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    out
}

/// Seed-dependent Cranley-Patterson offset of the Halton sequence.
fn start_shift(seed: u64, dimension: usize) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    (0..dimension).map(|_| rng.random::<f64>()).collect()
}

/// Start point of restart `k`: shifted Halton point mapped into the box.
fn start_point(k: usize, primes: &[u64], shift: &[f64], bounds: &[(f64, f64)]) -> Vec<f64> {
    bounds
        .iter()
        .enumerate()
        .map(|(i, &(lo, hi))| {
            let u = (radical_inverse(k as u64 + 1, primes[i]) + shift[i]).fract();
            lo + u * (hi - lo)
        })
        .collect()
}

fn eval<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], count: &mut usize) -> Result<f64> {
    *count += 1;
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteObjective {
            value: v,
            params: x.to_vec(),
        })
    }
}

fn project(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (xi, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *xi = xi.clamp(lo, hi);
    }
}

/// One Nelder-Mead descent with dimension-adaptive coefficients, restarted
/// from its own result while that still improves and budget remains.
fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    x0: Vec<f64>,
    bounds: &[(f64, f64)],
    config: &OptimizerConfig,
) -> Result<LocalResult> {
    const POLISH_ROUNDS: usize = 2;
    let n = x0.len();
    let nf = n as f64;
    let (reflect, expand, contract, shrink) = (
        1.0,
        1.0 + 2.0 / nf,
        0.75 - 1.0 / (2.0 * nf),
        1.0 - 1.0 / nf.max(2.0),
    );
    let mut evaluations = 0usize;
    let mut iterations = 0usize;
    let mut best_x = x0;
    let mut best_f = eval(f, &best_x, &mut evaluations)?;
    let mut converged = false;

    for round in 0..=POLISH_ROUNDS {
        let mut simplex = Vec::with_capacity(n + 1);
        simplex.push((best_x.clone(), best_f));
        for i in 0..n {
            let (lo, hi) = bounds[i];
            let step = 0.1 * (hi - lo);
            let mut x = best_x.clone();
            x[i] = if x[i] + step <= hi { x[i] + step } else { x[i] - step };
            let fx = eval(f, &x, &mut evaluations)?;
            simplex.push((x, fx));
        }
        converged = false;
        while iterations < config.max_iterations {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let f_spread = simplex[n].1 - simplex[0].1;
            let x_spread = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if f_spread <= config.f_tol * (1.0 + simplex[0].1.abs()) && x_spread <= config.x_tol {
                converged = true;
                break;
            }
            iterations += 1;

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / nf;
                }
            }
            let toward = |coef: f64| -> Vec<f64> {
                let mut p: Vec<f64> = centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + coef * (c - w))
                    .collect();
                project(&mut p, bounds);
                p
            };

            let xr = toward(reflect);
            let fr = eval(f, &xr, &mut evaluations)?;
            if fr < simplex[0].1 {
                let xe = toward(reflect * expand);
                let fe = eval(f, &xe, &mut evaluations)?;
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = toward(reflect * contract);
                let fc = eval(f, &xc, &mut evaluations)?;
                (xc, fc)
            } else {
                let xc = toward(-contract);
                let fc = eval(f, &xc, &mut evaluations)?;
                (xc, fc)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
                continue;
            }
            let anchor = simplex[0].0.clone();
            for (x, fx) in simplex[1..].iter_mut() {
                for (xi, ai) in x.iter_mut().zip(&anchor) {
                    *xi = ai + shrink * (*xi - ai);
                }
                *fx = eval(f, x, &mut evaluations)?;
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let improvement = best_f - simplex[0].1;
        if simplex[0].1 < best_f {
            best_x = simplex[0].0.clone();
            best_f = simplex[0].1;
        }
        let stalled = improvement <= config.f_tol * (1.0 + best_f.abs());
        if !converged || iterations >= config.max_iterations || (round > 0 && stalled) {
            break;
        }
    }
    Ok(LocalResult {
        x: best_x,
        fx: best_f,
        evaluations,
        converged,
    })
}

/// Minimizes `objective` over the box with `config.restarts` independent
/// Nelder-Mead descents from quasi-random start points.
pub fn minimize_multistart<F>(
    objective: F,
    dimension: usize,
    bounds: &[(f64, f64)],
    config: &OptimizerConfig,
) -> Result<OptimizationResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    if bounds.len() != dimension {
        return Err(Error::ParameterCount {
            expected: dimension,
            found: bounds.len(),
        });
    }
    if let Some(&(lo, hi)) = bounds.iter().find(|(lo, hi)| !lo.is_finite() || !hi.is_finite() || lo > hi) {
        return Err(Error::InvalidConfig(format!("invalid bound [{lo}, {hi}]")));
    }
    if dimension == 0 {
        let mut count = 0;
        let value = eval(&objective, &[], &mut count)?;
        return Ok(OptimizationResult {
            params: Vec::new(),
            value,
            evaluations: count,
            converged: true,
        });
    }

    let primes = first_primes(dimension);
    let shift = start_shift(config.seed, dimension);

    let locals: Vec<Result<LocalResult>> = (0..config.restarts)
        .into_par_iter()
        .map(|k| {
            let x0 = start_point(k, &primes, &shift, bounds);
            nelder_mead(&objective, x0, bounds, config)
        })
        .collect();

    let mut evaluations = 0;
    let mut best: Option<LocalResult> = None;
    for local in locals {
        let local = local?;
        evaluations += local.evaluations;
        if best.as_ref().is_none_or(|b| local.fx < b.fx) {
            best = Some(local);
        }
    }
    let best = best.expect("at least one restart");
    Ok(OptimizationResult {
        params: best.x,
        value: best.fx,
        evaluations,
        converged: best.converged,
    })
}

/// Orthonormal qubit basis {cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>,
/// sin(θ/2)|0> - e^{iφ} cos(θ/2)|1>}.
pub fn qubit_projective_basis(theta: f64, phi: f64) -> ObservableBasis {
    let (s, c) = (theta / 2.0).sin_cos();
    let phase = Complex64::from_polar(1.0, phi);
    let v0 = CVector::from_vec(vec![Complex64::new(c, 0.0), phase * s]);
    let v1 = CVector::from_vec(vec![Complex64::new(s, 0.0), -phase * c]);
    ObservableBasis::new(vec![
        Ket::normalized(vec![2], v0).expect("unit vector"),
        Ket::normalized(vec![2], v1).expect("unit vector"),
    ])
    .expect("orthonormal by construction")
}

/// Box for `qubit_projective_basis` parameters: θ in [0, π], φ in [0, 2π].
pub fn qubit_basis_bounds() -> [(f64, f64); 2] {
    [(0.0, std::f64::consts::PI), (0.0, TAU)]
}

fn rotation_count(rank: usize, m: usize) -> usize {
    (0..rank).map(|c| m - 1 - c).sum()
}

/// Number of real parameters of an m x `rank` isometry modulo row phases:
/// one (angle, phase) pair per Givens rotation plus `rank - 1` column phases.
pub fn isometry_param_count(rank: usize, m: usize) -> usize {
    if rank == 0 || m < rank {
        return 0;
    }
    2 * rotation_count(rank, m) + rank - 1
}

/// Box matching `isometry_param_count`: rotation angles in [0, π/2], phases in
/// [0, 2π].
pub fn isometry_bounds(rank: usize, m: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(isometry_param_count(rank, m));
    for _ in 0..rotation_count(rank, m) {
        out.push((0.0, FRAC_PI_2));
        out.push((0.0, TAU));
    }
    out.extend(std::iter::repeat_n((0.0, TAU), rank.saturating_sub(1)));
    out
}

/// m x `rank` column-isometric matrix: a product of Givens rotations applied
/// to [I; 0] carrying column phases. All-zero parameters give [I; 0].
pub fn isometry_from_params(params: &[f64], rank: usize, m: usize) -> Result<CMatrix> {
    let expected = isometry_param_count(rank, m);
    if params.len() != expected {
        return Err(Error::ParameterCount {
            expected,
            found: params.len(),
        });
    }
    let rotations = rotation_count(rank, m);
    let mut u = CMatrix::zeros(m, rank);
    u[(0, 0)] = linalg::ONE;
    for c in 1..rank {
        u[(c, c)] = Complex64::from_polar(1.0, params[2 * rotations + c - 1]);
    }
    // Rotations are listed column by column; apply them in reverse so that
    // the first pair acts last.
    let pairs: Vec<(usize, usize)> = (0..rank)
        .flat_map(|c| ((c + 1)..m).map(move |k| (c, k)))
        .collect();
    for (idx, &(row_a, row_b)) in pairs.iter().enumerate().rev() {
        let (s, co) = params[2 * idx].sin_cos();
        let phase = Complex64::from_polar(1.0, params[2 * idx + 1]);
        for col in 0..rank {
            let a = u[(row_a, col)];
            let b = u[(row_b, col)];
            u[(row_a, col)] = a * co + phase.conj() * b * s;
            u[(row_b, col)] = -phase * a * s + b * co;
        }
    }
    Ok(u)
}

/// sqrt(λ_i)|e_i> for the support of a state, the common input of every
/// pure-state decomposition.
#[derive(Debug, Clone)]
pub struct SpectralFactor {
    dims: Vec<usize>,
    columns: Vec<CVector>,
}

impl SpectralFactor {
    pub fn new(rho: &DensityOperator) -> Self {
        let (values, vectors) = linalg::hermitian_eigh(rho.matrix());
        let columns = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > RANK_TOL)
            .map(|(i, &v)| vectors.column(i) * Complex64::new(v.sqrt(), 0.0))
            .collect();
        SpectralFactor {
            dims: rho.dims().to_vec(),
            columns,
        }
    }

    pub fn rank(&self) -> usize {
        self.columns.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Subnormalized members |ψ̃_j> = Σ_i U*_{ji} sqrt(λ_i)|e_i>, j < m.
    pub fn subnormalized_states(&self, params: &[f64], m: usize) -> Result<Vec<CVector>> {
        let rank = self.rank();
        if m < rank {
            return Err(Error::EnsembleTooSmall { m, rank });
        }
        let u = isometry_from_params(params, rank, m)?;
        let dim = self.columns.first().map_or(0, |c| c.len());
        Ok((0..m)
            .map(|j| {
                let mut psi = CVector::zeros(dim);
                for (i, col) in self.columns.iter().enumerate() {
                    psi.axpy(u[(j, i)].conj(), col, linalg::ONE);
                }
                psi
            })
            .collect())
    }

    pub fn ensemble(&self, params: &[f64], m: usize) -> Result<DecompositionEnsemble> {
        let states = self.subnormalized_states(params, m)?;
        let mut probabilities = Vec::with_capacity(m);
        let mut kets = Vec::with_capacity(m);
        for psi in states {
            let p = psi.norm_squared();
            if p > 1e-15 {
                probabilities.push(p);
                kets.push(Ket::normalized(self.dims.clone(), psi)?);
            }
        }
        let total: f64 = probabilities.iter().sum();
        probabilities.iter_mut().for_each(|p| *p /= total);
        DecompositionEnsemble::new(ProbabilityVector::new(probabilities)?, kets)
    }
}

/// Pure-state ensemble realizing `rho`, selected by isometry parameters.
/// Members with vanishing weight are dropped.
pub fn decomposition_from_isometry(
    rho: &DensityOperator,
    params: &[f64],
    m: usize,
) -> Result<DecompositionEnsemble> {
    SpectralFactor::new(rho).ensemble(params, m)
}
