//! Seeded random states and unitaries (Haar and Ginibre ensembles).

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::state::{validate_density, DensityOperator, Ket};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    /// Haar-uniform pure state.
    Pure,
    /// Ginibre-induced mixed state; `None` means full rank.
    Mixed { rank: Option<usize> },
}

/// The generator used everywhere a seed is accepted.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-random unitary from the phase-corrected QR of a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let qr = ginibre(rng, d, d).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn haar_ket<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> Result<Ket> {
    let total: usize = dims.iter().product();
    let v = CVector::from_fn(total, |_, _| complex_normal(rng));
    Ket::normalized(dims.to_vec(), v)
}

/// rho = G G^dag / Tr(G G^dag) with G a dim x rank Ginibre matrix.
pub fn ginibre_state<R: Rng + ?Sized>(
    rng: &mut R,
    dims: &[usize],
    rank: Option<usize>,
) -> Result<DensityOperator> {
    let total: usize = dims.iter().product();
    let rank = rank.unwrap_or(total);
    if rank == 0 || rank > total {
        return Err(Error::InvalidRank { rank, dim: total });
    }
    let g = ginibre(rng, total, rank);
    let mut m = &g * g.adjoint();
    let tr: f64 = (0..total).map(|i| m[(i, i)].re).sum();
    m /= Complex64::new(tr, 0.0);
    validate_density(m, dims)
}

/// Deterministic random state for a fixed seed.
pub fn random_state(seed: u64, dims: &[usize], kind: StateKind) -> Result<DensityOperator> {
    let mut rng = rng_from_seed(seed);
    match kind {
        StateKind::Pure => Ok(haar_ket(&mut rng, dims)?.to_density()),
        StateKind::Mixed { rank } => ginibre_state(&mut rng, dims, rank),
    }
}
