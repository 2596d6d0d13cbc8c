//! Shannon and von Neumann entropies (base 2) and the correlation quantities
//! built from them.

use crate::error::{Error, Result};
use crate::state::{partial_trace, DensityOperator};

/// Eigenvalues or probabilities below this are treated as exact zeros.
pub const ZERO_CUTOFF: f64 = 1e-12;

const SUM_TOL: f64 = 1e-9;

/// Nonnegative entries summing to one within 1e-9.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        if let Some(p) = entries
            .iter()
            .find(|p| !p.is_finite() || **p < 0.0 || **p > 1.0)
        {
            return Err(Error::InvalidDistribution(format!("entry {p} outside [0, 1]")));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
        }
        Ok(ProbabilityVector(entries))
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// -sum p log2 p over entries above the zero cutoff.
#[inline]
pub(crate) fn entropy_bits(values: &[f64]) -> f64 {
    let h: f64 = values
        .iter()
        .filter(|&&p| p > ZERO_CUTOFF)
        .map(|&p| -p * p.log2())
        .sum();
    h.max(0.0)
}

pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    entropy_bits(p.entries())
}

/// Binary entropy h2(p).
pub fn binary_entropy(p: f64) -> f64 {
    entropy_bits(&[p, 1.0 - p])
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    entropy_bits(&rho.eigenvalues())
}

fn check_pair(rho: &DensityOperator, first: &[usize], second: &[usize]) -> Result<Vec<usize>> {
    let count = rho.num_subsystems();
    if first.is_empty() || second.is_empty() {
        return Err(Error::EmptySelection);
    }
    if let Some(&index) = first.iter().chain(second).find(|&&i| i >= count) {
        return Err(Error::SubsystemOutOfRange { index, count });
    }
    if let Some(&i) = first.iter().find(|i| second.contains(i)) {
        return Err(Error::OverlappingSubsystems(i));
    }
    let mut union: Vec<usize> = first.iter().chain(second).copied().collect();
    union.sort_unstable();
    union.dedup();
    Ok(union)
}

/// Entropy of the reduction onto `keep`, skipping the trace when nothing is
/// removed.
pub(crate) fn marginal_entropy(rho: &DensityOperator, keep: &[usize]) -> Result<f64> {
    if keep.len() == rho.num_subsystems() {
        return Ok(von_neumann_entropy(rho));
    }
    Ok(von_neumann_entropy(&partial_trace(rho, keep)?))
}

/// S(first | second) = S(first ∪ second) - S(second).
///
/// The coherent information I(first⟩second) is the negative of this value.
pub fn conditional_entropy(rho: &DensityOperator, first: &[usize], second: &[usize]) -> Result<f64> {
    let union = check_pair(rho, first, second)?;
    Ok(marginal_entropy(rho, &union)? - marginal_entropy(rho, second)?)
}

/// I(first : second) = S(first) + S(second) - S(first ∪ second).
pub fn mutual_information(rho: &DensityOperator, first: &[usize], second: &[usize]) -> Result<f64> {
    let union = check_pair(rho, first, second)?;
    Ok(marginal_entropy(rho, first)? + marginal_entropy(rho, second)?
        - marginal_entropy(rho, &union)?)
}

/// S(A|B) + S(A|C) for a tripartite state; nonnegative by strong
/// subadditivity and zero for pure states.
pub fn ssa_gap(rho: &DensityOperator) -> Result<f64> {
    ssa_gap_with(rho, von_neumann_entropy)
}

/// `ssa_gap` with a caller-supplied entropy functional (used for fault
/// injection in the self-test).
pub fn ssa_gap_with(rho: &DensityOperator, entropy: fn(&DensityOperator) -> f64) -> Result<f64> {
    if rho.num_subsystems() != 3 {
        return Err(Error::Arity {
            expected: 3,
            found: rho.num_subsystems(),
        });
    }
    let s = |keep: &[usize]| -> Result<f64> { Ok(entropy(&partial_trace(rho, keep)?)) };
    Ok(s(&[0, 1])? - s(&[1])? + s(&[0, 2])? - s(&[2])?)
}
