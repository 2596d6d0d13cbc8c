//! Observables, projective measurement channels, complementarity, and the
//! left-hand sides of the uncertainty relations.

use crate::entropy::{conditional_entropy, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::optimizer::qubit_projective_basis;
use crate::state::{DensityOperator, Ket};
use num_complex::Complex64;

const ORTHONORMAL_TOL: f64 = 1e-9;

/// Orthonormal eigenbasis of a nondegenerate observable on one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableBasis {
    vectors: Vec<Ket>,
}

impl ObservableBasis {
    pub fn new(vectors: Vec<Ket>) -> Result<Self> {
        let d = vectors
            .first()
            .ok_or_else(|| Error::DimensionMismatch("empty basis".into()))?
            .dim();
        if vectors.len() != d || vectors.iter().any(|v| v.dims().len() != 1 || v.dim() != d) {
            return Err(Error::DimensionMismatch(format!(
                "basis needs {d} single-subsystem vectors of dimension {d}"
            )));
        }
        for (i, u) in vectors.iter().enumerate() {
            for v in &vectors[i + 1..] {
                let overlap = u.inner(v).norm();
                if overlap > ORTHONORMAL_TOL {
                    return Err(Error::DimensionMismatch(format!(
                        "basis vectors not orthogonal (overlap {overlap:e})"
                    )));
                }
            }
        }
        Ok(ObservableBasis { vectors })
    }

    /// Basis made of the columns of a unitary matrix.
    pub fn from_unitary(u: &CMatrix) -> Result<Self> {
        let d = u.nrows();
        let vectors = (0..d)
            .map(|j| Ket::normalized(vec![d], u.column(j).into_owned()))
            .collect::<Result<Vec<_>>>()?;
        ObservableBasis::new(vectors)
    }

    pub fn computational(d: usize) -> Result<Self> {
        ObservableBasis::new((0..d).map(|i| Ket::basis(&[d], i)).collect::<Result<_>>()?)
    }

    /// Parses `z`, `x`, `y`, or `bloch:THETA,PHI` (radians).
    pub fn named(name: &str) -> Result<Self> {
        use std::f64::consts::FRAC_PI_2;
        let lower = name.trim().to_ascii_lowercase();
        match lower.as_str() {
            "z" => Ok(qubit_projective_basis(0.0, 0.0)),
            "x" => Ok(qubit_projective_basis(FRAC_PI_2, 0.0)),
            "y" => Ok(qubit_projective_basis(FRAC_PI_2, FRAC_PI_2)),
            _ => {
                let rest = lower
                    .strip_prefix("bloch:")
                    .ok_or_else(|| Error::UnknownBasis(name.to_string()))?;
                let mut parts = rest.split(',').map(|s| s.trim().parse::<f64>());
                match (parts.next(), parts.next(), parts.next()) {
                    (Some(Ok(theta)), Some(Ok(phi)), None)
                        if theta.is_finite() && phi.is_finite() =>
                    {
                        Ok(qubit_projective_basis(theta, phi))
                    }
                    _ => Err(Error::UnknownBasis(name.to_string())),
                }
            }
        }
    }

    pub fn vectors(&self) -> &[Ket] {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

/// Two observables on the same subsystem together with their complementarity.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservablePair {
    q: ObservableBasis,
    r: ObservableBasis,
    c: f64,
}

impl ObservablePair {
    pub fn new(q: ObservableBasis, r: ObservableBasis) -> Result<Self> {
        let c = complementarity_c(&q, &r)?;
        Ok(ObservablePair { q, r, c })
    }

    /// Pauli-Z and Pauli-X eigenbases (c = 1/2).
    pub fn pauli_zx() -> Self {
        ObservablePair::new(
            ObservableBasis::named("z").expect("built-in basis"),
            ObservableBasis::named("x").expect("built-in basis"),
        )
        .expect("same dimension")
    }

    pub fn named(q: &str, r: &str) -> Result<Self> {
        ObservablePair::new(ObservableBasis::named(q)?, ObservableBasis::named(r)?)
    }

    pub fn q(&self) -> &ObservableBasis {
        &self.q
    }

    pub fn r(&self) -> &ObservableBasis {
        &self.r
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// log2(1/c).
    pub fn log_inv_c(&self) -> f64 {
        -self.c.log2()
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }
}

/// Hermitian operator on a single subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianObservable(CMatrix);

impl HermitianObservable {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() < 2 {
            return Err(Error::DimensionMismatch(format!(
                "observable is {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let defect = linalg::hermiticity_defect(&m);
        if defect > ORTHONORMAL_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(HermitianObservable(m))
    }

    pub fn pauli_x() -> Self {
        HermitianObservable(linalg::pauli_x())
    }

    pub fn pauli_y() -> Self {
        HermitianObservable(linalg::pauli_y())
    }

    pub fn pauli_z() -> Self {
        HermitianObservable(linalg::pauli_z())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }
}

/// c = max_ij |<q_i|r_j>|^2.
pub fn complementarity_c(q: &ObservableBasis, r: &ObservableBasis) -> Result<f64> {
    if q.dim() != r.dim() {
        return Err(Error::DimensionMismatch(format!(
            "bases of dimension {} and {}",
            q.dim(),
            r.dim()
        )));
    }
    Ok(q.vectors
        .iter()
        .flat_map(|qi| r.vectors.iter().map(move |rj| qi.inner(rj).norm_sqr()))
        .fold(0.0, f64::max))
}

/// Identity on everything except `target`, where `local` acts.
fn embed(local: &CMatrix, dims: &[usize], target: usize) -> CMatrix {
    let left: usize = dims[..target].iter().product();
    let right: usize = dims[target + 1..].iter().product();
    let op = linalg::kron(&CMatrix::identity(left, left), local);
    linalg::kron(&op, &CMatrix::identity(right, right))
}

/// sum_i (|x_i><x_i| on `target`) rho (|x_i><x_i| on `target`).
pub fn measurement_channel(
    rho: &DensityOperator,
    basis: &ObservableBasis,
    target: usize,
) -> Result<DensityOperator> {
    let count = rho.num_subsystems();
    if target >= count {
        return Err(Error::SubsystemOutOfRange { index: target, count });
    }
    if rho.dims()[target] != basis.dim() {
        return Err(Error::DimensionMismatch(format!(
            "basis of dimension {} on subsystem of dimension {}",
            basis.dim(),
            rho.dims()[target]
        )));
    }
    let n = rho.dim();
    let mut out = CMatrix::zeros(n, n);
    for x in basis.vectors() {
        let proj = x.amplitudes() * x.amplitudes().adjoint();
        let p = embed(&proj, rho.dims(), target);
        out += &p * rho.matrix() * &p;
    }
    Ok(DensityOperator::from_parts(
        rho.dims().to_vec(),
        linalg::hermitian_part(&out),
    ))
}

fn require_bipartite(rho: &DensityOperator) -> Result<()> {
    if rho.num_subsystems() != 2 {
        return Err(Error::Arity {
            expected: 2,
            found: rho.num_subsystems(),
        });
    }
    Ok(())
}

/// S(X|B) after measuring the first subsystem in `basis`.
pub fn measured_conditional_entropy(rho_ab: &DensityOperator, basis: &ObservableBasis) -> Result<f64> {
    require_bipartite(rho_ab)?;
    let post = measurement_channel(rho_ab, basis, 0)?;
    conditional_entropy(&post, &[0], &[1])
}

/// S(Q|B) + S(R|B).
pub fn uncertainty_sum(rho_ab: &DensityOperator, pair: &ObservablePair) -> Result<f64> {
    Ok(measured_conditional_entropy(rho_ab, pair.q())?
        + measured_conditional_entropy(rho_ab, pair.r())?)
}

/// Shannon entropy of the outcome distribution of measuring a single-subsystem
/// state in `basis` (the H(X) of the memoryless relations).
pub fn outcome_entropy(rho: &DensityOperator, basis: &ObservableBasis) -> Result<f64> {
    if rho.num_subsystems() != 1 {
        return Err(Error::Arity {
            expected: 1,
            found: rho.num_subsystems(),
        });
    }
    Ok(von_neumann_entropy(&measurement_channel(rho, basis, 0)?))
}

/// Both sides of the Robertson relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobertsonSides {
    /// Delta Q * Delta R.
    pub product: f64,
    /// |<[Q, R]>| / 2.
    pub rhs: f64,
}

pub fn robertson_rhs(
    q: &HermitianObservable,
    r: &HermitianObservable,
    rho: &DensityOperator,
) -> Result<RobertsonSides> {
    let d = rho.dim();
    if rho.num_subsystems() != 1 || q.0.nrows() != d || r.0.nrows() != d {
        return Err(Error::DimensionMismatch(format!(
            "observables of dimension {} and {} on a {}-subsystem state of dimension {}",
            q.0.nrows(),
            r.0.nrows(),
            rho.num_subsystems(),
            d
        )));
    }
    let expect = |op: &CMatrix| -> Complex64 { linalg::trace(&(rho.matrix() * op)) };
    let std_dev = |op: &CMatrix| -> f64 {
        let mean = expect(op).re;
        (expect(&(op * op)).re - mean * mean).max(0.0).sqrt()
    };
    let commutator = &q.0 * &r.0 - &r.0 * &q.0;
    Ok(RobertsonSides {
        product: std_dev(&q.0) * std_dev(&r.0),
        rhs: 0.5 * expect(&commutator).norm(),
    })
}
