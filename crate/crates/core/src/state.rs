//! Density operators and state vectors over a list of subsystems.
//!
//! Subsystems are addressed by their zero-based position in `dims`; for the
//! tripartite scenarios that is A = 0, B = 1, C = 2. All reductions keep the
//! surviving subsystems in their original relative order.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use num_complex::Complex64;

/// Largest supported total Hilbert-space dimension.
pub const MAX_DIM: usize = 64;

/// Tolerance for Hermiticity, trace and negative-eigenvalue checks.
pub const DENSITY_TOL: f64 = 1e-9;

/// Tolerance on the norm of a state vector.
pub const KET_NORM_TOL: f64 = 1e-12;

/// Alice's subsystem in a tripartite state.
pub const A: usize = 0;
/// Bob's subsystem in a tripartite state.
pub const B: usize = 1;
/// Charlie's subsystem in a tripartite state.
pub const C: usize = 2;

/// Positive semidefinite, unit-trace complex matrix with a subsystem layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    dims: Vec<usize>,
    matrix: CMatrix,
}

/// Normalized state vector with a subsystem layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    dims: Vec<usize>,
    amplitudes: CVector,
}

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::DimensionMismatch("empty dimension list".into()));
    }
    if let Some(&d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidSubsystemDimension(d));
    }
    let total = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .unwrap_or(usize::MAX);
    if total > MAX_DIM {
        return Err(Error::DimensionTooLarge(total));
    }
    Ok(total)
}

fn check_indices(indices: &[usize], count: usize) -> Result<Vec<usize>> {
    if indices.is_empty() {
        return Err(Error::EmptySelection);
    }
    if let Some(&index) = indices.iter().find(|&&i| i >= count) {
        return Err(Error::SubsystemOutOfRange { index, count });
    }
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(sorted)
}

/// Validates `m` as a density operator over `dims`.
///
/// The Hermitian part is kept, and eigenvalues in `[-1e-9, 0)` are clamped to
/// zero with the spectrum renormalized.
pub fn validate_density(m: CMatrix, dims: &[usize]) -> Result<DensityOperator> {
    let total = check_dims(dims)?;
    if m.nrows() != m.ncols() || m.nrows() != total {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{} but dims {:?} require side {}",
            m.nrows(),
            m.ncols(),
            dims,
            total
        )));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Parse("matrix has non-finite entries".into()));
    }
    let defect = linalg::hermiticity_defect(&m);
    if defect > DENSITY_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let tr = linalg::trace(&m);
    let trace_dev = (tr - Complex64::new(1.0, 0.0)).norm();
    if trace_dev > DENSITY_TOL {
        return Err(Error::TraceViolation(trace_dev));
    }
    let herm = linalg::hermitian_part(&m);
    let (mut values, vectors) = linalg::hermitian_eigh(&herm);
    let min = values.last().copied().unwrap_or(0.0);
    if min < -DENSITY_TOL {
        return Err(Error::NegativeEigenvalue(min));
    }
    let matrix = if min < 0.0 {
        values.iter_mut().for_each(|v| *v = v.max(0.0));
        let sum: f64 = values.iter().sum();
        values.iter_mut().for_each(|v| *v /= sum);
        linalg::hermitian_part(&linalg::reconstruct(&values, &vectors))
    } else {
        herm
    };
    Ok(DensityOperator {
        dims: dims.to_vec(),
        matrix,
    })
}

/// Rank-one projector |k><k|.
pub fn ket_to_density(k: &Ket) -> Result<DensityOperator> {
    let norm_dev = (k.amplitudes.norm_squared() - 1.0).abs();
    if norm_dev > KET_NORM_TOL {
        return Err(Error::NormViolation(norm_dev));
    }
    Ok(DensityOperator {
        dims: k.dims.clone(),
        matrix: &k.amplitudes * k.amplitudes.adjoint(),
    })
}

/// Kronecker product with subsystem lists concatenated.
pub fn tensor_product(a: &DensityOperator, b: &DensityOperator) -> Result<DensityOperator> {
    let dims: Vec<usize> = a.dims.iter().chain(&b.dims).copied().collect();
    check_dims(&dims)?;
    Ok(DensityOperator {
        dims,
        matrix: linalg::kron(&a.matrix, &b.matrix),
    })
}

/// Traces out every subsystem not listed in `keep`.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let keep = check_indices(keep, rho.dims.len())?;
    if keep.len() == rho.dims.len() {
        return Ok(rho.clone());
    }
    let kept_dims: Vec<usize> = keep.iter().map(|&i| rho.dims[i]).collect();
    let kept_total: usize = kept_dims.iter().product();
    let total = rho.dim();

    // Split every flat index into (kept index, traced index).
    let mut kept_of = vec![0usize; total];
    let mut traced_of = vec![0usize; total];
    for flat in 0..total {
        let digits = linalg::digits(flat, &rho.dims);
        let (mut k, mut t) = (0usize, 0usize);
        for (pos, (&digit, &d)) in digits.iter().zip(&rho.dims).enumerate() {
            if keep.binary_search(&pos).is_ok() {
                k = k * d + digit;
            } else {
                t = t * d + digit;
            }
        }
        kept_of[flat] = k;
        traced_of[flat] = t;
    }

    let mut out = CMatrix::zeros(kept_total, kept_total);
    for i in 0..total {
        for j in 0..total {
            if traced_of[i] == traced_of[j] {
                out[(kept_of[i], kept_of[j])] += rho.matrix[(i, j)];
            }
        }
    }
    Ok(DensityOperator {
        dims: kept_dims,
        matrix: out,
    })
}

/// Spectrum sorted descending and clamped to [0, 1].
pub fn hermitian_eigenvalues(rho: &DensityOperator) -> Vec<f64> {
    linalg::hermitian_eigenvalues(&rho.matrix)
        .into_iter()
        .map(|v| v.clamp(0.0, 1.0))
        .collect()
}

impl DensityOperator {
    /// Wraps a matrix produced by an operation that preserves validity.
    pub(crate) fn from_parts(dims: Vec<usize>, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), dims.iter().product::<usize>());
        DensityOperator { dims, matrix }
    }

    /// Maximally mixed state I/d over `dims`.
    pub fn maximally_mixed(dims: &[usize]) -> Result<Self> {
        let total = check_dims(dims)?;
        let matrix = CMatrix::identity(total, total) * Complex64::new(1.0 / total as f64, 0.0);
        Ok(DensityOperator {
            dims: dims.to_vec(),
            matrix,
        })
    }

    /// Diagonal state with the given populations in the computational basis.
    pub fn diagonal(dims: &[usize], populations: &[f64]) -> Result<Self> {
        let total = check_dims(dims)?;
        if populations.len() != total {
            return Err(Error::DimensionMismatch(format!(
                "{} populations for dimension {}",
                populations.len(),
                total
            )));
        }
        let diag = CVector::from_iterator(
            total,
            populations.iter().map(|&p| Complex64::new(p, 0.0)),
        );
        validate_density(CMatrix::from_diagonal(&diag), dims)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(self)
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&v| v > tol).count()
    }

    /// The state vector of a pure operator (largest eigenvector), or an error
    /// if the largest eigenvalue is below `1 - 1e-9`.
    pub fn to_pure_ket(&self) -> Result<Ket> {
        let (values, vectors) = linalg::hermitian_eigh(&self.matrix);
        if values[0] < 1.0 - DENSITY_TOL {
            return Err(Error::NotPure(values[0]));
        }
        Ket::normalized(self.dims.clone(), vectors.column(0).into_owned())
    }

    /// U rho U^dag for a unitary on the full space.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "unitary is {}x{} for dimension {}",
                u.nrows(),
                u.ncols(),
                self.dim()
            )));
        }
        let m = u * &self.matrix * u.adjoint();
        Ok(DensityOperator {
            dims: self.dims.clone(),
            matrix: linalg::hermitian_part(&m),
        })
    }
}

impl Ket {
    /// Builds a ket, rejecting amplitudes whose norm is off by more than 1e-12.
    pub fn new(dims: Vec<usize>, amplitudes: CVector) -> Result<Self> {
        let total = check_dims(&dims)?;
        if amplitudes.len() != total {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dims {:?}",
                amplitudes.len(),
                dims
            )));
        }
        let norm_dev = (amplitudes.norm_squared() - 1.0).abs();
        if norm_dev > KET_NORM_TOL {
            return Err(Error::NormViolation(norm_dev));
        }
        Ok(Ket { dims, amplitudes })
    }

    /// Builds a ket after rescaling to unit norm.
    pub fn normalized(dims: Vec<usize>, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NormViolation(1.0));
        }
        Ket::new(dims, amplitudes / Complex64::new(norm, 0.0))
    }

    /// Builds a ket from real amplitudes, rescaling to unit norm.
    pub fn from_real(dims: &[usize], amplitudes: &[f64]) -> Result<Self> {
        let v = CVector::from_iterator(
            amplitudes.len(),
            amplitudes.iter().map(|&a| Complex64::new(a, 0.0)),
        );
        Ket::normalized(dims.to_vec(), v)
    }

    /// Computational basis state with the given flat index.
    pub fn basis(dims: &[usize], index: usize) -> Result<Self> {
        let total = check_dims(dims)?;
        if index >= total {
            return Err(Error::DimensionMismatch(format!(
                "basis index {index} for dimension {total}"
            )));
        }
        let mut v = CVector::zeros(total);
        v[index] = linalg::ONE;
        Ket::new(dims.to_vec(), v)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn inner(&self, other: &Ket) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn tensor(&self, other: &Ket) -> Result<Ket> {
        let dims: Vec<usize> = self.dims.iter().chain(&other.dims).copied().collect();
        check_dims(&dims)?;
        Ok(Ket {
            dims,
            amplitudes: linalg::kron_vec(&self.amplitudes, &other.amplitudes),
        })
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator {
            dims: self.dims.clone(),
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_state, StateKind};
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell() -> Ket {
        Ket::from_real(&[2, 2], &[1.0, 0.0, 0.0, 1.0]).unwrap()
    }

    fn ghz(alpha: f64) -> Ket {
        let mut amps = [0.0; 8];
        amps[0] = alpha;
        amps[7] = (1.0 - alpha * alpha).max(0.0).sqrt();
        Ket::from_real(&[2, 2, 2], &amps).unwrap()
    }

    #[test]
    fn maximally_mixed_qubit_is_valid() {
        let m = CMatrix::identity(2, 2) * c(0.5);
        let rho = validate_density(m, &[2]).unwrap();
        assert_eq!(rho.eigenvalues(), vec![0.5, 0.5]);
    }

    #[test]
    fn trace_violation_is_rejected() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.5), c(0.4)]));
        assert!(matches!(
            validate_density(m, &[2]),
            Err(Error::TraceViolation(_))
        ));
    }

    #[test]
    fn tiny_negative_eigenvalue_is_clamped() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0 + 1e-10), c(-1e-10)]));
        let rho = validate_density(m, &[2]).unwrap();
        let ev = rho.eigenvalues();
        assert_eq!(ev[1], 0.0);
        assert!((ev[0] - 1.0).abs() < 1e-15);
        assert!(rho.matrix()[(1, 1)].re >= 0.0);
    }

    #[test]
    fn clearly_negative_eigenvalue_is_rejected() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.1), c(-0.1)]));
        assert!(matches!(
            validate_density(m, &[2]),
            Err(Error::NegativeEigenvalue(_))
        ));
    }

    #[test]
    fn non_hermitian_and_shape_errors() {
        let mut m = CMatrix::identity(2, 2) * c(0.5);
        m[(0, 1)] = c(0.1);
        assert!(matches!(
            validate_density(m, &[2]),
            Err(Error::NotHermitian(_))
        ));
        let m = CMatrix::identity(4, 4) * c(0.25);
        assert!(matches!(
            validate_density(m, &[2]),
            Err(Error::DimensionMismatch(_))
        ));
        let m = CMatrix::identity(1, 1);
        assert!(validate_density(m, &[1]).is_err());
    }

    #[test]
    fn ket_projectors() {
        let zero = Ket::basis(&[2], 0).unwrap();
        let p = ket_to_density(&zero).unwrap();
        assert_eq!(p.matrix()[(0, 0)], c(1.0));
        assert_eq!(p.matrix()[(1, 1)], c(0.0));

        let b = ket_to_density(&bell()).unwrap();
        for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((b.matrix()[(i, j)] - c(0.5)).norm() < 1e-15);
        }
        assert!(b.matrix()[(1, 1)].norm() < 1e-15);

        let g = ket_to_density(&ghz(1.0)).unwrap();
        assert!((g.matrix()[(0, 0)] - c(1.0)).norm() < 1e-15);
        assert!((g.purity() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ket_norm_is_enforced() {
        let v = CVector::from_vec(vec![c(1.0), c(0.1)]);
        assert!(matches!(
            Ket::new(vec![2], v),
            Err(Error::NormViolation(_))
        ));
    }

    #[test]
    fn tensor_of_maximally_mixed() {
        let half = DensityOperator::maximally_mixed(&[2]).unwrap();
        let t = tensor_product(&half, &half).unwrap();
        assert_eq!(t.dims(), &[2, 2]);
        let expect = DensityOperator::maximally_mixed(&[2, 2]).unwrap();
        assert!(linalg::max_abs_diff(t.matrix(), expect.matrix()) < 1e-15);
    }

    #[test]
    fn tensor_with_zero_projector_embeds_block() {
        let zero = Ket::basis(&[2], 0).unwrap().to_density();
        let rho = random_state(3, &[2], StateKind::Mixed { rank: None }).unwrap();
        let t = tensor_product(&zero, &rho).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(t.matrix()[(i, j)], rho.matrix()[(i, j)]);
                assert_eq!(t.matrix()[(i + 2, j + 2)], c(0.0));
            }
        }
    }

    #[test]
    fn product_with_c_has_three_subsystems() {
        let bell = bell().to_density();
        let rc = DensityOperator::diagonal(&[2], &[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let abc = tensor_product(&bell, &rc).unwrap();
        assert_eq!(abc.dims(), &[2, 2, 2]);
    }

    #[test]
    fn partial_trace_examples() {
        let b = bell().to_density();
        let a = partial_trace(&b, &[0]).unwrap();
        let half = DensityOperator::maximally_mixed(&[2]).unwrap();
        assert!(linalg::max_abs_diff(a.matrix(), half.matrix()) < 1e-15);

        let alpha: f64 = 0.6;
        let ac = partial_trace(&ghz(alpha).to_density(), &[A, C]).unwrap();
        assert_eq!(ac.dims(), &[2, 2]);
        let expect =
            DensityOperator::diagonal(&[2, 2], &[alpha * alpha, 0.0, 0.0, 1.0 - alpha * alpha])
                .unwrap();
        assert!(linalg::max_abs_diff(ac.matrix(), expect.matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_errors() {
        let b = bell().to_density();
        assert!(matches!(partial_trace(&b, &[]), Err(Error::EmptySelection)));
        assert!(matches!(
            partial_trace(&b, &[2]),
            Err(Error::SubsystemOutOfRange { .. })
        ));
    }

    #[test]
    fn ghz_marginal_spectrum() {
        let alpha = std::f64::consts::FRAC_1_SQRT_2;
        let ac = partial_trace(&ghz(alpha).to_density(), &[A, C]).unwrap();
        let ev = hermitian_eigenvalues(&ac);
        let expect = [0.5, 0.5, 0.0, 0.0];
        for (x, y) in ev.iter().zip(expect) {
            assert!((x - y).abs() < 1e-12);
        }
        let pure = Ket::basis(&[2, 2], 2).unwrap().to_density();
        assert_eq!(pure.eigenvalues()[0], 1.0);
        assert!(pure.eigenvalues()[1..].iter().all(|&v| v < 1e-15));
    }

    #[test]
    fn pure_ket_roundtrip() {
        let g = ghz(0.3).to_density();
        let k = g.to_pure_ket().unwrap();
        assert!(linalg::max_abs_diff(k.to_density().matrix(), g.matrix()) < 1e-12);
        let mixed = DensityOperator::maximally_mixed(&[2]).unwrap();
        assert!(matches!(mixed.to_pure_ket(), Err(Error::NotPure(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn generated_states_revalidate(seed in any::<u64>(), rank in 1usize..=8) {
            let rho = random_state(seed, &[2, 2, 2], StateKind::Mixed { rank: Some(rank) }).unwrap();
            let again = validate_density(rho.matrix().clone(), rho.dims()).unwrap();
            prop_assert!(linalg::max_abs_diff(again.matrix(), rho.matrix()) < 1e-12);
            let sum: f64 = rho.eigenvalues().iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
        }

        #[test]
        fn trace_of_product_recovers_factor(sa in any::<u64>(), sb in any::<u64>()) {
            let a = random_state(sa, &[2], StateKind::Mixed { rank: None }).unwrap();
            let b = random_state(sb, &[2, 2], StateKind::Mixed { rank: None }).unwrap();
            let ab = tensor_product(&a, &b).unwrap();
            let back = partial_trace(&ab, &[0]).unwrap();
            prop_assert!(linalg::max_abs_diff(back.matrix(), a.matrix()) < 1e-12);
        }

        #[test]
        fn tracing_order_is_irrelevant(seed in any::<u64>()) {
            let rho = random_state(seed, &[2, 2, 2], StateKind::Mixed { rank: None }).unwrap();
            let b_first = partial_trace(&partial_trace(&rho, &[A, C]).unwrap(), &[0]).unwrap();
            let c_first = partial_trace(&partial_trace(&rho, &[A, B]).unwrap(), &[0]).unwrap();
            prop_assert!(linalg::max_abs_diff(b_first.matrix(), c_first.matrix()) < 1e-12);
        }
    }
}
