//! Bipartite correlation and entanglement measures.
//!
//! Classical correlation and discord are optimized over rank-one projective
//! measurements on one qubit, so the reported discord is an upper bound on
//! the POVM-optimal value. Entanglement of assistance is a maximum over
//! parametrized decompositions and the reported value is a lower bound on the
//! true maximum.

use crate::entropy::{entropy_bits, mutual_information, von_neumann_entropy, ProbabilityVector};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::optimizer::{
    isometry_bounds, isometry_param_count, minimize_multistart, qubit_basis_bounds,
    OptimizerConfig, SpectralFactor,
};
use crate::state::{partial_trace, DensityOperator, Ket, DENSITY_TOL};
use num_complex::Complex64;

/// Pure-state ensemble {p_j, |ψ_j>} realizing a mixed state.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionEnsemble {
    probabilities: ProbabilityVector,
    states: Vec<Ket>,
}

impl DecompositionEnsemble {
    pub fn new(probabilities: ProbabilityVector, states: Vec<Ket>) -> Result<Self> {
        if probabilities.len() != states.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities for {} states",
                probabilities.len(),
                states.len()
            )));
        }
        if let Some(first) = states.first() {
            if states.iter().any(|s| s.dims() != first.dims()) {
                return Err(Error::DimensionMismatch("ensemble members differ in dims".into()));
            }
        }
        Ok(DecompositionEnsemble {
            probabilities,
            states,
        })
    }

    pub fn probabilities(&self) -> &ProbabilityVector {
        &self.probabilities
    }

    pub fn states(&self) -> &[Ket] {
        &self.states
    }

    /// Σ_j p_j |ψ_j><ψ_j|.
    pub fn mixture(&self) -> CMatrix {
        let n = self.states.first().map_or(0, |s| s.dim());
        let mut out = CMatrix::zeros(n, n);
        for (&p, s) in self.probabilities.entries().iter().zip(&self.states) {
            out += s.amplitudes() * s.amplitudes().adjoint() * Complex64::new(p, 0.0);
        }
        out
    }

    /// Σ_j p_j S(Tr_rest |ψ_j><ψ_j|) with the entropy taken on the first
    /// subsystem.
    pub fn average_entanglement(&self) -> Result<f64> {
        let mut total = 0.0;
        for (&p, s) in self.probabilities.entries().iter().zip(&self.states) {
            total += p * von_neumann_entropy(&partial_trace(&s.to_density(), &[0])?);
        }
        Ok(total)
    }
}

fn require_two_qubits(rho: &DensityOperator) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(Error::Unsupported(format!(
            "expected two qubits, found dims {:?}",
            rho.dims()
        )));
    }
    Ok(())
}

fn entropy_2x2(m: &[[Complex64; 2]; 2], trace: f64) -> f64 {
    let (hi, lo) = linalg::eigvalsh_2x2(m[0][0].re / trace, m[1][1].re / trace, m[0][1] / trace);
    entropy_bits(&[hi, lo])
}

/// Σ_k p_k S(ρ_{other|k}) after measuring qubit `measured` in the basis with
/// Bloch angles (θ, φ).
fn conditional_entropy_after_measurement(rho: &CMatrix, measured: usize, theta: f64, phi: f64) -> f64 {
    let (s, c) = (theta / 2.0).sin_cos();
    let e = Complex64::from_polar(1.0, phi);
    let basis = [
        [Complex64::new(c, 0.0), e * s],
        [Complex64::new(s, 0.0), -e * c],
    ];
    let idx = |m: usize, o: usize| if measured == 0 { 2 * m + o } else { 2 * o + m };
    let mut total = 0.0;
    for x in &basis {
        let mut block = [[linalg::ZERO; 2]; 2];
        for (o, row) in block.iter_mut().enumerate() {
            for (o2, entry) in row.iter_mut().enumerate() {
                let mut acc = linalg::ZERO;
                for (m, xm) in x.iter().enumerate() {
                    for (m2, xm2) in x.iter().enumerate() {
                        acc += xm.conj() * rho[(idx(m, o), idx(m2, o2))] * xm2;
                    }
                }
                *entry = acc;
            }
        }
        let p = block[0][0].re + block[1][1].re;
        if p > 1e-14 {
            total += p * entropy_2x2(&block, p);
        }
    }
    total
}

fn check_side(measured: usize) -> Result<usize> {
    match measured {
        0 => Ok(1),
        1 => Ok(0),
        index => Err(Error::SubsystemOutOfRange { index, count: 2 }),
    }
}

/// J = S(ρ_other) - min over projective bases of Σ_k p_k S(ρ_{other|k}),
/// measuring qubit `measured`.
pub fn classical_correlation(
    rho_ab: &DensityOperator,
    measured: usize,
    config: &OptimizerConfig,
) -> Result<f64> {
    require_two_qubits(rho_ab)?;
    let other = check_side(measured)?;
    let s_other = von_neumann_entropy(&partial_trace(rho_ab, &[other])?);
    let m = rho_ab.matrix();
    let best = minimize_multistart(
        |x| conditional_entropy_after_measurement(m, measured, x[0], x[1]),
        2,
        &qubit_basis_bounds(),
        config,
    )?;
    Ok((s_other - best.value).clamp(0.0, s_other))
}

/// D = I(A:B) - J with the measurement on qubit `measured`.
pub fn quantum_discord(
    rho_ab: &DensityOperator,
    measured: usize,
    config: &OptimizerConfig,
) -> Result<f64> {
    let j = classical_correlation(rho_ab, measured, config)?;
    Ok(mutual_information(rho_ab, &[0], &[1])? - j)
}

/// Square roots of the eigenvalues of ρ (σy⊗σy) ρ* (σy⊗σy), descending.
///
/// With ρ = W W† these are the singular values of Wᵀ (σy⊗σy) W, which avoids
/// taking square roots of eigenvalues that are zero up to rounding.
fn spin_flip_spectrum(rho: &DensityOperator) -> Result<[f64; 4]> {
    require_two_qubits(rho)?;
    let yy = linalg::kron(&linalg::pauli_y(), &linalg::pauli_y());
    let (values, vectors) = linalg::hermitian_eigh(rho.matrix());
    let mut w = vectors;
    for (j, v) in values.iter().enumerate() {
        w.column_mut(j).scale_mut(v.max(0.0).sqrt());
    }
    let n = w.transpose() * yy * &w;
    let mut out = [0.0; 4];
    for (o, v) in out.iter_mut().zip(n.singular_values().iter()) {
        *o = *v;
    }
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

/// Wootters concurrence max(0, λ1 - λ2 - λ3 - λ4).
pub fn concurrence(rho_ab: &DensityOperator) -> Result<f64> {
    let l = spin_flip_spectrum(rho_ab)?;
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}

/// λ1 + λ2 + λ3 + λ4 of the spin-flip spectrum.
pub fn concurrence_of_assistance(rho_ab: &DensityOperator) -> Result<f64> {
    let l = spin_flip_spectrum(rho_ab)?;
    Ok(l.iter().sum::<f64>().clamp(0.0, 1.0))
}

/// h2((1 + sqrt(1 - C^2)) / 2).
pub fn eof_from_concurrence(c: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&c) || c.is_nan() {
        return Err(Error::OutOfRange {
            what: "concurrence",
            value: c,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let c = c.clamp(0.0, 1.0);
    let x = 0.5 * (1.0 + (1.0 - c * c).sqrt());
    Ok(entropy_bits(&[x, 1.0 - x]))
}

/// Entropy of the first factor of a subnormalized bipartite vector, weighted by
/// its norm: p * S(Tr_2 |ψ><ψ| / p).
fn weighted_entanglement(psi: &CVector, d_first: usize, d_second: usize) -> f64 {
    let mut reduced = CMatrix::zeros(d_first, d_first);
    for a in 0..d_first {
        for a2 in a..d_first {
            let mut acc = linalg::ZERO;
            for c in 0..d_second {
                acc += psi[a * d_second + c] * psi[a2 * d_second + c].conj();
            }
            reduced[(a, a2)] = acc;
            reduced[(a2, a)] = acc.conj();
        }
    }
    let p = linalg::trace(&reduced).re;
    if p <= 1e-15 {
        return 0.0;
    }
    let values: Vec<f64> = if d_first == 2 {
        let (hi, lo) = linalg::eigvalsh_2x2(reduced[(0, 0)].re / p, reduced[(1, 1)].re / p, reduced[(0, 1)] / p);
        vec![hi, lo]
    } else {
        linalg::hermitian_eigenvalues(&(reduced / Complex64::new(p, 0.0)))
    };
    p * entropy_bits(&values)
}

/// E_a = max over decompositions of Σ p_j S(Tr_C |ψ_j><ψ_j|).
///
/// `m` is the ensemble size (default rank^2). The multistart search uses
/// twice `config.restarts`, as the landscape is flat near the optimum.
pub fn entanglement_of_assistance(
    rho_ac: &DensityOperator,
    m: Option<usize>,
    config: &OptimizerConfig,
) -> Result<f64> {
    if rho_ac.num_subsystems() != 2 {
        return Err(Error::Arity {
            expected: 2,
            found: rho_ac.num_subsystems(),
        });
    }
    let (d_first, d_second) = (rho_ac.dims()[0], rho_ac.dims()[1]);
    let factor = SpectralFactor::new(rho_ac);
    let rank = factor.rank();
    let m = m.unwrap_or(rank * rank);
    if m < rank {
        return Err(Error::EnsembleTooSmall { m, rank });
    }
    let average = |params: &[f64]| -> f64 {
        match factor.subnormalized_states(params, m) {
            Ok(states) => states
                .iter()
                .map(|psi| weighted_entanglement(psi, d_first, d_second))
                .sum(),
            Err(_) => f64::NAN,
        }
    };
    let dimension = isometry_param_count(rank, m);
    if dimension == 0 || rank == 1 {
        return Ok(average(&vec![0.0; dimension]));
    }
    let search = OptimizerConfig {
        restarts: config.restarts.saturating_mul(2),
        ..*config
    };
    let best = minimize_multistart(
        |x| -average(x),
        dimension,
        &isometry_bounds(rank, m),
        &search,
    )?;
    Ok(-best.value)
}

fn check_cut(rho: &DensityOperator, cut: &[usize]) -> Result<Vec<usize>> {
    let count = rho.num_subsystems();
    if cut.is_empty() {
        return Err(Error::EmptySelection);
    }
    if let Some(&index) = cut.iter().find(|&&i| i >= count) {
        return Err(Error::SubsystemOutOfRange { index, count });
    }
    let mut cut = cut.to_vec();
    cut.sort_unstable();
    cut.dedup();
    if cut.len() == count {
        return Err(Error::DimensionMismatch(
            "bipartition must leave both sides nonempty".into(),
        ));
    }
    Ok(cut)
}

/// Entropy of one side of a pure state; equals its distillable entanglement.
pub fn distillable_entanglement_pure(rho: &DensityOperator, cut: &[usize]) -> Result<f64> {
    let cut = check_cut(rho, cut)?;
    let largest = rho.eigenvalues()[0];
    if largest < 1.0 - DENSITY_TOL {
        return Err(Error::NotPure(largest));
    }
    Ok(von_neumann_entropy(&partial_trace(rho, &cut)?))
}

/// Transpose over the subsystems in `cut`.
pub fn partial_transpose(rho: &DensityOperator, cut: &[usize]) -> Result<CMatrix> {
    let cut = check_cut(rho, cut)?;
    let dims = rho.dims();
    let n = rho.dim();
    let flat = |digits: &[usize]| digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x);
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        let di = linalg::digits(i, dims);
        for j in 0..n {
            let dj = linalg::digits(j, dims);
            let (mut ti, mut tj) = (di.clone(), dj.clone());
            for &k in &cut {
                ti[k] = dj[k];
                tj[k] = di[k];
            }
            out[(flat(&ti), flat(&tj))] = rho.matrix()[(i, j)];
        }
    }
    Ok(out)
}

/// log2 ||ρ^{T_cut}||_1, an upper bound on distillable entanglement across
/// the cut.
pub fn log_negativity(rho: &DensityOperator, cut: &[usize]) -> Result<f64> {
    let pt = partial_transpose(rho, cut)?;
    let norm: f64 = linalg::hermitian_eigenvalues(&pt).iter().map(|v| v.abs()).sum();
    Ok(norm.log2().max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::binary_entropy;
    use crate::random::{haar_unitary, random_state, rng_from_seed, StateKind};
    use crate::state::tensor_product;
    use approx::assert_abs_diff_eq;

    fn bell() -> DensityOperator {
        Ket::from_real(&[2, 2], &[1.0, 0.0, 0.0, 1.0]).unwrap().to_density()
    }

    fn classical() -> DensityOperator {
        DensityOperator::diagonal(&[2, 2], &[0.5, 0.0, 0.0, 0.5]).unwrap()
    }

    fn product() -> DensityOperator {
        let a = random_state(21, &[2], StateKind::Mixed { rank: None }).unwrap();
        let b = random_state(22, &[2], StateKind::Mixed { rank: None }).unwrap();
        tensor_product(&a, &b).unwrap()
    }

    fn ghz_ac(alpha: f64) -> DensityOperator {
        let a2 = alpha * alpha;
        DensityOperator::diagonal(&[2, 2], &[a2, 0.0, 0.0, 1.0 - a2]).unwrap()
    }

    fn werner(p: f64) -> DensityOperator {
        let m = bell().matrix() * Complex64::new(p, 0.0)
            + CMatrix::identity(4, 4) * Complex64::new((1.0 - p) / 4.0, 0.0);
        crate::state::validate_density(m, &[2, 2]).unwrap()
    }

    #[test]
    fn classical_correlation_examples() {
        let cfg = OptimizerConfig::default();
        assert_abs_diff_eq!(classical_correlation(&bell(), 0, &cfg).unwrap(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(classical_correlation(&product(), 0, &cfg).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(classical_correlation(&classical(), 0, &cfg).unwrap(), 1.0, epsilon = 1e-9);
        let qutrit = DensityOperator::maximally_mixed(&[3, 2]).unwrap();
        assert!(matches!(
            classical_correlation(&qutrit, 0, &cfg),
            Err(Error::Unsupported(_))
        ));
        assert!(classical_correlation(&bell(), 2, &cfg).is_err());
    }

    #[test]
    fn discord_examples() {
        let cfg = OptimizerConfig::default();
        assert_abs_diff_eq!(quantum_discord(&bell(), 0, &cfg).unwrap(), 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(quantum_discord(&classical(), 0, &cfg).unwrap(), 0.0, epsilon = 1e-6);
        assert!(quantum_discord(&product(), 1, &cfg).unwrap().abs() < 1e-9);
    }

    #[test]
    fn werner_discord_matches_closed_form() {
        // Werner states are measurement-isotropic, so the Z basis is optimal:
        // outcomes leave B with eigenvalues (1 ± p)/2.
        let cfg = OptimizerConfig::default();
        for &p in &[0.2, 0.5, 0.8] {
            let rho = werner(p);
            let i = mutual_information(&rho, &[0], &[1]).unwrap();
            let j = 1.0 - binary_entropy((1.0 + p) / 2.0);
            assert_abs_diff_eq!(quantum_discord(&rho, 0, &cfg).unwrap(), i - j, epsilon = 1e-7);
        }
    }

    #[test]
    fn concurrence_examples() {
        assert_abs_diff_eq!(concurrence(&bell()).unwrap(), 1.0, epsilon = 1e-9);
        let prod = random_state(4, &[2], StateKind::Pure).unwrap();
        let prod = tensor_product(&prod, &random_state(5, &[2], StateKind::Pure).unwrap()).unwrap();
        assert!(concurrence(&prod).unwrap() < 1e-6);
        for &p in &[0.0f64, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
            let expect = ((3.0 * p - 1.0) / 2.0).max(0.0);
            assert_abs_diff_eq!(concurrence(&werner(p)).unwrap(), expect, epsilon = 1e-7);
        }
        let three = DensityOperator::maximally_mixed(&[2, 2, 2]).unwrap();
        assert!(concurrence(&three).is_err());
    }

    #[test]
    fn eof_examples() {
        assert_abs_diff_eq!(eof_from_concurrence(1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(eof_from_concurrence(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(eof_from_concurrence(0.5).unwrap(), 0.354578902665, epsilon = 1e-11);
        assert!(eof_from_concurrence(1.5).is_err());
        assert!(eof_from_concurrence(-0.1).is_err());
    }

    #[test]
    fn assistance_concurrence_examples() {
        assert_abs_diff_eq!(concurrence_of_assistance(&bell()).unwrap(), 1.0, epsilon = 1e-7);
        let prod = random_state(4, &[2], StateKind::Pure).unwrap();
        let prod = tensor_product(&prod, &random_state(5, &[2], StateKind::Pure).unwrap()).unwrap();
        assert!(concurrence_of_assistance(&prod).unwrap() < 1e-6);
        for &alpha in &[0.2f64, 0.5, 0.8] {
            let expect = 2.0 * alpha * (1.0 - alpha * alpha).sqrt();
            assert_abs_diff_eq!(concurrence_of_assistance(&ghz_ac(alpha)).unwrap(), expect, epsilon = 1e-7);
        }
    }

    #[test]
    fn assistance_examples() {
        let cfg = OptimizerConfig::default();
        let pure = random_state(33, &[2, 2], StateKind::Pure).unwrap();
        let sa = von_neumann_entropy(&partial_trace(&pure, &[0]).unwrap());
        assert_abs_diff_eq!(entanglement_of_assistance(&pure, None, &cfg).unwrap(), sa, epsilon = 1e-9);
        // Every decomposition element is product once one factor is pure.
        let ra = random_state(21, &[2], StateKind::Mixed { rank: None }).unwrap();
        let rc = random_state(23, &[2], StateKind::Pure).unwrap();
        let prod = tensor_product(&ra, &rc).unwrap();
        assert!(entanglement_of_assistance(&prod, None, &cfg).unwrap().abs() < 1e-9);
        // A mixed product can still be assisted: I/4 is an even mixture of Bell states.
        let mixed = DensityOperator::maximally_mixed(&[2, 2]).unwrap();
        let ea = entanglement_of_assistance(&mixed, Some(4), &cfg).unwrap();
        assert!(ea > 1.0 - 2e-3 && ea <= 1.0 + 1e-12);
        for &alpha in &[0.3f64, 0.5, std::f64::consts::FRAC_1_SQRT_2, 0.9] {
            let ea = entanglement_of_assistance(&ghz_ac(alpha), None, &cfg).unwrap();
            assert_abs_diff_eq!(ea, binary_entropy(alpha * alpha), epsilon = 2e-3);
        }
        assert!(matches!(
            entanglement_of_assistance(&ghz_ac(0.6), Some(1), &cfg),
            Err(Error::EnsembleTooSmall { .. })
        ));
    }

    #[test]
    fn assistance_ordering_on_rank_two_states() {
        let cfg = OptimizerConfig::default();
        for seed in 0..8 {
            let rho = random_state(seed, &[2, 2], StateKind::Mixed { rank: Some(2) }).unwrap();
            let eof = eof_from_concurrence(concurrence(&rho).unwrap()).unwrap();
            let ea = entanglement_of_assistance(&rho, None, &cfg).unwrap();
            let sa = von_neumann_entropy(&partial_trace(&rho, &[0]).unwrap());
            let sc = von_neumann_entropy(&partial_trace(&rho, &[1]).unwrap());
            assert!(eof <= ea + 1e-3, "seed {seed}: eof {eof} > ea {ea}");
            assert!(ea <= sa.min(sc) + 1e-3, "seed {seed}: ea {ea} > min entropy");
        }
    }

    #[test]
    fn assistance_is_local_unitary_invariant() {
        let cfg = OptimizerConfig::default();
        let rho = random_state(77, &[2, 2], StateKind::Mixed { rank: Some(2) }).unwrap();
        let mut rng = rng_from_seed(5);
        let u = linalg::kron(&haar_unitary(&mut rng, 2), &haar_unitary(&mut rng, 2));
        let rotated = rho.conjugate_by(&u).unwrap();
        let a = entanglement_of_assistance(&rho, None, &cfg).unwrap();
        let b = entanglement_of_assistance(&rotated, None, &cfg).unwrap();
        assert!((a - b).abs() < 2e-3);
    }

    #[test]
    fn distillable_pure_examples() {
        assert_abs_diff_eq!(distillable_entanglement_pure(&bell(), &[0]).unwrap(), 1.0, epsilon = 1e-12);
        let alpha: f64 = 0.45;
        let mut amps = [0.0; 8];
        amps[0] = alpha;
        amps[7] = (1.0 - alpha * alpha).sqrt();
        let ghz = Ket::from_real(&[2, 2, 2], &amps).unwrap().to_density();
        assert_abs_diff_eq!(
            distillable_entanglement_pure(&ghz, &[0, 1]).unwrap(),
            binary_entropy(alpha * alpha),
            epsilon = 1e-12
        );
        let prod = Ket::basis(&[2, 2], 1).unwrap().to_density();
        assert!(distillable_entanglement_pure(&prod, &[0]).unwrap().abs() < 1e-12);
        assert!(matches!(
            distillable_entanglement_pure(&classical(), &[0]),
            Err(Error::NotPure(_))
        ));
        assert!(distillable_entanglement_pure(&bell(), &[0, 1]).is_err());
    }

    #[test]
    fn distillable_pure_is_symmetric() {
        for seed in 0..20 {
            let psi = random_state(seed, &[2, 2, 2], StateKind::Pure).unwrap();
            let ab = distillable_entanglement_pure(&psi, &[0, 1]).unwrap();
            let c = distillable_entanglement_pure(&psi, &[2]).unwrap();
            assert!((ab - c).abs() < 1e-9);
        }
    }

    #[test]
    fn log_negativity_examples() {
        assert_abs_diff_eq!(log_negativity(&bell(), &[1]).unwrap(), 1.0, epsilon = 1e-12);
        assert!(log_negativity(&product(), &[1]).unwrap().abs() < 1e-12);
        assert!(log_negativity(&classical(), &[0]).unwrap().abs() < 1e-12);
        let pt = partial_transpose(&bell(), &[1]).unwrap();
        let mut spectrum = linalg::hermitian_eigenvalues(&pt);
        spectrum.sort_by(|a, b| a.total_cmp(b));
        assert_abs_diff_eq!(spectrum[0], -0.5, epsilon = 1e-12);
        assert!(spectrum[1..].iter().all(|v| (v - 0.5).abs() < 1e-12));
    }

    #[test]
    fn ensemble_validation() {
        let p = ProbabilityVector::new(vec![1.0]).unwrap();
        let k1 = Ket::basis(&[2], 0).unwrap();
        let k2 = Ket::basis(&[2, 2], 0).unwrap();
        assert!(DecompositionEnsemble::new(p.clone(), vec![k1.clone(), k1.clone()]).is_err());
        let p2 = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
        assert!(DecompositionEnsemble::new(p2, vec![k1.clone(), k2]).is_err());
        assert!(DecompositionEnsemble::new(p, vec![k1]).is_ok());
    }
}
