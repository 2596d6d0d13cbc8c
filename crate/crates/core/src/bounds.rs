//! Entropic uncertainty lower bounds, with and without quantum memory, and
//! after Bob and Charlie concentrate their correlations with Alice.
//!
//! Concentrated information (CI) is never computed by searching over LOCC
//! protocols. It comes from one of three routes:
//!
//! * pure tripartite states: one-way CI = S(ρ_A) + E_a(ρ_AC);
//! * states of the form ρ_AB ⊗ ρ_C: CI = I(A:B) - D(A|B), which is the
//!   classical correlation J extracted by measuring Bob;
//! * anything else: the upper bound min{I(A:BC), S(ρ_A) + E_d(AB:C)}, with
//!   E_d replaced by the log-negativity for mixed states. Because the
//!   log-negativity upper-bounds E_d, the resulting uncertainty bound stays a
//!   valid lower bound.

use crate::correlations::{
    distillable_entanglement_pure, entanglement_of_assistance, log_negativity, quantum_discord,
};
use crate::entropy::{conditional_entropy, mutual_information, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::measurement::ObservablePair;
use crate::optimizer::OptimizerConfig;
use crate::state::{partial_trace, DensityOperator, Ket, A, B, C, DENSITY_TOL};
use serde::Serialize;

/// Named inputs of an assembled bound, all in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    /// log2(1/c).
    LogInvC,
    /// S(ρ_A).
    EntropyA,
    /// S(A|M) for the memory M named by the bound kind.
    ConditionalEntropy,
    /// I(A:M) for the memory M named by the bound kind.
    MutualInformation,
    /// I(A:BC).
    MutualInformationABC,
    ConcentratedInformation,
    EntanglementOfAssistance,
    Discord,
    /// Upper bound on E_d(AB:C) used inside the CI upper bound.
    DistillableSurrogate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CiSource {
    /// S(ρ_A) + E_a(ρ_AC) for pure ρ_ABC.
    OneWayPure,
    /// I(A:B) - D(A|B) for ρ_AB ⊗ ρ_C.
    ProductWithC,
    /// min{I(A:BC), S(ρ_A) + E_d(AB:C)}.
    UpperBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "type", content = "source")]
pub enum BoundKind {
    /// log2(1/c) + S(A|B) for a bipartite state.
    Memory,
    /// log2(1/c) + S(A|B) on the AB marginal of a tripartite state.
    MemoryB,
    /// log2(1/c) + S(A|C) on the AC marginal of a tripartite state.
    MemoryC,
    /// log2(1/c) + S(ρ_A) - CI.
    Concentrated(CiSource),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub components: Vec<(Component, f64)>,
    pub bound: f64,
}

impl BoundReport {
    pub fn component(&self, which: Component) -> Option<f64> {
        self.components
            .iter()
            .find(|(c, _)| *c == which)
            .map(|&(_, v)| v)
    }

    /// For memory bounds, log2(1/c) + S(ρ_A) - I(A:M), which equals `bound`
    /// up to rounding.
    pub fn mutual_information_form(&self) -> Option<f64> {
        Some(
            self.component(Component::LogInvC)? + self.component(Component::EntropyA)?
                - self.component(Component::MutualInformation)?,
        )
    }

    fn memory(kind: BoundKind, log_inv_c: f64, entropy_a: f64, cond: f64, mutual: f64) -> Self {
        let bound = log_inv_c + cond;
        let report = BoundReport {
            kind,
            components: vec![
                (Component::LogInvC, log_inv_c),
                (Component::EntropyA, entropy_a),
                (Component::ConditionalEntropy, cond),
                (Component::MutualInformation, mutual),
            ],
            bound,
        };
        debug_assert!(
            (report.mutual_information_form().unwrap() - bound).abs() <= 1e-12 * (1.0 + bound.abs()),
            "memory bound decompositions disagree"
        );
        report
    }
}

/// Concentrated information together with the measure it was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CiEstimate {
    pub value: f64,
    pub source: CiSource,
    /// S(ρ_A) for the state the CI refers to.
    pub entropy_a: f64,
    /// E_a(ρ_AC), D(A|B), or the E_d surrogate, depending on `source`.
    pub measure: f64,
}

/// ρ_ABC together with the observable pair measured on A.
#[derive(Debug, Clone, PartialEq)]
pub struct TripartiteScenario {
    state: DensityOperator,
    pair: ObservablePair,
}

impl TripartiteScenario {
    pub fn new(state: DensityOperator, pair: ObservablePair) -> Result<Self> {
        if state.num_subsystems() != 3 {
            return Err(Error::Arity {
                expected: 3,
                found: state.num_subsystems(),
            });
        }
        if state.dims()[A] != pair.dim() {
            return Err(Error::DimensionMismatch(format!(
                "observables of dimension {} on subsystem A of dimension {}",
                pair.dim(),
                state.dims()[A]
            )));
        }
        Ok(TripartiteScenario { state, pair })
    }

    pub fn state(&self) -> &DensityOperator {
        &self.state
    }

    pub fn pair(&self) -> &ObservablePair {
        &self.pair
    }

    fn entropy_a(&self) -> Result<f64> {
        Ok(von_neumann_entropy(&partial_trace(&self.state, &[A])?))
    }
}

fn require_arity(rho: &DensityOperator, n: usize) -> Result<()> {
    if rho.num_subsystems() != n {
        return Err(Error::Arity {
            expected: n,
            found: rho.num_subsystems(),
        });
    }
    Ok(())
}

fn require_pure_qubits(psi: &Ket) -> Result<()> {
    if psi.dims() != [2, 2, 2] {
        return Err(Error::Unsupported(format!(
            "expected three qubits, found dims {:?}",
            psi.dims()
        )));
    }
    Ok(())
}

/// log2(1/c).
pub fn maassen_uffink_bound(pair: &ObservablePair) -> f64 {
    pair.log_inv_c()
}

/// log2(1/c) + S(ρ).
pub fn mixed_state_bound(rho_a: &DensityOperator, pair: &ObservablePair) -> Result<f64> {
    require_arity(rho_a, 1)?;
    if rho_a.dim() != pair.dim() {
        return Err(Error::DimensionMismatch(format!(
            "observables of dimension {} on a state of dimension {}",
            pair.dim(),
            rho_a.dim()
        )));
    }
    Ok(pair.log_inv_c() + von_neumann_entropy(rho_a))
}

fn memory_bound_with_kind(
    rho_am: &DensityOperator,
    pair: &ObservablePair,
    kind: BoundKind,
) -> Result<BoundReport> {
    require_arity(rho_am, 2)?;
    if rho_am.dims()[0] != pair.dim() {
        return Err(Error::DimensionMismatch(format!(
            "observables of dimension {} on subsystem of dimension {}",
            pair.dim(),
            rho_am.dims()[0]
        )));
    }
    let s_a = von_neumann_entropy(&partial_trace(rho_am, &[0])?);
    let s_m = von_neumann_entropy(&partial_trace(rho_am, &[1])?);
    let s_am = von_neumann_entropy(rho_am);
    let cond = s_am - s_m;
    let mutual = s_a + s_m - s_am;
    Ok(BoundReport::memory(kind, pair.log_inv_c(), s_a, cond, mutual))
}

/// log2(1/c) + S(A|B), reported alongside S(ρ_A) and I(A:B).
pub fn memory_bound(rho_ab: &DensityOperator, pair: &ObservablePair) -> Result<BoundReport> {
    memory_bound_with_kind(rho_ab, pair, BoundKind::Memory)
}

/// Memory bounds for Bob (on ρ_AB) and Charlie (on ρ_AC).
pub fn tripartite_pair_bounds(sc: &TripartiteScenario) -> Result<(BoundReport, BoundReport)> {
    let rho_ab = partial_trace(&sc.state, &[A, B])?;
    let rho_ac = partial_trace(&sc.state, &[A, C])?;
    Ok((
        memory_bound_with_kind(&rho_ab, &sc.pair, BoundKind::MemoryB)?,
        memory_bound_with_kind(&rho_ac, &sc.pair, BoundKind::MemoryC)?,
    ))
}

/// One-way CI of a pure tripartite state: S(ρ_A) + E_a(ρ_AC).
pub fn one_way_ci_pure(psi: &Ket, m: Option<usize>, config: &OptimizerConfig) -> Result<CiEstimate> {
    if psi.dims().len() != 3 {
        return Err(Error::Arity {
            expected: 3,
            found: psi.dims().len(),
        });
    }
    let rho = psi.to_density();
    let entropy_a = von_neumann_entropy(&partial_trace(&rho, &[A])?);
    let assistance = entanglement_of_assistance(&partial_trace(&rho, &[A, C])?, m, config)?;
    Ok(CiEstimate {
        value: entropy_a + assistance,
        source: CiSource::OneWayPure,
        entropy_a,
        measure: assistance,
    })
}

/// CI of ρ_AB ⊗ ρ_C: I(A:B) - D, with the discord measured on subsystem
/// `measured` of ρ_AB (B = 1 by default; A = 0 gives the other reading).
///
/// A three-subsystem input is reduced to its AB marginal first.
pub fn ci_product(rho: &DensityOperator, measured: usize, config: &OptimizerConfig) -> Result<CiEstimate> {
    let rho_ab = match rho.num_subsystems() {
        2 => rho.clone(),
        3 => partial_trace(rho, &[A, B])?,
        found => return Err(Error::Arity { expected: 2, found }),
    };
    let entropy_a = von_neumann_entropy(&partial_trace(&rho_ab, &[0])?);
    let mutual = mutual_information(&rho_ab, &[0], &[1])?;
    let discord = quantum_discord(&rho_ab, measured, config)?;
    Ok(CiEstimate {
        value: mutual - discord,
        source: CiSource::ProductWithC,
        entropy_a,
        measure: discord,
    })
}

/// min{I(A:BC), S(ρ_A) + E_d(AB:C)} with E_d exact for pure states and
/// replaced by the log-negativity otherwise.
pub fn ci_upper_bound(sc: &TripartiteScenario) -> Result<CiEstimate> {
    let rho = &sc.state;
    let entropy_a = sc.entropy_a()?;
    let mutual = mutual_information(rho, &[A], &[B, C])?;
    let surrogate = if rho.eigenvalues()[0] >= 1.0 - DENSITY_TOL {
        distillable_entanglement_pure(rho, &[C])?
    } else {
        log_negativity(rho, &[C])?
    };
    Ok(CiEstimate {
        value: mutual.min(entropy_a + surrogate),
        source: CiSource::UpperBound,
        entropy_a,
        measure: surrogate,
    })
}

/// log2(1/c) + S(ρ_A) - CI.
pub fn post_ci_bound(sc: &TripartiteScenario, ci: &CiEstimate) -> Result<BoundReport> {
    let log_inv_c = sc.pair.log_inv_c();
    let entropy_a = sc.entropy_a()?;
    let mut components = vec![
        (Component::LogInvC, log_inv_c),
        (Component::EntropyA, entropy_a),
        (Component::ConcentratedInformation, ci.value),
    ];
    components.push(match ci.source {
        CiSource::OneWayPure => (Component::EntanglementOfAssistance, ci.measure),
        CiSource::ProductWithC => (Component::Discord, ci.measure),
        CiSource::UpperBound => (Component::DistillableSurrogate, ci.measure),
    });
    Ok(BoundReport {
        kind: BoundKind::Concentrated(ci.source),
        components,
        bound: log_inv_c + entropy_a - ci.value,
    })
}

/// Single-copy dense coding capacity log2(d_A) + max{0, -S(A|B)}.
pub fn dc_capacity(rho_ab: &DensityOperator) -> Result<f64> {
    require_arity(rho_ab, 2)?;
    let coherent = -conditional_entropy(rho_ab, &[0], &[1])?;
    Ok((rho_ab.dims()[0] as f64).log2() + coherent.max(0.0))
}

/// The three sides of S(A|B) = D(C|A) - D(B|A) = C_DC(A⟩C) - C_DC(A⟩B)
/// for a pure three-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DenseCodingIdentity {
    /// S(A|B).
    pub conditional_entropy: f64,
    /// D(C|A) - D(B|A), both measured on A.
    pub discord_difference: f64,
    /// C_DC(A⟩C) - C_DC(A⟩B).
    pub capacity_difference: f64,
}

pub fn dc_identity_check(psi: &Ket, config: &OptimizerConfig) -> Result<DenseCodingIdentity> {
    require_pure_qubits(psi)?;
    let rho = psi.to_density();
    let rho_ab = partial_trace(&rho, &[A, B])?;
    let rho_ac = partial_trace(&rho, &[A, C])?;
    let cond_ab = conditional_entropy(&rho_ab, &[0], &[1])?;
    let discord_b = quantum_discord(&rho_ab, 0, config)?;
    let discord_c = quantum_discord(&rho_ac, 0, config)?;
    Ok(DenseCodingIdentity {
        conditional_entropy: cond_ab,
        discord_difference: discord_c - discord_b,
        capacity_difference: dc_capacity(&rho_ac)? - dc_capacity(&rho_ab)?,
    })
}
