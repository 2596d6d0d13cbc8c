//! Randomized invariant suites plus the worked-example anchors, runnable
//! from the command line.

use crate::bounds::{
    ci_upper_bound, dc_identity_check, memory_bound, one_way_ci_pure, post_ci_bound,
    tripartite_pair_bounds, TripartiteScenario,
};
use crate::correlations::{concurrence, eof_from_concurrence, quantum_discord};
use crate::entropy::{binary_entropy, mutual_information, ssa_gap_with, von_neumann_entropy};
use crate::error::Result;
use crate::linalg::{kron, max_abs_diff, CMatrix};
use crate::measurement::{uncertainty_sum, ObservableBasis, ObservablePair};
use crate::optimizer::OptimizerConfig;
use crate::random::{ginibre_state, haar_ket, haar_unitary, rng_from_seed};
use crate::scenario::{run_scenario, ScenarioConfig, ScenarioKind};
use crate::state::{partial_trace, tensor_product, validate_density, DensityOperator, Ket};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Depth {
    Quick,
    Full,
}

impl Depth {
    pub fn draws(self) -> usize {
        match self {
            Depth::Quick => 100,
            Depth::Full => 1000,
        }
    }
}

/// Deliberate defects for checking that the suites can fail.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Faults {
    /// Flip the sign of the von Neumann entropy inside the SSA suite.
    pub negate_entropy: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub draws: usize,
    pub failures: usize,
    /// Largest amount by which any check missed its tolerance.
    pub worst_excess: f64,
    pub first_error: Option<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub depth: Depth,
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }
}

/// How far `value` falls below `floor`, zero if it does not.
fn below(value: f64, floor: f64) -> f64 {
    (floor - value).max(0.0)
}

/// How far `value` rises above `ceiling`, zero if it does not.
fn above(value: f64, ceiling: f64) -> f64 {
    (value - ceiling).max(0.0)
}

fn random_basis(rng: &mut impl Rng, d: usize) -> Result<ObservableBasis> {
    ObservableBasis::from_unitary(&haar_unitary(rng, d))
}

fn random_pair(rng: &mut impl Rng) -> Result<ObservablePair> {
    ObservablePair::new(random_basis(rng, 2)?, random_basis(rng, 2)?)
}

fn mixed(rng: &mut impl Rng, dims: &[usize]) -> Result<DensityOperator> {
    let total: usize = dims.iter().product();
    let rank = rng.random_range(1..=total);
    ginibre_state(rng, dims, Some(rank))
}

fn pure(rng: &mut impl Rng, dims: &[usize]) -> Result<DensityOperator> {
    Ok(haar_ket(rng, dims)?.to_density())
}

/// Σ p_ij |a_i⟩⟨a_i| ⊗ |b_j⟩⟨b_j| in random local bases.
fn classically_correlated(rng: &mut impl Rng) -> Result<DensityOperator> {
    let ua = haar_unitary(rng, 2);
    let ub = haar_unitary(rng, 2);
    let u = kron(&ua, &ub);
    let weights: Vec<f64> = (0..4).map(|_| rng.random::<f64>()).collect();
    let sum: f64 = weights.iter().sum();
    let diag = CMatrix::from_diagonal(&DVector::from_iterator(
        4,
        weights.iter().map(|w| Complex64::from(w / sum)),
    ));
    validate_density(&u * diag * u.adjoint(), &[2, 2])
}

type Check<'a> = Box<dyn Fn(u64) -> Result<f64> + Sync + 'a>;

struct Suite<'a> {
    name: &'static str,
    draws: usize,
    check: Check<'a>,
}

fn run_suite(index: usize, seed: u64, suite: &Suite) -> SuiteResult {
    let salt = (index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let outcomes: Vec<Result<f64>> = (0..suite.draws)
        .into_par_iter()
        .map(|i| (suite.check)(seed ^ salt ^ (i as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9)))
        .collect();
    let mut result = SuiteResult {
        name: suite.name,
        draws: suite.draws,
        failures: 0,
        worst_excess: 0.0,
        first_error: None,
    };
    for outcome in outcomes {
        match outcome {
            Ok(excess) if excess > 0.0 || excess.is_nan() => {
                result.failures += 1;
                result.worst_excess = result.worst_excess.max(excess);
            }
            Ok(_) => {}
            Err(e) => {
                result.failures += 1;
                result.first_error.get_or_insert_with(|| e.to_string());
            }
        }
    }
    result
}

pub fn run_selftest(depth: Depth, seed: u64) -> SelftestReport {
    run_selftest_with(depth, seed, Faults::default())
}

pub fn run_selftest_with(depth: Depth, seed: u64, faults: Faults) -> SelftestReport {
    let n = depth.draws();
    let entropy: fn(&DensityOperator) -> f64 = if faults.negate_entropy {
        |rho| -von_neumann_entropy(rho)
    } else {
        von_neumann_entropy
    };
    let opt = OptimizerConfig::default();
    let opt = &opt;

    let suites: Vec<Suite> = vec![
        Suite {
            name: "density_operators",
            draws: n,
            check: Box::new(|s| {
                let mut rng = rng_from_seed(s);
                let dims: &[usize] = [&[2, 2][..], &[2, 3], &[2, 2, 2], &[3, 3]][rng.random_range(0..4)];
                let rho = mixed(&mut rng, dims)?;
                let ev = rho.eigenvalues();
                let tr: f64 = ev.iter().sum();
                let again = validate_density(rho.matrix().clone(), dims)?;
                Ok(above((tr - 1.0).abs(), TOL)
                    .max(below(*ev.last().unwrap(), 0.0))
                    .max(above(max_abs_diff(again.matrix(), rho.matrix()), TOL)))
            }),
        },
        Suite {
            name: "partial_trace",
            draws: n,
            check: Box::new(|s| {
                let mut rng = rng_from_seed(s);
                let a = mixed(&mut rng, &[2])?;
                let b = mixed(&mut rng, &[3])?;
                let ab = tensor_product(&a, &b)?;
                let back = partial_trace(&ab, &[0])?;
                let abc = mixed(&mut rng, &[2, 2, 2])?;
                let direct = partial_trace(&abc, &[0])?;
                let stepwise = partial_trace(&partial_trace(&abc, &[0, 1])?, &[0])?;
                Ok(above(max_abs_diff(back.matrix(), a.matrix()), TOL)
                    .max(above(max_abs_diff(direct.matrix(), stepwise.matrix()), TOL)))
            }),
        },
        Suite {
            name: "entropy_range",
            draws: n,
            check: Box::new(|s| {
                let mut rng = rng_from_seed(s);
                let rho = mixed(&mut rng, &[2, 2])?;
                let u = haar_unitary(&mut rng, 4);
                let h = von_neumann_entropy(&rho);
                let h_rot = von_neumann_entropy(&rho.conjugate_by(&u)?);
                Ok(below(h, 0.0).max(above(h, 2.0 + TOL)).max(above((h - h_rot).abs(), TOL)))
            }),
        },
        Suite {
            name: "mutual_information",
            draws: n,
            check: Box::new(|s| {
                let mut rng = rng_from_seed(s);
                let rho = mixed(&mut rng, &[2, 2])?;
                let i = mutual_information(&rho, &[0], &[1])?;
                let sa = von_neumann_entropy(&partial_trace(&rho, &[0])?);
                let sb = von_neumann_entropy(&partial_trace(&rho, &[1])?);
                Ok(below(i, -TOL).max(above(i, 2.0 * sa.min(sb) + TOL)))
            }),
        },
        Suite {
            name: "strong_subadditivity",
            draws: n,
            check: Box::new(move |s| {
                let mut rng = rng_from_seed(s);
                let rho = mixed(&mut rng, &[2, 2, 2])?;
                let psi = pure(&mut rng, &[2, 2, 2])?;
                Ok(below(ssa_gap_with(&rho, entropy)?, -TOL)
                    .max(above(ssa_gap_with(&psi, entropy)?.abs(), TOL)))
            }),
        },
        Suite {
            name: "memory_bound",
            draws: n,
            check: Box::new(|s| {
                let mut rng = rng_from_seed(s);
                let rho = mixed(&mut rng, &[2, 2])?;
                let pair = random_pair(&mut rng)?;
                let report = memory_bound(&rho, &pair)?;
                let alt = report.mutual_information_form().expect("memory bound has all components");
                Ok(below(uncertainty_sum(&rho, &pair)?, report.bound - TOL)
                    .max(above((alt - report.bound).abs(), 1e-12)))
            }),
        },
        Suite {
            name: "concurrence",
            draws: n,
            check: Box::new(|s| {
                let mut rng = rng_from_seed(s);
                let psi = pure(&mut rng, &[2, 2])?;
                let eof = eof_from_concurrence(concurrence(&psi)?)?;
                let sa = von_neumann_entropy(&partial_trace(&psi, &[0])?);
                let c = concurrence(&mixed(&mut rng, &[2, 2])?)?;
                Ok(above((eof - sa).abs(), TOL).max(below(c, 0.0)).max(above(c, 1.0)))
            }),
        },
        Suite {
            name: "discord",
            draws: n,
            check: Box::new(move |s| {
                let mut rng = rng_from_seed(s);
                let rho = mixed(&mut rng, &[2, 2])?;
                let d = quantum_discord(&rho, 1, opt)?;
                let classical = quantum_discord(&classically_correlated(&mut rng)?, 1, opt)?;
                let a = mixed(&mut rng, &[2])?;
                let b = mixed(&mut rng, &[2])?;
                let product = quantum_discord(&tensor_product(&a, &b)?, 1, opt)?;
                Ok(below(d, -TOL)
                    .max(above(classical, 1e-6))
                    .max(above(product.abs(), TOL)))
            }),
        },
        Suite {
            name: "dense_coding",
            draws: (n / 10).max(10),
            check: Box::new(move |s| {
                let mut rng = rng_from_seed(s);
                let psi = haar_ket(&mut rng, &[2, 2, 2])?;
                let id = dc_identity_check(&psi, opt)?;
                Ok(above((id.conditional_entropy - id.discord_difference).abs(), 5e-3)
                    .max(above((id.conditional_entropy - id.capacity_difference).abs(), TOL)))
            }),
        },
        Suite {
            name: "concentration",
            draws: (n / 20).max(5),
            check: Box::new(move |s| {
                let mut rng = rng_from_seed(s);
                let psi = haar_ket(&mut rng, &[2, 2, 2])?;
                let sc = TripartiteScenario::new(psi.to_density(), random_pair(&mut rng)?)?;
                let ci = one_way_ci_pure(&psi, None, opt)?;
                let after = post_ci_bound(&sc, &ci)?;
                let (_, before) = tripartite_pair_bounds(&sc)?;
                let upper = ci_upper_bound(&sc)?;
                Ok(above(after.bound, before.bound + 2e-3).max(above(ci.value, upper.value + 2e-3)))
            }),
        },
        Suite {
            name: "worked_examples",
            draws: 1,
            check: Box::new(move |_| {
                let mut excess: f64 = 0.0;
                let mut cfg = ScenarioConfig::new(ScenarioKind::Fig4);
                cfg.optimizer = *opt;
                cfg.steps = 3;
                cfg.from = 0.5;
                cfg.to = FRAC_1_SQRT_2;
                let rows = run_scenario(&cfg)?;
                for r in &rows {
                    excess = excess
                        .max(above((r.before - 1.0).abs(), TOL))
                        .max(above((r.after - (1.0 - binary_entropy(r.x * r.x))).abs(), 2e-3));
                }
                excess = excess.max(above(rows[2].after, 2e-3));
                for (kind, tol) in [(ScenarioKind::Fig2, 2e-3), (ScenarioKind::Fig3, 5e-3)] {
                    let mut cfg = ScenarioConfig::new(kind);
                    cfg.optimizer = *opt;
                    cfg.steps = 2;
                    cfg.to = FRAC_PI_2;
                    let rows = run_scenario(&cfg)?;
                    for (row, (before, after)) in rows.iter().zip([(1.0, 1.0), (2.0, 1.0)]) {
                        excess = excess
                            .max(above((row.before - before).abs(), tol))
                            .max(above((row.after - after).abs(), tol));
                    }
                }
                let bell = Ket::from_real(&[2, 2], &[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2])?;
                let d = quantum_discord(&bell.to_density(), 1, opt)?;
                Ok(excess.max(above((d - 1.0).abs(), 1e-6)))
            }),
        },
    ];

    SelftestReport {
        depth,
        seed,
        suites: suites
            .iter()
            .enumerate()
            .map(|(i, suite)| run_suite(i, seed, suite))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_run_passes() {
        let report = run_selftest(Depth::Quick, 0);
        for suite in &report.suites {
            assert!(suite.passed(), "{suite:?}");
        }
        assert!(report.suites.len() >= 8);
        assert!(report.suites.iter().all(|s| s.draws > 0));
        assert_eq!(report.suites[0].draws, 100);
    }

    #[test]
    fn negated_entropy_breaks_ssa() {
        let report = run_selftest_with(Depth::Quick, 0, Faults { negate_entropy: true });
        let ssa = report
            .suites
            .iter()
            .find(|s| s.name == "strong_subadditivity")
            .unwrap();
        assert!(!ssa.passed());
        assert!(!report.passed());
    }

    #[test]
    fn classical_states_are_valid() {
        let mut rng = rng_from_seed(1);
        let rho = classically_correlated(&mut rng).unwrap();
        assert_eq!(rho.dims(), &[2, 2]);
    }
}
