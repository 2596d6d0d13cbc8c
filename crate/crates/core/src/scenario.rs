//! Parameter sweeps over the three worked examples (W-class pure state,
//! rank-2 AB state times a diagonal C, GHZ), single-state evaluation, and
//! the CSV writer.
//!
//! CSV columns by kind:
//!
//! * `fig2`: `theta,theta_over_pi,before,after,ci,s_a,e_a,eof_ac`
//! * `fig3`: `theta,theta_over_pi,before,after,ci,s_a,discord`
//! * `fig4`: `alpha,before,after,ci,s_a,e_a`
//! * `custom`: `row,before,after,ci,s_a,measure`
//!
//! `before` is log2(1/c) + S(A|C) and `after` is log2(1/c) + S(ρ_A) - CI.

use crate::bounds::{
    ci_product, ci_upper_bound, memory_bound, one_way_ci_pure, post_ci_bound,
    tripartite_pair_bounds, BoundReport, CiEstimate, TripartiteScenario,
};
use crate::correlations::{concurrence, eof_from_concurrence};
use crate::error::{Error, Result};
use crate::io::{read_state, StateFile};
use crate::linalg::max_abs_diff;
use crate::measurement::{uncertainty_sum, ObservablePair};
use crate::optimizer::OptimizerConfig;
use crate::state::{
    partial_trace, tensor_product, validate_density, DensityOperator, Ket, A, B, C, DENSITY_TOL,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Allowed excess of the after-bound over the before-bound on a row, which
/// covers optimizer shortfall in E_a and the discord.
pub const ROW_ORDER_TOL: f64 = 2e-3;

pub const DEFAULT_STEPS: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Fig2,
    Fig3,
    Fig4,
    Custom,
}

impl ScenarioKind {
    fn domain(self) -> (&'static str, f64, f64) {
        match self {
            ScenarioKind::Fig2 | ScenarioKind::Fig3 => ("theta", 0.0, PI),
            ScenarioKind::Fig4 => ("alpha", 0.0, 1.0),
            ScenarioKind::Custom => ("row", 0.0, 0.0),
        }
    }

    pub fn header(self) -> &'static str {
        match self {
            ScenarioKind::Fig2 => "theta,theta_over_pi,before,after,ci,s_a,e_a,eof_ac",
            ScenarioKind::Fig3 => "theta,theta_over_pi,before,after,ci,s_a,discord",
            ScenarioKind::Fig4 => "alpha,before,after,ci,s_a,e_a",
            ScenarioKind::Custom => "row,before,after,ci,s_a,measure",
        }
    }
}

/// Which side of ρ_AB the discord measurement acts on in the fig3 sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscordSide {
    A,
    B,
}

impl DiscordSide {
    fn index(self) -> usize {
        match self {
            DiscordSide::A => A,
            DiscordSide::B => B,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    /// Inclusive sweep range.
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub phi: f64,
    pub p: f64,
    pub qbasis: String,
    pub rbasis: String,
    pub discord_side: DiscordSide,
    pub optimizer: OptimizerConfig,
    pub out: Option<PathBuf>,
    /// State file for `custom`.
    pub state: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: ScenarioKind,
    from: Option<f64>,
    to: Option<f64>,
    steps: Option<usize>,
    phi: Option<f64>,
    p: Option<f64>,
    qbasis: Option<String>,
    rbasis: Option<String>,
    discord_side: Option<DiscordSide>,
    optimizer: Option<OptimizerConfig>,
    out: Option<PathBuf>,
    state: Option<PathBuf>,
}

impl ScenarioConfig {
    /// Defaults for `kind`: full domain, 201 points, φ = π/4, p = 1/3, bases
    /// z and x, discord measured on B.
    pub fn new(kind: ScenarioKind) -> Self {
        let (_, lo, hi) = kind.domain();
        ScenarioConfig {
            kind,
            from: lo,
            to: hi,
            steps: if kind == ScenarioKind::Custom { 1 } else { DEFAULT_STEPS },
            phi: FRAC_PI_4,
            p: 1.0 / 3.0,
            qbasis: "z".into(),
            rbasis: "x".into(),
            discord_side: DiscordSide::B,
            optimizer: OptimizerConfig::default(),
            out: None,
            state: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.optimizer.validate()?;
        self.pair()?;
        let check = |what: &'static str, value: f64, lo: f64, hi: f64| -> Result<()> {
            if !(lo..=hi).contains(&value) {
                return Err(Error::OutOfRange { what, value, lo, hi });
            }
            Ok(())
        };
        match self.kind {
            ScenarioKind::Custom => {
                if self.state.is_none() {
                    return Err(Error::InvalidConfig("custom scenario needs a state file".into()));
                }
                return Ok(());
            }
            ScenarioKind::Fig2 => {
                if !self.phi.is_finite() {
                    return Err(Error::OutOfRange {
                        what: "phi",
                        value: self.phi,
                        lo: f64::NEG_INFINITY,
                        hi: f64::INFINITY,
                    });
                }
            }
            ScenarioKind::Fig3 => check("p", self.p, 0.0, 1.0)?,
            ScenarioKind::Fig4 => {}
        }
        let (what, lo, hi) = self.kind.domain();
        check(what, self.from, lo, hi)?;
        check(what, self.to, lo, hi)?;
        if self.from > self.to {
            return Err(Error::InvalidConfig(format!(
                "sweep start {} exceeds end {}",
                self.from, self.to
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidConfig(format!("steps = {} is below 2", self.steps)));
        }
        Ok(())
    }

    pub fn pair(&self) -> Result<ObservablePair> {
        ObservablePair::named(&self.qbasis, &self.rbasis)
    }

    /// Sweep values, endpoints included exactly.
    pub fn grid(&self) -> Vec<f64> {
        if self.kind == ScenarioKind::Custom {
            return vec![0.0];
        }
        let n = self.steps;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.to
                } else {
                    self.from + (self.to - self.from) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

/// Parses and validates a JSON scenario document, filling defaults.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut cfg = ScenarioConfig::new(raw.kind);
    if let Some(v) = raw.from {
        cfg.from = v;
    }
    if let Some(v) = raw.to {
        cfg.to = v;
    }
    if let Some(v) = raw.steps {
        cfg.steps = v;
    }
    if let Some(v) = raw.phi {
        cfg.phi = v;
    }
    if let Some(v) = raw.p {
        cfg.p = v;
    }
    if let Some(v) = raw.qbasis {
        cfg.qbasis = v;
    }
    if let Some(v) = raw.rbasis {
        cfg.rbasis = v;
    }
    if let Some(v) = raw.discord_side {
        cfg.discord_side = v;
    }
    if let Some(v) = raw.optimizer {
        cfg.optimizer = v;
    }
    cfg.out = raw.out;
    cfg.state = raw.state;
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub x: f64,
    pub before: f64,
    pub after: f64,
    pub ci: f64,
    pub entropy_a: f64,
    /// E_a(ρ_AC), the discord, or the E_d surrogate.
    pub measure: f64,
    pub eof_ac: Option<f64>,
}

/// sinθcosφ|011⟩ + sinθsinφ|101⟩ + cosθ|110⟩.
pub fn w_class_state(theta: f64, phi: f64) -> Result<Ket> {
    let mut amps = [0.0; 8];
    amps[0b011] = theta.sin() * phi.cos();
    amps[0b101] = theta.sin() * phi.sin();
    amps[0b110] = theta.cos();
    Ket::from_real(&[2, 2, 2], &amps)
}

/// (sin²θ|ϕ⟩⟨ϕ| + cos²θ|11⟩⟨11|) ⊗ (p|0⟩⟨0| + (1-p)|1⟩⟨1|) with
/// |ϕ⟩ = (|01⟩ + |10⟩)/√2.
pub fn rank_two_product_state(theta: f64, p: f64) -> Result<DensityOperator> {
    let s2 = theta.sin().powi(2);
    let c2 = theta.cos().powi(2);
    let h = FRAC_1_SQRT_2;
    let phi = Ket::from_real(&[2, 2], &[0.0, h, h, 0.0])?;
    let mut m = phi.to_density().matrix() * Complex64::from(s2);
    m[(3, 3)] += c2;
    let rho_ab = validate_density(m, &[2, 2])?;
    let rho_c = DensityOperator::diagonal(&[2], &[p, 1.0 - p])?;
    tensor_product(&rho_ab, &rho_c)
}

/// α|000⟩ + √(1-α²)|111⟩.
pub fn ghz_state(alpha: f64) -> Result<Ket> {
    let mut amps = [0.0; 8];
    amps[0] = alpha;
    amps[7] = (1.0 - alpha * alpha).max(0.0).sqrt();
    Ket::from_real(&[2, 2, 2], &amps)
}

fn row_from(x: f64, before: &BoundReport, after: &BoundReport, ci: &CiEstimate, eof_ac: Option<f64>) -> SweepRow {
    SweepRow {
        x,
        before: before.bound,
        after: after.bound,
        ci: ci.value,
        entropy_a: ci.entropy_a,
        measure: ci.measure,
        eof_ac,
    }
}

/// Bound with Charlie as the memory: log2(1/c) + S(A|C).
fn before_bound(sc: &TripartiteScenario) -> Result<BoundReport> {
    Ok(tripartite_pair_bounds(sc)?.1)
}

fn sweep_row(cfg: &ScenarioConfig, pair: &ObservablePair, x: f64) -> Result<SweepRow> {
    match cfg.kind {
        ScenarioKind::Fig2 | ScenarioKind::Fig4 => {
            let psi = if cfg.kind == ScenarioKind::Fig2 {
                w_class_state(x, cfg.phi)?
            } else {
                ghz_state(x)?
            };
            let sc = TripartiteScenario::new(psi.to_density(), pair.clone())?;
            let before = before_bound(&sc)?;
            let ci = one_way_ci_pure(&psi, None, &cfg.optimizer)?;
            let after = post_ci_bound(&sc, &ci)?;
            let eof = if cfg.kind == ScenarioKind::Fig2 {
                let rho_ac = partial_trace(sc.state(), &[A, C])?;
                Some(eof_from_concurrence(concurrence(&rho_ac)?)?)
            } else {
                None
            };
            Ok(row_from(x, &before, &after, &ci, eof))
        }
        ScenarioKind::Fig3 => {
            let sc = TripartiteScenario::new(rank_two_product_state(x, cfg.p)?, pair.clone())?;
            let before = before_bound(&sc)?;
            let ci = ci_product(sc.state(), cfg.discord_side.index(), &cfg.optimizer)?;
            let after = post_ci_bound(&sc, &ci)?;
            Ok(row_from(x, &before, &after, &ci, None))
        }
        ScenarioKind::Custom => {
            let path = cfg.state.as_deref().expect("validated custom config has a state");
            let state = read_state(path)?;
            let report = evaluate_state(&state, pair, C, &cfg.optimizer)?;
            let (after, ci) = report
                .concentrated
                .ok_or_else(|| Error::Arity { expected: 3, found: state.dims().len() })?;
            Ok(row_from(x, &report.memory, &after, &ci, None))
        }
    }
}

/// Evaluates every row of the sweep (rows in parallel, output in sweep
/// order) and checks after ≤ before + 2e-3 on each.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let pair = cfg.pair()?;
    let (what, _, _) = cfg.kind.domain();
    cfg.grid()
        .into_par_iter()
        .map(|x| {
            let row = sweep_row(cfg, &pair, x).map_err(|e| e.context(format!("{what} = {x}")))?;
            if row.after > row.before + ROW_ORDER_TOL {
                return Err(Error::Invariant(format!(
                    "{what} = {x}: after-bound {} exceeds before-bound {}",
                    row.after, row.before
                )));
            }
            Ok(row)
        })
        .collect()
}

/// Formats with 9 significant digits: positional notation for exponents in
/// [-5, 8], scientific otherwise.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if !(-5..=8).contains(&exp) {
        return format!("{mantissa}e{exp}");
    }
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if exp >= 0 {
        let split = exp as usize + 1;
        format!("{sign}{}.{}", &digits[..split], &digits[split..])
    } else {
        format!("{sign}0.{}{digits}", "0".repeat((-exp - 1) as usize))
    }
}

pub fn csv_string(kind: ScenarioKind, rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str(kind.header());
    out.push('\n');
    for (i, r) in rows.iter().enumerate() {
        let mut fields = match kind {
            ScenarioKind::Fig2 | ScenarioKind::Fig3 => vec![format_sig9(r.x), format_sig9(r.x / PI)],
            ScenarioKind::Fig4 => vec![format_sig9(r.x)],
            ScenarioKind::Custom => vec![i.to_string()],
        };
        fields.extend([r.before, r.after, r.ci, r.entropy_a, r.measure].map(format_sig9));
        if kind == ScenarioKind::Fig2 {
            fields.push(format_sig9(r.eof_ac.unwrap_or(f64::NAN)));
        }
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

pub fn write_csv(path: &Path, kind: ScenarioKind, rows: &[SweepRow]) -> Result<()> {
    std::fs::write(path, csv_string(kind, rows)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Everything computable for one user-supplied state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateReport {
    pub dims: Vec<usize>,
    /// H(Q|M) + H(R|M) for the chosen memory M.
    pub uncertainty_sum: f64,
    pub memory: BoundReport,
    /// Post-concentration bound and the CI behind it (tripartite states).
    pub concentrated: Option<(BoundReport, CiEstimate)>,
}

fn is_product_with_c(rho: &DensityOperator) -> Result<bool> {
    let rho_ab = partial_trace(rho, &[A, B])?;
    let rho_c = partial_trace(rho, &[C])?;
    Ok(max_abs_diff(tensor_product(&rho_ab, &rho_c)?.matrix(), rho.matrix()) <= DENSITY_TOL)
}

/// Memory bound (with memory B or C for tripartite states) and, for
/// tripartite states, the post-concentration bound. The CI comes from the
/// one-way formula for pure three-qubit states, from I - D for two-qubit
/// ρ_AB ⊗ ρ_C, and from the CI upper bound otherwise.
pub fn evaluate_state(
    state: &StateFile,
    pair: &ObservablePair,
    memory: usize,
    config: &OptimizerConfig,
) -> Result<StateReport> {
    let rho = state.density();
    match rho.num_subsystems() {
        2 => {
            let report = memory_bound(&rho, pair)?;
            Ok(StateReport {
                dims: rho.dims().to_vec(),
                uncertainty_sum: uncertainty_sum(&rho, pair)?,
                memory: report,
                concentrated: None,
            })
        }
        3 => {
            if memory != B && memory != C {
                return Err(Error::SubsystemOutOfRange { index: memory, count: 3 });
            }
            let sc = TripartiteScenario::new(rho.clone(), pair.clone())?;
            let (bound_b, bound_c) = tripartite_pair_bounds(&sc)?;
            let rho_am = partial_trace(&rho, &[A, memory])?;
            let pure = match state {
                StateFile::Pure(psi) => Some(psi.clone()),
                StateFile::Density(d) => d.to_pure_ket().ok(),
            };
            let ci = match pure {
                Some(psi) => one_way_ci_pure(&psi, None, config)?,
                None if rho.dims()[..2] == [2, 2] && is_product_with_c(&rho)? => {
                    ci_product(&rho, B, config)?
                }
                None => ci_upper_bound(&sc)?,
            };
            let after = post_ci_bound(&sc, &ci)?;
            Ok(StateReport {
                dims: rho.dims().to_vec(),
                uncertainty_sum: uncertainty_sum(&rho_am, pair)?,
                memory: if memory == B { bound_b } else { bound_c },
                concentrated: Some((after, ci)),
            })
        }
        found => Err(Error::Arity { expected: 3, found }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use crate::bounds::CiSource;
    use crate::random::{random_state, StateKind};
    use std::f64::consts::FRAC_PI_2;

    fn config(kind: ScenarioKind, steps: usize) -> ScenarioConfig {
        ScenarioConfig {
            steps,
            ..ScenarioConfig::new(kind)
        }
    }

    #[test]
    fn parse_defaults() {
        let cfg = parse_scenario(r#"{"kind":"fig4","steps":101}"#).unwrap();
        assert_eq!((cfg.from, cfg.to, cfg.steps), (0.0, 1.0, 101));
        let cfg = parse_scenario(r#"{"kind":"fig2"}"#).unwrap();
        assert_eq!(cfg.phi, FRAC_PI_4);
        assert_eq!((cfg.from, cfg.to, cfg.steps), (0.0, PI, 201));
        let cfg = parse_scenario(r#"{"kind":"fig3"}"#).unwrap();
        assert_eq!(cfg.p, 1.0 / 3.0);
        assert_eq!((cfg.qbasis.as_str(), cfg.rbasis.as_str()), ("z", "x"));
        assert_eq!(cfg.discord_side, DiscordSide::B);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_scenario(r#"{"kind":"fig3","p":1.5}"#),
            Err(Error::OutOfRange { what: "p", .. })
        ));
        assert!(matches!(parse_scenario(r#"{"kind":"fig3""#), Err(Error::Parse(_))));
        assert!(matches!(parse_scenario(r#"{"kind":"fig5"}"#), Err(Error::Parse(_))));
        assert!(matches!(
            parse_scenario(r#"{"kind":"fig2","qbasis":"w"}"#),
            Err(Error::UnknownBasis(_))
        ));
        assert!(parse_scenario(r#"{"kind":"fig4","steps":1}"#).is_err());
        assert!(parse_scenario(r#"{"kind":"fig4","to":1.5}"#).is_err());
        assert!(parse_scenario(r#"{"kind":"fig2","from":2.0,"to":1.0}"#).is_err());
        assert!(parse_scenario(r#"{"kind":"custom"}"#).is_err());
        assert!(parse_scenario(r#"{"kind":"fig4","optimizer":{"restarts":0}}"#).is_err());
        assert!(parse_scenario(r#"{"kind":"fig4","colour":"red"}"#).is_err());
    }

    #[test]
    fn grid_hits_endpoints() {
        let g = config(ScenarioKind::Fig2, 201).grid();
        assert_eq!(g.len(), 201);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[200], PI);
        assert_abs_diff_eq!(g[100], FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn example_states() {
        let psi = w_class_state(0.0, FRAC_PI_4).unwrap();
        assert_abs_diff_eq!(psi.amplitudes()[0b110].re, 1.0, epsilon = 1e-15);
        let rho = rank_two_product_state(FRAC_PI_2, 1.0 / 3.0).unwrap();
        assert_eq!(rho.dims(), &[2, 2, 2]);
        assert_abs_diff_eq!(rho.purity(), 5.0 / 9.0, epsilon = 1e-12);
        assert!(ghz_state(1.0).is_ok() && ghz_state(0.0).is_ok());
    }

    #[test]
    fn fig4_rows() {
        let mut cfg = config(ScenarioKind::Fig4, 3);
        cfg.from = 0.5;
        cfg.to = FRAC_1_SQRT_2;
        let rows = run_scenario(&cfg).unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert_abs_diff_eq!(r.before, 1.0, epsilon = 1e-9);
        }
        assert!(rows[2].after.abs() <= 2e-3);
        let h = crate::entropy::binary_entropy(0.25);
        assert_abs_diff_eq!(rows[0].after, 1.0 - h, epsilon = 2e-3);
    }

    #[test]
    fn fig2_anchor_rows() {
        let mut cfg = config(ScenarioKind::Fig2, 2);
        cfg.to = FRAC_PI_2;
        let rows = run_scenario(&cfg).unwrap();
        assert_abs_diff_eq!(rows[0].before, 1.0, epsilon = 2e-3);
        assert_abs_diff_eq!(rows[0].after, 1.0, epsilon = 2e-3);
        assert_abs_diff_eq!(rows[1].before, 2.0, epsilon = 2e-3);
        assert_abs_diff_eq!(rows[1].after, 1.0, epsilon = 2e-3);
        assert_abs_diff_eq!(rows[1].eof_ac.unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn fig3_anchor_rows() {
        let mut cfg = config(ScenarioKind::Fig3, 2);
        cfg.to = FRAC_PI_2;
        let rows = run_scenario(&cfg).unwrap();
        assert_abs_diff_eq!(rows[0].before, 1.0, epsilon = 5e-3);
        assert_abs_diff_eq!(rows[0].after, 1.0, epsilon = 5e-3);
        assert_abs_diff_eq!(rows[1].before, 2.0, epsilon = 5e-3);
        assert_abs_diff_eq!(rows[1].after, 1.0, epsilon = 5e-3);
    }

    #[test]
    fn sig9_formatting() {
        assert_eq!(format_sig9(1.0), "1.00000000");
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(-0.0), "0");
        assert_eq!(format_sig9(PI), "3.14159265");
        assert_eq!(format_sig9(-0.5), "-0.500000000");
        assert_eq!(format_sig9(9.9999999999), "10.0000000");
        assert_eq!(format_sig9(1.234e-3), "0.00123400000");
        assert_eq!(format_sig9(1.5e-7), "1.50000000e-7");
        assert_eq!(format_sig9(1.0 - 1e-12), "1.00000000");
    }

    #[test]
    fn csv_layout() {
        let row = SweepRow {
            x: 0.5,
            before: 1.0,
            after: 0.25,
            ci: 1.5,
            entropy_a: 0.75,
            measure: 0.75,
            eof_ac: None,
        };
        let text = csv_string(ScenarioKind::Fig4, &[row, row]);
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines[0], "alpha,before,after,ci,s_a,e_a");
        assert_eq!(lines[1], "0.500000000,1.00000000,0.250000000,1.50000000,0.750000000,0.750000000");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[3], "");
        assert!(!text.contains('\r'));
    }

    #[test]
    fn evaluate_state_routes() {
        let cfg = OptimizerConfig::default();
        let pair = ObservablePair::pauli_zx();
        let bell = Ket::from_real(&[2, 2], &[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap();
        let r = evaluate_state(&StateFile::Pure(bell), &pair, B, &cfg).unwrap();
        assert_abs_diff_eq!(r.memory.bound, 0.0, epsilon = 1e-12);
        assert!(r.concentrated.is_none());

        let r = evaluate_state(&StateFile::Pure(ghz_state(FRAC_1_SQRT_2).unwrap()), &pair, C, &cfg).unwrap();
        let (after, ci) = r.concentrated.unwrap();
        assert_eq!(ci.source, CiSource::OneWayPure);
        assert!(after.bound.abs() < 2e-3);
        assert_abs_diff_eq!(r.memory.bound, 1.0, epsilon = 1e-9);

        let rho = rank_two_product_state(FRAC_PI_2, 1.0 / 3.0).unwrap();
        let r = evaluate_state(&StateFile::Density(rho), &pair, C, &cfg).unwrap();
        let (after, ci) = r.concentrated.unwrap();
        assert_eq!(ci.source, CiSource::ProductWithC);
        assert_abs_diff_eq!(after.bound, 1.0, epsilon = 5e-3);

        let mixed = random_state(4, &[2, 2, 2], StateKind::Mixed { rank: Some(3) }).unwrap();
        let r = evaluate_state(&StateFile::Density(mixed), &pair, B, &cfg).unwrap();
        assert_eq!(r.concentrated.unwrap().1.source, CiSource::UpperBound);
        assert!(r.uncertainty_sum >= r.memory.bound - 1e-9);
        assert!(evaluate_state(&StateFile::Pure(ghz_state(0.5).unwrap()), &pair, A, &cfg).is_err());
    }

    #[test]
    fn sweeps_are_deterministic() {
        let mut cfg = config(ScenarioKind::Fig4, 5);
        cfg.optimizer.restarts = 4;
        let a = csv_string(cfg.kind, &run_scenario(&cfg).unwrap());
        let b = csv_string(cfg.kind, &run_scenario(&cfg).unwrap());
        assert_eq!(a, b);
    }
}
