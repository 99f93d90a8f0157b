//! Experiment configs: `{"kind", "seed", "params", "output_dir"}`.
//!
//! Parsing runs twice: once to read `kind`, then into the kind's typed
//! params with unknown fields rejected, so errors carry the field path and
//! source position.

use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::continuum::{Grid1D, Potential, Stencil};
use crate::dynamics::Scheme;
use crate::ergodic::Polynomial;
use crate::kahler::StateRecord;
use crate::operator::OperatorRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Validate,
    Lift,
    Evolve,
    Ergodic,
    Tensor,
    Grid,
    Commutator,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub params: Params,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum Params {
    Validate(ValidateParams),
    Lift(LiftParams),
    Evolve(EvolveParams),
    Ergodic(ErgodicParams),
    Tensor(TensorParams),
    Grid(GridParams),
    Commutator(CommutatorParams),
}

impl Params {
    pub fn kind(&self) -> Kind {
        match self {
            Params::Validate(_) => Kind::Validate,
            Params::Lift(_) => Kind::Lift,
            Params::Evolve(_) => Kind::Evolve,
            Params::Ergodic(_) => Kind::Ergodic,
            Params::Tensor(_) => Kind::Tensor,
            Params::Grid(_) => Kind::Grid,
            Params::Commutator(_) => Kind::Commutator,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateParams {
    pub n: usize,
    #[serde(default = "default_oracle_tol")]
    pub tol: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftParams {
    pub n: usize,
    #[serde(default = "default_instances")]
    pub instances: usize,
    /// Longest operator product in the sandwich identity.
    #[serde(default = "default_max_factors")]
    pub max_factors: usize,
    #[serde(default = "default_lift_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveParams {
    /// Explicit Hamiltonian; a seeded random Hermitian of size `n` otherwise.
    #[serde(default)]
    pub hamiltonian: Option<OperatorRecord>,
    #[serde(default)]
    pub n: Option<usize>,
    /// Initial state; a seeded random unit state otherwise.
    #[serde(default)]
    pub state: Option<StateRecord>,
    pub t_final: f64,
    pub steps: usize,
    pub scheme: Scheme,
    #[serde(default = "one_usize")]
    pub stride: usize,
    #[serde(default)]
    pub tolerances: EvolveTolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveTolerances {
    pub hsym_drift: f64,
    pub gnorm_drift: f64,
    pub symplectic: f64,
    pub orthogonal: f64,
    /// Max-abs endpoint difference from the exact flow.
    pub endpoint: f64,
}

impl Default for EvolveTolerances {
    fn default() -> Self {
        Self { hsym_drift: 1e-9, gnorm_drift: 1e-10, symplectic: 1e-10, orthogonal: 1e-10, endpoint: 1e-2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErgodicParams {
    /// Frequencies of a diagonal Hamiltonian; exclusive with `hamiltonian`.
    #[serde(default)]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default)]
    pub hamiltonian: Option<OperatorRecord>,
    /// Initial state in original coordinates; exclusive with `actions`.
    #[serde(default)]
    pub state: Option<StateRecord>,
    /// Initial actions and angles in normal-mode coordinates.
    #[serde(default)]
    pub actions: Option<Vec<f64>>,
    #[serde(default)]
    pub angles: Option<Vec<f64>>,
    pub observable: Polynomial,
    pub t_final: f64,
    /// Whether the time average is expected to match the torus average.
    #[serde(default = "yes")]
    pub expect_ergodic: bool,
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default = "default_samples_per_time")]
    pub samples_per_unit_time: f64,
    #[serde(default = "default_torus_grid")]
    pub grid: usize,
    #[serde(default = "default_gap_tol")]
    pub gap_tol: f64,
    #[serde(default = "default_bound")]
    pub bound: u32,
    #[serde(default = "default_independence_tol")]
    pub independence_tol: f64,
    #[serde(default = "default_checkpoints")]
    pub checkpoints: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorParams {
    /// Factor sizes whose ℂ- and ℝ-tensor dimensions are reported.
    pub dims: Vec<[usize; 2]>,
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default = "default_oracle_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    #[serde(default = "one_f64")]
    pub hbar: f64,
    #[serde(default = "one_f64")]
    pub mass: f64,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid1D, CliError> {
        Grid1D::new(self.x_min, self.x_max, self.n, self.hbar, self.mass).map_err(CliError::invalid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    pub x0: f64,
    pub sigma: f64,
    #[serde(default)]
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub grid: GridSpec,
    pub potential: Potential,
    /// Number of low eigenvalues reported and, for a harmonic potential,
    /// compared with ħω(k + ½).
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default = "default_level_tol")]
    pub level_tol: f64,
    /// Random packets for the H_sym = ½ Re⟨ψ|H|ψ⟩ check.
    #[serde(default = "default_instances")]
    pub hsym_samples: usize,
    #[serde(default = "default_oracle_tol")]
    pub hsym_tol: f64,
    /// Packet evolved exactly to `t_final` and exported as wavefunction CSVs.
    #[serde(default)]
    pub packet: Option<PacketSpec>,
    #[serde(default)]
    pub t_final: f64,
    #[serde(default = "default_norm_tol")]
    pub norm_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommutatorParams {
    pub grid: GridSpec,
    #[serde(default)]
    pub stencil: Stencil,
    pub profile: PacketSpec,
    /// Grid doublings after the base grid.
    #[serde(default = "one_usize")]
    pub refinements: usize,
    /// Bound on the relative residual at the finest grid.
    #[serde(default = "default_commutator_tol")]
    pub residual_tol: f64,
    /// Accepted range of successive residual ratios.
    #[serde(default = "default_ratio_range")]
    pub ratio_range: [f64; 2],
}

fn default_oracle_tol() -> f64 {
    1e-12
}
fn default_lift_tol() -> f64 {
    1e-11
}
fn default_samples() -> usize {
    crate::kahler::DEFAULT_STRUCTURE_SAMPLES
}
fn default_instances() -> usize {
    50
}
fn default_max_factors() -> usize {
    4
}
fn one_usize() -> usize {
    1
}
fn one_f64() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
fn default_samples_per_time() -> f64 {
    100.0
}
fn default_torus_grid() -> usize {
    16
}
fn default_gap_tol() -> f64 {
    1e-2
}
fn default_bound() -> u32 {
    20
}
fn default_independence_tol() -> f64 {
    1e-9
}
fn default_checkpoints() -> usize {
    crate::ergodic::DEFAULT_CHECKPOINTS
}
fn default_levels() -> usize {
    5
}
fn default_level_tol() -> f64 {
    1e-2
}
fn default_norm_tol() -> f64 {
    1e-11
}
fn default_commutator_tol() -> f64 {
    1e-3
}
fn default_ratio_range() -> [f64; 2] {
    [3.2, 4.8]
}

#[derive(Deserialize)]
struct KindProbe {
    kind: Kind,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(dead_code)]
struct Typed<P> {
    kind: Kind,
    seed: u64,
    params: P,
    #[serde(default)]
    output_dir: Option<PathBuf>,
}

fn parse_typed<P: DeserializeOwned>(text: &str) -> Result<(P, u64, Option<PathBuf>), CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let typed: Typed<P> = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Config(format!(
            "field `{path}`: {inner}"
        ))
    })?;
    de.end().map_err(|e| CliError::Config(e.to_string()))?;
    Ok((typed.params, typed.seed, typed.output_dir))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let probe: KindProbe = serde_path_to_error::deserialize(&mut serde_json::Deserializer::from_str(text))
            .map_err(|e| {
                let path = e.path().to_string();
                CliError::Config(format!("field `{path}`: {}", e.into_inner()))
            })?;
        macro_rules! typed {
            ($variant:ident) => {{
                let (p, seed, output_dir) = parse_typed(text)?;
                ExperimentConfig { params: Params::$variant(p), seed, output_dir }
            }};
        }
        Ok(match probe.kind {
            Kind::Validate => typed!(Validate),
            Kind::Lift => typed!(Lift),
            Kind::Evolve => typed!(Evolve),
            Kind::Ergodic => typed!(Ergodic),
            Kind::Tensor => typed!(Tensor),
            Kind::Grid => typed!(Grid),
            Kind::Commutator => typed!(Commutator),
        })
    }

    pub fn kind(&self) -> Kind {
        self.params.kind()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_echoes() {
        let text = r#"{"kind": "validate", "seed": 7, "params": {"n": 16}}"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.kind(), Kind::Validate);
        let echo = serde_json::to_value(&cfg).unwrap();
        assert_eq!(echo["kind"], "validate");
        assert_eq!(echo["params"]["n"], 16);
        assert_eq!(echo["params"]["tol"], 1e-12);
        assert_eq!(echo["seed"], 7);
    }

    #[test]
    fn negative_size_names_field() {
        let text = "{\"kind\": \"validate\", \"seed\": 1,\n \"params\": {\"n\": -1}}";
        let err = ExperimentConfig::from_json(text).unwrap_err().to_string();
        assert!(err.contains("params.n"), "{err}");
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn unknown_fields_rejected() {
        let top = r#"{"kind": "validate", "seed": 1, "params": {"n": 2}, "sed": 3}"#;
        assert!(matches!(ExperimentConfig::from_json(top), Err(CliError::Config(_))));
        let inner = r#"{"kind": "validate", "seed": 1, "params": {"n": 2, "m": 3}}"#;
        let err = ExperimentConfig::from_json(inner).unwrap_err().to_string();
        assert!(err.contains("unknown field `m`"), "{err}");
        let kind = r#"{"kind": "bogus", "seed": 1, "params": {}}"#;
        assert!(ExperimentConfig::from_json(kind).unwrap_err().to_string().contains("kind"));
    }
}
