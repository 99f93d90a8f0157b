use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::*;
use super::report::{CheckResult, RunReport, ARTIFACT_VERSION, REPORT_FILE};
use super::CliError;
use crate::composite::{
    entangled_pair, schmidt_rank, tensor_dim_complex, tensor_dim_real, tensor_operator_complex, tensor_state_complex,
    EntangledKind,
};
use crate::continuum::{
    commutator_residual, gaussian_profile, position_op, schrodinger_hamiltonian, time_generator, GridKahlerState,
    Potential,
};
use crate::dynamics::{
    conservation_report, evolve_exact, evolve_midpoint_strided, exact_trajectory, split_hamiltonian, Scheme,
};
use crate::ergodic::{
    ergodicity_experiment, modes_from_action_angle, normal_modes, ErgodicityOptions, DEFAULT_BUDGET,
};
use crate::kahler::{complexify, metric_g, symplectic_omega, validate_structure_with, KahlerStructure};
use crate::linalg::{RMatrix, CVector};
use crate::operator::{
    compose, expectation, gamma_lift, gamma_lower, hermiticity_residuals, unitarity_residuals, ComplexOperator,
    KahlerOperator, ORACLE_TOL, STRUCTURE_TOL,
};
use crate::sampling::{random_hermitian, random_operator, random_unit_state, random_unitary, task_rng};

pub const BUDGET_ENV: &str = "KAHLERQ_BUDGET";
pub const DEFAULT_OUTPUT_DIR: &str = "kahlerq-out";

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub output_dir: PathBuf,
    pub report: RunReport,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.pass {
            super::EXIT_PASS
        } else {
            super::EXIT_CHECK_FAILURE
        }
    }
}

/// Reads `KAHLERQ_BUDGET`, defaulting to the library budget.
pub fn budget_from_env() -> Result<u128, CliError> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u128>()
            .map_err(|e| CliError::Config(format!("{BUDGET_ENV}={v:?}: {e}"))),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_BUDGET),
        Err(e) => Err(CliError::Config(format!("{BUDGET_ENV}: {e}"))),
    }
}

/// Loads a config file and runs it, optionally on a dedicated pool of `threads`.
pub fn run(config_path: &Path, out: Option<&Path>, threads: Option<usize>) -> Result<RunOutcome, CliError> {
    let text = fs::read_to_string(config_path).map_err(|e| CliError::io(config_path, e))?;
    let config = ExperimentConfig::from_json(&text)?;
    let budget = budget_from_env()?;
    let output_dir = out
        .map(Path::to_path_buf)
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    match threads {
        Some(0) => Err(CliError::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?
            .install(|| run_config(&config, &output_dir, budget)),
        None => run_config(&config, &output_dir, budget),
    }
}

/// Output of one experiment before it is written.
struct Outcome {
    checks: Vec<CheckResult>,
    data: Value,
    artifacts: Vec<(&'static str, Vec<u8>)>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

pub fn run_config(config: &ExperimentConfig, output_dir: &Path, budget: u128) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    let seed = config.seed;
    let outcome = match &config.params {
        Params::Validate(p) => run_validate(p, seed)?,
        Params::Lift(p) => run_lift(p, seed)?,
        Params::Evolve(p) => run_evolve(p, seed)?,
        Params::Ergodic(p) => run_ergodic(p, budget)?,
        Params::Tensor(p) => run_tensor(p, seed)?,
        Params::Grid(p) => run_grid(p, seed)?,
        Params::Commutator(p) => run_commutator(p)?,
    };
    let report = RunReport {
        artifact_version: ARTIFACT_VERSION.to_string(),
        config_echo: to_value(config),
        pass: outcome.checks.iter().all(|c| c.pass),
        checks: outcome.checks,
        data: outcome.data,
        wall_time_ms: start.elapsed().as_millis() as u64,
    };
    fs::create_dir_all(output_dir).map_err(|e| CliError::io(output_dir, e))?;
    for (name, bytes) in &outcome.artifacts {
        let path = output_dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(path, e))?;
    }
    let path = output_dir.join(REPORT_FILE);
    fs::write(&path, report.to_json()).map_err(|e| CliError::io(path, e))?;
    Ok(RunOutcome { output_dir: output_dir.to_path_buf(), report })
}

fn require_positive(name: &str, v: usize) -> Result<(), CliError> {
    if v == 0 {
        return Err(CliError::Config(format!("field `params.{name}`: must be at least 1")));
    }
    Ok(())
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn run_validate(p: &ValidateParams, seed: u64) -> Result<Outcome, CliError> {
    require_positive("n", p.n)?;
    let forms = KahlerStructure::new(p.n)?;
    let report = validate_structure_with(&forms, p.tol, seed, p.samples)?;
    let checks = report
        .axioms
        .iter()
        .map(|a| CheckResult { name: a.name.clone(), residual: a.max_residual, tolerance: p.tol, pass: a.pass })
        .collect();
    Ok(Outcome { checks, data: to_value(&report), artifacts: vec![] })
}

/// Symplectic, non-orthogonal: diag(A, A⁻ᵀ) with A = Q diag(s, 1, …, 1) Qᵀ.
fn symplectic_squeeze<R: Rng>(rng: &mut R, n: usize) -> KahlerOperator {
    let s = rng.gen_range(1.5..4.0);
    let q = RMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0)).qr().q();
    let mut d = RMatrix::identity(n, n);
    d[(0, 0)] = s;
    let a = &q * &d * q.transpose();
    d[(0, 0)] = 1.0 / s;
    let a_inv_t = &q * &d * q.transpose();
    let mut block = RMatrix::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(&a);
    block.view_mut((n, n), (n, n)).copy_from(&a_inv_t);
    KahlerOperator::from_block(block).expect("even square")
}

fn run_lift(p: &LiftParams, seed: u64) -> Result<Outcome, CliError> {
    require_positive("n", p.n)?;
    require_positive("instances", p.instances)?;
    require_positive("max_factors", p.max_factors)?;
    let n = p.n;
    let rows: Vec<(f64, f64, f64, bool)> = (0..p.instances)
        .into_par_iter()
        .map(|i| -> Result<_, CliError> {
            let mut rng = task_rng(seed, i as u64);
            // ⟨L₁⋯L_k ψ, φ⟩ against g + iω of the lifted product.
            let k = rng.gen_range(1..=p.max_factors);
            let ops: Vec<ComplexOperator> = (0..k).map(|_| random_operator(&mut rng, n)).collect();
            let u = random_unit_state(&mut rng, n);
            let v = random_unit_state(&mut rng, n);
            let mut lifted = KahlerOperator::identity(n);
            let mut product = crate::linalg::CMatrix::identity(n, n);
            for op in &ops {
                lifted = compose(&lifted, &gamma_lift(op))?;
                product *= op.to_complex();
            }
            let mu = lifted.apply(&u)?;
            let inner = (product * complexify(&u)).dotc(&complexify(&v));
            let sandwich = (inner.re - metric_g(&mu, &v)?).abs().max((inner.im - symplectic_omega(&mu, &v)?).abs());

            let r = unitarity_residuals(&gamma_lift(&random_unitary(&mut rng, n)));
            let unitary = r.symplectic.max(r.orthogonal);

            let herm = gamma_lift(&random_hermitian(&mut rng, n));
            let reality = expectation(&herm, &u)?.omega_part.abs();

            let squeeze = symplectic_squeeze(&mut rng, n);
            let sr = unitarity_residuals(&squeeze);
            let rejected = gamma_lower(&squeeze).is_err() || sr.orthogonal > ORACLE_TOL;
            Ok((sandwich, unitary, reality, rejected && sr.symplectic <= 1e-10))
        })
        .collect::<Result<_, _>>()?;
    let sandwich = max_of(rows.iter().map(|r| r.0));
    let unitary = max_of(rows.iter().map(|r| r.1));
    let reality = max_of(rows.iter().map(|r| r.2));
    let rejected = rows.iter().filter(|r| r.3).count();
    let checks = vec![
        CheckResult::at_most("sandwich identity <L1..Lk u, v> = g + i omega", sandwich, p.tol),
        CheckResult::at_most("unitary lifts are symplectic and orthogonal", unitary, ORACLE_TOL),
        CheckResult::at_most("K-Hermitian expectations are real", reality, ORACLE_TOL),
        CheckResult::holds("symplectic non-orthogonal maps rejected", rejected == rows.len()),
    ];
    let data = json!({
        "n": n,
        "instances": p.instances,
        "sandwich_residual": sandwich,
        "unitary_residual": unitary,
        "reality_residual": reality,
        "squeezes_rejected": rejected,
    });
    Ok(Outcome { checks, data, artifacts: vec![] })
}

fn hamiltonian_input(record: &Option<crate::operator::OperatorRecord>, n: Option<usize>, seed: u64) -> Result<ComplexOperator, CliError> {
    match (record, n) {
        (Some(r), _) => Ok(r.to_operator()?),
        (None, Some(n)) => {
            require_positive("n", n)?;
            Ok(random_hermitian(&mut task_rng(seed, 0), n))
        }
        (None, None) => Err(CliError::Config("field `params`: one of `hamiltonian` or `n` is required".into())),
    }
}

fn run_evolve(p: &EvolveParams, seed: u64) -> Result<Outcome, CliError> {
    let h = hamiltonian_input(&p.hamiltonian, p.n, seed)?;
    let u0 = match &p.state {
        Some(s) => s.to_state()?,
        None => random_unit_state(&mut task_rng(seed, 1), h.dim()),
    };
    let hs = split_hamiltonian(&h, STRUCTURE_TOL)?;
    let traj = match p.scheme {
        Scheme::ImplicitMidpoint => evolve_midpoint_strided(&hs, &u0, p.t_final, p.steps, p.stride)?,
        Scheme::ExactExponential => exact_trajectory(&h, &u0, p.t_final, p.steps, p.stride)?,
    };
    let exact_end = evolve_exact(&h, &u0, p.t_final)?;
    let endpoint = traj.last().max_abs_diff(&exact_end);
    let cons = conservation_report(&hs, &traj)?;
    let t = &p.tolerances;
    let checks = vec![
        CheckResult::at_most("H_sym drift", cons.hsym_drift, t.hsym_drift),
        CheckResult::at_most("g-norm drift", cons.gnorm_drift, t.gnorm_drift),
        CheckResult::at_most("step map symplectic", cons.symplectic_residual, t.symplectic),
        CheckResult::at_most("step map orthogonal", cons.orthogonal_residual, t.orthogonal),
        CheckResult::at_most("endpoint vs exact flow", endpoint, t.endpoint),
    ];
    let mut csv = Vec::new();
    traj.write_csv(&hs, &mut csv).map_err(|e| CliError::io("trajectory.csv", e))?;
    let data = json!({
        "scheme": p.scheme,
        "n": h.dim(),
        "stored_states": traj.len(),
        "conservation": cons,
        "endpoint_error": endpoint,
        "final_state": crate::kahler::StateRecord::from_state(traj.last(), None),
    });
    Ok(Outcome { checks, data, artifacts: vec![("trajectory.csv", csv)] })
}

fn run_ergodic(p: &ErgodicParams, budget: u128) -> Result<Outcome, CliError> {
    let h = match (&p.lambdas, &p.hamiltonian) {
        (Some(l), None) if !l.is_empty() => ComplexOperator::diagonal(l),
        (None, Some(r)) => r.to_operator()?,
        _ => {
            return Err(CliError::Config(
                "field `params`: exactly one of `lambdas` (non-empty) or `hamiltonian` is required".into(),
            ))
        }
    };
    let n = h.dim();
    if p.observable.modes_used() > n {
        return Err(CliError::Config(format!(
            "field `params.observable`: references {} modes, system has {n}",
            p.observable.modes_used()
        )));
    }
    let u0 = match (&p.state, &p.actions) {
        (Some(s), None) if p.angles.is_none() => s.to_state()?,
        (None, Some(actions)) => {
            let angles = p.angles.clone().unwrap_or_else(|| vec![0.0; actions.len()]);
            let frame = normal_modes(&h)?;
            let modes = modes_from_action_angle(actions, &angles)?;
            frame.from_modes(&modes)?
        }
        _ => {
            return Err(CliError::Config(
                "field `params`: exactly one of `state` or `actions` (with optional `angles`) is required".into(),
            ))
        }
    };
    let opts = ErgodicityOptions {
        steps: p.steps,
        samples_per_unit_time: p.samples_per_unit_time,
        grid: p.grid,
        gap_tol: p.gap_tol,
        bound: p.bound,
        independence_tol: p.independence_tol,
        checkpoints: p.checkpoints,
        budget,
    };
    let report = ergodicity_experiment(&h, &u0, &p.observable, p.t_final, &opts)?;
    let gap_check = if p.expect_ergodic {
        CheckResult::at_most("time average matches torus average", report.gap, p.gap_tol)
    } else {
        CheckResult {
            name: "time average departs from torus average".into(),
            residual: report.gap,
            tolerance: p.gap_tol,
            pass: report.gap > p.gap_tol,
        }
    };
    let verdict_check = CheckResult::holds(
        if p.expect_ergodic { "frequencies rationally independent" } else { "integer relation found" },
        report.verdict.independent == p.expect_ergodic,
    );
    let mut csv = Vec::new();
    report.write_running_csv(&mut csv).map_err(|e| CliError::io("running_average.csv", e))?;
    Ok(Outcome {
        checks: vec![gap_check, verdict_check],
        data: to_value(&report),
        artifacts: vec![("running_average.csv", csv)],
    })
}

fn run_tensor(p: &TensorParams, seed: u64) -> Result<Outcome, CliError> {
    if p.dims.is_empty() {
        return Err(CliError::Config("field `params.dims`: need at least one pair".into()));
    }
    require_positive("instances", p.instances)?;
    let mut checks = Vec::new();
    let mut labels = Vec::new();
    for &[m, n] in &p.dims {
        let c = tensor_dim_complex(m, n)?;
        let r = tensor_dim_real(m, n)?;
        checks.push(CheckResult::holds(format!("C-tensor dim of ({m},{n}) is 2mn"), c.result_dim == 2 * m * n));
        checks.push(CheckResult::holds(format!("R-tensor dim of ({m},{n}) is 4mn"), r.result_dim == 4 * m * n));
        labels.push(json!({"complex": c, "real": r}));
    }

    let bell = entangled_pair(EntangledKind::BellPhiPlus);
    let sz = gamma_lift(&ComplexOperator::pauli_z());
    let zz = tensor_operator_complex(&sz, &sz)?;
    let bell_zz = expectation(&zz, &bell)?.g_part;
    checks.push(CheckResult::at_most("Bell state <sz x sz> = 1", (bell_zz - 1.0).abs(), p.tol));
    let bell_rank = schmidt_rank(&bell, (2, 2), 1e-10)?;
    checks.push(CheckResult::holds("Bell state Schmidt rank 2", bell_rank == 2));

    let factorization: Vec<(f64, bool)> = (0..p.instances)
        .into_par_iter()
        .map(|i| -> Result<_, CliError> {
            let [m, n] = p.dims[i % p.dims.len()];
            let mut rng = task_rng(seed, i as u64);
            let a = gamma_lift(&random_hermitian(&mut rng, m));
            let b = gamma_lift(&random_hermitian(&mut rng, n));
            let u = random_unit_state(&mut rng, m);
            let v = random_unit_state(&mut rng, n);
            let joint = expectation(&tensor_operator_complex(&a, &b)?, &tensor_state_complex(&u, &v))?.g_part;
            let split = expectation(&a, &u)?.g_part * expectation(&b, &v)?.g_part;
            let rank_one = schmidt_rank(&tensor_state_complex(&u, &v), (m, n), 1e-10)? == 1;
            Ok(((joint - split).abs(), rank_one))
        })
        .collect::<Result<_, _>>()?;
    let fact = max_of(factorization.iter().map(|r| r.0));
    checks.push(CheckResult::at_most("product expectation factorizes", fact, p.tol));
    checks.push(CheckResult::holds("product states have Schmidt rank 1", factorization.iter().all(|r| r.1)));
    let data = json!({
        "labels": labels,
        "bell_zz": bell_zz,
        "bell_schmidt_rank": bell_rank,
        "factorization_residual": fact,
    });
    Ok(Outcome { checks, data, artifacts: vec![] })
}

/// Smooth random packet supported away from the grid edges.
fn random_packet<R: Rng>(rng: &mut R, grid: &crate::continuum::Grid1D) -> GridKahlerState {
    let len = grid.x_max - grid.x_min;
    let centre = grid.x_min + 0.5 * len;
    let x0 = centre + rng.gen_range(-0.15..0.15) * len;
    let sigma = rng.gen_range(0.04..0.08) * len;
    let k = rng.gen_range(-2.0..2.0);
    let phase = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
    GridKahlerState::sample(grid, |x| phase * gaussian_profile(x, x0, sigma, k)).normalized()
}

fn run_grid(p: &GridParams, seed: u64) -> Result<Outcome, CliError> {
    let grid = p.grid.build()?;
    let v = p.potential.sample(&grid).map_err(CliError::invalid)?;
    let h = schrodinger_hamiltonian(&grid, &v)?;
    let lifted = gamma_lift(&h);
    let herm = hermiticity_residuals(&lifted);
    let mut checks = vec![CheckResult::at_most(
        "Hamiltonian lift is K-Hermitian",
        herm.symmetry.max(herm.omega_commutator),
        ORACLE_TOL,
    )];

    let frame = normal_modes(&h)?;
    let levels: Vec<f64> = frame.lambdas.iter().take(p.levels).copied().collect();
    if let Potential::Harmonic { omega } = p.potential {
        let dev = max_of(
            levels
                .iter()
                .enumerate()
                .map(|(k, l)| (l - grid.hbar * omega * (k as f64 + 0.5)).abs()),
        );
        checks.push(CheckResult::at_most("low levels equal hbar omega (k + 1/2)", dev, p.level_tol));
    }

    let hs = split_hamiltonian(&h, STRUCTURE_TOL)?;
    let hc = h.to_complex();
    let hsym_res: Vec<f64> = (0..p.hsym_samples)
        .into_par_iter()
        .map(|i| -> Result<f64, CliError> {
            let packet = random_packet(&mut task_rng(seed, i as u64), &grid);
            let psi: CVector = complexify(&packet.state);
            let oracle = 0.5 * grid.spacing() * psi.dotc(&(&hc * &psi)).re;
            Ok((packet.hsym(&hs)? - oracle).abs())
        })
        .collect::<Result<_, _>>()?;
    let hsym_residual = max_of(hsym_res);
    checks.push(CheckResult::at_most("H_sym = 1/2 Re<psi|H|psi>", hsym_residual, p.hsym_tol));

    let mut artifacts = Vec::new();
    let mut packet_data = Value::Null;
    if let Some(spec) = &p.packet {
        let start = GridKahlerState::gaussian(&grid, spec.x0, spec.sigma, spec.k);
        let end_state = evolve_exact(&time_generator(&grid, &h), &start.state, p.t_final)?;
        let end = GridKahlerState::new(grid, end_state)?;
        let drift = (end.norm_sq().sqrt() - start.norm_sq().sqrt()).abs();
        checks.push(CheckResult::at_most("packet g-norm conserved", drift, p.norm_tol));
        let (mut a, mut b) = (Vec::new(), Vec::new());
        start.write_csv(&mut a).map_err(|e| CliError::io("wavefunction_t0.csv", e))?;
        end.write_csv(&mut b).map_err(|e| CliError::io("wavefunction_t1.csv", e))?;
        artifacts.push(("wavefunction_t0.csv", a));
        artifacts.push(("wavefunction_t1.csv", b));
        packet_data = json!({
            "t_final": p.t_final,
            "norm_drift": drift,
            "mean_position_t0": start.expectation(&position_op(&grid))?,
            "mean_position_t1": end.expectation(&position_op(&grid))?,
        });
    }
    let data = json!({
        "grid": grid,
        "eigenvalues": levels,
        "hsym_residual": hsym_residual,
        "packet": packet_data,
    });
    Ok(Outcome { checks, data, artifacts })
}

fn run_commutator(p: &CommutatorParams) -> Result<Outcome, CliError> {
    let base = p.grid.build()?;
    let profile = |x| gaussian_profile(x, p.profile.x0, p.profile.sigma, p.profile.k);
    let mut levels = Vec::new();
    for r in 0..=p.refinements {
        let grid = base.with_points(base.n_points << r)?;
        let state = GridKahlerState::sample(&grid, profile).state;
        let residual = commutator_residual(&grid, &state, p.stencil)?;
        levels.push(json!({"n": grid.n_points, "h": grid.spacing(), "residual": residual}));
    }
    let residuals: Vec<f64> = levels.iter().map(|l| l["residual"].as_f64().unwrap_or(f64::NAN)).collect();
    let finest = *residuals.last().expect("at least one level");
    let mut checks = vec![CheckResult::at_most("relative residual at finest grid", finest, p.residual_tol)];
    let ratios: Vec<f64> = residuals.windows(2).map(|w| w[0] / w[1]).collect();
    let [lo, hi] = p.ratio_range;
    for (i, r) in ratios.iter().enumerate() {
        let (n0, n1) = (base.n_points << i, base.n_points << (i + 1));
        checks.push(CheckResult::within(format!("residual ratio n={n0}/n={n1}"), *r, lo, hi));
    }
    let data = json!({
        "stencil": p.stencil,
        "levels": levels,
        "ratios": ratios,
        "observed_orders": ratios.iter().map(|r| r.log2()).collect::<Vec<_>>(),
    });
    Ok(Outcome { checks, data, artifacts: vec![] })
}
