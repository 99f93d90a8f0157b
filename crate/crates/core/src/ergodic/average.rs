//! Time averages along the exact flow and uniform averages over invariant tori.
//!
//! Both quadratures split work into fixed-size chunks evaluated in parallel
//! and reduce chunk results in index order, so the value does not depend on
//! the number of threads.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::independence::{check_rational_independence, IndependenceVerdict, DEFAULT_BUDGET};
use super::modes::{modes_from_action_angle, normal_modes, rotate_modes, to_action_angle};
use super::observable::Observable;
use crate::dynamics::{split_hamiltonian, HamiltonianSplit};
use crate::error::{KahlerError, Result};
use crate::kahler::KahlerState;
use crate::linalg::pairwise_sum;
use crate::operator::{ComplexOperator, STRUCTURE_TOL};

/// Running-average checkpoints reported by [`time_average_series`] by default.
pub const DEFAULT_CHECKPOINTS: usize = 256;
const TORUS_CHUNK: u128 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunningAverage {
    pub t: f64,
    pub avg: f64,
}

fn check_time_args(t_final: f64, steps: usize) -> Result<()> {
    if !(t_final > 0.0) || !t_final.is_finite() {
        return Err(KahlerError::InvalidArgument("t_final must be positive and finite".into()));
    }
    if steps == 0 {
        return Err(KahlerError::InvalidArgument("steps must be at least 1".into()));
    }
    Ok(())
}

/// Trapezoidal average of `f` over `[0, t_final]` sampled at `steps + 1`
/// equispaced times of the exact flow. The observable receives normal-mode
/// coordinates.
pub fn time_average<O: Observable + ?Sized>(
    hs: &HamiltonianSplit,
    u0: &KahlerState,
    observable: &O,
    t_final: f64,
    steps: usize,
) -> Result<f64> {
    let series = time_average_series(hs, u0, observable, t_final, steps, DEFAULT_CHECKPOINTS)?;
    Ok(series.last().expect("at least one checkpoint").avg)
}

/// Running trapezoidal averages `avg(T)` at up to `checkpoints` evenly spaced
/// times; the last entry is the full average at `t_final`.
pub fn time_average_series<O: Observable + ?Sized>(
    hs: &HamiltonianSplit,
    u0: &KahlerState,
    observable: &O,
    t_final: f64,
    steps: usize,
    checkpoints: usize,
) -> Result<Vec<RunningAverage>> {
    check_time_args(t_final, steps)?;
    let frame = normal_modes(&hs.to_operator())?;
    let modes0 = frame.to_modes(u0)?;
    let lambdas = &frame.lambdas;
    let dt = t_final / steps as f64;
    let chunk = steps.div_ceil(checkpoints.max(1));
    let n_chunks = steps.div_ceil(chunk);

    // Trapezoid sum over sample intervals [a, b] in units of dt.
    let sums: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let a = c * chunk;
            let b = ((c + 1) * chunk).min(steps);
            let f = |k: usize| observable.eval(&rotate_modes(lambdas, &modes0, k as f64 * dt));
            let mut s = 0.5 * (f(a) + f(b));
            for k in a + 1..b {
                s += f(k);
            }
            s
        })
        .collect();

    let mut acc = 0.0;
    Ok(sums
        .iter()
        .enumerate()
        .map(|(c, s)| {
            acc += s;
            let end = ((c + 1) * chunk).min(steps);
            RunningAverage { t: end as f64 * dt, avg: acc / end as f64 }
        })
        .collect())
}

/// Uniform average of `f` over the torus of fixed `actions`, using the
/// `grid^N` product trapezoidal rule (exact for trigonometric polynomials of
/// degree below `grid`).
pub fn torus_average<O: Observable + ?Sized>(observable: &O, actions: &[f64], grid: usize, budget: u128) -> Result<f64> {
    if grid < 8 {
        return Err(KahlerError::InvalidArgument(format!("torus grid must be at least 8, got {grid}")));
    }
    if actions.is_empty() {
        return Err(KahlerError::InvalidArgument("need at least one action".into()));
    }
    if actions.iter().any(|&f| f < 0.0) {
        return Err(KahlerError::InvalidArgument("actions must be non-negative".into()));
    }
    let n = actions.len();
    let total = (0..n)
        .try_fold(1u128, |acc, _| acc.checked_mul(grid as u128))
        .unwrap_or(u128::MAX);
    if total > budget {
        return Err(KahlerError::SearchSpaceTooLarge { size: total, budget });
    }
    let step = TAU / grid as f64;
    let n_chunks = total.div_ceil(TORUS_CHUNK) as usize;
    let sums: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let start = c as u128 * TORUS_CHUNK;
            let end = (start + TORUS_CHUNK).min(total);
            let mut angles = vec![0.0; n];
            let mut s = 0.0;
            for cell in start..end {
                let mut rest = cell;
                for a in (0..n).rev() {
                    angles[a] = (rest % grid as u128) as f64 * step;
                    rest /= grid as u128;
                }
                let point = modes_from_action_angle(actions, &angles).expect("validated actions");
                s += observable.eval(&point);
            }
            s
        })
        .collect();
    Ok(pairwise_sum(&sums) / total as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ErgodicityOptions {
    /// Time samples; defaults to `ceil(t_final · samples_per_unit_time)`.
    pub steps: Option<usize>,
    pub samples_per_unit_time: f64,
    pub grid: usize,
    /// Pass threshold on `|time average − torus average|`.
    pub gap_tol: f64,
    pub bound: u32,
    pub independence_tol: f64,
    pub checkpoints: usize,
    #[serde(skip)]
    pub budget: u128,
}

impl Default for ErgodicityOptions {
    fn default() -> Self {
        Self {
            steps: None,
            samples_per_unit_time: 100.0,
            grid: 16,
            gap_tol: 1e-2,
            bound: 20,
            independence_tol: 1e-9,
            checkpoints: DEFAULT_CHECKPOINTS,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicityReport {
    pub lambdas: Vec<f64>,
    pub degenerate: bool,
    pub verdict: IndependenceVerdict,
    pub actions: Vec<f64>,
    pub angles: Vec<f64>,
    pub t_final: f64,
    pub steps: usize,
    pub time_average: f64,
    pub torus_average: f64,
    pub gap: f64,
    pub tol: f64,
    pub pass: bool,
    /// `pass` agrees with the independence verdict (equidistribution expected
    /// exactly when the frequencies are independent).
    pub matches_prediction: bool,
    pub running: Vec<RunningAverage>,
}

pub fn ergodicity_experiment<O: Observable + ?Sized>(
    h: &ComplexOperator,
    u0: &KahlerState,
    observable: &O,
    t_final: f64,
    opts: &ErgodicityOptions,
) -> Result<ErgodicityReport> {
    let hs = split_hamiltonian(h, STRUCTURE_TOL)?;
    let frame = normal_modes(h)?;
    let aa = to_action_angle(&frame, u0)?;
    let verdict = check_rational_independence(&frame.lambdas, opts.bound, opts.independence_tol, opts.budget)?;
    let torus = torus_average(observable, &aa.actions, opts.grid, opts.budget)?;
    let steps = match opts.steps {
        Some(s) => s,
        None => {
            if !(opts.samples_per_unit_time > 0.0) {
                return Err(KahlerError::InvalidArgument("samples_per_unit_time must be positive".into()));
            }
            (t_final * opts.samples_per_unit_time).ceil().max(1.0) as usize
        }
    };
    let running = time_average_series(&hs, u0, observable, t_final, steps, opts.checkpoints)?;
    let time = running.last().expect("at least one checkpoint").avg;
    let gap = (time - torus).abs();
    let pass = gap <= opts.gap_tol;
    Ok(ErgodicityReport {
        lambdas: frame.lambdas,
        degenerate: frame.degenerate,
        matches_prediction: pass == verdict.independent,
        verdict,
        actions: aa.actions,
        angles: aa.angles,
        t_final,
        steps,
        time_average: time,
        torus_average: torus,
        gap,
        tol: opts.gap_tol,
        pass,
        running,
    })
}

impl ErgodicityReport {
    /// `T,avg(T)` rows with a header line.
    pub fn write_running_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "T,avg(T)")?;
        for r in &self.running {
            writeln!(w, "{},{}", r.t, r.avg)?;
        }
        Ok(())
    }
}
