//! Schrödinger dynamics as a classical Hamiltonian flow on (q, p).
//!
//! Writing `H = K + iL` (K symmetric, L skew) and ψ = q + ip, the equation
//! iψ̇ = Hψ becomes
//!
//! ```text
//! q̇ = K p + L q = ∂H_sym/∂p
//! ṗ = −K q + L p = −∂H_sym/∂q
//! H_sym = ½(p·Kp + q·Kq) + p·Lq = ½ Re⟨ψ, Hψ⟩
//! ```
//!
//! with ħ = 1. The linear generator is `M = Γ(−iH) = [[L, K], [−K, L]]`.

use std::io::Write;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, KahlerError, Result};
use crate::kahler::{symplectic_omega, KahlerState};
use crate::linalg::{hermitian_eigen, j_mul_left, max_abs, symmetric_eigen, HermitianEigen, RMatrix, RVector};
use crate::operator::{gamma_lift, unitarity_residuals, ComplexOperator, KahlerOperator, STRUCTURE_TOL};
use crate::sampling;

/// Tolerance on the symmetry of K and antisymmetry of L.
pub const SPLIT_TOL: f64 = 1e-12;
/// Largest accepted residual of the implicit-midpoint linear solve.
pub const SOLVER_TOL: f64 = 1e-10;

/// `H = K + iL` with `K` symmetric and `L` skew-symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSplit {
    k_sym: RMatrix,
    l_skew: RMatrix,
}

impl HamiltonianSplit {
    pub fn new(k_sym: RMatrix, l_skew: RMatrix) -> Result<Self> {
        if !k_sym.is_square() || k_sym.nrows() == 0 {
            return Err(KahlerError::InvalidArgument("K must be a non-empty square matrix".into()));
        }
        check_dim(k_sym.nrows(), l_skew.nrows())?;
        check_dim(k_sym.ncols(), l_skew.ncols())?;
        let residual = max_abs(&(&k_sym - k_sym.transpose())).max(max_abs(&(&l_skew + l_skew.transpose())));
        if residual > SPLIT_TOL {
            return Err(KahlerError::NotHermitian { residual, tol: SPLIT_TOL });
        }
        Ok(Self { k_sym, l_skew })
    }

    pub fn dim(&self) -> usize {
        self.k_sym.nrows()
    }

    pub fn k(&self) -> &RMatrix {
        &self.k_sym
    }

    pub fn l(&self) -> &RMatrix {
        &self.l_skew
    }

    pub fn to_operator(&self) -> ComplexOperator {
        ComplexOperator::new(self.k_sym.clone(), self.l_skew.clone()).expect("validated shapes")
    }

    /// `M = Γ(−iH) = [[L, K], [−K, L]]`.
    pub fn generator(&self) -> KahlerOperator {
        let minus_i_h = self.to_operator().scale(Complex64::new(0.0, -1.0));
        gamma_lift(&minus_i_h)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { k_sym: &self.k_sym * s, l_skew: &self.l_skew * s }
    }
}

/// Splits a Hermitian operator into its symmetric real part and skew imaginary part.
pub fn split_hamiltonian(h: &ComplexOperator, tol: f64) -> Result<HamiltonianSplit> {
    let residual = h.hermitian_residual();
    if residual > tol {
        return Err(KahlerError::NotHermitian { residual, tol });
    }
    let (x, y) = (h.x(), h.y());
    Ok(HamiltonianSplit {
        k_sym: 0.5 * (x + x.transpose()),
        l_skew: 0.5 * (y - y.transpose()),
    })
}

/// `(q̇; ṗ) = (K p + L q; −K q + L p)`, returned as a stacked tangent vector.
pub fn vector_field(hs: &HamiltonianSplit, u: &KahlerState) -> Result<KahlerState> {
    check_dim(hs.dim(), u.dim())?;
    let q = RVector::from_column_slice(u.q());
    let p = RVector::from_column_slice(u.p());
    let dq = &hs.k_sym * &p + &hs.l_skew * &q;
    let dp = -(&hs.k_sym * &q) + &hs.l_skew * &p;
    KahlerState::new(dq.as_slice().to_vec(), dp.as_slice().to_vec())
}

/// `H_sym = ½(p·Kp + q·Kq) + p·Lq`.
pub fn hsym_value(hs: &HamiltonianSplit, u: &KahlerState) -> Result<f64> {
    check_dim(hs.dim(), u.dim())?;
    let q = RVector::from_column_slice(u.q());
    let p = RVector::from_column_slice(u.p());
    let kq = &hs.k_sym * &q;
    let kp = &hs.k_sym * &p;
    let lq = &hs.l_skew * &q;
    Ok(0.5 * (p.dot(&kp) + q.dot(&kq)) + p.dot(&lq))
}

/// Cached spectral decomposition of H for repeated exact propagation.
#[derive(Debug, Clone)]
pub struct ExactPropagator {
    eig: HermitianEigen,
}

impl ExactPropagator {
    pub fn new(h: &ComplexOperator) -> Result<Self> {
        let residual = h.hermitian_residual();
        if residual > STRUCTURE_TOL {
            return Err(KahlerError::NotHermitian { residual, tol: STRUCTURE_TOL });
        }
        Ok(Self { eig: hermitian_eigen(&h.to_complex()) })
    }

    pub fn dim(&self) -> usize {
        self.eig.values.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.values
    }

    /// Γ(exp(−iHt)).
    pub fn at(&self, t: f64) -> KahlerOperator {
        let u = self.eig.map_spectrum(|l| Complex64::from_polar(1.0, -l * t));
        gamma_lift(&ComplexOperator::from_complex(&u))
    }
}

/// Γ(exp(−iHt)) through the complex eigendecomposition of H.
pub fn propagator(h: &ComplexOperator, t: f64) -> Result<KahlerOperator> {
    Ok(ExactPropagator::new(h)?.at(t))
}

/// Γ(exp(−iHt)) computed without complex arithmetic: with `S = Γ(H)`
/// symmetric and commuting with J, `exp(−J S t) = cos(S t) − J sin(S t)`.
pub fn propagator_real(hs: &HamiltonianSplit, t: f64) -> KahlerOperator {
    let s = gamma_lift(&hs.to_operator()).into_block();
    let (values, w) = symmetric_eigen(&s);
    let spectral = |f: &dyn Fn(f64) -> f64| {
        let mut scaled = w.clone();
        for (c, &l) in values.iter().enumerate() {
            scaled.column_mut(c).scale_mut(f(l * t));
        }
        scaled * w.transpose()
    };
    let cos = spectral(&f64::cos);
    let sin = spectral(&f64::sin);
    KahlerOperator::from_block(cos - j_mul_left(&sin)).expect("even square block")
}

pub fn evolve_exact(h: &ComplexOperator, u0: &KahlerState, t: f64) -> Result<KahlerState> {
    check_dim(h.dim(), u0.dim())?;
    let prop = ExactPropagator::new(h)?;
    if t == 0.0 {
        return Ok(u0.clone());
    }
    prop.at(t).apply(u0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ExactExponential,
    ImplicitMidpoint,
}

/// Stored samples of a flow. `step_map` advances one stored sample to the
/// next (it already accounts for decimation).
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<KahlerState>,
    pub scheme: Scheme,
    pub step_map: Option<KahlerOperator>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &KahlerState {
        self.states.last().expect("trajectory has at least the initial state")
    }

    /// CSV with header `t,q_1..q_N,p_1..p_N,hsym,gnorm`, where `gnorm` is `sqrt(g(u, u))`.
    pub fn write_csv<W: Write>(&self, hs: &HamiltonianSplit, mut w: W) -> std::io::Result<()> {
        let n = hs.dim();
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|a| format!("q_{a}")));
        header.extend((1..=n).map(|a| format!("p_{a}")));
        header.push("hsym".into());
        header.push("gnorm".into());
        writeln!(w, "{}", header.join(","))?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let h = hsym_value(hs, s).map_err(std::io::Error::other)?;
            let mut row = vec![t.to_string()];
            row.extend(s.as_vector().iter().map(|x| x.to_string()));
            row.push(h.to_string());
            row.push(s.norm().to_string());
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn check_schedule(t_final: f64, steps: usize, stride: usize) -> Result<()> {
    if !(t_final > 0.0) || !t_final.is_finite() {
        return Err(KahlerError::InvalidArgument("t_final must be positive and finite".into()));
    }
    if steps == 0 || stride == 0 {
        return Err(KahlerError::InvalidArgument("steps and stride must be at least 1".into()));
    }
    Ok(())
}

fn run_linear(
    step: &KahlerOperator,
    u0: &KahlerState,
    t_final: f64,
    steps: usize,
    stride: usize,
    scheme: Scheme,
) -> Result<Trajectory> {
    let dt = t_final / steps as f64;
    let mut times = vec![0.0];
    let mut states = vec![u0.clone()];
    let mut current = u0.as_vector().clone();
    for i in 1..=steps {
        current = step.block() * &current;
        if i % stride == 0 || i == steps {
            times.push(i as f64 * dt);
            states.push(KahlerState::from_stacked(current.clone())?);
        }
    }
    let mut step_map = step.clone();
    for _ in 1..stride.min(steps) {
        step_map = KahlerOperator::from_block(step.block() * step_map.block())?;
    }
    Ok(Trajectory { times, states, scheme, step_map: Some(step_map) })
}

/// One implicit-midpoint step `(I − h/2 M)⁻¹ (I + h/2 M)`, the Cayley transform of `hM`.
pub fn cayley_step_map(hs: &HamiltonianSplit, h: f64) -> Result<KahlerOperator> {
    let m = hs.generator().into_block();
    let n2 = m.nrows();
    let ident = RMatrix::identity(n2, n2);
    let lhs = &ident - &m * (0.5 * h);
    let rhs = &ident + &m * (0.5 * h);
    let step = lhs
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or(KahlerError::SolverFailure { residual: f64::INFINITY })?;
    let residual = max_abs(&(&lhs * &step - &rhs));
    if !(residual <= SOLVER_TOL) {
        return Err(KahlerError::SolverFailure { residual });
    }
    KahlerOperator::from_block(step)
}

pub fn evolve_midpoint(hs: &HamiltonianSplit, u0: &KahlerState, t_final: f64, steps: usize) -> Result<Trajectory> {
    evolve_midpoint_strided(hs, u0, t_final, steps, 1)
}

/// Implicit midpoint, storing every `stride`-th state plus the endpoint.
pub fn evolve_midpoint_strided(
    hs: &HamiltonianSplit,
    u0: &KahlerState,
    t_final: f64,
    steps: usize,
    stride: usize,
) -> Result<Trajectory> {
    check_dim(hs.dim(), u0.dim())?;
    check_schedule(t_final, steps, stride)?;
    let step = cayley_step_map(hs, t_final / steps as f64)?;
    run_linear(&step, u0, t_final, steps, stride, Scheme::ImplicitMidpoint)
}

/// Exact flow sampled on the same grid as [`evolve_midpoint_strided`].
pub fn exact_trajectory(
    h: &ComplexOperator,
    u0: &KahlerState,
    t_final: f64,
    steps: usize,
    stride: usize,
) -> Result<Trajectory> {
    check_dim(h.dim(), u0.dim())?;
    check_schedule(t_final, steps, stride)?;
    let prop = ExactPropagator::new(h)?;
    let dt = t_final / steps as f64;
    let mut times = vec![0.0];
    let mut states = vec![u0.clone()];
    for i in (stride..=steps).step_by(stride).chain((!steps.is_multiple_of(stride)).then_some(steps)) {
        let t = i as f64 * dt;
        times.push(t);
        states.push(prop.at(t).apply(u0)?);
    }
    Ok(Trajectory {
        times,
        states,
        scheme: Scheme::ExactExponential,
        step_map: Some(prop.at(dt * stride.min(steps) as f64)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub hsym_drift: f64,
    pub gnorm_drift: f64,
    /// Max over sampled unit pairs of |ω(Su, Sv) − ω(u, v)| for the step map S.
    pub omega_defect: f64,
    /// ‖SᵀJS − J‖
    pub symplectic_residual: f64,
    /// ‖SᵀS − I‖
    pub orthogonal_residual: f64,
}

const OMEGA_SAMPLE_PAIRS: usize = 20;
const OMEGA_SAMPLE_SEED: u64 = 0x00de_c0de;

pub fn conservation_report(hs: &HamiltonianSplit, traj: &Trajectory) -> Result<ConservationReport> {
    let Some(first) = traj.states.first() else {
        return Err(KahlerError::InvalidArgument("empty trajectory".into()));
    };
    let h0 = hsym_value(hs, first)?;
    let n0 = first.norm();
    let mut hsym_drift = 0.0_f64;
    let mut gnorm_drift = 0.0_f64;
    for s in &traj.states[1..] {
        hsym_drift = hsym_drift.max((hsym_value(hs, s)? - h0).abs());
        gnorm_drift = gnorm_drift.max((s.norm() - n0).abs());
    }

    let (mut omega_defect, mut symplectic_residual, mut orthogonal_residual) = (0.0_f64, 0.0, 0.0);
    if let (true, Some(step)) = (traj.len() > 1, &traj.step_map) {
        let mut rng = ChaCha8Rng::seed_from_u64(OMEGA_SAMPLE_SEED);
        for _ in 0..OMEGA_SAMPLE_PAIRS {
            let u = sampling::random_unit_state(&mut rng, hs.dim());
            let v = sampling::random_unit_state(&mut rng, hs.dim());
            let before = symplectic_omega(&u, &v)?;
            let after = symplectic_omega(&step.apply(&u)?, &step.apply(&v)?)?;
            omega_defect = omega_defect.max((after - before).abs());
        }
        let r = unitarity_residuals(step);
        symplectic_residual = r.symplectic;
        orthogonal_residual = r.orthogonal;
    }
    Ok(ConservationReport { hsym_drift, gnorm_drift, omega_defect, symplectic_residual, orthogonal_residual })
}
