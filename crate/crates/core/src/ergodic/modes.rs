//! Normal modes of H_sym and action-angle coordinates.
//!
//! If `H = U diag(λ) U†`, the K-unitary map `Γ(U†)` takes (q; p) to normal
//! coordinates (q̃; p̃) in which `H_sym = ½ Σ λ_a (q̃_a² + p̃_a²)`: N decoupled
//! oscillators. Actions `F_a = q̃_a² + p̃_a²` are constants of motion and the
//! angles, defined by q̃ = √F cos θ, p̃ = −√F sin θ, advance as θ̇_a = λ_a.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, KahlerError, Result};
use crate::kahler::KahlerState;
use crate::linalg::{hermitian_eigen, RVector};
use crate::operator::{gamma_lift, ComplexOperator, KahlerOperator, STRUCTURE_TOL};

/// Below this action the angle of a mode is not defined.
pub const ZERO_ACTION: f64 = 1e-14;
/// Relative spacing below which two eigenfrequencies count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct NormalModeFrame {
    /// Eigenfrequencies, ascending.
    pub lambdas: Vec<f64>,
    /// Γ(U†), mapping (q; p) to normal-mode coordinates.
    pub transform: KahlerOperator,
    /// Repeated eigenvalues: the eigenbasis, and so the frame, is not unique.
    pub degenerate: bool,
}

pub fn normal_modes(h: &ComplexOperator) -> Result<NormalModeFrame> {
    let residual = h.hermitian_residual();
    if residual > STRUCTURE_TOL {
        return Err(KahlerError::NotHermitian { residual, tol: STRUCTURE_TOL });
    }
    let eig = hermitian_eigen(&h.to_complex());
    let scale = eig.values.iter().fold(1.0_f64, |m, l| m.max(l.abs()));
    let degenerate = eig.min_gap() < DEGENERACY_TOL * scale;
    let u_dagger = ComplexOperator::from_complex(&eig.vectors.adjoint());
    Ok(NormalModeFrame {
        lambdas: eig.values,
        transform: gamma_lift(&u_dagger),
        degenerate,
    })
}

impl NormalModeFrame {
    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }

    /// (q̃; p̃) = transform · (q; p).
    pub fn to_modes(&self, u: &KahlerState) -> Result<KahlerState> {
        self.transform.apply(u)
    }

    /// Inverse of [`Self::to_modes`]; the transform is orthogonal.
    pub fn from_modes(&self, modes: &KahlerState) -> Result<KahlerState> {
        check_dim(self.dim(), modes.dim())?;
        KahlerState::from_stacked(self.transform.block().tr_mul(modes.as_vector()))
    }

    /// ½ Σ λ_a (q̃_a² + p̃_a²).
    pub fn diagonal_hsym(&self, modes: &KahlerState) -> f64 {
        let (q, p) = (modes.q(), modes.p());
        0.5 * self
            .lambdas
            .iter()
            .enumerate()
            .map(|(a, l)| l * (q[a] * q[a] + p[a] * p[a]))
            .sum::<f64>()
    }

    /// Exact flow in normal coordinates: each mode rotates by `e^{−iλ_a t}`.
    pub fn flow_modes(&self, modes: &KahlerState, t: f64) -> KahlerState {
        rotate_modes(&self.lambdas, modes, t)
    }
}

pub(crate) fn rotate_modes(lambdas: &[f64], modes: &KahlerState, t: f64) -> KahlerState {
    let n = lambdas.len();
    let (q, p) = (modes.q(), modes.p());
    let mut out = RVector::zeros(2 * n);
    for a in 0..n {
        let (s, c) = (lambdas[a] * t).sin_cos();
        out[a] = q[a] * c + p[a] * s;
        out[n + a] = p[a] * c - q[a] * s;
    }
    KahlerState::from_stacked(out).expect("even length")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionAngle {
    pub actions: Vec<f64>,
    /// Angles in [0, 2π); meaningless where `angle_defined` is false.
    pub angles: Vec<f64>,
    pub angle_defined: Vec<bool>,
}

pub fn to_action_angle(frame: &NormalModeFrame, u: &KahlerState) -> Result<ActionAngle> {
    let modes = frame.to_modes(u)?;
    Ok(action_angle_of_modes(&modes))
}

pub fn action_angle_of_modes(modes: &KahlerState) -> ActionAngle {
    let (q, p) = (modes.q(), modes.p());
    let n = q.len();
    let mut out = ActionAngle {
        actions: Vec::with_capacity(n),
        angles: Vec::with_capacity(n),
        angle_defined: Vec::with_capacity(n),
    };
    for a in 0..n {
        let f = q[a] * q[a] + p[a] * p[a];
        out.actions.push(f);
        out.angles.push(wrap_angle((-p[a]).atan2(q[a])));
        out.angle_defined.push(f >= ZERO_ACTION);
    }
    out
}

/// Normal-mode point on the torus: q̃_a = √F_a cos θ_a, p̃_a = −√F_a sin θ_a.
pub fn modes_from_action_angle(actions: &[f64], angles: &[f64]) -> Result<KahlerState> {
    check_dim(actions.len(), angles.len())?;
    if actions.iter().any(|&f| f < 0.0) {
        return Err(KahlerError::InvalidArgument("actions must be non-negative".into()));
    }
    let q = actions.iter().zip(angles).map(|(f, th)| f.sqrt() * th.cos()).collect();
    let p = actions.iter().zip(angles).map(|(f, th)| -f.sqrt() * th.sin()).collect();
    KahlerState::new(q, p)
}

/// Maps an angle into [0, 2π).
pub fn wrap_angle(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    if w >= TAU { 0.0 } else { w }
}
