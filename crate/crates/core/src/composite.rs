//! Composite systems.
//!
//! The physical composition rule is the tensor product over ℂ: lower both
//! factors through γ, take the Kronecker product in ℂ^m ⊗ ℂ^n and lift back,
//! giving a Kähler space of real dimension 2mn. The tensor product over ℝ
//! (real dimension 4mn) is exposed as dimension bookkeeping only; no dynamics
//! or measurement is defined on it.
//!
//! Kronecker index convention: first factor outer, composite index `i * n + j`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, KahlerError, Result};
use crate::kahler::{complexify, decomplexify, KahlerState, StateRecord};
use crate::linalg::{kron, kron_vec, CMatrix, CVector};
use crate::operator::{gamma_lift, gamma_lower, ComplexOperator, KahlerOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TensorField {
    RealField,
    ComplexField,
}

/// Dimension bookkeeping for `ℝ^{2m} ⊗ ℝ^{2n}`; `result_dim` is the real dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeLabel {
    pub mode: TensorField,
    pub dims: (usize, usize),
    pub result_dim: usize,
}

fn check_factor_dims(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(KahlerError::InvalidArgument("factor dimensions must be at least 1".into()));
    }
    Ok(())
}

/// `ℝ^{2m} ⊗_ℝ ℝ^{2n} = ℝ^{4mn}`.
pub fn tensor_dim_real(m: usize, n: usize) -> Result<CompositeLabel> {
    check_factor_dims(m, n)?;
    Ok(CompositeLabel { mode: TensorField::RealField, dims: (m, n), result_dim: 4 * m * n })
}

/// `ℝ^{2m} ⊗_ℂ ℝ^{2n} = ℝ^{2mn}`.
pub fn tensor_dim_complex(m: usize, n: usize) -> Result<CompositeLabel> {
    check_factor_dims(m, n)?;
    Ok(CompositeLabel { mode: TensorField::ComplexField, dims: (m, n), result_dim: 2 * m * n })
}

pub fn tensor_state_complex(a: &KahlerState, b: &KahlerState) -> KahlerState {
    decomplexify(&kron_vec(&complexify(a), &complexify(b)))
}

/// Γ(Γ⁻¹(a) ⊗ Γ⁻¹(b)).
pub fn tensor_operator_complex(a: &KahlerOperator, b: &KahlerOperator) -> Result<KahlerOperator> {
    let la = gamma_lower(a)?.to_complex();
    let lb = gamma_lower(b)?.to_complex();
    Ok(gamma_lift(&ComplexOperator::from_complex(&kron(&la, &lb))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntangledKind {
    BellPhiPlus,
}

/// γ⁻¹((|00⟩ + |11⟩)/√2), a two-qubit state with 8 real components.
pub fn entangled_pair(kind: EntangledKind) -> KahlerState {
    match kind {
        EntangledKind::BellPhiPlus => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            KahlerState::new(vec![s, 0.0, 0.0, s], vec![0.0; 4]).expect("fixed size")
        }
    }
}

/// Number of nonzero Schmidt coefficients (singular values above `tol`) of a
/// state on an `m × n` composite. Rank 1 exactly for ℂ-tensor products.
pub fn schmidt_rank(state: &KahlerState, dims: (usize, usize), tol: f64) -> Result<usize> {
    let (m, n) = dims;
    check_dim(m * n, state.dim())?;
    let psi: CVector = complexify(state);
    let coeffs = CMatrix::from_fn(m, n, |i, j| psi[i * n + j]);
    let svd = coeffs.svd(false, false);
    Ok(svd.singular_values.iter().filter(|&&s| s > tol).count())
}

/// State plus its factor sizes, serialized as `{"q", "p", "dims": [m, n]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeState {
    pub state: KahlerState,
    pub dims: (usize, usize),
}

impl CompositeState {
    pub fn new(state: KahlerState, dims: (usize, usize)) -> Result<Self> {
        check_dim(dims.0 * dims.1, state.dim())?;
        Ok(Self { state, dims })
    }

    pub fn product(a: &KahlerState, b: &KahlerState) -> Self {
        Self { state: tensor_state_complex(a, b), dims: (a.dim(), b.dim()) }
    }

    pub fn to_record(&self) -> StateRecord {
        StateRecord::from_state(&self.state, Some([self.dims.0, self.dims.1]))
    }

    pub fn from_record(record: &StateRecord) -> Result<Self> {
        let state = record.to_state()?;
        let [m, n] = record
            .dims
            .ok_or_else(|| KahlerError::InvalidArgument("composite state requires a dims annotation".into()))?;
        Self::new(state, (m, n))
    }

    /// Amplitude of basis state `|i, j⟩`.
    pub fn amplitude(&self, i: usize, j: usize) -> Complex64 {
        let k = i * self.dims.1 + j;
        Complex64::new(self.state.q()[k], self.state.p()[k])
    }
}
