//! The real Kähler structure `(g, ω, J)` on ℝ^{2N} and the complexification
//! map γ(q, p) = q + i p.
//!
//! States are stacked as a single column `(q; p)` with `q` first. With that
//! stacking the complex structure is `J(q, p) = (-p, q)`, which is the unique
//! choice satisfying γ(J u) = i γ(u), and the symplectic form has matrix
//! `Ω = [[0, I], [-I, 0]] = -J`, so that ⟨γu, γv⟩ = g(u, v) + i ω(u, v).

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, KahlerError, Result};
use crate::linalg::{max_abs, symmetric_eigen, CVector, RMatrix, RVector};
use crate::sampling;

pub type ComplexVector = CVector;

/// A point `(q, p)` of ℝ^{2N}, representing ψ = q + i p.
#[derive(Debug, Clone, PartialEq)]
pub struct KahlerState {
    data: RVector,
}

impl KahlerState {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        check_dim(q.len(), p.len())?;
        if q.is_empty() {
            return Err(KahlerError::InvalidArgument("state dimension must be at least 1".into()));
        }
        let mut data = q;
        data.extend(p);
        Ok(Self { data: RVector::from_vec(data) })
    }

    /// Wraps a stacked `(q; p)` vector of even, nonzero length.
    pub fn from_stacked(data: RVector) -> Result<Self> {
        if data.is_empty() || !data.len().is_multiple_of(2) {
            return Err(KahlerError::InvalidArgument(format!(
                "stacked state must have positive even length, got {}",
                data.len()
            )));
        }
        Ok(Self { data })
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "state dimension must be at least 1");
        Self { data: RVector::zeros(2 * n) }
    }

    /// Real basis vector `e_k` (q = e_k, p = 0), i.e. γ⁻¹(|k⟩).
    pub fn basis(n: usize, k: usize) -> Self {
        let mut s = Self::zeros(n);
        s.data[k] = 1.0;
        s
    }

    /// Number of complex modes N.
    pub fn dim(&self) -> usize {
        self.data.len() / 2
    }

    pub fn q(&self) -> &[f64] {
        &self.data.as_slice()[..self.dim()]
    }

    pub fn p(&self) -> &[f64] {
        &self.data.as_slice()[self.dim()..]
    }

    pub fn as_vector(&self) -> &RVector {
        &self.data
    }

    pub fn into_vector(self) -> RVector {
        self.data
    }

    /// g(u, u) = |q|² + |p|².
    pub fn norm_sq(&self) -> f64 {
        self.data.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(KahlerError::InvalidArgument("cannot normalize a zero or non-finite state".into()));
        }
        Ok(Self { data: &self.data / norm })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { data: &self.data * s }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.data.len(), other.data.len(), "state dimension mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

impl std::ops::Neg for KahlerState {
    type Output = KahlerState;
    fn neg(self) -> Self::Output {
        KahlerState { data: -self.data }
    }
}

/// JSON form of a state. `dims` annotates composite states with their factor sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateRecord {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<[usize; 2]>,
}

impl StateRecord {
    pub fn from_state(state: &KahlerState, dims: Option<[usize; 2]>) -> Self {
        Self { q: state.q().to_vec(), p: state.p().to_vec(), dims }
    }

    pub fn to_state(&self) -> Result<KahlerState> {
        let state = KahlerState::new(self.q.clone(), self.p.clone())?;
        if let Some([m, n]) = self.dims {
            check_dim(m * n, state.dim())?;
        }
        Ok(state)
    }
}

/// γ(q, p) = q + i p.
pub fn complexify(state: &KahlerState) -> ComplexVector {
    let n = state.dim();
    ComplexVector::from_fn(n, |a, _| Complex64::new(state.data[a], state.data[n + a]))
}

pub fn decomplexify(v: &ComplexVector) -> KahlerState {
    let n = v.len();
    let mut data = RVector::zeros(2 * n);
    for (a, z) in v.iter().enumerate() {
        data[a] = z.re;
        data[n + a] = z.im;
    }
    KahlerState { data }
}

/// g(u, v) = q_u·q_v + p_u·p_v.
pub fn metric_g(u: &KahlerState, v: &KahlerState) -> Result<f64> {
    check_dim(u.dim(), v.dim())?;
    Ok(u.data.dot(&v.data))
}

/// ω(u, v) = q_u·p_v − p_u·q_v.
pub fn symplectic_omega(u: &KahlerState, v: &KahlerState) -> Result<f64> {
    check_dim(u.dim(), v.dim())?;
    let n = u.dim();
    let (du, dv) = (u.data.as_slice(), v.data.as_slice());
    Ok((0..n).map(|a| du[a] * dv[n + a] - du[n + a] * dv[a]).sum())
}

/// J(q, p) = (−p, q).
pub fn apply_j(u: &KahlerState) -> KahlerState {
    let n = u.dim();
    let mut data = RVector::zeros(2 * n);
    for a in 0..n {
        data[a] = -u.data[n + a];
        data[n + a] = u.data[a];
    }
    KahlerState { data }
}

/// Ω(q, p) = (p, −q), the matrix of ω: ω(u, v) = uᵀ Ω v.
pub fn apply_omega(u: &KahlerState) -> KahlerState {
    -apply_j(u)
}

/// The three structure maps of a Kähler space. [`KahlerStructure`] is the
/// standard one; alternative implementations exist to exercise
/// [`validate_structure_with`].
pub trait KahlerForms {
    fn dim(&self) -> usize;
    fn metric(&self, u: &KahlerState, v: &KahlerState) -> f64;
    fn omega(&self, u: &KahlerState, v: &KahlerState) -> f64;
    fn complex_structure(&self, u: &KahlerState) -> KahlerState;
}

/// Standard Kähler structure on ℝ^{2N}; `J` and `Ω` are applied as
/// permute-and-negate kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KahlerStructure {
    n: usize,
}

impl KahlerStructure {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(KahlerError::InvalidArgument("n must be at least 1".into()));
        }
        Ok(Self { n })
    }
}

impl KahlerForms for KahlerStructure {
    fn dim(&self) -> usize {
        self.n
    }

    fn metric(&self, u: &KahlerState, v: &KahlerState) -> f64 {
        metric_g(u, v).expect("state dimension mismatch")
    }

    fn omega(&self, u: &KahlerState, v: &KahlerState) -> f64 {
        symplectic_omega(u, v).expect("state dimension mismatch")
    }

    fn complex_structure(&self, u: &KahlerState) -> KahlerState {
        apply_j(u)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub name: String,
    pub max_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub n: usize,
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub axioms: Vec<AxiomCheck>,
    pub pass: bool,
}

impl StructureReport {
    pub fn axiom(&self, name: &str) -> Option<&AxiomCheck> {
        self.axioms.iter().find(|a| a.name == name)
    }
}

pub const AXIOM_J_SQUARED: &str = "J^2 = -I";
pub const AXIOM_OMEGA_J: &str = "Omega J = I";
pub const AXIOM_G_SYMMETRIC: &str = "g symmetric";
pub const AXIOM_G_POSITIVE: &str = "g positive definite";
pub const AXIOM_OMEGA_SKEW: &str = "omega antisymmetric";
pub const AXIOM_G_FROM_OMEGA: &str = "g = omega(., J.)";
pub const AXIOM_OMEGA_J_INVARIANT: &str = "omega(J., J.) = omega";
pub const AXIOM_HERMITIAN_PRODUCT: &str = "<gamma u, gamma v> = g + i omega";

pub const DEFAULT_STRUCTURE_SEED: u64 = 0x4b41_484c_4552;
pub const DEFAULT_STRUCTURE_SAMPLES: usize = 128;

pub fn validate_structure(n: usize, tol: f64) -> Result<StructureReport> {
    let forms = KahlerStructure::new(n)?;
    validate_structure_with(&forms, tol, DEFAULT_STRUCTURE_SEED, DEFAULT_STRUCTURE_SAMPLES)
}

/// Checks the Kähler axioms of `forms` on `samples` (at least 100) seeded
/// random vector pairs, plus matrix-level identities built from basis vectors.
pub fn validate_structure_with(
    forms: &impl KahlerForms,
    tol: f64,
    seed: u64,
    samples: usize,
) -> Result<StructureReport> {
    if !(tol > 0.0) {
        return Err(KahlerError::InvalidArgument("tol must be positive".into()));
    }
    let n = forms.dim();
    let samples = samples.max(100);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let basis: Vec<KahlerState> = (0..2 * n)
        .map(|k| KahlerState::from_stacked(RVector::from_fn(2 * n, |i, _| f64::from(u8::from(i == k)))).unwrap())
        .collect();
    let j_mat = RMatrix::from_fn(2 * n, 2 * n, |r, c| forms.complex_structure(&basis[c]).data[r]);
    let omega_mat = RMatrix::from_fn(2 * n, 2 * n, |r, c| forms.omega(&basis[r], &basis[c]));
    let gram = RMatrix::from_fn(2 * n, 2 * n, |r, c| forms.metric(&basis[r], &basis[c]));
    let ident = RMatrix::identity(2 * n, 2 * n);

    let j_squared = max_abs(&(&j_mat * &j_mat + &ident));
    let omega_j = max_abs(&(&omega_mat * &j_mat - &ident));
    let g_sym = max_abs(&(&gram - gram.transpose()));
    let (gram_eigs, _) = symmetric_eigen(&(0.5 * (&gram + gram.transpose())));
    let min_eig = gram_eigs[0];

    let mut omega_skew = 0.0_f64;
    let mut g_from_omega = 0.0_f64;
    let mut omega_invariant = 0.0_f64;
    let mut hermitian_product = 0.0_f64;
    for _ in 0..samples {
        let u = sampling::random_state(&mut rng, n);
        let v = sampling::random_state(&mut rng, n);
        let ju = forms.complex_structure(&u);
        let jv = forms.complex_structure(&v);
        let g_uv = forms.metric(&u, &v);
        let w_uv = forms.omega(&u, &v);
        omega_skew = omega_skew.max((w_uv + forms.omega(&v, &u)).abs());
        g_from_omega = g_from_omega.max((g_uv - forms.omega(&u, &jv)).abs());
        omega_invariant = omega_invariant.max((forms.omega(&ju, &jv) - w_uv).abs());
        let inner = complexify(&u).dotc(&complexify(&v));
        hermitian_product = hermitian_product.max((inner.re - g_uv).abs().max((inner.im - w_uv).abs()));
    }

    let check = |name: &str, residual: f64| AxiomCheck {
        name: name.to_string(),
        max_residual: residual,
        pass: residual <= tol,
    };
    let axioms = vec![
        check(AXIOM_J_SQUARED, j_squared),
        check(AXIOM_OMEGA_J, omega_j),
        check(AXIOM_G_SYMMETRIC, g_sym),
        AxiomCheck {
            name: AXIOM_G_POSITIVE.to_string(),
            max_residual: (-min_eig).max(0.0),
            pass: min_eig > 0.0,
        },
        check(AXIOM_OMEGA_SKEW, omega_skew),
        check(AXIOM_G_FROM_OMEGA, g_from_omega),
        check(AXIOM_OMEGA_J_INVARIANT, omega_invariant),
        check(AXIOM_HERMITIAN_PRODUCT, hermitian_product),
    ];
    let pass = axioms.iter().all(|a| a.pass);
    Ok(StructureReport { n, tol, samples, seed, axioms, pass })
}
