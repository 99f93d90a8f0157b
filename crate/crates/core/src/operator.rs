//! Operators on the Kähler space and the lifting Γ from complex operators.
//!
//! For `L = X + iY` acting on ψ = q + ip,
//! `Lψ = (Xq − Yp) + i(Yq + Xp)`, so under the `(q; p)` stacking
//! `Γ(L) = [[X, −Y], [Y, X]]`. Γ is a real-algebra isomorphism onto the
//! 2N×2N matrices that commute with `J`; it sends `L†` to the transpose,
//! Hermitian operators to symmetric `Ω`-commuting matrices and unitaries to
//! `Sp(2N, ℝ) ∩ O(2N)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, KahlerError, Result};
use crate::kahler::{metric_g, symplectic_omega, ComplexVector, KahlerState};
use crate::linalg::{j_matrix, j_mul_left, j_mul_right, max_abs, to_complex, CMatrix, RMatrix};

/// Default tolerance for structural predicates (block form, Hermiticity, unitarity).
pub const STRUCTURE_TOL: f64 = 1e-10;
/// Default tolerance for agreement with the complex oracle.
pub const ORACLE_TOL: f64 = 1e-12;
/// Branches below this probability have no post-measurement state.
pub const ZERO_PROBABILITY: f64 = 1e-14;

/// A complex N×N operator `L = X + iY`, stored as its real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexOperator {
    x: RMatrix,
    y: RMatrix,
}

impl ComplexOperator {
    pub fn new(x: RMatrix, y: RMatrix) -> Result<Self> {
        if !x.is_square() || x.nrows() == 0 {
            return Err(KahlerError::InvalidArgument("real part must be a non-empty square matrix".into()));
        }
        if x.shape() != y.shape() {
            return Err(KahlerError::DimensionMismatch { expected: x.nrows(), found: y.nrows() });
        }
        Ok(Self { x, y })
    }

    pub fn from_complex(m: &CMatrix) -> Self {
        assert!(m.is_square(), "operator must be square");
        Self { x: m.map(|z| z.re), y: m.map(|z| z.im) }
    }

    pub fn to_complex(&self) -> CMatrix {
        to_complex(&self.x, &self.y)
    }

    pub fn from_real(x: RMatrix) -> Result<Self> {
        let y = RMatrix::zeros(x.nrows(), x.ncols());
        Self::new(x, y)
    }

    pub fn identity(n: usize) -> Self {
        Self { x: RMatrix::identity(n, n), y: RMatrix::zeros(n, n) }
    }

    pub fn zeros(n: usize) -> Self {
        Self { x: RMatrix::zeros(n, n), y: RMatrix::zeros(n, n) }
    }

    /// Real diagonal operator `diag(values)`.
    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self {
            x: RMatrix::from_fn(n, n, |r, c| if r == c { values[r] } else { 0.0 }),
            y: RMatrix::zeros(n, n),
        }
    }

    pub fn pauli_x() -> Self {
        Self::from_real(RMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap()
    }

    pub fn pauli_y() -> Self {
        Self {
            x: RMatrix::zeros(2, 2),
            y: RMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]),
        }
    }

    pub fn pauli_z() -> Self {
        Self::diagonal(&[1.0, -1.0])
    }

    /// Rank-one projector `|v⟩⟨v| / ⟨v|v⟩`.
    pub fn projector(v: &ComplexVector) -> Result<Self> {
        let norm_sq = v.norm_squared();
        if norm_sq == 0.0 {
            return Err(KahlerError::InvalidArgument("cannot project onto the zero vector".into()));
        }
        let m = v * v.adjoint() / Complex64::new(norm_sq, 0.0);
        Ok(Self::from_complex(&m))
    }

    pub fn dim(&self) -> usize {
        self.x.nrows()
    }

    pub fn x(&self) -> &RMatrix {
        &self.x
    }

    pub fn y(&self) -> &RMatrix {
        &self.y
    }

    pub fn adjoint(&self) -> Self {
        Self { x: self.x.transpose(), y: -self.y.transpose() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self {
            x: &self.x * &other.x - &self.y * &other.y,
            y: &self.x * &other.y + &self.y * &other.x,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self { x: &self.x + &other.x, y: &self.y + &other.y })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            x: &self.x * s.re - &self.y * s.im,
            y: &self.x * s.im + &self.y * s.re,
        }
    }

    /// `max(‖X − Xᵀ‖, ‖Y + Yᵀ‖)` in max-abs norm; zero iff Hermitian.
    pub fn hermitian_residual(&self) -> f64 {
        max_abs(&(&self.x - self.x.transpose())).max(max_abs(&(&self.y + self.y.transpose())))
    }
}

/// JSON form of a complex operator: `{"n": N, "x": [[...]], "y": [[...]]}` (rows).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorRecord {
    pub n: usize,
    pub x: Vec<Vec<f64>>,
    #[serde(default)]
    pub y: Option<Vec<Vec<f64>>>,
}

impl OperatorRecord {
    pub fn from_operator(op: &ComplexOperator) -> Self {
        let rows = |m: &RMatrix| (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect();
        Self { n: op.dim(), x: rows(&op.x), y: Some(rows(&op.y)) }
    }

    pub fn to_operator(&self) -> Result<ComplexOperator> {
        let n = self.n;
        let parse = |rows: &[Vec<f64>]| -> Result<RMatrix> {
            check_dim(n, rows.len())?;
            for row in rows {
                check_dim(n, row.len())?;
            }
            Ok(RMatrix::from_fn(n, n, |r, c| rows[r][c]))
        };
        let x = parse(&self.x)?;
        let y = match &self.y {
            Some(rows) => parse(rows)?,
            None => RMatrix::zeros(n, n),
        };
        ComplexOperator::new(x, y)
    }
}

/// A real 2N×2N operator on the Kähler space.
///
/// Any square matrix of even size is accepted so that non-lifts (generic
/// symplectic matrices, say) can be represented and rejected by
/// [`gamma_lower`]; [`KahlerOperator::structure_residual`] measures the
/// distance from the image of Γ.
#[derive(Debug, Clone, PartialEq)]
pub struct KahlerOperator {
    block: RMatrix,
}

impl KahlerOperator {
    pub fn from_block(block: RMatrix) -> Result<Self> {
        if !block.is_square() || block.nrows() == 0 || !block.nrows().is_multiple_of(2) {
            return Err(KahlerError::InvalidArgument(format!(
                "Kähler operator must be square with positive even size, got {}x{}",
                block.nrows(),
                block.ncols()
            )));
        }
        Ok(Self { block })
    }

    pub fn identity(n: usize) -> Self {
        Self { block: RMatrix::identity(2 * n, 2 * n) }
    }

    /// The complex structure `J = Γ(i·I)`.
    pub fn j(n: usize) -> Self {
        Self { block: j_matrix(n) }
    }

    /// The symplectic matrix `Ω = −J`.
    pub fn omega(n: usize) -> Self {
        Self { block: -j_matrix(n) }
    }

    /// Number of complex modes N (the block is 2N×2N).
    pub fn dim(&self) -> usize {
        self.block.nrows() / 2
    }

    pub fn block(&self) -> &RMatrix {
        &self.block
    }

    pub fn into_block(self) -> RMatrix {
        self.block
    }

    pub fn apply(&self, u: &KahlerState) -> Result<KahlerState> {
        check_dim(self.dim(), u.dim())?;
        KahlerState::from_stacked(&self.block * u.as_vector())
    }

    pub fn transpose(&self) -> Self {
        Self { block: self.block.transpose() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self { block: &self.block + &other.block })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { block: &self.block * s }
    }

    /// Distance from the Γ image: `max(‖TL − BR‖, ‖TR + BL‖)`.
    pub fn structure_residual(&self) -> f64 {
        let n = self.dim();
        let b = &self.block;
        let mut r = 0.0_f64;
        for c in 0..n {
            for row in 0..n {
                r = r.max((b[(row, c)] - b[(n + row, n + c)]).abs());
                r = r.max((b[(row, n + c)] + b[(n + row, c)]).abs());
            }
        }
        r
    }

    /// `‖mJ − Jm‖`; zero exactly when the operator is complex-linear.
    pub fn j_commutator_residual(&self) -> f64 {
        max_abs(&(j_mul_right(&self.block) - j_mul_left(&self.block)))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs(&(&self.block - &other.block))
    }
}

/// Γ(X + iY) = [[X, −Y], [Y, X]].
pub fn gamma_lift(l: &ComplexOperator) -> KahlerOperator {
    let n = l.dim();
    let mut block = RMatrix::zeros(2 * n, 2 * n);
    for c in 0..n {
        for r in 0..n {
            let (x, y) = (l.x[(r, c)], l.y[(r, c)]);
            block[(r, c)] = x;
            block[(n + r, n + c)] = x;
            block[(r, n + c)] = -y;
            block[(n + r, c)] = y;
        }
    }
    KahlerOperator { block }
}

/// Inverse of Γ with the default structure tolerance.
pub fn gamma_lower(m: &KahlerOperator) -> Result<ComplexOperator> {
    gamma_lower_with_tol(m, STRUCTURE_TOL)
}

/// Reads X from the top-left block and Y from the bottom-left block, after
/// checking that `m` lies in the image of Γ.
pub fn gamma_lower_with_tol(m: &KahlerOperator, tol: f64) -> Result<ComplexOperator> {
    let residual = m.structure_residual();
    if residual > tol {
        return Err(KahlerError::StructureViolation { residual, tol });
    }
    let n = m.dim();
    let b = &m.block;
    Ok(ComplexOperator {
        x: b.view((0, 0), (n, n)).into_owned(),
        y: b.view((n, 0), (n, n)).into_owned(),
    })
}

/// Operator product `a · b`, so that Γ(L₁L₂) = compose(Γ(L₁), Γ(L₂)).
pub fn compose(a: &KahlerOperator, b: &KahlerOperator) -> Result<KahlerOperator> {
    check_dim(a.dim(), b.dim())?;
    Ok(KahlerOperator { block: &a.block * &b.block })
}

/// Adjoint with respect to both g and ω, which for the standard structure is
/// the transpose.
pub fn k_adjoint(m: &KahlerOperator) -> KahlerOperator {
    m.transpose()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermiticityResiduals {
    /// ‖mᵀ − m‖
    pub symmetry: f64,
    /// ‖mΩ − Ωm‖
    pub omega_commutator: f64,
}

pub fn hermiticity_residuals(m: &KahlerOperator) -> HermiticityResiduals {
    HermiticityResiduals {
        symmetry: max_abs(&(m.block.transpose() - &m.block)),
        // Ω = −J, so ‖mΩ − Ωm‖ = ‖mJ − Jm‖.
        omega_commutator: m.j_commutator_residual(),
    }
}

/// `mᵀ = m` and `mΩ = Ωm` within `tol` (max-abs).
pub fn is_k_hermitian(m: &KahlerOperator, tol: f64) -> bool {
    let r = hermiticity_residuals(m);
    r.symmetry <= tol && r.omega_commutator <= tol
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitarityResiduals {
    /// ‖mᵀ J m − J‖
    pub symplectic: f64,
    /// ‖mᵀ m − I‖
    pub orthogonal: f64,
}

pub fn unitarity_residuals(m: &KahlerOperator) -> UnitarityResiduals {
    let n2 = m.block.nrows();
    let mt = m.block.transpose();
    let mtjm = &mt * j_mul_left(&m.block);
    UnitarityResiduals {
        symplectic: max_abs(&(mtjm - j_matrix(n2 / 2))),
        orthogonal: max_abs(&(&mt * &m.block - RMatrix::identity(n2, n2))),
    }
}

/// Membership in `Sp(2N, ℝ) ∩ O(2N)`.
pub fn is_k_unitary(m: &KahlerOperator, tol: f64) -> bool {
    let r = unitarity_residuals(m);
    r.symplectic <= tol && r.orthogonal <= tol
}

/// `(g(u, m u), ω(u, m u))`, the real and imaginary parts of ⟨ψ, Lψ⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub g_part: f64,
    pub omega_part: f64,
}

pub fn expectation(m: &KahlerOperator, u: &KahlerState) -> Result<Expectation> {
    let mu = m.apply(u)?;
    Ok(Expectation {
        g_part: metric_g(u, &mu)?,
        omega_part: symplectic_omega(u, &mu)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    pub probability: f64,
    pub post_state: KahlerState,
}

/// Projective measurement with a lifted projector. The input state is not
/// modified; the collapsed state is returned.
pub fn measure(p_lift: &KahlerOperator, u: &KahlerState, tol: f64) -> Result<MeasurementOutcome> {
    check_dim(p_lift.dim(), u.dim())?;
    let herm = hermiticity_residuals(p_lift);
    let idempotence = max_abs(&(&p_lift.block * &p_lift.block - &p_lift.block));
    let hermiticity = herm.symmetry.max(herm.omega_commutator);
    if idempotence > tol || hermiticity > tol {
        return Err(KahlerError::NotAProjector { idempotence, hermiticity, tol });
    }
    let norm_sq = u.norm_sq();
    if (norm_sq - 1.0).abs() > tol {
        return Err(KahlerError::NotNormalized { norm_sq });
    }
    let projected = p_lift.apply(u)?;
    let probability = projected.norm_sq();
    if probability < ZERO_PROBABILITY {
        return Err(KahlerError::ZeroProbabilityBranch { probability });
    }
    Ok(MeasurementOutcome {
        probability: probability.min(1.0),
        post_state: projected.scaled(1.0 / probability.sqrt()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kahler::{complexify, decomplexify};

    fn ket(amps: &[(f64, f64)]) -> ComplexVector {
        ComplexVector::from_iterator(amps.len(), amps.iter().map(|&(r, i)| Complex64::new(r, i)))
    }

    #[test]
    fn lift_of_i_is_j_and_lift_of_identity_is_identity() {
        let i_op = ComplexOperator::identity(3).scale(Complex64::new(0.0, 1.0));
        assert_eq!(gamma_lift(&i_op), KahlerOperator::j(3));
        assert_eq!(gamma_lift(&ComplexOperator::identity(3)), KahlerOperator::identity(3));
    }

    #[test]
    fn lift_of_pauli_y() {
        let expected = RMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, -1.0, 0.0, //
                0.0, -1.0, 0.0, 0.0, //
                1.0, 0.0, 0.0, 0.0,
            ],
        );
        let lifted = gamma_lift(&ComplexOperator::pauli_y());
        assert_eq!(lifted.block(), &expected);
        // Action on basis states agrees with σ_y applied in ℂ².
        let sy = ComplexOperator::pauli_y().to_complex();
        for k in 0..2 {
            let u = KahlerState::basis(2, k);
            let via_oracle = decomplexify(&(&sy * complexify(&u)));
            assert_eq!(lifted.apply(&u).unwrap(), via_oracle);
        }
    }

    #[test]
    fn lower_inverts_lift() {
        assert_eq!(
            gamma_lower(&KahlerOperator::j(2)).unwrap(),
            ComplexOperator::identity(2).scale(Complex64::new(0.0, 1.0))
        );
        let sy = ComplexOperator::pauli_y();
        assert_eq!(gamma_lower(&gamma_lift(&sy)).unwrap(), sy);
    }

    #[test]
    fn lower_rejects_non_lift() {
        // Symmetric, but not complex-linear.
        let m = RMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, 2.0, 0.0, 0.0, //
                2.0, 3.0, 0.0, 0.0, //
                0.0, 0.0, -1.0, 0.0, //
                0.0, 0.0, 0.0, 5.0,
            ],
        );
        let op = KahlerOperator::from_block(m).unwrap();
        assert!(matches!(gamma_lower(&op), Err(KahlerError::StructureViolation { .. })));
    }

    #[test]
    fn compose_examples() {
        let j = KahlerOperator::j(2);
        assert_eq!(compose(&j, &j).unwrap(), KahlerOperator::identity(2).scale(-1.0));
        let xy = compose(&gamma_lift(&ComplexOperator::pauli_x()), &gamma_lift(&ComplexOperator::pauli_y())).unwrap();
        let i_sz = gamma_lift(&ComplexOperator::pauli_z().scale(Complex64::new(0.0, 1.0)));
        assert_eq!(xy, i_sz);
        assert!(compose(&j, &KahlerOperator::j(3)).is_err());
    }

    #[test]
    fn adjoint_of_j_is_minus_j() {
        assert_eq!(k_adjoint(&KahlerOperator::j(2)), KahlerOperator::j(2).scale(-1.0));
        let sy = gamma_lift(&ComplexOperator::pauli_y());
        assert_eq!(k_adjoint(&sy), sy);
    }

    #[test]
    fn hermiticity_predicate() {
        assert!(is_k_hermitian(&gamma_lift(&ComplexOperator::pauli_y()), 1e-12));
        assert!(!is_k_hermitian(&KahlerOperator::j(2), 1e-12));
    }

    #[test]
    fn unitarity_predicate() {
        assert!(is_k_unitary(&KahlerOperator::identity(3), 1e-12));
        let theta: f64 = 0.7;
        let phase = ComplexOperator::identity(2).scale(Complex64::new(theta.cos(), theta.sin()));
        assert!(is_k_unitary(&gamma_lift(&phase), 1e-12));

        // Squeeze diag(2, 1/2) on (q, p): symplectic, not orthogonal.
        let squeeze = KahlerOperator::from_block(RMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 0.5]))).unwrap();
        let r = unitarity_residuals(&squeeze);
        assert!(r.symplectic < 1e-15);
        assert!((r.orthogonal - 3.0).abs() < 1e-15);
        assert!(!is_k_unitary(&squeeze, 1e-12));
    }

    #[test]
    fn expectation_examples() {
        let unit = KahlerState::new(vec![0.6, 0.0], vec![0.0, 0.8]).unwrap();
        let e = expectation(&KahlerOperator::identity(2), &unit).unwrap();
        assert!((e.g_part - 1.0).abs() < 1e-15 && e.omega_part == 0.0);

        let sz = gamma_lift(&ComplexOperator::pauli_z());
        let up = expectation(&sz, &KahlerState::basis(2, 0)).unwrap();
        let down = expectation(&sz, &KahlerState::basis(2, 1)).unwrap();
        assert_eq!((up.g_part, up.omega_part), (1.0, 0.0));
        assert_eq!((down.g_part, down.omega_part), (-1.0, 0.0));

        let real = KahlerState::new(vec![0.6, 0.8], vec![0.0, 0.0]).unwrap();
        let ej = expectation(&KahlerOperator::j(2), &real).unwrap();
        assert_eq!(ej.g_part, 0.0);
        assert!((ej.omega_part - 1.0).abs() < 1e-15);
    }

    #[test]
    fn measurement_examples() {
        let p0 = gamma_lift(&ComplexOperator::projector(&ket(&[(1.0, 0.0), (0.0, 0.0)])).unwrap());
        let p1 = gamma_lift(&ComplexOperator::projector(&ket(&[(0.0, 0.0), (1.0, 0.0)])).unwrap());
        let zero = KahlerState::basis(2, 0);

        let out = measure(&p0, &zero, 1e-12).unwrap();
        assert_eq!(out.probability, 1.0);
        assert_eq!(out.post_state, zero);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = KahlerState::new(vec![s, s], vec![0.0, 0.0]).unwrap();
        let out = measure(&p0, &plus, 1e-12).unwrap();
        assert!((out.probability - 0.5).abs() < 1e-15);
        assert!(out.post_state.max_abs_diff(&zero) < 1e-15);

        assert!(matches!(
            measure(&p1, &zero, 1e-12),
            Err(KahlerError::ZeroProbabilityBranch { .. })
        ));
    }

    #[test]
    fn measurement_rejects_non_projectors_and_unnormalized_states() {
        let j = KahlerOperator::j(2);
        assert!(matches!(measure(&j, &KahlerState::basis(2, 0), 1e-12), Err(KahlerError::NotAProjector { .. })));
        let twice = gamma_lift(&ComplexOperator::identity(2).scale(Complex64::new(2.0, 0.0)));
        assert!(matches!(measure(&twice, &KahlerState::basis(2, 0), 1e-12), Err(KahlerError::NotAProjector { .. })));
        let id = KahlerOperator::identity(2);
        assert!(matches!(
            measure(&id, &KahlerState::basis(2, 0).scaled(2.0), 1e-12),
            Err(KahlerError::NotNormalized { .. })
        ));
    }

    #[test]
    fn operator_record_round_trip() {
        let op = ComplexOperator::pauli_y();
        let json = serde_json::to_string(&OperatorRecord::from_operator(&op)).unwrap();
        let back: OperatorRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_operator().unwrap(), op);
        let bad = OperatorRecord { n: 2, x: vec![vec![1.0]], y: None };
        assert!(bad.to_operator().is_err());
    }
}
