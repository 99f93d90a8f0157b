//! Grid quantization on an interval.
//!
//! Points are cell centres `x_j = x_min + (j + ½)h`, `h = (x_max − x_min)/n`.
//! Difference stencils use zero padding outside the grid (Dirichlet). Grid
//! states carry measure weight `h`: `‖ψ‖² ≈ h Σ |ψ_j|²` and grid expectations
//! are `h · g(u, M u)`.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, KahlerError, Result};
use crate::kahler::KahlerState;
use crate::linalg::{hermitian_eigen, HermitianEigen, RMatrix};
use crate::operator::{expectation, gamma_lift, ComplexOperator, KahlerOperator};
use crate::dynamics::{hsym_value, HamiltonianSplit};

pub const MIN_GRID_POINTS: usize = 16;
/// Points at each edge where commutator test states must have decayed.
pub const BOUNDARY_BAND: usize = 5;
pub const BOUNDARY_DECAY: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub hbar: f64,
    pub mass: f64,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_points: usize, hbar: f64, mass: f64) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(KahlerError::InvalidArgument(format!("need x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if n_points < MIN_GRID_POINTS {
            return Err(KahlerError::InvalidArgument(format!(
                "grid needs at least {MIN_GRID_POINTS} points, got {n_points}"
            )));
        }
        if !(hbar > 0.0) || !(mass > 0.0) {
            return Err(KahlerError::InvalidArgument("hbar and mass must be positive".into()));
        }
        Ok(Self { x_min, x_max, n_points, hbar, mass })
    }

    /// Dimensionless grid (ħ = m = 1).
    pub fn unit(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        Self::new(x_min, x_max, n_points, 1.0, 1.0)
    }

    /// Same interval and constants with `n_points` replaced.
    pub fn with_points(&self, n_points: usize) -> Result<Self> {
        Self::new(self.x_min, self.x_max, n_points, self.hbar, self.mass)
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + (j as f64 + 0.5) * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Stencil {
    #[default]
    Central2,
    Central4,
}

impl Stencil {
    /// Formal order of accuracy.
    pub fn order(self) -> u32 {
        match self {
            Stencil::Central2 => 2,
            Stencil::Central4 => 4,
        }
    }
}

/// Antisymmetric first-derivative matrix with zero padding.
pub fn derivative_matrix(grid: &Grid1D, stencil: Stencil) -> RMatrix {
    let n = grid.n_points;
    let h = grid.spacing();
    let weights: &[(usize, f64)] = match stencil {
        Stencil::Central2 => &[(1, 0.5)],
        Stencil::Central4 => &[(1, 8.0 / 12.0), (2, -1.0 / 12.0)],
    };
    let mut d = RMatrix::zeros(n, n);
    for j in 0..n {
        for &(off, w) in weights {
            if j + off < n {
                d[(j, j + off)] = w / h;
            }
            if j >= off {
                d[(j, j - off)] = -w / h;
            }
        }
    }
    d
}

/// Three-point Laplacian with zero padding.
pub fn laplacian(grid: &Grid1D) -> RMatrix {
    let n = grid.n_points;
    let h2 = grid.spacing().powi(2);
    RMatrix::from_fn(n, n, |i, j| {
        if i == j {
            -2.0 / h2
        } else if i.abs_diff(j) == 1 {
            1.0 / h2
        } else {
            0.0
        }
    })
}

/// ℚ = Γ(diag(x_j)).
pub fn position_op(grid: &Grid1D) -> KahlerOperator {
    gamma_lift(&ComplexOperator::diagonal(&grid.points()))
}

/// ℙ = Γ(−iħD) = −ħ J D.
pub fn momentum_op(grid: &Grid1D, stencil: Stencil) -> KahlerOperator {
    let n = grid.n_points;
    let y = derivative_matrix(grid, stencil) * (-grid.hbar);
    gamma_lift(&ComplexOperator::new(RMatrix::zeros(n, n), y).expect("square blocks"))
}

/// Momentum with ħ = 1, the generator of translations.
pub fn translation_generator(grid: &Grid1D, stencil: Stencil) -> KahlerOperator {
    momentum_op(&Grid1D { hbar: 1.0, ..*grid }, stencil)
}

/// One-parameter translation group `a ↦ Γ(exp(−i a P))`, `P = −iD`.
#[derive(Debug, Clone)]
pub struct Translator {
    eig: HermitianEigen,
}

impl Translator {
    pub fn new(grid: &Grid1D, stencil: Stencil) -> Self {
        let d = derivative_matrix(grid, stencil);
        let p = d.map(|v| Complex64::new(0.0, -v));
        Self { eig: hermitian_eigen(&p) }
    }

    /// Shifts profiles by `+a`: ψ(x) ↦ ψ(x − a) up to stencil error.
    pub fn shift(&self, a: f64) -> KahlerOperator {
        let u = self.eig.map_spectrum(|l| Complex64::new(0.0, -a * l).exp());
        gamma_lift(&ComplexOperator::from_complex(&u))
    }
}

pub fn translate(grid: &Grid1D, stencil: Stencil, a: f64) -> KahlerOperator {
    Translator::new(grid, stencil).shift(a)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    /// ½ m ω² x².
    Harmonic {
        #[serde(default = "one")]
        omega: f64,
    },
    Free,
    /// Values at the grid points.
    Table { values: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

impl Potential {
    pub fn sample(&self, grid: &Grid1D) -> Result<Vec<f64>> {
        match self {
            Potential::Harmonic { omega } => {
                let k = 0.5 * grid.mass * omega * omega;
                Ok(grid.points().iter().map(|x| k * x * x).collect())
            }
            Potential::Free => Ok(vec![0.0; grid.n_points]),
            Potential::Table { values } => {
                check_dim(grid.n_points, values.len())?;
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(KahlerError::InvalidArgument("potential table must be finite".into()));
                }
                Ok(values.clone())
            }
        }
    }
}

/// H = −(ħ²/2m) Δ_h + diag(V), real symmetric.
pub fn schrodinger_hamiltonian(grid: &Grid1D, potential: &[f64]) -> Result<ComplexOperator> {
    check_dim(grid.n_points, potential.len())?;
    let n = grid.n_points;
    let mut k = laplacian(grid) * (-grid.hbar * grid.hbar / (2.0 * grid.mass));
    for (j, v) in potential.iter().enumerate() {
        k[(j, j)] += v;
    }
    ComplexOperator::new(k, RMatrix::zeros(n, n))
}

/// H/ħ, the operator whose flow `exp(−iHt/ħ)` the dynamics module integrates.
pub fn time_generator(grid: &Grid1D, h: &ComplexOperator) -> ComplexOperator {
    h.scale(Complex64::new(1.0 / grid.hbar, 0.0))
}

/// Samples of ψ(x) on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridKahlerState {
    pub grid: Grid1D,
    pub state: KahlerState,
}

impl GridKahlerState {
    pub fn new(grid: Grid1D, state: KahlerState) -> Result<Self> {
        check_dim(grid.n_points, state.dim())?;
        Ok(Self { grid, state })
    }

    pub fn sample(grid: &Grid1D, profile: impl Fn(f64) -> Complex64) -> Self {
        let psi: Vec<Complex64> = grid.points().into_iter().map(profile).collect();
        let state = KahlerState::new(psi.iter().map(|z| z.re).collect(), psi.iter().map(|z| z.im).collect())
            .expect("grid has points");
        Self { grid: *grid, state }
    }

    /// `exp(−(x−x0)²/(4σ²) + i k x)`, normalized with weight h.
    pub fn gaussian(grid: &Grid1D, x0: f64, sigma: f64, k: f64) -> Self {
        Self::sample(grid, |x| gaussian_profile(x, x0, sigma, k)).normalized()
    }

    pub fn norm_sq(&self) -> f64 {
        self.grid.spacing() * self.state.norm_sq()
    }

    pub fn normalized(&self) -> Self {
        let s = self.norm_sq().sqrt();
        if s == 0.0 {
            return self.clone();
        }
        Self { grid: self.grid, state: self.state.scaled(1.0 / s) }
    }

    /// `h · g(u, M u)`.
    pub fn expectation(&self, op: &KahlerOperator) -> Result<f64> {
        Ok(self.grid.spacing() * expectation(op, &self.state)?.g_part)
    }

    /// `h · H_sym(u)`, the grid approximation of ½ Re ∫ ψ* H ψ dx.
    pub fn hsym(&self, hs: &HamiltonianSplit) -> Result<f64> {
        Ok(self.grid.spacing() * hsym_value(hs, &self.state)?)
    }

    pub fn apply(&self, op: &KahlerOperator) -> Result<Self> {
        Self::new(self.grid, op.apply(&self.state)?)
    }

    /// Probability-weighted mean position.
    pub fn mean_position(&self) -> f64 {
        let (q, p) = (self.state.q(), self.state.p());
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..self.grid.n_points {
            let w = q[j] * q[j] + p[j] * p[j];
            num += self.grid.x(j) * w;
            den += w;
        }
        num / den
    }

    /// Rows `x,q,p,|psi|^2`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,q,p,|psi|^2")?;
        let (q, p) = (self.state.q(), self.state.p());
        for j in 0..self.grid.n_points {
            writeln!(w, "{},{},{},{}", self.grid.x(j), q[j], p[j], q[j] * q[j] + p[j] * p[j])?;
        }
        Ok(())
    }
}

pub fn gaussian_profile(x: f64, x0: f64, sigma: f64, k: f64) -> Complex64 {
    let env = (-(x - x0).powi(2) / (4.0 * sigma * sigma)).exp();
    Complex64::from_polar(env, k * x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutatorReport {
    pub stencil: Stencil,
    pub n_points: usize,
    /// ‖([ℙ,ℚ] + ħJ)u‖ / ‖u‖ over interior points at `n_points`.
    pub residual: f64,
    /// Same quantity at `2 · n_points`.
    pub residual_refined: f64,
    /// `residual / residual_refined`; absent when the refined residual is zero.
    pub ratio: Option<f64>,
    /// `log2(ratio)`.
    pub observed_order: Option<f64>,
}

fn check_interior_support(state: &KahlerState) -> Result<()> {
    let n = state.dim();
    let band = BOUNDARY_BAND.min(n / 2);
    for j in (0..band).chain(n - band..n) {
        let magnitude = state.q()[j].hypot(state.p()[j]);
        if magnitude > BOUNDARY_DECAY {
            return Err(KahlerError::BoundarySupport { index: j, magnitude });
        }
    }
    Ok(())
}

/// Relative interior residual of `[ℙ,ℚ] = −ħJ` on one sampled state.
pub fn commutator_residual(grid: &Grid1D, state: &KahlerState, stencil: Stencil) -> Result<f64> {
    check_dim(grid.n_points, state.dim())?;
    check_interior_support(state)?;
    let n = grid.n_points;
    let pm = momentum_op(grid, stencil);
    let qm = position_op(grid);
    let pq = pm.apply(&qm.apply(state)?)?;
    let qp = qm.apply(&pm.apply(state)?)?;
    let (u_q, u_p) = (state.q(), state.p());
    let band = BOUNDARY_BAND.min(n / 2);
    let (mut r2, mut u2) = (0.0, 0.0);
    for j in band..n - band {
        // ħJ(q; p) = ħ(−p; q)
        let rq = pq.q()[j] - qp.q()[j] - grid.hbar * u_p[j];
        let rp = pq.p()[j] - qp.p()[j] + grid.hbar * u_q[j];
        r2 += rq * rq + rp * rp;
    }
    for j in 0..n {
        u2 += u_q[j] * u_q[j] + u_p[j] * u_p[j];
    }
    Ok(if u2 == 0.0 { 0.0 } else { (r2 / u2).sqrt() })
}

/// Samples `profile` at `n_points` and `2 · n_points` and compares residuals.
pub fn commutator_check(
    grid: &Grid1D,
    profile: impl Fn(f64) -> Complex64,
    stencil: Stencil,
) -> Result<CommutatorReport> {
    let fine = grid.with_points(2 * grid.n_points)?;
    let coarse_state = GridKahlerState::sample(grid, &profile).state;
    let fine_state = GridKahlerState::sample(&fine, &profile).state;
    let residual = commutator_residual(grid, &coarse_state, stencil)?;
    let residual_refined = commutator_residual(&fine, &fine_state, stencil)?;
    let ratio = (residual_refined > 0.0).then(|| residual / residual_refined);
    Ok(CommutatorReport {
        stencil,
        n_points: grid.n_points,
        residual,
        residual_refined,
        ratio,
        observed_order: ratio.map(f64::log2),
    })
}
