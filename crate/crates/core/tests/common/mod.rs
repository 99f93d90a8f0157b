//! Reference implementations used as test oracles. They work directly in ℂⁿ
//! with plain loops and share no code paths with the library's real-block
//! arithmetic or eigendecompositions.
#![allow(dead_code)]

use kahlerq::linalg::{CMatrix, CVector, RMatrix};
use kahlerq::KahlerState;
use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// ψ = q + ip from a stacked state.
pub fn to_psi(u: &KahlerState) -> Vec<Complex64> {
    u.q().iter().zip(u.p()).map(|(&q, &p)| c(q, p)).collect()
}

pub fn from_psi(psi: &[Complex64]) -> KahlerState {
    KahlerState::new(psi.iter().map(|z| z.re).collect(), psi.iter().map(|z| z.im).collect()).unwrap()
}

/// ⟨a, b⟩ = Σ conj(a_i) b_i.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn matvec(m: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (n, k, m) = (a.nrows(), a.ncols(), b.ncols());
    CMatrix::from_fn(n, m, |i, j| (0..k).map(|l| a[(i, l)] * b[(l, j)]).sum())
}

fn one_norm(a: &CMatrix) -> f64 {
    (0..a.ncols()).map(|j| (0..a.nrows()).map(|i| a[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// exp(A) by scaling and squaring with a truncated Taylor series.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm = one_norm(a);
    let squarings = if norm > 0.25 { (norm / 0.25).log2().ceil() as u32 } else { 0 };
    let scaled = a.map(|z| z / 2f64.powi(squarings as i32));
    let mut term = CMatrix::identity(n, n);
    let mut sum = CMatrix::identity(n, n);
    for k in 1..=24 {
        term = matmul(&term, &scaled).map(|z| z / k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = matmul(&sum, &sum);
    }
    sum
}

/// Real block form [[Re, −Im], [Im, Re]] built entry by entry.
pub fn lift(m: &CMatrix) -> RMatrix {
    let n = m.nrows();
    RMatrix::from_fn(2 * n, 2 * n, |r, col| {
        let (i, j) = (r % n, col % n);
        match (r < n, col < n) {
            (true, true) | (false, false) => m[(i, j)].re,
            (true, false) => -m[(i, j)].im,
            (false, true) => m[(i, j)].im,
        }
    })
}

/// Kronecker product, first factor outer.
pub fn kron(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

pub fn kron_mat(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (m, n) = (a.nrows(), b.nrows());
    CMatrix::from_fn(m * n, m * n, |r, col| a[(r / n, col / n)] * b[(r % n, col % n)])
}

/// Born probability |⟨v, ψ⟩|² for unit v.
pub fn born(v: &[Complex64], psi: &[Complex64]) -> f64 {
    inner(v, psi).norm_sqr()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn state_diff(a: &KahlerState, b: &KahlerState) -> f64 {
    max_abs_diff(a.as_vector().as_slice(), b.as_vector().as_slice())
}

pub fn cvec(v: &[Complex64]) -> CVector {
    CVector::from_column_slice(v)
}

/// Central difference (f(x+h) − f(x−h))/2h of samples with zero padding.
pub fn central_difference(f: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = f.len();
    (0..n)
        .map(|j| {
            let right = if j + 1 < n { f[j + 1] } else { c(0.0, 0.0) };
            let left = if j > 0 { f[j - 1] } else { c(0.0, 0.0) };
            (right - left) / (2.0 * h)
        })
        .collect()
}
