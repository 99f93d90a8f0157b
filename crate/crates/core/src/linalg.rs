//! Dense linear-algebra helpers shared by the Kähler side and the complex oracle.
//!
//! Storage is `nalgebra` column-major dense matrices. The complex structure
//! `J = [[0, -I], [I, 0]]` is never materialized in hot paths; the `j_mul_*`
//! kernels apply it to a block matrix by permuting and negating halves.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type RMatrix = DMatrix<f64>;
pub type RVector = DVector<f64>;
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn max_abs(m: &RMatrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_c(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `J · m` for a 2N×2N (or 2N×k) matrix: top rows become `-bottom`, bottom rows become `top`.
pub fn j_mul_left(m: &RMatrix) -> RMatrix {
    let n = m.nrows() / 2;
    let mut out = RMatrix::zeros(m.nrows(), m.ncols());
    for c in 0..m.ncols() {
        for r in 0..n {
            out[(r, c)] = -m[(n + r, c)];
            out[(n + r, c)] = m[(r, c)];
        }
    }
    out
}

/// `m · J`: left half of the columns becomes the right half, right half becomes `-left`.
pub fn j_mul_right(m: &RMatrix) -> RMatrix {
    let n = m.ncols() / 2;
    let mut out = RMatrix::zeros(m.nrows(), m.ncols());
    for c in 0..n {
        for r in 0..m.nrows() {
            out[(r, c)] = m[(r, n + c)];
            out[(r, n + c)] = -m[(r, c)];
        }
    }
    out
}

/// Dense `J` for an `n`-mode space. Only used where a matrix must be handed out.
pub fn j_matrix(n: usize) -> RMatrix {
    let mut j = RMatrix::zeros(2 * n, 2 * n);
    for a in 0..n {
        j[(a, n + a)] = -1.0;
        j[(n + a, a)] = 1.0;
    }
    j
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// Kronecker product of vectors, first factor outer (row-major index `i * len(b) + j`).
pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let nb = b.len();
    CVector::from_fn(a.len() * nb, |i, _| a[i / nb] * b[i % nb])
}

pub fn to_complex(x: &RMatrix, y: &RMatrix) -> CMatrix {
    CMatrix::from_fn(x.nrows(), x.ncols(), |r, c| Complex64::new(x[(r, c)], y[(r, c)]))
}

/// Ascending eigen-decomposition of a Hermitian matrix, `h = V diag(values) V†`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// `V diag(f(λ)) V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (c, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            for r in 0..n {
                scaled[(r, c)] *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// Smallest gap between consecutive eigenvalues.
    pub fn min_gap(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Diagonal inputs keep the standard basis as eigenvectors, so degenerate
/// diagonal spectra get a deterministic frame. Real-symmetric inputs take the
/// real solver.
pub fn hermitian_eigen(h: &CMatrix) -> HermitianEigen {
    let n = h.nrows();
    let off_diagonal_zero = (0..n).all(|c| (0..n).all(|r| r == c || h[(r, c)] == Complex64::new(0.0, 0.0)));
    let (values, vectors) = if off_diagonal_zero {
        ((0..n).map(|i| h[(i, i)].re).collect::<Vec<_>>(), CMatrix::identity(n, n))
    } else if h.iter().all(|z| z.im == 0.0) {
        let eig = h.map(|z| z.re).symmetric_eigen();
        (
            eig.eigenvalues.iter().copied().collect(),
            eig.eigenvectors.map(|x| Complex64::new(x, 0.0)),
        )
    } else {
        let eig = h.clone().symmetric_eigen();
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    HermitianEigen {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: CMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]),
    }
}

/// Ascending eigen-decomposition of a real symmetric matrix.
pub fn symmetric_eigen(a: &RMatrix) -> (Vec<f64>, RMatrix) {
    let n = a.nrows();
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = RMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Pairwise summation in a fixed reduction tree, independent of thread count.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        xs.iter().sum()
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}
