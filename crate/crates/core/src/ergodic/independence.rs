//! Bounded exhaustive search for integer relations among frequencies.

use serde::{Deserialize, Serialize};

use crate::error::{KahlerError, Result};

/// Default cap on search-space and quadrature sizes.
pub const DEFAULT_BUDGET: u128 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceVerdict {
    pub independent: bool,
    /// Witness `k ≠ 0` with `|k·λ| < tol`, smallest max-norm first, first
    /// nonzero entry positive.
    pub relation: Option<Vec<i64>>,
    /// `|k·λ|` for the witness.
    pub residual: Option<f64>,
    pub bound: u32,
    pub tol: f64,
}

/// Size of the box `[−bound, bound]^n`, or `None` on overflow.
pub fn search_space_size(n: usize, bound: u32) -> Option<u128> {
    let side = 2 * u128::from(bound) + 1;
    (0..n).try_fold(1u128, |acc, _| acc.checked_mul(side))
}

/// Scans every nonzero `k` with `|k_a| ≤ bound` and reports a relation if
/// some `|k·λ| < tol`. Among hits the witness minimizes `max|k_a|`, then
/// `|k·λ|`; `k` and `−k` are identified.
pub fn check_rational_independence(
    lambdas: &[f64],
    bound: u32,
    tol: f64,
    budget: u128,
) -> Result<IndependenceVerdict> {
    if lambdas.is_empty() {
        return Err(KahlerError::InvalidArgument("need at least one frequency".into()));
    }
    if bound == 0 {
        return Err(KahlerError::InvalidArgument("bound must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(KahlerError::InvalidArgument("tol must be positive".into()));
    }
    let size = search_space_size(lambdas.len(), bound).unwrap_or(u128::MAX);
    if size > budget {
        return Err(KahlerError::SearchSpaceTooLarge { size, budget });
    }

    let n = lambdas.len();
    let b = i64::from(bound);
    let mut k = vec![-b; n];
    let mut best: Option<(i64, f64, Vec<i64>)> = None;
    loop {
        let first_nonzero = k.iter().find(|&&x| x != 0);
        if matches!(first_nonzero, Some(&x) if x > 0) {
            let dot: f64 = k.iter().zip(lambdas).map(|(&ki, &l)| ki as f64 * l).sum();
            let r = dot.abs();
            if r < tol {
                let height = k.iter().map(|x| x.abs()).max().unwrap_or(0);
                let better = match &best {
                    None => true,
                    Some((h, res, _)) => (height, r) < (*h, *res),
                };
                if better {
                    best = Some((height, r, k.clone()));
                }
            }
        }
        // Odometer increment over [−b, b]^n.
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(match best {
                    Some((_, r, rel)) => IndependenceVerdict {
                        independent: false,
                        relation: Some(rel),
                        residual: Some(r),
                        bound,
                        tol,
                    },
                    None => IndependenceVerdict { independent: true, relation: None, residual: None, bound, tol },
                });
            }
            i -= 1;
            if k[i] < b {
                k[i] += 1;
                break;
            }
            k[i] = -b;
        }
    }
}
