//! Observables on phase space, evaluated in normal-mode coordinates (q̃; p̃).

use serde::{Deserialize, Serialize};

use crate::kahler::KahlerState;

pub trait Observable: Sync {
    /// Value at a phase-space point given in normal-mode coordinates.
    fn eval(&self, modes: &KahlerState) -> f64;
}

impl<F> Observable for F
where
    F: Fn(&KahlerState) -> f64 + Sync,
{
    fn eval(&self, modes: &KahlerState) -> f64 {
        self(modes)
    }
}

/// `coeff · Π_a q̃_a^{q[a]} p̃_a^{p[a]}`. Exponent lists may be shorter than
/// the number of modes; missing entries are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub coeff: f64,
    #[serde(default)]
    pub q: Vec<u32>,
    #[serde(default)]
    pub p: Vec<u32>,
}

impl Monomial {
    fn eval(&self, modes: &KahlerState) -> f64 {
        let (qs, ps) = (modes.q(), modes.p());
        let mut v = self.coeff;
        for (a, &e) in self.q.iter().enumerate() {
            if e > 0 {
                v *= qs[a].powi(e as i32);
            }
        }
        for (a, &e) in self.p.iter().enumerate() {
            if e > 0 {
                v *= ps[a].powi(e as i32);
            }
        }
        v
    }
}

/// Polynomial observable in normal-mode coordinates, `{"terms": [...]}` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Polynomial {
    pub terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn monomial(coeff: f64, q: Vec<u32>, p: Vec<u32>) -> Self {
        Self { terms: vec![Monomial { coeff, q, p }] }
    }

    /// q̃_mode (zero-based mode index).
    pub fn q_linear(mode: usize) -> Self {
        let mut q = vec![0; mode + 1];
        q[mode] = 1;
        Self::monomial(1.0, q, vec![])
    }

    /// Π_{a ∈ modes} q̃_a².
    pub fn q_squared_product(modes: &[usize]) -> Self {
        let len = modes.iter().max().map_or(0, |m| m + 1);
        let mut q = vec![0; len];
        for &m in modes {
            q[m] += 2;
        }
        Self::monomial(1.0, q, vec![])
    }

    /// ½ Σ λ_a (q̃_a² + p̃_a²), the diagonal form of H_sym.
    pub fn diagonal_hsym(lambdas: &[f64]) -> Self {
        let n = lambdas.len();
        let mut terms = Vec::with_capacity(2 * n);
        for (a, &l) in lambdas.iter().enumerate() {
            let mut e = vec![0; n];
            e[a] = 2;
            terms.push(Monomial { coeff: 0.5 * l, q: e.clone(), p: vec![] });
            terms.push(Monomial { coeff: 0.5 * l, q: vec![], p: e });
        }
        Self { terms }
    }

    /// Highest mode index referenced plus one.
    pub fn modes_used(&self) -> usize {
        self.terms.iter().map(|t| t.q.len().max(t.p.len())).max().unwrap_or(0)
    }

    /// Closed-form average over the torus of fixed actions with uniform angle
    /// measure, using q̃ = √F cos θ, p̃ = −√F sin θ and
    /// ⟨cos^a θ sin^b θ⟩ = (a−1)!!(b−1)!!/(a+b)!! for a, b even (zero otherwise).
    pub fn torus_average_exact(&self, actions: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let mut v = t.coeff;
                for (a, &f) in actions.iter().enumerate() {
                    let eq = t.q.get(a).copied().unwrap_or(0);
                    let ep = t.p.get(a).copied().unwrap_or(0);
                    if eq % 2 == 1 || ep % 2 == 1 {
                        return 0.0;
                    }
                    if eq + ep > 0 {
                        v *= f.powf(f64::from(eq + ep) / 2.0) * circle_moment(eq, ep);
                    }
                }
                v
            })
            .sum()
    }
}

fn double_factorial(k: i64) -> f64 {
    let mut acc = 1.0;
    let mut i = k;
    while i > 1 {
        acc *= i as f64;
        i -= 2;
    }
    acc
}

fn circle_moment(a: u32, b: u32) -> f64 {
    let (a, b) = (i64::from(a), i64::from(b));
    double_factorial(a - 1) * double_factorial(b - 1) / double_factorial(a + b)
}

impl Observable for Polynomial {
    fn eval(&self, modes: &KahlerState) -> f64 {
        self.terms.iter().map(|t| t.eval(modes)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_monomials() {
        let s = KahlerState::new(vec![2.0, 3.0], vec![-1.0, 0.5]).unwrap();
        assert_eq!(Polynomial::q_squared_product(&[0, 1]).eval(&s), 36.0);
        assert_eq!(Polynomial::q_linear(1).eval(&s), 3.0);
        let h = Polynomial::diagonal_hsym(&[1.0, 2.0]);
        assert_eq!(h.eval(&s), 0.5 * (4.0 + 1.0) + 1.0 * (9.0 + 0.25));
    }

    #[test]
    fn exact_torus_moments() {
        assert_eq!(circle_moment(2, 0), 0.5);
        assert_eq!(circle_moment(4, 0), 0.375);
        assert_eq!(circle_moment(2, 2), 0.125);
        let f = Polynomial::q_squared_product(&[0, 1]);
        assert_eq!(f.torus_average_exact(&[1.0, 1.0]), 0.25);
        assert_eq!(Polynomial::q_linear(0).torus_average_exact(&[1.0]), 0.0);
        let h = Polynomial::diagonal_hsym(&[1.0, 3.0]);
        assert_eq!(h.torus_average_exact(&[0.5, 2.0]), 0.5 * 0.5 + 0.5 * 3.0 * 2.0);
    }

    #[test]
    fn json_shape() {
        let p: Polynomial = serde_json::from_str(r#"{"terms":[{"coeff":1.0,"q":[2,2]}]}"#).unwrap();
        assert_eq!(p, Polynomial::q_squared_product(&[0, 1]));
        assert!(serde_json::from_str::<Polynomial>(r#"{"terms":[{"coef":1.0}]}"#).is_err());
    }
}
