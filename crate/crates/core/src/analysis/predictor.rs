use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::scalar::Scalar;

/// Value of the deterministic lower predictor after `t` doublings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictorState {
    pub n: usize,
    pub t: u32,
    pub value: f64,
}

/// `n − n((n−1)/n)^{2^t}`.
pub fn predictor_value(n: usize, t: u32) -> f64 {
    assert!(n >= 2, "n must be at least 2");
    let n = n as f64;
    n - n * (2f64.powi(t as i32) * (-1.0 / n).ln_1p()).exp()
}

/// One step of `X ↦ X + (n − X)·X/n`.
pub fn predictor_step(n: usize, x: f64) -> f64 {
    let n = n as f64;
    x + (n - x) * x / n
}

/// `X_0..=X_{t_max}` by recursion, checked against the closed form.
pub fn predictor_states(n: usize, t_max: u32) -> Vec<PredictorState> {
    let mut x = 1.0;
    (0..=t_max)
        .map(|t| {
            if t > 0 {
                x = predictor_step(n, x);
            }
            let closed = predictor_value(n, t);
            assert!(
                (closed - x).abs() <= 1e-9 * n as f64,
                "closed form {closed} disagrees with recursion {x} at n={n}, t={t}"
            );
            PredictorState { n, t, value: x }
        })
        .collect()
}

/// Closed form in exact arithmetic.
pub fn predictor_exact(n: usize, t: u32) -> BigRational {
    let base = BigRational::ratio(n as u64 - 1, n as u64);
    let n = BigRational::ratio(n as u64, 1);
    n.clone() - n * num_traits::pow(base, 1usize << t)
}

/// Recursion in exact arithmetic, `X_0..=X_{t_max}`.
pub fn predictor_exact_recursion(n: usize, t_max: u32) -> Vec<BigRational> {
    let nr = BigRational::ratio(n as u64, 1);
    let mut x = <BigRational as One>::one();
    let mut out = vec![x.clone()];
    for _ in 0..t_max {
        x = x.clone() + (nr.clone() - x.clone()) * x / nr.clone();
        out.push(x.clone());
    }
    out
}

/// Whether `E[N_t] ≤ X_t` at every `t` of `expected` (which starts at `t = 0`).
pub fn predictor_dominates(n: usize, expected: &[BigRational]) -> bool {
    let xs = predictor_exact_recursion(n, expected.len().saturating_sub(1) as u32);
    expected.iter().zip(&xs).all(|(e, x)| e <= x)
}
