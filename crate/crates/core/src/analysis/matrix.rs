use rayon::prelude::*;

use super::scalar::Scalar;
use crate::dynamics::{ModelKind, ModelSpec};
use crate::error::{Error, Result};

/// Transition matrix of the informed count on states `1..=n-f`.
///
/// Indices in the accessors are 1-based states; storage is 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix<S> {
    n: usize,
    f: usize,
    a: Vec<Vec<S>>,
}

impl<S: Scalar> TransitionMatrix<S> {
    /// Wraps an arbitrary square matrix, e.g. for testing the TP2 machinery.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidArgument("matrix must be square and non-empty".into()));
        }
        Ok(TransitionMatrix { n: dim, f: 0, a: rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn f(&self) -> usize {
        self.f
    }

    /// Number of states, `n − f`.
    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// `A[i][j]`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.a[i - 1][j - 1]
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.a
    }

    pub fn row_sums(&self) -> Vec<S> {
        self.a.iter().map(|r| S::sum(r.iter().cloned())).collect()
    }

    /// Largest `|row sum − 1|`.
    pub fn max_row_error(&self) -> f64 {
        self.row_sums()
            .iter()
            .map(|s| (s.clone() - S::one()).abs().to_f64())
            .fold(0.0, f64::max)
    }

    /// `p A` for a row vector `p` over the states.
    pub fn apply(&self, p: &[S]) -> Vec<S> {
        let d = self.dim();
        assert_eq!(p.len(), d);
        (0..d)
            .into_par_iter()
            .map(|j| S::sum((0..=j).map(|i| p[i].clone() * self.a[i][j].clone())))
            .collect()
    }
}

/// Builds the matrix for URT (`f = 0`) or URT_BYZ with `f` silent Byzantine
/// nodes: from `i` informed honest nodes, each of the `n − f − i` uninformed
/// honest nodes is informed independently with probability `i/n`.
pub fn build_transition_matrix<S: Scalar>(n: usize, f: usize) -> Result<TransitionMatrix<S>> {
    if n == 0 || f >= n {
        return Err(Error::InvalidArgument(format!("need 0 <= f < n, got n={n}, f={f}")));
    }
    let h = n - f;
    let a = (1..=h)
        .into_par_iter()
        .map(|i| {
            (1..=h)
                .map(|j| {
                    if j < i {
                        S::zero()
                    } else {
                        S::binomial_pmf((h - i) as u64, (j - i) as u64, i as u64, n as u64)
                    }
                })
                .collect()
        })
        .collect();
    Ok(TransitionMatrix { n, f, a })
}

/// Matrix for an oblivious tree model.
pub fn transition_matrix_for<S: Scalar>(spec: &ModelSpec) -> Result<TransitionMatrix<S>> {
    spec.validate()?;
    match spec.kind {
        ModelKind::Urt | ModelKind::UrtByz => build_transition_matrix(spec.n, spec.f),
        k => Err(Error::InvalidModel(format!("no count chain for {k}"))),
    }
}

/// Distribution of `N_t` over states `1..=dim` for `t = 0..=t_max`, starting
/// from a single informed node.
pub fn state_distributions<S: Scalar>(a: &TransitionMatrix<S>, t_max: usize) -> Vec<Vec<S>> {
    let mut p = vec![S::zero(); a.dim()];
    p[0] = S::one();
    let mut out = Vec::with_capacity(t_max + 1);
    for _ in 0..t_max {
        let next = a.apply(&p);
        out.push(std::mem::replace(&mut p, next));
    }
    out.push(p);
    out
}

/// `P(N_t = n − f)` for `t = 0..=t_max`.
pub fn broadcast_time_distribution<S: Scalar>(a: &TransitionMatrix<S>, t_max: usize) -> Vec<S> {
    state_distributions(a, t_max)
        .into_iter()
        .map(|p| p.last().cloned().expect("non-empty state space"))
        .collect()
}

/// `E[N_t]` for `t = 0..=t_max`.
pub fn expected_counts<S: Scalar>(a: &TransitionMatrix<S>, t_max: usize) -> Vec<S> {
    state_distributions(a, t_max)
        .into_iter()
        .map(|p| {
            S::sum(
                p.into_iter()
                    .enumerate()
                    .map(|(i, x)| x * S::ratio(i as u64 + 1, 1)),
            )
        })
        .collect()
}
