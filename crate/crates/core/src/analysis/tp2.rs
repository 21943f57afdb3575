use serde::Serialize;

use super::matrix::TransitionMatrix;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// `Q = (1(i ≥ j))`, lower-triangular all ones.
pub fn build_q<S: Scalar>(dim: usize) -> Vec<Vec<S>> {
    (0..dim)
        .map(|i| (0..dim).map(|j| if i >= j { S::one() } else { S::zero() }).collect())
        .collect()
}

/// `Q⁻¹`: identity minus the subdiagonal.
pub fn build_q_inverse<S: Scalar>(dim: usize) -> Vec<Vec<S>> {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    if i == j {
                        S::one()
                    } else if i == j + 1 {
                        S::zero() - S::one()
                    } else {
                        S::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn mat_mul<S: Scalar>(a: &[Vec<S>], b: &[Vec<S>]) -> Vec<Vec<S>> {
    let (r, k, c) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    (0..r)
        .map(|i| {
            (0..c)
                .map(|j| S::sum((0..k).map(|l| a[i][l].clone() * b[l][j].clone())))
                .collect()
        })
        .collect()
}

/// `M = Q⁻¹ A Q` via tail sums: `(AQ)_{ik} = Σ_{j≥k} A_{ij}`, and row `ℓ`
/// of `M` is row `ℓ` minus row `ℓ−1` of `AQ`.
pub fn conjugate<S: Scalar>(a: &TransitionMatrix<S>) -> Vec<Vec<S>> {
    let d = a.dim();
    let aq: Vec<Vec<S>> = a
        .rows()
        .iter()
        .map(|row| {
            let mut tail = vec![S::zero(); d];
            let mut acc = S::zero();
            for k in (0..d).rev() {
                acc = acc + row[k].clone();
                tail[k] = acc.clone();
            }
            tail
        })
        .collect();
    (0..d)
        .map(|l| {
            (0..d)
                .map(|k| {
                    if l == 0 {
                        aq[0][k].clone()
                    } else {
                        aq[l][k].clone() - aq[l - 1][k].clone()
                    }
                })
                .collect()
        })
        .collect()
}

/// Result of scanning every 2×2 minor of `Q⁻¹AQ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tp2Report {
    pub dim: usize,
    pub min_minor: f64,
    /// `(i, i', j, j')`, 1-based, of the smallest minor.
    pub location: (usize, usize, usize, usize),
    /// Largest gap between the principal minors `d(ℓ,k)` and their closed
    /// forms `A_{ℓ−1,ℓ−1}·A_{k−1,k−1}` (`A_{k−1,k−1}` when `ℓ = 1`).
    pub identity_max_error: f64,
    pub identities_checked: usize,
}

impl Tp2Report {
    pub fn is_tp2(&self, tol: f64) -> bool {
        self.min_minor >= -tol
    }
}

pub fn tp2_check<S: Scalar>(a: &TransitionMatrix<S>) -> Tp2Report {
    let m = conjugate(a);
    let d = a.dim();
    let mut min: Option<(S, (usize, usize, usize, usize))> = None;
    for i in 0..d {
        for i2 in i + 1..d {
            for j in 0..d {
                for j2 in j + 1..d {
                    let minor = m[i][j].clone() * m[i2][j2].clone()
                        - m[i][j2].clone() * m[i2][j].clone();
                    if min.as_ref().is_none_or(|(v, _)| minor < *v) {
                        min = Some((minor, (i + 1, i2 + 1, j + 1, j2 + 1)));
                    }
                }
            }
        }
    }
    let (min_minor, location) = match min {
        Some((v, loc)) => (v.to_f64(), loc),
        None => (0.0, (1, 1, 1, 1)),
    };

    let mut identity_max_error = 0.0f64;
    let mut identities_checked = 0;
    for l in 1..=d {
        for k in l + 1..=d {
            let direct = m[l - 1][l - 1].clone() * m[k - 1][k - 1].clone()
                - m[l - 1][k - 1].clone() * m[k - 1][l - 1].clone();
            let closed = if l == 1 {
                a.get(k - 1, k - 1).clone()
            } else {
                a.get(l - 1, l - 1).clone() * a.get(k - 1, k - 1).clone()
            };
            identity_max_error = identity_max_error.max((direct - closed).abs().to_f64());
            identities_checked += 1;
        }
    }
    Tp2Report {
        dim: d,
        min_minor,
        location,
        identity_max_error,
        identities_checked,
    }
}

/// Non-decreasing then non-increasing, treating steps within `tol` as flat.
pub fn is_unimodal(p: &[f64], tol: f64) -> bool {
    let mut descending = false;
    for w in p.windows(2) {
        let diff = w[1] - w[0];
        if diff < -tol {
            descending = true;
        } else if diff > tol && descending {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnimodalityVerdict {
    pub input_unimodal: bool,
    pub output_unimodal: bool,
    /// `p A`.
    pub output: Vec<f64>,
}

const UNIMODAL_TOL: f64 = 1e-14;

/// Checks `p` and `pA` for unimodality.
pub fn unimodality_preserved(a: &TransitionMatrix<f64>, p: &[f64]) -> Result<UnimodalityVerdict> {
    if p.len() != a.dim() {
        return Err(Error::InvalidArgument(format!(
            "distribution has {} entries, matrix has {} states",
            p.len(),
            a.dim()
        )));
    }
    let total = f64::sum(p.iter().copied());
    if p.iter().any(|&x| x < 0.0 || !x.is_finite()) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("not a probability vector (sum {total})")));
    }
    let output = a.apply(p);
    Ok(UnimodalityVerdict {
        input_unimodal: is_unimodal(p, UNIMODAL_TOL),
        output_unimodal: is_unimodal(&output, UNIMODAL_TOL),
        output,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::matrix::build_transition_matrix;
    use num_rational::BigRational;

    #[test]
    fn conjugate_matches_explicit_product() {
        let a = build_transition_matrix::<BigRational>(6, 0).unwrap();
        let d = a.dim();
        let explicit = mat_mul(&mat_mul(&build_q_inverse(d), a.rows()), &build_q(d));
        assert_eq!(conjugate(&a), explicit);
        let id = mat_mul(&build_q_inverse::<BigRational>(d), &build_q(d));
        for (i, row) in id.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                assert_eq!(*x, BigRational::ratio((i == j) as u64, 1));
            }
        }
    }

    #[test]
    fn n2_direct() {
        // A = [[1/2, 1/2], [0, 1]]; AQ = [[1, 1/2], [1, 1]]; M = [[1, 1/2], [0, 1/2]].
        let a = build_transition_matrix::<BigRational>(2, 0).unwrap();
        let r = tp2_check(&a);
        assert_eq!(r.min_minor, 0.5);
        assert_eq!(r.identity_max_error, 0.0);
    }

    #[test]
    fn identity_matrix_has_zero_minimum() {
        let rows = (0..4)
            .map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let a = TransitionMatrix::from_rows(rows).unwrap();
        let r = tp2_check(&a);
        assert_eq!(r.min_minor, 0.0);
    }

    #[test]
    fn exact_small_chains_are_tp2() {
        for n in 2..=8 {
            let r = tp2_check(&build_transition_matrix::<BigRational>(n, 0).unwrap());
            assert!(r.min_minor >= 0.0, "n={n}: {r:?}");
            assert_eq!(r.identity_max_error, 0.0);
        }
    }

    #[test]
    fn unimodality_cases() {
        let a = build_transition_matrix::<f64>(10, 0).unwrap();
        let mut point = vec![0.0; 10];
        point[0] = 1.0;
        let v = unimodality_preserved(&a, &point).unwrap();
        assert!(v.input_unimodal && v.output_unimodal);

        let mut bimodal = vec![0.0; 10];
        bimodal[1] = 0.5;
        bimodal[8] = 0.5;
        let v = unimodality_preserved(&a, &bimodal).unwrap();
        assert!(!v.input_unimodal);
        assert_eq!(v.output.len(), 10);

        assert!(unimodality_preserved(&a, &[0.1; 10][..9]).is_err());
        assert!(unimodality_preserved(&a, &[0.2; 10]).is_err());
    }

    #[test]
    fn unimodal_classifier() {
        assert!(is_unimodal(&[0.1, 0.2, 0.2, 0.5, 0.0], 0.0));
        assert!(is_unimodal(&[], 0.0));
        assert!(!is_unimodal(&[0.3, 0.1, 0.6], 0.0));
    }
}
