//! Confidence intervals, chi-square tests and paired comparisons.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

/// One-sided normal quantile for significance `1e-3`.
pub const Z_ONE_SIDED_1E3: f64 = 3.090_232_306_167_813;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Wilson score interval for `successes / trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Interval {
    if trials == 0 {
        return Interval { lo: 0.0, hi: 1.0 };
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Interval {
        lo: (centre - half).max(0.0),
        hi: (centre + half).min(1.0),
    }
}

/// Standard error of a frequency estimated from `trials` draws with success
/// probability `p`.
pub fn binomial_se(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl ChiSquare {
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value >= alpha
    }
}

fn chi_square_sf(statistic: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .sf(statistic)
}

/// Goodness of fit of `observed` counts against cell probabilities `probs`.
/// Cells with zero expected mass must be empty; they add no degrees of freedom.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> ChiSquare {
    assert_eq!(observed.len(), probs.len());
    let total: u64 = observed.iter().sum();
    let mut statistic = 0.0;
    let mut cells = 0usize;
    for (&o, &p) in observed.iter().zip(probs) {
        let e = p * total as f64;
        if e == 0.0 {
            if o > 0 {
                statistic = f64::INFINITY;
            }
            continue;
        }
        cells += 1;
        statistic += (o as f64 - e).powi(2) / e;
    }
    let dof = cells.saturating_sub(1);
    ChiSquare {
        statistic,
        dof,
        p_value: if statistic.is_infinite() {
            0.0
        } else {
            chi_square_sf(statistic, dof)
        },
    }
}

/// Two-sample homogeneity test on histograms over the same bins. Adjacent
/// bins are pooled until every pooled cell has expected count ≥ 5 in both rows.
pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> ChiSquare {
    assert_eq!(a.len(), b.len());
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let total = (na + nb) as f64;
    let min_share = na.min(nb) as f64 / total;
    let mut pooled: Vec<(u64, u64)> = Vec::new();
    let mut acc = (0u64, 0u64);
    for (&x, &y) in a.iter().zip(b) {
        acc.0 += x;
        acc.1 += y;
        if (acc.0 + acc.1) as f64 * min_share >= 5.0 {
            pooled.push(acc);
            acc = (0, 0);
        }
    }
    if acc.0 + acc.1 > 0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => pooled.push(acc),
        }
    }
    let mut statistic = 0.0;
    for &(x, y) in &pooled {
        let col = (x + y) as f64;
        let ea = col * na as f64 / total;
        let eb = col * nb as f64 / total;
        statistic += (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb;
    }
    let dof = pooled.len().saturating_sub(1);
    ChiSquare {
        statistic,
        dof,
        p_value: chi_square_sf(statistic, dof),
    }
}

/// Paired comparison of two indicator sequences (`1` = event occurred).
/// Returns the mean difference `a - b` and its z-score; `z` is `0` when the
/// samples never disagree.
pub fn paired_difference(a: &[bool], b: &[bool]) -> (f64, f64) {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let (mut plus, mut minus) = (0u64, 0u64);
    for (&x, &y) in a.iter().zip(b) {
        match (x, y) {
            (true, false) => plus += 1,
            (false, true) => minus += 1,
            _ => {}
        }
    }
    let mean = (plus as f64 - minus as f64) / n;
    let second = (plus + minus) as f64 / n;
    let var = (second - mean * mean) * n / (n - 1.0).max(1.0);
    if var <= 0.0 {
        return (mean, 0.0);
    }
    (mean, mean / (var / n).sqrt())
}

/// Empirical quantile (nearest-rank) of a sorted slice.
pub fn quantile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Some(sorted[rank - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_estimate() {
        let i = wilson_interval(30, 100, Z99);
        assert!(i.contains(0.3));
        assert!(i.lo > 0.18 && i.hi < 0.44);
        let zero = wilson_interval(0, 10_000, Z99);
        assert_eq!(zero.lo, 0.0);
        assert!(zero.hi < 7e-4);
    }

    #[test]
    fn gof_perfect_fit() {
        let r = chi_square_gof(&[25, 25, 25, 25], &[0.25; 4]);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.dof, 3);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        let bad = chi_square_gof(&[1, 0], &[0.0, 1.0]);
        assert_eq!(bad.p_value, 0.0);
    }

    #[test]
    fn gof_matches_table_value() {
        // 3 dof critical value at 0.05 is 7.8147.
        assert!((chi_square_sf(7.8147, 3) - 0.05).abs() < 1e-4);
    }

    #[test]
    fn homogeneity_pools_sparse_bins() {
        let r = chi_square_homogeneity(&[100, 200, 1, 0], &[110, 190, 0, 1]);
        assert!(r.dof <= 2);
        assert!(r.p_value > 0.1);
    }

    #[test]
    fn paired_difference_signs() {
        let a = [true, true, true, false];
        let b = [false, true, true, false];
        let (mean, z) = paired_difference(&a, &b);
        assert!((mean - 0.25).abs() < 1e-12);
        assert!(z > 0.0);
        assert_eq!(paired_difference(&a, &a), (0.0, 0.0));
    }

    #[test]
    fn quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), Some(2.0));
        assert_eq!(quantile(&v, 1.0), Some(4.0));
        assert_eq!(quantile(&[], 0.5), None);
    }
}
