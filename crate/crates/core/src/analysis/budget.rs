use serde::Serialize;

use crate::dynamics::{phase_bound, scheme3_phases, ModelKind, ModelSpec};
use crate::error::{Error, Result};

/// A round budget and the failure probability it is claimed to hold with.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundBudget {
    pub rounds: usize,
    /// Claimed upper bound on `P(not complete within rounds)`.
    pub failure: f64,
    pub formula: String,
}

/// `ln n / ln(1 + (n − x)/(2n))`, where `x` is the number of Byzantine nodes
/// or adversarial edges.
pub fn tau(n: usize, x: usize) -> f64 {
    let n = n as f64;
    n.ln() / (1.0 + (n - x as f64) / (2.0 * n)).ln()
}

/// Rounds of `m`-edge Erdős–Rényi graphs that cover the phase edge budgets:
/// `Σ_phases ⌈phase_bound / m⌉`.
pub fn er_round_budget(n: usize, m: usize, c: f64) -> usize {
    if n < 2 || m == 0 {
        return 0;
    }
    scheme3_phases(n)
        .iter()
        .map(|p| (phase_bound(n, c, p.index) / m as f64).ceil() as usize)
        .sum()
}

/// Round budget the upper-bound theorems give for a model at confidence `c`.
pub fn predicted_round_budget(spec: &ModelSpec, c: f64) -> Result<RoundBudget> {
    spec.validate()?;
    if !(c >= 1.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("c must be at least 1, got {c}")));
    }
    let n = spec.n;
    let nf = n as f64;
    let ln = nf.ln();
    let q = nf.powf(-c);
    let b = match spec.kind {
        ModelKind::Urt => RoundBudget {
            rounds: (32.0 * c * ln).ceil() as usize,
            failure: q,
            formula: "ceil(32 c ln n)".into(),
        },
        ModelKind::UrtByz => RoundBudget {
            rounds: clique_round_length(n, c),
            failure: q,
            formula: "ceil(144 c log2 n)".into(),
        },
        ModelKind::UrtAdv => RoundBudget {
            rounds: (32.0 * tau(n, spec.k) * c + 12.0 * c * ln.max(spec.k as f64)).ceil() as usize,
            failure: 2.0 * q,
            formula: "ceil(32 tau c + 12 c max(ln n, k))".into(),
        },
        ModelKind::Der | ModelKind::DerByz => RoundBudget {
            rounds: er_round_budget(n, spec.m, c),
            failure: q * nf.log2(),
            formula: "sum over phases of ceil(phase_bound / m)".into(),
        },
        ModelKind::DerAdv => RoundBudget {
            rounds: er_round_budget(n, spec.m - spec.k, c),
            failure: q * nf.log2(),
            formula: "sum over phases of ceil(phase_bound / (m - k))".into(),
        },
    };
    Ok(b)
}

/// Network rounds per simulated clique round: `⌈144 c log₂ n⌉`.
pub fn clique_round_length(n: usize, c: f64) -> usize {
    (144.0 * c * (n.max(1) as f64).log2()).ceil() as usize
}

/// URT broadcast fails to complete within `log₂ n` rounds with probability
/// at least 1/4.
pub fn urt_lower_bound_rounds(n: usize) -> usize {
    (n.max(1) as f64).log2().floor() as usize
}

/// No source of a URT sequence completes within `log₂ n / 2` rounds with
/// probability at least 1/2.
pub fn consensus_lower_bound_rounds(n: usize) -> usize {
    ((n.max(1) as f64).log2() / 2.0).floor() as usize
}

/// `kn / (2(n − k − 1))`, reached with probability at least 1/4 under the
/// best `k`-edge tree adversary.
pub fn adversarial_lower_bound(n: usize, k: usize) -> f64 {
    (k * n) as f64 / (2.0 * (n - k - 1) as f64)
}

/// `⌊(log₂ n − 1) / log₂(1 + m/n)⌋` rounds, missed with probability at least 1/2.
pub fn er_lower_bound_rounds(n: usize, m: usize) -> usize {
    let n = n as f64;
    ((n.log2() - 1.0) / (1.0 + m as f64 / n).log2()).floor().max(0.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn urt_n100() {
        let b = predicted_round_budget(&ModelSpec::urt(100).unwrap(), 1.0).unwrap();
        assert_eq!(b.rounds, 148);
        assert!((b.failure - 0.01).abs() < 1e-15);
    }

    #[test]
    fn tau_sanity() {
        for n in [4usize, 10, 100, 1000] {
            for x in 0..=(2 * n / 3).saturating_sub(1) {
                let t = tau(n, x);
                let log = (n as f64).log2();
                assert!(log <= t && t <= 4.5 * log, "n={n} x={x} tau={t}");
            }
        }
    }

    #[test]
    fn adversarial_budget() {
        let b = predicted_round_budget(&ModelSpec::urt_adv(30, 19).unwrap(), 1.0).unwrap();
        let expect = 32.0 * tau(30, 19) + 12.0 * 19.0;
        assert_eq!(b.rounds, expect.ceil() as usize);
        let zero = predicted_round_budget(&ModelSpec::urt_adv(30, 0).unwrap(), 1.0).unwrap();
        assert_eq!(
            zero.rounds,
            (32.0 * tau(30, 0) + 12.0 * 30f64.ln()).ceil() as usize
        );
        assert!(predicted_round_budget(&ModelSpec::urt(10).unwrap(), 0.5).is_err());
    }

    #[test]
    fn lower_bound_rounds() {
        assert_eq!(urt_lower_bound_rounds(64), 6);
        assert_eq!(consensus_lower_bound_rounds(64), 3);
        assert_eq!(er_lower_bound_rounds(64, 64), 5);
        assert!((adversarial_lower_bound(30, 19) - 28.5).abs() < 1e-12);
    }

    #[test]
    fn er_budget_shrinks_with_m() {
        let a = er_round_budget(64, 64, 1.0);
        let b = er_round_budget(64, 640, 1.0);
        assert!(a > b && b > 0);
        assert_eq!(clique_round_length(16, 1.0), 576);
    }
}
