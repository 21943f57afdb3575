use num_rational::BigRational;
use serde::Serialize;
use statrs::distribution::{Binomial, DiscreteCDF};

use super::scalar::Scalar;
use crate::error::{Error, Result};

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p={p} is not a probability")));
    }
    Ok(())
}

/// `P(B ≤ x) ≤ exp(−2t(p − x/t)²)` for `B ~ Binomial(t, p)` and `x ≤ tp`.
pub fn hoeffding(t: u64, p: f64, x: f64) -> Result<f64> {
    check_p(p)?;
    if t == 0 {
        return Err(Error::InvalidArgument("t must be positive".into()));
    }
    let mean = t as f64 * p;
    if x > mean * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!("x={x} exceeds tp={mean}")));
    }
    let gap = p - x / t as f64;
    Ok((-2.0 * t as f64 * gap * gap).exp())
}

/// A `P(B ≥ mp) > 1/4` guarantee together with whether its hypothesis holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub bound: f64,
    pub applicable: bool,
    pub condition: &'static str,
}

fn check_m(m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    Ok(())
}

/// Holds for `p > 1/m`.
pub fn greenberg_mohri(m: u64, p: f64) -> Result<BoundCheck> {
    check_m(m)?;
    check_p(p)?;
    Ok(BoundCheck {
        bound: 0.25,
        applicable: p > 1.0 / m as f64,
        condition: "p > 1/m",
    })
}

/// Extension down to `p > 1/(3m)`.
pub fn small_p(m: u64, p: f64) -> Result<BoundCheck> {
    check_m(m)?;
    check_p(p)?;
    Ok(BoundCheck {
        bound: 0.25,
        applicable: p > 1.0 / (3.0 * m as f64),
        condition: "p > 1/(3m)",
    })
}

/// `P(B ≥ mp)` for `B ~ Binomial(m, p)`.
pub fn binomial_tail_at_mean(m: u64, p: f64) -> Result<f64> {
    check_m(m)?;
    check_p(p)?;
    // Guard against `m·p` landing a hair above an integer.
    let k = (m as f64 * p * (1.0 - 1e-12)).ceil() as u64;
    if k == 0 {
        return Ok(1.0);
    }
    let b = Binomial::new(p, m).expect("validated parameters");
    Ok(b.sf(k - 1))
}

/// `P(B ≥ mp)` exactly, with `p = num/den`.
pub fn binomial_tail_at_mean_exact(m: u64, num: u64, den: u64) -> Result<BigRational> {
    check_m(m)?;
    if den == 0 || num > den {
        return Err(Error::InvalidArgument(format!("{num}/{den} is not a probability")));
    }
    let k = (m * num).div_ceil(den);
    Ok(BigRational::sum((k..=m).map(|j| BigRational::binomial_pmf(m, j, num, den))))
}
