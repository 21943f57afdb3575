use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use statrs::distribution::{Binomial, Discrete};

/// Number type for the exact chain: `f64` for scale, [`BigRational`] for
/// exact oracles.
pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn ratio(num: u64, den: u64) -> Self;
    /// `C(trials, k) p^k (1-p)^{trials-k}` with `p = num / den`.
    fn binomial_pmf(trials: u64, k: u64, num: u64, den: u64) -> Self;
    fn to_f64(&self) -> f64;
    fn sum(items: impl IntoIterator<Item = Self>) -> Self;
    fn abs(&self) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn binomial_pmf(trials: u64, k: u64, num: u64, den: u64) -> Self {
        if k > trials {
            return 0.0;
        }
        Binomial::new(num as f64 / den as f64, trials)
            .expect("probability in [0, 1]")
            .pmf(k)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    /// Kahan–Babuška summation.
    fn sum(items: impl IntoIterator<Item = Self>) -> Self {
        let (mut s, mut comp) = (0.0f64, 0.0f64);
        for x in items {
            let t = s + x;
            comp += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
            s = t;
        }
        s + comp
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

fn binomial_coefficient(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn binomial_pmf(trials: u64, k: u64, num: u64, den: u64) -> Self {
        if k > trials {
            return Zero::zero();
        }
        let exp = |b: u64, e: u64| num_traits::pow(BigUint::from(b), e as usize);
        let top = binomial_coefficient(trials, k) * exp(num, k) * exp(den - num, trials - k);
        BigRational::new(top.into(), exp(den, trials).into())
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn sum(items: impl IntoIterator<Item = Self>) -> Self {
        items.into_iter().fold(Zero::zero(), |a, b| a + b)
    }

    fn abs(&self) -> Self {
        num_traits::Signed::abs(self)
    }
}
