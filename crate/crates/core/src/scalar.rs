use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};

/// Field element usable by the exact-analysis routines.
///
/// Floating-point types accept a small residual when validating linear
/// solves; the rational type must solve exactly.
pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + ToPrimitive {
    /// Largest max-norm residual accepted from a linear solve.
    fn solve_tolerance() -> Self;

    fn from_usize(v: usize) -> Self;

    /// `num / den` in this scalar type.
    fn ratio(num: i64, den: i64) -> Self;

    /// Lossy conversion for reporting and for checks that need real roots.
    fn to_real(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn solve_tolerance() -> Self {
        1e-10
    }

    fn from_usize(v: usize) -> Self {
        v as f64
    }

    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
}

impl Scalar for f32 {
    fn solve_tolerance() -> Self {
        1e-3
    }

    fn from_usize(v: usize) -> Self {
        v as f32
    }

    fn ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }
}

impl Scalar for BigRational {
    fn solve_tolerance() -> Self {
        BigRational::from_integer(BigInt::from(0))
    }

    fn from_usize(v: usize) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_real(&self) -> f64 {
        // BigRational's ToPrimitive can return None for huge parts; fall back
        // to dividing the converted integers.
        self.to_f64().unwrap_or_else(|| {
            let n = self.numer().to_f64().unwrap_or(f64::NAN);
            let d = self.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }
}

/// `H_k = 1 + 1/2 + ... + 1/k`, with `H_0 = 0`.
pub fn harmonic<S: Scalar>(k: usize) -> S {
    (1..=k).fold(S::zero(), |acc, i| acc + S::one() / S::from_usize(i))
}

/// Binomial coefficient `C(n, k)` in the scalar type.
pub fn binomial<S: Scalar>(n: usize, k: usize) -> S {
    if k > n {
        return S::zero();
    }
    let k = k.min(n - k);
    let mut acc = S::one();
    for i in 0..k {
        acc = acc * S::from_usize(n - i) / S::from_usize(i + 1);
    }
    acc
}
