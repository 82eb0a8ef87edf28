//! Scalar abstraction shared by every computation in the crate.
//!
//! All model arithmetic is rational (sums, products, quotients, comparisons),
//! so the same code runs over `f64`, `f32`, or exact `Ratio<i128>`. The only
//! per-type knob is the absolute tolerance used for belief and payoff
//! comparisons: `1e-12` for `f64`, `1e-5` for `f32`, and zero for rationals.

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Exact rational scalar. Denominators stay small for the decimal inputs used
/// in worked examples; long-running sweeps should use `f64`.
pub type Rational = Ratio<i128>;

pub trait Scalar:
    Num
    + Signed
    + Copy
    + PartialOrd
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Absolute tolerance for tie detection.
    fn tolerance() -> Self;

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half() -> Self {
        Self::one() / Self::two()
    }

    /// `num / den` built from integers, exact for rationals.
    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("integer literal")
            / Self::from_i64(den).expect("integer literal")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("index fits the scalar type")
    }

    /// Lossy conversion from `f64`; panics only on NaN or infinities.
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn approx_eq(self, other: Self) -> bool {
        (self - other).abs() <= Self::tolerance()
    }

    /// `self > other` by more than the tolerance.
    fn definitely_gt(self, other: Self) -> bool {
        self - other > Self::tolerance()
    }

    fn definitely_lt(self, other: Self) -> bool {
        other - self > Self::tolerance()
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn clamp_unit(self) -> Self {
        self.max_of(Self::zero()).min_of(Self::one())
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-5
    }
}

impl Scalar for Rational {
    fn tolerance() -> Self {
        Ratio::from_integer(0)
    }

    fn from_f64_lossy(x: f64) -> Self {
        // Decimal inputs (0.8, 0.35, ...) should land on their short fraction,
        // not on the binary expansion of the float.
        let mut den: i128 = 1;
        while den <= 1_000_000_000_000 {
            let scaled = x * den as f64;
            if (scaled - scaled.round()).abs() < 1e-9 * den as f64 {
                return Ratio::new(scaled.round() as i128, den);
            }
            den *= 10;
        }
        Ratio::from_f64(x).expect("finite f64")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_from_decimal_is_short() {
        assert_eq!(Rational::from_f64_lossy(0.8), Ratio::new(4, 5));
        assert_eq!(Rational::from_f64_lossy(0.35), Ratio::new(7, 20));
        assert_eq!(Rational::from_f64_lossy(-0.25), Ratio::new(-1, 4));
    }

    #[test]
    fn tolerance_comparisons() {
        assert!(1.0f64.approx_eq(1.0 + 1e-13));
        assert!(!1.0f64.definitely_gt(1.0 + 1e-13));
        assert!(Rational::ratio(1, 3).definitely_gt(Rational::ratio(1, 4)));
        assert_eq!(f64::ratio(3, 4), 0.75);
    }
}
