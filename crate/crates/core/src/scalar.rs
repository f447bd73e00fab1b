use num_traits::{Num, Signed, ToPrimitive};

/// Arbitrary-precision rational; the exact numeric mode.
pub type Rational = num_rational::BigRational;

/// Tolerance on `|sum - 1|` for float-mode distributions and tables.
pub const FLOAT_SUM_TOLERANCE: f64 = 1e-12;

/// A probability mass in one of the two numeric modes.
///
/// Exact mode ([`Rational`]) never rounds; float mode (`f64`) keeps finite
/// values only. A whole table or distribution is homogeneous in mode.
pub trait Scalar: Clone + PartialOrd + Num + Signed {
    /// True for the exact rational mode.
    const EXACT: bool;

    fn to_f64(&self) -> f64;

    /// Valid as a stored mass: nonnegative, and finite in float mode.
    fn mass_is_valid(&self) -> bool;

    /// Whether a total equals 1 under the mode's tolerance.
    fn sum_is_one(sum: &Self) -> bool;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    #[inline]
    fn to_f64(&self) -> f64 {
        *self
    }

    #[inline]
    fn mass_is_valid(&self) -> bool {
        self.is_finite() && *self >= 0.0
    }

    #[inline]
    fn sum_is_one(sum: &Self) -> bool {
        (sum - 1.0).abs() <= FLOAT_SUM_TOLERANCE
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    #[inline]
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    #[inline]
    fn mass_is_valid(&self) -> bool {
        !self.is_negative()
    }

    #[inline]
    fn sum_is_one(sum: &Self) -> bool {
        use num_traits::One;
        sum.is_one()
    }
}

/// Natural logarithm; routed through `libm` when built without `std`.
#[cfg(feature = "std")]
#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    x.ln()
}

#[cfg(all(not(feature = "std"), feature = "libm"))]
#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

/// Exact dyadic expansion of a finite `f64`.
pub(crate) fn rational_from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite float converts exactly")
}

/// `2⁻ᵏ`, exact; underflows to 0 for very large `k`.
pub(crate) fn pow2_neg(k: u32) -> f64 {
    let mut x = 1.0f64;
    for _ in 0..k {
        x *= 0.5;
    }
    x
}
