use alloc::format;
use alloc::vec::Vec;

use crate::error::Error;
use crate::scalar::{ln, Scalar};

/// A marginal probability vector on the alphabet `{0, …, n−1}`.
///
/// Masses are nonnegative and sum to 1 — exactly in exact mode, within
/// [`FLOAT_SUM_TOLERANCE`](crate::FLOAT_SUM_TOLERANCE) in float mode.
/// Zero masses are permitted; the boundary of the simplex is part of the
/// domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<T: Scalar> {
    masses: Vec<T>,
}

impl<T: Scalar> Distribution<T> {
    pub fn new(masses: Vec<T>) -> Result<Self, Error> {
        if masses.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let mut sum = T::zero();
        for (i, m) in masses.iter().enumerate() {
            if !m.mass_is_valid() {
                return Err(if m.to_f64().is_nan() || m.to_f64().is_infinite() {
                    Error::NonFinite(i)
                } else {
                    Error::NegativeMass(i)
                });
            }
            sum = sum + m.clone();
        }
        if !T::sum_is_one(&sum) {
            return Err(Error::BadTotal(format!("{}", sum.to_f64())));
        }
        Ok(Self { masses })
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Mass of symbol `i`.
    pub fn mass(&self, i: usize) -> &T {
        &self.masses[i]
    }

    pub fn masses(&self) -> &[T] {
        &self.masses
    }

    pub fn support_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.masses
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(|(i, _)| i)
    }

    pub fn to_f64(&self) -> Distribution<f64> {
        Distribution {
            masses: self.masses.iter().map(Scalar::to_f64).collect(),
        }
    }

    /// `D(self‖other) = Σ pᵢ ln(pᵢ/qᵢ)` in nats, with the conventions
    /// `0·ln(0/q) = 0` and `p·ln(p/0) = +∞` for `p > 0`.
    pub fn kl_divergence(&self, other: &Self) -> Result<f64, Error> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        Ok(kl_sum(
            self.masses.iter().zip(other.masses.iter()),
        ))
    }
}

/// Shared KL accumulator over paired masses. Infinite as soon as the first
/// argument charges a cell the second gives zero mass.
pub(crate) fn kl_sum<'a, T: Scalar + 'a>(
    pairs: impl Iterator<Item = (&'a T, &'a T)>,
) -> f64 {
    let mut acc = 0.0;
    for (p, q) in pairs {
        if p.is_zero() {
            continue;
        }
        if q.is_zero() {
            return f64::INFINITY;
        }
        let (p, q) = (p.to_f64(), q.to_f64());
        acc += p * ln(p / q);
    }
    // nonnegative up to rounding; snap the rounding noise
    acc.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::One;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn accepts_boundary_masses() {
        let d = Distribution::new(vec![rat(1, 1), rat(0, 1)]).unwrap();
        assert_eq!(d.support_indices().count(), 1);
    }

    #[test]
    fn rejects_bad_totals() {
        assert!(matches!(
            Distribution::new(vec![rat(1, 2), rat(1, 3)]),
            Err(Error::BadTotal(_))
        ));
        assert!(Distribution::new(vec![0.5f64, 0.5 + 1e-9]).is_err());
        // within float tolerance
        assert!(Distribution::new(vec![0.5f64, 0.5 + 1e-13]).is_ok());
    }

    #[test]
    fn rejects_negative_and_nonfinite() {
        assert!(matches!(
            Distribution::new(vec![rat(3, 2), rat(-1, 2)]),
            Err(Error::NegativeMass(1))
        ));
        assert!(matches!(
            Distribution::new(vec![f64::NAN, 1.0]),
            Err(Error::NonFinite(0))
        ));
    }

    #[test]
    fn kl_identity_is_zero() {
        let p = Distribution::new(vec![0.3f64, 0.7]).unwrap();
        assert_eq!(p.kl_divergence(&p).unwrap(), 0.0);
    }

    #[test]
    fn kl_infinite_outside_support() {
        let p = Distribution::new(vec![0.5f64, 0.5]).unwrap();
        let q = Distribution::new(vec![1.0f64, 0.0]).unwrap();
        assert_eq!(p.kl_divergence(&q).unwrap(), f64::INFINITY);
        // reverse direction is finite: 0·ln(0/q) = 0
        assert!(q.kl_divergence(&p).unwrap().is_finite());
    }

    #[test]
    fn kl_frozen_value() {
        // D((1/2,1/2) ‖ (1/4,3/4)) = ln 2 / 2 + ln(2/3) / 2
        let p = Distribution::new(vec![0.5f64, 0.5]).unwrap();
        let q = Distribution::new(vec![0.25f64, 0.75]).unwrap();
        let d = p.kl_divergence(&q).unwrap();
        assert!((d - 0.14384103622589045).abs() < 1e-15);
    }

    #[test]
    fn exact_mode_requires_exact_total() {
        let one = Rational::one();
        assert!(Distribution::new(vec![one.clone()]).is_ok());
        assert!(Distribution::new(vec![rat(1, 3), rat(1, 3), rat(1, 3)]).is_ok());
    }
}
