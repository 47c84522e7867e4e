//! Truncated formal power series with exact rational coefficients.
//!
//! Every series carries a fixed truncation order `N` and exactly `N + 1`
//! coefficients. Binary operations require equal orders; there is no
//! implicit re-truncation of mismatched operands.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational coefficient. `BigRational` keeps values in lowest terms
/// with a positive denominator, which is exactly the invariant we need.
pub type Coeff = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("truncation order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
}

/// A formal power series truncated at a fixed order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<Coeff>,
}

impl PowerSeries {
    pub fn zero(order: usize) -> Self {
        PowerSeries {
            coeffs: vec![Coeff::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Coeff::one();
        s
    }

    /// The series `x` (a single atom of size 1). Truncates to zero at order 0.
    pub fn atom(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = Coeff::one();
        }
        s
    }

    pub fn monomial(order: usize, index: usize, value: Coeff) -> Self {
        let mut s = Self::zero(order);
        if index <= order {
            s.coeffs[index] = value;
        }
        s
    }

    /// Build from small integer coefficients; the order is `values.len() - 1`.
    pub fn from_integers(values: &[i64]) -> Self {
        PowerSeries {
            coeffs: values
                .iter()
                .map(|&v| Coeff::from_integer(BigInt::from(v)))
                .collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, index: usize) -> &Coeff {
        &self.coeffs[index]
    }

    pub fn coeffs(&self) -> &[Coeff] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, index: usize, value: Coeff) {
        self.coeffs[index] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Index of the lowest nonzero coefficient, if any.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Copy with a different truncation order, padding with zeros or dropping
    /// high coefficients as needed.
    pub fn resized(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Coeff::zero());
        coeffs.truncate(order + 1);
        PowerSeries { coeffs }
    }

    fn check_order(&self, other: &Self) -> Result<(), SeriesError> {
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(PowerSeries { coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(PowerSeries { coeffs })
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<(), SeriesError> {
        self.check_order(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_zero() {
                *a += b;
            }
        }
        Ok(())
    }

    /// `self += r * other`, used by operator translations with rational weights.
    pub fn add_assign_scaled(&mut self, other: &Self, r: &Coeff) -> Result<(), SeriesError> {
        self.check_order(other)?;
        if r.is_zero() {
            return Ok(());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_zero() {
                *a += b * r;
            }
        }
        Ok(())
    }

    /// Cauchy product truncated at the common order. Zero terms are skipped,
    /// which matters a lot for the sparse series pure-cactus grammars produce.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        let order = self.order();
        let mut out = Self::zero(order);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(order + 1 - i).enumerate() {
                if b.is_zero() {
                    continue;
                }
                out.coeffs[i + j] += a * b;
            }
        }
        Ok(out)
    }

    /// `self^m` by repeated multiplication; `pow(a, 0) = 1`.
    pub fn pow(&self, m: usize) -> Self {
        let order = self.order();
        if m == 0 {
            return Self::one(order);
        }
        // A^m vanishes entirely below the truncation order.
        if let Some(v) = self.valuation() {
            if v.saturating_mul(m) > order {
                return Self::zero(order);
            }
        } else {
            return Self::zero(order);
        }
        let mut acc = self.clone();
        for _ in 1..m {
            acc = acc.mul(self).expect("orders agree");
        }
        acc
    }

    /// Substitution `x -> x^k` (plethystic power), `k >= 1`.
    pub fn substitute_power(&self, k: usize) -> Self {
        assert!(k >= 1, "substitute_power requires k >= 1");
        if k == 1 {
            return self.clone();
        }
        let order = self.order();
        let mut out = Self::zero(order);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match i.checked_mul(k) {
                Some(j) if j <= order => out.coeffs[j] = c.clone(),
                _ => break,
            }
        }
        out
    }

    /// Coefficientwise multiplication by a rational.
    pub fn scale(&self, r: &Coeff) -> Self {
        if r.is_zero() {
            return Self::zero(self.order());
        }
        PowerSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| if c.is_zero() { Coeff::zero() } else { c * r })
                .collect(),
        }
    }

    /// True when every coefficient is an integer (denominator 1).
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.denom().is_one())
    }

    /// True when every coefficient is >= 0.
    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }
}

/// Convenience constructor for small rational coefficients.
pub fn ratio(num: i64, den: i64) -> Coeff {
    Coeff::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(values: &[i64]) -> PowerSeries {
        PowerSeries::from_integers(values)
    }

    #[test]
    fn mul_binomial() {
        let a = s(&[1, 1, 0]);
        assert_eq!(a.mul(&a).unwrap(), s(&[1, 2, 1]));
    }

    #[test]
    fn mul_identity() {
        let a = s(&[3, 0, 5, 7]);
        let one = PowerSeries::one(3);
        assert_eq!(a.mul(&one).unwrap(), a);
    }

    #[test]
    fn sub_cancels() {
        let a = s(&[0, 1, 1]);
        let b = s(&[0, 1, 0]);
        assert_eq!(a.sub(&b).unwrap(), s(&[0, 0, 1]));
    }

    #[test]
    fn order_mismatch_rejected() {
        let a = PowerSeries::zero(3);
        let b = PowerSeries::zero(4);
        assert_eq!(
            a.add(&b).unwrap_err(),
            SeriesError::OrderMismatch { left: 3, right: 4 }
        );
    }

    #[test]
    fn pow_examples() {
        let x = PowerSeries::atom(4);
        assert_eq!(x.pow(3), s(&[0, 0, 0, 1, 0]));
        let a = s(&[1, 1, 0]);
        assert_eq!(a.pow(2), s(&[1, 2, 1]));
        assert_eq!(a.pow(1), a);
        assert_eq!(a.pow(0), PowerSeries::one(2));
    }

    #[test]
    fn substitute_power_examples() {
        let a = s(&[0, 1, 1, 0, 0]);
        assert_eq!(a.substitute_power(2), s(&[0, 0, 1, 0, 1]));
        assert_eq!(a.substitute_power(1), a);
        // the x^3 image of x falls outside order 2
        let b = s(&[1, 1, 0]);
        assert_eq!(b.substitute_power(3), s(&[1, 0, 0]));
    }

    #[test]
    fn scale_examples() {
        let x3 = PowerSeries::atom(3).pow(3);
        let scaled = x3.scale(&ratio(1, 3));
        assert_eq!(*scaled.coeff(3), ratio(1, 3));
        let a = s(&[1, 2, 3]);
        assert!(a.scale(&Coeff::zero()).is_zero());
        assert_eq!(a.scale(&Coeff::one()), a);
    }

    #[test]
    fn valuation_scan() {
        assert_eq!(s(&[0, 0, 7, 1]).valuation(), Some(2));
        assert_eq!(PowerSeries::zero(5).valuation(), None);
    }

    #[test]
    fn series_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<PowerSeries>();
        assert_send_sync::<crate::grammar::GrammarSystem>();
        assert_send_sync::<crate::engine::SeriesEnvironment>();
        assert_send_sync::<crate::sampler::Structure>();
    }

    fn arb_series() -> impl Strategy<Value = PowerSeries> {
        prop::collection::vec(-4i64..5, 13).prop_map(|v| PowerSeries::from_integers(&v))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_series(), b in arb_series(), c in arb_series()) {
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(
                a.add(&b).unwrap().add(&c).unwrap(),
                a.add(&b.add(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(
                a.mul(&b).unwrap().mul(&c).unwrap(),
                a.mul(&b.mul(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
        }

        #[test]
        fn substitution_composes(a in arb_series(), j in 1usize..4, k in 1usize..4) {
            prop_assert_eq!(
                a.substitute_power(j).substitute_power(k),
                a.substitute_power(j * k)
            );
        }

        #[test]
        fn pow_is_folded_mul(a in arb_series(), m in 0usize..7) {
            let mut expect = PowerSeries::one(a.order());
            for _ in 0..m {
                expect = expect.mul(&a).unwrap();
            }
            prop_assert_eq!(a.pow(m), expect);
        }
    }
}
