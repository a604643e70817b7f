//! Truncated power series with explicit truncation order.
//!
//! A `Series` stores exactly the coefficients of x^0..x^order; nothing past
//! `order` is known, and asking for such a coefficient is a bug, not a zero.
//! Binary operations return the largest order the inputs support: `min` of
//! the orders for addition, and `min(La + val(b), Lb + val(a))` for products,
//! where `val` is the index of the first nonzero known coefficient. The
//! valuation shift is what keeps multiplying by a monomial lossless.

use crate::num::Rat;
use crate::poly::Poly;
use num_traits::Zero;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    coeffs: Vec<Rat>,
    order: usize,
}

impl Series {
    /// Coefficients of x^0.. up to `order`, padding with zeros, dropping extras.
    pub fn new(mut coeffs: Vec<Rat>, order: usize) -> Self {
        coeffs.truncate(order + 1);
        coeffs.resize(order + 1, Rat::zero());
        Series { coeffs, order }
    }

    pub fn zero(order: usize) -> Self {
        Series::new(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        Series::from_poly(&Poly::one(), order)
    }

    pub fn from_poly(p: &Poly, order: usize) -> Self {
        Series::new(p.coeffs().to_vec(), order)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, i: usize) -> &Rat {
        assert!(
            i <= self.order,
            "coefficient {i} past truncation order {}",
            self.order
        );
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Index of the first nonzero known coefficient; None when all known
    /// coefficients vanish.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    fn val_or_past_end(&self) -> usize {
        self.valuation().unwrap_or(self.order + 1)
    }

    pub fn truncate(&self, order: usize) -> Series {
        assert!(order <= self.order, "cannot extend a truncation");
        Series::new(self.coeffs[..=order].to_vec(), order)
    }

    pub fn scale(&self, c: &Rat) -> Series {
        Series::new(self.coeffs.iter().map(|a| a * c).collect(), self.order)
    }

    /// Term-by-term derivative; the result is known one order less far.
    pub fn derivative(&self) -> Series {
        assert!(self.order >= 1, "derivative of an order-0 truncation");
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, c)| c * Rat::from_integer((i as i64 + 1).into()))
            .collect();
        Series::new(coeffs, self.order - 1)
    }

    /// Multiply by an exact polynomial (known to every order).
    pub fn mul_poly(&self, p: &Poly) -> Series {
        let vp = if p.is_zero() {
            0
        } else {
            p.ord_at(&Rat::zero()).expect("nonzero")
        };
        let order = self.order + vp;
        let mut out = vec![Rat::zero(); order + 1];
        for (i, a) in p.coeffs().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in self.coeffs.iter().enumerate() {
                if i + j <= order && !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Series::new(out, order)
    }

    /// Exact value of the known partial sum at alpha.
    pub fn partial_sum_at(&self, alpha: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * alpha + c;
        }
        acc
    }

    pub fn matches_prefix(&self, other: &Series, upto: usize) -> bool {
        assert!(upto <= self.order && upto <= other.order);
        self.coeffs[..=upto] == other.coeffs[..=upto]
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        let order = self.order.min(rhs.order);
        let coeffs = (0..=order)
            .map(|i| &self.coeffs[i] + &rhs.coeffs[i])
            .collect();
        Series::new(coeffs, order)
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        let order = self.order.min(rhs.order);
        let coeffs = (0..=order)
            .map(|i| &self.coeffs[i] - &rhs.coeffs[i])
            .collect();
        Series::new(coeffs, order)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series::new(self.coeffs.iter().map(|c| -c).collect(), self.order)
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        let order = (self.order + rhs.val_or_past_end()).min(rhs.order + self.val_or_past_end());
        let mut out = vec![Rat::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let jmax = rhs.order.min(order.saturating_sub(i));
            if i > order {
                break;
            }
            for (j, b) in rhs.coeffs[..=jmax].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Series::new(out, order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, rat_int};

    #[test]
    fn square_of_inverse_sqrt_prefix() {
        // (1 + x/2 + 3x^2/8)^2 agrees with 1/(1-x) through x^2.
        let s = Series::new(vec![rat_int(1), rat(1, 2), rat(3, 8)], 2);
        let sq = &s * &s;
        assert_eq!(sq.order(), 2);
        assert_eq!(sq.coeffs(), &[rat_int(1), rat_int(1), rat_int(1)]);
    }

    #[test]
    fn product_order_shifts_with_valuation() {
        let x = Series::from_poly(&Poly::x(), 3);
        let xx = &x * &x;
        assert_eq!(xx.order(), 4);
        assert_eq!(xx.valuation(), Some(2));

        // The polynomial x seen as a width-3 truncation caps the product at
        // order 3; mul_poly is the lossless route.
        let one = Series::one(5);
        assert_eq!((&one * &x).order(), 3);
        assert_eq!(one.mul_poly(&Poly::x()).order(), 6);
    }

    #[test]
    fn zero_series_multiplies_to_long_zero() {
        let z = Series::zero(3);
        let p = &z * &z;
        assert_eq!(p.order(), 7);
        assert!(p.valuation().is_none());
    }

    #[test]
    fn addition_takes_min_order() {
        let a = Series::new(vec![rat_int(1); 6], 5);
        let b = Series::new(vec![rat_int(2); 4], 3);
        let c = &a + &b;
        assert_eq!(c.order(), 3);
        assert_eq!(c.coeff(3), &rat_int(3));
    }

    #[test]
    fn derivative_drops_one_order() {
        let s = Series::new(vec![rat_int(5), rat_int(3), rat(1, 2), rat_int(4)], 3);
        let d = s.derivative();
        assert_eq!(d.order(), 2);
        assert_eq!(d.coeffs(), &[rat_int(3), rat_int(1), rat_int(12)]);
    }

    #[test]
    fn poly_multiplication_is_lossless_on_monomials() {
        let s = Series::new(vec![rat_int(1), rat_int(1), rat_int(1)], 2);
        let shifted = s.mul_poly(&Poly::monomial(rat_int(1), 4));
        assert_eq!(shifted.order(), 6);
        assert_eq!(shifted.coeff(6), &rat_int(1));
    }

    #[test]
    fn partial_sums_are_exact() {
        let s = Series::new(vec![rat_int(1), rat_int(1), rat_int(1)], 2);
        assert_eq!(s.partial_sum_at(&rat(1, 10)), rat(111, 100));
    }

    #[test]
    #[should_panic(expected = "past truncation order")]
    fn reading_past_the_order_panics() {
        let s = Series::zero(2);
        let _ = s.coeff(3);
    }
}
