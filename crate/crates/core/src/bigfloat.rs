//! Exact dyadic floats: mantissa * 2^exponent with a big-integer mantissa.
//!
//! Addition, multiplication and comparison are exact; precision enters only
//! through the explicit [`BigFloat::round_to`] and [`BigFloat::from_rat`]
//! constructors, both of which hand back a bound on the error they made.
//! Values are kept normalized (odd mantissa, or zero with exponent 0), so
//! structural equality is value equality.

use crate::num::{pow2_rat, Int, Rat};
use num_bigint::Sign;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigFloat {
    m: Int,
    e: i64,
}

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat { m: Int::zero(), e: 0 }
    }

    pub fn from_int(m: Int) -> Self {
        BigFloat { m, e: 0 }.normalize()
    }

    pub fn from_i64(m: i64) -> Self {
        BigFloat::from_int(Int::from(m))
    }

    /// 2^e.
    pub fn pow2(e: i64) -> Self {
        BigFloat { m: Int::one(), e }
    }

    pub fn new(m: Int, e: i64) -> Self {
        BigFloat { m, e }.normalize()
    }

    fn normalize(mut self) -> Self {
        if self.m.is_zero() {
            self.e = 0;
            return self;
        }
        let tz = self.m.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.m >>= tz;
            self.e += tz as i64;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.m.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    pub fn mantissa(&self) -> &Int {
        &self.m
    }

    pub fn exponent(&self) -> i64 {
        self.e
    }

    pub fn mantissa_bits(&self) -> u64 {
        self.m.bits()
    }

    /// Smallest b with |value| < 2^b; for zero, i64::MIN.
    pub fn mag_exp(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.m.bits() as i64 + self.e
        }
    }

    pub fn neg(&self) -> BigFloat {
        BigFloat { m: -&self.m, e: self.e }
    }

    pub fn abs(&self) -> BigFloat {
        BigFloat { m: self.m.abs(), e: self.e }
    }

    pub fn shl(&self, k: i64) -> BigFloat {
        if self.is_zero() {
            return BigFloat::zero();
        }
        BigFloat { m: self.m.clone(), e: self.e + k }
    }

    pub fn add(&self, rhs: &BigFloat) -> BigFloat {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.e.min(rhs.e);
        let a = &self.m << (self.e - e) as usize;
        let b = &rhs.m << (rhs.e - e) as usize;
        BigFloat { m: a + b, e }.normalize()
    }

    pub fn sub(&self, rhs: &BigFloat) -> BigFloat {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &BigFloat) -> BigFloat {
        if self.is_zero() || rhs.is_zero() {
            return BigFloat::zero();
        }
        BigFloat {
            m: &self.m * &rhs.m,
            e: self.e + rhs.e,
        }
        .normalize()
    }

    /// Round to at most `prec` mantissa bits; returns the rounded value and a
    /// bound on |self - rounded| (zero when the value fit as-is).
    pub fn round_to(&self, prec: u64) -> (BigFloat, BigFloat) {
        assert!(prec >= 2);
        let bits = self.m.bits();
        if bits <= prec {
            return (self.clone(), BigFloat::zero());
        }
        let k = (bits - prec) as usize;
        // Round the magnitude, then restore the sign: `>>` on a negative Int
        // floors, which would overshoot nearest by up to a whole ulp.
        let half = Int::one() << (k - 1);
        let mag = (self.m.abs() + half) >> k;
        let shifted = if self.m.is_negative() { -mag } else { mag };
        let rounded = BigFloat {
            m: shifted,
            e: self.e + k as i64,
        }
        .normalize();
        (rounded, BigFloat::pow2(self.e + k as i64 - 1))
    }

    /// Nearest dyadic with ~`prec` mantissa bits; returns (value, error bound).
    pub fn from_rat(q: &Rat, prec: u64) -> (BigFloat, BigFloat) {
        assert!(prec >= 2);
        if q.is_zero() {
            return (BigFloat::zero(), BigFloat::zero());
        }
        if q.denom().is_one() {
            // Exact if it fits, otherwise round like any other value.
            return BigFloat::from_int(q.numer().clone()).round_to(prec);
        }
        let e = crate::num::floor_log2_rat(&q.abs()) - prec as i64;
        let (mut num, mut den) = (q.numer().clone(), q.denom().clone());
        if e <= 0 {
            num <<= (-e) as usize;
        } else {
            den <<= e as usize;
        }
        let m = round_div(&num, &den);
        (
            BigFloat { m, e }.normalize(),
            BigFloat::pow2(e - 1),
        )
    }

    pub fn to_rat(&self) -> Rat {
        Rat::from_integer(self.m.clone()) * pow2_rat(self.e)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.m.bits();
        let (m_red, e_red) = if bits > 64 {
            let k = (bits - 64) as i64;
            ((&self.m >> k as usize).clone(), self.e + k)
        } else {
            (self.m.clone(), self.e)
        };
        let mf = m_red.to_string().parse::<f64>().unwrap_or(f64::NAN);
        mf * 2f64.powi(e_red.clamp(-1_000_000, 1_000_000) as i32)
    }
}

/// a/b to the nearest integer, ties away from zero.
fn round_div(a: &Int, b: &Int) -> Int {
    debug_assert!(b.is_positive());
    let two_a = a << 1usize;
    let sign = if a.is_negative() { -Int::one() } else { Int::one() };
    (two_a.abs() + b) / (b << 1usize) * sign
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BigFloat {
    fn cmp(&self, other: &Self) -> Ordering {
        let sa = self.m.sign();
        let sb = other.m.sign();
        let sign_rank = |s: Sign| match s {
            Sign::Minus => 0,
            Sign::NoSign => 1,
            Sign::Plus => 2,
        };
        if sign_rank(sa) != sign_rank(sb) {
            return sign_rank(sa).cmp(&sign_rank(sb));
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        // Same nonzero sign: decide by magnitude envelope, else align exactly.
        let (ma, mb) = (self.mag_exp(), other.mag_exp());
        let flip = if sa == Sign::Minus { true } else { false };
        let ord = if ma != mb {
            ma.cmp(&mb)
        } else {
            let e = self.e.min(other.e);
            let a = &self.m << (self.e - e) as usize;
            let b = &other.m << (other.e - e) as usize;
            a.cmp(&b).then(Ordering::Equal)
        };
        if flip && ma != mb {
            ord.reverse()
        } else {
            ord
        }
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}
