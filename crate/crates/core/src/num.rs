//! Integer and rational scalars plus the small number-theoretic helpers the
//! rest of the crate leans on: p-adic valuations, floor roots, primality for
//! machine-word moduli, factorial products.
//!
//! Rationals are always reduced with positive denominator; that invariant is
//! maintained by `num_rational` itself, so a `Rat` can be consumed without
//! renormalizing.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Int = BigInt;
pub type Rat = num_rational::BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KernelError {
    #[error("ord_at of the zero polynomial")]
    ZeroPolynomial,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("valuation of zero")]
    ZeroValue,
    #[error("negative radicand")]
    NegativeRadicand,
}

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(Int::from(p), Int::from(q))
}

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(Int::from(v))
}

pub fn is_integer(q: &Rat) -> bool {
    q.denom().is_one()
}

/// Floor of the k-th root of a nonnegative integer.
pub fn int_nth_root(n: &Int, k: u32) -> Result<Int, KernelError> {
    if n.is_negative() {
        return Err(KernelError::NegativeRadicand);
    }
    assert!(k >= 1);
    Ok(n.nth_root(k))
}

pub fn int_sqrt(n: &Int) -> Result<Int, KernelError> {
    int_nth_root(n, 2)
}

pub fn is_perfect_square(n: &Int) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Deterministic Miller-Rabin, exact on the whole u64 range.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let pow_mod = |mut b: u64, mut e: u64, m: u64| -> u64 {
        let mut acc: u128 = 1;
        let mut bb: u128 = (b % m) as u128;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * bb % m as u128;
            }
            bb = bb * bb % m as u128;
            e >>= 1;
        }
        b = acc as u64;
        b
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = pow_mod(x, 2, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// v_p of a nonzero rational: the (possibly negative) exponent of p in the
/// reduced fraction. Rejects composite or unit moduli.
pub fn padic_valuation(q: &Rat, p: u64) -> Result<i64, KernelError> {
    if !is_prime_u64(p) {
        return Err(KernelError::NotPrime(p));
    }
    if q.is_zero() {
        return Err(KernelError::ZeroValue);
    }
    let p = Int::from(p);
    let count = |mut n: Int| -> i64 {
        let mut v = 0i64;
        loop {
            let (d, r) = n.div_rem(&p);
            if !r.is_zero() {
                return v;
            }
            v += 1;
            n = d;
        }
    };
    Ok(count(q.numer().abs()) - count(q.denom().abs()))
}

/// Product of the integers in `[lo, hi]`, by splitting; 1 on empty ranges.
pub fn range_product(lo: u64, hi: u64) -> Int {
    if lo > hi {
        return Int::one();
    }
    if hi - lo < 8 {
        let mut acc = Int::one();
        for v in lo..=hi {
            acc *= Int::from(v);
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    range_product(lo, mid) * range_product(mid + 1, hi)
}

pub fn factorial(n: u64) -> Int {
    range_product(2, n)
}

/// gcd of the entries, zero only when every entry is zero.
pub fn content(values: &[Int]) -> Int {
    let mut g = Int::zero();
    for v in values {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Largest e with 2^e <= q, for q > 0.
pub fn floor_log2_rat(q: &Rat) -> i64 {
    assert!(q.is_positive(), "floor_log2_rat needs a positive argument");
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    // 2^(nb-db-1) <= q < 2^(nb-db+1); settle the boundary exactly.
    let mut e = nb - db;
    if pow2_rat(e) > *q {
        e -= 1;
    } else if pow2_rat(e + 1) <= *q {
        e += 1;
    }
    debug_assert!(pow2_rat(e) <= *q && *q < pow2_rat(e + 1));
    e
}

/// 2^e as an exact rational, e of either sign.
pub fn pow2_rat(e: i64) -> Rat {
    let one = Int::one();
    if e >= 0 {
        Rat::from_integer(&one << e as usize)
    } else {
        Rat::new(one.clone(), one << (-e) as usize)
    }
}

/// Exact big-integer power with a plain u64 exponent.
pub fn int_pow(base: &Int, exp: u64) -> Int {
    let mut acc = Int::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    acc
}

pub fn rat_pow(base: &Rat, exp: u64) -> Rat {
    Rat::new(int_pow(base.numer(), exp), int_pow(base.denom(), exp))
}

/// Distinct prime factors of a small modulus, ascending.
pub fn prime_factors_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn int_is_zero(v: &Int) -> bool {
    v.sign() == Sign::NoSign
}
