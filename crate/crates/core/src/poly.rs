//! Dense univariate polynomials over the rationals, constant term first.
//!
//! The coefficient vector never ends in a zero; the zero polynomial is the
//! empty vector. Integer polynomials are the subtype `denominator lcm == 1`,
//! checked by [`Poly::is_integer`] rather than tracked in the type.

use crate::num::{int, is_integer, rat_int, Int, KernelError, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn x() -> Self {
        Poly::monomial(Rat::one(), 1)
    }

    pub fn constant(c: Rat) -> Self {
        Poly::new(vec![c])
    }

    pub fn monomial(c: Rat, deg: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); deg + 1];
        coeffs[deg] = c;
        Poly::new(coeffs)
    }

    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_int_coeffs(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn from_big_coeffs(coeffs: Vec<Int>) -> Self {
        Poly::new(coeffs.into_iter().map(Rat::from_integer).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * rat_int(i as i64 + 1))
                .collect(),
        )
    }

    /// P^(m) / m!. Sends integer polynomials to integer polynomials: the
    /// coefficient of x^v picks up the binomial C(v+m, m).
    pub fn divided_derivative(&self, m: usize) -> Poly {
        if m == 0 {
            return self.clone();
        }
        if self.coeffs.len() <= m {
            return Poly::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - m);
        for (v, c) in self.coeffs[m..].iter().enumerate() {
            out.push(c * Rat::from_integer(binomial(v + m, m)));
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiply by x^k.
    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rat::zero(); k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// P(a x + b).
    pub fn compose_linear(&self, a: &Rat, b: &Rat) -> Poly {
        let inner = Poly::new(vec![b.clone(), a.clone()]);
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &inner) + &Poly::constant(c.clone());
        }
        acc
    }

    /// Quotient and remainder of division by (x - alpha).
    pub fn synthetic_div(&self, alpha: &Rat) -> (Poly, Rat) {
        if self.is_zero() {
            return (Poly::zero(), Rat::zero());
        }
        let n = self.coeffs.len();
        let mut q = vec![Rat::zero(); n - 1];
        let mut carry = Rat::zero();
        for i in (0..n).rev() {
            let v = &self.coeffs[i] + &carry * alpha;
            if i == 0 {
                return (Poly::new(q), v);
            }
            q[i - 1] = v.clone();
            carry = v;
        }
        unreachable!()
    }

    /// Vanishing order at alpha, by repeated exact division by (x - alpha).
    pub fn ord_at(&self, alpha: &Rat) -> Result<usize, KernelError> {
        if self.is_zero() {
            return Err(KernelError::ZeroPolynomial);
        }
        let mut ord = 0;
        let mut cur = self.clone();
        loop {
            let (q, rem) = cur.synthetic_div(alpha);
            if !rem.is_zero() {
                return Ok(ord);
            }
            ord += 1;
            cur = q;
            if cur.is_zero() {
                return Ok(ord);
            }
        }
    }

    pub fn is_integer(&self) -> bool {
        self.coeffs.iter().all(is_integer)
    }

    /// lcm of the coefficient denominators; 1 for the zero polynomial.
    pub fn denom_lcm(&self) -> Int {
        let mut l = Int::one();
        for c in &self.coeffs {
            l = l.lcm(c.denom());
        }
        l
    }

    pub fn to_int_coeffs(&self) -> Option<Vec<Int>> {
        self.coeffs
            .iter()
            .map(|c| is_integer(c).then(|| c.numer().clone()))
            .collect()
    }

    /// gcd of the coefficients of an integer polynomial.
    pub fn int_content(&self) -> Option<Int> {
        let cs = self.to_int_coeffs()?;
        Some(crate::num::content(&cs))
    }

    pub fn max_abs_coeff(&self) -> Rat {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rat::zero)
    }
}

fn binomial(n: usize, k: usize) -> Int {
    let k = k.min(n - k.min(n));
    let mut acc = Int::one();
    for i in 0..k {
        acc = acc * int((n - i) as i64) / int(i as i64 + 1);
    }
    acc
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + rhs.coeff(i));
        }
        Poly::new(out)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - rhs.coeff(i));
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Poly::new(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if i == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
