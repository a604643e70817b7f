//! Integer solution search for equations `s·n! = P(x)`.
//!
//! Provides:
//! * [`Equation`]: an integer polynomial of degree >= 2 with a nonzero scale.
//! * [`depress`]: the substitution removing the next-to-leading coefficient,
//!   with its defining identity verified symbolically.
//! * [`integer_preimages`]: all x >= 0 with P(x) = value, by exhaustive check
//!   below the dominance threshold and a certified root window above it.
//! * [`scan`]: chunk-parallel sweep over n with an incremental factorial
//!   stream, deterministic output.
//! * [`simul_approx_witness`]: the rational simultaneous approximation
//!   extracted from a verified solution triple, with its measured exponent.

use crate::ball::Ball;
use crate::num::{factorial, int_nth_root, int_pow, is_prime_u64, Int, Rat};
use crate::omega::{omega_eval_ball, OmegaSpec};
use crate::poly::Poly;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScanError {
    #[error("polynomial degree must be at least 2")]
    DegreeTooLow,
    #[error("polynomial coefficients must be integers")]
    NonIntegerCoefficients,
    #[error("scale must be nonzero")]
    ZeroScale,
    #[error("witness precondition failed: {0}")]
    PreconditionFailed(&'static str),
    #[error("equation {0} does not hold exactly")]
    NotASolutionTriple(&'static str),
    #[error("shift {0} is not a multiple of the root order")]
    DegreeMismatch(u32),
}

/// One instance `s·n! = P(x)`: integer coefficients, degree >= 2, s != 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    p: Poly,
    s: Int,
    coeffs: Vec<Int>,
}

impl Equation {
    pub fn new(p: Poly, s: Int) -> Result<Equation, ScanError> {
        if s.is_zero() {
            return Err(ScanError::ZeroScale);
        }
        let coeffs = p.to_int_coeffs().ok_or(ScanError::NonIntegerCoefficients)?;
        if p.degree().unwrap_or(0) < 2 {
            return Err(ScanError::DegreeTooLow);
        }
        Ok(Equation { p, s, coeffs })
    }

    pub fn poly(&self) -> &Poly {
        &self.p
    }

    pub fn scale(&self) -> &Int {
        &self.s
    }

    pub fn coeffs(&self) -> &[Int] {
        &self.coeffs
    }

    pub fn degree(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    pub fn leading(&self) -> &Int {
        self.coeffs.last().unwrap()
    }
}

/// A verified hit: `P(x) = s·n! = value` exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub n: u64,
    pub x: Int,
    pub value: Int,
}

#[derive(Serialize)]
struct SolutionLine {
    n: u64,
    x: String,
    digits_of_value: usize,
}

impl Solution {
    /// One JSON object per line: `{"n":..,"x":"..","digits_of_value":..}`.
    pub fn json_line(&self) -> String {
        serde_json::to_string(&SolutionLine {
            n: self.n,
            x: self.x.to_string(),
            digits_of_value: self.value.abs().to_string().len(),
        })
        .expect("plain fields always serialize")
    }
}

/// Depressed form of an equation: `st·n! = R(y)` under `y = ra_r·x + a_{r-1}`,
/// where R has integer coefficients and none on `y^{r-1}`.
#[derive(Clone, Debug)]
pub struct Depressed {
    /// (R, s·t).
    pub eq: Equation,
    pub t: Int,
    /// (ra_r, a_{r-1}): the substitution is y = ra_r·x + a_{r-1}.
    pub substitution: (Int, Int),
}

/// Removes the next-to-leading coefficient. With c = r·a_r and t = c^{2r},
/// R(y) = Σ b_i c^{2r-i} y^i for Q(x) = P(x - a_{r-1}/c) = Σ b_i x^i; the
/// denominators of the b_i divide c^r, so R is integral, and
/// R(c·x + a_{r-1}) = t·P(x) identically.
pub fn depress(eq: &Equation) -> Depressed {
    let r = eq.degree() as usize;
    let c = Int::from(r as u32) * eq.leading();
    let a_sub = eq.coeffs[r - 1].clone();
    let shift = -Rat::new(a_sub.clone(), c.clone());
    let q = eq.p.compose_linear(&Rat::one(), &shift);
    assert!(q.coeff(r - 1).is_zero());

    let mut r_coeffs = Vec::with_capacity(r + 1);
    for i in 0..=r {
        let scaled = q.coeff(i) * Rat::from_integer(int_pow(&c, (2 * r - i) as u64));
        assert!(scaled.denom().is_one(), "depressed coefficients are integral");
        r_coeffs.push(scaled.to_integer());
    }
    let r_poly = Poly::from_big_coeffs(r_coeffs);
    let t = int_pow(&c, 2 * r as u64);

    let lhs = r_poly.compose_linear(
        &Rat::from_integer(c.clone()),
        &Rat::from_integer(a_sub.clone()),
    );
    let rhs = eq.p.scale(&Rat::from_integer(t.clone()));
    assert_eq!(lhs, rhs, "defining identity of the depressed form");

    let scale = &eq.s * &t;
    Depressed {
        eq: Equation::new(r_poly, scale).expect("depression preserves the invariants"),
        t,
        substitution: (c, a_sub),
    }
}

fn horner(coeffs: &[Int], x: &Int) -> Int {
    let mut acc = Int::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// All x >= 0 with P(x) = value, ascending and exact.
///
/// With positive leading coefficient and A = Σ_{i<r} |a_i|, every x beyond
/// x* = 1 + 2⌈A/a_r⌉ has |P(x) - a_r x^r| ≤ A x^{r-1} ≤ a_r x^r / 2, so any
/// such solution sits within A/a_r + 2 of the integer r-th root of
/// ⌊value/a_r⌋; below x* the check is exhaustive.
pub fn integer_preimages(eq: &Equation, value: &Int) -> Vec<Int> {
    let mut coeffs = eq.coeffs.clone();
    let mut v = value.clone();
    if coeffs.last().unwrap().is_negative() {
        for c in &mut coeffs {
            *c = -c.clone();
        }
        v = -v;
    }

    let r = coeffs.len() - 1;
    let ar = coeffs[r].clone();
    let tail: Int = coeffs[..r].iter().map(|c| c.abs()).sum();
    let xstar = Int::one() + Int::from(2u32) * tail.div_ceil(&ar);

    let mut out = Vec::new();
    let mut x = Int::zero();
    while x <= xstar {
        if horner(&coeffs, &x) == v {
            out.push(x.clone());
        }
        x += 1;
    }

    if v.is_positive() {
        let root = int_nth_root(&(&v / &ar), r as u32).expect("radicand is nonnegative");
        let w = &tail / &ar + Int::from(4u32);
        let lo = std::cmp::max(&xstar + Int::one(), &root - &w);
        let mut x = lo;
        let hi = root + w;
        while x <= hi {
            if horner(&coeffs, &x) == v {
                out.push(x.clone());
            }
            x += 1;
        }
    }
    out
}

/// Smallest x >= 0 with P(x) = value.
pub fn integer_preimage(eq: &Equation, value: &Int) -> Option<Int> {
    integer_preimages(eq, value).into_iter().next()
}

/// Scan tuning. The prefilter rejects n whose value is a certified quadratic
/// non-residue modulo a configured odd prime; it only skips impossible root
/// extractions, so results are identical with it on or off. Consulted only
/// when P has the shape x^2 + a_0.
#[derive(Clone, Debug, Default)]
pub struct ScanOptions {
    pub prefilter_primes: Vec<u64>,
}

const SCAN_CHUNK: u64 = 64;

/// All solutions of s·n! = P(x) with n in [n_lo, n_hi], ascending by n then
/// x. Each chunk recomputes its boundary factorial by product tree and
/// streams incrementally from there; every reported solution is re-verified
/// through the rational evaluator, independently of the search path.
pub fn scan(eq: &Equation, n_lo: u64, n_hi: u64) -> Vec<Solution> {
    scan_with_options(eq, n_lo, n_hi, &ScanOptions::default())
}

pub fn scan_with_options(
    eq: &Equation,
    n_lo: u64,
    n_hi: u64,
    options: &ScanOptions,
) -> Vec<Solution> {
    assert!(n_lo >= 1, "the stream starts at 1");
    if n_hi < n_lo {
        return Vec::new();
    }
    for &p in &options.prefilter_primes {
        assert!(p > 2 && is_prime_u64(p), "prefilter moduli must be odd primes");
    }
    let residue_shape = eq.degree() == 2 && eq.coeffs[1].is_zero() && eq.coeffs[2].is_one();
    let primes = if residue_shape { options.prefilter_primes.as_slice() } else { &[] };

    let chunks: Vec<(u64, u64)> = (n_lo..=n_hi)
        .step_by(SCAN_CHUNK as usize)
        .map(|a| (a, std::cmp::min(a + SCAN_CHUNK - 1, n_hi)))
        .collect();
    chunks
        .par_iter()
        .map(|&(a, b)| scan_chunk(eq, a, b, primes))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Rejects when x^2 = target is impossible modulo one of the primes.
fn residue_rejects(target: &Int, primes: &[u64]) -> bool {
    primes.iter().any(|&p| {
        let p_int = Int::from(p);
        let m = target.mod_floor(&p_int);
        !m.is_zero() && m.modpow(&Int::from((p - 1) / 2), &p_int) != Int::one()
    })
}

fn scan_chunk(eq: &Equation, a: u64, b: u64, primes: &[u64]) -> Vec<Solution> {
    let mut f = factorial(a - 1);
    let mut out = Vec::new();
    for n in a..=b {
        f *= Int::from(n);
        let value = &eq.s * &f;
        if !primes.is_empty() && residue_rejects(&(&value - &eq.coeffs[0]), primes) {
            continue;
        }
        for x in integer_preimages(eq, &value) {
            let check = eq.p.eval(&Rat::from_integer(x.clone()));
            assert_eq!(check, Rat::from_integer(value.clone()));
            out.push(Solution { n, x, value: value.clone() });
        }
    }
    out
}

/// Rational simultaneous approximation extracted from a solution triple: the
/// integers p_i = n^{β_i/r}·x_i approximate ω_i(1/n) with common denominator
/// x, and the measured exponent is -ln(ρ)/ln(x) for the worst error ρ.
#[derive(Clone, Debug)]
pub struct ApproxWitness {
    pub n: u64,
    pub betas: (u32, u32),
    pub x: Int,
    pub xs: (Int, Int),
    pub ps: (Int, Int),
    /// max_i |ω_i(1/n) - p_i/x|.
    pub rho: Ball,
    /// -ln(ρ)/ln(x).
    pub exponent: Ball,
}

fn ball_max(a: &Ball, b: &Ball, prec: u64) -> Ball {
    Ball::from_bounds_rat(
        &std::cmp::max(a.lower_rat(), b.lower_rat()),
        &std::cmp::max(a.upper_rat(), b.upper_rat()),
        prec,
    )
}

/// Verifies s·n! = P(x) and s·(n-β_i)! = P(x_i) exactly, then measures the
/// approximation quality of p_i/x. The polynomial must have no coefficient
/// on x^{r-1}, r must divide each β_i, and r ≤ β₁ < β₂ < n.
pub fn simul_approx_witness(
    eq: &Equation,
    n: u64,
    betas: (u32, u32),
    x: &Int,
    xs: (&Int, &Int),
    prec: u64,
) -> Result<ApproxWitness, ScanError> {
    let r = eq.degree();
    if !eq.coeffs[r as usize - 1].is_zero() {
        return Err(ScanError::PreconditionFailed(
            "the next-to-leading coefficient must vanish",
        ));
    }
    for beta in [betas.0, betas.1] {
        if beta % r != 0 {
            return Err(ScanError::DegreeMismatch(beta));
        }
    }
    if !(r <= betas.0 && betas.0 < betas.1 && u64::from(betas.1) < n) {
        return Err(ScanError::PreconditionFailed(
            "shifts must satisfy r <= beta1 < beta2 < n",
        ));
    }
    if x < &Int::from(2u32) || !xs.0.is_positive() || !xs.1.is_positive() {
        return Err(ScanError::PreconditionFailed(
            "solution coordinates must be positive with x at least 2",
        ));
    }

    let holds = |m: u64, y: &Int| {
        eq.p.eval(&Rat::from_integer(y.clone()))
            == Rat::from_integer(&eq.s * factorial(m))
    };
    if !holds(n, x) {
        return Err(ScanError::NotASolutionTriple("s*n! = P(x)"));
    }
    if !holds(n - u64::from(betas.0), xs.0) {
        return Err(ScanError::NotASolutionTriple("s*(n-beta1)! = P(x1)"));
    }
    if !holds(n - u64::from(betas.1), xs.1) {
        return Err(ScanError::NotASolutionTriple("s*(n-beta2)! = P(x2)"));
    }

    let n_int = Int::from(n);
    let p1 = int_pow(&n_int, u64::from(betas.0 / r)) * xs.0;
    let p2 = int_pow(&n_int, u64::from(betas.1 / r)) * xs.1;
    let alpha = Rat::new(Int::one(), n_int);

    // Enclose ρ, escalating until ln(ρ) separates from zero.
    let mut wp = prec;
    let (rho, rho_ln) = loop {
        let diff = |beta: u32, p: &Int| {
            let omega = omega_eval_ball(OmegaSpec::new(r, beta), &alpha, wp)
                .expect("beta2 < n keeps every factor positive");
            omega.sub(&Ball::from_rat(&Rat::new(p.clone(), x.clone()), wp), wp).abs()
        };
        let rho = ball_max(&diff(betas.0, &p1), &diff(betas.1, &p2), wp);
        if let Some(l) = rho.ln(wp) {
            break (rho, l);
        }
        wp *= 2;
        if wp > 1 << 14 {
            return Err(ScanError::PreconditionFailed(
                "approximation error indistinguishable from zero",
            ));
        }
    };
    let ln_x = Ball::ln_rat(&Rat::from_integer(x.clone()), wp);
    let exponent = rho_ln
        .neg()
        .div(&ln_x, wp)
        .expect("x >= 2 keeps ln x strictly positive");

    Ok(ApproxWitness {
        n,
        betas,
        x: x.clone(),
        xs: (xs.0.clone(), xs.1.clone()),
        ps: (p1, p2),
        rho,
        exponent,
    })
}
