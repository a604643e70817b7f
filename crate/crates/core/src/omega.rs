//! The series `omega(x) = prod_{j=1}^{beta-1} (1 - j x)^{-1/r}` and its
//! coefficient arithmetic.
//!
//! Provides:
//! * [`binom_coeff`]: the generalized binomial C(-1/r, k), by the ratio
//!   recurrence `C(-1/r, k+1) = -C(-1/r, k) (rk + 1) / (r(k + 1))`.
//! * [`binom_denominator_bound`]: `r^k prod_{p | r} p^floor(k/(p-1))`, an
//!   integer every C(-1/r, k) denominator divides.
//! * [`omega_series`]: the truncated product series, built factor by factor.
//! * [`omega_coeff_checks`]: per-coefficient denominator and size bounds
//!   (`denom | r^(2l)`, `|b_l| <= 2^beta (2 beta)^l`).
//! * [`omega_eval_ball`]: certified evaluation at a rational point inside the
//!   domain (all factors positive), one integer root per factor.

use crate::ball::Ball;
use crate::num::{int_pow, prime_factors_u64, rat_pow, Int, Rat};
use crate::series::Series;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OmegaError {
    #[error("factor 1 - {j} x is nonpositive at the evaluation point")]
    OutOfDomain { j: u32 },
    #[error("coefficient bound fails at index {ell}: {value}")]
    LemmaViolation { ell: usize, value: String },
}

/// Parameters of one omega factor family: root order r >= 2 and cutoff beta.
/// beta = 1 is the empty product, identically 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OmegaSpec {
    pub r: u32,
    pub beta: u32,
}

impl OmegaSpec {
    pub fn new(r: u32, beta: u32) -> Self {
        assert!(r >= 2, "root order must be at least 2");
        assert!(beta >= 1);
        OmegaSpec { r, beta }
    }

    /// Largest rational alpha is still outside the domain at; the domain is
    /// alpha < 1/(beta - 1) (everything, when beta = 1).
    pub fn domain_ok(&self, alpha: &Rat) -> bool {
        (1..self.beta).all(|j| (Rat::one() - alpha * Rat::from_integer(Int::from(j))).is_positive())
    }
}

/// C(-1/r, k), exact.
pub fn binom_coeff(r: u32, k: usize) -> Rat {
    assert!(r >= 1);
    let mut c = Rat::one();
    let r_int = Int::from(r);
    for i in 0..k {
        let num = -(&r_int * Int::from(i) + Int::one());
        let den = &r_int * Int::from(i + 1);
        c = c * Rat::new(num, den);
    }
    c
}

/// Integer multiple of every denominator of C(-1/r, k).
pub fn binom_denominator_bound(r: u32, k: usize) -> Int {
    let mut bound = int_pow(&Int::from(r), k as u64);
    for p in prime_factors_u64(r as u64) {
        bound *= int_pow(&Int::from(p), (k as u64) / (p - 1));
    }
    bound
}

/// Coefficients of `(1 - j x)^(-1/r)` through x^len.
fn factor_series(r: u32, j: u32, len: usize) -> Series {
    let mut coeffs = Vec::with_capacity(len + 1);
    let mut c = Rat::one();
    let (r_int, j_int) = (Int::from(r), Int::from(j));
    for k in 0..=len {
        coeffs.push(c.clone());
        if k < len {
            // ratio of consecutive coefficients: j (rk + 1) / (r (k + 1))
            let num = &j_int * (&r_int * Int::from(k) + Int::one());
            let den = &r_int * Int::from(k + 1);
            c = c * Rat::new(num, den);
        }
    }
    Series::new(coeffs, len)
}

/// The truncated series of `prod_{j < beta} (1 - j x)^(-1/r)`.
pub fn omega_series(spec: OmegaSpec, len: usize) -> Series {
    let mut acc = Series::one(len);
    for j in 1..spec.beta {
        acc = (&acc * &factor_series(spec.r, j, len)).truncate(len);
    }
    acc
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaCoeffCheck {
    pub ell: usize,
    pub coeff: String,
    pub denom_divides: bool,
    pub size_ok: bool,
}

impl OmegaCoeffCheck {
    pub fn pass(&self) -> bool {
        self.denom_divides && self.size_ok
    }
}

/// Check `denom(b_l) | r^(2l)` and `|b_l| <= 2^beta (2 beta)^l` for l <= len.
pub fn omega_coeff_checks(spec: OmegaSpec, len: usize) -> Vec<OmegaCoeffCheck> {
    let series = omega_series(spec, len);
    let r2 = Int::from(spec.r) * Int::from(spec.r);
    let two_beta = Rat::from_integer(Int::from(2 * spec.beta));
    let lead = rat_pow(&Rat::from_integer(Int::from(2)), spec.beta as u64);
    let mut bound = lead;
    let mut r2l = Int::one();
    let mut out = Vec::with_capacity(len + 1);
    for ell in 0..=len {
        let b = series.coeff(ell);
        out.push(OmegaCoeffCheck {
            ell,
            coeff: b.to_string(),
            denom_divides: r2l.is_multiple_of(b.denom()),
            size_ok: b.abs() <= bound,
        });
        bound = &bound * &two_beta;
        r2l = r2l * &r2;
    }
    out
}

/// First failing coefficient check as an error, if any.
pub fn coeff_checks_result(checks: &[OmegaCoeffCheck]) -> Result<(), OmegaError> {
    match checks.iter().find(|c| !c.pass()) {
        None => Ok(()),
        Some(c) => Err(OmegaError::LemmaViolation {
            ell: c.ell,
            value: c.coeff.clone(),
        }),
    }
}

/// Certified value of the full (untruncated) product at alpha.
pub fn omega_eval_ball(spec: OmegaSpec, alpha: &Rat, prec: u64) -> Result<Ball, OmegaError> {
    // Headroom for beta - 1 multiplications on top of the root enclosures.
    let wp = prec + 8 + (64 - u64::from(spec.beta).leading_zeros()) as u64;
    let mut acc = Ball::from_int(Int::one());
    for j in 1..spec.beta {
        let factor = Rat::one() - alpha * Rat::from_integer(Int::from(j));
        if !factor.is_positive() {
            return Err(OmegaError::OutOfDomain { j });
        }
        // (1 - j alpha)^(-1/r) = (1 / (1 - j alpha))^(1/r), one floor root.
        let root = Ball::nth_root_rat(&factor.recip(), spec.r, wp);
        acc = acc.mul(&root, wp);
    }
    Ok(acc)
}

/// Exact rational tail bound for the truncated omega series at alpha:
/// `sum_{v > len} |b_v| |alpha|^v <= 2^beta (2 beta |alpha|)^(len+1) / (1 - 2 beta |alpha|)`.
/// Requires `2 beta |alpha| < 1`.
pub fn omega_tail_bound(spec: OmegaSpec, alpha: &Rat, len: usize) -> Option<Rat> {
    let q = Rat::from_integer(Int::from(2 * spec.beta)) * alpha.abs();
    if q >= Rat::one() {
        return None;
    }
    let lead = rat_pow(&Rat::from_integer(Int::from(2)), spec.beta as u64);
    Some(lead * rat_pow(&q, len as u64 + 1) / (Rat::one() - q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rat, rat_int};

    #[test]
    fn binom_small_values() {
        assert_eq!(binom_coeff(2, 0), rat_int(1));
        assert_eq!(binom_coeff(2, 1), rat(-1, 2));
        assert_eq!(binom_coeff(2, 2), rat(3, 8));
        assert_eq!(binom_coeff(3, 1), rat(-1, 3));
    }

    #[test]
    fn binom_matches_falling_factorial_oracle() {
        // C(a, k) = a(a-1)...(a-k+1)/k! with a = -1/r, assembled directly.
        for r in [2u32, 3, 5, 7] {
            let a = rat(-1, r as i64);
            let mut oracle = Rat::one();
            for k in 0..40usize {
                assert_eq!(binom_coeff(r, k), oracle, "r={r} k={k}");
                oracle = oracle * (&a - rat_int(k as i64)) / rat_int(k as i64 + 1);
            }
        }
    }

    #[test]
    fn binom_magnitude_never_exceeds_one() {
        for r in [2u32, 3, 10] {
            for k in 0..200 {
                assert!(binom_coeff(r, k).abs() <= Rat::one());
            }
        }
    }

    #[test]
    fn denominator_bound_examples_and_divisibility() {
        assert_eq!(binom_denominator_bound(2, 2), int(16));
        assert_eq!(binom_denominator_bound(6, 3), int(5184));
        for r in 2..=10u32 {
            for k in 0..=60usize {
                let c = binom_coeff(r, k);
                let b = binom_denominator_bound(r, k);
                assert!(
                    b.is_multiple_of(c.denom()),
                    "r={r} k={k}: {} does not divide {}",
                    c.denom(),
                    b
                );
            }
        }
    }

    #[test]
    fn series_prefixes() {
        let w = omega_series(OmegaSpec::new(2, 2), 2);
        assert_eq!(w.coeffs(), &[rat_int(1), rat(1, 2), rat(3, 8)]);
        let w = omega_series(OmegaSpec::new(2, 3), 1);
        assert_eq!(w.coeff(1), &rat(3, 2));
        let trivial = omega_series(OmegaSpec::new(5, 1), 4);
        assert_eq!(trivial, Series::one(4));
    }

    #[test]
    fn rth_power_collapses_to_geometric_product() {
        // omega^r must match prod_j 1/(1 - j x), which has exact coefficients
        // sum over compositions; built here independently from geometric series.
        for (r, beta, len) in [(2u32, 4u32, 24usize), (3, 3, 18), (5, 2, 30)] {
            let spec = OmegaSpec::new(r, beta);
            let w = omega_series(spec, len);
            let mut wr = Series::one(len);
            for _ in 0..r {
                wr = (&wr * &w).truncate(len);
            }
            let mut geo = Series::one(len);
            for j in 1..beta {
                let g = Series::new(
                    (0..=len)
                        .map(|k| Rat::from_integer(int_pow(&Int::from(j), k as u64)))
                        .collect(),
                    len,
                );
                geo = (&geo * &g).truncate(len);
            }
            assert_eq!(wr, geo, "r={r} beta={beta}");
        }
    }

    #[test]
    fn coefficient_checks_pass_on_valid_specs() {
        for (r, beta) in [(2u32, 4u32), (3, 6), (5, 8)] {
            let checks = omega_coeff_checks(OmegaSpec::new(r, beta), 40);
            assert!(coeff_checks_result(&checks).is_ok());
        }
    }

    #[test]
    fn eval_exact_dyadic_point() {
        // beta = 2 at alpha = 3/4: (1/4)^(-1/2) = 2 exactly.
        let b = omega_eval_ball(OmegaSpec::new(2, 2), &rat(3, 4), 64).unwrap();
        assert!(b.radius().is_zero());
        assert!(b.contains_rat(&rat_int(2)));
    }

    #[test]
    fn eval_matches_reference_root() {
        // beta = 3 at alpha = 1/4: ((3/4)(1/2))^(-1/2) = sqrt(8/3).
        let b = omega_eval_ball(OmegaSpec::new(2, 3), &rat(1, 4), 192).unwrap();
        let reference = Ball::nth_root_rat(&rat(8, 3), 2, 256);
        assert!(b.lower_rat() <= reference.upper_rat());
        assert!(reference.lower_rat() <= b.upper_rat());
        assert!(b.upper_rat() - b.lower_rat() < rat(1, 1_000_000_000));
    }

    #[test]
    fn eval_rejects_poles_and_beyond() {
        let err = omega_eval_ball(OmegaSpec::new(2, 4), &rat(1, 2), 64).unwrap_err();
        assert_eq!(err, OmegaError::OutOfDomain { j: 2 });
        let err = omega_eval_ball(OmegaSpec::new(2, 2), &rat_int(1), 64).unwrap_err();
        assert_eq!(err, OmegaError::OutOfDomain { j: 1 });
        // Negative alpha keeps every factor positive.
        assert!(omega_eval_ball(OmegaSpec::new(2, 5), &rat(-3, 2), 64).is_ok());
    }

    #[test]
    fn truncated_series_ball_overlaps_product_ball() {
        let spec = OmegaSpec::new(2, 3);
        let alpha = rat(1, 100);
        let series = omega_series(spec, 40);
        let tail = omega_tail_bound(spec, &alpha, 40).unwrap();
        let via_series = Ball::eval_series(&series, &alpha, 192, &tail);
        let via_product = omega_eval_ball(spec, &alpha, 192).unwrap();
        assert!(via_series.lower_rat() <= via_product.upper_rat());
        assert!(via_product.lower_rat() <= via_series.upper_rat());
    }

    #[test]
    fn eval_ball_is_impl_independent_of_series_route() {
        // (1 - x)^(-1/2) at 1/100 contains sqrt(100/99).
        let spec = OmegaSpec::new(2, 2);
        let series = omega_series(spec, 60);
        let alpha = rat(1, 100);
        let tail = rat(1, 100).pow(61) / rat(99, 100);
        let b = Ball::eval_series(&series, &alpha, 192, &tail);
        let reference = Ball::nth_root_rat(&rat(100, 99), 2, 256);
        assert!(b.encloses(&reference));
    }
}
