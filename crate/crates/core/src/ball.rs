//! Midpoint-radius enclosures over dyadic floats.
//!
//! A [`Ball`] certifies `|true - center| <= radius`. Operations take a working
//! precision in bits; centers are rounded to that precision and every rounding
//! error is folded into the radius, so the enclosure property is preserved
//! unconditionally. Since centers and radii are dyadic, the endpoints are
//! exact rationals and all containment or ordering decisions reduce to exact
//! rational comparisons.
//!
//! Provided here beyond the ring operations:
//! * [`Ball::nth_root_rat`]: certified k-th root of a positive rational via
//!   integer floor roots.
//! * [`Ball::ln_rat`] / [`Ball::ln`]: certified natural log (atanh series with
//!   explicit geometric tail), with a process-wide ln 2 cache.
//! * interval division and one-shot certified comparisons.

use crate::bigfloat::BigFloat;
use crate::num::{floor_log2_rat, int_nth_root, int_pow, Int, Rat};
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

/// Mantissa bits kept for radii; anything longer is rounded up.
const RADIUS_BITS: u64 = 40;
/// Guard bits added to the working precision inside ln and the roots.
const GUARD: u64 = 16;

#[derive(Clone, Debug)]
pub struct Ball {
    center: BigFloat,
    radius: BigFloat,
}

/// Round a nonnegative magnitude up to RADIUS_BITS mantissa bits.
fn round_up_mag(v: &BigFloat) -> BigFloat {
    debug_assert!(!v.is_negative());
    let bits = v.mantissa_bits();
    if bits <= RADIUS_BITS {
        return v.clone();
    }
    let (r, err) = v.round_to(RADIUS_BITS);
    r.add(&err).add(&err)
}

impl Ball {
    pub fn exact(center: BigFloat) -> Self {
        Ball { center, radius: BigFloat::zero() }
    }

    pub fn zero() -> Self {
        Ball::exact(BigFloat::zero())
    }

    pub fn from_int(v: Int) -> Self {
        Ball::exact(BigFloat::from_int(v))
    }

    pub fn from_rat(q: &Rat, prec: u64) -> Self {
        let (c, err) = BigFloat::from_rat(q, prec);
        Ball { center: c, radius: err }
    }

    /// Any ball covering [lo, hi].
    pub fn from_bounds_rat(lo: &Rat, hi: &Rat, prec: u64) -> Self {
        assert!(lo <= hi);
        let two = Rat::from_integer(Int::from(2));
        let mid = (lo + hi) / &two;
        let half = (hi - lo) / two;
        let (c, cerr) = BigFloat::from_rat(&mid, prec);
        let (r, rerr) = BigFloat::from_rat(&half, RADIUS_BITS);
        let radius = round_up_mag(&r.abs().add(&rerr).add(&cerr));
        Ball { center: c, radius }
    }

    pub fn center(&self) -> &BigFloat {
        &self.center
    }

    pub fn radius(&self) -> &BigFloat {
        &self.radius
    }

    pub fn upper(&self) -> BigFloat {
        self.center.add(&self.radius)
    }

    pub fn lower(&self) -> BigFloat {
        self.center.sub(&self.radius)
    }

    pub fn upper_rat(&self) -> Rat {
        self.upper().to_rat()
    }

    pub fn lower_rat(&self) -> Rat {
        self.lower().to_rat()
    }

    pub fn contains_rat(&self, q: &Rat) -> bool {
        &self.lower_rat() <= q && q <= &self.upper_rat()
    }

    pub fn contains_zero(&self) -> bool {
        self.contains_rat(&Rat::zero())
    }

    /// The other enclosure lies entirely inside this one.
    pub fn encloses(&self, other: &Ball) -> bool {
        self.lower_rat() <= other.lower_rat() && other.upper_rat() <= self.upper_rat()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.lower().is_positive()
    }

    pub fn neg(&self) -> Ball {
        Ball { center: self.center.neg(), radius: self.radius.clone() }
    }

    /// Enclosure of |value|.
    pub fn abs(&self) -> Ball {
        if !self.contains_zero() {
            return Ball {
                center: self.center.abs(),
                radius: self.radius.clone(),
            };
        }
        // Straddles zero: |value| lies in [0, max(|lo|, |hi|)].
        let hi = self.upper().abs().max(self.lower().abs());
        let half = hi.shl(-1);
        Ball { center: half.clone(), radius: round_up_mag(&half) }
    }

    pub fn scale_pow2(&self, k: i64) -> Ball {
        Ball { center: self.center.shl(k), radius: self.radius.shl(k) }
    }

    pub fn add(&self, rhs: &Ball, prec: u64) -> Ball {
        // Far-apart magnitudes: absorb the small side into the radius instead
        // of materializing a huge aligned mantissa.
        let (big, small) = if self.center.mag_exp() >= rhs.center.mag_exp() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let gap = big.center.mag_exp() as i128 - small.center.mag_exp() as i128;
        if !small.center.is_zero() && gap > (prec + 80) as i128 {
            let extra = BigFloat::pow2(small.center.mag_exp());
            let radius = round_up_mag(
                &big.radius.add(&small.radius).add(&extra),
            );
            return Ball { center: big.center.clone(), radius };
        }
        let (c, err) = self.center.add(&rhs.center).round_to(prec);
        let radius = round_up_mag(&self.radius.add(&rhs.radius).add(&err));
        Ball { center: c, radius }
    }

    pub fn sub(&self, rhs: &Ball, prec: u64) -> Ball {
        self.add(&rhs.neg(), prec)
    }

    pub fn mul(&self, rhs: &Ball, prec: u64) -> Ball {
        let (c, err) = self.center.mul(&rhs.center).round_to(prec);
        let cross = self
            .center
            .abs()
            .mul(&rhs.radius)
            .add(&rhs.center.abs().mul(&self.radius))
            .add(&self.radius.mul(&rhs.radius));
        let radius = round_up_mag(&cross.add(&err));
        Ball { center: c, radius }
    }

    pub fn mul_rat(&self, q: &Rat, prec: u64) -> Ball {
        self.mul(&Ball::from_rat(q, prec), prec)
    }

    pub fn mul_int(&self, v: &Int) -> Ball {
        let f = BigFloat::from_int(v.clone());
        Ball {
            center: self.center.mul(&f),
            radius: round_up_mag(&self.radius.mul(&f.abs())),
        }
    }

    /// Interval quotient; None when the divisor encloses zero.
    pub fn div(&self, rhs: &Ball, prec: u64) -> Option<Ball> {
        let (dlo, dhi) = (rhs.lower_rat(), rhs.upper_rat());
        if dlo.is_positive() == dhi.is_positive() && !dlo.is_zero() && !dhi.is_zero() {
            let (nlo, nhi) = (self.lower_rat(), self.upper_rat());
            let mut qs = [&nlo / &dlo, &nlo / &dhi, &nhi / &dlo, &nhi / &dhi];
            qs.sort();
            Some(Ball::from_bounds_rat(&qs[0].clone(), &qs[3].clone(), prec))
        } else {
            None
        }
    }

    /// Certified q^(1/n) for rational q > 0, via one integer floor root.
    /// Exact (zero radius) whenever the root is dyadic at this precision.
    pub fn nth_root_rat(q: &Rat, n: u32, prec: u64) -> Ball {
        assert!(q.is_positive(), "root of a nonpositive value");
        assert!(n >= 1);
        let shift = (n as u64) * (prec + GUARD);
        let scaled: Int = (q.numer() << shift as usize) / q.denom();
        let u = int_nth_root(&scaled, n).expect("nonnegative");
        let e = -((prec + GUARD) as i64);
        // u * 2^e <= q^(1/n) < (u+1) * 2^e, with equality on the left iff
        // u^n * denom == numer << shift.
        if &int_pow(&u, n as u64) * q.denom() == q.numer() << shift as usize {
            return Ball::exact(BigFloat::new(u, e));
        }
        let center = BigFloat::new((&u << 1usize) + Int::one(), e - 1);
        Ball { center, radius: BigFloat::pow2(e - 1) }
    }

    /// Certified ln q for rational q > 0.
    pub fn ln_rat(q: &Rat, prec: u64) -> Ball {
        assert!(q.is_positive(), "log of a nonpositive value");
        let wp = prec + GUARD;
        let e = floor_log2_rat(q);
        let q_red = q * crate::num::pow2_rat(-e);
        debug_assert!(q_red >= Rat::one() && q_red < Rat::from_integer(Int::from(2)));
        let mut acc = Ball::zero();
        if !q_red.is_one() {
            let z = (&q_red - Rat::one()) / (&q_red + Rat::one());
            acc = atanh_series(&z, wp).scale_pow2(1);
        }
        if e != 0 {
            acc = acc.add(&ln2(wp).mul_int(&Int::from(e)), wp);
        }
        acc
    }

    /// Certified ln of an enclosure with strictly positive lower bound.
    pub fn ln(&self, prec: u64) -> Option<Ball> {
        let lo = self.lower_rat();
        if !lo.is_positive() {
            return None;
        }
        let hi = self.upper_rat();
        let a = Ball::ln_rat(&lo, prec);
        let b = Ball::ln_rat(&hi, prec);
        Some(Ball::from_bounds_rat(&a.lower_rat(), &b.upper_rat(), prec))
    }

    /// Enclosure of a series value at alpha: the known partial sum is summed
    /// exactly, rounded once, and `tail_bound` must dominate the dropped tail
    /// `|sum_{v > order} c_v alpha^v|`. The caller owns that bound; it is the
    /// only unchecked input in this file.
    pub fn eval_series(s: &crate::series::Series, alpha: &Rat, prec: u64, tail_bound: &Rat) -> Ball {
        assert!(!tail_bound.is_negative());
        let exact = s.partial_sum_at(alpha);
        let (c, err) = BigFloat::from_rat(&exact, prec);
        let (t, terr) = BigFloat::from_rat(tail_bound, RADIUS_BITS);
        Ball {
            center: c,
            radius: round_up_mag(&err.add(&t).add(&terr)),
        }
    }

    /// Some(true) if every point of self is <= every point of rhs; Some(false)
    /// if every point is >; None when the enclosures overlap.
    pub fn certified_le(&self, rhs: &Ball) -> Option<bool> {
        if self.upper() <= rhs.lower() {
            Some(true)
        } else if self.lower() > rhs.upper() {
            Some(false)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.center.to_f64()
    }
}

/// atanh(z) = sum z^(2j+1)/(2j+1) for |z| <= 1/2, as a certified ball.
fn atanh_series(z: &Rat, wp: u64) -> Ball {
    assert!(z.abs() <= Rat::new(Int::one(), Int::from(2)));
    let zb = Ball::from_rat(z, wp);
    let zsq = zb.mul(&zb, wp);
    let mut power = zb.clone();
    let mut acc = Ball::zero();
    let mut j = 0u64;
    let cutoff = BigFloat::pow2(-(wp as i64));
    loop {
        let term = power.mul_rat(&Rat::new(Int::one(), Int::from(2 * j + 1)), wp);
        acc = acc.add(&term, wp);
        power = power.mul(&zsq, wp);
        j += 1;
        // Tail after j terms: |z|^(2j+1)/((2j+1)(1-z^2)) <= 2 |power|_hi.
        let tail = power.upper().abs().max(power.lower().abs());
        if tail < cutoff {
            let bound = round_up_mag(&tail.shl(1));
            return Ball {
                center: acc.center.clone(),
                radius: round_up_mag(&acc.radius.add(&bound)),
            };
        }
        assert!(j < 4 * wp + 64, "atanh series failed to converge");
    }
}

/// Process-wide cache of ln 2 enclosures keyed by working precision.
pub fn ln2(prec: u64) -> Ball {
    static CACHE: OnceLock<Mutex<HashMap<u64, Ball>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = cache.lock().unwrap().get(&prec) {
        return b.clone();
    }
    // ln 2 = 2 atanh(1/3).
    let b = atanh_series(&Rat::new(Int::one(), Int::from(3)), prec).scale_pow2(1);
    cache.lock().unwrap().insert(prec, b.clone());
    b
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e} +/- {:e}]", self.center.to_f64(), self.radius.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rat, rat_int};

    fn assert_tight(b: &Ball, lo: (i64, i64), hi: (i64, i64)) {
        // Checks lo < value-interval < hi for rational brackets.
        assert!(b.lower_rat() > rat(lo.0, lo.1), "lower {}", b.lower_rat());
        assert!(b.upper_rat() < rat(hi.0, hi.1), "upper {}", b.upper_rat());
    }

    #[test]
    fn ring_ops_preserve_enclosures() {
        let a = Ball::from_rat(&rat(1, 3), 64);
        let b = Ball::from_rat(&rat(1, 7), 64);
        let s = a.add(&b, 64);
        assert!(s.contains_rat(&rat(10, 21)));
        let p = a.mul(&b, 64);
        assert!(p.contains_rat(&rat(1, 21)));
        let d = a.sub(&b, 64);
        assert!(d.contains_rat(&rat(4, 21)));
    }

    #[test]
    fn far_apart_addition_stays_sound() {
        let big = Ball::from_int(int(1));
        let tiny = Ball::exact(BigFloat::pow2(-5000));
        let s = big.add(&tiny, 64);
        let true_val = Rat::one() + crate::num::pow2_rat(-5000);
        assert!(s.contains_rat(&true_val));
    }

    #[test]
    fn roots_bracket() {
        let r = Ball::nth_root_rat(&rat_int(2), 2, 128);
        // sqrt(2) = 1.41421356237309504880...
        assert_tight(
            &r,
            (141_421_356_237, 100_000_000_000),
            (141_421_356_238, 100_000_000_000),
        );
        // Dyadic root comes back exact.
        let exact = Ball::nth_root_rat(&rat(9, 4), 2, 64);
        assert!(exact.radius().is_zero());
        assert_eq!(exact.center().to_rat(), rat(3, 2));
        // Inverse-fourth-root enclosure still contains the true value.
        let q = rat(16, 81);
        let b = Ball::nth_root_rat(&q, 4, 64);
        assert!(b.contains_rat(&rat(2, 3)));
    }

    #[test]
    fn ln_values() {
        let l1 = Ball::ln_rat(&rat_int(1), 64);
        assert!(l1.contains_rat(&rat_int(0)));
        assert!(l1.upper_rat() < rat(1, 1_000_000));

        let l2 = ln2(128);
        // ln 2 = 0.69314718055994530941...
        assert_tight(
            &l2,
            (693_147_180_559, 1_000_000_000_000),
            (693_147_180_560, 1_000_000_000_000),
        );

        let l4 = Ball::ln_rat(&rat_int(4), 128);
        let twice = ln2(128).scale_pow2(1);
        // Same value, independent paths: enclosures must overlap tightly.
        assert!(l4.lower_rat() <= twice.upper_rat());
        assert!(twice.lower_rat() <= l4.upper_rat());

        let l10 = Ball::ln_rat(&rat_int(10), 128);
        // ln 10 = 2.30258509299404568402...
        assert_tight(
            &l10,
            (230_258_509_299, 100_000_000_000),
            (230_258_509_300, 100_000_000_000),
        );
        let linv = Ball::ln_rat(&rat(1, 10), 128);
        assert!(linv.add(&l10, 128).contains_rat(&rat_int(0)));
    }

    #[test]
    fn division_is_interval_sound() {
        let num = Ball::from_bounds_rat(&rat_int(1), &rat_int(2), 64);
        let den = Ball::from_bounds_rat(&rat_int(3), &rat_int(4), 64);
        let q = num.div(&den, 64).unwrap();
        assert!(q.contains_rat(&rat(1, 4)));
        assert!(q.contains_rat(&rat(2, 3)));
        assert!(!q.contains_rat(&rat(9, 10)));
        let zero_span = Ball::from_bounds_rat(&rat_int(-1), &rat_int(1), 64);
        assert!(num.div(&zero_span, 64).is_none());
    }

    #[test]
    fn comparisons_certify_or_abstain() {
        let a = Ball::from_rat(&rat(1, 3), 64);
        let b = Ball::from_rat(&rat(1, 2), 64);
        assert_eq!(a.certified_le(&b), Some(true));
        assert_eq!(b.certified_le(&a), Some(false));
        let wide = Ball::from_bounds_rat(&rat_int(0), &rat_int(1), 64);
        assert_eq!(wide.certified_le(&a), None);
    }

    #[test]
    fn abs_handles_straddles() {
        let s = Ball::from_bounds_rat(&rat(-1, 4), &rat(1, 2), 64);
        let a = s.abs();
        assert!(a.contains_rat(&rat_int(0)));
        assert!(a.contains_rat(&rat(1, 2)));
        assert!(!a.lower_rat().is_positive());
    }

    #[test]
    fn series_evaluation_with_tail() {
        use crate::poly::Poly;
        use crate::series::Series;

        // Geometric series truncated at 50, evaluated at 1/10; tail is exact.
        let geo = Series::new(vec![rat_int(1); 51], 50);
        let tail = rat(1, 10).pow(51) / rat(9, 10);
        let b = Ball::eval_series(&geo, &rat(1, 10), 128, &tail);
        assert!(b.contains_rat(&rat(10, 9)));

        // Exact polynomial: zero tail, exact value.
        let p = Series::from_poly(&Poly::from_int_coeffs(&[2, -6, 4]), 8);
        let b = Ball::eval_series(&p, &rat(1, 3), 128, &Rat::zero());
        assert!(b.contains_rat(&rat(4, 9)));
    }

    #[test]
    fn ln_of_ball_brackets_endpoint_logs() {
        let b = Ball::from_bounds_rat(&rat_int(2), &rat_int(4), 96);
        let l = b.ln(96).unwrap();
        assert!(l.contains_rat(&rat(7, 10))); // ln 2 = 0.693...
        assert!(l.contains_rat(&rat(138, 100))); // ln 4 = 1.386...
        let bad = Ball::from_bounds_rat(&rat_int(-1), &rat_int(1), 96);
        assert!(bad.ln(96).is_none());
    }
}
