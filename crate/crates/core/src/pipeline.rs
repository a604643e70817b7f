//! Assembly of the approximation pipeline: growth/decay parameters, the 3×3
//! rational matrix evaluated at 1/n₀, the four structural properties of that
//! matrix, and the exponent optimization.
//!
//! Two entry modes. Paper mode ([`compute_params`]) ties the product cutoff
//! to the sample magnitude via 𝓜 = ⌊N^θ⌋ and derives the degree D from a
//! log-factorial sum; its admissible region starts at magnitudes where that
//! sum has more terms than any machine can add, so in practice it is a gate
//! validator. Desk mode ([`desk_params`]) takes (𝓜, D, n₀, ε₀) as free
//! inputs; every structural property downstream is checked at full strength
//! either way.

use crate::ball::{self, Ball};
use crate::independence::{det3_rat, IndependenceCertificate};
use crate::num::{int_pow, is_integer, rat, Int, Rat};
use crate::omega::{omega_eval_ball, OmegaSpec};
use crate::operators::DerivedFamily;
use crate::pade::{remainder_series, PadeConfig, PadeTriple};
use crate::poly::Poly;
use crate::report::CheckSet;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

/// Hard ceiling for precision escalation in certified comparisons.
const PREC_CAP: u64 = 1 << 14;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PipelineError {
    #[error("theta {theta} exceeds the admissible cap {cap}")]
    ThetaTooLarge { theta: Rat, cap: Rat },
    #[error("floor undecidable: the enclosure straddles an integer at the precision ceiling")]
    FloorAmbiguous,
    #[error("degenerate parameters: {0}")]
    DegenerateParams(&'static str),
    #[error("property {property} fails: {lhs} vs {rhs}")]
    PropertyViolation {
        property: &'static str,
        lhs: String,
        rhs: String,
    },
}

/// A positive quantity kept as a certified enclosure of its natural log,
/// together with the closed form it was computed from.
#[derive(Clone, Debug)]
pub struct LogValue {
    pub ln: Ball,
    pub expr: &'static str,
}

pub(crate) struct ParamLogs {
    pub scale_const: Ball,
    pub scale_base: Ball,
    pub entry_const: Ball,
    pub entry_base: Ball,
    pub decay_const: Ball,
    pub decay_base: Ball,
}

/// ln of the six growth/decay quantities, all as exact-rational linear
/// combinations of logs of explicit positive rationals.
fn param_logs(n_mag: &Int, m_cap: u32, r: u32, eps0: &Rat, prec: u64) -> ParamLogs {
    let ln_of = |v: Int| Ball::ln_rat(&Rat::from_integer(v), prec);
    let rat_of = |v: Int| Rat::from_integer(v);

    let m = Int::from(m_cap);
    let m4 = rat_of(int_pow(&m, 4));
    let m5 = rat_of(int_pow(&m, 5));
    let m_over_eps = rat_of(m.clone()) / eps0;
    let two_minus = rat(2, 1) - eps0;
    let three_minus = rat(3, 1) - eps0;
    // (2−ε₀)(3−ε₀)/ε₀ and 2(3−ε₀)/ε₀.
    let entry_exp = &two_minus * &three_minus / eps0;
    let decay_exp = rat(2, 1) * &three_minus / eps0;

    let r4 = int_pow(&Int::from(r), 4);
    let ln_2rn = ln_of(Int::from(2 * r) * n_mag);
    let ln_4rn = ln_of(Int::from(4 * r) * n_mag);
    let ln_base_entry = ln_of(Int::from(4u32) * &r4 * &m);
    let ln_base_decay = ln_of(Int::from(16u32) * &r4 * &m);
    let ln_n = ln_of(n_mag.clone());

    ParamLogs {
        scale_const: ln_2rn.mul_rat(&m5, prec),
        scale_base: ln_of(Int::from(2) * n_mag),
        entry_const: ln_4rn
            .mul_rat(&m4, prec)
            .add(&ln_of(Int::from(10)).mul_rat(&m_over_eps, prec), prec),
        entry_base: ln_base_entry.mul_rat(&entry_exp, prec),
        decay_const: ln_2rn
            .mul_rat(&(&m4 + &m4), prec)
            .add(&ln_of(Int::from(4)).mul_rat(&m_over_eps, prec), prec),
        decay_base: ln_n
            .mul_rat(&three_minus, prec)
            .sub(&ln_base_decay.mul_rat(&decay_exp, prec), prec),
    }
}

/// Growth/decay parameters for one run.
#[derive(Clone, Debug)]
pub struct PipelineParams {
    /// Window anchor N; equal to the sample magnitude in desk mode.
    pub n_ref: Int,
    /// Sample magnitude 𝒩 ∈ [N, 2N); the evaluation point is 1/𝒩 in desk mode.
    pub n_mag: Int,
    /// Cutoff exponent; `None` in desk mode.
    pub theta: Option<Rat>,
    pub eps0: Rat,
    pub m_cap: u32,
    pub r: u32,
    pub s: Int,
    pub b_const: Int,
    pub d: u32,
    pub prec: u64,
    /// Z ≤ scale_const · scale_base^D.
    pub scale_const: LogValue,
    pub scale_base: LogValue,
    /// |p_{i,j}| ≤ entry_const · entry_base^D.
    pub entry_const: LogValue,
    pub entry_base: LogValue,
    /// |Σ_i p_{i,j} ω_i| ≤ decay_const · decay_base^{−D}.
    pub decay_const: LogValue,
    pub decay_base: LogValue,
}

impl PipelineParams {
    pub(crate) fn logs_at(&self, prec: u64) -> ParamLogs {
        param_logs(&self.n_mag, self.m_cap, self.r, &self.eps0, prec)
    }
}

fn assemble(
    n_ref: Int,
    n_mag: Int,
    theta: Option<Rat>,
    eps0: Rat,
    m_cap: u32,
    r: u32,
    s: Int,
    b_const: Int,
    d: u32,
    prec: u64,
) -> PipelineParams {
    let logs = param_logs(&n_mag, m_cap, r, &eps0, prec);
    PipelineParams {
        n_ref,
        n_mag,
        theta,
        eps0,
        m_cap,
        r,
        s,
        b_const,
        d,
        prec,
        scale_const: LogValue {
            ln: logs.scale_const,
            expr: "(2*r*n)^(m^5)",
        },
        scale_base: LogValue {
            ln: logs.scale_base,
            expr: "2*n",
        },
        entry_const: LogValue {
            ln: logs.entry_const,
            expr: "(4*r*n)^(m^4) * 10^(m/eps0)",
        },
        entry_base: LogValue {
            ln: logs.entry_base,
            expr: "(4*r^4*m)^((2-eps0)*(3-eps0)/eps0)",
        },
        decay_const: LogValue {
            ln: logs.decay_const,
            expr: "(2*r*n)^(2*m^4) * 4^(m/eps0)",
        },
        decay_base: LogValue {
            ln: logs.decay_base,
            expr: "n^(3-eps0) / (16*r^4*m)^(2*(3-eps0)/eps0)",
        },
    }
}

/// The threshold θ must stay below for the exponent gain to be positive:
/// ε₀(1−ε₀)/((3−ε₀)(4−ε₀)).
pub fn theta_threshold(eps0: &Rat) -> Rat {
    let num = eps0 * &(Rat::one() - eps0);
    let den = (rat(3, 1) - eps0) * (rat(4, 1) - eps0);
    num / den
}

/// ⌊n^θ⌋ by exact integer root extraction.
pub fn cutoff_from_theta(n_ref: &Int, theta: &Rat) -> Result<u32, PipelineError> {
    let p = theta
        .numer()
        .to_u32()
        .ok_or(PipelineError::DegenerateParams("theta numerator too large"))?;
    let q = theta
        .denom()
        .to_u32()
        .ok_or(PipelineError::DegenerateParams("theta denominator too large"))?;
    let root = crate::num::int_nth_root(&int_pow(n_ref, p as u64), q)
        .map_err(|_| PipelineError::DegenerateParams("cutoff root of a negative base"))?;
    root.to_u32()
        .ok_or(PipelineError::DegenerateParams("product cutoff exceeds u32"))
}

/// ⌊·⌋ of a certified enclosure, escalating precision until the enclosure
/// stops straddling an integer. `value` may decline a precision (e.g. an
/// inner division whose denominator still straddles zero).
pub fn certified_floor(
    prec0: u64,
    value: impl Fn(u64) -> Option<Ball>,
) -> Result<Int, PipelineError> {
    let mut prec = prec0.max(32);
    loop {
        if let Some(b) = value(prec) {
            let lo = b.lower_rat().floor().to_integer();
            let hi = b.upper_rat().floor().to_integer();
            if lo == hi {
                return Ok(lo);
            }
        }
        if prec >= PREC_CAP {
            return Err(PipelineError::FloorAmbiguous);
        }
        prec *= 2;
    }
}

/// Σ_{j≤k} ln j as one enclosure. Linear in k: this is exact bookkeeping,
/// not an asymptotic formula, and is only feasible for k a machine can
/// iterate through.
pub fn log_factorial(k: &Int, prec: u64) -> Ball {
    let mut acc = Ball::zero();
    let mut j = Int::from(2);
    while &j <= k {
        acc = acc.add(&Ball::ln_rat(&Rat::from_integer(j.clone()), prec), prec);
        j += 1;
    }
    acc
}

fn check_common(eps0: &Rat, r: u32, s: &Int, b_const: &Int) -> Result<(), PipelineError> {
    if r < 2 {
        return Err(PipelineError::DegenerateParams("root degree must be at least 2"));
    }
    if s.is_zero() {
        return Err(PipelineError::DegenerateParams("multiplier s must be nonzero"));
    }
    if b_const < &Int::one() {
        return Err(PipelineError::DegenerateParams("b constant must be positive"));
    }
    if eps0 < &rat(1, 100) || eps0 > &rat(99, 100) {
        return Err(PipelineError::DegenerateParams("eps0 must lie in [1/100, 99/100]"));
    }
    Ok(())
}

/// Paper-mode parameters: 𝓜 = ⌊N^θ⌋ and D derived from the log-factorial
/// formula. All gates are enforced; the θ slack `margin` is the caller's
/// choice. The success path requires summing ln over every integer up to
/// roughly 𝒩, so magnitudes past ~10⁹ validate gates but cannot finish.
#[allow(clippy::too_many_arguments)]
pub fn compute_params(
    n_ref: &Int,
    n_mag: &Int,
    theta: &Rat,
    eps0: &Rat,
    r: u32,
    s: &Int,
    b_const: &Int,
    margin: &Rat,
    prec: u64,
) -> Result<PipelineParams, PipelineError> {
    check_common(eps0, r, s, b_const)?;
    if theta < &rat(1, 1000) || theta > &rat(1, 20) {
        return Err(PipelineError::DegenerateParams("theta outside [1/1000, 1/20]"));
    }
    if margin <= &Rat::zero() {
        return Err(PipelineError::DegenerateParams("theta margin must be positive"));
    }
    let cap = theta_threshold(eps0) - margin;
    if theta > &cap {
        return Err(PipelineError::ThetaTooLarge {
            theta: theta.clone(),
            cap,
        });
    }
    if n_ref < &Int::from(2) {
        return Err(PipelineError::DegenerateParams("window anchor must be at least 2"));
    }
    if n_mag < n_ref || n_mag >= &(Int::from(2) * n_ref) {
        return Err(PipelineError::DegenerateParams("sample magnitude outside [N, 2N)"));
    }
    let m_cap = cutoff_from_theta(n_ref, theta)?;
    if m_cap < 2 * r {
        return Err(PipelineError::DegenerateParams(
            "product cutoff below 2r admits no index pair",
        ));
    }

    // The decay base must dominate the scale base before D means anything.
    let mut p = prec;
    loop {
        let logs = param_logs(n_mag, m_cap, r, eps0, p);
        let gap = logs.decay_base.sub(&logs.scale_base, p);
        if gap.is_strictly_positive() {
            break;
        }
        if gap.upper_rat() <= Rat::zero() {
            return Err(PipelineError::DegenerateParams(
                "decay base does not exceed scale base at this magnitude",
            ));
        }
        if p >= PREC_CAP {
            return Err(PipelineError::DegenerateParams(
                "decay/scale comparison undecidable at the precision ceiling",
            ));
        }
        p *= 2;
    }

    // K = 𝒩 + ⌊N / ln N⌋, then D = 1 + ⌊(ln b + ln c + ln w + ln(K!)/r) / ln(W/C)⌋.
    let n_ref_rat = Rat::from_integer(n_ref.clone());
    let window = certified_floor(prec, |p| {
        Ball::from_rat(&n_ref_rat, p).div(&Ball::ln_rat(&n_ref_rat, p), p)
    })?;
    let k_top = n_mag + &window;
    let ln_kfact = log_factorial(&k_top, prec + 64 + k_top.bits());
    let d_int = certified_floor(prec, |p| {
        let logs = param_logs(n_mag, m_cap, r, eps0, p);
        let top = Ball::ln_rat(&Rat::from_integer(b_const.clone()), p)
            .add(&logs.scale_const, p)
            .add(&logs.decay_const, p)
            .add(&ln_kfact.mul_rat(&rat(1, r as i64), p), p);
        logs.decay_base
            .sub(&logs.scale_base, p)
            .is_strictly_positive()
            .then(|| top.div(&logs.decay_base.sub(&logs.scale_base, p), p))
            .flatten()
    })?;
    let d = (d_int + Int::one())
        .to_u32()
        .ok_or(PipelineError::DegenerateParams("degree exceeds u32"))?;

    Ok(assemble(
        n_ref.clone(),
        n_mag.clone(),
        Some(theta.clone()),
        eps0.clone(),
        m_cap,
        r,
        s.clone(),
        b_const.clone(),
        d,
        prec,
    ))
}

/// Desk-mode parameters: (𝓜, D, n₀, ε₀) are free inputs and the sample
/// magnitude is the evaluation denominator itself.
#[allow(clippy::too_many_arguments)]
pub fn desk_params(
    n0: &Int,
    d: u32,
    m_cap: u32,
    eps0: &Rat,
    r: u32,
    s: &Int,
    b_const: &Int,
    prec: u64,
) -> Result<PipelineParams, PipelineError> {
    check_common(eps0, r, s, b_const)?;
    if m_cap < 2 * r {
        return Err(PipelineError::DegenerateParams(
            "product cutoff below 2r admits no index pair",
        ));
    }
    if d == 0 {
        return Err(PipelineError::DegenerateParams("degree must be positive"));
    }
    if n0 <= &Int::from(4 * m_cap) {
        return Err(PipelineError::DegenerateParams(
            "sample magnitude must exceed 4 times the cutoff",
        ));
    }
    Ok(assemble(
        n0.clone(),
        n0.clone(),
        None,
        eps0.clone(),
        m_cap,
        r,
        s.clone(),
        b_const.clone(),
        d,
        prec,
    ))
}

/// χ = ln(C·U)/ln(W/C) as a certified enclosure. Defined only where the
/// decay base dominates the scale base.
pub fn chi(params: &PipelineParams) -> Result<Ball, PipelineError> {
    let mut prec = params.prec;
    loop {
        let logs = params.logs_at(prec);
        let num = logs.scale_base.add(&logs.entry_base, prec);
        let den = logs.decay_base.sub(&logs.scale_base, prec);
        if den.upper_rat() <= Rat::zero() {
            return Err(PipelineError::DegenerateParams(
                "decay base does not exceed scale base at this magnitude",
            ));
        }
        if den.is_strictly_positive() {
            if let Some(q) = num.div(&den, prec) {
                return Ok(q);
            }
        }
        if prec >= PREC_CAP {
            return Err(PipelineError::DegenerateParams(
                "chi undecidable at the precision ceiling",
            ));
        }
        prec *= 2;
    }
}

/// Leading-order form of χ in the large-magnitude limit, exact in ℚ:
/// (1 + θ(2−ε₀)(3−ε₀)/ε₀) / (2 − ε₀ − 2θ(3−ε₀)/ε₀).
pub fn chi_leading(eps0: &Rat, theta: &Rat) -> Result<Rat, PipelineError> {
    let two_minus = rat(2, 1) - eps0;
    let three_minus = rat(3, 1) - eps0;
    let num = Rat::one() + theta * &(&two_minus * &three_minus / eps0);
    let den = two_minus - rat(2, 1) * theta * three_minus / eps0;
    if den <= Rat::zero() {
        return Err(PipelineError::DegenerateParams(
            "leading form denominator not positive",
        ));
    }
    Ok(num / den)
}

/// Ball version of [`chi_leading`] for irrational (ε₀, θ). None when ε₀
/// straddles zero or the denominator cannot be certified positive.
pub fn chi_leading_ball(eps0: &Ball, theta: &Ball, prec: u64) -> Option<Ball> {
    let one = Ball::from_int(Int::one());
    let two = Ball::from_int(Int::from(2));
    let three = Ball::from_int(Int::from(3));
    let two_minus = two.sub(eps0, prec);
    let three_minus = three.sub(eps0, prec);
    let slope = two_minus.mul(&three_minus, prec).div(eps0, prec)?;
    let num = one.add(&theta.mul(&slope, prec), prec);
    let den_drop = three_minus.scale_pow2(1).div(eps0, prec)?.mul(theta, prec);
    let den = two_minus.sub(&den_drop, prec);
    if !den.is_strictly_positive() {
        return None;
    }
    num.div(&den, prec)
}

/// The exact optimum of the leading exponent trade-off.
#[derive(Clone, Debug)]
pub struct ExponentOptimum {
    pub eps0: Ball,
    pub theta: Ball,
    pub exponent: Ball,
    /// Vanishing locus of the threshold's derivative; the optimum is its
    /// root in (0, 1).
    pub critical: Poly,
}

fn poly_eval_ball(p: &Poly, x: &Ball, prec: u64) -> Ball {
    let mut acc = Ball::zero();
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(x, prec).add(&Ball::from_rat(c, prec), prec);
    }
    acc
}

/// Maximizes ε₀(1−ε₀)/((3−ε₀)(4−ε₀)) over (0,1) by exact critical-point
/// algebra, then encloses the optimum and the resulting count exponent.
pub fn optimize_exponent(prec: u64) -> ExponentOptimum {
    // f = n/d; critical points are roots of n'd − nd'.
    let n = Poly::new(vec![rat(0, 1), rat(1, 1), rat(-1, 1)]);
    let d = Poly::new(vec![rat(12, 1), rat(-7, 1), rat(1, 1)]);
    let deriv_num = &(&n.derivative() * &d) - &(&n * &d.derivative());
    let content = deriv_num.int_content().expect("nonzero integer polynomial");
    let critical = deriv_num.scale(&Rat::from_integer(content).recip());
    assert_eq!(
        critical,
        Poly::new(vec![rat(2, 1), rat(-4, 1), rat(1, 1)]),
        "critical locus changed"
    );

    // Roots 2 ± √2; only 2 − √2 lies in (0, 1).
    let sqrt2 = Ball::nth_root_rat(&rat(2, 1), 2, prec);
    let eps0 = Ball::from_int(Int::from(2)).sub(&sqrt2, prec);
    assert!(poly_eval_ball(&critical, &eps0, prec).contains_zero());

    let theta = Ball::from_int(Int::from(17)).sub(&sqrt2.mul_rat(&rat(12, 1), prec), prec);
    // Consistency: f at the enclosed optimum must meet the closed form.
    let f_val = poly_eval_ball(&n, &eps0, prec)
        .div(&poly_eval_ball(&d, &eps0, prec), prec)
        .expect("denominator bounded away from zero");
    assert!(f_val.sub(&theta, prec).contains_zero());

    let exponent = Ball::from_int(Int::one()).sub(&theta, prec);
    ExponentOptimum {
        eps0,
        theta,
        exponent,
        critical,
    }
}

/// The evaluated matrix with its scale integer and certified residuals.
#[derive(Clone, Debug)]
pub struct ApproximantMatrix {
    /// p[i][j]: row i is the function index, column j the derivative index.
    pub p: [[Rat; 3]; 3],
    pub z: Int,
    pub n0: Int,
    pub certificate: IndependenceCertificate,
    pub residuals: [Ball; 3],
}

fn residual_balls(
    cfg: &PadeConfig,
    p: &[[Rat; 3]; 3],
    alpha: &Rat,
    prec: u64,
) -> Result<[Ball; 3], PipelineError> {
    let w1 = omega_eval_ball(OmegaSpec::new(cfg.r, cfg.beta1), alpha, prec)
        .map_err(|_| PipelineError::DegenerateParams("omega evaluation outside its domain"))?;
    let w2 = omega_eval_ball(OmegaSpec::new(cfg.r, cfg.beta2), alpha, prec)
        .map_err(|_| PipelineError::DegenerateParams("omega evaluation outside its domain"))?;
    let cols: Vec<Ball> = (0..3)
        .into_par_iter()
        .map(|j| {
            Ball::from_rat(&p[0][j], prec)
                .add(&w1.mul_rat(&p[1][j], prec), prec)
                .add(&w2.mul_rat(&p[2][j], prec), prec)
        })
        .collect();
    Ok([cols[0].clone(), cols[1].clone(), cols[2].clone()])
}

/// Evaluates the certified derivative triple at the certificate's point and
/// assembles the scale integer Z = r^{a+2} n₀^{D+(a+2)𝓜}.
pub fn build_approximants(
    params: &PipelineParams,
    cfg: &PadeConfig,
    family: &DerivedFamily,
    certificate: &IndependenceCertificate,
) -> Result<ApproximantMatrix, PipelineError> {
    assert_eq!(params.r, cfg.r, "config drift: r");
    assert_eq!(params.m_cap, cfg.m_cap, "config drift: cutoff");
    assert_eq!(params.d, cfg.d, "config drift: degree");
    assert_eq!(params.eps0, cfg.eps0, "config drift: eps0");

    let alpha = &certificate.alpha;
    if !alpha.numer().is_one() || alpha.denom() <= &Int::one() {
        return Err(PipelineError::DegenerateParams(
            "evaluation point must be the reciprocal of an integer above one",
        ));
    }
    let n0 = alpha.denom().clone();
    let (k0, k1, k2) = certificate.indices;
    let ks = [k0 as usize, k1 as usize, k2 as usize];
    if family.angle.len() <= ks[2] {
        return Err(PipelineError::DegenerateParams(
            "derivative family shallower than the certificate indices",
        ));
    }

    let p: [[Rat; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| {
        family.angle[ks[j]][i].eval(alpha)
    }));
    let det = det3_rat(&p);
    assert_eq!(det, certificate.det_value, "certificate determinant drift");
    if det.is_zero() {
        return Err(PipelineError::PropertyViolation {
            property: "matrix nonsingularity",
            lhs: "det = 0".into(),
            rhs: "nonzero required".into(),
        });
    }

    let a = certificate.a as u64;
    let z = int_pow(&Int::from(params.r), a + 2)
        * int_pow(&n0, params.d as u64 + (a + 2) * params.m_cap as u64);
    for row in &p {
        for entry in row {
            if !is_integer(&(entry * Rat::from_integer(z.clone()))) {
                return Err(PipelineError::PropertyViolation {
                    property: "integral scaling",
                    lhs: format!("denominator {}", entry.denom()),
                    rhs: format!("must divide {z}"),
                });
            }
        }
    }

    let residuals = residual_balls(cfg, &p, alpha, params.prec)?;
    Ok(ApproximantMatrix {
        p,
        z,
        n0,
        certificate: certificate.clone(),
        residuals,
    })
}

/// Exact upper bound for |Σ_i p_{i,j} ω_i(1/𝒩)|: the window part uses the
/// exactly known remainder coefficients, the tail beyond the window a
/// certified power-of-two cap on the coefficient growth law, closed by a
/// geometric series. Valid for any derivative index up to a+2.
pub fn tail_chain_bound(
    params: &PipelineParams,
    cfg: &PadeConfig,
    triple: &PadeTriple,
    a: usize,
) -> Result<Rat, PipelineError> {
    assert_eq!(params.r, cfg.r, "config drift: r");
    assert_eq!(params.m_cap, cfg.m_cap, "config drift: cutoff");
    let n = &params.n_mag;
    let four_m = Int::from(4 * cfg.m_cap);
    if n <= &four_m {
        return Err(PipelineError::DegenerateParams(
            "geometric tail needs the magnitude to exceed 4 times the cutoff",
        ));
    }
    let alpha2 = rat(2, 1) / Rat::from_integer(n.clone());

    // Window part: Σ |r_v| (2/𝒩)^v over every exactly known coefficient.
    let window_part = |coeffs: &[Rat]| {
        let mut sum = Rat::zero();
        let mut pow = Rat::one();
        for rv in coeffs {
            sum += rv.abs() * &pow;
            pow *= &alpha2;
        }
        sum
    };
    let mut coeffs = triple.remainder_coeffs.clone();
    let mut window_sum = window_part(&coeffs);
    if window_sum.is_zero() {
        // Remainder vanishing through the whole certified window: look far
        // enough past it to pick up the first signal before giving up on a
        // sharp window part.
        coeffs = remainder_series(triple, cfg, 4 * (coeffs.len() - 1))
            .coeffs()
            .to_vec();
        window_sum = window_part(&coeffs);
    }

    // Coefficient growth cap 4^{𝓜/ε₀} (4r⁴𝓜)^{(2−ε₀)(3−ε₀)D/ε₀} ≤ 2^cap_bits.
    let m_over_eps = Rat::from_integer(Int::from(cfg.m_cap)) / &cfg.eps0;
    let d_exp = (rat(2, 1) - &cfg.eps0) * (rat(3, 1) - &cfg.eps0) / &cfg.eps0
        * Rat::from_integer(Int::from(cfg.d));
    let base = Rat::from_integer(
        Int::from(4u32) * int_pow(&Int::from(cfg.r), 4) * Int::from(cfg.m_cap),
    );
    // Any upper enclosure of log2 of the growth constant gives a sound cap;
    // no escalation needed.
    let prec = params.prec;
    let log2_base = Ball::ln_rat(&base, prec)
        .div(&ball::ln2(prec), prec)
        .expect("ln 2 is strictly positive");
    let cap_bits = log2_base
        .mul_rat(&d_exp, prec)
        .add(&Ball::from_rat(&(&m_over_eps + &m_over_eps), prec), prec)
        .upper_rat()
        .ceil()
        .to_integer();
    let cap_u64 = cap_bits
        .to_u64()
        .ok_or(PipelineError::DegenerateParams("tail coefficient cap too large"))?;
    let growth_cap = Rat::from_integer(int_pow(&Int::from(2), cap_u64));

    // Geometric closure past the window: ratio 4𝓜/𝒩 < 1. The certified
    // window is sized for the vanishing certificate, not for sharpness, so
    // the cap-driven closure can dwarf the window part. Extend the window
    // until the closure sits 2^64 below it; the coefficients stay exact, so
    // the bound only tightens.
    let ratio = Rat::from_integer(four_m.clone()) / Rat::from_integer(n.clone());
    let geometric_from =
        |len: usize| &growth_cap * crate::num::rat_pow(&ratio, len as u64) / (Rat::one() - &ratio);
    let mut geometric = geometric_from(coeffs.len());
    if !window_sum.is_zero() {
        let log2_floor =
            |q: &Rat| q.numer().bits() as i64 - q.denom().bits() as i64 - 1;
        // Lower bound on log2(𝒩/4𝓜), the per-term decay of the closure.
        let decay_bits = ((n / &four_m).bits() as i64 - 1).max(1);
        let cap_i64 = cap_bits
            .to_i64()
            .ok_or(PipelineError::DegenerateParams("tail coefficient cap too large"))?;
        let needed_len = (cap_i64 + 64 - log2_floor(&window_sum)) / decay_bits + 2;
        if needed_len > 1 << 20 {
            return Err(PipelineError::DegenerateParams(
                "sharp tail window would be enormous",
            ));
        }
        if needed_len > coeffs.len() as i64 {
            coeffs = remainder_series(triple, cfg, needed_len as usize - 1)
                .coeffs()
                .to_vec();
            window_sum = window_part(&coeffs);
            geometric = geometric_from(coeffs.len());
        }
    }

    let front = Rat::from_integer(int_pow(&(Int::from(2 * cfg.r) * n), a as u64 + 2));
    Ok(front * (window_sum + geometric))
}

/// Everything [`verify_properties`] certifies, with the balls and bounds it
/// used, so callers can inspect margins.
#[derive(Clone, Debug)]
pub struct PropertyReport {
    pub checks: CheckSet,
    /// Residual enclosures at the certifying precision.
    pub residuals: [Ball; 3],
    pub tail_chain: Rat,
}

/// Certified a ≤ b with both sides recomputed at escalating precision.
fn certified_le_escalating(
    prec0: u64,
    lhs: impl Fn(u64) -> Ball,
    rhs: impl Fn(u64) -> Ball,
) -> Option<bool> {
    let mut prec = prec0;
    loop {
        if let Some(ans) = lhs(prec).certified_le(&rhs(prec)) {
            return Some(ans);
        }
        if prec >= PREC_CAP {
            return None;
        }
        prec *= 2;
    }
}

fn fmt_ball(b: &Ball) -> String {
    format!("{:.6e}", b.to_f64())
}

/// Checks the four structural properties of the evaluated matrix: exact
/// nonsingularity, exact integral scaling with the scale under its budget,
/// entry sizes under their budget, and residual decay certified two ways
/// (against the closed-form budget and against the exact-window tail chain).
pub fn verify_properties(
    matrix: &ApproximantMatrix,
    params: &PipelineParams,
    cfg: &PadeConfig,
    triple: &PadeTriple,
) -> Result<PropertyReport, PipelineError> {
    let mut checks = CheckSet::new();
    let d_rat = Rat::from_integer(Int::from(params.d));

    // 1: nonsingularity, exact.
    let det = det3_rat(&matrix.p);
    if det.is_zero() {
        return Err(PipelineError::PropertyViolation {
            property: "matrix nonsingularity",
            lhs: "det = 0".into(),
            rhs: "nonzero required".into(),
        });
    }
    checks.push(
        "matrix nonsingular",
        true,
        format!(
            "det exact and nonzero, magnitude ~2^{}",
            det.numer().bits() as i64 - det.denom().bits() as i64
        ),
    );

    // 2a: integral scaling, exact.
    for (i, row) in matrix.p.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            if !is_integer(&(entry * Rat::from_integer(matrix.z.clone()))) {
                return Err(PipelineError::PropertyViolation {
                    property: "integral scaling",
                    lhs: format!("entry ({i},{j}) denominator {}", entry.denom()),
                    rhs: "must divide the scale".into(),
                });
            }
        }
    }
    checks.push("scaled entries integral", true, format!("scale bits {}", matrix.z.bits()));

    // 2b: the scale itself under scale_const · scale_base^D.
    let ln_z = |p: u64| Ball::ln_rat(&Rat::from_integer(matrix.z.clone()), p);
    let scale_budget = |p: u64| {
        let logs = params.logs_at(p);
        logs.scale_const.add(&logs.scale_base.mul_rat(&d_rat, p), p)
    };
    match certified_le_escalating(params.prec, ln_z, scale_budget) {
        Some(true) => checks.push(
            "scale within budget",
            true,
            format!(
                "ln Z = {} <= {}",
                fmt_ball(&ln_z(params.prec)),
                fmt_ball(&scale_budget(params.prec))
            ),
        ),
        Some(false) => {
            return Err(PipelineError::PropertyViolation {
                property: "scale growth",
                lhs: fmt_ball(&ln_z(params.prec)),
                rhs: fmt_ball(&scale_budget(params.prec)),
            })
        }
        None => {
            return Err(PipelineError::DegenerateParams(
                "scale comparison undecidable at the precision ceiling",
            ))
        }
    }

    // 3: entry sizes under entry_const · entry_base^D.
    let entry_budget = |p: u64| {
        let logs = params.logs_at(p);
        logs.entry_const.add(&logs.entry_base.mul_rat(&d_rat, p), p)
    };
    let mut largest: Option<Rat> = None;
    for row in &matrix.p {
        for entry in row {
            let mag = entry.abs();
            if largest.as_ref().is_none_or(|m| &mag > m) {
                largest = Some(mag);
            }
        }
    }
    let largest = largest.unwrap();
    if largest.is_zero() {
        checks.push("entries within budget", true, "all entries zero");
    } else {
        let ln_entry = |p: u64| Ball::ln_rat(&largest, p);
        match certified_le_escalating(params.prec, ln_entry, entry_budget) {
            Some(true) => checks.push(
                "entries within budget",
                true,
                format!(
                    "max ln|p| = {} <= {}",
                    fmt_ball(&ln_entry(params.prec)),
                    fmt_ball(&entry_budget(params.prec))
                ),
            ),
            Some(false) => {
                return Err(PipelineError::PropertyViolation {
                    property: "entry growth",
                    lhs: fmt_ball(&ln_entry(params.prec)),
                    rhs: fmt_ball(&entry_budget(params.prec)),
                })
            }
            None => {
                return Err(PipelineError::DegenerateParams(
                    "entry comparison undecidable at the precision ceiling",
                ))
            }
        }
    }

    // 4: residual decay, certified against the exact-window tail chain and
    // the closed-form budget decay_const · decay_base^{−D}.
    let chain = tail_chain_bound(params, cfg, triple, matrix.certificate.a)?;
    let alpha = rat(1, 1) / Rat::from_integer(matrix.n0.clone());
    let mut prec = params.prec;
    let residuals = loop {
        let res = residual_balls(cfg, &matrix.p, &alpha, prec)?;
        let worst_upper = res
            .iter()
            .map(|b| b.abs().upper_rat())
            .max()
            .unwrap();
        if worst_upper <= chain {
            break res;
        }
        let definite = res.iter().any(|b| b.abs().lower_rat() > chain);
        if definite {
            let bad = res
                .iter()
                .map(|b| b.abs().lower_rat())
                .max()
                .unwrap();
            return Err(PipelineError::PropertyViolation {
                property: "residual decay",
                lhs: format!("|residual| >= {:.6e}", bad.to_f64().unwrap_or(f64::NAN)),
                rhs: format!("tail chain {:.6e}", chain.to_f64().unwrap_or(f64::NAN)),
            });
        }
        if prec >= PREC_CAP {
            return Err(PipelineError::DegenerateParams(
                "residual comparison undecidable at the precision ceiling",
            ));
        }
        prec *= 2;
    };
    checks.push(
        "residuals below tail chain",
        true,
        format!("chain {:.6e}", chain.to_f64().unwrap_or(f64::NAN)),
    );

    let decay_budget = |p: u64| {
        let logs = params.logs_at(p);
        logs.decay_const.sub(&logs.decay_base.mul_rat(&d_rat, p), p)
    };
    let ln_chain = |p: u64| Ball::ln_rat(&chain, p);
    match certified_le_escalating(params.prec, ln_chain, decay_budget) {
        Some(true) => checks.push(
            "tail chain below decay budget",
            true,
            format!(
                "ln chain = {} <= {}",
                fmt_ball(&ln_chain(params.prec)),
                fmt_ball(&decay_budget(params.prec))
            ),
        ),
        Some(false) => {
            return Err(PipelineError::PropertyViolation {
                property: "residual decay budget",
                lhs: fmt_ball(&ln_chain(params.prec)),
                rhs: fmt_ball(&decay_budget(params.prec)),
            })
        }
        None => {
            return Err(PipelineError::DegenerateParams(
                "decay comparison undecidable at the precision ceiling",
            ))
        }
    }

    Ok(PropertyReport {
        checks,
        residuals,
        tail_chain: chain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::independence::rank3_certificate;
    use crate::operators::{build_family, make_context, OperatorContext};
    use crate::pade::build_initial_pade;
    use std::sync::OnceLock;

    fn pow10(k: u64) -> Int {
        int_pow(&Int::from(10), k)
    }

    fn diff_contains_zero(a: &Ball, b: &Ball) -> bool {
        a.sub(b, 512).contains_zero()
    }

    #[test]
    fn scale_base_log_is_ln_of_twice_the_magnitude() {
        let params =
            desk_params(&Int::from(101), 20, 4, &rat(1, 2), 2, &Int::one(), &pow10(6), 256)
                .unwrap();
        let reference = Ball::ln_rat(&rat(202, 1), 256);
        assert!(diff_contains_zero(&params.scale_base.ln, &reference));
    }

    #[test]
    fn entry_base_exponent_at_one_half() {
        // (2−ε₀)(3−ε₀)/ε₀ = 15/2 at ε₀ = 1/2, and the base is 256 = 2^8,
        // so the log is exactly 60·ln 2.
        let params =
            desk_params(&Int::from(101), 20, 4, &rat(1, 2), 2, &Int::one(), &pow10(6), 256)
                .unwrap();
        let reference = ball::ln2(256).mul_rat(&rat(60, 1), 256);
        assert!(diff_contains_zero(&params.entry_base.ln, &reference));
    }

    #[test]
    fn paper_mode_gates() {
        let n = pow10(6);
        let one = Int::one();
        let b = pow10(6);
        let m = rat(1, 1000);
        // theta outside its interval
        assert!(matches!(
            compute_params(&n, &n, &rat(1, 10), &rat(1, 2), 2, &one, &b, &m, 128),
            Err(PipelineError::DegenerateParams(_))
        ));
        // theta above the threshold f(1/2) = 1/35
        assert!(matches!(
            compute_params(&n, &n, &rat(1, 25), &rat(1, 2), 2, &one, &b, &m, 128),
            Err(PipelineError::ThetaTooLarge { .. })
        ));
        // sample magnitude outside [N, 2N)
        assert!(matches!(
            compute_params(&n, &(&n * 2), &rat(1, 100), &rat(1, 2), 2, &one, &b, &m, 128),
            Err(PipelineError::DegenerateParams(_))
        ));
        // cutoff ⌊(10^6)^{1/100}⌋ = 1 < 2r
        assert!(matches!(
            compute_params(&n, &n, &rat(1, 100), &rat(1, 2), 2, &one, &b, &m, 128),
            Err(PipelineError::DegenerateParams(_))
        ));
    }

    #[test]
    fn paper_mode_rejects_desk_scale_decay() {
        // 𝓜 = ⌊(10^36)^{17/1000}⌋ = 4, but the decay base stays below the
        // scale base until the magnitude is astronomically larger.
        let n = pow10(36);
        let err = compute_params(
            &n,
            &n,
            &rat(17, 1000),
            &rat(1, 4),
            2,
            &Int::one(),
            &pow10(6),
            &rat(1, 1000),
            256,
        )
        .unwrap_err();
        assert!(matches!(err, PipelineError::DegenerateParams(_)));
    }

    #[test]
    fn cutoff_from_theta_is_exact_floor() {
        assert_eq!(cutoff_from_theta(&pow10(36), &rat(17, 1000)).unwrap(), 4);
        assert_eq!(cutoff_from_theta(&pow10(200), &rat(1, 100)).unwrap(), 100);
        assert_eq!(cutoff_from_theta(&Int::from(1024), &rat(1, 2)).unwrap(), 32);
        assert_eq!(cutoff_from_theta(&Int::from(1023), &rat(1, 2)).unwrap(), 31);
    }

    #[test]
    fn certified_floor_resolves_and_detects_straddles() {
        assert_eq!(
            certified_floor(64, |p| Some(Ball::from_rat(&rat(7, 2), p))).unwrap(),
            Int::from(3)
        );
        // ln(1000)/ln(2) = 9.96…
        assert_eq!(
            certified_floor(64, |p| Ball::ln_rat(&rat(1000, 1), p)
                .div(&ball::ln2(p), p))
            .unwrap(),
            Int::from(9)
        );
        // A fixed enclosure straddling an integer never resolves.
        let stuck = Ball::from_bounds_rat(&rat(299, 100), &rat(301, 100), 64);
        assert_eq!(
            certified_floor(64, |_| Some(stuck.clone())),
            Err(PipelineError::FloorAmbiguous)
        );
    }

    #[test]
    fn log_factorial_small_values() {
        assert!(log_factorial(&Int::zero(), 128).contains_rat(&Rat::zero()));
        assert!(log_factorial(&Int::one(), 128).contains_rat(&Rat::zero()));
        let ln_10_fact = log_factorial(&Int::from(10), 128);
        let reference = Ball::ln_rat(&rat(3628800, 1), 128);
        assert!(diff_contains_zero(&ln_10_fact, &reference));
    }

    #[test]
    fn desk_params_guards() {
        let one = Int::one();
        let b = pow10(6);
        assert!(desk_params(&Int::from(16), 20, 4, &rat(1, 2), 2, &one, &b, 128).is_err());
        assert!(desk_params(&Int::from(100), 20, 3, &rat(1, 2), 2, &one, &b, 128).is_err());
        assert!(desk_params(&Int::from(100), 20, 4, &rat(1, 200), 2, &one, &b, 128).is_err());
        assert!(desk_params(&Int::from(100), 0, 4, &rat(1, 2), 2, &one, &b, 128).is_err());
        assert!(desk_params(&Int::from(100), 20, 4, &rat(1, 2), 2, &Int::zero(), &b, 128).is_err());
    }

    #[test]
    fn chi_crosses_one_between_magnitudes() {
        let one = Int::one();
        let b = pow10(6);
        let small = desk_params(&pow10(40), 20, 4, &rat(1, 2), 2, &one, &b, 256).unwrap();
        let big = desk_params(&pow10(200), 20, 4, &rat(1, 2), 2, &one, &b, 256).unwrap();
        assert!(chi(&small).unwrap().lower_rat() > Rat::one());
        assert!(chi(&big).unwrap().upper_rat() < Rat::one());
        // Below the crossover of the two bases chi is undefined.
        let tiny = desk_params(&pow10(6), 20, 4, &rat(1, 2), 2, &one, &b, 256).unwrap();
        assert!(chi(&tiny).is_err());
    }

    #[test]
    fn leading_form_exact_values() {
        assert_eq!(chi_leading(&rat(1, 2), &rat(1, 100)).unwrap(), rat(43, 56));
        for (e, expect) in [
            (rat(1, 4), rat(4, 7)),
            (rat(1, 2), rat(2, 3)),
            (rat(3, 4), rat(4, 5)),
        ] {
            assert_eq!(chi_leading(&e, &Rat::zero()).unwrap(), expect);
        }
    }

    #[test]
    fn leading_form_is_one_at_the_optimum() {
        let prec = 192;
        let sqrt2 = Ball::nth_root_rat(&rat(2, 1), 2, prec);
        let eps0 = Ball::from_int(Int::from(2)).sub(&sqrt2, prec);
        let theta = Ball::from_int(Int::from(17)).sub(&sqrt2.mul_rat(&rat(12, 1), prec), prec);
        let val = chi_leading_ball(&eps0, &theta, prec).unwrap();
        let err = val.sub(&Ball::from_int(Int::one()), prec).abs();
        assert!(err.upper_rat() <= rat(1, 1_000_000_000_000));
    }

    #[test]
    fn exponent_optimum_matches_the_closed_forms() {
        let prec = 192;
        let opt = optimize_exponent(prec);
        assert_eq!(opt.critical, Poly::new(vec![rat(2, 1), rat(-4, 1), rat(1, 1)]));

        let sqrt2 = Ball::nth_root_rat(&rat(2, 1), 2, 2 * prec);
        let tol = rat(1, 1_000_000_000_000);
        let eps_ref = Ball::from_int(Int::from(2)).sub(&sqrt2, 2 * prec);
        assert!(opt.eps0.sub(&eps_ref, prec).abs().upper_rat() <= tol);
        let theta_ref =
            Ball::from_int(Int::from(17)).sub(&sqrt2.mul_rat(&rat(12, 1), 2 * prec), 2 * prec);
        assert!(opt.theta.sub(&theta_ref, prec).abs().upper_rat() <= tol);
        let exp_ref = sqrt2
            .mul_rat(&rat(12, 1), 2 * prec)
            .sub(&Ball::from_int(Int::from(16)), 2 * prec);
        assert!(opt.exponent.sub(&exp_ref, prec).abs().upper_rat() <= tol);
        // Strictly below the headline exponent 33/34.
        assert!(opt.exponent.upper_rat() < rat(33, 34));
    }

    #[test]
    fn leading_form_threshold_sign_equivalence() {
        for i in 1..=20u32 {
            let eps0 = rat(i as i64, 21);
            let cap = theta_threshold(&eps0);
            for j in 1..=20u32 {
                let theta = rat(2 * j as i64, 21) * &cap;
                let below_one = chi_leading(&eps0, &theta).unwrap() < Rat::one();
                assert_eq!(below_one, theta < cap, "eps0 = {eps0}, theta = {theta}");
            }
        }
    }

    struct DeskSetup {
        cfg: PadeConfig,
        triple: PadeTriple,
        ctx: OperatorContext,
        family: DerivedFamily,
    }

    fn desk_setup() -> &'static DeskSetup {
        static SETUP: OnceLock<DeskSetup> = OnceLock::new();
        SETUP.get_or_init(|| {
            let cfg = PadeConfig::new(2, 2, 4, 4, 20, rat(1, 2)).unwrap();
            let triple = build_initial_pade(&cfg).unwrap();
            let ctx = make_context(2, 4, 2, 4);
            let family = build_family(&ctx, [&triple.p0, &triple.p1, &triple.p2], 4);
            DeskSetup { cfg, triple, ctx, family }
        })
    }

    #[test]
    fn desk_pipeline_properties_hold_with_margin() {
        let s = desk_setup();
        let n0 = pow10(6) + Int::from(3);
        let alpha = Rat::one() / Rat::from_integer(n0.clone());
        let cert = rank3_certificate(&s.ctx, &s.family, &s.cfg, &alpha).unwrap();
        let params =
            desk_params(&n0, 20, 4, &rat(1, 2), 2, &Int::one(), &pow10(6), 256).unwrap();
        let matrix = build_approximants(&params, &s.cfg, &s.family, &cert).unwrap();

        if cert.a == 0 {
            let expect = int_pow(&Int::from(2), 2) * int_pow(&n0, 28);
            assert_eq!(matrix.z, expect);
        }

        let report = verify_properties(&matrix, &params, &s.cfg, &s.triple).unwrap();
        assert!(report.checks.all_pass());
        assert_eq!(report.checks.len(), 6);

        // Each residual ball must clear the chain with a 10x margin between
        // its radius and the decision gap.
        for b in &report.residuals {
            let upper = b.abs().upper_rat();
            let gap = &report.tail_chain - &upper;
            assert!(gap > Rat::zero());
            let radius = b.abs().upper_rat() - b.abs().lower_rat();
            assert!(radius * rat(10, 1) <= gap);
        }
    }

    #[test]
    fn corrupted_entry_breaks_residual_decay() {
        let s = desk_setup();
        let n0 = pow10(6) + Int::from(3);
        let alpha = Rat::one() / Rat::from_integer(n0.clone());
        let cert = rank3_certificate(&s.ctx, &s.family, &s.cfg, &alpha).unwrap();
        let params =
            desk_params(&n0, 20, 4, &rat(1, 2), 2, &Int::one(), &pow10(6), 256).unwrap();
        let mut matrix = build_approximants(&params, &s.cfg, &s.family, &cert).unwrap();
        matrix.p[0][0] += Rat::one();
        let err = verify_properties(&matrix, &params, &s.cfg, &s.triple).unwrap_err();
        assert!(matches!(
            err,
            PipelineError::PropertyViolation { property: "residual decay", .. }
        ));
    }

    #[test]
    fn approximant_point_must_be_reciprocal() {
        let s = desk_setup();
        let alpha = rat(2, 5);
        let cert = rank3_certificate(&s.ctx, &s.family, &s.cfg, &alpha).unwrap();
        let params =
            desk_params(&(pow10(6) + 3), 20, 4, &rat(1, 2), 2, &Int::one(), &pow10(6), 256)
                .unwrap();
        assert!(matches!(
            build_approximants(&params, &s.cfg, &s.family, &cert),
            Err(PipelineError::DegenerateParams(_))
        ));
    }
}
