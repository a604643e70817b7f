//! Initial simultaneous Padé triples for the two omega series.
//!
//! [`build_initial_pade`] produces integer polynomials P0, P1, P2 of degree
//! at most D with R = P0 + P1·ω₁ + P2·ω₂ vanishing at the origin to every
//! order up to the target ⌊(3−ε₀)D⌋. The linear conditions on the orders
//! above D form a homogeneous integer system solved by
//! [`siegel::solve_small`](crate::siegel::solve_small); the orders up to D
//! are then killed exactly by the choice of P0. Everything is re-verified by
//! exact series expansion before a triple is returned.

use crate::num::{int_pow, is_integer, Int, Rat};
use crate::omega::{omega_series, OmegaSpec};
use crate::poly::Poly;
use crate::series::Series;
use crate::siegel::{solve_small, HomogeneousSystem};
use crate::Ball;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PadeError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("vanishing target does not exceed the degree; no equations to solve")]
    DegenerateConfig,
    #[error("construction failed: {0}")]
    ConstructionFailed(&'static str),
    #[error("nondegeneracy violated: {0}")]
    LemmaViolation(String),
}

/// Parameters of one build: root order r, the two omega cutoffs β₁ < β₂,
/// the operator cutoff 𝓜 ≥ β₂, the degree D and the exponent split ε₀.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadeConfig {
    pub r: u32,
    pub beta1: u32,
    pub beta2: u32,
    pub m_cap: u32,
    pub d: u32,
    pub eps0: Rat,
}

impl PadeConfig {
    pub fn new(
        r: u32,
        beta1: u32,
        beta2: u32,
        m_cap: u32,
        d: u32,
        eps0: Rat,
    ) -> Result<Self, PadeError> {
        if r < 2 {
            return Err(PadeError::InvalidConfig("r must be at least 2"));
        }
        if !(r <= beta1 && beta1 < beta2) {
            return Err(PadeError::InvalidConfig("need r <= beta1 < beta2"));
        }
        if beta2 > m_cap {
            return Err(PadeError::InvalidConfig("need beta2 <= M_cap"));
        }
        if d < 10 {
            return Err(PadeError::InvalidConfig("degree must be at least 10"));
        }
        if eps0 < crate::num::rat(1, 100) || eps0 > crate::num::rat(99, 100) {
            return Err(PadeError::InvalidConfig("eps0 must lie in [1/100, 99/100]"));
        }
        Ok(PadeConfig { r, beta1, beta2, m_cap, d, eps0 })
    }

    /// ⌊(3 − ε₀)·D⌋, the order through which the remainder must vanish.
    pub fn vanishing_target(&self) -> usize {
        let num = (Int::from(3) * self.eps0.denom() - self.eps0.numer()) * Int::from(self.d);
        num.div_floor(self.eps0.denom())
            .try_into()
            .expect("vanishing target fits usize")
    }

    /// Remainder window inspected by default: one full degree past the target.
    pub fn default_window(&self) -> usize {
        self.vanishing_target() + self.d as usize + 1
    }

    /// D > (𝓜 + 2)/(1 − ε₀), the regime where all three polynomials of a
    /// built triple are guaranteed nonzero.
    pub fn nondegeneracy_regime(&self) -> bool {
        let one_minus = Rat::one() - &self.eps0;
        Rat::from_integer(Int::from(self.d)) * one_minus
            > Rat::from_integer(Int::from(self.m_cap + 2))
    }

    fn omega_specs(&self) -> [OmegaSpec; 2] {
        [
            OmegaSpec::new(self.r, self.beta1),
            OmegaSpec::new(self.r, self.beta2),
        ]
    }
}

/// A built triple: the three integer polynomials, the exactly expanded
/// remainder coefficients r_0..r_L, and the certified vanish order (every
/// r_v with v <= vanish_order is zero; the window saw nothing smaller).
#[derive(Clone, Debug)]
pub struct PadeTriple {
    pub p0: Poly,
    pub p1: Poly,
    pub p2: Poly,
    pub remainder_coeffs: Vec<Rat>,
    pub vanish_order: usize,
}

impl PadeTriple {
    pub fn polys(&self) -> [&Poly; 3] {
        [&self.p0, &self.p1, &self.p2]
    }
}

/// Omega coefficient tables through index `upto`, scaled by r^{2·target} so
/// every entry is an integer. Each entry's integrality is asserted rather
/// than assumed; a denominator regression dies here, not downstream.
fn scaled_tables(cfg: &PadeConfig, upto: usize) -> [Vec<Int>; 2] {
    let target = cfg.vanishing_target();
    let scale = int_pow(&Int::from(cfg.r), 2 * target as u64);
    cfg.omega_specs().map(|spec| {
        omega_series(spec, upto + 1)
            .coeffs()
            .iter()
            .map(|q| {
                let v = q * Rat::from_integer(scale.clone());
                assert!(is_integer(&v), "scaled omega coefficient not integral");
                v.to_integer()
            })
            .collect()
    })
}

/// Builds the triple for `cfg` and certifies the vanishing exactly.
pub fn build_initial_pade(cfg: &PadeConfig) -> Result<PadeTriple, PadeError> {
    let d = cfg.d as usize;
    let target = cfg.vanishing_target();
    if target <= d {
        return Err(PadeError::DegenerateConfig);
    }
    let scale = int_pow(&Int::from(cfg.r), 2 * target as u64);
    let tables = scaled_tables(cfg, target);

    // One equation per order in (D, target]; unknowns are the coefficients
    // of P1 and P2 before rescaling.
    let width = d + 1;
    let rows: Vec<Vec<Int>> = (d + 1..=target)
        .map(|v| {
            let mut row = Vec::with_capacity(2 * width);
            for t in &tables {
                for k in 0..=d {
                    row.push(t[v - k].clone());
                }
            }
            row
        })
        .collect();
    let sys = HomogeneousSystem::new(rows)
        .map_err(|_| PadeError::ConstructionFailed("order system has invalid shape"))?;
    let x = solve_small(&sys)
        .map_err(|_| PadeError::ConstructionFailed("no small kernel vector found"))?;

    let p1: Vec<Int> = x[..width].iter().map(|c| c * &scale).collect();
    let p2: Vec<Int> = x[width..].iter().map(|c| c * &scale).collect();
    let p0: Vec<Int> = (0..=d)
        .map(|v| {
            let mut acc = Int::zero();
            for (xi, t) in [(&x[..width], &tables[0]), (&x[width..], &tables[1])] {
                for k in 0..=v.min(d) {
                    acc += &xi[k] * &t[v - k];
                }
            }
            -acc
        })
        .collect();

    let mut triple = PadeTriple {
        p0: Poly::from_big_coeffs(p0),
        p1: Poly::from_big_coeffs(p1),
        p2: Poly::from_big_coeffs(p2),
        remainder_coeffs: Vec::new(),
        vanish_order: 0,
    };

    // Certify by independent exact expansion, not by trusting the solve.
    let window = cfg.default_window();
    let rem = remainder_series(&triple, cfg, window);
    triple.remainder_coeffs = rem.coeffs().to_vec();
    triple.vanish_order = match rem.valuation() {
        Some(v) => v - 1,
        None => window,
    };
    if triple.vanish_order < target {
        return Err(PadeError::ConstructionFailed(
            "remainder fails to vanish through the target order",
        ));
    }
    if triple.polys().iter().all(|p| p.is_zero()) {
        return Err(PadeError::ConstructionFailed("all three polynomials vanish"));
    }
    Ok(triple)
}

/// Exact r_0..r_L of R = P0 + P1·ω₁ + P2·ω₂.
pub fn remainder_series(triple: &PadeTriple, cfg: &PadeConfig, l: usize) -> Series {
    let [s1, s2] = cfg.omega_specs();
    let acc = Series::from_poly(&triple.p0, l);
    let acc = &acc + &omega_series(s1, l + 1).mul_poly(&triple.p1);
    &acc + &omega_series(s2, l + 1).mul_poly(&triple.p2)
}

/// Which polynomials are nonzero, and whether the strict regime applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NondegeneracyReport {
    pub nonzero: [bool; 3],
    pub strict_regime: bool,
}

/// At least one polynomial is always nonzero; above the degree threshold
/// D > (𝓜+2)/(1−ε₀) all three must be.
pub fn check_nondegenerate(
    triple: &PadeTriple,
    cfg: &PadeConfig,
) -> Result<NondegeneracyReport, PadeError> {
    let nonzero = triple.polys().map(|p| !p.is_zero());
    if !nonzero.iter().any(|&b| b) {
        return Err(PadeError::LemmaViolation(
            "all three polynomials are zero".into(),
        ));
    }
    let strict_regime = cfg.nondegeneracy_regime();
    if strict_regime {
        for (i, nz) in nonzero.iter().enumerate() {
            if !nz {
                return Err(PadeError::LemmaViolation(format!(
                    "P{i} is zero although the degree exceeds the threshold"
                )));
            }
        }
    }
    Ok(NondegeneracyReport { nonzero, strict_regime })
}

/// Every coefficient of P1 and P2 must carry the full factor r^{2·target}.
pub fn check_integrality(triple: &PadeTriple, cfg: &PadeConfig) -> Result<(), PadeError> {
    let scale = int_pow(&Int::from(cfg.r), 2 * cfg.vanishing_target() as u64);
    for (name, p) in [("P1", &triple.p1), ("P2", &triple.p2)] {
        for c in p.coeffs() {
            if !is_integer(c) || !(c.numer() % &scale).is_zero() {
                return Err(PadeError::LemmaViolation(format!(
                    "{name} coefficient {c} lacks the scale factor"
                )));
            }
        }
    }
    if !triple.p0.is_integer() {
        return Err(PadeError::LemmaViolation("P0 not integral".into()));
    }
    Ok(())
}

const BOUND_PREC_MAX: u64 = 1 << 14;

/// Decides |value| <= 4^{e1} · base2^{e2} · base3^{v} with rational e1, e2.
///
/// When the exponent denominators are tame the comparison is cross-powered
/// into exact integer arithmetic. Otherwise both sides are compared in the
/// log domain through certified enclosures, escalating precision until they
/// separate; an undecided comparison is reported, never guessed.
struct BoundChecker {
    e1: Rat,
    e2: Rat,
    base2: Int,
    base3: Int,
    lcm: Option<u64>,
    exact_base: Option<Int>,
}

impl BoundChecker {
    fn new(cfg: &PadeConfig) -> Self {
        let m = Int::from(cfg.m_cap);
        let eps = &cfg.eps0;
        let e1 = Rat::from_integer(m.clone()) / eps;
        let e2 = (crate::num::rat_int(2) - eps) * (crate::num::rat_int(3) - eps)
            * Rat::from_integer(Int::from(cfg.d))
            / eps;
        let base2 = Int::from(4) * int_pow(&Int::from(cfg.r), 4) * &m;
        let base3 = Int::from(2) * &m;
        let lcm = e1.denom().lcm(e2.denom()).try_into().ok().filter(|&l| l <= 64);
        let exact_base = lcm.map(|l| {
            let f1 = int_pow(
                &Int::from(4),
                (e1.numer() * Int::from(l) / e1.denom()).try_into().unwrap(),
            );
            let f2 = int_pow(
                &base2,
                (e2.numer() * Int::from(l) / e2.denom()).try_into().unwrap(),
            );
            f1 * f2
        });
        BoundChecker { e1, e2, base2, base3, lcm, exact_base }
    }

    fn within(&self, value: &Rat, v: usize) -> Result<bool, PadeError> {
        if value.is_zero() {
            return Ok(true);
        }
        let a = value.abs();
        if let (Some(l), Some(eb)) = (self.lcm, &self.exact_base) {
            let lhs = crate::num::rat_pow(&a, l);
            let rhs = eb * int_pow(&self.base3, v as u64 * l);
            return Ok(lhs <= Rat::from_integer(rhs));
        }
        let mut prec = 128u64;
        loop {
            let rhs = Ball::ln_rat(&crate::num::rat_int(4), prec)
                .mul_rat(&self.e1, prec)
                .add(
                    &Ball::ln_rat(&Rat::from_integer(self.base2.clone()), prec)
                        .mul_rat(&self.e2, prec),
                    prec,
                )
                .add(
                    &Ball::ln_rat(&Rat::from_integer(self.base3.clone()), prec)
                        .mul_rat(&crate::num::rat_int(v as i64), prec),
                    prec,
                );
            let lhs = Ball::ln_rat(&a, prec);
            if let Some(le) = lhs.certified_le(&rhs) {
                return Ok(le);
            }
            prec *= 2;
            if prec > BOUND_PREC_MAX {
                return Err(PadeError::ConstructionFailed(
                    "size bound comparison undecided at maximum precision",
                ));
            }
        }
    }
}

/// Size bounds on the polynomial coefficients and the inspected remainder
/// window: |p_{i,v}| and |r_v| stay within 4^{𝓜/ε₀}(4r⁴𝓜)^{(2−ε₀)(3−ε₀)D/ε₀}(2𝓜)^v.
pub fn check_coefficient_bounds(triple: &PadeTriple, cfg: &PadeConfig) -> Result<(), PadeError> {
    let checker = BoundChecker::new(cfg);
    for (name, p) in [("P0", &triple.p0), ("P1", &triple.p1), ("P2", &triple.p2)] {
        for (v, c) in p.coeffs().iter().enumerate() {
            if !checker.within(c, v)? {
                return Err(PadeError::LemmaViolation(format!(
                    "{name} coefficient at degree {v} exceeds the size bound"
                )));
            }
        }
    }
    for (v, c) in triple.remainder_coeffs.iter().enumerate() {
        if !checker.within(c, v)? {
            return Err(PadeError::LemmaViolation(format!(
                "remainder coefficient at order {v} exceeds the size bound"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, rat_int};

    fn cfg_d10() -> PadeConfig {
        PadeConfig::new(2, 2, 4, 4, 10, rat(1, 2)).unwrap()
    }

    #[test]
    fn config_validation_rejects_bad_shapes() {
        assert!(PadeConfig::new(1, 2, 4, 4, 10, rat(1, 2)).is_err());
        assert!(PadeConfig::new(2, 4, 2, 4, 10, rat(1, 2)).is_err());
        assert!(PadeConfig::new(2, 2, 4, 3, 10, rat(1, 2)).is_err());
        assert!(PadeConfig::new(2, 2, 4, 4, 9, rat(1, 2)).is_err());
        assert!(PadeConfig::new(2, 2, 4, 4, 10, rat(1, 200)).is_err());
        assert!(PadeConfig::new(2, 2, 4, 4, 10, rat(1, 2)).is_ok());
    }

    #[test]
    fn vanishing_target_floors_exactly() {
        assert_eq!(cfg_d10().vanishing_target(), 25);
        let c = PadeConfig::new(2, 2, 4, 4, 40, rat(5858, 10000)).unwrap();
        // (3 - 0.5858) * 40 = 96.568
        assert_eq!(c.vanishing_target(), 96);
    }

    #[test]
    fn degenerate_target_is_rejected() {
        // Out-of-range eps0 forced in by hand to hit the guard.
        let c = PadeConfig { eps0: rat(199, 100), ..cfg_d10() };
        assert!(matches!(
            build_initial_pade(&c),
            Err(PadeError::DegenerateConfig)
        ));
    }

    #[test]
    fn d10_build_vanishes_past_target() {
        let cfg = cfg_d10();
        let t = build_initial_pade(&cfg).unwrap();
        assert!(t.vanish_order >= 25);
        for p in t.polys() {
            assert!(p.degree().unwrap_or(0) <= 10);
        }
        // Independent re-expansion over a longer window.
        let rem = remainder_series(&t, &cfg, 40);
        for v in 0..=25 {
            assert!(rem.coeff(v).is_zero());
        }
    }

    #[test]
    fn remainder_of_unit_triple_is_one() {
        let t = PadeTriple {
            p0: Poly::one(),
            p1: Poly::zero(),
            p2: Poly::zero(),
            remainder_coeffs: vec![],
            vanish_order: 0,
        };
        let rem = remainder_series(&t, &cfg_d10(), 5);
        assert_eq!(rem.coeff(0), &rat_int(1));
        for v in 1..=5 {
            assert!(rem.coeff(v).is_zero());
        }
    }

    #[test]
    fn remainder_tracks_omega_offset() {
        let t = PadeTriple {
            p0: Poly::constant(rat_int(-1)),
            p1: Poly::one(),
            p2: Poly::zero(),
            remainder_coeffs: vec![],
            vanish_order: 0,
        };
        let rem = remainder_series(&t, &cfg_d10(), 2);
        assert!(rem.coeff(0).is_zero());
        assert_eq!(rem.coeff(1), &rat(1, 2));
        assert_eq!(rem.coeff(2), &rat(3, 8));
    }

    #[test]
    fn scaled_coefficients_carry_the_full_power() {
        let cfg = cfg_d10();
        let t = build_initial_pade(&cfg).unwrap();
        check_integrality(&t, &cfg).unwrap();
    }

    #[test]
    fn size_bounds_hold_for_the_d10_build() {
        let cfg = cfg_d10();
        let t = build_initial_pade(&cfg).unwrap();
        check_coefficient_bounds(&t, &cfg).unwrap();
    }

    #[test]
    fn nondegeneracy_gate_follows_the_threshold() {
        // (M_cap + 2)/(1 - eps0) = 12: D = 10 sits below, D = 20 above.
        let c10 = cfg_d10();
        assert!(!c10.nondegeneracy_regime());
        let t10 = build_initial_pade(&c10).unwrap();
        let rep = check_nondegenerate(&t10, &c10).unwrap();
        assert!(!rep.strict_regime);
        assert!(rep.nonzero.iter().any(|&b| b));

        let c20 = PadeConfig::new(2, 2, 4, 4, 20, rat(1, 2)).unwrap();
        assert!(c20.nondegeneracy_regime());
        let t20 = build_initial_pade(&c20).unwrap();
        let rep = check_nondegenerate(&t20, &c20).unwrap();
        assert_eq!(rep.nonzero, [true, true, true]);
    }

    #[test]
    fn injected_unit_triple_fails_strict_nondegeneracy() {
        let c20 = PadeConfig::new(2, 2, 4, 4, 20, rat(1, 2)).unwrap();
        let t = PadeTriple {
            p0: Poly::one(),
            p1: Poly::zero(),
            p2: Poly::zero(),
            remainder_coeffs: vec![],
            vanish_order: 0,
        };
        assert!(matches!(
            check_nondegenerate(&t, &c20),
            Err(PadeError::LemmaViolation(_))
        ));
    }
}
