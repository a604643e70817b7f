//! Nonvanishing certificates for the derived families: the determinant Δ of
//! the first three full-power images, vanishing orders, low-order evaluation
//! points, and rank-three witnesses for the divided-power matrix at a point.

use crate::num::Rat;
use crate::operators::{DerivedFamily, OperatorContext};
use crate::pade::PadeConfig;
use crate::poly::Poly;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IndependenceError {
    #[error("the polynomial is identically zero")]
    ZeroPolynomial,
    #[error("precondition failed: {0}")]
    PreconditionFailed(&'static str),
    #[error("no index triple yields a nonzero determinant")]
    RankDeficient,
}

/// Everything needed to reuse a rank-three witness: Δ, the point, its
/// vanishing order a there, the chosen derivative indices k₀ < k₁ < k₂ ≤ a+2
/// and the nonzero determinant of (P_i^⟨k_j⟩(α)).
#[derive(Clone, Debug)]
pub struct IndependenceCertificate {
    pub delta: Poly,
    pub alpha: Rat,
    pub a: usize,
    pub indices: (u32, u32, u32),
    pub det_value: Rat,
}

/// 3×3 polynomial determinant by cofactor expansion along `row`.
fn det3_poly_along(m: &[[&Poly; 3]; 3], row: usize) -> Poly {
    let mut acc = Poly::zero();
    for col in 0..3 {
        let (r1, r2) = match row {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let (c1, c2) = match col {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let minor = &(m[r1][c1] * m[r2][c2]) - &(m[r1][c2] * m[r2][c1]);
        let term = m[row][col] * &minor;
        acc = if (row + col) % 2 == 0 {
            &acc + &term
        } else {
            &acc - &term
        };
    }
    acc
}

pub(crate) fn det3_rat(m: &[[Rat; 3]; 3]) -> Rat {
    let minor = |r1: usize, r2: usize, c1: usize, c2: usize| {
        &m[r1][c1] * &m[r2][c2] - &m[r1][c2] * &m[r2][c1]
    };
    &m[0][0] * minor(1, 2, 1, 2) - &m[0][1] * minor(1, 2, 0, 2) + &m[0][2] * minor(1, 2, 0, 1)
}

/// Determinant of the matrix whose k-th row is the k-th full-power image of
/// the triple, k = 0, 1, 2. Degree stays within the sum of the row degree
/// caps; asserted.
pub fn delta_poly(family: &DerivedFamily) -> Poly {
    assert!(family.square.len() >= 3, "need images through k = 2");
    let rows: [[&Poly; 3]; 3] = [
        [&family.square[0][0], &family.square[0][1], &family.square[0][2]],
        [&family.square[1][0], &family.square[1][1], &family.square[1][2]],
        [&family.square[2][0], &family.square[2][1], &family.square[2][2]],
    ];
    let det = det3_poly_along(&rows, 0);
    let cap: usize = rows
        .iter()
        .map(|row| row.iter().filter_map(|p| p.degree()).max().unwrap_or(0))
        .sum();
    assert!(det.degree().unwrap_or(0) <= cap);
    det
}

/// The point among `points` where Q vanishes to the smallest order, with
/// that order. A nonzero Q of degree d cannot vanish to order above d/t at
/// every one of t distinct points; asserted on the way out.
pub fn low_order_point(q: &Poly, points: &[Rat]) -> Result<(Rat, usize), IndependenceError> {
    if q.is_zero() {
        return Err(IndependenceError::ZeroPolynomial);
    }
    for (i, p) in points.iter().enumerate() {
        assert!(!points[..i].contains(p), "evaluation points must be distinct");
    }
    assert!(!points.is_empty());
    let mut best: Option<(Rat, usize)> = None;
    for p in points {
        let ord = q.ord_at(p).expect("nonzero polynomial");
        if best.as_ref().is_none_or(|(_, b)| ord < *b) {
            best = Some((p.clone(), ord));
        }
    }
    let (point, ord) = best.unwrap();
    assert!(ord * points.len() <= q.degree().unwrap_or(0));
    Ok((point, ord))
}

/// Scans index triples k₀ < k₁ < k₂ ≤ a+2 in ascending (k₂, k₁, k₀) order
/// and certifies the first whose divided-power evaluation matrix at α has
/// nonzero determinant. Smaller k₂ is strictly cheaper downstream, so the
/// scan stops at the first hit.
pub fn rank3_certificate(
    ctx: &OperatorContext,
    family: &DerivedFamily,
    cfg: &PadeConfig,
    alpha: &Rat,
) -> Result<IndependenceCertificate, IndependenceError> {
    if alpha.is_zero() {
        return Err(IndependenceError::PreconditionFailed("alpha is zero"));
    }
    if ctx.t.eval(alpha).is_zero() {
        return Err(IndependenceError::PreconditionFailed("T vanishes at alpha"));
    }
    if !cfg.nondegeneracy_regime() {
        return Err(IndependenceError::PreconditionFailed(
            "degree at or below the nondegeneracy threshold",
        ));
    }
    let delta = delta_poly(family);
    if delta.is_zero() {
        return Err(IndependenceError::RankDeficient);
    }
    let a = delta.ord_at(alpha).expect("nonzero determinant");
    if family.angle.len() <= a + 2 {
        return Err(IndependenceError::PreconditionFailed(
            "family not built through a + 2",
        ));
    }

    let evals: Vec<[Rat; 3]> = (0..=a + 2)
        .map(|k| {
            [
                family.angle[k][0].eval(alpha),
                family.angle[k][1].eval(alpha),
                family.angle[k][2].eval(alpha),
            ]
        })
        .collect();
    for k2 in 2..=a + 2 {
        for k1 in 1..k2 {
            for k0 in 0..k1 {
                let m = [
                    [evals[k0][0].clone(), evals[k1][0].clone(), evals[k2][0].clone()],
                    [evals[k0][1].clone(), evals[k1][1].clone(), evals[k2][1].clone()],
                    [evals[k0][2].clone(), evals[k1][2].clone(), evals[k2][2].clone()],
                ];
                let det = det3_rat(&m);
                if !det.is_zero() {
                    return Ok(IndependenceCertificate {
                        delta,
                        alpha: alpha.clone(),
                        a,
                        indices: (k0 as u32, k1 as u32, k2 as u32),
                        det_value: det,
                    });
                }
            }
        }
    }
    Err(IndependenceError::RankDeficient)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, rat_int};
    use crate::operators::{build_family, make_context};
    use crate::pade::build_initial_pade;

    fn d20_setup() -> (OperatorContext, DerivedFamily, PadeConfig) {
        let cfg = PadeConfig::new(2, 2, 4, 4, 20, rat(1, 2)).unwrap();
        let triple = build_initial_pade(&cfg).unwrap();
        let ctx = make_context(2, 4, 2, 4);
        let family = build_family(&ctx, [&triple.p0, &triple.p1, &triple.p2], 4);
        (ctx, family, cfg)
    }

    #[test]
    fn proportional_rows_kill_the_determinant() {
        let (_, mut family, _) = d20_setup();
        family.square[1] = family.square[0].clone();
        assert!(delta_poly(&family).is_zero());
    }

    #[test]
    fn built_instance_has_nonzero_delta_within_degree() {
        let (_, family, _) = d20_setup();
        let delta = delta_poly(&family);
        assert!(!delta.is_zero());
        assert!(delta.degree().unwrap() <= 72);
    }

    #[test]
    fn cofactor_rows_agree() {
        let (_, family, _) = d20_setup();
        let rows: [[&Poly; 3]; 3] = [
            [&family.square[0][0], &family.square[0][1], &family.square[0][2]],
            [&family.square[1][0], &family.square[1][1], &family.square[1][2]],
            [&family.square[2][0], &family.square[2][1], &family.square[2][2]],
        ];
        let d0 = det3_poly_along(&rows, 0);
        let d1 = det3_poly_along(&rows, 1);
        let d2 = det3_poly_along(&rows, 2);
        assert_eq!(d0, d1);
        assert_eq!(d0, d2);
    }

    #[test]
    fn ord_by_division_matches_derivative_counting() {
        let (_, family, _) = d20_setup();
        let delta = delta_poly(&family);
        let alpha = rat(1, 97);
        let a = delta.ord_at(&alpha).unwrap();
        let mut j = 0usize;
        let mut cur = delta.clone();
        while cur.eval(&alpha).is_zero() {
            j += 1;
            cur = cur.derivative();
        }
        assert_eq!(a, j);
    }

    #[test]
    fn low_order_point_examples() {
        // x(x-1)^2 over {0, 1}.
        let q = &Poly::x() * &(&Poly::x() - &Poly::one()).pow(2);
        let (p, ord) = low_order_point(&q, &[rat_int(0), rat_int(1)]).unwrap();
        assert_eq!((p, ord), (rat_int(0), 1));

        // (x-1)(x-2)(x-3) over {1,2,3,4}.
        let q = Poly::new(vec![rat_int(-6), rat_int(11), rat_int(-6), rat_int(1)]);
        let pts = [rat_int(1), rat_int(2), rat_int(3), rat_int(4)];
        let (p, ord) = low_order_point(&q, &pts).unwrap();
        assert_eq!((p, ord), (rat_int(4), 0));

        assert!(matches!(
            low_order_point(&Poly::zero(), &[rat_int(0)]),
            Err(IndependenceError::ZeroPolynomial)
        ));
    }

    #[test]
    fn many_points_force_order_zero() {
        let (_, family, _) = d20_setup();
        let delta = delta_poly(&family);
        let pts: Vec<Rat> = (1..=100).map(rat_int).collect();
        let (_, ord) = low_order_point(&delta, &pts).unwrap();
        assert_eq!(ord, 0);
    }

    #[test]
    fn certificate_on_the_built_instance() {
        let (ctx, family, cfg) = d20_setup();
        let alpha = rat(1, 97);
        let cert = rank3_certificate(&ctx, &family, &cfg, &alpha).unwrap();
        assert!(!cert.det_value.is_zero());
        let (k0, k1, k2) = cert.indices;
        assert!(k0 < k1 && k1 < k2 && k2 as usize <= cert.a + 2);
        if cert.a == 0 {
            assert_eq!(cert.indices, (0, 1, 2));
        }

        // Rank transfers to the full-power matrix: the change of basis is
        // triangular with determinant prod k!, so some full-power triple is
        // also nonsingular.
        let evals: Vec<[Rat; 3]> = (0..=cert.a + 2)
            .map(|k| {
                [
                    family.square[k][0].eval(&alpha),
                    family.square[k][1].eval(&alpha),
                    family.square[k][2].eval(&alpha),
                ]
            })
            .collect();
        let mut found = false;
        'outer: for k2 in 2..=cert.a + 2 {
            for k1 in 1..k2 {
                for k0 in 0..k1 {
                    let m = [
                        [evals[k0][0].clone(), evals[k1][0].clone(), evals[k2][0].clone()],
                        [evals[k0][1].clone(), evals[k1][1].clone(), evals[k2][1].clone()],
                        [evals[k0][2].clone(), evals[k1][2].clone(), evals[k2][2].clone()],
                    ];
                    if !det3_rat(&m).is_zero() {
                        found = true;
                        break 'outer;
                    }
                }
            }
        }
        assert!(found);
    }

    #[test]
    fn preconditions_are_enforced() {
        let (ctx, family, cfg) = d20_setup();
        assert!(matches!(
            rank3_certificate(&ctx, &family, &cfg, &Rat::zero()),
            Err(IndependenceError::PreconditionFailed(_))
        ));
        // 1/2 is a root of the factor (1 - 2x) of T.
        assert!(matches!(
            rank3_certificate(&ctx, &family, &cfg, &rat(1, 2)),
            Err(IndependenceError::PreconditionFailed(_))
        ));
        let shallow = PadeConfig::new(2, 2, 4, 4, 10, rat(1, 2)).unwrap();
        assert!(matches!(
            rank3_certificate(&ctx, &family, &shallow, &rat(1, 97)),
            Err(IndependenceError::PreconditionFailed(_))
        ));
    }

    #[test]
    fn zeroed_row_is_rank_deficient() {
        let (ctx, mut family, cfg) = d20_setup();
        for k in 0..family.angle.len() {
            family.angle[k][2] = Poly::zero();
        }
        assert!(matches!(
            rank3_certificate(&ctx, &family, &cfg, &rat(1, 97)),
            Err(IndependenceError::RankDeficient)
        ));
    }
}
