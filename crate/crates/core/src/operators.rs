//! The derivation layer: T·(d/dx + A_i) acting on polynomials, its divided
//! power variant, and the change-of-basis polynomials connecting the two.
//!
//! A_i is the logarithmic derivative of ω_i, so (d/dx + A_i)·P differentiates
//! P·ω_i and strips the ω_i back off. Everything is kept polynomial by
//! multiplying through with T = r·∏_{j≤𝓜}(1−jx): one application maps P to
//! T·P′ + (T·A_i)·P with T·A_i an integer polynomial.

use crate::num::{int_pow, rat, rat_int, Int, Rat};
use crate::omega::{omega_series, OmegaSpec};
use crate::pade::PadeTriple;
use crate::poly::Poly;
use crate::series::Series;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OperatorError {
    #[error("operator identity violated: {0}")]
    LemmaViolation(String),
}

/// T, the rational functions A_i (as numerator/denominator pairs), and the
/// integer polynomials T·A_i, for the family ω₀ = 1, ω₁, ω₂.
#[derive(Clone, Debug)]
pub struct OperatorContext {
    pub r: u32,
    pub m_cap: u32,
    pub beta1: u32,
    pub beta2: u32,
    pub t: Poly,
    pub a: [(Poly, Poly); 3],
    pub ta: [Poly; 3],
}

/// ∏_{j in range}(1 − jx) with exact integer coefficients.
fn linear_product(js: impl Iterator<Item = u32>) -> Poly {
    let mut acc = Poly::one();
    for j in js {
        let f = Poly::new(vec![Rat::one(), rat_int(-(j as i64))]);
        acc = &acc * &f;
    }
    acc
}

pub fn make_context(r: u32, m_cap: u32, beta1: u32, beta2: u32) -> OperatorContext {
    assert!(2 <= r && r <= beta1 && beta1 < beta2 && beta2 <= m_cap);
    let t = linear_product(1..=m_cap).scale(&rat_int(r as i64));
    assert_eq!(t.degree(), Some(m_cap as usize));

    // T·A_i = Σ_{j<β_i} j·∏_{m≤𝓜, m≠j}(1−mx): the r in T cancels the 1/r in
    // A_i, leaving an integer polynomial of degree 𝓜−1.
    let ta_for = |beta: u32| {
        let mut acc = Poly::zero();
        for j in 1..beta {
            let prod = linear_product((1..=m_cap).filter(|&m| m != j));
            acc = &acc + &prod.scale(&rat_int(j as i64));
        }
        acc
    };
    let ta = [Poly::zero(), ta_for(beta1), ta_for(beta2)];
    for p in &ta {
        assert!(p.is_integer());
        assert!(p.degree().unwrap_or(0) <= m_cap as usize);
    }
    let a = [
        (Poly::zero(), Poly::one()),
        (ta[1].clone(), t.clone()),
        (ta[2].clone(), t.clone()),
    ];
    OperatorContext { r, m_cap, beta1, beta2, t, a, ta }
}

impl OperatorContext {
    fn omega_specs(&self) -> [OmegaSpec; 2] {
        [
            OmegaSpec::new(self.r, self.beta1),
            OmegaSpec::new(self.r, self.beta2),
        ]
    }

    /// One application of T·(d/dx + A_i).
    fn step(&self, p: &Poly, i: usize) -> Poly {
        &(&self.t * &p.derivative()) + &(&self.ta[i] * p)
    }
}

/// (T·(d/dx + A_i))^k P. Integer in, integer out, degree grows by 𝓜 per
/// application; both are asserted.
pub fn apply_square(ctx: &OperatorContext, p: &Poly, i: usize, k: u32) -> Poly {
    assert!(p.is_integer());
    let deg_in = p.degree().unwrap_or(0);
    let mut acc = p.clone();
    for _ in 0..k {
        acc = ctx.step(&acc, i);
    }
    assert!(acc.is_integer());
    assert!(acc.degree().unwrap_or(0) <= deg_in + (k * ctx.m_cap) as usize);
    acc
}

/// Ω_ℓ = T^ℓ/ℓ! · ω_i^{(ℓ)}/ω_i for ℓ = 0..=k_max, each a polynomial. The
/// recurrence follows from differentiating ω^{(ℓ)} = ℓ!·Ω_ℓ·ω/T^ℓ once.
pub fn omega_log_derivatives(ctx: &OperatorContext, i: usize, k_max: u32) -> Vec<Poly> {
    let tp = ctx.t.derivative();
    let mut out = vec![Poly::one()];
    for ell in 0..k_max {
        let cur = &out[ell as usize];
        let drift = &ctx.ta[i] - &tp.scale(&rat_int(ell as i64));
        let next = &(&ctx.t * &cur.derivative()) + &(&drift * cur);
        out.push(next.scale(&rat(1, ell as i64 + 1)));
    }
    out
}

fn factorial(k: u32) -> Int {
    (1..=k as u64).fold(Int::one(), |acc, v| acc * Int::from(v))
}

/// Largest power of r dividing all coefficient denominators must cover them:
/// lcm of denominators divides r^k.
fn assert_denominators_divide(p: &Poly, r: u32, k: u32) {
    let lcm = p.denom_lcm();
    let cap = int_pow(&Int::from(r), k as u64);
    assert!(
        (&cap % &lcm).is_zero(),
        "denominator {lcm} escapes r^{k}"
    );
}

/// T^k/k!·(d/dx + A_i)^k P through the Leibniz form: the ℓ-th term pairs the
/// divided derivative T^{k−ℓ}P^{(k−ℓ)}/(k−ℓ)! with Ω_ℓ. Test oracle for
/// [`apply_angle`]; quadratic in k where the production path shares work.
pub fn apply_angle_leibniz(ctx: &OperatorContext, p: &Poly, i: usize, k: u32) -> Poly {
    assert!(p.is_integer());
    let omegas = omega_log_derivatives(ctx, i, k);
    let mut acc = Poly::zero();
    for ell in 0..=k {
        let m = (k - ell) as usize;
        let term = &ctx.t.pow(k - ell) * &p.divided_derivative(m);
        acc = &acc + &(&term * &omegas[ell as usize]);
    }
    assert_denominators_divide(&acc, ctx.r, k);
    acc
}

/// Connection polynomials q_{k,j}, 1 ≤ j ≤ k ≤ k_max: q_{1,1} = 1 and
/// q_{k+1,j} = q′_{k,j}·T + j·q_{k,j}·T′ + q_{k,j−1}. Integer coefficients,
/// deg q_{k,j} ≤ (k−j)·deg T; both asserted.
#[derive(Clone, Debug)]
pub struct QTable {
    rows: Vec<Vec<Poly>>,
}

impl QTable {
    /// q_{k,j} for 1 ≤ j ≤ k.
    pub fn q(&self, k: u32, j: u32) -> &Poly {
        &self.rows[k as usize - 1][j as usize - 1]
    }

    pub fn k_max(&self) -> u32 {
        self.rows.len() as u32
    }
}

pub fn q_polynomials(ctx: &OperatorContext, k_max: u32) -> QTable {
    assert!(k_max >= 1);
    let tp = ctx.t.derivative();
    let mut rows = vec![vec![Poly::one()]];
    for k in 1..k_max {
        let prev = &rows[k as usize - 1];
        let mut row = Vec::with_capacity(k as usize + 1);
        for j in 1..=k {
            let qkj = &prev[j as usize - 1];
            let mut next = &(&qkj.derivative() * &ctx.t)
                + &(qkj * &tp).scale(&rat_int(j as i64));
            if j >= 2 {
                next = &next + &prev[j as usize - 2];
            }
            row.push(next);
        }
        row.push(Poly::one());
        rows.push(row);
    }
    for (ki, row) in rows.iter().enumerate() {
        for (ji, q) in row.iter().enumerate() {
            assert!(q.is_integer());
            assert!(q.degree().unwrap_or(0) <= (ki - ji) * ctx.m_cap as usize);
        }
    }
    QTable { rows }
}

/// Production path for T^k/k!·(d/dx + A_i)^k P: the full-power images are
/// cheap, and k!·P^⟨k⟩ = P^[k] − Σ_{j<k} q_{k,j}·j!·P^⟨j⟩ recovers the
/// divided-power family from them.
pub fn apply_angle(ctx: &OperatorContext, p: &Poly, i: usize, k: u32) -> Poly {
    assert!(p.is_integer());
    if k == 0 {
        return p.clone();
    }
    let q = q_polynomials(ctx, k);
    let angles = angle_family_via_relation(ctx, p, i, k, &q);
    angles.into_iter().last().unwrap()
}

fn angle_family_via_relation(
    ctx: &OperatorContext,
    p: &Poly,
    i: usize,
    k_max: u32,
    q: &QTable,
) -> Vec<Poly> {
    let deg_in = p.degree().unwrap_or(0);
    let mut angles = vec![p.clone()];
    let mut square = p.clone();
    for k in 1..=k_max {
        square = ctx.step(&square, i);
        let mut rhs = square.clone();
        for j in 1..k {
            let scaled = angles[j as usize].scale(&Rat::from_integer(factorial(j)));
            rhs = &rhs - &(q.q(k, j) * &scaled);
        }
        let angle = rhs.scale(&Rat::from_integer(factorial(k)).recip());
        assert!(angle.degree().unwrap_or(0) <= deg_in + (k * ctx.m_cap) as usize);
        assert_denominators_divide(&angle, ctx.r, k);
        angles.push(angle);
    }
    angles
}

/// The square and angle images of one polynomial triple through k_max, with
/// the connection table that links them.
#[derive(Clone, Debug)]
pub struct DerivedFamily {
    pub square: Vec<[Poly; 3]>,
    pub angle: Vec<[Poly; 3]>,
    pub q: QTable,
}

pub fn build_family(ctx: &OperatorContext, polys: [&Poly; 3], k_max: u32) -> DerivedFamily {
    assert!(k_max >= 1);
    let q = q_polynomials(ctx, k_max);
    let mut square = vec![[polys[0].clone(), polys[1].clone(), polys[2].clone()]];
    for k in 1..=k_max {
        let prev = &square[k as usize - 1];
        square.push([
            ctx.step(&prev[0], 0),
            ctx.step(&prev[1], 1),
            ctx.step(&prev[2], 2),
        ]);
    }
    let mut angle: Vec<[Poly; 3]> = Vec::with_capacity(k_max as usize + 1);
    let per_i: Vec<Vec<Poly>> = (0..3)
        .map(|i| angle_family_via_relation(ctx, polys[i], i, k_max, &q))
        .collect();
    for k in 0..=k_max as usize {
        angle.push([
            per_i[0][k].clone(),
            per_i[1][k].clone(),
            per_i[2][k].clone(),
        ]);
    }
    DerivedFamily { square, angle, q }
}

/// Exact check of k!·P^⟨k⟩ = P^[k] − Σ_{j<k} q_{k,j}·j!·P^⟨j⟩ for every i
/// and k ≤ k_max.
pub fn check_bracket_relation(
    ctx: &OperatorContext,
    family: &DerivedFamily,
    k_max: u32,
) -> Result<(), OperatorError> {
    let _ = ctx;
    assert!((family.square.len() as u32) > k_max && (family.angle.len() as u32) > k_max);
    for i in 0..3 {
        for k in 1..=k_max {
            let lhs = family.angle[k as usize][i].scale(&Rat::from_integer(factorial(k)));
            let mut rhs = family.square[k as usize][i].clone();
            for j in 1..k {
                let scaled =
                    family.angle[j as usize][i].scale(&Rat::from_integer(factorial(j)));
                rhs = &rhs - &(family.q.q(k, j) * &scaled);
            }
            if !(&lhs - &rhs).is_zero() {
                return Err(OperatorError::LemmaViolation(format!(
                    "connection identity fails at i={i}, k={k}"
                )));
            }
        }
    }
    Ok(())
}

/// Σ_i p_i·ω_i as an exact series through order l.
fn combination_series(ctx: &OperatorContext, polys: [&Poly; 3], l: usize) -> Series {
    let [s1, s2] = ctx.omega_specs();
    let acc = Series::from_poly(polys[0], l);
    let acc = &acc + &omega_series(s1, l + 1).mul_poly(polys[1]);
    &acc + &omega_series(s2, l + 1).mul_poly(polys[2])
}

fn first_mismatch(a: &Series, b: &Series, upto: usize) -> Option<usize> {
    (0..=upto).find(|&v| a.coeff(v) != b.coeff(v))
}

/// Verifies both operator images of R = ΣP_iω_i as exact truncated series:
/// (T·d/dx)^k R matches Σ P_i^[k]ω_i and T^k/k!·R^{(k)} matches Σ P_i^⟨k⟩ω_i
/// through order l − k, and the divided image stays zero through
/// vanish_order − k.
pub fn check_series_identity(
    ctx: &OperatorContext,
    triple: &PadeTriple,
    family: &DerivedFamily,
    k_max: u32,
    l: usize,
) -> Result<(), OperatorError> {
    assert!(l > k_max as usize);
    let r_series = combination_series(
        ctx,
        [&triple.p0, &triple.p1, &triple.p2],
        l,
    );

    let mut square_side = r_series.clone();
    let mut kfact = Int::one();
    for k in 1..=k_max {
        square_side = square_side.derivative().mul_poly(&ctx.t);
        kfact *= Int::from(k as u64);
        let upto = l - k as usize;

        let rhs = combination_series(
            ctx,
            [
                &family.square[k as usize][0],
                &family.square[k as usize][1],
                &family.square[k as usize][2],
            ],
            l,
        );
        if let Some(v) = first_mismatch(&square_side, &rhs, upto) {
            return Err(OperatorError::LemmaViolation(format!(
                "full-power series identity fails at k={k}, order {v}"
            )));
        }

        let mut angle_side = r_series.clone();
        for _ in 0..k {
            angle_side = angle_side.derivative();
        }
        let angle_side = angle_side
            .scale(&Rat::from_integer(kfact.clone()).recip())
            .mul_poly(&ctx.t.pow(k));
        let rhs = combination_series(
            ctx,
            [
                &family.angle[k as usize][0],
                &family.angle[k as usize][1],
                &family.angle[k as usize][2],
            ],
            l,
        );
        if let Some(v) = first_mismatch(&angle_side, &rhs, upto) {
            return Err(OperatorError::LemmaViolation(format!(
                "divided-power series identity fails at k={k}, order {v}"
            )));
        }
        let floor = triple.vanish_order.saturating_sub(k as usize).min(upto);
        if let Some(v) = (0..=floor).find(|&v| !angle_side.coeff(v).is_zero()) {
            return Err(OperatorError::LemmaViolation(format!(
                "divided image nonzero at order {v} <= {floor} for k={k}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pade::{build_initial_pade, PadeConfig};

    fn ctx234() -> OperatorContext {
        make_context(2, 3, 2, 3)
    }

    /// Context with the two-factor T, below the smallest valid cutoff; only
    /// usable for the T-driven pieces (q table), not the A_i.
    fn synthetic_t2_ctx() -> OperatorContext {
        let t = linear_product(1..=2).scale(&rat_int(2));
        OperatorContext {
            r: 2,
            m_cap: 2,
            beta1: 2,
            beta2: 2,
            a: [
                (Poly::zero(), Poly::one()),
                (Poly::zero(), Poly::one()),
                (Poly::zero(), Poly::one()),
            ],
            ta: [Poly::zero(), Poly::zero(), Poly::zero()],
            t,
        }
    }

    #[test]
    fn t_is_the_scaled_linear_product() {
        assert_eq!(
            synthetic_t2_ctx().t,
            Poly::from_int_coeffs(&[2, -6, 4])
        );
        let ctx = ctx234();
        // 2(1-x)(1-2x)(1-3x) = 2 - 12x + 22x^2 - 12x^3
        assert_eq!(ctx.t, Poly::from_int_coeffs(&[2, -12, 22, -12]));
    }

    #[test]
    fn log_derivative_values() {
        let ctx = ctx234();
        assert!(ctx.ta[0].is_zero());
        assert!(ctx.a[0].0.is_zero());
        // A_1 = (1/2)/(1-x): check by value, independent of representation.
        let x0 = rat(1, 5);
        let want = rat(1, 2) / (Rat::one() - &x0);
        let got = ctx.a[1].0.eval(&x0) / ctx.a[1].1.eval(&x0);
        assert_eq!(got, want);
    }

    #[test]
    fn square_image_basics() {
        let ctx = ctx234();
        let p = Poly::from_int_coeffs(&[7, -3, 2, 1]);
        assert_eq!(apply_square(&ctx, &p, 1, 0), p);
        // A_0 = 0, so the image of x is T·1.
        assert_eq!(apply_square(&ctx, &Poly::x(), 0, 1), ctx.t);
    }

    #[test]
    fn q_table_first_rows() {
        let ctx = synthetic_t2_ctx();
        let q = q_polynomials(&ctx, 3);
        assert_eq!(q.q(1, 1), &Poly::one());
        assert_eq!(q.q(2, 2), &Poly::one());
        assert_eq!(q.q(3, 3), &Poly::one());
        assert_eq!(q.q(2, 1), &Poly::from_int_coeffs(&[-6, 8]));
        assert_eq!(q.q(2, 1), &ctx.t.derivative());
    }

    #[test]
    fn divided_images_of_the_two_paths_agree() {
        let ctx = ctx234();
        let p = Poly::from_int_coeffs(&[3, -1, 4, 1, -5, 9, 2]);
        for i in 0..3 {
            for k in 0..=5u32 {
                let fast = apply_angle(&ctx, &p, i, k);
                let oracle = apply_angle_leibniz(&ctx, &p, i, k);
                assert_eq!(fast, oracle, "paths disagree at i={i}, k={k}");
            }
            assert_eq!(
                apply_angle(&ctx, &p, i, 1),
                apply_square(&ctx, &p, i, 1)
            );
        }
    }

    #[test]
    fn bracket_relation_detects_corruption() {
        let ctx = ctx234();
        let polys = [
            Poly::from_int_coeffs(&[1, 0, -2, 5]),
            Poly::from_int_coeffs(&[0, 3, 1]),
            Poly::from_int_coeffs(&[-4, 2, 0, 0, 1]),
        ];
        let mut family = build_family(&ctx, [&polys[0], &polys[1], &polys[2]], 3);
        check_bracket_relation(&ctx, &family, 3).unwrap();
        family.q.rows[2][0] = &family.q.rows[2][0] + &Poly::one();
        let err = check_bracket_relation(&ctx, &family, 3).unwrap_err();
        assert!(matches!(err, OperatorError::LemmaViolation(ref m) if m.contains("k=3")));
    }

    #[test]
    fn series_identities_on_a_build() {
        let cfg = PadeConfig::new(2, 2, 4, 4, 10, rat(1, 2)).unwrap();
        let triple = build_initial_pade(&cfg).unwrap();
        let ctx = make_context(2, 4, 2, 4);
        let family = build_family(&ctx, [&triple.p0, &triple.p1, &triple.p2], 3);
        check_series_identity(&ctx, &triple, &family, 3, 35).unwrap();

        // The full-power image loses at most one vanishing order per step.
        let r1 = combination_series(
            &ctx,
            [&family.square[1][0], &family.square[1][1], &family.square[1][2]],
            30,
        );
        for v in 0..=24 {
            assert!(r1.coeff(v).is_zero());
        }
    }
}
