//! Small integer solutions of homogeneous linear systems.
//!
//! [`solve_small`] returns a nonzero integer vector X with sys·X = 0 and
//! max|X_i| ≤ (3AN)^(M/(N−M)), the pigeonhole bound exposed by
//! [`SiegelBound`]. The bound check is exact: |X|^(N−M) ≤ (3AN)^M over
//! integers, never through floats.
//!
//! Strategy: primitive fraction-free elimination gives an integer kernel
//! basis; the basis is lattice-reduced and the best vector checked against
//! the bound. That basis can span a proper finite-index sublattice of
//! ker ∩ ℤ^N, and the pigeonhole vector is only promised in the full
//! lattice, so [`saturated_kernel_basis`] (a transform-tracked echelon form
//! of the transpose) backs it up. Reduction keeps the basis and its Gram
//! matrix exact and uses extended-exponent floats only to steer size
//! reduction and swaps, so a numerically bad run can only degrade quality,
//! not correctness. Fallbacks: a bounded search over small combinations of
//! the reduced basis, then [`brute_force_oracle`].

use crate::bigfloat::BigFloat;
use crate::num::{int_pow, Int, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SiegelError {
    #[error("system shape invalid: {0}")]
    Shape(&'static str),
    #[error("no solution within the pigeonhole bound was found")]
    BoundNotMet,
    #[error("enumeration box exceeds the configured budget")]
    BudgetExceeded,
}

/// M×N integer system A·X = 0 with N > M ≥ 1.
#[derive(Clone, Debug)]
pub struct HomogeneousSystem {
    rows: Vec<Vec<Int>>,
    coeff_bound: Int,
}

impl HomogeneousSystem {
    pub fn new(rows: Vec<Vec<Int>>) -> Result<Self, SiegelError> {
        let m = rows.len();
        if m == 0 {
            return Err(SiegelError::Shape("at least one equation required"));
        }
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(SiegelError::Shape("ragged rows"));
        }
        if n <= m {
            return Err(SiegelError::Shape("need more unknowns than equations"));
        }
        // coeff_bound is recomputed here, never trusted from the caller,
        // and clamped to ≥ 1.
        let mut a = Int::one();
        for row in &rows {
            for v in row {
                if v.magnitude() > a.magnitude() {
                    a = v.abs();
                }
            }
        }
        Ok(HomogeneousSystem { rows, coeff_bound: a })
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<Int>] {
        &self.rows
    }

    pub fn coeff_bound(&self) -> &Int {
        &self.coeff_bound
    }

    pub fn apply(&self, x: &[Int]) -> Vec<Int> {
        assert_eq!(x.len(), self.n());
        self.rows
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_solution(&self, x: &[Int]) -> bool {
        x.len() == self.n() && self.apply(x).iter().all(Zero::is_zero)
    }
}

/// The pigeonhole bound (3AN)^(M/(N−M)), kept in exponent form so membership
/// tests stay exact.
#[derive(Clone, Debug)]
pub struct SiegelBound {
    base: Int,
    m: usize,
    n_minus_m: usize,
}

impl SiegelBound {
    pub fn of(sys: &HomogeneousSystem) -> Self {
        SiegelBound {
            base: Int::from(3) * &sys.coeff_bound * Int::from(sys.n() as u64),
            m: sys.m(),
            n_minus_m: sys.n() - sys.m(),
        }
    }

    /// 3AN.
    pub fn base(&self) -> &Int {
        &self.base
    }

    /// True iff |v| ≤ (3AN)^(M/(N−M)), decided as |v|^(N−M) ≤ (3AN)^M.
    /// Bit-length gates settle the far-off cases without forming the powers.
    pub fn admits_abs(&self, v: &Int) -> bool {
        let vbits = v.bits();
        if vbits == 0 {
            return true;
        }
        let (nm, m) = (self.n_minus_m as u128, self.m as u128);
        let bbits = self.base.bits() as u128;
        if (vbits as u128 - 1) * nm >= bbits * m {
            return false;
        }
        if (vbits as u128) * nm <= (bbits - 1) * m {
            return true;
        }
        int_pow(&v.abs(), self.n_minus_m as u64) <= int_pow(&self.base, self.m as u64)
    }

    pub fn admits(&self, x: &[Int]) -> bool {
        x.iter().all(|v| self.admits_abs(v))
    }

    /// Largest integer within the bound: floor((3AN)^(M/(N−M))).
    pub fn floor_int(&self) -> Int {
        let p = int_pow(&self.base, self.m as u64);
        let mut w = crate::num::int_nth_root(&p, self.n_minus_m as u32).expect("base > 0");
        // int_nth_root floors; that is exactly what is wanted.
        if int_pow(&(&w + Int::one()), self.n_minus_m as u64) <= p {
            w += Int::one();
        }
        w
    }

    /// Float view for reports; rounded upward via the exponent, so it never
    /// understates the bound.
    pub fn approx_f64(&self) -> f64 {
        let log2 = self.base.bits() as f64 * self.m as f64 / self.n_minus_m as f64;
        if log2 >= 1023.0 {
            f64::INFINITY
        } else {
            2f64.powf(log2)
        }
    }
}

/// First nonzero entry made positive; zero vectors pass through.
fn sign_normalize(v: &mut [Int]) {
    if let Some(first) = v.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in v.iter_mut() {
                *x = -x.clone();
            }
        }
    }
}

/// Divide by the gcd of the entries; zero vectors pass through.
fn make_primitive(v: &mut [Int]) {
    let mut g = Int::zero();
    for x in v.iter() {
        g = g.gcd(x);
    }
    if g > Int::one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
}

fn max_abs(v: &[Int]) -> Int {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(Int::zero)
}

/// rows[i] -= q * rows[j] for i != j.
fn row_sub(rows: &mut [Vec<Int>], i: usize, j: usize, q: &Int) {
    debug_assert!(i != j);
    if q.is_zero() {
        return;
    }
    if j < i {
        let (head, tail) = rows.split_at_mut(i);
        for (d, s) in tail[0].iter_mut().zip(&head[j]) {
            *d -= q * s;
        }
    } else {
        let (head, tail) = rows.split_at_mut(j);
        for (d, s) in head[i].iter_mut().zip(&tail[0]) {
            *d -= q * s;
        }
    }
}

/// Saturated integer kernel of the system, via transform-tracked row echelon
/// of the transpose: with U unimodular and U·Aᵀ in echelon form, the U rows
/// opposite the zero echelon rows are a basis of ker(A) that is a full
/// sublattice of its rational span, so no integer kernel point lies outside
/// its integer span. Slower than [`kernel_basis`] but immune to index gaps.
pub fn saturated_kernel_basis(sys: &HomogeneousSystem) -> Vec<Vec<Int>> {
    let (m, n) = (sys.m(), sys.n());
    let mut arows: Vec<Vec<Int>> = sys.rows.to_vec();
    for row in &mut arows {
        make_primitive(row);
    }
    let mut at: Vec<Vec<Int>> = (0..n)
        .map(|j| (0..m).map(|i| arows[i][j].clone()).collect())
        .collect();
    let mut u: Vec<Vec<Int>> = (0..n)
        .map(|i| {
            let mut row = vec![Int::zero(); n];
            row[i] = Int::one();
            row
        })
        .collect();
    let mut rank = 0usize;
    for c in 0..m {
        // Nearest-quotient Euclidean passes keep every entry within half the
        // current column minimum, so sizes stay balanced; a one-shot extended
        // gcd cascade against a fixed pivot swells without bound here.
        loop {
            let nz: Vec<usize> = (rank..n).filter(|&i| !at[i][c].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            if nz.len() == 1 {
                let p = nz[0];
                at.swap(rank, p);
                u.swap(rank, p);
                if at[rank][c].is_negative() {
                    for v in at[rank].iter_mut() {
                        *v = -v.clone();
                    }
                    for v in u[rank].iter_mut() {
                        *v = -v.clone();
                    }
                }
                rank += 1;
                break;
            }
            let p = *nz
                .iter()
                .min_by(|&&a, &&b| {
                    at[a][c]
                        .magnitude()
                        .cmp(at[b][c].magnitude())
                        .then(a.cmp(&b))
                })
                .unwrap();
            let piv = at[p][c].clone();
            for &i in &nz {
                if i == p {
                    continue;
                }
                let q = round_div_int(&at[i][c], &piv);
                row_sub(&mut at, i, p, &q);
                row_sub(&mut u, i, p, &q);
            }
        }
    }
    let mut basis: Vec<Vec<Int>> = u.split_off(rank);
    for v in &mut basis {
        sign_normalize(v);
    }
    basis
}

/// Orders candidate solutions: smaller max-norm first, then lexicographic.
fn better_candidate(a: &[Int], b: &[Int]) -> bool {
    match max_abs(a).cmp(&max_abs(b)) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => a < b,
    }
}

/// Integer kernel basis via primitive fraction-free elimination: each update
/// row is (piv·row − fac·pivrow)/content, which preserves the kernel and
/// keeps the structured growth far below the Hadamard worst case. Vectors
/// come back primitive and sign-normalized, one per free column, in free
/// column order.
pub fn kernel_basis(sys: &HomogeneousSystem) -> Vec<Vec<Int>> {
    let (m, n) = (sys.m(), sys.n());
    let mut mat: Vec<Vec<Int>> = sys.rows.to_vec();
    for row in &mut mat {
        make_primitive(row);
    }
    let mut piv_cols: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    while rank < m {
        // Pivot: smallest |entry| among remaining rows and unused columns,
        // ties broken by (column, row) so the run is deterministic.
        let mut best: Option<(usize, usize)> = None;
        for i in rank..m {
            for (j, v) in mat[i].iter().enumerate() {
                if v.is_zero() || piv_cols.contains(&j) {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bi, bj)) => {
                        let cur = &mat[bi][bj];
                        match v.magnitude().cmp(cur.magnitude()) {
                            std::cmp::Ordering::Less => true,
                            std::cmp::Ordering::Greater => false,
                            std::cmp::Ordering::Equal => (j, i) < (bj, bi),
                        }
                    }
                };
                if better {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        mat.swap(rank, pi);
        let piv = mat[rank][pj].clone();
        for i in rank + 1..m {
            if mat[i][pj].is_zero() {
                continue;
            }
            let fac = mat[i][pj].clone();
            let mut row: Vec<Int> = (0..n)
                .map(|j| &piv * &mat[i][j] - &fac * &mat[rank][j])
                .collect();
            make_primitive(&mut row);
            mat[i] = row;
        }
        piv_cols.push(pj);
        rank += 1;
    }

    let free_cols: Vec<usize> = (0..n).filter(|j| !piv_cols.contains(j)).collect();
    let mut basis = Vec::with_capacity(free_cols.len());
    for &fc in &free_cols {
        let mut x: Vec<Rat> = vec![Rat::zero(); n];
        x[fc] = Rat::one();
        for i in (0..rank).rev() {
            let pj = piv_cols[i];
            let mut s = Rat::zero();
            for j in 0..n {
                if j != pj && !x[j].is_zero() && !mat[i][j].is_zero() {
                    s += &x[j] * Rat::from_integer(mat[i][j].clone());
                }
            }
            x[pj] = -s / Rat::from_integer(mat[i][pj].clone());
        }
        let mut den = Int::one();
        for q in &x {
            den = den.lcm(q.denom());
        }
        let mut v: Vec<Int> = x
            .iter()
            .map(|q| q.numer() * (&den / q.denom()))
            .collect();
        make_primitive(&mut v);
        sign_normalize(&mut v);
        basis.push(v);
    }
    basis
}

// ---------------------------------------------------------------------------
// Rounded dyadic arithmetic for steering the lattice reduction. Values are
// BigFloat (exact mantissa, i64 exponent) rounded back to a working precision
// after every operation; the precision escalates when orthogonalization
// cancels through it. Only steering decisions depend on these numbers.

/// Nearest integer to n/d, ties away from zero.
fn round_div_int(n: &Int, d: &Int) -> Int {
    let (q, r) = n.div_rem(d);
    if (r.abs() << 1) >= d.abs() {
        if r.is_negative() == d.is_negative() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

fn fnum(x: &Int, prec: u64) -> BigFloat {
    BigFloat::from_int(x.clone()).round_to(prec).0
}

/// a + b rounded to `prec` bits; an addend more than prec+16 bits below the
/// other is absorbed so mantissas stay bounded.
fn fadd(a: &BigFloat, b: &BigFloat, prec: u64) -> BigFloat {
    if b.is_zero() {
        return a.round_to(prec).0;
    }
    if a.is_zero() {
        return b.round_to(prec).0;
    }
    let (ma, mb) = (a.mag_exp(), b.mag_exp());
    if ma >= mb.saturating_add(prec as i64 + 16) {
        return a.round_to(prec).0;
    }
    if mb >= ma.saturating_add(prec as i64 + 16) {
        return b.round_to(prec).0;
    }
    a.add(b).round_to(prec).0
}

fn fsub(a: &BigFloat, b: &BigFloat, prec: u64) -> BigFloat {
    fadd(a, &b.neg(), prec)
}

fn fmul(a: &BigFloat, b: &BigFloat, prec: u64) -> BigFloat {
    a.mul(b).round_to(prec).0
}

/// a/b to about `prec` bits; b must be nonzero.
fn fdiv(a: &BigFloat, b: &BigFloat, prec: u64) -> BigFloat {
    assert!(!b.is_zero());
    if a.is_zero() {
        return BigFloat::zero();
    }
    let (na, nb) = (a.mantissa(), b.mantissa());
    let sh = prec as i64 + 2 + nb.bits() as i64 - na.bits() as i64;
    let (num, e) = if sh > 0 {
        (na << sh as usize, a.exponent() - b.exponent() - sh)
    } else {
        (na.clone(), a.exponent() - b.exponent())
    };
    BigFloat::new(round_div_int(&num, nb), e).round_to(prec).0
}

/// Nearest integer, ties away from zero.
fn fround_int(x: &BigFloat) -> Int {
    if x.is_zero() {
        return Int::zero();
    }
    let e = x.exponent();
    if e >= 0 {
        x.mantissa() << e as usize
    } else {
        round_div_int(x.mantissa(), &(Int::one() << (-e) as usize))
    }
}

// ---------------------------------------------------------------------------
// Lattice reduction. The basis rows and their Gram matrix are updated only by
// exact unimodular operations; the rounded Gram-Schmidt data merely steers
// them, so bad numerics can degrade quality but never correctness.
// η = 9/16 and δ = 127/128 are dyadic so the thresholds are exact.

const LLL_VISIT_CAP: usize = 400_000;
const LLL_BASE_PREC: u64 = 128;

enum RowStatus {
    Ok,
    NeedsPrec,
    Degenerate,
}

struct Lll {
    kappa: usize,
    prec: u64,
    max_prec: u64,
    cap: usize,
    visits: usize,
    g: Vec<Vec<Int>>,
    b: Vec<Vec<Int>>,
    mu: Vec<Vec<BigFloat>>,
    rr: Vec<Vec<BigFloat>>,
}

impl Lll {
    fn new(basis: &[Vec<Int>]) -> Lll {
        let kappa = basis.len();
        let mut g = vec![vec![Int::zero(); kappa]; kappa];
        let mut diag_bits = 1u64;
        for i in 0..kappa {
            for j in 0..=i {
                let dot: Int = basis[i].iter().zip(&basis[j]).map(|(a, b)| a * b).sum();
                g[i][j] = dot.clone();
                g[j][i] = dot;
            }
            diag_bits = diag_bits.max(g[i][i].bits());
        }
        Lll {
            kappa,
            prec: LLL_BASE_PREC,
            max_prec: (2 * diag_bits + 64)
                .next_power_of_two()
                .clamp(LLL_BASE_PREC, 1 << 14),
            cap: LLL_VISIT_CAP,
            visits: 0,
            g,
            b: basis.to_vec(),
            mu: vec![vec![BigFloat::zero(); kappa]; kappa],
            rr: vec![vec![BigFloat::zero(); kappa]; kappa],
        }
    }

    /// Gram-Schmidt row k from the exact Gram matrix; rows < k must be valid.
    /// A diagonal that lands in rounding noise (or goes nonpositive, as a
    /// dependent basis would) asks for more precision until the cap.
    fn compute_row(&mut self, k: usize) -> RowStatus {
        let prec = self.prec;
        for j in 0..=k {
            let mut r = fnum(&self.g[k][j], prec);
            let mut term_mag = r.mag_exp();
            for t in 0..j {
                let p = fmul(&self.mu[j][t], &self.rr[k][t], prec);
                term_mag = term_mag.max(p.mag_exp());
                r = fsub(&r, &p, prec);
            }
            if j < k {
                self.mu[k][j] = fdiv(&r, &self.rr[j][j], prec);
                self.rr[k][j] = r;
            } else {
                let lost = r.mag_exp() <= term_mag.saturating_sub(prec as i64 - 32);
                if !r.is_positive() || lost {
                    return if prec < self.max_prec {
                        RowStatus::NeedsPrec
                    } else {
                        RowStatus::Degenerate
                    };
                }
                self.rr[k][k] = r;
            }
        }
        RowStatus::Ok
    }

    /// Ensure GSO rows 0..=k are valid; false means stop reducing.
    fn gso_upto(&mut self, k: usize, valid: &mut usize) -> bool {
        while *valid <= k {
            match self.compute_row(*valid) {
                RowStatus::Ok => *valid += 1,
                RowStatus::NeedsPrec => {
                    self.prec = (self.prec * 2).min(self.max_prec);
                    *valid = 0;
                }
                RowStatus::Degenerate => return false,
            }
        }
        true
    }

    /// b_k ← b_k − q·b_j on the Gram matrix and the basis rows.
    fn translate(&mut self, k: usize, j: usize, q: &Int) {
        for i in 0..self.kappa {
            let t = &self.g[j][i] * q;
            self.g[k][i] -= t;
        }
        for i in 0..self.kappa {
            let t = &self.g[i][j] * q;
            self.g[i][k] -= t;
        }
        row_sub(&mut self.b, k, j, q);
    }

    fn swap(&mut self, k: usize) {
        self.g.swap(k - 1, k);
        for row in &mut self.g {
            row.swap(k - 1, k);
        }
        self.b.swap(k - 1, k);
    }

    /// With a `bound`, reduction stops as soon as any basis row fits it; the
    /// caller rechecks every returned row exactly anyway.
    fn run(&mut self, bound: Option<&SiegelBound>) {
        if self.kappa <= 1 {
            return;
        }
        if let Some(bnd) = bound {
            if self.b.iter().any(|row| bnd.admits(row)) {
                return;
            }
        }
        let eta = BigFloat::new(Int::from(9), -4);
        let delta = BigFloat::new(Int::from(127), -7);
        let mut valid = 0usize;
        let mut k = 1usize;
        while k < self.kappa {
            self.visits += 1;
            if self.visits > self.cap {
                break;
            }
            let mut ok = true;
            for _ in 0..64 {
                if !self.gso_upto(k, &mut valid) {
                    ok = false;
                    break;
                }
                let mut reduced_any = false;
                for j in (0..k).rev() {
                    if self.mu[k][j].abs() > eta {
                        let q = fround_int(&self.mu[k][j]);
                        if !q.is_zero() {
                            self.translate(k, j, &q);
                            reduced_any = true;
                        }
                    }
                }
                if !reduced_any {
                    break;
                }
                valid = valid.min(k);
            }
            if !ok || !self.gso_upto(k, &mut valid) {
                break;
            }
            if let Some(bnd) = bound {
                if bnd.admits(&self.b[k]) {
                    break;
                }
            }
            let m2 = fmul(&self.mu[k][k - 1], &self.mu[k][k - 1], self.prec);
            let lhs = fadd(
                &self.rr[k][k],
                &fmul(&m2, &self.rr[k - 1][k - 1], self.prec),
                self.prec,
            );
            if lhs < fmul(&delta, &self.rr[k - 1][k - 1], self.prec) {
                self.swap(k);
                valid = valid.min(k - 1);
                k = std::cmp::max(k - 1, 1);
            } else {
                k += 1;
            }
        }
    }
}

/// Lattice-reduce a row basis. Exact: the output spans the same lattice.
pub fn lll_reduce(basis: &[Vec<Int>]) -> Vec<Vec<Int>> {
    lll_reduce_stopping_at(basis, None)
}

/// As [`lll_reduce`], but stops early once any row fits `bound`.
fn lll_reduce_stopping_at(basis: &[Vec<Int>], bound: Option<&SiegelBound>) -> Vec<Vec<Int>> {
    if basis.len() <= 1 {
        return basis.to_vec();
    }
    let mut lll = Lll::new(basis);
    lll.run(bound);
    lll.b
}

/// Instrumented reduction entry for tuning runs; not part of the solver API.
#[doc(hidden)]
pub fn lll_bench(
    basis: &[Vec<Int>],
    bound: Option<&SiegelBound>,
    cap: usize,
) -> (Vec<Vec<Int>>, usize, u64) {
    if basis.len() <= 1 {
        return (basis.to_vec(), 0, 0);
    }
    let mut lll = Lll::new(basis);
    lll.cap = cap;
    lll.run(bound);
    (lll.b, lll.visits, lll.prec)
}

/// Natural log of the box volume guard for enumeration, per point budget.
const ENUM_LOG2_BUDGET: f64 = 27.0;

/// Exhaustive search over 0 ≠ X ∈ [−w,w]^N, first nonzero entry positive.
/// Returns the solution of smallest (max-norm, lexicographic) rank, or None.
pub fn brute_force_oracle(
    sys: &HomogeneousSystem,
    w: u64,
) -> Result<Option<Vec<Int>>, SiegelError> {
    let n = sys.n();
    if n as f64 * ((2 * w + 1) as f64).log2() > ENUM_LOG2_BUDGET {
        return Err(SiegelError::BudgetExceeded);
    }
    let wi = Int::from(w);
    let mut x = vec![Int::zero(); n];
    let mut best: Option<Vec<Int>> = None;
    // Depth-first over coordinates; while the prefix is all zero the current
    // coordinate stays nonnegative, which bakes in sign normalization.
    fn rec(
        sys: &HomogeneousSystem,
        wi: &Int,
        x: &mut Vec<Int>,
        depth: usize,
        all_zero: bool,
        best: &mut Option<Vec<Int>>,
    ) {
        if depth == x.len() {
            if !all_zero && sys.is_solution(x) {
                let replace = match best {
                    None => true,
                    Some(b) => better_candidate(x, b),
                };
                if replace {
                    *best = Some(x.clone());
                }
            }
            return;
        }
        let lo = if all_zero { Int::zero() } else { -wi.clone() };
        let mut v = lo;
        while &v <= wi {
            x[depth] = v.clone();
            rec(sys, wi, x, depth + 1, all_zero && v.is_zero(), best);
            v += Int::one();
        }
    }
    rec(sys, &wi, &mut x, 0, true, &mut best);
    Ok(best)
}

/// Node budget for the exact lattice enumeration fallback.
const SE_NODE_BUDGET: usize = 2_000_000;

/// Exact Schnorr–Euchner enumeration of the lattice spanned by `basis` for a
/// bound-admissible vector. Reduction minimizes Euclidean length; the bound
/// is a max-norm box, and the two can disagree. Every lattice point with
/// squared length ≤ N·W² (W the bound's floor) lies inside the search
/// radius, so when the basis spans the full integer kernel the pigeonhole
/// vector is in range and the search cannot come back empty unless the node
/// budget trips first, in which case the best vector seen is returned.
/// Gram-Schmidt data and pruning are exact rationals; fully deterministic.
fn box_enumerate(basis: &[Vec<Int>], bound: &SiegelBound) -> Option<Vec<Int>> {
    let kdim = basis.len();
    if kdim == 0 || kdim > 10 {
        return None;
    }
    let n = basis[0].len();
    let mut mu = vec![vec![Rat::zero(); kdim]; kdim];
    let mut rr = vec![Rat::zero(); kdim];
    for i in 0..kdim {
        for j in 0..=i {
            let dot: Int = basis[i].iter().zip(&basis[j]).map(|(a, b)| a * b).sum();
            let mut v = Rat::from_integer(dot);
            for t in 0..j {
                v -= &mu[i][t] * &mu[j][t] * &rr[t];
            }
            if j < i {
                mu[i][j] = v / &rr[j];
            } else {
                if !v.is_positive() {
                    return None; // dependent rows
                }
                rr[i] = v;
            }
        }
    }

    let w = bound.floor_int();
    let n_int = Int::from(n as u64);
    let mut cap = Rat::from_integer(&n_int * &w * &w);
    let mut t = vec![Int::zero(); kdim];
    let mut best: Option<Vec<Int>> = None;
    let mut nodes = 0usize;

    fn leaf(
        basis: &[Vec<Int>],
        t: &[Int],
        bound: &SiegelBound,
        n_int: &Int,
        cap: &mut Rat,
        best: &mut Option<Vec<Int>>,
    ) {
        if t.iter().all(Zero::is_zero) {
            return;
        }
        let len = basis[0].len();
        let mut v = vec![Int::zero(); len];
        for (c, row) in t.iter().zip(basis) {
            if c.is_zero() {
                continue;
            }
            for (o, b) in v.iter_mut().zip(row) {
                *o += c * b;
            }
        }
        make_primitive(&mut v);
        sign_normalize(&mut v);
        if !bound.admits(&v) {
            return;
        }
        let m = max_abs(&v);
        let new_cap = Rat::from_integer(n_int * &m * &m);
        if new_cap < *cap {
            *cap = new_cap;
        }
        let replace = match best {
            None => true,
            Some(b) => better_candidate(&v, b),
        };
        if replace {
            *best = Some(v);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        basis: &[Vec<Int>],
        mu: &[Vec<Rat>],
        rr: &[Rat],
        bound: &SiegelBound,
        n_int: &Int,
        level: usize,
        rho: &Rat,
        t: &mut Vec<Int>,
        cap: &mut Rat,
        best: &mut Option<Vec<Int>>,
        nodes: &mut usize,
    ) {
        let kdim = rr.len();
        let mut center = Rat::zero();
        for i in level + 1..kdim {
            center -= &mu[i][level] * Rat::from_integer(t[i].clone());
        }
        let t0 = (center.clone() + Rat::new(Int::one(), Int::from(2))).floor().to_integer();
        // The admissible t-values form an interval around the center; walk
        // outward on both sides until each is pruned.
        let weight = |x: &Int| -> Rat {
            let d = Rat::from_integer(x.clone()) - &center;
            rho + &rr[level] * &d * &d
        };
        let descend = |x: Int,
                       t: &mut Vec<Int>,
                       cap: &mut Rat,
                       best: &mut Option<Vec<Int>>,
                       nodes: &mut usize|
         -> bool {
            *nodes += 1;
            if *nodes > SE_NODE_BUDGET {
                return false;
            }
            let w = weight(&x);
            if w > *cap {
                return false;
            }
            t[level] = x;
            if level == 0 {
                leaf(basis, t, bound, n_int, cap, best);
            } else {
                dfs(basis, mu, rr, bound, n_int, level - 1, &w, t, cap, best, nodes);
            }
            true
        };
        if !descend(t0.clone(), t, cap, best, nodes) {
            t[level] = Int::zero();
            return;
        }
        let mut up_alive = true;
        let mut down_alive = true;
        let mut d = Int::one();
        while up_alive || down_alive {
            if *nodes > SE_NODE_BUDGET {
                break;
            }
            if up_alive {
                up_alive = descend(&t0 + &d, t, cap, best, nodes);
            }
            if down_alive {
                down_alive = descend(&t0 - &d, t, cap, best, nodes);
            }
            d += 1;
        }
        t[level] = Int::zero();
    }

    dfs(
        basis,
        &mu,
        &rr,
        bound,
        &n_int,
        kdim - 1,
        &Rat::zero(),
        &mut t,
        &mut cap,
        &mut best,
        &mut nodes,
    );
    best
}

/// Best nonzero candidate after normalization, by (max-norm, lexicographic).
fn pick_best<'a>(cands: impl Iterator<Item = &'a Vec<Int>>) -> Option<Vec<Int>> {
    let mut best: Option<Vec<Int>> = None;
    for cand in cands {
        if cand.iter().all(Zero::is_zero) {
            continue;
        }
        let mut v = cand.clone();
        make_primitive(&mut v);
        sign_normalize(&mut v);
        let replace = match &best {
            None => true,
            Some(b) => better_candidate(&v, b),
        };
        if replace {
            best = Some(v);
        }
    }
    best
}

/// Nonzero X with sys·X = 0 and max|X_i| within [`SiegelBound`], verified
/// exactly before returning.
///
/// Ladder: the cheap kernel is tried raw (the pigeonhole bound is generous
/// for many systems), then the saturated kernel raw, then lattice reduction
/// of the saturated basis with an early exit once any row admits the bound.
/// The saturation matters: the bound can demand a vector that only exists
/// there when the fast kernel spans a proper finite-index sublattice. After
/// that: exact box enumeration over the reduced basis, exhaustive search over
/// the bound box, and finally BoundNotMet, which existence makes an
/// implementation bug rather than an input condition.
pub fn solve_small(sys: &HomogeneousSystem) -> Result<Vec<Int>, SiegelError> {
    let bound = SiegelBound::of(sys);

    let fast = kernel_basis(sys);
    let best = pick_best(fast.iter()).expect("N > M guarantees a nontrivial kernel");
    if bound.admits(&best) {
        assert!(sys.is_solution(&best), "kernel arithmetic is exact");
        return Ok(best);
    }

    let mut sat = saturated_kernel_basis(sys);
    if let Some(best) = pick_best(sat.iter()) {
        if bound.admits(&best) {
            assert!(sys.is_solution(&best), "kernel arithmetic is exact");
            return Ok(best);
        }
    }

    // Rows sorted small-first reduce with fewer precision escalations.
    sat.sort_by_key(|row| row.iter().map(|v| v.bits()).max().unwrap_or(0));
    let reduced = lll_reduce_stopping_at(&sat, Some(&bound));
    if let Some(best) = pick_best(reduced.iter().chain(sat.iter())) {
        if bound.admits(&best) {
            assert!(sys.is_solution(&best), "kernel arithmetic is exact");
            return Ok(best);
        }
    }

    if let Some(v) = box_enumerate(&reduced, &bound) {
        assert!(sys.is_solution(&v), "enumerated inside the kernel span");
        return Ok(v);
    }

    // Last resort: exhaustive search up to the bound box when enumerable.
    let w = bound.floor_int();
    if let Some(w64) = w.to_u64() {
        match brute_force_oracle(sys, w64) {
            Ok(Some(v)) => {
                assert!(sys.is_solution(&v));
                return Ok(v);
            }
            Ok(None) | Err(SiegelError::BudgetExceeded) => {}
            Err(e) => return Err(e),
        }
    }
    Err(SiegelError::BoundNotMet)
}
