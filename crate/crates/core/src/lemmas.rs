//! Named verification entry points, one per constructive statement the
//! library implements. Each checker re-runs the construction it covers and
//! returns a [`CheckSet`] suitable for reporting; `verify_lemma` dispatches
//! by id.

use crate::independence::{delta_poly, low_order_point, rank3_certificate};
use crate::num::{int_pow, rat, Int, Rat};
use crate::omega::{binom_coeff, binom_denominator_bound, omega_coeff_checks, OmegaSpec};
use crate::operators::{
    build_family, check_bracket_relation, check_series_identity, make_context, DerivedFamily,
    OperatorContext,
};
use crate::pade::{
    build_initial_pade, check_coefficient_bounds, check_integrality, check_nondegenerate,
    PadeConfig, PadeTriple,
};
use crate::pipeline::{build_approximants, desk_params, verify_properties};
use crate::report::CheckSet;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LemmaError {
    #[error("unknown lemma id: {0}")]
    UnknownLemma(String),
}

/// Every recognized checker id, in dispatch order.
pub const LEMMA_IDS: &[&str] = &[
    "binom-denominator",
    "omega-coeff",
    "siegel-bound",
    "pade-build",
    "bracket-series",
    "bracket-relation",
    "angle-eval-bounds",
    "delta-rank",
    "low-order-point",
    "pipeline-properties",
];

/// Shared parameter bag with desk-scale defaults; each checker reads only
/// the fields it needs.
#[derive(Clone, Debug)]
pub struct LemmaConfig {
    pub r: u32,
    pub beta1: u32,
    pub beta2: u32,
    pub m_cap: u32,
    pub d: u32,
    pub eps0: Rat,
    /// Sweep depth for coefficient families and derivative towers.
    pub k_max: u32,
    /// Evaluation points are 1/n0, 1/(n0+1), ...
    pub n0: Int,
    /// Number of candidate points offered to the order search.
    pub points: usize,
    /// Shape, entry bound, and seed of the generated linear system.
    pub rows: usize,
    pub cols: usize,
    pub entry_bound: i64,
    pub seed: u64,
    pub prec: u64,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        LemmaConfig {
            r: 2,
            beta1: 2,
            beta2: 4,
            m_cap: 4,
            d: 20,
            eps0: rat(1, 2),
            k_max: 16,
            n0: Int::from(97),
            points: 8,
            rows: 4,
            cols: 9,
            entry_bound: 20,
            seed: 1,
            prec: 192,
        }
    }
}

pub fn verify_lemma(id: &str, cfg: &LemmaConfig) -> Result<CheckSet, LemmaError> {
    match id {
        "binom-denominator" => Ok(binom_denominator_checks(cfg)),
        "omega-coeff" => Ok(omega_coeff_set(cfg)),
        "siegel-bound" => Ok(siegel_bound_checks(cfg)),
        "pade-build" => Ok(pade_build_checks(cfg)),
        "bracket-series" => Ok(bracket_series_checks(cfg)),
        "bracket-relation" => Ok(bracket_relation_checks(cfg)),
        "angle-eval-bounds" => Ok(angle_eval_checks(cfg)),
        "delta-rank" => Ok(delta_rank_checks(cfg)),
        "low-order-point" => Ok(low_order_checks(cfg)),
        "pipeline-properties" => Ok(pipeline_property_checks(cfg)),
        other => Err(LemmaError::UnknownLemma(other.to_string())),
    }
}

fn binom_denominator_checks(cfg: &LemmaConfig) -> CheckSet {
    let mut checks = CheckSet::new();
    let failure = (0..=cfg.k_max as usize).find(|&k| {
        let bound = binom_denominator_bound(cfg.r, k);
        !(bound % binom_coeff(cfg.r, k).denom()).is_zero()
    });
    checks.push(
        "binomial denominators divide the closed bound",
        failure.is_none(),
        match failure {
            None => format!("r = {}, every k <= {}", cfg.r, cfg.k_max),
            Some(k) => format!("r = {}, first violation at k = {k}", cfg.r),
        },
    );
    checks
}

fn omega_coeff_set(cfg: &LemmaConfig) -> CheckSet {
    let mut checks = CheckSet::new();
    for beta in [cfg.beta1, cfg.beta2] {
        let results = omega_coeff_checks(OmegaSpec::new(cfg.r, beta), cfg.k_max as usize);
        let bad_denom = results.iter().find(|c| !c.denom_divides);
        checks.push(
            format!("series denominators for beta = {beta} divide r^2l"),
            bad_denom.is_none(),
            match bad_denom {
                None => format!("all l <= {}", cfg.k_max),
                Some(c) => format!("l = {}: {}", c.ell, c.coeff),
            },
        );
        let bad_size = results.iter().find(|c| !c.size_ok);
        checks.push(
            format!("series coefficients for beta = {beta} within the growth bound"),
            bad_size.is_none(),
            match bad_size {
                None => format!("all l <= {}", cfg.k_max),
                Some(c) => format!("l = {}: {}", c.ell, c.coeff),
            },
        );
    }
    checks
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn siegel_bound_checks(cfg: &LemmaConfig) -> CheckSet {
    use crate::siegel::{solve_small, HomogeneousSystem, SiegelBound};
    let mut checks = CheckSet::new();
    let mut state = cfg.seed;
    let span = 2 * cfg.entry_bound as u64 + 1;
    let rows: Vec<Vec<Int>> = (0..cfg.rows)
        .map(|_| {
            (0..cfg.cols)
                .map(|_| Int::from((splitmix(&mut state) % span) as i64 - cfg.entry_bound))
                .collect()
        })
        .collect();
    let sys = match HomogeneousSystem::new(rows) {
        Ok(sys) => sys,
        Err(e) => {
            checks.push("generated system is well formed", false, e.to_string());
            return checks;
        }
    };
    checks.push(
        "generated system is well formed",
        true,
        format!("{} x {}, entries within {}", sys.m(), sys.n(), cfg.entry_bound),
    );
    match solve_small(&sys) {
        Err(e) => checks.push("solver finds a kernel vector", false, e.to_string()),
        Ok(x) => {
            checks.push("solver finds a kernel vector", true, format!("dim {}", x.len()));
            checks.push(
                "vector is nonzero and in the kernel",
                sys.is_solution(&x) && x.iter().any(|v| !v.is_zero()),
                format!("residue bits {}", sys.apply(&x).iter().map(|v| v.bits()).sum::<u64>()),
            );
            let bound = SiegelBound::of(&sys);
            let norm = x.iter().map(|v| v.abs()).max().unwrap();
            checks.push(
                "max-norm within the pigeonhole bound",
                bound.admits(&x),
                format!("norm {norm} <= floor {}", bound.floor_int()),
            );
        }
    }
    checks
}

fn pade_config(cfg: &LemmaConfig) -> Result<PadeConfig, CheckSet> {
    PadeConfig::new(cfg.r, cfg.beta1, cfg.beta2, cfg.m_cap, cfg.d, cfg.eps0.clone()).map_err(|e| {
        let mut checks = CheckSet::new();
        checks.push("configuration is admissible", false, e.to_string());
        checks
    })
}

fn built_triple(cfg: &LemmaConfig) -> Result<(PadeConfig, PadeTriple), CheckSet> {
    let pcfg = pade_config(cfg)?;
    match build_initial_pade(&pcfg) {
        Ok(t) => Ok((pcfg, t)),
        Err(e) => {
            let mut checks = CheckSet::new();
            checks.push("construction succeeds", false, e.to_string());
            Err(checks)
        }
    }
}

fn pade_build_checks(cfg: &LemmaConfig) -> CheckSet {
    let (pcfg, triple) = match built_triple(cfg) {
        Ok(v) => v,
        Err(checks) => return checks,
    };
    let mut checks = CheckSet::new();
    checks.push(
        "remainder vanishes through the target order",
        triple.vanish_order >= pcfg.vanishing_target(),
        format!("order {} target {}", triple.vanish_order, pcfg.vanishing_target()),
    );
    let max_deg = triple.polys().iter().filter_map(|p| p.degree()).max().unwrap_or(0);
    checks.push(
        "degrees within the budget",
        max_deg <= pcfg.d as usize,
        format!("max degree {max_deg} <= {}", pcfg.d),
    );
    checks.push(
        "polynomials integral with the documented scale",
        check_integrality(&triple, &pcfg).is_ok(),
        format!("scale factor r^(2*{})", pcfg.vanishing_target()),
    );
    match check_nondegenerate(&triple, &pcfg) {
        Ok(rep) => checks.push(
            "no degenerate polynomial",
            true,
            format!("nonzero {:?}, strict regime {}", rep.nonzero, rep.strict_regime),
        ),
        Err(e) => checks.push("no degenerate polynomial", false, e.to_string()),
    }
    checks.push(
        "coefficient growth within the documented bound",
        check_coefficient_bounds(&triple, &pcfg).is_ok(),
        format!("window of {} coefficients", triple.remainder_coeffs.len()),
    );
    checks
}

fn context_for(cfg: &LemmaConfig) -> OperatorContext {
    make_context(cfg.r, cfg.m_cap, cfg.beta1, cfg.beta2)
}

fn family_for(ctx: &OperatorContext, triple: &PadeTriple, k_max: u32) -> DerivedFamily {
    build_family(ctx, [&triple.p0, &triple.p1, &triple.p2], k_max)
}

fn bracket_series_checks(cfg: &LemmaConfig) -> CheckSet {
    let (pcfg, triple) = match built_triple(cfg) {
        Ok(v) => v,
        Err(checks) => return checks,
    };
    let ctx = context_for(cfg);
    let mut checks = CheckSet::new();
    checks.push(
        "clearing polynomial is integral of the right degree",
        ctx.t.is_integer() && ctx.t.degree() == Some(cfg.m_cap as usize),
        format!(
            "degree {}, value {} at 0",
            ctx.t.degree().unwrap_or(0),
            ctx.t.coeff(0)
        ),
    );
    let ta_ok = ctx.ta.iter().all(|p| p.is_integer() && p.degree().unwrap_or(0) <= cfg.m_cap as usize);
    checks.push(
        "cleared logarithmic derivatives are integral",
        ta_ok,
        format!(
            "degrees {:?}",
            ctx.ta.iter().map(|p| p.degree().unwrap_or(0)).collect::<Vec<_>>()
        ),
    );
    let k = cfg.k_max.min(4);
    let window = pcfg.default_window();
    let family = family_for(&ctx, &triple, k);
    match check_series_identity(&ctx, &triple, &family, k, window) {
        Ok(()) => checks.push(
            "operator images match the series expansions",
            true,
            format!("k <= {k}, orders through {window}"),
        ),
        Err(e) => checks.push("operator images match the series expansions", false, e.to_string()),
    }
    checks
}

fn bracket_relation_checks(cfg: &LemmaConfig) -> CheckSet {
    let (_, triple) = match built_triple(cfg) {
        Ok(v) => v,
        Err(checks) => return checks,
    };
    let ctx = context_for(cfg);
    let k = cfg.k_max.min(6);
    let family = family_for(&ctx, &triple, k);
    let mut checks = CheckSet::new();
    match check_bracket_relation(&ctx, &family, k) {
        Ok(()) => checks.push(
            "connection identity holds through the tower",
            true,
            format!("k <= {k}"),
        ),
        Err(e) => checks.push("connection identity holds through the tower", false, e.to_string()),
    }
    checks
}

fn angle_eval_checks(cfg: &LemmaConfig) -> CheckSet {
    let (pcfg, triple) = match built_triple(cfg) {
        Ok(v) => v,
        Err(checks) => return checks,
    };
    let ctx = context_for(cfg);
    let k = cfg.k_max.min(8);
    let family = family_for(&ctx, &triple, k);
    let alpha = Rat::new(Int::one(), cfg.n0.clone());
    let mut checks = CheckSet::new();
    let mut failure = None;
    'outer: for (kk, row) in family.angle.iter().enumerate() {
        let allowed = int_pow(&Int::from(pcfg.r), kk as u64)
            * int_pow(&cfg.n0, pcfg.d as u64 + kk as u64 * pcfg.m_cap as u64);
        for (i, poly) in row.iter().enumerate() {
            let denom = poly.eval(&alpha).denom().clone();
            if !(&allowed % &denom).is_zero() {
                failure = Some((kk, i, denom));
                break 'outer;
            }
        }
    }
    checks.push(
        "evaluation denominators divide the documented scale",
        failure.is_none(),
        match failure {
            None => format!("k <= {k} at 1/{}", cfg.n0),
            Some((kk, i, denom)) => format!("k = {kk}, i = {i}: denominator {denom}"),
        },
    );
    checks
}

fn delta_rank_checks(cfg: &LemmaConfig) -> CheckSet {
    let (pcfg, triple) = match built_triple(cfg) {
        Ok(v) => v,
        Err(checks) => return checks,
    };
    let ctx = context_for(cfg);
    let family = family_for(&ctx, &triple, cfg.k_max.min(8));
    let alpha = Rat::new(Int::one(), cfg.n0.clone());
    let mut checks = CheckSet::new();
    let delta = delta_poly(&family);
    checks.push(
        "determinant polynomial is nonzero",
        !delta.is_zero(),
        format!("degree {}", delta.degree().unwrap_or(0)),
    );
    match rank3_certificate(&ctx, &family, &pcfg, &alpha) {
        Ok(cert) => {
            checks.push(
                "full-rank certificate found",
                true,
                format!("a = {}, indices {:?}", cert.a, cert.indices),
            );
            checks.push(
                "certificate determinant is nonzero",
                !cert.det_value.is_zero(),
                format!("magnitude ~2^{}", cert.det_value.numer().bits() as i64
                    - cert.det_value.denom().bits() as i64),
            );
        }
        Err(e) => checks.push("full-rank certificate found", false, e.to_string()),
    }
    checks
}

fn low_order_checks(cfg: &LemmaConfig) -> CheckSet {
    let (_, triple) = match built_triple(cfg) {
        Ok(v) => v,
        Err(checks) => return checks,
    };
    let ctx = context_for(cfg);
    let family = family_for(&ctx, &triple, cfg.k_max.min(8));
    let delta = delta_poly(&family);
    let points: Vec<Rat> = (0..cfg.points as u32)
        .map(|j| Rat::new(Int::one(), &cfg.n0 + Int::from(j)))
        .collect();
    let mut checks = CheckSet::new();
    match low_order_point(&delta, &points) {
        Ok((point, ord)) => {
            let deg = delta.degree().unwrap_or(0);
            checks.push(
                "a candidate point of minimal order exists",
                true,
                format!("order {ord} at {point}"),
            );
            checks.push(
                "order within the pigeonhole budget",
                ord * points.len() <= deg,
                format!("{ord} * {} <= {deg}", points.len()),
            );
        }
        Err(e) => checks.push("a candidate point of minimal order exists", false, e.to_string()),
    }
    checks
}

fn pipeline_property_checks(cfg: &LemmaConfig) -> CheckSet {
    let (pcfg, triple) = match built_triple(cfg) {
        Ok(v) => v,
        Err(checks) => return checks,
    };
    let params = match desk_params(
        &cfg.n0,
        cfg.d,
        cfg.m_cap,
        &cfg.eps0,
        cfg.r,
        &Int::one(),
        &Int::one(),
        cfg.prec,
    ) {
        Ok(p) => p,
        Err(e) => {
            let mut checks = CheckSet::new();
            checks.push("parameters accepted", false, e.to_string());
            return checks;
        }
    };
    let ctx = context_for(cfg);
    let family = family_for(&ctx, &triple, cfg.k_max.min(8));
    let alpha = Rat::new(Int::one(), cfg.n0.clone());
    let mut checks = CheckSet::new();
    let cert = match rank3_certificate(&ctx, &family, &pcfg, &alpha) {
        Ok(c) => c,
        Err(e) => {
            checks.push("full-rank certificate found", false, e.to_string());
            return checks;
        }
    };
    let matrix = match build_approximants(&params, &pcfg, &family, &cert) {
        Ok(m) => m,
        Err(e) => {
            checks.push("approximant matrix assembled", false, e.to_string());
            return checks;
        }
    };
    match verify_properties(&matrix, &params, &pcfg, &triple) {
        Ok(report) => checks.merge(report.checks),
        Err(e) => checks.push("structural properties hold", false, e.to_string()),
    }
    checks
}
