use fpade_core::num::{int_pow, is_integer, Int, Rat};
use fpade_core::omega::{omega_series, OmegaSpec};
use fpade_core::siegel::{kernel_basis, lll_bench, saturated_kernel_basis, HomogeneousSystem, SiegelBound};
use num_traits::Zero;
use std::time::Instant;

fn floor_cal_o(d: u32, eps_num: u32, eps_den: u32) -> u32 {
    (3 * eps_den - eps_num) * d / eps_den
}

fn build_system(r: u32, d: u32, eps_num: u32, eps_den: u32) -> HomogeneousSystem {
    let cal_o = floor_cal_o(d, eps_num, eps_den);
    let scale = int_pow(&Int::from(r), 2 * cal_o as u64);
    let betas = [r, 2 * r];
    let tables: Vec<Vec<Int>> = betas
        .iter()
        .map(|&b| {
            omega_series(OmegaSpec::new(r, b), cal_o as usize)
                .coeffs()
                .iter()
                .map(|q| {
                    let v = q * Rat::from_integer(scale.clone());
                    assert!(is_integer(&v));
                    v.to_integer()
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for v in d + 1..=cal_o {
        let mut row = Vec::with_capacity(2 * (d as usize + 1));
        for t in &tables {
            for k in 0..=d {
                row.push(if k <= v { t[(v - k) as usize].clone() } else { Int::zero() });
            }
        }
        rows.push(row);
    }
    HomogeneousSystem::new(rows).unwrap()
}

fn best_max_bits(rows: &[Vec<Int>]) -> u64 {
    rows.iter()
        .map(|r| r.iter().map(|v| v.bits()).max().unwrap_or(0))
        .min()
        .unwrap_or(0)
}

fn admissible(rows: &[Vec<Int>], bound: &SiegelBound) -> bool {
    rows.iter().any(|row| {
        !row.iter().all(Zero::is_zero) && {
            let mut v = row.clone();
            let mut g = Int::zero();
            for x in &v {
                g = num_integer::Integer::gcd(&g, x);
            }
            if g > Int::from(1) {
                for x in v.iter_mut() {
                    *x = &*x / &g;
                }
            }
            bound.admits(&v)
        }
    })
}

fn main() {
    let configs = [
        (2u32, 15u32, 1u32, 2u32),
        (2, 20, 1, 2),
        (2, 30, 1, 2),
        (2, 40, 1, 2),
        (2, 40, 5858, 10000),
        (2, 40, 3, 4),
        (3, 40, 1, 2),
        (3, 40, 5858, 10000),
        (3, 40, 3, 4),
        (2, 30, 3, 4),
        (3, 30, 1, 2),
    ];
    for (r, d, en, ed) in configs {
        let t0 = Instant::now();
        let sys = build_system(r, d, en, ed);
        let bound = SiegelBound::of(&sys);
        let bbits = bound.floor_int().bits();
        let t1 = Instant::now();
        let fast = kernel_basis(&sys);
        let t_fast = t1.elapsed();
        let t2 = Instant::now();
        let sat = saturated_kernel_basis(&sys);
        let t_sat = t2.elapsed();
        let sat_bits = sat
            .iter()
            .map(|r| r.iter().map(|v| v.bits()).max().unwrap_or(0))
            .max()
            .unwrap_or(0);
        let mut sorted = sat.clone();
        sorted.sort_by_key(|row| row.iter().map(|v| v.bits()).max().unwrap_or(0));
        let t3 = Instant::now();
        let (red, visits, prec) = lll_bench(&sorted, Some(&bound), 400_000);
        let t_lll = t3.elapsed();
        eprintln!(
            "r={} D={} eps={}/{}: M={} N={} dim={} bound_bits={} fast_best={} sat_dim={} sat_bits={} red_best={} visits={} prec={} admissible={} t_fast={:?} t_sat={:?} t_lll={:?} total={:?}",
            r,
            d,
            en,
            ed,
            sys.m(),
            sys.n(),
            fast.len(),
            bbits,
            best_max_bits(&fast),
            sat.len(),
            sat_bits,
            best_max_bits(&red),
            visits,
            prec,
            admissible(&red, &bound),
            t_fast,
            t_sat,
            t_lll,
            t0.elapsed()
        );
    }
}
