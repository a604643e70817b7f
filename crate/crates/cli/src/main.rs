//! `fpade`: batch verification over the exact approximation stack.
//!
//! Every command writes one JSON report to stdout (or `--output`) and exits
//! 0 when all checks pass, 1 when a check fails, 2 on usage or configuration
//! errors. With `--no-timings` the report for a given config is
//! byte-identical across runs.

use clap::{Args, Parser, Subcommand, ValueEnum};
use fpade_core::lemmas::{verify_lemma, LemmaConfig, LemmaError, LEMMA_IDS};
use fpade_core::num::{is_prime_u64, Int, Rat};
use fpade_core::omega::{omega_coeff_checks, omega_eval_ball, OmegaError, OmegaSpec};
use fpade_core::operators::{build_family, make_context};
use fpade_core::pade::{build_initial_pade, PadeConfig};
use fpade_core::pipeline::{
    build_approximants, chi, compute_params, desk_params, optimize_exponent, verify_properties,
};
use fpade_core::report::{CheckSet, Report};
use fpade_core::scan::{scan_with_options, Equation, ScanOptions, Solution};
use fpade_core::{independence::rank3_certificate, Poly};
use num_traits::Zero;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "fpade", version, about = "Exact verification of factorial-equation approximation machinery")]
struct Cli {
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Omit the timings block, making reruns byte-identical.
    #[arg(long, global = true)]
    no_timings: bool,

    /// Worker threads for the parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Working precision in bits (default: $FPADE_PREC, then 192).
    #[arg(long, global = true)]
    prec: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coefficient laws and certified evaluation of one omega series.
    Omega(OmegaArgs),
    /// Build an approximant triple and verify its construction laws.
    Pade(BuildArgs),
    /// Derived-family laws: bracket relation and remainder series identities.
    Derive(DeriveArgs),
    /// Rank-3 independence certificate at a rational point.
    Certify(CertifyArgs),
    /// End-to-end approximant pipeline with structural property checks.
    Pipeline(PipelineArgs),
    /// Scan s * n! = P(x) for integer solutions.
    Scan(ScanArgs),
    /// Closed-form optimum of the count exponent.
    Exponent,
    /// Run one named checker by id.
    VerifyLemma(VerifyLemmaArgs),
}

/// Construction parameters shared by every build-based command.
#[derive(Args)]
struct BuildArgs {
    #[arg(long, default_value_t = 2)]
    r: u32,
    #[arg(long, default_value_t = 2)]
    b1: u32,
    #[arg(long, default_value_t = 4)]
    b2: u32,
    /// Product cutoff (at least b2).
    #[arg(long = "M", default_value_t = 4)]
    m: u32,
    /// Polynomial degree bound (default: 10; 20 for certify and pipeline).
    #[arg(long = "D")]
    d: Option<u32>,
    /// Sharpness split in (0, 1), as an exact rational.
    #[arg(long, default_value = "1/2")]
    eps0: String,
}

#[derive(Args)]
struct OmegaArgs {
    #[arg(long, default_value_t = 2)]
    r: u32,
    #[arg(long, default_value_t = 4)]
    beta: u32,
    /// Number of series coefficients to check.
    #[arg(long, default_value_t = 64)]
    len: usize,
    /// Optional rational point for a certified evaluation.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
}

#[derive(Args)]
struct DeriveArgs {
    #[command(flatten)]
    build: BuildArgs,
    /// Derivative depth for the identity checks.
    #[arg(long, default_value_t = 4)]
    kmax: u32,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    build: BuildArgs,
    /// Evaluation point is 1/n0.
    #[arg(long, default_value = "97")]
    n0: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Free (n0, D, M, eps0); evaluates at 1/n0.
    Desk,
    /// Derives (M, D) from (N, theta); checks the admissibility gates.
    Paper,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    build: BuildArgs,
    #[arg(long, value_enum, default_value_t = Mode::Desk)]
    mode: Mode,
    /// Evaluation magnitude: the point is 1/n0 (desk mode).
    #[arg(long, default_value = "1000003")]
    n0: String,
    /// Scale s of the equation s * n! = P(x).
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    s: String,
    /// Coefficient bound of the depressed polynomial.
    #[arg(long = "b-const", default_value = "1")]
    b_const: String,
    /// Window anchor N (paper mode).
    #[arg(long = "N")]
    n_ref: Option<String>,
    /// Sample magnitude in [N, 2N) (paper mode; default N).
    #[arg(long)]
    n_mag: Option<String>,
    /// Cutoff exponent theta (paper mode).
    #[arg(long)]
    theta: Option<String>,
    /// Slack kept below the theta threshold (paper mode).
    #[arg(long, default_value = "1/100")]
    margin: String,
}

#[derive(Args)]
struct ScanArgs {
    /// Coefficients, constant term first: "-1,0,1" is x^2 - 1.
    #[arg(long, allow_hyphen_values = true)]
    poly: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    s: String,
    /// Inclusive range "lo:hi" of n.
    #[arg(long)]
    range: String,
    /// Comma-separated odd primes for the residue prefilter.
    #[arg(long)]
    primes: Option<String>,
    /// Write solutions as JSON lines to this file.
    #[arg(long)]
    jsonl: Option<PathBuf>,
    /// Write solutions as CSV to this file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyLemmaArgs {
    /// Checker id (see README for the list).
    id: String,
    #[arg(long, default_value_t = 2)]
    r: u32,
    #[arg(long, default_value_t = 2)]
    b1: u32,
    #[arg(long, default_value_t = 4)]
    b2: u32,
    #[arg(long = "M", default_value_t = 4)]
    m: u32,
    #[arg(long = "D", default_value_t = 20)]
    d: u32,
    #[arg(long, default_value = "1/2")]
    eps0: String,
    /// Sweep depth (k or l, checker-dependent).
    #[arg(long, default_value_t = 16)]
    kmax: u32,
    /// Evaluation points are 1/n0, 1/(n0+1), ...
    #[arg(long, default_value = "97")]
    n0: String,
    /// Candidate points offered to the order search.
    #[arg(long, default_value_t = 8)]
    points: usize,
    /// Rows of the generated homogeneous system.
    #[arg(long, default_value_t = 4)]
    rows: usize,
    /// Columns of the generated homogeneous system.
    #[arg(long, default_value_t = 9)]
    cols: usize,
    /// Entry bound of the generated system.
    #[arg(long = "entry-bound", default_value_t = 20)]
    entry_bound: i64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Usage and configuration failures surface as `Err(message)` (exit 2);
/// mathematical failures become failing checks inside the report (exit 1).
fn run(cli: Cli) -> Result<ExitCode, String> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err("--threads must be at least 1".into());
        }
        // A second initialization in-process is harmless: the first wins.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let prec = resolve_prec(cli.prec)?;

    let started = Instant::now();
    let mut report = match &cli.command {
        Command::Omega(args) => cmd_omega(args, prec)?,
        Command::Pade(args) => cmd_pade(args, prec)?,
        Command::Derive(args) => cmd_derive(args, prec)?,
        Command::Certify(args) => cmd_certify(args, prec)?,
        Command::Pipeline(args) => cmd_pipeline(args, prec)?,
        Command::Scan(args) => cmd_scan(args)?,
        Command::Exponent => cmd_exponent(prec),
        Command::VerifyLemma(args) => cmd_verify_lemma(args, prec)?,
    };
    if !cli.no_timings {
        report.timing("total", started.elapsed().as_millis() as u64);
    }

    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| format!("cannot serialize the report: {e}"))?;
    match &cli.output {
        Some(path) => std::fs::write(path, json + "\n")
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => println!("{json}"),
    }
    Ok(ExitCode::from(if report.all_pass() { 0 } else { 1 }))
}

fn rat_f64(q: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

fn resolve_prec(flag: Option<u64>) -> Result<u64, String> {
    let prec = match flag {
        Some(p) => p,
        None => match std::env::var("FPADE_PREC") {
            Ok(s) => s
                .trim()
                .parse::<u64>()
                .map_err(|_| format!("FPADE_PREC must be a bit count, got {s:?}"))?,
            Err(_) => 192,
        },
    };
    if !(32..=16384).contains(&prec) {
        return Err(format!("precision must lie in [32, 16384] bits, got {prec}"));
    }
    Ok(prec)
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    let bad = || format!("expected an exact rational like 3/4, got {s:?}");
    match s.split_once('/') {
        Some((n, d)) => {
            let num = Int::from_str(n.trim()).map_err(|_| bad())?;
            let den = Int::from_str(d.trim()).map_err(|_| bad())?;
            if den.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(Rat::new(num, den))
        }
        None => Ok(Rat::from_integer(Int::from_str(s.trim()).map_err(|_| bad())?)),
    }
}

fn parse_int(s: &str) -> Result<Int, String> {
    Int::from_str(s.trim()).map_err(|_| format!("expected an integer, got {s:?}"))
}

fn parse_poly(s: &str) -> Result<Poly, String> {
    let coeffs = s
        .split(',')
        .map(|t| {
            Int::from_str(t.trim())
                .map_err(|_| format!("polynomial coefficients must be integers, got {t:?}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Poly::from_big_coeffs(coeffs))
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let bad = || format!("expected a range like 1:1000, got {s:?}");
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo = lo.trim().parse::<u64>().map_err(|_| bad())?;
    let hi = hi.trim().parse::<u64>().map_err(|_| bad())?;
    if lo < 1 {
        return Err("the scan stream starts at n = 1".into());
    }
    if hi < lo {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

fn parse_primes(s: &str) -> Result<Vec<u64>, String> {
    s.split(',')
        .map(|t| {
            let p = t
                .trim()
                .parse::<u64>()
                .map_err(|_| format!("prefilter moduli must be integers, got {t:?}"))?;
            if p <= 2 || !is_prime_u64(p) {
                return Err(format!("prefilter modulus {p} is not an odd prime"));
            }
            Ok(p)
        })
        .collect()
}

/// The shared build flags as a checker config; unrelated knobs keep their
/// defaults.
fn lemma_config(build: &BuildArgs, default_d: u32, prec: u64) -> Result<LemmaConfig, String> {
    Ok(LemmaConfig {
        r: build.r,
        beta1: build.b1,
        beta2: build.b2,
        m_cap: build.m,
        d: build.d.unwrap_or(default_d),
        eps0: parse_rat(&build.eps0)?,
        prec,
        ..LemmaConfig::default()
    })
}

/// Validate the build flags eagerly so inadmissible configurations exit 2
/// instead of surfacing as a failed check.
fn validated_pade_config(
    build: &BuildArgs,
    default_d: u32,
    prec: u64,
) -> Result<(PadeConfig, LemmaConfig), String> {
    let cfg = lemma_config(build, default_d, prec)?;
    let pade = PadeConfig::new(build.r, build.b1, build.b2, build.m, cfg.d, cfg.eps0.clone())
        .map_err(|e| e.to_string())?;
    Ok((pade, cfg))
}

fn echo_build(report: &mut Report, build: &BuildArgs, d: u32) {
    report
        .config("r", build.r)
        .config("b1", build.b1)
        .config("b2", build.b2)
        .config("M", build.m)
        .config("D", d)
        .config("eps0", &build.eps0);
}

fn cmd_omega(args: &OmegaArgs, prec: u64) -> Result<Report, String> {
    if args.r < 2 {
        return Err("--r must be at least 2".into());
    }
    if args.beta < 1 {
        return Err("--beta must be at least 1".into());
    }
    let alpha = args.alpha.as_deref().map(parse_rat).transpose()?;

    let mut report = Report::new("omega");
    report
        .config("r", args.r)
        .config("beta", args.beta)
        .config("len", args.len)
        .config("alpha", args.alpha.as_deref().unwrap_or("-"))
        .config("prec", prec);

    let spec = OmegaSpec::new(args.r, args.beta);
    let coeffs = omega_coeff_checks(spec, args.len);
    let mut checks = CheckSet::new();
    let denom_fail = coeffs.iter().find(|c| !c.denom_divides);
    checks.push(
        "denominators divide r^(2l)",
        denom_fail.is_none(),
        match denom_fail {
            None => format!("every l <= {}", args.len),
            Some(c) => format!("first violation at l = {}, b_l = {}", c.ell, c.coeff),
        },
    );
    let size_fail = coeffs.iter().find(|c| !c.size_ok);
    checks.push(
        "coefficients within 2^beta (2 beta)^l",
        size_fail.is_none(),
        match size_fail {
            None => format!("every l <= {}", args.len),
            Some(c) => format!("first violation at l = {}, b_l = {}", c.ell, c.coeff),
        },
    );
    if let Some(alpha) = alpha {
        match omega_eval_ball(spec, &alpha, prec) {
            Ok(ball) => checks.push("certified evaluation", true, format!("omega({alpha}) in {ball}")),
            Err(OmegaError::OutOfDomain { j }) => checks.push(
                "certified evaluation",
                false,
                format!("1 - {j} alpha is not positive at alpha = {alpha}"),
            ),
            Err(e) => checks.push("certified evaluation", false, e.to_string()),
        }
    }
    report.extend_checks(checks);
    Ok(report)
}

fn cmd_pade(args: &BuildArgs, prec: u64) -> Result<Report, String> {
    let (_, cfg) = validated_pade_config(args, 10, prec)?;
    let mut report = Report::new("pade");
    echo_build(&mut report, args, cfg.d);
    report.config("prec", prec);
    let checks = verify_lemma("pade-build", &cfg).expect("known id");
    report.extend_checks(checks);
    Ok(report)
}

fn cmd_derive(args: &DeriveArgs, prec: u64) -> Result<Report, String> {
    let (_, mut cfg) = validated_pade_config(&args.build, 10, prec)?;
    cfg.k_max = args.kmax;
    let mut report = Report::new("derive");
    echo_build(&mut report, &args.build, cfg.d);
    report.config("kmax", args.kmax).config("prec", prec);
    let mut checks = verify_lemma("bracket-relation", &cfg).expect("known id");
    checks.merge(verify_lemma("bracket-series", &cfg).expect("known id"));
    report.extend_checks(checks);
    Ok(report)
}

fn cmd_certify(args: &CertifyArgs, prec: u64) -> Result<Report, String> {
    let (_, mut cfg) = validated_pade_config(&args.build, 20, prec)?;
    cfg.n0 = parse_int(&args.n0)?;
    if cfg.n0 < Int::from(2) {
        return Err("--n0 must be at least 2".into());
    }
    let mut report = Report::new("certify");
    echo_build(&mut report, &args.build, cfg.d);
    report.config("n0", &args.n0).config("prec", prec);
    let checks = verify_lemma("delta-rank", &cfg).expect("known id");
    report.extend_checks(checks);
    Ok(report)
}

fn cmd_pipeline(args: &PipelineArgs, prec: u64) -> Result<Report, String> {
    match args.mode {
        Mode::Desk => cmd_pipeline_desk(args, prec),
        Mode::Paper => cmd_pipeline_paper(args, prec),
    }
}

fn cmd_pipeline_desk(args: &PipelineArgs, prec: u64) -> Result<Report, String> {
    let (pade_cfg, cfg) = validated_pade_config(&args.build, 20, prec)?;
    let n0 = parse_int(&args.n0)?;
    let s = parse_int(&args.s)?;
    let b_const = parse_int(&args.b_const)?;
    let params = desk_params(
        &n0,
        cfg.d,
        args.build.m,
        &pade_cfg.eps0,
        args.build.r,
        &s,
        &b_const,
        prec,
    )
    .map_err(|e| e.to_string())?;

    let mut report = Report::new("pipeline");
    echo_build(&mut report, &args.build, cfg.d);
    report
        .config("mode", "desk")
        .config("n0", &args.n0)
        .config("s", &args.s)
        .config("b_const", &args.b_const)
        .config("prec", prec);
    match chi(&params) {
        Ok(ball) => report.config("chi", ball),
        Err(_) => report.config("chi", "undefined at this magnitude"),
    };
    let mut checks = CheckSet::new();
    checks.push(
        "parameter gates pass",
        true,
        format!("n0 = {}, D = {}, M = {}", n0, cfg.d, args.build.m),
    );

    let triple = match build_initial_pade(&pade_cfg) {
        Ok(t) => t,
        Err(e) => {
            checks.push("construction succeeds", false, e.to_string());
            report.extend_checks(checks);
            return Ok(report);
        }
    };
    checks.push(
        "construction succeeds",
        triple.vanish_order >= pade_cfg.vanishing_target(),
        format!(
            "vanish order {} target {}",
            triple.vanish_order,
            pade_cfg.vanishing_target()
        ),
    );

    let ctx = make_context(args.build.r, args.build.m, args.build.b1, args.build.b2);
    let family = build_family(&ctx, [&triple.p0, &triple.p1, &triple.p2], 8);
    let alpha = Rat::new(Int::from(1), n0.clone());
    let certificate = match rank3_certificate(&ctx, &family, &pade_cfg, &alpha) {
        Ok(c) => c,
        Err(e) => {
            checks.push("independence certificate", false, e.to_string());
            report.extend_checks(checks);
            return Ok(report);
        }
    };
    checks.push(
        "independence certificate",
        true,
        format!(
            "a = {}, derivative indices {:?}",
            certificate.a, certificate.indices
        ),
    );

    let matrix = match build_approximants(&params, &pade_cfg, &family, &certificate) {
        Ok(m) => m,
        Err(e) => {
            checks.push("approximant matrix assembled", false, e.to_string());
            report.extend_checks(checks);
            return Ok(report);
        }
    };
    checks.push(
        "approximant matrix assembled",
        true,
        format!("scale bits {}", matrix.z.bits()),
    );

    match verify_properties(&matrix, &params, &pade_cfg, &triple) {
        Ok(property_report) => checks.merge(property_report.checks),
        Err(e) => checks.push("structural properties hold", false, e.to_string()),
    }
    report.extend_checks(checks);
    Ok(report)
}

fn cmd_pipeline_paper(args: &PipelineArgs, prec: u64) -> Result<Report, String> {
    let n_ref = parse_int(
        args.n_ref
            .as_deref()
            .ok_or("paper mode requires --N (window anchor)")?,
    )?;
    let n_mag = match args.n_mag.as_deref() {
        Some(s) => parse_int(s)?,
        None => n_ref.clone(),
    };
    let theta = parse_rat(
        args.theta
            .as_deref()
            .ok_or("paper mode requires --theta (cutoff exponent)")?,
    )?;
    let margin = parse_rat(&args.margin)?;
    let eps0 = parse_rat(&args.build.eps0)?;
    let s = parse_int(&args.s)?;
    let b_const = parse_int(&args.b_const)?;

    let params = compute_params(
        &n_ref,
        &n_mag,
        &theta,
        &eps0,
        args.build.r,
        &s,
        &b_const,
        &margin,
        prec,
    )
    .map_err(|e| e.to_string())?;

    let mut report = Report::new("pipeline");
    report
        .config("mode", "paper")
        .config("N", &n_ref)
        .config("n_mag", &n_mag)
        .config("theta", &theta)
        .config("eps0", &args.build.eps0)
        .config("margin", &args.margin)
        .config("r", args.build.r)
        .config("prec", prec);
    let mut checks = CheckSet::new();
    checks.push(
        "parameter gates pass",
        true,
        format!("derived M = {}, D = {}", params.m_cap, params.d),
    );
    match chi(&params) {
        Ok(ball) => checks.push("chi defined", true, format!("chi in {ball}")),
        Err(e) => checks.push("chi defined", false, e.to_string()),
    }
    report.extend_checks(checks);
    Ok(report)
}

fn cmd_scan(args: &ScanArgs) -> Result<Report, String> {
    let poly = parse_poly(&args.poly)?;
    let s = parse_int(&args.s)?;
    let (lo, hi) = parse_range(&args.range)?;
    let primes = args.primes.as_deref().map(parse_primes).transpose()?.unwrap_or_default();
    let eq = Equation::new(poly, s).map_err(|e| e.to_string())?;

    let options = ScanOptions { prefilter_primes: primes };
    let solutions = scan_with_options(&eq, lo, hi, &options);

    let mut report = Report::new("scan");
    report
        .config("poly", &args.poly)
        .config("s", &args.s)
        .config("range", &args.range)
        .config("primes", args.primes.as_deref().unwrap_or("-"));
    let mut checks = CheckSet::new();
    for sol in &solutions {
        checks.push(
            format!("solution at n = {}", sol.n),
            true,
            format!("x = {}, value has {} digits", sol.x, sol.value.to_string().len()),
        );
    }
    checks.push(
        "scan completed",
        true,
        format!("n in [{lo}, {hi}], {} solutions", solutions.len()),
    );
    report.extend_checks(checks);

    if let Some(path) = &args.jsonl {
        write_jsonl(path, &solutions)?;
    }
    if let Some(path) = &args.csv {
        write_csv(path, &solutions)?;
    }
    Ok(report)
}

fn write_jsonl(path: &PathBuf, solutions: &[Solution]) -> Result<(), String> {
    let mut out = String::new();
    for sol in solutions {
        out.push_str(&sol.json_line());
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn write_csv(path: &PathBuf, solutions: &[Solution]) -> Result<(), String> {
    let mut out = String::from("n,x,digits_of_value\n");
    for sol in solutions {
        out.push_str(&format!("{},{},{}\n", sol.n, sol.x, sol.value.to_string().len()));
    }
    std::fs::write(path, out).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn cmd_exponent(prec: u64) -> Report {
    let optimum = optimize_exponent(prec);
    let mut report = Report::new("exponent");
    report.config("prec", prec);
    let mut checks = CheckSet::new();
    let coeffs: Vec<String> = optimum.critical.coeffs().iter().map(|c| c.to_string()).collect();
    checks.push(
        "critical polynomial",
        true,
        format!("coefficients {} (constant first)", coeffs.join(",")),
    );
    checks.push("eps0 = 2 - sqrt(2)", true, format!("enclosure {}", optimum.eps0));
    checks.push(
        "theta = 17 - 12 sqrt(2)",
        true,
        format!("enclosure {}", optimum.theta),
    );
    checks.push(
        "count exponent = 12 sqrt(2) - 16",
        true,
        format!("enclosure {}", optimum.exponent),
    );
    let bound = Rat::new(Int::from(33), Int::from(34));
    let upper = optimum.exponent.upper_rat();
    checks.push(
        "count exponent below 33/34",
        upper < bound,
        format!("upper endpoint ~{:.12e} vs 33/34 ~{:.12e}", rat_f64(&upper), rat_f64(&bound)),
    );
    report.extend_checks(checks);
    report
}

fn cmd_verify_lemma(args: &VerifyLemmaArgs, prec: u64) -> Result<Report, String> {
    let cfg = LemmaConfig {
        r: args.r,
        beta1: args.b1,
        beta2: args.b2,
        m_cap: args.m,
        d: args.d,
        eps0: parse_rat(&args.eps0)?,
        k_max: args.kmax,
        n0: parse_int(&args.n0)?,
        points: args.points,
        rows: args.rows,
        cols: args.cols,
        entry_bound: args.entry_bound,
        seed: args.seed,
        prec,
    };
    let checks = match verify_lemma(&args.id, &cfg) {
        Ok(checks) => checks,
        Err(LemmaError::UnknownLemma(id)) => {
            return Err(format!("unknown lemma id {id:?}; known ids: {}", LEMMA_IDS.join(", ")))
        }
    };
    let mut report = Report::new("verify-lemma");
    report
        .config("id", &args.id)
        .config("r", args.r)
        .config("b1", args.b1)
        .config("b2", args.b2)
        .config("M", args.m)
        .config("D", args.d)
        .config("eps0", &args.eps0)
        .config("kmax", args.kmax)
        .config("n0", &args.n0)
        .config("seed", args.seed)
        .config("prec", prec);
    report.extend_checks(checks);
    Ok(report)
}
