//! Command-line front-end: parameter checks, quantization scans, existence
//! surveys, density export for plotting, and the verification suite.
//!
//! Exit codes: 0 ok, 2 invalid parameters, 3 no roots under --expect-roots,
//! 4 not a bound state, 5 verification failure.

mod records;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use kerr_dirac::angular::{angular_eigenfunction, angular_spectrum, AngularProblem};
use kerr_dirac::quantize::{check_kerr_newman, solve_kerr, KerrWindow, Side};
use kerr_dirac::radial::{
    classify_bound_state, compute_omega, omega_defect, BoundStateSolution, Branch,
    Classification, ExtremeKNParams, RejectionReason,
};
use kerr_dirac::verify::{
    angular_oracle, check_oscillation, check_regular, check_threshold_case,
    regular_canonical_cases, threshold_canonical_cases, ThresholdClass, DEFAULT_ORACLE_GRIDS,
};
use kerr_dirac::HalfInteger;

const EXIT_NO_ROOTS: u8 = 3;
const EXIT_NOT_BOUND: u8 = 4;
const EXIT_VERIFY_FAILED: u8 = 5;

#[derive(Parser)]
#[command(
    name = "kerr-dirac",
    version,
    about = "Bound states of the Dirac equation in extreme Kerr-Newman geometry"
)]
struct Cli {
    /// Flat key=value config file supplying defaults; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the bound-state energy omega and the necessary-condition verdicts.
    Omega(OmegaArgs),
    /// Print angular eigenvalues lambda_j; optionally export one |g(theta)|^2.
    Angular(AngularArgs),
    /// Scan the quantization condition over (n, j) and write solution records.
    SolveKerr(SolveKerrArgs),
    /// Survey an extreme Kerr-Newman background for bound states.
    CheckKn(CheckKnArgs),
    /// Emit radial and angular density samples for one bound state.
    Eigenfunction(EigenfunctionArgs),
    /// Run verification checks (asymptotic regime demonstrations, matrix oracle).
    Verify(VerifyArgs),
}

#[derive(Args)]
struct OmegaArgs {
    /// Azimuthal half-integer k (e.g. 2.5 or -0.5).
    #[arg(long, allow_hyphen_values = true)]
    k: f64,
    /// Kerr rotation parameter a.
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    /// Black-hole charge Q.
    #[arg(long = "Q", default_value_t = 0.0, allow_hyphen_values = true)]
    charge: f64,
    /// Particle charge e.
    #[arg(long = "e", default_value_t = 0.0, allow_hyphen_values = true)]
    particle_charge: f64,
    /// Particle rest mass m.
    #[arg(long = "m")]
    particle_mass: f64,
    /// Black-hole mass; defaults to sqrt(a^2 + Q^2) and must match it.
    #[arg(long)]
    bh_mass: Option<f64>,
}

#[derive(Args)]
struct AngularArgs {
    /// Azimuthal half-integer k.
    #[arg(long, allow_hyphen_values = true)]
    k: f64,
    /// L = a m.
    #[arg(long, allow_hyphen_values = true)]
    am: f64,
    /// Omega = a omega.
    #[arg(long = "a-omega", allow_hyphen_values = true)]
    a_omega: f64,
    /// Largest |j| to report.
    #[arg(long)]
    jmax: Option<u32>,
    /// Shooting resolution.
    #[arg(long)]
    grid: Option<u32>,
    /// Branch whose eigenfunction density to export.
    #[arg(long, allow_hyphen_values = true, requires = "density_out")]
    j: Option<i32>,
    /// Write |g(theta)|^2 samples of branch --j here.
    #[arg(long, requires = "j")]
    density_out: Option<PathBuf>,
    /// Number of theta samples for the density export.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args)]
struct SolveKerrArgs {
    /// Azimuthal half-integer k.
    #[arg(long, allow_hyphen_values = true)]
    k: f64,
    /// Particle rest mass m.
    #[arg(long = "m")]
    particle_mass: f64,
    /// Quantization index range, inclusive (e.g. 0..10 or 2).
    #[arg(long)]
    n: Option<String>,
    /// Angular branch range, inclusive (e.g. -6..6 or -4); 0 is skipped.
    #[arg(long, allow_hyphen_values = true)]
    j: Option<String>,
    /// Window side: -, +, or both.
    #[arg(long, allow_hyphen_values = true)]
    side: Option<String>,
    /// Window scan resolution.
    #[arg(long)]
    scan: Option<u32>,
    /// Angular solver resolution.
    #[arg(long)]
    grid: Option<u32>,
    /// Relative tolerance of the normalization quadrature.
    #[arg(long)]
    quad_tol: Option<f64>,
    /// Write records here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit 3 if the scan validates no root.
    #[arg(long)]
    expect_roots: bool,
    /// Only print the window |k|/(2m) < |a| < |k|/(sqrt(2) m) and exit.
    #[arg(long)]
    window_only: bool,
}

#[derive(Args)]
struct CheckKnArgs {
    /// Azimuthal half-integer k.
    #[arg(long, allow_hyphen_values = true)]
    k: f64,
    /// Kerr rotation parameter a.
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    /// Black-hole charge Q.
    #[arg(long = "Q", default_value_t = 0.0, allow_hyphen_values = true)]
    charge: f64,
    /// Particle charge e.
    #[arg(long = "e", default_value_t = 0.0, allow_hyphen_values = true)]
    particle_charge: f64,
    /// Particle rest mass m.
    #[arg(long = "m")]
    particle_mass: f64,
    /// Black-hole mass; defaults to sqrt(a^2 + Q^2) and must match it.
    #[arg(long)]
    bh_mass: Option<f64>,
    /// Largest |j| to survey.
    #[arg(long)]
    jmax: Option<u32>,
    /// Largest quantization index tried per branch.
    #[arg(long)]
    n_max: Option<u32>,
    /// Angular solver resolution.
    #[arg(long)]
    grid: Option<u32>,
    /// Relative tolerance of the normalization quadrature.
    #[arg(long)]
    quad_tol: Option<f64>,
    /// Write bound-state records here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EigenfunctionArgs {
    /// Record file written by solve-kerr or check-kn.
    #[arg(long)]
    record: Option<PathBuf>,
    /// Which record in the file to use (0-based).
    #[arg(long, default_value_t = 0)]
    index: usize,
    /// Azimuthal half-integer k (explicit-parameter mode).
    #[arg(long, allow_hyphen_values = true)]
    k: Option<f64>,
    /// Particle rest mass m (explicit-parameter mode).
    #[arg(long = "m")]
    particle_mass: Option<f64>,
    /// L = a m of the state (explicit-parameter mode).
    #[arg(long, allow_hyphen_values = true)]
    am: Option<f64>,
    /// Angular branch (explicit-parameter mode).
    #[arg(long, allow_hyphen_values = true)]
    j: Option<i32>,
    /// Largest quantization index accepted.
    #[arg(long)]
    n_max: Option<u32>,
    /// Angular solver resolution.
    #[arg(long)]
    grid: Option<u32>,
    /// Radial density output path.
    #[arg(long)]
    radial_out: Option<PathBuf>,
    /// Angular density output path.
    #[arg(long)]
    angular_out: Option<PathBuf>,
    /// Lower end of the log-spaced radial grid.
    #[arg(long)]
    x_min: Option<f64>,
    /// Upper end of the radial grid; default covers every Laguerre zero.
    #[arg(long)]
    x_max: Option<f64>,
    /// Number of radial samples.
    #[arg(long)]
    points: Option<usize>,
    /// Number of theta samples.
    #[arg(long)]
    theta_points: Option<usize>,
    /// Relative tolerance of the normalization quadrature.
    #[arg(long)]
    quad_tol: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which check to run.
    #[arg(long, default_value = "all", value_parser = ["all", "oscillation", "regular", "threshold", "angular-oracle"])]
    case: String,
    /// Detuning tau for the oscillation check.
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
    /// Azimuthal half-integer k for the angular-oracle check.
    #[arg(long, allow_hyphen_values = true)]
    k: Option<f64>,
    /// Largest |j| compared in the angular-oracle check.
    #[arg(long)]
    jmax: Option<u32>,
    /// Shooting resolution for checks that need the angular solver.
    #[arg(long)]
    grid: Option<u32>,
}

/// Terminal failure: message for stderr plus the process exit code.
struct Failure {
    code: u8,
    message: String,
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: 2,
        message: e.to_string(),
    }
}

fn verify_failure(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_VERIFY_FAILED,
        message: e.to_string(),
    }
}

/// Key=value defaults loaded from --config; flags always win.
struct FileConfig(HashMap<String, String>);

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let mut map = HashMap::new();
        if let Some(path) = path {
            let text = fs::read_to_string(path)
                .map_err(|e| invalid(format!("config {}: {e}", path.display())))?;
            for (ln, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    invalid(format!("config line {}: expected key=value", ln + 1))
                })?;
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Self(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, Failure>
    where
        T::Err: std::fmt::Display,
    {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| invalid(format!("config key {key}: {e}"))),
        }
    }
}

/// Effective value of a setting: flag, then config key, then default.
fn pick<T: FromStr>(flag: Option<T>, cfg: &FileConfig, key: &str, default: T) -> Result<T, Failure>
where
    T::Err: std::fmt::Display,
{
    if let Some(v) = flag {
        return Ok(v);
    }
    Ok(cfg.get(key)?.unwrap_or(default))
}

fn half_integer(v: f64) -> Result<HalfInteger, Failure> {
    HalfInteger::try_from_f64(v).map_err(invalid)
}

fn check_resolution(name: &str, v: u32) -> Result<(), Failure> {
    if v < 16 {
        return Err(invalid(format!("{name} must be >= 16, got {v}")));
    }
    Ok(())
}

fn check_tolerance(name: &str, v: f64) -> Result<(), Failure> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(invalid(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// Inclusive integer range in the forms "lo..hi" or "value".
fn parse_range(text: &str, name: &str) -> Result<(i64, i64), Failure> {
    let parse_one = |s: &str| -> Result<i64, Failure> {
        s.trim()
            .parse()
            .map_err(|e| invalid(format!("{name} range {text:?}: {e}")))
    };
    let (lo, hi) = match text.split_once("..") {
        Some((lo, hi)) => (parse_one(lo)?, parse_one(hi)?),
        None => {
            let v = parse_one(text)?;
            (v, v)
        }
    };
    if hi < lo {
        return Err(invalid(format!("{name} range {text:?} is empty")));
    }
    Ok((lo, hi))
}

fn parse_sides(text: &str) -> Result<Vec<Side>, Failure> {
    match text {
        "-" => Ok(vec![Side::Negative]),
        "+" => Ok(vec![Side::Positive]),
        "both" => Ok(vec![Side::Negative, Side::Positive]),
        other => Err(invalid(format!("side must be -, + or both, got {other:?}"))),
    }
}

fn build_params(
    k: f64,
    a: f64,
    charge: f64,
    particle_mass: f64,
    particle_charge: f64,
    bh_mass: Option<f64>,
) -> Result<ExtremeKNParams, Failure> {
    let k = half_integer(k)?;
    let mass = bh_mass.unwrap_or_else(|| (a * a + charge * charge).sqrt());
    ExtremeKNParams::new(mass, a, charge, particle_mass, particle_charge, k).map_err(invalid)
}

/// Largest relative residual of the first-order radial system over a
/// log-spaced probe of the working interval.
fn max_residual(s: &BoundStateSolution) -> f64 {
    let (lo, hi) = (1e-3_f64, 50.0_f64);
    (0..25)
        .map(|i| {
            let x = lo * (hi / lo).powf(i as f64 / 24.0);
            s.rx_residual(x)
        })
        .fold(0.0, f64::max)
}

fn describe_rejection(reason: &RejectionReason) -> String {
    match reason {
        RejectionReason::EnergyOutOfRange { omega_over_m } => {
            format!("energy out of range: |omega|/m = {omega_over_m}")
        }
        RejectionReason::KappaTooSmall { kappa_sq } => {
            format!("kappa^2 = {kappa_sq} is not above 1/4")
        }
        RejectionReason::Quantization { min_residual } => {
            format!("quantization: min |1 + n + alpha + kappa| = {min_residual}")
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn write_density(path: &Path, coordinate: &str, rows: &[(f64, f64)]) -> Result<(), Failure> {
    let mut text = format!("{coordinate} density\n");
    for (x, d) in rows {
        let _ = writeln!(text, "{x:e} {d:e}");
    }
    write_text(path, &text)
}

fn cmd_omega(args: OmegaArgs) -> Result<(), Failure> {
    let p = build_params(
        args.k,
        args.a,
        args.charge,
        args.particle_mass,
        args.particle_charge,
        args.bh_mass,
    )?;
    let omega = compute_omega(&p);
    let m = p.particle_mass;
    let rho = p.rho();
    let mu = 2.0 * rho * omega + p.particle_charge * p.charge;
    let sigma: i32 = if omega < 0.0 { -1 } else { 1 };
    println!("omega = {omega}");
    println!("omega/m = {}", omega / m);
    println!("tau = {}", omega_defect(&p, omega));
    println!("mu = {mu}");
    println!("sigma = {sigma}");
    if omega.abs() < m {
        println!(
            "energy condition m^2 - omega^2 > 0: satisfied (|omega|/m = {})",
            omega.abs() / m
        );
    } else {
        println!(
            "energy condition m^2 - omega^2 > 0: violated (|omega|/m = {}): no bound state",
            omega.abs() / m
        );
    }
    if p.a == 0.0 {
        println!("verdict: no bound state (RN): a = 0 admits no quantized state");
    }
    Ok(())
}

fn cmd_angular(args: AngularArgs, cfg: &FileConfig) -> Result<(), Failure> {
    let k = half_integer(args.k)?;
    let jmax = pick(args.jmax, cfg, "jmax", 3)?;
    let grid = pick(args.grid, cfg, "grid", 500)?;
    check_resolution("grid", grid)?;
    if jmax < 1 {
        return Err(invalid("jmax must be >= 1"));
    }
    let p = AngularProblem::new(k, args.am, args.a_omega).map_err(invalid)?;
    let spectrum = angular_spectrum(&p, jmax, grid).map_err(invalid)?;
    println!("k={} am={} a_omega={}", k, args.am, args.a_omega);
    for &(j, lambda) in &spectrum.eigenvalues {
        println!("j={j} lambda={lambda}");
    }
    if let (Some(j), Some(path)) = (args.j, &args.density_out) {
        let samples = pick(args.samples, cfg, "samples", 720)?;
        if samples < 8 {
            return Err(invalid("samples must be >= 8"));
        }
        let (lambda, sf, mismatch) =
            angular_eigenfunction(&p, j, grid, samples).map_err(invalid)?;
        let rows: Vec<(f64, f64)> = sf
            .xs
            .iter()
            .zip(&sf.values)
            .map(|(&t, v)| (t, v[0].norm_sqr() + v[1].norm_sqr()))
            .collect();
        write_density(path, "theta", &rows)?;
        println!("density: j={j} lambda={lambda} -> {}", path.display());
        println!("glue mismatch = {mismatch:e}");
    }
    Ok(())
}

fn cmd_solve_kerr(args: SolveKerrArgs, cfg: &FileConfig) -> Result<(), Failure> {
    let k = half_integer(args.k)?;
    let m = args.particle_mass;
    if !(m > 0.0 && m.is_finite()) {
        return Err(invalid("particle mass must be positive"));
    }
    if args.window_only {
        let window = KerrWindow::new(k, m).map_err(invalid)?;
        let (lo, hi) = window.a_bounds();
        println!("window: |k|/(2 m) < |a| < |k|/(sqrt(2) m): ({lo}, {hi})");
        println!(
            "mass product: M m = |a m| inside the window always exceeds {}",
            KerrWindow::MASS_PRODUCT_BOUND
        );
        return Ok(());
    }
    let scan = pick(args.scan, cfg, "scan", 2000)?;
    let grid = pick(args.grid, cfg, "grid", 500)?;
    check_resolution("scan", scan)?;
    check_resolution("grid", grid)?;
    let quad_tol = pick(args.quad_tol, cfg, "quad_tol", 1e-10)?;
    check_tolerance("quad_tol", quad_tol)?;
    let n_text = match args.n {
        Some(t) => t,
        None => cfg.get::<String>("n")?.unwrap_or_else(|| "0..0".into()),
    };
    let j_text = match args.j {
        Some(t) => t,
        None => cfg.get::<String>("j")?.unwrap_or_else(|| "-6..6".into()),
    };
    let side_text = match args.side {
        Some(t) => t,
        None => cfg.get::<String>("side")?.unwrap_or_else(|| "both".into()),
    };
    let (n_lo, n_hi) = parse_range(&n_text, "n")?;
    if n_lo < 0 {
        return Err(invalid("n must be non-negative"));
    }
    let (j_lo, j_hi) = parse_range(&j_text, "j")?;
    if j_lo < i32::MIN as i64 || j_hi > i32::MAX as i64 {
        return Err(invalid("j range out of bounds"));
    }
    let sides = parse_sides(&side_text)?;

    let mut recs = Vec::new();
    let mut suspicious = 0usize;
    for &side in &sides {
        for j in j_lo..=j_hi {
            if j == 0 {
                continue;
            }
            for n in n_lo..=n_hi {
                let roots =
                    solve_kerr(k, m, n as u32, j as i32, side, scan, grid).map_err(invalid)?;
                suspicious += roots.suspicious.len();
                for l in &roots.suspicious {
                    eprintln!(
                        "note: n={n} j={j}: sign change at L = {l} is within 1e-6 of the window edge; not validated"
                    );
                }
                for sol in &roots.solutions {
                    let norm = sol.normalization_integral(quad_tol).map_err(invalid)?;
                    recs.push(records::SolutionRecord::from_solution(
                        sol,
                        norm,
                        max_residual(sol),
                    ));
                }
            }
        }
    }
    let text = records::render(m, &recs);
    let out = match args.out {
        Some(p) => Some(p),
        None => cfg.get::<PathBuf>("out")?,
    };
    match &out {
        Some(path) => write_text(path, &text)?,
        None => print!("{text}"),
    }
    eprintln!("{} solution(s), {} suspicious root(s)", recs.len(), suspicious);
    if args.expect_roots && recs.is_empty() {
        return Err(Failure {
            code: EXIT_NO_ROOTS,
            message: "no validated roots in the requested scan".into(),
        });
    }
    Ok(())
}

fn cmd_check_kn(args: CheckKnArgs, cfg: &FileConfig) -> Result<(), Failure> {
    let p = build_params(
        args.k,
        args.a,
        args.charge,
        args.particle_mass,
        args.particle_charge,
        args.bh_mass,
    )?;
    let jmax = pick(args.jmax, cfg, "jmax", 6)?;
    let n_max = pick(args.n_max, cfg, "n_max", 10)?;
    let grid = pick(args.grid, cfg, "grid", 500)?;
    check_resolution("grid", grid)?;
    if jmax < 1 {
        return Err(invalid("jmax must be >= 1"));
    }
    let quad_tol = pick(args.quad_tol, cfg, "quad_tol", 1e-10)?;
    check_tolerance("quad_tol", quad_tol)?;
    let report = check_kerr_newman(&p, jmax, n_max, grid).map_err(invalid)?;
    println!("omega = {}", report.omega);
    println!("omega/m = {}", report.omega / p.particle_mass);
    println!("bound states: {}", report.bound_states.len());
    for s in &report.bound_states {
        let n = match s.branch {
            Branch::Special => -1,
            Branch::Laguerre { n } => n as i64,
        };
        println!("j={} lambda={}: bound, n={n}", s.j, s.lambda);
    }
    for (j, lambda, reason) in &report.rejections {
        println!("j={j} lambda={lambda}: rejected ({})", describe_rejection(reason));
    }
    let out = match args.out {
        Some(p) => Some(p),
        None => cfg.get::<PathBuf>("out")?,
    };
    if let Some(path) = out {
        let mut recs = Vec::with_capacity(report.bound_states.len());
        for s in &report.bound_states {
            let norm = s.normalization_integral(quad_tol).map_err(invalid)?;
            recs.push(records::SolutionRecord::from_solution(
                s,
                norm,
                max_residual(s),
            ));
        }
        write_text(&path, &records::render(p.particle_mass, &recs))?;
    }
    Ok(())
}

fn cmd_eigenfunction(args: EigenfunctionArgs, cfg: &FileConfig) -> Result<(), Failure> {
    let grid = pick(args.grid, cfg, "grid", 500)?;
    check_resolution("grid", grid)?;
    let quad_tol = pick(args.quad_tol, cfg, "quad_tol", 1e-10)?;
    check_tolerance("quad_tol", quad_tol)?;
    let n_max = pick(args.n_max, cfg, "n_max", 15)?;

    // Resolve (params, lambda, j) from a record file or explicit flags.
    let (params, lambda, j) = if let Some(path) = &args.record {
        let text = fs::read_to_string(path)
            .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        let (m, recs) = records::parse(&text).map_err(invalid)?;
        let rec = recs
            .get(args.index)
            .ok_or_else(|| invalid(format!("record index {} out of range", args.index)))?;
        let k = half_integer(rec.k)?;
        let a = rec.am / m;
        let params = ExtremeKNParams::kerr(a, m, k).map_err(invalid)?;
        (params, rec.lambda, rec.j)
    } else {
        let (Some(k), Some(m), Some(am), Some(j)) =
            (args.k, args.particle_mass, args.am, args.j)
        else {
            return Err(invalid(
                "provide --record, or all of --k, --m, --am, --j",
            ));
        };
        let k = half_integer(k)?;
        if !(m > 0.0 && m.is_finite()) {
            return Err(invalid("particle mass must be positive"));
        }
        let a = am / m;
        let params = ExtremeKNParams::kerr(a, m, k).map_err(invalid)?;
        let omega = compute_omega(&params);
        let ap = AngularProblem::new(k, am, a * omega).map_err(invalid)?;
        let spectrum =
            angular_spectrum(&ap, j.unsigned_abs().max(1), grid).map_err(invalid)?;
        let lambda = spectrum
            .lambda(j)
            .ok_or_else(|| invalid(format!("no angular branch j = {j}")))?;
        (params, lambda, j)
    };

    let solution = match classify_bound_state(&params, lambda, j, n_max) {
        Classification::Bound(s) => *s,
        Classification::Rejected { omega, reason } => {
            return Err(Failure {
                code: EXIT_NOT_BOUND,
                message: format!(
                    "not a bound state (omega = {omega}): {}",
                    describe_rejection(&reason)
                ),
            });
        }
    };

    // The angular eigenvalue of branch j must reproduce the lambda the state
    // was classified with, or the (lambda, j) pair does not belong to this
    // geometry.
    let ap = AngularProblem::new(
        params.k,
        params.a * params.particle_mass,
        params.a * solution.omega,
    )
    .map_err(invalid)?;
    let theta_points = pick(args.theta_points, cfg, "theta_points", 720)?;
    if theta_points < 8 {
        return Err(invalid("theta_points must be >= 8"));
    }
    let (lambda_j, gf, mismatch) =
        angular_eigenfunction(&ap, j, grid, theta_points).map_err(invalid)?;
    if (lambda_j - lambda).abs() > 1e-6 * lambda.abs().max(1.0) {
        return Err(Failure {
            code: EXIT_NOT_BOUND,
            message: format!(
                "lambda = {lambda} is not the branch-{j} angular eigenvalue {lambda_j}"
            ),
        });
    }

    let n = match solution.branch {
        Branch::Special => 0,
        Branch::Laguerre { n } => n,
    };
    let c = &solution.coeffs;
    let x_min = pick(args.x_min, cfg, "x_min", 1e-4)?;
    check_tolerance("x_min", x_min)?;
    let x_max_default =
        ((4.0 * (n as f64 + 1.0) + 4.0 * c.kappa + 8.0) / (2.0 * c.gamma)).max(50.0);
    let x_max = pick(args.x_max, cfg, "x_max", x_max_default)?;
    if !(x_max > x_min) {
        return Err(invalid("x_max must exceed x_min"));
    }
    let points = pick(args.points, cfg, "points", 4001)?;
    if points < 9 {
        return Err(invalid("points must be >= 9"));
    }

    let radial_out = pick(
        args.radial_out,
        cfg,
        "radial_out",
        PathBuf::from("radial_density.txt"),
    )?;
    let angular_out = pick(
        args.angular_out,
        cfg,
        "angular_out",
        PathBuf::from("angular_density.txt"),
    )?;

    let rows: Vec<(f64, f64)> = (0..points)
        .map(|i| {
            let x = x_min * (x_max / x_min).powf(i as f64 / (points - 1) as f64);
            let f = solution.eigenfunction(x);
            (x, f[0].norm_sqr() + f[1].norm_sqr())
        })
        .collect();
    write_density(&radial_out, "x", &rows)?;

    let angular_rows: Vec<(f64, f64)> = gf
        .xs
        .iter()
        .zip(&gf.values)
        .map(|(&t, v)| (t, v[0].norm_sqr() + v[1].norm_sqr()))
        .collect();
    write_density(&angular_out, "theta", &angular_rows)?;

    let norm = solution
        .normalization_integral(quad_tol)
        .map_err(invalid)?;
    let rec = records::SolutionRecord::from_solution(&solution, norm, max_residual(&solution));
    print!("{}", records::render(params.particle_mass, &[rec]));
    println!("radial density: {} ({points} points, x in [{x_min}, {x_max}])", radial_out.display());
    println!("angular density: {} ({theta_points} points)", angular_out.display());
    println!("angular eigenvalue: lambda_j = {lambda_j}, glue mismatch = {mismatch:e}");
    Ok(())
}

fn class_name(c: ThresholdClass) -> &'static str {
    match c {
        ThresholdClass::Oscillatory => "oscillatory",
        ThresholdClass::Growing => "growing",
        ThresholdClass::PowerLaw => "power-law",
    }
}

fn run_oscillation(tau: f64, grid: u32) -> Result<(bool, String), Failure> {
    let k = HalfInteger::from_twice(1).unwrap();
    let p = ExtremeKNParams::kerr(0.4, 1.0, k).map_err(verify_failure)?;
    let rho = p.rho();
    let omega = compute_omega(&p) + tau / (rho * rho + p.a * p.a);
    let ap = AngularProblem::new(k, p.a * p.particle_mass, p.a * omega).map_err(verify_failure)?;
    let spectrum = angular_spectrum(&ap, 1, grid).map_err(verify_failure)?;
    let lambda = spectrum.lambda(1).unwrap();
    let report = match check_oscillation(&p, omega, lambda) {
        Ok(r) => r,
        Err(e @ kerr_dirac::Error::InvalidParameter(_)) => return Err(invalid(e)),
        Err(e) => return Err(verify_failure(e)),
    };
    let verdict = if report.non_normalizable {
        "non-normalizable"
    } else {
        "normalizable decay"
    };
    Ok((
        report.non_normalizable,
        format!(
            "oscillation: tau={} min|w|/|w(1)|=({:.3}, {:.3}) integrand slope={:.3}: {verdict}",
            report.tau, report.min_ratio[0], report.min_ratio[1], report.integrand_slope
        ),
    ))
}

fn run_regular() -> Result<Vec<(bool, String)>, Failure> {
    let mut out = Vec::new();
    for (tag, a, b) in regular_canonical_cases() {
        let report = check_regular(tag, a, b).map_err(verify_failure)?;
        out.push((
            report.passed,
            format!(
                "regular {tag}: inf |y|/sqrt(x) = {:.3e}, min |y| = {:.3e}: {}",
                report.inf_sqrt_ratio,
                report.min_norm_ratio,
                if report.passed { "bounded below" } else { "FAILED" }
            ),
        ));
    }
    Ok(out)
}

fn run_threshold() -> Result<Vec<(bool, String)>, Failure> {
    let mut out = Vec::new();
    for (tag, [rho, m, mu, sigma, lambda]) in threshold_canonical_cases() {
        let report = check_threshold_case(rho, m, mu, sigma, lambda).map_err(verify_failure)?;
        out.push((
            report.passed,
            format!(
                "threshold {tag}: class={} metric={:.3e}: {}",
                class_name(report.class),
                report.metric,
                if report.passed { "as predicted" } else { "FAILED" }
            ),
        ));
    }
    Ok(out)
}

fn run_angular_oracle(k: f64, jmax: u32, grid: u32) -> Result<(bool, String), Failure> {
    let k = half_integer(k)?;
    let p = AngularProblem::new(k, 0.7, -0.3).map_err(invalid)?;
    let (oracle, errors) =
        angular_oracle(&p, jmax + 1, &DEFAULT_ORACLE_GRIDS).map_err(verify_failure)?;
    let shooting = angular_spectrum(&p, jmax, grid).map_err(verify_failure)?;
    let mut worst = 0.0_f64;
    let mut lines = String::new();
    for &(j, lambda) in &shooting.eigenvalues {
        let (nearest, err) = oracle
            .eigenvalues
            .iter()
            .map(|&(_, v)| v)
            .zip(&errors)
            .min_by(|(a, _), (b, _)| {
                (a - lambda).abs().total_cmp(&(b - lambda).abs())
            })
            .unwrap();
        let diff = (nearest - lambda).abs();
        worst = worst.max(diff);
        let _ = writeln!(
            lines,
            "  j={j} shooting={lambda} oracle={nearest} diff={diff:.3e} (oracle error est {err:.3e})"
        );
    }
    let passed = worst <= 1e-6;
    Ok((
        passed,
        format!(
            "angular-oracle k={} at (L, Omega) = (0.7, -0.3): worst |diff| = {worst:.3e}: {}\n{}",
            k,
            if passed { "methods agree" } else { "FAILED" },
            lines.trim_end()
        ),
    ))
}

fn cmd_verify(args: VerifyArgs, cfg: &FileConfig) -> Result<(), Failure> {
    let tau = pick(args.tau, cfg, "tau", 0.1)?;
    let k = pick(args.k, cfg, "k", 0.5)?;
    let jmax = pick(args.jmax, cfg, "jmax", 3)?;
    let grid = pick(args.grid, cfg, "grid", 400)?;
    check_resolution("grid", grid)?;
    if jmax < 1 {
        return Err(invalid("jmax must be >= 1"));
    }
    let mut results: Vec<(bool, String)> = Vec::new();
    match args.case.as_str() {
        "oscillation" => results.push(run_oscillation(tau, grid)?),
        "regular" => results.extend(run_regular()?),
        "threshold" => results.extend(run_threshold()?),
        "angular-oracle" => results.push(run_angular_oracle(k, jmax, grid)?),
        "all" => {
            results.push(run_oscillation(tau, grid)?);
            results.extend(run_regular()?);
            results.extend(run_threshold()?);
            results.push(run_angular_oracle(k, jmax, grid)?);
        }
        other => return Err(invalid(format!("unknown case {other:?}"))),
    }
    let mut failed = 0;
    for (ok, line) in &results {
        println!("{} {line}", if *ok { "PASS" } else { "FAIL" });
        if !ok {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(Failure {
            code: EXIT_VERIFY_FAILED,
            message: format!("{failed} of {} checks failed", results.len()),
        });
    }
    println!("all {} checks passed", results.len());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Omega(args) => cmd_omega(args),
        Command::Angular(args) => cmd_angular(args, &cfg),
        Command::SolveKerr(args) => cmd_solve_kerr(args, &cfg),
        Command::CheckKn(args) => cmd_check_kn(args, &cfg),
        Command::Eigenfunction(args) => cmd_eigenfunction(args, &cfg),
        Command::Verify(args) => cmd_verify(args, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
