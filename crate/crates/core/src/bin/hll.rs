//! `hll`: command-line front end for the lossy Helmholtz study.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use lossy_helmholtz::analysis::{
    discrete_inf_sup, error_against_exact, estimate_cb, estimate_eta, quasi_optimality, solve_model_problem,
    AnalysisError, Discretization, ErrorReport, ReferenceSpace, StabilityReport,
};
use lossy_helmholtz::diskmesh::{default_geometry_degree, make_disk_mesh};
use lossy_helmholtz::exactsol::ExactSolution;
use lossy_helmholtz::femspace::DofSpace;
use lossy_helmholtz::freqsplit::{log_grid, make_cutoff, verify_symbol_bounds};
use lossy_helmholtz::linalg::LinalgError;
use lossy_helmholtz::study::{
    run_infsup_scan, run_study, write_infsup_csv, write_study_csv, write_symbol_csv, write_timing_csv, InfsupConfig,
    StudyConfig, StudyError, MAX_STUDY_DEGREE, MAX_STUDY_LEVEL,
};
use lossy_helmholtz::wavenumber::{dof_per_wavelength, Wavenumber};

const EXIT_USAGE: u8 = 2;
const EXIT_SINGULAR: u8 = 3;
const EXIT_FAILURE: u8 = 1;

#[derive(Parser)]
#[command(name = "hll", version, about = "Finite elements for the lossy Helmholtz equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the disk problem once and report errors and stability constants as JSON
    Solve(SolveArgs),
    /// Run the convergence study grid and write study.csv
    Study(StudyArgs),
    /// Discrete inf-sup constants against the closed-form bounds
    InfsupScan(ScanArgs),
    /// Evaluate the frequency-splitting symbol and its envelopes
    SymbolCheck(SymbolArgs),
    /// Adjoint approximability estimate for one space
    EtaEstimate(EtaArgs),
}

#[derive(Args)]
struct PointArgs {
    #[arg(long)]
    modulus: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha_tilde: f64,
    #[arg(long, default_value_t = 1)]
    p: usize,
    #[arg(long, default_value_t = 2)]
    level: usize,
    #[arg(long, default_value_t = StudyConfig::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = StudyConfig::default().eta_samples)]
    eta_samples: usize,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    point: PointArgs,
    /// output JSON file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StudyArgs {
    /// flat JSON configuration; defaults when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// output directory for study.csv and study_timing.csv
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "infsup.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct SymbolArgs {
    #[arg(long, default_value_t = 2.0)]
    lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// check a single frequency `re-zeta + i im-zeta` instead of the default grid
    #[arg(long, requires = "im_zeta")]
    re_zeta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    im_zeta: Option<f64>,
    #[arg(long, default_value_t = 1e-2)]
    s_min: f64,
    #[arg(long, default_value_t = 1e3)]
    s_max: f64,
    #[arg(long, default_value_t = 50)]
    s_count: usize,
    #[arg(long, default_value = "symbol.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct EtaArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        let code = match e {
            AnalysisError::Linalg(LinalgError::SingularMatrix(_)) => EXIT_SINGULAR,
            _ => EXIT_FAILURE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<StudyError> for Failure {
    fn from(e: StudyError) -> Self {
        match e {
            StudyError::Config(_) | StudyError::Wavenumber(_) | StudyError::Json(_) => Self::usage(e.to_string()),
            StudyError::Analysis(a) => a.into(),
            _ => Self {
                code: EXIT_FAILURE,
                message: e.to_string(),
            },
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("hll: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Study(a) => cmd_study(a),
        Command::InfsupScan(a) => cmd_infsup_scan(a),
        Command::SymbolCheck(a) => cmd_symbol_check(a),
        Command::EtaEstimate(a) => cmd_eta_estimate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("hll: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("HLL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("HLL_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(value).expect("reports serialize");
    s.push(b'\n');
    s
}

struct Point {
    z: Wavenumber,
    disc: Discretization,
}

fn build_point(a: &PointArgs) -> Result<Point, Failure> {
    if !(0.0..=1.0).contains(&a.alpha_tilde) {
        return Err(Failure::usage(format!(
            "--alpha-tilde {} outside [0, 1]",
            a.alpha_tilde
        )));
    }
    if a.p == 0 || a.p > MAX_STUDY_DEGREE {
        return Err(Failure::usage(format!("--p {} outside 1..={MAX_STUDY_DEGREE}", a.p)));
    }
    if a.level > MAX_STUDY_LEVEL {
        return Err(Failure::usage(format!("--level {} above {MAX_STUDY_LEVEL}", a.level)));
    }
    let z = Wavenumber::from_study_grid(a.modulus, a.alpha_tilde).map_err(|e| Failure::usage(e.to_string()))?;
    let mesh = make_disk_mesh(a.level, default_geometry_degree(a.p)).map_err(|e| Failure::usage(e.to_string()))?;
    let space = DofSpace::new(Arc::new(mesh), a.p).map_err(AnalysisError::from)?;
    Ok(Point {
        z,
        disc: Discretization::new(Arc::new(space)),
    })
}

fn reference_for(disc: &Discretization) -> Result<ReferenceSpace, Failure> {
    let fine = Arc::new(disc.space.mesh().refine());
    let rspace = DofSpace::new(fine, disc.space.degree() + 1).map_err(AnalysisError::from)?;
    Ok(ReferenceSpace::new(&disc.space, Discretization::new(Arc::new(rspace)))?)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SolveSummary {
    modulus: f64,
    alpha_tilde: f64,
    re_zeta: f64,
    im_zeta: f64,
    p: usize,
    level: usize,
    dof: usize,
    n_per_wavelength: f64,
    error: ErrorReport,
    stability: Option<StabilityReport>,
    quasi_opt_ratio: Option<f64>,
}

fn cmd_solve(a: SolveArgs) -> Result<(), Failure> {
    let pt = build_point(&a.point)?;
    let (z, disc) = (pt.z, &pt.disc);
    let sol = ExactSolution::new(z).map_err(AnalysisError::from)?;
    let u = solve_model_problem(disc, &z)?;
    let mut error = error_against_exact(&disc.space, &u, &sol, z.modulus())?;
    let quasi = match quasi_optimality(disc, &sol, &u) {
        Ok(q) => {
            error.best_approx_weighted_error = q.galerkin.best_approx_weighted_error;
            Some(q.ratio)
        }
        Err(AnalysisError::Resolved) => None,
        Err(e) => return Err(e.into()),
    };
    let stability = match discrete_inf_sup(disc, &z) {
        Ok((g, c)) => {
            let eta = if a.point.eta_samples > 0 {
                Some(estimate_eta(
                    disc,
                    &z,
                    a.point.eta_samples,
                    &reference_for(disc)?,
                    a.point.seed,
                )?)
            } else {
                None
            };
            Some(StabilityReport {
                gamma_disc: Some(g),
                continuity_norm: Some(c),
                cb_estimate: estimate_cb(disc, &z)?,
                eta_hat: eta,
                resolution_lhs: eta.map(|e| e * z.resolution_factor()),
            })
        }
        Err(AnalysisError::Linalg(LinalgError::TooLarge { .. })) => None,
        Err(e) => return Err(e.into()),
    };
    let summary = SolveSummary {
        modulus: a.point.modulus,
        alpha_tilde: a.point.alpha_tilde,
        re_zeta: z.zeta().re,
        im_zeta: z.zeta().im,
        p: a.point.p,
        level: a.point.level,
        dof: disc.n_dofs(),
        n_per_wavelength: dof_per_wavelength(disc.n_dofs(), &z, std::f64::consts::PI),
        error,
        stability,
        quasi_opt_ratio: quasi,
    };
    write_output(a.out.as_deref(), &to_json(&summary))
}

fn read_config<T: serde::de::DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, Failure> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))
        }
    }
}

fn cmd_study(a: StudyArgs) -> Result<(), Failure> {
    let cfg: StudyConfig = read_config(a.config.as_deref())?;
    cfg.validate()?;
    let records = run_study(&cfg)?;
    fs::create_dir_all(&a.out_dir)?;
    let mut out = BufWriter::new(File::create(a.out_dir.join("study.csv"))?);
    write_study_csv(&records, &mut out)?;
    out.flush()?;
    let mut timing = BufWriter::new(File::create(a.out_dir.join("study_timing.csv"))?);
    write_timing_csv(&records, &mut timing)?;
    timing.flush()?;
    let failed = records.iter().filter(|r| r.rel_h1_semi.is_none()).count();
    eprintln!("hll: wrote {} rows ({failed} without error norms)", records.len());
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ScanSummary {
    calibration_gamma: f64,
    fitted_c_robust: f64,
    fitted_c_resolved: f64,
    all_coercive_pass: bool,
    rows: usize,
}

fn cmd_infsup_scan(a: ScanArgs) -> Result<(), Failure> {
    let cfg: InfsupConfig = read_config(a.config.as_deref())?;
    let report = run_infsup_scan(&cfg)?;
    let mut out = BufWriter::new(File::create(&a.out)?);
    write_infsup_csv(&report, &mut out)?;
    out.flush()?;
    let summary = ScanSummary {
        calibration_gamma: report.calibration_gamma,
        fitted_c_robust: report.fitted_c_robust,
        fitted_c_resolved: report.fitted_c_resolved,
        all_coercive_pass: report.all_coercive_pass,
        rows: report.rows.len(),
    };
    write_output(None, &to_json(&summary))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SymbolSummary {
    lambda: f64,
    radius: f64,
    c_mu: f64,
    fitted_c_unrestricted: f64,
    fitted_c_high_frequency: f64,
    plain_bound_holds: bool,
    first_bound_holds: bool,
    min_margin: f64,
    rows: usize,
}

fn cmd_symbol_check(a: SymbolArgs) -> Result<(), Failure> {
    let zetas = match (a.re_zeta, a.im_zeta) {
        (_, Some(im)) if im == 0.0 => {
            return Err(Failure::usage(
                "--im-zeta must be nonzero: the symbol bounds need Im ζ ≠ 0",
            ))
        }
        (re, Some(im)) => {
            vec![Wavenumber::from_parts(re.unwrap_or(0.0), im).map_err(|e| Failure::usage(e.to_string()))?]
        }
        (_, None) => lossy_helmholtz::freqsplit::default_zeta_grid(),
    };
    if !(a.s_min > 0.0 && a.s_max > a.s_min && a.s_count >= 2) {
        return Err(Failure::usage("need 0 < s-min < s-max and s-count >= 2"));
    }
    let cut = make_cutoff(a.radius).map_err(|e| Failure::usage(e.to_string()))?;
    let report = verify_symbol_bounds(&zetas, &log_grid(a.s_min, a.s_max, a.s_count), a.lambda, &cut)
        .map_err(|e| Failure::usage(e.to_string()))?;
    let mut out = BufWriter::new(File::create(&a.out)?);
    write_symbol_csv(&report, &mut out)?;
    out.flush()?;
    let summary = SymbolSummary {
        lambda: report.lambda,
        radius: report.radius,
        c_mu: report.c_mu,
        fitted_c_unrestricted: report.fitted_c_unrestricted,
        fitted_c_high_frequency: report.fitted_c_high_frequency,
        plain_bound_holds: report.plain_bound_holds,
        first_bound_holds: report.first_bound_holds,
        min_margin: report.min_margin,
        rows: report.rows.len(),
    };
    write_output(None, &to_json(&summary))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EtaSummary {
    modulus: f64,
    alpha_tilde: f64,
    p: usize,
    level: usize,
    dof: usize,
    reference_dof: usize,
    samples: usize,
    seed: u64,
    eta_hat: f64,
    cb_estimate: f64,
    resolution_lhs: f64,
    /// `1/(4(1 + C_b))`
    resolution_threshold: f64,
}

fn cmd_eta_estimate(a: EtaArgs) -> Result<(), Failure> {
    if a.point.eta_samples == 0 {
        return Err(Failure::usage("--eta-samples must be positive"));
    }
    let pt = build_point(&a.point)?;
    let reference = reference_for(&pt.disc)?;
    let eta = estimate_eta(&pt.disc, &pt.z, a.point.eta_samples, &reference, a.point.seed)?;
    let cb = estimate_cb(&pt.disc, &pt.z)?;
    let summary = EtaSummary {
        modulus: a.point.modulus,
        alpha_tilde: a.point.alpha_tilde,
        p: a.point.p,
        level: a.point.level,
        dof: pt.disc.n_dofs(),
        reference_dof: reference.disc.n_dofs(),
        samples: a.point.eta_samples,
        seed: a.point.seed,
        eta_hat: eta,
        cb_estimate: cb,
        resolution_lhs: eta * pt.z.resolution_factor(),
        resolution_threshold: 0.25 / (1.0 + cb),
    };
    write_output(a.out.as_deref(), &to_json(&summary))
}
