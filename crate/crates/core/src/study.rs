//! The convergence study grid, the inf-sup scan and their CSV outputs.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::io::{self, Write};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{
    error_against_exact, estimate_cb, estimate_eta, quasi_optimality, solve_model_problem, AnalysisError,
    Discretization, InfSupPencil, ReferenceSpace,
};
use crate::diskmesh::{default_geometry_degree, make_disk_mesh, MeshError, MAX_GEOMETRY_DEGREE};
use crate::exactsol::ExactSolution;
use crate::femspace::DofSpace;
use crate::freqsplit::SymbolReport;
use crate::linalg::{csr_to_dense, generalized_singular_range, LinalgError, DENSE_CAP};
use crate::wavenumber::{dof_per_wavelength, Wavenumber, WavenumberError};

pub const MAX_STUDY_DEGREE: usize = 4;
pub const MAX_STUDY_LEVEL: usize = 9;
pub const MAX_RECORDS: usize = 10_000;

#[derive(Debug, Error)]
pub enum StudyError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Wavenumber(#[from] WavenumberError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Flat JSON study configuration; every field has a default, so `{}` is the
/// full grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct StudyConfig {
    pub moduli: Vec<f64>,
    pub alpha_tilde: Vec<f64>,
    pub degrees: Vec<usize>,
    pub levels: Vec<usize>,
    /// fixed geometry degree; `None` uses `min(p, 4)`
    pub geometry_degree: Option<usize>,
    pub beta: f64,
    pub seed: u64,
    pub eta_samples: usize,
    /// reference spaces above this size skip `η̂`
    pub eta_dof_cap: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            moduli: vec![1.0, 10.0, 50.0, 100.0],
            alpha_tilde: vec![0.0, 1.0 / 64.0, 1.0 / 16.0, 0.25, 0.5, 1.0],
            degrees: vec![1, 2, 3, 4],
            levels: (0..=4).collect(),
            geometry_degree: None,
            beta: 1.0,
            seed: 20_240_607,
            eta_samples: 4,
            eta_dof_cap: 80_000,
        }
    }
}

impl StudyConfig {
    pub fn from_json(text: &str) -> Result<Self, StudyError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), StudyError> {
        let bad = |m: String| Err(StudyError::Config(m));
        if self.moduli.is_empty() || self.alpha_tilde.is_empty() || self.degrees.is_empty() || self.levels.is_empty() {
            return bad("grid lists must be non-empty".into());
        }
        if let Some(a) = self.alpha_tilde.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return bad(format!("alphaTilde {a} outside [0, 1]"));
        }
        if let Some(p) = self.degrees.iter().find(|&&p| p == 0 || p > MAX_STUDY_DEGREE) {
            return bad(format!("degree {p} outside 1..={MAX_STUDY_DEGREE}"));
        }
        if let Some(l) = self.levels.iter().find(|&&l| l > MAX_STUDY_LEVEL) {
            return bad(format!("level {l} above {MAX_STUDY_LEVEL}"));
        }
        if let Some(g) = self.geometry_degree.filter(|g| *g == 0 || *g > MAX_GEOMETRY_DEGREE) {
            return bad(format!("geometry degree {g} outside 1..={MAX_GEOMETRY_DEGREE}"));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta {} must be positive", self.beta));
        }
        let n = self.moduli.len() * self.alpha_tilde.len() * self.degrees.len() * self.levels.len();
        if n > MAX_RECORDS {
            return bad(format!("{n} records exceed the limit {MAX_RECORDS}"));
        }
        for &m in &self.moduli {
            for &a in &self.alpha_tilde {
                Wavenumber::from_study_grid(m, a)?;
            }
        }
        Ok(())
    }

    pub fn geometry_degree_for(&self, p: usize) -> usize {
        self.geometry_degree.unwrap_or_else(|| default_geometry_degree(p))
    }
}

/// One row of `study.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StudyRecord {
    pub modulus: f64,
    pub alpha_tilde: f64,
    pub p: usize,
    pub level: usize,
    pub dof: usize,
    pub n_per_wavelength: f64,
    pub rel_h1_semi: Option<f64>,
    pub rel_l2: Option<f64>,
    pub rel_weighted: Option<f64>,
    pub gamma_disc: Option<f64>,
    pub continuity_norm: Option<f64>,
    pub cb_estimate: Option<f64>,
    pub eta_hat: Option<f64>,
    pub quasi_opt_ratio: Option<f64>,
    pub resolution_lhs: Option<f64>,
    pub status: Vec<String>,
    #[serde(skip)]
    pub wall_time_ms: u128,
}

impl StudyRecord {
    fn empty(modulus: f64, alpha_tilde: f64, p: usize, level: usize, dof: usize, z: &Wavenumber) -> Self {
        Self {
            modulus,
            alpha_tilde,
            p,
            level,
            dof,
            n_per_wavelength: dof_per_wavelength(dof, z, PI),
            rel_h1_semi: None,
            rel_l2: None,
            rel_weighted: None,
            gamma_disc: None,
            continuity_norm: None,
            cb_estimate: None,
            eta_hat: None,
            quasi_opt_ratio: None,
            resolution_lhs: None,
            status: Vec::new(),
            wall_time_ms: 0,
        }
    }

    pub fn zeta(&self) -> Wavenumber {
        Wavenumber::from_study_grid(self.modulus, self.alpha_tilde).expect("validated coordinates")
    }

    pub fn status_string(&self) -> String {
        if self.status.is_empty() {
            "ok".into()
        } else {
            self.status.join(";")
        }
    }

    /// `resolutionLhs <= 1/(4(1 + C_b))`
    pub fn is_resolved(&self) -> Option<bool> {
        Some(self.resolution_lhs? <= 0.25 / (1.0 + self.cb_estimate?))
    }

    fn coordinates_cmp(&self, other: &Self) -> Ordering {
        self.modulus
            .total_cmp(&other.modulus)
            .then(self.alpha_tilde.total_cmp(&other.alpha_tilde))
            .then(self.p.cmp(&other.p))
            .then(self.level.cmp(&other.level))
    }
}

/// Column names of `study.csv`, in order.
pub const STUDY_HEADER: [&str; 16] = [
    "modulus",
    "alphaTilde",
    "p",
    "level",
    "dof",
    "nPerWavelength",
    "relH1Semi",
    "relL2",
    "relWeighted",
    "gammaDisc",
    "continuityNorm",
    "cbEstimate",
    "etaHat",
    "quasiOptRatio",
    "resolutionLhs",
    "status",
];

pub const TIMING_HEADER: [&str; 5] = ["modulus", "alphaTilde", "p", "level", "wallTimeMs"];

pub fn fmt_float(v: f64) -> String {
    format!("{v:.12e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

pub fn write_study_csv<W: Write>(records: &[StudyRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{}", STUDY_HEADER.join(","))?;
    for r in records {
        let fields = [
            fmt_float(r.modulus),
            fmt_float(r.alpha_tilde),
            r.p.to_string(),
            r.level.to_string(),
            r.dof.to_string(),
            fmt_float(r.n_per_wavelength),
            fmt_opt(r.rel_h1_semi),
            fmt_opt(r.rel_l2),
            fmt_opt(r.rel_weighted),
            fmt_opt(r.gamma_disc),
            fmt_opt(r.continuity_norm),
            fmt_opt(r.cb_estimate),
            fmt_opt(r.eta_hat),
            fmt_opt(r.quasi_opt_ratio),
            fmt_opt(r.resolution_lhs),
            r.status_string(),
        ];
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn write_timing_csv<W: Write>(records: &[StudyRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{}", TIMING_HEADER.join(","))?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_float(r.modulus),
            fmt_float(r.alpha_tilde),
            r.p,
            r.level,
            r.wall_time_ms
        )?;
    }
    Ok(())
}

/// One `(p, level)` discretization with its optional `η̂` reference space.
pub struct StudyUnit {
    pub p: usize,
    pub level: usize,
    pub disc: Discretization,
    pub reference: Option<ReferenceSpace>,
}

impl StudyUnit {
    pub fn build(cfg: &StudyConfig, p: usize, level: usize) -> Result<Self, StudyError> {
        let mesh = Arc::new(make_disk_mesh(level, cfg.geometry_degree_for(p))?);
        let space = Arc::new(DofSpace::new(Arc::clone(&mesh), p).map_err(AnalysisError::from)?);
        let disc = Discretization::new(Arc::clone(&space));
        let reference = if cfg.eta_samples > 0 && reference_dofs(&mesh, p + 1) <= cfg.eta_dof_cap {
            let fine = Arc::new(mesh.refine());
            let rspace = Arc::new(DofSpace::new(fine, p + 1).map_err(AnalysisError::from)?);
            Some(ReferenceSpace::new(&space, Discretization::new(rspace))?)
        } else {
            None
        };
        Ok(Self {
            p,
            level,
            disc,
            reference,
        })
    }

    /// Dense inf-sup pencil shared by all rows with modulus `rho`.
    pub fn pencil(&self, rho: f64) -> Result<InfSupPencil, AnalysisError> {
        InfSupPencil::new(&self.disc, rho)
    }

    /// All measurements of one study row; `pencil` comes from [`Self::pencil`]
    /// at the same modulus.
    pub fn record(
        &self,
        cfg: &StudyConfig,
        modulus: f64,
        alpha_tilde: f64,
        pencil: &Result<InfSupPencil, AnalysisError>,
    ) -> StudyRecord {
        let start = Instant::now();
        let z = Wavenumber::from_study_grid(modulus, alpha_tilde).expect("validated coordinates");
        let mut rec = StudyRecord::empty(modulus, alpha_tilde, self.p, self.level, self.disc.n_dofs(), &z);
        if let Err(e) = self.fill(cfg, &z, pencil, &mut rec) {
            rec.status.push(status_of(&e).into());
        }
        rec.wall_time_ms = start.elapsed().as_millis();
        rec
    }

    fn fill(
        &self,
        cfg: &StudyConfig,
        z: &Wavenumber,
        pencil: &Result<InfSupPencil, AnalysisError>,
        rec: &mut StudyRecord,
    ) -> Result<(), AnalysisError> {
        let sol = ExactSolution::new(*z)?;
        let u = solve_model_problem(&self.disc, z)?;
        let err = error_against_exact(&self.disc.space, &u, &sol, z.modulus())?;
        rec.rel_h1_semi = Some(err.rel_h1_semi);
        rec.rel_l2 = Some(err.rel_l2);
        rec.rel_weighted = Some(err.rel_weighted);
        match pencil {
            Ok(pencil) => {
                let (g, c) = pencil.range(z.zeta())?;
                rec.gamma_disc = Some(g);
                rec.continuity_norm = Some(c);
            }
            Err(AnalysisError::Linalg(LinalgError::TooLarge { .. })) => rec.status.push("skipped-infsup".into()),
            Err(e) => return Err(e.clone()),
        }
        let cb = estimate_cb(&self.disc, z)?;
        rec.cb_estimate = Some(cb);
        match &self.reference {
            Some(r) => {
                let eta = estimate_eta(&self.disc, z, cfg.eta_samples, r, cfg.seed)?;
                rec.eta_hat = Some(eta);
                rec.resolution_lhs = Some(z.resolution_factor() * eta);
            }
            None => rec.status.push("skipped-eta".into()),
        }
        match quasi_optimality(&self.disc, &sol, &u) {
            Ok(q) => rec.quasi_opt_ratio = Some(q.ratio),
            Err(AnalysisError::Resolved) => rec.status.push("resolved".into()),
            Err(e) => return Err(e),
        }
        Ok(())
    }
}

/// Dof count of the degree-`q` space on one refinement of `mesh`, without building it.
pub fn reference_dofs(mesh: &crate::diskmesh::Mesh, q: usize) -> usize {
    let nv = mesh.n_vertices() + mesh.n_edges();
    let ne = 2 * mesh.n_edges() + 3 * mesh.n_triangles();
    let nt = 4 * mesh.n_triangles();
    nv + ne * (q - 1) + nt * (q - 1) * q.saturating_sub(2) / 2
}

fn status_of(e: &AnalysisError) -> &'static str {
    match e {
        AnalysisError::Linalg(LinalgError::SingularMatrix(_)) => "singular",
        AnalysisError::ExactSolution(_) => "exact-solution-error",
        _ => "failed",
    }
}

/// Run the grid; rows come back sorted by `(modulus, alphaTilde, p, level)`
/// whatever the execution order.
pub fn run_study(cfg: &StudyConfig) -> Result<Vec<StudyRecord>, StudyError> {
    cfg.validate()?;
    let mut units: Vec<(usize, usize)> = Vec::new();
    for &p in &cfg.degrees {
        for &l in &cfg.levels {
            units.push((p, l));
        }
    }
    units.sort_unstable();
    units.dedup();
    // largest units first keeps the pool busy
    units.sort_by_key(|&(p, l)| std::cmp::Reverse((l, p)));
    let per_unit: Vec<Vec<StudyRecord>> = units
        .par_iter()
        .map(|&(p, l)| -> Result<Vec<StudyRecord>, StudyError> {
            let unit = StudyUnit::build(cfg, p, l)?;
            let mut rows = Vec::new();
            for &m in &cfg.moduli {
                let pencil = unit.pencil(m);
                for &a in &cfg.alpha_tilde {
                    rows.push(unit.record(cfg, m, a, &pencil));
                }
            }
            Ok(rows)
        })
        .collect::<Result<_, _>>()?;
    let mut records: Vec<StudyRecord> = per_unit.into_iter().flatten().collect();
    records.sort_by(StudyRecord::coordinates_cmp);
    records.dedup_by(|a, b| a.coordinates_cmp(b) == Ordering::Equal);
    Ok(records)
}

/// Inf-sup scan configuration; defaults cover the study grid on spaces
/// below the dense cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct InfsupConfig {
    pub moduli: Vec<f64>,
    pub alpha_tilde: Vec<f64>,
    pub degrees: Vec<usize>,
    pub levels: Vec<usize>,
}

impl Default for InfsupConfig {
    fn default() -> Self {
        let s = StudyConfig::default();
        Self {
            moduli: s.moduli,
            alpha_tilde: s.alpha_tilde,
            degrees: vec![1, 2, 3],
            levels: vec![0, 1, 2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InfsupRow {
    pub modulus: f64,
    pub alpha_tilde: f64,
    pub re_zeta: f64,
    pub im_zeta: f64,
    pub p: usize,
    pub level: usize,
    pub dof: usize,
    pub gamma_disc: Option<f64>,
    pub continuity_norm: Option<f64>,
    /// `Re ζ / |ζ|`
    pub coercive_bound: f64,
    /// `(1 + Re ζ) / |ζ|`
    pub resolved_shape: f64,
    pub coercive_pass: Option<bool>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InfsupReport {
    /// `γ_disc` of the pencil `(B, B)`; must be 1
    pub calibration_gamma: f64,
    /// smallest `c` with `γ_disc >= 1/(1 + c|Im ζ|/(1 + Re ζ))` on all rows
    pub fitted_c_robust: f64,
    /// largest `c` with `γ_disc >= c(1 + Re ζ)/|ζ|` on all rows
    pub fitted_c_resolved: f64,
    pub all_coercive_pass: bool,
    pub rows: Vec<InfsupRow>,
}

pub const INFSUP_TOLERANCE: f64 = 1e-10;

pub fn run_infsup_scan(cfg: &InfsupConfig) -> Result<InfsupReport, StudyError> {
    let study = StudyConfig {
        moduli: cfg.moduli.clone(),
        alpha_tilde: cfg.alpha_tilde.clone(),
        degrees: cfg.degrees.clone(),
        levels: cfg.levels.clone(),
        ..StudyConfig::default()
    };
    study.validate()?;
    let mut units: Vec<(usize, usize)> = cfg
        .degrees
        .iter()
        .flat_map(|&p| cfg.levels.iter().map(move |&l| (p, l)))
        .collect();
    units.sort_unstable();
    units.dedup();
    let per_unit: Vec<(Vec<InfsupRow>, Option<f64>)> = units
        .par_iter()
        .map(|&(p, l)| -> Result<_, StudyError> {
            let mesh = Arc::new(make_disk_mesh(l, study.geometry_degree_for(p))?);
            let space = Arc::new(DofSpace::new(mesh, p).map_err(AnalysisError::from)?);
            let disc = Discretization::new(space);
            let calibration = (disc.n_dofs() <= DENSE_CAP)
                .then(|| {
                    let b = csr_to_dense(&disc.matrices.gram(1.0).b.to_complex());
                    generalized_singular_range(&b, &b, false).map(|s| s.sigma_min)
                })
                .transpose()
                .map_err(AnalysisError::from)?;
            let mut rows = Vec::new();
            for &m in &cfg.moduli {
                let pencil = InfSupPencil::new(&disc, m);
                for &a in &cfg.alpha_tilde {
                    let z = Wavenumber::from_study_grid(m, a)?;
                    let mut row = InfsupRow {
                        modulus: m,
                        alpha_tilde: a,
                        re_zeta: z.zeta().re,
                        im_zeta: z.zeta().im,
                        p,
                        level: l,
                        dof: disc.n_dofs(),
                        gamma_disc: None,
                        continuity_norm: None,
                        coercive_bound: z.coercive_inf_sup_bound(),
                        resolved_shape: z.resolved_inf_sup_shape(1.0),
                        coercive_pass: None,
                        status: "ok".into(),
                    };
                    match pencil.as_ref().map_err(Clone::clone).and_then(|p| p.range(z.zeta())) {
                        Ok((g, c)) => {
                            row.gamma_disc = Some(g);
                            row.continuity_norm = Some(c);
                            if z.nu() > 0.0 {
                                row.coercive_pass = Some(g >= row.coercive_bound - INFSUP_TOLERANCE);
                            }
                        }
                        Err(AnalysisError::Linalg(LinalgError::TooLarge { .. })) => {
                            row.status = "skipped-infsup".into()
                        }
                        Err(e) => row.status = status_of(&e).into(),
                    }
                    rows.push(row);
                }
            }
            Ok((rows, calibration))
        })
        .collect::<Result<_, _>>()?;
    let mut calibration_gamma = f64::NAN;
    let mut rows = Vec::new();
    for (r, c) in per_unit {
        if let (Some(c), true) = (c, calibration_gamma.is_nan()) {
            calibration_gamma = c;
        }
        rows.extend(r);
    }
    rows.sort_by(|a, b| {
        a.modulus
            .total_cmp(&b.modulus)
            .then(a.alpha_tilde.total_cmp(&b.alpha_tilde))
            .then(a.p.cmp(&b.p))
            .then(a.level.cmp(&b.level))
    });
    let mut fitted_c_robust: f64 = 0.0;
    let mut fitted_c_resolved = f64::INFINITY;
    for r in &rows {
        let Some(g) = r.gamma_disc else { continue };
        if r.im_zeta != 0.0 {
            fitted_c_robust = fitted_c_robust.max((1.0 / g - 1.0) * (1.0 + r.re_zeta) / r.im_zeta.abs());
        }
        fitted_c_resolved = fitted_c_resolved.min(g / r.resolved_shape);
    }
    Ok(InfsupReport {
        calibration_gamma,
        fitted_c_robust,
        fitted_c_resolved,
        all_coercive_pass: rows.iter().all(|r| r.coercive_pass != Some(false)),
        rows,
    })
}

pub const INFSUP_HEADER: [&str; 14] = [
    "modulus",
    "alphaTilde",
    "reZeta",
    "imZeta",
    "p",
    "level",
    "dof",
    "gammaDisc",
    "continuityNorm",
    "coerciveBound",
    "robustBound",
    "resolvedBound",
    "coercivePass",
    "status",
];

/// Rows of `infsup.csv`; the robust and resolved bounds use the fitted constants.
pub fn write_infsup_csv<W: Write>(report: &InfsupReport, mut out: W) -> io::Result<()> {
    writeln!(out, "{}", INFSUP_HEADER.join(","))?;
    for r in &report.rows {
        let z = Wavenumber::from_parts(r.re_zeta, r.im_zeta).expect("scan frequencies are admissible");
        let pass = match r.coercive_pass {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "",
        };
        let fields = [
            fmt_float(r.modulus),
            fmt_float(r.alpha_tilde),
            fmt_float(r.re_zeta),
            fmt_float(r.im_zeta),
            r.p.to_string(),
            r.level.to_string(),
            r.dof.to_string(),
            fmt_opt(r.gamma_disc),
            fmt_opt(r.continuity_norm),
            fmt_float(r.coercive_bound),
            fmt_float(z.robust_inf_sup_bound(report.fitted_c_robust)),
            fmt_float(z.resolved_inf_sup_shape(report.fitted_c_resolved)),
            pass.to_string(),
            r.status.clone(),
        ];
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

pub const SYMBOL_HEADER: [&str; 8] = [
    "reZeta", "imZeta", "s", "absSigma", "bound0", "bound1", "bound2", "margin",
];

pub fn write_symbol_csv<W: Write>(report: &SymbolReport, mut out: W) -> io::Result<()> {
    writeln!(out, "{}", SYMBOL_HEADER.join(","))?;
    for r in &report.rows {
        let fields = [
            r.re_zeta,
            r.im_zeta,
            r.s,
            r.abs_sigma,
            r.bound0,
            r.bound1,
            r.bound2,
            r.margin,
        ]
        .map(fmt_float);
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_full_grid() {
        let cfg = StudyConfig::from_json("{}").unwrap();
        assert_eq!(cfg, StudyConfig::default());
        assert_eq!(cfg.moduli.len() * cfg.alpha_tilde.len() * cfg.degrees.len(), 96);
    }

    #[test]
    fn config_rejects_bad_values() {
        for text in [
            r#"{"moduli":[0.5]}"#,
            r#"{"alphaTilde":[1.5]}"#,
            r#"{"degrees":[5]}"#,
            r#"{"levels":[12]}"#,
            r#"{"beta":-1}"#,
            r#"{"unknown":1}"#,
            r#"{"moduli":[]}"#,
        ] {
            assert!(StudyConfig::from_json(text).is_err(), "{text}");
        }
    }

    #[test]
    fn reference_dof_count_matches_built_space() {
        for (level, q) in [(0, 2), (1, 3), (2, 5)] {
            let mesh = make_disk_mesh(level, 2).unwrap();
            let space = DofSpace::new(Arc::new(mesh.refine()), q).unwrap();
            assert_eq!(reference_dofs(&mesh, q), space.n_dofs());
        }
    }

    #[test]
    fn small_study_has_sorted_complete_rows() {
        let cfg = StudyConfig {
            moduli: vec![10.0, 1.0],
            alpha_tilde: vec![1.0, 0.0],
            degrees: vec![2, 1],
            levels: vec![1, 0],
            eta_samples: 2,
            ..StudyConfig::default()
        };
        let rows = run_study(&cfg).unwrap();
        assert_eq!(rows.len(), 16);
        assert!(rows.windows(2).all(|w| w[0].coordinates_cmp(&w[1]) == Ordering::Less));
        for r in &rows {
            assert_eq!(r.status_string(), "ok", "{r:?}");
            assert!(r.quasi_opt_ratio.unwrap() >= 1.0 - 1e-12);
        }
        let mut buf = Vec::new();
        write_study_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().all(|l| l.split(',').count() == 16));
    }
}
