//! Config-driven scenario runner.
//!
//! A scenario is a flat `section.key = value` text file describing a
//! density model, Cauchy data, the grids, a solver set, and a diagnostic
//! set. Running it emits a deterministic artifact bundle: `manifest.json`
//! (config echo, calibrated C0, versions), per-solver snapshot CSVs,
//! an energy CSV, diagnostic JSON reports, and SVG plots. Every floating
//! value is written with 17 significant digits so doubles round-trip
//! bit-faithfully through the text artifacts.

use crate::analysis::{
    equipartition_profile, huygens_profile, light_cone_leakage, paley_wiener_report, pw_radius,
};
use crate::density::{model_from_catalog, validate_conditions, DensityModel};
use crate::error::{Error, Result};
use crate::funcs::{bump, plateau_profile, Grid, RadialFunction, SpectralFunction};
use crate::plot::{write_svg, PlotSpec, Series};
use crate::transforms::{
    calibrate_c0, forward_radial_fourier_auto, inverse_radial_fourier, l2_norm_physical,
};
use crate::wave::{
    energy, propagate_dalembert, propagate_fdtd, propagate_series, propagate_spectral, CauchyData,
    WaveState,
};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Spectral,
    Series,
    Dalembert,
    Fdtd,
}

impl Solver {
    fn name(self) -> &'static str {
        match self {
            Solver::Spectral => "spectral",
            Solver::Series => "series",
            Solver::Dalembert => "dalembert",
            Solver::Fdtd => "fdtd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diagnostic {
    Conditions,
    Huygens,
    Equipartition,
    LightCone,
    EnergyDrift,
    PaleyWiener,
    PwRadius,
    EnergyBound,
}

impl Diagnostic {
    fn name(self) -> &'static str {
        match self {
            Diagnostic::Conditions => "conditions",
            Diagnostic::Huygens => "huygens",
            Diagnostic::Equipartition => "equipartition",
            Diagnostic::LightCone => "light_cone",
            Diagnostic::EnergyDrift => "energy_drift",
            Diagnostic::PaleyWiener => "paley_wiener",
            Diagnostic::PwRadius => "pw_radius",
            Diagnostic::EnergyBound => "energy_bound",
        }
    }
}

/// Which of f and g carries the bump profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assign {
    F,
    G,
    Fg,
}

#[derive(Debug, Clone)]
pub enum DataSpec {
    /// Compactly supported mollifier data of the given radius.
    Bump { radius: f64, amplitude: f64, assign: Assign },
    /// f with spectrum = tapered indicator of [0, lambda_cut] whose taper
    /// starts at taper * lambda_cut; g is a truncated Gaussian of the
    /// given amplitude (0 for g = 0).
    BandLimited { lambda_cut: f64, dl: f64, taper: f64, g_amplitude: f64 },
}

/// A parsed and validated scenario; construction performs the full schema
/// and guard validation, so an invalid config never produces any output.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub echo: BTreeMap<String, String>,
    pub model: DensityModel,
    pub data: DataSpec,
    pub r_max: f64,
    pub dr: f64,
    pub times: Vec<f64>,
    pub solvers: Vec<Solver>,
    pub fdtd_dr: f64,
    pub fdtd_dt: f64,
    pub series_r_dom: f64,
    pub series_k: usize,
    pub dalembert_points: Vec<f64>,
    pub diagnostics: Vec<Diagnostic>,
    pub huygens_d: f64,
    pub diag_t_step: f64,
    pub diag_t_count: usize,
    pub pw_n: Vec<u32>,
    pub pw_tau: Vec<f64>,
    pub pw_lambda_max: f64,
    pub pw_j_max: u32,
    pub out_dir: PathBuf,
}

const KNOWN_KEYS: &[&str] = &[
    "model.name",
    "model.catalog",
    "model.alpha",
    "model.beta",
    "model.scale",
    "data.kind",
    "data.radius",
    "data.amplitude",
    "data.assign",
    "data.lambda_cut",
    "data.dl",
    "data.taper",
    "data.g_amplitude",
    "grid.r_max",
    "grid.dr",
    "time.values",
    "solver.set",
    "solver.fdtd_dr",
    "solver.fdtd_dt",
    "solver.series_r_dom",
    "solver.series_k",
    "solver.dalembert_points",
    "diag.set",
    "diag.huygens_d",
    "diag.t_step",
    "diag.t_count",
    "diag.pw_n",
    "diag.pw_tau",
    "diag.pw_lambda_max",
    "diag.pw_j_max",
    "output.dir",
];

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut kv = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| cfg_err(format!("line {}: expected key = value", lineno + 1)))?;
        let k = k.trim().to_string();
        if !KNOWN_KEYS.contains(&k.as_str()) {
            return Err(cfg_err(format!("line {}: unknown key `{k}`", lineno + 1)));
        }
        if kv.insert(k.clone(), v.trim().to_string()).is_some() {
            return Err(cfg_err(format!("line {}: duplicate key `{k}`", lineno + 1)));
        }
    }
    Ok(kv)
}

fn get_f64(kv: &BTreeMap<String, String>, key: &str, default: f64) -> Result<f64> {
    match kv.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|e| cfg_err(format!("key `{key}`: {e}"))),
    }
}

fn get_usize(kv: &BTreeMap<String, String>, key: &str, default: usize) -> Result<usize> {
    match kv.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|e| cfg_err(format!("key `{key}`: {e}"))),
    }
}

fn get_list_f64(kv: &BTreeMap<String, String>, key: &str, default: &[f64]) -> Result<Vec<f64>> {
    match kv.get(key) {
        None => Ok(default.to_vec()),
        Some(v) => v
            .split(',')
            .map(|s| s.trim().parse().map_err(|e| cfg_err(format!("key `{key}`: {e}"))))
            .collect(),
    }
}

fn resolve_model(kv: &BTreeMap<String, String>, base_dir: &Path) -> Result<DensityModel> {
    if let Some(name) = kv.get("model.name") {
        if kv.contains_key("model.catalog") || kv.contains_key("model.alpha") {
            return Err(cfg_err("give exactly one of model.name, model.catalog, model.alpha/beta/scale"));
        }
        return match name.as_str() {
            "h3" => Ok(crate::density::h3()),
            "h4" => Ok(crate::density::h4()),
            "damek_ricci" => Ok(crate::density::damek_ricci_like()),
            other => Err(cfg_err(format!("unknown model name `{other}`"))),
        };
    }
    if let Some(path) = kv.get("model.catalog") {
        if kv.contains_key("model.alpha") {
            return Err(cfg_err("give exactly one of model.catalog, model.alpha/beta/scale"));
        }
        let full = base_dir.join(path);
        let text = std::fs::read_to_string(&full)
            .map_err(|e| cfg_err(format!("model catalog {}: {e}", full.display())))?;
        let catalog_dir = full.parent().unwrap_or(base_dir);
        return model_from_catalog(&text, catalog_dir);
    }
    crate::density::make_jacobi_model(
        get_f64(kv, "model.alpha", f64::NAN)?,
        get_f64(kv, "model.beta", f64::NAN)?,
        get_f64(kv, "model.scale", 1.0)?,
    )
}

/// Parse a scenario text (all keys validated against the schema, every
/// grid guard checked) relative to `base_dir` for catalog paths.
pub fn parse_scenario(text: &str, base_dir: &Path) -> Result<Scenario> {
    let kv = parse_kv(text)?;
    let model = resolve_model(&kv, base_dir)?;

    let data = match kv.get("data.kind").map(|s| s.as_str()).unwrap_or("bump") {
        "bump" => {
            let assign = match kv.get("data.assign").map(|s| s.as_str()).unwrap_or("f") {
                "f" => Assign::F,
                "g" => Assign::G,
                "fg" => Assign::Fg,
                other => return Err(cfg_err(format!("data.assign must be f, g or fg, got `{other}`"))),
            };
            DataSpec::Bump {
                radius: get_f64(&kv, "data.radius", 0.5)?,
                amplitude: get_f64(&kv, "data.amplitude", 1.0)?,
                assign,
            }
        }
        "band_limited" => {
            let taper = get_f64(&kv, "data.taper", 0.995)?;
            if !(taper > 0.0 && taper < 1.0) {
                return Err(cfg_err("data.taper must lie in (0, 1)"));
            }
            DataSpec::BandLimited {
                lambda_cut: get_f64(&kv, "data.lambda_cut", 2.0)?,
                dl: get_f64(&kv, "data.dl", 5e-4)?,
                taper,
                g_amplitude: get_f64(&kv, "data.g_amplitude", 0.0)?,
            }
        }
        other => return Err(cfg_err(format!("data.kind must be bump or band_limited, got `{other}`"))),
    };

    let times = get_list_f64(&kv, "time.values", &[0.0])?;
    if times.is_empty() || times.iter().any(|t| !t.is_finite()) {
        return Err(cfg_err("time.values must be a non-empty list of finite reals"));
    }
    let t_abs_max = times.iter().fold(0.0f64, |a, &t| a.max(t.abs()));

    let dr = get_f64(&kv, "grid.dr", 2e-4)?;
    if !(dr > 0.0) {
        return Err(cfg_err("grid.dr must be positive"));
    }
    let data_radius = match &data {
        DataSpec::Bump { radius, .. } => {
            if !(*radius > 0.0) {
                return Err(cfg_err("data.radius must be positive"));
            }
            *radius
        }
        DataSpec::BandLimited { lambda_cut, dl, .. } => {
            if !(*lambda_cut > 0.0 && *dl > 0.0) {
                return Err(cfg_err("data.lambda_cut and data.dl must be positive"));
            }
            1.0
        }
    };
    let r_max = get_f64(&kv, "grid.r_max", data_radius + t_abs_max + 1.0)?;
    if r_max < data_radius + t_abs_max + 1.0 - 1e-12 {
        return Err(cfg_err(format!(
            "grid.r_max = {r_max} violates r_max >= R0 + max|t| + 1 = {}",
            data_radius + t_abs_max + 1.0
        )));
    }

    let mut solvers = Vec::new();
    if let Some(list) = kv.get("solver.set") {
        for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            solvers.push(match name {
                "spectral" => Solver::Spectral,
                "series" => Solver::Series,
                "dalembert" => Solver::Dalembert,
                "fdtd" => Solver::Fdtd,
                other => return Err(cfg_err(format!("unknown solver `{other}`"))),
            });
        }
    } else {
        solvers.push(Solver::Spectral);
    }
    let fdtd_dr = get_f64(&kv, "solver.fdtd_dr", 1e-3)?;
    let fdtd_dt = get_f64(&kv, "solver.fdtd_dt", 0.5 * fdtd_dr)?;
    if solvers.contains(&Solver::Fdtd) && fdtd_dt > 0.9 * fdtd_dr {
        return Err(Error::Cfl(format!(
            "fdtd_dt = {fdtd_dt} exceeds 0.9 * fdtd_dr = {}",
            0.9 * fdtd_dr
        )));
    }
    let series_r_dom = get_f64(&kv, "solver.series_r_dom", r_max)?;
    let series_k = get_usize(&kv, "solver.series_k", 40)?;
    let dalembert_points = get_list_f64(&kv, "solver.dalembert_points", &[1.0])?;

    let mut diagnostics = Vec::new();
    if let Some(list) = kv.get("diag.set") {
        for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            diagnostics.push(match name {
                "conditions" => Diagnostic::Conditions,
                "huygens" => Diagnostic::Huygens,
                "equipartition" => Diagnostic::Equipartition,
                "light_cone" => Diagnostic::LightCone,
                "energy_drift" => Diagnostic::EnergyDrift,
                "paley_wiener" => Diagnostic::PaleyWiener,
                "pw_radius" => Diagnostic::PwRadius,
                "energy_bound" => Diagnostic::EnergyBound,
                other => return Err(cfg_err(format!("unknown diagnostic `{other}`"))),
            });
        }
    }
    let band_limited = matches!(data, DataSpec::BandLimited { .. });
    for d in &diagnostics {
        let needs_band = matches!(d, Diagnostic::PwRadius | Diagnostic::EnergyBound);
        let needs_bump = matches!(
            d,
            Diagnostic::Huygens | Diagnostic::Equipartition | Diagnostic::PaleyWiener
        );
        if needs_band && !band_limited {
            return Err(cfg_err(format!("diagnostic `{}` needs data.kind = band_limited", d.name())));
        }
        if needs_bump && band_limited {
            return Err(cfg_err(format!("diagnostic `{}` needs data.kind = bump", d.name())));
        }
    }

    let pw_n_raw = get_list_f64(&kv, "diag.pw_n", &[0.0, 3.0, 6.0])?;
    let pw_n = pw_n_raw
        .iter()
        .map(|&x| {
            if x >= 0.0 && x.fract() == 0.0 {
                Ok(x as u32)
            } else {
                Err(cfg_err("diag.pw_n must be non-negative integers"))
            }
        })
        .collect::<Result<Vec<u32>>>()?;

    Ok(Scenario {
        echo: kv.clone(),
        model,
        data,
        r_max,
        dr,
        times,
        solvers,
        fdtd_dr,
        fdtd_dt,
        series_r_dom,
        series_k,
        dalembert_points,
        diagnostics,
        huygens_d: get_f64(&kv, "diag.huygens_d", 2.0)?,
        diag_t_step: get_f64(&kv, "diag.t_step", 0.1)?,
        diag_t_count: get_usize(&kv, "diag.t_count", 60)?,
        pw_n,
        pw_tau: get_list_f64(&kv, "diag.pw_tau", &[0.0, 0.5])?,
        pw_lambda_max: get_f64(&kv, "diag.pw_lambda_max", 160.0)?,
        pw_j_max: get_usize(&kv, "diag.pw_j_max", 40)? as u32,
        out_dir: PathBuf::from(kv.get("output.dir").cloned().unwrap_or_else(|| "out".into())),
    })
}

/// Read and parse a scenario file; catalog paths resolve relative to the
/// config file's directory.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_scenario(&text, base)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    /// Solvers, spectra, energies and diagnostics.
    Full,
    /// Forward spectra and the manifest only.
    SpectrumOnly,
    /// Diagnostics and the manifest only.
    CheckOnly,
}

/// Summary of a finished run.
#[derive(Debug)]
pub struct Bundle {
    pub out_dir: PathBuf,
    pub diagnostics_pass: bool,
    pub failed: Vec<String>,
    pub warnings: Vec<String>,
}

fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn wave_state_csv(path: &Path, st: &WaveState) -> Result<()> {
    let mut out = String::from("r,re_u,im_u,re_ut,im_ut\n");
    for i in 0..st.u.grid.n {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            f17(st.u.grid.x(i)),
            f17(st.u.values[i].re),
            f17(st.u.values[i].im),
            f17(st.ut.values[i].re),
            f17(st.ut.values[i].im)
        );
    }
    write_text(path, &out)
}

/// Materialize the Cauchy data (and, for band-limited data, the exact
/// spectrum it was cut from).
fn build_data(sc: &Scenario) -> Result<(CauchyData, Option<SpectralFunction>)> {
    match &sc.data {
        DataSpec::Bump { radius, amplitude, assign } => {
            let grid = Grid::span(radius + 0.25, sc.dr);
            let profile = bump(grid, *radius, *amplitude);
            let (f, g) = match assign {
                Assign::F => (profile, RadialFunction::zeros(grid)),
                Assign::G => (RadialFunction::zeros(grid), profile),
                Assign::Fg => (profile.clone(), profile),
            };
            Ok((CauchyData::new(f, g), None))
        }
        DataSpec::BandLimited { lambda_cut, dl, taper, g_amplitude } => {
            let lam_grid = Grid::span(1.1 * lambda_cut, *dl);
            let edge = plateau_profile(taper * lambda_cut, *lambda_cut);
            let values: Vec<Complex64> = lam_grid
                .nodes()
                .iter()
                .map(|&lam| Complex64::new(edge(lam), 0.0))
                .collect();
            let weight = crate::eigen::plancherel_density(&sc.model, &lam_grid.nodes())?;
            let fs = SpectralFunction { grid: lam_grid, values, weight };
            let r_grid = Grid::span(sc.r_max, sc.dr.max(2e-3));
            let f = inverse_radial_fourier(&sc.model, &fs, r_grid)?;
            let amp = *g_amplitude;
            let g = RadialFunction::from_fn(r_grid, if amp == 0.0 { 0.0 } else { 1.45 }, |r| {
                Complex64::new(amp * (-16.0 * r * r).exp(), 0.0)
            });
            Ok((CauchyData::new(f, g), Some(fs)))
        }
    }
}

fn manifest_json(sc: &Scenario, c0: f64) -> String {
    let mut root = serde_json::Map::new();
    let mut scenario = serde_json::Map::new();
    for (k, v) in &sc.echo {
        scenario.insert(k.clone(), serde_json::Value::String(v.clone()));
    }
    let mut versions = serde_json::Map::new();
    versions.insert(
        "radialwave".into(),
        serde_json::Value::String(env!("CARGO_PKG_VERSION").into()),
    );
    root.insert("c0".into(), serde_json::Value::String(f17(c0)));
    root.insert("rho".into(), serde_json::Value::String(f17(sc.model.rho)));
    root.insert("scenario".into(), serde_json::Value::Object(scenario));
    root.insert("versions".into(), serde_json::Value::Object(versions));
    serde_json::to_string_pretty(&serde_json::Value::Object(root)).unwrap()
}

struct DiagOutcome {
    name: String,
    pass: bool,
}

/// Run a scenario end to end. Fallible numerical guards surface as errors
/// (CLI exit 1); diagnostic failures are recorded in the bundle (exit 2).
pub fn run_scenario(sc: &Scenario, mode: RunMode, verbose: bool) -> Result<Bundle> {
    let out = &sc.out_dir;
    std::fs::create_dir_all(out).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", out.display()))))?;
    let say = |msg: &str| {
        if verbose {
            eprintln!("[radialwave] {msg}");
        }
    };

    say("building Cauchy data");
    let (data, exact_fs) = build_data(sc)?;
    say("forward transforms");
    let fs = match &exact_fs {
        Some(fs) => fs.clone(),
        None => forward_radial_fourier_auto(&sc.model, &data.f, 1e-11)?,
    };
    let gs = forward_radial_fourier_auto(&sc.model, &data.g, 1e-11)?;
    let c0 = calibrate_c0(&sc.model)?;
    write_text(&out.join("manifest.json"), &manifest_json(sc, c0))?;

    let mut warnings = Vec::new();

    if mode != RunMode::CheckOnly {
        say("writing spectra");
        write_spectrum_csv(&out.join("spectrum_f.csv"), &fs)?;
        write_spectrum_csv(&out.join("spectrum_g.csv"), &gs)?;
        let spec = PlotSpec {
            title: "radial Fourier transforms".into(),
            x_label: "lambda".into(),
            y_label: "|f_hat|".into(),
            log_y: true,
            ..Default::default()
        };
        let mk = |label: &str, s: &SpectralFunction| Series {
            label: label.into(),
            xs: s.grid.nodes(),
            ys: s.values.iter().map(|v| v.norm()).collect(),
        };
        if !write_svg(&out.join("spectrum.svg"), &spec, &[mk("|f_hat|", &fs), mk("|g_hat|", &gs)])? {
            warnings.push("spectrum plot empty; no SVG written".into());
        }
    }

    let mut spectral_states: Vec<WaveState> = Vec::new();
    let mut grid_runs: Vec<(&'static str, Vec<WaveState>)> = Vec::new();

    if mode == RunMode::Full {
        for solver in &sc.solvers {
            say(&format!("solver: {}", solver.name()));
            match solver {
                Solver::Dalembert => {
                    let mut csv = String::from("t,d,re_u,im_u\n");
                    for &t in &sc.times {
                        for &d in &sc.dalembert_points {
                            let u = propagate_dalembert(&sc.model, &data, d, t)?;
                            let _ =
                                writeln!(csv, "{},{},{},{}", f17(t), f17(d), f17(u.re), f17(u.im));
                        }
                    }
                    write_text(&out.join("dalembert.csv"), &csv)?;
                }
                grid_solver => {
                    let mut states = Vec::with_capacity(sc.times.len());
                    for &t in &sc.times {
                        states.push(match grid_solver {
                            Solver::Spectral => propagate_spectral(&sc.model, &data, t)?,
                            Solver::Series => propagate_series(
                                &sc.model,
                                &data,
                                sc.series_r_dom,
                                sc.series_k,
                                t,
                            )?,
                            Solver::Fdtd => {
                                propagate_fdtd(&sc.model, &data, t, sc.fdtd_dr, sc.fdtd_dt)?
                            }
                            Solver::Dalembert => unreachable!(),
                        });
                    }
                    emit_trajectory(out, grid_solver.name(), &sc.times, &states, &mut warnings)?;
                    if *grid_solver == Solver::Spectral {
                        spectral_states = states.clone();
                    }
                    grid_runs.push((grid_solver.name(), states));
                }
            }
        }

        if sc.solvers.contains(&Solver::Spectral) {
            say("energy ledger");
            let mut csv = String::from("t,K,P,E\n");
            let mut rows: Vec<(f64, f64, f64)> = Vec::new();
            for st in &spectral_states {
                let (k, p, e) = energy(&sc.model, st, Some((&fs, &gs)))?;
                let _ = writeln!(csv, "{},{},{},{}", f17(st.t), f17(k), f17(p), f17(e));
                rows.push((k, p, e));
            }
            write_text(&out.join("energy.csv"), &csv)?;
            let mk = |label: &str, pick: fn(&(f64, f64, f64)) -> f64| Series {
                label: label.into(),
                xs: sc.times.clone(),
                ys: rows.iter().map(pick).collect(),
            };
            let spec = PlotSpec {
                title: "energy split".into(),
                x_label: "t".into(),
                y_label: "energy".into(),
                ..Default::default()
            };
            let series =
                [mk("K", |r| r.0), mk("P", |r| r.1), mk("E", |r| r.2)];
            if !write_svg(&out.join("energy.svg"), &spec, &series)? {
                warnings.push("energy trajectory empty; no SVG written".into());
            }
        }

        emit_solver_agreement(sc, out, &grid_runs)?;
    }

    let mut outcomes: Vec<DiagOutcome> = Vec::new();
    if mode != RunMode::SpectrumOnly {
        if !sc.diagnostics.is_empty() && spectral_states.is_empty() {
            // check mode (or a run without the spectral solver): the
            // state-based diagnostics still need spectral snapshots
            if sc
                .diagnostics
                .iter()
                .any(|d| matches!(d, Diagnostic::LightCone | Diagnostic::EnergyDrift))
            {
                say("spectral snapshots for diagnostics");
                for &t in &sc.times {
                    spectral_states.push(propagate_spectral(&sc.model, &data, t)?);
                }
            }
        }
        for diag in &sc.diagnostics {
            say(&format!("diagnostic: {}", diag.name()));
            let pass = run_diagnostic(sc, *diag, &data, &fs, &gs, &spectral_states, out, &mut warnings)?;
            outcomes.push(DiagOutcome { name: diag.name().into(), pass });
        }
    }

    let failed: Vec<String> = outcomes.iter().filter(|o| !o.pass).map(|o| o.name.clone()).collect();
    let summary: Vec<serde_json::Value> = outcomes
        .iter()
        .map(|o| {
            serde_json::json!({
                "name": o.name,
                "pass": o.pass,
            })
        })
        .collect();
    write_text(
        &out.join("diagnostics_summary.json"),
        &serde_json::to_string_pretty(&summary).unwrap(),
    )?;

    Ok(Bundle {
        out_dir: out.clone(),
        diagnostics_pass: failed.is_empty(),
        failed,
        warnings,
    })
}

fn write_spectrum_csv(path: &Path, fs: &SpectralFunction) -> Result<()> {
    let mut out = String::from("lambda,re,im,weight\n");
    for i in 0..fs.grid.n {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            f17(fs.grid.x(i)),
            f17(fs.values[i].re),
            f17(fs.values[i].im),
            f17(fs.weight[i])
        );
    }
    write_text(path, &out)
}

fn emit_trajectory(
    out: &Path,
    solver: &str,
    times: &[f64],
    states: &[WaveState],
    warnings: &mut Vec<String>,
) -> Result<()> {
    let mut files = Vec::new();
    for (k, st) in states.iter().enumerate() {
        let name = format!("{solver}_t{k:02}.csv");
        wave_state_csv(&out.join(&name), st)?;
        files.push(name);
    }
    let traj = serde_json::json!({
        "solver": solver,
        "times": times.iter().map(|&t| f17(t)).collect::<Vec<_>>(),
        "snapshots": files,
    });
    write_text(
        &out.join(format!("{solver}_trajectory.json")),
        &serde_json::to_string_pretty(&traj).unwrap(),
    )?;
    let series: Vec<Series> = times
        .iter()
        .zip(states)
        .map(|(&t, st)| Series {
            label: format!("t = {t}"),
            xs: st.u.grid.nodes(),
            ys: st.u.values.iter().map(|v| v.re).collect(),
        })
        .collect();
    let spec = PlotSpec {
        title: format!("{solver} snapshots: Re u(r, t)"),
        x_label: "r".into(),
        y_label: "Re u".into(),
        ..Default::default()
    };
    if !write_svg(&out.join(format!("{solver}_snapshots.svg")), &spec, &series)? {
        warnings.push(format!("{solver} trajectory empty; no SVG written"));
    }
    Ok(())
}

/// Max cross-solver discrepancy table over the grid solvers that ran,
/// sampled through the snapshot interpolators on a shared radius grid.
fn emit_solver_agreement(
    sc: &Scenario,
    out: &Path,
    grid_runs: &[(&'static str, Vec<WaveState>)],
) -> Result<()> {
    if grid_runs.len() < 2 {
        return Ok(());
    }
    let sample: Vec<f64> = Grid::span(sc.r_max, (sc.r_max / 400.0).max(sc.dr)).nodes();
    let mut csv = String::from("t,solver_a,solver_b,sup_diff\n");
    for (k, &t) in sc.times.iter().enumerate() {
        for i in 0..grid_runs.len() {
            for j in (i + 1)..grid_runs.len() {
                let (a, b) = (&grid_runs[i].1[k], &grid_runs[j].1[k]);
                let sup = sample
                    .iter()
                    .map(|&r| (a.u.at(r) - b.u.at(r)).norm())
                    .fold(0.0, f64::max);
                let _ = writeln!(csv, "{},{},{},{}", f17(t), grid_runs[i].0, grid_runs[j].0, f17(sup));
            }
        }
    }
    write_text(&out.join("solver_agreement.csv"), &csv)
}

fn decay_artifacts(
    out: &Path,
    name: &str,
    rep: &crate::analysis::DecayReport,
    vline: Option<(f64, String)>,
    warnings: &mut Vec<String>,
) -> Result<()> {
    write_text(&out.join(format!("{name}.json")), &rep.to_json())?;
    let mut csv = String::from("t,value\n");
    for (t, v) in rep.abscissa.iter().zip(&rep.values) {
        let _ = writeln!(csv, "{},{}", f17(*t), f17(*v));
    }
    write_text(&out.join(format!("{name}.csv")), &csv)?;
    let spec = PlotSpec {
        title: rep.claim.clone(),
        x_label: "t".into(),
        y_label: "value".into(),
        log_y: true,
        vline,
        hline: if rep.threshold > 0.0 {
            Some((rep.threshold, "threshold".into()))
        } else {
            None
        },
    };
    let series = [Series {
        label: name.into(),
        xs: rep.abscissa.clone(),
        ys: rep.values.clone(),
    }];
    if !write_svg(&out.join(format!("{name}.svg")), &spec, &series)? {
        warnings.push(format!("{name} profile empty; no SVG written"));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_diagnostic(
    sc: &Scenario,
    diag: Diagnostic,
    data: &CauchyData,
    fs: &SpectralFunction,
    gs: &SpectralFunction,
    spectral_states: &[WaveState],
    out: &Path,
    warnings: &mut Vec<String>,
) -> Result<bool> {
    let t_grid = Grid::new(sc.diag_t_step, sc.diag_t_count);
    match diag {
        Diagnostic::Conditions => {
            let rep = validate_conditions(&sc.model, sc.r_max.max(30.0), 2000);
            let pass = rep.all_pass();
            let mut v = serde_json::to_value(&rep).unwrap();
            v["pass"] = serde_json::Value::Bool(pass);
            write_text(&out.join("conditions.json"), &serde_json::to_string_pretty(&v).unwrap())?;
            Ok(pass)
        }
        Diagnostic::Huygens => {
            let rep = huygens_profile(&sc.model, data, sc.huygens_d, t_grid)?;
            let cone = sc.huygens_d + data.support_radius;
            decay_artifacts(out, "huygens", &rep, Some((cone, "light cone".into())), warnings)?;
            Ok(rep.pass)
        }
        Diagnostic::Equipartition => {
            let rep = equipartition_profile(&sc.model, data, t_grid)?;
            decay_artifacts(
                out,
                "equipartition",
                &rep,
                Some((data.support_radius, "support radius".into())),
                warnings,
            )?;
            Ok(rep.pass)
        }
        Diagnostic::LightCone => {
            let measured = light_cone_leakage(&sc.model, spectral_states, data.support_radius)?;
            let threshold = 1e-8;
            let pass = measured <= threshold;
            let v = serde_json::json!({
                "claim": "finite propagation speed",
                "region": format!("r > R0 + |t| + 3 dr, t in {:?}", sc.times),
                "measured": f17(measured),
                "threshold": f17(threshold),
                "pass": pass,
            });
            write_text(&out.join("light_cone.json"), &serde_json::to_string_pretty(&v).unwrap())?;
            Ok(pass)
        }
        Diagnostic::EnergyDrift => {
            let mut energies = Vec::new();
            for st in spectral_states {
                let (_, _, e) = energy(&sc.model, st, Some((fs, gs)))?;
                energies.push(e);
            }
            let (e0, e_min, e_max) = (
                energies.first().copied().unwrap_or(0.0),
                energies.iter().cloned().fold(f64::INFINITY, f64::min),
                energies.iter().cloned().fold(0.0, f64::max),
            );
            let measured = if e0 > 0.0 { (e_max - e_min) / e0 } else { 0.0 };
            let threshold = 1e-6;
            let pass = measured <= threshold;
            let v = serde_json::json!({
                "claim": "energy conservation",
                "region": format!("t in {:?}", sc.times),
                "measured": f17(measured),
                "threshold": f17(threshold),
                "pass": pass,
            });
            write_text(&out.join("energy_drift.json"), &serde_json::to_string_pretty(&v).unwrap())?;
            Ok(pass)
        }
        Diagnostic::PaleyWiener => {
            let rows = paley_wiener_report(
                &sc.model,
                &data.f,
                data.f.support_radius,
                &sc.pw_n,
                &sc.pw_tau,
                sc.pw_lambda_max,
            )?;
            let pass = rows.iter().all(|r| r.plateau);
            let v = serde_json::json!({
                "claim": "Paley-Wiener strip decay",
                "region": format!("lambda in [0, {}]", sc.pw_lambda_max),
                "rows": serde_json::to_value(&rows).unwrap(),
                "pass": pass,
            });
            write_text(&out.join("paley_wiener.json"), &serde_json::to_string_pretty(&v).unwrap())?;
            Ok(pass)
        }
        Diagnostic::PwRadius => {
            let lambda_cut = match &sc.data {
                DataSpec::BandLimited { lambda_cut, .. } => *lambda_cut,
                _ => unreachable!("schema validation restricts pw_radius to band-limited data"),
            };
            let ms = pw_radius(&sc.model, fs, sc.pw_j_max)?;
            let measured = *ms.last().unwrap();
            let pass = (measured - lambda_cut).abs() <= 0.02 * lambda_cut;
            let v = serde_json::json!({
                "claim": "spectral support radius from Plancherel moments",
                "region": format!("j in [1, {}]", sc.pw_j_max),
                "measured": f17(measured),
                "threshold": f17(0.02 * lambda_cut),
                "pass": pass,
            });
            write_text(&out.join("pw_radius.json"), &serde_json::to_string_pretty(&v).unwrap())?;
            let spec = PlotSpec {
                title: "moment estimates of the spectral support radius".into(),
                x_label: "j".into(),
                y_label: "m_j".into(),
                hline: Some((lambda_cut, "lambda_cut".into())),
                ..Default::default()
            };
            let series = [Series {
                label: "m_j".into(),
                xs: (1..=ms.len()).map(|j| j as f64).collect(),
                ys: ms,
            }];
            if !write_svg(&out.join("pw_radius.svg"), &spec, &series)? {
                warnings.push("pw_radius sequence empty; no SVG written".into());
            }
            Ok(pass)
        }
        Diagnostic::EnergyBound => {
            let lambda_cut = match &sc.data {
                DataSpec::BandLimited { lambda_cut, .. } => *lambda_cut,
                _ => unreachable!("schema validation restricts energy_bound to band-limited data"),
            };
            let st = WaveState { t: 0.0, u: data.f.clone(), ut: data.g.clone() };
            let (_, _, e) = energy(&sc.model, &st, Some((fs, gs)))?;
            let bound = lambda_cut * lambda_cut * l2_norm_physical(&sc.model, &data.f)?
                + l2_norm_physical(&sc.model, &data.g)?
                + 1e-6;
            let pass = 2.0 * e <= bound;
            let v = serde_json::json!({
                "claim": "band-limited energy bound 2E <= Lambda^2 ||f||^2 + ||g||^2",
                "region": format!("spectrum in [0, {lambda_cut}]"),
                "measured": f17(2.0 * e),
                "threshold": f17(bound),
                "pass": pass,
            });
            write_text(&out.join("energy_bound.json"), &serde_json::to_string_pretty(&v).unwrap())?;
            Ok(pass)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> &'static Path {
        Path::new(".")
    }

    #[test]
    fn parse_minimal_defaults() {
        let sc = parse_scenario("model.name = h3\n", base()).unwrap();
        assert_eq!(sc.times, vec![0.0]);
        assert_eq!(sc.solvers, vec![Solver::Spectral]);
        assert!((sc.r_max - 1.5).abs() < 1e-12);
        assert!(matches!(sc.data, DataSpec::Bump { radius, .. } if radius == 0.5));
    }

    #[test]
    fn parse_rejects_unknown_key() {
        let err = parse_scenario("model.name = h3\nmodel.extra = 1\n", base()).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");
    }

    #[test]
    fn parse_rejects_bad_grid() {
        let err = parse_scenario(
            "model.name = h3\ntime.values = 0, 3\ngrid.r_max = 2.0\n",
            base(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");
    }

    #[test]
    fn parse_rejects_cfl_violation() {
        let err = parse_scenario(
            "model.name = h3\nsolver.set = fdtd\nsolver.fdtd_dr = 1e-3\nsolver.fdtd_dt = 2e-3\n",
            base(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Cfl(_)), "{err}");
    }

    #[test]
    fn parse_rejects_diag_data_mismatch() {
        let err = parse_scenario("model.name = h3\ndiag.set = pw_radius\n", base()).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");
    }

    #[test]
    fn inline_jacobi_model() {
        let sc = parse_scenario(
            "model.alpha = 1.0\nmodel.beta = -0.5\nmodel.scale = 1.0\n",
            base(),
        )
        .unwrap();
        assert_eq!(sc.model.dim_n, 4);
    }

    #[test]
    fn manifest_is_deterministic() {
        let sc = parse_scenario("model.name = h3\ndata.radius = 0.4\n", base()).unwrap();
        let a = manifest_json(&sc, 0.125);
        let b = manifest_json(&sc, 0.125);
        assert_eq!(a, b);
        assert!(a.contains("\"data.radius\": \"0.4\""));
        assert!(a.contains("radialwave"));
    }
}
