//! Implementations of the CLI subcommands.

use crate::formats::*;
use crate::CliError;
use spinsq_core::collective::{moments, CollectiveMoments};
use spinsq_core::criteria::{self, CriterionReport};
use spinsq_core::detect::{
    bound_window, critical_temperature_cached, nanotube_report, DetectorId, TcResult, ThermalModel,
};
use spinsq_core::models::{HamiltonianSpec, ModelKind};
use spinsq_core::polytope::{
    sample_separable, vertices_eigen_space, vertices_k_space, PolytopeSpace,
};
use spinsq_core::Error as CoreError;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content).map_err(CliError::Io),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes()).map_err(CliError::Io)?;
            if !content.ends_with('\n') {
                stdout.write_all(b"\n").map_err(CliError::Io)?;
            }
            Ok(())
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(CliError::Io)?;
    serde_json::from_str(&text).map_err(CliError::Parse)
}

/// Loads either a state file or a moments file, returning the moments and,
/// when a full state was given, the state's qubit count for reporting.
fn load_moments(path: &Path) -> Result<CollectiveMoments, CliError> {
    let text = fs::read_to_string(path).map_err(CliError::Io)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(CliError::Parse)?;
    if value.get("re").is_some() {
        let state: QStateJson = serde_json::from_value(value).map_err(CliError::Parse)?;
        let rho = state.into_state()?;
        Ok(moments(&rho)?)
    } else {
        let m: MomentsJson = serde_json::from_value(value).map_err(CliError::Parse)?;
        Ok(m.into_moments()?)
    }
}

pub fn cmd_moments(input: &Path, out: &Option<PathBuf>) -> Result<(), CliError> {
    let state: QStateJson = read_json(input)?;
    let rho = state.into_state()?;
    let m = moments(&rho)?;
    let text =
        serde_json::to_string_pretty(&MomentsJson::from_moments(&m)).map_err(CliError::Parse)?;
    write_output(out, &text)
}

pub fn cmd_check(
    input: &Path,
    tol: f64,
    format: &str,
    out: &Option<PathBuf>,
) -> Result<(), CliError> {
    let m = load_moments(input)?;
    let reports = criteria::evaluate_all(&m, tol)?;
    let bound = criteria::unentangled_bound(&m);
    match format {
        "json" => {
            let file: ReportJson = report_entries(&reports);
            let text = serde_json::to_string_pretty(&file).map_err(CliError::Parse)?;
            write_output(out, &text)
        }
        "human" => {
            let mut text = String::new();
            text.push_str(&format!("n = {}  (violation threshold {tol:.1e})\n", m.n()));
            text.push_str(&render_reports(&reports));
            text.push_str(&format!(
                "unentangled-spin bound: M_max = {}{}\n",
                bound.m_max,
                if bound.no_unentangled_spin {
                    "  (no unentangled spin)"
                } else {
                    ""
                }
            ));
            write_output(out, &text)
        }
        other => Err(CliError::Arg(format!(
            "unknown format '{other}' (use json or human)"
        ))),
    }
}

fn render_reports(reports: &[CriterionReport]) -> String {
    let mut text = String::new();
    for entry in report_entries(reports) {
        let margin = entry
            .margin
            .map(|m| fmt_short(m))
            .unwrap_or_else(|| "n/a".into());
        let flag = if entry.violated { "VIOLATED" } else { "" };
        text.push_str(&format!(
            "{:<16} {:>12} {}\n",
            entry.criterion_id, margin, flag
        ));
    }
    text
}

pub struct ModelArgs {
    pub model: String,
    pub n: Option<usize>,
    pub b: Option<f64>,
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub field: Option<f64>,
}

impl ModelArgs {
    /// A model is either a path to a model-json file or a kind name combined
    /// with `--n` and parameter flags.
    pub fn resolve(&self) -> Result<HamiltonianSpec, CliError> {
        let path = Path::new(&self.model);
        if path.exists() {
            let file: ModelJson = read_json(path)?;
            return Ok(file.into_spec()?);
        }
        let n = self
            .n
            .ok_or_else(|| CliError::Arg("--n is required with a model name".into()))?;
        let mut params = std::collections::BTreeMap::new();
        if let Some(b) = self.b {
            params.insert("b".to_string(), b);
        }
        if let Some(l) = self.lambda {
            params.insert("lambda".to_string(), l);
        }
        if let Some(g) = self.gamma {
            params.insert("gamma".to_string(), g);
        }
        if let Some(h) = self.field {
            params.insert("h".to_string(), h);
        }
        Ok(ModelJson {
            kind: self.model.clone(),
            n,
            params,
        }
        .into_spec()?)
    }
}

pub fn parse_detector(s: &str) -> Result<DetectorId, CliError> {
    let norm = s.to_lowercase().replace('_', "-");
    Ok(match norm.as_str() {
        "ppt" | "ppt-any" => DetectorId::PptAny,
        "ccnr" | "ccnr-any" => DetectorId::CcnrAny,
        "8a" | "ossi-8a" => DetectorId::Ossi8a,
        "8b" | "ossi-8b" => DetectorId::Ossi8b,
        "8c" | "ossi-8c" => DetectorId::Ossi8c,
        "8d" | "ossi-8d" => DetectorId::Ossi8d,
        "ssi" | "ssi-any" => DetectorId::SsiAny,
        other => return Err(CliError::Arg(format!("unknown detector '{other}'"))),
    })
}

const TC_CSV_HEADER: &str = "model,n,detector,t_c,bracket_lo,bracket_hi,scan_validated";

#[derive(Debug, serde::Serialize)]
pub struct TcRowJson {
    pub model: String,
    pub n: usize,
    pub detector: String,
    pub status: String,
    pub t_c: Option<f64>,
    pub bracket: Option<(f64, f64)>,
    pub scan_validated: Option<bool>,
}

fn model_label(spec: &HamiltonianSpec) -> String {
    match spec.kind {
        ModelKind::HeisenbergChain => "heisenberg_chain".into(),
        ModelKind::XyChain => "xy_chain".into(),
        ModelKind::HeisenbergComplete => "heisenberg_fc".into(),
        ModelKind::Lmg { lambda, gamma, h } => {
            if lambda == -(spec.n as f64) && gamma == 1.0 && h == 0.0 {
                "xy_fc".into()
            } else {
                format!("lmg(lambda={lambda},gamma={gamma},h={h})")
            }
        }
        ModelKind::IsingTransverse { b } => format!("ising(b={b})"),
        ModelKind::Nanotube => "nanotube".into(),
        ModelKind::Custom { .. } => "custom".into(),
    }
}

fn tc_row(spec: &HamiltonianSpec, detector: DetectorId, result: &TcResult) -> (String, TcRowJson) {
    let label = model_label(spec);
    match result {
        TcResult::Found(tc) => {
            let csv = format!(
                "{label},{},{detector},{},{},{},{}",
                spec.n,
                fmt_f64(tc.t_c),
                fmt_f64(tc.bracket.0),
                fmt_f64(tc.bracket.1),
                tc.scan_validated
            );
            let json = TcRowJson {
                model: label,
                n: spec.n,
                detector: detector.to_string(),
                status: "ok".into(),
                t_c: Some(tc.t_c),
                bracket: Some(tc.bracket),
                scan_validated: Some(tc.scan_validated),
            };
            (csv, json)
        }
        TcResult::NoneFound { detected_at_t_max } => {
            let status = if *detected_at_t_max {
                "detected-at-t-max"
            } else {
                "no-detection"
            };
            let csv = format!("{label},{},{detector},,,,false", spec.n);
            let json = TcRowJson {
                model: label,
                n: spec.n,
                detector: detector.to_string(),
                status: status.into(),
                t_c: None,
                bracket: None,
                scan_validated: None,
            };
            (csv, json)
        }
    }
}

pub fn cmd_tc(
    args: &ModelArgs,
    detector: &str,
    t_max: f64,
    tol: f64,
    format: &str,
    out: &Option<PathBuf>,
) -> Result<(), CliError> {
    let spec = args.resolve()?;
    let det = parse_detector(detector)?;
    let model = ThermalModel::new(&spec)?;
    let result = critical_temperature_cached(&model, det, t_max, tol)?;
    let (csv, json) = tc_row(&spec, det, &result);
    match format {
        "csv" => write_output(out, &format!("{TC_CSV_HEADER}\n{csv}\n")),
        "json" => write_output(
            out,
            &serde_json::to_string_pretty(&json).map_err(CliError::Parse)?,
        ),
        other => Err(CliError::Arg(format!(
            "unknown format '{other}' (use csv or json)"
        ))),
    }
}

/// The reference grid: five model families (three Ising fields) for sizes
/// 3..=9, each with its moment detector and the partial-transpose detector.
pub fn table2_cells() -> Vec<(HamiltonianSpec, DetectorId, f64)> {
    let mut cells = Vec::new();
    for n in 3..=9usize {
        let chain_kinds: [(ModelKind, DetectorId, f64); 7] = [
            (ModelKind::HeisenbergChain, DetectorId::Ossi8b, 12.0),
            (ModelKind::XyChain, DetectorId::Ossi8b, 8.0),
            (
                ModelKind::HeisenbergComplete,
                DetectorId::Ossi8b,
                2.5 * n as f64 + 3.0,
            ),
            (
                ModelKind::Lmg {
                    lambda: -(n as f64),
                    gamma: 1.0,
                    h: 0.0,
                },
                DetectorId::Ossi8b,
                1.5 * n as f64 + 2.0,
            ),
            (
                ModelKind::IsingTransverse { b: 0.5 },
                DetectorId::Ossi8c,
                5.0,
            ),
            (
                ModelKind::IsingTransverse { b: 1.0 },
                DetectorId::Ossi8c,
                5.0,
            ),
            (
                ModelKind::IsingTransverse { b: 2.0 },
                DetectorId::Ossi8c,
                6.0,
            ),
        ];
        for (kind, ssi_detector, t_max) in chain_kinds {
            let spec = HamiltonianSpec::new(kind, n).expect("grid spec is valid");
            cells.push((spec.clone(), ssi_detector, t_max));
            cells.push((spec, DetectorId::PptAny, t_max));
        }
    }
    cells
}

pub fn cmd_table2(
    tol: f64,
    jobs: usize,
    format: &str,
    out: &Option<PathBuf>,
) -> Result<(), CliError> {
    let cells = table2_cells();
    let results: Vec<Option<(String, TcRowJson)>> = run_cells(&cells, tol, jobs);

    let mut csv = String::from(TC_CSV_HEADER);
    csv.push('\n');
    let mut rows = Vec::new();
    for (idx, slot) in results.into_iter().enumerate() {
        match slot {
            Some((line, json)) => {
                csv.push_str(&line);
                csv.push('\n');
                rows.push(json);
            }
            None => {
                let (spec, det, _) = &cells[idx];
                eprintln!(
                    "cell {} {det} n={} failed; continuing",
                    model_label(spec),
                    spec.n
                );
                csv.push_str(&format!(
                    "{},{},{det},,,,false\n",
                    model_label(spec),
                    spec.n
                ));
            }
        }
    }
    match format {
        "csv" => write_output(out, &csv),
        "json" => write_output(
            out,
            &serde_json::to_string_pretty(&rows).map_err(CliError::Parse)?,
        ),
        other => Err(CliError::Arg(format!(
            "unknown format '{other}' (use csv or json)"
        ))),
    }
}

/// Runs the grid cells on a small worker pool; each cell writes into its own
/// slot so the output order is independent of scheduling.
fn run_cells(
    cells: &[(HamiltonianSpec, DetectorId, f64)],
    tol: f64,
    jobs: usize,
) -> Vec<Option<(String, TcRowJson)>> {
    let slots: Mutex<Vec<Option<(String, TcRowJson)>>> = Mutex::new(vec![None; cells.len()]);
    let next = AtomicUsize::new(0);
    let workers = jobs.max(1).min(cells.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= cells.len() {
                    break;
                }
                let (spec, det, t_max) = &cells[idx];
                let outcome = ThermalModel::new(spec)
                    .and_then(|model| critical_temperature_cached(&model, *det, *t_max, tol));
                let row = outcome.ok().map(|result| tc_row(spec, *det, &result));
                slots.lock().unwrap()[idx] = row;
            });
        }
    });
    slots.into_inner().unwrap()
}

impl Clone for TcRowJson {
    fn clone(&self) -> Self {
        TcRowJson {
            model: self.model.clone(),
            n: self.n,
            detector: self.detector.clone(),
            status: self.status.clone(),
            t_c: self.t_c,
            bracket: self.bracket,
            scan_validated: self.scan_validated,
        }
    }
}

pub fn cmd_bound_scan(
    args: &ModelArgs,
    t_min: f64,
    t_max: f64,
    points: usize,
    out: &Option<PathBuf>,
) -> Result<(), CliError> {
    if points < 2 || !(t_max > t_min) || !(t_min > 0.0) {
        return Err(CliError::Arg(
            "need points >= 2 and 0 < t_min < t_max".into(),
        ));
    }
    let spec = args.resolve()?;
    let grid: Vec<f64> = (0..points)
        .map(|i| t_min + (t_max - t_min) * i as f64 / (points - 1) as f64)
        .collect();
    let scan = bound_window(&spec, &grid)?;
    let mut csv = String::from("t,fully_ppt,ssi_detected,bound_entangled\n");
    for p in &scan {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(p.t),
            p.fully_ppt,
            p.ssi_detected,
            p.bound_entangled()
        ));
    }
    write_output(out, &csv)
}

pub fn cmd_polytope(
    space: &str,
    n: usize,
    j: &str,
    obj: &Option<PathBuf>,
    out: &Option<PathBuf>,
) -> Result<(), CliError> {
    let space = match space {
        "k" => PolytopeSpace::KSpace,
        "eigen" => PolytopeSpace::EigenSpace,
        other => {
            return Err(CliError::Arg(format!(
                "unknown space '{other}' (use k or eigen)"
            )))
        }
    };
    let parts: Vec<&str> = j.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::Arg(
            "--j expects three comma-separated numbers".into(),
        ));
    }
    let mut jv = [0.0; 3];
    for (slot, raw) in jv.iter_mut().zip(&parts) {
        *slot = raw
            .trim()
            .parse()
            .map_err(|_| CliError::Arg(format!("cannot parse '{raw}' as a number")))?;
    }
    let geom = match space {
        PolytopeSpace::KSpace => vertices_k_space(n, jv)?,
        PolytopeSpace::EigenSpace => vertices_eigen_space(n, jv)?,
    };
    if let Some(path) = obj {
        fs::write(path, polytope_obj(&geom)).map_err(CliError::Io)?;
    }
    let text = serde_json::to_string_pretty(&PolytopeJson::from_geometry(&geom))
        .map_err(CliError::Parse)?;
    write_output(out, &text)
}

pub fn cmd_sample(
    n: usize,
    count: usize,
    seed: u64,
    mixing: usize,
    zero_j: bool,
    out: &Option<PathBuf>,
) -> Result<(), CliError> {
    let samples = sample_separable(n, count, seed, mixing, zero_j)?;
    let mut csv = String::from("kx,ky,kz,jx,jy,jz\n");
    for s in &samples {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f64(s.k2[0]),
            fmt_f64(s.k2[1]),
            fmt_f64(s.k2[2]),
            fmt_f64(s.j[0]),
            fmt_f64(s.j[1]),
            fmt_f64(s.j[2])
        ));
    }
    write_output(out, &csv)
}

#[derive(Debug, serde::Serialize)]
struct NanotubeJson {
    tc_variance_sum: f64,
    tc_planar: f64,
    tc_ppt: f64,
    ppt_argmax_side_a: Vec<usize>,
    sum_bound_consistent: bool,
    no_detection_8c: bool,
    bound_window: (f64, f64),
}

pub fn cmd_nanotube(tol: f64, format: &str, out: &Option<PathBuf>) -> Result<(), CliError> {
    let report = nanotube_report(tol)?;
    match format {
        "json" => {
            let json = NanotubeJson {
                tc_variance_sum: report.tc_variance_sum.t_c,
                tc_planar: report.tc_planar.t_c,
                tc_ppt: report.tc_ppt.t_c,
                ppt_argmax_side_a: report.ppt_argmax.side_a().to_vec(),
                sum_bound_consistent: report.sum_bound_consistent,
                no_detection_8c: report.no_detection_8c,
                bound_window: report.bound_window,
            };
            write_output(
                out,
                &serde_json::to_string_pretty(&json).map_err(CliError::Parse)?,
            )
        }
        "human" => {
            let mut text = String::new();
            text.push_str("nine-site ring with next-nearest couplings (temperatures in K)\n");
            text.push_str(&format!(
                "  variance-sum criterion:   T_c = {}\n",
                fmt_short(report.tc_variance_sum.t_c)
            ));
            text.push_str(&format!(
                "  planar-moment criterion:  T_c = {}\n",
                fmt_short(report.tc_planar.t_c)
            ));
            text.push_str(&format!(
                "  partial transpose:        T_c = {}  (splitting {})\n",
                fmt_short(report.tc_ppt.t_c),
                report.ppt_argmax
            ));
            text.push_str(&format!(
                "  coordinate-sum bound consistent: {}\n",
                report.sum_bound_consistent
            ));
            text.push_str(&format!(
                "  per-axis family detects nothing: {}\n",
                report.no_detection_8c
            ));
            text.push_str(&format!(
                "  bound entanglement window: {} K .. {} K\n",
                fmt_short(report.bound_window.0),
                fmt_short(report.bound_window.1)
            ));
            write_output(out, &text)
        }
        other => Err(CliError::Arg(format!(
            "unknown format '{other}' (use json or human)"
        ))),
    }
}

/// Applies the qubit-cap override from the environment.
pub fn apply_env_cap() {
    if let Ok(raw) = std::env::var("SPINSQ_MAX_QUBITS") {
        if let Ok(cap) = raw.trim().parse::<usize>() {
            spinsq_core::set_qubit_cap(cap);
        } else {
            eprintln!("ignoring unparsable SPINSQ_MAX_QUBITS = {raw:?}");
        }
    }
}

pub fn core_exit_code(err: &CoreError) -> i32 {
    if err.is_argument_error() {
        2
    } else {
        3
    }
}
