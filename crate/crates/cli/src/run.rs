//! Experiment drivers.
//!
//! Every experiment produces `<name>.csv` with one row per sample time,
//! optionally `<name>.svg`, and `<name>_manifest.json`; `cat_compare` also
//! writes `<name>_summary.csv`. Numbers are written as `{:.16e}` (17
//! significant digits), so identical scenarios give byte-identical files.
//! Time columns use the configured time unit, see [`time_unit_label`].

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use qrf_core::catstate::{cat_gamma_closed, cat_gamma_numeric, fit_decay_time};
use qrf_core::decoherence::{factored_overlap, gamma_gaussian, gamma_numeric};
use qrf_core::frames::{conditional_state, frame_c_state, to_frame_a, SystemState};
use qrf_core::sbs::{build_bc1, build_bc1_frame_c, sbs_report};
use qrf_core::states::{entanglement_entropy, purity, reduce, schmidt_coefficients, Subsystem, WaveFunction};

use crate::config::{ExperimentKind, Scenario, TimeUnit, Units};
use crate::error::{in_module, CliError};
use crate::manifest::{sha256_hex, Derived, FileEntry, Manifest, ScalesEntry, SCHEMA};
use crate::model::{time_unit_label, Model};
use crate::plot::{emit_plot, PlotStyle, Series};

/// One output file held in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub artifacts: Vec<Artifact>,
    pub manifest: Manifest,
}

impl RunOutput {
    pub fn manifest_file(&self) -> String {
        format!("{}_manifest.json", self.manifest_stem())
    }

    fn manifest_stem(&self) -> &str {
        self.artifacts[0]
            .file
            .strip_suffix(".csv")
            .expect("first artifact is the main table")
    }

    /// Every file of the run including the manifest.
    pub fn files(&self) -> Vec<Artifact> {
        let mut files = self.artifacts.clone();
        files.push(Artifact {
            file: self.manifest_file(),
            bytes: self.manifest.to_json().into_bytes(),
        });
        files
    }

    pub fn artifact(&self, file: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.file == file)
    }

    /// Write every file into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        self.files()
            .into_iter()
            .map(|a| {
                let path = dir.join(&a.file);
                fs::write(&path, &a.bytes).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
                Ok(path)
            })
            .collect()
    }
}

/// Fixed CSV number format: 17 significant digits, lowercase exponent.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

struct Outcome {
    table: Table,
    series: Vec<Series>,
    title: &'static str,
    y_label: &'static str,
    summary: Option<Table>,
    tau_tilde_fitted: Option<f64>,
}

fn amps_column(wf: &WaveFunction) -> DMatrix<qrf_core::C64> {
    DMatrix::from_column_slice(wf.grid().n(), 1, wf.amps().as_slice())
}

/// Generalized overlap of the conditional environment states for `pi_B` and
/// `pi_B_prime`, computed in factored form (pure states).
fn conditional_overlap(m: &Model, env: &WaveFunction, t: f64) -> Result<f64, CliError> {
    let p = &m.frame.params;
    let a = conditional_state(env, m.pi_b, p, t);
    let b = conditional_state(env, m.pi_b_prime, p, t);
    factored_overlap(&amps_column(&a), &amps_column(&b)).map_err(in_module("decoherence"))
}

fn gamma_curve(m: &Model, t_out: &[f64]) -> Result<Outcome, CliError> {
    let p = &m.frame.params;
    let env = m.frame.environment_state().map_err(in_module("frames"))?;
    let mut table = Table::new(vec![
        "t",
        "re_gamma",
        "im_gamma",
        "abs_gamma",
        "abs_gamma_numeric",
        "generalized_overlap",
    ]);
    let (mut closed, mut numeric) = (Vec::new(), Vec::new());
    for (&t, &to) in m.times.iter().zip(t_out) {
        let g = gamma_gaussian(m.frame.phi0_a, m.pi_b, m.pi_b_prime, p, t);
        let gn = gamma_numeric(&env, m.pi_b, m.pi_b_prime, p, t).map_err(in_module("decoherence"))?;
        let overlap = conditional_overlap(m, &env, t)?;
        table.push(vec![
            format_value(to),
            format_value(g.re),
            format_value(g.im),
            format_value(g.norm()),
            format_value(gn.norm()),
            format_value(overlap),
        ]);
        closed.push(g.norm());
        numeric.push(gn.norm());
    }
    Ok(Outcome {
        table,
        series: vec![
            Series::new("|Gamma| closed form", t_out, &closed),
            Series::new("|Gamma| quadrature", t_out, &numeric),
        ],
        title: "Decoherence factor",
        y_label: "|Gamma(t)|",
        summary: None,
        tau_tilde_fitted: None,
    })
}

fn encoding_curve(m: &Model, t_out: &[f64]) -> Result<Outcome, CliError> {
    let p = &m.frame.params;
    let env = m.frame.environment_state().map_err(in_module("frames"))?;
    let mut table = Table::new(vec!["t", "abs_gamma", "generalized_overlap", "abs_difference"]);
    let (mut gamma, mut overlap) = (Vec::new(), Vec::new());
    for (&t, &to) in m.times.iter().zip(t_out) {
        let g = gamma_numeric(&env, m.pi_b, m.pi_b_prime, p, t)
            .map_err(in_module("decoherence"))?
            .norm();
        let b = conditional_overlap(m, &env, t)?;
        table.push(vec![format_value(to), format_value(g), format_value(b), format_value((g - b).abs())]);
        gamma.push(g);
        overlap.push(b);
    }
    Ok(Outcome {
        table,
        series: vec![
            Series::new("|Gamma|", t_out, &gamma),
            Series::new("generalized overlap", t_out, &overlap),
        ],
        title: "Information encoded in C",
        y_label: "|Gamma|, B",
        summary: None,
        tau_tilde_fitted: None,
    })
}

struct FrameAPoint {
    purity: f64,
    entropy: f64,
    largest_schmidt: f64,
}

fn frame_a_point(m: &Model, t: f64) -> Result<FrameAPoint, CliError> {
    let joint = to_frame_a(&m.frame, t).map_err(in_module("frames"))?;
    let schmidt = schmidt_coefficients(&joint);
    Ok(FrameAPoint {
        purity: purity(&reduce(&joint, Subsystem::B)),
        entropy: entanglement_entropy(&schmidt),
        largest_schmidt: schmidt.first().copied().unwrap_or(0.0),
    })
}

fn purity_curve(m: &Model, t_out: &[f64]) -> Result<Outcome, CliError> {
    let mut table = Table::new(vec![
        "t",
        "purity_B_frame_A",
        "schmidt_entropy_frame_A",
        "largest_schmidt_frame_A",
    ]);
    let mut purities = Vec::new();
    for (&t, &to) in m.times.iter().zip(t_out) {
        let a = frame_a_point(m, t)?;
        table.push(vec![
            format_value(to),
            format_value(a.purity),
            format_value(a.entropy),
            format_value(a.largest_schmidt),
        ]);
        purities.push(a.purity);
    }
    Ok(Outcome {
        table,
        series: vec![Series::new("purity of B, frame A", t_out, &purities)],
        title: "Purity of B",
        y_label: "Tr rho_B^2",
        summary: None,
        tau_tilde_fitted: None,
    })
}

fn frame_compare(m: &Model, t_out: &[f64]) -> Result<Outcome, CliError> {
    let mut table = Table::new(vec![
        "t",
        "purity_B_frame_C",
        "purity_B_frame_A",
        "schmidt_entropy_frame_A",
    ]);
    let (mut pc, mut pa) = (Vec::new(), Vec::new());
    for (&t, &to) in m.times.iter().zip(t_out) {
        let c = frame_c_state(&m.frame, t).map_err(in_module("frames"))?;
        let purity_c = purity(&reduce(&c, Subsystem::B));
        let a = frame_a_point(m, t)?;
        table.push(vec![
            format_value(to),
            format_value(purity_c),
            format_value(a.purity),
            format_value(a.entropy),
        ]);
        pc.push(purity_c);
        pa.push(a.purity);
    }
    Ok(Outcome {
        table,
        series: vec![
            Series::new("frame C", t_out, &pc),
            Series::new("frame A", t_out, &pa),
        ],
        title: "Purity of B in two reference frames",
        y_label: "Tr rho_B^2",
        summary: None,
        tau_tilde_fitted: None,
    })
}

fn cat_compare(m: &Model, t_out: &[f64]) -> Result<Outcome, CliError> {
    let SystemState::Cat(cat) = m.frame.psi0_b else {
        unreachable!("checked when the model was built")
    };
    let p = &m.frame.params;
    let branch = (cat.beta, cat.beta_prime);
    let mut table = Table::new(vec!["t", "abs_gamma_closed", "abs_gamma_numeric", "rel_err"]);
    let (mut closed, mut numeric) = (Vec::new(), Vec::new());
    for (&t, &to) in m.times.iter().zip(t_out) {
        let c = cat_gamma_closed(cat, m.frame.phi0_a, m.pi_b, m.pi_b_prime, branch, p, t)
            .map_err(in_module("catstate"))?
            .total
            .norm();
        let n = cat_gamma_numeric(cat, m.frame.phi0_a, m.pi_b, m.pi_b_prime, branch, p, t)
            .map_err(in_module("catstate"))?
            .norm();
        table.push(vec![
            format_value(to),
            format_value(c),
            format_value(n),
            format_value((c - n).abs() / n),
        ]);
        closed.push(c);
        numeric.push(n);
    }
    let fitted = fit_decay_time(&m.times, &numeric).map_err(in_module("catstate"))?;
    let formula = m.tau_tilde.expect("set for cat_compare");
    let mut summary = Table::new(vec!["tau_tilde_fitted", "tau_tilde_formula", "rel_diff"]);
    let (fitted_abs, formula_abs) = (m.scales.time_from_model(fitted), m.scales.time_from_model(formula));
    summary.push(vec![
        format_value(fitted_abs),
        format_value(formula_abs),
        format_value((fitted - formula).abs() / formula),
    ]);
    Ok(Outcome {
        table,
        series: vec![
            Series::new("|Gamma~| closed form", t_out, &closed),
            Series::new("|Gamma~| quadrature", t_out, &numeric),
        ],
        title: "Cat-state decoherence factor",
        y_label: "|Gamma~(t)|",
        summary: Some(summary),
        tau_tilde_fitted: Some(fitted_abs),
    })
}

fn sbs_scan(m: &Model, t_out: &[f64]) -> Result<Outcome, CliError> {
    let sbs = m.sbs.as_ref().expect("set for sbs_scan");
    let mut table = Table::new(vec![
        "t",
        "coherence_ratio_frame_A",
        "max_overlap_frame_A",
        "sbs_ok_frame_A",
        "coherence_ratio_frame_C",
        "max_overlap_frame_C",
        "sbs_ok_frame_C",
    ]);
    let (mut coh, mut ov) = (Vec::new(), Vec::new());
    for (&t, &to) in m.times.iter().zip(t_out) {
        let a = build_bc1(&sbs.scenario, t)
            .and_then(|s| sbs_report(&s, &sbs.binning, sbs.thresholds))
            .map_err(in_module("sbs"))?;
        let c = build_bc1_frame_c(&sbs.scenario, t)
            .and_then(|s| sbs_report(&s, &sbs.binning, sbs.thresholds))
            .map_err(in_module("sbs"))?;
        table.push(vec![
            format_value(to),
            format_value(a.coherence_ratio),
            format_value(a.max_overlap()),
            a.sbs_ok.to_string(),
            format_value(c.coherence_ratio),
            format_value(c.max_overlap()),
            c.sbs_ok.to_string(),
        ]);
        coh.push(a.coherence_ratio);
        ov.push(a.max_overlap());
    }
    Ok(Outcome {
        table,
        series: vec![
            Series::new("inter-bin coherence, frame A", t_out, &coh),
            Series::new("max record overlap, frame A", t_out, &ov),
        ],
        title: "Spectrum broadcast structure diagnostics",
        y_label: "ratio",
        summary: None,
        tau_tilde_fitted: None,
    })
}

fn x_label(s: &Scenario) -> &'static str {
    match (s.times.unit, s.params.units) {
        (TimeUnit::Tau, _) => "t / tau",
        (TimeUnit::Absolute, Units::Si) => "t [s]",
        (TimeUnit::Absolute, Units::Natural) => "t [natural units]",
    }
}

/// Run the scenario's experiment and collect its files in memory.
pub fn run_scenario(s: &Scenario) -> Result<RunOutput, CliError> {
    let m = Model::build(s)?;
    let t_out = m.output_times.clone();
    let outcome = match s.experiment.kind {
        ExperimentKind::GammaCurve => gamma_curve(&m, &t_out)?,
        ExperimentKind::PurityCurve => purity_curve(&m, &t_out)?,
        ExperimentKind::EncodingCurve => encoding_curve(&m, &t_out)?,
        ExperimentKind::CatCompare => cat_compare(&m, &t_out)?,
        ExperimentKind::SbsScan => sbs_scan(&m, &t_out)?,
        ExperimentKind::FrameCompare => frame_compare(&m, &t_out)?,
    };

    let name = &s.output.name;
    let mut artifacts = vec![Artifact {
        file: format!("{name}.csv"),
        bytes: outcome.table.to_csv(),
    }];
    if let Some(summary) = &outcome.summary {
        artifacts.push(Artifact {
            file: format!("{name}_summary.csv"),
            bytes: summary.to_csv(),
        });
    }
    if s.output.plot {
        let style = PlotStyle::new(
            format!("{} ({} units)", outcome.title, s.params.units.as_str()),
            x_label(s),
            outcome.y_label,
        );
        let svg = emit_plot(&outcome.series, &style).map_err(|e| CliError::Numerical {
            module: "plot",
            source: qrf_core::Error::Invariant(e.to_string()),
        })?;
        artifacts.push(Artifact {
            file: format!("{name}.svg"),
            bytes: svg.into_bytes(),
        });
    }

    let config = s.to_ini();
    let mut notes = Vec::new();
    if s.params.units == Units::Si {
        notes.push(
            "SI inputs are divided by the listed scales before computing; hbar = m_C = 1 in model units".to_string(),
        );
    }
    if s.times.unit == TimeUnit::Tau {
        notes.push("time columns are in units of the decoherence time tau".to_string());
    }
    if matches!(s.experiment.kind, ExperimentKind::GammaCurve | ExperimentKind::EncodingCurve) {
        notes.push("generalized_overlap is computed from the conditional states of C for pi_B and pi_B_prime".to_string());
    }
    let manifest = Manifest {
        schema: SCHEMA.to_string(),
        experiment: s.experiment.kind.as_str().to_string(),
        units: s.params.units.as_str().to_string(),
        time_unit: time_unit_label(s).to_string(),
        config_sha256: sha256_hex(config.as_bytes()),
        config,
        scales: ScalesEntry {
            momentum: m.scales.momentum,
            mass: m.scales.mass,
            action: m.scales.action,
            time: m.scales.time(),
        },
        derived: Derived {
            tau: m.tau.map(|t| m.scales.time_from_model(t)),
            tau_tilde: m.tau_tilde.map(|t| m.scales.time_from_model(t)),
            tau_tilde_fitted: outcome.tau_tilde_fitted,
        },
        notes,
        outputs: artifacts.iter().map(|a| FileEntry::new(&a.file, &a.bytes)).collect(),
    };
    Ok(RunOutput { artifacts, manifest })
}
