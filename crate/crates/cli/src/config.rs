//! Scenario files.
//!
//! An INI-style document with sections `[params]`, `[state.B]`, `[state.C]`,
//! `[state.C2]`, `[grid.B]`, `[grid.C]`, `[times]`, `[experiment]` and
//! `[output]`. Lines starting with `#` or `;` are comments. Every key is
//! checked: unknown or repeated keys are errors reported with their line.
//!
//! ```text
//! [params]
//! units = natural        # or si
//! hbar = 1
//! m_A = 1
//! m_B = 1e-6
//! m_C = 1
//!
//! [state.B]
//! kind = gaussian        # or cat, with beta, beta_prime, width
//! center = 0
//! width = 1
//!
//! [state.C]              # initial state of A in frame C
//! center = 0.5
//! width = 1
//!
//! [grid.B]
//! p_min = -10
//! p_max = 10
//! n = 512
//!
//! [times]
//! linspace = 0, 6, 50    # or: values = 0, 1, 2.5
//! unit = absolute        # or tau
//!
//! [experiment]
//! kind = gamma_curve
//! pi_B = 1
//! pi_B_prime = 0
//!
//! [output]
//! name = gamma_curve
//! ```
//!
//! Omitted values take documented defaults, and [`Scenario::to_ini`] writes
//! them all out explicitly, so a serialized scenario parses back to an equal
//! value.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Planck's constant over 2 pi in J s.
pub const HBAR_SI: f64 = 1.054571817e-34;

/// Grids default to this many widths on each side of the state.
pub const DEFAULT_GRID_HALF_WIDTHS: f64 = 8.0;
pub const DEFAULT_GRID_POINTS: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    fn new(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self {
                line: Some(l),
                message,
            } => write!(f, "line {l}: {message}"),
            Self { message, .. } => f.write_str(message),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Natural,
    Si,
}

impl Units {
    pub fn as_str(&self) -> &'static str {
        match self {
            Units::Natural => "natural",
            Units::Si => "si",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub units: Units,
    pub hbar: f64,
    pub m_a: f64,
    pub m_b: f64,
    pub m_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian {
    pub center: f64,
    pub width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateB {
    Gaussian(Gaussian),
    Cat { beta: f64, beta_prime: f64, width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub p_min: f64,
    pub p_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TimeSamples {
    Linspace { t0: f64, t1: f64, n: usize },
    Values(Vec<f64>),
}

impl TimeSamples {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            TimeSamples::Linspace { t0, t1, n } => {
                if n == 1 {
                    return vec![t0];
                }
                (0..n)
                    .map(|k| {
                        if k + 1 == n {
                            t1
                        } else {
                            t0 + (t1 - t0) * k as f64 / (n - 1) as f64
                        }
                    })
                    .collect()
            }
            TimeSamples::Values(ref v) => v.clone(),
        }
    }
}

/// Unit of the configured times: the unit system's own time unit, or the
/// decoherence time of the `(pi_B, pi_B_prime)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeUnit {
    Absolute,
    Tau,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Times {
    pub samples: TimeSamples,
    pub unit: TimeUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    GammaCurve,
    PurityCurve,
    EncodingCurve,
    CatCompare,
    SbsScan,
    FrameCompare,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::GammaCurve,
        ExperimentKind::PurityCurve,
        ExperimentKind::EncodingCurve,
        ExperimentKind::CatCompare,
        ExperimentKind::SbsScan,
        ExperimentKind::FrameCompare,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::GammaCurve => "gamma_curve",
            ExperimentKind::PurityCurve => "purity_curve",
            ExperimentKind::EncodingCurve => "encoding_curve",
            ExperimentKind::CatCompare => "cat_compare",
            ExperimentKind::SbsScan => "sbs_scan",
            ExperimentKind::FrameCompare => "frame_compare",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown experiment kind `{s}`"))
    }
}

/// Pointer binning and thresholds of an `sbs_scan`.
#[derive(Debug, Clone, PartialEq)]
pub struct SbsSettings {
    pub bin_edges: Vec<f64>,
    pub coh_max: f64,
    pub overlap_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub kind: ExperimentKind,
    pub pi_b: f64,
    pub pi_b_prime: f64,
    pub sbs: Option<SbsSettings>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    /// File stem of every artifact.
    pub name: String,
    /// Output directory; `--out` takes precedence.
    pub dir: Option<String>,
    pub plot: bool,
}

/// A parsed and validated scenario, in the units it was written in.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: Params,
    pub state_b: StateB,
    /// Initial state of A in frame C, which becomes the environment C in frame A.
    pub state_c: Gaussian,
    /// Second environment fragment (`sbs_scan`); defaults to `state_c`.
    pub state_c2: Option<Gaussian>,
    pub grid_b: Grid,
    pub grid_c: Grid,
    pub times: Times,
    pub experiment: Experiment,
    pub output: Output,
}

const SECTIONS: [&str; 9] = [
    "params",
    "state.B",
    "state.C",
    "state.C2",
    "grid.B",
    "grid.C",
    "times",
    "experiment",
    "output",
];

struct Entry {
    value: String,
    line: usize,
}

struct Section {
    line: usize,
    entries: BTreeMap<String, Entry>,
}

fn tokenize(text: &str) -> Result<BTreeMap<String, Section>, ConfigError> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') || s.starts_with(';') {
            continue;
        }
        if let Some(rest) = s.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::at(line, format!("malformed section header `{s}`")))?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(ConfigError::at(line, format!("unknown section [{name}]")));
            }
            if let Some(prev) = sections.get(name) {
                return Err(ConfigError::at(
                    line,
                    format!("duplicate section [{name}] (first at line {})", prev.line),
                ));
            }
            sections.insert(
                name.to_string(),
                Section {
                    line,
                    entries: BTreeMap::new(),
                },
            );
            current = Some(name.to_string());
            continue;
        }
        let (key, value) = s
            .split_once('=')
            .ok_or_else(|| ConfigError::at(line, format!("expected `key = value`, got `{s}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(ConfigError::at(line, "empty key"));
        }
        let name = current
            .as_ref()
            .ok_or_else(|| ConfigError::at(line, format!("key `{key}` outside any section")))?;
        let section = sections.get_mut(name).expect("current section exists");
        if let Some(prev) = section.entries.get(key) {
            return Err(ConfigError::at(
                line,
                format!("duplicate key `{key}` in [{name}] (first at line {})", prev.line),
            ));
        }
        section.entries.insert(
            key.to_string(),
            Entry {
                value: value.to_string(),
                line,
            },
        );
    }
    Ok(sections)
}

/// Typed, consuming view of one section.
struct Reader {
    name: String,
    entries: BTreeMap<String, Entry>,
}

impl Reader {
    fn take(sections: &mut BTreeMap<String, Section>, name: &str) -> Self {
        Self {
            name: name.to_string(),
            entries: sections.remove(name).map(|s| s.entries).unwrap_or_default(),
        }
    }

    fn raw(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn string(&mut self, key: &str) -> Option<(String, usize)> {
        self.raw(key).map(|e| (e.value, e.line))
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.raw(key).map(|e| parse_f64(&e.value, e.line, key)).transpose()
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    fn required_f64(&mut self, key: &str) -> Result<f64, ConfigError> {
        self.f64(key)?
            .ok_or_else(|| ConfigError::new(format!("missing key `{key}` in [{}]", self.name)))
    }

    fn usize(&mut self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.raw(key)
            .map(|e| {
                e.value.parse::<usize>().map_err(|_| {
                    ConfigError::at(e.line, format!("`{key}` must be a non-negative integer, got `{}`", e.value))
                })
            })
            .transpose()
    }

    fn list(&mut self, key: &str) -> Result<Option<(Vec<f64>, usize)>, ConfigError> {
        self.raw(key)
            .map(|e| {
                let items = e
                    .value
                    .split(',')
                    .map(|s| parse_f64(s.trim(), e.line, key))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((items, e.line))
            })
            .transpose()
    }

    /// Error on the first key (by line) that nothing consumed.
    fn finish(self) -> Result<(), ConfigError> {
        match self.entries.iter().min_by_key(|(_, e)| e.line) {
            Some((key, e)) => Err(ConfigError::at(
                e.line,
                format!("unknown key `{key}` in [{}]", self.name),
            )),
            None => Ok(()),
        }
    }
}

fn parse_f64(s: &str, line: usize, key: &str) -> Result<f64, ConfigError> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ConfigError::at(line, format!("`{key}` must be a finite decimal number, got `{s}`"))),
    }
}

fn positive(v: f64, what: &str) -> Result<f64, ConfigError> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::new(format!("`{what}` must be positive, got {v}")))
    }
}

fn read_params(r: &mut Reader) -> Result<Params, ConfigError> {
    let units = match r.string("units") {
        None => Units::Natural,
        Some((s, line)) => match s.as_str() {
            "natural" => Units::Natural,
            "si" => Units::Si,
            _ => return Err(ConfigError::at(line, format!("`units` must be natural or si, got `{s}`"))),
        },
    };
    let hbar = match units {
        Units::Natural => r.f64_or("hbar", 1.0)?,
        Units::Si => r.f64_or("hbar", HBAR_SI)?,
    };
    let m_c = match units {
        Units::Natural => r.f64_or("m_C", 1.0)?,
        Units::Si => r
            .f64("m_C")?
            .ok_or_else(|| ConfigError::new("`m_C` is required in [params] when units = si"))?,
    };
    let m_a = r.f64_or("m_A", m_c)?;
    let m_b = r.f64_or("m_B", m_c)?;
    Ok(Params {
        units,
        hbar: positive(hbar, "hbar")?,
        m_a: positive(m_a, "m_A")?,
        m_b: positive(m_b, "m_B")?,
        m_c: positive(m_c, "m_C")?,
    })
}

fn read_gaussian(r: &mut Reader) -> Result<Gaussian, ConfigError> {
    let center = r.f64_or("center", 0.0)?;
    let width = r.required_f64("width")?;
    Ok(Gaussian {
        center,
        width: positive(width, &format!("[{}] width", r.name))?,
    })
}

fn read_state_b(r: &mut Reader) -> Result<StateB, ConfigError> {
    let kind = r.string("kind");
    match kind.as_ref().map(|(s, l)| (s.as_str(), *l)) {
        None | Some(("gaussian", _)) => Ok(StateB::Gaussian(read_gaussian(r)?)),
        Some(("cat", _)) => {
            let beta = r.required_f64("beta")?;
            let beta_prime = r.required_f64("beta_prime")?;
            let width = positive(r.required_f64("width")?, "[state.B] width")?;
            Ok(StateB::Cat {
                beta,
                beta_prime,
                width,
            })
        }
        Some((other, line)) => Err(ConfigError::at(
            line,
            format!("`kind` must be gaussian or cat, got `{other}`"),
        )),
    }
}

fn read_grid(r: &mut Reader, default: Grid) -> Result<Grid, ConfigError> {
    let grid = Grid {
        p_min: r.f64_or("p_min", default.p_min)?,
        p_max: r.f64_or("p_max", default.p_max)?,
        n: r.usize("n")?.unwrap_or(default.n),
    };
    if grid.n < 2 || grid.p_min >= grid.p_max {
        return Err(ConfigError::new(format!(
            "[{}] needs p_min < p_max and n >= 2, got ({}, {}, {})",
            r.name, grid.p_min, grid.p_max, grid.n
        )));
    }
    Ok(grid)
}

fn read_times(r: &mut Reader, present: bool) -> Result<Times, ConfigError> {
    if !present {
        return Err(ConfigError::new("missing section [times]"));
    }
    let linspace = r.list("linspace")?;
    let values = r.list("values")?;
    let samples = match (linspace, values) {
        (Some((v, line)), None) => {
            if v.len() != 3 || v[2] < 1.0 || v[2].fract() != 0.0 {
                return Err(ConfigError::at(line, "`linspace` must be `t0, t1, n` with integer n >= 1"));
            }
            TimeSamples::Linspace {
                t0: v[0],
                t1: v[1],
                n: v[2] as usize,
            }
        }
        (None, Some((v, _))) => TimeSamples::Values(v),
        (Some(_), Some((_, line))) => {
            return Err(ConfigError::at(line, "give either `linspace` or `values`, not both"))
        }
        (None, None) => return Err(ConfigError::new("[times] needs `linspace` or `values`")),
    };
    let unit = match r.string("unit") {
        None => TimeUnit::Absolute,
        Some((s, line)) => match s.as_str() {
            "absolute" => TimeUnit::Absolute,
            "tau" => TimeUnit::Tau,
            _ => return Err(ConfigError::at(line, format!("`unit` must be absolute or tau, got `{s}`"))),
        },
    };
    let t = samples.values();
    if t.iter().any(|&x| x < 0.0) {
        return Err(ConfigError::new("[times] must be non-negative"));
    }
    if t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ConfigError::new("[times] must be strictly ascending"));
    }
    Ok(Times { samples, unit })
}

fn read_experiment(r: &mut Reader, default_pi: f64) -> Result<Experiment, ConfigError> {
    let kind = match r.string("kind") {
        None => ExperimentKind::GammaCurve,
        Some((s, line)) => s.parse().map_err(|e| ConfigError::at(line, e))?,
    };
    let pi_b = r.f64_or("pi_B", default_pi)?;
    let pi_b_prime = r.f64_or("pi_B_prime", 0.0)?;
    let sbs = if kind == ExperimentKind::SbsScan {
        let (bin_edges, line) = r
            .list("bin_edges")?
            .ok_or_else(|| ConfigError::new("`bin_edges` is required in [experiment] for sbs_scan"))?;
        if bin_edges.len() < 3 || bin_edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::at(line, "`bin_edges` must be at least three ascending values"));
        }
        Some(SbsSettings {
            bin_edges,
            coh_max: positive(r.f64_or("coh_max", 0.05)?, "coh_max")?,
            overlap_max: positive(r.f64_or("overlap_max", 0.05)?, "overlap_max")?,
        })
    } else {
        None
    };
    Ok(Experiment {
        kind,
        pi_b,
        pi_b_prime,
        sbs,
    })
}

fn read_output(r: &mut Reader, kind: ExperimentKind) -> Result<Output, ConfigError> {
    let name = r.string("name").map(|(s, _)| s).unwrap_or_else(|| kind.as_str().to_string());
    if name.is_empty() || name.contains(['/', '\\']) {
        return Err(ConfigError::new(format!("`name` must be a plain file stem, got `{name}`")));
    }
    let dir = r.string("dir").map(|(s, _)| s);
    let plot = match r.string("plot") {
        None => true,
        Some((s, line)) => s
            .parse::<bool>()
            .map_err(|_| ConfigError::at(line, format!("`plot` must be true or false, got `{s}`")))?,
    };
    Ok(Output { name, dir, plot })
}

fn span_grid(lo: f64, hi: f64, width: f64) -> Grid {
    Grid {
        p_min: lo - DEFAULT_GRID_HALF_WIDTHS * width,
        p_max: hi + DEFAULT_GRID_HALF_WIDTHS * width,
        n: DEFAULT_GRID_POINTS,
    }
}

/// Parse a scenario document and apply defaults.
///
/// Checks the document itself (syntax, keys, ranges). Whether the states fit
/// their grids is checked when the scenario is converted to model units, see
/// [`crate::model::Model::build`].
pub fn parse_config(text: &str) -> Result<Scenario, ConfigError> {
    let mut sections = tokenize(text)?;
    let times_present = sections.contains_key("times");

    let mut r = Reader::take(&mut sections, "params");
    let params = read_params(&mut r)?;
    r.finish()?;

    let mut r = Reader::take(&mut sections, "state.B");
    if r.entries.is_empty() {
        return Err(ConfigError::new("missing section [state.B]"));
    }
    let state_b = read_state_b(&mut r)?;
    r.finish()?;

    let mut r = Reader::take(&mut sections, "state.C");
    if r.entries.is_empty() {
        return Err(ConfigError::new("missing section [state.C]"));
    }
    let state_c = read_gaussian(&mut r)?;
    r.finish()?;

    let c2_present = sections.contains_key("state.C2");
    let mut r = Reader::take(&mut sections, "state.C2");
    let state_c2 = if c2_present { Some(read_gaussian(&mut r)?) } else { None };
    r.finish()?;

    let default_b = match state_b {
        StateB::Gaussian(g) => span_grid(g.center, g.center, g.width),
        StateB::Cat {
            beta,
            beta_prime,
            width,
        } => span_grid(beta.min(beta_prime), beta.max(beta_prime), width),
    };
    let mut r = Reader::take(&mut sections, "grid.B");
    let grid_b = read_grid(&mut r, default_b)?;
    r.finish()?;

    // C in frame A: centred at -center m_C/m_A with width width m_C/m_A.
    let ratio = params.m_c / params.m_a;
    let env_center = -state_c.center * ratio;
    let env_width = state_c.width * ratio;
    let mut r = Reader::take(&mut sections, "grid.C");
    let grid_c = read_grid(&mut r, span_grid(env_center, env_center, env_width))?;
    r.finish()?;

    let mut r = Reader::take(&mut sections, "times");
    let times = read_times(&mut r, times_present)?;
    r.finish()?;

    let mut r = Reader::take(&mut sections, "experiment");
    let experiment = read_experiment(&mut r, state_c.width)?;
    r.finish()?;

    if state_c2.is_some() && experiment.kind != ExperimentKind::SbsScan {
        return Err(ConfigError::new("[state.C2] only applies to sbs_scan"));
    }

    let mut r = Reader::take(&mut sections, "output");
    let output = read_output(&mut r, experiment.kind)?;
    r.finish()?;

    Ok(Scenario {
        params,
        state_b,
        state_c,
        state_c2,
        grid_b,
        grid_c,
        times,
        experiment,
        output,
    })
}

/// Shortest decimal that parses back to the same value.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e6).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn format_list(values: &[f64]) -> String {
    values.iter().map(|&v| format_number(v)).collect::<Vec<_>>().join(", ")
}

impl Scenario {
    /// Serialize with every default written out.
    pub fn to_ini(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        let n = format_number;
        let p = &self.params;
        line("[params]".into());
        line(format!("units = {}", p.units.as_str()));
        line(format!("hbar = {}", n(p.hbar)));
        line(format!("m_A = {}", n(p.m_a)));
        line(format!("m_B = {}", n(p.m_b)));
        line(format!("m_C = {}", n(p.m_c)));

        line(String::new());
        line("[state.B]".into());
        match self.state_b {
            StateB::Gaussian(g) => {
                line("kind = gaussian".into());
                line(format!("center = {}", n(g.center)));
                line(format!("width = {}", n(g.width)));
            }
            StateB::Cat {
                beta,
                beta_prime,
                width,
            } => {
                line("kind = cat".into());
                line(format!("beta = {}", n(beta)));
                line(format!("beta_prime = {}", n(beta_prime)));
                line(format!("width = {}", n(width)));
            }
        }

        let mut gaussian = |name: &str, g: &Gaussian| {
            line(String::new());
            line(format!("[{name}]"));
            line(format!("center = {}", n(g.center)));
            line(format!("width = {}", n(g.width)));
        };
        gaussian("state.C", &self.state_c);
        if let Some(c2) = &self.state_c2 {
            gaussian("state.C2", c2);
        }

        for (name, g) in [("grid.B", &self.grid_b), ("grid.C", &self.grid_c)] {
            line(String::new());
            line(format!("[{name}]"));
            line(format!("p_min = {}", n(g.p_min)));
            line(format!("p_max = {}", n(g.p_max)));
            line(format!("n = {}", g.n));
        }

        line(String::new());
        line("[times]".into());
        match &self.times.samples {
            TimeSamples::Linspace { t0, t1, n: count } => {
                line(format!("linspace = {}, {}, {count}", n(*t0), n(*t1)))
            }
            TimeSamples::Values(v) => line(format!("values = {}", format_list(v))),
        }
        line(format!(
            "unit = {}",
            match self.times.unit {
                TimeUnit::Absolute => "absolute",
                TimeUnit::Tau => "tau",
            }
        ));

        let e = &self.experiment;
        line(String::new());
        line("[experiment]".into());
        line(format!("kind = {}", e.kind.as_str()));
        line(format!("pi_B = {}", n(e.pi_b)));
        line(format!("pi_B_prime = {}", n(e.pi_b_prime)));
        if let Some(s) = &e.sbs {
            line(format!("bin_edges = {}", format_list(&s.bin_edges)));
            line(format!("coh_max = {}", n(s.coh_max)));
            line(format!("overlap_max = {}", n(s.overlap_max)));
        }

        line(String::new());
        line("[output]".into());
        line(format!("name = {}", self.output.name));
        if let Some(dir) = &self.output.dir {
            line(format!("dir = {dir}"));
        }
        line(format!("plot = {}", self.output.plot));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
[state.B]
width = 1

[state.C]
center = 0.5
width = 1

[times]
linspace = 0, 6, 4
";

    #[test]
    fn minimal_document_gets_defaults() {
        let s = parse_config(MINIMAL).unwrap();
        assert_eq!(s.params.units, Units::Natural);
        assert_eq!((s.params.hbar, s.params.m_a, s.params.m_b, s.params.m_c), (1.0, 1.0, 1.0, 1.0));
        assert_eq!(s.state_b, StateB::Gaussian(Gaussian { center: 0.0, width: 1.0 }));
        assert_eq!(s.grid_b, Grid { p_min: -8.0, p_max: 8.0, n: 512 });
        assert_eq!(s.grid_c, Grid { p_min: -8.5, p_max: 7.5, n: 512 });
        assert_eq!(s.times.samples.values(), vec![0.0, 2.0, 4.0, 6.0]);
        assert_eq!(s.experiment.kind, ExperimentKind::GammaCurve);
        assert_eq!((s.experiment.pi_b, s.experiment.pi_b_prime), (1.0, 0.0));
        assert_eq!(s.output.name, "gamma_curve");
        assert!(s.output.plot);
    }

    #[test]
    fn duplicate_key_names_key_and_line() {
        let text = "[state.B]\nwidth = 1\nwidth = 2\n";
        let err = parse_config(text).unwrap_err();
        assert_eq!(err.line, Some(3));
        assert!(err.message.contains("`width`"), "{err}");
        assert!(err.to_string().starts_with("line 3:"));
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = MINIMAL.replace("center = 0.5", "centre = 0.5");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.line, Some(5));
        assert!(err.message.contains("unknown key `centre`"));
    }

    #[test]
    fn unknown_and_duplicate_sections_are_rejected() {
        let err = parse_config("[state.D]\n").unwrap_err();
        assert_eq!(err.line, Some(1));
        let err = parse_config("[times]\n[times]\n").unwrap_err();
        assert_eq!(err.line, Some(2));
    }

    #[test]
    fn malformed_lines_are_rejected() {
        for (text, line) in [
            ("width = 1\n", 1),
            ("[state.B]\nwidth\n", 2),
            ("[state.B\n", 1),
            ("[state.B]\nwidth = one\n", 2),
            ("[state.B]\nwidth = inf\n", 2),
        ] {
            assert_eq!(parse_config(text).unwrap_err().line, Some(line), "{text}");
        }
    }

    #[test]
    fn validation_errors_name_the_key() {
        let err = parse_config(&MINIMAL.replace("width = 1\n\n[state.C]", "width = -1\n\n[state.C]")).unwrap_err();
        assert!(err.message.contains("width"));
        let err = parse_config(&MINIMAL.replace("0, 6, 4", "6, 0, 4")).unwrap_err();
        assert!(err.message.contains("ascending"));
        let err = parse_config(&(MINIMAL.to_string() + "values = 1, 2\n")).unwrap_err();
        assert!(err.message.contains("not both"));
        let err = parse_config(&(MINIMAL.to_string() + "[experiment]\nkind = sbs_scan\n")).unwrap_err();
        assert!(err.message.contains("bin_edges"));
        let err = parse_config(&(MINIMAL.to_string() + "[params]\nunits = si\n")).unwrap_err();
        assert!(err.message.contains("m_C"));
    }

    #[test]
    fn explicit_time_list() {
        let s = parse_config(&MINIMAL.replace("linspace = 0, 6, 4", "values = 0, 0.5, 3\nunit = tau")).unwrap();
        assert_eq!(s.times.samples, TimeSamples::Values(vec![0.0, 0.5, 3.0]));
        assert_eq!(s.times.unit, TimeUnit::Tau);
    }

    #[test]
    fn cat_state_and_sbs_settings_round_trip() {
        let text = "\
[params]
m_B = 1e-6
[state.B]
kind = cat
beta = 2
beta_prime = -2
width = 1
[state.C]
width = 1
[state.C2]
center = 0.25
width = 0.5
[times]
values = 0, 1e-3, 123456789.5
[experiment]
kind = sbs_scan
bin_edges = -16, -2, 0, 2, 16
coh_max = 0.01
[output]
dir = results
plot = false
";
        let s = parse_config(text).unwrap();
        assert_eq!(s.grid_b, Grid { p_min: -10.0, p_max: 10.0, n: 512 });
        assert_eq!(s.experiment.sbs.as_ref().unwrap().overlap_max, 0.05);
        let again = parse_config(&s.to_ini()).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn si_document_round_trips_exactly() {
        let text = "\
[params]
units = si
m_C = 1e-17
[state.B]
width = 1.054571817e-28
[state.C]
width = 1.054571817e-28
[times]
linspace = 0, 3, 31
unit = tau
[experiment]
pi_B = 2.109143634e-34
";
        let s = parse_config(text).unwrap();
        assert_eq!(s.params.hbar, HBAR_SI);
        assert_eq!(s.params.m_a, 1e-17);
        assert_eq!(parse_config(&s.to_ini()).unwrap(), s);
    }

    #[test]
    fn number_formatting_round_trips() {
        for v in [0.0, -0.0, 1.0, 0.1, 1e-17, -3.25e22, 123456.789, 1.054571817e-34, 0.0001] {
            let s = format_number(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }

    #[test]
    fn linspace_hits_endpoints() {
        let t = TimeSamples::Linspace { t0: 0.0, t1: 0.3, n: 4 }.values();
        assert_eq!(t[0], 0.0);
        assert_eq!(t[3], 0.3);
        assert_eq!(TimeSamples::Linspace { t0: 2.0, t1: 2.0, n: 1 }.values(), vec![2.0]);
    }
}
