//! Conversion of a [`Scenario`] to core types in model units.

use qrf_core::catstate::tau_tilde;
use qrf_core::decoherence::scenario_tau;
use qrf_core::frames::{FrameScenario, SystemState};
use qrf_core::sbs::{PointerBinning, SbsScenario, Thresholds};
use qrf_core::states::{CatSpec, GaussianSpec, MomentumGrid, PhysicalParams, UnitSystem};

use crate::config::{ConfigError, ExperimentKind, Grid, Scenario, StateB, TimeUnit, Units};
use crate::units::Scales;

#[derive(Debug, Clone)]
pub struct SbsModel {
    pub scenario: SbsScenario,
    pub binning: PointerBinning,
    pub thresholds: Thresholds,
}

/// A validated scenario in model units.
#[derive(Debug, Clone)]
pub struct Model {
    pub frame: FrameScenario,
    pub sbs: Option<SbsModel>,
    pub pi_b: f64,
    pub pi_b_prime: f64,
    /// Sample times in model units.
    pub times: Vec<f64>,
    /// Sample times as configured; written to the output files.
    pub output_times: Vec<f64>,
    pub scales: Scales,
    /// Decoherence time of the `(pi_B, pi_B_prime)` pair in model units.
    pub tau: Option<f64>,
    /// Cat-state decay time in model units (cat state, equal masses).
    pub tau_tilde: Option<f64>,
}

fn config_err(context: &str, e: qrf_core::Error) -> ConfigError {
    ConfigError {
        line: None,
        message: format!("{context}: {e}"),
    }
}

fn gaussian(center: f64, width: f64, scales: &Scales, context: &str) -> Result<GaussianSpec, ConfigError> {
    GaussianSpec::new(scales.momentum_to_model(center), scales.momentum_to_model(width))
        .map_err(|e| config_err(context, e))
}

fn grid(g: &Grid, scales: &Scales, context: &str) -> Result<MomentumGrid, ConfigError> {
    MomentumGrid::new(
        scales.momentum_to_model(g.p_min),
        scales.momentum_to_model(g.p_max),
        g.n,
    )
    .map_err(|e| config_err(context, e))
}

impl Model {
    /// Convert and check everything the experiment will need: that the
    /// states fit their grids, that the experiment's prerequisites hold and
    /// that `tau` exists when times are given in units of it.
    pub fn build(s: &Scenario) -> Result<Self, ConfigError> {
        let scales = Scales::for_scenario(s);
        let p = &s.params;
        let params = PhysicalParams::new(
            scales.action_to_model(p.hbar),
            scales.mass_to_model(p.m_a),
            scales.mass_to_model(p.m_b),
            scales.mass_to_model(p.m_c),
            match p.units {
                Units::Natural => UnitSystem::Natural,
                Units::Si => UnitSystem::Si,
            },
        )
        .map_err(|e| config_err("[params]", e))?;

        let psi0_b = match s.state_b {
            StateB::Gaussian(g) => SystemState::Gaussian(gaussian(g.center, g.width, &scales, "[state.B]")?),
            StateB::Cat {
                beta,
                beta_prime,
                width,
            } => SystemState::Cat(
                CatSpec::new(
                    scales.momentum_to_model(beta),
                    scales.momentum_to_model(beta_prime),
                    scales.momentum_to_model(width),
                )
                .map_err(|e| config_err("[state.B]", e))?,
            ),
        };
        let phi0 = gaussian(s.state_c.center, s.state_c.width, &scales, "[state.C]")?;
        let frame = FrameScenario::new(
            params,
            psi0_b,
            phi0,
            grid(&s.grid_b, &scales, "[grid.B]")?,
            grid(&s.grid_c, &scales, "[grid.C]")?,
        )
        .map_err(|e| config_err("states do not fit [grid.B] / [grid.C]", e))?;

        let e = &s.experiment;
        let pi_b = scales.momentum_to_model(e.pi_b);
        let pi_b_prime = scales.momentum_to_model(e.pi_b_prime);
        let tau = scenario_tau(&frame, pi_b, pi_b_prime).ok();

        let mut tau_tilde_model = None;
        if e.kind == ExperimentKind::CatCompare {
            let SystemState::Cat(cat) = frame.psi0_b else {
                return Err(ConfigError {
                    line: None,
                    message: "cat_compare needs `kind = cat` in [state.B]".into(),
                });
            };
            if !params.equal_masses() {
                return Err(ConfigError {
                    line: None,
                    message: "cat_compare needs m_A = m_B = m_C".into(),
                });
            }
            tau_tilde_model = Some(
                tau_tilde(pi_b - pi_b_prime, phi0.width, cat.width, params.m_c, params.hbar)
                    .map_err(|e| config_err("[experiment]", e))?,
            );
        }

        let sbs = match &e.sbs {
            None => None,
            Some(settings) => {
                let c2 = s.state_c2.unwrap_or(s.state_c);
                let c2 = gaussian(c2.center, c2.width, &scales, "[state.C2]")?;
                let scenario = SbsScenario::new(frame, c2, frame.grid_c)
                    .map_err(|e| config_err("[state.C2] does not fit [grid.C]", e))?;
                let edges = settings
                    .bin_edges
                    .iter()
                    .map(|&x| scales.momentum_to_model(x))
                    .collect();
                let binning = PointerBinning::new(edges).map_err(|e| config_err("bin_edges", e))?;
                binning
                    .assign(&frame.grid_b)
                    .map_err(|e| config_err("bin_edges", e))?;
                Some(SbsModel {
                    scenario,
                    binning,
                    thresholds: Thresholds {
                        coh_max: settings.coh_max,
                        overlap_max: settings.overlap_max,
                    },
                })
            }
        };

        let output_times = s.times.samples.values();
        let times = match s.times.unit {
            TimeUnit::Absolute => output_times.iter().map(|&t| scales.time_to_model(t)).collect(),
            TimeUnit::Tau => {
                let tau = tau.ok_or_else(|| ConfigError {
                    line: None,
                    message: "`unit = tau` needs pi_B != pi_B_prime".into(),
                })?;
                output_times.iter().map(|&t| t * tau).collect()
            }
        };

        Ok(Self {
            frame,
            sbs,
            pi_b,
            pi_b_prime,
            times,
            output_times,
            scales,
            tau,
            tau_tilde: tau_tilde_model,
        })
    }
}

/// Label of the configured time unit.
pub fn time_unit_label(s: &Scenario) -> &'static str {
    match (s.times.unit, s.params.units) {
        (TimeUnit::Tau, _) => "tau",
        (TimeUnit::Absolute, Units::Si) => "s",
        (TimeUnit::Absolute, Units::Natural) => "natural",
    }
}

/// Convert a model-unit duration to the configured time unit.
pub fn to_output_time(s: &Scenario, m: &Model, t_model: f64) -> f64 {
    match s.times.unit {
        TimeUnit::Tau => t_model / m.tau.expect("tau exists when times are in tau"),
        TimeUnit::Absolute => m.scales.time_from_model(t_model),
    }
}
