//! Acceptance checks run by `qrf check`.
//!
//! Each check builds its own scenario, compares the library against an
//! independent reference (closed form, quadrature, or a second route through
//! the pipeline) and reports pass or fail with the measured numbers.

use std::f64::consts::E;
use std::time::Instant;

use qrf_core::catstate::{self, cat_gamma_closed, cat_gamma_numeric, cat_reduced_b, fit_decay_time, tau_tilde};
use qrf_core::decoherence::{decoherence_time, encoding_curve, gamma_gaussian, gamma_numeric, scenario_tau};
use qrf_core::frames::{frame_c_state, to_frame_a, transform_frame_c_state, FrameScenario, SystemState};
use qrf_core::sbs::{build_bc1, build_bc1_frame_c, sbs_report, PointerBinning, SbsScenario, Thresholds, REFERENCE_BIN_EDGES};
use qrf_core::states::{
    make_gaussian, purity, reduce, schmidt_coefficients, GaussianSpec, JointWaveFunction, MomentumGrid,
    PhysicalParams, Subsystem,
};
use qrf_core::{Result, C64};

use crate::fig2::fig2_scenario;
use crate::run::run_scenario;

pub const GAMMA_ORACLE_REL_TOL: f64 = 1e-6;
pub const GAMMA_ORACLE_POINTS: usize = 4096;
pub const GAMMA_ORACLE_SAMPLES: usize = 50;
pub const GAMMA_ORACLE_SECONDS: f64 = 5.0;
pub const TAU_CLOSED_TOL: f64 = 1e-9;
pub const TAU_ORACLE_TOL: f64 = 1e-6;
pub const FRAME_C_PURITY_TOL: f64 = 1e-10;
pub const FRAME_A_PURITY_AT_2TAU: f64 = 0.9;
pub const ENCODING_TOL: f64 = 1e-7;
pub const PIPELINE_ENTRY_TOL: f64 = 1e-8;
pub const PIPELINE_POINTS: usize = 512;
pub const NORM_TOL: f64 = 1e-12;
pub const PRODUCT_SCHMIDT_TOL: f64 = 1e-10;
pub const CLASSICAL_SHRINK: f64 = 100.0;
pub const CLASSICAL_MIN_GAMMA: f64 = 0.999;
pub const CAT_REL_TOL: f64 = 1e-4;
pub const CAT_FIT_REL_TOL: f64 = 0.01;
pub const CAT_LIMIT_TOL: f64 = 1e-9;
pub const SBS_TIME_IN_TAU: f64 = 5.0;
pub const FIG2_CLOSED_TOL: f64 = 1e-12;
pub const FIG2_NUMERIC_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<28} {}  {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

fn outcome(id: u8, name: &'static str, r: Result<(bool, String)>) -> CriterionResult {
    let (passed, detail) = match r {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id,
        name,
        passed,
        detail,
    }
}

fn linspace(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| t0 + (t1 - t0) * k as f64 / (n - 1) as f64).collect()
}

fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Grid of `points` points spanning eight widths on each side of `spec`.
fn spanning_grid(spec: GaussianSpec, points: usize) -> Result<MomentumGrid> {
    MomentumGrid::new(spec.center - 8.0 * spec.width, spec.center + 8.0 * spec.width, points)
}

/// Closed-form decoherence factor against quadrature on a fine grid.
pub fn gamma_oracle() -> CriterionResult {
    let start = Instant::now();
    let r = (|| {
        let s = FrameScenario::baseline();
        let tau = scenario_tau(&s, 1.0, 0.0)?;
        let env_spec = s.environment_spec();
        let env = make_gaussian(spanning_grid(env_spec, GAMMA_ORACLE_POINTS)?, env_spec)?;
        let mut worst = 0.0f64;
        for t in linspace(0.0, 3.0 * tau, GAMMA_ORACLE_SAMPLES) {
            let closed = gamma_gaussian(s.phi0_a, 1.0, 0.0, &s.params, t);
            let numeric = gamma_numeric(&env, 1.0, 0.0, &s.params, t)?;
            worst = worst.max(rel_err(numeric, closed));
        }
        let elapsed = start.elapsed().as_secs_f64();
        Ok((
            worst <= GAMMA_ORACLE_REL_TOL && elapsed < GAMMA_ORACLE_SECONDS,
            format!("max rel err {worst:.2e} (tol {GAMMA_ORACLE_REL_TOL:.0e}), {elapsed:.3} s"),
        ))
    })();
    outcome(1, "closed form vs quadrature", r)
}

/// `|Gamma(tau)| = 1/e` and the scaling of `tau`.
pub fn timescale() -> CriterionResult {
    let r = (|| {
        let s = FrameScenario::baseline();
        let p = s.params;
        let tau = scenario_tau(&s, 1.0, 0.0)?;
        let closed = gamma_gaussian(s.phi0_a, 1.0, 0.0, &p, tau).norm();
        let numeric = gamma_numeric(&s.environment_state()?, 1.0, 0.0, &p, tau)?.norm();
        let d_closed = (closed - 1.0 / E).abs();
        let d_numeric = (numeric - 1.0 / E).abs();
        let width = s.phi0_a.width;
        let base = decoherence_time(1.0, 0.0, width, p.m_c, p.hbar)?;
        let mass_ratio = decoherence_time(1.0, 0.0, width, 2.0 * p.m_c, p.hbar)? / base;
        let width_ratio = decoherence_time(1.0, 0.0, 2.0 * width, p.m_c, p.hbar)? / base;
        Ok((
            d_closed <= TAU_CLOSED_TOL && d_numeric <= TAU_ORACLE_TOL && mass_ratio == 2.0 && width_ratio == 0.5,
            format!(
                "||G(tau)| - 1/e| closed {d_closed:.2e}, quadrature {d_numeric:.2e}; tau(2m)/tau = {mass_ratio}, tau(2D)/tau = {width_ratio}"
            ),
        ))
    })();
    outcome(2, "decoherence timescale", r)
}

/// Purity of B stays one in frame C and decays in frame A.
pub fn frame_relativity() -> CriterionResult {
    let r = (|| {
        let s = FrameScenario::baseline();
        let tau = scenario_tau(&s, 1.0, 0.0)?;
        let times: Vec<f64> = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0].iter().map(|k| k * tau).collect();
        let mut worst_c = 0.0f64;
        let mut purities_a = Vec::new();
        for &t in &times {
            let c = frame_c_state(&s, t)?;
            worst_c = worst_c.max((purity(&reduce(&c, Subsystem::B)) - 1.0).abs());
            purities_a.push(purity(&reduce(&to_frame_a(&s, t)?, Subsystem::B)));
        }
        let monotone = purities_a.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        let at_2tau = purities_a[4];
        Ok((
            worst_c <= FRAME_C_PURITY_TOL && monotone && at_2tau < FRAME_A_PURITY_AT_2TAU,
            format!(
                "frame C max |1 - purity| {worst_c:.2e}; frame A purity {} (non-increasing: {monotone})",
                purities_a.iter().map(|p| format!("{p:.4}")).collect::<Vec<_>>().join(", ")
            ),
        ))
    })();
    outcome(3, "frame relativity of purity", r)
}

/// Generalized overlap of the conditional states of C equals `|Gamma|`.
pub fn encoding_identity() -> CriterionResult {
    let r = (|| {
        let main = FrameScenario::baseline();
        let s = FrameScenario::new(
            main.params,
            main.psi0_b,
            main.phi0_a,
            MomentumGrid::new(-8.0, 8.0, 64)?,
            MomentumGrid::new(-10.0, 10.0, 128)?,
        )?;
        let tau = scenario_tau(&s, 1.0, 0.0)?;
        let times = linspace(0.0, 3.0 * tau, 13);
        let enc = encoding_curve(&s, 1.0, 0.0, &times)?;
        let mut worst_numeric = 0.0f64;
        let mut worst_closed = 0.0f64;
        for ((&t, g), &b) in times.iter().zip(&enc.curve.gamma).zip(&enc.overlap) {
            worst_numeric = worst_numeric.max((b - g.norm()).abs());
            let closed = gamma_gaussian(s.phi0_a, 1.0, 0.0, &s.params, t).norm();
            worst_closed = worst_closed.max((b - closed).abs());
        }
        Ok((
            worst_numeric <= ENCODING_TOL && worst_closed <= ENCODING_TOL,
            format!("max |B - |G|| {worst_numeric:.2e} (quadrature), {worst_closed:.2e} (closed form)"),
        ))
    })();
    outcome(4, "overlap equals |Gamma|", r)
}

fn max_entry_diff(a: &JointWaveFunction, b: &JointWaveFunction) -> f64 {
    (a.amps() - b.amps()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Equal masses, `psi0 = N(0, 1)` and `phi0 = N(0.5, 1)`, with B on
/// `[-16, 16)` and C on `[-10, 10)`.
pub fn pipeline_scenario() -> Result<FrameScenario> {
    FrameScenario::new(
        PhysicalParams::natural(),
        SystemState::Gaussian(GaussianSpec::new(0.0, 1.0)?),
        GaussianSpec::new(0.5, 1.0)?,
        MomentumGrid::new(-16.0, 16.0, PIPELINE_POINTS)?,
        MomentumGrid::new(-10.0, 10.0, PIPELINE_POINTS)?,
    )
}

/// Frame-A state from the closed-form pipeline against the factor-by-factor
/// frame change of the evolved frame-C state.
pub fn pipeline_consistency() -> CriterionResult {
    let r = (|| {
        let s = pipeline_scenario()?;
        let tau = scenario_tau(&s, 1.0, 0.0)?;
        let mut worst_norm = 0.0f64;
        let mut diffs = Vec::new();
        for k in [0.0, 0.25, 0.5, 1.0, 2.0] {
            let t = k * tau;
            let c = frame_c_state(&s, t)?;
            let direct = to_frame_a(&s, t)?;
            let routed = transform_frame_c_state(&s, t)?;
            for j in [&c, &direct, &routed] {
                worst_norm = worst_norm.max((j.norm_sqr() - 1.0).abs());
            }
            diffs.push((k, max_entry_diff(&direct, &routed)));
        }
        let worst = diffs.iter().map(|d| d.1).fold(0.0, f64::max);
        Ok((
            worst <= PIPELINE_ENTRY_TOL && worst_norm <= NORM_TOL,
            format!(
                "max entry diff {} (tol {PIPELINE_ENTRY_TOL:.0e}); max norm deviation {worst_norm:.1e}",
                diffs
                    .iter()
                    .map(|(k, d)| format!("t={k}tau: {d:.2e}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        ))
    })();
    outcome(5, "pipeline consistency", r)
}

/// The frame-A state at `t = 0` is a product.
pub fn initial_product() -> CriterionResult {
    let r = (|| {
        let s = FrameScenario::baseline();
        let schmidt = schmidt_coefficients(&to_frame_a(&s, 0.0)?);
        let largest = schmidt[0];
        Ok((
            largest >= 1.0 - PRODUCT_SCHMIDT_TOL,
            format!("largest Schmidt coefficient 1 - {:.2e}", 1.0 - largest),
        ))
    })();
    outcome(6, "product state at t = 0", r)
}

/// A hundredfold narrower `phi0` barely decoheres over the original horizon.
pub fn classical_limit() -> CriterionResult {
    let r = (|| {
        let main = FrameScenario::baseline();
        let tau = scenario_tau(&main, 1.0, 0.0)?;
        let phi0 = GaussianSpec::new(main.phi0_a.center, main.phi0_a.width / CLASSICAL_SHRINK)?;
        let s = FrameScenario {
            phi0_a: phi0,
            ..main
        };
        let env_spec = s.environment_spec();
        let env = make_gaussian(spanning_grid(env_spec, GAMMA_ORACLE_POINTS)?, env_spec)?;
        let (mut min_closed, mut min_numeric) = (1.0f64, 1.0f64);
        for t in linspace(0.0, 3.0 * tau, GAMMA_ORACLE_SAMPLES) {
            min_closed = min_closed.min(gamma_gaussian(phi0, 1.0, 0.0, &s.params, t).norm());
            min_numeric = min_numeric.min(gamma_numeric(&env, 1.0, 0.0, &s.params, t)?.norm());
        }
        Ok((
            min_closed >= CLASSICAL_MIN_GAMMA && min_numeric >= CLASSICAL_MIN_GAMMA,
            format!("min |G| over [0, 3tau]: closed {min_closed:.6}, quadrature {min_numeric:.6}"),
        ))
    })();
    outcome(7, "classical limit", r)
}

/// Cat-state closed form, fitted decay time and its single-Gaussian limit.
pub fn cat_state() -> CriterionResult {
    let r = (|| {
        let s = catstate::reference_scenario();
        let SystemState::Cat(cat) = s.psi0_b else {
            unreachable!("reference scenario holds a cat state")
        };
        let (p, phi0) = (s.params, s.phi0_a);
        let (dg, db, m) = (phi0.width, cat.width, p.m_c);
        let formula = tau_tilde(1.0, dg, db, m, p.hbar)?;
        let literal = 2.0 * p.hbar * m * (dg * dg + db * db).sqrt() / (dg * db);
        let times = linspace(0.0, 3.0 * formula, 31);
        let pairs = [
            (cat.beta, cat.beta),
            (cat.beta, cat.beta_prime),
            (cat.beta_prime, cat.beta),
            (cat.beta_prime, cat.beta_prime),
        ];
        let mut worst = 0.0f64;
        let mut cross = Vec::new();
        for &branch in &pairs {
            for &t in &times {
                let closed = cat_gamma_closed(cat, phi0, 1.0, 0.0, branch, &p, t)?.total;
                let numeric = cat_gamma_numeric(cat, phi0, 1.0, 0.0, branch, &p, t)?;
                worst = worst.max((closed.norm() - numeric.norm()).abs() / numeric.norm());
                if branch == (cat.beta, cat.beta_prime) {
                    cross.push(numeric.norm());
                }
            }
        }
        let fitted = fit_decay_time(&times, &cross)?;
        let fit_err = (fitted / formula - 1.0).abs();
        let tau = decoherence_time(1.0, 0.0, dg, m, p.hbar)?;
        let limit_err = (tau_tilde(1.0, dg, f64::INFINITY, m, p.hbar)? - tau).abs() / tau;
        let formula_err = (formula / literal - 1.0).abs();
        Ok((
            worst <= CAT_REL_TOL && fit_err <= CAT_FIT_REL_TOL && limit_err <= CAT_LIMIT_TOL && formula_err <= 1e-12,
            format!(
                "max rel err {worst:.2e}; fitted tau~ {fitted:.6} vs {formula:.6} ({fit_err:.1e}); wide-cat limit err {limit_err:.1e}"
            ),
        ))
    })();
    outcome(8, "cat-state decoherence", r)
}

/// A cat state with distinct branches is entangled with C at `t = 0`.
pub fn cat_initial_entanglement() -> CriterionResult {
    let r = (|| {
        let s = catstate::reference_scenario();
        let rho = cat_reduced_b(&s, 0.0)?;
        let p = purity(&rho);
        Ok((p < 1.0 - 1e-9, format!("purity of B at t = 0: {p:.6}")))
    })();
    outcome(9, "cat initial entanglement", r)
}

/// Broadcast structure forms in frame A by `5 tau` and never in frame C.
pub fn sbs_formation() -> CriterionResult {
    let r = (|| {
        let s = SbsScenario::reference();
        let binning = PointerBinning::new(REFERENCE_BIN_EDGES.to_vec())?;
        let th = Thresholds::default();
        let tau = scenario_tau(&s.frame, 1.0, 0.0)?;
        let a = sbs_report(&build_bc1(&s, SBS_TIME_IN_TAU * tau)?, &binning, th)?;
        let mut c_flags = Vec::new();
        for k in [0.0, 1.0, 3.0, SBS_TIME_IN_TAU] {
            c_flags.push(sbs_report(&build_bc1_frame_c(&s, k * tau)?, &binning, th)?.sbs_ok);
        }
        let any_c = c_flags.iter().any(|&f| f);
        Ok((
            a.sbs_ok && a.coherence_ratio <= th.coh_max && a.max_overlap() <= th.overlap_max && !any_c,
            format!(
                "frame A at 5tau: coherence {:.2e}, overlap {:.2e}, sbs_ok {}; frame C sbs_ok at 0,1,3,5 tau: {:?}",
                a.coherence_ratio,
                a.max_overlap(),
                a.sbs_ok,
                c_flags
            ),
        ))
    })();
    outcome(10, "SBS formation", r)
}

/// The built-in figure follows `exp(-(t/tau)^2)` and is byte-stable.
pub fn fig2_reproduction() -> CriterionResult {
    let (passed, detail) = match (run_scenario(&fig2_scenario()), run_scenario(&fig2_scenario())) {
        (Ok(a), Ok(b)) => {
            let stable = a.files() == b.files();
            match fig2_deviation(&a.artifact("fig2.csv").expect("main table").bytes) {
                Ok((closed, numeric, overlap, last)) => (
                    stable && closed <= FIG2_CLOSED_TOL && numeric <= FIG2_NUMERIC_TOL && overlap <= ENCODING_TOL,
                    format!(
                        "max dev from exp(-(t/tau)^2): closed {closed:.1e}, quadrature {numeric:.1e}, overlap {overlap:.1e}; |G(3tau)| {last:.2e}; byte-stable {stable}"
                    ),
                ),
                Err(e) => (false, format!("unreadable output: {e}")),
            }
        }
        (Err(e), _) | (_, Err(e)) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id: 11,
        name: "figure reproduction",
        passed,
        detail,
    }
}

/// Largest deviations of the closed-form, quadrature and overlap columns from
/// `exp(-(t/tau)^2)`, and the last modulus.
fn fig2_deviation(csv_bytes: &[u8]) -> std::result::Result<(f64, f64, f64, f64), String> {
    let mut reader = csv::Reader::from_reader(csv_bytes);
    let header = reader.headers().map_err(|e| e.to_string())?.clone();
    let col = |name: &str| header.iter().position(|h| h == name).ok_or(format!("no column {name}"));
    let (it, ia, ian, iov) = (col("t")?, col("abs_gamma")?, col("abs_gamma_numeric")?, col("generalized_overlap")?);
    let (mut d_closed, mut d_numeric, mut d_overlap, mut last) = (0.0f64, 0.0f64, 0.0f64, 1.0);
    for rec in reader.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let get = |i: usize| rec[i].parse::<f64>().map_err(|e| e.to_string());
        let expected = (-get(it)?.powi(2)).exp();
        d_closed = d_closed.max((get(ia)? - expected).abs());
        d_numeric = d_numeric.max((get(ian)? - expected).abs());
        d_overlap = d_overlap.max((get(iov)? - expected).abs());
        last = get(ia)?;
    }
    Ok((d_closed, d_numeric, d_overlap, last))
}

/// Every check in order.
pub fn checks() -> Vec<fn() -> CriterionResult> {
    vec![
        gamma_oracle,
        timescale,
        frame_relativity,
        encoding_identity,
        pipeline_consistency,
        initial_product,
        classical_limit,
        cat_state,
        cat_initial_entanglement,
        sbs_formation,
        fig2_reproduction,
    ]
}

pub fn run_all() -> Vec<CriterionResult> {
    checks().into_iter().map(|f| f()).collect()
}
