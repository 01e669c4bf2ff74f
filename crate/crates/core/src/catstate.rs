//! Decoherence of a momentum cat state of B.
//!
//! With `psi0 ∝ exp(-(p - beta)^2 / 2D_b^2) + exp(-(p - beta')^2 / 2D_b^2)`
//! the sheared amplitude `psi0(pi_B - (m_B/m_C) pi_C)` splits into one
//! Gaussian per branch, and the reduced state of B becomes a sum over branch
//! pairs `(b1, b2)` weighted by the overlap of the branch-dependent
//! environment states:
//!
//! ```text
//! G(pi, pi', b1, b2, t) = ∫ du exp(-i (pi - pi') u t / (hbar m_C))
//!                            exp((pi + pi' - b1 - b2) c u / D_b - c^2 u^2) |phi_C(u)|^2
//! ```
//!
//! with `c = m_B / (m_C D_b)`. For equal masses the integral is Gaussian and
//! splits into a branch-independent factor and a branch factor.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::frames::{FrameScenario, SystemState};
use crate::states::{CatSpec, DensityMatrix, GaussianSpec, MomentumGrid, PhysicalParams};
use crate::{Error, Result, C64};

/// Largest exponent accepted before the integrand is declared out of range.
pub const MAX_LOG_MAGNITUDE: f64 = 700.0;

/// Reference cat setup in natural units with equal masses: branches at
/// `+-2` of width 1 for B, `phi0 = N(0.5, 1)` for A, B on 512 points of
/// `[-18, 18)` and C on 512 points of `[-10, 10)`. For `pi = 1`, `pi' = 0`
/// the decay time is `tau~ = 2 sqrt(2)`.
pub fn reference_scenario() -> FrameScenario {
    FrameScenario::new(
        PhysicalParams::natural(),
        SystemState::Cat(CatSpec::new(2.0, -2.0, 1.0).expect("valid spec")),
        GaussianSpec::new(0.5, 1.0).expect("valid spec"),
        MomentumGrid::new(-18.0, 18.0, 512).expect("valid grid"),
        MomentumGrid::new(-10.0, 10.0, 512).expect("valid grid"),
    )
    .expect("reference cat scenario fits its grids")
}

/// Closed-form decoherence factor for one branch pair, split as
/// `total = gamma_pi * gamma_branch`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatGammaParts {
    pub gamma_pi: C64,
    pub gamma_branch: C64,
    pub total: C64,
    pub tau_tilde: f64,
}

/// Frame-A environment profile for A's initial state `phi0`.
fn environment(phi0: GaussianSpec, params: &PhysicalParams) -> GaussianSpec {
    let r = params.m_a / params.m_c;
    GaussianSpec {
        center: -phi0.center / r,
        width: phi0.width / r,
    }
}

/// Branch-pair decoherence factor by quadrature on a grid fitted to the
/// integrand.
///
/// The real exponent `L u - c^2 u^2 - (u - u_C)^2 / w^2` is handled in log
/// space around its maximum; the oscillation `exp(-i omega u)` is resolved
/// by choosing the step from both the envelope width and `omega`.
pub fn cat_gamma_numeric(
    cat: CatSpec,
    phi0: GaussianSpec,
    pi_b: f64,
    pi_b_prime: f64,
    branch: (f64, f64),
    params: &PhysicalParams,
    t: f64,
) -> Result<C64> {
    let env = environment(phi0, params);
    let ratio = params.m_b / params.m_c;
    let db2 = cat.width * cat.width;
    let w2 = env.width * env.width;
    let c2 = ratio * ratio / db2;
    let lin = (pi_b + pi_b_prime - branch.0 - branch.1) * ratio / db2;
    let omega = (pi_b - pi_b_prime) * t / (params.hbar * params.m_c);

    let curvature = c2 + 1.0 / w2;
    let peak_u = (lin + 2.0 * env.center / w2) / (2.0 * curvature);
    let log_weight = |u: f64| {
        lin * u - c2 * u * u - (u - env.center).powi(2) / w2 - (PI.sqrt() * env.width).ln()
    };
    let peak = log_weight(peak_u);
    if !peak.is_finite() || peak > MAX_LOG_MAGNITUDE {
        return Err(Error::ParameterRegime(format!(
            "cat integrand peaks at exp({peak:.3e}); the linear term overwhelms the envelope"
        )));
    }

    let sd = (0.5 / curvature).sqrt();
    let half_span = 14.0 * sd;
    let step_limit = 2.0 * PI / (omega.abs() + 14.0 / sd);
    let n = ((2.0 * half_span / step_limit).ceil() as usize).max(2048);
    if n > 1 << 24 {
        return Err(Error::ParameterRegime(format!(
            "cat quadrature would need {n} points"
        )));
    }
    let du = 2.0 * half_span / n as f64;
    let start = peak_u - half_span;
    let sum: C64 = (0..=n)
        .map(|k| {
            let u = start + k as f64 * du;
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            C64::from_polar(w * (log_weight(u) - peak).exp(), -omega * u)
        })
        .sum();
    Ok(sum * du * peak.exp())
}

fn require_equal_masses(params: &PhysicalParams) -> Result<f64> {
    if !params.equal_masses() {
        return Err(Error::ParameterRegime(
            "the split closed form assumes m_A = m_B = m_C".into(),
        ));
    }
    Ok(params.m_c)
}

/// `tau~ = 2 hbar m sqrt(D_g^2 + D_b^2) / (|dpi| D_g D_b)`, written so that
/// `D_b = infinity` gives the single-Gaussian `2 hbar m / (|dpi| D_g)`.
pub fn tau_tilde(delta_pi: f64, delta_gamma0: f64, delta_beta0: f64, m: f64, hbar: f64) -> Result<f64> {
    if delta_pi == 0.0 {
        return Err(Error::NoDecoherence(
            "equal system momenta never decohere".into(),
        ));
    }
    if delta_gamma0 <= 0.0 || delta_beta0 <= 0.0 {
        return Err(Error::NoDecoherence("vanishing width gives tau~ = infinity".into()));
    }
    let base = 2.0 * hbar * m / (delta_pi.abs() * delta_gamma0);
    Ok(base * (1.0 + (delta_gamma0 / delta_beta0).powi(2)).sqrt())
}

/// Closed-form branch-pair decoherence factor for equal masses.
///
/// With `K = D_g^2 D_b^2 / (4 (D_g^2 + D_b^2))`, `S = pi + pi'`,
/// `b = b1 + b2` and `w = (pi - pi') t / (hbar m)`:
///
/// ```text
/// ln G_pi(t)     = ln sqrt(D_b^2 / (D_b^2 + D_g^2)) - g0^2 / (D_g^2 + D_b^2)
///                  + K (S^2 / D_b^4 - 4 g0 S / (D_g^2 D_b^2))
///                  + K (-w^2 - 2 i w (S / D_b^2 - 2 g0 / D_g^2))
/// ln G_branch(t) = K (b^2 / D_b^4 - 2 S b / D_b^4 + 4 g0 b / (D_g^2 D_b^2))
///                  + i D_g^2 b w / (2 (D_g^2 + D_b^2))
/// ```
pub fn cat_gamma_closed(
    cat: CatSpec,
    phi0: GaussianSpec,
    pi_b: f64,
    pi_b_prime: f64,
    branch: (f64, f64),
    params: &PhysicalParams,
    t: f64,
) -> Result<CatGammaParts> {
    let m = require_equal_masses(params)?;
    let (g0, dg, db) = (phi0.center, phi0.width, cat.width);
    let (dg2, db2) = (dg * dg, db * db);
    let k = dg2 * db2 / (4.0 * (dg2 + db2));
    let s = pi_b + pi_b_prime;
    let b = branch.0 + branch.1;
    let w = (pi_b - pi_b_prime) * t / (params.hbar * m);

    let ln_pi0 = 0.5 * (db2 / (db2 + dg2)).ln() - g0 * g0 / (dg2 + db2)
        + k * (s * s / (db2 * db2) - 4.0 * g0 * s / (dg2 * db2));
    let ln_pi = C64::new(ln_pi0 - k * w * w, -2.0 * k * w * (s / db2 - 2.0 * g0 / dg2));
    let ln_branch = C64::new(
        k * (b * b / (db2 * db2) - 2.0 * s * b / (db2 * db2) + 4.0 * g0 * b / (dg2 * db2)),
        dg2 * b * w / (2.0 * (dg2 + db2)),
    );
    let gamma_pi = ln_pi.exp();
    let gamma_branch = ln_branch.exp();
    Ok(CatGammaParts {
        gamma_pi,
        gamma_branch,
        total: gamma_pi * gamma_branch,
        tau_tilde: tau_tilde(pi_b - pi_b_prime, dg, db, m, params.hbar).unwrap_or(f64::INFINITY),
    })
}

/// Literal transcription of the commonly quoted split form (equal masses).
///
/// It differs from [`cat_gamma_closed`] in the square-root prefactor, the
/// power of `D_b` under `S^2`, the `g0^2` term and the signs of the `g0`
/// cross terms, so only its time dependence `exp(-(t/tau~)^2)` agrees with
/// quadrature. Kept for comparison.
pub fn cat_gamma_literal(
    cat: CatSpec,
    phi0: GaussianSpec,
    pi_b: f64,
    pi_b_prime: f64,
    branch: (f64, f64),
    params: &PhysicalParams,
    t: f64,
) -> Result<CatGammaParts> {
    let m = require_equal_masses(params)?;
    let (g0, dg, db) = (phi0.center, phi0.width, cat.width);
    let (dg2, db2) = (dg * dg, db * db);
    let k = dg2 * db2 / (4.0 * (dg2 + db2));
    let s = pi_b + pi_b_prime;
    let b = branch.0 + branch.1;
    let dpi = pi_b - pi_b_prime;
    let hm = params.hbar * m;

    let ln_pi0 = 0.5 * (dg2 / (db2 + dg2)).ln()
        + k * (4.0 * g0 * s / (dg2 * db2) + s * s / db2 - 4.0 * g0 * g0 / (dg2 * db2));
    let ln_pi = C64::new(
        ln_pi0 - k * dpi * dpi * t * t / (hm * hm),
        -2.0 * k * dpi * t / hm * (2.0 * g0 / dg2 + s / db2),
    );
    let ln_branch = C64::new(
        k * (-4.0 * g0 * b / (dg2 * db2) + (b / db2).powi(2) - 2.0 * b / db2 * s),
        dg2 * dpi * b * t / (2.0 * hm * (dg2 + db2)),
    );
    let gamma_pi = ln_pi.exp();
    let gamma_branch = ln_branch.exp();
    Ok(CatGammaParts {
        gamma_pi,
        gamma_branch,
        total: gamma_pi * gamma_branch,
        tau_tilde: tau_tilde(dpi, dg, db, m, params.hbar).unwrap_or(f64::INFINITY),
    })
}

/// Fit `ln|G(t)| = a - t^2 / tau^2` by least squares and return `tau`.
pub fn fit_decay_time(times: &[f64], moduli: &[f64]) -> Result<f64> {
    if times.len() != moduli.len() || times.len() < 2 {
        return Err(Error::DimensionMismatch(
            "decay fit needs at least two matching samples".into(),
        ));
    }
    let xs: Vec<f64> = times.iter().map(|t| t * t).collect();
    let ys: Vec<f64> = moduli
        .iter()
        .map(|&m| {
            if m > 0.0 {
                Ok(m.ln())
            } else {
                Err(Error::Invariant("decay fit needs positive moduli".into()))
            }
        })
        .collect::<Result<_>>()?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::DimensionMismatch("decay fit needs distinct times".into()));
    }
    let slope = sxy / sxx;
    if slope >= 0.0 {
        return Err(Error::NoDecoherence(format!("fitted slope {slope} does not decay")));
    }
    Ok((-1.0 / slope).sqrt())
}

fn cat_spec(scenario: &FrameScenario) -> Result<CatSpec> {
    match scenario.psi0_b {
        SystemState::Cat(c) => Ok(c),
        SystemState::Gaussian(_) => Err(Error::Config(
            "cat reduced state needs a cat state for B".into(),
        )),
    }
}

/// Reduced state of B for a cat `psi0` in frame A.
///
/// `rho = N^-1 sum_{b1, b2} G(., ., b1, b2, t) psi_b1 psi_b2^*` times the free
/// phase of B. Each branch-pair kernel is a quadrature over the environment
/// grid, evaluated for all pairs of B momenta at once as `E_b1 W E_b2^dagger`
/// with `E_b[i, u] = psi_b(p_i - (m_B/m_C) u) exp(-i u p_i t / (hbar m_C))`;
/// the Gaussian envelope and the linear branch term are combined before
/// exponentiation.
pub fn cat_reduced_b(scenario: &FrameScenario, t: f64) -> Result<DensityMatrix> {
    let cat = cat_spec(scenario)?;
    let p = &scenario.params;
    let grid_b = scenario.grid_b;
    let env = scenario.environment_state()?;
    let grid_c = *env.grid();
    let ratio = p.m_b / p.m_c;
    let db2 = cat.width * cat.width;

    let weights: Vec<f64> = env.amps().iter().map(|a| a.norm_sqr()).collect();
    let branch_factor = |beta: f64| {
        DMatrix::from_fn(grid_b.n(), grid_c.n(), |i, j| {
            let (pb, u) = (grid_b.point(i), grid_c.point(j));
            let envelope = (-(pb - beta - ratio * u).powi(2) / (2.0 * db2)).exp();
            C64::from_polar(envelope * weights[j].sqrt(), -u * pb * t / (p.hbar * p.m_c))
        })
    };
    let factors = [branch_factor(cat.beta), branch_factor(cat.beta_prime)];

    let mut elems = DMatrix::zeros(grid_b.n(), grid_b.n());
    for e1 in &factors {
        for e2 in &factors {
            elems += e1 * e2.adjoint();
        }
    }
    let scale = grid_b.dp() / cat.norm();
    let free: Vec<C64> = grid_b
        .points()
        .iter()
        .map(|q| C64::from_polar(1.0, -q * q * t / (2.0 * p.m_b * p.hbar)))
        .collect();
    let elems = DMatrix::from_fn(grid_b.n(), grid_b.n(), |i, j| {
        elems[(i, j)] * scale * free[i] * free[j].conj()
    });
    DensityMatrix::new(grid_b, elems)
}
