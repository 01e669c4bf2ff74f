//! The frame change from C's quantum reference frame to A's.
//!
//! In frame C particles A and B are free and uncorrelated. The generalized
//! Galilean transform swaps A for C (reversing and mass-rescaling the
//! velocity) and boosts B by the velocity of the reference particle, which is
//! now an operator. Written in C's momentum basis the boost is a column-wise
//! operation on the `B x C` amplitude matrix: a B-momentum phase, a momentum
//! translation of B and a scalar phase, all controlled by `pi_C`.

use nalgebra::DMatrix;

use crate::fourier::MomentumShifter;
use crate::states::{
    make_cat, make_gaussian, product, CatSpec, GaussianSpec, JointWaveFunction, MomentumGrid,
    PhysicalParams, WaveFunction,
};
use crate::{Error, Result, C64};

/// Initial state of B in frame C.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemState {
    Gaussian(GaussianSpec),
    Cat(CatSpec),
}

impl SystemState {
    pub fn amplitude(&self, p: f64) -> f64 {
        match self {
            SystemState::Gaussian(g) => g.amplitude(p),
            SystemState::Cat(c) => c.amplitude(p),
        }
    }

    pub fn sample(&self, grid: MomentumGrid) -> Result<WaveFunction> {
        match *self {
            SystemState::Gaussian(g) => make_gaussian(grid, g),
            SystemState::Cat(c) => make_cat(grid, c),
        }
    }
}

/// `|phi0>_A (x) |psi0>_B` in frame C, with the grids used to represent B and
/// C in frame A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameScenario {
    pub params: PhysicalParams,
    pub psi0_b: SystemState,
    /// State of A in frame C; becomes the state of C in frame A.
    pub phi0_a: GaussianSpec,
    pub grid_b: MomentumGrid,
    pub grid_c: MomentumGrid,
}

impl FrameScenario {
    /// Build a scenario and check that both initial states fit their grids.
    pub fn new(
        params: PhysicalParams,
        psi0_b: SystemState,
        phi0_a: GaussianSpec,
        grid_b: MomentumGrid,
        grid_c: MomentumGrid,
    ) -> Result<Self> {
        let scenario = Self {
            params,
            psi0_b,
            phi0_a,
            grid_b,
            grid_c,
        };
        scenario.system_state()?;
        scenario.environment_state()?;
        Ok(scenario)
    }

    /// Natural units, `m_A = m_C = 1`, `psi0 = N(0, 1)`, `phi0 = N(0.5, 1)`,
    /// 512-point grids on `[-10, 10)`.
    ///
    /// `m_B = 1e-6` keeps the static momentum shear `(m_B/m_C) pi_C` far
    /// below the width of `psi0`, which is the regime where the reduced state
    /// of B is given by the Gaussian decoherence factor alone. With
    /// `Delta pi = 1` the decoherence time is `tau = 2`.
    pub fn baseline() -> Self {
        let params = PhysicalParams {
            m_b: 1e-6,
            ..PhysicalParams::natural()
        };
        let grid = MomentumGrid::new(-10.0, 10.0, 512).expect("valid grid");
        Self::new(
            params,
            SystemState::Gaussian(GaussianSpec::new(0.0, 1.0).expect("valid spec")),
            GaussianSpec::new(0.5, 1.0).expect("valid spec"),
            grid,
            grid,
        )
        .expect("baseline scenario fits its grids")
    }

    /// `psi0` sampled on the B grid.
    pub fn system_state(&self) -> Result<WaveFunction> {
        self.psi0_b.sample(self.grid_b)
    }

    /// Ratio `m_A / m_C` by which the swap rescales momenta.
    fn dilation(&self) -> f64 {
        self.params.m_a / self.params.m_c
    }

    /// Continuum profile of C in frame A:
    /// `sqrt(m_A/m_C) phi0(-(m_A/m_C) pi_C)`, a Gaussian centred at
    /// `-gamma0 m_C/m_A` with width `Delta m_C/m_A`.
    pub fn environment_spec(&self) -> GaussianSpec {
        let r = self.dilation();
        GaussianSpec {
            center: -self.phi0_a.center / r,
            width: self.phi0_a.width / r,
        }
    }

    /// State of C in frame A at t = 0, re-sampled analytically from `phi0`.
    pub fn environment_state(&self) -> Result<WaveFunction> {
        let r = self.dilation();
        let spec = self.phi0_a;
        WaveFunction::sample(self.grid_c, |p| C64::new(r.sqrt() * spec.amplitude(-r * p), 0.0))
    }

    /// Momentum grid of A in frame C that the swap maps index-reversed onto
    /// the C grid: `p_A[k] = -(m_A/m_C) pi_C[n - 1 - k]`.
    pub fn frame_c_grid_a(&self) -> Result<MomentumGrid> {
        let r = self.dilation();
        let g = self.grid_c;
        let dp = g.dp();
        MomentumGrid::new(-r * (g.p_min() + (g.n() - 1) as f64 * dp), r * (dp - g.p_min()), g.n())
    }
}

/// `|Psi_0^(A)> = psi0(pi_B) |pi_B> (x) sqrt(m_A/m_C) phi0(-(m_A/m_C) pi_C) |pi_C>`.
pub fn parity_swap_velocity(scenario: &FrameScenario) -> Result<JointWaveFunction> {
    let b = scenario.system_state()?;
    let c = scenario.environment_state()?;
    Ok(product(&b, &c))
}

pub(crate) fn free_phases(grid: &MomentumGrid, mass: f64, hbar: f64, t: f64) -> Vec<C64> {
    grid.points()
        .iter()
        .map(|p| C64::from_polar(1.0, -p * p * t / (2.0 * mass * hbar)))
        .collect()
}

/// `exp(-i t (pi_B^2/2m_B + pi_C^2/2m_C) / hbar)`, diagonal in momentum.
pub fn evolve_free(joint: &JointWaveFunction, params: &PhysicalParams, t: f64) -> JointWaveFunction {
    let pb = free_phases(joint.grid_b(), params.m_b, params.hbar, t);
    let pc = free_phases(joint.grid_c(), params.m_c, params.hbar, t);
    let amps = DMatrix::from_fn(pb.len(), pc.len(), |i, j| joint.amps()[(i, j)] * pb[i] * pc[j]);
    JointWaveFunction::from_unitary_image(*joint.grid_b(), *joint.grid_c(), amps)
}

/// Free evolution of a single particle of mass `mass`.
pub fn evolve_free_single(wf: &WaveFunction, mass: f64, hbar: f64, t: f64) -> WaveFunction {
    let phases = free_phases(wf.grid(), mass, hbar, t);
    wf.map_amps(|i, a| a * phases[i])
}

/// `exp(-(i/hbar) kappa (p_B t - m_B x_B))` on one B column, in the order
/// momentum phase, momentum translation by `m_B kappa`, scalar phase
/// `exp(-(i/hbar) m_B kappa^2 t / 2)`.
fn apply_boost(
    col: &mut [C64],
    grid_b: &MomentumGrid,
    kappa: f64,
    m_b: f64,
    hbar: f64,
    t: f64,
    shifter: &mut MomentumShifter,
) -> Result<()> {
    if t != 0.0 {
        for (i, a) in col.iter_mut().enumerate() {
            *a *= C64::from_polar(1.0, -kappa * grid_b.point(i) * t / hbar);
        }
    }
    shifter.shift(col, m_b * kappa)?;
    if t != 0.0 {
        let scalar = C64::from_polar(1.0, -m_b * kappa * kappa * t / (2.0 * hbar));
        for a in col.iter_mut() {
            *a *= scalar;
        }
    }
    Ok(())
}

/// Apply a boost to every column, with `kappa` given per column index.
pub(crate) fn boost_columns(
    amps: &mut DMatrix<C64>,
    grid_b: &MomentumGrid,
    params: &PhysicalParams,
    t: f64,
    kappa: impl Fn(usize) -> f64,
) -> Result<()> {
    let n_b = grid_b.n();
    let mut shifter = MomentumShifter::new(grid_b);
    for (j, col) in amps.as_mut_slice().chunks_mut(n_b).enumerate() {
        apply_boost(col, grid_b, kappa(j), params.m_b, params.hbar, t, &mut shifter)?;
    }
    Ok(())
}

/// The controlled Galilean coupling `exp(-(i/hbar)(pi_C/m_C) G_B)` with
/// `G_B = p_B t - m_B x_B`.
pub fn galilean_coupling(
    joint: &JointWaveFunction,
    params: &PhysicalParams,
    t: f64,
) -> Result<JointWaveFunction> {
    if t < 0.0 {
        return Err(Error::Config(format!("time must be non-negative, got {t}")));
    }
    let grid_c = *joint.grid_c();
    let mut amps = joint.amps().clone();
    boost_columns(&mut amps, joint.grid_b(), params, t, |j| grid_c.point(j) / params.m_c)?;
    let out = JointWaveFunction::from_unitary_image(*joint.grid_b(), grid_c, amps);
    out.check_edge_guard("galilean coupling")?;
    Ok(out)
}

/// The state in frame A at time `t`:
/// `exp(-i H_BC t/hbar) exp(-(i/hbar)(pi_C/m_C) G_B) |Psi_0^(A)>`.
pub fn to_frame_a(scenario: &FrameScenario, t: f64) -> Result<JointWaveFunction> {
    let initial = parity_swap_velocity(scenario)?;
    let coupled = galilean_coupling(&initial, &scenario.params, t)?;
    Ok(evolve_free(&coupled, &scenario.params, t))
}

/// `|phi_{pi_B}(t)>`: the state of C conditioned on B having momentum `pi_B`,
/// `exp(-i pi_C^2 t / 2 m_C hbar) exp(-i (pi_B/m_C) pi_C t / hbar)` applied to
/// the frame-A environment state.
pub fn conditional_env_state(scenario: &FrameScenario, pi_b: f64, t: f64) -> Result<WaveFunction> {
    if scenario.grid_b.index_of(pi_b).is_none() {
        return Err(Error::OffGrid(pi_b));
    }
    let env = scenario.environment_state()?;
    Ok(conditional_state(&env, pi_b, &scenario.params, t))
}

/// Conditional environment state built from an explicit C state.
pub fn conditional_state(env: &WaveFunction, pi_b: f64, params: &PhysicalParams, t: f64) -> WaveFunction {
    let grid = *env.grid();
    let (m, hbar) = (params.m_c, params.hbar);
    env.map_amps(|j, a| {
        let p = grid.point(j);
        a * C64::from_polar(1.0, -(p * p / (2.0 * m) + pi_b * p / m) * t / hbar)
    })
}

/// Frame-C state at time `t`: B (rows) and A (columns, on
/// [`FrameScenario::frame_c_grid_a`]) evolving freely from a product.
pub fn frame_c_state(scenario: &FrameScenario, t: f64) -> Result<JointWaveFunction> {
    let p = &scenario.params;
    let b = evolve_free_single(&scenario.system_state()?, p.m_b, p.hbar, t);
    let a = make_gaussian(scenario.frame_c_grid_a()?, scenario.phi0_a)?;
    let a = evolve_free_single(&a, p.m_a, p.hbar, t);
    Ok(product(&b, &a))
}

/// Apply the frame-change unitary factor by factor to the frame-C evolved
/// state: `exp(-i pi_C^2 t/2m_C) P_AC^(v) exp((i/hbar)(p_A/m_A) G_B) exp(i p_A^2 t/2m_A)`.
pub fn transform_frame_c_state(scenario: &FrameScenario, t: f64) -> Result<JointWaveFunction> {
    if t < 0.0 {
        return Err(Error::Config(format!("time must be non-negative, got {t}")));
    }
    let p = &scenario.params;
    let grid_a = scenario.frame_c_grid_a()?;
    let grid_b = scenario.grid_b;
    let grid_c = scenario.grid_c;
    let n_c = grid_c.n();

    let mut amps = frame_c_state(scenario, t)?.into_amps();
    // exp(+i p_A^2 t / 2 m_A hbar)
    let undo_a: Vec<C64> = free_phases(&grid_a, p.m_a, p.hbar, t).iter().map(|z| z.conj()).collect();
    for (j, col) in amps.as_mut_slice().chunks_mut(grid_b.n()).enumerate() {
        for a in col.iter_mut() {
            *a *= undo_a[j];
        }
    }
    // exp((i/hbar)(p_A/m_A) G_B) = exp(-(i/hbar) kappa G_B) with kappa = -p_A/m_A
    boost_columns(&mut amps, &grid_b, p, t, |j| -grid_a.point(j) / p.m_a)?;
    // Velocity parity swap: A column n-1-j becomes C column j.
    let c_phases = free_phases(&grid_c, p.m_c, p.hbar, t);
    let swapped = DMatrix::from_fn(grid_b.n(), n_c, |i, j| amps[(i, n_c - 1 - j)] * c_phases[j]);
    let out = JointWaveFunction::from_unitary_image(grid_b, grid_c, swapped);
    out.check_edge_guard("frame-C transform")?;
    Ok(out)
}
