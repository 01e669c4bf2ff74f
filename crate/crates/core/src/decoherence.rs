//! Decoherence factor, decoherence time, reduced states assembled from a
//! kernel, and the generalized overlap used to quantify information encoding.
//!
//! `Gamma(pi, pi', t) = <phi_{pi'}(t)|phi_{pi}(t)>` is the overlap of the
//! environment states conditioned on two system momenta. For the frame-A
//! environment state it reduces to a Fourier transform of `|phi_C|^2`:
//!
//! ```text
//! Gamma = sum_j |phi_C(pi_j)|^2 exp(-i (pi_j / m_C) (pi - pi') t / hbar)
//! ```

use nalgebra::DMatrix;

use crate::frames::{conditional_state, FrameScenario};
use crate::linalg::{nuclear_norm, psd_sqrt};
use crate::states::{DensityMatrix, GaussianSpec, MomentumGrid, PhysicalParams, WaveFunction};
use crate::{Error, Result, C64};

/// How a curve was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Numeric,
    ClosedForm,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Numeric => "numeric",
            Provenance::ClosedForm => "closed_form",
        }
    }
}

/// Time-sampled decoherence factor for one pair of system momenta.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceCurve {
    pub times: Vec<f64>,
    pub gamma: Vec<C64>,
    /// Gaussian decay time; infinite when the pair does not decohere.
    pub tau: f64,
    pub label: Provenance,
}

impl DecoherenceCurve {
    pub fn moduli(&self) -> Vec<f64> {
        self.gamma.iter().map(|g| g.norm()).collect()
    }
}

/// Grid quadrature of the decoherence factor for a frame-A environment state.
pub fn gamma_numeric(
    phi0_c: &WaveFunction,
    pi_b: f64,
    pi_b_prime: f64,
    params: &PhysicalParams,
    t: f64,
) -> Result<C64> {
    phi0_c.check_edge_guard("decoherence factor")?;
    Ok(gamma_sum(phi0_c, pi_b - pi_b_prime, params, t))
}

fn gamma_sum(phi0_c: &WaveFunction, delta_pi: f64, params: &PhysicalParams, t: f64) -> C64 {
    if delta_pi == 0.0 || t == 0.0 {
        return C64::new(phi0_c.norm_sqr(), 0.0);
    }
    let grid = phi0_c.grid();
    let rate = delta_pi * t / (params.m_c * params.hbar);
    phi0_c
        .amps()
        .iter()
        .enumerate()
        .map(|(j, a)| a.norm_sqr() * C64::from_polar(1.0, -rate * grid.point(j)))
        .sum()
}

/// [`gamma_numeric`] on an analytic environment profile sampled on `grid`
/// refined `factor` times.
pub fn gamma_numeric_refined(
    env: GaussianSpec,
    grid: &MomentumGrid,
    factor: usize,
    pi_b: f64,
    pi_b_prime: f64,
    params: &PhysicalParams,
    t: f64,
) -> Result<C64> {
    let fine = crate::states::make_gaussian(grid.refined(factor)?, env)?;
    gamma_numeric(&fine, pi_b, pi_b_prime, params, t)
}

/// `tau = 2 hbar m_C / (|pi - pi'| Delta)`.
pub fn decoherence_time(
    pi_b: f64,
    pi_b_prime: f64,
    delta_gamma0: f64,
    m_c: f64,
    hbar: f64,
) -> Result<f64> {
    let delta_pi = (pi_b - pi_b_prime).abs();
    if delta_pi == 0.0 {
        return Err(Error::NoDecoherence(
            "equal system momenta never decohere".into(),
        ));
    }
    if delta_gamma0 <= 0.0 {
        return Err(Error::NoDecoherence(
            "a sharp reference momentum gives tau = infinity".into(),
        ));
    }
    Ok(2.0 * hbar * m_c / (delta_pi * delta_gamma0))
}

/// The momentum-difference independent factor `2 hbar m_C / Delta`, so that
/// `|Gamma| = exp(-(pi - pi')^2 (t / tau_dec)^2)`.
pub fn decoherence_time_scale(delta_gamma0: f64, m_c: f64, hbar: f64) -> Result<f64> {
    decoherence_time(1.0, 0.0, delta_gamma0, m_c, hbar)
}

/// Decay time of a pair in the scenario: the frame-A environment width is
/// `Delta m_C / m_A`.
pub fn scenario_tau(scenario: &FrameScenario, pi_b: f64, pi_b_prime: f64) -> Result<f64> {
    let env = scenario.environment_spec();
    decoherence_time(pi_b, pi_b_prime, env.width, scenario.params.m_c, scenario.params.hbar)
}

/// Closed form of the decoherence factor for a Gaussian `phi0` of A in frame C.
///
/// With `r = m_A / m_C` the frame-A environment is a Gaussian centred at
/// `-gamma0 / r` with width `Delta / r`, so
/// `Gamma = exp(-(t/tau)^2) exp(+i gamma0 (pi - pi') t / (hbar m_A))`.
/// For `m_A = m_C` the phase has the opposite sign to the commonly quoted
/// `exp(-i gamma0 (pi - pi') t / (hbar m_C))`; the sign here is the one the
/// quadrature produces.
pub fn gamma_gaussian(
    phi0: GaussianSpec,
    pi_b: f64,
    pi_b_prime: f64,
    params: &PhysicalParams,
    t: f64,
) -> C64 {
    let r = params.m_a / params.m_c;
    let env = GaussianSpec {
        center: -phi0.center / r,
        width: phi0.width / r,
    };
    gamma_environment(env, pi_b - pi_b_prime, params, t)
}

/// Closed form for a Gaussian frame-A environment profile `env`.
pub fn gamma_environment(env: GaussianSpec, delta_pi: f64, params: &PhysicalParams, t: f64) -> C64 {
    let k = delta_pi * t / (params.m_c * params.hbar);
    let modulus = (-(k * env.width).powi(2) / 4.0).exp();
    C64::from_polar(modulus, -k * env.center)
}

/// Table of `Gamma(p_i, p_j, t)` for every pair of points of `grid_b`,
/// computed by quadrature against `phi0_c`.
///
/// The factor depends on `p_i - p_j = (i - j) dp` only, so `2n - 1`
/// quadratures suffice.
pub fn numeric_kernel(
    phi0_c: &WaveFunction,
    grid_b: &MomentumGrid,
    params: &PhysicalParams,
    t: f64,
) -> Result<DMatrix<C64>> {
    phi0_c.check_edge_guard("decoherence kernel")?;
    let n = grid_b.n();
    let dp = grid_b.dp();
    // by_offset[k] holds the factor for i - j = k - (n - 1).
    let by_offset: Vec<C64> = (0..2 * n - 1)
        .map(|k| gamma_sum(phi0_c, (k as f64 - (n - 1) as f64) * dp, params, t))
        .collect();
    Ok(DMatrix::from_fn(n, n, |i, j| by_offset[i + n - 1 - j]))
}

/// `rho_ij = Gamma(p_i, p_j, t) psi0_i conj(psi0_j)`, fully validated.
pub fn assemble_reduced_b(
    psi0_b: &WaveFunction,
    kernel: impl Fn(f64, f64, f64) -> C64,
    t: f64,
) -> Result<DensityMatrix> {
    let grid = *psi0_b.grid();
    let a = psi0_b.amps();
    let elems = DMatrix::from_fn(grid.n(), grid.n(), |i, j| {
        kernel(grid.point(i), grid.point(j), t) * a[i] * a[j].conj()
    });
    DensityMatrix::new(grid, elems)
}

/// As [`assemble_reduced_b`] with a precomputed kernel table.
pub fn assemble_reduced_b_from_table(psi0_b: &WaveFunction, kernel: &DMatrix<C64>) -> Result<DensityMatrix> {
    let n = psi0_b.grid().n();
    if kernel.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "kernel is {}x{}, state has {n} points",
            kernel.nrows(),
            kernel.ncols()
        )));
    }
    let a = psi0_b.amps();
    let elems = DMatrix::from_fn(n, n, |i, j| kernel[(i, j)] * a[i] * a[j].conj());
    DensityMatrix::new(*psi0_b.grid(), elems)
}

/// Generalized overlap `Tr sqrt(sqrt(rho2) rho1 sqrt(rho2))`, clamped to `[0, 1]`.
///
/// Evaluated as the trace norm of `sqrt(rho1) sqrt(rho2)`, which has the
/// same value and does not take square roots of roundoff-level eigenvalues
/// a second time.
pub fn generalized_overlap(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.grid() != rho2.grid() {
        return Err(Error::DimensionMismatch(
            "generalized overlap needs both states on the same grid".into(),
        ));
    }
    let product = psd_sqrt(rho1.elems()) * psd_sqrt(rho2.elems());
    Ok(nuclear_norm(&product).clamp(0.0, 1.0))
}

/// Generalized overlap of `X X^dagger` and `Y Y^dagger`, which equals the
/// trace norm of `X^dagger Y`. Cheap when the states have low rank.
pub fn factored_overlap(x: &DMatrix<C64>, y: &DMatrix<C64>) -> Result<f64> {
    if x.nrows() != y.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "factors have {} and {} rows",
            x.nrows(),
            y.nrows()
        )));
    }
    Ok(nuclear_norm(&(x.adjoint() * y)).clamp(0.0, 1.0))
}

/// Decoherence factor curve from the closed form.
pub fn gamma_curve_closed(
    scenario: &FrameScenario,
    pi_b: f64,
    pi_b_prime: f64,
    times: &[f64],
) -> DecoherenceCurve {
    let p = &scenario.params;
    DecoherenceCurve {
        times: times.to_vec(),
        gamma: times
            .iter()
            .map(|&t| gamma_gaussian(scenario.phi0_a, pi_b, pi_b_prime, p, t))
            .collect(),
        tau: scenario_tau(scenario, pi_b, pi_b_prime).unwrap_or(f64::INFINITY),
        label: Provenance::ClosedForm,
    }
}

/// Decoherence factor curve by quadrature on the scenario's C grid.
pub fn gamma_curve_numeric(
    scenario: &FrameScenario,
    pi_b: f64,
    pi_b_prime: f64,
    times: &[f64],
) -> Result<DecoherenceCurve> {
    let env = scenario.environment_state()?;
    let gamma = times
        .iter()
        .map(|&t| gamma_numeric(&env, pi_b, pi_b_prime, &scenario.params, t))
        .collect::<Result<_>>()?;
    Ok(DecoherenceCurve {
        times: times.to_vec(),
        gamma,
        tau: scenario_tau(scenario, pi_b, pi_b_prime).unwrap_or(f64::INFINITY),
        label: Provenance::Numeric,
    })
}

/// Numeric decoherence factor together with the generalized overlap of the
/// two conditional environment states at each time.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingCurve {
    pub curve: DecoherenceCurve,
    pub overlap: Vec<f64>,
}

/// Information encoding: the overlap of the conditional environment
/// projectors tracks `|Gamma|`.
pub fn encoding_curve(
    scenario: &FrameScenario,
    pi_b: f64,
    pi_b_prime: f64,
    times: &[f64],
) -> Result<EncodingCurve> {
    for &p in &[pi_b, pi_b_prime] {
        if scenario.grid_b.index_of(p).is_none() {
            return Err(Error::OffGrid(p));
        }
    }
    let curve = gamma_curve_numeric(scenario, pi_b, pi_b_prime, times)?;
    let env = scenario.environment_state()?;
    let overlap = times
        .iter()
        .map(|&t| {
            let a = conditional_state(&env, pi_b, &scenario.params, t).projector();
            let b = conditional_state(&env, pi_b_prime, &scenario.params, t).projector();
            generalized_overlap(&a, &b)
        })
        .collect::<Result<_>>()?;
    Ok(EncodingCurve { curve, overlap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{conditional_env_state, evolve_free_single, to_frame_a};
    use crate::states::{make_gaussian, reduce, Subsystem};
    use proptest::prelude::*;

    fn main_env() -> (FrameScenario, WaveFunction) {
        let s = FrameScenario::baseline();
        let env = s.environment_state().unwrap();
        (s, env)
    }

    #[test]
    fn equal_momenta_and_zero_time_give_one() {
        let (s, env) = main_env();
        for &t in &[0.0, 1.0, 5.0] {
            let g = gamma_numeric(&env, 0.7, 0.7, &s.params, t).unwrap();
            assert!((g - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
        let g = gamma_numeric(&env, 2.0, -1.0, &s.params, 0.0).unwrap();
        assert!((g - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let (s, env) = main_env();
        let tau = scenario_tau(&s, 1.0, 0.0).unwrap();
        assert!((tau - 2.0).abs() < 1e-15);
        for k in 0..=30 {
            let t = 3.0 * tau * k as f64 / 30.0;
            let exact = gamma_gaussian(s.phi0_a, 1.0, 0.0, &s.params, t);
            let num = gamma_numeric(&env, 1.0, 0.0, &s.params, t).unwrap();
            assert!((exact - num).norm() / exact.norm() < 1e-6, "t {t}");
        }
    }

    #[test]
    fn closed_form_at_tau() {
        let p = PhysicalParams::natural();
        let phi0 = GaussianSpec::new(0.5, 1.0).unwrap();
        let tau = decoherence_time(1.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        let g = gamma_gaussian(phi0, 1.0, 0.0, &p, tau);
        assert!((g.norm() - (-1.0f64).exp()).abs() < 1e-9);
        // Phase sign: +gamma0 (pi - pi') t / (hbar m_A).
        assert!((g.arg() - 0.5 * tau).abs() < 1e-12);
    }

    #[test]
    fn centred_environment_gives_real_factor() {
        let p = PhysicalParams::natural();
        let phi0 = GaussianSpec::new(0.0, 1.3).unwrap();
        for &t in &[0.0, 0.5, 2.0, 7.0] {
            let g = gamma_gaussian(phi0, 2.0, -1.0, &p, t);
            assert_eq!(g.im, 0.0);
            assert!(g.re > 0.0);
        }
    }

    #[test]
    fn decoherence_time_examples() {
        assert_eq!(decoherence_time(1.0, 0.0, 2.0, 1.0, 1.0).unwrap(), 1.0);
        let base = decoherence_time(0.3, -0.4, 0.7, 1.5, 1.0).unwrap();
        assert_eq!(decoherence_time(0.3, -0.4, 0.7, 3.0, 1.0).unwrap() / base, 2.0);
        assert_eq!(decoherence_time(0.3, -0.4, 1.4, 1.5, 1.0).unwrap() / base, 0.5);
        assert_eq!(decoherence_time(-0.4, 0.3, 0.7, 1.5, 1.0).unwrap(), base);
        assert!(matches!(decoherence_time(1.0, 1.0, 1.0, 1.0, 1.0), Err(Error::NoDecoherence(_))));
        assert!(matches!(decoherence_time(1.0, 0.0, 0.0, 1.0, 1.0), Err(Error::NoDecoherence(_))));
        let scale = decoherence_time_scale(0.7, 1.5, 1.0).unwrap();
        assert!((scale / 0.7 - base).abs() < 1e-15);
    }

    #[test]
    fn figure_parameters() {
        let hbar = 1.054571817e-34;
        let m_c = 1e-17;
        let delta = hbar / 1e-6;
        let dpi = 2e-6 * delta;
        let tau = decoherence_time(dpi, 0.0, delta, m_c, hbar).unwrap();
        assert!((tau - 2.0 * hbar * m_c / (dpi * delta)).abs() / tau < 1e-15);
        let p = PhysicalParams::new(hbar, m_c, 1e-20, m_c, crate::states::UnitSystem::Si).unwrap();
        let phi0 = GaussianSpec::new(0.0, delta).unwrap();
        for &x in &[0.0, 0.5, 1.0, 2.0] {
            let g = gamma_gaussian(phi0, dpi, 0.0, &p, x * tau);
            assert!((g.norm() - (-x * x).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn refined_quadrature_agrees() {
        let (s, env) = main_env();
        let coarse = gamma_numeric(&env, 1.0, 0.0, &s.params, 3.0).unwrap();
        let fine =
            gamma_numeric_refined(s.environment_spec(), &s.grid_c, 4, 1.0, 0.0, &s.params, 3.0).unwrap();
        assert!((coarse - fine).norm() < 1e-10);
    }

    #[test]
    fn kernel_table_matches_pairwise() {
        let (s, env) = main_env();
        let grid_b = MomentumGrid::new(-3.0, 3.0, 24).unwrap();
        let table = numeric_kernel(&env, &grid_b, &s.params, 1.7).unwrap();
        for &(i, j) in &[(0, 0), (3, 17), (23, 1), (12, 12)] {
            let direct = gamma_numeric(&env, grid_b.point(i), grid_b.point(j), &s.params, 1.7).unwrap();
            assert!((table[(i, j)] - direct).norm() < 1e-14);
        }
    }

    #[test]
    fn unit_kernel_gives_projector() {
        let psi = make_gaussian(MomentumGrid::new(-8.0, 8.0, 64).unwrap(), GaussianSpec::new(0.0, 1.0).unwrap()).unwrap();
        let rho = assemble_reduced_b(&psi, |_, _, _| C64::new(1.0, 0.0), 2.0).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decohering_kernel_keeps_populations() {
        let (s, env) = main_env();
        let psi = make_gaussian(MomentumGrid::new(-8.0, 8.0, 64).unwrap(), GaussianSpec::new(0.0, 1.0).unwrap()).unwrap();
        let table = numeric_kernel(&env, psi.grid(), &s.params, 4.0).unwrap();
        let rho = assemble_reduced_b_from_table(&psi, &table).unwrap();
        for (pop, amp) in rho.populations().iter().zip(psi.amps().iter()) {
            assert!((pop - amp.norm_sqr()).abs() < 1e-15);
        }
        assert!(rho.purity() < 0.9);
    }

    #[test]
    fn kernel_assembly_matches_pipeline() {
        let s = FrameScenario::baseline();
        let t = 2.0;
        // The kernel multiplies the freely evolved psi0.
        let psi = evolve_free_single(&s.system_state().unwrap(), s.params.m_b, s.params.hbar, t);
        let assembled = assemble_reduced_b(
            &psi,
            |a, b, t| gamma_gaussian(s.phi0_a, a, b, &s.params, t),
            t,
        )
        .unwrap();
        let traced = reduce(&to_frame_a(&s, t).unwrap(), Subsystem::B);
        let err = (assembled.elems() - traced.elems()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-7, "{err}");
    }

    #[test]
    fn overlap_basics() {
        let grid = MomentumGrid::new(-8.0, 8.0, 32).unwrap();
        let a = make_gaussian(grid, GaussianSpec::new(-1.0, 1.0).unwrap()).unwrap();
        let b = make_gaussian(grid, GaussianSpec::new(1.5, 0.8).unwrap()).unwrap();
        let (pa, pb) = (a.projector(), b.projector());
        assert!((generalized_overlap(&pa, &pa).unwrap() - 1.0).abs() < 1e-9);
        let expected = a.inner(&b).unwrap().norm();
        assert!((generalized_overlap(&pa, &pb).unwrap() - expected).abs() < 1e-8);
        assert!((generalized_overlap(&pb, &pa).unwrap() - expected).abs() < 1e-8);

        let mut e0 = nalgebra::DVector::zeros(32);
        e0[3] = C64::new(1.0, 0.0);
        let mut e1 = nalgebra::DVector::zeros(32);
        e1[9] = C64::new(0.0, 1.0);
        let o0 = WaveFunction::from_amplitudes(grid, e0).unwrap().projector();
        let o1 = WaveFunction::from_amplitudes(grid, e1).unwrap().projector();
        assert!(generalized_overlap(&o0, &o1).unwrap() < 1e-9);

        let other = DensityMatrix::maximally_mixed(MomentumGrid::new(-8.0, 8.0, 16).unwrap());
        assert!(matches!(generalized_overlap(&pa, &other), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn factored_overlap_matches_eigen_route() {
        let grid = MomentumGrid::new(-12.0, 12.0, 32).unwrap();
        let states: Vec<WaveFunction> = [(-1.0, 1.0), (0.5, 0.9), (1.5, 1.1)]
            .iter()
            .map(|&(c, w)| make_gaussian(grid, GaussianSpec::new(c, w).unwrap()).unwrap())
            .collect();
        let x = DMatrix::from_fn(32, 2, |i, k| states[k].amps()[i] * (0.5f64).sqrt());
        let y = DMatrix::from_fn(32, 1, |i, _| states[2].amps()[i]);
        let rx = DensityMatrix::new(grid, &x * x.adjoint()).unwrap();
        let ry = DensityMatrix::new(grid, &y * y.adjoint()).unwrap();
        let eigen = generalized_overlap(&rx, &ry).unwrap();
        assert!((factored_overlap(&x, &y).unwrap() - eigen).abs() < 1e-8);
    }

    #[test]
    fn encoding_tracks_gamma() {
        let mut s = FrameScenario::baseline();
        let grid = MomentumGrid::new(-10.0, 10.0, 96).unwrap();
        s.grid_b = grid;
        s.grid_c = grid;
        let tau = scenario_tau(&s, 1.0, 0.0).unwrap();
        let times = [0.0, 0.5 * tau, tau, 2.0 * tau];
        let enc = encoding_curve(&s, grid.point(53), grid.point(48), &times).unwrap();
        assert!((enc.overlap[0] - 1.0).abs() < 1e-9);
        for (o, g) in enc.overlap.iter().zip(enc.curve.moduli()) {
            assert!((o - g).abs() < 1e-7, "{o} vs {g}");
        }
        assert!(encoding_curve(&s, 0.01, 0.0, &times).is_err());
    }

    #[test]
    fn conditional_overlap_is_gamma() {
        let s = FrameScenario::baseline();
        let (a, b) = (s.grid_b.point(281), s.grid_b.point(256));
        let t = 1.3;
        let pa = conditional_env_state(&s, a, t).unwrap();
        let pb = conditional_env_state(&s, b, t).unwrap();
        let overlap = pb.inner(&pa).unwrap();
        let closed = gamma_gaussian(s.phi0_a, a, b, &s.params, t);
        assert!((overlap - closed).norm() < 1e-8);
    }

    proptest! {
        #[test]
        fn kernel_is_hermitian(
            i in 0usize..40, j in 0usize..40, t in 0.0f64..6.0,
        ) {
            let (s, env) = main_env();
            let grid = MomentumGrid::new(-4.0, 4.0, 40).unwrap();
            let g1 = gamma_numeric(&env, grid.point(i), grid.point(j), &s.params, t).unwrap();
            let g2 = gamma_numeric(&env, grid.point(j), grid.point(i), &s.params, t).unwrap();
            prop_assert!((g1 - g2.conj()).norm() < 1e-12);
            prop_assert!(g1.norm() <= 1.0 + 1e-9);
        }

        #[test]
        fn gaussian_decay_is_monotone(
            center in -2.0f64..2.0, width in 0.2f64..3.0, dpi in -3.0f64..3.0,
            t1 in 0.0f64..10.0, dt in 0.0f64..10.0,
        ) {
            let p = PhysicalParams::natural();
            let phi0 = GaussianSpec::new(center, width).unwrap();
            let a = gamma_gaussian(phi0, dpi, 0.0, &p, t1).norm();
            let b = gamma_gaussian(phi0, dpi, 0.0, &p, t1 + dt).norm();
            prop_assert!(b <= a + 1e-15);
        }

        #[test]
        fn overlap_is_bounded_and_symmetric(
            c1 in -1.5f64..1.5, c2 in -1.5f64..1.5, w1 in 0.6f64..1.3, w2 in 0.6f64..1.3, mix in 0.0f64..1.0,
        ) {
            let grid = MomentumGrid::new(-16.0, 16.0, 40).unwrap();
            let a = make_gaussian(grid, GaussianSpec::new(c1, w1).unwrap()).unwrap();
            let b = make_gaussian(grid, GaussianSpec::new(c2, w2).unwrap()).unwrap();
            let mixed = DensityMatrix::new(
                grid,
                a.projector().elems().scale(mix) + b.projector().elems().scale(1.0 - mix),
            ).unwrap();
            let pa = a.projector();
            let x = generalized_overlap(&mixed, &pa).unwrap();
            let y = generalized_overlap(&pa, &mixed).unwrap();
            prop_assert!((0.0..=1.0).contains(&x));
            prop_assert!((x - y).abs() < 1e-8);
        }
    }
}
