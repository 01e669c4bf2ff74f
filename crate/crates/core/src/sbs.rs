//! Spectrum broadcast structure with a two-part environment.
//!
//! C is split into fragments C1 and C2 that both couple through the total
//! momentum. Tracing out C2 leaves
//!
//! ```text
//! rho_BC1 = sum_ij G2(p_i, p_j, t) psi_i psi_j^* |p_i><p_j| (x) |phi_i><phi_j|
//! ```
//!
//! where `G2` is the decoherence factor of C2 and `|phi_i>` the state of C1
//! conditioned on `p_i`. The structure is approached when coherences between
//! coarse momentum bins vanish and the bin-averaged C1 records become
//! distinguishable.

use nalgebra::DMatrix;

use crate::decoherence::{factored_overlap, numeric_kernel};
use crate::frames::{boost_columns, conditional_state, free_phases, FrameScenario, SystemState};
use crate::linalg::{hermitian_eigenvalues, hermiticity_defect, NEGATIVITY_TOLERANCE};
use crate::states::{
    GaussianSpec, MomentumGrid, PhysicalParams, WaveFunction, HERMITICITY_TOLERANCE,
    TRACE_TOLERANCE,
};
use crate::{Error, Result, C64};

/// Pointer bins used with [`SbsScenario::reference`].
pub const REFERENCE_BIN_EDGES: [f64; 5] = [-16.0, -2.0, 0.0, 2.0, 16.0];

/// System B with environment fragments C1 (observed) and C2 (traced out).
///
/// `frame.phi0_a` and `frame.grid_c` describe C1; both fragments couple with
/// the mass `frame.params.m_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbsScenario {
    pub frame: FrameScenario,
    pub phi0_c2: GaussianSpec,
    pub grid_c2: MomentumGrid,
}

impl SbsScenario {
    pub fn new(frame: FrameScenario, phi0_c2: GaussianSpec, grid_c2: MomentumGrid) -> Result<Self> {
        let s = Self {
            frame,
            phi0_c2,
            grid_c2,
        };
        s.environment_c2()?;
        Ok(s)
    }

    /// Reference setup: `m_B = 1e-6`, `psi0 = N(0, 2)` on 128 points of
    /// `[-16, 16)`, both fragments `N(0, 1)` on 1024 points of `[-8, 8)`.
    /// [`REFERENCE_BIN_EDGES`] separate the pointer bins; with
    /// `Delta pi = 1` the decoherence time is `tau = 2`.
    pub fn reference() -> Self {
        let params = PhysicalParams {
            m_b: 1e-6,
            ..PhysicalParams::natural()
        };
        let frame = FrameScenario::new(
            params,
            SystemState::Gaussian(GaussianSpec::new(0.0, 2.0).expect("valid spec")),
            GaussianSpec::new(0.0, 1.0).expect("valid spec"),
            MomentumGrid::new(-16.0, 16.0, 128).expect("valid grid"),
            MomentumGrid::new(-8.0, 8.0, 1024).expect("valid grid"),
        )
        .expect("reference scenario fits its grids");
        Self::symmetric(frame)
    }

    /// Both fragments share the C1 specification.
    pub fn symmetric(frame: FrameScenario) -> Self {
        Self {
            frame,
            phi0_c2: frame.phi0_a,
            grid_c2: frame.grid_c,
        }
    }

    /// Frame-A state of C1.
    pub fn environment_c1(&self) -> Result<WaveFunction> {
        self.frame.environment_state()
    }

    /// Frame-A state of C2.
    pub fn environment_c2(&self) -> Result<WaveFunction> {
        let c2 = FrameScenario {
            phi0_a: self.phi0_c2,
            grid_c: self.grid_c2,
            ..self.frame
        };
        c2.environment_state()
    }
}

/// `rho_BC1` in factored form.
#[derive(Debug, Clone, PartialEq)]
pub struct Bc1State {
    pub grid_b: MomentumGrid,
    /// `kernel[(i, j)] = G2(p_i, p_j, t) psi_i psi_j^*`.
    pub kernel: DMatrix<C64>,
    /// Column `i` is the C1 state conditioned on `p_i`.
    pub conditional_states: DMatrix<C64>,
}

impl Bc1State {
    /// Dense `rho_BC1`, indexed `i + n_B * a` for B point `i` and C1 point `a`.
    pub fn to_density_matrix(&self) -> DMatrix<C64> {
        let n_b = self.kernel.nrows();
        let n_c = self.conditional_states.nrows();
        let phi = &self.conditional_states;
        DMatrix::from_fn(n_b * n_c, n_b * n_c, |r, c| {
            let (i, a) = (r % n_b, r / n_b);
            let (j, b) = (c % n_b, c / n_b);
            self.kernel[(i, j)] * phi[(a, i)] * phi[(b, j)].conj()
        })
    }
}

/// `rho_BC1` in frame A at time `t`.
pub fn build_bc1(s: &SbsScenario, t: f64) -> Result<Bc1State> {
    let f = &s.frame;
    let psi = f.system_state()?;
    let env1 = s.environment_c1()?;
    let env2 = s.environment_c2()?;
    let gamma = numeric_kernel(&env2, &f.grid_b, &f.params, t)?;
    let a = psi.amps();
    let n_b = f.grid_b.n();
    let kernel = DMatrix::from_fn(n_b, n_b, |i, j| gamma[(i, j)] * a[i] * a[j].conj());
    let mut conditional = DMatrix::zeros(env1.grid().n(), n_b);
    for i in 0..n_b {
        let phi = conditional_state(&env1, f.grid_b.point(i), &f.params, t);
        conditional.set_column(i, phi.amps());
    }
    Ok(Bc1State {
        grid_b: f.grid_b,
        kernel,
        conditional_states: conditional,
    })
}

/// The same diagnostics in frame C: B and the reference evolve freely, so the
/// kernel is `psi_i psi_j^*` and every record is the same state.
pub fn build_bc1_frame_c(s: &SbsScenario, t: f64) -> Result<Bc1State> {
    let f = &s.frame;
    let psi = f.system_state()?;
    let p = &f.params;
    let env = crate::frames::evolve_free_single(&s.environment_c1()?, p.m_c, p.hbar, t);
    let phases = free_phases(&f.grid_b, p.m_b, p.hbar, t);
    let a: Vec<C64> = psi.amps().iter().zip(&phases).map(|(x, ph)| x * ph).collect();
    let n_b = f.grid_b.n();
    let kernel = DMatrix::from_fn(n_b, n_b, |i, j| a[i] * a[j].conj());
    let conditional = DMatrix::from_fn(env.grid().n(), n_b, |r, _| env.amps()[r]);
    Ok(Bc1State {
        grid_b: f.grid_b,
        kernel,
        conditional_states: conditional,
    })
}

/// Check that a dense state is Hermitian, unit-trace and positive.
pub fn validate_density(elems: &DMatrix<C64>) -> Result<()> {
    let defect = hermiticity_defect(elems);
    if defect > HERMITICITY_TOLERANCE {
        return Err(Error::Invariant(format!("Hermiticity defect {defect:.3e}")));
    }
    let trace = elems.trace();
    if (trace - C64::new(1.0, 0.0)).norm() > TRACE_TOLERANCE {
        return Err(Error::Invariant(format!("trace {trace}")));
    }
    let min = hermitian_eigenvalues(elems).first().copied().unwrap_or(0.0);
    if min < -NEGATIVITY_TOLERANCE {
        return Err(Error::Invariant(format!("negative eigenvalue {min:.3e}")));
    }
    Ok(())
}

/// Brute-force `rho_BC1`: evolve the full B-C1-C2 state with the coupling
/// controlled by the total momentum `u1 + u2`, then trace out C2. Dense, so
/// meant for small grids.
pub fn simulate_bc1c2(s: &SbsScenario, t: f64) -> Result<DMatrix<C64>> {
    let f = &s.frame;
    let p = &f.params;
    let psi = f.system_state()?;
    let env1 = s.environment_c1()?;
    let env2 = s.environment_c2()?;
    let (g1, g2) = (*env1.grid(), *env2.grid());
    let (n_b, n1, n2) = (f.grid_b.n(), g1.n(), g2.n());

    // Column a + n1 * b holds B amplitudes for C1 point a and C2 point b.
    let mut amps = DMatrix::from_fn(n_b, n1 * n2, |i, col| {
        psi.amps()[i] * env1.amps()[col % n1] * env2.amps()[col / n1]
    });
    boost_columns(&mut amps, &f.grid_b, p, t, |col| {
        (g1.point(col % n1) + g2.point(col / n1)) / p.m_c
    })?;
    let (pb, p1, p2) = (
        free_phases(&f.grid_b, p.m_b, p.hbar, t),
        free_phases(&g1, p.m_c, p.hbar, t),
        free_phases(&g2, p.m_c, p.hbar, t),
    );
    // Rows i + n_B * a, columns b.
    let m = DMatrix::from_fn(n_b * n1, n2, |r, b| {
        let (i, a) = (r % n_b, r / n_b);
        amps[(i, a + n1 * b)] * pb[i] * p1[a] * p2[b]
    });
    Ok(&m * m.adjoint())
}

/// Coarse-graining of B momenta into bins `[e_k, e_{k+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerBinning {
    edges: Vec<f64>,
}

impl PointerBinning {
    pub fn new(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 3 {
            return Err(Error::Config("binning needs at least two bins".into()));
        }
        if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!("bin edges must be finite and ascending: {edges:?}")));
        }
        Ok(Self { edges })
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn n_bins(&self) -> usize {
        self.edges.len() - 1
    }

    /// Grid indices in each bin; every grid point must be covered.
    pub fn assign(&self, grid: &MomentumGrid) -> Result<Vec<Vec<usize>>> {
        let last = grid.point(grid.n() - 1);
        if self.edges[0] > grid.p_min() || *self.edges.last().unwrap() <= last {
            return Err(Error::Config(format!(
                "bin edges {:?} do not cover the grid [{}, {}]",
                self.edges,
                grid.p_min(),
                last
            )));
        }
        let mut bins = vec![Vec::new(); self.n_bins()];
        for i in 0..grid.n() {
            let p = grid.point(i);
            let k = self.edges.partition_point(|&e| e <= p) - 1;
            bins[k].push(i);
        }
        if let Some(k) = bins.iter().position(|b| b.is_empty()) {
            return Err(Error::EmptyBin(k));
        }
        Ok(bins)
    }
}

/// Upper limits on inter-bin coherence and record overlap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub coh_max: f64,
    pub overlap_max: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            coh_max: 0.05,
            overlap_max: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SbsReport {
    pub bin_probs: Vec<f64>,
    /// Largest inter-bin coherence mass relative to its value without decoherence.
    pub coherence_ratio: f64,
    /// Generalized overlap of bin-averaged C1 records.
    pub distinguishability: DMatrix<f64>,
    pub sbs_ok: bool,
}

impl SbsReport {
    pub fn max_overlap(&self) -> f64 {
        let n = self.distinguishability.nrows();
        let mut worst = 0.0f64;
        for k in 0..n {
            for l in 0..n {
                if k != l {
                    worst = worst.max(self.distinguishability[(k, l)]);
                }
            }
        }
        worst
    }
}

/// Binned diagnostics of `rho_BC1`.
///
/// The coherence ratio of bins `k != l` is `sum |K_ij| / sum sqrt(K_ii K_jj)`
/// over `i` in `k`, `j` in `l`; the denominator is the value for an
/// undecohered state with the same populations. Records are the
/// `|psi|^2`-weighted mixtures of conditional states within a bin.
pub fn sbs_report(state: &Bc1State, binning: &PointerBinning, thresholds: Thresholds) -> Result<SbsReport> {
    let bins = binning.assign(&state.grid_b)?;
    let k = &state.kernel;
    let pops: Vec<f64> = (0..k.nrows()).map(|i| k[(i, i)].re.max(0.0)).collect();
    let bin_probs: Vec<f64> = bins.iter().map(|b| b.iter().map(|&i| pops[i]).sum()).collect();

    let mut coherence_ratio = 0.0f64;
    for (a, ba) in bins.iter().enumerate() {
        for bb in bins.iter().skip(a + 1) {
            let (mut mass, mut scale) = (0.0, 0.0);
            for &i in ba {
                for &j in bb {
                    mass += k[(i, j)].norm();
                    scale += (pops[i] * pops[j]).sqrt();
                }
            }
            if scale > 0.0 {
                coherence_ratio = coherence_ratio.max(mass / scale);
            }
        }
    }

    let records: Vec<DMatrix<C64>> = bins
        .iter()
        .zip(&bin_probs)
        .map(|(b, &total)| {
            let n_c = state.conditional_states.nrows();
            DMatrix::from_fn(n_c, b.len(), |r, c| {
                let i = b[c];
                let w = if total > 0.0 { (pops[i] / total).sqrt() } else { 0.0 };
                state.conditional_states[(r, i)] * w
            })
        })
        .collect();
    let n = bins.len();
    let mut distinguishability = DMatrix::from_element(n, n, 1.0);
    for a in 0..n {
        for b in a + 1..n {
            let o = factored_overlap(&records[a], &records[b])?;
            distinguishability[(a, b)] = o;
            distinguishability[(b, a)] = o;
        }
    }
    let mut report = SbsReport {
        bin_probs,
        coherence_ratio,
        distinguishability,
        sbs_ok: false,
    };
    report.sbs_ok =
        report.coherence_ratio <= thresholds.coh_max && report.max_overlap() <= thresholds.overlap_max;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(m_b: f64) -> SbsScenario {
        let params = PhysicalParams {
            m_b,
            ..PhysicalParams::natural()
        };
        let frame = FrameScenario::new(
            params,
            SystemState::Gaussian(GaussianSpec::new(0.0, 1.0).unwrap()),
            GaussianSpec::new(0.0, 1.0).unwrap(),
            MomentumGrid::new(-8.0, 8.0, 24).unwrap(),
            MomentumGrid::new(-8.0, 8.0, 24).unwrap(),
        )
        .unwrap();
        SbsScenario::symmetric(frame)
    }

    #[test]
    fn initial_state_is_a_product() {
        let s = small(1e-9);
        let st = build_bc1(&s, 0.0).unwrap();
        let sv = crate::linalg::singular_values(&st.kernel);
        assert!(sv[1] < 1e-12 * sv[0]);
        for i in 1..st.conditional_states.ncols() {
            assert_eq!(st.conditional_states.column(i), st.conditional_states.column(0));
        }
    }

    #[test]
    fn symmetric_environment_reuses_single_factor() {
        let s = small(1e-9);
        let t = 1.3;
        let env = s.environment_c1().unwrap();
        let single = numeric_kernel(&env, &s.frame.grid_b, &s.frame.params, t).unwrap();
        let psi = s.frame.system_state().unwrap();
        let st = build_bc1(&s, t).unwrap();
        for i in 0..24 {
            for j in 0..24 {
                let expected = single[(i, j)] * psi.amps()[i] * psi.amps()[j].conj();
                assert!((st.kernel[(i, j)] - expected).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn assembled_state_matches_tripartite_simulation() {
        let s = small(1e-9);
        for &t in &[0.0, 2.0, 10.0] {
            let assembled = build_bc1(&s, t).unwrap().to_density_matrix();
            validate_density(&assembled).unwrap();
            let brute = simulate_bc1c2(&s, t).unwrap();
            // The B free phase is not part of the kernel; compare up to it.
            let n_b = 24;
            let ph = free_phases(&s.frame.grid_b, s.frame.params.m_b, 1.0, t);
            let mut err = 0.0f64;
            for r in 0..brute.nrows() {
                for c in 0..brute.ncols() {
                    let expected = assembled[(r, c)] * ph[r % n_b] * ph[c % n_b].conj();
                    err = err.max((brute[(r, c)] - expected).norm());
                }
            }
            assert!(err < 1e-8, "t {t}: {err}");
        }
    }

    #[test]
    fn binning_validation() {
        let grid = MomentumGrid::new(-8.0, 8.0, 16).unwrap();
        assert!(PointerBinning::new(vec![0.0, 1.0]).is_err());
        assert!(PointerBinning::new(vec![0.0, 2.0, 1.0]).is_err());
        let narrow = PointerBinning::new(vec![-4.0, 0.0, 4.0]).unwrap();
        assert!(narrow.assign(&grid).is_err());
        let b = PointerBinning::new(vec![-8.0, 0.0, 8.0]).unwrap();
        let bins = b.assign(&grid).unwrap();
        assert_eq!(bins[0].len() + bins[1].len(), 16);
        assert_eq!(bins[1][0], 8);
        let empty = PointerBinning::new(vec![-8.0, 0.1, 0.2, 8.0]).unwrap();
        assert_eq!(empty.assign(&grid), Err(Error::EmptyBin(1)));
    }

    #[test]
    fn no_decoherence_at_zero_time() {
        let s = small(1e-9);
        let binning = PointerBinning::new(vec![-8.0, -1.0, 1.0, 8.0]).unwrap();
        let r = sbs_report(&build_bc1(&s, 0.0).unwrap(), &binning, Thresholds::default()).unwrap();
        assert!((r.coherence_ratio - 1.0).abs() < 1e-12);
        assert!((r.max_overlap() - 1.0).abs() < 1e-9);
        assert!(!r.sbs_ok);
        assert!((r.bin_probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn frame_c_never_forms_structure() {
        let s = small(1e-9);
        let binning = PointerBinning::new(vec![-8.0, -1.0, 1.0, 8.0]).unwrap();
        for &t in &[0.0, 5.0, 50.0] {
            let r = sbs_report(&build_bc1_frame_c(&s, t).unwrap(), &binning, Thresholds::default()).unwrap();
            assert!((r.coherence_ratio - 1.0).abs() < 1e-12);
            assert!(!r.sbs_ok);
        }
    }

    #[test]
    fn populations_do_not_change() {
        let s = small(1e-9);
        let binning = PointerBinning::new(vec![-8.0, -1.0, 1.0, 8.0]).unwrap();
        let p0 = sbs_report(&build_bc1(&s, 0.0).unwrap(), &binning, Thresholds::default()).unwrap();
        let p1 = sbs_report(&build_bc1(&s, 7.0).unwrap(), &binning, Thresholds::default()).unwrap();
        for (a, b) in p0.bin_probs.iter().zip(&p1.bin_probs) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn reference_scenario_forms_structure_in_frame_a_only() {
        let s = SbsScenario::reference();
        let binning = PointerBinning::new(REFERENCE_BIN_EDGES.to_vec()).unwrap();
        let tau = 2.0;
        let mut last = (f64::INFINITY, f64::INFINITY);
        for &k in &[0.0, 1.0, 3.0, 5.0] {
            let r = sbs_report(&build_bc1(&s, k * tau).unwrap(), &binning, Thresholds::default()).unwrap();
            assert!(r.coherence_ratio <= last.0 + 1e-12 && r.max_overlap() <= last.1 + 1e-9);
            last = (r.coherence_ratio, r.max_overlap());
            assert_eq!(r.sbs_ok, k == 5.0);
            let c = sbs_report(&build_bc1_frame_c(&s, k * tau).unwrap(), &binning, Thresholds::default()).unwrap();
            assert!(!c.sbs_ok);
        }
    }
}
