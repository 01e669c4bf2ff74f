//! Momentum-space pure states, density matrices and their reductions.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::linalg;
use crate::{Error, Result, C64};

/// Amplitude below which support counts as absent in the guard band.
pub const EDGE_GUARD_AMPLITUDE: f64 = 1e-8;

/// Width of the guard band on each side, as a fraction of the grid span.
pub const GUARD_BAND_FRACTION: f64 = 0.05;

pub const NORM_TOLERANCE: f64 = 1e-12;
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-10;

/// Uniform momentum grid `p_i = p_min + i * dp`, `i` in `0..n`,
/// `dp = (p_max - p_min) / n`.
///
/// The grid is periodic: `p_max` itself is not a sample point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumGrid {
    p_min: f64,
    p_max: f64,
    n: usize,
}

impl MomentumGrid {
    pub fn new(p_min: f64, p_max: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config(format!("grid needs at least 2 points, got {n}")));
        }
        if !(p_min.is_finite() && p_max.is_finite()) || p_min >= p_max {
            return Err(Error::Config(format!(
                "grid bounds must satisfy p_min < p_max, got [{p_min}, {p_max}]"
            )));
        }
        Ok(Self { p_min, p_max, n })
    }

    /// Grid of `n` points centred on `center` with half-span `half_span`.
    pub fn centered(center: f64, half_span: f64, n: usize) -> Result<Self> {
        Self::new(center - half_span, center + half_span, n)
    }

    pub fn p_min(&self) -> f64 {
        self.p_min
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / self.n as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.p_min + i as f64 * self.dp()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Index of the grid point equal to `p` up to `1e-9 * dp`.
    pub fn index_of(&self, p: f64) -> Option<usize> {
        let x = (p - self.p_min) / self.dp();
        let k = x.round();
        if k < 0.0 || k >= self.n as f64 || (x - k).abs() > 1e-9 {
            return None;
        }
        Some(k as usize)
    }

    /// Whether point `i` lies in the outer guard band.
    pub fn in_guard_band(&self, i: usize) -> bool {
        let margin = GUARD_BAND_FRACTION * (self.p_max - self.p_min);
        let p = self.point(i);
        p < self.p_min + margin || p > self.p_max - margin
    }

    /// The same number of points on a grid refined by `factor` over the same
    /// span.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.p_min, self.p_max, self.n * factor.max(1))
    }
}

/// Build a uniform grid.
pub fn make_grid(p_min: f64, p_max: f64, n: usize) -> Result<MomentumGrid> {
    MomentumGrid::new(p_min, p_max, n)
}

/// A Gaussian momentum profile `(width^2 pi)^(-1/4) exp(-(p - center)^2 / (2 width^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    pub center: f64,
    pub width: f64,
}

impl GaussianSpec {
    pub fn new(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) || !center.is_finite() {
            return Err(Error::Config(format!(
                "gaussian needs finite center and width > 0, got center {center}, width {width}"
            )));
        }
        Ok(Self { center, width })
    }

    /// Continuum-normalized amplitude at momentum `p`.
    pub fn amplitude(&self, p: f64) -> f64 {
        let d = (p - self.center) / self.width;
        (self.width * self.width * PI).powf(-0.25) * (-0.5 * d * d).exp()
    }

    /// `|amplitude|^2` as a probability density.
    pub fn density(&self, p: f64) -> f64 {
        let d = (p - self.center) / self.width;
        (-(d * d)).exp() / (self.width * PI.sqrt())
    }
}

/// Two-branch momentum cat `N^(-1/2) (g_beta(p) + g_beta'(p))` with
/// unnormalized branches `g_b(p) = exp(-(p - b)^2 / (2 width^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatSpec {
    pub beta: f64,
    pub beta_prime: f64,
    pub width: f64,
    norm: f64,
}

impl CatSpec {
    pub fn new(beta: f64, beta_prime: f64, width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) || !beta.is_finite() || !beta_prime.is_finite() {
            return Err(Error::Config(format!(
                "cat needs finite branch centres and width > 0, got ({beta}, {beta_prime}), width {width}"
            )));
        }
        let d = beta - beta_prime;
        let norm = 2.0 * PI.sqrt() * width * (1.0 + (-(d * d) / (4.0 * width * width)).exp());
        Ok(Self {
            beta,
            beta_prime,
            width,
            norm,
        })
    }

    /// `N = integral |g_beta + g_beta'|^2 dp`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Unnormalized branch profile centred at `center`.
    pub fn branch(&self, center: f64, p: f64) -> f64 {
        let d = (p - center) / self.width;
        (-0.5 * d * d).exp()
    }

    /// Continuum-normalized amplitude.
    pub fn amplitude(&self, p: f64) -> f64 {
        (self.branch(self.beta, p) + self.branch(self.beta_prime, p)) / self.norm.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitSystem {
    Natural,
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub m_a: f64,
    pub m_b: f64,
    pub m_c: f64,
    pub units: UnitSystem,
}

impl PhysicalParams {
    pub fn new(hbar: f64, m_a: f64, m_b: f64, m_c: f64, units: UnitSystem) -> Result<Self> {
        for (name, v) in [("hbar", hbar), ("m_A", m_a), ("m_B", m_b), ("m_C", m_c)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            hbar,
            m_a,
            m_b,
            m_c,
            units,
        })
    }

    /// `hbar = 1`, all masses 1.
    pub fn natural() -> Self {
        Self {
            hbar: 1.0,
            m_a: 1.0,
            m_b: 1.0,
            m_c: 1.0,
            units: UnitSystem::Natural,
        }
    }

    pub fn equal_masses(&self) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        close(self.m_a, self.m_b) && close(self.m_b, self.m_c)
    }
}

fn check_band<'a>(
    context: &str,
    grid: &MomentumGrid,
    amps: impl Iterator<Item = (usize, &'a C64)>,
) -> Result<()> {
    for (i, a) in amps {
        if grid.in_guard_band(i) && a.norm() >= EDGE_GUARD_AMPLITUDE {
            return Err(Error::EdgeGuard {
                context: context.to_string(),
                location: grid.point(i),
                amplitude: a.norm(),
            });
        }
    }
    Ok(())
}

/// Unit-norm amplitude vector on a momentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: MomentumGrid,
    amps: DVector<C64>,
}

impl WaveFunction {
    /// Wrap raw discrete amplitudes, rescaling them to unit norm.
    ///
    /// Only the normalization is checked here; the edge guard applies to
    /// states sampled from continuum profiles.
    pub fn from_amplitudes(grid: MomentumGrid, amps: DVector<C64>) -> Result<Self> {
        if amps.len() != grid.n() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for a {}-point grid",
                amps.len(),
                grid.n()
            )));
        }
        let norm = amps.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Invariant("wavefunction has zero or non-finite norm".into()));
        }
        Ok(Self {
            grid,
            amps: amps.unscale(norm),
        })
    }

    /// Sample a continuum profile as `f(p_i) sqrt(dp)`, renormalize, and
    /// enforce the edge guard.
    pub fn sample(grid: MomentumGrid, f: impl Fn(f64) -> C64) -> Result<Self> {
        let root_dp = grid.dp().sqrt();
        let amps = DVector::from_iterator(grid.n(), (0..grid.n()).map(|i| f(grid.point(i)) * root_dp));
        let wf = Self::from_amplitudes(grid, amps)?;
        wf.check_edge_guard("sampled state")?;
        Ok(wf)
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    pub fn amps(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &WaveFunction) -> Result<C64> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch("inner product across different grids".into()));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn mean_momentum(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * self.grid.point(i))
            .sum()
    }

    /// `sum_i |a_i|^2 (p_i - about)^2`.
    pub fn second_moment_about(&self, about: f64) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * (self.grid.point(i) - about).powi(2))
            .sum()
    }

    pub fn check_edge_guard(&self, context: &str) -> Result<()> {
        check_band(context, &self.grid, self.amps.iter().enumerate())
    }

    /// `|psi><psi|`.
    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix {
            grid: self.grid,
            elems: &self.amps * self.amps.adjoint(),
        }
    }

    pub(crate) fn map_amps(&self, f: impl Fn(usize, C64) -> C64) -> WaveFunction {
        let amps = DVector::from_iterator(
            self.amps.len(),
            self.amps.iter().enumerate().map(|(i, &a)| f(i, a)),
        );
        WaveFunction {
            grid: self.grid,
            amps,
        }
    }
}

/// Sampled, renormalized Gaussian.
pub fn make_gaussian(grid: MomentumGrid, spec: GaussianSpec) -> Result<WaveFunction> {
    WaveFunction::sample(grid, |p| C64::new(spec.amplitude(p), 0.0))
}

/// Sampled, renormalized two-branch cat.
pub fn make_cat(grid: MomentumGrid, spec: CatSpec) -> Result<WaveFunction> {
    WaveFunction::sample(grid, |p| C64::new(spec.amplitude(p), 0.0))
}

/// Which factor of a bipartite state to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    B,
    C,
}

/// Pure state of B (rows) and C (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct JointWaveFunction {
    grid_b: MomentumGrid,
    grid_c: MomentumGrid,
    amps: DMatrix<C64>,
}

impl JointWaveFunction {
    /// Wrap raw amplitudes (`n_B x n_C`), rescaling to unit norm.
    pub fn from_amplitudes(
        grid_b: MomentumGrid,
        grid_c: MomentumGrid,
        amps: DMatrix<C64>,
    ) -> Result<Self> {
        if amps.nrows() != grid_b.n() || amps.ncols() != grid_c.n() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} amplitudes for {}x{} grids",
                amps.nrows(),
                amps.ncols(),
                grid_b.n(),
                grid_c.n()
            )));
        }
        let norm = amps.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Invariant("joint state has zero or non-finite norm".into()));
        }
        Ok(Self {
            grid_b,
            grid_c,
            amps: amps.unscale(norm),
        })
    }

    /// Internal constructor for unitary maps: no renormalization.
    pub(crate) fn from_unitary_image(
        grid_b: MomentumGrid,
        grid_c: MomentumGrid,
        amps: DMatrix<C64>,
    ) -> Self {
        Self {
            grid_b,
            grid_c,
            amps,
        }
    }

    pub fn grid_b(&self) -> &MomentumGrid {
        &self.grid_b
    }

    pub fn grid_c(&self) -> &MomentumGrid {
        &self.grid_c
    }

    pub fn amps(&self) -> &DMatrix<C64> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    /// Both marginal supports must vanish in their guard bands.
    pub fn check_edge_guard(&self, context: &str) -> Result<()> {
        for (j, col) in self.amps.column_iter().enumerate() {
            let in_c_band = self.grid_c.in_guard_band(j);
            for (i, a) in col.iter().enumerate() {
                if (in_c_band || self.grid_b.in_guard_band(i)) && a.norm() >= EDGE_GUARD_AMPLITUDE {
                    let location = if in_c_band {
                        self.grid_c.point(j)
                    } else {
                        self.grid_b.point(i)
                    };
                    return Err(Error::EdgeGuard {
                        context: context.to_string(),
                        location,
                        amplitude: a.norm(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Marginal momentum distribution of one factor.
    pub fn marginal_probabilities(&self, which: Subsystem) -> Vec<f64> {
        match which {
            Subsystem::B => self
                .amps
                .row_iter()
                .map(|r| r.iter().map(|a| a.norm_sqr()).sum())
                .collect(),
            Subsystem::C => self
                .amps
                .column_iter()
                .map(|c| c.iter().map(|a| a.norm_sqr()).sum())
                .collect(),
        }
    }

    pub(crate) fn into_amps(self) -> DMatrix<C64> {
        self.amps
    }
}

/// `amps[i][j] = b[i] c[j]`.
pub fn product(wf_b: &WaveFunction, wf_c: &WaveFunction) -> JointWaveFunction {
    JointWaveFunction {
        grid_b: wf_b.grid,
        grid_c: wf_c.grid,
        amps: &wf_b.amps * wf_c.amps.transpose(),
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    grid: MomentumGrid,
    elems: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validate Hermiticity, trace and positivity.
    pub fn new(grid: MomentumGrid, elems: DMatrix<C64>) -> Result<Self> {
        let rho = Self::from_gram(grid, elems)?;
        let min = rho.min_eigenvalue();
        if min < -linalg::NEGATIVITY_TOLERANCE {
            return Err(Error::Invariant(format!(
                "density matrix has eigenvalue {min:.3e} below zero"
            )));
        }
        Ok(rho)
    }

    /// Validate shape, Hermiticity and trace only. For matrices that are
    /// positive by construction (`A A^dagger`).
    pub(crate) fn from_gram(grid: MomentumGrid, elems: DMatrix<C64>) -> Result<Self> {
        if elems.nrows() != grid.n() || elems.ncols() != grid.n() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a {}-point grid",
                elems.nrows(),
                elems.ncols(),
                grid.n()
            )));
        }
        let defect = linalg::hermiticity_defect(&elems);
        if defect > HERMITICITY_TOLERANCE {
            return Err(Error::Invariant(format!("density matrix not Hermitian (defect {defect:.3e})")));
        }
        let trace = elems.trace();
        if (trace.re - 1.0).abs() > TRACE_TOLERANCE || trace.im.abs() > TRACE_TOLERANCE {
            return Err(Error::Invariant(format!("density matrix trace is {trace}")));
        }
        Ok(Self { grid, elems })
    }

    /// `I / n`.
    pub fn maximally_mixed(grid: MomentumGrid) -> Self {
        let n = grid.n();
        Self {
            grid,
            elems: DMatrix::from_diagonal_element(n, n, C64::new(1.0 / n as f64, 0.0)),
        }
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    pub fn elems(&self) -> &DMatrix<C64> {
        &self.elems
    }

    pub fn trace(&self) -> C64 {
        self.elems.trace()
    }

    pub fn purity(&self) -> f64 {
        purity(self)
    }

    /// Eigenvalues of the symmetrized matrix, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.elems)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Diagonal populations.
    pub fn populations(&self) -> Vec<f64> {
        self.elems.diagonal().iter().map(|z| z.re).collect()
    }

    /// Von Neumann entropy in nats.
    pub fn entropy(&self) -> f64 {
        self.eigenvalues()
            .into_iter()
            .filter(|&v| v > 0.0)
            .map(|v| -v * v.ln())
            .sum()
    }
}

/// Partial trace of a pure bipartite state.
pub fn reduce(joint: &JointWaveFunction, which: Subsystem) -> DensityMatrix {
    let (grid, elems) = match which {
        Subsystem::B => (joint.grid_b, &joint.amps * joint.amps.adjoint()),
        // rho_C[j][j'] = sum_i a[i][j] conj(a[i][j']) = (A^T conj(A))[j][j']
        Subsystem::C => (joint.grid_c, joint.amps.transpose() * joint.amps.conjugate()),
    };
    DensityMatrix::from_gram(grid, elems)
        .expect("partial trace of a unit-norm state is a unit-trace Gram matrix")
}

/// `Tr(rho^2)` as the squared Frobenius norm.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.elems.norm_squared()
}

/// Singular values of the amplitude matrix, descending.
pub fn schmidt_coefficients(joint: &JointWaveFunction) -> Vec<f64> {
    let mut s: Vec<f64> = linalg::singular_values(&joint.amps);
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Entanglement entropy `-sum s_k^2 ln s_k^2` from Schmidt coefficients.
pub fn entanglement_entropy(schmidt: &[f64]) -> f64 {
    schmidt
        .iter()
        .map(|s| s * s)
        .filter(|&w| w > 0.0)
        .map(|w| -w * w.ln())
        .sum()
}
