//! Long-time reduced coin density operator.
//!
//! In the stationary-phase limit only equal-eigenphase terms survive, so
//!
//! ```text
//! rho = (1 / 4 pi^2) Int d^2k  w(k) sum_w P_w(k) |chi><chi| P_w(k)
//! ```
//!
//! with `P_w(k)` the spectral projectors of `U_k` and `w(k)` the Fourier
//! weight of the initial position amplitudes. The map `X -> sum_w P_w X P_w`
//! is linear in `X`, so the solver integrates it once per coin and weight as
//! a 16x16 channel `T = sum_w P_w (x) conj(P_w)` and contracts it with any
//! coin state afterwards.
//!
//! Finite-support positions are expanded into Fourier moments
//! `w(k) = c_0 + sum_d (a_d cos(k.d) + b_d sin(k.d))`, one cached channel per
//! moment, so sweeping the position parameters costs no extra quadrature.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::coin::CoinOperator;
use crate::error::{Error, Result};
use crate::kspace::{hadamard_eigenpairs, uk_from_matrix, SpectrumRoute, WaveVector};
use crate::linalg::{
    binary_entropy, density_spectrum, entropy_of_spectrum, jacobi_hermitian, unitary_eigen, ComplexMatrix,
    SpectralDecomposition, Vec4, DEGENERACY_TOL, HERMITIAN_TOL, ZERO,
};
use crate::states::{gaussian_norm, CoinState, PositionDistribution};

/// Number of row blocks the k-grid is split into. Fixed so that the
/// floating-point summation order does not depend on the worker count.
const GRID_CHUNKS: usize = 64;
/// Directions averaged when taking `k -> 0` in the uniform limit.
const UNIFORM_LIMIT_DIRECTIONS: usize = 64;

/// Uniform tensor grid over the Brillouin zone with doubling refinement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// Points per axis on the coarsest grid; a power of two, at least 16.
    pub grid_points_per_axis: usize,
    /// Grid shift in units of the spacing; 0.5 gives the midpoint rule.
    pub offset_fraction: f64,
    /// Refinement stops once the largest channel entry moves less than this.
    pub refine_tol: f64,
    /// How many times the grid may be doubled.
    pub max_refinements: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            grid_points_per_axis: 512,
            offset_fraction: 0.5,
            refine_tol: 1e-8,
            max_refinements: 3,
        }
    }
}

impl QuadratureSpec {
    pub fn with_grid(grid_points_per_axis: usize) -> Self {
        Self {
            grid_points_per_axis,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.grid_points_per_axis;
        if m < 16 || !m.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid points per axis must be a power of two >= 16, got {m}"
            )));
        }
        if !(0.0..1.0).contains(&self.offset_fraction) {
            return Err(Error::InvalidParameter(format!(
                "grid offset must lie in [0, 1), got {}",
                self.offset_fraction
            )));
        }
        if !(self.refine_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "refinement tolerance must be positive, got {}",
                self.refine_tol
            )));
        }
        if self.max_refinements > 8 {
            return Err(Error::InvalidParameter(format!(
                "at most 8 refinements are supported, got {}",
                self.max_refinements
            )));
        }
        Ok(())
    }

    fn grid_at(&self, level: usize) -> usize {
        self.grid_points_per_axis << level
    }
}

/// Record of the grids used to produce a density.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRecord {
    pub grid_points_per_axis: usize,
    pub offset_fraction: f64,
    pub converged: bool,
    /// `(M, largest channel-entry change against the previous grid)`; the
    /// first grid has no predecessor and reports `NaN`.
    pub history: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMetadata {
    pub coin: String,
    pub coin_state: Vec4,
    pub position: String,
    pub quadrature: Option<QuadratureRecord>,
}

/// Validated 4x4 coin density operator.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedDensity {
    matrix: ComplexMatrix,
    metadata: DensityMetadata,
}

impl ReducedDensity {
    /// Checks Hermiticity (`1e-10`), unit trace (`1e-8`) and positivity
    /// (eigenvalues `>= -1e-10`).
    pub fn new(matrix: ComplexMatrix, metadata: DensityMetadata) -> Result<Self> {
        if matrix.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: matrix.dim(),
            });
        }
        let dev = matrix.hermiticity_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        density_spectrum(&matrix, 0.0)?;
        Ok(Self { matrix, metadata })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn metadata(&self) -> &DensityMetadata {
        &self.metadata
    }

    /// Ascending eigenvalues with round-off negatives clamped to zero.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let s = density_spectrum(&self.matrix, 0.0).expect("validated on construction");
        [s[0], s[1], s[2], s[3]]
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        entropy_of_spectrum(&self.eigenvalues()).min(2.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntanglementReport {
    pub entropy: f64,
    pub density: ReducedDensity,
    pub eigenvalues: [f64; 4],
    pub converged: bool,
    /// `(M, entropy)` on each grid that was evaluated.
    pub refinement_history: Vec<(usize, f64)>,
}

impl EntanglementReport {
    fn from_density(density: ReducedDensity, converged: bool, refinement_history: Vec<(usize, f64)>) -> Self {
        let eigenvalues = density.eigenvalues();
        Self {
            entropy: entropy_of_spectrum(&eigenvalues).min(2.0),
            density,
            eigenvalues,
            converged,
            refinement_history,
        }
    }
}

/// `sum_w P_w |chi><chi| P_w`.
pub fn pointwise_p_matrix(spec: &SpectralDecomposition, chi: &CoinState) -> ComplexMatrix {
    let x = chi.projector();
    spec.projectors()
        .iter()
        .fold(ComplexMatrix::zeros_unchecked(spec.dim()), |acc, p| acc + *p * x * *p)
}

// ---------------------------------------------------------------------------
// Channels

const PACKED: usize = 136;

/// Upper triangle (row-major, diagonal included) of a Hermitian 16x16 matrix.
#[derive(Clone)]
struct Channel([C64; PACKED]);

impl Channel {
    fn zero() -> Self {
        Self([ZERO; PACKED])
    }

    fn add_rank_one(&mut self, u: &[C64; 16]) {
        let mut idx = 0;
        for i in 0..16 {
            let ui = u[i];
            for uj in &u[i..] {
                self.0[idx] += ui * uj.conj();
                idx += 1;
            }
        }
    }

    /// Adds `P (x) conj(P)` for the projector onto `span(basis)`.
    fn add_projector(&mut self, basis: &[Vec4]) {
        for vi in basis {
            for vj in basis {
                let mut u = [ZERO; 16];
                for a in 0..4 {
                    for b in 0..4 {
                        u[4 * a + b] = vi[a] * vj[b].conj();
                    }
                }
                self.add_rank_one(&u);
            }
        }
    }

    fn axpy(&mut self, s: f64, other: &Channel) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b * s;
        }
    }

    fn scaled(mut self, s: f64) -> Self {
        for a in self.0.iter_mut() {
            *a *= s;
        }
        self
    }

    fn max_abs_diff(&self, other: &Channel) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Applies the channel to `|chi><chi|`.
    fn apply(&self, chi: &Vec4) -> ComplexMatrix {
        let mut x = [ZERO; 16];
        for c in 0..4 {
            for d in 0..4 {
                x[4 * c + d] = chi[c] * chi[d].conj();
            }
        }
        let mut y = [ZERO; 16];
        let mut idx = 0;
        for i in 0..16 {
            for j in i..16 {
                let t = self.0[idx];
                y[i] += t * x[j];
                if j != i {
                    y[j] += t.conj() * x[i];
                }
                idx += 1;
            }
        }
        let m = ComplexMatrix::from_fn(4, |a, b| y[4 * a + b]).expect("finite channel");
        m.hermitian_part()
    }
}

/// Real weight functions integrated against the projector sandwich.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum WeightKind {
    Unit,
    Cos(i64, i64),
    Sin(i64, i64),
    /// Width stored as raw bits so the kind can be hashed.
    Gaussian(u64),
}

#[derive(Clone, Copy)]
enum PreparedWeight {
    Unit,
    Cos(f64, f64),
    Sin(f64, f64),
    Gaussian { s2: f64, inv_norm: f64 },
}

impl WeightKind {
    fn prepare(self) -> Result<PreparedWeight> {
        Ok(match self {
            Self::Unit => PreparedWeight::Unit,
            Self::Cos(dx, dy) => PreparedWeight::Cos(dx as f64, dy as f64),
            Self::Sin(dx, dy) => PreparedWeight::Sin(dx as f64, dy as f64),
            Self::Gaussian(bits) => {
                let sigma = f64::from_bits(bits);
                PreparedWeight::Gaussian {
                    s2: sigma * sigma,
                    inv_norm: 1.0 / gaussian_norm(sigma)?,
                }
            }
        })
    }

    /// Gaussian channels are renormalized by the discrete weight sum so the
    /// trace stays exactly one on every grid.
    fn self_normalizing(self) -> bool {
        matches!(self, Self::Gaussian(_))
    }
}

impl PreparedWeight {
    fn eval(&self, kx: f64, ky: f64) -> f64 {
        match *self {
            Self::Unit => 1.0,
            Self::Cos(dx, dy) => (kx * dx + ky * dy).cos(),
            Self::Sin(dx, dy) => (kx * dx + ky * dy).sin(),
            Self::Gaussian { s2, inv_norm } => (-s2 * (kx * kx + ky * ky)).exp() * inv_norm,
        }
    }
}

/// Writes a position's Fourier weight as a real combination of weight kinds.
fn weight_expansion(pos: &PositionDistribution) -> Result<Vec<(WeightKind, f64)>> {
    if let PositionDistribution::GaussianIsotropic { sigma } = *pos {
        gaussian_norm(sigma)?;
        return Ok(vec![(WeightKind::Gaussian(sigma.to_bits()), 1.0)]);
    }
    let sites = pos.sites()?;
    let mut moments: BTreeMap<(i64, i64), C64> = BTreeMap::new();
    for ((x1, y1), a1) in &sites {
        for ((x2, y2), a2) in &sites {
            *moments.entry((x1 - x2, y1 - y2)).or_insert(ZERO) += a1 * a2.conj();
        }
    }
    let mut out = Vec::new();
    for ((dx, dy), c) in moments {
        if (dx, dy) == (0, 0) {
            out.push((WeightKind::Unit, c.re));
        } else if dx > 0 || (dx == 0 && dy > 0) {
            // c_{-d} = conj(c_d): the pair contributes 2 Re(c_d e^{ik.d}).
            if c.re != 0.0 {
                out.push((WeightKind::Cos(dx, dy), 2.0 * c.re));
            }
            if c.im != 0.0 {
                out.push((WeightKind::Sin(dx, dy), -2.0 * c.im));
            }
        }
    }
    Ok(out)
}

/// Per-point integrand: `sum_w P_w (x) conj(P_w)` at one wave vector.
fn accumulate_point(
    coin: &ComplexMatrix,
    hadamard: bool,
    k: WaveVector,
    out: &mut Channel,
) -> Result<()> {
    let u = uk_from_matrix(coin, k);
    if hadamard {
        if let Some(pairs) = hadamard_eigenpairs(&u, k) {
            for (_, v) in &pairs {
                out.add_projector(std::slice::from_ref(v));
            }
            return Ok(());
        }
    }
    let dec = unitary_eigen(&u, DEGENERACY_TOL)?;
    for i in 0..dec.len() {
        out.add_projector(dec.basis(i));
    }
    Ok(())
}

/// One pass over an `M x M` grid, integrating every requested weight.
fn integrate_grid(
    coin: &ComplexMatrix,
    hadamard: bool,
    m: usize,
    offset: f64,
    kinds: &[WeightKind],
) -> Result<Vec<Channel>> {
    let weights: Vec<PreparedWeight> = kinds.iter().map(|k| k.prepare()).collect::<Result<_>>()?;
    let h = 2.0 * PI / m as f64;
    let chunks = GRID_CHUNKS.min(m);
    let rows_per_chunk = m / chunks;

    let partials: Vec<(Vec<Channel>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut acc = vec![Channel::zero(); kinds.len()];
            let mut wsum = vec![0.0; kinds.len()];
            let mut point = Channel::zero();
            for i in chunk * rows_per_chunk..(chunk + 1) * rows_per_chunk {
                let kx = -PI + (i as f64 + offset) * h;
                for j in 0..m {
                    let ky = -PI + (j as f64 + offset) * h;
                    point.0 = [ZERO; PACKED];
                    accumulate_point(coin, hadamard, WaveVector::new_unchecked(kx, ky), &mut point)?;
                    for (n, w) in weights.iter().enumerate() {
                        let wk = w.eval(kx, ky);
                        acc[n].axpy(wk, &point);
                        wsum[n] += wk;
                    }
                }
            }
            Ok((acc, wsum))
        })
        .collect::<Result<_>>()?;

    let mut total = vec![Channel::zero(); kinds.len()];
    let mut wtotal = vec![0.0; kinds.len()];
    for (acc, wsum) in &partials {
        for n in 0..kinds.len() {
            total[n].axpy(1.0, &acc[n]);
            wtotal[n] += wsum[n];
        }
    }
    let points = (m * m) as f64;
    Ok(total
        .into_iter()
        .zip(kinds)
        .zip(wtotal)
        .map(|((c, kind), ws)| {
            let denom = if kind.self_normalizing() { ws } else { points };
            c.scaled(1.0 / denom)
        })
        .collect())
}

/// Uniform-limit channel: the direction-averaged limit of the projector
/// sandwich as `k -> 0`.
///
/// Near the origin `U_k = (1 + i|k| G(theta)) U_C + O(k^2)` with
/// `G = diag(-cos, sin, -sin, cos)`. Degenerate eigenspaces of the coin split
/// along the eigenvectors of `G` compressed onto them.
fn uniform_limit_channel(coin: &CoinOperator) -> Result<Channel> {
    let dec = unitary_eigen(coin.matrix(), DEGENERACY_TOL)?;
    let mut total = Channel::zero();
    for j in 0..UNIFORM_LIMIT_DIRECTIONS {
        let theta = (j as f64 + 0.5) * PI / UNIFORM_LIMIT_DIRECTIONS as f64;
        let g = [-theta.cos(), theta.sin(), -theta.sin(), theta.cos()];
        let mut dir = Channel::zero();
        for c in 0..dec.len() {
            let basis = dec.basis(c);
            if basis.len() == 1 {
                dir.add_projector(basis);
                continue;
            }
            let r = basis.len();
            let mut a = [[ZERO; 4]; 4];
            for p in 0..r {
                for q in 0..r {
                    a[p][q] = (0..4).map(|i| basis[p][i].conj() * g[i] * basis[q][i]).sum();
                }
            }
            let (vals, w) = jacobi_hermitian(a, r);
            let rotated: Vec<Vec4> = (0..r)
                .map(|col| {
                    let mut v = [ZERO; 4];
                    for (p, bp) in basis.iter().enumerate() {
                        for i in 0..4 {
                            v[i] += bp[i] * w[p][col];
                        }
                    }
                    v
                })
                .collect();
            let mut start = 0;
            for end in 1..=r {
                if end == r || vals[end] - vals[end - 1] > DEGENERACY_TOL {
                    dir.add_projector(&rotated[start..end]);
                    start = end;
                }
            }
        }
        total.axpy(1.0, &dir);
    }
    Ok(total.scaled(1.0 / UNIFORM_LIMIT_DIRECTIONS as f64))
}

// ---------------------------------------------------------------------------
// Solver

struct Levels {
    channels: Vec<Channel>,
    converged: bool,
    history: Vec<(usize, f64)>,
}

/// Computes asymptotic densities for one coin, reusing integrated channels
/// across coin states and position parameters.
pub struct AsymptoticSolver {
    coin: CoinOperator,
    quad: QuadratureSpec,
    route: SpectrumRoute,
    cache: Mutex<HashMap<WeightKind, Vec<Arc<Channel>>>>,
    uniform: Mutex<Option<Arc<Channel>>>,
}

impl AsymptoticSolver {
    pub fn new(coin: CoinOperator, quad: QuadratureSpec) -> Result<Self> {
        quad.validate()?;
        if coin.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: coin.dim(),
            });
        }
        Ok(Self {
            coin,
            quad,
            route: SpectrumRoute::Auto,
            cache: Mutex::new(HashMap::new()),
            uniform: Mutex::new(None),
        })
    }

    /// Forces the generic eigensolver even for the `H (x) H` coin.
    pub fn with_route(mut self, route: SpectrumRoute) -> Self {
        self.route = route;
        self
    }

    pub fn coin(&self) -> &CoinOperator {
        &self.coin
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }

    fn cached(&self, kind: WeightKind, level: usize) -> Option<Arc<Channel>> {
        self.cache.lock().unwrap().get(&kind).and_then(|v| v.get(level).cloned())
    }

    /// Makes sure every kind has channels for levels `0..=level`.
    // The cache lock is never held across a parallel pass: a rayon worker
    // blocked on it could otherwise be asked to run a task that needs it.
    fn ensure_level(&self, kinds: &[WeightKind], level: usize) -> Result<()> {
        for l in 0..=level {
            let missing: Vec<WeightKind> = kinds.iter().copied().filter(|k| self.cached(*k, l).is_none()).collect();
            if missing.is_empty() {
                continue;
            }
            let hadamard = self.route == SpectrumRoute::Auto && self.coin.is_hadamard_tensor();
            let fresh = integrate_grid(
                self.coin.matrix(),
                hadamard,
                self.quad.grid_at(l),
                self.quad.offset_fraction,
                &missing,
            )?;
            let mut cache = self.cache.lock().unwrap();
            for (kind, ch) in missing.into_iter().zip(fresh) {
                let entry = cache.entry(kind).or_default();
                if entry.len() == l {
                    entry.push(Arc::new(ch));
                }
            }
        }
        Ok(())
    }

    fn levels(&self, expansion: &[(WeightKind, f64)]) -> Result<Levels> {
        let kinds: Vec<WeightKind> = expansion.iter().map(|(k, _)| *k).collect();
        let combine = |level: usize| -> Channel {
            let mut c = Channel::zero();
            for (kind, coef) in expansion {
                c.axpy(*coef, &self.cached(*kind, level).expect("level ensured"));
            }
            c
        };
        self.ensure_level(&kinds, 0)?;
        let mut channels = vec![combine(0)];
        let mut history = vec![(self.quad.grid_at(0), f64::NAN)];
        let mut converged = false;
        for level in 1..=self.quad.max_refinements {
            self.ensure_level(&kinds, level)?;
            let next = combine(level);
            let change = next.max_abs_diff(channels.last().unwrap());
            history.push((self.quad.grid_at(level), change));
            channels.push(next);
            if change < self.quad.refine_tol {
                converged = true;
                break;
            }
        }
        Ok(Levels {
            channels,
            converged,
            history,
        })
    }

    fn uniform_channel(&self) -> Result<Arc<Channel>> {
        if let Some(c) = self.uniform.lock().unwrap().as_ref() {
            return Ok(c.clone());
        }
        let c = Arc::new(uniform_limit_channel(&self.coin)?);
        *self.uniform.lock().unwrap() = Some(c.clone());
        Ok(c)
    }

    /// Integrates the channels needed by `positions` ahead of time.
    pub fn prepare(&self, positions: &[PositionDistribution]) -> Result<()> {
        for pos in positions {
            if *pos == PositionDistribution::UniformLimit {
                self.uniform_channel()?;
            } else {
                self.levels(&weight_expansion(pos)?)?;
            }
        }
        Ok(())
    }

    fn metadata(&self, chi: &CoinState, pos: &PositionDistribution, quadrature: Option<QuadratureRecord>) -> DensityMetadata {
        DensityMetadata {
            coin: self.coin.label().to_string(),
            coin_state: *chi.amplitudes(),
            position: pos.to_string(),
            quadrature,
        }
    }

    /// Full report; a grid sequence that did not settle is flagged through
    /// `converged` rather than returned as an error.
    pub fn evaluate(&self, chi: &CoinState, pos: &PositionDistribution) -> Result<EntanglementReport> {
        if *pos == PositionDistribution::UniformLimit {
            let ch = self.uniform_channel()?;
            let density = ReducedDensity::new(ch.apply(chi.amplitudes()), self.metadata(chi, pos, None))?;
            let report = EntanglementReport::from_density(density, true, Vec::new());
            return Ok(report);
        }
        let levels = self.levels(&weight_expansion(pos)?)?;
        let mut entropy_history = Vec::with_capacity(levels.channels.len());
        for (ch, (m, _)) in levels.channels.iter().zip(&levels.history) {
            let spec = density_spectrum(&ch.apply(chi.amplitudes()), 0.0)?;
            entropy_history.push((*m, entropy_of_spectrum(&spec).min(2.0)));
        }
        let record = QuadratureRecord {
            grid_points_per_axis: levels.history.last().unwrap().0,
            offset_fraction: self.quad.offset_fraction,
            converged: levels.converged,
            history: levels.history.clone(),
        };
        let matrix = levels.channels.last().unwrap().apply(chi.amplitudes());
        let density = ReducedDensity::new(matrix, self.metadata(chi, pos, Some(record)))?;
        Ok(EntanglementReport::from_density(density, levels.converged, entropy_history))
    }

    /// Like [`Self::evaluate`] but non-convergence is an error.
    pub fn entanglement(&self, chi: &CoinState, pos: &PositionDistribution) -> Result<EntanglementReport> {
        let report = self.evaluate(chi, pos)?;
        if !report.converged {
            let history = report
                .density
                .metadata()
                .quadrature
                .as_ref()
                .map(|q| q.history.clone())
                .unwrap_or_default();
            return Err(Error::NonConvergence { history });
        }
        Ok(report)
    }

    pub fn reduced_density(&self, chi: &CoinState, pos: &PositionDistribution) -> Result<ReducedDensity> {
        Ok(self.entanglement(chi, pos)?.density)
    }
}

/// Asymptotic reduced coin density for the given initial state.
///
/// [`PositionDistribution::UniformLimit`] is routed to
/// [`uniform_limit_reduced_density`].
pub fn asymptotic_reduced_density(
    coin: &CoinOperator,
    chi: &CoinState,
    pos: &PositionDistribution,
    quad: &QuadratureSpec,
) -> Result<ReducedDensity> {
    AsymptoticSolver::new(coin.clone(), *quad)?.reduced_density(chi, pos)
}

/// Reduced density for an initial position spread uniformly over the plane.
///
/// The Fourier weight collapses onto `k = 0`; the result is the
/// direction-averaged limit of the projector sandwich there.
pub fn uniform_limit_reduced_density(coin: &CoinOperator, chi: &CoinState) -> Result<ReducedDensity> {
    let pos = PositionDistribution::UniformLimit;
    let solver = AsymptoticSolver::new(coin.clone(), QuadratureSpec::default())?;
    Ok(solver.evaluate(chi, &pos)?.density)
}

pub fn asymptotic_entanglement(
    coin: &CoinOperator,
    chi: &CoinState,
    pos: &PositionDistribution,
    quad: &QuadratureSpec,
) -> Result<EntanglementReport> {
    AsymptoticSolver::new(coin.clone(), *quad)?.entanglement(chi, pos)
}

/// Asymptotic entanglement of the one-dimensional Hadamard walk started at the
/// origin with coin `cos t |L> + e^{ip} sin t |R>`.
pub fn oned_closed_form_cpe(theta: f64, phi: f64) -> f64 {
    let delta0 = (2f64.sqrt() - 1.0) / 2.0;
    let b1 = (2.0 - 2f64.sqrt()) / 4.0;
    let radicand = 1.0 - 4.0 * (delta0 - 2.0 * b1 * b1 * (4.0 * theta).sin() * phi.cos());
    debug_assert!(radicand >= -1e-15, "radicand {radicand}");
    let lambda = 0.5 * (1.0 + radicand.max(0.0).sqrt());
    binary_entropy(lambda)
}

/// Two-dimensional entanglement of a separable coin against the sum of the
/// one-dimensional values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdditivityGap {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

impl AsymptoticSolver {
    pub fn additivity_check(&self, theta1: f64, phi1: f64, theta2: f64, phi2: f64) -> Result<AdditivityGap> {
        let chi = CoinState::separable(theta1, phi1, theta2, phi2);
        let lhs = self.entanglement(&chi, &PositionDistribution::origin())?.entropy;
        let rhs = oned_closed_form_cpe(theta1, phi1) + oned_closed_form_cpe(theta2, phi2);
        Ok(AdditivityGap {
            lhs,
            rhs,
            gap: (lhs - rhs).abs(),
        })
    }
}

/// Checks `E_2D = E_1D(t1, p1) + E_1D(t2, p2)` for the `H (x) H` walk from
/// the origin.
pub fn additivity_check(theta1: f64, phi1: f64, theta2: f64, phi2: f64, quad: &QuadratureSpec) -> Result<AdditivityGap> {
    AsymptoticSolver::new(CoinOperator::hadamard_tensor(), *quad)?.additivity_check(theta1, phi1, theta2, phi2)
}
