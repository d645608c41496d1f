//! Initial coin states and initial position distributions.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_complex::Complex64 as C64;
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::kspace::WaveVector;
use crate::linalg::{binary_entropy, norm_sqr, ComplexMatrix, Vec4, ZERO};

const NORM_TOL: f64 = 1e-12;

/// Normalized two-qubit coin amplitudes in the basis (LL, LR, RL, RR).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoinState {
    amps: Vec4,
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

impl CoinState {
    /// Accepts amplitudes whose squared norm is 1 within `1e-12`.
    pub fn new(amps: Vec4) -> Result<Self> {
        let n2 = norm_sqr(&amps);
        if !n2.is_finite() || (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { amps })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(mut amps: Vec4) -> Result<Self> {
        let n2 = norm_sqr(&amps);
        if !(n2 > 0.0 && n2.is_finite()) {
            return Err(Error::NotNormalized(n2));
        }
        let n = n2.sqrt();
        for z in amps.iter_mut() {
            *z /= n;
        }
        Ok(Self { amps })
    }

    /// `|j>` for `j` in `0..4`.
    pub fn basis(j: usize) -> Result<Self> {
        if j >= 4 {
            return Err(Error::InvalidParameter(format!("coin basis index {j} out of range")));
        }
        let mut amps = [ZERO; 4];
        amps[j] = re(1.0);
        Ok(Self { amps })
    }

    /// `|L> (x) (cos t |L> + e^{ip} sin t |R>)`.
    pub fn family_i(theta: f64, phi: f64) -> Self {
        Self {
            amps: [re(theta.cos()), C64::from_polar(theta.sin(), phi), ZERO, ZERO],
        }
    }

    /// `cos t |LR> + e^{ip} sin t |RL>`.
    pub fn family_ii(theta: f64, phi: f64) -> Self {
        Self {
            amps: [ZERO, re(theta.cos()), C64::from_polar(theta.sin(), phi), ZERO],
        }
    }

    /// `cos t |LL> + e^{ip} sin t |RR>`.
    pub fn family_iii(theta: f64, phi: f64) -> Self {
        Self {
            amps: [re(theta.cos()), ZERO, ZERO, C64::from_polar(theta.sin(), phi)],
        }
    }

    /// Product of two one-qubit states `cos t |L> + e^{ip} sin t |R>`.
    pub fn separable(theta1: f64, phi1: f64, theta2: f64, phi2: f64) -> Self {
        let a = [re(theta1.cos()), C64::from_polar(theta1.sin(), phi1)];
        let b = [re(theta2.cos()), C64::from_polar(theta2.sin(), phi2)];
        Self {
            amps: [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]],
        }
    }

    pub fn bell_psi_plus() -> Self {
        Self::family_ii(PI / 4.0, 0.0)
    }

    pub fn bell_psi_minus() -> Self {
        Self {
            amps: [ZERO, re(FRAC_1_SQRT_2), re(-FRAC_1_SQRT_2), ZERO],
        }
    }

    pub fn bell_phi_plus() -> Self {
        Self::family_iii(PI / 4.0, 0.0)
    }

    pub fn bell_phi_minus() -> Self {
        Self {
            amps: [re(FRAC_1_SQRT_2), ZERO, ZERO, re(-FRAC_1_SQRT_2)],
        }
    }

    pub fn amplitudes(&self) -> &Vec4 {
        &self.amps
    }

    /// `|chi><chi|`.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer_unchecked(4, &self.amps, &self.amps)
    }
}

/// Entanglement between the two coin qubits, in bits.
pub fn coin_coin_entropy(chi: &CoinState) -> f64 {
    let c = chi.amplitudes();
    // The one-qubit reduced state has trace 1 and determinant |c1 c4 - c2 c3|^2.
    let det = (c[0] * c[3] - c[1] * c[2]).norm_sqr();
    let disc = (1.0 - 4.0 * det).max(0.0).sqrt();
    binary_entropy(0.5 * (1.0 + disc))
}

/// Initial position amplitudes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PositionDistribution {
    /// The walker starts on a single site.
    PointMass { x: i64, y: i64 },
    /// `cos a |-1, 0> + e^{ib} sin a |1, 0>`.
    TwoSiteSeparable { alpha: f64, beta: f64 },
    /// `cos a |-1, 1> + e^{ib} sin a |1, -1>`.
    TwoSiteEntangled { alpha: f64, beta: f64 },
    /// Amplitudes proportional to `exp(-(x^2 + y^2) / 2 sigma^2)`.
    GaussianIsotropic { sigma: f64 },
    /// The infinitely wide limit, concentrated at `k = 0`.
    UniformLimit,
}

impl PositionDistribution {
    pub fn origin() -> Self {
        Self::PointMass { x: 0, y: 0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::PointMass { .. } => "point",
            Self::TwoSiteSeparable { .. } => "two-site-separable",
            Self::TwoSiteEntangled { .. } => "two-site-entangled",
            Self::GaussianIsotropic { .. } => "gaussian",
            Self::UniformLimit => "uniform",
        }
    }

    pub fn is_finite_support(&self) -> bool {
        matches!(
            self,
            Self::PointMass { .. } | Self::TwoSiteSeparable { .. } | Self::TwoSiteEntangled { .. }
        )
    }

    /// Nonzero amplitudes of finite-support distributions.
    pub fn sites(&self) -> Result<Vec<((i64, i64), C64)>> {
        let two = |a: (i64, i64), b: (i64, i64), alpha: f64, beta: f64| {
            vec![(a, re(alpha.cos())), (b, C64::from_polar(alpha.sin(), beta))]
        };
        match *self {
            Self::PointMass { x, y } => Ok(vec![((x, y), re(1.0))]),
            Self::TwoSiteSeparable { alpha, beta } => Ok(two((-1, 0), (1, 0), alpha, beta)),
            Self::TwoSiteEntangled { alpha, beta } => Ok(two((-1, 1), (1, -1), alpha, beta)),
            other => Err(Error::UnsupportedPosition(other.name())),
        }
    }

    /// Largest `max(|x|, |y|)` over the support.
    pub fn support_radius(&self) -> Result<i64> {
        Ok(self
            .sites()?
            .iter()
            .map(|((x, y), _)| x.abs().max(y.abs()))
            .max()
            .unwrap_or(0))
    }

    /// `|sum_r a(r) e^{ik.r}|^2`, normalized to mean 1 over the Brillouin zone.
    pub fn fourier_weight(&self, k: WaveVector) -> Result<f64> {
        match *self {
            Self::GaussianIsotropic { sigma } => {
                let z = gaussian_norm(sigma)?;
                Ok((-(sigma * sigma) * (k.kx() * k.kx() + k.ky() * k.ky())).exp() / z)
            }
            Self::UniformLimit => Err(Error::UnsupportedPosition(self.name())),
            _ => {
                let amp: C64 = self
                    .sites()?
                    .iter()
                    .map(|((x, y), a)| a * C64::from_polar(1.0, k.kx() * *x as f64 + k.ky() * *y as f64))
                    .sum();
                Ok(amp.norm_sqr())
            }
        }
    }
}

/// Torus mean of `exp(-sigma^2 |k|^2)` over `[-pi, pi]^2`.
pub(crate) fn gaussian_norm(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("gaussian width must be positive, got {sigma}")));
    }
    let axis = erf(PI * sigma) / (2.0 * sigma * PI.sqrt());
    Ok(axis * axis)
}

impl fmt::Display for PositionDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PointMass { x, y } => write!(f, "point({x},{y})"),
            Self::TwoSiteSeparable { alpha, beta } => write!(f, "two-site-separable(alpha={alpha},beta={beta})"),
            Self::TwoSiteEntangled { alpha, beta } => write!(f, "two-site-entangled(alpha={alpha},beta={beta})"),
            Self::GaussianIsotropic { sigma } => write!(f, "gaussian(sigma={sigma})"),
            Self::UniformLimit => write!(f, "uniform"),
        }
    }
}

/// Entanglement between the `x` and `y` coordinates of a two-site entangled
/// position state, in bits.
pub fn position_position_entropy(pos: &PositionDistribution) -> Result<f64> {
    match pos {
        PositionDistribution::TwoSiteEntangled { alpha, .. } => Ok(binary_entropy(alpha.cos().powi(2))),
        other => Err(Error::UnsupportedPosition(other.name())),
    }
}
