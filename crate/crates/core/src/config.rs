//! TOML run configuration.
//!
//! Angles are written in units of pi (`theta = 0.25` means pi/4). Every
//! section is optional; omitted values fall back to the Hadamard walk from
//! the origin with coin |LL>.
//!
//! ```toml
//! [coin]
//! kind = "hadamard"          # hadamard | grover | dft | identity | custom
//!
//! [state]
//! family = "II"              # I | II | III | separable | basis | bell-psi-plus | ... | custom
//! theta = 0.25
//! phi = 0.0
//!
//! [position]
//! kind = "point"             # point | two-site-separable | two-site-entangled | gaussian | uniform
//!
//! [quadrature]
//! grid = 512
//!
//! [[sweep.axes]]
//! name = "theta"
//! min = -0.5
//! max = 0.5
//! count = 41
//! ```

use std::f64::consts::PI;
use std::path::PathBuf;

use num_complex::Complex64 as C64;
use serde::Deserialize;

use crate::asymptotics::QuadratureSpec;
use crate::coin::CoinOperator;
use crate::error::{Error, Result};
use crate::states::{CoinState, PositionDistribution};

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub coin: CoinConfig,
    #[serde(default)]
    pub state: StateConfig,
    #[serde(default)]
    pub position: PositionConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub simulate: SimulateConfig,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CoinConfig {
    #[serde(default = "default_coin_kind")]
    pub kind: String,
    /// Row-major (re, im) pairs for `kind = "custom"`.
    pub matrix: Option<Vec<f64>>,
}

fn default_coin_kind() -> String {
    "hadamard".into()
}

impl Default for CoinConfig {
    fn default() -> Self {
        Self {
            kind: default_coin_kind(),
            matrix: None,
        }
    }
}

impl CoinConfig {
    pub fn build(&self) -> Result<CoinOperator> {
        if self.matrix.is_some() && self.kind != "custom" {
            return Err(Error::InvalidParameter("coin.matrix is only used with kind = \"custom\"".into()));
        }
        match self.kind.as_str() {
            "hadamard" => Ok(CoinOperator::hadamard_tensor()),
            "grover" => Ok(CoinOperator::grover4()),
            "dft" => Ok(CoinOperator::dft4()),
            "identity" => CoinOperator::identity(4),
            "custom" => {
                let m = self
                    .matrix
                    .as_ref()
                    .ok_or_else(|| Error::InvalidParameter("custom coin needs coin.matrix".into()))?;
                if m.len() != 32 {
                    return Err(Error::InvalidParameter(format!("coin.matrix needs 32 reals, got {}", m.len())));
                }
                CoinOperator::from_interleaved(m, "custom")
            }
            other => Err(Error::InvalidParameter(format!("unknown coin kind '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    #[serde(default = "default_family")]
    pub family: String,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub theta1: Option<f64>,
    pub phi1: Option<f64>,
    pub theta2: Option<f64>,
    pub phi2: Option<f64>,
    /// Basis index 0..4 in the order LL, LR, RL, RR.
    pub index: Option<usize>,
    /// Interleaved (re, im) amplitudes for `family = "custom"`.
    pub amplitudes: Option<Vec<f64>>,
}

fn default_family() -> String {
    "basis".into()
}

impl Default for StateConfig {
    fn default() -> Self {
        Self {
            family: default_family(),
            theta: None,
            phi: None,
            theta1: None,
            phi1: None,
            theta2: None,
            phi2: None,
            index: None,
            amplitudes: None,
        }
    }
}

/// Parameters an axis may sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisName {
    Theta,
    Phi,
    Theta1,
    Phi1,
    Theta2,
    Phi2,
    Alpha,
    Beta,
}

impl AxisName {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "theta" => Self::Theta,
            "phi" => Self::Phi,
            "theta1" => Self::Theta1,
            "phi1" => Self::Phi1,
            "theta2" => Self::Theta2,
            "phi2" => Self::Phi2,
            "alpha" => Self::Alpha,
            "beta" => Self::Beta,
            other => return Err(Error::InvalidParameter(format!("unknown sweep axis '{other}'"))),
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Theta => "theta",
            Self::Phi => "phi",
            Self::Theta1 => "theta1",
            Self::Phi1 => "phi1",
            Self::Theta2 => "theta2",
            Self::Phi2 => "phi2",
            Self::Alpha => "alpha",
            Self::Beta => "beta",
        }
    }

    /// Allowed range in units of pi.
    fn domain(&self) -> (f64, f64) {
        match self {
            Self::Theta | Self::Theta1 | Self::Theta2 | Self::Alpha => (-0.5, 0.5),
            Self::Phi | Self::Phi1 | Self::Phi2 | Self::Beta => (-1.0, 1.0),
        }
    }
}

impl StateConfig {
    fn angle(v: Option<f64>) -> f64 {
        v.unwrap_or(0.0) * PI
    }

    fn reject_unused(&self, allowed: &[&str]) -> Result<()> {
        let present = [
            ("theta", self.theta.is_some()),
            ("phi", self.phi.is_some()),
            ("theta1", self.theta1.is_some()),
            ("phi1", self.phi1.is_some()),
            ("theta2", self.theta2.is_some()),
            ("phi2", self.phi2.is_some()),
            ("index", self.index.is_some()),
            ("amplitudes", self.amplitudes.is_some()),
        ];
        for (name, set) in present {
            if set && !allowed.contains(&name) {
                return Err(Error::InvalidParameter(format!(
                    "state.{name} does not apply to family '{}'",
                    self.family
                )));
            }
        }
        Ok(())
    }

    /// Names of the angles this family reads.
    pub fn angle_names(&self) -> &'static [&'static str] {
        match self.family.as_str() {
            "I" | "II" | "III" => &["theta", "phi"],
            "separable" => &["theta1", "phi1", "theta2", "phi2"],
            _ => &[],
        }
    }

    pub fn build(&self) -> Result<CoinState> {
        let mut allowed: Vec<&str> = self.angle_names().to_vec();
        match self.family.as_str() {
            "basis" => allowed.push("index"),
            "custom" => allowed.push("amplitudes"),
            _ => {}
        }
        self.reject_unused(&allowed)?;
        let (t, p) = (Self::angle(self.theta), Self::angle(self.phi));
        Ok(match self.family.as_str() {
            "I" => CoinState::family_i(t, p),
            "II" => CoinState::family_ii(t, p),
            "III" => CoinState::family_iii(t, p),
            "separable" => CoinState::separable(
                Self::angle(self.theta1),
                Self::angle(self.phi1),
                Self::angle(self.theta2),
                Self::angle(self.phi2),
            ),
            "basis" => CoinState::basis(self.index.unwrap_or(0))?,
            "bell-psi-plus" => CoinState::bell_psi_plus(),
            "bell-psi-minus" => CoinState::bell_psi_minus(),
            "bell-phi-plus" => CoinState::bell_phi_plus(),
            "bell-phi-minus" => CoinState::bell_phi_minus(),
            "custom" => {
                let a = self
                    .amplitudes
                    .as_ref()
                    .ok_or_else(|| Error::InvalidParameter("custom state needs state.amplitudes".into()))?;
                if a.len() != 8 {
                    return Err(Error::InvalidParameter(format!("state.amplitudes needs 8 reals, got {}", a.len())));
                }
                CoinState::normalized(std::array::from_fn(|j| C64::new(a[2 * j], a[2 * j + 1])))?
            }
            other => return Err(Error::InvalidParameter(format!("unknown state family '{other}'"))),
        })
    }

    pub(crate) fn set_axis(&mut self, axis: AxisName, value: f64) -> bool {
        if !self.angle_names().contains(&axis.as_str()) {
            return false;
        }
        let slot = match axis {
            AxisName::Theta => &mut self.theta,
            AxisName::Phi => &mut self.phi,
            AxisName::Theta1 => &mut self.theta1,
            AxisName::Phi1 => &mut self.phi1,
            AxisName::Theta2 => &mut self.theta2,
            AxisName::Phi2 => &mut self.phi2,
            AxisName::Alpha | AxisName::Beta => return false,
        };
        *slot = Some(value);
        true
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PositionConfig {
    #[serde(default = "default_position")]
    pub kind: String,
    pub x: Option<i64>,
    pub y: Option<i64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub sigma: Option<f64>,
}

fn default_position() -> String {
    "point".into()
}

impl Default for PositionConfig {
    fn default() -> Self {
        Self {
            kind: default_position(),
            x: None,
            y: None,
            alpha: None,
            beta: None,
            sigma: None,
        }
    }
}

impl PositionConfig {
    fn reject_unused(&self, allowed: &[&str]) -> Result<()> {
        let present = [
            ("x", self.x.is_some()),
            ("y", self.y.is_some()),
            ("alpha", self.alpha.is_some()),
            ("beta", self.beta.is_some()),
            ("sigma", self.sigma.is_some()),
        ];
        for (name, set) in present {
            if set && !allowed.contains(&name) {
                return Err(Error::InvalidParameter(format!(
                    "position.{name} does not apply to kind '{}'",
                    self.kind
                )));
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<PositionDistribution> {
        let alpha = self.alpha.unwrap_or(0.0) * PI;
        let beta = self.beta.unwrap_or(0.0) * PI;
        match self.kind.as_str() {
            "point" => {
                self.reject_unused(&["x", "y"])?;
                Ok(PositionDistribution::PointMass {
                    x: self.x.unwrap_or(0),
                    y: self.y.unwrap_or(0),
                })
            }
            "two-site-separable" => {
                self.reject_unused(&["alpha", "beta"])?;
                Ok(PositionDistribution::TwoSiteSeparable { alpha, beta })
            }
            "two-site-entangled" => {
                self.reject_unused(&["alpha", "beta"])?;
                Ok(PositionDistribution::TwoSiteEntangled { alpha, beta })
            }
            "gaussian" => {
                self.reject_unused(&["sigma"])?;
                let sigma = self
                    .sigma
                    .ok_or_else(|| Error::InvalidParameter("gaussian position needs position.sigma".into()))?;
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::InvalidParameter(format!("position.sigma must be positive, got {sigma}")));
                }
                Ok(PositionDistribution::GaussianIsotropic { sigma })
            }
            "uniform" => {
                self.reject_unused(&[])?;
                Ok(PositionDistribution::UniformLimit)
            }
            other => Err(Error::InvalidParameter(format!("unknown position kind '{other}'"))),
        }
    }

    pub(crate) fn set_axis(&mut self, axis: AxisName, value: f64) -> bool {
        let two_site = matches!(self.kind.as_str(), "two-site-separable" | "two-site-entangled");
        match axis {
            AxisName::Alpha if two_site => self.alpha = Some(value),
            AxisName::Beta if two_site => self.beta = Some(value),
            _ => return false,
        }
        true
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default = "default_offset")]
    pub offset: f64,
    #[serde(default = "default_refine_tol")]
    pub refine_tol: f64,
    #[serde(default = "default_max_refinements")]
    pub max_refinements: usize,
}

fn default_grid() -> usize {
    QuadratureSpec::default().grid_points_per_axis
}
fn default_offset() -> f64 {
    QuadratureSpec::default().offset_fraction
}
fn default_refine_tol() -> f64 {
    QuadratureSpec::default().refine_tol
}
fn default_max_refinements() -> usize {
    QuadratureSpec::default().max_refinements
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            grid: default_grid(),
            offset: default_offset(),
            refine_tol: default_refine_tol(),
            max_refinements: default_max_refinements(),
        }
    }
}

impl QuadratureConfig {
    pub fn build(&self) -> Result<QuadratureSpec> {
        let q = QuadratureSpec {
            grid_points_per_axis: self.grid,
            offset_fraction: self.offset,
            refine_tol: self.refine_tol,
            max_refinements: self.max_refinements,
        };
        q.validate()?;
        Ok(q)
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub name: String,
    /// Lower end in units of pi.
    pub min: f64,
    /// Upper end in units of pi.
    pub max: f64,
    pub count: usize,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axes: Vec<AxisConfig>,
}

/// A validated sweep axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub name: AxisName,
    pub values: Vec<f64>,
}

impl SweepConfig {
    pub fn axes(&self) -> Result<Vec<Axis>> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::InvalidParameter(format!(
                "a sweep needs one or two axes, got {}",
                self.axes.len()
            )));
        }
        let mut out = Vec::new();
        for a in &self.axes {
            let name = AxisName::parse(&a.name)?;
            if out.iter().any(|o: &Axis| o.name == name) {
                return Err(Error::InvalidParameter(format!("axis '{}' listed twice", a.name)));
            }
            if a.count < 2 {
                return Err(Error::InvalidParameter(format!("axis '{}' needs count >= 2", a.name)));
            }
            let (lo, hi) = name.domain();
            let eps = 1e-12;
            if !(a.min >= lo - eps && a.max <= hi + eps && a.min < a.max) {
                return Err(Error::InvalidParameter(format!(
                    "axis '{}' range [{}, {}] must be increasing within [{lo}, {hi}] (units of pi)",
                    a.name, a.min, a.max
                )));
            }
            let values = (0..a.count)
                .map(|i| a.min + (a.max - a.min) * i as f64 / (a.count - 1) as f64)
                .collect();
            out.push(Axis { name, values });
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Inclusive step range averaged for the reported value; defaults to the
    /// last eleven steps.
    pub window: Option<[usize; 2]>,
}

fn default_steps() -> usize {
    200
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            steps: default_steps(),
            window: None,
        }
    }
}

impl SimulateConfig {
    pub fn window(&self) -> Result<(usize, usize)> {
        let (lo, hi) = match self.window {
            Some([lo, hi]) => (lo, hi),
            None => (self.steps.saturating_sub(10), self.steps),
        };
        if lo > hi || hi > self.steps {
            return Err(Error::InvalidParameter(format!(
                "simulate.window [{lo}, {hi}] must be ordered and end by step {}",
                self.steps
            )));
        }
        Ok((lo, hi))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    /// Copy of this configuration with one swept parameter set (units of pi).
    pub fn with_axis(&self, axis: AxisName, value: f64) -> Result<Self> {
        let mut c = self.clone();
        if !(c.state.set_axis(axis, value) || c.position.set_axis(axis, value)) {
            return Err(Error::InvalidParameter(format!(
                "axis '{}' does not apply to state family '{}' with position '{}'",
                axis.as_str(),
                self.state.family,
                self.position.kind
            )));
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_uses_defaults() {
        let c = RunConfig::from_toml("").unwrap();
        assert!(c.coin.build().unwrap().is_hadamard_tensor());
        assert_eq!(c.state.build().unwrap(), CoinState::basis(0).unwrap());
        assert_eq!(c.position.build().unwrap(), PositionDistribution::origin());
        assert_eq!(c.quadrature.build().unwrap(), QuadratureSpec::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("[state]\nfamly = \"II\"\n").is_err());
        assert!(RunConfig::from_toml("colour = 3\n").is_err());
    }

    #[test]
    fn angles_are_in_units_of_pi() {
        let c = RunConfig::from_toml("[state]\nfamily = \"II\"\ntheta = 0.25\n").unwrap();
        assert_eq!(c.state.build().unwrap(), CoinState::bell_psi_plus());
    }

    #[test]
    fn mismatched_parameters_are_rejected() {
        let c = RunConfig::from_toml("[state]\nfamily = \"bell-psi-plus\"\ntheta = 0.1\n").unwrap();
        assert!(c.state.build().is_err());
        let c = RunConfig::from_toml("[position]\nkind = \"point\"\nalpha = 0.1\n").unwrap();
        assert!(c.position.build().is_err());
    }

    #[test]
    fn sweep_axes_are_validated() {
        let text = "[state]\nfamily = \"II\"\n[[sweep.axes]]\nname = \"theta\"\nmin = -0.5\nmax = 0.5\ncount = 3\n";
        let c = RunConfig::from_toml(text).unwrap();
        let axes = c.sweep.as_ref().unwrap().axes().unwrap();
        assert_eq!(axes[0].values, vec![-0.5, 0.0, 0.5]);
        assert!(c.with_axis(AxisName::Theta, 0.25).is_ok());
        assert!(c.with_axis(AxisName::Alpha, 0.25).is_err());

        let bad = "[[sweep.axes]]\nname = \"theta\"\nmin = -0.5\nmax = 0.9\ncount = 3\n";
        assert!(RunConfig::from_toml(bad).unwrap().sweep.unwrap().axes().is_err());
        let single = "[[sweep.axes]]\nname = \"phi\"\nmin = 0\nmax = 1\ncount = 1\n";
        assert!(RunConfig::from_toml(single).unwrap().sweep.unwrap().axes().is_err());
    }

    #[test]
    fn custom_coin_and_state() {
        let h = 0.5;
        let signs = [1., 1., 1., 1., 1., -1., 1., -1., 1., 1., -1., -1., 1., -1., -1., 1.];
        let flat: Vec<String> = signs.iter().flat_map(|s| [format!("{}", s * h), "0.0".into()]).collect();
        let text = format!(
            "[coin]\nkind = \"custom\"\nmatrix = [{}]\n[state]\nfamily = \"custom\"\namplitudes = [1, 0, 0, 1, 0, 0, 0, 0]\n",
            flat.join(", ")
        );
        let c = RunConfig::from_toml(&text).unwrap();
        assert!(c.coin.build().unwrap().is_hadamard_tensor());
        let s = c.state.build().unwrap();
        assert!((s.amplitudes()[1].im - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn simulate_window_defaults_to_tail() {
        let c = SimulateConfig { steps: 200, window: None };
        assert_eq!(c.window().unwrap(), (190, 200));
        let c = SimulateConfig { steps: 5, window: Some([3, 9]) };
        assert!(c.window().is_err());
    }
}
