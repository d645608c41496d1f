//! Direct evolution of the walk on a finite square lattice.
//!
//! One step applies the coin at every site and then moves component 1 (LL)
//! to `x - 1`, 2 (LR) to `y + 1`, 3 (RL) to `y - 1` and 4 (RR) to `x + 1`.
//! The grid is sized so the light cone never reaches its edge.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::asymptotics::{DensityMetadata, ReducedDensity};
use crate::coin::CoinOperator;
use crate::error::{Error, Result};
use crate::linalg::{entropy_of_spectrum, density_spectrum, ComplexMatrix, Vec4, ZERO};
use crate::states::{CoinState, PositionDistribution};

#[derive(Clone, Debug)]
pub struct LatticeState {
    step: usize,
    radius: i64,
    initial_support: i64,
    amps: Vec<Vec4>,
    chi: CoinState,
    position: PositionDistribution,
    coin_label: String,
}

impl LatticeState {
    /// Product state `a(r) chi` on a lattice wide enough for `n_max` steps.
    pub fn initialize(chi: &CoinState, pos: &PositionDistribution, n_max: usize) -> Result<Self> {
        let sites = pos.sites()?;
        let support = pos.support_radius()?;
        let radius = support + n_max as i64;
        let side = (2 * radius + 1) as usize;
        let mut amps = vec![[ZERO; 4]; side * side];
        for ((x, y), a) in sites {
            let idx = (x + radius) as usize * side + (y + radius) as usize;
            for j in 0..4 {
                amps[idx][j] += a * chi.amplitudes()[j];
            }
        }
        Ok(Self {
            step: 0,
            radius,
            initial_support: support,
            amps,
            chi: *chi,
            position: *pos,
            coin_label: String::new(),
        })
    }

    pub fn step_count(&self) -> usize {
        self.step
    }

    /// Lattice half-width: sites span `[-R, R]` on both axes.
    pub fn radius(&self) -> i64 {
        self.radius
    }

    /// Radius the walk can have reached by now.
    pub fn light_cone(&self) -> i64 {
        self.initial_support + self.step as i64
    }

    fn side(&self) -> usize {
        (2 * self.radius + 1) as usize
    }

    fn index(&self, x: i64, y: i64) -> Option<usize> {
        if x.abs() > self.radius || y.abs() > self.radius {
            return None;
        }
        Some((x + self.radius) as usize * self.side() + (y + self.radius) as usize)
    }

    /// Coin amplitudes at a site; `None` off the lattice.
    pub fn amplitude(&self, x: i64, y: i64) -> Option<Vec4> {
        self.index(x, y).map(|i| self.amps[i])
    }

    pub fn probability(&self, x: i64, y: i64) -> f64 {
        self.amplitude(x, y)
            .map(|a| a.iter().map(|z| z.norm_sqr()).sum())
            .unwrap_or(0.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    /// Largest `max(|x|, |y|)` carrying a nonzero amplitude.
    pub fn occupied_radius(&self) -> i64 {
        let side = self.side();
        let mut r = 0;
        for (i, a) in self.amps.iter().enumerate() {
            if a.iter().any(|z| *z != ZERO) {
                let x = (i / side) as i64 - self.radius;
                let y = (i % side) as i64 - self.radius;
                r = r.max(x.abs().max(y.abs()));
            }
        }
        r
    }

    /// Advances one step in place.
    pub fn advance(&mut self, coin: &CoinOperator) -> Result<()> {
        if coin.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: coin.dim(),
            });
        }
        let reach = self.light_cone() + 1;
        if reach > self.radius {
            return Err(Error::LightConeExceeded {
                step: self.step + 1,
                capacity: (self.radius - self.initial_support) as usize,
            });
        }
        let u = coin.matrix();
        let rows: [[C64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| u[(i, j)]));
        let side = self.side();
        let r = self.radius;
        let old = &self.amps;
        let at = |x: i64, y: i64| old[(x + r) as usize * side + (y + r) as usize];
        let dot = |row: &[C64; 4], v: &Vec4| row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];

        let mut next = vec![[ZERO; 4]; side * side];
        next.par_chunks_mut(side).enumerate().for_each(|(ix, out)| {
            let x = ix as i64 - r;
            if x.abs() > reach {
                return;
            }
            for y in -reach..=reach {
                let cell = &mut out[(y + r) as usize];
                if x < r {
                    cell[0] = dot(&rows[0], &at(x + 1, y));
                }
                if y > -r {
                    cell[1] = dot(&rows[1], &at(x, y - 1));
                }
                if y < r {
                    cell[2] = dot(&rows[2], &at(x, y + 1));
                }
                if x > -r {
                    cell[3] = dot(&rows[3], &at(x - 1, y));
                }
            }
        });
        self.amps = next;
        self.step += 1;
        self.coin_label = coin.label().to_string();
        Ok(())
    }

    /// Returns the state one step later.
    pub fn step(&self, coin: &CoinOperator) -> Result<Self> {
        let mut s = self.clone();
        s.advance(coin)?;
        Ok(s)
    }

    /// `rho_c = Tr_position |Psi><Psi|`, i.e. `rho(i, j) = sum_r f_i(r) conj(f_j(r))`.
    pub fn coin_density(&self) -> ComplexMatrix {
        let mut acc = [[ZERO; 4]; 4];
        for a in &self.amps {
            for i in 0..4 {
                if a[i] == ZERO {
                    continue;
                }
                for j in 0..4 {
                    acc[i][j] += a[i] * a[j].conj();
                }
            }
        }
        ComplexMatrix::from_fn(4, |i, j| acc[i][j]).expect("finite amplitudes")
    }

    pub fn reduced_density(&self) -> Result<ReducedDensity> {
        ReducedDensity::new(
            self.coin_density(),
            DensityMetadata {
                coin: self.coin_label.clone(),
                coin_state: *self.chi.amplitudes(),
                position: self.position.to_string(),
                quadrature: None,
            },
        )
    }
}

/// Entropies and coin densities for `n = 0..=n_max`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub entropies: Vec<(usize, f64)>,
    pub densities: Vec<ComplexMatrix>,
}

impl Trajectory {
    /// Mean entropy over steps `lo..=hi`.
    pub fn window_mean(&self, lo: usize, hi: usize) -> Option<f64> {
        let vals: Vec<f64> = self
            .entropies
            .iter()
            .filter(|(n, _)| (lo..=hi).contains(n))
            .map(|(_, e)| *e)
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }

    /// Mean coin density over steps `lo..=hi`.
    pub fn window_density(&self, lo: usize, hi: usize) -> Option<ComplexMatrix> {
        let picked: Vec<&ComplexMatrix> = self.densities.iter().skip(lo).take(hi.saturating_sub(lo) + 1).collect();
        let first = **picked.first()?;
        let sum = picked[1..].iter().fold(first, |acc, m| acc + **m);
        Some(sum.scale(C64::new(1.0 / picked.len() as f64, 0.0)))
    }
}

pub fn run_walk(chi: &CoinState, pos: &PositionDistribution, coin: &CoinOperator, n_max: usize) -> Result<Trajectory> {
    let mut state = LatticeState::initialize(chi, pos, n_max)?;
    let mut entropies = Vec::with_capacity(n_max + 1);
    let mut densities = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            state.advance(coin)?;
        }
        let rho = state.coin_density();
        let spectrum = density_spectrum(&rho, 0.0)?;
        entropies.push((n, entropy_of_spectrum(&spectrum).min(2.0)));
        densities.push(rho);
    }
    Ok(Trajectory { entropies, densities })
}

/// `(n, E(n))` for `n = 0..=n_max`.
pub fn entanglement_trajectory(
    chi: &CoinState,
    pos: &PositionDistribution,
    coin: &CoinOperator,
    n_max: usize,
) -> Result<Vec<(usize, f64)>> {
    Ok(run_walk(chi, pos, coin, n_max)?.entropies)
}
