//! The one-step operator in quasi-momentum space and its spectrum.
//!
//! Coin component 1 (LL) moves to `x - 1`, 2 (LR) to `y + 1`, 3 (RL) to
//! `y - 1` and 4 (RR) to `x + 1`. With amplitudes transformed as
//! `sum_r e^{ik.r} f(r)`, row `j` of the coin matrix picks up the phase
//! `e^{ik.d_j}` of its displacement `d_j`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::coin::CoinOperator;
use crate::error::{Error, Result};
use crate::linalg::{norm_sqr, unitary_eigen, ComplexMatrix, SpectralDecomposition, Vec4, DEGENERACY_TOL, ZERO};

/// Below this norm the closed-form eigenvector is considered collapsed.
pub const CLOSED_FORM_NORM_FLOOR: f64 = 1e-12;
/// Maximum `|U a - e^{iw} a|` accepted from the closed-form eigenvector.
pub const CLOSED_FORM_RESIDUAL_TOL: f64 = 1e-9;

/// Quasi-momentum with both components in `[-pi, pi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveVector {
    kx: f64,
    ky: f64,
}

impl WaveVector {
    pub fn new(kx: f64, ky: f64) -> Result<Self> {
        for k in [kx, ky] {
            if !(k.abs() <= PI + 1e-12) {
                return Err(Error::WaveVectorRange(k));
            }
        }
        Ok(Self { kx, ky })
    }

    pub const fn origin() -> Self {
        Self { kx: 0.0, ky: 0.0 }
    }

    pub(crate) const fn new_unchecked(kx: f64, ky: f64) -> Self {
        Self { kx, ky }
    }

    pub fn kx(&self) -> f64 {
        self.kx
    }

    pub fn ky(&self) -> f64 {
        self.ky
    }
}

/// Row phases `(e^{-ikx}, e^{iky}, e^{-iky}, e^{ikx})`.
pub fn shift_phases(k: WaveVector) -> [C64; 4] {
    let ex = C64::from_polar(1.0, k.kx);
    let ey = C64::from_polar(1.0, k.ky);
    [ex.conj(), ey, ey.conj(), ex]
}

pub(crate) fn uk_from_matrix(coin: &ComplexMatrix, k: WaveVector) -> ComplexMatrix {
    let ph = shift_phases(k);
    let mut u = *coin;
    for (i, p) in ph.iter().enumerate() {
        for j in 0..4 {
            u[(i, j)] *= p;
        }
    }
    u
}

/// `U_k = diag(e^{-ikx}, e^{iky}, e^{-iky}, e^{ikx}) U_C`.
pub fn build_uk(coin: &CoinOperator, k: WaveVector) -> Result<ComplexMatrix> {
    if coin.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: coin.dim(),
        });
    }
    Ok(uk_from_matrix(coin.matrix(), k))
}

/// Eigenphases of `U_k` for the `H (x) H` coin: `{+-w_plus, +-w_minus}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HadamardSpectrumClosedForm {
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub delta_k: f64,
}

impl HadamardSpectrumClosedForm {
    /// `[w+, -w+, w-, -w-]`.
    pub fn phases(&self) -> [f64; 4] {
        [self.omega_plus, -self.omega_plus, self.omega_minus, -self.omega_minus]
    }
}

pub fn hadamard_closed_spectrum(k: WaveVector) -> HadamardSpectrumClosedForm {
    let (cx, cy) = (k.kx.cos(), k.ky.cos());
    let delta = cx * cx + 6.0 * cx * cy + cy * cy + 8.0;
    let root = delta.max(0.0).sqrt();
    let acos = |c: f64| c.clamp(-1.0, 1.0).acos();
    HadamardSpectrumClosedForm {
        omega_plus: acos((cx - cy + root) / 4.0),
        omega_minus: acos((cx - cy - root) / 4.0),
        delta_k: delta,
    }
}

fn closed_eigenvector_raw(k: WaveVector, omega: f64) -> (Vec4, f64) {
    let x = C64::from_polar(1.0, k.kx);
    let y = C64::from_polar(1.0, k.ky);
    let yi = y.conj();
    let e = C64::from_polar(1.0, omega);
    let e2 = e * e;
    let one = C64::new(1.0, 0.0);
    let a = [
        one - e2,
        -one + e * (x - y) + e2 * x * y,
        -one + e * (x - yi) + e2 * x * yi,
        one + e * (y + yi) + e2 * (one - x * y - x * yi) - e2 * e * x * 2.0,
    ];
    let n = norm_sqr(&a).sqrt();
    (a, n)
}

/// Normalized eigenvector of the `H (x) H` operator `U_k` for eigenphase `omega`.
///
/// Fails with [`Error::DegeneratePoint`] where the closed form collapses and
/// with [`Error::NotAnEigenvalue`] when `e^{i omega}` is not in the spectrum.
pub fn hadamard_closed_eigenvector(k: WaveVector, omega: f64) -> Result<Vec4> {
    let u = uk_from_matrix(CoinOperator::hadamard_tensor().matrix(), k);
    closed_eigenvector_checked(&u, k, omega)
}

fn closed_eigenvector_checked(u: &ComplexMatrix, k: WaveVector, omega: f64) -> Result<Vec4> {
    let (mut a, n) = closed_eigenvector_raw(k, omega);
    if !(n >= CLOSED_FORM_NORM_FLOOR) {
        return Err(Error::DegeneratePoint {
            kx: k.kx,
            ky: k.ky,
            omega,
            norm: n,
        });
    }
    for z in a.iter_mut() {
        *z /= n;
    }
    let ua = u.mul_vec(&a);
    let e = C64::from_polar(1.0, omega);
    let residual = ua
        .iter()
        .zip(&a)
        .map(|(l, r)| (l - e * r).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > CLOSED_FORM_RESIDUAL_TOL {
        return Err(Error::NotAnEigenvalue { omega, residual });
    }
    Ok(a)
}

/// Closed-form eigenpairs of the `H (x) H` operator, or `None` when the
/// spectrum is degenerate or the formula loses accuracy at this `k`.
pub(crate) fn hadamard_eigenpairs(u: &ComplexMatrix, k: WaveVector) -> Option<[(f64, Vec4); 4]> {
    let spec = hadamard_closed_spectrum(k);
    let phases = spec.phases();
    for i in 0..4 {
        for j in (i + 1)..4 {
            if crate::linalg::phase_distance(phases[i], phases[j]) <= DEGENERACY_TOL {
                return None;
            }
        }
    }
    let mut out = [(0.0, [ZERO; 4]); 4];
    for (slot, &w) in out.iter_mut().zip(&phases) {
        *slot = (w, closed_eigenvector_checked(u, k, w).ok()?);
    }
    Some(out)
}

/// How to obtain the spectral decomposition of `U_k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SpectrumRoute {
    /// Closed form for `H (x) H` away from degenerate points, generic otherwise.
    #[default]
    Auto,
    Generic,
}

pub fn spectral_decomposition(coin: &CoinOperator, k: WaveVector, route: SpectrumRoute) -> Result<SpectralDecomposition> {
    let u = build_uk(coin, k)?;
    if route == SpectrumRoute::Auto && coin.is_hadamard_tensor() {
        if let Some(pairs) = hadamard_eigenpairs(&u, k) {
            return SpectralDecomposition::from_eigenpairs(4, pairs.to_vec(), DEGENERACY_TOL);
        }
    }
    unitary_eigen(&u, DEGENERACY_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::phase_distance;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn hh() -> CoinOperator {
        CoinOperator::hadamard_tensor()
    }

    #[test]
    fn origin_reproduces_the_coin() {
        for coin in [hh(), CoinOperator::grover4(), CoinOperator::dft4()] {
            let u = build_uk(&coin, WaveVector::origin()).unwrap();
            assert_eq!(u, *coin.matrix());
        }
    }

    #[test]
    fn out_of_zone_wave_vector_is_rejected() {
        assert!(WaveVector::new(3.2, 0.0).is_err());
        assert!(WaveVector::new(PI, -PI).is_ok());
    }

    #[test]
    fn closed_spectrum_at_origin() {
        let s = hadamard_closed_spectrum(WaveVector::origin());
        assert_eq!(s.delta_k, 16.0);
        assert!(s.omega_plus.abs() < 1e-15);
        assert!((s.omega_minus - PI).abs() < 1e-15);
    }

    #[test]
    fn closed_spectrum_at_half_pi() {
        let s = hadamard_closed_spectrum(WaveVector::new(FRAC_PI_2, FRAC_PI_2).unwrap());
        assert!((s.delta_k - 8.0).abs() < 1e-14);
        assert!((s.omega_plus - PI / 4.0).abs() < 1e-14);
        assert!((s.omega_minus - 3.0 * PI / 4.0).abs() < 1e-14);
    }

    #[test]
    fn generic_phases_at_reference_point() {
        let k = WaveVector::new(FRAC_PI_2, PI / 3.0).unwrap();
        let (cx, cy) = (k.kx().cos(), k.ky().cos());
        let root = (cx * cx + 6.0 * cx * cy + cy * cy + 8.0).sqrt();
        let wp = ((cx - cy + root) / 4.0).acos();
        let wm = ((cx - cy - root) / 4.0).acos();
        let mut want = vec![wp, -wp, wm, -wm];
        want.sort_by(f64::total_cmp);
        let got = unitary_eigen(&build_uk(&hh(), k).unwrap(), DEGENERACY_TOL)
            .unwrap()
            .phase_multiset();
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-10, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn origin_is_a_degenerate_point() {
        let err = hadamard_closed_eigenvector(WaveVector::origin(), 0.0).unwrap_err();
        assert!(matches!(err, Error::DegeneratePoint { .. }));
    }

    #[test]
    fn wrong_phase_is_rejected() {
        let k = WaveVector::new(0.7, -1.3).unwrap();
        let err = hadamard_closed_eigenvector(k, 0.123).unwrap_err();
        assert!(matches!(err, Error::NotAnEigenvalue { .. }));
    }

    #[test]
    fn auto_route_falls_back_at_origin() {
        let s = spectral_decomposition(&hh(), WaveVector::origin(), SpectrumRoute::Auto).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.ranks(), vec![2, 2]);
    }

    fn wave() -> impl Strategy<Value = WaveVector> {
        (-PI..PI, -PI..PI).prop_map(|(a, b)| WaveVector::new(a, b).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn uk_is_unitary(k in wave()) {
            for coin in [hh(), CoinOperator::grover4(), CoinOperator::dft4()] {
                prop_assert!(build_uk(&coin, k).unwrap().unitarity_deviation() <= 1e-14);
            }
        }

        #[test]
        fn closed_spectrum_matches_generic(k in wave()) {
            let s = hadamard_closed_spectrum(k);
            prop_assert!(s.delta_k >= 4.0 - 1e-12 && s.delta_k <= 16.0 + 1e-12);
            let mut want = s.phases().to_vec();
            want.sort_by(f64::total_cmp);
            let u = build_uk(&hh(), k).unwrap();
            let got = unitary_eigen(&u, DEGENERACY_TOL).unwrap().phase_multiset();
            prop_assert_eq!(got.len(), 4);
            for w in &want {
                prop_assert!(got.iter().any(|g| phase_distance(*g, *w) < 1e-10), "{:?} vs {:?}", got, want);
            }
        }

        #[test]
        fn closed_spectrum_is_even(k in wave()) {
            let a = hadamard_closed_spectrum(k);
            let b = hadamard_closed_spectrum(WaveVector::new(-k.kx(), k.ky()).unwrap());
            let c = hadamard_closed_spectrum(WaveVector::new(k.kx(), -k.ky()).unwrap());
            prop_assert_eq!(a, b);
            prop_assert_eq!(a, c);
        }

        #[test]
        fn closed_eigenvectors_are_normalized_eigenvectors(k in wave()) {
            let u = build_uk(&hh(), k).unwrap();
            for w in hadamard_closed_spectrum(k).phases() {
                let v = hadamard_closed_eigenvector(k, w).unwrap();
                prop_assert!((norm_sqr(&v) - 1.0).abs() < 1e-12);
                let uv = u.mul_vec(&v);
                let e = C64::from_polar(1.0, w);
                let res: f64 = uv.iter().zip(&v).map(|(l, r)| (l - e * r).norm_sqr()).sum::<f64>().sqrt();
                prop_assert!(res <= 1e-9);
            }
        }

        #[test]
        fn eigenphases_sum_to_determinant_phase(k in wave()) {
            for coin in [hh(), CoinOperator::grover4(), CoinOperator::dft4()] {
                let u = build_uk(&coin, k).unwrap();
                let s = unitary_eigen(&u, DEGENERACY_TOL).unwrap();
                let total: f64 = s.phase_multiset().iter().sum();
                // det = product of eigenvalues, computed independently by expansion.
                let det = det4(&u);
                prop_assert!((det.norm() - 1.0).abs() < 1e-12);
                prop_assert!(phase_distance(total, det.arg()) < 1e-9);
            }
        }

        #[test]
        fn closed_and_generic_projectors_agree(k in wave()) {
            let closed = spectral_decomposition(&hh(), k, SpectrumRoute::Auto).unwrap();
            let generic = spectral_decomposition(&hh(), k, SpectrumRoute::Generic).unwrap();
            prop_assert_eq!(closed.len(), generic.len());
            for (w, p) in closed.phases().iter().zip(closed.projectors()) {
                let j = generic.phases().iter().position(|g| phase_distance(*g, *w) < 1e-9).unwrap();
                prop_assert!((*p - generic.projectors()[j]).max_abs() <= 1e-8);
            }
        }
    }

    fn det4(m: &ComplexMatrix) -> C64 {
        fn minor(m: &ComplexMatrix, rows: &[usize], cols: &[usize]) -> C64 {
            if rows.len() == 1 {
                return m[(rows[0], cols[0])];
            }
            let mut acc = C64::new(0.0, 0.0);
            for (ci, &c) in cols.iter().enumerate() {
                let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let sign = if ci % 2 == 0 { 1.0 } else { -1.0 };
                acc += m[(rows[0], c)] * minor(m, &rows[1..], &rest) * sign;
            }
            acc
        }
        minor(m, &[0, 1, 2, 3], &[0, 1, 2, 3])
    }
}
