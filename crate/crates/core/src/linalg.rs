//! Dense complex linear algebra at dimension 2 and 4.
//!
//! Matrices are stored inline as `[[C64; 4]; 4]` with an explicit dimension,
//! so every operation here is allocation free. Entries outside the active
//! `dim x dim` block are kept at zero.
//!
//! The Hermitian eigensolver is cyclic complex Jacobi. Unitary (and, more
//! generally, normal) matrices are diagonalized through their commuting
//! Hermitian parts `(U + U^dag)/2` and `(U - U^dag)/2i`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// A complex 4-vector. Two-dimensional vectors use the first two slots.
pub type Vec4 = [C64; 4];

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Default angular tolerance under which eigenphases are merged.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Allowed `max |H - H^dag|` for inputs that must be Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Allowed `max |U^dag U - I|` for inputs that must be unitary.
pub const UNITARY_TOL: f64 = 1e-10;
/// Eigenvalues of a density operator in `[-NEGATIVE_FLOOR, 0)` are clamped to zero.
pub const NEGATIVE_FLOOR: f64 = 1e-10;
/// Allowed deviation of a density operator's trace from one.
pub const TRACE_TOL: f64 = 1e-8;

const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 50;
// Hermitian-part eigenvalues closer than this are re-resolved by the other part.
const COMMUTING_GROUP_TOL: f64 = 1e-7;

#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: [[C64; 4]; 4],
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(Error::InvalidDimension(dim))
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::zeros_unchecked(dim))
    }

    pub(crate) const fn zeros_unchecked(dim: usize) -> Self {
        Self {
            dim,
            data: [[ZERO; 4]; 4],
        }
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.data[i][i] = ONE;
        }
        Ok(m)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            for j in 0..dim {
                m.data[i][j] = f(i, j);
            }
        }
        m.check_finite()?;
        Ok(m)
    }

    /// Builds a matrix from row slices; the number of rows sets the dimension.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        check_dim(dim)?;
        for r in rows {
            if r.as_ref().len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.as_ref().len(),
                });
            }
        }
        Self::from_fn(dim, |i, j| rows[i].as_ref()[j])
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        Self::from_fn(dim, |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO })
    }

    /// `|v><w|` restricted to the leading `dim` components.
    pub fn outer(dim: usize, v: &Vec4, w: &Vec4) -> Result<Self> {
        Self::from_fn(dim, |i, j| v[i] * w[j].conj())
    }

    pub(crate) fn outer_unchecked(dim: usize, v: &Vec4, w: &Vec4) -> Self {
        let mut m = Self::zeros_unchecked(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i][j] = v[i] * w[j].conj();
            }
        }
        m
    }

    /// Kronecker product of two 2x2 matrices, basis order (00, 01, 10, 11).
    pub fn kron(a: &Self, b: &Self) -> Result<Self> {
        if a.dim != 2 || b.dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: if a.dim != 2 { a.dim } else { b.dim },
            });
        }
        Self::from_fn(4, |i, j| a.data[i / 2][j / 2] * b.data[i % 2][j % 2])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i][..self.dim]
    }

    pub fn column(&self, j: usize) -> Vec4 {
        let mut v = [ZERO; 4];
        for i in 0..self.dim {
            v[i] = self.data[i][j];
        }
        v
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn check_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros_unchecked(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.data[i][j] = self.data[j][i].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        for z in m.data.iter_mut().flatten() {
            *z *= s;
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i][i]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `max |H - H^dag|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    /// `max |U^dag U - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let id = Self::identity(self.dim).expect("dimension already validated");
        (self.adjoint() * *self - id).max_abs()
    }

    pub fn mul_vec(&self, v: &Vec4) -> Vec4 {
        let mut out = [ZERO; 4];
        for i in 0..self.dim {
            let mut acc = ZERO;
            for j in 0..self.dim {
                acc += self.data[i][j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// `<v|A|v>`.
    pub fn expectation(&self, v: &Vec4) -> C64 {
        inner(v, &self.mul_vec(v))
    }

    /// Hermitian part `(A + A^dag)/2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale(C64::new(0.5, 0.0))
    }

    /// Anti-Hermitian part divided by `i`: `(A - A^dag)/2i`, itself Hermitian.
    pub fn skew_part(&self) -> Self {
        (*self - self.adjoint()).scale(C64::new(0.0, -0.5))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.dim && j < self.dim, "index ({i}, {j}) out of range");
        &self.data[i][j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.dim && j < self.dim, "index ({i}, {j}) out of range");
        &mut self.data[i][j]
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in product");
        let n = self.dim;
        let mut m = Self::zeros_unchecked(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    m.data[i][j] += a * rhs.data[k][j];
                }
            }
        }
        m
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sum");
        let mut m = self;
        for (a, b) in m.data.iter_mut().flatten().zip(rhs.data.iter().flatten()) {
            *a += b;
        }
        m
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in difference");
        let mut m = self;
        for (a, b) in m.data.iter_mut().flatten().zip(rhs.data.iter().flatten()) {
            *a -= b;
        }
        m
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self.data[i][j];
                write!(f, "{:>+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// `<v|w>` over all four slots.
pub fn inner(v: &Vec4, w: &Vec4) -> C64 {
    v.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sqr(v: &Vec4) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_phase(mut w: f64) -> f64 {
    w = w.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    if w <= -PI {
        w += 2.0 * PI;
    }
    w
}

/// Shortest angular distance between two phases.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    wrap_phase(a - b).abs()
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigenResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigenResult {
    pub fn vector(&self, i: usize) -> Vec4 {
        self.eigenvectors.column(i)
    }

    /// `V diag(lambda) V^dag`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvectors.dim();
        let mut lam = ComplexMatrix::zeros_unchecked(n);
        for (i, &l) in self.eigenvalues.iter().enumerate() {
            lam.data[i][i] = C64::new(l, 0.0);
        }
        self.eigenvectors * lam * self.eigenvectors.adjoint()
    }
}

/// Cyclic Jacobi on the leading `n x n` block of a Hermitian matrix.
///
/// Returns ascending eigenvalues and the matching eigenvector columns.
pub(crate) fn jacobi_hermitian(mut a: [[C64; 4]; 4], n: usize) -> ([f64; 4], [[C64; 4]; 4]) {
    let mut v = [[ZERO; 4]; 4];
    for (i, row) in v.iter_mut().enumerate().take(n) {
        row[i] = ONE;
    }

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[i][j].norm_sqr();
                }
            }
        }
        if off.sqrt() < JACOBI_OFF_TOL {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                let abs = apq.norm();
                if abs == 0.0 {
                    continue;
                }
                // D = diag(1, e^{-i phi}) makes the (p, q) entry real, then a
                // real Jacobi rotation annihilates it.
                let phase = apq / abs;
                let theta = (a[q][q].re - a[p][p].re) / (2.0 * abs);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let e_minus = phase.conj();

                for row in a.iter_mut().take(n) {
                    let arp = row[p];
                    let arq = row[q];
                    row[p] = arp * c - arq * e_minus * s;
                    row[q] = arp * s + arq * e_minus * c;
                }
                for r in 0..n {
                    let apr = a[p][r];
                    let aqr = a[q][r];
                    a[p][r] = apr * c - aqr * phase * s;
                    a[q][r] = apr * s + aqr * phase * c;
                }
                a[p][q] = ZERO;
                a[q][p] = ZERO;
                a[p][p].im = 0.0;
                a[q][q].im = 0.0;

                for row in v.iter_mut().take(n) {
                    let vrp = row[p];
                    let vrq = row[q];
                    row[p] = vrp * c - vrq * e_minus * s;
                    row[q] = vrp * s + vrq * e_minus * c;
                }
            }
        }
    }

    let mut order = [0usize, 1, 2, 3];
    order[..n].sort_by(|&i, &j| a[i][i].re.total_cmp(&a[j][j].re));
    let mut vals = [0.0; 4];
    let mut vecs = [[ZERO; 4]; 4];
    for (dst, &src) in order[..n].iter().enumerate() {
        vals[dst] = a[src][src].re;
        for r in 0..n {
            vecs[r][dst] = v[r][src];
        }
    }
    (vals, vecs)
}

/// Diagonalizes a Hermitian matrix by cyclic Jacobi rotations.
///
/// Eigenvalues come back ascending with orthonormal eigenvector columns.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermitianEigenResult> {
    h.check_finite()?;
    let dev = h.hermiticity_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let sym = h.hermitian_part();
    let n = h.dim();
    let (vals, vecs) = jacobi_hermitian(sym.data, n);
    Ok(HermitianEigenResult {
        eigenvalues: vals[..n].to_vec(),
        eigenvectors: ComplexMatrix { dim: n, data: vecs },
    })
}

/// Spectral decomposition `U = sum_w e^{i w} P_w` over distinct eigenphases.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    dim: usize,
    phases: Vec<f64>,
    projectors: Vec<ComplexMatrix>,
    bases: Vec<Vec<Vec4>>,
}

impl SpectralDecomposition {
    /// Groups orthonormal eigenvectors with their phases into clusters.
    ///
    /// Phases within `tol` of each other (circularly) share one projector.
    pub(crate) fn from_eigenpairs(dim: usize, mut pairs: Vec<(f64, Vec4)>, tol: f64) -> Result<Self> {
        for p in pairs.iter_mut() {
            p.0 = wrap_phase(p.0);
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let m = pairs.len();

        // Start scanning just after the widest circular gap so that a cluster
        // straddling +-pi is not cut in two.
        let mut start = 0;
        if m > 1 {
            let mut widest = -1.0;
            for i in 0..m {
                let next = (i + 1) % m;
                let gap = if next == 0 {
                    pairs[0].0 + 2.0 * PI - pairs[m - 1].0
                } else {
                    pairs[next].0 - pairs[i].0
                };
                if gap > widest {
                    widest = gap;
                    start = next;
                }
            }
        }

        let mut clusters: Vec<Vec<(f64, Vec4)>> = Vec::new();
        for step in 0..m {
            let idx = (start + step) % m;
            let item = pairs[idx];
            match clusters.last_mut() {
                Some(last) if phase_distance(last.last().unwrap().0, item.0) <= tol => last.push(item),
                _ => clusters.push(vec![item]),
            }
        }

        let mut phases = Vec::with_capacity(clusters.len());
        let mut projectors = Vec::with_capacity(clusters.len());
        let mut bases = Vec::with_capacity(clusters.len());
        for cluster in clusters {
            let first = cluster.first().unwrap().0;
            let spread = cluster
                .iter()
                .map(|(w, _)| phase_distance(*w, first))
                .fold(0.0, f64::max);
            if spread > tol {
                return Err(Error::Clustering { tol, spread });
            }
            let mean: C64 = cluster.iter().map(|(w, _)| C64::from_polar(1.0, *w)).sum();
            phases.push(wrap_phase(mean.arg()));
            let mut proj = ComplexMatrix::zeros_unchecked(dim);
            for (_, v) in &cluster {
                proj = proj + ComplexMatrix::outer_unchecked(dim, v, v);
            }
            projectors.push(proj);
            bases.push(cluster.into_iter().map(|(_, v)| v).collect());
        }

        for i in 0..phases.len() {
            for j in (i + 1)..phases.len() {
                let d = phase_distance(phases[i], phases[j]);
                if d <= tol {
                    return Err(Error::Clustering { tol, spread: d });
                }
            }
        }

        Ok(Self {
            dim,
            phases,
            projectors,
            bases,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Distinct eigenphases in `(-pi, pi]`.
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    /// Orthonormal basis of the eigenspace belonging to `phases()[i]`.
    pub fn basis(&self, i: usize) -> &[Vec4] {
        &self.bases[i]
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.bases.iter().map(Vec::len).collect()
    }

    /// Eigenphases repeated by multiplicity, sorted.
    pub fn phase_multiset(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .phases
            .iter()
            .zip(&self.bases)
            .flat_map(|(w, b)| std::iter::repeat(*w).take(b.len()))
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }

    /// `sum_w e^{i w} P_w`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.phases
            .iter()
            .zip(&self.projectors)
            .fold(ComplexMatrix::zeros_unchecked(self.dim), |acc, (w, p)| {
                acc + p.scale(C64::from_polar(1.0, *w))
            })
    }
}

/// Splits a normal matrix into eigenvectors using its commuting Hermitian parts.
fn normal_eigenvectors(u: &ComplexMatrix) -> [[C64; 4]; 4] {
    let n = u.dim();
    let hr = u.hermitian_part();
    let hi = u.skew_part();
    let (vals, mut vecs) = jacobi_hermitian(hr.data, n);

    for group in contiguous_groups(&vals[..n], COMMUTING_GROUP_TOL) {
        if group.len() < 2 {
            continue;
        }
        let (svals, rotated) = diagonalize_in_subspace(&hi, &vecs, &group, n);
        write_columns(&mut vecs, &group, &rotated, n);

        // Vectors that are also degenerate in the skew part get re-aligned with
        // the Hermitian part, whose small splittings the first pass may have mixed.
        for sub in contiguous_groups(&svals[..group.len()], COMMUTING_GROUP_TOL) {
            if sub.len() < 2 {
                continue;
            }
            let cols: Vec<usize> = sub.iter().map(|&s| group[s]).collect();
            let (_, realigned) = diagonalize_in_subspace(&hr, &vecs, &cols, n);
            write_columns(&mut vecs, &cols, &realigned, n);
        }
    }
    vecs
}

fn contiguous_groups(sorted: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &x) in sorted.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if x - sorted[*g.last().unwrap()] <= tol => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

/// Diagonalizes `B^dag A B` for the columns `cols` of `basis`, returning the
/// sorted sub-eigenvalues and the rotated columns `B W`.
fn diagonalize_in_subspace(
    a: &ComplexMatrix,
    basis: &[[C64; 4]; 4],
    cols: &[usize],
    n: usize,
) -> ([f64; 4], Vec<Vec4>) {
    let d = cols.len();
    let col = |c: usize| -> Vec4 {
        let mut v = [ZERO; 4];
        for r in 0..n {
            v[r] = basis[r][c];
        }
        v
    };
    let b: Vec<Vec4> = cols.iter().map(|&c| col(c)).collect();
    let mut sub = [[ZERO; 4]; 4];
    for i in 0..d {
        let ab = a.mul_vec(&b[i]);
        for (j, bj) in b.iter().enumerate() {
            sub[j][i] = inner(bj, &ab);
        }
    }
    for i in 0..d {
        sub[i][i].im = 0.0;
        for j in (i + 1)..d {
            let avg = (sub[i][j] + sub[j][i].conj()) * 0.5;
            sub[i][j] = avg;
            sub[j][i] = avg.conj();
        }
    }
    let (vals, w) = jacobi_hermitian(sub, d);
    let rotated = (0..d)
        .map(|k| {
            let mut v = [ZERO; 4];
            for (i, bi) in b.iter().enumerate() {
                for r in 0..n {
                    v[r] += bi[r] * w[i][k];
                }
            }
            v
        })
        .collect();
    (vals, rotated)
}

fn write_columns(vecs: &mut [[C64; 4]; 4], cols: &[usize], new: &[Vec4], n: usize) {
    for (&c, v) in cols.iter().zip(new) {
        for r in 0..n {
            vecs[r][c] = v[r];
        }
    }
}

/// Spectral decomposition of a unitary matrix.
///
/// Eigenphases within `degeneracy_tol` (radians) are merged into a single
/// projector.
pub fn unitary_eigen(u: &ComplexMatrix, degeneracy_tol: f64) -> Result<SpectralDecomposition> {
    u.check_finite()?;
    let dev = u.unitarity_deviation();
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    if !(degeneracy_tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "degeneracy tolerance must be positive, got {degeneracy_tol}"
        )));
    }
    let n = u.dim();
    let vecs = normal_eigenvectors(u);
    let pairs = (0..n)
        .map(|c| {
            let mut v = [ZERO; 4];
            for r in 0..n {
                v[r] = vecs[r][c];
            }
            (u.expectation(&v).arg(), v)
        })
        .collect();
    SpectralDecomposition::from_eigenpairs(n, pairs, degeneracy_tol)
}

/// Binary entropy `-p log2 p - (1-p) log2 (1-p)` with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_of_spectrum(&[p, 1.0 - p])
}

/// Shannon entropy in bits of a list of non-negative weights.
pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    let s: f64 = eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum();
    s.max(0.0)
}

/// Validates a density operator and returns its eigenvalues (ascending),
/// with eigenvalues below `eig_floor` clamped to zero.
pub fn density_spectrum(rho: &ComplexMatrix, eig_floor: f64) -> Result<Vec<f64>> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        return Err(Error::InvalidTrace(tr.re));
    }
    let eig = hermitian_eigen(rho)?;
    let floor = eig_floor.max(0.0);
    eig.eigenvalues
        .iter()
        .map(|&l| {
            if l < -NEGATIVE_FLOOR {
                Err(Error::NegativeEigenvalue(l))
            } else if l < floor {
                Ok(0.0)
            } else {
                Ok(l)
            }
        })
        .collect()
}

/// Von Neumann entropy `-tr(rho log2 rho)` in bits.
pub fn von_neumann_entropy(rho: &ComplexMatrix, eig_floor: f64) -> Result<f64> {
    let spectrum = density_spectrum(rho, eig_floor)?;
    let cap = (rho.dim() as f64).log2();
    Ok(entropy_of_spectrum(&spectrum).min(cap))
}
