//! Coin operators.
//!
//! Two-qubit coins act on the basis (LL, LR, RL, RR), i.e. index `2a + b` for
//! the first qubit `a` and the second `b`, with L = 0 and R = 1.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Vec4, UNITARY_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct CoinOperator {
    matrix: ComplexMatrix,
    label: String,
}

impl CoinOperator {
    /// Validates unitarity (to `1e-10`) and wraps the matrix.
    pub fn custom(matrix: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        let dev = matrix.unitarity_deviation();
        if !(dev <= UNITARY_TOL) {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self {
            matrix,
            label: label.into(),
        })
    }

    /// Reads a row-major matrix from interleaved (re, im) pairs: 8 reals for a
    /// one-qubit coin, 32 for a two-qubit coin.
    pub fn from_interleaved(values: &[f64], label: impl Into<String>) -> Result<Self> {
        let dim = match values.len() {
            8 => 2,
            32 => 4,
            n => {
                return Err(Error::InvalidParameter(format!(
                    "custom coin needs 8 or 32 reals, got {n}"
                )))
            }
        };
        let m = ComplexMatrix::from_fn(dim, |i, j| {
            let at = 2 * (i * dim + j);
            C64::new(values[at], values[at + 1])
        })?;
        Self::custom(m, label)
    }

    /// `(1/sqrt 2) [[1, 1], [1, -1]]`.
    pub fn hadamard2() -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let m = ComplexMatrix::from_rows(&[[h, h], [h, -h]]).expect("static 2x2");
        Self {
            matrix: m,
            label: "hadamard".into(),
        }
    }

    /// `H (x) H`.
    pub fn hadamard_tensor() -> Self {
        Self::tensor(&Self::hadamard2(), &Self::hadamard2()).expect("qubit factors")
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Ok(Self {
            matrix: ComplexMatrix::identity(dim)?,
            label: format!("identity{dim}"),
        })
    }

    /// Kronecker product of two one-qubit coins.
    pub fn tensor(a: &Self, b: &Self) -> Result<Self> {
        let m = ComplexMatrix::kron(&a.matrix, &b.matrix)?;
        Ok(Self {
            matrix: m,
            label: format!("{}x{}", a.label, b.label),
        })
    }

    /// Grover diffusion `2|s><s| - I` with `|s>` the uniform superposition.
    pub fn grover4() -> Self {
        let m = ComplexMatrix::from_fn(4, |i, j| {
            C64::new(if i == j { -0.5 } else { 0.5 }, 0.0)
        })
        .expect("static 4x4");
        Self {
            matrix: m,
            label: "grover".into(),
        }
    }

    /// Discrete Fourier coin with entries `i^(jk) / 2`.
    pub fn dft4() -> Self {
        const POWERS: [C64; 4] = [
            C64 { re: 1.0, im: 0.0 },
            C64 { re: 0.0, im: 1.0 },
            C64 { re: -1.0, im: 0.0 },
            C64 { re: 0.0, im: -1.0 },
        ];
        let m = ComplexMatrix::from_fn(4, |j, k| POWERS[(j * k) % 4] * 0.5).expect("static 4x4");
        Self {
            matrix: m,
            label: "dft".into(),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn apply(&self, v: &Vec4) -> Vec4 {
        self.matrix.mul_vec(v)
    }

    /// True when the matrix equals `H (x) H` to rounding.
    pub fn is_hadamard_tensor(&self) -> bool {
        self.dim() == 4 && (self.matrix - *Self::hadamard_tensor().matrix()).max_abs() < 1e-14
    }
}
