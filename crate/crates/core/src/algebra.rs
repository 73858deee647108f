//! Generalized Pauli algebra on a single q-level site.
//!
//! The shift `X|i⟩ = |i+1 mod q⟩`, the clock `Z|i⟩ = ω^i|i⟩`, and the
//! discrete Fourier transform `H|i⟩ = q^{-1/2} Σ_j ω^{ij}|j⟩` together with
//! its inverse. All constructors return normalized (unitary) matrices.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// The primitive q-th root of unity `ω = e^{i2π/q}`.
///
/// Powers are reduced mod q before exponentiation so that `ω^k` is always
/// evaluated from the exact angle `2πk/q`, never by repeated multiplication.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRoot {
    q: u32,
    powers: Vec<Complex64>,
}

impl PhaseRoot {
    pub fn new(q: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidDimension(q));
        }
        let powers = (0..q)
            .map(|k| Complex64::from_polar(1.0, TAU * f64::from(k) / f64::from(q)))
            .collect();
        Ok(Self { q, powers })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// `ω` itself.
    pub fn omega(&self) -> Complex64 {
        self.powers[1 % self.q as usize]
    }

    /// `ω^k` for any integer k.
    pub fn pow(&self, k: i64) -> Complex64 {
        self.powers[k.rem_euclid(i64::from(self.q)) as usize]
    }

    /// `ω^k` for an exponent already reduced to `0..q`.
    #[inline]
    pub(crate) fn pow_reduced(&self, k: usize) -> Complex64 {
        self.powers[k]
    }
}

/// Which single-site operator to materialize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// `X^α`
    Shift(u32),
    /// `Z^β`
    Clock(u32),
    /// `H`
    Fourier,
    /// `H†`
    FourierDag,
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorKind::Shift(a) => write!(f, "X^{a}"),
            OperatorKind::Clock(b) => write!(f, "Z^{b}"),
            OperatorKind::Fourier => write!(f, "H"),
            OperatorKind::FourierDag => write!(f, "H†"),
        }
    }
}

/// A dense q×q complex matrix acting on one site, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator {
    dim: usize,
    matrix: Vec<Complex64>,
}

impl LocalOperator {
    pub fn from_rows(dim: usize, matrix: Vec<Complex64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim as u32));
        }
        if matrix.len() != dim * dim {
            return Err(Error::LengthMismatch {
                got: matrix.len(),
                expected: dim * dim,
            });
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        let mut matrix = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            matrix[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, matrix }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut matrix = vec![Complex64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for c in 0..d {
                matrix[c * d + r] = self.matrix[r * d + c].conj();
            }
        }
        Self { dim: d, matrix }
    }

    /// Matrix product `self · rhs`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        let d = self.dim;
        let mut matrix = vec![Complex64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.matrix[r * d + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..d {
                    matrix[r * d + c] += a * rhs.matrix[k * d + c];
                }
            }
        }
        Self { dim: d, matrix }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.iter().map(|z| z * factor).collect(),
        }
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "operator dimensions differ");
        self.matrix
            .iter()
            .zip(&other.matrix)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && self.max_deviation(other) <= tol
    }

    /// Deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .max_deviation(&Self::identity(self.dim))
    }

    /// Whether the matrix is diagonal (within exact zero).
    pub(crate) fn is_diagonal(&self) -> bool {
        let d = self.dim;
        (0..d).all(|r| (0..d).all(|c| r == c || self.matrix[r * d + c] == Complex64::new(0.0, 0.0)))
    }
}

/// Materialize `X^α`, `Z^β`, `H` or `H†` for local dimension `q`.
pub fn operator_matrix(kind: OperatorKind, q: u32) -> Result<LocalOperator> {
    let root = PhaseRoot::new(q)?;
    let d = q as usize;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut matrix = vec![zero; d * d];
    match kind {
        OperatorKind::Shift(alpha) => {
            let a = alpha as usize % d;
            for i in 0..d {
                matrix[((i + a) % d) * d + i] = one;
            }
        }
        OperatorKind::Clock(beta) => {
            let b = beta as usize % d;
            for i in 0..d {
                matrix[i * d + i] = root.pow_reduced(i * b % d);
            }
        }
        OperatorKind::Fourier | OperatorKind::FourierDag => {
            let norm = 1.0 / (d as f64).sqrt();
            let sign = if kind == OperatorKind::Fourier { 1 } else { d - 1 };
            for row in 0..d {
                for col in 0..d {
                    matrix[row * d + col] = root.pow_reduced(sign * row * col % d) * norm;
                }
            }
        }
    }
    Ok(LocalOperator { dim: d, matrix })
}
