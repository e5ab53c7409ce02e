//! Dense row-major matrices and the comparison metrics.
//!
//! Storage is a flat `Vec<T>` with element `(i, j)` at index `i·cols + j`.
//! Dimensions are always at least 1×1. Seeded constructors draw from
//! [`SplitMix64`](crate::rng::SplitMix64), so a `(rows, cols, seed)` triple
//! identifies one exact matrix on every platform.

use std::fmt;
use std::ops::{Index, IndexMut};

use thiserror::Error;

use crate::rng::SplitMix64;
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix dimensions must be at least 1x1, got {rows}x{cols}")]
    ZeroDimension { rows: usize, cols: usize },
    #[error("identity fill requires a square matrix, got {rows}x{cols}")]
    NonSquareIdentity { rows: usize, cols: usize },
    #[error("data length {len} does not match {rows}x{cols} = {}", rows * cols)]
    DataLength { rows: usize, cols: usize, len: usize },
    #[error("index ({i}, {j}) out of bounds for a {rows}x{cols} matrix")]
    OutOfBounds { i: usize, j: usize, rows: usize, cols: usize },
    #[error("dimension mismatch: {a_rows}x{a_cols} vs {b_rows}x{b_cols}")]
    DimensionMismatch { a_rows: usize, a_cols: usize, b_rows: usize, b_cols: usize },
}

/// How to fill a freshly constructed matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fill {
    Zeros,
    /// Ones on the main diagonal; requires a square shape.
    Identity,
    /// Deterministic values uniform in `[-1, 1)` per component.
    SeededRandom(u64),
}

/// Error metrics of one matrix against another (see [`Matrix::compare`]).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorMetric {
    /// ‖a − b‖_F / max(‖b‖_F, smallest positive normal f64).
    pub rel_frobenius: f64,
    /// max over elements of |a − b| (modulus for complex).
    pub max_abs: f64,
}

/// Dense row-major matrix over one of the supported scalar types.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    /// Construct with an explicit fill rule.
    pub fn filled(rows: usize, cols: usize, fill: Fill) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::ZeroDimension { rows, cols });
        }
        match fill {
            Fill::Zeros => Ok(Matrix {
                rows,
                cols,
                data: vec![T::zero(); rows * cols],
            }),
            Fill::Identity => {
                if rows != cols {
                    return Err(MatrixError::NonSquareIdentity { rows, cols });
                }
                let mut m = Matrix {
                    rows,
                    cols,
                    data: vec![T::zero(); rows * cols],
                };
                for i in 0..rows {
                    m.data[i * cols + i] = T::one();
                }
                Ok(m)
            }
            Fill::SeededRandom(seed) => {
                let mut rng = SplitMix64::new(seed);
                let data = (0..rows * cols).map(|_| T::sample_unit(&mut rng)).collect();
                Ok(Matrix { rows, cols, data })
            }
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self, MatrixError> {
        Self::filled(rows, cols, Fill::Zeros)
    }

    pub fn identity(n: usize) -> Result<Self, MatrixError> {
        Self::filled(n, n, Fill::Identity)
    }

    pub fn seeded_random(rows: usize, cols: usize, seed: u64) -> Result<Self, MatrixError> {
        Self::filled(rows, cols, Fill::SeededRandom(seed))
    }

    /// Deterministic matrix whose components are integers in
    /// `[-max_abs, max_abs]`. Integer-valued float fixtures make exactness
    /// checks meaningful: products and bounded sums of such values are exact
    /// in both f32 and f64, so algorithms that are supposed to agree must
    /// agree bitwise.
    pub fn seeded_ints(
        rows: usize,
        cols: usize,
        seed: u64,
        max_abs: u32,
    ) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::ZeroDimension { rows, cols });
        }
        let mut rng = SplitMix64::new(seed);
        let data = (0..rows * cols)
            .map(|_| T::sample_int(&mut rng, max_abs))
            .collect();
        Ok(Matrix { rows, cols, data })
    }

    /// Wrap an existing row-major buffer.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::ZeroDimension { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(MatrixError::DataLength {
                rows,
                cols,
                len: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Flat row-major storage: element `(i, j)` lives at `i·cols + j`.
    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    /// Bounds-checked read.
    pub fn get(&self, i: usize, j: usize) -> Result<T, MatrixError> {
        if i >= self.rows || j >= self.cols {
            return Err(MatrixError::OutOfBounds {
                i,
                j,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.data[i * self.cols + j])
    }

    /// Bounds-checked write.
    pub fn set(&mut self, i: usize, j: usize, value: T) -> Result<(), MatrixError> {
        if i >= self.rows || j >= self.cols {
            return Err(MatrixError::OutOfBounds {
                i,
                j,
                rows: self.rows,
                cols: self.cols,
            });
        }
        self.data[i * self.cols + j] = value;
        Ok(())
    }

    /// Error metrics of `self` against the reference `other`.
    ///
    /// `rel_frobenius` divides by `other`'s Frobenius norm (clamped to the
    /// smallest positive normal f64 so an all-zero reference cannot divide
    /// by zero); `max_abs` is the largest componentwise modulus of the
    /// difference. Identical inputs give exactly (0, 0).
    pub fn compare(&self, other: &Self) -> Result<ErrorMetric, MatrixError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::DimensionMismatch {
                a_rows: self.rows,
                a_cols: self.cols,
                b_rows: other.rows,
                b_cols: other.cols,
            });
        }
        let mut diff_sqr = 0.0f64;
        let mut ref_sqr = 0.0f64;
        let mut max_abs = 0.0f64;
        for (&a, &b) in self.data.iter().zip(other.data.iter()) {
            let d2 = a.diff_norm_sqr(b);
            diff_sqr += d2;
            ref_sqr += b.norm_sqr();
            let d = d2.sqrt();
            if d > max_abs {
                max_abs = d;
            }
        }
        let denom = ref_sqr.sqrt().max(f64::MIN_POSITIVE);
        Ok(ErrorMetric {
            rel_frobenius: diff_sqr.sqrt() / denom,
            max_abs,
        })
    }

    /// Row-major little-endian encoding of all elements, the byte stream
    /// that checksums and fixture files are defined over.
    pub fn le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.data.len() * T::KIND.byte_width());
        for &v in &self.data {
            v.write_le(&mut out);
        }
        out
    }
}

impl Matrix<f32> {
    /// Exact widening to f64, used when judging f32 results against an f64
    /// oracle.
    pub fn widen(&self) -> Matrix<f64> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f64::from(v)).collect(),
        }
    }
}

impl<T: Scalar> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds for {}x{}",
            self.rows,
            self.cols
        );
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds for {}x{}",
            self.rows,
            self.cols
        );
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} {}", self.rows, self.cols, T::KIND)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:?}", self.data[i * self.cols + j])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
