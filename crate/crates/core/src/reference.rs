//! Host-side reference algorithms.
//!
//! Everything here runs on a single thread with explicit index arithmetic.
//! These are the oracles the kernels are judged against, so the accumulation
//! order is part of the contract: every output element of a matrix product
//! is accumulated over the inner index r in ascending order, which makes
//! results bit-reproducible and directly comparable with the kernel
//! implementations that promise the same order.

use thiserror::Error;

use crate::counter::OpCounter;
use crate::matrix::{Matrix, MatrixError};
use crate::scalar::{Scalar, ScalarKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgoError {
    #[error("inner dimensions do not match: left is {a_rows}x{a_cols}, right is {b_rows}x{b_cols}")]
    InnerDimension { a_rows: usize, a_cols: usize, b_rows: usize, b_cols: usize },
    #[error("shapes do not match: {a_rows}x{a_cols} vs {b_rows}x{b_cols}")]
    ShapeMismatch { a_rows: usize, a_cols: usize, b_rows: usize, b_cols: usize },
    #[error("diagonal lengths do not match: {a_len} vs {b_len}")]
    DiagonalLength { a_len: usize, b_len: usize },
    #[error("diagonal must have length at least 1")]
    EmptyDiagonal,
    #[error("strassen requires a square matrix with power-of-two side, got {rows}x{cols}")]
    NotPowerOfTwoSquare { rows: usize, cols: usize },
    #[error("strassen cutoff must be at least 1")]
    ZeroCutoff,
    #[error("strassen supports f32 and f64 only, got {kind}")]
    UnsupportedKind { kind: ScalarKind },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Elementwise operation selector shared by the reference path and the
/// kernel path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElemOp {
    Add,
    Sub,
}

/// Plain sequential matrix product: C[i][j] = Σ_r A[i][r]·B[r][j], with the
/// sum over r accumulated left to right from a zero temporary.
///
/// The traversal is j-outer with B's column j staged into a contiguous
/// scratch buffer — the strided walk down B's rows is otherwise the entire
/// cost of the naive loop on large inputs. Per output element the additions
/// happen in exactly ascending-r order either way, so the result is
/// bit-identical to the textbook i-j-r nesting.
///
/// Counts `rows·cols·inner` multiplications and the same number of
/// additions.
pub fn matmul_sequential<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    ops: &mut OpCounter,
) -> Result<Matrix<T>, AlgoError> {
    if a.cols() != b.rows() {
        return Err(AlgoError::InnerDimension {
            a_rows: a.rows(),
            a_cols: a.cols(),
            b_rows: b.rows(),
            b_cols: b.cols(),
        });
    }
    let (x, y, z) = (a.rows(), a.cols(), b.cols());
    let mut c = Matrix::<T>::zeros(x, z)?;
    let a_data = a.data();
    let b_data = b.data();
    let mut column = vec![T::zero(); y];
    for j in 0..z {
        for r in 0..y {
            column[r] = b_data[r * z + j];
        }
        for i in 0..x {
            let row = &a_data[i * y..(i + 1) * y];
            let mut acc = T::zero();
            for r in 0..y {
                acc = acc + row[r] * column[r];
            }
            c.set(i, j, acc)?;
        }
    }
    ops.record_mults((x * y * z) as u64);
    ops.record_adds((x * y * z) as u64);
    Ok(c)
}

/// Elementwise add or subtract; one elementary operation per element
/// (complex included — the count is logical, not per float component).
pub fn elementwise<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    op: ElemOp,
    ops: &mut OpCounter,
) -> Result<Matrix<T>, AlgoError> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(AlgoError::ShapeMismatch {
            a_rows: a.rows(),
            a_cols: a.cols(),
            b_rows: b.rows(),
            b_cols: b.cols(),
        });
    }
    let data = a
        .data()
        .iter()
        .zip(b.data().iter())
        .map(|(&x, &y)| match op {
            ElemOp::Add => x + y,
            ElemOp::Sub => x - y,
        })
        .collect();
    ops.record_adds((a.rows() * a.cols()) as u64);
    Ok(Matrix::from_vec(a.rows(), a.cols(), data)?)
}

/// Product of two diagonal matrices, represented by their diagonals: the
/// result is again diagonal with entries a[i]·b[i]. Exactly n
/// multiplications — the structural shortcut that makes diagonal
/// multiplication O(n) instead of O(n³).
pub fn matmul_diagonal<T: Scalar>(
    diag_a: &[T],
    diag_b: &[T],
    ops: &mut OpCounter,
) -> Result<Vec<T>, AlgoError> {
    if diag_a.is_empty() {
        return Err(AlgoError::EmptyDiagonal);
    }
    if diag_a.len() != diag_b.len() {
        return Err(AlgoError::DiagonalLength {
            a_len: diag_a.len(),
            b_len: diag_b.len(),
        });
    }
    let out = diag_a
        .iter()
        .zip(diag_b.iter())
        .map(|(&x, &y)| x * y)
        .collect();
    ops.record_mults(diag_a.len() as u64);
    Ok(out)
}

/// Configuration for [`matmul_strassen`].
#[derive(Clone, Copy, Debug)]
pub struct StrassenConfig {
    /// Sizes at or below this fall back to the sequential product.
    pub cutoff: usize,
}

impl Default for StrassenConfig {
    fn default() -> Self {
        StrassenConfig { cutoff: 64 }
    }
}

/// Strassen's seven-product recursion for square power-of-two sizes.
///
/// Supported for real floats only: the extra additions and subtractions
/// trade arithmetic count for numerical headroom, and that trade is the
/// point of keeping this implementation around — on integer-valued inputs it
/// agrees with [`matmul_sequential`] exactly, on generic float inputs it is
/// measurably less accurate (see the ordering test below).
///
/// Operation counts reflect the arithmetic actually performed: 7 recursive
/// products plus 18 half-size elementwise additions/subtractions per level.
pub fn matmul_strassen<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    config: &StrassenConfig,
    ops: &mut OpCounter,
) -> Result<Matrix<T>, AlgoError> {
    if T::KIND == ScalarKind::Complex64 {
        return Err(AlgoError::UnsupportedKind { kind: T::KIND });
    }
    if config.cutoff == 0 {
        return Err(AlgoError::ZeroCutoff);
    }
    let n = a.rows();
    let square_pow2 =
        |m: &Matrix<T>| m.rows() == m.cols() && m.rows().is_power_of_two();
    if !square_pow2(a) {
        return Err(AlgoError::NotPowerOfTwoSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !square_pow2(b) || b.rows() != n {
        return Err(AlgoError::InnerDimension {
            a_rows: a.rows(),
            a_cols: a.cols(),
            b_rows: b.rows(),
            b_cols: b.cols(),
        });
    }
    Ok(strassen_rec(a, b, config.cutoff, ops))
}

fn strassen_rec<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    cutoff: usize,
    ops: &mut OpCounter,
) -> Matrix<T> {
    let n = a.rows();
    if n <= cutoff {
        return matmul_sequential(a, b, ops).expect("leaf shapes are square");
    }
    let h = n / 2;

    let a11 = quadrant(a, 0, 0, h);
    let a12 = quadrant(a, 0, h, h);
    let a21 = quadrant(a, h, 0, h);
    let a22 = quadrant(a, h, h, h);
    let b11 = quadrant(b, 0, 0, h);
    let b12 = quadrant(b, 0, h, h);
    let b21 = quadrant(b, h, 0, h);
    let b22 = quadrant(b, h, h, h);

    let m1 = strassen_rec(&add(&a11, &a22, ops), &add(&b11, &b22, ops), cutoff, ops);
    let m2 = strassen_rec(&add(&a21, &a22, ops), &b11, cutoff, ops);
    let m3 = strassen_rec(&a11, &sub(&b12, &b22, ops), cutoff, ops);
    let m4 = strassen_rec(&a22, &sub(&b21, &b11, ops), cutoff, ops);
    let m5 = strassen_rec(&add(&a11, &a12, ops), &b22, cutoff, ops);
    let m6 = strassen_rec(&sub(&a21, &a11, ops), &add(&b11, &b12, ops), cutoff, ops);
    let m7 = strassen_rec(&sub(&a12, &a22, ops), &add(&b21, &b22, ops), cutoff, ops);

    // C11 = M1 + M4 − M5 + M7, C12 = M3 + M5,
    // C21 = M2 + M4,           C22 = M1 − M2 + M3 + M6.
    let c11 = add(&sub(&add(&m1, &m4, ops), &m5, ops), &m7, ops);
    let c12 = add(&m3, &m5, ops);
    let c21 = add(&m2, &m4, ops);
    let c22 = add(&add(&sub(&m1, &m2, ops), &m3, ops), &m6, ops);

    assemble(&c11, &c12, &c21, &c22)
}

fn quadrant<T: Scalar>(m: &Matrix<T>, row0: usize, col0: usize, h: usize) -> Matrix<T> {
    let src = m.data();
    let stride = m.cols();
    let mut data = Vec::with_capacity(h * h);
    for i in 0..h {
        let base = (row0 + i) * stride + col0;
        data.extend_from_slice(&src[base..base + h]);
    }
    Matrix::from_vec(h, h, data).expect("quadrant shape is valid")
}

fn add<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>, ops: &mut OpCounter) -> Matrix<T> {
    elementwise(a, b, ElemOp::Add, ops).expect("quadrants share a shape")
}

fn sub<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>, ops: &mut OpCounter) -> Matrix<T> {
    elementwise(a, b, ElemOp::Sub, ops).expect("quadrants share a shape")
}

fn assemble<T: Scalar>(
    c11: &Matrix<T>,
    c12: &Matrix<T>,
    c21: &Matrix<T>,
    c22: &Matrix<T>,
) -> Matrix<T> {
    let h = c11.rows();
    let n = 2 * h;
    let mut data = Vec::with_capacity(n * n);
    for i in 0..h {
        data.extend_from_slice(&c11.data()[i * h..(i + 1) * h]);
        data.extend_from_slice(&c12.data()[i * h..(i + 1) * h]);
    }
    for i in 0..h {
        data.extend_from_slice(&c21.data()[i * h..(i + 1) * h]);
        data.extend_from_slice(&c22.data()[i * h..(i + 1) * h]);
    }
    Matrix::from_vec(n, n, data).expect("assembled shape is valid")
}
