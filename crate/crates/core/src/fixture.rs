//! Binary matrix fixtures for cross-run and cross-tool comparison.
//!
//! The layout is deliberately tiny and endian-pinned: magic `STMX`, one
//! version byte (1), one scalar-kind tag byte (0 = f32, 1 = f64, 2 = c64),
//! rows and cols as 64-bit little-endian, then the row-major element data
//! in the same little-endian encoding the checksummer uses. A file written
//! on any platform reads back bit-identically on any other.

use std::path::Path;

use num_complex::Complex32;
use thiserror::Error;

use crate::bench::fnv1a;
use crate::matrix::{ErrorMetric, Matrix, MatrixError};
use crate::scalar::{Scalar, ScalarKind};

pub const STMX_MAGIC: [u8; 4] = *b"STMX";
pub const STMX_VERSION: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 1 + 8 + 8;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("not a matrix fixture: magic bytes {found:02x?} != {STMX_MAGIC:02x?}")]
    BadMagic { found: [u8; 4] },
    #[error("unsupported fixture version {found} (expected {STMX_VERSION})")]
    BadVersion { found: u8 },
    #[error("unknown scalar kind tag {found}")]
    BadKindTag { found: u8 },
    #[error("fixture holds {found} bytes where {expected} were declared")]
    DataLength { expected: usize, found: usize },
    #[error("fixture header truncated: {found} bytes, need {HEADER_LEN}")]
    TruncatedHeader { found: usize },
    #[error("scalar kinds differ: {left} vs {right}")]
    KindMismatch { left: ScalarKind, right: ScalarKind },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A matrix of any supported scalar kind, as read from a fixture file.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyMatrix {
    F32(Matrix<f32>),
    F64(Matrix<f64>),
    C64(Matrix<Complex32>),
}

impl AnyMatrix {
    pub fn kind(&self) -> ScalarKind {
        match self {
            AnyMatrix::F32(_) => ScalarKind::Float32,
            AnyMatrix::F64(_) => ScalarKind::Float64,
            AnyMatrix::C64(_) => ScalarKind::Complex64,
        }
    }

    pub fn rows(&self) -> usize {
        match self {
            AnyMatrix::F32(m) => m.rows(),
            AnyMatrix::F64(m) => m.rows(),
            AnyMatrix::C64(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            AnyMatrix::F32(m) => m.cols(),
            AnyMatrix::F64(m) => m.cols(),
            AnyMatrix::C64(m) => m.cols(),
        }
    }

    pub fn checksum(&self) -> u64 {
        match self {
            AnyMatrix::F32(m) => fnv1a(&m.le_bytes()),
            AnyMatrix::F64(m) => fnv1a(&m.le_bytes()),
            AnyMatrix::C64(m) => fnv1a(&m.le_bytes()),
        }
    }

    /// Error metrics between two fixtures of the same kind and shape.
    pub fn compare(&self, other: &AnyMatrix) -> Result<ErrorMetric, FixtureError> {
        match (self, other) {
            (AnyMatrix::F32(a), AnyMatrix::F32(b)) => Ok(a.compare(b)?),
            (AnyMatrix::F64(a), AnyMatrix::F64(b)) => Ok(a.compare(b)?),
            (AnyMatrix::C64(a), AnyMatrix::C64(b)) => Ok(a.compare(b)?),
            _ => Err(FixtureError::KindMismatch {
                left: self.kind(),
                right: other.kind(),
            }),
        }
    }
}

impl From<Matrix<f32>> for AnyMatrix {
    fn from(m: Matrix<f32>) -> Self {
        AnyMatrix::F32(m)
    }
}

impl From<Matrix<f64>> for AnyMatrix {
    fn from(m: Matrix<f64>) -> Self {
        AnyMatrix::F64(m)
    }
}

impl From<Matrix<Complex32>> for AnyMatrix {
    fn from(m: Matrix<Complex32>) -> Self {
        AnyMatrix::C64(m)
    }
}

/// Serialize a matrix into the fixture byte layout.
pub fn stmx_bytes<T: Scalar>(m: &Matrix<T>) -> Vec<u8> {
    let data = m.le_bytes();
    let mut out = Vec::with_capacity(HEADER_LEN + data.len());
    out.extend_from_slice(&STMX_MAGIC);
    out.push(STMX_VERSION);
    out.push(T::KIND.tag_byte());
    out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    out.extend_from_slice(&data);
    out
}

pub fn write_stmx<T: Scalar>(m: &Matrix<T>, path: &Path) -> Result<(), FixtureError> {
    std::fs::write(path, stmx_bytes(m))?;
    Ok(())
}

fn decode_elems<T: Scalar>(
    rows: usize,
    cols: usize,
    data: &[u8],
) -> Result<Matrix<T>, FixtureError> {
    let width = T::KIND.byte_width();
    // Saturating on purpose: dims large enough to overflow can never match
    // the real payload length, so they fall into the mismatch error below.
    let expected = rows.saturating_mul(cols).saturating_mul(width);
    if data.len() != expected {
        return Err(FixtureError::DataLength {
            expected,
            found: data.len(),
        });
    }
    let elems: Vec<T> = data.chunks_exact(width).map(T::read_le).collect();
    Ok(Matrix::from_vec(rows, cols, elems)?)
}

/// Deserialize a fixture from its byte layout.
pub fn parse_stmx(bytes: &[u8]) -> Result<AnyMatrix, FixtureError> {
    if bytes.len() < HEADER_LEN {
        return Err(FixtureError::TruncatedHeader { found: bytes.len() });
    }
    let magic: [u8; 4] = bytes[0..4].try_into().expect("length checked");
    if magic != STMX_MAGIC {
        return Err(FixtureError::BadMagic { found: magic });
    }
    if bytes[4] != STMX_VERSION {
        return Err(FixtureError::BadVersion { found: bytes[4] });
    }
    let kind = ScalarKind::from_tag_byte(bytes[5])
        .ok_or(FixtureError::BadKindTag { found: bytes[5] })?;
    let rows = u64::from_le_bytes(bytes[6..14].try_into().expect("length checked")) as usize;
    let cols = u64::from_le_bytes(bytes[14..22].try_into().expect("length checked")) as usize;
    let data = &bytes[HEADER_LEN..];
    Ok(match kind {
        ScalarKind::Float32 => AnyMatrix::F32(decode_elems(rows, cols, data)?),
        ScalarKind::Float64 => AnyMatrix::F64(decode_elems(rows, cols, data)?),
        ScalarKind::Complex64 => AnyMatrix::C64(decode_elems(rows, cols, data)?),
    })
}

pub fn read_stmx(path: &Path) -> Result<AnyMatrix, FixtureError> {
    parse_stmx(&std::fs::read(path)?)
}
