//! Scalar kinds and the generic scalar abstraction.
//!
//! Three element types are supported: `f32`, `f64`, and single-precision
//! complex (`Complex<f32>`, stored as an interleaved re/im pair — 8 bytes).
//! Double-precision complex is deliberately absent. All numeric code in this
//! crate is generic over [`Scalar`]; the [`ScalarKind`] enum is the runtime
//! tag used by the CLI, the bench harness, and the fixture file format.

use num_complex::Complex32;
use num_traits::Num;
use std::fmt;

use crate::rng::SplitMix64;

/// Runtime tag for the supported element types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScalarKind {
    Float32,
    Float64,
    Complex64,
}

impl ScalarKind {
    pub const ALL: [ScalarKind; 3] = [
        ScalarKind::Float32,
        ScalarKind::Float64,
        ScalarKind::Complex64,
    ];

    /// Bytes per element: 4, 8, and 8 (two packed `f32` components).
    pub fn byte_width(self) -> usize {
        match self {
            ScalarKind::Float32 => 4,
            ScalarKind::Float64 => 8,
            ScalarKind::Complex64 => 8,
        }
    }

    /// Tag byte used by the fixture file format.
    pub fn tag_byte(self) -> u8 {
        match self {
            ScalarKind::Float32 => 0,
            ScalarKind::Float64 => 1,
            ScalarKind::Complex64 => 2,
        }
    }

    pub fn from_tag_byte(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(ScalarKind::Float32),
            1 => Some(ScalarKind::Float64),
            2 => Some(ScalarKind::Complex64),
            _ => None,
        }
    }

    /// Short name as used by CLI flags and CSV output.
    pub fn name(self) -> &'static str {
        match self {
            ScalarKind::Float32 => "f32",
            ScalarKind::Float64 => "f64",
            ScalarKind::Complex64 => "c64",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "f32" => Some(ScalarKind::Float32),
            "f64" => Some(ScalarKind::Float64),
            "c64" => Some(ScalarKind::Complex64),
            _ => None,
        }
    }
}

impl fmt::Display for ScalarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Element type usable in matrices and kernels.
///
/// Beyond arithmetic (`num_traits::Num`), a scalar knows its runtime
/// [`ScalarKind`], a fixed little-endian byte encoding (used for checksums
/// and fixture files), deterministic sampling rules, and the error-metric
/// primitives (`f64` modulus of a difference).
pub trait Scalar:
    Num + Copy + Default + Send + Sync + PartialEq + fmt::Debug + crate::engine::SharedElem + 'static
{
    const KIND: ScalarKind;

    /// One sample per component, uniform in `[-1, 1)`, drawn in component
    /// order (complex: re first, then im).
    fn sample_unit(rng: &mut SplitMix64) -> Self;

    /// Integer-valued sample per component, uniform in `[-bound, bound]`.
    fn sample_int(rng: &mut SplitMix64, bound: u32) -> Self;

    /// Append the little-endian encoding (complex: re bytes then im bytes).
    fn write_le(self, out: &mut Vec<u8>);

    /// Decode exactly `KIND.byte_width()` little-endian bytes.
    fn read_le(bytes: &[u8]) -> Self;

    /// |self − other| as `f64` (modulus of the difference for complex).
    /// Components are widened to `f64` before subtracting, so the difference
    /// itself is exact.
    fn abs_diff(self, other: Self) -> f64 {
        self.diff_norm_sqr(other).sqrt()
    }

    /// |self − other|² accumulated in `f64`.
    fn diff_norm_sqr(self, other: Self) -> f64;

    /// |self|² in `f64` (for Frobenius norms).
    fn norm_sqr(self) -> f64;
}

impl Scalar for f32 {
    const KIND: ScalarKind = ScalarKind::Float32;

    fn sample_unit(rng: &mut SplitMix64) -> Self {
        rng.next_unit_f32()
    }

    fn sample_int(rng: &mut SplitMix64, bound: u32) -> Self {
        rng.next_int(bound) as f32
    }

    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        f32::from_le_bytes(bytes.try_into().expect("f32 needs 4 bytes"))
    }

    fn diff_norm_sqr(self, other: Self) -> f64 {
        let d = f64::from(self) - f64::from(other);
        d * d
    }

    fn norm_sqr(self) -> f64 {
        let v = f64::from(self);
        v * v
    }
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Float64;

    fn sample_unit(rng: &mut SplitMix64) -> Self {
        rng.next_unit_f64()
    }

    fn sample_int(rng: &mut SplitMix64, bound: u32) -> Self {
        rng.next_int(bound) as f64
    }

    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        f64::from_le_bytes(bytes.try_into().expect("f64 needs 8 bytes"))
    }

    fn diff_norm_sqr(self, other: Self) -> f64 {
        let d = self - other;
        d * d
    }

    fn norm_sqr(self) -> f64 {
        self * self
    }
}

impl Scalar for Complex32 {
    const KIND: ScalarKind = ScalarKind::Complex64;

    fn sample_unit(rng: &mut SplitMix64) -> Self {
        let re = rng.next_unit_f32();
        let im = rng.next_unit_f32();
        Complex32::new(re, im)
    }

    fn sample_int(rng: &mut SplitMix64, bound: u32) -> Self {
        let re = rng.next_int(bound) as f32;
        let im = rng.next_int(bound) as f32;
        Complex32::new(re, im)
    }

    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.re.to_le_bytes());
        out.extend_from_slice(&self.im.to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        let re = f32::from_le_bytes(bytes[0..4].try_into().expect("c64 needs 8 bytes"));
        let im = f32::from_le_bytes(bytes[4..8].try_into().expect("c64 needs 8 bytes"));
        Complex32::new(re, im)
    }

    fn diff_norm_sqr(self, other: Self) -> f64 {
        let dre = f64::from(self.re) - f64::from(other.re);
        let dim = f64::from(self.im) - f64::from(other.im);
        dre * dre + dim * dim
    }

    fn norm_sqr(self) -> f64 {
        let re = f64::from(self.re);
        let im = f64::from(self.im);
        re * re + im * im
    }
}

/// Complex product `(a+bi)(c+di) = (ac − bd) + (ad + bc)i`, all four partial
/// products in `f32`. This is exactly what `Complex32`'s `Mul` does; the
/// named function exists as the explicit statement of the formula every
/// kernel inherits through the generic `*`.
pub fn complex_mul(x: Complex32, y: Complex32) -> Complex32 {
    x * y
}
