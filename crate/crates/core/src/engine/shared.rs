//! Per-block shared memory.
//!
//! A block's scratch space is requested in bytes (that is what the device
//! budget is expressed in) and zero-initialized before any thread of the
//! block runs. Kernels access it through typed views; internally the buffer
//! is an array of 64-bit words so that typed loads and stores are a shift
//! and a mask instead of per-byte assembly. Elements are 4 or 8 bytes wide
//! and views must be aligned to their element size, so an element never
//! straddles a word.
//!
//! All of a block's logical threads are driven on one OS thread, which is
//! why plain `Cell` storage is sound here: the buffer type is deliberately
//! `!Sync` and never leaves its block.

use std::cell::Cell;
use std::marker::PhantomData;

use num_complex::Complex32;

/// Value types that can live in shared memory. The bit layout matches the
/// little-endian byte encoding used everywhere else: a 4-byte element
/// occupies the low 32 bits of its lane, and `Complex32` packs re into the
/// low half and im into the high half (re at the lower byte address).
pub trait SharedElem: Copy {
    /// Element width in bytes: 4 or 8.
    const BYTES: usize;

    fn to_bits64(self) -> u64;
    fn from_bits64(bits: u64) -> Self;
}

impl SharedElem for f32 {
    const BYTES: usize = 4;

    fn to_bits64(self) -> u64 {
        u64::from(self.to_bits())
    }

    fn from_bits64(bits: u64) -> Self {
        f32::from_bits(bits as u32)
    }
}

impl SharedElem for f64 {
    const BYTES: usize = 8;

    fn to_bits64(self) -> u64 {
        self.to_bits()
    }

    fn from_bits64(bits: u64) -> Self {
        f64::from_bits(bits)
    }
}

impl SharedElem for u32 {
    const BYTES: usize = 4;

    fn to_bits64(self) -> u64 {
        u64::from(self)
    }

    fn from_bits64(bits: u64) -> Self {
        bits as u32
    }
}

impl SharedElem for u64 {
    const BYTES: usize = 8;

    fn to_bits64(self) -> u64 {
        self
    }

    fn from_bits64(bits: u64) -> Self {
        bits
    }
}

impl SharedElem for Complex32 {
    const BYTES: usize = 8;

    fn to_bits64(self) -> u64 {
        u64::from(self.re.to_bits()) | (u64::from(self.im.to_bits()) << 32)
    }

    fn from_bits64(bits: u64) -> Self {
        Complex32::new(f32::from_bits(bits as u32), f32::from_bits((bits >> 32) as u32))
    }
}

/// One block's zero-initialized scratch buffer.
pub struct SharedBuffer {
    words: Box<[Cell<u64>]>,
    len_bytes: usize,
}

impl SharedBuffer {
    pub(crate) fn zeroed(len_bytes: usize) -> Self {
        let words = len_bytes.div_ceil(8);
        SharedBuffer {
            words: (0..words).map(|_| Cell::new(0)).collect(),
            len_bytes,
        }
    }

    /// Size of the buffer in bytes, exactly as requested by the launch.
    pub fn len_bytes(&self) -> usize {
        self.len_bytes
    }

    /// Typed window of `len` elements starting `byte_offset` bytes into the
    /// buffer. Panics if the offset is not aligned to the element size or
    /// the window overruns the requested byte budget — carving bugs surface
    /// as kernel failures with thread coordinates attached, not as silent
    /// overlap.
    pub fn view<E: SharedElem>(&self, byte_offset: usize, len: usize) -> SharedView<'_, E> {
        assert!(
            byte_offset % E::BYTES == 0,
            "shared view at byte {byte_offset} is not aligned to {}-byte elements",
            E::BYTES
        );
        let end = byte_offset + len * E::BYTES;
        assert!(
            end <= self.len_bytes,
            "shared view [{byte_offset}, {end}) exceeds the {}-byte shared buffer",
            self.len_bytes
        );
        SharedView {
            buffer: self,
            base_bytes: byte_offset,
            len,
            _elem: PhantomData,
        }
    }
}

/// Typed element window into a [`SharedBuffer`].
#[derive(Clone, Copy)]
pub struct SharedView<'a, E> {
    buffer: &'a SharedBuffer,
    base_bytes: usize,
    len: usize,
    _elem: PhantomData<E>,
}

impl<'a, E: SharedElem> SharedView<'a, E> {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, index: usize) -> E {
        assert!(index < self.len, "shared read {index} out of {}", self.len);
        let addr = self.base_bytes + index * E::BYTES;
        let word = self.buffer.words[addr / 8].get();
        if E::BYTES == 8 {
            E::from_bits64(word)
        } else {
            let shift = (addr % 8) * 8;
            E::from_bits64((word >> shift) & 0xFFFF_FFFF)
        }
    }

    pub fn set(&self, index: usize, value: E) {
        assert!(index < self.len, "shared write {index} out of {}", self.len);
        let addr = self.base_bytes + index * E::BYTES;
        let slot = &self.buffer.words[addr / 8];
        if E::BYTES == 8 {
            slot.set(value.to_bits64());
        } else {
            let shift = (addr % 8) * 8;
            let mask = 0xFFFF_FFFFu64 << shift;
            let word = (slot.get() & !mask) | ((value.to_bits64() & 0xFFFF_FFFF) << shift);
            slot.set(word);
        }
    }
}
