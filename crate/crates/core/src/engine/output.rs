//! Output buffer shared by all blocks of a launch.
//!
//! Kernels follow a strict ownership discipline: every output element is
//! written by exactly one logical thread. That discipline — not a lock — is
//! what makes the buffer safe to share across worker threads, so debug
//! builds enforce it with a write-once shadow and panic on the first
//! violation (the engine converts that panic into an error carrying the
//! offending thread's coordinates).

use std::cell::UnsafeCell;
use std::sync::atomic::{AtomicBool, Ordering};

pub struct OutputBuffer<T> {
    cells: Box<[UnsafeCell<T>]>,
    #[cfg(debug_assertions)]
    written: Box<[AtomicBool]>,
}

// SAFETY: concurrent access is only ever disjoint-per-index writes (the
// write-once contract above, checked in debug builds); reads happen after
// the launch completes, through `&mut self` / by-value APIs.
unsafe impl<T: Send + Sync> Sync for OutputBuffer<T> {}

impl<T: Copy + Default> OutputBuffer<T> {
    pub fn new(len: usize) -> Self {
        OutputBuffer {
            cells: (0..len).map(|_| UnsafeCell::new(T::default())).collect(),
            #[cfg(debug_assertions)]
            written: (0..len).map(|_| AtomicBool::new(false)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Store `value` at `index`. Each index must be written by at most one
    /// logical thread per launch; debug builds panic on a second write.
    pub fn write(&self, index: usize, value: T) {
        assert!(
            index < self.cells.len(),
            "output write {index} out of {}",
            self.cells.len()
        );
        #[cfg(debug_assertions)]
        {
            let already = self.written[index].swap(true, Ordering::Relaxed);
            assert!(!already, "output element {index} written more than once");
        }
        // SAFETY: in-bounds (asserted above); no other thread writes this
        // index (write-once contract) and nobody reads until the launch is
        // over.
        unsafe {
            *self.cells[index].get() = value;
        }
    }

    pub fn into_vec(self) -> Vec<T> {
        self.cells
            .into_vec()
            .into_iter()
            .map(UnsafeCell::into_inner)
            .collect()
    }
}
