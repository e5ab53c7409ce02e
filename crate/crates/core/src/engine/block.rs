//! Block execution: cooperative lockstep scheduling of a block's threads.
//!
//! Every logical thread of a block is one future; the kernel body runs
//! synchronously between barrier calls and `barrier().await` is its only
//! suspension point. The driver polls all live threads in a fixed order
//! (row-major by thread id), which yields one "segment" of every thread per
//! round; the block barrier releases between rounds once every thread of
//! the block has arrived. The schedule is therefore fully deterministic and
//! single-threaded per block — worker parallelism exists only *across*
//! blocks.
//!
//! Because progress is driven, not awaited, barrier misuse cannot hang: a
//! round that changes nothing is a proof that no release can ever happen,
//! and the driver turns it into an error instead of spinning.

use std::cell::Cell;
use std::future::Future;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::pin::Pin;
use std::task::{Context, Poll, Waker};

use crate::counter::OpCounter;

use super::shared::{SharedBuffer, SharedElem, SharedView};
use super::LaunchConfig;

/// The pinned, type-erased future a kernel body compiles to.
pub type KernelBody<'a> = Pin<Box<dyn Future<Output = ()> + 'a>>;

/// Per-block barrier bookkeeping. `arrived` counts threads parked at the
/// current generation; advancing the generation is the release.
pub(crate) struct BarrierState {
    arrived: Cell<usize>,
    generation: Cell<u64>,
}

impl BarrierState {
    fn new() -> Self {
        BarrierState {
            arrived: Cell::new(0),
            generation: Cell::new(0),
        }
    }

    fn release(&self) {
        self.arrived.set(0);
        self.generation.set(self.generation.get() + 1);
    }
}

/// Future returned by [`ThreadCtx::barrier`]. The first poll registers the
/// arrival; later polls resolve once the barrier generation has advanced.
pub struct BarrierWait<'a> {
    state: &'a BarrierState,
    arrived_at: Option<u64>,
}

impl Future for BarrierWait<'_> {
    type Output = ();

    fn poll(self: Pin<&mut Self>, _cx: &mut Context<'_>) -> Poll<()> {
        let this = self.get_mut();
        match this.arrived_at {
            None => {
                let gen = this.state.generation.get();
                this.state.arrived.set(this.state.arrived.get() + 1);
                this.arrived_at = Some(gen);
                Poll::Pending
            }
            Some(gen) => {
                if this.state.generation.get() > gen {
                    Poll::Ready(())
                } else {
                    Poll::Pending
                }
            }
        }
    }
}

/// Per-block operation tally; threads of a block share it without
/// synchronization (they run on one OS thread).
#[derive(Default)]
pub(crate) struct OpCell {
    multiplies: Cell<u64>,
    additions: Cell<u64>,
}

impl OpCell {
    fn snapshot(&self) -> OpCounter {
        OpCounter {
            multiplies: self.multiplies.get(),
            additions: self.additions.get(),
        }
    }
}

/// Everything a kernel body can see: its coordinates, the launch geometry,
/// the block's shared buffer and barrier, and the operation tally.
///
/// Coordinate tuples are `(x, y)`: `thread.0` indexes columns within the
/// block, `thread.1` rows, and likewise `block` within the grid.
#[derive(Clone, Copy)]
pub struct ThreadCtx<'a> {
    pub block: (usize, usize),
    pub thread: (usize, usize),
    pub grid_dim: (usize, usize),
    pub block_dim: (usize, usize),
    shared: &'a SharedBuffer,
    barrier: &'a BarrierState,
    ops: &'a OpCell,
}

impl<'a> ThreadCtx<'a> {
    /// The block's shared scratch buffer.
    pub fn shared(&self) -> &'a SharedBuffer {
        self.shared
    }

    /// Typed window into shared memory (see [`SharedBuffer::view`]).
    pub fn shared_view<E: SharedElem>(&self, byte_offset: usize, len: usize) -> SharedView<'a, E> {
        self.shared.view(byte_offset, len)
    }

    /// Block-wide barrier: resolves only after every thread of the block
    /// has arrived. All threads must reach the same barrier call the same
    /// number of times; a thread that finishes while siblings wait makes the
    /// launch fail with a deadlock-detection error.
    pub fn barrier(&self) -> BarrierWait<'a> {
        BarrierWait {
            state: self.barrier,
            arrived_at: None,
        }
    }

    pub fn record_mults(&self, n: u64) {
        self.ops.multiplies.set(self.ops.multiplies.get() + n);
    }

    pub fn record_adds(&self, n: u64) {
        self.ops.additions.set(self.ops.additions.get() + n);
    }
}

/// Why a block failed; the launch layer attaches the block coordinates.
pub(crate) enum BlockFailure {
    Panic { thread: (usize, usize), message: String },
    Deadlock { waiting: usize, finished: usize },
    Stalled { pending_outside_barrier: usize },
}

/// Run one block to completion on the calling thread.
pub(crate) fn run_block<A, F>(
    config: &LaunchConfig,
    block: (usize, usize),
    kernel: &F,
    args: &A,
) -> Result<OpCounter, BlockFailure>
where
    F: for<'a> Fn(ThreadCtx<'a>, &'a A) -> KernelBody<'a>,
{
    let (bx, by) = config.block_dim;
    let n = bx * by;

    let shared = SharedBuffer::zeroed(config.shared_bytes);
    let barrier = BarrierState::new();
    let ops = OpCell::default();

    // Thread id is row-major with x fastest: id = ty·bx + tx. This is also
    // the fixed polling order, so intra-block interleaving is deterministic.
    let mut coords = Vec::with_capacity(n);
    let mut slots: Vec<Option<KernelBody<'_>>> = Vec::with_capacity(n);
    for ty in 0..by {
        for tx in 0..bx {
            let ctx = ThreadCtx {
                block,
                thread: (tx, ty),
                grid_dim: config.grid_dim,
                block_dim: config.block_dim,
                shared: &shared,
                barrier: &barrier,
                ops: &ops,
            };
            coords.push((tx, ty));
            slots.push(Some(kernel(ctx, args)));
        }
    }

    let mut cx = Context::from_waker(Waker::noop());
    let mut done = 0usize;
    loop {
        let arrived_before = barrier.arrived.get();
        let mut finished_this_round = 0usize;
        for idx in 0..n {
            let Some(fut) = slots[idx].as_mut() else {
                continue;
            };
            match catch_unwind(AssertUnwindSafe(|| fut.as_mut().poll(&mut cx))) {
                Err(payload) => {
                    return Err(BlockFailure::Panic {
                        thread: coords[idx],
                        message: panic_message(&*payload),
                    });
                }
                Ok(Poll::Ready(())) => {
                    slots[idx] = None;
                    finished_this_round += 1;
                }
                Ok(Poll::Pending) => {}
            }
        }
        done += finished_this_round;
        if done == n {
            return Ok(ops.snapshot());
        }

        let arrived = barrier.arrived.get();
        let live = n - done;
        if arrived == n {
            // Every thread of the block is parked at the barrier: release.
            barrier.release();
            continue;
        }
        if arrived == live && done > 0 {
            // All surviving threads wait, but finished threads can never
            // arrive — the barrier is unreachable for the block.
            return Err(BlockFailure::Deadlock {
                waiting: live,
                finished: done,
            });
        }
        if finished_this_round == 0 && arrived == arrived_before {
            // A full round with no completion, no new arrival and no
            // possible release: some future is pending on something that is
            // not the block barrier, and nothing will ever wake it.
            return Err(BlockFailure::Stalled {
                pending_outside_barrier: live - arrived,
            });
        }
    }
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "kernel panicked".to_string()
    }
}
