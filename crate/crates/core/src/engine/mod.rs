//! A deterministic, CPU-hosted re-creation of the SIMT launch model.
//!
//! Work is organized the way a GPU runtime organizes it: a 2-D **grid** of
//! independent **blocks**, each a 2-D arrangement of logical **threads**
//! that share a per-block scratch buffer and a block-wide barrier. A launch
//! runs the kernel body once per `(block, thread)` pair — exactly
//! `gx·gy·bx·by` executions — and aggregates the per-block operation
//! tallies.
//!
//! Blocks are distributed over a pool of OS worker threads; block outputs
//! are disjoint by the kernel ownership contract, so results are
//! bit-identical for any worker count. The pool size comes from the
//! `SIMT_WORKERS` environment variable when set (1 means fully sequential
//! execution in the calling thread), otherwise from the host's available
//! parallelism.

mod block;
mod output;
mod shared;

pub use block::{BarrierWait, KernelBody, ThreadCtx};
pub use output::OutputBuffer;
pub use shared::{SharedBuffer, SharedElem, SharedView};

use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

use thiserror::Error;

use crate::counter::OpCounter;

use block::{run_block, BlockFailure};

/// Environment variable overriding the worker-pool size for [`launch`].
pub const WORKERS_ENV: &str = "SIMT_WORKERS";

/// Capability limits a launch is validated against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeviceProfile {
    pub label: String,
    pub max_threads_per_block: usize,
    pub shared_bytes_per_block: usize,
}

impl DeviceProfile {
    /// Older-generation limits: 512 threads and 16 KiB of shared memory per
    /// block.
    pub fn legacy() -> Self {
        DeviceProfile {
            label: "legacy".to_string(),
            max_threads_per_block: 512,
            shared_bytes_per_block: 16_384,
        }
    }

    /// Current-generation limits: 1024 threads and 48 KiB of shared memory
    /// per block.
    pub fn modern() -> Self {
        DeviceProfile {
            label: "modern".to_string(),
            max_threads_per_block: 1024,
            shared_bytes_per_block: 49_152,
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "legacy" => Some(Self::legacy()),
            "modern" => Some(Self::modern()),
            _ => None,
        }
    }

    pub fn custom(
        label: impl Into<String>,
        max_threads_per_block: usize,
        shared_bytes_per_block: usize,
    ) -> Self {
        DeviceProfile {
            label: label.into(),
            max_threads_per_block,
            shared_bytes_per_block,
        }
    }
}

/// One violated launch invariant, with the offending numbers.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ConfigViolation {
    #[error("grid dimensions must be at least 1x1, got {gx}x{gy}", gx = .grid.0, gy = .grid.1)]
    ZeroGridDim { grid: (usize, usize) },
    #[error("block dimensions must be at least 1x1, got {bx}x{by}", bx = .block.0, by = .block.1)]
    ZeroBlockDim { block: (usize, usize) },
    #[error(
        "block ({bx}, {by}) is {threads} threads > {cap} allowed by profile '{profile}'",
        bx = .block.0,
        by = .block.1
    )]
    TooManyThreads {
        block: (usize, usize),
        threads: usize,
        cap: usize,
        profile: String,
    },
    #[error("shared memory request {requested} B > {limit} B allowed by profile '{profile}'")]
    SharedOverBudget {
        requested: usize,
        limit: usize,
        profile: String,
    },
}

/// Geometry and resources of one launch.
#[derive(Clone, Debug)]
pub struct LaunchConfig {
    /// Blocks along (x, y).
    pub grid_dim: (usize, usize),
    /// Threads per block along (x, y).
    pub block_dim: (usize, usize),
    /// Per-block shared memory request, in bytes.
    pub shared_bytes: usize,
    pub profile: DeviceProfile,
}

impl LaunchConfig {
    /// Check every launch invariant; an empty list means the configuration
    /// is valid. All violations are reported, not just the first.
    pub fn validate(&self) -> Vec<ConfigViolation> {
        let mut out = Vec::new();
        if self.grid_dim.0 == 0 || self.grid_dim.1 == 0 {
            out.push(ConfigViolation::ZeroGridDim { grid: self.grid_dim });
        }
        if self.block_dim.0 == 0 || self.block_dim.1 == 0 {
            out.push(ConfigViolation::ZeroBlockDim { block: self.block_dim });
        }
        let threads = self.block_dim.0.saturating_mul(self.block_dim.1);
        if threads > self.profile.max_threads_per_block {
            out.push(ConfigViolation::TooManyThreads {
                block: self.block_dim,
                threads,
                cap: self.profile.max_threads_per_block,
                profile: self.profile.label.clone(),
            });
        }
        if self.shared_bytes > self.profile.shared_bytes_per_block {
            out.push(ConfigViolation::SharedOverBudget {
                requested: self.shared_bytes,
                limit: self.profile.shared_bytes_per_block,
                profile: self.profile.label.clone(),
            });
        }
        out
    }
}

/// Blocks needed to cover a `rows × cols` output with `block_dim` threads
/// per block: `ceil` division per axis, x across columns, y across rows.
/// Block dimensions must be nonzero.
pub fn grid_for(rows: usize, cols: usize, block_dim: (usize, usize)) -> (usize, usize) {
    assert!(
        block_dim.0 > 0 && block_dim.1 > 0,
        "block dimensions must be at least 1x1"
    );
    (cols.div_ceil(block_dim.0), rows.div_ceil(block_dim.1))
}

/// Shared-memory footprint of `tiles` square tiles of side `block_side`
/// holding `elem_bytes`-byte elements: `tiles · block_side² · elem_bytes`.
pub fn shared_budget(block_side: usize, tiles: usize, elem_bytes: usize) -> usize {
    tiles
        .saturating_mul(block_side.saturating_mul(block_side))
        .saturating_mul(elem_bytes)
}

/// Wrapper so the violation list formats readably inside [`LaunchError`].
#[derive(Debug, PartialEq, Eq)]
pub struct Violations(pub Vec<ConfigViolation>);

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum LaunchError {
    #[error("invalid launch configuration: {0}")]
    InvalidConfig(Violations),
    #[error("worker count must be at least 1")]
    ZeroWorkers,
    #[error("{WORKERS_ENV} must be a positive integer, got '{value}'")]
    WorkerEnv { value: String },
    #[error(
        "kernel panicked in block ({gx}, {gy}), thread ({tx}, {ty}): {message}",
        gx = .block.0,
        gy = .block.1,
        tx = .thread.0,
        ty = .thread.1
    )]
    KernelPanic {
        block: (usize, usize),
        thread: (usize, usize),
        message: String,
    },
    #[error(
        "barrier deadlock in block ({gx}, {gy}): {finished} thread(s) finished while {waiting} still wait at the barrier",
        gx = .block.0,
        gy = .block.1
    )]
    BarrierDeadlock {
        block: (usize, usize),
        waiting: usize,
        finished: usize,
    },
    #[error(
        "block ({gx}, {gy}) stalled: {pending} thread(s) suspended outside the block barrier",
        gx = .block.0,
        gy = .block.1
    )]
    Stalled { block: (usize, usize), pending: usize },
}

impl BlockFailure {
    fn into_launch_error(self, block: (usize, usize)) -> LaunchError {
        match self {
            BlockFailure::Panic { thread, message } => LaunchError::KernelPanic {
                block,
                thread,
                message,
            },
            BlockFailure::Deadlock { waiting, finished } => LaunchError::BarrierDeadlock {
                block,
                waiting,
                finished,
            },
            BlockFailure::Stalled {
                pending_outside_barrier,
            } => LaunchError::Stalled {
                block,
                pending: pending_outside_barrier,
            },
        }
    }
}

/// Worker count used when `SIMT_WORKERS` is unset.
pub fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn workers_from_env() -> Result<Option<usize>, LaunchError> {
    match std::env::var(WORKERS_ENV) {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(LaunchError::WorkerEnv { value: raw }),
        },
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(std::env::VarError::NotUnicode(_)) => Err(LaunchError::WorkerEnv {
            value: "<non-unicode>".to_string(),
        }),
    }
}

/// Launch `kernel` over the grid described by `config`, with the worker
/// count resolved from `SIMT_WORKERS` or the host parallelism.
///
/// The kernel is invoked once per `(block, thread)` pair and may await the
/// block barrier; `args` is whatever the kernel needs (matrices, output
/// buffers). Returns the merged operation tally of all blocks.
pub fn launch<A, F>(config: &LaunchConfig, kernel: F, args: &A) -> Result<OpCounter, LaunchError>
where
    A: Sync,
    F: for<'a> Fn(ThreadCtx<'a>, &'a A) -> KernelBody<'a> + Sync,
{
    let workers = workers_from_env()?.unwrap_or_else(default_workers);
    launch_with_workers(config, workers, kernel, args)
}

/// [`launch`] with an explicit worker count (ignores the environment).
/// Outputs and tallies are bit-identical for every worker count.
pub fn launch_with_workers<A, F>(
    config: &LaunchConfig,
    workers: usize,
    kernel: F,
    args: &A,
) -> Result<OpCounter, LaunchError>
where
    A: Sync,
    F: for<'a> Fn(ThreadCtx<'a>, &'a A) -> KernelBody<'a> + Sync,
{
    if workers == 0 {
        return Err(LaunchError::ZeroWorkers);
    }
    let violations = config.validate();
    if !violations.is_empty() {
        return Err(LaunchError::InvalidConfig(Violations(violations)));
    }

    let (gx, gy) = config.grid_dim;
    let total_blocks = gx * gy;
    let block_coords = |idx: usize| (idx % gx, idx / gx);

    if workers == 1 || total_blocks == 1 {
        let mut sum = OpCounter::new();
        for idx in 0..total_blocks {
            let coords = block_coords(idx);
            let tally = run_block(config, coords, &kernel, args)
                .map_err(|f| f.into_launch_error(coords))?;
            sum.merge(tally);
        }
        return Ok(sum);
    }

    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let results: Mutex<Vec<Option<OpCounter>>> = Mutex::new(vec![None; total_blocks]);
    // On failure, keep the error from the lowest block index so multi-worker
    // runs report deterministically.
    let first_err: Mutex<Option<(usize, LaunchError)>> = Mutex::new(None);

    std::thread::scope(|scope| {
        for _ in 0..workers.min(total_blocks) {
            scope.spawn(|| loop {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= total_blocks {
                    break;
                }
                let coords = block_coords(idx);
                match run_block(config, coords, &kernel, args) {
                    Ok(tally) => {
                        results.lock().unwrap()[idx] = Some(tally);
                    }
                    Err(failure) => {
                        let err = failure.into_launch_error(coords);
                        let mut slot = first_err.lock().unwrap();
                        let replace = match slot.as_ref() {
                            None => true,
                            Some((held, _)) => idx < *held,
                        };
                        if replace {
                            *slot = Some((idx, err));
                        }
                        stop.store(true, Ordering::Relaxed);
                    }
                }
            });
        }
    });

    if let Some((_, err)) = first_err.into_inner().unwrap() {
        return Err(err);
    }
    let mut sum = OpCounter::new();
    for tally in results.into_inner().unwrap() {
        sum.merge(tally.expect("every block ran to completion"));
    }
    Ok(sum)
}
