//! `gridmul demo`: launch a tracing kernel on a toy grid and print which
//! output element every (block, thread) pair owns.
//!
//! The mapping printed is the one the real kernels use: a thread at
//! (x = tx, y = ty) in block (bx, by) owns output row `by·block_h + ty`,
//! column `bx·block_w + tx`. The numbers come out of the engine — each
//! thread encodes its computed (row, col) into a slot indexed by its
//! launch rank, and the printer only decodes.

use gridmul_core::engine::{launch, DeviceProfile, KernelBody, LaunchConfig, OutputBuffer, ThreadCtx};

use crate::{CliError, DemoArgs};

/// Keep the ownership map readable: at most this many blocks/threads per axis.
pub const DEMO_AXIS_CAP: usize = 8;

struct TraceArgs {
    slots: OutputBuffer<u64>,
}

fn trace_body<'a>(ctx: ThreadCtx<'a>, args: &'a TraceArgs) -> KernelBody<'a> {
    Box::pin(async move {
        let (bx, by) = ctx.block;
        let (tx, ty) = ctx.thread;
        let (gx, _) = ctx.grid_dim;
        let (bw, bh) = ctx.block_dim;
        let row = by * bh + ty;
        let col = bx * bw + tx;
        let rank = (by * gx + bx) * (bw * bh) + (ty * bw + tx);
        args.slots.write(rank, ((row as u64) << 32) | col as u64);
    })
}

pub fn run(args: DemoArgs) -> Result<(), CliError> {
    let (gx, gy) = args.grid;
    let (bw, bh) = args.block;
    for (label, (x, y)) in [("grid", args.grid), ("block", args.block)] {
        if !(1..=DEMO_AXIS_CAP).contains(&x) || !(1..=DEMO_AXIS_CAP).contains(&y) {
            return Err(CliError::Infeasible(format!(
                "demo cap: grid and block dimensions must be between 1 and \
                 {DEMO_AXIS_CAP} per axis; got {label} {x},{y}"
            )));
        }
    }

    let config = LaunchConfig {
        grid_dim: (gx, gy),
        block_dim: (bw, bh),
        shared_bytes: 0,
        profile: DeviceProfile::modern(),
    };
    let trace = TraceArgs {
        slots: OutputBuffer::new(gx * gy * bw * bh),
    };
    launch(&config, trace_body, &trace)
        .map_err(|e| CliError::Infeasible(e.to_string()))?;
    let slots = trace.slots.into_vec();

    println!(
        "launch: grid {gx}x{gy} of {bw}x{bh} blocks -> {} threads, one output element each",
        slots.len()
    );
    let mut rank = 0;
    for by in 0..gy {
        for bx in 0..gx {
            for ty in 0..bh {
                for tx in 0..bw {
                    let encoded = slots[rank];
                    let row = encoded >> 32;
                    let col = encoded & 0xffff_ffff;
                    println!(
                        "block ({bx},{by}) thread (x={tx},y={ty}) -> C[row {row}, col {col}]"
                    );
                    rank += 1;
                }
            }
        }
    }
    Ok(())
}
