//! Matrix kernels expressed against the grid/block/thread model.
//!
//! Three multiplication strategies with one thread per output element:
//!
//! * **single-block** — the whole product computed by one block; capped by
//!   the per-block thread limit, kept as the minimal didactic form.
//! * **global** — a grid of blocks, every thread streaming its whole dot
//!   product from the input matrices.
//! * **tiled** — the shared-memory form: each block walks the inner
//!   dimension in `side × side` tiles, stages an A-tile and a B-tile in
//!   block-shared scratch, and barriers twice per step (once after loading,
//!   once before reloading). Every element of a staged tile is read
//!   `side` times from scratch instead of `side` times from the matrices.
//!
//! All three accumulate each output element in ascending inner-index order,
//! which makes them bit-identical to the sequential reference and to each
//! other — equality tests compare raw bits, not tolerances.

use crate::counter::OpCounter;
use crate::engine::{
    grid_for, launch, shared_budget, KernelBody, LaunchConfig, LaunchError, OutputBuffer,
    ThreadCtx,
};
use crate::matrix::Matrix;
use crate::reference::ElemOp;
use crate::scalar::Scalar;

use thiserror::Error;

/// Relative-Frobenius tolerance for f32 results checked against an exact
/// or higher-precision oracle.
pub const REL_TOL_F32: f64 = 1e-6;
/// Relative-Frobenius tolerance for f64 results.
pub const REL_TOL_F64: f64 = 1e-13;

/// Tolerance appropriate for a scalar kind (complex uses f32 parts).
pub fn rel_tol(kind: crate::scalar::ScalarKind) -> f64 {
    match kind {
        crate::scalar::ScalarKind::Float64 => REL_TOL_F64,
        _ => REL_TOL_F32,
    }
}

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("inner dimensions do not match: left is {0}x{1}, right is {2}x{3}")]
    InnerDimension(usize, usize, usize, usize),
    #[error("shapes do not match: left is {0}x{1}, right is {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("single-block kernel needs square matrices, got {0}x{1}")]
    NonSquare(usize, usize),
    #[error(
        "single-block kernel covers a {bx}x{by} block, cannot produce a {n}x{n} result"
    )]
    BlockTooSmall { bx: usize, by: usize, n: usize },
    #[error(
        "tiled kernel needs the matrix side divisible by the block side: {n} % {side} != 0"
    )]
    NotTileable { n: usize, side: usize },
    #[error(transparent)]
    Launch(#[from] LaunchError),
}

/// Inputs shared by every matmul body. Lifetimes tie the kernel futures to
/// the borrowed matrices and output for the duration of one launch.
struct MatmulArgs<'m, T: Scalar> {
    a: &'m Matrix<T>,
    b: &'m Matrix<T>,
    out: OutputBuffer<T>,
}

/// One thread of the single-block form: thread `(x, y)` owns output row
/// `y`, column `x` of an `n × n` product — thread x walks across a row.
/// Threads outside the matrix idle.
fn single_block_body<'a, 'm, T: Scalar>(
    ctx: ThreadCtx<'a>,
    args: &'a MatmulArgs<'m, T>,
) -> KernelBody<'a> {
    Box::pin(async move {
        let n = args.a.rows();
        let (col, row) = (ctx.thread.0, ctx.thread.1);
        if row >= n || col >= n {
            return;
        }
        let mut acc = T::zero();
        for r in 0..n {
            acc = acc + args.a[(row, r)] * args.b[(r, col)];
        }
        ctx.record_mults(n as u64);
        ctx.record_adds(n as u64);
        args.out.write(n * row + col, acc);
    })
}

/// One thread of the grid-wide form: global coordinates come from the block
/// and thread indices, x across columns and y across rows. Threads past the
/// matrix edge (partial blocks) idle.
fn global_body<'a, 'm, T: Scalar>(
    ctx: ThreadCtx<'a>,
    args: &'a MatmulArgs<'m, T>,
) -> KernelBody<'a> {
    Box::pin(async move {
        let rows = args.a.rows();
        let inner = args.a.cols();
        let cols = args.b.cols();
        let row = ctx.block.1 * ctx.block_dim.1 + ctx.thread.1;
        let col = ctx.block.0 * ctx.block_dim.0 + ctx.thread.0;
        if row >= rows || col >= cols {
            return;
        }
        let mut acc = T::zero();
        for r in 0..inner {
            acc = acc + args.a[(row, r)] * args.b[(r, col)];
        }
        ctx.record_mults(inner as u64);
        ctx.record_adds(inner as u64);
        args.out.write(cols * row + col, acc);
    })
}

/// One thread of the shared-memory form, for square matrices whose side is
/// a multiple of the block side.
///
/// The block at `(block_x, block_y)` produces the output tile whose
/// top-left element is `cols·side·block_y + side·block_x` (flat index).
/// Two cursors walk the inputs: `a_cursor` starts at row `side·block_y` of
/// A and advances one tile to the right per step; `b_cursor` starts at
/// column `side·block_x` of B and advances one tile down per step.
fn tiled_body<'a, 'm, T: Scalar>(
    ctx: ThreadCtx<'a>,
    args: &'a MatmulArgs<'m, T>,
) -> KernelBody<'a> {
    Box::pin(async move {
        let n = args.a.rows();
        let side = ctx.block_dim.0;
        let (tx, ty) = ctx.thread;
        let (block_x, block_y) = ctx.block;

        // Two staged tiles carved out of block-shared scratch: the A-tile
        // at byte 0, the B-tile immediately behind it.
        let tile_elems = side * side;
        let a_tile = ctx.shared_view::<T>(0, tile_elems);
        let b_tile = ctx.shared_view::<T>(tile_elems * T::KIND.byte_width(), tile_elems);

        let a_data = args.a.data();
        let b_data = args.b.data();

        // Flat starting offsets of this block's first tiles.
        let a_start = n * side * block_y;
        let b_start = side * block_x;
        let steps = n / side;

        let mut acc = T::zero();
        let mut a_cursor = a_start;
        let mut b_cursor = b_start;
        for _ in 0..steps {
            // Each thread stages one element of each tile...
            a_tile.set(side * ty + tx, a_data[a_cursor + n * ty + tx]);
            b_tile.set(side * ty + tx, b_data[b_cursor + n * ty + tx]);
            // ...and may read the whole tile only when everyone has staged.
            ctx.barrier().await;
            for r in 0..side {
                acc = acc + a_tile.get(side * ty + r) * b_tile.get(side * r + tx);
            }
            // No thread may restage until everyone is done reading.
            ctx.barrier().await;
            a_cursor += side;
            b_cursor += side * n;
        }
        ctx.record_mults(n as u64);
        ctx.record_adds(n as u64);

        let c_origin = n * side * block_y + side * block_x;
        args.out.write(c_origin + n * ty + tx, acc);
    })
}

struct ElemArgs<'m, T: Scalar> {
    a: &'m Matrix<T>,
    b: &'m Matrix<T>,
    op: ElemOp,
    out: OutputBuffer<T>,
}

/// One thread per element; partial edge blocks idle past the boundary.
fn elementwise_body<'a, 'm, T: Scalar>(
    ctx: ThreadCtx<'a>,
    args: &'a ElemArgs<'m, T>,
) -> KernelBody<'a> {
    Box::pin(async move {
        let rows = args.a.rows();
        let cols = args.a.cols();
        let row = ctx.block.1 * ctx.block_dim.1 + ctx.thread.1;
        let col = ctx.block.0 * ctx.block_dim.0 + ctx.thread.0;
        if row >= rows || col >= cols {
            return;
        }
        let value = match args.op {
            ElemOp::Add => args.a[(row, col)] + args.b[(row, col)],
            ElemOp::Sub => args.a[(row, col)] - args.b[(row, col)],
        };
        ctx.record_adds(1);
        args.out.write(cols * row + col, value);
    })
}

fn check_inner<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<(), KernelError> {
    if a.cols() != b.rows() {
        return Err(KernelError::InnerDimension(
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols(),
        ));
    }
    Ok(())
}

/// Square product computed by a single block, one thread per element.
/// `config.grid_dim` must be `(1, 1)` and the block must cover the matrix.
pub fn matmul_single_block<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    config: &LaunchConfig,
) -> Result<(Matrix<T>, OpCounter), KernelError> {
    check_inner(a, b)?;
    if a.rows() != a.cols() || b.rows() != b.cols() {
        return Err(KernelError::NonSquare(a.rows(), b.cols()));
    }
    let n = a.rows();
    if config.block_dim.0 < n || config.block_dim.1 < n {
        return Err(KernelError::BlockTooSmall {
            bx: config.block_dim.0,
            by: config.block_dim.1,
            n,
        });
    }
    let config = LaunchConfig {
        grid_dim: (1, 1),
        ..config.clone()
    };
    let args = MatmulArgs {
        a,
        b,
        out: OutputBuffer::new(n * n),
    };
    let ops = launch(&config, single_block_body, &args)?;
    let out = Matrix::from_vec(n, n, args.out.into_vec()).expect("kernel output shape");
    Ok((out, ops))
}

/// Product over a grid of blocks reading straight from the inputs; accepts
/// any shapes with matching inner dimension (edge blocks run partial).
pub fn matmul_global<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    block_dim: (usize, usize),
    profile: &crate::engine::DeviceProfile,
) -> Result<(Matrix<T>, OpCounter), KernelError> {
    check_inner(a, b)?;
    let (rows, cols) = (a.rows(), b.cols());
    let config = LaunchConfig {
        grid_dim: grid_for(rows, cols, block_dim),
        block_dim,
        shared_bytes: 0,
        profile: profile.clone(),
    };
    let args = MatmulArgs {
        a,
        b,
        out: OutputBuffer::new(rows * cols),
    };
    let ops = launch(&config, global_body, &args)?;
    let out = Matrix::from_vec(rows, cols, args.out.into_vec()).expect("kernel output shape");
    Ok((out, ops))
}

/// Shared-memory tiled product for square matrices whose side is a
/// multiple of `block_side`. Shared scratch holds two `block_side²` tiles.
pub fn matmul_tiled<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    block_side: usize,
    profile: &crate::engine::DeviceProfile,
) -> Result<(Matrix<T>, OpCounter), KernelError> {
    check_inner(a, b)?;
    if a.rows() != a.cols() || b.rows() != b.cols() {
        return Err(KernelError::NonSquare(a.rows(), b.cols()));
    }
    let n = a.rows();
    if block_side == 0 || n % block_side != 0 {
        return Err(KernelError::NotTileable {
            n,
            side: block_side,
        });
    }
    let config = LaunchConfig {
        grid_dim: (n / block_side, n / block_side),
        block_dim: (block_side, block_side),
        shared_bytes: shared_budget(block_side, 2, T::KIND.byte_width()),
        profile: profile.clone(),
    };
    let args = MatmulArgs {
        a,
        b,
        out: OutputBuffer::new(n * n),
    };
    let ops = launch(&config, tiled_body, &args)?;
    let out = Matrix::from_vec(n, n, args.out.into_vec()).expect("kernel output shape");
    Ok((out, ops))
}

/// Elementwise add/subtract over a grid of blocks, any matching shapes.
pub fn elementwise_kernel<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    op: ElemOp,
    block_dim: (usize, usize),
    profile: &crate::engine::DeviceProfile,
) -> Result<(Matrix<T>, OpCounter), KernelError> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(KernelError::ShapeMismatch(
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols(),
        ));
    }
    let (rows, cols) = (a.rows(), a.cols());
    let config = LaunchConfig {
        grid_dim: grid_for(rows, cols, block_dim),
        block_dim,
        shared_bytes: 0,
        profile: profile.clone(),
    };
    let args = ElemArgs {
        a,
        b,
        op,
        out: OutputBuffer::new(rows * cols),
    };
    let ops = launch(&config, elementwise_body, &args)?;
    let out = Matrix::from_vec(rows, cols, args.out.into_vec()).expect("kernel output shape");
    Ok((out, ops))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::DeviceProfile;
    use crate::reference::matmul_sequential;
    use num_complex::Complex32;

    fn modern() -> DeviceProfile {
        DeviceProfile::modern()
    }

    fn single_block_config(n: usize) -> LaunchConfig {
        LaunchConfig {
            grid_dim: (1, 1),
            block_dim: (n, n),
            shared_bytes: 0,
            profile: modern(),
        }
    }

    fn bits<T: Scalar>(m: &Matrix<T>) -> Vec<u8> {
        m.le_bytes()
    }

    #[test]
    fn single_block_worked_example() {
        // C = A·B for A = [[1,2],[3,4]], B = [[5,6],[7,8]]:
        // C[0][0] = 1·5 + 2·7 = 19, C[0][1] = 1·6 + 2·8 = 22,
        // C[1][0] = 3·5 + 4·7 = 43, C[1][1] = 3·6 + 4·8 = 50.
        let a = Matrix::from_vec(2, 2, vec![1.0f64, 2.0, 3.0, 4.0]).unwrap();
        let b = Matrix::from_vec(2, 2, vec![5.0, 6.0, 7.0, 8.0]).unwrap();
        let (c, ops) = matmul_single_block(&a, &b, &single_block_config(2)).unwrap();
        assert_eq!(c.data(), &[19.0, 22.0, 43.0, 50.0]);
        assert_eq!(ops.multiplies, 8);
        assert_eq!(ops.additions, 8);
    }

    #[test]
    fn single_block_thread_to_element_mapping() {
        // The single-block form maps thread (x, y) to C[row y][col x]: the
        // thread at (x=0, y=1) owns C[1][0]. With A = diag(1, 2, 3) and B
        // all-ones, C[i][j] = i + 1 — so a transposed mapping would land 1
        // where 2 belongs, and this asymmetric product pins the convention.
        let a = Matrix::from_vec(3, 3, vec![1.0f64, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0])
            .unwrap();
        let b = Matrix::from_vec(3, 3, vec![1.0f64; 9]).unwrap();
        let (c, _) = matmul_single_block(&a, &b, &single_block_config(3)).unwrap();
        assert_eq!(c[(1, 0)], 2.0);
        assert_eq!(c[(0, 1)], 1.0);
        assert_eq!(c[(2, 2)], 3.0);
    }

    #[test]
    fn single_block_identity_is_bitwise() {
        let a: Matrix<f64> = Matrix::seeded_random(8, 8, 7).unwrap();
        let i = Matrix::identity(8).unwrap();
        let (c, _) = matmul_single_block(&a, &i, &single_block_config(8)).unwrap();
        assert_eq!(bits(&c), bits(&a));
    }

    #[test]
    fn single_block_matches_sequential_bitwise() {
        let a: Matrix<f64> = Matrix::seeded_random(16, 16, 21).unwrap();
        let b: Matrix<f64> = Matrix::seeded_random(16, 16, 22).unwrap();
        let mut ops = OpCounter::new();
        let expect = matmul_sequential(&a, &b, &mut ops).unwrap();
        let (c, kops) = matmul_single_block(&a, &b, &single_block_config(16)).unwrap();
        assert_eq!(bits(&c), bits(&expect));
        assert_eq!(kops, ops);
    }

    #[test]
    fn single_block_rejects_undersized_block() {
        let a: Matrix<f32> = Matrix::seeded_random(4, 4, 1).unwrap();
        let err = matmul_single_block(&a, &a, &single_block_config(3)).unwrap_err();
        assert!(matches!(err, KernelError::BlockTooSmall { n: 4, .. }));
    }

    #[test]
    fn global_handles_partial_edge_blocks() {
        // 17 is not a multiple of the 16-wide block: the grid grows to 2×2
        // and the edge threads idle.
        let a: Matrix<f64> = Matrix::seeded_random(17, 17, 3).unwrap();
        let b: Matrix<f64> = Matrix::seeded_random(17, 17, 4).unwrap();
        let mut ops = OpCounter::new();
        let expect = matmul_sequential(&a, &b, &mut ops).unwrap();
        let (c, kops) = matmul_global(&a, &b, (16, 16), &modern()).unwrap();
        assert_eq!(bits(&c), bits(&expect));
        assert_eq!(kops.multiplies, 17 * 17 * 17);
        assert_eq!(kops, ops);
    }

    #[test]
    fn global_rectangular_matches_sequential() {
        let a: Matrix<f32> = Matrix::seeded_random(5, 9, 31).unwrap();
        let b: Matrix<f32> = Matrix::seeded_random(9, 13, 32).unwrap();
        let mut ops = OpCounter::new();
        let expect = matmul_sequential(&a, &b, &mut ops).unwrap();
        let (c, _) = matmul_global(&a, &b, (4, 4), &modern()).unwrap();
        assert_eq!(bits(&c), bits(&expect));
    }

    #[test]
    fn global_rejects_inner_mismatch() {
        let a: Matrix<f64> = Matrix::seeded_random(4, 5, 1).unwrap();
        let b: Matrix<f64> = Matrix::seeded_random(4, 5, 2).unwrap();
        assert!(matches!(
            matmul_global(&a, &b, (4, 4), &modern()),
            Err(KernelError::InnerDimension(4, 5, 4, 5))
        ));
    }

    #[test]
    fn tiled_identity_copies_b_bitwise() {
        // With A = I the tiled product must reproduce B exactly: every
        // staged A-tile is an identity slice, so the accumulation collapses
        // to a copy of B's element.
        let i: Matrix<f64> = Matrix::identity(32).unwrap();
        let b: Matrix<f64> = Matrix::seeded_random(32, 32, 40).unwrap();
        let (c, _) = matmul_tiled(&i, &b, 8, &modern()).unwrap();
        assert_eq!(bits(&c), bits(&b));
    }

    #[test]
    fn tiled_matches_sequential_bitwise_all_kinds() {
        // The accumulation order (ascending inner index) is part of the
        // kernel contract, so equality is bitwise even in floating point.
        let n = 24;
        {
            let a: Matrix<f32> = Matrix::seeded_random(n, n, 50).unwrap();
            let b: Matrix<f32> = Matrix::seeded_random(n, n, 51).unwrap();
            let expect = matmul_sequential(&a, &b, &mut OpCounter::new()).unwrap();
            let (c, _) = matmul_tiled(&a, &b, 8, &modern()).unwrap();
            assert_eq!(bits(&c), bits(&expect));
        }
        {
            let a: Matrix<f64> = Matrix::seeded_random(n, n, 52).unwrap();
            let b: Matrix<f64> = Matrix::seeded_random(n, n, 53).unwrap();
            let expect = matmul_sequential(&a, &b, &mut OpCounter::new()).unwrap();
            let (c, _) = matmul_tiled(&a, &b, 8, &modern()).unwrap();
            assert_eq!(bits(&c), bits(&expect));
        }
        {
            let a: Matrix<Complex32> = Matrix::seeded_random(n, n, 54).unwrap();
            let b: Matrix<Complex32> = Matrix::seeded_random(n, n, 55).unwrap();
            let expect = matmul_sequential(&a, &b, &mut OpCounter::new()).unwrap();
            let (c, _) = matmul_tiled(&a, &b, 8, &modern()).unwrap();
            assert_eq!(bits(&c), bits(&expect));
        }
    }

    #[test]
    fn tiled_equals_global_equals_expected_op_count() {
        let n = 32;
        let a: Matrix<f64> = Matrix::seeded_random(n, n, 60).unwrap();
        let b: Matrix<f64> = Matrix::seeded_random(n, n, 61).unwrap();
        let (c_tiled, ops_tiled) = matmul_tiled(&a, &b, 16, &modern()).unwrap();
        let (c_global, ops_global) = matmul_global(&a, &b, (16, 16), &modern()).unwrap();
        assert_eq!(bits(&c_tiled), bits(&c_global));
        // Same logical work regardless of staging: n³ = 32768 of each.
        assert_eq!(ops_tiled, ops_global);
        assert_eq!(ops_tiled.multiplies, (n * n * n) as u64);
        assert_eq!(ops_tiled.additions, (n * n * n) as u64);
    }

    #[test]
    fn tiled_rejects_indivisible_side() {
        let a: Matrix<f64> = Matrix::seeded_random(20, 20, 1).unwrap();
        let err = matmul_tiled(&a, &a, 16, &modern()).unwrap_err();
        match err {
            KernelError::NotTileable { n: 20, side: 16 } => {
                let msg = err.to_string();
                assert!(msg.contains("20 % 16 != 0"), "message was: {msg}");
            }
            other => panic!("expected NotTileable, got: {other:?}"),
        }
    }

    #[test]
    fn tiled_legacy_profile_bounds_block_side() {
        // 24×24 = 576 threads exceeds legacy's 512 cap; the launch layer
        // refuses rather than the kernel mis-running.
        let a: Matrix<f32> = Matrix::seeded_random(48, 48, 9).unwrap();
        let err = matmul_tiled(&a, &a, 24, &DeviceProfile::legacy()).unwrap_err();
        assert!(matches!(err, KernelError::Launch(LaunchError::InvalidConfig(_))));
        assert!(err.to_string().contains("576 threads > 512"));
    }

    #[test]
    fn elementwise_ragged_shape() {
        // 100×37 forces partial blocks on both axes under (16, 16).
        let a: Matrix<f64> = Matrix::seeded_random(100, 37, 70).unwrap();
        let b: Matrix<f64> = Matrix::seeded_random(100, 37, 71).unwrap();
        let (sum, ops) = elementwise_kernel(&a, &b, ElemOp::Add, (16, 16), &modern()).unwrap();
        let mut expect_ops = OpCounter::new();
        let expect = crate::reference::elementwise(&a, &b, ElemOp::Add, &mut expect_ops).unwrap();
        assert_eq!(bits(&sum), bits(&expect));
        assert_eq!(ops.additions, 3700);
        assert_eq!(ops, expect_ops);
    }

    #[test]
    fn elementwise_sub_then_add_round_trips() {
        let a: Matrix<f32> = Matrix::seeded_random(33, 18, 72).unwrap();
        let b: Matrix<f32> = Matrix::seeded_random(33, 18, 73).unwrap();
        let (diff, _) = elementwise_kernel(&a, &b, ElemOp::Sub, (8, 8), &modern()).unwrap();
        let (back, _) = elementwise_kernel(&diff, &b, ElemOp::Add, (8, 8), &modern()).unwrap();
        // a - b + b is not an identity in floating point in general, but
        // every element stays within one rounding step of the original.
        let metric = back.compare(&a).unwrap();
        assert!(metric.rel_frobenius < 1e-6, "{}", metric.rel_frobenius);
    }

    #[test]
    fn elementwise_rejects_shape_mismatch() {
        let a: Matrix<f64> = Matrix::seeded_random(3, 4, 1).unwrap();
        let b: Matrix<f64> = Matrix::seeded_random(4, 3, 1).unwrap();
        assert!(matches!(
            elementwise_kernel(&a, &b, ElemOp::Add, (4, 4), &modern()),
            Err(KernelError::ShapeMismatch(3, 4, 4, 3))
        ));
    }

    // The two barriers in the tiled body are load-bearing: this phase-stamp
    // variant shows that without the *first* barrier a thread could read
    // tile slots its siblings have not staged yet. Rather than removing the
    // barrier (which would make the test hang-prone), the kernel records
    // which staging phase each slot it reads was written in; the assertion
    // is that with barriers in place every read observes the current phase.
    struct PhaseProbe {
        stale_reads: std::sync::atomic::AtomicUsize,
    }

    fn phase_stamp_body<'a>(ctx: ThreadCtx<'a>, probe: &'a PhaseProbe) -> KernelBody<'a> {
        Box::pin(async move {
            use std::sync::atomic::Ordering;
            let side = ctx.block_dim.0;
            let tile = ctx.shared_view::<u64>(0, side * side);
            let tid = ctx.thread.1 * side + ctx.thread.0;
            for phase in 1..=4u64 {
                tile.set(tid, phase);
                ctx.barrier().await;
                for i in 0..side * side {
                    if tile.get(i) != phase {
                        probe.stale_reads.fetch_add(1, Ordering::Relaxed);
                    }
                }
                ctx.barrier().await;
            }
        })
    }

    #[test]
    fn barrier_isolates_staging_phases() {
        let probe = PhaseProbe {
            stale_reads: std::sync::atomic::AtomicUsize::new(0),
        };
        let config = LaunchConfig {
            grid_dim: (2, 2),
            block_dim: (8, 8),
            shared_bytes: 64 * 8,
            profile: modern(),
        };
        launch(&config, phase_stamp_body, &probe).unwrap();
        assert_eq!(probe.stale_reads.into_inner(), 0);
    }
}
