//! `gridmul verify`: run every requested kernel against the sequential
//! reference and report error metrics plus output checksums.
//!
//! Two input families per (kind, size): integer-valued matrices, where the
//! kernels must match the reference bit for bit, and uniform random ones,
//! where they must sit within the scalar kind's relative-Frobenius
//! tolerance. Checksums are printed so separate runs (different worker
//! counts, different machines) can be compared from captured output alone.

use std::path::{Path, PathBuf};

use gridmul_core::Complex32;

use gridmul_core::bench::{checksum, ImplId};
use gridmul_core::engine::{DeviceProfile, LaunchConfig};
use gridmul_core::fixture::{read_stmx, write_stmx, AnyMatrix, FixtureError};
use gridmul_core::kernels::{matmul_global, matmul_single_block, matmul_tiled, rel_tol, KernelError};
use gridmul_core::reference::matmul_sequential;
use gridmul_core::{Matrix, OpCounter, Scalar, ScalarKind};

use crate::{CliError, VerifyArgs};

const DEFAULT_IMPLS: [ImplId; 3] = [ImplId::SingleBlock, ImplId::Global, ImplId::Tiled];
const INPUT_MAX_ABS: u32 = 4;

#[derive(Default)]
struct Tally {
    passed: usize,
    failed: usize,
    skipped: usize,
}

/// How strictly a result must match the reference.
#[derive(Clone, Copy, PartialEq)]
enum MatchRule {
    Bitwise,
    Tolerance,
}

pub fn run(args: VerifyArgs) -> Result<(), CliError> {
    let kinds: Vec<ScalarKind> = if args.kinds.is_empty() {
        ScalarKind::ALL.to_vec()
    } else {
        args.kinds.clone()
    };
    let explicit = !args.impls.is_empty();
    let impls: Vec<ImplId> = if explicit {
        args.impls.clone()
    } else {
        DEFAULT_IMPLS.to_vec()
    };
    for impl_id in &impls {
        if !DEFAULT_IMPLS.contains(impl_id) {
            return Err(CliError::Infeasible(format!(
                "verify checks the kernel implementations (single_block, global, tiled); \
                 '{impl_id}' has no kernel to compare"
            )));
        }
    }
    if let Some(dir) = &args.dump_fixtures {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    }

    let mut tally = Tally::default();
    if let (Some(path_a), Some(path_b)) = (&args.fixture_a, &args.fixture_b) {
        verify_fixture_pair(path_a, path_b, &impls, explicit, args.block, &mut tally)?;
    } else {
        for &kind in &kinds {
            for &n in &args.sizes {
                match kind {
                    ScalarKind::Float32 => {
                        verify_size::<f32>(n, &args, &impls, explicit, &mut tally)?
                    }
                    ScalarKind::Float64 => {
                        verify_size::<f64>(n, &args, &impls, explicit, &mut tally)?
                    }
                    ScalarKind::Complex64 => {
                        verify_size::<Complex32>(n, &args, &impls, explicit, &mut tally)?
                    }
                }
            }
        }
    }

    println!(
        "verify: {} passed, {} failed, {} skipped",
        tally.passed, tally.failed, tally.skipped
    );
    if tally.failed > 0 {
        Err(CliError::Verification(format!(
            "{} of {} checks failed",
            tally.failed,
            tally.passed + tally.failed
        )))
    } else {
        Ok(())
    }
}

fn verify_size<T: Scalar>(
    n: usize,
    args: &VerifyArgs,
    impls: &[ImplId],
    explicit: bool,
    tally: &mut Tally,
) -> Result<(), CliError> {
    for ints in [true, false] {
        let (a, b) = if ints {
            (
                Matrix::<T>::seeded_ints(n, n, args.seed, INPUT_MAX_ABS).expect("n >= 1"),
                Matrix::<T>::seeded_ints(n, n, args.seed + 1, INPUT_MAX_ABS).expect("n >= 1"),
            )
        } else {
            (
                Matrix::<T>::seeded_random(n, n, args.seed).expect("n >= 1"),
                Matrix::<T>::seeded_random(n, n, args.seed + 1).expect("n >= 1"),
            )
        };
        if let Some(dir) = &args.dump_fixtures {
            dump_pair(dir, &a, &b, n, ints)?;
        }
        let label = format!(
            "{:<3} n={:<4} {}",
            T::KIND.name(),
            n,
            if ints { "ints" } else { "rand" }
        );
        // Integer-valued inputs leave no rounding anywhere, so the kernels
        // must agree with the reference exactly; random inputs get the
        // tolerance the scalar kind earns.
        let rule = if ints {
            MatchRule::Bitwise
        } else {
            MatchRule::Tolerance
        };
        let seq = matmul_sequential(&a, &b, &mut OpCounter::new()).expect("square inputs");
        for &impl_id in impls {
            check_impl(&label, impl_id, &a, &b, &seq, args.block, rule, explicit, tally)?;
        }
    }
    Ok(())
}

fn dump_pair<T: Scalar>(
    dir: &Path,
    a: &Matrix<T>,
    b: &Matrix<T>,
    n: usize,
    ints: bool,
) -> Result<(), CliError> {
    let family = if ints { "ints" } else { "rand" };
    for (name, m) in [("a", a), ("b", b)] {
        let path = dir.join(format!("{name}_{family}_{}_{n}.stmx", T::KIND.name()));
        write_stmx(m, &path)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

/// Run one kernel and score it against the reference product.
#[allow(clippy::too_many_arguments)]
fn check_impl<T: Scalar>(
    label: &str,
    impl_id: ImplId,
    a: &Matrix<T>,
    b: &Matrix<T>,
    seq: &Matrix<T>,
    block: usize,
    rule: MatchRule,
    explicit: bool,
    tally: &mut Tally,
) -> Result<(), CliError> {
    let profile = DeviceProfile::modern();
    let n = seq.rows();

    if let Some(reason) = infeasibility(impl_id, n, block, &profile) {
        if explicit {
            return Err(CliError::Infeasible(format!("{impl_id} at n={n}: {reason}")));
        }
        println!("{label}  {:<13} skipped: {reason}", impl_id.name());
        tally.skipped += 1;
        return Ok(());
    }

    let result = match impl_id {
        ImplId::SingleBlock => {
            let config = LaunchConfig {
                grid_dim: (1, 1),
                block_dim: (n, n),
                shared_bytes: 0,
                profile,
            };
            matmul_single_block(a, b, &config)
        }
        ImplId::Global => matmul_global(a, b, (block, block), &profile),
        ImplId::Tiled => matmul_tiled(a, b, block, &profile),
        other => unreachable!("verify never runs {other}"),
    };
    let (c, _) = result.map_err(|e: KernelError| CliError::Infeasible(e.to_string()))?;

    let metric = c.compare(seq).expect("same shape by construction");
    let ok = match rule {
        MatchRule::Bitwise => c.le_bytes() == seq.le_bytes(),
        MatchRule::Tolerance => metric.rel_frobenius <= rel_tol(T::KIND),
    };
    println!(
        "{label}  {:<13} rel_fro {:9.2e}  max_abs {:9.2e}  checksum {:016x}  {}",
        impl_id.name(),
        metric.rel_frobenius,
        metric.max_abs,
        checksum(&c),
        if ok { "PASS" } else { "FAIL" }
    );
    if ok {
        tally.passed += 1;
    } else {
        tally.failed += 1;
    }
    Ok(())
}

fn infeasibility(
    impl_id: ImplId,
    n: usize,
    block: usize,
    profile: &DeviceProfile,
) -> Option<String> {
    match impl_id {
        ImplId::SingleBlock => {
            let cap = profile.max_threads_per_block;
            if n * n > cap {
                Some(format!("block cap {cap}: a {n}x{n} output needs {} threads", n * n))
            } else {
                None
            }
        }
        ImplId::Tiled => {
            if block == 0 || n % block != 0 {
                Some(format!(
                    "tiled kernel needs the matrix side divisible by the block side: \
                     {n} % {block} != 0"
                ))
            } else {
                None
            }
        }
        _ => None,
    }
}

fn load_fixture(path: &PathBuf) -> Result<AnyMatrix, CliError> {
    read_stmx(path).map_err(|e| match e {
        FixtureError::Io(io) => CliError::Io(format!("{}: {io}", path.display())),
        other => CliError::Infeasible(format!("{}: {other}", path.display())),
    })
}

fn verify_fixture_pair(
    path_a: &PathBuf,
    path_b: &PathBuf,
    impls: &[ImplId],
    explicit: bool,
    block: usize,
    tally: &mut Tally,
) -> Result<(), CliError> {
    let a = load_fixture(path_a)?;
    let b = load_fixture(path_b)?;
    match (a, b) {
        (AnyMatrix::F32(a), AnyMatrix::F32(b)) => {
            fixture_chain(&a, &b, impls, explicit, block, tally)
        }
        (AnyMatrix::F64(a), AnyMatrix::F64(b)) => {
            fixture_chain(&a, &b, impls, explicit, block, tally)
        }
        (AnyMatrix::C64(a), AnyMatrix::C64(b)) => {
            fixture_chain(&a, &b, impls, explicit, block, tally)
        }
        (a, b) => Err(CliError::Infeasible(format!(
            "fixture kinds differ: {} holds {}, {} holds {}",
            path_a.display(),
            a.kind(),
            path_b.display(),
            b.kind()
        ))),
    }
}

fn fixture_chain<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    impls: &[ImplId],
    explicit: bool,
    block: usize,
    tally: &mut Tally,
) -> Result<(), CliError> {
    if a.rows() != a.cols() || b.rows() != b.cols() || a.cols() != b.rows() {
        return Err(CliError::Infeasible(format!(
            "fixture shapes unsuitable for the square kernel chain: \
             {}x{} times {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let label = format!("{:<3} n={:<4} file", T::KIND.name(), a.rows());
    let seq = matmul_sequential(a, b, &mut OpCounter::new()).expect("dims checked");
    // Nothing guarantees stored fixtures hold integer values, so the
    // tolerance rule applies.
    for &impl_id in impls {
        check_impl(
            &label,
            impl_id,
            a,
            b,
            &seq,
            block,
            MatchRule::Tolerance,
            explicit,
            tally,
        )?;
    }
    Ok(())
}
