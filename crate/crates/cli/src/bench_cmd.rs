//! `gridmul bench`: build the case lattice, time every case, and report
//! median times plus speedups against a baseline implementation.
//!
//! Progress goes to stderr; stdout carries only the table, skip notes,
//! and nothing time-free consumers would trip over. `--csv` / `--plot`
//! write machine-readable reports.

use gridmul_core::bench::{
    apply_speedups, emit_csv, emit_plot_data, run_case, speedup_table, BenchCase, BenchError,
    BenchReport, Family, ImplId,
};
use gridmul_core::ScalarKind;

use crate::{BenchArgs, CliError};

fn map_bench_err(e: BenchError) -> CliError {
    match e {
        BenchError::Io(io) => CliError::Io(io.to_string()),
        other => CliError::Infeasible(other.to_string()),
    }
}

/// Per-implementation meaning of the side parameter: kernel block side for
/// the blocked kernels, recursion cutoff for Strassen, nothing otherwise.
fn block_side_for(impl_id: ImplId, args: &BenchArgs) -> Option<usize> {
    match impl_id {
        ImplId::Global | ImplId::Tiled | ImplId::ElementwiseKernel => Some(args.block),
        ImplId::Strassen => Some(args.cutoff),
        ImplId::Seq | ImplId::SingleBlock | ImplId::ElementwiseSeq => None,
    }
}

pub fn run(args: BenchArgs) -> Result<(), CliError> {
    let kinds: Vec<ScalarKind> = if args.kinds.is_empty() {
        ScalarKind::ALL.to_vec()
    } else {
        args.kinds.clone()
    };
    let impls: Vec<ImplId> = if args.impls.is_empty() {
        ImplId::ALL.to_vec()
    } else {
        args.impls.clone()
    };

    let mut cases: Vec<BenchCase> = Vec::new();
    for &kind in &kinds {
        for &impl_id in &impls {
            match impl_id.family() {
                Family::Matmul => {
                    for &n in &args.sizes {
                        cases.push(BenchCase::matmul(
                            impl_id,
                            kind,
                            n,
                            block_side_for(impl_id, &args),
                            args.reps,
                            args.seed,
                        ));
                    }
                }
                Family::Elementwise => {
                    for &n in &args.elem_sizes {
                        cases.push(BenchCase::elementwise(
                            impl_id,
                            kind,
                            n,
                            block_side_for(impl_id, &args),
                            args.reps,
                            args.seed,
                        ));
                    }
                }
            }
        }
    }

    let total = cases.len();
    let mut report = BenchReport::default();
    for (i, case) in cases.iter().enumerate() {
        let (rows, inner, cols) = case.size;
        eprintln!(
            "[{}/{}] {} {} {}x{}x{} reps={}",
            i + 1,
            total,
            case.impl_id,
            case.kind.name(),
            rows,
            inner,
            cols,
            case.reps
        );
        report.push(run_case(case).map_err(map_bench_err)?);
    }

    apply_speedups(&mut report, args.baseline).map_err(map_bench_err)?;

    print!("{}", speedup_table(&report));
    for skip in &report.skipped {
        let (rows, inner, cols) = skip.case.size;
        println!(
            "skipped {} {} {}x{}x{}: {}",
            skip.case.impl_id,
            skip.case.kind.name(),
            rows,
            inner,
            cols,
            skip.reason
        );
    }

    if let Some(path) = &args.csv {
        emit_csv(&report, path)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    if let Some(path) = &args.plot {
        emit_plot_data(&report, path)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}
