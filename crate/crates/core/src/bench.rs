//! Benchmark harness: timed, instrumented runs of every implementation.
//!
//! A report row carries median/min wall time, the logical operation tally
//! and an FNV-1a checksum of the output bytes, so cross-implementation
//! equality can be audited from the report alone. Inputs are seeded,
//! integer-valued matrices: every product and bounded sum of them is exact
//! in floating point at these scales, which makes checksums comparable
//! across algorithms as different as the tiled kernel and Strassen
//! recursion (float64 throughout; float32 Strassen can outgrow the exact
//! integer range at the largest sizes, where its checksum is still
//! deterministic, just its own).
//!
//! Speedups are relative to a named baseline implementation, matched per
//! (kind, size) group; the baseline row itself reports exactly 1.

use std::fmt;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex32;
use thiserror::Error;

use crate::counter::OpCounter;
use crate::engine::DeviceProfile;
use crate::kernels::{
    elementwise_kernel, matmul_global, matmul_single_block, matmul_tiled, KernelError,
};
use crate::matrix::Matrix;
use crate::reference::{
    elementwise, matmul_sequential, matmul_strassen, AlgoError, ElemOp, StrassenConfig,
};
use crate::scalar::{Scalar, ScalarKind};

/// Default repetitions per case.
pub const DEFAULT_REPS: usize = 3;
/// Default input seed; the B operand uses `seed + 1`.
pub const DEFAULT_SEED: u64 = 42;
/// Default kernel block side.
pub const DEFAULT_BLOCK_SIDE: usize = 16;
/// Default Strassen recursion cutoff.
pub const DEFAULT_STRASSEN_CUTOFF: usize = 64;
/// Magnitude bound for the integer-valued inputs.
pub const INPUT_MAX_ABS: u32 = 4;
/// Default square matmul sizes.
pub const DEFAULT_MATMUL_SIZES: [usize; 3] = [256, 512, 1024];
/// Default elementwise size (square side).
pub const DEFAULT_ELEMENTWISE_SIZE: usize = 4096;

/// 64-bit FNV-1a over a byte slice.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Checksum of a matrix: FNV-1a over its row-major little-endian bytes.
pub fn checksum<T: Scalar>(m: &Matrix<T>) -> u64 {
    fnv1a(&m.le_bytes())
}

/// Implementation family: speedups only compare like with like.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Matmul,
    Elementwise,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ImplId {
    Seq,
    SingleBlock,
    Global,
    Tiled,
    Strassen,
    ElementwiseSeq,
    ElementwiseKernel,
}

impl ImplId {
    pub const ALL: [ImplId; 7] = [
        ImplId::Seq,
        ImplId::SingleBlock,
        ImplId::Global,
        ImplId::Tiled,
        ImplId::Strassen,
        ImplId::ElementwiseSeq,
        ImplId::ElementwiseKernel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ImplId::Seq => "seq",
            ImplId::SingleBlock => "single_block",
            ImplId::Global => "global",
            ImplId::Tiled => "tiled",
            ImplId::Strassen => "strassen",
            ImplId::ElementwiseSeq => "elementwise_seq",
            ImplId::ElementwiseKernel => "elementwise_kernel",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|i| i.name() == s)
    }

    pub fn family(self) -> Family {
        match self {
            ImplId::ElementwiseSeq | ImplId::ElementwiseKernel => Family::Elementwise,
            _ => Family::Matmul,
        }
    }

    /// Fallback baseline when the requested one belongs to the other family.
    pub fn family_default_baseline(family: Family) -> ImplId {
        match family {
            Family::Matmul => ImplId::Seq,
            Family::Elementwise => ImplId::ElementwiseSeq,
        }
    }
}

impl fmt::Display for ImplId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One benchmark configuration. `size` is `(rows, inner, cols)`; the
/// elementwise family operates on `rows × cols` matrices and keeps
/// `inner = 1`. `block_side` is the kernel block side — reused as the
/// recursion cutoff for Strassen cases — and `None` for plain sequential
/// implementations.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchCase {
    pub impl_id: ImplId,
    pub kind: ScalarKind,
    pub size: (usize, usize, usize),
    pub block_side: Option<usize>,
    pub reps: usize,
    pub seed: u64,
}

impl BenchCase {
    pub fn matmul(
        impl_id: ImplId,
        kind: ScalarKind,
        n: usize,
        block_side: Option<usize>,
        reps: usize,
        seed: u64,
    ) -> Self {
        BenchCase {
            impl_id,
            kind,
            size: (n, n, n),
            block_side,
            reps,
            seed,
        }
    }

    pub fn elementwise(
        impl_id: ImplId,
        kind: ScalarKind,
        n: usize,
        block_side: Option<usize>,
        reps: usize,
        seed: u64,
    ) -> Self {
        BenchCase {
            impl_id,
            kind,
            size: (n, 1, n),
            block_side,
            reps,
            seed,
        }
    }
}

/// A completed measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub case: BenchCase,
    pub median_s: f64,
    pub min_s: f64,
    pub ops: OpCounter,
    pub checksum: u64,
    pub speedup: Option<f64>,
}

/// A case the harness refused to run, with the rule it would break.
#[derive(Clone, Debug, PartialEq)]
pub struct SkippedCase {
    pub case: BenchCase,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub enum CaseOutcome {
    Row(BenchRow),
    Skipped(SkippedCase),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub skipped: Vec<SkippedCase>,
}

impl BenchReport {
    pub fn push(&mut self, outcome: CaseOutcome) {
        match outcome {
            CaseOutcome::Row(row) => self.rows.push(row),
            CaseOutcome::Skipped(skip) => self.skipped.push(skip),
        }
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid case: {0}")]
    InvalidCase(String),
    #[error("no '{0}' baseline rows in the report to compute speedups against")]
    MissingBaseline(ImplId),
    #[error("csv line {line}: {reason}")]
    CsvParse { line: usize, reason: String },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Algo(#[from] AlgoError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn median_of(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Check feasibility without touching inputs, so skips cost nothing.
fn feasibility(case: &BenchCase) -> Option<String> {
    let (rows, inner, cols) = case.size;
    let square = rows == inner && inner == cols;
    match case.impl_id {
        ImplId::SingleBlock => {
            let cap = DeviceProfile::modern().max_threads_per_block;
            if !square {
                return Some(format!(
                    "single-block kernel needs square matrices, got {rows}x{cols}"
                ));
            }
            if rows * cols > cap {
                return Some(format!(
                    "block cap {cap}: a {rows}x{cols} output needs {} threads in one block",
                    rows * cols
                ));
            }
            None
        }
        ImplId::Tiled => {
            let side = case.block_side.unwrap_or(DEFAULT_BLOCK_SIDE);
            if !square {
                return Some(format!(
                    "tiled kernel needs square matrices, got {rows}x{inner}x{cols}"
                ));
            }
            if side == 0 || rows % side != 0 {
                return Some(format!(
                    "matrix side not divisible by block side: {rows} % {side} != 0"
                ));
            }
            None
        }
        ImplId::Strassen => {
            if case.kind == ScalarKind::Complex64 {
                return Some("strassen variant supports f32 and f64 only".to_string());
            }
            if !square || !rows.is_power_of_two() {
                return Some(format!(
                    "strassen needs power-of-two square matrices, got {rows}x{inner}x{cols}"
                ));
            }
            None
        }
        _ => None,
    }
}

/// Run one case: `reps` timed executions on seeded integer-valued inputs.
/// Infeasible cases come back as [`CaseOutcome::Skipped`] with the violated
/// rule; real failures (which feasibility should have precluded) error.
pub fn run_case(case: &BenchCase) -> Result<CaseOutcome, BenchError> {
    let (rows, inner, cols) = case.size;
    if case.reps < 1 {
        return Err(BenchError::InvalidCase(format!(
            "repetitions must be at least 1, got {}",
            case.reps
        )));
    }
    if rows < 1 || inner < 1 || cols < 1 {
        return Err(BenchError::InvalidCase(format!(
            "size fields must be at least 1, got {rows}x{inner}x{cols}"
        )));
    }
    if let Some(reason) = feasibility(case) {
        return Ok(CaseOutcome::Skipped(SkippedCase {
            case: case.clone(),
            reason,
        }));
    }
    match case.kind {
        ScalarKind::Float32 => run_case_typed::<f32>(case),
        ScalarKind::Float64 => run_case_typed::<f64>(case),
        ScalarKind::Complex64 => run_case_typed::<Complex32>(case),
    }
}

fn run_case_typed<T: Scalar>(case: &BenchCase) -> Result<CaseOutcome, BenchError> {
    let (rows, inner, cols) = case.size;
    let side = case.block_side.unwrap_or(DEFAULT_BLOCK_SIDE);
    let profile = DeviceProfile::modern();

    let (a, b) = match case.impl_id.family() {
        Family::Matmul => (
            Matrix::<T>::seeded_ints(rows, inner, case.seed, INPUT_MAX_ABS)
                .map_err(AlgoError::from)?,
            Matrix::<T>::seeded_ints(inner, cols, case.seed + 1, INPUT_MAX_ABS)
                .map_err(AlgoError::from)?,
        ),
        Family::Elementwise => (
            Matrix::<T>::seeded_ints(rows, cols, case.seed, INPUT_MAX_ABS)
                .map_err(AlgoError::from)?,
            Matrix::<T>::seeded_ints(rows, cols, case.seed + 1, INPUT_MAX_ABS)
                .map_err(AlgoError::from)?,
        ),
    };

    let mut times = Vec::with_capacity(case.reps);
    let mut ops = OpCounter::new();
    let mut sum = 0u64;
    for rep in 0..case.reps {
        let start = Instant::now();
        let (out_sum, out_ops) = match case.impl_id {
            ImplId::Seq => {
                let mut counter = OpCounter::new();
                let c = matmul_sequential(&a, &b, &mut counter)?;
                (checksum(&c), counter)
            }
            ImplId::SingleBlock => {
                let config = crate::engine::LaunchConfig {
                    grid_dim: (1, 1),
                    block_dim: (cols, rows),
                    shared_bytes: 0,
                    profile: profile.clone(),
                };
                let (c, counter) = matmul_single_block(&a, &b, &config)?;
                (checksum(&c), counter)
            }
            ImplId::Global => {
                let (c, counter) = matmul_global(&a, &b, (side, side), &profile)?;
                (checksum(&c), counter)
            }
            ImplId::Tiled => {
                let (c, counter) = matmul_tiled(&a, &b, side, &profile)?;
                (checksum(&c), counter)
            }
            ImplId::Strassen => {
                let config = StrassenConfig {
                    cutoff: case.block_side.unwrap_or(DEFAULT_STRASSEN_CUTOFF),
                };
                let mut counter = OpCounter::new();
                let c = matmul_strassen(&a, &b, &config, &mut counter)?;
                (checksum(&c), counter)
            }
            ImplId::ElementwiseSeq => {
                let mut counter = OpCounter::new();
                let c = elementwise(&a, &b, ElemOp::Add, &mut counter)?;
                (checksum(&c), counter)
            }
            ImplId::ElementwiseKernel => {
                let (c, counter) =
                    elementwise_kernel(&a, &b, ElemOp::Add, (side, side), &profile)?;
                (checksum(&c), counter)
            }
        };
        times.push(start.elapsed().as_secs_f64());
        if rep == 0 {
            sum = out_sum;
            ops = out_ops;
        } else if out_sum != sum {
            // Deterministic implementations cannot disagree with themselves;
            // reaching this is a harness bug, not a measurement.
            return Err(BenchError::InvalidCase(format!(
                "{} produced different outputs across repetitions",
                case.impl_id
            )));
        }
    }
    times.sort_by(|x, y| x.partial_cmp(y).expect("wall times are never NaN"));

    Ok(CaseOutcome::Row(BenchRow {
        case: case.clone(),
        median_s: median_of(&times),
        min_s: times[0],
        ops,
        checksum: sum,
        speedup: None,
    }))
}

/// Annotate every row with `baseline_median / row_median`, matching rows
/// per (kind, size) group within the implementation family. The baseline
/// row itself gets exactly 1. The elementwise family always measures
/// against its own sequential form when the requested baseline is a
/// matmul implementation (and vice versa).
pub fn apply_speedups(report: &mut BenchReport, baseline: ImplId) -> Result<(), BenchError> {
    for family in [Family::Matmul, Family::Elementwise] {
        let family_baseline = if baseline.family() == family {
            baseline
        } else {
            ImplId::family_default_baseline(family)
        };
        let family_rows = report.rows.iter().filter(|r| r.case.impl_id.family() == family);
        if family_rows.clone().count() == 0 {
            continue;
        }
        let baselines: Vec<(ScalarKind, (usize, usize, usize), f64)> = family_rows
            .clone()
            .filter(|r| r.case.impl_id == family_baseline)
            .map(|r| (r.case.kind, r.case.size, r.median_s))
            .collect();
        if baselines.is_empty() {
            return Err(BenchError::MissingBaseline(family_baseline));
        }
        for row in report
            .rows
            .iter_mut()
            .filter(|r| r.case.impl_id.family() == family)
        {
            if row.case.impl_id == family_baseline {
                row.speedup = Some(1.0);
                continue;
            }
            row.speedup = baselines
                .iter()
                .find(|(kind, size, _)| *kind == row.case.kind && *size == row.case.size)
                .map(|(_, _, base_median)| base_median / row.median_s);
        }
    }
    Ok(())
}

/// Format the report as an implementation × scalar-kind grid per size,
/// with a time column and a speedup column for each kind.
pub fn speedup_table(report: &BenchReport) -> String {
    let mut kinds: Vec<ScalarKind> = Vec::new();
    for kind in ScalarKind::ALL {
        if report.rows.iter().any(|r| r.case.kind == kind) {
            kinds.push(kind);
        }
    }
    let mut sizes: Vec<(usize, usize, usize)> =
        report.rows.iter().map(|r| r.case.size).collect();
    sizes.sort();
    sizes.dedup();

    let mut out = String::new();
    for size in sizes {
        let (rows, inner, cols) = size;
        out.push_str(&format!("size {rows}x{inner}x{cols}\n"));
        out.push_str(&format!("{:<20}", "impl"));
        for kind in &kinds {
            out.push_str(&format!(
                "{:>14}{:>12}",
                format!("{} time[s]", kind.name()),
                "speedup"
            ));
        }
        out.push('\n');
        for impl_id in ImplId::ALL {
            let cells: Vec<Option<&BenchRow>> = kinds
                .iter()
                .map(|&kind| {
                    report.rows.iter().find(|r| {
                        r.case.impl_id == impl_id && r.case.kind == kind && r.case.size == size
                    })
                })
                .collect();
            if cells.iter().all(|c| c.is_none()) {
                continue;
            }
            out.push_str(&format!("{:<20}", impl_id.name()));
            for cell in cells {
                match cell {
                    Some(row) => {
                        out.push_str(&format!("{:>14.4}", row.median_s));
                        match row.speedup {
                            Some(s) => out.push_str(&format!("{:>12.2}", s)),
                            None => out.push_str(&format!("{:>12}", "-")),
                        }
                    }
                    None => out.push_str(&format!("{:>14}{:>12}", "-", "-")),
                }
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

/// The mandatory CSV column set, in order.
pub const CSV_HEADER: &str =
    "impl,kind,rows,inner,cols,block,reps,median_s,min_s,mults,adds,checksum,speedup";

fn csv_row(row: &BenchRow) -> String {
    let (rows, inner, cols) = row.case.size;
    let block = row
        .case
        .block_side
        .map(|b| b.to_string())
        .unwrap_or_default();
    let speedup = row.speedup.map(|s| s.to_string()).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{:016x},{}",
        row.case.impl_id,
        row.case.kind.name(),
        rows,
        inner,
        cols,
        block,
        row.case.reps,
        row.median_s,
        row.min_s,
        row.ops.multiplies,
        row.ops.additions,
        row.checksum,
        speedup
    )
}

/// Render the report rows as CSV: header plus one line per completed case.
/// Floats use `.` decimals and round-trip exactly through [`parse_csv`].
pub fn csv_string(report: &BenchReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &report.rows {
        out.push_str(&csv_row(row));
        out.push('\n');
    }
    out
}

pub fn emit_csv(report: &BenchReport, path: &Path) -> Result<(), BenchError> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(csv_string(report).as_bytes())?;
    Ok(())
}

/// Parse a CSV produced by [`csv_string`] back into report rows.
pub fn parse_csv(text: &str) -> Result<BenchReport, BenchError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        Some((_, header)) => {
            return Err(BenchError::CsvParse {
                line: 1,
                reason: format!("unexpected header '{header}'"),
            })
        }
        None => {
            return Err(BenchError::CsvParse {
                line: 1,
                reason: "empty input".to_string(),
            })
        }
    }

    let mut report = BenchReport::default();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let err = |reason: String| BenchError::CsvParse {
            line: lineno,
            reason,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 13 {
            return Err(err(format!("expected 13 fields, got {}", fields.len())));
        }
        let impl_id = ImplId::parse(fields[0])
            .ok_or_else(|| err(format!("unknown implementation '{}'", fields[0])))?;
        let kind = ScalarKind::parse(fields[1])
            .ok_or_else(|| err(format!("unknown scalar kind '{}'", fields[1])))?;
        let parse_num = |name: &str, raw: &str| -> Result<usize, BenchError> {
            raw.parse()
                .map_err(|_| err(format!("bad {name} '{raw}'")))
        };
        let rows = parse_num("rows", fields[2])?;
        let inner = parse_num("inner", fields[3])?;
        let cols = parse_num("cols", fields[4])?;
        let block_side = if fields[5].is_empty() {
            None
        } else {
            Some(parse_num("block", fields[5])?)
        };
        let reps = parse_num("reps", fields[6])?;
        let parse_f = |name: &str, raw: &str| -> Result<f64, BenchError> {
            raw.parse()
                .map_err(|_| err(format!("bad {name} '{raw}'")))
        };
        let median_s = parse_f("median_s", fields[7])?;
        let min_s = parse_f("min_s", fields[8])?;
        let mults = fields[9]
            .parse()
            .map_err(|_| err(format!("bad mults '{}'", fields[9])))?;
        let adds = fields[10]
            .parse()
            .map_err(|_| err(format!("bad adds '{}'", fields[10])))?;
        let checksum = u64::from_str_radix(fields[11], 16)
            .map_err(|_| err(format!("bad checksum '{}'", fields[11])))?;
        let speedup = if fields[12].is_empty() {
            None
        } else {
            Some(parse_f("speedup", fields[12])?)
        };
        report.rows.push(BenchRow {
            case: BenchCase {
                impl_id,
                kind,
                size: (rows, inner, cols),
                block_side,
                reps,
                seed: 0, // seeds are not part of the CSV contract
            },
            median_s,
            min_s,
            ops: OpCounter {
                multiplies: mults,
                additions: adds,
            },
            checksum,
            speedup,
        });
    }
    Ok(report)
}

/// Plot-friendly CSV: the same rows, prefixed with a `figure` column and
/// grouped per figure (a row may appear under several figures):
/// `time_by_impl` carries every matmul row, `tiled_vs_global` just the two
/// kernel strategies, `op_counts` every row of the report.
pub fn plot_data_string(report: &BenchReport) -> String {
    let mut out = String::from("figure,");
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in report
        .rows
        .iter()
        .filter(|r| r.case.impl_id.family() == Family::Matmul)
    {
        out.push_str(&format!("time_by_impl,{}\n", csv_row(row)));
    }
    for row in report
        .rows
        .iter()
        .filter(|r| matches!(r.case.impl_id, ImplId::Tiled | ImplId::Global))
    {
        out.push_str(&format!("tiled_vs_global,{}\n", csv_row(row)));
    }
    for row in &report.rows {
        out.push_str(&format!("op_counts,{}\n", csv_row(row)));
    }
    out
}

pub fn emit_plot_data(report: &BenchReport, path: &Path) -> Result<(), BenchError> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(plot_data_string(report).as_bytes())?;
    Ok(())
}
