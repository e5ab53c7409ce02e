//! End-to-end acceptance gate. Each numbered criterion below is a mandated
//! behavior of the finished artifact; the single test runs them all in
//! order, prints one PASS/FAIL line per criterion, and fails if any line
//! is FAIL. Run with `--nocapture` to watch the lines as they appear.

use std::path::Path;
use std::process::Command;
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use gridmul_core::bench::{self, BenchCase, BenchReport, BenchRow, Family, ImplId};
use gridmul_core::engine::{
    launch_with_workers, shared_budget, DeviceProfile, KernelBody, LaunchConfig, LaunchError,
    OutputBuffer, ThreadCtx,
};
use gridmul_core::kernels::{
    elementwise_kernel, matmul_global, matmul_single_block, matmul_tiled, rel_tol,
};
use gridmul_core::reference::{
    elementwise, matmul_sequential, matmul_strassen, ElemOp, StrassenConfig,
};
use gridmul_core::{Complex32, Matrix, OpCounter, Scalar, ScalarKind};

const LATTICE: [usize; 10] = [1, 2, 15, 16, 17, 31, 32, 33, 64, 128];
const BLOCK_SIDE: usize = 16;
const SEED: u64 = 42;

fn err_str<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

type Criterion = fn() -> Result<String, String>;

#[test]
fn acceptance_gate() {
    let criteria: [(&str, Criterion); 8] = [
        ("oracle equivalence suite", oracle_equivalence),
        ("elementwise op-count anchor", opcount_anchor),
        ("shared-budget anchor", budget_anchor),
        ("speedup formula anchor", speedup_anchor),
        ("worker-count determinism", worker_determinism),
        ("barrier semantics", barrier_semantics),
        ("strassen exactness and stability", strassen_exactness_and_stability),
        ("desk-scale benchmark", desk_scale_bench),
    ];
    let mut failures = Vec::new();
    for (i, (label, criterion)) in criteria.iter().enumerate() {
        match criterion() {
            Ok(detail) => println!("criterion {}: PASS - {label}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL - {label}: {why}", i + 1);
                failures.push(format!("criterion {} ({label}): {why}", i + 1));
            }
        }
    }
    assert!(
        failures.is_empty(),
        "acceptance criteria failed:\n{}",
        failures.join("\n")
    );
}

// ---- 1. kernels vs sequential oracle over the full lattice -------------

fn oracle_equivalence() -> Result<String, String> {
    let start = Instant::now();
    let mut checks = 0usize;
    for &n in &LATTICE {
        lattice_point::<f32>(n, &mut checks)?;
        lattice_point::<f64>(n, &mut checks)?;
        lattice_point::<Complex32>(n, &mut checks)?;
    }
    let dt = start.elapsed();
    if dt > Duration::from_secs(60) {
        return Err(format!("took {:.1} s, limit is 60 s", dt.as_secs_f64()));
    }
    Ok(format!(
        "{checks} kernel-vs-oracle comparisons across {} sizes x 3 kinds in {:.2} s",
        LATTICE.len(),
        dt.as_secs_f64()
    ))
}

fn lattice_point<T: Scalar>(n: usize, checks: &mut usize) -> Result<(), String> {
    let profile = DeviceProfile::modern();
    for ints in [true, false] {
        let (a, b) = if ints {
            (
                Matrix::<T>::seeded_ints(n, n, SEED, 4).map_err(err_str)?,
                Matrix::<T>::seeded_ints(n, n, SEED + 1, 4).map_err(err_str)?,
            )
        } else {
            (
                Matrix::<T>::seeded_random(n, n, SEED).map_err(err_str)?,
                Matrix::<T>::seeded_random(n, n, SEED + 1).map_err(err_str)?,
            )
        };
        let seq = matmul_sequential(&a, &b, &mut OpCounter::new()).map_err(err_str)?;
        // Bitwise equality is the mandated bar for integer-valued float64;
        // everything else must sit inside the kind's relative tolerance.
        let bitwise = ints && T::KIND == ScalarKind::Float64;

        let mut candidates: Vec<(&str, Matrix<T>)> = Vec::new();
        if n * n <= profile.max_threads_per_block {
            let config = LaunchConfig {
                grid_dim: (1, 1),
                block_dim: (n, n),
                shared_bytes: 0,
                profile: profile.clone(),
            };
            let (c, _) = matmul_single_block(&a, &b, &config).map_err(err_str)?;
            candidates.push(("single_block", c));
        }
        let (c, _) = matmul_global(&a, &b, (BLOCK_SIDE, BLOCK_SIDE), &profile).map_err(err_str)?;
        candidates.push(("global", c));
        if n % BLOCK_SIDE == 0 {
            let (c, _) = matmul_tiled(&a, &b, BLOCK_SIDE, &profile).map_err(err_str)?;
            candidates.push(("tiled", c));
        }

        for (name, c) in candidates {
            *checks += 1;
            if bitwise && c.le_bytes() != seq.le_bytes() {
                return Err(format!(
                    "{name} differs bitwise from the reference at n={n}, f64 integer inputs"
                ));
            }
            let metric = c.compare(&seq).map_err(err_str)?;
            let tol = rel_tol(T::KIND);
            if metric.rel_frobenius > tol {
                return Err(format!(
                    "{name} at n={n} {}: rel_frobenius {:.3e} over tolerance {tol:.0e}",
                    T::KIND.name(),
                    metric.rel_frobenius
                ));
            }
        }
    }
    Ok(())
}

// ---- 2. elementwise op-count anchor at 4096x4096 ------------------------

fn opcount_anchor() -> Result<String, String> {
    let n = 4096;
    let want = 16_777_216u64;
    let a = Matrix::<f32>::seeded_ints(n, n, SEED, 4).map_err(err_str)?;
    let b = Matrix::<f32>::seeded_ints(n, n, SEED + 1, 4).map_err(err_str)?;

    let mut seq_ops = OpCounter::new();
    elementwise(&a, &b, ElemOp::Add, &mut seq_ops).map_err(err_str)?;
    let (_, kernel_ops) =
        elementwise_kernel(&a, &b, ElemOp::Add, (16, 16), &DeviceProfile::modern())
            .map_err(err_str)?;

    for (path, ops) in [("sequential", seq_ops), ("kernel", kernel_ops)] {
        if ops.additions != want {
            return Err(format!(
                "{path} path reports {} additions, expected exactly {want}",
                ops.additions
            ));
        }
        if ops.multiplies != 0 {
            return Err(format!(
                "{path} path reports {} multiplications for a pure add",
                ops.multiplies
            ));
        }
    }
    Ok(format!(
        "both elementwise paths report exactly {want} additions at {n}x{n}"
    ))
}

// ---- 3. shared-memory budget anchor -------------------------------------

fn budget_anchor() -> Result<String, String> {
    let bytes = shared_budget(16, 2, 8);
    if bytes != 4096 {
        return Err(format!("shared_budget(16, 2, 8) = {bytes}, expected 4096"));
    }
    for profile in [DeviceProfile::legacy(), DeviceProfile::modern()] {
        let label = profile.label.clone();
        let config = LaunchConfig {
            grid_dim: (1, 1),
            block_dim: (16, 16),
            shared_bytes: bytes,
            profile,
        };
        let violations = config.validate();
        if !violations.is_empty() {
            return Err(format!(
                "4096 B / 16x16 config rejected on the {label} profile: {}",
                violations
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("; ")
            ));
        }
    }
    let config = LaunchConfig {
        grid_dim: (1, 1),
        block_dim: (33, 32),
        shared_bytes: 0,
        profile: DeviceProfile::modern(),
    };
    let violations = config.validate();
    let message = violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ");
    if !message.contains("1056 threads > 1024") {
        return Err(format!(
            "(33,32) on modern: expected a violation citing '1056 threads > 1024', got '{message}'"
        ));
    }
    Ok("4096 B fits both profiles; (33,32) rejected citing 1056 threads > 1024".into())
}

// ---- 4. speedup arithmetic anchor ---------------------------------------

fn speedup_anchor() -> Result<String, String> {
    let row = |impl_id: ImplId, median_s: f64| BenchRow {
        case: BenchCase::matmul(impl_id, ScalarKind::Float64, 1024, None, 3, SEED),
        median_s,
        min_s: median_s,
        ops: OpCounter::new(),
        checksum: 0,
        speedup: None,
    };
    let mut report = BenchReport {
        rows: vec![row(ImplId::Seq, 991.96), row(ImplId::Tiled, 0.83)],
        skipped: Vec::new(),
    };
    bench::apply_speedups(&mut report, ImplId::Seq).map_err(err_str)?;

    if report.rows[0].speedup != Some(1.0) {
        return Err(format!(
            "baseline row speedup is {:?}, expected exactly 1.0",
            report.rows[0].speedup
        ));
    }
    let tiled = report.rows[1]
        .speedup
        .ok_or("tiled row has no speedup")?;
    if (tiled - 1195.13).abs() > 0.01 {
        return Err(format!("991.96 / 0.83 = {tiled}, outside 1195.13 +/- 0.01"));
    }
    let table = bench::speedup_table(&report);
    if !table.contains("1195.13") {
        return Err(format!("table does not print 1195.13:\n{table}"));
    }
    let seq_line = table
        .lines()
        .find(|l| l.trim_start().starts_with("seq"))
        .ok_or("table has no seq line")?;
    if !seq_line.contains("1.00") {
        return Err(format!("baseline line does not print 1.00: '{seq_line}'"));
    }
    Ok("991.96 / 0.83 prints as 1195.13; baseline row is exactly 1.0".into())
}

// ---- 5. determinism across worker counts --------------------------------

fn spawn_gridmul(workers: &str, args: &[&str]) -> Result<(i32, String, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_gridmul"))
        .args(args)
        .env("SIMT_WORKERS", workers)
        .output()
        .map_err(|e| format!("spawning gridmul: {e}"))?;
    Ok((
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    ))
}

fn worker_determinism() -> Result<String, String> {
    // Full default verify lattice, all kinds: stdout carries one checksum
    // per check and no timing, so byte equality means every output matrix
    // matched bit for bit.
    let (code1, verify1, err1) = spawn_gridmul("1", &["verify"])?;
    let (code8, verify8, err8) = spawn_gridmul("8", &["verify"])?;
    if code1 != 0 || code8 != 0 {
        return Err(format!(
            "verify exited {code1} (workers=1) / {code8} (workers=8): {err1}{err8}"
        ));
    }
    if verify1 != verify8 {
        return Err("verify output differs between SIMT_WORKERS=1 and 8".into());
    }

    let dir = tempfile::tempdir().map_err(err_str)?;
    let bench_csv = |workers: &str, path: &Path| -> Result<BenchReport, String> {
        let (code, _, err) = spawn_gridmul(
            workers,
            &[
                "bench",
                "--sizes",
                "32,64",
                "--elem-sizes",
                "64",
                "--reps",
                "1",
                "--csv",
                path.to_str().expect("utf8 path"),
            ],
        )?;
        if code != 0 {
            return Err(format!("bench exited {code}: {err}"));
        }
        bench::parse_csv(&std::fs::read_to_string(path).map_err(err_str)?).map_err(err_str)
    };
    let r1 = bench_csv("1", &dir.path().join("w1.csv"))?;
    let r8 = bench_csv("8", &dir.path().join("w8.csv"))?;
    if r1.rows.len() != r8.rows.len() {
        return Err(format!(
            "bench row counts differ: {} vs {}",
            r1.rows.len(),
            r8.rows.len()
        ));
    }
    for (a, b) in r1.rows.iter().zip(r8.rows.iter()) {
        if a.case.impl_id != b.case.impl_id || a.case.size != b.case.size || a.case.kind != b.case.kind {
            return Err("bench case order differs between worker counts".into());
        }
        if a.checksum != b.checksum || a.ops != b.ops {
            return Err(format!(
                "checksum or op count differs for {} {} {:?}",
                a.case.impl_id,
                a.case.kind.name(),
                a.case.size
            ));
        }
    }
    Ok(format!(
        "verify stdout identical ({} bytes); {} bench report checksums identical",
        verify1.len(),
        r1.rows.len()
    ))
}

// ---- 6. barrier semantics ------------------------------------------------

struct ReduceArgs {
    values: Vec<f64>,
    out: OutputBuffer<f64>,
}

/// Every thread parks one value in its shared slot; after the barrier,
/// thread 0 folds the slots in index order.
fn reduce_body<'a>(ctx: ThreadCtx<'a>, args: &'a ReduceArgs) -> KernelBody<'a> {
    Box::pin(async move {
        let (bw, bh) = ctx.block_dim;
        let id = ctx.thread.1 * bw + ctx.thread.0;
        let slots = ctx.shared_view::<f64>(0, bw * bh);
        slots.set(id, args.values[id]);
        ctx.barrier().await;
        if id == 0 {
            let mut acc = 0.0;
            for i in 0..bw * bh {
                acc += slots.get(i);
                ctx.record_adds(1);
            }
            args.out.write(0, acc);
        }
    })
}

/// Thread 0 returns without arriving at the barrier the others wait on.
fn skip_barrier_body<'a>(ctx: ThreadCtx<'a>, _args: &'a ()) -> KernelBody<'a> {
    Box::pin(async move {
        let id = ctx.thread.1 * ctx.block_dim.0 + ctx.thread.0;
        if id != 0 {
            ctx.barrier().await;
        }
    })
}

fn barrier_semantics() -> Result<String, String> {
    let config = LaunchConfig {
        grid_dim: (1, 1),
        block_dim: (4, 4),
        shared_bytes: 16 * std::mem::size_of::<f64>(),
        profile: DeviceProfile::modern(),
    };
    for seed in 0..100u64 {
        let values = Matrix::<f64>::seeded_random(4, 4, seed)
            .map_err(err_str)?
            .into_data();
        let oracle: f64 = values.iter().fold(0.0, |acc, v| acc + v);
        let args = ReduceArgs {
            values,
            out: OutputBuffer::new(1),
        };
        launch_with_workers(&config, 1, reduce_body, &args).map_err(err_str)?;
        let got = args.out.into_vec()[0];
        if got.to_bits() != oracle.to_bits() {
            return Err(format!(
                "shared-slot reduction at seed {seed}: kernel {got:?} != oracle {oracle:?}"
            ));
        }
    }

    // The non-uniform barrier must be detected structurally — an error,
    // never a hang. The watchdog only bounds the test itself.
    let started = Instant::now();
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let config = LaunchConfig {
            grid_dim: (1, 1),
            block_dim: (4, 4),
            shared_bytes: 0,
            profile: DeviceProfile::modern(),
        };
        let args = ();
        let result = launch_with_workers(&config, 1, skip_barrier_body, &args).map(|_| ());
        let _ = tx.send(result);
    });
    match rx.recv_timeout(Duration::from_secs(5)) {
        Ok(Err(LaunchError::BarrierDeadlock {
            waiting, finished, ..
        })) => {
            if waiting != 15 || finished != 1 {
                return Err(format!(
                    "deadlock detected but with waiting={waiting}, finished={finished} \
                     (expected 15 waiting, 1 finished)"
                ));
            }
        }
        Ok(Err(other)) => return Err(format!("expected a barrier deadlock error, got: {other}")),
        Ok(Ok(())) => return Err("non-uniform barrier kernel completed without error".into()),
        Err(_) => return Err("non-uniform barrier kernel hung past the 5 s watchdog".into()),
    }
    Ok(format!(
        "4x4 reduction matches the oracle bitwise for 100 seeds; \
         non-uniform barrier reported as deadlock in {:.2} s",
        started.elapsed().as_secs_f64()
    ))
}

// ---- 7. strassen exactness and the stability witness --------------------

fn strassen_exactness_and_stability() -> Result<String, String> {
    let mut combos = 0;
    for &n in &[1usize, 2, 4, 8, 16, 32, 64] {
        for &cutoff in &[1usize, 8, 32] {
            let a = Matrix::<f64>::seeded_ints(n, n, SEED, 4).map_err(err_str)?;
            let b = Matrix::<f64>::seeded_ints(n, n, SEED + 1, 4).map_err(err_str)?;
            let seq = matmul_sequential(&a, &b, &mut OpCounter::new()).map_err(err_str)?;
            let st = matmul_strassen(&a, &b, &StrassenConfig { cutoff }, &mut OpCounter::new())
                .map_err(err_str)?;
            if st.le_bytes() != seq.le_bytes() {
                return Err(format!(
                    "strassen differs from the reference at n={n}, cutoff={cutoff}, integer f64"
                ));
            }
            combos += 1;
        }
    }

    let n = 256;
    let a32 = Matrix::<f32>::seeded_random(n, n, SEED).map_err(err_str)?;
    let b32 = Matrix::<f32>::seeded_random(n, n, SEED + 1).map_err(err_str)?;
    let widen = |m: &Matrix<f32>| -> Matrix<f64> {
        Matrix::from_vec(m.rows(), m.cols(), m.data().iter().map(|&x| x as f64).collect())
            .expect("same shape")
    };
    let oracle = matmul_sequential(&widen(&a32), &widen(&b32), &mut OpCounter::new())
        .map_err(err_str)?;
    let seq32 = matmul_sequential(&a32, &b32, &mut OpCounter::new()).map_err(err_str)?;
    let st32 = matmul_strassen(
        &a32,
        &b32,
        &StrassenConfig { cutoff: 32 },
        &mut OpCounter::new(),
    )
    .map_err(err_str)?;
    let error_of = |m: &Matrix<f32>| -> Result<f64, String> {
        Ok(widen(m).compare(&oracle).map_err(err_str)?.rel_frobenius)
    };
    let seq_err = error_of(&seq32)?;
    let st_err = error_of(&st32)?;
    if seq_err <= 0.0 {
        return Err("plain f32 product shows zero error vs the f64 oracle — witness is vacuous".into());
    }
    if st_err < seq_err {
        return Err(format!(
            "strassen f32 error {st_err:.3e} is below the plain f32 error {seq_err:.3e}"
        ));
    }
    if st_err > 1e-4 {
        return Err(format!("strassen f32 error {st_err:.3e} is implausibly large"));
    }
    Ok(format!(
        "exact on integer f64 for {combos} size/cutoff combos; at 256x256 f32 \
         strassen error {st_err:.2e} >= sequential {seq_err:.2e} vs the f64 oracle"
    ))
}

// ---- 8. desk-scale benchmark completes with a well-formed CSV ------------

fn desk_scale_bench() -> Result<String, String> {
    // Absolute GPU timings are out of scope by design; what must hold is
    // that the full default lattice (matmul to 1024^3, elementwise at
    // 4096^2, all kinds, all implementations) completes in under 10
    // minutes and emits a CSV that parses bit-exactly.
    let dir = tempfile::tempdir().map_err(err_str)?;
    let csv_path = dir.path().join("desk.csv");
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_gridmul"))
        .arg("bench")
        .arg("--csv")
        .arg(&csv_path)
        .env_remove("SIMT_WORKERS")
        .output()
        .map_err(|e| format!("spawning gridmul bench: {e}"))?;
    let dt = start.elapsed();
    if !out.status.success() {
        let tail: String = String::from_utf8_lossy(&out.stderr)
            .lines()
            .rev()
            .take(3)
            .collect::<Vec<_>>()
            .join(" | ");
        return Err(format!(
            "bench exited {:?}: {tail}",
            out.status.code()
        ));
    }
    if dt > Duration::from_secs(600) {
        return Err(format!(
            "default lattice took {:.0} s, limit is 600 s",
            dt.as_secs_f64()
        ));
    }

    let text = std::fs::read_to_string(&csv_path).map_err(err_str)?;
    let report = bench::parse_csv(&text).map_err(|e| format!("CSV malformed: {e}"))?;
    for n in [256usize, 512, 1024] {
        if !report
            .rows
            .iter()
            .any(|r| r.case.size == (n, n, n) && r.case.impl_id.family() == Family::Matmul)
        {
            return Err(format!("no matmul rows at {n}^3 in the CSV"));
        }
    }
    if !report
        .rows
        .iter()
        .any(|r| r.case.size == (4096, 1, 4096) && r.case.impl_id.family() == Family::Elementwise)
    {
        return Err("no elementwise rows at 4096^2 in the CSV".into());
    }
    // Integer-valued inputs make every f64 implementation agree exactly,
    // so each size's rows must share one checksum.
    for n in [256usize, 512, 1024] {
        let sums: Vec<u64> = report
            .rows
            .iter()
            .filter(|r| {
                r.case.kind == ScalarKind::Float64
                    && r.case.size == (n, n, n)
                    && r.case.impl_id.family() == Family::Matmul
            })
            .map(|r| r.checksum)
            .collect();
        if sums.is_empty() || sums.iter().any(|&s| s != sums[0]) {
            return Err(format!("f64 checksums disagree across implementations at {n}^3"));
        }
    }
    Ok(format!(
        "default lattice in {:.0} s (limit 600; absolute device timings out of scope); \
         {} rows parsed back bit-exactly",
        dt.as_secs_f64(),
        report.rows.len()
    ))
}
