//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::process::Command;
use std::time::Instant;

use gtpinch::error::Error;
use gtpinch::matrix::{construct_hermitian, CMatrix, HermitianMatrix};
use gtpinch::par::Execution;
use gtpinch::policy::NumericPolicy;
use gtpinch::random::random_pd;
use gtpinch::spectral::decompose;
use gtpinch::suite::{gt_bulk_suite, pinch_suite};
use gtpinch::tensor::{binomial_bound, count_distinct_spectrum, materialized_distinct_count, DEFAULT_DIM_CAP};
use gtpinch::verifier::{chain_trace, convergence_study, gt_check, ChainOptions};
use num_complex::Complex64;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rel(x: f64, reference: f64) -> f64 {
    (x - reference).abs() / reference.abs()
}

fn gt_bulk() -> Outcome {
    let p = NumericPolicy::default();
    let dims: Vec<usize> = (2..=8).collect();
    let start = Instant::now();
    let trials = gt_bulk_suite(Execution::default(), &dims, 1000, 20240101, &p).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let failures: Vec<_> = trials
        .iter()
        .filter(|t| t.report.gap < -1e-9 * (t.report.lhs.abs() + t.report.rhs.abs()))
        .collect();
    let worst = trials
        .iter()
        .map(|t| t.report.gap / (t.report.lhs.abs() + t.report.rhs.abs()))
        .fold(f64::INFINITY, f64::min);
    let msg = format!("{} pairs, {} violations, min relative gap {worst:.3e}, {secs:.2}s", trials.len(), failures.len());
    if trials.len() == 7000 && failures.is_empty() && secs < 60.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn commuting_equality() -> Outcome {
    let p = NumericPolicy::default();
    let r = gt_check(&HermitianMatrix::diag(&[1.0, -1.0]), &HermitianMatrix::identity(2), &p).map_err(|e| e.to_string())?;
    let expected = std::f64::consts::E.powi(2) + 1.0;
    let (el, er) = (rel(r.lhs, expected), rel(r.rhs, expected));
    let msg = format!("lhs {:.12} rhs {:.12} expected {expected:.12}, rel errors {el:.1e} {er:.1e}", r.lhs, r.rhs);
    if el <= 1e-10 && er <= 1e-10 && (expected - 8.38906).abs() < 5e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn pauli_oracle() -> Outcome {
    let p = NumericPolicy::default();
    let x = HermitianMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]], &p).map_err(|e| e.to_string())?;
    let r = gt_check(&x, &HermitianMatrix::diag(&[1.0, -1.0]), &p).map_err(|e| e.to_string())?;
    let lhs = 2.0 * 2f64.sqrt().cosh();
    let rhs = 2.0 * 1f64.cosh().powi(2);
    let (el, er) = ((r.lhs - lhs).abs(), (r.rhs - rhs).abs());
    let msg = format!("lhs {:.12} (err {el:.1e}) rhs {:.12} (err {er:.1e})", r.lhs, r.rhs);
    if el <= 1e-10 && er <= 1e-10 && r.lhs <= r.rhs {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn pinching_suites() -> Outcome {
    let p = NumericPolicy::default();
    let dims: Vec<usize> = (2..=8).collect();
    let trials = pinch_suite(Execution::default(), &dims, 500, 777, &p).map_err(|e| e.to_string())?;
    let required = [
        "commutes_with_source",
        "source_trace_preserved",
        "pinching_inequality",
        "pinch_equals_mixture",
    ];
    let mut failures = Vec::new();
    for t in &trials {
        for name in required {
            match t.records.iter().find(|r| r.name == name) {
                Some(r) if r.passed => {}
                Some(r) => failures.push(format!("trial {} {name} {:.2e} > {:.2e}", t.index, r.residual, r.tolerance)),
                None => failures.push(format!("trial {} {name} missing", t.index)),
            }
        }
    }
    let degenerate = trials.iter().filter(|t| t.distinct < t.dim).count();
    let msg = format!("{} pairs ({degenerate} with repeated eigenvalues), {} failures", trials.len(), failures.len());
    if trials.len() == 500 && failures.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}: {}", failures.join("; ")))
    }
}

/// `diag(values)` rotated by two real Householder reflections, so the
/// materialized tensor powers stay real.
fn real_rotated(values: &[f64], seed: u64) -> HermitianMatrix {
    let d = values.len();
    let reflector = |shift: f64| {
        let v: Vec<f64> = (0..d).map(|i| (shift + 1.3 * i as f64).sin() + 0.1).collect();
        let nn: f64 = v.iter().map(|x| x * x).sum();
        let mut h = CMatrix::identity(d).to_rows();
        for i in 0..d {
            for j in 0..d {
                h[i][j] -= Complex64::new(2.0 * v[i] * v[j] / nn, 0.0);
            }
        }
        CMatrix::from_rows(&h).unwrap()
    };
    let q = reflector(seed as f64).matmul(&reflector(seed as f64 * 0.7 + 0.5)).unwrap();
    HermitianMatrix::diag(values).conjugate_by(&q).unwrap()
}

fn tensor_power_counts() -> Outcome {
    let p = NumericPolicy::default();
    let bases: Vec<Vec<f64>> = vec![
        vec![2.5],
        vec![1.0, 1.0, 1.0],
        vec![1.0, 2.0],
        vec![0.7, 1.9],
        vec![1.0, 2.0, 4.0],
        vec![0.5, 1.0, 2.0],
        vec![1.0, 2.0, 3.0],
        vec![0.3, 1.1, 2.6],
        vec![2.0, 2.0, 3.0],
        vec![1.0, 2.0, 3.0, 5.0],
        vec![1.0, 2.0, 4.0, 8.0],
        vec![0.4, 0.9, 1.7, 3.2],
        vec![1.5, 1.5, 2.5, 2.5],
        vec![1.0, 3.0, 3.0, 3.0],
    ];
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    let mut materialized = 0;
    for (i, values) in bases.iter().enumerate() {
        let a = real_rotated(values, i as u64 + 1);
        let dec = decompose(&a, &p).map_err(|e| e.to_string())?;
        let n = dec.distinct_count() as u64;
        let d = values.len();
        for m in 1..=6u32 {
            let count = count_distinct_spectrum(&dec, m, &p).map_err(|e| e.to_string())?;
            let bound = binomial_bound(m as u64, n).exact.unwrap();
            if count.distinct_count as u128 > bound {
                failures.push(format!("{values:?} m {m}: {} > {bound}", count.distinct_count));
            }
            // the 4096-dimensional case is expensive; do it once, for the four-distinct-prime base
            let full_size = d.pow(m);
            let heavy = full_size == 4096;
            if full_size <= DEFAULT_DIM_CAP && (!heavy || values == &[1.0, 2.0, 3.0, 5.0]) {
                let direct = materialized_distinct_count(&a, m, DEFAULT_DIM_CAP, &p).map_err(|e| e.to_string())?;
                materialized += 1;
                if direct as u64 != count.distinct_count {
                    failures.push(format!("{values:?} m {m}: materialized {direct} vs combinatorial {}", count.distinct_count));
                }
                if heavy {
                    lines.push(format!("d=4 m=6 materialized count {direct} = C(9,3) bound {bound}"));
                }
            }
        }
    }
    let msg = format!(
        "{} bases x m 1..6, {materialized} materialized comparisons, {} failures; {}",
        bases.len(),
        failures.len(),
        lines.join("; ")
    );
    if failures.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}: {}", failures.join("; ")))
    }
}

fn chain_collapse() -> Outcome {
    let p = NumericPolicy::default();
    let mut worst_t: f64 = 0.0;
    let mut worst_s: f64 = 0.0;
    let pairs = 25;
    for seed in 0..pairs {
        let (a, b) = (random_pd(2, 1000 + seed, 0.1), random_pd(2, 5000 + seed, 0.1));
        for m in 1..=3 {
            let t = chain_trace(&a, &b, m, &ChainOptions::default(), &p).map_err(|e| e.to_string())?;
            let full = t.full.as_ref().ok_or("full tier missing")?;
            worst_t = worst_t.max(rel(full.t_pinched, t.target));
            worst_s = worst_s.max(rel(full.s0_tensorized, t.s0));
        }
    }
    let msg = format!("{pairs} pairs x m 1..3: max rel |t_pinched - target| {worst_t:.1e}, max rel |s0_tensorized - s0| {worst_s:.1e}");
    if worst_t <= 1e-7 && worst_s <= 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn convergence() -> Outcome {
    let p = NumericPolicy::default();
    let ms = [1u32, 2, 4, 8];
    let listed = ["0.6931", "0.5493", "0.4024", "0.2747"];
    let mut failures = Vec::new();
    let mut first = Vec::new();
    for seed in 0..10 {
        let (a, b) = (random_pd(2, 300 + seed, 0.2), random_pd(2, 600 + seed, 0.2));
        let study = convergence_study(&a, &b, &ms, &ChainOptions::default(), &p).map_err(|e| e.to_string())?;
        if study.traces[0].spectrum_a.d_distinct != 2 {
            failures.push(format!("seed {seed}: base is not two-valued"));
        }
        for (t, shown) in study.traces.iter().zip(listed) {
            let oracle = ((t.m + 1) as f64).ln() / t.m as f64;
            let excess = t.bound - t.target;
            if (t.gap_bound - oracle).abs() > 1e-9 {
                failures.push(format!("seed {seed} m {}: gap bound {} vs {oracle}", t.m, t.gap_bound));
            }
            if format!("{:.4}", t.gap_bound) != shown {
                failures.push(format!("m {}: gap bound {:.6} does not round to {shown}", t.m, t.gap_bound));
            }
            if excess > oracle + 1e-12 {
                failures.push(format!("seed {seed} m {}: excess {excess} > {oracle}", t.m));
            }
        }
        if !study.bound_non_increasing() {
            failures.push(format!("seed {seed}: bound increases"));
        }
        if seed == 0 {
            first = study.traces.iter().map(|t| format!("{:.4}", t.gap_bound)).collect();
        }
    }
    let msg = format!("10 pairs, gap bounds [{}], {} failures", first.join(", "), failures.len());
    if failures.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}: {}", failures.join("; ")))
    }
}

fn input_gate() -> Outcome {
    let p = NumericPolicy::default();
    let raw = vec![
        vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
        vec![Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0)],
    ];
    let lib = construct_hermitian(&raw, &p);
    let lib_ok = matches!(lib, Err(Error::NotHermitian { .. }));

    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let bad = dir.path().join("bad.json");
    let ok = dir.path().join("ok.json");
    std::fs::write(&bad, r#"{"dim": 2, "re": [[1, 1], [0, 2]]}"#).map_err(|e| e.to_string())?;
    std::fs::write(&ok, r#"{"dim": 2, "re": [[1, 0], [0, 1]]}"#).map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_gtpinch"))
        .arg("check")
        .arg(&bad)
        .arg(&ok)
        .output()
        .map_err(|e| e.to_string())?;
    let stderr = String::from_utf8_lossy(&out.stderr);
    let diag = stderr.lines().next().unwrap_or("").to_string();
    let msg = format!("library rejects: {lib_ok}; cli exit {:?}, diagnostic `{diag}`", out.status.code());
    if lib_ok && out.status.code() == Some(2) && stderr.contains("NotHermitian") {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("gt bulk suite", gt_bulk),
        ("commuting equality", commuting_equality),
        ("pauli oracle", pauli_oracle),
        ("pinching suites", pinching_suites),
        ("tensor power spectrum count", tensor_power_counts),
        ("chain collapse", chain_collapse),
        ("convergence", convergence),
        ("input gate", input_gate),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
