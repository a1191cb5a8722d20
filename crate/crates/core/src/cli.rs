//! Command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage
//! or input errors.

use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::check::{all_pass, CheckRecord};
use crate::functions::herm_exp;
use crate::io::{InputError, MatrixFile};
use crate::matrix::HermitianMatrix;
use crate::par::Execution;
use crate::pinching::PinchOperator;
use crate::policy::NumericPolicy;
use crate::suite::{random_suite, summarize};
use crate::tensor::DEFAULT_DIM_CAP;
use crate::verifier::{convergence_study, gt_check, ChainOptions};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gtpinch", version, about = "Spectral pinching checks for the Golden-Thompson inequality")]
pub struct Cli {
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ToleranceArgs {
    /// Hermiticity gate, relative to 1 + ‖M‖_F
    #[arg(long, global = true)]
    pub tol_herm: Option<f64>,
    /// Eigenvalue clustering gap, relative to max(1, spectral radius)
    #[arg(long, global = true)]
    pub tol_cluster: Option<f64>,
    /// PSD slack, relative to max(1, spectral radius)
    #[arg(long, global = true)]
    pub tol_psd: Option<f64>,
    /// Decomposition residual tolerance, relative to 1 + ‖M‖_F
    #[arg(long, global = true)]
    pub tol_residual: Option<f64>,
}

impl ToleranceArgs {
    pub fn policy(&self) -> Result<NumericPolicy, String> {
        let d = NumericPolicy::default();
        NumericPolicy {
            herm_tol: self.tol_herm.unwrap_or(d.herm_tol),
            cluster_tol: self.tol_cluster.unwrap_or(d.cluster_tol),
            psd_tol: self.tol_psd.unwrap_or(d.psd_tol),
            residual_tol: self.tol_residual.unwrap_or(d.residual_tol),
        }
        .validated()
        .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Golden-Thompson check and pinching properties for one pair; prints a certificate
    Check { a: PathBuf, b: PathBuf },
    /// Chain quantities per tensor power as CSV
    Chain {
        a: PathBuf,
        b: PathBuf,
        /// Tensor powers, comma separated, strictly ascending
        #[arg(long, value_delimiter = ',', default_value = "1,2,3", value_parser = clap::value_parser!(u32).range(1..))]
        m: Vec<u32>,
        /// Largest d^m for which tensor powers are materialized
        #[arg(long, alias = "full-tier-cap", default_value_t = DEFAULT_DIM_CAP)]
        cap: usize,
    },
    /// Seeded random Golden-Thompson and pinching checks
    RandomSuite {
        /// Dimension range `lo..hi` (inclusive) or a single dimension
        #[arg(long, default_value = "2..6", value_parser = parse_dims)]
        dims: RangeInclusive<usize>,
        /// Trials per dimension
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

pub fn parse_dims(s: &str) -> Result<RangeInclusive<usize>, String> {
    let parse = |t: &str| -> Result<usize, String> {
        match t.trim().parse::<usize>() {
            Ok(0) => Err("dimensions must be positive".into()),
            Ok(v) => Ok(v),
            Err(e) => Err(format!("bad dimension `{t}`: {e}")),
        }
    };
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (parse(lo)?, parse(hi.trim_start_matches('='))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty dimension range {s}"));
    }
    Ok(lo..=hi)
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateInputs {
    pub matrices: Vec<InputDigest>,
    pub seeds: Vec<u64>,
    pub policy: NumericPolicy,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub inputs: CertificateInputs,
    pub records: Vec<CheckRecord>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Certificate {
    pub fn new(inputs: CertificateInputs, records: Vec<CheckRecord>) -> Self {
        let verdict = if all_pass(&records) { Verdict::Pass } else { Verdict::Fail };
        Self { inputs, records, verdict }
    }

    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Pass => EXIT_PASS,
            Verdict::Fail => EXIT_VIOLATION,
        }
    }
}

/// Decimal rendering with 12 significant digits.
pub fn format_sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.00000000000".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        // rounding can carry into the next decade; re-derive from the scientific form
        let sci = format!("{x:.11e}");
        let e: i32 = sci.split_once('e').map_or(0, |(_, e)| e.parse().unwrap_or(0));
        let decimals = (11 - e).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

struct Loaded {
    matrix: HermitianMatrix,
    digest: InputDigest,
}

fn load(path: &Path, policy: &NumericPolicy) -> Result<Loaded, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: cannot read: {e}", path.display()))?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| format!("{}: not UTF-8: {e}", path.display()))?;
    let file = MatrixFile::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let matrix = file
        .to_hermitian(policy)
        .map_err(|e: InputError| format!("{}: {e}", path.display()))?;
    Ok(Loaded {
        matrix,
        digest: InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        },
    })
}

fn load_pair(a: &Path, b: &Path, policy: &NumericPolicy) -> Result<(Loaded, Loaded), String> {
    let (a, b) = (load(a, policy)?, load(b, policy)?);
    if a.matrix.dim() != b.matrix.dim() {
        return Err(format!(
            "dimension mismatch: {} is {}x{}, {} is {}x{}",
            a.digest.path,
            a.matrix.dim(),
            a.matrix.dim(),
            b.digest.path,
            b.matrix.dim(),
            b.matrix.dim()
        ));
    }
    Ok((a, b))
}

fn prefixed(prefix: &str, records: Vec<CheckRecord>) -> impl Iterator<Item = CheckRecord> + '_ {
    records.into_iter().map(move |mut r| {
        r.name = format!("{prefix}{}", r.name);
        r
    })
}

pub fn check_certificate(a: &Path, b: &Path, policy: &NumericPolicy) -> Result<Certificate, String> {
    let (la, lb) = load_pair(a, b, policy)?;
    let (a, b) = (&la.matrix, &lb.matrix);
    let err = |e: crate::error::Error| e.to_string();
    let mut records = gt_check(a, b, policy).map_err(err)?.checks();
    let exp_a = herm_exp(a, policy).map_err(err)?;
    let exp_b = herm_exp(b, policy).map_err(err)?;
    let pinch_a = PinchOperator::new(a, policy).map_err(err)?;
    let pinch_b = PinchOperator::new(b, policy).map_err(err)?;
    records.extend(prefixed("pinch_A_expB/", pinch_a.property_suite(&exp_b, policy).map_err(err)?));
    records.extend(prefixed("pinch_B_expA/", pinch_b.property_suite(&exp_a, policy).map_err(err)?));
    Ok(Certificate::new(
        CertificateInputs {
            matrices: vec![la.digest, lb.digest],
            seeds: vec![],
            policy: *policy,
        },
        records,
    ))
}

pub const CHAIN_HEADER: [&str; 7] = ["m", "s0", "s0_tensorized", "t_pinched", "target", "bound", "gap_bound"];

fn cmd_chain(
    a: &Path,
    b: &Path,
    ms: &[u32],
    cap: usize,
    policy: &NumericPolicy,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, String> {
    let (la, lb) = load_pair(a, b, policy)?;
    let options = ChainOptions {
        cap,
        require_full_tier: false,
    };
    let study = convergence_study(&la.matrix, &lb.matrix, ms, &options, policy).map_err(|e| e.to_string())?;

    let mut csv = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| e.to_string();
    csv.write_record(CHAIN_HEADER).map_err(io)?;
    let opt = |v: Option<f64>| v.map(format_sig12).unwrap_or_default();
    for t in &study.traces {
        csv.write_record([
            t.m.to_string(),
            format_sig12(t.s0),
            opt(t.s0_tensorized()),
            opt(t.t_pinched()),
            format_sig12(t.target),
            format_sig12(t.bound),
            format_sig12(t.gap_bound),
        ])
        .map_err(io)?;
    }
    let bytes = csv.into_inner().map_err(|e| e.to_string())?;
    out.write_all(&bytes).map_err(|e| e.to_string())?;

    let failed: Vec<CheckRecord> = study.checks().into_iter().filter(|r| !r.passed).collect();
    for r in &failed {
        let _ = writeln!(err, "violation: {} residual {:e} > tolerance {:e}", r.name, r.residual, r.tolerance);
    }
    Ok(if failed.is_empty() { EXIT_PASS } else { EXIT_VIOLATION })
}

fn cmd_random_suite(
    dims: RangeInclusive<usize>,
    trials: u64,
    seed: u64,
    policy: &NumericPolicy,
    out: &mut dyn Write,
) -> Result<i32, String> {
    let dims: Vec<usize> = dims.collect();
    let outcomes = random_suite(Execution::default(), &dims, trials as usize, seed, policy).map_err(|e| e.to_string())?;
    let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(|e| e.to_string());
    w(
        out,
        format!(
            "policy herm_tol={:e} cluster_tol={:e} psd_tol={:e} residual_tol={:e}",
            policy.herm_tol, policy.cluster_tol, policy.psd_tol, policy.residual_tol
        ),
    )?;
    for o in &outcomes {
        let mut line = format!(
            "trial {} dim {} seed {} checks {} violations {}",
            o.index,
            o.dim,
            o.seed,
            o.records.len(),
            o.violations()
        );
        for r in o.records.iter().filter(|r| !r.passed) {
            line.push_str(&format!(" [{} {:e} > {:e}]", r.name, r.residual, r.tolerance));
        }
        w(out, line)?;
    }
    let s = summarize(&outcomes);
    w(out, format!("summary trials {} checks {} violations {}", s.trials, s.checks, s.violations))?;
    Ok(if s.violations == 0 { EXIT_PASS } else { EXIT_VIOLATION })
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let policy = match cli.tolerances.policy() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let result = match cli.command {
        Command::Check { a, b } => check_certificate(&a, &b, &policy).and_then(|cert| {
            let text = serde_json::to_string_pretty(&cert).map_err(|e| e.to_string())?;
            writeln!(out, "{text}").map_err(|e| e.to_string())?;
            Ok(cert.exit_code())
        }),
        Command::Chain { a, b, m, cap } => cmd_chain(&a, &b, &m, cap, &policy, out, err),
        Command::RandomSuite { dims, trials, seed } => cmd_random_suite(dims, trials, seed, &policy, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12() {
        assert_eq!(format_sig12(2f64.ln()), "0.693147180560");
        assert_eq!(format_sig12(6f64.ln()), "1.79175946923");
        assert_eq!(format_sig12(1.0), "1.00000000000");
        assert_eq!(format_sig12(9.9999999999999), "10.0000000000");
        assert_eq!(format_sig12(-123.456), "-123.456000000");
        assert_eq!(format_sig12(1.5e-7), "1.50000000000e-7");
        for x in [0.1234567890123, 98765.43210987, -3.3e-3, 7.0e20] {
            let s = format_sig12(x);
            let digits = s.split('e').next().unwrap().chars().filter(char::is_ascii_digit).collect::<String>();
            assert_eq!(digits.trim_start_matches('0').len(), 12, "{s}");
            assert!((s.parse::<f64>().unwrap() - x).abs() <= 1e-11 * x.abs());
        }
    }

    #[test]
    fn dims_ranges() {
        assert_eq!(parse_dims("2..6").unwrap(), 2..=6);
        assert_eq!(parse_dims("2..=6").unwrap(), 2..=6);
        assert_eq!(parse_dims("3").unwrap(), 3..=3);
        assert!(parse_dims("0..2").is_err());
        assert!(parse_dims("5..2").is_err());
        assert!(parse_dims("x").is_err());
    }
}
