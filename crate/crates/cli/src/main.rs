//! altbase — command-line interface for alternate Cantor real bases.
//!
//! Exit codes: 0 success, 1 validation failure, 2 solver non-convergence,
//! 3 input error, 4 internal invariant violation.

use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use altbase::cyclic_matrix::{
    circulant, circulant_determinant, classify_circulant, random_monotone_with, CirculantClass,
    MonotoneClass,
};
use altbase::digit_seq::{random_valid_list, ParryList};
use altbase::io::{self, MatrixData};
use altbase::numeration::{
    greedy_expand, quasi_greedy_unity, roundtrip, ExpansionPrefix, Reliability,
};
use altbase::solver::{solve_base, SolveError, SolverConfig};
use altbase::{Rational, Real};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXIT_OK: u8 = 0;
const EXIT_INVALID: u8 = 1;
const EXIT_NO_CONVERGENCE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "altbase",
    about = "Alternate Cantor real bases: Parry lists, base recovery, digit expansions, and cyclically monotone matrices",
    version
)]
struct Cli {
    /// Working significand width in bits.
    #[arg(long, global = true, default_value_t = 128)]
    precision_bits: usize,
    /// Solver residual tolerance (infinity norm).
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Emit machine-readable JSON instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a digit list against the Parry condition.
    Validate {
        /// Parry-list JSON file.
        list: String,
    },
    /// Recover the unique alternate base of a Parry-valid list.
    Solve {
        /// Parry-list JSON file.
        list: String,
        /// Print the iteration trace and per-component evaluation diagnostics.
        #[arg(long)]
        trace: bool,
    },
    /// Classify a matrix file and report its exact determinant.
    Matcheck {
        /// Matrix JSON file.
        matrix: String,
    },
    /// Analyze a circulant from its defining vector or a matrix file.
    Circulant {
        /// Defining vector, comma separated (integers, decimals, or num/den).
        #[arg(long, value_name = "C0,C1,...", conflicts_with = "matrix", required_unless_present = "matrix")]
        vector: Option<String>,
        /// Matrix JSON file whose rows must be the rotations of its first row.
        #[arg(long)]
        matrix: Option<String>,
    },
    /// Greedy expansion of x in a given base.
    Expand {
        /// Base: a solve-output JSON file or inline comma-separated betas.
        #[arg(long)]
        base: String,
        /// Number in [0, 1), decimal notation.
        #[arg(long)]
        x: String,
        /// How many digits to emit.
        #[arg(long, default_value_t = 40)]
        digits: usize,
    },
    /// Solve a list, then print the quasi-greedy expansions of unity.
    Dstar {
        /// Parry-list JSON file.
        #[arg(long)]
        list: String,
        #[arg(long, default_value_t = 40)]
        digits: usize,
    },
    /// Solve, re-expand, and compare against the original list.
    Roundtrip {
        /// Parry-list JSON file.
        #[arg(long)]
        list: String,
        #[arg(long, default_value_t = 40)]
        digits: usize,
    },
    /// Randomized invariant sweeps.
    Fuzz {
        /// Which invariant family to drive.
        #[arg(long, value_parser = ["matrix", "parry", "roundtrip"])]
        kind: String,
        #[arg(long, default_value_t = 1000)]
        count: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(EXIT_INPUT);
            }
            print!("{e}");
            return ExitCode::from(EXIT_OK);
        }
    };
    if ![64, 128, 256, 512, 1024].contains(&cli.precision_bits) {
        eprintln!("error: --precision-bits must be one of 64, 128, 256, 512, 1024");
        return ExitCode::from(EXIT_INPUT);
    }
    let code = run(&cli);
    ExitCode::from(code)
}

fn solver_config(cli: &Cli) -> SolverConfig {
    SolverConfig {
        precision_bits: cli.precision_bits,
        tol: cli.tol,
        ..Default::default()
    }
}

fn read_file(path: &str) -> Result<String, u8> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {path}: {e}");
        EXIT_INPUT
    })
}

fn run(cli: &Cli) -> u8 {
    match &cli.command {
        Command::Validate { list } => cmd_validate(cli, list),
        Command::Solve { list, trace } => cmd_solve(cli, list, *trace),
        Command::Matcheck { matrix } => cmd_matcheck(cli, matrix),
        Command::Circulant { vector, matrix } => cmd_circulant(cli, vector.as_deref(), matrix.as_deref()),
        Command::Expand { base, x, digits } => cmd_expand(cli, base, x, *digits),
        Command::Dstar { list, digits } => cmd_dstar(cli, list, *digits),
        Command::Roundtrip { list, digits } => cmd_roundtrip(cli, list, *digits),
        Command::Fuzz { kind, count } => cmd_fuzz(cli, kind, *count),
    }
    .unwrap_or_else(|code| code)
}

fn load_list(path: &str) -> Result<ParryList, u8> {
    let text = read_file(path)?;
    io::read_parry_list(&text).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_INPUT
    })
}

fn cmd_validate(cli: &Cli, path: &str) -> Result<u8, u8> {
    let list = load_list(path)?;
    let report = list.validate();
    let spot = list.shift_spot_check(200);
    if cli.json {
        let violations: Vec<_> = report
            .violations
            .iter()
            .map(|v| {
                serde_json::json!({
                    "rule": v.rule.to_string(),
                    "sequence": v.seq,
                    "position": v.position,
                    "detail": v.detail,
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "valid": report.is_valid() && spot.is_none(),
                "p": list.p(),
                "digit_bound": list.digit_bound(),
                "violations": violations,
            }))
            .unwrap()
        );
    } else if report.is_valid() && spot.is_none() {
        println!(
            "valid Parry list: p = {}, digit bound H = {}",
            list.p(),
            list.digit_bound()
        );
    } else {
        println!("invalid Parry list:");
        for v in &report.violations {
            println!(
                "  [{}] sequence {}, position {}: {}",
                v.rule, v.seq, v.position, v.detail
            );
        }
        if let Some(v) = &spot {
            println!("  [{}] spot check: {}", v.rule, v.detail);
        }
    }
    if report.is_valid() && spot.is_none() {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_INVALID)
    }
}

fn cmd_solve(cli: &Cli, path: &str, trace: bool) -> Result<u8, u8> {
    let list = load_list(path)?;
    let cfg = solver_config(cli);
    match solve_base(&list, &cfg) {
        Ok((base, cert)) => {
            let betas = io::format_betas(&base);
            let path_names: Vec<String> = cert.method_path.iter().map(|s| s.to_string()).collect();
            let diagnostics = if trace {
                Some(trace_diagnostics(&list, &cert).map_err(|e| {
                    eprintln!("error: {e}");
                    EXIT_INTERNAL
                })?)
            } else {
                None
            };
            if cli.json {
                let mut out = serde_json::json!({
                    "betas": betas,
                    "residual": cert.residual_inf.to_decimal_string(8),
                    "iterations": cert.iterations,
                    "method_path": path_names,
                    "precision_bits": base.precision_bits(),
                });
                if let Some(diag) = diagnostics {
                    out["trace"] = serde_json::json!(cert
                        .residual_trace
                        .iter()
                        .zip(&path_names)
                        .map(|(r, m)| serde_json::json!({
                            "method": m,
                            "residual": r.to_decimal_string(6),
                        }))
                        .collect::<Vec<_>>());
                    out["evaluation"] = diag;
                }
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            } else {
                println!("betas: {}", betas.join(", "));
                println!(
                    "residual: {}  iterations: {}  path: {}",
                    cert.residual_inf.to_decimal_string(6),
                    cert.iterations,
                    path_names.join(" ")
                );
                if let Some(diag) = diagnostics {
                    for (k, (r, m)) in cert.residual_trace.iter().zip(&path_names).enumerate() {
                        println!("  step {:>2} [{m}]: residual {}", k + 1, r.to_decimal_string(6));
                    }
                    for entry in diag.as_array().into_iter().flatten() {
                        println!(
                            "  psi_{}(y) = {} (closed), {} +/- {} (truncated)",
                            entry["component"],
                            entry["closed"].as_str().unwrap_or("?"),
                            entry["truncated"].as_str().unwrap_or("?"),
                            entry["tail_bound"].as_str().unwrap_or("?"),
                        );
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Err(e) => Err(solver_exit(&e)),
    }
}

/// Re-evaluate Ψ at the solution through both routes, as trace diagnostics.
fn trace_diagnostics(
    list: &ParryList,
    cert: &altbase::SolveCertificate,
) -> Result<serde_json::Value, String> {
    let psi = altbase::PsiMap::from_parry(list).map_err(|e| e.to_string())?;
    let closed = psi.eval(&cert.y).map_err(|e| e.to_string())?;
    let eps = Real::parse_decimal("1e-30", 64).map_err(|e| e.to_string())?;
    let truncated = psi.eval_truncated(&cert.y, &eps).map_err(|e| e.to_string())?;
    let rows: Vec<serde_json::Value> = closed
        .iter()
        .zip(&truncated)
        .enumerate()
        .map(|(i, (c, t))| {
            serde_json::json!({
                "component": i,
                "closed": c.value.to_decimal_string(20),
                "truncated": t.value.to_decimal_string(20),
                "tail_bound": t.error_bound.to_decimal_string(4),
                "terms_used": t.terms_used,
            })
        })
        .collect();
    Ok(serde_json::Value::Array(rows))
}

fn solver_exit(e: &SolveError) -> u8 {
    match e {
        SolveError::NonConvergence {
            residual,
            iterations,
            ..
        } => {
            eprintln!(
                "error: no convergence (residual {} after {} steps)",
                residual.to_decimal_string(6),
                iterations
            );
            EXIT_NO_CONVERGENCE
        }
        SolveError::InvalidParryList { report } => {
            eprintln!("error: list fails the Parry condition:");
            for v in &report.violations {
                eprintln!(
                    "  [{}] sequence {}, position {}: {}",
                    v.rule, v.seq, v.position, v.detail
                );
            }
            EXIT_INVALID
        }
        SolveError::InvalidSeries | SolveError::TargetOutOfRange { .. } => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
        SolveError::InvalidConfig(_) | SolveError::Series(_) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
        SolveError::InternalInvariant(_) => {
            eprintln!("error: {e}");
            EXIT_INTERNAL
        }
    }
}

fn cmd_matcheck(cli: &Cli, path: &str) -> Result<u8, u8> {
    let text = read_file(path)?;
    let data = io::read_matrix(&text, cli.precision_bits).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_INPUT
    })?;
    match data {
        MatrixData::Exact(m) => {
            let class = m.classify_monotone();
            let det = m.determinant();
            let sign_ok = match class {
                MonotoneClass::NotMonotone => true,
                MonotoneClass::Monotone => det >= Rational::from_integer(0.into()),
                MonotoneClass::StrictlyMonotone => det > Rational::from_integer(0.into()),
            };
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "p": m.size(),
                        "class": class.to_string(),
                        "determinant": det.to_string(),
                        "mode": "exact",
                        "sign_theorem_holds": sign_ok,
                    }))
                    .unwrap()
                );
            } else {
                println!("class: {class}");
                println!("determinant: {det}");
            }
            if sign_ok {
                Ok(EXIT_OK)
            } else {
                eprintln!("error: determinant sign contradicts the monotone-rows theorem");
                Ok(EXIT_INTERNAL)
            }
        }
        MatrixData::Float(m) => {
            let class = m.classify_monotone();
            let (det, bound) = m.determinant_with_error();
            // in float mode a sign violation must clear the error estimate
            let sign_ok = match class {
                MonotoneClass::NotMonotone => true,
                _ => det >= -bound.clone(),
            };
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "p": m.size(),
                        "class": class.to_string(),
                        "determinant": det.to_decimal_string(20),
                        "error_estimate": bound.to_decimal_string(4),
                        "mode": "float",
                        "sign_theorem_holds": sign_ok,
                    }))
                    .unwrap()
                );
            } else {
                println!("class: {class}");
                println!(
                    "determinant: {} (error estimate {})",
                    det.to_decimal_string(20),
                    bound.to_decimal_string(4)
                );
            }
            if sign_ok {
                Ok(EXIT_OK)
            } else {
                eprintln!("error: determinant sign contradicts the monotone-rows theorem");
                Ok(EXIT_INTERNAL)
            }
        }
    }
}

fn cmd_circulant(cli: &Cli, vector: Option<&str>, matrix: Option<&str>) -> Result<u8, u8> {
    let parse = |s: &str| -> Result<Rational, u8> {
        altbase::scalar::parse_rational(s).map_err(|e| {
            eprintln!("error: {e}");
            EXIT_INPUT
        })
    };
    let c: Vec<Rational> = match (vector, matrix) {
        (Some(v), None) => v
            .split(',')
            .map(|s| parse(s.trim()))
            .collect::<Result<Vec<_>, _>>()?,
        (None, Some(path)) => {
            let text = read_file(path)?;
            let data = io::read_matrix(&text, cli.precision_bits).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_INPUT
            })?;
            let MatrixData::Exact(m) = data else {
                eprintln!("error: circulant analysis needs an exact-mode matrix");
                return Err(EXIT_INPUT);
            };
            let c: Vec<Rational> = m.rows().next().expect("matrices are non-empty").to_vec();
            let rebuilt = circulant(&c).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_INPUT
            })?;
            if rebuilt != m {
                eprintln!("error: matrix rows are not the cyclic rotations of the first row");
                return Err(EXIT_INPUT);
            }
            c
        }
        _ => unreachable!("clap enforces exactly one input"),
    };
    let m = circulant(&c).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_INPUT
    })?;
    let class = m.classify_monotone();
    let det = m.determinant();
    let rou = circulant_determinant(&c, cli.precision_bits).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_INPUT
    })?;
    let circ_desc = match classify_circulant(&c) {
        Ok(CirculantClass::Regular) => "regular".to_owned(),
        Ok(CirculantClass::Singular { k, d }) => format!("singular (k = {k}, d = {d})"),
        Err(_) => "n/a (vector not non-increasing)".to_owned(),
    };
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "n": m.size(),
                "class": class.to_string(),
                "circulant_class": circ_desc,
                "determinant_exact": det.to_string(),
                "determinant_product_formula": rou.value.to_decimal_string(20),
                "product_error_bound": rou.error_bound.to_decimal_string(4),
            }))
            .unwrap()
        );
    } else {
        println!("class: {class}");
        println!("circulant classification: {circ_desc}");
        println!("exact determinant: {det}");
        println!(
            "root-of-unity product: {} (error bound {})",
            rou.value.to_decimal_string(20),
            rou.error_bound.to_decimal_string(4)
        );
    }
    Ok(EXIT_OK)
}

fn load_base(cli: &Cli, spec: &str) -> Result<altbase::AltBase, u8> {
    let text = if fs::metadata(spec).is_ok() {
        read_file(spec)?
    } else {
        spec.to_owned()
    };
    io::read_base(&text, cli.precision_bits).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_INPUT
    })
}

fn print_expansion(label: &str, exp: &ExpansionPrefix) {
    let digit_line = exp
        .digits
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(" ");
    println!("{label}{digit_line}");
    if exp.reliability.iter().any(|r| *r != Reliability::Exact) {
        let mut flags = String::new();
        for r in &exp.reliability {
            let c = match r {
                Reliability::Exact => '.',
                Reliability::Guarded => 'g',
                Reliability::Unreliable => '?',
            };
            let _ = write!(flags, "{c} ");
        }
        println!("{}{}", " ".repeat(label.len()), flags.trim_end());
    }
}

fn expansion_json(exp: &ExpansionPrefix) -> serde_json::Value {
    serde_json::json!({
        "digits": exp.digits,
        "reliability": exp.reliability.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        "remainder": exp.remainder.to_decimal_string(12),
        "start_offset": exp.start_offset,
    })
}

fn cmd_expand(cli: &Cli, base_spec: &str, x: &str, digits: usize) -> Result<u8, u8> {
    let base = load_base(cli, base_spec)?;
    let x = Real::parse_decimal(x, cli.precision_bits).map_err(|e| {
        eprintln!("error: cannot parse --x: {e}");
        EXIT_INPUT
    })?;
    match greedy_expand(&base, &x, digits) {
        Ok(exp) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&expansion_json(&exp)).unwrap()
                );
            } else {
                print_expansion("", &exp);
            }
            Ok(EXIT_OK)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Err(EXIT_INPUT)
        }
    }
}

fn cmd_dstar(cli: &Cli, path: &str, digits: usize) -> Result<u8, u8> {
    let list = load_list(path)?;
    let cfg = solver_config(cli);
    let (base, _cert) = solve_base(&list, &cfg).map_err(|e| solver_exit(&e))?;
    let mut expansions = Vec::with_capacity(list.p());
    for l in 0..list.p() {
        match quasi_greedy_unity(&base, l, digits) {
            Ok(exp) => expansions.push(exp),
            Err(e) => {
                eprintln!("error: {e}");
                return Err(EXIT_INTERNAL);
            }
        }
    }
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "betas": io::format_betas(&base),
                "expansions": expansions.iter().map(expansion_json).collect::<Vec<_>>(),
            }))
            .unwrap()
        );
    } else {
        println!("betas: {}", io::format_betas(&base).join(", "));
        for (l, exp) in expansions.iter().enumerate() {
            print_expansion(&format!("d*_{l}: "), exp);
        }
    }
    Ok(EXIT_OK)
}

fn cmd_roundtrip(cli: &Cli, path: &str, digits: usize) -> Result<u8, u8> {
    let list = load_list(path)?;
    let cfg = solver_config(cli);
    let report = roundtrip(&list, digits, &cfg).map_err(|e| solver_exit(&e))?;
    let ok = report.all_match();
    if cli.json {
        let seqs: Vec<_> = report
            .per_seq
            .iter()
            .map(|s| {
                serde_json::json!({
                    "produced": s.produced,
                    "expected": s.expected,
                    "mismatches": s.mismatches,
                    "unreliable": s.unreliable,
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "match": ok,
                "betas": io::format_betas(&report.base),
                "bits_used": report.bits_used,
                "escalations": report.escalations,
                "sequences": seqs,
            }))
            .unwrap()
        );
    } else {
        println!("betas: {}", io::format_betas(&report.base).join(", "));
        for (l, s) in report.per_seq.iter().enumerate() {
            let status = if s.mismatches.is_empty() {
                "match"
            } else {
                "MISMATCH"
            };
            print!("d*_{l}: {status}");
            if !s.mismatches.is_empty() {
                print!(" at {:?}", s.mismatches);
            }
            if !s.unreliable.is_empty() {
                print!(" (unreliable positions {:?})", s.unreliable);
            }
            println!();
        }
        println!(
            "digits: {} per sequence, precision: {} bits, escalations: {}",
            digits, report.bits_used, report.escalations
        );
    }
    Ok(if ok { EXIT_OK } else { EXIT_INVALID })
}

fn cmd_fuzz(cli: &Cli, kind: &str, count: usize) -> Result<u8, u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut violations = 0usize;
    let mut first_counterexample = None;
    match kind {
        "matrix" => {
            for i in 0..count {
                let p = rng.random_range(1..=7usize);
                let strict = i % 2 == 0;
                let m = random_monotone_with(&mut rng, p, strict, 99);
                let class = m.classify_monotone();
                let det = m.determinant();
                let zero = Rational::from_integer(0.into());
                let bad = det < zero || (class.is_strict() && det <= zero);
                if bad {
                    violations += 1;
                    first_counterexample.get_or_insert_with(|| io::write_matrix(&m));
                }
            }
        }
        "parry" => {
            for _ in 0..count {
                let list = random_valid_list(&mut rng, 4, 9, 3, 4);
                let ok = list.validate().is_valid() && list.shift_spot_check(200).is_none();
                if !ok {
                    violations += 1;
                    first_counterexample.get_or_insert_with(|| io::write_parry_list(&list));
                }
            }
        }
        "roundtrip" => {
            let cfg = solver_config(cli);
            for _ in 0..count {
                let list = random_valid_list(&mut rng, 4, 9, 3, 4);
                let ok = match roundtrip(&list, 40, &cfg) {
                    Ok(rep) => rep.all_match(),
                    Err(_) => false,
                };
                if !ok {
                    violations += 1;
                    first_counterexample.get_or_insert_with(|| io::write_parry_list(&list));
                }
            }
        }
        _ => unreachable!("clap restricts the kind"),
    }
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "kind": kind,
                "count": count,
                "seed": cli.seed,
                "violations": violations,
                "counterexample": first_counterexample,
            }))
            .unwrap()
        );
    } else {
        println!(
            "{kind}: {count} instances, {violations} violations (seed {})",
            cli.seed
        );
        if let Some(cx) = &first_counterexample {
            println!("first counterexample:\n{cx}");
        }
    }
    Ok(if violations == 0 {
        EXIT_OK
    } else {
        EXIT_INTERNAL
    })
}
