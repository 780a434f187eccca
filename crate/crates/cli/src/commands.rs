use std::fs;
use std::path::{Path, PathBuf};

use crnreal::compiler::{
    auto_speed_up, compile_algebraic, compile_expression, compile_poly_root, compile_rational_value,
    parse_expression, speed_up, transcendental_construction, SpeedupOptions,
};
use crnreal::exact::{parse_rational, parse_rational_or_decimal, to_f64};
use crnreal::parser::ParsedCrn;
use crnreal::poly::{parse_polynomial, Interval};
use crnreal::sim::{
    check_boundedness, check_convergence, integrate, trajectory_to_csv, trajectory_to_json, IntegratorOptions, SimError,
    Trajectory,
};
use crnreal::stability::{check_exponential_stability, find_fixed_point, Verdict};
use crnreal::{parse_crn, SignedProgram};
use serde_json::{json, Value};

use crate::manifest::{manifest_path, write_with_manifest, RunManifest};
use crate::{AnalyzeArgs, CompileArgs, Format, SimulateArgs, Tolerances, VerifyArgs};

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_INTEGRATION: u8 = 3;
pub const EXIT_VERIFY: u8 = 4;
pub const EXIT_STABILITY: u8 = 5;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        Self::new(EXIT_INPUT, message)
    }
}

type CmdResult = Result<(), Failure>;

fn parse_number(flag: &str, text: &str) -> Result<f64, Failure> {
    let r = parse_rational_or_decimal(text).ok_or_else(|| Failure::input(format!("--{flag}: cannot parse {text:?}")))?;
    Ok(to_f64(&r))
}

fn parse_positive(flag: &str, text: &str) -> Result<f64, Failure> {
    let v = parse_number(flag, text)?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::input(format!("--{flag} must be positive, got {text}")))
    }
}

fn integrator_options(t: &Tolerances) -> Result<IntegratorOptions<f64>, Failure> {
    Ok(IntegratorOptions::with_tolerances(
        parse_positive("rel-tol", &t.rel_tol)?,
        parse_positive("abs-tol", &t.abs_tol)?,
    ))
}

fn read_crn(path: &Path) -> Result<ParsedCrn, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    parse_crn(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::input(format!("cannot write {}: {e}", path.display()))
}

fn simulate_from_zero(crn: &crnreal::Crn, t_end: f64, opts: &IntegratorOptions<f64>) -> Result<Trajectory<f64>, SimError> {
    integrate(crn, &vec![0.0; crn.num_species()], t_end, opts)
}

fn polynomial_source(text: &str) -> Result<String, Failure> {
    let path = PathBuf::from(text);
    if path.is_file() {
        fs::read_to_string(&path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
    } else {
        Ok(text.to_string())
    }
}

fn parse_interval(text: &str) -> Result<Interval, Failure> {
    let (lo, hi) = text
        .split_once(',')
        .ok_or_else(|| Failure::input(format!("--interval expects lo,hi, got {text:?}")))?;
    let lo = parse_rational(lo).ok_or_else(|| Failure::input(format!("--interval: bad bound {lo:?}")))?;
    let hi = parse_rational(hi).ok_or_else(|| Failure::input(format!("--interval: bad bound {hi:?}")))?;
    Interval::new(lo, hi).map_err(|e| Failure::input(format!("--interval: {e}")))
}

fn build_program(args: &CompileArgs) -> Result<(SignedProgram, Value), Failure> {
    let src = &args.source;
    let compile_err = |e: crnreal::CompileError| Failure::input(e.to_string());
    if let Some(r) = &src.rational {
        let q = parse_rational(r).ok_or_else(|| Failure::input(format!("--rational expects n/d, got {r:?}")))?;
        Ok((compile_rational_value(&q).map_err(compile_err)?, json!({ "rational": r })))
    } else if let Some(p) = &src.poly {
        let text = polynomial_source(p)?;
        let poly = parse_polynomial(text.trim()).map_err(|e| Failure::input(e.to_string()))?;
        let program = match &args.interval {
            Some(iv) => compile_algebraic(&poly, &parse_interval(iv)?),
            None => compile_poly_root(&poly),
        }
        .map_err(compile_err)?;
        Ok((program, json!({ "poly": text.trim(), "interval": args.interval })))
    } else if let Some(e) = &src.expr {
        let parsed = parse_expression(e).map_err(compile_err)?;
        Ok((compile_expression(&parsed).map_err(compile_err)?, json!({ "expr": e })))
    } else {
        Ok((transcendental_construction(), json!({ "transcendental": true })))
    }
}

pub fn compile(args: &CompileArgs) -> CmdResult {
    let (program, inputs) = build_program(args)?;
    let mut certificate = None;
    let program = match args.speedup.as_deref() {
        None => program,
        Some("auto") => {
            let (fast, cert) = auto_speed_up(&program, &SpeedupOptions::default())
                .map_err(|e| Failure::new(EXIT_VERIFY, format!("speed-up: {e}")))?;
            certificate = Some(cert);
            fast
        }
        Some(n) => {
            let factor: u64 = n
                .parse()
                .ok()
                .filter(|&f| f >= 1)
                .ok_or_else(|| Failure::input(format!("--speedup expects auto or a positive integer, got {n:?}")))?;
            speed_up(&program, factor).map_err(|e| Failure::input(e.to_string()))?
        }
    };
    let text = program.to_crn_text();
    let summary = format!(
        "species: {}\nreactions: {}\ndesignated: {}\nsign: {}\nclaimed limit: {} = {:.12}\nspeedup: {}",
        program.crn().num_species(),
        program.crn().reactions().len(),
        program.designated_name(),
        program.sign(),
        program.limit(),
        program.value_f64(),
        program.speedup(),
    );
    match &args.out {
        None => {
            print!("{text}");
            eprintln!("{summary}");
        }
        Some(out) => {
            let mut manifest = RunManifest::new("compile", inputs, json!({ "speedup": args.speedup }));
            manifest.result = Some(json!({ "program": program.manifest(), "speedup_certificate": certificate }));
            write_with_manifest(out, text.as_bytes(), manifest).map_err(|e| io_failure(out, e))?;
            println!("{summary}");
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

pub fn simulate(args: &SimulateArgs) -> CmdResult {
    let parsed = read_crn(&args.crn_file)?;
    let t_end = parse_positive("t-end", &args.t_end)?;
    let opts = integrator_options(&args.tolerances)?;
    let traj = simulate_from_zero(&parsed.crn, t_end, &opts).map_err(|e| Failure::new(EXIT_INTEGRATION, e.to_string()))?;
    let body = match args.format {
        Format::Csv => trajectory_to_csv(&traj),
        Format::Json => trajectory_to_json(&traj).map_err(|e| Failure::input(e.to_string()))?,
    };
    match &args.out {
        None => print!("{body}"),
        Some(out) => {
            let mut manifest = RunManifest::new(
                "simulate",
                json!({ "crn_file": args.crn_file.display().to_string() }),
                json!({
                    "t_end": args.t_end,
                    "rel_tol": args.tolerances.rel_tol,
                    "abs_tol": args.tolerances.abs_tol,
                    "format": format!("{:?}", args.format).to_lowercase(),
                }),
            );
            manifest.result = Some(json!({ "samples": traj.len(), "stats": traj.stats() }));
            write_with_manifest(out, body.as_bytes(), manifest).map_err(|e| io_failure(out, e))?;
            eprintln!("wrote {} samples to {}", traj.len(), out.display());
        }
    }
    Ok(())
}

fn manifest_target(crn_file: &Path) -> Result<f64, Failure> {
    let path = manifest_path(crn_file);
    let text = fs::read_to_string(&path)
        .map_err(|e| Failure::input(format!("--target manifest: cannot read {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    v.pointer("/result/program/claimed_value")
        .and_then(Value::as_f64)
        .map(f64::abs)
        .ok_or_else(|| Failure::input(format!("{} has no claimed value", path.display())))
}

fn parse_target(text: &str, crn_file: &Path) -> Result<f64, Failure> {
    if text == "manifest" {
        return manifest_target(crn_file);
    }
    if let Some(r) = parse_rational_or_decimal(text) {
        return Ok(to_f64(&r).abs());
    }
    let e = parse_expression(text).map_err(|e| Failure::input(format!("--target: {e}")))?;
    let p = compile_expression(&e).map_err(|e| Failure::input(format!("--target: {e}")))?;
    Ok(p.value_f64().abs())
}

pub fn verify(args: &VerifyArgs) -> CmdResult {
    let parsed = read_crn(&args.crn_file)?;
    let designated = parsed
        .designated
        .ok_or_else(|| Failure::input("the network has no designated species"))?;
    let name = parsed.crn.species()[designated].as_str().to_string();
    let target = parse_target(&args.target, &args.crn_file)?;
    let t_end = parse_positive("t-end", &args.t_end)?;
    if t_end < 1.0 {
        return Err(Failure::input("--t-end must be at least 1"));
    }
    let opts = integrator_options(&args.tolerances)?;

    let mut failed = Vec::new();
    let integrality = parsed.crn.validate_integral();
    if integrality.is_integral() {
        println!("integrality: pass");
    } else {
        let list: Vec<String> = integrality
            .violations
            .iter()
            .map(|(i, k)| format!("reaction {i} has rate {k}"))
            .collect();
        println!("integrality: FAIL ({})", list.join(", "));
        failed.push("integrality".to_string());
    }

    let traj = match simulate_from_zero(&parsed.crn, t_end, &opts) {
        Ok(t) => t,
        Err(e @ SimError::Unbounded { .. }) => {
            println!("boundedness: FAIL ({e})");
            failed.push("boundedness".to_string());
            println!("convergence: not checked");
            return Err(Failure::new(EXIT_VERIFY, format!("verification failed: {}", failed.join(", "))));
        }
        Err(e) => return Err(Failure::new(EXIT_INTEGRATION, e.to_string())),
    };
    let beta = check_boundedness(&traj);
    println!("boundedness: pass (beta_observed = {beta:.6})");

    let report = check_convergence(&traj, &name, target).map_err(|e| Failure::input(e.to_string()))?;
    match report.first_failure {
        None if report.pass => println!(
            "convergence: pass ({} samples in [1, {t_end}], target {target:.12}, final error {:.3e})",
            report.samples.len(),
            report.samples.last().map_or(0.0, |s| s.error)
        ),
        first => {
            let at = first.map_or("unknown".to_string(), |t| format!("{t:.4}"));
            println!("convergence: FAIL (first failing t = {at}, target {target:.12})");
            failed.push(format!("convergence (first failing t = {at})"));
        }
    }
    if let Some(g) = report.empirical_gamma.filter(|g| *g > 0.0) {
        println!("empirical decay rate: {g:.6}");
    }

    if let Some(out) = &args.out {
        let body = serde_json::to_string_pretty(&report).map_err(|e| Failure::input(e.to_string()))?;
        let mut manifest = RunManifest::new(
            "verify",
            json!({ "crn_file": args.crn_file.display().to_string(), "target": args.target }),
            json!({
                "t_end": args.t_end,
                "rel_tol": args.tolerances.rel_tol,
                "abs_tol": args.tolerances.abs_tol,
            }),
        );
        manifest.result = Some(json!({ "failed": failed }));
        write_with_manifest(out, body.as_bytes(), manifest).map_err(|e| io_failure(out, e))?;
    }

    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(EXIT_VERIFY, format!("verification failed: {}", failed.join(", "))))
    }
}

pub fn analyze(args: &AnalyzeArgs) -> CmdResult {
    let parsed = read_crn(&args.crn_file)?;
    let t_end = parse_positive("t-end", &args.t_end)?;
    let margin = parse_positive("margin", &args.margin)?;
    let traj = simulate_from_zero(&parsed.crn, t_end, &IntegratorOptions::default())
        .map_err(|e| Failure::new(EXIT_INTEGRATION, e.to_string()))?;
    let z = find_fixed_point(&parsed.crn, traj.final_state(), 1e-12)
        .map_err(|e| Failure::new(EXIT_STABILITY, format!("verdict: inconclusive ({e})")))?;
    let report = check_exponential_stability(&parsed.crn, &z, margin)
        .map_err(|e| Failure::new(EXIT_STABILITY, format!("verdict: inconclusive ({e})")))?;
    let body = serde_json::to_string_pretty(&report).map_err(|e| Failure::input(e.to_string()))?;
    println!("{body}");
    if let Some(out) = &args.out {
        let mut manifest = RunManifest::new(
            "analyze",
            json!({ "crn_file": args.crn_file.display().to_string() }),
            json!({ "t_end": args.t_end, "margin": args.margin }),
        );
        manifest.result = Some(json!({ "verdict": report.verdict }));
        write_with_manifest(out, body.as_bytes(), manifest).map_err(|e| io_failure(out, e))?;
    }
    match report.verdict {
        Verdict::ExponentiallyStable => Ok(()),
        v => {
            let name = serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
            Err(Failure::new(
                EXIT_STABILITY,
                format!("verdict: {name} (max real part {:.3e})", report.max_real_part),
            ))
        }
    }
}
