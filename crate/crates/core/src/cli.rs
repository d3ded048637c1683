//! Command-line front end. Every run writes one JSON object (single points)
//! or one CSV table (curves), each carrying the crate version and the full
//! run configuration.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::pauli::{ChannelParams, NoiseParams};
use crate::purify::{PumpResult, PumpSchedule, Purifier, DOUBLE_PRESETS, SINGLE_PRESETS};
use crate::resource::{
    contour_k, expected_cost_of, mc_retry_cost, shor_gate_count, total_overhead, CostModel, RestartPolicy,
    T_PER_GATE,
};
use crate::threshold::{
    check_ft, contour_infidelity, noise_for, q_values, threshold_curve, PmRule, ThresholdConditions,
};
use crate::ttg::{aggregates, ttg_table, TtgType};
use crate::{verify, VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_DISCREPANCY: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qalu", version, about = "Purification, TTG error and threshold analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pump noisy pairs and report the purified pair and success probabilities.
    Pump(PointArgs),
    /// Error tables of the three TTG types built on the purified pair.
    Ttg(PointArgs),
    /// Topological error model and fault-tolerance check at one point.
    Qvalues(PointArgs),
    /// Threshold gate error over a grid of channel fidelities (CSV).
    ThresholdCurve(CurveArgs),
    /// Pumped-infidelity contours over `(F, p_g = p_M)` (CSV).
    InfidelityContour(ContourArgs),
    /// Expected cost per TTG and total overhead, or fixed-K contours with `--levels`.
    Resource(ResourceArgs),
    /// Run every oracle-equivalence suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
struct Common {
    /// Measurement error: `equal`, `four_fifteenths` or a fixed probability.
    #[arg(long = "pM", default_value = "equal", value_parser = parse_pm)]
    #[serde(rename = "pM", serialize_with = "display")]
    pm: PmRule,
    /// Pumping schedule: `n1,n2` (single) or `n1,m1,m2` (double).
    #[arg(long, default_value = "1,2,2", value_parser = parse_schedule)]
    #[serde(serialize_with = "display")]
    schedule: PumpSchedule,
    /// Output path (default stdout).
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
struct PointArgs {
    /// Channel fidelity.
    #[arg(long = "F")]
    #[serde(rename = "F")]
    f: f64,
    /// Two-qubit gate error probability.
    #[arg(long)]
    pg: f64,
    /// Memory error per time step.
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    /// Waiting steps for memory error.
    #[arg(long, default_value_t = 0)]
    l_wait: u32,
    /// Fault-tolerance margin (1/3 for resource analysis).
    #[arg(long, default_value_t = 1.0)]
    margin: f64,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
struct CurveArgs {
    /// Channel fidelity grid `start:stop:count`, inclusive.
    #[arg(long, default_value = "0.7:1.0:31", value_parser = parse_grid)]
    grid: Grid,
    #[arg(long, default_value_t = 1.0)]
    margin: f64,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
struct ContourArgs {
    /// Channel fidelity grid `start:stop:count`, inclusive.
    #[arg(long, default_value = "0.7:1.0:31", value_parser = parse_grid)]
    grid: Grid,
    /// Infidelity level(s), comma-separated.
    #[arg(long, default_value = "1e-3", value_delimiter = ',')]
    levels: Vec<f64>,
    /// Preset family `single` or `double` instead of `--schedule`.
    #[arg(long)]
    family: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
struct ResourceArgs {
    #[arg(long = "F", default_value_t = 0.9)]
    #[serde(rename = "F")]
    f: f64,
    #[arg(long, default_value_t = 1e-3)]
    pg: f64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    margin: f64,
    /// Charge local gates and measurements as well as base pairs.
    #[arg(long)]
    full: bool,
    /// Restart only the failed level instead of the whole protocol.
    #[arg(long)]
    per_level: bool,
    /// Bits of the number to factor.
    #[arg(long, default_value_t = 1024)]
    n_bits: u64,
    /// Two-qubit gates per logical pi/8 gate.
    #[arg(long, default_value_t = T_PER_GATE)]
    t_per_gate: f64,
    /// Monte Carlo retry trials (0 skips the oracle).
    #[arg(long, default_value_t = 0)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fixed-K contour levels; switches output to CSV.
    #[arg(long, value_delimiter = ',')]
    levels: Vec<f64>,
    /// Gate error grid for contours, `start:stop:count`.
    #[arg(long, default_value = "0.0002:0.002:10", value_parser = parse_grid)]
    grid: Grid,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo retry trials per cost point.
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

/// An inclusive `start:stop:count` grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Grid(pub Vec<f64>);

fn display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn parse_pm(s: &str) -> std::result::Result<PmRule, String> {
    PmRule::from_str(s).map_err(|e| e.to_string())
}

fn parse_schedule(s: &str) -> std::result::Result<PumpSchedule, String> {
    PumpSchedule::from_str(s).map_err(|e| e.to_string())
}

/// `start:stop:count`, inclusive on both ends.
pub fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(format!("grid must be start:stop:count, got {s:?}"));
    };
    let start: f64 = a.trim().parse().map_err(|_| format!("bad grid start {a:?}"))?;
    let stop: f64 = b.trim().parse().map_err(|_| format!("bad grid stop {b:?}"))?;
    let count: usize = n.trim().parse().map_err(|_| format!("bad grid count {n:?}"))?;
    if !(start.is_finite() && stop.is_finite()) || stop < start {
        return Err(format!("grid needs finite start <= stop, got {s:?}"));
    }
    Ok(Grid(match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count).map(|i| if i + 1 == count { stop } else { start + step * i as f64 }).collect()
        }
    }))
}

fn noise(pg: f64, rule: PmRule, eta: f64, l_wait: u32) -> Result<NoiseParams> {
    noise_for(pg, rule)?.with_memory(eta, l_wait)
}

fn pump_point(a: &PointArgs) -> Result<(NoiseParams, PumpResult)> {
    let noise = noise(a.pg, a.common.pm, a.eta, a.l_wait)?;
    let channel = ChannelParams::new(a.f)?;
    let result = Purifier::new(&noise).pump(&channel, a.common.schedule)?;
    Ok((noise, result))
}

fn q_json(q: &crate::threshold::QTuple) -> Value {
    json!({"qa": q.qa, "qb": q.qb, "qc": q.qc, "qab": q.qab, "qac": q.qac, "qbb": q.qbb})
}

fn document(config: &impl Serialize, fields: Vec<(&str, Value)>) -> Result<String> {
    let mut m = Map::new();
    m.insert("version".into(), json!(VERSION));
    m.insert("config".into(), serde_json::to_value(config).map_err(|e| Error::invalid("config", e.to_string()))?);
    for (k, v) in fields {
        m.insert(k.into(), v);
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(m)).map_err(|e| Error::invalid("output", e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv(config: &impl Serialize, header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let cfg = serde_json::to_string(config).map_err(|e| Error::invalid("config", e.to_string()))?;
    let mut s = format!("# qalu {VERSION}\n# config {cfg}\n{}\n", header.join(","));
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    Ok(s)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::invalid("out", format!("{}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::invalid("out", e.to_string())),
    }
}

fn conditions(margin: f64) -> Result<ThresholdConditions> {
    ThresholdConditions::with_margin(margin)
}

fn cmd_pump(a: &PointArgs) -> Result<String> {
    let (_, r) = pump_point(a)?;
    document(
        a,
        vec![
            ("f_bar", json!(r.f_out.as_array())),
            ("success_probs", json!(r.success_probs.to_vec())),
            ("net_success", json!(r.net_success())),
        ],
    )
}

fn cmd_ttg(a: &PointArgs) -> Result<String> {
    let (noise, r) = pump_point(a)?;
    let mut tables = Map::new();
    for kind in TtgType::ALL {
        let t = ttg_table(kind, &r.f_out, &noise);
        let g = aggregates(&t);
        tables.insert(
            kind.to_string(),
            json!({
                "p_bar": t.to_vec(),
                "aggregates": {
                    "p_zx": g.p_zx, "p_zxbar": g.p_zxbar, "p_zbarx": g.p_zbarx,
                    "p_xz": g.p_xz, "p_xzbar": g.p_xzbar, "p_xbarz": g.p_xbarz,
                },
            }),
        );
    }
    document(
        a,
        vec![
            ("f_bar", json!(r.f_out.as_array())),
            ("success_probs", json!(r.success_probs.to_vec())),
            ("ttg", Value::Object(tables)),
        ],
    )
}

fn cmd_qvalues(a: &PointArgs) -> Result<String> {
    let cond = conditions(a.margin)?;
    let (noise, r) = pump_point(a)?;
    let q = q_values(&r.f_out, noise.effective_pg(), noise.p_m);
    document(
        a,
        vec![
            ("f_bar", json!(r.f_out.as_array())),
            ("success_probs", json!(r.success_probs.to_vec())),
            ("q", q_json(&q)),
            ("check_ft", json!(check_ft(&q, &cond))),
        ],
    )
}

fn cmd_threshold_curve(a: &CurveArgs) -> Result<String> {
    let cond = conditions(a.margin)?;
    let curve = threshold_curve(a.common.schedule, &a.grid.0, a.common.pm, &cond);
    let mut rows = Vec::with_capacity(curve.len());
    for (f, r) in curve {
        match r {
            Ok(p) => rows.push(vec![num(f), num(p), "ok".into()]),
            Err(Error::NonMonotone { .. }) => rows.push(vec![num(f), "nan".into(), "non_monotone".into()]),
            Err(e) => return Err(e),
        }
    }
    csv(a, &["F", "pg_threshold", "status"], &rows)
}

fn cmd_infidelity_contour(a: &ContourArgs) -> Result<String> {
    let family: Vec<PumpSchedule> = match a.family.as_deref() {
        None => vec![a.common.schedule],
        Some("single") => SINGLE_PRESETS.to_vec(),
        Some("double") => DOUBLE_PRESETS.to_vec(),
        Some(other) => return Err(Error::invalid("family", format!("expected single or double, got {other:?}"))),
    };
    let mut rows = Vec::new();
    for &level in &a.levels {
        for c in contour_infidelity(&family, level, &a.grid.0, a.common.pm)? {
            for (f, p) in &c.points {
                rows.push(vec![c.schedule.to_string().replace(',', ";"), num(level), num(*f), num(*p)]);
            }
        }
    }
    csv(a, &["schedule", "level", "F", "p_g"], &rows)
}

fn cost_model(a: &ResourceArgs) -> CostModel {
    let base = if a.full { CostModel::full() } else { CostModel::default() };
    CostModel {
        policy: if a.per_level { RestartPolicy::PerLevel } else { RestartPolicy::AllOrNothing },
        ..base
    }
}

fn cmd_resource(a: &ResourceArgs) -> Result<(String, bool)> {
    let model = cost_model(a);
    if !a.levels.is_empty() {
        let curves = contour_k(a.common.schedule, &a.levels, &a.grid.0, a.common.pm, &model)?;
        let rows: Vec<Vec<String>> = curves
            .iter()
            .flat_map(|c| c.points.iter().map(move |&(f, p)| vec![num(c.level), num(f), num(p)]))
            .collect();
        return Ok((csv(a, &["K", "F", "p_g"], &rows)?, true));
    }
    let cond = conditions(a.margin)?;
    let noise = noise_for(a.pg, a.common.pm)?;
    let result = Purifier::new(&noise).pump(&ChannelParams::new(a.f)?, a.common.schedule)?;
    let q = q_values(&result.f_out, noise.effective_pg(), noise.p_m);
    let k = expected_cost_of(&result, &model)?;
    let shor = shor_gate_count(a.n_bits)?;
    let report = total_overhead(k, a.t_per_gate, shor.omega)?;
    let mut fields = vec![
        ("f_bar", json!(result.f_out.as_array())),
        ("success_probs", json!(result.success_probs.to_vec())),
        ("q", q_json(&q)),
        ("check_ft", json!(check_ft(&q, &cond))),
        ("K", json!(report.k)),
        ("T", json!(report.t)),
        ("Omega", json!(report.omega)),
        ("toffoli", json!(shor.toffoli)),
        ("R", json!(report.r)),
    ];
    let mut consistent = true;
    if a.trials > 0 {
        let mc = mc_retry_cost(&result, &model, a.trials, a.seed)?;
        let dev = ((mc - k) / k).abs();
        consistent = dev <= 0.02;
        fields.push(("K_monte_carlo", json!(mc)));
        fields.push(("K_relative_deviation", json!(dev)));
    }
    Ok((document(a, fields)?, consistent))
}

fn cmd_verify(a: &VerifyArgs) -> Result<(String, bool)> {
    let reports = verify::run_all(a.seed, a.trials)?;
    let mut text = String::new();
    for r in &reports {
        text.push_str(&format!(
            "{} {} ({} cases, deviation {:e}, tolerance {:e})\n",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.cases,
            r.deviation,
            r.tolerance
        ));
    }
    Ok((text, reports.iter().all(|r| r.passed)))
}

fn dispatch(cli: Cli) -> Result<i32> {
    let (text, out, consistent) = match &cli.command {
        Command::Pump(a) => (cmd_pump(a)?, &a.common.out, true),
        Command::Ttg(a) => (cmd_ttg(a)?, &a.common.out, true),
        Command::Qvalues(a) => (cmd_qvalues(a)?, &a.common.out, true),
        Command::ThresholdCurve(a) => (cmd_threshold_curve(a)?, &a.common.out, true),
        Command::InfidelityContour(a) => (cmd_infidelity_contour(a)?, &a.common.out, true),
        Command::Resource(a) => {
            let (t, ok) = cmd_resource(a)?;
            (t, &a.common.out, ok)
        }
        Command::Verify(a) => {
            let (t, ok) = cmd_verify(a)?;
            (t, &a.out, ok)
        }
    };
    emit(out, &text)?;
    Ok(if consistent { EXIT_OK } else { EXIT_DISCREPANCY })
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Discrepancy { .. } | Error::NonMonotone { .. } => EXIT_DISCREPANCY,
                _ => EXIT_INVALID,
            }
        }
    }
}
