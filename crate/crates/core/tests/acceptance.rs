//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::panic;

use qalu::pauli::depolarizing_noise;
use qalu::purify::Purifier;
use qalu::resource::{expected_cost_of, mc_retry_cost, shor_gate_count, total_overhead, CostModel, T_PER_GATE};
use qalu::threshold::{
    check_ft, passes, q_values, raussendorf_baseline, threshold_curve, threshold_pg, PmRule, QTuple,
    ThresholdConditions, BISECTION_TOL,
};
use qalu::verify;
use qalu::{ChannelParams, FidelityVector, NoiseConvention, PumpSchedule};

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn pumped_q(f: f64, p: f64, schedule: PumpSchedule) -> (FidelityVector, QTuple) {
    let noise = depolarizing_noise(p, p, NoiseConvention::Uniform).unwrap();
    let r = Purifier::new(&noise).pump(&ChannelParams::new(f).unwrap(), schedule).unwrap();
    (r.f_out, q_values(&r.f_out, p, p))
}

fn leading_order_fidelity() -> Outcome {
    let p = 1e-4;
    let (f, _) = pumped_q(1.0, p, PumpSchedule::double(1, 2, 2));
    let got = &f.as_array()[1..];
    let coeff: Vec<f64> = got.iter().map(|x| x / (p / 15.0)).collect();
    let ok = coeff.iter().zip([4.0, 2.0, 2.0]).all(|(c, w)| ((c - w) / w).abs() <= 0.15);
    ensure(ok, format!("F_bar / (p_g/15) = ({:.4}, {:.4}, {:.4}), expected (4, 2, 2) within 15%", coeff[0], coeff[1], coeff[2]))
}

fn local_operation_threshold() -> Outcome {
    let cond = ThresholdConditions::standard();
    let s = PumpSchedule::double(1, 2, 2);
    let equal = threshold_pg(1.0, s, PmRule::Equal, &cond).map_err(|e| e.to_string())?;
    let ff = threshold_pg(1.0, s, PmRule::FourFifteenths, &cond).map_err(|e| e.to_string())?;
    let ok = (equal - 0.0026).abs() <= 1e-4 && (ff - 0.0050).abs() <= 1e-4;
    ensure(ok, format!("p_M = p_g: {equal:.6}; p_M = 4p_g/15: {ff:.6}"))
}

fn baseline_regression() -> Outcome {
    let q = raussendorf_baseline(0.0075);
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    let unit = raussendorf_baseline(15.0);
    let coeff = [unit.qa, unit.qb, unit.qc, unit.qab, unit.qac, unit.qbb];
    let ok = rel(q.qa, 0.023) <= 1e-15
        && rel(q.qab, 0.0040) <= 1e-15
        && coeff == [46.0, 44.0, 44.0, 8.0, 8.0, 8.0];
    ensure(ok, format!("qa = {:e}, qab = {:e}, coefficients x15/p_g = {coeff:?}", q.qa, q.qab))
}

fn noisy_channel_margin_one() -> Outcome {
    let (_, q) = pumped_q(0.7, 1e-3, PumpSchedule::double(3, 4, 14));
    let ok = check_ft(&q, &ThresholdConditions::standard());
    ensure(ok, format!("F = 0.7, (3,4,14): qa = {:.5}, qb = {:.5}, qc = {:.5}, qcor = {:.5}", q.qa, q.qb, q.qc, q.q_cor()))
}

fn noisy_channel_margin_third() -> Outcome {
    let (_, q) = pumped_q(0.9, 1e-3, PumpSchedule::double(1, 2, 2));
    let cond = ThresholdConditions::with_margin(1.0 / 3.0).unwrap();
    let ok = check_ft(&q, &cond);
    ensure(
        ok,
        format!(
            "F = 0.9, (1,2,2), margin 1/3: qa = {:.5} < {:.5}, qb = {:.5} < {:.5}, qcor = {:.6} < {:.6}",
            q.qa,
            cond.margin * cond.qa_max,
            q.qb,
            cond.margin * cond.qbc_max,
            q.q_cor(),
            cond.margin * cond.qcor_max
        ),
    )
}

fn resource_figure() -> Outcome {
    let noise = depolarizing_noise(1e-3, 1e-3, NoiseConvention::Uniform).unwrap();
    let r = Purifier::new(&noise)
        .pump(&ChannelParams::new(0.9).unwrap(), PumpSchedule::double(1, 2, 2))
        .unwrap();
    let model = CostModel::default();
    let k = expected_cost_of(&r, &model).map_err(|e| e.to_string())?;
    let mc = mc_retry_cost(&r, &model, 1_000_000, 2024).map_err(|e| e.to_string())?;
    let dev = ((mc - k) / k).abs();
    let ok = (25.0..=60.0).contains(&k) && dev <= 0.02;
    ensure(ok, format!("K = {k:.3} (band [25, 60]); Monte Carlo {mc:.3}, deviation {:.3}%", 100.0 * dev))
}

fn overhead_arithmetic() -> Outcome {
    let omega = shor_gate_count(1024).map_err(|e| e.to_string())?.omega;
    let rep = total_overhead(40.0, T_PER_GATE, 3e11).map_err(|e| e.to_string())?;
    let ok = (omega / 1e11 * 10.0).round() == 32.0 && rep.t == 6e21 && rep.r == 2.4e23;
    ensure(ok, format!("Omega(1024) = {omega:e}, T = {:e}, R = {:e}", rep.t, rep.r))
}

fn oracle_equivalence() -> Outcome {
    let mut reports = vec![verify::purify_single(50, 101), verify::purify_double(50, 202)];
    reports.extend(verify::ttg_tables(50, 303));
    let worst = reports.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    ensure(failed.is_empty(), format!("{} suites, max deviation {worst:e}, failing: {failed:?}", reports.len()))
}

fn invariant_suite() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;

    let routes = verify::q_routes(20, 404);
    ok &= routes.passed;
    notes.push(format!("q routes {:e}", routes.deviation));

    let noise = depolarizing_noise(0.0, 0.0, NoiseConvention::Uniform).unwrap();
    let perfect = Purifier::new(&noise).pump(&ChannelParams::new(1.0).unwrap(), PumpSchedule::double(3, 4, 14)).unwrap();
    let fixed = perfect.f_out == FidelityVector::PERFECT && perfect.net_success() == 1.0;
    ok &= fixed;
    notes.push(format!("noiseless fixed point {fixed}"));

    let (f, _) = pumped_q(0.9, 1e-3, PumpSchedule::double(1, 2, 2));
    let pumps = f.infidelity() < 0.1 && (f.as_array().iter().sum::<f64>() - 1.0).abs() < 1e-12;
    ok &= pumps;
    notes.push(format!("pumping improves F=0.9 {pumps}"));

    let schedule = PumpSchedule::double(3, 4, 14);
    let cond = ThresholdConditions::standard();
    let grid: Vec<f64> = (0..=6).map(|i| 0.7 + 0.05 * i as f64).collect();
    let curve = threshold_curve(schedule, &grid, PmRule::Equal, &cond);
    let values: Vec<f64> = curve.iter().filter_map(|(_, r)| r.as_ref().ok().copied()).collect();
    let monotone = values.len() == grid.len() && values.windows(2).all(|w| w[0] <= w[1]);
    ok &= monotone;
    notes.push(format!("threshold non-increasing as F falls {monotone}"));

    let bracketed = grid.iter().zip(&values).all(|(&f, &p)| {
        let ch = ChannelParams::new(f).unwrap();
        passes(&ch, schedule, p * (1.0 - 2.0 * BISECTION_TOL), PmRule::Equal, &cond).unwrap_or(false)
            && !passes(&ch, schedule, p * (1.0 + 2.0 * BISECTION_TOL), PmRule::Equal, &cond).unwrap_or(true)
    });
    ok &= bracketed;
    notes.push(format!("curve points bracket thresholds {bracketed}"));

    let model = CostModel::default();
    let ks: Vec<f64> = [0.95, 0.9, 0.85, 0.8]
        .iter()
        .map(|&f| {
            let noise = depolarizing_noise(1e-3, 1e-3, NoiseConvention::Uniform).unwrap();
            let r = Purifier::new(&noise).pump(&ChannelParams::new(f).unwrap(), PumpSchedule::double(1, 2, 2)).unwrap();
            expected_cost_of(&r, &model).unwrap()
        })
        .collect();
    let k_rises = ks.windows(2).all(|w| w[1] > w[0]);
    ok &= k_rises;
    notes.push(format!("K rises as F falls {k_rises}"));

    ensure(ok, notes.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("leading-order purified fidelity", leading_order_fidelity),
        ("local-operation threshold", local_operation_threshold),
        ("monolithic baseline regression", baseline_regression),
        ("noisy channel F=0.7 at margin 1", noisy_channel_margin_one),
        ("noisy channel F=0.9 at margin 1/3", noisy_channel_margin_third),
        ("expected cost and retry oracle", resource_figure),
        ("overhead arithmetic", overhead_arithmetic),
        ("oracle equivalence", oracle_equivalence),
        ("invariant suite", invariant_suite),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let outcome = panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
