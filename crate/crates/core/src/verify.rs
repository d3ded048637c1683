//! Oracle-equivalence suites: each pits a production route against an
//! independent evaluation on seeded random inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::pauli::{depolarizing_noise, ChannelParams, FidelityVector, NoiseConvention, NoiseParams};
use crate::purify::{extract_tensor_d, extract_tensor_s, oracle, PumpSchedule, Purifier};
use crate::resource::{expected_cost_of, mc_retry_cost, CostModel};
use crate::threshold::{q_values, q_values_generic};
use crate::ttg::{circuit::circuit_table, ttg_table, GateAggregates, TtgType, ORACLE_TOL};

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    /// Largest observed deviation (absolute, or relative for cost suites).
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl SuiteReport {
    fn new(name: &'static str, cases: usize, deviation: f64, tolerance: f64) -> Self {
        SuiteReport {
            name,
            cases,
            deviation,
            tolerance,
            passed: deviation <= tolerance,
        }
    }
}

/// A random distribution with every entry in use.
pub fn random_vector(rng: &mut ChaCha8Rng) -> FidelityVector {
    let raw: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>() + 1e-3);
    FidelityVector::normalize(raw, "random vector").expect("positive weights").0
}

/// A random gate table with total error up to 0.2 and `p_M` up to 0.1.
pub fn random_noise(rng: &mut ChaCha8Rng) -> NoiseParams {
    let p_g = 0.2 * rng.random::<f64>();
    let mut table = [[0.0; 4]; 4];
    let raw: Vec<f64> = (0..15).map(|_| rng.random::<f64>()).collect();
    let sum: f64 = raw.iter().sum();
    for (n, w) in raw.into_iter().enumerate() {
        let cell = n + 1;
        table[cell / 4][cell % 4] = p_g * w / sum;
    }
    table[0][0] = 1.0 - table.iter().flatten().sum::<f64>();
    NoiseParams::from_table(table, 0.1 * rng.random::<f64>()).expect("valid random table")
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Single-selection tensor contraction versus exhaustive enumeration.
pub fn purify_single(cases: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dev: f64 = 0.0;
    for _ in 0..cases {
        let noise = random_noise(&mut rng);
        let (f, g) = (random_vector(&mut rng), random_vector(&mut rng));
        let a = extract_tensor_s(&noise).apply(&f, &g);
        let b = oracle::enumerate_single(&f, &g, &noise);
        dev = dev.max(max_dev(&a, &b));
    }
    SuiteReport::new("purify single selection vs enumeration", cases, dev, 1e-12)
}

/// Double-selection tensor contraction versus exhaustive enumeration.
pub fn purify_double(cases: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dev: f64 = 0.0;
    let mut models = None;
    for n in 0..cases {
        // Enumeration is costly, so each noise model serves five inputs.
        if n % 5 == 0 {
            let noise = random_noise(&mut rng);
            models = Some((extract_tensor_d(&noise), oracle::double_transition(&noise)));
        }
        let (d, t) = models.as_ref().expect("set on the first case");
        let (f, g, h) = (random_vector(&mut rng), random_vector(&mut rng), random_vector(&mut rng));
        dev = dev.max(max_dev(&d.apply(&f, &g, &h), &oracle::contract4(t, &f, &g, &h)));
    }
    SuiteReport::new("purify double selection vs enumeration", cases, dev, 1e-12)
}

fn small_vector(rng: &mut ChaCha8Rng) -> FidelityVector {
    let e: [f64; 3] = std::array::from_fn(|_| 1e-2 * rng.random::<f64>());
    FidelityVector::new([1.0 - e.iter().sum::<f64>(), e[0], e[1], e[2]]).expect("small errors")
}

fn small_noise(rng: &mut ChaCha8Rng) -> NoiseParams {
    let mut table = [[0.0; 4]; 4];
    for (n, row) in table.iter_mut().enumerate() {
        for (m, x) in row.iter_mut().enumerate() {
            if (n, m) != (0, 0) {
                *x = 1e-3 * rng.random::<f64>();
            }
        }
    }
    table[0][0] = 1.0 - table.iter().flatten().sum::<f64>();
    NoiseParams::from_table(table, 1e-2 * rng.random::<f64>()).expect("valid random table")
}

/// TTG closed-form tables versus the circuit oracle, per type.
pub fn ttg_tables(cases: usize, seed: u64) -> Vec<SuiteReport> {
    TtgType::ALL
        .iter()
        .enumerate()
        .map(|(n, &kind)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(n as u64));
            let mut dev: f64 = 0.0;
            for _ in 0..cases {
                let (f, noise) = (small_vector(&mut rng), small_noise(&mut rng));
                dev = dev.max(ttg_table(kind, &f, &noise).max_abs_diff(&circuit_table(kind, &f, &noise)));
            }
            let name = match kind {
                TtgType::I => "ttg type I closed form vs circuit",
                TtgType::II => "ttg type II closed form vs circuit",
                TtgType::III => "ttg type III closed form vs circuit",
            };
            SuiteReport::new(name, cases, dev, ORACLE_TOL)
        })
        .collect()
}

/// Closed-form error model versus the generic sums over uniform-convention aggregates.
pub fn q_routes(cases: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dev: f64 = 0.0;
    for _ in 0..cases {
        let f = small_vector(&mut rng);
        let (p_g, p_m) = (1e-2 * rng.random::<f64>(), 1e-2 * rng.random::<f64>());
        let per_gate: [GateAggregates; 8] = std::array::from_fn(|i| {
            TtgType::for_position(i + 1).expect("position in range").uniform_aggregates(&f, p_g, p_m)
        });
        let a = q_values(&f, p_g, p_m).to_vec();
        let b = q_values_generic(&per_gate, 0.0, p_m).to_vec();
        dev = dev.max(max_dev(&a, &b));
    }
    SuiteReport::new("q closed form vs generic sums", cases, dev, 1e-15)
}

/// Closed-form expected cost versus the Monte Carlo retry process; the first
/// point is the `F = 0.9`, `p = 1e-3`, `(1,2,2)` operating point.
pub fn cost_monte_carlo(points: usize, trials: u64, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let schedule = PumpSchedule::double(1, 2, 2);
    let model = CostModel::default();
    let mut dev: f64 = 0.0;
    for n in 0..points {
        let (f, p) = if n == 0 {
            (0.9, 1e-3)
        } else {
            (0.85 + 0.1 * rng.random::<f64>(), 5e-4 + 1e-3 * rng.random::<f64>())
        };
        let noise = depolarizing_noise(p, p, NoiseConvention::Uniform)?;
        let result = Purifier::new(&noise).pump(&ChannelParams::new(f)?, schedule)?;
        let k = expected_cost_of(&result, &model)?;
        let mc = mc_retry_cost(&result, &model, trials, seed.wrapping_add(n as u64))?;
        dev = dev.max(((mc - k) / k).abs());
    }
    Ok(SuiteReport::new("expected cost vs Monte Carlo retries", points, dev, 0.02))
}

/// Every suite with its standard case counts.
pub fn run_all(seed: u64, trials: u64) -> Result<Vec<SuiteReport>> {
    let mut out = vec![purify_single(50, seed), purify_double(50, seed.wrapping_add(1))];
    out.extend(ttg_tables(50, seed.wrapping_add(2)));
    out.push(q_routes(20, seed.wrapping_add(5)));
    out.push(cost_monte_carlo(5, trials, seed.wrapping_add(6))?);
    Ok(out)
}
