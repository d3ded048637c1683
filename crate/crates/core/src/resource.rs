//! Expected cost per teleported gate, total overhead and factoring gate counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{ChannelParams, NoiseParams};
use crate::purify::{OpCounts, PumpResult, PumpSchedule, Purifier};
use crate::threshold::{noise_for, PmRule};

/// Physical two-qubit gates per logical π/8 gate at one third of the
/// topological threshold, taken from the monolithic scheme's overhead curve.
pub const T_PER_GATE: f64 = 2e10;

/// Local operations of the TTG itself.
pub const TTG_OPS: OpCounts = OpCounts::new(0, 2, 2);

/// Independent random streams used by the Monte Carlo retry oracle.
const MC_STREAMS: u64 = 16;

/// What happens when a postselection check fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RestartPolicy {
    /// Discard everything and start the whole protocol again.
    #[default]
    AllOrNothing,
    /// Redo only the level whose check failed.
    PerLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    pub two_qubit_gate: f64,
    pub measurement: f64,
    pub base_pair: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        CostWeights {
            two_qubit_gate: 1.0,
            measurement: 1.0,
            base_pair: 1.0,
        }
    }
}

/// What an attempt is charged for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub count_base_pairs: bool,
    pub count_local_ops: bool,
    pub weights: CostWeights,
    pub policy: RestartPolicy,
}

impl Default for CostModel {
    /// Counts initial pairs only, all-or-nothing restarts.
    fn default() -> Self {
        CostModel {
            count_base_pairs: true,
            count_local_ops: false,
            weights: CostWeights::default(),
            policy: RestartPolicy::AllOrNothing,
        }
    }
}

impl CostModel {
    /// Base pairs, gates and measurements all charged.
    pub fn full() -> Self {
        CostModel {
            count_local_ops: true,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let w = &self.weights;
        if [w.two_qubit_gate, w.measurement, w.base_pair].iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::invalid("weights", "cost weights must be finite and non-negative"));
        }
        Ok(())
    }

    /// Weighted cost of a bundle of operations.
    pub fn weigh(&self, ops: OpCounts) -> f64 {
        let w = &self.weights;
        let mut c = 0.0;
        if self.count_base_pairs {
            c += w.base_pair * ops.base_pairs as f64;
        }
        if self.count_local_ops {
            c += w.two_qubit_gate * ops.two_qubit_gates as f64 + w.measurement * ops.measurements as f64;
        }
        c
    }
}

/// Per-level pieces of an attempt for the level-by-level restart policy.
struct Levels {
    /// Cost and success of one ancilla (level-1 single-pumped) pair.
    ancilla: (f64, f64),
    /// Cost and success of the level-1 target.
    target: (f64, f64),
    /// Extra cost of the level-2 rounds beyond their ancillas, and their success.
    level2: (f64, f64),
    ancilla_uses: u32,
}

fn levels(result: &PumpResult, model: &CostModel) -> Levels {
    let single_round = OpCounts::new(0, 2, 2);
    let double_round = OpCounts::new(0, 4, 4);
    let prod = |v: &[f64]| v.iter().product::<f64>();
    let r = &result.rounds;
    match result.schedule {
        PumpSchedule::Single { n1, n2 } => {
            let chain = OpCounts::new(1 + u64::from(n1), 0, 0) + single_round * u64::from(n1);
            Levels {
                ancilla: (model.weigh(chain), prod(&r.ancilla)),
                target: (model.weigh(chain), prod(&r.target)),
                level2: (model.weigh(single_round * u64::from(n2)), prod(&r.level2)),
                ancilla_uses: n2,
            }
        }
        PumpSchedule::Double { n1, m1, m2 } => {
            let chain = OpCounts::new(1 + u64::from(n1), 0, 0) + single_round * u64::from(n1);
            let target = OpCounts::new(1, 0, 0) + (OpCounts::new(2, 0, 0) + double_round) * u64::from(m1);
            Levels {
                ancilla: (model.weigh(chain), prod(&r.ancilla)),
                target: (model.weigh(target), prod(&r.target)),
                level2: (model.weigh((OpCounts::new(1, 0, 0) + double_round) * u64::from(m2)), prod(&r.level2)),
                ancilla_uses: m2,
            }
        }
    }
}

/// Expected cost per TTG for an already pumped result.
pub fn expected_cost_of(result: &PumpResult, model: &CostModel) -> Result<f64> {
    model.validate()?;
    let ttg = model.weigh(TTG_OPS);
    let k = match model.policy {
        RestartPolicy::AllOrNothing => {
            let net = result.net_success();
            if !(net > 0.0) {
                return Err(Error::underflow("net protocol success"));
            }
            (model.weigh(result.attempt_cost) + ttg) / net
        }
        RestartPolicy::PerLevel => {
            let lv = levels(result, model);
            for (stage, p) in [("ancilla level", lv.ancilla.1), ("target level", lv.target.1), ("level-2 rounds", lv.level2.1)] {
                if !(p > 0.0) {
                    return Err(Error::underflow(stage));
                }
            }
            let ancilla = lv.ancilla.0 / lv.ancilla.1;
            let target = lv.target.0 / lv.target.1;
            (target + f64::from(lv.ancilla_uses) * ancilla + lv.level2.0 + ttg) / lv.level2.1
        }
    };
    if k.is_finite() {
        Ok(k)
    } else {
        Err(Error::underflow("expected cost"))
    }
}

/// Expected operational cost `K` per teleported gate.
pub fn expected_cost(schedule: PumpSchedule, channel: &ChannelParams, noise: &NoiseParams, model: &CostModel) -> Result<f64> {
    let result = Purifier::new(noise).pump(channel, schedule)?;
    expected_cost_of(&result, model)
}

/// Cost with every success probability forced to one.
pub fn nominal_cost(schedule: PumpSchedule, model: &CostModel) -> f64 {
    model.weigh(schedule.attempt_cost()) + model.weigh(TTG_OPS)
}

fn all_pass(rng: &mut ChaCha8Rng, probs: &[f64]) -> bool {
    probs.iter().all(|&p| rng.random::<f64>() < p)
}

/// Draws until a level's checks all pass; returns the number of tries.
fn tries(rng: &mut ChaCha8Rng, probs: &[f64]) -> u64 {
    let mut n = 1;
    while !all_pass(rng, probs) {
        n += 1;
    }
    n
}

fn simulate_once(rng: &mut ChaCha8Rng, result: &PumpResult, model: &CostModel, lv: &Levels) -> f64 {
    let r = &result.rounds;
    let ttg = model.weigh(TTG_OPS);
    match model.policy {
        RestartPolicy::AllOrNothing => {
            let attempt = model.weigh(result.attempt_cost) + ttg;
            let mut cost = 0.0;
            loop {
                cost += attempt;
                let ok = all_pass(rng, &r.target)
                    && (0..r.ancilla_uses).all(|_| all_pass(rng, &r.ancilla))
                    && all_pass(rng, &r.level2);
                if ok {
                    return cost;
                }
            }
        }
        RestartPolicy::PerLevel => {
            let mut cost = 0.0;
            loop {
                cost += tries(rng, &r.target) as f64 * lv.target.0;
                for _ in 0..r.ancilla_uses {
                    cost += tries(rng, &r.ancilla) as f64 * lv.ancilla.0;
                }
                cost += lv.level2.0 + ttg;
                if all_pass(rng, &r.level2) {
                    return cost;
                }
            }
        }
    }
}

/// Monte Carlo estimate of `K`: runs the restart process `trials` times and
/// averages the realized cost. Work is split over fixed seeded streams, so the
/// estimate depends only on `seed` and `trials`.
pub fn mc_retry_cost(result: &PumpResult, model: &CostModel, trials: u64, seed: u64) -> Result<f64> {
    model.validate()?;
    if trials == 0 {
        return Err(Error::invalid("trials", "must be positive"));
    }
    if !(result.net_success() > 0.0) {
        return Err(Error::underflow("net protocol success"));
    }
    let lv = levels(result, model);
    let total: f64 = (0..MC_STREAMS)
        .into_par_iter()
        .map(|stream| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let n = trials / MC_STREAMS + u64::from(stream < trials % MC_STREAMS);
            (0..n).map(|_| simulate_once(&mut rng, result, model, &lv)).sum::<f64>()
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .sum();
    Ok(total / trials as f64)
}

/// One fixed-`K` locus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KContour {
    pub level: f64,
    /// `(F, p_g)` points.
    pub points: Vec<(f64, f64)>,
}

fn k_at(purifier: &Purifier, fidelity: f64, schedule: PumpSchedule, model: &CostModel) -> Result<f64> {
    let channel = ChannelParams::new(fidelity)?;
    match purifier.pump(&channel, schedule).and_then(|r| expected_cost_of(&r, model)) {
        Ok(k) => Ok(k),
        Err(Error::SuccessUnderflow { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Channel fidelity where `K` reaches `level` at gate error `p_g`.
///
/// `K` falls as `F` rises, so the crossing is bisected in `F` over `(1/4, 1]`.
pub fn k_crossing_f(p_g: f64, schedule: PumpSchedule, rule: PmRule, model: &CostModel, level: f64) -> Result<Option<f64>> {
    let purifier = Purifier::new(&noise_for(p_g, rule)?);
    let k_hi = k_at(&purifier, 1.0, schedule, model)?;
    if k_hi >= level {
        return Ok(None);
    }
    let mut lo = 0.25 + 1e-9;
    if k_at(&purifier, lo, schedule, model)? < level {
        return Ok(None);
    }
    let mut hi = 1.0;
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if k_at(&purifier, mid, schedule, model)? < level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// `(F, p_g = p_M)` loci of fixed `K`, one bisection in `F` per `p_g` grid point.
pub fn contour_k(schedule: PumpSchedule, levels: &[f64], pg_grid: &[f64], rule: PmRule, model: &CostModel) -> Result<Vec<KContour>> {
    if let Some(&bad) = levels.iter().find(|&&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::invalid("levels", format!("must be positive, got {bad}")));
    }
    levels
        .iter()
        .map(|&level| {
            let found = pg_grid
                .par_iter()
                .map(|&p| k_crossing_f(p, schedule, rule, model, level).map(|f| f.map(|f| (f, p))))
                .collect::<Result<Vec<_>>>()?;
            Ok(KContour {
                level,
                points: found.into_iter().flatten().collect(),
            })
        })
        .collect()
}

/// Gate counts of Shor factoring of an `n`-bit number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShorCount {
    pub toffoli: f64,
    pub omega: f64,
}

pub fn shor_gate_count(n_bits: u64) -> Result<ShorCount> {
    if n_bits < 2 {
        return Err(Error::invalid("n_bits", format!("must be at least 2, got {n_bits}")));
    }
    let n3 = (n_bits as f64).powi(3);
    Ok(ShorCount {
        toffoli: 40.0 * n3,
        omega: 300.0 * n3,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

/// `T = T_per_gate · Ω` two-qubit gates in total and overhead `R = K T`.
pub fn total_overhead(k: f64, t_per_gate: f64, omega: f64) -> Result<ResourceReport> {
    for (field, x) in [("K", k), ("T_per_gate", t_per_gate), ("Omega", omega)] {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::invalid(field, format!("must be positive, got {x}")));
        }
    }
    let t = t_per_gate * omega;
    Ok(ResourceReport { k, t, omega, r: k * t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{depolarizing_noise, NoiseConvention};

    fn setup(f: f64, p: f64, s: PumpSchedule) -> PumpResult {
        let noise = depolarizing_noise(p, p, NoiseConvention::Uniform).unwrap();
        Purifier::new(&noise).pump(&ChannelParams::new(f).unwrap(), s).unwrap()
    }

    #[test]
    fn trivial_schedule_costs_one_pair() {
        let k = expected_cost(
            PumpSchedule::double(0, 0, 0),
            &ChannelParams::new(1.0).unwrap(),
            &NoiseParams::noiseless(),
            &CostModel::default(),
        )
        .unwrap();
        assert_eq!(k, 1.0);
    }

    #[test]
    fn operating_point_band() {
        let r = setup(0.9, 1e-3, PumpSchedule::double(1, 2, 2));
        let k = expected_cost_of(&r, &CostModel::default()).unwrap();
        assert!((25.0..=60.0).contains(&k), "{k}");
        assert!(k >= nominal_cost(r.schedule, &CostModel::default()));
    }

    #[test]
    fn per_level_is_cheaper() {
        let r = setup(0.85, 1e-3, PumpSchedule::double(1, 2, 2));
        for model in [CostModel::default(), CostModel::full()] {
            let all = expected_cost_of(&r, &model).unwrap();
            let per = expected_cost_of(&r, &CostModel { policy: RestartPolicy::PerLevel, ..model }).unwrap();
            assert!(per <= all, "{per} > {all}");
            assert!(per >= nominal_cost(r.schedule, &model));
        }
    }

    #[test]
    fn monte_carlo_agrees_for_both_policies() {
        let r = setup(0.9, 1e-3, PumpSchedule::double(1, 2, 2));
        for policy in [RestartPolicy::AllOrNothing, RestartPolicy::PerLevel] {
            let model = CostModel { policy, ..CostModel::full() };
            let k = expected_cost_of(&r, &model).unwrap();
            let mc = mc_retry_cost(&r, &model, 200_000, 11).unwrap();
            assert!(((mc - k) / k).abs() < 0.02, "{policy:?}: {mc} vs {k}");
        }
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let r = setup(0.9, 1e-3, PumpSchedule::double(1, 2, 2));
        let m = CostModel::default();
        assert_eq!(mc_retry_cost(&r, &m, 1000, 3).unwrap(), mc_retry_cost(&r, &m, 1000, 3).unwrap());
    }

    #[test]
    fn shor_counts() {
        let c = shor_gate_count(2).unwrap();
        assert_eq!((c.toffoli, c.omega), (320.0, 2400.0));
        assert!(shor_gate_count(1).is_err());
        assert_eq!(shor_gate_count(1024).unwrap().omega, 300.0 * 1024f64.powi(3));
    }

    #[test]
    fn overhead_arithmetic() {
        let r = total_overhead(40.0, 2e10, 3e11).unwrap();
        assert_eq!(r.t, 6e21);
        assert_eq!(r.r, 40.0 * 6e21);
        assert_eq!(total_overhead(1.0, 1.0, 1.0).unwrap().r, 1.0);
        assert!(total_overhead(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn empty_levels() {
        let out = contour_k(PumpSchedule::double(1, 2, 2), &[], &[1e-3], PmRule::Equal, &CostModel::default()).unwrap();
        assert!(out.is_empty());
    }
}
