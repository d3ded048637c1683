//! Entanglement purification with single and double selection, and the
//! entanglement-pumping schedules built from them.
//!
//! Conventions (all in the Pauli-diagonal label representation):
//!
//! * Single selection: the kept pair controls a bilateral CNOT onto the
//!   ancilla, which is measured bilaterally in Z; classes `{I, Z}` pass.
//! * Double selection: as above onto the first ancilla, then the second
//!   ancilla controls a bilateral CNOT onto the first ancilla; the first
//!   ancilla is checked in Z (`{I, Z}` pass) and the second in X (`{I, X}`
//!   pass). The kept pair leaves through a bilateral Hadamard, so successive
//!   double-selection rounds alternate between bit- and phase-flip checks.
//! * Level-2 pumping feeds the level-1 single-pumped ancilla in through a
//!   bilateral Hadamard so that its suppressed error component is the one that
//!   reaches the target.
//! * Any rejected check aborts the whole protocol attempt; all fidelities are
//!   those of the postselected branch.

pub mod oracle;
pub mod tensor;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{
    cnot_propagate, hadamard_propagate, ChannelParams, FidelityVector, NoiseParams, PauliLabel,
};

pub use tensor::{extract_tensor_d, extract_tensor_s, PurificationTensorD, PurificationTensorS};

use tensor::{bilateral_noise, parity_kept};

/// Repetition counts of a pumping protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum PumpSchedule {
    /// `n1` level-1 and `n2` level-2 single-selection rounds.
    Single { n1: u32, n2: u32 },
    /// `m1` level-1 double rounds on the target, `n1` single rounds per
    /// ancilla, `m2` level-2 double rounds.
    Double { n1: u32, m1: u32, m2: u32 },
}

impl PumpSchedule {
    pub const fn single(n1: u32, n2: u32) -> Self {
        PumpSchedule::Single { n1, n2 }
    }

    pub const fn double(n1: u32, m1: u32, m2: u32) -> Self {
        PumpSchedule::Double { n1, m1, m2 }
    }

    /// Two counts give a single-selection schedule, three a double-selection one.
    pub fn from_counts(counts: &[u32]) -> Result<Self> {
        match *counts {
            [n1, n2] => Ok(Self::single(n1, n2)),
            [n1, m1, m2] => Ok(Self::double(n1, m1, m2)),
            _ => Err(Error::invalid(
                "schedule",
                format!("expected 2 or 3 counts, got {}", counts.len()),
            )),
        }
    }

    pub fn counts(&self) -> Vec<u32> {
        match *self {
            PumpSchedule::Single { n1, n2 } => vec![n1, n2],
            PumpSchedule::Double { n1, m1, m2 } => vec![n1, m1, m2],
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.counts().iter().all(|&c| c == 0)
    }

    pub fn has_double_selection(&self) -> bool {
        matches!(*self, PumpSchedule::Double { m1, m2, .. } if m1 + m2 > 0)
    }

    /// Base pairs and local operations consumed by one full protocol attempt.
    pub fn attempt_cost(&self) -> OpCounts {
        let single_round = OpCounts::new(0, 2, 2);
        let double_round = OpCounts::new(0, 4, 4);
        match *self {
            PumpSchedule::Single { n1, n2 } => {
                let chain = OpCounts::new(1 + u64::from(n1), 0, 0) + single_round * u64::from(n1);
                chain * (1 + u64::from(n2)) + single_round * u64::from(n2)
            }
            PumpSchedule::Double { n1, m1, m2 } => {
                let target = OpCounts::new(1, 0, 0)
                    + (OpCounts::new(2, 0, 0) + double_round) * u64::from(m1);
                let ancilla = OpCounts::new(1 + u64::from(n1), 0, 0) + single_round * u64::from(n1);
                target + (ancilla + OpCounts::new(1, 0, 0) + double_round) * u64::from(m2)
            }
        }
    }
}

impl fmt::Display for PumpSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts().iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for PumpSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let counts = s
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::invalid("schedule", format!("bad count {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_counts(&counts)
    }
}

/// Resource bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OpCounts {
    pub base_pairs: u64,
    pub two_qubit_gates: u64,
    pub measurements: u64,
}

impl OpCounts {
    pub const fn new(base_pairs: u64, two_qubit_gates: u64, measurements: u64) -> Self {
        OpCounts {
            base_pairs,
            two_qubit_gates,
            measurements,
        }
    }
}

impl std::ops::Add for OpCounts {
    type Output = OpCounts;

    fn add(self, o: OpCounts) -> OpCounts {
        OpCounts::new(
            self.base_pairs + o.base_pairs,
            self.two_qubit_gates + o.two_qubit_gates,
            self.measurements + o.measurements,
        )
    }
}

impl std::ops::Mul<u64> for OpCounts {
    type Output = OpCounts;

    fn mul(self, k: u64) -> OpCounts {
        OpCounts::new(self.base_pairs * k, self.two_qubit_gates * k, self.measurements * k)
    }
}

/// Net success probabilities of each pumping level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum SuccessProbs {
    Single { p_lv1: f64, p_lv2: f64 },
    Double { r_lv1: f64, p_lv1: f64, r_lv2: f64 },
}

impl SuccessProbs {
    pub fn to_vec(&self) -> Vec<f64> {
        match *self {
            SuccessProbs::Single { p_lv1, p_lv2 } => vec![p_lv1, p_lv2],
            SuccessProbs::Double { r_lv1, p_lv1, r_lv2 } => vec![r_lv1, p_lv1, r_lv2],
        }
    }
}

/// Per-round conditional success probabilities of one protocol attempt.
///
/// An attempt runs the `target` chain once, the `ancilla` chain
/// `ancilla_uses` times (each level-2 round consumes a fresh level-1 pair),
/// and the `level2` rounds once.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RoundLog {
    pub target: Vec<f64>,
    pub ancilla: Vec<f64>,
    pub ancilla_uses: u32,
    pub level2: Vec<f64>,
}

impl RoundLog {
    /// Probability that every check of a full attempt passes.
    pub fn net_success(&self) -> f64 {
        let prod = |v: &[f64]| v.iter().product::<f64>();
        prod(&self.target) * prod(&self.ancilla).powi(self.ancilla_uses as i32) * prod(&self.level2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PumpResult {
    pub schedule: PumpSchedule,
    pub f_out: FidelityVector,
    pub success_probs: SuccessProbs,
    pub rounds: RoundLog,
    pub attempt_cost: OpCounts,
}

impl PumpResult {
    pub fn net_success(&self) -> f64 {
        self.rounds.net_success()
    }
}

/// Direct evaluation of single selection by forward propagation of every
/// joint input label through the noisy bilateral CNOT and the parity check.
pub fn single_selection(
    target: &FidelityVector,
    ancilla: &FidelityVector,
    noise: &NoiseParams,
) -> Result<(FidelityVector, f64)> {
    let q = bilateral_noise(noise);
    let keep = parity_kept(noise.p_m);
    let mut raw = [0.0; 4];
    for i in PauliLabel::ALL {
        for j in PauliLabel::ALL {
            let w = target.get(i) * ancilla.get(j);
            if w == 0.0 {
                continue;
            }
            let (t, a) = cnot_propagate(i, j);
            for u in PauliLabel::ALL {
                for v in PauliLabel::ALL {
                    let wq = q[u.index()][v.index()];
                    if wq == 0.0 {
                        continue;
                    }
                    let acc = if (a * v).has_x() { 1.0 - keep } else { keep };
                    raw[(t * u).index()] += w * wq * acc;
                }
            }
        }
    }
    FidelityVector::normalize(raw, "single selection")
}

/// Direct evaluation of double selection.
pub fn double_selection(
    target: &FidelityVector,
    ancilla1: &FidelityVector,
    ancilla2: &FidelityVector,
    noise: &NoiseParams,
) -> Result<(FidelityVector, f64)> {
    let q = bilateral_noise(noise);
    let keep = parity_kept(noise.p_m);
    let draws: Vec<(PauliLabel, PauliLabel, f64)> = PauliLabel::ALL
        .iter()
        .flat_map(|&u| PauliLabel::ALL.iter().map(move |&v| (u, v)))
        .map(|(u, v)| (u, v, q[u.index()][v.index()]))
        .filter(|&(_, _, w)| w > 0.0)
        .collect();
    let mut raw = [0.0; 4];
    for i in PauliLabel::ALL {
        for j in PauliLabel::ALL {
            for k in PauliLabel::ALL {
                let w = target.get(i) * ancilla1.get(j) * ancilla2.get(k);
                if w == 0.0 {
                    continue;
                }
                let (t, b) = cnot_propagate(i, j);
                for &(u, v, w1) in &draws {
                    let (t, b) = (t * u, b * v);
                    let (d, c) = cnot_propagate(k, b);
                    for &(u2, v2, w2) in &draws {
                        let (d, c) = (d * u2, c * v2);
                        let acc_c = if c.has_x() { 1.0 - keep } else { keep };
                        let acc_d = if d.has_z() { 1.0 - keep } else { keep };
                        raw[hadamard_propagate(t).index()] += w * w1 * w2 * acc_c * acc_d;
                    }
                }
            }
        }
    }
    FidelityVector::normalize(raw, "double selection")
}

/// Precomputed transition tensors for one noise model.
#[derive(Debug, Clone)]
pub struct Purifier {
    pub s: PurificationTensorS,
    pub s_twisted: PurificationTensorS,
    pub d: PurificationTensorD,
}

impl Purifier {
    pub fn new(noise: &NoiseParams) -> Self {
        let s = extract_tensor_s(noise);
        Purifier {
            s_twisted: s.twisted(),
            d: extract_tensor_d(noise),
            s,
        }
    }

    /// `n` rounds of single pumping against fresh `ancilla` pairs.
    fn single_chain(
        &self,
        start: FidelityVector,
        ancilla: &FidelityVector,
        n: u32,
        stage: &str,
    ) -> Result<(FidelityVector, Vec<f64>)> {
        let mut f = start;
        let mut probs = Vec::with_capacity(n as usize);
        for _ in 0..n {
            let (next, p) = self.s.select(&f, ancilla).map_err(|_| Error::underflow(stage))?;
            f = next;
            probs.push(p);
        }
        Ok((f, probs))
    }

    pub fn pump_single(&self, channel: &ChannelParams, n1: u32, n2: u32) -> Result<PumpResult> {
        let ini = channel.f_ini;
        let (lv1, ancilla_probs) = self.single_chain(ini, &ini, n1, "level-1 single pumping")?;
        let mut f = lv1;
        let mut level2 = Vec::with_capacity(n2 as usize);
        for _ in 0..n2 {
            let (next, p) = self
                .s_twisted
                .select(&f, &lv1)
                .map_err(|_| Error::underflow("level-2 single pumping"))?;
            f = next;
            level2.push(p);
        }
        let schedule = PumpSchedule::single(n1, n2);
        Ok(PumpResult {
            schedule,
            f_out: f,
            success_probs: SuccessProbs::Single {
                p_lv1: ancilla_probs.iter().product(),
                p_lv2: level2.iter().product(),
            },
            rounds: RoundLog {
                target: ancilla_probs.clone(),
                ancilla: ancilla_probs,
                ancilla_uses: n2,
                level2,
            },
            attempt_cost: schedule.attempt_cost(),
        })
    }

    pub fn pump_double(
        &self,
        channel: &ChannelParams,
        n1: u32,
        m1: u32,
        m2: u32,
    ) -> Result<PumpResult> {
        let ini = channel.f_ini;
        // (i) level-1 double pumping of the target with two fresh pairs per round.
        let mut target = ini;
        let mut target_probs = Vec::with_capacity(m1 as usize);
        for _ in 0..m1 {
            let (next, r) = self
                .d
                .select(&target, &ini, &ini)
                .map_err(|_| Error::underflow("level-1 double pumping"))?;
            target = next;
            target_probs.push(r);
        }
        // (ii) level-1 single pumping of the ancilla.
        let (lv1, ancilla_probs) = self.single_chain(ini, &ini, n1, "level-1 single pumping")?;
        let twisted_ancilla = lv1.hadamard();
        // (iii) level-2 double pumping with the single-pumped pair and a fresh pair.
        let mut level2 = Vec::with_capacity(m2 as usize);
        for _ in 0..m2 {
            let (next, r) = self
                .d
                .select(&target, &twisted_ancilla, &ini)
                .map_err(|_| Error::underflow("level-2 double pumping"))?;
            target = next;
            level2.push(r);
        }
        let schedule = PumpSchedule::double(n1, m1, m2);
        Ok(PumpResult {
            schedule,
            f_out: target,
            success_probs: SuccessProbs::Double {
                r_lv1: target_probs.iter().product(),
                p_lv1: ancilla_probs.iter().product(),
                r_lv2: level2.iter().product(),
            },
            rounds: RoundLog {
                target: target_probs,
                ancilla: ancilla_probs,
                ancilla_uses: m2,
                level2,
            },
            attempt_cost: schedule.attempt_cost(),
        })
    }

    pub fn pump(&self, channel: &ChannelParams, schedule: PumpSchedule) -> Result<PumpResult> {
        match schedule {
            PumpSchedule::Single { n1, n2 } => self.pump_single(channel, n1, n2),
            PumpSchedule::Double { n1, m1, m2 } => self.pump_double(channel, n1, m1, m2),
        }
    }
}

/// Level-2 single pumping: returns `F^Lv2` with `(p_Lv1, p_Lv2)`.
pub fn pump_single(
    channel: &ChannelParams,
    (n1, n2): (u32, u32),
    noise: &NoiseParams,
) -> Result<PumpResult> {
    Purifier::new(noise).pump_single(channel, n1, n2)
}

/// Level-2 double pumping: returns `F~^Lv2` with `(r_Lv1, p_Lv1, r_Lv2)`.
pub fn pump_double(
    channel: &ChannelParams,
    (n1, m1, m2): (u32, u32, u32),
    noise: &NoiseParams,
) -> Result<PumpResult> {
    Purifier::new(noise).pump_double(channel, n1, m1, m2)
}

pub fn pump(channel: &ChannelParams, schedule: PumpSchedule, noise: &NoiseParams) -> Result<PumpResult> {
    Purifier::new(noise).pump(channel, schedule)
}

/// Contour presets: the single-pumping schedules compared in the literature figure.
pub const SINGLE_PRESETS: [PumpSchedule; 8] = [
    PumpSchedule::single(2, 4),
    PumpSchedule::single(3, 4),
    PumpSchedule::single(3, 7),
    PumpSchedule::single(5, 6),
    PumpSchedule::single(5, 8),
    PumpSchedule::single(5, 10),
    PumpSchedule::single(5, 11),
    PumpSchedule::single(5, 13),
];

/// Contour presets for double-selection pumping.
pub const DOUBLE_PRESETS: [PumpSchedule; 6] = [
    PumpSchedule::double(2, 5, 5),
    PumpSchedule::double(2, 4, 8),
    PumpSchedule::double(3, 3, 9),
    PumpSchedule::double(3, 3, 11),
    PumpSchedule::double(3, 3, 13),
    PumpSchedule::double(3, 4, 14),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{depolarizing_noise, NoiseConvention};

    fn uniform(p_g: f64, p_m: f64) -> NoiseParams {
        depolarizing_noise(p_g, p_m, NoiseConvention::Uniform).unwrap()
    }

    #[test]
    fn schedule_parsing() {
        assert_eq!("1,2,2".parse::<PumpSchedule>().unwrap(), PumpSchedule::double(1, 2, 2));
        assert_eq!("3, 4".parse::<PumpSchedule>().unwrap(), PumpSchedule::single(3, 4));
        assert!("1".parse::<PumpSchedule>().is_err());
        assert!("1,2,3,4".parse::<PumpSchedule>().is_err());
        assert!("1,x".parse::<PumpSchedule>().is_err());
        assert_eq!(PumpSchedule::double(3, 4, 14).to_string(), "3,4,14");
    }

    #[test]
    fn attempt_costs() {
        // 1 target + 2·2 level-1 ancillae + 2·(2 for the single-pumped pair + 1 fresh).
        let c = PumpSchedule::double(1, 2, 2).attempt_cost();
        assert_eq!(c.base_pairs, 11);
        assert_eq!(c.two_qubit_gates, 2 * 4 + 2 * (2 + 4));
        assert_eq!(c.measurements, c.two_qubit_gates);
        assert_eq!(PumpSchedule::double(0, 0, 0).attempt_cost(), OpCounts::new(1, 0, 0));
        assert_eq!(PumpSchedule::single(2, 3).attempt_cost().base_pairs, 12);
    }

    #[test]
    fn perfect_inputs_are_fixed_points() {
        let noise = NoiseParams::noiseless();
        let p = FidelityVector::PERFECT;
        assert_eq!(single_selection(&p, &p, &noise).unwrap(), (p, 1.0));
        assert_eq!(double_selection(&p, &p, &p, &noise).unwrap(), (p, 1.0));
    }

    #[test]
    fn bit_flip_detected_by_single_selection() {
        let e = 0.1;
        let target = FidelityVector::new([1.0 - e, e, 0.0, 0.0]).unwrap();
        let (f, p) = single_selection(&target, &FidelityVector::PERFECT, &NoiseParams::noiseless())
            .unwrap();
        assert_eq!(f, FidelityVector::PERFECT);
        assert!((p - 0.9).abs() < 1e-15);
        let (f, p) = double_selection(
            &target,
            &FidelityVector::PERFECT,
            &FidelityVector::PERFECT,
            &NoiseParams::noiseless(),
        )
        .unwrap();
        assert_eq!(f, FidelityVector::PERFECT);
        assert!((p - 0.9).abs() < 1e-15);
    }

    #[test]
    fn single_selection_trades_x_for_z() {
        let f = FidelityVector::new([0.85, 0.05, 0.05, 0.05]).unwrap();
        let (out, p) = single_selection(&f, &f, &uniform(0.001, 0.001)).unwrap();
        assert!(out.get(PauliLabel::X) < 0.05);
        assert!(out.get(PauliLabel::Z) > 0.05);
        assert!(p > 0.0 && p <= 1.0);
    }

    #[test]
    fn double_selection_beats_single_on_same_inputs() {
        let f = FidelityVector::new([0.85, 0.05, 0.05, 0.05]).unwrap();
        let noise = uniform(0.001, 0.001);
        let (single, _) = single_selection(&f, &f, &noise).unwrap();
        let (double, _) = double_selection(&f, &f, &f, &noise).unwrap();
        assert!(double.infidelity() < single.infidelity());
    }

    #[test]
    fn empty_and_perfect_schedules() {
        let ch = ChannelParams::new(0.9).unwrap();
        let r = pump_single(&ch, (0, 0), &uniform(0.01, 0.01)).unwrap();
        assert_eq!(r.f_out, ch.f_ini);
        assert_eq!(r.success_probs.to_vec(), vec![1.0, 1.0]);
        let r = pump_double(&ch, (0, 0, 0), &uniform(0.01, 0.01)).unwrap();
        assert_eq!(r.f_out, ch.f_ini);
        assert_eq!(r.net_success(), 1.0);

        let perfect = ChannelParams::new(1.0).unwrap();
        for sched in SINGLE_PRESETS.iter().chain(DOUBLE_PRESETS.iter()) {
            let r = pump(&perfect, *sched, &NoiseParams::noiseless()).unwrap();
            assert_eq!(r.f_out, FidelityVector::PERFECT);
            assert!(r.success_probs.to_vec().iter().all(|&p| p == 1.0));
        }
    }

    #[test]
    fn double_pumping_purifies_noisy_channel() {
        let ch = ChannelParams::new(0.9).unwrap();
        let r = pump_double(&ch, (1, 2, 2), &uniform(1e-3, 1e-3)).unwrap();
        assert!(r.f_out.infidelity() < 0.1);
        let [r1, p1, r2] = r.success_probs.to_vec()[..] else { panic!() };
        assert!((r.net_success() - r1 * p1 * p1 * r2).abs() < 1e-15);
    }
}
