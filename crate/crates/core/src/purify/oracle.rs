//! Independent reference evaluations of the purification maps.
//!
//! Both oracles work at the level of physical qubits: every pair is a
//! `(side A, side B)` qubit pair, each side's CNOT draws its own gate error
//! from the unfolded table and each physical measurement flips on its own.
//! The exhaustive oracle sums over every such event; the sampler draws them.

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tensor::{Tensor3, Tensor4};
use crate::pauli::{cnot_propagate, hadamard_propagate, FidelityVector, NoiseParams, PauliLabel};

/// A pair's error as carried by its two physical qubits.
#[derive(Debug, Clone, Copy)]
struct Pair {
    a: PauliLabel,
    b: PauliLabel,
}

impl Pair {
    fn with_label(label: PauliLabel) -> Self {
        Pair {
            a: label,
            b: PauliLabel::I,
        }
    }

    /// Label relative to the reference pair (side B folded onto side A).
    fn label(self) -> PauliLabel {
        self.a * self.b
    }
}

/// Bilateral CNOT: one physical CNOT per side, each followed by its own error.
fn bilateral_cnot(control: &mut Pair, target: &mut Pair, err_a: (PauliLabel, PauliLabel), err_b: (PauliLabel, PauliLabel)) {
    let (ca, ta) = cnot_propagate(control.a, target.a);
    let (cb, tb) = cnot_propagate(control.b, target.b);
    control.a = ca * err_a.0;
    target.a = ta * err_a.1;
    control.b = cb * err_b.0;
    target.b = tb * err_b.1;
}

/// Reported parity of a bilateral Z-basis measurement: true when odd.
fn z_parity(pair: Pair, flip_a: bool, flip_b: bool) -> bool {
    pair.a.has_x() ^ pair.b.has_x() ^ flip_a ^ flip_b
}

fn x_parity(pair: Pair, flip_a: bool, flip_b: bool) -> bool {
    pair.a.has_z() ^ pair.b.has_z() ^ flip_a ^ flip_b
}

fn gate_events(noise: &NoiseParams) -> Vec<((PauliLabel, PauliLabel), f64)> {
    let t = noise.effective_table();
    let mut events = Vec::with_capacity(16);
    for u in PauliLabel::ALL {
        for v in PauliLabel::ALL {
            let w = t[u.index()][v.index()];
            if w > 0.0 {
                events.push(((u, v), w));
            }
        }
    }
    events
}

fn flip_events(p_m: f64) -> Vec<(bool, f64)> {
    if p_m > 0.0 {
        vec![(false, 1.0 - p_m), (true, p_m)]
    } else {
        vec![(false, 1.0)]
    }
}

/// Single-selection transition weights by exhaustive enumeration over both
/// sides' gate errors and both measurement flips, per input label pair.
pub fn single_transition(noise: &NoiseParams) -> Tensor3 {
    let gates = gate_events(noise);
    let flips = flip_events(noise.p_m);
    let mut s = [[[0.0; 4]; 4]; 4];
    for i in PauliLabel::ALL {
        for j in PauliLabel::ALL {
            for &(ea, wa) in &gates {
                for &(eb, wb) in &gates {
                    let mut t = Pair::with_label(i);
                    let mut a = Pair::with_label(j);
                    bilateral_cnot(&mut t, &mut a, ea, eb);
                    for &(fa, wfa) in &flips {
                        for &(fb, wfb) in &flips {
                            if !z_parity(a, fa, fb) {
                                s[i.index()][j.index()][t.label().index()] += wa * wb * wfa * wfb;
                            }
                        }
                    }
                }
            }
        }
    }
    s
}

/// Double-selection transition weights by exhaustive enumeration.
pub fn double_transition(noise: &NoiseParams) -> Tensor4 {
    let gates = gate_events(noise);
    let flips = flip_events(noise.p_m);
    let mut d = [[[[0.0; 4]; 4]; 4]; 4];
    for i in PauliLabel::ALL {
        for j in PauliLabel::ALL {
            for k in PauliLabel::ALL {
                for &(e1a, w1a) in &gates {
                    for &(e1b, w1b) in &gates {
                        let mut t = Pair::with_label(i);
                        let mut a1 = Pair::with_label(j);
                        bilateral_cnot(&mut t, &mut a1, e1a, e1b);
                        let out = hadamard_propagate(t.label()).index();
                        let w1 = w1a * w1b;
                        for &(e2a, w2a) in &gates {
                            for &(e2b, w2b) in &gates {
                                let mut a2 = Pair::with_label(k);
                                let mut a1 = a1;
                                bilateral_cnot(&mut a2, &mut a1, e2a, e2b);
                                let w2 = w1 * w2a * w2b;
                                let mut acc = 0.0;
                                for &(f1, g1) in &flips {
                                    for &(f2, g2) in &flips {
                                        if z_parity(a1, f1, f2) {
                                            continue;
                                        }
                                        for &(f3, g3) in &flips {
                                            for &(f4, g4) in &flips {
                                                if !x_parity(a2, f3, f4) {
                                                    acc += g1 * g2 * g3 * g4;
                                                }
                                            }
                                        }
                                    }
                                }
                                d[i.index()][j.index()][k.index()][out] += w2 * acc;
                            }
                        }
                    }
                }
            }
        }
    }
    d
}

/// Unnormalized single-selection output summed over all joint events.
pub fn enumerate_single(target: &FidelityVector, ancilla: &FidelityVector, noise: &NoiseParams) -> [f64; 4] {
    contract3(&single_transition(noise), target, ancilla)
}

/// Unnormalized double-selection output summed over all joint events.
pub fn enumerate_double(
    target: &FidelityVector,
    ancilla1: &FidelityVector,
    ancilla2: &FidelityVector,
    noise: &NoiseParams,
) -> [f64; 4] {
    contract4(&double_transition(noise), target, ancilla1, ancilla2)
}

pub fn contract3(s: &Tensor3, f: &FidelityVector, g: &FidelityVector) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (i, fi) in f.as_array().into_iter().enumerate() {
        for (j, gj) in g.as_array().into_iter().enumerate() {
            for k in 0..4 {
                out[k] += s[i][j][k] * fi * gj;
            }
        }
    }
    out
}

pub fn contract4(d: &Tensor4, f: &FidelityVector, g: &FidelityVector, h: &FidelityVector) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (i, fi) in f.as_array().into_iter().enumerate() {
        for (j, gj) in g.as_array().into_iter().enumerate() {
            for (k, hk) in h.as_array().into_iter().enumerate() {
                for l in 0..4 {
                    out[l] += d[i][j][k][l] * fi * gj * hk;
                }
            }
        }
    }
    out
}

/// Monte Carlo estimate of a purification map.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleEstimate {
    pub shots: u64,
    pub accepted: u64,
    /// Accepted shots by output label.
    pub counts: [u64; 4],
}

impl SampleEstimate {
    pub fn success(&self) -> f64 {
        self.accepted as f64 / self.shots as f64
    }

    /// Estimated unnormalized output weight of `label` and its binomial standard error.
    pub fn weight(&self, label: PauliLabel) -> (f64, f64) {
        let p = self.counts[label.index()] as f64 / self.shots as f64;
        (p, (p * (1.0 - p) / self.shots as f64).sqrt())
    }
}

struct Sampler {
    rng: ChaCha8Rng,
    gate: WeightedIndex<f64>,
    p_m: f64,
}

impl Sampler {
    fn new(noise: &NoiseParams, seed: u64) -> Self {
        let table = noise.effective_table();
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            gate: WeightedIndex::new(table.iter().flatten().copied()).expect("normalized gate table"),
            p_m: noise.p_m,
        }
    }

    fn label(&mut self, dist: &WeightedIndex<f64>) -> PauliLabel {
        PauliLabel::ALL[dist.sample(&mut self.rng)]
    }

    fn gate_error(&mut self) -> (PauliLabel, PauliLabel) {
        let idx = self.gate.sample(&mut self.rng);
        (PauliLabel::ALL[idx / 4], PauliLabel::ALL[idx % 4])
    }

    fn flip(&mut self) -> bool {
        self.p_m > 0.0 && self.rng.random::<f64>() < self.p_m
    }
}

fn label_dist(f: &FidelityVector) -> WeightedIndex<f64> {
    WeightedIndex::new(f.as_array()).expect("normalized fidelity vector")
}

/// Samples the single-selection circuit `shots` times.
pub fn sample_single(
    target: &FidelityVector,
    ancilla: &FidelityVector,
    noise: &NoiseParams,
    shots: u64,
    seed: u64,
) -> SampleEstimate {
    let mut s = Sampler::new(noise, seed);
    let (dt, da) = (label_dist(target), label_dist(ancilla));
    let mut est = SampleEstimate {
        shots,
        accepted: 0,
        counts: [0; 4],
    };
    for _ in 0..shots {
        let mut t = Pair::with_label(s.label(&dt));
        let mut a = Pair::with_label(s.label(&da));
        let (ea, eb) = (s.gate_error(), s.gate_error());
        bilateral_cnot(&mut t, &mut a, ea, eb);
        let (fa, fb) = (s.flip(), s.flip());
        if !z_parity(a, fa, fb) {
            est.accepted += 1;
            est.counts[t.label().index()] += 1;
        }
    }
    est
}

/// Samples the double-selection circuit `shots` times.
pub fn sample_double(
    target: &FidelityVector,
    ancilla1: &FidelityVector,
    ancilla2: &FidelityVector,
    noise: &NoiseParams,
    shots: u64,
    seed: u64,
) -> SampleEstimate {
    let mut s = Sampler::new(noise, seed);
    let (dt, d1, d2) = (label_dist(target), label_dist(ancilla1), label_dist(ancilla2));
    let mut est = SampleEstimate {
        shots,
        accepted: 0,
        counts: [0; 4],
    };
    for _ in 0..shots {
        let mut t = Pair::with_label(s.label(&dt));
        let mut a1 = Pair::with_label(s.label(&d1));
        let mut a2 = Pair::with_label(s.label(&d2));
        let (ea, eb) = (s.gate_error(), s.gate_error());
        bilateral_cnot(&mut t, &mut a1, ea, eb);
        let (ea, eb) = (s.gate_error(), s.gate_error());
        bilateral_cnot(&mut a2, &mut a1, ea, eb);
        let z_odd = z_parity(a1, s.flip(), s.flip());
        let x_odd = x_parity(a2, s.flip(), s.flip());
        if !z_odd && !x_odd {
            est.accepted += 1;
            est.counts[hadamard_propagate(t.label()).index()] += 1;
        }
    }
    est
}
