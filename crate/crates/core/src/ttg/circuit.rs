//! Circuit-level reference for the TTG error tables.
//!
//! Each gadget is written out as a short circuit on four qubits: the two
//! halves of the purified pair (`ES` on the syndrome side, `ED` on the data
//! side), the local syndrome qubit `S` and the local data qubit `D`. A Pauli
//! frame is pushed through the circuit once per fault location with exactly
//! one fault switched on, which reproduces the first-order table.

use super::{ErrorTable, TtgType};
use crate::pauli::{cnot_propagate, cz_propagate, FidelityVector, NoiseParams, PauliLabel};

const ES: usize = 0;
const ED: usize = 1;
const S: usize = 2;
const D: usize = 3;

type Frame = [PauliLabel; 4];

#[derive(Debug, Clone, Copy)]
enum Basis {
    Z,
    X,
}

#[derive(Debug, Clone, Copy)]
enum Step {
    /// Gate on `(a, b)`; a gate fault `σ_u ⊗ σ_v` lands on `(noise.0, noise.1)`.
    Cnot { control: usize, target: usize, noise: (usize, usize) },
    Cz { a: usize, b: usize, noise: (usize, usize) },
    /// Measurement whose outcome feeds a Pauli correction on the output pair.
    Measure { qubit: usize, basis: Basis, correction: (PauliLabel, PauliLabel) },
}

/// A single fault switched on for one run.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Fault {
    Pair(PauliLabel),
    Gate { step: usize, u: PauliLabel, v: PauliLabel },
    Flip { step: usize },
}

fn steps(kind: TtgType) -> Vec<Step> {
    let bottom = [
        Step::Cnot { control: ES, target: S, noise: (S, ES) },
        Step::Measure { qubit: S, basis: Basis::Z, correction: (PauliLabel::X, PauliLabel::Z) },
    ];
    let top_cnot = [
        Step::Cnot { control: ED, target: D, noise: (ED, D) },
        Step::Measure { qubit: D, basis: Basis::Z, correction: (PauliLabel::Z, PauliLabel::X) },
    ];
    let top_cz = [
        Step::Cz { a: D, b: ED, noise: (ED, D) },
        Step::Measure { qubit: D, basis: Basis::X, correction: (PauliLabel::Z, PauliLabel::X) },
    ];
    match kind {
        TtgType::I => top_cz.to_vec(),
        TtgType::II => [bottom, top_cnot].concat(),
        TtgType::III => [bottom, top_cz].concat(),
    }
}

fn run(steps: &[Step], fault: Fault) -> (PauliLabel, PauliLabel) {
    let mut f: Frame = [PauliLabel::I; 4];
    if let Fault::Pair(label) = fault {
        f[ES] = label;
    }
    let mut out = (PauliLabel::I, PauliLabel::I);
    for (k, step) in steps.iter().enumerate() {
        let gate_fault = match fault {
            Fault::Gate { step, u, v } if step == k => Some((u, v)),
            _ => None,
        };
        match *step {
            Step::Cnot { control, target, noise } => {
                (f[control], f[target]) = cnot_propagate(f[control], f[target]);
                if let Some((u, v)) = gate_fault {
                    f[noise.0] = f[noise.0] * u;
                    f[noise.1] = f[noise.1] * v;
                }
            }
            Step::Cz { a, b, noise } => {
                (f[a], f[b]) = cz_propagate(f[a], f[b]);
                if let Some((u, v)) = gate_fault {
                    f[noise.0] = f[noise.0] * u;
                    f[noise.1] = f[noise.1] * v;
                }
            }
            Step::Measure { qubit, basis, correction } => {
                let mut wrong = match basis {
                    Basis::Z => f[qubit].has_x(),
                    Basis::X => f[qubit].has_z(),
                };
                wrong ^= fault == Fault::Flip { step: k };
                if wrong {
                    out = (out.0 * correction.0, out.1 * correction.1);
                }
            }
        }
    }
    (f[ES] * out.0, f[ED] * out.1)
}

/// First-order output table from single-fault circuit runs.
///
/// The identity cell is left at zero.
pub fn circuit_table(kind: TtgType, f_bar: &FidelityVector, noise: &NoiseParams) -> ErrorTable {
    let steps = steps(kind);
    let table = noise.effective_table();
    let mut faults: Vec<(Fault, f64)> = Vec::new();
    for label in [PauliLabel::X, PauliLabel::Y, PauliLabel::Z] {
        faults.push((Fault::Pair(label), f_bar.get(label)));
    }
    for (k, step) in steps.iter().enumerate() {
        match step {
            Step::Cnot { .. } | Step::Cz { .. } => {
                for u in PauliLabel::ALL {
                    for v in PauliLabel::ALL {
                        if (u, v) != (PauliLabel::I, PauliLabel::I) {
                            faults.push((Fault::Gate { step: k, u, v }, table[u.index()][v.index()]));
                        }
                    }
                }
            }
            Step::Measure { .. } => faults.push((Fault::Flip { step: k }, noise.p_m)),
        }
    }

    let mut t = ErrorTable::zero();
    for (fault, w) in faults {
        let (mut s, mut d) = run(&steps, fault);
        // The type-I output pair is stabilised by X_s Z_d.
        if kind == TtgType::I && s.has_x() {
            s = s * PauliLabel::X;
            d = d * PauliLabel::Z;
        }
        if (s, d) != (PauliLabel::I, PauliLabel::I) {
            t.p_bar[s.index()][d.index()] += w;
        }
    }
    t
}
