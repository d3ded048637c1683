//! Output error tables of the teleportation-based two-qubit gates (TTGs).
//!
//! A TTG consumes one purified pair plus one or two local two-qubit gates and
//! measurements. Its first-order output error table is affine in the purified
//! pair's error weights, the gate error table and the measurement error.
//! Rows index the error on the syndrome-side output qubit, columns the error on
//! the data-side output qubit.

pub mod circuit;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{FidelityVector, NoiseParams, PauliLabel};

/// Tolerance of the closed-form versus circuit-oracle comparison.
pub const ORACLE_TOL: f64 = 1e-12;

/// The three TTG variants used in one syndrome-extraction round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TtgType {
    /// Prepares the syndrome qubit and applies a Hadamard-preceded CZ (gates 1 and 5).
    I,
    /// Plain teleported CZ (gates 2, 4, 6, 8).
    II,
    /// Hadamard-preceded CZ on an existing syndrome qubit (gates 3 and 7).
    III,
}

impl TtgType {
    pub const ALL: [TtgType; 3] = [TtgType::I, TtgType::II, TtgType::III];

    /// The TTG used at syndrome-round position `l` (1-based, `1..=8`).
    pub fn for_position(l: usize) -> Result<TtgType> {
        match l {
            1 | 5 => Ok(TtgType::I),
            2 | 4 | 6 | 8 => Ok(TtgType::II),
            3 | 7 => Ok(TtgType::III),
            _ => Err(Error::invalid("gate position", format!("{l} not in 1..=8"))),
        }
    }

    /// Closed-form class sums under the uniform convention `p_AB = p_g/15`.
    pub fn uniform_aggregates(self, f_bar: &FidelityVector, p_g: f64, p_m: f64) -> GateAggregates {
        let [_, f1, f2, f3] = f_bar.as_array();
        let u = p_g / 15.0;
        match self {
            TtgType::I => GateAggregates {
                p_zx: 4.0 * u + p_m,
                p_zxbar: f2 + f3 + 4.0 * u,
                p_zbarx: 4.0 * u,
                p_xz: 0.0,
                p_xzbar: 0.0,
                p_xbarz: f1 + f2 + 8.0 * u,
            },
            TtgType::II | TtgType::III => GateAggregates {
                p_zx: 4.0 * u + p_m,
                p_zxbar: f2 + f3 + 12.0 * u,
                p_zbarx: 4.0 * u,
                p_xz: 4.0 * u + p_m,
                p_xzbar: 4.0 * u,
                p_xbarz: f1 + f2 + 12.0 * u,
            },
        }
    }
}

impl fmt::Display for TtgType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TtgType::I => "I",
            TtgType::II => "II",
            TtgType::III => "III",
        };
        f.write_str(s)
    }
}

impl FromStr for TtgType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(TtgType::I),
            "II" | "2" => Ok(TtgType::II),
            "III" | "3" => Ok(TtgType::III),
            _ => Err(Error::invalid("kind", format!("unknown TTG type {s:?}"))),
        }
    }
}

/// `p_bar[a][b]`: probability of `σ_a ⊗ σ_b` on (syndrome, data) after the gate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorTable {
    pub p_bar: [[f64; 4]; 4],
}

impl ErrorTable {
    pub fn zero() -> Self {
        ErrorTable::default()
    }

    pub fn get(&self, a: PauliLabel, b: PauliLabel) -> f64 {
        self.p_bar[a.index()][b.index()]
    }

    fn add(&mut self, a: PauliLabel, b: PauliLabel, w: f64) {
        self.p_bar[a.index()][b.index()] += w;
    }

    /// Total error weight (the identity cell excluded).
    pub fn total(&self) -> f64 {
        self.p_bar.iter().flatten().sum::<f64>() - self.p_bar[0][0]
    }

    pub fn max_abs_diff(&self, other: &ErrorTable) -> f64 {
        self.p_bar
            .iter()
            .flatten()
            .zip(other.p_bar.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Row-major flattening.
    pub fn to_vec(&self) -> Vec<f64> {
        self.p_bar.iter().flatten().copied().collect()
    }
}

/// Sum of the four table entries whose labels fall in the selected classes.
///
/// Class letters: `z` = {Y, Z}, `z̄` = {I, X}, `x` = {X, Y}, `x̄` = {I, Z};
/// the first letter applies to the syndrome qubit, the second to the data qubit.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GateAggregates {
    pub p_zx: f64,
    pub p_zxbar: f64,
    pub p_zbarx: f64,
    pub p_xz: f64,
    pub p_xzbar: f64,
    pub p_xbarz: f64,
}

#[derive(Clone, Copy)]
enum Class {
    Z,
    ZBar,
    X,
    XBar,
}

impl Class {
    fn contains(self, a: PauliLabel) -> bool {
        match self {
            Class::Z => a.has_z(),
            Class::ZBar => !a.has_z(),
            Class::X => a.has_x(),
            Class::XBar => !a.has_x(),
        }
    }
}

fn class_sum(table: &ErrorTable, syndrome: Class, data: Class) -> f64 {
    let mut acc = 0.0;
    for a in PauliLabel::ALL.into_iter().filter(|&a| syndrome.contains(a)) {
        for b in PauliLabel::ALL.into_iter().filter(|&b| data.contains(b)) {
            acc += table.get(a, b);
        }
    }
    acc
}

/// Class sums feeding the topological error model.
pub fn aggregates(table: &ErrorTable) -> GateAggregates {
    GateAggregates {
        p_zx: class_sum(table, Class::Z, Class::X),
        p_zxbar: class_sum(table, Class::Z, Class::XBar),
        p_zbarx: class_sum(table, Class::ZBar, Class::X),
        p_xz: class_sum(table, Class::X, Class::Z),
        p_xzbar: class_sum(table, Class::X, Class::ZBar),
        p_xbarz: class_sum(table, Class::XBar, Class::Z),
    }
}

/// First-order output table in closed form.
///
/// `p` is the data-side gate, `p'` the syndrome-side gate of types II and III.
/// Both draw from the same noise model.
pub fn ttg_table(kind: TtgType, f_bar: &FidelityVector, noise: &NoiseParams) -> ErrorTable {
    const I: PauliLabel = PauliLabel::I;
    const X: PauliLabel = PauliLabel::X;
    const Y: PauliLabel = PauliLabel::Y;
    const Z: PauliLabel = PauliLabel::Z;

    let table = noise.effective_table();
    let p = |a: PauliLabel, b: PauliLabel| table[a.index()][b.index()];
    // p_{A{B,C}}
    let pr = |a: PauliLabel, b: PauliLabel, c: PauliLabel| p(a, b) + p(a, c);
    // p'_{{A,B}C}
    let pc = |a: PauliLabel, b: PauliLabel, c: PauliLabel| p(a, c) + p(b, c);
    let [_, f1, f2, f3] = f_bar.as_array();
    let p_m = noise.p_m;

    let mut t = ErrorTable::zero();
    // The data-side gate's pattern depends on the measurement basis it feeds.
    let (keep, flip) = match kind {
        TtgType::I | TtgType::III => ((I, X), (Y, Z)),
        TtgType::II => ((I, Z), (X, Y)),
    };
    t.add(I, X, pr(X, keep.0, keep.1));
    t.add(I, Y, pr(Y, keep.0, keep.1));
    t.add(I, Z, f1 + pr(Z, keep.0, keep.1));
    t.add(Z, I, f3 + pr(X, flip.0, flip.1));
    t.add(Z, X, p_m + pr(I, flip.0, flip.1));
    t.add(Z, Y, pr(Z, flip.0, flip.1));
    t.add(Z, Z, f2 + pr(Y, flip.0, flip.1));

    if matches!(kind, TtgType::II | TtgType::III) {
        t.add(I, Z, pc(X, Y, X));
        t.add(X, I, pc(I, Z, X));
        t.add(X, Z, p_m + pc(X, Y, I));
        t.add(Y, I, pc(I, Z, Y));
        t.add(Y, Z, pc(X, Y, Z));
        t.add(Z, I, pc(I, Z, Z));
        t.add(Z, Z, pc(X, Y, Y));
    }
    t
}

/// Runs the circuit oracle and checks it against the closed form.
pub fn ttg_table_oracle(kind: TtgType, f_bar: &FidelityVector, noise: &NoiseParams) -> Result<ErrorTable> {
    let oracle = circuit::circuit_table(kind, f_bar, noise);
    let closed = ttg_table(kind, f_bar, noise);
    let deviation = oracle.max_abs_diff(&closed);
    if deviation > ORACLE_TOL {
        return Err(Error::Discrepancy {
            check: format!("TTG type {kind} circuit oracle"),
            deviation,
        });
    }
    Ok(oracle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{depolarizing_noise, NoiseConvention};
    use PauliLabel as P;

    fn fbar(f1: f64, f2: f64, f3: f64) -> FidelityVector {
        FidelityVector::new([1.0 - f1 - f2 - f3, f1, f2, f3]).unwrap()
    }

    #[test]
    fn noiseless_tables_vanish() {
        for kind in TtgType::ALL {
            let t = ttg_table(kind, &FidelityVector::PERFECT, &NoiseParams::noiseless());
            assert_eq!(t, ErrorTable::zero());
            assert_eq!(aggregates(&t), GateAggregates::default());
        }
    }

    #[test]
    fn type_i_entries() {
        let noise = depolarizing_noise(0.0015, 0.001, NoiseConvention::Uniform).unwrap();
        let t = ttg_table(TtgType::I, &fbar(1e-3, 0.0, 0.0), &noise);
        assert!((t.get(P::I, P::Z) - 0.0012).abs() < 1e-15);
        assert!((t.get(P::Z, P::X) - 0.0012).abs() < 1e-15);
        // No X or Y rows for the freshly prepared syndrome qubit.
        for b in P::ALL {
            assert_eq!(t.get(P::X, b), 0.0);
            assert_eq!(t.get(P::Y, b), 0.0);
        }
    }

    #[test]
    fn type_ii_entries() {
        let noise = depolarizing_noise(0.0015, 0.001, NoiseConvention::Uniform).unwrap();
        let f = fbar(1e-3, 0.0, 2e-4);
        let t = ttg_table(TtgType::II, &f, &noise);
        assert!((t.get(P::X, P::Z) - 0.0012).abs() < 1e-15);
        // F̄_3 + p_{X{X,Y}} + p'_{{I,Z}Z}
        assert!((t.get(P::Z, P::I) - (2e-4 + 4e-4)).abs() < 1e-15);
    }

    #[test]
    fn uniform_aggregates_match_tables() {
        let f = fbar(3e-4, 1e-4, 2e-4);
        let (p_g, p_m) = (0.002, 0.0007);
        let noise = depolarizing_noise(p_g, p_m, NoiseConvention::Uniform).unwrap();
        for kind in TtgType::ALL {
            let got = aggregates(&ttg_table(kind, &f, &noise));
            let want = kind.uniform_aggregates(&f, p_g, p_m);
            for (g, w) in [
                (got.p_zx, want.p_zx),
                (got.p_zxbar, want.p_zxbar),
                (got.p_zbarx, want.p_zbarx),
                (got.p_xz, want.p_xz),
                (got.p_xzbar, want.p_xzbar),
                (got.p_xbarz, want.p_xbarz),
            ] {
                assert!((g - w).abs() < 1e-15, "{kind}: {g} vs {w}");
            }
        }
    }

    #[test]
    fn positions_map_to_types() {
        let kinds: Vec<TtgType> = (1..=8).map(|l| TtgType::for_position(l).unwrap()).collect();
        use TtgType::*;
        assert_eq!(kinds, vec![I, II, III, II, I, II, III, II]);
        assert!(TtgType::for_position(0).is_err());
        assert!(TtgType::for_position(9).is_err());
    }

    #[test]
    fn total_weight_first_order() {
        let (p_g, p_m) = (1e-3, 1e-3);
        let noise = depolarizing_noise(p_g, p_m, NoiseConvention::Uniform).unwrap();
        let f = fbar(5e-4, 2e-4, 3e-4);
        for kind in [TtgType::II, TtgType::III] {
            let total = ttg_table(kind, &f, &noise).total();
            let rough = f.infidelity() + 2.0 * p_g + 2.0 * p_m;
            // Each gate has one fault pattern that leaves the output untouched.
            assert!((total - (rough - 2.0 * p_g / 15.0)).abs() < 1e-15);
        }
    }
}
