//! Pauli label algebra and the noise model.
//!
//! Every pair of qubits sharing a maximally entangled state is described by a
//! probability vector over the four Pauli labels `(I, X, Y, Z)` carried on one
//! fixed half of the pair. Noise that hits the other half is folded onto the
//! stored label by label multiplication; phases never affect probabilities, so
//! they are dropped throughout.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the normalization of probability vectors and tables.
pub const NORM_TOL: f64 = 1e-12;

/// A single-qubit Pauli operator modulo phase, indexed `I=0, X=1, Y=2, Z=3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct PauliLabel(u8);

impl PauliLabel {
    pub const I: PauliLabel = PauliLabel(0);
    pub const X: PauliLabel = PauliLabel(1);
    pub const Y: PauliLabel = PauliLabel(2);
    pub const Z: PauliLabel = PauliLabel(3);

    pub const ALL: [PauliLabel; 4] = [Self::I, Self::X, Self::Y, Self::Z];

    pub fn new(index: u8) -> Result<Self> {
        if index < 4 {
            Ok(PauliLabel(index))
        } else {
            Err(Error::invalid("pauli label", format!("index {index} not in 0..4")))
        }
    }

    /// Builds a label from its symplectic bits.
    pub const fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Self::I,
            (true, false) => Self::X,
            (true, true) => Self::Y,
            (false, true) => Self::Z,
        }
    }

    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    /// Whether the label anticommutes with `Z` (flips computational-basis outcomes).
    #[inline]
    pub const fn has_x(self) -> bool {
        self.0 == 1 || self.0 == 2
    }

    /// Whether the label anticommutes with `X`.
    #[inline]
    pub const fn has_z(self) -> bool {
        self.0 == 2 || self.0 == 3
    }

    pub fn symbol(self) -> char {
        ['I', 'X', 'Y', 'Z'][self.index()]
    }
}

impl TryFrom<u8> for PauliLabel {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        PauliLabel::new(value)
    }
}

impl From<PauliLabel> for u8 {
    fn from(label: PauliLabel) -> u8 {
        label.0
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl Mul for PauliLabel {
    type Output = PauliLabel;

    fn mul(self, rhs: PauliLabel) -> PauliLabel {
        label_mul(self, rhs)
    }
}

/// Projective product: returns `c` with `σ_c ∝ σ_a σ_b`.
pub fn label_mul(a: PauliLabel, b: PauliLabel) -> PauliLabel {
    PauliLabel::from_bits(a.has_x() ^ b.has_x(), a.has_z() ^ b.has_z())
}

/// Conjugates a Pauli pair through a CNOT. `X` copies control to target,
/// `Z` copies target to control.
pub fn cnot_propagate(control: PauliLabel, target: PauliLabel) -> (PauliLabel, PauliLabel) {
    (
        PauliLabel::from_bits(control.has_x(), control.has_z() ^ target.has_z()),
        PauliLabel::from_bits(target.has_x() ^ control.has_x(), target.has_z()),
    )
}

/// Conjugates a Pauli pair through a CZ. `X` on either qubit picks up `Z` on the other.
pub fn cz_propagate(a: PauliLabel, b: PauliLabel) -> (PauliLabel, PauliLabel) {
    (
        PauliLabel::from_bits(a.has_x(), a.has_z() ^ b.has_x()),
        PauliLabel::from_bits(b.has_x(), b.has_z() ^ a.has_x()),
    )
}

/// Conjugation by a Hadamard: swaps `X` and `Z`.
pub fn hadamard_propagate(a: PauliLabel) -> PauliLabel {
    PauliLabel::from_bits(a.has_z(), a.has_x())
}

/// Probability distribution over the error label carried by one entangled pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct FidelityVector([f64; 4]);

impl FidelityVector {
    /// The noiseless pair.
    pub const PERFECT: FidelityVector = FidelityVector([1.0, 0.0, 0.0, 0.0]);

    pub fn new(f: [f64; 4]) -> Result<Self> {
        if f.iter().any(|&x| !x.is_finite() || !(0.0..=1.0 + NORM_TOL).contains(&x)) {
            return Err(Error::invalid(
                "fidelity vector",
                format!("entries must lie in [0, 1], got {f:?}"),
            ));
        }
        let total: f64 = f.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(
                "fidelity vector",
                format!("entries must sum to 1, got {total}"),
            ));
        }
        Ok(FidelityVector(f))
    }

    /// Normalizes a non-negative unnormalized vector, returning it with its weight.
    pub fn normalize(raw: [f64; 4], stage: &str) -> Result<(Self, f64)> {
        let total: f64 = raw.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::underflow(stage));
        }
        let mut f = raw.map(|x| (x / total).max(0.0));
        // Renormalize once more so rounding never leaves the sum off by more than an ulp.
        let again: f64 = f.iter().sum();
        f.iter_mut().for_each(|x| *x /= again);
        Ok((FidelityVector(f), total))
    }

    /// Werner-form vector `(F, (1-F)/3, (1-F)/3, (1-F)/3)`.
    pub fn werner(fidelity: f64) -> Result<Self> {
        if !(fidelity > 0.25 && fidelity <= 1.0) {
            return Err(Error::invalid(
                "F",
                format!("channel fidelity must lie in (1/4, 1], got {fidelity}"),
            ));
        }
        let e = (1.0 - fidelity) / 3.0;
        Ok(FidelityVector([fidelity, e, e, e]))
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.0
    }

    pub fn get(&self, label: PauliLabel) -> f64 {
        self.0[label.index()]
    }

    pub fn fidelity(&self) -> f64 {
        self.0[0]
    }

    /// `1 - F_0`, computed from the error entries to avoid cancellation.
    pub fn infidelity(&self) -> f64 {
        self.0[1] + self.0[2] + self.0[3]
    }

    /// The vector after a bilateral Hadamard (X and Z weights exchanged).
    pub fn hadamard(&self) -> Self {
        let [i, x, y, z] = self.0;
        FidelityVector([i, z, y, x])
    }
}

impl TryFrom<[f64; 4]> for FidelityVector {
    type Error = Error;

    fn try_from(f: [f64; 4]) -> Result<Self> {
        FidelityVector::new(f)
    }
}

impl From<FidelityVector> for [f64; 4] {
    fn from(f: FidelityVector) -> [f64; 4] {
        f.0
    }
}

/// How the fifteen non-identity two-qubit error probabilities are distributed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[non_exhaustive]
pub enum NoiseConvention {
    /// `p_ij = p_g / 15` for every `(i, j) != (0, 0)`.
    #[default]
    Uniform,
}

/// Local operation noise: two-qubit gate error table, measurement and
/// preparation error, and memory error accumulated over a fixed wait.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// `table[i][j]`: probability of `σ_i ⊗ σ_j` after a gate (first index on the first qubit).
    pub table: [[f64; 4]; 4],
    pub p_m: f64,
    pub p_p: f64,
    pub eta: f64,
    pub l_wait: u32,
}

impl NoiseParams {
    /// Noiseless local operations.
    pub fn noiseless() -> Self {
        let mut table = [[0.0; 4]; 4];
        table[0][0] = 1.0;
        NoiseParams {
            table,
            p_m: 0.0,
            p_p: 0.0,
            eta: 0.0,
            l_wait: 0,
        }
    }

    /// Validates and wraps an explicit gate error table.
    pub fn from_table(table: [[f64; 4]; 4], p_m: f64) -> Result<Self> {
        check_probability("p_M", p_m)?;
        if table.iter().flatten().any(|&x| !x.is_finite() || x < 0.0) {
            return Err(Error::invalid("p_table", "entries must be non-negative"));
        }
        let total: f64 = table.iter().flatten().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(
                "p_table",
                format!("entries must sum to 1, got {total}"),
            ));
        }
        let noise = NoiseParams {
            table,
            p_m,
            p_p: 0.0,
            eta: 0.0,
            l_wait: 0,
        };
        check_probability("p_g", noise.p_g())?;
        Ok(noise)
    }

    /// Adds memory error `eta` per step over `l_wait` steps.
    pub fn with_memory(mut self, eta: f64, l_wait: u32) -> Result<Self> {
        effective_pg(self.p_g(), eta, l_wait)?;
        self.eta = eta;
        self.l_wait = l_wait;
        Ok(self)
    }

    /// Sets the preparation error.
    pub fn with_preparation(mut self, p_p: f64) -> Result<Self> {
        check_probability("p_P", p_p)?;
        self.p_p = p_p;
        Ok(self)
    }

    /// Total gate error probability of the base table (no memory contribution).
    pub fn p_g(&self) -> f64 {
        let t = &self.table;
        t.iter().flatten().sum::<f64>() - t[0][0]
    }

    /// Gate error probability with memory folded in, `p_g + η l`.
    pub fn effective_pg(&self) -> f64 {
        self.p_g() + self.eta * f64::from(self.l_wait)
    }

    /// The gate table that every consumer of the noise model sees: the base
    /// table with its error entries rescaled to total `p_g + η l`. A zero base
    /// table receives the memory error uniformly.
    pub fn effective_table(&self) -> [[f64; 4]; 4] {
        let extra = self.eta * f64::from(self.l_wait);
        if extra == 0.0 {
            return self.table;
        }
        let base = self.p_g();
        let target = base + extra;
        let mut t = self.table;
        for (i, row) in t.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                if (i, j) != (0, 0) {
                    *x = if base > 0.0 { *x * target / base } else { target / 15.0 };
                }
            }
        }
        t[0][0] = 1.0 - target;
        t
    }

    /// `p_AB` of the effective table.
    pub fn p(&self, a: PauliLabel, b: PauliLabel) -> f64 {
        self.effective_table()[a.index()][b.index()]
    }
}

fn check_probability(field: &str, x: f64) -> Result<()> {
    if x.is_finite() && (0.0..1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must lie in [0, 1), got {x}")))
    }
}

/// Builds the depolarizing gate table for total error `p_g` plus measurement error `p_m`.
pub fn depolarizing_noise(p_g: f64, p_m: f64, convention: NoiseConvention) -> Result<NoiseParams> {
    check_probability("p_g", p_g)?;
    check_probability("p_M", p_m)?;
    let table = match convention {
        NoiseConvention::Uniform => {
            let mut t = [[p_g / 15.0; 4]; 4];
            t[0][0] = 1.0 - p_g;
            t
        }
    };
    Ok(NoiseParams {
        table,
        p_m,
        p_p: 0.0,
        eta: 0.0,
        l_wait: 0,
    })
}

/// `p_g + η l`, rejected when the sum reaches 1.
pub fn effective_pg(p_g: f64, eta: f64, l_wait: u32) -> Result<f64> {
    if !(p_g >= 0.0 && eta >= 0.0) {
        return Err(Error::invalid("p_g/eta", "must be non-negative"));
    }
    let p = p_g + eta * f64::from(l_wait);
    if p.is_finite() && p < 1.0 {
        Ok(p)
    } else {
        Err(Error::invalid(
            "p_g + eta*l",
            format!("effective gate error {p} must stay below 1"),
        ))
    }
}

/// Channel description: fidelity and the Werner vector it induces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub fidelity: f64,
    pub f_ini: FidelityVector,
}

impl ChannelParams {
    pub fn new(fidelity: f64) -> Result<Self> {
        Ok(ChannelParams {
            fidelity,
            f_ini: FidelityVector::werner(fidelity)?,
        })
    }

    /// Extension hook: a channel delivering an arbitrary pair distribution.
    pub fn from_vector(f_ini: FidelityVector) -> Self {
        ChannelParams {
            fidelity: f_ini.fidelity(),
            f_ini,
        }
    }
}
