//! Transition tensors built by composing primitive tensors: the bilateral
//! CNOT with gate noise `G`, the bilateral measurement `M`, its X-basis
//! counterpart `M~ = H M H`, and the bilateral Hadamard `H`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::pauli::{cnot_propagate, hadamard_propagate, FidelityVector, NoiseParams, PauliLabel};

pub type Tensor2 = [[f64; 4]; 4];
pub type Tensor3 = [[[f64; 4]; 4]; 4];
pub type Tensor4 = [[[[f64; 4]; 4]; 4]; 4];

/// Observed-class indices accepted by a Z-basis parity check.
const Z_ACCEPT: [usize; 2] = [0, 3];
/// Observed-class indices accepted by an X-basis parity check.
const X_ACCEPT: [usize; 2] = [0, 1];

/// Pair-level noise after a bilateral gate: both physical gates draw from the
/// table independently and the two draws are multiplied onto the pair labels.
/// `q[u][v]`: probability that the control pair picks up `u` and the target pair `v`.
pub fn bilateral_noise(noise: &NoiseParams) -> Tensor2 {
    let p = noise.effective_table();
    let mut q = [[0.0; 4]; 4];
    for u1 in PauliLabel::ALL {
        for v1 in PauliLabel::ALL {
            let w1 = p[u1.index()][v1.index()];
            if w1 == 0.0 {
                continue;
            }
            for u2 in PauliLabel::ALL {
                for v2 in PauliLabel::ALL {
                    let w2 = p[u2.index()][v2.index()];
                    q[(u1 * u2).index()][(v1 * v2).index()] += w1 * w2;
                }
            }
        }
    }
    q
}

/// Probability that a pair-level parity check sees the true parity, given
/// independent flips of the two physical measurements.
pub fn parity_kept(p_m: f64) -> f64 {
    (1.0 - p_m) * (1.0 - p_m) + p_m * p_m
}

/// `G[i][j][a][b]`: bilateral CNOT (pair `i` control, pair `j` target) followed
/// by gate noise, mapping input labels to output labels `(a, b)`.
pub fn cnot_tensor(noise: &NoiseParams) -> Tensor4 {
    let q = bilateral_noise(noise);
    let mut g = [[[[0.0; 4]; 4]; 4]; 4];
    for i in PauliLabel::ALL {
        for j in PauliLabel::ALL {
            let (c, t) = cnot_propagate(i, j);
            for u in PauliLabel::ALL {
                for v in PauliLabel::ALL {
                    g[i.index()][j.index()][(c * u).index()][(t * v).index()] +=
                        q[u.index()][v.index()];
                }
            }
        }
    }
    g
}

/// `M[a][l]`: probability that a pair carrying `a` is reported as class `l`
/// by the bilateral Z-basis measurement. Only the X bit of the class is observed.
pub fn measurement_tensor(p_m: f64) -> Tensor2 {
    let keep = parity_kept(p_m);
    let mut m = [[0.0; 4]; 4];
    for a in PauliLabel::ALL {
        for l in PauliLabel::ALL {
            if a.has_z() == l.has_z() {
                m[a.index()][l.index()] = if a.has_x() == l.has_x() { keep } else { 1.0 - keep };
            }
        }
    }
    m
}

pub fn hadamard_tensor() -> Tensor2 {
    let mut h = [[0.0; 4]; 4];
    for a in PauliLabel::ALL {
        h[a.index()][hadamard_propagate(a).index()] = 1.0;
    }
    h
}

fn mat_mul(a: &Tensor2, b: &Tensor2) -> Tensor2 {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            for j in 0..4 {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

/// `M~ = H M H`, the X-basis bilateral measurement.
pub fn x_measurement_tensor(p_m: f64) -> Tensor2 {
    let h = hadamard_tensor();
    mat_mul(&mat_mul(&h, &measurement_tensor(p_m)), &h)
}

/// Single-selection tensor `S[i][j][k]` (target `i`, ancilla `j`, output `k`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurificationTensorS {
    pub s: Tensor3,
}

impl PurificationTensorS {
    /// Unnormalized output of the map on two input vectors.
    pub fn apply(&self, target: &FidelityVector, ancilla: &FidelityVector) -> [f64; 4] {
        let (f, g) = (target.as_array(), ancilla.as_array());
        let mut out = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                let w = f[i] * g[j];
                if w == 0.0 {
                    continue;
                }
                for k in 0..4 {
                    out[k] += self.s[i][j][k] * w;
                }
            }
        }
        out
    }

    /// Normalized output and success probability.
    pub fn select(
        &self,
        target: &FidelityVector,
        ancilla: &FidelityVector,
    ) -> Result<(FidelityVector, f64)> {
        FidelityVector::normalize(self.apply(target, ancilla), "single selection")
    }

    /// The Hadamard-twisted tensor `S~^{ij}_k = H^c_k S^{ab}_c H^i_a H^j_b`,
    /// which checks phase instead of bit flips.
    pub fn twisted(&self) -> Self {
        let h = hadamard_tensor();
        let mut s = [[[0.0; 4]; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let mut acc = 0.0;
                    for a in 0..4 {
                        for b in 0..4 {
                            for c in 0..4 {
                                acc += h[c][k] * self.s[a][b][c] * h[i][a] * h[j][b];
                            }
                        }
                    }
                    s[i][j][k] = acc;
                }
            }
        }
        PurificationTensorS { s }
    }
}

/// Double-selection tensor `D[i][j][k][l]` after summing over accepted outcomes
/// (target `i`, first ancilla `j`, second ancilla `k`, output `l`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurificationTensorD {
    pub d: Tensor4,
}

impl PurificationTensorD {
    pub fn apply(
        &self,
        target: &FidelityVector,
        ancilla1: &FidelityVector,
        ancilla2: &FidelityVector,
    ) -> [f64; 4] {
        let (f, g, h) = (target.as_array(), ancilla1.as_array(), ancilla2.as_array());
        let mut out = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let w = f[i] * g[j] * h[k];
                    if w == 0.0 {
                        continue;
                    }
                    for l in 0..4 {
                        out[l] += self.d[i][j][k][l] * w;
                    }
                }
            }
        }
        out
    }

    pub fn select(
        &self,
        target: &FidelityVector,
        ancilla1: &FidelityVector,
        ancilla2: &FidelityVector,
    ) -> Result<(FidelityVector, f64)> {
        FidelityVector::normalize(self.apply(target, ancilla1, ancilla2), "double selection")
    }
}

/// `S^{ij}_k = Σ_{l∈{I,Z}} M^a_l G^{ij}_{ka}`.
pub fn extract_tensor_s(noise: &NoiseParams) -> PurificationTensorS {
    let g = cnot_tensor(noise);
    let m = measurement_tensor(noise.p_m);
    let mut s = [[[0.0; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let mut acc = 0.0;
                for a in 0..4 {
                    for &l in &Z_ACCEPT {
                        acc += m[a][l] * g[i][j][k][a];
                    }
                }
                s[i][j][k] = acc;
            }
        }
    }
    PurificationTensorS { s }
}

/// `D^{ijk}_l = Σ_{m∈{I,Z}, n∈{I,X}} H^a_l M^c_m M~^d_n G^{kb}_{dc} G^{ij}_{ab}`.
///
/// The target controls a CNOT onto the first ancilla, the second ancilla
/// controls a CNOT onto the first ancilla, the first ancilla is checked in the
/// Z basis and the second in the X basis, and the kept target leaves through a
/// bilateral Hadamard.
pub fn extract_tensor_d(noise: &NoiseParams) -> PurificationTensorD {
    let g = cnot_tensor(noise);
    let h = hadamard_tensor();
    let m = measurement_tensor(noise.p_m);
    let mt = x_measurement_tensor(noise.p_m);

    // Acceptance weights of the two ancilla classes after the sums over m and n.
    let mut accept_c = [0.0; 4];
    let mut accept_d = [0.0; 4];
    for c in 0..4 {
        accept_c[c] = Z_ACCEPT.iter().map(|&l| m[c][l]).sum();
        accept_d[c] = X_ACCEPT.iter().map(|&n| mt[c][n]).sum();
    }
    // Second stage: E[k][b] = Σ_{d,c} accept_d[d] accept_c[c] G^{kb}_{dc}.
    let mut second = [[0.0; 4]; 4];
    for k in 0..4 {
        for b in 0..4 {
            let mut acc = 0.0;
            for dd in 0..4 {
                for c in 0..4 {
                    acc += accept_d[dd] * accept_c[c] * g[k][b][dd][c];
                }
            }
            second[k][b] = acc;
        }
    }
    let mut d = [[[[0.0; 4]; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let mut acc = 0.0;
                    for a in 0..4 {
                        if h[a][l] == 0.0 {
                            continue;
                        }
                        for b in 0..4 {
                            acc += h[a][l] * second[k][b] * g[i][j][a][b];
                        }
                    }
                    d[i][j][k][l] = acc;
                }
            }
        }
    }
    PurificationTensorD { d }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{depolarizing_noise, NoiseConvention};

    #[test]
    fn noiseless_single_tensor() {
        let s = extract_tensor_s(&NoiseParams::noiseless());
        assert_eq!(s.s[0][0][0], 1.0);
        // An X or Y on the target reaches the ancilla and is rejected.
        for i in [PauliLabel::X, PauliLabel::Y] {
            for k in 0..4 {
                assert_eq!(s.s[i.index()][0][k], 0.0);
            }
        }
        // Z on the target passes untouched.
        assert_eq!(s.s[3][0][3], 1.0);
    }

    #[test]
    fn measurement_rows_are_stochastic() {
        for p_m in [0.0, 1e-3, 0.2] {
            let m = measurement_tensor(p_m);
            let mt = x_measurement_tensor(p_m);
            for a in 0..4 {
                assert!((m[a].iter().sum::<f64>() - 1.0).abs() < 1e-15);
                assert!((mt[a].iter().sum::<f64>() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn acceptance_below_one_with_noise() {
        let noise = depolarizing_noise(0.0015, 0.0015, NoiseConvention::Uniform).unwrap();
        let s = extract_tensor_s(&noise);
        let p = FidelityVector::PERFECT;
        let total: f64 = s.apply(&p, &p).iter().sum();
        assert!(total < 1.0 && total > 0.99);
        // Column sums bounded by one: rejection is the deficit.
        for i in 0..4 {
            for j in 0..4 {
                assert!(s.s[i][j].iter().sum::<f64>() <= 1.0 + 1e-15);
            }
        }
    }

    #[test]
    fn measurement_only_noise_rejects_perfect_pairs() {
        let noise = depolarizing_noise(0.0, 0.01, NoiseConvention::Uniform).unwrap();
        let d = extract_tensor_d(&noise);
        let p = FidelityVector::PERFECT;
        let total: f64 = d.apply(&p, &p, &p).iter().sum();
        assert!(total < 1.0);
        assert!((total - parity_kept(0.01).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn twist_is_involutive() {
        let noise = depolarizing_noise(0.01, 0.02, NoiseConvention::Uniform).unwrap();
        let s = extract_tensor_s(&noise);
        let back = s.twisted().twisted();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    assert!((back.s[i][j][k] - s.s[i][j][k]).abs() < 1e-15);
                }
            }
        }
    }
}
