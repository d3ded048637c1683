//! Error model of the topological code built from TTG error tables, the
//! fault-tolerance conditions, and threshold searches over `(F, p_g)`.

pub mod contour;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{depolarizing_noise, ChannelParams, FidelityVector, NoiseConvention, NoiseParams};
use crate::purify::{PumpSchedule, Purifier};
use crate::ttg::{aggregates, ErrorTable, GateAggregates};

pub use contour::{contour_infidelity, infidelity_crossing_f, ContourCurve};

/// Relative width at which threshold bisection stops.
pub const BISECTION_TOL: f64 = 1e-4;

/// First point of the coarse doubling scan in `p_g`.
pub const SCAN_START: f64 = 1e-6;

/// Number of doublings in the coarse scan (`SCAN_START · 2^16 ≈ 0.066`).
pub const SCAN_DOUBLINGS: u32 = 16;

/// Independent and correlated Z-error probabilities on the unit cell edges.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct QTuple {
    pub qa: f64,
    pub qb: f64,
    pub qc: f64,
    pub qab: f64,
    pub qac: f64,
    pub qbb: f64,
}

impl QTuple {
    /// Largest correlated probability.
    pub fn q_cor(&self) -> f64 {
        self.qab.max(self.qac).max(self.qbb)
    }

    pub fn to_vec(&self) -> Vec<f64> {
        vec![self.qa, self.qb, self.qc, self.qab, self.qac, self.qbb]
    }
}

/// Sufficient conditions for fault tolerance, scaled by `margin`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConditions {
    pub qa_max: f64,
    pub qbc_max: f64,
    pub qcor_max: f64,
    pub margin: f64,
}

impl ThresholdConditions {
    pub const QA_MAX: f64 = 0.023;
    pub const QBC_MAX: f64 = 0.022;
    pub const QCOR_MAX: f64 = 0.0040;

    pub fn standard() -> Self {
        ThresholdConditions {
            qa_max: Self::QA_MAX,
            qbc_max: Self::QBC_MAX,
            qcor_max: Self::QCOR_MAX,
            margin: 1.0,
        }
    }

    pub fn with_margin(margin: f64) -> Result<Self> {
        if !(margin > 0.0 && margin <= 1.0) {
            return Err(Error::invalid("margin", format!("must lie in (0, 1], got {margin}")));
        }
        Ok(ThresholdConditions {
            margin,
            ..Self::standard()
        })
    }
}

impl Default for ThresholdConditions {
    fn default() -> Self {
        Self::standard()
    }
}

/// Closed form for the uniform noise convention with `p_P = 0`.
pub fn q_values(f_bar: &FidelityVector, p_g: f64, p_m: f64) -> QTuple {
    let [_, f1, f2, f3] = f_bar.as_array();
    let cor = 8.0 / 15.0 * p_g + p_m;
    QTuple {
        qa: 4.0 * (f2 + f3) + 40.0 / 15.0 * p_g + p_m,
        qb: 2.0 * (f1 + f2) + 40.0 / 15.0 * p_g + 2.0 * p_m,
        qc: 2.0 * (f1 + f2) + 32.0 / 15.0 * p_g + 2.0 * p_m,
        qab: cor,
        qac: cor,
        qbb: cor,
    }
}

/// The six sums over the per-gate class aggregates; `per_gate[l - 1]` is gate `l`.
pub fn q_values_generic(per_gate: &[GateAggregates; 8], p_p: f64, p_m: f64) -> QTuple {
    let g = |l: usize| &per_gate[l - 1];
    QTuple {
        qa: (5..=8).map(|l| g(l).p_zxbar).sum::<f64>() + p_p + p_m,
        qb: g(3).p_xbarz + g(3).p_xzbar + g(4).p_xz + g(4).p_xbarz + g(7).p_zx + g(8).p_zbarx,
        qc: g(1).p_xbarz + g(1).p_xzbar + g(2).p_xz + g(2).p_xbarz + g(5).p_zx + g(6).p_zbarx,
        qab: g(7).p_zbarx + g(8).p_zx,
        qac: g(5).p_zbarx + g(6).p_zx,
        qbb: g(2).p_xzbar + g(3).p_xz,
    }
}

/// Per-gate tables of the original monolithic scheme: uniform `p_g/15` on
/// the even gates, the single-qubit-folded table on the odd gates.
pub fn raussendorf_tables(p_g: f64) -> [ErrorTable; 8] {
    let u = p_g / 15.0;
    let mut even = ErrorTable::zero();
    for (a, row) in even.p_bar.iter_mut().enumerate() {
        for (b, x) in row.iter_mut().enumerate() {
            if (a, b) != (0, 0) {
                *x = u;
            }
        }
    }
    let mut odd = even;
    // IZ, ZX, ZY
    for (a, b) in [(0, 3), (3, 1), (3, 2)] {
        odd.p_bar[a][b] = 6.0 * u;
    }
    std::array::from_fn(|i| if (i + 1) % 2 == 1 { odd } else { even })
}

/// Error model of the original scheme with `p_P = p_M = p_g`.
pub fn raussendorf_baseline(p_g: f64) -> QTuple {
    let per_gate = raussendorf_tables(p_g).map(|t| aggregates(&t));
    q_values_generic(&per_gate, p_g, p_g)
}

/// True iff every probability lies strictly below its scaled bound.
pub fn check_ft(q: &QTuple, cond: &ThresholdConditions) -> bool {
    let m = cond.margin;
    q.qa < m * cond.qa_max && q.qb < m * cond.qbc_max && q.qc < m * cond.qbc_max && q.q_cor() < m * cond.qcor_max
}

/// How the measurement error follows the gate error in a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PmRule {
    Equal,
    FourFifteenths,
    Fixed(f64),
}

impl PmRule {
    pub fn p_m(&self, p_g: f64) -> f64 {
        match *self {
            PmRule::Equal => p_g,
            PmRule::FourFifteenths => 4.0 * p_g / 15.0,
            PmRule::Fixed(p) => p,
        }
    }
}

impl fmt::Display for PmRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PmRule::Equal => f.write_str("equal"),
            PmRule::FourFifteenths => f.write_str("four_fifteenths"),
            PmRule::Fixed(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for PmRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "equal" => Ok(PmRule::Equal),
            "four_fifteenths" | "4/15" => Ok(PmRule::FourFifteenths),
            other => match other.parse::<f64>() {
                Ok(p) if p.is_finite() && (0.0..1.0).contains(&p) => Ok(PmRule::Fixed(p)),
                _ => Err(Error::invalid(
                    "pM",
                    format!("expected equal, four_fifteenths or a probability, got {s:?}"),
                )),
            },
        }
    }
}

/// Uniform-convention noise at gate error `p_g` under `rule`.
pub fn noise_for(p_g: f64, rule: PmRule) -> Result<NoiseParams> {
    depolarizing_noise(p_g, rule.p_m(p_g), NoiseConvention::Uniform)
}

/// Pumped pair and error model at one `(F, p_g)` point.
pub fn pipeline_q(channel: &ChannelParams, schedule: PumpSchedule, p_g: f64, rule: PmRule) -> Result<(FidelityVector, QTuple)> {
    let noise = noise_for(p_g, rule)?;
    let pumped = Purifier::new(&noise).pump(channel, schedule)?;
    let q = q_values(&pumped.f_out, noise.effective_pg(), noise.p_m);
    Ok((pumped.f_out, q))
}

/// Pass/fail of the full pipeline; a vanishing success probability counts as a failure.
pub fn passes(channel: &ChannelParams, schedule: PumpSchedule, p_g: f64, rule: PmRule, cond: &ThresholdConditions) -> Result<bool> {
    match pipeline_q(channel, schedule, p_g, rule) {
        Ok((_, q)) => Ok(check_ft(&q, cond)),
        Err(Error::SuccessUnderflow { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Scan points `SCAN_START · 2^k`.
pub fn scan_grid() -> Vec<f64> {
    (0..=SCAN_DOUBLINGS).map(|k| SCAN_START * f64::from(1u32 << k)).collect()
}

/// Outcome of a scan-and-bisect search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Crossing {
    /// The first grid point already fails.
    NeverPasses,
    /// Bisected crossing point.
    At(f64),
    /// Every grid point passes; carries the last one.
    AlwaysPasses(f64),
}

/// Coarse scan of `grid` (ascending) followed by bisection of the single
/// pass-to-fail crossing. More than one crossing on the grid is an error.
pub(crate) fn bisect_crossing<F>(grid: &[f64], fidelity: f64, mut pass: F) -> Result<Crossing>
where
    F: FnMut(f64) -> Result<bool>,
{
    let flags = grid.iter().map(|&x| pass(x)).collect::<Result<Vec<bool>>>()?;
    let first_fail = flags.iter().position(|&ok| !ok);
    if let Some(k) = first_fail {
        if flags[k..].iter().any(|&ok| ok) {
            return Err(Error::NonMonotone {
                fidelity,
                detail: format!("pass/fail pattern on the scan grid is {flags:?}"),
            });
        }
    }
    match first_fail {
        Some(0) => Ok(Crossing::NeverPasses),
        None => Ok(Crossing::AlwaysPasses(*grid.last().expect("non-empty scan grid"))),
        Some(k) => {
            let (mut lo, mut hi) = (grid[k - 1], grid[k]);
            while hi - lo > BISECTION_TOL * lo {
                let mid = 0.5 * (lo + hi);
                if pass(mid)? {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(Crossing::At(0.5 * (lo + hi)))
        }
    }
}

/// Largest `p_g` for which pumping at channel fidelity `fidelity` still meets the conditions.
pub fn threshold_pg(fidelity: f64, schedule: PumpSchedule, rule: PmRule, cond: &ThresholdConditions) -> Result<f64> {
    let channel = ChannelParams::new(fidelity)?;
    match bisect_crossing(&scan_grid(), fidelity, |p| passes(&channel, schedule, p, rule, cond))? {
        Crossing::NeverPasses => Ok(0.0),
        Crossing::At(p) | Crossing::AlwaysPasses(p) => Ok(p),
    }
}

/// One threshold per grid point; per-point errors are kept in place.
pub fn threshold_curve(
    schedule: PumpSchedule,
    f_grid: &[f64],
    rule: PmRule,
    cond: &ThresholdConditions,
) -> Vec<(f64, Result<f64>)> {
    f_grid
        .par_iter()
        .map(|&f| (f, threshold_pg(f, schedule, rule, cond)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ttg::TtgType;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn closed_form_examples() {
        let p = 1e-3;
        let f = FidelityVector::new([1.0 - 8.0 * p / 15.0, 4.0 * p / 15.0, 2.0 * p / 15.0, 2.0 * p / 15.0]).unwrap();
        let q = q_values(&f, p, p);
        assert!(rel(q.qa, 71.0 * p / 15.0) < 1e-12);
        assert!(rel(q.qb, 82.0 * p / 15.0) < 1e-12);
        assert!(rel(q.qc, 74.0 * p / 15.0) < 1e-12);
        assert!(rel(q.qab, 23.0 * p / 15.0) < 1e-12);

        assert_eq!(q_values(&FidelityVector::PERFECT, 0.0, 0.0), QTuple::default());

        let f = FidelityVector::new([0.997, 1e-3, 1e-3, 1e-3]).unwrap();
        let q = q_values(&f, 0.0, 0.0);
        assert!(rel(q.qa, 8e-3) < 1e-12 && rel(q.qb, 4e-3) < 1e-12 && rel(q.qc, 4e-3) < 1e-12);
        assert_eq!(q.qab, 0.0);
    }

    #[test]
    fn generic_zero() {
        let q = q_values_generic(&[GateAggregates::default(); 8], 0.0, 0.0);
        assert_eq!(q, QTuple::default());
    }

    #[test]
    fn baseline_coefficients() {
        let q = raussendorf_baseline(15.0);
        assert!((q.qa - 46.0).abs() < 1e-12);
        assert!((q.qb - 44.0).abs() < 1e-12);
        assert!((q.qc - 44.0).abs() < 1e-12);
        for x in [q.qab, q.qac, q.qbb] {
            assert!((x - 8.0).abs() < 1e-12);
        }
    }

    #[test]
    fn generic_matches_closed_form() {
        let f = FidelityVector::new([0.999, 4e-4, 3e-4, 3e-4]).unwrap();
        let (p_g, p_m) = (2e-3, 1e-3);
        let per_gate: [GateAggregates; 8] =
            std::array::from_fn(|i| TtgType::for_position(i + 1).unwrap().uniform_aggregates(&f, p_g, p_m));
        let a = q_values_generic(&per_gate, 0.0, p_m);
        let b = q_values(&f, p_g, p_m);
        for (x, y) in a.to_vec().into_iter().zip(b.to_vec()) {
            assert!((x - y).abs() < 1e-15, "{x} vs {y}");
        }
    }

    #[test]
    fn strict_boundary() {
        let cond = ThresholdConditions::standard();
        assert!(check_ft(&QTuple::default(), &cond));
        assert!(!check_ft(&raussendorf_baseline(0.0075), &cond));
        assert!(check_ft(&raussendorf_baseline(0.0074), &cond));
        assert!(ThresholdConditions::with_margin(0.0).is_err());
        assert!(ThresholdConditions::with_margin(1.5).is_err());
    }

    #[test]
    fn pm_rule_parsing() {
        assert_eq!("equal".parse::<PmRule>().unwrap(), PmRule::Equal);
        assert_eq!("four_fifteenths".parse::<PmRule>().unwrap(), PmRule::FourFifteenths);
        assert_eq!("0.001".parse::<PmRule>().unwrap(), PmRule::Fixed(0.001));
        assert!("often".parse::<PmRule>().is_err());
        assert!("1.5".parse::<PmRule>().is_err());
    }

    #[test]
    fn bisection_flags_two_crossings() {
        let grid = [1.0, 2.0, 4.0, 8.0];
        let r = bisect_crossing(&grid, 0.9, |x| Ok(x < 1.5 || x > 6.0));
        assert!(matches!(r, Err(Error::NonMonotone { .. })));
        assert_eq!(bisect_crossing(&grid, 0.9, |_| Ok(false)).unwrap(), Crossing::NeverPasses);
        assert_eq!(bisect_crossing(&grid, 0.9, |_| Ok(true)).unwrap(), Crossing::AlwaysPasses(8.0));
        let Crossing::At(x) = bisect_crossing(&grid, 0.9, |x| Ok(x < 3.0)).unwrap() else {
            panic!("expected a crossing");
        };
        assert!(rel(x, 3.0) < BISECTION_TOL);
    }

    #[test]
    fn threshold_at_unit_fidelity() {
        let cond = ThresholdConditions::standard();
        let s = PumpSchedule::double(1, 2, 2);
        let equal = threshold_pg(1.0, s, PmRule::Equal, &cond).unwrap();
        assert!((0.00255..=0.00265).contains(&equal), "{equal}");
        let ff = threshold_pg(1.0, s, PmRule::FourFifteenths, &cond).unwrap();
        assert!((0.00495..=0.00505).contains(&ff), "{ff}");
    }

    #[test]
    fn empty_curve() {
        let cond = ThresholdConditions::standard();
        assert!(threshold_curve(PumpSchedule::double(1, 2, 2), &[], PmRule::Equal, &cond).is_empty());
    }
}
