//! Infidelity contours of pumped pairs over the `(F, p_g)` plane.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{bisect_crossing, noise_for, scan_grid, Crossing, PmRule, SCAN_START};
use crate::error::{Error, Result};
use crate::pauli::ChannelParams;
use crate::purify::{PumpSchedule, Purifier};

/// Number of doublings of `1 - F` in the fidelity scan (`SCAN_START · 2^19 ≈ 0.52`).
const F_SCAN_DOUBLINGS: u32 = 19;

/// One traced locus `(F, p_g)` for one schedule and level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourCurve {
    pub schedule: PumpSchedule,
    pub level: f64,
    pub points: Vec<(f64, f64)>,
    /// Grid points where the scan found more than one crossing.
    pub flagged: Vec<f64>,
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("level", format!("must lie in (0, 1], got {level}")))
    }
}

/// Output infidelity after pumping; a vanishing success probability counts as 1.
pub fn pumped_infidelity(channel: &ChannelParams, schedule: PumpSchedule, p_g: f64, rule: PmRule) -> Result<f64> {
    let noise = noise_for(p_g, rule)?;
    match Purifier::new(&noise).pump(channel, schedule) {
        Ok(r) => Ok(r.f_out.infidelity()),
        Err(Error::SuccessUnderflow { .. }) => Ok(1.0),
        Err(e) => Err(e),
    }
}

/// Gate error at which the pumped infidelity reaches `level` at fixed `F`.
pub fn infidelity_crossing_pg(fidelity: f64, schedule: PumpSchedule, rule: PmRule, level: f64) -> Result<Option<f64>> {
    check_level(level)?;
    let channel = ChannelParams::new(fidelity)?;
    let found = bisect_crossing(&scan_grid(), fidelity, |p| {
        Ok(pumped_infidelity(&channel, schedule, p, rule)? < level)
    })?;
    Ok(match found {
        Crossing::At(p) => Some(p),
        Crossing::NeverPasses | Crossing::AlwaysPasses(_) => None,
    })
}

/// Channel fidelity at which the pumped infidelity reaches `level` at fixed `p_g`.
pub fn infidelity_crossing_f(p_g: f64, schedule: PumpSchedule, rule: PmRule, level: f64) -> Result<Option<f64>> {
    check_level(level)?;
    let noise = noise_for(p_g, rule)?;
    let purifier = Purifier::new(&noise);
    // Scan in the channel infidelity 1 - F, which the pumped infidelity increases with.
    let grid: Vec<f64> = (0..=F_SCAN_DOUBLINGS).map(|k| SCAN_START * f64::from(1u32 << k)).collect();
    let found = bisect_crossing(&grid, 1.0, |d| {
        let channel = ChannelParams::new(1.0 - d)?;
        let infidelity = match purifier.pump(&channel, schedule) {
            Ok(r) => r.f_out.infidelity(),
            Err(Error::SuccessUnderflow { .. }) => 1.0,
            Err(e) => return Err(e),
        };
        Ok(infidelity < level)
    })?;
    Ok(match found {
        Crossing::At(d) => Some(1.0 - d),
        Crossing::NeverPasses | Crossing::AlwaysPasses(_) => None,
    })
}

/// For each schedule, the locus where the pumped infidelity equals `level`,
/// bisected in `p_g` per channel fidelity on `f_grid`.
pub fn contour_infidelity(family: &[PumpSchedule], level: f64, f_grid: &[f64], rule: PmRule) -> Result<Vec<ContourCurve>> {
    check_level(level)?;
    family
        .iter()
        .map(|&schedule| {
            let found = f_grid
                .par_iter()
                .map(|&f| (f, infidelity_crossing_pg(f, schedule, rule, level)))
                .collect::<Vec<_>>();
            let mut curve = ContourCurve {
                schedule,
                level,
                points: Vec::new(),
                flagged: Vec::new(),
            };
            for (f, r) in found {
                match r {
                    Ok(Some(p)) => curve.points.push((f, p)),
                    Ok(None) => {}
                    Err(Error::NonMonotone { .. }) => curve.flagged.push(f),
                    Err(e) => return Err(e),
                }
            }
            Ok(curve)
        })
        .collect()
}
