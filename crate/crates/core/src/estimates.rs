//! Order-of-magnitude estimates from the molecular dimension alone.

use serde::Serialize;

use crate::constants::{INVERSE_FINE_STRUCTURE, REFERENCE_DIMENSION, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::force::gradient_force;
use crate::molecule::model_from_dimension;
use crate::radiation::{BeamMode, BeamProfile, Frame, Handedness};

/// Beam, profile and probe position used to turn a response into a force.
#[derive(Clone, Debug)]
pub struct ForceProbe {
    pub beam: BeamMode<f64>,
    pub profile: BeamProfile<f64>,
    pub position: [f64; 3],
}

impl ForceProbe {
    /// Left-circular 1064 nm beam, 1 W focused to a 1 µm waist, probed half a
    /// waist off axis.
    pub fn standard() -> Self {
        let waist = 1e-6;
        Self {
            beam: BeamMode::circular(Handedness::Left, &Frame::standard(), 1064e-9, 1.0)
                .expect("standard beam is valid"),
            profile: BeamProfile::gaussian(waist, 1.0, [0.0, 0.0, 1.0], [0.0; 3]).expect("standard profile is valid"),
            position: [0.5 * waist, 0.0, 0.0],
        }
    }

    /// Chiral (∇h) and achiral (∇w) force magnitudes for a molecule of size `d`.
    pub fn forces(&self, d: f64) -> Result<(f64, f64)> {
        let tensors = model_from_dimension(d, self.beam.omega)?;
        let f = gradient_force(&self.profile, &self.beam, &tensors, &self.position)?;
        let achiral = crate::force::norm(&f.decomposition.grad_w);
        Ok((f.chiral_magnitude(), achiral))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateReport {
    /// m.
    pub d: f64,
    /// C²·m²/J.
    pub trace_alpha: f64,
    /// Tr Ḡ / c, same units as Tr α.
    #[serde(rename = "trace_G_over_c")]
    pub trace_g_over_c: f64,
    pub ratio: f64,
    /// The ratio is fixed by construction to this pinned value.
    pub ratio_pinned_to: f64,
    pub reference_d: f64,
    /// Chiral force at `d` over chiral force at `reference_d`.
    pub reference_force_ratio: f64,
}

pub fn estimate_ratio(d: f64) -> Result<EstimateReport> {
    estimate_ratio_with(d, &ForceProbe::standard())
}

pub fn estimate_ratio_with(d: f64, probe: &ForceProbe) -> Result<EstimateReport> {
    let tensors = model_from_dimension(d, probe.beam.omega)?;
    let trace_alpha = tensors.trace_alpha();
    let trace_g_over_c = tensors.trace_g_bar() / SPEED_OF_LIGHT;
    let (chiral, _) = probe.forces(d)?;
    let (reference, _) = probe.forces(REFERENCE_DIMENSION)?;
    Ok(EstimateReport {
        d,
        trace_alpha,
        trace_g_over_c,
        ratio: trace_alpha / trace_g_over_c,
        ratio_pinned_to: INVERSE_FINE_STRUCTURE,
        reference_d: REFERENCE_DIMENSION,
        reference_force_ratio: chiral / reference,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub d: f64,
    /// N.
    pub chiral_force: f64,
    /// N.
    pub achiral_force: f64,
    /// Chiral force over that of the first row.
    pub ratio_to_first: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of ln|F_chiral| against ln d; absent for fewer
    /// than two distinct sizes.
    pub log_log_slope: Option<f64>,
}

pub fn scaling_sweep(d_values: &[f64], probe: &ForceProbe) -> Result<SweepTable> {
    if d_values.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one molecular dimension".into()));
    }
    let forces = d_values.iter().map(|&d| probe.forces(d)).collect::<Result<Vec<_>>>()?;
    let first = forces[0].0;
    let rows = d_values
        .iter()
        .zip(&forces)
        .map(|(&d, &(chiral, achiral))| SweepRow {
            d,
            chiral_force: chiral,
            achiral_force: achiral,
            ratio_to_first: chiral / first,
        })
        .collect();
    let points: Vec<(f64, f64)> = d_values.iter().zip(&forces).map(|(d, f)| (d.ln(), f.0.ln())).collect();
    Ok(SweepTable {
        rows,
        log_log_slope: least_squares_slope(&points),
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
