//! Every numeric threshold used by checks and the `verify` suite.
//!
//! `CHIRAFORCE_TOLERANCE_SCALE` multiplies all upper-bound tolerances. The
//! circular non-nullity floor is a lower bound and is left unscaled.

use serde::Serialize;

pub const SCALE_ENV_VAR: &str = "CHIRAFORCE_TOLERANCE_SCALE";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Max componentwise |R·T − T| for isotropic tensors.
    pub rotation_invariance: f64,
    /// Generic double-precision identity checks (bilinearity, idempotence, symmetry).
    pub identity: f64,
    /// Unit norms, transversality, b = k̂ × e.
    pub beam_geometry: f64,
    /// ω = c|k|, relative.
    pub dispersion_relation: f64,
    /// Rank-2 average against (Tr/3)δ.
    pub rank2_average: f64,
    /// Monte Carlo agreement, in standard errors.
    pub standard_errors: f64,
    /// |residual_imag| relative to |total|.
    pub realness: f64,
    /// |part_G| relative to |part_alpha| under linear polarization.
    pub linear_nullity: f64,
    /// |part_A| relative to |part_alpha|.
    pub quadrupole_nullity: f64,
    /// Handedness and mirror antisymmetry, relative.
    pub antisymmetry: f64,
    /// Two-beam interference contractions, relative to the natural scale of the product tensor.
    pub interference: f64,
    /// Analytic force against central finite differences, relative.
    pub finite_difference: f64,
    /// Static polarizability against finite-field perturbation, relative.
    pub finite_field: f64,
    /// Absolute tolerance on the 1/α_fs ratio.
    pub fine_structure_ratio: f64,
    /// d³ force scaling and log-log slope, relative.
    pub scaling: f64,
    /// Lower bound on |part_G| / |part_alpha| for circular light on chiral models.
    pub circular_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rotation_invariance: 1e-12,
            identity: 1e-12,
            beam_geometry: 1e-12,
            dispersion_relation: 1e-9,
            rank2_average: 1e-14,
            standard_errors: 3.0,
            realness: 1e-10,
            linear_nullity: 1e-10,
            quadrupole_nullity: 1e-12,
            antisymmetry: 1e-12,
            interference: 1e-12,
            finite_difference: 1e-6,
            finite_field: 1e-6,
            fine_structure_ratio: 1e-6,
            scaling: 1e-9,
            circular_floor: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn scaled(factor: f64) -> Self {
        let d = Self::default();
        Self {
            rotation_invariance: d.rotation_invariance * factor,
            identity: d.identity * factor,
            beam_geometry: d.beam_geometry * factor,
            dispersion_relation: d.dispersion_relation * factor,
            rank2_average: d.rank2_average * factor,
            standard_errors: d.standard_errors * factor,
            realness: d.realness * factor,
            linear_nullity: d.linear_nullity * factor,
            quadrupole_nullity: d.quadrupole_nullity * factor,
            antisymmetry: d.antisymmetry * factor,
            interference: d.interference * factor,
            finite_difference: d.finite_difference * factor,
            finite_field: d.finite_field * factor,
            fine_structure_ratio: d.fine_structure_ratio * factor,
            scaling: d.scaling * factor,
            circular_floor: d.circular_floor,
        }
    }

    /// Defaults scaled by the environment variable, if set and parseable.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var(SCALE_ENV_VAR) {
            Ok(raw) => {
                let factor: f64 = raw
                    .trim()
                    .parse()
                    .map_err(|_| format!("{SCALE_ENV_VAR}={raw:?} is not a number"))?;
                if !(factor.is_finite() && factor > 0.0) {
                    return Err(format!("{SCALE_ENV_VAR} must be positive, got {factor}"));
                }
                Ok(Self::scaled(factor))
            }
            Err(_) => Ok(Self::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_leaves_floor_alone() {
        let t = Tolerances::scaled(10.0);
        assert_eq!(t.realness, 1e-9);
        assert_eq!(t.circular_floor, 1e-6);
        assert_eq!(Tolerances::scaled(1.0), Tolerances::default());
    }
}
