//! Rotationally averaged optical energy shifts and chirality-discriminating
//! gradient forces on model molecules.
//!
//! The numerical core is generic over [`Scalar`]: `f32`, `f64`, or exact
//! [`BigRational`]. Routines that need square roots, trigonometry or
//! exponentials are bounded on [`Real`]. The aliases below fix the common
//! choices.

pub mod cli;
pub mod constants;
pub mod error;
pub mod estimates;
pub mod exact;
pub mod force;
pub mod io;
pub mod isotropic;
pub mod molecule;
pub mod radiation;
pub mod rotation;
pub mod rotavg;
pub mod scalar;
pub mod tensor;
pub mod tolerances;
pub mod verify;

pub use num_bigint::BigInt;
pub use num_complex::Complex;
pub use num_rational::BigRational;

pub use error::{Error, Result};
pub use estimates::{estimate_ratio, scaling_sweep, EstimateReport, ForceProbe, SweepTable};
pub use force::{
    discriminatory_shift, energy_shift, eq1_coefficients, gradient_force, two_beam_interference_check,
    EnergyShift, Eq1Coefficients, ForceResult, InterferenceCheck,
};
pub use isotropic::{isotropic_basis, IsotropicBasis};
pub use molecule::{
    build_response_tensors, mirror_molecule, model_from_dimension, ExcitedState, MolecularModel,
    ResponseTensors,
};
pub use radiation::{BeamMode, BeamProfile, Frame, Handedness};
pub use rotation::Rotation3;
pub use rotavg::{
    averaged_observable, rotational_average, so3_sample_average, so3_sample_average_batch,
    so3_sample_observable, so3_sample_observable_sum, AverageMethod, AverageResult, SampledScalar,
};
pub use scalar::{Real, Scalar};
pub use tensor::{
    full_contraction, kronecker_delta, levi_civita, outer_of_vectors, outer_product, Tensor,
    Vector3,
};
pub use tolerances::Tolerances;

pub type Tensor64 = Tensor<f64>;
pub type Tensor32 = Tensor<f32>;
pub type ExactTensor = Tensor<BigRational>;
pub type Vector64 = Vector3<f64>;
pub type ExactVector = Vector3<BigRational>;
pub type Rotation64 = Rotation3<f64>;
pub type ExactRotation = Rotation3<BigRational>;
