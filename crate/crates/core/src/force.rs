//! Orientation-averaged energy shifts, gradient forces and the two-beam
//! interference check.
//!
//! Each contribution to the shift is evaluated as a complex number and only
//! its real part enters the total; the imaginary remainder is reported and
//! must be negligible. Taking `Re` silently would hide exactly the kind of
//! convention error the realness argument is about.

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::constants::{
    ALPHA_SHIFT_FACTOR, A_SHIFT_FACTOR, G_SHIFT_FACTOR, SPEED_OF_LIGHT, VACUUM_PERMITTIVITY,
};
use crate::error::{Error, Result};
use crate::molecule::ResponseTensors;
use crate::radiation::{amplitude_squared, field_densities, intensity_at, intensity_gradient, BeamMode, BeamProfile, Handedness};
use crate::rotavg::{averaged_observable, so3_sample_observable_sum, SampledScalar};
use crate::scalar::{ratio, Real, Scalar};
use crate::tensor::{outer_product, Tensor, Vector3};
use crate::tolerances::Tolerances;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyShift<S> {
    /// J. Sum of the three parts.
    pub total: S,
    pub part_alpha: S,
    #[serde(rename = "part_G")]
    pub part_g: S,
    #[serde(rename = "part_A")]
    pub part_a: S,
    /// |Im| of the summed complex contributions, J.
    pub residual_imag: S,
}

fn factor<S: Scalar>((num, den): (i64, i64)) -> S {
    S::from_ratio(&ratio(num, den))
}

fn i_unit<S: Scalar>() -> Complex<S> {
    Complex::new(S::zero(), S::one())
}

/// Cycle-averaged shift of an isotropically oriented molecule in `beam` at
/// local intensity `intensity` (W/m²), rejecting non-real results at the
/// default realness tolerance.
pub fn energy_shift<S: Scalar>(beam: &BeamMode<S>, intensity: &S, tensors: &ResponseTensors<S>) -> Result<EnergyShift<S>> {
    energy_shift_with(beam, intensity, tensors, Tolerances::default().realness)
}

pub fn energy_shift_with<S: Scalar>(
    beam: &BeamMode<S>,
    intensity: &S,
    tensors: &ResponseTensors<S>,
    realness_tol: f64,
) -> Result<EnergyShift<S>> {
    let e0_sq = amplitude_squared(intensity);
    // E₀B₀ = E₀²/c.
    let e0_b0 = e0_sq.clone() / S::from_f64_lossless(SPEED_OF_LIGHT);
    let e_bar = beam.e.conj();

    let alpha = averaged_observable(&tensors.alpha, &[e_bar.clone(), beam.e.clone()])?;
    let g = i_unit::<S>() * averaged_observable(&tensors.g_bar, &[e_bar.clone(), beam.b.clone()])?;
    let a = i_unit::<S>() * averaged_observable(&tensors.a, &[e_bar, beam.e.clone(), beam.wavevector.clone()])?;

    let c_alpha = alpha * (factor::<S>(ALPHA_SHIFT_FACTOR) * e0_sq.clone());
    let c_g = g * (factor::<S>(G_SHIFT_FACTOR) * e0_b0);
    let c_a = a * (factor::<S>(A_SHIFT_FACTOR) * e0_sq);

    let part_alpha = c_alpha.re.clone();
    let part_g = c_g.re.clone();
    let part_a = c_a.re.clone();
    let total = part_alpha.clone() + part_g.clone() + part_a.clone();
    let residual_imag = (c_alpha.im + c_g.im + c_a.im).abs();
    if !residual_imag.negligible(&total, realness_tol) {
        return Err(Error::ImaginaryResidual {
            residual: residual_imag.approx_f64(),
            total: total.approx_f64(),
        });
    }
    Ok(EnergyShift {
        total,
        part_alpha,
        part_g,
        part_a,
        residual_imag,
    })
}

/// `ΔW(L) − ΔW(R)` for two beams identical except for handedness.
pub fn discriminatory_shift<S: Scalar>(
    tensors: &ResponseTensors<S>,
    left: &BeamMode<S>,
    right: &BeamMode<S>,
    intensity: &S,
) -> Result<S> {
    check_pair(left, right)?;
    let l = energy_shift(left, intensity, tensors)?;
    let r = energy_shift(right, intensity, tensors)?;
    Ok(l.total - r.total)
}

fn check_pair<S: Scalar>(left: &BeamMode<S>, right: &BeamMode<S>) -> Result<()> {
    if left.wavevector != right.wavevector || left.omega != right.omega || left.amplitude != right.amplitude {
        return Err(Error::BeamPairMismatch(
            "beams differ in wave-vector, frequency or amplitude".into(),
        ));
    }
    let tol = Tolerances::default().beam_geometry;
    match (left.handedness, right.handedness) {
        (Handedness::Left, Handedness::Right) => {
            if left.e.conj().max_abs_diff(&right.e) > tol || left.b.conj().max_abs_diff(&right.b) > tol {
                return Err(Error::BeamPairMismatch(
                    "right-handed polarization is not the conjugate of the left-handed one".into(),
                ));
            }
        }
        (Handedness::Linear { .. }, Handedness::Linear { .. }) => {
            if left.e.max_abs_diff(&right.e) > tol {
                return Err(Error::BeamPairMismatch("linear pair with different polarizations".into()));
            }
        }
        (l, r) => {
            return Err(Error::BeamPairMismatch(format!(
                "expected an L/R pair or two identical linear beams, got {l:?} and {r:?}"
            )))
        }
    }
    Ok(())
}

/// Coefficients of `F = a∇w + b∇h`, with `w = I/c` and `h = σI/(cω)`:
/// `a = Tr α/(6ε₀)` (m³) and `b = ω Tr Ḡ/(3cε₀)` (m³·s⁻¹ scaled by the
/// helicity-density normalization). `b` is signed; the ± of the force law is
/// the beam helicity σ carried by `h`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Eq1Coefficients<S> {
    pub a: S,
    pub b: S,
}

pub fn eq1_coefficients<S: Scalar>(tensors: &ResponseTensors<S>) -> Eq1Coefficients<S> {
    let eps0 = S::from_f64_lossless(VACUUM_PERMITTIVITY);
    let c = S::from_f64_lossless(SPEED_OF_LIGHT);
    let a = tensors.trace_alpha() / (S::from_int(6) * eps0.clone());
    let b = tensors.omega.clone() * tensors.trace_g_bar() / (S::from_int(3) * c * eps0);
    Eq1Coefficients { a, b }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForceDecomposition<S> {
    /// α part, along ∇w. N.
    pub grad_w: [S; 3],
    /// Ḡ part, along ∇h. N.
    pub grad_h: [S; 3],
    /// A part; vanishes after orientational averaging. N.
    pub quadrupole: [S; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForceResult<S> {
    pub position: [S; 3],
    pub intensity: S,
    pub force: [S; 3],
    pub decomposition: ForceDecomposition<S>,
}

impl<S: Real> ForceResult<S> {
    /// |grad_h part|, the chirality-discriminating force magnitude.
    pub fn chiral_magnitude(&self) -> S {
        norm(&self.decomposition.grad_h)
    }
}

pub(crate) fn norm<S: Real>(v: &[S; 3]) -> S {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// `F(r) = −∇ΔW(r)`. The shift is linear in the local intensity, so the force
/// is the per-intensity shift times the analytic `−∇I`.
pub fn gradient_force<S: Real>(
    profile: &BeamProfile<S>,
    beam: &BeamMode<S>,
    tensors: &ResponseTensors<S>,
    r: &[S; 3],
) -> Result<ForceResult<S>> {
    let per_intensity = energy_shift(beam, &S::one(), tensors)?;
    let grad = intensity_gradient(profile, r);
    let along = |k: S| grad.map(|g| -k * g);
    let decomposition = ForceDecomposition {
        grad_w: along(per_intensity.part_alpha),
        grad_h: along(per_intensity.part_g),
        quadrupole: along(per_intensity.part_a),
    };
    let force = [0, 1, 2].map(|c| decomposition.grad_w[c] + decomposition.grad_h[c] + decomposition.quadrupole[c]);
    Ok(ForceResult {
        position: *r,
        intensity: intensity_at(profile, r).intensity,
        force,
        decomposition,
    })
}

/// `a∇w + b∇h` built from [`eq1_coefficients`] and the field densities'
/// gradients; equals [`gradient_force`] without its (vanishing) quadrupole part.
pub fn eq1_force<S: Real>(profile: &BeamProfile<S>, beam: &BeamMode<S>, tensors: &ResponseTensors<S>, r: &[S; 3]) -> ([S; 3], [S; 3]) {
    let coefficients = eq1_coefficients(tensors);
    let grad_i = intensity_gradient(profile, r);
    // ∇w and ∇h are the field densities evaluated with ∇I in place of I.
    let grads = grad_i.map(|g| field_densities(beam, &g));
    (
        grads.clone().map(|d| coefficients.a * d.w),
        grads.map(|d| coefficients.b * d.h),
    )
}

/// Central-difference force `−(ΔW(r + hû) − ΔW(r − hû))/2h` along each axis.
pub fn finite_difference_force<S: Real>(
    profile: &BeamProfile<S>,
    beam: &BeamMode<S>,
    tensors: &ResponseTensors<S>,
    r: &[S; 3],
    step: S,
) -> Result<[S; 3]> {
    let shift_at = |p: [S; 3]| -> Result<S> { Ok(energy_shift(beam, &intensity_at(profile, &p).intensity, tensors)?.total) };
    let mut force = [S::zero(); 3];
    for (axis, f) in force.iter_mut().enumerate() {
        let (mut plus, mut minus) = (*r, *r);
        plus[axis] = plus[axis] + step;
        minus[axis] = minus[axis] - step;
        *f = -(shift_at(plus)? - shift_at(minus)?) / (step + step);
    }
    Ok(force)
}

/// One term of the two-beam interference sum: a coefficient and the field
/// vectors contracted with the averaged product tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct InterferenceTerm<S> {
    pub label: String,
    pub coefficient: Complex<S>,
    pub fields: Vec<Vector3<S>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairingValue<S> {
    pub label: String,
    pub value: Complex<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterferenceCheck<S> {
    pub rank4_value: Complex<S>,
    pub rank5_value: Complex<S>,
    pub rank4_pairings: Vec<PairingValue<S>>,
    pub rank5_pairings: Vec<PairingValue<S>>,
}

impl<S: Scalar> InterferenceCheck<S> {
    pub fn max_abs(&self) -> f64 {
        self.rank4_pairings
            .iter()
            .chain(&self.rank5_pairings)
            .map(|p| p.value.to_f64_norm())
            .chain([self.rank4_value.to_f64_norm(), self.rank5_value.to_f64_norm()])
            .fold(0.0, f64::max)
    }

    pub fn is_exactly_zero(&self) -> bool {
        self.rank4_pairings
            .iter()
            .chain(&self.rank5_pairings)
            .all(|p| p.value.is_zero())
            && self.rank4_value.is_zero()
            && self.rank5_value.is_zero()
    }
}

trait NormF64 {
    fn to_f64_norm(&self) -> f64;
}

impl<S: Scalar> NormF64 for Complex<S> {
    fn to_f64_norm(&self) -> f64 {
        self.re.approx_f64().hypot(self.im.approx_f64())
    }
}

/// Every α–G and α–A interference term for scattering between two modes.
///
/// For a photon annihilated in mode `s` and created in mode `t`, the E1²
/// amplitude is `ē_t·α·e_s`. The E1M1 amplitude has the magnetic coupling at
/// either vertex (`b_s` absorbed or `b̄_t` emitted) and the E1E2 amplitude the
/// quadrupole at either vertex with a factor `i k_s` or `−i k_t`. Multiplying
/// the E1² amplitude by the conjugate of each chiral amplitude, with
/// `G* = −G` for the purely imaginary G, gives per direction
///
/// ```text
/// rank 4:  −(ē_t e_s e_t b̄_s)   −(ē_t e_s ē_s b_t)          against α⊗G
/// rank 5:  −i(ē_t e_s e_t ē_s k_s)   +i(ē_t e_s ē_s e_t k_t)  against α⊗A
/// ```
///
/// and both directions `1→2` and `2→1` are listed.
pub fn interference_terms<S: Scalar>(beam1: &BeamMode<S>, beam2: &BeamMode<S>) -> (Vec<InterferenceTerm<S>>, Vec<InterferenceTerm<S>>) {
    let one = Complex::new(S::one(), S::zero());
    let i = i_unit::<S>();
    let mut rank4 = Vec::new();
    let mut rank5 = Vec::new();
    for (name, s, t) in [("1->2", beam1, beam2), ("2->1", beam2, beam1)] {
        let (es, bs, ks) = (&s.e, &s.b, &s.wavevector);
        let (et, bt, kt) = (&t.e, &t.b, &t.wavevector);
        rank4.push(InterferenceTerm {
            label: format!("{name} M1 absorbed"),
            coefficient: -one.clone(),
            fields: vec![et.conj(), es.clone(), et.clone(), bs.conj()],
        });
        rank4.push(InterferenceTerm {
            label: format!("{name} M1 emitted"),
            coefficient: -one.clone(),
            fields: vec![et.conj(), es.clone(), es.conj(), bt.clone()],
        });
        rank5.push(InterferenceTerm {
            label: format!("{name} E2 absorbed"),
            coefficient: -i.clone(),
            fields: vec![et.conj(), es.clone(), et.clone(), es.conj(), ks.clone()],
        });
        rank5.push(InterferenceTerm {
            label: format!("{name} E2 emitted"),
            coefficient: i.clone(),
            fields: vec![et.conj(), es.clone(), es.conj(), et.clone(), kt.clone()],
        });
    }
    (rank4, rank5)
}

/// Molecule-frame product tensors `α⊗G` (with the physical, imaginary G) and `α⊗A`.
pub fn interference_tensors<S: Scalar>(tensors: &ResponseTensors<S>) -> Result<(Tensor<S>, Tensor<S>)> {
    Ok((
        outer_product(&tensors.alpha, &tensors.g_physical())?,
        outer_product(&tensors.alpha, &tensors.a)?,
    ))
}

/// Orientation-averaged α–G (rank 4) and α–A (rank 5) interference terms for
/// two distinct beams, per pairing and summed.
pub fn two_beam_interference_check<S: Scalar>(
    beam1: &BeamMode<S>,
    beam2: &BeamMode<S>,
    tensors: &ResponseTensors<S>,
) -> Result<InterferenceCheck<S>> {
    if beam1 == beam2 {
        return Err(Error::BeamPairMismatch("interference needs two distinct modes".into()));
    }
    let (t4, t5) = interference_tensors(tensors)?;
    let (terms4, terms5) = interference_terms(beam1, beam2);
    let evaluate = |tensor: &Tensor<S>, terms: &[InterferenceTerm<S>]| -> Result<(Vec<PairingValue<S>>, Complex<S>)> {
        let mut total = Complex::zero();
        let mut values = Vec::with_capacity(terms.len());
        for term in terms {
            let value = term.coefficient.clone() * averaged_observable(tensor, &term.fields)?;
            total = total + value.clone();
            values.push(PairingValue { label: term.label.clone(), value });
        }
        Ok((values, total))
    };
    let (rank4_pairings, rank4_value) = evaluate(&t4, &terms4)?;
    let (rank5_pairings, rank5_value) = evaluate(&t5, &terms5)?;
    Ok(InterferenceCheck {
        rank4_value,
        rank5_value,
        rank4_pairings,
        rank5_pairings,
    })
}

/// Monte Carlo estimates of the summed rank-4 and rank-5 interference values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampledInterference {
    pub rank4: SampledScalar,
    pub rank5: SampledScalar,
}

/// [`two_beam_interference_check`] totals by SO(3) sampling; the rank-5 sum
/// uses stream `seed + 1`.
pub fn sampled_interference_check<S: Real>(
    beam1: &BeamMode<S>,
    beam2: &BeamMode<S>,
    tensors: &ResponseTensors<S>,
    n_samples: usize,
    seed: u64,
) -> Result<SampledInterference> {
    let (t4, t5) = interference_tensors(tensors)?;
    let (terms4, terms5) = interference_terms(beam1, beam2);
    let pack = |terms: Vec<InterferenceTerm<S>>| terms.into_iter().map(|t| (t.coefficient, t.fields)).collect::<Vec<_>>();
    Ok(SampledInterference {
        rank4: so3_sample_observable_sum(&t4, &pack(terms4), n_samples, seed)?,
        rank5: so3_sample_observable_sum(&t5, &pack(terms5), n_samples, seed.wrapping_add(1))?,
    })
}

/// Counter-propagating beams along ±ẑ with orthogonal linear polarizations:
/// `e₁ = x̂, b₁ = ŷ` and `e₂ = ŷ, b₂ = x̂`, wavenumber `k`. Exact for
/// rational `k`.
pub fn orthogonal_linear_pair<S: Scalar>(k: S) -> Result<(BeamMode<S>, BeamMode<S>)> {
    let omega = S::from_f64_lossless(SPEED_OF_LIGHT) * k.clone();
    let tol = Tolerances::default();
    let linear = |angle: f64| Handedness::Linear { angle };
    let beam1 = BeamMode::new(
        Vector3::z().scale(&k),
        Vector3::x(),
        Vector3::y(),
        S::one(),
        omega.clone(),
        linear(0.0),
        tol.beam_geometry,
        tol.dispersion_relation,
    )?;
    let beam2 = BeamMode::new(
        Vector3::z().scale(&-k),
        Vector3::y(),
        Vector3::x(),
        S::one(),
        omega,
        linear(std::f64::consts::FRAC_PI_2),
        tol.beam_geometry,
        tol.dispersion_relation,
    )?;
    Ok((beam1, beam2))
}
