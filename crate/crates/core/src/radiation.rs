//! Polarization states, beam modes and focal-plane intensity profiles.
//!
//! Handedness follows the polarization formulas directly: in a right-handed
//! frame (î, ĵ, k̂),
//!
//! ```text
//! e(L) = (î + iĵ)/√2    b(L) = (ĵ − iî)/√2
//! e(R) = (î − iĵ)/√2    b(R) = (ĵ + iî)/√2
//! ```
//!
//! and the helicity sign σ is +1 for L, −1 for R, 0 for linear light. For any
//! valid beam `σ = Re(i ē·b)`, which [`BeamMode::new`] enforces.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::constants::{SPEED_OF_LIGHT, VACUUM_PERMITTIVITY};
use crate::error::{Error, Result};
use crate::scalar::{two, Real, Scalar};
use crate::tensor::Vector3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Handedness {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
    /// Linear polarization at `angle` radians from î towards ĵ.
    Linear { angle: f64 },
}

impl Handedness {
    pub fn helicity_sign(&self) -> i64 {
        match self {
            Handedness::Left => 1,
            Handedness::Right => -1,
            Handedness::Linear { .. } => 0,
        }
    }

    pub fn opposite(&self) -> Self {
        match self {
            Handedness::Left => Handedness::Right,
            Handedness::Right => Handedness::Left,
            linear => *linear,
        }
    }
}

/// Right-handed orthonormal triad (î, ĵ, k̂) with k̂ along propagation.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame<S> {
    pub i: Vector3<S>,
    pub j: Vector3<S>,
    pub k: Vector3<S>,
}

impl<S: Scalar> Frame<S> {
    pub fn standard() -> Self {
        Self {
            i: Vector3::x(),
            j: Vector3::y(),
            k: Vector3::z(),
        }
    }

    /// Validates orthonormality and handedness (`î × ĵ = k̂`).
    pub fn new(i: Vector3<S>, j: Vector3<S>, k: Vector3<S>, tol: f64) -> Result<Self> {
        if !(i.is_real() && j.is_real() && k.is_real()) {
            return Err(Error::InvalidFrame("frame vectors must be real".into()));
        }
        let one = Complex::<S>::one();
        let zero = Complex::<S>::zero();
        let checks = [
            ("|î|² = 1", i.dot(&i), one.clone()),
            ("|ĵ|² = 1", j.dot(&j), one.clone()),
            ("|k̂|² = 1", k.dot(&k), one.clone()),
            ("î·ĵ = 0", i.dot(&j), zero.clone()),
            ("ĵ·k̂ = 0", j.dot(&k), zero.clone()),
            ("k̂·î = 0", k.dot(&i), zero),
        ];
        for (what, got, want) in checks {
            if !(got.clone() - want).norm_sqr().negligible(&S::one(), tol * tol) {
                return Err(Error::InvalidFrame(format!("{what} violated (got {:.3e})", got.re.approx_f64())));
            }
        }
        let defect = i.cross(&j) - k.clone();
        if !defect.norm_sqr().negligible(&S::one(), tol * tol) {
            return Err(Error::InvalidFrame("î × ĵ ≠ k̂ (left-handed triad)".into()));
        }
        Ok(Self { i, j, k })
    }
}

impl<S: Real> Frame<S> {
    /// A deterministic right-handed frame whose k̂ is the normalized `axis`.
    pub fn from_axis(axis: [S; 3]) -> Result<Self> {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !(norm > S::zero()) {
            return Err(Error::InvalidFrame("propagation axis has zero length".into()));
        }
        let k = axis.map(|a| a / norm);
        // Helper: the coordinate axis least aligned with k̂.
        let helper_axis = (0..3)
            .min_by(|&a, &b| k[a].abs().partial_cmp(&k[b].abs()).unwrap())
            .unwrap();
        let mut helper = [S::zero(); 3];
        helper[helper_axis] = S::one();
        let along = helper[0] * k[0] + helper[1] * k[1] + helper[2] * k[2];
        let raw = [0, 1, 2].map(|c| helper[c] - along * k[c]);
        let rn = (raw[0] * raw[0] + raw[1] * raw[1] + raw[2] * raw[2]).sqrt();
        let i = raw.map(|x| x / rn);
        let kv = Vector3::real(k[0], k[1], k[2]);
        let iv = Vector3::real(i[0], i[1], i[2]);
        let jv = kv.cross(&iv);
        Self::new(iv, jv, kv, 1e-12)
    }
}

/// Circular polarization pair (e, b) in the given frame.
pub fn make_circular<S: Real>(handedness: Handedness, frame: &Frame<S>) -> Result<(Vector3<S>, Vector3<S>)> {
    let sign = match handedness {
        Handedness::Left => S::one(),
        Handedness::Right => -S::one(),
        Handedness::Linear { .. } => {
            return Err(Error::InvalidBeam("make_circular needs L or R handedness".into()))
        }
    };
    let inv_sqrt2 = S::one() / two::<S>().sqrt();
    let i_unit = Complex::new(S::zero(), sign);
    let e = (frame.i.clone() + frame.j.scale_complex(&i_unit)).scale(&inv_sqrt2);
    let b = (frame.j.clone() - frame.i.scale_complex(&i_unit)).scale(&inv_sqrt2);
    Ok((e, b))
}

/// Linear polarization from a (cos θ, sin θ) pair; exact scalars welcome.
pub fn make_linear_cs<S: Scalar>(cos: S, sin: S, frame: &Frame<S>) -> Result<(Vector3<S>, Vector3<S>)> {
    let norm = cos.clone() * cos.clone() + sin.clone() * sin.clone();
    if !(norm - S::one()).negligible(&S::one(), 1e-12) {
        return Err(Error::InvalidBeam("cos² + sin² must equal 1".into()));
    }
    let e = frame.i.scale(&cos) + frame.j.scale(&sin);
    let b = frame.k.cross(&e);
    Ok((e, b))
}

/// `e = cos θ î + sin θ ĵ`, `b = k̂ × e`.
pub fn make_linear<S: Real>(angle: S, frame: &Frame<S>) -> (Vector3<S>, Vector3<S>) {
    make_linear_cs(angle.cos(), angle.sin(), frame).expect("cos² + sin² = 1 to rounding")
}

/// Monochromatic plane-wave mode.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamMode<S> {
    /// Real wave-vector, rad/m.
    pub wavevector: Vector3<S>,
    pub e: Vector3<S>,
    pub b: Vector3<S>,
    /// Electric field amplitude E₀, V/m.
    pub amplitude: S,
    /// Angular frequency, rad/s.
    pub omega: S,
    pub handedness: Handedness,
}

impl<S: Scalar> BeamMode<S> {
    /// Validates transversality, unit norms, `ω b = c k × e`, `ω = c|k|` and
    /// that the handedness tag agrees with `Re(i ē·b)`.
    pub fn new(
        wavevector: Vector3<S>,
        e: Vector3<S>,
        b: Vector3<S>,
        amplitude: S,
        omega: S,
        handedness: Handedness,
        geometry_tol: f64,
        dispersion_tol: f64,
    ) -> Result<Self> {
        if !wavevector.is_real() {
            return Err(Error::InvalidBeam("wave-vector must be real".into()));
        }
        if !(omega > S::zero()) {
            return Err(Error::InvalidBeam("angular frequency must be positive".into()));
        }
        let c = S::from_f64_lossless(SPEED_OF_LIGHT);
        let k2 = wavevector.norm_sqr();
        let omega2 = omega.clone() * omega.clone();
        let dispersion = c.clone() * c.clone() * k2 - omega2.clone();
        if !dispersion.negligible(&omega2, 2.0 * dispersion_tol) {
            return Err(Error::InvalidBeam("ω ≠ c|k|".into()));
        }
        let one = S::one();
        for (name, v) in [("e", &e), ("b", &b)] {
            if !(v.norm_sqr() - one.clone()).negligible(&one, geometry_tol) {
                return Err(Error::InvalidBeam(format!("|{name}| ≠ 1")));
            }
        }
        // k·e and k·b, measured against |k|² to stay scale free.
        let kk = wavevector.norm_sqr();
        for (name, v) in [("k·e", &e), ("k·b", &b)] {
            let dot = wavevector.dot(v).norm_sqr();
            if !dot.negligible(&kk, geometry_tol * geometry_tol) {
                return Err(Error::InvalidBeam(format!("{name} ≠ 0 (not transverse)")));
            }
        }
        let cross = wavevector.cross(&e).scale(&c) - b.scale(&omega);
        if !cross.norm_sqr().negligible(&omega2, geometry_tol * geometry_tol) {
            return Err(Error::InvalidBeam("b ≠ k̂ × e".into()));
        }
        let helicity = (Complex::new(S::zero(), S::one()) * e.conj().dot(&b)).re;
        let expected = S::from_int(handedness.helicity_sign());
        if !(helicity.clone() - expected).negligible(&one, 1e3 * geometry_tol) {
            return Err(Error::InvalidBeam(format!(
                "handedness tag {handedness:?} disagrees with polarization helicity {:.6}",
                helicity.approx_f64()
            )));
        }
        Ok(Self {
            wavevector,
            e,
            b,
            amplitude,
            omega,
            handedness,
        })
    }

    /// σ of the handedness tag.
    pub fn helicity_sign(&self) -> S {
        S::from_int(self.handedness.helicity_sign())
    }

    /// Same mode with the opposite circular handedness: e and b conjugated.
    pub fn mirrored_handedness(&self) -> Self {
        Self {
            wavevector: self.wavevector.clone(),
            e: self.e.conj(),
            b: self.b.conj(),
            amplitude: self.amplitude.clone(),
            omega: self.omega.clone(),
            handedness: self.handedness.opposite(),
        }
    }

    /// Wave-vector times `c/ω`, the unit propagation direction.
    pub fn direction(&self) -> Vector3<S> {
        let c = S::from_f64_lossless(SPEED_OF_LIGHT);
        self.wavevector.scale(&(c / self.omega.clone()))
    }
}

impl<S: Real> BeamMode<S> {
    fn from_polarization(
        frame: &Frame<S>,
        (e, b): (Vector3<S>, Vector3<S>),
        wavelength: S,
        amplitude: S,
        handedness: Handedness,
    ) -> Result<Self> {
        if !(wavelength > S::zero()) {
            return Err(Error::InvalidBeam("wavelength must be positive".into()));
        }
        let k_mag = S::TAU() / wavelength;
        let omega = S::from(SPEED_OF_LIGHT).unwrap() * k_mag;
        Self::new(frame.k.scale(&k_mag), e, b, amplitude, omega, handedness, 1e-12, 1e-9)
    }

    pub fn circular(handedness: Handedness, frame: &Frame<S>, wavelength: S, amplitude: S) -> Result<Self> {
        let pol = make_circular(handedness, frame)?;
        Self::from_polarization(frame, pol, wavelength, amplitude, handedness)
    }

    pub fn linear(angle: S, frame: &Frame<S>, wavelength: S, amplitude: S) -> Result<Self> {
        let pol = make_linear(angle, frame);
        Self::from_polarization(
            frame,
            pol,
            wavelength,
            amplitude,
            Handedness::Linear { angle: angle.approx_f64() },
        )
    }

    pub fn with_handedness(handedness: Handedness, frame: &Frame<S>, wavelength: S, amplitude: S) -> Result<Self> {
        match handedness {
            Handedness::Linear { angle } => Self::linear(S::from(angle).unwrap(), frame, wavelength, amplitude),
            circular => Self::circular(circular, frame, wavelength, amplitude),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProfileKind<S> {
    /// Uniform intensity, W/m².
    PlaneWave { intensity: S },
    /// Focal-plane Gaussian: waist w₀ (m) and power P (W).
    Gaussian { waist: S, power: S },
}

/// Spatial intensity model; the Gaussian is evaluated in its focal plane
/// with no axial divergence.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamProfile<S> {
    pub kind: ProfileKind<S>,
    /// Real unit vector along propagation.
    pub axis: [S; 3],
    /// Focus position, m.
    pub focus: [S; 3],
}

impl<S: Real> BeamProfile<S> {
    pub fn gaussian(waist: S, power: S, axis: [S; 3], focus: [S; 3]) -> Result<Self> {
        if !(waist > S::zero()) || !(power > S::zero()) {
            return Err(Error::InvalidProfile("gaussian waist and power must be positive".into()));
        }
        Ok(Self {
            kind: ProfileKind::Gaussian { waist, power },
            axis: unit_axis(axis)?,
            focus,
        })
    }

    pub fn plane_wave(intensity: S, axis: [S; 3]) -> Result<Self> {
        if !(intensity >= S::zero()) {
            return Err(Error::InvalidProfile("intensity must be non-negative".into()));
        }
        Ok(Self {
            kind: ProfileKind::PlaneWave { intensity },
            axis: unit_axis(axis)?,
            focus: [S::zero(); 3],
        })
    }

    /// Transverse offset of `r` from the beam axis.
    pub fn transverse_offset(&self, r: &[S; 3]) -> [S; 3] {
        let d = [0, 1, 2].map(|c| r[c] - self.focus[c]);
        let along = d[0] * self.axis[0] + d[1] * self.axis[1] + d[2] * self.axis[2];
        [0, 1, 2].map(|c| d[c] - along * self.axis[c])
    }

    pub fn peak_intensity(&self) -> S {
        match &self.kind {
            ProfileKind::PlaneWave { intensity } => *intensity,
            ProfileKind::Gaussian { waist, power } => two::<S>() * *power / (S::PI() * *waist * *waist),
        }
    }
}

fn unit_axis<S: Real>(axis: [S; 3]) -> Result<[S; 3]> {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if !(n > S::zero()) {
        return Err(Error::InvalidProfile("axis has zero length".into()));
    }
    Ok(axis.map(|a| a / n))
}

/// Local intensity and the matching field amplitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalField<S> {
    /// W/m².
    pub intensity: S,
    /// E₀ = √(2I/(cε₀)), V/m.
    pub amplitude: S,
}

pub fn intensity_at<S: Real>(profile: &BeamProfile<S>, r: &[S; 3]) -> LocalField<S> {
    let intensity = match &profile.kind {
        ProfileKind::PlaneWave { intensity } => *intensity,
        ProfileKind::Gaussian { waist, .. } => {
            let rho = profile.transverse_offset(r);
            let rho2 = rho[0] * rho[0] + rho[1] * rho[1] + rho[2] * rho[2];
            profile.peak_intensity() * (-two::<S>() * rho2 / (*waist * *waist)).exp()
        }
    };
    LocalField {
        intensity,
        amplitude: amplitude_from_intensity(intensity),
    }
}

/// Analytic ∇I, W/m³. Zero for plane waves and on the Gaussian axis.
pub fn intensity_gradient<S: Real>(profile: &BeamProfile<S>, r: &[S; 3]) -> [S; 3] {
    match &profile.kind {
        ProfileKind::PlaneWave { .. } => [S::zero(); 3],
        ProfileKind::Gaussian { waist, .. } => {
            let rho = profile.transverse_offset(r);
            let i = intensity_at(profile, r).intensity;
            let factor = -S::from(4.0).unwrap() * i / (*waist * *waist);
            rho.map(|x| factor * x)
        }
    }
}

/// `E₀² = 2I/(cε₀)`; usable with exact scalars.
pub fn amplitude_squared<S: Scalar>(intensity: &S) -> S {
    let c = S::from_f64_lossless(SPEED_OF_LIGHT);
    let eps0 = S::from_f64_lossless(VACUUM_PERMITTIVITY);
    two::<S>() * intensity.clone() / (c * eps0)
}

pub fn amplitude_from_intensity<S: Real>(intensity: S) -> S {
    amplitude_squared(&intensity).sqrt()
}

/// Energy density `w` (J/m³) and helicity density `h` (J·s/m³).
#[derive(Clone, Debug, PartialEq)]
pub struct FieldDensities<S> {
    pub w: S,
    pub h: S,
}

/// `w = I/c`, `h = σI/(cω)`.
pub fn field_densities<S: Scalar>(beam: &BeamMode<S>, intensity: &S) -> FieldDensities<S> {
    let c = S::from_f64_lossless(SPEED_OF_LIGHT);
    let w = intensity.clone() / c.clone();
    let h = beam.helicity_sign() * intensity.clone() / (c * beam.omega.clone());
    FieldDensities { w, h }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn cx(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn circular_vectors_in_standard_frame() {
        let f = Frame::<f64>::standard();
        let (e, b) = make_circular(Handedness::Left, &f).unwrap();
        let want_e = Vector3::new(cx(FRAC_1_SQRT_2, 0.0), cx(0.0, FRAC_1_SQRT_2), cx(0.0, 0.0));
        let want_b = Vector3::new(cx(0.0, -FRAC_1_SQRT_2), cx(FRAC_1_SQRT_2, 0.0), cx(0.0, 0.0));
        assert!(e.max_abs_diff(&want_e) < 1e-15);
        assert!(b.max_abs_diff(&want_b) < 1e-15);

        let (e_r, _) = make_circular(Handedness::Right, &f).unwrap();
        let want_r = Vector3::new(cx(FRAC_1_SQRT_2, 0.0), cx(0.0, -FRAC_1_SQRT_2), cx(0.0, 0.0));
        assert!(e_r.max_abs_diff(&want_r) < 1e-15);
        assert_eq!(e_r, e.conj());
    }

    #[test]
    fn circular_b_is_k_cross_e() {
        let f = Frame::<f64>::from_axis([0.3, -1.2, 0.7]).unwrap();
        for h in [Handedness::Left, Handedness::Right] {
            let (e, b) = make_circular(h, &f).unwrap();
            assert!(f.k.cross(&e).max_abs_diff(&b) < 1e-12);
        }
        assert!(make_circular(Handedness::Linear { angle: 0.0 }, &f).is_err());
    }

    #[test]
    fn linear_axis_cases() {
        let f = Frame::<f64>::standard();
        let (e, b) = make_linear(0.0, &f);
        assert!(e.max_abs_diff(&Vector3::x()) < 1e-15 && b.max_abs_diff(&Vector3::y()) < 1e-15);
        let (e, b) = make_linear(FRAC_PI_2, &f);
        assert!(e.max_abs_diff(&Vector3::y()) < 1e-15);
        assert!(b.max_abs_diff(&-Vector3::x()) < 1e-15);
        for k in 0..12 {
            let (e, _) = make_linear(0.37 * k as f64, &f);
            assert!(e.is_real());
        }
    }

    #[test]
    fn exact_linear_polarization() {
        let f = Frame::<BigRational>::standard();
        let (e, b) = make_linear_cs(ratio(3, 5), ratio(4, 5), &f).unwrap();
        assert_eq!(e, Vector3::real(ratio(3, 5), ratio(4, 5), ratio(0, 1)));
        assert_eq!(b, Vector3::real(ratio(-4, 5), ratio(3, 5), ratio(0, 1)));
        assert!(make_linear_cs(ratio(1, 2), ratio(1, 2), &f).is_err());
    }

    #[test]
    fn bad_frames_rejected() {
        let left_handed = Frame::new(Vector3::<f64>::y(), Vector3::x(), Vector3::z(), 1e-12);
        assert!(left_handed.is_err());
        let skewed = Frame::new(
            Vector3::<f64>::real(1.0, 0.1, 0.0),
            Vector3::y(),
            Vector3::z(),
            1e-12,
        );
        assert!(skewed.is_err());
    }

    #[test]
    fn gaussian_intensity_values() {
        let p = BeamProfile::gaussian(1e-6, 0.1, [0.0, 0.0, 1.0], [0.0; 3]).unwrap();
        let peak = 2.0 * 0.1 / (std::f64::consts::PI * 1e-12);
        assert!((intensity_at(&p, &[0.0, 0.0, 3e-6]).intensity - peak).abs() < 1e-12 * peak);
        let r = 1e-6 / 2f64.sqrt();
        let at = intensity_at(&p, &[r, 0.0, 0.0]).intensity;
        assert!((at - peak * (-1.0f64).exp()).abs() < 1e-12 * peak);
        let g = intensity_gradient(&p, &[0.0, 0.0, 0.0]);
        assert_eq!(g, [0.0; 3]);
        assert!(BeamProfile::gaussian(0.0, 1.0, [0.0, 0.0, 1.0], [0.0; 3]).is_err());
    }

    #[test]
    fn plane_wave_is_uniform() {
        let p = BeamProfile::plane_wave(5e9, [0.0, 0.0, 1.0]).unwrap();
        for r in [[0.0; 3], [1.0, -2.0, 3.0]] {
            assert_eq!(intensity_at(&p, &r).intensity, 5e9);
            assert_eq!(intensity_gradient(&p, &r), [0.0; 3]);
        }
    }

    #[test]
    fn densities_follow_helicity_sign() {
        let f = Frame::<f64>::standard();
        let l = BeamMode::circular(Handedness::Left, &f, 1064e-9, 1.0).unwrap();
        let r = BeamMode::circular(Handedness::Right, &f, 1064e-9, 1.0).unwrap();
        let lin = BeamMode::linear(0.4, &f, 1064e-9, 1.0).unwrap();
        let i = 1e9;
        let (dl, dr, dlin) = (field_densities(&l, &i), field_densities(&r, &i), field_densities(&lin, &i));
        assert_eq!(dlin.h, 0.0);
        assert!((dl.h - i / (SPEED_OF_LIGHT * l.omega)).abs() < 1e-15 * dl.h.abs());
        assert_eq!(dl.w, dr.w);
        assert_eq!(dl.h, -dr.h);
        assert!(dl.h.abs() * l.omega <= dl.w * (1.0 + 1e-15));
    }

    #[test]
    fn beam_validation_catches_bad_tags_and_geometry() {
        let f = Frame::<f64>::standard();
        let l = BeamMode::circular(Handedness::Left, &f, 800e-9, 1.0).unwrap();
        let wrong_tag = BeamMode::new(l.wavevector.clone(), l.e.clone(), l.b.clone(), 1.0, l.omega, Handedness::Right, 1e-12, 1e-9);
        assert!(wrong_tag.is_err());
        let longitudinal = BeamMode::new(l.wavevector.clone(), Vector3::z(), Vector3::x(), 1.0, l.omega, Handedness::Linear { angle: 0.0 }, 1e-12, 1e-9);
        assert!(longitudinal.is_err());
        let bad_omega = BeamMode::new(l.wavevector.clone(), l.e.clone(), l.b.clone(), 1.0, 2.0 * l.omega, Handedness::Left, 1e-12, 1e-9);
        assert!(bad_omega.is_err());
        assert_eq!(l.mirrored_handedness().handedness, Handedness::Right);
    }

    #[test]
    fn exact_beam_construction() {
        let c = BigRational::from_integer(299_792_458.into());
        let k0 = ratio(5_000_000, 1);
        let f = Frame::<BigRational>::standard();
        let (e, b) = make_linear_cs(ratio(3, 5), ratio(4, 5), &f).unwrap();
        let beam = BeamMode::new(
            f.k.scale(&k0),
            e,
            b,
            ratio(1, 1),
            c * k0,
            Handedness::Linear { angle: 0.9273 },
            0.0,
            0.0,
        );
        assert!(beam.is_ok());
    }
}
