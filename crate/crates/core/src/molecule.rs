//! Molecular state models and their sum-over-states response tensors.
//!
//! Moments are transition moments from the ground state, real under the
//! real-wavefunction convention. The magnetic moment is stored as the real
//! coefficient `m̄` of the physical, purely imaginary moment `i·m̄`, and the
//! E1M1 tensor likewise as `Ḡ` with `G = i·Ḡ`. See [`crate::constants`] for
//! the dispersion forms and prefactors.

use num_complex::Complex;

use rand::Rng;

use crate::constants::{
    ATOMIC_QUADRUPOLE, BOHR_MAGNETON, DEBYE, DEFAULT_DETUNING_FLOOR, ELECTRONVOLT, FINE_STRUCTURE, REDUCED_PLANCK, SPEED_OF_LIGHT, VACUUM_PERMITTIVITY,
};
use crate::error::{Error, Result};
use crate::scalar::{two, Real, Scalar};
use crate::tensor::{kronecker_delta, Tensor};

/// One excited state and its transition moments from the ground state.
#[derive(Clone, Debug, PartialEq)]
pub struct ExcitedState<S> {
    /// Absolute state energy, J.
    pub energy: S,
    /// Electric dipole transition moment, C·m.
    pub mu: [S; 3],
    /// Coefficient of i in the magnetic dipole transition moment, J/T.
    pub m_bar: [S; 3],
    /// Electric quadrupole transition moment (symmetric, traceless), C·m².
    pub quadrupole: [[S; 3]; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct MolecularModel<S> {
    pub label: String,
    /// Ground-state energy, J. The ground state is implicit and precedes `states`.
    pub ground_energy: S,
    pub states: Vec<ExcitedState<S>>,
}

impl<S: Scalar> MolecularModel<S> {
    /// Validates energies above ground and symmetric traceless quadrupoles.
    pub fn new(label: impl Into<String>, ground_energy: S, states: Vec<ExcitedState<S>>, tol: f64) -> Result<Self> {
        for (n, state) in states.iter().enumerate() {
            if !(state.energy > ground_energy) {
                return Err(Error::InvalidModel(format!(
                    "state {n} energy is not above the ground state"
                )));
            }
            let q = &state.quadrupole;
            let scale = q
                .iter()
                .flatten()
                .fold(S::zero(), |acc, v| S::max_of(acc, v.abs()));
            let trace = q[0][0].clone() + q[1][1].clone() + q[2][2].clone();
            if !trace.negligible(&scale, tol) {
                return Err(Error::InvalidModel(format!("state {n} quadrupole is not traceless")));
            }
            for i in 0..3 {
                for j in (i + 1)..3 {
                    if !(q[i][j].clone() - q[j][i].clone()).negligible(&scale, tol) {
                        return Err(Error::InvalidModel(format!(
                            "state {n} quadrupole is not symmetric"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            label: label.into(),
            ground_energy,
            states,
        })
    }

    pub fn transition_energy(&self, n: usize) -> S {
        self.states[n].energy.clone() - self.ground_energy.clone()
    }

    /// Every moment set to zero except the electric dipoles.
    pub fn is_achiral_by_construction(&self) -> bool {
        self.states.iter().all(|s| {
            s.m_bar.iter().all(|v| v.is_zero()) && s.quadrupole.iter().flatten().all(|v| v.is_zero())
        })
    }
}

/// α (E1²), Ḡ (E1M1, with G = iḠ) and A (E1E2) at one angular frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct ResponseTensors<S> {
    /// Real symmetric rank 2, C²·m²/J.
    pub alpha: Tensor<S>,
    /// Real rank 2, C·m/T. The physical tensor is `i·g_bar`.
    pub g_bar: Tensor<S>,
    /// Real rank 3, symmetric traceless in the last two indices, C²·m³/J.
    pub a: Tensor<S>,
    /// rad/s.
    pub omega: S,
}

impl<S: Scalar> ResponseTensors<S> {
    pub fn zero(omega: S) -> Self {
        Self {
            alpha: Tensor::zeros(2),
            g_bar: Tensor::zeros(2),
            a: Tensor::zeros(3),
            omega,
        }
    }

    /// The physical, purely imaginary E1M1 tensor `G = i·Ḡ`.
    pub fn g_physical(&self) -> Tensor<S> {
        self.g_bar.scale(&Complex::new(S::zero(), S::one()))
    }

    pub fn trace_alpha(&self) -> S {
        self.alpha.trace().re
    }

    pub fn trace_g_bar(&self) -> S {
        self.g_bar.trace().re
    }

    /// Checks the structural invariants: all-real storage, symmetric α,
    /// A symmetric and traceless in its last two indices.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if !(self.alpha.rank() == 2 && self.g_bar.rank() == 2 && self.a.rank() == 3) {
            return Err(Error::InvalidModel("response tensors have wrong ranks".into()));
        }
        if !(self.alpha.is_real() && self.g_bar.is_real() && self.a.is_real()) {
            return Err(Error::InvalidModel("stored response tensors must be real".into()));
        }
        let alpha_scale = S::from_f64_lossless(self.alpha.max_abs());
        for i in 0..3 {
            for j in 0..3 {
                let d = self.alpha.get(&[i, j]).re.clone() - self.alpha.get(&[j, i]).re.clone();
                if !d.negligible(&alpha_scale, tol) {
                    return Err(Error::InvalidModel("α is not symmetric".into()));
                }
            }
        }
        let a_scale = S::from_f64_lossless(self.a.max_abs());
        for i in 0..3 {
            let trace = (0..3).fold(S::zero(), |acc, j| acc + self.a.get(&[i, j, j]).re.clone());
            if !trace.negligible(&a_scale, tol) {
                return Err(Error::InvalidModel("A is not traceless in its last two indices".into()));
            }
            for j in 0..3 {
                for k in 0..3 {
                    let d = self.a.get(&[i, j, k]).re.clone() - self.a.get(&[i, k, j]).re.clone();
                    if !d.negligible(&a_scale, tol) {
                        return Err(Error::InvalidModel("A is not symmetric in its last two indices".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Sum-over-states α, Ḡ and A at angular frequency `omega`.
///
/// Rejects any transition with `|Eₙ − ħ|ω|| < floor · Eₙ`.
pub fn build_response_tensors<S: Scalar>(
    model: &MolecularModel<S>,
    omega: S,
    detuning_floor: f64,
) -> Result<ResponseTensors<S>> {
    let hbar = S::from_f64_lossless(REDUCED_PLANCK);
    let photon = hbar * omega.clone();
    let photon_abs = photon.abs();
    let floor = S::from_f64_lossless(detuning_floor);
    let mut alpha = vec![S::zero(); 9];
    let mut g_bar = vec![S::zero(); 9];
    let mut a = vec![S::zero(); 27];
    for (n, state) in model.states.iter().enumerate() {
        let e_n = model.transition_energy(n);
        if (e_n.clone() - photon_abs.clone()).abs() < floor.clone() * e_n.clone() {
            return Err(Error::NearResonance {
                index: n,
                transition_energy: e_n.approx_f64(),
                photon_energy: photon_abs.approx_f64(),
                floor: detuning_floor * 100.0,
            });
        }
        let denom = e_n.clone() * e_n.clone() - photon.clone() * photon.clone();
        let even = two::<S>() * e_n / denom.clone();
        let odd = two::<S>() * photon.clone() / denom;
        for i in 0..3 {
            for j in 0..3 {
                alpha[3 * i + j] = alpha[3 * i + j].clone() + even.clone() * state.mu[i].clone() * state.mu[j].clone();
                g_bar[3 * i + j] = g_bar[3 * i + j].clone() + odd.clone() * state.mu[i].clone() * state.m_bar[j].clone();
                for k in 0..3 {
                    let at = 9 * i + 3 * j + k;
                    a[at] = a[at].clone() + even.clone() * state.mu[i].clone() * state.quadrupole[j][k].clone();
                }
            }
        }
    }
    let tensors = ResponseTensors {
        alpha: Tensor::from_real(2, alpha)?.with_unit("C^2 m^2 J^-1"),
        g_bar: Tensor::from_real(2, g_bar)?.with_unit("C m T^-1"),
        a: Tensor::from_real(3, a)?.with_unit("C^2 m^3 J^-1"),
        omega,
    };
    Ok(tensors)
}

/// [`build_response_tensors`] with the default 1% detuning floor.
pub fn response_tensors<S: Scalar>(model: &MolecularModel<S>, omega: S) -> Result<ResponseTensors<S>> {
    build_response_tensors(model, omega, DEFAULT_DETUNING_FLOOR)
}

/// Spatial inversion of the moment set: μ → −μ, m̄ and Q unchanged. Turns
/// (α, G, A) into (α, −G, −A).
pub fn mirror_molecule<S: Scalar>(model: &MolecularModel<S>) -> MolecularModel<S> {
    MolecularModel {
        label: format!("mirror({})", model.label),
        ground_energy: model.ground_energy.clone(),
        states: model
            .states
            .iter()
            .map(|s| ExcitedState {
                energy: s.energy.clone(),
                mu: s.mu.clone().map(|v| -v),
                m_bar: s.m_bar.clone(),
                quadrupole: s.quadrupole.clone(),
            })
            .collect(),
    }
}

/// Order-of-magnitude isotropic response of a molecule of size `d` (m):
/// `Tr α = 4πε₀d³` and `Tr Ḡ = c·α_fs·Tr α`, so `Tr α / (Tr Ḡ/c) = 1/α_fs`.
/// A is zero.
pub fn model_from_dimension<S: Real>(d: S, omega: S) -> Result<ResponseTensors<S>> {
    if !(d > S::zero()) {
        return Err(Error::InvalidParameter(format!(
            "molecular dimension must be positive, got {:e}",
            d.approx_f64()
        )));
    }
    let eps0 = S::from(VACUUM_PERMITTIVITY).unwrap();
    let c = S::from(SPEED_OF_LIGHT).unwrap();
    let trace_alpha = S::from(4.0).unwrap() * S::PI() * eps0 * d * d * d;
    let trace_g = c * S::from(FINE_STRUCTURE).unwrap() * trace_alpha;
    let third = S::one() / S::from(3.0).unwrap();
    let delta = kronecker_delta::<S>();
    Ok(ResponseTensors {
        alpha: delta.scale_real(&(trace_alpha * third)).with_unit("C^2 m^2 J^-1"),
        g_bar: delta.scale_real(&(trace_g * third)).with_unit("C m T^-1"),
        a: Tensor::zeros(3).with_unit("C^2 m^3 J^-1"),
        omega,
    })
}

/// Static polarizability trace of a two-level system from exact
/// diagonalization in a weak static field, extrapolated to zero field.
///
/// `H = [[0, −μ·F], [−μ·F, E]]` has ground eigenvalue
/// `−2x²/(E + √(E² + 4x²))` with `x = μ·F`. For a field of strength `F`
/// along each axis, `ΔW/F²` tends to `−α_uu/2`; two field strengths combined
/// by Richardson extrapolation remove the `F²` correction.
pub fn finite_field_trace_alpha(transition_energy: f64, mu: [f64; 3], field: f64) -> f64 {
    let shift = |x: f64| -2.0 * x * x / (transition_energy + (transition_energy * transition_energy + 4.0 * x * x).sqrt());
    (0..3)
        .map(|u| {
            let coarse = shift(mu[u] * field) / (field * field);
            let fine = shift(mu[u] * field / 2.0) / (field * field / 4.0);
            let limit = (4.0 * fine - coarse) / 3.0;
            -2.0 * limit
        })
        .sum()
}

/// A random chiral model with `n_states` excited states between 3 and 8 eV,
/// dipoles up to 2 D, magnetic moments up to 1 μ_B and quadrupoles up to
/// 2 e·a₀². Far off resonance for visible and near-infrared light.
pub fn random_chiral_model<R: Rng + ?Sized>(rng: &mut R, n_states: usize, label: impl Into<String>) -> MolecularModel<f64> {
    let mut u = |scale: f64| scale * rng.random_range(-1.0..1.0);
    let states = (0..n_states)
        .map(|_| {
            let energy = (5.5 + u(2.5)) * ELECTRONVOLT;
            let mu = [0; 3].map(|_| u(2.0) * DEBYE);
            let m_bar = [0; 3].map(|_| u(1.0) * BOHR_MAGNETON);
            let (xx, yy, xy, xz, yz) = (u(2.0), u(2.0), u(2.0), u(2.0), u(2.0));
            let quadrupole = [[xx, xy, xz], [xy, yy, yz], [xz, yz, -xx - yy]].map(|row| row.map(|v| v * ATOMIC_QUADRUPOLE));
            ExcitedState { energy, mu, m_bar, quadrupole }
        })
        .collect();
    MolecularModel::new(label, 0.0, states, 1e-12).expect("generated moments satisfy the model invariants")
}
