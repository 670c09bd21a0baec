//! Static polarizability of multi-level models against the curvature of the
//! ground-state energy of `H(F) = diag(0, E₁, …) − F ê·μ`, diagonalized with
//! nalgebra.

use chiraforce::constants::ELECTRONVOLT;
use chiraforce::molecule::{random_chiral_model, response_tensors};
use chiraforce::MolecularModel;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Lowest eigenvalue in eV for a field `field` (V/m) along axis `axis`.
fn ground_energy(model: &MolecularModel<f64>, axis: usize, field: f64) -> f64 {
    let n = model.states.len() + 1;
    let mut h = DMatrix::<f64>::zeros(n, n);
    for (i, s) in model.states.iter().enumerate() {
        h[(i + 1, i + 1)] = s.energy / ELECTRONVOLT;
        let coupling = -field * s.mu[axis] / ELECTRONVOLT;
        h[(0, i + 1)] = coupling;
        h[(i + 1, 0)] = coupling;
    }
    h.symmetric_eigenvalues().min()
}

/// `α_aa = −∂²E/∂F²`, central differences with one Richardson step.
fn finite_field_alpha(model: &MolecularModel<f64>, axis: usize, step: f64) -> f64 {
    let curvature = |h: f64| {
        let e = |f: f64| ground_energy(model, axis, f) * ELECTRONVOLT;
        (e(h) - 2.0 * e(0.0) + e(-h)) / (h * h)
    };
    -(4.0 * curvature(step / 2.0) - curvature(step)) / 3.0
}

#[test]
fn sum_over_states_matches_field_curvature() {
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    for n in 0..12 {
        let model = random_chiral_model(&mut rng, 1 + n % 4, format!("ff-{n}"));
        let trace_oracle: f64 = (0..3).map(|a| finite_field_alpha(&model, a, 1e7)).sum();
        let trace = response_tensors(&model, 0.0).unwrap().trace_alpha();
        let rel = (trace - trace_oracle).abs() / trace.abs();
        assert!(rel < 1e-6, "model {n}: analytic {trace:e} vs oracle {trace_oracle:e} ({rel:e})");
    }
}
