//! The single registry of invariant checks run by `verify`.
//!
//! Each module's invariants are registered here and nowhere else. A check
//! gets the run context (seed, sample count, tolerances, shipped models) and
//! returns named metrics plus a verdict. Randomness comes from a ChaCha8
//! stream derived from the seed and the check's position, so one check's
//! draws never depend on another's.

use std::collections::BTreeMap;

use num_complex::Complex;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{Error, Result};
use crate::estimates::{estimate_ratio, scaling_sweep, ForceProbe};
use crate::force::{
    discriminatory_shift, energy_shift, eq1_force, finite_difference_force, gradient_force, norm,
    orthogonal_linear_pair, sampled_interference_check, two_beam_interference_check,
};
use crate::io::{parse_json, ModelFile, SCHEMA_VERSION};
use crate::isotropic::isotropic_basis;
use crate::molecule::{
    build_response_tensors, finite_field_trace_alpha, mirror_molecule, random_chiral_model, response_tensors,
    ExcitedState, MolecularModel, ResponseTensors,
};
use crate::radiation::{make_linear_cs, BeamMode, BeamProfile, Frame, Handedness};
use crate::rotavg::{familywise_bound, rotational_average, sample_rotation, so3_sample_average_batch};
use crate::rotation::Rotation3;
use crate::scalar::ratio;
use crate::tensor::{component_count, kronecker_delta, levi_civita, outer_product, Tensor};
use crate::tolerances::Tolerances;

pub const SHIPPED_MODELS: [(&str, &str); 2] = [
    ("data/example_model.json", include_str!("../data/example_model.json")),
    ("data/twisted_dimer.json", include_str!("../data/twisted_dimer.json")),
];

/// Wavelength of the beams the suite probes with, m.
pub const PROBE_WAVELENGTH: f64 = 1064e-9;
/// Local intensity for single-point energy shifts, W/m².
pub const PROBE_INTENSITY: f64 = 1e10;

pub fn shipped_model_files() -> Vec<(String, ModelFile)> {
    SHIPPED_MODELS
        .iter()
        .map(|(name, text)| ((*name).to_string(), parse_json(name, text).expect("shipped models parse")))
        .collect()
}

#[derive(Clone, Debug)]
pub struct VerifyContext {
    pub seed: u64,
    pub samples: usize,
    pub tolerances: Tolerances,
    /// Models the suite always covers in addition to random ones.
    pub models: Vec<(String, ModelFile)>,
}

impl VerifyContext {
    pub fn new(seed: u64, samples: usize, tolerances: Tolerances) -> Self {
        Self {
            seed,
            samples,
            tolerances,
            models: shipped_model_files(),
        }
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(salt);
        rng
    }

    fn shipped(&self) -> Result<Vec<MolecularModel<f64>>> {
        self.models
            .iter()
            .map(|(name, file)| file.to_model(name, self.tolerances.identity))
            .collect()
    }

    fn omega(&self) -> f64 {
        std::f64::consts::TAU * SPEED_OF_LIGHT / PROBE_WAVELENGTH
    }

    fn tensors(&self, model: &MolecularModel<f64>) -> Result<ResponseTensors<f64>> {
        response_tensors(model, self.omega())
    }

    fn beam(&self, handedness: Handedness) -> Result<BeamMode<f64>> {
        BeamMode::with_handedness(handedness, &Frame::standard(), PROBE_WAVELENGTH, 1.0)
    }

    fn random_models(&self, rng: &mut ChaCha8Rng, count: usize) -> Vec<MolecularModel<f64>> {
        (0..count)
            .map(|n| {
                let states = rng.random_range(1..=4);
                random_chiral_model(rng, states, format!("random-{n}"))
            })
            .collect()
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Outcome {
    pub passed: bool,
    pub metrics: BTreeMap<String, f64>,
    pub detail: String,
}

impl Outcome {
    fn new() -> Self {
        Self { passed: true, ..Self::default() }
    }

    fn metric(&mut self, name: &str, value: f64) -> &mut Self {
        self.metrics.insert(name.to_string(), value);
        self
    }

    /// Records `value` as the worst case of `name` and fails unless `ok`.
    fn require(&mut self, name: &str, value: f64, ok: bool) -> &mut Self {
        let worst = self.metrics.get(name).copied().map_or(value, |w| w.max(value));
        self.metric(name, worst);
        if !ok {
            self.passed = false;
            if self.detail.is_empty() {
                self.detail = format!("{name} = {value:e} outside tolerance");
            }
        }
        self
    }

    fn done(self) -> Result<Outcome> {
        Ok(self)
    }
}

pub struct Check {
    pub name: &'static str,
    pub module: &'static str,
    /// Runs entirely in exact rational arithmetic.
    pub exact: bool,
    pub run: fn(&VerifyContext) -> Result<Outcome>,
}

pub fn registry() -> Vec<Check> {
    macro_rules! check {
        ($module:literal, $name:ident, $exact:expr) => {
            Check { name: stringify!($name), module: $module, exact: $exact, run: $name }
        };
    }
    vec![
        check!("tensor_core", epsilon_delta_identity, true),
        check!("tensor_core", outer_product_bilinearity, false),
        check!("rot_avg", rank2_trace_form, false),
        check!("rot_avg", average_idempotence, false),
        check!("rot_avg", average_rotation_invariance, false),
        check!("rot_avg", exact_basis_invariance, true),
        check!("rot_avg", monte_carlo_equivalence, false),
        check!("radiation", circular_helicity, false),
        check!("molecule", response_symmetry, false),
        check!("molecule", parity_covariance, false),
        check!("molecule", dispersion_symmetry, false),
        check!("molecule", finite_field_static_limit, false),
        check!("force_engine", linear_nullity, false),
        check!("force_engine", linear_nullity_exact, true),
        check!("force_engine", circular_antisymmetry, false),
        check!("force_engine", mirror_antisymmetry, false),
        check!("force_engine", achiral_chiral_separation, false),
        check!("force_engine", quadrupole_nullity, false),
        check!("force_engine", realness, false),
        check!("force_engine", gradient_consistency, false),
        check!("force_engine", eq1_decomposition, false),
        check!("force_engine", interference_vanishing, false),
        check!("force_engine", interference_vanishing_exact, true),
        check!("force_engine", interference_monte_carlo, false),
        check!("estimates", fine_structure_ratio, false),
        check!("estimates", cubic_scaling, false),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub module: &'static str,
    pub passed: bool,
    pub metrics: BTreeMap<String, f64>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub seed: u64,
    pub samples: usize,
    pub exact_only: bool,
    pub tolerances: Tolerances,
    pub passed: bool,
    pub failures: Vec<&'static str>,
    pub checks: Vec<CheckReport>,
}

/// Runs every registered check (or only the exact ones) in registry order.
pub fn run_verify(ctx: &VerifyContext, exact_only: bool) -> VerifyReport {
    let checks: Vec<CheckReport> = registry()
        .into_iter()
        .filter(|c| !exact_only || c.exact)
        .map(|c| {
            let outcome = (c.run)(ctx).unwrap_or_else(|e| Outcome {
                passed: false,
                metrics: BTreeMap::new(),
                detail: format!("error: {e}"),
            });
            CheckReport {
                name: c.name,
                module: c.module,
                passed: outcome.passed,
                metrics: outcome.metrics,
                detail: outcome.detail,
            }
        })
        .collect();
    let failures: Vec<&'static str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    VerifyReport {
        schema: SCHEMA_VERSION,
        seed: ctx.seed,
        samples: ctx.samples,
        exact_only,
        tolerances: ctx.tolerances.clone(),
        passed: failures.is_empty(),
        failures,
        checks,
    }
}

/// Random complex tensor with components uniform in the unit square.
pub fn random_tensor<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> Tensor<f64> {
    let n = crate::tensor::component_count(rank);
    let components = (0..n)
        .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    Tensor::from_components(rank, components).expect("component count matches rank")
}

fn rel(diff: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        diff / scale
    }
}

fn epsilon_delta_identity(_: &VerifyContext) -> Result<Outcome> {
    // ε_ijk ε_lmk = δ_il δ_jm − δ_im δ_jl, exactly.
    let eps = levi_civita::<BigRational>();
    let delta = kronecker_delta::<BigRational>();
    let mut mismatches = 0usize;
    for i in 0..3 {
        for j in 0..3 {
            for l in 0..3 {
                for m in 0..3 {
                    let lhs = (0..3).fold(Complex::new(ratio(0, 1), ratio(0, 1)), |acc, k| {
                        acc + eps.get(&[i, j, k]).clone() * eps.get(&[l, m, k]).clone()
                    });
                    let rhs = delta.get(&[i, l]).clone() * delta.get(&[j, m]).clone()
                        - delta.get(&[i, m]).clone() * delta.get(&[j, l]).clone();
                    mismatches += usize::from(lhs != rhs);
                }
            }
        }
    }
    let mut o = Outcome::new();
    o.require("mismatched_components", mismatches as f64, mismatches == 0);
    o.done()
}

fn outer_product_bilinearity(ctx: &VerifyContext) -> Result<Outcome> {
    let mut rng = ctx.rng(1);
    let mut o = Outcome::new();
    for _ in 0..20 {
        let (a, b, c) = (random_tensor(&mut rng, 2), random_tensor(&mut rng, 2), random_tensor(&mut rng, 3));
        let s = Complex::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let lhs = outer_product(&(&(s * &a) + &b), &c)?;
        let rhs = &(s * &outer_product(&a, &c)?) + &outer_product(&b, &c)?;
        let err = rel(lhs.max_abs_diff(&rhs), rhs.max_abs());
        o.require("max_relative_error", err, err <= ctx.tolerances.identity);
    }
    o.done()
}

fn rank2_trace_form(ctx: &VerifyContext) -> Result<Outcome> {
    let mut rng = ctx.rng(2);
    let mut o = Outcome::new();
    for _ in 0..20 {
        let t = random_tensor(&mut rng, 2);
        let avg = rotational_average(&t)?.averaged_tensor;
        let expected = kronecker_delta::<f64>().scale(&(t.trace() / 3.0));
        let err = avg.max_abs_diff(&expected);
        o.require("max_abs_error", err, err <= ctx.tolerances.rank2_average * t.max_abs());
    }
    o.done()
}

fn average_idempotence(ctx: &VerifyContext) -> Result<Outcome> {
    let mut rng = ctx.rng(3);
    let mut o = Outcome::new();
    for rank in 2..=5 {
        for _ in 0..5 {
            let once = rotational_average(&random_tensor(&mut rng, rank))?.averaged_tensor;
            let twice = rotational_average(&once)?.averaged_tensor;
            let err = rel(once.max_abs_diff(&twice), once.max_abs().max(f64::MIN_POSITIVE));
            o.require("max_relative_error", err, err <= ctx.tolerances.identity);
        }
    }
    o.done()
}

fn average_rotation_invariance(ctx: &VerifyContext) -> Result<Outcome> {
    let mut rng = ctx.rng(4);
    let mut o = Outcome::new();
    for rank in 2..=5 {
        for _ in 0..5 {
            let t = random_tensor(&mut rng, rank);
            let rotation: Rotation3<f64> = sample_rotation(&mut rng);
            let avg = rotational_average(&t)?.averaged_tensor;
            let rotated_avg = avg.rotate(&rotation);
            let avg_of_rotated = rotational_average(&t.rotate(&rotation))?.averaged_tensor;
            let scale = t.max_abs();
            let e1 = rotated_avg.max_abs_diff(&avg) / scale;
            let e2 = avg_of_rotated.max_abs_diff(&avg) / scale;
            o.require("result_invariance", e1, e1 <= ctx.tolerances.rotation_invariance);
            o.require("pre_rotation_invariance", e2, e2 <= ctx.tolerances.rotation_invariance);
        }
    }
    o.done()
}

fn exact_basis_invariance(_: &VerifyContext) -> Result<Outcome> {
    let rotation = Rotation3::from_quaternion(ratio(1, 1), ratio(2, 1), ratio(-3, 1), ratio(5, 7));
    let mut o = Outcome::new();
    for rank in 2..=5 {
        let basis = isotropic_basis::<BigRational>(rank)?;
        let changed = basis.members.iter().filter(|b| b.rotate(&rotation) != **b).count();
        o.require("non_invariant_members", changed as f64, changed == 0);
    }
    o.done()
}

/// Random tensors averaged both ways; every component of every tensor must
/// agree within the standard-error bound.
pub fn monte_carlo_equivalence_with(
    ctx: &VerifyContext,
    tensors_per_rank: usize,
) -> Result<Outcome> {
    let mut rng = ctx.rng(5);
    let mut o = Outcome::new();
    let k = ctx.tolerances.standard_errors;
    for rank in 2..=5 {
        let tensors: Vec<Tensor<f64>> = (0..tensors_per_rank).map(|_| random_tensor(&mut rng, rank)).collect();
        let sampled = so3_sample_average_batch(&tensors, ctx.samples, ctx.seed.wrapping_add(rank as u64))?;
        let mut outside = 0usize;
        let mut worst = 0.0f64;
        for (t, mc) in tensors.iter().zip(&sampled) {
            let analytic = rotational_average(t)?.averaged_tensor;
            outside += mc.count_outside(&analytic, k);
            worst = worst.max(mc.max_standard_score(&analytic));
        }
        // Real and imaginary part of every component is one comparison. With
        // hundreds of them a handful beyond k is expected even when the two
        // routes agree, so the verdict bounds the largest score at the
        // family-wise equivalent of a single k-standard-error comparison.
        let comparisons = 2 * tensors_per_rank * component_count(rank);
        let bound = familywise_bound(k, comparisons);
        o.metric(&format!("rank{rank}_components_outside"), outside as f64);
        o.metric(&format!("rank{rank}_comparisons"), comparisons as f64);
        o.metric(&format!("rank{rank}_familywise_bound"), bound);
        o.require(&format!("rank{rank}_max_standard_score"), worst, worst <= bound);
    }
    o.done()
}

fn monte_carlo_equivalence(ctx: &VerifyContext) -> Result<Outcome> {
    monte_carlo_equivalence_with(ctx, 2)
}

fn circular_helicity(ctx: &VerifyContext) -> Result<Outcome> {
    let mut o = Outcome::new();
    let i = Complex::new(0.0, 1.0);
    for (h, sigma) in [(Handedness::Left, 1.0), (Handedness::Right, -1.0)] {
        let beam = ctx.beam(h)?;
        let helicity = (i * beam.e.conj().dot(&beam.b)).re;
        let err = (helicity - sigma).abs();
        o.require("helicity_error", err, err <= ctx.tolerances.beam_geometry);
        let cross = beam.direction().cross(&beam.e).max_abs_diff(&beam.b);
        o.require("b_cross_error", cross, cross <= ctx.tolerances.beam_geometry);
    }
    o.done()
}

fn response_symmetry(ctx: &VerifyContext) -> Result<Outcome> {
    let mut rng = ctx.rng(6);
    let mut models = ctx.shipped()?;
    models.extend(ctx.random_models(&mut rng, 20));
    let mut failures = 0usize;
    for m in &models {
        failures += usize::from(ctx.tensors(m)?.validate(ctx.tolerances.identity).is_err());
    }
    let mut o = Outcome::new();
    o.require("invalid_tensor_sets", failures as f64, failures == 0);
    o.done()
}

fn parity_covariance(ctx: &VerifyContext) -> Result<Outcome> {
    let mut rng = ctx.rng(7);
    let mut o = Outcome::new();
    for m in ctx.random_models(&mut rng, 20) {
        let t = ctx.tensors(&m)?;
        let u = ctx.tensors(&mirror_molecule(&m))?;
        let ea = rel(u.alpha.max_abs_diff(&t.alpha), t.alpha.max_abs());
        let eg = rel(u.g_bar.max_abs_diff(&-&t.g_bar), t.g_bar.max_abs());
        let eq = rel(u.a.max_abs_diff(&-&t.a), t.a.max_abs());
        let tol = ctx.tolerances.identity;
        o.require("alpha_even_error", ea, ea <= tol);
        o.require("g_odd_error", eg, eg <= tol);
        o.require("a_odd_error", eq, eq <= tol);
        let involution = mirror_molecule(&mirror_molecule(&m)).states == m.states;
        o.require("double_mirror_mismatch", f64::from(u8::from(!involution)), involution);
    }
    o.done()
}

fn dispersion_symmetry(ctx: &VerifyContext) -> Result<Outcome> {
    let mut rng = ctx.rng(8);
    let mut o = Outcome::new();
    for m in ctx.random_models(&mut rng, 10) {
        let p = response_tensors(&m, ctx.omega())?;
        let n = response_tensors(&m, -ctx.omega())?;
        let err = rel(p.alpha.max_abs_diff(&n.alpha), p.alpha.max_abs());
        o.require("alpha_even_in_omega", err, err <= ctx.tolerances.identity);
    }
    o.done()
}

fn finite_field_static_limit(ctx: &VerifyContext) -> Result<Outcome> {
    let mut rng = ctx.rng(9);
    let mut o = Outcome::new();
    for m in ctx.random_models(&mut rng, 10) {
        let first = &m.states[0];
        let single = MolecularModel::new(
            "two-level",
            0.0,
            vec![ExcitedState { energy: first.energy, mu: first.mu, m_bar: [0.0; 3], quadrupole: [[0.0; 3]; 3] }],
            ctx.tolerances.identity,
        )?;
        let analytic = response_tensors(&single, 0.0)?.trace_alpha();
        let oracle = finite_field_trace_alpha(first.energy, first.mu, 1e6);
        let err = rel((analytic - oracle).abs(), analytic.abs());
        o.require("relative_error", err, err <= ctx.tolerances.finite_field);
    }
    o.done()
}

fn linear_nullity(ctx: &VerifyContext) -> Result<Outcome> {
    let mut rng = ctx.rng(10);
    let models = ctx.random_models(&mut rng, 50);
    let angles: Vec<f64> = (0..20).map(|_| rng.random_range(0.0..std::f64::consts::PI)).collect();
    let mut o = Outcome::new();
    for m in &models {
        let t = ctx.tensors(m)?;
        for &angle in &angles {
            let s = energy_shift(&ctx.beam(Handedness::Linear { angle })?, &PROBE_INTENSITY, &t)?;
            let r = rel(s.part_g.abs(), s.part_alpha.abs());
            o.require("max_part_G_over_part_alpha", r, r <= ctx.tolerances.linear_nullity);
        }
    }
    o.done()
}

/// The first shipped model in exact arithmetic with a rational frequency.
fn exact_setup(ctx: &VerifyContext) -> Result<(ResponseTensors<BigRational>, BigRational)> {
    let (name, file) = &ctx.models[0];
    let model = file.to_model::<BigRational>(name, 0.0)?;
    let k = BigRational::from_float(std::f64::consts::TAU / PROBE_WAVELENGTH).expect("finite");
    let omega = BigRational::from_float(SPEED_OF_LIGHT).expect("finite") * k.clone();
    Ok((build_response_tensors(&model, omega, crate::constants::DEFAULT_DETUNING_FLOOR)?, k))
}

fn linear_nullity_exact(ctx: &VerifyContext) -> Result<Outcome> {
    let (tensors, k) = exact_setup(ctx)?;
    let mut o = Outcome::new();
    // Rational points on the unit circle: (3,4,5), (5,12,13), (8,15,17), (1,0,1).
    for (a, b, c) in [(3, 4, 5), (5, 12, 13), (8, 15, 17), (1, 0, 1), (-7, 24, 25)] {
        let frame = Frame::<BigRational>::standard();
        let (e, bvec) = make_linear_cs(ratio(a, c), ratio(b, c), &frame)?;
        let beam = BeamMode::new(
            frame.k.scale(&k),
            e,
            bvec,
            ratio(1, 1),
            tensors.omega.clone(),
            Handedness::Linear { angle: (b as f64).atan2(a as f64) },
            0.0,
            0.0,
        )?;
        let s = energy_shift(&beam, &ratio(10_000_000_000, 1), &tensors)?;
        let zero = s.part_g == ratio(0, 1) && s.residual_imag == ratio(0, 1);
        o.require("nonzero_exact_results", f64::from(u8::from(!zero)), zero);
    }
    o.done()
}

fn circular_antisymmetry(ctx: &VerifyContext) -> Result<Outcome> {
    let mut rng = ctx.rng(11);
    let shipped = ctx.shipped()?;
    let (l, r) = (ctx.beam(Handedness::Left)?, ctx.beam(Handedness::Right)?);
    let mut o = Outcome::new();
    for (n, m) in shipped.iter().enumerate() {
        let s = energy_shift(&l, &PROBE_INTENSITY, &ctx.tensors(m)?)?;
        let ratio = rel(s.part_g.abs(), s.part_alpha.abs());
        o.metric(&format!("shipped{n}_part_G_over_part_alpha"), ratio);
        if ratio <= ctx.tolerances.circular_floor {
            o.passed = false;
            o.detail = format!("shipped model {n} has |part_G|/|part_alpha| = {ratio:e}");
        }
    }
    for m in shipped.iter().chain(&ctx.random_models(&mut rng, 50)) {
        let t = ctx.tensors(m)?;
        let (sl, sr) = (energy_shift(&l, &PROBE_INTENSITY, &t)?, energy_shift(&r, &PROBE_INTENSITY, &t)?);
        let nonzero = sl.part_g != 0.0;
        o.require("zero_circular_part_G", f64::from(u8::from(!nonzero)), nonzero);
        let err = rel((sl.part_g + sr.part_g).abs(), sl.part_g.abs());
        o.require("antisymmetry_error", err, err <= ctx.tolerances.antisymmetry);
    }
    o.done()
}

fn mirror_antisymmetry(ctx: &VerifyContext) -> Result<Outcome> {
    let mut rng = ctx.rng(12);
    let (l, r) = (ctx.beam(Handedness::Left)?, ctx.beam(Handedness::Right)?);
    let mut o = Outcome::new();
    for m in ctx.random_models(&mut rng, 20) {
        let d = discriminatory_shift(&ctx.tensors(&m)?, &l, &r, &PROBE_INTENSITY)?;
        let dm = discriminatory_shift(&ctx.tensors(&mirror_molecule(&m))?, &l, &r, &PROBE_INTENSITY)?;
        let err = rel((d + dm).abs(), d.abs());
        o.require("relative_error", err, err <= ctx.tolerances.antisymmetry);
    }
    o.done()
}

fn achiral_chiral_separation(ctx: &VerifyContext) -> Result<Outcome> {
    let mut rng = ctx.rng(13);
    let (l, r) = (ctx.beam(Handedness::Left)?, ctx.beam(Handedness::Right)?);
    let mut o = Outcome::new();
    for m in ctx.random_models(&mut rng, 20) {
        let t = ctx.tensors(&m)?;
        let tm = ctx.tensors(&mirror_molecule(&m))?;
        let base = energy_shift(&l, &PROBE_INTENSITY, &t)?.part_alpha;
        for other in [energy_shift(&r, &PROBE_INTENSITY, &t)?, energy_shift(&l, &PROBE_INTENSITY, &tm)?] {
            let err = rel((other.part_alpha - base).abs(), base.abs());
            o.require("part_alpha_change", err, err <= ctx.tolerances.identity);
        }
    }
    o.done()
}

fn quadrupole_nullity(ctx: &VerifyContext) -> Result<Outcome> {
    let mut rng = ctx.rng(14);
    let mut models = ctx.shipped()?;
    models.extend(ctx.random_models(&mut rng, 50));
    let mut o = Outcome::new();
    for m in &models {
        let t = ctx.tensors(m)?;
        for h in [Handedness::Left, Handedness::Right, Handedness::Linear { angle: 0.7 }] {
            let s = energy_shift(&ctx.beam(h)?, &PROBE_INTENSITY, &t)?;
            let r = rel(s.part_a.abs(), s.part_alpha.abs());
            o.require("max_part_A_over_part_alpha", r, r <= ctx.tolerances.quadrupole_nullity);
        }
    }
    o.done()
}

fn realness(ctx: &VerifyContext) -> Result<Outcome> {
    let mut rng = ctx.rng(15);
    let mut models = ctx.shipped()?;
    models.extend(ctx.random_models(&mut rng, 50));
    let mut handedness = vec![Handedness::Left, Handedness::Right];
    handedness.extend((0..5).map(|_| Handedness::Linear { angle: rng.random_range(0.0..std::f64::consts::PI) }));
    let mut o = Outcome::new();
    for m in &models {
        let t = ctx.tensors(m)?;
        let tm = ctx.tensors(&mirror_molecule(m))?;
        for h in &handedness {
            for tensors in [&t, &tm] {
                // Below the rejection threshold so the metric is always recorded.
                let s = crate::force::energy_shift_with(&ctx.beam(*h)?, &PROBE_INTENSITY, tensors, f64::INFINITY)?;
                let r = rel(s.residual_imag, s.total.abs());
                o.require("max_residual_over_total", r, r < ctx.tolerances.realness);
            }
        }
    }
    o.done()
}

fn random_positions(rng: &mut ChaCha8Rng, waist: f64, count: usize) -> Vec<[f64; 3]> {
    (0..count)
        .map(|_| {
            let radius = waist * rng.random_range(0.1..1.5);
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            [radius * phi.cos(), radius * phi.sin(), waist * rng.random_range(-2.0..2.0)]
        })
        .collect()
}

fn gradient_consistency(ctx: &VerifyContext) -> Result<Outcome> {
    let mut rng = ctx.rng(16);
    let model = &ctx.shipped()?[0];
    let t = ctx.tensors(model)?;
    let beam = ctx.beam(Handedness::Left)?;
    let waist = 1e-6;
    let profile = BeamProfile::gaussian(waist, 1.0, [0.0, 0.0, 1.0], [0.0; 3])?;
    let mut o = Outcome::new();
    for r in random_positions(&mut rng, waist, 20) {
        let analytic = gradient_force(&profile, &beam, &t, &r)?.force;
        let numeric = finite_difference_force(&profile, &beam, &t, &r, waist * 1e-6)?;
        let diff = [0, 1, 2].map(|c| analytic[c] - numeric[c]);
        let err = rel(norm(&diff), norm(&analytic));
        o.require("max_relative_error", err, err <= ctx.tolerances.finite_difference);
    }
    o.done()
}

fn eq1_decomposition(ctx: &VerifyContext) -> Result<Outcome> {
    let mut rng = ctx.rng(17);
    let waist = 1e-6;
    let profile = BeamProfile::gaussian(waist, 1.0, [0.0, 0.0, 1.0], [0.0; 3])?;
    let positions = random_positions(&mut rng, waist, 5);
    let mut o = Outcome::new();
    for m in ctx.shipped()?.iter().chain(&ctx.random_models(&mut rng, 10)) {
        let t = ctx.tensors(m)?;
        for h in [Handedness::Left, Handedness::Right] {
            let beam = ctx.beam(h)?;
            for r in &positions {
                let f = gradient_force(&profile, &beam, &t, r)?;
                let (aw, bh) = eq1_force(&profile, &beam, &t, r);
                let dw = [0, 1, 2].map(|c| aw[c] - f.decomposition.grad_w[c]);
                let dh = [0, 1, 2].map(|c| bh[c] - f.decomposition.grad_h[c]);
                let ew = rel(norm(&dw), norm(&f.decomposition.grad_w));
                let eh = rel(norm(&dh), norm(&f.decomposition.grad_h));
                o.require("grad_w_error", ew, ew <= ctx.tolerances.identity);
                o.require("grad_h_error", eh, eh <= ctx.tolerances.identity);
                let parts = [0, 1, 2].map(|c| f.force[c] - f.decomposition.grad_w[c] - f.decomposition.grad_h[c] - f.decomposition.quadrupole[c]);
                let es = rel(norm(&parts), norm(&f.force));
                o.require("sum_of_parts_error", es, es <= ctx.tolerances.identity);
            }
        }
    }
    o.done()
}

fn interference_vanishing(ctx: &VerifyContext) -> Result<Outcome> {
    let mut rng = ctx.rng(18);
    let k = std::f64::consts::TAU / PROBE_WAVELENGTH;
    let (b1, b2) = orthogonal_linear_pair(k)?;
    let mut o = Outcome::new();
    for m in ctx.shipped()?.iter().chain(&ctx.random_models(&mut rng, 20)) {
        let t = ctx.tensors(m)?;
        let check = two_beam_interference_check(&b1, &b2, &t)?;
        let (t4, t5) = crate::force::interference_tensors(&t)?;
        let r4 = check
            .rank4_pairings
            .iter()
            .map(|p| p.value.norm())
            .fold(check.rank4_value.norm(), f64::max)
            / t4.max_abs();
        let r5 = check
            .rank5_pairings
            .iter()
            .map(|p| p.value.norm())
            .fold(check.rank5_value.norm(), f64::max)
            / (t5.max_abs() * k);
        o.require("rank4_relative", r4, r4 <= ctx.tolerances.interference);
        o.require("rank5_relative", r5, r5 <= ctx.tolerances.interference);
    }
    o.done()
}

fn interference_vanishing_exact(ctx: &VerifyContext) -> Result<Outcome> {
    let (tensors, k) = exact_setup(ctx)?;
    let (b1, b2) = orthogonal_linear_pair(k)?;
    let check = two_beam_interference_check(&b1, &b2, &tensors)?;
    let mut o = Outcome::new();
    let zero = check.is_exactly_zero();
    o.require("nonzero_terms", f64::from(u8::from(!zero)), zero);
    o.done()
}

fn interference_monte_carlo(ctx: &VerifyContext) -> Result<Outcome> {
    let model = &ctx.shipped()?[0];
    let t = ctx.tensors(model)?;
    let (b1, b2) = orthogonal_linear_pair(std::f64::consts::TAU / PROBE_WAVELENGTH)?;
    let sampled = sampled_interference_check(&b1, &b2, &t, ctx.samples, ctx.seed)?;
    let zero = Complex::new(0.0, 0.0);
    let mut o = Outcome::new();
    let k = ctx.tolerances.standard_errors;
    let s4 = sampled.rank4.standard_score(zero);
    let s5 = sampled.rank5.standard_score(zero);
    o.require("rank4_standard_score", s4, s4 <= k);
    o.require("rank5_standard_score", s5, s5 <= k);
    o.done()
}

fn fine_structure_ratio(ctx: &VerifyContext) -> Result<Outcome> {
    let mut o = Outcome::new();
    for d in [1e-9, 10e-9] {
        let report = estimate_ratio(d)?;
        let err = (report.ratio - crate::constants::INVERSE_FINE_STRUCTURE).abs();
        o.require("ratio_error", err, err <= ctx.tolerances.fine_structure_ratio);
    }
    o.done()
}

fn cubic_scaling(ctx: &VerifyContext) -> Result<Outcome> {
    let probe = ForceProbe::standard();
    let pair = scaling_sweep(&[10e-9, 1e-9], &probe)?;
    let sweep = scaling_sweep(&[1e-9, 2e-9, 4e-9, 7e-9, 10e-9], &probe)?;
    let ratio_err = (pair.rows[1].ratio_to_first - 1e-3).abs() / 1e-3;
    let slope = sweep.log_log_slope.ok_or_else(|| Error::InvalidParameter("sweep has no slope".into()))?;
    let slope_err = (slope - 3.0).abs() / 3.0;
    let mut o = Outcome::new();
    o.require("force_ratio_error", ratio_err, ratio_err <= ctx.tolerances.scaling);
    o.require("slope_error", slope_err, slope_err <= ctx.tolerances.scaling);
    o.done()
}
