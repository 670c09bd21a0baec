//! Isotropic rotational averages of molecule-frame tensors.
//!
//! The analytic route projects a tensor onto the isotropic basis of its
//! rank: with invariants `vᵣ = ⟨Bᵣ, T⟩` and the exact Gram inverse,
//! `⟨T⟩ = Σᵣ (G⁻¹v)ᵣ Bᵣ`. Uniform averaging over SO(3) is the orthogonal
//! projection onto the rotation-invariant subspace, so this is the full
//! average, not an approximation.
//!
//! The Monte Carlo route averages `R·T` over rotations drawn from normalized
//! 4D Gaussian quaternions, which are uniform on S³ and therefore on SO(3).
//! Samples are grouped into fixed blocks of [`SAMPLE_BLOCK`]; block `b` draws
//! from ChaCha8 seeded with the master seed on stream `b`. Block statistics
//! are merged in block order, so the result does not depend on how many
//! worker threads process the blocks.

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::isotropic::{coefficients_from_invariants, isotropic_basis, MAX_BASIS_RANK, MIN_BASIS_RANK};
use crate::rotation::Rotation3;
use crate::scalar::{Real, Scalar};
use crate::tensor::{component_count, full_contraction, outer_of_vectors, Tensor, Vector3, MAX_RANK};

/// Rotations per independently seeded block.
pub const SAMPLE_BLOCK: usize = 1 << 14;

/// Standard-score bound for the largest of `n` independent comparisons that
/// keeps the false-alarm rate of a single `k`-standard-error comparison
/// (Šidák). For `n = 1` this is `k` itself.
pub fn familywise_bound(k: f64, n: usize) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    let normal = Normal::standard();
    let single = 2.0 * normal.sf(k);
    // 1 − (1 − p)^(1/n), written to survive p ≪ 1
    let per = -(f64::ln_1p(-single) / n.max(1) as f64).exp_m1();
    normal.inverse_cdf(1.0 - 0.5 * per)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AverageMethod {
    Analytic,
    MonteCarlo,
}

/// Standard errors of the real and imaginary parts of each component.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentErrors<S> {
    pub re: Vec<S>,
    pub im: Vec<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AverageResult<S> {
    pub rank: usize,
    pub averaged_tensor: Tensor<S>,
    /// Weights on the members of [`isotropic_basis`]; for Monte Carlo results
    /// these are the projection of the sample mean, empty above rank 5.
    pub coefficients: Vec<Complex<S>>,
    pub method: AverageMethod,
    pub standard_errors: Option<ComponentErrors<S>>,
    pub samples: usize,
}

impl<S: Real> AverageResult<S> {
    /// Largest `|mc − reference| / se` over real and imaginary parts of all
    /// components. A zero standard error requires an exact match.
    pub fn max_standard_score(&self, reference: &Tensor<S>) -> f64 {
        let Some(errors) = &self.standard_errors else {
            return if self.averaged_tensor.max_abs_diff(reference) == 0.0 { 0.0 } else { f64::INFINITY };
        };
        let mut worst: f64 = 0.0;
        for (k, (mc, exact)) in self
            .averaged_tensor
            .components()
            .iter()
            .zip(reference.components())
            .enumerate()
        {
            for (diff, se) in [
                ((mc.re - exact.re).abs(), errors.re[k]),
                ((mc.im - exact.im).abs(), errors.im[k]),
            ] {
                let score = if se > S::zero() {
                    (diff / se).approx_f64()
                } else if diff.is_zero() {
                    0.0
                } else {
                    f64::INFINITY
                };
                worst = worst.max(score);
            }
        }
        worst
    }

    /// Number of real/imaginary component parts more than `k` standard errors away.
    pub fn count_outside(&self, reference: &Tensor<S>, k: f64) -> usize {
        let Some(errors) = &self.standard_errors else {
            return 0;
        };
        let mut count = 0;
        for (idx, (mc, exact)) in self
            .averaged_tensor
            .components()
            .iter()
            .zip(reference.components())
            .enumerate()
        {
            let k = S::from(k).unwrap();
            if (mc.re - exact.re).abs() > k * errors.re[idx] {
                count += 1;
            }
            if (mc.im - exact.im).abs() > k * errors.im[idx] {
                count += 1;
            }
        }
        count
    }
}

fn check_analytic_rank(rank: usize) -> Result<()> {
    if (MIN_BASIS_RANK..=MAX_BASIS_RANK).contains(&rank) {
        Ok(())
    } else {
        Err(Error::UnsupportedRank {
            rank,
            context: "analytic rotational averages cover ranks 2 to 5",
        })
    }
}

/// Lab-frame isotropic average of `tensor` over all orientations.
pub fn rotational_average<S: Scalar>(tensor: &Tensor<S>) -> Result<AverageResult<S>> {
    let rank = tensor.rank();
    check_analytic_rank(rank)?;
    let basis = isotropic_basis::<S>(rank)?;
    let invariants = basis
        .members
        .iter()
        .map(|b| full_contraction(b, tensor))
        .collect::<Result<Vec<_>>>()?;
    let coefficients = coefficients_from_invariants(rank, &invariants)?;
    let mut averaged_tensor = basis.combine(&coefficients);
    averaged_tensor.unit_tag = tensor.unit_tag.clone();
    Ok(AverageResult {
        rank,
        averaged_tensor,
        coefficients,
        method: AverageMethod::Analytic,
        standard_errors: None,
        samples: 0,
    })
}

/// Orientation-averaged contraction of a molecule-frame tensor with lab-frame
/// field vectors: `⟨T⟩ : (f₁ ⊗ f₂ ⊗ …)`.
pub fn averaged_observable<S: Scalar>(
    mol_tensor: &Tensor<S>,
    fields: &[Vector3<S>],
) -> Result<Complex<S>> {
    if fields.len() != mol_tensor.rank() {
        return Err(Error::RankMismatch {
            expected: mol_tensor.rank(),
            found: fields.len(),
        });
    }
    let average = rotational_average(mol_tensor)?;
    full_contraction(&average.averaged_tensor, &outer_of_vectors(fields)?)
}

/// One uniformly distributed rotation.
pub fn sample_rotation<S: Real, R: Rng + ?Sized>(rng: &mut R) -> Rotation3<S> {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n2: f64 = q.iter().map(|x| x * x).sum();
        if n2 > 1e-12 {
            let n = n2.sqrt();
            return Rotation3::from_unit_quaternion(q.map(|x| S::from(x / n).unwrap()));
        }
    }
}

fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

fn block_sizes(n_samples: usize) -> Vec<usize> {
    let full = n_samples / SAMPLE_BLOCK;
    let mut sizes = vec![SAMPLE_BLOCK; full];
    if n_samples % SAMPLE_BLOCK != 0 {
        sizes.push(n_samples % SAMPLE_BLOCK);
    }
    sizes
}

/// Running mean and sum of squared deviations per lane.
#[derive(Clone, Debug)]
struct Moments<S> {
    count: usize,
    mean: Vec<S>,
    m2: Vec<S>,
}

impl<S: Real> Moments<S> {
    fn new(width: usize) -> Self {
        Self {
            count: 0,
            mean: vec![S::zero(); width],
            m2: vec![S::zero(); width],
        }
    }

    fn push(&mut self, x: &[S]) {
        self.count += 1;
        let inv = S::one() / S::from(self.count).unwrap();
        for ((m, q), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let delta = v - *m;
            *m = *m + delta * inv;
            *q = *q + delta * (v - *m);
        }
    }

    fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let na = S::from(self.count).unwrap();
        let nb = S::from(other.count).unwrap();
        let n = na + nb;
        for k in 0..self.mean.len() {
            let delta = other.mean[k] - self.mean[k];
            self.mean[k] = self.mean[k] + delta * nb / n;
            self.m2[k] = self.m2[k] + other.m2[k] + delta * delta * na * nb / n;
        }
        self.count += other.count;
    }

    fn standard_error(&self, k: usize) -> S {
        if self.count < 2 {
            return S::zero();
        }
        let n = S::from(self.count).unwrap();
        (self.m2[k] / (n - S::one()) / n).sqrt()
    }
}

/// Applies `R` to every index of a batch of real tensors stored lane-innermost:
/// element `(flat, lane)` lives at `flat * lanes + lane`.
fn rotate_lanes<S: Real>(
    data: &mut Vec<S>,
    scratch: &mut Vec<S>,
    rank: usize,
    lanes: usize,
    r: &[[S; 3]; 3],
) {
    for mode in 0..rank {
        let stride = component_count(rank - 1 - mode) * lanes;
        let block = 3 * stride;
        for (src, dst) in data.chunks(block).zip(scratch.chunks_mut(block)) {
            let (s0, rest) = src.split_at(stride);
            let (s1, s2) = rest.split_at(stride);
            for (a, row) in r.iter().enumerate() {
                let out = &mut dst[a * stride..(a + 1) * stride];
                let (r0, r1, r2) = (row[0], row[1], row[2]);
                for (((o, &x0), &x1), &x2) in out.iter_mut().zip(s0).zip(s1).zip(s2) {
                    *o = r0 * x0 + r1 * x1 + r2 * x2;
                }
            }
        }
        std::mem::swap(data, scratch);
    }
}

/// Monte Carlo averages of several equal-rank tensors over one shared stream
/// of rotations. Equivalent to calling [`so3_sample_average`] on each tensor
/// with the same seed.
pub fn so3_sample_average_batch<S: Real>(
    tensors: &[Tensor<S>],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<AverageResult<S>>> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
    }
    let Some(first) = tensors.first() else {
        return Ok(Vec::new());
    };
    let rank = first.rank();
    if rank > MAX_RANK {
        return Err(Error::UnsupportedRank { rank, context: "tensors are limited to rank 6" });
    }
    if let Some(bad) = tensors.iter().find(|t| t.rank() != rank) {
        return Err(Error::RankMismatch { expected: rank, found: bad.rank() });
    }
    let size = component_count(rank);
    let lanes = 2 * tensors.len();
    let mut packed = vec![S::zero(); size * lanes];
    for (t, tensor) in tensors.iter().enumerate() {
        for (flat, c) in tensor.components().iter().enumerate() {
            packed[flat * lanes + 2 * t] = c.re;
            packed[flat * lanes + 2 * t + 1] = c.im;
        }
    }

    let blocks: Vec<Moments<S>> = block_sizes(n_samples)
        .into_par_iter()
        .enumerate()
        .map(|(b, count)| {
            let mut rng = block_rng(seed, b);
            let mut moments = Moments::new(packed.len());
            let mut work = packed.clone();
            let mut scratch = packed.clone();
            for _ in 0..count {
                let rotation = sample_rotation::<S, _>(&mut rng);
                work.copy_from_slice(&packed);
                rotate_lanes(&mut work, &mut scratch, rank, lanes, rotation.matrix());
                moments.push(&work);
            }
            moments
        })
        .collect();
    let total = blocks.iter().fold(Moments::new(packed.len()), |mut acc, m| {
        acc.merge(m);
        acc
    });

    tensors
        .iter()
        .enumerate()
        .map(|(t, tensor)| {
            let lane = |flat: usize, part: usize| flat * lanes + 2 * t + part;
            let components = (0..size)
                .map(|flat| Complex::new(total.mean[lane(flat, 0)], total.mean[lane(flat, 1)]))
                .collect();
            let errors = ComponentErrors {
                re: (0..size).map(|f| total.standard_error(lane(f, 0))).collect(),
                im: (0..size).map(|f| total.standard_error(lane(f, 1))).collect(),
            };
            let mut averaged_tensor = Tensor::from_components(rank, components)?;
            averaged_tensor.unit_tag = tensor.unit_tag.clone();
            let coefficients = if (MIN_BASIS_RANK..=MAX_BASIS_RANK).contains(&rank) {
                rotational_average(&averaged_tensor)?.coefficients
            } else {
                Vec::new()
            };
            Ok(AverageResult {
                rank,
                averaged_tensor,
                coefficients,
                method: AverageMethod::MonteCarlo,
                standard_errors: Some(errors),
                samples: n_samples,
            })
        })
        .collect()
}

/// `(1/n) Σ R_k·T` over `n_samples` uniform rotations, with per-component
/// standard errors.
pub fn so3_sample_average<S: Real>(
    tensor: &Tensor<S>,
    n_samples: usize,
    seed: u64,
) -> Result<AverageResult<S>> {
    Ok(so3_sample_average_batch(std::slice::from_ref(tensor), n_samples, seed)?
        .pop()
        .expect("one tensor in, one result out"))
}

/// Monte Carlo estimate of a scalar with the standard errors of its real and
/// imaginary parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampledScalar {
    pub mean: [f64; 2],
    pub std_error: [f64; 2],
    pub samples: usize,
}

impl SampledScalar {
    /// Largest of `|mean − reference| / se` over the real and imaginary parts.
    pub fn standard_score(&self, reference: Complex<f64>) -> f64 {
        [(self.mean[0] - reference.re, self.std_error[0]), (self.mean[1] - reference.im, self.std_error[1])]
            .into_iter()
            .map(|(d, se)| {
                if se > 0.0 {
                    d.abs() / se
                } else if d == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Monte Carlo counterpart of [`averaged_observable`]. Uses
/// `⟨R·T, F⟩ = ⟨T, Rᵀ·F⟩`, rotating the field vectors instead of the tensor.
pub fn so3_sample_observable<S: Real>(
    mol_tensor: &Tensor<S>,
    fields: &[Vector3<S>],
    n_samples: usize,
    seed: u64,
) -> Result<SampledScalar> {
    let one = Complex::new(S::one(), S::zero());
    so3_sample_observable_sum(mol_tensor, &[(one, fields.to_vec())], n_samples, seed)
}

/// Monte Carlo estimate of `Σₜ cₜ ⟨T⟩ : (fₜ₁ ⊗ fₜ₂ ⊗ …)`, every term evaluated on
/// the same rotation so the standard error accounts for their correlation.
pub fn so3_sample_observable_sum<S: Real>(
    mol_tensor: &Tensor<S>,
    terms: &[(Complex<S>, Vec<Vector3<S>>)],
    n_samples: usize,
    seed: u64,
) -> Result<SampledScalar> {
    if let Some((_, bad)) = terms.iter().find(|(_, f)| f.len() != mol_tensor.rank()) {
        return Err(Error::RankMismatch {
            expected: mol_tensor.rank(),
            found: bad.len(),
        });
    }
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
    }
    let blocks: Vec<Moments<S>> = block_sizes(n_samples)
        .into_par_iter()
        .enumerate()
        .map(|(b, count)| {
            let mut rng = block_rng(seed, b);
            let mut moments = Moments::new(2);
            for _ in 0..count {
                let inverse = sample_rotation::<S, _>(&mut rng).transpose();
                let mut value = Complex::<S>::zero();
                for (coefficient, fields) in terms {
                    let rotated: Vec<Vector3<S>> = fields.iter().map(|f| inverse.apply(f)).collect();
                    let term = outer_of_vectors(&rotated)
                        .and_then(|outer| full_contraction(mol_tensor, &outer))
                        .expect("ranks checked above");
                    value = value + *coefficient * term;
                }
                moments.push(&[value.re, value.im]);
            }
            moments
        })
        .collect();
    let total = blocks.iter().fold(Moments::new(2), |mut acc, m| {
        acc.merge(m);
        acc
    });
    Ok(SampledScalar {
        mean: [total.mean[0].approx_f64(), total.mean[1].approx_f64()],
        std_error: [total.standard_error(0).approx_f64(), total.standard_error(1).approx_f64()],
        samples: n_samples,
    })
}

impl<S: Scalar> AverageResult<S> {
    /// `Σ coefficients · basis`, for checking the stored decomposition.
    pub fn reconstruct(&self) -> Result<Tensor<S>> {
        Ok(isotropic_basis::<S>(self.rank)?.combine(&self.coefficients))
    }

    pub fn is_zero_tensor(&self) -> bool {
        self.averaged_tensor.components().iter().all(|c| c.is_zero())
    }
}
