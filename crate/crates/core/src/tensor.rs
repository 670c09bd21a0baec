//! Dense complex Cartesian tensors over three dimensions.
//!
//! Components are stored row-major: the last index varies fastest, so the
//! flat position of `(i0, i1, .., i_{r-1})` is `Σ i_k 3^(r-1-k)`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rotation::Rotation3;
use crate::scalar::Scalar;

pub const MAX_RANK: usize = 6;

/// Number of components of a rank-`rank` tensor in 3D.
pub const fn component_count(rank: usize) -> usize {
    3usize.pow(rank as u32)
}

/// Complex 3-vector. Polarization vectors, wave-vectors and moments all live here.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector3<S>(pub [Complex<S>; 3]);

impl<S: Scalar> Vector3<S> {
    pub fn new(x: Complex<S>, y: Complex<S>, z: Complex<S>) -> Self {
        Self([x, y, z])
    }

    pub fn real(x: S, y: S, z: S) -> Self {
        Self([
            Complex::new(x, S::zero()),
            Complex::new(y, S::zero()),
            Complex::new(z, S::zero()),
        ])
    }

    pub fn zero() -> Self {
        Self::real(S::zero(), S::zero(), S::zero())
    }

    pub fn unit(axis: usize) -> Self {
        let mut v = Self::zero();
        v.0[axis] = Complex::one();
        v
    }

    pub fn x() -> Self {
        Self::unit(0)
    }

    pub fn y() -> Self {
        Self::unit(1)
    }

    pub fn z() -> Self {
        Self::unit(2)
    }

    /// Bilinear product `Σ aᵢbᵢ`, no conjugation.
    pub fn dot(&self, other: &Self) -> Complex<S> {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(Complex::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn conj(&self) -> Self {
        Self([self.0[0].conj(), self.0[1].conj(), self.0[2].conj()])
    }

    pub fn cross(&self, other: &Self) -> Self {
        let [a0, a1, a2] = &self.0;
        let [b0, b1, b2] = &other.0;
        Self([
            a1.clone() * b2.clone() - a2.clone() * b1.clone(),
            a2.clone() * b0.clone() - a0.clone() * b2.clone(),
            a0.clone() * b1.clone() - a1.clone() * b0.clone(),
        ])
    }

    /// `Σ ēᵢeᵢ`, the squared Hermitian norm.
    pub fn norm_sqr(&self) -> S {
        self.0.iter().fold(S::zero(), |acc, c| acc + c.norm_sqr())
    }

    pub fn scale(&self, s: &S) -> Self {
        Self([
            self.0[0].clone() * s.clone(),
            self.0[1].clone() * s.clone(),
            self.0[2].clone() * s.clone(),
        ])
    }

    pub fn scale_complex(&self, s: &Complex<S>) -> Self {
        Self([
            self.0[0].clone() * s.clone(),
            self.0[1].clone() * s.clone(),
            self.0[2].clone() * s.clone(),
        ])
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|c| c.im.is_zero())
    }

    /// Real parts, for vectors known to be real (wave-vectors, positions).
    pub fn re(&self) -> [S; 3] {
        [self.0[0].re.clone(), self.0[1].re.clone(), self.0[2].re.clone()]
    }

    pub fn to_tensor(&self) -> Tensor<S> {
        Tensor {
            rank: 1,
            components: self.0.to_vec(),
            unit_tag: String::new(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a.clone() - b.clone()).norm_sqr().approx_f64().sqrt())
            .fold(0.0, f64::max)
    }
}

impl<S: Scalar> Add for Vector3<S> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let [a0, a1, a2] = self.0;
        let [b0, b1, b2] = rhs.0;
        Self([a0 + b0, a1 + b1, a2 + b2])
    }
}

impl<S: Scalar> Sub for Vector3<S> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        let [a0, a1, a2] = self.0;
        let [b0, b1, b2] = rhs.0;
        Self([a0 - b0, a1 - b1, a2 - b2])
    }
}

impl<S: Scalar> Neg for Vector3<S> {
    type Output = Self;

    fn neg(self) -> Self {
        let [a0, a1, a2] = self.0;
        Self([-a0, -a1, -a2])
    }
}

/// Complex rank-`rank` tensor over 3D space.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<S> {
    rank: usize,
    components: Vec<Complex<S>>,
    /// Free-form unit annotation, carried through serialization only.
    pub unit_tag: String,
}

impl<S: Scalar> Tensor<S> {
    pub fn zeros(rank: usize) -> Self {
        assert!(rank <= MAX_RANK, "rank {rank} exceeds {MAX_RANK}");
        Self {
            rank,
            components: vec![Complex::zero(); component_count(rank)],
            unit_tag: String::new(),
        }
    }

    pub fn scalar(value: Complex<S>) -> Self {
        Self {
            rank: 0,
            components: vec![value],
            unit_tag: String::new(),
        }
    }

    pub fn from_components(rank: usize, components: Vec<Complex<S>>) -> Result<Self> {
        if rank > MAX_RANK {
            return Err(Error::UnsupportedRank {
                rank,
                context: "tensors are limited to rank 6",
            });
        }
        let expected = component_count(rank);
        if components.len() != expected {
            return Err(Error::ComponentCount {
                rank,
                expected,
                found: components.len(),
            });
        }
        Ok(Self {
            rank,
            components,
            unit_tag: String::new(),
        })
    }

    pub fn from_real(rank: usize, values: Vec<S>) -> Result<Self> {
        Self::from_components(
            rank,
            values
                .into_iter()
                .map(|v| Complex::new(v, S::zero()))
                .collect(),
        )
    }

    /// Rank-2 tensor from a row-major 3×3 array.
    pub fn from_matrix(m: [[S; 3]; 3]) -> Self {
        let values = m.into_iter().flatten().collect();
        Self::from_real(2, values).expect("nine components")
    }

    pub fn with_unit(mut self, unit: impl Into<String>) -> Self {
        self.unit_tag = unit.into();
        self
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn components(&self) -> &[Complex<S>] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Complex<S>> {
        self.components
    }

    pub fn flat_index(&self, index: &[usize]) -> usize {
        assert_eq!(index.len(), self.rank, "index arity must equal rank");
        index.iter().fold(0, |acc, &i| {
            assert!(i < 3, "index component {i} out of range");
            acc * 3 + i
        })
    }

    pub fn get(&self, index: &[usize]) -> &Complex<S> {
        &self.components[self.flat_index(index)]
    }

    pub fn set(&mut self, index: &[usize], value: Complex<S>) {
        let at = self.flat_index(index);
        self.components[at] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    pub fn is_real(&self) -> bool {
        self.components.iter().all(|c| c.im.is_zero())
    }

    pub fn scale(&self, s: &Complex<S>) -> Self {
        self.map(|c| c.clone() * s.clone())
    }

    pub fn scale_real(&self, s: &S) -> Self {
        self.map(|c| c.clone() * s.clone())
    }

    pub fn conj(&self) -> Self {
        self.map(|c| c.conj())
    }

    pub fn map(&self, f: impl Fn(&Complex<S>) -> Complex<S>) -> Self {
        Self {
            rank: self.rank,
            components: self.components.iter().map(f).collect(),
            unit_tag: self.unit_tag.clone(),
        }
    }

    /// Trace of a rank-2 tensor.
    pub fn trace(&self) -> Complex<S> {
        assert_eq!(self.rank, 2, "trace needs a rank-2 tensor");
        (0..3).fold(Complex::zero(), |acc, i| {
            acc + self.components[4 * i].clone()
        })
    }

    /// Swaps the two indices of a rank-2 tensor.
    pub fn transpose(&self) -> Self {
        assert_eq!(self.rank, 2, "transpose needs a rank-2 tensor");
        let mut out = self.clone();
        for i in 0..3 {
            for j in 0..3 {
                out.components[3 * i + j] = self.components[3 * j + i].clone();
            }
        }
        out
    }

    /// Largest componentwise modulus of `self - other`, in `f64`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.rank, other.rank, "rank mismatch");
        self.components
            .iter()
            .zip(other.components.iter())
            .map(|(a, b)| (a.clone() - b.clone()).norm_sqr().approx_f64().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.norm_sqr().approx_f64().sqrt())
            .fold(0.0, f64::max)
    }

    /// `T'ᵢ'ⱼ'… = Rᵢ'ᵢ Rⱼ'ⱼ … Tᵢⱼ…`, applied one index at a time.
    pub fn rotate(&self, rotation: &Rotation3<S>) -> Self {
        let mut current = self.components.clone();
        let mut scratch = current.clone();
        for mode in 0..self.rank {
            let stride = component_count(self.rank - 1 - mode);
            apply_mode(&current, &mut scratch, rotation.matrix(), stride);
            std::mem::swap(&mut current, &mut scratch);
        }
        Self {
            rank: self.rank,
            components: current,
            unit_tag: self.unit_tag.clone(),
        }
    }

    pub fn to_f64(&self) -> Tensor<f64> {
        Tensor {
            rank: self.rank,
            components: self
                .components
                .iter()
                .map(|c| Complex::new(c.re.approx_f64(), c.im.approx_f64()))
                .collect(),
            unit_tag: self.unit_tag.clone(),
        }
    }
}

fn apply_mode<S: Scalar>(
    input: &[Complex<S>],
    output: &mut [Complex<S>],
    r: &[[S; 3]; 3],
    stride: usize,
) {
    let block = 3 * stride;
    for (src, dst) in input.chunks(block).zip(output.chunks_mut(block)) {
        for (a, row) in r.iter().enumerate() {
            for s in 0..stride {
                dst[a * stride + s] = src[s].clone() * row[0].clone()
                    + src[stride + s].clone() * row[1].clone()
                    + src[2 * stride + s].clone() * row[2].clone();
            }
        }
    }
}

impl<S: Scalar> Add for &Tensor<S> {
    type Output = Tensor<S>;

    fn add(self, rhs: &Tensor<S>) -> Tensor<S> {
        assert_eq!(self.rank, rhs.rank, "rank mismatch in tensor sum");
        Tensor {
            rank: self.rank,
            components: self
                .components
                .iter()
                .zip(rhs.components.iter())
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
            unit_tag: self.unit_tag.clone(),
        }
    }
}

impl<S: Scalar> Sub for &Tensor<S> {
    type Output = Tensor<S>;

    fn sub(self, rhs: &Tensor<S>) -> Tensor<S> {
        assert_eq!(self.rank, rhs.rank, "rank mismatch in tensor difference");
        Tensor {
            rank: self.rank,
            components: self
                .components
                .iter()
                .zip(rhs.components.iter())
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
            unit_tag: self.unit_tag.clone(),
        }
    }
}

impl<S: Scalar> Neg for &Tensor<S> {
    type Output = Tensor<S>;

    fn neg(self) -> Tensor<S> {
        self.map(|c| -c.clone())
    }
}

impl<S: Scalar> Mul<&Tensor<S>> for Complex<S> {
    type Output = Tensor<S>;

    fn mul(self, rhs: &Tensor<S>) -> Tensor<S> {
        rhs.scale(&self)
    }
}

/// Kronecker delta δᵢⱼ.
pub fn kronecker_delta<S: Scalar>() -> Tensor<S> {
    let mut t = Tensor::zeros(2);
    for i in 0..3 {
        t.set(&[i, i], Complex::one());
    }
    t
}

/// Sign of a permutation of (0, 1, 2); zero when an index repeats.
pub(crate) fn permutation_sign(i: usize, j: usize, k: usize) -> i64 {
    if i == j || j == k || i == k {
        0
    } else if (i, j, k) == (0, 1, 2) || (i, j, k) == (1, 2, 0) || (i, j, k) == (2, 0, 1) {
        1
    } else {
        -1
    }
}

/// Levi-Civita symbol with ε₀₁₂ = +1.
pub fn levi_civita<S: Scalar>() -> Tensor<S> {
    let mut t = Tensor::zeros(3);
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let sign = permutation_sign(i, j, k);
                if sign != 0 {
                    t.set(&[i, j, k], Complex::new(S::from_int(sign), S::zero()));
                }
            }
        }
    }
    t
}

/// `(a ⊗ b)(i…, j…) = a(i…)·b(j…)`.
pub fn outer_product<S: Scalar>(a: &Tensor<S>, b: &Tensor<S>) -> Result<Tensor<S>> {
    if a.rank + b.rank > MAX_RANK {
        return Err(Error::RankOverflow {
            left: a.rank,
            right: b.rank,
            max: MAX_RANK,
        });
    }
    let mut components = Vec::with_capacity(a.components.len() * b.components.len());
    for x in &a.components {
        for y in &b.components {
            components.push(x.clone() * y.clone());
        }
    }
    let mut out = Tensor::from_components(a.rank + b.rank, components)?;
    out.unit_tag = match (a.unit_tag.is_empty(), b.unit_tag.is_empty()) {
        (true, true) => String::new(),
        (false, true) => a.unit_tag.clone(),
        (true, false) => b.unit_tag.clone(),
        (false, false) => format!("{}·{}", a.unit_tag, b.unit_tag),
    };
    Ok(out)
}

/// Outer product of a list of vectors, in order.
pub fn outer_of_vectors<S: Scalar>(vectors: &[Vector3<S>]) -> Result<Tensor<S>> {
    vectors
        .iter()
        .try_fold(Tensor::scalar(Complex::one()), |acc, v| {
            outer_product(&acc, &v.to_tensor())
        })
}

/// `Σ a(idx)·b(idx)` over all index tuples. No implicit conjugation.
pub fn full_contraction<S: Scalar>(a: &Tensor<S>, b: &Tensor<S>) -> Result<Complex<S>> {
    if a.rank != b.rank {
        return Err(Error::RankMismatch {
            expected: a.rank,
            found: b.rank,
        });
    }
    Ok(a.components
        .iter()
        .zip(b.components.iter())
        .fold(Complex::zero(), |acc, (x, y)| acc + x.clone() * y.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn delta_entries_and_trace() {
        let d: Tensor<f64> = kronecker_delta();
        assert_eq!(*d.get(&[0, 0]), c(1.0));
        assert_eq!(*d.get(&[0, 1]), c(0.0));
        assert_eq!(d.trace(), c(3.0));
    }

    #[test]
    fn levi_civita_entries() {
        let e: Tensor<f64> = levi_civita();
        assert_eq!(*e.get(&[0, 1, 2]), c(1.0));
        assert_eq!(*e.get(&[1, 0, 2]), c(-1.0));
        assert_eq!(*e.get(&[0, 0, 2]), c(0.0));
        assert_eq!(*e.get(&[2, 0, 1]), c(1.0));
    }

    #[test]
    fn outer_product_examples() {
        let d: Tensor<f64> = kronecker_delta();
        let dd = outer_product(&d, &d).unwrap();
        assert_eq!(dd.rank(), 4);
        assert_eq!(*dd.get(&[0, 0, 1, 1]), c(1.0));
        assert_eq!(*dd.get(&[0, 1, 0, 1]), c(0.0));

        let two = Tensor::scalar(c(2.0));
        assert_eq!(outer_product(&two, &d).unwrap(), d.scale(&c(2.0)));

        let xy = outer_product(&Vector3::<f64>::x().to_tensor(), &Vector3::y().to_tensor()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if (i, j) == (0, 1) { 1.0 } else { 0.0 };
                assert_eq!(*xy.get(&[i, j]), c(expect));
            }
        }
    }

    #[test]
    fn outer_product_rank_overflow_is_reported() {
        let e: Tensor<f64> = levi_civita();
        let d: Tensor<f64> = kronecker_delta();
        let e5 = outer_product(&e, &d).unwrap();
        match outer_product(&e5, &d) {
            Err(Error::RankOverflow { left, right, max }) => {
                assert_eq!((left, right, max), (5, 2, 6))
            }
            other => panic!("expected rank overflow, got {other:?}"),
        }
    }

    #[test]
    fn contraction_examples() {
        let d: Tensor<f64> = kronecker_delta();
        let e: Tensor<f64> = levi_civita();
        assert_eq!(full_contraction(&d, &d).unwrap(), c(3.0));
        assert_eq!(full_contraction(&e, &e).unwrap(), c(6.0));

        let t = Tensor::from_components(
            2,
            (0..9).map(|k| Complex::new(k as f64 * 0.7 - 1.0, k as f64 * 0.1)).collect(),
        )
        .unwrap();
        let trace = t.trace();
        assert!((full_contraction(&t, &d).unwrap() - trace).norm() < 1e-15);
        assert!(matches!(
            full_contraction(&t, &e),
            Err(Error::RankMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn epsilon_delta_identity_exact() {
        let e: Tensor<BigRational> = levi_civita();
        let d: Tensor<BigRational> = kronecker_delta();
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    for m in 0..3 {
                        let lhs = (0..3).fold(Complex::<BigRational>::zero(), |acc, i| {
                            acc + e.get(&[i, j, k]).clone() * e.get(&[i, l, m]).clone()
                        });
                        let rhs = d.get(&[j, l]).clone() * d.get(&[k, m]).clone()
                            - d.get(&[j, m]).clone() * d.get(&[k, l]).clone();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn component_count_is_enforced() {
        assert!(matches!(
            Tensor::<f64>::from_components(2, vec![c(1.0); 8]),
            Err(Error::ComponentCount { rank: 2, expected: 9, found: 8 })
        ));
        assert!(Tensor::<f64>::from_components(7, vec![]).is_err());
    }

    #[test]
    fn vector_cross_and_norm() {
        let x = Vector3::<f64>::x();
        let y = Vector3::<f64>::y();
        assert_eq!(x.cross(&y), Vector3::z());
        let e = Vector3::new(Complex::new(0.6, 0.0), Complex::new(0.0, 0.8), c(0.0));
        assert!((e.norm_sqr() - 1.0).abs() < 1e-15);
        assert!((e.dot(&e.conj()) - c(1.0)).norm() < 1e-15);
    }
}
