//! Isotropic (rotation-invariant) tensor bases for ranks 2 to 5, built from
//! Kronecker deltas and the Levi-Civita symbol.
//!
//! | rank | members                                    | count |
//! |------|--------------------------------------------|-------|
//! | 2    | δᵢⱼ                                        | 1     |
//! | 3    | εᵢⱼₖ                                       | 1     |
//! | 4    | δᵢⱼδₖₗ, δᵢₖδⱼₗ, δᵢₗδⱼₖ                     | 3     |
//! | 5    | ε with the first index and one pair of the remaining four, δ on the rest | 6 |
//!
//! The ten ε·δ products of rank 5 span only six dimensions; keeping the six
//! that carry the first index inside ε gives an independent set.

use std::sync::OnceLock;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::RationalMatrix;
use crate::scalar::Scalar;
use crate::tensor::{component_count, permutation_sign, Tensor};

pub const MIN_BASIS_RANK: usize = 2;
pub const MAX_BASIS_RANK: usize = 5;

/// Isotropic tensors of one rank, with a readable label per member.
#[derive(Clone, Debug, PartialEq)]
pub struct IsotropicBasis<S> {
    pub rank: usize,
    pub members: Vec<Tensor<S>>,
    pub labels: Vec<String>,
}

impl<S: Scalar> IsotropicBasis<S> {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `Σ cᵣ Bᵣ`.
    pub fn combine(&self, coefficients: &[Complex<S>]) -> Tensor<S> {
        assert_eq!(coefficients.len(), self.members.len());
        self.members
            .iter()
            .zip(coefficients)
            .fold(Tensor::zeros(self.rank), |acc, (m, c)| &acc + &m.scale(c))
    }
}

/// Which slots go into ε (if any) and which are paired by δ.
struct Pattern {
    epsilon: Option<[usize; 3]>,
    deltas: Vec<(usize, usize)>,
}

const INDEX_NAMES: [char; 5] = ['i', 'j', 'k', 'l', 'm'];

impl Pattern {
    fn label(&self) -> String {
        let mut s = String::new();
        if let Some(e) = self.epsilon {
            s.push('ε');
            s.extend(e.iter().map(|&i| INDEX_NAMES[i]));
        }
        for &(a, b) in &self.deltas {
            s.push('δ');
            s.push(INDEX_NAMES[a]);
            s.push(INDEX_NAMES[b]);
        }
        s
    }

    fn value(&self, index: &[usize]) -> i64 {
        let eps = self
            .epsilon
            .map_or(1, |[a, b, c]| permutation_sign(index[a], index[b], index[c]));
        self.deltas
            .iter()
            .fold(eps, |acc, &(a, b)| if index[a] == index[b] { acc } else { 0 })
    }
}

fn patterns(rank: usize) -> Vec<Pattern> {
    match rank {
        2 => vec![Pattern {
            epsilon: None,
            deltas: vec![(0, 1)],
        }],
        3 => vec![Pattern {
            epsilon: Some([0, 1, 2]),
            deltas: vec![],
        }],
        4 => [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]]
            .into_iter()
            .map(|pairs| Pattern {
                epsilon: None,
                deltas: pairs.to_vec(),
            })
            .collect(),
        5 => {
            let mut out = Vec::new();
            for a in 1..5 {
                for b in (a + 1)..5 {
                    let rest: Vec<usize> = (1..5).filter(|&x| x != a && x != b).collect();
                    out.push(Pattern {
                        epsilon: Some([0, a, b]),
                        deltas: vec![(rest[0], rest[1])],
                    });
                }
            }
            out
        }
        _ => Vec::new(),
    }
}

fn multi_index(mut flat: usize, rank: usize) -> [usize; 5] {
    let mut idx = [0; 5];
    for slot in (0..rank).rev() {
        idx[slot] = flat % 3;
        flat /= 3;
    }
    idx
}

fn integer_members(rank: usize) -> Vec<(String, Vec<i64>)> {
    patterns(rank)
        .into_iter()
        .map(|p| {
            let values = (0..component_count(rank))
                .map(|flat| p.value(&multi_index(flat, rank)[..rank]))
                .collect();
            (p.label(), values)
        })
        .collect()
}

fn check_rank(rank: usize) -> Result<()> {
    if (MIN_BASIS_RANK..=MAX_BASIS_RANK).contains(&rank) {
        Ok(())
    } else {
        Err(Error::UnsupportedRank {
            rank,
            context: "isotropic bases are provided for ranks 2 to 5",
        })
    }
}

/// Isotropic basis of the given rank.
pub fn isotropic_basis<S: Scalar>(rank: usize) -> Result<IsotropicBasis<S>> {
    check_rank(rank)?;
    let (labels, members) = integer_members(rank)
        .into_iter()
        .map(|(label, values)| {
            let tensor = Tensor::from_real(rank, values.into_iter().map(S::from_int).collect())
                .expect("component count matches rank");
            (label, tensor)
        })
        .unzip();
    Ok(IsotropicBasis {
        rank,
        members,
        labels,
    })
}

struct ExactTables {
    gram: RationalMatrix,
    inverse: RationalMatrix,
}

fn tables(rank: usize) -> &'static ExactTables {
    static CACHE: [OnceLock<ExactTables>; MAX_BASIS_RANK + 1] =
        [const { OnceLock::new() }; MAX_BASIS_RANK + 1];
    CACHE[rank].get_or_init(|| {
        let members = integer_members(rank);
        let gram = RationalMatrix::from_fn(members.len(), members.len(), |a, b| {
            let dot: i64 = members[a]
                .1
                .iter()
                .zip(&members[b].1)
                .map(|(x, y)| x * y)
                .sum();
            BigRational::from_integer(dot.into())
        });
        let inverse = gram
            .inverse()
            .expect("isotropic basis members are linearly independent");
        ExactTables { gram, inverse }
    })
}

/// Gram matrix `⟨Bₐ, B_b⟩` of the rank's basis, exact.
pub fn gram_matrix(rank: usize) -> Result<&'static RationalMatrix> {
    check_rank(rank)?;
    Ok(&tables(rank).gram)
}

/// Exact inverse of [`gram_matrix`]: the map from molecule-frame invariants
/// `⟨Bᵣ, T⟩` to lab-frame coefficients on the basis.
pub fn gram_inverse(rank: usize) -> Result<&'static RationalMatrix> {
    check_rank(rank)?;
    Ok(&tables(rank).inverse)
}

/// Coefficients `c = G⁻¹ v` given invariants `v`.
pub(crate) fn coefficients_from_invariants<S: Scalar>(
    rank: usize,
    invariants: &[Complex<S>],
) -> Result<Vec<Complex<S>>> {
    let inverse = gram_inverse(rank)?;
    let (n, _) = inverse.shape();
    assert_eq!(invariants.len(), n);
    Ok((0..n)
        .map(|a| {
            (0..n).fold(Complex::zero(), |acc, b| {
                acc + invariants[b].clone() * S::from_ratio(inverse.get(a, b))
            })
        })
        .collect())
}
