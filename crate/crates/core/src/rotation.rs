//! Proper rotations of 3D space as 3×3 matrices.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{two, Real, Scalar};
use crate::tensor::Vector3;

#[derive(Clone, Debug, PartialEq)]
pub struct Rotation3<S> {
    m: [[S; 3]; 3],
}

impl<S: Scalar> Rotation3<S> {
    pub fn identity() -> Self {
        let mut m: [[S; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| S::zero()));
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = S::one();
        }
        Self { m }
    }

    /// Rotation of the quaternion `w + xi + yj + zk`. The quaternion need not be
    /// normalized; the matrix is divided by its squared norm, so rational
    /// quaternions give exactly rational rotations.
    pub fn from_quaternion(w: S, x: S, y: S, z: S) -> Self {
        let n = w.clone() * w.clone() + x.clone() * x.clone() + y.clone() * y.clone() + z.clone() * z.clone();
        assert!(!n.is_zero(), "zero quaternion has no rotation");
        let t = two::<S>();
        let (ww, xx, yy, zz) = (
            w.clone() * w.clone(),
            x.clone() * x.clone(),
            y.clone() * y.clone(),
            z.clone() * z.clone(),
        );
        let m = [
            [
                ww.clone() + xx.clone() - yy.clone() - zz.clone(),
                t.clone() * (x.clone() * y.clone() - w.clone() * z.clone()),
                t.clone() * (x.clone() * z.clone() + w.clone() * y.clone()),
            ],
            [
                t.clone() * (x.clone() * y.clone() + w.clone() * z.clone()),
                ww.clone() - xx.clone() + yy.clone() - zz.clone(),
                t.clone() * (y.clone() * z.clone() - w.clone() * x.clone()),
            ],
            [
                t.clone() * (x.clone() * z.clone() - w.clone() * y.clone()),
                t.clone() * (y.clone() * z.clone() + w.clone() * x.clone()),
                ww - xx - yy + zz,
            ],
        ];
        Self {
            m: m.map(|row| row.map(|v| v / n.clone())),
        }
    }

    /// Accepts a matrix only if it is orthogonal with determinant +1.
    pub fn from_matrix(m: [[S; 3]; 3], tol: f64) -> Result<Self> {
        let r = Self { m };
        let defect = r.orthogonality_defect();
        let det = r.determinant();
        let det_ok = (det.clone() - S::one()).negligible(&S::one(), tol);
        if !defect.negligible(&S::one(), tol) || !det_ok {
            return Err(Error::InvalidFrame(format!(
                "matrix is not a proper rotation (orthogonality defect {:.3e}, det {:.6})",
                defect.approx_f64(),
                det.approx_f64()
            )));
        }
        Ok(r)
    }

    pub fn matrix(&self) -> &[[S; 3]; 3] {
        &self.m
    }

    pub fn transpose(&self) -> Self {
        Self {
            m: std::array::from_fn(|i| std::array::from_fn(|j| self.m[j][i].clone())),
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            m: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    (0..3).fold(S::zero(), |acc, k| {
                        acc + self.m[i][k].clone() * other.m[k][j].clone()
                    })
                })
            }),
        }
    }

    pub fn apply(&self, v: &Vector3<S>) -> Vector3<S> {
        Vector3(std::array::from_fn(|i| {
            (0..3).fold(Complex::zero(), |acc, k| {
                acc + v.0[k].clone() * self.m[i][k].clone()
            })
        }))
    }

    pub fn determinant(&self) -> S {
        let m = &self.m;
        m[0][0].clone() * (m[1][1].clone() * m[2][2].clone() - m[1][2].clone() * m[2][1].clone())
            - m[0][1].clone() * (m[1][0].clone() * m[2][2].clone() - m[1][2].clone() * m[2][0].clone())
            + m[0][2].clone() * (m[1][0].clone() * m[2][1].clone() - m[1][1].clone() * m[2][0].clone())
    }

    /// Largest entry of |RᵀR − I|.
    pub fn orthogonality_defect(&self) -> S {
        let rtr = self.transpose().compose(self);
        let mut worst = S::zero();
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { S::one() } else { S::zero() };
                worst = S::max_of(worst, (rtr.m[i][j].clone() - target).abs());
            }
        }
        worst
    }
}

impl<S: Real> Rotation3<S> {
    /// Rotation by `angle` about the unit `axis` (Rodrigues' formula).
    pub fn from_axis_angle(axis: [S; 3], angle: S) -> Self {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let half = angle / two::<S>();
        let s = half.sin() / norm;
        Self::from_quaternion(half.cos(), axis[0] * s, axis[1] * s, axis[2] * s)
    }

    /// Rotation of a unit quaternion `[w, x, y, z]`.
    pub fn from_unit_quaternion(q: [S; 4]) -> Self {
        Self::from_quaternion(q[0], q[1], q[2], q[3])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;
    use num_traits::One;

    #[test]
    fn rational_quaternion_gives_exact_rotation() {
        let r = Rotation3::<BigRational>::from_quaternion(ratio(1, 1), ratio(2, 1), ratio(-3, 1), ratio(5, 7));
        assert!(r.orthogonality_defect().is_zero());
        assert!(r.determinant().is_one());
    }

    #[test]
    fn quarter_turn_about_z() {
        let r = Rotation3::<f64>::from_axis_angle([0.0, 0.0, 1.0], std::f64::consts::FRAC_PI_2);
        let v = r.apply(&Vector3::x());
        assert!(v.max_abs_diff(&Vector3::y()) < 1e-15);
    }

    #[test]
    fn improper_matrix_rejected() {
        let reflect = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]];
        assert!(Rotation3::<f64>::from_matrix(reflect, 1e-12).is_err());
        let skew = [[1.0, 0.1, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(Rotation3::<f64>::from_matrix(skew, 1e-12).is_err());
    }
}
