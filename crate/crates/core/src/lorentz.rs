//! Lorentzian linear algebra in `E_1^k` with signature `(-, +, ..., +)`.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// Coordinates of a vector in Minkowski space; the first coordinate is time-like.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MinkowskiVector(pub Vec<f64>);

impl MinkowskiVector {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn zeros(k: usize) -> Self {
        Self(vec![0.0; k])
    }

    /// Coordinate basis vector `∂_{x_{i+1}}` (0-based `i`).
    pub fn basis(k: usize, i: usize) -> Self {
        let mut v = vec![0.0; k];
        v[i] = 1.0;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Minkowski inner product. Lengths must agree.
    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        let mut s = -self.0[0] * other.0[0];
        for i in 1..self.0.len() {
            s += self.0[i] * other.0[i];
        }
        s
    }

    /// `<v, v>`.
    pub fn norm2(&self) -> f64 {
        self.dot(self)
    }

    pub fn euclid_norm2(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn euclid_norm(&self) -> f64 {
        self.euclid_norm2().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &Self) {
        for (x, y) in self.0.iter_mut().zip(&other.0) {
            *x += a * y;
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self(self.0.iter().map(|x| a * x).collect())
    }
}

impl Index<usize> for MinkowskiVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for MinkowskiVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for &MinkowskiVector {
    type Output = MinkowskiVector;
    fn add(self, rhs: Self) -> MinkowskiVector {
        MinkowskiVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &MinkowskiVector {
    type Output = MinkowskiVector;
    fn sub(self, rhs: Self) -> MinkowskiVector {
        MinkowskiVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &MinkowskiVector {
    type Output = MinkowskiVector;
    fn mul(self, a: f64) -> MinkowskiVector {
        self.scaled(a)
    }
}

impl Neg for &MinkowskiVector {
    type Output = MinkowskiVector;
    fn neg(self) -> MinkowskiVector {
        self.scaled(-1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalCharacter {
    SpaceLike,
    TimeLike,
    LightLike,
}

/// `-u_1 v_1 + sum_{i>=2} u_i v_i`.
pub fn minkowski_dot(u: &MinkowskiVector, v: &MinkowskiVector) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Dimension {
            expected: u.len(),
            got: v.len(),
        });
    }
    Ok(u.dot(v))
}

/// Classifies `v`; `|<v,v>| <= eps * (1 + |v|^2)` counts as zero and the
/// zero vector is space-like.
pub fn causal_character(v: &MinkowskiVector, eps: f64) -> CausalCharacter {
    let q = v.norm2();
    let e2 = v.euclid_norm2();
    if e2 == 0.0 {
        return CausalCharacter::SpaceLike;
    }
    if q.abs() <= eps * (1.0 + e2) {
        CausalCharacter::LightLike
    } else if q > 0.0 {
        CausalCharacter::SpaceLike
    } else {
        CausalCharacter::TimeLike
    }
}

/// Modified Gram–Schmidt under the Minkowski product. The inputs must span
/// a space-like subspace; the first output is the normalized first input.
pub fn orthonormalize_spacelike(
    vectors: &[MinkowskiVector],
    eps: f64,
) -> Result<Vec<MinkowskiVector>> {
    let mut out: Vec<MinkowskiVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        if let Some(first) = out.first() {
            if first.len() != v.len() {
                return Err(Error::Dimension {
                    expected: first.len(),
                    got: v.len(),
                });
            }
        }
        let mut w = v.clone();
        // two passes keep the result orthogonal to roundoff
        for _ in 0..2 {
            for e in &out {
                let c = w.dot(e);
                w.axpy(-c, e);
            }
        }
        let q = w.norm2();
        let scale = v.euclid_norm2();
        if !(q > eps * scale) || scale == 0.0 {
            return Err(Error::DegenerateSubspace {
                pivot: if scale > 0.0 { q / scale } else { 0.0 },
            });
        }
        out.push(w.scaled(1.0 / q.sqrt()));
    }
    Ok(out)
}

/// Completes a light-like normal `theta` to a pseudo-orthonormal normal pair:
/// returns the unique `xi` with `<xi,xi> = 0`, `<xi,theta> = -1` and
/// `<xi, e_i> = 0` for every vector of the orthonormal `tangent_basis`.
///
/// `xi` inherits the time orientation of `theta`; for a future-pointing
/// `theta` it is future-pointing.
pub fn complete_pseudo_orthonormal(
    theta: &MinkowskiVector,
    tangent_basis: &[MinkowskiVector],
) -> Result<MinkowskiVector> {
    let k = theta.len();
    for e in tangent_basis {
        if e.len() != k {
            return Err(Error::Dimension {
                expected: k,
                got: e.len(),
            });
        }
    }
    let scale = theta.euclid_norm();
    if scale == 0.0 {
        return Err(Error::DegenerateNormal);
    }
    for i in 0..k {
        let mut v = MinkowskiVector::basis(k, i);
        for _ in 0..2 {
            for e in tangent_basis {
                let c = v.dot(e);
                v.axpy(-c, e);
            }
        }
        let d = v.dot(theta);
        if d.abs() <= 1e-8 * scale * v.euclid_norm().max(1.0) {
            continue;
        }
        let v = v.scaled(-1.0 / d);
        let mut xi = v.clone();
        xi.axpy(0.5 * v.norm2(), theta);
        return Ok(xi);
    }
    Err(Error::DegenerateNormal)
}

/// Real symmetric matrix expressed in an orthonormal tangent basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricOperator(DMatrix<f64>);

impl SymmetricOperator {
    /// Validates symmetry to `eps * max|M|` and symmetrizes.
    pub fn new(m: DMatrix<f64>, eps: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let scale = m.amax();
        let n = m.nrows();
        for i in 0..n {
            for j in 0..i {
                if (m[(i, j)] - m[(j, i)]).abs() > eps * scale.max(1.0) {
                    return Err(Error::Precondition(format!(
                        "operator not symmetric at ({i},{j}): {} vs {}",
                        m[(i, j)],
                        m[(j, i)]
                    )));
                }
            }
        }
        Ok(Self((&m + m.transpose()) * 0.5))
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> f64) -> Self {
        let m = DMatrix::from_fn(n, n, f);
        Self((&m + m.transpose()) * 0.5)
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// `|| M - (tr M / n) Id ||`, zero exactly for multiples of the identity.
    pub fn umbilicity_defect(&self) -> f64 {
        let n = self.dim();
        let f = self.trace() / n as f64;
        let id = DMatrix::<f64>::identity(n, n) * f;
        (&self.0 - id).norm()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }
}

/// One eigenpair of a [`SymmetricOperator`].
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

/// Full spectrum in ascending order with orthonormal eigenvectors. Each
/// eigenvector is signed so that its largest-magnitude component is positive.
pub fn symmetric_eigen(op: &SymmetricOperator) -> Vec<EigenPair> {
    let n = op.dim();
    if n == 0 {
        return Vec::new();
    }
    let eig = op.0.clone().symmetric_eigen();
    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|k| {
            let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            let mut best = 0;
            for (i, x) in v.iter().enumerate() {
                if x.abs() > v[best].abs() + 1e-12 {
                    best = i;
                }
            }
            if v[best] < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            EigenPair {
                value: eig.eigenvalues[k],
                vector: v,
            }
        })
        .collect();
    pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mv(v: &[f64]) -> MinkowskiVector {
        MinkowskiVector::new(v.to_vec())
    }

    #[test]
    fn dot_examples() {
        assert_eq!(minkowski_dot(&mv(&[1., 0., 0., 0.]), &mv(&[1., 0., 0., 0.])).unwrap(), -1.0);
        assert_eq!(minkowski_dot(&mv(&[1., 1., 0., 0.]), &mv(&[1., 1., 0., 0.])).unwrap(), 0.0);
        assert_eq!(minkowski_dot(&mv(&[0., 1., 2., 3.]), &mv(&[0., 1., 2., 3.])).unwrap(), 14.0);
        assert!(matches!(
            minkowski_dot(&mv(&[1., 0., 0.]), &mv(&[1., 0., 0., 0.])),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn causal_examples() {
        assert_eq!(causal_character(&mv(&[1., 0., 0., 0.]), 1e-9), CausalCharacter::TimeLike);
        assert_eq!(causal_character(&mv(&[1., 1., 0., 0.]), 1e-9), CausalCharacter::LightLike);
        assert_eq!(causal_character(&mv(&[0., 0., 0., 0.]), 1e-9), CausalCharacter::SpaceLike);
        assert_eq!(causal_character(&mv(&[0., 1., 0., 0.]), 1e-9), CausalCharacter::SpaceLike);
    }

    #[test]
    fn orthonormalize_examples() {
        let out = orthonormalize_spacelike(&[mv(&[0., 1., 0., 0.])], 1e-9).unwrap();
        assert_eq!(out, vec![mv(&[0., 1., 0., 0.])]);

        let out =
            orthonormalize_spacelike(&[mv(&[0., 2., 0., 0.]), mv(&[0., 2., 2., 0.])], 1e-9).unwrap();
        assert!((&out[0] - &mv(&[0., 1., 0., 0.])).max_abs() < 1e-15);
        assert!((&out[1] - &mv(&[0., 0., 1., 0.])).max_abs() < 1e-15);

        // <v,v> = -1 + 4 = 3
        let out = orthonormalize_spacelike(&[mv(&[1., 2., 0., 0.])], 1e-9).unwrap();
        let s3 = 3f64.sqrt();
        assert!((&out[0] - &mv(&[1. / s3, 2. / s3, 0., 0.])).max_abs() < 1e-15);
        assert!((out[0].norm2() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn orthonormalize_rejects_null_and_dependent() {
        assert!(matches!(
            orthonormalize_spacelike(&[mv(&[1., 1., 0., 0.])], 1e-9),
            Err(Error::DegenerateSubspace { .. })
        ));
        assert!(matches!(
            orthonormalize_spacelike(&[mv(&[0., 1., 0., 0.]), mv(&[0., 2., 0., 0.])], 1e-9),
            Err(Error::DegenerateSubspace { .. })
        ));
        assert!(orthonormalize_spacelike(&[mv(&[2., 1., 0., 0.])], 1e-9).is_err());
    }

    #[test]
    fn completion_examples() {
        let xi = complete_pseudo_orthonormal(
            &mv(&[1., 1., 0., 0.]),
            &[mv(&[0., 0., 1., 0.]), mv(&[0., 0., 0., 1.])],
        )
        .unwrap();
        assert!((&xi - &mv(&[0.5, -0.5, 0., 0.])).max_abs() < 1e-15);

        let xi = complete_pseudo_orthonormal(
            &mv(&[1., 0., 1., 0.]),
            &[mv(&[0., 1., 0., 0.]), mv(&[0., 0., 0., 1.])],
        )
        .unwrap();
        assert!((&xi - &mv(&[0.5, 0., -0.5, 0.])).max_abs() < 1e-15);

        let xi2 = complete_pseudo_orthonormal(
            &mv(&[2., 0., 2., 0.]),
            &[mv(&[0., 1., 0., 0.]), mv(&[0., 0., 0., 1.])],
        )
        .unwrap();
        assert!((&xi2 - &xi.scaled(0.5)).max_abs() < 1e-15);
        assert!(xi2[0] > 0.0);
    }

    #[test]
    fn completion_rejects_zero_theta() {
        assert_eq!(
            complete_pseudo_orthonormal(&mv(&[0., 0., 0., 0.]), &[]),
            Err(Error::DegenerateNormal)
        );
    }

    #[test]
    fn eigen_examples() {
        let d = SymmetricOperator::from_fn(2, |i, j| if i == j { [2.0, 3.0][i] } else { 0.0 });
        let e = symmetric_eigen(&d);
        assert_eq!(e[0].value, 2.0);
        assert_eq!(e[0].vector, vec![1.0, 0.0]);
        assert_eq!(e[1].value, 3.0);
        assert_eq!(e[1].vector, vec![0.0, 1.0]);

        let r = SymmetricOperator::from_fn(2, |i, j| if i == j { 0.0 } else { 1.0 });
        let e = symmetric_eigen(&r);
        let h = 0.5f64.sqrt();
        assert!((e[0].value + 1.0).abs() < 1e-14 && (e[1].value - 1.0).abs() < 1e-14);
        // (1,-1)/sqrt2 up to the largest-positive sign rule: equal magnitudes,
        // the first index wins
        assert!((e[0].vector[0] - h).abs() < 1e-14 && (e[0].vector[1] + h).abs() < 1e-14);
        assert!((e[1].vector[0] - h).abs() < 1e-14 && (e[1].vector[1] - h).abs() < 1e-14);

        let id = SymmetricOperator::from_fn(3, |i, j| if i == j { 1.0 } else { 0.0 });
        let e = symmetric_eigen(&id);
        assert!(e.iter().all(|p| (p.value - 1.0).abs() < 1e-14));
        for a in 0..3 {
            for b in 0..3 {
                let d: f64 = (0..3).map(|k| e[a].vector[k] * e[b].vector[k]).sum();
                assert!((d - if a == b { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn asymmetric_operator_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(SymmetricOperator::new(m, 1e-9).is_err());
    }
}
