//! Adapted frame `{e_1, ..., e_n; theta, xi}` of a submanifold of `LC^n x R`.
//!
//! `theta` is the position vector with the axial coordinate dropped, `e_1`
//! the tangential part of the axis `E = d/dx_{n+2}`, and `alpha` the scalar
//! with `E = e_1 - alpha theta`. The remaining tangent vectors diagonalize the
//! `xi` shape operator on the complement of `e_1`.

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::expr::{Jet2, JetSource};
use crate::lorentz::{
    complete_pseudo_orthonormal, orthonormalize_spacelike, symmetric_eigen, MinkowskiVector,
    SymmetricOperator,
};
use crate::stencil;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::ops::Deref;

/// Diagnostics for membership of a jet's base point in `LC^n x R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CylinderCheck {
    /// `-phi_1^2 + phi_2^2 + ... + phi_{n+1}^2`.
    pub cone_residual: f64,
    pub future_flag: bool,
    pub spacelike_flag: bool,
    /// Smallest eigenvalue of the induced metric.
    pub min_metric_eigenvalue: f64,
}

impl CylinderCheck {
    pub fn admissible(&self, tol: &Tolerances, jet: &Jet2) -> bool {
        self.failure(tol, jet).is_none()
    }

    /// Reason the point is inadmissible, if any.
    pub fn failure(&self, tol: &Tolerances, jet: &Jet2) -> Option<String> {
        let k = jet.ambient_dim();
        let scale: f64 = 1.0 + jet.value.0[..k - 1].iter().map(|x| x * x).sum::<f64>();
        if !(self.cone_residual.abs() <= tol.cone * scale) {
            return Some(format!("off the light cone (residual {:.3e})", self.cone_residual));
        }
        if !self.future_flag {
            return Some("time coordinate is not positive".into());
        }
        if !self.spacelike_flag {
            return Some(format!(
                "induced metric is not positive definite (min eigenvalue {:.3e})",
                self.min_metric_eigenvalue
            ));
        }
        None
    }
}

fn check_dims(jet: &Jet2) -> Result<()> {
    let n = jet.n_params();
    if jet.ambient_dim() != n + 2 {
        return Err(Error::Dimension {
            expected: n + 2,
            got: jet.ambient_dim(),
        });
    }
    Ok(())
}

pub(crate) fn metric_matrix(jet: &Jet2) -> DMatrix<f64> {
    let g = jet.metric();
    let n = g.len();
    DMatrix::from_fn(n, n, |i, j| g[i][j])
}

pub fn check_on_cylinder(jet: &Jet2, tol: &Tolerances) -> Result<CylinderCheck> {
    check_dims(jet)?;
    let k = jet.ambient_dim();
    let x = &jet.value.0;
    let cone_residual = -x[0] * x[0] + x[1..k - 1].iter().map(|v| v * v).sum::<f64>();
    let g = metric_matrix(jet);
    let min_eig = g.clone().symmetric_eigen().eigenvalues.min();
    let spacelike_flag = min_eig > tol.gram * g.amax().max(f64::MIN_POSITIVE);
    Ok(CylinderCheck {
        cone_residual,
        future_flag: x[0] > 0.0,
        spacelike_flag,
        min_metric_eigenvalue: min_eig,
    })
}

/// `theta = (phi_1, ..., phi_{n+1}, 0)`.
pub fn build_theta(jet: &Jet2) -> MinkowskiVector {
    let mut t = jet.value.clone();
    let k = t.len();
    t[k - 1] = 0.0;
    t
}

/// Tangential part `e_1` of the axis, `alpha`, and the decomposition residual
/// `|E_normal + alpha theta|`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSplit {
    pub e1: MinkowskiVector,
    pub alpha: f64,
    pub residual: f64,
    /// `|<e_1, e_1> - 1|`.
    pub norm_defect: f64,
}

fn invert_metric(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    match g.clone().cholesky() {
        Some(c) => Ok(c.inverse()),
        None => Err(Error::DegenerateSubspace {
            pivot: g.clone().symmetric_eigen().eigenvalues.min(),
        }),
    }
}

fn split_with(jet: &Jet2, theta: &MinkowskiVector, ginv: &DMatrix<f64>, tol: &Tolerances) -> Result<AxisSplit> {
    let n = jet.n_params();
    let k = jet.ambient_dim();
    let tangents = jet.tangents();
    // <E, phi_j> is the axial coordinate of phi_j
    let b = DVector::from_iterator(n, tangents.iter().map(|t| t[k - 1]));
    let c = ginv * &b;
    let mut e1 = MinkowskiVector::zeros(k);
    for (j, t) in tangents.iter().enumerate() {
        e1.axpy(c[j], t);
    }
    let norm_defect = (e1.norm2() - 1.0).abs();
    if norm_defect > 1e3 * tol.alg {
        return Err(Error::NotAdmissible(format!(
            "tangential part of the axis has squared norm {} instead of 1",
            e1.norm2()
        )));
    }
    let axis = MinkowskiVector::basis(k, k - 1);
    let normal = &axis - &e1;
    let big = theta.max_abs();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..k {
        if theta[i].abs() > 0.1 * big {
            num += normal[i] * theta[i];
            den += theta[i] * theta[i];
        }
    }
    if den == 0.0 {
        return Err(Error::NotAdmissible("theta vanishes".into()));
    }
    let alpha = -num / den;
    let mut r = normal.clone();
    r.axpy(alpha, theta);
    Ok(AxisSplit {
        e1,
        alpha,
        residual: r.euclid_norm(),
        norm_defect,
    })
}

pub fn build_e1_alpha(jet: &Jet2, theta: &MinkowskiVector, tol: &Tolerances) -> Result<AxisSplit> {
    check_dims(jet)?;
    let ginv = invert_metric(&metric_matrix(jet))?;
    split_with(jet, theta, &ginv, tol)
}

/// Everything in the adapted frame that is pointwise algebraic in the 2-jet.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameCore {
    pub e: Vec<MinkowskiVector>,
    pub theta: MinkowskiVector,
    pub xi: MinkowskiVector,
    pub alpha: f64,
    /// `beta_2, ..., beta_n`.
    pub beta: Vec<f64>,
    /// `e_i = sum_j coeffs[i][j] d phi / d u_j`.
    pub coeffs: DMatrix<f64>,
    pub metric: DMatrix<f64>,
    pub metric_inv: DMatrix<f64>,
    /// Coordinate second fundamental form: `h(d_j, d_k) = c_theta[j,k] theta + c_xi[j,k] xi`.
    pub c_theta: DMatrix<f64>,
    pub c_xi: DMatrix<f64>,
    pub decomposition_residual: f64,
    pub e1_norm_defect: f64,
}

impl FrameCore {
    pub fn n(&self) -> usize {
        self.e.len()
    }

    /// Frame matrix of the `theta` coefficient of `h`: `h_theta[i,j]`.
    pub fn h_theta(&self) -> DMatrix<f64> {
        &self.coeffs * &self.c_theta * self.coeffs.transpose()
    }

    pub fn h_xi(&self) -> DMatrix<f64> {
        &self.coeffs * &self.c_xi * self.coeffs.transpose()
    }

    /// `h(e_i, e_j)` as an ambient vector.
    pub fn h_vec(&self, i: usize, j: usize) -> MinkowskiVector {
        let (ht, hx) = (self.h_theta(), self.h_xi());
        let mut v = self.theta.scaled(ht[(i, j)]);
        v.axpy(hx[(i, j)], &self.xi);
        v
    }
}

/// Coordinate coefficients of the second fundamental form given `theta`, `xi`.
pub(crate) fn coordinate_sff(
    jet: &Jet2,
    theta: &MinkowskiVector,
    xi: &MinkowskiVector,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = jet.n_params();
    let mut ct = DMatrix::zeros(n, n);
    let mut cx = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in j..n {
            let v = jet.second_vec(j, k);
            // normal part of V expands as -<V,xi> theta - <V,theta> xi
            let (a, b) = (-v.dot(xi), -v.dot(theta));
            ct[(j, k)] = a;
            ct[(k, j)] = a;
            cx[(j, k)] = b;
            cx[(k, j)] = b;
        }
    }
    (ct, cx)
}

fn coefficients(e: &[MinkowskiVector], tangents: &[MinkowskiVector], ginv: &DMatrix<f64>) -> DMatrix<f64> {
    let n = tangents.len();
    let mut f = DMatrix::zeros(n, n);
    for (i, ei) in e.iter().enumerate() {
        let p = DVector::from_iterator(n, tangents.iter().map(|t| ei.dot(t)));
        let c = ginv * p;
        for j in 0..n {
            f[(i, j)] = c[j];
        }
    }
    f
}

/// Builds the algebraic part of the adapted frame from a 2-jet.
pub fn frame_core(jet: &Jet2, tol: &Tolerances) -> Result<FrameCore> {
    let check = check_on_cylinder(jet, tol)?;
    if let Some(why) = check.failure(tol, jet) {
        return Err(Error::NotAdmissible(why));
    }
    let n = jet.n_params();
    let theta = build_theta(jet);
    let g = metric_matrix(jet);
    let ginv = invert_metric(&g)?;
    let split = split_with(jet, &theta, &ginv, tol)?;
    let tangents = jet.tangents();

    // pivoted choice of the coordinate tangents that complete e_1
    let mut chosen: Vec<MinkowskiVector> = vec![split.e1.clone()];
    let mut basis = orthonormalize_spacelike(&chosen, tol.gram)?;
    let mut used = vec![false; n];
    for _ in 1..n {
        let mut best: Option<(usize, f64)> = None;
        for (j, t) in tangents.iter().enumerate() {
            if used[j] {
                continue;
            }
            let mut w = t.clone();
            for b in &basis {
                let c = w.dot(b);
                w.axpy(-c, b);
            }
            let score = w.norm2() / t.euclid_norm2().max(f64::MIN_POSITIVE);
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((j, score));
            }
        }
        let (j, _) = best.expect("n tangents available");
        used[j] = true;
        chosen.push(tangents[j].clone());
        basis = orthonormalize_spacelike(&chosen, tol.gram)?;
    }

    let xi = complete_pseudo_orthonormal(&theta, &basis)?;
    let (c_theta, c_xi) = coordinate_sff(jet, &theta, &xi);
    let mut coeffs = coefficients(&basis, &tangents, &ginv);

    let mut beta = Vec::with_capacity(n - 1);
    if n == 2 {
        if coeffs.determinant() < 0.0 {
            basis[1] = -&basis[1];
            for j in 0..n {
                coeffs[(1, j)] = -coeffs[(1, j)];
            }
        }
        let ht = &coeffs * &c_theta * coeffs.transpose();
        beta.push(-ht[(1, 1)]);
    } else if n > 2 {
        let ht = &coeffs * &c_theta * coeffs.transpose();
        let m = n - 1;
        // L = A_xi on span{e_2..e_n}; A_xi = -h_theta
        let l = SymmetricOperator::from_fn(m, |a, b| -ht[(a + 1, b + 1)]);
        let pairs = symmetric_eigen(&l);
        let old: Vec<MinkowskiVector> = basis[1..].to_vec();
        for (a, p) in pairs.iter().enumerate() {
            let mut v = MinkowskiVector::zeros(jet.ambient_dim());
            for (b, w) in old.iter().enumerate() {
                v.axpy(p.vector[b], w);
            }
            basis[a + 1] = v;
            beta.push(p.value);
        }
        coeffs = coefficients(&basis, &tangents, &ginv);
    }

    Ok(FrameCore {
        e: basis,
        theta,
        xi,
        alpha: split.alpha,
        beta,
        coeffs,
        metric: g,
        metric_inv: ginv,
        c_theta,
        c_xi,
        decomposition_residual: split.residual,
        e1_norm_defect: split.norm_defect,
    })
}

/// The full adapted frame, including derivatives of `alpha` along the frame.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedFrame {
    pub core: FrameCore,
    pub e1_alpha: f64,
    /// `e_a(alpha)` for `a = 2..n`.
    pub ea_alpha: Vec<f64>,
    /// Coordinate gradient of `alpha` and its extrapolation error estimate.
    pub alpha_grad: Vec<f64>,
    pub alpha_grad_error: Vec<f64>,
}

impl Deref for AdaptedFrame {
    type Target = FrameCore;
    fn deref(&self) -> &FrameCore {
        &self.core
    }
}

/// `alpha` alone at a parameter point.
pub fn alpha_at(source: &dyn JetSource, point: &[f64], tol: &Tolerances) -> Result<f64> {
    let jet = source.jet(point)?;
    let theta = build_theta(&jet);
    Ok(build_e1_alpha(&jet, &theta, tol)?.alpha)
}

pub fn build_adapted_frame(source: &dyn JetSource, point: &[f64], tol: &Tolerances) -> Result<AdaptedFrame> {
    let jet = source.jet(point)?;
    let core = frame_core(&jet, tol)?;
    let domain = source.param_domain();
    let field = |p: &[f64]| alpha_at(source, p, tol);
    let grad = stencil::eval_scalar_field_jet(&field, point, &domain, tol.step)?;
    let g: Vec<f64> = grad.iter().map(|d| d.value).collect();
    let n = core.n();
    let along: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| core.coeffs[(i, j)] * g[j]).sum())
        .collect();
    Ok(AdaptedFrame {
        e1_alpha: along[0],
        ea_alpha: along[1..].to_vec(),
        alpha_grad: g,
        alpha_grad_error: grad.iter().map(|d| d.error).collect(),
        core,
    })
}
