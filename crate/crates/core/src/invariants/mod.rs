//! Extrinsic invariants in the adapted frame.

pub mod classify;
pub mod cone;
pub mod structure;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::expr::{Jet2, JetSource};
use crate::frame::{build_adapted_frame, coordinate_sff, FrameCore};
use crate::lorentz::{causal_character, CausalCharacter, MinkowskiVector, SymmetricOperator};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub use classify::{classify, Flags};
pub use structure::structure_residuals;

/// `h(e_i, e_j) = h_theta[i,j] theta + h_xi[i,j] xi` in the adapted frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondFundamentalForm {
    pub h_theta: DMatrix<f64>,
    pub h_xi: DMatrix<f64>,
    pub theta: MinkowskiVector,
    pub xi: MinkowskiVector,
}

impl SecondFundamentalForm {
    pub fn n(&self) -> usize {
        self.h_theta.nrows()
    }

    pub fn h(&self, i: usize, j: usize) -> MinkowskiVector {
        let mut v = self.theta.scaled(self.h_theta[(i, j)]);
        v.axpy(self.h_xi[(i, j)], &self.xi);
        v
    }

    /// `<h(e_i,e_j), h(e_k,e_l)>`, using `<theta,theta> = <xi,xi> = 0` and
    /// `<theta,xi> = -1`.
    pub fn pair(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        -(self.h_theta[(i, j)] * self.h_xi[(k, l)] + self.h_xi[(i, j)] * self.h_theta[(k, l)])
    }

    /// `<h(X,X), h(X,X)>` for tangent `X = sum x_i e_i`.
    pub fn quartic(&self, x: &[f64]) -> f64 {
        let n = self.n();
        let (mut a, mut b) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                a += x[i] * x[j] * self.h_theta[(i, j)];
                b += x[i] * x[j] * self.h_xi[(i, j)];
            }
        }
        -2.0 * a * b
    }
}

pub fn second_fundamental_form(jet: &Jet2, frame: &FrameCore) -> SecondFundamentalForm {
    let (ct, cx) = coordinate_sff(jet, &frame.theta, &frame.xi);
    let f = &frame.coeffs;
    SecondFundamentalForm {
        h_theta: f * ct * f.transpose(),
        h_xi: f * cx * f.transpose(),
        theta: frame.theta.clone(),
        xi: frame.xi.clone(),
    }
}

/// Matrix of `A_zeta` in the adapted frame: `<h(e_i,e_j), zeta>`.
pub fn shape_operator(
    sff: &SecondFundamentalForm,
    frame: &FrameCore,
    zeta: &MinkowskiVector,
    tol: &Tolerances,
) -> Result<SymmetricOperator> {
    let worst = frame.e.iter().map(|e| e.dot(zeta).abs()).fold(0.0, f64::max);
    if worst > tol.alg * (1.0 + zeta.euclid_norm()) {
        return Err(Error::NotNormal(worst));
    }
    let (a, b) = (sff.theta.dot(zeta), sff.xi.dot(zeta));
    let m = &sff.h_theta * a + &sff.h_xi * b;
    SymmetricOperator::new(m, tol.symmetry)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanCurvature {
    pub h: MinkowskiVector,
    /// Coefficients of `H = h_theta_coef theta + h_xi_coef xi`.
    pub theta_coef: f64,
    pub xi_coef: f64,
    pub a_h: SymmetricOperator,
    pub causal: CausalCharacter,
    /// `<H, H>`.
    pub norm2: f64,
}

pub fn mean_curvature(sff: &SecondFundamentalForm, frame: &FrameCore, tol: &Tolerances) -> Result<MeanCurvature> {
    let n = sff.n() as f64;
    let theta_coef = sff.h_theta.trace() / n;
    let xi_coef = sff.h_xi.trace() / n;
    let mut h = sff.theta.scaled(theta_coef);
    h.axpy(xi_coef, &sff.xi);
    let a_h = shape_operator(sff, frame, &h, tol)?;
    Ok(MeanCurvature {
        causal: causal_character(&h, tol.causal),
        norm2: -2.0 * theta_coef * xi_coef,
        h,
        theta_coef,
        xi_coef,
        a_h,
    })
}

/// `K = <h(e1,e1),h(e2,e2)> - <h(e1,e2),h(e1,e2)>`; surfaces only.
pub fn gauss_curvature(sff: &SecondFundamentalForm) -> Result<f64> {
    if sff.n() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: sff.n(),
        });
    }
    Ok(sff.pair(0, 0, 1, 1) - sff.pair(0, 1, 0, 1))
}

/// `R_perp(e_i, e_j) zeta` from the Ricci equation, as `(theta, xi)` coefficients,
/// for a normal `zeta` with shape operator matrix `a`.
pub fn ricci_normal_curvature(sff: &SecondFundamentalForm, a: &DMatrix<f64>, i: usize, j: usize) -> (f64, f64) {
    let n = sff.n();
    let (mut ct, mut cx) = (0.0, 0.0);
    for k in 0..n {
        // h(e_i, A e_j) - h(A e_i, e_j)
        ct += a[(k, j)] * sff.h_theta[(i, k)] - a[(k, i)] * sff.h_theta[(k, j)];
        cx += a[(k, j)] * sff.h_xi[(i, k)] - a[(k, i)] * sff.h_xi[(k, j)];
    }
    (ct, cx)
}

/// Normal curvature of a surface with respect to the orthonormal normal pair
/// `zeta_1 = (theta + xi)/sqrt2`, `zeta_2 = (xi - theta)/sqrt2`.
pub fn normal_curvature(sff: &SecondFundamentalForm, frame: &FrameCore, tol: &Tolerances) -> Result<f64> {
    if sff.n() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: sff.n(),
        });
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut z1 = frame.theta.scaled(r);
    z1.axpy(r, &frame.xi);
    let mut z2 = frame.xi.scaled(r);
    z2.axpy(-r, &frame.theta);
    let a1 = shape_operator(sff, frame, &z1, tol)?;
    let (ct, cx) = ricci_normal_curvature(sff, a1.matrix(), 0, 1);
    let mut v = frame.theta.scaled(ct);
    v.axpy(cx, &frame.xi);
    let denom = z1.norm2() * z2.norm2() - z1.dot(&z2).powi(2);
    Ok(v.dot(&z2) / denom)
}

/// Largest deviation of the frame from the pseudo-orthonormal pairing table.
pub fn pairing_residual(frame: &FrameCore) -> f64 {
    let mut worst: f64 = 0.0;
    let n = frame.n();
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((frame.e[i].dot(&frame.e[j]) - want).abs());
        }
        worst = worst.max(frame.e[i].dot(&frame.theta).abs());
        worst = worst.max(frame.e[i].dot(&frame.xi).abs());
    }
    worst = worst.max(frame.theta.norm2().abs());
    worst = worst.max(frame.xi.norm2().abs());
    worst.max((frame.theta.dot(&frame.xi) + 1.0).abs())
}

/// Summary of every invariant at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub point: Vec<f64>,
    pub alpha: f64,
    pub beta: Vec<f64>,
    pub e1_alpha: f64,
    pub ea_alpha: Vec<f64>,
    pub theta: MinkowskiVector,
    pub xi: MinkowskiVector,
    pub e: Vec<MinkowskiVector>,
    pub h_theta: Vec<Vec<f64>>,
    pub h_xi: Vec<Vec<f64>>,
    pub a_theta: Vec<Vec<f64>>,
    pub a_xi: Vec<Vec<f64>>,
    pub a_h: Vec<Vec<f64>>,
    pub mean_curvature: MinkowskiVector,
    pub mean_curvature_theta: f64,
    pub mean_curvature_causal: CausalCharacter,
    pub mean_curvature_norm2: f64,
    pub gauss_curvature: Option<f64>,
    pub normal_curvature: Option<f64>,
    pub residuals: BTreeMap<String, f64>,
    pub flags: Flags,
}

/// Options for [`analyze_point`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    /// Also evaluate the differenced structure-equation residuals.
    pub structure: bool,
    /// Offset into the low-discrepancy direction sequence.
    pub seed: u64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            structure: true,
            seed: 0,
        }
    }
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Pointwise residuals that need no outer differencing.
pub fn algebraic_residuals(jet: &Jet2, frame: &FrameCore, sff: &SecondFundamentalForm) -> BTreeMap<String, f64> {
    let n = frame.n();
    let mut r = BTreeMap::new();
    r.insert("pairing".to_string(), pairing_residual(frame));
    r.insert("decomposition".to_string(), frame.decomposition_residual);
    // A_theta = -h_xi must be diag(0, -1, ..., -1)
    let mut fc: f64 = 0.0;
    let mut off: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let want = if i == j && i > 0 { -1.0 } else { 0.0 };
            fc = fc.max((-sff.h_xi[(i, j)] - want).abs());
            if i > 0 && j > 0 && i != j {
                off = off.max(sff.h(i, j).euclid_norm());
            }
        }
    }
    r.insert("frame_c".to_string(), fc);
    r.insert("h_offdiag".to_string(), off);
    r.insert("h11_null".to_string(), sff.pair(0, 0, 0, 0).abs());
    // Weingarten: <A_theta e_i, e_j> = -<D_{e_i} theta, e_j>, with D theta from the jet
    let k = jet.ambient_dim();
    let dtheta: Vec<MinkowskiVector> = (0..n)
        .map(|j| {
            let mut t = jet.tangent(j);
            t[k - 1] = 0.0;
            t
        })
        .collect();
    let mut w: f64 = 0.0;
    for i in 0..n {
        let mut d = MinkowskiVector::zeros(k);
        for (j, dt) in dtheta.iter().enumerate() {
            d.axpy(frame.coeffs[(i, j)], dt);
        }
        for j in 0..n {
            let lhs = -d.dot(&frame.e[j]);
            let rhs = sff.h(i, j).dot(&frame.theta);
            w = w.max((lhs - rhs).abs());
        }
    }
    r.insert("weingarten_theta".to_string(), w);
    r
}

/// Computes frame, invariants, residuals and classification flags.
pub fn analyze_point(
    source: &dyn JetSource,
    point: &[f64],
    tol: &Tolerances,
    opts: &AnalysisOptions,
) -> Result<InvariantReport> {
    let jet = source.jet(point)?;
    let frame = build_adapted_frame(source, point, tol)?;
    let sff = second_fundamental_form(&jet, &frame);
    let a_theta = shape_operator(&sff, &frame, &frame.theta, tol)?;
    let a_xi = shape_operator(&sff, &frame, &frame.xi, tol)?;
    let mc = mean_curvature(&sff, &frame, tol)?;
    let n = frame.n();
    let (k, kp) = if n == 2 {
        (
            Some(gauss_curvature(&sff)?),
            Some(normal_curvature(&sff, &frame, tol)?),
        )
    } else {
        (None, None)
    };
    let mut residuals = algebraic_residuals(&jet, &frame, &sff);
    if opts.structure {
        residuals.extend(structure::residuals_with_frame(source, point, &frame, &sff, tol)?);
    }
    let flags = classify(&frame, &sff, &a_theta, &a_xi, &mc, k, kp, tol, opts.seed)?;
    Ok(InvariantReport {
        point: point.to_vec(),
        alpha: frame.alpha,
        beta: frame.beta.clone(),
        e1_alpha: frame.e1_alpha,
        ea_alpha: frame.ea_alpha.clone(),
        theta: frame.theta.clone(),
        xi: frame.xi.clone(),
        e: frame.e.clone(),
        h_theta: rows(&sff.h_theta),
        h_xi: rows(&sff.h_xi),
        a_theta: a_theta.to_rows(),
        a_xi: a_xi.to_rows(),
        a_h: mc.a_h.to_rows(),
        mean_curvature: mc.h.clone(),
        mean_curvature_theta: mc.theta_coef,
        mean_curvature_causal: mc.causal,
        mean_curvature_norm2: mc.norm2,
        gauss_curvature: k,
        normal_curvature: kp,
        residuals,
        flags,
    })
}
