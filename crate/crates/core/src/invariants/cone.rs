//! Submanifolds of the light cone `LC^n` in `E_1^{n+1}` with the normal
//! frame `{gamma, eta}`.

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::expr::Jet2;
use crate::lorentz::{complete_pseudo_orthonormal, orthonormalize_spacelike, symmetric_eigen, MinkowskiVector, SymmetricOperator};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub point: Vec<f64>,
    /// `<gamma, gamma>`.
    pub cone_residual: f64,
    pub eta: MinkowskiVector,
    /// Shape operators along `gamma` and `eta` in an orthonormal tangent frame.
    pub a_gamma: Vec<Vec<f64>>,
    pub a_eta: Vec<Vec<f64>>,
    pub a_eta_eigenvalues: Vec<f64>,
    /// `|| A_gamma + Id ||`.
    pub a_gamma_defect: f64,
    pub a_eta_umbilicity: f64,
}

/// Shape operators of a cone-mode jet (`gamma = phi`).
pub fn cone_shape_operators(jet: &Jet2, tol: &Tolerances) -> Result<ConeReport> {
    let n = jet.n_params();
    if jet.ambient_dim() != n + 2 {
        return Err(Error::Dimension {
            expected: n + 2,
            got: jet.ambient_dim(),
        });
    }
    let gamma = jet.value.clone();
    let cone_residual = gamma.norm2();
    if !(cone_residual.abs() <= tol.cone * (1.0 + gamma.euclid_norm2())) || gamma[0] <= 0.0 {
        return Err(Error::NotAdmissible(format!(
            "not on the future light cone (<gamma,gamma> = {cone_residual:.3e})"
        )));
    }
    let tangents = jet.tangents();
    let basis = orthonormalize_spacelike(&tangents, tol.gram)?;
    let eta = complete_pseudo_orthonormal(&gamma, &basis)?;
    let g = crate::frame::metric_matrix(jet);
    let ginv = g
        .clone()
        .cholesky()
        .ok_or(Error::DegenerateSubspace { pivot: 0.0 })?
        .inverse();
    let mut f = DMatrix::zeros(n, n);
    for (i, e) in basis.iter().enumerate() {
        let p = DVector::from_iterator(n, tangents.iter().map(|t| e.dot(t)));
        let c = &ginv * p;
        for j in 0..n {
            f[(i, j)] = c[j];
        }
    }
    let coord = |z: &MinkowskiVector| DMatrix::from_fn(n, n, |j, k| jet.second_vec(j, k).dot(z));
    let ag = &f * coord(&gamma) * f.transpose();
    let ae = &f * coord(&eta) * f.transpose();
    let ag = SymmetricOperator::new(ag, tol.symmetry)?;
    let ae = SymmetricOperator::new(ae, tol.symmetry)?;
    let id = DMatrix::<f64>::identity(n, n);
    Ok(ConeReport {
        point: vec![],
        cone_residual,
        a_gamma_defect: (ag.matrix() + id).norm(),
        a_eta_umbilicity: ae.umbilicity_defect(),
        a_eta_eigenvalues: symmetric_eigen(&ae).iter().map(|p| p.value).collect(),
        a_gamma: ag.to_rows(),
        a_eta: ae.to_rows(),
        eta,
    })
}
