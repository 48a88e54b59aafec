//! Outer central differences with one level of Richardson extrapolation.
//!
//! Used for derivatives of quantities that are not available from the 2-jet,
//! such as the frame scalar `alpha` or the normal connection form.

use crate::error::{Error, Result};

/// A differenced value together with its extrapolation error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    pub error: f64,
}

/// Step for parameter value `u`: `rel * (1 + |u|)`.
pub fn step_for(u: f64, rel: f64) -> f64 {
    rel * (1.0 + u.abs())
}

fn check_stencil(point: &[f64], j: usize, h: f64, domain: &[(f64, f64)]) -> Result<()> {
    let (lo, hi) = domain[j];
    let u = point[j];
    if u - h < lo || u + h > hi {
        return Err(Error::Stencil {
            param: j,
            value: u,
            lo,
            hi,
        });
    }
    Ok(())
}

/// Partial derivative along parameter `j` of a vector-valued field, with the
/// componentwise error estimate `|D(h/2) - R|`.
pub fn partial_vec<F>(
    field: &F,
    point: &[f64],
    j: usize,
    domain: &[(f64, f64)],
    rel: f64,
) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + ?Sized,
{
    let h = step_for(point[j], rel);
    check_stencil(point, j, h, domain)?;
    let at = |d: f64| -> Result<Vec<f64>> {
        let mut p = point.to_vec();
        p[j] += d;
        field(&p)
    };
    let (fp, fm) = (at(h)?, at(-h)?);
    let (fp2, fm2) = (at(0.5 * h)?, at(-0.5 * h)?);
    if fp.len() != fm.len() || fp.len() != fp2.len() || fp.len() != fm2.len() {
        return Err(Error::Precondition(
            "field changed length across the stencil".into(),
        ));
    }
    let mut val = Vec::with_capacity(fp.len());
    let mut err = Vec::with_capacity(fp.len());
    for i in 0..fp.len() {
        let d1 = (fp[i] - fm[i]) / (2.0 * h);
        let d2 = (fp2[i] - fm2[i]) / h;
        let r = (4.0 * d2 - d1) / 3.0;
        val.push(r);
        err.push((r - d2).abs());
    }
    Ok((val, err))
}

/// Jacobian `out[j][i] = d field_i / d u_j` with error estimates.
pub fn jacobian<F>(
    field: &F,
    point: &[f64],
    domain: &[(f64, f64)],
    rel: f64,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + ?Sized,
{
    let mut vals = Vec::with_capacity(point.len());
    let mut errs = Vec::with_capacity(point.len());
    for j in 0..point.len() {
        let (v, e) = partial_vec(field, point, j, domain, rel)?;
        vals.push(v);
        errs.push(e);
    }
    Ok((vals, errs))
}

/// Gradient of a scalar field along every coordinate direction.
pub fn eval_scalar_field_jet<F>(
    field: &F,
    point: &[f64],
    domain: &[(f64, f64)],
    rel: f64,
) -> Result<Vec<Derivative>>
where
    F: Fn(&[f64]) -> Result<f64> + ?Sized,
{
    let wrapped = |p: &[f64]| field(p).map(|x| vec![x]);
    (0..point.len())
        .map(|j| {
            partial_vec(&wrapped, point, j, domain, rel).map(|(v, e)| Derivative {
                value: v[0],
                error: e[0],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field() {
        let d = eval_scalar_field_jet(&|_: &[f64]| Ok(0.5), &[0.3, 0.1], &[(-1.0, 1.0); 2], 1e-4).unwrap();
        assert!(d.iter().all(|x| x.value.abs() < 1e-10));
    }

    #[test]
    fn reciprocal() {
        let d = eval_scalar_field_jet(&|p: &[f64]| Ok(1.0 / (p[0] + 1.0)), &[1.0], &[(0.0, 2.0)], 1e-4).unwrap();
        assert!((d[0].value + 0.25).abs() < 1e-8);
        assert!(d[0].error < 1e-8);
    }

    #[test]
    fn boundary_rejected() {
        let e = eval_scalar_field_jet(&|p: &[f64]| Ok(p[0]), &[1.0], &[(0.0, 1.0)], 1e-4).unwrap_err();
        assert!(matches!(e, Error::Stencil { param: 0, .. }));
    }
}
