//! Residuals of the Gauss, Codazzi and Ricci equations and of the
//! connection identities of the adapted frame.
//!
//! Quantities that are not available from a single 2-jet (derivatives of
//! `e_1`, `xi`, the normal connection form and the normal parts of the
//! coordinate second derivatives) are differenced across a stencil. The
//! Gauss residual compares against curvature computed from the induced
//! metric alone, so it is independent of the second fundamental form.

use super::{ricci_normal_curvature, second_fundamental_form, SecondFundamentalForm};
use crate::config::Tolerances;
use crate::error::Result;
use crate::expr::{Jet2, JetSource};
use crate::frame::{build_adapted_frame, frame_core, metric_matrix, AdaptedFrame};
use crate::lorentz::MinkowskiVector;
use crate::stencil;
use nalgebra::DMatrix;
use std::collections::BTreeMap;

fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for j in 0..n {
        for k in j..n {
            v.push((j, k));
        }
    }
    v
}

fn pair_index(n: usize, j: usize, k: usize) -> usize {
    let (j, k) = if j <= k { (j, k) } else { (k, j) };
    pairs(n).iter().position(|p| *p == (j, k)).unwrap()
}

/// Layout: `[alpha, e1 (k), xi (k), omega_j (n), N_jk (k each, j <= k)]`
/// where `omega_j = -<d_j theta, xi>` and `N_jk` is the normal part of
/// `d_j d_k phi`.
fn sample(source: &dyn JetSource, p: &[f64], tol: &Tolerances) -> Result<Vec<f64>> {
    let jet = source.jet(p)?;
    let core = frame_core(&jet, tol)?;
    let n = jet.n_params();
    let k = jet.ambient_dim();
    let mut out = Vec::with_capacity(1 + 2 * k + n + k * n * (n + 1) / 2);
    out.push(core.alpha);
    out.extend_from_slice(&core.e[0].0);
    out.extend_from_slice(&core.xi.0);
    for j in 0..n {
        let mut dt = jet.tangent(j);
        dt[k - 1] = 0.0;
        out.push(-dt.dot(&core.xi));
    }
    for (j, l) in pairs(n) {
        let mut v = core.theta.scaled(core.c_theta[(j, l)]);
        v.axpy(core.c_xi[(j, l)], &core.xi);
        out.extend_from_slice(&v.0);
    }
    Ok(out)
}

fn slice_vec(v: &[f64], at: usize, k: usize) -> MinkowskiVector {
    MinkowskiVector(v[at..at + k].to_vec())
}

/// Christoffel symbols `gamma[l][j][k]` of the second kind from a jet.
fn christoffel_from_jet(jet: &Jet2, ginv: &DMatrix<f64>) -> Vec<Vec<Vec<f64>>> {
    let n = jet.n_params();
    let t = jet.tangents();
    let mut out = vec![vec![vec![0.0; n]; n]; n];
    for j in 0..n {
        for k in 0..n {
            let s = jet.second_vec(j, k);
            for l in 0..n {
                out[l][j][k] = (0..n).map(|m| ginv[(l, m)] * s.dot(&t[m])).sum();
            }
        }
    }
    out
}

/// `R(d_i, d_j, d_k, d_l) = <R(d_i,d_j) d_k, d_l>` from the induced metric
/// only, by nested central differences of `g`.
pub fn intrinsic_riemann(source: &dyn JetSource, point: &[f64], tol: &Tolerances) -> Result<Vec<f64>> {
    let n = source.n_params();
    let domain = source.param_domain();
    let step = tol.metric_step;
    let metric_at = |p: &[f64]| -> Result<Vec<f64>> {
        let jet = source.jet(p)?;
        Ok(metric_matrix(&jet).iter().copied().collect())
    };
    let gamma_at = |p: &[f64]| -> Result<Vec<f64>> {
        let g = DMatrix::from_vec(n, n, metric_at(p)?);
        let ginv = g.clone().try_inverse().ok_or(crate::error::Error::DegenerateSubspace { pivot: 0.0 })?;
        let (dg, _) = stencil::jacobian(&metric_at, p, &domain, step)?;
        // dg[m][a + n b] = d_m g_ab (column-major flattening)
        let d = |m: usize, a: usize, b: usize| dg[m][a + n * b];
        let mut out = vec![0.0; n * n * n];
        for l in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut s = 0.0;
                    for m in 0..n {
                        s += 0.5 * ginv[(l, m)] * (d(j, k, m) + d(k, j, m) - d(m, j, k));
                    }
                    out[(l * n + j) * n + k] = s;
                }
            }
        }
        Ok(out)
    };
    let gam = gamma_at(point)?;
    let (dgam, _) = stencil::jacobian(&gamma_at, point, &domain, step)?;
    let g = DMatrix::from_vec(n, n, metric_at(point)?);
    let gi = |l: usize, j: usize, k: usize| gam[(l * n + j) * n + k];
    let dgi = |i: usize, l: usize, j: usize, k: usize| dgam[i][(l * n + j) * n + k];
    let mut r_up = vec![0.0; n * n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut v = dgi(i, l, j, k) - dgi(j, l, i, k);
                    for m in 0..n {
                        v += gi(m, j, k) * gi(l, i, m) - gi(m, i, k) * gi(l, j, m);
                    }
                    r_up[((l * n + i) * n + j) * n + k] = v;
                }
            }
        }
    }
    let mut r = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    r[((i * n + j) * n + k) * n + l] =
                        (0..n).map(|p| g[(l, p)] * r_up[((p * n + i) * n + j) * n + k]).sum();
                }
            }
        }
    }
    Ok(r)
}

/// All differenced residuals, given the frame at the center point.
pub fn residuals_with_frame(
    source: &dyn JetSource,
    point: &[f64],
    frame: &AdaptedFrame,
    sff: &SecondFundamentalForm,
    tol: &Tolerances,
) -> Result<BTreeMap<String, f64>> {
    let jet = source.jet(point)?;
    let n = jet.n_params();
    let k = jet.ambient_dim();
    let domain = source.param_domain();
    let f = &frame.coeffs;
    let alpha = frame.alpha;

    let field = |p: &[f64]| sample(source, p, tol);
    let (dq, _) = stencil::jacobian(&field, point, &domain, tol.step)?;
    let (off_e1, off_xi, off_om, off_n) = (1, 1 + k, 1 + 2 * k, 1 + 2 * k + n);

    // frame-direction derivative of an ambient field stored at `at`
    let along = |i: usize, at: usize| -> MinkowskiVector {
        let mut v = MinkowskiVector::zeros(k);
        for j in 0..n {
            v.axpy(f[(i, j)], &slice_vec(&dq[j], at, k));
        }
        v
    };

    let mut out = BTreeMap::new();

    // connection of e_1: <D_{e_i} e_1, e_l> = alpha delta_il for i >= 2, 0 for i = 1
    let mut fb: f64 = 0.0;
    for i in 0..n {
        let d = along(i, off_e1);
        for l in 0..n {
            let want = if i > 0 && i == l { alpha } else { 0.0 };
            fb = fb.max((d.dot(&frame.e[l]) - want).abs());
        }
    }
    out.insert("frame_b".to_string(), fb);

    // normal connection: grad_perp theta = alpha theta along e_1, 0 along e_a;
    // grad_perp xi = -alpha xi along e_1, 0 along e_a
    let mut fd: f64 = 0.0;
    let mut wx: f64 = 0.0;
    for i in 0..n {
        let mut dtheta = MinkowskiVector::zeros(k);
        for j in 0..n {
            let mut t = jet.tangent(j);
            t[k - 1] = 0.0;
            dtheta.axpy(f[(i, j)], &t);
        }
        let w = if i == 0 { alpha } else { 0.0 };
        fd = fd.max((-dtheta.dot(&frame.xi) - w).abs());
        let dxi = along(i, off_xi);
        fd = fd.max((-dxi.dot(&frame.theta) + w).abs());
        // Weingarten along xi: <A_xi e_i, e_l> = -<D_{e_i} xi, e_l> = <h(e_i,e_l), xi>
        for l in 0..n {
            wx = wx.max((-dxi.dot(&frame.e[l]) + sff.h_theta[(i, l)]).abs());
        }
    }
    out.insert("frame_d".to_string(), fd);
    out.insert("weingarten_xi".to_string(), wx);

    // second fundamental form structure
    let mut fe: f64 = (sff.h_theta[(0, 0)] - (frame.e1_alpha + alpha * alpha)).abs();
    for a in 1..n {
        fe = fe.max((sff.h_theta[(0, a)] - frame.ea_alpha[a - 1]).abs());
        fe = fe.max((sff.h_theta[(a, a)] + frame.beta[a - 1]).abs());
        for b in 1..n {
            if a != b {
                fe = fe.max(sff.h_theta[(a, b)].abs());
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let want = if i == j && i > 0 { 1.0 } else { 0.0 };
            fe = fe.max((sff.h_xi[(i, j)] - want).abs());
        }
    }
    out.insert("frame_e".to_string(), fe);

    // Ricci: R_perp(e_i,e_j) theta = d omega(e_i,e_j) theta
    let a_theta = -&sff.h_xi;
    let mut domega = DMatrix::zeros(n, n);
    for j in 0..n {
        for l in 0..n {
            domega[(j, l)] = dq[j][off_om + l] - dq[l][off_om + j];
        }
    }
    let dom_frame = f * domega * f.transpose();
    let mut ric: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (ct, cx) = ricci_normal_curvature(sff, &a_theta, i, j);
            ric = ric.max((dom_frame[(i, j)] - ct).abs()).max(cx.abs());
        }
    }
    out.insert("ricci".to_string(), ric);

    // Codazzi in coordinates, then transformed to the frame
    let ginv = &frame.metric_inv;
    let gam = christoffel_from_jet(&jet, ginv);
    let nvec = |j: usize, l: usize| -> MinkowskiVector {
        let c = &frame.core;
        let mut v = c.theta.scaled(c.c_theta[(j, l)]);
        v.axpy(c.c_xi[(j, l)], &c.xi);
        v
    };
    let d_n = |i: usize, j: usize, l: usize| slice_vec(&dq[i], off_n + k * pair_index(n, j, l), k);
    let perp = |v: &MinkowskiVector| -> (f64, f64) { (-v.dot(&frame.xi), -v.dot(&frame.theta)) };
    let mut cod = vec![(0.0, 0.0); n * n * n];
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let (mut ct, mut cx) = perp(&(&d_n(i, j, l) - &d_n(j, i, l)));
                for m in 0..n {
                    let a = perp(&nvec(j, m));
                    let b = perp(&nvec(i, m));
                    ct += -gam[m][i][l] * a.0 + gam[m][j][l] * b.0;
                    cx += -gam[m][i][l] * a.1 + gam[m][j][l] * b.1;
                }
                cod[(i * n + j) * n + l] = (ct, cx);
            }
        }
    }
    let mut cz: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let (mut ct, mut cx) = (0.0, 0.0);
                for i in 0..n {
                    for j in 0..n {
                        for l in 0..n {
                            let w = f[(a, i)] * f[(b, j)] * f[(c, l)];
                            let v = cod[(i * n + j) * n + l];
                            ct += w * v.0;
                            cx += w * v.1;
                        }
                    }
                }
                cz = cz.max(ct.abs()).max(cx.abs());
            }
        }
    }
    out.insert("codazzi".to_string(), cz);

    out.insert("gauss".to_string(), gauss_residual(source, point, frame, sff, tol)?);
    Ok(out)
}

/// Largest frame component of intrinsic minus extrinsic curvature tensors.
pub fn gauss_residual(
    source: &dyn JetSource,
    point: &[f64],
    frame: &AdaptedFrame,
    sff: &SecondFundamentalForm,
    tol: &Tolerances,
) -> Result<f64> {
    let n = frame.n();
    let r = intrinsic_riemann(source, point, tol)?;
    let f = &frame.coeffs;
    let idx = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * n + k) * n + l;
    // transform one index at a time
    let mut cur = r;
    for slot in 0..4 {
        let mut next = vec![0.0; cur.len()];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut s = 0.0;
                        for m in 0..n {
                            let (src, w) = match slot {
                                0 => (idx(m, j, k, l), f[(i, m)]),
                                1 => (idx(i, m, k, l), f[(j, m)]),
                                2 => (idx(i, j, m, l), f[(k, m)]),
                                _ => (idx(i, j, k, m), f[(l, m)]),
                            };
                            s += w * cur[src];
                        }
                        next[idx(i, j, k, l)] = s;
                    }
                }
            }
        }
        cur = next;
    }
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let ext = sff.pair(i, l, j, k) - sff.pair(i, k, j, l);
                    worst = worst.max((cur[idx(i, j, k, l)] - ext).abs());
                }
            }
        }
    }
    Ok(worst)
}

/// Intrinsic Gaussian curvature of a surface from its induced metric alone.
pub fn intrinsic_gauss_curvature(source: &dyn JetSource, point: &[f64], tol: &Tolerances) -> Result<f64> {
    let n = source.n_params();
    if n != 2 {
        return Err(crate::error::Error::Dimension { expected: 2, got: n });
    }
    let r = intrinsic_riemann(source, point, tol)?;
    let jet = source.jet(point)?;
    let g = metric_matrix(&jet);
    // K = R(d1, d2, d2, d1) / det g; flat index ((0*2 + 1)*2 + 1)*2 + 0
    Ok(r[6] / g.determinant())
}

/// Residual map for a parameter point, building the frame first.
pub fn structure_residuals(source: &dyn JetSource, point: &[f64], tol: &Tolerances) -> Result<BTreeMap<String, f64>> {
    let jet = source.jet(point)?;
    let frame = build_adapted_frame(source, point, tol)?;
    let sff = second_fundamental_form(&jet, &frame);
    let mut out = super::algebraic_residuals(&jet, &frame, &sff);
    out.extend(residuals_with_frame(source, point, &frame, &sff, tol)?);
    Ok(out)
}
