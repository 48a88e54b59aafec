//! Arc-length curves on the light cone `LC^2` in `E_1^3` with the null frame
//! `{gamma, gamma', eta}` and the equations `gamma'' = kappa gamma + eta`,
//! `eta' = kappa gamma'`.

use crate::error::{Error, Result};
use crate::expr::Table;
use crate::lorentz::{complete_pseudo_orthonormal, MinkowskiVector};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSample {
    pub t: f64,
    pub gamma: MinkowskiVector,
    pub gamma_prime: MinkowskiVector,
    pub eta: MinkowskiVector,
    pub kappa: f64,
}

impl CurveSample {
    /// The five constraint residuals
    /// `<g,g>, <g',g'>-1, <g,eta>+1, <eta,eta>, <g',eta>`.
    pub fn constraints(&self) -> [f64; 5] {
        constraints(&self.gamma, &self.gamma_prime, &self.eta)
    }

    pub fn gamma_second(&self) -> MinkowskiVector {
        &(&self.gamma * self.kappa) + &self.eta
    }
}

fn constraints(g: &MinkowskiVector, gp: &MinkowskiVector, eta: &MinkowskiVector) -> [f64; 5] {
    [
        g.norm2(),
        gp.norm2() - 1.0,
        g.dot(eta) + 1.0,
        eta.norm2(),
        gp.dot(eta),
    ]
}

const CONSTRAINT_NAMES: [&str; 5] = [
    "<gamma,gamma> = 0",
    "<gamma',gamma'> = 1",
    "<gamma,eta> = -1",
    "<eta,eta> = 0",
    "<gamma',eta> = 0",
];

/// Integrated curve, sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveOnCone {
    pub samples: Vec<CurveSample>,
    /// Number of projections applied during integration.
    pub projections: usize,
}

impl CurveOnCone {
    pub fn max_constraint_drift(&self) -> f64 {
        self.samples
            .iter()
            .flat_map(|s| s.constraints())
            .fold(0.0, |m, r| m.max(r.abs()))
    }

    /// `kappa = <gamma', eta'>` with `eta'` from a five-point stencil over
    /// the samples, at interior sample indices `2..len-2`.
    pub fn recomputed_kappa(&self) -> Vec<(f64, f64)> {
        let s = &self.samples;
        if s.len() < 5 {
            return vec![];
        }
        let h = s[1].t - s[0].t;
        (2..s.len() - 2)
            .map(|i| {
                let d = (&(&s[i - 2].eta - &s[i + 2].eta) + &(&(&s[i + 1].eta - &s[i - 1].eta) * 8.0))
                    .scaled(1.0 / (12.0 * h));
                (s[i].t, s[i].gamma_prime.dot(&d))
            })
            .collect()
    }

    /// Quintic Hermite tables of the three components of `gamma`.
    pub fn component_tables(&self) -> Result<[Table; 3]> {
        let table = |c: usize| {
            let rows = self
                .samples
                .iter()
                .map(|s| [s.t, s.gamma[c], s.gamma_prime[c], s.gamma_second()[c]])
                .collect();
            Table::new(rows).map_err(Error::Precondition)
        };
        Ok([table(0)?, table(1)?, table(2)?])
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.samples[0].t, self.samples[self.samples.len() - 1].t)
    }
}

/// Initial data `(v1, v3, v2)` of the curve with constant `kappa = -1/2`
/// through `(1,0,1)/sqrt2`.
pub fn standard_initial_data() -> (MinkowskiVector, MinkowskiVector, MinkowskiVector) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    (
        MinkowskiVector::new(vec![r, 0.0, r]),
        MinkowskiVector::new(vec![0.0, 1.0, 0.0]),
        MinkowskiVector::new(vec![r, 0.0, -r]),
    )
}

type State = [f64; 9];

fn deriv(kappa: &dyn Fn(f64) -> f64, t: f64, y: &State) -> State {
    let k = kappa(t);
    let mut d = [0.0; 9];
    for c in 0..3 {
        d[c] = y[3 + c];
        d[3 + c] = k * y[c] + y[6 + c];
        d[6 + c] = k * y[3 + c];
    }
    d
}

fn rk4(kappa: &dyn Fn(f64) -> f64, t: f64, y: &State, h: f64) -> State {
    let add = |a: &State, b: &State, s: f64| {
        let mut r = *a;
        for i in 0..9 {
            r[i] += s * b[i];
        }
        r
    };
    let k1 = deriv(kappa, t, y);
    let k2 = deriv(kappa, t + 0.5 * h, &add(y, &k1, 0.5 * h));
    let k3 = deriv(kappa, t + 0.5 * h, &add(y, &k2, 0.5 * h));
    let k4 = deriv(kappa, t + h, &add(y, &k3, h));
    let mut r = *y;
    for i in 0..9 {
        r[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    r
}

fn split(y: &State) -> (MinkowskiVector, MinkowskiVector, MinkowskiVector) {
    (
        MinkowskiVector::new(y[0..3].to_vec()),
        MinkowskiVector::new(y[3..6].to_vec()),
        MinkowskiVector::new(y[6..9].to_vec()),
    )
}

fn join(g: &MinkowskiVector, gp: &MinkowskiVector, eta: &MinkowskiVector) -> State {
    let mut y = [0.0; 9];
    for c in 0..3 {
        y[c] = g[c];
        y[3 + c] = gp[c];
        y[6 + c] = eta[c];
    }
    y
}

/// Pull the state back onto the constraint manifold.
fn project(y: &State) -> Result<State> {
    let (mut g, mut gp, eta) = split(y);
    let spatial = (g[1] * g[1] + g[2] * g[2]).sqrt();
    if spatial > 0.0 {
        let s = g[0] / spatial;
        g[1] *= s;
        g[2] *= s;
    }
    // eta is transversal to the null line of gamma, so this kills <g,g'>.
    let ge = g.dot(&eta);
    gp = &gp - &(&g * (g.dot(&gp) / ge));
    let gp = &gp * (1.0 / gp.norm2().sqrt());
    let eta = complete_pseudo_orthonormal(&g, std::slice::from_ref(&gp))?;
    Ok(join(&g, &gp, &eta))
}

/// Integrate the frame equations with adaptive RK4 (step doubling), output
/// on `samples` uniformly spaced points of `t_range`.
pub fn integrate_lc2_curve(
    kappa: &dyn Fn(f64) -> f64,
    initial: (MinkowskiVector, MinkowskiVector, MinkowskiVector),
    t_range: (f64, f64),
    tol: f64,
    samples: usize,
) -> Result<CurveOnCone> {
    let (g0, gp0, eta0) = initial;
    if g0.len() != 3 || gp0.len() != 3 || eta0.len() != 3 {
        return Err(Error::Dimension {
            expected: 3,
            got: g0.len().max(gp0.len()).max(eta0.len()),
        });
    }
    let violated: Vec<String> = constraints(&g0, &gp0, &eta0)
        .iter()
        .zip(CONSTRAINT_NAMES)
        .filter(|(r, _)| !(r.abs() <= 1e-10))
        .map(|(r, n)| format!("{n} (residual {r:.3e})"))
        .collect();
    if !violated.is_empty() {
        return Err(Error::Precondition(format!(
            "inadmissible initial data: {}",
            violated.join(", ")
        )));
    }
    if samples < 2 || !(t_range.1 > t_range.0) || !(tol > 0.0) {
        return Err(Error::Precondition("need samples >= 2, t1 > t0, tol > 0".into()));
    }
    let (t0, t1) = t_range;
    let dt = (t1 - t0) / (samples - 1) as f64;
    let mut y = join(&g0, &gp0, &eta0);
    let mut t = t0;
    let mut h = dt;
    let mut projections = 0;
    let mut out = Vec::with_capacity(samples);
    let push = |out: &mut Vec<CurveSample>, t: f64, y: &State| {
        let (gamma, gamma_prime, eta) = split(y);
        out.push(CurveSample {
            t,
            gamma,
            gamma_prime,
            eta,
            kappa: kappa(t),
        });
    };
    push(&mut out, t, &y);
    for k in 1..samples {
        let target = if k == samples - 1 { t1 } else { t0 + k as f64 * dt };
        while t < target {
            let step = h.min(target - t);
            let big = rk4(kappa, t, &y, step);
            let mid = rk4(kappa, t, &y, 0.5 * step);
            let small = rk4(kappa, t + 0.5 * step, &mid, 0.5 * step);
            let err = (0..9)
                .map(|i| (small[i] - big[i]).abs() / (1.0 + small[i].abs()))
                .fold(0.0, f64::max)
                / 15.0;
            if !(err <= tol) {
                h = 0.5 * step;
                if h < 1e-12 * (1.0 + t.abs()) {
                    return Err(Error::Precondition(format!("step size underflow at t = {t}")));
                }
                continue;
            }
            for i in 0..9 {
                y[i] = small[i] + (small[i] - big[i]) / 15.0;
            }
            t = if step == target - t { target } else { t + step };
            let (g, gp, eta) = split(&y);
            if constraints(&g, &gp, &eta).iter().any(|r| r.abs() > 10.0 * tol) {
                y = project(&y)?;
                projections += 1;
            }
            let grow = if err > 0.0 { 0.9 * (tol / err).powf(0.2) } else { 2.0 };
            h = (step * grow.clamp(0.2, 2.0)).min(dt);
        }
        push(&mut out, target, &y);
    }
    Ok(CurveOnCone {
        samples: out,
        projections,
    })
}

/// `kappa = -<gamma'', eta>` and `eta` from the 2-jet of an arc-length curve
/// on `LC^2`.
pub fn curve_kappa(
    gamma: &MinkowskiVector,
    gamma_prime: &MinkowskiVector,
    gamma_second: &MinkowskiVector,
    tol: f64,
) -> Result<(f64, MinkowskiVector)> {
    if gamma.len() != 3 || gamma_prime.len() != 3 || gamma_second.len() != 3 {
        return Err(Error::Dimension {
            expected: 3,
            got: gamma.len(),
        });
    }
    let cone = gamma.norm2();
    if !(cone.abs() <= tol * (1.0 + gamma.euclid_norm2())) {
        return Err(Error::Precondition(format!(
            "curve is not on the light cone (<gamma,gamma> = {cone:.3e})"
        )));
    }
    let speed = gamma_prime.norm2() - 1.0;
    if !(speed.abs() <= tol) {
        return Err(Error::Precondition(format!(
            "curve is not arc-length (<gamma',gamma'> - 1 = {speed:.3e})"
        )));
    }
    let eta = complete_pseudo_orthonormal(gamma, std::slice::from_ref(gamma_prime))?;
    Ok((-gamma_second.dot(&eta), eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_kappa_keeps_eta_constant() {
        let c = integrate_lc2_curve(&|_| 0.0, standard_initial_data(), (0.0, 3.0), 1e-10, 31).unwrap();
        let e0 = &c.samples[0].eta;
        for s in &c.samples {
            assert!((&s.eta - e0).max_abs() < 1e-9);
        }
    }

    #[test]
    fn bad_initial_data_lists_constraints() {
        let (g, gp, _) = standard_initial_data();
        let err = integrate_lc2_curve(&|_| 0.0, (g.clone(), gp, g), (0.0, 1.0), 1e-8, 3).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("<gamma,eta> = -1"), "{msg}");
        assert!(!msg.contains("<gamma',gamma'>"), "{msg}");
    }

    #[test]
    fn circle_has_kappa_minus_half() {
        for i in 0..20 {
            let t = -PI + 0.3 * i as f64;
            let g = MinkowskiVector::new(vec![1.0, t.cos(), t.sin()]);
            let gp = MinkowskiVector::new(vec![0.0, -t.sin(), t.cos()]);
            let gpp = MinkowskiVector::new(vec![0.0, -t.cos(), -t.sin()]);
            let (k, eta) = curve_kappa(&g, &gp, &gpp, 1e-10).unwrap();
            assert!((k + 0.5).abs() < 1e-12);
            // eta is solved by hand: eta = (1/2)(1, -cos t, -sin t).
            let expect = MinkowskiVector::new(vec![0.5, -0.5 * t.cos(), -0.5 * t.sin()]);
            assert!((&eta - &expect).max_abs() < 1e-12);
        }
    }

    #[test]
    fn stretched_time_axis_rejected() {
        let g = MinkowskiVector::new(vec![2.0, 1.0, 0.0]);
        let gp = MinkowskiVector::new(vec![0.0, 0.0, 1.0]);
        assert!(matches!(curve_kappa(&g, &gp, &gp, 1e-8), Err(Error::Precondition(_))));
    }
}
