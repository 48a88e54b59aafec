//! The profile equation of pseudo-umbilical submanifolds over a totally
//! umbilical base:
//!
//! `(n-2) tau^2 a a'' - (n-1) (c + tau^2 a'^2) = 0`.

use crate::error::{Error, Result};
use crate::expr::Table;
use serde::Serialize;

/// Profile value below which integration stops.
pub const ALPHA_HAT_MIN: f64 = 1e-6;
/// Largest step, so the returned grid is dense enough for interpolation.
pub const MAX_STEP: f64 = 1.0 / 64.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeSolution {
    pub n: usize,
    pub c: f64,
    pub tau: f64,
    /// `(s, a, a')`, sorted by increasing `s`.
    pub grid: Vec<(f64, f64, f64)>,
    /// Where the profile fell below [`ALPHA_HAT_MIN`], if it did.
    pub blow_down: Option<f64>,
}

fn rhs(n: usize, c: f64, tau: f64, a: f64, ap: f64) -> f64 {
    let nf = n as f64;
    (nf - 1.0) * (c + tau * tau * ap * ap) / ((nf - 2.0) * tau * tau * a)
}

fn rk4(n: usize, c: f64, tau: f64, y: [f64; 2], h: f64) -> [f64; 2] {
    let f = |y: [f64; 2]| [y[1], rhs(n, c, tau, y[0], y[1])];
    let k1 = f(y);
    let k2 = f([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
    let k3 = f([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
    let k4 = f([y[0] + h * k3[0], y[1] + h * k3[1]]);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

impl OdeSolution {
    /// `a''` from the equation at a grid state.
    pub fn second_derivative(&self, a: f64, ap: f64) -> f64 {
        rhs(self.n, self.c, self.tau, a, ap)
    }

    /// Quintic Hermite table `(s, a, a', a'')` of the profile.
    pub fn to_table(&self) -> Result<Table> {
        let rows = self
            .grid
            .iter()
            .map(|&(s, a, ap)| [s, a, ap, self.second_derivative(a, ap)])
            .collect();
        Table::new(rows).map_err(Error::Precondition)
    }

    /// `beta = -(c + tau^2 a'^2) / (2 tau^2 a^2)`.
    pub fn beta(&self, a: f64, ap: f64) -> f64 {
        -(self.c + self.tau * self.tau * ap * ap) / (2.0 * self.tau * self.tau * a * a)
    }

    /// Largest |ODE residual| of the interpolant at interval midpoints,
    /// relative to `1 + |a a''|`.
    pub fn midpoint_residual(&self) -> Result<f64> {
        let t = self.to_table()?;
        let nf = self.n as f64;
        let mut worst: f64 = 0.0;
        for w in self.grid.windows(2) {
            let s = 0.5 * (w[0].0 + w[1].0);
            let (a, ap, app) = t.eval(s).expect("midpoint inside table");
            let r = (nf - 2.0) * self.tau * self.tau * a * app
                - (nf - 1.0) * (self.c + self.tau * self.tau * ap * ap);
            worst = worst.max(r.abs() / (1.0 + (a * app).abs()));
        }
        Ok(worst)
    }
}

/// Adaptive RK4 (step doubling) from `ivp = (a(s0), a'(s0))` at
/// `s0 = s_range.0` towards `s_range.1`, which may lie on either side.
pub fn solve_alpha_hat_ode(
    n: usize,
    c: f64,
    tau: f64,
    ivp: (f64, f64),
    s_range: (f64, f64),
    tol: f64,
) -> Result<OdeSolution> {
    if n <= 2 {
        return Err(Error::Dimension { expected: 3, got: n });
    }
    if !(ivp.0 > 0.0) {
        return Err(Error::Precondition(format!("initial profile value {} must be positive", ivp.0)));
    }
    if !(tau > 0.0) || !(tol > 0.0) {
        return Err(Error::Precondition("tau and tol must be positive".into()));
    }
    let (s0, s1) = s_range;
    let dir = if s1 >= s0 { 1.0 } else { -1.0 };
    let span = (s1 - s0).abs();
    let mut s = s0;
    let mut y = [ivp.0, ivp.1];
    let mut grid = vec![(s0, y[0], y[1])];
    let mut h = MAX_STEP.min(span.max(f64::MIN_POSITIVE));
    let mut blow_down = None;
    while (s1 - s) * dir > 1e-14 * (1.0 + span) {
        h = h.min((s1 - s).abs());
        let big = rk4(n, c, tau, y, dir * h);
        let half = rk4(n, c, tau, y, dir * 0.5 * h);
        let small = rk4(n, c, tau, half, dir * 0.5 * h);
        let err = ((small[0] - big[0]).abs() / (1.0 + small[0].abs()))
            .max((small[1] - big[1]).abs() / (1.0 + small[1].abs()))
            / 15.0;
        let finite = small.iter().chain(&big).all(|x| x.is_finite()) && half[0] > 0.0;
        if !finite || err > tol {
            h *= 0.5;
            if h < 1e-12 {
                blow_down = Some(s);
                break;
            }
            continue;
        }
        s += dir * h;
        y = [small[0] + (small[0] - big[0]) / 15.0, small[1] + (small[1] - big[1]) / 15.0];
        if y[0] <= ALPHA_HAT_MIN {
            blow_down = Some(s);
            break;
        }
        grid.push((s, y[0], y[1]));
        let grow = if err > 0.0 { 0.9 * (tol / err).powf(0.2) } else { 2.0 };
        h = (h * grow.clamp(0.2, 2.0)).min(MAX_STEP);
    }
    if dir < 0.0 {
        grid.reverse();
    }
    Ok(OdeSolution {
        n,
        c,
        tau,
        grid,
        blow_down,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_solution_exact() {
        let sol = solve_alpha_hat_ode(3, -1.0, 1.0, (1.0, 1.0), (0.0, 2.0), 1e-10).unwrap();
        assert!(sol.blow_down.is_none());
        for &(s, a, ap) in &sol.grid {
            assert!((a - (1.0 + s)).abs() < 1e-12);
            assert!((ap - 1.0).abs() < 1e-12);
        }
        assert_eq!(sol.grid.last().unwrap().0, 2.0);
    }

    #[test]
    fn backward_and_blow_down() {
        let sol = solve_alpha_hat_ode(3, -1.0, 1.0, (1.0, 0.0), (0.0, -3.0), 1e-10).unwrap();
        assert!(sol.blow_down.is_some());
        assert!(sol.grid.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            solve_alpha_hat_ode(2, -1.0, 1.0, (1.0, 0.0), (0.0, 1.0), 1e-8),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            solve_alpha_hat_ode(3, -1.0, 1.0, (0.0, 0.0), (0.0, 1.0), 1e-8),
            Err(Error::Precondition(_))
        ));
    }
}
