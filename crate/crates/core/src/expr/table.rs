//! Univariate quintic Hermite tables.
//!
//! Each row carries `(x, f, f', f'')`; between nodes the interpolant is the
//! unique quintic matching value, slope and curvature at both ends, so the
//! result is C2 and its second derivative is continuous across nodes.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    rows: Vec<[f64; 4]>,
}

impl Table {
    /// Rows must have strictly increasing `x`; at least two rows.
    pub fn new(rows: Vec<[f64; 4]>) -> Result<Self, String> {
        if rows.len() < 2 {
            return Err("a table needs at least two rows".into());
        }
        for r in &rows {
            if r.iter().any(|x| !x.is_finite()) {
                return Err("table entries must be finite".into());
            }
        }
        for w in rows.windows(2) {
            if !(w[1][0] > w[0][0]) {
                return Err(format!(
                    "table abscissae must increase strictly ({} then {})",
                    w[0][0], w[1][0]
                ));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[[f64; 4]] {
        &self.rows
    }

    pub fn range(&self) -> (f64, f64) {
        (self.rows[0][0], self.rows[self.rows.len() - 1][0])
    }

    /// Value, first and second derivative at `x`, or `None` outside the range.
    pub fn eval(&self, x: f64) -> Option<(f64, f64, f64)> {
        let (lo, hi) = self.range();
        let slack = 1e-12 * (hi - lo).max(1.0);
        if !(x >= lo - slack && x <= hi + slack) {
            return None;
        }
        let x = x.clamp(lo, hi);
        let k = match self.rows.binary_search_by(|r| r[0].partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.rows.len() - 2),
            Err(i) => i - 1,
        };
        let [x0, v0, d0, a0] = self.rows[k];
        let [x1, v1, d1, a1] = self.rows[k + 1];
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let (t4, t5) = (t3 * t, t3 * t2);
        // basis functions and their t-derivatives
        let b = [
            (
                1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
                -30.0 * t2 + 60.0 * t3 - 30.0 * t4,
                -60.0 * t + 180.0 * t2 - 120.0 * t3,
            ),
            (
                t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
                1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4,
                -36.0 * t + 96.0 * t2 - 60.0 * t3,
            ),
            (
                0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5,
                t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4,
                1.0 - 9.0 * t + 18.0 * t2 - 10.0 * t3,
            ),
            (
                10.0 * t3 - 15.0 * t4 + 6.0 * t5,
                30.0 * t2 - 60.0 * t3 + 30.0 * t4,
                60.0 * t - 180.0 * t2 + 120.0 * t3,
            ),
            (
                -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
                -12.0 * t2 + 28.0 * t3 - 15.0 * t4,
                -24.0 * t + 84.0 * t2 - 60.0 * t3,
            ),
            (
                0.5 * t3 - t4 + 0.5 * t5,
                1.5 * t2 - 4.0 * t3 + 2.5 * t4,
                3.0 * t - 12.0 * t2 + 10.0 * t3,
            ),
        ];
        let c = [v0, h * d0, h * h * a0, v1, h * d1, h * h * a1];
        let mut out = (0.0, 0.0, 0.0);
        for (ci, bi) in c.iter().zip(&b) {
            out.0 += ci * bi.0;
            out.1 += ci * bi.1;
            out.2 += ci * bi.2;
        }
        Some((out.0, out.1 / h, out.2 / (h * h)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_quintic_exactly() {
        let f = |x: f64| (x.powi(5) - 2.0 * x.powi(3) + x, 5.0 * x.powi(4) - 6.0 * x * x + 1.0, 20.0 * x.powi(3) - 12.0 * x);
        let rows = [-1.0, 0.3, 1.2]
            .iter()
            .map(|&x| {
                let (v, d, a) = f(x);
                [x, v, d, a]
            })
            .collect();
        let t = Table::new(rows).unwrap();
        for &x in &[-1.0, -0.4, 0.3, 0.77, 1.2] {
            let (v, d, a) = t.eval(x).unwrap();
            let (ev, ed, ea) = f(x);
            assert!((v - ev).abs() < 1e-12 && (d - ed).abs() < 1e-11 && (a - ea).abs() < 1e-10);
        }
        assert!(t.eval(1.3).is_none());
    }

    #[test]
    fn rejects_unsorted() {
        assert!(Table::new(vec![[1.0, 0.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0]]).is_err());
    }
}
