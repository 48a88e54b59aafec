//! Second-order truncated Taylor arithmetic and generic expression evaluation.

use super::ast::{BinOp, Expr, UnaryFn};
use super::table::Table;

/// Number type an [`Expr`] can be evaluated over.
pub trait Scalar: Clone {
    /// Constant with the same shape as `self`.
    fn lift(&self, c: f64) -> Self;
    fn value(&self) -> f64;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Composition with a univariate function given its value and first two
    /// derivatives at `self.value()`.
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self;
    fn is_finite(&self) -> bool;
}

impl Scalar for f64 {
    fn lift(&self, c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn chain(&self, f0: f64, _f1: f64, _f2: f64) -> Self {
        f0
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

/// Value, gradient and packed upper-triangular Hessian of a function of `n`
/// variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Taylor2 {
    pub v: f64,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
}

/// Index of `(j, k)`, `j <= k`, in the packed Hessian of an `n`-variable jet.
pub fn packed_index(n: usize, j: usize, k: usize) -> usize {
    let (j, k) = if j <= k { (j, k) } else { (k, j) };
    j * n - j * j.saturating_sub(1) / 2 + (k - j)
}

impl Taylor2 {
    pub fn constant(n: usize, c: f64) -> Self {
        Self {
            v: c,
            g: vec![0.0; n],
            h: vec![0.0; n * (n + 1) / 2],
        }
    }

    /// The `i`-th coordinate function evaluated at `x`.
    pub fn variable(n: usize, i: usize, x: f64) -> Self {
        let mut t = Self::constant(n, x);
        t.g[i] = 1.0;
        t
    }

    pub fn n(&self) -> usize {
        self.g.len()
    }

    pub fn hess(&self, j: usize, k: usize) -> f64 {
        self.h[packed_index(self.n(), j, k)]
    }
}

impl Scalar for Taylor2 {
    fn lift(&self, c: f64) -> Self {
        Self::constant(self.n(), c)
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn add(&self, o: &Self) -> Self {
        Self {
            v: self.v + o.v,
            g: self.g.iter().zip(&o.g).map(|(a, b)| a + b).collect(),
            h: self.h.iter().zip(&o.h).map(|(a, b)| a + b).collect(),
        }
    }
    fn sub(&self, o: &Self) -> Self {
        Self {
            v: self.v - o.v,
            g: self.g.iter().zip(&o.g).map(|(a, b)| a - b).collect(),
            h: self.h.iter().zip(&o.h).map(|(a, b)| a - b).collect(),
        }
    }
    fn mul(&self, o: &Self) -> Self {
        let n = self.n();
        let mut h = Vec::with_capacity(self.h.len());
        for j in 0..n {
            for k in j..n {
                let idx = h.len();
                h.push(
                    self.v * o.h[idx]
                        + o.v * self.h[idx]
                        + self.g[j] * o.g[k]
                        + self.g[k] * o.g[j],
                );
            }
        }
        Self {
            v: self.v * o.v,
            g: self
                .g
                .iter()
                .zip(&o.g)
                .map(|(a, b)| self.v * b + o.v * a)
                .collect(),
            h,
        }
    }
    fn neg(&self) -> Self {
        Self {
            v: -self.v,
            g: self.g.iter().map(|a| -a).collect(),
            h: self.h.iter().map(|a| -a).collect(),
        }
    }
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let n = self.n();
        let mut h = Vec::with_capacity(self.h.len());
        for j in 0..n {
            for k in j..n {
                let idx = h.len();
                h.push(f1 * self.h[idx] + f2 * self.g[j] * self.g[k]);
            }
        }
        Self {
            v: f0,
            g: self.g.iter().map(|a| f1 * a).collect(),
            h,
        }
    }
    fn is_finite(&self) -> bool {
        self.v.is_finite() && self.g.iter().all(|x| x.is_finite()) && self.h.iter().all(|x| x.is_finite())
    }
}

/// Named values visible to an expression.
pub trait Names {
    fn constant(&self, name: &str) -> Option<f64>;
    fn table(&self, name: &str) -> Option<&Table>;
}

/// The offending node and a reason, produced when evaluation leaves the
/// domain of an operation.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalFault<'e> {
    pub node: &'e Expr,
    pub msg: String,
}

fn fault<'e, T>(node: &'e Expr, msg: impl Into<String>) -> Result<T, EvalFault<'e>> {
    Err(EvalFault {
        node,
        msg: msg.into(),
    })
}

/// Evaluates `e` with parameter `i` bound to `vars[i]`.
pub fn eval<'e, T: Scalar>(
    e: &'e Expr,
    vars: &[T],
    names: &dyn Names,
) -> Result<T, EvalFault<'e>> {
    let proto = &vars[0];
    let out = match e {
        Expr::Num(x) => proto.lift(*x),
        Expr::Param(i) => vars[*i].clone(),
        Expr::Named(s) => match names.constant(s) {
            Some(c) => proto.lift(c),
            None => return fault(e, format!("unknown constant `{s}`")),
        },
        Expr::Unary(f, a) => {
            let a = eval(a, vars, names)?;
            let x = a.value();
            match f {
                UnaryFn::Neg => a.neg(),
                UnaryFn::Sin => a.chain(x.sin(), x.cos(), -x.sin()),
                UnaryFn::Cos => a.chain(x.cos(), -x.sin(), -x.cos()),
                UnaryFn::Exp => {
                    let ex = x.exp();
                    a.chain(ex, ex, ex)
                }
                UnaryFn::Log => {
                    if !(x > 0.0) {
                        return fault(e, format!("log of non-positive value {x}"));
                    }
                    a.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
                }
                UnaryFn::Sqrt => {
                    if !(x > 0.0) {
                        return fault(e, format!("sqrt of non-positive value {x}"));
                    }
                    let r = x.sqrt();
                    a.chain(r, 0.5 / r, -0.25 / (r * x))
                }
                UnaryFn::Sinh => a.chain(x.sinh(), x.cosh(), x.sinh()),
                UnaryFn::Cosh => a.chain(x.cosh(), x.sinh(), x.cosh()),
            }
        }
        Expr::Binary(op, a, b) => {
            let a = eval(a, vars, names)?;
            let b = eval(b, vars, names)?;
            match op {
                BinOp::Add => a.add(&b),
                BinOp::Sub => a.sub(&b),
                BinOp::Mul => a.mul(&b),
                BinOp::Div => {
                    let y = b.value();
                    if y == 0.0 {
                        return fault(e, "division by zero");
                    }
                    a.mul(&b.chain(1.0 / y, -1.0 / (y * y), 2.0 / (y * y * y)))
                }
            }
        }
        Expr::Pow(a, p) => {
            let a = eval(a, vars, names)?;
            let x = a.value();
            let p = *p;
            if p.fract() == 0.0 && p.abs() < 1e9 {
                let k = p as i32;
                if k < 0 && x == 0.0 {
                    return fault(e, "division by zero");
                }
                let pm1 = if k >= 1 { x.powi(k - 1) } else { x.powi(k) / x };
                let pm2 = if k >= 2 { x.powi(k - 2) } else { x.powi(k) / (x * x) };
                let (d1, d2) = match k {
                    0 => (0.0, 0.0),
                    1 => (1.0, 0.0),
                    _ => (p * pm1, p * (p - 1.0) * pm2),
                };
                a.chain(x.powi(k), d1, d2)
            } else {
                if !(x > 0.0) {
                    return fault(e, format!("non-integer power of non-positive value {x}"));
                }
                a.chain(x.powf(p), p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
            }
        }
        Expr::Table(name, a) => {
            let a = eval(a, vars, names)?;
            let Some(t) = names.table(name) else {
                return fault(e, format!("unknown table `{name}`"));
            };
            match t.eval(a.value()) {
                Some((v, d1, d2)) => a.chain(v, d1, d2),
                None => {
                    let (lo, hi) = t.range();
                    return fault(
                        e,
                        format!("argument {} outside table range [{lo}, {hi}]", a.value()),
                    );
                }
            }
        }
    };
    if !out.is_finite() {
        return fault(e, "non-finite result");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct NoNames;
    impl Names for NoNames {
        fn constant(&self, name: &str) -> Option<f64> {
            match name {
                "pi" => Some(std::f64::consts::PI),
                _ => None,
            }
        }
        fn table(&self, _: &str) -> Option<&Table> {
            None
        }
    }

    #[test]
    fn packed_layout() {
        let n = 3;
        let mut seen = vec![];
        for j in 0..n {
            for k in j..n {
                seen.push(packed_index(n, j, k));
            }
        }
        assert_eq!(seen, (0..6).collect::<Vec<_>>());
        assert_eq!(packed_index(3, 2, 1), packed_index(3, 1, 2));
    }

    #[test]
    fn square_jet() {
        let e = Expr::param(0).powf(2.0);
        let x = [Taylor2::variable(1, 0, 3.0)];
        let j = eval(&e, &x, &NoNames).unwrap();
        assert_eq!((j.v, j.g[0], j.h[0]), (9.0, 6.0, 2.0));
    }

    #[test]
    fn mixed_partial() {
        // exp(s) cos(t) at (0, pi/2)
        let e = Expr::unary(UnaryFn::Exp, Expr::param(0)) * Expr::param(1).cos();
        let x = [
            Taylor2::variable(2, 0, 0.0),
            Taylor2::variable(2, 1, std::f64::consts::FRAC_PI_2),
        ];
        let j = eval(&e, &x, &NoNames).unwrap();
        assert!(j.v.abs() < 1e-15);
        assert!(j.g[0].abs() < 1e-15);
        assert!((j.g[1] + 1.0).abs() < 1e-15);
        assert!((j.hess(0, 1) + 1.0).abs() < 1e-15);
        assert!(j.hess(1, 1).abs() < 1e-15);
    }

    #[test]
    fn domain_faults_name_the_node() {
        let e = Expr::unary(UnaryFn::Log, Expr::param(0) - Expr::num(2.0));
        let f = eval(&e, &[1.0], &NoNames).unwrap_err();
        assert!(f.msg.contains("log"));
        let e = Expr::num(1.0) / Expr::param(0);
        assert_eq!(eval(&e, &[0.0], &NoNames).unwrap_err().msg, "division by zero");
    }
}
