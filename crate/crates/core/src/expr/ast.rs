use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryFn {
    Neg,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
}

impl UnaryFn {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Self::Sin,
            "cos" => Self::Cos,
            "exp" => Self::Exp,
            "log" | "ln" => Self::Log,
            "sqrt" => Self::Sqrt,
            "sinh" => Self::Sinh,
            "cosh" => Self::Cosh,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Neg => "-",
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Exp => "exp",
            Self::Log => "log",
            Self::Sqrt => "sqrt",
            Self::Sinh => "sinh",
            Self::Cosh => "cosh",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            Self::Add => "+",
            Self::Sub => "-",
            Self::Mul => "*",
            Self::Div => "/",
        }
    }

    fn prec(self) -> u8 {
        match self {
            Self::Add | Self::Sub => 1,
            Self::Mul | Self::Div => 2,
        }
    }
}

/// Resolved expression tree. Parameters are referenced by index, named
/// constants and tables by name.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Param(usize),
    Named(String),
    Unary(UnaryFn, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Power with a literal exponent.
    Pow(Box<Expr>, f64),
    /// Interpolated univariate table applied to an argument.
    Table(String, Box<Expr>),
}

impl Expr {
    pub fn num(x: f64) -> Self {
        Self::Num(x)
    }

    pub fn param(i: usize) -> Self {
        Self::Param(i)
    }

    pub fn named(s: &str) -> Self {
        Self::Named(s.to_string())
    }

    pub fn unary(f: UnaryFn, a: Expr) -> Self {
        Self::Unary(f, Box::new(a))
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Self {
        Self::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn table(name: &str, a: Expr) -> Self {
        Self::Table(name.to_string(), Box::new(a))
    }

    pub fn powf(self, p: f64) -> Self {
        Self::Pow(Box::new(self), p)
    }

    pub fn sin(self) -> Self {
        Self::unary(UnaryFn::Sin, self)
    }

    pub fn cos(self) -> Self {
        Self::unary(UnaryFn::Cos, self)
    }

    pub fn sqrt(self) -> Self {
        Self::unary(UnaryFn::Sqrt, self)
    }

    /// Rewrites parameter indices.
    pub fn map_params(&self, f: &impl Fn(usize) -> usize) -> Expr {
        match self {
            Self::Num(x) => Self::Num(*x),
            Self::Param(i) => Self::Param(f(*i)),
            Self::Named(s) => Self::Named(s.clone()),
            Self::Unary(u, a) => Self::unary(*u, a.map_params(f)),
            Self::Binary(op, a, b) => Self::binary(*op, a.map_params(f), b.map_params(f)),
            Self::Pow(a, p) => Self::Pow(Box::new(a.map_params(f)), *p),
            Self::Table(n, a) => Self::table(n, a.map_params(f)),
        }
    }

    /// Calls `f` on every named constant and table name in the tree.
    pub fn visit_names(&self, f: &mut impl FnMut(&str)) {
        match self {
            Self::Named(s) => f(s),
            Self::Table(s, a) => {
                f(s);
                a.visit_names(f);
            }
            Self::Unary(_, a) | Self::Pow(a, _) => a.visit_names(f),
            Self::Binary(_, a, b) => {
                a.visit_names(f);
                b.visit_names(f);
            }
            Self::Num(_) | Self::Param(_) => {}
        }
    }

    /// Display adapter resolving parameter indices to names.
    pub fn display<'a>(&'a self, params: &'a [String]) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, params }
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Add, self, rhs)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Sub, self, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Mul, self, rhs)
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Div, self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::unary(UnaryFn::Neg, self)
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    params: &'a [String],
}

// Precedence levels: 1 additive, 2 multiplicative, 3 unary minus, 4 power, 5 atom.
fn level(e: &Expr) -> u8 {
    match e {
        Expr::Binary(op, ..) => op.prec(),
        Expr::Unary(UnaryFn::Neg, _) => 3,
        Expr::Pow(..) => 4,
        Expr::Num(x) if *x < 0.0 || x.is_sign_negative() => 3,
        _ => 5,
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_num(x: f64) -> String {
    format!("{x}")
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr, params: &[String]) -> fmt::Result {
    let wrap = |f: &mut fmt::Formatter<'_>, sub: &Expr, need: bool| -> fmt::Result {
        if need {
            write!(f, "(")?;
            write_expr(f, sub, params)?;
            write!(f, ")")
        } else {
            write_expr(f, sub, params)
        }
    };
    match e {
        Expr::Num(x) => {
            if x.is_sign_negative() {
                write!(f, "-{}", fmt_num(-x))
            } else {
                write!(f, "{}", fmt_num(*x))
            }
        }
        Expr::Param(i) => match params.get(*i) {
            Some(name) => write!(f, "{name}"),
            None => write!(f, "${i}"),
        },
        Expr::Named(s) => write!(f, "{s}"),
        Expr::Unary(UnaryFn::Neg, a) => {
            write!(f, "-")?;
            wrap(f, a, level(a) < 4)
        }
        Expr::Unary(u, a) => {
            write!(f, "{}(", u.name())?;
            write_expr(f, a, params)?;
            write!(f, ")")
        }
        Expr::Table(name, a) => {
            write!(f, "{name}(")?;
            write_expr(f, a, params)?;
            write!(f, ")")
        }
        Expr::Pow(a, p) => {
            wrap(f, a, level(a) < 5)?;
            if p.is_sign_negative() {
                write!(f, "^(-{})", fmt_num(-p))
            } else {
                write!(f, "^{}", fmt_num(*p))
            }
        }
        Expr::Binary(op, a, b) => {
            let p = op.prec();
            wrap(f, a, level(a) < p)?;
            write!(f, " {} ", op.symbol())?;
            // left-associative: an equal-precedence right operand needs parens
            wrap(f, b, level(b) <= p)
        }
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self.expr, self.params)
    }
}
