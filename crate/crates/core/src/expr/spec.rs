use super::ast::{fmt_num, Expr};
use super::parser::{parse_statements, resolve, Binding, RawExpr, Stmt};
use super::table::Table;
use super::taylor::{eval, packed_index, Names, Taylor2};
use crate::error::{Error, Pos, Result};
use crate::lorentz::MinkowskiVector;
use std::fmt::Write as _;

/// Constants every spec can use without declaring them.
pub const PREDECLARED: [(&str, f64); 2] = [
    ("pi", std::f64::consts::PI),
    ("sqrt2", std::f64::consts::SQRT_2),
];

/// Default parameter interval when no `domain` statement is given.
pub const DEFAULT_DOMAIN: (f64, f64) = (-1.0, 1.0);

/// Which hypersurface the immersion is meant to lie on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `LC^n x R` inside `E_1^{n+2}`; the last coordinate is the axis.
    #[default]
    Cylinder,
    /// The light cone itself; every coordinate is constrained.
    Cone,
}

/// A parsed, evaluable parametrization `u -> phi(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmersionSpec {
    pub param_names: Vec<String>,
    pub ambient_dim: usize,
    pub mode: Mode,
    pub components: Vec<Expr>,
    pub domain: Vec<(f64, f64)>,
    /// User constants in declaration order.
    pub constants: Vec<(String, f64)>,
    pub tables: Vec<(String, Table)>,
}

impl Names for ImmersionSpec {
    fn constant(&self, name: &str) -> Option<f64> {
        self.constants
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
            .or_else(|| PREDECLARED.iter().find(|(n, _)| *n == name).map(|(_, v)| *v))
    }

    fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }
}

/// Value with first and second partial derivatives of every ambient coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub value: MinkowskiVector,
    /// `first[a][j] = d phi_a / d u_j`.
    pub first: Vec<Vec<f64>>,
    /// `second[a][j][k] = d^2 phi_a / d u_j d u_k`.
    pub second: Vec<Vec<Vec<f64>>>,
}

impl Jet2 {
    pub fn ambient_dim(&self) -> usize {
        self.value.len()
    }

    pub fn n_params(&self) -> usize {
        self.first.first().map_or(0, |r| r.len())
    }

    /// Coordinate tangent `d phi / d u_j`.
    pub fn tangent(&self, j: usize) -> MinkowskiVector {
        MinkowskiVector(self.first.iter().map(|r| r[j]).collect())
    }

    pub fn tangents(&self) -> Vec<MinkowskiVector> {
        (0..self.n_params()).map(|j| self.tangent(j)).collect()
    }

    /// `d^2 phi / d u_j d u_k`.
    pub fn second_vec(&self, j: usize, k: usize) -> MinkowskiVector {
        MinkowskiVector(self.second.iter().map(|m| m[j][k]).collect())
    }

    /// First fundamental form `g_jk = <phi_j, phi_k>`.
    pub fn metric(&self) -> Vec<Vec<f64>> {
        let t = self.tangents();
        let n = t.len();
        (0..n)
            .map(|j| (0..n).map(|k| t[j].dot(&t[k])).collect())
            .collect()
    }
}

/// Anything that can produce 2-jets of an immersion.
pub trait JetSource: Sync {
    fn n_params(&self) -> usize;
    fn ambient_dim(&self) -> usize;
    fn param_domain(&self) -> Vec<(f64, f64)>;
    fn jet(&self, point: &[f64]) -> Result<Jet2>;
}

impl JetSource for ImmersionSpec {
    fn n_params(&self) -> usize {
        self.param_names.len()
    }

    fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    fn param_domain(&self) -> Vec<(f64, f64)> {
        self.domain.clone()
    }

    fn jet(&self, point: &[f64]) -> Result<Jet2> {
        eval_jet2(self, point)
    }
}

impl ImmersionSpec {
    pub fn n_params(&self) -> usize {
        self.param_names.len()
    }

    /// Checks dimensions and that every name referenced is declared.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_params();
        if n == 0 {
            return Err(Error::InvalidSpec("no parameters declared".into()));
        }
        if self.components.len() != self.ambient_dim {
            return Err(Error::InvalidSpec(format!(
                "map has {} components but ambient dimension is {}",
                self.components.len(),
                self.ambient_dim
            )));
        }
        if self.ambient_dim != n + 2 {
            let what = match self.mode {
                Mode::Cylinder => "an n-dimensional submanifold of LC^n x R",
                Mode::Cone => "a codimension-two submanifold of the light cone",
            };
            return Err(Error::DimensionRule(format!(
                "{what} needs ambient dimension {} for {n} parameter(s), got {}",
                n + 2,
                self.ambient_dim
            )));
        }
        if self.domain.len() != n {
            return Err(Error::InvalidSpec("one domain interval per parameter".into()));
        }
        for (i, (a, b)) in self.domain.iter().enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::InvalidSpec(format!(
                    "empty domain [{a}, {b}] for `{}`",
                    self.param_names[i]
                )));
            }
        }
        let mut missing = None;
        for c in &self.components {
            c.visit_names(&mut |name| {
                if self.constant(name).is_none() && self.table(name).is_none() && missing.is_none() {
                    missing = Some(name.to_string());
                }
            });
            let mut bad = None;
            check_params(c, n, &mut bad);
            if let Some(i) = bad {
                return Err(Error::InvalidSpec(format!("parameter index {i} out of range")));
            }
        }
        if let Some(m) = missing {
            return Err(Error::InvalidSpec(format!("undeclared name `{m}`")));
        }
        Ok(())
    }

    /// Whether `point` lies in the closed parameter box.
    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.n_params()
            && point
                .iter()
                .zip(&self.domain)
                .all(|(x, (a, b))| *x >= *a && *x <= *b)
    }

    /// Evaluates `phi` only.
    pub fn eval_point(&self, point: &[f64]) -> Result<MinkowskiVector> {
        self.check_point(point)?;
        let mut out = Vec::with_capacity(self.ambient_dim);
        for c in &self.components {
            let v = eval(c, point, self).map_err(|f| self.domain_error(f.node, point, f.msg))?;
            out.push(v);
        }
        Ok(MinkowskiVector(out))
    }

    fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.n_params() {
            return Err(Error::Dimension {
                expected: self.n_params(),
                got: point.len(),
            });
        }
        if !self.contains(point) {
            return Err(Error::Domain {
                expr: "parameter domain".into(),
                point: point.to_vec(),
                msg: "point outside the declared parameter domain".into(),
            });
        }
        Ok(())
    }

    fn domain_error(&self, node: &Expr, point: &[f64], msg: String) -> Error {
        Error::Domain {
            expr: node.display(&self.param_names).to_string(),
            point: point.to_vec(),
            msg,
        }
    }

    /// Pretty-prints the spec back to DSL text that re-parses to an
    /// equivalent spec.
    pub fn to_dsl(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "params {};", self.param_names.join(", "));
        let _ = writeln!(s, "ambient {};", self.ambient_dim);
        if self.mode == Mode::Cone {
            let _ = writeln!(s, "mode cone;");
        }
        for (name, v) in &self.constants {
            let _ = writeln!(s, "const {name} = {};", fmt_signed(*v));
        }
        for (name, (a, b)) in self.param_names.iter().zip(&self.domain) {
            let _ = writeln!(s, "domain {name} in [{}, {}];", fmt_signed(*a), fmt_signed(*b));
        }
        for (name, t) in &self.tables {
            let _ = writeln!(s, "table {name} = [");
            let rows = t.rows();
            for (i, r) in rows.iter().enumerate() {
                let sep = if i + 1 == rows.len() { "" } else { ";" };
                let _ = writeln!(
                    s,
                    "  {}, {}, {}, {}{sep}",
                    fmt_signed(r[0]),
                    fmt_signed(r[1]),
                    fmt_signed(r[2]),
                    fmt_signed(r[3])
                );
            }
            let _ = writeln!(s, "];");
        }
        let _ = writeln!(s, "map [");
        for (i, c) in self.components.iter().enumerate() {
            let sep = if i + 1 == self.components.len() { "" } else { "," };
            let _ = writeln!(s, "  {}{sep}", c.display(&self.param_names));
        }
        let _ = writeln!(s, "];");
        s
    }
}

fn fmt_signed(x: f64) -> String {
    if x.is_sign_negative() {
        format!("-{}", fmt_num(-x))
    } else {
        fmt_num(x)
    }
}

fn check_params(e: &Expr, n: usize, bad: &mut Option<usize>) {
    match e {
        Expr::Param(i) if *i >= n => *bad = Some(*i),
        Expr::Unary(_, a) | Expr::Pow(a, _) | Expr::Table(_, a) => check_params(a, n, bad),
        Expr::Binary(_, a, b) => {
            check_params(a, n, bad);
            check_params(b, n, bad);
        }
        _ => {}
    }
}

struct ConstEnv<'a> {
    consts: &'a [(String, f64)],
}

impl Names for ConstEnv<'_> {
    fn constant(&self, name: &str) -> Option<f64> {
        self.consts
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
            .or_else(|| PREDECLARED.iter().find(|(n, _)| *n == name).map(|(_, v)| *v))
    }
    fn table(&self, _: &str) -> Option<&Table> {
        None
    }
}

/// Resolves and evaluates a parameter-free expression.
fn const_value(raw: &RawExpr, consts: &[(String, f64)]) -> Result<f64> {
    let lookup = |name: &str| {
        let env = ConstEnv { consts };
        env.constant(name).map(|_| Binding::Const)
    };
    let e = resolve(raw, &lookup)?;
    // `eval` needs a prototype scalar; bind a dummy parameter that is never read.
    eval(&e, &[0.0], &ConstEnv { consts }).map_err(|f| Error::Domain {
        expr: f.node.display(&[]).to_string(),
        point: vec![],
        msg: f.msg,
    })
}

fn duplicate(pos: Pos, what: &str, name: &str) -> Error {
    Error::Syntax {
        pos,
        msg: format!("{what} `{name}` already declared"),
    }
}

fn missing(what: &str) -> Error {
    Error::InvalidSpec(format!("missing `{what}` statement"))
}

/// Parses DSL text into a validated [`ImmersionSpec`].
pub fn parse_immersion_spec(text: &str) -> Result<ImmersionSpec> {
    let stmts = parse_statements(text)?;

    let mut params: Option<Vec<String>> = None;
    let mut ambient = None;
    let mut mode = None;
    let mut constants: Vec<(String, f64)> = Vec::new();
    let mut tables: Vec<(String, Table)> = Vec::new();
    let mut domains: Vec<(String, Pos, RawExpr, RawExpr)> = Vec::new();
    let mut map: Option<(Vec<RawExpr>, Pos)> = None;

    let taken = |name: &str,
                 params: &Option<Vec<String>>,
                 constants: &[(String, f64)],
                 tables: &[(String, Table)]| {
        PREDECLARED.iter().any(|(n, _)| *n == name)
            || super::ast::UnaryFn::from_name(name).is_some()
            || params.as_ref().is_some_and(|p| p.iter().any(|n| n == name))
            || constants.iter().any(|(n, _)| n == name)
            || tables.iter().any(|(n, _)| n == name)
    };

    for st in stmts {
        match st {
            Stmt::Params(names) => {
                if params.is_some() {
                    return Err(duplicate(names[0].1, "statement", "params"));
                }
                let mut list: Vec<String> = Vec::new();
                for (n, p) in names {
                    if list.contains(&n) || taken(&n, &None, &constants, &tables) {
                        return Err(duplicate(p, "name", &n));
                    }
                    list.push(n);
                }
                params = Some(list);
            }
            Stmt::Ambient(k, p) => {
                if ambient.is_some() {
                    return Err(duplicate(p, "statement", "ambient"));
                }
                ambient = Some(k);
            }
            Stmt::Mode(m, p) => {
                if mode.is_some() {
                    return Err(duplicate(p, "statement", "mode"));
                }
                mode = Some(if m == "cone" { Mode::Cone } else { Mode::Cylinder });
            }
            Stmt::Const(name, p, raw) => {
                if taken(&name, &params, &constants, &tables) {
                    return Err(duplicate(p, "name", &name));
                }
                let v = const_value(&raw, &constants)?;
                constants.push((name, v));
            }
            Stmt::Domain(name, p, a, b) => {
                if domains.iter().any(|d| d.0 == name) {
                    return Err(duplicate(p, "domain for", &name));
                }
                domains.push((name, p, a, b));
            }
            Stmt::Table(name, p, rows) => {
                if taken(&name, &params, &constants, &tables) {
                    return Err(duplicate(p, "name", &name));
                }
                let mut vals = Vec::with_capacity(rows.len());
                for r in &rows {
                    let mut row = [0.0; 4];
                    for (slot, raw) in row.iter_mut().zip(r) {
                        *slot = const_value(raw, &constants)?;
                    }
                    vals.push(row);
                }
                let t = Table::new(vals).map_err(|m| Error::Syntax { pos: p, msg: m })?;
                tables.push((name, t));
            }
            Stmt::Map(comps, p) => {
                if map.is_some() {
                    return Err(duplicate(p, "statement", "map"));
                }
                map = Some((comps, p));
            }
        }
    }

    let params = params.ok_or_else(|| missing("params"))?;
    let ambient = ambient.ok_or_else(|| missing("ambient"))?;
    let (raw_map, _) = map.ok_or_else(|| missing("map"))?;

    let lookup = |name: &str| -> Option<Binding> {
        if let Some(i) = params.iter().position(|p| p == name) {
            return Some(Binding::Param(i));
        }
        if constants.iter().any(|(n, _)| n == name) || PREDECLARED.iter().any(|(n, _)| *n == name) {
            return Some(Binding::Const);
        }
        if tables.iter().any(|(n, _)| n == name) {
            return Some(Binding::Table);
        }
        None
    };
    let components = raw_map
        .iter()
        .map(|r| resolve(r, &lookup))
        .collect::<Result<Vec<_>>>()?;

    let mut domain = vec![DEFAULT_DOMAIN; params.len()];
    for (name, p, a, b) in &domains {
        let Some(i) = params.iter().position(|q| q == name) else {
            return Err(Error::Undeclared {
                pos: *p,
                name: name.clone(),
            });
        };
        domain[i] = (const_value(a, &constants)?, const_value(b, &constants)?);
    }

    let spec = ImmersionSpec {
        param_names: params,
        ambient_dim: ambient,
        mode: mode.unwrap_or_default(),
        components,
        domain,
        constants,
        tables,
    };
    spec.validate()?;
    Ok(spec)
}

/// Evaluates value, gradient and Hessian of every component at `point`.
pub fn eval_jet2(spec: &ImmersionSpec, point: &[f64]) -> Result<Jet2> {
    spec.check_point(point)?;
    let n = spec.n_params();
    let vars: Vec<Taylor2> = point
        .iter()
        .enumerate()
        .map(|(i, &x)| Taylor2::variable(n, i, x))
        .collect();
    let mut value = Vec::with_capacity(spec.ambient_dim);
    let mut first = Vec::with_capacity(spec.ambient_dim);
    let mut second = Vec::with_capacity(spec.ambient_dim);
    for c in &spec.components {
        let t = eval(c, &vars, spec).map_err(|f| spec.domain_error(f.node, point, f.msg))?;
        value.push(t.v);
        first.push(t.g.clone());
        second.push(
            (0..n)
                .map(|j| (0..n).map(|k| t.h[packed_index(n, j, k)]).collect())
                .collect(),
        );
    }
    Ok(Jet2 {
        value: MinkowskiVector(value),
        first,
        second,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_spec() {
        let s = parse_immersion_spec("params s,t; ambient 4; map [s*cos(t), s*sin(t), s, s]").unwrap();
        assert_eq!((s.n_params(), s.ambient_dim), (2, 4));
        assert_eq!(s.domain, vec![DEFAULT_DOMAIN; 2]);
    }

    #[test]
    fn undeclared_component_name() {
        let e = parse_immersion_spec("params s; ambient 3; map [cosh(s), sinh(s), q]").unwrap_err();
        assert_eq!(
            e,
            Error::Undeclared {
                pos: Pos { line: 1, col: 45 },
                name: "q".into()
            }
        );
    }

    #[test]
    fn ambient_rule_enforced() {
        let e = parse_immersion_spec("params s, t; ambient 3; map [s, t, s]").unwrap_err();
        assert!(matches!(e, Error::DimensionRule(_)));
        let e = parse_immersion_spec("params s; ambient 3; map [s, s]").unwrap_err();
        assert!(matches!(e, Error::InvalidSpec(_)));
    }

    #[test]
    fn constants_domains_tables_round_trip() {
        let src = "
            # a comment
            params s, t;
            ambient 4;
            const c1 = 1 + 1/2;
            const w = 2*c1;
            domain s in [0, 2*pi];
            table f = [0, 1, 0, 0; 1, 2, 1, 0; 3, 0, -1, 0.5];
            map [f(s/3) * w, c1 * cos(t), c1 * sin(t), s]
        ";
        let a = parse_immersion_spec(src).unwrap();
        assert_eq!(a.constants, vec![("c1".into(), 1.5), ("w".into(), 3.0)]);
        assert_eq!(a.domain[0], (0.0, 2.0 * std::f64::consts::PI));
        let b = parse_immersion_spec(&a.to_dsl()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn redeclaration_rejected() {
        let e = parse_immersion_spec("params s, s; ambient 3; map [s, s, s]").unwrap_err();
        assert!(matches!(e, Error::Syntax { .. }));
        let e = parse_immersion_spec("params s; const pi = 3; ambient 3; map [s, s, s]").unwrap_err();
        assert!(matches!(e, Error::Syntax { .. }));
    }

    #[test]
    fn jet_of_square_and_domain_error() {
        let s = parse_immersion_spec("params s; ambient 3; domain s in [-5, 5]; map [s^2, sqrt(s), s]").unwrap();
        let e = eval_jet2(&s, &[-1.0]).unwrap_err();
        match e {
            Error::Domain { expr, msg, .. } => {
                assert_eq!(expr, "sqrt(s)");
                assert!(msg.contains("sqrt"));
            }
            e => panic!("{e:?}"),
        }
        let j = eval_jet2(&s, &[3.0]).unwrap();
        assert_eq!((j.value[0], j.first[0][0], j.second[0][0][0]), (9.0, 6.0, 2.0));
        assert!(eval_jet2(&s, &[6.0]).is_err());
    }
}
