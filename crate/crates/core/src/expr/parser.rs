//! Recursive-descent parser for the immersion DSL.
//!
//! Parsing happens in two phases: the token stream is first turned into a
//! positioned raw tree, then identifiers are resolved against declarations
//! so that undeclared names and arity mistakes point at the offending token.

use super::ast::{BinOp, Expr, UnaryFn};
use super::lexer::{tokenize, Tok, Token};
use crate::error::{Error, Pos, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum RawKind {
    Num(f64),
    Ident(String),
    Call(String, Vec<RawExpr>),
    Neg(Box<RawExpr>),
    Binary(BinOp, Box<RawExpr>, Box<RawExpr>),
    Pow(Box<RawExpr>, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawExpr {
    pub kind: RawKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Params(Vec<(String, Pos)>),
    Ambient(usize, Pos),
    Mode(String, Pos),
    Const(String, Pos, RawExpr),
    Domain(String, Pos, RawExpr, RawExpr),
    Table(String, Pos, Vec<[RawExpr; 4]>),
    Map(Vec<RawExpr>, Pos),
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.i]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        let t = self.peek();
        Err(Error::Syntax {
            pos: t.pos,
            msg: format!("{}, found {}", msg.into(), t.tok.describe()),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos> {
        if self.peek().tok == tok {
            Ok(self.next().pos)
        } else {
            self.error(format!("expected {}", tok.describe()))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos)> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((s, self.next().pos))
            }
            _ => self.error(format!("expected {what}")),
        }
    }

    /// Statement terminator: `;`, optional before end of input.
    fn end_stmt(&mut self) -> Result<()> {
        match self.peek().tok {
            Tok::Semi => {
                self.next();
                Ok(())
            }
            Tok::Eof => Ok(()),
            _ => self.error("expected `;`"),
        }
    }

    fn program(&mut self) -> Result<Vec<Stmt>> {
        let mut out = Vec::new();
        while self.peek().tok != Tok::Eof {
            if self.peek().tok == Tok::Semi {
                self.next();
                continue;
            }
            out.push(self.statement()?);
        }
        Ok(out)
    }

    fn statement(&mut self) -> Result<Stmt> {
        let (kw, pos) = self.ident("a statement keyword")?;
        let stmt = match kw.as_str() {
            "params" => {
                let mut names = vec![self.ident("a parameter name")?];
                while self.peek().tok == Tok::Comma {
                    self.next();
                    names.push(self.ident("a parameter name")?);
                }
                Stmt::Params(names)
            }
            "ambient" => match self.peek().tok {
                Tok::Num(x) if x >= 1.0 && x.fract() == 0.0 && x < 1e6 => {
                    let p = self.next().pos;
                    Stmt::Ambient(x as usize, p)
                }
                _ => return self.error("expected a positive integer ambient dimension"),
            },
            "mode" => {
                let (m, p) = self.ident("`cylinder` or `cone`")?;
                if m != "cylinder" && m != "cone" {
                    return Err(Error::Syntax {
                        pos: p,
                        msg: format!("expected `cylinder` or `cone`, found identifier `{m}`"),
                    });
                }
                Stmt::Mode(m, p)
            }
            "const" => {
                let (name, p) = self.ident("a constant name")?;
                self.expect(Tok::Eq)?;
                Stmt::Const(name, p, self.expr()?)
            }
            "domain" => {
                let (name, p) = self.ident("a parameter name")?;
                match self.peek().tok {
                    Tok::Ident(ref s) if s == "in" => {
                        self.next();
                    }
                    _ => return self.error("expected `in`"),
                }
                self.expect(Tok::LBracket)?;
                let a = self.expr()?;
                self.expect(Tok::Comma)?;
                let b = self.expr()?;
                self.expect(Tok::RBracket)?;
                Stmt::Domain(name, p, a, b)
            }
            "table" => {
                let (name, p) = self.ident("a table name")?;
                self.expect(Tok::Eq)?;
                self.expect(Tok::LBracket)?;
                let mut rows = Vec::new();
                loop {
                    let a = self.expr()?;
                    self.expect(Tok::Comma)?;
                    let b = self.expr()?;
                    self.expect(Tok::Comma)?;
                    let c = self.expr()?;
                    self.expect(Tok::Comma)?;
                    let d = self.expr()?;
                    rows.push([a, b, c, d]);
                    match self.peek().tok {
                        Tok::Semi => {
                            self.next();
                            if self.peek().tok == Tok::RBracket {
                                self.next();
                                break;
                            }
                        }
                        Tok::RBracket => {
                            self.next();
                            break;
                        }
                        _ => return self.error("expected `;` or `]` in table"),
                    }
                }
                Stmt::Table(name, p, rows)
            }
            "map" => {
                self.expect(Tok::LBracket)?;
                let mut comps = vec![self.expr()?];
                while self.peek().tok == Tok::Comma {
                    self.next();
                    comps.push(self.expr()?);
                }
                self.expect(Tok::RBracket)?;
                Stmt::Map(comps, pos)
            }
            other => {
                return Err(Error::Syntax {
                    pos,
                    msg: format!(
                        "unknown statement `{other}` (expected params, ambient, mode, const, domain, table or map)"
                    ),
                })
            }
        };
        self.end_stmt()?;
        Ok(stmt)
    }

    fn expr(&mut self) -> Result<RawExpr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let pos = self.next().pos;
            let rhs = self.term()?;
            lhs = RawExpr {
                kind: RawKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
    }

    fn term(&mut self) -> Result<RawExpr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            let pos = self.next().pos;
            let rhs = self.unary()?;
            lhs = RawExpr {
                kind: RawKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
    }

    fn unary(&mut self) -> Result<RawExpr> {
        match self.peek().tok {
            Tok::Minus => {
                let pos = self.next().pos;
                let a = self.unary()?;
                Ok(RawExpr {
                    kind: RawKind::Neg(Box::new(a)),
                    pos,
                })
            }
            Tok::Plus => {
                self.next();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RawExpr> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        let pos = self.next().pos;
        let p = self.exponent()?;
        if self.peek().tok == Tok::Caret {
            return self.error("chained powers need parentheses");
        }
        Ok(RawExpr {
            kind: RawKind::Pow(Box::new(base), p),
            pos,
        })
    }

    /// A literal exponent: `2`, `-0.5`, `(-0.5)`.
    fn exponent(&mut self) -> Result<f64> {
        let paren = self.peek().tok == Tok::LParen;
        if paren {
            self.next();
        }
        let sign = match self.peek().tok {
            Tok::Minus => {
                self.next();
                -1.0
            }
            Tok::Plus => {
                self.next();
                1.0
            }
            _ => 1.0,
        };
        let x = match self.peek().tok {
            Tok::Num(x) => {
                self.next();
                x
            }
            _ => return self.error("expected a literal exponent"),
        };
        if paren {
            self.expect(Tok::RParen)?;
        }
        Ok(sign * x)
    }

    fn atom(&mut self) -> Result<RawExpr> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Num(x) => {
                self.next();
                Ok(RawExpr {
                    kind: RawKind::Num(x),
                    pos: t.pos,
                })
            }
            Tok::Ident(name) => {
                self.next();
                if self.peek().tok == Tok::LParen {
                    self.next();
                    let mut args = Vec::new();
                    if self.peek().tok != Tok::RParen {
                        args.push(self.expr()?);
                        while self.peek().tok == Tok::Comma {
                            self.next();
                            args.push(self.expr()?);
                        }
                    }
                    self.expect(Tok::RParen)?;
                    Ok(RawExpr {
                        kind: RawKind::Call(name, args),
                        pos: t.pos,
                    })
                } else {
                    Ok(RawExpr {
                        kind: RawKind::Ident(name),
                        pos: t.pos,
                    })
                }
            }
            Tok::LParen => {
                self.next();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => self.error("expected an operand (number, identifier or `(`)"),
        }
    }
}

/// Phase one: text to positioned statements.
pub fn parse_statements(src: &str) -> Result<Vec<Stmt>> {
    let toks = tokenize(src)?;
    Parser { toks, i: 0 }.program()
}

/// Phase one for a lone expression.
pub fn parse_raw_expr(src: &str) -> Result<RawExpr> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, i: 0 };
    let e = p.expr()?;
    if p.peek().tok != Tok::Eof {
        return p.error("expected end of expression");
    }
    Ok(e)
}

/// What an identifier refers to during resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Binding {
    Param(usize),
    Const,
    Table,
}

/// Phase two: resolves identifiers through `lookup`.
pub fn resolve(e: &RawExpr, lookup: &dyn Fn(&str) -> Option<Binding>) -> Result<Expr> {
    Ok(match &e.kind {
        RawKind::Num(x) => Expr::Num(*x),
        RawKind::Ident(name) => {
            if UnaryFn::from_name(name).is_some() {
                return Err(Error::Arity {
                    pos: e.pos,
                    name: name.clone(),
                    expected: 1,
                    got: 0,
                });
            }
            match lookup(name) {
                Some(Binding::Param(i)) => Expr::Param(i),
                Some(Binding::Const) => Expr::Named(name.clone()),
                Some(Binding::Table) => {
                    return Err(Error::Arity {
                        pos: e.pos,
                        name: name.clone(),
                        expected: 1,
                        got: 0,
                    })
                }
                None => {
                    return Err(Error::Undeclared {
                        pos: e.pos,
                        name: name.clone(),
                    })
                }
            }
        }
        RawKind::Call(name, args) => {
            let f = UnaryFn::from_name(name);
            let binding = lookup(name);
            let is_fn = f.is_some() || binding == Some(Binding::Table);
            if !is_fn {
                return Err(match binding {
                    None => Error::Undeclared {
                        pos: e.pos,
                        name: name.clone(),
                    },
                    Some(_) => Error::Syntax {
                        pos: e.pos,
                        msg: format!("`{name}` is not a function"),
                    },
                });
            }
            if args.len() != 1 {
                return Err(Error::Arity {
                    pos: e.pos,
                    name: name.clone(),
                    expected: 1,
                    got: args.len(),
                });
            }
            let a = resolve(&args[0], lookup)?;
            match f {
                Some(f) => Expr::unary(f, a),
                None => Expr::table(name, a),
            }
        }
        RawKind::Neg(a) => -resolve(a, lookup)?,
        RawKind::Binary(op, a, b) => Expr::binary(*op, resolve(a, lookup)?, resolve(b, lookup)?),
        RawKind::Pow(a, p) => resolve(a, lookup)?.powf(*p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(i: usize) -> Option<Binding> {
        Some(Binding::Param(i))
    }

    fn lk(name: &str) -> Option<Binding> {
        match name {
            "s" => st(0),
            "t" => st(1),
            "pi" => Some(Binding::Const),
            _ => None,
        }
    }

    fn show(src: &str) -> String {
        let e = resolve(&parse_raw_expr(src).unwrap(), &lk).unwrap();
        e.display(&["s".into(), "t".into()]).to_string()
    }

    #[test]
    fn precedence() {
        assert_eq!(show("-s^2"), "-s^2");
        assert_eq!(show("(-s)^2"), "(-s)^2");
        assert_eq!(show("s - t - 1"), "s - t - 1");
        assert_eq!(show("s - (t - 1)"), "s - (t - 1)");
        assert_eq!(show("s / t * 2"), "s / t * 2");
        assert_eq!(show("s ** -0.5"), "s^(-0.5)");
        assert_eq!(show("2*pi*s"), "2 * pi * s");
    }

    #[test]
    fn missing_operand_points_at_bracket() {
        let err = parse_statements("map [s+]").unwrap_err();
        match err {
            Error::Syntax { pos, msg } => {
                assert_eq!(pos, Pos { line: 1, col: 8 });
                assert!(msg.contains("operand"), "{msg}");
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn undeclared_and_arity() {
        let e = resolve(&parse_raw_expr("s + q").unwrap(), &lk).unwrap_err();
        assert_eq!(
            e,
            Error::Undeclared {
                pos: Pos { line: 1, col: 5 },
                name: "q".into()
            }
        );
        let e = resolve(&parse_raw_expr("sin(s, t)").unwrap(), &lk).unwrap_err();
        assert!(matches!(e, Error::Arity { expected: 1, got: 2, .. }));
        let e = resolve(&parse_raw_expr("cos").unwrap(), &lk).unwrap_err();
        assert!(matches!(e, Error::Arity { got: 0, .. }));
    }

    #[test]
    fn chained_power_rejected() {
        assert!(parse_raw_expr("s^2^3").is_err());
        assert!(parse_raw_expr("s^t").is_err());
    }
}
