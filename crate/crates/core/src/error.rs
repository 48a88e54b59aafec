use thiserror::Error;

/// Position of a token in DSL source text, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl std::fmt::Display for Pos {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("{0}")]
    DimensionRule(String),

    #[error("degenerate subspace: Gram matrix is not positive definite (pivot {pivot:.3e})")]
    DegenerateSubspace { pivot: f64 },

    #[error("degenerate normal bundle: no seed vector pairs with the null normal")]
    DegenerateNormal,

    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },

    #[error("{pos}: undeclared identifier `{name}`")]
    Undeclared { pos: Pos, name: String },

    #[error("{pos}: `{name}` takes {expected} argument(s), got {got}")]
    Arity {
        pos: Pos,
        name: String,
        expected: usize,
        got: usize,
    },

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("domain error in `{expr}` at {point:?}: {msg}")]
    Domain {
        expr: String,
        point: Vec<f64>,
        msg: String,
    },

    #[error("stencil for parameter {param} at {value} leaves the domain [{lo}, {hi}]")]
    Stencil {
        param: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("point is not admissible: {0}")]
    NotAdmissible(String),

    #[error("vector is not normal to the submanifold (max tangential pairing {0:.3e})")]
    NotNormal(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("profile reaches zero at s = {s}")]
    BlowDown { s: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
