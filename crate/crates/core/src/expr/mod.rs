//! Immersion DSL: parsing, printing and exact 2-jet evaluation.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod spec;
pub mod table;
pub mod taylor;

pub use ast::{BinOp, Expr, UnaryFn};
pub use spec::{eval_jet2, parse_immersion_spec, ImmersionSpec, Jet2, JetSource, Mode};
pub use table::Table;
pub use taylor::{Scalar, Taylor2};
