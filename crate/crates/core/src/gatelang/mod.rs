//! The gate-expression language used to name the controlled unitary.
//!
//! ```text
//! expr        := tensor_term ('x' tensor_term)*
//! tensor_term := factor ('*' factor)*
//! factor      := atom ["'"]
//! atom        := NAME | NAME '(' NUMBER ')' | MATRIX | '(' expr ')'
//! ```
//!
//! `A * B` is the matrix product in written order, so `B` acts first.
//! Parameters are in radians.

use std::fmt;

use num_complex::Complex;
use thiserror::Error;

mod ast;
mod lexer;
mod parser;

pub use ast::{GateExpr, NamedGate, ParamGate};
pub use parser::parse;

use crate::qsim::{gates, kron, QsimError, Unitary};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    BadNumber(String),
    UnexpectedEnd {
        expected: &'static str,
    },
    UnexpectedToken {
        found: String,
        expected: &'static str,
    },
    UnknownGate(String),
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    NotSquare,
}

/// Syntax error with the byte offset where it was detected.
#[derive(Clone, Debug, PartialEq, Error)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

impl ParseError {
    pub(crate) fn new(kind: ParseErrorKind, offset: usize) -> Self {
        Self { kind, offset }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = self.offset;
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => {
                write!(f, "unexpected character {c:?} at offset {at}")
            }
            ParseErrorKind::BadNumber(s) => write!(f, "malformed number `{s}` at offset {at}"),
            ParseErrorKind::UnexpectedEnd { expected } => {
                write!(
                    f,
                    "unexpected end of input at offset {at} (expected {expected})"
                )
            }
            ParseErrorKind::UnexpectedToken { found, expected } => {
                write!(f, "unexpected {found} at offset {at} (expected {expected})")
            }
            ParseErrorKind::UnknownGate(name) => write!(f, "unknown gate `{name}` at offset {at}"),
            ParseErrorKind::Arity {
                name,
                expected,
                found,
            } => write!(
                f,
                "gate `{name}` takes {expected} parameter(s), got {found} at offset {at}"
            ),
            ParseErrorKind::NotSquare => write!(f, "matrix literal is not square at offset {at}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvalError {
    #[error("matrix literal rejected: {0}")]
    Literal(QsimError),
    #[error("cannot multiply {left}x{left} by {right}x{right} matrices")]
    ProductMismatch { left: usize, right: usize },
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum GateError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("evaluation error: {0}")]
    Eval(#[from] EvalError),
}

/// Evaluates an expression under the gate conventions in [`crate::qsim::gates`].
pub fn evaluate<T: Real>(expr: &GateExpr) -> Result<Unitary<T>, EvalError> {
    Ok(match expr {
        GateExpr::Named(g) => match g {
            NamedGate::I => gates::id(),
            NamedGate::X => gates::x(),
            NamedGate::Y => gates::y(),
            NamedGate::Z => gates::z(),
            NamedGate::H => gates::h(),
            NamedGate::S => gates::s(),
            NamedGate::T => gates::t(),
        },
        GateExpr::Param(g, theta) => {
            let theta = T::lit(*theta);
            match g {
                ParamGate::Rx => gates::rx(theta),
                ParamGate::Ry => gates::ry(theta),
                ParamGate::Rz => gates::rz(theta),
                ParamGate::Phase => gates::phase(theta),
            }
        }
        GateExpr::Matrix(rows) => Unitary::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|z| Complex::new(T::lit(z.re), T::lit(z.im)))
                        .collect()
                })
                .collect(),
        )
        .map_err(EvalError::Literal)?,
        GateExpr::Product(a, b) => {
            let (a, b) = (evaluate::<T>(a)?, evaluate::<T>(b)?);
            if a.dim() != b.dim() {
                return Err(EvalError::ProductMismatch {
                    left: a.dim(),
                    right: b.dim(),
                });
            }
            a.mul(&b)?
        }
        GateExpr::Tensor(a, b) => kron(&evaluate::<T>(a)?, &evaluate::<T>(b)?)?,
        GateExpr::Adjoint(a) => evaluate::<T>(a)?.adjoint(),
    })
}

/// Parses and evaluates in one step.
pub fn parse_gate<T: Real>(text: &str) -> Result<Unitary<T>, GateError> {
    Ok(evaluate(&parse(text)?)?)
}

/// Matrix-literal expression reproducing `u` exactly in `f64`.
pub fn literal_of<T: Real>(u: &Unitary<T>) -> GateExpr {
    GateExpr::Matrix(
        u.rows()
            .map(|r| {
                r.iter()
                    .map(|z| Complex::new(z.re.as_f64(), z.im.as_f64()))
                    .collect()
            })
            .collect(),
    )
}
