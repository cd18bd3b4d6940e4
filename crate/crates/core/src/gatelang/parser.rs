use num_complex::Complex;

use super::ast::{GateExpr, NamedGate, ParamGate};
use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, ParseErrorKind};

pub fn parse(text: &str) -> Result<GateExpr, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let expr = p.expr()?;
    if let Some(t) = p.tokens.get(p.pos) {
        return Err(ParseError::new(
            ParseErrorKind::UnexpectedToken {
                found: t.tok.describe(),
                expected: "`*`, `x` or end of input",
            },
            t.offset,
        ));
    }
    Ok(expr)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self, expected: &'static str) -> Result<Token, ParseError> {
        match self.tokens.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => Err(ParseError::new(
                ParseErrorKind::UnexpectedEnd { expected },
                self.end,
            )),
        }
    }

    fn expect(&mut self, want: Tok, expected: &'static str) -> Result<(), ParseError> {
        let t = self.next(expected)?;
        if t.tok != want {
            return Err(ParseError::new(
                ParseErrorKind::UnexpectedToken {
                    found: t.tok.describe(),
                    expected,
                },
                t.offset,
            ));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<GateExpr, ParseError> {
        let mut lhs = self.tensor_term()?;
        while self.peek() == Some(&Tok::Tensor) {
            self.pos += 1;
            lhs = GateExpr::tensor(lhs, self.tensor_term()?);
        }
        Ok(lhs)
    }

    fn tensor_term(&mut self) -> Result<GateExpr, ParseError> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            lhs = GateExpr::product(lhs, self.factor()?);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<GateExpr, ParseError> {
        let atom = self.atom()?;
        if self.peek() == Some(&Tok::Prime) {
            self.pos += 1;
            return Ok(GateExpr::adjoint(atom));
        }
        Ok(atom)
    }

    fn atom(&mut self) -> Result<GateExpr, ParseError> {
        const WHAT: &str = "a gate name, matrix literal or `(`";
        let t = self.next(WHAT)?;
        match t.tok {
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::LBracket => self.matrix(t.offset),
            Tok::Name(name) => self.gate(name, t.offset),
            other => Err(ParseError::new(
                ParseErrorKind::UnexpectedToken {
                    found: other.describe(),
                    expected: WHAT,
                },
                t.offset,
            )),
        }
    }

    fn gate(&mut self, name: String, offset: usize) -> Result<GateExpr, ParseError> {
        let args = if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            Some(self.arguments()?)
        } else {
            None
        };
        let found = args.as_ref().map_or(0, Vec::len);
        if let Some(g) = NamedGate::from_name(&name) {
            if args.is_some() {
                return Err(ParseError::new(
                    ParseErrorKind::Arity {
                        name,
                        expected: 0,
                        found,
                    },
                    offset,
                ));
            }
            return Ok(GateExpr::Named(g));
        }
        if let Some(g) = ParamGate::from_name(&name) {
            return match args.as_deref() {
                Some([theta]) => Ok(GateExpr::Param(g, *theta)),
                _ => Err(ParseError::new(
                    ParseErrorKind::Arity {
                        name,
                        expected: 1,
                        found,
                    },
                    offset,
                )),
            };
        }
        Err(ParseError::new(ParseErrorKind::UnknownGate(name), offset))
    }

    /// After `(`: a comma-separated list of real numbers and the closing `)`.
    fn arguments(&mut self) -> Result<Vec<f64>, ParseError> {
        let mut out = Vec::new();
        if self.peek() == Some(&Tok::RParen) {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            let t = self.next("a number")?;
            match t.tok {
                Tok::Number(x) => out.push(x),
                other => {
                    return Err(ParseError::new(
                        ParseErrorKind::UnexpectedToken {
                            found: other.describe(),
                            expected: "a real number",
                        },
                        t.offset,
                    ))
                }
            }
            let t = self.next("`,` or `)`")?;
            match t.tok {
                Tok::Comma => continue,
                Tok::RParen => return Ok(out),
                other => {
                    return Err(ParseError::new(
                        ParseErrorKind::UnexpectedToken {
                            found: other.describe(),
                            expected: "`,` or `)`",
                        },
                        t.offset,
                    ))
                }
            }
        }
    }

    /// After the outer `[`.
    fn matrix(&mut self, offset: usize) -> Result<GateExpr, ParseError> {
        let mut rows = Vec::new();
        loop {
            self.expect(Tok::LBracket, "`[` starting a matrix row")?;
            let mut row = Vec::new();
            loop {
                let t = self.next("a matrix entry")?;
                match t.tok {
                    Tok::Number(x) => row.push(Complex::new(x, 0.0)),
                    Tok::Complex(z) => row.push(z),
                    other => {
                        return Err(ParseError::new(
                            ParseErrorKind::UnexpectedToken {
                                found: other.describe(),
                                expected: "a matrix entry",
                            },
                            t.offset,
                        ))
                    }
                }
                let t = self.next("`,` or `]`")?;
                match t.tok {
                    Tok::Comma => continue,
                    Tok::RBracket => break,
                    other => {
                        return Err(ParseError::new(
                            ParseErrorKind::UnexpectedToken {
                                found: other.describe(),
                                expected: "`,` or `]`",
                            },
                            t.offset,
                        ))
                    }
                }
            }
            rows.push(row);
            let t = self.next("`,` or `]`")?;
            match t.tok {
                Tok::Comma => continue,
                Tok::RBracket => break,
                other => {
                    return Err(ParseError::new(
                        ParseErrorKind::UnexpectedToken {
                            found: other.describe(),
                            expected: "`,` or `]`",
                        },
                        t.offset,
                    ))
                }
            }
        }
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(ParseError::new(ParseErrorKind::NotSquare, offset));
        }
        Ok(GateExpr::Matrix(rows))
    }
}
