use num_complex::Complex;

use super::{ParseError, ParseErrorKind};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Name(String),
    Number(f64),
    /// Any literal with an imaginary part, e.g. `2i`, `1.0-0.5i`, `-i`.
    Complex(Complex<f64>),
    Star,
    Tensor,
    Prime,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Name(n) => format!("name `{n}`"),
            Tok::Number(x) => format!("number `{x}`"),
            Tok::Complex(z) => format!("complex literal `{z}`"),
            Tok::Star => "`*`".into(),
            Tok::Tensor => "`x`".into(),
            Tok::Prime => "`'`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub offset: usize,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    Lexer {
        src: src.as_bytes(),
        pos: 0,
    }
    .run()
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

fn is_ident_char(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

impl Lexer<'_> {
    fn peek_at(&self, i: usize) -> Option<u8> {
        self.src.get(i).copied()
    }

    fn run(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        while let Some(b) = self.peek_at(self.pos) {
            let start = self.pos;
            let simple = match b {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.pos += 1;
                    continue;
                }
                b'*' => Some(Tok::Star),
                b'\'' => Some(Tok::Prime),
                b'(' => Some(Tok::LParen),
                b')' => Some(Tok::RParen),
                b'[' => Some(Tok::LBracket),
                b']' => Some(Tok::RBracket),
                b',' => Some(Tok::Comma),
                _ => None,
            };
            let tok = if let Some(t) = simple {
                self.pos += 1;
                t
            } else if b.is_ascii_digit() || b == b'.' || b == b'+' || b == b'-' {
                self.literal()?
            } else if b.is_ascii_alphabetic() || b == b'_' {
                while self.peek_at(self.pos).is_some_and(is_ident_char) {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match word {
                    "x" => Tok::Tensor,
                    "i" => Tok::Complex(Complex::new(0.0, 1.0)),
                    _ => Tok::Name(word.to_string()),
                }
            } else {
                let ch = std::str::from_utf8(&self.src[start..])
                    .ok()
                    .and_then(|s| s.chars().next())
                    .unwrap_or('?');
                return Err(ParseError::new(ParseErrorKind::UnexpectedChar(ch), start));
            };
            out.push(Token { tok, offset: start });
        }
        Ok(out)
    }

    /// Scans `[+-]? digits [. digits] [e [+-] digits]` starting at `i`,
    /// returning the end offset, or `None` if no digits are present.
    /// A bare sign followed by `i` is reported as an empty magnitude.
    fn scan_real(&self, mut i: usize) -> (usize, bool) {
        if matches!(self.peek_at(i), Some(b'+' | b'-')) {
            i += 1;
        }
        let mut digits = false;
        while self.peek_at(i).is_some_and(|b| b.is_ascii_digit()) {
            i += 1;
            digits = true;
        }
        if self.peek_at(i) == Some(b'.') {
            i += 1;
            while self.peek_at(i).is_some_and(|b| b.is_ascii_digit()) {
                i += 1;
                digits = true;
            }
        }
        if digits && matches!(self.peek_at(i), Some(b'e' | b'E')) {
            let mut j = i + 1;
            if matches!(self.peek_at(j), Some(b'+' | b'-')) {
                j += 1;
            }
            if self.peek_at(j).is_some_and(|b| b.is_ascii_digit()) {
                while self.peek_at(j).is_some_and(|b| b.is_ascii_digit()) {
                    j += 1;
                }
                i = j;
            }
        }
        (i, digits)
    }

    /// Parses the text of a real number; an empty magnitude (bare sign)
    /// means one, for the imaginary-unit forms `+i` / `-i`.
    fn value(&self, start: usize, end: usize, has_digits: bool) -> Result<f64, ParseError> {
        let text = std::str::from_utf8(&self.src[start..end]).expect("ascii");
        let v = if has_digits {
            text.parse::<f64>()
                .map_err(|_| ParseError::new(ParseErrorKind::BadNumber(text.to_string()), start))?
        } else if text.starts_with('-') {
            -1.0
        } else {
            1.0
        };
        if !v.is_finite() {
            return Err(ParseError::new(
                ParseErrorKind::BadNumber(text.to_string()),
                start,
            ));
        }
        Ok(v)
    }

    fn imaginary_unit_at(&self, i: usize) -> bool {
        self.peek_at(i) == Some(b'i') && !self.peek_at(i + 1).is_some_and(is_ident_char)
    }

    fn literal(&mut self) -> Result<Tok, ParseError> {
        let start = self.pos;
        let (end, digits) = self.scan_real(start);
        if self.imaginary_unit_at(end) {
            let v = self.value(start, end, digits)?;
            self.pos = end + 1;
            return Ok(Tok::Complex(Complex::new(0.0, v)));
        }
        if !digits {
            return Err(ParseError::new(
                ParseErrorKind::BadNumber(
                    String::from_utf8_lossy(&self.src[start..end.max(start + 1)]).into_owned(),
                ),
                start,
            ));
        }
        let re = self.value(start, end, true)?;
        // `re±im i` as one token
        if matches!(self.peek_at(end), Some(b'+' | b'-')) {
            let (im_end, im_digits) = self.scan_real(end);
            if self.imaginary_unit_at(im_end) {
                let im = self.value(end, im_end, im_digits)?;
                self.pos = im_end + 1;
                return Ok(Tok::Complex(Complex::new(re, im)));
            }
        }
        self.pos = end;
        Ok(Tok::Number(re))
    }
}
