use std::fmt;

use num_complex::Complex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedGate {
    I,
    X,
    Y,
    Z,
    H,
    S,
    T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamGate {
    Rx,
    Ry,
    Rz,
    Phase,
}

impl NamedGate {
    pub const ALL: [NamedGate; 7] = [
        Self::I,
        Self::X,
        Self::Y,
        Self::Z,
        Self::H,
        Self::S,
        Self::T,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::I => "I",
            Self::X => "X",
            Self::Y => "Y",
            Self::Z => "Z",
            Self::H => "H",
            Self::S => "S",
            Self::T => "T",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.name() == name)
    }
}

impl ParamGate {
    pub const ALL: [ParamGate; 4] = [Self::Rx, Self::Ry, Self::Rz, Self::Phase];

    pub fn name(self) -> &'static str {
        match self {
            Self::Rx => "RX",
            Self::Ry => "RY",
            Self::Rz => "RZ",
            Self::Phase => "PHASE",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.name() == name)
    }
}

/// Parsed gate expression. Parentheses are not kept; `Display` re-inserts
/// them wherever precedence or associativity requires.
#[derive(Clone, Debug, PartialEq)]
pub enum GateExpr {
    Named(NamedGate),
    Param(ParamGate, f64),
    /// Square matrix literal, row-major.
    Matrix(Vec<Vec<Complex<f64>>>),
    /// `A * B`, the matrix product in written order.
    Product(Box<GateExpr>, Box<GateExpr>),
    /// `A x B`, the Kronecker product.
    Tensor(Box<GateExpr>, Box<GateExpr>),
    Adjoint(Box<GateExpr>),
}

impl GateExpr {
    pub fn product(a: GateExpr, b: GateExpr) -> Self {
        Self::Product(Box::new(a), Box::new(b))
    }

    pub fn tensor(a: GateExpr, b: GateExpr) -> Self {
        Self::Tensor(Box::new(a), Box::new(b))
    }

    pub fn adjoint(a: GateExpr) -> Self {
        Self::Adjoint(Box::new(a))
    }

    fn precedence(&self) -> u8 {
        match self {
            Self::Tensor(..) => 0,
            Self::Product(..) => 1,
            Self::Adjoint(..) => 2,
            Self::Named(_) | Self::Param(..) | Self::Matrix(_) => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Self::Named(g) => write!(f, "{}", g.name()),
            Self::Param(g, theta) => write!(f, "{}({:?})", g.name(), theta),
            Self::Matrix(rows) => {
                write!(f, "[")?;
                for (r, row) in rows.iter().enumerate() {
                    if r > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "[")?;
                    for (c, z) in row.iter().enumerate() {
                        if c > 0 {
                            write!(f, ",")?;
                        }
                        write_complex(f, *z)?;
                    }
                    write!(f, "]")?;
                }
                write!(f, "]")
            }
            // both operators are left-associative
            Self::Tensor(a, b) => {
                a.fmt_at(f, 0)?;
                write!(f, " x ")?;
                b.fmt_at(f, 1)
            }
            Self::Product(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " * ")?;
                b.fmt_at(f, 2)
            }
            Self::Adjoint(a) => {
                a.fmt_at(f, 3)?;
                write!(f, "'")
            }
        }
    }
}

fn write_complex(f: &mut fmt::Formatter<'_>, z: Complex<f64>) -> fmt::Result {
    if z.im == 0.0 && !z.im.is_sign_negative() {
        write!(f, "{:?}", z.re)
    } else {
        let sign = if z.im.is_sign_negative() { '-' } else { '+' };
        write!(f, "{:?}{}{:?}i", z.re, sign, z.im.abs())
    }
}

impl fmt::Display for GateExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}
