//! A small text language for parameterized Hermitian matrix families.
//!
//! A family is written as a bracketed, row-major matrix of expressions:
//!
//! ```text
//! [[r*cos(phi), r*sin(phi)],
//!  [r*sin(phi), -r*cos(phi)]]
//! ```
//!
//! Expressions support `+ - * /`, unary minus, parentheses, the functions
//! `sin cos tan exp sqrt`, numeric literals, the constants `pi` and `e`, the
//! imaginary unit `i`, and the declared parameter names. There are no
//! comparison operators, no user functions and no `a+bi` literal form.

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use thiserror::Error;

use crate::phase::ParameterPoint;
use crate::spectral::{HermiticityError, HermitianMatrix};

/// Default Hermiticity tolerance applied by [`HamiltonianFamily::evaluate`].
pub const DEFAULT_HERMITICITY_TOL: f64 = 1e-10;

/// Source text of the built-in two-level family in polar form.
pub const SPINOR_POLAR_TEXT: &str = "[[r*cos(phi), r*sin(phi)],[r*sin(phi), -r*cos(phi)]]";
/// The same family in Cartesian form.
pub const SPINOR_CARTESIAN_TEXT: &str = "[[x, y],[y, -x]]";

const RESERVED: &[&str] = &["i", "pi", "e", "sin", "cos", "tan", "exp", "sqrt"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("undeclared identifier `{name}` at line {line}, column {column}")]
    UndeclaredIdentifier {
        name: String,
        line: usize,
        column: usize,
    },

    #[error("unknown function `{name}` at line {line}, column {column}")]
    UnknownFunction {
        name: String,
        line: usize,
        column: usize,
    },

    #[error("matrix is not square: row {row} has {found} entries, expected {expected}")]
    NonSquare {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("matrix is empty")]
    EmptyMatrix,

    #[error("matrix must be at least 2x2, got {0}x{0}")]
    TooSmall(usize),

    #[error("parameter name `{0}` is reserved or not a valid identifier")]
    InvalidParameterName(String),

    #[error("parameter `{0}` declared more than once")]
    DuplicateParameter(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("family takes {expected} parameters, point has {found}")]
    ParameterCount { expected: usize, found: usize },

    #[error("entry ({row}, {column}) evaluated to a non-finite value")]
    NonFinite { row: usize, column: usize },

    #[error(transparent)]
    NotHermitian(#[from] HermiticityError),

    #[error("expression has imaginary part {0:e}; a real value was required")]
    NotReal(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Sin,
    Cos,
    Tan,
    Exp,
    Sqrt,
}

impl Function {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Self::Sin,
            "cos" => Self::Cos,
            "tan" => Self::Tan,
            "exp" => Self::Exp,
            "sqrt" => Self::Sqrt,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Tan => "tan",
            Self::Exp => "exp",
            Self::Sqrt => "sqrt",
        }
    }

    fn apply(self, z: Complex64) -> Complex64 {
        match self {
            Self::Sin => z.sin(),
            Self::Cos => z.cos(),
            Self::Tan => z.tan(),
            Self::Exp => z.exp(),
            Self::Sqrt => z.sqrt(),
        }
    }
}

/// Parsed expression tree. Parameters are stored by index into the owning
/// family's parameter list.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    ImaginaryUnit,
    Pi,
    Euler,
    Param(usize),
    Neg(Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Call(Function, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, params: &[f64]) -> Complex64 {
        match self {
            Expr::Number(v) => Complex64::new(*v, 0.0),
            Expr::ImaginaryUnit => Complex64::new(0.0, 1.0),
            Expr::Pi => Complex64::new(std::f64::consts::PI, 0.0),
            Expr::Euler => Complex64::new(std::f64::consts::E, 0.0),
            Expr::Param(k) => Complex64::new(params[*k], 0.0),
            Expr::Neg(a) => {
                // 0 - im keeps real values at +0i, on the principal side of branch cuts
                let z = a.eval(params);
                Complex64::new(-z.re, 0.0 - z.im)
            }
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval(params), b.eval(params));
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => mul(a, b),
                    BinaryOp::Div => div(a, b),
                }
            }
            Expr::Call(f, a) => f.apply(a.eval(params)),
        }
    }

    /// Writes the expression fully parenthesized, using `names` for
    /// parameters. The output reparses to an identical tree.
    pub fn write_with(&self, names: &[String], out: &mut String) {
        match self {
            // `{:?}` is the shortest representation that round-trips
            Expr::Number(v) => out.push_str(&format!("{v:?}")),
            Expr::ImaginaryUnit => out.push('i'),
            Expr::Pi => out.push_str("pi"),
            Expr::Euler => out.push('e'),
            Expr::Param(k) => out.push_str(&names[*k]),
            Expr::Neg(a) => {
                out.push_str("(-");
                a.write_with(names, out);
                out.push(')');
            }
            Expr::Binary(op, a, b) => {
                out.push('(');
                a.write_with(names, out);
                out.push_str(match op {
                    BinaryOp::Add => " + ",
                    BinaryOp::Sub => " - ",
                    BinaryOp::Mul => " * ",
                    BinaryOp::Div => " / ",
                });
                b.write_with(names, out);
                out.push(')');
            }
            Expr::Call(f, a) => {
                out.push_str(f.name());
                out.push('(');
                a.write_with(names, out);
                out.push(')');
            }
        }
    }
}

// Complex products and quotients where one side is purely real are done
// componentwise, so real-valued expressions never pick up spurious
// `0 * inf = NaN` imaginary parts.
fn mul(a: Complex64, b: Complex64) -> Complex64 {
    if a.im == 0.0 && b.im == 0.0 {
        Complex64::new(a.re * b.re, 0.0)
    } else {
        a * b
    }
}

fn div(a: Complex64, b: Complex64) -> Complex64 {
    if b.im == 0.0 {
        Complex64::new(a.re / b.re, if a.im == 0.0 { 0.0 } else { a.im / b.re })
    } else {
        a / b
    }
}

/// An N×N grid of expressions over named parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixExpr {
    entries: Vec<Vec<Expr>>,
    parameter_names: Vec<String>,
}

impl MatrixExpr {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn parameter_names(&self) -> &[String] {
        &self.parameter_names
    }

    pub fn entry(&self, row: usize, column: usize) -> &Expr {
        &self.entries[row][column]
    }
}

impl fmt::Display for MatrixExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::from("[");
        for (r, row) in self.entries.iter().enumerate() {
            if r > 0 {
                out.push_str(",\n ");
            }
            out.push('[');
            for (c, e) in row.iter().enumerate() {
                if c > 0 {
                    out.push_str(", ");
                }
                e.write_with(&self.parameter_names, &mut out);
            }
            out.push(']');
        }
        out.push(']');
        f.write_str(&out)
    }
}

/// A parameterized Hermitian matrix family `R ↦ H(R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianFamily {
    expr: MatrixExpr,
    hermiticity_tol: f64,
}

impl HamiltonianFamily {
    pub fn dim(&self) -> usize {
        self.expr.dim()
    }

    pub fn expr(&self) -> &MatrixExpr {
        &self.expr
    }

    pub fn parameter_names(&self) -> &[String] {
        &self.expr.parameter_names
    }

    pub fn parameter_count(&self) -> usize {
        self.expr.parameter_names.len()
    }

    pub fn hermiticity_tol(&self) -> f64 {
        self.hermiticity_tol
    }

    pub fn with_hermiticity_tol(mut self, tol: f64) -> Self {
        self.hermiticity_tol = tol;
        self
    }

    /// Evaluates `H(point)`. Hermiticity is checked against the family's
    /// tolerance, never repaired.
    pub fn evaluate(&self, point: &ParameterPoint) -> Result<HermitianMatrix, EvalError> {
        let params = point.coords();
        if params.len() != self.parameter_count() {
            return Err(EvalError::ParameterCount {
                expected: self.parameter_count(),
                found: params.len(),
            });
        }
        let n = self.dim();
        let mut data = Vec::with_capacity(n * n);
        for (row, entries) in self.expr.entries.iter().enumerate() {
            for (column, e) in entries.iter().enumerate() {
                let z = e.eval(params);
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(EvalError::NonFinite { row, column });
                }
                data.push(z);
            }
        }
        Ok(HermitianMatrix::new(n, data, self.hermiticity_tol)?)
    }
}

/// Parses a matrix family over the given parameter names.
pub fn parse_family(text: &str, parameter_names: &[&str]) -> Result<HamiltonianFamily, ParseError> {
    let names = validate_names(parameter_names)?;
    let mut parser = Parser::new(text, &names);
    let entries = parser.matrix()?;
    parser.expect_end()?;
    Ok(HamiltonianFamily {
        expr: MatrixExpr {
            entries,
            parameter_names: names,
        },
        hermiticity_tol: DEFAULT_HERMITICITY_TOL,
    })
}

/// A single real-or-complex expression over named parameters, as used for
/// gauge functions and numeric command-line arguments such as `pi/3`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarExpr {
    expr: Expr,
    parameter_names: Vec<String>,
}

impl ScalarExpr {
    pub fn parameter_names(&self) -> &[String] {
        &self.parameter_names
    }

    pub fn eval(&self, params: &[f64]) -> Complex64 {
        self.expr.eval(params)
    }

    /// Evaluates and insists on a (numerically) real, finite result.
    pub fn eval_real(&self, params: &[f64]) -> Result<f64, EvalError> {
        let z = self.eval(params);
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(EvalError::NonFinite { row: 0, column: 0 });
        }
        if z.im.abs() > 1e-12 * z.re.abs().max(1.0) {
            return Err(EvalError::NotReal(z.im));
        }
        Ok(z.re)
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.expr.write_with(&self.parameter_names, &mut out);
        f.write_str(&out)
    }
}

pub fn parse_scalar(text: &str, parameter_names: &[&str]) -> Result<ScalarExpr, ParseError> {
    let names = validate_names(parameter_names)?;
    let mut parser = Parser::new(text, &names);
    let expr = parser.expr()?;
    parser.expect_end()?;
    Ok(ScalarExpr {
        expr,
        parameter_names: names,
    })
}

/// The two-level family `H = r [[cos φ, sin φ], [sin φ, −cos φ]]` over
/// parameters `(r, phi)`, with eigenvalues `±r`.
pub fn builtin_spinor_family() -> HamiltonianFamily {
    static FAMILY: OnceLock<HamiltonianFamily> = OnceLock::new();
    FAMILY
        .get_or_init(|| parse_family(SPINOR_POLAR_TEXT, &["r", "phi"]).expect("built-in text parses"))
        .clone()
}

/// Cartesian form `[[x, y], [y, −x]]` of the same family.
pub fn builtin_spinor_cartesian_family() -> HamiltonianFamily {
    parse_family(SPINOR_CARTESIAN_TEXT, &["x", "y"]).expect("built-in text parses")
}

fn validate_names(names: &[&str]) -> Result<Vec<String>, ParseError> {
    let mut out: Vec<String> = Vec::with_capacity(names.len());
    for &name in names {
        let valid = name
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid || RESERVED.contains(&name) {
            return Err(ParseError::InvalidParameterName(name.to_string()));
        }
        if out.iter().any(|n| n == name) {
            return Err(ParseError::DuplicateParameter(name.to_string()));
        }
        out.push(name.to_string());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Number(v) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn next_token(&mut self) -> Result<(Tok, Pos), ParseError> {
        while self.chars.peek().is_some_and(|c| c.is_whitespace()) {
            self.bump();
        }
        let pos = self.pos();
        let Some(&c) = self.chars.peek() else {
            return Ok((Tok::End, pos));
        };
        let simple = match c {
            '+' => Some(Tok::Plus),
            // U+2212 MINUS SIGN is accepted as an alias for `-`
            '-' | '\u{2212}' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = simple {
            self.bump();
            return Ok((tok, pos));
        }
        if c.is_ascii_digit() || c == '.' {
            return self.number(pos);
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut name = String::new();
            while let Some(&c) = self.chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    name.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            return Ok((Tok::Ident(name), pos));
        }
        Err(ParseError::Syntax {
            line: pos.line,
            column: pos.column,
            message: format!("unexpected character `{c}`"),
        })
    }

    fn number(&mut self, pos: Pos) -> Result<(Tok, Pos), ParseError> {
        let mut text = String::new();
        while let Some(&c) = self.chars.peek() {
            if c.is_ascii_digit() || c == '.' {
                text.push(c);
                self.bump();
            } else {
                break;
            }
        }
        // exponent only when digits follow, so `2e` stays a syntax error
        // rather than swallowing the constant `e`
        if matches!(self.chars.peek(), Some('e' | 'E')) {
            let mut look = self.chars.clone();
            look.next();
            let mut exp = String::from("e");
            if let Some(&s @ ('+' | '-')) = look.peek() {
                exp.push(s);
                look.next();
            }
            if look.peek().is_some_and(|c| c.is_ascii_digit()) {
                for _ in 0..exp.len() {
                    self.bump();
                }
                text.push_str(&exp);
                while let Some(&c) = self.chars.peek() {
                    if c.is_ascii_digit() {
                        text.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
        }
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok((Tok::Number(v), pos)),
            _ => Err(ParseError::Syntax {
                line: pos.line,
                column: pos.column,
                message: format!("invalid numeric literal `{text}`"),
            }),
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    pos: Pos,
    pending: Option<ParseError>,
    names: &'a [String],
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, names: &'a [String]) -> Self {
        let mut p = Parser {
            lexer: Lexer::new(text),
            tok: Tok::End,
            pos: Pos { line: 1, column: 1 },
            pending: None,
            names,
        };
        p.advance_lenient();
        p
    }

    fn advance_lenient(&mut self) {
        match self.lexer.next_token() {
            Ok((tok, pos)) => {
                self.tok = tok;
                self.pos = pos;
            }
            Err(e) => {
                self.tok = Tok::End;
                self.pending = Some(e);
            }
        }
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        if let Some(e) = self.pending.take() {
            return Err(e);
        }
        self.advance_lenient();
        match self.pending.take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    fn current(&mut self) -> Result<&Tok, ParseError> {
        match self.pending.take() {
            Some(e) => Err(e),
            None => Ok(&self.tok),
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.pos.line,
            column: self.pos.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: Tok, context: &str) -> Result<(), ParseError> {
        if *self.current()? == want {
            self.advance()
        } else {
            Err(self.error(format!(
                "expected {} {context}, found {}",
                want.describe(),
                self.tok.describe()
            )))
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        if *self.current()? == Tok::End {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {} after end of input", self.tok.describe())))
        }
    }

    fn matrix(&mut self) -> Result<Vec<Vec<Expr>>, ParseError> {
        self.expect(Tok::LBracket, "to open the matrix")?;
        if *self.current()? == Tok::RBracket {
            return Err(ParseError::EmptyMatrix);
        }
        let mut rows = vec![self.row()?];
        while *self.current()? == Tok::Comma {
            self.advance()?;
            rows.push(self.row()?);
        }
        self.expect(Tok::RBracket, "to close the matrix")?;

        let n = rows.len();
        for (row, entries) in rows.iter().enumerate() {
            if entries.len() != n {
                return Err(ParseError::NonSquare {
                    row,
                    expected: n,
                    found: entries.len(),
                });
            }
        }
        if n < 2 {
            return Err(ParseError::TooSmall(n));
        }
        Ok(rows)
    }

    fn row(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect(Tok::LBracket, "to open a matrix row")?;
        if *self.current()? == Tok::RBracket {
            return Err(ParseError::EmptyMatrix);
        }
        let mut entries = vec![self.expr()?];
        while *self.current()? == Tok::Comma {
            self.advance()?;
            entries.push(self.expr()?);
        }
        self.expect(Tok::RBracket, "to close the matrix row")?;
        Ok(entries)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.current()? {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance()?;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.current()? {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.advance()?;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.current()? == Tok::Minus {
            self.advance()?;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos;
        match self.current()?.clone() {
            Tok::Number(v) => {
                self.advance()?;
                Ok(Expr::Number(v))
            }
            Tok::LParen => {
                self.advance()?;
                let e = self.expr()?;
                self.expect(Tok::RParen, "to close the parenthesis")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.advance()?;
                if *self.current()? == Tok::LParen {
                    let Some(f) = Function::from_name(&name) else {
                        return Err(ParseError::UnknownFunction {
                            name,
                            line: pos.line,
                            column: pos.column,
                        });
                    };
                    self.advance()?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "to close the function call")?;
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                match name.as_str() {
                    "i" => Ok(Expr::ImaginaryUnit),
                    "pi" => Ok(Expr::Pi),
                    "e" => Ok(Expr::Euler),
                    _ => match self.names.iter().position(|n| *n == name) {
                        Some(k) => Ok(Expr::Param(k)),
                        None => Err(ParseError::UndeclaredIdentifier {
                            name,
                            line: pos.line,
                            column: pos.column,
                        }),
                    },
                }
            }
            other => Err(self.error(format!("expected an expression, found {}", other.describe()))),
        }
    }
}
