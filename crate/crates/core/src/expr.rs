//! A small expression language for user-supplied cavity mode functions.
//!
//! Expressions are functions of the position `z` and may refer to the cavity
//! length `L` and to `pi`. Supported operators, from tightest to loosest
//! binding: `^` (right associative), unary `-`, `*` `/`, `+` `-`. Functions:
//! `sin cos exp sech tanh abs sqrt`.
//!
//! ```
//! use mazer_core::expr::Expr;
//!
//! let e: Expr = "sin(pi*z/L)^2".parse().unwrap();
//! assert!((e.eval(5.0, 10.0).unwrap() - 1.0).abs() < 1e-15);
//! ```

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sech,
    Tanh,
    Abs,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Sech,
        Func::Tanh,
        Func::Abs,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sech => "sech",
            Func::Tanh => "tanh",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, x: f64) -> Result<f64, EvalError> {
        Ok(match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Exp => x.exp(),
            Func::Sech => 1.0 / x.cosh(),
            Func::Tanh => x.tanh(),
            Func::Abs => x.abs(),
            Func::Sqrt => {
                if x < 0.0 {
                    return Err(EvalError::NegativeSqrt(x));
                }
                x.sqrt()
            }
        })
    }
}

/// Parsed mode-function expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// The position `z`.
    Position,
    Pi,
    /// The cavity length `L`.
    Length,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of negative value {0}")]
    NegativeSqrt(f64),
    #[error("non-finite result")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: found {found}, expected one of {}", .expected.join(", "))]
    Syntax {
        offset: usize,
        found: String,
        expected: Vec<&'static str>,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => {
                *offset
            }
        }
    }
}

impl Expr {
    /// Evaluates the expression at position `z` for a cavity of length `length`.
    pub fn eval(&self, z: f64, length: f64) -> Result<f64, EvalError> {
        let v = self.eval_inner(z, length)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    fn eval_inner(&self, z: f64, length: f64) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Position => z,
            Expr::Pi => std::f64::consts::PI,
            Expr::Length => length,
            Expr::Neg(e) => -e.eval_inner(z, length)?,
            Expr::Call(f, e) => f.apply(e.eval_inner(z, length)?)?,
            Expr::Binary(op, lhs, rhs) => {
                let a = lhs.eval_inner(z, length)?;
                let b = rhs.eval_inner(z, length)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                    BinOp::Pow => a.powf(b),
                }
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Neg(_) => 3,
            _ => 5,
        }
    }
}

/// Canonical printer: minimal parentheses, binary operators spaced, numbers in
/// shortest round-trip form. Parsing the output yields the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool) -> fmt::Result {
            if paren {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Position => f.write_str("z"),
            Expr::Pi => f.write_str("pi"),
            Expr::Length => f.write_str("L"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                wrapped(f, e, e.precedence() < 3)
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Binary(BinOp::Pow, lhs, rhs) => {
                wrapped(f, lhs, lhs.precedence() <= 4)?;
                f.write_str("^")?;
                wrapped(f, rhs, rhs.precedence() < 3)
            }
            Expr::Binary(op, lhs, rhs) => {
                let p = op.precedence();
                wrapped(f, lhs, lhs.precedence() < p)?;
                write!(f, " {} ", op.symbol())?;
                wrapped(f, rhs, rhs.precedence() <= p)
            }
        }
    }
}

impl FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax_error(&["operator", "end of input"]));
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq)]
enum Token<'a> {
    Number(f64),
    Ident(&'a str),
    Op(u8),
    Open,
    Close,
    End,
    Bad(char),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

const OPERAND: &[&str] = &["number", "identifier", "(", "-"];

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    /// Returns the next token and the byte offset just past it, without consuming.
    fn peek(&mut self) -> (Token<'a>, usize) {
        self.skip_ws();
        let bytes = self.src.as_bytes();
        let start = self.pos;
        let Some(&b) = bytes.get(start) else {
            return (Token::End, start);
        };
        match b {
            b'+' | b'-' | b'*' | b'/' | b'^' => (Token::Op(b), start + 1),
            b'(' => (Token::Open, start + 1),
            b')' => (Token::Close, start + 1),
            b'0'..=b'9' | b'.' => {
                let end = scan_number(bytes, start);
                match self.src[start..end].parse::<f64>() {
                    Ok(v) => (Token::Number(v), end),
                    Err(_) => (Token::Bad('.'), start),
                }
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let end = start
                    + bytes[start..]
                        .iter()
                        .take_while(|c| c.is_ascii_alphanumeric() || **c == b'_')
                        .count();
                (Token::Ident(&self.src[start..end]), end)
            }
            _ => {
                let c = self.src[start..].chars().next().unwrap_or('?');
                (Token::Bad(c), start)
            }
        }
    }

    fn syntax_error(&mut self, expected: &[&'static str]) -> ParseError {
        let (tok, _) = self.peek();
        let found = match tok {
            Token::Number(v) => format!("number {v}"),
            Token::Ident(s) => format!("`{s}`"),
            Token::Op(b) => format!("`{}`", b as char),
            Token::Open => "`(`".into(),
            Token::Close => "`)`".into(),
            Token::End => "end of input".into(),
            Token::Bad(c) => format!("`{c}`"),
        };
        ParseError::Syntax {
            offset: self.pos,
            found,
            expected: expected.to_vec(),
        }
    }

    fn eat_op(&mut self, ops: &[u8]) -> Option<u8> {
        match self.peek() {
            (Token::Op(b), end) if ops.contains(&b) => {
                self.pos = end;
                Some(b)
            }
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(b) = self.eat_op(b"+-") {
            let op = if b == b'+' { BinOp::Add } else { BinOp::Sub };
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(b) = self.eat_op(b"*/") {
            let op = if b == b'*' { BinOp::Mul } else { BinOp::Div };
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_op(b"-").is_some() {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat_op(b"^").is_some() {
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            (Token::Number(v), end) => {
                self.pos = end;
                Ok(Expr::Const(v))
            }
            (Token::Open, end) => {
                self.pos = end;
                let e = self.expr()?;
                self.expect_close()?;
                Ok(e)
            }
            (Token::Ident(name), end) => {
                self.pos = end;
                match name {
                    "z" => return Ok(Expr::Position),
                    "pi" => return Ok(Expr::Pi),
                    "L" => return Ok(Expr::Length),
                    _ => {}
                }
                let Some(func) = Func::from_name(name) else {
                    return Err(ParseError::UnknownIdentifier {
                        offset: start,
                        name: name.to_string(),
                    });
                };
                match self.peek() {
                    (Token::Open, end) => self.pos = end,
                    _ => return Err(self.syntax_error(&["("])),
                }
                let arg = self.expr()?;
                self.expect_close()?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            _ => Err(self.syntax_error(OPERAND)),
        }
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            (Token::Close, end) => {
                self.pos = end;
                Ok(())
            }
            _ => Err(self.syntax_error(&[")", "operator"])),
        }
    }
}

fn scan_number(bytes: &[u8], start: usize) -> usize {
    let digits = |i: usize| i + bytes[i..].iter().take_while(|b| b.is_ascii_digit()).count();
    let mut end = digits(start);
    if bytes.get(end) == Some(&b'.') {
        end = digits(end + 1);
    }
    if matches!(bytes.get(end), Some(b'e' | b'E')) {
        let mut exp = end + 1;
        if matches!(bytes.get(exp), Some(b'+' | b'-')) {
            exp += 1;
        }
        if bytes.get(exp).is_some_and(u8::is_ascii_digit) {
            end = digits(exp);
        }
    }
    end
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ev(s: &str, z: f64) -> f64 {
        parse(s).unwrap().eval(z, 10.0).unwrap()
    }

    #[test]
    fn constant() {
        assert_eq!(parse("1").unwrap(), Expr::Const(1.0));
        assert_eq!(ev("  1 ", 3.0), 1.0);
    }

    #[test]
    fn squared_sine_peaks_mid_cavity() {
        assert!((ev("sin(pi*z/L)^2", 5.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unclosed_call_reports_end_offset() {
        let err = parse("sin(").unwrap_err();
        assert_eq!(err.offset(), 4);
        match err {
            ParseError::Syntax { expected, .. } => assert!(expected.contains(&"number")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier() {
        let err = parse("2 * x").unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownIdentifier {
                offset: 4,
                name: "x".into()
            }
        );
    }

    #[test]
    fn trailing_garbage() {
        assert_eq!(parse("z )").unwrap_err().offset(), 2);
        assert_eq!(parse("z z").unwrap_err().offset(), 2);
        assert_eq!(parse("3 # 4").unwrap_err().offset(), 2);
    }

    #[test]
    fn precedence() {
        // ^ binds tighter than unary minus
        assert_eq!(ev("-2^2", 0.0), -4.0);
        assert_eq!(ev("2^-1", 0.0), 0.5);
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("1 - 2 - 3", 0.0), -4.0);
        assert_eq!(ev("8 / 2 / 2", 0.0), 2.0);
        assert_eq!(ev("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(ev("(1 + 2) * 3", 0.0), 9.0);
        assert_eq!(ev("1.5e1 + .5", 0.0), 15.5);
    }

    #[test]
    fn functions() {
        assert_eq!(ev("sech(0)", 0.0), 1.0);
        assert_eq!(ev("abs(-z)", 2.0), 2.0);
        assert_eq!(ev("sqrt(z)", 4.0), 2.0);
        assert!((ev("tanh(z) - (exp(z) - exp(-z)) / (exp(z) + exp(-z))", 0.3)).abs() < 1e-15);
        assert!((ev("cos(pi)", 0.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn eval_errors() {
        let e = parse("1 / (z - 1)").unwrap();
        assert_eq!(e.eval(1.0, 10.0), Err(EvalError::DivisionByZero));
        let e = parse("sqrt(z)").unwrap();
        assert_eq!(e.eval(-1.0, 10.0), Err(EvalError::NegativeSqrt(-1.0)));
        let e = parse("exp(z)").unwrap();
        assert_eq!(e.eval(1000.0, 10.0), Err(EvalError::NonFinite));
    }

    #[test]
    fn printer_is_minimal() {
        let e = parse("((1 + z)) * (2 ^ (3 ^ L)) - -(pi)").unwrap();
        assert_eq!(e.to_string(), "(1.0 + z) * 2.0^3.0^L - -pi");
        let e = parse("(2^3)^z + (-1)^2 + z - (z - 1)").unwrap();
        assert_eq!(e.to_string(), "(2.0^3.0)^z + (-1.0)^2.0 + z - (z - 1.0)");
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0f64..1e6).prop_map(Expr::Const),
            (0u32..1000).prop_map(|n| Expr::Const(n as f64)),
            Just(Expr::Position),
            Just(Expr::Pi),
            Just(Expr::Length),
        ];
        leaf.prop_recursive(6, 64, 2, |inner| {
            let op = prop_oneof![
                Just(BinOp::Add),
                Just(BinOp::Sub),
                Just(BinOp::Mul),
                Just(BinOp::Div),
                Just(BinOp::Pow),
            ];
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (0usize..Func::ALL.len(), inner.clone())
                    .prop_map(|(i, e)| Expr::Call(Func::ALL[i], Box::new(e))),
                (op, inner.clone(), inner).prop_map(|(op, a, b)| Expr::Binary(
                    op,
                    Box::new(a),
                    Box::new(b)
                )),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            let printed = e.to_string();
            let reparsed = parse(&printed).unwrap();
            prop_assert_eq!(&reparsed, &e, "printed as {}", printed);
        }
    }
}
