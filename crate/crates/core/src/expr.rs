//! Expression language for weights and nonlinearities.
//!
//! Grammar (EBNF):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-t^2`
//! parses as `-(t^2)` and `2^-3` is legal. `+`/`-` and `*`/`/` are
//! left-associative. Numbers accept decimal and scientific notation.
//!
//! Variables: a one-argument function may be written in `t` (weights) or `u`
//! (nonlinearities); both denote the single argument. A two-argument
//! function uses `u` and `v`. Built-in calls: `exp`, `log`, `sqrt`, `abs`
//! (one argument) and `min`, `max`, `pow` (two arguments).
//!
//! Evaluation follows IEEE f64 semantics but never returns a non-finite
//! value: domain errors (log of a non-positive number, square root of a
//! negative number, `0^negative`, a negative base raised to a non-integer
//! power, division by zero) and overflow are reported as [`Error::Eval`].

use std::fmt;

use crate::{Error, Result};

/// Names a variable as written in the source. `t` and `u` both map to
/// argument 0; `v` maps to argument 1 and is only legal in arity-2 specs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarName {
    T,
    U,
    V,
}

impl VarName {
    fn as_str(self) -> &'static str {
        match self {
            VarName::T => "t",
            VarName::U => "u",
            VarName::V => "v",
        }
    }

    fn arg_index(self, arity: u8) -> Option<usize> {
        match (self, arity) {
            (VarName::T, 1) | (VarName::U, 1) => Some(0),
            (VarName::U, 2) => Some(0),
            (VarName::V, 2) => Some(1),
            _ => None,
        }
    }
}

/// Built-in function calls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Abs,
    Min,
    Max,
    Pow,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "min" => Func::Min,
            "max" => Func::Max,
            "pow" => Func::Pow,
            _ => return None,
        })
    }

    fn arg_count(self) -> usize {
        match self {
            Func::Exp | Func::Log | Func::Sqrt | Func::Abs => 1,
            Func::Min | Func::Max | Func::Pow => 2,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
            Func::Pow => "pow",
        }
    }
}

/// Binary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }

    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Expression tree node.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Number(f64),
    Var(VarName),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

const PREC_NEG: u8 = 3;
const PREC_ATOM: u8 = 5;

impl Node {
    fn precedence(&self) -> u8 {
        match self {
            Node::Number(x) if *x < 0.0 => PREC_NEG,
            Node::Number(_) | Node::Var(_) | Node::Call(..) => PREC_ATOM,
            Node::Neg(_) => PREC_NEG,
            Node::Binary(op, ..) => op.precedence(),
        }
    }
}

/// A parsed expression together with its source text and arity.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    source: String,
    arity: u8,
    root: Node,
}

impl FunctionSpec {
    /// Parses `source` as a function of `arity` (1 or 2) arguments.
    pub fn parse(source: &str, arity: u8) -> Result<FunctionSpec> {
        if arity != 1 && arity != 2 {
            return Err(Error::Invalid(format!(
                "function arity must be 1 or 2, got {arity}"
            )));
        }
        let tokens = lex(source)?;
        let mut parser = Parser {
            tokens: &tokens,
            pos: 0,
            arity,
            source_len: source.len(),
        };
        let root = parser.parse_expr()?;
        if let Some(tok) = parser.peek() {
            return Err(Error::Parse {
                offset: tok.offset,
                message: format!("unexpected {}", tok.kind.describe()),
            });
        }
        Ok(FunctionSpec {
            source: source.to_string(),
            arity,
            root,
        })
    }

    /// The original source text.
    pub fn source(&self) -> &str {
        &self.source
    }

    /// Number of arguments (1 or 2).
    pub fn arity(&self) -> u8 {
        self.arity
    }

    /// The expression tree.
    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Evaluates the expression at `args` (length must equal the arity).
    pub fn eval(&self, args: &[f64]) -> Result<f64> {
        if args.len() != self.arity as usize {
            return Err(Error::Invalid(format!(
                "expected {} argument(s), got {}",
                self.arity,
                args.len()
            )));
        }
        eval_node(&self.root, self.arity, args)
    }

    /// Convenience for arity-1 specs.
    pub fn eval1(&self, x: f64) -> Result<f64> {
        self.eval(&[x])
    }

    /// Convenience for arity-2 specs.
    pub fn eval2(&self, x: f64, y: f64) -> Result<f64> {
        self.eval(&[x, y])
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.root)
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl TokKind {
    fn describe(&self) -> String {
        match self {
            TokKind::Number(x) => format!("number `{x}`"),
            TokKind::Ident(s) => format!("identifier `{s}`"),
            TokKind::Plus => "`+`".into(),
            TokKind::Minus => "`-`".into(),
            TokKind::Star => "`*`".into(),
            TokKind::Slash => "`/`".into(),
            TokKind::Caret => "`^`".into(),
            TokKind::LParen => "`(`".into(),
            TokKind::RParen => "`)`".into(),
            TokKind::Comma => "`,`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Tok {
    kind: TokKind,
    offset: usize,
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let offset = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
            }
            b'+' => {
                out.push(Tok { kind: TokKind::Plus, offset });
                i += 1;
            }
            b'-' => {
                out.push(Tok { kind: TokKind::Minus, offset });
                i += 1;
            }
            b'*' => {
                out.push(Tok { kind: TokKind::Star, offset });
                i += 1;
            }
            b'/' => {
                out.push(Tok { kind: TokKind::Slash, offset });
                i += 1;
            }
            b'^' => {
                out.push(Tok { kind: TokKind::Caret, offset });
                i += 1;
            }
            b'(' => {
                out.push(Tok { kind: TokKind::LParen, offset });
                i += 1;
            }
            b')' => {
                out.push(Tok { kind: TokKind::RParen, offset });
                i += 1;
            }
            b',' => {
                out.push(Tok { kind: TokKind::Comma, offset });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                // Exponent part: only if followed by digits (with optional sign).
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| Error::Parse {
                    offset: start,
                    message: format!("malformed number `{text}`"),
                })?;
                if !value.is_finite() {
                    return Err(Error::Parse {
                        offset: start,
                        message: format!("number `{text}` overflows f64"),
                    });
                }
                out.push(Tok { kind: TokKind::Number(value), offset: start });
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push(Tok {
                    kind: TokKind::Ident(src[start..i].to_string()),
                    offset: start,
                });
            }
            _ => {
                return Err(Error::Parse {
                    offset,
                    message: format!("unexpected character `{}`", src[i..].chars().next().unwrap()),
                });
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    tokens: &'a [Tok],
    pos: usize,
    arity: u8,
    source_len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&'a Tok> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eof_error(&self, expected: &str) -> Error {
        Error::Parse {
            offset: self.source_len,
            message: format!("unexpected end of input, expected {expected}"),
        }
    }

    fn parse_expr(&mut self) -> Result<Node> {
        let mut lhs = self.parse_term()?;
        while let Some(tok) = self.peek() {
            let op = match tok.kind {
                TokKind::Plus => BinOp::Add,
                TokKind::Minus => BinOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.parse_term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_term(&mut self) -> Result<Node> {
        let mut lhs = self.parse_unary()?;
        while let Some(tok) = self.peek() {
            let op = match tok.kind {
                TokKind::Star => BinOp::Mul,
                TokKind::Slash => BinOp::Div,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.parse_unary()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Node> {
        if let Some(tok) = self.peek() {
            if tok.kind == TokKind::Minus {
                self.pos += 1;
                let inner = self.parse_unary()?;
                return Ok(Node::Neg(Box::new(inner)));
            }
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Node> {
        let base = self.parse_atom()?;
        if let Some(tok) = self.peek() {
            if tok.kind == TokKind::Caret {
                self.pos += 1;
                let exponent = self.parse_unary()?;
                return Ok(Node::Binary(
                    BinOp::Pow,
                    Box::new(base),
                    Box::new(exponent),
                ));
            }
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Node> {
        let tok = self.next().ok_or_else(|| self.eof_error("an operand"))?;
        match &tok.kind {
            TokKind::Number(x) => Ok(Node::Number(*x)),
            TokKind::Ident(name) => {
                // Function call?
                if matches!(self.peek().map(|t| &t.kind), Some(TokKind::LParen)) {
                    let func = Func::lookup(name).ok_or_else(|| Error::Parse {
                        offset: tok.offset,
                        message: format!("unknown function `{name}`"),
                    })?;
                    self.pos += 1; // consume '('
                    let mut args = vec![self.parse_expr()?];
                    loop {
                        match self.next() {
                            Some(t) if t.kind == TokKind::Comma => {
                                args.push(self.parse_expr()?);
                            }
                            Some(t) if t.kind == TokKind::RParen => break,
                            Some(t) => {
                                return Err(Error::Parse {
                                    offset: t.offset,
                                    message: format!(
                                        "expected `,` or `)`, found {}",
                                        t.kind.describe()
                                    ),
                                })
                            }
                            None => return Err(self.eof_error("`,` or `)`")),
                        }
                    }
                    if args.len() != func.arg_count() {
                        return Err(Error::Parse {
                            offset: tok.offset,
                            message: format!(
                                "function `{name}` takes {} argument(s), got {}",
                                func.arg_count(),
                                args.len()
                            ),
                        });
                    }
                    return Ok(Node::Call(func, args));
                }
                // Variable.
                let var = match name.as_str() {
                    "t" => VarName::T,
                    "u" => VarName::U,
                    "v" => VarName::V,
                    _ => {
                        return Err(Error::Parse {
                            offset: tok.offset,
                            message: format!("unknown identifier `{name}`"),
                        })
                    }
                };
                if var.arg_index(self.arity).is_none() {
                    return Err(Error::Parse {
                        offset: tok.offset,
                        message: format!(
                            "variable `{}` is not allowed in a {}-argument function",
                            var.as_str(),
                            self.arity
                        ),
                    });
                }
                Ok(Node::Var(var))
            }
            TokKind::LParen => {
                let inner = self.parse_expr()?;
                match self.next() {
                    Some(t) if t.kind == TokKind::RParen => Ok(inner),
                    Some(t) => Err(Error::Parse {
                        offset: t.offset,
                        message: format!("expected `)`, found {}", t.kind.describe()),
                    }),
                    None => Err(self.eof_error("`)`")),
                }
            }
            other => Err(Error::Parse {
                offset: tok.offset,
                message: format!("unexpected {}", other.describe()),
            }),
        }
    }
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

fn write_child(
    f: &mut fmt::Formatter<'_>,
    child: &Node,
    needs_parens: bool,
) -> fmt::Result {
    if needs_parens {
        write!(f, "(")?;
        write_node(f, child)?;
        write!(f, ")")
    } else {
        write_node(f, child)
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, node: &Node) -> fmt::Result {
    match node {
        Node::Number(x) => write!(f, "{x}"),
        Node::Var(v) => write!(f, "{}", v.as_str()),
        Node::Neg(inner) => {
            write!(f, "-")?;
            write_child(f, inner, inner.precedence() < PREC_NEG)
        }
        Node::Binary(op, lhs, rhs) => {
            let p = op.precedence();
            match op {
                // Left-associative: parenthesize the right child at equal
                // precedence so `a - (b - c)` and `a / (b / c)` survive.
                BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div => {
                    write_child(f, lhs, lhs.precedence() < p)?;
                    write!(f, "{}", op.symbol())?;
                    write_child(f, rhs, rhs.precedence() <= p)
                }
                // Right-associative; the grammar admits a unary exponent, so
                // a Neg right child needs no parentheses, but an equal-
                // precedence *left* child does.
                BinOp::Pow => {
                    write_child(f, lhs, lhs.precedence() <= p)?;
                    write!(f, "^")?;
                    write_child(f, rhs, rhs.precedence() < PREC_NEG)
                }
            }
        }
        Node::Call(func, args) => {
            write!(f, "{}(", func.as_str())?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write_node(f, a)?;
            }
            write!(f, ")")
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Eval(format!("{what} produced a non-finite value")))
    }
}

fn pow_checked(base: f64, exponent: f64) -> Result<f64> {
    if base == 0.0 && exponent < 0.0 {
        return Err(Error::Eval(
            "zero raised to a negative power".to_string(),
        ));
    }
    let integral = exponent.fract() == 0.0 && exponent.abs() < 9.0e15;
    if base < 0.0 && !integral {
        return Err(Error::Eval(format!(
            "negative base {base} raised to non-integer power {exponent}"
        )));
    }
    finite(base.powf(exponent), "power")
}

fn eval_node(node: &Node, arity: u8, args: &[f64]) -> Result<f64> {
    match node {
        Node::Number(x) => Ok(*x),
        Node::Var(v) => Ok(args[v.arg_index(arity).expect("validated at parse time")]),
        Node::Neg(inner) => Ok(-eval_node(inner, arity, args)?),
        Node::Binary(op, lhs, rhs) => {
            let a = eval_node(lhs, arity, args)?;
            let b = eval_node(rhs, arity, args)?;
            match op {
                BinOp::Add => finite(a + b, "addition"),
                BinOp::Sub => finite(a - b, "subtraction"),
                BinOp::Mul => finite(a * b, "multiplication"),
                BinOp::Div => {
                    if b == 0.0 {
                        Err(Error::Eval("division by zero".to_string()))
                    } else {
                        finite(a / b, "division")
                    }
                }
                BinOp::Pow => pow_checked(a, b),
            }
        }
        Node::Call(func, call_args) => {
            let a = eval_node(&call_args[0], arity, args)?;
            match func {
                Func::Exp => finite(a.exp(), "exp"),
                Func::Log => {
                    if a <= 0.0 {
                        Err(Error::Eval(format!("log of non-positive value {a}")))
                    } else {
                        finite(a.ln(), "log")
                    }
                }
                Func::Sqrt => {
                    if a < 0.0 {
                        Err(Error::Eval(format!("sqrt of negative value {a}")))
                    } else {
                        Ok(a.sqrt())
                    }
                }
                Func::Abs => Ok(a.abs()),
                Func::Min | Func::Max | Func::Pow => {
                    let b = eval_node(&call_args[1], arity, args)?;
                    match func {
                        Func::Min => Ok(a.min(b)),
                        Func::Max => Ok(a.max(b)),
                        Func::Pow => pow_checked(a, b),
                        _ => unreachable!(),
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Monotonicity sampling
// ---------------------------------------------------------------------------

/// Outcome of [`sample_monotone`].
#[derive(Debug, Clone, PartialEq)]
pub enum MonotoneVerdict {
    /// No decrease beyond rounding tolerance between any consecutive samples.
    NonDecreasing,
    /// A clear decrease was found; carries the first witnessing sample pair.
    Violated {
        x_lo: f64,
        f_lo: f64,
        x_hi: f64,
        f_hi: f64,
    },
    /// Decreases were found but all within the numerical gray zone between
    /// rounding tolerance and the clear-violation threshold.
    Inconclusive,
}

/// Relative rounding tolerance for consecutive-sample comparisons.
const MONOTONE_STEP_TOL: f64 = 1e-12;
/// Violations larger than this (scaled by the sample magnitude) are clear.
const MONOTONE_CLEAR_TOL: f64 = 1e-9;

/// Samples `spec` at `count` uniformly spaced points of `[lo, hi]` in the
/// variable `var_index` and reports whether the samples are non-decreasing.
///
/// For arity-2 specs, `fixed_other` supplies the value of the other
/// variable; it must be `None` for arity-1 specs. `count` must be at least
/// 16. A decrease larger than `1e-9·(1 + max|f|)` yields
/// [`MonotoneVerdict::Violated`] with the first witnessing pair; decreases
/// inside the rounding band yield [`MonotoneVerdict::Inconclusive`].
pub fn sample_monotone(
    spec: &FunctionSpec,
    var_index: usize,
    fixed_other: Option<f64>,
    lo: f64,
    hi: f64,
    count: usize,
) -> Result<MonotoneVerdict> {
    if count < 16 {
        return Err(Error::Invalid(format!(
            "sample_monotone needs at least 16 samples, got {count}"
        )));
    }
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::Invalid(format!(
            "sample_monotone needs a finite interval with lo < hi, got [{lo}, {hi}]"
        )));
    }
    if var_index as u8 >= spec.arity() {
        return Err(Error::Invalid(format!(
            "variable index {var_index} out of range for arity {}",
            spec.arity()
        )));
    }
    let make_args = |x: f64| -> Result<Vec<f64>> {
        match (spec.arity(), fixed_other) {
            (1, None) => Ok(vec![x]),
            (1, Some(_)) => Err(Error::Invalid(
                "fixed_other must be None for an arity-1 function".to_string(),
            )),
            (2, Some(other)) => Ok(if var_index == 0 {
                vec![x, other]
            } else {
                vec![other, x]
            }),
            (2, None) => Err(Error::Invalid(
                "fixed_other is required for an arity-2 function".to_string(),
            )),
            _ => unreachable!(),
        }
    };

    let step = (hi - lo) / (count - 1) as f64;
    let mut xs = Vec::with_capacity(count);
    let mut fs = Vec::with_capacity(count);
    let mut scale: f64 = 0.0;
    for i in 0..count {
        let x = if i + 1 == count { hi } else { lo + step * i as f64 };
        let f = spec.eval(&make_args(x)?)?;
        scale = scale.max(f.abs());
        xs.push(x);
        fs.push(f);
    }

    let clear = MONOTONE_CLEAR_TOL * (1.0 + scale);
    let mut gray_zone = false;
    for i in 0..count - 1 {
        let drop = fs[i] - fs[i + 1];
        if drop > clear {
            return Ok(MonotoneVerdict::Violated {
                x_lo: xs[i],
                f_lo: fs[i],
                x_hi: xs[i + 1],
                f_hi: fs[i + 1],
            });
        }
        let step_tol = MONOTONE_STEP_TOL * (1.0 + fs[i].abs().max(fs[i + 1].abs()));
        if drop > step_tol {
            gray_zone = true;
        }
    }
    if gray_zone {
        Ok(MonotoneVerdict::Inconclusive)
    } else {
        Ok(MonotoneVerdict::NonDecreasing)
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn p1(src: &str) -> FunctionSpec {
        FunctionSpec::parse(src, 1).expect(src)
    }

    fn p2(src: &str) -> FunctionSpec {
        FunctionSpec::parse(src, 2).expect(src)
    }

    #[test]
    fn parses_and_evaluates_weight() {
        let f = p1("t^2*exp(-t)");
        let got = f.eval1(1.0).unwrap();
        let want = (-1.0f64).exp();
        assert!((got - want).abs() <= 1e-15, "got {got}, want {want}");
    }

    #[test]
    fn parses_two_variable_expression() {
        let f = p2("u*v + max(u,v)");
        assert_eq!(f.eval2(2.0, 3.0).unwrap(), 9.0);
    }

    #[test]
    fn unary_minus_binds_below_power() {
        let f = p1("-t^2");
        assert_eq!(f.eval1(3.0).unwrap(), -9.0);
        // And the tree proves it: Neg(Pow(t, 2)).
        match f.root() {
            Node::Neg(inner) => match inner.as_ref() {
                Node::Binary(BinOp::Pow, ..) => {}
                other => panic!("expected power under neg, got {other:?}"),
            },
            other => panic!("expected neg at root, got {other:?}"),
        }
    }

    #[test]
    fn power_is_right_associative() {
        let f = p1("2^3^2");
        assert_eq!(f.eval1(0.0).unwrap(), 512.0);
    }

    #[test]
    fn negative_exponent_without_parens() {
        let f = p1("2^-3");
        assert_eq!(f.eval1(0.0).unwrap(), 0.125);
    }

    #[test]
    fn double_caret_is_syntax_error_at_offset_2() {
        let err = FunctionSpec::parse("t^^2", 1).unwrap_err();
        match err {
            Error::Parse { offset, .. } => assert_eq!(offset, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_reports_name_and_offset() {
        let err = FunctionSpec::parse("w + 1", 1).unwrap_err();
        match err {
            Error::Parse { offset, message } => {
                assert_eq!(offset, 0);
                assert!(message.contains('w'), "message: {message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn v_is_rejected_in_arity_one() {
        let err = FunctionSpec::parse("v + 1", 1).unwrap_err();
        assert!(matches!(err, Error::Parse { offset: 0, .. }), "{err:?}");
    }

    #[test]
    fn t_is_rejected_in_arity_two() {
        assert!(FunctionSpec::parse("t + u", 2).is_err());
    }

    #[test]
    fn call_arity_is_checked() {
        assert!(FunctionSpec::parse("max(u)", 1).is_err());
        assert!(FunctionSpec::parse("exp(u, u)", 1).is_err());
        assert!(FunctionSpec::parse("foo(u)", 1).is_err());
    }

    #[test]
    fn scientific_notation_numbers() {
        let f = p1("1e-2 + t*1.5E3");
        assert_eq!(f.eval1(2.0).unwrap(), 0.01 + 3000.0);
    }

    #[test]
    fn domain_errors_are_reported() {
        assert!(p1("log(t)").eval1(0.0).is_err());
        assert!(p1("log(t)").eval1(-1.0).is_err());
        assert!(p1("sqrt(t)").eval1(-1.0).is_err());
        assert!(p1("1/t").eval1(0.0).is_err());
        assert!(p1("t^0.5").eval1(-2.0).is_err());
        assert!(p1("pow(t, 0.5)").eval1(-2.0).is_err());
        assert!(p1("t^-1").eval1(0.0).is_err());
    }

    #[test]
    fn negative_base_integer_exponent_is_fine() {
        assert_eq!(p1("t^3").eval1(-2.0).unwrap(), -8.0);
        assert_eq!(p1("pow(t, 2)").eval1(-3.0).unwrap(), 9.0);
    }

    #[test]
    fn overflow_is_an_error_not_infinity() {
        assert!(p1("exp(t)").eval1(1.0e6).is_err());
        assert!(p1("t^9").eval1(1.0e300).is_err());
    }

    #[test]
    fn eval_is_pure() {
        let f = p1("t^2*exp(-t) + min(t, 3)/max(t, 0.5)");
        for &x in &[0.0, 0.3, 1.7, 42.0] {
            let a = f.eval1(x).unwrap();
            let b = f.eval1(x).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn display_round_trips_examples() {
        for src in [
            "t^2*exp(-t)",
            "1/(1+t)",
            "(1+t)^(-5/2)",
            "-t^2",
            "2^-3",
            "t - (1 - t)",
            "t/(t/2)",
            "max(u, u^2) + abs(-u)",
            "--t",
            "t^2^3",
            "(t^2)^3",
            "0.5*t + 1e-3",
        ] {
            let parsed = FunctionSpec::parse(src, 1).expect(src);
            let printed = parsed.to_string();
            let reparsed = FunctionSpec::parse(&printed, 1)
                .unwrap_or_else(|e| panic!("reparse of `{printed}` failed: {e}"));
            assert_eq!(parsed.root(), reparsed.root(), "source `{src}` → `{printed}`");
        }
    }

    #[test]
    fn sample_monotone_nondecreasing() {
        let f = p1("u");
        assert_eq!(
            sample_monotone(&f, 0, None, 0.0, 10.0, 64).unwrap(),
            MonotoneVerdict::NonDecreasing
        );
    }

    #[test]
    fn sample_monotone_violation_near_half() {
        let f = p1("u - u^2");
        match sample_monotone(&f, 0, None, 0.0, 10.0, 64).unwrap() {
            MonotoneVerdict::Violated { x_lo, x_hi, .. } => {
                assert!(
                    (0.3..0.7).contains(&x_lo) && x_hi < 0.8,
                    "witness ({x_lo}, {x_hi}) not near 0.5"
                );
            }
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn sample_monotone_decreasing_fails_at_first_pair() {
        let f = p1("1/(1+u)");
        match sample_monotone(&f, 0, None, 0.0, 10.0, 64).unwrap() {
            MonotoneVerdict::Violated { x_lo, .. } => assert_eq!(x_lo, 0.0),
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn sample_monotone_bivariate_slices() {
        let f = p2("u*v");
        // Non-decreasing in u for v = 2 fixed.
        assert_eq!(
            sample_monotone(&f, 0, Some(2.0), 0.0, 10.0, 32).unwrap(),
            MonotoneVerdict::NonDecreasing
        );
        // Decreasing in v for u = -1 fixed.
        assert!(matches!(
            sample_monotone(&f, 1, Some(-1.0), 0.0, 10.0, 32).unwrap(),
            MonotoneVerdict::Violated { .. }
        ));
    }

    #[test]
    fn sample_monotone_validates_inputs() {
        let f = p1("u");
        assert!(sample_monotone(&f, 0, None, 0.0, 1.0, 8).is_err());
        assert!(sample_monotone(&f, 0, None, 1.0, 1.0, 32).is_err());
        assert!(sample_monotone(&f, 1, None, 0.0, 1.0, 32).is_err());
        assert!(sample_monotone(&f, 0, Some(1.0), 0.0, 1.0, 32).is_err());
        let g = p2("u + v");
        assert!(sample_monotone(&g, 0, None, 0.0, 1.0, 32).is_err());
    }

    // -- property tests ----------------------------------------------------

    use proptest::prelude::*;

    fn arb_node(arity: u8) -> impl Strategy<Value = Node> {
        let leaf_nums = prop_oneof![
            Just(0.0f64),
            Just(0.5),
            Just(1.0),
            Just(2.0),
            Just(3.5),
            Just(10.0),
            (0.001f64..1000.0),
        ]
        .prop_map(Node::Number);
        let leaf_vars = if arity == 1 {
            prop_oneof![Just(Node::Var(VarName::T)), Just(Node::Var(VarName::U))].boxed()
        } else {
            prop_oneof![Just(Node::Var(VarName::U)), Just(Node::Var(VarName::V))].boxed()
        };
        let leaf = prop_oneof![leaf_nums, leaf_vars];
        leaf.prop_recursive(4, 48, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone(), any::<u8>()).prop_map(|(a, b, op)| {
                    let op = match op % 5 {
                        0 => BinOp::Add,
                        1 => BinOp::Sub,
                        2 => BinOp::Mul,
                        3 => BinOp::Div,
                        _ => BinOp::Pow,
                    };
                    Node::Binary(op, Box::new(a), Box::new(b))
                }),
                inner.clone().prop_map(|a| Node::Neg(Box::new(a))),
                inner.clone().prop_map(|a| Node::Call(Func::Exp, vec![a])),
                inner.clone().prop_map(|a| Node::Call(Func::Abs, vec![a])),
                inner.clone().prop_map(|a| Node::Call(Func::Sqrt, vec![a])),
                inner.clone().prop_map(|a| Node::Call(Func::Log, vec![a])),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Node::Call(Func::Min, vec![a, b])),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Node::Call(Func::Max, vec![a, b])),
                (inner.clone(), inner)
                    .prop_map(|(a, b)| Node::Call(Func::Pow, vec![a, b])),
            ]
        })
    }

    fn spec_from_node(root: Node, arity: u8) -> FunctionSpec {
        FunctionSpec {
            source: String::new(),
            arity,
            root,
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        /// print → parse recovers the exact tree (arity 1).
        #[test]
        fn print_parse_round_trip_arity1(root in arb_node(1)) {
            let spec = spec_from_node(root, 1);
            let printed = spec.to_string();
            let reparsed = FunctionSpec::parse(&printed, 1)
                .unwrap_or_else(|e| panic!("reparse of `{printed}` failed: {e}"));
            prop_assert_eq!(spec.root(), reparsed.root());
        }

        /// print → parse recovers the exact tree (arity 2).
        #[test]
        fn print_parse_round_trip_arity2(root in arb_node(2)) {
            let spec = spec_from_node(root, 2);
            let printed = spec.to_string();
            let reparsed = FunctionSpec::parse(&printed, 2)
                .unwrap_or_else(|e| panic!("reparse of `{printed}` failed: {e}"));
            prop_assert_eq!(spec.root(), reparsed.root());
        }

        /// Evaluation is pure: same input bits, same output bits.
        #[test]
        fn eval_deterministic(root in arb_node(1), x in 0.0f64..100.0) {
            let spec = spec_from_node(root, 1);
            let a = spec.eval1(x);
            let b = spec.eval1(x);
            match (a, b) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a.to_bits(), b.to_bits()),
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "diverging outcomes {a:?} vs {b:?}"),
            }
        }

        /// sample_monotone never reports NonDecreasing when a clear decrease
        /// exists between two of its own samples.
        #[test]
        fn sample_monotone_sound(root in arb_node(1)) {
            let spec = spec_from_node(root, 1);
            let count = 64;
            if let Ok(verdict) = sample_monotone(&spec, 0, None, 0.0, 10.0, count) {
                let mut worst: f64 = 0.0;
                let step = 10.0 / (count - 1) as f64;
                let mut prev = None;
                for i in 0..count {
                    let x = if i + 1 == count { 10.0 } else { step * i as f64 };
                    let f = spec.eval1(x).unwrap();
                    if let Some(p) = prev {
                        worst = worst.max(p - f);
                    }
                    prev = Some(f);
                }
                if worst > 1e-6 {
                    prop_assert!(verdict != MonotoneVerdict::NonDecreasing);
                }
            }
        }
    }
}
