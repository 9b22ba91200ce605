//! Metric-component expressions in the four independent complex variables
//! `z1, z2, zb1, zb2`.
//!
//! The conjugate variables are *separate symbols*, not an operator: jets with
//! independent Wirtinger directions cannot conjugate intermediate values, so
//! realness of a metric is validated numerically at honest sample points
//! instead of being enforced symbolically.
//!
//! Grammar (left-associative, `^` binds tightest, then unary minus, then
//! `* /`, then `+ -`):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' ['-'] integer)*
//! atom   := number | 'i' | 'pi' | z1 | z2 | zb1 | zb2
//!         | (exp|log|sin|cos|sqrt) '(' expr ')' | '(' expr ')'
//! ```

use crate::domains::DomainModel;
use crate::jets::{C, Jet2, JetError};
use std::fmt;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Z1,
    Z2,
    Zb1,
    Zb2,
}

impl Var {
    /// Wirtinger direction index of this variable (z1, z2, zb1, zb2).
    pub fn dir(self) -> usize {
        match self {
            Var::Z1 => 0,
            Var::Z2 => 1,
            Var::Zb1 => 2,
            Var::Zb2 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::Z1 => "z1",
            Var::Z2 => "z2",
            Var::Zb1 => "zb1",
            Var::Zb2 => "zb2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    I,
    Pi,
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("unknown token {text:?} at byte {pos}")]
    UnknownToken { pos: usize, text: String },
    #[error("unknown name {name:?} at byte {pos}")]
    UnknownName { pos: usize, name: String },
    #[error("syntax error at byte {pos}: expected {expected}, found {found}")]
    Unexpected { pos: usize, expected: &'static str, found: String },
    #[error("syntax error at end of input: expected {expected}")]
    UnexpectedEnd { expected: &'static str },
    #[error("exponent at byte {pos} must be an integer literal")]
    BadExponent { pos: usize },
    #[error("{func} takes exactly one argument (extra argument at byte {pos})")]
    Arity { pos: usize, func: &'static str },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("domain error: {0}")]
    Domain(#[from] JetError),
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => { out.push((Tok::Plus, i)); i += 1; }
            b'-' => { out.push((Tok::Minus, i)); i += 1; }
            b'*' => { out.push((Tok::Star, i)); i += 1; }
            b'/' => { out.push((Tok::Slash, i)); i += 1; }
            b'^' => { out.push((Tok::Caret, i)); i += 1; }
            b'(' => { out.push((Tok::LParen, i)); i += 1; }
            b')' => { out.push((Tok::RParen, i)); i += 1; }
            b',' => { out.push((Tok::Comma, i)); i += 1; }
            b'0'..=b'9' => {
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
                let v: f64 = text.parse().map_err(|_| ParseError::UnknownToken {
                    pos: start,
                    text: text.to_string(),
                })?;
                out.push((Tok::Num(v), start));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((Tok::Name(src[start..i].to_string()), start));
            }
            _ => {
                return Err(ParseError::UnknownToken {
                    pos: i,
                    text: (b as char).to_string(),
                })
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(Tok, usize)> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, expected: &'static str) -> Result<usize, ParseError> {
        match self.bump() {
            Some((t, p)) if t == want => Ok(p),
            Some((t, p)) => Err(ParseError::Unexpected { pos: p, expected, found: format!("{t:?}") }),
            None => Err(ParseError::UnexpectedEnd { expected }),
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some((Tok::Plus, _)) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Bin(BinOp::Add, Box::new(lhs), Box::new(rhs));
                }
                Some((Tok::Minus, _)) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Bin(BinOp::Sub, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some((Tok::Star, _)) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::Bin(BinOp::Mul, Box::new(lhs), Box::new(rhs));
                }
                Some((Tok::Slash, _)) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::Bin(BinOp::Div, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if let Some((Tok::Minus, _)) = self.peek() {
            self.bump();
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.atom()?;
        while let Some((Tok::Caret, _)) = self.peek() {
            self.bump();
            let neg = matches!(self.peek(), Some((Tok::Minus, _)));
            if neg {
                self.bump();
            }
            match self.bump() {
                Some((Tok::Num(v), p)) => {
                    if v.fract() != 0.0 || v.abs() > i32::MAX as f64 {
                        return Err(ParseError::BadExponent { pos: p });
                    }
                    let mut n = v as i32;
                    if neg {
                        n = -n;
                    }
                    base = Expr::Pow(Box::new(base), n);
                }
                Some((_, p)) => return Err(ParseError::BadExponent { pos: p }),
                None => return Err(ParseError::UnexpectedEnd { expected: "integer exponent" }),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.bump() {
            Some((Tok::Num(v), _)) => Ok(Expr::Num(v)),
            Some((Tok::LParen, _)) => {
                let e = self.sum()?;
                self.expect(Tok::RParen, "closing parenthesis")?;
                Ok(e)
            }
            Some((Tok::Name(name), pos)) => match name.as_str() {
                "i" => Ok(Expr::I),
                "pi" => Ok(Expr::Pi),
                "z1" => Ok(Expr::Var(Var::Z1)),
                "z2" => Ok(Expr::Var(Var::Z2)),
                "zb1" => Ok(Expr::Var(Var::Zb1)),
                "zb2" => Ok(Expr::Var(Var::Zb2)),
                "exp" | "log" | "sin" | "cos" | "sqrt" => {
                    let func = match name.as_str() {
                        "exp" => Func::Exp,
                        "log" => Func::Log,
                        "sin" => Func::Sin,
                        "cos" => Func::Cos,
                        _ => Func::Sqrt,
                    };
                    self.expect(Tok::LParen, "opening parenthesis after function name")?;
                    let arg = self.sum()?;
                    if let Some((Tok::Comma, p)) = self.peek() {
                        return Err(ParseError::Arity { pos: *p, func: func.name() });
                    }
                    self.expect(Tok::RParen, "closing parenthesis")?;
                    Ok(Expr::Call(func, Box::new(arg)))
                }
                _ => Err(ParseError::UnknownName { pos, name }),
            },
            Some((t, p)) => Err(ParseError::Unexpected {
                pos: p,
                expected: "literal, variable, function or parenthesis",
                found: format!("{t:?}"),
            }),
            None => Err(ParseError::UnexpectedEnd {
                expected: "literal, variable, function or parenthesis",
            }),
        }
    }
}

/// Parse a metric-component expression.
pub fn parse(source: &str) -> Result<Expr, ParseError> {
    let toks = lex(source)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.sum()?;
    match p.peek() {
        None => Ok(e),
        Some((t, pos)) => Err(ParseError::Unexpected {
            pos: *pos,
            expected: "end of input",
            found: format!("{t:?}"),
        }),
    }
}

// ---------------------------------------------------------------------------
// Unparser
// ---------------------------------------------------------------------------

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Pow(..) => 4,
        _ => 5,
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn wrap(f: &mut fmt::Formatter<'_>, e: &Expr, need: bool) -> fmt::Result {
            if need {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::I => write!(f, "i"),
            Expr::Pi => write!(f, "pi"),
            Expr::Var(v) => write!(f, "{}", v.name()),
            Expr::Neg(e) => {
                write!(f, "-")?;
                wrap(f, e, prec(e) < 3)
            }
            Expr::Bin(op, l, r) => {
                let p = prec(self);
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                wrap(f, l, prec(l) < p)?;
                write!(f, " {sym} ")?;
                wrap(f, r, prec(r) <= p)
            }
            Expr::Pow(b, n) => {
                wrap(f, b, prec(b) < 4)?;
                write!(f, "^{n}")
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// Render an expression back to source text (`Display` does the same).
pub fn unparse(e: &Expr) -> String {
    e.to_string()
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Evaluate the 2-jet of `e` at `p = (z1, z2, zb1, zb2)`.
///
/// The point need not satisfy `zb = conj(z)`; analytic continuation off the
/// honest locus is permitted (and used by tests).
pub fn eval_jet(e: &Expr, p: [C; 4]) -> Result<Jet2, EvalError> {
    Ok(match e {
        Expr::Num(v) => Jet2::real(*v),
        Expr::I => Jet2::constant(C::new(0.0, 1.0)),
        Expr::Pi => Jet2::real(std::f64::consts::PI),
        Expr::Var(v) => {
            let k = v.dir();
            Jet2::seed(k, p[k]).expect("direction in range")
        }
        Expr::Neg(a) => -eval_jet(a, p)?,
        Expr::Bin(op, l, r) => {
            let a = eval_jet(l, p)?;
            let b = eval_jet(r, p)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a.div(&b)?,
            }
        }
        Expr::Pow(b, n) => eval_jet(b, p)?.powi(*n)?,
        Expr::Call(func, a) => {
            let x = eval_jet(a, p)?;
            match func {
                Func::Exp => x.exp(),
                Func::Log => x.ln()?,
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Sqrt => x.sqrt()?,
            }
        }
    })
}

/// Plain complex evaluation, deliberately independent of the jet path; this
/// is what the finite-difference oracle samples.
pub fn eval_value(e: &Expr, p: [C; 4]) -> Result<C, EvalError> {
    Ok(match e {
        Expr::Num(v) => C::new(*v, 0.0),
        Expr::I => C::new(0.0, 1.0),
        Expr::Pi => C::new(std::f64::consts::PI, 0.0),
        Expr::Var(v) => p[v.dir()],
        Expr::Neg(a) => -eval_value(a, p)?,
        Expr::Bin(op, l, r) => {
            let a = eval_value(l, p)?;
            let b = eval_value(r, p)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b.norm() < 1e-300 {
                        return Err(JetError::DivisionByZero(b.norm()).into());
                    }
                    a / b
                }
            }
        }
        Expr::Pow(b, n) => {
            let x = eval_value(b, p)?;
            if *n < 0 && x.norm() < 1e-300 {
                return Err(JetError::DivisionByZero(x.norm()).into());
            }
            x.powi(*n)
        }
        Expr::Call(func, a) => {
            let x = eval_value(a, p)?;
            match func {
                Func::Exp => x.exp(),
                Func::Log | Func::Sqrt => {
                    if x.norm() < 1e-300 || (x.im == 0.0 && x.re < 0.0) {
                        return Err(JetError::BranchCut {
                            func: if matches!(func, Func::Log) { "log" } else { "sqrt" },
                            value: x,
                        }
                        .into());
                    }
                    if matches!(func, Func::Log) {
                        x.ln()
                    } else {
                        x.sqrt()
                    }
                }
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
            }
        }
    })
}

/// Finite-difference Wirtinger derivative of an expression (see
/// [`crate::jets::fd_oracle`]).
pub fn fd_oracle_expr(
    e: &Expr,
    p: [C; 4],
    dirs: &[usize],
    step: f64,
    richardson: bool,
) -> Result<C, EvalError> {
    crate::jets::fd_oracle(&|q| eval_value(e, q), p, dirs, step, richardson)
}

// ---------------------------------------------------------------------------
// Metric fields
// ---------------------------------------------------------------------------

/// Hermitian-symmetry / positivity tolerance used when loading metric files.
pub const METRIC_VALIDATION_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid metric file: {0}")]
    Format(String),
    #[error("component {component}: {source}")]
    Parse { component: &'static str, source: ParseError },
    #[error("component {component} failed to evaluate at {point:?}: {source}")]
    Eval { component: &'static str, point: [C; 4], source: EvalError },
    #[error("Hermitian symmetry violated: residual {residual:e} at {point:?}")]
    Hermitian { point: [C; 4], residual: f64 },
    #[error("metric not positive definite at {point:?}: {what} = {value}")]
    NotPositive { point: [C; 4], what: &'static str, value: C },
}

/// Four parsed metric components `h_{i jbar}` over a domain model.
#[derive(Debug, Clone)]
pub struct MetricField {
    pub name: String,
    pub domain: DomainModel,
    /// `h[i][j]` is the component h_{i jbar}, indices 0-based.
    pub h: [[Expr; 2]; 2],
}

#[derive(serde::Deserialize)]
struct MetricDoc {
    metric: MetricSection,
    torus: Option<TorusSection>,
    #[allow(dead_code)]
    hopf: Option<toml::Value>,
}

#[derive(serde::Deserialize)]
struct MetricSection {
    name: String,
    domain: String,
    h11: String,
    h12: String,
    h21: String,
    h22: String,
}

#[derive(serde::Deserialize)]
struct TorusSection {
    periods: Option<[f64; 4]>,
}

impl MetricField {
    /// Parse and validate a metric from TOML text.
    pub fn from_toml_str(text: &str) -> Result<Self, MetricError> {
        let doc: MetricDoc =
            toml::from_str(text).map_err(|e| MetricError::Format(e.to_string()))?;
        let domain = match doc.metric.domain.as_str() {
            "torus" => {
                let periods = doc
                    .torus
                    .and_then(|t| t.periods)
                    .unwrap_or([1.0, 1.0, 1.0, 1.0]);
                if periods.iter().any(|p| *p <= 0.0) {
                    return Err(MetricError::Format("torus periods must be positive".into()));
                }
                DomainModel::Torus { periods }
            }
            "hopf" => DomainModel::Hopf,
            other => {
                return Err(MetricError::Format(format!(
                    "domain must be \"torus\" or \"hopf\", got {other:?}"
                )))
            }
        };
        let comp = |name: &'static str, src: &str| {
            parse(src).map_err(|source| MetricError::Parse { component: name, source })
        };
        let field = MetricField {
            name: doc.metric.name,
            domain,
            h: [
                [comp("h11", &doc.metric.h11)?, comp("h12", &doc.metric.h12)?],
                [comp("h21", &doc.metric.h21)?, comp("h22", &doc.metric.h22)?],
            ],
        };
        field.validate(64, 1)?;
        Ok(field)
    }

    /// Load a metric file from disk (see the metric-file format in the README).
    pub fn load(path: &Path) -> Result<Self, MetricError> {
        let text = std::fs::read_to_string(path).map_err(|source| MetricError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// Component jets at a point.
    pub fn h_jets(&self, p: [C; 4]) -> Result<[[Jet2; 2]; 2], MetricError> {
        let names = [["h11", "h12"], ["h21", "h22"]];
        let mut out = [[Jet2::zero(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = eval_jet(&self.h[i][j], p).map_err(|source| MetricError::Eval {
                    component: names[i][j],
                    point: p,
                    source,
                })?;
            }
        }
        Ok(out)
    }

    /// Component values at a point through the oracle-facing evaluator.
    pub fn h_values(&self, p: [C; 4]) -> Result<[[C; 2]; 2], MetricError> {
        let names = [["h11", "h12"], ["h21", "h22"]];
        let mut out = [[C::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] =
                    eval_value(&self.h[i][j], p).map_err(|source| MetricError::Eval {
                        component: names[i][j],
                        point: p,
                        source,
                    })?;
            }
        }
        Ok(out)
    }

    /// Hermitian symmetry and positivity at a deterministic low-discrepancy
    /// sample of the domain.
    pub fn validate(&self, samples: usize, seed: u64) -> Result<(), MetricError> {
        let mut worst = (0.0_f64, [C::new(0.0, 0.0); 4]);
        for p in self.domain.sample_points(samples, seed) {
            let h = self.h_values(p)?;
            let scale = h
                .iter()
                .flatten()
                .map(|c| c.norm())
                .fold(1.0_f64, f64::max);
            let res = (h[1][0] - h[0][1].conj())
                .norm()
                .max(h[0][0].im.abs())
                .max(h[1][1].im.abs())
                / scale;
            if res > worst.0 {
                worst = (res, p);
            }
            if res <= METRIC_VALIDATION_TOL {
                if h[0][0].re <= 0.0 {
                    return Err(MetricError::NotPositive { point: p, what: "h11", value: h[0][0] });
                }
                let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
                if det.re <= 0.0 {
                    return Err(MetricError::NotPositive { point: p, what: "det h", value: det });
                }
            }
        }
        if worst.0 > METRIC_VALIDATION_TOL {
            return Err(MetricError::Hermitian { point: worst.1, residual: worst.0 });
        }
        Ok(())
    }

    /// The field with every component multiplied by a positive constant.
    pub fn scaled(&self, lambda: f64) -> MetricField {
        let mul = |e: &Expr| {
            Expr::Bin(BinOp::Mul, Box::new(Expr::Num(lambda)), Box::new(e.clone()))
        };
        MetricField {
            name: format!("{}_x{lambda}", self.name),
            domain: self.domain.clone(),
            h: [
                [mul(&self.h[0][0]), mul(&self.h[0][1])],
                [mul(&self.h[1][0]), mul(&self.h[1][1])],
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn parses_with_expected_shape() {
        let e = parse("z1*zb1 + z2*zb2").unwrap();
        assert_eq!(
            e,
            Expr::Bin(
                BinOp::Add,
                Box::new(Expr::Bin(
                    BinOp::Mul,
                    Box::new(Expr::Var(Var::Z1)),
                    Box::new(Expr::Var(Var::Zb1))
                )),
                Box::new(Expr::Bin(
                    BinOp::Mul,
                    Box::new(Expr::Var(Var::Z2)),
                    Box::new(Expr::Var(Var::Zb2))
                )),
            )
        );
        let e = parse("1/(z1*zb1 + z2*zb2)").unwrap();
        match e {
            Expr::Bin(BinOp::Div, l, _) => assert_eq!(*l, Expr::Num(1.0)),
            other => panic!("expected division, got {other:?}"),
        }
        parse("exp(0.1*cos(3.14159*(z1+zb1)))").unwrap();
        assert!(matches!(
            parse("exp("),
            Err(ParseError::UnexpectedEnd { .. })
        ));
    }

    #[test]
    fn precedence_and_errors() {
        // ^ binds tighter than unary minus.
        let e = parse("-z1^2").unwrap();
        assert_eq!(e, Expr::Neg(Box::new(Expr::Pow(Box::new(Expr::Var(Var::Z1)), 2))));
        assert!(matches!(parse("z1^z2"), Err(ParseError::BadExponent { .. })));
        assert!(matches!(parse("z1^2.5"), Err(ParseError::BadExponent { .. })));
        assert!(matches!(parse("exp(z1, z2)"), Err(ParseError::Arity { .. })));
        assert!(matches!(parse("w1"), Err(ParseError::UnknownName { .. })));
        assert!(matches!(parse("z1 $ z2"), Err(ParseError::UnknownToken { .. })));
        // Left associativity of subtraction.
        let e = parse("z1 - z2 - 1").unwrap();
        assert_eq!(unparse(&e), "z1 - z2 - 1");
        let e = parse("z1 - (z2 - 1)").unwrap();
        assert_eq!(unparse(&e), "z1 - (z2 - 1)");
    }

    #[test]
    fn unparse_is_fixed_point() {
        for src in [
            "z1*zb1 + z2*zb2",
            "1/(z1*zb1 + z2*zb2)",
            "exp(0.1*cos(pi*(z1+zb1)))",
            "-z1^2 + (z1 - z2)*i/(1 + zb1^3)",
            "sqrt(z1^2 + 4)*sin(z2) - cos(zb2)^2",
            "z1^-2",
        ] {
            let e1 = parse(src).unwrap();
            let s1 = unparse(&e1);
            let e2 = parse(&s1).unwrap();
            assert_eq!(e1, e2, "round trip changed the tree for {src:?}");
            assert_eq!(s1, unparse(&e2));
        }
    }

    #[test]
    fn eval_jet_examples() {
        let p = [c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        let e = parse("z1*zb1").unwrap();
        let j = eval_jet(&e, p).unwrap();
        assert_eq!(j.val, c(1.0, 0.0));
        assert_eq!(j.d[0], c(1.0, 0.0));
        assert_eq!(j.d[2], c(1.0, 0.0));
        assert_eq!(j.dd_at(0, 2), c(1.0, 0.0));
        assert_eq!(j.dd_at(0, 0), c(0.0, 0.0));

        let e = parse("1/(z1*zb1+z2*zb2)").unwrap();
        let j = eval_jet(&e, p).unwrap();
        assert!((j.val - c(1.0, 0.0)).norm() < 1e-15);
        assert!((j.d[0] + c(1.0, 0.0)).norm() < 1e-15);
        assert!((j.dd_at(0, 2) - c(1.0, 0.0)).norm() < 1e-14);

        let e = parse("exp(z1)").unwrap();
        let j = eval_jet(&e, [c(0.0, 0.0); 4]).unwrap();
        assert_eq!(j.val, c(1.0, 0.0));
        assert_eq!(j.d[0], c(1.0, 0.0));
        assert_eq!(j.dd_at(0, 0), c(1.0, 0.0));
    }

    #[test]
    fn holomorphic_expressions_have_zero_zb_slots() {
        let e = parse("exp(z1^2 - z2)*sin(z1*z2) + z1^3/(2 + z2^2)").unwrap();
        let p = [c(0.3, 0.1), c(-0.2, 0.4), c(0.3, -0.1), c(-0.2, -0.4)];
        let j = eval_jet(&e, p).unwrap();
        for k in 2..4 {
            assert_eq!(j.d[k], c(0.0, 0.0));
            for l in 0..4 {
                assert_eq!(j.dd_at(k, l), c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn load_metric_validates() {
        let good = r#"
[metric]
name = "flat"
domain = "torus"
h11 = "1"
h12 = "0"
h21 = "0"
h22 = "1"
"#;
        let m = MetricField::from_toml_str(good).unwrap();
        assert_eq!(m.name, "flat");

        let bad = r#"
[metric]
name = "bad"
domain = "torus"
h11 = "1"
h12 = "z1"
h21 = "z1"
h22 = "1"
"#;
        match MetricField::from_toml_str(bad) {
            Err(MetricError::Hermitian { residual, .. }) => assert!(residual > 1e-3),
            other => panic!("expected Hermitian violation, got {other:?}"),
        }

        let indefinite = r#"
[metric]
name = "indef"
domain = "torus"
h11 = "-1"
h12 = "0"
h21 = "0"
h22 = "1"
"#;
        assert!(matches!(
            MetricField::from_toml_str(indefinite),
            Err(MetricError::NotPositive { .. })
        ));
    }
}
