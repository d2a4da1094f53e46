//! Expression trees for the right-hand side `f(x, u, u')` of the boundary
//! value problem: parsing, symbolic differentiation, simplification and
//! evaluation in both `f64` and interval arithmetic.
//!
//! Nodes are reference counted, so differentiation shares subtrees instead
//! of copying them; fourth derivatives of composed integrands stay cheap to
//! build. Constant subexpressions are folded only when the folded double is
//! exactly the real result, which keeps interval evaluation of the folded
//! tree a valid enclosure of the original function.

use crate::interval::{const_pi, Interval, IntervalError};
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    U,
    V,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X => write!(f, "x"),
            Var::U => write!(f, "u"),
            Var::V => write!(f, "up"),
        }
    }
}

#[derive(Debug)]
enum Node {
    Const(f64),
    Pi,
    Var(Var),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Neg(Expr),
    PowInt(Expr, u32),
    Sin(Expr),
    Cos(Expr),
    Exp(Expr),
}

/// An immutable expression in the variables `x`, `u`, `up`.
#[derive(Debug, Clone)]
pub struct Expr(Arc<Node>);

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    /// Float evaluation divided by exactly zero.
    DivisionByZero,
    /// Interval evaluation hit a denominator whose enclosure contains zero.
    DivisionByZeroInterval,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::DivisionByZero => write!(f, "division by zero"),
            EvalError::DivisionByZeroInterval => {
                write!(f, "division by an interval containing zero")
            }
        }
    }
}

impl std::error::Error for EvalError {}

// Exactness predicates for constant folding. A fold is allowed only when the
// rounded double equals the real-number result, so enclosures of the folded
// tree still contain the original function value.

fn add_exact(a: f64, b: f64, s: f64) -> bool {
    // TwoSum error term; exactly representable for all finite doubles.
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    err == 0.0 && s.is_finite()
}

fn mul_exact(a: f64, b: f64, p: f64) -> bool {
    if !p.is_finite() {
        return false;
    }
    // fma residual detects an inexact product; guard against underflow where
    // the residual itself could round to zero.
    if p != 0.0 && p.abs() < f64::MIN_POSITIVE {
        return false;
    }
    a.mul_add(b, -p) == 0.0
}

fn div_exact(a: f64, b: f64, q: f64) -> bool {
    if b == 0.0 || !q.is_finite() {
        return false;
    }
    if q != 0.0 && q.abs() < f64::MIN_POSITIVE {
        return false;
    }
    q.mul_add(b, -a) == 0.0
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        assert!(c.is_finite(), "expression constants must be finite");
        Expr(Arc::new(Node::Const(c)))
    }

    pub fn pi() -> Expr {
        Expr(Arc::new(Node::Pi))
    }

    pub fn var(v: Var) -> Expr {
        Expr(Arc::new(Node::Var(v)))
    }

    fn as_const(&self) -> Option<f64> {
        match &*self.0 {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn add(a: &Expr, b: &Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            let s = x + y;
            if add_exact(x, y, s) {
                return Expr::constant(s);
            }
        }
        if a.as_const() == Some(0.0) {
            return b.clone();
        }
        if b.as_const() == Some(0.0) {
            return a.clone();
        }
        Expr(Arc::new(Node::Add(a.clone(), b.clone())))
    }

    pub fn sub(a: &Expr, b: &Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            let s = x - y;
            if add_exact(x, -y, s) {
                return Expr::constant(s);
            }
        }
        if b.as_const() == Some(0.0) {
            return a.clone();
        }
        if a.as_const() == Some(0.0) {
            return Expr::neg(b);
        }
        Expr(Arc::new(Node::Sub(a.clone(), b.clone())))
    }

    pub fn mul(a: &Expr, b: &Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            let p = x * y;
            if mul_exact(x, y, p) {
                return Expr::constant(p);
            }
        }
        if a.as_const() == Some(0.0) || b.as_const() == Some(0.0) {
            return Expr::constant(0.0);
        }
        if a.as_const() == Some(1.0) {
            return b.clone();
        }
        if b.as_const() == Some(1.0) {
            return a.clone();
        }
        Expr(Arc::new(Node::Mul(a.clone(), b.clone())))
    }

    pub fn div(a: &Expr, b: &Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            let q = x / y;
            if div_exact(x, y, q) {
                return Expr::constant(q);
            }
        }
        if b.as_const() == Some(1.0) {
            return a.clone();
        }
        Expr(Arc::new(Node::Div(a.clone(), b.clone())))
    }

    pub fn neg(a: &Expr) -> Expr {
        if let Some(x) = a.as_const() {
            return Expr::constant(-x);
        }
        if let Node::Neg(inner) = &*a.0 {
            return inner.clone();
        }
        Expr(Arc::new(Node::Neg(a.clone())))
    }

    pub fn pow_int(a: &Expr, n: u32) -> Expr {
        match n {
            0 => Expr::constant(1.0),
            1 => a.clone(),
            _ => {
                if let Some(x) = a.as_const() {
                    // fold only when every squaring/multiply is exact
                    let mut acc = 1.0f64;
                    let mut exact = true;
                    for _ in 0..n {
                        let p = acc * x;
                        if !mul_exact(acc, x, p) {
                            exact = false;
                            break;
                        }
                        acc = p;
                    }
                    if exact {
                        return Expr::constant(acc);
                    }
                }
                Expr(Arc::new(Node::PowInt(a.clone(), n)))
            }
        }
    }

    pub fn sin(a: &Expr) -> Expr {
        if a.as_const() == Some(0.0) {
            return Expr::constant(0.0);
        }
        Expr(Arc::new(Node::Sin(a.clone())))
    }

    pub fn cos(a: &Expr) -> Expr {
        if a.as_const() == Some(0.0) {
            return Expr::constant(1.0);
        }
        Expr(Arc::new(Node::Cos(a.clone())))
    }

    pub fn exp(a: &Expr) -> Expr {
        if a.as_const() == Some(0.0) {
            return Expr::constant(1.0);
        }
        Expr(Arc::new(Node::Exp(a.clone())))
    }

    /// Exact symbolic derivative with respect to `var`.
    pub fn diff(&self, var: Var) -> Expr {
        match &*self.0 {
            Node::Const(_) | Node::Pi => Expr::constant(0.0),
            Node::Var(v) => Expr::constant(if *v == var { 1.0 } else { 0.0 }),
            Node::Add(a, b) => Expr::add(&a.diff(var), &b.diff(var)),
            Node::Sub(a, b) => Expr::sub(&a.diff(var), &b.diff(var)),
            Node::Mul(a, b) => Expr::add(
                &Expr::mul(&a.diff(var), b),
                &Expr::mul(a, &b.diff(var)),
            ),
            Node::Div(a, b) => {
                let num = Expr::sub(
                    &Expr::mul(&a.diff(var), b),
                    &Expr::mul(a, &b.diff(var)),
                );
                Expr::div(&num, &Expr::pow_int(b, 2))
            }
            Node::Neg(a) => Expr::neg(&a.diff(var)),
            Node::PowInt(a, n) => {
                // n >= 2 after smart construction
                let coeff = Expr::constant(*n as f64);
                Expr::mul(
                    &Expr::mul(&coeff, &Expr::pow_int(a, n - 1)),
                    &a.diff(var),
                )
            }
            Node::Sin(a) => Expr::mul(&Expr::cos(a), &a.diff(var)),
            Node::Cos(a) => Expr::neg(&Expr::mul(&Expr::sin(a), &a.diff(var))),
            Node::Exp(a) => Expr::mul(&Expr::exp(a), &a.diff(var)),
        }
    }

    /// Rebuilds the tree bottom-up through the folding constructors.
    pub fn simplify(&self) -> Expr {
        match &*self.0 {
            Node::Const(_) | Node::Pi | Node::Var(_) => self.clone(),
            Node::Add(a, b) => Expr::add(&a.simplify(), &b.simplify()),
            Node::Sub(a, b) => Expr::sub(&a.simplify(), &b.simplify()),
            Node::Mul(a, b) => Expr::mul(&a.simplify(), &b.simplify()),
            Node::Div(a, b) => Expr::div(&a.simplify(), &b.simplify()),
            Node::Neg(a) => Expr::neg(&a.simplify()),
            Node::PowInt(a, n) => Expr::pow_int(&a.simplify(), *n),
            Node::Sin(a) => Expr::sin(&a.simplify()),
            Node::Cos(a) => Expr::cos(&a.simplify()),
            Node::Exp(a) => Expr::exp(&a.simplify()),
        }
    }

    pub fn eval_float(&self, x: f64, u: f64, v: f64) -> Result<f64, EvalError> {
        Ok(match &*self.0 {
            Node::Const(c) => *c,
            Node::Pi => std::f64::consts::PI,
            Node::Var(Var::X) => x,
            Node::Var(Var::U) => u,
            Node::Var(Var::V) => v,
            Node::Add(a, b) => a.eval_float(x, u, v)? + b.eval_float(x, u, v)?,
            Node::Sub(a, b) => a.eval_float(x, u, v)? - b.eval_float(x, u, v)?,
            Node::Mul(a, b) => a.eval_float(x, u, v)? * b.eval_float(x, u, v)?,
            Node::Div(a, b) => {
                let den = b.eval_float(x, u, v)?;
                if den == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                a.eval_float(x, u, v)? / den
            }
            Node::Neg(a) => -a.eval_float(x, u, v)?,
            Node::PowInt(a, n) => a.eval_float(x, u, v)?.powi(*n as i32),
            Node::Sin(a) => a.eval_float(x, u, v)?.sin(),
            Node::Cos(a) => a.eval_float(x, u, v)?.cos(),
            Node::Exp(a) => a.eval_float(x, u, v)?.exp(),
        })
    }

    pub fn eval_interval(
        &self,
        x: &Interval,
        u: &Interval,
        v: &Interval,
    ) -> Result<Interval, EvalError> {
        Ok(match &*self.0 {
            Node::Const(c) => Interval::point(*c),
            Node::Pi => const_pi(),
            Node::Var(Var::X) => *x,
            Node::Var(Var::U) => *u,
            Node::Var(Var::V) => *v,
            Node::Add(a, b) => a.eval_interval(x, u, v)?.add(&b.eval_interval(x, u, v)?),
            Node::Sub(a, b) => a.eval_interval(x, u, v)?.sub(&b.eval_interval(x, u, v)?),
            Node::Mul(a, b) => a.eval_interval(x, u, v)?.mul(&b.eval_interval(x, u, v)?),
            Node::Div(a, b) => {
                let den = b.eval_interval(x, u, v)?;
                match a.eval_interval(x, u, v)?.div(&den) {
                    Ok(iv) => iv,
                    Err(IntervalError::DivisionByZero) => {
                        return Err(EvalError::DivisionByZeroInterval)
                    }
                    Err(e) => unreachable!("div reported {e}"),
                }
            }
            Node::Neg(a) => a.eval_interval(x, u, v)?.neg(),
            Node::PowInt(a, n) => a.eval_interval(x, u, v)?.pow_int(*n),
            Node::Sin(a) => a.eval_interval(x, u, v)?.sin(),
            Node::Cos(a) => a.eval_interval(x, u, v)?.cos(),
            Node::Exp(a) => a.eval_interval(x, u, v)?.exp(),
        })
    }

    /// Substitutes `u := w(x)` and `up := dw(x)` and wraps the result as a
    /// univariate expression in `x`.
    pub fn substitute_path(&self, w: &Expr, dw: &Expr) -> PathExpr {
        PathExpr::new(self.subst(w, dw)).expect("substitution removed all u, up nodes")
    }

    fn subst(&self, w: &Expr, dw: &Expr) -> Expr {
        match &*self.0 {
            Node::Const(_) | Node::Pi => self.clone(),
            Node::Var(Var::X) => self.clone(),
            Node::Var(Var::U) => w.clone(),
            Node::Var(Var::V) => dw.clone(),
            Node::Add(a, b) => Expr::add(&a.subst(w, dw), &b.subst(w, dw)),
            Node::Sub(a, b) => Expr::sub(&a.subst(w, dw), &b.subst(w, dw)),
            Node::Mul(a, b) => Expr::mul(&a.subst(w, dw), &b.subst(w, dw)),
            Node::Div(a, b) => Expr::div(&a.subst(w, dw), &b.subst(w, dw)),
            Node::Neg(a) => Expr::neg(&a.subst(w, dw)),
            Node::PowInt(a, n) => Expr::pow_int(&a.subst(w, dw), *n),
            Node::Sin(a) => Expr::sin(&a.subst(w, dw)),
            Node::Cos(a) => Expr::cos(&a.subst(w, dw)),
            Node::Exp(a) => Expr::exp(&a.subst(w, dw)),
        }
    }

    fn depends_on(&self, var: Var) -> bool {
        match &*self.0 {
            Node::Const(_) | Node::Pi => false,
            Node::Var(v) => *v == var,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.depends_on(var) || b.depends_on(var)
            }
            Node::Neg(a) | Node::Sin(a) | Node::Cos(a) | Node::Exp(a) => a.depends_on(var),
            Node::PowInt(a, _) => a.depends_on(var),
        }
    }

    /// True when the expression is literally the constant `c`.
    pub fn is_const(&self, c: f64) -> bool {
        self.as_const() == Some(c)
    }

    pub fn uses(&self, var: Var) -> bool {
        self.depends_on(var)
    }

    fn prec(&self) -> u8 {
        match &*self.0 {
            Node::Add(..) | Node::Sub(..) => 1,
            Node::Mul(..) | Node::Div(..) => 2,
            Node::Neg(..) => 3,
            Node::PowInt(..) => 4,
            Node::Const(c) if *c < 0.0 => 3,
            _ => 5,
        }
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Expr) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (&*self.0, &*other.0) {
            (Node::Const(a), Node::Const(b)) => a == b,
            (Node::Pi, Node::Pi) => true,
            (Node::Var(a), Node::Var(b)) => a == b,
            (Node::Add(a1, b1), Node::Add(a2, b2))
            | (Node::Sub(a1, b1), Node::Sub(a2, b2))
            | (Node::Mul(a1, b1), Node::Mul(a2, b2))
            | (Node::Div(a1, b1), Node::Div(a2, b2)) => a1 == a2 && b1 == b2,
            (Node::Neg(a), Node::Neg(b))
            | (Node::Sin(a), Node::Sin(b))
            | (Node::Cos(a), Node::Cos(b))
            | (Node::Exp(a), Node::Exp(b)) => a == b,
            (Node::PowInt(a, n), Node::PowInt(b, m)) => n == m && a == b,
            _ => false,
        }
    }
}

// Precedence-aware printer; output reparses to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
            if e.prec() < min_prec {
                write!(f, "(")?;
                fmt::Display::fmt(e, f)?;
                write!(f, ")")
            } else {
                fmt::Display::fmt(e, f)
            }
        }
        match &*self.0 {
            Node::Const(c) => write!(f, "{c}"),
            Node::Pi => write!(f, "pi"),
            Node::Var(v) => write!(f, "{v}"),
            Node::Add(a, b) => {
                child(f, a, 1)?;
                write!(f, " + ")?;
                child(f, b, 2)
            }
            Node::Sub(a, b) => {
                child(f, a, 1)?;
                write!(f, " - ")?;
                child(f, b, 2)
            }
            Node::Mul(a, b) => {
                child(f, a, 2)?;
                write!(f, "*")?;
                child(f, b, 3)
            }
            Node::Div(a, b) => {
                child(f, a, 2)?;
                write!(f, "/")?;
                child(f, b, 3)
            }
            Node::Neg(a) => {
                write!(f, "-")?;
                child(f, a, 3)
            }
            Node::PowInt(a, n) => {
                child(f, a, 5)?;
                write!(f, "^{n}")
            }
            Node::Sin(a) => write!(f, "sin({a})"),
            Node::Cos(a) => write!(f, "cos({a})"),
            Node::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

/// A univariate expression in `x`, produced by substituting a trigonometric
/// polynomial path into the variables `u` and `up`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathExpr(Expr);

impl PathExpr {
    pub fn new(e: Expr) -> Option<PathExpr> {
        if e.depends_on(Var::U) || e.depends_on(Var::V) {
            None
        } else {
            Some(PathExpr(e))
        }
    }

    pub fn expr(&self) -> &Expr {
        &self.0
    }

    pub fn diff_x(&self) -> PathExpr {
        PathExpr(self.0.diff(Var::X))
    }

    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        self.0.eval_float(x, 0.0, 0.0)
    }

    pub fn eval_interval(&self, x: &Interval) -> Result<Interval, EvalError> {
        let zero = Interval::point(0.0);
        self.0.eval_interval(x, &zero, &zero)
    }
}

impl fmt::Display for PathExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.pos, self.msg)
    }
}

impl std::error::Error for ParseError {}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

/// Parses the expression grammar: variables `x`, `u`, `up`; functions
/// `sin`, `cos`, `exp`; the constant `pi`; operators `+ - * / ^` with the
/// usual precedence; parentheses; decimal literals. Exponents of `^` must
/// be nonnegative integer literals.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                acc = Expr::add(&acc, &rhs);
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                acc = Expr::sub(&acc, &rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.factor()?;
                acc = Expr::mul(&acc, &rhs);
            } else if self.eat(b'/') {
                let rhs = self.factor()?;
                acc = Expr::div(&acc, &rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            let inner = self.factor()?;
            return Ok(Expr::neg(&inner));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.atom()?;
        while self.eat(b'^') {
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("exponent must be a nonnegative integer"));
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let n: u32 = text
                .parse()
                .map_err(|_| self.err("exponent out of range"))?;
            base = Expr::pow_int(&base, n);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(_) => Err(self.err("expected a value")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
        {
            self.pos += 1;
        }
        // optional exponent part
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E')
        {
            let mut look = self.pos + 1;
            if look < self.src.len() && (self.src[look] == b'+' || self.src[look] == b'-') {
                look += 1;
            }
            if look < self.src.len() && self.src[look].is_ascii_digit() {
                self.pos = look;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let val: f64 = text.parse().map_err(|_| ParseError {
            pos: start,
            msg: format!("invalid number `{text}`"),
        })?;
        Ok(Expr::constant(val))
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match name {
            "x" => Ok(Expr::var(Var::X)),
            "u" => Ok(Expr::var(Var::U)),
            "up" => Ok(Expr::var(Var::V)),
            "pi" => Ok(Expr::pi()),
            "sin" | "cos" | "exp" => {
                if !self.eat(b'(') {
                    return Err(self.err("expected '(' after function name"));
                }
                let arg = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(match name {
                    "sin" => Expr::sin(&arg),
                    "cos" => Expr::cos(&arg),
                    _ => Expr::exp(&arg),
                })
            }
            _ => Err(ParseError {
                pos: start,
                msg: format!("unknown identifier `{name}`"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn parses_example_right_hand_sides() {
        let e = p("u^3/6 - u - cos(pi*x)");
        assert_eq!(e.eval_float(0.0, 6.0, 0.0).unwrap(), 36.0 - 6.0 - 1.0);
        assert!(e.uses(Var::U) && e.uses(Var::X) && !e.uses(Var::V));
        let e = p("sin(u) - cos(2*pi*x)");
        assert!((e.eval_float(0.25, 0.0, 0.0).unwrap() - 0.0).abs() < 1e-15);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse("u +").unwrap_err();
        assert_eq!(err.pos, 3);
        assert!(parse("u ^ x").is_err());
        assert!(parse("2 + unknown").is_err());
        assert!(parse("sin 3").is_err());
        assert!(parse("(u + 1").is_err());
    }

    #[test]
    fn precedence_matches_convention() {
        // -u^2 is -(u^2); u^3/6 is (u^3)/6; 1+2*3 is 7
        assert_eq!(p("-u^2").eval_float(0.0, 3.0, 0.0).unwrap(), -9.0);
        assert_eq!(p("u^3/6").eval_float(0.0, 2.0, 0.0).unwrap(), 8.0 / 6.0);
        assert_eq!(p("1+2*3").eval_float(0.0, 0.0, 0.0).unwrap(), 7.0);
        assert_eq!(p("2*3+1").eval_float(0.0, 0.0, 0.0).unwrap(), 7.0);
        assert_eq!(p("2-1-1").eval_float(0.0, 0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn printer_round_trips() {
        for s in [
            "u^3/6 - u - cos(pi*x)",
            "sin(u) - cos(2*pi*x)",
            "-(u + up)^2*exp(x/2)",
            "1/(u^2 + 4)",
            "x*pi - -2.5",
            "exp(-x)*sin(pi*u)",
        ] {
            let once = p(s);
            let again = parse(&once.to_string()).unwrap();
            assert_eq!(once, again, "printing `{s}` as `{once}` failed to round-trip");
        }
    }

    #[test]
    fn diff_power_rule() {
        // d/du (u^3/6) = u^2/2
        let e = p("u^3/6").diff(Var::U);
        for u in [0.0, 1.0, -2.5, 3.0] {
            let got = e.eval_float(0.0, u, 0.0).unwrap();
            assert!((got - u * u / 2.0).abs() <= 1e-15 * (1.0 + u * u));
        }
    }

    #[test]
    fn diff_trig() {
        let ds = p("sin(u)").diff(Var::U);
        let dc = p("cos(u)").diff(Var::U);
        for u in [-1.0, 0.0, 0.7, 2.0] {
            assert!((ds.eval_float(0.0, u, 0.0).unwrap() - u.cos()).abs() < 1e-15);
            assert!((dc.eval_float(0.0, u, 0.0).unwrap() + u.sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn second_derivative_of_cubic_example() {
        // f_uu for -u + u^3/6 is u
        let f = p("-u + u^3/6");
        let fuu = f.diff(Var::U).diff(Var::U);
        for u in [-2.0, 0.0, 1.5] {
            assert!((fuu.eval_float(0.0, u, 0.0).unwrap() - u).abs() < 1e-15);
        }
    }

    #[test]
    fn float_division_by_zero_is_an_error() {
        let e = p("1/x");
        assert_eq!(e.eval_float(0.0, 0.0, 0.0), Err(EvalError::DivisionByZero));
        assert!(e.eval_float(2.0, 0.0, 0.0).unwrap() == 0.5);
        let iv = Interval::new(-1.0, 1.0);
        assert_eq!(
            e.eval_interval(&iv, &iv, &iv),
            Err(EvalError::DivisionByZeroInterval)
        );
    }

    #[test]
    fn interval_eval_encloses_floats() {
        let e = p("-u + u^3/6");
        let u = Interval::new(-1.0, 1.0);
        let x = Interval::point(0.0);
        let iv = e.eval_interval(&x, &u, &x).unwrap();
        // true range is [-5/6, 5/6]; the natural extension may be wider
        assert!(iv.contains(-5.0 / 6.0) && iv.contains(5.0 / 6.0));
        for k in 0..=20 {
            let uu = -1.0 + k as f64 / 10.0;
            assert!(iv.contains(e.eval_float(0.0, uu, 0.0).unwrap()));
        }
    }

    #[test]
    fn substitute_path_cases() {
        // u with constant path
        let w = Expr::constant(2.0);
        let dw = Expr::constant(0.0);
        let sub = Expr::var(Var::U).substitute_path(&w, &dw);
        assert!(sub.expr().is_const(2.0));

        // up with w = cos(pi x): substitution target is dw = -pi sin(pi x)
        let w = p("cos(pi*x)");
        let dw = w.diff(Var::X);
        let sub = Expr::var(Var::V).substitute_path(&w, &dw);
        for k in 0..10 {
            let x = k as f64 / 9.0;
            let want = -std::f64::consts::PI * (std::f64::consts::PI * x).sin();
            assert!((sub.eval(x).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn path_expr_rejects_leftover_vars() {
        assert!(PathExpr::new(p("u + x")).is_none());
        assert!(PathExpr::new(p("x^2")).is_some());
    }

    #[test]
    fn exact_folding_preserves_enclosures() {
        // 2/3 must NOT fold: the rounded double is not the real quotient
        let e = Expr::div(&Expr::constant(2.0), &Expr::constant(3.0));
        let iv = e
            .eval_interval(
                &Interval::point(0.0),
                &Interval::point(0.0),
                &Interval::point(0.0),
            )
            .unwrap();
        assert!(iv.width() > 0.0);
        // 1/4 folds exactly
        assert!(Expr::div(&Expr::constant(1.0), &Expr::constant(4.0)).is_const(0.25));
        // pi never folds
        let e = Expr::mul(&Expr::pi(), &Expr::constant(2.0));
        assert!(!e.is_const(2.0 * std::f64::consts::PI));
    }

    #[test]
    fn diff_matches_central_differences() {
        let exprs = [
            "u^3/6 - u - cos(pi*x)",
            "sin(u) - cos(2*pi*x)",
            "exp(x)*sin(u) + up^2",
            "(u + up)/(x + 2)",
            "u*up*x",
        ];
        let h = 1e-5;
        for s in exprs {
            let e = p(s);
            for var in [Var::X, Var::U, Var::V] {
                let d = e.diff(var);
                let (x, u, v) = (0.3, 0.7, -0.4);
                let shift = |t: f64| match var {
                    Var::X => e.eval_float(x + t, u, v).unwrap(),
                    Var::U => e.eval_float(x, u + t, v).unwrap(),
                    Var::V => e.eval_float(x, u, v + t).unwrap(),
                };
                let fd = (shift(h) - shift(-h)) / (2.0 * h);
                let sym = d.eval_float(x, u, v).unwrap();
                assert!(
                    (fd - sym).abs() <= 1e-6 * (1.0 + sym.abs()),
                    "{s} d/d{var:?}: fd={fd} sym={sym}"
                );
            }
        }
    }
}
