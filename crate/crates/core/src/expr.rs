//! Expression language for functions, 1-forms and derivations.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '·' | '/') unary)*
//! unary := ('-' | '+') unary | power
//! power := atom ('^' '-'? integer)?
//! atom  := integer | ident | '(' expr ')'
//! ```
//!
//! Identifiers resolve against the coordinate names: `x` is a coordinate,
//! `dx` its differential, `∂x` (ASCII `@x`) its vector field. With a datum in
//! scope, `P1`.., `dP1`.. and `Q` name the basic invariants, their
//! differentials and the defining polynomial.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::locq::{Ambient, LocQ};
use crate::poly::Poly;
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rat),
    Ident(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(num_bigint::BigInt),
    Ident(String),
    Op(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (li, line) in src.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line, column) = (li + 1, i + 1);
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let tok = if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                Tok::Int(s.parse().unwrap())
            } else if c.is_alphabetic() || c == '_' || c == '∂' || c == '@' {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let mut s: String = chars[start..i].iter().collect();
                if let Some(rest) = s.strip_prefix('@') {
                    s = format!("∂{rest}");
                }
                if s == "∂" {
                    return Err(Error::parse(line, column, "`∂` must be followed by a coordinate name"));
                }
                Tok::Ident(s)
            } else {
                i += 1;
                match c {
                    '+' | '-' | '*' | '/' | '^' | '(' | ')' => Tok::Op(c),
                    '−' => Tok::Op('-'),
                    '·' => Tok::Op('*'),
                    _ => return Err(Error::parse(line, column, format!("unexpected character `{c}`"))),
                }
            };
            out.push(Token { tok, line, column });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|t| (t.line, t.column)).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (l, c) = self.here();
        Err(Error::parse(l, c, msg))
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                let Ok(e) = i32::try_from(n) else {
                    return self.err("exponent too large");
                };
                self.pos += 1;
                Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }))
            }
            _ => self.err("expected an integer exponent"),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::Num(Rat::from(n)))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(Expr::Ident(s))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(Tok::Op(c)) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses a complete expression, reporting positions relative to `text`.
pub fn parse(text: &str) -> Result<Expr> {
    parse_at(text, 1)
}

/// Parses with line numbers offset so that `text` starts on `first_line`.
pub fn parse_at(text: &str, first_line: usize) -> Result<Expr> {
    let shift = |e: Error| match e {
        Error::Parse { line, column, message } => Error::parse(line + first_line - 1, column, message),
        other => other,
    };
    let toks = tokenize(text).map_err(shift)?;
    let nlines = text.lines().count().max(1);
    let last_len = text.lines().last().map(|l| l.chars().count()).unwrap_or(0);
    let mut p = Parser { toks, pos: 0, end: (nlines, last_len + 1) };
    let e = p.expr().map_err(shift)?;
    if p.pos < p.toks.len() {
        return p.err("trailing input").map_err(shift);
    }
    Ok(e)
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Pow(..) => 4,
        Expr::Num(r) if !r.is_integer() => 2,
        Expr::Num(r) if r.is_negative() => 3,
        _ => 5,
    }
}

struct Wrap<'a>(&'a Expr, bool);

impl fmt::Display for Wrap<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = prec(self);
        match self {
            Expr::Num(r) => write!(f, "{r}"),
            Expr::Ident(s) => write!(f, "{s}"),
            Expr::Neg(a) => write!(f, "-{}", Wrap(a, prec(a) < 4)),
            Expr::Add(a, b) => write!(f, "{} + {}", a, Wrap(b, prec(b) <= 1)),
            Expr::Sub(a, b) => write!(f, "{} - {}", a, Wrap(b, prec(b) <= 1)),
            Expr::Mul(a, b) => write!(f, "{}*{}", Wrap(a, prec(a) < p), Wrap(b, prec(b) <= p)),
            Expr::Div(a, b) => write!(f, "{}/{}", Wrap(a, prec(a) < p), Wrap(b, prec(b) <= p)),
            Expr::Pow(a, e) => write!(f, "{}^{}", Wrap(a, prec(a) <= p), e),
        }
    }
}

/// Evaluates an expression that must be a polynomial in the named coordinates
/// (division only by nonzero constants).
pub fn eval_poly(e: &Expr, names: &[String]) -> Result<Poly> {
    let n = names.len();
    let ev = |x: &Expr| eval_poly(x, names);
    Ok(match e {
        Expr::Num(r) => Poly::constant(n, r.clone()),
        Expr::Ident(s) => match names.iter().position(|v| v == s) {
            Some(i) => Poly::var(n, i),
            None => return Err(Error::Domain(format!("unknown variable `{s}`"))),
        },
        Expr::Neg(a) => -&ev(a)?,
        Expr::Add(a, b) => &ev(a)? + &ev(b)?,
        Expr::Sub(a, b) => &ev(a)? - &ev(b)?,
        Expr::Mul(a, b) => &ev(a)? * &ev(b)?,
        Expr::Div(a, b) => {
            let d = ev(b)?;
            match d.as_constant().and_then(|c| c.recip()) {
                Some(inv) => ev(a)?.scale(&inv),
                None => return Err(Error::Domain("division by a non-constant polynomial".into())),
            }
        }
        Expr::Pow(a, k) if *k >= 0 => ev(a)?.pow(*k as u32),
        Expr::Pow(..) => return Err(Error::Domain("negative power of a polynomial".into())),
    })
}

/// Result of evaluating an expression over `S[1/Q]`.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Scalar(LocQ),
    /// Coefficients of `dx_1, …, dx_ℓ`.
    Form(Vec<LocQ>),
    /// Coefficients of `∂x_1, …, ∂x_ℓ`.
    Der(Vec<LocQ>),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Scalar(_) => "function",
            Value::Form(_) => "1-form",
            Value::Der(_) => "derivation",
        }
    }
}

/// Names available while evaluating.
pub struct Scope<'a> {
    pub ambient: &'a Arc<Ambient>,
    /// Basic invariants for the `P<k>` / `dP<k>` aliases (may be empty).
    pub invariants: &'a [Poly],
}

fn unit(amb: &Arc<Ambient>, i: usize) -> Vec<LocQ> {
    (0..amb.nvars()).map(|j| if i == j { amb.one() } else { amb.zero() }).collect()
}

impl Scope<'_> {
    fn alias_index(&self, s: &str, prefix: &str) -> Option<usize> {
        let k: usize = s.strip_prefix(prefix)?.parse().ok()?;
        (1..=self.invariants.len()).contains(&k).then(|| k - 1)
    }

    fn ident(&self, s: &str) -> Result<Value> {
        let amb = self.ambient;
        let names = amb.names();
        if let Some(i) = names.iter().position(|v| v == s) {
            return Ok(Value::Scalar(amb.var(i)));
        }
        if let Some(rest) = s.strip_prefix('∂') {
            if let Some(i) = names.iter().position(|v| v == rest) {
                return Ok(Value::Der(unit(amb, i)));
            }
        }
        if let Some(rest) = s.strip_prefix('d') {
            if let Some(i) = names.iter().position(|v| v == rest) {
                return Ok(Value::Form(unit(amb, i)));
            }
        }
        if s == "Q" && !amb.factors().is_empty() {
            return Ok(Value::Scalar(amb.poly(amb.q().clone())));
        }
        if let Some(k) = self.alias_index(s, "P") {
            return Ok(Value::Scalar(amb.poly(self.invariants[k].clone())));
        }
        if let Some(k) = self.alias_index(s, "dP") {
            let p = &self.invariants[k];
            return Ok(Value::Form((0..amb.nvars()).map(|i| amb.poly(p.partial(i))).collect()));
        }
        Err(Error::Domain(format!("unknown identifier `{s}`")))
    }

    pub fn eval(&self, e: &Expr) -> Result<Value> {
        use Value::*;
        let mixed = || Error::Domain("cannot combine dx and ∂x terms".into());
        let bad = |op: &str, a: &Value, b: &Value| {
            Error::Domain(format!("cannot {op} a {} and a {}", a.kind(), b.kind()))
        };
        Ok(match e {
            Expr::Num(r) => Scalar(self.ambient.constant(r.clone())),
            Expr::Ident(s) => self.ident(s)?,
            Expr::Neg(a) => match self.eval(a)? {
                Scalar(f) => Scalar(-&f),
                Form(v) => Form(v.iter().map(|c| -c).collect()),
                Der(v) => Der(v.iter().map(|c| -c).collect()),
            },
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let sub = matches!(e, Expr::Sub(..));
                let comb = |x: &LocQ, y: &LocQ| if sub { x - y } else { x + y };
                let zip = |v: &[LocQ], w: &[LocQ]| v.iter().zip(w).map(|(x, y)| comb(x, y)).collect();
                match (self.eval(a)?, self.eval(b)?) {
                    (Scalar(f), Scalar(g)) => Scalar(comb(&f, &g)),
                    (Form(v), Form(w)) => Form(zip(&v, &w)),
                    (Der(v), Der(w)) => Der(zip(&v, &w)),
                    (Form(_), Der(_)) | (Der(_), Form(_)) => return Err(mixed()),
                    (x, y) => return Err(bad("add", &x, &y)),
                }
            }
            Expr::Mul(a, b) => match (self.eval(a)?, self.eval(b)?) {
                (Scalar(f), Scalar(g)) => Scalar(&f * &g),
                (Scalar(f), Form(v)) | (Form(v), Scalar(f)) => Form(v.iter().map(|c| &f * c).collect()),
                (Scalar(f), Der(v)) | (Der(v), Scalar(f)) => Der(v.iter().map(|c| &f * c).collect()),
                (Form(_), Der(_)) | (Der(_), Form(_)) => return Err(mixed()),
                (x, y) => return Err(bad("multiply", &x, &y)),
            },
            Expr::Div(a, b) => {
                let num = self.eval(a)?;
                let inv = match self.eval(b)? {
                    Scalar(d) => d.try_inverse().ok_or_else(|| {
                        Error::Domain(format!("`{b}` is not invertible in S[1/Q]"))
                    })?,
                    other => return Err(bad("divide", &num, &other)),
                };
                match num {
                    Scalar(f) => Scalar(&f * &inv),
                    Form(v) => Form(v.iter().map(|c| c * &inv).collect()),
                    Der(v) => Der(v.iter().map(|c| c * &inv).collect()),
                }
            }
            Expr::Pow(a, k) => match self.eval(a)? {
                Scalar(f) if *k >= 0 => Scalar(f.pow(*k as u32)),
                Scalar(f) => Scalar(
                    f.try_inverse()
                        .ok_or_else(|| Error::Domain(format!("`{a}` is not invertible in S[1/Q]")))?
                        .pow(k.unsigned_abs()),
                ),
                other => return Err(Error::Domain(format!("cannot raise a {} to a power", other.kind()))),
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::LinearForm;

    fn b2() -> Arc<Ambient> {
        let forms = [[1, 0], [0, 1], [1, 1], [1, -1]]
            .iter()
            .map(|c| LinearForm::new(c.iter().map(|&v| Rat::from_int(v)).collect()).unwrap())
            .collect();
        Ambient::new(vec!["x".into(), "y".into()], forms)
    }

    #[test]
    fn parses_example_form() {
        let amb = b2();
        let scope = Scope { ambient: &amb, invariants: &[] };
        let v = scope.eval(&parse("(x^4+y^4)*(dx/x + dy/y)").unwrap()).unwrap();
        let Value::Form(c) = v else { panic!("expected a form") };
        let x4y4 = parse("x^4 + y^4").unwrap();
        let names = amb.names().to_vec();
        let p = eval_poly(&x4y4, &names).unwrap();
        assert_eq!(&c[0] * &amb.var(0), amb.poly(p.clone()));
        assert_eq!(&c[1] * &amb.var(1), amb.poly(p));
        assert_eq!(c[0].q_exp(), 1);
    }

    #[test]
    fn mixing_frames_is_a_domain_error() {
        let amb = b2();
        let scope = Scope { ambient: &amb, invariants: &[] };
        for src in ["dx + ∂x", "dx + @y", "x*dx*∂y"] {
            assert!(matches!(scope.eval(&parse(src).unwrap()), Err(Error::Domain(_))), "{src}");
        }
        assert!(matches!(scope.eval(&parse("dx/(x+2*y)").unwrap()), Err(Error::Domain(_))));
    }

    #[test]
    fn aliases_resolve_against_invariants() {
        let amb = b2();
        let names = amb.names().to_vec();
        let inv = vec![
            eval_poly(&parse("(x^2+y^2)/2").unwrap(), &names).unwrap(),
            eval_poly(&parse("(x^4+y^4)/4").unwrap(), &names).unwrap(),
        ];
        let scope = Scope { ambient: &amb, invariants: &inv };
        let a = scope.eval(&parse("dP1").unwrap()).unwrap();
        let b = scope.eval(&parse("x*dx + y*dy").unwrap()).unwrap();
        assert_eq!(a, b);
        let q = scope.eval(&parse("Q/(x*y)").unwrap()).unwrap();
        assert_eq!(q, scope.eval(&parse("x^2 - y^2").unwrap()).unwrap());
        assert!(scope.eval(&parse("P3").unwrap()).is_err());
        let inv_q = scope.eval(&parse("Q^-1 * Q").unwrap()).unwrap();
        assert_eq!(inv_q, Value::Scalar(amb.one()));
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse("x +\n  (y * ") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse("x $ y") {
            Err(Error::Parse { line: 1, column: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse("x^y").is_err());
        assert!(parse("(x").is_err());
        assert!(parse("x y").is_err());
    }

    #[test]
    fn printing_round_trips() {
        for src in ["-(x - y)^2", "x - (y - 1)", "1/2*x/(y*x)", "-x^3", "(-x)^2", "x/(y/x)", "2^-1"] {
            let e = parse(src).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{src} printed as {e}");
        }
    }
}
