//! A small expression language for classes.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' int)?
//! atom   := 'L' | integer | GL(n) | SL(n) | P(n) | Gm | Ga | Mu(n) | Sigma(n)
//!         | B(group) | identifier | '(' expr ')'
//! group  := GL(n) | SL(n) | Gm | Ga | Mu(n) | Sigma(n) | Mon(k)
//! int    := '-'? digits | '(' '-'? digits ')'
//! ```
//!
//! Identifiers other than the reserved names are symbols, resolved against a
//! [`SymbolTable`] at evaluation time. Division is accepted by the parser and
//! checked when evaluating.

use std::fmt;

use num_bigint::BigInt;

use crate::arith::factorial;
use crate::catalog::{
    b_class, b_monomial, b_sigma, subgroup_bclass, GroupDescriptor, GroupKind, MotivicClass,
    SymbolTable,
};
use crate::error::{Error, Result};
use crate::lring::{class_gl, class_projective, class_sl, IntLaurent, TateRational};

/// Groups that may appear under `B(...)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    Gl(u32),
    Sl(u32),
    Gm,
    Ga,
    Mu(u32),
    Sigma(u32),
    Mon(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    L,
    /// Non-negative literal; negation is [`Expr::Neg`].
    Int(BigInt),
    Gl(u32),
    Sl(u32),
    Proj(u32),
    Gm,
    Ga,
    Mu(u32),
    Sigma(u32),
    B(Group),
    Symbol(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

const RESERVED: [&str; 10] = ["L", "GL", "SL", "P", "Gm", "Ga", "Mu", "Sigma", "B", "Mon"];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((start, Tok::Int(src[start..i].parse().unwrap())));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if b"+-*/^()".contains(&c) {
            out.push((i, Tok::Sym(c as char)));
            i += 1;
        } else {
            return Err(Error::Parse {
                offset: i,
                expected: vec!["expression character".into()],
            });
        }
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

fn expected(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

const ATOM_START: [&str; 5] = ["integer", "identifier", "L", "(", "-"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn fail<T>(&self, items: &[&str]) -> Result<T> {
        Err(Error::Parse {
            offset: self.offset(),
            expected: expected(items),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(&[&c.to_string()])
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
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Expr::Pow(Box::new(base), self.exponent()?));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i64> {
        let paren = self.eat('(');
        let neg = self.eat('-');
        let Tok::Int(n) = self.peek().clone() else {
            return self.fail(if neg { &["integer"] } else { &["integer", "-", "("] });
        };
        let n: i64 = match i64::try_from(&n) {
            Ok(n) if n <= i32::MAX as i64 => n,
            _ => return self.fail(&["exponent below 2^31"]),
        };
        self.pos += 1;
        if paren {
            self.expect(')')?;
        }
        Ok(if neg { -n } else { n })
    }

    fn small_arg(&mut self) -> Result<u32> {
        self.expect('(')?;
        let Tok::Int(n) = self.peek().clone() else {
            return self.fail(&["integer"]);
        };
        let n = match u32::try_from(&n) {
            Ok(n) => n,
            Err(_) => return self.fail(&["integer below 2^32"]),
        };
        self.pos += 1;
        self.expect(')')?;
        Ok(n)
    }

    fn group(&mut self) -> Result<Group> {
        let Tok::Ident(name) = self.peek().clone() else {
            return self.fail(&["GL", "SL", "Gm", "Ga", "Mu", "Sigma", "Mon"]);
        };
        self.pos += 1;
        Ok(match name.as_str() {
            "GL" => Group::Gl(self.small_arg()?),
            "SL" => Group::Sl(self.small_arg()?),
            "Gm" => Group::Gm,
            "Ga" => Group::Ga,
            "Mu" => Group::Mu(self.small_arg()?),
            "Sigma" => Group::Sigma(self.small_arg()?),
            "Mon" => Group::Mon(self.small_arg()?),
            _ => {
                self.pos -= 1;
                return self.fail(&["GL", "SL", "Gm", "Ga", "Mu", "Sigma", "Mon"]);
            }
        })
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                Ok(match name.as_str() {
                    "L" => Expr::L,
                    "GL" => Expr::Gl(self.small_arg()?),
                    "SL" => Expr::Sl(self.small_arg()?),
                    "P" => Expr::Proj(self.small_arg()?),
                    "Gm" => Expr::Gm,
                    "Ga" => Expr::Ga,
                    "Mu" => Expr::Mu(self.small_arg()?),
                    "Sigma" => Expr::Sigma(self.small_arg()?),
                    "B" => {
                        self.expect('(')?;
                        let g = self.group()?;
                        self.expect(')')?;
                        Expr::B(g)
                    }
                    "Mon" => {
                        self.pos -= 1;
                        return self.fail(&ATOM_START);
                    }
                    _ => Expr::Symbol(name),
                })
            }
            _ => self.fail(&ATOM_START),
        }
    }
}

/// Parses `text`; errors carry the byte offset and the tokens that would
/// have been accepted there.
pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail(&["+", "-", "*", "/", "^", "end of input"]);
    }
    Ok(e)
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) | Expr::Pow(..) => 3,
            _ => 4,
        }
    }

    /// Symbols occurring in the expression, sorted and deduplicated.
    pub fn symbols(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_symbols(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_symbols(&self, out: &mut Vec<String>) {
        match self {
            Expr::Symbol(s) => out.push(s.clone()),
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect_symbols(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            _ => {}
        }
    }

    /// Whether the expression contains `/` or a negative power.
    pub fn has_division(&self) -> bool {
        match self {
            Expr::Div(..) => true,
            Expr::Pow(a, n) => *n < 0 || a.has_division(),
            Expr::B(_) => true,
            Expr::Neg(a) => a.has_division(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.has_division() || b.has_division()
            }
            _ => false,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Gl(n) => write!(f, "GL({n})"),
            Group::Sl(n) => write!(f, "SL({n})"),
            Group::Gm => write!(f, "Gm"),
            Group::Ga => write!(f, "Ga"),
            Group::Mu(n) => write!(f, "Mu({n})"),
            Group::Sigma(n) => write!(f, "Sigma({n})"),
            Group::Mon(k) => write!(f, "Mon({k})"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, min: u8| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        let binary = |f: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr, p: u8| {
            wrap(f, a, p)?;
            write!(f, " {op} ")?;
            wrap(f, b, p + 1)
        };
        match self {
            Expr::L => write!(f, "L"),
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Gl(n) => write!(f, "GL({n})"),
            Expr::Sl(n) => write!(f, "SL({n})"),
            Expr::Proj(n) => write!(f, "P({n})"),
            Expr::Gm => write!(f, "Gm"),
            Expr::Ga => write!(f, "Ga"),
            Expr::Mu(n) => write!(f, "Mu({n})"),
            Expr::Sigma(n) => write!(f, "Sigma({n})"),
            Expr::B(g) => write!(f, "B({g})"),
            Expr::Symbol(s) => write!(f, "{s}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                wrap(f, a, 3)
            }
            Expr::Add(a, b) => binary(f, a, "+", b, 1),
            Expr::Sub(a, b) => binary(f, a, "-", b, 1),
            Expr::Mul(a, b) => binary(f, a, "*", b, 2),
            Expr::Div(a, b) => binary(f, a, "/", b, 2),
            Expr::Pow(a, n) => {
                wrap(f, a, 4)?;
                write!(f, "^{n}")
            }
        }
    }
}

fn group_descriptor(g: &Group) -> GroupDescriptor {
    GroupDescriptor::new(match g {
        Group::Gl(n) => GroupKind::Gl(*n),
        Group::Sl(n) => GroupKind::Sl(*n),
        Group::Gm => GroupKind::Gm,
        Group::Ga => GroupKind::Ga,
        Group::Mu(n) => GroupKind::Mu(*n),
        Group::Sigma(n) => GroupKind::Sigma(*n),
        Group::Mon(k) => GroupKind::Monomial(*k),
    })
}

fn classifying(g: &Group) -> Result<MotivicClass> {
    match g {
        Group::Gl(_) | Group::Sl(_) | Group::Gm | Group::Ga => b_class(&group_descriptor(g)),
        // μ_n ⊂ G_m with quotient G_m.
        Group::Mu(n) if *n >= 1 => {
            subgroup_bclass(&GroupDescriptor::gm(), &MotivicClass::from(class_gl(1)))
        }
        Group::Mu(_) => Err(Error::InvalidArgument("Mu(0)".into())),
        Group::Sigma(n) => b_sigma(*n),
        Group::Mon(k) => b_monomial(*k).map(MotivicClass::from),
    }
}

fn laurent(x: IntLaurent) -> MotivicClass {
    MotivicClass::from(x)
}

fn invert(x: &MotivicClass, table: &SymbolTable) -> Result<MotivicClass> {
    match x.as_tate() {
        Some(t) => Ok(MotivicClass::from(t.inverse()?)),
        None => x.inverse(table),
    }
}

/// Evaluates to a class; symbols must be declared in `table`.
pub fn eval(e: &Expr, table: &SymbolTable) -> Result<MotivicClass> {
    Ok(match e {
        Expr::L => laurent(IntLaurent::l()),
        Expr::Int(n) => MotivicClass::from(TateRational::from(IntLaurent::constant(n.clone()))),
        Expr::Gl(n) => laurent(class_gl(*n)),
        Expr::Sl(n) => laurent(class_sl(*n)),
        Expr::Proj(n) => laurent(class_projective(*n)),
        Expr::Gm => laurent(class_gl(1)),
        Expr::Ga => laurent(IntLaurent::l()),
        Expr::Sigma(n) => laurent(IntLaurent::constant(BigInt::from(factorial(*n as u64)))),
        Expr::Mu(n) => {
            return Err(Error::Unsupported(format!(
                "the class of Mu({n}) depends on q; only B(Mu({n})) is available"
            )))
        }
        Expr::B(g) => classifying(g)?,
        Expr::Symbol(s) => {
            table.get(s)?;
            MotivicClass::symbol(s)
        }
        Expr::Neg(a) => -&eval(a, table)?,
        Expr::Add(a, b) => &eval(a, table)? + &eval(b, table)?,
        Expr::Sub(a, b) => &eval(a, table)? - &eval(b, table)?,
        Expr::Mul(a, b) => &eval(a, table)? * &eval(b, table)?,
        Expr::Div(a, b) => {
            let d = eval(b, table)?;
            if d.is_zero() {
                return Err(Error::NotInvertible("division by zero".into()));
            }
            &eval(a, table)? * &invert(&d, table)?
        }
        Expr::Pow(a, n) => {
            let base = eval(a, table)?;
            let base = if *n < 0 { invert(&base, table)? } else { base };
            let mut acc = MotivicClass::one();
            for _ in 0..n.unsigned_abs() {
                acc = &acc * &base;
            }
            acc
        }
    })
}

/// Exact integer value at `L = q` of a division-free, symbol-free expression,
/// computed directly on integers.
pub fn eval_integer(e: &Expr, q: u64) -> Option<BigInt> {
    let q = BigInt::from(q);
    fn go(e: &Expr, q: &BigInt) -> Option<BigInt> {
        let prod = |r: std::ops::Range<u32>, f: &dyn Fn(u32) -> BigInt| -> BigInt {
            r.map(f).product()
        };
        Some(match e {
            Expr::L | Expr::Ga => q.clone(),
            Expr::Int(n) => n.clone(),
            Expr::Gm => q - 1,
            Expr::Gl(n) => prod(0..*n, &|i| q.pow(*n) - q.pow(i)),
            Expr::Sl(n) if *n == 0 => BigInt::from(1),
            Expr::Sl(n) => prod(0..*n, &|i| q.pow(*n) - q.pow(i)) / (q - 1),
            Expr::Proj(n) => (0..=*n).map(|i| q.pow(i)).sum(),
            Expr::Sigma(n) => BigInt::from(factorial(*n as u64)),
            Expr::Neg(a) => -go(a, q)?,
            Expr::Add(a, b) => go(a, q)? + go(b, q)?,
            Expr::Sub(a, b) => go(a, q)? - go(b, q)?,
            Expr::Mul(a, b) => go(a, q)? * go(b, q)?,
            Expr::Pow(a, n) if *n >= 0 => go(a, q)?.pow(*n as u32),
            _ => return None,
        })
    }
    go(e, &q)
}

/// Names the parser treats as keywords rather than symbols.
pub fn reserved_names() -> &'static [&'static str] {
    &RESERVED
}
