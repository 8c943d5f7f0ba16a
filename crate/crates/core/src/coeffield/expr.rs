use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::jet::Jet;
use super::poly::{rat_to_f64, Poly};
use super::rational::RationalFunction;
use crate::error::{Result, WkbError};

/// Coefficient expression in `x` and `h` (standing for ħ).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CoeffExpr {
    Num(BigRational),
    X,
    H,
    Neg(Box<CoeffExpr>),
    Add(Box<CoeffExpr>, Box<CoeffExpr>),
    Sub(Box<CoeffExpr>, Box<CoeffExpr>),
    Mul(Box<CoeffExpr>, Box<CoeffExpr>),
    Div(Box<CoeffExpr>, Box<CoeffExpr>),
    Pow(Box<CoeffExpr>, i32),
    Cos(Box<CoeffExpr>),
    Sin(Box<CoeffExpr>),
}

use CoeffExpr as E;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { src, toks: Vec::new() };
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let ch = src[i..].chars().next().unwrap();
            if ch.is_whitespace() {
                i += ch.len_utf8();
            } else if ch.is_ascii_digit() || ch == '.' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                let text = &src[start..i];
                lx.toks.push((Tok::Num(parse_decimal(text, start)?), start));
            } else if ch.is_alphabetic() || ch == '_' {
                let start = i;
                while i < bytes.len() {
                    let c = src[i..].chars().next().unwrap();
                    if c.is_alphanumeric() || c == '_' {
                        i += c.len_utf8();
                    } else {
                        break;
                    }
                }
                lx.toks.push((Tok::Ident(src[start..i].to_string()), start));
            } else if "+-*/^()".contains(ch) {
                lx.toks.push((Tok::Op(ch), i));
                i += 1;
            } else {
                return Err(WkbError::Syntax { pos: i, msg: format!("unexpected character `{ch}`") });
            }
        }
        lx.toks.push((Tok::End, lx.src.len()));
        Ok(lx.toks)
    }
}

fn parse_decimal(text: &str, pos: usize) -> Result<BigRational> {
    let bad = || WkbError::Syntax { pos, msg: format!("malformed number `{text}`") };
    let mut parts = text.split('.');
    let int = parts.next().unwrap_or("");
    let frac = parts.next();
    if parts.next().is_some() || (int.is_empty() && frac.is_none_or(|f| f.is_empty())) {
        return Err(bad());
    }
    let frac = frac.unwrap_or("");
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let d = BigInt::from(10u32).pow(frac.len() as u32);
    Ok(BigRational::new(n, d))
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn pos(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            Ok(())
        } else {
            Err(WkbError::Syntax { pos: self.pos(), msg: format!("expected `{c}`") })
        }
    }

    fn expr(&mut self) -> Result<CoeffExpr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    lhs = E::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Op('-') => {
                    self.bump();
                    lhs = E::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<CoeffExpr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    lhs = E::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Op('/') => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = fold_div(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<CoeffExpr> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(fold_neg(self.unary()?))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<CoeffExpr> {
        let base = self.atom()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let paren = *self.peek() == Tok::Op('(');
        if paren {
            self.bump();
        }
        let neg = *self.peek() == Tok::Op('-');
        if neg {
            self.bump();
        }
        let pos = self.pos();
        let k: i32 = match self.bump() {
            Tok::Num(v) if v.is_integer() => v
                .to_integer()
                .try_into()
                .map_err(|_| WkbError::Syntax { pos, msg: "exponent too large".into() })?,
            _ => return Err(WkbError::Syntax { pos, msg: "expected integer exponent".into() }),
        };
        if paren {
            self.expect(')')?;
        }
        let k = if neg { -k } else { k };
        Ok(fold_pow(base, k))
    }

    fn atom(&mut self) -> Result<CoeffExpr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(v) => Ok(E::Num(v)),
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(E::X),
                "h" => Ok(E::H),
                "cos" | "sin" => {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    Ok(if name == "cos" { E::Cos(Box::new(arg)) } else { E::Sin(Box::new(arg)) })
                }
                _ => Err(WkbError::UnknownIdentifier { name, pos }),
            },
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::End => Err(WkbError::Syntax { pos, msg: "unexpected end of input".into() }),
            Tok::Op(c) => Err(WkbError::Syntax { pos, msg: format!("unexpected `{c}`") }),
        }
    }
}

fn fold_neg(e: CoeffExpr) -> CoeffExpr {
    match e {
        E::Num(v) => E::Num(-v),
        other => E::Neg(Box::new(other)),
    }
}

fn fold_div(a: CoeffExpr, b: CoeffExpr) -> CoeffExpr {
    match (a, b) {
        (E::Num(p), E::Num(q)) if !q.is_zero() => E::Num(p / q),
        (a, b) => E::Div(Box::new(a), Box::new(b)),
    }
}

fn fold_pow(a: CoeffExpr, k: i32) -> CoeffExpr {
    match a {
        E::Num(v) if k >= 0 || !v.is_zero() => {
            let mut out = BigRational::one();
            let base = if k < 0 { v.recip() } else { v };
            for _ in 0..k.unsigned_abs() {
                out *= &base;
            }
            E::Num(out)
        }
        a => E::Pow(Box::new(a), k),
    }
}

/// Parse a coefficient expression in the `x`, `h` grammar.
pub fn parse_coeff(text: &str) -> Result<CoeffExpr> {
    let toks = Lexer::run(text)?;
    let mut p = Parser { toks, i: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(WkbError::Syntax { pos: p.pos(), msg: "trailing input".into() });
    }
    Ok(e)
}

impl CoeffExpr {
    fn prec(&self) -> u8 {
        match self {
            E::Num(v) if !v.is_integer() => 2,
            E::Num(v) if v.is_negative() => 3,
            E::Num(_) | E::X | E::H | E::Cos(_) | E::Sin(_) => 5,
            E::Add(..) | E::Sub(..) => 1,
            E::Mul(..) | E::Div(..) => 2,
            E::Neg(_) => 3,
            E::Pow(..) => 4,
        }
    }

    fn is_negative_lead(&self) -> bool {
        matches!(self, E::Neg(_)) || matches!(self, E::Num(v) if v.is_negative())
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, min: u8, right: bool) -> fmt::Result {
        if self.prec() < min || (right && self.is_negative_lead()) {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }

    pub fn is_h_free(&self) -> bool {
        match self {
            E::H => false,
            E::Num(_) | E::X => true,
            E::Neg(a) | E::Pow(a, _) | E::Cos(a) | E::Sin(a) => a.is_h_free(),
            E::Add(a, b) | E::Sub(a, b) | E::Mul(a, b) | E::Div(a, b) => a.is_h_free() && b.is_h_free(),
        }
    }

    pub fn is_rational(&self) -> bool {
        match self {
            E::Cos(_) | E::Sin(_) => false,
            E::Num(_) | E::X | E::H => true,
            E::Neg(a) | E::Pow(a, _) => a.is_rational(),
            E::Add(a, b) | E::Sub(a, b) | E::Mul(a, b) | E::Div(a, b) => a.is_rational() && b.is_rational(),
        }
    }

    /// Numeric value at `(x, h)`.
    pub fn eval(&self, x: Complex64, h: Complex64) -> Complex64 {
        match self {
            E::Num(v) => Complex64::new(rat_to_f64(v), 0.0),
            E::X => x,
            E::H => h,
            E::Neg(a) => -a.eval(x, h),
            E::Add(a, b) => a.eval(x, h) + b.eval(x, h),
            E::Sub(a, b) => a.eval(x, h) - b.eval(x, h),
            E::Mul(a, b) => a.eval(x, h) * b.eval(x, h),
            E::Div(a, b) => a.eval(x, h) / b.eval(x, h),
            E::Pow(a, k) => a.eval(x, h).powi(*k),
            E::Cos(a) => a.eval(x, h).cos(),
            E::Sin(a) => a.eval(x, h).sin(),
        }
    }

    /// Taylor jet of an `h`-free expression at `x` with `n` terms.
    pub fn jet(&self, x: Complex64, n: usize) -> Jet {
        match self {
            E::Num(v) => Jet::constant(Complex64::new(rat_to_f64(v), 0.0), n),
            E::X => Jet::variable(x, n),
            E::H => panic!("jet of an h-dependent expression"),
            E::Neg(a) => -&a.jet(x, n),
            E::Add(a, b) => &a.jet(x, n) + &b.jet(x, n),
            E::Sub(a, b) => &a.jet(x, n) - &b.jet(x, n),
            E::Mul(a, b) => &a.jet(x, n) * &b.jet(x, n),
            E::Div(a, b) => a.jet(x, n).div(&b.jet(x, n)),
            E::Pow(a, k) => a.jet(x, n).powi(*k),
            E::Cos(a) => a.jet(x, n).cos_sin().0,
            E::Sin(a) => a.jet(x, n).cos_sin().1,
        }
    }

    /// Coefficients of h⁰, h¹, … as rational functions.
    pub fn lower(&self) -> Result<Vec<RationalFunction>> {
        let mut v = lower_generic::<RationalFunction>(self)?;
        trim(&mut v);
        Ok(v)
    }

    /// Coefficients of h⁰, h¹, … as `h`-free expressions (works with `cos`, `sin`).
    pub fn lower_analytic(&self) -> Result<Vec<CoeffExpr>> {
        let mut v = lower_generic::<CoeffExpr>(self)?;
        trim(&mut v);
        Ok(v)
    }

    /// Symbolic ∂ₓ (h is treated as a constant).
    pub fn derivative(&self) -> CoeffExpr {
        let b = |e: CoeffExpr| Box::new(e);
        match self {
            E::Num(_) | E::H => E::Num(BigRational::zero()),
            E::X => E::Num(BigRational::one()),
            E::Neg(a) => E::Neg(b(a.derivative())),
            E::Add(x, y) => E::Add(b(x.derivative()), b(y.derivative())),
            E::Sub(x, y) => E::Sub(b(x.derivative()), b(y.derivative())),
            E::Mul(x, y) => E::Add(
                b(E::Mul(b(x.derivative()), y.clone())),
                b(E::Mul(x.clone(), b(y.derivative()))),
            ),
            E::Div(x, y) => E::Div(
                b(E::Sub(b(E::Mul(b(x.derivative()), y.clone())), b(E::Mul(x.clone(), b(y.derivative()))))),
                b(E::Pow(y.clone(), 2)),
            ),
            E::Pow(a, k) => E::Mul(
                b(E::Mul(b(E::Num(BigRational::from_integer(BigInt::from(*k)))), b(E::Pow(a.clone(), k - 1)))),
                b(a.derivative()),
            ),
            E::Cos(a) => E::Neg(b(E::Mul(b(E::Sin(a.clone())), b(a.derivative())))),
            E::Sin(a) => E::Mul(b(E::Cos(a.clone())), b(a.derivative())),
        }
    }

    pub fn from_rational(r: &RationalFunction) -> CoeffExpr {
        let n = poly_expr(r.numer());
        if r.denom().is_one() {
            n
        } else {
            fold_div(n, poly_expr(r.denom()))
        }
    }
}

fn poly_expr(p: &Poly) -> CoeffExpr {
    let mut acc: Option<CoeffExpr> = None;
    for (i, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mono = match i {
            0 => None,
            1 => Some(E::X),
            _ => Some(E::Pow(Box::new(E::X), i as i32)),
        };
        let mag = c.abs();
        let term = match mono {
            None => E::Num(mag),
            Some(m) if mag.is_one() => m,
            Some(m) => E::Mul(Box::new(E::Num(mag)), Box::new(m)),
        };
        acc = Some(match acc {
            None if c.is_negative() => fold_neg(term),
            None => term,
            Some(a) if c.is_negative() => E::Sub(Box::new(a), Box::new(term)),
            Some(a) => E::Add(Box::new(a), Box::new(term)),
        });
    }
    acc.unwrap_or(E::Num(BigRational::zero()))
}

impl fmt::Display for CoeffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            E::Num(v) => {
                if v.is_integer() {
                    write!(f, "{}", v.numer())
                } else {
                    write!(f, "{}/{}", v.numer(), v.denom())
                }
            }
            E::X => write!(f, "x"),
            E::H => write!(f, "h"),
            E::Neg(a) => {
                write!(f, "-")?;
                a.write_child(f, 3, false)
            }
            E::Add(a, b) | E::Sub(a, b) => {
                a.write_child(f, 1, false)?;
                write!(f, "{}", if matches!(self, E::Add(..)) { " + " } else { " - " })?;
                b.write_child(f, 2, true)
            }
            E::Mul(a, b) | E::Div(a, b) => {
                a.write_child(f, 2, false)?;
                write!(f, "{}", if matches!(self, E::Mul(..)) { "*" } else { "/" })?;
                b.write_child(f, 3, true)
            }
            E::Pow(a, k) => {
                a.write_child(f, 5, false)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            E::Cos(a) => write!(f, "cos({a})"),
            E::Sin(a) => write!(f, "sin({a})"),
        }
    }
}

/// Coefficient ring for lowering an expression to a polynomial in h.
pub trait LowerTarget: Clone {
    fn zero() -> Self;
    fn num(v: &BigRational) -> Self;
    fn x() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Result<Self>;
    fn powi(&self, k: i32) -> Result<Self>;
    fn cos(&self) -> Result<Self>;
    fn sin(&self) -> Result<Self>;
}

impl LowerTarget for RationalFunction {
    fn zero() -> Self {
        RationalFunction::zero()
    }
    fn num(v: &BigRational) -> Self {
        RationalFunction::constant(v.clone())
    }
    fn x() -> Self {
        RationalFunction::x()
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Result<Self> {
        self / o
    }
    fn powi(&self, k: i32) -> Result<Self> {
        RationalFunction::powi(self, k)
    }
    fn cos(&self) -> Result<Self> {
        Err(WkbError::NotRational)
    }
    fn sin(&self) -> Result<Self> {
        Err(WkbError::NotRational)
    }
}

fn is_num(e: &CoeffExpr, v: i64) -> bool {
    matches!(e, E::Num(q) if *q == BigRational::from_integer(v.into()))
}

impl LowerTarget for CoeffExpr {
    fn zero() -> Self {
        E::Num(BigRational::zero())
    }
    fn num(v: &BigRational) -> Self {
        E::Num(v.clone())
    }
    fn x() -> Self {
        E::X
    }
    fn is_zero(&self) -> bool {
        is_num(self, 0)
    }
    fn add(&self, o: &Self) -> Self {
        match (self, o) {
            (E::Num(a), E::Num(b)) => E::Num(a + b),
            _ if self.is_zero() => o.clone(),
            _ if o.is_zero() => self.clone(),
            _ => E::Add(Box::new(self.clone()), Box::new(o.clone())),
        }
    }
    fn sub(&self, o: &Self) -> Self {
        match (self, o) {
            (E::Num(a), E::Num(b)) => E::Num(a - b),
            _ if o.is_zero() => self.clone(),
            _ if self.is_zero() => fold_neg(o.clone()),
            _ => E::Sub(Box::new(self.clone()), Box::new(o.clone())),
        }
    }
    fn mul(&self, o: &Self) -> Self {
        match (self, o) {
            (E::Num(a), E::Num(b)) => E::Num(a * b),
            _ if self.is_zero() || o.is_zero() => Self::zero(),
            _ if is_num(self, 1) => o.clone(),
            _ if is_num(o, 1) => self.clone(),
            _ => E::Mul(Box::new(self.clone()), Box::new(o.clone())),
        }
    }
    fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(WkbError::DivisionByZero);
        }
        Ok(match (self, o) {
            _ if is_num(o, 1) => self.clone(),
            _ if self.is_zero() => Self::zero(),
            (a, b) => fold_div(a.clone(), b.clone()),
        })
    }
    fn powi(&self, k: i32) -> Result<Self> {
        if k < 0 && self.is_zero() {
            return Err(WkbError::DivisionByZero);
        }
        Ok(match k {
            0 => E::Num(BigRational::one()),
            1 => self.clone(),
            _ => fold_pow(self.clone(), k),
        })
    }
    fn cos(&self) -> Result<Self> {
        Ok(E::Cos(Box::new(self.clone())))
    }
    fn sin(&self) -> Result<Self> {
        Ok(E::Sin(Box::new(self.clone())))
    }
}

fn trim<T: LowerTarget>(v: &mut Vec<T>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn h_free<T: LowerTarget>(mut v: Vec<T>) -> Result<T> {
    trim(&mut v);
    match v.len() {
        0 => Ok(T::zero()),
        1 => Ok(v.pop().unwrap()),
        _ => Err(WkbError::NonPolynomialInH),
    }
}

fn lower_generic<T: LowerTarget>(e: &CoeffExpr) -> Result<Vec<T>> {
    Ok(match e {
        E::Num(v) => vec![T::num(v)],
        E::X => vec![T::x()],
        E::H => vec![T::zero(), T::num(&BigRational::one())],
        E::Neg(a) => lower_generic::<T>(a)?.iter().map(|c| T::zero().sub(c)).collect(),
        E::Add(a, b) | E::Sub(a, b) => {
            let (la, lb) = (lower_generic::<T>(a)?, lower_generic::<T>(b)?);
            let n = la.len().max(lb.len());
            (0..n)
                .map(|i| {
                    let x = la.get(i).cloned().unwrap_or_else(T::zero);
                    let y = lb.get(i).cloned().unwrap_or_else(T::zero);
                    if matches!(e, E::Add(..)) { x.add(&y) } else { x.sub(&y) }
                })
                .collect()
        }
        E::Mul(a, b) => {
            let (la, lb) = (lower_generic::<T>(a)?, lower_generic::<T>(b)?);
            hmul(&la, &lb)
        }
        E::Div(a, b) => {
            let d = h_free(lower_generic::<T>(b)?)?;
            lower_generic::<T>(a)?.iter().map(|c| c.div(&d)).collect::<Result<_>>()?
        }
        E::Pow(a, k) => {
            let la = lower_generic::<T>(a)?;
            if *k < 0 {
                vec![h_free(la)?.powi(*k)?]
            } else {
                let mut out = vec![T::num(&BigRational::one())];
                for _ in 0..*k {
                    out = hmul(&out, &la);
                }
                out
            }
        }
        E::Cos(a) => vec![h_free(lower_generic::<T>(a)?)?.cos()?],
        E::Sin(a) => vec![h_free(lower_generic::<T>(a)?)?.sin()?],
    })
}

fn hmul<T: LowerTarget>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffield::poly::rat;

    #[test]
    fn deformed_weber_lowering() {
        let e = parse_coeff("x^2 - 4 + 2*h").unwrap();
        let l = e.lower().unwrap();
        assert_eq!(l.len(), 2);
        assert_eq!(l[0], RationalFunction::from_poly(Poly::from_i64(&[-4, 0, 1])));
        assert_eq!(l[1], RationalFunction::from_int(2));
    }

    #[test]
    fn zero_and_negation() {
        assert_eq!(parse_coeff("0").unwrap(), E::Num(rat(0, 1)));
        assert!(parse_coeff("0").unwrap().lower().unwrap().is_empty());
        assert_eq!(parse_coeff("-x").unwrap().lower().unwrap(), vec![-&RationalFunction::x()]);
    }

    #[test]
    fn trivial_h_division() {
        let l = parse_coeff("h*h*x/(1+0*h)").unwrap().lower().unwrap();
        assert_eq!(l, vec![RationalFunction::zero(), RationalFunction::zero(), RationalFunction::x()]);
    }

    #[test]
    fn quotient_evaluates() {
        let e = parse_coeff("(x+1)/(x-1)").unwrap();
        let v = e.eval(Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0));
        assert!((v - 3.0).norm() < 1e-15);
    }

    #[test]
    fn h_dependent_division_fails() {
        let e = parse_coeff("x/(1+h)").unwrap();
        assert_eq!(e.lower(), Err(WkbError::NonPolynomialInH));
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_coeff("x + y"),
            Err(WkbError::UnknownIdentifier { name: "y".into(), pos: 4 })
        );
        assert!(matches!(parse_coeff("x + *"), Err(WkbError::Syntax { pos: 4, .. })));
        assert!(matches!(parse_coeff("(x"), Err(WkbError::Syntax { pos: 2, .. })));
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_coeff("0.25").unwrap(), E::Num(rat(1, 4)));
    }

    #[test]
    fn printer_round_trip_cases() {
        for s in ["x^2 - 4 + 2*h", "-(x + 1)*h^(-2)", "2*cos(x) - 1/2*x/(x - 3)", "x - (1 - x)", "x*(-3)"] {
            let e = parse_coeff(s).unwrap();
            let again = parse_coeff(&e.to_string()).unwrap();
            assert_eq!(e, again, "{s} -> {e}");
        }
    }

    #[test]
    fn trig_lowering_is_analytic() {
        let e = parse_coeff("2*(cos(x) - 2) + h").unwrap();
        assert_eq!(e.lower(), Err(WkbError::NotRational));
        let l = e.lower_analytic().unwrap();
        assert_eq!(l.len(), 2);
        let v = l[0].eval(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        assert!((v + 2.0).norm() < 1e-15);
    }
}
