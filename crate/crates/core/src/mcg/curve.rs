use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::sl2z::Sl2Matrix;

use super::McgError;

/// Genus one surface with `boundary` circles, marked curves `α1..α_alphas`,
/// a dual curve `β` meeting each `αj` once, and boundary-parallel `δ1..δn`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarkedSurface {
    pub boundary: usize,
    pub alphas: usize,
}

impl MarkedSurface {
    pub fn new(boundary: usize) -> Self {
        Self { boundary, alphas: boundary }
    }

    pub fn with_alphas(boundary: usize, alphas: usize) -> Self {
        Self { boundary, alphas }
    }

    pub fn contains(&self, c: &Curve) -> bool {
        match c {
            Curve::Alpha(j) => (1..=self.alphas).contains(j),
            Curve::Beta => true,
            Curve::Delta(i) => (1..=self.boundary).contains(i),
            Curve::Image { by, of } => self.contains(&by.curve) && self.contains(of),
        }
    }
}

/// A curve of the marked system or its image under a power of a twist.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Curve {
    Alpha(usize),
    Beta,
    Delta(usize),
    Image { by: Box<Twist>, of: Box<Curve> },
}

impl Curve {
    pub fn is_marked(&self) -> bool {
        !matches!(self, Curve::Image { .. })
    }

    pub fn is_delta(&self) -> bool {
        matches!(self, Curve::Delta(_))
    }

    /// Image of `of` under `by`, simplified where the answer is known.
    pub fn image(by: Twist, of: Curve) -> Curve {
        if of.is_delta() || by.curve.is_delta() || by.curve == of {
            return of;
        }
        if intersection(&by.curve, &of) == Some(0) {
            return of;
        }
        if let Curve::Image { by: inner, of: base } = &of {
            if inner.curve == by.curve {
                let exp = inner.exp + by.exp;
                if exp == 0 {
                    return (**base).clone();
                }
                return Curve::Image { by: Box::new(Twist { curve: by.curve, exp }), of: base.clone() };
            }
        }
        Curve::Image { by: Box::new(by), of: Box::new(of) }
    }

    /// Depth of nested images; 0 for marked curves.
    pub fn nesting(&self) -> usize {
        match self {
            Curve::Image { by, of } => 1 + by.curve.nesting().max(of.nesting()),
            _ => 0,
        }
    }

    /// Image in SL(2,Z) of the right-handed twist about this curve, acting
    /// on the first homology of the capped torus.
    pub fn shadow<Z: Scalar>(&self) -> Sl2Matrix<Z> {
        match self {
            Curve::Alpha(_) => Sl2Matrix::from_i64(1, 0, -1, 1),
            Curve::Beta => Sl2Matrix::from_i64(1, 1, 0, 1),
            Curve::Delta(_) => Sl2Matrix::identity(),
            Curve::Image { by, of } => of.shadow().conjugate_by(&by.shadow()),
        }
    }

    pub fn greek(&self) -> String {
        match self {
            Curve::Alpha(j) => format!("α{j}"),
            Curve::Beta => "β".to_string(),
            Curve::Delta(i) => format!("δ{i}"),
            Curve::Image { by, of } => format!("[{}]({})", by.greek(), of.greek()),
        }
    }
}

/// Geometric intersection number of two marked curves; `None` when either
/// is an image curve.
pub fn intersection(x: &Curve, y: &Curve) -> Option<u32> {
    match (x, y) {
        (Curve::Image { .. }, _) | (_, Curve::Image { .. }) => None,
        (Curve::Alpha(_), Curve::Beta) | (Curve::Beta, Curve::Alpha(_)) => Some(1),
        _ => Some(0),
    }
}

/// Whether twists about `x` and `y` commute for a reason the calculus knows.
pub fn commute(x: &Curve, y: &Curve) -> bool {
    x == y || x.is_delta() || y.is_delta() || intersection(x, y) == Some(0)
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Curve::Alpha(j) => write!(f, "a{j}"),
            Curve::Beta => write!(f, "b"),
            Curve::Delta(i) => write!(f, "d{i}"),
            Curve::Image { by, of } => write!(f, "[{by}]({of})"),
        }
    }
}

impl std::str::FromStr for Curve {
    type Err = McgError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser::new(s);
        let c = p.curve()?;
        p.end()?;
        Ok(c)
    }
}

impl Serialize for Curve {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Curve {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `curve^exp`; positive exponents are right-handed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Twist {
    pub curve: Curve,
    pub exp: i64,
}

impl Twist {
    pub fn new(curve: Curve, exp: i64) -> Self {
        Self { curve, exp }
    }

    pub fn shadow<Z: Scalar>(&self) -> Sl2Matrix<Z> {
        self.curve.shadow().pow(self.exp)
    }

    pub fn greek(&self) -> String {
        if self.exp == 1 {
            self.curve.greek()
        } else {
            format!("{}^{}", self.curve.greek(), self.exp)
        }
    }
}

impl fmt::Display for Twist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 1 {
            write!(f, "{}", self.curve)
        } else {
            write!(f, "{}^{}", self.curve, self.exp)
        }
    }
}

/// A product of twists in written order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwistWord {
    surface: MarkedSurface,
    terms: Vec<Twist>,
}

impl TwistWord {
    pub fn new(surface: MarkedSurface, terms: Vec<Twist>) -> Result<Self, McgError> {
        for t in &terms {
            if t.exp == 0 {
                return Err(McgError::ZeroExponent(t.curve.to_string()));
            }
            if !surface.contains(&t.curve) {
                return Err(McgError::CurveOutsideSurface(t.curve.to_string()));
            }
        }
        Ok(Self { surface, terms })
    }

    pub fn parse(surface: MarkedSurface, text: &str) -> Result<Self, McgError> {
        Self::new(surface, parse_terms(text)?)
    }

    pub(crate) fn from_parts_unchecked(surface: MarkedSurface, terms: Vec<Twist>) -> Self {
        Self { surface, terms }
    }

    pub fn surface(&self) -> MarkedSurface {
        self.surface
    }

    pub fn terms(&self) -> &[Twist] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// All exponents positive; the empty word counts.
    pub fn is_positive(&self) -> bool {
        self.terms.iter().all(|t| t.exp > 0)
    }

    pub fn shadow<Z: Scalar>(&self) -> Sl2Matrix<Z> {
        shadow_of(&self.terms)
    }

    pub fn greek(&self) -> String {
        self.terms.iter().map(Twist::greek).collect::<Vec<_>>().join(" ")
    }
}

pub fn shadow_of<Z: Scalar>(terms: &[Twist]) -> Sl2Matrix<Z> {
    terms.iter().fold(Sl2Matrix::identity(), |acc, t| acc.multiply(&t.shadow()))
}

impl fmt::Display for TwistWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(Twist::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Parses words such as `d1 d2 a1^-3 a2^-3`, `(a1 a2 b)^4`, `δ1 α1^-1` or
/// `[a1^-1](b)`. A bare `a` means `a1`.
pub fn parse_terms(text: &str) -> Result<Vec<Twist>, McgError> {
    let mut p = Parser::new(text);
    let terms = p.word()?;
    p.end()?;
    Ok(terms)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn new(s: &str) -> Self {
        Self { chars: s.chars().collect(), pos: 0 }
    }

    fn err(&self, msg: &str) -> McgError {
        McgError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace() || c == '·' || c == '*') {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn end(&mut self) -> Result<(), McgError> {
        self.skip_ws();
        if self.pos == self.chars.len() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing input"))
        }
    }

    fn digits(&mut self) -> Option<usize> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            None
        } else {
            self.chars[start..self.pos].iter().collect::<String>().parse().ok()
        }
    }

    fn int(&mut self) -> Result<i64, McgError> {
        self.skip_ws();
        let neg = if self.peek() == Some('-') {
            self.pos += 1;
            true
        } else {
            if self.peek() == Some('+') {
                self.pos += 1;
            }
            false
        };
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        let v: i64 = s.parse().map_err(|_| self.err("expected an integer"))?;
        Ok(if neg { -v } else { v })
    }

    fn exponent(&mut self) -> Result<i64, McgError> {
        if self.eat('^') {
            if self.eat('{') {
                let v = self.int()?;
                if !self.eat('}') {
                    return Err(self.err("expected '}'"));
                }
                Ok(v)
            } else {
                self.int()
            }
        } else {
            Ok(1)
        }
    }

    fn at_item(&mut self) -> bool {
        self.skip_ws();
        matches!(self.peek(), Some('a' | 'b' | 'd' | 'α' | 'β' | 'δ' | '[' | '('))
    }

    fn word(&mut self) -> Result<Vec<Twist>, McgError> {
        let mut out = Vec::new();
        while self.at_item() {
            if self.eat('(') {
                let inner = self.word()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                let k = self.exponent()?;
                let unit: Vec<Twist> = if k >= 0 {
                    inner
                } else {
                    inner.into_iter().rev().map(|t| Twist::new(t.curve, -t.exp)).collect()
                };
                for _ in 0..k.unsigned_abs() {
                    out.extend(unit.iter().cloned());
                }
            } else {
                let curve = self.curve()?;
                let exp = self.exponent()?;
                if exp == 0 {
                    return Err(self.err("zero exponent"));
                }
                out.push(Twist::new(curve, exp));
            }
        }
        Ok(out)
    }

    fn curve(&mut self) -> Result<Curve, McgError> {
        self.skip_ws();
        let c = self.peek().ok_or_else(|| self.err("expected a curve"))?;
        self.pos += 1;
        match c {
            'a' | 'α' => Ok(Curve::Alpha(self.digits().unwrap_or(1))),
            'b' | 'β' => Ok(Curve::Beta),
            'd' | 'δ' => self.digits().map(Curve::Delta).ok_or_else(|| self.err("expected a boundary index")),
            '[' => {
                let by = self.curve()?;
                let exp = self.exponent()?;
                if exp == 0 {
                    return Err(self.err("zero exponent"));
                }
                if !self.eat(']') || !self.eat('(') {
                    return Err(self.err("expected ']('"));
                }
                let of = self.curve()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(Curve::image(Twist::new(by, exp), of))
            }
            _ => {
                self.pos -= 1;
                Err(self.err("expected a curve"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type M = Sl2Matrix<BigInt>;

    fn word(n: usize, s: &str) -> TwistWord {
        TwistWord::parse(MarkedSurface::new(n), s).unwrap()
    }

    #[test]
    fn parse_and_print() {
        let w = word(2, "d1 d2 a1^-3 a2^{-3}");
        assert_eq!(w.to_string(), "d1 d2 a1^-3 a2^-3");
        assert_eq!(w.greek(), "δ1 δ2 α1^-3 α2^-3");
        assert_eq!(word(2, "δ1·δ2 α1^-3").len(), 3);
        assert_eq!(word(2, "(a1 a2 b)^4").len(), 12);
        assert_eq!(word(1, "(a b)^-1").to_string(), "b^-1 a1^-1");
        assert_eq!(word(1, "").len(), 0);
        assert!(TwistWord::parse(MarkedSurface::new(1), "d2").is_err());
        assert!(TwistWord::parse(MarkedSurface::new(1), "a1^0").is_err());
        assert!(TwistWord::parse(MarkedSurface::new(1), "x").is_err());
    }

    #[test]
    fn image_curves() {
        let c: Curve = "[a1^-1](b)".parse().unwrap();
        assert_eq!(c.to_string(), "[a1^-1](b)");
        assert_eq!(c.nesting(), 1);
        assert_eq!("[a1](d1)".parse::<Curve>().unwrap(), Curve::Delta(1));
        assert_eq!("[a1](a2)".parse::<Curve>().unwrap(), Curve::Alpha(2));
        assert_eq!("[a1^-1]([a1](b))".parse::<Curve>().unwrap(), Curve::Beta);
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<Curve>(&json).unwrap(), c);
    }

    #[test]
    fn shadows() {
        assert_eq!(word(2, "d1 d2").shadow::<BigInt>(), M::identity());
        assert_eq!(word(2, "(a1 a2 b)^4").shadow::<BigInt>(), M::identity());
        assert_eq!(word(1, "a1^-1").shadow::<BigInt>(), M::from_i64(1, 0, 1, 1));
        assert_eq!(word(1, "(a b)^6").shadow::<BigInt>(), M::identity());
        assert_ne!(word(1, "(a b)^3").shadow::<BigInt>(), M::identity());
        // twist about an image curve is the conjugated twist
        let lhs = word(1, "a1 b").shadow::<BigInt>();
        let rhs = word(1, "[a1](b) a1").shadow::<BigInt>();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn intersections() {
        assert_eq!(intersection(&Curve::Alpha(1), &Curve::Beta), Some(1));
        assert_eq!(intersection(&Curve::Alpha(1), &Curve::Alpha(2)), Some(0));
        assert!(commute(&Curve::Delta(1), &"[a1](b)".parse().unwrap()));
        assert!(!commute(&Curve::Alpha(1), &Curve::Beta));
    }
}
