//! SL(2,Z): exact arithmetic, the `S T^a1 S ... T^ak S` normal form and the
//! homology of the torus bundle with a given monodromy.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::scalar::{self, add, mul, neg, sub, Scalar};
use crate::zlinalg::{cokernel, AbelianGroup, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Sl2Error {
    #[error("expected four comma-separated integers \"a,b,c,d\", got {0:?}")]
    ParseMatrix(String),
    #[error("determinant of {0} is {1}, not 1")]
    Determinant(String, String),
    #[error("cannot parse normal form {0:?}")]
    ParseWord(String),
    #[error("normal form needs at least one exponent")]
    EmptyWord,
}

/// A 2x2 integer matrix of determinant one, `[[a, b], [c, d]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sl2Matrix<Z> {
    a: Z,
    b: Z,
    c: Z,
    d: Z,
}

impl<Z: Scalar> Sl2Matrix<Z> {
    pub fn new(a: Z, b: Z, c: Z, d: Z) -> Result<Self, Sl2Error> {
        let det = sub(&mul(&a, &d), &mul(&b, &c));
        if !det.is_one() {
            return Err(Sl2Error::Determinant(format!("[[{a},{b}],[{c},{d}]]"), det.to_string()));
        }
        Ok(Self { a, b, c, d })
    }

    /// Panics when the determinant is not one.
    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(scalar::int(a), scalar::int(b), scalar::int(c), scalar::int(d))
            .expect("not in SL(2,Z)")
    }

    fn raw(a: Z, b: Z, c: Z, d: Z) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::raw(Z::one(), Z::zero(), Z::zero(), Z::one())
    }

    pub fn minus_identity() -> Self {
        Self::raw(neg(&Z::one()), Z::zero(), Z::zero(), neg(&Z::one()))
    }

    /// `[[0, -1], [1, 0]]`
    pub fn s() -> Self {
        Self::raw(Z::zero(), neg(&Z::one()), Z::one(), Z::zero())
    }

    /// `[[1, 1], [0, 1]]`
    pub fn t() -> Self {
        Self::t_pow(&Z::one())
    }

    pub fn t_pow(k: &Z) -> Self {
        Self::raw(Z::one(), k.clone(), Z::zero(), Z::one())
    }

    pub fn entries(&self) -> [&Z; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn trace(&self) -> Z {
        add(&self.a, &self.d)
    }

    pub fn inverse(&self) -> Self {
        Self::raw(self.d.clone(), neg(&self.b), neg(&self.c), self.a.clone())
    }

    pub fn multiply(&self, rhs: &Self) -> Self {
        Self::raw(
            add(&mul(&self.a, &rhs.a), &mul(&self.b, &rhs.c)),
            add(&mul(&self.a, &rhs.b), &mul(&self.b, &rhs.d)),
            add(&mul(&self.c, &rhs.a), &mul(&self.d, &rhs.c)),
            add(&mul(&self.c, &rhs.b), &mul(&self.d, &rhs.d)),
        )
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, exp: i64) -> Self {
        let mut base = if exp < 0 { self.inverse() } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.multiply(&base);
            }
            base = base.multiply(&base);
            e >>= 1;
        }
        acc
    }

    /// `p * self * p^-1`
    pub fn conjugate_by(&self, p: &Self) -> Self {
        p.multiply(self).multiply(&p.inverse())
    }

    pub fn to_int_matrix(&self) -> IntMatrix<Z> {
        IntMatrix::new(2, 2, vec![self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone()])
            .expect("2x2")
    }

    /// Comma-separated `a,b,c,d`, the CLI input format.
    pub fn to_csv(&self) -> String {
        format!("{},{},{},{}", self.a, self.b, self.c, self.d)
    }
}

impl<Z: Scalar> std::ops::Mul for &Sl2Matrix<Z> {
    type Output = Sl2Matrix<Z>;

    fn mul(self, rhs: Self) -> Sl2Matrix<Z> {
        self.multiply(rhs)
    }
}

impl<Z: Scalar> fmt::Display for Sl2Matrix<Z> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

impl<Z: Scalar> FromStr for Sl2Matrix<Z> {
    type Err = Sl2Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<Z> = s
            .split(',')
            .map(scalar::parse::<Z>)
            .collect::<Option<_>>()
            .ok_or_else(|| Sl2Error::ParseMatrix(s.to_string()))?;
        let [a, b, c, d]: [Z; 4] =
            parts.try_into().map_err(|_| Sl2Error::ParseMatrix(s.to_string()))?;
        Self::new(a, b, c, d)
    }
}

/// Exponent sequence `(a1, ..., ak)` standing for `S T^a1 S T^a2 ... S T^ak S`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalForm<Z> {
    exponents: Vec<Z>,
}

impl<Z: Scalar> NormalForm<Z> {
    pub fn new(exponents: Vec<Z>) -> Result<Self, Sl2Error> {
        if exponents.is_empty() {
            return Err(Sl2Error::EmptyWord);
        }
        Ok(Self { exponents })
    }

    pub fn from_i64(exponents: &[i64]) -> Self {
        Self::new(exponents.iter().map(|&e| scalar::int(e)).collect()).expect("nonempty")
    }

    pub fn exponents(&self) -> &[Z] {
        &self.exponents
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl<Z: Scalar> fmt::Display for NormalForm<Z> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S")?;
        for e in &self.exponents {
            write!(f, " T^{e} S")?;
        }
        Ok(())
    }
}

impl<Z: Scalar> FromStr for NormalForm<Z> {
    type Err = Sl2Error;

    /// Accepts either the rendered word `S T^1 S T^0 S` or a bare
    /// comma-separated exponent list `1,0`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Sl2Error::ParseWord(s.to_string());
        let s = s.trim();
        if !s.contains('S') {
            let exps = s.split(',').map(scalar::parse::<Z>).collect::<Option<Vec<_>>>().ok_or_else(bad)?;
            return Self::new(exps);
        }
        let tokens: Vec<&str> = s.split_whitespace().collect();
        if tokens.len() < 3 || tokens.len() % 2 == 0 {
            return Err(bad());
        }
        let mut exps = Vec::new();
        for (i, tok) in tokens.iter().enumerate() {
            if i % 2 == 0 {
                if *tok != "S" {
                    return Err(bad());
                }
            } else {
                let body = tok.strip_prefix("T^").ok_or_else(bad)?;
                let body = body.trim_start_matches('{').trim_end_matches('}');
                exps.push(scalar::parse::<Z>(body).ok_or_else(bad)?);
            }
        }
        Self::new(exps)
    }
}

/// Multiplies out `S T^a1 S ... T^ak S`.
pub fn recompose<Z: Scalar>(word: &NormalForm<Z>) -> Sl2Matrix<Z> {
    let s = Sl2Matrix::s();
    word.exponents
        .iter()
        .fold(s.clone(), |acc, e| acc.multiply(&Sl2Matrix::t_pow(e)).multiply(&s))
}

/// Exponent `e` minimising `|r + e*p|` for `p != 0`; ties go to a
/// nonnegative `e`, then to the smaller `|e|`.
fn peel_quotient<Z: Scalar>(p: &Z, r: &Z) -> Z {
    let base = neg(r).div_floor(p);
    let candidates = [sub(&base, &Z::one()), base.clone(), add(&base, &Z::one())];
    candidates
        .into_iter()
        .min_by(|x, y| {
            let key = |e: &Z| (add(r, &mul(e, p)).abs(), e.is_negative(), e.abs());
            key(x).cmp(&key(y))
        })
        .expect("three candidates")
}

/// Writes `a` as `S T^a1 S ... T^ak S`.
///
/// Repeatedly splits off a leading `S T^e` by Euclidean reduction of the
/// first column until the remainder is of the form `S T^x S`. The output is
/// deterministic and recomposes to `a` exactly (not just up to sign).
pub fn decompose<Z: Scalar>(a: &Sl2Matrix<Z>) -> NormalForm<Z> {
    let minus_one = neg(&Z::one());
    let s_inv = Sl2Matrix::<Z>::s().inverse();
    let mut cur = a.clone();
    let mut exps = Vec::new();
    loop {
        // S T^x S = [[-1, 0], [x, -1]]
        if cur.b.is_zero() && cur.a == minus_one && cur.d == minus_one {
            exps.push(cur.c.clone());
            break;
        }
        let e = if !cur.a.is_zero() {
            peel_quotient(&cur.a, &cur.c)
        } else if cur.c == minus_one {
            // the next remainder becomes -I = S T^0 S
            neg(&cur.d)
        } else {
            // the next remainder becomes I
            cur.d.clone()
        };
        cur = Sl2Matrix::t_pow(&neg(&e)).multiply(&s_inv).multiply(&cur);
        exps.push(e);
    }
    NormalForm { exponents: exps }
}

/// Shortest normal form with every `|ai| <= max_abs` and `k <= max_len`,
/// found by exhaustive enumeration in lexicographic order.
pub fn shortest_normal_form<Z: Scalar>(
    a: &Sl2Matrix<Z>,
    max_len: usize,
    max_abs: i64,
) -> Option<NormalForm<Z>> {
    let values: Vec<Z> = (-max_abs..=max_abs).map(scalar::int).collect();
    let s = Sl2Matrix::<Z>::s();
    fn go<Z: Scalar>(
        prefix: &Sl2Matrix<Z>,
        remaining: usize,
        values: &[Z],
        s: &Sl2Matrix<Z>,
        target: &Sl2Matrix<Z>,
        exps: &mut Vec<Z>,
    ) -> bool {
        for v in values {
            let next = prefix.multiply(&Sl2Matrix::t_pow(v)).multiply(s);
            exps.push(v.clone());
            if remaining == 1 {
                if &next == target {
                    return true;
                }
            } else if go(&next, remaining - 1, values, s, target, exps) {
                return true;
            }
            exps.pop();
        }
        false
    }
    (1..=max_len).find_map(|len| {
        let mut exps = Vec::new();
        go(&s, len, &values, &s, a, &mut exps).then(|| NormalForm { exponents: exps })
    })
}

/// First homology of the mapping torus: `Z + coker(A - I)`.
pub fn torus_bundle_h1<Z: Scalar>(a: &Sl2Matrix<Z>) -> AbelianGroup<Z> {
    let one = Z::one();
    let shifted = IntMatrix::new(
        2,
        2,
        vec![sub(&a.a, &one), a.b.clone(), a.c.clone(), sub(&a.d, &one)],
    )
    .expect("2x2");
    AbelianGroup::free(1).direct_sum(&cokernel(&shifted))
}
