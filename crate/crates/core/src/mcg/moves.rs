use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::curve::{commute, intersection, Curve, Twist, TwistWord};
use super::relation::{Relation, RelationTable};
use super::McgError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Replace an occurrence of the right side by the left side.
    Forward,
    Backward,
}

/// One rewrite step. Indices point at the first affected term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum Move {
    /// `x y -> y x` for commuting curves.
    Commute { index: usize },
    /// `x y x -> y x y` for curves meeting once, exponents all `1` or all `-1`.
    Braid { index: usize },
    /// `x^a x^b -> x^(a+b)`, dropping the term when the sum is zero.
    Cancel { index: usize },
    /// `x^e -> x^first x^(e-first)`.
    Split { index: usize, first: i64 },
    Substitute { relation: String, position: usize, direction: Direction },
    /// `x^a y^b -> x^a(y)^b x^a`, or with `inverse` `x^a y^b -> y^b y^-b(x)^a`.
    Hurwitz { index: usize, inverse: bool },
}

fn inapplicable(m: &Move, why: &str) -> McgError {
    McgError::Inapplicable { step: format!("{m:?}"), reason: why.to_string() }
}

fn pair(terms: &[Twist], index: usize, m: &Move) -> Result<(), McgError> {
    if index + 1 >= terms.len() {
        return Err(inapplicable(m, "index out of range"));
    }
    Ok(())
}

fn replace(terms: &[Twist], start: usize, len: usize, with: &[Twist]) -> Vec<Twist> {
    let mut out = Vec::with_capacity(terms.len() + with.len());
    out.extend_from_slice(&terms[..start]);
    out.extend_from_slice(with);
    out.extend_from_slice(&terms[start + len..]);
    out
}

fn sides<'a>(r: &'a Relation, d: Direction) -> (&'a [Twist], &'a [Twist]) {
    match d {
        Direction::Forward => (&r.rhs, &r.lhs),
        Direction::Backward => (&r.lhs, &r.rhs),
    }
}

/// Applies `m` without re-checking the shadow.
pub(crate) fn apply_unchecked(w: &TwistWord, m: &Move, rels: &RelationTable) -> Result<TwistWord, McgError> {
    let t = w.terms();
    let out = match m {
        Move::Commute { index } => {
            pair(t, *index, m)?;
            let (x, y) = (&t[*index], &t[index + 1]);
            if !commute(&x.curve, &y.curve) {
                return Err(inapplicable(m, "curves are not known to be disjoint"));
            }
            replace(t, *index, 2, &[y.clone(), x.clone()])
        }
        Move::Braid { index } => {
            if index + 2 >= t.len() {
                return Err(inapplicable(m, "index out of range"));
            }
            let (x, y, z) = (&t[*index], &t[index + 1], &t[index + 2]);
            if x != z || x.exp != y.exp || x.exp.abs() != 1 {
                return Err(inapplicable(m, "needs x y x with equal unit exponents"));
            }
            if intersection(&x.curve, &y.curve) != Some(1) {
                return Err(inapplicable(m, "curves do not meet exactly once"));
            }
            replace(t, *index, 3, &[y.clone(), x.clone(), y.clone()])
        }
        Move::Cancel { index } => {
            pair(t, *index, m)?;
            let (x, y) = (&t[*index], &t[index + 1]);
            if x.curve != y.curve {
                return Err(inapplicable(m, "different curves"));
            }
            let exp = x.exp + y.exp;
            if exp == 0 {
                replace(t, *index, 2, &[])
            } else {
                replace(t, *index, 2, &[Twist::new(x.curve.clone(), exp)])
            }
        }
        Move::Split { index, first } => {
            let x = t.get(*index).ok_or_else(|| inapplicable(m, "index out of range"))?;
            let rest = x.exp - first;
            if *first == 0 || rest == 0 {
                return Err(inapplicable(m, "split would create a zero exponent"));
            }
            replace(t, *index, 1, &[Twist::new(x.curve.clone(), *first), Twist::new(x.curve.clone(), rest)])
        }
        Move::Substitute { relation, position, direction } => {
            let r = rels.get(relation).ok_or_else(|| McgError::UnknownRelation(relation.clone()))?;
            if !r.fits(&w.surface()) {
                return Err(inapplicable(m, "relation lives on a different surface"));
            }
            let (from, to) = sides(r, *direction);
            if from.is_empty() {
                return Err(inapplicable(m, "empty pattern"));
            }
            if t.get(*position..position + from.len()) != Some(from) {
                return Err(inapplicable(m, "pattern not found at position"));
            }
            replace(t, *position, from.len(), to)
        }
        Move::Hurwitz { index, inverse } => {
            pair(t, *index, m)?;
            let (x, y) = (&t[*index], &t[index + 1]);
            if *inverse {
                let moved = Twist::new(Curve::image(Twist::new(y.curve.clone(), -y.exp), x.curve.clone()), x.exp);
                replace(t, *index, 2, &[y.clone(), moved])
            } else {
                let moved = Twist::new(Curve::image(x.clone(), y.curve.clone()), y.exp);
                replace(t, *index, 2, &[moved, x.clone()])
            }
        }
    };
    Ok(TwistWord::from_parts_unchecked(w.surface(), out))
}

/// Applies `m`, checking applicability and that the shadow is unchanged.
pub fn apply_move(w: &TwistWord, m: &Move, rels: &RelationTable) -> Result<TwistWord, McgError> {
    let out = apply_unchecked(w, m, rels)?;
    if out.shadow::<BigInt>() != w.shadow::<BigInt>() {
        return Err(McgError::ShadowChanged(format!("{m:?}")));
    }
    Ok(out)
}

/// Every applicable move except `Split`, in a fixed order.
pub fn legal_moves(w: &TwistWord, rels: &RelationTable) -> Vec<Move> {
    let t = w.terms();
    let mut out = Vec::new();
    for i in 0..t.len().saturating_sub(1) {
        if t[i].curve == t[i + 1].curve {
            out.push(Move::Cancel { index: i });
        }
    }
    for i in 0..t.len().saturating_sub(2) {
        let (x, y, z) = (&t[i], &t[i + 1], &t[i + 2]);
        if x == z && x.exp == y.exp && x.exp.abs() == 1 && intersection(&x.curve, &y.curve) == Some(1) {
            out.push(Move::Braid { index: i });
        }
    }
    for i in 0..t.len().saturating_sub(1) {
        if t[i].curve != t[i + 1].curve && commute(&t[i].curve, &t[i + 1].curve) {
            out.push(Move::Commute { index: i });
        }
    }
    for i in 0..t.len().saturating_sub(1) {
        if !commute(&t[i].curve, &t[i + 1].curve) {
            out.push(Move::Hurwitz { index: i, inverse: false });
            out.push(Move::Hurwitz { index: i, inverse: true });
        }
    }
    for r in rels.enabled().filter(|r| r.fits(&w.surface())) {
        for direction in [Direction::Forward, Direction::Backward] {
            let (from, _) = sides(r, direction);
            if from.is_empty() || from.len() > t.len() {
                continue;
            }
            for p in 0..=t.len() - from.len() {
                if &t[p..p + from.len()] == from {
                    out.push(Move::Substitute { relation: r.name.clone(), position: p, direction });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcg::curve::MarkedSurface;

    fn w(n: usize, s: &str) -> TwistWord {
        TwistWord::parse(MarkedSurface::new(n), s).unwrap()
    }

    fn apply(word: &TwistWord, m: Move) -> Result<TwistWord, McgError> {
        apply_move(word, &m, &RelationTable::builtin())
    }

    #[test]
    fn basic_moves() {
        assert_eq!(apply(&w(1, "d1 a1"), Move::Commute { index: 0 }).unwrap(), w(1, "a1 d1"));
        assert!(apply(&w(1, "a1 b"), Move::Commute { index: 0 }).is_err());
        assert_eq!(apply(&w(1, "a1 a1^-1"), Move::Cancel { index: 0 }).unwrap(), w(1, ""));
        assert_eq!(apply(&w(1, "a1 a1^2"), Move::Cancel { index: 0 }).unwrap(), w(1, "a1^3"));
        assert_eq!(apply(&w(1, "a1 b a1"), Move::Braid { index: 0 }).unwrap(), w(1, "b a1 b"));
        assert!(apply(&w(2, "a1 a2 a1"), Move::Braid { index: 0 }).is_err());
        assert_eq!(apply(&w(1, "a1^3"), Move::Split { index: 0, first: 1 }).unwrap(), w(1, "a1 a1^2"));
        assert!(apply(&w(1, "a1"), Move::Split { index: 0, first: 1 }).is_err());
    }

    #[test]
    fn substitution() {
        let m = Move::Substitute { relation: "chain2".into(), position: 0, direction: Direction::Forward };
        let out = apply(&w(2, "d1 d2 a1^-3"), m).unwrap();
        assert_eq!(out, w(2, "(a1 a2 b)^4 a1^-3"));
        let back = Move::Substitute { relation: "chain2".into(), position: 0, direction: Direction::Backward };
        assert_eq!(apply(&out, back).unwrap(), w(2, "d1 d2 a1^-3"));
        let wrong = Move::Substitute { relation: "chain1".into(), position: 0, direction: Direction::Forward };
        assert!(apply(&w(2, "d1 d2"), wrong).is_err());
        let missing = Move::Substitute { relation: "nope".into(), position: 0, direction: Direction::Forward };
        assert!(matches!(apply(&w(2, "d1 d2"), missing), Err(McgError::UnknownRelation(_))));
    }

    #[test]
    fn hurwitz_moves() {
        let out = apply(&w(1, "a1 b"), Move::Hurwitz { index: 0, inverse: false }).unwrap();
        assert_eq!(out.to_string(), "[a1](b) a1");
        let out = apply(&w(1, "a1 b^2"), Move::Hurwitz { index: 0, inverse: true }).unwrap();
        assert_eq!(out.to_string(), "b^2 [b^-2](a1)");
        let out = apply(&w(1, "a1^-1 b a1"), Move::Hurwitz { index: 0, inverse: false }).unwrap();
        let out = apply(&out, Move::Cancel { index: 1 }).unwrap();
        assert_eq!(out.to_string(), "[a1^-1](b)");
        assert!(out.is_positive());
    }

    #[test]
    fn move_listing() {
        let word = w(2, "d1 d2 a1 b a1");
        let moves = legal_moves(&word, &RelationTable::builtin());
        assert!(moves.contains(&Move::Braid { index: 2 }));
        assert!(moves.contains(&Move::Substitute {
            relation: "chain2".into(),
            position: 0,
            direction: Direction::Forward
        }));
        for m in &moves {
            apply(&word, m.clone()).unwrap();
        }
    }
}
