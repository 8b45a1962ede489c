//! Twist words on a genus one surface with marked curves.

mod certify;
mod curve;
mod moves;
mod relation;

use thiserror::Error;

use crate::openbook::{CurveLabel, OpenBook};

pub use certify::{certify_stein, detect_overtwisted, replay, search, Budget, Certificate, Hints, Rule, Verdict};
pub use curve::{commute, intersection, parse_terms, shadow_of, Curve, MarkedSurface, Twist, TwistWord};
pub use moves::{apply_move, legal_moves, Direction, Move};
pub use relation::{validate_relation, LoadReport, PushOutcome, Rejected, Relation, RelationTable, Source};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum McgError {
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("relation file line {line}: {msg}")]
    RelationSyntax { line: usize, msg: String },
    #[error("twist on {0} has exponent 0")]
    ZeroExponent(String),
    #[error("curve {0} is not on the surface")]
    CurveOutsideSurface(String),
    #[error("{step} is not applicable: {reason}")]
    Inapplicable { step: String, reason: String },
    #[error("unknown relation {0:?}")]
    UnknownRelation(String),
    #[error("{0} changed the shadow")]
    ShadowChanged(String),
    #[error("replay failed at step {step}: {reason}")]
    Replay { step: usize, reason: String },
    #[error("{0}")]
    Io(String),
    #[error("page genus is {0}, not 1")]
    NotElliptic(u64),
    #[error("the page has no boundary")]
    NoBoundary,
    #[error("join along edge {0} is separating")]
    SeparatingJoin(usize),
    #[error("open book carries no join data")]
    MissingProvenance,
}

/// Reads the monodromy of an elliptic open book as a word on the marked
/// surface: the `i`-th boundary circle gives `δi`, and the joins along cycle
/// edges give `α1, α2, ...` in edge order.
pub fn word_from_open_book(ob: &OpenBook) -> Result<TwistWord, McgError> {
    if ob.page().genus != 1 {
        return Err(McgError::NotElliptic(ob.page().genus));
    }
    if ob.page().boundary.is_empty() {
        return Err(McgError::NoBoundary);
    }
    let labels: Vec<String> = ob.page().boundary.iter().map(|c| c.label()).collect();
    let mut alphas: Vec<usize> = Vec::new();
    let mut terms = Vec::new();
    for t in ob.monodromy() {
        let curve = match &t.curve {
            CurveLabel::Boundary(b) => Curve::Delta(labels.iter().position(|l| l == b).expect("validated") + 1),
            CurveLabel::Interior(e) => {
                let join = ob
                    .provenance()
                    .ok_or(McgError::MissingProvenance)?
                    .joins
                    .iter()
                    .find(|j| j.edge == *e)
                    .ok_or(McgError::MissingProvenance)?;
                if join.separating {
                    return Err(McgError::SeparatingJoin(*e));
                }
                let j = match alphas.iter().position(|a| a == e) {
                    Some(j) => j,
                    None => {
                        alphas.push(*e);
                        alphas.len() - 1
                    }
                };
                Curve::Alpha(j + 1)
            }
            CurveLabel::Chain(c) => c.parse()?,
        };
        terms.push(Twist::new(curve, t.exponent));
    }
    let max_alpha = terms
        .iter()
        .filter_map(|t| match t.curve {
            Curve::Alpha(j) => Some(j),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    TwistWord::new(MarkedSurface::with_alphas(labels.len(), max_alpha), terms)
}
