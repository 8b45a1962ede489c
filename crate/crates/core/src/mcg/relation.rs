use std::collections::BTreeSet;
use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::curve::{parse_terms, shadow_of, Curve, MarkedSurface, Twist};
use super::McgError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Builtin,
    Loaded,
}

/// `lhs = rhs` on the marked surface with as many boundary circles as the
/// largest `δ` index occurring in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub lhs: Vec<Twist>,
    pub rhs: Vec<Twist>,
    pub source: Source,
}

fn max_index(terms: &[Twist], pick: fn(&Curve) -> Option<usize>) -> usize {
    fn walk(c: &Curve, pick: fn(&Curve) -> Option<usize>) -> usize {
        match c {
            Curve::Image { by, of } => walk(&by.curve, pick).max(walk(of, pick)),
            other => pick(other).unwrap_or(0),
        }
    }
    terms.iter().map(|t| walk(&t.curve, pick)).max().unwrap_or(0)
}

impl Relation {
    pub fn new(name: &str, lhs: &str, rhs: &str, source: Source) -> Result<Self, McgError> {
        Ok(Self { name: name.to_string(), lhs: parse_terms(lhs)?, rhs: parse_terms(rhs)?, source })
    }

    /// Parses `name: LHS = RHS`.
    pub fn parse_line(line: &str, source: Source) -> Result<Self, McgError> {
        let bad = |msg: &str| McgError::Parse { pos: 0, msg: format!("{msg} in {line:?}") };
        let (name, body) = line.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        let (lhs, rhs) = body.split_once('=').ok_or_else(|| bad("missing '='"))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(bad("missing name"));
        }
        Self::new(name, lhs, rhs, source)
    }

    /// Number of boundary circles of the surface the relation lives on.
    pub fn boundary(&self) -> usize {
        let pick = |c: &Curve| match c {
            Curve::Delta(i) => Some(*i),
            _ => None,
        };
        max_index(&self.lhs, pick).max(max_index(&self.rhs, pick))
    }

    pub fn alphas(&self) -> usize {
        let pick = |c: &Curve| match c {
            Curve::Alpha(j) => Some(*j),
            _ => None,
        };
        max_index(&self.lhs, pick).max(max_index(&self.rhs, pick))
    }

    pub fn surface(&self) -> MarkedSurface {
        MarkedSurface::with_alphas(self.boundary(), self.alphas())
    }

    /// Usable on `s`: same boundary count and all curves present.
    pub fn fits(&self, s: &MarkedSurface) -> bool {
        self.boundary() == s.boundary && self.alphas() <= s.alphas
    }

    /// Boundary twists on each side, which the shadow cannot see.
    pub fn delta_content(&self) -> (Vec<usize>, Vec<usize>) {
        let deltas = |ts: &[Twist]| {
            ts.iter()
                .filter_map(|t| match t.curve {
                    Curve::Delta(i) => Some(i),
                    _ => None,
                })
                .collect()
        };
        (deltas(&self.lhs), deltas(&self.rhs))
    }

    /// For a relation `positive word = δ1 δ2 ⋯ δn` in marked curves, the
    /// number of `αj` factors on the left for each `j` (index 0 is `α1`).
    pub fn chain_powers(&self) -> Option<Vec<usize>> {
        let n = self.boundary();
        let expected: Vec<Twist> = (1..=n).map(|i| Twist::new(Curve::Delta(i), 1)).collect();
        if n == 0 || self.rhs != expected {
            return None;
        }
        if self.lhs.iter().any(|t| t.exp <= 0 || !t.curve.is_marked() || t.curve.is_delta()) {
            return None;
        }
        let mut counts = vec![0usize; self.alphas()];
        for t in &self.lhs {
            if let Curve::Alpha(j) = t.curve {
                counts[j - 1] += t.exp as usize;
            }
        }
        Some(counts)
    }

    pub fn display(&self) -> String {
        let side = |ts: &[Twist]| ts.iter().map(Twist::to_string).collect::<Vec<_>>().join(" ");
        format!("{}: {} = {}", self.name, side(&self.lhs), side(&self.rhs))
    }
}

/// Shadow check: both sides act identically on the homology of the capped
/// torus. Necessary, not sufficient.
pub fn validate_relation(r: &Relation) -> bool {
    let s = r.surface();
    let ok_curves = r.lhs.iter().chain(&r.rhs).all(|t| t.exp != 0 && s.contains(&t.curve));
    ok_curves && shadow_of::<BigInt>(&r.lhs) == shadow_of::<BigInt>(&r.rhs)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejected {
    pub line: usize,
    pub name: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub loaded: usize,
    pub duplicates: usize,
    pub rejected: Vec<Rejected>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PushOutcome {
    Added,
    Duplicate,
    Invalid,
}

#[derive(Debug, Clone, Default)]
pub struct RelationTable {
    relations: Vec<Relation>,
    disabled: BTreeSet<String>,
}

impl RelationTable {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The chain relations `(α1⋯αn β)^c = δ1⋯δn` for `(n, c)` in
    /// `(1, 6), (2, 4), (3, 3)`.
    pub fn builtin() -> Self {
        let mut t = Self::empty();
        for (name, lhs, rhs) in [
            ("chain1", "(a1 b)^6", "d1"),
            ("chain2", "(a1 a2 b)^4", "d1 d2"),
            ("chain3", "(a1 a2 a3 b)^3", "d1 d2 d3"),
        ] {
            let r = Relation::new(name, lhs, rhs, Source::Builtin).expect("builtin relation parses");
            assert_eq!(t.push(r), PushOutcome::Added, "builtin relation {name} must validate");
        }
        t
    }

    /// Appends `r` unless it fails validation or repeats a relation already
    /// present (compared by content, not by name).
    pub fn push(&mut self, r: Relation) -> PushOutcome {
        if !validate_relation(&r) {
            return PushOutcome::Invalid;
        }
        if self.relations.iter().any(|q| q.lhs == r.lhs && q.rhs == r.rhs) {
            return PushOutcome::Duplicate;
        }
        self.relations.push(r);
        PushOutcome::Added
    }

    /// Loads `name: LHS = RHS` lines; `#` starts a comment. Syntax errors
    /// abort, shadow failures are reported and skipped.
    pub fn load_str(&mut self, text: &str) -> Result<LoadReport, McgError> {
        let mut report = LoadReport::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let r = Relation::parse_line(line, Source::Loaded)
                .map_err(|e| McgError::RelationSyntax { line: i + 1, msg: e.to_string() })?;
            let name = r.name.clone();
            match self.push(r) {
                PushOutcome::Added => report.loaded += 1,
                PushOutcome::Duplicate => report.duplicates += 1,
                PushOutcome::Invalid => report.rejected.push(Rejected {
                    line: i + 1,
                    name,
                    reason: "shadow mismatch".to_string(),
                }),
            }
        }
        Ok(report)
    }

    pub fn load_file(&mut self, path: &Path) -> Result<LoadReport, McgError> {
        let text = std::fs::read_to_string(path).map_err(|e| McgError::Io(format!("{}: {e}", path.display())))?;
        self.load_str(&text)
    }

    /// Hides a relation from lookups; returns whether it existed.
    pub fn disable(&mut self, name: &str) -> bool {
        let known = self.relations.iter().any(|r| r.name == name);
        if known {
            self.disabled.insert(name.to_string());
        }
        known
    }

    pub fn enabled(&self) -> impl Iterator<Item = &Relation> {
        self.relations.iter().filter(|r| !self.disabled.contains(&r.name))
    }

    pub fn get(&self, name: &str) -> Option<&Relation> {
        self.enabled().find(|r| r.name == name)
    }

    pub fn len(&self) -> usize {
        self.enabled().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
