use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::curve::{commute, intersection, Curve, MarkedSurface, Twist, TwistWord};
use super::moves::{apply_move, apply_unchecked, legal_moves, Direction, Move};
use super::relation::RelationTable;
use super::McgError;

/// Limits for the move search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub depth: usize,
    pub node_limit: usize,
    pub max_len: usize,
    pub max_nesting: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self { depth: 12, node_limit: 20_000, max_len: 48, max_nesting: 2 }
    }
}

impl Budget {
    pub fn with_depth(depth: usize) -> Self {
        Self { depth, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Stein {
        positive_word: String,
    },
    /// A left-handed boundary twist in a word whose curves are pairwise
    /// disjoint; `disjoint` lists those curves.
    Overtwisted {
        curve: Curve,
        exp: i64,
        disjoint: Vec<Curve>,
    },
    Unknown {
        reason: String,
    },
}

/// Which step of [`certify_stein`] decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Positive,
    Overtwisted,
    Pattern,
    Search,
    Hint,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub surface: MarkedSurface,
    pub input: String,
    pub rule: Rule,
    pub verdict: Verdict,
    pub trace: Vec<Move>,
}

impl Certificate {
    pub fn is_stein(&self) -> bool {
        matches!(self.verdict, Verdict::Stein { .. })
    }

    pub fn is_overtwisted(&self) -> bool {
        matches!(self.verdict, Verdict::Overtwisted { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self.verdict, Verdict::Unknown { .. })
    }

    pub fn label(&self) -> &'static str {
        match self.verdict {
            Verdict::Stein { .. } => "stein",
            Verdict::Overtwisted { .. } => "overtwisted",
            Verdict::Unknown { .. } => "unknown",
        }
    }

    fn new(w: &TwistWord, rule: Rule, verdict: Verdict, trace: Vec<Move>) -> Self {
        Self { surface: w.surface(), input: w.to_string(), rule, verdict, trace }
    }

    fn unknown(w: &TwistWord, reason: &str) -> Self {
        Self::new(w, Rule::None, Verdict::Unknown { reason: reason.to_string() }, Vec::new())
    }
}

/// Replayable move scripts keyed by the word they start from.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Hints {
    scripts: BTreeMap<String, Vec<Move>>,
}

impl Hints {
    fn key(w: &TwistWord) -> String {
        let s = w.surface();
        format!("{}/{}: {}", s.boundary, s.alphas, w)
    }

    pub fn register(&mut self, w: &TwistWord, script: Vec<Move>) {
        self.scripts.insert(Self::key(w), script);
    }

    pub fn get(&self, w: &TwistWord) -> Option<&[Move]> {
        self.scripts.get(&Self::key(w)).map(Vec::as_slice)
    }
}

fn net_exponents(w: &TwistWord) -> BTreeMap<Curve, i64> {
    let mut net = BTreeMap::new();
    for t in w.terms() {
        *net.entry(t.curve.clone()).or_insert(0) += t.exp;
    }
    net
}

fn pairwise_disjoint(curves: &[&Curve]) -> bool {
    curves.iter().enumerate().all(|(i, x)| {
        curves[i + 1..].iter().all(|y| x.is_delta() || y.is_delta() || intersection(x, y) == Some(0))
    })
}

/// Overtwisted witness: every curve is a marked curve, they are pairwise
/// disjoint, and the net exponent of some boundary twist is negative.
pub fn detect_overtwisted(w: &TwistWord) -> Option<Certificate> {
    let net = net_exponents(w);
    let curves: Vec<&Curve> = net.keys().collect();
    if !curves.iter().all(|c| c.is_marked()) || !pairwise_disjoint(&curves) {
        return None;
    }
    let (curve, exp) = net.iter().find(|(c, e)| c.is_delta() && **e < 0)?;
    let verdict = Verdict::Overtwisted {
        curve: curve.clone(),
        exp: *exp,
        disjoint: curves.into_iter().cloned().collect(),
    };
    Some(Certificate::new(w, Rule::Overtwisted, verdict, Vec::new()))
}

struct Builder<'a> {
    word: TwistWord,
    trace: Vec<Move>,
    rels: &'a RelationTable,
}

impl Builder<'_> {
    fn step(&mut self, m: Move) -> Result<(), McgError> {
        self.word = apply_move(&self.word, &m, self.rels)?;
        self.trace.push(m);
        Ok(())
    }

    fn terms(&self) -> &[Twist] {
        self.word.terms()
    }
}

fn sort_key(c: &Curve) -> (u8, usize) {
    match c {
        Curve::Delta(i) => (0, *i),
        Curve::Alpha(j) => (1, *j),
        _ => (2, 0),
    }
}

/// Moves the words `δ1^p1 ⋯ δn^pn α1^-m1 ⋯` covered by a chain-type
/// relation to a positive word: commute everything into place, substitute
/// the relation `p = min pi` times, then slide `αj` factors of the inserted
/// blocks to the right until they cancel the negative powers.
fn pattern_rule(w: &TwistWord, rels: &RelationTable) -> Result<Option<Certificate>, String> {
    let net = net_exponents(w);
    if !net.keys().all(|c| matches!(c, Curve::Delta(_) | Curve::Alpha(_))) {
        return Ok(None);
    }
    let n = w.surface().boundary;
    let p = (1..=n)
        .map(|i| net.get(&Curve::Delta(i)).copied().unwrap_or(0).max(0) as usize)
        .min()
        .unwrap_or(0);
    let mut deficits: Vec<(usize, i64)> = Vec::new();
    for (c, e) in &net {
        if let (Curve::Alpha(j), true) = (c, *e < 0) {
            deficits.push((*j, -e));
        }
    }

    let candidates: Vec<_> = rels
        .enabled()
        .filter(|r| r.fits(&w.surface()))
        .filter_map(|r| r.chain_powers().map(|c| (r, c)))
        .collect();
    let covers = |c: &[usize]| {
        deficits.iter().all(|&(j, m)| m <= c.get(j - 1).copied().unwrap_or(0) as i64 * p as i64)
    };
    let chosen = candidates.iter().find(|(_, c)| covers(c));
    if !deficits.is_empty() && chosen.is_none() {
        return Err(if candidates.is_empty() {
            format!("no chain relation for {n} boundary circles")
        } else {
            "exponent bound exceeded".to_string()
        });
    }

    let mut b = Builder { word: w.clone(), trace: Vec::new(), rels };
    let build = |b: &mut Builder| -> Result<(), McgError> {
        // bubble sort into δ1.. then α1..
        loop {
            let t = b.terms();
            let Some(i) = (0..t.len().saturating_sub(1)).find(|&i| sort_key(&t[i].curve) > sort_key(&t[i + 1].curve))
            else {
                break;
            };
            b.step(Move::Commute { index: i })?;
        }
        let mut i = 0;
        while i + 1 < b.terms().len() {
            if b.terms()[i].curve == b.terms()[i + 1].curve {
                b.step(Move::Cancel { index: i })?;
            } else {
                i += 1;
            }
        }
        if deficits.is_empty() {
            return Ok(());
        }
        let (rel, _) = chosen.expect("checked above");
        let block = rel.lhs.len();
        for round in 0..p {
            let start = round * block;
            for i in 1..=n {
                let target = start + i - 1;
                let mut k = (target..b.terms().len())
                    .find(|&k| b.terms()[k].curve == Curve::Delta(i) && b.terms()[k].exp > 0)
                    .expect("boundary twist present");
                if b.terms()[k].exp > 1 {
                    b.step(Move::Split { index: k, first: 1 })?;
                }
                while k > target {
                    b.step(Move::Commute { index: k - 1 })?;
                    k -= 1;
                }
            }
            b.step(Move::Substitute { relation: rel.name.clone(), position: start, direction: Direction::Forward })?;
        }
        for &(j, m) in &deficits {
            let alpha = Curve::Alpha(j);
            for _ in 0..m {
                let q = b.terms().iter().position(|t| t.curve == alpha && t.exp < 0).expect("negative term");
                let mut k = (0..q).rev().find(|&k| b.terms()[k].curve == alpha && b.terms()[k].exp > 0).expect("copy");
                let e = b.terms()[k].exp;
                if e > 1 {
                    b.step(Move::Split { index: k, first: e - 1 })?;
                    k += 1;
                }
                let q = q + usize::from(e > 1);
                while k + 1 < q {
                    let next = &b.terms()[k + 1].curve;
                    if commute(&alpha, next) {
                        b.step(Move::Commute { index: k })?;
                    } else {
                        b.step(Move::Hurwitz { index: k, inverse: false })?;
                    }
                    k += 1;
                }
                b.step(Move::Cancel { index: k })?;
            }
        }
        Ok(())
    };
    build(&mut b).map_err(|e| format!("pattern rule failed: {e}"))?;
    if !b.word.is_positive() {
        return Err("pattern rule did not reach a positive word".to_string());
    }
    let verdict = Verdict::Stein { positive_word: b.word.to_string() };
    Ok(Some(Certificate::new(w, Rule::Pattern, verdict, b.trace)))
}

/// Representative of the word up to swapping adjacent commuting terms.
fn canonical(terms: &[Twist]) -> Vec<Twist> {
    let mut t = terms.to_vec();
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..t.len().saturating_sub(1) {
            if t[i].curve != t[i + 1].curve && commute(&t[i].curve, &t[i + 1].curve) && t[i] > t[i + 1] {
                t.swap(i, i + 1);
                changed = true;
            }
        }
    }
    t
}

struct Search<'a> {
    rels: &'a RelationTable,
    budget: Budget,
    nodes: usize,
    memo: HashMap<Vec<Twist>, usize>,
    path: Vec<Move>,
}

impl Search<'_> {
    fn dfs(&mut self, w: &TwistWord, remaining: usize) -> bool {
        if w.is_positive() {
            return true;
        }
        if remaining == 0 || self.nodes >= self.budget.node_limit {
            return false;
        }
        self.nodes += 1;
        let key = canonical(w.terms());
        if self.memo.get(&key).is_some_and(|&r| r >= remaining) {
            return false;
        }
        self.memo.insert(key, remaining);
        for m in legal_moves(w, self.rels) {
            let Ok(next) = apply_unchecked(w, &m, self.rels) else { continue };
            if next.len() > self.budget.max_len
                || next.terms().iter().any(|t| t.curve.nesting() > self.budget.max_nesting)
            {
                continue;
            }
            self.path.push(m);
            if self.dfs(&next, remaining - 1) {
                return true;
            }
            self.path.pop();
        }
        false
    }
}

/// Iterative deepening over [`legal_moves`]. Returns the move sequence, or
/// the reason nothing was found.
pub fn search(w: &TwistWord, rels: &RelationTable, budget: Budget) -> Result<Vec<Move>, String> {
    let mut s = Search { rels, budget, nodes: 0, memo: HashMap::new(), path: Vec::new() };
    for limit in 1..=budget.depth {
        s.memo.clear();
        s.path.clear();
        if s.dfs(w, limit) {
            return Ok(s.path);
        }
        if s.nodes >= budget.node_limit {
            return Err(format!("search node limit {} reached", budget.node_limit));
        }
    }
    Err(format!("search exhausted at depth {}", budget.depth))
}

fn replay_moves(w: &TwistWord, moves: &[Move], rels: &RelationTable) -> Result<TwistWord, McgError> {
    let mut cur = w.clone();
    for (step, m) in moves.iter().enumerate() {
        cur = apply_move(&cur, m, rels).map_err(|e| McgError::Replay { step, reason: e.to_string() })?;
    }
    Ok(cur)
}

/// Decides what it can about `w`, in order: already positive, overtwisted,
/// chain relation pattern, bounded search, registered hint script.
pub fn certify_stein(w: &TwistWord, rels: &RelationTable, budget: Budget, hints: &Hints) -> Certificate {
    if w.is_positive() {
        let verdict = Verdict::Stein { positive_word: w.to_string() };
        return Certificate::new(w, Rule::Positive, verdict, Vec::new());
    }
    if let Some(c) = detect_overtwisted(w) {
        return c;
    }
    let pattern_reason = match pattern_rule(w, rels) {
        Ok(Some(c)) => return c,
        Ok(None) => None,
        Err(reason) => Some(reason),
    };
    let search_reason = match search(w, rels, budget) {
        Ok(moves) => match replay_moves(w, &moves, rels) {
            Ok(end) if end.is_positive() => {
                let verdict = Verdict::Stein { positive_word: end.to_string() };
                return Certificate::new(w, Rule::Search, verdict, moves);
            }
            _ => "search result failed replay".to_string(),
        },
        Err(reason) => reason,
    };
    if let Some(script) = hints.get(w) {
        if let Ok(end) = replay_moves(w, script, rels) {
            if end.is_positive() {
                let verdict = Verdict::Stein { positive_word: end.to_string() };
                return Certificate::new(w, Rule::Hint, verdict, script.to_vec());
            }
        }
    }
    Certificate::unknown(w, &pattern_reason.unwrap_or(search_reason))
}

/// Checks a certificate independently of how it was found. Returns the
/// final word of the trace.
pub fn replay(cert: &Certificate, rels: &RelationTable) -> Result<TwistWord, McgError> {
    let start = TwistWord::parse(cert.surface, &cert.input)?;
    let end = replay_moves(&start, &cert.trace, rels)?;
    let fail = |reason: &str| McgError::Replay { step: cert.trace.len(), reason: reason.to_string() };
    match &cert.verdict {
        Verdict::Stein { positive_word } => {
            if !end.is_positive() {
                return Err(fail("trace does not end in a positive word"));
            }
            if &end.to_string() != positive_word {
                return Err(fail("trace ends in a different word"));
            }
        }
        Verdict::Overtwisted { .. } => {
            if detect_overtwisted(&start).as_ref().map(|c| &c.verdict) != Some(&cert.verdict) {
                return Err(fail("overtwisted witness does not hold"));
            }
        }
        Verdict::Unknown { .. } => {}
    }
    Ok(end)
}
