//! Open books built from plumbing graphs.
//!
//! Every vertex contributes a page of the base genus with `|euler|` boundary
//! circles, each carrying one boundary-parallel twist: right-handed when the
//! Euler number is negative, left-handed otherwise. Pages are then joined
//! along the edges: a positive edge consumes a right-handed circle at each
//! end, a negative edge a left-handed one. Missing circles are supplied by
//! puncture pairs (one right- and one left-handed circle), which do not change
//! the 3-manifold. Each join leaves one interior curve carrying a single twist
//! of the edge's handedness.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plumbing::{GraphJson, PlumbingError, PlumbingGraph, Sign};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpenBookError {
    #[error(transparent)]
    Plumbing(#[from] PlumbingError),
    #[error("the empty plumbing graph has no open book here")]
    EmptyGraph,
    #[error("euler number {0} is too large to realise as boundary circles")]
    EulerTooLarge(String),
    #[error("bad label {0:?}")]
    BadLabel(String),
    #[error("twist on curve {0} has exponent 0")]
    ZeroExponent(String),
    #[error("monodromy refers to missing boundary circle {0}")]
    MissingBoundary(String),
    #[error("invalid open book JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Handedness {
    Right,
    Left,
}

impl Handedness {
    pub fn exponent(self) -> i64 {
        match self {
            Handedness::Right => 1,
            Handedness::Left => -1,
        }
    }

    pub fn of_exponent(e: i64) -> Self {
        if e > 0 {
            Handedness::Right
        } else {
            Handedness::Left
        }
    }

    /// Handedness of the natural boundary twists of a circle bundle.
    pub fn of_euler(euler: i64) -> Self {
        if euler < 0 {
            Handedness::Right
        } else {
            Handedness::Left
        }
    }

    /// The circles a join along an edge of this sign consumes.
    pub fn of_edge(sign: Sign) -> Self {
        match sign {
            Sign::Plus => Handedness::Right,
            Sign::Minus => Handedness::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Origin {
    /// One of the `|euler|` circles of the vertex page.
    Natural,
    /// Added with an opposite-handed partner.
    PairAdded,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundaryCircle {
    pub vertex: Option<usize>,
    pub origin: Origin,
    pub index: usize,
    pub handedness: Handedness,
}

impl BoundaryCircle {
    /// `v2.n0`, `v2.p1+`, or without the vertex prefix for standalone pages.
    pub fn label(&self) -> String {
        let prefix = self.vertex.map(|v| format!("v{v}.")).unwrap_or_default();
        match self.origin {
            Origin::Natural => format!("{prefix}n{}", self.index),
            Origin::PairAdded => {
                let s = if self.handedness == Handedness::Right { '+' } else { '-' };
                format!("{prefix}p{}{s}", self.index)
            }
        }
    }

    /// Parses a label; natural circles take `natural_handedness`.
    fn parse(label: &str, natural_handedness: Handedness) -> Result<Self, OpenBookError> {
        let bad = || OpenBookError::BadLabel(label.to_string());
        let (vertex, rest) = match label.split_once('.') {
            Some((v, rest)) => (Some(v.strip_prefix('v').ok_or_else(bad)?.parse().map_err(|_| bad())?), rest),
            None => (None, label),
        };
        if let Some(idx) = rest.strip_prefix('n') {
            let index = idx.parse().map_err(|_| bad())?;
            return Ok(Self { vertex, origin: Origin::Natural, index, handedness: natural_handedness });
        }
        let body = rest.strip_prefix('p').ok_or_else(bad)?;
        let (idx, handedness) = if let Some(i) = body.strip_suffix('+') {
            (i, Handedness::Right)
        } else if let Some(i) = body.strip_suffix('-') {
            (i, Handedness::Left)
        } else {
            return Err(bad());
        };
        let index = idx.parse().map_err(|_| bad())?;
        Ok(Self { vertex, origin: Origin::PairAdded, index, handedness })
    }
}

/// The curve a twist is performed along.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurveLabel {
    /// Parallel to the boundary circle with this label.
    Boundary(String),
    /// The interior curve left by joining along this plumbing edge.
    Interior(usize),
    /// A named curve of a marked system, e.g. `a1` or `b`.
    Chain(String),
}

impl fmt::Display for CurveLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveLabel::Boundary(b) => write!(f, "d[{b}]"),
            CurveLabel::Interior(e) => write!(f, "e[{e}]"),
            CurveLabel::Chain(c) => write!(f, "c[{c}]"),
        }
    }
}

impl std::str::FromStr for CurveLabel {
    type Err = OpenBookError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || OpenBookError::BadLabel(s.to_string());
        let (kind, rest) = s.split_at(s.find('[').ok_or_else(bad)?);
        let inner = rest.strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
        match kind {
            "d" => Ok(CurveLabel::Boundary(inner.to_string())),
            "e" => Ok(CurveLabel::Interior(inner.parse().map_err(|_| bad())?)),
            "c" => Ok(CurveLabel::Chain(inner.to_string())),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwistTerm {
    pub curve: CurveLabel,
    /// Positive is right-handed.
    pub exponent: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Page {
    pub genus: u64,
    pub boundary: Vec<BoundaryCircle>,
}

/// What a single vertex contributed to a built open book.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub vertex: usize,
    pub euler: i64,
    pub genus: u32,
    pub pairs: usize,
    /// Labels of circles used up by joins, in edge order.
    pub consumed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinRecord {
    pub edge: usize,
    pub u_circle: String,
    pub v_circle: String,
    pub handedness: Handedness,
    /// Bridges of the graph give separating curves; cycle edges do not.
    pub separating: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub graph: GraphJson,
    pub vertices: Vec<VertexRecord>,
    pub joins: Vec<JoinRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenBook {
    page: Page,
    monodromy: Vec<TwistTerm>,
    provenance: Option<Provenance>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenBookStats {
    pub genus: u64,
    pub boundary: usize,
    pub boundary_right: usize,
    pub boundary_left: usize,
    pub interior_right: usize,
    pub interior_left: usize,
    pub other_twists: usize,
    pub elliptic: bool,
}

impl OpenBook {
    pub fn new(page: Page, monodromy: Vec<TwistTerm>) -> Result<Self, OpenBookError> {
        let ob = Self { page, monodromy, provenance: None };
        ob.validate()?;
        Ok(ob)
    }

    fn validate(&self) -> Result<(), OpenBookError> {
        for t in &self.monodromy {
            if t.exponent == 0 {
                return Err(OpenBookError::ZeroExponent(t.curve.to_string()));
            }
            if let CurveLabel::Boundary(b) = &t.curve {
                if !self.page.boundary.iter().any(|c| &c.label() == b) {
                    return Err(OpenBookError::MissingBoundary(b.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn page(&self) -> &Page {
        &self.page
    }

    pub fn monodromy(&self) -> &[TwistTerm] {
        &self.monodromy
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    /// A closed page is not an open book yet.
    pub fn requires_augmentation(&self) -> bool {
        self.page.boundary.is_empty()
    }

    fn next_pair_index(&self, vertex: Option<usize>) -> usize {
        self.page
            .boundary
            .iter()
            .filter(|c| c.vertex == vertex && c.origin == Origin::PairAdded)
            .map(|c| c.index + 1)
            .max()
            .unwrap_or(0)
    }

    fn push_pair(&mut self, vertex: Option<usize>, with_twists: bool) {
        let index = self.next_pair_index(vertex);
        for handedness in [Handedness::Right, Handedness::Left] {
            let circle = BoundaryCircle { vertex, origin: Origin::PairAdded, index, handedness };
            if with_twists {
                self.monodromy.push(TwistTerm {
                    curve: CurveLabel::Boundary(circle.label()),
                    exponent: handedness.exponent(),
                });
            }
            self.page.boundary.push(circle);
        }
    }

    /// Two new boundary circles with opposite-handed twists around them.
    pub fn add_puncture_pair(&self) -> Self {
        let mut ob = self.clone();
        ob.push_pair(None, true);
        ob
    }

    /// Undoes the most recent [`Self::add_puncture_pair`] whose circles are
    /// still untouched. `None` if there is no such pair.
    pub fn cancel_puncture_pair(&self) -> Option<Self> {
        let pair_indices = self
            .page
            .boundary
            .iter()
            .filter(|c| c.vertex.is_none() && c.origin == Origin::PairAdded)
            .map(|c| c.index);
        for index in pair_indices.collect::<std::collections::BTreeSet<_>>().into_iter().rev() {
            let labels: Vec<String> = [Handedness::Right, Handedness::Left]
                .iter()
                .map(|&h| BoundaryCircle { vertex: None, origin: Origin::PairAdded, index, handedness: h }.label())
                .collect();
            let twists: Vec<&TwistTerm> = self
                .monodromy
                .iter()
                .filter(|t| matches!(&t.curve, CurveLabel::Boundary(b) if labels.contains(b)))
                .collect();
            let present = labels.iter().all(|l| self.page.boundary.iter().any(|c| &c.label() == l));
            let clean = twists.len() == 2 && twists.iter().map(|t| t.exponent).sum::<i64>() == 0;
            if present && clean {
                let mut ob = self.clone();
                ob.page.boundary.retain(|c| !labels.contains(&c.label()));
                ob.monodromy
                    .retain(|t| !matches!(&t.curve, CurveLabel::Boundary(b) if labels.contains(b)));
                return Some(ob);
            }
        }
        None
    }

    pub fn stats(&self) -> OpenBookStats {
        let mut s = OpenBookStats {
            genus: self.page.genus,
            boundary: self.page.boundary.len(),
            boundary_right: 0,
            boundary_left: 0,
            interior_right: 0,
            interior_left: 0,
            other_twists: 0,
            elliptic: self.page.genus == 1,
        };
        for t in &self.monodromy {
            let right = t.exponent > 0;
            let n = t.exponent.unsigned_abs() as usize;
            match (&t.curve, right) {
                (CurveLabel::Boundary(_), true) => s.boundary_right += n,
                (CurveLabel::Boundary(_), false) => s.boundary_left += n,
                (CurveLabel::Interior(_), true) => s.interior_right += n,
                (CurveLabel::Interior(_), false) => s.interior_left += n,
                (CurveLabel::Chain(_), _) => s.other_twists += n,
            }
        }
        s
    }

    /// Merges the twists of joins between the same pair of vertices into one
    /// term on the lowest edge. Needs provenance; otherwise a no-op.
    pub fn merge_parallel_joins(&self) -> Self {
        let Some(prov) = &self.provenance else {
            return self.clone();
        };
        let ends: BTreeMap<usize, (usize, usize)> = prov
            .graph
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| (i, (e.u.min(e.v), e.u.max(e.v))))
            .collect();
        let mut first_edge: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (&i, &key) in &ends {
            first_edge.entry(key).or_insert(i);
        }
        let mut merged: Vec<TwistTerm> = Vec::new();
        let mut slot: BTreeMap<usize, usize> = BTreeMap::new();
        for t in &self.monodromy {
            match &t.curve {
                CurveLabel::Interior(e) if ends.contains_key(e) => {
                    let rep = first_edge[&ends[e]];
                    if let Some(&pos) = slot.get(&rep) {
                        merged[pos].exponent += t.exponent;
                    } else {
                        slot.insert(rep, merged.len());
                        merged.push(TwistTerm { curve: CurveLabel::Interior(rep), exponent: t.exponent });
                    }
                }
                _ => merged.push(t.clone()),
            }
        }
        merged.retain(|t| t.exponent != 0);
        Self { page: self.page.clone(), monodromy: merged, provenance: self.provenance.clone() }
    }

    /// Human-readable word, boundary twists as `δi` in page order and joined
    /// curves as `αj`, e.g. `δ1 δ2 α1^-3 α2^-3`.
    pub fn render(&self) -> String {
        let mut interior: BTreeMap<usize, usize> = BTreeMap::new();
        for t in &self.monodromy {
            if let CurveLabel::Interior(e) = t.curve {
                let next = interior.len() + 1;
                interior.entry(e).or_insert(next);
            }
        }
        let parts: Vec<String> = self
            .monodromy
            .iter()
            .map(|t| {
                let name = match &t.curve {
                    CurveLabel::Boundary(b) => {
                        let i = self.page.boundary.iter().position(|c| &c.label() == b).unwrap_or(0);
                        format!("δ{}", i + 1)
                    }
                    CurveLabel::Interior(e) => format!("α{}", interior[e]),
                    CurveLabel::Chain(c) => c.clone(),
                };
                if t.exponent == 1 {
                    name
                } else {
                    format!("{name}^{}", t.exponent)
                }
            })
            .collect();
        parts.join(" ")
    }

    pub fn to_json(&self) -> OpenBookJson {
        OpenBookJson {
            genus: self.page.genus,
            boundary: self.page.boundary.iter().map(BoundaryCircle::label).collect(),
            monodromy: self
                .monodromy
                .iter()
                .map(|t| TermJson { curve: t.curve.to_string(), exp: t.exponent })
                .collect(),
        }
    }

    /// Rebuilds an open book from its wire form. Natural circles take the
    /// handedness of the twist around them. Provenance is not carried.
    pub fn from_json(json: &OpenBookJson) -> Result<Self, OpenBookError> {
        let monodromy: Vec<TwistTerm> = json
            .monodromy
            .iter()
            .map(|t| Ok(TwistTerm { curve: t.curve.parse()?, exponent: t.exp }))
            .collect::<Result<_, OpenBookError>>()?;
        let boundary = json
            .boundary
            .iter()
            .map(|label| {
                let twist = monodromy.iter().find(|t| matches!(&t.curve, CurveLabel::Boundary(b) if b == label));
                let natural = twist.map_or(Handedness::Right, |t| Handedness::of_exponent(t.exponent));
                BoundaryCircle::parse(label, natural)
            })
            .collect::<Result<_, _>>()?;
        Self::new(Page { genus: json.genus, boundary }, monodromy)
    }
}

/// Wire form `{"genus":int,"boundary":[labels],"monodromy":[{"curve":label,"exp":int}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub curve: String,
    pub exp: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenBookJson {
    pub genus: u64,
    pub boundary: Vec<String>,
    pub monodromy: Vec<TermJson>,
}

/// Open book of a single circle bundle. A zero Euler number gives a closed
/// page with no monodromy, flagged by [`OpenBook::requires_augmentation`].
pub fn vertex_open_book(euler: i64, genus: u32) -> OpenBook {
    let handedness = Handedness::of_euler(euler);
    let boundary: Vec<BoundaryCircle> = (0..euler.unsigned_abs() as usize)
        .map(|index| BoundaryCircle { vertex: None, origin: Origin::Natural, index, handedness })
        .collect();
    let monodromy = boundary
        .iter()
        .map(|c| TwistTerm { curve: CurveLabel::Boundary(c.label()), exponent: handedness.exponent() })
        .collect();
    OpenBook { page: Page { genus: u64::from(genus), boundary }, monodromy, provenance: None }
}

/// Least number of puncture pairs letting a vertex serve all its joins.
pub fn pairs_needed(euler: i64, need_right: usize, need_left: usize) -> usize {
    let natural = euler.unsigned_abs() as usize;
    let (have_right, have_left) = if euler < 0 { (natural, 0) } else { (0, natural) };
    need_right.saturating_sub(have_right).max(need_left.saturating_sub(have_left))
}

fn bridges<Z: Scalar>(g: &PlumbingGraph<Z>) -> Vec<bool> {
    let mut on_cycle = vec![false; g.edge_count()];
    for c in g.fundamental_cycles() {
        for e in c.edges {
            on_cycle[e] = true;
        }
    }
    on_cycle.into_iter().map(|c| !c).collect()
}

/// Joins the vertex open books of `g` along its edges.
pub fn build_from_plumbing<Z: Scalar>(g: &PlumbingGraph<Z>) -> Result<OpenBook, OpenBookError> {
    if g.vertex_count() == 0 {
        return Err(OpenBookError::EmptyGraph);
    }
    if !g.is_connected() {
        return Err(PlumbingError::Disconnected.into());
    }
    let graph_json = g.to_json().map_err(|e| match e {
        PlumbingError::OutOfRange(s) => OpenBookError::EulerTooLarge(s),
        other => other.into(),
    })?;
    let edges = g.edges();
    let separating = bridges(g);

    let mut boundary = Vec::new();
    let mut monodromy = Vec::new();
    let mut records = Vec::new();
    // (edge, vertex) -> consumed circle label
    let mut consumed_at: BTreeMap<(usize, usize), String> = BTreeMap::new();

    for (v, vert) in graph_json.vertices.iter().enumerate() {
        let incident = g.incident_edges(v);
        let need = |h: Handedness| {
            incident.iter().filter(|&&i| Handedness::of_edge(edges[i].sign) == h).count()
        };
        let isolated_zero = incident.is_empty() && vert.euler == 0;
        let pairs = if isolated_zero {
            1
        } else {
            pairs_needed(vert.euler, need(Handedness::Right), need(Handedness::Left))
        };

        let mut book = vertex_open_book(vert.euler, vert.genus);
        for _ in 0..pairs {
            book.push_pair(None, true);
        }
        let mut circles: Vec<BoundaryCircle> = book
            .page
            .boundary
            .into_iter()
            .map(|c| BoundaryCircle { vertex: Some(v), ..c })
            .collect();

        let mut consumed = Vec::new();
        for &i in &incident {
            let want = Handedness::of_edge(edges[i].sign);
            let pos = circles
                .iter()
                .position(|c| c.handedness == want)
                .expect("puncture pairs cover every join");
            let label = circles.remove(pos).label();
            consumed_at.insert((i, v), label.clone());
            consumed.push(label);
        }
        // an isolated genus 0 vertex with zero Euler number is an annulus with
        // cancelling twists
        let cancel = isolated_zero && vert.genus == 0;
        for c in circles {
            if !cancel {
                monodromy.push(TwistTerm {
                    curve: CurveLabel::Boundary(c.label()),
                    exponent: c.handedness.exponent(),
                });
            }
            boundary.push(c);
        }
        records.push(VertexRecord { vertex: v, euler: vert.euler, genus: vert.genus, pairs, consumed });
    }

    let mut joins = Vec::new();
    for (i, e) in edges.iter().enumerate() {
        let handedness = Handedness::of_edge(e.sign);
        monodromy.push(TwistTerm { curve: CurveLabel::Interior(i), exponent: handedness.exponent() });
        joins.push(JoinRecord {
            edge: i,
            u_circle: consumed_at[&(i, e.u)].clone(),
            v_circle: consumed_at[&(i, e.v)].clone(),
            handedness,
            separating: separating[i],
        });
    }

    let genus = g.total_genus() + g.betti_one() as u64;
    Ok(OpenBook {
        page: Page { genus, boundary },
        monodromy,
        provenance: Some(Provenance { graph: graph_json, vertices: records, joins }),
    })
}
