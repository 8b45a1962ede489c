//! Plumbing graphs of circle bundles and their calculus.
//!
//! A vertex is a circle bundle (Euler number, genus of the base), an edge is
//! a signed plumbing. The graph of a torus bundle with monodromy
//! `S T^a1 S ... T^ak S` is the cycle on `k + 1` vertices weighted
//! `(a1, ..., ak, 0)` with every edge negative.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{self, add, sub, Scalar};
use crate::sl2z::NormalForm;
use crate::zlinalg::{cokernel, AbelianGroup, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlumbingError {
    #[error("vertex {0} does not exist")]
    NoVertex(usize),
    #[error("edge {0} does not exist")]
    NoEdge(usize),
    #[error("edge {0} is a loop")]
    Loop(usize),
    #[error("plumbing graph is not connected")]
    Disconnected,
    #[error("blow-down needs euler number +1 or -1 at vertex {vertex}, found {euler}")]
    NotUnitEuler { vertex: usize, euler: String },
    #[error("blow-down needs a genus 0 vertex, vertex {vertex} has genus {genus}")]
    PositiveGenus { vertex: usize, genus: u32 },
    #[error("blow-down needs degree at most 2, vertex {vertex} has degree {degree}")]
    DegreeTooHigh { vertex: usize, degree: usize },
    #[error("blowing down vertex {0} would create a loop")]
    WouldCreateLoop(usize),
    #[error("edge sign must be +1 or -1, got {0}")]
    BadSign(i64),
    #[error("euler number {0} does not fit the JSON integer range")]
    OutOfRange(String),
    #[error("invalid plumbing JSON: {0}")]
    Json(String),
}

/// Edge sign, also used for the framing of a blow-up (`Plus` is `+1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i64(v: i64) -> Result<Self, PlumbingError> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(PlumbingError::BadSign(other)),
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vertex<Z> {
    pub euler: Z,
    pub genus: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub sign: Sign,
}

impl Edge {
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }
}

/// A connected, loop-free plumbing multigraph. The empty graph stands for S^3.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlumbingGraph<Z> {
    vertices: Vec<Vertex<Z>>,
    edges: Vec<Edge>,
}

/// Symmetric matrix with Euler numbers on the diagonal and summed edge
/// signs off it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkingMatrix<Z>(IntMatrix<Z>);

impl<Z: Scalar> LinkingMatrix<Z> {
    pub fn matrix(&self) -> &IntMatrix<Z> {
        &self.0
    }

    pub fn into_matrix(self) -> IntMatrix<Z> {
        self.0
    }
}

/// A fundamental cycle relative to the BFS spanning tree rooted at vertex 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundamentalCycle {
    /// The non-tree edge that closes the cycle.
    pub closing_edge: usize,
    pub edges: Vec<usize>,
    pub sign: Sign,
}

impl<Z: Scalar> PlumbingGraph<Z> {
    pub fn new(vertices: Vec<Vertex<Z>>, edges: Vec<Edge>) -> Result<Self, PlumbingError> {
        let g = Self { vertices, edges };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<(), PlumbingError> {
        for (i, e) in self.edges.iter().enumerate() {
            for end in [e.u, e.v] {
                if end >= self.vertices.len() {
                    return Err(PlumbingError::NoVertex(end));
                }
            }
            if e.u == e.v {
                return Err(PlumbingError::Loop(i));
            }
        }
        if !self.is_connected() {
            return Err(PlumbingError::Disconnected);
        }
        Ok(())
    }

    /// Cycle on `k + 1` vertices weighted `(a1, ..., ak, 0)`, all edges negative.
    pub fn from_normal_form(word: &NormalForm<Z>) -> Self {
        let vertices: Vec<Vertex<Z>> = word
            .exponents()
            .iter()
            .cloned()
            .chain(std::iter::once(Z::zero()))
            .map(|euler| Vertex { euler, genus: 0 })
            .collect();
        let n = vertices.len();
        let edges = (0..n)
            .map(|i| Edge { u: i, v: (i + 1) % n, sign: Sign::Minus })
            .collect();
        Self { vertices, edges }
    }

    /// A single circle bundle with Euler number `euler` over a genus `genus` surface.
    pub fn circle_bundle(euler: Z, genus: u32) -> Self {
        Self { vertices: vec![Vertex { euler, genus }], edges: Vec::new() }
    }

    pub fn vertices(&self) -> &[Vertex<Z>] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().map(|e| usize::from(e.u == v) + usize::from(e.v == v)).sum()
    }

    /// Edge ids incident to `v`, in id order.
    pub fn incident_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| self.edges[i].touches(v)).collect()
    }

    fn check_vertex(&self, v: usize) -> Result<(), PlumbingError> {
        if v < self.vertices.len() {
            Ok(())
        } else {
            Err(PlumbingError::NoVertex(v))
        }
    }

    fn check_edge(&self, e: usize) -> Result<(), PlumbingError> {
        if e < self.edges.len() {
            Ok(())
        } else {
            Err(PlumbingError::NoEdge(e))
        }
    }

    fn component_count(&self) -> usize {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for e in &self.edges {
                    if e.touches(x) {
                        let y = e.other(x);
                        if !seen[y] {
                            seen[y] = true;
                            stack.push(y);
                        }
                    }
                }
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// First Betti number of the graph, `#E - #V + #components`.
    pub fn betti_one(&self) -> usize {
        self.edges.len() + self.component_count() - self.vertices.len()
    }

    pub fn total_genus(&self) -> u64 {
        self.vertices.iter().map(|v| u64::from(v.genus)).sum()
    }

    pub fn linking_matrix(&self) -> LinkingMatrix<Z> {
        let n = self.vertices.len();
        let mut m = IntMatrix::zeros(n, n);
        for (i, v) in self.vertices.iter().enumerate() {
            m.set(i, i, v.euler.clone());
        }
        for e in &self.edges {
            let s = scalar::int::<Z>(e.sign.value());
            let uv = add(m.get(e.u, e.v), &s);
            m.set(e.u, e.v, uv.clone());
            m.set(e.v, e.u, uv);
        }
        LinkingMatrix(m)
    }

    /// `Z^(b1 + 2 * sum of genera) + coker(linking matrix)`.
    pub fn h1(&self) -> AbelianGroup<Z> {
        let free = self.betti_one() + 2 * self.total_genus() as usize;
        AbelianGroup::free(free).direct_sum(&cokernel(self.linking_matrix().matrix()))
    }

    /// Reverses the orientation of the base of `v`: every incident edge
    /// changes sign.
    pub fn vertex_flip(&self, v: usize) -> Result<Self, PlumbingError> {
        self.check_vertex(v)?;
        let mut g = self.clone();
        for e in g.edges.iter_mut().filter(|e| e.touches(v)) {
            e.sign = e.sign.flip();
        }
        Ok(g)
    }

    /// BFS spanning tree from vertex 0: `parent[x] = (parent vertex, edge id)`.
    fn spanning_tree(&self) -> (Vec<Option<(usize, usize)>>, Vec<bool>) {
        let n = self.vertices.len();
        let mut parent = vec![None; n];
        let mut in_tree = vec![false; self.edges.len()];
        if n == 0 {
            return (parent, in_tree);
        }
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for (i, e) in self.edges.iter().enumerate() {
                if !e.touches(x) {
                    continue;
                }
                let y = e.other(x);
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some((x, i));
                    in_tree[i] = true;
                    queue.push_back(y);
                }
            }
        }
        (parent, in_tree)
    }

    pub fn fundamental_cycles(&self) -> Vec<FundamentalCycle> {
        let (parent, in_tree) = self.spanning_tree();
        let path_to_root = |mut x: usize| {
            let mut path = vec![(x, None)];
            while let Some((p, e)) = parent[x] {
                path.push((p, Some(e)));
                x = p;
            }
            path
        };
        let mut cycles = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if in_tree[i] {
                continue;
            }
            let pu = path_to_root(e.u);
            let pv = path_to_root(e.v);
            // strip the common tail above the lowest common ancestor
            let mut a = pu.len();
            let mut b = pv.len();
            while a > 1 && b > 1 && pu[a - 2].0 == pv[b - 2].0 {
                a -= 1;
                b -= 1;
            }
            let mut edges = vec![i];
            edges.extend(pu[1..a].iter().filter_map(|(_, e)| *e));
            edges.extend(pv[1..b].iter().filter_map(|(_, e)| *e));
            let sign = edges.iter().fold(Sign::Plus, |acc, &k| acc.times(self.edges[k].sign));
            cycles.push(FundamentalCycle { closing_edge: i, edges, sign });
        }
        cycles
    }

    /// Product of edge signs around each fundamental cycle, keyed by the
    /// closing edge. Invariant under [`Self::vertex_flip`].
    pub fn cycle_sign_obstruction(&self) -> BTreeMap<usize, Sign> {
        self.fundamental_cycles().into_iter().map(|c| (c.closing_edge, c.sign)).collect()
    }

    /// Replaces edge `e` by a new genus 0 vertex of Euler number `eps`.
    ///
    /// The endpoints gain `eps` each and the two new edges carry signs whose
    /// product is `-eps * sign(e)`; `(-, -)` is used when legal, otherwise
    /// `(-, +)`. The new vertex gets the next id.
    pub fn blow_up_edge(&self, e: usize, eps: Sign) -> Result<Self, PlumbingError> {
        self.check_edge(e)?;
        let old = self.edges[e];
        let product = eps.flip().times(old.sign);
        let (s1, s2) = match product {
            Sign::Plus => (Sign::Minus, Sign::Minus),
            Sign::Minus => (Sign::Minus, Sign::Plus),
        };
        let eps_z = scalar::int::<Z>(eps.value());
        let mut g = self.clone();
        g.edges.remove(e);
        let w = g.vertices.len();
        g.vertices.push(Vertex { euler: eps_z.clone(), genus: 0 });
        g.vertices[old.u].euler = add(&g.vertices[old.u].euler, &eps_z);
        g.vertices[old.v].euler = add(&g.vertices[old.v].euler, &eps_z);
        g.edges.push(Edge { u: old.u, v: w, sign: s1 });
        g.edges.push(Edge { u: w, v: old.v, sign: s2 });
        Ok(g)
    }

    /// Attaches a new leaf of Euler number `eps` to `v` by an edge of sign
    /// `sign`; `v` gains `eps`.
    pub fn blow_up_leaf(&self, v: usize, eps: Sign, sign: Sign) -> Result<Self, PlumbingError> {
        self.check_vertex(v)?;
        let eps_z = scalar::int::<Z>(eps.value());
        let mut g = self.clone();
        let w = g.vertices.len();
        g.vertices.push(Vertex { euler: eps_z.clone(), genus: 0 });
        g.vertices[v].euler = add(&g.vertices[v].euler, &eps_z);
        g.edges.push(Edge { u: v, v: w, sign });
        Ok(g)
    }

    /// Removes a genus 0 vertex of Euler number ±1 and degree at most 2.
    ///
    /// Neighbours lose the Euler number of `v`; two neighbours get joined by
    /// an edge of sign `-euler(v) * s1 * s2`. Higher ids shift down by one.
    pub fn blow_down(&self, v: usize) -> Result<Self, PlumbingError> {
        self.check_vertex(v)?;
        let vert = &self.vertices[v];
        let eps = if vert.euler.is_one() {
            Sign::Plus
        } else if vert.euler == scalar::int(-1) {
            Sign::Minus
        } else {
            return Err(PlumbingError::NotUnitEuler { vertex: v, euler: vert.euler.to_string() });
        };
        if vert.genus != 0 {
            return Err(PlumbingError::PositiveGenus { vertex: v, genus: vert.genus });
        }
        let incident = self.incident_edges(v);
        if incident.len() > 2 {
            return Err(PlumbingError::DegreeTooHigh { vertex: v, degree: incident.len() });
        }
        let ends: Vec<(usize, Sign)> =
            incident.iter().map(|&i| (self.edges[i].other(v), self.edges[i].sign)).collect();
        if ends.len() == 2 && ends[0].0 == ends[1].0 {
            return Err(PlumbingError::WouldCreateLoop(v));
        }
        let eps_z = scalar::int::<Z>(eps.value());
        let mut g = self.clone();
        for &(u, _) in &ends {
            g.vertices[u].euler = sub(&g.vertices[u].euler, &eps_z);
        }
        g.edges = self.edges.iter().filter(|e| !e.touches(v)).copied().collect();
        if let [(u1, s1), (u2, s2)] = ends[..] {
            g.edges.push(Edge { u: u1, v: u2, sign: eps.flip().times(s1).times(s2) });
        }
        g.vertices.remove(v);
        let shift = |x: usize| if x > v { x - 1 } else { x };
        for e in &mut g.edges {
            e.u = shift(e.u);
            e.v = shift(e.v);
        }
        Ok(g)
    }

    /// Exhaustive isomorphism test (vertex weights, edge multiplicities and
    /// signs). Factorial in the vertex count; meant for small graphs.
    pub fn is_isomorphic(&self, other: &Self) -> bool {
        let n = self.vertices.len();
        if n != other.vertices.len() || self.edges.len() != other.edges.len() {
            return false;
        }
        let key = |g: &Self, map: &[usize]| {
            let mut edges: Vec<(usize, usize, Sign)> = g
                .edges
                .iter()
                .map(|e| {
                    let (a, b) = (map[e.u], map[e.v]);
                    (a.min(b), a.max(b), e.sign)
                })
                .collect();
            edges.sort();
            edges
        };
        let identity: Vec<usize> = (0..n).collect();
        let target = key(other, &identity);
        let mut perm = identity.clone();
        let mut used = vec![false; n];
        fn search<Z: Scalar>(
            g: &PlumbingGraph<Z>,
            other: &PlumbingGraph<Z>,
            depth: usize,
            perm: &mut Vec<usize>,
            used: &mut Vec<bool>,
            check: &dyn Fn(&[usize]) -> bool,
        ) -> bool {
            if depth == perm.len() {
                return check(perm);
            }
            for t in 0..perm.len() {
                if used[t] || g.vertices[depth] != other.vertices[t] {
                    continue;
                }
                used[t] = true;
                perm[depth] = t;
                if search(g, other, depth + 1, perm, used, check) {
                    return true;
                }
                used[t] = false;
            }
            false
        }
        let check = |map: &[usize]| key(self, map) == target;
        search(self, other, 0, &mut perm, &mut used, &check)
    }

    pub fn to_json(&self) -> Result<GraphJson, PlumbingError> {
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                v.euler
                    .to_i64()
                    .map(|euler| VertexJson { euler, genus: v.genus })
                    .ok_or_else(|| PlumbingError::OutOfRange(v.euler.to_string()))
            })
            .collect::<Result<_, _>>()?;
        let edges = self
            .edges
            .iter()
            .map(|e| EdgeJson { u: e.u, v: e.v, sign: e.sign.value() })
            .collect();
        Ok(GraphJson { vertices, edges })
    }

    pub fn from_json(json: &GraphJson) -> Result<Self, PlumbingError> {
        let vertices = json
            .vertices
            .iter()
            .map(|v| Vertex { euler: scalar::int(v.euler), genus: v.genus })
            .collect();
        let edges = json
            .edges
            .iter()
            .map(|e| Ok(Edge { u: e.u, v: e.v, sign: Sign::from_i64(e.sign)? }))
            .collect::<Result<_, PlumbingError>>()?;
        Self::new(vertices, edges)
    }

    pub fn from_json_str(s: &str) -> Result<Self, PlumbingError> {
        let json: GraphJson = serde_json::from_str(s).map_err(|e| PlumbingError::Json(e.to_string()))?;
        Self::from_json(&json)
    }

    /// Graphviz rendering; vertices labelled `euler,genus`, edges `+` or `-`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph plumbing {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "  v{i} [label=\"{},{}\"];", v.euler, v.genus);
        }
        for e in &self.edges {
            let _ = writeln!(out, "  v{} -- v{} [label=\"{}\"];", e.u, e.v, e.sign);
        }
        out.push_str("}\n");
        out
    }
}

impl<Z: Scalar> fmt::Display for PlumbingGraph<Z> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let weights: Vec<String> =
            self.vertices.iter().map(|v| format!("({},{})", v.euler, v.genus)).collect();
        let edges: Vec<String> =
            self.edges.iter().map(|e| format!("{}{}{}", e.u, e.sign, e.v)).collect();
        write!(f, "vertices {} edges {}", weights.join(" "), edges.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub euler: i64,
    pub genus: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub u: usize,
    pub v: usize,
    pub sign: i64,
}

/// Wire form `{"vertices":[{"euler","genus"}],"edges":[{"u","v","sign"}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2z::{recompose, torus_bundle_h1, Sl2Matrix};
    use num_bigint::BigInt;

    type G = PlumbingGraph<BigInt>;
    type W = NormalForm<BigInt>;

    fn graph(weights: &[(i64, u32)], edges: &[(usize, usize, i64)]) -> G {
        G::new(
            weights.iter().map(|&(e, g)| Vertex { euler: e.into(), genus: g }).collect(),
            edges
                .iter()
                .map(|&(u, v, s)| Edge { u, v, sign: Sign::from_i64(s).unwrap() })
                .collect(),
        )
        .unwrap()
    }

    fn cycle(weights: &[i64]) -> G {
        let n = weights.len();
        let w: Vec<(i64, u32)> = weights.iter().map(|&e| (e, 0)).collect();
        let e: Vec<(usize, usize, i64)> = (0..n).map(|i| (i, (i + 1) % n, -1)).collect();
        graph(&w, &e)
    }

    #[test]
    fn from_normal_form_shapes() {
        let g = G::from_normal_form(&W::from_i64(&[1, 0]));
        assert_eq!(g, cycle(&[1, 0, 0]));
        let g = G::from_normal_form(&W::from_i64(&[0, 4, 0]));
        assert_eq!(g, cycle(&[0, 4, 0, 0]));
        let g = G::from_normal_form(&W::from_i64(&[0]));
        assert_eq!(g, graph(&[(0, 0), (0, 0)], &[(0, 1, -1), (1, 0, -1)]));
    }

    #[test]
    fn normal_form_graph_h1_matches_bundle() {
        for w in [vec![1, 0], vec![0, 3, 0], vec![0]] {
            let w = W::from_i64(&w);
            assert_eq!(G::from_normal_form(&w).h1(), torus_bundle_h1(&recompose(&w)));
        }
        assert_eq!(G::from_normal_form(&W::from_i64(&[1, 0])).h1().to_string(), "Z + Z/3");
    }

    #[test]
    fn linking_matrices() {
        let m = cycle(&[1, 0, 0]).linking_matrix().into_matrix();
        assert_eq!(m, IntMatrix::from_rows(&[vec![1, -1, -1], vec![-1, 0, -1], vec![-1, -1, 0]]));
        let m = G::from_normal_form(&W::from_i64(&[0])).linking_matrix().into_matrix();
        assert_eq!(m, IntMatrix::from_rows(&[vec![0, -2], vec![-2, 0]]));
        let m = G::circle_bundle(7.into(), 1).linking_matrix().into_matrix();
        assert_eq!(m, IntMatrix::from_rows(&[vec![7]]));
        assert!(cycle(&[3, -2, 5, 1]).linking_matrix().matrix().is_symmetric());
    }

    #[test]
    fn h1_examples() {
        assert_eq!(cycle(&[0, 3, 0, 0]).h1().to_string(), "Z^2 + Z/3");
        assert_eq!(G::circle_bundle((-2).into(), 1).h1().to_string(), "Z^2 + Z/2");
        assert_eq!(
            G::circle_bundle((-2).into(), 1).h1(),
            torus_bundle_h1(&Sl2Matrix::t_pow(&(-2).into()))
        );
        let three = cycle(&[0, 0, 0]).h1();
        assert_eq!(three.to_string(), "Z + Z/2");
        assert_eq!(three, torus_bundle_h1(&Sl2Matrix::from_i64(0, 1, -1, 0)));
    }

    #[test]
    fn validation_errors() {
        let loop_edge = G::new(
            vec![Vertex { euler: 0.into(), genus: 0 }],
            vec![Edge { u: 0, v: 0, sign: Sign::Minus }],
        );
        assert_eq!(loop_edge, Err(PlumbingError::Loop(0)));
        let split = G::new(
            vec![Vertex { euler: 0.into(), genus: 0 }, Vertex { euler: 1.into(), genus: 0 }],
            vec![],
        );
        assert_eq!(split, Err(PlumbingError::Disconnected));
        let dangling = G::new(
            vec![Vertex { euler: 0.into(), genus: 0 }],
            vec![Edge { u: 0, v: 3, sign: Sign::Minus }],
        );
        assert_eq!(dangling, Err(PlumbingError::NoVertex(3)));
        assert!(Sign::from_i64(2).is_err());
    }

    #[test]
    fn flips() {
        let tree = graph(&[(2, 0), (-3, 0)], &[(0, 1, -1)]);
        assert_eq!(tree.vertex_flip(0).unwrap().edges()[0].sign, Sign::Plus);

        let tri = cycle(&[1, 0, 0]);
        let flipped = tri.vertex_flip(1).unwrap();
        let plus = flipped.edges().iter().filter(|e| e.sign == Sign::Plus).count();
        assert_eq!(plus, 2);
        assert_eq!(flipped.cycle_sign_obstruction(), tri.cycle_sign_obstruction());
        assert_eq!(flipped.h1(), tri.h1());

        let lone = G::circle_bundle(3.into(), 0);
        assert_eq!(lone.vertex_flip(0).unwrap(), lone);
        assert_eq!(lone.vertex_flip(1), Err(PlumbingError::NoVertex(1)));
    }

    #[test]
    fn cycle_signs() {
        assert!(graph(&[(1, 0), (2, 0), (3, 0)], &[(0, 1, -1), (1, 2, 1)]).cycle_sign_obstruction().is_empty());
        let tri = cycle(&[1, 0, 0]).cycle_sign_obstruction();
        assert_eq!(tri.values().copied().collect::<Vec<_>>(), vec![Sign::Minus]);
        let sq = cycle(&[0, 1, 0, 0]).cycle_sign_obstruction();
        assert_eq!(sq.values().copied().collect::<Vec<_>>(), vec![Sign::Plus]);
        let cycles = cycle(&[0, 1, 0, 0, 5]).fundamental_cycles();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].edges.len(), 5);
    }

    #[test]
    fn opening_blow_up_on_zero_zero_edge() {
        let tri = cycle(&[1, 0, 0]);
        // edge 1 joins the two 0-vertices
        let up = tri.blow_up_edge(1, Sign::Plus).unwrap();
        let weights: Vec<i64> = up.vertices().iter().map(|v| v.euler.to_string().parse().unwrap()).collect();
        assert_eq!(weights, vec![1, 1, 1, 1]);
        assert!(up.edges().iter().all(|e| e.sign == Sign::Minus));
        assert_eq!(up.vertex_count(), 4);
        assert_eq!(up.h1(), tri.h1());
        assert_eq!(up.h1().to_string(), "Z + Z/3");

        let down = up.blow_down(3).unwrap();
        assert!(down.is_isomorphic(&tri));
        assert!(down.edges().iter().all(|e| e.sign == Sign::Minus));
    }

    #[test]
    fn blow_up_double_edge() {
        let g = G::from_normal_form(&W::from_i64(&[0]));
        let up = g.blow_up_edge(0, Sign::Plus).unwrap();
        assert_eq!(up.vertex_count(), 3);
        assert_eq!(up.edge_count(), 3);
        assert_eq!(up.edges()[0].sign, Sign::Minus);
        assert_eq!(up.h1(), g.h1());
        assert_eq!(up.h1().to_string(), "Z + Z/2 + Z/2");
    }

    #[test]
    fn blow_down_leaf_and_isolated() {
        let g = graph(&[(3, 0), (1, 0)], &[(0, 1, -1)]);
        let d = g.blow_down(1).unwrap();
        assert_eq!(d, G::circle_bundle(2.into(), 0));
        assert_eq!(d.h1(), g.h1());

        let s3 = G::circle_bundle((-1).into(), 0);
        let empty = s3.blow_down(0).unwrap();
        assert_eq!(empty.vertex_count(), 0);
        assert!(empty.h1().is_trivial());
        assert!(s3.h1().is_trivial());
    }

    #[test]
    fn blow_down_preconditions() {
        let g = graph(&[(2, 0), (1, 1), (1, 0), (0, 0), (0, 0), (0, 0)], &[
            (0, 1, -1),
            (0, 2, -1),
            (2, 3, -1),
            (2, 4, -1),
            (2, 5, 1),
        ]);
        assert!(matches!(g.blow_down(0), Err(PlumbingError::NotUnitEuler { .. })));
        assert!(matches!(g.blow_down(1), Err(PlumbingError::PositiveGenus { genus: 1, .. })));
        assert!(matches!(g.blow_down(2), Err(PlumbingError::DegreeTooHigh { degree: 4, .. })));
        assert_eq!(g.blow_down(9), Err(PlumbingError::NoVertex(9)));
        let double = graph(&[(1, 0), (0, 0)], &[(0, 1, -1), (0, 1, -1)]);
        assert_eq!(double.blow_down(0), Err(PlumbingError::WouldCreateLoop(0)));
    }

    #[test]
    fn leaf_blow_up_preserves_h1() {
        let g = cycle(&[2, -1, 0]);
        for eps in [Sign::Plus, Sign::Minus] {
            for s in [Sign::Plus, Sign::Minus] {
                let up = g.blow_up_leaf(1, eps, s).unwrap();
                assert_eq!(up.h1(), g.h1());
                assert!(up.blow_down(3).unwrap().is_isomorphic(&g));
            }
        }
    }

    #[test]
    fn json_and_dot() {
        let g = cycle(&[1, 0, 0]);
        let s = serde_json::to_string(&g.to_json().unwrap()).unwrap();
        assert!(s.starts_with("{\"vertices\":[{\"euler\":1,\"genus\":0}"));
        assert!(s.contains("\"sign\":-1"));
        assert_eq!(G::from_json_str(&s).unwrap(), g);
        assert!(G::from_json_str("{\"vertices\":[],\"edges\":[{\"u\":0,\"v\":1,\"sign\":1}]}").is_err());
        let dot = g.to_dot();
        assert!(dot.contains("v0 [label=\"1,0\"];"));
        assert!(dot.contains("v2 -- v0 [label=\"-\"];"));
    }
}
