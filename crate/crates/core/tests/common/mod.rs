#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use plumbook_core::mcg::{
    legal_moves, Curve, MarkedSurface, Move, Relation, RelationTable, Source, Twist, TwistWord,
};
use plumbook_core::plumbing::{Edge, Sign, Vertex};
use plumbook_core::{Plumbing, Word};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Normal form with `k <= 6` exponents of size at most 8.
pub fn random_word(rng: &mut ChaCha8Rng) -> Word {
    let k = rng.gen_range(1..=6);
    let exps: Vec<i64> = (0..k).map(|_| rng.gen_range(-8..=8)).collect();
    Word::from_i64(&exps)
}

/// Plain Laplace expansion.
pub fn det(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| *x).collect()).collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Nonzero invariant factors from determinantal divisors: `d_k` is the gcd
/// of all `k x k` minors and the factors are `d_k / d_(k-1)`.
pub fn invariant_factors_by_minors(m: &[Vec<i128>]) -> Vec<i128> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut prev = 1i128;
    let mut out = Vec::new();
    for k in 1..=rows.min(cols) {
        let mut g = 0i128;
        for r in combinations(rows, k) {
            for c in combinations(cols, k) {
                let sub: Vec<Vec<i128>> = r.iter().map(|&i| c.iter().map(|&j| m[i][j]).collect()).collect();
                g = g.gcd(&det(&sub));
            }
        }
        if g == 0 {
            break;
        }
        out.push(g / prev);
        prev = g;
    }
    out
}

/// `Z + coker(A - I)` for a 2x2 matrix, straight from the entries.
pub fn bundle_h1_oracle(a: i64, b: i64, c: i64, d: i64) -> String {
    let n = [a - 1, b, c, d - 1];
    let g = n.iter().fold(0i64, |acc, x| acc.gcd(x));
    let det = (n[0] * n[3] - n[1] * n[2]).abs();
    let (free, orders) = if g == 0 {
        (3, vec![])
    } else if det == 0 {
        (2, vec![g])
    } else {
        (1, vec![g, det / g])
    };
    let orders: Vec<i64> = orders.into_iter().filter(|&o| o != 1).collect();
    let mut parts = Vec::new();
    match free {
        0 => {}
        1 => parts.push("Z".to_string()),
        f => parts.push(format!("Z^{f}")),
    }
    parts.extend(orders.iter().map(|o| format!("Z/{o}")));
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

fn random_sign(rng: &mut ChaCha8Rng) -> Sign {
    if rng.gen_bool(0.5) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// Connected multigraph on up to `max_v` vertices: a random tree plus a few
/// extra edges.
pub fn random_graph(rng: &mut ChaCha8Rng, max_v: usize) -> Plumbing {
    let n = rng.gen_range(1..=max_v);
    let vertices: Vec<Vertex<BigInt>> = (0..n)
        .map(|_| Vertex { euler: rng.gen_range(-4i64..=4).into(), genus: u32::from(rng.gen_bool(0.2)) })
        .collect();
    let mut edges: Vec<Edge> = (1..n).map(|v| Edge { u: rng.gen_range(0..v), v, sign: random_sign(rng) }).collect();
    if n >= 2 {
        for _ in 0..rng.gen_range(0..=2) {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            edges.push(Edge { u, v, sign: random_sign(rng) });
        }
    }
    Plumbing::new(vertices, edges).expect("random graph is valid")
}

/// One random blow-up, blow-down or vertex flip; `None` if the chosen move
/// does not apply.
pub fn random_calculus_move(rng: &mut ChaCha8Rng, g: &Plumbing) -> Option<(String, Plumbing)> {
    let eps = random_sign(rng);
    match rng.gen_range(0..4) {
        0 if g.edge_count() > 0 => {
            let e = rng.gen_range(0..g.edge_count());
            g.blow_up_edge(e, eps).ok().map(|h| (format!("blow_up_edge({e},{eps})"), h))
        }
        1 if g.vertex_count() > 0 => {
            let v = rng.gen_range(0..g.vertex_count());
            let s = random_sign(rng);
            g.blow_up_leaf(v, eps, s).ok().map(|h| (format!("blow_up_leaf({v},{eps},{s})"), h))
        }
        2 => {
            let candidates: Vec<usize> = (0..g.vertex_count())
                .filter(|&v| {
                    let x = &g.vertices()[v];
                    x.genus == 0 && (x.euler == 1.into() || x.euler == (-1).into()) && g.degree(v) <= 2
                })
                .collect();
            let v = *candidates.choose(rng)?;
            g.blow_down(v).ok().map(|h| (format!("blow_down({v})"), h))
        }
        3 if g.vertex_count() > 0 => {
            let v = rng.gen_range(0..g.vertex_count());
            g.vertex_flip(v).ok().map(|h| (format!("vertex_flip({v})"), h))
        }
        _ => None,
    }
}

type M2 = [BigInt; 4];

fn mul2(x: &M2, y: &M2) -> M2 {
    [
        &x[0] * &y[0] + &x[1] * &y[2],
        &x[0] * &y[1] + &x[1] * &y[3],
        &x[2] * &y[0] + &x[3] * &y[2],
        &x[2] * &y[1] + &x[3] * &y[3],
    ]
}

fn inv2(x: &M2) -> M2 {
    [x[3].clone(), -x[1].clone(), -x[2].clone(), x[0].clone()]
}

fn pow2(x: &M2, e: i64) -> M2 {
    let base = if e < 0 { inv2(x) } else { x.clone() };
    let mut acc = id2();
    for _ in 0..e.unsigned_abs() {
        acc = mul2(&acc, &base);
    }
    acc
}

fn id2() -> M2 {
    [1.into(), 0.into(), 0.into(), 1.into()]
}

fn curve2(c: &Curve) -> M2 {
    match c {
        Curve::Alpha(_) => [1.into(), 0.into(), (-1).into(), 1.into()],
        Curve::Beta => [1.into(), 1.into(), 0.into(), 1.into()],
        Curve::Delta(_) => id2(),
        Curve::Image { by, of } => {
            let h = pow2(&curve2(&by.curve), by.exp);
            mul2(&mul2(&h, &curve2(of)), &inv2(&h))
        }
    }
}

/// Action on the capped homology, computed with bare 2x2 arithmetic.
pub fn shadow_oracle(terms: &[Twist]) -> M2 {
    terms.iter().fold(id2(), |acc, t| mul2(&acc, &pow2(&curve2(&t.curve), t.exp)))
}

pub fn random_twist_word(rng: &mut ChaCha8Rng, n: usize) -> TwistWord {
    let s = MarkedSurface::new(n);
    let len = rng.gen_range(1..=8);
    let terms = (0..len)
        .map(|_| {
            let curve = match rng.gen_range(0..3) {
                0 => Curve::Alpha(rng.gen_range(1..=n)),
                1 => Curve::Beta,
                _ => Curve::Delta(rng.gen_range(1..=n)),
            };
            let mut exp = rng.gen_range(1..=2);
            if rng.gen_bool(0.5) {
                exp = -exp;
            }
            Twist::new(curve, exp)
        })
        .collect();
    TwistWord::new(s, terms).expect("valid word")
}

/// A random legal move, or a random split, kept short and shallow.
pub fn random_mcg_move(rng: &mut ChaCha8Rng, w: &TwistWord, rels: &RelationTable) -> Option<Move> {
    let mut moves = legal_moves(w, rels);
    for (i, t) in w.terms().iter().enumerate() {
        if t.exp.abs() > 1 {
            moves.push(Move::Split { index: i, first: t.exp.signum() });
        }
    }
    moves.retain(|m| match m {
        Move::Hurwitz { index, .. } => w.terms()[*index..=index + 1].iter().all(|t| t.curve.nesting() < 2),
        Move::Substitute { .. } => w.len() < 24,
        _ => true,
    });
    moves.choose(rng).cloned()
}

/// The built-in chain relations with the power moved by one, plus versions
/// dropping one `α`.
pub fn perturbed_relations() -> Vec<Relation> {
    [
        ("(a1 b)^5", "d1"),
        ("(a1 b)^7", "d1"),
        ("(a1 a2 b)^3", "d1 d2"),
        ("(a1 a2 b)^5", "d1 d2"),
        ("(a1 a2 a3 b)^2", "d1 d2 d3"),
        ("(a1 a2 a3 b)^4", "d1 d2 d3"),
        ("(b)^6", "d1"),
        ("(a1 b)^4", "d1 d2"),
        ("(a1 a2 b)^3", "d1 d2 d3"),
    ]
    .into_iter()
    .enumerate()
    .map(|(i, (l, r))| Relation::new(&format!("perturbed{i}"), l, r, Source::Loaded).unwrap())
    .collect()
}

/// `δ1⋯δn α1^-m⋯αn^-m`
pub fn chain_test_word(n: usize, m: i64) -> TwistWord {
    let mut terms: Vec<Twist> = (1..=n).map(|i| Twist::new(Curve::Delta(i), 1)).collect();
    terms.extend((1..=n).map(|j| Twist::new(Curve::Alpha(j), -m)));
    TwistWord::new(MarkedSurface::new(n), terms).unwrap()
}

pub const CHAIN_POWERS: [(usize, i64); 3] = [(1, 6), (2, 4), (3, 3)];
