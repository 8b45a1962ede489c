//! Text-pinned checks for the tabulated torus bundles and open books.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::mcg::{certify_stein, validate_relation, word_from_open_book, MarkedSurface, TwistWord};
use crate::openbook::build_from_plumbing;
use crate::pipeline::{run_pipeline, PipelineOptions};
use crate::plumbing::{PlumbingGraph, Sign, Vertex};
use crate::sl2z::{decompose, recompose, torus_bundle_h1, NormalForm, Sl2Matrix};
use crate::zlinalg::AbelianGroup;

type M = Sl2Matrix<BigInt>;
type G = PlumbingGraph<BigInt>;

/// Monodromy matrices of the tabulated Seifert fibred torus bundles.
pub const TABLE_MATRICES: [(&str, [i64; 4]); 7] = [
    ("M(-2/3,1/3,1/3)", [0, 1, -1, -1]),
    ("M(-1/2,1/4,1/4)", [0, 1, -1, 0]),
    ("M(-1/2,1/3,1/6)", [1, 1, -1, 0]),
    ("M(-1/2,-1/2,1/2,1/2)", [-1, 0, 0, -1]),
    ("M(2/3,-1/3,-1/3)", [-1, -1, 1, 0]),
    ("M(1/2,-1/4,-1/4)", [0, -1, 1, 0]),
    ("M(1/2,-1/3,-1/6)", [0, -1, 1, 1]),
];

pub const PHI: &str = "d1 d2 a1^-3 a2^-3";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureRow {
    pub id: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureReport {
    pub rows: Vec<FixtureRow>,
    pub passed: usize,
    pub failed: usize,
}

impl FixtureReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

fn group(s: &str) -> AbelianGroup<BigInt> {
    s.parse().expect("fixture group parses")
}

pub fn y_k(k: i64) -> G {
    G::from_normal_form(&NormalForm::from_i64(&[0, k, 0]))
}

pub fn ob_k_word(k: i64) -> TwistWord {
    let ob = build_from_plumbing(&G::circle_bundle(k.into(), 1)).expect("single vertex");
    word_from_open_book(&ob).expect("elliptic")
}

pub fn ob_prime_word(k: i64) -> TwistWord {
    word_from_open_book(&build_from_plumbing(&y_k(k)).expect("cycle")).expect("elliptic")
}

/// The triangle `(1, 0, 0)` with a `+1` blow-up on the edge between the two
/// zero-weighted vertices.
pub fn triangle_opening_move() -> (G, G) {
    let before = G::from_normal_form(&NormalForm::from_i64(&[1, 0]));
    let e = before
        .edges()
        .iter()
        .position(|e| before.vertices()[e.u].euler == 0.into() && before.vertices()[e.v].euler == 0.into())
        .expect("0-0 edge");
    let after = before.blow_up_edge(e, Sign::Plus).expect("legal blow-up");
    (before, after)
}

fn row(id: impl Into<String>, pass: bool, detail: impl Into<String>) -> FixtureRow {
    FixtureRow { id: id.into(), pass, detail: detail.into() }
}

pub fn run_fixtures(opts: &PipelineOptions) -> FixtureReport {
    let mut rows = Vec::new();
    let rels = &opts.relations;
    let certify = |w: &TwistWord| certify_stein(w, rels, opts.budget, &opts.hints);

    let m = M::from_i64(0, 1, -1, -1);
    let nf = decompose(&m);
    rows.push(row("normal-form [[0,1],[-1,-1]]", nf.to_string() == "S T^1 S T^0 S" && recompose(&nf) == m, nf.to_string()));
    for k in [-3, 3, 7] {
        let nf = decompose(&M::t_pow(&k.into()));
        rows.push(row(format!("normal-form T^{k}"), nf == NormalForm::from_i64(&[0, k, 0]), nf.to_string()));
    }

    for (name, [a, b, c, d]) in TABLE_MATRICES {
        let m = M::from_i64(a, b, c, d);
        let bundle = torus_bundle_h1(&m);
        let plumbed = G::from_normal_form(&decompose(&m)).h1();
        let pinned = match name {
            "M(-2/3,1/3,1/3)" => Some(group("Z + Z/3")),
            "M(-1/2,-1/2,1/2,1/2)" => Some(group("Z + Z/2 + Z/2")),
            _ => None,
        };
        let pass = bundle == plumbed && pinned.as_ref().is_none_or(|p| p == &bundle);
        rows.push(row(format!("h1 {name}"), pass, format!("{bundle} / {plumbed}")));
    }
    for k in [-4, 3] {
        let h = y_k(k).h1();
        let want = group(&format!("Z^2 + Z/{}", k.abs()));
        rows.push(row(format!("h1 Y_{k}"), h == want, h.to_string()));
    }

    let (before, after) = triangle_opening_move();
    let weights: Vec<String> = after.vertices().iter().map(|v: &Vertex<BigInt>| v.euler.to_string()).collect();
    let all_negative = after.edges().iter().all(|e| e.sign == Sign::Minus);
    rows.push(row(
        "triangle opening blow-up",
        before.h1() == group("Z + Z/3") && after.h1() == before.h1() && all_negative,
        format!("weights ({}) h1 {}", weights.join(","), after.h1()),
    ));

    for k in [-3i64, 2] {
        let s = build_from_plumbing(&G::circle_bundle(k.into(), 1)).expect("vertex").stats();
        let handed = if k < 0 { s.boundary_right } else { s.boundary_left };
        let pass = s.genus == 1 && s.boundary == k.unsigned_abs() as usize && handed == s.boundary;
        rows.push(row(format!("ob_{k}"), pass, format!("{s:?}")));
    }
    let mut bad = Vec::new();
    for k in -5..=8i64 {
        let s = build_from_plumbing(&y_k(k)).expect("cycle").stats();
        let left_ok = k <= 2 || s.boundary_left == (k - 2) as usize;
        if s.genus != 1 || s.boundary != 6 + (k - 2).unsigned_abs() as usize || !left_ok {
            bad.push(k);
        }
    }
    rows.push(row("ob'_k boundary 6+|k-2| for -5<=k<=8", bad.is_empty(), format!("failing k: {bad:?}")));

    let chains_ok = ["chain1", "chain2", "chain3"]
        .iter()
        .all(|n| rels.get(n).is_some_and(validate_relation));
    rows.push(row("chain relations validate", chains_ok, format!("{} relations enabled", rels.len())));

    let phi = TwistWord::parse(MarkedSurface::new(2), PHI).expect("phi parses");
    let c = certify(&phi);
    rows.push(row("M(-2/3,1/3,1/3) phi Stein", c.is_stein(), format!("{:?}", c.verdict)));
    let c = certify(&TwistWord::parse(MarkedSurface::new(2), "d1 d2 a1^-5").expect("parses"));
    rows.push(row("d1 d2 a1^-5 Unknown", c.is_unknown(), format!("{:?}", c.verdict)));
    let c = certify(&ob_k_word(3));
    rows.push(row("ob_3 overtwisted", c.is_overtwisted(), c.label()));
    let c = certify(&ob_prime_word(5));
    rows.push(row("ob'_5 overtwisted", c.is_overtwisted(), c.label()));
    let c = certify(&ob_prime_word(2));
    rows.push(row("ob'_2 Unknown", c.is_unknown(), format!("{:?}", c.verdict)));

    match run_pipeline(&M::identity(), opts) {
        Ok(r) => {
            let gated = rels.enabled().any(|r| r.boundary() == 8 && r.chain_powers().is_some());
            let want = if gated { "stein" } else { "unknown" };
            let s = r.open_book_stats;
            let pass = s.genus == 1 && s.boundary == 8 && r.verdict() == want && !r.oracle_mismatch();
            rows.push(row("T^3 pipeline", pass, format!("boundary {} verdict {}", s.boundary, r.verdict())));
        }
        Err(e) => rows.push(row("T^3 pipeline", false, e.to_string())),
    }

    let passed = rows.iter().filter(|r| r.pass).count();
    let failed = rows.len() - passed;
    FixtureReport { rows, passed, failed }
}
