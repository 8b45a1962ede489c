//! Matrix to certificate in one pass.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mcg::{certify_stein, word_from_open_book, Budget, Certificate, Hints, RelationTable};
use crate::openbook::{build_from_plumbing, OpenBookError, OpenBookJson, OpenBookStats};
use crate::plumbing::{GraphJson, PlumbingError, PlumbingGraph};
use crate::scalar::Scalar;
use crate::sl2z::{decompose, recompose, shortest_normal_form, torus_bundle_h1, NormalForm, Sl2Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Plumbing(#[from] PlumbingError),
    #[error(transparent)]
    OpenBook(#[from] OpenBookError),
    #[error("no normal form within the search bounds")]
    NoShortForm,
}

#[derive(Debug, Clone, Default)]
pub struct PipelineOptions {
    pub relations: RelationTable,
    pub budget: Budget,
    pub hints: Hints,
    /// Bounds `(max_len, max_abs)` for an exhaustive shortest normal form
    /// instead of the greedy decomposition.
    pub shortest: Option<(usize, i64)>,
}

impl PipelineOptions {
    pub fn new() -> Self {
        Self { relations: RelationTable::builtin(), ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub input: String,
    pub normal_form: String,
    pub recomposes: bool,
    pub graph: GraphJson,
    pub h1_bundle: String,
    pub h1_plumbing: String,
    pub h1_agree: bool,
    pub open_book: OpenBookJson,
    pub open_book_stats: OpenBookStats,
    pub monodromy: String,
    pub certificate: Option<Certificate>,
    /// Why the open book could not be read as a marked-surface word.
    pub certificate_skipped: Option<String>,
}

impl PipelineReport {
    /// The hard failure flag: the two homology computations disagree or the
    /// normal form does not multiply back to the input.
    pub fn oracle_mismatch(&self) -> bool {
        !self.h1_agree || !self.recomposes
    }

    pub fn verdict(&self) -> &str {
        self.certificate.as_ref().map_or("skipped", |c| c.label())
    }
}

pub fn normal_form_for<Z: Scalar>(a: &Sl2Matrix<Z>, opts: &PipelineOptions) -> Result<NormalForm<Z>, PipelineError> {
    match opts.shortest {
        Some((len, abs)) => shortest_normal_form(a, len, abs).ok_or(PipelineError::NoShortForm),
        None => Ok(decompose(a)),
    }
}

pub fn run_pipeline<Z: Scalar>(a: &Sl2Matrix<Z>, opts: &PipelineOptions) -> Result<PipelineReport, PipelineError> {
    let word = normal_form_for(a, opts)?;
    let graph = PlumbingGraph::from_normal_form(&word);
    let h1_bundle = torus_bundle_h1(a);
    let h1_plumbing = graph.h1();
    let ob = build_from_plumbing(&graph)?;
    let (certificate, certificate_skipped) = match word_from_open_book(&ob) {
        Ok(w) => (Some(certify_stein(&w, &opts.relations, opts.budget, &opts.hints)), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(PipelineReport {
        input: a.to_csv(),
        normal_form: word.to_string(),
        recomposes: &recompose(&word) == a,
        graph: graph.to_json()?,
        h1_agree: h1_bundle == h1_plumbing,
        h1_bundle: h1_bundle.to_string(),
        h1_plumbing: h1_plumbing.to_string(),
        open_book: ob.to_json(),
        open_book_stats: ob.stats(),
        monodromy: ob.render(),
        certificate,
        certificate_skipped,
    })
}
