//! Fold-parallel evaluation. Recordings are turned into items in parallel,
//! folds are trained and scored in parallel, and the coordinator merges
//! the outcomes in fold order.

use dfam_core::eval::{self, EvalReport, Fold, Pipeline};
use dfam_core::{Dataset, Error as CoreError};
use rayon::prelude::*;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    KFold { folds: usize },
    Loso,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Self::KFold { .. } => "kfold",
            Self::Loso => "loso",
        }
    }

    pub fn folds(self, dataset: &Dataset, seed: u64) -> Result<Vec<Fold>> {
        Ok(match self {
            Self::KFold { folds } => eval::kfold_split(dataset.len(), folds, seed)?,
            Self::Loso => eval::loso_split(dataset)?,
        })
    }
}

/// First error in input order, so failures do not depend on scheduling.
fn ordered<T>(results: Vec<dfam_core::Result<T>>) -> dfam_core::Result<Vec<T>> {
    results.into_iter().collect()
}

pub fn evaluate<P>(pipeline: &P, name: &str, protocol: Protocol, dataset: &Dataset, seed: u64) -> Result<EvalReport>
where
    P: Pipeline + Sync,
    P::Item: Send + Sync,
{
    let folds = protocol.folds(dataset, seed)?;
    let items = ordered(
        dataset
            .recordings
            .par_iter()
            .map(|rec| match pipeline.items(rec) {
                Err(CoreError::InsufficientSamples { .. }) => Ok(Vec::new()),
                other => other,
            })
            .collect(),
    )?;
    let outcomes = ordered(
        folds
            .par_iter()
            .map(|fold| eval::evaluate_fold(pipeline, dataset, &items, fold, seed))
            .collect(),
    )?;
    let labels = dataset.labels().into_iter().map(|l| l.name);
    Ok(EvalReport::merge(protocol.name(), name, labels, outcomes))
}
