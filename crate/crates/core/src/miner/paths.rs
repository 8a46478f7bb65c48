use std::collections::HashMap;

use rayon::prelude::*;

use crate::molgraph::LabeledDataset;
use crate::patterns::{walk_label_strings, Pattern, WalkPattern};

use super::{sort_ranked, ContingencyTable, MinerError, ScoredPattern};

/// Every non-backtracking walk label string of 1..=`max_length` bonds that
/// occurs in at least `min_frequency` molecules, scored and in output order.
///
/// This is the unscored, exhaustive path-fingerprint baseline: no χ²
/// selection, just a frequency cut.
pub fn enumerate_restricted_paths(
    dataset: &LabeledDataset,
    max_length: usize,
    min_frequency: usize,
) -> Result<Vec<ScoredPattern>, MinerError> {
    if max_length == 0 {
        return Err(MinerError::InvalidParameter("max_length must be at least 1".into()));
    }
    if min_frequency == 0 {
        return Err(MinerError::InvalidParameter("min_frequency must be at least 1".into()));
    }
    let per_molecule: Vec<_> = dataset
        .molecules()
        .par_iter()
        .map(|m| walk_label_strings(m, max_length))
        .collect();
    let mut support: HashMap<_, Vec<usize>> = HashMap::new();
    for (i, strings) in per_molecule.into_iter().enumerate() {
        for s in strings {
            support.entry(s).or_default().push(i);
        }
    }
    let mut out: Vec<ScoredPattern> = support
        .into_iter()
        .filter(|(_, occ)| occ.len() >= min_frequency)
        .map(|(labels, occ)| {
            let table = ContingencyTable::from_occurrences(&occ, dataset);
            ScoredPattern::new(Pattern::Walk(WalkPattern::from_labels(labels)), table)
        })
        .collect();
    sort_ranked(&mut out);
    Ok(out)
}
