//! One-edge refinement with canonical-parent filtering.
//!
//! Every pattern of two or more edges has exactly one designated parent:
//!
//! * sequence: its canonical orientation without the last atom;
//! * tree: the tree without the last leaf of its canonical preorder;
//! * graph: its minimum DFS code without the last edge (gSpan).
//!
//! A candidate extension is emitted only when the pattern being refined is
//! that parent, so the closure of [`refine`] from [`single_edge_patterns`]
//! reaches every occurring pattern exactly once. Candidates are generated
//! from embeddings in the molecules that contain the parent; embeddings are
//! recomputed on demand rather than stored.

use std::collections::{BTreeMap, BTreeSet};

use crate::molgraph::{AtomLabel, BondLabel, LabeledDataset};

use super::dfs::{self, DfsCode};
use super::linear::LabelString;
use super::{GraphPattern, Pattern, PatternLanguage, SequencePattern, TreePattern};

/// A child pattern together with the molecules (dataset indices, ascending)
/// that contain it.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub pattern: Pattern,
    pub occurrences: Vec<usize>,
}

/// Molecules containing `pattern`, ascending.
pub fn occurrences(pattern: &Pattern, dataset: &LabeledDataset) -> Vec<usize> {
    dataset
        .molecules()
        .iter()
        .enumerate()
        .filter(|(_, m)| pattern.occurs(m))
        .map(|(i, _)| i)
        .collect()
}

/// All single-edge patterns of `language` occurring in `dataset`, sorted by code.
pub fn single_edge_patterns(language: PatternLanguage, dataset: &LabeledDataset) -> Vec<Refinement> {
    let mut seen: BTreeMap<(AtomLabel, BondLabel, AtomLabel), BTreeSet<usize>> = BTreeMap::new();
    for (i, mol) in dataset.molecules().iter().enumerate() {
        for e in mol.edges() {
            let (a, b) = (mol.atom(e.u), mol.atom(e.v));
            let key = if a <= b { (a, e.bond, b) } else { (b, e.bond, a) };
            seen.entry(key).or_default().insert(i);
        }
    }
    let mut out: Vec<Refinement> = seen
        .into_iter()
        .map(|((a, bond, b), occ)| {
            let pattern = match language {
                PatternLanguage::Sequence => Pattern::Sequence(SequencePattern::from_labels(
                    LabelString::new(vec![a, b], vec![bond]).expect("one edge"),
                )),
                PatternLanguage::Tree => Pattern::Tree(
                    SequencePattern::from_labels(
                        LabelString::new(vec![a, b], vec![bond]).expect("one edge"),
                    )
                    .to_tree(),
                ),
                PatternLanguage::Graph => Pattern::Graph(GraphPattern::from_min_code(DfsCode(vec![
                    dfs::DfsEdge {
                        from: 0,
                        to: 1,
                        from_label: a,
                        bond,
                        to_label: b,
                    },
                ]))),
            };
            Refinement {
                pattern,
                occurrences: occ.into_iter().collect(),
            }
        })
        .collect();
    out.sort_by(|x, y| x.pattern.code().cmp(y.pattern.code()));
    out
}

/// Children of `pattern` over the whole dataset.
pub fn refine(pattern: &Pattern, dataset: &LabeledDataset) -> Vec<Refinement> {
    let occ = occurrences(pattern, dataset);
    refine_within(pattern, &occ, dataset)
}

/// Children of `pattern`, scanning only the molecules in `occurrences`
/// (which must contain every molecule where `pattern` occurs). Children are
/// sorted by code. Walk patterns have no refinement.
pub fn refine_within(pattern: &Pattern, occurrences: &[usize], dataset: &LabeledDataset) -> Vec<Refinement> {
    match pattern {
        Pattern::Sequence(p) => refine_sequence(p, occurrences, dataset),
        Pattern::Tree(p) => refine_tree(p, occurrences, dataset),
        Pattern::Graph(p) => refine_graph(p, occurrences, dataset),
        Pattern::Walk(_) => Vec::new(),
    }
}

fn collect<K: Ord>(
    occurrences: &[usize],
    mut extensions: impl FnMut(usize) -> BTreeSet<K>,
) -> BTreeMap<K, Vec<usize>> {
    let mut candidates: BTreeMap<K, Vec<usize>> = BTreeMap::new();
    for &m in occurrences {
        for ext in extensions(m) {
            candidates.entry(ext).or_default().push(m);
        }
    }
    candidates
}

fn finish(children: BTreeMap<String, (Pattern, BTreeSet<usize>)>) -> Vec<Refinement> {
    children
        .into_values()
        .map(|(pattern, occ)| Refinement {
            pattern,
            occurrences: occ.into_iter().collect(),
        })
        .collect()
}

fn refine_sequence(p: &SequencePattern, occurrences: &[usize], ds: &LabeledDataset) -> Vec<Refinement> {
    let candidates = collect(occurrences, |m| p.extensions(ds.molecule(m)));
    let mut children: BTreeMap<String, (Pattern, BTreeSet<usize>)> = BTreeMap::new();
    for ((at_end, bond, atom), mols) in candidates {
        let child = p.extend(at_end, bond, atom);
        if let Some(entry) = children.get_mut(child.code()) {
            entry.1.extend(mols);
            continue;
        }
        let is_parent = child
            .canonical_parent()
            .is_some_and(|parent| parent.code() == p.code());
        if is_parent {
            children.insert(
                child.code().to_string(),
                (Pattern::Sequence(child), mols.into_iter().collect()),
            );
        }
    }
    finish(children)
}

fn refine_tree(p: &TreePattern, occurrences: &[usize], ds: &LabeledDataset) -> Vec<Refinement> {
    let candidates = collect(occurrences, |m| p.extensions(ds.molecule(m)));
    let mut children: BTreeMap<String, (Pattern, BTreeSet<usize>)> = BTreeMap::new();
    let mut rejected: BTreeSet<String> = BTreeSet::new();
    for ((at, bond, atom), mols) in candidates {
        let child = p.extend(at, bond, atom);
        if let Some(entry) = children.get_mut(child.code()) {
            entry.1.extend(mols);
            continue;
        }
        if rejected.contains(child.code()) {
            continue;
        }
        let is_parent = child
            .canonical_parent()
            .is_some_and(|parent| parent.code() == p.code());
        if is_parent {
            children.insert(
                child.code().to_string(),
                (Pattern::Tree(child), mols.into_iter().collect()),
            );
        } else {
            rejected.insert(child.code().to_string());
        }
    }
    finish(children)
}

fn refine_graph(p: &GraphPattern, occurrences: &[usize], ds: &LabeledDataset) -> Vec<Refinement> {
    let candidates = collect(occurrences, |m| {
        dfs::rightmost_extensions(p.dfs_code(), p.graph(), &p.plan, ds.molecule(m))
    });
    let mut children: BTreeMap<String, (Pattern, BTreeSet<usize>)> = BTreeMap::new();
    for (edge, mols) in candidates {
        let mut code = p.dfs_code().clone();
        code.0.push(edge);
        if dfs::is_min(&code) {
            let child = GraphPattern::from_min_code(code);
            children.insert(
                child.code().to_string(),
                (Pattern::Graph(child), mols.into_iter().collect()),
            );
        }
    }
    finish(children)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::{parse_smiles, Class};

    fn dataset(smiles: &[&str]) -> LabeledDataset {
        let mut ds = LabeledDataset::empty("t");
        for (i, s) in smiles.iter().enumerate() {
            let class = if i % 2 == 0 { Class::Active } else { Class::Inactive };
            ds.push(parse_smiles(s).unwrap(), class);
        }
        ds
    }

    fn closure(language: PatternLanguage, ds: &LabeledDataset) -> Vec<String> {
        let mut stack = single_edge_patterns(language, ds);
        let mut out = Vec::new();
        while let Some(r) = stack.pop() {
            out.push(r.pattern.code().to_string());
            stack.extend(refine_within(&r.pattern, &r.occurrences, ds));
        }
        out.sort();
        out
    }

    #[test]
    fn propane_has_one_child() {
        let ds = dataset(&["CCC"]);
        for lang in PatternLanguage::ALL {
            let roots = single_edge_patterns(lang, &ds);
            assert_eq!(roots.len(), 1);
            let kids = refine(&roots[0].pattern, &ds);
            assert_eq!(kids.len(), 1, "{lang}");
            assert_eq!(kids[0].pattern.num_edges(), 2);
            assert_eq!(kids[0].occurrences, vec![0]);
        }
    }

    #[test]
    fn benzene_closure_sizes() {
        let ds = dataset(&["c1ccccc1"]);
        // Paths of 1..=5 aromatic bonds.
        assert_eq!(closure(PatternLanguage::Sequence, &ds).len(), 5);
        assert_eq!(closure(PatternLanguage::Tree, &ds).len(), 5);
        // The same paths plus the ring itself.
        assert_eq!(closure(PatternLanguage::Graph, &ds).len(), 6);
    }

    #[test]
    fn no_duplicate_codes() {
        let ds = dataset(&["CC(C)(C)C", "c1ccccc1CN", "OC1CCC(=O)CC1", "C1CC2CCC1C2"]);
        for lang in PatternLanguage::ALL {
            let codes = closure(lang, &ds);
            let unique: BTreeSet<_> = codes.iter().collect();
            assert_eq!(unique.len(), codes.len(), "{lang}");
        }
    }
}
