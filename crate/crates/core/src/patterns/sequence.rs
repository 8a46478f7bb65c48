use std::collections::BTreeSet;
use std::ops::ControlFlow;

use crate::molgraph::{AtomLabel, BondLabel, MolecularGraph};

use super::linear::LabelString;
use super::PatternError;

/// Linear fragment matched as a simple path (no repeated vertices).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SequencePattern {
    labels: LabelString,
    code: String,
}

impl SequencePattern {
    /// Builds the sequence `atoms[0] bonds[0] atoms[1] ...`, stored in
    /// canonical orientation.
    pub fn new(atoms: Vec<AtomLabel>, bonds: Vec<BondLabel>) -> Result<Self, PatternError> {
        Ok(Self::from_labels(LabelString::new(atoms, bonds)?))
    }

    pub(crate) fn from_labels(labels: LabelString) -> Self {
        let code = labels.format("S:");
        SequencePattern { labels, code }
    }

    pub(crate) fn parse_body(body: &str) -> Result<Self, PatternError> {
        Ok(Self::from_labels(LabelString::parse(body)?))
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn atoms(&self) -> &[AtomLabel] {
        &self.labels.atoms
    }

    pub fn bonds(&self) -> &[BondLabel] {
        &self.labels.bonds
    }

    pub fn num_edges(&self) -> usize {
        self.labels.num_bonds()
    }

    pub fn to_graph(&self) -> MolecularGraph {
        self.labels.to_graph()
    }

    pub fn occurs_in(&self, molecule: &MolecularGraph) -> bool {
        self.for_each_path(molecule, |_| ControlFlow::Break(()))
            .is_break()
    }

    /// Visits every simple path in `molecule` spelling this sequence in its
    /// stored orientation.
    fn for_each_path<F>(&self, molecule: &MolecularGraph, mut visit: F) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        let len = self.labels.atoms.len();
        if len > molecule.num_atoms() {
            return ControlFlow::Continue(());
        }
        let mut path = Vec::with_capacity(len);
        let mut used = vec![false; molecule.num_atoms()];
        for start in 0..molecule.num_atoms() {
            if molecule.atom(start) != self.labels.atoms[0] {
                continue;
            }
            path.push(start);
            used[start] = true;
            let flow = self.walk(molecule, &mut path, &mut used, &mut visit);
            used[start] = false;
            path.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn walk<F>(
        &self,
        molecule: &MolecularGraph,
        path: &mut Vec<usize>,
        used: &mut [bool],
        visit: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        let depth = path.len();
        if depth == self.labels.atoms.len() {
            return visit(path);
        }
        let last = path[depth - 1];
        let bond = self.labels.bonds[depth - 1];
        let atom = self.labels.atoms[depth];
        for &(w, b) in molecule.neighbors(last) {
            if b != bond || used[w] || molecule.atom(w) != atom {
                continue;
            }
            path.push(w);
            used[w] = true;
            let flow = self.walk(molecule, path, used, visit);
            used[w] = false;
            path.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }

    /// One-atom extensions at either end found in `molecule`.
    pub(crate) fn extensions(&self, molecule: &MolecularGraph) -> BTreeSet<(bool, BondLabel, AtomLabel)> {
        let mut out = BTreeSet::new();
        let _ = self.for_each_path(molecule, |path| {
            let ends = [(true, *path.last().unwrap()), (false, path[0])];
            for (at_end, v) in ends {
                for &(w, b) in molecule.neighbors(v) {
                    if !path.contains(&w) {
                        out.insert((at_end, b, molecule.atom(w)));
                    }
                }
            }
            ControlFlow::Continue(())
        });
        out
    }

    pub(crate) fn extend(&self, at_end: bool, bond: BondLabel, atom: AtomLabel) -> SequencePattern {
        Self::from_labels(self.labels.extended(at_end, bond, atom))
    }

    /// The unique parent from which refinement emits this sequence: the
    /// canonical orientation with its last atom removed.
    pub(crate) fn canonical_parent(&self) -> Option<SequencePattern> {
        self.labels.canonical_parent().map(Self::from_labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;

    fn seq(code: &str) -> SequencePattern {
        SequencePattern::parse_body(code).unwrap()
    }

    #[test]
    fn reverse_gives_same_code() {
        let a = SequencePattern::new(
            vec![AtomLabel::new("C").unwrap(), AtomLabel::new("N").unwrap()],
            vec![BondLabel::Single],
        )
        .unwrap();
        let b = SequencePattern::new(
            vec![AtomLabel::new("N").unwrap(), AtomLabel::new("C").unwrap()],
            vec![BondLabel::Single],
        )
        .unwrap();
        assert_eq!(a.code(), b.code());
    }

    #[test]
    fn occurrence_in_benzene() {
        let benzene = parse_smiles("c1ccccc1").unwrap();
        assert!(!seq("C-C-C").occurs_in(&benzene));
        assert!(seq("C:C:C").occurs_in(&benzene));
        assert!(seq("C:C:C:C:C:C").occurs_in(&benzene));
        // Seven atoms would need to revisit a vertex.
        assert!(!seq("C:C:C:C:C:C:C").occurs_in(&benzene));
    }

    #[test]
    fn extensions_at_both_ends() {
        let m = parse_smiles("OCCN").unwrap();
        let ext = seq("C-C").extensions(&m);
        let labels: Vec<_> = ext.iter().map(|(_, _, a)| a.as_str()).collect();
        assert!(labels.contains(&"O") && labels.contains(&"N"));
    }
}
