use std::collections::HashSet;

use crate::molgraph::{AtomLabel, BondLabel, MolecularGraph};

use super::linear::LabelString;
use super::PatternError;

/// Label string of a walk that never steps straight back along the edge it
/// just used. Unlike a sequence, a walk may revisit vertices around rings.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WalkPattern {
    labels: LabelString,
    code: String,
}

impl WalkPattern {
    pub fn new(atoms: Vec<AtomLabel>, bonds: Vec<BondLabel>) -> Result<Self, PatternError> {
        Ok(Self::from_labels(LabelString::new(atoms, bonds)?))
    }

    pub(crate) fn from_labels(labels: LabelString) -> Self {
        let code = labels.format("W:");
        WalkPattern { labels, code }
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

    /// Length in bonds.
    pub fn num_edges(&self) -> usize {
        self.labels.num_bonds()
    }

    pub fn occurs_in(&self, molecule: &MolecularGraph) -> bool {
        let atoms = &self.labels.atoms;
        let bonds = &self.labels.bonds;
        // Frontier of (previous vertex, current vertex) states.
        let mut frontier: HashSet<(usize, usize)> = HashSet::new();
        for v in 0..molecule.num_atoms() {
            if molecule.atom(v) == atoms[0] {
                frontier.insert((usize::MAX, v));
            }
        }
        for (step, &bond) in bonds.iter().enumerate() {
            let mut next = HashSet::new();
            for &(prev, v) in &frontier {
                for &(w, b) in molecule.neighbors(v) {
                    if w != prev && b == bond && molecule.atom(w) == atoms[step + 1] {
                        next.insert((v, w));
                    }
                }
            }
            if next.is_empty() {
                return false;
            }
            frontier = next;
        }
        !frontier.is_empty()
    }
}

/// All distinct walk label strings of 1..=`max_len` bonds in `molecule`,
/// in canonical orientation.
pub(crate) fn walk_label_strings(molecule: &MolecularGraph, max_len: usize) -> HashSet<LabelString> {
    let mut out = HashSet::new();
    let mut atoms = Vec::with_capacity(max_len + 1);
    let mut bonds = Vec::with_capacity(max_len);
    for start in 0..molecule.num_atoms() {
        atoms.push(molecule.atom(start));
        extend_walk(molecule, usize::MAX, start, max_len, &mut atoms, &mut bonds, &mut out);
        atoms.pop();
    }
    out
}

fn extend_walk(
    molecule: &MolecularGraph,
    prev: usize,
    v: usize,
    max_len: usize,
    atoms: &mut Vec<AtomLabel>,
    bonds: &mut Vec<BondLabel>,
    out: &mut HashSet<LabelString>,
) {
    if bonds.len() == max_len {
        return;
    }
    for &(w, b) in molecule.neighbors(v) {
        if w == prev {
            continue;
        }
        atoms.push(molecule.atom(w));
        bonds.push(b);
        out.insert(
            LabelString {
                atoms: atoms.clone(),
                bonds: bonds.clone(),
            }
            .canonical(),
        );
        extend_walk(molecule, v, w, max_len, atoms, bonds, out);
        atoms.pop();
        bonds.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;

    #[test]
    fn walks_wrap_around_rings() {
        let benzene = parse_smiles("c1ccccc1").unwrap();
        let w = WalkPattern::parse_body("C:C:C:C:C:C:C:C").unwrap();
        assert!(w.occurs_in(&benzene));
        let strings = walk_label_strings(&benzene, 3);
        assert_eq!(strings.len(), 3);
    }

    #[test]
    fn no_immediate_backtracking() {
        let ethane = parse_smiles("CC").unwrap();
        let w = WalkPattern::parse_body("C-C-C").unwrap();
        assert!(!w.occurs_in(&ethane));
        assert_eq!(walk_label_strings(&ethane, 10).len(), 1);
    }
}
