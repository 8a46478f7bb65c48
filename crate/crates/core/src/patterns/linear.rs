//! Label strings shared by sequences and walks: `atom bond atom bond ... atom`.

use std::cmp::Ordering;

use crate::molgraph::{AtomLabel, BondLabel, MolecularGraph};

use super::PatternError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct LabelString {
    pub(crate) atoms: Vec<AtomLabel>,
    pub(crate) bonds: Vec<BondLabel>,
}

impl LabelString {
    pub(crate) fn new(atoms: Vec<AtomLabel>, bonds: Vec<BondLabel>) -> Result<Self, PatternError> {
        if atoms.len() < 2 {
            return Err(PatternError::TooSmall);
        }
        if bonds.len() + 1 != atoms.len() {
            return Err(PatternError::Shape(format!(
                "{} atoms need {} bonds, got {}",
                atoms.len(),
                atoms.len() - 1,
                bonds.len()
            )));
        }
        Ok(LabelString { atoms, bonds }.canonical())
    }

    /// Compares this string with its own reversal, token by token.
    fn cmp_reversed(&self) -> Ordering {
        let m = self.bonds.len();
        for i in 0..=m {
            let ord = self.atoms[i].cmp(&self.atoms[m - i]);
            if ord != Ordering::Equal {
                return ord;
            }
            if i < m {
                let ord = self.bonds[i].cmp(&self.bonds[m - 1 - i]);
                if ord != Ordering::Equal {
                    return ord;
                }
            }
        }
        Ordering::Equal
    }

    pub(crate) fn canonical(mut self) -> Self {
        if self.cmp_reversed() == Ordering::Greater {
            self.atoms.reverse();
            self.bonds.reverse();
        }
        self
    }

    pub(crate) fn num_bonds(&self) -> usize {
        self.bonds.len()
    }

    pub(crate) fn format(&self, tag: &str) -> String {
        let mut s = String::with_capacity(tag.len() + 3 * self.atoms.len());
        s.push_str(tag);
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                s.push(self.bonds[i - 1].symbol());
            }
            s.push_str(a.as_str());
        }
        s
    }

    /// Parses the body of a code (after the tag).
    pub(crate) fn parse(body: &str) -> Result<Self, PatternError> {
        let mut atoms = Vec::new();
        let mut bonds = Vec::new();
        let mut rest = body;
        loop {
            let end = rest
                .find(|c: char| !c.is_ascii_alphanumeric())
                .unwrap_or(rest.len());
            let label = AtomLabel::new(&rest[..end])
                .map_err(|_| PatternError::Code(format!("bad atom label in {body:?}")))?;
            atoms.push(label);
            rest = &rest[end..];
            let mut chars = rest.chars();
            match chars.next() {
                None => break,
                Some(c) => {
                    let bond = BondLabel::from_symbol(c)
                        .ok_or_else(|| PatternError::Code(format!("bad bond in {body:?}")))?;
                    bonds.push(bond);
                    rest = chars.as_str();
                }
            }
        }
        let parsed = LabelString::new(atoms.clone(), bonds.clone())?;
        if parsed.atoms != atoms || parsed.bonds != bonds {
            return Err(PatternError::Code(format!(
                "{body:?} is not in canonical orientation"
            )));
        }
        Ok(parsed)
    }

    /// Path graph with vertices in string order.
    pub(crate) fn to_graph(&self) -> MolecularGraph {
        let edges = self
            .bonds
            .iter()
            .enumerate()
            .map(|(i, &b)| (i, i + 1, b))
            .collect();
        MolecularGraph::build(String::new(), self.atoms.clone(), edges).expect("path graph")
    }

    pub(crate) fn extended(&self, at_end: bool, bond: BondLabel, atom: AtomLabel) -> LabelString {
        let mut atoms = self.atoms.clone();
        let mut bonds = self.bonds.clone();
        if at_end {
            atoms.push(atom);
            bonds.push(bond);
        } else {
            atoms.insert(0, atom);
            bonds.insert(0, bond);
        }
        LabelString { atoms, bonds }.canonical()
    }

    /// Drops the last atom and bond of the canonical orientation.
    pub(crate) fn canonical_parent(&self) -> Option<LabelString> {
        if self.bonds.len() < 2 {
            return None;
        }
        let mut atoms = self.atoms.clone();
        let mut bonds = self.bonds.clone();
        atoms.pop();
        bonds.pop();
        Some(LabelString { atoms, bonds }.canonical())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ls(atoms: &[&str], bonds: &[BondLabel]) -> LabelString {
        LabelString::new(
            atoms.iter().map(|a| AtomLabel::new(a).unwrap()).collect(),
            bonds.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn orientation_is_canonical() {
        use BondLabel::*;
        let a = ls(&["N", "C"], &[Single]);
        let b = ls(&["C", "N"], &[Single]);
        assert_eq!(a, b);
        assert_eq!(a.format("S:"), "S:C-N");
        let c = ls(&["C", "C", "C"], &[Double, Single]);
        assert_eq!(c.format("S:"), "S:C-C=C");
        let p = ls(&["C", "O", "C"], &[Single, Single]);
        assert_eq!(p.cmp_reversed(), std::cmp::Ordering::Equal);
    }

    #[test]
    fn parse_round_trip() {
        use BondLabel::*;
        let s = ls(&["Cl", "C", "C", "N"], &[Single, Aromatic, Triple]);
        let code = s.format("");
        assert_eq!(LabelString::parse(&code).unwrap(), s);
        assert!(LabelString::parse("N-C").is_err());
        assert!(LabelString::parse("C").is_err());
        assert!(LabelString::parse("C-").is_err());
        assert!(LabelString::parse("C?C").is_err());
    }
}
