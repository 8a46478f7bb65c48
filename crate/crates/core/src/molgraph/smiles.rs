//! Minimal SMILES reader.
//!
//! Supported: organic-subset atoms (`B C N O P S F Cl Br I` and aromatic
//! `b c n o p s`), bracket atoms (isotope, hydrogen count, charge and atom
//! class are parsed then discarded), bonds `- = # :`, branches, ring closures
//! with single digits and `%nn`. Explicit hydrogens are removed from the
//! resulting graph. Stereo markers and multi-fragment (`.`) input are
//! rejected.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{AtomLabel, BondLabel, Class, LabeledDataset, MolecularGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SmilesError {
    #[error("empty SMILES string")]
    Empty,
    #[error("stereo marker {ch:?} at position {pos} is not supported")]
    Stereo { ch: char, pos: usize },
    #[error("disconnected SMILES ('.') at position {0} is not supported")]
    Disconnected(usize),
    #[error("unmatched parenthesis at position {0}")]
    UnmatchedParenthesis(usize),
    #[error("unclosed ring index {0}")]
    UnclosedRing(u32),
    #[error("unknown atom symbol {symbol:?} at position {pos}")]
    UnknownAtom { symbol: String, pos: usize },
    #[error("conflicting bond symbols on ring closure {0}")]
    ConflictingRingBond(u32),
    #[error("ring closure {0} bonds an atom to itself or duplicates an existing bond")]
    InvalidRingBond(u32),
    #[error("bond symbol at position {0} is not followed by an atom or ring closure")]
    DanglingBond(usize),
    #[error("unexpected character {ch:?} at position {pos}")]
    Unexpected { ch: char, pos: usize },
    #[error("malformed bracket atom at position {0}")]
    BracketAtom(usize),
}

#[derive(Debug, Error)]
#[error("line {line}: {kind}")]
pub struct SmilesFileError {
    pub line: usize,
    pub kind: SmilesFileErrorKind,
}

#[derive(Debug, Error)]
pub enum SmilesFileErrorKind {
    #[error(transparent)]
    Smiles(#[from] SmilesError),
    #[error("missing or unknown class token {0:?}")]
    Class(String),
}

const ELEMENTS: &[&str] = &[
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl",
    "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As",
    "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In",
    "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb",
    "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl",
    "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm", "Bk",
    "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh",
    "Fl", "Mc", "Lv", "Ts", "Og",
];

const AROMATIC_BRACKET: &[&str] = &["b", "c", "n", "o", "p", "s", "se", "as", "te"];

struct Atom {
    label: AtomLabel,
    aromatic: bool,
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    atoms: Vec<Atom>,
    bonds: Vec<(usize, usize, BondLabel)>,
    rings: BTreeMap<u32, (usize, Option<BondLabel>, usize)>,
}

/// Parses one SMILES string into a hydrogen-suppressed molecular graph.
pub fn parse_smiles(text: &str) -> Result<MolecularGraph, SmilesError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(SmilesError::Empty);
    }
    if let Some((pos, ch)) = text
        .chars()
        .enumerate()
        .find(|(_, c)| matches!(c, '/' | '\\' | '@'))
    {
        return Err(SmilesError::Stereo { ch, pos });
    }
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        atoms: Vec::new(),
        bonds: Vec::new(),
        rings: BTreeMap::new(),
    };
    p.run()?;
    p.into_graph(text)
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn run(&mut self) -> Result<(), SmilesError> {
        let mut prev: Option<usize> = None;
        let mut branches: Vec<(Option<usize>, usize)> = Vec::new();
        let mut pending: Option<(BondLabel, usize)> = None;

        while let Some(ch) = self.peek() {
            let pos = self.pos;
            match ch {
                '(' => {
                    if prev.is_none() || pending.is_some() {
                        return Err(SmilesError::Unexpected { ch, pos });
                    }
                    branches.push((prev, pos));
                    self.pos += 1;
                }
                ')' => {
                    if let Some((_, bpos)) = pending {
                        return Err(SmilesError::DanglingBond(bpos));
                    }
                    let (restored, _) = branches
                        .pop()
                        .ok_or(SmilesError::UnmatchedParenthesis(pos))?;
                    prev = restored;
                    self.pos += 1;
                }
                '-' | '=' | '#' | ':' => {
                    if pending.is_some() || prev.is_none() {
                        return Err(SmilesError::Unexpected { ch, pos });
                    }
                    pending = Some((BondLabel::from_symbol(ch).expect("bond symbol"), pos));
                    self.pos += 1;
                }
                '.' => return Err(SmilesError::Disconnected(pos)),
                '0'..='9' | '%' => {
                    let here = prev.ok_or(SmilesError::Unexpected { ch, pos })?;
                    let ring = self.ring_number()?;
                    self.close_or_open_ring(ring, here, pending.take().map(|(b, _)| b), pos)?;
                }
                '[' => {
                    let atom = self.bracket_atom()?;
                    let idx = self.add_atom(atom, prev, pending.take().map(|(b, _)| b));
                    prev = Some(idx);
                }
                c if c.is_ascii_alphabetic() => {
                    let atom = self.organic_atom()?;
                    let idx = self.add_atom(atom, prev, pending.take().map(|(b, _)| b));
                    prev = Some(idx);
                }
                _ => return Err(SmilesError::Unexpected { ch, pos }),
            }
        }
        if let Some((_, bpos)) = pending {
            return Err(SmilesError::DanglingBond(bpos));
        }
        if let Some(&(_, bpos)) = branches.last() {
            return Err(SmilesError::UnmatchedParenthesis(bpos));
        }
        if let Some((&ring, _)) = self.rings.iter().next() {
            return Err(SmilesError::UnclosedRing(ring));
        }
        Ok(())
    }

    fn ring_number(&mut self) -> Result<u32, SmilesError> {
        let pos = self.pos;
        let ch = self.chars[pos];
        if ch == '%' {
            let d1 = self.chars.get(pos + 1).and_then(|c| c.to_digit(10));
            let d2 = self.chars.get(pos + 2).and_then(|c| c.to_digit(10));
            match (d1, d2) {
                (Some(a), Some(b)) => {
                    self.pos += 3;
                    Ok(a * 10 + b)
                }
                _ => Err(SmilesError::Unexpected { ch, pos }),
            }
        } else {
            self.pos += 1;
            Ok(ch.to_digit(10).expect("digit"))
        }
    }

    fn implicit_bond(&self, a: usize, b: usize) -> BondLabel {
        if self.atoms[a].aromatic && self.atoms[b].aromatic {
            BondLabel::Aromatic
        } else {
            BondLabel::Single
        }
    }

    fn close_or_open_ring(
        &mut self,
        ring: u32,
        here: usize,
        bond: Option<BondLabel>,
        pos: usize,
    ) -> Result<(), SmilesError> {
        match self.rings.remove(&ring) {
            None => {
                self.rings.insert(ring, (here, bond, pos));
            }
            Some((other, other_bond, _)) => {
                let bond = match (bond, other_bond) {
                    (Some(a), Some(b)) if a != b => {
                        return Err(SmilesError::ConflictingRingBond(ring))
                    }
                    (Some(a), _) | (None, Some(a)) => a,
                    (None, None) => self.implicit_bond(other, here),
                };
                let duplicate = self
                    .bonds
                    .iter()
                    .any(|&(u, v, _)| (u == other && v == here) || (u == here && v == other));
                if other == here || duplicate {
                    return Err(SmilesError::InvalidRingBond(ring));
                }
                self.bonds.push((other, here, bond));
            }
        }
        Ok(())
    }

    fn add_atom(&mut self, atom: Atom, prev: Option<usize>, bond: Option<BondLabel>) -> usize {
        let idx = self.atoms.len();
        self.atoms.push(atom);
        if let Some(p) = prev {
            let bond = bond.unwrap_or_else(|| self.implicit_bond(p, idx));
            self.bonds.push((p, idx, bond));
        }
        idx
    }

    fn organic_atom(&mut self) -> Result<Atom, SmilesError> {
        let pos = self.pos;
        let c = self.chars[pos];
        let next = self.chars.get(pos + 1).copied();
        let (symbol, aromatic, len) = match (c, next) {
            ('C', Some('l')) => ("Cl", false, 2),
            ('B', Some('r')) => ("Br", false, 2),
            ('B', _) => ("B", false, 1),
            ('C', _) => ("C", false, 1),
            ('N', _) => ("N", false, 1),
            ('O', _) => ("O", false, 1),
            ('P', _) => ("P", false, 1),
            ('S', _) => ("S", false, 1),
            ('F', _) => ("F", false, 1),
            ('I', _) => ("I", false, 1),
            ('b', _) => ("B", true, 1),
            ('c', _) => ("C", true, 1),
            ('n', _) => ("N", true, 1),
            ('o', _) => ("O", true, 1),
            ('p', _) => ("P", true, 1),
            ('s', _) => ("S", true, 1),
            _ => {
                return Err(SmilesError::UnknownAtom {
                    symbol: c.to_string(),
                    pos,
                })
            }
        };
        self.pos += len;
        Ok(Atom {
            label: AtomLabel::new(symbol).expect("element symbol"),
            aromatic,
        })
    }

    fn bracket_atom(&mut self) -> Result<Atom, SmilesError> {
        let start = self.pos;
        let close = self.chars[start..]
            .iter()
            .position(|&c| c == ']')
            .map(|i| start + i)
            .ok_or(SmilesError::BracketAtom(start))?;
        let body: String = self.chars[start + 1..close].iter().collect();
        self.pos = close + 1;
        let b = body.as_bytes();
        let mut i = 0;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        let (symbol, aromatic) = if i < b.len() && b[i].is_ascii_uppercase() {
            let two = body.get(i..i + 2);
            if two.is_some_and(|t| ELEMENTS.contains(&t)) {
                i += 2;
                (two.unwrap().to_string(), false)
            } else {
                let one = &body[i..i + 1];
                if !ELEMENTS.contains(&one) {
                    return Err(SmilesError::UnknownAtom {
                        symbol: one.to_string(),
                        pos: start + 1 + i,
                    });
                }
                i += 1;
                (one.to_string(), false)
            }
        } else if i < b.len() && b[i].is_ascii_lowercase() {
            let two = body.get(i..i + 2);
            let sym = if two.is_some_and(|t| AROMATIC_BRACKET.contains(&t)) {
                two.unwrap()
            } else {
                &body[i..i + 1]
            };
            if !AROMATIC_BRACKET.contains(&sym) {
                return Err(SmilesError::UnknownAtom {
                    symbol: sym.to_string(),
                    pos: start + 1 + i,
                });
            }
            i += sym.len();
            let mut cap = sym[..1].to_ascii_uppercase();
            cap.push_str(&sym[1..]);
            (cap, true)
        } else {
            return Err(SmilesError::BracketAtom(start));
        };
        // Hydrogen count.
        if i < b.len() && b[i] == b'H' {
            i += 1;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
        }
        // Charge.
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            let sign = b[i];
            i += 1;
            if i < b.len() && b[i].is_ascii_digit() {
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
            } else {
                while i < b.len() && b[i] == sign {
                    i += 1;
                }
            }
        }
        // Atom class.
        if i < b.len() && b[i] == b':' {
            i += 1;
            let digits = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            if digits == i {
                return Err(SmilesError::BracketAtom(start));
            }
        }
        if i != b.len() {
            return Err(SmilesError::BracketAtom(start));
        }
        Ok(Atom {
            label: AtomLabel::new(&symbol).expect("element symbol"),
            aromatic,
        })
    }

    fn into_graph(self, text: &str) -> Result<MolecularGraph, SmilesError> {
        let mut remap = vec![usize::MAX; self.atoms.len()];
        let mut labels = Vec::new();
        for (i, a) in self.atoms.iter().enumerate() {
            if !a.label.is_hydrogen() {
                remap[i] = labels.len();
                labels.push(a.label);
            }
        }
        let edges = self
            .bonds
            .iter()
            .filter(|&&(u, v, _)| remap[u] != usize::MAX && remap[v] != usize::MAX)
            .map(|&(u, v, b)| (remap[u], remap[v], b))
            .collect();
        // Duplicate bonds and self-loops are rejected during parsing.
        Ok(MolecularGraph::new(text, labels, edges).expect("parser produces a simple graph"))
    }
}

/// Reads a SMILES file: one molecule per line, a tab-separated class token
/// (`0`/`1`) after the string. Blank lines and `#` comments are skipped.
/// Molecule ids are the 0-based index among the kept lines.
pub fn parse_smiles_file(text: &str, name: &str) -> Result<LabeledDataset, SmilesFileError> {
    let mut ds = LabeledDataset::empty(name);
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split('\t');
        let smiles = parts.next().unwrap_or("");
        let token = parts.next().map(str::trim).unwrap_or("");
        let err = |kind| SmilesFileError {
            line: lineno + 1,
            kind,
        };
        let class = Class::parse_token(token)
            .ok_or_else(|| err(SmilesFileErrorKind::Class(token.to_string())))?;
        let mut mol = parse_smiles(smiles).map_err(|e| err(e.into()))?;
        mol.set_id(ds.len().to_string());
        ds.push(mol, class);
    }
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(g: &MolecularGraph) -> (usize, usize) {
        (g.num_atoms(), g.num_edges())
    }

    #[test]
    fn ethane() {
        let g = parse_smiles("CC").unwrap();
        assert_eq!(shape(&g), (2, 1));
        assert_eq!(g.edges()[0].bond, BondLabel::Single);
        assert!(g.atoms().iter().all(|a| a.as_str() == "C"));
    }

    #[test]
    fn bonds_and_branches() {
        let g = parse_smiles("CC(=O)OC#N").unwrap();
        assert_eq!(shape(&g), (6, 5));
        assert_eq!(g.bond(1, 2), Some(BondLabel::Double));
        assert_eq!(g.bond(1, 3), Some(BondLabel::Single));
        assert_eq!(g.bond(4, 5), Some(BondLabel::Triple));
    }

    #[test]
    fn aromatic_and_explicit_single() {
        let g = parse_smiles("c1ccccc1-c1ccccc1").unwrap();
        assert_eq!(shape(&g), (12, 13));
        assert_eq!(g.bond(5, 6), Some(BondLabel::Single));
        let aromatic = g
            .edges()
            .iter()
            .filter(|e| e.bond == BondLabel::Aromatic)
            .count();
        assert_eq!(aromatic, 12);
        // Aromatic atom next to an aliphatic one gets a single bond.
        let g = parse_smiles("Cc1ccccc1").unwrap();
        assert_eq!(g.bond(0, 1), Some(BondLabel::Single));
    }

    #[test]
    fn ring_closure_bond_symbols() {
        let g = parse_smiles("C=1CCCCC1").unwrap();
        assert_eq!(g.bond(0, 5), Some(BondLabel::Double));
        let g = parse_smiles("C1CCCCC=1").unwrap();
        assert_eq!(g.bond(0, 5), Some(BondLabel::Double));
        let g = parse_smiles("C=1CCCCC=1").unwrap();
        assert_eq!(g.bond(0, 5), Some(BondLabel::Double));
        assert_eq!(
            parse_smiles("C=1CCCCC#1"),
            Err(SmilesError::ConflictingRingBond(1))
        );
        let g = parse_smiles("C%12CCC%12").unwrap();
        assert_eq!(shape(&g), (4, 4));
    }

    #[test]
    fn bracket_atoms_and_hydrogens() {
        let g = parse_smiles("[13CH3][N+](C)(C)C").unwrap();
        assert_eq!(shape(&g), (5, 4));
        assert_eq!(g.atom(1).as_str(), "N");
        let g = parse_smiles("[H]C([H])([H])O").unwrap();
        assert_eq!(shape(&g), (2, 1));
        let g = parse_smiles("c1cc[nH]c1").unwrap();
        assert_eq!(shape(&g), (5, 5));
        assert!(g.edges().iter().all(|e| e.bond == BondLabel::Aromatic));
        let g = parse_smiles("[Na+].[Cl-]");
        assert_eq!(g, Err(SmilesError::Disconnected(5)));
        let g = parse_smiles("[se]1cccc1").unwrap();
        assert_eq!(g.atom(0).as_str(), "Se");
        let g = parse_smiles("[O-]C(=O)[Fe+2]").unwrap();
        assert_eq!(g.atom(3).as_str(), "Fe");
    }

    #[test]
    fn errors() {
        assert_eq!(parse_smiles(""), Err(SmilesError::Empty));
        assert_eq!(parse_smiles("CC(C"), Err(SmilesError::UnmatchedParenthesis(2)));
        assert_eq!(parse_smiles("CC)C"), Err(SmilesError::UnmatchedParenthesis(2)));
        assert_eq!(parse_smiles("C1CC"), Err(SmilesError::UnclosedRing(1)));
        assert!(matches!(
            parse_smiles("CXC"),
            Err(SmilesError::UnknownAtom { .. })
        ));
        assert!(matches!(
            parse_smiles("C[Xx]"),
            Err(SmilesError::UnknownAtom { .. })
        ));
        assert!(matches!(
            parse_smiles("F/C=C/F"),
            Err(SmilesError::Stereo { ch: '/', .. })
        ));
        assert!(matches!(
            parse_smiles("C[C@H](N)O"),
            Err(SmilesError::Stereo { ch: '@', .. })
        ));
        assert!(matches!(
            parse_smiles("F\\C=C\\F"),
            Err(SmilesError::Stereo { ch: '\\', .. })
        ));
        assert_eq!(parse_smiles("CC="), Err(SmilesError::DanglingBond(2)));
        assert_eq!(parse_smiles("C11"), Err(SmilesError::InvalidRingBond(1)));
        assert_eq!(parse_smiles("C12CC12"), Err(SmilesError::InvalidRingBond(2)));
    }

    #[test]
    fn smiles_file() {
        let ds = parse_smiles_file("CCO\t1\n# comment\n\nc1ccccc1\t0\n", "toy").unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.labels(), &[Class::Active, Class::Inactive]);
        let err = parse_smiles_file("CCO\n", "toy").unwrap_err();
        assert_eq!(err.line, 1);
    }
}
