//! Molecular graph model and dataset container.
//!
//! Molecules are hydrogen-suppressed, undirected, simple graphs. Vertices carry
//! an element symbol, edges one of four bond labels. [`parse_smiles`] and
//! [`parse_transactions`] are the two ingestion routes.

mod smiles;
mod transactions;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use smiles::{parse_smiles, parse_smiles_file, SmilesError};
pub use transactions::{parse_transactions, write_transactions, TransactionError};

/// Longest atom label accepted, in bytes.
pub const MAX_LABEL_LEN: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("atom label {0:?} must be 1..={MAX_LABEL_LEN} ASCII alphanumeric characters")]
    InvalidLabel(String),
    #[error("edge ({0}, {1}) references unknown vertex")]
    UnknownVertex(usize, usize),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("parallel edge between {0} and {1}")]
    ParallelEdge(usize, usize),
    #[error("hydrogen vertex {0} is not allowed")]
    Hydrogen(usize),
    #[error("{molecules} molecules but {labels} labels")]
    LengthMismatch { molecules: usize, labels: usize },
}

/// Atom label stored inline. Ordering equals byte-wise string ordering.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomLabel([u8; MAX_LABEL_LEN]);

impl AtomLabel {
    pub fn new(s: &str) -> Result<Self, GraphError> {
        let bytes = s.as_bytes();
        if bytes.is_empty()
            || bytes.len() > MAX_LABEL_LEN
            || !bytes.iter().all(|b| b.is_ascii_alphanumeric())
        {
            return Err(GraphError::InvalidLabel(s.to_string()));
        }
        let mut buf = [0u8; MAX_LABEL_LEN];
        buf[..bytes.len()].copy_from_slice(bytes);
        Ok(AtomLabel(buf))
    }

    pub fn as_str(&self) -> &str {
        let len = self.0.iter().position(|&b| b == 0).unwrap_or(MAX_LABEL_LEN);
        // Constructed only from ASCII.
        std::str::from_utf8(&self.0[..len]).expect("ascii label")
    }

    pub fn is_hydrogen(&self) -> bool {
        self.as_str() == "H"
    }
}

impl fmt::Debug for AtomLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

impl fmt::Display for AtomLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AtomLabel {
    type Err = GraphError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AtomLabel::new(s)
    }
}

/// Bond label. The declaration order is the order used by every canonical code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BondLabel {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondLabel {
    pub const ALL: [BondLabel; 4] = [
        BondLabel::Single,
        BondLabel::Double,
        BondLabel::Triple,
        BondLabel::Aromatic,
    ];

    /// Symbol used in canonical codes (`-`, `=`, `#`, `:`).
    pub fn symbol(self) -> char {
        match self {
            BondLabel::Single => '-',
            BondLabel::Double => '=',
            BondLabel::Triple => '#',
            BondLabel::Aromatic => ':',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            '-' => Some(BondLabel::Single),
            '=' => Some(BondLabel::Double),
            '#' => Some(BondLabel::Triple),
            ':' => Some(BondLabel::Aromatic),
            _ => None,
        }
    }

    /// Integer used by the transaction format (1..=4).
    pub fn code(self) -> u8 {
        match self {
            BondLabel::Single => 1,
            BondLabel::Double => 2,
            BondLabel::Triple => 3,
            BondLabel::Aromatic => 4,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            1 => Some(BondLabel::Single),
            2 => Some(BondLabel::Double),
            3 => Some(BondLabel::Triple),
            4 => Some(BondLabel::Aromatic),
            _ => None,
        }
    }
}

impl fmt::Display for BondLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub bond: BondLabel,
}

/// Vertex- and edge-labeled undirected simple graph.
///
/// Used both for molecules and for pattern structures; the molecule
/// constructors additionally reject hydrogen vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MolecularGraph {
    id: String,
    atoms: Vec<AtomLabel>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, BondLabel)>>,
}

impl MolecularGraph {
    pub fn new(
        id: impl Into<String>,
        atoms: Vec<AtomLabel>,
        edges: Vec<(usize, usize, BondLabel)>,
    ) -> Result<Self, GraphError> {
        if let Some(i) = atoms.iter().position(AtomLabel::is_hydrogen) {
            return Err(GraphError::Hydrogen(i));
        }
        Self::build(id.into(), atoms, edges)
    }

    /// Like [`MolecularGraph::new`] but permits any label, including `H`.
    /// Pattern structures are built through this.
    pub(crate) fn build(
        id: String,
        atoms: Vec<AtomLabel>,
        edges: Vec<(usize, usize, BondLabel)>,
    ) -> Result<Self, GraphError> {
        let n = atoms.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut out = Vec::with_capacity(edges.len());
        for (u, v, bond) in edges {
            if u >= n || v >= n {
                return Err(GraphError::UnknownVertex(u, v));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if adjacency[u].iter().any(|&(w, _)| w == v) {
                return Err(GraphError::ParallelEdge(u, v));
            }
            adjacency[u].push((v, bond));
            adjacency[v].push((u, bond));
            out.push(Edge { u, v, bond });
        }
        Ok(MolecularGraph {
            id,
            atoms,
            edges: out,
            adjacency,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn set_id(&mut self, id: impl Into<String>) {
        self.id = id.into();
    }

    pub fn atoms(&self) -> &[AtomLabel] {
        &self.atoms
    }

    pub fn atom(&self, v: usize) -> AtomLabel {
        self.atoms[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, BondLabel)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn bond(&self, u: usize, v: usize) -> Option<BondLabel> {
        self.adjacency[u]
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, b)| b)
    }

    pub fn is_connected(&self) -> bool {
        if self.atoms.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.atoms.len()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(w, _) in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.atoms.len()
    }

    /// Connected and acyclic (a single vertex counts as a tree).
    pub fn is_tree(&self) -> bool {
        !self.atoms.is_empty() && self.edges.len() + 1 == self.atoms.len() && self.is_connected()
    }

    /// A tree in which no vertex has degree above two.
    pub fn is_path(&self) -> bool {
        self.is_tree() && self.adjacency.iter().all(|a| a.len() <= 2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    Active,
    Inactive,
}

impl Class {
    pub fn is_active(self) -> bool {
        self == Class::Active
    }

    /// `+1` for actives, `-1` for inactives.
    pub fn sign(self) -> f64 {
        match self {
            Class::Active => 1.0,
            Class::Inactive => -1.0,
        }
    }

    /// Class token as written by the transaction format.
    pub fn token(self) -> &'static str {
        match self {
            Class::Active => "1",
            Class::Inactive => "0",
        }
    }

    /// Accepts `1`/`active` and `0`/`inactive`.
    pub fn parse_token(token: &str) -> Option<Self> {
        match token {
            "1" | "active" => Some(Class::Active),
            "0" | "inactive" => Some(Class::Inactive),
            _ => None,
        }
    }
}

/// Molecules with aligned class labels.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LabeledDataset {
    pub name: String,
    molecules: Vec<MolecularGraph>,
    labels: Vec<Class>,
}

impl LabeledDataset {
    pub fn new(
        name: impl Into<String>,
        molecules: Vec<MolecularGraph>,
        labels: Vec<Class>,
    ) -> Result<Self, GraphError> {
        if molecules.len() != labels.len() {
            return Err(GraphError::LengthMismatch {
                molecules: molecules.len(),
                labels: labels.len(),
            });
        }
        Ok(LabeledDataset {
            name: name.into(),
            molecules,
            labels,
        })
    }

    pub fn empty(name: impl Into<String>) -> Self {
        LabeledDataset {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, molecule: MolecularGraph, label: Class) {
        self.molecules.push(molecule);
        self.labels.push(label);
    }

    pub fn len(&self) -> usize {
        self.molecules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.molecules.is_empty()
    }

    pub fn molecules(&self) -> &[MolecularGraph] {
        &self.molecules
    }

    pub fn labels(&self) -> &[Class] {
        &self.labels
    }

    pub fn molecule(&self, i: usize) -> &MolecularGraph {
        &self.molecules[i]
    }

    pub fn label(&self, i: usize) -> Class {
        self.labels[i]
    }

    pub fn count_active(&self) -> usize {
        self.labels.iter().filter(|c| c.is_active()).count()
    }

    pub fn count_inactive(&self) -> usize {
        self.labels.len() - self.count_active()
    }

    pub fn has_both_classes(&self) -> bool {
        self.count_active() > 0 && self.count_inactive() > 0
    }

    /// Sub-dataset with the given molecule indices, in the given order.
    pub fn subset(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            name: self.name.clone(),
            molecules: indices.iter().map(|&i| self.molecules[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Same molecules with replaced labels.
    pub fn with_labels(&self, labels: Vec<Class>) -> Result<LabeledDataset, GraphError> {
        LabeledDataset::new(self.name.clone(), self.molecules.clone(), labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> AtomLabel {
        AtomLabel::new(s).unwrap()
    }

    #[test]
    fn label_order_matches_strings() {
        let mut labels = vec![l("O"), l("Cl"), l("C"), l("Br"), l("N")];
        labels.sort();
        let s: Vec<_> = labels.iter().map(|a| a.as_str()).collect();
        assert_eq!(s, vec!["Br", "C", "Cl", "N", "O"]);
    }

    #[test]
    fn label_validation() {
        assert!(AtomLabel::new("").is_err());
        assert!(AtomLabel::new("C(").is_err());
        assert!(AtomLabel::new("ABCDEFGHI").is_err());
        assert_eq!(l("17").as_str(), "17");
    }

    #[test]
    fn bond_order_is_fixed() {
        assert!(BondLabel::Single < BondLabel::Double);
        assert!(BondLabel::Double < BondLabel::Triple);
        assert!(BondLabel::Triple < BondLabel::Aromatic);
        for b in BondLabel::ALL {
            assert_eq!(BondLabel::from_code(b.code()), Some(b));
            assert_eq!(BondLabel::from_symbol(b.symbol()), Some(b));
        }
    }

    #[test]
    fn graph_rejects_invalid_edges() {
        let atoms = vec![l("C"), l("C")];
        assert_eq!(
            MolecularGraph::new("x", atoms.clone(), vec![(0, 2, BondLabel::Single)]),
            Err(GraphError::UnknownVertex(0, 2))
        );
        assert_eq!(
            MolecularGraph::new("x", atoms.clone(), vec![(1, 1, BondLabel::Single)]),
            Err(GraphError::SelfLoop(1))
        );
        assert_eq!(
            MolecularGraph::new(
                "x",
                atoms,
                vec![(0, 1, BondLabel::Single), (1, 0, BondLabel::Double)]
            ),
            Err(GraphError::ParallelEdge(1, 0))
        );
        assert_eq!(
            MolecularGraph::new("x", vec![l("C"), l("H")], vec![]),
            Err(GraphError::Hydrogen(1))
        );
    }

    #[test]
    fn shape_predicates() {
        let path = MolecularGraph::new(
            "p",
            vec![l("C"), l("C"), l("O")],
            vec![(0, 1, BondLabel::Single), (1, 2, BondLabel::Single)],
        )
        .unwrap();
        assert!(path.is_path() && path.is_tree() && path.is_connected());
        let star = MolecularGraph::new(
            "s",
            vec![l("C"), l("C"), l("O"), l("N")],
            vec![
                (0, 1, BondLabel::Single),
                (0, 2, BondLabel::Single),
                (0, 3, BondLabel::Single),
            ],
        )
        .unwrap();
        assert!(star.is_tree() && !star.is_path());
        let tri = MolecularGraph::new(
            "t",
            vec![l("C"), l("C"), l("C")],
            vec![
                (0, 1, BondLabel::Single),
                (1, 2, BondLabel::Single),
                (2, 0, BondLabel::Single),
            ],
        )
        .unwrap();
        assert!(!tri.is_tree() && tri.is_connected());
    }

    #[test]
    fn class_tokens() {
        assert_eq!(Class::parse_token("1"), Some(Class::Active));
        assert_eq!(Class::parse_token("active"), Some(Class::Active));
        assert_eq!(Class::parse_token("0"), Some(Class::Inactive));
        assert_eq!(Class::parse_token("inactive"), Some(Class::Inactive));
        assert_eq!(Class::parse_token("2"), None);
    }
}
