//! Fragment languages and their canonical codes.
//!
//! Three mining languages nest as sequences ⊂ trees ⊂ graphs. A fourth kind,
//! [`WalkPattern`], holds the length-restricted walk fragments of the path
//! baseline and is never produced by refinement.
//!
//! Canonical code grammar (ASCII, used as fragment identifiers everywhere):
//!
//! ```text
//! sequence  S:<atom>(<bond><atom>)+        orientation: token-wise min of string and reversal
//! walk      W:<atom>(<bond><atom>)+        same orientation rule
//! tree      T:<subtree>                    rooted at the center
//! subtree   <atom>(\(<bond><subtree>\))*   children sorted by their strings
//! graph     G:(\(<from>,<to>,<atom>,<bond>,<atom>\))+   minimum DFS code
//! bond      - | = | # | :                  single, double, triple, aromatic
//! ```
//!
//! Occurrence is non-induced: every pattern edge must map onto a molecule
//! edge with the same bond label through an injective vertex map (for walks,
//! a non-backtracking walk). Support counts molecules, not embeddings.

pub(crate) mod dfs;
pub(crate) mod embed;
pub(crate) mod linear;
mod refine;
mod sequence;
mod tree;
mod walk;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::molgraph::MolecularGraph;

pub use dfs::{dfs_code_cmp, dfs_edge_cmp, is_min, min_dfs_code, DfsCode, DfsEdge};
pub use refine::{occurrences, refine, refine_within, single_edge_patterns, Refinement};
pub use sequence::SequencePattern;
pub use tree::TreePattern;
pub use walk::WalkPattern;
pub(crate) use walk::walk_label_strings;

use embed::MatchPlan;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("a pattern needs at least one edge")]
    TooSmall,
    #[error("invalid pattern shape: {0}")]
    Shape(String),
    #[error("invalid canonical code: {0}")]
    Code(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternLanguage {
    Sequence,
    Tree,
    Graph,
}

impl PatternLanguage {
    pub const ALL: [PatternLanguage; 3] = [
        PatternLanguage::Sequence,
        PatternLanguage::Tree,
        PatternLanguage::Graph,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PatternLanguage::Sequence => "sequence",
            PatternLanguage::Tree => "tree",
            PatternLanguage::Graph => "graph",
        }
    }
}

impl fmt::Display for PatternLanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PatternLanguage {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sequence" | "seq" => Ok(PatternLanguage::Sequence),
            "tree" => Ok(PatternLanguage::Tree),
            "graph" => Ok(PatternLanguage::Graph),
            other => Err(format!("unknown pattern language {other:?}")),
        }
    }
}

/// Connected labeled graph identified by its minimum DFS code.
#[derive(Clone, Debug)]
pub struct GraphPattern {
    dfs: DfsCode,
    graph: MolecularGraph,
    code: String,
    plan: MatchPlan,
}

impl PartialEq for GraphPattern {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
    }
}

impl Eq for GraphPattern {}

impl std::hash::Hash for GraphPattern {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.code.hash(state)
    }
}

impl GraphPattern {
    pub fn new(graph: &MolecularGraph) -> Result<Self, PatternError> {
        if graph.num_edges() == 0 {
            return Err(PatternError::TooSmall);
        }
        if !graph.is_connected() {
            return Err(PatternError::Shape("graph pattern must be connected".into()));
        }
        Ok(Self::from_min_code(min_dfs_code(graph)))
    }

    /// `code` must already be minimal.
    pub(crate) fn from_min_code(dfs: DfsCode) -> Self {
        let graph = dfs.to_graph();
        let plan = MatchPlan::with_order(&graph, (0..graph.num_atoms()).collect());
        GraphPattern {
            code: dfs.format(),
            dfs,
            graph,
            plan,
        }
    }

    pub(crate) fn parse_body(body: &str) -> Result<Self, PatternError> {
        let dfs = DfsCode::parse_body(body)
            .ok_or_else(|| PatternError::Code(format!("malformed graph code {body:?}")))?;
        if dfs.edges().is_empty() {
            return Err(PatternError::TooSmall);
        }
        let graph = dfs
            .try_to_graph()
            .ok_or_else(|| PatternError::Code(format!("graph code {body:?} is not a DFS code")))?;
        let parsed = GraphPattern::new(&graph)?;
        if parsed.dfs != dfs {
            return Err(PatternError::Code(format!("{body:?} is not a minimum DFS code")));
        }
        Ok(parsed)
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn dfs_code(&self) -> &DfsCode {
        &self.dfs
    }

    /// Graph whose vertex `i` is DFS vertex `i`.
    pub fn graph(&self) -> &MolecularGraph {
        &self.graph
    }

    pub fn num_edges(&self) -> usize {
        self.graph.num_edges()
    }

    pub fn is_cyclic(&self) -> bool {
        self.graph.num_edges() >= self.graph.num_atoms()
    }

    pub fn occurs_in(&self, molecule: &MolecularGraph) -> bool {
        embed::occurs(&self.graph, &self.plan, molecule)
    }
}

impl SequencePattern {
    /// The same structure as a tree pattern.
    pub fn to_tree(&self) -> TreePattern {
        TreePattern::new(self.to_graph()).expect("a path is a tree")
    }
}

impl TreePattern {
    /// The same structure as a graph pattern.
    pub fn to_graph_pattern(&self) -> GraphPattern {
        GraphPattern::new(self.graph()).expect("a tree is connected")
    }
}

/// A fragment of any kind. Codes carry a kind tag, so codes never collide
/// across kinds.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pattern {
    Sequence(SequencePattern),
    Tree(TreePattern),
    Graph(GraphPattern),
    Walk(WalkPattern),
}

impl Pattern {
    pub fn code(&self) -> &str {
        match self {
            Pattern::Sequence(p) => p.code(),
            Pattern::Tree(p) => p.code(),
            Pattern::Graph(p) => p.code(),
            Pattern::Walk(p) => p.code(),
        }
    }

    /// Mining language, `None` for walks.
    pub fn language(&self) -> Option<PatternLanguage> {
        match self {
            Pattern::Sequence(_) => Some(PatternLanguage::Sequence),
            Pattern::Tree(_) => Some(PatternLanguage::Tree),
            Pattern::Graph(_) => Some(PatternLanguage::Graph),
            Pattern::Walk(_) => None,
        }
    }

    /// Human-readable kind: `sequence`, `tree`, `graph` or `path`.
    pub fn kind_name(&self) -> &'static str {
        match self.language() {
            Some(l) => l.name(),
            None => "path",
        }
    }

    pub fn num_edges(&self) -> usize {
        match self {
            Pattern::Sequence(p) => p.num_edges(),
            Pattern::Tree(p) => p.num_edges(),
            Pattern::Graph(p) => p.num_edges(),
            Pattern::Walk(p) => p.num_edges(),
        }
    }

    pub fn is_cyclic(&self) -> bool {
        matches!(self, Pattern::Graph(g) if g.is_cyclic())
    }

    pub fn occurs(&self, molecule: &MolecularGraph) -> bool {
        match self {
            Pattern::Sequence(p) => p.occurs_in(molecule),
            Pattern::Tree(p) => p.occurs_in(molecule),
            Pattern::Graph(p) => p.occurs_in(molecule),
            Pattern::Walk(p) => p.occurs_in(molecule),
        }
    }

    /// Parses any canonical code. Non-canonical spellings are rejected.
    pub fn from_code(code: &str) -> Result<Pattern, PatternError> {
        let (tag, body) = code
            .split_once(':')
            .ok_or_else(|| PatternError::Code(format!("missing kind tag in {code:?}")))?;
        match tag {
            "S" => SequencePattern::parse_body(body).map(Pattern::Sequence),
            "T" => TreePattern::parse_body(body).map(Pattern::Tree),
            "G" => GraphPattern::parse_body(body).map(Pattern::Graph),
            "W" => WalkPattern::parse_body(body).map(Pattern::Walk),
            _ => Err(PatternError::Code(format!("unknown kind tag in {code:?}"))),
        }
    }

    /// Builds a pattern of the given language from a structure, if the
    /// structure belongs to that language.
    pub fn from_graph(language: PatternLanguage, graph: &MolecularGraph) -> Result<Pattern, PatternError> {
        match language {
            PatternLanguage::Sequence => {
                if graph.num_edges() == 0 {
                    return Err(PatternError::TooSmall);
                }
                if !graph.is_path() {
                    return Err(PatternError::Shape("sequence pattern must be a path".into()));
                }
                let start = (0..graph.num_atoms())
                    .find(|&v| graph.degree(v) == 1)
                    .expect("a path has an end");
                let mut atoms = vec![graph.atom(start)];
                let mut bonds = Vec::new();
                let (mut prev, mut v) = (usize::MAX, start);
                loop {
                    let next = graph.neighbors(v).iter().find(|&&(w, _)| w != prev);
                    match next {
                        Some(&(w, b)) => {
                            atoms.push(graph.atom(w));
                            bonds.push(b);
                            prev = v;
                            v = w;
                        }
                        None => break,
                    }
                }
                SequencePattern::new(atoms, bonds).map(Pattern::Sequence)
            }
            PatternLanguage::Tree => TreePattern::new(graph.clone()).map(Pattern::Tree),
            PatternLanguage::Graph => GraphPattern::new(graph).map(Pattern::Graph),
        }
    }

    /// Structure of the pattern as a labeled graph (walks: as a path).
    pub fn to_graph(&self) -> MolecularGraph {
        match self {
            Pattern::Sequence(p) => p.to_graph(),
            Pattern::Tree(p) => p.graph().clone(),
            Pattern::Graph(p) => p.graph().clone(),
            Pattern::Walk(p) => {
                linear::LabelString::new(p.atoms().to_vec(), p.bonds().to_vec())
                    .expect("valid walk")
                    .to_graph()
            }
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;

    #[test]
    fn codes_carry_a_language_tag() {
        let g = parse_smiles("CCC").unwrap();
        let s = Pattern::from_graph(PatternLanguage::Sequence, &g).unwrap();
        let t = Pattern::from_graph(PatternLanguage::Tree, &g).unwrap();
        let gr = Pattern::from_graph(PatternLanguage::Graph, &g).unwrap();
        assert_eq!(s.code(), "S:C-C-C");
        assert_eq!(t.code(), "T:C(-C)(-C)");
        assert_eq!(gr.code(), "G:(0,1,C,-,C)(1,2,C,-,C)");
        assert_ne!(s.code(), t.code());
    }

    #[test]
    fn from_code_round_trip() {
        for smiles in ["CC=O", "CC(C)(N)O", "c1ccccc1", "C1CC1C#N"] {
            let g = parse_smiles(smiles).unwrap();
            for lang in PatternLanguage::ALL {
                if let Ok(p) = Pattern::from_graph(lang, &g) {
                    assert_eq!(Pattern::from_code(p.code()).unwrap(), p);
                }
            }
        }
        let w = Pattern::from_code("W:C:C:C:C:C:C:C").unwrap();
        assert_eq!(w.kind_name(), "path");
        assert!(Pattern::from_code("X:C-C").is_err());
        assert!(Pattern::from_code("CC").is_err());
        assert!(Pattern::from_code("G:(0,1,N,-,C)(1,2,C,-,C)").is_err());
        assert!(Pattern::from_code("G:(0,3,C,-,C)").is_err());
    }

    #[test]
    fn occurrence_examples() {
        let benzene = parse_smiles("c1ccccc1").unwrap();
        let hexane = parse_smiles("CCCCCC").unwrap();
        let ring = Pattern::from_graph(PatternLanguage::Graph, &benzene).unwrap();
        assert!(ring.occurs(&benzene));
        assert!(!ring.occurs(&hexane));
        assert!(ring.is_cyclic());
        let ccc = Pattern::from_code("S:C-C-C").unwrap();
        assert!(!ccc.occurs(&benzene));
        assert!(Pattern::from_code("S:C:C:C").unwrap().occurs(&benzene));
    }
}
