use std::collections::BTreeSet;
use std::ops::ControlFlow;

use crate::molgraph::{AtomLabel, BondLabel, MolecularGraph};

use super::embed::{self, MatchPlan};
use super::PatternError;

/// Free (unrooted) labeled tree.
///
/// The canonical code roots the tree at its center; for a bicentral tree the
/// lexicographically smaller of the two rootings is used. A rooted subtree is
/// written `label(bond subtree)(bond subtree)...` with children sorted by
/// their own strings.
#[derive(Clone, Debug)]
pub struct TreePattern {
    graph: MolecularGraph,
    code: String,
    /// Last vertex of the canonical preorder; always a leaf.
    last_leaf: usize,
    plan: MatchPlan,
}

impl PartialEq for TreePattern {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
    }
}

impl Eq for TreePattern {}

impl std::hash::Hash for TreePattern {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.code.hash(state)
    }
}

fn rooted(graph: &MolecularGraph, v: usize, parent: usize) -> (String, Vec<usize>) {
    let mut children: Vec<(String, Vec<usize>)> = graph
        .neighbors(v)
        .iter()
        .filter(|&&(w, _)| w != parent)
        .map(|&(w, b)| {
            let (s, order) = rooted(graph, w, v);
            (format!("({}{})", b.symbol(), s), order)
        })
        .collect();
    children.sort_by(|a, b| a.0.cmp(&b.0));
    let mut s = graph.atom(v).as_str().to_string();
    let mut order = vec![v];
    for (cs, co) in children {
        s.push_str(&cs);
        order.extend(co);
    }
    (s, order)
}

fn centers(graph: &MolecularGraph) -> Vec<usize> {
    let n = graph.num_atoms();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut degree: Vec<usize> = (0..n).map(|v| graph.degree(v)).collect();
    let mut leaves: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= leaves.len();
        let mut next = Vec::new();
        for &leaf in &leaves {
            degree[leaf] = 0;
            for &(w, _) in graph.neighbors(leaf) {
                if degree[w] > 0 {
                    degree[w] -= 1;
                    if degree[w] == 1 {
                        next.push(w);
                    }
                }
            }
        }
        leaves = next;
    }
    leaves.sort_unstable();
    leaves
}

/// Canonical rooted string and the matching preorder.
fn canonical_form(graph: &MolecularGraph) -> (String, Vec<usize>) {
    centers(graph)
        .into_iter()
        .map(|c| rooted(graph, c, usize::MAX))
        .min_by(|a, b| a.0.cmp(&b.0))
        .expect("non-empty tree")
}

pub(crate) fn remove_vertex(graph: &MolecularGraph, v: usize) -> MolecularGraph {
    let atoms = graph
        .atoms()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != v)
        .map(|(_, &a)| a)
        .collect();
    let shift = |x: usize| if x > v { x - 1 } else { x };
    let edges = graph
        .edges()
        .iter()
        .filter(|e| e.u != v && e.v != v)
        .map(|e| (shift(e.u), shift(e.v), e.bond))
        .collect();
    MolecularGraph::build(String::new(), atoms, edges).expect("subgraph of a simple graph")
}

impl TreePattern {
    /// Accepts any connected acyclic graph with at least one edge.
    pub fn new(graph: MolecularGraph) -> Result<Self, PatternError> {
        if graph.num_edges() == 0 {
            return Err(PatternError::TooSmall);
        }
        if !graph.is_tree() {
            return Err(PatternError::Shape("tree pattern must be connected and acyclic".into()));
        }
        let (s, order) = canonical_form(&graph);
        let plan = MatchPlan::bfs(&graph);
        Ok(TreePattern {
            last_leaf: *order.last().unwrap(),
            code: format!("T:{s}"),
            graph,
            plan,
        })
    }

    pub(crate) fn parse_body(body: &str) -> Result<Self, PatternError> {
        let mut atoms = Vec::new();
        let mut edges = Vec::new();
        let rest = parse_subtree(body, None, &mut atoms, &mut edges)?;
        if !rest.is_empty() {
            return Err(PatternError::Code(format!("trailing input in tree code {body:?}")));
        }
        let graph = MolecularGraph::build(String::new(), atoms, edges)
            .map_err(|e| PatternError::Code(e.to_string()))?;
        let tree = TreePattern::new(graph)?;
        if tree.code[2..] != *body {
            return Err(PatternError::Code(format!("{body:?} is not a canonical tree code")));
        }
        Ok(tree)
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn graph(&self) -> &MolecularGraph {
        &self.graph
    }

    pub fn num_edges(&self) -> usize {
        self.graph.num_edges()
    }

    pub fn occurs_in(&self, molecule: &MolecularGraph) -> bool {
        embed::occurs(&self.graph, &self.plan, molecule)
    }

    /// Leaf attachments `(pattern vertex, bond, atom)` available in `molecule`.
    pub(crate) fn extensions(&self, molecule: &MolecularGraph) -> BTreeSet<(usize, BondLabel, AtomLabel)> {
        let mut out = BTreeSet::new();
        let _ = embed::for_each_embedding(&self.graph, &self.plan, molecule, |map| {
            for (u, &image) in map.iter().enumerate() {
                for &(w, b) in molecule.neighbors(image) {
                    if !map.contains(&w) {
                        out.insert((u, b, molecule.atom(w)));
                    }
                }
            }
            ControlFlow::Continue(())
        });
        out
    }

    pub(crate) fn extend(&self, at: usize, bond: BondLabel, atom: AtomLabel) -> TreePattern {
        let mut atoms = self.graph.atoms().to_vec();
        atoms.push(atom);
        let mut edges: Vec<_> = self.graph.edges().iter().map(|e| (e.u, e.v, e.bond)).collect();
        edges.push((at, atoms.len() - 1, bond));
        let graph = MolecularGraph::build(String::new(), atoms, edges).expect("leaf extension");
        TreePattern::new(graph).expect("leaf extension keeps a tree")
    }

    /// The unique parent from which refinement emits this tree: the tree
    /// without the last leaf of its canonical preorder.
    pub(crate) fn canonical_parent(&self) -> Option<TreePattern> {
        if self.graph.num_edges() < 2 {
            return None;
        }
        TreePattern::new(remove_vertex(&self.graph, self.last_leaf)).ok()
    }
}

fn parse_subtree<'a>(
    input: &'a str,
    parent: Option<(usize, BondLabel)>,
    atoms: &mut Vec<AtomLabel>,
    edges: &mut Vec<(usize, usize, BondLabel)>,
) -> Result<&'a str, PatternError> {
    let end = input
        .find(|c: char| !c.is_ascii_alphanumeric())
        .unwrap_or(input.len());
    let label = AtomLabel::new(&input[..end])
        .map_err(|_| PatternError::Code(format!("bad atom label at {input:?}")))?;
    let me = atoms.len();
    atoms.push(label);
    if let Some((p, b)) = parent {
        edges.push((p, me, b));
    }
    let mut rest = &input[end..];
    while let Some(inner) = rest.strip_prefix('(') {
        let mut chars = inner.chars();
        let bond = chars
            .next()
            .and_then(BondLabel::from_symbol)
            .ok_or_else(|| PatternError::Code(format!("missing bond at {inner:?}")))?;
        let after = parse_subtree(chars.as_str(), Some((me, bond)), atoms, edges)?;
        rest = after
            .strip_prefix(')')
            .ok_or_else(|| PatternError::Code(format!("unclosed subtree at {after:?}")))?;
    }
    Ok(rest)
}
