//! gSpan DFS codes: ordering, minimum-code computation and rightmost-path
//! extension.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::ops::ControlFlow;

use crate::molgraph::{AtomLabel, BondLabel, MolecularGraph};

use super::embed::{self, MatchPlan};

/// One edge of a DFS code. `from < to` marks a forward (tree) edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DfsEdge {
    pub from: usize,
    pub to: usize,
    pub from_label: AtomLabel,
    pub bond: BondLabel,
    pub to_label: AtomLabel,
}

impl DfsEdge {
    pub fn is_forward(&self) -> bool {
        self.from < self.to
    }

    fn labels(&self) -> (AtomLabel, BondLabel, AtomLabel) {
        (self.from_label, self.bond, self.to_label)
    }
}

/// gSpan's DFS lexicographic order on edges.
pub fn dfs_edge_cmp(a: &DfsEdge, b: &DfsEdge) -> Ordering {
    match (a.is_forward(), b.is_forward()) {
        (true, true) => a
            .to
            .cmp(&b.to)
            .then_with(|| b.from.cmp(&a.from))
            .then_with(|| a.labels().cmp(&b.labels())),
        (false, false) => a
            .from
            .cmp(&b.from)
            .then_with(|| a.to.cmp(&b.to))
            .then_with(|| a.labels().cmp(&b.labels())),
        (false, true) => {
            if a.from < b.to {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        }
        (true, false) => {
            if a.to <= b.from {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        }
    }
}

/// Lexicographic comparison of whole codes under [`dfs_edge_cmp`].
pub fn dfs_code_cmp(a: &[DfsEdge], b: &[DfsEdge]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = dfs_edge_cmp(x, y);
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DfsCode(pub Vec<DfsEdge>);

impl DfsCode {
    pub fn edges(&self) -> &[DfsEdge] {
        &self.0
    }

    pub fn num_vertices(&self) -> usize {
        self.0.iter().map(|e| e.from.max(e.to) + 1).max().unwrap_or(0)
    }

    /// Graph whose vertex `i` is DFS vertex `i`.
    pub fn to_graph(&self) -> MolecularGraph {
        self.try_to_graph().expect("DFS code describes a simple graph")
    }

    /// `None` if some vertex is never mentioned, labels disagree, or the
    /// edges do not form a simple graph.
    pub fn try_to_graph(&self) -> Option<MolecularGraph> {
        let n = self.num_vertices();
        let mut atoms: Vec<Option<AtomLabel>> = vec![None; n];
        let mut edges = Vec::with_capacity(self.0.len());
        for e in &self.0 {
            for (v, l) in [(e.from, e.from_label), (e.to, e.to_label)] {
                match atoms[v] {
                    Some(existing) if existing != l => return None,
                    _ => atoms[v] = Some(l),
                }
            }
            edges.push((e.from, e.to, e.bond));
        }
        let atoms = atoms.into_iter().collect::<Option<Vec<_>>>()?;
        MolecularGraph::build(String::new(), atoms, edges).ok()
    }

    /// Vertices on the rightmost path, root first, rightmost vertex last.
    pub fn rightmost_path(&self) -> Vec<usize> {
        let n = self.num_vertices();
        if n == 0 {
            return Vec::new();
        }
        let mut parent = vec![usize::MAX; n];
        for e in &self.0 {
            if e.is_forward() {
                parent[e.to] = e.from;
            }
        }
        let mut path = vec![n - 1];
        let mut v = n - 1;
        while parent[v] != usize::MAX {
            v = parent[v];
            path.push(v);
        }
        path.reverse();
        path
    }

    /// `G:` followed by `(from,to,from_label,bond,to_label)` per edge.
    pub fn format(&self) -> String {
        let mut s = String::from("G:");
        for e in &self.0 {
            write!(
                s,
                "({},{},{},{},{})",
                e.from,
                e.to,
                e.from_label,
                e.bond.symbol(),
                e.to_label
            )
            .unwrap();
        }
        s
    }

    pub fn parse_body(body: &str) -> Option<DfsCode> {
        let mut edges = Vec::new();
        let mut rest = body;
        while !rest.is_empty() {
            let inner = rest.strip_prefix('(')?;
            let close = inner.find(')')?;
            let fields: Vec<&str> = inner[..close].split(',').collect();
            if fields.len() != 5 || fields[3].chars().count() != 1 {
                return None;
            }
            edges.push(DfsEdge {
                from: fields[0].parse().ok()?,
                to: fields[1].parse().ok()?,
                from_label: AtomLabel::new(fields[2]).ok()?,
                bond: BondLabel::from_symbol(fields[3].chars().next()?)?,
                to_label: AtomLabel::new(fields[4]).ok()?,
            });
            rest = &inner[close + 1..];
        }
        Some(DfsCode(edges))
    }
}

/// Graph with edge ids in the adjacency lists.
struct Indexed<'a> {
    graph: &'a MolecularGraph,
    adjacency: Vec<Vec<(usize, BondLabel, usize)>>,
}

impl<'a> Indexed<'a> {
    fn new(graph: &'a MolecularGraph) -> Self {
        let mut adjacency = vec![Vec::new(); graph.num_atoms()];
        for (id, e) in graph.edges().iter().enumerate() {
            adjacency[e.u].push((e.v, e.bond, id));
            adjacency[e.v].push((e.u, e.bond, id));
        }
        Indexed { graph, adjacency }
    }
}

#[derive(Clone)]
struct Embedding {
    /// DFS vertex -> graph vertex.
    map: Vec<usize>,
    /// Graph vertex -> DFS vertex.
    inverse: Vec<usize>,
    used_edges: Vec<bool>,
}

/// Candidate extensions of one embedding, each with the graph vertex / edge
/// that realises it.
fn extensions(
    g: &Indexed<'_>,
    emb: &Embedding,
    rightmost_path: &[usize],
    out: &mut Vec<(DfsEdge, usize, usize)>,
) {
    out.clear();
    let rm = *rightmost_path.last().unwrap();
    let next = emb.map.len();
    let rm_image = emb.map[rm];
    for &(w, bond, eid) in &g.adjacency[rm_image] {
        if emb.used_edges[eid] {
            continue;
        }
        let j = emb.inverse[w];
        if j != usize::MAX && rightmost_path.contains(&j) && j != rm {
            out.push((
                DfsEdge {
                    from: rm,
                    to: j,
                    from_label: g.graph.atom(rm_image),
                    bond,
                    to_label: g.graph.atom(w),
                },
                w,
                eid,
            ));
        }
    }
    for &i in rightmost_path {
        let image = emb.map[i];
        for &(w, bond, eid) in &g.adjacency[image] {
            if emb.inverse[w] == usize::MAX {
                out.push((
                    DfsEdge {
                        from: i,
                        to: next,
                        from_label: g.graph.atom(image),
                        bond,
                        to_label: g.graph.atom(w),
                    },
                    w,
                    eid,
                ));
            }
        }
    }
}

fn apply(emb: &Embedding, edge: &DfsEdge, vertex: usize, eid: usize) -> Embedding {
    let mut e = emb.clone();
    e.used_edges[eid] = true;
    if edge.is_forward() {
        e.map.push(vertex);
        e.inverse[vertex] = edge.to;
    }
    e
}

/// Builds the minimum DFS code step by step. With `expected` set, stops as
/// soon as the minimum deviates from it and returns `None`.
fn min_code_walk(graph: &MolecularGraph, expected: Option<&[DfsEdge]>) -> Option<DfsCode> {
    let g = Indexed::new(graph);
    let m = graph.num_edges();
    if m == 0 {
        return Some(DfsCode(Vec::new()));
    }
    let n = graph.num_atoms();

    // First edge: smallest (label, bond, label) over both orientations.
    let mut first: Option<DfsEdge> = None;
    for e in graph.edges() {
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            let cand = DfsEdge {
                from: 0,
                to: 1,
                from_label: graph.atom(a),
                bond: e.bond,
                to_label: graph.atom(b),
            };
            if first.is_none_or(|f| dfs_edge_cmp(&cand, &f) == Ordering::Less) {
                first = Some(cand);
            }
        }
    }
    let first = first.unwrap();
    if let Some(exp) = expected {
        if dfs_edge_cmp(&first, &exp[0]) != Ordering::Equal {
            return None;
        }
    }
    let mut embeddings = Vec::new();
    for (eid, e) in graph.edges().iter().enumerate() {
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            if graph.atom(a) == first.from_label && graph.atom(b) == first.to_label && e.bond == first.bond {
                let mut inverse = vec![usize::MAX; n];
                inverse[a] = 0;
                inverse[b] = 1;
                let mut used_edges = vec![false; m];
                used_edges[eid] = true;
                embeddings.push(Embedding {
                    map: vec![a, b],
                    inverse,
                    used_edges,
                });
            }
        }
    }
    let mut code = DfsCode(vec![first]);
    let mut buf = Vec::new();
    while code.0.len() < m {
        let rmp = code.rightmost_path();
        let mut best: Option<DfsEdge> = None;
        for emb in &embeddings {
            extensions(&g, emb, &rmp, &mut buf);
            for (cand, _, _) in &buf {
                if best.is_none_or(|b| dfs_edge_cmp(cand, &b) == Ordering::Less) {
                    best = Some(*cand);
                }
            }
        }
        // A connected graph always has a next DFS edge.
        let best = best.expect("connected graph");
        if let Some(exp) = expected {
            if dfs_edge_cmp(&best, &exp[code.0.len()]) != Ordering::Equal {
                return None;
            }
        }
        let mut next_embeddings = Vec::new();
        for emb in &embeddings {
            extensions(&g, emb, &rmp, &mut buf);
            for (cand, vertex, eid) in &buf {
                if dfs_edge_cmp(cand, &best) == Ordering::Equal {
                    next_embeddings.push(apply(emb, cand, *vertex, *eid));
                }
            }
        }
        embeddings = next_embeddings;
        code.0.push(best);
    }
    Some(code)
}

/// Minimum DFS code of a connected graph.
pub fn min_dfs_code(graph: &MolecularGraph) -> DfsCode {
    min_code_walk(graph, None).expect("unconstrained walk always completes")
}

/// True iff `code` is the minimum DFS code of the graph it describes.
pub fn is_min(code: &DfsCode) -> bool {
    min_code_walk(&code.to_graph(), Some(&code.0)).is_some()
}

/// Rightmost-path extensions of `code` realised in `molecule`.
pub(crate) fn rightmost_extensions(
    code: &DfsCode,
    pattern: &MolecularGraph,
    plan: &MatchPlan,
    molecule: &MolecularGraph,
) -> BTreeSet<DfsEdge> {
    let rmp = code.rightmost_path();
    let rm = *rmp.last().unwrap();
    let next = pattern.num_atoms();
    let mut out = BTreeSet::new();
    let _ = embed::for_each_embedding(pattern, plan, molecule, |map| {
        for &(w, bond) in molecule.neighbors(map[rm]) {
            if let Some(j) = rmp.iter().position(|&x| map[x] == w).map(|k| rmp[k]) {
                if j != rm && pattern.bond(rm, j).is_none() {
                    out.insert(DfsEdge {
                        from: rm,
                        to: j,
                        from_label: pattern.atom(rm),
                        bond,
                        to_label: molecule.atom(w),
                    });
                }
            }
        }
        for &i in &rmp {
            for &(w, bond) in molecule.neighbors(map[i]) {
                if !map.contains(&w) {
                    out.insert(DfsEdge {
                        from: i,
                        to: next,
                        from_label: pattern.atom(i),
                        bond,
                        to_label: molecule.atom(w),
                    });
                }
            }
        }
        ControlFlow::Continue(())
    });
    out
}
