//! Exhaustive fragment enumeration by edge subsets.
//!
//! Every connected subset of a molecule's edges is a fragment occurrence.
//! Fragments are grouped into isomorphism classes with a backtracking test,
//! so the result is the full set of distinct connected subgraphs with the
//! molecules that contain each.

use std::collections::{BTreeMap, BTreeSet};

use molfrag_core::molgraph::{LabeledDataset, MolecularGraph};

/// Plain labelled graph: atom labels and `(u, v, bond code)` edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallGraph {
    pub labels: Vec<String>,
    pub edges: Vec<(usize, usize, u8)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Shape {
    Path,
    Tree,
    Cyclic,
}

type Signature = (usize, usize, Vec<String>, Vec<usize>, Vec<(String, u8, String)>);

impl SmallGraph {
    pub fn from_molecule(m: &MolecularGraph) -> Self {
        SmallGraph {
            labels: m.atoms().iter().map(|a| a.as_str().to_string()).collect(),
            edges: m.edges().iter().map(|e| (e.u, e.v, e.bond.code())).collect(),
        }
    }

    fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.labels.len()];
        for &(u, v, _) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    pub fn shape(&self) -> Shape {
        if self.edges.len() + 1 != self.labels.len() {
            Shape::Cyclic
        } else if self.degrees().iter().all(|&d| d <= 2) {
            Shape::Path
        } else {
            Shape::Tree
        }
    }

    /// Isomorphism invariant; equal for isomorphic graphs.
    fn signature(&self) -> Signature {
        let mut labels = self.labels.clone();
        labels.sort();
        let mut degrees = self.degrees();
        degrees.sort();
        let mut edges: Vec<(String, u8, String)> = self
            .edges
            .iter()
            .map(|&(u, v, b)| {
                let (a, c) = (self.labels[u].clone(), self.labels[v].clone());
                if a <= c {
                    (a, b, c)
                } else {
                    (c, b, a)
                }
            })
            .collect();
        edges.sort();
        (self.labels.len(), self.edges.len(), labels, degrees, edges)
    }

    fn bond_matrix(&self) -> Vec<Vec<u8>> {
        let n = self.labels.len();
        let mut m = vec![vec![0u8; n]; n];
        for &(u, v, b) in &self.edges {
            m[u][v] = b;
            m[v][u] = b;
        }
        m
    }
}

/// Labelled-graph isomorphism by backtracking over vertex bijections.
pub fn isomorphic(a: &SmallGraph, b: &SmallGraph) -> bool {
    if a.signature() != b.signature() {
        return false;
    }
    let n = a.labels.len();
    let (ma, mb) = (a.bond_matrix(), b.bond_matrix());
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        i: usize,
        a: &SmallGraph,
        b: &SmallGraph,
        ma: &[Vec<u8>],
        mb: &[Vec<u8>],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let n = a.labels.len();
        if i == n {
            return true;
        }
        for j in 0..n {
            if used[j] || a.labels[i] != b.labels[j] {
                continue;
            }
            if (0..i).any(|k| ma[i][k] != mb[j][map[k]]) {
                continue;
            }
            map[i] = j;
            used[j] = true;
            if go(i + 1, a, b, ma, mb, map, used) {
                return true;
            }
            used[j] = false;
        }
        map[i] = usize::MAX;
        false
    }
    go(0, a, b, &ma, &mb, &mut map, &mut used)
}

/// One isomorphism class of connected fragments.
#[derive(Clone, Debug)]
pub struct FragmentClass {
    pub graph: SmallGraph,
    pub shape: Shape,
    pub molecules: BTreeSet<usize>,
}

#[derive(Default)]
struct Classes {
    buckets: BTreeMap<Signature, Vec<FragmentClass>>,
}

impl Classes {
    fn add(&mut self, g: SmallGraph, molecule: usize) {
        let bucket = self.buckets.entry(g.signature()).or_default();
        if let Some(c) = bucket.iter_mut().find(|c| isomorphic(&c.graph, &g)) {
            c.molecules.insert(molecule);
            return;
        }
        bucket.push(FragmentClass {
            shape: g.shape(),
            graph: g,
            molecules: BTreeSet::from([molecule]),
        });
    }
}

/// Connected subgraph spanned by the edges selected in `mask`, or `None`
/// when the selection is disconnected.
fn edge_subgraph(g: &SmallGraph, mask: u32) -> Option<SmallGraph> {
    let chosen: Vec<(usize, usize, u8)> = g
        .edges
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, &e)| e)
        .collect();
    let mut index = BTreeMap::new();
    for &(u, v, _) in &chosen {
        let k = index.len();
        index.entry(u).or_insert(k);
        let k = index.len();
        index.entry(v).or_insert(k);
    }
    let n = index.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let edges: Vec<(usize, usize, u8)> = chosen.iter().map(|&(u, v, b)| (index[&u], index[&v], b)).collect();
    for &(u, v, _) in &edges {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        parent[ru] = rv;
    }
    let root = find(&mut parent, 0);
    if (0..n).any(|x| find(&mut parent, x) != root) {
        return None;
    }
    let mut labels = vec![String::new(); n];
    for (&old, &new) in &index {
        labels[new] = g.labels[old].clone();
    }
    Some(SmallGraph { labels, edges })
}

/// All connected fragments (at least one edge) of every molecule, grouped
/// into isomorphism classes. Molecules must have at most 20 bonds.
pub fn enumerate_fragments(dataset: &LabeledDataset) -> Vec<FragmentClass> {
    let mut classes = Classes::default();
    for (i, m) in dataset.molecules().iter().enumerate() {
        let g = SmallGraph::from_molecule(m);
        assert!(g.edges.len() <= 20, "molecule too large for exhaustive enumeration");
        for mask in 1u32..(1 << g.edges.len()) {
            if let Some(sub) = edge_subgraph(&g, mask) {
                classes.add(sub, i);
            }
        }
    }
    classes.buckets.into_values().flatten().collect()
}

/// Whether a fragment of this shape belongs to a language named
/// `"sequence"`, `"tree"` or `"graph"`.
pub fn in_language(shape: Shape, language: &str) -> bool {
    match language {
        "sequence" => shape == Shape::Path,
        "tree" => shape != Shape::Cyclic,
        "graph" => true,
        other => panic!("unknown language {other}"),
    }
}

/// χ² computed as Σ (observed − expected)² / expected over the four cells.
pub fn chi2_by_cells(p: usize, n: usize, total_active: usize, total_inactive: usize) -> f64 {
    let obs = [
        [p as f64, n as f64],
        [(total_active - p) as f64, (total_inactive - n) as f64],
    ];
    let m = (total_active + total_inactive) as f64;
    let rows = [obs[0][0] + obs[0][1], obs[1][0] + obs[1][1]];
    let cols = [obs[0][0] + obs[1][0], obs[0][1] + obs[1][1]];
    let mut s = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let e = rows[r] * cols[c] / m;
            if e == 0.0 {
                return 0.0;
            }
            s += (obs[r][c] - e).powi(2) / e;
        }
    }
    s
}


/// Every fragment of one language over a dataset, with its per-class
/// support and χ².
#[derive(Clone, Debug)]
pub struct LanguageOracle {
    pub classes: Vec<FragmentClass>,
    /// `(actives, inactives)` containing each class.
    pub tables: Vec<(usize, usize)>,
    pub scores: Vec<f64>,
}

impl LanguageOracle {
    pub fn new(dataset: &LabeledDataset, language: &str) -> Self {
        let (pp, nn) = (dataset.count_active(), dataset.count_inactive());
        let classes: Vec<FragmentClass> = enumerate_fragments(dataset)
            .into_iter()
            .filter(|c| in_language(c.shape, language))
            .collect();
        let tables: Vec<(usize, usize)> = classes
            .iter()
            .map(|c| {
                let p = c.molecules.iter().filter(|&&i| dataset.label(i).is_active()).count();
                (p, c.molecules.len() - p)
            })
            .collect();
        let scores = tables.iter().map(|&(p, n)| chi2_by_cells(p, n, pp, nn)).collect();
        LanguageOracle {
            classes,
            tables,
            scores,
        }
    }

    /// Classes isomorphic to `g`; a correct oracle yields at most one.
    pub fn find(&self, g: &SmallGraph) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&i| isomorphic(&self.classes[i].graph, g))
            .collect()
    }

    /// All scores, highest first.
    pub fn ranked_scores(&self) -> Vec<f64> {
        let mut s = self.scores.clone();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }
}

/// Label strings of all walks of 1..=`max_bonds` bonds that never step
/// straight back along the bond they arrived by, as `(min, max)` of the two
/// reading directions, e.g. `("C-C=O", "O=C-C")`.
pub fn walk_strings(m: &MolecularGraph, max_bonds: usize) -> BTreeSet<(String, String)> {
    fn extend(
        m: &MolecularGraph,
        path: &mut Vec<usize>,
        text: &mut Vec<String>,
        max_bonds: usize,
        out: &mut BTreeSet<(String, String)>,
    ) {
        if path.len() > 1 {
            let fwd = text.concat();
            let rev: String = text.iter().rev().cloned().collect::<Vec<_>>().concat();
            out.insert(if fwd <= rev { (fwd, rev) } else { (rev, fwd) });
        }
        if path.len() > max_bonds {
            return;
        }
        let last = *path.last().unwrap();
        let prev = if path.len() > 1 { Some(path[path.len() - 2]) } else { None };
        for &(next, bond) in m.neighbors(last) {
            if Some(next) == prev {
                continue;
            }
            path.push(next);
            text.push(bond.symbol().to_string());
            text.push(m.atom(next).as_str().to_string());
            extend(m, path, text, max_bonds, out);
            text.truncate(text.len() - 2);
            path.pop();
        }
    }
    let mut out = BTreeSet::new();
    for v in 0..m.num_atoms() {
        extend(m, &mut vec![v], &mut vec![m.atom(v).as_str().to_string()], max_bonds, &mut out);
    }
    out
}
