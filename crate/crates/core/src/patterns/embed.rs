//! Backtracking subgraph monomorphism for labeled graphs.
//!
//! Non-induced semantics: every query edge must map to a target edge with the
//! same bond label; extra target edges between mapped vertices are allowed.

use std::ops::ControlFlow;

use crate::molgraph::{BondLabel, MolecularGraph};

/// Order in which query vertices are matched. Every vertex after the first
/// has an already-matched neighbour (`anchor`), so candidates come from the
/// target adjacency list of the anchor's image.
#[derive(Clone, Debug)]
pub(crate) struct MatchPlan {
    order: Vec<usize>,
    anchor: Vec<Option<(usize, BondLabel)>>,
    checks: Vec<Vec<(usize, BondLabel)>>,
}

impl MatchPlan {
    /// Uses `order` as given. Panics if the order does not keep the matched
    /// part connected.
    pub(crate) fn with_order(query: &MolecularGraph, order: Vec<usize>) -> Self {
        let n = query.num_atoms();
        let mut position = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        let mut anchor = Vec::with_capacity(n);
        let mut checks = Vec::with_capacity(n);
        for (i, &v) in order.iter().enumerate() {
            let mut earlier: Vec<(usize, BondLabel)> = query
                .neighbors(v)
                .iter()
                .filter(|&&(w, _)| position[w] < i)
                .copied()
                .collect();
            earlier.sort_by_key(|&(w, _)| position[w]);
            if i == 0 {
                anchor.push(None);
                checks.push(Vec::new());
            } else {
                assert!(!earlier.is_empty(), "match order must stay connected");
                let first = earlier.remove(0);
                anchor.push(Some(first));
                checks.push(earlier);
            }
        }
        MatchPlan {
            order,
            anchor,
            checks,
        }
    }

    /// Breadth-first order from the highest-degree vertex.
    pub(crate) fn bfs(query: &MolecularGraph) -> Self {
        let n = query.num_atoms();
        if n == 0 {
            return MatchPlan {
                order: vec![],
                anchor: vec![],
                checks: vec![],
            };
        }
        let start = (0..n).max_by_key(|&v| (query.degree(v), usize::MAX - v)).unwrap();
        let mut seen = vec![false; n];
        let mut order = vec![start];
        seen[start] = true;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &(w, _) in query.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                }
            }
        }
        assert_eq!(order.len(), n, "query graph must be connected");
        Self::with_order(query, order)
    }
}

/// Calls `visit` with each embedding (indexed by query vertex) until it
/// returns `Break`.
pub(crate) fn for_each_embedding<F>(
    query: &MolecularGraph,
    plan: &MatchPlan,
    target: &MolecularGraph,
    mut visit: F,
) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let n = query.num_atoms();
    if n == 0 || n > target.num_atoms() || query.num_edges() > target.num_edges() {
        return ControlFlow::Continue(());
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; target.num_atoms()];
    extend(query, plan, target, 0, &mut map, &mut used, &mut visit)
}

fn extend<F>(
    query: &MolecularGraph,
    plan: &MatchPlan,
    target: &MolecularGraph,
    depth: usize,
    map: &mut [usize],
    used: &mut [bool],
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    if depth == plan.order.len() {
        return visit(map);
    }
    let qv = plan.order[depth];
    let label = query.atom(qv);
    let try_candidate = |t: usize,
                         map: &mut [usize],
                         used: &mut [bool],
                         visit: &mut F|
     -> ControlFlow<()> {
        if used[t] || target.atom(t) != label {
            return ControlFlow::Continue(());
        }
        for &(w, bond) in &plan.checks[depth] {
            if target.bond(t, map[w]) != Some(bond) {
                return ControlFlow::Continue(());
            }
        }
        map[qv] = t;
        used[t] = true;
        let flow = extend(query, plan, target, depth + 1, map, used, visit);
        used[t] = false;
        map[qv] = usize::MAX;
        flow
    };
    match plan.anchor[depth] {
        None => {
            for t in 0..target.num_atoms() {
                try_candidate(t, map, used, visit)?;
            }
        }
        Some((a, bond)) => {
            let image = map[a];
            for &(t, b) in target.neighbors(image) {
                if b == bond {
                    try_candidate(t, map, used, visit)?;
                }
            }
        }
    }
    ControlFlow::Continue(())
}

/// True iff `query` has at least one embedding in `target`.
pub(crate) fn occurs(query: &MolecularGraph, plan: &MatchPlan, target: &MolecularGraph) -> bool {
    for_each_embedding(query, plan, target, |_| ControlFlow::Break(())).is_break()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;

    fn count(q: &str, t: &str) -> usize {
        let q = parse_smiles(q).unwrap();
        let t = parse_smiles(t).unwrap();
        let plan = MatchPlan::bfs(&q);
        let mut n = 0;
        let _ = for_each_embedding(&q, &plan, &t, |_| {
            n += 1;
            ControlFlow::Continue(())
        });
        n
    }

    #[test]
    fn embedding_counts() {
        // A 3-path in a 6-ring: 6 start vertices x 2 directions.
        assert_eq!(count("ccc", "c1ccccc1"), 12);
        // Benzene automorphisms.
        assert_eq!(count("c1ccccc1", "c1ccccc1"), 12);
        assert_eq!(count("CCC", "c1ccccc1"), 0);
        assert_eq!(count("CO", "OCCO"), 2);
    }

    #[test]
    fn non_induced() {
        // A 4-path fits inside a 4-ring even though the ring closes it.
        assert_eq!(count("CCCC", "C1CCC1"), 8);
    }
}
