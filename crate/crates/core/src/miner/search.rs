use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use rayon::prelude::*;

use crate::molgraph::LabeledDataset;
use crate::patterns::{refine_within, single_edge_patterns, Pattern, Refinement};

use super::{
    chi2_upper_bound, sort_ranked, ContingencyTable, MinerError, MiningMode, MiningTask,
    ScoredPattern,
};

/// Execution options. Results do not depend on them.
#[derive(Clone, Copy, Debug)]
pub struct MinerConfig {
    /// Expand search nodes on the current rayon pool.
    pub parallel: bool,
    /// Nodes popped per best-first step in top-k mode.
    pub batch_size: usize,
}

impl Default for MinerConfig {
    fn default() -> Self {
        MinerConfig {
            parallel: true,
            batch_size: 32,
        }
    }
}

pub fn mine(task: &MiningTask) -> Result<Vec<ScoredPattern>, MinerError> {
    mine_with(task, &MinerConfig::default())
}

pub fn mine_with(task: &MiningTask, config: &MinerConfig) -> Result<Vec<ScoredPattern>, MinerError> {
    if !task.dataset.has_both_classes() {
        return Err(MinerError::UndefinedCorrelation);
    }
    let roots: Vec<Node> = single_edge_patterns(task.language, task.dataset)
        .into_iter()
        .map(|r| Node::new(r, task.dataset))
        .collect();
    match task.mode {
        MiningMode::TopK(0) => Err(MinerError::InvalidK),
        MiningMode::TopK(k) => Ok(topk(roots, k, task.dataset, config)),
        MiningMode::Threshold(t) if t.is_nan() || t < 0.0 => Err(MinerError::InvalidThreshold(t)),
        MiningMode::Threshold(t) => Ok(threshold(roots, t, task.dataset, config)),
    }
}

struct Node {
    pattern: Pattern,
    occurrences: Vec<usize>,
    table: ContingencyTable,
    score: f64,
    bound: f64,
}

impl Node {
    fn new(r: Refinement, ds: &LabeledDataset) -> Self {
        let table = ContingencyTable::from_occurrences(&r.occurrences, ds);
        Node {
            score: super::chi2(&table),
            bound: chi2_upper_bound(&table),
            pattern: r.pattern,
            occurrences: r.occurrences,
            table,
        }
    }

    fn children(&self, ds: &LabeledDataset) -> Vec<Node> {
        refine_within(&self.pattern, &self.occurrences, ds)
            .into_iter()
            .map(|r| Node::new(r, ds))
            .collect()
    }

    fn scored(&self) -> ScoredPattern {
        ScoredPattern {
            pattern: self.pattern.clone(),
            table: self.table,
            chi2: self.score,
        }
    }
}

// Max-heap order: larger bound first, then smaller code.
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then_with(|| other.pattern.code().cmp(self.pattern.code()))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

fn expand(nodes: &[Node], ds: &LabeledDataset, parallel: bool) -> Vec<Vec<Node>> {
    if parallel {
        nodes.par_iter().map(|n| n.children(ds)).collect()
    } else {
        nodes.iter().map(|n| n.children(ds)).collect()
    }
}

/// Entry of the running top-k set, ordered best first.
struct Ranked(ScoredPattern);

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.rank_cmp(&other.0)
    }
}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked {}

struct TopSet {
    k: usize,
    best: BTreeSet<Ranked>,
}

impl TopSet {
    fn offer(&mut self, node: &Node) {
        if self.best.len() == self.k {
            let worst = &self.best.last().expect("k >= 1").0;
            let beats = node
                .score
                .total_cmp(&worst.chi2)
                .then_with(|| worst.code().cmp(node.pattern.code()))
                == Ordering::Greater;
            if !beats {
                return;
            }
        }
        self.best.insert(Ranked(node.scored()));
        if self.best.len() > self.k {
            self.best.pop_last();
        }
    }

    /// Score a node must reach to possibly enter the set.
    fn tau(&self) -> f64 {
        if self.best.len() < self.k {
            f64::NEG_INFINITY
        } else {
            self.best.last().expect("k >= 1").0.chi2
        }
    }
}

fn topk(roots: Vec<Node>, k: usize, ds: &LabeledDataset, config: &MinerConfig) -> Vec<ScoredPattern> {
    let mut top = TopSet {
        k,
        best: BTreeSet::new(),
    };
    let mut heap = BinaryHeap::new();
    for node in roots {
        top.offer(&node);
        heap.push(node);
    }
    let batch_size = config.batch_size.max(1);
    loop {
        let mut batch = Vec::with_capacity(batch_size);
        while batch.len() < batch_size {
            match heap.pop() {
                // A node whose bound cannot tie the k-th score has no child
                // that could enter the set; neither has anything behind it.
                Some(node) if node.bound < top.tau() => {
                    heap.clear();
                    break;
                }
                Some(node) => batch.push(node),
                None => break,
            }
        }
        if batch.is_empty() {
            break;
        }
        for child in expand(&batch, ds, config.parallel).into_iter().flatten() {
            top.offer(&child);
            if child.bound >= top.tau() {
                heap.push(child);
            }
        }
    }
    top.best.into_iter().map(|r| r.0).collect()
}

fn threshold(roots: Vec<Node>, t: f64, ds: &LabeledDataset, config: &MinerConfig) -> Vec<ScoredPattern> {
    fn explore(node: Node, t: f64, ds: &LabeledDataset, parallel: bool) -> Vec<ScoredPattern> {
        let mut out = Vec::new();
        if node.score >= t {
            out.push(node.scored());
        }
        if node.bound >= t {
            let children = node.children(ds);
            drop(node);
            let found: Vec<Vec<ScoredPattern>> = if parallel {
                children
                    .into_par_iter()
                    .map(|c| explore(c, t, ds, parallel))
                    .collect()
            } else {
                children
                    .into_iter()
                    .map(|c| explore(c, t, ds, parallel))
                    .collect()
            };
            out.extend(found.into_iter().flatten());
        }
        out
    }
    let found: Vec<Vec<ScoredPattern>> = if config.parallel {
        roots
            .into_par_iter()
            .map(|r| explore(r, t, ds, true))
            .collect()
    } else {
        roots
            .into_iter()
            .map(|r| explore(r, t, ds, false))
            .collect()
    };
    let mut out: Vec<ScoredPattern> = found.into_iter().flatten().collect();
    sort_ranked(&mut out);
    out
}
