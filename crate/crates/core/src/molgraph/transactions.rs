//! Line-based transaction format.
//!
//! ```text
//! t # <graph-id> <class>
//! v <vid> <atom-label>
//! e <src> <dst> <bond: 1|2|3|4>
//! ```
//!
//! `#` lines are comments, blank lines are ignored. Vertex ids must be
//! consecutive from zero within each block.

use std::fmt::Write as _;

use thiserror::Error;

use super::{AtomLabel, BondLabel, Class, GraphError, LabeledDataset, MolecularGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct TransactionError {
    pub line: usize,
    pub kind: TransactionErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransactionErrorKind {
    #[error("malformed line {0:?}")]
    Malformed(String),
    #[error("vertex or edge line before any 't' header")]
    MissingHeader,
    #[error("non-consecutive vertex id {found}, expected {expected}")]
    NonConsecutiveVertex { expected: usize, found: usize },
    #[error("edge references unknown vertex")]
    UnknownVertex,
    #[error("unknown class token {0:?}")]
    UnknownClass(String),
    #[error("unknown bond code {0:?}")]
    UnknownBond(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

struct Block {
    id: String,
    class: Class,
    header_line: usize,
    atoms: Vec<AtomLabel>,
    edges: Vec<(usize, usize, BondLabel)>,
}

impl Block {
    fn finish(self) -> Result<(MolecularGraph, Class), TransactionError> {
        let line = self.header_line;
        let g = MolecularGraph::new(self.id, self.atoms, self.edges).map_err(|e| {
            TransactionError {
                line,
                kind: e.into(),
            }
        })?;
        Ok((g, self.class))
    }
}

/// Parses a transaction file into a dataset named `""`.
pub fn parse_transactions(text: &str) -> Result<LabeledDataset, TransactionError> {
    let mut ds = LabeledDataset::empty("");
    let mut current: Option<Block> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let err = |kind| TransactionError { line, kind };
        let malformed = || err(TransactionErrorKind::Malformed(raw.to_string()));
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match fields[0] {
            "t" => {
                if fields.len() != 4 || fields[1] != "#" {
                    return Err(malformed());
                }
                fields[2].parse::<u64>().map_err(|_| malformed())?;
                let class = Class::parse_token(fields[3])
                    .ok_or_else(|| err(TransactionErrorKind::UnknownClass(fields[3].into())))?;
                if let Some(block) = current.take() {
                    let (g, c) = block.finish()?;
                    ds.push(g, c);
                }
                current = Some(Block {
                    id: fields[2].to_string(),
                    class,
                    header_line: line,
                    atoms: Vec::new(),
                    edges: Vec::new(),
                });
            }
            "v" => {
                let block = current
                    .as_mut()
                    .ok_or_else(|| err(TransactionErrorKind::MissingHeader))?;
                if fields.len() != 3 {
                    return Err(malformed());
                }
                let vid: usize = fields[1].parse().map_err(|_| malformed())?;
                if vid != block.atoms.len() {
                    return Err(err(TransactionErrorKind::NonConsecutiveVertex {
                        expected: block.atoms.len(),
                        found: vid,
                    }));
                }
                let label = AtomLabel::new(fields[2]).map_err(|e| err(e.into()))?;
                block.atoms.push(label);
            }
            "e" => {
                let block = current
                    .as_mut()
                    .ok_or_else(|| err(TransactionErrorKind::MissingHeader))?;
                if fields.len() != 4 {
                    return Err(malformed());
                }
                let u: usize = fields[1].parse().map_err(|_| malformed())?;
                let v: usize = fields[2].parse().map_err(|_| malformed())?;
                let bond = fields[3]
                    .parse::<u8>()
                    .ok()
                    .and_then(BondLabel::from_code)
                    .ok_or_else(|| err(TransactionErrorKind::UnknownBond(fields[3].into())))?;
                if u >= block.atoms.len() || v >= block.atoms.len() {
                    return Err(err(TransactionErrorKind::UnknownVertex));
                }
                block.edges.push((u, v, bond));
            }
            f if f.starts_with('#') => {}
            _ => return Err(malformed()),
        }
    }
    if let Some(block) = current.take() {
        let (g, c) = block.finish()?;
        ds.push(g, c);
    }
    Ok(ds)
}

/// Serializes a dataset. Graph ids are the molecule positions.
pub fn write_transactions(dataset: &LabeledDataset) -> String {
    let mut out = String::new();
    for (i, (mol, class)) in dataset
        .molecules()
        .iter()
        .zip(dataset.labels())
        .enumerate()
    {
        writeln!(out, "t # {} {}", i, class.token()).unwrap();
        for (v, atom) in mol.atoms().iter().enumerate() {
            writeln!(out, "v {} {}", v, atom).unwrap();
        }
        for e in mol.edges() {
            writeln!(out, "e {} {} {}", e.u, e.v, e.bond.code()).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_block() {
        let ds = parse_transactions("t # 0 1\nv 0 C\nv 1 C\ne 0 1 1").unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.label(0), Class::Active);
        let m = ds.molecule(0);
        assert_eq!(m.num_atoms(), 2);
        assert_eq!(m.bond(0, 1), Some(BondLabel::Single));
        assert_eq!(write_transactions(&ds), "t # 0 1\nv 0 C\nv 1 C\ne 0 1 1\n");
    }

    #[test]
    fn empty_input() {
        let ds = parse_transactions("").unwrap();
        assert!(ds.is_empty());
        assert_eq!(write_transactions(&ds), "");
        let ds = parse_transactions("# only a comment\n\n").unwrap();
        assert!(ds.is_empty());
    }

    #[test]
    fn unknown_vertex() {
        let err = parse_transactions("t # 0 1\nv 0 C\nv 1 C\ne 0 5 1").unwrap_err();
        assert_eq!(err.line, 4);
        assert_eq!(err.kind, TransactionErrorKind::UnknownVertex);
        assert_eq!(err.kind.to_string(), "edge references unknown vertex");
    }

    #[test]
    fn other_errors() {
        let e = parse_transactions("t # 0 1\nv 0 C\nv 2 C\n").unwrap_err();
        assert!(matches!(
            e.kind,
            TransactionErrorKind::NonConsecutiveVertex {
                expected: 1,
                found: 2
            }
        ));
        let e = parse_transactions("t # 0 x\n").unwrap_err();
        assert!(matches!(e.kind, TransactionErrorKind::UnknownClass(_)));
        let e = parse_transactions("t # 0 1\nv 0 C\nv 1 C\ne 0 1 7\n").unwrap_err();
        assert!(matches!(e.kind, TransactionErrorKind::UnknownBond(_)));
        let e = parse_transactions("v 0 C\n").unwrap_err();
        assert_eq!(e.kind, TransactionErrorKind::MissingHeader);
        let e = parse_transactions("t # 0 1\nx 1 2\n").unwrap_err();
        assert!(matches!(e.kind, TransactionErrorKind::Malformed(_)));
        let e = parse_transactions("t # 0 1\nv 0 C\nv 1 C\ne 0 1 1\ne 1 0 2\n").unwrap_err();
        assert!(matches!(e.kind, TransactionErrorKind::Graph(_)));
        let e = parse_transactions("t # 0 1\nv 0 H\n").unwrap_err();
        assert!(matches!(e.kind, TransactionErrorKind::Graph(GraphError::Hydrogen(0))));
    }

    #[test]
    fn class_words_and_comments() {
        let text = "# header\nt # 3 active\nv 0 N\n\nt # 4 inactive\nv 0 O\nv 1 C\ne 1 0 2\n";
        let ds = parse_transactions(text).unwrap();
        assert_eq!(ds.labels(), &[Class::Active, Class::Inactive]);
        assert_eq!(ds.molecule(0).id(), "3");
        assert_eq!(ds.molecule(1).bond(0, 1), Some(BondLabel::Double));
    }
}
