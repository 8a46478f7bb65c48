//! Seeded random molecules for property tests.

use molfrag_core::molgraph::{AtomLabel, BondLabel, Class, LabeledDataset, MolecularGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct RandomSpec {
    pub molecules: usize,
    /// Atoms per molecule, at least 2.
    pub max_atoms: usize,
    /// Extra bonds tried on top of the spanning tree.
    pub rings: usize,
    /// Drawn uniformly; repeat a label to weight it.
    pub atoms: Vec<&'static str>,
    pub bonds: Vec<BondLabel>,
}

impl RandomSpec {
    /// Mostly carbon, mostly single bonds.
    pub fn organic(molecules: usize, max_atoms: usize, rings: usize) -> Self {
        use BondLabel::*;
        RandomSpec {
            molecules,
            max_atoms,
            rings,
            atoms: vec!["C", "C", "C", "N", "O"],
            bonds: vec![Single, Single, Single, Single, Single, Single, Single, Single, Double, Aromatic],
        }
    }
}

/// Connected molecule: a random spanning tree plus up to `rings` extra bonds.
pub fn random_molecule(rng: &mut impl Rng, spec: &RandomSpec) -> MolecularGraph {
    let n = rng.random_range(2..=spec.max_atoms);
    let atoms: Vec<AtomLabel> = (0..n)
        .map(|_| AtomLabel::new(spec.atoms[rng.random_range(0..spec.atoms.len())]).unwrap())
        .collect();
    let mut edges = Vec::new();
    for v in 1..n {
        let bond = spec.bonds[rng.random_range(0..spec.bonds.len())];
        edges.push((rng.random_range(0..v), v, bond));
    }
    for _ in 0..spec.rings {
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        let bond = spec.bonds[rng.random_range(0..spec.bonds.len())];
        if u != v && !edges.iter().any(|&(a, b, _)| (a, b) == (u, v) || (a, b) == (v, u)) {
            edges.push((u, v, bond));
        }
    }
    MolecularGraph::new("", atoms, edges).unwrap()
}

/// Dataset whose first two molecules are one active and one inactive; the
/// rest get a fair coin.
pub fn random_dataset_with(seed: u64, spec: &RandomSpec) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ds = LabeledDataset::empty(format!("random{seed}"));
    for i in 0..spec.molecules {
        let class = match i {
            0 => Class::Active,
            1 => Class::Inactive,
            _ if rng.random_bool(0.5) => Class::Active,
            _ => Class::Inactive,
        };
        ds.push(random_molecule(&mut rng, spec), class);
    }
    ds
}

pub fn random_dataset(seed: u64, molecules: usize, max_atoms: usize, rings: usize) -> LabeledDataset {
    random_dataset_with(seed, &RandomSpec::organic(molecules, max_atoms, rings))
}
