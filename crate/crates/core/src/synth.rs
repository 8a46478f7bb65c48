//! Synthetic labelled datasets with planted fragments.
//!
//! Each molecule is a random skeleton (a carbon-rich random tree, optionally
//! grown from a benzene ring, with occasional extra ring closures). Planted
//! fragments are inserted independently per molecule with a class-dependent
//! probability and bonded to a random skeleton atom by a single bond.
//! Output depends only on the spec, including the seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::molgraph::{
    parse_smiles, write_transactions, AtomLabel, BondLabel, Class, LabeledDataset, MolecularGraph, SmilesError,
};
use crate::patterns::{Pattern, PatternLanguage};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("planted fragment {smiles:?}: {source}")]
    Smiles { smiles: String, source: SmilesError },
    #[error("planted fragment {smiles:?} has {atoms} atoms, more than max_atoms = {max}")]
    FragmentTooLarge { smiles: String, atoms: usize, max: usize },
    #[error("invalid generator parameter: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantSpec {
    /// Fragment as SMILES; it must be connected.
    pub smiles: String,
    pub p_active: f64,
    pub p_inactive: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorSpec {
    pub name: String,
    pub molecules: usize,
    pub active_fraction: f64,
    /// Skeleton size range in heavy atoms, inclusive.
    pub min_atoms: usize,
    pub max_atoms: usize,
    /// Chance that a skeleton atom is N or O instead of C.
    pub hetero_probability: f64,
    /// Chance that a tree bond is double (between non-ring atoms).
    pub double_bond_probability: f64,
    /// Chance that the skeleton grows from a benzene ring.
    pub aromatic_ring_probability: f64,
    /// Chance of one extra single-bond ring closure.
    pub ring_closure_probability: f64,
    pub plants: Vec<PlantSpec>,
    pub seed: u64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            name: "synthetic".into(),
            molecules: 200,
            active_fraction: 0.5,
            min_atoms: 8,
            max_atoms: 16,
            hetero_probability: 0.15,
            double_bond_probability: 0.1,
            aromatic_ring_probability: 0.3,
            ring_closure_probability: 0.2,
            plants: Vec::new(),
            seed: 0,
        }
    }
}

/// Record of what was planted where.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenerationManifest {
    pub spec: GeneratorSpec,
    pub actives: usize,
    pub inactives: usize,
    pub plants: Vec<PlantRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlantRecord {
    pub smiles: String,
    /// Canonical codes of the fragment in each language it belongs to.
    pub sequence_code: Option<String>,
    pub tree_code: Option<String>,
    pub graph_code: String,
    /// Molecules the fragment was inserted into.
    pub molecules: Vec<usize>,
}

impl GeneratorSpec {
    fn validate(&self) -> Result<Vec<MolecularGraph>, SynthError> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(SynthError::Invalid(format!("{name} = {p} is not a probability")))
            }
        };
        prob("active_fraction", self.active_fraction)?;
        prob("hetero_probability", self.hetero_probability)?;
        prob("double_bond_probability", self.double_bond_probability)?;
        prob("aromatic_ring_probability", self.aromatic_ring_probability)?;
        prob("ring_closure_probability", self.ring_closure_probability)?;
        if self.min_atoms < 1 || self.min_atoms > self.max_atoms {
            return Err(SynthError::Invalid(format!(
                "atom range {}..={} is empty",
                self.min_atoms, self.max_atoms
            )));
        }
        if self.aromatic_ring_probability > 0.0 && self.max_atoms < 6 {
            return Err(SynthError::Invalid("aromatic rings need max_atoms >= 6".into()));
        }
        let mut fragments = Vec::new();
        for plant in &self.plants {
            prob("p_active", plant.p_active)?;
            prob("p_inactive", plant.p_inactive)?;
            let g = parse_smiles(&plant.smiles).map_err(|source| SynthError::Smiles {
                smiles: plant.smiles.clone(),
                source,
            })?;
            if g.num_atoms() > self.max_atoms {
                return Err(SynthError::FragmentTooLarge {
                    smiles: plant.smiles.clone(),
                    atoms: g.num_atoms(),
                    max: self.max_atoms,
                });
            }
            if g.num_edges() == 0 {
                return Err(SynthError::Invalid(format!("planted fragment {:?} has no bond", plant.smiles)));
            }
            fragments.push(g);
        }
        Ok(fragments)
    }
}

fn label(s: &str) -> AtomLabel {
    AtomLabel::new(s).expect("static label")
}

struct Builder {
    atoms: Vec<AtomLabel>,
    edges: Vec<(usize, usize, BondLabel)>,
    aromatic: Vec<bool>,
}

impl Builder {
    fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.iter().any(|&(a, b, _)| (a, b) == (u, v) || (a, b) == (v, u))
    }

    fn graft(&mut self, fragment: &MolecularGraph, anchor: usize, rng: &mut ChaCha8Rng) {
        let base = self.atoms.len();
        self.atoms.extend_from_slice(fragment.atoms());
        self.aromatic.extend(std::iter::repeat_n(false, fragment.num_atoms()));
        for e in fragment.edges() {
            self.edges.push((base + e.u, base + e.v, e.bond));
        }
        let at = base + rng.random_range(0..fragment.num_atoms());
        self.edges.push((anchor, at, BondLabel::Single));
    }
}

fn skeleton(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Builder {
    let size = rng.random_range(spec.min_atoms..=spec.max_atoms);
    let mut b = Builder {
        atoms: Vec::new(),
        edges: Vec::new(),
        aromatic: Vec::new(),
    };
    if size >= 6 && rng.random_bool(spec.aromatic_ring_probability) {
        for i in 0..6 {
            b.atoms.push(label("C"));
            b.aromatic.push(true);
            b.edges.push((i, (i + 1) % 6, BondLabel::Aromatic));
        }
    }
    while b.atoms.len() < size {
        let element = if rng.random_bool(spec.hetero_probability) {
            if rng.random_bool(0.5) {
                "N"
            } else {
                "O"
            }
        } else {
            "C"
        };
        let v = b.atoms.len();
        b.atoms.push(label(element));
        b.aromatic.push(false);
        if v > 0 {
            let u = rng.random_range(0..v);
            let bond = if !b.aromatic[u] && rng.random_bool(spec.double_bond_probability) {
                BondLabel::Double
            } else {
                BondLabel::Single
            };
            b.edges.push((u, v, bond));
        }
    }
    if b.atoms.len() >= 4 && rng.random_bool(spec.ring_closure_probability) {
        let u = rng.random_range(0..b.atoms.len());
        let v = rng.random_range(0..b.atoms.len());
        if u != v && !b.has_edge(u, v) && !(b.aromatic[u] && b.aromatic[v]) {
            b.edges.push((u, v, BondLabel::Single));
        }
    }
    b
}

fn codes(fragment: &MolecularGraph) -> (Option<String>, Option<String>, String) {
    let code = |language| Pattern::from_graph(language, fragment).ok().map(|p| p.code().to_string());
    (
        code(PatternLanguage::Sequence),
        code(PatternLanguage::Tree),
        code(PatternLanguage::Graph).expect("connected fragment"),
    )
}

/// Generates the dataset and the record of planted fragments.
pub fn generate(spec: &GeneratorSpec) -> Result<(LabeledDataset, GenerationManifest), SynthError> {
    let fragments = spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let actives = (spec.molecules as f64 * spec.active_fraction).round() as usize;
    let mut labels: Vec<Class> = (0..spec.molecules)
        .map(|i| if i < actives { Class::Active } else { Class::Inactive })
        .collect();
    labels.shuffle(&mut rng);

    let mut planted: Vec<Vec<usize>> = vec![Vec::new(); fragments.len()];
    let mut ds = LabeledDataset::empty(spec.name.clone());
    for (i, &class) in labels.iter().enumerate() {
        let mut b = skeleton(spec, &mut rng);
        let skeleton_size = b.atoms.len();
        for (f, (fragment, plant)) in fragments.iter().zip(&spec.plants).enumerate() {
            let p = if class.is_active() {
                plant.p_active
            } else {
                plant.p_inactive
            };
            if rng.random_bool(p) {
                let anchor = rng.random_range(0..skeleton_size);
                b.graft(fragment, anchor, &mut rng);
                planted[f].push(i);
            }
        }
        let mol = MolecularGraph::new(i.to_string(), b.atoms, b.edges).expect("generator builds simple graphs");
        ds.push(mol, class);
    }

    let plants = fragments
        .iter()
        .zip(&spec.plants)
        .zip(planted)
        .map(|((g, plant), molecules)| {
            let (sequence_code, tree_code, graph_code) = codes(g);
            PlantRecord {
                smiles: plant.smiles.clone(),
                sequence_code,
                tree_code,
                graph_code,
                molecules,
            }
        })
        .collect();
    let manifest = GenerationManifest {
        spec: spec.clone(),
        actives,
        inactives: spec.molecules - actives,
        plants,
    };
    Ok((ds, manifest))
}

/// Transaction text with a leading comment line naming the generator run.
pub fn to_transactions(dataset: &LabeledDataset, spec: &GeneratorSpec) -> String {
    format!(
        "# synthetic dataset {} seed={} molecules={}\n{}",
        spec.name,
        spec.seed,
        dataset.len(),
        write_transactions(dataset)
    )
}

/// Benchmark suite dataset: ten planted motifs, each only weakly
/// correlated with the class, so that no single fragment separates the
/// classes and larger vocabularies keep adding information. `index`
/// selects the dataset; the seed is derived from it.
pub fn planted_suite(index: usize, molecules: usize) -> GeneratorSpec {
    let plant = |smiles: &str, p_active: f64, p_inactive: f64| PlantSpec {
        smiles: smiles.into(),
        p_active,
        p_inactive,
    };
    GeneratorSpec {
        name: format!("suite{index}"),
        molecules,
        plants: vec![
            plant("CSC", 0.2, 0.08),
            plant("FC(F)C", 0.18, 0.08),
            plant("ClC=O", 0.15, 0.06),
            plant("BrCC", 0.08, 0.2),
            plant("NC(=S)N", 0.08, 0.18),
            plant("c1ccncc1", 0.22, 0.1),
            plant("CC#N", 0.1, 0.22),
            plant("PC", 0.16, 0.07),
            plant("OC(=O)C=C", 0.07, 0.16),
            plant("CCOC(C)=O", 0.2, 0.1),
        ],
        seed: 1000 + index as u64,
        ..GeneratorSpec::default()
    }
}
