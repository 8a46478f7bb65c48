use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use molfrag_core::analyze::{correspondences, crop_by_score, features_per_molecule, intercorrelation};
use molfrag_core::encode::{encode_dataset, encode_hashed, FragmentVocabulary, HashParams, Provenance};
use molfrag_core::miner::{enumerate_restricted_paths, mine_threshold, mine_topk};
use molfrag_core::patterns::PatternLanguage;
use molfrag_testkit::fragments::{walk_strings, LanguageOracle, SmallGraph};
use molfrag_testkit::numeric::{correspondences_pairwise, phi};
use molfrag_testkit::random::random_dataset;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn vocab_of(patterns: &[molfrag_core::miner::ScoredPattern]) -> FragmentVocabulary {
    FragmentVocabulary::from_scored(patterns, Provenance::default())
}

fn as_bools(rows: &[FixedBitSet], width: usize) -> Vec<Vec<bool>> {
    rows.iter().map(|r| (0..width).map(|j| r.contains(j)).collect()).collect()
}

#[test]
fn fingerprint_bits_match_brute_force_occurrence() {
    for seed in 0..6 {
        let ds = random_dataset(seed, 10, 7, 2);
        for language in PatternLanguage::ALL {
            let oracle = LanguageOracle::new(&ds, language.name());
            let mined = mine_threshold(&ds, language, 0.0).unwrap();
            let vocab = vocab_of(&mined);
            let rows = encode_dataset(&ds, &vocab);
            for (j, sp) in mined.iter().enumerate() {
                let hit = oracle.find(&SmallGraph::from_molecule(&sp.pattern.to_graph()));
                assert_eq!(hit.len(), 1);
                let class = &oracle.classes[hit[0]];
                for (i, row) in rows.iter().enumerate() {
                    assert_eq!(row.contains(j), class.molecules.contains(&i), "{} in molecule {i}", sp.code());
                }
            }
        }
    }
}

#[test]
fn correspondences_match_pairwise_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let width = rng.random_range(1..8);
        let rows: Vec<FixedBitSet> = (0..50)
            .map(|_| {
                let mut b = FixedBitSet::with_capacity(width);
                for j in 0..width {
                    if rng.random_bool(0.3) {
                        b.insert(j);
                    }
                }
                b
            })
            .collect();
        let ds = random_dataset(rng.random(), 50, 3, 0);
        let active: Vec<bool> = ds.labels().iter().map(|c| c.is_active()).collect();
        let report = correspondences(&rows, ds.labels());
        assert_eq!(report.pair_count, correspondences_pairwise(&as_bools(&rows, width), &active));
        let bools = as_bools(&rows, width);
        let involved = (0..50)
            .filter(|&i| (0..50).any(|j| active[i] != active[j] && bools[i] == bools[j]))
            .count();
        assert_eq!(report.involved_molecules, involved);
        assert_eq!(report.zero_vector_count, rows.iter().filter(|r| r.is_clear()).count());
    }
}

#[test]
fn larger_vocabularies_never_add_correspondences() {
    for run in 0..20 {
        let ds = random_dataset(100 + run, 40, 8, 1);
        let language = PatternLanguage::ALL[run as usize % 3];
        let all = mine_topk(&ds, language, 60).unwrap();
        let mut previous = usize::MAX;
        for size in [0, 1, 2, 5, 10, 20, 40, 60] {
            let vocab = vocab_of(&all[..size.min(all.len())]);
            let rows = encode_dataset(&ds, &vocab);
            let pairs = correspondences(&rows, ds.labels()).pair_count;
            assert!(pairs <= previous, "run {run}: {pairs} > {previous} at size {size}");
            previous = pairs;
            for k in [16, 64, 256] {
                let params = HashParams::new(k, run);
                let hashed: Vec<FixedBitSet> = ds.molecules().iter().map(|m| encode_hashed(m, &vocab, &params)).collect();
                assert!(correspondences(&hashed, ds.labels()).pair_count >= pairs, "run {run} k={k}");
            }
        }
    }
}

#[test]
fn intercorrelation_matches_phi() {
    let ds = random_dataset(7, 30, 8, 1);
    let mined = mine_topk(&ds, PatternLanguage::Graph, 25).unwrap();
    let vocab = vocab_of(&mined);
    let rows = encode_dataset(&ds, &vocab);
    let m = vocab.len().min(20);
    let matrix = intercorrelation(&rows, m);
    let cols: Vec<Vec<bool>> = (0..m).map(|j| rows.iter().map(|r| r.contains(j)).collect()).collect();
    for i in 0..m {
        for j in 0..m {
            let expected = phi(&cols[i], &cols[j]);
            assert!((matrix.get(i, j) - expected).abs() < 1e-12, "({i},{j})");
            assert_eq!(matrix.get(i, j), matrix.get(j, i));
        }
    }
    let direct = rows.iter().map(|r| r.count_ones(..)).sum::<usize>() as f64 / rows.len() as f64;
    assert!((features_per_molecule(&rows) - direct).abs() < 1e-12);
}

#[test]
fn crop_keeps_exactly_the_scores_above_the_floor() {
    let ds = random_dataset(8, 30, 8, 1);
    let graphs = mine_topk(&ds, PatternLanguage::Graph, 20).unwrap();
    let floor = graphs.last().unwrap().chi2;
    let sequences = mine_topk(&ds, PatternLanguage::Sequence, 20).unwrap();
    let cropped = crop_by_score(&sequences, floor);
    assert_eq!(cropped.len(), sequences.iter().filter(|p| p.chi2 >= floor).count());
    assert!(cropped.iter().zip(&sequences).all(|(a, b)| a == b));
}

fn split_walk(code: &str) -> (String, String) {
    let body = code.strip_prefix("W:").expect("walk code");
    let mut tokens = Vec::new();
    let mut atom = String::new();
    for ch in body.chars() {
        if "-=#:".contains(ch) {
            tokens.push(std::mem::take(&mut atom));
            tokens.push(ch.to_string());
        } else {
            atom.push(ch);
        }
    }
    tokens.push(atom);
    let fwd = tokens.concat();
    let rev = tokens.iter().rev().cloned().collect::<Vec<_>>().concat();
    if fwd <= rev {
        (fwd, rev)
    } else {
        (rev, fwd)
    }
}

#[test]
fn restricted_paths_match_walk_enumeration() {
    for seed in 0..8 {
        let ds = random_dataset(200 + seed, 15, 8, 2);
        for (max_bonds, min_freq) in [(1, 1), (3, 1), (6, 1), (6, 3)] {
            let mut support: BTreeMap<(String, String), (usize, usize)> = BTreeMap::new();
            for (i, m) in ds.molecules().iter().enumerate() {
                for s in walk_strings(m, max_bonds) {
                    let e = support.entry(s).or_default();
                    if ds.label(i).is_active() {
                        e.0 += 1;
                    } else {
                        e.1 += 1;
                    }
                }
            }
            support.retain(|_, (p, n)| *p + *n >= min_freq);
            let mined = enumerate_restricted_paths(&ds, max_bonds, min_freq).unwrap();
            assert_eq!(mined.len(), support.len(), "seed {seed} L={max_bonds} f={min_freq}");
            for sp in &mined {
                let key = split_walk(sp.code());
                assert_eq!(support.get(&key), Some(&(sp.table.p, sp.table.n)), "{}", sp.code());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hashed_fingerprints_are_folds_of_the_generalized_one(seed in 0u64..1000, k in 1usize..300, b in 1usize..4) {
        let ds = random_dataset(seed, 12, 7, 1);
        let mined = mine_topk(&ds, PatternLanguage::Tree, 30).unwrap();
        let vocab = vocab_of(&mined);
        let rows = encode_dataset(&ds, &vocab);
        let params = HashParams { k, b, seed };
        for (m, gfp) in ds.molecules().iter().zip(&rows) {
            let hashed = encode_hashed(m, &vocab, &params);
            prop_assert_eq!(hashed.len(), k);
            prop_assert!(hashed.count_ones(..) <= b * gfp.count_ones(..));
            prop_assert_eq!(hashed.is_clear(), gfp.is_clear());
        }
    }
}
