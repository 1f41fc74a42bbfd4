//! Dataset fixtures and synthetic generators shared by the integration
//! and acceptance suites.
#![allow(dead_code)]

use capmine::dataset::{Dataset, DatasetBuilder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The six-transaction binary toy dataset over items A..E.
pub fn table1() -> Dataset {
    let mut b = DatasetBuilder::new();
    b.add(&["A", "B", "D", "E"], "+");
    b.add(&["B", "C", "E"], "-");
    b.add(&["A", "B", "D", "E"], "+");
    b.add(&["A", "B", "C", "E"], "-");
    b.add(&["A", "B", "C", "D", "E"], "+");
    b.add(&["B", "C", "D"], "-");
    b.build()
}

/// Small random binary dataset: up to `max_items` distinct items and up to
/// `max_txn` transactions, suitable for exhaustive cross-checks.
pub fn random_small_dataset(rng: &mut ChaCha8Rng, max_items: usize, max_txn: usize) -> Dataset {
    let n_items = rng.gen_range(3..=max_items);
    let n_txn = rng.gen_range(6..=max_txn);
    let names: Vec<String> = (0..n_items).map(|i| format!("i{i}")).collect();
    let mut b = DatasetBuilder::new();
    for _ in 0..n_txn {
        let mut items: Vec<&str> = Vec::new();
        for name in &names {
            if rng.gen_bool(0.4) {
                items.push(name);
            }
        }
        if items.is_empty() {
            items.push(&names[0]);
        }
        b.add(&items, if rng.gen_bool(0.5) { "+" } else { "-" });
    }
    b.build()
}

/// Categorical dataset with `n_features` columns and a couple of mildly
/// label-correlated features, so that extraction finds a non-trivial rule
/// set at low support.
pub fn synthetic_categorical(rows: usize, n_features: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = DatasetBuilder::new();
    for _ in 0..rows {
        let label = rng.gen_bool(0.5);
        let mut items: Vec<String> = Vec::new();
        for f in 0..n_features {
            let v = if f < 2 {
                // Two skewed features: value distribution depends on the label.
                if rng.gen_bool(0.7) {
                    if label {
                        rng.gen_range(0..3)
                    } else {
                        rng.gen_range(2..5)
                    }
                } else {
                    rng.gen_range(0..5)
                }
            } else {
                rng.gen_range(0..5)
            };
            items.push(format!("f{f}=v{v}"));
        }
        let refs: Vec<&str> = items.iter().map(String::as_str).collect();
        b.add(&refs, if label { "+" } else { "-" });
    }
    b.build()
}

/// Rule-planted binary dataset: three signature items decide the class of
/// nine rows out of ten; the remaining tenth is pure noise (random label,
/// no signature). Every row also carries uninformative noise features.
pub fn rule_planted(rows: usize, noise_fraction: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = DatasetBuilder::new();
    for _ in 0..rows {
        let label = rng.gen_bool(0.5);
        let mut items: Vec<String> = Vec::new();
        if !rng.gen_bool(noise_fraction) {
            // Planted signal: s1 marks the positive class, s0 the negative,
            // s2 a second weaker positive marker.
            if label {
                items.push("s1".to_string());
                if rng.gen_bool(0.4) {
                    items.push("s2".to_string());
                }
            } else {
                items.push("s0".to_string());
            }
        }
        for f in 0..4 {
            items.push(format!("n{f}=v{}", rng.gen_range(0..6)));
        }
        let refs: Vec<&str> = items.iter().map(String::as_str).collect();
        b.add(&refs, if label { "+" } else { "-" });
    }
    b.build()
}

/// Same transactions, labels randomly permuted: no item carries signal.
pub fn shuffle_labels(d: &Dataset, seed: u64) -> Dataset {
    use rand::seq::SliceRandom;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<&str> = d
        .transactions()
        .iter()
        .map(|t| d.labels().display(t.label().unwrap().0))
        .collect();
    labels.shuffle(&mut rng);
    let mut b = DatasetBuilder::new();
    for (t, label) in d.transactions().iter().zip(labels) {
        let items: Vec<&str> = t.items().iter().map(|i| d.items().display(i.0)).collect();
        b.add(&items, label);
    }
    b.build()
}
