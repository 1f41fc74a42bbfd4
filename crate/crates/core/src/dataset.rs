//! Transactional and tabular dataset ingestion, item interning, bagging
//! partitions and class rebalancing.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::measures::FreqArray;

/// Dense id of an interned categorical item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(pub u32);

/// Dense id of a class label, contiguous in [0, C).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassId(pub u32);

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Bijective mapping between token strings and dense integer ids.
#[derive(Debug, Clone, Default)]
pub struct Dictionary {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

impl Dictionary {
    pub fn new() -> Self {
        Dictionary::default()
    }

    pub fn intern(&mut self, token: &str) -> u32 {
        if let Some(&id) = self.index.get(token) {
            return id;
        }
        let id = self.tokens.len() as u32;
        self.tokens.push(token.to_string());
        self.index.insert(token.to_string(), id);
        id
    }

    pub fn lookup(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn display(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// A duplicate-free set of item ids plus an optional class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    items: Vec<ItemId>,
    label: Option<ClassId>,
}

impl Transaction {
    /// Builds a transaction from raw ids; duplicates collapse, order is
    /// normalized to ascending id.
    pub fn new(mut items: Vec<ItemId>, label: Option<ClassId>) -> Self {
        items.sort_unstable();
        items.dedup();
        Transaction { items, label }
    }

    /// Item ids in ascending order.
    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    pub fn label(&self) -> Option<ClassId> {
        self.label
    }

    pub fn contains(&self, item: ItemId) -> bool {
        self.items.binary_search(&item).is_ok()
    }

    /// True when every id in `itemset` (sorted ascending) occurs here.
    pub fn contains_all(&self, itemset: &[ItemId]) -> bool {
        let mut own = self.items.iter();
        'outer: for want in itemset {
            for have in own.by_ref() {
                if have == want {
                    continue 'outer;
                }
                if have > want {
                    return false;
                }
            }
            return false;
        }
        true
    }
}

/// An immutable collection of transactions with shared item and label
/// dictionaries. Cheap to clone; partitions share the dictionaries.
#[derive(Debug, Clone)]
pub struct Dataset {
    transactions: Vec<Transaction>,
    items: Arc<Dictionary>,
    labels: Arc<Dictionary>,
    class_counts: Vec<u64>,
}

impl Dataset {
    fn from_parts(
        transactions: Vec<Transaction>,
        items: Arc<Dictionary>,
        labels: Arc<Dictionary>,
    ) -> Self {
        let mut class_counts = vec![0u64; labels.len()];
        for t in &transactions {
            if let Some(label) = t.label {
                class_counts[label.0 as usize] += 1;
            }
        }
        Dataset {
            transactions,
            items,
            labels,
            class_counts,
        }
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn items(&self) -> &Arc<Dictionary> {
        &self.items
    }

    pub fn labels(&self) -> &Arc<Dictionary> {
        &self.labels
    }

    pub fn n_classes(&self) -> usize {
        self.labels.len()
    }

    pub fn class_counts(&self) -> &[u64] {
        &self.class_counts
    }

    /// Class counts as a frequency array over all labeled transactions.
    pub fn dataset_freqs(&self) -> FreqArray {
        FreqArray::from_counts(self.class_counts.clone())
    }

    /// Per-class priors over the labeled transactions.
    pub fn priors(&self) -> Vec<f64> {
        let total: u64 = self.class_counts.iter().sum();
        if total == 0 {
            return vec![0.0; self.class_counts.len()];
        }
        self.class_counts
            .iter()
            .map(|&c| c as f64 / total as f64)
            .collect()
    }

    /// Returns a dataset holding the transactions at `indices` (cloned),
    /// sharing this dataset's dictionaries.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let transactions = indices
            .iter()
            .map(|&i| self.transactions[i].clone())
            .collect();
        Dataset::from_parts(transactions, self.items.clone(), self.labels.clone())
    }

    /// Draws `n_partitions` independent samples of size round(ratio * |D|).
    ///
    /// Partition k is reproducible in isolation: it uses the sub-stream
    /// seeded with seed + k. With replacement every partition has exactly
    /// the same size; without replacement the size is capped at |D|.
    pub fn partition_sample(
        &self,
        n_partitions: usize,
        ratio: f64,
        seed: u64,
        with_replacement: bool,
    ) -> Result<Vec<Dataset>> {
        if n_partitions == 0 {
            return Err(Error::invalid("n_partitions must be positive"));
        }
        if !(ratio > 0.0 && ratio <= 1.0) {
            return Err(Error::invalid(format!(
                "sampling ratio must be in (0, 1], got {ratio}"
            )));
        }
        if self.is_empty() {
            return Err(Error::invalid("cannot sample an empty dataset"));
        }
        let size = (ratio * self.len() as f64).round() as usize;
        let mut partitions = Vec::with_capacity(n_partitions);
        for k in 0..n_partitions {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            let indices: Vec<usize> = if with_replacement {
                (0..size).map(|_| rng.gen_range(0..self.len())).collect()
            } else {
                let take = size.min(self.len());
                let mut idx = rand::seq::index::sample(&mut rng, self.len(), take).into_vec();
                idx.sort_unstable();
                idx
            };
            partitions.push(self.subset(&indices));
        }
        Ok(partitions)
    }

    /// Downsamples every class larger than the smallest one to the smallest
    /// class count, without replacement. Minority classes and the relative
    /// transaction order are untouched.
    pub fn balance_subsample(&self, seed: u64) -> Result<Dataset> {
        if let Some(missing) = self.class_counts.iter().position(|&c| c == 0) {
            return Err(Error::invalid(format!(
                "cannot balance: class '{}' has no transactions",
                self.labels.display(missing as u32)
            )));
        }
        if self.transactions.iter().any(|t| t.label.is_none()) {
            return Err(Error::invalid("cannot balance unlabeled transactions"));
        }
        let min_count = *self.class_counts.iter().min().unwrap() as usize;

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut keep: Vec<usize> = Vec::new();
        for (class, &count) in self.class_counts.iter().enumerate() {
            let members: Vec<usize> = self
                .transactions
                .iter()
                .enumerate()
                .filter(|(_, t)| t.label == Some(ClassId(class as u32)))
                .map(|(i, _)| i)
                .collect();
            if count as usize > min_count {
                let chosen = rand::seq::index::sample(&mut rng, members.len(), min_count);
                keep.extend(chosen.iter().map(|j| members[j]));
            } else {
                keep.extend(members);
            }
        }
        keep.sort_unstable();
        Ok(self.subset(&keep))
    }
}

/// In-memory dataset assembly; interning happens per added transaction.
#[derive(Debug, Default)]
pub struct DatasetBuilder {
    items: Dictionary,
    labels: Dictionary,
    transactions: Vec<Transaction>,
}

impl DatasetBuilder {
    pub fn new() -> Self {
        DatasetBuilder::default()
    }

    pub fn add(&mut self, items: &[&str], label: &str) -> &mut Self {
        let ids = items.iter().map(|t| ItemId(self.items.intern(t))).collect();
        let label = ClassId(self.labels.intern(label));
        self.transactions.push(Transaction::new(ids, Some(label)));
        self
    }

    pub fn add_unlabeled(&mut self, items: &[&str]) -> &mut Self {
        let ids = items.iter().map(|t| ItemId(self.items.intern(t))).collect();
        self.transactions.push(Transaction::new(ids, None));
        self
    }

    pub fn build(self) -> Dataset {
        Dataset::from_parts(
            self.transactions,
            Arc::new(self.items),
            Arc::new(self.labels),
        )
    }
}

/// Position of the label token on each line of a transaction file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelPosition {
    First,
    Last,
}

/// Loads a whitespace-separated transaction file: one transaction per line,
/// the label token first or last. Blank lines are skipped and duplicate
/// item tokens within a line collapse to one.
pub fn load_transactions(path: impl AsRef<Path>, label_position: LabelPosition) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Io(path.to_path_buf(), e))?;
    let reader = BufReader::new(file);

    let mut builder = DatasetBuilder::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Io(path.to_path_buf(), e))?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() < 2 {
            return Err(Error::parse(
                Some(path.to_path_buf()),
                lineno + 1,
                "expected at least one item token and a label token",
            ));
        }
        let (label, items) = match label_position {
            LabelPosition::First => (tokens[0], &tokens[1..]),
            LabelPosition::Last => (tokens[tokens.len() - 1], &tokens[..tokens.len() - 1]),
        };
        builder.add(items, label);
    }
    if builder.transactions.is_empty() {
        return Err(Error::invalid(format!(
            "{}: no transactions found",
            path.display()
        )));
    }
    Ok(builder.build())
}

/// Loads a separator-delimited tabular file. Each non-null cell of column i
/// becomes the item "col<i>=<value>"; cells equal to `null_token` produce no
/// item. The label column never produces an item. No quoting or escaping.
pub fn load_tabular(
    path: impl AsRef<Path>,
    separator: char,
    label_column: usize,
    null_token: &str,
) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Io(path.to_path_buf(), e))?;
    let reader = BufReader::new(file);

    let mut builder = DatasetBuilder::new();
    let mut width: Option<usize> = None;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Io(path.to_path_buf(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(separator).collect();
        match width {
            None => {
                if label_column >= cells.len() {
                    return Err(Error::parse(
                        Some(path.to_path_buf()),
                        lineno + 1,
                        format!(
                            "label column {} out of range for {} columns",
                            label_column,
                            cells.len()
                        ),
                    ));
                }
                width = Some(cells.len());
            }
            Some(w) if cells.len() != w => {
                return Err(Error::parse(
                    Some(path.to_path_buf()),
                    lineno + 1,
                    format!("expected {} columns, found {}", w, cells.len()),
                ));
            }
            _ => {}
        }
        let label = cells[label_column];
        if label == null_token {
            return Err(Error::parse(
                Some(path.to_path_buf()),
                lineno + 1,
                "label cell is null",
            ));
        }
        let items: Vec<String> = cells
            .iter()
            .enumerate()
            .filter(|&(i, cell)| i != label_column && *cell != null_token)
            .map(|(i, cell)| format!("col{}={}", i, cell))
            .collect();
        let item_refs: Vec<&str> = items.iter().map(String::as_str).collect();
        builder.add(&item_refs, label);
    }
    if builder.transactions.is_empty() {
        return Err(Error::invalid(format!(
            "{}: no rows found",
            path.display()
        )));
    }
    Ok(builder.build())
}
