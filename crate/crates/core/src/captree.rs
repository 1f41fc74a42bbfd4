//! CAP-tree construction: two dataset scans building a prefix tree whose
//! nodes carry per-class frequency arrays, with frequent items ordered by
//! decreasing information gain, plus a header table and the conditional
//! projection used during rule extraction.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::dataset::{Dataset, Dictionary, ItemId};
use crate::error::{Error, Result};
use crate::measures::{ig_item, FreqArray};

/// Number of transactions an itemset must reach to count as frequent.
pub(crate) fn support_count_threshold(minsup: f64, n: u64) -> u64 {
    (minsup * n as f64).ceil() as u64
}

/// One row of the frequent-item list L: an item, its global class
/// frequencies and its information gain.
#[derive(Debug, Clone)]
pub struct CapListEntry {
    pub item: ItemId,
    pub freqs: FreqArray,
    pub ig: f64,
}

/// Collects the ordered frequent-item list L: items whose support count
/// reaches ceil(minsup * |D|) and whose information gain is strictly
/// positive, sorted by decreasing gain. Ties break on ascending item
/// display string, then id.
pub fn build_caplist(d: &Dataset, minsup: f64) -> Result<Vec<CapListEntry>> {
    if !(minsup > 0.0 && minsup <= 1.0) {
        return Err(Error::invalid(format!(
            "minsup must be in (0, 1], got {minsup}"
        )));
    }
    if d.is_empty() {
        return Err(Error::invalid("cannot build a CAP list from an empty dataset"));
    }
    let n_classes = d.n_classes();
    let mut item_freqs: HashMap<ItemId, FreqArray> = HashMap::new();
    for t in d.transactions() {
        let label = t
            .label()
            .ok_or_else(|| Error::invalid("training transactions must be labeled"))?;
        for &item in t.items() {
            item_freqs
                .entry(item)
                .or_insert_with(|| FreqArray::zeros(n_classes))
                .increment(label);
        }
    }
    let dataset_freqs = d.dataset_freqs();
    let threshold = support_count_threshold(minsup, d.len() as u64);

    let mut entries: Vec<CapListEntry> = Vec::new();
    for (item, freqs) in item_freqs {
        if freqs.total() < threshold {
            continue;
        }
        let ig = ig_item(&freqs, &dataset_freqs)?;
        if ig > 0.0 {
            entries.push(CapListEntry { item, freqs, ig });
        }
    }
    entries.sort_by(|a, b| {
        b.ig
            .total_cmp(&a.ig)
            .then_with(|| d.items().display(a.item.0).cmp(d.items().display(b.item.0)))
            .then_with(|| a.item.cmp(&b.item))
    });
    Ok(entries)
}

#[derive(Debug, Clone)]
struct CapNode {
    item: Option<ItemId>,
    freqs: FreqArray,
    parent: usize,
    /// Child node indices, kept ordered by ascending rank in L.
    children: Vec<usize>,
}

/// Header table row: an item, the summed frequencies of all tree nodes
/// carrying it, and the chain of those nodes.
#[derive(Debug, Clone)]
pub struct HeaderEntry {
    item: ItemId,
    freqs: FreqArray,
    nodes: Vec<usize>,
}

impl HeaderEntry {
    pub fn item(&self) -> ItemId {
        self.item
    }

    pub fn freqs(&self) -> &FreqArray {
        &self.freqs
    }
}

/// Prefix tree over IG-ordered frequent items with per-class frequency
/// arrays on every node. Immutable once built; projection produces an
/// independent tree.
#[derive(Debug, Clone)]
pub struct CapTree {
    nodes: Vec<CapNode>,
    header: Vec<HeaderEntry>,
    rank: Arc<HashMap<ItemId, usize>>,
    total_count: u64,
    dataset_freqs: FreqArray,
}

const ROOT: usize = 0;

impl CapTree {
    fn empty(n_classes: usize, rank: Arc<HashMap<ItemId, usize>>) -> Self {
        CapTree {
            nodes: vec![CapNode {
                item: None,
                freqs: FreqArray::zeros(n_classes),
                parent: ROOT,
                children: Vec::new(),
            }],
            header: Vec::new(),
            rank,
            total_count: 0,
            dataset_freqs: FreqArray::zeros(n_classes),
        }
    }

    /// Transactions seen by the first scan (not just those inserted).
    pub fn total_count(&self) -> u64 {
        self.total_count
    }

    /// Global class frequencies from the first scan.
    pub fn dataset_freqs(&self) -> &FreqArray {
        &self.dataset_freqs
    }

    pub fn root_freqs(&self) -> &FreqArray {
        &self.nodes[ROOT].freqs
    }

    /// Header rows in L order (only items carried by at least one node).
    pub fn header(&self) -> &[HeaderEntry] {
        &self.header
    }

    pub fn header_entry(&self, item: ItemId) -> Option<&HeaderEntry> {
        self.header.iter().find(|e| e.item == item)
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Indices of the root's children, in L-rank order. Node indices are
    /// only meaningful against the tree that produced them.
    pub fn root_children(&self) -> &[usize] {
        &self.nodes[ROOT].children
    }

    pub fn children_of(&self, node: usize) -> &[usize] {
        &self.nodes[node].children
    }

    pub fn freqs_of(&self, node: usize) -> &FreqArray {
        &self.nodes[node].freqs
    }

    pub fn item_of(&self, node: usize) -> Option<ItemId> {
        self.nodes[node].item
    }

    pub fn parent_freqs_of(&self, node: usize) -> &FreqArray {
        let parent = self.nodes[node].parent;
        if parent == ROOT {
            // The root stands for the whole dataset seen in pass one.
            &self.dataset_freqs
        } else {
            &self.nodes[parent].freqs
        }
    }

    /// Items on the path from `node` up to the root, deepest first.
    pub fn path_items(&self, node: usize) -> Vec<ItemId> {
        let mut path = Vec::new();
        let mut cur = node;
        while let Some(item) = self.nodes[cur].item {
            path.push(item);
            cur = self.nodes[cur].parent;
        }
        path
    }

    fn rank_of(&self, item: ItemId) -> usize {
        self.rank[&item]
    }

    /// Descends from the root along `path` (items in ascending L rank),
    /// creating nodes as needed, and adds `freqs` to the root and every
    /// node on the path. Returns nothing; used by build and projection.
    fn insert_path(&mut self, path: &[ItemId], freqs: &FreqArray) {
        self.nodes[ROOT].freqs.add(freqs);
        let mut cur = ROOT;
        for &item in path {
            let rank = self.rank_of(item);
            let pos = self.nodes[cur]
                .children
                .binary_search_by_key(&rank, |&c| self.rank_of(self.nodes[c].item.unwrap()));
            let child = match pos {
                Ok(found) => self.nodes[cur].children[found],
                Err(insert_at) => {
                    let idx = self.nodes.len();
                    self.nodes.push(CapNode {
                        item: Some(item),
                        freqs: FreqArray::zeros(freqs.n_classes()),
                        parent: cur,
                        children: Vec::new(),
                    });
                    self.nodes[cur].children.insert(insert_at, idx);
                    idx
                }
            };
            self.nodes[child].freqs.add(freqs);
            cur = child;
        }
    }

    /// Rebuilds the header table from the current nodes: one row per item
    /// in L-rank order, chained in node-creation order.
    fn rebuild_header(&mut self) {
        let mut by_item: HashMap<ItemId, (FreqArray, Vec<usize>)> = HashMap::new();
        for (idx, node) in self.nodes.iter().enumerate() {
            if let Some(item) = node.item {
                let entry = by_item
                    .entry(item)
                    .or_insert_with(|| (FreqArray::zeros(node.freqs.n_classes()), Vec::new()));
                entry.0.add(&node.freqs);
                entry.1.push(idx);
            }
        }
        let mut header: Vec<HeaderEntry> = by_item
            .into_iter()
            .map(|(item, (freqs, nodes))| HeaderEntry { item, freqs, nodes })
            .collect();
        header.sort_by_key(|e| self.rank[&e.item]);
        self.header = header;
    }

    /// Conditional tree for `item`: the prefix paths above every node
    /// carrying `item`, re-weighted by those nodes' frequency arrays. The
    /// resulting root holds the exact class frequencies of `item` within
    /// this tree, so projecting on every member of an itemset in sequence
    /// (deepest rank first) leaves the itemset's frequencies on the root.
    pub fn project(&self, item: ItemId) -> Result<CapTree> {
        let entry = self
            .header_entry(item)
            .ok_or_else(|| Error::invalid(format!("item id {} not in header table", item.0)))?;

        let mut out = CapTree::empty(self.dataset_freqs.n_classes(), self.rank.clone());
        for &node in &entry.nodes {
            let freqs = self.nodes[node].freqs.clone();
            let mut prefix = Vec::new();
            let mut cur = self.nodes[node].parent;
            while let Some(it) = self.nodes[cur].item {
                prefix.push(it);
                cur = self.nodes[cur].parent;
            }
            prefix.reverse();
            out.insert_path(&prefix, &freqs);
        }
        out.rebuild_header();
        out.total_count = out.nodes[ROOT].freqs.total();
        out.dataset_freqs = out.nodes[ROOT].freqs.clone();
        Ok(out)
    }

    /// Indented debug dump: one `item [c0,c1,...]` line per node, children
    /// in L-rank order. The root prints as `root`.
    pub fn dump(&self, items: &Dictionary) -> String {
        let mut out = String::new();
        self.dump_node(ROOT, 0, items, &mut out);
        out
    }

    fn dump_node(&self, node: usize, depth: usize, items: &Dictionary, out: &mut String) {
        let name = match self.nodes[node].item {
            Some(item) => items.display(item.0),
            None => "root",
        };
        let counts: Vec<String> = self.nodes[node]
            .freqs
            .counts()
            .iter()
            .map(|c| c.to_string())
            .collect();
        let _ = writeln!(out, "{}{} [{}]", "  ".repeat(depth), name, counts.join(","));
        for &child in &self.nodes[node].children {
            self.dump_node(child, depth + 1, items, out);
        }
    }
}

/// Builds the CAP-tree for a labeled dataset: the first scan collects the
/// frequent-item list L and the global class frequencies, the second scan
/// inserts every transaction's L-filtered, L-ordered item sequence.
/// Transactions with no frequent item are counted in pass one but insert
/// nothing.
pub fn build_captree(d: &Dataset, minsup: f64) -> Result<CapTree> {
    let caplist = build_caplist(d, minsup)?;

    let rank: HashMap<ItemId, usize> = caplist
        .iter()
        .enumerate()
        .map(|(i, e)| (e.item, i))
        .collect();
    let mut tree = CapTree::empty(d.n_classes(), Arc::new(rank));
    tree.total_count = d.len() as u64;
    tree.dataset_freqs = d.dataset_freqs();

    for t in d.transactions() {
        let label = t.label().expect("checked by build_caplist");
        let mut filtered: Vec<ItemId> = t
            .items()
            .iter()
            .copied()
            .filter(|item| tree.rank.contains_key(item))
            .collect();
        if filtered.is_empty() {
            continue;
        }
        filtered.sort_by_key(|item| tree.rank[item]);
        let mut single = FreqArray::zeros(d.n_classes());
        single.increment(label);
        tree.insert_path(&filtered, &single);
    }
    tree.rebuild_header();
    // Header rows carry the pass-one global frequencies; for a full build
    // they equal the chained sums, asserted in tests.
    Ok(tree)
}
