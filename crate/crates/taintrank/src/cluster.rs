//! Address clustering by the common-input-ownership heuristic.
//!
//! All input addresses of one transaction are assumed to belong to the same
//! entity and are merged into one cluster; output addresses are never merged
//! by themselves. The resulting partition is independent of record order,
//! and each cluster is named by its lexicographically smallest address so
//! downstream output is byte-stable no matter how records were shuffled.

use std::collections::HashMap;

use crate::ingest::TransactionRecord;

struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new() -> Self {
        UnionFind { parent: Vec::new(), rank: Vec::new() }
    }

    fn push(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        self.rank.push(0);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (hi, lo) = if self.rank[ra as usize] >= self.rank[rb as usize] { (ra, rb) } else { (rb, ra) };
        self.parent[lo as usize] = hi;
        if self.rank[hi as usize] == self.rank[lo as usize] {
            self.rank[hi as usize] += 1;
        }
    }
}

/// Finished address partition. Immutable once built.
#[derive(Debug, Clone)]
pub struct ClusterMap {
    index: HashMap<String, u32>,
    labels: Vec<String>,
    rep: Vec<u32>,
    cluster_count: usize,
}

impl ClusterMap {
    /// Canonical name for the cluster holding `address`: the smallest
    /// address in the cluster. Addresses never seen as transaction inputs
    /// represent themselves.
    pub fn representative<'a>(&'a self, address: &'a str) -> &'a str {
        match self.index.get(address) {
            Some(&i) => self.labels[self.rep[i as usize] as usize].as_str(),
            None => address,
        }
    }

    pub fn contains(&self, address: &str) -> bool {
        self.index.contains_key(address)
    }

    /// Number of distinct input addresses tracked.
    pub fn address_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of clusters among tracked addresses.
    pub fn cluster_count(&self) -> usize {
        self.cluster_count
    }
}

/// Builds the co-spend partition over all input addresses in `records`.
pub fn cluster_inputs<'a, I>(records: I) -> ClusterMap
where
    I: IntoIterator<Item = &'a TransactionRecord>,
{
    let mut index: HashMap<String, u32> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut uf = UnionFind::new();

    for record in records {
        let mut first: Option<u32> = None;
        for entry in &record.inputs {
            let id = match index.get(entry.address.as_str()) {
                Some(&id) => id,
                None => {
                    let id = uf.push();
                    index.insert(entry.address.clone(), id);
                    labels.push(entry.address.clone());
                    id
                }
            };
            match first {
                Some(f) => uf.union(f, id),
                None => first = Some(id),
            }
        }
    }

    // Resolve every address to the smallest label in its cluster so the
    // representative does not depend on union order.
    let n = labels.len();
    let mut min_of_root: Vec<u32> = (0..n as u32).collect();
    for i in 0..n as u32 {
        let root = uf.find(i) as usize;
        if labels[i as usize] < labels[min_of_root[root] as usize] {
            min_of_root[root] = i;
        }
    }
    let mut rep = vec![0u32; n];
    let mut cluster_count = 0usize;
    for i in 0..n as u32 {
        let root = uf.find(i);
        if root == i {
            cluster_count += 1;
        }
        rep[i as usize] = min_of_root[root as usize];
    }

    ClusterMap { index, labels, rep, cluster_count }
}
