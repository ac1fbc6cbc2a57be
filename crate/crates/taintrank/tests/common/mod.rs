//! Naive reference implementations used to cross-check the library.
//!
//! Everything here recomputes results from a plain edge list with the
//! simplest algorithm available (fixpoint loops, no CSR, no BFS queues).
//! Accumulation order over in-edges is ascending source id and term
//! arithmetic matches the library's documented expressions, so score
//! comparisons can demand exact equality, not tolerances.

#![allow(dead_code)]

/// A graph as nothing but deduplicated directed weighted edges.
#[derive(Debug, Clone)]
pub struct RefGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, u64)>,
}

impl RefGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize, u64)>) -> Self {
        for &(s, d, w) in &edges {
            assert!(s < n && d < n && s != d && w > 0);
        }
        RefGraph { n, edges }
    }

    /// In-edges of every node as (source, weight), ascending source id.
    pub fn in_adj(&self) -> Vec<Vec<(usize, u64)>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(s, d, w) in &self.edges {
            adj[d].push((s, w));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn out_value(&self, i: usize) -> u64 {
        self.edges.iter().filter(|&&(s, _, _)| s == i).map(|&(_, _, w)| w).sum()
    }
}

/// Forward closure of `root` by fixpoint iteration over the edge list.
pub fn ref_reachable(g: &RefGraph, root: usize) -> Vec<bool> {
    let mut reach = vec![false; g.n];
    reach[root] = true;
    loop {
        let mut changed = false;
        for &(s, d, _) in &g.edges {
            if reach[s] && !reach[d] {
                reach[d] = true;
                changed = true;
            }
        }
        if !changed {
            return reach;
        }
    }
}

/// Hop distances from `root` by edge relaxation until fixpoint.
pub fn ref_distances(g: &RefGraph, root: usize) -> Vec<Option<u32>> {
    let mut dist: Vec<Option<u32>> = vec![None; g.n];
    dist[root] = Some(0);
    loop {
        let mut changed = false;
        for &(s, d, _) in &g.edges {
            if let Some(ds) = dist[s] {
                let cand = ds + 1;
                if dist[d].is_none_or(|old| cand < old) {
                    dist[d] = Some(cand);
                    changed = true;
                }
            }
        }
        if !changed {
            return dist;
        }
    }
}

/// Nodes grouped by hop distance, ascending id inside each group.
pub fn ref_levels(dist: &[Option<u32>]) -> Vec<Vec<usize>> {
    let max = dist.iter().flatten().copied().max().unwrap_or(0);
    let mut levels = vec![Vec::new(); max as usize + 1];
    for (i, d) in dist.iter().enumerate() {
        if let Some(d) = d {
            levels[*d as usize].push(i);
        }
    }
    levels
}

/// Level-ordered sweeps with whole-level commits: every node in a level is
/// recomputed from the scores as they stood when the level began, then the
/// level is written back at once. Level 0 (the root) is never recomputed.
fn ref_sweep<F>(g: &RefGraph, root: usize, sweeps: u32, term: F) -> (Vec<f64>, Vec<bool>)
where
    F: Fn(&[f64], usize, u64, usize) -> f64,
{
    let reach = ref_reachable(g, root);
    let dist = ref_distances(g, root);
    let levels = ref_levels(&dist);
    let adj = g.in_adj();
    let mut scores = vec![0.0; g.n];
    scores[root] = 1.0;
    for _ in 0..sweeps {
        for level in levels.iter().skip(1) {
            let snapshot = scores.clone();
            for &i in level {
                let mut acc = 0.0;
                for &(j, w) in &adj[i] {
                    if reach[j] {
                        acc += term(&snapshot, j, w, i);
                    }
                }
                scores[i] = acc;
            }
        }
    }
    (scores, reach)
}

pub fn ref_fixed(g: &RefGraph, root: usize) -> Vec<f64> {
    ref_reachable(g, root).into_iter().map(|r| if r { 1.0 } else { 0.0 }).collect()
}

/// Value-proportional spread. `out_mode` selects whether a spender's value
/// is its total out-weight or its reachable-side in-weight.
pub fn ref_weight(g: &RefGraph, root: usize, out_mode: bool, sweeps: u32) -> Vec<f64> {
    let reach = ref_reachable(g, root);
    let mut value = vec![0u64; g.n];
    for &(s, d, w) in &g.edges {
        if out_mode {
            if reach[s] {
                value[s] += w;
            }
        } else if reach[d] && reach[s] {
            value[d] += w;
        }
    }
    let (scores, _) = ref_sweep(g, root, sweeps, |t, j, w, _| {
        let v = value[j];
        if v == 0 {
            0.0
        } else {
            t[j] * w as f64 / v as f64
        }
    });
    scores
}

pub fn ref_distance_method(g: &RefGraph, root: usize, sweeps: u32) -> Vec<f64> {
    let dist = ref_distances(g, root);
    let dist_f: Vec<f64> = dist.iter().map(|d| d.map_or(0.0, |d| d as f64)).collect();
    let (scores, _) = ref_sweep(g, root, sweeps, |t, j, _, i| t[j] / dist_f[i]);
    scores
}

pub fn ref_combined(g: &RefGraph, root: usize, average: bool, sweeps: u32) -> Vec<f64> {
    let a = ref_distance_method(g, root, sweeps);
    let b = ref_weight(g, root, true, sweeps);
    a.iter()
        .zip(&b)
        .map(|(&a, &b)| if average { (a + b) / 2.0 } else { a.max(b) })
        .collect()
}

/// Degree-ratio iteration. An edge is tainted when its source is in the
/// root's forward closure; scores start at the tainted fraction of each
/// node's in-edges and every round replaces a score with the sum over
/// in-edges of `score / tainted out-degree of the source`.
pub fn ref_pagerank(g: &RefGraph, root: usize, iterations: u32) -> Vec<f64> {
    let reach = ref_reachable(g, root);
    let adj = g.in_adj();
    let mut in_deg = vec![0usize; g.n];
    let mut tainted_in = vec![0usize; g.n];
    let mut tainted_out = vec![0usize; g.n];
    for &(s, d, _) in &g.edges {
        in_deg[d] += 1;
        if reach[s] {
            tainted_in[d] += 1;
            tainted_out[s] += 1;
        }
    }
    let mut t: Vec<f64> = (0..g.n)
        .map(|i| if in_deg[i] == 0 { 0.0 } else { tainted_in[i] as f64 / in_deg[i] as f64 })
        .collect();
    for _ in 0..iterations {
        let mut next = vec![0.0; g.n];
        for (i, slot) in next.iter_mut().enumerate() {
            let mut acc = 0.0;
            for &(j, _) in &adj[i] {
                let k = tainted_out[j];
                if k > 0 {
                    acc += t[j] / k as f64;
                }
            }
            *slot = acc;
        }
        t = next;
    }
    t
}
