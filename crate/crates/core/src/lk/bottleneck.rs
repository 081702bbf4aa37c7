//! Cluster (bottleneck) distances: for every pair of cities, the smallest
//! possible value of the heaviest edge over all paths joining them.
//!
//! In a complete graph this is the heaviest edge on the path between the two
//! cities in a minimum spanning tree, so one Prim pass plus one tree walk per
//! source gives the whole matrix in O(n^2).

use crate::instance::DistanceMatrix;

#[derive(Debug, Clone)]
pub struct ClusterDistanceMatrix {
    inner: DistanceMatrix,
}

impl ClusterDistanceMatrix {
    #[inline]
    pub fn get(&self, v: usize, w: usize) -> f64 {
        self.inner.get(v, w)
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }
}

/// Minimum spanning tree of the complete graph, as an adjacency list.
/// Ties are resolved towards the lower city index.
pub fn minimum_spanning_tree(dist: &DistanceMatrix) -> Vec<Vec<(usize, f64)>> {
    let n = dist.len();
    let mut adj = vec![Vec::new(); n];
    if n == 0 {
        return adj;
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    best[0] = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        let mut bu = f64::INFINITY;
        for v in 0..n {
            if !in_tree[v] && (u == usize::MAX || best[v] < bu) {
                u = v;
                bu = best[v];
            }
        }
        in_tree[u] = true;
        if parent[u] != usize::MAX {
            let p = parent[u];
            let w = dist.get(p, u);
            adj[p].push((u, w));
            adj[u].push((p, w));
        }
        let row = dist.row(u);
        for v in 0..n {
            if !in_tree[v] && row[v] < best[v] {
                best[v] = row[v];
                parent[v] = u;
            }
        }
    }
    adj
}

pub fn cluster_distances(dist: &DistanceMatrix) -> ClusterDistanceMatrix {
    let n = dist.len();
    let tree = minimum_spanning_tree(dist);
    let mut data = vec![0.0; n * n];
    let mut stack = Vec::with_capacity(n);
    for src in 0..n {
        let row = &mut data[src * n..(src + 1) * n];
        let mut seen = vec![false; n];
        seen[src] = true;
        stack.push((src, 0.0f64));
        while let Some((u, bottleneck)) = stack.pop() {
            row[u] = bottleneck;
            for &(v, w) in &tree[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push((v, bottleneck.max(w)));
                }
            }
        }
    }
    ClusterDistanceMatrix {
        inner: DistanceMatrix::from_raw(n, data),
    }
}
