//! Spanning trees and radiality.

use std::cmp::Ordering;
use std::collections::VecDeque;

use super::network::Network;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedEdge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

impl WeightedEdge {
    pub fn new(from: usize, to: usize, weight: f64) -> Self {
        Self { from, to, weight }
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        self.weight
            .total_cmp(&other.weight)
            .then(self.from.cmp(&other.from))
            .then(self.to.cmp(&other.to))
    }
}

/// Prim's algorithm from node 0. Returns the indices of the tree edges in
/// ascending order. Ties break on `(weight, from, to)`, then edge index.
pub fn prim_mst(n_nodes: usize, edges: &[WeightedEdge]) -> Result<Vec<usize>> {
    if n_nodes == 0 {
        return Ok(Vec::new());
    }
    if let Some(e) = edges.iter().find(|e| e.from >= n_nodes || e.to >= n_nodes) {
        return Err(Error::Domain(format!(
            "edge {}-{} references a missing node",
            e.from, e.to
        )));
    }
    if edges.iter().any(|e| e.weight.is_nan()) {
        return Err(Error::Domain("edge weight is NaN".into()));
    }
    let mut in_tree = vec![false; n_nodes];
    in_tree[0] = true;
    let mut chosen = Vec::with_capacity(n_nodes - 1);
    for _ in 1..n_nodes {
        let best = edges
            .iter()
            .enumerate()
            .filter(|(_, e)| in_tree[e.from] != in_tree[e.to])
            .min_by(|(i, a), (j, b)| a.key_cmp(b).then(i.cmp(j)));
        let Some((k, e)) = best else {
            return Err(Error::NoSpanningTree);
        };
        in_tree[e.from] = true;
        in_tree[e.to] = true;
        chosen.push(k);
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Every spanning tree as a sorted list of edge indices; exhaustive over
/// `(n−1)`-subsets, so only for small graphs (at most 20 edges).
pub fn enumerate_spanning_trees(n_nodes: usize, edges: &[WeightedEdge]) -> Result<Vec<Vec<usize>>> {
    if edges.len() > 20 {
        return Err(Error::Capacity {
            what: "spanning-tree enumeration",
            n: edges.len(),
            limit: 20,
        });
    }
    let mut trees = Vec::new();
    if n_nodes == 0 {
        return Ok(trees);
    }
    for m in 0u32..(1u32 << edges.len()) {
        if m.count_ones() as usize != n_nodes - 1 {
            continue;
        }
        let idx: Vec<usize> = (0..edges.len()).filter(|k| m >> k & 1 == 1).collect();
        if connects_all(n_nodes, idx.iter().map(|&k| (edges[k].from, edges[k].to))) {
            trees.push(idx);
        }
    }
    Ok(trees)
}

fn connects_all(n: usize, pairs: impl Iterator<Item = (usize, usize)>) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    let mut components = n;
    for (a, b) in pairs {
        let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            components -= 1;
        }
    }
    components == 1
}

/// Buses connected to some feeder through energized lines.
pub fn reachable_from_feeders(net: &Network, energized: &[bool]) -> Vec<bool> {
    let n = net.n_buses();
    let mut adj = vec![Vec::new(); n];
    for (l, &on) in energized.iter().enumerate() {
        if on {
            let (a, b) = net.ends(l);
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = net.feeders().into_iter().collect();
    for &f in &queue {
        seen[f] = true;
    }
    while let Some(a) = queue.pop_front() {
        for &b in &adj[a] {
            if !seen[b] {
                seen[b] = true;
                queue.push_back(b);
            }
        }
    }
    seen
}

/// Energized edge count equals buses minus feeders and every bus is
/// supplied. Together these force a forest with one feeder per tree.
pub fn is_radial(net: &Network, energized: &[bool]) -> bool {
    let count = energized.iter().filter(|&&on| on).count();
    count + net.n_feeders() == net.n_buses()
        && reachable_from_feeders(net, energized).iter().all(|&r| r)
}
