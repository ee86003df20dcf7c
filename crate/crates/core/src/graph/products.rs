//! Star, comb and orthogonal products.
//!
//! Labels are kept when the result is still a set of distinct reduced words
//! (a comb/orthogonal vertex `(x, y)` gets `word(y) ++ word(x)`); otherwise
//! both inputs are atomised to factors 1 and 2 first.

use super::{Radius, RootedGraph, Vertex};
use crate::error::{Error, Result};
use std::collections::HashSet;

fn require_edges(g: &RootedGraph, which: &str) -> Result<()> {
    if g.has_edges() {
        Ok(())
    } else {
        Err(Error::InvalidGraph(format!("{which} factor has no edges")))
    }
}

fn valid_labels(labels: &[Vertex]) -> bool {
    let mut seen = HashSet::with_capacity(labels.len());
    labels.iter().all(|v| v.is_reduced() && seen.insert(v))
}

/// Builds vertex labels from a pair of label sources, falling back to
/// atomised factors when the kept labels collide.
fn choose_labels(
    g1: &RootedGraph,
    g2: &RootedGraph,
    build: impl Fn(&RootedGraph, &RootedGraph) -> Vec<Vertex>,
) -> Vec<Vertex> {
    let kept = build(g1, g2);
    if valid_labels(&kept) {
        kept
    } else {
        build(&g1.atomized(1), &g2.atomized(2))
    }
}

fn radius(g1: &RootedGraph, g2: &RootedGraph) -> Radius {
    g1.faithful_radius().min(g2.faithful_radius())
}

/// Glues the root of `g2` to the root of `g1`.
pub fn star_product(g1: &RootedGraph, g2: &RootedGraph) -> Result<RootedGraph> {
    require_edges(g1, "first")?;
    require_edges(g2, "second")?;
    let n1 = g1.num_vertices();
    let mut index2 = vec![0usize; g2.num_vertices()];
    let mut next = n1;
    for (j, slot) in index2.iter_mut().enumerate() {
        if j == g2.root() {
            *slot = g1.root();
        } else {
            *slot = next;
            next += 1;
        }
    }
    let labels = choose_labels(g1, g2, |a, b| {
        let mut v: Vec<Vertex> = a.vertices().to_vec();
        v.extend((0..b.num_vertices()).filter(|&j| j != b.root()).map(|j| b.vertex(j).clone()));
        v
    });
    let edges: Vec<(usize, usize)> = g1
        .edges()
        .chain(g2.edges().map(|(a, b)| (index2[a], index2[b])))
        .collect();
    RootedGraph::new(labels, edges, g1.root(), radius(g1, g2))
}

/// Glues a copy of `g2` by its root to every vertex of `g1`. Vertex
/// `(x, y)` has index `x * |V2| + y`.
pub fn comb_product(g1: &RootedGraph, g2: &RootedGraph) -> Result<RootedGraph> {
    require_edges(g1, "first")?;
    require_edges(g2, "second")?;
    let n1 = g1.num_vertices();
    let n2 = g2.num_vertices();
    let idx = |x: usize, y: usize| x * n2 + y;
    let labels = choose_labels(g1, g2, |a, b| {
        (0..n1)
            .flat_map(|x| (0..n2).map(move |y| (x, y)))
            .map(|(x, y)| b.vertex(y).concat(a.vertex(x)))
            .collect()
    });
    let e2 = g2.root();
    let mut edges = Vec::with_capacity(n1 * g2.num_edges() + g1.num_edges());
    for x in 0..n1 {
        edges.extend(g2.edges().map(|(a, b)| (idx(x, a), idx(x, b))));
    }
    edges.extend(g1.edges().map(|(a, b)| (idx(a, e2), idx(b, e2))));
    RootedGraph::new(labels, edges, idx(g1.root(), e2), radius(g1, g2))
}

/// Glues a copy of `g2` by its root to every vertex of `g1` except its root.
/// The root is index 0; `(x, y)` for non-root `x` follow in order.
pub fn orth_product(g1: &RootedGraph, g2: &RootedGraph) -> Result<RootedGraph> {
    require_edges(g1, "first")?;
    require_edges(g2, "second")?;
    let n2 = g2.num_vertices();
    let e1 = g1.root();
    let e2 = g2.root();
    let non_root: Vec<usize> = (0..g1.num_vertices()).filter(|&x| x != e1).collect();
    let mut slot = vec![usize::MAX; g1.num_vertices()];
    for (k, &x) in non_root.iter().enumerate() {
        slot[x] = k;
    }
    let idx = |x: usize, y: usize| 1 + slot[x] * n2 + y;
    let labels = choose_labels(g1, g2, |a, b| {
        let mut v = vec![a.vertex(e1).clone()];
        for &x in &non_root {
            v.extend((0..n2).map(|y| b.vertex(y).concat(a.vertex(x))));
        }
        v
    });
    let lift = |x: usize| if x == e1 { 0 } else { idx(x, e2) };
    let mut edges: Vec<(usize, usize)> = g1.edges().map(|(a, b)| (lift(a), lift(b))).collect();
    for &x in &non_root {
        edges.extend(g2.edges().map(|(a, b)| (idx(x, a), idx(x, b))));
    }
    RootedGraph::new(labels, edges, 0, radius(g1, g2))
}
