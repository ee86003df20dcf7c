#![allow(dead_code)]

use freegraph::graph::{make_standard, Family};
use freegraph::rational::qr;
use freegraph::{JacobiParams, Radius, RootedGraph, Vertex, Q};
use proptest::prelude::*;

/// Connected graph on 2..=max vertices: a random spanning tree plus random
/// chords, rooted at a random vertex.
pub fn small_graph(max: usize) -> impl Strategy<Value = RootedGraph> {
    (2..=max)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(any::<u32>(), n),
                proptest::collection::vec(any::<bool>(), n * n),
                0..n,
            )
        })
        .prop_map(|(n, parents, chords, root)| {
            let mut edges = Vec::new();
            for i in 1..n {
                edges.push(((parents[i] as usize) % i, i));
            }
            for a in 0..n {
                for b in a + 1..n {
                    if chords[a * n + b] && !edges.contains(&(a, b)) {
                        edges.push((a, b));
                    }
                }
            }
            let vertices = (0..n)
                .map(|i| if i == root { Vertex::root() } else { Vertex::letter(1, i as u32 + 1) })
                .collect();
            RootedGraph::new(vertices, edges, root, Radius::Infinite).unwrap()
        })
}

/// One of the small named factors.
pub fn named_factor() -> impl Strategy<Value = RootedGraph> {
    prop_oneof![
        Just(Family::Z2),
        (1u32..=3).prop_map(Family::K),
        (1u32..=3).prop_map(Family::F),
        (1u32..=2).prop_map(Family::Fork),
        (2u32..=4).prop_map(Family::P),
    ]
    .prop_map(|f| make_standard(f).unwrap())
}

/// Finite Jacobi data with small rational entries.
pub fn finite_jacobi() -> impl Strategy<Value = JacobiParams> {
    (1usize..=5)
        .prop_flat_map(|len| {
            (
                proptest::collection::vec((-3i64..=3, 1i64..=4), len),
                proptest::collection::vec((1i64..=5, 1i64..=4), len - 1),
            )
        })
        .prop_map(|(a, w)| {
            JacobiParams::finite(
                a.into_iter().map(|(p, q)| qr(p, q)).collect(),
                w.into_iter().map(|(p, q)| qr(p, q)).collect(),
            )
            .unwrap()
        })
}

/// Eventually periodic Jacobi data: preperiod 0..=2, period 1 or 2.
pub fn periodic_jacobi() -> impl Strategy<Value = JacobiParams> {
    (0usize..=2, 1usize..=2)
        .prop_flat_map(|(pre, per)| {
            (
                Just(pre),
                Just(per),
                proptest::collection::vec((-2i64..=2, 1i64..=2), pre + per),
                proptest::collection::vec((1i64..=4, 1i64..=2), pre + per),
            )
        })
        .prop_map(|(pre, per, a, w)| {
            let alpha: Vec<Q> = a.into_iter().map(|(p, q)| qr(p, q)).collect();
            let omega: Vec<Q> = w.into_iter().map(|(p, q)| qr(p, q)).collect();
            JacobiParams::periodic(alpha, omega, pre, per).unwrap()
        })
}

/// ⟨A^k δ_v, δ_v⟩ for k = 0..=order by dense vector iteration.
pub fn walks_at(g: &RootedGraph, v: usize, order: usize) -> Vec<u128> {
    let mut x = vec![0u128; g.num_vertices()];
    x[v] = 1;
    let mut out = vec![1u128];
    for _ in 0..order {
        let mut y = vec![0u128; g.num_vertices()];
        for (a, b) in g.edges() {
            y[a] += x[b];
            y[b] += x[a];
        }
        x = y;
        out.push(x[v]);
    }
    out
}

pub fn walks(g: &RootedGraph, order: usize) -> Vec<u128> {
    walks_at(g, g.root(), order)
}

pub fn to_q(v: &[u128]) -> Vec<Q> {
    v.iter().map(|&x| Q::from_integer(i64::try_from(x).unwrap().into())).collect()
}
