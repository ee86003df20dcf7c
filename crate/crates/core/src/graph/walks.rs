use super::RootedGraph;
use crate::error::{Error, Result};
use crate::rational::from_u128;
use crate::transforms::MomentSeq;
use std::collections::VecDeque;

/// The vector state at a base vertex.
#[derive(Clone, Copy, Debug)]
pub struct VertexState<'a> {
    pub graph: &'a RootedGraph,
    pub base: usize,
}

impl<'a> VertexState<'a> {
    pub fn root(graph: &'a RootedGraph) -> Self {
        VertexState { graph, base: graph.root() }
    }

    pub fn at(graph: &'a RootedGraph, base: usize) -> Result<Self> {
        if base >= graph.num_vertices() {
            return Err(Error::InvalidParameter(format!("base vertex {base} out of range")));
        }
        Ok(VertexState { graph, base })
    }

    /// Largest radius around the base that is certified faithful.
    pub fn certified_radius(&self) -> super::Radius {
        let d = self.graph.distances_from(self.graph.root())[self.base];
        self.graph.faithful_radius().saturating_sub(d)
    }
}

/// Closed-walk counts M_0..M_order at the base vertex.
pub fn moments(state: VertexState<'_>, order: usize) -> Result<MomentSeq> {
    let g = state.graph;
    let needed = order.div_ceil(2);
    let radius = state.certified_radius();
    if !radius.covers(needed) {
        return Err(Error::TruncationTooShallow {
            order,
            needed,
            available: radius.finite().unwrap_or(usize::MAX),
        });
    }
    // closed walks of length `order` never leave the ball of radius order/2
    let reach = order / 2;
    let mut local = vec![usize::MAX; g.num_vertices()];
    let mut ball = vec![state.base];
    let mut dist = vec![0usize];
    local[state.base] = 0;
    let mut queue = VecDeque::from([state.base]);
    while let Some(v) = queue.pop_front() {
        let dv = dist[local[v]];
        if dv == reach {
            continue;
        }
        for &w in g.neighbors(v) {
            if local[w] == usize::MAX {
                local[w] = ball.len();
                ball.push(w);
                dist.push(dv + 1);
                queue.push_back(w);
            }
        }
    }
    let adj: Vec<Vec<usize>> = ball
        .iter()
        .map(|&v| g.neighbors(v).iter().filter(|&&w| local[w] != usize::MAX).map(|&w| local[w]).collect())
        .collect();

    let mut current = vec![0u128; ball.len()];
    current[0] = 1;
    let mut next = vec![0u128; ball.len()];
    let mut out = Vec::with_capacity(order + 1);
    out.push(from_u128(1));
    for step in 1..=order {
        for (v, slot) in next.iter_mut().enumerate() {
            let mut acc: u128 = 0;
            for &w in &adj[v] {
                acc = acc.checked_add(current[w]).ok_or(Error::WalkCountOverflow { order: step })?;
            }
            *slot = acc;
        }
        std::mem::swap(&mut current, &mut next);
        out.push(from_u128(current[0]));
    }
    MomentSeq::new(out)
}
