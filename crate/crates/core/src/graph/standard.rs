use super::{Radius, RootedGraph, Vertex};
use crate::error::{Error, Result};

/// Named rooted graphs. Infinite families carry the depth of the ball that is
/// materialised around the root.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Complete graph on n+1 vertices.
    K(u32),
    /// Star with m leaves, rooted at its center.
    F(u32),
    /// Handle of one edge whose far end carries m leaves; rooted at the free
    /// end of the handle.
    Fork(u32),
    /// A single edge.
    Z2,
    /// Path on k vertices rooted at an end.
    P(u32),
    /// Half-line rooted at its end.
    T1 { depth: u32 },
    /// Integer line rooted at 0.
    Z { depth: u32 },
    /// Rooted tree in which every vertex has n children.
    Tn { n: u32, depth: u32 },
    /// Homogeneous tree of degree n.
    Hn { n: u32, depth: u32 },
}

const MAX_STANDARD_VERTICES: u128 = 2_000_000;

fn positive(name: &str, v: u32) -> Result<()> {
    if v == 0 {
        Err(Error::InvalidParameter(format!("{name} must be at least 1")))
    } else {
        Ok(())
    }
}

fn labelled(n: usize, edges: Vec<(usize, usize)>, radius: Radius) -> Result<RootedGraph> {
    let vertices = (0..n)
        .map(|i| if i == 0 { Vertex::root() } else { Vertex::letter(1, i as u32) })
        .collect();
    RootedGraph::new(vertices, edges, 0, radius)
}

/// Tree ball where the root has `root_children` children and every other
/// vertex `children`.
fn tree_ball(root_children: u32, children: u32, depth: u32) -> Result<RootedGraph> {
    let mut total: u128 = 1;
    let mut level: u128 = 1;
    for d in 0..depth {
        level *= if d == 0 { root_children as u128 } else { children as u128 };
        total += level;
        if total > MAX_STANDARD_VERTICES {
            return Err(Error::VertexBudgetExceeded {
                needed: total,
                budget: MAX_STANDARD_VERTICES as usize,
            });
        }
    }
    let mut edges = Vec::with_capacity(total as usize);
    let mut frontier = vec![0usize];
    let mut next_id = 1usize;
    for d in 0..depth {
        let k = if d == 0 { root_children } else { children };
        let mut next = Vec::with_capacity(frontier.len() * k as usize);
        for &p in &frontier {
            for _ in 0..k {
                edges.push((p, next_id));
                next.push(next_id);
                next_id += 1;
            }
        }
        frontier = next;
    }
    labelled(next_id, edges, Radius::Finite(depth as usize))
}

pub fn make_standard(family: Family) -> Result<RootedGraph> {
    match family {
        Family::K(n) => {
            positive("n", n)?;
            let n = n as usize;
            let edges = (0..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
            labelled(n + 1, edges, Radius::Infinite)
        }
        Family::F(m) => {
            positive("m", m)?;
            let edges = (1..=m as usize).map(|i| (0, i)).collect();
            labelled(m as usize + 1, edges, Radius::Infinite)
        }
        Family::Fork(m) => {
            positive("m", m)?;
            let mut edges = vec![(0, 1)];
            edges.extend((2..m as usize + 2).map(|i| (1, i)));
            labelled(m as usize + 2, edges, Radius::Infinite)
        }
        Family::Z2 => labelled(2, vec![(0, 1)], Radius::Infinite),
        Family::P(k) => {
            positive("k", k)?;
            let edges = (1..k as usize).map(|i| (i - 1, i)).collect();
            labelled(k as usize, edges, Radius::Infinite)
        }
        Family::T1 { depth } => {
            positive("depth", depth)?;
            tree_ball(1, 1, depth)
        }
        Family::Z { depth } => {
            positive("depth", depth)?;
            tree_ball(2, 1, depth)
        }
        Family::Tn { n, depth } => {
            positive("n", n)?;
            positive("depth", depth)?;
            tree_ball(n, n, depth)
        }
        Family::Hn { n, depth } => {
            positive("n", n)?;
            positive("depth", depth)?;
            tree_ball(n, n - 1, depth)
        }
    }
}
