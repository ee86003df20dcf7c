//! m-free products, branches and iterated orthogonal products.

use super::products::orth_product;
use super::{Letter, Radius, RootedGraph, Vertex};
use crate::error::{Error, Result};
use std::collections::HashMap;

pub const DEFAULT_VERTEX_BUDGET: usize = 2_000_000;

pub fn m_free_product(factors: &[RootedGraph], m: usize) -> Result<RootedGraph> {
    m_free_product_with_budget(factors, m, DEFAULT_VERTEX_BUDGET)
}

/// Reduced words of length at most `m` over the factors' non-root vertices.
/// Factor `i` (0-based position) contributes letters `(i + 1, vertex index)`.
pub fn m_free_product_with_budget(factors: &[RootedGraph], m: usize, budget: usize) -> Result<RootedGraph> {
    if factors.len() < 2 {
        return Err(Error::InvalidParameter("m-free product needs at least two factors".into()));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    for (i, f) in factors.iter().enumerate() {
        if !f.has_edges() {
            return Err(Error::InvalidGraph(format!("factor {} has no edges", i + 1)));
        }
    }
    let letters: Vec<Vec<u32>> = factors
        .iter()
        .map(|f| (0..f.num_vertices()).filter(|&v| v != f.root()).map(|v| v as u32).collect())
        .collect();

    // size audit before allocating anything
    let mut by_first: Vec<u128> = letters.iter().map(|l| l.len() as u128).collect();
    let mut total: u128 = 1 + by_first.iter().sum::<u128>();
    for _ in 1..m {
        let sum: u128 = by_first.iter().sum();
        by_first = by_first
            .iter()
            .zip(&letters)
            .map(|(own, l)| (sum - own) * l.len() as u128)
            .collect();
        total += by_first.iter().sum::<u128>();
        if total > budget as u128 {
            return Err(Error::VertexBudgetExceeded { needed: total, budget });
        }
    }
    if total > budget as u128 {
        return Err(Error::VertexBudgetExceeded { needed: total, budget });
    }

    let mut words: Vec<Vec<Letter>> = Vec::with_capacity(total as usize);
    words.push(Vec::new());
    let mut start = 0;
    for _ in 0..m {
        let end = words.len();
        for w in start..end {
            let first = words[w].first().map(|l| l.factor);
            for (i, ls) in letters.iter().enumerate() {
                let f = (i + 1) as u16;
                if first == Some(f) {
                    continue;
                }
                for &id in ls {
                    let mut nw = Vec::with_capacity(words[w].len() + 1);
                    nw.push(Letter::new(f, id));
                    nw.extend_from_slice(&words[w]);
                    words.push(nw);
                }
            }
        }
        start = end;
    }
    words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let index: HashMap<&[Letter], usize> = words.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();

    let mut edges = Vec::new();
    let mut target = Vec::new();
    for (i, w) in words.iter().enumerate() {
        let Some(&first) = w.first() else { continue };
        let factor = &factors[first.factor as usize - 1];
        for &nb in factor.neighbors(first.id as usize) {
            target.clear();
            if nb != factor.root() {
                target.push(Letter::new(first.factor, nb as u32));
            }
            target.extend_from_slice(&w[1..]);
            let j = index[target.as_slice()];
            if j > i || (nb == factor.root()) {
                edges.push((i, j));
            }
        }
    }
    drop(index);
    let vertices: Vec<Vertex> = words.into_iter().map(Vertex::from_letters).collect();
    let g = RootedGraph::new(vertices, edges, 0, Radius::Infinite)?;
    let dist = g.distances_from(0);
    let mut radius = (0..g.num_vertices())
        .filter(|&v| g.vertex(v).len() == m)
        .map(|v| Radius::Finite(dist[v]))
        .fold(Radius::Infinite, Radius::min);
    for f in factors {
        radius = radius.min(f.faithful_radius());
    }
    Ok(g.with_radius(radius))
}

/// Subgraph of the m-free product of two factors on the root plus the words
/// ending with a letter of factor `j` (1 or 2).
pub fn branch_graph(factors: &[RootedGraph; 2], j: u16, m: usize) -> Result<RootedGraph> {
    if j != 1 && j != 2 {
        return Err(Error::InvalidParameter(format!("branch index must be 1 or 2, got {j}")));
    }
    let product = m_free_product(factors, m)?;
    let keep: Vec<bool> = product
        .vertices()
        .iter()
        .map(|v| v.last().is_none_or(|l| l.factor == j))
        .collect();
    let radius = product.faithful_radius();
    product.induced(&keep, radius)
}

/// The alternating approximant B1(m) with B1(k) = G1 ⊢ B2(k−1),
/// B2(k) = G2 ⊢ B1(k−1), Bi(0) = Gi, labelled with factors 1 and 2.
pub fn orth_iter(g1: &RootedGraph, g2: &RootedGraph, m: usize) -> Result<RootedGraph> {
    orth_iter_with_factors(g1, 1, g2, 2, m)
}

/// As [`orth_iter`], with explicit factor indices for the labels of `g1` and
/// `g2`.
pub fn orth_iter_with_factors(g1: &RootedGraph, f1: u16, g2: &RootedGraph, f2: u16, m: usize) -> Result<RootedGraph> {
    if f1 == f2 {
        return Err(Error::InvalidParameter("factor labels must differ".into()));
    }
    let a = g1.atomized(f1);
    let b = g2.atomized(f2);
    let (mut b1, mut b2) = (a.clone(), b.clone());
    for _ in 0..m {
        let n1 = orth_product(&a, &b2)?;
        let n2 = orth_product(&b, &b1)?;
        b1 = n1;
        b2 = n2;
    }
    if m == 0 {
        return Ok(b1);
    }
    // faithful relative to the infinite branch up to the longest words
    let dist = b1.distances_from(b1.root());
    let longest = (0..b1.num_vertices()).map(|v| b1.vertex(v).len()).max().unwrap_or(0);
    let radius = (0..b1.num_vertices())
        .filter(|&v| b1.vertex(v).len() == longest)
        .map(|v| Radius::Finite(dist[v]))
        .fold(g1.faithful_radius().min(g2.faithful_radius()), Radius::min);
    Ok(b1.with_radius(radius))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{make_standard, star_product, Family};

    fn g(f: Family) -> RootedGraph {
        make_standard(f).unwrap()
    }

    #[test]
    fn z2_free_power_is_a_path() {
        for m in 1..6 {
            let p = m_free_product(&[g(Family::Z2), g(Family::Z2)], m).unwrap();
            assert_eq!(p.num_vertices(), 2 * m + 1);
            assert_eq!(p.num_edges(), 2 * m);
            assert_eq!(p.degree(p.root()), 2);
            assert_eq!(p.faithful_radius(), Radius::Finite(m));
        }
    }

    #[test]
    fn fig2_labels() {
        // two 3-vertex paths rooted at an end
        let p = m_free_product(&[g(Family::P(3)), g(Family::P(3))], 4).unwrap();
        let labels: Vec<String> = p.vertices().iter().map(|v| v.to_string()).collect();
        for w in ["e", "1:1", "1:2", "2:1", "2:1,1:1", "2:2,1:1", "1:1,2:1,1:1", "2:1,1:1,2:1,1:1"] {
            assert!(labels.contains(&w.to_string()), "missing {w}");
        }
        let x = p.index_of(&Vertex::parse("1:1").unwrap()).unwrap();
        let yx = p.index_of(&Vertex::parse("2:1,1:1").unwrap()).unwrap();
        let y2x = p.index_of(&Vertex::parse("2:2,1:1").unwrap()).unwrap();
        assert!(p.neighbors(x).contains(&yx));
        assert!(p.neighbors(yx).contains(&y2x));
        assert!(!p.neighbors(x).contains(&y2x));
    }

    #[test]
    fn budget_guard() {
        let err = m_free_product_with_budget(&[g(Family::K(3)), g(Family::K(3))], 12, 1000).unwrap_err();
        assert!(matches!(err, Error::VertexBudgetExceeded { .. }));
    }

    #[test]
    fn branch_of_centered_paths_is_binary_tree() {
        let p3c = {
            let p = g(Family::P(3));
            // reroot the 3-path at its center
            RootedGraph::new(p.vertices().to_vec(), p.edges().collect::<Vec<_>>(), 1, Radius::Infinite)
                .map(|h| h.atomized(1))
                .unwrap()
        };
        let b = branch_graph(&[p3c.clone(), p3c], 1, 5).unwrap();
        let t = g(Family::Tn { n: 2, depth: 5 });
        assert_eq!(b.num_vertices(), t.num_vertices());
        let dist = b.distances_from(b.root());
        for v in 0..b.num_vertices() {
            let children = b.neighbors(v).iter().filter(|&&w| dist[w] == dist[v] + 1).count();
            if dist[v] < 5 {
                assert_eq!(children, 2);
            }
        }
    }

    #[test]
    fn orth_iter_examples() {
        let z2 = g(Family::Z2);
        for m in 0..5 {
            let p = orth_iter(&z2, &z2, m).unwrap();
            assert_eq!(p.num_vertices(), m + 2);
            assert_eq!(p.degree(p.root()), 1);
        }
        let k2 = g(Family::K(2));
        let once = orth_iter(&k2, &z2, 1).unwrap();
        let direct = orth_product(&k2.atomized(1), &z2.atomized(2)).unwrap();
        assert!(once.same_labelled(&direct));
    }

    #[test]
    fn branches_match_iterates_and_star_decomposition() {
        let pairs = [(Family::K(2), Family::F(2)), (Family::P(3), Family::Z2), (Family::K(2), Family::K(2))];
        for (a, b) in pairs {
            let (a, b) = (g(a), g(b));
            for m in 1..5 {
                let factors = [a.clone(), b.clone()];
                let b1 = branch_graph(&factors, 1, m).unwrap();
                let b2 = branch_graph(&factors, 2, m).unwrap();
                assert!(b1.same_labelled(&orth_iter_with_factors(&a, 1, &b, 2, m - 1).unwrap()));
                assert!(b2.same_labelled(&orth_iter_with_factors(&b, 2, &a, 1, m - 1).unwrap()));
                let whole = m_free_product(&factors, m).unwrap();
                assert!(whole.same_labelled(&star_product(&b1, &b2).unwrap()));
            }
        }
    }
}
