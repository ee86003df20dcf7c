mod common;

use common::{named_factor, small_graph, to_q, walks, walks_at};
use freegraph::graph::{
    branch_graph, comb_product, m_free_product, moments, orth_iter_with_factors, orth_product, star_product,
    VertexState,
};
use freegraph::{Radius, RootedGraph, Q};
use num_traits::Zero;
use proptest::prelude::*;

fn certified(g: &RootedGraph, cap: usize) -> usize {
    match g.faithful_radius() {
        Radius::Finite(r) => (2 * r).min(cap),
        Radius::Infinite => cap,
    }
}

/// Positive semidefiniteness of [M_{i+j}] by exact symmetric elimination.
fn hankel_psd(m: &[Q]) -> bool {
    let n = (m.len() - 1) / 2 + 1;
    let mut h: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|j| m[i + j].clone()).collect()).collect();
    for k in 0..n {
        let p = h[k][k].clone();
        if p < Q::zero() {
            return false;
        }
        if p.is_zero() {
            if (k + 1..n).any(|j| !h[k][j].is_zero()) {
                return false;
            }
            continue;
        }
        for i in k + 1..n {
            let f = &h[i][k] / &p;
            for j in k..n {
                let d = &f * &h[k][j];
                h[i][j] -= d;
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_sizes(a in small_graph(5), b in small_graph(5)) {
        let (na, nb) = (a.num_vertices(), b.num_vertices());
        prop_assert_eq!(star_product(&a, &b).unwrap().num_vertices(), na + nb - 1);
        prop_assert_eq!(comb_product(&a, &b).unwrap().num_vertices(), na * nb);
        prop_assert_eq!(orth_product(&a, &b).unwrap().num_vertices(), (na - 1) * nb + 1);
    }

    #[test]
    fn walk_moments_match_dense_oracle(g in small_graph(6), pick in any::<usize>()) {
        let v = pick % g.num_vertices();
        let m = moments(VertexState::at(&g, v).unwrap(), 10).unwrap();
        let oracle = to_q(&walks_at(&g, v, 10));
        prop_assert_eq!(m.coeffs(), oracle.as_slice());
        prop_assert_eq!(m.get(0).clone(), Q::from_integer(1.into()));
        prop_assert!(m.get(1).is_zero());
        prop_assert_eq!(m.get(2).clone(), Q::from_integer((g.degree(v) as i64).into()));
        prop_assert!(hankel_psd(m.coeffs()));
    }

    #[test]
    fn free_product_commutes(a in named_factor(), b in named_factor(), m in 1usize..=3) {
        let ab = m_free_product(&[a.clone(), b.clone()], m).unwrap();
        let ba = m_free_product(&[b, a], m).unwrap();
        let order = certified(&ab, 8).min(certified(&ba, 8));
        prop_assert_eq!(walks(&ab, order), walks(&ba, order));
    }

    #[test]
    fn free_product_associates(a in named_factor(), b in named_factor(), c in named_factor()) {
        let m = 2;
        let flat = m_free_product(&[a.clone(), b.clone(), c.clone()], m).unwrap();
        let rotated = m_free_product(&[c.clone(), a.clone(), b.clone()], m).unwrap();
        let nested = m_free_product(&[m_free_product(&[a, b], m).unwrap(), c], m).unwrap();
        let order = [&flat, &rotated, &nested].iter().map(|g| certified(g, 6)).min().unwrap();
        prop_assert_eq!(walks(&flat, order), walks(&rotated, order));
        prop_assert_eq!(walks(&flat, order), walks(&nested, order));
    }

    #[test]
    fn branches_are_orthogonal_iterates(a in named_factor(), b in named_factor(), m in 1usize..=3) {
        let factors = [a.clone(), b.clone()];
        let b1 = branch_graph(&factors, 1, m).unwrap();
        let b2 = branch_graph(&factors, 2, m).unwrap();
        prop_assert!(b1.same_labelled(&orth_iter_with_factors(&a, 1, &b, 2, m - 1).unwrap()));
        prop_assert!(b2.same_labelled(&orth_iter_with_factors(&b, 2, &a, 1, m - 1).unwrap()));
    }

    #[test]
    fn star_decomposition(a in named_factor(), b in named_factor(), m in 1usize..=3) {
        let factors = [a, b];
        let whole = m_free_product(&factors, m).unwrap();
        let star = star_product(&branch_graph(&factors, 1, m).unwrap(), &branch_graph(&factors, 2, m).unwrap()).unwrap();
        prop_assert!(whole.same_labelled(&star));
    }

    #[test]
    fn comb_decomposition(a in named_factor(), b in named_factor(), m in 1usize..=3) {
        let factors = [a.clone(), b.clone()];
        let whole = m_free_product(&factors, m).unwrap();
        let comb = comb_product(&a, &branch_graph(&factors, 2, m).unwrap()).unwrap();
        let order = 2 * m;
        prop_assert_eq!(walks(&whole, order), walks(&comb, order));
    }
}
