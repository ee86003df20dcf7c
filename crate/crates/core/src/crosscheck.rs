//! Cross-validation of the decompositions of m-free products: walk moments of
//! the product against the m-free convolution, the boolean convolution of the
//! two branches and the monotone convolution of a factor with the opposite
//! branch.

use crate::error::Result;
use crate::graph::{branch_graph, m_free_product, moments, Radius, RootedGraph, VertexState};
use crate::rational::format_q;
use crate::report::CheckReport;
use crate::transforms::{boolean_conv, free_conv, mfree_conv, monotone_conv, Distribution};

/// Highest moment order certified by the faithful radius at the root.
pub fn certified_order(g: &RootedGraph) -> Option<usize> {
    match g.faithful_radius() {
        Radius::Finite(r) => Some(2 * r),
        Radius::Infinite => None,
    }
}

fn cap(order: usize, g: &RootedGraph) -> usize {
    certified_order(g).map_or(order, |c| c.min(order))
}

pub fn root_distribution(g: &RootedGraph, order: usize) -> Result<Distribution> {
    Ok(Distribution::new(moments(VertexState::root(g), order)?))
}

/// Outcome of the four-pipeline comparison.
#[derive(Clone, Debug)]
pub struct PipelineCheck {
    /// Orders 0..=order were compared.
    pub order: usize,
    pub report: CheckReport,
}

/// Compares, at every order up to min(2m, certified), the walk moments of
/// G1 *_m G2 with mfree_conv, with the boolean convolution of the two
/// branches, and with G1 ▷ B2 and G2 ▷ B1 as monotone convolutions.
pub fn decomposition_pipelines(g1: &RootedGraph, g2: &RootedGraph, m: usize) -> Result<PipelineCheck> {
    let factors = [g1.clone(), g2.clone()];
    let product = m_free_product(&factors, m)?;
    let b1 = branch_graph(&factors, 1, m)?;
    let b2 = branch_graph(&factors, 2, m)?;
    let order = [g1, g2, &product, &b1, &b2].iter().fold(2 * m, |o, g| cap(o, g));
    let walk = root_distribution(&product, order)?;
    let mu = root_distribution(g1, order)?;
    let nu = root_distribution(g2, order)?;
    let beta1 = root_distribution(&b1, order)?;
    let beta2 = root_distribution(&b2, order)?;
    let pipelines = [
        ("walk=mfree_conv", mfree_conv(&mu, &nu, m, order)?),
        ("walk=boolean(B1,B2)", boolean_conv(&beta1, &beta2, order)?),
        ("walk=monotone(G1,B2)", monotone_conv(&mu, &beta2, order)?),
        ("walk=monotone(G2,B1)", monotone_conv(&nu, &beta1, order)?),
    ];
    let mut report = CheckReport::default();
    for (name, d) in &pipelines {
        for n in 0..=order {
            report.push(
                name,
                format!("m={m} order={n}"),
                format_q(walk.moments().get(n)),
                format_q(d.moments().get(n)),
            );
        }
    }
    Ok(PipelineCheck { order, report })
}

/// First order at which the m-free convolution departs from the free
/// convolution, searched up to `order`.
pub fn mfree_free_disagreement(a: &Distribution, b: &Distribution, m: usize, order: usize) -> Result<Option<usize>> {
    let mf = mfree_conv(a, b, m, order)?;
    let fr = free_conv(a, b, order)?;
    Ok((0..=order).find(|&n| mf.moments().get(n) != fr.moments().get(n)))
}
