//! Mixed-moment checks of the independence relations carried by product
//! graphs: freeness of the factor components of free products, orthogonality
//! of the two parts of an orthogonal product and freeness with subordination
//! on branches.
//!
//! Components are read off the word labels. An edge joins two words that
//! differ only in their leading letter (or where one extends the other by a
//! single leading letter); it belongs to the factor of that letter. Moments
//! are evaluated exactly with `i128` vectors.

use crate::error::{Error, Result};
use crate::graph::{orth_product, RootedGraph};
use crate::report::CheckReport;

/// Part of an adjacency operator, as neighbour lists on the full vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentOperator {
    pub factor: u16,
    adjacency: Vec<Vec<usize>>,
}

impl ComponentOperator {
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Vertices touched by at least one edge of the component.
    pub fn domain(&self) -> Vec<bool> {
        self.adjacency.iter().map(|n| !n.is_empty()).collect()
    }

    fn apply(&self, x: &[i128]) -> Result<Vec<i128>> {
        let mut out = vec![0i128; x.len()];
        for (v, &c) in x.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &u in &self.adjacency[v] {
                out[u] = out[u].checked_add(c).ok_or(Error::WalkCountOverflow { order: 0 })?;
            }
        }
        Ok(out)
    }
}

/// Factor owning the edge {a, b}, or `None` if the labels do not differ in a
/// single leading letter.
fn edge_owner(g: &RootedGraph, a: usize, b: usize) -> Option<u16> {
    let (wa, wb) = (&g.vertex(a).word, &g.vertex(b).word);
    let (long, short) = if wa.len() >= wb.len() { (wa, wb) } else { (wb, wa) };
    if long.len() == short.len() {
        let (x, y) = (long.first()?, short.first()?);
        (x.factor == y.factor && long[1..] == short[1..]).then_some(x.factor)
    } else if long.len() == short.len() + 1 {
        (long[1..] == short[..]).then(|| long[0].factor)
    } else {
        None
    }
}

/// Splits the adjacency operator by edge owner; components are returned in
/// increasing factor order and sum to A.
pub fn free_components(g: &RootedGraph) -> Result<Vec<ComponentOperator>> {
    let n = g.num_vertices();
    let mut comps: Vec<ComponentOperator> = Vec::new();
    for (a, b) in g.edges() {
        let f = edge_owner(g, a, b).ok_or_else(|| {
            Error::InvalidGraph(format!(
                "edge {{{}, {}}} does not change a single leading letter",
                g.vertex(a),
                g.vertex(b)
            ))
        })?;
        let idx = match comps.iter().position(|c| c.factor == f) {
            Some(i) => i,
            None => {
                comps.push(ComponentOperator {
                    factor: f,
                    adjacency: vec![Vec::new(); n],
                });
                comps.len() - 1
            }
        };
        comps[idx].adjacency[a].push(b);
        comps[idx].adjacency[b].push(a);
    }
    comps.sort_by_key(|c| c.factor);
    Ok(comps)
}

/// Depth index n of a component edge: the edge is {xu, x′u} with |u| = n − 1.
pub fn edge_depth(g: &RootedGraph, a: usize, b: usize) -> usize {
    g.vertex(a).len().max(g.vertex(b).len())
}

/// Components of the branch subordinate to factor `j`: the factor-j part
/// (edges at odd depth) and the other factor's part (edges at even depth).
pub fn branch_components(b: &RootedGraph, j: u16) -> Result<[ComponentOperator; 2]> {
    let comps = free_components(b)?;
    let other = if j == 1 { 2 } else { 1 };
    let take = |f: u16| {
        comps.iter().find(|c| c.factor == f).cloned().unwrap_or(ComponentOperator {
            factor: f,
            adjacency: vec![Vec::new(); b.num_vertices()],
        })
    };
    if comps.iter().any(|c| c.factor != j && c.factor != other) {
        return Err(Error::InvalidGraph("branch labels use more than two factors".into()));
    }
    Ok([take(j), take(other)])
}

/// Base vertices of the two states: φ at the root, ψ at the least
/// single-letter word of `factor`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StatePair {
    pub phi: usize,
    pub psi: usize,
}

impl StatePair {
    pub fn for_graph(g: &RootedGraph, factor: u16) -> Result<StatePair> {
        let psi = (0..g.num_vertices())
            .filter(|&v| g.vertex(v).len() == 1 && g.vertex(v).word[0].factor == factor)
            .min_by_key(|&v| g.vertex(v).word[0].id)
            .ok_or_else(|| Error::InvalidGraph(format!("no vertex of factor {factor} next to the root")))?;
        Ok(StatePair { phi: g.root(), psi })
    }
}

/// One factor of a product of operators.
#[derive(Clone, Copy, Debug)]
enum Step {
    /// (component index)^power
    Pow(usize, u32),
    /// (component)^power − shift·unit, where unit is 1 or the mask `1₂`
    Centered(usize, u32, i128, Unit),
    Mask,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Unit {
    Identity,
    Internal,
}

struct Evaluator<'a> {
    comps: &'a [ComponentOperator],
    internal_unit: Vec<bool>,
    n: usize,
}

impl<'a> Evaluator<'a> {
    fn new(comps: &'a [ComponentOperator], internal_unit: Vec<bool>, n: usize) -> Self {
        Evaluator { comps, internal_unit, n }
    }

    fn pow(&self, c: usize, k: u32, mut x: Vec<i128>) -> Result<Vec<i128>> {
        for _ in 0..k {
            x = self.comps[c].apply(&x)?;
        }
        Ok(x)
    }

    fn masked(&self, x: &[i128]) -> Vec<i128> {
        x.iter().zip(&self.internal_unit).map(|(&c, &m)| if m { c } else { 0 }).collect()
    }

    /// ⟨X₁⋯X_k δ(base), δ(base)⟩, applying X_k first.
    fn eval(&self, steps: &[Step], base: usize) -> Result<i128> {
        let mut x = vec![0i128; self.n];
        x[base] = 1;
        for step in steps.iter().rev() {
            x = match *step {
                Step::Pow(c, k) => self.pow(c, k, x)?,
                Step::Mask => self.masked(&x),
                Step::Centered(c, k, shift, unit) => {
                    let unit_part = match unit {
                        Unit::Identity => x.clone(),
                        Unit::Internal => self.masked(&x),
                    };
                    let mut y = self.pow(c, k, x)?;
                    for (a, b) in y.iter_mut().zip(unit_part) {
                        *a = b
                            .checked_mul(shift)
                            .and_then(|s| a.checked_sub(s))
                            .ok_or(Error::WalkCountOverflow { order: 0 })?;
                    }
                    y
                }
            };
        }
        Ok(x[base])
    }

    fn moment(&self, c: usize, k: u32, base: usize) -> Result<i128> {
        self.eval(&[Step::Pow(c, k)], base)
    }
}

fn require_radius(g: &RootedGraph, base_distance: usize, max_len: usize) -> Result<()> {
    let needed = base_distance + max_len.div_ceil(2);
    if g.faithful_radius().covers(needed) {
        Ok(())
    } else {
        Err(Error::TruncationTooShallow {
            order: max_len,
            needed,
            available: g.faithful_radius().finite().unwrap_or(usize::MAX),
        })
    }
}

fn describe(steps: &[Step], names: &[&str]) -> String {
    steps
        .iter()
        .map(|s| match *s {
            Step::Pow(c, k) => format!("{}^{k}", names[c]),
            Step::Centered(c, k, shift, Unit::Identity) => format!("({}^{k}-{shift})", names[c]),
            Step::Centered(c, k, shift, Unit::Internal) => format!("({}^{k}-{shift}*1_2)", names[c]),
            Step::Mask => "1_2".to_string(),
        })
        .collect::<Vec<_>>()
        .join("")
}

/// Compositions of at most `budget` into `parts` positive integers.
fn powers(parts: usize, budget: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=budget.saturating_sub(parts - 1) {
        for mut rest in powers(parts - 1, budget - first) {
            rest.insert(0, first as u32);
            out.push(rest);
        }
    }
    out
}

/// Sequences of component indices with no two equal neighbours.
fn alternating(len: usize, comps: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for p in &out {
            for c in (0..comps).filter(|&c| p.last() != Some(&c)) {
                let mut q: Vec<usize> = p.clone();
                q.push(c);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Words over the components with total degree at most `budget`, each
/// letter a single application.
fn words(comps: usize, budget: usize) -> Vec<Vec<Step>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<Step>> = vec![Vec::new()];
    for _ in 0..budget {
        frontier = frontier
            .into_iter()
            .flat_map(|w| {
                (0..comps).map(move |c| {
                    let mut v = w.clone();
                    v.push(Step::Pow(c, 1));
                    v
                })
            })
            .collect();
        out.extend(frontier.iter().cloned());
    }
    out
}

fn degree(steps: &[Step]) -> usize {
    steps
        .iter()
        .map(|s| match *s {
            Step::Pow(_, k) | Step::Centered(_, k, _, _) => k as usize,
            Step::Mask => 0,
        })
        .sum()
}

/// Alternating centered products of the factor components vanish in the
/// root state, for patterns whose total degree is at most `max_len`.
pub fn check_freeness(g: &RootedGraph, components: &[ComponentOperator], max_len: usize) -> Result<CheckReport> {
    require_radius(g, 0, max_len)?;
    let root = g.root();
    let ev = Evaluator::new(components, vec![true; g.num_vertices()], g.num_vertices());
    let names: Vec<String> = components.iter().map(|c| format!("A{}", c.factor)).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut centering = vec![vec![0i128; max_len + 1]; components.len()];
    for (c, row) in centering.iter_mut().enumerate() {
        for (k, slot) in row.iter_mut().enumerate().skip(1) {
            *slot = ev.moment(c, k as u32, root)?;
        }
    }
    let mut report = CheckReport::default();
    for len in 1..=max_len {
        for pattern in alternating(len, components.len()) {
            for pw in powers(len, max_len) {
                let steps: Vec<Step> = pattern
                    .iter()
                    .zip(&pw)
                    .map(|(&c, &k)| Step::Centered(c, k, centering[c][k as usize], Unit::Identity))
                    .collect();
                let value = ev.eval(&steps, root)?;
                report.push("free-alternating-centered", describe(&steps, &names), value.to_string(), "0".into());
            }
        }
    }
    Ok(report)
}

/// Builds the orthogonal product of the two factors with atomized labels
/// and checks both orthogonality conditions for monomial instantiations of
/// total degree at most `max_len`; ψ sits at the least non-root vertex of the
/// first factor.
pub fn check_orthogonality(g1: &RootedGraph, g2: &RootedGraph, max_len: usize) -> Result<CheckReport> {
    let g = orth_product(&g1.atomized(1), &g2.atomized(2))?;
    let comps = free_components(&g)?;
    let [a, b] = ordered_pair(&g, comps, 1, 2)?;
    let comps = [a, b];
    require_radius(&g, 1, max_len)?;
    let sp = StatePair::for_graph(&g, 1)?;
    let ev = Evaluator::new(&comps, vec![true; g.num_vertices()], g.num_vertices());
    let names = ["A1", "A2"];
    let phi = |s: &[Step]| ev.eval(s, sp.phi);
    let mut report = CheckReport::default();
    let all_words = words(2, max_len);
    // (i) φ(b w) = φ(w b) = 0
    for k in 1..=max_len {
        let bk = Step::Pow(1, k as u32);
        for w in all_words.iter().filter(|w| w.len() + k <= max_len) {
            let mut left = vec![bk];
            left.extend(w.iter().copied());
            let mut right = w.clone();
            right.push(bk);
            report.push("orth-i", describe(&left, &names), phi(&left)?.to_string(), "0".into());
            report.push("orth-i", describe(&right, &names), phi(&right)?.to_string(), "0".into());
        }
    }
    // (ii) φ(w₁a₁ba₂w₂) = ψ(b)(φ(w₁a₁a₂w₂) − φ(w₁a₁)φ(a₂w₂))
    for p in powers(3, max_len) {
        let (a1, bb, a2) = (Step::Pow(0, p[0]), Step::Pow(1, p[1]), Step::Pow(0, p[2]));
        let psi_b = ev.eval(&[bb], sp.psi)?;
        let rest = max_len - (p[0] + p[1] + p[2]) as usize;
        for w1 in all_words.iter().filter(|w| w.len() <= rest) {
            for w2 in all_words.iter().filter(|w| w.len() + w1.len() <= rest) {
                let cat = |parts: &[&[Step]]| parts.concat();
                let lhs = phi(&cat(&[w1, &[a1, bb, a2], w2]))?;
                let rhs = psi_b * (phi(&cat(&[w1, &[a1, a2], w2]))? - phi(&cat(&[w1, &[a1]]))? * phi(&cat(&[&[a2], w2]))?);
                report.push(
                    "orth-ii",
                    describe(&cat(&[w1, &[a1, bb, a2], w2]), &names),
                    lhs.to_string(),
                    rhs.to_string(),
                );
            }
        }
    }
    Ok(report)
}

fn ordered_pair(g: &RootedGraph, comps: Vec<ComponentOperator>, first: u16, second: u16) -> Result<[ComponentOperator; 2]> {
    let take = |f: u16| {
        comps.iter().find(|c| c.factor == f).cloned().unwrap_or(ComponentOperator {
            factor: f,
            adjacency: vec![Vec::new(); g.num_vertices()],
        })
    };
    if comps.iter().any(|c| c.factor != first && c.factor != second) {
        return Err(Error::InvalidGraph("expected labels from two factors".into()));
    }
    Ok([take(first), take(second)])
}

/// Which form of the second subordination condition to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitCondition {
    /// φ(w₁1₂w₂) = φ(w₁w₂) − φ(w₁)φ(w₂)
    Corrected,
    /// φ(w₁1₂w₂) = φ(w₁w₂) − φ(w₂)φ(w₂)
    AsPrinted,
}

/// Freeness with subordination on the branch subordinate to factor `j`:
/// the factor-j component is centered by φ, the other by ψ together with its
/// internal unit 1₂ (the projection onto the vertices it touches).
pub fn check_sfreeness(b: &RootedGraph, j: u16, max_len: usize) -> Result<CheckReport> {
    sfreeness_report(b, j, max_len, UnitCondition::Corrected)
}

/// As [`check_sfreeness`] but testing only the unit condition in the form
/// requested.
pub fn check_sfreeness_unit(b: &RootedGraph, j: u16, max_len: usize, form: UnitCondition) -> Result<CheckReport> {
    let mut r = sfreeness_report(b, j, max_len, form)?;
    r.entries.retain(|e| e.condition.starts_with("sfree-ii"));
    Ok(r)
}

fn sfreeness_report(b: &RootedGraph, j: u16, max_len: usize, form: UnitCondition) -> Result<CheckReport> {
    let comps = branch_components(b, j)?;
    require_radius(b, 1, max_len)?;
    let sp = StatePair::for_graph(b, j)?;
    let unit = comps[1].domain();
    let ev = Evaluator::new(&comps, unit, b.num_vertices());
    let names = ["A1", "A2"];
    let mut report = CheckReport::default();
    report.push("sfree-unit", "psi(1_2)".into(), ev.eval(&[Step::Mask], sp.psi)?.to_string(), "1".into());
    let mut center = [vec![0i128; max_len + 1], vec![0i128; max_len + 1]];
    for k in 1..=max_len {
        center[0][k] = ev.moment(0, k as u32, sp.phi)?;
        center[1][k] = ev.moment(1, k as u32, sp.psi)?;
    }
    // (i) alternating centered products vanish in φ
    for len in 1..=max_len {
        for pattern in alternating(len, 2) {
            for pw in powers(len, max_len) {
                let steps: Vec<Step> = pattern
                    .iter()
                    .zip(&pw)
                    .map(|(&c, &k)| {
                        let u = if c == 0 { Unit::Identity } else { Unit::Internal };
                        Step::Centered(c, k, center[c][k as usize], u)
                    })
                    .collect();
                let value = ev.eval(&steps, sp.phi)?;
                report.push("sfree-i", describe(&steps, &names), value.to_string(), "0".into());
            }
        }
    }
    // (ii) the internal unit inside arbitrary words
    let all_words = words(2, max_len);
    let (condition, printed) = match form {
        UnitCondition::Corrected => ("sfree-ii", false),
        UnitCondition::AsPrinted => ("sfree-ii-printed", true),
    };
    for w1 in &all_words {
        for w2 in all_words.iter().filter(|w| w.len() + w1.len() <= max_len) {
            let mut with_unit = w1.clone();
            with_unit.push(Step::Mask);
            with_unit.extend(w2.iter().copied());
            let lhs = ev.eval(&with_unit, sp.phi)?;
            let joined = [w1.as_slice(), w2.as_slice()].concat();
            let f2 = ev.eval(w2, sp.phi)?;
            let first = if printed { f2 } else { ev.eval(w1, sp.phi)? };
            let rhs = ev.eval(&joined, sp.phi)? - first * f2;
            debug_assert!(degree(&joined) <= max_len);
            report.push(condition, describe(&with_unit, &names), lhs.to_string(), rhs.to_string());
        }
    }
    Ok(report)
}
