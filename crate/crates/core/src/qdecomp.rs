//! Quantum decomposition of the adjacency operator with respect to a vertex
//! set: distance partition, the level-graded components A⁺, A⁰, A⁻, J-vacuum
//! vectors and the spectrum they assemble.
//!
//! All vector algebra is exact. Truncated graphs are handled by tracking
//! which levels are interior: a level is interior when every vertex on it and
//! on all earlier levels lies strictly inside the faithful radius, so its
//! full neighbourhood is present.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{m_free_product, make_standard, Family, RootedGraph};
use crate::jacobi::{JacobiJson, JacobiParams, Tail};
use crate::measures::SpectralMeasure;
use crate::rational::Q;

/// Sparse vector over the vertex basis with exact coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseVec(BTreeMap<usize, Q>);

impl SparseVec {
    pub fn new() -> Self {
        SparseVec(BTreeMap::new())
    }

    pub fn delta(v: usize) -> Self {
        let mut x = SparseVec::new();
        x.add_at(v, &Q::one());
        x
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, Q)>) -> Self {
        let mut x = SparseVec::new();
        for (v, c) in pairs {
            x.add_at(v, &c);
        }
        x
    }

    pub fn get(&self, v: usize) -> Q {
        self.0.get(&v).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_at(&mut self, v: usize, c: &Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.0.entry(v).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.0.remove(&v);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Q)> {
        self.0.iter().map(|(v, c)| (*v, c))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dot(&self, other: &SparseVec) -> Q {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        let mut s = Q::zero();
        for (v, c) in small.iter() {
            if let Some(d) = large.0.get(&v) {
                s += c * d;
            }
        }
        s
    }

    pub fn norm_sq(&self) -> Q {
        self.dot(self)
    }

    pub fn scaled(&self, a: &Q) -> SparseVec {
        if a.is_zero() {
            return SparseVec::new();
        }
        SparseVec(self.0.iter().map(|(v, c)| (*v, c * a)).collect())
    }

    /// self += a·x
    pub fn axpy(&mut self, a: &Q, x: &SparseVec) {
        for (v, c) in x.iter() {
            self.add_at(v, &(c * a));
        }
    }
}

/// Levels of the graph by distance to a source set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistancePartition {
    levels: Vec<Vec<usize>>,
    level_of: Vec<usize>,
    sources: Vec<usize>,
}

impl DistancePartition {
    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> &[usize] {
        self.levels.get(n).map_or(&[], |l| l.as_slice())
    }

    pub fn level_of(&self, v: usize) -> usize {
        self.level_of[v]
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }
}

/// Multi-source BFS layering.
pub fn distance_partition(g: &RootedGraph, sources: &[usize]) -> Result<DistancePartition> {
    if sources.is_empty() {
        return Err(Error::InvalidParameter("source set is empty".into()));
    }
    let n = g.num_vertices();
    let mut level_of = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    let mut srcs: Vec<usize> = sources.to_vec();
    srcs.sort_unstable();
    srcs.dedup();
    for &s in &srcs {
        if s >= n {
            return Err(Error::InvalidParameter(format!("source vertex {s} out of range")));
        }
        level_of[s] = 0;
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            if level_of[u] == usize::MAX {
                level_of[u] = level_of[v] + 1;
                queue.push_back(u);
            }
        }
    }
    let depth = level_of.iter().copied().max().unwrap_or(0);
    let mut levels = vec![Vec::new(); depth + 1];
    for (v, &l) in level_of.iter().enumerate() {
        levels[l].push(v);
    }
    Ok(DistancePartition {
        levels,
        level_of,
        sources: srcs,
    })
}

/// A⁺, A⁰, A⁻ as neighbour lists split by level difference.
#[derive(Clone, Debug)]
pub struct QuantumComponents {
    partition: DistancePartition,
    up: Vec<Vec<usize>>,
    same: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    interior_depth: Option<usize>,
}

pub fn quantum_components(g: &RootedGraph, partition: DistancePartition) -> QuantumComponents {
    let n = g.num_vertices();
    let mut up = vec![Vec::new(); n];
    let mut same = vec![Vec::new(); n];
    let mut down = vec![Vec::new(); n];
    for v in 0..n {
        let lv = partition.level_of(v);
        for &u in g.neighbors(v) {
            let lu = partition.level_of(u);
            if lu == lv + 1 {
                up[v].push(u);
            } else if lu == lv {
                same[v].push(u);
            } else {
                down[v].push(u);
            }
        }
    }
    let dist = g.distances_from(g.root());
    let radius = g.faithful_radius();
    let complete = |v: usize| radius.covers(dist[v] + 1);
    let mut interior_depth = None;
    for (k, level) in partition.levels().iter().enumerate() {
        if level.iter().all(|&v| complete(v)) {
            interior_depth = Some(k);
        } else {
            break;
        }
    }
    QuantumComponents {
        partition,
        up,
        same,
        down,
        interior_depth,
    }
}

fn apply(lists: &[Vec<usize>], x: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for (v, c) in x.iter() {
        for &u in &lists[v] {
            out.add_at(u, c);
        }
    }
    out
}

impl QuantumComponents {
    pub fn partition(&self) -> &DistancePartition {
        &self.partition
    }

    /// Deepest level such that it and all earlier levels are interior.
    pub fn interior_depth(&self) -> Option<usize> {
        self.interior_depth
    }

    pub fn plus(&self, x: &SparseVec) -> SparseVec {
        apply(&self.up, x)
    }

    pub fn zero(&self, x: &SparseVec) -> SparseVec {
        apply(&self.same, x)
    }

    pub fn minus(&self, x: &SparseVec) -> SparseVec {
        apply(&self.down, x)
    }

    pub fn adjacency(&self, x: &SparseVec) -> SparseVec {
        let mut out = self.plus(x);
        out.axpy(&Q::one(), &self.zero(x));
        out.axpy(&Q::one(), &self.minus(x));
        out
    }

    /// Structural audit: A⁻ is the transpose of A⁺, A⁰ is symmetric, A⁺
    /// raises the level by one and the three parts recover A.
    pub fn is_consistent(&self, g: &RootedGraph) -> bool {
        let n = g.num_vertices();
        let edge_set: HashSet<(usize, usize)> = (0..n).flat_map(|v| g.neighbors(v).iter().map(move |&u| (v, u))).collect();
        let mut parts: HashSet<(usize, usize)> = HashSet::new();
        for v in 0..n {
            let lv = self.partition.level_of(v);
            for &u in &self.up[v] {
                if self.partition.level_of(u) != lv + 1 || !self.down[u].contains(&v) {
                    return false;
                }
                parts.insert((v, u));
            }
            for &u in &self.same[v] {
                if !self.same[u].contains(&v) {
                    return false;
                }
                parts.insert((v, u));
            }
            for &u in &self.down[v] {
                if !self.up[u].contains(&v) {
                    return false;
                }
                parts.insert((v, u));
            }
        }
        parts == edge_set
    }

    /// The single level carrying `x`.
    pub fn level_of_vector(&self, x: &SparseVec) -> Result<usize> {
        let mut levels = x.support().map(|v| self.partition.level_of(v));
        let first = levels.next().ok_or(Error::ZeroVector)?;
        if levels.all(|l| l == first) {
            Ok(first)
        } else {
            Err(Error::MixedLevels)
        }
    }

    /// Number of Jacobi entries that can be certified for a vacuum on
    /// `level`: entry n uses levels up to `level + n`.
    pub fn certified_depth(&self, level: usize) -> usize {
        match self.interior_depth {
            Some(k) if level <= k => k - level + 1,
            _ => 0,
        }
    }

    /// Splits `x` into its per-level components.
    pub fn split_levels(&self, x: &SparseVec) -> BTreeMap<usize, SparseVec> {
        let mut out: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for (v, c) in x.iter() {
            out.entry(self.partition.level_of(v)).or_default().add_at(v, c);
        }
        out
    }
}

/// Verifies the J-vacuum relations for `depth` steps and returns the Jacobi
/// parameters they determine. A zero iterate ends the sequence.
pub fn check_jvacuum(qc: &QuantumComponents, xi: &SparseVec, depth: usize) -> Result<JacobiParams> {
    let level = qc.level_of_vector(xi)?;
    let available = qc.certified_depth(level);
    if depth > available {
        return Err(Error::DepthExceeded {
            requested: depth,
            available,
        });
    }
    if let Some((v, _)) = qc.minus(xi).iter().next() {
        return Err(Error::NotVacuum { vertex: v });
    }
    let mut alpha = Vec::with_capacity(depth);
    let mut omega = Vec::with_capacity(depth);
    let mut psi = xi.clone();
    let mut norm = psi.norm_sq();
    for step in 0..depth {
        let a0 = qc.zero(&psi);
        let a = a0.dot(&psi) / &norm;
        if a0 != psi.scaled(&a) {
            return Err(Error::NotJVacuum { step });
        }
        let next = qc.plus(&psi);
        let next_norm = next.norm_sq();
        let w = &next_norm / &norm;
        if qc.minus(&next) != psi.scaled(&w) {
            return Err(Error::NotJVacuum { step });
        }
        alpha.push(a);
        omega.push(w.clone());
        if next.is_zero() {
            return JacobiParams::finite(alpha, omega[..step].to_vec());
        }
        psi = next;
        norm = next_norm;
    }
    JacobiParams::truncated(alpha, omega)
}

/// A certified J-vacuum vector.
#[derive(Clone, Debug, PartialEq)]
pub struct JVacuum {
    pub vector: SparseVec,
    pub level: usize,
    pub jacobi: JacobiParams,
    pub norm_sq: Q,
}

impl JVacuum {
    /// Certifies `vector` to the full depth its level allows.
    pub fn certify(qc: &QuantumComponents, vector: SparseVec) -> Result<JVacuum> {
        let level = qc.level_of_vector(&vector)?;
        let jacobi = check_jvacuum(qc, &vector, qc.certified_depth(level))?;
        let norm_sq = vector.norm_sq();
        Ok(JVacuum {
            vector,
            level,
            jacobi,
            norm_sq,
        })
    }

    /// ‖A⁺ⁿ⁺¹ξ‖² = ωₙ‖A⁺ⁿξ‖² for every certified n.
    pub fn norm_recursion_holds(&self, qc: &QuantumComponents) -> bool {
        let mut psi = self.vector.clone();
        for n in 0..self.jacobi.omega().len() {
            let next = qc.plus(&psi);
            if next.norm_sq() != &self.jacobi.omega()[n] * psi.norm_sq() {
                return false;
            }
            psi = next;
        }
        true
    }
}

/// Distance-adapted J-vacua ordered by level.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VacuumSet {
    vacua: Vec<JVacuum>,
}

impl VacuumSet {
    pub fn new(mut vacua: Vec<JVacuum>) -> Self {
        vacua.sort_by_key(|v| v.level);
        VacuumSet { vacua }
    }

    pub fn vacua(&self) -> &[JVacuum] {
        &self.vacua
    }

    pub fn len(&self) -> usize {
        self.vacua.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vacua.is_empty()
    }

    pub fn at_level(&self, level: usize) -> impl Iterator<Item = &JVacuum> {
        self.vacua.iter().filter(move |v| v.level == level)
    }

    /// Exact pairwise orthogonality.
    pub fn is_orthogonal(&self) -> bool {
        let vectors: Vec<&SparseVec> = self.vacua.iter().map(|v| &v.vector).collect();
        pairwise_orthogonal(&vectors)
    }
}

/// Pairwise orthogonality, testing only pairs whose supports meet.
fn pairwise_orthogonal(vectors: &[&SparseVec]) -> bool {
    let mut by_vertex: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, x) in vectors.iter().enumerate() {
        for v in x.support() {
            by_vertex.entry(v).or_default().push(i);
        }
    }
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    for ids in by_vertex.values() {
        for (k, &i) in ids.iter().enumerate() {
            for &j in &ids[k + 1..] {
                if seen.insert((i, j)) && !vectors[i].dot(vectors[j]).is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// Splits raw vacuum vectors by level, certifies each component, and
/// orthogonalizes by Gram–Schmidt within groups sharing level and
/// J-sequence. Zero vectors are dropped.
pub fn orthogonalize_vacuum_set(qc: &QuantumComponents, raw: &[SparseVec]) -> Result<VacuumSet> {
    let mut certified = Vec::new();
    for x in raw {
        for (_, part) in qc.split_levels(x) {
            certified.push(JVacuum::certify(qc, part)?);
        }
    }
    Ok(gram_schmidt_groups(certified))
}

fn gram_schmidt_groups(vacua: Vec<JVacuum>) -> VacuumSet {
    let mut groups: Vec<(usize, JacobiParams, Vec<JVacuum>)> = Vec::new();
    for v in vacua {
        let group = match groups.iter_mut().position(|(l, j, _)| *l == v.level && *j == v.jacobi) {
            Some(i) => &mut groups[i].2,
            None => {
                groups.push((v.level, v.jacobi.clone(), Vec::new()));
                &mut groups.last_mut().expect("just pushed").2
            }
        };
        let mut w = v.vector.clone();
        for u in group.iter() {
            let c = -(w.dot(&u.vector) / &u.norm_sq);
            w.axpy(&c, &u.vector);
        }
        if !w.is_zero() {
            let norm_sq = w.norm_sq();
            group.push(JVacuum {
                vector: w,
                norm_sq,
                ..v
            });
        }
    }
    VacuumSet::new(groups.into_iter().flat_map(|g| g.2).collect())
}

/// Rational nullspace basis of a 0/1 matrix given by rows of column sets.
fn nullspace(rows: &[Vec<usize>], cols: usize) -> Vec<Vec<Q>> {
    let mut m: Vec<Vec<Q>> = rows
        .iter()
        .map(|r| {
            let mut row = vec![Q::zero(); cols];
            for &c in r {
                row[c] = Q::one();
            }
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in 0..cols {
                    let d = &f * &m[r][k];
                    m[i][k] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][f].clone();
            }
            v
        })
        .collect()
}

/// Candidate vacuum vectors on every interior level: on level 0 the
/// all-ones vector of the source set and its sibling differences, on later
/// levels a basis of ker A⁻ computed block by block (vertices sharing a
/// down-neighbour form a block; a block below a single vertex uses sibling
/// differences).
pub fn vacuum_candidates(qc: &QuantumComponents) -> Vec<SparseVec> {
    let mut out = Vec::new();
    let Some(depth) = qc.interior_depth() else {
        return out;
    };
    let level0 = qc.partition().level(0);
    out.push(SparseVec::from_pairs(level0.iter().map(|&x| (x, Q::one()))));
    out.extend(sibling_differences(level0));
    for level in 1..=depth {
        let verts = qc.partition().level(level);
        let pos: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        // union of vertices sharing a down-neighbour
        let mut parent: Vec<usize> = (0..verts.len()).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            p[i] = r;
            r
        }
        for &w in qc.partition().level(level - 1) {
            let ups: Vec<usize> = qc.up[w].iter().map(|u| pos[u]).collect();
            for pair in ups.windows(2) {
                let (a, b) = (find(&mut parent, pair[0]), find(&mut parent, pair[1]));
                parent[a] = b;
            }
        }
        let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..verts.len() {
            let r = find(&mut parent, i);
            blocks.entry(r).or_default().push(verts[i]);
        }
        for block in blocks.values() {
            let mut parents: Vec<usize> = block.iter().flat_map(|&v| qc.down[v].iter().copied()).collect();
            parents.sort_unstable();
            parents.dedup();
            if parents.len() == 1 {
                out.extend(sibling_differences(block));
                continue;
            }
            let col: HashMap<usize, usize> = block.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let rows: Vec<Vec<usize>> = parents
                .iter()
                .map(|&p| qc.up[p].iter().filter_map(|u| col.get(u).copied()).collect())
                .collect();
            for v in nullspace(&rows, block.len()) {
                out.push(SparseVec::from_pairs(block.iter().copied().zip(v)));
            }
        }
    }
    out
}

/// Candidate vector that failed certification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejected {
    pub level: usize,
    pub reason: String,
}

/// Certifies the candidates of [`vacuum_candidates`], orthogonalizes the
/// J-vacua among them and lists the rest.
pub fn generic_vacuum_set(qc: &QuantumComponents) -> (VacuumSet, Vec<Rejected>) {
    let mut ok = Vec::new();
    let mut rejected = Vec::new();
    for x in vacuum_candidates(qc) {
        let level = qc.level_of_vector(&x).unwrap_or(0);
        match JVacuum::certify(qc, x) {
            Ok(v) => ok.push(v),
            Err(e) => rejected.push(Rejected {
                level,
                reason: e.to_string(),
            }),
        }
    }
    (gram_schmidt_groups(ok), rejected)
}

/// Sizes of the recursively built sets Bₙ against the level sizes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelAudit {
    pub level: usize,
    pub basis_size: usize,
    pub level_size: usize,
    pub orthogonal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratingReport {
    pub levels: Vec<LevelAudit>,
    pub first_deficient: Option<usize>,
}

impl GeneratingReport {
    pub fn is_generating(&self) -> bool {
        self.first_deficient.is_none()
    }
}

/// Builds B₀ = Ξ₀, Bₙ₊₁ = (A⁺Bₙ ∪ Ξₙ₊₁) \ {0} and checks that each Bₙ is an
/// orthogonal family of |𝒱ₙ| nonzero vectors, hence a basis of level n.
pub fn generating_check(qc: &QuantumComponents, vs: &VacuumSet, up_to_level: usize) -> Result<GeneratingReport> {
    let available = qc.interior_depth().unwrap_or(0);
    if qc.interior_depth().is_none() || up_to_level > available {
        return Err(Error::DepthExceeded {
            requested: up_to_level,
            available,
        });
    }
    let mut levels = Vec::new();
    let mut first_deficient = None;
    let mut basis: Vec<SparseVec> = Vec::new();
    for n in 0..=up_to_level {
        let mut next: Vec<SparseVec> = basis.iter().map(|b| qc.plus(b)).filter(|b| !b.is_zero()).collect();
        next.extend(vs.at_level(n).map(|v| v.vector.clone()));
        basis = next;
        let refs: Vec<&SparseVec> = basis.iter().collect();
        let audit = LevelAudit {
            level: n,
            basis_size: basis.len(),
            level_size: qc.partition().level(n).len(),
            orthogonal: pairwise_orthogonal(&refs),
        };
        if first_deficient.is_none() && (audit.basis_size != audit.level_size || !audit.orthogonal) {
            first_deficient = Some(n);
        }
        levels.push(audit);
    }
    Ok(GeneratingReport { levels, first_deficient })
}

/// Explicit vacuum families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinFamily {
    /// Rooted tree with n children per vertex, vacua from the root.
    Tn { n: u32 },
    /// Homogeneous tree of degree n, vacua from the root.
    Hn { n: u32 },
    /// Free product of complete graphs on n+1 and m+1 vertices, vacua from
    /// the first factor's vertex set.
    KnKm { n: u32, m: u32 },
    /// Free product of a complete graph on n+1 vertices with the star having
    /// m leaves (rooted at its center), vacua from the first factor.
    KnFm { n: u32, m: u32 },
}

/// A truncated graph with its quantum components and vacuum set.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub graph: RootedGraph,
    pub qc: QuantumComponents,
    pub vacua: VacuumSet,
}

/// Σ_{j≤k}(δc_j − δc_{k+1}) for k = 1..r−1.
fn sibling_differences(children: &[usize]) -> Vec<SparseVec> {
    (1..children.len())
        .map(|k| {
            let mut x = SparseVec::new();
            for &c in &children[..k] {
                x.add_at(c, &Q::one());
            }
            x.add_at(children[k], &-Q::from_integer(k.into()));
            x
        })
        .collect()
}

/// Builds the family on a truncation whose levels 0..=depth+1 are interior,
/// so vacua on level ℓ ≤ depth carry at least two certified Jacobi entries.
pub fn builtin_vacuum_set(family: BuiltinFamily, depth: usize) -> Result<Decomposition> {
    let d = u32::try_from(depth).map_err(|_| Error::InvalidParameter("depth too large".into()))?;
    let (graph, level0) = match family {
        BuiltinFamily::Tn { n } | BuiltinFamily::Hn { n } => {
            let graph = match family {
                BuiltinFamily::Tn { .. } => make_standard(Family::Tn { n, depth: d + 2 })?,
                _ => {
                    if n < 2 {
                        return Err(Error::InvalidParameter("homogeneous tree needs degree at least 2".into()));
                    }
                    make_standard(Family::Hn { n, depth: d + 2 })?
                }
            };
            (graph, None)
        }
        BuiltinFamily::KnKm { n, m } | BuiltinFamily::KnFm { n, m } => {
            let second = match family {
                BuiltinFamily::KnKm { .. } => Family::K(m),
                _ => Family::F(m),
            };
            let graph = m_free_product(&[make_standard(Family::K(n))?, make_standard(second)?], depth + 3)?;
            // x₀ = e, then the first factor's letters in order
            let mut xs = vec![graph.root()];
            xs.extend((0..graph.num_vertices()).filter(|&v| {
                let w = graph.vertex(v);
                w.len() == 1 && w.first().is_some_and(|l| l.factor == 1)
            }));
            (graph, Some(xs))
        }
    };
    let sources = level0.clone().unwrap_or_else(|| vec![graph.root()]);
    let qc = quantum_components(&graph, distance_partition(&graph, &sources)?);
    let interior = qc.interior_depth().unwrap_or(0);
    let mut raw: Vec<SparseVec> = Vec::new();
    match &level0 {
        None => raw.push(SparseVec::delta(graph.root())),
        Some(xs) => {
            raw.push(SparseVec::from_pairs(xs.iter().map(|&x| (x, Q::one()))));
            raw.extend(sibling_differences(xs));
        }
    }
    for level in 1..=interior {
        for &w in qc.partition().level(level - 1) {
            let mut children = qc.up[w].clone();
            children.sort_unstable();
            raw.extend(sibling_differences(&children));
        }
    }
    let vacua = raw
        .into_iter()
        .map(|x| JVacuum::certify(&qc, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(Decomposition {
        graph,
        qc,
        vacua: VacuumSet::new(vacua),
    })
}

/// Options for periodic-tail detection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TailOptions {
    pub max_period: usize,
    /// Consecutive repetitions of the cycle required inside the window.
    pub repetitions: usize,
}

impl Default for TailOptions {
    fn default() -> Self {
        TailOptions {
            max_period: 2,
            repetitions: 3,
        }
    }
}

/// Smallest preperiod (then smallest period) such that the certified window
/// repeats the cycle at least `repetitions` times.
pub fn detect_tail(alpha: &[Q], omega: &[Q], opts: TailOptions) -> Option<(usize, usize)> {
    let w = alpha.len().min(omega.len());
    for pre in 0..w {
        for per in 1..=opts.max_period {
            if w < pre + opts.repetitions * per {
                continue;
            }
            if (pre..w - per).all(|i| alpha[i] == alpha[i + per] && omega[i] == omega[i + per]) {
                return Some((pre, per));
            }
        }
    }
    None
}

/// One J-sequence class of vacua and its spectral measure.
#[derive(Clone, Debug)]
pub struct ClassSpectrum {
    /// Certified window of the longest member.
    pub window: JacobiParams,
    /// Window extended by the detected tail, or the window itself.
    pub jacobi: JacobiParams,
    pub tail_detected: bool,
    pub multiplicity: usize,
    pub levels: Vec<usize>,
    pub measure: SpectralMeasure,
}

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub classes: Vec<ClassSpectrum>,
    /// Union of the continuous supports of classes with a detected tail.
    pub support: Vec<[f64; 2]>,
    /// Atoms of those classes, deduplicated within 10⁻⁸.
    pub point_spectrum: Vec<f64>,
}

fn is_prefix(short: &JacobiParams, long: &JacobiParams) -> bool {
    if short.tail() == Tail::Finite || long.tail() == Tail::Finite {
        return short == long;
    }
    long.alpha().starts_with(short.alpha()) && long.omega().starts_with(short.omega())
}

/// Groups vacua into J-sequence classes (a shorter certified window joins
/// the longest class it is a prefix of), extends each class by its detected
/// tail and computes the measures.
pub fn spectrum(vs: &VacuumSet, opts: TailOptions) -> Result<SpectrumReport> {
    let mut order: Vec<&JVacuum> = vs.vacua().iter().filter(|v| !v.jacobi.alpha().is_empty()).collect();
    order.sort_by_key(|v| std::cmp::Reverse(v.jacobi.alpha().len()));
    let mut classes: Vec<(JacobiParams, usize, Vec<usize>)> = Vec::new();
    for v in order {
        match classes.iter_mut().find(|(j, _, _)| is_prefix(&v.jacobi, j)) {
            Some(c) => {
                c.1 += 1;
                if !c.2.contains(&v.level) {
                    c.2.push(v.level);
                }
            }
            None => classes.push((v.jacobi.clone(), 1, vec![v.level])),
        }
    }
    let mut out = Vec::new();
    for (window, multiplicity, mut levels) in classes {
        levels.sort_unstable();
        let (jacobi, tail_detected) = match window.tail() {
            Tail::Finite => (window.clone(), true),
            _ => match detect_tail(window.alpha(), window.omega(), opts) {
                Some((pre, per)) => (
                    JacobiParams::periodic(window.alpha().to_vec(), window.omega().to_vec(), pre, per)?,
                    true,
                ),
                None => (window.clone(), false),
            },
        };
        let measure = SpectralMeasure::from_jacobi(&jacobi)?;
        out.push(ClassSpectrum {
            window,
            jacobi,
            tail_detected,
            multiplicity,
            levels,
            measure,
        });
    }
    let mut support: Vec<[f64; 2]> = Vec::new();
    let mut points: Vec<f64> = Vec::new();
    for c in out.iter().filter(|c| c.tail_detected) {
        support.extend(c.measure.intervals().iter().copied());
        points.extend(c.measure.atoms().iter().map(|a| a.0));
    }
    support.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let mut merged: Vec<[f64; 2]> = Vec::new();
    for iv in support {
        match merged.last_mut() {
            Some(last) if iv[0] <= last[1] + 1e-9 => last[1] = last[1].max(iv[1]),
            _ => merged.push(iv),
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() < 1e-8);
    Ok(SpectrumReport {
        classes: out,
        support: merged,
        point_spectrum: points,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassJson {
    pub jacobi: JacobiJson,
    pub tail_detected: bool,
    pub multiplicity: usize,
    pub levels: Vec<usize>,
    pub atoms: Vec<[f64; 2]>,
    pub intervals: Vec<[f64; 2]>,
}

/// Decomposition report: level sizes, vacuum classes and the union spectrum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub level_sizes: Vec<usize>,
    pub interior_depth: Option<usize>,
    pub classes: Vec<ClassJson>,
    pub support: Vec<[f64; 2]>,
    pub point_spectrum: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub generating: Option<GeneratingReport>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub rejected: Vec<Rejected>,
}

pub fn report_json(qc: &QuantumComponents, spec: &SpectrumReport) -> DecompositionJson {
    let interior = qc.interior_depth();
    DecompositionJson {
        level_sizes: qc
            .partition()
            .sizes()
            .into_iter()
            .take(interior.map_or(0, |k| k + 1))
            .collect(),
        interior_depth: interior,
        classes: spec
            .classes
            .iter()
            .map(|c| ClassJson {
                jacobi: c.jacobi.to_json(),
                tail_detected: c.tail_detected,
                multiplicity: c.multiplicity,
                levels: c.levels.clone(),
                atoms: c.measure.atoms().iter().map(|&(x, w)| [x, w]).collect(),
                intervals: c.measure.intervals().to_vec(),
            })
            .collect(),
        support: spec.support.clone(),
        point_spectrum: spec.point_spectrum.clone(),
        generating: None,
        rejected: Vec::new(),
    }
}
