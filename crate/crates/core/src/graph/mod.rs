//! Rooted graphs with word-labelled vertices.
//!
//! Every vertex carries a reduced word of letters `(factor, id)`; the empty
//! word is the root. Standard families use factor index 1. Free products
//! label factor `i` (1-based position) letters by the vertex index inside that
//! factor, so words read leftmost-first with the leftmost letter acting
//! nearest the surface.

mod free;
mod products;
mod standard;
mod walks;

pub use free::{branch_graph, m_free_product, m_free_product_with_budget, orth_iter, orth_iter_with_factors, DEFAULT_VERTEX_BUDGET};
pub use products::{comb_product, orth_product, star_product};
pub use standard::{make_standard, Family};
pub use walks::{moments, VertexState};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub factor: u16,
    pub id: u32,
}

impl Letter {
    pub fn new(factor: u16, id: u32) -> Self {
        Letter { factor, id }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Vertex {
    pub word: Vec<Letter>,
}

impl Vertex {
    pub fn root() -> Self {
        Vertex { word: Vec::new() }
    }

    pub fn letter(factor: u16, id: u32) -> Self {
        Vertex {
            word: vec![Letter::new(factor, id)],
        }
    }

    pub fn from_letters(word: Vec<Letter>) -> Self {
        Vertex { word }
    }

    pub fn is_root(&self) -> bool {
        self.word.is_empty()
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.word.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.word.last().copied()
    }

    pub fn is_reduced(&self) -> bool {
        self.word.windows(2).all(|w| w[0].factor != w[1].factor)
    }

    /// `self` followed by `suffix` (the suffix acts first).
    pub fn concat(&self, suffix: &Vertex) -> Vertex {
        let mut word = self.word.clone();
        word.extend_from_slice(&suffix.word);
        Vertex { word }
    }

    /// Parses "2:1,1:2"; the empty string or "e" is the root.
    pub fn parse(text: &str) -> Option<Vertex> {
        let text = text.trim();
        if text.is_empty() || text == "e" {
            return Some(Vertex::root());
        }
        let mut word = Vec::new();
        for part in text.split(',') {
            let (f, id) = part.trim().split_once(':')?;
            word.push(Letter::new(f.trim().parse().ok()?, id.trim().parse().ok()?));
        }
        Some(Vertex { word })
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self.word.iter().map(|l| format!("{}:{}", l.factor, l.id)).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Distance from the root below which every vertex has its intended
/// neighbourhood.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Radius {
    Finite(usize),
    Infinite,
}

impl Radius {
    pub fn min(self, other: Radius) -> Radius {
        match (self, other) {
            (Radius::Infinite, r) | (r, Radius::Infinite) => r,
            (Radius::Finite(a), Radius::Finite(b)) => Radius::Finite(a.min(b)),
        }
    }

    pub fn covers(self, needed: usize) -> bool {
        match self {
            Radius::Infinite => true,
            Radius::Finite(r) => needed <= r,
        }
    }

    pub fn saturating_sub(self, d: usize) -> Radius {
        match self {
            Radius::Infinite => Radius::Infinite,
            Radius::Finite(r) => Radius::Finite(r.saturating_sub(d)),
        }
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Radius::Finite(r) => Some(r),
            Radius::Infinite => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedGraph {
    vertices: Vec<Vertex>,
    adjacency: Vec<Vec<usize>>,
    root: usize,
    faithful_radius: Radius,
}

impl RootedGraph {
    /// Validates and builds a graph; duplicate edges are merged.
    pub fn new(
        vertices: Vec<Vertex>,
        edges: impl IntoIterator<Item = (usize, usize)>,
        root: usize,
        faithful_radius: Radius,
    ) -> Result<Self> {
        let n = vertices.len();
        if root >= n {
            return Err(Error::InvalidGraph(format!("root {root} out of range ({n} vertices)")));
        }
        let mut adjacency = vec![Vec::new(); n];
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a},{b}) out of range")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at {a}")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let mut seen = HashSet::with_capacity(n);
        for v in &vertices {
            if !v.is_reduced() {
                return Err(Error::InvalidGraph(format!("word {v} is not reduced")));
            }
            if !seen.insert(v) {
                return Err(Error::InvalidGraph(format!("duplicate vertex label {v}")));
            }
        }
        let g = RootedGraph {
            vertices,
            adjacency,
            root,
            faithful_radius,
        };
        if g.distances_from(root).contains(&usize::MAX) {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(g)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn faithful_radius(&self) -> Radius {
        self.faithful_radius
    }

    pub fn with_radius(mut self, radius: Radius) -> Self {
        self.faithful_radius = radius;
        self
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Vertex {
        &self.vertices[i]
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    /// Edges as (i, j) with i < j, in vertex order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn distances_from(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertices.len()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn index_of(&self, word: &Vertex) -> Option<usize> {
        self.vertices.iter().position(|v| v == word)
    }

    pub fn label_index(&self) -> HashMap<&Vertex, usize> {
        self.vertices.iter().enumerate().map(|(i, v)| (v, i)).collect()
    }

    pub fn has_edges(&self) -> bool {
        self.adjacency.iter().any(|l| !l.is_empty())
    }

    /// Same graph with every non-root vertex relabelled as the single letter
    /// `(factor, vertex index)`.
    pub fn atomized(&self, factor: u16) -> RootedGraph {
        let vertices = (0..self.vertices.len())
            .map(|i| {
                if i == self.root {
                    Vertex::root()
                } else {
                    Vertex::letter(factor, i as u32)
                }
            })
            .collect();
        RootedGraph {
            vertices,
            adjacency: self.adjacency.clone(),
            root: self.root,
            faithful_radius: self.faithful_radius,
        }
    }

    /// Renames factor indices in every word.
    pub fn relabel_factors(&self, map: impl Fn(u16) -> u16) -> RootedGraph {
        let vertices = self
            .vertices
            .iter()
            .map(|v| Vertex {
                word: v.word.iter().map(|l| Letter::new(map(l.factor), l.id)).collect(),
            })
            .collect();
        RootedGraph {
            vertices,
            adjacency: self.adjacency.clone(),
            root: self.root,
            faithful_radius: self.faithful_radius,
        }
    }

    /// Subgraph induced on `keep` (which must contain the root and be
    /// connected), with labels preserved.
    pub fn induced(&self, keep: &[bool], radius: Radius) -> Result<RootedGraph> {
        let mut map = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if keep[i] {
                map[i] = vertices.len();
                vertices.push(v.clone());
            }
        }
        if map[self.root] == usize::MAX {
            return Err(Error::InvalidGraph("induced subgraph must keep the root".into()));
        }
        let edges: Vec<(usize, usize)> = self
            .edges()
            .filter(|&(a, b)| keep[a] && keep[b])
            .map(|(a, b)| (map[a], map[b]))
            .collect();
        RootedGraph::new(vertices, edges, map[self.root], radius)
    }

    /// True when both graphs have the same labels, root label and labelled
    /// edge set.
    pub fn same_labelled(&self, other: &RootedGraph) -> bool {
        if self.num_vertices() != other.num_vertices() || self.num_edges() != other.num_edges() {
            return false;
        }
        if self.vertex(self.root) != other.vertex(other.root) {
            return false;
        }
        let index = other.label_index();
        let mut map = Vec::with_capacity(self.num_vertices());
        for v in &self.vertices {
            match index.get(v) {
                Some(&j) => map.push(j),
                None => return false,
            }
        }
        self.edges().all(|(a, b)| other.adjacency[map[a]].binary_search(&map[b]).is_ok())
    }

    /// Compares the labelled subgraphs induced on the balls of the given
    /// radius around the roots.
    pub fn same_labelled_ball(&self, other: &RootedGraph, radius: usize) -> bool {
        let collect = |g: &RootedGraph| {
            let dist = g.distances_from(g.root);
            let mut verts: Vec<Vertex> = Vec::new();
            let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
            for (i, v) in g.vertices.iter().enumerate() {
                if dist[i] <= radius {
                    verts.push(v.clone());
                }
            }
            for (a, b) in g.edges() {
                if dist[a] <= radius && dist[b] <= radius {
                    let (x, y) = (g.vertices[a].clone(), g.vertices[b].clone());
                    edges.push(if x < y { (x, y) } else { (y, x) });
                }
            }
            verts.sort();
            edges.sort();
            (verts, edges)
        };
        self.vertex(self.root) == other.vertex(other.root) && collect(self) == collect(other)
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self
                .vertices
                .iter()
                .enumerate()
                .map(|(i, v)| VertexJson {
                    id: i,
                    word: v.word.iter().map(|l| (l.factor, l.id)).collect(),
                })
                .collect(),
            edges: self.edges().map(|(a, b)| [a, b]).collect(),
            root: self.root,
            faithful_radius: match self.faithful_radius {
                Radius::Infinite => RadiusJson::Text("inf".into()),
                Radius::Finite(r) => RadiusJson::Int(r),
            },
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<RootedGraph> {
        let n = json.vertices.len();
        let mut vertices = vec![None; n];
        for v in &json.vertices {
            if v.id >= n || vertices[v.id].is_some() {
                return Err(Error::InvalidGraph(format!("bad vertex id {}", v.id)));
            }
            vertices[v.id] = Some(Vertex {
                word: v.word.iter().map(|&(f, l)| Letter::new(f, l)).collect(),
            });
        }
        let vertices: Vec<Vertex> = vertices.into_iter().map(|v| v.unwrap_or_default()).collect();
        let radius = match &json.faithful_radius {
            RadiusJson::Int(r) => Radius::Finite(*r),
            RadiusJson::Text(t) if t == "inf" => Radius::Infinite,
            RadiusJson::Text(t) => return Err(Error::InvalidGraph(format!("bad radius {t:?}"))),
        };
        RootedGraph::new(vertices, json.edges.iter().map(|e| (e[0], e[1])), json.root, radius)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VertexJson {
    pub id: usize,
    pub word: Vec<(u16, u32)>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum RadiusJson {
    Int(usize),
    Text(String),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GraphJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<[usize; 2]>,
    pub root: usize,
    pub faithful_radius: RadiusJson,
}
