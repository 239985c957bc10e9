//! Bicolored labeled graphs encoding 2-stratifolds.
//!
//! White vertices are the surface pieces `W` (labelled by genus, negative for
//! nonorientable pieces), black vertices are the branch circles, and an edge is
//! a boundary circle of a surface piece together with the signed degree of the
//! covering map onto its branch circle.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WhiteVertex {
    pub id: String,
    /// Neumann convention: `g >= 0` is orientable of genus `g`, `g < 0` has
    /// `|g|` crosscaps.
    pub genus: i64,
}

impl WhiteVertex {
    pub fn is_orientable(&self) -> bool {
        self.genus >= 0
    }

    /// Number of surface generators `y_j` in the standard presentation.
    pub fn surface_rank(&self) -> usize {
        if self.genus >= 0 {
            2 * self.genus as usize
        } else {
            self.genus.unsigned_abs() as usize
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlackVertex {
    pub id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: String,
    pub white: String,
    pub black: String,
    /// Signed degree of the boundary circle onto its branch circle.
    pub label: i64,
}

/// A vertex reference, ordered by id (ids are unique across both colors).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vertex<'a> {
    White(&'a str),
    Black(&'a str),
}

impl<'a> Vertex<'a> {
    pub fn id(&self) -> &'a str {
        match self {
            Vertex::White(id) | Vertex::Black(id) => id,
        }
    }
}

impl PartialOrd for Vertex<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Vertex<'_> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.id().cmp(other.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("edge {edge:?} refers to unknown {color} vertex {vertex:?}")]
    DanglingEndpoint {
        edge: String,
        vertex: String,
        color: &'static str,
    },
    #[error("unknown white vertex {0:?}")]
    UnknownWhite(String),
    #[error("unknown black vertex {0:?}")]
    UnknownBlack(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("invalid graph: {}", display_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("spanning-tree edge {edge:?} has non-positive label {label}")]
    NotNormalized { edge: String, label: i64 },
}

fn display_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// A broken [`StratifoldGraph`] invariant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Violation {
    Empty,
    ZeroLabel { edge: String },
    BranchTooSmall { black: String, degree: u64 },
    IsolatedBlack { black: String },
    IsolatedWhite { white: String },
    Disconnected { components: usize },
}

impl Violation {
    /// Stable machine-readable rule name.
    pub fn rule(&self) -> &'static str {
        match self {
            Violation::Empty => "Empty",
            Violation::ZeroLabel { .. } => "ZeroLabel",
            Violation::BranchTooSmall { .. } => "BranchTooSmall",
            Violation::IsolatedBlack { .. } => "IsolatedBlack",
            Violation::IsolatedWhite { .. } => "IsolatedWhite",
            Violation::Disconnected { .. } => "Disconnected",
        }
    }

    /// The vertex or edge the violation is about, if any.
    pub fn subject(&self) -> Option<&str> {
        match self {
            Violation::ZeroLabel { edge } => Some(edge),
            Violation::BranchTooSmall { black, .. } | Violation::IsolatedBlack { black } => {
                Some(black)
            }
            Violation::IsolatedWhite { white } => Some(white),
            Violation::Empty | Violation::Disconnected { .. } => None,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "graph has no vertices"),
            Violation::ZeroLabel { edge } => write!(f, "edge {edge} has label 0"),
            Violation::BranchTooSmall { black, degree } => {
                write!(f, "black vertex {black} has branch degree {degree} < 3")
            }
            Violation::IsolatedBlack { black } => write!(f, "black vertex {black} has no edges"),
            Violation::IsolatedWhite { white } => {
                write!(f, "white vertex {white} has no edges in a multi-vertex graph")
            }
            Violation::Disconnected { components } => {
                write!(f, "graph has {components} connected components")
            }
        }
    }
}

/// Bicolored labeled graph of a 2-stratifold.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StratifoldGraph {
    whites: BTreeMap<String, WhiteVertex>,
    blacks: BTreeMap<String, BlackVertex>,
    edges: BTreeMap<String, Edge>,
}

impl StratifoldGraph {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_fresh_vertex(&self, id: &str) -> Result<(), GraphError> {
        if self.whites.contains_key(id) || self.blacks.contains_key(id) {
            return Err(GraphError::DuplicateId(id.to_string()));
        }
        Ok(())
    }

    pub fn add_white(&mut self, id: impl Into<String>, genus: i64) -> Result<&mut Self, GraphError> {
        let id = id.into();
        self.check_fresh_vertex(&id)?;
        self.whites.insert(id.clone(), WhiteVertex { id, genus });
        Ok(self)
    }

    pub fn add_black(&mut self, id: impl Into<String>) -> Result<&mut Self, GraphError> {
        let id = id.into();
        self.check_fresh_vertex(&id)?;
        self.blacks.insert(id.clone(), BlackVertex { id });
        Ok(self)
    }

    /// Adds an edge. Endpoints must already exist; a zero label is accepted
    /// here and reported by [`validate`].
    pub fn add_edge(
        &mut self,
        id: impl Into<String>,
        white: impl Into<String>,
        black: impl Into<String>,
        label: i64,
    ) -> Result<&mut Self, GraphError> {
        let (id, white, black) = (id.into(), white.into(), black.into());
        if self.edges.contains_key(&id) {
            return Err(GraphError::DuplicateId(id));
        }
        if !self.whites.contains_key(&white) {
            return Err(GraphError::DanglingEndpoint {
                edge: id,
                vertex: white,
                color: "white",
            });
        }
        if !self.blacks.contains_key(&black) {
            return Err(GraphError::DanglingEndpoint {
                edge: id,
                vertex: black,
                color: "black",
            });
        }
        self.edges.insert(
            id.clone(),
            Edge {
                id,
                white,
                black,
                label,
            },
        );
        Ok(self)
    }

    pub fn remove_edge(&mut self, id: &str) -> Option<Edge> {
        self.edges.remove(id)
    }

    /// Removes a vertex of either color together with its incident edges.
    pub fn remove_vertex(&mut self, id: &str) -> bool {
        let found = self.whites.remove(id).is_some() || self.blacks.remove(id).is_some();
        if found {
            self.edges.retain(|_, e| e.white != id && e.black != id);
        }
        found
    }

    pub fn set_label(&mut self, edge: &str, label: i64) -> bool {
        match self.edges.get_mut(edge) {
            Some(e) => {
                e.label = label;
                true
            }
            None => false,
        }
    }

    pub fn whites(&self) -> impl Iterator<Item = &WhiteVertex> {
        self.whites.values()
    }

    pub fn blacks(&self) -> impl Iterator<Item = &BlackVertex> {
        self.blacks.values()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.values()
    }

    pub fn white(&self, id: &str) -> Option<&WhiteVertex> {
        self.whites.get(id)
    }

    pub fn black(&self, id: &str) -> Option<&BlackVertex> {
        self.blacks.get(id)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.get(id)
    }

    pub fn white_count(&self) -> usize {
        self.whites.len()
    }

    pub fn black_count(&self) -> usize {
        self.blacks.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.whites.len() + self.blacks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_count() == 0
    }

    /// Edges incident to a vertex of either color, in id order.
    pub fn incident(&self, vertex: &str) -> impl Iterator<Item = &Edge> + '_ {
        let vertex = vertex.to_string();
        self.edges
            .values()
            .filter(move |e| e.white == vertex || e.black == vertex)
    }

    pub fn degree(&self, vertex: &str) -> usize {
        self.incident(vertex).count()
    }

    fn vertex(&self, id: &str) -> Option<Vertex<'_>> {
        if let Some((k, _)) = self.whites.get_key_value(id) {
            Some(Vertex::White(k))
        } else {
            self.blacks.get_key_value(id).map(|(k, _)| Vertex::Black(k))
        }
    }

    fn vertices(&self) -> Vec<Vertex<'_>> {
        let mut all: Vec<Vertex<'_>> = self
            .whites
            .keys()
            .map(|k| Vertex::White(k))
            .chain(self.blacks.keys().map(|k| Vertex::Black(k)))
            .collect();
        all.sort();
        all
    }

    fn adjacency(&self) -> BTreeMap<&str, Vec<&Edge>> {
        let mut adj: BTreeMap<&str, Vec<&Edge>> = BTreeMap::new();
        for v in self.whites.keys().chain(self.blacks.keys()) {
            adj.insert(v, Vec::new());
        }
        for e in self.edges.values() {
            adj.get_mut(e.white.as_str()).unwrap().push(e);
            adj.get_mut(e.black.as_str()).unwrap().push(e);
        }
        adj
    }

    /// Connected components as sorted vertex-id sets, ordered by smallest id.
    pub fn components(&self) -> Vec<BTreeSet<String>> {
        let adj = self.adjacency();
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.vertices() {
            if seen.contains(v.id()) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::from([v.id()]);
            seen.insert(v.id());
            while let Some(u) = queue.pop_front() {
                comp.insert(u.to_string());
                for e in &adj[u] {
                    let other = if e.white == u { e.black.as_str() } else { e.white.as_str() };
                    if seen.insert(other) {
                        queue.push_back(other);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// The induced subgraph on a vertex set.
    pub fn induced(&self, vertices: &BTreeSet<String>) -> StratifoldGraph {
        let mut g = StratifoldGraph::new();
        for w in self.whites.values().filter(|w| vertices.contains(&w.id)) {
            g.whites.insert(w.id.clone(), w.clone());
        }
        for b in self.blacks.values().filter(|b| vertices.contains(&b.id)) {
            g.blacks.insert(b.id.clone(), b.clone());
        }
        for e in self
            .edges
            .values()
            .filter(|e| vertices.contains(&e.white) && vertices.contains(&e.black))
        {
            g.edges.insert(e.id.clone(), e.clone());
        }
        g
    }

    /// A copy with every vertex and edge id prefixed.
    pub fn with_prefix(&self, prefix: &str) -> StratifoldGraph {
        let mut g = StratifoldGraph::new();
        for w in self.whites.values() {
            let id = format!("{prefix}{}", w.id);
            g.whites.insert(id.clone(), WhiteVertex { id, genus: w.genus });
        }
        for b in self.blacks.values() {
            let id = format!("{prefix}{}", b.id);
            g.blacks.insert(id.clone(), BlackVertex { id });
        }
        for e in self.edges.values() {
            let id = format!("{prefix}{}", e.id);
            g.edges.insert(
                id.clone(),
                Edge {
                    id,
                    white: format!("{prefix}{}", e.white),
                    black: format!("{prefix}{}", e.black),
                    label: e.label,
                },
            );
        }
        g
    }

    /// Disjoint union; fails on any shared vertex or edge id.
    pub fn disjoint_union(&self, other: &StratifoldGraph) -> Result<StratifoldGraph, GraphError> {
        let mut g = self.clone();
        for w in other.whites.values() {
            g.add_white(w.id.clone(), w.genus)?;
        }
        for b in other.blacks.values() {
            g.add_black(b.id.clone())?;
        }
        for e in other.edges.values() {
            g.add_edge(e.id.clone(), e.white.clone(), e.black.clone(), e.label)?;
        }
        Ok(g)
    }

    pub fn has_id(&self, id: &str) -> bool {
        self.whites.contains_key(id) || self.blacks.contains_key(id) || self.edges.contains_key(id)
    }
}

/// Checks every [`StratifoldGraph`] invariant and reports each failure.
pub fn validate(graph: &StratifoldGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    if graph.is_empty() {
        out.push(Violation::Empty);
        return out;
    }
    for e in graph.edges() {
        if e.label == 0 {
            out.push(Violation::ZeroLabel { edge: e.id.clone() });
        }
    }
    for b in graph.blacks() {
        let mut count = 0usize;
        let mut degree = 0u64;
        for e in graph.incident(&b.id) {
            count += 1;
            degree += e.label.unsigned_abs();
        }
        if count == 0 {
            out.push(Violation::IsolatedBlack { black: b.id.clone() });
        } else if degree < 3 {
            out.push(Violation::BranchTooSmall {
                black: b.id.clone(),
                degree,
            });
        }
    }
    if graph.vertex_count() > 1 {
        for w in graph.whites() {
            if graph.degree(&w.id) == 0 {
                out.push(Violation::IsolatedWhite { white: w.id.clone() });
            }
        }
    }
    let components = graph.components().len();
    if components > 1 {
        out.push(Violation::Disconnected { components });
    }
    out
}

pub fn ensure_valid(graph: &StratifoldGraph) -> Result<(), GraphError> {
    let v = validate(graph);
    if v.is_empty() {
        Ok(())
    } else {
        Err(GraphError::Invalid(v))
    }
}

/// `{|label(e)|}` over the edges at a black vertex, sorted descending.
pub fn partition_at(graph: &StratifoldGraph, black: &str) -> Result<Vec<u64>, GraphError> {
    if graph.black(black).is_none() {
        return Err(GraphError::UnknownBlack(black.to_string()));
    }
    let mut parts: Vec<u64> = graph.incident(black).map(|e| e.label.unsigned_abs()).collect();
    parts.sort_unstable_by(|a, b| b.cmp(a));
    Ok(parts)
}

/// Euler characteristic of a single surface piece with `boundary` circles.
pub fn surface_euler(genus: i64, boundary: usize) -> i64 {
    let closed = if genus >= 0 { 2 - 2 * genus } else { 2 + genus };
    closed - boundary as i64
}

/// `χ(X) = Σ_W χ(W)`; branch circles and boundary circles contribute zero.
pub fn euler_characteristic(graph: &StratifoldGraph) -> Result<i64, GraphError> {
    ensure_valid(graph)?;
    Ok(graph
        .whites()
        .map(|w| surface_euler(w.genus, graph.degree(&w.id)))
        .sum())
}

/// Maximal tree chosen breadth-first from the smallest vertex id, scanning
/// incident edges in id order.
pub fn spanning_tree(graph: &StratifoldGraph) -> Result<BTreeSet<String>, GraphError> {
    let vertices = graph.vertices();
    let Some(root) = vertices.first() else {
        return Ok(BTreeSet::new());
    };
    let adj = graph.adjacency();
    let mut tree = BTreeSet::new();
    let mut seen: BTreeSet<&str> = BTreeSet::from([root.id()]);
    let mut queue = VecDeque::from([root.id()]);
    while let Some(u) = queue.pop_front() {
        for e in &adj[u] {
            let other = if e.white == u { e.black.as_str() } else { e.white.as_str() };
            if seen.insert(other) {
                tree.insert(e.id.clone());
                queue.push_back(other);
            }
        }
    }
    if seen.len() != vertices.len() {
        return Err(GraphError::Disconnected);
    }
    Ok(tree)
}

/// Breadth-first order of tree edges together with the child endpoint each
/// one discovers.
fn tree_discovery(graph: &StratifoldGraph) -> Result<Vec<(String, String)>, GraphError> {
    let vertices = graph.vertices();
    let Some(root) = vertices.first() else {
        return Ok(Vec::new());
    };
    let adj = graph.adjacency();
    let mut out = Vec::new();
    let mut seen: BTreeSet<&str> = BTreeSet::from([root.id()]);
    let mut queue = VecDeque::from([root.id()]);
    while let Some(u) = queue.pop_front() {
        for e in &adj[u] {
            let other = if e.white == u { e.black.as_str() } else { e.white.as_str() };
            if seen.insert(other) {
                out.push((e.id.clone(), other.to_string()));
                queue.push_back(other);
            }
        }
    }
    if seen.len() != vertices.len() {
        return Err(GraphError::Disconnected);
    }
    Ok(out)
}

/// Re-orientation moves that preserve the underlying 2-stratifold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Move {
    /// Reverse a branch circle: negate every label at the black vertex.
    FlipBlack(String),
    /// Reverse an orientable surface piece: negate every label at it.
    FlipWhite(String),
    /// Reverse one boundary circle of a nonorientable piece.
    FlipEdge(String),
}

/// Applies a move; fails if the move is not admissible on this graph.
pub fn apply_move(graph: &mut StratifoldGraph, mv: &Move) -> Result<(), GraphError> {
    match mv {
        Move::FlipBlack(b) => {
            if graph.black(b).is_none() {
                return Err(GraphError::UnknownBlack(b.clone()));
            }
            for e in graph.edges.values_mut().filter(|e| &e.black == b) {
                e.label = -e.label;
            }
        }
        Move::FlipWhite(w) => {
            match graph.white(w) {
                Some(v) if v.is_orientable() => {}
                _ => return Err(GraphError::UnknownWhite(w.clone())),
            }
            for e in graph.edges.values_mut().filter(|e| &e.white == w) {
                e.label = -e.label;
            }
        }
        Move::FlipEdge(id) => {
            let white = graph
                .edge(id)
                .map(|e| e.white.clone())
                .ok_or_else(|| GraphError::UnknownWhite(id.clone()))?;
            if graph.white(&white).is_some_and(|w| w.is_orientable()) {
                return Err(GraphError::UnknownWhite(white));
            }
            let e = graph.edges.get_mut(id).unwrap();
            e.label = -e.label;
        }
    }
    Ok(())
}

/// Makes every spanning-tree label positive by re-orienting the child vertex
/// of each tree edge, processed in breadth-first order.
pub fn normalize(graph: &StratifoldGraph) -> Result<StratifoldGraph, GraphError> {
    ensure_valid(graph)?;
    let mut out = graph.clone();
    for (edge, child) in tree_discovery(graph)? {
        if out.edges[&edge].label > 0 {
            continue;
        }
        let mv = match out.vertex(&child) {
            Some(Vertex::Black(_)) => Move::FlipBlack(child),
            Some(Vertex::White(_)) if out.whites[&child].is_orientable() => Move::FlipWhite(child),
            _ => Move::FlipEdge(edge),
        };
        apply_move(&mut out, &mv)?;
    }
    Ok(out)
}

pub fn is_normalized(graph: &StratifoldGraph) -> Result<bool, GraphError> {
    let tree = spanning_tree(graph)?;
    Ok(tree.iter().all(|e| graph.edges[e].label > 0))
}

/// Isomorphism modulo the re-orientation moves of [`Move`].
///
/// Backtracks over color-, genus- and degree-preserving vertex bijections,
/// pruned by color refinement. For each candidate bijection the signs are
/// compared through the parity system `x_b + x_w = δ` over pairs with an
/// orientable white endpoint, where `δ` records whether the parallel edge
/// bundle must be matched sign-preserving or sign-reversing.
pub fn are_isomorphic(g1: &StratifoldGraph, g2: &StratifoldGraph) -> Result<bool, GraphError> {
    ensure_valid(g1)?;
    ensure_valid(g2)?;
    Ok(find_isomorphism(g1, g2).is_some())
}

/// Vertex bijection witnessing [`are_isomorphic`], if any.
pub fn find_isomorphism(g1: &StratifoldGraph, g2: &StratifoldGraph) -> Option<BTreeMap<String, String>> {
    if g1.white_count() != g2.white_count()
        || g1.black_count() != g2.black_count()
        || g1.edge_count() != g2.edge_count()
    {
        return None;
    }
    let a = Indexed::new(g1);
    let b = Indexed::new(g2);
    let (ca, cb) = refine_colors(&a, &b);
    let mut hist_a = ca.clone();
    let mut hist_b = cb.clone();
    hist_a.sort_unstable();
    hist_b.sort_unstable();
    if hist_a != hist_b {
        return None;
    }
    let n = a.ids.len();
    let mut state = Search {
        a: &a,
        b: &b,
        ca: &ca,
        cb: &cb,
        map: vec![usize::MAX; n],
        used: vec![false; n],
        order: search_order(&a, &ca),
    };
    if state.extend(0) {
        Some(
            state
                .map
                .iter()
                .enumerate()
                .map(|(i, &j)| (a.ids[i].clone(), b.ids[j].clone()))
                .collect(),
        )
    } else {
        None
    }
}

/// Integer-indexed view of a graph used by the isomorphism search.
struct Indexed {
    ids: Vec<String>,
    /// `Some(genus)` for whites, `None` for blacks.
    genus: Vec<Option<i64>>,
    /// Neighbor -> signed labels of the parallel edges to it, sorted.
    nbrs: Vec<BTreeMap<usize, Vec<i64>>>,
}

impl Indexed {
    fn new(g: &StratifoldGraph) -> Self {
        let vertices = g.vertices();
        let index: BTreeMap<&str, usize> = vertices.iter().enumerate().map(|(i, v)| (v.id(), i)).collect();
        let genus = vertices
            .iter()
            .map(|v| match v {
                Vertex::White(id) => Some(g.whites[*id].genus),
                Vertex::Black(_) => None,
            })
            .collect();
        let mut nbrs = vec![BTreeMap::<usize, Vec<i64>>::new(); vertices.len()];
        for e in g.edges() {
            let (w, b) = (index[e.white.as_str()], index[e.black.as_str()]);
            nbrs[w].entry(b).or_default().push(e.label);
            nbrs[b].entry(w).or_default().push(e.label);
        }
        for m in &mut nbrs {
            for labels in m.values_mut() {
                labels.sort_unstable();
            }
        }
        Indexed {
            ids: vertices.iter().map(|v| v.id().to_string()).collect(),
            genus,
            nbrs,
        }
    }

    fn abs_labels(&self, u: usize, v: usize) -> Option<Vec<u64>> {
        self.nbrs[u].get(&v).map(|ls| {
            let mut a: Vec<u64> = ls.iter().map(|l| l.unsigned_abs()).collect();
            a.sort_unstable();
            a
        })
    }

    fn orientable_white(&self, u: usize) -> bool {
        matches!(self.genus[u], Some(g) if g >= 0)
    }
}

/// Joint color refinement on both graphs so that colors are comparable.
fn refine_colors(a: &Indexed, b: &Indexed) -> (Vec<usize>, Vec<usize>) {
    type Sig = (usize, Vec<(usize, Vec<u64>)>);
    let initial = |g: &Indexed, u: usize| -> (Option<i64>, Vec<Vec<u64>>) {
        let mut s: Vec<Vec<u64>> = g.nbrs[u].keys().map(|&v| g.abs_labels(u, v).unwrap()).collect();
        s.sort();
        (g.genus[u], s)
    };
    let mut keys: BTreeMap<(Option<i64>, Vec<Vec<u64>>), usize> = BTreeMap::new();
    for u in 0..a.ids.len() {
        let k = keys.len();
        keys.entry(initial(a, u)).or_insert(k);
    }
    for u in 0..b.ids.len() {
        let k = keys.len();
        keys.entry(initial(b, u)).or_insert(k);
    }
    let mut ca: Vec<usize> = (0..a.ids.len()).map(|u| keys[&initial(a, u)]).collect();
    let mut cb: Vec<usize> = (0..b.ids.len()).map(|u| keys[&initial(b, u)]).collect();
    loop {
        let sig = |g: &Indexed, c: &[usize], u: usize| -> Sig {
            let mut s: Vec<(usize, Vec<u64>)> =
                g.nbrs[u].keys().map(|&v| (c[v], g.abs_labels(u, v).unwrap())).collect();
            s.sort();
            (c[u], s)
        };
        let mut keys: BTreeMap<Sig, usize> = BTreeMap::new();
        let sa: Vec<Sig> = (0..a.ids.len()).map(|u| sig(a, &ca, u)).collect();
        let sb: Vec<Sig> = (0..b.ids.len()).map(|u| sig(b, &cb, u)).collect();
        for s in sa.iter().chain(sb.iter()) {
            let k = keys.len();
            keys.entry(s.clone()).or_insert(k);
        }
        let na: Vec<usize> = sa.iter().map(|s| keys[s]).collect();
        let nb: Vec<usize> = sb.iter().map(|s| keys[s]).collect();
        let before = ca.iter().chain(cb.iter()).collect::<BTreeSet<_>>().len();
        let after = keys.len();
        ca = na;
        cb = nb;
        if after == before {
            return (ca, cb);
        }
    }
}

/// Visit order: rarest color class first, then breadth-first so that each
/// vertex after the first has an already-mapped neighbor when possible.
fn search_order(a: &Indexed, colors: &[usize]) -> Vec<usize> {
    let n = a.ids.len();
    let mut class_size: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in colors {
        *class_size.entry(c).or_default() += 1;
    }
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while order.len() < n {
        let start = (0..n)
            .filter(|&u| !placed[u])
            .min_by_key(|&u| (class_size[&colors[u]], u))
            .unwrap();
        let mut queue = VecDeque::from([start]);
        placed[start] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in a.nbrs[u].keys() {
                if !placed[v] {
                    placed[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    order
}

struct Search<'a> {
    a: &'a Indexed,
    b: &'a Indexed,
    ca: &'a [usize],
    cb: &'a [usize],
    map: Vec<usize>,
    used: Vec<bool>,
    order: Vec<usize>,
}

impl Search<'_> {
    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let u = self.order[depth];
        for v in 0..self.b.ids.len() {
            if self.used[v] || self.ca[u] != self.cb[v] {
                continue;
            }
            if !self.compatible(u, v) {
                continue;
            }
            self.map[u] = v;
            self.used[v] = true;
            if self.signs_consistent() && self.extend(depth + 1) {
                return true;
            }
            self.map[u] = usize::MAX;
            self.used[v] = false;
        }
        false
    }

    /// Adjacency with already-mapped vertices must match, including the
    /// multiset of `|label|` on parallel edges.
    fn compatible(&self, u: usize, v: usize) -> bool {
        for (&x, _) in &self.a.nbrs[u] {
            let y = self.map[x];
            if y == usize::MAX {
                continue;
            }
            if self.a.abs_labels(u, x) != self.b.abs_labels(v, y) {
                return false;
            }
        }
        // Mapped neighbors of v must come from mapped neighbors of u.
        let mapped_nbrs_u = self.a.nbrs[u].keys().filter(|&&x| self.map[x] != usize::MAX).count();
        let mapped_nbrs_v = self.b.nbrs[v].keys().filter(|&&y| self.used[y]).count();
        mapped_nbrs_u == mapped_nbrs_v
    }

    /// Parity consistency of the sign constraints among mapped vertices.
    fn signs_consistent(&self) -> bool {
        let n = self.a.ids.len();
        // Union-find with parity.
        let mut parent: Vec<usize> = (0..n).collect();
        let mut parity = vec![0u8; n];
        fn find(parent: &mut [usize], parity: &mut [u8], x: usize) -> (usize, u8) {
            if parent[x] == x {
                return (x, 0);
            }
            let (r, p) = find(parent, parity, parent[x]);
            parent[x] = r;
            parity[x] ^= p;
            (r, parity[x])
        }
        for u in 0..n {
            if self.map[u] == usize::MAX || self.a.genus[u].is_none() {
                continue;
            }
            if !self.a.orientable_white(u) {
                // Every boundary circle of a nonorientable piece flips freely.
                continue;
            }
            for (&x, labels_a) in &self.a.nbrs[u] {
                let y = self.map[x];
                if y == usize::MAX {
                    continue;
                }
                let labels_b = &self.b.nbrs[self.map[u]][&y];
                let delta = match bundle_parity(labels_a, labels_b) {
                    Some(d) => d,
                    None => return false,
                };
                let Some(delta) = delta else { continue };
                let (ru, pu) = find(&mut parent, &mut parity, u);
                let (rx, px) = find(&mut parent, &mut parity, x);
                if ru == rx {
                    if pu ^ px != delta {
                        return false;
                    }
                } else {
                    parent[ru] = rx;
                    parity[ru] = pu ^ px ^ delta;
                }
            }
        }
        true
    }
}

/// Which flips can carry one parallel bundle of signed labels onto another.
///
/// `None`: impossible. `Some(None)`: both parities work. `Some(Some(0))`:
/// labels must keep their sign. `Some(Some(1))`: labels must all flip.
fn bundle_parity(a: &[i64], b: &[i64]) -> Option<Option<u8>> {
    let same = a == b;
    let mut negated: Vec<i64> = a.iter().map(|l| -l).collect();
    negated.sort_unstable();
    let flipped = negated == b;
    match (same, flipped) {
        (true, true) => Some(None),
        (true, false) => Some(Some(0)),
        (false, true) => Some(Some(1)),
        (false, false) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lens(q: i64) -> StratifoldGraph {
        let mut g = StratifoldGraph::new();
        g.add_white("w", 0).unwrap();
        g.add_black("b").unwrap();
        g.add_edge("e", "w", "b", q).unwrap();
        g
    }

    fn annulus(l1: i64, l2: i64) -> StratifoldGraph {
        let mut g = StratifoldGraph::new();
        g.add_white("a", 0).unwrap();
        g.add_white("d", 0).unwrap();
        g.add_black("b").unwrap();
        g.add_edge("e1", "a", "b", l1).unwrap();
        g.add_edge("e2", "a", "b", l2).unwrap();
        g.add_edge("e3", "d", "b", 1).unwrap();
        g
    }

    #[test]
    fn validate_lens_and_small_branch() {
        assert!(validate(&lens(3)).is_empty());
        assert_eq!(
            validate(&lens(2)),
            vec![Violation::BranchTooSmall {
                black: "b".into(),
                degree: 2
            }]
        );
        let v = validate(&lens(0));
        assert!(v.contains(&Violation::ZeroLabel { edge: "e".into() }));
    }

    #[test]
    fn validate_closed_surface_and_isolation() {
        let mut g = StratifoldGraph::new();
        g.add_white("t", 1).unwrap();
        assert!(validate(&g).is_empty());
        g.add_black("b").unwrap();
        let v = validate(&g);
        assert!(v.contains(&Violation::IsolatedBlack { black: "b".into() }));
        assert!(v.contains(&Violation::IsolatedWhite { white: "t".into() }));
        assert!(v.contains(&Violation::Disconnected { components: 2 }));
        assert_eq!(validate(&StratifoldGraph::new()), vec![Violation::Empty]);
    }

    #[test]
    fn construction_errors() {
        let mut g = lens(3);
        assert_eq!(g.add_black("w").unwrap_err(), GraphError::DuplicateId("w".into()));
        assert!(matches!(
            g.add_edge("f", "w", "zz", 1),
            Err(GraphError::DanglingEndpoint { .. })
        ));
        assert!(matches!(g.add_edge("e", "w", "b", 1), Err(GraphError::DuplicateId(_))));
    }

    #[test]
    fn partitions() {
        let mut g = StratifoldGraph::new();
        g.add_white("d", 0).unwrap();
        g.add_white("a", 0).unwrap();
        g.add_black("b").unwrap();
        g.add_edge("e1", "d", "b", 2).unwrap();
        g.add_edge("e2", "a", "b", 1).unwrap();
        g.add_edge("e3", "a", "b", -1).unwrap();
        assert_eq!(partition_at(&g, "b").unwrap(), vec![2, 1, 1]);
        assert_eq!(partition_at(&lens(3), "b").unwrap(), vec![3]);
        assert!(partition_at(&g, "nope").is_err());
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler_characteristic(&lens(7)).unwrap(), 1);
        let mut t = StratifoldGraph::new();
        t.add_white("t", 1).unwrap();
        assert_eq!(euler_characteristic(&t).unwrap(), 0);
        assert_eq!(euler_characteristic(&annulus(1, -1)).unwrap(), 1);
        assert!(euler_characteristic(&lens(1)).is_err());
    }

    #[test]
    fn spanning_tree_rules() {
        assert_eq!(spanning_tree(&lens(3)).unwrap(), BTreeSet::from(["e".to_string()]));
        let t = spanning_tree(&annulus(1, 1)).unwrap();
        assert_eq!(t, BTreeSet::from(["e1".to_string(), "e3".to_string()]));
    }

    #[test]
    fn normalize_flips_tree_labels() {
        let n = normalize(&lens(-5)).unwrap();
        assert_eq!(n.edge("e").unwrap().label, 5);
        assert_eq!(normalize(&n).unwrap(), n);

        let n = normalize(&annulus(-1, 1)).unwrap();
        assert_eq!(n.edge("e1").unwrap().label, 1);
        assert_eq!(n.edge("e2").unwrap().label.abs(), 1);
        assert!(is_normalized(&n).unwrap());
        assert!(are_isomorphic(&n, &annulus(-1, 1)).unwrap());
    }

    #[test]
    fn normalize_nonorientable_uses_single_edge_flip() {
        let mut g = StratifoldGraph::new();
        g.add_white("a", -1).unwrap();
        g.add_black("b").unwrap();
        g.add_black("c").unwrap();
        g.add_edge("e1", "a", "b", -3).unwrap();
        g.add_edge("e2", "a", "c", -3).unwrap();
        let n = normalize(&g).unwrap();
        assert_eq!(n.edge("e1").unwrap().label, 3);
        assert_eq!(n.edge("e2").unwrap().label, 3);
    }

    #[test]
    fn isomorphism_examples() {
        let mut relabeled = StratifoldGraph::new();
        relabeled.add_white("x", 0).unwrap();
        relabeled.add_black("y").unwrap();
        relabeled.add_edge("z", "x", "y", 3).unwrap();
        assert!(are_isomorphic(&lens(3), &relabeled).unwrap());
        assert!(are_isomorphic(&lens(3), &lens(-3)).unwrap());
        assert!(!are_isomorphic(&lens(3), &lens(5)).unwrap());
        assert!(!are_isomorphic(&annulus(1, 1), &annulus(1, -1)).unwrap());
        assert!(are_isomorphic(&annulus(1, 1), &annulus(-1, -1)).unwrap());
    }

    #[test]
    fn nonorientable_annulus_signs_are_free() {
        let mut a = annulus(1, 1);
        let mut b = annulus(1, -1);
        for g in [&mut a, &mut b] {
            g.whites.get_mut("a").unwrap().genus = -1;
        }
        assert!(are_isomorphic(&a, &b).unwrap());
    }

    #[test]
    fn moves_reject_bad_targets() {
        let mut g = annulus(1, 1);
        assert!(apply_move(&mut g, &Move::FlipEdge("e1".into())).is_err());
        assert!(apply_move(&mut g, &Move::FlipBlack("a".into())).is_err());
        apply_move(&mut g, &Move::FlipWhite("a".into())).unwrap();
        assert_eq!(g.edge("e1").unwrap().label, -1);
        assert_eq!(g.edge("e3").unwrap().label, 1);
    }
}
