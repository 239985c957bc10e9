//! Spines of lens spaces, S²-bundles over S¹ and P²×S¹, and their
//! connected sums.
//!
//! Lens spaces are indexed by the order `q` of their fundamental group.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::graph::{are_isomorphic, ensure_valid, GraphError, StratifoldGraph};

#[derive(Debug, Error)]
pub enum SpineError {
    #[error("S3 has no 2-stratifold spine")]
    NoSpine,
    #[error("lens space L({0}) needs q >= 2")]
    DomainError(i64),
    #[error("empty manifold expression")]
    EmptyExpression,
    #[error("`{0}` is not a white vertex")]
    NotAWhiteVertex(String),
    #[error("graphs share the id `{0}`")]
    IdCollision(String),
    #[error("not a canonical spine: piece containing `{0}` matches no primitive")]
    NotCanonical(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A prime summand, ordered lens spaces first (by `q`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Summand {
    Lens(u64),
    S2xS1,
    TwistedS2xS1,
    P2xS1,
    S3,
}

impl fmt::Display for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Summand::Lens(q) => write!(f, "L({q})"),
            Summand::S2xS1 => f.write_str("S2xS1"),
            Summand::TwistedS2xS1 => f.write_str("S2~xS1"),
            Summand::P2xS1 => f.write_str("P2xS1"),
            Summand::S3 => f.write_str("S3"),
        }
    }
}

/// A connected sum, kept as a sorted multiset of summands.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ManifoldExpr {
    summands: Vec<Summand>,
}

impl ManifoldExpr {
    pub fn new(mut summands: Vec<Summand>) -> Result<Self, SpineError> {
        if summands.is_empty() {
            return Err(SpineError::EmptyExpression);
        }
        if let Some(Summand::Lens(q)) = summands.iter().find(|s| matches!(s, Summand::Lens(q) if *q < 2)) {
            return Err(SpineError::DomainError(*q as i64));
        }
        summands.sort_unstable();
        Ok(ManifoldExpr { summands })
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }
}

impl fmt::Display for ManifoldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.summands.iter().map(|s| s.to_string()).collect();
        f.write_str(&terms.join(" # "))
    }
}

/// A disk attached to a circle with degree `q`. For `q = 2` the circle is
/// not a branch curve and the spine is the projective plane, a single
/// white vertex of genus −1.
pub fn lens_spine(q: i64) -> Result<StratifoldGraph, SpineError> {
    let mut g = StratifoldGraph::new();
    match q {
        ..=1 => return Err(SpineError::DomainError(q)),
        2 => {
            g.add_white("w", -1)?;
        }
        _ => {
            g.add_white("w", 0)?;
            g.add_black("b")?;
            g.add_edge("e", "w", "b", q)?;
        }
    }
    Ok(g)
}

fn annulus_with_disk(l1: i64, l2: i64) -> StratifoldGraph {
    let mut g = StratifoldGraph::new();
    g.add_white("a", 0).unwrap();
    g.add_white("d", 0).unwrap();
    g.add_black("b").unwrap();
    g.add_edge("e1", "a", "b", l1).unwrap();
    g.add_edge("e2", "a", "b", l2).unwrap();
    g.add_edge("e3", "d", "b", 1).unwrap();
    g
}

/// Torus with a disk attached along a meridian.
pub fn s2xs1_spine() -> StratifoldGraph {
    annulus_with_disk(1, -1)
}

/// Klein bottle with a disk attached along a fibre.
pub fn s2xs1_twisted_spine() -> StratifoldGraph {
    annulus_with_disk(1, 1)
}

/// `P² × {t0} ∪ c × S¹`: a disk double covering `c` and the annulus
/// `c × S¹` cut along `c`.
pub fn p2xs1_spine() -> StratifoldGraph {
    let mut g = StratifoldGraph::new();
    g.add_white("a", 0).unwrap();
    g.add_white("d", 0).unwrap();
    g.add_black("b").unwrap();
    g.add_edge("e1", "d", "b", 2).unwrap();
    g.add_edge("e2", "a", "b", 1).unwrap();
    g.add_edge("e3", "a", "b", -1).unwrap();
    g
}

pub fn primitive_spine(s: Summand) -> Result<StratifoldGraph, SpineError> {
    match s {
        Summand::Lens(q) => lens_spine(q as i64),
        Summand::S2xS1 => Ok(s2xs1_spine()),
        Summand::TwistedS2xS1 => Ok(s2xs1_twisted_spine()),
        Summand::P2xS1 => Ok(p2xs1_spine()),
        Summand::S3 => Err(SpineError::NoSpine),
    }
}

/// Ids `j<n>` (black), `j<n>.d` (disk) and `j<n>.1..3` (edges) added by
/// [`delta_sum`].
pub fn junction_ids(n: usize) -> [String; 5] {
    let j = format!("j{n}");
    [
        j.clone(),
        format!("{j}.d"),
        format!("{j}.1"),
        format!("{j}.2"),
        format!("{j}.3"),
    ]
}

/// Spine of the connected sum: the wedge at `w1`, `w2` with the wedge point
/// replaced by a disk, which adds a branch circle of degree 3.
pub fn delta_sum(g1: &StratifoldGraph, w1: &str, g2: &StratifoldGraph, w2: &str) -> Result<StratifoldGraph, SpineError> {
    for (g, w) in [(g1, w1), (g2, w2)] {
        if g.white(w).is_none() {
            return Err(SpineError::NotAWhiteVertex(w.to_string()));
        }
    }
    let mut out = g1.disjoint_union(g2).map_err(|e| match e {
        GraphError::DuplicateId(id) => SpineError::IdCollision(id),
        e => SpineError::Graph(e),
    })?;
    let ids = (1..)
        .map(junction_ids)
        .find(|ids| ids.iter().all(|id| !g1.has_id(id) && !g2.has_id(id)))
        .unwrap();
    let [j, d, e1, e2, e3] = ids;
    out.add_black(j.clone())?;
    out.add_white(d.clone(), 0)?;
    out.add_edge(e1, w1, j.clone(), 1)?;
    out.add_edge(e2, w2, j.clone(), 1)?;
    out.add_edge(e3, d, j, 1)?;
    Ok(out)
}

fn is_disk(g: &StratifoldGraph, w: &str) -> bool {
    g.white(w).is_some_and(|v| v.genus == 0) && g.degree(w) == 1
}

/// Smallest-id white vertex that is not a disk, else the smallest white.
pub fn attachment_vertex(g: &StratifoldGraph) -> Option<String> {
    g.whites()
        .find(|w| !is_disk(g, &w.id))
        .or_else(|| g.whites().next())
        .map(|w| w.id.clone())
}

/// Left fold of [`delta_sum`] over the sorted summands; the `i`-th piece
/// has its ids prefixed by `p<i>.`.
pub fn synth(expr: &ManifoldExpr) -> Result<StratifoldGraph, SpineError> {
    if expr.summands.contains(&Summand::S3) {
        return Err(SpineError::NoSpine);
    }
    let mut acc: Option<StratifoldGraph> = None;
    for (i, &s) in expr.summands.iter().enumerate() {
        let piece = primitive_spine(s)?.with_prefix(&format!("p{i}."));
        acc = Some(match acc {
            None => piece,
            Some(g) => {
                let w1 = attachment_vertex(&g).unwrap();
                let w2 = attachment_vertex(&piece).unwrap();
                delta_sum(&g, &w1, &piece, &w2)?
            }
        });
    }
    acc.ok_or(SpineError::EmptyExpression)
}

/// Black vertices where a connected sum was formed: three `±1` edges, one
/// of them to a disk, the other two to white vertices the junction
/// separates. Returns `(black, disk)` pairs.
pub fn junctions(g: &StratifoldGraph) -> Vec<(String, String)> {
    let mut found = Vec::new();
    for b in g.blacks() {
        let edges: Vec<_> = g.incident(&b.id).collect();
        if edges.len() != 3 || edges.iter().any(|e| e.label.abs() != 1) {
            continue;
        }
        for (k, cap) in edges.iter().enumerate() {
            if !is_disk(g, &cap.white) {
                continue;
            }
            let others: Vec<&str> = (0..3).filter(|&i| i != k).map(|i| edges[i].white.as_str()).collect();
            if others[0] == others[1] {
                continue;
            }
            let mut cut = g.clone();
            cut.remove_vertex(&b.id);
            cut.remove_vertex(&cap.white);
            let separated = cut
                .components()
                .iter()
                .all(|c| !(c.contains(others[0]) && c.contains(others[1])));
            if separated {
                found.push((b.id.clone(), cap.white.clone()));
                break;
            }
        }
    }
    found
}

/// Inverse of [`synth`] on its image, up to move-isomorphism of the pieces.
pub fn recognize(g: &StratifoldGraph) -> Result<ManifoldExpr, SpineError> {
    ensure_valid(g)?;
    let mut cut = g.clone();
    for (b, d) in junctions(g) {
        cut.remove_vertex(&b);
        cut.remove_vertex(&d);
    }
    let mut summands = Vec::new();
    for vs in cut.components() {
        let piece = cut.induced(&vs);
        summands.push(match_primitive(&piece)?.ok_or_else(|| SpineError::NotCanonical(first(&vs)))?);
    }
    ManifoldExpr::new(summands)
}

fn first(vs: &BTreeSet<String>) -> String {
    vs.iter().next().cloned().unwrap_or_default()
}

fn match_primitive(piece: &StratifoldGraph) -> Result<Option<Summand>, SpineError> {
    let mut candidates = vec![Summand::S2xS1, Summand::TwistedS2xS1, Summand::P2xS1];
    match (piece.white_count(), piece.black_count(), piece.edges().next()) {
        (1, 0, None) => candidates = vec![Summand::Lens(2)],
        (1, 1, Some(e)) if e.label.abs() >= 3 => candidates = vec![Summand::Lens(e.label.unsigned_abs())],
        _ => {}
    }
    for s in candidates {
        if are_isomorphic(piece, &primitive_spine(s)?)? {
            return Ok(Some(s));
        }
    }
    Ok(None)
}
