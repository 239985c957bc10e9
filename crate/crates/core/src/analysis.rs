//! F-group classification, order census of branch circles, white holes, the
//! Q-quotient surgery and obstructions to being a closed 3-manifold group.
//!
//! The obstruction checker is one-sided: every reported obstruction is a
//! sound rejection, and an empty list certifies nothing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::algebra::{abelianization, AbelianInvariants, OrderOracle, OrderVerdict};
use crate::graph::{ensure_valid, normalize, GraphError, StratifoldGraph};
use crate::presentation::{
    black_generator, natural_presentation, q_presentation, BaseSurface, FSignature, GroupPresentation,
    PresentationError, Word,
};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error("indeterminate within budget: orders of {} not certified", .0.join(", "))]
    Indeterminate(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FiniteGroupName {
    Dihedral(u64),
    Tetrahedral,
    Octahedral,
    Dodecahedral,
}

impl fmt::Display for FiniteGroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiniteGroupName::Dihedral(m) => write!(f, "dihedral({m})"),
            FiniteGroupName::Tetrahedral => f.write_str("tetrahedral"),
            FiniteGroupName::Octahedral => f.write_str("octahedral"),
            FiniteGroupName::Dodecahedral => f.write_str("dodecahedral"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FClass {
    FiniteCyclic { order: u64 },
    FiniteNonCyclic { name: FiniteGroupName, order: u64 },
    Infinite { surface: bool },
}

impl FClass {
    pub fn order(&self) -> Option<u64> {
        match self {
            FClass::FiniteCyclic { order } | FClass::FiniteNonCyclic { order, .. } => Some(*order),
            FClass::Infinite { .. } => None,
        }
    }
}

impl fmt::Display for FClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FClass::FiniteCyclic { order } => write!(f, "FiniteCyclic({order})"),
            FClass::FiniteNonCyclic { name, order } => write!(f, "FiniteNonCyclic({name}, {order})"),
            FClass::Infinite { surface } => write!(f, "Infinite(surface={surface})"),
        }
    }
}

pub fn classify_fgroup(sig: &FSignature) -> FClass {
    let mut m = sig.periods().to_vec();
    m.sort_unstable();
    match (sig.base(), m.as_slice()) {
        (BaseSurface::Spherical, [] | [_]) => FClass::FiniteCyclic { order: 1 },
        (BaseSurface::Spherical, [a, b]) => FClass::FiniteCyclic { order: a.gcd(b) },
        (BaseSurface::Spherical, [2, 2, k]) => FClass::FiniteNonCyclic {
            name: FiniteGroupName::Dihedral(*k),
            order: 2 * k,
        },
        (BaseSurface::Spherical, [2, 3, 3]) => FClass::FiniteNonCyclic {
            name: FiniteGroupName::Tetrahedral,
            order: 12,
        },
        (BaseSurface::Spherical, [2, 3, 4]) => FClass::FiniteNonCyclic {
            name: FiniteGroupName::Octahedral,
            order: 24,
        },
        (BaseSurface::Spherical, [2, 3, 5]) => FClass::FiniteNonCyclic {
            name: FiniteGroupName::Dodecahedral,
            order: 60,
        },
        (BaseSurface::Nonorientable(1), []) => FClass::FiniteCyclic { order: 2 },
        (BaseSurface::Nonorientable(1), [a]) => FClass::FiniteCyclic { order: 2 * a },
        (_, periods) => FClass::Infinite {
            surface: periods.is_empty(),
        },
    }
}

/// Recognizes the F-group graph shape: one central white vertex, and every
/// black vertex joined to it by a `±1` edge and to its own disk by a `±m`
/// edge with `m >= 2`.
pub fn fgroup_signature(graph: &StratifoldGraph) -> Option<FSignature> {
    if graph.white_count() != graph.black_count() + 1 || graph.edge_count() != 2 * graph.black_count() {
        return None;
    }
    'center: for center in graph.whites() {
        let mut periods = Vec::new();
        let mut disks = BTreeSet::new();
        for b in graph.blacks() {
            let edges: Vec<_> = graph.incident(&b.id).collect();
            let [e1, e2] = edges.as_slice() else {
                return None;
            };
            let (spoke, cap) = if e1.white == center.id { (e1, e2) } else { (e2, e1) };
            if spoke.white != center.id || cap.white == center.id || spoke.label.abs() != 1 {
                continue 'center;
            }
            let disk = graph.white(&cap.white)?;
            if disk.genus != 0 || graph.degree(&disk.id) != 1 || cap.label.abs() < 2 {
                continue 'center;
            }
            disks.insert(disk.id.clone());
            periods.push(cap.label.unsigned_abs());
        }
        if disks.len() == periods.len() && graph.degree(&center.id) == periods.len() {
            return FSignature::from_genus(center.genus, periods).ok();
        }
    }
    None
}

/// Order of every black generator in the natural presentation.
pub fn black_orders(graph: &StratifoldGraph, budget: usize) -> Result<BTreeMap<String, OrderVerdict>, AnalysisError> {
    ensure_valid(graph)?;
    let pres = natural_presentation(&normalize(graph)?)?;
    black_orders_in(graph, &pres, budget)
}

fn black_orders_in(
    graph: &StratifoldGraph,
    pres: &GroupPresentation,
    budget: usize,
) -> Result<BTreeMap<String, OrderVerdict>, AnalysisError> {
    let oracle = OrderOracle::new(pres, budget);
    graph
        .blacks()
        .map(|b| Ok((b.id.clone(), oracle.order(&Word::generator(black_generator(&b.id)))?)))
        .collect()
}

/// Genus −1 white vertices whose black neighbours all have finite order,
/// at most one of them greater than 1.
pub fn white_holes(
    graph: &StratifoldGraph,
    orders: &BTreeMap<String, OrderVerdict>,
) -> Result<BTreeSet<String>, AnalysisError> {
    let mut holes = BTreeSet::new();
    let mut undecided = BTreeSet::new();
    for w in graph.whites().filter(|w| w.genus == -1) {
        let neighbours: BTreeSet<&str> = graph.incident(&w.id).map(|e| e.black.as_str()).collect();
        let mut infinite = false;
        let mut large = 0;
        let mut unknown = Vec::new();
        for b in neighbours {
            match orders.get(b) {
                Some(OrderVerdict::Finite { order, .. }) if *order > 1 => large += 1,
                Some(OrderVerdict::Finite { .. }) => {}
                Some(OrderVerdict::Infinite) => infinite = true,
                Some(OrderVerdict::Unknown { .. }) | None => unknown.push(b.to_string()),
            }
        }
        if infinite || large >= 2 {
            continue;
        }
        if unknown.is_empty() {
            holes.insert(w.id.clone());
        } else {
            undecided.extend(unknown);
        }
    }
    if undecided.is_empty() {
        Ok(holes)
    } else {
        Err(AnalysisError::Indeterminate(undecided.into_iter().collect()))
    }
}

/// A connected piece of the surviving graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QComponent {
    pub graph: StratifoldGraph,
    /// Boundary circles of each white vertex whose black vertex was deleted.
    pub capped: BTreeMap<String, usize>,
}

impl QComponent {
    /// Genus of the closed surface formed by a lone white vertex.
    pub fn closed_surface(&self) -> Option<i64> {
        match (self.graph.white_count(), self.graph.black_count()) {
            (1, 0) => self.graph.whites().next().map(|w| w.genus),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QResult {
    pub orders: BTreeMap<String, OrderVerdict>,
    pub deleted_blacks: BTreeSet<String>,
    pub white_holes: BTreeSet<String>,
    pub components: Vec<QComponent>,
    pub presentation: GroupPresentation,
}

/// Deletes the open stars of finite-order black vertices and the white
/// holes, and presents the resulting quotient.
pub fn q_graph(graph: &StratifoldGraph, budget: usize) -> Result<QResult, AnalysisError> {
    let orders = black_orders(graph, budget)?;
    let unknown: Vec<String> = orders
        .iter()
        .filter(|(_, v)| v.is_unknown())
        .map(|(b, _)| b.clone())
        .collect();
    if !unknown.is_empty() {
        return Err(AnalysisError::Indeterminate(unknown));
    }
    let white_holes = white_holes(graph, &orders)?;
    let deleted_blacks: BTreeSet<String> = orders
        .iter()
        .filter(|(_, v)| v.is_finite())
        .map(|(b, _)| b.clone())
        .collect();

    let mut rest = graph.clone();
    let mut capped: BTreeMap<String, usize> = BTreeMap::new();
    for e in graph.edges() {
        if deleted_blacks.contains(&e.black) && !white_holes.contains(&e.white) {
            *capped.entry(e.white.clone()).or_default() += 1;
        }
    }
    for v in deleted_blacks.iter().chain(&white_holes) {
        rest.remove_vertex(v);
    }
    let components = rest
        .components()
        .into_iter()
        .map(|vs| QComponent {
            capped: capped
                .iter()
                .filter(|(w, _)| vs.contains(*w))
                .map(|(w, &n)| (w.clone(), n))
                .collect(),
            graph: rest.induced(&vs),
        })
        .collect();
    let presentation = q_presentation(graph, &orders, &white_holes)?;
    Ok(QResult {
        orders,
        deleted_blacks,
        white_holes,
        components,
        presentation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObstructionKind {
    QTorsion,
    NonFreeSurfaceComponent,
    InfiniteNonSurfaceFGroup,
}

impl ObstructionKind {
    pub fn token(&self) -> &'static str {
        match self {
            ObstructionKind::QTorsion => "QTorsion",
            ObstructionKind::NonFreeSurfaceComponent => "NonFreeSurfaceComponent",
            ObstructionKind::InfiniteNonSurfaceFGroup => "InfiniteNonSurfaceFGroup",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obstruction {
    pub kind: ObstructionKind,
    /// Vertex id, or `Q` for the whole quotient.
    pub witness: String,
    pub evidence: String,
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.kind.token(), self.witness, self.evidence)
    }
}

/// Sound reasons why the fundamental group is not that of a closed
/// 3-manifold. Structural obstructions are reported even when the Q-quotient
/// is out of budget.
pub fn obstructions(graph: &StratifoldGraph, budget: usize) -> Result<Vec<Obstruction>, AnalysisError> {
    ensure_valid(graph)?;
    let mut found = Vec::new();
    if let Some(sig) = fgroup_signature(graph) {
        if let FClass::Infinite { surface: false } = classify_fgroup(&sig) {
            found.push(Obstruction {
                kind: ObstructionKind::InfiniteNonSurfaceFGroup,
                witness: center_of(graph, &sig),
                evidence: format!("{sig} is infinite and not a surface group"),
            });
        }
    }
    let q = match q_graph(graph, budget) {
        Ok(q) => q,
        Err(AnalysisError::Indeterminate(_)) if !found.is_empty() => return Ok(found),
        Err(e) => return Err(e),
    };
    found.extend(q_obstructions(&q));
    Ok(found)
}

/// Obstructions read off a computed Q-quotient.
pub fn q_obstructions(q: &QResult) -> Vec<Obstruction> {
    let mut found = Vec::new();
    for c in &q.components {
        let Some(genus) = c.closed_surface() else {
            continue;
        };
        let id = c.graph.whites().next().map(|w| w.id.clone()).unwrap_or_default();
        if genus == -1 {
            found.push(Obstruction {
                kind: ObstructionKind::QTorsion,
                witness: id,
                evidence: "closed projective plane component".into(),
            });
        } else if genus >= 1 || genus <= -2 {
            found.push(Obstruction {
                kind: ObstructionKind::NonFreeSurfaceComponent,
                witness: id,
                evidence: format!("closed surface of genus {genus}"),
            });
        }
    }
    if !found.iter().any(|o| o.kind == ObstructionKind::QTorsion) {
        let h1: AbelianInvariants = abelianization(&q.presentation);
        if !h1.is_torsion_free() {
            found.push(Obstruction {
                kind: ObstructionKind::QTorsion,
                witness: "Q".into(),
                evidence: format!("abelianization {h1}"),
            });
        }
    }
    found
}

fn center_of(graph: &StratifoldGraph, sig: &FSignature) -> String {
    graph
        .whites()
        .find(|w| w.genus == sig.genus() && graph.degree(&w.id) == sig.periods().len())
        .map(|w| w.id.clone())
        .unwrap_or_default()
}
