//! Finitely presented groups attached to stratifold graphs.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::algebra::OrderVerdict;
use crate::graph::{ensure_valid, spanning_tree, GraphError, StratifoldGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("duplicate generator {0:?}")]
    DuplicateGenerator(String),
    #[error("relator mentions undeclared generator {0:?}")]
    UnknownGenerator(String),
    #[error("period {0} is below 2")]
    InvalidPeriod(u64),
    #[error("nonorientable base needs at least one crosscap")]
    InvalidBase,
    #[error("no order verdict for black vertex {0:?}")]
    MissingOrder(String),
    #[error("{0:?} is not a white vertex")]
    NotAWhiteVertex(String),
    #[error("order of black vertices {0:?} is unknown within budget")]
    Indeterminate(Vec<String>),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    /// `b`: a branch circle.
    Black,
    /// `s`: a boundary circle of a surface piece.
    Boundary,
    /// `y`: a handle or crosscap generator of a surface piece.
    Surface,
    /// `t`: the stable letter of an edge outside the spanning tree.
    StableLetter,
    /// `c`: a cone-point generator of an F-group.
    Period,
}

impl Role {
    pub fn token(&self) -> &'static str {
        match self {
            Role::Black => "black",
            Role::Boundary => "boundary",
            Role::Surface => "surface",
            Role::StableLetter => "stable",
            Role::Period => "period",
        }
    }

    pub fn from_token(s: &str) -> Option<Role> {
        Some(match s {
            "black" => Role::Black,
            "boundary" => Role::Boundary,
            "surface" => Role::Surface,
            "stable" => Role::StableLetter,
            "period" => Role::Period,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub role: Role,
}

impl Generator {
    pub fn new(name: impl Into<String>, role: Role) -> Self {
        Generator {
            name: name.into(),
            role,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub generator: String,
    pub exponent: i64,
}

/// A freely reduced word: adjacent syllables have distinct generators and no
/// exponent is zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Syllable>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn new<I, S>(syllables: I) -> Word
    where
        I: IntoIterator<Item = (S, i64)>,
        S: Into<String>,
    {
        let mut w = Word::identity();
        for (g, e) in syllables {
            w.push(g.into(), e);
        }
        w
    }

    pub fn generator(name: impl Into<String>) -> Word {
        Word::power(name, 1)
    }

    pub fn power(name: impl Into<String>, exponent: i64) -> Word {
        Word::new([(name.into(), exponent)])
    }

    /// `[a, b] = a b a^-1 b^-1`.
    pub fn commutator(a: &str, b: &str) -> Word {
        Word::new([(a, 1), (b, 1), (a, -1), (b, -1)])
    }

    fn push(&mut self, generator: String, exponent: i64) {
        if exponent == 0 {
            return;
        }
        if let Some(last) = self.0.last_mut() {
            if last.generator == generator {
                last.exponent += exponent;
                if last.exponent == 0 {
                    self.0.pop();
                }
                return;
            }
        }
        self.0.push(Syllable {
            generator,
            exponent,
        });
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of letters, `Σ |exponent|`.
    pub fn len(&self) -> u64 {
        self.0.iter().map(|s| s.exponent.unsigned_abs()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(
            self.0
                .iter()
                .rev()
                .map(|s| Syllable {
                    generator: s.generator.clone(),
                    exponent: -s.exponent,
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for s in &other.0 {
            w.push(s.generator.clone(), s.exponent);
        }
        w
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut w = Word::identity();
        for _ in 0..k.unsigned_abs() {
            w = w.mul(&base);
        }
        w
    }

    /// Individual letters as `(generator, ±1)`.
    pub fn letters(&self) -> impl Iterator<Item = (&str, i64)> + '_ {
        self.0.iter().flat_map(|s| {
            std::iter::repeat_n((s.generator.as_str(), s.exponent.signum()), s.exponent.unsigned_abs() as usize)
        })
    }

    pub fn exponent_sum(&self, generator: &str) -> i64 {
        self.0
            .iter()
            .filter(|s| s.generator == generator)
            .map(|s| s.exponent)
            .sum()
    }

    pub fn mentions(&self, generator: &str) -> bool {
        self.0.iter().any(|s| s.generator == generator)
    }

    pub fn generators(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|s| s.generator.as_str())
    }

    /// Replaces every occurrence of `generator` with `replacement`.
    pub fn substitute(&self, generator: &str, replacement: &Word) -> Word {
        let mut w = Word::identity();
        for s in &self.0 {
            if s.generator == generator {
                w = w.mul(&replacement.pow(s.exponent));
            } else {
                w.push(s.generator.clone(), s.exponent);
            }
        }
        w
    }

    /// Conjugate with no cancellation between the last and first syllable.
    pub fn cyclically_reduced(&self) -> Word {
        let mut v = self.0.clone();
        while v.len() >= 2 && v[0].generator == v[v.len() - 1].generator {
            let last = v.pop().unwrap();
            v[0].exponent += last.exponent;
            if v[0].exponent == 0 {
                v.remove(0);
            }
        }
        Word(v)
    }

    /// Cyclic rotation starting at syllable `i`.
    fn rotated(&self, i: usize) -> Word {
        let mut w = Word::identity();
        for s in self.0[i..].iter().chain(self.0[..i].iter()) {
            w.push(s.generator.clone(), s.exponent);
        }
        w
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if s.exponent == 1 {
                write!(f, "{}", s.generator)?;
            } else {
                write!(f, "{}^{}", s.generator, s.exponent)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupPresentation {
    generators: Vec<Generator>,
    relators: Vec<Word>,
}

impl GroupPresentation {
    pub fn new(generators: Vec<Generator>, relators: Vec<Word>) -> Result<Self, PresentationError> {
        let mut names = HashSet::new();
        for g in &generators {
            if !names.insert(g.name.as_str()) {
                return Err(PresentationError::DuplicateGenerator(g.name.clone()));
            }
        }
        for r in &relators {
            for g in r.generators() {
                if !names.contains(g) {
                    return Err(PresentationError::UnknownGenerator(g.to_string()));
                }
            }
        }
        Ok(GroupPresentation {
            generators,
            relators,
        })
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn generator_names(&self) -> impl Iterator<Item = &str> {
        self.generators.iter().map(|g| g.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn role_of(&self, name: &str) -> Option<Role> {
        self.generators.iter().find(|g| g.name == name).map(|g| g.role)
    }

    /// Checks that a word only uses declared generators.
    pub fn check_word(&self, w: &Word) -> Result<(), PresentationError> {
        for g in w.generators() {
            if self.index_of(g).is_none() {
                return Err(PresentationError::UnknownGenerator(g.to_string()));
            }
        }
        Ok(())
    }

    /// Appends relators; the generator set is unchanged.
    pub fn with_relators(&self, extra: impl IntoIterator<Item = Word>) -> Result<Self, PresentationError> {
        let mut relators = self.relators.clone();
        relators.extend(extra);
        GroupPresentation::new(self.generators.clone(), relators)
    }
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<&str> = self.generator_names().collect();
        let rels: Vec<String> = self.relators.iter().map(|r| r.to_string()).collect();
        write!(f, "< {} | {} >", gens.join(", "), rels.join(", "))
    }
}

/// `q = [y1,y2]...[y_{2g-1},y_{2g}]` or `y1^2...yn^2`.
fn surface_word(names: &[String], orientable: bool) -> Word {
    let mut q = Word::identity();
    if orientable {
        for pair in names.chunks(2) {
            q = q.mul(&Word::commutator(&pair[0], &pair[1]));
        }
    } else {
        for y in names {
            q = q.mul(&Word::power(y.clone(), 2));
        }
    }
    q
}

pub fn black_generator(id: &str) -> String {
    format!("b.{id}")
}

pub fn boundary_generator(edge: &str) -> String {
    format!("s.{edge}")
}

pub fn surface_generator(white: &str, j: usize) -> String {
    format!("y.{white}.{j}")
}

pub fn stable_generator(edge: &str) -> String {
    format!("t.{edge}")
}

/// The presentation of `π1(X_G)` read off a normalized graph and its
/// breadth-first maximal tree.
pub fn natural_presentation(graph: &StratifoldGraph) -> Result<GroupPresentation, PresentationError> {
    ensure_valid(graph)?;
    let tree = spanning_tree(graph)?;
    for id in &tree {
        let e = graph.edge(id).unwrap();
        if e.label <= 0 {
            return Err(GraphError::NotNormalized {
                edge: id.clone(),
                label: e.label,
            }
            .into());
        }
    }

    let mut generators = Vec::new();
    let mut relators = Vec::new();
    for b in graph.blacks() {
        generators.push(Generator::new(black_generator(&b.id), Role::Black));
    }
    for w in graph.whites() {
        let mut rel = Word::identity();
        for e in graph.incident(&w.id) {
            let s = boundary_generator(&e.id);
            rel = rel.mul(&Word::generator(s.clone()));
            generators.push(Generator::new(s, Role::Boundary));
        }
        let ys: Vec<String> = (1..=w.surface_rank()).map(|j| surface_generator(&w.id, j)).collect();
        generators.extend(ys.iter().map(|y| Generator::new(y.clone(), Role::Surface)));
        rel = rel.mul(&surface_word(&ys, w.is_orientable()));
        relators.push(rel);
    }
    for e in graph.edges() {
        let s = Word::generator(boundary_generator(&e.id));
        let bm = Word::power(black_generator(&e.black), e.label);
        if tree.contains(&e.id) {
            relators.push(s.inverse().mul(&bm));
        } else {
            let t = stable_generator(&e.id);
            generators.push(Generator::new(t.clone(), Role::StableLetter));
            let t = Word::generator(t);
            relators.push(t.inverse().mul(&s).mul(&t).mul(&bm.inverse()));
        }
    }
    GroupPresentation::new(generators, relators)
}

/// Base surface of an F-group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseSurface {
    Spherical,
    Orientable(u32),
    Nonorientable(u32),
}

/// `⟨c1..cp, y1..yn | c_i^{m_i}, c1...cp q⟩` with all `m_i >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FSignature {
    base: BaseSurface,
    periods: Vec<u64>,
}

impl FSignature {
    pub fn new(base: BaseSurface, periods: Vec<u64>) -> Result<Self, PresentationError> {
        let base = match base {
            BaseSurface::Orientable(0) => BaseSurface::Spherical,
            BaseSurface::Nonorientable(0) => return Err(PresentationError::InvalidBase),
            b => b,
        };
        if let Some(&m) = periods.iter().find(|&&m| m < 2) {
            return Err(PresentationError::InvalidPeriod(m));
        }
        Ok(FSignature { base, periods })
    }

    /// From a Neumann-convention genus.
    pub fn from_genus(genus: i64, periods: Vec<u64>) -> Result<Self, PresentationError> {
        let base = match genus {
            0 => BaseSurface::Spherical,
            g if g > 0 => BaseSurface::Orientable(g as u32),
            g => BaseSurface::Nonorientable(g.unsigned_abs() as u32),
        };
        FSignature::new(base, periods)
    }

    pub fn base(&self) -> BaseSurface {
        self.base
    }

    pub fn periods(&self) -> &[u64] {
        &self.periods
    }

    pub fn genus(&self) -> i64 {
        match self.base {
            BaseSurface::Spherical => 0,
            BaseSurface::Orientable(g) => g as i64,
            BaseSurface::Nonorientable(k) => -(k as i64),
        }
    }

    /// Number of surface generators `n`.
    pub fn surface_rank(&self) -> usize {
        match self.base {
            BaseSurface::Spherical => 0,
            BaseSurface::Orientable(g) => 2 * g as usize,
            BaseSurface::Nonorientable(k) => k as usize,
        }
    }
}

impl fmt::Display for FSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let periods: Vec<String> = self.periods.iter().map(|m| m.to_string()).collect();
        write!(f, "F({};{})", self.genus(), periods.join(","))
    }
}

pub fn fgroup_presentation(sig: &FSignature) -> GroupPresentation {
    let cs: Vec<String> = (1..=sig.periods.len()).map(|i| format!("c.{i}")).collect();
    let ys: Vec<String> = (1..=sig.surface_rank()).map(|j| format!("y.{j}")).collect();
    let mut generators: Vec<Generator> = cs.iter().map(|c| Generator::new(c.clone(), Role::Period)).collect();
    generators.extend(ys.iter().map(|y| Generator::new(y.clone(), Role::Surface)));
    let mut relators: Vec<Word> = cs
        .iter()
        .zip(&sig.periods)
        .map(|(c, &m)| Word::power(c.clone(), m as i64))
        .collect();
    let mut product = Word::new(cs.iter().map(|c| (c.clone(), 1)));
    product = product.mul(&surface_word(&ys, !matches!(sig.base, BaseSurface::Nonorientable(_))));
    relators.push(product);
    GroupPresentation::new(generators, relators).expect("generated names are distinct")
}

/// Ids used by [`fgroup_graph`] for the `i`-th period (1-based).
pub fn fgroup_ids(i: usize, p: usize) -> (String, String, String, String) {
    let width = p.to_string().len().max(2);
    (
        format!("b{i:0width$}"),
        format!("d{i:0width$}"),
        format!("e{i:0width$}a"),
        format!("e{i:0width$}b"),
    )
}

/// A tree graph whose fundamental group is the F-group: a central piece of
/// the base genus joined by label-1 edges to one black vertex per period,
/// each of which is capped by a disk attached with degree `m_i`.
pub fn fgroup_graph(sig: &FSignature) -> Result<StratifoldGraph, PresentationError> {
    let mut g = StratifoldGraph::new();
    g.add_white("w", sig.genus())?;
    let p = sig.periods.len();
    for (i, &m) in sig.periods.iter().enumerate() {
        if m < 2 {
            return Err(PresentationError::InvalidPeriod(m));
        }
        let (b, d, ea, eb) = fgroup_ids(i + 1, p);
        g.add_black(b.clone())?;
        g.add_white(d.clone(), 0)?;
        g.add_edge(ea, "w", b.clone(), 1)?;
        g.add_edge(eb, d, b, m as i64)?;
    }
    Ok(g)
}

/// Which generators Tietze elimination may remove.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elimination {
    /// Generators killed by a one-syllable relator `g^{±1}`, and boundary
    /// generators occurring once in a relator.
    Conservative,
    /// Any generator occurring exactly once in some relator.
    Aggressive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simplified {
    pub presentation: GroupPresentation,
    /// Eliminated generators in elimination order, each expressed in the
    /// surviving generators.
    pub eliminated: Vec<(String, Word)>,
    /// The step budget ran out with eliminations still available.
    pub exhausted: bool,
}

impl Simplified {
    /// Rewrites a word of the original presentation in the surviving
    /// generators.
    pub fn rewrite(&self, w: &Word) -> Word {
        let mut out = w.clone();
        for (g, replacement) in &self.eliminated {
            out = out.substitute(g, replacement);
        }
        out
    }
}

/// Bounded Tietze simplification: generator eliminations plus free and
/// cyclic reduction. At most `budget` generators are eliminated.
pub fn simplify(pres: &GroupPresentation, budget: usize) -> Simplified {
    simplify_with(pres, budget, Elimination::Conservative)
}

pub fn simplify_with(pres: &GroupPresentation, budget: usize, policy: Elimination) -> Simplified {
    let mut generators = pres.generators.clone();
    let mut relators = tidy(pres.relators.iter().cloned());
    let mut eliminated: Vec<(String, Word)> = Vec::new();
    let mut steps = 0usize;
    let exhausted = loop {
        let Some((ri, gen, exp)) = pick_elimination(&generators, &relators, policy) else {
            break false;
        };
        if steps == budget {
            break true;
        }
        steps += 1;
        let r = &relators[ri];
        let pos = r.syllables().iter().position(|s| s.generator == gen).unwrap();
        let rest = Word(r.rotated(pos).syllables()[1..].to_vec());
        let value = if exp == 1 { rest.inverse() } else { rest };
        relators.remove(ri);
        relators = tidy(relators.iter().map(|w| w.substitute(&gen, &value)));
        for (_, w) in &mut eliminated {
            *w = w.substitute(&gen, &value);
        }
        generators.retain(|g| g.name != gen);
        eliminated.push((gen, value));
    };
    Simplified {
        presentation: GroupPresentation {
            generators,
            relators,
        },
        eliminated,
        exhausted,
    }
}

fn tidy(relators: impl Iterator<Item = Word>) -> Vec<Word> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for r in relators {
        let r = r.cyclically_reduced();
        if !r.is_identity() && seen.insert(r.clone()) {
            out.push(r);
        }
    }
    out
}

fn pick_elimination(
    generators: &[Generator],
    relators: &[Word],
    policy: Elimination,
) -> Option<(usize, String, i64)> {
    let position: HashMap<&str, (usize, Role)> = generators
        .iter()
        .enumerate()
        .map(|(i, g)| (g.name.as_str(), (i, g.role)))
        .collect();
    let mut best: Option<((u8, u64, usize, usize), (usize, String, i64))> = None;
    for (ri, r) in relators.iter().enumerate() {
        let mut count: HashMap<&str, usize> = HashMap::new();
        for s in r.syllables() {
            *count.entry(s.generator.as_str()).or_default() += 1;
        }
        for s in r.syllables() {
            if count[s.generator.as_str()] != 1 || s.exponent.abs() != 1 {
                continue;
            }
            let (gi, role) = position[s.generator.as_str()];
            let single = r.syllables().len() == 1;
            let allowed = match policy {
                Elimination::Aggressive => true,
                Elimination::Conservative => single || role == Role::Boundary,
            };
            if !allowed {
                continue;
            }
            let key = (u8::from(!single), r.len(), ri, gi);
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                best = Some((key, (ri, s.generator.clone(), s.exponent)));
            }
        }
    }
    best.map(|(_, v)| v)
}

/// Presentation of `Qπ1(X_G)`: the natural presentation of the normalized
/// graph with every finite-order black generator and every surface
/// generator of a white hole killed.
pub fn q_presentation(
    graph: &StratifoldGraph,
    orders: &BTreeMap<String, OrderVerdict>,
    holes: &BTreeSet<String>,
) -> Result<GroupPresentation, PresentationError> {
    let normal = crate::graph::normalize(graph)?;
    let mut unknown = Vec::new();
    let mut extra = Vec::new();
    for b in normal.blacks() {
        match orders.get(&b.id) {
            None => return Err(PresentationError::MissingOrder(b.id.clone())),
            Some(OrderVerdict::Unknown { .. }) => unknown.push(b.id.clone()),
            Some(OrderVerdict::Finite { .. }) => extra.push(Word::generator(black_generator(&b.id))),
            Some(OrderVerdict::Infinite { .. }) => {}
        }
    }
    if !unknown.is_empty() {
        return Err(PresentationError::Indeterminate(unknown));
    }
    for h in holes {
        let w = normal
            .white(h)
            .ok_or_else(|| PresentationError::NotAWhiteVertex(h.clone()))?;
        extra.extend((1..=w.surface_rank()).map(|j| Word::generator(surface_generator(h, j))));
    }
    natural_presentation(&normal)?.with_relators(extra)
}
