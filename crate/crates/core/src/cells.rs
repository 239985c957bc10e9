//! Explicit CW structure on `X_G`, used as an independent check of the
//! surface-sum Euler characteristic.
//!
//! Each branch circle is one 0-cell and one 1-cell. Each surface piece is
//! built as a single polygon: an interior base point with its handle or
//! crosscap loops, one spoke per boundary circle, and the boundary circle
//! subdivided into `|m|` arcs. Gluing identifies every boundary vertex with
//! the branch point and every boundary arc with the branch 1-cell, and the
//! cells of the quotient are counted by union-find.

use std::collections::BTreeMap;

use crate::graph::{ensure_valid, GraphError, StratifoldGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Arc {
    from: usize,
    to: usize,
}

#[derive(Debug, Default)]
struct Complex {
    vertices: usize,
    arcs: Vec<Arc>,
    /// Boundary of each 2-cell as oriented arcs (`(arc, forward)`).
    faces: Vec<Vec<(usize, bool)>>,
}

impl Complex {
    fn vertex(&mut self) -> usize {
        self.vertices += 1;
        self.vertices - 1
    }

    fn arc(&mut self, from: usize, to: usize) -> usize {
        self.arcs.push(Arc { from, to });
        self.arcs.len() - 1
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }

    fn classes(&mut self) -> usize {
        (0..self.0.len()).filter(|&x| self.find(x) == x).count()
    }
}

/// `V - E + F` of the glued cell complex.
pub fn cw_euler(graph: &StratifoldGraph) -> Result<i64, GraphError> {
    ensure_valid(graph)?;
    let mut cx = Complex::default();
    let mut vertex_glue: Vec<(usize, usize)> = Vec::new();
    // (surface arc, branch arc, same direction)
    let mut arc_glue: Vec<(usize, usize, bool)> = Vec::new();

    let mut branch: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for b in graph.blacks() {
        let v = cx.vertex();
        let a = cx.arc(v, v);
        branch.insert(&b.id, (v, a));
    }

    for w in graph.whites() {
        let base = cx.vertex();
        let mut word: Vec<(usize, bool)> = Vec::new();
        for e in graph.incident(&w.id) {
            let (bv, ba) = branch[e.black.as_str()];
            let m = e.label.unsigned_abs() as usize;
            let ring: Vec<usize> = (0..m).map(|_| cx.vertex()).collect();
            let spoke = cx.arc(base, ring[0]);
            word.push((spoke, true));
            for k in 0..m {
                let arc = cx.arc(ring[k], ring[(k + 1) % m]);
                word.push((arc, true));
                vertex_glue.push((ring[k], bv));
                arc_glue.push((arc, ba, e.label > 0));
            }
            word.push((spoke, false));
        }
        let loops: Vec<usize> = (0..w.surface_rank()).map(|_| cx.arc(base, base)).collect();
        if w.genus >= 0 {
            for pair in loops.chunks(2) {
                word.extend([(pair[0], true), (pair[1], true), (pair[0], false), (pair[1], false)]);
            }
        } else {
            for &y in &loops {
                word.extend([(y, true), (y, true)]);
            }
        }
        cx.faces.push(word);
    }

    let mut vuf = UnionFind::new(cx.vertices);
    for &(a, b) in &vertex_glue {
        vuf.union(a, b);
    }
    let mut auf = UnionFind::new(cx.arcs.len());
    for &(a, b, forward) in &arc_glue {
        let (sa, sb) = (cx.arcs[a], cx.arcs[b]);
        let (from, to) = if forward { (sb.from, sb.to) } else { (sb.to, sb.from) };
        debug_assert_eq!(vuf.find(sa.from), vuf.find(from));
        debug_assert_eq!(vuf.find(sa.to), vuf.find(to));
        auf.union(a, b);
    }
    for face in &cx.faces {
        debug_assert!(closed_path(face, &cx.arcs, &mut vuf));
    }

    let v = vuf.classes() as i64;
    let e = auf.classes() as i64;
    let f = cx.faces.len() as i64;
    Ok(v - e + f)
}

/// The attaching word of a 2-cell must be a closed edge path in the quotient.
fn closed_path(face: &[(usize, bool)], arcs: &[Arc], vuf: &mut UnionFind) -> bool {
    if face.is_empty() {
        return true;
    }
    let ends = |&(a, fwd): &(usize, bool)| {
        let arc = arcs[a];
        if fwd {
            (arc.from, arc.to)
        } else {
            (arc.to, arc.from)
        }
    };
    let mut prev_end = ends(face.last().unwrap()).1;
    for step in face {
        let (s, t) = ends(step);
        if vuf.find(s) != vuf.find(prev_end) {
            return false;
        }
        prev_end = t;
    }
    true
}
