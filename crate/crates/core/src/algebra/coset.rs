//! HLT coset enumeration with a hard cap on the number of cosets defined.

use num_integer::Integer;
use thiserror::Error;

use crate::presentation::{GroupPresentation, PresentationError, Word};

/// Default cap on defined cosets.
pub const DEFAULT_COSET_BUDGET: usize = 100_000;

const NONE: usize = usize::MAX;

/// Letters are column indices: generator `i` is `2i`, its inverse `2i + 1`.
pub(crate) fn encode(pres: &GroupPresentation, w: &Word) -> Result<Vec<usize>, PresentationError> {
    let mut out = Vec::with_capacity(w.len() as usize);
    for (g, sign) in w.letters() {
        let i = pres
            .index_of(g)
            .ok_or_else(|| PresentationError::UnknownGenerator(g.to_string()))?;
        out.push(if sign > 0 { 2 * i } else { 2 * i + 1 });
    }
    Ok(out)
}

#[inline]
pub(crate) fn inv(x: usize) -> usize {
    x ^ 1
}

/// Action of the generators on the cosets of a subgroup. Coset 0 is the
/// subgroup itself. In a partial table every defined entry is still a
/// proven equality of cosets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetTable {
    generators: usize,
    rows: Vec<Vec<Option<usize>>>,
    complete: bool,
}

impl CosetTable {
    pub fn cosets(&self) -> usize {
        self.rows.len()
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    /// `coset · g^{±1}` for generator index `gen`.
    pub fn act(&self, coset: usize, gen: usize, inverse: bool) -> Option<usize> {
        self.rows[coset][2 * gen + usize::from(inverse)]
    }

    /// Follows an encoded word from `coset`, if every step is defined.
    pub(crate) fn trace(&self, coset: usize, letters: &[usize]) -> Option<usize> {
        letters.iter().try_fold(coset, |c, &x| self.rows[c][x])
    }

    /// Trace a word of `pres` from `coset`.
    pub fn trace_word(&self, pres: &GroupPresentation, coset: usize, w: &Word) -> Result<Option<usize>, PresentationError> {
        Ok(self.trace(coset, &encode(pres, w)?))
    }

    /// Order of the permutation induced by an encoded word on a complete
    /// table.
    pub(crate) fn permutation_order(&self, letters: &[usize]) -> Option<u64> {
        if !self.complete {
            return None;
        }
        let image: Vec<usize> = (0..self.cosets()).map(|c| self.trace(c, letters).unwrap()).collect();
        Some(cycle_lcm(&image))
    }

    /// Every `k` such that some coset returns to itself under `w^k` through
    /// defined entries. Each one proves `w^k = 1` when the subgroup is
    /// trivial.
    pub(crate) fn closed_orbits(&self, letters: &[usize], max_len: usize) -> Vec<u64> {
        let mut found = Vec::new();
        let mut visited = vec![false; self.cosets()];
        for start in 0..self.cosets() {
            if visited[start] {
                continue;
            }
            let mut c = start;
            for k in 1..=max_len {
                visited[c] = true;
                match self.trace(c, letters) {
                    Some(next) => {
                        if next == start {
                            found.push(k as u64);
                            break;
                        }
                        c = next;
                    }
                    None => break,
                }
            }
        }
        found.sort_unstable();
        found.dedup();
        found
    }
}

pub(crate) fn cycle_lcm(perm: &[usize]) -> u64 {
    let mut seen = vec![false; perm.len()];
    let mut order = 1u64;
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0u64;
        let mut c = s;
        while !seen[c] {
            seen[c] = true;
            c = perm[c];
            len += 1;
        }
        order = order.lcm(&len);
    }
    order
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("coset enumeration exceeded {budget} cosets")]
    Exhausted { budget: usize, partial: Box<CosetTable> },
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

struct Exhausted;

struct Enumerator {
    cols: usize,
    table: Vec<usize>,
    parent: Vec<usize>,
    queue: Vec<usize>,
    budget: usize,
}

impl Enumerator {
    fn new(generators: usize, budget: usize) -> Self {
        let cols = 2 * generators;
        Enumerator {
            cols,
            table: vec![NONE; cols],
            parent: vec![0],
            queue: Vec::new(),
            budget,
        }
    }

    #[inline]
    fn get(&self, c: usize, x: usize) -> usize {
        self.table[c * self.cols + x]
    }

    #[inline]
    fn set(&mut self, c: usize, x: usize, d: usize) {
        self.table[c * self.cols + x] = d;
    }

    fn len(&self) -> usize {
        self.parent.len()
    }

    fn alive(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn define(&mut self, c: usize, x: usize) -> Result<(), Exhausted> {
        if self.len() >= self.budget {
            return Err(Exhausted);
        }
        let d = self.len();
        self.parent.push(d);
        self.table.extend(std::iter::repeat_n(NONE, self.cols));
        self.set(c, x, d);
        self.set(d, inv(x), c);
        Ok(())
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = c;
        while self.parent[x] != r {
            let next = self.parent[x];
            self.parent[x] = r;
            x = next;
        }
        r
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        self.parent[hi] = lo;
        self.queue.push(hi);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let g = self.queue[i];
            i += 1;
            for x in 0..self.cols {
                let d = self.get(g, x);
                if d == NONE {
                    continue;
                }
                self.set(d, inv(x), NONE);
                let mu = self.rep(g);
                let nu = self.rep(d);
                if self.get(mu, x) != NONE {
                    let t = self.get(mu, x);
                    self.merge(nu, t);
                } else if self.get(nu, inv(x)) != NONE {
                    let t = self.get(nu, inv(x));
                    self.merge(mu, t);
                } else {
                    self.set(mu, x, nu);
                    self.set(nu, inv(x), mu);
                }
            }
        }
    }

    /// Scans `w` at coset `c`, defining cosets until the relator closes.
    fn scan_and_fill(&mut self, c: usize, w: &[usize]) -> Result<(), Exhausted> {
        if w.is_empty() {
            return Ok(());
        }
        loop {
            let mut f = c;
            let mut i = 0;
            while i < w.len() && self.get(f, w[i]) != NONE {
                f = self.get(f, w[i]);
                i += 1;
            }
            if i == w.len() {
                if f != c {
                    self.coincidence(f, c);
                }
                return Ok(());
            }
            let mut b = c;
            let mut j = w.len() as isize - 1;
            while j >= i as isize && self.get(b, inv(w[j as usize])) != NONE {
                b = self.get(b, inv(w[j as usize]));
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i as isize {
                self.set(f, w[i], b);
                self.set(b, inv(w[i]), f);
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }

    fn run(&mut self, relators: &[Vec<usize>], subgroup: &[Vec<usize>]) -> Result<(), Exhausted> {
        for w in subgroup {
            self.scan_and_fill(0, w)?;
        }
        let mut c = 0;
        while c < self.len() {
            for r in relators {
                if !self.alive(c) {
                    break;
                }
                self.scan_and_fill(c, r)?;
            }
            for x in 0..self.cols {
                if !self.alive(c) {
                    break;
                }
                if self.get(c, x) == NONE {
                    self.define(c, x)?;
                }
            }
            c += 1;
        }
        Ok(())
    }

    /// Live cosets renumbered in order.
    fn compact(&mut self, complete: bool) -> CosetTable {
        let n = self.len();
        let mut index = vec![NONE; n];
        let mut next = 0;
        for (c, slot) in index.iter_mut().enumerate() {
            if self.parent[c] == c {
                *slot = next;
                next += 1;
            }
        }
        let mut rows = Vec::with_capacity(next);
        for c in 0..n {
            if index[c] == NONE {
                continue;
            }
            let row = (0..self.cols)
                .map(|x| {
                    let d = self.get(c, x);
                    (d != NONE).then(|| index[self.rep(d)])
                })
                .collect();
            rows.push(row);
        }
        CosetTable {
            generators: self.cols / 2,
            rows,
            complete,
        }
    }
}

/// Enumerates the cosets of `⟨subgroup⟩` in the presented group.
pub fn todd_coxeter(
    pres: &GroupPresentation,
    subgroup: &[Word],
    budget: usize,
) -> Result<CosetTable, EnumerationError> {
    if budget == 0 {
        return Err(EnumerationError::ZeroBudget);
    }
    let relators: Vec<Vec<usize>> = pres
        .relators()
        .iter()
        .map(|r| encode(pres, &r.cyclically_reduced()))
        .collect::<Result<_, _>>()?;
    let subgroup: Vec<Vec<usize>> = subgroup.iter().map(|w| encode(pres, w)).collect::<Result<_, _>>()?;
    let mut e = Enumerator::new(pres.generators().len(), budget);
    match e.run(&relators, &subgroup) {
        Ok(()) => Ok(e.compact(true)),
        Err(Exhausted) => Err(EnumerationError::Exhausted {
            budget,
            partial: Box::new(e.compact(false)),
        }),
    }
}

/// Order of the group when enumeration over the trivial subgroup closes.
pub fn group_order(pres: &GroupPresentation, budget: usize) -> Result<usize, EnumerationError> {
    todd_coxeter(pres, &[], budget).map(|t| t.cosets())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{fgroup_presentation, FSignature, Generator, Role};

    fn triangle(a: u64, b: u64, c: u64) -> GroupPresentation {
        fgroup_presentation(&FSignature::from_genus(0, vec![a, b, c]).unwrap())
    }

    #[test]
    fn dihedral_order_six() {
        assert_eq!(group_order(&triangle(2, 2, 3), 1000).unwrap(), 6);
    }

    #[test]
    fn trivial_group() {
        let p = GroupPresentation::new(vec![Generator::new("a", Role::Black)], vec![Word::generator("a")]).unwrap();
        assert_eq!(group_order(&p, 1).unwrap(), 1);
    }

    #[test]
    fn polyhedral_orders() {
        assert_eq!(group_order(&triangle(2, 3, 3), 10_000).unwrap(), 12);
        assert_eq!(group_order(&triangle(2, 3, 4), 10_000).unwrap(), 24);
        assert_eq!(group_order(&triangle(2, 3, 5), 10_000).unwrap(), 60);
    }

    #[test]
    fn subgroup_index() {
        let p = triangle(2, 3, 5);
        let t = todd_coxeter(&p, &[Word::generator("c.3")], 10_000).unwrap();
        assert_eq!(t.cosets(), 12);
        assert!(t.is_complete());
    }

    #[test]
    fn free_group_exhausts() {
        let p = GroupPresentation::new(vec![Generator::new("a", Role::Black)], vec![]).unwrap();
        match todd_coxeter(&p, &[], 50) {
            Err(EnumerationError::Exhausted { budget, partial }) => {
                assert_eq!(budget, 50);
                assert!(!partial.is_complete());
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(todd_coxeter(&p, &[], 0), Err(EnumerationError::ZeroBudget));
    }

    #[test]
    fn deterministic() {
        let p = triangle(2, 3, 4);
        assert_eq!(todd_coxeter(&p, &[], 10_000), todd_coxeter(&p, &[], 10_000));
    }

    #[test]
    fn complete_table_is_a_permutation_action() {
        let p = triangle(2, 3, 4);
        let t = todd_coxeter(&p, &[], 10_000).unwrap();
        for g in 0..t.generator_count() {
            let mut hit = vec![false; t.cosets()];
            for c in 0..t.cosets() {
                let d = t.act(c, g, false).unwrap();
                assert_eq!(t.act(d, g, true), Some(c));
                assert!(!hit[d]);
                hit[d] = true;
            }
        }
    }
}
