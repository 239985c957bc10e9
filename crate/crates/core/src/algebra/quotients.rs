//! Transitive permutation representations of small degree, found by
//! backtracking over standardized coset tables (low-index subgroups).
//!
//! They provide finite quotients in which the image of an element has a
//! computable order, a lower bound for its order in the group.

use super::coset::{cycle_lcm, inv};

const NONE: usize = usize::MAX;

/// A homomorphism onto a transitive subgroup of `S_degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationQuotient {
    degree: usize,
    cols: usize,
    table: Vec<usize>,
}

impl PermutationQuotient {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Image of an encoded word as a permutation of `0..degree`.
    pub(crate) fn image(&self, letters: &[usize]) -> Vec<usize> {
        (0..self.degree)
            .map(|c| letters.iter().fold(c, |c, &x| self.table[c * self.cols + x]))
            .collect()
    }

    pub(crate) fn order_of(&self, letters: &[usize]) -> u64 {
        cycle_lcm(&self.image(letters))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SearchEnd {
    /// The visitor asked to stop.
    Stopped,
    /// Every table up to the degree bound was visited.
    Finished,
    /// The node budget ran out.
    Exhausted,
}

struct Search<'a> {
    relators: &'a [Vec<usize>],
    cols: usize,
    max_degree: usize,
    nodes: usize,
    node_budget: usize,
}

impl Search<'_> {
    /// Closes every relator cycle that has a single gap. Returns false on a
    /// contradiction.
    fn deduce(&self, table: &mut [usize], n: usize) -> bool {
        let cols = self.cols;
        loop {
            let mut changed = false;
            for c in 0..n {
                for r in self.relators {
                    if r.is_empty() {
                        continue;
                    }
                    let mut f = c;
                    let mut i = 0;
                    while i < r.len() && table[f * cols + r[i]] != NONE {
                        f = table[f * cols + r[i]];
                        i += 1;
                    }
                    if i == r.len() {
                        if f != c {
                            return false;
                        }
                        continue;
                    }
                    let mut b = c;
                    let mut j = r.len() as isize - 1;
                    while j >= i as isize && table[b * cols + inv(r[j as usize])] != NONE {
                        b = table[b * cols + inv(r[j as usize])];
                        j -= 1;
                    }
                    if j < i as isize {
                        if f != b {
                            return false;
                        }
                        continue;
                    }
                    if j == i as isize {
                        table[f * cols + r[i]] = b;
                        table[b * cols + inv(r[i])] = f;
                        changed = true;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn dfs(
        &mut self,
        table: Vec<usize>,
        n: usize,
        visit: &mut dyn FnMut(&PermutationQuotient) -> bool,
    ) -> Option<SearchEnd> {
        self.nodes += 1;
        if self.nodes > self.node_budget {
            return Some(SearchEnd::Exhausted);
        }
        let cols = self.cols;
        let gap = (0..n * cols).find(|&k| table[k] == NONE);
        let Some(k) = gap else {
            let q = PermutationQuotient {
                degree: n,
                cols,
                table: table[..n * cols].to_vec(),
            };
            return visit(&q).then_some(SearchEnd::Stopped);
        };
        let (c, x) = (k / cols, k % cols);
        let mut targets: Vec<usize> = (0..n).filter(|&d| table[d * cols + inv(x)] == NONE).collect();
        if n < self.max_degree {
            targets.push(n);
        }
        for d in targets {
            let mut next = table.clone();
            next[c * cols + x] = d;
            next[d * cols + inv(x)] = c;
            let m = if d == n { n + 1 } else { n };
            if self.deduce(&mut next, m) {
                if let Some(end) = self.dfs(next, m, visit) {
                    return Some(end);
                }
            }
        }
        None
    }
}

/// Visits transitive actions of degree at most `max_degree` (conjugate
/// subgroups may repeat). The visitor returns `true` to stop.
pub(crate) fn search_quotients(
    relators: &[Vec<usize>],
    generators: usize,
    max_degree: usize,
    node_budget: usize,
    visit: &mut dyn FnMut(&PermutationQuotient) -> bool,
) -> SearchEnd {
    let cols = 2 * generators;
    if max_degree == 0 {
        return SearchEnd::Finished;
    }
    let mut search = Search {
        relators,
        cols,
        max_degree,
        nodes: 0,
        node_budget,
    };
    let mut table = vec![NONE; max_degree * cols];
    if !search.deduce(&mut table, 1) {
        return SearchEnd::Finished;
    }
    search.dfs(table, 1, visit).unwrap_or(SearchEnd::Finished)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::coset::encode;
    use crate::presentation::{fgroup_presentation, FSignature};

    fn relators(p: &crate::presentation::GroupPresentation) -> Vec<Vec<usize>> {
        p.relators().iter().map(|r| encode(p, r).unwrap()).collect()
    }

    #[test]
    fn s3_actions() {
        let p = fgroup_presentation(&FSignature::from_genus(0, vec![2, 2, 3]).unwrap());
        let rels = relators(&p);
        let mut degrees = Vec::new();
        let end = search_quotients(&rels, 3, 6, 100_000, &mut |q| {
            degrees.push(q.degree());
            false
        });
        assert_eq!(end, SearchEnd::Finished);
        // Subgroups of S3: index 1, three of index 3, one of index 2, trivial.
        assert!(degrees.contains(&1));
        assert!(degrees.contains(&2));
        assert!(degrees.contains(&3));
        assert!(degrees.contains(&6));
        assert!(!degrees.iter().any(|&d| d == 4 || d == 5));
    }

    #[test]
    fn hurwitz_group_has_degree_seven_quotient() {
        let p = fgroup_presentation(&FSignature::from_genus(0, vec![2, 3, 7]).unwrap());
        let rels = relators(&p);
        let c3 = encode(&p, &crate::presentation::Word::generator("c.3")).unwrap();
        let mut best = 1;
        search_quotients(&rels, 3, 7, 1_000_000, &mut |q| {
            best = best.max(q.order_of(&c3));
            best == 7
        });
        assert_eq!(best, 7);
    }
}
