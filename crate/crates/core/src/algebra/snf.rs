//! Smith normal form over `Z` with arbitrary-precision entries.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::presentation::{GroupPresentation, Word};

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix");
            for (j, x) in row.iter().enumerate() {
                m[(i, j)] = x.clone().into();
            }
        }
        m
    }

    pub fn diagonal<T: Into<BigInt> + Clone>(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = d.clone().into();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[dst] += k * row[src]`
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * k;
            self[(dst, j)] += v;
        }
    }

    /// `col[dst] += k * col[src]`
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * k;
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

/// Finitely generated abelian group `Z^r ⊕ Z/d1 ⊕ ... ⊕ Z/dk` with
/// `d1 | d2 | ... | dk` and every `di >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AbelianInvariants {
    pub free_rank: usize,
    pub torsion: Vec<BigUint>,
}

impl AbelianInvariants {
    pub fn trivial() -> Self {
        Self::default()
    }

    /// Builds the invariants from arbitrary cyclic orders (not necessarily a
    /// divisibility chain); orders 0 count as free factors.
    pub fn from_cyclic_orders(orders: &[u64]) -> Self {
        let m = IntMatrix::diagonal(orders);
        smith_normal_form(&m).invariants
    }

    pub fn torsion_u64(&self) -> Vec<u64> {
        self.torsion
            .iter()
            .map(|d| u64::try_from(d).expect("torsion factor fits in u64"))
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// `A ⊕ B` in invariant-factor form.
    pub fn direct_sum(&self, other: &AbelianInvariants) -> AbelianInvariants {
        let diag: Vec<BigInt> = self
            .torsion
            .iter()
            .chain(other.torsion.iter())
            .map(|d| BigInt::from(d.clone()))
            .collect();
        let mut out = smith_normal_form(&IntMatrix::diagonal(&diag)).invariants;
        out.free_rank = self.free_rank + other.free_rank;
        out
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub invariants: AbelianInvariants,
    /// `left * m * right`.
    pub diagonal: IntMatrix,
    pub rank: usize,
    /// Unimodular row transform.
    pub left: IntMatrix,
    /// Unimodular column transform.
    pub right: IntMatrix,
}

/// Smith normal form of the relation matrix `m` (rows are relations,
/// columns are generators). Pivot: smallest nonzero `|entry|` in the active
/// block, ties broken by `(row, col)`.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut left = IntMatrix::identity(rows);
    let mut right = IntMatrix::identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = smallest_entry(&a, t) else {
            break;
        };
        a.swap_rows(t, pi);
        left.swap_rows(t, pi);
        a.swap_cols(t, pj);
        right.swap_cols(t, pj);

        let mut clean = true;
        for i in t + 1..rows {
            if a[(i, t)].is_zero() {
                continue;
            }
            let q = -a[(i, t)].div_floor(&a[(t, t)]);
            a.add_row(i, t, &q);
            left.add_row(i, t, &q);
            clean &= a[(i, t)].is_zero();
        }
        for j in t + 1..cols {
            if a[(t, j)].is_zero() {
                continue;
            }
            let q = -a[(t, j)].div_floor(&a[(t, t)]);
            a.add_col(j, t, &q);
            right.add_col(j, t, &q);
            clean &= a[(t, j)].is_zero();
        }
        if !clean {
            // A smaller remainder appeared; pick a new pivot.
            continue;
        }
        let pivot = a[(t, t)].clone();
        let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[(i, j)].is_multiple_of(&pivot)));
        if let Some(i) = offender {
            let one = BigInt::one();
            a.add_row(t, i, &one);
            left.add_row(t, i, &one);
            continue;
        }
        if pivot.is_negative() {
            a.negate_row(t);
            left.negate_row(t);
        }
        t += 1;
    }
    let rank = t;
    let torsion = (0..rank)
        .map(|i| a[(i, i)].magnitude().clone())
        .filter(|d| !d.is_one())
        .collect();
    SmithForm {
        invariants: AbelianInvariants {
            free_rank: cols - rank,
            torsion,
        },
        diagonal: a,
        rank,
        left,
        right,
    }
}

fn smallest_entry(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let v = &a[(i, j)];
            if v.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| v.magnitude() < a[(bi, bj)].magnitude()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Exponent-sum matrix: one row per relator, one column per generator.
pub fn relation_matrix(pres: &GroupPresentation) -> IntMatrix {
    let rows: Vec<Vec<i64>> = pres
        .relators()
        .iter()
        .map(|r| exponent_vector(pres, r))
        .collect();
    IntMatrix::from_rows(&rows, pres.generators().len())
}

fn exponent_vector(pres: &GroupPresentation, w: &Word) -> Vec<i64> {
    let mut v = vec![0i64; pres.generators().len()];
    for s in w.syllables() {
        let i = pres.index_of(&s.generator).expect("word over presentation generators");
        v[i] += s.exponent;
    }
    v
}

/// `H1` of the presented group.
pub fn abelianization(pres: &GroupPresentation) -> AbelianInvariants {
    smith_normal_form(&relation_matrix(pres)).invariants
}

/// Abelianization together with the coordinate change needed to read off
/// the image of a word.
#[derive(Debug, Clone)]
pub struct AbelianMap {
    form: SmithForm,
}

impl AbelianMap {
    pub fn new(pres: &GroupPresentation) -> Self {
        AbelianMap {
            form: smith_normal_form(&relation_matrix(pres)),
        }
    }

    pub fn invariants(&self) -> &AbelianInvariants {
        &self.form.invariants
    }

    /// Order of the image of `w` in `H1`; `None` when it is infinite.
    pub fn image_order(&self, pres: &GroupPresentation, w: &Word) -> Option<BigUint> {
        let v = exponent_vector(pres, w);
        let right = &self.form.right;
        let mut order = BigUint::one();
        for j in 0..right.cols() {
            let mut coord = BigInt::zero();
            for (i, x) in v.iter().enumerate() {
                if *x != 0 {
                    coord += &right[(i, j)] * BigInt::from(*x);
                }
            }
            if coord.is_zero() {
                continue;
            }
            if j >= self.form.rank {
                return None;
            }
            let d = self.form.diagonal[(j, j)].magnitude().clone();
            let c = coord.magnitude() % &d;
            let part = &d / c.gcd(&d);
            order = order.lcm(&part);
        }
        Some(order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{Generator, Role};

    fn inv(free_rank: usize, torsion: &[u64]) -> AbelianInvariants {
        AbelianInvariants {
            free_rank,
            torsion: torsion.iter().map(|&d| BigUint::from(d)).collect(),
        }
    }

    #[test]
    fn examples() {
        let f = smith_normal_form(&IntMatrix::diagonal(&[2, 3]));
        assert_eq!(f.invariants, inv(0, &[6]));
        assert_eq!(smith_normal_form(&IntMatrix::zeros(2, 3)).invariants, inv(3, &[]));
        assert_eq!(smith_normal_form(&IntMatrix::identity(3)).invariants, inv(0, &[]));
    }

    #[test]
    fn transforms_replay() {
        let m = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], 3);
        let f = smith_normal_form(&m);
        assert_eq!(f.left.mul(&m).mul(&f.right), f.diagonal);
        assert_eq!(f.invariants, inv(0, &[2, 6, 12]));
    }

    #[test]
    fn direct_sum_merges_coprime_factors() {
        assert_eq!(inv(0, &[3]).direct_sum(&inv(1, &[5])), inv(1, &[15]));
        assert_eq!(inv(0, &[2]).direct_sum(&inv(0, &[2])), inv(0, &[2, 2]));
        assert_eq!(AbelianInvariants::from_cyclic_orders(&[4, 6]), inv(0, &[2, 12]));
    }

    #[test]
    fn word_images() {
        let pres = GroupPresentation::new(
            vec![Generator::new("a", Role::Black), Generator::new("b", Role::Black)],
            vec![Word::new([("a", -1), ("b", 1), ("a", 1), ("b", 1)])],
        )
        .unwrap();
        let map = AbelianMap::new(&pres);
        assert_eq!(map.invariants(), &inv(1, &[2]));
        assert_eq!(map.image_order(&pres, &Word::generator("b")), Some(BigUint::from(2u32)));
        assert_eq!(map.image_order(&pres, &Word::generator("a")), None);
        assert_eq!(map.image_order(&pres, &Word::power("b", 2)), Some(BigUint::one()));
    }

    #[test]
    fn display() {
        assert_eq!(inv(2, &[2, 6]).to_string(), "Z^2 + Z/2 + Z/6");
        assert_eq!(inv(0, &[]).to_string(), "0");
    }
}
