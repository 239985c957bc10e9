#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stratifold::graph::{validate, StratifoldGraph};
use stratifold::presentation::GroupPresentation;
use stratifold::spine::{ManifoldExpr, Summand};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random valid graph with at most `max_white` white and `max_black`
/// black vertices.
pub fn random_graph(rng: &mut ChaCha8Rng, max_white: usize, max_black: usize) -> StratifoldGraph {
    let nb = rng.gen_range(0..=max_black);
    let nw = if nb == 0 { 1 } else { rng.gen_range(1..=max_white) };
    let mut g = StratifoldGraph::new();
    let whites: Vec<String> = (0..nw).map(|i| format!("w{i}")).collect();
    let blacks: Vec<String> = (0..nb).map(|i| format!("b{i}")).collect();
    for w in &whites {
        g.add_white(w.clone(), rng.gen_range(-3..=2)).unwrap();
    }
    for b in &blacks {
        g.add_black(b.clone()).unwrap();
    }
    let mut next_edge = 0;
    let mut add = |g: &mut StratifoldGraph, rng: &mut ChaCha8Rng, w: &str, b: &str| {
        let mut label = rng.gen_range(1..=4);
        if rng.gen_bool(0.4) {
            label = -label;
        }
        g.add_edge(format!("e{next_edge}"), w, b, label).unwrap();
        next_edge += 1;
    };
    if nb > 0 {
        // Random spanning tree over the bipartite vertex set.
        let mut order: Vec<(bool, usize)> = (0..nw).map(|i| (true, i)).chain((0..nb).map(|i| (false, i))).collect();
        order.shuffle(rng);
        let first_black = order.iter().position(|v| !v.0).unwrap();
        order.swap(0, first_black);
        let first_white = order.iter().position(|v| v.0).unwrap();
        order.swap(1, first_white);
        let mut placed_w: Vec<usize> = Vec::new();
        let mut placed_b: Vec<usize> = vec![order[0].1];
        for &(white, i) in &order[1..] {
            if white {
                let b = *placed_b.choose(rng).unwrap();
                add(&mut g, rng, &whites[i], &blacks[b]);
                placed_w.push(i);
            } else {
                let w = *placed_w.choose(rng).unwrap();
                add(&mut g, rng, &whites[w], &blacks[i]);
                placed_b.push(i);
            }
        }
        for _ in 0..rng.gen_range(0..=3) {
            let w = whites.choose(rng).unwrap().clone();
            let b = blacks.choose(rng).unwrap().clone();
            add(&mut g, rng, &w, &b);
        }
        for b in &blacks {
            while g.incident(b).map(|e| e.label.unsigned_abs()).sum::<u64>() < 3 {
                let w = whites.choose(rng).unwrap().clone();
                add(&mut g, rng, &w, b);
            }
        }
    }
    assert!(validate(&g).is_empty(), "generator produced an invalid graph");
    g
}

pub fn random_summand(rng: &mut ChaCha8Rng) -> Summand {
    match rng.gen_range(0..4) {
        0 => Summand::Lens(rng.gen_range(2..=9)),
        1 => Summand::S2xS1,
        2 => Summand::TwistedS2xS1,
        _ => Summand::P2xS1,
    }
}

pub fn random_expr(rng: &mut ChaCha8Rng, max_summands: usize) -> ManifoldExpr {
    let n = rng.gen_range(1..=max_summands);
    ManifoldExpr::new((0..n).map(|_| random_summand(rng)).collect()).unwrap()
}

/// Exponent-sum matrix, one row per relator.
pub fn exponent_matrix(p: &GroupPresentation) -> Vec<Vec<i64>> {
    let names: Vec<&str> = p.generator_names().collect();
    p.relators()
        .iter()
        .map(|r| names.iter().map(|g| r.exponent_sum(g)).collect())
        .collect()
}

fn det(m: &[Vec<BigInt>]) -> BigInt {
    // Bareiss fraction-free elimination.
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut a = m.to_vec();
    let mut sign = BigInt::from(1);
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Rank over the rationals.
pub fn rank(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let (f, g) = (a[i][c].clone(), a[r][c].clone());
                for j in 0..cols {
                    a[i][j] = &a[i][j] * &g - &a[r][j] * &f;
                }
            }
        }
        r += 1;
    }
    r
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Free rank and nontrivial invariant factors of `Z^cols / rowspace`, from
/// the gcds of the k×k minors. Only for small matrices.
pub fn invariants_by_minors(m: &[Vec<i64>], cols: usize) -> (usize, Vec<u64>) {
    let r = rank(m);
    let mut divisors = vec![BigInt::from(1)];
    for k in 1..=r {
        let mut g = BigInt::zero();
        for rows in subsets(m.len(), k) {
            for cs in subsets(cols, k) {
                let minor: Vec<Vec<BigInt>> = rows
                    .iter()
                    .map(|&i| cs.iter().map(|&j| BigInt::from(m[i][j])).collect())
                    .collect();
                g = g.gcd(&det(&minor));
            }
        }
        divisors.push(g.abs());
    }
    let factors = (1..=r)
        .map(|k| (&divisors[k] / &divisors[k - 1]).try_into().unwrap())
        .filter(|&d: &u64| d != 1)
        .collect();
    (cols - r, factors)
}

/// Multiset of prime powers of the torsion invariants.
pub fn primary_parts(factors: &[u64]) -> BTreeMap<u64, usize> {
    let mut out = BTreeMap::new();
    for &f in factors {
        let mut n = f;
        let mut p = 2;
        while n > 1 {
            if n % p == 0 {
                let mut q = 1;
                while n % p == 0 {
                    n /= p;
                    q *= p;
                }
                *out.entry(q).or_default() += 1;
            }
            p += 1;
        }
    }
    out
}

/// Known first homology of each prime spine: free rank and torsion orders.
pub fn expected_h1(s: Summand) -> (usize, Vec<u64>) {
    match s {
        Summand::Lens(q) => (0, vec![q]),
        Summand::S2xS1 | Summand::TwistedS2xS1 => (1, vec![]),
        Summand::P2xS1 => (1, vec![2]),
        Summand::S3 => (0, vec![]),
    }
}
