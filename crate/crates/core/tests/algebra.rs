mod common;

use num_bigint::BigInt;
use rand::Rng;

use stratifold::algebra::{
    abelianization, element_order, smith_normal_form, todd_coxeter, AbelianMap, IntMatrix, OrderVerdict,
};
use stratifold::analysis::classify_fgroup;
use stratifold::presentation::{fgroup_presentation, FSignature, Word};

use common::{exponent_matrix, invariants_by_minors, rng};

fn random_matrix(r: &mut rand_chacha::ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<i64>> {
    (0..rows).map(|_| (0..cols).map(|_| r.gen_range(-6..=6)).collect()).collect()
}

/// Product of random elementary integer operations.
pub fn random_unimodular(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> IntMatrix {
    let mut m = vec![vec![0i64; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    for _ in 0..3 * n {
        let (i, j) = (r.gen_range(0..n), r.gen_range(0..n));
        match r.gen_range(0..3) {
            0 if i != j => {
                let k = r.gen_range(-3..=3);
                for c in 0..n {
                    m[i][c] += k * m[j][c];
                }
            }
            1 => m.swap(i, j),
            _ => m[i].iter_mut().for_each(|x| *x = -*x),
        }
    }
    IntMatrix::from_rows(&m, n)
}

#[test]
fn snf_is_invariant_under_unimodular_change() {
    let mut r = rng(11);
    for _ in 0..50 {
        let (rows, cols) = (r.gen_range(1..=5), r.gen_range(1..=5));
        let raw = random_matrix(&mut r, rows, cols);
        let m = IntMatrix::from_rows(&raw, cols);
        let base = smith_normal_form(&m);
        let moved = random_unimodular(&mut r, rows).mul(&m).mul(&random_unimodular(&mut r, cols));
        let other = smith_normal_form(&moved);
        assert_eq!(base.invariants, other.invariants);
        assert_eq!(
            (base.invariants.free_rank, base.invariants.torsion_u64()),
            invariants_by_minors(&raw, cols)
        );
        assert_eq!(base.left.mul(&m).mul(&base.right), base.diagonal);
    }
}

#[test]
fn snf_handles_large_entries() {
    let big = BigInt::from(2).pow(80);
    let m = IntMatrix::from_rows(&[vec![big.clone(), BigInt::from(0)], vec![BigInt::from(0), big * 3]], 2);
    let s = smith_normal_form(&m);
    assert_eq!(s.invariants.torsion.len(), 2);
}

#[test]
fn coset_enumeration_is_deterministic() {
    let p = fgroup_presentation(&FSignature::from_genus(0, vec![2, 3, 4]).unwrap());
    let a = todd_coxeter(&p, &[], 10_000).unwrap();
    let b = todd_coxeter(&p, &[], 10_000).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.cosets(), 24);
}

#[test]
fn classification_agrees_with_enumeration_on_small_signatures() {
    let mut checked = 0;
    for base in [0i64, 1, -1, -2] {
        for p in 0..=3usize {
            let mut periods = vec![2u64; p];
            loop {
                let sig = FSignature::from_genus(base, periods.clone()).unwrap();
                let class = classify_fgroup(&sig);
                let pres = fgroup_presentation(&sig);
                match (class.order(), todd_coxeter(&pres, &[], 5_000)) {
                    (Some(n), Ok(t)) => assert_eq!(t.cosets() as u64, n, "{sig}"),
                    (Some(n), Err(e)) => panic!("{sig} should have order {n}: {e}"),
                    (None, Ok(t)) => panic!("{sig} classified infinite but enumerates to {}", t.cosets()),
                    (None, Err(_)) => {}
                }
                checked += 1;
                // Next nondecreasing period tuple with entries at most 6.
                let Some(i) = (0..p).rev().find(|&i| periods[i] < 6) else {
                    break;
                };
                let v = periods[i] + 1;
                periods[i..].iter_mut().for_each(|m| *m = v);
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn finite_fgroup_generators_have_order_two() {
    let table: Vec<Vec<u64>> = (2..=8)
        .map(|m| vec![2, 2, m])
        .chain([vec![2, 3, 3], vec![2, 3, 4], vec![2, 3, 5]])
        .collect();
    for periods in table {
        let p = fgroup_presentation(&FSignature::from_genus(0, periods.clone()).unwrap());
        let v = element_order(&p, &Word::generator("c.1"), 10_000).unwrap();
        assert_eq!(v.finite_order(), Some(2), "{periods:?}");
    }
}

#[test]
fn finite_orders_are_multiples_of_abelian_orders() {
    let sigs = [
        FSignature::from_genus(0, vec![2, 2, 5]).unwrap(),
        FSignature::from_genus(-1, vec![3]).unwrap(),
        FSignature::from_genus(-1, vec![2, 2]).unwrap(),
        FSignature::from_genus(0, vec![4, 6]).unwrap(),
    ];
    let words = [
        Word::generator("c.1"),
        Word::new([("c.1", 1), ("c.2", -1)]),
        Word::power("y.1", 2),
        Word::generator("y.1"),
    ];
    for sig in &sigs {
        let p = fgroup_presentation(sig);
        let abelian = AbelianMap::new(&p);
        for w in &words {
            if p.check_word(w).is_err() {
                continue;
            }
            match element_order(&p, w, 20_000).unwrap() {
                OrderVerdict::Finite { order, .. } => {
                    let a: u64 = abelian.image_order(&p, w).unwrap().try_into().unwrap();
                    assert_eq!(order % a, 0, "{sig} {w}");
                }
                OrderVerdict::Infinite => assert!(abelian.image_order(&p, w).is_none()),
                OrderVerdict::Unknown { .. } => {}
            }
        }
    }
}

#[test]
fn abelianization_of_fgroups_matches_minors() {
    for (g, m) in [(0, vec![2, 3, 7]), (-2, vec![3]), (1, vec![2, 4]), (-1, vec![2, 2])] {
        let p = fgroup_presentation(&FSignature::from_genus(g, m).unwrap());
        let h1 = abelianization(&p);
        let cols = p.generators().len();
        assert_eq!((h1.free_rank, h1.torsion_u64()), invariants_by_minors(&exponent_matrix(&p), cols));
    }
}
