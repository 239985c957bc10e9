mod common;

use std::collections::BTreeMap;

use stratifold::algebra::abelianization;
use stratifold::analysis::{obstructions, q_graph};
use stratifold::cells::cw_euler;
use stratifold::graph::{euler_characteristic, normalize, validate, StratifoldGraph};
use stratifold::presentation::natural_presentation;
use stratifold::spine::{attachment_vertex, delta_sum, primitive_spine, recognize, synth, ManifoldExpr, Summand};

use common::{expected_h1, primary_parts, random_expr, random_summand, rng};

fn h1(g: &StratifoldGraph) -> (usize, BTreeMap<u64, usize>) {
    let a = abelianization(&natural_presentation(&normalize(g).unwrap()).unwrap());
    (a.free_rank, primary_parts(&a.torsion_u64()))
}

fn expected(summands: &[Summand]) -> (usize, BTreeMap<u64, usize>) {
    let mut rank = 0;
    let mut torsion = Vec::new();
    for &s in summands {
        let (r, t) = expected_h1(s);
        rank += r;
        torsion.extend(t);
    }
    (rank, primary_parts(&torsion))
}

#[test]
fn synth_recognize_round_trip() {
    let mut r = rng(3);
    for _ in 0..60 {
        let e = random_expr(&mut r, 5);
        let g = synth(&e).unwrap();
        assert_eq!(recognize(&g).unwrap(), e);
        assert_eq!(synth(&recognize(&g).unwrap()).unwrap(), g);
    }
}

#[test]
fn synth_outputs_are_valid_unobstructed_and_have_expected_homology() {
    let mut r = rng(4);
    for _ in 0..30 {
        let e = random_expr(&mut r, 4);
        let g = synth(&e).unwrap();
        assert!(validate(&g).is_empty(), "{e}");
        assert_eq!(euler_characteristic(&g).unwrap(), 1, "{e}");
        assert_eq!(h1(&g), expected(e.summands()), "{e}");
        assert_eq!(obstructions(&g, 20_000).unwrap(), [], "{e}");
        let q = q_graph(&g, 20_000).unwrap();
        assert!(abelianization(&q.presentation).is_torsion_free(), "{e}");
    }
}

#[test]
fn delta_sum_laws_on_random_pairs() {
    let mut r = rng(5);
    for _ in 0..100 {
        let (s1, s2) = (random_summand(&mut r), random_summand(&mut r));
        let a = primitive_spine(s1).unwrap().with_prefix("x.");
        let b = primitive_spine(s2).unwrap().with_prefix("y.");
        let sum = delta_sum(&a, &attachment_vertex(&a).unwrap(), &b, &attachment_vertex(&b).unwrap()).unwrap();
        assert_eq!(h1(&sum), expected(&[s1, s2]));
        let chi = euler_characteristic(&a).unwrap() + euler_characteristic(&b).unwrap() - 1;
        assert_eq!(cw_euler(&sum).unwrap(), chi);
    }
}

#[test]
fn every_pair_obeys_euler_law() {
    let all: Vec<Summand> = (2..=9).map(Summand::Lens).chain([Summand::S2xS1, Summand::TwistedS2xS1, Summand::P2xS1]).collect();
    for &s1 in &all {
        for &s2 in &all {
            let a = primitive_spine(s1).unwrap().with_prefix("x.");
            let b = primitive_spine(s2).unwrap().with_prefix("y.");
            for wa in a.whites() {
                for wb in b.whites() {
                    let sum = delta_sum(&a, &wa.id, &b, &wb.id).unwrap();
                    assert_eq!(euler_characteristic(&sum).unwrap(), 1);
                    assert_eq!(cw_euler(&sum).unwrap(), 1);
                }
            }
        }
    }
}

#[test]
fn s3_has_no_spine() {
    assert!(synth(&ManifoldExpr::new(vec![Summand::S3]).unwrap()).is_err());
    assert!(synth(&ManifoldExpr::new(vec![Summand::Lens(3), Summand::S3]).unwrap()).is_err());
}
