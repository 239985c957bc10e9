mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use stratifold::algebra::abelianization;
use stratifold::cells::cw_euler;
use stratifold::format::{parse_graph, serialize_graph};
use stratifold::graph::{
    apply_move, are_isomorphic, euler_characteristic, is_normalized, normalize, validate, Move, StratifoldGraph,
};
use stratifold::presentation::natural_presentation;

use common::{exponent_matrix, invariants_by_minors, random_graph, rng};

fn random_move(g: &StratifoldGraph, r: &mut rand_chacha::ChaCha8Rng) -> Option<Move> {
    let candidates: Vec<Move> = g
        .blacks()
        .map(|b| Move::FlipBlack(b.id.clone()))
        .chain(g.whites().filter(|w| w.is_orientable()).map(|w| Move::FlipWhite(w.id.clone())))
        .chain(
            g.edges()
                .filter(|e| !g.white(&e.white).unwrap().is_orientable())
                .map(|e| Move::FlipEdge(e.id.clone())),
        )
        .collect();
    candidates.choose(r).cloned()
}

fn relabel(g: &StratifoldGraph, r: &mut rand_chacha::ChaCha8Rng) -> StratifoldGraph {
    let mut ids: Vec<String> = g.whites().map(|w| w.id.clone()).chain(g.blacks().map(|b| b.id.clone())).collect();
    let mut fresh: Vec<usize> = (0..ids.len()).collect();
    fresh.shuffle(r);
    let name = |id: &str, ids: &[String]| format!("v{}", fresh[ids.iter().position(|x| x == id).unwrap()]);
    ids.sort();
    let mut out = StratifoldGraph::new();
    for w in g.whites() {
        out.add_white(name(&w.id, &ids), w.genus).unwrap();
    }
    for b in g.blacks() {
        out.add_black(name(&b.id, &ids)).unwrap();
    }
    for (i, e) in g.edges().enumerate() {
        out.add_edge(format!("x{i}"), name(&e.white, &ids), name(&e.black, &ids), e.label)
            .unwrap();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn serialization_round_trip(seed in any::<u64>()) {
        let g = random_graph(&mut rng(seed), 5, 4);
        prop_assert_eq!(parse_graph(&serialize_graph(&g)).unwrap(), g);
    }

    #[test]
    fn euler_matches_cell_count(seed in any::<u64>()) {
        let g = random_graph(&mut rng(seed), 5, 4);
        prop_assert_eq!(euler_characteristic(&g).unwrap(), cw_euler(&g).unwrap());
    }

    #[test]
    fn moves_and_relabeling_preserve_class(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 4, 3);
        let mut h = g.clone();
        for _ in 0..r.gen_range(0..6) {
            if let Some(mv) = random_move(&h, &mut r) {
                apply_move(&mut h, &mv).unwrap();
            }
        }
        let h = relabel(&h, &mut r);
        prop_assert!(are_isomorphic(&g, &h).unwrap());
    }

    #[test]
    fn normalization(seed in any::<u64>()) {
        let g = random_graph(&mut rng(seed), 5, 4);
        let n = normalize(&g).unwrap();
        prop_assert!(is_normalized(&n).unwrap());
        prop_assert!(are_isomorphic(&g, &n).unwrap());
        prop_assert_eq!(normalize(&n).unwrap(), n);
    }

    #[test]
    fn abelianization_matches_minors(seed in any::<u64>()) {
        let g = random_graph(&mut rng(seed), 2, 2);
        let p = natural_presentation(&normalize(&g).unwrap()).unwrap();
        let m = exponent_matrix(&p);
        let cols = p.generators().len();
        prop_assume!(cols <= 9);
        let h1 = abelianization(&p);
        prop_assert_eq!((h1.free_rank, h1.torsion_u64()), invariants_by_minors(&m, cols));
    }
}

#[test]
fn random_graphs_are_valid_and_varied() {
    let mut r = rng(7);
    let graphs: Vec<StratifoldGraph> = (0..50).map(|_| random_graph(&mut r, 5, 4)).collect();
    assert!(graphs.iter().all(|g| validate(g).is_empty()));
    assert!(graphs.iter().any(|g| g.black_count() >= 3));
    assert!(graphs.iter().any(|g| g.whites().any(|w| w.genus < 0)));
}

#[test]
fn label_sign_distinguishes_torus_and_klein_pieces() {
    let text = |l: i64| format!("white a genus 0\nwhite d genus 0\nblack b\nedge e1 a b 1\nedge e2 a b {l}\nedge e3 d b 1\n");
    let torus = parse_graph(&text(-1)).unwrap();
    let klein = parse_graph(&text(1)).unwrap();
    assert!(!are_isomorphic(&torus, &klein).unwrap());
}
