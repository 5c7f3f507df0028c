use std::sync::Arc;

use davis_kit::builtins;
use davis_kit::cartan::GeneralizedCartanMatrix;
use davis_kit::cosheaf::{build_exquisite, schneider_stuhler_check, GModule};
use davis_kit::coxeter::CoxeterSystem;
use davis_kit::field::Field;
use davis_kit::hecke::HeckeAlgebra;
use davis_kit::measure::{GroupFunction, MeasureContext};
use davis_kit::simplicial::{CrossedAction, SimplicialSet};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn config(cases: u32, seed: u64) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(seed),
        ..ProptestConfig::default()
    }
}

fn system(which: usize) -> CoxeterSystem {
    let rows = match which {
        0 => vec![vec![2, -1], vec![-1, 2]],
        1 => vec![vec![2, -2], vec![-1, 2]],
        2 => vec![vec![2, -2], vec![-2, 2]],
        _ => vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]],
    };
    CoxeterSystem::new(GeneralizedCartanMatrix::new(rows).unwrap())
}

fn word(rank: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..rank, 0..8)
}

fn s3_function() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..=4, 6)
}

fn tree_from_prufer(seq: &[usize]) -> SimplicialSet {
    let n = seq.len() + 2;
    let mut degree = vec![1; n];
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::new();
    for &v in seq {
        let leaf = (0..n).find(|&u| degree[u] == 1).unwrap();
        edges.push(vec![leaf.min(v), leaf.max(v)]);
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push(vec![rest[0], rest[1]]);
    SimplicialSet::from_ordered_simplices(vec![(0..n).map(|v| vec![v]).collect(), edges]).unwrap()
}

fn prufer() -> impl Strategy<Value = Vec<usize>> {
    (0usize..6).prop_flat_map(|len| prop::collection::vec(0..len + 2, len))
}

proptest! {
    #![proptest_config(config(96, 3))]

    #[test]
    fn canonical_words(which in 0usize..4, w in word(3)) {
        let sys = system(which);
        let w: Vec<usize> = w.into_iter().map(|i| i % sys.rank()).collect();
        let x = sys.reduce_word(&w).unwrap();
        prop_assert!(x.length() <= w.len());
        prop_assert_eq!(x.length() % 2, w.len() % 2);
        prop_assert_eq!(&sys.reduce_word(x.word()).unwrap(), &x);
        let inv = sys.invert(&x).unwrap();
        prop_assert!(sys.multiply(&x, &inv).unwrap().is_identity());
        prop_assert_eq!(inv.length(), x.length());
        let rev: Vec<usize> = w.iter().rev().copied().collect();
        prop_assert_eq!(sys.reduce_word(&rev).unwrap(), inv);
    }

    #[test]
    fn weyl_multiplication_is_associative(which in 0usize..4, a in word(3), b in word(3), c in word(3)) {
        let sys = system(which);
        let r = sys.rank();
        let el = |w: Vec<usize>| sys.reduce_word(&w.into_iter().map(|i| i % r).collect::<Vec<_>>()).unwrap();
        let (a, b, c) = (el(a), el(b), el(c));
        let left = sys.multiply(&sys.multiply(&a, &b).unwrap(), &c).unwrap();
        let right = sys.multiply(&a, &sys.multiply(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn convolution_algebra(a in s3_function(), b in s3_function(), c in s3_function(), p in prop::sample::select(vec![0u64, 5, 7])) {
        let g = builtins::s3();
        let field = if p == 0 { Field::Rational } else { Field::Prime(p) };
        let ctx = MeasureContext::trivial(g.clone(), field);
        let f = |v: Vec<i64>| GroupFunction::from_values(field, v.into_iter().map(|x| field.from_i64(x)).collect());
        let (a, b, c) = (f(a), f(b), f(c));
        let ab_c = ctx.convolve(&ctx.convolve(&a, &b).unwrap(), &c).unwrap();
        let a_bc = ctx.convolve(&a, &ctx.convolve(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        let delta = ctx.lambda(&[g.identity()]).unwrap();
        prop_assert_eq!(ctx.convolve(&delta, &a).unwrap(), a.clone());
        let anti_ab = ctx.antipode(&ctx.convolve(&a, &b).unwrap()).unwrap();
        let ba = ctx.convolve(&ctx.antipode(&b).unwrap(), &ctx.antipode(&a).unwrap()).unwrap();
        prop_assert_eq!(anti_ab, ba);
    }

    #[test]
    fn hecke_involutions_square_to_one(which in 0usize..2, w in word(2)) {
        let h = HeckeAlgebra::new(system(which));
        let t = h.basis_word(&w).unwrap();
        prop_assert_eq!(t.antipode().unwrap().antipode().unwrap(), t.clone());
        prop_assert_eq!(t.iota_im().unwrap().iota_im().unwrap(), t.clone());
        prop_assert_eq!(t.sigma_im().unwrap().sigma_im().unwrap(), t);
    }
}

proptest! {
    #![proptest_config(config(32, 5))]

    #[test]
    fn trees_are_acyclic(seq in prufer()) {
        let t = tree_from_prufer(&seq);
        let h = t.chain_complex(Field::Rational).homology();
        prop_assert_eq!(h, vec![1, 0]);
    }

    #[test]
    fn trivial_system_resolves_any_module(seq in prufer(), module in 0usize..4, p in prop::sample::select(vec![0u64, 5])) {
        let field = if p == 0 { Field::Rational } else { Field::Prime(p) };
        let g = builtins::s3();
        let t = tree_from_prufer(&seq);
        let act = CrossedAction::trivial(g.clone(), &t);
        let sys = build_exquisite(&t, &act, vec![g.trivial(); t.count(0)]).unwrap();
        let v = match module {
            0 => GModule::trivial(Arc::clone(&g), field),
            1 => GModule::regular(Arc::clone(&g), field),
            2 => builtins::sign_module(Arc::clone(&g), field),
            _ => builtins::permutation_module(Arc::clone(&g), field),
        };
        let r = schneider_stuhler_check(&t, &act, &v, &sys).unwrap();
        prop_assert!(r.exact);
        prop_assert_eq!(r.dim_c0 - r.dim_c1, r.dim_v);
    }
}
