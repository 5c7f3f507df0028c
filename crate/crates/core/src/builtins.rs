//! Small named fixtures: S_3, its sign character, the star tree with three
//! leaves and the Davis complex of A2.

use std::sync::Arc;

use crate::cartan::GeneralizedCartanMatrix;
use crate::coxeter::CoxeterSystem;
use crate::cosheaf::GModule;
use crate::davis::{davis_poset_coxeter, order_complex};
use crate::field::Field;
use crate::fingroup::{FiniteGroup, Subgroup};
use crate::simplicial::{CrossedAction, Perm, SimplicialSet};

/// Elements of S_3 in the order produced by `s3()`.
pub const S3_PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

pub const A3: [usize; 3] = [0, 3, 4];

/// The 3-dimensional permutation representation on generators 2 and 3.
pub fn permutation_module(g: Arc<FiniteGroup>, field: Field) -> GModule {
    let perm_matrix = |p: [usize; 3]| {
        let mut rows = vec![vec![0i64; 3]; 3];
        for (k, &v) in p.iter().enumerate() {
            rows[v][k] = 1;
        }
        crate::linalg::Matrix::from_i64_rows(field, &rows)
    };
    GModule::from_generators(g, field, &[2, 3], vec![perm_matrix(S3_PERMS[2]), perm_matrix(S3_PERMS[3])])
        .expect("permutation representation")
}

pub fn s3() -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::from_permutations(3, &[vec![1, 0, 2], vec![1, 2, 0]]).expect("S_3"))
}

pub fn sign_module(g: Arc<FiniteGroup>, field: Field) -> GModule {
    GModule::character(g, field, &[1, -1, -1, 1, 1, -1]).expect("sign character")
}

/// Centre 0 and leaves 1, 2, 3 for the points 0, 1, 2; edge k is [0, 1+k].
pub fn star_tree() -> SimplicialSet {
    SimplicialSet::from_ordered_simplices(vec![
        (0..4).map(|v| vec![v]).collect(),
        (1..4).map(|v| vec![0, v]).collect(),
    ])
    .expect("star tree")
}

/// S_3 permuting the leaves of the star tree.
pub fn s3_star_tree() -> (Arc<FiniteGroup>, SimplicialSet, CrossedAction) {
    let g = s3();
    let x = star_tree();
    let act = CrossedAction::from_vertex_action(g.clone(), &x, |a, v| if v == 0 { 0 } else { 1 + S3_PERMS[a][v - 1] })
        .expect("vertex action");
    (g, x, act)
}

/// A_3 at the centre and the point stabilizers at the leaves.
pub fn center_a3_leaf_stabilizers(g: &FiniteGroup) -> Vec<Subgroup> {
    let mut groups = vec![g.subgroup(&A3).expect("A_3")];
    for k in 0..3 {
        let fixing: Vec<usize> = g.elements().filter(|&a| S3_PERMS[a][k] == k).collect();
        groups.push(g.subgroup(&fixing).expect("stabilizer"));
    }
    groups
}

/// C_2 swapping the endpoints of an interval, with R on the edge given.
pub fn edge_flip(r: Perm) -> (SimplicialSet, CrossedAction) {
    let x = SimplicialSet::interval();
    let c2 = Arc::new(FiniteGroup::from_permutations(2, &[vec![1, 0]]).expect("C_2"));
    let table = vec![
        vec![
            vec![(0, Perm::identity(1)), (1, Perm::identity(1))],
            vec![(1, Perm::identity(1)), (0, Perm::identity(1))],
        ],
        vec![vec![(0, Perm::identity(2))], vec![(0, r)]],
    ];
    let act = CrossedAction::new(c2, &x, table).expect("edge flip table");
    (x, act)
}

/// The Davis complex of type A2 with its W-action.
pub fn s3_davis_complex() -> (Arc<FiniteGroup>, SimplicialSet, CrossedAction) {
    let p = davis_poset_coxeter(&CoxeterSystem::new(GeneralizedCartanMatrix::type_a(2)), None).expect("A2 poset");
    let c = order_complex(&p).expect("order complex");
    let g = p.group().expect("finite").clone();
    (g, c.set, c.action.expect("action"))
}
