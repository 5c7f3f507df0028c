//! Davis posets of cosets of spherical parabolics, their order complexes,
//! simplex stabilizers and the exactness check of the augmented chain complex.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cartan::spherical_subsets;
use crate::coxeter::{CoxeterError, CoxeterSystem, WeylElement};
use crate::field::Field;
use crate::fingroup::{BnPairData, FiniteGroup, GroupError, Subgroup};
use crate::simplicial::{CrossedAction, SimplicialError, SimplicialSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DavisError {
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
    #[error("an infinite Coxeter group needs a truncation radius")]
    NeedsRadius,
    #[error("the poset carries no group action")]
    NoAction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    CoxeterOnly,
    BnGroup,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DavisNode {
    pub subset: Vec<usize>,
    /// Representative as an element of the acting group, when there is one.
    pub rep: Option<usize>,
    /// Reduced word of the representative (Coxeter case).
    pub word: Option<Vec<usize>>,
    pub label: String,
}

#[derive(Debug, Clone)]
pub struct DavisPoset {
    nodes: Vec<DavisNode>,
    leq: Vec<Vec<bool>>,
    provenance: Provenance,
    truncation: Option<usize>,
    f_value: usize,
    group: Option<Arc<FiniteGroup>>,
    /// P_J (or W_J) for each node's subset, when a group is present.
    parabolics: Vec<Option<Subgroup>>,
    /// node_action[g][v] = g·v.
    node_action: Option<Vec<Vec<usize>>>,
}

impl DavisPoset {
    pub fn nodes(&self) -> &[DavisNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn truncation(&self) -> Option<usize> {
        self.truncation
    }

    /// Largest spherical subset size; the dimension of the order complex.
    pub fn f_value(&self) -> usize {
        self.f_value
    }

    pub fn group(&self) -> Option<&Arc<FiniteGroup>> {
        self.group.as_ref()
    }

    /// Nodes per subset, subsets ordered by (size, lex).
    pub fn counts_by_subset(&self) -> Vec<(Vec<usize>, usize)> {
        let mut out: Vec<(Vec<usize>, usize)> = Vec::new();
        for node in &self.nodes {
            match out.last_mut() {
                Some((j, c)) if *j == node.subset => *c += 1,
                _ => out.push((node.subset.clone(), 1)),
            }
        }
        out
    }

    pub fn act(&self, g: usize, v: usize) -> Option<usize> {
        self.node_action.as_ref().map(|a| a[g][v])
    }

    /// The parabolic attached to node v, when a group is present.
    pub fn parabolic_of(&self, v: usize) -> Option<&Subgroup> {
        self.parabolics[v].as_ref()
    }

    fn order_from(nodes: &[DavisNode], contains: impl Fn(usize, usize) -> bool) -> Vec<Vec<bool>> {
        let n = nodes.len();
        let mut leq = vec![vec![false; n]; n];
        for a in 0..n {
            for b in 0..n {
                let subset = nodes[a].subset.iter().all(|i| nodes[b].subset.contains(i));
                leq[a][b] = a == b || (subset && contains(a, b));
            }
        }
        leq
    }
}

fn subset_label(j: &[usize]) -> String {
    let inner: Vec<String> = j.iter().map(usize::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

/// Cosets wW_J for spherical J with minimal representative of length ≤ L.
/// `radius = None` requires W finite.
pub fn davis_poset_coxeter(sys: &CoxeterSystem, radius: Option<usize>) -> Result<DavisPoset, DavisError> {
    let finite = sys.is_finite();
    if radius.is_none() && !finite {
        return Err(DavisError::NeedsRadius);
    }
    let report = spherical_subsets(sys.cartan());
    let mut nodes = Vec::new();
    let mut reps: Vec<WeylElement> = Vec::new();
    let mut index: HashMap<(Vec<usize>, WeylElement), usize> = HashMap::new();
    for j in &report.subsets {
        for w in sys.min_coset_reps(j, radius)? {
            index.insert((j.clone(), w.clone()), nodes.len());
            nodes.push(DavisNode {
                subset: j.clone(),
                rep: None,
                word: Some(w.word().to_vec()),
                label: format!("{} W{}", w, subset_label(j)),
            });
            reps.push(w);
        }
    }
    let mut leq = vec![vec![false; nodes.len()]; nodes.len()];
    for a in 0..nodes.len() {
        for b in 0..nodes.len() {
            let sub = nodes[a].subset.iter().all(|i| nodes[b].subset.contains(i));
            leq[a][b] = a == b || (sub && sys.coset_min_rep(&reps[a], &nodes[b].subset)? == reps[b]);
        }
    }

    let mut group = None;
    let mut parabolics = vec![None; nodes.len()];
    let mut node_action = None;
    if radius.is_none() || finite {
        if let Ok((g, elements)) = FiniteGroup::from_coxeter(sys) {
            let position: HashMap<&WeylElement, usize> = elements.iter().enumerate().map(|(i, w)| (w, i)).collect();
            let mut by_subset: HashMap<Vec<usize>, Subgroup> = HashMap::new();
            for (v, node) in nodes.iter_mut().enumerate() {
                node.rep = Some(position[&reps[v]]);
                let p = by_subset
                    .entry(node.subset.clone())
                    .or_insert_with(|| {
                        let members: Vec<usize> = elements
                            .iter()
                            .enumerate()
                            .filter(|(_, w)| w.in_parabolic(&node.subset))
                            .map(|(i, _)| i)
                            .collect();
                        g.subgroup(&members).expect("parabolic subgroup")
                    })
                    .clone();
                parabolics[v] = Some(p);
            }
            // Within the truncation every coset is present, so the action is total.
            if radius.is_none_or(|l| elements.iter().all(|w| w.length() <= l)) {
                let mut table = Vec::with_capacity(elements.len());
                for w in &elements {
                    let mut row = Vec::with_capacity(nodes.len());
                    for (v, node) in nodes.iter().enumerate() {
                        let moved = sys.coset_min_rep(&sys.multiply(w, &reps[v])?, &node.subset)?;
                        row.push(index[&(node.subset.clone(), moved)]);
                    }
                    table.push(row);
                }
                node_action = Some(table);
            }
            group = Some(Arc::new(g));
        }
    }
    let truncated = radius.filter(|_| node_action.is_none() || !finite);
    Ok(DavisPoset {
        nodes,
        leq,
        provenance: Provenance::CoxeterOnly,
        truncation: truncated,
        f_value: report.f_value,
        group,
        parabolics,
        node_action,
    })
}

/// Cosets gP_J over all J ⊆ S; representatives are least element indices.
pub fn davis_building_group(bn: &BnPairData) -> DavisPoset {
    let group = Arc::new(bn.group.clone());
    let report = spherical_subsets(bn.weyl.cartan());
    let mut nodes = Vec::new();
    let mut parabolics = Vec::new();
    let mut cosets: Vec<Vec<usize>> = Vec::new();
    // coset_of[subset index][g] = node id.
    let mut coset_of: Vec<Vec<usize>> = Vec::new();
    for j in &report.subsets {
        let p = bn.parabolic(j);
        let mut lookup = vec![usize::MAX; group.order()];
        for coset in group.left_cosets(&p) {
            let id = nodes.len();
            for &x in &coset {
                lookup[x] = id;
            }
            nodes.push(DavisNode {
                subset: j.clone(),
                rep: Some(coset[0]),
                word: None,
                label: format!("{} P{}", group.label(coset[0]), subset_label(j)),
            });
            parabolics.push(Some(p.clone()));
            cosets.push(coset);
        }
        coset_of.push(lookup);
    }
    let subset_index: Vec<usize> = nodes
        .iter()
        .map(|n| report.subsets.iter().position(|j| *j == n.subset).unwrap())
        .collect();
    let leq = DavisPoset::order_from(&nodes, |a, b| coset_of[subset_index[b]][nodes[a].rep.unwrap()] == b);
    let node_action = (0..group.order())
        .map(|g| {
            (0..nodes.len())
                .map(|v| coset_of[subset_index[v]][group.mul(g, nodes[v].rep.unwrap())])
                .collect()
        })
        .collect();
    DavisPoset {
        nodes,
        leq,
        provenance: Provenance::BnGroup,
        truncation: None,
        f_value: report.f_value,
        group: Some(group),
        parabolics,
        node_action: Some(node_action),
    }
}

#[derive(Debug, Clone)]
pub struct DavisComplex {
    pub set: SimplicialSet,
    pub action: Option<CrossedAction>,
}

/// Chains v_0 < … < v_n as n-simplices in increasing order, with the action
/// induced from the nodes and R computed from vertex positions.
pub fn order_complex(p: &DavisPoset) -> Result<DavisComplex, DavisError> {
    let n = p.len();
    let mut layers: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..n).rev().map(|v| vec![v]).collect();
    while let Some(chain) = stack.pop() {
        let dim = chain.len() - 1;
        if layers.len() <= dim {
            layers.resize(dim + 1, Vec::new());
        }
        let last = *chain.last().unwrap();
        for w in (0..n).rev() {
            if w != last && p.leq(last, w) {
                let mut next = chain.clone();
                next.push(w);
                stack.push(next);
            }
        }
        layers[dim].push(chain);
    }
    for layer in &mut layers {
        layer.sort();
    }
    let set = SimplicialSet::from_ordered_simplices(layers)?;
    let action = match (&p.group, &p.node_action) {
        (Some(g), Some(table)) => Some(CrossedAction::from_vertex_action(g.clone(), &set, |a, v| table[a][v])?),
        _ => None,
    };
    Ok(DavisComplex { set, action })
}

/// Stabilizer of a chain: elements fixing every node in it.
pub fn stabilizer(p: &DavisPoset, chain: &[usize]) -> Result<Vec<usize>, DavisError> {
    let g = p.group.as_ref().ok_or(DavisError::NoAction)?;
    if p.node_action.is_none() {
        return Err(DavisError::NoAction);
    }
    Ok((0..g.order())
        .filter(|&a| chain.iter().all(|&v| p.act(a, v) == Some(v)))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerMismatch {
    pub chain: Vec<usize>,
    pub brute_force: Vec<usize>,
    pub predicted: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerReport {
    pub chains_checked: usize,
    pub matches: usize,
    pub mismatches: Vec<StabilizerMismatch>,
}

impl StabilizerReport {
    pub fn passes(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares the brute-force stabilizer of every chain with g_0 P_{J_0} g_0⁻¹
/// for its smallest coset g_0 P_{J_0}.
pub fn check_stabilizers(p: &DavisPoset, complex: &DavisComplex) -> Result<StabilizerReport, DavisError> {
    let g = p.group.as_ref().ok_or(DavisError::NoAction)?;
    let mut report = StabilizerReport {
        chains_checked: 0,
        matches: 0,
        mismatches: Vec::new(),
    };
    for n in 0..=complex.set.top_dim() {
        for x in 0..complex.set.count(n) {
            let chain = complex.set.vertices_of(n, x).expect("order complex keeps vertices").to_vec();
            let brute = stabilizer(p, &chain)?;
            let first = chain[0];
            let parabolic = p.parabolic_of(first).ok_or(DavisError::NoAction)?;
            let rep = p.nodes[first].rep.ok_or(DavisError::NoAction)?;
            let predicted = g.conjugate(parabolic, rep).elements().to_vec();
            report.chains_checked += 1;
            if brute == predicted {
                report.matches += 1;
            } else {
                report.mismatches.push(StabilizerMismatch {
                    chain,
                    brute_force: brute,
                    predicted,
                });
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionReport {
    pub field: Field,
    /// dim X_k for k = 0..=top.
    pub dims: Vec<usize>,
    /// rank d_k for k = 1..=top.
    pub ranks: Vec<usize>,
    pub augmentation_rank: usize,
    pub homology: Vec<usize>,
    /// Exactness of 0 → X_top → … → X_0 → F → 0 at each spot, X_0 first and F last.
    pub exact_at: Vec<bool>,
    pub exact: bool,
    /// Every simplex stabilizer has order invertible in F; None without an action.
    pub stabilizers_ordinary: Option<bool>,
    pub truncated: bool,
    pub warnings: Vec<String>,
}

/// Rank-counting exactness of the augmented chain complex.
pub fn resolution_check(
    x: &SimplicialSet,
    act: Option<&CrossedAction>,
    field: Field,
    truncated: bool,
) -> ResolutionReport {
    let complex = x.chain_complex(field);
    let dims = complex.dims().to_vec();
    let all_ranks = complex.ranks();
    let ranks = all_ranks[1..].to_vec();
    let augmentation_rank = usize::from(dims[0] > 0);
    let mut exact_at = Vec::with_capacity(dims.len() + 1);
    for k in 0..dims.len() {
        let incoming = all_ranks.get(k + 1).copied().unwrap_or(0);
        let outgoing = if k == 0 { augmentation_rank } else { all_ranks[k] };
        exact_at.push(dims[k] == incoming + outgoing);
    }
    exact_at.push(augmentation_rank == 1);
    let exact = exact_at.iter().all(|&e| e);
    let stabilizers_ordinary = act.map(|a| {
        (0..=x.top_dim()).all(|n| {
            (0..x.count(n)).all(|s| field.is_ordinary_for(a.stabilizer(n, s).len() as u64))
        })
    });
    let mut warnings = Vec::new();
    if truncated {
        warnings.push("truncated complex: homology near the truncation boundary is not that of the full complex; no contractibility claim is made".to_string());
    }
    if stabilizers_ordinary == Some(false) {
        warnings.push(format!("some stabilizer order is divisible by the characteristic {}", field.characteristic()));
    }
    ResolutionReport {
        field,
        dims,
        ranks,
        augmentation_rank,
        homology: complex.homology(),
        exact_at,
        exact: exact && !truncated,
        stabilizers_ordinary,
        truncated,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::GeneralizedCartanMatrix;
    use crate::fingroup::gl_n_fq;
    use crate::simplicial::check_crossed;

    fn sys(rows: Vec<Vec<i64>>) -> CoxeterSystem {
        CoxeterSystem::new(GeneralizedCartanMatrix::new(rows).unwrap())
    }

    #[test]
    fn coxeter_node_counts() {
        let a2 = davis_poset_coxeter(&sys(vec![vec![2, -1], vec![-1, 2]]), None).unwrap();
        let counts: Vec<usize> = a2.counts_by_subset().into_iter().map(|(_, c)| c).collect();
        assert_eq!(counts, vec![6, 3, 3, 1]);
        let affine = sys(vec![vec![2, -2], vec![-2, 2]]);
        assert_eq!(davis_poset_coxeter(&affine, None).unwrap_err(), DavisError::NeedsRadius);
        let t = davis_poset_coxeter(&affine, Some(2)).unwrap();
        assert_eq!(t.len(), 11);
        assert_eq!(t.truncation(), Some(2));
        let a1 = davis_poset_coxeter(&sys(vec![vec![2]]), None).unwrap();
        assert_eq!(a1.len(), 3);
    }

    #[test]
    fn s3_davis_complex() {
        let p = davis_poset_coxeter(&sys(vec![vec![2, -1], vec![-1, 2]]), None).unwrap();
        let c = order_complex(&p).unwrap();
        assert_eq!(c.set.counts(), &[13, 24, 12]);
        let act = c.action.as_ref().unwrap();
        assert!(check_crossed(&c.set, act).passes());
        for n in 0..=2 {
            for x in 0..c.set.count(n) {
                for g in 0..6 {
                    assert!(act.on_nondegenerate(n, g, x).1.is_identity());
                }
            }
        }
        for field in [Field::Rational, Field::Prime(5)] {
            let r = resolution_check(&c.set, Some(act), field, false);
            assert_eq!(r.ranks, vec![12, 12]);
            assert_eq!(r.augmentation_rank, 1);
            assert_eq!(r.homology, vec![1, 0, 0]);
            assert!(r.exact);
        }
        assert!(check_stabilizers(&p, &c).unwrap().passes());
    }

    #[test]
    fn group_buildings() {
        let b = gl_n_fq(2, 2).unwrap();
        let p = davis_building_group(&b);
        assert_eq!(p.len(), 4);
        let c = order_complex(&p).unwrap();
        assert_eq!(c.set.counts(), &[4, 3]);
        assert_eq!(c.set.chain_complex(Field::Rational).homology(), vec![1, 0]);
        let edge = c.set.vertices_of(1, 0).unwrap().to_vec();
        assert_eq!(stabilizer(&p, &edge).unwrap().len(), 2);
        let top = p.len() - 1;
        assert_eq!(stabilizer(&p, &[top]).unwrap().len(), 6);
        assert!(check_stabilizers(&p, &c).unwrap().passes());

        assert_eq!(davis_building_group(&gl_n_fq(2, 3).unwrap()).len(), 5);
        let p3 = davis_building_group(&gl_n_fq(3, 2).unwrap());
        assert_eq!(p3.len(), 36);
        let c3 = order_complex(&p3).unwrap();
        assert_eq!(c3.set.counts(), &[36, 77, 42]);
        let base = p3.nodes().iter().position(|n| n.subset.is_empty() && n.rep == Some(b_min(&p3))).unwrap();
        let above = (0..p3.len()).find(|&v| p3.nodes()[v].subset == vec![0] && p3.leq(base, v)).unwrap();
        assert_eq!(stabilizer(&p3, &[base, above]).unwrap().len(), 8);
    }

    fn b_min(p: &DavisPoset) -> usize {
        p.nodes()
            .iter()
            .filter(|n| n.subset.is_empty())
            .find(|n| p.group().unwrap().label(n.rep.unwrap()) == "[[1,0,0],[0,1,0],[0,0,1]]")
            .and_then(|n| n.rep)
            .unwrap()
    }

    #[test]
    fn resolution_failures_and_trivial_cases() {
        let point = SimplicialSet::point();
        assert!(resolution_check(&point, None, Field::Rational, false).exact);
        let circle = SimplicialSet::circle();
        let r = resolution_check(&circle, None, Field::Rational, false);
        assert!(!r.exact);
        assert_eq!(r.exact_at, vec![true, false, true]);
    }

    #[test]
    fn dimension_matches_f() {
        for (rows, radius, f) in [
            (vec![vec![2, -1], vec![-1, 2]], None, 2),
            (vec![vec![2, -2], vec![-2, 2]], Some(3), 1),
            (vec![vec![2, -2, -2], vec![-2, 2, -2], vec![-2, -2, 2]], Some(2), 1),
        ] {
            let p = davis_poset_coxeter(&sys(rows), radius).unwrap();
            assert_eq!(p.f_value(), f);
            assert_eq!(order_complex(&p).unwrap().set.top_dim(), f);
        }
    }

    #[test]
    fn truncated_reports_never_claim_exactness() {
        let p = davis_poset_coxeter(&sys(vec![vec![2, -2], vec![-2, 2]]), Some(2)).unwrap();
        let c = order_complex(&p).unwrap();
        assert!(c.action.is_none());
        let r = resolution_check(&c.set, None, Field::Rational, true);
        assert!(!r.exact);
        assert!(!r.warnings.is_empty());
    }
}
