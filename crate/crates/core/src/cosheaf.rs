//! Representations, systems of subgroups, equivariant cosheaves and their
//! chain complexes, idempotent identities and the tree resolution check.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, Scalar};
use crate::fingroup::{FiniteGroup, GroupError, Subgroup};
use crate::linalg::Matrix;
use crate::measure::{GroupFunction, MeasureContext, MeasureError};
use crate::simplicial::{coface, ChainComplex, CrossedAction, Simplex, SimplicialError, SimplicialSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CosheafError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("module data is not a representation: {0}")]
    NotAHomomorphism(String),
    #[error("module data has the wrong shape: {0}")]
    ModuleShape(String),
    #[error("system is not equivariant: element {g} on simplex {simplex} of dimension {dim}")]
    NotEquivariant { g: usize, dim: usize, simplex: usize },
    #[error("subgroup products do not form a subgroup on simplex {simplex} of dimension {dim}")]
    ProductNotSubgroup { dim: usize, simplex: usize },
    #[error("variance mismatch: {0}")]
    VarianceMismatch(String),
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("cosheaf axiom violated: {0}")]
    AxiomViolation(String),
    #[error("the system of subgroups is not exquisite")]
    NotExquisite,
    #[error("system data has the wrong shape: {0}")]
    SystemShape(String),
}

/// A finite-dimensional representation ρ: G → GL(V), stored for every element.
#[derive(Debug, Clone)]
pub struct GModule {
    group: Arc<FiniteGroup>,
    field: Field,
    dim: usize,
    matrices: Vec<Matrix>,
}

impl GModule {
    /// Extends ρ from generators; every relation of the multiplication table
    /// is checked through ρ(g·s) = ρ(g)ρ(s) on all edges of the Cayley graph.
    pub fn from_generators(
        group: Arc<FiniteGroup>,
        field: Field,
        gens: &[usize],
        mats: Vec<Matrix>,
    ) -> Result<Self, CosheafError> {
        if gens.len() != mats.len() {
            return Err(CosheafError::ModuleShape("one matrix per generator".into()));
        }
        let dim = mats.first().map_or(0, Matrix::rows);
        for (&g, m) in gens.iter().zip(&mats) {
            if g >= group.order() {
                return Err(GroupError::ElementOutOfRange(g).into());
            }
            if m.rows() != dim || m.cols() != dim || m.field() != field {
                return Err(CosheafError::ModuleShape(format!("matrix for generator {g}")));
            }
        }
        let mut table: Vec<Option<Matrix>> = vec![None; group.order()];
        table[group.identity()] = Some(Matrix::identity(field, dim));
        let mut queue = VecDeque::from([group.identity()]);
        while let Some(g) = queue.pop_front() {
            let rho_g = table[g].clone().unwrap();
            for (&s, m) in gens.iter().zip(&mats) {
                let h = group.mul(g, s);
                let value = rho_g.mul(m);
                match &table[h] {
                    Some(existing) if *existing != value => {
                        return Err(CosheafError::NotAHomomorphism(format!(
                            "relation through element {h} fails"
                        )))
                    }
                    Some(_) => {}
                    None => {
                        table[h] = Some(value);
                        queue.push_back(h);
                    }
                }
            }
        }
        if table.iter().any(Option::is_none) {
            return Err(CosheafError::NotAHomomorphism("generators do not generate the group".into()));
        }
        Ok(GModule {
            group,
            field,
            dim,
            matrices: table.into_iter().map(Option::unwrap).collect(),
        })
    }

    pub fn trivial(group: Arc<FiniteGroup>, field: Field) -> Self {
        let matrices = vec![Matrix::identity(field, 1); group.order()];
        GModule {
            group,
            field,
            dim: 1,
            matrices,
        }
    }

    /// A one-dimensional representation given by its values on every element.
    pub fn character(group: Arc<FiniteGroup>, field: Field, values: &[i64]) -> Result<Self, CosheafError> {
        if values.len() != group.order() {
            return Err(CosheafError::ModuleShape("one value per element".into()));
        }
        for a in group.elements() {
            for b in group.elements() {
                if values[group.mul(a, b)] != values[a] * values[b] {
                    return Err(CosheafError::NotAHomomorphism(format!("χ({a}·{b})")));
                }
            }
        }
        let matrices = values.iter().map(|&v| Matrix::from_i64_rows(field, &[vec![v]])).collect();
        Ok(GModule {
            group,
            field,
            dim: 1,
            matrices,
        })
    }

    /// ρ(g)e_h = e_{gh}.
    pub fn regular(group: Arc<FiniteGroup>, field: Field) -> Self {
        let n = group.order();
        let matrices = (0..n)
            .map(|g| {
                let mut m = Matrix::zeros(field, n, n);
                for h in 0..n {
                    m[(group.mul(g, h), h)] = field.one();
                }
                m
            })
            .collect();
        GModule {
            group,
            field,
            dim: n,
            matrices,
        }
    }

    pub fn direct_sum(&self, other: &GModule) -> GModule {
        let dim = self.dim + other.dim;
        let matrices = self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| {
                let mut m = Matrix::zeros(self.field, dim, dim);
                m.set_block(0, 0, a);
                m.set_block(self.dim, self.dim, b);
                m
            })
            .collect();
        GModule {
            group: self.group.clone(),
            field: self.field,
            dim,
            matrices,
        }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: usize) -> &Matrix {
        &self.matrices[g]
    }

    /// Columns spanning V^H.
    pub fn invariants(&self, h: &[usize]) -> Matrix {
        let id = Matrix::identity(self.field, self.dim);
        let blocks: Vec<Matrix> = h.iter().map(|&x| self.matrices[x].sub(&id)).collect();
        if blocks.is_empty() {
            return id;
        }
        Matrix::vstack(self.field, self.dim, &blocks).kernel()
    }

    /// Rows of a surjection V → V_H whose kernel is span{(ρ(h) − 1)v}.
    pub fn coinvariant_map(&self, h: &[usize]) -> Matrix {
        let id = Matrix::identity(self.field, self.dim);
        let blocks: Vec<Matrix> = h.iter().map(|&x| self.matrices[x].sub(&id)).collect();
        if blocks.is_empty() {
            return id;
        }
        let span = Matrix::hstack(self.field, self.dim, &blocks);
        span.transpose().kernel().transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemFlags {
    pub contravariant: bool,
    pub covariant: bool,
    pub exquisite: bool,
    /// 𝒢_x ≤ G_x for every simplex.
    pub within_stabilizers: bool,
}

/// 𝒢_x on nondegenerate simplices; degenerate simplices use their core.
#[derive(Debug, Clone)]
pub struct SubgroupSystem {
    groups: Vec<Vec<Subgroup>>,
    flags: SystemFlags,
}

impl SubgroupSystem {
    /// Requires g𝒢_x g⁻¹ = 𝒢_{gx}; variance and stabilizer containment are
    /// recorded as flags.
    pub fn new(x: &SimplicialSet, act: &CrossedAction, groups: Vec<Vec<Subgroup>>) -> Result<Self, CosheafError> {
        if groups.len() != x.top_dim() + 1 || (0..groups.len()).any(|n| groups[n].len() != x.count(n)) {
            return Err(CosheafError::SystemShape("one subgroup per nondegenerate simplex".into()));
        }
        let g = act.group();
        let mut within = true;
        for n in 0..groups.len() {
            for s in 0..x.count(n) {
                for a in g.elements() {
                    let (t, _) = act.on_nondegenerate(n, a, s);
                    if g.conjugate(&groups[n][s], a) != groups[n][t] {
                        return Err(CosheafError::NotEquivariant { g: a, dim: n, simplex: s });
                    }
                    if t != s && groups[n][s].contains(a) {
                        within = false;
                    }
                }
            }
        }
        let mut contravariant = true;
        let mut covariant = true;
        for n in 1..groups.len() {
            for s in 0..x.count(n) {
                for i in 0..=n {
                    let f = x.stored_face(n, s, i);
                    let face = &groups[f.core_dim][f.core];
                    contravariant &= face.is_subset_of(&groups[n][s]);
                    covariant &= groups[n][s].is_subset_of(face);
                }
            }
        }
        Ok(SubgroupSystem {
            groups,
            flags: SystemFlags {
                contravariant,
                covariant,
                exquisite: false,
                within_stabilizers: within,
            },
        })
    }

    pub fn constant(x: &SimplicialSet, act: &CrossedAction, h: &Subgroup) -> Result<Self, CosheafError> {
        let groups = (0..=x.top_dim()).map(|n| vec![h.clone(); x.count(n)]).collect();
        Self::new(x, act, groups)
    }

    pub fn flags(&self) -> SystemFlags {
        self.flags
    }

    pub fn get(&self, n: usize, s: usize) -> &Subgroup {
        &self.groups[n][s]
    }

    pub fn of(&self, s: &Simplex) -> &Subgroup {
        &self.groups[s.core_dim][s.core]
    }

    pub fn max_order(&self) -> usize {
        self.groups.iter().flatten().map(Subgroup::order).max().unwrap_or(1)
    }

    pub fn all_ordinary(&self, field: Field) -> bool {
        self.groups.iter().flatten().all(|h| field.is_ordinary_for(h.order() as u64))
    }
}

/// The vertex X(f_k^n)(s) as a vertex id.
fn vertex(x: &SimplicialSet, s: &Simplex, k: usize) -> usize {
    x.apply(&[k], s).core
}

/// 𝒢_x = 𝒢_{v_0}⋯𝒢_{v_n} from vertex subgroups that are equivariant and
/// permute along edges.
pub fn build_exquisite(
    x: &SimplicialSet,
    act: &CrossedAction,
    vertex_groups: Vec<Subgroup>,
) -> Result<SubgroupSystem, CosheafError> {
    let g = act.group();
    if vertex_groups.len() != x.count(0) {
        return Err(CosheafError::SystemShape("one subgroup per vertex".into()));
    }
    for v in 0..x.count(0) {
        for a in g.elements() {
            let (t, _) = act.on_nondegenerate(0, a, v);
            if g.conjugate(&vertex_groups[v], a) != vertex_groups[t] {
                return Err(CosheafError::NotEquivariant { g: a, dim: 0, simplex: v });
            }
        }
    }
    for e in 0..x.count(1) {
        let s = Simplex::nondegenerate(1, e);
        let (a, b) = (&vertex_groups[vertex(x, &s, 0)], &vertex_groups[vertex(x, &s, 1)]);
        if g.product_set(a.elements(), b.elements()) != g.product_set(b.elements(), a.elements()) {
            return Err(CosheafError::ProductNotSubgroup { dim: 1, simplex: e });
        }
    }
    let mut groups = Vec::with_capacity(x.top_dim() + 1);
    for n in 0..=x.top_dim() {
        let mut layer = Vec::with_capacity(x.count(n));
        for id in 0..x.count(n) {
            let s = Simplex::nondegenerate(n, id);
            let mut set = vec![g.identity()];
            for k in 0..=n {
                set = g.product_set(&set, vertex_groups[vertex(x, &s, k)].elements());
            }
            let sub = g
                .subgroup(&set)
                .map_err(|_| CosheafError::ProductNotSubgroup { dim: n, simplex: id })?;
            layer.push(sub);
        }
        groups.push(layer);
    }
    let mut sys = SubgroupSystem::new(x, act, groups)?;
    sys.flags.exquisite = true;
    Ok(sys)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeodesicViolation {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub product_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeodesicReport {
    pub pairs_checked: usize,
    pub violations: Vec<GeodesicViolation>,
    pub restriction: String,
}

impl GeodesicReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Adjacency lists of a tree, or NotATree.
pub fn tree_adjacency(x: &SimplicialSet) -> Result<Vec<Vec<usize>>, CosheafError> {
    if x.top_dim() > 1 {
        return Err(CosheafError::NotATree(format!("dimension {}", x.top_dim())));
    }
    let n = x.count(0);
    let mut adj = vec![Vec::new(); n];
    for e in 0..x.count(1) {
        let s = Simplex::nondegenerate(1, e);
        let (a, b) = (vertex(x, &s, 0), vertex(x, &s, 1));
        if a == b {
            return Err(CosheafError::NotATree(format!("edge {e} is a loop")));
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    if n == 0 || x.count(1) + 1 != n {
        return Err(CosheafError::NotATree(format!("{} vertices and {} edges", n, x.count(1))));
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !std::mem::replace(&mut seen[w], true) {
                queue.push_back(w);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(CosheafError::NotATree("disconnected".into()));
    }
    Ok(adj)
}

/// next[x][y] = the neighbour of x on the path to y.
fn first_steps(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut next = vec![vec![usize::MAX; n]; n];
    for y in 0..n {
        let mut queue = VecDeque::from([y]);
        next[y][y] = y;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if next[w][y] == usize::MAX {
                    next[w][y] = v;
                    queue.push_back(w);
                }
            }
        }
    }
    next
}

/// For every ordered pair of distinct vertices x, y and every vertex z of the
/// first edge on the path from x to y, checks 𝒢_z ⊆ 𝒢_x𝒢_y.
pub fn check_geodesic(x: &SimplicialSet, act: &CrossedAction, sys: &SubgroupSystem) -> Result<GeodesicReport, CosheafError> {
    let adj = tree_adjacency(x)?;
    let next = first_steps(&adj);
    let g = act.group();
    let n = adj.len();
    let mut report = GeodesicReport {
        pairs_checked: 0,
        violations: Vec::new(),
        restriction: "geodesics checked between vertices only".into(),
    };
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            report.pairs_checked += 1;
            let product = g.product_set(sys.get(0, a).elements(), sys.get(0, b).elements());
            for z in [a, next[a][b]] {
                if !sys.get(0, z).elements().iter().all(|e| product.binary_search(e).is_ok()) {
                    report.violations.push(GeodesicViolation {
                        x: a,
                        y: b,
                        z,
                        product_size: product.len(),
                    });
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CosheafKind {
    Trivial,
    Invariants,
    Coinvariants,
}

#[derive(Debug, Clone)]
pub struct EquivariantCosheaf {
    kind: CosheafKind,
    field: Field,
    stalk_dims: Vec<Vec<usize>>,
    /// corestrictions[n][x][i]: 𝒞_x → 𝒞_{∂^i x}.
    corestrictions: Vec<Vec<Vec<Matrix>>>,
    /// group_maps[n][g][x]: 𝒞_x → 𝒞_{gx}.
    group_maps: Vec<Vec<Vec<Matrix>>>,
    /// Stalks as subspaces of V, for the augmentation.
    embeddings: Option<Vec<Vec<Matrix>>>,
}

/// Solves a·m = b exactly, or None.
fn solve_left(a: &Matrix, b: &Matrix) -> Option<Matrix> {
    let m = a.left_inverse()?.mul(b);
    (a.mul(&m) == *b).then_some(m)
}

/// Solves m·a = b exactly, or None.
fn solve_right(a: &Matrix, b: &Matrix) -> Option<Matrix> {
    solve_left(&a.transpose(), &b.transpose()).map(|m| m.transpose())
}

impl EquivariantCosheaf {
    /// Stalk V everywhere, identity corestrictions, g_x = ρ(g).
    pub fn trivial(x: &SimplicialSet, act: &CrossedAction, v: &GModule) -> Self {
        let top = x.top_dim();
        let id = Matrix::identity(v.field, v.dim);
        EquivariantCosheaf {
            kind: CosheafKind::Trivial,
            field: v.field,
            stalk_dims: (0..=top).map(|n| vec![v.dim; x.count(n)]).collect(),
            corestrictions: (0..=top)
                .map(|n| (0..x.count(n)).map(|_| if n == 0 { Vec::new() } else { vec![id.clone(); n + 1] }).collect())
                .collect(),
            group_maps: (0..=top)
                .map(|n| {
                    (0..act.group().order())
                        .map(|g| vec![v.matrices[g].clone(); x.count(n)])
                        .collect()
                })
                .collect(),
            embeddings: Some((0..=top).map(|n| vec![id.clone(); x.count(n)]).collect()),
        }
    }

    /// V^{𝒢_x} for contravariant systems.
    pub fn invariants(
        x: &SimplicialSet,
        act: &CrossedAction,
        v: &GModule,
        sys: &SubgroupSystem,
    ) -> Result<Self, CosheafError> {
        if !sys.flags.contravariant {
            return Err(CosheafError::VarianceMismatch("invariants need a contravariant system".into()));
        }
        let top = x.top_dim();
        let bases: Vec<Vec<Matrix>> = (0..=top)
            .map(|n| (0..x.count(n)).map(|s| v.invariants(sys.get(n, s).elements())).collect())
            .collect();
        let mut corestrictions = Vec::with_capacity(top + 1);
        for n in 0..=top {
            let mut layer = Vec::with_capacity(x.count(n));
            for s in 0..x.count(n) {
                let mut maps = Vec::new();
                if n > 0 {
                    for i in 0..=n {
                        let f = x.stored_face(n, s, i);
                        let m = solve_left(&bases[f.core_dim][f.core], &bases[n][s]).ok_or_else(|| {
                            CosheafError::AxiomViolation(format!("V^𝒢 of simplex {s} (dim {n}) not inside its face {i}"))
                        })?;
                        maps.push(m);
                    }
                }
                layer.push(maps);
            }
            corestrictions.push(layer);
        }
        let mut group_maps = Vec::with_capacity(top + 1);
        for n in 0..=top {
            let mut per_g = Vec::with_capacity(act.group().order());
            for g in act.group().elements() {
                let mut row = Vec::with_capacity(x.count(n));
                for s in 0..x.count(n) {
                    let (t, _) = act.on_nondegenerate(n, g, s);
                    let image = v.matrices[g].mul(&bases[n][s]);
                    let m = solve_left(&bases[n][t], &image).ok_or(CosheafError::NotEquivariant { g, dim: n, simplex: s })?;
                    row.push(m);
                }
                per_g.push(row);
            }
            group_maps.push(per_g);
        }
        Ok(EquivariantCosheaf {
            kind: CosheafKind::Invariants,
            field: v.field,
            stalk_dims: bases.iter().map(|l| l.iter().map(Matrix::cols).collect()).collect(),
            corestrictions,
            group_maps,
            embeddings: Some(bases),
        })
    }

    /// V_{𝒢_x} for covariant systems, with the natural surjections.
    pub fn coinvariants(
        x: &SimplicialSet,
        act: &CrossedAction,
        v: &GModule,
        sys: &SubgroupSystem,
    ) -> Result<Self, CosheafError> {
        if !sys.flags.covariant {
            return Err(CosheafError::VarianceMismatch("coinvariants need a covariant system".into()));
        }
        let top = x.top_dim();
        let quotients: Vec<Vec<Matrix>> = (0..=top)
            .map(|n| (0..x.count(n)).map(|s| v.coinvariant_map(sys.get(n, s).elements())).collect())
            .collect();
        let mut corestrictions = Vec::with_capacity(top + 1);
        for n in 0..=top {
            let mut layer = Vec::with_capacity(x.count(n));
            for s in 0..x.count(n) {
                let mut maps = Vec::new();
                if n > 0 {
                    for i in 0..=n {
                        let f = x.stored_face(n, s, i);
                        let m = solve_right(&quotients[n][s], &quotients[f.core_dim][f.core]).ok_or_else(|| {
                            CosheafError::AxiomViolation(format!("no induced map on coinvariants of simplex {s} (dim {n}) face {i}"))
                        })?;
                        maps.push(m);
                    }
                }
                layer.push(maps);
            }
            corestrictions.push(layer);
        }
        let mut group_maps = Vec::with_capacity(top + 1);
        for n in 0..=top {
            let mut per_g = Vec::with_capacity(act.group().order());
            for g in act.group().elements() {
                let mut row = Vec::with_capacity(x.count(n));
                for s in 0..x.count(n) {
                    let (t, _) = act.on_nondegenerate(n, g, s);
                    let target = quotients[n][t].mul(&v.matrices[g]);
                    let m = solve_right(&quotients[n][s], &target).ok_or(CosheafError::NotEquivariant { g, dim: n, simplex: s })?;
                    row.push(m);
                }
                per_g.push(row);
            }
            group_maps.push(per_g);
        }
        Ok(EquivariantCosheaf {
            kind: CosheafKind::Coinvariants,
            field: v.field,
            stalk_dims: quotients.iter().map(|l| l.iter().map(Matrix::rows).collect()).collect(),
            corestrictions,
            group_maps,
            embeddings: None,
        })
    }

    pub fn kind(&self) -> CosheafKind {
        self.kind
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn stalk_dim(&self, n: usize, s: usize) -> usize {
        self.stalk_dims[n][s]
    }

    pub fn stalk_dims(&self) -> &[Vec<usize>] {
        &self.stalk_dims
    }

    pub fn corestriction(&self, n: usize, s: usize, i: usize) -> &Matrix {
        &self.corestrictions[n][s][i]
    }

    pub fn group_map(&self, n: usize, g: usize, s: usize) -> &Matrix {
        &self.group_maps[n][g][s]
    }

    /// 𝒞(θ, y) for a nondecreasing θ, with the simplex X(θ)(y).
    pub fn corestriction_along(&self, x: &SimplicialSet, theta: &[usize], y: &Simplex) -> (Simplex, Matrix) {
        let phi: Vec<usize> = theta.iter().map(|&t| y.surj[t]).collect();
        let mut image = phi.clone();
        image.dedup();
        let pi: Vec<usize> = phi.iter().map(|v| image.binary_search(v).unwrap()).collect();
        let (face, m) = self.core_corestriction(x, y.core_dim, y.core, &image);
        (
            Simplex {
                core_dim: face.core_dim,
                core: face.core,
                surj: pi.iter().map(|&p| face.surj[p]).collect(),
            },
            m,
        )
    }

    fn core_corestriction(&self, x: &SimplicialSet, m: usize, z: usize, iota: &[usize]) -> (Simplex, Matrix) {
        if iota.len() == m + 1 {
            return (
                Simplex::nondegenerate(m, z),
                Matrix::identity(self.field, self.stalk_dims[m][z]),
            );
        }
        let j = (0..=m).find(|v| iota.binary_search(v).is_err()).unwrap();
        let rest: Vec<usize> = iota.iter().map(|&v| if v > j { v - 1 } else { v }).collect();
        let (face, m2) = self.corestriction_along(x, &rest, x.stored_face(m, z, j));
        (face, m2.mul(&self.corestrictions[m][z][j]))
    }

    /// Axioms (i) and (iii) on all nondegenerate simplices and faces, plus
    /// functoriality of corestrictions along composites of faces.
    pub fn check_axioms(&self, x: &SimplicialSet, act: &CrossedAction) -> CosheafAxiomReport {
        let g = act.group();
        let mut failures = Vec::new();
        let mut axiom_i = true;
        for n in 0..=x.top_dim() {
            for s in 0..x.count(n) {
                if self.group_maps[n][g.identity()][s] != Matrix::identity(self.field, self.stalk_dims[n][s]) {
                    axiom_i = false;
                    failures.push(format!("(i): identity acts nontrivially on simplex {s} (dim {n})"));
                }
                for a in g.elements() {
                    let (hs, _) = act.on_nondegenerate(n, a, s);
                    for b in g.elements() {
                        let lhs = self.group_maps[n][b][hs].mul(&self.group_maps[n][a][s]);
                        if lhs != self.group_maps[n][g.mul(b, a)][s] {
                            axiom_i = false;
                            failures.push(format!("(i): g={b}, h={a}, simplex {s} (dim {n})"));
                        }
                    }
                }
            }
        }
        let mut axiom_iii = true;
        for n in 1..=x.top_dim() {
            for s in 0..x.count(n) {
                for a in g.elements() {
                    let (t, r) = act.on_nondegenerate(n, a, s);
                    for i in 0..=n {
                        let f = x.stored_face(n, s, i);
                        let lhs = self.group_maps[f.core_dim][a][f.core].mul(&self.corestrictions[n][s][i]);
                        let rhs = self.corestrictions[n][t][r.apply(i)].mul(&self.group_maps[n][a][s]);
                        if lhs != rhs {
                            axiom_iii = false;
                            failures.push(format!("(iii): g={a}, simplex {s} (dim {n}), face {i}"));
                        }
                    }
                }
            }
        }
        let mut functorial = true;
        for n in 2..=x.top_dim() {
            for s in 0..x.count(n) {
                let y = Simplex::nondegenerate(n, s);
                for j in 0..=n {
                    for i in 0..j {
                        let (yj, mj) = self.corestriction_along(x, &coface(j, n), &y);
                        let (a, ma) = self.corestriction_along(x, &coface(i, n - 1), &yj);
                        let (yi, mi) = self.corestriction_along(x, &coface(i, n), &y);
                        let (b, mb) = self.corestriction_along(x, &coface(j - 1, n - 1), &yi);
                        if a != b || ma.mul(&mj) != mb.mul(&mi) {
                            functorial = false;
                            failures.push(format!("functoriality: simplex {s} (dim {n}), faces {i} < {j}"));
                        }
                    }
                }
            }
        }
        CosheafAxiomReport {
            axiom_i,
            // Finite stabilizers act through finite quotients.
            axiom_ii: true,
            axiom_iii,
            functorial,
            failures,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosheafAxiomReport {
    pub axiom_i: bool,
    pub axiom_ii: bool,
    pub axiom_iii: bool,
    pub functorial: bool,
    pub failures: Vec<String>,
}

impl CosheafAxiomReport {
    pub fn passes(&self) -> bool {
        self.axiom_i && self.axiom_ii && self.axiom_iii && self.functorial
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitTerm {
    pub representative: usize,
    pub orbit_size: usize,
    pub stalk_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionFormula {
    pub degree: usize,
    pub terms: Vec<OrbitTerm>,
    pub predicted: usize,
    pub actual: usize,
}

impl DimensionFormula {
    pub fn holds(&self) -> bool {
        self.predicted == self.actual
    }
}

#[derive(Debug, Clone)]
pub struct CosheafChains {
    pub complex: ChainComplex,
    /// offsets[n][x]: first coordinate of simplex x in C_n.
    pub offsets: Vec<Vec<usize>>,
    pub generators: Vec<usize>,
    /// generator_action[k][n]: action of generators[k] on C_n.
    pub generator_action: Vec<Vec<Matrix>>,
    pub dimension_formula: Vec<DimensionFormula>,
    /// d_n commutes with the action of every generator.
    pub equivariant: bool,
}

impl CosheafChains {
    pub fn dimension_formula_holds(&self) -> bool {
        self.dimension_formula.iter().all(DimensionFormula::holds)
    }
}

/// A greedy generating set: each element not yet generated is added.
pub fn generating_set(g: &FiniteGroup) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut current = g.trivial();
    for a in g.elements() {
        if !current.contains(a) {
            gens.push(a);
            current = g.generated(&gens);
        }
    }
    gens
}

/// The action of g on C_n: block (gx, x) = (−1)^{sign R(g,x)} g_x.
pub fn chain_action(
    x: &SimplicialSet,
    act: &CrossedAction,
    c: &EquivariantCosheaf,
    offsets: &[Vec<usize>],
    dims: &[usize],
    g: usize,
    n: usize,
) -> Matrix {
    let mut m = Matrix::zeros(c.field, dims[n], dims[n]);
    for s in 0..x.count(n) {
        let (t, r) = act.on_nondegenerate(n, g, s);
        let block = if r.parity() == 0 {
            c.group_maps[n][g][s].clone()
        } else {
            c.group_maps[n][g][s].scale(&-c.field.one())
        };
        m.set_block(offsets[n][t], offsets[n][s], &block);
    }
    m
}

/// Normalized chain complex C_•(X, 𝒞) with the G-action and the orbit
/// dimension formula.
pub fn cosheaf_chain_complex(
    x: &SimplicialSet,
    act: &CrossedAction,
    c: &EquivariantCosheaf,
) -> Result<CosheafChains, CosheafError> {
    let axioms = c.check_axioms(x, act);
    if !axioms.passes() {
        return Err(CosheafError::AxiomViolation(axioms.failures.join("; ")));
    }
    let field = c.field;
    let top = x.top_dim();
    let mut offsets = Vec::with_capacity(top + 1);
    let mut dims = Vec::with_capacity(top + 1);
    for n in 0..=top {
        let mut off = Vec::with_capacity(x.count(n));
        let mut total = 0;
        for s in 0..x.count(n) {
            off.push(total);
            total += c.stalk_dims[n][s];
        }
        offsets.push(off);
        dims.push(total);
    }
    let mut boundaries = vec![Matrix::zeros(field, 0, dims[0])];
    for n in 1..=top {
        let mut d = Matrix::zeros(field, dims[n - 1], dims[n]);
        for s in 0..x.count(n) {
            for i in 0..=n {
                let f = x.stored_face(n, s, i);
                if f.is_degenerate() {
                    continue;
                }
                let block = &c.corestrictions[n][s][i];
                let signed = if i % 2 == 0 { block.clone() } else { block.scale(&-field.one()) };
                let (r0, c0) = (offsets[n - 1][f.core], offsets[n][s]);
                let current = d.block(r0, c0, signed.rows(), signed.cols());
                d.set_block(r0, c0, &current.add(&signed));
            }
        }
        boundaries.push(d);
    }
    let complex = ChainComplex::new(field, dims.clone(), boundaries)?;

    let generators = generating_set(act.group());
    let generator_action: Vec<Vec<Matrix>> = generators
        .iter()
        .map(|&g| (0..=top).map(|n| chain_action(x, act, c, &offsets, &dims, g, n)).collect())
        .collect();
    let equivariant = generator_action.iter().all(|per_n| {
        (1..=top).all(|n| complex.boundary(n).mul(&per_n[n]) == per_n[n - 1].mul(complex.boundary(n)))
    });

    let order = act.group().order();
    let dimension_formula = (0..=top)
        .map(|n| {
            let terms: Vec<OrbitTerm> = act
                .orbits(n)
                .into_iter()
                .map(|orbit| OrbitTerm {
                    representative: orbit[0],
                    orbit_size: order / act.stabilizer(n, orbit[0]).len(),
                    stalk_dim: c.stalk_dims[n][orbit[0]],
                })
                .collect();
            DimensionFormula {
                degree: n,
                predicted: terms.iter().map(|t| t.orbit_size * t.stalk_dim).sum(),
                actual: dims[n],
                terms,
            }
        })
        .collect();
    Ok(CosheafChains {
        complex,
        offsets,
        generators,
        generator_action,
        dimension_formula,
        equivariant,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeResolutionReport {
    pub field: Field,
    pub dim_c1: usize,
    pub dim_c0: usize,
    pub dim_v: usize,
    pub rank_d1: usize,
    pub rank_w: usize,
    pub d1_injective: bool,
    pub exact_at_c0: bool,
    pub w_surjective: bool,
    pub exact: bool,
    pub generated_by_invariants: bool,
    pub euler_identity: bool,
    pub exquisite: bool,
    pub geodesic: bool,
    pub ordinary: bool,
    pub within_stabilizers: bool,
    pub dimension_formula: bool,
    pub geodesic_violations: Vec<GeodesicViolation>,
    pub notes: Vec<String>,
}

/// 0 → C_1(X, V^𝒢) → C_0(X, V^𝒢) → V → 0 on a tree, w(Σα_x x) = Σα_x.
pub fn schneider_stuhler_check(
    x: &SimplicialSet,
    act: &CrossedAction,
    v: &GModule,
    sys: &SubgroupSystem,
) -> Result<TreeResolutionReport, CosheafError> {
    tree_adjacency(x)?;
    let geo = check_geodesic(x, act, sys)?;
    let c = EquivariantCosheaf::invariants(x, act, v, sys)?;
    let chains = cosheaf_chain_complex(x, act, &c)?;
    let field = v.field;
    let dims = chains.complex.dims().to_vec();
    let dim_c0 = dims[0];
    let dim_c1 = dims.get(1).copied().unwrap_or(0);
    let rank_d1 = if dims.len() > 1 { chains.complex.boundary(1).rank() } else { 0 };
    let embeddings = c.embeddings.as_ref().expect("invariants embed in V");
    let w = Matrix::hstack(field, v.dim, &embeddings[0]);
    let rank_w = w.rank();
    let all = Matrix::hstack(field, v.dim, &embeddings.iter().flatten().cloned().collect::<Vec<_>>());
    let generated_by_invariants = all.rank() == v.dim;
    let d1_injective = rank_d1 == dim_c1;
    let exact_at_c0 = dim_c0 - rank_w == rank_d1;
    let w_surjective = rank_w == v.dim;
    let exact = d1_injective && exact_at_c0 && w_surjective;
    let euler_identity = !(exact && generated_by_invariants) || dim_c0 - dim_c1 == v.dim;
    let flags = sys.flags;
    let ordinary = sys.all_ordinary(field);
    let mut notes = vec![geo.restriction.clone()];
    if !flags.exquisite {
        notes.push("hypothesis: system is not exquisite".into());
    }
    if !geo.passes() {
        notes.push("hypothesis: system is not geodesic".into());
    }
    if !ordinary {
        notes.push(format!("hypothesis: characteristic {} divides some |𝒢_x|", field.characteristic()));
    }
    if !flags.within_stabilizers {
        notes.push("some 𝒢_x is not contained in the stabilizer G_x".into());
    }
    Ok(TreeResolutionReport {
        field,
        dim_c1,
        dim_c0,
        dim_v: v.dim,
        rank_d1,
        rank_w,
        d1_injective,
        exact_at_c0,
        w_surjective,
        exact,
        generated_by_invariants,
        euler_identity,
        exquisite: flags.exquisite,
        geodesic: geo.passes(),
        ordinary,
        within_stabilizers: flags.within_stabilizers,
        dimension_formula: chains.dimension_formula_holds(),
        geodesic_violations: geo.violations,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub checked: usize,
    pub failed: usize,
    /// Simplex or vertex ids of the first failures.
    pub witnesses: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdempotentReport {
    pub checks: Vec<IdentityCheck>,
    pub skipped: Vec<String>,
}

impl IdempotentReport {
    pub fn passes(&self) -> bool {
        self.checks.iter().all(|c| c.failed == 0)
    }
}

struct Tally {
    check: IdentityCheck,
}

impl Tally {
    fn new(name: &str) -> Self {
        Tally {
            check: IdentityCheck {
                name: name.into(),
                checked: 0,
                failed: 0,
                witnesses: Vec::new(),
            },
        }
    }

    fn record(&mut self, ok: bool, witness: Vec<usize>) {
        self.check.checked += 1;
        if !ok {
            self.check.failed += 1;
            if self.check.witnesses.len() < 8 {
                self.check.witnesses.push(witness);
            }
        }
    }
}

/// Evaluates the idempotent identities by convolution: Λ_U⋆Λ_U = Λ_U;
/// Λ_x⋆Λ_y = Λ_{𝒢_x𝒢_y} = Λ_y⋆Λ_x for adjacent vertices; Λ_x as the product
/// over its vertices; Λ_{gx} = ᵍΛ_x; and, for geodesic systems on trees,
/// Λ_x⋆Λ_z⋆Λ_y = Λ_x⋆Λ_y and Λ_x⋆Λ_z = Λ_z⋆Λ_x.
pub fn verify_idempotent_identities(
    ctx: &MeasureContext,
    x: &SimplicialSet,
    act: &CrossedAction,
    sys: &SubgroupSystem,
) -> Result<IdempotentReport, CosheafError> {
    if !sys.flags.exquisite {
        return Err(CosheafError::NotExquisite);
    }
    let g = act.group();
    let lambdas: Vec<Vec<GroupFunction>> = (0..=x.top_dim())
        .map(|n| {
            (0..x.count(n))
                .map(|s| ctx.lambda(sys.get(n, s).elements()))
                .collect::<Result<_, _>>()
        })
        .collect::<Result<_, _>>()?;
    let conv = |a: &GroupFunction, b: &GroupFunction| ctx.convolve(a, b);

    let mut idem = Tally::new("idempotent");
    let mut comm = Tally::new("adjacent vertices commute");
    let mut prod = Tally::new("adjacent product is Λ of 𝒢_x𝒢_y");
    let mut over_vertices = Tally::new("Λ_x is the product over vertices");
    let mut conj = Tally::new("conjugation");
    for n in 0..=x.top_dim() {
        for s in 0..x.count(n) {
            let l = &lambdas[n][s];
            idem.record(conv(l, l)? == *l, vec![n, s]);
            let simplex = Simplex::nondegenerate(n, s);
            let mut product = lambdas[0][vertex(x, &simplex, 0)].clone();
            for k in 1..=n {
                product = conv(&product, &lambdas[0][vertex(x, &simplex, k)])?;
            }
            over_vertices.record(product == *l, vec![n, s]);
            for a in g.elements() {
                let (t, _) = act.on_nondegenerate(n, a, s);
                conj.record(ctx.conjugate(l, a)? == lambdas[n][t], vec![n, s, a]);
            }
        }
    }
    for e in 0..x.count(1) {
        let s = Simplex::nondegenerate(1, e);
        let (a, b) = (vertex(x, &s, 0), vertex(x, &s, 1));
        let ab = conv(&lambdas[0][a], &lambdas[0][b])?;
        let ba = conv(&lambdas[0][b], &lambdas[0][a])?;
        comm.record(ab == ba, vec![a, b]);
        let joint = g.product_set(sys.get(0, a).elements(), sys.get(0, b).elements());
        prod.record(ab == ctx.lambda(&joint)?, vec![a, b]);
    }
    let mut checks = vec![idem.check, comm.check, prod.check, over_vertices.check, conj.check];
    let mut skipped = Vec::new();
    match tree_adjacency(x) {
        Ok(adj) => {
            let geo = check_geodesic(x, act, sys)?;
            if geo.passes() {
                let next = first_steps(&adj);
                let mut triple = Tally::new("geodesic triple Λ_x⋆Λ_z⋆Λ_y = Λ_x⋆Λ_y");
                let mut commute = Tally::new("geodesic Λ_x⋆Λ_z = Λ_z⋆Λ_x");
                for a in 0..adj.len() {
                    for b in 0..adj.len() {
                        if a == b {
                            continue;
                        }
                        let xy = conv(&lambdas[0][a], &lambdas[0][b])?;
                        for z in [a, next[a][b]] {
                            let xz = conv(&lambdas[0][a], &lambdas[0][z])?;
                            triple.record(conv(&xz, &lambdas[0][b])? == xy, vec![a, z, b]);
                            commute.record(xz == conv(&lambdas[0][z], &lambdas[0][a])?, vec![a, z]);
                        }
                    }
                }
                checks.push(triple.check);
                checks.push(commute.check);
            } else {
                skipped.push("geodesic identities: system is not geodesic".into());
            }
        }
        Err(e) => skipped.push(format!("geodesic identities: {e}")),
    }
    Ok(IdempotentReport { checks, skipped })
}

/// Scalars in JSON: integers or strings such as "-3/4".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarRepr {
    Int(i64),
    Text(String),
}

impl ScalarRepr {
    pub fn to_scalar(&self, field: Field) -> Result<Scalar, CosheafError> {
        match self {
            ScalarRepr::Int(v) => Ok(field.from_i64(*v)),
            ScalarRepr::Text(t) => field
                .parse(t)
                .map_err(|e| CosheafError::ModuleShape(format!("entry {t:?}: {e}"))),
        }
    }
}

pub fn matrix_from_repr(field: Field, rows: &[Vec<ScalarRepr>]) -> Result<Matrix, CosheafError> {
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        return Err(CosheafError::ModuleShape("ragged matrix".into()));
    }
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|e| e.to_scalar(field)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows(field, rows))
}
