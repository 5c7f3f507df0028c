//! Finite simplicial sets in Eilenberg–Zilber form, group actions with
//! crossed data R(g,x), the crossed conditions ✗1–✗4, normalized chain
//! complexes and exact homology.
//!
//! A simplex of dimension n is written X(η)(z) for a nondegenerate m-simplex
//! z (its core) and a nondecreasing surjection η: [n] → [m]. Faces and
//! degeneracies act by precomposition on η, followed by stored faces of the
//! core whenever the composite stops being surjective.
//!
//! Vertex k of a simplex is opposite to its face ∂^k. The permutation
//! R(g,x) sends the position of a vertex in x to the position of its image
//! in g·x, so that g·X(∂^i)(x) = X(∂^{R(g,x)(i)})(g·x).

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::Field;
use crate::fingroup::FiniteGroup;
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimplicialError {
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("face {face} of simplex {simplex} in dimension {dim} is invalid: {reason}")]
    InvalidFace {
        dim: usize,
        simplex: usize,
        face: usize,
        reason: String,
    },
    #[error("simplicial identity for faces ({i}, {j}) fails on simplex {simplex} in dimension {dim}")]
    IdentityViolated { dim: usize, simplex: usize, i: usize, j: usize },
    #[error("simplex {0:?} not found")]
    MissingSimplex(Vec<usize>),
    #[error("boundary matrix d_{0} has the wrong shape")]
    BadShape(usize),
    #[error("d_k ∘ d_(k+1) ≠ 0 at k = {0}")]
    NotAComplex(usize),
    #[error("group data is not an action: {0}")]
    NotAnAction(String),
    #[error("crossed conditions violated ({0} violations)")]
    CrossedConditionViolated(usize),
    #[error("action table has the wrong shape: {0}")]
    ActionShape(String),
}

/// A permutation of [n] = {0, …, n}, stored as its image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Perm(Vec<usize>);

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Perm {
    pub fn new(images: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || std::mem::replace(&mut seen[x], true) {
                return None;
            }
        }
        Some(Perm(images))
    }

    pub fn identity(len: usize) -> Self {
        Perm((0..len).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// self ∘ other.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// 0 for even permutations, 1 for odd.
    pub fn parity(&self) -> usize {
        let mut inversions = 0;
        for i in 0..self.0.len() {
            for j in i + 1..self.0.len() {
                if self.0[i] > self.0[j] {
                    inversions += 1;
                }
            }
        }
        inversions % 2
    }
}

/// ∂^i: [n−1] → [n], the increasing map missing i.
pub fn coface(i: usize, n: usize) -> Vec<usize> {
    (0..n).map(|k| if k < i { k } else { k + 1 }).collect()
}

/// σ^i: [n+1] → [n], the nondecreasing surjection hitting i twice.
pub fn codegeneracy(i: usize, n: usize) -> Vec<usize> {
    (0..n + 2).map(|k| if k <= i { k } else { k - 1 }).collect()
}

/// A generator of the simplex category acting on simplices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SimplicialOp {
    /// ∂^i.
    Face(usize),
    /// σ^i.
    Degeneracy(usize),
}

/// 𝕊(f)(φ) for the symmetric crossed simplicial group, with the face and
/// degeneracy formulas applied literally. φ is a permutation of [n]; for
/// ∂^i the result permutes [n−1], for σ^i it permutes [n+1].
pub fn symmetric_face(phi: &Perm, op: SimplicialOp) -> Result<Perm, SimplicialError> {
    let n = phi.len() - 1;
    let phi_inv = phi.inverse();
    match op {
        SimplicialOp::Face(i) => {
            if n == 0 || i > n {
                return Err(SimplicialError::IndexOutOfRange { index: i, dim: n });
            }
            let d = coface(phi_inv.apply(i), n);
            let s = codegeneracy(i, n - 1);
            Ok(Perm(d.iter().map(|&k| s[phi.apply(k)]).collect()))
        }
        SimplicialOp::Degeneracy(i) => {
            if i > n {
                return Err(SimplicialError::IndexOutOfRange { index: i, dim: n });
            }
            let j = phi_inv.apply(i);
            let s = codegeneracy(j, n);
            let images = (0..n + 2)
                .map(|k| {
                    if k <= n && phi.apply(k) == i {
                        i
                    } else if k >= 1 && phi.apply(k - 1) == i {
                        i + 1
                    } else {
                        // (σ^i)⁻¹ of a value other than i.
                        let v = phi.apply(s[k]);
                        if v < i {
                            v
                        } else {
                            v + 1
                        }
                    }
                })
                .collect();
            Ok(Perm(images))
        }
    }
}

/// The same operator transported to the convention of R above:
/// 𝕊*(f)(φ) = 𝕊(f)(φ⁻¹)⁻¹.
pub fn symmetric_face_star(phi: &Perm, op: SimplicialOp) -> Result<Perm, SimplicialError> {
    symmetric_face(&phi.inverse(), op).map(|p| p.inverse())
}

/// All permutations of [len − 1], lexicographically.
pub fn all_permutations(len: usize) -> Vec<Perm> {
    fn rec(prefix: &mut Vec<usize>, len: usize, out: &mut Vec<Perm>) {
        if prefix.len() == len {
            out.push(Perm(prefix.clone()));
            return;
        }
        for v in 0..len {
            if !prefix.contains(&v) {
                prefix.push(v);
                rec(prefix, len, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), len, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetricIdentityReport {
    pub max_dim: usize,
    pub checked: usize,
    /// (n, φ, identity) for each failure.
    pub failures: Vec<(usize, Perm, String)>,
}

/// The simplicial identities for d_i = 𝕊(∂^i), s_i = 𝕊(σ^i) on every
/// permutation of [n], n ≤ max_dim.
pub fn check_symmetric_identities(max_dim: usize) -> SymmetricIdentityReport {
    use SimplicialOp::{Degeneracy as S, Face as D};
    let f = |p: &Perm, op| symmetric_face(p, op).expect("index in range");
    let mut report = SymmetricIdentityReport {
        max_dim,
        checked: 0,
        failures: Vec::new(),
    };
    let mut record = |ok: bool, n: usize, phi: &Perm, what: String| {
        report.checked += 1;
        if !ok {
            report.failures.push((n, phi.clone(), what));
        }
    };
    for n in 0..=max_dim {
        for phi in all_permutations(n + 1) {
            for j in 0..=n {
                for i in 0..if n >= 2 { j } else { 0 } {
                    let ok = f(&f(&phi, D(j)), D(i)) == f(&f(&phi, D(i)), D(j - 1));
                    record(ok, n, &phi, format!("d{i}d{j} = d{}d{i}", j - 1));
                }
                let sj = f(&phi, S(j));
                for i in 0..=n + 1 {
                    let lhs = f(&sj, D(i));
                    let (ok, what) = if i < j {
                        (lhs == f(&f(&phi, D(i)), S(j - 1)), format!("d{i}s{j} = s{}d{i}", j - 1))
                    } else if i == j || i == j + 1 {
                        (lhs == phi, format!("d{i}s{j} = id"))
                    } else {
                        (lhs == f(&f(&phi, D(i - 1)), S(j)), format!("d{i}s{j} = s{j}d{}", i - 1))
                    };
                    record(ok, n, &phi, what);
                }
                for i in 0..=j {
                    let ok = f(&sj, S(i)) == f(&f(&phi, S(i)), S(j + 1));
                    record(ok, n, &phi, format!("s{i}s{j} = s{}s{i}", j + 1));
                }
            }
        }
    }
    report
}

/// X(η)(z) for a nondegenerate `core` of dimension `core_dim`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Simplex {
    pub core_dim: usize,
    pub core: usize,
    pub surj: Vec<usize>,
}

impl Simplex {
    pub fn nondegenerate(dim: usize, id: usize) -> Self {
        Simplex {
            core_dim: dim,
            core: id,
            surj: (0..=dim).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.surj.len() - 1
    }

    pub fn is_degenerate(&self) -> bool {
        self.core_dim < self.dim()
    }

    /// Smallest p with η(p) = η(p+1), and the simplex y′ with self = s_p(y′).
    pub fn canonical_split(&self) -> Option<(usize, Simplex)> {
        let p = (0..self.dim()).find(|&p| self.surj[p] == self.surj[p + 1])?;
        let mut surj = self.surj.clone();
        surj.remove(p + 1);
        Some((
            p,
            Simplex {
                core_dim: self.core_dim,
                core: self.core,
                surj,
            },
        ))
    }
}

/// A face reference in JSON: a bare id for a nondegenerate face, or a full
/// simplex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FaceRef {
    Id(usize),
    Full(Simplex),
}

/// JSON form: `counts[n]` nondegenerate n-simplices and, for n ≥ 1,
/// `faces[n-1][x][i]` = ∂^i of simplex x.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialSetSpec {
    pub counts: Vec<usize>,
    #[serde(default)]
    pub faces: Vec<Vec<Vec<FaceRef>>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialSet {
    counts: Vec<usize>,
    /// faces[n][x][i] for n ≥ 1; faces[0] is empty.
    faces: Vec<Vec<Vec<Simplex>>>,
    /// Ordered vertex lists, when built from an ordered simplicial complex.
    vertices: Option<Vec<Vec<Vec<usize>>>>,
}

fn is_monotone_surjection(s: &[usize], target: usize) -> bool {
    s.first() == Some(&0)
        && s.last() == Some(&target)
        && s.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1)
}

impl SimplicialSet {
    pub fn new(counts: Vec<usize>, faces: Vec<Vec<Vec<Simplex>>>) -> Result<Self, SimplicialError> {
        let mut counts = counts;
        while counts.len() > 1 && counts.last() == Some(&0) {
            counts.pop();
        }
        let top = counts.len().saturating_sub(1);
        let mut all_faces = vec![Vec::new()];
        let mut supplied = faces.into_iter();
        for n in 1..=top {
            let layer = supplied.next().unwrap_or_default();
            if layer.len() != counts[n] {
                return Err(SimplicialError::InvalidFace {
                    dim: n,
                    simplex: layer.len(),
                    face: 0,
                    reason: format!("expected face lists for {} simplices", counts[n]),
                });
            }
            for (x, fs) in layer.iter().enumerate() {
                if fs.len() != n + 1 {
                    return Err(SimplicialError::InvalidFace {
                        dim: n,
                        simplex: x,
                        face: fs.len(),
                        reason: format!("expected {} faces", n + 1),
                    });
                }
                for (i, f) in fs.iter().enumerate() {
                    let bad = |reason: &str| SimplicialError::InvalidFace {
                        dim: n,
                        simplex: x,
                        face: i,
                        reason: reason.to_string(),
                    };
                    if f.surj.len() != n {
                        return Err(bad("wrong dimension"));
                    }
                    if f.core_dim > n - 1 || f.core >= counts[f.core_dim] {
                        return Err(bad("unknown core"));
                    }
                    if !is_monotone_surjection(&f.surj, f.core_dim) {
                        return Err(bad("degeneracy part is not a monotone surjection"));
                    }
                }
            }
            all_faces.push(layer);
        }
        let set = SimplicialSet {
            counts,
            faces: all_faces,
            vertices: None,
        };
        for n in 2..=top {
            for x in 0..set.counts[n] {
                let s = Simplex::nondegenerate(n, x);
                for j in 0..=n {
                    for i in 0..j {
                        if set.face(&set.face(&s, j), i) != set.face(&set.face(&s, i), j - 1) {
                            return Err(SimplicialError::IdentityViolated { dim: n, simplex: x, i, j });
                        }
                    }
                }
            }
        }
        Ok(set)
    }

    pub fn from_spec(spec: &SimplicialSetSpec) -> Result<Self, SimplicialError> {
        let faces = spec
            .faces
            .iter()
            .enumerate()
            .map(|(k, layer)| {
                layer
                    .iter()
                    .map(|fs| {
                        fs.iter()
                            .map(|f| match f {
                                FaceRef::Id(id) => Simplex::nondegenerate(k, *id),
                                FaceRef::Full(s) => s.clone(),
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self::new(spec.counts.clone(), faces)
    }

    /// An ordered simplicial complex: `simplices[n]` lists the n-simplices as
    /// vertex tuples (vertex k first, and so on); every ordered face of every
    /// simplex must be listed.
    pub fn from_ordered_simplices(simplices: Vec<Vec<Vec<usize>>>) -> Result<Self, SimplicialError> {
        let lookup: Vec<HashMap<&[usize], usize>> = simplices
            .iter()
            .map(|layer| layer.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect())
            .collect();
        let mut faces = Vec::new();
        for n in 1..simplices.len() {
            let mut layer = Vec::with_capacity(simplices[n].len());
            for s in &simplices[n] {
                let mut fs = Vec::with_capacity(n + 1);
                for i in 0..=n {
                    let mut f = s.clone();
                    f.remove(i);
                    let id = *lookup[n - 1]
                        .get(f.as_slice())
                        .ok_or_else(|| SimplicialError::MissingSimplex(f.clone()))?;
                    fs.push(Simplex::nondegenerate(n - 1, id));
                }
                layer.push(fs);
            }
            faces.push(layer);
        }
        let counts = simplices.iter().map(Vec::len).collect();
        let mut set = Self::new(counts, faces)?;
        set.vertices = Some(simplices);
        Ok(set)
    }

    pub fn point() -> Self {
        Self::new(vec![1], Vec::new()).unwrap()
    }

    /// One vertex and one edge whose faces are both that vertex.
    pub fn circle() -> Self {
        let v = Simplex::nondegenerate(0, 0);
        Self::new(vec![1, 1], vec![vec![vec![v.clone(), v]]]).unwrap()
    }

    /// Two vertices joined by one edge.
    pub fn interval() -> Self {
        Self::from_ordered_simplices(vec![vec![vec![0], vec![1]], vec![vec![0, 1]]]).unwrap()
    }

    pub fn top_dim(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn count(&self, n: usize) -> usize {
        self.counts.get(n).copied().unwrap_or(0)
    }

    pub fn vertices_of(&self, n: usize, x: usize) -> Option<&[usize]> {
        self.vertices.as_ref().map(|v| v[n][x].as_slice())
    }

    pub fn stored_face(&self, n: usize, x: usize, i: usize) -> &Simplex {
        &self.faces[n][x][i]
    }

    /// X(θ)(y) for a nondecreasing θ: [k] → [dim y].
    pub fn apply(&self, theta: &[usize], y: &Simplex) -> Simplex {
        let phi: Vec<usize> = theta.iter().map(|&t| y.surj[t]).collect();
        let mut image: Vec<usize> = phi.clone();
        image.dedup();
        let pi: Vec<usize> = phi
            .iter()
            .map(|v| image.binary_search(v).unwrap())
            .collect();
        let face = self.core_face(y.core_dim, y.core, &image);
        Simplex {
            core_dim: face.core_dim,
            core: face.core,
            surj: pi.iter().map(|&p| face.surj[p]).collect(),
        }
    }

    /// X(ι)(z) for an injection ι given by its increasing image list.
    fn core_face(&self, m: usize, z: usize, iota: &[usize]) -> Simplex {
        if iota.len() == m + 1 {
            return Simplex::nondegenerate(m, z);
        }
        let j = (0..=m).find(|v| iota.binary_search(v).is_err()).unwrap();
        let rest: Vec<usize> = iota.iter().map(|&v| if v > j { v - 1 } else { v }).collect();
        self.apply(&rest, &self.faces[m][z][j])
    }

    /// X(∂^i)(y).
    pub fn face(&self, y: &Simplex, i: usize) -> Simplex {
        self.apply(&coface(i, y.dim()), y)
    }

    /// X(σ^i)(y).
    pub fn degeneracy(&self, y: &Simplex, i: usize) -> Simplex {
        self.apply(&codegeneracy(i, y.dim()), y)
    }

    /// All simplices of dimension n, degenerate ones included, in a fixed order.
    pub fn simplices(&self, n: usize) -> Vec<Simplex> {
        let mut out = Vec::new();
        for m in 0..=n.min(self.top_dim()) {
            for mask in 0u64..(1 << n) {
                if mask.count_ones() as usize != m {
                    continue;
                }
                let mut surj = vec![0];
                for step in 0..n {
                    surj.push(surj[step] + ((mask >> step) & 1) as usize);
                }
                for z in 0..self.count(m) {
                    out.push(Simplex {
                        core_dim: m,
                        core: z,
                        surj: surj.clone(),
                    });
                }
            }
        }
        out
    }

    /// Normalized chain complex over `field`.
    pub fn chain_complex(&self, field: Field) -> ChainComplex {
        let top = self.top_dim();
        let mut boundaries = vec![Matrix::zeros(field, 0, self.count(0))];
        for k in 1..=top {
            let mut d = Matrix::zeros(field, self.count(k - 1), self.count(k));
            for x in 0..self.count(k) {
                for i in 0..=k {
                    let f = &self.faces[k][x][i];
                    if f.is_degenerate() {
                        continue;
                    }
                    let sign = if i % 2 == 0 { field.one() } else { -field.one() };
                    d[(f.core, x)] = &d[(f.core, x)] + &sign;
                }
            }
            boundaries.push(d);
        }
        ChainComplex::new(field, self.counts.clone(), boundaries).expect("simplicial boundary squares to zero")
    }
}

/// Finite chain complex C_0 ← C_1 ← … with exact boundary matrices;
/// `boundary(k)` is d_k: C_k → C_{k−1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplex {
    field: Field,
    dims: Vec<usize>,
    boundaries: Vec<Matrix>,
}

impl ChainComplex {
    /// `boundaries[0]` must be the 0×dims[0] matrix. Checks d∘d = 0.
    pub fn new(field: Field, dims: Vec<usize>, boundaries: Vec<Matrix>) -> Result<Self, SimplicialError> {
        if boundaries.len() != dims.len() {
            return Err(SimplicialError::BadShape(boundaries.len()));
        }
        for (k, d) in boundaries.iter().enumerate() {
            let rows = if k == 0 { 0 } else { dims[k - 1] };
            if d.rows() != rows || d.cols() != dims[k] || d.field() != field {
                return Err(SimplicialError::BadShape(k));
            }
        }
        for k in 1..boundaries.len().saturating_sub(1) {
            if !boundaries[k].mul(&boundaries[k + 1]).is_zero() {
                return Err(SimplicialError::NotAComplex(k));
            }
        }
        Ok(ChainComplex {
            field,
            dims,
            boundaries,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn boundary(&self, k: usize) -> &Matrix {
        &self.boundaries[k]
    }

    /// rank d_k for k = 0..=top (rank d_0 = 0).
    pub fn ranks(&self) -> Vec<usize> {
        self.boundaries.iter().map(Matrix::rank).collect()
    }

    /// dim H_k = dim C_k − rank d_k − rank d_{k+1}.
    pub fn homology(&self) -> Vec<usize> {
        let ranks = self.ranks();
        (0..self.dims.len())
            .map(|k| self.dims[k] - ranks[k] - ranks.get(k + 1).copied().unwrap_or(0))
            .collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(k, &d)| if k % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }
}

/// `table[n][g][x]` = (g·x, R(g,x)) for nondegenerate n-simplices x.
#[derive(Debug, Clone)]
pub struct CrossedAction {
    group: Arc<FiniteGroup>,
    table: Vec<Vec<Vec<(usize, Perm)>>>,
}

/// JSON form of an action given on generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSpec {
    pub generators: Vec<usize>,
    /// maps[n][k][x] = [target, R] for generator k.
    pub maps: Vec<Vec<Vec<(usize, Perm)>>>,
}

impl CrossedAction {
    /// Takes the full table; the group laws are verified by [`check_crossed`].
    pub fn new(
        group: Arc<FiniteGroup>,
        x: &SimplicialSet,
        table: Vec<Vec<Vec<(usize, Perm)>>>,
    ) -> Result<Self, SimplicialError> {
        if table.len() != x.top_dim() + 1 {
            return Err(SimplicialError::ActionShape("one layer per dimension".into()));
        }
        for (n, layer) in table.iter().enumerate() {
            if layer.len() != group.order() {
                return Err(SimplicialError::ActionShape(format!("dimension {n}: one row per element")));
            }
            for row in layer {
                if row.len() != x.count(n)
                    || row.iter().any(|(y, r)| *y >= x.count(n) || r.len() != n + 1)
                {
                    return Err(SimplicialError::ActionShape(format!("dimension {n}: bad row")));
                }
            }
        }
        Ok(CrossedAction { group, table })
    }

    /// Trivial action with R ≡ id.
    pub fn trivial(group: Arc<FiniteGroup>, x: &SimplicialSet) -> Self {
        let table = (0..=x.top_dim())
            .map(|n| {
                (0..group.order())
                    .map(|_| (0..x.count(n)).map(|s| (s, Perm::identity(n + 1))).collect())
                    .collect()
            })
            .collect();
        CrossedAction { group, table }
    }

    /// Extends an action on generators to the group: (g·k)·x = g·(k·x) and
    /// R(gk, x) = R(g, kx)∘R(k, x). Different paths must agree.
    pub fn from_generators(
        group: Arc<FiniteGroup>,
        x: &SimplicialSet,
        generators: &[usize],
        maps: Vec<Vec<Vec<(usize, Perm)>>>,
    ) -> Result<Self, SimplicialError> {
        let top = x.top_dim();
        if maps.len() != top + 1 || maps.iter().any(|layer| layer.len() != generators.len()) {
            return Err(SimplicialError::ActionShape("maps[n][generator][simplex]".into()));
        }
        for (n, layer) in maps.iter().enumerate() {
            for row in layer {
                if row.len() != x.count(n)
                    || row.iter().any(|(y, r)| *y >= x.count(n) || r.len() != n + 1)
                {
                    return Err(SimplicialError::ActionShape(format!("dimension {n}: bad row")));
                }
            }
        }
        let order = group.order();
        let mut table: Vec<Vec<Option<Vec<(usize, Perm)>>>> = vec![vec![None; order]; top + 1];
        for n in 0..=top {
            table[n][group.identity()] = Some((0..x.count(n)).map(|s| (s, Perm::identity(n + 1))).collect());
        }
        let mut queue = std::collections::VecDeque::from([group.identity()]);
        let mut seen = vec![false; order];
        seen[group.identity()] = true;
        while let Some(g) = queue.pop_front() {
            for (k, &gen) in generators.iter().enumerate() {
                let h = group.mul(g, gen);
                for n in 0..=top {
                    let gx = table[n][g].as_ref().unwrap();
                    let row: Vec<(usize, Perm)> = maps[n][k]
                        .iter()
                        .map(|(y, r)| (gx[*y].0, gx[*y].1.compose(r)))
                        .collect();
                    match &table[n][h] {
                        Some(existing) if *existing != row => {
                            return Err(SimplicialError::NotAnAction(format!(
                                "element {h} reached with two different actions in dimension {n}"
                            )));
                        }
                        Some(_) => {}
                        None => table[n][h] = Some(row),
                    }
                }
                if !seen[h] {
                    seen[h] = true;
                    queue.push_back(h);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(SimplicialError::NotAnAction("generators do not generate the group".into()));
        }
        let table = table
            .into_iter()
            .map(|layer| layer.into_iter().map(Option::unwrap).collect())
            .collect();
        Ok(CrossedAction { group, table })
    }

    /// Action induced by permutations of the vertices of an ordered simplicial
    /// complex; R(g,x)(i) is the position of g·v_i in g·x.
    pub fn from_vertex_action(
        group: Arc<FiniteGroup>,
        x: &SimplicialSet,
        vertex_map: impl Fn(usize, usize) -> usize,
    ) -> Result<Self, SimplicialError> {
        let Some(verts) = x.vertices.as_ref() else {
            return Err(SimplicialError::ActionShape("vertex lists unavailable".into()));
        };
        let index: Vec<HashMap<Vec<usize>, usize>> = verts
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let mut key = s.clone();
                        key.sort_unstable();
                        (key, i)
                    })
                    .collect()
            })
            .collect();
        let mut table = Vec::with_capacity(verts.len());
        for (n, layer) in verts.iter().enumerate() {
            let mut rows = Vec::with_capacity(group.order());
            for g in 0..group.order() {
                let mut row = Vec::with_capacity(layer.len());
                for s in layer {
                    let image: Vec<usize> = s.iter().map(|&v| vertex_map(g, v)).collect();
                    let mut key = image.clone();
                    key.sort_unstable();
                    let y = *index[n]
                        .get(&key)
                        .ok_or_else(|| SimplicialError::MissingSimplex(image.clone()))?;
                    let target = &layer[y];
                    let r = image
                        .iter()
                        .map(|v| target.iter().position(|t| t == v).unwrap())
                        .collect();
                    row.push((y, Perm(r)));
                }
                rows.push(row);
            }
            table.push(rows);
        }
        Ok(CrossedAction { group, table })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    /// (g·x, R(g,x)) for a nondegenerate n-simplex x.
    pub fn on_nondegenerate(&self, n: usize, g: usize, x: usize) -> (usize, &Perm) {
        let (y, r) = &self.table[n][g][x];
        (*y, r)
    }

    /// g·y and R(g,y) for any simplex, extended to degenerate simplices along
    /// the canonical split y = s_p(y′): g·y = s_{R(g,y′)(p)}(g·y′) and
    /// R(g,y) = 𝕊*(σ^p)(R(g,y′)).
    pub fn act(&self, x: &SimplicialSet, g: usize, y: &Simplex) -> (Simplex, Perm) {
        match y.canonical_split() {
            None => {
                let (t, r) = &self.table[y.core_dim][g][y.core];
                (Simplex::nondegenerate(y.core_dim, *t), r.clone())
            }
            Some((p, base)) => {
                let (gb, r) = self.act(x, g, &base);
                let image = x.degeneracy(&gb, r.apply(p));
                let r2 = symmetric_face_star(&r, SimplicialOp::Degeneracy(p)).expect("index in range");
                (image, r2)
            }
        }
    }

    /// Orbits of nondegenerate n-simplices, each listed by least element.
    pub fn orbits(&self, n: usize) -> Vec<Vec<usize>> {
        let count = self.table[n].first().map_or(0, Vec::len);
        let mut seen = vec![false; count];
        let mut out = Vec::new();
        for x in 0..count {
            if seen[x] {
                continue;
            }
            let mut orbit: Vec<usize> = (0..self.group.order()).map(|g| self.table[n][g][x].0).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &y in &orbit {
                seen[y] = true;
            }
            out.push(orbit);
        }
        out
    }

    /// G_x for a nondegenerate n-simplex, as sorted element indices.
    pub fn stabilizer(&self, n: usize, x: usize) -> Vec<usize> {
        (0..self.group.order())
            .filter(|&g| self.table[n][g][x].0 == x)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CrossedCondition {
    /// Group action laws on simplices.
    Action,
    /// ✗1: R is a groupoid map.
    Groupoid,
    /// ✗2 for a face or degeneracy operator.
    Simpliciality,
    /// ✗3: codimension-one faces.
    Faces,
    /// ✗4: codimension-one degenerations.
    Degeneracies,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossedViolation {
    pub condition: CrossedCondition,
    pub g: usize,
    pub h: Option<usize>,
    pub simplex: Simplex,
    pub op: Option<SimplicialOp>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossedReport {
    pub checked_up_to_dim: usize,
    pub violations: Vec<CrossedViolation>,
}

impl CrossedReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustive check of the action laws and ✗1–✗4 on all simplices of
/// dimension ≤ top + 1, degenerate ones included.
pub fn check_crossed(x: &SimplicialSet, act: &CrossedAction) -> CrossedReport {
    let g = act.group();
    let max = x.top_dim() + 1;
    let mut violations = Vec::new();
    let mut push = |condition, g, h, simplex: &Simplex, op| {
        violations.push(CrossedViolation {
            condition,
            g,
            h,
            simplex: simplex.clone(),
            op,
        })
    };
    for n in 0..=max {
        let simplices = x.simplices(n);
        let acted: Vec<Vec<(Simplex, Perm)>> = (0..g.order())
            .map(|a| simplices.iter().map(|s| act.act(x, a, s)).collect())
            .collect();
        let position: HashMap<&Simplex, usize> = simplices.iter().enumerate().map(|(i, s)| (s, i)).collect();
        for (si, s) in simplices.iter().enumerate() {
            let (ex, er) = &acted[g.identity()][si];
            if ex != s || !er.is_identity() {
                push(CrossedCondition::Action, g.identity(), None, s, None);
                push(CrossedCondition::Groupoid, g.identity(), None, s, None);
            }
            for a in 0..g.order() {
                let (ax, ar) = &acted[a][si];
                let Some(&axi) = position.get(ax) else {
                    push(CrossedCondition::Action, a, None, s, None);
                    continue;
                };
                for b in 0..g.order() {
                    // (b·a)·s = b·(a·s), R(ba, s) = R(b, as)∘R(a, s).
                    let (bax, bar) = &acted[g.mul(b, a)][si];
                    let (b_ax, br) = &acted[b][axi];
                    if bax != b_ax {
                        push(CrossedCondition::Action, b, Some(a), s, None);
                    }
                    if *bar != br.compose(ar) {
                        push(CrossedCondition::Groupoid, b, Some(a), s, None);
                    }
                }
                for i in 0..=n {
                    if n >= 1 {
                        let face = x.face(s, i);
                        let (gf, gfr) = act.act(x, a, &face);
                        if gf != x.face(ax, ar.apply(i)) {
                            push(CrossedCondition::Faces, a, None, s, Some(SimplicialOp::Face(i)));
                        }
                        let star = symmetric_face_star(ar, SimplicialOp::Face(i)).unwrap();
                        if star != gfr {
                            push(CrossedCondition::Simpliciality, a, None, s, Some(SimplicialOp::Face(i)));
                        }
                    }
                    if n < max {
                        let deg = x.degeneracy(s, i);
                        let (gd, gdr) = act.act(x, a, &deg);
                        if gd != x.degeneracy(ax, ar.apply(i)) {
                            push(CrossedCondition::Degeneracies, a, None, s, Some(SimplicialOp::Degeneracy(i)));
                        }
                        let star = symmetric_face_star(ar, SimplicialOp::Degeneracy(i)).unwrap();
                        if star != gdr {
                            push(
                                CrossedCondition::Simpliciality,
                                a,
                                None,
                                s,
                                Some(SimplicialOp::Degeneracy(i)),
                            );
                        }
                    }
                }
            }
        }
    }
    CrossedReport {
        checked_up_to_dim: max,
        violations,
    }
}

/// Matrices M_k(g) with g·[x] = (−1)^{sign R(g,x)}[g·x] on each C_k.
pub fn equivariant_chain_action(
    x: &SimplicialSet,
    act: &CrossedAction,
    field: Field,
) -> Result<Vec<Vec<Matrix>>, SimplicialError> {
    let report = check_crossed(x, act);
    if !report.passes() {
        return Err(SimplicialError::CrossedConditionViolated(report.violations.len()));
    }
    Ok(chain_action_unchecked(x, act, field))
}

/// Result indexed `[g][k]`.
pub(crate) fn chain_action_unchecked(x: &SimplicialSet, act: &CrossedAction, field: Field) -> Vec<Vec<Matrix>> {
    (0..act.group().order())
        .map(|g| {
            (0..=x.top_dim())
                .map(|k| {
                    let mut m = Matrix::zeros(field, x.count(k), x.count(k));
                    for s in 0..x.count(k) {
                        let (t, r) = act.on_nondegenerate(k, g, s);
                        m[(t, s)] = if r.parity() == 0 { field.one() } else { -field.one() };
                    }
                    m
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perms(len: usize) -> Vec<Perm> {
        fn rec(prefix: &mut Vec<usize>, len: usize, out: &mut Vec<Perm>) {
            if prefix.len() == len {
                out.push(Perm(prefix.clone()));
                return;
            }
            for v in 0..len {
                if !prefix.contains(&v) {
                    prefix.push(v);
                    rec(prefix, len, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), len, &mut out);
        out
    }

    #[test]
    fn symmetric_identities_report() {
        let r = check_symmetric_identities(4);
        assert!(r.failures.is_empty());
        assert!(r.checked > 1000);
        assert_eq!(all_permutations(4).len(), 24);
    }

    #[test]
    fn symmetric_face_examples() {
        for n in 1..4 {
            for i in 0..=n {
                let id = Perm::identity(n + 1);
                assert!(symmetric_face(&id, SimplicialOp::Face(i)).unwrap().is_identity());
            }
        }
        let t = Perm(vec![1, 0]);
        assert_eq!(symmetric_face(&t, SimplicialOp::Face(0)).unwrap(), Perm(vec![0]));
        let t = Perm(vec![1, 0, 2]);
        assert_eq!(symmetric_face(&t, SimplicialOp::Face(2)).unwrap(), Perm(vec![1, 0]));
        assert_eq!(
            symmetric_face(&t, SimplicialOp::Face(3)),
            Err(SimplicialError::IndexOutOfRange { index: 3, dim: 2 })
        );
    }

    #[test]
    fn star_convention_differs_from_literal_on_a_3_cycle() {
        let t = Perm(vec![1, 0]);
        assert_eq!(symmetric_face_star(&t, SimplicialOp::Degeneracy(0)).unwrap(), Perm(vec![1, 2, 0]));
        assert_eq!(symmetric_face(&t, SimplicialOp::Degeneracy(0)).unwrap(), Perm(vec![2, 0, 1]));
    }

    /// d_i = 𝕊(∂^i), s_i = 𝕊(σ^i) satisfy the simplicial identities.
    #[test]
    fn symmetric_crossed_group_is_simplicial() {
        use SimplicialOp::{Degeneracy as S, Face as D};
        let f = |p: &Perm, op| symmetric_face(p, op).unwrap();
        for n in 0..=4 {
            for phi in perms(n + 1) {
                for j in 0..=n {
                    for i in 0..if n >= 2 { j } else { 0 } {
                        assert_eq!(f(&f(&phi, D(j)), D(i)), f(&f(&phi, D(i)), D(j - 1)));
                    }
                    for i in 0..=n + 1 {
                        let sj = f(&phi, S(j));
                        let lhs = f(&sj, D(i));
                        if i < j {
                            assert_eq!(lhs, f(&f(&phi, D(i)), S(j - 1)));
                        } else if i == j || i == j + 1 {
                            assert_eq!(lhs, phi);
                        } else {
                            assert_eq!(lhs, f(&f(&phi, D(i - 1)), S(j)));
                        }
                    }
                    for i in 0..=j {
                        assert_eq!(f(&f(&phi, S(j)), S(i)), f(&f(&phi, S(i)), S(j + 1)));
                    }
                }
            }
        }
    }

    #[test]
    fn degenerate_faces_follow_simplicial_identities() {
        let x = SimplicialSet::interval();
        let e = Simplex::nondegenerate(1, 0);
        let s0e = x.degeneracy(&e, 0);
        assert_eq!(s0e.surj, vec![0, 0, 1]);
        assert_eq!(x.face(&s0e, 0), e);
        assert_eq!(x.face(&s0e, 1), e);
        assert_eq!(x.face(&s0e, 2), x.degeneracy(&x.face(&e, 1), 0));
        for y in x.simplices(3) {
            for j in 0..=3 {
                for i in 0..j {
                    assert_eq!(x.face(&x.face(&y, j), i), x.face(&x.face(&y, i), j - 1));
                }
            }
        }
    }

    #[test]
    fn invalid_faces_rejected() {
        let v = Simplex::nondegenerate(0, 3);
        let err = SimplicialSet::new(vec![1, 1], vec![vec![vec![v.clone(), v]]]).unwrap_err();
        assert!(matches!(err, SimplicialError::InvalidFace { .. }));
        // A triangle whose edges do not glue consistently.
        let s = |d, i| Simplex::nondegenerate(d, i);
        let err = SimplicialSet::new(
            vec![3, 3, 1],
            vec![
                vec![vec![s(0, 1), s(0, 0)], vec![s(0, 2), s(0, 0)], vec![s(0, 2), s(0, 1)]],
                vec![vec![s(1, 0), s(1, 1), s(1, 2)]],
            ],
        )
        .unwrap_err();
        assert!(matches!(err, SimplicialError::IdentityViolated { .. }));
    }

    #[test]
    fn homology_examples() {
        let p = SimplicialSet::point().chain_complex(Field::Rational);
        assert_eq!(p.homology(), vec![1]);
        let c = SimplicialSet::circle().chain_complex(Field::Rational);
        assert!(c.boundary(1).is_zero());
        assert_eq!(c.homology(), vec![1, 1]);
        let i = SimplicialSet::interval().chain_complex(Field::Rational);
        assert_eq!(
            *i.boundary(1),
            Matrix::from_i64_rows(Field::Rational, &[vec![-1], vec![1]])
        );
        assert_eq!(i.homology(), vec![1, 0]);
    }

    fn edge_flip(r: Perm) -> (SimplicialSet, CrossedAction) {
        let x = SimplicialSet::interval();
        let c2 = Arc::new(FiniteGroup::from_permutations(2, &[vec![1, 0]]).unwrap());
        let table = vec![
            vec![vec![(0, Perm::identity(1)), (1, Perm::identity(1))], vec![(1, Perm::identity(1)), (0, Perm::identity(1))]],
            vec![vec![(0, Perm::identity(2))], vec![(0, r)]],
        ];
        let act = CrossedAction::new(c2, &x, table).unwrap();
        (x, act)
    }

    #[test]
    fn edge_flip_crossed_conditions() {
        let (x, act) = edge_flip(Perm(vec![1, 0]));
        let report = check_crossed(&x, &act);
        assert!(report.passes(), "{:?}", report.violations);
        let m = equivariant_chain_action(&x, &act, Field::Rational).unwrap();
        assert_eq!(m[1][1][(0, 0)], -Field::Rational.one());

        let (x, act) = edge_flip(Perm::identity(2));
        let report = check_crossed(&x, &act);
        assert!(report.violations.iter().any(|v| v.condition == CrossedCondition::Faces
            && v.g == 1
            && v.simplex == Simplex::nondegenerate(1, 0)
            && v.op == Some(SimplicialOp::Face(0))));
        assert!(matches!(
            equivariant_chain_action(&x, &act, Field::Rational),
            Err(SimplicialError::CrossedConditionViolated(_))
        ));
    }

    #[test]
    fn vertex_action_and_generators_agree() {
        let x = SimplicialSet::interval();
        let c2 = Arc::new(FiniteGroup::from_permutations(2, &[vec![1, 0]]).unwrap());
        let a = CrossedAction::from_vertex_action(c2.clone(), &x, |g, v| if g == 0 { v } else { 1 - v }).unwrap();
        let b = CrossedAction::from_generators(
            c2,
            &x,
            &[1],
            vec![vec![vec![(1, Perm::identity(1)), (0, Perm::identity(1))]], vec![vec![(0, Perm(vec![1, 0]))]]],
        )
        .unwrap();
        assert_eq!(a.table, b.table);
        assert!(check_crossed(&x, &a).passes());
    }

    #[test]
    fn trivial_action_passes() {
        let x = SimplicialSet::circle();
        let g = Arc::new(FiniteGroup::from_permutations(3, &[vec![1, 2, 0]]).unwrap());
        let act = CrossedAction::trivial(g, &x);
        assert!(check_crossed(&x, &act).passes());
        let m = equivariant_chain_action(&x, &act, Field::Rational).unwrap();
        assert!(m.iter().all(|per_g| per_g.iter().all(|mk| *mk == Matrix::identity(Field::Rational, mk.rows()))));
    }

    #[test]
    fn chain_complex_rejects_nonzero_square() {
        let f = Field::Rational;
        let d1 = Matrix::from_i64_rows(f, &[vec![1]]);
        let d2 = Matrix::from_i64_rows(f, &[vec![1]]);
        let err = ChainComplex::new(f, vec![1, 1, 1], vec![Matrix::zeros(f, 0, 1), d1, d2]).unwrap_err();
        assert_eq!(err, SimplicialError::NotAComplex(1));
    }
}
