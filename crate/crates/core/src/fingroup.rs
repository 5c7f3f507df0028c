//! Finite groups as multiplication tables, subgroups and cosets, and
//! (generalised) BN-pair data with Bruhat cells, parabolics and an axiom
//! checker.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cartan::{validate_cartan, CartanError, GeneralizedCartanMatrix};
use crate::coxeter::{CoxeterError, CoxeterSystem, WeylElement};

/// Orders above this are rejected; tables are dense.
pub const MAX_GROUP_ORDER: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("multiplication table is empty")]
    Empty,
    #[error("multiplication table is not square or has entries out of range (row {0})")]
    MalformedTable(usize),
    #[error("no two-sided identity in the table")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("associativity fails at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("group order exceeds {MAX_GROUP_ORDER}")]
    TooLarge,
    #[error("permutation generator {0} is not a permutation of 0..{1}")]
    BadPermutation(usize, usize),
    #[error("element {0} out of range")]
    ElementOutOfRange(usize),
    #[error("the given elements do not form a subgroup")]
    NotASubgroup,
    #[error("unsupported parameters GL_{n}(F_{q}); supported are (2,2), (2,3), (3,2)")]
    UnsupportedParameters { n: usize, q: u64 },
    #[error("element {0} lies in no Bruhat cell")]
    NotInBWB(usize),
    #[error("Bruhat cells overlap at element {0}")]
    CellsOverlap(usize),
    #[error("expected {expected} simple lifts, got {got}")]
    LiftCount { expected: usize, got: usize },
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
    identity: usize,
    labels: Option<Vec<String>>,
}

impl FiniteGroup {
    /// Validates a full multiplication table; associativity is checked
    /// exhaustively up to order 512 and on a fixed stride beyond.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::Empty);
        }
        if n > MAX_GROUP_ORDER {
            return Err(GroupError::TooLarge);
        }
        for (r, row) in table.iter().enumerate() {
            if row.len() != n || row.iter().any(|&x| x >= n) {
                return Err(GroupError::MalformedTable(r));
            }
        }
        let mul: Vec<usize> = table.into_iter().flatten().collect();
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| mul[e * n + x] == x && mul[x * n + e] == x))
            .ok_or(GroupError::NoIdentity)?;
        let mut inv = vec![0; n];
        for (x, slot) in inv.iter_mut().enumerate() {
            *slot = (0..n)
                .find(|&y| mul[x * n + y] == identity && mul[y * n + x] == identity)
                .ok_or(GroupError::NoInverse(x))?;
        }
        let step = if n <= 512 { 1 } else { n / 97 + 1 };
        for a in (0..n).step_by(step) {
            for b in 0..n {
                let ab = mul[a * n + b];
                for c in (0..n).step_by(step) {
                    if mul[ab * n + c] != mul[a * n + mul[b * n + c]] {
                        return Err(GroupError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            order: n,
            mul,
            inv,
            identity,
            labels: None,
        })
    }

    /// Closure of permutation generators; elements are numbered by the
    /// lexicographic order of their image arrays, so the identity is 0.
    pub fn from_permutations(degree: usize, gens: &[Vec<usize>]) -> Result<Self, GroupError> {
        for (k, g) in gens.iter().enumerate() {
            let mut seen = vec![false; degree];
            if g.len() != degree || g.iter().any(|&x| x >= degree || std::mem::replace(&mut seen[x], true)) {
                return Err(GroupError::BadPermutation(k, degree));
            }
        }
        let id: Vec<usize> = (0..degree).collect();
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(p) = queue.pop_front() {
            for g in gens {
                let q: Vec<usize> = p.iter().map(|&x| g[x]).collect();
                if found.insert(q.clone()) {
                    if found.len() > MAX_GROUP_ORDER {
                        return Err(GroupError::TooLarge);
                    }
                    queue.push_back(q);
                }
            }
        }
        let elements: Vec<Vec<usize>> = found.into_iter().collect();
        let index: HashMap<&[usize], usize> = elements
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_slice(), i))
            .collect();
        // (pq)(x) = p(q(x)): apply q first.
        let table: Vec<Vec<usize>> = elements
            .iter()
            .map(|p| {
                elements
                    .iter()
                    .map(|q| {
                        let pq: Vec<usize> = q.iter().map(|&x| p[x]).collect();
                        index[pq.as_slice()]
                    })
                    .collect()
            })
            .collect();
        let labels = elements.iter().map(|p| format!("{p:?}")).collect();
        Ok(Self::from_table(table)?.with_labels(labels))
    }

    /// The finite Weyl group of `sys`, numbered in ball order.
    pub fn from_coxeter(sys: &CoxeterSystem) -> Result<(Self, Vec<WeylElement>), GroupError> {
        let elements = sys.elements()?;
        if elements.len() > MAX_GROUP_ORDER {
            return Err(GroupError::TooLarge);
        }
        let index: HashMap<&WeylElement, usize> =
            elements.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let mut table = Vec::with_capacity(elements.len());
        for u in &elements {
            let mut row = Vec::with_capacity(elements.len());
            for v in &elements {
                row.push(index[&sys.multiply(u, v)?]);
            }
            table.push(row);
        }
        let labels = elements.iter().map(|w| w.to_string()).collect();
        Ok((Self::from_table(table)?.with_labels(labels), elements))
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.order);
        self.labels = Some(labels);
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn label(&self, a: usize) -> String {
        match &self.labels {
            Some(l) => l[a].clone(),
            None => format!("g{a}"),
        }
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.mul.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    /// g·x·g⁻¹.
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup::from_sorted(self.order, (0..self.order).collect())
    }

    pub fn trivial(&self) -> Subgroup {
        Subgroup::from_sorted(self.order, vec![self.identity])
    }

    /// Checks closure of `elements` and wraps them as a subgroup.
    pub fn subgroup(&self, elements: &[usize]) -> Result<Subgroup, GroupError> {
        if let Some(&x) = elements.iter().find(|&&x| x >= self.order) {
            return Err(GroupError::ElementOutOfRange(x));
        }
        let set: BTreeSet<usize> = elements.iter().copied().collect();
        let h = Subgroup::from_sorted(self.order, set.into_iter().collect());
        if self.is_subgroup(h.elements()) {
            Ok(h)
        } else {
            Err(GroupError::NotASubgroup)
        }
    }

    pub fn is_subgroup(&self, set: &[usize]) -> bool {
        let mut member = vec![false; self.order];
        for &x in set {
            member[x] = true;
        }
        member[self.identity]
            && set.iter().all(|&a| member[self.inv(a)])
            && set.iter().all(|&a| set.iter().all(|&b| member[self.mul(a, b)]))
    }

    pub fn generated(&self, gens: &[usize]) -> Subgroup {
        let mut member = vec![false; self.order];
        member[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !member[y] {
                    member[y] = true;
                    queue.push_back(y);
                }
            }
        }
        Subgroup::from_member(member)
    }

    pub fn conjugate(&self, h: &Subgroup, g: usize) -> Subgroup {
        let mut member = vec![false; self.order];
        for &x in h.elements() {
            member[self.conj(g, x)] = true;
        }
        Subgroup::from_member(member)
    }

    pub fn intersection(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        Subgroup::from_sorted(
            self.order,
            a.elements().iter().copied().filter(|&x| b.contains(x)).collect(),
        )
    }

    /// The set A·B, sorted.
    pub fn product_set(&self, a: &[usize], b: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.order];
        for &x in a {
            for &y in b {
                member[self.mul(x, y)] = true;
            }
        }
        (0..self.order).filter(|&x| member[x]).collect()
    }

    /// gH as a sorted set.
    pub fn left_coset(&self, g: usize, h: &Subgroup) -> Vec<usize> {
        let mut c: Vec<usize> = h.elements().iter().map(|&x| self.mul(g, x)).collect();
        c.sort_unstable();
        c
    }

    /// Left cosets gH, each sorted, listed by least element.
    pub fn left_cosets(&self, h: &Subgroup) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order];
        let mut out = Vec::new();
        for g in 0..self.order {
            if seen[g] {
                continue;
            }
            let c = self.left_coset(g, h);
            for &x in &c {
                seen[x] = true;
            }
            out.push(c);
        }
        out
    }

    /// H₁\G/H₂, each class sorted, listed by least element.
    pub fn double_cosets(&self, h1: &Subgroup, h2: &Subgroup) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order];
        let mut out = Vec::new();
        for g in 0..self.order {
            if seen[g] {
                continue;
            }
            let c = self.product_set(&self.product_set(h1.elements(), &[g]), h2.elements());
            for &x in &c {
                seen[x] = true;
            }
            out.push(c);
        }
        out
    }

    /// Order of the element.
    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }
}

/// A subgroup given by its sorted element list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    elements: Vec<usize>,
    member: Vec<bool>,
}

impl Subgroup {
    fn from_sorted(parent_order: usize, elements: Vec<usize>) -> Self {
        let mut member = vec![false; parent_order];
        for &x in &elements {
            member[x] = true;
        }
        Subgroup { elements, member }
    }

    fn from_member(member: Vec<bool>) -> Self {
        let elements = (0..member.len()).filter(|&x| member[x]).collect();
        Subgroup { elements, member }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.member.get(x).copied().unwrap_or(false)
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }
}

/// |H : K| for K ≤ H.
pub fn index(h: &Subgroup, k: &Subgroup) -> Result<Ratio<u64>, GroupError> {
    if !k.is_subset_of(h) {
        return Err(GroupError::NotASubgroup);
    }
    Ok(Ratio::new(h.order() as u64, k.order() as u64))
}

/// A group with (generalised) BN-pair data and its Bruhat decomposition.
#[derive(Debug, Clone)]
pub struct BnPairData {
    pub group: FiniteGroup,
    pub b: Subgroup,
    pub n: Subgroup,
    pub simple_lifts: Vec<usize>,
    pub weyl: CoxeterSystem,
    /// Lifts of the elements of Ω, identity first; a single entry means Ω = 1.
    pub omega_lifts: Vec<usize>,
    weyl_elements: Vec<WeylElement>,
    weyl_lifts: Vec<usize>,
    /// For each group element, the index of its Bruhat cell in `weyl_elements`
    /// when it lies in G₀ = BWB.
    cell_of: Vec<Option<usize>>,
    cells: Vec<Vec<usize>>,
}

impl BnPairData {
    /// Computes Bruhat cells BẇB for all w ∈ W; fails when they overlap.
    /// Elements outside BWB are allowed only when Ω is nontrivial.
    pub fn new(
        group: FiniteGroup,
        b: Subgroup,
        n: Subgroup,
        simple_lifts: Vec<usize>,
        weyl: CoxeterSystem,
        omega_lifts: Vec<usize>,
    ) -> Result<Self, GroupError> {
        if simple_lifts.len() != weyl.rank() {
            return Err(GroupError::LiftCount {
                expected: weyl.rank(),
                got: simple_lifts.len(),
            });
        }
        if let Some(&x) = simple_lifts
            .iter()
            .chain(&omega_lifts)
            .find(|&&x| x >= group.order())
        {
            return Err(GroupError::ElementOutOfRange(x));
        }
        let omega_lifts = if omega_lifts.is_empty() {
            vec![group.identity()]
        } else {
            omega_lifts
        };
        let weyl_elements = weyl.elements()?;
        let weyl_lifts: Vec<usize> = weyl_elements
            .iter()
            .map(|w| {
                w.word()
                    .iter()
                    .fold(group.identity(), |acc, &i| group.mul(acc, simple_lifts[i]))
            })
            .collect();
        let mut cell_of = vec![None; group.order()];
        let mut cells = Vec::with_capacity(weyl_elements.len());
        for (k, &lift) in weyl_lifts.iter().enumerate() {
            let cell = group.product_set(&group.product_set(b.elements(), &[lift]), b.elements());
            for &x in &cell {
                if cell_of[x].replace(k).is_some() {
                    return Err(GroupError::CellsOverlap(x));
                }
            }
            cells.push(cell);
        }
        if omega_lifts.len() == 1 {
            if let Some(x) = cell_of.iter().position(Option::is_none) {
                return Err(GroupError::NotInBWB(x));
            }
        }
        Ok(BnPairData {
            group,
            b,
            n,
            simple_lifts,
            weyl,
            omega_lifts,
            weyl_elements,
            weyl_lifts,
            cell_of,
            cells,
        })
    }

    pub fn omega_order(&self) -> usize {
        self.omega_lifts.len()
    }

    pub fn weyl_elements(&self) -> &[WeylElement] {
        &self.weyl_elements
    }

    /// ẇ: product of simple lifts along the canonical word of w.
    pub fn lift(&self, w: &WeylElement) -> Option<usize> {
        self.weyl_index(w).map(|k| self.weyl_lifts[k])
    }

    pub fn weyl_index(&self, w: &WeylElement) -> Option<usize> {
        self.weyl_elements.iter().position(|x| x == w)
    }

    /// BẇB, sorted.
    pub fn cell(&self, w: &WeylElement) -> Option<&[usize]> {
        self.weyl_index(w).map(|k| self.cells[k].as_slice())
    }

    pub fn cells(&self) -> impl Iterator<Item = (&WeylElement, &[usize])> {
        self.weyl_elements.iter().zip(self.cells.iter().map(Vec::as_slice))
    }

    /// The unique w with g ∈ BẇB.
    pub fn bruhat_class(&self, g: usize) -> Result<WeylElement, GroupError> {
        if g >= self.group.order() {
            return Err(GroupError::ElementOutOfRange(g));
        }
        self.cell_of[g]
            .map(|k| self.weyl_elements[k].clone())
            .ok_or(GroupError::NotInBWB(g))
    }

    /// P_J = ⋃_{w ∈ W_J} BẇB.
    pub fn parabolic(&self, j: &[usize]) -> Subgroup {
        let mut member = vec![false; self.group.order()];
        for (w, cell) in self.cells() {
            if w.in_parabolic(j) {
                for &x in cell {
                    member[x] = true;
                }
            }
        }
        let p = Subgroup::from_member(member);
        debug_assert!(self.group.is_subgroup(p.elements()));
        p
    }

    /// q_s = |B : B ∩ ṡBṡ⁻¹|.
    pub fn q_parameter(&self, s: usize) -> u64 {
        let conj = self.group.conjugate(&self.b, self.simple_lifts[s]);
        let meet = self.group.intersection(&self.b, &conj);
        (self.b.order() / meet.order()) as u64
    }

    fn coset_of_n(&self, x: usize, h: &Subgroup) -> Vec<usize> {
        self.group.left_coset(x, h)
    }

    /// Checks axioms (i)–(vi) together with the Bruhat partition.
    pub fn check_axioms(&self) -> BnAxiomReport {
        let g = &self.group;
        let mut failures = Vec::new();
        let bn_sub = g.is_subgroup(self.b.elements()) && g.is_subgroup(self.n.elements());
        let h = g.intersection(&self.b, &self.n);
        let h_normal = self
            .n
            .elements()
            .iter()
            .all(|&x| h.elements().iter().all(|&y| h.contains(g.conj(x, y))));
        let axiom_i = bn_sub && h_normal;
        if !axiom_i {
            failures.push("(i) B, N subgroups with B∩N normal in N".to_string());
        }

        // (ii): N/H = Ω ⋉ W, realised by the lifts ȧẇ hitting each coset of H in N once,
        // with the lifts of W closed under multiplication modulo H.
        let mut gen_lifts = Vec::new();
        for &a in &self.omega_lifts {
            for &w in &self.weyl_lifts {
                gen_lifts.push(g.mul(a, w));
            }
        }
        let in_n = gen_lifts.iter().all(|&x| self.n.contains(x));
        let cosets: BTreeSet<Vec<usize>> =
            gen_lifts.iter().map(|&x| self.coset_of_n(x, &h)).collect();
        let quotient_ok = in_n
            && cosets.len() == gen_lifts.len()
            && self.n.order() == h.order() * gen_lifts.len();
        let w_coset: BTreeSet<Vec<usize>> = self
            .weyl_lifts
            .iter()
            .map(|&x| self.coset_of_n(x, &h))
            .collect();
        let w_closed = self.weyl_lifts.iter().all(|&x| {
            self.weyl_lifts
                .iter()
                .all(|&y| w_coset.contains(&self.coset_of_n(g.mul(x, y), &h)))
        });
        let w_normal = self.n.elements().iter().all(|&x| {
            self.weyl_lifts
                .iter()
                .all(|&y| w_coset.contains(&self.coset_of_n(g.conj(x, y), &h)))
        });
        let axiom_ii = quotient_ok && w_closed && w_normal;
        if !axiom_ii {
            failures.push("(ii) N/H = Ω ⋉ W".to_string());
        }

        // (iii.1) ṫBṡ ⊆ BṫṡB ∪ BṫB for t ∈ Ω⋉W, s ∈ S.
        let double = |x: usize| g.product_set(&g.product_set(self.b.elements(), &[x]), self.b.elements());
        let mut axiom_iii1 = true;
        'outer: for &t in &gen_lifts {
            let bt = double(t);
            for &s in &self.simple_lifts {
                let lhs = g.product_set(&g.product_set(&[t], self.b.elements()), &[s]);
                let bts = double(g.mul(t, s));
                if lhs.iter().any(|x| bt.binary_search(x).is_err() && bts.binary_search(x).is_err()) {
                    axiom_iii1 = false;
                    failures.push(format!("(iii.1) fails for t = {}, s = {}", g.label(t), g.label(s)));
                    break 'outer;
                }
            }
        }
        let axiom_iii2 = self.simple_lifts.iter().all(|&s| {
            h.contains(g.mul(s, s)) && g.conjugate(&self.b, s) != self.b
        });
        if !axiom_iii2 {
            failures.push("(iii.2) s² = 1 in W and ṡBṡ⁻¹ ≠ B".to_string());
        }
        let simple_cosets: Vec<Vec<usize>> = self
            .simple_lifts
            .iter()
            .map(|&s| self.coset_of_n(s, &h))
            .collect();
        let axiom_iv = self.omega_lifts.iter().all(|&a| {
            self.simple_lifts
                .iter()
                .all(|&s| simple_cosets.contains(&self.coset_of_n(g.conj(a, s), &h)))
        });
        if !axiom_iv {
            failures.push("(iv) Ω normalises S".to_string());
        }
        let axiom_v = self.omega_lifts.iter().enumerate().all(|(k, &a)| {
            g.conjugate(&self.b, a) == self.b && (k == 0 || !self.b.contains(a))
        });
        if !axiom_v {
            failures.push("(v) Ω normalises B and acts freely".to_string());
        }
        let mut gens: Vec<usize> = self.b.elements().to_vec();
        gens.extend_from_slice(self.n.elements());
        let axiom_vi = g.generated(&gens).order() == g.order();
        if !axiom_vi {
            failures.push("(vi) B and N generate G".to_string());
        }
        let cell_total: usize = self.cells.iter().map(Vec::len).sum();
        let g0 = self.cell_of.iter().filter(|c| c.is_some()).count();
        let bruhat_partition = cell_total == g0 && g0 * self.omega_order() == g.order();
        if !bruhat_partition {
            failures.push("Bruhat cells do not partition G₀ = BWB".to_string());
        }
        BnAxiomReport {
            axiom_i,
            axiom_ii,
            axiom_iii1,
            axiom_iii2,
            axiom_iv,
            axiom_v,
            axiom_vi,
            bruhat_partition,
            cell_sizes: self.cells.iter().map(Vec::len).collect(),
            failures,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BnAxiomReport {
    pub axiom_i: bool,
    pub axiom_ii: bool,
    pub axiom_iii1: bool,
    pub axiom_iii2: bool,
    pub axiom_iv: bool,
    pub axiom_v: bool,
    pub axiom_vi: bool,
    pub bruhat_partition: bool,
    pub cell_sizes: Vec<usize>,
    pub failures: Vec<String>,
}

impl BnAxiomReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }
}

fn encode(m: &[u64], q: u64) -> usize {
    m.iter().rev().fold(0u64, |acc, &x| acc * q + x) as usize
}

fn det_mod(m: &[u64], n: usize, q: u64) -> u64 {
    let at = |r: usize, c: usize| m[r * n + c] as i64;
    let d = match n {
        2 => at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0),
        3 => {
            at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1))
                - at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0))
                + at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0))
        }
        _ => unreachable!(),
    };
    d.rem_euclid(q as i64) as u64
}

/// GL_n(F_q) with B upper triangular, N monomial, and the permutation
/// matrices of adjacent transpositions as simple lifts. Elements are
/// numbered by the base-q code of their row-major entries.
pub fn gl_n_fq(n: usize, q: u64) -> Result<BnPairData, GroupError> {
    if !matches!((n, q), (2, 2) | (2, 3) | (3, 2)) {
        return Err(GroupError::UnsupportedParameters { n, q });
    }
    let cells = n * n;
    let total = (q as usize).pow(cells as u32);
    let mut elements: Vec<Vec<u64>> = Vec::new();
    for code in 0..total {
        let mut c = code as u64;
        let m: Vec<u64> = (0..cells)
            .map(|_| {
                let d = c % q;
                c /= q;
                d
            })
            .collect();
        if det_mod(&m, n, q) != 0 {
            elements.push(m);
        }
    }
    let mut index = vec![usize::MAX; total];
    for (i, m) in elements.iter().enumerate() {
        index[encode(m, q)] = i;
    }
    let product = |a: &[u64], b: &[u64]| -> Vec<u64> {
        let mut out = vec![0; cells];
        for r in 0..n {
            for c in 0..n {
                out[r * n + c] = (0..n).map(|k| a[r * n + k] * b[k * n + c]).sum::<u64>() % q;
            }
        }
        out
    };
    let table: Vec<Vec<usize>> = elements
        .iter()
        .map(|a| elements.iter().map(|b| index[encode(&product(a, b), q)]).collect())
        .collect();
    let labels = elements
        .iter()
        .map(|m| {
            let rows: Vec<String> = m
                .chunks(n)
                .map(|r| format!("[{}]", r.iter().map(u64::to_string).collect::<Vec<_>>().join(",")))
                .collect();
            format!("[{}]", rows.join(","))
        })
        .collect();
    let group = FiniteGroup::from_table(table)?.with_labels(labels);
    let upper: Vec<usize> = (0..elements.len())
        .filter(|&i| (0..n).all(|r| (0..r).all(|c| elements[i][r * n + c] == 0)))
        .collect();
    let monomial: Vec<usize> = (0..elements.len())
        .filter(|&i| {
            elements[i]
                .chunks(n)
                .all(|row| row.iter().filter(|&&x| x != 0).count() == 1)
        })
        .collect();
    let lifts: Vec<usize> = (0..n - 1)
        .map(|s| {
            let mut m = vec![0u64; cells];
            for r in 0..n {
                let c = if r == s {
                    s + 1
                } else if r == s + 1 {
                    s
                } else {
                    r
                };
                m[r * n + c] = 1;
            }
            index[encode(&m, q)]
        })
        .collect();
    let b = group.subgroup(&upper)?;
    let nn = group.subgroup(&monomial)?;
    let weyl = CoxeterSystem::new(GeneralizedCartanMatrix::type_a(n - 1));
    BnPairData::new(group, b, nn, lifts, weyl, Vec::new())
}

/// JSON group specification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupSpec {
    Gl { n: usize, q: u64 },
    Table { mul: Vec<Vec<usize>> },
    Perm { degree: usize, gens: Vec<Vec<usize>> },
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroup, GroupError> {
        match self {
            GroupSpec::Gl { n, q } => Ok(gl_n_fq(*n, *q)?.group),
            GroupSpec::Table { mul } => FiniteGroup::from_table(mul.clone()),
            GroupSpec::Perm { degree, gens } => FiniteGroup::from_permutations(*degree, gens),
        }
    }
}

/// JSON specification of user-supplied BN-pair data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BnSpec {
    pub group: GroupSpec,
    pub b: Vec<usize>,
    pub n: Vec<usize>,
    pub simple_lifts: Vec<usize>,
    pub cartan: Vec<Vec<i64>>,
    #[serde(default)]
    pub omega_lifts: Vec<usize>,
}

impl BnSpec {
    pub fn build(&self) -> Result<BnPairData, GroupError> {
        if let GroupSpec::Gl { n, q } = self.group {
            if self.b.is_empty() && self.n.is_empty() {
                return gl_n_fq(n, q);
            }
        }
        let group = self.group.build()?;
        let b = group.subgroup(&self.b)?;
        let n = group.subgroup(&self.n)?;
        let weyl = CoxeterSystem::new(validate_cartan(self.cartan.clone())?);
        BnPairData::new(group, b, n, self.simple_lifts.clone(), weyl, self.omega_lifts.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> FiniteGroup {
        FiniteGroup::from_permutations(3, &[vec![1, 0, 2], vec![1, 2, 0]]).unwrap()
    }

    #[test]
    fn permutation_closure_order() {
        let g = s3();
        assert_eq!(g.order(), 6);
        assert_eq!(g.identity(), 0);
        assert_eq!(g.label(3), "[1, 2, 0]");
        let a3 = g.subgroup(&[0, 3, 4]).unwrap();
        assert_eq!(a3.order(), 3);
        assert_eq!(g.subgroup(&[0, 1, 2]), Err(GroupError::NotASubgroup));
    }

    #[test]
    fn table_validation() {
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![1, 0]]).is_ok());
        assert_eq!(
            FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]]),
            Err(GroupError::NoInverse(1))
        );
        assert_eq!(
            FiniteGroup::from_table(vec![vec![0, 2], vec![1, 0]]),
            Err(GroupError::MalformedTable(0))
        );
    }

    #[test]
    fn gl_orders() {
        for (n, q, order, borel) in [(2, 2, 6, 2), (2, 3, 48, 12), (3, 2, 168, 8)] {
            let bn = gl_n_fq(n, q).unwrap();
            assert_eq!(bn.group.order(), order);
            assert_eq!(bn.b.order(), borel);
        }
        assert_eq!(
            gl_n_fq(3, 3).unwrap_err(),
            GroupError::UnsupportedParameters { n: 3, q: 3 }
        );
    }

    #[test]
    fn bruhat_classes_in_gl2f2() {
        let bn = gl_n_fq(2, 2).unwrap();
        let g = &bn.group;
        assert!(bn.bruhat_class(g.identity()).unwrap().is_identity());
        let s = bn.simple_lifts[0];
        assert_eq!(g.label(s), "[[0,1],[1,0]]");
        assert_eq!(bn.bruhat_class(s).unwrap().word(), &[0]);
        assert_eq!(index(&g.whole(), &bn.b).unwrap(), Ratio::from_integer(3));
        assert_eq!(bn.q_parameter(0), 2);
        let mut sizes: Vec<usize> = g.double_cosets(&bn.b, &bn.b).iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 4]);
    }

    #[test]
    fn parabolics() {
        let bn = gl_n_fq(2, 2).unwrap();
        assert_eq!(bn.parabolic(&[]), bn.b);
        assert_eq!(bn.parabolic(&[0]).order(), 6);
        let bn3 = gl_n_fq(3, 2).unwrap();
        assert_eq!(bn3.parabolic(&[0]).order(), 24);
        assert_eq!(bn3.parabolic(&[0, 1]).order(), 168);
    }

    #[test]
    fn axioms_hold_for_gl() {
        for (n, q) in [(2, 2), (2, 3), (3, 2)] {
            let report = gl_n_fq(n, q).unwrap().check_axioms();
            assert!(report.all_pass(), "{n},{q}: {:?}", report.failures);
            let total: usize = report.cell_sizes.iter().sum();
            assert_eq!(total, gl_n_fq(n, q).unwrap().group.order());
        }
    }

    #[test]
    fn wrong_borel_is_detected() {
        let bn = gl_n_fq(2, 3).unwrap();
        // The diagonal torus is not a Borel subgroup: cells no longer cover G.
        let torus: Vec<usize> = bn
            .b
            .elements()
            .iter()
            .copied()
            .filter(|&x| bn.n.contains(x))
            .collect();
        let t = bn.group.subgroup(&torus).unwrap();
        let err = BnPairData::new(
            bn.group.clone(),
            t,
            bn.n.clone(),
            bn.simple_lifts.clone(),
            bn.weyl.clone(),
            Vec::new(),
        )
        .unwrap_err();
        assert!(matches!(err, GroupError::NotInBWB(_)));
    }

    #[test]
    fn index_requires_containment() {
        let g = s3();
        let a = g.subgroup(&[0, 1]).unwrap();
        let b = g.subgroup(&[0, 2]).unwrap();
        assert_eq!(index(&a, &b), Err(GroupError::NotASubgroup));
        assert_eq!(index(&g.whole(), &a).unwrap(), Ratio::from_integer(3));
    }

    #[test]
    fn nontrivial_omega_from_direct_product() {
        // Ω × G with generalised BN-pair (B, Ω × N), Ω = C_2.
        let bn = gl_n_fq(2, 2).unwrap();
        let g = &bn.group;
        let m = g.order();
        let table: Vec<Vec<usize>> = (0..2 * m)
            .map(|x| {
                (0..2 * m)
                    .map(|y| ((x / m + y / m) % 2) * m + g.mul(x % m, y % m))
                    .collect()
            })
            .collect();
        let big = FiniteGroup::from_table(table).unwrap();
        let b = big.subgroup(bn.b.elements()).unwrap();
        let n_elems: Vec<usize> = bn.n.elements().iter().flat_map(|&x| [x, m + x]).collect();
        let n = big.subgroup(&n_elems).unwrap();
        let e = g.identity();
        let data = BnPairData::new(big, b, n, bn.simple_lifts.clone(), bn.weyl.clone(), vec![e, m + e]).unwrap();
        assert_eq!(data.omega_order(), 2);
        let report = data.check_axioms();
        assert!(report.all_pass(), "{:?}", report.failures);
        assert_eq!(data.bruhat_class(m + e), Err(GroupError::NotInBWB(m + e)));

        // Dropping Ω from N breaks (ii).
        let data = BnPairData::new(
            data.group.clone(),
            data.b.clone(),
            data.n.clone(),
            data.simple_lifts.clone(),
            data.weyl.clone(),
            vec![e, e],
        )
        .unwrap();
        assert!(!data.check_axioms().all_pass());
    }

    #[test]
    fn weyl_group_table() {
        let sys = CoxeterSystem::new(GeneralizedCartanMatrix::type_a(2));
        let (w, elements) = FiniteGroup::from_coxeter(&sys).unwrap();
        assert_eq!(w.order(), 6);
        assert!(elements[w.identity()].is_identity());
    }
}
