//! Scenario files: what to run, with which inputs and budgets.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::RunError;
use crate::cosheaf::{
    build_exquisite, matrix_from_repr, CosheafError, CosheafKind, GModule, ScalarRepr, SubgroupSystem,
};
use crate::field::Field;
use crate::fingroup::{FiniteGroup, GroupSpec, Subgroup};
use crate::simplicial::{check_crossed, CrossedAction, Perm, SimplicialError, SimplicialSet, SimplicialSetSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Spherical,
    WeylBall,
    Davis,
    ResolutionCheck,
    HeckeMul,
    Involution,
    SphericalHecke,
    CosheafHomology,
    TreeResolution,
    VerifyIdempotents,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Spherical => "spherical",
            ScenarioKind::WeylBall => "weyl-ball",
            ScenarioKind::Davis => "davis",
            ScenarioKind::ResolutionCheck => "resolution-check",
            ScenarioKind::HeckeMul => "hecke-mul",
            ScenarioKind::Involution => "involution",
            ScenarioKind::SphericalHecke => "spherical-hecke",
            ScenarioKind::CosheafHomology => "cosheaf-homology",
            ScenarioKind::TreeResolution => "tree-resolution",
            ScenarioKind::VerifyIdempotents => "verify-idempotents",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvolutionKind {
    Im,
    Antipode,
    SigmaIm,
}

/// Environment variable overriding the default element cap.
pub const ELEMENT_CAP_ENV: &str = "DAVIS_KIT_ELEMENT_CAP";
pub const DEFAULT_MAX_SIMPLICES: usize = 20_000;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_simplices: Option<usize>,
}

impl Budgets {
    pub fn element_cap(&self) -> Option<usize> {
        self.element_cap
            .or_else(|| std::env::var(ELEMENT_CAP_ENV).ok().and_then(|v| v.parse().ok()))
    }

    pub fn max_simplices(&self) -> usize {
        self.max_simplices.unwrap_or(DEFAULT_MAX_SIMPLICES)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.element_cap == Some(0) || self.max_simplices == Some(0) {
            return Err("budgets must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cartan: Option<Vec<Vec<i64>>>,
    /// `gl:n,q`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[serde(default)]
    pub characteristic: u64,
    #[serde(default)]
    pub homology: bool,
    #[serde(default)]
    pub resolution_check: bool,
    #[serde(default)]
    pub verify_iso: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution: Option<InvolutionKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cosheaf: Option<CosheafScenario>,
    #[serde(default)]
    pub budgets: Budgets,
}

impl Scenario {
    pub fn new(kind: ScenarioKind) -> Self {
        Scenario {
            kind,
            cartan: None,
            group: None,
            radius: None,
            characteristic: 0,
            homology: false,
            resolution_check: false,
            verify_iso: false,
            a: None,
            b: None,
            word: None,
            involution: None,
            cosheaf: None,
            budgets: Budgets::default(),
        }
    }
}

/// Parses `gl:n,q`.
pub fn parse_gl(text: &str) -> Result<(usize, u64), String> {
    let rest = text
        .strip_prefix("gl:")
        .ok_or_else(|| format!("group {text:?}: expected gl:n,q"))?;
    let (n, q) = rest
        .split_once(',')
        .ok_or_else(|| format!("group {text:?}: expected gl:n,q"))?;
    let n = n.trim().parse().map_err(|_| format!("group {text:?}: bad n"))?;
    let q = q.trim().parse().map_err(|_| format!("group {text:?}: bad q"))?;
    Ok((n, q))
}

/// Parses `0,1,0`; the empty string is the empty word.
pub fn parse_word(text: &str) -> Result<Vec<usize>, String> {
    let text = text.trim();
    if text.is_empty() || text == "e" {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|p| p.trim().parse().map_err(|_| format!("word {text:?}: bad letter {p:?}")))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexSpec {
    /// Ordered vertex lists per dimension.
    Ordered { simplices: Vec<Vec<Vec<usize>>> },
    Set(SimplicialSetSpec),
}

/// Generators with either vertex permutations (ordered complexes) or full
/// maps `maps[n][generator][simplex] = [image, R]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSpec {
    pub generators: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_maps: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maps: Option<Vec<Vec<Vec<(usize, Perm)>>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SystemSpec {
    /// 𝒢_x = product of the vertex groups.
    Exquisite { vertex_subgroups: Vec<Vec<usize>> },
    /// One subgroup per nondegenerate simplex, by dimension.
    Explicit { subgroups: Vec<Vec<Vec<usize>>> },
    Constant { subgroup: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModuleSpec {
    Trivial,
    Regular,
    Character { values: Vec<i64> },
    Matrices {
        generators: Vec<usize>,
        matrices: Vec<Vec<Vec<ScalarRepr>>>,
    },
    Sum { parts: Vec<ModuleSpec> },
}

fn default_cosheaf_kind() -> CosheafKind {
    CosheafKind::Invariants
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosheafScenario {
    pub group: GroupSpec,
    pub complex: ComplexSpec,
    pub action: ActionSpec,
    pub system: SystemSpec,
    pub module: ModuleSpec,
    #[serde(default = "default_cosheaf_kind")]
    pub cosheaf: CosheafKind,
    #[serde(default)]
    pub field: u64,
    /// Normalising subgroup of the Haar measure; {e} when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<usize>>,
}

/// The objects a cosheaf scenario describes.
pub struct BuiltCosheaf {
    pub group: Arc<FiniteGroup>,
    pub field: Field,
    pub complex: SimplicialSet,
    pub action: CrossedAction,
    pub system: SubgroupSystem,
    pub module: GModule,
    pub kind: CosheafKind,
    pub k: Subgroup,
}

fn subgroup(g: &FiniteGroup, elems: &[usize]) -> Result<Subgroup, CosheafError> {
    Ok(g.subgroup(elems)?)
}

fn build_module(spec: &ModuleSpec, g: &Arc<FiniteGroup>, field: Field) -> Result<GModule, CosheafError> {
    match spec {
        ModuleSpec::Trivial => Ok(GModule::trivial(g.clone(), field)),
        ModuleSpec::Regular => Ok(GModule::regular(g.clone(), field)),
        ModuleSpec::Character { values } => GModule::character(g.clone(), field, values),
        ModuleSpec::Matrices { generators, matrices } => {
            let mats = matrices
                .iter()
                .map(|m| matrix_from_repr(field, m))
                .collect::<Result<Vec<_>, _>>()?;
            GModule::from_generators(g.clone(), field, generators, mats)
        }
        ModuleSpec::Sum { parts } => {
            let mut it = parts.iter();
            let first = it
                .next()
                .ok_or_else(|| CosheafError::ModuleShape("empty direct sum".into()))?;
            let mut acc = build_module(first, g, field)?;
            for p in it {
                acc = acc.direct_sum(&build_module(p, g, field)?);
            }
            Ok(acc)
        }
    }
}

/// Extends vertex permutations of the generators to the whole group.
fn vertex_action_table(g: &FiniteGroup, gens: &[usize], maps: &[Vec<usize>], nv: usize) -> Result<Vec<Vec<usize>>, SimplicialError> {
    if gens.len() != maps.len() || maps.iter().any(|m| m.len() != nv || m.iter().any(|&v| v >= nv)) {
        return Err(SimplicialError::ActionShape("one vertex map of full length per generator".into()));
    }
    if let Some(&bad) = gens.iter().find(|&&s| s >= g.order()) {
        return Err(SimplicialError::ActionShape(format!("generator {bad} out of range")));
    }
    let mut table: Vec<Option<Vec<usize>>> = vec![None; g.order()];
    table[g.identity()] = Some((0..nv).collect());
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(a) = queue.pop_front() {
        let ta = table[a].clone().unwrap();
        for (&s, m) in gens.iter().zip(maps) {
            let h = g.mul(a, s);
            let row: Vec<usize> = (0..nv).map(|v| ta[m[v]]).collect();
            match &table[h] {
                Some(existing) if *existing != row => {
                    return Err(SimplicialError::NotAnAction(format!("element {h} has two vertex maps")))
                }
                Some(_) => {}
                None => {
                    table[h] = Some(row);
                    queue.push_back(h);
                }
            }
        }
    }
    if table.iter().any(Option::is_none) {
        return Err(SimplicialError::NotAnAction("generators do not generate the group".into()));
    }
    Ok(table.into_iter().map(Option::unwrap).collect())
}

impl CosheafScenario {
    pub fn build(&self, max_simplices: usize) -> Result<BuiltCosheaf, RunError> {
        let field = Field::from_characteristic(self.field)?;
        let group = Arc::new(self.group.build()?);
        let complex = match &self.complex {
            ComplexSpec::Ordered { simplices } => SimplicialSet::from_ordered_simplices(simplices.clone())?,
            ComplexSpec::Set(spec) => SimplicialSet::from_spec(spec)?,
        };
        let total: usize = complex.counts().iter().sum();
        if total > max_simplices {
            return Err(RunError::BudgetExceeded(format!(
                "{total} simplices exceed the budget of {max_simplices}"
            )));
        }
        let action = match (&self.action.vertex_maps, &self.action.maps) {
            (Some(vm), None) => {
                let table = vertex_action_table(&group, &self.action.generators, vm, complex.count(0))?;
                CrossedAction::from_vertex_action(group.clone(), &complex, |a, v| table[a][v])?
            }
            (None, Some(maps)) => CrossedAction::from_generators(group.clone(), &complex, &self.action.generators, maps.clone())?,
            _ => {
                return Err(RunError::Input("give exactly one of vertex_maps and maps".into()))
            }
        };
        let crossed = check_crossed(&complex, &action);
        if !crossed.passes() {
            return Err(SimplicialError::CrossedConditionViolated(crossed.violations.len()).into());
        }
        let system = match &self.system {
            SystemSpec::Exquisite { vertex_subgroups } => {
                let groups = vertex_subgroups
                    .iter()
                    .map(|s| subgroup(&group, s))
                    .collect::<Result<Vec<_>, _>>()?;
                build_exquisite(&complex, &action, groups)?
            }
            SystemSpec::Explicit { subgroups } => {
                let groups = subgroups
                    .iter()
                    .map(|layer| layer.iter().map(|s| subgroup(&group, s)).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?;
                SubgroupSystem::new(&complex, &action, groups)?
            }
            SystemSpec::Constant { subgroup: s } => {
                SubgroupSystem::constant(&complex, &action, &subgroup(&group, s)?)?
            }
        };
        let module = build_module(&self.module, &group, field)?;
        let k = match &self.k {
            Some(elems) => subgroup(&group, elems)?,
            None => group.trivial(),
        };
        Ok(BuiltCosheaf {
            group,
            field,
            complex,
            action,
            system,
            module,
            kind: self.cosheaf,
            k,
        })
    }
}

/// The S_3 star tree with A_3 everywhere and V = trivial ⊕ sign.
pub fn s3_star_scenario() -> CosheafScenario {
    CosheafScenario {
        group: GroupSpec::Perm {
            degree: 3,
            gens: vec![vec![1, 0, 2], vec![1, 2, 0]],
        },
        complex: ComplexSpec::Ordered {
            simplices: vec![vec![vec![0], vec![1], vec![2], vec![3]], vec![vec![0, 1], vec![0, 2], vec![0, 3]]],
        },
        action: ActionSpec {
            generators: vec![2, 3],
            vertex_maps: Some(vec![vec![0, 2, 1, 3], vec![0, 2, 3, 1]]),
            maps: None,
        },
        system: SystemSpec::Exquisite {
            vertex_subgroups: vec![vec![0, 3, 4]; 4],
        },
        module: ModuleSpec::Sum {
            parts: vec![
                ModuleSpec::Trivial,
                ModuleSpec::Character {
                    values: vec![1, -1, -1, 1, 1, -1],
                },
            ],
        },
        cosheaf: CosheafKind::Invariants,
        field: 0,
        k: None,
    }
}
