//! Batch front end: scenarios in, reports out.
//!
//! Exit codes: 0 when every verdict passes, 1 on a mathematical failure,
//! 2 on input errors or exceeded budgets.

pub mod report;
pub mod scenario;

use std::path::Path;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::cartan::{spherical_subsets, validate_cartan, CartanError};
use crate::cosheaf::{
    cosheaf_chain_complex, schneider_stuhler_check, verify_idempotent_identities, CosheafError, CosheafKind,
    EquivariantCosheaf,
};
use crate::coxeter::{CoxeterError, CoxeterSystem};
use crate::davis::{
    check_stabilizers, davis_building_group, davis_poset_coxeter, order_complex, resolution_check, DavisError,
};
use crate::field::{Field, FieldError};
use crate::fingroup::{gl_n_fq, GroupError};
use crate::hecke::{iso_check, spherical_hecke, word_string, HeckeAlgebra, HeckeError};
use crate::measure::{MeasureContext, MeasureError};
use crate::simplicial::{check_crossed, SimplicialError};

pub use report::{digest, Report, Table, Verdict};
pub use scenario::{
    parse_gl, parse_word, CosheafScenario, InvolutionKind, Scenario, ScenarioKind, ELEMENT_CAP_ENV,
};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("input error: {0}")]
    Input(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
    #[error(transparent)]
    Davis(#[from] DavisError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Cosheaf(#[from] CosheafError),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

fn coxeter_system(sc: &Scenario) -> Result<CoxeterSystem, RunError> {
    let rows = sc
        .cartan
        .clone()
        .ok_or_else(|| RunError::Input("a Cartan matrix is required".into()))?;
    let mut sys = CoxeterSystem::new(validate_cartan(rows)?);
    if let Some(cap) = sc.budgets.element_cap() {
        sys = sys.with_element_cap(cap);
    }
    Ok(sys)
}

fn field_of(sc: &Scenario) -> Result<Field, RunError> {
    Ok(Field::from_characteristic(sc.characteristic)?)
}

fn budget(count: usize, cap: usize, what: &str) -> Result<(), RunError> {
    if count > cap {
        Err(RunError::BudgetExceeded(format!("{count} {what} exceed the budget of {cap}")))
    } else {
        Ok(())
    }
}

fn homology_lines(report: &mut Report, homology: &[usize]) {
    for (k, b) in homology.iter().enumerate() {
        report.line(format!("H_{k} = {b}"));
    }
}

/// Runs a scenario. The digest covers the canonical JSON of the scenario.
pub fn run(sc: &Scenario) -> Result<Report, RunError> {
    sc.budgets.validate().map_err(RunError::Input)?;
    let canonical = serde_json::to_vec(sc).expect("scenario serializes");
    let mut report = Report::new(sc.kind.name(), digest(&canonical));
    match sc.kind {
        ScenarioKind::Spherical => run_spherical(sc, &mut report)?,
        ScenarioKind::WeylBall => run_weyl_ball(sc, &mut report)?,
        ScenarioKind::Davis | ScenarioKind::ResolutionCheck => run_davis(sc, &mut report)?,
        ScenarioKind::HeckeMul => run_hecke_mul(sc, &mut report)?,
        ScenarioKind::Involution => run_involution(sc, &mut report)?,
        ScenarioKind::SphericalHecke => run_spherical_hecke(sc, &mut report)?,
        ScenarioKind::CosheafHomology | ScenarioKind::TreeResolution | ScenarioKind::VerifyIdempotents => {
            run_cosheaf(sc, &mut report)?
        }
    }
    Ok(report)
}

fn run_spherical(sc: &Scenario, report: &mut Report) -> Result<(), RunError> {
    let rows = sc
        .cartan
        .clone()
        .ok_or_else(|| RunError::Input("a Cartan matrix is required".into()))?;
    let a = validate_cartan(rows)?;
    let r = spherical_subsets(&a);
    report.line(format!("f = {}", r.f_value));
    report.line(format!("{} spherical subsets", r.subsets.len()));
    report.fact("f_value", r.f_value).fact("count", r.subsets.len()).fact("subsets", &r.subsets);
    Ok(())
}

fn run_weyl_ball(sc: &Scenario, report: &mut Report) -> Result<(), RunError> {
    let sys = coxeter_system(sc)?;
    let finite = sys.is_finite();
    let elements = match sc.radius {
        Some(r) => sys.ball(r)?,
        None => sys.elements()?,
    };
    let max_len = elements.iter().map(|w| w.length()).max().unwrap_or(0);
    let mut by_length = vec![0usize; max_len + 1];
    for w in &elements {
        by_length[w.length()] += 1;
    }
    report.line(format!("{} elements", elements.len()));
    report
        .fact("finite", finite)
        .fact("count", elements.len())
        .fact("radius", sc.radius)
        .fact("by_length", &by_length)
        .fact("words", elements.iter().map(|w| w.word().to_vec()).collect::<Vec<_>>());
    Ok(())
}

fn run_davis(sc: &Scenario, report: &mut Report) -> Result<(), RunError> {
    let field = field_of(sc)?;
    let cap = sc.budgets.max_simplices();
    let poset = match &sc.group {
        Some(g) => {
            let (n, q) = parse_gl(g).map_err(RunError::Input)?;
            let bn = gl_n_fq(n, q)?;
            report.fact("group", g);
            davis_building_group(&bn)
        }
        None => davis_poset_coxeter(&coxeter_system(sc)?, sc.radius)?,
    };
    budget(poset.len(), cap, "poset elements")?;
    let complex = order_complex(&poset)?;
    let set = &complex.set;
    budget(set.counts().iter().sum(), cap, "simplices")?;
    let dimension = set.top_dim();
    report.line(format!("dimension = {dimension}, f = {}", poset.f_value()));
    report
        .fact("provenance", poset.provenance())
        .fact("nodes", poset.len())
        .fact("truncation", poset.truncation())
        .fact("f_value", poset.f_value())
        .fact("dimension", dimension)
        .fact("simplex_counts", set.counts());
    report.tables.push(Table {
        name: "nodes by subset".into(),
        columns: vec!["J".into(), "count".into()],
        rows: poset
            .counts_by_subset()
            .into_iter()
            .map(|(j, c)| vec![format!("{j:?}"), c.to_string()])
            .collect(),
    });
    if poset.truncation().is_none() {
        report.require(dimension == poset.f_value(), "dimension equals f");
    }
    if let Some(action) = &complex.action {
        let crossed = check_crossed(set, action);
        report.fact("crossed_conditions", crossed.passes());
        report.require(crossed.passes(), "crossed simplicial conditions");
        if sc.group.is_some() {
            let stab = check_stabilizers(&poset, &complex)?;
            report.fact("stabilizer_chains_checked", stab.chains_checked);
            for m in &stab.mismatches {
                report.witness(m);
            }
            report.require(stab.passes(), "stabilizers are parabolic intersections");
        }
    }
    if sc.homology {
        let h = set.chain_complex(field).homology();
        homology_lines(report, &h);
        report.fact("homology", &h);
    }
    if sc.resolution_check || sc.kind == ScenarioKind::ResolutionCheck {
        let r = resolution_check(set, complex.action.as_ref(), field, poset.truncation().is_some());
        report.line(format!("dims = {:?}, ranks = {:?}", r.dims, r.ranks));
        report.line(format!("exact = {}", r.exact));
        report.require(r.exact, "resolution exactness");
        report.fact("resolution", &r);
    }
    Ok(())
}

fn run_hecke_mul(sc: &Scenario, report: &mut Report) -> Result<(), RunError> {
    let h = HeckeAlgebra::new(coxeter_system(sc)?);
    let a = sc.a.clone().ok_or_else(|| RunError::Input("--a is required".into()))?;
    let b = sc.b.clone().ok_or_else(|| RunError::Input("--b is required".into()))?;
    let product = h.basis_word(&a)?.mul(&h.basis_word(&b)?)?;
    report.line(product.to_string());
    hecke_terms(report, &product);
    report.fact("variables", h.variable_names()).fact("classes", h.classes());
    Ok(())
}

fn hecke_terms(report: &mut Report, x: &crate::hecke::HeckeElement) {
    let names = x.algebra().variable_names().to_vec();
    report.tables.push(Table {
        name: "terms".into(),
        columns: vec!["w".into(), "coefficient".into()],
        rows: x
            .terms()
            .iter()
            .rev()
            .map(|(w, p)| vec![word_string(w.word()), p.render(&names)])
            .collect(),
    });
    report.fact("element", x.to_string());
}

fn run_involution(sc: &Scenario, report: &mut Report) -> Result<(), RunError> {
    let h = HeckeAlgebra::new(coxeter_system(sc)?);
    let kind = sc.involution.ok_or_else(|| RunError::Input("--kind is required".into()))?;
    let word = sc.word.clone().ok_or_else(|| RunError::Input("--word is required".into()))?;
    let x = h.basis_word(&word)?;
    let apply = |y: &crate::hecke::HeckeElement| match kind {
        InvolutionKind::Im => y.iota_im(),
        InvolutionKind::Antipode => y.antipode(),
        InvolutionKind::SigmaIm => y.sigma_im(),
    };
    let image = apply(&x)?;
    let twice = apply(&image)?;
    report.line(image.to_string());
    hecke_terms(report, &image);
    report.fact("kind", kind).fact("involutive", twice == x);
    report.require(twice == x, "the map squares to the identity");
    Ok(())
}

fn run_spherical_hecke(sc: &Scenario, report: &mut Report) -> Result<(), RunError> {
    let g = sc
        .group
        .as_ref()
        .ok_or_else(|| RunError::Input("--group is required".into()))?;
    let (n, q) = parse_gl(g).map_err(RunError::Input)?;
    let field = field_of(sc)?;
    let bn = gl_n_fq(n, q)?;
    let axioms = bn.check_axioms();
    report.fact("bn_axioms", axioms.all_pass());
    report.require(axioms.all_pass(), "BN-pair axioms");
    let sph = spherical_hecke(&bn, field)?;
    let mut rows = Vec::new();
    for (iu, u) in sph.weyl.iter().enumerate() {
        for (iv, v) in sph.weyl.iter().enumerate() {
            let terms: Vec<String> = sph
                .weyl
                .iter()
                .enumerate()
                .rev()
                .filter(|(iw, _)| !sph.constants[iu][iv][*iw].is_zero())
                .map(|(iw, w)| format!("{}·Θ_{}", sph.constants[iu][iv][iw], word_string(w.word())))
                .collect();
            rows.push(vec![word_string(u.word()), word_string(v.word()), terms.join(" + ")]);
        }
    }
    report.tables.push(Table {
        name: "Θ_u⋆Θ_v".into(),
        columns: vec!["u".into(), "v".into(), "product".into()],
        rows,
    });
    report.fact("group", g).fact("basis_size", sph.weyl.len());
    if sc.verify_iso {
        let iso = iso_check(&bn, field)?;
        report.line(format!("isomorphism at q = {:?}: {}", iso.parameters, iso.passes()));
        report
            .fact("parameters", &iso.parameters)
            .fact("pairs_checked", iso.pairs_checked);
        for m in &iso.mismatches {
            report.witness(m);
        }
        report.require(iso.passes(), "structure constants agree");
    }
    Ok(())
}

fn run_cosheaf(sc: &Scenario, report: &mut Report) -> Result<(), RunError> {
    let spec = sc
        .cosheaf
        .as_ref()
        .ok_or_else(|| RunError::Input("--input with a cosheaf scenario is required".into()))?;
    let b = spec.build(sc.budgets.max_simplices())?;
    report
        .fact("field", b.field)
        .fact("group_order", b.group.order())
        .fact("simplex_counts", b.complex.counts())
        .fact("system_flags", b.system.flags());
    match sc.kind {
        ScenarioKind::CosheafHomology => {
            let c = match b.kind {
                CosheafKind::Trivial => EquivariantCosheaf::trivial(&b.complex, &b.action, &b.module),
                CosheafKind::Invariants => EquivariantCosheaf::invariants(&b.complex, &b.action, &b.module, &b.system)?,
                CosheafKind::Coinvariants => {
                    EquivariantCosheaf::coinvariants(&b.complex, &b.action, &b.module, &b.system)?
                }
            };
            let axioms = c.check_axioms(&b.complex, &b.action);
            report.fact("axioms", &axioms);
            report.require(axioms.passes(), "cosheaf axioms");
            if !axioms.passes() {
                return Ok(());
            }
            let chains = cosheaf_chain_complex(&b.complex, &b.action, &c)?;
            let h = chains.complex.homology();
            homology_lines(report, &h);
            report
                .fact("dims", chains.complex.dims())
                .fact("ranks", chains.complex.ranks())
                .fact("homology", &h)
                .fact("equivariant", chains.equivariant)
                .fact("dimension_formula", &chains.dimension_formula);
            report.require(chains.equivariant, "boundary commutes with the action");
            report.require(chains.dimension_formula_holds(), "orbit dimension formula");
        }
        ScenarioKind::TreeResolution => {
            if b.kind != CosheafKind::Invariants {
                return Err(RunError::Input("tree resolution uses the invariants cosheaf".into()));
            }
            let r = schneider_stuhler_check(&b.complex, &b.action, &b.module, &b.system)?;
            report.line(format!("0 → {} → {} → {} → 0", r.dim_c1, r.dim_c0, r.dim_v));
            report.line(format!("ranks = ({}, {})", r.rank_d1, r.rank_w));
            report.line(format!("exact = {}", r.exact));
            for v in &r.geodesic_violations {
                report.witness(v);
            }
            report.fact("ranks", [r.rank_d1, r.rank_w]);
            report.require(r.exact, "exactness");
            report.require(r.dimension_formula, "orbit dimension formula");
            report.fact("resolution", &r);
        }
        _ => {
            let ctx = MeasureContext::new(b.group.clone(), b.k.clone(), b.field)?;
            let r = verify_idempotent_identities(&ctx, &b.complex, &b.action, &b.system)?;
            for c in &r.checks {
                report.line(format!("{}: {}/{} hold", c.name, c.checked - c.failed, c.checked));
                for w in &c.witnesses {
                    report.witness(serde_json::json!({ "identity": c.name, "at": w }));
                }
            }
            report.fact("identities", &r);
            report.require(r.passes(), "idempotent identities");
        }
    }
    Ok(())
}

#[derive(Parser, Debug)]
#[command(name = "davis-kit", version, about = "Weyl groups, Davis complexes, cosheaves and Hecke algebras with exact arithmetic")]
pub struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    /// Cap on enumerated Weyl group elements (overrides DAVIS_KIT_ELEMENT_CAP).
    #[arg(long, global = true)]
    pub element_cap: Option<usize>,
    /// Cap on poset elements and simplices.
    #[arg(long, global = true)]
    pub max_simplices: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CartanArg {
    /// JSON file `{"matrix": [[...]]}`, or the JSON itself.
    #[arg(long)]
    pub cartan: String,
}

#[derive(Args, Debug, Clone)]
pub struct DavisArgs {
    #[arg(long)]
    pub cartan: Option<String>,
    #[arg(long)]
    pub radius: Option<usize>,
    /// Finite BN-pair group, `gl:n,q`.
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub homology: bool,
    #[arg(long)]
    pub resolution_check: bool,
    #[arg(long = "char", default_value_t = 0)]
    pub characteristic: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum InvolutionArg {
    Im,
    Antipode,
    SigmaIm,
}

#[derive(Subcommand, Debug)]
pub enum HeckeCommand {
    /// T_a·T_b.
    Mul {
        #[command(flatten)]
        cartan: CartanArg,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Image of T_w under an involution.
    Involution {
        #[command(flatten)]
        cartan: CartanArg,
        #[arg(long, value_enum)]
        kind: InvolutionArg,
        #[arg(long)]
        word: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Spherical subsets and f.
    Spherical(CartanArg),
    /// Weyl group elements up to a length.
    WeylBall {
        #[command(flatten)]
        cartan: CartanArg,
        #[arg(long)]
        radius: Option<usize>,
    },
    /// Davis poset and complex.
    Davis(DavisArgs),
    /// Exactness of the Davis resolution.
    ResolutionCheck(DavisArgs),
    #[command(subcommand)]
    Hecke(HeckeCommand),
    /// Structure constants of the spherical Hecke algebra.
    SphericalHecke {
        #[arg(long)]
        group: String,
        #[arg(long = "char", default_value_t = 0)]
        characteristic: u64,
        #[arg(long)]
        verify_iso: bool,
    },
    /// Homology of an equivariant cosheaf.
    CosheafHomology {
        #[arg(long)]
        input: String,
    },
    /// The tree resolution check.
    TreeResolution {
        #[arg(long)]
        input: String,
    },
    /// Idempotent identities of an exquisite system.
    VerifyIdempotents {
        #[arg(long)]
        input: String,
    },
    /// A scenario file with all inputs inline.
    Run {
        #[arg(long)]
        scenario: String,
    },
}

/// Reads a path, or takes the argument itself when it looks like JSON.
fn read_json_arg(arg: &str) -> Result<serde_json::Value, RunError> {
    let text = if arg.trim_start().starts_with(['{', '[']) {
        arg.to_string()
    } else {
        std::fs::read_to_string(Path::new(arg)).map_err(|e| RunError::Input(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| RunError::Input(format!("{arg}: {e}")))
}

fn load_cartan(arg: &str) -> Result<Vec<Vec<i64>>, RunError> {
    let v = read_json_arg(arg)?;
    let m = v.get("matrix").cloned().unwrap_or(v);
    serde_json::from_value(m).map_err(|e| RunError::Input(format!("{arg}: {e}")))
}

/// `builtin:s3-star` or a JSON cosheaf scenario.
fn load_cosheaf(arg: &str) -> Result<CosheafScenario, RunError> {
    if arg == "builtin:s3-star" {
        return Ok(scenario::s3_star_scenario());
    }
    serde_json::from_value(read_json_arg(arg)?).map_err(|e| RunError::Input(format!("{arg}: {e}")))
}

fn davis_scenario(kind: ScenarioKind, d: DavisArgs) -> Result<Scenario, RunError> {
    let mut sc = Scenario::new(kind);
    sc.cartan = d.cartan.as_deref().map(load_cartan).transpose()?;
    sc.radius = d.radius;
    sc.group = d.group;
    sc.homology = d.homology;
    sc.resolution_check = d.resolution_check;
    sc.characteristic = d.characteristic;
    if sc.cartan.is_none() && sc.group.is_none() {
        return Err(RunError::Input("give --cartan or --group".into()));
    }
    Ok(sc)
}

/// Builds the scenario a command line describes.
pub fn scenario_from_cli(cli: &Cli) -> Result<Scenario, RunError> {
    let mut sc = match &cli.command {
        Command::Spherical(c) => {
            let mut sc = Scenario::new(ScenarioKind::Spherical);
            sc.cartan = Some(load_cartan(&c.cartan)?);
            sc
        }
        Command::WeylBall { cartan, radius } => {
            let mut sc = Scenario::new(ScenarioKind::WeylBall);
            sc.cartan = Some(load_cartan(&cartan.cartan)?);
            sc.radius = *radius;
            sc
        }
        Command::Davis(d) => davis_scenario(ScenarioKind::Davis, d.clone())?,
        Command::ResolutionCheck(d) => davis_scenario(ScenarioKind::ResolutionCheck, d.clone())?,
        Command::Hecke(HeckeCommand::Mul { cartan, a, b }) => {
            let mut sc = Scenario::new(ScenarioKind::HeckeMul);
            sc.cartan = Some(load_cartan(&cartan.cartan)?);
            sc.a = Some(parse_word(a).map_err(RunError::Input)?);
            sc.b = Some(parse_word(b).map_err(RunError::Input)?);
            sc
        }
        Command::Hecke(HeckeCommand::Involution { cartan, kind, word }) => {
            let mut sc = Scenario::new(ScenarioKind::Involution);
            sc.cartan = Some(load_cartan(&cartan.cartan)?);
            sc.involution = Some(match kind {
                InvolutionArg::Im => InvolutionKind::Im,
                InvolutionArg::Antipode => InvolutionKind::Antipode,
                InvolutionArg::SigmaIm => InvolutionKind::SigmaIm,
            });
            sc.word = Some(parse_word(word).map_err(RunError::Input)?);
            sc
        }
        Command::SphericalHecke {
            group,
            characteristic,
            verify_iso,
        } => {
            let mut sc = Scenario::new(ScenarioKind::SphericalHecke);
            sc.group = Some(group.clone());
            sc.characteristic = *characteristic;
            sc.verify_iso = *verify_iso;
            sc
        }
        Command::CosheafHomology { input } | Command::TreeResolution { input } | Command::VerifyIdempotents { input } => {
            let kind = match &cli.command {
                Command::CosheafHomology { .. } => ScenarioKind::CosheafHomology,
                Command::TreeResolution { .. } => ScenarioKind::TreeResolution,
                _ => ScenarioKind::VerifyIdempotents,
            };
            let mut sc = Scenario::new(kind);
            sc.cosheaf = Some(load_cosheaf(input)?);
            sc
        }
        Command::Run { scenario } => {
            serde_json::from_value(read_json_arg(scenario)?).map_err(|e| RunError::Input(format!("{scenario}: {e}")))?
        }
    };
    if cli.element_cap.is_some() {
        sc.budgets.element_cap = cli.element_cap;
    }
    if cli.max_simplices.is_some() {
        sc.budgets.max_simplices = cli.max_simplices;
    }
    Ok(sc)
}

/// Output and exit code of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses arguments (program name first), runs, and renders.
pub fn run_cli<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            };
        }
    };
    let start = Instant::now();
    let result = scenario_from_cli(&cli).and_then(|sc| run(&sc));
    match result {
        Ok(mut report) => {
            if cli.timing {
                report.timing_ms = Some(start.elapsed().as_millis() as u64);
            }
            let stdout = if cli.json { report.to_json() + "\n" } else { report.to_text() };
            Outcome {
                stdout,
                stderr: String::new(),
                code: report.exit_code(),
            }
        }
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: e.exit_code(),
        },
    }
}

/// Runs a scenario given as JSON text and returns the report as JSON.
pub fn run_scenario_json(text: &str) -> Result<(Report, String), RunError> {
    let sc: Scenario = serde_json::from_str(text).map_err(|e| RunError::Input(e.to_string()))?;
    let report = run(&sc)?;
    let json = report.to_json();
    Ok((report, json))
}

#[cfg(test)]
mod tests {
    use super::*;

    const A2: &str = r#"{"matrix": [[2, -1], [-1, 2]]}"#;

    fn cli(args: &[&str]) -> Outcome {
        run_cli(std::iter::once("davis-kit").chain(args.iter().copied()))
    }

    #[test]
    fn spherical_a2() {
        let out = cli(&["spherical", "--cartan", A2]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("f = 2"));
        assert!(out.stdout.contains("count: 4"));
    }

    #[test]
    fn hecke_square() {
        let out = cli(&["hecke", "mul", "--cartan", A2, "--a", "0", "--b", "0"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        assert!(out.stdout.lines().any(|l| l == "(q−1)·T_[0] + q·T_[]"));
    }

    #[test]
    fn tree_resolution_builtin() {
        let out = cli(&["tree-resolution", "--input", "builtin:s3-star"]);
        assert_eq!(out.code, 0, "{}", out.stdout);
        assert!(out.stdout.contains("ranks = (6, 2)"));
        assert!(out.stdout.contains("0 → 6 → 8 → 2 → 0"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(cli(&["spherical", "--cartan", "[[2, 1], [-1, 2]]"]).code, 2);
        assert_eq!(cli(&["bogus"]).code, 2);
        let circle = cli(&["davis", "--cartan", "[[2,-2],[-2,2]]", "--radius", "2", "--resolution-check"]);
        assert_eq!(circle.code, 1);
    }

    #[test]
    fn json_is_deterministic_and_round_trips() {
        let a = cli(&["--json", "davis", "--cartan", A2, "--homology"]);
        let b = cli(&["--json", "davis", "--cartan", A2, "--homology"]);
        assert_eq!(a, b);
        let r: Report = serde_json::from_str(&a.stdout).unwrap();
        assert_eq!(r.facts["homology"], serde_json::json!([1, 0, 0]));
        assert!(cli(&["davis", "--cartan", A2, "--homology"]).stdout.contains("H_0 = 1"));
    }
}
