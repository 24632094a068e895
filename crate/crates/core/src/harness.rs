//! Seeded random models and formulas, soundness audits of the proof
//! systems, and bounded countermodel search.
//!
//! Trial `t` of a run with seed `s` draws from a ChaCha8 stream seeded with
//! `s` on stream number `t`, so trials are independent of one another and of
//! the order in which they are executed.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::checker::{eval_dtl, eval_pdl_relational, eval_subset, translate_pdl, CheckError, SubsetEvaluator};
use crate::formula::{Formula, Program};
use crate::frameprops::{all_self_maps, is_continuous, is_open_map};
use crate::models::{openness_failure, DtModel, Model, PdlModel, PointMap, Scenario, SubsetModel, Valuation};
use crate::proofkit::{ProofSystem, Scheme, Substitution};
use crate::topology::{PointSet, TopoSpace};

/// Attempts per function before falling back to a constructive family.
pub const REJECTION_CAP: usize = 10_000;

/// Violations kept verbatim in an audit report; the rest are only counted.
pub const MAX_REPORTED_VIOLATIONS: usize = 20;

const PROGRAM_NAMES: [&str; 4] = ["a", "b", "c", "d"];
const ATOM_NAMES: [&str; 4] = ["p", "q", "r", "s"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelClass {
    /// Serial relational models.
    Pdl,
    Dtl,
    DtlOpen,
    DtlContinuous,
    Subset,
}

impl ModelClass {
    pub const ALL: [ModelClass; 5] = [
        ModelClass::Pdl,
        ModelClass::Dtl,
        ModelClass::DtlOpen,
        ModelClass::DtlContinuous,
        ModelClass::Subset,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelClass::Pdl => "pdl",
            ModelClass::Dtl => "dtl",
            ModelClass::DtlOpen => "dtl_open",
            ModelClass::DtlContinuous => "dtl_continuous",
            ModelClass::Subset => "subset",
        }
    }

    fn accepts(self, space: &TopoSpace, f: &PointMap) -> bool {
        match self {
            ModelClass::DtlOpen => openness_failure(space, f).is_none(),
            ModelClass::DtlContinuous => is_continuous(space, f).holds,
            _ => true,
        }
    }
}

impl fmt::Display for ModelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelClass {
    type Err = String;

    fn from_str(s: &str) -> Result<ModelClass, String> {
        ModelClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown model class `{s}` (expected pdl, dtl, dtl_open, dtl_continuous or subset)"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenConfig {
    pub seed: u64,
    pub class: ModelClass,
    /// Points are drawn uniformly from `1..=max_points`.
    pub max_points: usize,
    /// Programs are drawn uniformly from `1..=max_programs`.
    pub max_programs: usize,
    /// Atoms used by valuations and random formulas.
    pub atoms: usize,
    /// Spaces with more opens are resampled.
    pub max_opens: Option<usize>,
}

impl GenConfig {
    pub fn new(class: ModelClass, seed: u64) -> GenConfig {
        GenConfig {
            seed,
            class,
            max_points: 5,
            max_programs: 3,
            atoms: 3,
            max_opens: None,
        }
    }

    pub fn with_points(mut self, max_points: usize) -> GenConfig {
        self.max_points = max_points;
        self
    }

    pub fn with_programs(mut self, max_programs: usize) -> GenConfig {
        self.max_programs = max_programs;
        self
    }

    /// Generator for trial `trial`.
    pub fn rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }

    fn atom_names(&self) -> &'static [&'static str] {
        &ATOM_NAMES[..self.atoms.min(ATOM_NAMES.len())]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("no {class} function found after {attempts} attempts on a {points}-point space ({accepted} accepted)")]
    GenerationExhausted {
        class: ModelClass,
        points: usize,
        attempts: usize,
        accepted: usize,
    },
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
}

/// A generated model and how many of its functions came from the fallback
/// family instead of rejection sampling.
#[derive(Debug, Clone)]
pub struct Generated {
    pub model: Model,
    pub fallbacks: usize,
}

/// Random preorder: points are grouped into clusters (equivalent points),
/// clusters get random forward edges along a random order, and the result is
/// closed under transitivity.
pub fn random_space<R: Rng>(rng: &mut R, n: usize, max_opens: Option<usize>) -> TopoSpace {
    for _ in 0..REJECTION_CAP {
        let clusters: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let density: f64 = rng.gen_range(0.1..0.6);
        let mut le = vec![vec![false; n]; n];
        for x in 0..n {
            for y in 0..n {
                le[x][y] = clusters[x] == clusters[y];
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (cx, cy) = (order[i], order[j]);
                if rng.gen_bool(density) {
                    for x in (0..n).filter(|&x| clusters[x] == cx) {
                        for y in (0..n).filter(|&y| clusters[y] == cy) {
                            le[x][y] = true;
                        }
                    }
                }
            }
        }
        for k in 0..n {
            for x in 0..n {
                for y in 0..n {
                    if le[x][k] && le[k][y] {
                        le[x][y] = true;
                    }
                }
            }
        }
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| le[x][y])
            .collect();
        let space = TopoSpace::from_preorder(n, &pairs).expect("transitively closed");
        if max_opens.map_or(true, |m| space.opens().len() <= m) {
            return space;
        }
    }
    TopoSpace::indiscrete(n)
}

fn random_map<R: Rng>(rng: &mut R, n: usize) -> PointMap {
    let images: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    PointMap::total(&images)
}

/// Rejection-samples a total map of the given class.
pub fn sample_function<R: Rng>(rng: &mut R, space: &TopoSpace, class: ModelClass) -> Result<PointMap, GenError> {
    let n = space.points();
    for _ in 0..REJECTION_CAP {
        let f = random_map(rng, n);
        if class.accepts(space, &f) {
            return Ok(f);
        }
    }
    Err(GenError::GenerationExhausted {
        class,
        points: n,
        attempts: REJECTION_CAP,
        accepted: 0,
    })
}

fn random_valuation<R: Rng>(rng: &mut R, n: usize, atoms: &[&str]) -> Valuation {
    let mut v = Valuation::new();
    for a in atoms {
        v.set(a, PointSet::from_bits(rng.gen_range(0..1u64 << n)));
    }
    v
}

/// Draws one model of the configured class.
pub fn gen_model<R: Rng>(cfg: &GenConfig, rng: &mut R) -> Result<Generated, GenError> {
    if cfg.max_points == 0 || cfg.max_programs == 0 || cfg.max_points > crate::topology::MAX_POINTS {
        return Err(GenError::InvalidConfig(format!(
            "max_points must be in 1..={} and max_programs at least 1",
            crate::topology::MAX_POINTS
        )));
    }
    if cfg.max_programs > PROGRAM_NAMES.len() {
        return Err(GenError::InvalidConfig(format!(
            "at most {} programs are supported",
            PROGRAM_NAMES.len()
        )));
    }
    let n = rng.gen_range(1..=cfg.max_points);
    let k = rng.gen_range(1..=cfg.max_programs);
    let programs = &PROGRAM_NAMES[..k];
    let mut fallbacks = 0;
    let model = match cfg.class {
        ModelClass::Pdl => {
            let mut m = PdlModel::new(n);
            m.serial = true;
            for name in programs {
                let edges: Vec<(usize, usize)> = (0..n)
                    .flat_map(|x| {
                        let succ = rng.gen_range(1..1u64 << n);
                        PointSet::from_bits(succ).iter().map(move |y| (x, y)).collect::<Vec<_>>()
                    })
                    .collect();
                m = m.with_relation(name, &edges);
            }
            let v = random_valuation(rng, n, cfg.atom_names());
            Model::Pdl(m.with_valuation(v))
        }
        ModelClass::Dtl | ModelClass::DtlOpen | ModelClass::DtlContinuous => {
            let space = random_space(rng, n, cfg.max_opens);
            let mut m = DtModel::new(space.clone());
            for name in programs {
                let f = sample_function(rng, &space, cfg.class).unwrap_or_else(|_| {
                    fallbacks += 1;
                    PointMap::identity(n)
                });
                m = m.with_function(name, f);
            }
            let v = random_valuation(rng, n, cfg.atom_names());
            Model::Dtl(m.with_valuation(v))
        }
        ModelClass::Subset => {
            let space = random_space(rng, n, cfg.max_opens);
            let mut m = SubsetModel::new(space.clone());
            for name in programs {
                let g = sample_function(rng, &space, ModelClass::DtlOpen).unwrap_or_else(|_| {
                    fallbacks += 1;
                    PointMap::identity(n)
                });
                let domain = *space.opens().choose(rng).expect("a space has opens");
                // a total open map after restriction to an open domain is open
                m = m.with_function(name, PointMap::partial_identity(n, domain).then(&g));
            }
            let v = random_valuation(rng, n, cfg.atom_names());
            Model::Subset(m.with_valuation(v))
        }
    };
    debug_assert!(model.validate().is_empty(), "generated model must validate");
    Ok(Generated { model, fallbacks })
}

/// Which constructors random formulas may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormulaLanguage {
    /// Booleans, `<pi>` and `[pi]`.
    Pdl,
    /// Booleans, `box`, `dia`, `K`, `Khat` and `O[pi]`.
    Epistemic,
}

/// Sampler for formulas and programs over fixed atom and program names.
#[derive(Debug, Clone)]
pub struct FormulaSampler {
    pub language: FormulaLanguage,
    pub atoms: Vec<String>,
    pub programs: Vec<String>,
    pub max_depth: usize,
    /// Allow sequenced programs.
    pub seq: bool,
    /// Allow test programs (epistemic language only).
    pub tests: bool,
}

impl FormulaSampler {
    pub fn new(language: FormulaLanguage, atoms: &[&str], programs: &[String]) -> FormulaSampler {
        FormulaSampler {
            language,
            atoms: atoms.iter().map(|s| s.to_string()).collect(),
            programs: programs.to_vec(),
            max_depth: 3,
            seq: false,
            tests: false,
        }
    }

    fn leaf<R: Rng>(&self, rng: &mut R) -> Formula {
        if self.atoms.is_empty() || rng.gen_ratio(1, 12) {
            Formula::Top
        } else {
            Formula::atom(self.atoms.choose(rng).expect("nonempty").clone())
        }
    }

    pub fn program<R: Rng>(&self, rng: &mut R) -> Program {
        let atomic = |rng: &mut R| Program::atomic(self.programs.choose(rng).expect("at least one program").clone());
        let roll = rng.gen_range(0..8);
        if self.seq && roll == 0 {
            Program::seq(atomic(rng), atomic(rng))
        } else if self.tests && self.language == FormulaLanguage::Epistemic && roll == 1 {
            let body_sampler = FormulaSampler {
                max_depth: 1,
                tests: false,
                seq: false,
                ..self.clone()
            };
            let body = body_sampler.state_formula(rng, 1);
            Program::test(body).expect("state formulas are test bodies")
        } else {
            atomic(rng)
        }
    }

    /// Formula with modal depth (counting program steps) at most `depth`.
    pub fn formula<R: Rng>(&self, rng: &mut R) -> Formula {
        self.sample(rng, self.max_depth, false)
    }

    /// Formula in the `box`/`O` fragment over atomic programs, usable as a
    /// test body or announcement.
    pub fn state_formula<R: Rng>(&self, rng: &mut R, depth: usize) -> Formula {
        self.sample(rng, depth, true)
    }

    fn sample<R: Rng>(&self, rng: &mut R, depth: usize, state_only: bool) -> Formula {
        if depth == 0 || rng.gen_ratio(1, 4) {
            return self.leaf(rng);
        }
        let rec = |rng: &mut R, d: usize| self.sample(rng, d, state_only);
        let choices = match self.language {
            FormulaLanguage::Pdl => 7,
            FormulaLanguage::Epistemic if state_only => 8,
            FormulaLanguage::Epistemic => 10,
        };
        match rng.gen_range(0..choices) {
            0 => Formula::not(rec(rng, depth)),
            1 => Formula::and(rec(rng, depth), rec(rng, depth)),
            2 => Formula::or(rec(rng, depth), rec(rng, depth)),
            3 => Formula::implies(rec(rng, depth), rec(rng, depth)),
            4 => Formula::iff(rec(rng, depth - 1), rec(rng, depth - 1)),
            c => match self.language {
                FormulaLanguage::Pdl => {
                    let p = self.program(rng);
                    let rest = depth.saturating_sub(p.depth());
                    if p.depth() > depth {
                        return self.leaf(rng);
                    }
                    if c == 5 {
                        Formula::diamond(p, rec(rng, rest))
                    } else {
                        Formula::box_pdl(p, rec(rng, rest))
                    }
                }
                FormulaLanguage::Epistemic => match c {
                    5 => Formula::int(rec(rng, depth - 1)),
                    6 => Formula::cl(rec(rng, depth - 1)),
                    7 => {
                        let p = if state_only {
                            Program::atomic(self.programs.choose(rng).expect("program").clone())
                        } else {
                            self.program(rng)
                        };
                        if p.depth() > depth {
                            return self.leaf(rng);
                        }
                        let rest = depth - p.depth();
                        Formula::next(p, rec(rng, rest))
                    }
                    8 => Formula::know(rec(rng, depth - 1)),
                    _ => Formula::khat(rec(rng, depth - 1)),
                },
            },
        }
    }
}

/// Propositional tautology shapes used to instantiate `CPL`.
pub const CPL_TEMPLATES: [&str; 6] = [
    "phi | ~phi",
    "phi -> (psi -> phi)",
    "phi & psi -> phi",
    "~~phi <-> phi",
    "(phi -> psi) -> (~psi -> ~phi)",
    "(phi | psi) <-> ~(~phi & ~psi)",
];

fn scheme_for_audit(name: &str) -> Vec<(String, Formula)> {
    if name == "CPL" {
        CPL_TEMPLATES
            .iter()
            .map(|t| ("CPL".to_string(), crate::formula::parse(t).expect("template parses")))
            .collect()
    } else {
        let s = Scheme::named(name).expect("known scheme");
        vec![(s.name.to_string(), s.template)]
    }
}

fn random_subst<R: Rng>(rng: &mut R, sampler: &FormulaSampler) -> Substitution {
    let mut s = Substitution::default();
    for m in ["phi", "psi"] {
        s.formulas.insert(m.to_string(), sampler.formula(rng));
    }
    for m in ["pi", "pi1", "pi2"] {
        s.programs.insert(m.to_string(), sampler.program(rng));
    }
    s
}

fn instantiate(template: &Formula, subst: &Substitution) -> Formula {
    Scheme {
        name: "",
        template: template.clone(),
    }
    .instantiate(subst)
}

/// Model classes an audit of `system` may run on.
pub fn legal_classes(system: ProofSystem) -> &'static [ModelClass] {
    match system {
        ProofSystem::Spdl0 => &[ModelClass::Dtl, ModelClass::DtlOpen, ModelClass::DtlContinuous, ModelClass::Pdl],
        // `dtl` is admitted so that the failure of sequencing on non-open
        // models can be observed
        ProofSystem::Spdl0Seq => &[ModelClass::DtlOpen, ModelClass::Dtl, ModelClass::Pdl],
        ProofSystem::Dtel => &[ModelClass::Subset],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditViolation {
    pub trial: u64,
    /// Scheme name, or the rule whose conclusion failed.
    pub check: String,
    pub formula: String,
    pub model: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    /// Whether an independent evaluation confirms the failure.
    pub reverified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub system: ProofSystem,
    pub class: ModelClass,
    pub seed: u64,
    pub trials: u64,
    pub instances_per_scheme: usize,
    pub schemes: Vec<String>,
    pub checks: u64,
    pub fallbacks: u64,
    pub violation_count: u64,
    pub violations: Vec<AuditViolation>,
}

impl AuditReport {
    pub fn sound(&self) -> bool {
        self.violation_count == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error("{system} cannot be audited on {class} models")]
    IllegalPairing { system: ProofSystem, class: ModelClass },
    #[error("unknown scheme `{name}` for {system}")]
    UnknownScheme { system: ProofSystem, name: String },
    #[error(transparent)]
    Generation(#[from] GenError),
    #[error(transparent)]
    Check(#[from] CheckError),
}

/// Global truth of `f` in a model: `None` if true everywhere, otherwise the
/// first failing point or scenario.
enum Failure {
    Point(usize),
    Scenario(Scenario),
}

fn first_failure(model: &Model, f: &Formula) -> Result<Option<Failure>, CheckError> {
    Ok(match model {
        Model::Pdl(m) => m.carrier().difference(eval_pdl_relational(m, f)?).min().map(Failure::Point),
        Model::Dtl(m) => m.space.carrier().difference(eval_dtl(m, f)?).min().map(Failure::Point),
        Model::Subset(m) => {
            let mut ev = SubsetEvaluator::new(m);
            let mut found = None;
            for &u in m.space.opens() {
                if let Some(x) = u.difference(ev.extension(f, u)?).min() {
                    found = Some(Failure::Scenario(Scenario::new(x, u)));
                    break;
                }
            }
            found
        }
    })
}

/// Confirms a failure by a second evaluation route: the `<>`/`[]`-free
/// translation for relational and topological models, and a fresh
/// single-scenario evaluation for subset models.
fn reverify(model: &Model, f: &Formula, failure: &Failure) -> bool {
    match (model, failure) {
        (Model::Pdl(m), Failure::Point(x)) => eval_pdl_relational(m, f).is_ok_and(|ext| !ext.contains(*x)),
        (Model::Dtl(m), Failure::Point(x)) => eval_dtl(m, &translate_pdl(f)).is_ok_and(|ext| !ext.contains(*x)),
        (Model::Subset(m), Failure::Scenario(s)) => eval_subset(m, f, s).is_ok_and(|b| !b),
        _ => false,
    }
}

fn model_programs(model: &Model) -> Vec<String> {
    match model {
        Model::Pdl(m) => m.alphabet().cloned().collect(),
        Model::Dtl(m) => m.alphabet().cloned().collect(),
        Model::Subset(m) => m.alphabet().cloned().collect(),
    }
}

struct TrialOutcome {
    checks: u64,
    fallbacks: u64,
    violations: Vec<AuditViolation>,
}

/// Schemes audited for `system` when no filter is given.
pub fn audit_schemes(system: ProofSystem) -> Vec<String> {
    std::iter::once("CPL".to_string())
        .chain(system.schemes().into_iter().map(|s| s.name.to_string()))
        .collect()
}

/// Instantiates every scheme of `system` with random formulas on random
/// models and checks global truth. Rule conclusions (necessitation and, for
/// the epistemic system, monotonicity) are checked on the generated
/// instances and on randomly drawn globally true implications.
pub fn audit(
    system: ProofSystem,
    cfg: &GenConfig,
    trials: u64,
    instances_per_scheme: usize,
    filter: Option<&[String]>,
) -> Result<AuditReport, AuditError> {
    if !legal_classes(system).contains(&cfg.class) {
        return Err(AuditError::IllegalPairing {
            system,
            class: cfg.class,
        });
    }
    let schemes: Vec<String> = match filter {
        None => audit_schemes(system),
        Some(names) => names
            .iter()
            .map(|n| {
                system.resolve(n).map(str::to_string).ok_or_else(|| AuditError::UnknownScheme {
                    system,
                    name: n.clone(),
                })
            })
            .collect::<Result<_, _>>()?,
    };
    let outcomes: Vec<Result<TrialOutcome, AuditError>> = (0..trials)
        .into_par_iter()
        .map(|t| audit_trial(system, cfg, t, instances_per_scheme, &schemes))
        .collect();
    let mut report = AuditReport {
        system,
        class: cfg.class,
        seed: cfg.seed,
        trials,
        instances_per_scheme,
        schemes,
        checks: 0,
        fallbacks: 0,
        violation_count: 0,
        violations: Vec::new(),
    };
    for outcome in outcomes {
        let outcome = outcome?;
        report.checks += outcome.checks;
        report.fallbacks += outcome.fallbacks;
        report.violation_count += outcome.violations.len() as u64;
        for v in outcome.violations {
            if report.violations.len() < MAX_REPORTED_VIOLATIONS {
                report.violations.push(v);
            }
        }
    }
    Ok(report)
}

fn audit_trial(
    system: ProofSystem,
    cfg: &GenConfig,
    trial: u64,
    instances: usize,
    schemes: &[String],
) -> Result<TrialOutcome, AuditError> {
    let mut rng = cfg.rng(trial);
    let generated = gen_model(cfg, &mut rng)?;
    let model = generated.model;
    let programs = model_programs(&model);
    let language = match system {
        ProofSystem::Dtel => FormulaLanguage::Epistemic,
        _ => FormulaLanguage::Pdl,
    };
    let mut sampler = FormulaSampler::new(language, cfg.atom_names(), &programs);
    sampler.seq = system != ProofSystem::Spdl0;
    sampler.tests = system == ProofSystem::Dtel;

    let mut outcome = TrialOutcome {
        checks: 0,
        fallbacks: generated.fallbacks as u64,
        violations: Vec::new(),
    };
    let check = |name: &str, f: &Formula, outcome: &mut TrialOutcome| -> Result<bool, AuditError> {
        outcome.checks += 1;
        let failure = first_failure(&model, f)?;
        if let Some(failure) = failure {
            let reverified = reverify(&model, f, &failure);
            let (point, scenario) = match failure {
                Failure::Point(x) => (Some(x), None),
                Failure::Scenario(s) => (None, Some(s)),
            };
            outcome.violations.push(AuditViolation {
                trial,
                check: name.to_string(),
                formula: f.to_string(),
                model: model.to_json_value(),
                point,
                scenario,
                reverified,
            });
            return Ok(false);
        }
        Ok(true)
    };

    for name in schemes {
        for (label, template) in scheme_for_audit(name) {
            for _ in 0..instances {
                let subst = random_subst(&mut rng, &sampler);
                let inst = instantiate(&template, &subst);
                if check(&label, &inst, &mut outcome)? {
                    for conclusion in rule_conclusions(system, &inst, &sampler, &mut rng) {
                        check(conclusion.0, &conclusion.1, &mut outcome)?;
                    }
                }
            }
        }
    }
    // model-wise admissibility: premises that happen to be globally true
    for _ in 0..instances {
        let premise = Formula::implies(sampler.formula(&mut rng), sampler.formula(&mut rng));
        if first_failure(&model, &premise)?.is_none() {
            for conclusion in rule_conclusions(system, &premise, &sampler, &mut rng) {
                check(conclusion.0, &conclusion.1, &mut outcome)?;
            }
        }
    }
    Ok(outcome)
}

fn rule_conclusions<R: Rng>(
    system: ProofSystem,
    premise: &Formula,
    sampler: &FormulaSampler,
    rng: &mut R,
) -> Vec<(&'static str, Formula)> {
    match system {
        ProofSystem::Spdl0 | ProofSystem::Spdl0Seq => {
            vec![("Nec_pi", Formula::box_pdl(sampler.program(rng), premise.clone()))]
        }
        ProofSystem::Dtel => {
            let mut out = vec![
                ("Nec_K", Formula::know(premise.clone())),
                ("Nec_box", Formula::int(premise.clone())),
            ];
            if let Formula::Implies(a, b) = premise {
                let p = sampler.program(rng);
                out.push((
                    "Mon_pi",
                    Formula::implies(Formula::next(p.clone(), (**a).clone()), Formula::next(p, (**b).clone())),
                ));
            }
            out
        }
    }
}

/// Outcome of comparing `<a;b>phi` with `<a><b>phi` on generated models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SeqSweepReport {
    pub models: u64,
    pub comparisons: u64,
    pub equal: u64,
    /// `[[<a;b>phi]]` strictly inside `[[<a><b>phi]]`.
    pub strict: u64,
    /// `[[<a;b>phi]]` not inside `[[<a><b>phi]]`.
    pub inclusion_failures: u64,
}

/// Compares both sides of the sequencing axiom on `trials` topological
/// models of the configured class, `per_model` random formulas each.
pub fn seq_sweep(cfg: &GenConfig, trials: u64, per_model: usize) -> Result<SeqSweepReport, AuditError> {
    let rows: Vec<Result<SeqSweepReport, AuditError>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = cfg.rng(t);
            let Model::Dtl(m) = gen_model(cfg, &mut rng)?.model else {
                return Err(AuditError::IllegalPairing {
                    system: ProofSystem::Spdl0Seq,
                    class: cfg.class,
                });
            };
            let programs: Vec<String> = m.alphabet().cloned().collect();
            let mut sampler = FormulaSampler::new(FormulaLanguage::Pdl, cfg.atom_names(), &programs);
            sampler.max_depth = 2;
            let mut row = SeqSweepReport {
                models: 1,
                ..Default::default()
            };
            for _ in 0..per_model {
                let a = sampler.program(&mut rng);
                let b = sampler.program(&mut rng);
                let phi = sampler.formula(&mut rng);
                let lhs = eval_dtl(&m, &Formula::diamond(Program::seq(a.clone(), b.clone()), phi.clone()))?;
                let rhs = eval_dtl(&m, &Formula::diamond(a, Formula::diamond(b, phi)))?;
                row.comparisons += 1;
                if lhs == rhs {
                    row.equal += 1;
                } else if lhs.is_subset(rhs) {
                    row.strict += 1;
                } else {
                    row.inclusion_failures += 1;
                }
            }
            Ok(row)
        })
        .collect();
    let mut total = SeqSweepReport::default();
    for row in rows {
        let row = row?;
        total.models += row.models;
        total.comparisons += row.comparisons;
        total.equal += row.equal;
        total.strict += row.strict;
        total.inclusion_failures += row.inclusion_failures;
    }
    Ok(total)
}

/// Agreement counts of the frame-property deciders with scheme validity
/// over every topology and self-map of an `n`-point carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CharacterizationReport {
    pub cases: u64,
    pub continuity_agree: u64,
    pub openness_agree: u64,
    pub non_continuous: u64,
    pub non_open: u64,
    pub continuity_countermodels_verified: u64,
    pub openness_countermodels_verified: u64,
}

pub fn characterization_sweep(n: usize) -> CharacterizationReport {
    use crate::frameprops::{build_continuity_countermodel, build_openness_countermodel, validates_scheme, SchemeKind};
    let spaces = TopoSpace::enumerate(n);
    let maps = all_self_maps(n);
    let rows: Vec<CharacterizationReport> = spaces
        .par_iter()
        .map(|space| {
            let mut r = CharacterizationReport::default();
            for f in &maps {
                r.cases += 1;
                let cont = is_continuous(space, f).holds;
                let open = is_open_map(space, f).holds;
                r.continuity_agree += u64::from(validates_scheme(space, f, SchemeKind::Continuity).holds == cont);
                r.openness_agree += u64::from(validates_scheme(space, f, SchemeKind::Openness).holds == open);
                let falsifies = |kind: SchemeKind, v: PointSet, x: usize| {
                    let m = DtModel::new(space.clone())
                        .with_function("a", f.clone())
                        .with_valuation(Valuation::new().with("p", v));
                    !eval_dtl(&m, &kind.instance()).expect("DTL fragment").contains(x)
                };
                if !cont {
                    r.non_continuous += 1;
                    if let Some((v, x)) = build_continuity_countermodel(space, f) {
                        r.continuity_countermodels_verified += u64::from(falsifies(SchemeKind::Continuity, v, x));
                    }
                }
                if !open {
                    r.non_open += 1;
                    if let Some((v, x)) = build_openness_countermodel(space, f) {
                        r.openness_countermodels_verified += u64::from(falsifies(SchemeKind::Openness, v, x));
                    }
                }
            }
            r
        })
        .collect();
    rows.into_iter().fold(CharacterizationReport::default(), |a, r| CharacterizationReport {
        cases: a.cases + r.cases,
        continuity_agree: a.continuity_agree + r.continuity_agree,
        openness_agree: a.openness_agree + r.openness_agree,
        non_continuous: a.non_continuous + r.non_continuous,
        non_open: a.non_open + r.non_open,
        continuity_countermodels_verified: a.continuity_countermodels_verified + r.continuity_countermodels_verified,
        openness_countermodels_verified: a.openness_countermodels_verified + r.openness_countermodels_verified,
    })
}

/// A model falsifying a formula, with the point or scenario where it fails.
#[derive(Debug, Clone, Serialize)]
pub struct Refutation {
    pub formula: String,
    pub class: ModelClass,
    pub model: Model,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
}

/// Calls `visit` on every tuple in `0..radix[0] x 0..radix[1] x ...` in
/// lexicographic order until it returns `true`.
fn odometer(radices: &[usize], mut visit: impl FnMut(&[usize]) -> Result<bool, CheckError>) -> Result<bool, CheckError> {
    if radices.iter().any(|&r| r == 0) {
        return Ok(false);
    }
    let mut digits = vec![0; radices.len()];
    loop {
        if visit(&digits)? {
            return Ok(true);
        }
        let mut i = radices.len();
        loop {
            if i == 0 {
                return Ok(false);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < radices[i] {
                break;
            }
            digits[i] = 0;
        }
    }
}

fn all_partial_maps(n: usize) -> Vec<PointMap> {
    let count = (n + 1).pow(n as u32);
    (0..count)
        .map(|mut code| {
            let mut images = vec![None; n];
            for slot in images.iter_mut().rev() {
                let d = code % (n + 1);
                code /= n + 1;
                *slot = (d > 0).then(|| d - 1);
            }
            PointMap::new(images)
        })
        .collect()
}

fn serial_relations(n: usize) -> Vec<Vec<PointSet>> {
    let per_point: Vec<PointSet> = (1..1u64 << n).map(PointSet::from_bits).collect();
    let mut out = Vec::new();
    let radices = vec![per_point.len(); n];
    odometer(&radices, |digits| {
        out.push(digits.iter().map(|&d| per_point[d]).collect());
        Ok(false)
    })
    .expect("infallible");
    out
}

/// Searches models with at most `bound` points in a fixed order: carrier
/// size, topology (enumeration order), program interpretations
/// (lexicographic per program, programs by name), then valuations of the
/// formula's atoms (witness order per atom). Returns the first refutation.
pub fn search_countermodel(f: &Formula, bound: usize, class: ModelClass) -> Result<Option<Refutation>, CheckError> {
    let atoms: Vec<String> = f.atoms().into_iter().collect();
    let programs: Vec<String> = f.programs().into_iter().collect();
    for n in 1..=bound {
        let mut valuations: Vec<PointSet> = PointSet::all_subsets(n).collect();
        valuations.sort_by(PointSet::witness_cmp);
        let valuation_of = |digits: &[usize]| {
            let mut v = Valuation::new();
            for (a, &d) in atoms.iter().zip(digits) {
                v.set(a, valuations[d]);
            }
            v
        };
        let val_radices = vec![valuations.len(); atoms.len()];
        let mut found: Option<Refutation> = None;
        if class == ModelClass::Pdl {
            let relations = serial_relations(n);
            odometer(&vec![relations.len(); programs.len()], |rel_digits| {
                odometer(&val_radices, |val_digits| {
                    let mut m = PdlModel::new(n).with_valuation(valuation_of(val_digits));
                    m.serial = true;
                    for (p, &d) in programs.iter().zip(rel_digits) {
                        m.relations.insert(p.clone(), relations[d].clone());
                    }
                    let model = Model::Pdl(m);
                    if let Some(Failure::Point(x)) = first_failure(&model, f)? {
                        found = Some(Refutation {
                            formula: f.to_string(),
                            class,
                            model,
                            point: Some(x),
                            scenario: None,
                        });
                        return Ok(true);
                    }
                    Ok(false)
                })
            })?;
        } else {
            for space in TopoSpace::enumerate(n) {
                let maps: Vec<PointMap> = match class {
                    ModelClass::Subset => all_partial_maps(n)
                        .into_iter()
                        .filter(|m| openness_failure(&space, m).is_none())
                        .collect(),
                    _ => all_self_maps(n).into_iter().filter(|m| class.accepts(&space, m)).collect(),
                };
                let hit = odometer(&vec![maps.len(); programs.len()], |map_digits| {
                    odometer(&val_radices, |val_digits| {
                        let valuation = valuation_of(val_digits);
                        let functions: BTreeMap<String, PointMap> = programs
                            .iter()
                            .zip(map_digits)
                            .map(|(p, &d)| (p.clone(), maps[d].clone()))
                            .collect();
                        let model = if class == ModelClass::Subset {
                            Model::Subset(SubsetModel {
                                space: space.clone(),
                                functions,
                                valuation,
                            })
                        } else {
                            Model::Dtl(DtModel {
                                space: space.clone(),
                                functions,
                                valuation,
                            })
                        };
                        if let Some(failure) = first_failure(&model, f)? {
                            let (point, scenario) = match failure {
                                Failure::Point(x) => (Some(x), None),
                                Failure::Scenario(s) => (None, Some(s)),
                            };
                            found = Some(Refutation {
                                formula: f.to_string(),
                                class,
                                model,
                                point,
                                scenario,
                            });
                            return Ok(true);
                        }
                        Ok(false)
                    })
                })?;
                if hit {
                    break;
                }
            }
        }
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn one_point_dtl_model_is_identity() {
        let cfg = GenConfig::new(ModelClass::Dtl, 7).with_points(1);
        for t in 0..20 {
            let Model::Dtl(m) = gen_model(&cfg, &mut cfg.rng(t)).unwrap().model else {
                panic!()
            };
            assert_eq!(m.points(), 1);
            assert!(m.functions.values().all(|f| *f == PointMap::identity(1)));
        }
    }

    #[test]
    fn generated_models_meet_their_class() {
        for class in ModelClass::ALL {
            let cfg = GenConfig::new(class, 11).with_points(4);
            for t in 0..200 {
                let g = gen_model(&cfg, &mut cfg.rng(t)).unwrap();
                assert!(g.model.validate().is_empty());
                match (&g.model, class) {
                    (Model::Dtl(m), ModelClass::DtlOpen) => {
                        assert!(m.functions.values().all(|f| is_open_map(&m.space, f).holds))
                    }
                    (Model::Dtl(m), ModelClass::DtlContinuous) => {
                        assert!(m.functions.values().all(|f| is_continuous(&m.space, f).holds))
                    }
                    (Model::Pdl(m), _) => assert!(crate::frameprops::is_serial(m).holds),
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn generation_is_reproducible() {
        let cfg = GenConfig::new(ModelClass::Subset, 3);
        for t in 0..20 {
            let a = gen_model(&cfg, &mut cfg.rng(t)).unwrap().model.to_json_value();
            let b = gen_model(&cfg, &mut cfg.rng(t)).unwrap().model.to_json_value();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn random_spaces_cover_non_t0() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let non_t0 = (0..200)
            .map(|_| random_space(&mut rng, 4, None))
            .filter(|s| (0..4).any(|x| (0..4).any(|y| x != y && s.min_nbhd(x) == s.min_nbhd(y))))
            .count();
        assert!(non_t0 > 0);
    }

    #[test]
    fn sampler_respects_depth_and_language() {
        let progs = vec!["a".to_string(), "b".to_string()];
        let mut s = FormulaSampler::new(FormulaLanguage::Pdl, &["p", "q", "r"], &progs);
        s.seq = true;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let f = s.formula(&mut rng);
            assert!(f.modal_depth() <= 3);
            assert!(f.in_language(crate::formula::LanguageTag::Pdl));
        }
        let mut e = FormulaSampler::new(FormulaLanguage::Epistemic, &["p", "q"], &progs);
        e.tests = true;
        for _ in 0..500 {
            let f = e.formula(&mut rng);
            assert!(f.modal_depth() <= 3);
            assert!(f.in_language(crate::formula::LanguageTag::KBoxNext));
        }
    }

    #[test]
    fn small_audits_are_sound() {
        let r = audit(ProofSystem::Spdl0, &GenConfig::new(ModelClass::Dtl, 1), 30, 3, None).unwrap();
        assert!(r.sound(), "{:?}", r.violations.first());
        let r = audit(ProofSystem::Spdl0Seq, &GenConfig::new(ModelClass::DtlOpen, 1), 30, 3, None).unwrap();
        assert!(r.sound(), "{:?}", r.violations.first());
        let r = audit(ProofSystem::Dtel, &GenConfig::new(ModelClass::Subset, 1), 30, 3, None).unwrap();
        assert!(r.sound(), "{:?}", r.violations.first());
        assert!(r.checks > 30 * 13 * 3);
    }

    #[test]
    fn seq_fails_without_openness() {
        let cfg = GenConfig::new(ModelClass::Dtl, 2).with_points(4);
        let r = audit(ProofSystem::Spdl0Seq, &cfg, 200, 10, Some(&["Seq".to_string()])).unwrap();
        assert!(!r.sound());
        assert!(r.violations.iter().all(|v| v.reverified));
    }

    #[test]
    fn illegal_pairing_rejected() {
        assert!(matches!(
            audit(ProofSystem::Dtel, &GenConfig::new(ModelClass::Dtl, 0), 1, 1, None),
            Err(AuditError::IllegalPairing { .. })
        ));
        assert!(matches!(
            audit(ProofSystem::Spdl0, &GenConfig::new(ModelClass::Dtl, 0), 1, 1, Some(&["KI".to_string()])),
            Err(AuditError::UnknownScheme { .. })
        ));
    }

    #[test]
    fn search_examples() {
        assert!(search_countermodel(&parse("box p -> p").unwrap(), 3, ModelClass::Dtl)
            .unwrap()
            .is_none());
        let r = search_countermodel(&parse("p -> box p").unwrap(), 3, ModelClass::Dtl)
            .unwrap()
            .unwrap();
        let Model::Dtl(m) = &r.model else { panic!() };
        assert_eq!(m.space, TopoSpace::sierpinski());
        assert_eq!(m.valuation.get("p"), PointSet::singleton(0));
        assert_eq!(r.point, Some(0));

        let seq = parse("<a;b>p <-> <a><b>p").unwrap();
        let r = search_countermodel(&seq, 4, ModelClass::Dtl).unwrap().unwrap();
        let Model::Dtl(m) = &r.model else { panic!() };
        assert!(m.points() <= 4);
        assert!(!eval_dtl(m, &seq).unwrap().contains(r.point.unwrap()));
        assert!(search_countermodel(&seq, 3, ModelClass::DtlOpen).unwrap().is_none());
        assert!(search_countermodel(&seq, 3, ModelClass::Pdl).unwrap().is_none());
    }

    #[test]
    fn subset_search_finds_undefined_next() {
        let r = search_countermodel(&parse("O[a]top").unwrap(), 2, ModelClass::Subset)
            .unwrap()
            .unwrap();
        let Model::Subset(m) = &r.model else { panic!() };
        let s = r.scenario.unwrap();
        assert_eq!(m.functions["a"].apply(s.point), None);
    }

    #[test]
    fn partial_map_enumeration() {
        let maps = all_partial_maps(2);
        assert_eq!(maps.len(), 9);
        assert_eq!(maps[0], PointMap::empty(2));
        assert_eq!(serial_relations(2).len(), 9);
    }
}
