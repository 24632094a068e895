//! Command-line interface. Every command prints one JSON document on
//! standard output. Exit codes: 0 success or property holds, 1 property
//! fails or a countermodel was found, 2 usage or input error.

use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::announce::{announce, check_test_announcement_identity};
use crate::checker::{eval_dtl, eval_pdl_relational, SubsetEvaluator};
use crate::formula::{parse, Formula, LanguageTag};
use crate::frameprops::{is_continuous, is_open_map, is_serial, validates_scheme, FrameReport, SchemeKind};
use crate::harness::{audit, search_countermodel, GenConfig, ModelClass};
use crate::models::{Model, PointMap, Scenario};
use crate::proofkit::{check_derivation, Derivation, ProofSystem};
use crate::topology::TopoSpace;
use crate::transform::{build_network_space, preservation_report, DEFAULT_BUDGET};

/// Environment variable capping model sizes in generation and search.
pub const MAX_POINTS_VAR: &str = "TOPODYN_MAX_POINTS";
pub const DEFAULT_MAX_POINTS: usize = 12;

#[derive(Debug, Parser)]
#[command(name = "topodyn", version, about = "Model checking and proof checking for dynamic topological logics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Property {
    Continuity,
    Openness,
    Seriality,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a formula and print its syntax tree.
    Parse {
        #[arg(short = 'f', long)]
        formula: String,
    },
    /// Evaluate a formula in a model.
    Eval {
        #[arg(short = 'm', long)]
        model: String,
        #[arg(short = 'f', long)]
        formula: String,
        /// Point at which to report truth (relational and topological models).
        #[arg(long, conflicts_with = "scenario")]
        at: Option<usize>,
        /// `x,i`: the point and the index of the open set in the space's open list.
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Decide a frame property of a model's programs.
    Frame {
        #[arg(short = 'm', long)]
        model: String,
        #[arg(long, value_enum)]
        prop: Property,
        /// Also decide validity of the corresponding axiom scheme.
        #[arg(long)]
        scheme: bool,
        /// Restrict to one program.
        #[arg(long)]
        program: Option<String>,
    },
    /// Build the network space of a serial relational model.
    Transform {
        #[arg(short = 'm', long)]
        model: String,
        #[arg(long)]
        depth: usize,
        /// Formulas separated by `;` outside parentheses and brackets.
        #[arg(long)]
        check: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Announce a formula at a scenario and compare with the test program.
    Announce {
        #[arg(short = 'm', long)]
        model: String,
        #[arg(long)]
        phi: String,
        #[arg(long, default_value = "top")]
        psi: String,
        #[arg(long)]
        scenario: String,
    },
    /// Check a derivation.
    Prove {
        #[arg(short = 'd', long)]
        derivation: String,
    },
    /// Randomized soundness audit of a proof system.
    Audit {
        #[arg(long)]
        system: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        class: Option<String>,
        #[arg(long, default_value_t = 10)]
        instances: usize,
        #[arg(long, default_value_t = 5)]
        max_points: usize,
        #[arg(long, default_value_t = 3)]
        max_programs: usize,
        /// Audit only the named schemes (repeatable).
        #[arg(long = "scheme")]
        schemes: Vec<String>,
    },
    /// Search for a countermodel to a formula.
    Refute {
        #[arg(short = 'f', long)]
        formula: String,
        #[arg(long, default_value_t = 4)]
        bound: usize,
        #[arg(long, default_value = "dtl")]
        class: String,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(e.to_string())
    }
}

type CmdResult = Result<(i32, Value, String), Failure>;

fn ok(value: Value) -> CmdResult {
    Ok((0, value, String::new()))
}

fn verdict(holds: bool, value: Value) -> CmdResult {
    Ok((if holds { 0 } else { 1 }, value, String::new()))
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Output {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Output {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match execute(cli.command) {
        Ok((code, value, stderr)) => Output {
            code,
            stdout: format!("{}\n", serde_json::to_string_pretty(&value).expect("JSON serializes")),
            stderr,
        },
        Err(Failure(message)) => Output {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        },
    }
}

fn max_points() -> Result<usize, Failure> {
    match std::env::var(MAX_POINTS_VAR) {
        Err(_) => Ok(DEFAULT_MAX_POINTS),
        Ok(v) => v
            .parse()
            .map_err(|_| Failure(format!("{MAX_POINTS_VAR} must be a positive integer, got `{v}`"))),
    }
}

fn read(path: &str) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("cannot read `{path}`: {e}")))
}

fn load_model(path: &str) -> Result<Model, Failure> {
    Model::from_json(&read(path)?).map_err(|e| Failure(format!("{path}: {e}")))
}

fn parse_formula(text: &str) -> Result<Formula, Failure> {
    parse(text).map_err(|e| Failure(format!("`{text}`: {e}")))
}

fn parse_scenario(text: &str, space: &TopoSpace) -> Result<Scenario, Failure> {
    let bad = || Failure(format!("scenario must be `point,open-index`, got `{text}`"));
    let (x, i) = text.split_once(',').ok_or_else(bad)?;
    let x: usize = x.trim().parse().map_err(|_| bad())?;
    let i: usize = i.trim().parse().map_err(|_| bad())?;
    let open = *space
        .opens()
        .get(i)
        .ok_or_else(|| Failure(format!("open index {i} out of range ({} opens)", space.opens().len())))?;
    let s = Scenario::new(x, open);
    s.check(space)?;
    Ok(s)
}

/// Splits on `;` outside parentheses and brackets, so sequenced programs
/// such as `<a;b>p` stay intact.
fn split_formulas(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in text.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            '<' if !text[i..].starts_with("<->") => depth += 1,
            ')' | ']' => depth -= 1,
            '>' if !text[..i].ends_with('-') => depth -= 1,
            ';' if depth == 0 => {
                out.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out.into_iter().map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn execute(command: Command) -> CmdResult {
    match command {
        Command::Parse { formula } => {
            let f = parse_formula(&formula)?;
            let languages: Vec<&str> = LanguageTag::ALL
                .into_iter()
                .filter(|&t| f.in_language(t))
                .map(LanguageTag::name)
                .collect();
            ok(json!({
                "formula": f.to_string(),
                "modal_depth": f.modal_depth(),
                "languages": languages,
                "ast": f,
            }))
        }
        Command::Eval {
            model,
            formula,
            at,
            scenario,
        } => {
            let m = load_model(&model)?;
            let f = parse_formula(&formula)?;
            match &m {
                Model::Subset(sm) => {
                    if at.is_some() {
                        return Err(Failure("subset models are evaluated at scenarios; use --scenario".into()));
                    }
                    let mut ev = SubsetEvaluator::new(sm);
                    if let Some(text) = scenario {
                        let s = parse_scenario(&text, &sm.space)?;
                        let truth = ev.eval(&f, &s)?;
                        return verdict(truth, json!({ "formula": f.to_string(), "scenario": s, "value": truth }));
                    }
                    let mut rows = Vec::new();
                    for &u in sm.space.opens() {
                        rows.push(json!({ "open": u, "extension": ev.extension(&f, u)? }));
                    }
                    ok(json!({ "formula": f.to_string(), "extensions": rows }))
                }
                Model::Pdl(_) | Model::Dtl(_) => {
                    if scenario.is_some() {
                        return Err(Failure("--scenario applies to subset models; use --at".into()));
                    }
                    let ext = match &m {
                        Model::Pdl(pm) => eval_pdl_relational(pm, &f)?,
                        Model::Dtl(dm) => eval_dtl(dm, &f)?,
                        Model::Subset(_) => unreachable!(),
                    };
                    match at {
                        Some(x) if x >= m.points() => Err(Failure(format!("point {x} out of range"))),
                        Some(x) => {
                            let truth = ext.contains(x);
                            verdict(truth, json!({ "formula": f.to_string(), "point": x, "value": truth }))
                        }
                        None => ok(json!({ "formula": f.to_string(), "extension": ext })),
                    }
                }
            }
        }
        Command::Frame {
            model,
            prop,
            scheme,
            program,
        } => frame(&load_model(&model)?, prop, scheme, program.as_deref()),
        Command::Transform {
            model,
            depth,
            check,
            budget,
        } => {
            let Model::Pdl(pm) = load_model(&model)? else {
                return Err(Failure("transform expects a relational (pdl) model".into()));
            };
            let formulas: Vec<Formula> = check
                .as_deref()
                .map(split_formulas)
                .unwrap_or_default()
                .into_iter()
                .map(parse_formula)
                .collect::<Result<_, _>>()?;
            let ns = build_network_space(&pm, depth, budget)?;
            let shift_failures = ns.check_shift_openness(&pm);
            let report = preservation_report(&ns, &pm, &formulas)?;
            let holds = report.holds() && shift_failures.is_empty();
            verdict(
                holds,
                json!({
                    "network_space": ns.to_json(),
                    "shift_openness_failures": shift_failures,
                    "preservation": report,
                }),
            )
        }
        Command::Announce {
            model,
            phi,
            psi,
            scenario,
        } => {
            let Model::Subset(sm) = load_model(&model)? else {
                return Err(Failure("announce expects a subset model".into()));
            };
            let phi = parse_formula(&phi)?;
            let psi = parse_formula(&psi)?;
            let s = parse_scenario(&scenario, &sm.space)?;
            let result = announce(&sm, &phi, &s)?;
            let identity = check_test_announcement_identity(&sm, &phi, &psi, &s)?;
            verdict(
                identity.agrees(),
                json!({
                    "announcement": result,
                    "identity": {
                        "via_test": identity.via_test,
                        "via_announcement": identity.via_announcement,
                        "agrees": identity.agrees(),
                    },
                }),
            )
        }
        Command::Prove { derivation } => {
            let d = Derivation::from_json(&read(&derivation)?).map_err(|e| Failure(format!("{derivation}: {e}")))?;
            match check_derivation(&d) {
                Ok(()) => ok(json!({ "ok": true, "system": d.system, "steps": d.steps.len() })),
                Err(e) => verdict(
                    false,
                    json!({ "ok": false, "system": d.system, "step": e.step(), "error": e.to_string() }),
                ),
            }
        }
        Command::Audit {
            system,
            trials,
            seed,
            class,
            instances,
            max_points: points,
            max_programs,
            schemes,
        } => {
            let system = ProofSystem::from_name(&system)
                .ok_or_else(|| Failure(format!("unknown system `{system}` (expected SPDL0, SPDL0_SEQ or DTEL)")))?;
            let class: ModelClass = match class {
                Some(c) => c.parse().map_err(Failure)?,
                None => match system {
                    ProofSystem::Spdl0 => ModelClass::Dtl,
                    ProofSystem::Spdl0Seq => ModelClass::DtlOpen,
                    ProofSystem::Dtel => ModelClass::Subset,
                },
            };
            let cap = max_points()?;
            if points > cap {
                return Err(Failure(format!("--max-points {points} exceeds {MAX_POINTS_VAR}={cap}")));
            }
            let mut cfg = GenConfig::new(class, seed).with_points(points).with_programs(max_programs);
            cfg.atoms = 3;
            let filter = (!schemes.is_empty()).then_some(schemes.as_slice());
            let start = Instant::now();
            let report = audit(system, &cfg, trials, instances, filter)?;
            let elapsed = format!("elapsed: {:.3}s\n", start.elapsed().as_secs_f64());
            let code = if report.sound() { 0 } else { 1 };
            Ok((code, serde_json::to_value(&report)?, elapsed))
        }
        Command::Refute { formula, bound, class } => {
            let f = parse_formula(&formula)?;
            let class: ModelClass = class.parse().map_err(Failure)?;
            let cap = max_points()?;
            if bound > cap {
                return Err(Failure(format!("--bound {bound} exceeds {MAX_POINTS_VAR}={cap}")));
            }
            match search_countermodel(&f, bound, class)? {
                None => ok(json!("none")),
                Some(r) => verdict(false, serde_json::to_value(&r)?),
            }
        }
    }
}

fn frame(model: &Model, prop: Property, scheme: bool, program: Option<&str>) -> CmdResult {
    let mut reports: Vec<FrameReport> = Vec::new();
    if let Property::Seriality = prop {
        let Model::Pdl(pm) = model else {
            return Err(Failure("seriality applies to relational (pdl) models".into()));
        };
        if scheme {
            return Err(Failure("--scheme applies to continuity and openness".into()));
        }
        let report = is_serial(pm);
        return verdict(report.holds, json!({ "reports": [report] }));
    }
    let (space, functions) = match model {
        Model::Dtl(m) => (&m.space, &m.functions),
        Model::Subset(m) => (&m.space, &m.functions),
        Model::Pdl(_) => return Err(Failure("continuity and openness apply to topological models".into())),
    };
    let selected: Vec<(&String, &PointMap)> = match program {
        Some(p) => vec![functions
            .get_key_value(p)
            .ok_or_else(|| Failure(format!("unknown program `{p}`")))?],
        None => functions.iter().collect(),
    };
    let mut agree = true;
    for (name, f) in selected {
        let (semantic, kind) = match prop {
            Property::Continuity => {
                if !f.is_total() {
                    return Err(Failure(format!("continuity is decided for total maps; `{name}` is partial")));
                }
                (is_continuous(space, f), SchemeKind::Continuity)
            }
            Property::Openness => (is_open_map(space, f), SchemeKind::Openness),
            Property::Seriality => unreachable!(),
        };
        let holds = semantic.holds;
        reports.push(semantic.for_program(name));
        if scheme {
            let by_scheme = validates_scheme(space, f, kind).for_program(name);
            agree &= by_scheme.holds == holds;
            reports.push(by_scheme);
        }
    }
    let holds = reports.iter().all(|r| r.holds);
    let stderr = if agree {
        String::new()
    } else {
        "warning: semantic and scheme routes disagree\n".to_string()
    };
    Ok((
        if holds { 0 } else { 1 },
        json!({ "reports": reports, "routes_agree": agree }),
        stderr,
    ))
}
