//! Hilbert-style derivation checking for serial PDL over atomic programs,
//! its extension with sequencing, and the dynamic topological epistemic
//! system.
//!
//! Axiom schemes are formula templates whose metavariables are the atoms
//! `phi`, `psi` and the programs `pi`, `pi1`, `pi2`. Formulas are compared
//! after expanding modal abbreviations, so `[a]p` and `~<a>~p` are the same
//! formula; Boolean connectives are kept as written.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{parse, parse_program, Formula, Program};

/// Largest number of propositional variables (atoms and maximal modal
/// subformulas) a tautology check will enumerate.
pub const MAX_CPL_VARIABLES: usize = 16;

const FORMULA_METAVARS: [&str; 2] = ["phi", "psi"];
const PROGRAM_METAVARS: [&str; 3] = ["pi", "pi1", "pi2"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProofSystem {
    #[serde(rename = "SPDL0")]
    Spdl0,
    #[serde(rename = "SPDL0_SEQ")]
    Spdl0Seq,
    #[serde(rename = "DTEL")]
    Dtel,
}

impl ProofSystem {
    pub const ALL: [ProofSystem; 3] = [ProofSystem::Spdl0, ProofSystem::Spdl0Seq, ProofSystem::Dtel];

    pub fn name(self) -> &'static str {
        match self {
            ProofSystem::Spdl0 => "SPDL0",
            ProofSystem::Spdl0Seq => "SPDL0_SEQ",
            ProofSystem::Dtel => "DTEL",
        }
    }

    pub fn from_name(name: &str) -> Option<ProofSystem> {
        ProofSystem::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Schemes other than `CPL`, in matching order.
    pub fn schemes(self) -> Vec<Scheme> {
        let names: &[&str] = match self {
            ProofSystem::Spdl0 => &["K_pi", "D_pi"],
            ProofSystem::Spdl0Seq => &["K_pi", "D_pi", "Seq"],
            ProofSystem::Dtel => &[
                "K_K", "T_K", "4_K", "5_K", "K_box", "T_box", "4_box", "KI", "NegPC_pi", "AndC_pi", "KPC_pi", "O_pi",
            ],
        };
        names.iter().map(|n| Scheme::named(n).expect("known scheme")).collect()
    }

    /// Resolves a scheme name as written in a derivation.
    pub fn resolve(self, name: &str) -> Option<&'static str> {
        let canonical = match (self, name) {
            (ProofSystem::Dtel, "K") => "K_K",
            (_, "K") => "K_pi",
            (_, "D") => "D_pi",
            (_, other) => other,
        };
        if canonical == "CPL" {
            return Some("CPL");
        }
        self.schemes().into_iter().map(|s| s.name).find(|&n| n == canonical)
    }
}

impl fmt::Display for ProofSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct Scheme {
    pub name: &'static str,
    pub template: Formula,
}

impl Scheme {
    pub fn named(name: &str) -> Option<Scheme> {
        let (name, src): (&'static str, &str) = match name {
            "K_pi" => ("K_pi", "[pi](phi -> psi) -> ([pi]phi -> [pi]psi)"),
            "D_pi" => ("D_pi", "[pi]phi -> <pi>phi"),
            "Seq" => ("Seq", "<pi1;pi2>phi <-> <pi1><pi2>phi"),
            "K_K" => ("K_K", "K(phi -> psi) -> (K phi -> K psi)"),
            "T_K" => ("T_K", "K phi -> phi"),
            "4_K" => ("4_K", "K phi -> K K phi"),
            "5_K" => ("5_K", "~K phi -> K ~K phi"),
            "K_box" => ("K_box", "box(phi -> psi) -> (box phi -> box psi)"),
            "T_box" => ("T_box", "box phi -> phi"),
            "4_box" => ("4_box", "box phi -> box box phi"),
            "KI" => ("KI", "K phi -> box phi"),
            "NegPC_pi" => ("NegPC_pi", "O[pi]~phi <-> (~O[pi]phi & O[pi]top)"),
            "AndC_pi" => ("AndC_pi", "O[pi](phi & psi) <-> (O[pi]phi & O[pi]psi)"),
            "KPC_pi" => ("KPC_pi", "O[pi]top -> (O[pi]K phi <-> K(O[pi]top -> O[pi]phi))"),
            "O_pi" => ("O_pi", "(box ~O[pi]phi & O[pi]top) -> O[pi]box ~phi"),
            _ => return None,
        };
        Some(Scheme {
            name,
            template: parse(src).expect("scheme templates parse"),
        })
    }

    pub fn formula_metavars(&self) -> Vec<&'static str> {
        let atoms = self.template.atoms();
        FORMULA_METAVARS.into_iter().filter(|m| atoms.contains(*m)).collect()
    }

    pub fn program_metavars(&self) -> Vec<&'static str> {
        let programs = self.template.programs();
        PROGRAM_METAVARS.into_iter().filter(|m| programs.contains(*m)).collect()
    }

    /// Replaces metavariables simultaneously. Missing bindings are left as
    /// they are.
    pub fn instantiate(&self, subst: &Substitution) -> Formula {
        instantiate(&self.template, subst)
    }

    /// Bindings under which the template instantiates to `f`, if any.
    pub fn matches(&self, f: &Formula) -> Option<Substitution> {
        let mut subst = Substitution::default();
        match_formula(&self.template.normalize(), &f.normalize(), &mut subst).then_some(subst)
    }
}

/// Metavariable bindings of a scheme instance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    pub formulas: BTreeMap<String, Formula>,
    pub programs: BTreeMap<String, Program>,
}

fn instantiate(t: &Formula, s: &Substitution) -> Formula {
    let rec = |f: &Formula| instantiate(f, s);
    let prog = |p: &Program| match p {
        Program::Atomic(n) => s.programs.get(n).cloned().unwrap_or_else(|| p.clone()),
        Program::Seq(a, b) => Program::seq(instantiate_program(a, s), instantiate_program(b, s)),
        Program::Test(body) => Program::Test(Box::new(instantiate(body, s))),
    };
    match t {
        Formula::Atom(n) => s.formulas.get(n).cloned().unwrap_or_else(|| t.clone()),
        Formula::Top => Formula::Top,
        Formula::Not(f) => Formula::not(rec(f)),
        Formula::And(f, g) => Formula::and(rec(f), rec(g)),
        Formula::Or(f, g) => Formula::or(rec(f), rec(g)),
        Formula::Implies(f, g) => Formula::implies(rec(f), rec(g)),
        Formula::Iff(f, g) => Formula::iff(rec(f), rec(g)),
        Formula::Diamond(p, f) => Formula::diamond(prog(p), rec(f)),
        Formula::BoxPdl(p, f) => Formula::box_pdl(prog(p), rec(f)),
        Formula::Int(f) => Formula::int(rec(f)),
        Formula::Cl(f) => Formula::cl(rec(f)),
        Formula::Know(f) => Formula::know(rec(f)),
        Formula::KHat(f) => Formula::khat(rec(f)),
        Formula::Next(p, f) => Formula::next(prog(p), rec(f)),
    }
}

fn instantiate_program(p: &Program, s: &Substitution) -> Program {
    match p {
        Program::Atomic(n) => s.programs.get(n).cloned().unwrap_or_else(|| p.clone()),
        Program::Seq(a, b) => Program::seq(instantiate_program(a, s), instantiate_program(b, s)),
        Program::Test(body) => Program::Test(Box::new(instantiate(body, s))),
    }
}

fn bind<T: PartialEq + Clone>(map: &mut BTreeMap<String, T>, key: &str, value: &T) -> bool {
    match map.get(key) {
        Some(bound) => bound == value,
        None => {
            map.insert(key.to_string(), value.clone());
            true
        }
    }
}

fn match_program(t: &Program, p: &Program, s: &mut Substitution) -> bool {
    match (t, p) {
        (Program::Atomic(n), _) if PROGRAM_METAVARS.contains(&n.as_str()) => bind(&mut s.programs, n, p),
        (Program::Atomic(a), Program::Atomic(b)) => a == b,
        (Program::Seq(a1, b1), Program::Seq(a2, b2)) => match_program(a1, a2, s) && match_program(b1, b2, s),
        (Program::Test(a), Program::Test(b)) => match_formula(a, b, s),
        _ => false,
    }
}

/// Both sides must already be normalized.
fn match_formula(t: &Formula, f: &Formula, s: &mut Substitution) -> bool {
    use Formula::*;
    match (t, f) {
        (Atom(n), _) if FORMULA_METAVARS.contains(&n.as_str()) => bind(&mut s.formulas, n, f),
        (Atom(a), Atom(b)) => a == b,
        (Top, Top) => true,
        (Not(a), Not(b)) | (Int(a), Int(b)) | (Cl(a), Cl(b)) | (Know(a), Know(b)) | (KHat(a), KHat(b)) => {
            match_formula(a, b, s)
        }
        (And(a1, b1), And(a2, b2))
        | (Or(a1, b1), Or(a2, b2))
        | (Implies(a1, b1), Implies(a2, b2))
        | (Iff(a1, b1), Iff(a2, b2)) => match_formula(a1, a2, s) && match_formula(b1, b2, s),
        (Diamond(p1, a), Diamond(p2, b)) | (BoxPdl(p1, a), BoxPdl(p2, b)) | (Next(p1, a), Next(p2, b)) => {
            match_program(p1, p2, s) && match_formula(a, b, s)
        }
        _ => false,
    }
}

/// Tautology check treating atoms and maximal modal subformulas as
/// propositional variables. `None` when there are too many variables.
pub fn is_tautology(f: &Formula) -> Option<bool> {
    let f = f.normalize();
    let mut vars: Vec<&Formula> = Vec::new();
    collect_variables(&f, &mut vars);
    if vars.len() > MAX_CPL_VARIABLES {
        return None;
    }
    Some((0u32..1 << vars.len()).all(|row| truth(&f, &vars, row)))
}

fn collect_variables<'a>(f: &'a Formula, vars: &mut Vec<&'a Formula>) {
    match f {
        Formula::Top => {}
        Formula::Not(g) => collect_variables(g, vars),
        Formula::And(g, h) | Formula::Or(g, h) | Formula::Implies(g, h) | Formula::Iff(g, h) => {
            collect_variables(g, vars);
            collect_variables(h, vars);
        }
        _ => {
            if !vars.contains(&f) {
                vars.push(f);
            }
        }
    }
}

fn truth(f: &Formula, vars: &[&Formula], row: u32) -> bool {
    match f {
        Formula::Top => true,
        Formula::Not(g) => !truth(g, vars, row),
        Formula::And(g, h) => truth(g, vars, row) && truth(h, vars, row),
        Formula::Or(g, h) => truth(g, vars, row) || truth(h, vars, row),
        Formula::Implies(g, h) => !truth(g, vars, row) || truth(h, vars, row),
        Formula::Iff(g, h) => truth(g, vars, row) == truth(h, vars, row),
        _ => {
            let i = vars.iter().position(|v| *v == f).expect("variable collected");
            row >> i & 1 == 1
        }
    }
}

/// Name of a scheme `f` instantiates in `system`, trying `CPL` first.
pub fn match_axiom(f: &Formula, system: ProofSystem) -> Option<&'static str> {
    if is_tautology(f) == Some(true) {
        return Some("CPL");
    }
    system.schemes().into_iter().find(|s| s.matches(f).is_some()).map(|s| s.name)
}

/// Justification of a derivation step. Step numbers are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Justification {
    Axiom(String),
    /// `[i, j]`: step `i` is the antecedent, step `j` the implication.
    Mp([usize; 2]),
    Nec {
        #[serde(rename = "mod")]
        modality: String,
        from: usize,
    },
    Mon {
        prog: String,
        from: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Step {
    pub formula: String,
    pub by: Justification,
    /// Optional explicit metavariable bindings for axiom steps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subst: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Derivation {
    pub system: ProofSystem,
    pub steps: Vec<Step>,
}

impl Derivation {
    pub fn from_json(text: &str) -> Result<Derivation, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("step {step}: {message}")]
    Parse { step: usize, message: String },
    #[error("step {step}: not an instance of {scheme}")]
    BadAxiomInstance { step: usize, scheme: String },
    #[error("step {step}: bad rule application: {reason}")]
    BadRuleApplication { step: usize, reason: String },
    #[error("step {step}: refers to step {target}, which is not an earlier step")]
    ForwardReference { step: usize, target: usize },
    #[error("step {step}: more than {MAX_CPL_VARIABLES} propositional variables for a tautology check")]
    TooLarge { step: usize },
}

impl ProofError {
    pub fn step(&self) -> usize {
        match self {
            ProofError::Parse { step, .. }
            | ProofError::BadAxiomInstance { step, .. }
            | ProofError::BadRuleApplication { step, .. }
            | ProofError::ForwardReference { step, .. }
            | ProofError::TooLarge { step } => *step,
        }
    }
}

fn same(a: &Formula, b: &Formula) -> bool {
    a.normalize() == b.normalize()
}

fn premise(formulas: &[Formula], step: usize, target: usize) -> Result<&Formula, ProofError> {
    if target == 0 || target >= step {
        return Err(ProofError::ForwardReference { step, target });
    }
    Ok(&formulas[target - 1])
}

fn check_axiom(
    f: &Formula,
    name: &str,
    subst: Option<&BTreeMap<String, String>>,
    system: ProofSystem,
    step: usize,
) -> Result<(), ProofError> {
    let bad = || ProofError::BadAxiomInstance {
        step,
        scheme: name.to_string(),
    };
    let canonical = system.resolve(name).ok_or_else(bad)?;
    if canonical == "CPL" {
        return match is_tautology(f) {
            Some(true) => Ok(()),
            Some(false) => Err(bad()),
            None => Err(ProofError::TooLarge { step }),
        };
    }
    let scheme = Scheme::named(canonical).expect("resolved scheme exists");
    match subst {
        None => scheme.matches(f).map(|_| ()).ok_or_else(bad),
        Some(given) => {
            let mut s = Substitution::default();
            for (var, text) in given {
                let parsed = if PROGRAM_METAVARS.contains(&var.as_str()) {
                    parse_program(text).map(|p| {
                        s.programs.insert(var.clone(), p);
                    })
                } else if FORMULA_METAVARS.contains(&var.as_str()) {
                    parse(text).map(|g| {
                        s.formulas.insert(var.clone(), g);
                    })
                } else {
                    return Err(bad());
                };
                parsed.map_err(|e| ProofError::Parse {
                    step,
                    message: format!("in substitution for `{var}`: {e}"),
                })?;
            }
            if same(&scheme.instantiate(&s), f) {
                Ok(())
            } else {
                Err(bad())
            }
        }
    }
}

/// Checks every step against its justification, stopping at the first
/// failure.
pub fn check_derivation(d: &Derivation) -> Result<(), ProofError> {
    let system = d.system;
    let mut formulas: Vec<Formula> = Vec::with_capacity(d.steps.len());
    for (idx, s) in d.steps.iter().enumerate() {
        let step = idx + 1;
        let f = parse(&s.formula).map_err(|e| ProofError::Parse {
            step,
            message: e.to_string(),
        })?;
        let rule = |reason: String| ProofError::BadRuleApplication { step, reason };
        match &s.by {
            Justification::Axiom(name) => check_axiom(&f, name, s.subst.as_ref(), system, step)?,
            Justification::Mp([i, j]) => {
                let antecedent = premise(&formulas, step, *i)?;
                let implication = premise(&formulas, step, *j)?;
                let expected = Formula::implies(antecedent.clone(), f.clone());
                if !same(implication, &expected) {
                    return Err(rule(format!("step {j} is not `{expected}`")));
                }
            }
            Justification::Nec { modality, from } => {
                let body = premise(&formulas, step, *from)?.clone();
                let expected = match (system, modality.as_str()) {
                    (ProofSystem::Dtel, "K") => Formula::know(body),
                    (ProofSystem::Dtel, "box") => Formula::int(body),
                    (ProofSystem::Dtel, _) => {
                        return Err(rule(format!(
                            "necessitation for `O[{modality}]` is not a rule of {system}"
                        )))
                    }
                    (_, m) => {
                        let p = parse_program(m).map_err(|_| rule(format!("`{m}` is not a program of {system}")))?;
                        Formula::box_pdl(p, body)
                    }
                };
                if !same(&f, &expected) {
                    return Err(rule(format!("expected `{expected}`")));
                }
            }
            Justification::Mon { prog, from } => {
                if system != ProofSystem::Dtel {
                    return Err(rule(format!("monotonicity is not a rule of {system}")));
                }
                let p = parse_program(prog).map_err(|e| rule(e.to_string()))?;
                let Formula::Implies(a, b) = premise(&formulas, step, *from)?.clone() else {
                    return Err(rule(format!("step {from} is not an implication")));
                };
                let expected = Formula::implies(Formula::next(p.clone(), *a), Formula::next(p, *b));
                if !same(&f, &expected) {
                    return Err(rule(format!("expected `{expected}`")));
                }
            }
        }
        formulas.push(f);
    }
    Ok(())
}

/// Four-step proof of `[a](p & q) -> [a]p`.
pub fn sample_derivation() -> Derivation {
    let step = |formula: &str, by: Justification| Step {
        formula: formula.to_string(),
        by,
        subst: None,
    };
    Derivation {
        system: ProofSystem::Spdl0,
        steps: vec![
            step("p & q -> p", Justification::Axiom("CPL".into())),
            step(
                "[a](p & q -> p)",
                Justification::Nec {
                    modality: "a".into(),
                    from: 1,
                },
            ),
            step("[a](p & q -> p) -> ([a](p & q) -> [a]p)", Justification::Axiom("K".into())),
            step("[a](p & q) -> [a]p", Justification::Mp([2, 3])),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn scheme_matching_examples() {
        assert_eq!(match_axiom(&f("[a](p -> q) -> ([a]p -> [a]q)"), ProofSystem::Spdl0), Some("K_pi"));
        assert_eq!(match_axiom(&f("[a]p -> <a>p"), ProofSystem::Spdl0), Some("D_pi"));
        assert_eq!(
            match_axiom(&f("O[a]~p <-> (~O[a]p & O[a]top)"), ProofSystem::Dtel),
            Some("NegPC_pi")
        );
        assert_eq!(match_axiom(&f("<a;b>p <-> <a><b>p"), ProofSystem::Spdl0), None);
        assert_eq!(match_axiom(&f("<a;b>p <-> <a><b>p"), ProofSystem::Spdl0Seq), Some("Seq"));
        assert_eq!(match_axiom(&f("[a]p -> [a]q"), ProofSystem::Spdl0), None);
        // abbreviations are compared up to expansion
        assert_eq!(match_axiom(&f("~<a>~p -> <a>p"), ProofSystem::Spdl0), Some("D_pi"));
        assert_eq!(match_axiom(&f("K ~p -> box ~p"), ProofSystem::Dtel), Some("KI"));
        assert_eq!(match_axiom(&f("~K Khat p -> K ~K Khat p"), ProofSystem::Dtel), Some("5_K"));
    }

    #[test]
    fn metavariables_bind_consistently() {
        let k = Scheme::named("K_pi").unwrap();
        assert!(k.matches(&f("[a](p -> q) -> ([b]p -> [a]q)")).is_none());
        assert!(k.matches(&f("[a](p -> q) -> ([a]q -> [a]q)")).is_none());
        let s = k.matches(&f("[a;b](<c>r -> p) -> ([a;b]<c>r -> [a;b]p)")).unwrap();
        assert_eq!(s.programs["pi"], parse_program("a;b").unwrap());
    }

    #[test]
    fn instantiate_round_trips_with_match() {
        for system in ProofSystem::ALL {
            for scheme in system.schemes() {
                let mut s = Substitution::default();
                for (i, m) in scheme.formula_metavars().into_iter().enumerate() {
                    s.formulas.insert(m.into(), f(["phi & q", "~psi"][i]));
                }
                for (i, m) in scheme.program_metavars().into_iter().enumerate() {
                    s.programs.insert(m.into(), parse_program(["pi", "b;c"][i]).unwrap());
                }
                let inst = scheme.instantiate(&s);
                assert!(scheme.matches(&inst).is_some(), "{} on {inst}", scheme.name);
            }
        }
    }

    #[test]
    fn tautologies() {
        assert_eq!(is_tautology(&f("p & q -> p")), Some(true));
        assert_eq!(is_tautology(&f("[a]p | ~[a]p")), Some(true));
        assert_eq!(is_tautology(&f("[a]p -> <a>p")), Some(false));
        assert_eq!(is_tautology(&f("[a]p <-> ~<a>~p")), Some(true));
        assert_eq!(is_tautology(&f("top")), Some(true));
        let wide = (0..17).map(|i| format!("p{i}")).collect::<Vec<_>>().join(" | ");
        assert_eq!(is_tautology(&f(&wide)), None);
    }

    #[test]
    fn sample_checks() {
        assert_eq!(check_derivation(&sample_derivation()), Ok(()));
        // prefixes of accepted derivations are accepted
        let mut d = sample_derivation();
        while !d.steps.is_empty() {
            d.steps.pop();
            assert_eq!(check_derivation(&d), Ok(()));
        }
    }

    #[test]
    fn json_format() {
        let text = r#"{"system":"SPDL0","steps":[
            {"formula":"p & q -> p","by":{"axiom":"CPL"}},
            {"formula":"[a](p & q -> p)","by":{"nec":{"mod":"a","from":1}}},
            {"formula":"[a](p & q -> p) -> ([a](p & q) -> [a]p)","by":{"axiom":"K"},
             "subst":{"pi":"a","phi":"p & q","psi":"p"}},
            {"formula":"[a](p & q) -> [a]p","by":{"mp":[2,3]}}]}"#;
        let d = Derivation::from_json(text).unwrap();
        assert_eq!(check_derivation(&d), Ok(()));
        let back: Derivation = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn rejections() {
        let mut d = sample_derivation();
        d.steps[3].by = Justification::Mp([3, 2]);
        assert!(matches!(check_derivation(&d), Err(ProofError::BadRuleApplication { step: 4, .. })));

        let mut d = sample_derivation();
        d.steps[2].by = Justification::Axiom("D".into());
        assert!(matches!(check_derivation(&d), Err(ProofError::BadAxiomInstance { step: 3, .. })));

        let mut d = sample_derivation();
        d.steps[1].by = Justification::Nec {
            modality: "a".into(),
            from: 2,
        };
        assert_eq!(
            check_derivation(&d),
            Err(ProofError::ForwardReference { step: 2, target: 2 })
        );

        let mut d = sample_derivation();
        d.steps[2].subst = Some(BTreeMap::from([("phi".to_string(), "q".to_string())]));
        assert!(matches!(check_derivation(&d), Err(ProofError::BadAxiomInstance { step: 3, .. })));
    }

    #[test]
    fn dtel_rules() {
        let nec_next = Derivation {
            system: ProofSystem::Dtel,
            steps: vec![
                Step {
                    formula: "top".into(),
                    by: Justification::Axiom("CPL".into()),
                    subst: None,
                },
                Step {
                    formula: "O[a]top".into(),
                    by: Justification::Nec {
                        modality: "a".into(),
                        from: 1,
                    },
                    subst: None,
                },
            ],
        };
        assert!(matches!(
            check_derivation(&nec_next),
            Err(ProofError::BadRuleApplication { step: 2, .. })
        ));

        let text = r#"{"system":"DTEL","steps":[
            {"formula":"p & q -> p","by":{"axiom":"CPL"}},
            {"formula":"O[a](p & q) -> O[a]p","by":{"mon":{"prog":"a","from":1}}},
            {"formula":"K(p & q -> p)","by":{"nec":{"mod":"K","from":1}}},
            {"formula":"box(p & q -> p)","by":{"nec":{"mod":"box","from":1}}},
            {"formula":"K(p & q -> p) -> box(p & q -> p)","by":{"axiom":"KI"}},
            {"formula":"box(p & q -> p)","by":{"mp":[3,5]}}]}"#;
        assert_eq!(check_derivation(&Derivation::from_json(text).unwrap()), Ok(()));

        let mut spdl_mon = sample_derivation();
        spdl_mon.steps[1].by = Justification::Mon {
            prog: "a".into(),
            from: 1,
        };
        assert!(matches!(
            check_derivation(&spdl_mon),
            Err(ProofError::BadRuleApplication { step: 2, .. })
        ));
    }
}
