//! Object languages: PDL, the dynamic topological language with `box` and
//! `O[..]`, and its epistemic extension with `K`.
//!
//! Derived connectives (`[a]`, `dia`, `Khat`) are stored as written so that
//! printing round-trips; [`Formula::normalize`] expands them into their
//! primitive duals when structural comparison up to abbreviation is needed.

mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::{parse, parse_program};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("fragment violation: {0}")]
    FragmentViolation(String),
}

/// A structured program: an atomic name, a sequential composition, or a test.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Program {
    Atomic(String),
    Seq(Box<Program>, Box<Program>),
    Test(Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Formula {
    Atom(String),
    Top,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// `<pi> f`
    Diamond(Program, Box<Formula>),
    /// `[pi] f`
    BoxPdl(Program, Box<Formula>),
    /// `box f`: interior.
    Int(Box<Formula>),
    /// `dia f`: closure.
    Cl(Box<Formula>),
    Know(Box<Formula>),
    KHat(Box<Formula>),
    /// `O[pi] f`
    Next(Program, Box<Formula>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LanguageTag {
    /// Atoms, Booleans, `<pi>` and `[pi]` over atomic and sequenced programs.
    #[serde(rename = "L_PDL")]
    Pdl,
    /// Atoms, Booleans, `box`/`dia` and `O[pi]`.
    #[serde(rename = "L_BoxNext")]
    BoxNext,
    /// `L_BoxNext` plus `K`/`Khat`.
    #[serde(rename = "L_KBoxNext")]
    KBoxNext,
}

impl LanguageTag {
    pub const ALL: [LanguageTag; 3] = [LanguageTag::Pdl, LanguageTag::BoxNext, LanguageTag::KBoxNext];

    pub fn name(self) -> &'static str {
        match self {
            LanguageTag::Pdl => "L_PDL",
            LanguageTag::BoxNext => "L_BoxNext",
            LanguageTag::KBoxNext => "L_KBoxNext",
        }
    }
}

impl Program {
    pub fn atomic(name: impl Into<String>) -> Program {
        Program::Atomic(name.into())
    }

    pub fn seq(first: Program, second: Program) -> Program {
        Program::Seq(Box::new(first), Box::new(second))
    }

    /// Builds a test program, rejecting bodies outside the `box`/`O` fragment.
    pub fn test(body: Formula) -> Result<Program, FormulaError> {
        if !body.in_language(LanguageTag::BoxNext) {
            return Err(FormulaError::FragmentViolation(format!(
                "test body `{body}` must not contain K, Khat, <..> or [..]"
            )));
        }
        Ok(Program::Test(Box::new(body)))
    }

    /// Number of modal steps this program contributes when it labels a
    /// modality: one per atomic step, and for a test one plus the depth of
    /// its body.
    pub fn depth(&self) -> usize {
        match self {
            Program::Atomic(_) => 1,
            Program::Seq(a, b) => a.depth() + b.depth(),
            Program::Test(body) => 1 + body.modal_depth(),
        }
    }

    pub fn contains_test(&self) -> bool {
        match self {
            Program::Atomic(_) => false,
            Program::Seq(a, b) => a.contains_test() || b.contains_test(),
            Program::Test(_) => true,
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Program::Atomic(_))
    }

    /// Atomic program names, including those inside test bodies.
    pub fn program_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Program::Atomic(name) => {
                out.insert(name.clone());
            }
            Program::Seq(a, b) => {
                a.program_names(out);
                b.program_names(out);
            }
            Program::Test(body) => body.collect_programs(out),
        }
    }

    fn substitute_atoms(&self, mapping: &BTreeMap<String, Formula>) -> Program {
        match self {
            Program::Atomic(_) => self.clone(),
            Program::Seq(a, b) => Program::seq(a.substitute_atoms(mapping), b.substitute_atoms(mapping)),
            Program::Test(body) => Program::Test(Box::new(body.substitute(mapping))),
        }
    }

    /// Replaces atomic program names according to `mapping`; unmapped names
    /// are kept.
    pub fn substitute_programs(&self, mapping: &BTreeMap<String, Program>) -> Program {
        match self {
            Program::Atomic(name) => mapping.get(name).cloned().unwrap_or_else(|| self.clone()),
            Program::Seq(a, b) => Program::seq(a.substitute_programs(mapping), b.substitute_programs(mapping)),
            Program::Test(body) => Program::Test(Box::new(body.substitute_programs(mapping))),
        }
    }

    fn normalize(&self) -> Program {
        match self {
            Program::Atomic(_) => self.clone(),
            Program::Seq(a, b) => Program::seq(a.normalize(), b.normalize()),
            Program::Test(body) => Program::Test(Box::new(body.normalize())),
        }
    }
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(f: Formula, g: Formula) -> Formula {
        Formula::And(Box::new(f), Box::new(g))
    }

    pub fn or(f: Formula, g: Formula) -> Formula {
        Formula::Or(Box::new(f), Box::new(g))
    }

    pub fn implies(f: Formula, g: Formula) -> Formula {
        Formula::Implies(Box::new(f), Box::new(g))
    }

    pub fn iff(f: Formula, g: Formula) -> Formula {
        Formula::Iff(Box::new(f), Box::new(g))
    }

    pub fn diamond(p: Program, f: Formula) -> Formula {
        Formula::Diamond(p, Box::new(f))
    }

    pub fn box_pdl(p: Program, f: Formula) -> Formula {
        Formula::BoxPdl(p, Box::new(f))
    }

    pub fn int(f: Formula) -> Formula {
        Formula::Int(Box::new(f))
    }

    pub fn cl(f: Formula) -> Formula {
        Formula::Cl(Box::new(f))
    }

    pub fn know(f: Formula) -> Formula {
        Formula::Know(Box::new(f))
    }

    pub fn khat(f: Formula) -> Formula {
        Formula::KHat(Box::new(f))
    }

    pub fn next(p: Program, f: Formula) -> Formula {
        Formula::Next(p, Box::new(f))
    }

    /// Maximum nesting of program modalities along any branch. `box`, `dia`
    /// and `K` do not count; a program counts its [`Program::depth`].
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Top => 0,
            Formula::Not(f) | Formula::Int(f) | Formula::Cl(f) | Formula::Know(f) | Formula::KHat(f) => {
                f.modal_depth()
            }
            Formula::And(f, g) | Formula::Or(f, g) | Formula::Implies(f, g) | Formula::Iff(f, g) => {
                f.modal_depth().max(g.modal_depth())
            }
            Formula::Diamond(p, f) | Formula::BoxPdl(p, f) | Formula::Next(p, f) => p.depth() + f.modal_depth(),
        }
    }

    /// Number of AST nodes, counting test bodies.
    pub fn size(&self) -> usize {
        fn prog_size(p: &Program) -> usize {
            match p {
                Program::Atomic(_) => 1,
                Program::Seq(a, b) => 1 + prog_size(a) + prog_size(b),
                Program::Test(f) => 1 + f.size(),
            }
        }
        match self {
            Formula::Atom(_) | Formula::Top => 1,
            Formula::Not(f) | Formula::Int(f) | Formula::Cl(f) | Formula::Know(f) | Formula::KHat(f) => 1 + f.size(),
            Formula::And(f, g) | Formula::Or(f, g) | Formula::Implies(f, g) | Formula::Iff(f, g) => {
                1 + f.size() + g.size()
            }
            Formula::Diamond(p, f) | Formula::BoxPdl(p, f) | Formula::Next(p, f) => 1 + prog_size(p) + f.size(),
        }
    }

    pub fn in_language(&self, tag: LanguageTag) -> bool {
        match self {
            Formula::Atom(_) | Formula::Top => true,
            Formula::Not(f) => f.in_language(tag),
            Formula::And(f, g) | Formula::Or(f, g) | Formula::Implies(f, g) | Formula::Iff(f, g) => {
                f.in_language(tag) && g.in_language(tag)
            }
            Formula::Diamond(p, f) | Formula::BoxPdl(p, f) => {
                tag == LanguageTag::Pdl && !p.contains_test() && f.in_language(tag)
            }
            Formula::Int(f) | Formula::Cl(f) => tag != LanguageTag::Pdl && f.in_language(tag),
            Formula::Know(f) | Formula::KHat(f) => tag == LanguageTag::KBoxNext && f.in_language(tag),
            Formula::Next(p, f) => tag != LanguageTag::Pdl && program_in_language(p, tag) && f.in_language(tag),
        }
    }

    /// Atoms occurring anywhere, including inside test bodies.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        self.visit(&mut |f| {
            if let Formula::Atom(name) = f {
                out.insert(name.clone());
            }
        });
    }

    /// Atomic program names occurring anywhere.
    pub fn programs(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_programs(&mut out);
        out
    }

    fn collect_programs(&self, out: &mut BTreeSet<String>) {
        self.visit(&mut |f| {
            if let Formula::Diamond(p, _) | Formula::BoxPdl(p, _) | Formula::Next(p, _) = f {
                p.program_names(out);
            }
        });
    }

    /// Pre-order traversal of formula nodes (test bodies are visited through
    /// [`Program::program_names`] style recursion by the callers that need it).
    fn visit(&self, visitor: &mut dyn FnMut(&Formula)) {
        visitor(self);
        match self {
            Formula::Atom(_) | Formula::Top => {}
            Formula::Not(f) | Formula::Int(f) | Formula::Cl(f) | Formula::Know(f) | Formula::KHat(f) => {
                f.visit(visitor)
            }
            Formula::And(f, g) | Formula::Or(f, g) | Formula::Implies(f, g) | Formula::Iff(f, g) => {
                f.visit(visitor);
                g.visit(visitor);
            }
            Formula::Diamond(p, f) | Formula::BoxPdl(p, f) | Formula::Next(p, f) => {
                visit_program(p, visitor);
                f.visit(visitor);
            }
        }
    }

    /// Uniform substitution of atoms. Unmapped atoms are kept.
    pub fn substitute(&self, mapping: &BTreeMap<String, Formula>) -> Formula {
        self.map_children(
            &|f| match f {
                Formula::Atom(name) => mapping.get(name).cloned(),
                _ => None,
            },
            &|p| p.substitute_atoms(mapping),
        )
    }

    /// Uniform substitution of atomic program names.
    pub fn substitute_programs(&self, mapping: &BTreeMap<String, Program>) -> Formula {
        self.map_children(&|_| None, &|p| p.substitute_programs(mapping))
    }

    /// Rebuilds the tree bottom-up. `leaf` may replace a node outright;
    /// `prog` rewrites every program label.
    fn map_children(
        &self,
        leaf: &dyn Fn(&Formula) -> Option<Formula>,
        prog: &dyn Fn(&Program) -> Program,
    ) -> Formula {
        if let Some(replaced) = leaf(self) {
            return replaced;
        }
        let rec = |f: &Formula| Box::new(f.map_children(leaf, prog));
        match self {
            Formula::Atom(_) | Formula::Top => self.clone(),
            Formula::Not(f) => Formula::Not(rec(f)),
            Formula::And(f, g) => Formula::And(rec(f), rec(g)),
            Formula::Or(f, g) => Formula::Or(rec(f), rec(g)),
            Formula::Implies(f, g) => Formula::Implies(rec(f), rec(g)),
            Formula::Iff(f, g) => Formula::Iff(rec(f), rec(g)),
            Formula::Diamond(p, f) => Formula::Diamond(prog(p), rec(f)),
            Formula::BoxPdl(p, f) => Formula::BoxPdl(prog(p), rec(f)),
            Formula::Int(f) => Formula::Int(rec(f)),
            Formula::Cl(f) => Formula::Cl(rec(f)),
            Formula::Know(f) => Formula::Know(rec(f)),
            Formula::KHat(f) => Formula::KHat(rec(f)),
            Formula::Next(p, f) => Formula::Next(prog(p), rec(f)),
        }
    }

    /// Expands the modal abbreviations: `[a]f` to `~<a>~f`, `dia f` to
    /// `~box ~f` and `Khat f` to `~K ~f`. Boolean connectives are kept.
    pub fn normalize(&self) -> Formula {
        let norm = |f: &Formula| f.normalize();
        match self {
            Formula::Atom(_) | Formula::Top => self.clone(),
            Formula::Not(f) => Formula::not(norm(f)),
            Formula::And(f, g) => Formula::and(norm(f), norm(g)),
            Formula::Or(f, g) => Formula::or(norm(f), norm(g)),
            Formula::Implies(f, g) => Formula::implies(norm(f), norm(g)),
            Formula::Iff(f, g) => Formula::iff(norm(f), norm(g)),
            Formula::Diamond(p, f) => Formula::diamond(p.normalize(), norm(f)),
            Formula::BoxPdl(p, f) => Formula::not(Formula::diamond(p.normalize(), Formula::not(norm(f)))),
            Formula::Int(f) => Formula::int(norm(f)),
            Formula::Cl(f) => Formula::not(Formula::int(Formula::not(norm(f)))),
            Formula::Know(f) => Formula::know(norm(f)),
            Formula::KHat(f) => Formula::not(Formula::know(Formula::not(norm(f)))),
            Formula::Next(p, f) => Formula::next(p.normalize(), norm(f)),
        }
    }

    /// Rewrites `O[a;b] f` into `O[a] O[b] f` everywhere. Only the `O`
    /// modality is expanded; `<a;b>` is left alone since it is not
    /// equivalent to `<a><b>` in general.
    pub fn expand_next_seq(&self) -> Formula {
        fn push(p: &Program, body: Formula) -> Formula {
            match p {
                Program::Seq(a, b) => push(a, push(b, body)),
                Program::Atomic(_) => Formula::next(p.clone(), body),
                Program::Test(t) => Formula::next(Program::Test(Box::new(t.expand_next_seq())), body),
            }
        }
        let rec = |f: &Formula| f.expand_next_seq();
        match self {
            Formula::Atom(_) | Formula::Top => self.clone(),
            Formula::Not(f) => Formula::not(rec(f)),
            Formula::And(f, g) => Formula::and(rec(f), rec(g)),
            Formula::Or(f, g) => Formula::or(rec(f), rec(g)),
            Formula::Implies(f, g) => Formula::implies(rec(f), rec(g)),
            Formula::Iff(f, g) => Formula::iff(rec(f), rec(g)),
            Formula::Diamond(p, f) => Formula::diamond(p.clone(), rec(f)),
            Formula::BoxPdl(p, f) => Formula::box_pdl(p.clone(), rec(f)),
            Formula::Int(f) => Formula::int(rec(f)),
            Formula::Cl(f) => Formula::cl(rec(f)),
            Formula::Know(f) => Formula::know(rec(f)),
            Formula::KHat(f) => Formula::khat(rec(f)),
            Formula::Next(p, f) => push(p, rec(f)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            _ => 5,
        }
    }
}

fn program_in_language(p: &Program, tag: LanguageTag) -> bool {
    match p {
        Program::Atomic(_) => true,
        Program::Seq(a, b) => program_in_language(a, tag) && program_in_language(b, tag),
        Program::Test(body) => tag != LanguageTag::Pdl && body.in_language(LanguageTag::BoxNext),
    }
}

fn visit_program(p: &Program, visitor: &mut dyn FnMut(&Formula)) {
    match p {
        Program::Atomic(_) => {}
        Program::Seq(a, b) => {
            visit_program(a, visitor);
            visit_program(b, visitor);
        }
        Program::Test(body) => body.visit(visitor),
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Program::Atomic(name) => write!(f, "{name}"),
            Program::Seq(a, b) => {
                write!(f, "{a};")?;
                // Seq parses left-associatively, so a nested right operand
                // needs grouping to print back to the same tree.
                if matches!(**b, Program::Seq(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            Program::Test(body) => write!(f, "?({body})"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let unary = |f: &mut fmt::Formatter<'_>, prefix: &str, sub: &Formula| {
            if sub.precedence() < 5 {
                write!(f, "{prefix}({sub})")
            } else {
                write!(f, "{prefix}{sub}")
            }
        };
        match self {
            Formula::Atom(name) => write!(f, "{name}"),
            Formula::Top => write!(f, "top"),
            Formula::Not(g) => unary(f, "~", g),
            Formula::Diamond(p, g) => unary(f, &format!("<{p}>"), g),
            Formula::BoxPdl(p, g) => unary(f, &format!("[{p}]"), g),
            Formula::Int(g) => unary(f, "box ", g),
            Formula::Cl(g) => unary(f, "dia ", g),
            Formula::Know(g) => unary(f, "K ", g),
            Formula::KHat(g) => unary(f, "Khat ", g),
            Formula::Next(p, g) => unary(f, &format!("O[{p}] "), g),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
                let (op, level) = match self {
                    Formula::And(..) => ("&", 4),
                    Formula::Or(..) => ("|", 3),
                    Formula::Implies(..) => ("->", 2),
                    _ => ("<->", 1),
                };
                let right_assoc = level == 2;
                let left_parens = if right_assoc { l.precedence() <= level } else { l.precedence() < level };
                let right_parens = if right_assoc { r.precedence() < level } else { r.precedence() <= level };
                if left_parens {
                    write!(f, "({l})")?;
                } else {
                    write!(f, "{l}")?;
                }
                write!(f, " {op} ")?;
                if right_parens {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
        }
    }
}
