//! Extension-computing model checkers.
//!
//! * relational PDL: `<a>f` is the `R_a`-preimage of `[[f]]`;
//! * dynamic topological: `O[a]` is `f_a`-preimage, `<a>` is closure of the
//!   preimage and `[a]` its interior;
//! * subset spaces: formulas are evaluated at scenarios `(x, U)` through the
//!   relativized extensions `[[f]]^U`.

use std::borrow::Cow;
use std::collections::HashMap;

use thiserror::Error;

use crate::formula::{Formula, LanguageTag, Program};
use crate::models::{DtModel, ModelError, PdlModel, PointMap, Scenario, SubsetModel};
use crate::topology::PointSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("`{formula}` is not interpreted over {semantics} models")]
    FragmentViolation { formula: String, semantics: &'static str },
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub(crate) fn unsupported(f: &Formula, semantics: &'static str) -> CheckError {
    CheckError::FragmentViolation {
        formula: f.to_string(),
        semantics,
    }
}

/// Extension of a PDL formula in a relational model.
pub fn eval_pdl_relational(model: &PdlModel, f: &Formula) -> Result<PointSet, CheckError> {
    let all = model.carrier();
    let rec = |g: &Formula| eval_pdl_relational(model, g);
    Ok(match f {
        Formula::Atom(p) => model.valuation.get(p).intersection(all),
        Formula::Top => all,
        Formula::Not(g) => all.difference(rec(g)?),
        Formula::And(g, h) => rec(g)?.intersection(rec(h)?),
        Formula::Or(g, h) => rec(g)?.union(rec(h)?),
        Formula::Implies(g, h) => all.difference(rec(g)?).union(rec(h)?),
        Formula::Iff(g, h) => {
            let (a, b) = (rec(g)?, rec(h)?);
            all.difference(a.union(b)).union(a.intersection(b))
        }
        Formula::Diamond(p, g) => {
            let target = rec(g)?;
            let succ = model.relation(p)?;
            (0..model.points).filter(|&x| succ[x].intersects(target)).collect()
        }
        Formula::BoxPdl(p, g) => {
            let target = rec(g)?;
            let succ = model.relation(p)?;
            (0..model.points).filter(|&x| succ[x].is_subset(target)).collect()
        }
        Formula::Int(_) | Formula::Cl(_) | Formula::Know(_) | Formula::KHat(_) | Formula::Next(..) => {
            return Err(unsupported(f, "relational"))
        }
    })
}

/// Extension of a formula of `L_PDL ∪ L_BoxNext` in a dynamic topological
/// model. `O[a;b]` uses the composed function.
pub fn eval_dtl(model: &DtModel, f: &Formula) -> Result<PointSet, CheckError> {
    let space = &model.space;
    let all = space.carrier();
    let rec = |g: &Formula| eval_dtl(model, g);
    Ok(match f {
        Formula::Atom(p) => model.valuation.get(p).intersection(all),
        Formula::Top => all,
        Formula::Not(g) => all.difference(rec(g)?),
        Formula::And(g, h) => rec(g)?.intersection(rec(h)?),
        Formula::Or(g, h) => rec(g)?.union(rec(h)?),
        Formula::Implies(g, h) => all.difference(rec(g)?).union(rec(h)?),
        Formula::Iff(g, h) => {
            let (a, b) = (rec(g)?, rec(h)?);
            all.difference(a.union(b)).union(a.intersection(b))
        }
        Formula::Int(g) => space.interior(rec(g)?),
        Formula::Cl(g) => space.closure(rec(g)?),
        Formula::Next(p, g) => model.program_function(p)?.preimage(rec(g)?),
        Formula::Diamond(p, g) => space.closure(model.program_function(p)?.preimage(rec(g)?)),
        Formula::BoxPdl(p, g) => space.interior(model.program_function(p)?.preimage(rec(g)?)),
        Formula::Know(_) | Formula::KHat(_) => return Err(unsupported(f, "dynamic topological")),
    })
}

/// Rewrites `<a>f` to `dia O[a] f` and `[a]f` to `box O[a] f`, recursively.
pub fn translate_pdl(f: &Formula) -> Formula {
    let tr = translate_pdl;
    match f {
        Formula::Atom(_) | Formula::Top => f.clone(),
        Formula::Not(g) => Formula::not(tr(g)),
        Formula::And(g, h) => Formula::and(tr(g), tr(h)),
        Formula::Or(g, h) => Formula::or(tr(g), tr(h)),
        Formula::Implies(g, h) => Formula::implies(tr(g), tr(h)),
        Formula::Iff(g, h) => Formula::iff(tr(g), tr(h)),
        Formula::Diamond(p, g) => Formula::cl(Formula::next(p.clone(), tr(g))),
        Formula::BoxPdl(p, g) => Formula::int(Formula::next(p.clone(), tr(g))),
        Formula::Int(g) => Formula::int(tr(g)),
        Formula::Cl(g) => Formula::cl(tr(g)),
        Formula::Know(g) => Formula::know(tr(g)),
        Formula::KHat(g) => Formula::khat(tr(g)),
        Formula::Next(p, g) => Formula::next(p.clone(), tr(g)),
    }
}

/// Truth of `f` at a scenario of a subset model.
pub fn eval_subset(model: &SubsetModel, f: &Formula, scenario: &Scenario) -> Result<bool, CheckError> {
    scenario.check(&model.space)?;
    let mut ev = SubsetEvaluator::new(model);
    Ok(ev.extension(f, scenario.open)?.contains(scenario.point))
}

/// Relativized extension `[[f]]^U` in a subset model.
pub fn extension_subset(model: &SubsetModel, f: &Formula, open: PointSet) -> Result<PointSet, CheckError> {
    SubsetEvaluator::new(model).extension(f, open)
}

/// Subset-space evaluator with a memo of relativized extensions.
///
/// Memo entries are keyed by the address of the subformula; the `'f`
/// lifetime keeps every formula handed to the evaluator alive for as long
/// as the memo, so addresses are never reused.
pub struct SubsetEvaluator<'m, 'f> {
    model: &'m SubsetModel,
    memo: HashMap<(usize, PointSet), PointSet>,
    tests: HashMap<usize, PointMap>,
    _formulas: std::marker::PhantomData<&'f Formula>,
}

fn addr<T>(x: &T) -> usize {
    x as *const T as usize
}

impl<'m, 'f> SubsetEvaluator<'m, 'f> {
    pub fn new(model: &'m SubsetModel) -> Self {
        SubsetEvaluator {
            model,
            memo: HashMap::new(),
            tests: HashMap::new(),
            _formulas: std::marker::PhantomData,
        }
    }

    pub fn eval(&mut self, f: &'f Formula, scenario: &Scenario) -> Result<bool, CheckError> {
        scenario.check(&self.model.space)?;
        Ok(self.extension(f, scenario.open)?.contains(scenario.point))
    }

    /// `{ x ∈ U : (x, U) |= f }`.
    pub fn extension(&mut self, f: &'f Formula, open: PointSet) -> Result<PointSet, CheckError> {
        let key = (addr(f), open);
        if let Some(&hit) = self.memo.get(&key) {
            return Ok(hit);
        }
        let space = &self.model.space;
        let u = open;
        let result = match f {
            Formula::Atom(p) => self.model.valuation.get(p).intersection(u),
            Formula::Top => u,
            Formula::Not(g) => u.difference(self.extension(g, u)?),
            Formula::And(g, h) => self.extension(g, u)?.intersection(self.extension(h, u)?),
            Formula::Or(g, h) => self.extension(g, u)?.union(self.extension(h, u)?),
            Formula::Implies(g, h) => {
                let a = self.extension(g, u)?;
                u.difference(a).union(self.extension(h, u)?)
            }
            Formula::Iff(g, h) => {
                let (a, b) = (self.extension(g, u)?, self.extension(h, u)?);
                u.difference(a.union(b)).union(a.intersection(b))
            }
            Formula::Know(g) => {
                if u.is_subset(self.extension(g, u)?) {
                    u
                } else {
                    PointSet::EMPTY
                }
            }
            Formula::KHat(g) => {
                if self.extension(g, u)?.is_empty() {
                    PointSet::EMPTY
                } else {
                    u
                }
            }
            Formula::Int(g) => space.interior(self.extension(g, u)?),
            Formula::Cl(g) => u.difference(space.interior(u.difference(self.extension(g, u)?))),
            Formula::Next(p, g) => {
                let map = self.program_function(p)?.into_owned();
                let image = map.image(u);
                let target = self.extension(g, image)?;
                map.preimage(target).intersection(u)
            }
            Formula::Diamond(..) | Formula::BoxPdl(..) => return Err(unsupported(f, "subset-space")),
        };
        self.memo.insert(key, result);
        Ok(result)
    }

    /// State-based extension `{ x : (x, min_nbhd(x)) |= f }` of a formula in
    /// the `box`/`O` fragment, whose truth does not depend on `U`.
    pub fn state_extension(&mut self, f: &'f Formula) -> Result<PointSet, CheckError> {
        if !f.in_language(LanguageTag::BoxNext) {
            return Err(unsupported(f, "state-based subset"));
        }
        let mut out = PointSet::EMPTY;
        for x in 0..self.model.points() {
            if self.extension(f, self.model.space.min_nbhd(x))?.contains(x) {
                out.insert(x);
            }
        }
        Ok(out)
    }

    /// Partial function of a program; tests are the identity restricted to
    /// the interior of the body's state-based extension.
    pub fn program_function(&mut self, p: &'f Program) -> Result<Cow<'m, PointMap>, CheckError> {
        match p {
            Program::Atomic(name) => Ok(Cow::Borrowed(
                self.model
                    .functions
                    .get(name)
                    .ok_or_else(|| ModelError::UnknownProgram(name.clone()))?,
            )),
            Program::Seq(a, b) => {
                let first = self.program_function(a)?;
                let second = self.program_function(b)?;
                Ok(Cow::Owned(first.then(&second)))
            }
            Program::Test(body) => {
                if let Some(m) = self.tests.get(&addr(p)) {
                    return Ok(Cow::Owned(m.clone()));
                }
                let ext = self.state_extension(body)?;
                let map = PointMap::partial_identity(self.model.points(), self.model.space.interior(ext));
                self.tests.insert(addr(p), map.clone());
                Ok(Cow::Owned(map))
            }
        }
    }
}
