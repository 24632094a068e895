//! Public announcements on subset models and their agreement with test
//! programs.

use serde::Serialize;

use crate::checker::{unsupported, CheckError, SubsetEvaluator};
use crate::formula::{Formula, LanguageTag, Program};
use crate::models::{Scenario, SubsetModel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnnouncementResult {
    pub precondition_holds: bool,
    pub updated: Option<Scenario>,
}

/// Announces `phi` at `scenario`: succeeds iff the point lies in the
/// interior of `[[phi]]`, and then shrinks the information set to
/// `U ∩ int([[phi]])`.
pub fn announce(model: &SubsetModel, phi: &Formula, scenario: &Scenario) -> Result<AnnouncementResult, CheckError> {
    if !phi.in_language(LanguageTag::BoxNext) {
        return Err(unsupported(phi, "announcement"));
    }
    scenario.check(&model.space)?;
    let truth = SubsetEvaluator::new(model).extension(phi, model.space.carrier())?;
    let knowable = model.space.interior(truth);
    let holds = knowable.contains(scenario.point);
    Ok(AnnouncementResult {
        precondition_holds: holds,
        updated: holds.then(|| Scenario::new(scenario.point, scenario.open.intersection(knowable))),
    })
}

/// Truth of `O[?phi] psi` computed by the test program's function, next to
/// announcing `phi` and evaluating `psi` in the updated scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub via_test: bool,
    pub via_announcement: bool,
}

impl IdentityCheck {
    pub fn agrees(&self) -> bool {
        self.via_test == self.via_announcement
    }
}

pub fn check_test_announcement_identity(
    model: &SubsetModel,
    phi: &Formula,
    psi: &Formula,
    scenario: &Scenario,
) -> Result<IdentityCheck, CheckError> {
    let program = Program::test(phi.clone()).map_err(|_| unsupported(phi, "announcement"))?;
    let composite = Formula::next(program, psi.clone());
    let via_test = SubsetEvaluator::new(model).eval(&composite, scenario)?;
    let via_announcement = match announce(model, phi, scenario)?.updated {
        Some(updated) => SubsetEvaluator::new(model).eval(psi, &updated)?,
        None => false,
    };
    Ok(IdentityCheck {
        via_test,
        via_announcement,
    })
}
