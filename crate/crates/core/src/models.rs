//! Relational, dynamic topological and subset-space models.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Formula, Program};
use crate::topology::{PointSet, TopoSpace, TopologyError, MAX_POINTS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown program `{0}`")]
    UnknownProgram(String),
    #[error("test program `{0}` cannot be interpreted in a model with total functions")]
    TestInTotalModel(String),
    #[error("program `{program}` is undefined at point {point}")]
    Undefined { program: String, point: usize },
    #[error("invalid scenario ({point}, {open}): {reason}")]
    InvalidScenario {
        point: usize,
        open: PointSet,
        reason: String,
    },
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("evaluation error: {0}")]
    Eval(String),
}

/// A partial self-map on `0..n`; `None` marks an undefined point.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointMap(Vec<Option<usize>>);

impl PointMap {
    pub fn new(images: Vec<Option<usize>>) -> PointMap {
        PointMap(images)
    }

    pub fn total(images: &[usize]) -> PointMap {
        PointMap(images.iter().map(|&y| Some(y)).collect())
    }

    pub fn identity(n: usize) -> PointMap {
        PointMap((0..n).map(Some).collect())
    }

    pub fn empty(n: usize) -> PointMap {
        PointMap(vec![None; n])
    }

    pub fn constant(n: usize, y: usize) -> PointMap {
        PointMap(vec![Some(y); n])
    }

    /// Identity restricted to `domain`.
    pub fn partial_identity(n: usize, domain: PointSet) -> PointMap {
        PointMap((0..n).map(|x| domain.contains(x).then_some(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.0.get(x).copied().flatten()
    }

    pub fn images(&self) -> &[Option<usize>] {
        &self.0
    }

    pub fn domain(&self) -> PointSet {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(x, y)| y.map(|_| x))
            .collect()
    }

    pub fn is_total(&self) -> bool {
        self.0.iter().all(Option::is_some)
    }

    /// `self` first, then `next`: the map `next ∘ self`, defined where both
    /// stages are.
    pub fn then(&self, next: &PointMap) -> PointMap {
        PointMap(self.0.iter().map(|y| y.and_then(|y| next.apply(y))).collect())
    }

    /// `self` with its domain cut down to `domain`.
    pub fn restrict(&self, domain: PointSet) -> PointMap {
        PointMap(
            self.0
                .iter()
                .enumerate()
                .map(|(x, y)| if domain.contains(x) { *y } else { None })
                .collect(),
        )
    }

    /// `{ f(x) : x ∈ set, f defined at x }`.
    pub fn image(&self, set: PointSet) -> PointSet {
        set.iter().filter_map(|x| self.apply(x)).collect()
    }

    /// `{ x : f(x) defined and f(x) ∈ set }`.
    pub fn preimage(&self, set: PointSet) -> PointSet {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(x, y)| y.filter(|&y| set.contains(y)).map(|_| x))
            .collect()
    }
}

impl fmt::Debug for PointMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, y) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match y {
                Some(y) => write!(f, "{y}")?,
                None => write!(f, "_")?,
            }
        }
        write!(f, "]")
    }
}

/// Atom extensions. Atoms missing from the map denote the empty set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Valuation(BTreeMap<String, PointSet>);

impl Valuation {
    pub fn new() -> Valuation {
        Valuation::default()
    }

    pub fn with(mut self, atom: &str, set: PointSet) -> Valuation {
        self.0.insert(atom.to_string(), set);
        self
    }

    pub fn set(&mut self, atom: &str, set: PointSet) {
        self.0.insert(atom.to_string(), set);
    }

    pub fn get(&self, atom: &str) -> PointSet {
        self.0.get(atom).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &PointSet)> {
        self.0.iter()
    }
}

/// Serial-or-not relational model. Relations are stored as successor sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdlModel {
    pub points: usize,
    pub relations: BTreeMap<String, Vec<PointSet>>,
    pub valuation: Valuation,
    /// Declares every relation serial; checked by [`PdlModel::validate`].
    pub serial: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DtModel {
    pub space: TopoSpace,
    pub functions: BTreeMap<String, PointMap>,
    pub valuation: Valuation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetModel {
    pub space: TopoSpace,
    pub functions: BTreeMap<String, PointMap>,
    pub valuation: Valuation,
}

/// Epistemic scenario `(x, U)` with `U` open and `x ∈ U`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    pub point: usize,
    pub open: PointSet,
}

impl Scenario {
    pub fn new(point: usize, open: PointSet) -> Scenario {
        Scenario { point, open }
    }

    pub fn check(&self, space: &TopoSpace) -> Result<(), ModelError> {
        let fail = |reason: &str| ModelError::InvalidScenario {
            point: self.point,
            open: self.open,
            reason: reason.to_string(),
        };
        if self.point >= space.points() || !self.open.is_subset(space.carrier()) {
            return Err(fail("out of range"));
        }
        if !self.open.contains(self.point) {
            return Err(fail("point not in the information set"));
        }
        if !space.is_open(self.open) {
            return Err(fail("information set is not open"));
        }
        Ok(())
    }

    /// Every scenario of a space, by open (witness order) then point.
    pub fn all(space: &TopoSpace) -> Vec<Scenario> {
        space
            .opens()
            .iter()
            .flat_map(|&u| u.iter().map(move |x| Scenario::new(x, u)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    TooManyPoints { points: usize },
    PointOutOfRange { context: String, point: usize },
    WrongArity { program: String, expected: usize, found: usize },
    TotalityFailure { program: String, point: usize },
    SerialityFailure { program: String, point: usize },
    OpennessFailure { program: String, open: PointSet, image: PointSet },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooManyPoints { points } => write!(f, "{points} points exceeds the maximum of {MAX_POINTS}"),
            Violation::PointOutOfRange { context, point } => write!(f, "{context}: point {point} out of range"),
            Violation::WrongArity {
                program,
                expected,
                found,
            } => write!(f, "program `{program}` has {found} entries, expected {expected}"),
            Violation::TotalityFailure { program, point } => write!(f, "program `{program}` undefined at {point}"),
            Violation::SerialityFailure { program, point } => {
                write!(f, "program `{program}` has no successor at {point}")
            }
            Violation::OpennessFailure { program, open, image } => {
                write!(f, "program `{program}` maps open {open} to non-open {image}")
            }
        }
    }
}

fn check_valuation(val: &Valuation, n: usize, out: &mut Vec<Violation>) {
    for (atom, set) in val.iter() {
        if let Some(point) = set.difference(PointSet::full(n)).min() {
            out.push(Violation::PointOutOfRange {
                context: format!("valuation of `{atom}`"),
                point,
            });
        }
    }
}

fn check_map_shape(name: &str, map: &PointMap, n: usize, out: &mut Vec<Violation>) -> bool {
    if map.len() != n {
        out.push(Violation::WrongArity {
            program: name.to_string(),
            expected: n,
            found: map.len(),
        });
        return false;
    }
    let mut ok = true;
    for y in map.images().iter().flatten() {
        if *y >= n {
            out.push(Violation::PointOutOfRange {
                context: format!("image of `{name}`"),
                point: *y,
            });
            ok = false;
        }
    }
    ok
}

/// First open (in witness order) whose image under `map` is not open.
pub(crate) fn openness_failure(space: &TopoSpace, map: &PointMap) -> Option<(PointSet, PointSet)> {
    space
        .opens()
        .iter()
        .map(|&u| (u, map.image(u)))
        .find(|&(_, img)| !space.is_open(img))
}

impl PdlModel {
    pub fn new(points: usize) -> PdlModel {
        PdlModel {
            points,
            relations: BTreeMap::new(),
            valuation: Valuation::new(),
            serial: false,
        }
    }

    pub fn with_relation(mut self, program: &str, edges: &[(usize, usize)]) -> PdlModel {
        let mut succ = vec![PointSet::EMPTY; self.points];
        for &(x, y) in edges {
            succ[x].insert(y);
        }
        self.relations.insert(program.to_string(), succ);
        self
    }

    pub fn with_valuation(mut self, valuation: Valuation) -> PdlModel {
        self.valuation = valuation;
        self
    }

    pub fn carrier(&self) -> PointSet {
        PointSet::full(self.points)
    }

    pub fn alphabet(&self) -> impl Iterator<Item = &String> {
        self.relations.keys()
    }

    /// Successor sets of a structured program; `a;b` composes relations.
    pub fn relation(&self, program: &Program) -> Result<Cow<'_, [PointSet]>, ModelError> {
        match program {
            Program::Atomic(name) => self
                .relations
                .get(name)
                .map(|r| Cow::Borrowed(r.as_slice()))
                .ok_or_else(|| ModelError::UnknownProgram(name.clone())),
            Program::Seq(a, b) => {
                let ra = self.relation(a)?;
                let rb = self.relation(b)?;
                Ok(Cow::Owned(
                    ra.iter()
                        .map(|succ| succ.iter().fold(PointSet::EMPTY, |acc, y| acc.union(rb[y])))
                        .collect(),
                ))
            }
            Program::Test(body) => Err(ModelError::Eval(format!(
                "test program ?({body}) is not interpreted in relational models"
            ))),
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.points > MAX_POINTS {
            out.push(Violation::TooManyPoints { points: self.points });
            return out;
        }
        check_valuation(&self.valuation, self.points, &mut out);
        for (name, succ) in &self.relations {
            if succ.len() != self.points {
                out.push(Violation::WrongArity {
                    program: name.clone(),
                    expected: self.points,
                    found: succ.len(),
                });
                continue;
            }
            for (x, s) in succ.iter().enumerate() {
                if let Some(point) = s.difference(self.carrier()).min() {
                    out.push(Violation::PointOutOfRange {
                        context: format!("successors of `{name}` at {x}"),
                        point,
                    });
                }
                if self.serial && s.is_empty() {
                    out.push(Violation::SerialityFailure {
                        program: name.clone(),
                        point: x,
                    });
                }
            }
        }
        out
    }
}

impl DtModel {
    pub fn new(space: TopoSpace) -> DtModel {
        DtModel {
            space,
            functions: BTreeMap::new(),
            valuation: Valuation::new(),
        }
    }

    pub fn with_function(mut self, program: &str, map: PointMap) -> DtModel {
        self.functions.insert(program.to_string(), map);
        self
    }

    pub fn with_valuation(mut self, valuation: Valuation) -> DtModel {
        self.valuation = valuation;
        self
    }

    pub fn points(&self) -> usize {
        self.space.points()
    }

    pub fn alphabet(&self) -> impl Iterator<Item = &String> {
        self.functions.keys()
    }

    /// Function of a structured program; `a;b` composes as `f_b ∘ f_a`.
    pub fn program_function(&self, program: &Program) -> Result<Cow<'_, PointMap>, ModelError> {
        match program {
            Program::Atomic(name) => self
                .functions
                .get(name)
                .map(Cow::Borrowed)
                .ok_or_else(|| ModelError::UnknownProgram(name.clone())),
            Program::Seq(a, b) => Ok(Cow::Owned(self.program_function(a)?.then(&*self.program_function(b)?))),
            Program::Test(body) => Err(ModelError::TestInTotalModel(body.to_string())),
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let n = self.points();
        let mut out = Vec::new();
        check_valuation(&self.valuation, n, &mut out);
        for (name, map) in &self.functions {
            if !check_map_shape(name, map, n, &mut out) {
                continue;
            }
            for (x, y) in map.images().iter().enumerate() {
                if y.is_none() {
                    out.push(Violation::TotalityFailure {
                        program: name.clone(),
                        point: x,
                    });
                }
            }
        }
        out
    }

    /// True when every program function maps opens to opens.
    pub fn is_open(&self) -> bool {
        self.functions
            .values()
            .all(|f| openness_failure(&self.space, f).is_none())
    }
}

impl SubsetModel {
    pub fn new(space: TopoSpace) -> SubsetModel {
        SubsetModel {
            space,
            functions: BTreeMap::new(),
            valuation: Valuation::new(),
        }
    }

    pub fn with_function(mut self, program: &str, map: PointMap) -> SubsetModel {
        self.functions.insert(program.to_string(), map);
        self
    }

    pub fn with_valuation(mut self, valuation: Valuation) -> SubsetModel {
        self.valuation = valuation;
        self
    }

    pub fn points(&self) -> usize {
        self.space.points()
    }

    pub fn alphabet(&self) -> impl Iterator<Item = &String> {
        self.functions.keys()
    }

    /// Partial function of a structured program. Tests `?(f)` denote the
    /// identity restricted to the interior of the extension of `f`.
    pub fn program_function(&self, program: &Program) -> Result<PointMap, ModelError> {
        crate::checker::SubsetEvaluator::new(self)
            .program_function(program)
            .map(|m| m.into_owned())
            .map_err(|e| ModelError::Eval(e.to_string()))
    }

    pub fn validate(&self) -> Vec<Violation> {
        let n = self.points();
        let mut out = Vec::new();
        check_valuation(&self.valuation, n, &mut out);
        for (name, map) in &self.functions {
            if !check_map_shape(name, map, n, &mut out) {
                continue;
            }
            if let Some((open, image)) = openness_failure(&self.space, map) {
                out.push(Violation::OpennessFailure {
                    program: name.clone(),
                    open,
                    image,
                });
            }
        }
        out
    }

    /// Scenario `(x, U)` with `U` given by its index in the space's opens.
    pub fn scenario_by_index(&self, point: usize, open_index: usize) -> Result<Scenario, ModelError> {
        let open = *self.space.opens().get(open_index).ok_or_else(|| {
            ModelError::Invalid(format!(
                "open index {open_index} out of range ({} opens)",
                self.space.opens().len()
            ))
        })?;
        let s = Scenario::new(point, open);
        s.check(&self.space)?;
        Ok(s)
    }
}

/// Any of the three model classes, as read from or written to JSON.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Model {
    Pdl(PdlModel),
    Dtl(DtModel),
    Subset(SubsetModel),
}

impl Model {
    pub fn validate(&self) -> Vec<Violation> {
        match self {
            Model::Pdl(m) => m.validate(),
            Model::Dtl(m) => m.validate(),
            Model::Subset(m) => m.validate(),
        }
    }

    pub fn points(&self) -> usize {
        match self {
            Model::Pdl(m) => m.points,
            Model::Dtl(m) => m.points(),
            Model::Subset(m) => m.points(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Model::Pdl(_) => "pdl",
            Model::Dtl(_) => "dtl",
            Model::Subset(_) => "subset",
        }
    }

    /// Parses the JSON model format and validates it.
    pub fn from_json(text: &str) -> Result<Model, ModelError> {
        let raw: ModelJson = serde_json::from_str(text).map_err(|e| ModelError::Invalid(e.to_string()))?;
        let model = raw.into_model()?;
        let violations = model.validate();
        if !violations.is_empty() {
            let msgs: Vec<String> = violations.iter().map(ToString::to_string).collect();
            return Err(ModelError::Invalid(msgs.join("; ")));
        }
        Ok(model)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(ModelJson::from(self)).expect("model serializes")
    }
}

impl Serialize for Model {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ModelJson::from(self).serialize(serializer)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ModelKind {
    Pdl,
    Dtl,
    Subset,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProgramJson {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    map: Option<PointMap>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    rel: Option<Vec<(usize, usize)>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelJson {
    #[serde(rename = "type")]
    kind: ModelKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    serial: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    space: Option<crate::topology::TopologySpec>,
    #[serde(default)]
    programs: BTreeMap<String, ProgramJson>,
    #[serde(default)]
    valuation: Valuation,
}

impl ModelJson {
    fn into_model(self) -> Result<Model, ModelError> {
        let invalid = |msg: String| ModelError::Invalid(msg);
        match self.kind {
            ModelKind::Pdl => {
                let points = self
                    .points
                    .ok_or_else(|| invalid("pdl model needs `points`".into()))?;
                if points > MAX_POINTS {
                    return Err(invalid(format!("{points} points exceeds {MAX_POINTS}")));
                }
                let mut m = PdlModel::new(points).with_valuation(self.valuation);
                m.serial = self.serial.unwrap_or(false);
                for (name, p) in self.programs {
                    let edges = p
                        .rel
                        .ok_or_else(|| invalid(format!("pdl program `{name}` needs `rel`")))?;
                    if let Some(&(x, y)) = edges.iter().find(|(x, y)| *x >= points || *y >= points) {
                        return Err(invalid(format!("edge ({x},{y}) of `{name}` out of range")));
                    }
                    m = m.with_relation(&name, &edges);
                }
                Ok(Model::Pdl(m))
            }
            ModelKind::Dtl | ModelKind::Subset => {
                let space = self
                    .space
                    .ok_or_else(|| invalid("dtl/subset model needs `space`".into()))?
                    .build()?;
                if let Some(points) = self.points {
                    if points != space.points() {
                        return Err(invalid(format!(
                            "`points` is {points} but the space has {}",
                            space.points()
                        )));
                    }
                }
                let mut functions = BTreeMap::new();
                for (name, p) in self.programs {
                    let map = p
                        .map
                        .ok_or_else(|| invalid(format!("program `{name}` needs `map`")))?;
                    functions.insert(name, map);
                }
                Ok(if self.kind == ModelKind::Dtl {
                    Model::Dtl(DtModel {
                        space,
                        functions,
                        valuation: self.valuation,
                    })
                } else {
                    Model::Subset(SubsetModel {
                        space,
                        functions,
                        valuation: self.valuation,
                    })
                })
            }
        }
    }
}

impl From<&Model> for ModelJson {
    fn from(model: &Model) -> ModelJson {
        let maps = |fns: &BTreeMap<String, PointMap>| {
            fns.iter()
                .map(|(k, v)| {
                    (
                        k.clone(),
                        ProgramJson {
                            map: Some(v.clone()),
                            rel: None,
                        },
                    )
                })
                .collect()
        };
        match model {
            Model::Pdl(m) => ModelJson {
                kind: ModelKind::Pdl,
                points: Some(m.points),
                serial: Some(m.serial),
                space: None,
                programs: m
                    .relations
                    .iter()
                    .map(|(k, succ)| {
                        let edges = succ
                            .iter()
                            .enumerate()
                            .flat_map(|(x, s)| s.iter().map(move |y| (x, y)))
                            .collect();
                        (
                            k.clone(),
                            ProgramJson {
                                map: None,
                                rel: Some(edges),
                            },
                        )
                    })
                    .collect(),
                valuation: m.valuation.clone(),
            },
            Model::Dtl(m) => ModelJson {
                kind: ModelKind::Dtl,
                points: None,
                serial: None,
                space: Some((&m.space).into()),
                programs: maps(&m.functions),
                valuation: m.valuation.clone(),
            },
            Model::Subset(m) => ModelJson {
                kind: ModelKind::Subset,
                points: None,
                serial: None,
                space: Some((&m.space).into()),
                programs: maps(&m.functions),
                valuation: m.valuation.clone(),
            },
        }
    }
}

/// Restricted identity denoted by the test `?(body)`.
pub fn test_function(model: &SubsetModel, body: &Formula) -> Result<PointMap, ModelError> {
    model.program_function(&Program::test(body.clone()).map_err(|e| ModelError::Eval(e.to_string()))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, parse_program};

    fn set(xs: &[usize]) -> PointSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn dt_model_totality_violation() {
        let m = DtModel::new(TopoSpace::discrete(2)).with_function("a", PointMap::new(vec![Some(1), None]));
        assert_eq!(
            m.validate(),
            vec![Violation::TotalityFailure {
                program: "a".into(),
                point: 1
            }]
        );
    }

    #[test]
    fn subset_model_openness_violation() {
        let m = SubsetModel::new(TopoSpace::sierpinski()).with_function("a", PointMap::total(&[1, 0]));
        assert_eq!(
            m.validate(),
            vec![Violation::OpennessFailure {
                program: "a".into(),
                open: set(&[1]),
                image: set(&[0])
            }]
        );
    }

    #[test]
    fn serial_total_relation_is_ok() {
        let mut m = PdlModel::new(2).with_relation("a", &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        m.serial = true;
        assert!(m.validate().is_empty());
        let mut bad = PdlModel::new(2).with_relation("a", &[(0, 1)]);
        bad.serial = true;
        assert_eq!(
            bad.validate(),
            vec![Violation::SerialityFailure {
                program: "a".into(),
                point: 1
            }]
        );
    }

    #[test]
    fn composition_examples() {
        let swap = PointMap::total(&[1, 0]);
        let m = DtModel::new(TopoSpace::discrete(2))
            .with_function("s", swap.clone())
            .with_function("i", PointMap::identity(2));
        let f = m.program_function(&parse_program("s;i").unwrap()).unwrap();
        assert_eq!(*f, swap);
        let g = m.program_function(&parse_program("s;s").unwrap()).unwrap();
        assert_eq!(*g, PointMap::identity(2));
        assert!(matches!(
            m.program_function(&parse_program("?(p)").unwrap()),
            Err(ModelError::TestInTotalModel(_))
        ));
        assert!(matches!(
            m.program_function(&parse_program("zz").unwrap()),
            Err(ModelError::UnknownProgram(_))
        ));
    }

    #[test]
    fn composition_order() {
        // a then b: (b ∘ a)(0) = b(a(0)) = b(1) = 2
        let m = DtModel::new(TopoSpace::discrete(3))
            .with_function("a", PointMap::total(&[1, 2, 0]))
            .with_function("b", PointMap::total(&[0, 2, 1]));
        let f = m.program_function(&parse_program("a;b").unwrap()).unwrap();
        assert_eq!(f.apply(0), Some(2));
        assert_eq!(f.apply(1), Some(1));
        assert_eq!(f.apply(2), Some(0));
    }

    #[test]
    fn test_function_on_sierpinski_is_empty() {
        let m = SubsetModel::new(TopoSpace::sierpinski()).with_valuation(Valuation::new().with("p", set(&[0])));
        let f = m.program_function(&parse_program("?(p)").unwrap()).unwrap();
        assert_eq!(f, PointMap::empty(2));
    }

    #[test]
    fn image_examples() {
        let u = set(&[0, 1]);
        assert_eq!(PointMap::identity(3).image(u), u);
        assert_eq!(PointMap::empty(3).image(u), PointSet::EMPTY);
        let m = SubsetModel::new(TopoSpace::discrete(2)).with_valuation(Valuation::new().with("p", set(&[0])));
        let f = test_function(&m, &parse("p").unwrap()).unwrap();
        assert_eq!(f.image(u), set(&[0]));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"type":"subset","space":{"points":2,"preorder":[[0,1]]},
            "programs":{"a":{"map":[1,null]}},"valuation":{"p":[1]}}"#;
        let m = Model::from_json(text).unwrap();
        let Model::Subset(sm) = &m else { panic!() };
        assert_eq!(sm.functions["a"], PointMap::new(vec![Some(1), None]));
        let back = Model::from_json(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);

        let pdl = r#"{"type":"pdl","points":2,"serial":true,"programs":{"a":{"rel":[[0,1],[1,1]]}}}"#;
        let m = Model::from_json(pdl).unwrap();
        assert_eq!(Model::from_json(&serde_json::to_string(&m).unwrap()).unwrap(), m);

        let bad = r#"{"type":"dtl","space":{"points":2,"opens":[[],[0,1]]},"programs":{"a":{"map":[0,null]}}}"#;
        assert!(Model::from_json(bad).is_err());
    }

    #[test]
    fn scenarios() {
        let s = TopoSpace::sierpinski();
        assert!(Scenario::new(1, set(&[1])).check(&s).is_ok());
        assert!(Scenario::new(0, set(&[0])).check(&s).is_err());
        assert!(Scenario::new(0, set(&[1])).check(&s).is_err());
        assert_eq!(Scenario::all(&s).len(), 3);
    }
}
