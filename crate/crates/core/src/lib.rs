//! Dynamic topological and subset-space semantics for program logics:
//! formulas, finite topologies, model checkers, the network transformation
//! from relational models, frame properties, announcements, derivation
//! checking and randomized soundness audits.

pub mod announce;
pub mod checker;
pub mod cli;
pub mod formula;
pub mod frameprops;
pub mod harness;
pub mod models;
pub mod proofkit;
pub mod topology;
pub mod transform;

pub use formula::{parse, Formula, FormulaError, LanguageTag, Program};
pub use models::{DtModel, Model, PdlModel, PointMap, Scenario, SubsetModel, Valuation};
pub use topology::{PointSet, TopoSpace};
