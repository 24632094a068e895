//! Serial relational models to dynamic topological models via networks.
//!
//! A network labels every program sequence by a source state so that each
//! `a`-extension of a sequence is an `R_a`-successor of its label. Truth of
//! a formula at a network only inspects sequences up to the formula's modal
//! depth, so networks are built in strata `N_0..N_D`, stratum `d` holding the
//! labelings of sequences of length at most `d`. The shift `f_a` sends a
//! depth-`d` network to its `a`-subtree in stratum `d-1`; stratum `N_0` has
//! no shifts. Within a stratum the topology is generated by the partition
//! into cells `U_{x,d}` of networks rooted at `x`.

use serde::Serialize;
use thiserror::Error;

use crate::checker::{eval_pdl_relational, CheckError};
use crate::formula::{Formula, Program};
use crate::models::{PdlModel, Valuation};
use crate::topology::PointSet;

/// Default cap on the total number of networks across all strata.
pub const DEFAULT_BUDGET: u128 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("model is not serial: program `{program}` has no successor at state {point}")]
    NonSerialModel { program: String, point: usize },
    #[error("network space would hold {bound} networks, above the budget of {budget}")]
    BudgetExceeded { bound: u128, budget: u128 },
    #[error("formula `{formula}` has modal depth {depth}, above stratum depth {stratum}")]
    DepthExceeded { formula: String, depth: usize, stratum: usize },
    #[error("`{0}` is not interpreted over network spaces (PDL over atomic programs only)")]
    Unsupported(String),
    #[error("unknown program `{0}`")]
    UnknownProgram(String),
    #[error(transparent)]
    Check(#[from] CheckError),
}

#[derive(Debug, Clone)]
struct Stratum {
    roots: Vec<usize>,
    /// `children[i * k + j]` is the shift of network `i` along program `j`,
    /// an index into the previous stratum. Empty for stratum 0.
    children: Vec<usize>,
    /// Networks of this stratum grouped by root.
    cells: Vec<Vec<usize>>,
}

impl Stratum {
    fn len(&self) -> usize {
        self.roots.len()
    }
}

#[derive(Debug, Clone)]
pub struct NetworkSpace {
    source_points: usize,
    programs: Vec<String>,
    valuation: Valuation,
    strata: Vec<Stratum>,
}

/// `|N_d(x)| = prod_a sum_{y in R_a(x)} |N_{d-1}(y)|`, per stratum and root.
pub fn stratum_counts(model: &PdlModel, depth: usize) -> Vec<Vec<u128>> {
    let mut counts = vec![vec![1u128; model.points]];
    for d in 1..=depth {
        let prev = &counts[d - 1];
        let row = (0..model.points)
            .map(|x| {
                model
                    .relations
                    .values()
                    .map(|succ| succ[x].iter().map(|y| prev[y]).fold(0u128, u128::saturating_add))
                    .fold(1u128, u128::saturating_mul)
            })
            .collect();
        counts.push(row);
    }
    counts
}

/// Builds strata `N_0..N_depth` for a serial model.
pub fn build_network_space(model: &PdlModel, depth: usize, budget: u128) -> Result<NetworkSpace, TransformError> {
    for (name, succ) in &model.relations {
        if let Some(point) = succ.iter().position(|s| s.is_empty()) {
            return Err(TransformError::NonSerialModel {
                program: name.clone(),
                point,
            });
        }
    }
    let bound = stratum_counts(model, depth)
        .iter()
        .flatten()
        .fold(0u128, |acc, &c| acc.saturating_add(c));
    if bound > budget {
        return Err(TransformError::BudgetExceeded { bound, budget });
    }

    let n = model.points;
    let programs: Vec<String> = model.relations.keys().cloned().collect();
    let relations: Vec<&Vec<PointSet>> = model.relations.values().collect();
    let k = programs.len();

    let base = Stratum {
        roots: (0..n).collect(),
        children: Vec::new(),
        cells: (0..n).map(|x| vec![x]).collect(),
    };
    let mut strata = vec![base];
    for _ in 1..=depth {
        let prev = strata.last().expect("stratum 0 exists");
        let mut roots = Vec::new();
        let mut children = Vec::new();
        let mut cells = vec![Vec::new(); n];
        for x in 0..n {
            let candidates: Vec<Vec<usize>> = relations
                .iter()
                .map(|succ| succ[x].iter().flat_map(|y| prev.cells[y].iter().copied()).collect())
                .collect();
            // odometer over one candidate per program
            let mut choice = vec![0usize; k];
            loop {
                cells[x].push(roots.len());
                roots.push(x);
                children.extend(choice.iter().zip(&candidates).map(|(&c, cands)| cands[c]));
                let mut j = k;
                loop {
                    if j == 0 {
                        break;
                    }
                    j -= 1;
                    choice[j] += 1;
                    if choice[j] < candidates[j].len() {
                        break;
                    }
                    choice[j] = 0;
                    if j == 0 {
                        j = usize::MAX;
                        break;
                    }
                }
                if j == usize::MAX || k == 0 {
                    break;
                }
            }
        }
        strata.push(Stratum { roots, children, cells });
    }
    Ok(NetworkSpace {
        source_points: n,
        programs,
        valuation: model.valuation.clone(),
        strata,
    })
}

/// Counterexample to truth preservation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub formula: String,
    pub network: usize,
    pub root: usize,
    pub network_truth: bool,
    pub source_truth: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreservationReport {
    pub depth: usize,
    pub stratum_sizes: Vec<usize>,
    pub formulas_checked: usize,
    pub networks_checked: usize,
    pub disagreements: Vec<Disagreement>,
}

impl PreservationReport {
    pub fn holds(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Failure of `f_a(U_{x,d}) = ⋃_{y ∈ R_a(x)} U_{y,d-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftOpennessFailure {
    pub program: String,
    pub stratum: usize,
    pub root: usize,
}

impl NetworkSpace {
    pub fn depth(&self) -> usize {
        self.strata.len() - 1
    }

    pub fn programs(&self) -> &[String] {
        &self.programs
    }

    pub fn stratum_sizes(&self) -> Vec<usize> {
        self.strata.iter().map(Stratum::len).collect()
    }

    pub fn root(&self, stratum: usize, network: usize) -> usize {
        self.strata[stratum].roots[network]
    }

    /// Networks of `stratum` rooted at `x`.
    pub fn cell(&self, stratum: usize, x: usize) -> &[usize] {
        &self.strata[stratum].cells[x]
    }

    fn program_index(&self, name: &str) -> Result<usize, TransformError> {
        self.programs
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| TransformError::UnknownProgram(name.to_string()))
    }

    /// Shift of a network along a program; `None` on stratum 0.
    pub fn shift(&self, stratum: usize, network: usize, program: &str) -> Result<Option<usize>, TransformError> {
        let j = self.program_index(program)?;
        Ok(self.shift_by_index(stratum, network, j))
    }

    fn shift_by_index(&self, stratum: usize, network: usize, j: usize) -> Option<usize> {
        (stratum > 0).then(|| self.strata[stratum].children[network * self.programs.len() + j])
    }

    /// Label `alpha(seq)` of a network, `seq` given as program indices with
    /// `seq.len() <= stratum`.
    pub fn label(&self, stratum: usize, network: usize, seq: &[usize]) -> usize {
        let (mut d, mut i) = (stratum, network);
        for &j in seq {
            i = self.shift_by_index(d, i, j).expect("sequence longer than the stratum depth");
            d -= 1;
        }
        self.root(d, i)
    }

    /// Labels of all sequences of length at most `stratum`, shortlex order.
    pub fn labels(&self, stratum: usize, network: usize) -> Vec<usize> {
        let k = self.programs.len();
        let mut out = Vec::new();
        let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
        for len in 0..=stratum {
            for seq in &frontier {
                out.push(self.label(stratum, network, seq));
            }
            if len == stratum || k == 0 {
                break;
            }
            frontier = frontier
                .iter()
                .flat_map(|s| {
                    (0..k).map(move |j| {
                        let mut t = s.clone();
                        t.push(j);
                        t
                    })
                })
                .collect();
        }
        out
    }

    /// Truth value of `f` at every network of `stratum`.
    pub fn extension(&self, f: &Formula, stratum: usize) -> Result<Vec<bool>, TransformError> {
        let depth = f.modal_depth();
        if depth > stratum {
            return Err(TransformError::DepthExceeded {
                formula: f.to_string(),
                depth,
                stratum,
            });
        }
        self.ext(f, stratum)
    }

    fn ext(&self, f: &Formula, d: usize) -> Result<Vec<bool>, TransformError> {
        let layer = &self.strata[d];
        let zip = |a: Vec<bool>, b: Vec<bool>, op: fn(bool, bool) -> bool| -> Vec<bool> {
            a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
        };
        Ok(match f {
            Formula::Atom(p) => {
                let v = self.valuation.get(p);
                layer.roots.iter().map(|&x| v.contains(x)).collect()
            }
            Formula::Top => vec![true; layer.len()],
            Formula::Not(g) => self.ext(g, d)?.into_iter().map(|b| !b).collect(),
            Formula::And(g, h) => zip(self.ext(g, d)?, self.ext(h, d)?, |a, b| a && b),
            Formula::Or(g, h) => zip(self.ext(g, d)?, self.ext(h, d)?, |a, b| a || b),
            Formula::Implies(g, h) => zip(self.ext(g, d)?, self.ext(h, d)?, |a, b| !a || b),
            Formula::Iff(g, h) => zip(self.ext(g, d)?, self.ext(h, d)?, |a, b| a == b),
            Formula::Diamond(p, g) | Formula::BoxPdl(p, g) => {
                let Program::Atomic(name) = p else {
                    return Err(TransformError::Unsupported(f.to_string()));
                };
                let j = self.program_index(name)?;
                if d == 0 {
                    return Err(TransformError::DepthExceeded {
                        formula: f.to_string(),
                        depth: 1,
                        stratum: 0,
                    });
                }
                let below = self.ext(g, d - 1)?;
                let shifted: Vec<bool> = (0..layer.len())
                    .map(|i| below[self.shift_by_index(d, i, j).expect("d > 0")])
                    .collect();
                let existential = matches!(f, Formula::Diamond(..));
                // closure / interior in the partition topology: a network is in
                // cl(P) iff its cell meets P, and in int(P) iff its cell is in P
                let per_cell: Vec<bool> = layer
                    .cells
                    .iter()
                    .map(|cell| {
                        if existential {
                            cell.iter().any(|&i| shifted[i])
                        } else {
                            cell.iter().all(|&i| shifted[i])
                        }
                    })
                    .collect();
                layer.roots.iter().map(|&x| per_cell[x]).collect()
            }
            Formula::Int(_) | Formula::Cl(_) | Formula::Know(_) | Formula::KHat(_) | Formula::Next(..) => {
                return Err(TransformError::Unsupported(f.to_string()))
            }
        })
    }

    /// Image of every cell under every shift equals the union of the cells
    /// over the successors of its root.
    pub fn check_shift_openness(&self, model: &PdlModel) -> Vec<ShiftOpennessFailure> {
        let mut failures = Vec::new();
        for d in 1..=self.depth() {
            let below = &self.strata[d - 1];
            for (j, name) in self.programs.iter().enumerate() {
                let succ = &model.relations[name];
                for x in 0..self.source_points {
                    let mut image = vec![false; below.len()];
                    for &i in &self.strata[d].cells[x] {
                        image[self.shift_by_index(d, i, j).expect("d > 0")] = true;
                    }
                    let expected: Vec<bool> = below.roots.iter().map(|&y| succ[x].contains(y)).collect();
                    let open = below
                        .cells
                        .iter()
                        .all(|cell| cell.iter().all(|&i| image[i]) || cell.iter().all(|&i| !image[i]));
                    if image != expected || !open {
                        failures.push(ShiftOpennessFailure {
                            program: name.clone(),
                            stratum: d,
                            root: x,
                        });
                    }
                }
            }
        }
        failures
    }

    /// The whole space as a model-like JSON document with global point
    /// indices. Shifts out of stratum 0 are `null`.
    pub fn to_json(&self) -> serde_json::Value {
        let offsets: Vec<usize> = self
            .strata
            .iter()
            .scan(0, |acc, s| {
                let o = *acc;
                *acc += s.len();
                Some(o)
            })
            .collect();
        let total: usize = self.strata.iter().map(Stratum::len).sum();
        let cells: Vec<Vec<usize>> = self
            .strata
            .iter()
            .zip(&offsets)
            .flat_map(|(s, &o)| {
                s.cells
                    .iter()
                    .filter(|c| !c.is_empty())
                    .map(move |c| c.iter().map(|i| i + o).collect::<Vec<_>>())
            })
            .collect();
        let mut programs = serde_json::Map::new();
        for (j, name) in self.programs.iter().enumerate() {
            let map: Vec<Option<usize>> = self
                .strata
                .iter()
                .enumerate()
                .flat_map(|(d, s)| {
                    let offsets = &offsets;
                    (0..s.len()).map(move |i| self.shift_by_index(d, i, j).map(|c| c + offsets[d - 1]))
                })
                .collect();
            programs.insert(name.clone(), serde_json::json!({ "map": map }));
        }
        let mut valuation = serde_json::Map::new();
        for (atom, set) in self.valuation.iter() {
            let members: Vec<usize> = self
                .strata
                .iter()
                .zip(&offsets)
                .flat_map(|(s, &o)| {
                    s.roots
                        .iter()
                        .enumerate()
                        .filter(|(_, &x)| set.contains(x))
                        .map(move |(i, _)| i + o)
                })
                .collect();
            valuation.insert(atom.clone(), serde_json::json!(members));
        }
        let strata: Vec<serde_json::Value> = self
            .strata
            .iter()
            .zip(&offsets)
            .enumerate()
            .map(|(d, (s, &o))| serde_json::json!({ "depth": d, "offset": o, "size": s.len(), "roots": s.roots }))
            .collect();
        serde_json::json!({
            "type": "network",
            "depth": self.depth(),
            "space": { "points": total, "subbasis": cells },
            "strata": strata,
            "programs": programs,
            "valuation": valuation,
        })
    }
}

/// Truth of `f` at network `network` of `stratum`.
pub fn eval_network(ns: &NetworkSpace, f: &Formula, stratum: usize, network: usize) -> Result<bool, TransformError> {
    Ok(ns.extension(f, stratum)?[network])
}

/// Compares truth at every depth-`depth` network with truth at its root in
/// the source model.
pub fn check_truth_preservation(
    model: &PdlModel,
    formulas: &[Formula],
    depth: usize,
    budget: u128,
) -> Result<(NetworkSpace, PreservationReport), TransformError> {
    let ns = build_network_space(model, depth, budget)?;
    let report = preservation_report(&ns, model, formulas)?;
    Ok((ns, report))
}

pub fn preservation_report(
    ns: &NetworkSpace,
    model: &PdlModel,
    formulas: &[Formula],
) -> Result<PreservationReport, TransformError> {
    let depth = ns.depth();
    let mut disagreements = Vec::new();
    for f in formulas {
        let source = eval_pdl_relational(model, f)?;
        let networks = ns.extension(f, depth)?;
        for (i, &truth) in networks.iter().enumerate() {
            let root = ns.root(depth, i);
            if truth != source.contains(root) {
                disagreements.push(Disagreement {
                    formula: f.to_string(),
                    network: i,
                    root,
                    network_truth: truth,
                    source_truth: source.contains(root),
                });
            }
        }
    }
    Ok(PreservationReport {
        depth,
        stratum_sizes: ns.stratum_sizes(),
        formulas_checked: formulas.len(),
        networks_checked: ns.strata[depth].len(),
        disagreements,
    })
}
