//! Continuity, openness and seriality deciders, scheme validity by one-atom
//! valuation sweeps, and countermodels for the two frame schemes.

use serde::Serialize;

use crate::checker::eval_dtl;
use crate::formula::{Formula, Program};
use crate::models::{openness_failure, DtModel, PdlModel, PointMap, Valuation};
use crate::topology::{PointSet, TopoSpace};

/// Failure witness of a frame property.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Open `open` whose preimage is not open; `point` lies on its boundary.
    Continuity { open: PointSet, preimage: PointSet, point: usize },
    /// Open `open` whose image is not open.
    Openness { open: PointSet, image: PointSet },
    /// Valuation of `p` and a point falsifying the scheme instance.
    Scheme { valuation: PointSet, point: usize },
    Seriality { program: String, point: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrameReport {
    pub property: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub program: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl FrameReport {
    fn new(property: &str, witness: Option<Witness>) -> FrameReport {
        FrameReport {
            property: property.to_string(),
            holds: witness.is_none(),
            program: None,
            witness,
        }
    }

    pub fn for_program(mut self, program: &str) -> FrameReport {
        self.program = Some(program.to_string());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    /// `O[a] box p -> box O[a] p`
    Continuity,
    /// `box O[a] p -> O[a] box p`
    Openness,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Continuity => "continuity_scheme",
            SchemeKind::Openness => "openness_scheme",
        }
    }

    /// The scheme instance for program `a` and atom `p`.
    pub fn instance(self) -> Formula {
        let p = Formula::atom("p");
        let a = Program::atomic("a");
        let next_int = Formula::next(a.clone(), Formula::int(p.clone()));
        let int_next = Formula::int(Formula::next(a, p));
        match self {
            SchemeKind::Continuity => Formula::implies(next_int, int_next),
            SchemeKind::Openness => Formula::implies(int_next, next_int),
        }
    }
}

fn continuity_failure(space: &TopoSpace, f: &PointMap) -> Option<(PointSet, PointSet)> {
    space
        .opens()
        .iter()
        .map(|&v| (v, f.preimage(v)))
        .find(|&(_, pre)| !space.is_open(pre))
}

/// Minimal-neighborhood form: `f(mn(x)) ⊆ mn(f(x))` for every `x`.
fn continuous_by_min_nbhds(space: &TopoSpace, f: &PointMap) -> bool {
    (0..space.points()).all(|x| match f.apply(x) {
        Some(y) => f.image(space.min_nbhd(x)).is_subset(space.min_nbhd(y)),
        None => true,
    })
}

/// Preimages of opens are open. For total maps the minimal-neighborhood
/// criterion is computed as well and must agree.
pub fn is_continuous(space: &TopoSpace, f: &PointMap) -> FrameReport {
    let failure = continuity_failure(space, f);
    if f.is_total() {
        assert_eq!(
            failure.is_none(),
            continuous_by_min_nbhds(space, f),
            "continuity criteria disagree for {f:?} on {space:?}"
        );
    }
    let witness = failure.map(|(open, preimage)| Witness::Continuity {
        open,
        preimage,
        point: preimage
            .difference(space.interior(preimage))
            .min()
            .expect("a non-open set has a non-interior point"),
    });
    FrameReport::new("continuous", witness)
}

/// Images of opens are open. Partial maps are allowed.
pub fn is_open_map(space: &TopoSpace, f: &PointMap) -> FrameReport {
    if f.is_total() {
        let by_nbhds = space.min_nbhds().iter().all(|&u| space.is_open(f.image(u)));
        assert_eq!(by_nbhds, openness_failure(space, f).is_none());
    }
    let witness = openness_failure(space, f).map(|(open, image)| Witness::Openness { open, image });
    FrameReport::new("open", witness)
}

/// Checks the scheme under every valuation of `p`, in witness order.
pub fn validates_scheme(space: &TopoSpace, f: &PointMap, scheme: SchemeKind) -> FrameReport {
    let instance = scheme.instance();
    let base = DtModel::new(space.clone()).with_function("a", f.clone());
    let mut valuations: Vec<PointSet> = PointSet::all_subsets(space.points()).collect();
    valuations.sort_by(PointSet::witness_cmp);
    let witness = valuations.into_iter().find_map(|v| {
        let model = DtModel {
            valuation: Valuation::new().with("p", v),
            ..base.clone()
        };
        let ext = eval_dtl(&model, &instance).expect("scheme instances are in the DTL fragment");
        space
            .carrier()
            .difference(ext)
            .min()
            .map(|point| Witness::Scheme { valuation: v, point })
    });
    FrameReport::new(scheme.name(), witness)
}

/// `v(p) = U` for the smallest open `U` with non-open preimage, and a point
/// of `f⁻¹(U)` outside its interior.
pub fn build_continuity_countermodel(space: &TopoSpace, f: &PointMap) -> Option<(PointSet, usize)> {
    let (u, a) = continuity_failure(space, f)?;
    let x = a.difference(space.interior(a)).min()?;
    Some((u, x))
}

/// `v(p) = f(U)` for the smallest open `U` with non-open image, and a point
/// of `U` mapped outside the interior of the image.
pub fn build_openness_countermodel(space: &TopoSpace, f: &PointMap) -> Option<(PointSet, usize)> {
    let (u, a) = openness_failure(space, f)?;
    let boundary = a.difference(space.interior(a));
    let x = u.iter().find(|&x| f.apply(x).is_some_and(|y| boundary.contains(y)))?;
    Some((a, x))
}

pub fn is_serial(model: &PdlModel) -> FrameReport {
    let witness = model.relations.iter().find_map(|(name, succ)| {
        succ.iter().position(|s| s.is_empty()).map(|point| Witness::Seriality {
            program: name.clone(),
            point,
        })
    });
    FrameReport::new("serial", witness)
}

/// All self-maps of an `n`-point carrier in lexicographic order.
pub fn all_self_maps(n: usize) -> Vec<PointMap> {
    let count = n.pow(n as u32);
    (0..count)
        .map(|mut code| {
            let mut images = vec![0; n];
            for slot in images.iter_mut().rev() {
                *slot = code % n;
                code /= n;
            }
            PointMap::total(&images)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[usize]) -> PointSet {
        xs.iter().copied().collect()
    }

    fn swap() -> PointMap {
        PointMap::total(&[1, 0])
    }

    fn rotate_space() -> TopoSpace {
        TopoSpace::from_subbasis(3, &[set(&[0, 1]), set(&[1, 2])]).unwrap()
    }

    fn rotate() -> PointMap {
        PointMap::total(&[1, 2, 0])
    }

    fn scheme_false_at(space: &TopoSpace, f: &PointMap, scheme: SchemeKind, v: PointSet, x: usize) -> bool {
        let m = DtModel::new(space.clone())
            .with_function("a", f.clone())
            .with_valuation(Valuation::new().with("p", v));
        !eval_dtl(&m, &scheme.instance()).unwrap().contains(x)
    }

    #[test]
    fn continuity_examples() {
        for f in all_self_maps(3) {
            assert!(is_continuous(&TopoSpace::discrete(3), &f).holds);
            assert!(is_continuous(&TopoSpace::indiscrete(3), &f).holds);
        }
        let r = is_continuous(&TopoSpace::sierpinski(), &swap());
        assert!(!r.holds);
        assert_eq!(
            r.witness,
            Some(Witness::Continuity {
                open: set(&[1]),
                preimage: set(&[0]),
                point: 0
            })
        );
    }

    #[test]
    fn openness_examples() {
        let s = TopoSpace::sierpinski();
        assert!(is_open_map(&s, &PointMap::identity(2)).holds);
        assert!(is_open_map(&s, &PointMap::constant(2, 1)).holds);
        let r = is_open_map(&s, &swap());
        assert_eq!(
            r.witness,
            Some(Witness::Openness {
                open: set(&[1]),
                image: set(&[0])
            })
        );
    }

    #[test]
    fn scheme_examples() {
        let d = TopoSpace::discrete(3);
        for f in all_self_maps(3) {
            assert!(validates_scheme(&d, &f, SchemeKind::Continuity).holds);
            assert!(validates_scheme(&d, &f, SchemeKind::Openness).holds);
        }
        let s = TopoSpace::sierpinski();
        assert_eq!(
            validates_scheme(&s, &swap(), SchemeKind::Continuity).witness,
            Some(Witness::Scheme {
                valuation: set(&[1]),
                point: 0
            })
        );
        assert_eq!(
            validates_scheme(&s, &swap(), SchemeKind::Openness).witness,
            Some(Witness::Scheme {
                valuation: set(&[0]),
                point: 1
            })
        );
    }

    #[test]
    fn countermodel_examples() {
        let s = TopoSpace::sierpinski();
        assert_eq!(build_continuity_countermodel(&s, &PointMap::identity(2)), None);
        assert_eq!(build_openness_countermodel(&s, &PointMap::identity(2)), None);
        assert_eq!(build_continuity_countermodel(&s, &swap()), Some((set(&[1]), 0)));
        assert_eq!(build_openness_countermodel(&s, &swap()), Some((set(&[0]), 1)));
        let t = rotate_space();
        assert_eq!(build_continuity_countermodel(&t, &rotate()), Some((set(&[1]), 0)));
        assert_eq!(build_openness_countermodel(&t, &rotate()), Some((set(&[2]), 1)));
        assert!(scheme_false_at(&s, &swap(), SchemeKind::Continuity, set(&[1]), 0));
        assert!(scheme_false_at(&s, &swap(), SchemeKind::Openness, set(&[0]), 1));
        assert!(scheme_false_at(&t, &rotate(), SchemeKind::Continuity, set(&[1]), 0));
        assert!(scheme_false_at(&t, &rotate(), SchemeKind::Openness, set(&[2]), 1));
    }

    #[test]
    fn characterizations_on_three_points() {
        for space in TopoSpace::enumerate(3) {
            for f in all_self_maps(3) {
                let cont = is_continuous(&space, &f).holds;
                let open = is_open_map(&space, &f).holds;
                assert_eq!(validates_scheme(&space, &f, SchemeKind::Continuity).holds, cont);
                assert_eq!(validates_scheme(&space, &f, SchemeKind::Openness).holds, open);
                if let Some((v, x)) = build_continuity_countermodel(&space, &f) {
                    assert!(scheme_false_at(&space, &f, SchemeKind::Continuity, v, x));
                }
                if let Some((v, x)) = build_openness_countermodel(&space, &f) {
                    assert!(scheme_false_at(&space, &f, SchemeKind::Openness, v, x));
                }
            }
        }
    }

    #[test]
    fn seriality() {
        let total = PdlModel::new(2).with_relation("a", &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert!(is_serial(&total).holds);
        assert!(is_serial(&PdlModel::new(2).with_relation("a", &[(0, 0), (1, 1)])).holds);
        let empty = PdlModel::new(2).with_relation("a", &[]);
        assert_eq!(
            is_serial(&empty).witness,
            Some(Witness::Seriality {
                program: "a".into(),
                point: 0
            })
        );
    }

    #[test]
    fn self_map_count() {
        assert_eq!(all_self_maps(3).len(), 27);
        assert_eq!(all_self_maps(2)[1], PointMap::total(&[0, 1]));
    }
}
