use std::collections::BTreeMap;

use proptest::prelude::*;

use topodyn::checker::{eval_dtl, eval_pdl_relational, extension_subset, translate_pdl, SubsetEvaluator};
use topodyn::formula::parse_program;
use topodyn::frameprops::is_open_map;
use topodyn::harness::{gen_model, random_space, GenConfig, ModelClass};
use topodyn::models::test_function;
use topodyn::proofkit::{check_derivation, sample_derivation, Derivation};
use topodyn::{parse, DtModel, Formula, LanguageTag, Model, PdlModel, PointSet, Program, Scenario, SubsetModel, TopoSpace};

const ATOMS: [&str; 3] = ["p", "q", "r"];
const PROGRAMS: [&str; 3] = ["a", "b", "c"];

fn atom() -> impl Strategy<Value = Formula> {
    prop_oneof![
        5 => prop::sample::select(&ATOMS[..]).prop_map(Formula::atom),
        1 => Just(Formula::Top),
    ]
}

fn atomic_program() -> impl Strategy<Value = Program> {
    prop::sample::select(&PROGRAMS[..]).prop_map(Program::atomic)
}

fn seq_program() -> BoxedStrategy<Program> {
    atomic_program()
        .prop_recursive(3, 8, 2, |inner| {
            (inner.clone(), inner).prop_map(|(a, b)| Program::seq(a, b))
        })
        .boxed()
}

/// Formulas in the `box`/`O` fragment, with tests and sequencing.
fn box_next() -> BoxedStrategy<Formula> {
    atom()
        .prop_recursive(4, 24, 2, |inner| {
            let program = prop_oneof![
                3 => seq_program(),
                1 => inner.clone().prop_map(|b| Program::test(b).expect("body is in the fragment")),
            ];
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::and(f, g)),
                (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::or(f, g)),
                (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::implies(f, g)),
                (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::iff(f, g)),
                inner.clone().prop_map(Formula::int),
                inner.clone().prop_map(Formula::cl),
                (program, inner).prop_map(|(p, f)| Formula::next(p, f)),
            ]
        })
        .boxed()
}

fn any_formula() -> BoxedStrategy<Formula> {
    atom()
        .prop_recursive(5, 32, 2, |inner| {
            let program = prop_oneof![
                3 => seq_program(),
                1 => box_next().prop_map(|b| Program::test(b).expect("body is in the fragment")),
            ];
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::and(f, g)),
                (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::or(f, g)),
                (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::implies(f, g)),
                (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::iff(f, g)),
                (seq_program(), inner.clone()).prop_map(|(p, f)| Formula::diamond(p, f)),
                (seq_program(), inner.clone()).prop_map(|(p, f)| Formula::box_pdl(p, f)),
                inner.clone().prop_map(Formula::int),
                inner.clone().prop_map(Formula::cl),
                inner.clone().prop_map(Formula::know),
                inner.clone().prop_map(Formula::khat),
                (program, inner).prop_map(|(p, f)| Formula::next(p, f)),
            ]
        })
        .boxed()
}

fn pdl_formula() -> BoxedStrategy<Formula> {
    atom()
        .prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::and(f, g)),
                (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::or(f, g)),
                (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::implies(f, g)),
                (seq_program(), inner.clone()).prop_map(|(p, f)| Formula::diamond(p, f)),
                (seq_program(), inner).prop_map(|(p, f)| Formula::box_pdl(p, f)),
            ]
        })
        .boxed()
}

/// Epistemic formulas over `box`, `K` and `O` without tests.
fn epistemic() -> BoxedStrategy<Formula> {
    atom()
        .prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::and(f, g)),
                (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::implies(f, g)),
                inner.clone().prop_map(Formula::int),
                inner.clone().prop_map(Formula::know),
                inner.clone().prop_map(Formula::khat),
                (atomic_program(), inner).prop_map(|(p, f)| Formula::next(p, f)),
            ]
        })
        .boxed()
}

fn model_of(class: ModelClass, seed: u64, programs: usize) -> Model {
    let cfg = GenConfig::new(class, seed).with_points(5).with_programs(programs);
    gen_model(&cfg, &mut cfg.rng(0)).expect("generation succeeds").model
}

/// A model with all of `a`, `b`, `c` defined, so every generated formula
/// evaluates.
fn full_model(class: ModelClass, seed: u64) -> Model {
    (0u64..)
        .map(|k| model_of(class, seed.wrapping_add(k << 32), 3))
        .find(|m| {
            let names: Vec<&String> = match m {
                Model::Pdl(m) => m.alphabet().collect(),
                Model::Dtl(m) => m.alphabet().collect(),
                Model::Subset(m) => m.alphabet().collect(),
            };
            PROGRAMS.iter().all(|p| names.iter().any(|n| n == p))
        })
        .expect("some seed yields three programs")
}

fn dtl(seed: u64) -> DtModel {
    match full_model(ModelClass::Dtl, seed) {
        Model::Dtl(m) => m,
        _ => unreachable!(),
    }
}

fn pdl(seed: u64) -> PdlModel {
    match full_model(ModelClass::Pdl, seed) {
        Model::Pdl(m) => m,
        _ => unreachable!(),
    }
}

fn subset(seed: u64) -> SubsetModel {
    match full_model(ModelClass::Subset, seed) {
        Model::Subset(m) => m,
        _ => unreachable!(),
    }
}

/// Substitutes formulas for atoms by hand, independently of the library's
/// substitution.
fn subst(f: &Formula, map: &BTreeMap<String, Formula>) -> Formula {
    let s = |g: &Formula| subst(g, map);
    match f {
        Formula::Atom(p) => map.get(p).cloned().unwrap_or_else(|| f.clone()),
        Formula::Top => Formula::Top,
        Formula::Not(g) => Formula::not(s(g)),
        Formula::And(g, h) => Formula::and(s(g), s(h)),
        Formula::Or(g, h) => Formula::or(s(g), s(h)),
        Formula::Implies(g, h) => Formula::implies(s(g), s(h)),
        Formula::Iff(g, h) => Formula::iff(s(g), s(h)),
        Formula::Diamond(p, g) => Formula::diamond(p.clone(), s(g)),
        Formula::BoxPdl(p, g) => Formula::box_pdl(p.clone(), s(g)),
        Formula::Int(g) => Formula::int(s(g)),
        Formula::Cl(g) => Formula::cl(s(g)),
        Formula::Know(g) => Formula::know(s(g)),
        Formula::KHat(g) => Formula::khat(s(g)),
        Formula::Next(p, g) => Formula::next(p.clone(), s(g)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn print_parse_round_trip(f in any_formula()) {
        let text = f.to_string();
        prop_assert_eq!(parse(&text).unwrap(), f, "printed as {}", text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn translate_commutes_with_substitution(f in pdl_formula(), g in pdl_formula(), h in pdl_formula()) {
        let map: BTreeMap<String, Formula> = [("p".to_string(), g), ("q".to_string(), h)].into();
        let tr_map: BTreeMap<String, Formula> = map.iter().map(|(k, v)| (k.clone(), translate_pdl(v))).collect();
        prop_assert_eq!(translate_pdl(&subst(&f, &map)), subst(&translate_pdl(&f), &tr_map));
        prop_assert_eq!(f.substitute(&map), subst(&f, &map));
    }

    #[test]
    fn pdl_translation_lands_in_box_next(f in pdl_formula()) {
        prop_assert!(f.in_language(LanguageTag::Pdl));
        prop_assert!(translate_pdl(&f).in_language(LanguageTag::BoxNext));
    }

    #[test]
    fn pdl_box_is_dual_of_diamond(seed in any::<u64>(), p in seq_program(), f in pdl_formula()) {
        let m = pdl(seed);
        let boxed = eval_pdl_relational(&m, &Formula::box_pdl(p.clone(), f.clone())).unwrap();
        let dia = eval_pdl_relational(&m, &Formula::diamond(p, Formula::not(f))).unwrap();
        prop_assert_eq!(boxed, m.carrier().difference(dia));
    }

    #[test]
    fn dtl_box_is_dual_of_diamond(seed in any::<u64>(), p in seq_program(), f in pdl_formula()) {
        let m = dtl(seed);
        let boxed = eval_dtl(&m, &Formula::box_pdl(p.clone(), f.clone())).unwrap();
        let dia = eval_dtl(&m, &Formula::diamond(p, Formula::not(f))).unwrap();
        prop_assert_eq!(boxed, m.space.carrier().difference(dia));
    }

    #[test]
    fn dtl_direct_and_translated_routes_agree(seed in any::<u64>(), f in pdl_formula()) {
        let m = dtl(seed);
        prop_assert_eq!(eval_dtl(&m, &f).unwrap(), eval_dtl(&m, &translate_pdl(&f)).unwrap());
    }

    #[test]
    fn next_over_seq_unfolds(seed in any::<u64>(), p in seq_program(), f in pdl_formula()) {
        let m = dtl(seed);
        let g = Formula::next(p, translate_pdl(&f));
        prop_assert_eq!(eval_dtl(&m, &g).unwrap(), eval_dtl(&m, &g.expand_next_seq()).unwrap());
    }

    #[test]
    fn seq_is_associative(seed in any::<u64>(), a in seq_program(), b in seq_program(), c in seq_program()) {
        let m = dtl(seed);
        let left = Program::seq(Program::seq(a.clone(), b.clone()), c.clone());
        let right = Program::seq(a, Program::seq(b, c));
        prop_assert_eq!(m.program_function(&left).unwrap(), m.program_function(&right).unwrap());
    }

    #[test]
    fn box_next_truth_ignores_information_set(seed in any::<u64>(), f in box_next()) {
        let m = subset(seed);
        let state = SubsetEvaluator::new(&m).state_extension(&f).unwrap();
        for &u in m.space.opens() {
            prop_assert_eq!(extension_subset(&m, &f, u).unwrap(), state.intersection(u));
        }
    }

    #[test]
    fn knowledge_is_uniform_on_information_sets(seed in any::<u64>(), f in epistemic()) {
        let m = subset(seed);
        let k = Formula::know(f);
        for &u in m.space.opens() {
            let ext = extension_subset(&m, &k, u).unwrap();
            prop_assert!(ext.is_empty() || ext == u);
        }
    }

    #[test]
    fn negation_of_next_splits(seed in any::<u64>(), a in atomic_program(), f in epistemic()) {
        let m = subset(seed);
        let lhs = Formula::next(a.clone(), Formula::not(f.clone()));
        let rhs = Formula::and(Formula::not(Formula::next(a.clone(), f)), Formula::next(a, Formula::Top));
        let mut ev = SubsetEvaluator::new(&m);
        for s in Scenario::all(&m.space) {
            prop_assert_eq!(ev.eval(&lhs, &s).unwrap(), ev.eval(&rhs, &s).unwrap());
        }
    }

    #[test]
    fn test_maps_are_open(seed in any::<u64>(), f in box_next()) {
        let m = subset(seed);
        let map = test_function(&m, &f).unwrap();
        prop_assert!(is_open_map(&m.space, &map).holds);
        let interior = m.space.interior(SubsetEvaluator::new(&m).state_extension(&f).unwrap());
        prop_assert_eq!(map.domain(), interior);
    }

    #[test]
    fn open_partial_maps_compose_to_open_maps(seed in any::<u64>(), a in seq_program()) {
        let m = subset(seed);
        let map = m.program_function(&a).unwrap();
        prop_assert!(is_open_map(&m.space, &map).holds);
    }

    #[test]
    fn serial_models_validate_d(seed in any::<u64>(), p in seq_program(), f in pdl_formula()) {
        let m = pdl(seed);
        prop_assume!(m.serial);
        let d = Formula::implies(Formula::box_pdl(p.clone(), f.clone()), Formula::diamond(p, f));
        prop_assert_eq!(eval_pdl_relational(&m, &d).unwrap(), m.carrier());
    }

    #[test]
    fn interior_axioms(seed in any::<u64>(), n in 1usize..=8, a in any::<u64>(), b in any::<u64>()) {
        let cfg = GenConfig::new(ModelClass::Dtl, seed);
        let space: TopoSpace = random_space(&mut cfg.rng(0), n, None);
        let full = space.carrier();
        let (a, b) = (PointSet::from_bits(a).intersection(full), PointSet::from_bits(b).intersection(full));
        let int = |s: PointSet| space.interior(s);
        prop_assert!(int(a).is_subset(a));
        prop_assert_eq!(int(int(a)), int(a));
        prop_assert_eq!(int(a.intersection(b)), int(a).intersection(int(b)));
        prop_assert_eq!(int(full), full);
        prop_assert_eq!(space.closure(a), full.difference(int(full.difference(a))));
    }

    #[test]
    fn derivation_prefixes_stay_valid(cut in 1usize..=4) {
        let d = sample_derivation();
        let prefix = Derivation { system: d.system, steps: d.steps[..cut].to_vec() };
        prop_assert!(check_derivation(&prefix).is_ok());
    }
}

#[test]
fn seq_program_parses_left_associated() {
    let p = parse_program("a;b;c").unwrap();
    assert_eq!(p, Program::seq(Program::seq(Program::atomic("a"), Program::atomic("b")), Program::atomic("c")));
}
