use kbsc_core::automata::dfa_equivalent;
use kbsc_core::conditions::{
    check, check_controllability, check_inf_obs_extended, check_inf_obs_extended_with, knowledge_lines, Condition,
    CoobsVariant, EventDomain, LegacyOptions, Shape, Shorthand, WorldDomain,
};
use kbsc_core::format::{parse_model, serialize_model};
use kbsc_core::fusion::{fuse, ControlDecision, DecisionBag, FusedDecision};
use kbsc_core::kripke::{guard_transform, Evaluator, Formula, Relation};
use kbsc_core::oracle::{
    oracle_condition, oracle_eval, oracle_solves, random_diamond, random_formula, random_problem, seeded_rng,
    OracleCondition, RandomConfig,
};
use kbsc_core::synthesis::{decide, knowledge_summary, synthesize, verify_solution, PolicyCase};
use kbsc_core::{Analysis, Problem};
use proptest::prelude::*;

/// Every third two-supervisor instance is drawn from the diamond family.
fn instance(seed: u64, supervisors: usize) -> Problem {
    let mut rng = seeded_rng(seed);
    if supervisors == 2 && seed % 3 == 0 {
        return random_diamond(&mut rng);
    }
    random_problem(
        &mut rng,
        RandomConfig {
            supervisors,
            ..RandomConfig::default()
        },
    )
}

fn all_conditions() -> Vec<(Condition, OracleCondition)> {
    let legacy = [
        (Relation::Total, WorldDomain::All, EventDomain::All),
        (Relation::Total, WorldDomain::Legal, EventDomain::Controllable),
        (Relation::Partial, WorldDomain::Legal, EventDomain::All),
    ];
    let mut v = vec![
        (Condition::Controllability, OracleCondition::Controllability),
        (Condition::Extended, OracleCondition::Extended),
        (
            Condition::Corrected(Shape::Coupled),
            OracleCondition::Corrected(Shape::Coupled),
        ),
        (
            Condition::Corrected(Shape::Split),
            OracleCondition::Corrected(Shape::Split),
        ),
    ];
    for (relation, worlds, events) in legacy {
        let o = LegacyOptions {
            relation,
            worlds,
            events,
        };
        v.push((Condition::Legacy(o), OracleCondition::Legacy(o)));
    }
    for c in [
        CoobsVariant::Cp,
        CoobsVariant::Da,
        CoobsVariant::StrongCp,
        CoobsVariant::StrongDa,
    ] {
        v.push((Condition::Coobservability(c), OracleCondition::Coobservability(c)));
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn encapsulation_and_vacuity(seed in any::<u64>(), n in 1usize..=3) {
        let p = instance(seed, n);
        let a = Analysis::new(p.clone());
        let mut rng = seeded_rng(seed ^ 0x5eed);
        let mut partial = Evaluator::new(a.frame(), Relation::Partial);
        let mut total = Evaluator::new(a.frame(), Relation::Total);
        for _ in 0..4 {
            let phi = random_formula(&mut rng, p.plant.event_count(), n, 4);
            let lhs = partial.truth(&phi).unwrap();
            let rhs = total.truth(&guard_transform(&phi)).unwrap();
            for w in a.frame().legal_worlds() {
                prop_assert_eq!(lhs[w.0], rhs[w.0]);
            }
            for w in a.frame().worlds().filter(|&w| !a.frame().is_legal(w)) {
                for i in 0..n {
                    prop_assert!(partial.holds(w, &Formula::know(i, phi.clone())).unwrap());
                }
            }
        }
    }

    #[test]
    fn knowledge_is_veridical_on_legal_worlds(seed in any::<u64>()) {
        let p = instance(seed, 2);
        let a = Analysis::new(p.clone());
        let mut rng = seeded_rng(seed.wrapping_add(1));
        let mut ev = Evaluator::new(a.frame(), Relation::Partial);
        for _ in 0..4 {
            let phi = random_formula(&mut rng, p.plant.event_count(), 2, 3);
            let psi = random_formula(&mut rng, p.plant.event_count(), 2, 3);
            let body = ev.truth(&phi).unwrap();
            for i in 0..2 {
                let k = ev.truth(&Formula::know(i, phi.clone())).unwrap();
                let both = ev.truth(&Formula::know(i, phi.clone().and(psi.clone()))).unwrap();
                let kpsi = ev.truth(&Formula::know(i, psi.clone())).unwrap();
                for w in a.frame().worlds() {
                    if a.frame().is_legal(w) {
                        prop_assert!(!k[w.0] || body[w.0]);
                    }
                    prop_assert_eq!(both[w.0], k[w.0] && kpsi[w.0]);
                }
            }
        }
    }

    #[test]
    fn evaluator_matches_naive_semantics(seed in any::<u64>(), n in 1usize..=3) {
        let p = instance(seed, n);
        let a = Analysis::new(p.clone());
        let mut rng = seeded_rng(seed.rotate_left(7));
        for rel in [Relation::Partial, Relation::Total] {
            let mut ev = Evaluator::new(a.frame(), rel);
            for _ in 0..3 {
                let phi = random_formula(&mut rng, p.plant.event_count(), n, 3);
                let fast = ev.truth(&phi).unwrap();
                let slow = oracle_eval(&p, &phi, rel).unwrap();
                prop_assert_eq!(fast.len(), slow.len());
                for (w, (legal, v)) in slow.into_iter().enumerate() {
                    prop_assert_eq!(legal, a.frame().is_legal(kbsc_core::observation::WorldId(w)));
                    prop_assert_eq!(fast[w], v);
                }
            }
        }
    }

    #[test]
    fn checkers_agree_with_oracle(seed in any::<u64>(), n in 1usize..=3) {
        let p = instance(seed, n);
        let a = Analysis::new(p.clone());
        for (c, o) in all_conditions() {
            prop_assert_eq!(check(a.frame(), c).holds, oracle_condition(&p, o).unwrap(), "{}", c);
        }
    }

    #[test]
    fn coupled_and_split_agree(seed in any::<u64>()) {
        let a = Analysis::new(instance(seed, 2));
        prop_assert_eq!(
            check(a.frame(), Condition::Corrected(Shape::Coupled)).holds,
            check(a.frame(), Condition::Corrected(Shape::Split)).holds
        );
    }

    #[test]
    fn controllability_separates(seed in any::<u64>(), n in 1usize..=3) {
        let a = Analysis::new(instance(seed, n));
        let f = a.frame();
        let over_all = LegacyOptions { relation: Relation::Partial, worlds: WorldDomain::Legal, events: EventDomain::All };
        prop_assert_eq!(
            check_controllability(f).holds && check(f, Condition::Corrected(Shape::Coupled)).holds,
            check(f, Condition::Legacy(over_all)).holds
        );
    }

    #[test]
    fn weakening_chain(seed in any::<u64>(), n in 1usize..=3) {
        let a = Analysis::new(instance(seed, n));
        let f = a.frame();
        let holds = |c| check(f, c).holds;
        let ext = holds(Condition::Extended);
        let cp = holds(Condition::Coobservability(CoobsVariant::Cp));
        let da = holds(Condition::Coobservability(CoobsVariant::Da));
        prop_assert!(!holds(Condition::Corrected(Shape::Coupled)) || ext);
        prop_assert!(!cp || ext);
        prop_assert!(!da || ext);
        prop_assert!(!holds(Condition::Coobservability(CoobsVariant::StrongCp)) || cp);
        prop_assert!(!holds(Condition::Coobservability(CoobsVariant::StrongDa)) || da);
    }

    #[test]
    fn verdict_shape(seed in any::<u64>(), n in 1usize..=3) {
        let p = instance(seed, n);
        let a = Analysis::new(p.clone());
        for (c, _) in all_conditions() {
            let v = check(a.frame(), c);
            prop_assert_eq!(v.counterexample.is_none(), v.holds);
            if v.holds && c != Condition::Controllability {
                for e in p.profile.controllable_events(&p.plant) {
                    prop_assert!(v.defaults.contains_key(&e));
                }
            }
            if let Some(cx) = v.counterexample {
                prop_assert_eq!(a.composite().witness(cx.world), &cx.string);
            }
        }
    }

    #[test]
    fn defaults_are_consistent(seed in any::<u64>(), n in 1usize..=3) {
        let a = Analysis::new(instance(seed, n));
        let v = check_inf_obs_extended(a.frame());
        if v.holds {
            prop_assert!(check_inf_obs_extended_with(a.frame(), Some(&v.defaults)).holds);
            if let Ok(r) = synthesize(&a) {
                prop_assert_eq!(r.defaults, v.defaults);
            }
        }
    }

    #[test]
    fn synthesis_is_sound(seed in any::<u64>(), n in 1usize..=3) {
        let p = instance(seed, n);
        let a = Analysis::new(p.clone());
        let ok = check_controllability(a.frame()).holds && check_inf_obs_extended(a.frame()).holds;
        match synthesize(&a) {
            Ok(r) => {
                prop_assert!(ok);
                prop_assert!(verify_solution(&p.plant, &p.profile, &r).unwrap().is_equal());
                let k = (a.composite().depth() + 1).min(10);
                prop_assert_eq!(oracle_solves(&p.plant, &p.profile, &r, k).unwrap(), None);
            }
            Err(_) => prop_assert!(!ok),
        }
    }

    #[test]
    fn policy_is_coupled_to_the_condition(seed in any::<u64>(), n in 1usize..=3) {
        let p = instance(seed, n);
        let a = Analysis::new(p.clone());
        let Ok(r) = synthesize(&a) else { return Ok(()); };
        let f = a.frame();
        let mut ev = Evaluator::new(f, Relation::Partial);
        for e in p.profile.controllable_events(&p.plant) {
            let lines = knowledge_lines(&mut ev, e);
            let sh = Shorthand::new(e);
            let must_enable = ev.truth(&sh.must_enable).unwrap();
            let must_disable = ev.truth(&sh.must_disable).unwrap();
            let possible = ev.truth(&Formula::possible(e)).unwrap();
            for w in f.legal_worlds() {
                let states: Vec<usize> = (0..n).map(|i| f.estimate(w, i)).collect();
                let (bag, fused) = decide(&p.profile, &r, &states, e).unwrap().unwrap();
                if possible[w.0] {
                    prop_assert!(!(bag.contains(ControlDecision::On) && bag.contains(ControlDecision::Off)));
                    if lines[w.0] {
                        let want = if must_enable[w.0] { FusedDecision::Enable } else { FusedDecision::Disable };
                        prop_assert!(must_enable[w.0] || must_disable[w.0]);
                        prop_assert_eq!(fused.clone(), Ok(want));
                    }
                    for &i in f.controllers(e) {
                        let k = knowledge_summary(&mut ev, w, e, i);
                        if PolicyCase::classify(k) == PolicyCase::Covered {
                            let others = f.controllers(e).iter().filter(|&&j| j != i).any(|&j| {
                                let d = r.supervisors[j].decision(f.estimate(w, j), e).unwrap();
                                matches!(d, ControlDecision::On | ControlDecision::Off)
                            });
                            prop_assert!(others);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn fusion_ignores_order(ds in proptest::collection::vec(0usize..5, 0..5), dft in any::<bool>(), rot in 0usize..5) {
        let ds: Vec<ControlDecision> = ds.into_iter().map(|k| ControlDecision::ALL[k]).collect();
        let dft = if dft { FusedDecision::Enable } else { FusedDecision::Disable };
        let mut shuffled = ds.clone();
        if !shuffled.is_empty() {
            let k = rot % shuffled.len();
            shuffled.rotate_left(k);
            shuffled.reverse();
        }
        prop_assert_eq!(fuse(&DecisionBag::new(ds), dft), fuse(&DecisionBag::new(shuffled), dft));
    }

    #[test]
    fn model_text_round_trips(seed in any::<u64>(), n in 1usize..=3) {
        let p = instance(seed, n);
        let text = serialize_model(&p);
        let q = parse_model(&text).unwrap();
        prop_assert_eq!(&q, &p);
        prop_assert_eq!(serialize_model(&q), text);
    }

    #[test]
    fn composite_generates_the_plant_language(seed in any::<u64>(), n in 1usize..=3) {
        let p = instance(seed, n);
        let a = Analysis::new(p.clone());
        prop_assert!(dfa_equivalent(&a.composite().to_dfa(), &p.plant.to_dfa(false)).unwrap().is_equal());
        for w in a.composite().world_ids() {
            let world = a.composite().world(w);
            for (i, &s) in world.estimates.iter().enumerate() {
                prop_assert!(a.composite().observer(i).estimate(s).contains(&world.plant));
            }
        }
    }
}
