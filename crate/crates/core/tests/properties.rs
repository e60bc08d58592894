mod common;

use proptest::prelude::*;
use starsel::instance::Kappa;
use starsel::predicate::DeclaredNames;
use starsel::principles::Evaluator;
use starsel::star::{
    build_f, build_f_point, build_v, build_v_point, complement_collection, hull_membership,
    refines, star, HullKind,
};
use starsel::theorems::dualize;
use starsel::{
    evaluate, parse_predicate, Collection, GroundSet, Instance, Predicate, PrincipleId, SetFamily,
    Subset, Verdict,
};

fn g(n: usize) -> GroundSet {
    GroundSet::new(n).unwrap()
}

fn subset(n: usize) -> impl Strategy<Value = Subset> {
    (0u32..(1 << n)).prop_map(|b| Subset::from_bits(b as u16))
}

fn family(n: usize, max: usize) -> impl Strategy<Value = SetFamily> {
    prop::collection::vec(subset(n), 0..=max).prop_map(SetFamily::new)
}

/// `(n, U, sel)` with `n <= 6` and `|U| <= 8`.
fn star_case() -> impl Strategy<Value = (usize, SetFamily, Subset)> {
    (1usize..=6).prop_flat_map(|n| (Just(n), family(n, 8), subset(n)))
}

fn kappa(n: usize) -> impl Strategy<Value = Kappa> {
    prop_oneof![
        Just(Kappa::Singletons),
        Just(Kappa::FiniteNonempty),
        Just(Kappa::FiniteWithEmpty),
        prop::collection::vec(subset(n), 0..=3).prop_map(Kappa::Extensional),
    ]
}

/// Small instances with an explicit or cover `B`.
fn instance(max_n: usize, max_h: usize) -> impl Strategy<Value = Instance> {
    (1..=max_n).prop_flat_map(move |n| {
        let b = prop_oneof![
            prop::collection::vec(family(n, 3), 0..=3).prop_map(Collection::extensional),
            Just(Collection::cover()),
        ];
        (
            prop::collection::vec(family(n, 3), 1..=2),
            b,
            1..=max_h,
            kappa(n),
            any::<bool>(),
            any::<bool>(),
        )
            .prop_map(move |(a, b, h, k, sfin, fin)| {
                let mut inst = Instance::new(g(n), a, b, h).with_kappa(k);
                inst.options.sfin_allow_empty = sfin;
                inst.options.fin_allow_empty = fin;
                inst
            })
    })
}

fn principle() -> impl Strategy<Value = PrincipleId> {
    prop::sample::select(PrincipleId::ALL.to_vec())
}

fn predicate() -> impl Strategy<Value = Predicate> {
    let leaf = prop_oneof![
        Just(Predicate::Cover),
        Just(Predicate::True),
        Just(Predicate::False),
        Just(Predicate::NonEmptyMembers),
        (0usize..6).prop_map(Predicate::MaxSize),
        (0usize..6).prop_map(Predicate::MinSize),
        (0usize..6).prop_map(Predicate::CardLe),
        Just(Predicate::SubsetOf("U".into())),
        Just(Predicate::Refines("U".into())),
        Just(Predicate::RefinedBy("U".into())),
        subset(3).prop_map(Predicate::Contains),
        Just(Predicate::MemberOf("C".into())),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Predicate::not),
            inner.clone().prop_map(Predicate::complement_view),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Predicate::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Predicate::or(a, b)),
        ]
    })
}

fn names() -> DeclaredNames {
    let mut names = DeclaredNames::with_families(["U"]);
    names.collections.insert("C".into());
    names
}

/// Instance over `n` points with the names used by [`predicate`].
fn predicate_context(n: usize, u: SetFamily, c: Vec<SetFamily>, b: Collection) -> Instance {
    let mut inst = Instance::new(g(n), vec![SetFamily::new([Subset::EMPTY])], b, 1).with_family("U", u);
    inst.collections.insert("C".into(), starsel::collection::normalize_families(c));
    inst
}

fn to_extensional(inst: &Instance) -> Collection {
    let families = starsel::set::all_families(inst.ground)
        .unwrap()
        .filter(|f| inst.collection_b.contains(f, inst).unwrap());
    Collection::extensional(families)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn star_equality((n, u, sel) in star_case()) {
        prop_assert_eq!(build_v(&u, sel).union_all(), star(sel, &u));
        prop_assert_eq!(common::set_of(star(sel, &u)), common::star(&common::set_of(sel), &common::fam_of(&u)));
        for x in 0..n {
            prop_assert_eq!(build_v_point(&u, x).union_all(), star(Subset::singleton(x), &u));
        }
    }

    #[test]
    fn build_families_match_definitions((n, u, sel) in star_case()) {
        prop_assume!(u.len() <= 6);
        let (fu, fs) = (common::fam_of(&u), common::set_of(sel));
        prop_assert_eq!(common::fam_of(&build_v(&u, sel)), common::build_v(&fu, &fs));
        prop_assert_eq!(common::fam_of(&build_f(&u, sel, g(n))), common::build_f(&fu, &fs, n));
        for x in 0..n {
            prop_assert_eq!(common::fam_of(&build_v_point(&u, x)), common::build_v_point(&fu, x));
            prop_assert_eq!(common::fam_of(&build_f_point(&u, x)), common::build_f_point(&fu, x, n));
        }
    }

    #[test]
    fn de_morgan_bridges((n, d, sel) in star_case()) {
        let x = g(n);
        let via_v = build_v(&d.complement(x), x.complement(sel)).complement(x);
        prop_assert_eq!(build_f(&d, sel, x), via_v);
        for p in 0..n {
            prop_assert_eq!(build_f_point(&d, p), build_v_point(&d.complement(x), p).complement(x));
        }
    }

    #[test]
    fn star_is_monotone((n, u, a) in star_case(), extra in subset(6), more in family(6, 3)) {
        let x = g(n);
        let bigger = a.union(Subset::from_bits(extra.bits() & x.full().bits()));
        prop_assert!(star(a, &u).is_subset_of(star(bigger, &u)));
        let w = u.merge(&SetFamily::new(more.iter().map(|s| Subset::from_bits(s.bits() & x.full().bits()))));
        prop_assert!(star(a, &u).is_subset_of(star(a, &w)));
        prop_assert_eq!(star(Subset::EMPTY, &u), Subset::EMPTY);
    }

    #[test]
    fn refinement_laws(a in family(3, 4), b in family(3, 4), c in family(3, 4)) {
        prop_assert!(refines(&a, &a));
        if refines(&a, &b) && refines(&b, &c) {
            prop_assert!(refines(&a, &c));
        }
        let coll = Collection::extensional([b.clone(), c]);
        let ctx = Instance::new(g(3), vec![a], coll.clone(), 1);
        for kind in [HullKind::Minus, HullKind::Plus] {
            prop_assert!(hull_membership(kind, &coll, &b, &ctx).unwrap());
            let pred = Collection::Intensional(Predicate::MaxSize(1));
            if pred.contains(&b, &ctx).unwrap() {
                prop_assert!(hull_membership(kind, &pred, &b, &ctx).unwrap());
            }
        }
    }

    #[test]
    fn complement_involutions(n in 1usize..=3, f in family(3, 5), bs in prop::collection::vec(family(3, 3), 0..3), p in predicate()) {
        let x = g(n);
        let f = SetFamily::new(f.iter().map(|s| Subset::from_bits(s.bits() & x.full().bits())));
        prop_assert_eq!(f.complement(x).complement(x), f.clone());
        let bs: Vec<SetFamily> = bs.into_iter().map(|b| SetFamily::new(b.iter().map(|s| Subset::from_bits(s.bits() & x.full().bits())))).collect();
        let ctx = predicate_context(n, f.clone(), bs.clone(), Collection::cover());
        prop_assume!(ctx.ground.contains_subset(p.literal_elements()));
        for coll in [Collection::extensional(bs), Collection::Intensional(p)] {
            let twice = complement_collection(&complement_collection(&coll, x), x);
            for h in starsel::set::all_families(x).unwrap() {
                prop_assert_eq!(twice.contains(&h, &ctx).unwrap(), coll.contains(&h, &ctx).unwrap());
                let once = complement_collection(&coll, x);
                prop_assert_eq!(once.contains(&h, &ctx).unwrap(), coll.contains(&h.complement(x), &ctx).unwrap());
            }
        }
    }

    #[test]
    fn normalization_is_idempotent(v in prop::collection::vec(subset(5), 0..10)) {
        let once = SetFamily::new(v.clone());
        let twice = SetFamily::new(once.members().to_vec());
        prop_assert_eq!(&once, &twice);
        let mut rev = v;
        rev.reverse();
        prop_assert_eq!(SetFamily::new(rev), once);
    }

    #[test]
    fn parser_round_trip(p in predicate()) {
        let text = p.to_string();
        let parsed = parse_predicate(&text, &names()).unwrap();
        prop_assert_eq!(&parsed, &p);
        let again = parse_predicate(&parsed.to_string(), &names()).unwrap();
        prop_assert_eq!(again, parsed);
    }

    #[test]
    fn intensional_collections_are_extensionally_consistent(
        n in 1usize..=3,
        p in predicate(),
        u in family(3, 3),
        c in prop::collection::vec(family(3, 2), 0..3),
        a in prop::collection::vec(family(3, 3), 1..=2),
        h in 1usize..=2,
        q in principle(),
    ) {
        let x = g(n);
        let clip = |f: &SetFamily| SetFamily::new(f.iter().map(|s| Subset::from_bits(s.bits() & x.full().bits())));
        prop_assume!(x.contains_subset(p.literal_elements()));
        let mut inst = predicate_context(n, clip(&u), c.iter().map(clip).collect(), Collection::Intensional(p));
        inst.collection_a = starsel::collection::normalize_families(a.iter().map(clip));
        inst.horizon = h;
        let ext = inst.with_b(to_extensional(&inst));
        let left = evaluate(q, &inst).unwrap();
        let right = evaluate(q, &ext).unwrap();
        prop_assert_eq!(left.verdict, right.verdict);
        prop_assert_eq!(left.counterexample, right.counterexample);
    }

    #[test]
    fn verdicts_match_brute_force(inst in instance(3, 2), p in principle()) {
        let r = evaluate(p, &inst).unwrap();
        prop_assert_eq!(r.verdict.holds(), common::holds(p, &inst));
        prop_assert_eq!(r.counterexample.clone(), common::first_failure(p, &inst));
        match r.verdict {
            Verdict::Holds => {
                let w = r.witness.clone().unwrap();
                prop_assert!(w.replay(p, &inst).unwrap());
                prop_assert!(common::in_b(&common::fam_of(&w.produced), &inst));
            }
            Verdict::Fails => {
                let seq = r.counterexample.clone().unwrap();
                prop_assert!(Evaluator::new(p, &inst).unwrap().search(&seq).unwrap().is_none());
                prop_assert!(!common::sequence_succeeds(p, &inst, &seq));
            }
        }
    }

    #[test]
    fn every_sequence_witness_replays(inst in instance(3, 2), p in principle()) {
        let ev = Evaluator::new(p, &inst).unwrap();
        for k in 0..ev.sequence_count().unwrap() {
            let seq = ev.sequence(k);
            match ev.witness_for(&seq).unwrap() {
                Some(w) => prop_assert!(w.replay(p, &inst).unwrap()),
                None => prop_assert!(!common::sequence_succeeds(p, &inst, &seq)),
            }
        }
    }

    #[test]
    fn cover_horizon_monotonicity(inst in instance(3, 2), p in principle()) {
        let inst = inst.with_b(Collection::cover());
        if evaluate(p, &inst).unwrap().verdict.holds() {
            let longer = inst.with_horizon(inst.horizon + 1);
            prop_assert!(evaluate(p, &longer).unwrap().verdict.holds());
        }
    }

    #[test]
    fn cover_diagram_implications(inst in instance(3, 2)) {
        use PrincipleId::*;
        let inst = inst.with_b(Collection::cover());
        let h = |p| evaluate(p, &inst).unwrap().verdict.holds();
        let nonempty = inst.collection_a.iter().all(|f| !f.is_empty());
        let mut arrows = vec![(S1, SS1star), (Sfin, SSfinstar), (S1, Sfin), (SS1star, SSfinstar), (S1star, Sfinstar)];
        if nonempty {
            arrows.extend([(SS1star, S1star), (SSfinstar, Sfinstar)]);
        }
        for (a, b) in arrows {
            prop_assert!(!h(a) || h(b), "{} holds but {} fails", a, b);
        }
    }

    #[test]
    fn duality_equivalences(inst in instance(3, 2)) {
        use PrincipleId::*;
        let d = dualize(&inst);
        for (a, b) in [(CS1, DS1), (SCS1, SDS1), (CSfin, DSfin), (SCSfin, SDSfin)] {
            prop_assert_eq!(evaluate(a, &inst).unwrap().verdict, evaluate(b, &d).unwrap().verdict);
            prop_assert_eq!(evaluate(b, &inst).unwrap().verdict, evaluate(a, &d).unwrap().verdict);
        }
    }

    #[test]
    fn dualize_twice_is_the_identity(inst in instance(3, 1)) {
        let dd = dualize(&dualize(&inst));
        prop_assert_eq!(&dd.collection_a, &inst.collection_a);
        for f in starsel::set::all_families(inst.ground).unwrap() {
            prop_assert_eq!(dd.collection_b.contains(&f, &dd).unwrap(), inst.collection_b.contains(&f, &inst).unwrap());
        }
    }

    #[test]
    fn reports_are_deterministic(inst in instance(3, 2), p in principle()) {
        let a = starsel::report::eval_report(&evaluate(p, &inst).unwrap()).unwrap();
        let b = starsel::report::eval_report(&evaluate(p, &inst).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }
}
