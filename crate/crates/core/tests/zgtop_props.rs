use proptest::prelude::*;
use purity_lab::zgtop::{
    bar_v, cb_rank, cb_rank_table, cb_ranks, closure, is_closed, open_basis_decomposition, random_subset, toy_space,
    v_set, Point, TameZgSpace, ZgSubset,
};

/// Conditions (1)–(4) checked point by point on the representation.
fn satisfies_rules(sp: &TameZgSpace, c: &ZgSubset) -> bool {
    for t in sp.tubes() {
        let infinite = t.quasi_simples.iter().any(|q| c.cofinite.contains_key(q));
        for q in &t.quasi_simples {
            if infinite && sp.hom_to(q) && !c.contains(&Point::Prufer(q.clone())) {
                return false;
            }
            if infinite && sp.hom_from(q) && !c.contains(&Point::Adic(q.clone())) {
                return false;
            }
            let limit = c.contains(&Point::Prufer(q.clone())) || c.contains(&Point::Adic(q.clone()));
            if (infinite || limit) && !c.contains(&Point::Generic(t.typ)) {
                return false;
            }
        }
    }
    let mut reduced: Vec<Point> = c.points();
    reduced.retain(|p| !matches!(p, Point::Divisible(_)));
    reduced.iter().all(|p| sp.rational_hull(p).iter().all(|s| c.contains(&Point::Divisible(s.clone()))))
}

fn non_lattice(c: &ZgSubset) -> Vec<Point> {
    c.points().into_iter().filter(|p| !matches!(p, Point::Lattice(..))).collect()
}

fn without(c: &ZgSubset, p: &Point, sp: &TameZgSpace) -> ZgSubset {
    c.difference(&ZgSubset::from_points([p.clone()]), sp)
}

#[test]
fn toy_examples() {
    let sp = TameZgSpace::parse(
        "types 1\ntube T type 1 qs E hull S\ngeneric 1 hull S\nhom_to E\nhom_from E\ndivisible S R\nexceptional P type 0 hull R\n",
    )
    .unwrap();
    let adic = sp.parse_subset("E^").unwrap();
    let cl = closure(&sp, &adic).unwrap();
    assert_eq!(cl, sp.parse_subset("E^ G(1) S").unwrap());
    let u = cl.complement(&sp);
    let dec = open_basis_decomposition(&sp, &u).unwrap();
    assert_eq!(dec.hulls.iter().map(|(s, _)| s.as_str()).collect::<Vec<_>>(), vec!["R"]);
    assert_eq!(dec.reassemble(), u);
    // the set of all lattice points is open
    let lat = sp.parse_subset("E[1..] P").unwrap();
    assert!(is_closed(&sp, &lat.complement(&sp)).unwrap());
    assert!(bar_v(&sp, &ZgSubset::empty()).unwrap().is_empty());
    assert_eq!(bar_v(&sp, &sp.parse_subset("G(1)").unwrap()).unwrap(), sp.parse_subset("G(1) S").unwrap());
    assert!(bar_v(&sp, &sp.parse_subset("E[2..]").unwrap()).is_err());
    assert!(open_basis_decomposition(&sp, &sp.parse_subset("S").unwrap()).is_err());
    assert_eq!(v_set(&sp, "R").unwrap(), sp.parse_subset("P R").unwrap());
    assert_eq!(cb_rank(&sp, &Point::Lattice("E".into(), 5)).unwrap(), Some(0));
    assert_eq!(cb_rank(&sp, &Point::Prufer("E".into())).unwrap(), Some(1));
    assert_eq!(cb_rank(&sp, &Point::Generic(1)).unwrap(), Some(2));
    assert_eq!(cb_rank(&sp, &Point::Divisible("S".into())).unwrap(), Some(3));
    assert_eq!(cb_rank(&sp, &Point::Divisible("R".into())).unwrap(), Some(1));
    assert!(cb_rank(&sp, &Point::Generic(2)).is_err());
}

#[test]
fn finite_type_points() {
    let sp = TameZgSpace::parse("types 0\nexceptional P type 0 hull S\nexceptional Q type 0 hull S\ndivisible S\n").unwrap();
    let all = sp.universe();
    assert!(all.points().iter().all(|p| matches!(p, Point::Exceptional(_) | Point::Divisible(_))));
    let ranks = cb_ranks(&sp).unwrap();
    assert!(ranks.iter().all(|(_, r)| r.is_some()));
}

#[test]
fn cb_table_matches_derivatives() {
    for seed in 0..300 {
        let sp = toy_space(seed, 3, 3);
        let ranks = cb_ranks(&sp).unwrap();
        let u = sp.universe();
        // every family of the universe gets a rank
        assert_eq!(ranks.len(), u.points().len());
        for (p, r) in ranks {
            if let Some(t) = cb_rank_table(&sp, &p) {
                assert_eq!(r, Some(t), "seed {seed}, point {p}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn closure_is_a_closure_operator(seed in 0u64..1000, a in 0u64..1000, b in 0u64..1000) {
        let sp = toy_space(seed, 3, 3);
        let c = random_subset(&sp, a, 4);
        let d = c.union(&random_subset(&sp, b, 4));
        let cc = closure(&sp, &c).unwrap();
        prop_assert!(c.is_subset(&cc));
        prop_assert!(cc.is_subset(&closure(&sp, &d).unwrap()));
        prop_assert_eq!(closure(&sp, &cc).unwrap(), cc.clone());
        prop_assert!(satisfies_rules(&sp, &cc));
        prop_assert_eq!(satisfies_rules(&sp, &c), is_closed(&sp, &c).unwrap());
        // least: no added point can be dropped
        for p in non_lattice(&cc).into_iter().filter(|p| !c.contains(p)) {
            prop_assert!(!satisfies_rules(&sp, &without(&cc, &p, &sp)));
        }
        // contained in every closed superset
        let k = closure(&sp, &d).unwrap();
        prop_assert!(cc.is_subset(&k));
    }

    #[test]
    fn closed_sets_form_a_topology(seed in 0u64..1000, a in 0u64..1000, b in 0u64..1000, e in 0u64..1000) {
        let sp = toy_space(seed, 3, 3);
        let x = closure(&sp, &random_subset(&sp, a, 4)).unwrap();
        let y = closure(&sp, &random_subset(&sp, b, 4)).unwrap();
        let z = closure(&sp, &random_subset(&sp, e, 4)).unwrap();
        prop_assert!(is_closed(&sp, &x.union(&y)).unwrap());
        prop_assert!(is_closed(&sp, &x.intersection(&y)).unwrap());
        prop_assert!(is_closed(&sp, &x.intersection(&y).intersection(&z)).unwrap());
        prop_assert!(is_closed(&sp, &ZgSubset::empty()).unwrap());
        prop_assert!(is_closed(&sp, &sp.universe()).unwrap());
        prop_assert_eq!(x.complement(&sp).complement(&sp), x.clone());
        let u = x.complement(&sp);
        let dec = open_basis_decomposition(&sp, &u).unwrap();
        prop_assert_eq!(dec.reassemble(), u);
    }

    #[test]
    fn bar_v_properties(seed in 0u64..1000, a in 0u64..1000, b in 0u64..1000) {
        let sp = toy_space(seed, 3, 3);
        let c = closure(&sp, &random_subset(&sp, a, 4)).unwrap();
        let v = c.reduced_part();
        let bv = bar_v(&sp, &v).unwrap();
        prop_assert!(is_closed(&sp, &bv).unwrap());
        prop_assert_eq!(bv.clone(), closure(&sp, &v).unwrap());
        let extra = ZgSubset { divisibles: c.divisibles.difference(&bv.divisibles).cloned().collect(), ..ZgSubset::default() };
        prop_assert_eq!(bv.union(&extra), c.clone());
        let w = closure(&sp, &v.union(&random_subset(&sp, b, 4).reduced_part())).unwrap().reduced_part();
        prop_assert!(bv.is_subset(&bar_v(&sp, &w).unwrap()));
    }
}
