use proptest::prelude::*;
use purity_lab::latdim::{
    bounds_eval, collapse_step, enumerate_lattices, ldim, ordinal_sum, ordinal_sup, Cnf, FiniteLattice, IntervalClass,
    Ordinal,
};

/// All partitions of 0..n as restricted growth strings.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn rec(i: usize, maxc: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for c in 0..=maxc + 1 {
            cur[i] = c;
            rec(i + 1, maxc.max(c), cur, out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    cur[0] = 0;
    rec(1, 0, &mut cur, &mut out);
    out
}

/// Congruence check written out from the definition (a ≡ b, c ≡ d ⇒ a∨c ≡ b∨d, a∧c ≡ b∧d).
fn respects(l: &FiniteLattice, p: &[usize]) -> bool {
    let n = l.size();
    for a in 0..n {
        for b in 0..n {
            if p[a] != p[b] {
                continue;
            }
            for c in 0..n {
                for d in 0..n {
                    if p[c] == p[d] && (p[l.join(a, c)] != p[l.join(b, d)] || p[l.meet(a, c)] != p[l.meet(b, d)]) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn all_small_lattices(max: usize) -> Vec<FiniteLattice> {
    (1..=max).flat_map(enumerate_lattices).collect()
}

#[test]
fn lattice_counts_match_known_sequence() {
    let counts: Vec<usize> = (1..=8).map(|n| enumerate_lattices(n).len()).collect();
    assert_eq!(counts, vec![1, 1, 1, 2, 5, 15, 53, 222]);
    let modular: usize = enumerate_lattices(5).iter().filter(|l| l.is_modular()).count();
    // all but the pentagon
    assert_eq!(modular, 4);
}

#[test]
fn ldim_examples() {
    let one = FiniteLattice::chain(1);
    for c in [IntervalClass::TwoElement, IntervalClass::Chain] {
        assert_eq!(ldim(&one, &c), Ordinal::MinusOne);
        for l in all_small_lattices(8).iter().filter(|l| !l.is_trivial()) {
            assert_eq!(ldim(l, &c), Ordinal::nat(0));
        }
    }
    let never = IntervalClass::Custom("trivial".into(), std::sync::Arc::new(|l: &FiniteLattice| l.size() == 1));
    assert_eq!(ldim(&FiniteLattice::chain(3), &never), Ordinal::Undefined);
}

#[test]
fn congruence_examples() {
    let m3 = FiniteLattice::diamond();
    let (q, _) = m3.congruence_quotient(&[]);
    assert!(q.is_isomorphic(&m3));
    let (q, _) = m3.congruence_quotient(&[(m3.bottom(), m3.top())]);
    assert!(q.is_trivial());
    let (q, _) = m3.congruence_quotient(&[(0, 1)]);
    assert!(q.is_trivial());
    // N5: collapsing the long side's lower cover identifies 0 ~ 1 and 3 ~ 4 (a 2-element quotient)
    let n5 = FiniteLattice::pentagon();
    let (q, proj) = n5.congruence_quotient(&[(0, 1)]);
    assert_eq!(q.size(), 2);
    assert_eq!(proj[0], proj[1]);
    assert_eq!(proj[3], proj[4]);
    assert!(!n5.is_modular() && m3.is_modular() && !m3.is_distributive());
}

#[test]
fn congruence_universal_property() {
    for l in all_small_lattices(7) {
        let n = l.size();
        let cons: Vec<Vec<usize>> = partitions(n).into_iter().filter(|p| respects(&l, p)).collect();
        for a in 0..n {
            for b in 0..n {
                if a >= b || !(l.leq(a, b) || l.leq(b, a)) {
                    continue;
                }
                let theta = l.congruence(&[(a, b)]);
                assert!(respects(&l, &theta));
                assert_eq!(theta[a], theta[b]);
                for p in cons.iter().filter(|p| p[a] == p[b]) {
                    for x in 0..n {
                        for y in 0..n {
                            if theta[x] == theta[y] {
                                assert_eq!(p[x], p[y]);
                            }
                        }
                    }
                }
                let q = l.quotient_by(&theta);
                assert_eq!(q.size(), theta.iter().max().unwrap() + 1);
            }
        }
    }
}

#[test]
fn ldim_monotone_on_intervals_and_quotients() {
    let classes = [
        IntervalClass::TwoElement,
        IntervalClass::Chain,
        IntervalClass::Custom("distributive".into(), std::sync::Arc::new(|l: &FiniteLattice| l.is_distributive())),
    ];
    for l in all_small_lattices(8) {
        for c in &classes {
            let d = ldim(&l, c);
            let n = l.size();
            for a in 0..n {
                for b in 0..n {
                    if l.leq(a, b) {
                        let (iv, _) = l.interval(a, b).unwrap();
                        assert_ne!(ldim(&iv, c).compare(&d), Some(std::cmp::Ordering::Greater));
                        let (q, _) = l.congruence_quotient(&[(a, b)]);
                        assert_ne!(ldim(&q, c).compare(&d), Some(std::cmp::Ordering::Greater));
                    }
                }
            }
        }
    }
}

#[test]
fn chain_class_closed_on_generated_intervals() {
    let c = IntervalClass::Chain;
    for l in all_small_lattices(7) {
        let (q, _) = collapse_step(&l, &IntervalClass::TwoElement);
        assert!(q.is_trivial());
        let n = l.size();
        for a in 0..n {
            for b in 0..n {
                if !l.leq(a, b) {
                    continue;
                }
                let (iv, _) = l.interval(a, b).unwrap();
                if !c.contains(&iv) {
                    continue;
                }
                for x in 0..iv.size() {
                    for y in 0..iv.size() {
                        if iv.leq(x, y) {
                            assert!(c.contains(&iv.interval(x, y).unwrap().0));
                            assert!(c.contains(&iv.congruence_quotient(&[(x, y)]).0));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn ordinal_examples() {
    let w = Ordinal::omega();
    let one = Ordinal::nat(1);
    assert_eq!(ordinal_sum(&w, &one).to_string(), "ω + 1");
    assert_eq!(ordinal_sum(&one, &w), w);
    assert_ne!(ordinal_sum(&w, &one), ordinal_sum(&one, &w));
    assert_eq!(bounds_eval(&Ordinal::nat(2), &Ordinal::nat(0)), (Ordinal::nat(2), Ordinal::nat(3)));
    assert_eq!(bounds_eval(&Ordinal::Undefined, &Ordinal::nat(0)), (Ordinal::Undefined, Ordinal::Undefined));
    assert_eq!(bounds_eval(&Ordinal::MinusOne, &Ordinal::nat(0)), (Ordinal::nat(0), Ordinal::nat(0)));
    assert_eq!(ordinal_sup(&[]), Ordinal::MinusOne);
    assert_eq!(Ordinal::parse("ω^2·3 + ω + 4").unwrap().to_string(), "ω^2·3 + ω + 4");
    assert_eq!(Ordinal::parse("w^(w+1)").unwrap().to_string(), "ω^(ω + 1)");
    assert!(Cnf::from_terms(vec![(Cnf::nat(1), 1), (Cnf::nat(2), 1)]).is_err());
}

fn exponent() -> impl Strategy<Value = Cnf> {
    (0u64..3, 0u64..3, 0u64..3).prop_map(|(a, b, c)| Cnf::term(Cnf::nat(2), a).add(&Cnf::term(Cnf::nat(1), b)).add(&Cnf::nat(c)))
}

fn ordinal() -> impl Strategy<Value = Cnf> {
    proptest::collection::vec((exponent(), 1u64..4), 0..4).prop_map(|terms| {
        terms.into_iter().fold(Cnf::zero(), |acc, (e, c)| acc.add(&Cnf::term(e, c)))
    })
}

proptest! {
    #[test]
    fn ordinal_laws(a in ordinal(), b in ordinal(), c in ordinal()) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert!(a.add(&b) >= b);
        prop_assert!(a.add(&b) >= a);
        let (x, y) = (Ordinal::Value(a.clone()), Ordinal::Value(b.clone()));
        let s = ordinal_sup(&[x.clone(), y.clone()]);
        prop_assert_eq!(&s, &ordinal_sup(&[y.clone(), x.clone()]));
        prop_assert_eq!(&s, &ordinal_sup(&[s.clone(), x.clone()]));
        prop_assert!(s.compare(&x) != Some(std::cmp::Ordering::Less));
        prop_assert!(s == x || s == y);
        prop_assert_eq!(Ordinal::parse(&x.to_string()).unwrap(), x);
        // terms stay in normal form
        prop_assert!(Cnf::from_terms(a.add(&b).terms().to_vec()).is_ok());
        prop_assert!(Cnf::from_terms(a.mul(&b).terms().to_vec()).is_ok());
    }
}
