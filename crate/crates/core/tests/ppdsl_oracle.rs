use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use purity_lab::algcore::{hom_space, FModule, FiniteAlgebra, ModMap};
use purity_lab::exactlin::{Ring, Subgroup};
use purity_lab::fixtures::e1_order;
use purity_lab::ppdsl::{
    chi_alpha, evaluate, free_realization, join, leq, meet, parse, pptype_generator, ElemEnv, PointedModule,
    PpFormula,
};

fn zn(p: u64, k: u32) -> Arc<FiniteAlgebra> {
    Arc::new(FiniteAlgebra::free(Ring::new(p, k).unwrap(), vec![vec![vec![1]]], vec![1]).unwrap())
}

fn dual_numbers() -> Arc<FiniteAlgebra> {
    let consts = vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![0, 0]]];
    Arc::new(FiniteAlgebra::free(Ring::new(2, 1).unwrap(), consts, vec![1, 0]).unwrap())
}

fn cyclic(a: &Arc<FiniteAlgebra>, k: u32) -> FModule {
    let m = FModule::regular(a.clone()).unwrap();
    let r = a.ring();
    m.quotient(&Subgroup::from_rows(r, m.ambient(), vec![vec![r.pow_p(k); 1]])).unwrap()
}

/// Tuples of M^k by enumeration.
fn tuples(m: &FModule, k: usize) -> Vec<Vec<Vec<u64>>> {
    let elems = m.elements();
    let mut out: Vec<Vec<Vec<u64>>> = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                elems.iter().map(move |e| {
                    let mut t = t.clone();
                    t.push(e.clone());
                    t
                })
            })
            .collect();
    }
    out
}

fn brute_evaluate(phi: &PpFormula, m: &FModule) -> BTreeSet<Vec<u64>> {
    let ring = m.ring();
    let g = m.ambient();
    let n = phi.free_arity();
    let k = n + phi.bound_arity();
    let coef = |c: &[i64]| c.iter().map(|&x| ring.from_i64(x)).collect::<Vec<_>>();
    tuples(m, k)
        .into_iter()
        .filter(|t| {
            phi.columns().iter().all(|col| {
                let mut acc = vec![0u64; g];
                for (x, c) in t.iter().zip(col) {
                    for (a, b) in acc.iter_mut().zip(m.act(x, &coef(c))) {
                        *a = ring.add(*a, b);
                    }
                }
                acc.iter().all(|&v| v == 0)
            })
        })
        .map(|t| t[..n].concat())
        .collect()
}

fn as_set(s: &Subgroup) -> BTreeSet<Vec<u64>> {
    s.elements().into_iter().collect()
}

fn homs(a: &FModule, b: &FModule) -> Vec<ModMap> {
    hom_space(a, b)
        .unwrap()
        .elements()
        .into_iter()
        .map(|(_, x)| ModMap::new(a.clone(), b.clone(), x).unwrap())
        .collect()
}

fn images(maps: &[ModMap], tuple: &[Vec<u64>]) -> BTreeSet<Vec<u64>> {
    maps.iter().map(|f| tuple.iter().flat_map(|t| f.apply(t)).collect()).collect()
}

#[test]
fn derived_examples_on_z4() {
    let a = zn(2, 2);
    let env = ElemEnv::from_algebra(&a);
    let z4 = FModule::regular(a.clone()).unwrap();
    let f = parse("E y : x1 = y * 2", &env, None).unwrap();
    assert_eq!(as_set(&evaluate(&f, &z4).unwrap()), brute_evaluate(&f, &z4));
    let div = parse("2 | x1", &env, None).unwrap();
    let ann = parse("x1 * 2 = 0", &env, None).unwrap();
    let both = parse("(2 | x1) & (x1 * 2 = 0)", &env, None).unwrap();
    let fam = vec![z4.clone()];
    assert!(leq(&div, &ann, &fam).unwrap().holds);
    assert!(leq(&ann, &div, &fam).unwrap().holds);
    assert_eq!(evaluate(&both, &z4).unwrap(), evaluate(&meet(&div, &ann, &env).unwrap(), &z4).unwrap());
    assert_eq!(as_set(&evaluate(&both, &z4).unwrap()), brute_evaluate(&both, &z4));
    // on Z/2 ⊕ Z/4 the two differ
    let fam2 = vec![cyclic(&a, 1).direct_sum(&z4).unwrap()];
    assert!(leq(&div, &ann, &fam2).unwrap().holds);
    assert!(!leq(&ann, &div, &fam2).unwrap().holds);
}

#[test]
fn pptype_of_two_in_z4() {
    let a = zn(2, 2);
    let env = ElemEnv::from_algebra(&a);
    let z4 = FModule::regular(a.clone()).unwrap();
    let pm = PointedModule::new(z4.clone(), vec![vec![2]]).unwrap();
    let gen = pptype_generator(&pm, &env).unwrap();
    let expect = parse("E y: x1 = y*2", &env, None).unwrap();
    let z2 = cyclic(&a, 1);
    for probe in [z4.clone(), z2.clone(), z4.direct_sum(&z2).unwrap()] {
        let oracle = images(&homs(&z4, &probe), &pm.tuple);
        assert_eq!(as_set(&evaluate(&gen, &probe).unwrap()), oracle);
        assert_eq!(as_set(&evaluate(&expect, &probe).unwrap()), oracle);
    }
    let free = FModule::free(a.clone(), 2).unwrap();
    let basis = PointedModule::new(free.clone(), vec![vec![1, 0], vec![0, 1]]).unwrap();
    let g = pptype_generator(&basis, &env).unwrap();
    let probe = z4.direct_sum(&z2).unwrap();
    assert_eq!(evaluate(&g, &probe).unwrap(), probe.carrier().product(probe.carrier()));
    let zero = free_realization(&parse("x1 = 0", &env, None).unwrap(), &a).unwrap();
    assert!(zero.module.is_zero());
}

fn algebras() -> Vec<(Arc<FiniteAlgebra>, Vec<FModule>)> {
    let z4 = zn(2, 2);
    let z8 = zn(2, 3);
    let d = dual_numbers();
    let dreg = FModule::regular(d.clone()).unwrap();
    let simple = dreg.quotient(&Subgroup::from_rows(d.ring(), 2, vec![vec![0, 1]])).unwrap();
    vec![
        (z4.clone(), vec![FModule::regular(z4.clone()).unwrap(), cyclic(&z4, 1)]),
        (z8.clone(), vec![FModule::regular(z8.clone()).unwrap(), cyclic(&z8, 2)]),
        (d.clone(), vec![dreg.clone(), simple.clone(), dreg.direct_sum(&simple).unwrap()]),
    ]
}

fn formula_strategy(dim: usize, modulus: i64) -> impl Strategy<Value = (usize, usize, Vec<Vec<Vec<i64>>>)> {
    (1usize..=2, 0usize..=1, 0usize..=2).prop_flat_map(move |(n, m, l)| {
        let col = prop::collection::vec(prop::collection::vec(0..modulus, dim), n + m);
        (Just(n), Just(m), prop::collection::vec(col, l))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluate_matches_enumeration(which in 0usize..3, seed in formula_strategy(2, 8)) {
        let (alg, family) = &algebras()[which];
        let env = ElemEnv::from_algebra(alg);
        let (n, m, cols) = seed;
        let cols = cols.into_iter().map(|c| c.into_iter().map(|v| v[..alg.dim()].to_vec()).collect()).collect();
        let phi = PpFormula::with_env(n, m, &env, cols);
        for md in family {
            if (md.order_log() as usize) * (n + m) > 12 { continue; }
            prop_assert_eq!(as_set(&evaluate(&phi, md).unwrap()), brute_evaluate(&phi, md));
        }
        let printed = phi.to_text(&env);
        prop_assert_eq!(parse(&printed, &env, Some(n)).unwrap(), phi.clone());
    }

    #[test]
    fn lattice_ops_and_realization(which in 0usize..3, a in formula_strategy(2, 8), b in formula_strategy(2, 8)) {
        let (alg, family) = &algebras()[which];
        let env = ElemEnv::from_algebra(alg);
        let mk = |(n, m, cols): (usize, usize, Vec<Vec<Vec<i64>>>), n0: usize| {
            let cols = cols.into_iter().map(|c: Vec<Vec<i64>>| {
                let mut c: Vec<Vec<i64>> = c.into_iter().map(|v| v[..alg.dim()].to_vec()).collect();
                c.resize(n0 + m, vec![0; alg.dim()]);
                let _ = n;
                c
            }).collect();
            PpFormula::with_env(n0, m, &env, cols)
        };
        let phi = mk(a, 1);
        let psi = mk(b, 1);
        let j = join(&phi, &psi, &env).unwrap();
        let mt = meet(&phi, &psi, &env).unwrap();
        prop_assert!(leq(&psi, &j, family).unwrap().holds);
        for md in family {
            let (p, q) = (evaluate(&phi, md).unwrap(), evaluate(&psi, md).unwrap());
            prop_assert_eq!(evaluate(&j, md).unwrap(), p.sum(&q).unwrap());
            prop_assert_eq!(evaluate(&mt, md).unwrap(), p.intersect(&q).unwrap());
        }
        // free realization: l ∈ φ(L) iff some C → L sends c to l
        let real = free_realization(&phi, alg).unwrap();
        for md in family {
            let oracle = images(&homs(&real.module, md), &real.tuple);
            prop_assert_eq!(as_set(&evaluate(&phi, md).unwrap()), oracle);
        }
        prop_assert!(evaluate(&phi, &real.module).unwrap().contains_vec(&real.flat()));
    }

    #[test]
    fn solution_sets_are_functorial(which in 0usize..3, a in formula_strategy(2, 8)) {
        let (alg, family) = &algebras()[which];
        let env = ElemEnv::from_algebra(alg);
        let (_, m, cols) = a;
        let cols = cols.into_iter().map(|c: Vec<Vec<i64>>| {
            let mut c: Vec<Vec<i64>> = c.into_iter().map(|v| v[..alg.dim()].to_vec()).collect();
            c.resize(1 + m, vec![0; alg.dim()]);
            c
        }).collect();
        let phi = PpFormula::with_env(1, m, &env, cols);
        for s in family {
            for t in family {
                let src = evaluate(&phi, s).unwrap();
                let tgt = evaluate(&phi, t).unwrap();
                for f in homs(s, t) {
                    for x in src.rows() {
                        prop_assert!(tgt.contains_vec(&f.apply(x)));
                    }
                }
            }
        }
    }
}

fn chi_oracle(delta: &ModMap, alpha: &ModMap, c: &[Vec<u64>], probe: &FModule) -> BTreeSet<Vec<u64>> {
    let eps = homs(&alpha.tgt, probe);
    let betas = homs(&delta.tgt, probe);
    let a_gens = delta.src.carrier().rows().to_vec();
    eps.iter()
        .filter(|e| {
            betas.iter().any(|b| a_gens.iter().all(|x| e.apply(&alpha.apply(x)) == b.apply(&delta.apply(x))))
        })
        .map(|e| c.iter().flat_map(|t| e.apply(t)).collect())
        .collect()
}

#[test]
fn chi_alpha_on_lambda_mod_two() {
    let o = e1_order();
    let lam = o.regular(32).unwrap();
    let l = lam.reduce_mod(1).unwrap();
    let alg = l.algebra().clone();
    let env = ElemEnv::from_algebra(&alg);
    let two = ModMap::new(l.clone(), l.clone(), purity_lab::exactlin::RMatrix::scalar(l.ring(), l.ambient(), 0)).unwrap();
    let id = ModMap::identity(&l);
    let gens = l.carrier().rows().to_vec();
    let chi = chi_alpha(&two, &id, &gens, &env).unwrap();
    let r1 = purity_lab::fixtures::e1_r1(&o, 32).unwrap().reduce_over(&alg).unwrap();
    let probes = vec![r1.clone(), l.clone(), r1.direct_sum(&l).unwrap()];
    for n in &probes {
        assert_eq!(as_set(&evaluate(&chi, n).unwrap()), chi_oracle(&two, &id, &gens, n));
    }
    // δ invertible: the β-condition is vacuous
    let chi_id = chi_alpha(&id, &id, &gens, &env).unwrap();
    let pm = PointedModule::new(l.clone(), gens.clone()).unwrap();
    let tp = pptype_generator(&pm, &env).unwrap();
    for n in &probes {
        assert_eq!(evaluate(&chi_id, n).unwrap(), evaluate(&tp, n).unwrap());
        assert_eq!(as_set(&evaluate(&chi_id, n).unwrap()), images(&homs(&l, n), &gens));
    }
    // A = 0
    let zero = FModule::zero(alg.clone());
    let d0 = ModMap::new(zero.clone(), l.clone(), purity_lab::exactlin::RMatrix::zeros(l.ring(), 0, l.ambient())).unwrap();
    let a0 = d0.clone();
    let chi0 = chi_alpha(&d0, &a0, &gens, &env).unwrap();
    for n in &probes {
        assert_eq!(evaluate(&chi0, n).unwrap(), evaluate(&tp, n).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn chi_alpha_matches_enumeration(which in 0usize..3, di in 0usize..64, ai in 0usize..64) {
        let (_, family) = &algebras()[which];
        let alg = family[0].algebra().clone();
        let env = ElemEnv::from_algebra(&alg);
        let a = &family[family.len() - 1];
        let b = &family[0];
        let l = &family[0];
        let ds = homs(a, b);
        let als = homs(a, l);
        let delta = ds[di % ds.len()].clone();
        let alpha = als[ai % als.len()].clone();
        let gens = l.carrier().rows().to_vec();
        let chi = chi_alpha(&delta, &alpha, &gens, &env).unwrap();
        for n in family {
            prop_assert_eq!(as_set(&evaluate(&chi, n).unwrap()), chi_oracle(&delta, &alpha, &gens, n));
        }
    }
}
