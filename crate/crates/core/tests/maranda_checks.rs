use purity_lab::algcore::{Budget, LatticeModule};
use purity_lab::fixtures::{e1_order, e1_r1, e1_r2};
use purity_lab::maranda::{
    additivity_check, indec_transfer_check, interval_lattice, interval_routes_agree, k0_family, maranda_iso_check,
    pseudoendolength, MarandaReport, TransferStatus,
};

const PREC: u32 = 16;
const WORK: u32 = 6;

type Mat = Vec<Vec<u64>>;

fn fixtures() -> Vec<(String, LatticeModule)> {
    let o = e1_order();
    let lam = o.regular(PREC).unwrap();
    let r1 = e1_r1(&o, PREC).unwrap();
    let r2 = e1_r2(&o, PREC).unwrap();
    vec![
        ("L".into(), lam.clone()),
        ("R1".into(), r1.clone()),
        ("R2".into(), r2.clone()),
        ("R1+R2".into(), r1.direct_sum(&r2).unwrap()),
        ("R1+R1".into(), r1.direct_sum(&r1).unwrap()),
        ("L+R2".into(), lam.direct_sum(&r2).unwrap()),
    ]
}

/// Action matrices of a lattice reduced mod q.
fn actions_mod(l: &LatticeModule, q: u64) -> Vec<Mat> {
    l.actions()
        .iter()
        .map(|a| (0..a.rows()).map(|i| a.row(i).iter().map(|&x| x % q).collect()).collect())
        .collect()
}

fn mat_mul(a: &Mat, b: &Mat, q: u64) -> Mat {
    let (n, k, m) = (a.len(), b.len(), b.first().map_or(0, |r| r.len()));
    (0..n).map(|i| (0..m).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum::<u64>() % q).collect()).collect()
}

/// All rl × rm matrices mod q.
fn all_mats(rl: usize, rm: usize, q: u64) -> Vec<Mat> {
    let cells = rl * rm;
    let total = q.pow(cells as u32);
    (0..total)
        .map(|mut idx| {
            let mut m = vec![vec![0; rm]; rl];
            for c in 0..cells {
                m[c / rm.max(1)][c % rm.max(1)] = idx % q;
                idx /= q;
            }
            m
        })
        .collect()
}

/// Module maps L/q → M/q: matrices X with A_i^L X = X A_i^M.
fn homs_mod(l: &LatticeModule, m: &LatticeModule, q: u64) -> Vec<Mat> {
    let (al, am) = (actions_mod(l, q), actions_mod(m, q));
    all_mats(l.rank(), m.rank(), q)
        .into_iter()
        .filter(|x| al.iter().zip(&am).all(|(a, b)| mat_mul(a, x, q) == mat_mul(x, b, q)))
        .collect()
}

/// |Ext¹(L, M)[p^t]| as |Hom(L/p^t, M/p^t)| over the image of the homs that lift mod p^(t+3).
fn ext_torsion_order(l: &LatticeModule, m: &LatticeModule, t: u32) -> usize {
    let q = 2u64.pow(t);
    let hi = homs_mod(l, m, 2u64.pow(t + 3));
    let mut img: Vec<Mat> = hi.iter().map(|x| x.iter().map(|r| r.iter().map(|v| v % q).collect()).collect()).collect();
    img.sort();
    img.dedup();
    homs_mod(l, m, q).len() / img.len()
}

/// Exponent of Ext¹(L, M): the first t where the p^t-torsion stops growing.
fn ext_exponent(l: &LatticeModule, m: &LatticeModule) -> u32 {
    let mut t = 0;
    while ext_torsion_order(l, m, t) != ext_torsion_order(l, m, t + 1) {
        t += 1;
    }
    t
}

fn invertible_mod2(x: &Mat) -> bool {
    match x.len() {
        0 => true,
        1 => x[0][0] % 2 == 1,
        2 => (x[0][0] * x[1][1] + x[0][1] * x[1][0]) % 2 == 1,
        _ => unreachable!(),
    }
}

fn reduced_iso_oracle(l: &LatticeModule, m: &LatticeModule, k: u32) -> bool {
    l.rank() == m.rank() && homs_mod(l, m, 2u64.pow(k)).iter().any(invertible_mod2)
}

/// End-submodules of (Z/q)^r for r ≤ 2, by brute force: each is End·a + End·b.
fn invariant_subgroups(r: usize, q: u64, ends: &[Mat]) -> Vec<Vec<Vec<u64>>> {
    assert!(r <= 2);
    let elems: Vec<Vec<u64>> = all_mats(1, r, q).into_iter().map(|m| m[0].clone()).collect();
    let orbit = |a: &Vec<u64>| -> Vec<Vec<u64>> {
        let mut o: Vec<Vec<u64>> = ends.iter().map(|e| mat_mul(&vec![a.clone()], e, q)[0].clone()).collect();
        o.sort();
        o.dedup();
        o
    };
    let orbits: Vec<Vec<Vec<u64>>> = elems.iter().map(orbit).collect();
    let mut out: Vec<Vec<Vec<u64>>> = Vec::new();
    for x in &orbits {
        for y in &orbits {
            let mut s: Vec<Vec<u64>> =
                x.iter().flat_map(|u| y.iter().map(move |v| u.iter().zip(v).map(|(a, b)| (a + b) % q).collect())).collect();
            s.sort();
            s.dedup();
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    out
}

fn longest_chain(subs: &[Vec<Vec<u64>>]) -> usize {
    let mut order: Vec<usize> = (0..subs.len()).collect();
    order.sort_by_key(|&i| subs[i].len());
    let sub = |a: &Vec<Vec<u64>>, b: &Vec<Vec<u64>>| a.len() < b.len() && a.iter().all(|x| b.contains(x));
    let mut best = vec![0usize; subs.len()];
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[..pos] {
            if sub(&subs[j], &subs[i]) {
                best[i] = best[i].max(best[j] + 1);
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}

fn endolength_oracle(l: &LatticeModule, k: u32) -> usize {
    let q = 2u64.pow(k);
    let ends = homs_mod(l, l, q);
    longest_chain(&invariant_subgroups(l.rank(), q, &ends))
}

#[test]
fn k0_of_e1_family() {
    let fam = fixtures();
    let lats: Vec<LatticeModule> = fam.iter().take(3).map(|(_, l)| l.clone()).collect();
    let k0 = k0_family(&lats, WORK).unwrap();
    let mut oracle = 0;
    for a in &lats {
        for b in &lats {
            oracle = oracle.max(ext_exponent(a, b));
        }
    }
    assert_eq!(k0, oracle);
    assert!(k0 <= 1);
    assert_eq!(k0_family(&lats[..1], WORK).unwrap(), 0);
    assert_eq!(k0_family(&[], WORK).unwrap(), 0);
}

#[test]
fn iso_check_examples() {
    let fam = fixtures();
    let b = Budget::default();
    let (lam, r1, r2, r12) = (&fam[0].1, &fam[1].1, &fam[2].1, &fam[3].1);
    let c = maranda_iso_check(r1, r1, 2, 1, WORK, &b).unwrap();
    assert!(c.reduced_iso && c.lattice_iso);
    let c = maranda_iso_check(r1, r2, 2, 1, WORK, &b).unwrap();
    assert!(!c.reduced_iso && !c.lattice_iso);
    assert!(!reduced_iso_oracle(r1, r2, 2));
    let c = maranda_iso_check(lam, r12, 2, 1, WORK, &b).unwrap();
    assert!(!c.reduced_iso && !c.lattice_iso);
    // reductions of isomorphic lattices are isomorphic, so the oracle settles both sides
    assert!(!reduced_iso_oracle(lam, r12, 2));
    assert!(maranda_iso_check(r1, r2, PREC + 1, 1, WORK, &b).is_err());
}

#[test]
fn reductions_detect_isomorphism_above_k0() {
    let fam = fixtures();
    let b = Budget::default();
    let lats: Vec<LatticeModule> = fam.iter().map(|(_, l)| l.clone()).collect();
    let k0 = k0_family(&lats, WORK).unwrap();
    let report = MarandaReport::build(&fam, WORK, &b).unwrap();
    assert_eq!(report.k0, k0);
    assert_eq!(report.alarms(), 0);
    assert!(report.to_text().contains("family-relative"));
    for k in [k0 + 1, k0 + 2] {
        for (i, (_, m)) in fam.iter().enumerate() {
            for (j, (_, n)) in fam.iter().enumerate() {
                let c = maranda_iso_check(m, n, k, k0, WORK, &b).unwrap();
                assert!(!c.alarm());
                assert_eq!(c.reduced_iso, i == j, "{} vs {} at {k}", fam[i].0, fam[j].0);
                if k == k0 + 1 && m.rank() <= 2 {
                    assert_eq!(c.reduced_iso, reduced_iso_oracle(m, n, k));
                }
            }
        }
    }
}

#[test]
fn indecomposability_transfers() {
    let fam = fixtures();
    let b = Budget::default();
    let lats: Vec<LatticeModule> = fam.iter().map(|(_, l)| l.clone()).collect();
    let k0 = k0_family(&lats, WORK).unwrap();
    let t = indec_transfer_check(&fam[0].1, 2, k0, WORK, &b).unwrap();
    assert_eq!(t.status, TransferStatus::Confirmed);
    // no idempotents besides 0 and 1 in End(Λ/4Λ)
    let ends = homs_mod(&fam[0].1, &fam[0].1, 4);
    let idem: Vec<&Mat> = ends.iter().filter(|x| mat_mul(x, x, 4) == **x).collect();
    assert_eq!(idem.len(), 2);
    let t = indec_transfer_check(&fam[3].1, k0 + 1, k0, WORK, &b).unwrap();
    assert_eq!(t.status, TransferStatus::Inapplicable);
    let t = indec_transfer_check(&fam[1].1, k0.max(1), k0.max(1), WORK, &b).unwrap();
    assert_eq!(t.status, TransferStatus::OutsideHypotheses);
    for (name, l) in &fam {
        for k in [k0 + 1, k0 + 2] {
            let t = indec_transfer_check(l, k, k0, WORK, &b).unwrap();
            assert_ne!(t.status, TransferStatus::Alarm, "{name}");
            assert_eq!(t.lattice_indecomposable, !name.contains('+'));
        }
    }
}

#[test]
fn pseudoendolength_values() {
    let fam = fixtures();
    let b = Budget::default();
    let p = pseudoendolength(&fam[1].1, 2, &b).unwrap();
    assert_eq!(p.value(), Some(1));
    assert_eq!(p.endolength_k, endolength_oracle(&fam[1].1, 2));
    let lats: Vec<LatticeModule> = fam.iter().map(|(_, l)| l.clone()).collect();
    let k0 = k0_family(&lats, WORK).unwrap();
    for (name, l) in fam.iter().filter(|(_, l)| l.rank() <= 2) {
        for k in [k0 + 1, k0 + 2] {
            let p = pseudoendolength(l, k, &b).unwrap();
            assert!(p.integral, "{name} at {k}: {p:?}");
            assert_eq!(p.endolength_k, endolength_oracle(l, k), "{name} at {k}");
        }
    }
    // additive over non-isomorphic summands
    for (m, n) in [(1, 2), (0, 1), (0, 2)] {
        let (s, a, c) = additivity_check(&fam[m].1, &fam[n].1, k0 + 1, &b).unwrap();
        assert_eq!(s.value().unwrap(), a.value().unwrap() + c.value().unwrap());
    }
    // endolength does not see multiplicities
    for m in 0..3 {
        let (s, a, _) = additivity_check(&fam[m].1, &fam[m].1, k0 + 1, &b).unwrap();
        assert_eq!(s.value(), a.value());
    }
}

#[test]
fn interval_lattices() {
    let fam = fixtures();
    let b = Budget::default();
    let l = interval_lattice(&fam[1].1, 1, &b).unwrap();
    assert_eq!(l.size(), 2);
    assert_eq!(l.length(), 1);
    let lam = &fam[0].1;
    let l = interval_lattice(lam, 1, &b).unwrap();
    let oracle = invariant_subgroups(2, 2, &homs_mod(lam, lam, 2));
    assert_eq!(l.size(), oracle.len());
    let lats: Vec<LatticeModule> = fam.iter().map(|(_, l)| l.clone()).collect();
    let k0 = k0_family(&lats, WORK).unwrap();
    for (name, m) in &fam {
        for k in 1..=k0 + 2 {
            let l = interval_lattice(m, k, &b).unwrap();
            assert!(l.is_modular(), "{name} at {k}");
            assert!(interval_routes_agree(m, k, &b).unwrap(), "{name} at {k}");
            if k > k0 {
                assert_eq!(Some(l.length()), pseudoendolength(m, k, &b).unwrap().value(), "{name} at {k}");
            }
        }
    }
}
