use std::sync::Arc;

use super::datum::{BaeckstroemDatum, DAlgebra};
use super::functor::apply_f;
use super::triple::{in_d_class, TripleModule};
use crate::algcore::{iso_test, right_solve, Budget, FModule, FiniteAlgebra, LatticeModule, OrderDatum};
use crate::error::{Error, Result};
use crate::exactlin::{preimage, RMatrix, Ring, Subgroup};

/// A decomposition of 1 into primitive orthogonal idempotents, by enumeration.
pub fn primitive_idempotents(alg: &FiniteAlgebra, budget: &Budget) -> Result<Vec<Vec<u64>>> {
    budget.check_size(alg.ring().p(), alg.order_log(), "the algebra")?;
    let idems: Vec<Vec<u64>> = alg
        .elements()
        .into_iter()
        .filter(|x| !alg.is_zero_elem(x) && alg.is_idempotent(x))
        .collect();
    let ring = alg.ring();
    let sub = |x: &[u64], y: &[u64]| -> Vec<u64> { x.iter().zip(y).map(|(&a, &b)| ring.sub(a, b)).collect() };
    let mut done = Vec::new();
    let mut todo = if alg.order_log() == 0 { vec![] } else { vec![alg.unit().to_vec()] };
    while let Some(e) = todo.pop() {
        // a nonzero idempotent strictly below e
        let smaller = idems.iter().find(|f| {
            alg.eq(&alg.mul(&e, f), f) && alg.eq(&alg.mul(f, &e), f) && !alg.eq(f, &e)
        });
        match smaller {
            Some(f) => {
                todo.push(f.clone());
                todo.push(alg.canonical(&sub(&e, f)));
            }
            None => done.push(e),
        }
    }
    Ok(done)
}

/// Lifts of orthogonal idempotents of Γ/I to orthogonal idempotents of Γ modulo p^k.
fn lift_idempotents(b: &BaeckstroemDatum, d: &DAlgebra, bar: &[Vec<u64>], k: u32) -> Result<Vec<Vec<u64>>> {
    let g = b.gamma().algebra_mod(k)?;
    let ring = g.ring();
    let dg = g.dim();
    let sub = |x: &[u64], y: &[u64]| -> Vec<u64> { x.iter().zip(y).map(|(&a, &b)| ring.sub(a, b)).collect() };
    let add = |x: &[u64], y: &[u64]| -> Vec<u64> { x.iter().zip(y).map(|(&a, &b)| ring.add(a, b)).collect() };
    let mut acc = vec![0u64; dg];
    let mut out = Vec::with_capacity(bar.len());
    for (idx, e) in bar.iter().enumerate() {
        if idx + 1 == bar.len() {
            out.push(sub(g.unit(), &acc));
            break;
        }
        let mut x = vec![0u64; dg];
        for (&c, &kk) in e.iter().zip(&d.gam_kept) {
            x[kk] = c;
        }
        let comp = sub(g.unit(), &acc);
        x = g.mul(&g.mul(&comp, &x), &comp);
        let mut steps = 0;
        while g.mul(&x, &x) != x {
            // x ← 3x² − 2x³
            let x2 = g.mul(&x, &x);
            let x3 = g.mul(&x2, &x);
            x = sub(&x2.iter().map(|&v| ring.mul(3 % ring.modulus(), v)).collect::<Vec<_>>(), &x3.iter().map(|&v| ring.mul(2, v)).collect::<Vec<_>>());
            steps += 1;
            if steps > 4 * k as usize + 8 {
                return Err(Error::Lift("idempotent lifting does not converge".into()));
            }
        }
        acc = add(&acc, &x);
        out.push(x);
    }
    Ok(out)
}

/// eΓ as a Γ-lattice for an idempotent e of Γ given modulo p^k.
fn projective_of(gamma: &Arc<OrderDatum>, e: &[u64], ring: Ring) -> Result<LatticeModule> {
    let dg = gamma.dim();
    let g = gamma.algebra_mod(ring.exp())?;
    let rows: Vec<Vec<u64>> = (0..dg).map(|j| g.mul(e, &g.basis_elem(j))).collect();
    let s = Subgroup::from_rows(ring, dg, rows);
    if s.pivots().iter().any(|&(_, v)| v != 0) {
        return Err(Error::Lift("eΓ is not a direct summand".into()));
    }
    let bmat = s.basis();
    let bt = bmat.transpose();
    let mut actions = Vec::with_capacity(dg);
    for j in 0..dg {
        let target = bmat.mul(&gamma.right_mult(j, ring))?;
        actions.push(right_solve(&bt, &target.transpose())?.transpose());
    }
    LatticeModule::new(gamma.clone(), actions)
}

/// P/PI over Γ/I, with the reduction matrix from Z_p^rank(P).
fn top_of(b: &BaeckstroemDatum, d: &DAlgebra, p: &LatticeModule) -> Result<(FModule, RMatrix)> {
    let n = b.n();
    let alg = b.gamma().algebra_mod(n)?;
    let red = p.reduce_over(&alg)?;
    let ring = alg.ring();
    let mut rows = Vec::new();
    for i in b.ideal_in_gamma() {
        rows.extend(red.action_of(&i.iter().map(|&x| ring.from_i64(x)).collect::<Vec<_>>()).row_vecs());
    }
    let (q, map) = red.quotient_with_map(&Subgroup::from_rows(ring, p.rank(), rows))?;
    let images: Vec<Vec<u64>> = d
        .gam_kept
        .iter()
        .map(|&k| {
            let mut v = vec![0u64; alg.dim()];
            v[k] = 1 % ring.modulus();
            v
        })
        .collect();
    Ok((q.restrict(d.gam.clone(), &images)?, map))
}

/// A projective Γ-lattice P with P/PI ≅ V, built from the tops of the eΓ.
pub fn projective_cover(b: &BaeckstroemDatum, d: &DAlgebra, v: &FModule, budget: &Budget) -> Result<LatticeModule> {
    let k = b.precision();
    let ring = Ring::new(b.p(), k)?;
    let bar = primitive_idempotents(&d.gam, budget)?;
    let lifts = lift_idempotents(b, d, &bar, k)?;
    let mut p = LatticeModule::zero(b.gamma().clone(), k)?;
    for (eb, e) in bar.iter().zip(&lifts) {
        let pi = projective_of(b.gamma(), e, ring)?;
        let (s, _) = top_of(b, d, &pi)?;
        let in_v = v.carrier().map(&v.action_of(eb))?.order_log();
        let in_s = s.carrier().map(&s.action_of(eb))?.order_log();
        if in_s == 0 || in_v % in_s != 0 {
            return Err(Error::Lift("V is not a sum of tops of indecomposable projectives".into()));
        }
        for _ in 0..in_v / in_s {
            p = p.direct_sum(&pi)?;
        }
    }
    Ok(p)
}

/// A Λ-lattice M′ with F(M′) ≅ T: the preimage of f(U) under P ↠ P/PI ≅ V.
pub fn realize_triple(b: &BaeckstroemDatum, d: &DAlgebra, t: &TripleModule, budget: &Budget) -> Result<LatticeModule> {
    if !in_d_class(t) {
        return Err(Error::Invalid("triple is not in the class 𝒟".into()));
    }
    let k = b.precision();
    if t.is_zero() {
        return LatticeModule::zero(b.lambda().clone(), k);
    }
    let p = projective_cover(b, d, &t.v, budget)?;
    let (top, red) = top_of(b, d, &p)?;
    let theta = match iso_test(&top, &t.v, budget)? {
        crate::algcore::IsoOutcome::Iso(map) => map,
        crate::algcore::IsoOutcome::NotIso => return Err(Error::Lift("V is not the top of a projective Γ-lattice".into())),
        crate::algcore::IsoOutcome::Unknown => return Err(Error::Budget("isomorphism search for P/PI ≅ V".into())),
    };
    let to_v = red.mul(&theta.x)?;
    let low = preimage(&to_v, &t.image())?;
    let ring = Ring::new(b.p(), k)?;
    let r = p.rank();
    let pn = ring.pow_p(b.n());
    let mut rows: Vec<Vec<u64>> = low.rows().to_vec();
    for i in 0..r {
        let mut v = vec![0u64; r];
        v[i] = pn;
        rows.push(v);
    }
    let basis = Subgroup::from_rows(ring, r, rows).basis();
    let lam_actions: Vec<RMatrix> = b
        .embed()
        .iter()
        .map(|row| {
            let mut a = RMatrix::zeros(p.ring(), r, r);
            for (c, g) in row.iter().zip(p.actions()) {
                a = a.add(&g.scale(p.ring().from_i64(*c))).expect("shape");
            }
            a
        })
        .collect();
    let over_lambda = LatticeModule::new(b.lambda().clone(), lam_actions)?;
    let m = over_lambda.sublattice(&basis.reduce_to(p.ring()))?;
    let back = apply_f(b, d, &m)?;
    if !iso_test(&back.to_module(d)?, &t.to_module(d)?, budget)?.is_iso() {
        return Err(Error::Validation("F of the realized lattice is not isomorphic to the triple".into()));
    }
    Ok(m)
}
