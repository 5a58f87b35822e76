use std::sync::Arc;

use super::datum::DAlgebra;
use crate::algcore::{hom_space, is_indecomposable, iso_test, Budget, FModule, FiniteAlgebra, ModMap};
use crate::error::{Error, Result};
use crate::exactlin::{RMatrix, Subgroup};
use crate::ppdsl::{evaluate, ElemEnv, PpBuilder, Var};

/// (U, V, f) with U over Λ/I, V over Γ/I and f: U → V additive and Λ/I-linear.
#[derive(Clone, Debug)]
pub struct TripleModule {
    pub u: FModule,
    pub v: FModule,
    /// Ambient matrix of f, rows indexed by U's ambient.
    pub f: RMatrix,
}

/// A morphism of triples: α on U and β on V with f'α = βf.
#[derive(Clone, Debug)]
pub struct TripleMap {
    pub alpha: RMatrix,
    pub beta: RMatrix,
}

fn to_i64(v: &[u64]) -> Vec<i64> {
    v.iter().map(|&x| x as i64).collect()
}

impl TripleModule {
    pub fn new(d: &DAlgebra, u: FModule, v: FModule, f: RMatrix) -> Result<TripleModule> {
        if u.algebra().as_ref() != d.lam.as_ref() || v.algebra().as_ref() != d.gam.as_ref() {
            return Err(Error::RingMismatch("U must be over Λ/I and V over Γ/I".into()));
        }
        if f.rows() != u.ambient() || f.cols() != v.ambient() {
            return Err(Error::Dimension("f has the wrong shape".into()));
        }
        for (k, x) in u.carrier().rows().iter().enumerate() {
            let y = f.apply(x);
            if !v.carrier().contains_vec(&y) {
                return Err(Error::Invalid(format!("f sends generator {} of U outside V", k + 1)));
            }
            for (i, a) in u.actions().iter().enumerate() {
                if f.apply(&a.apply(x)) != v.act(&y, &d.iota[i]) {
                    return Err(Error::Invalid(format!("f is not linear for spanning element {} of Λ/I", i + 1)));
                }
            }
        }
        Ok(TripleModule { u, v, f })
    }

    pub fn zero(d: &DAlgebra) -> TripleModule {
        let ring = d.ring();
        TripleModule { u: FModule::zero(d.lam.clone()), v: FModule::zero(d.gam.clone()), f: RMatrix::zeros(ring, 0, 0) }
    }

    /// The D-module U ⊕ V with (u, v)·[[a, b], [0, c]] = (ua, f(u)b + vc).
    pub fn to_module(&self, d: &DAlgebra) -> Result<FModule> {
        let ring = d.ring();
        let (gu, gv) = (self.u.ambient(), self.v.ambient());
        let (d1, d2) = d.dims();
        let zu = RMatrix::zeros(ring, gu, gu);
        let zv = RMatrix::zeros(ring, gv, gv);
        let mut actions = Vec::with_capacity(d1 + 2 * d2);
        for a in self.u.actions() {
            actions.push(RMatrix::block_diag(&[a, &zv]));
        }
        for b in self.v.actions() {
            let corner = self.f.mul(b)?;
            let top = zu.hstack(&corner)?;
            let bottom = RMatrix::zeros(ring, gv, gu + gv);
            actions.push(top.vstack(&bottom)?);
        }
        for c in self.v.actions() {
            actions.push(RMatrix::block_diag(&[&zu, c]));
        }
        FModule::new(d.algebra.clone(), self.u.carrier().product(self.v.carrier()), actions)
    }

    /// U = X·e11, V = X·e22 and f = (x ↦ x·e12), all inside X's ambient.
    pub fn from_module(d: &DAlgebra, x: &FModule) -> Result<TripleModule> {
        if x.algebra().as_ref() != d.algebra.as_ref() {
            return Err(Error::RingMismatch("module is not over D".into()));
        }
        let (d1, d2) = d.dims();
        let e1 = x.action_of(&d.e11());
        let e2 = x.action_of(&d.e22());
        let u_car = x.carrier().map(&e1)?;
        let v_car = x.carrier().map(&e2)?;
        let u = FModule::new(d.lam.clone(), u_car, x.actions()[..d1].to_vec())?;
        let v = FModule::new(d.gam.clone(), v_car, x.actions()[d1 + d2..].to_vec())?;
        TripleModule::new(d, u, v, x.action_of(&d.e12()))
    }

    /// The isomorphism X → to_module(from_module(X)), x ↦ (x·e11, x·e22).
    pub fn round_trip_map(d: &DAlgebra, x: &FModule) -> Result<ModMap> {
        let t = TripleModule::from_module(d, x)?;
        let y = t.to_module(d)?;
        let m = x.action_of(&d.e11()).hstack(&x.action_of(&d.e22()))?;
        ModMap::new(x.clone(), y, m)
    }

    pub fn direct_sum(&self, other: &TripleModule) -> Result<TripleModule> {
        Ok(TripleModule {
            u: self.u.direct_sum(&other.u)?,
            v: self.v.direct_sum(&other.v)?,
            f: RMatrix::block_diag(&[&self.f, &other.f]),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    /// Image of f as a subgroup of V's ambient.
    pub fn image(&self) -> Subgroup {
        self.u.carrier().map(&self.f).expect("shape")
    }
}

impl TripleMap {
    /// Checks that (α, β) is a morphism s → t.
    pub fn new(d: &DAlgebra, s: &TripleModule, t: &TripleModule, alpha: RMatrix, beta: RMatrix) -> Result<TripleMap> {
        ModMap::new(s.u.clone(), t.u.clone(), alpha.clone())?;
        ModMap::new(s.v.clone(), t.v.clone(), beta.clone())?;
        for x in s.u.carrier().rows() {
            if t.f.apply(&alpha.apply(x)) != beta.apply(&s.f.apply(x)) {
                return Err(Error::Invalid("square f'α = βf does not commute".into()));
            }
        }
        let _ = d;
        Ok(TripleMap { alpha, beta })
    }

    /// The corresponding homomorphism of D-modules.
    pub fn to_mod_map(&self, d: &DAlgebra, s: &TripleModule, t: &TripleModule) -> Result<ModMap> {
        ModMap::new(s.to_module(d)?, t.to_module(d)?, RMatrix::block_diag(&[&self.alpha, &self.beta]))
    }
}

/// Membership in 𝒟: f injective and im f generates V over Γ/I.
pub fn in_d_class(t: &TripleModule) -> bool {
    let img = t.image();
    if img.order_log() != t.u.order_log() {
        return false;
    }
    let gens = img.rows().to_vec();
    match t.v.submodule(&gens) {
        Ok(s) => s.carrier() == t.v.carrier(),
        Err(_) => false,
    }
}

/// The same test through two pp-formulas over D: x·e12 = 0 ∧ x·e22 = 0 must define 0,
/// and ∃ȳ x = Σ y_i·[[0, g_i], [0, 0]] must contain ∃y x = y·e22.
pub fn in_d_class_pp(d: &DAlgebra, t: &TripleModule) -> Result<bool> {
    let x = t.to_module(d)?;
    let env = ElemEnv::from_algebra(&d.algebra);
    let dd = d.algebra.dim();
    let minus: Vec<i64> = env.neg(env.unit());
    let mut mono = PpBuilder::new(1, dd);
    mono.equation(&[(Var::Free(0), to_i64(&d.e12()))]);
    mono.equation(&[(Var::Free(0), to_i64(&d.e22()))]);
    let mono = mono.finish(&env);
    let (d1, d2) = d.dims();
    let mut gen = PpBuilder::new(1, dd);
    let ys = gen.bounds(d2);
    let mut terms = vec![(Var::Free(0), minus.clone())];
    for (k, y) in ys.iter().enumerate() {
        let g = d.element(&vec![0; d1], &d.gam.basis_elem(k), &vec![0; d2]);
        terms.push((*y, to_i64(&g)));
    }
    gen.equation(&terms);
    let gen = gen.finish(&env);
    let mut vpart = PpBuilder::new(1, dd);
    let y = vpart.bound();
    vpart.equation(&[(Var::Free(0), minus), (y, to_i64(&d.e22()))]);
    let vpart = vpart.finish(&env);
    let ker = evaluate(&mono, &x)?;
    Ok(ker.is_zero() && evaluate(&gen, &x)?.contains(&evaluate(&vpart, &x)?))
}

/// Representatives of the simple modules of a semisimple algebra, from a decomposition
/// of 1 into primitive orthogonal idempotents.
pub fn simple_modules(alg: &Arc<FiniteAlgebra>, budget: &Budget) -> Result<Vec<FModule>> {
    let idems = super::realize::primitive_idempotents(alg, budget)?;
    let (reg, map) = FModule::regular_with_map(alg.clone())?;
    let mut out: Vec<FModule> = Vec::new();
    for e in idems {
        let s = reg.submodule(&[map.apply(&e)])?;
        let mut fresh = true;
        for t in &out {
            if iso_test(&s, t, budget)?.is_iso() {
                fresh = false;
                break;
            }
        }
        if fresh {
            out.push(s);
        }
    }
    Ok(out)
}

fn sums(simples: &[FModule], max_mult: usize, zero: FModule) -> Result<Vec<FModule>> {
    let mut out = vec![zero];
    for s in simples {
        let mut next = Vec::new();
        for m in &out {
            let mut cur = m.clone();
            next.push(cur.clone());
            for _ in 0..max_mult {
                cur = cur.direct_sum(s)?;
                next.push(cur.clone());
            }
        }
        out = next;
    }
    Ok(out)
}

/// Indecomposable triples in 𝒟, up to isomorphism, with U and V sums of simples of
/// multiplicity at most `max_mult`. Requires Λ/I and Γ/I semisimple.
pub fn enumerate_indecomposables(d: &DAlgebra, max_mult: usize, budget: &Budget) -> Result<Vec<TripleModule>> {
    let su = simple_modules(&d.lam, budget)?;
    let sv = simple_modules(&d.gam, budget)?;
    let us = sums(&su, max_mult, FModule::zero(d.lam.clone()))?;
    let vs = sums(&sv, max_mult, FModule::zero(d.gam.clone()))?;
    let mut found: Vec<(TripleModule, FModule)> = Vec::new();
    for u in &us {
        for v in &vs {
            if u.is_zero() || v.is_zero() || u.order_log() > v.order_log() {
                continue;
            }
            let vres = v.restrict(d.lam.clone(), &d.iota)?;
            let hs = hom_space(u, &vres)?;
            let count = hs
                .count()
                .filter(|&c| (c as u128) <= budget.limit)
                .ok_or_else(|| Error::Budget(format!("Hom(U, V) has p^{} elements", hs.order_log())))?;
            for i in 0..count {
                budget.check_cancel()?;
                let (_, f) = hs.element(i);
                let t = TripleModule { u: u.clone(), v: v.clone(), f };
                if !in_d_class(&t) {
                    continue;
                }
                let x = t.to_module(d)?;
                if !is_indecomposable(&x, budget)? {
                    continue;
                }
                let mut fresh = true;
                for (_, y) in &found {
                    if iso_test(&x, y, budget)?.is_iso() {
                        fresh = false;
                        break;
                    }
                }
                if fresh {
                    found.push((t, x));
                }
            }
        }
    }
    Ok(found.into_iter().map(|(t, _)| t).collect())
}
