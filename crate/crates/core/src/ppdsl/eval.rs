use std::sync::Arc;

use super::{ElemEnv, PpBuilder, PpFormula, Var};
use crate::algcore::{zp_kernel, FModule, FiniteAlgebra, LatticeModule, ModMap};
use crate::error::{Error, Result};
use crate::exactlin::{kernel, solve, RMatrix, Ring, Subgroup};

/// A module together with a tuple of its elements.
#[derive(Clone, Debug)]
pub struct PointedModule {
    pub module: FModule,
    pub tuple: Vec<Vec<u64>>,
}

impl PointedModule {
    pub fn new(module: FModule, tuple: Vec<Vec<u64>>) -> Result<PointedModule> {
        for t in &tuple {
            if t.len() != module.ambient() || !module.carrier().contains_vec(t) {
                return Err(Error::Containment("tuple entry outside the module".into()));
            }
        }
        Ok(PointedModule { module, tuple })
    }

    /// The tuple as one vector of M^n.
    pub fn flat(&self) -> Vec<u64> {
        self.tuple.concat()
    }
}

fn coef_vec(ring: crate::exactlin::Ring, c: &[i64]) -> Vec<u64> {
    c.iter().map(|&x| ring.from_i64(x)).collect()
}

/// The solution set φ(M) ⊆ M^n, in the ambient (Z/p^N)^{n·g}.
pub fn evaluate(phi: &PpFormula, m: &FModule) -> Result<Subgroup> {
    if phi.dim() != m.algebra().dim() {
        return Err(Error::RingMismatch(format!(
            "formula over {} spanning elements, module over {}",
            phi.dim(),
            m.algebra().dim()
        )));
    }
    let ring = m.ring();
    let g = m.ambient();
    let (n, k) = (phi.free_arity(), phi.free_arity() + phi.bound_arity());
    let b = m.carrier().basis();
    let r = b.rows();
    if r == 0 {
        return Ok(Subgroup::zero(ring, n * g));
    }
    let blocks: Vec<&RMatrix> = (0..k).map(|_| &b).collect();
    let bbig = RMatrix::block_diag(&blocks);
    let cols = phi.columns();
    if cols.is_empty() {
        let mut s = Subgroup::zero(ring, 0);
        for _ in 0..n {
            s = s.product(m.carrier());
        }
        return Ok(s);
    }
    let mut big = RMatrix::zeros(ring, k * g, cols.len() * g);
    for (j, col) in cols.iter().enumerate() {
        for (v, c) in col.iter().enumerate() {
            if c.iter().all(|&x| x == 0) {
                continue;
            }
            let a = m.action_of(&coef_vec(ring, c));
            for i in 0..g {
                for l in 0..g {
                    big.set(v * g + i, j * g + l, a.get(i, l));
                }
            }
        }
    }
    let sols = kernel(&bbig.mul(&big)?).map(&bbig)?;
    let keep: Vec<usize> = (0..n * g).collect();
    Ok(sols.project(&keep))
}

/// The image of φ(L) in (L/p^w L)^n for a lattice L, computed from the Z_p-kernel
/// at two precisions that must agree.
pub fn evaluate_lattice(phi: &PpFormula, l: &LatticeModule, work: u32) -> Result<Subgroup> {
    let order = l.order();
    if phi.dim() != order.dim() {
        return Err(Error::RingMismatch("formula and order differ in dimension".into()));
    }
    let out = Ring::new(order.p(), work)?;
    let r = l.rank();
    let n = phi.free_arity();
    if r == 0 {
        return Ok(Subgroup::zero(out, 0));
    }
    if phi.columns().is_empty() {
        return Ok(Subgroup::full(out, n * r));
    }
    let at = |prec: u32| -> Result<Subgroup> {
        let lp = l.at_precision(prec)?;
        let ring = lp.ring();
        let k = n + phi.bound_arity();
        let cols = phi.columns();
        let mut big = RMatrix::zeros(ring, k * r, cols.len() * r);
        for (j, col) in cols.iter().enumerate() {
            for (v, c) in col.iter().enumerate() {
                if c.iter().all(|&x| x == 0) {
                    continue;
                }
                let a = lp.action_of_i64(c);
                for i in 0..r {
                    for t in 0..r {
                        big.set(v * r + i, j * r + t, a.get(i, t));
                    }
                }
            }
        }
        let (rows, loss) = zp_kernel(&big)?;
        if prec - loss < work {
            return Err(Error::Precision(format!("solutions known to {} digits, {work} needed", prec - loss)));
        }
        let rows = rows.into_iter().map(|row| row[..n * r].iter().map(|&x| x % out.modulus()).collect()).collect();
        Ok(Subgroup::from_rows(out, n * r, rows))
    };
    let hi = l.prec();
    if hi <= work + 1 {
        return Err(Error::Precision(format!("lattice known to {hi} digits, {work} requested")));
    }
    let a = at(hi)?;
    let b = at((hi + work + 1) / 2)?;
    if a != b {
        return Err(Error::Precision("solution set changes between precisions".into()));
    }
    Ok(a)
}

/// Outcome of comparing two formulas on a finite family of modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyOrder {
    pub holds: bool,
    /// Index of the first family member where the inclusion fails.
    pub counterexample: Option<usize>,
    pub family_size: usize,
}

/// Whether φ(M) ⊆ ψ(M) for every M in the family.
pub fn leq(phi: &PpFormula, psi: &PpFormula, family: &[FModule]) -> Result<FamilyOrder> {
    if phi.free_arity() != psi.free_arity() {
        return Err(Error::Arity(format!("arities {} and {}", phi.free_arity(), psi.free_arity())));
    }
    for (i, m) in family.iter().enumerate() {
        if !evaluate(psi, m)?.contains(&evaluate(phi, m)?) {
            return Ok(FamilyOrder { holds: false, counterexample: Some(i), family_size: family.len() });
        }
    }
    Ok(FamilyOrder { holds: true, counterexample: None, family_size: family.len() })
}

/// ∃ū φ(ū) ∧ ψ(x̄ − ū), whose solution set is the sum.
pub fn join(phi: &PpFormula, psi: &PpFormula, env: &ElemEnv) -> Result<PpFormula> {
    let n = phi.free_arity();
    if n != psi.free_arity() {
        return Err(Error::Arity(format!("arities {n} and {}", psi.free_arity())));
    }
    let mut b = PpBuilder::new(n, env.dim());
    let x: Vec<Var> = (0..n).map(Var::Free).collect();
    let u = b.bounds(n);
    b.include(phi, &u);
    let fresh = b.bounds(psi.bound_arity());
    for col in psi.columns() {
        let mut terms = Vec::new();
        for (r, c) in col.iter().enumerate() {
            if r < n {
                terms.push((x[r], c.clone()));
                terms.push((u[r], env.neg(c)));
            } else {
                terms.push((fresh[r - n], c.clone()));
            }
        }
        b.equation(&terms);
    }
    Ok(b.finish(env))
}

/// φ ∧ ψ.
pub fn meet(phi: &PpFormula, psi: &PpFormula, env: &ElemEnv) -> Result<PpFormula> {
    let n = phi.free_arity();
    if n != psi.free_arity() {
        return Err(Error::Arity(format!("arities {n} and {}", psi.free_arity())));
    }
    let mut b = PpBuilder::new(n, env.dim());
    let x: Vec<Var> = (0..n).map(Var::Free).collect();
    b.include(phi, &x);
    b.include(psi, &x);
    Ok(b.finish(env))
}

/// The free module on n+m generators modulo the equations of φ, pointed at the
/// first n generators.
pub fn free_realization(phi: &PpFormula, alg: &Arc<FiniteAlgebra>) -> Result<PointedModule> {
    if phi.dim() != alg.dim() {
        return Err(Error::RingMismatch("formula and algebra differ in dimension".into()));
    }
    let ring = alg.ring();
    let k = phi.free_arity() + phi.bound_arity();
    let (reg, q) = FModule::regular_with_map(alg.clone())?;
    let w = reg.ambient();
    let mut free = FModule::zero(alg.clone());
    for _ in 0..k {
        free = free.direct_sum(&reg)?;
    }
    let embed = |r: usize, a: &[u64]| -> Vec<u64> {
        let mut v = vec![0u64; k * w];
        let img = q.apply(a);
        v[r * w..(r + 1) * w].copy_from_slice(&img);
        v
    };
    let rels: Vec<Vec<u64>> = phi
        .columns()
        .iter()
        .map(|col| {
            let mut v = vec![0u64; k * w];
            for (r, c) in col.iter().enumerate() {
                for (o, x) in v.iter_mut().zip(embed(r, &coef_vec(ring, c))) {
                    *o = ring.add(*o, x);
                }
            }
            v
        })
        .collect();
    let relmod = free.submodule(&rels)?;
    let (c, proj) = free.quotient_with_map(relmod.carrier())?;
    let tuple = (0..phi.free_arity()).map(|i| proj.apply(&embed(i, alg.unit()))).collect();
    PointedModule::new(c, tuple)
}

/// A module presented on a chosen generating tuple: all relations Σ g_i·c_i = 0.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub gens: Vec<Vec<u64>>,
    /// Each relation lists one algebra element per generator.
    pub relations: Vec<Vec<Vec<i64>>>,
    gmat: RMatrix,
    dim: usize,
}

impl Presentation {
    /// Coefficients expressing x in the generators, if x lies in their span.
    pub fn express(&self, x: &[u64]) -> Result<Option<Vec<Vec<i64>>>> {
        if self.gens.is_empty() {
            return Ok(if x.iter().all(|&v| v == 0) { Some(Vec::new()) } else { None });
        }
        Ok(solve(&self.gmat, x)?.map(|(sol, _)| split_coeffs(&sol, self.dim)))
    }
}

fn split_coeffs(v: &[u64], d: usize) -> Vec<Vec<i64>> {
    v.chunks(d).map(|c| c.iter().map(|&x| x as i64).collect()).collect()
}

/// Presentation of M on the given tuple; fails if the tuple does not generate M.
pub fn presentation_on(m: &FModule, gens: &[Vec<u64>]) -> Result<Presentation> {
    let ring = m.ring();
    let d = m.algebra().dim();
    let g = m.ambient();
    let mut rows = Vec::with_capacity(gens.len() * d);
    for x in gens {
        if x.len() != g || !m.carrier().contains_vec(x) {
            return Err(Error::Containment("generator outside the module".into()));
        }
        for a in m.actions() {
            rows.push(a.apply(x));
        }
    }
    let gmat = RMatrix::from_rows(ring, g, &rows)?;
    if !Subgroup::from_rows(ring, g, rows).contains(m.carrier()) {
        return Err(Error::Invalid("tuple does not generate the module".into()));
    }
    let relations = if gens.is_empty() {
        Vec::new()
    } else {
        kernel(&gmat).rows().iter().map(|r| split_coeffs(r, d)).collect()
    };
    Ok(Presentation { gens: gens.to_vec(), relations, gmat, dim: d })
}

/// A formula generating the pp-type of the tuple: its solutions in L are exactly
/// the images of the tuple under homomorphisms M → L.
pub fn pptype_generator(pm: &PointedModule, env: &ElemEnv) -> Result<PpFormula> {
    let m = &pm.module;
    let gens: Vec<Vec<u64>> = m.carrier().rows().to_vec();
    let pres = presentation_on(m, &gens)?;
    let n = pm.tuple.len();
    let mut b = PpBuilder::new(n, env.dim());
    let y = b.bounds(gens.len());
    for rel in &pres.relations {
        b.equation(&y.iter().copied().zip(rel.iter().cloned()).collect::<Vec<_>>());
    }
    for (i, t) in pm.tuple.iter().enumerate() {
        let coeffs = pres.express(t)?.ok_or_else(|| Error::Containment("tuple entry outside the module".into()))?;
        let mut terms = vec![(Var::Free(i), env.unit().to_vec())];
        terms.extend(y.iter().zip(&coeffs).map(|(v, c)| (*v, env.neg(c))));
        b.equation(&terms);
    }
    Ok(b.finish(env))
}

/// The formula whose solutions in N are the ε(c̄), ε: L → N, with ε∘α factoring through δ.
pub fn chi_alpha(delta: &ModMap, alpha: &ModMap, c: &[Vec<u64>], env: &ElemEnv) -> Result<PpFormula> {
    if delta.src.carrier() != alpha.src.carrier() {
        return Err(Error::Invalid("δ and α must share their source".into()));
    }
    let l = &alpha.tgt;
    let b_mod = &delta.tgt;
    let pres_l = presentation_on(l, c)?;
    let b_gens: Vec<Vec<u64>> = b_mod.carrier().rows().to_vec();
    let pres_b = presentation_on(b_mod, &b_gens)?;
    let n = c.len();
    let mut b = PpBuilder::new(n, env.dim());
    let x: Vec<Var> = (0..n).map(Var::Free).collect();
    let y = b.bounds(b_gens.len());
    for rel in &pres_l.relations {
        b.equation(&x.iter().copied().zip(rel.iter().cloned()).collect::<Vec<_>>());
    }
    for rel in &pres_b.relations {
        b.equation(&y.iter().copied().zip(rel.iter().cloned()).collect::<Vec<_>>());
    }
    for a in delta.src.carrier().rows() {
        let s = pres_l.express(&alpha.apply(a))?.expect("c̄ generates L");
        let r = pres_b.express(&delta.apply(a))?.expect("Howell rows generate B");
        let mut terms: Vec<(Var, Vec<i64>)> = x.iter().copied().zip(s).collect();
        terms.extend(y.iter().zip(r).map(|(v, c)| (*v, env.neg(&c))));
        b.equation(&terms);
    }
    Ok(b.finish(env))
}
