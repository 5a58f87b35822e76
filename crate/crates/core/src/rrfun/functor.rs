use super::datum::{BaeckstroemDatum, DAlgebra};
use super::triple::{TripleMap, TripleModule};
use crate::algcore::{exact_div, hom_space, inverse_scaled, lattice_homs, right_solve, FModule, LatticeModule, ModMap};
use crate::error::{Error, Result};
use crate::exactlin::{RMatrix, Ring, Subgroup};
use crate::interp::{apply_object, FullnessReport, InterpSpec, PairReport, PairStatus, Probe};
use crate::ppdsl::{ElemEnv, PpBuilder, PpFormula, PpPair, Var};

/// F(M) with the data needed to compute classes of elements of M and MΓ.
///
/// Coordinates are those of p^{-m}M ≅ Z_p^r, in which M is p^m·Z_p^r and MΓ is the
/// Howell closure of p^m·Z_p^r and the rows of the matrices of p^m·γ_j.
#[derive(Clone, Debug)]
pub struct FImage {
    pub triple: TripleModule,
    /// Z_p-basis of MΓ in scaled coordinates.
    pub gamma_basis: RMatrix,
    q: RMatrix,
    m: u32,
    out: Ring,
}

impl FImage {
    /// Class in MΓ/MI (ambient of V) of a vector given in scaled coordinates.
    pub fn class(&self, x: &[u64]) -> Vec<u64> {
        let qr = self.q.ring();
        // x is read modulo some p^w with w ≥ m + n
        let y: Vec<u64> = x.iter().map(|&v| v % qr.modulus()).collect();
        let z = self.q.apply(&y);
        let shift = qr.pow_p(self.m);
        z.into_iter().map(|v| (v / shift) % self.out.modulus()).collect()
    }
}

fn working_ring(b: &BaeckstroemDatum, l: &LatticeModule) -> Result<Ring> {
    let need = 2 * (b.n() + b.m()) + 2;
    let w = l.prec().min(b.precision() - b.m());
    if w < need {
        return Err(Error::Precision(format!("lattice known to {} digits, {need} needed", l.prec())));
    }
    Ring::new(b.p(), w)
}

/// Matrices of x ↦ x·(p^m γ_j) on M, at the working ring.
fn scaled_gamma_actions(b: &BaeckstroemDatum, l: &LatticeModule, ring: Ring) -> Vec<RMatrix> {
    b.conductor_rows().iter().map(|c| l.action_of_i64(c).reduce_to(ring)).collect()
}

fn gamma_basis(b: &BaeckstroemDatum, l: &LatticeModule, ring: Ring) -> Result<(RMatrix, Vec<RMatrix>)> {
    let r = l.rank();
    let acts = scaled_gamma_actions(b, l, ring);
    let span = |ring: Ring| -> Subgroup {
        let pm = ring.pow_p(b.m());
        let mut rows: Vec<Vec<u64>> = (0..r)
            .map(|i| {
                let mut v = vec![0u64; r];
                v[i] = pm;
                v
            })
            .collect();
        for a in &acts {
            rows.extend(a.reduce_to(ring).row_vecs());
        }
        Subgroup::from_rows(ring, r, rows)
    };
    let full = span(ring);
    // closing at a lower precision must give the reduction of the closure
    let low = ring.with_exp(2 * (b.n() + b.m()) + 1)?;
    if full.reduce_to(low) != span(low) {
        return Err(Error::Precision("Γ-closure is not stable under a change of precision".into()));
    }
    if full.rows().len() != r || full.pivots().iter().any(|&(_, v)| v > b.m()) {
        return Err(Error::Precision("Γ-closure does not have full rank".into()));
    }
    Ok((full.basis(), acts))
}

/// MΓ as a Γ-lattice, with its basis in the coordinates of p^{-m}M.
pub fn gamma_closure_with_basis(b: &BaeckstroemDatum, l: &LatticeModule) -> Result<(LatticeModule, RMatrix)> {
    if l.order() != b.lambda() {
        return Err(Error::RingMismatch("lattice is not over Λ".into()));
    }
    let ring = working_ring(b, l)?;
    let (t, acts) = gamma_basis(b, l, ring)?;
    if l.rank() == 0 {
        return Ok((LatticeModule::zero(b.gamma().clone(), ring.exp())?, t));
    }
    let (inv, e) = inverse_scaled(&t)?;
    let mut actions = Vec::with_capacity(acts.len());
    for a in &acts {
        let num = t.mul(a)?.reduce_to(inv.ring()).mul(&inv)?;
        actions.push(exact_div(&num, b.m() + e)?);
    }
    Ok((LatticeModule::new(b.gamma().clone(), actions)?, t))
}

/// The Γ-module MΓ generated by M.
pub fn gamma_closure(b: &BaeckstroemDatum, l: &LatticeModule) -> Result<LatticeModule> {
    Ok(gamma_closure_with_basis(b, l)?.0)
}

fn unit_images(kept: &[usize], d: usize, ring: Ring) -> Vec<Vec<u64>> {
    kept.iter()
        .map(|&k| {
            let mut v = vec![0u64; d];
            v[k] = 1 % ring.modulus();
            v
        })
        .collect()
}

/// F(M) = (M/MI, MΓ/MI, σ_M), with U and V sharing one ambient and f = identity.
pub fn f_image(b: &BaeckstroemDatum, d: &DAlgebra, l: &LatticeModule) -> Result<FImage> {
    if l.order() != b.lambda() {
        return Err(Error::RingMismatch("lattice is not over Λ".into()));
    }
    let (n, m) = (b.n(), b.m());
    let ring = working_ring(b, l)?;
    let r = l.rank();
    let (t, acts) = gamma_basis(b, l, ring)?;
    let rq = Ring::new(b.p(), m + n)?;
    let out = Ring::new(b.p(), n)?;
    let pm = rq.pow_p(m);
    let mut mi_rows = Vec::new();
    for i in b.ideal() {
        mi_rows.extend(l.action_of_i64(i).reduce_to(rq).scale(pm).row_vecs());
    }
    let mi = Subgroup::from_rows(rq, r, mi_rows);
    let q = mi.annihilator().basis().transpose();
    let h = q.cols();
    let tq = t.reduce_to(rq).mul(&q)?;
    let mut xs = Vec::with_capacity(acts.len());
    for a in &acts {
        let img = exact_div(&t.mul(a)?, m)?.reduce_to(rq).mul(&q)?;
        xs.push(if h == 0 { RMatrix::zeros(rq, 0, 0) } else { right_solve(&tq, &img)? });
    }
    let mut ys = Vec::with_capacity(b.lambda().dim());
    for row in b.embed() {
        let mut y = RMatrix::zeros(rq, h, h);
        for (c, x) in row.iter().zip(&xs) {
            y = y.add(&x.scale(rq.from_i64(*c)))?;
        }
        ys.push(y);
    }
    let ucar = RMatrix::scalar(rq, r, pm).mul(&q)?;
    let gam_big = b.gamma().algebra_mod(m + n)?;
    let lam_big = b.lambda().algebra_mod(m + n)?;
    let vbig = FModule::new(gam_big, Subgroup::from_rows(rq, h, tq.row_vecs()), xs)?;
    let ubig = FModule::new(lam_big, Subgroup::from_rows(rq, h, ucar.row_vecs()), ys)?;
    let v = vbig
        .change_ring(b.gamma().algebra_mod(n)?)?
        .restrict(d.gam.clone(), &unit_images(&d.gam_kept, b.gamma().dim(), out))?;
    let u = ubig
        .change_ring(b.lambda().algebra_mod(n)?)?
        .restrict(d.lam.clone(), &unit_images(&d.lam_kept, b.lambda().dim(), out))?;
    let triple = TripleModule::new(d, u, v, RMatrix::identity(out, h))?;
    Ok(FImage { triple, gamma_basis: t, q, m, out })
}

pub fn apply_f(b: &BaeckstroemDatum, d: &DAlgebra, l: &LatticeModule) -> Result<TripleModule> {
    Ok(f_image(b, d, l)?.triple)
}

/// F(h) for a Λ-homomorphism h: L → N given by its r_L × r_N matrix.
pub fn apply_f_morphism(d: &DAlgebra, src: &FImage, tgt: &FImage, h: &RMatrix) -> Result<TripleMap> {
    let out = src.out;
    let t = &src.gamma_basis;
    let hq = h.reduce_to(Ring::new(out.p(), src.m + out.exp())?);
    let tq = t.reduce_to(hq.ring());
    let th = tq.mul(&hq)?;
    let s_rows: Vec<Vec<u64>> = tq.row_vecs().iter().map(|x| src.class(x)).collect();
    let t_rows: Vec<Vec<u64>> = th.row_vecs().iter().map(|x| tgt.class(x)).collect();
    let (gs, gt) = (src.triple.v.ambient(), tgt.triple.v.ambient());
    let beta = if gs == 0 || gt == 0 {
        RMatrix::zeros(out, gs, gt)
    } else {
        right_solve(&RMatrix::from_rows(out, gs, &s_rows)?, &RMatrix::from_rows(out, gt, &t_rows)?)?
    };
    TripleMap::new(d, &src.triple, &tgt.triple, beta.clone(), beta)
}

fn unit_vec(d: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0i64; d];
    v[i] = 1;
    v
}

fn scale(v: &[i64], c: i64) -> Vec<i64> {
    v.iter().map(|&x| x * c).collect()
}

/// F as an interpretation functor from Λ-modules to D-modules.
pub fn f_as_ppspec(b: &BaeckstroemDatum, d: &DAlgebra) -> Result<InterpSpec> {
    let lam = b.lambda();
    let gam = b.gamma();
    let env = ElemEnv::from_order(lam);
    let (dl, dg) = (lam.dim(), gam.dim());
    let pm = (b.p() as i64).pow(b.m());
    let cond = b.conductor_rows();
    let minus = env.neg(env.unit());
    // Θ_K(x) for K spanned by the given Λ-elements
    let theta = |bld: &mut PpBuilder, x: Var, gens: &[Vec<i64>]| {
        let ws = bld.bounds(gens.len());
        let mut terms = vec![(x, minus.clone())];
        terms.extend(ws.into_iter().zip(gens.iter().cloned()));
        bld.equation(&terms);
    };
    let lam_gens: Vec<Vec<i64>> = (0..dl).map(|i| scale(&unit_vec(dl, i), pm)).collect();
    let i_gens: Vec<Vec<i64>> = b.ideal().iter().map(|r| scale(r, pm)).collect();
    let mut phi = PpBuilder::new(2, dl);
    theta(&mut phi, Var::Free(0), &lam_gens);
    theta(&mut phi, Var::Free(1), &cond);
    let mut psi = PpBuilder::new(2, dl);
    theta(&mut psi, Var::Free(0), &i_gens);
    theta(&mut psi, Var::Free(1), &i_gens);
    let pair = PpPair::new(phi.finish(&env), psi.finish(&env))?;
    let (d1, d2) = d.dims();
    let zero_g = vec![0i64; dg];
    let mut rho = Vec::with_capacity(d1 + 2 * d2);
    let graph = |a: &[i64], bb: &[i64], c: &[i64]| -> PpFormula {
        let mut f = PpBuilder::new(4, dl);
        let w = f.bound();
        let wj = f.bounds(dg);
        f.equation(&[(Var::Free(0), minus.clone()), (w, scale(lam.unit(), pm))]);
        let mut t2 = vec![(Var::Free(1), minus.clone())];
        t2.extend(wj.iter().copied().zip(cond.iter().cloned()));
        f.equation(&t2);
        f.equation(&[(Var::Free(2), minus.clone()), (Var::Free(0), a.to_vec())]);
        let mut t4 = vec![(Var::Free(3), minus.clone()), (w, b.scaled_to_lambda(bb))];
        for (j, wv) in wj.iter().enumerate() {
            t4.push((*wv, b.scaled_to_lambda(&gam.mul(&unit_vec(dg, j), c))));
        }
        f.equation(&t4);
        f.finish(&env)
    };
    for &k in &d.lam_kept {
        rho.push(graph(&unit_vec(dl, k), &zero_g, &zero_g));
    }
    for &k in &d.gam_kept {
        rho.push(graph(&vec![0; dl], &unit_vec(dg, k), &zero_g));
    }
    for &k in &d.gam_kept {
        rho.push(graph(&vec![0; dl], &zero_g, &unit_vec(dg, k)));
    }
    InterpSpec::new(env, d.algebra.clone(), pair, rho)
}

/// The comparison isomorphism from the pp-route object I(M) to F(M) as a D-module:
/// a pair (x₁, x₂) ∈ φ(M) goes to the classes of x₁ and x₂ in scaled coordinates.
pub fn route_comparison(b: &BaeckstroemDatum, d: &DAlgebra, spec: &InterpSpec, l: &LatticeModule, work: u32) -> Result<ModMap> {
    if work < b.m() + b.n() {
        return Err(Error::Precision(format!("working precision {work} below m + n")));
    }
    let obj = apply_object(spec, &Probe::Lattice { lattice: l.clone(), work })?;
    let fi = f_image(b, d, l)?;
    let x = fi.triple.to_module(d)?;
    let r = l.rank();
    let mut srcs = Vec::new();
    let mut tgts = Vec::new();
    for row in obj.phi().rows() {
        srcs.push(obj.project(row)?);
        let mut t = fi.class(&row[..r]);
        t.extend(fi.class(&row[r..]));
        tgts.push(t);
    }
    let out = d.ring();
    let (gs, gt) = (obj.module.ambient(), x.ambient());
    let mat = if srcs.is_empty() || gs == 0 {
        RMatrix::zeros(out, gs, gt)
    } else {
        right_solve(&RMatrix::from_rows(out, gs, &srcs)?, &RMatrix::from_rows(out, gt, &tgts)?)?
    };
    let map = ModMap::new(obj.module.clone(), x, mat)?;
    if !map.is_bijective() {
        return Err(Error::Validation("comparison map between the two routes is not bijective".into()));
    }
    Ok(map)
}

/// Whether Hom_Λ(L, N) → Hom_D(FL, FN) is onto for all pairs, via apply_f_morphism.
pub fn fullness_direct(b: &BaeckstroemDatum, d: &DAlgebra, lattices: &[LatticeModule], work: u32) -> Result<FullnessReport> {
    let images: Vec<FImage> = lattices.iter().map(|l| f_image(b, d, l)).collect::<Result<_>>()?;
    let modules: Vec<FModule> = images.iter().map(|i| i.triple.to_module(d)).collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (0..lattices.len()).flat_map(|i| (0..lattices.len()).map(move |j| (i, j))).collect();
    let results = crate::par::map(&pairs, |&(i, j)| -> Result<PairReport> {
        let hs = hom_space(&modules[i], &modules[j])?;
        let homs = lattice_homs(&lattices[i], &lattices[j], work)?;
        if homs.valid < b.m() + b.n() {
            return Err(Error::Precision("homomorphisms known to too few digits".into()));
        }
        let mut keys = Vec::new();
        for h in &homs.basis {
            let tm = apply_f_morphism(d, &images[i], &images[j], h)?;
            keys.push(hs.key(&RMatrix::block_diag(&[&tm.alpha, &tm.beta])));
        }
        let image = Subgroup::from_rows(hs.sub.ring(), hs.sub.ambient(), keys);
        let status = match hs.sub.rows().iter().find(|r| !image.contains_vec(r)) {
            None => PairStatus::Surjective,
            Some(w) => PairStatus::NotSurjective { witness: w.clone() },
        };
        Ok(PairReport { source: i, target: j, status, hom_log: hs.order_log(), image_log: image.order_log() })
    });
    Ok(FullnessReport { pairs: results.into_iter().collect::<Result<_>>()? })
}
