use std::sync::Arc;

use super::module::FModule;
use super::order::{LatticeModule, OrderDatum};
use super::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::exactlin::{smith, RMatrix, Ring, Subgroup};

/// A finitely presented right Λ-module Λ^g / (relations), with relations written as
/// Z_p-vectors of Λ^g (coordinate a·d + i is the coefficient of λ_i on generator a),
/// known modulo p^K.
#[derive(Clone, Debug)]
pub struct FpModule {
    order: Arc<OrderDatum>,
    ring: Ring,
    gens: usize,
    rel: Vec<Vec<u64>>,
}

impl FpModule {
    pub fn new(order: Arc<OrderDatum>, ring: Ring, gens: usize, rel: Vec<Vec<u64>>) -> Result<FpModule> {
        let n = gens * order.dim();
        if rel.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("relations must have length {n}")));
        }
        if ring.p() != order.p() {
            return Err(Error::RingMismatch("relation ring has the wrong prime".into()));
        }
        Ok(FpModule { order, ring, gens, rel })
    }

    pub fn free(order: Arc<OrderDatum>, ring: Ring, gens: usize) -> FpModule {
        FpModule { order, ring, gens, rel: Vec::new() }
    }

    pub fn order(&self) -> &Arc<OrderDatum> {
        &self.order
    }
    pub fn ring(&self) -> Ring {
        self.ring
    }
    pub fn gens(&self) -> usize {
        self.gens
    }
    pub fn width(&self) -> usize {
        self.gens * self.order.dim()
    }
    pub fn relations(&self) -> &[Vec<u64>] {
        &self.rel
    }

    /// Right multiplication by the j-th basis element of Λ on Λ^g.
    pub fn right_action(&self, j: usize) -> RMatrix {
        let m = self.order.right_mult(j, self.ring);
        let blocks: Vec<&RMatrix> = std::iter::repeat(&m).take(self.gens).collect();
        if blocks.is_empty() {
            return RMatrix::zeros(self.ring, 0, 0);
        }
        RMatrix::block_diag(&blocks)
    }

    /// The Z_p-span of the Λ-submodule generated by the relations.
    pub fn relation_span(&self) -> Subgroup {
        let acts: Vec<RMatrix> = (0..self.order.dim()).map(|j| self.right_action(j)).collect();
        let mut rows = Vec::new();
        for r in &self.rel {
            for a in &acts {
                rows.push(a.apply(r));
            }
        }
        Subgroup::from_rows(self.ring, self.width(), rows)
    }

    /// Presentation of a lattice on its Z_p-basis, with the matrix Λ^r → L (Z_p-coordinates).
    pub fn from_lattice(l: &LatticeModule) -> (FpModule, RMatrix) {
        let o = l.order().clone();
        let d = o.dim();
        let r = l.rank();
        let ring = l.ring();
        let mut rel = Vec::new();
        for k in 0..r {
            for i in 0..d {
                let mut v = vec![0u64; r * d];
                v[k * d + i] = ring.add(v[k * d + i], 1);
                for lidx in 0..r {
                    let a = l.actions()[i].get(k, lidx);
                    for (j, &u) in o.unit().iter().enumerate() {
                        let c = ring.mul(a, ring.from_i64(u));
                        v[lidx * d + j] = ring.sub(v[lidx * d + j], c);
                    }
                }
                rel.push(v);
            }
        }
        let mut proj = RMatrix::zeros(ring, r * d, r);
        for a in 0..r {
            for i in 0..d {
                for c in 0..r {
                    proj.set(a * d + i, c, l.actions()[i].get(a, c));
                }
            }
        }
        (FpModule { order: o, ring, gens: r, rel }, proj)
    }

    pub fn at_precision(&self, k: u32) -> Result<FpModule> {
        if k > self.ring.exp() {
            return Err(Error::Precision(format!("requested {k} digits, only {} known", self.ring.exp())));
        }
        let ring = self.ring.with_exp(k)?;
        let rel = self.rel.iter().map(|r| r.iter().map(|&x| x % ring.modulus()).collect()).collect();
        Ok(FpModule { order: self.order.clone(), ring, gens: self.gens, rel })
    }

    pub fn direct_sum(&self, other: &FpModule) -> Result<FpModule> {
        if self.order != other.order || self.ring != other.ring {
            return Err(Error::RingMismatch("modules over different orders".into()));
        }
        let (w1, w2) = (self.width(), other.width());
        let mut rel = Vec::new();
        for r in &self.rel {
            let mut v = r.clone();
            v.extend(std::iter::repeat(0).take(w2));
            rel.push(v);
        }
        for r in &other.rel {
            let mut v = vec![0; w1];
            v.extend_from_slice(r);
            rel.push(v);
        }
        Ok(FpModule { order: self.order.clone(), ring: self.ring, gens: self.gens + other.gens, rel })
    }

    /// M/tor(M) as a lattice, with the Z_p-matrix Λ^g → M/tor(M).
    pub fn torsionfree_quotient(&self) -> Result<(LatticeModule, RMatrix)> {
        let ring = self.ring;
        let n = self.width();
        let big = ring.exp();
        let span = self.relation_span();
        if span.is_zero() {
            let acts: Vec<RMatrix> = (0..self.order.dim()).map(|j| self.right_action(j)).collect();
            return Ok((LatticeModule::new(self.order.clone(), acts)?, RMatrix::identity(ring, n)));
        }
        let s = smith(&span.basis());
        let mut t = 0;
        let mut emax = 0;
        for &v in &s.diag {
            if v < big {
                if 2 * v >= big {
                    return Err(Error::Precision(format!("torsion exponent p^{v} not separated from p^{big}")));
                }
                t += 1;
                emax = emax.max(v);
            }
        }
        let keep = ring.with_exp(big - emax)?;
        let cols: Vec<usize> = (t..n).collect();
        let proj = s.v.select_cols(&cols).reduce_to(keep);
        let mut actions = Vec::with_capacity(self.order.dim());
        for j in 0..self.order.dim() {
            let a = s.v_inv.mul(&self.right_action(j))?.mul(&s.v)?.reduce_to(keep);
            for i in 0..t {
                for c in t..n {
                    if a.get(i, c) != 0 {
                        return Err(Error::Precision("torsion part not invariant at this precision".into()));
                    }
                }
            }
            actions.push(a.submatrix(t..n, t..n));
        }
        if cols.is_empty() {
            return Ok((LatticeModule::zero(self.order.clone(), keep.exp())?, proj));
        }
        Ok((LatticeModule::new(self.order.clone(), actions)?, proj))
    }

    /// M/Mp^t over Λ/p^tΛ, with the matrix from (Λ_t)^g coordinates to the module's ambient.
    pub fn reduce(&self, alg: &Arc<FiniteAlgebra>) -> Result<(FModule, RMatrix)> {
        let r = alg.ring();
        if r.exp() > self.ring.exp() {
            return Err(Error::Precision("reduction beyond the known digits".into()));
        }
        let free = FModule::free(alg.clone(), self.gens)?;
        let rows = self.relation_span().reduce_to(r);
        free.quotient_with_map(&rows)
    }
}

/// A Λ-linear map of finitely presented modules, given by the images of the generators.
#[derive(Clone, Debug)]
pub struct FpMap {
    pub src: FpModule,
    pub tgt: FpModule,
    /// g_src × (g_tgt·d): row a is the image of generator a.
    pub images: RMatrix,
}

impl FpMap {
    pub fn new(src: FpModule, tgt: FpModule, images: RMatrix) -> Result<FpMap> {
        if images.rows() != src.gens || images.cols() != tgt.width() {
            return Err(Error::Dimension("generator images have the wrong shape".into()));
        }
        let f = FpMap { src, tgt, images };
        let ext = f.matrix();
        let span = f.tgt.relation_span();
        for r in &f.src.rel {
            if !span.contains_vec(&ext.apply(r)) {
                return Err(Error::Invalid("map does not respect the relations".into()));
            }
        }
        Ok(f)
    }

    /// The Z_p-matrix Λ^{g_src} → Λ^{g_tgt}: row (a, i) is image(a)·λ_i.
    pub fn matrix(&self) -> RMatrix {
        let d = self.src.order.dim();
        let ring = self.src.ring;
        let mut out = RMatrix::zeros(ring, self.src.width(), self.tgt.width());
        let acts: Vec<RMatrix> = (0..d).map(|j| self.tgt.right_action(j)).collect();
        for a in 0..self.src.gens {
            for (i, act) in acts.iter().enumerate() {
                let v = act.apply(self.images.row(a));
                for (c, x) in v.into_iter().enumerate() {
                    out.set(a * d + i, c, x);
                }
            }
        }
        out
    }
}

/// Pushout of f: C → A and g: C → D, with the maps A → P and D → P.
pub fn fp_pushout(f: &FpMap, g: &FpMap) -> Result<(FpModule, FpMap, FpMap)> {
    let a = &f.tgt;
    let dm = &g.tgt;
    let ring = a.ring;
    let mut p = a.direct_sum(dm)?;
    for c in 0..f.src.gens {
        let mut v = f.images.row(c).to_vec();
        v.extend(g.images.row(c).iter().map(|&x| ring.neg(x)));
        p.rel.push(v);
    }
    let d = a.order.dim();
    let unit: Vec<u64> = a.order.unit().iter().map(|&u| ring.from_i64(u)).collect();
    let gen_image = |offset: usize, k: usize, width: usize| {
        let mut v = vec![0u64; width];
        v[(offset + k) * d..(offset + k + 1) * d].copy_from_slice(&unit);
        v
    };
    let w = p.width();
    let ia: Vec<Vec<u64>> = (0..a.gens).map(|k| gen_image(0, k, w)).collect();
    let id: Vec<Vec<u64>> = (0..dm.gens).map(|k| gen_image(a.gens, k, w)).collect();
    let to_a = FpMap::new(a.clone(), p.clone(), RMatrix::from_rows(ring, w, &ia)?)?;
    let to_d = FpMap::new(dm.clone(), p.clone(), RMatrix::from_rows(ring, w, &id)?)?;
    Ok((p, to_a, to_d))
}
