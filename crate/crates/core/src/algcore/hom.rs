use std::sync::Arc;

use super::module::{right_solve, FModule};
use super::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::exactlin::{kernel, RMatrix, Subgroup};

/// Hom_A(M, N) as a subgroup of r_M × g_N matrices Y = B_M·X, where B_M is the
/// Howell basis of M and X an ambient extension of the homomorphism.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub sub: Subgroup,
    /// Extension matrix for each Howell row of `sub`.
    pub ext: Vec<RMatrix>,
    pub src_basis: RMatrix,
    pub g_src: usize,
    pub g_tgt: usize,
}

impl HomSpace {
    pub fn order_log(&self) -> u32 {
        self.sub.order_log()
    }

    /// Extension matrix of the element with key y.
    pub fn to_map(&self, y: &[u64]) -> Result<RMatrix> {
        let r = self.src_basis.rows();
        let ym = RMatrix::from_flat(self.sub.ring(), r, self.g_tgt, y.to_vec());
        if r == 0 {
            return Ok(RMatrix::zeros(self.sub.ring(), self.g_src, self.g_tgt));
        }
        right_solve(&self.src_basis, &ym)
    }

    /// Canonical key of a map given by an extension matrix.
    pub fn key(&self, x: &RMatrix) -> Vec<u64> {
        self.src_basis.mul(x).expect("shape").data().to_vec()
    }

    /// All elements as (key, extension) pairs; the caller checks the size.
    pub fn elements(&self) -> Vec<(Vec<u64>, RMatrix)> {
        let ring = self.sub.ring();
        let mut out = vec![(
            vec![0u64; self.sub.ambient()],
            RMatrix::zeros(ring, self.g_src, self.g_tgt),
        )];
        for ((row, &(_, v)), x) in self.sub.rows().iter().zip(self.sub.pivots()).zip(&self.ext) {
            let count = if v == 0 { ring.modulus() } else { ring.pow_p(ring.exp() - v) };
            let mut next = Vec::with_capacity(out.len() * count as usize);
            for (k, m) in &out {
                let (mut k, mut m) = (k.clone(), m.clone());
                for _ in 0..count {
                    next.push((k.clone(), m.clone()));
                    for (a, &b) in k.iter_mut().zip(row) {
                        *a = ring.add(*a, b);
                    }
                    m = m.add(x).expect("shape");
                }
            }
            out = next;
        }
        out
    }

    /// Number of elements, if it fits in u64.
    pub fn count(&self) -> Option<u64> {
        let p = self.sub.ring().p() as u128;
        let n = p.checked_pow(self.order_log())?;
        u64::try_from(n).ok()
    }

    /// Coefficient vector of the idx-th element in mixed radix over the Howell rows.
    pub fn coeffs_of_index(&self, mut idx: u64) -> Vec<u64> {
        let ring = self.sub.ring();
        self.sub
            .pivots()
            .iter()
            .map(|&(_, v)| {
                let count = if v == 0 { ring.modulus() } else { ring.pow_p(ring.exp() - v) };
                let c = idx % count;
                idx /= count;
                c
            })
            .collect()
    }

    pub fn element(&self, idx: u64) -> (Vec<u64>, RMatrix) {
        self.combine(&self.coeffs_of_index(idx))
    }

    /// Element with coefficient vector c on the Howell rows.
    pub fn combine(&self, c: &[u64]) -> (Vec<u64>, RMatrix) {
        let ring = self.sub.ring();
        let mut k = vec![0u64; self.sub.ambient()];
        let mut m = RMatrix::zeros(ring, self.g_src, self.g_tgt);
        for ((row, x), &ci) in self.sub.rows().iter().zip(&self.ext).zip(c) {
            if ci == 0 {
                continue;
            }
            for (a, &b) in k.iter_mut().zip(row) {
                *a = ring.add(*a, ring.mul(ci, b));
            }
            m = m.add(&x.scale(ci)).expect("shape");
        }
        (k, m)
    }
}

/// Hom_A(M, N).
pub fn hom_space(m: &FModule, n: &FModule) -> Result<HomSpace> {
    m.same_algebra(n)?;
    let ring = m.ring();
    let b = m.carrier().basis();
    let r = b.rows();
    let g = n.ambient();
    let len = r * g;
    let mut cols: Vec<Vec<u64>> = Vec::new();
    // rows of Y lie in U_N
    let q = n.carrier().annihilator().basis();
    for k in 0..r {
        for qrow in q.row_vecs() {
            let mut c = vec![0u64; len];
            c[k * g..(k + 1) * g].copy_from_slice(&qrow);
            cols.push(c);
        }
    }
    // relations among the rows of B_M kill Y
    for rel in kernel(&b).rows() {
        for l in 0..g {
            let mut c = vec![0u64; len];
            for k in 0..r {
                c[k * g + l] = rel[k];
            }
            cols.push(c);
        }
    }
    // equivariance T_i·Y = Y·A_i^N where B·A_i^M = T_i·B
    for (am, an) in m.actions().iter().zip(n.actions()) {
        let t = if r == 0 { RMatrix::zeros(ring, 0, 0) } else { right_solve_rows(&b, &b.mul(am)?)? };
        for k in 0..r {
            for l in 0..g {
                let mut c = vec![0u64; len];
                for mm in 0..r {
                    let v = t.get(k, mm);
                    c[mm * g + l] = ring.add(c[mm * g + l], v);
                }
                for mm in 0..g {
                    let v = an.get(mm, l);
                    c[k * g + mm] = ring.sub(c[k * g + mm], v);
                }
                cols.push(c);
            }
        }
    }
    let sub = if len == 0 {
        Subgroup::zero(ring, 0)
    } else if cols.is_empty() {
        Subgroup::full(ring, len)
    } else {
        let cm = RMatrix::from_rows(ring, len, &cols)?.transpose();
        kernel(&cm)
    };
    let mut hs = HomSpace { sub, ext: Vec::new(), src_basis: b, g_src: m.ambient(), g_tgt: g };
    let ext = hs.sub.rows().iter().map(|y| hs.to_map(y)).collect::<Result<Vec<_>>>()?;
    hs.ext = ext;
    Ok(hs)
}

/// Solve T·B = C for T, i.e. express each row of C in the rows of B.
fn right_solve_rows(b: &RMatrix, c: &RMatrix) -> Result<RMatrix> {
    let mut rows = Vec::with_capacity(c.rows());
    for i in 0..c.rows() {
        match crate::exactlin::solve(b, c.row(i))? {
            Some((x, _)) => rows.push(x),
            None => return Err(Error::Invalid("carrier is not stable".into())),
        }
    }
    Ok(RMatrix::from_rows(b.ring(), b.rows(), &rows)?)
}

/// End(M) with composition (f·g means "f then g" in the row convention, i.e. x ↦ x·X_f·X_g).
pub fn end_ring(m: &FModule) -> Result<(Arc<FiniteAlgebra>, HomSpace)> {
    let hs = hom_space(m, m)?;
    let ring = m.ring();
    let d = hs.sub.rows().len();
    let basis = hs.sub.basis();
    let mut consts = vec![vec![vec![0u64; d]; d]; d];
    for i in 0..d {
        for j in 0..d {
            let prod = hs.ext[i].mul(&hs.ext[j])?;
            let key = hs.key(&prod);
            let (c, _) = crate::exactlin::solve(&basis, &key)?
                .ok_or_else(|| Error::Invalid("End not closed under composition".into()))?;
            consts[i][j] = c;
        }
    }
    let id_key = hs.key(&RMatrix::identity(ring, m.ambient()));
    let unit = if d == 0 {
        vec![]
    } else {
        crate::exactlin::solve(&basis, &id_key)?.ok_or_else(|| Error::Invalid("identity missing".into()))?.0
    };
    let rel = if d == 0 { Subgroup::zero(ring, 0) } else { kernel(&basis) };
    let alg = FiniteAlgebra::new(ring, consts, unit, rel)?;
    Ok((Arc::new(alg), hs))
}

/// Homomorphism M → N given by an extension matrix.
#[derive(Clone, Debug)]
pub struct ModMap {
    pub src: FModule,
    pub tgt: FModule,
    pub x: RMatrix,
}

impl ModMap {
    pub fn new(src: FModule, tgt: FModule, x: RMatrix) -> Result<ModMap> {
        src.same_algebra(&tgt)?;
        if x.rows() != src.ambient() || x.cols() != tgt.ambient() {
            return Err(Error::Dimension("map matrix shape".into()));
        }
        let b = src.carrier().basis();
        for (k, row) in b.row_vecs().iter().enumerate() {
            let y = x.apply(row);
            if !tgt.carrier().contains_vec(&y) {
                return Err(Error::Invalid(format!("generator {} maps outside the target", k + 1)));
            }
            for (i, (am, an)) in src.actions().iter().zip(tgt.actions()).enumerate() {
                if x.apply(&am.apply(row)) != an.apply(&y) {
                    return Err(Error::Invalid(format!("map does not commute with e{}", i + 1)));
                }
            }
        }
        Ok(ModMap { src, tgt, x })
    }

    pub fn identity(m: &FModule) -> ModMap {
        ModMap { src: m.clone(), tgt: m.clone(), x: RMatrix::identity(m.ring(), m.ambient()) }
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        self.x.apply(v)
    }

    /// self then other.
    pub fn then(&self, other: &ModMap) -> Result<ModMap> {
        Ok(ModMap { src: self.src.clone(), tgt: other.tgt.clone(), x: self.x.mul(&other.x)? })
    }

    pub fn image(&self) -> Subgroup {
        self.src.carrier().map(&self.x).expect("shape")
    }

    pub fn kernel(&self) -> Subgroup {
        let b = self.src.carrier().basis();
        let k = kernel(&b.mul(&self.x).expect("shape"));
        k.map(&b).expect("shape")
    }

    pub fn is_injective(&self) -> bool {
        self.image().order_log() == self.src.order_log()
    }

    pub fn is_bijective(&self) -> bool {
        self.is_injective() && self.src.order_log() == self.tgt.order_log()
    }

    pub fn key(&self) -> Vec<u64> {
        self.src.carrier().basis().mul(&self.x).expect("shape").data().to_vec()
    }

    pub fn equals(&self, other: &ModMap) -> bool {
        self.key() == other.key()
    }
}

/// True iff f has a retraction r with f·r = id (row convention: x ↦ x·X_f·X_r).
pub fn is_split_mono(f: &ModMap) -> Result<bool> {
    if f.src.is_zero() {
        return Ok(true);
    }
    let hs = hom_space(&f.tgt, &f.src)?;
    let b = f.src.carrier().basis();
    let rows: Vec<Vec<u64>> = hs.ext.iter().map(|x| b.mul(&f.x).and_then(|m| m.mul(x)).map(|m| m.data().to_vec())).collect::<Result<_>>()?;
    let id_key = b.data().to_vec();
    let img = Subgroup::from_rows(f.src.ring(), id_key.len(), rows);
    Ok(img.contains_vec(&id_key))
}

/// Pushout of f: A → B and g: A → C, with the maps B → P and C → P.
pub fn pushout(f: &ModMap, g: &ModMap) -> Result<(FModule, ModMap, ModMap)> {
    let bc = f.tgt.direct_sum(&g.tgt)?;
    let r = f.src.ring();
    let rows: Vec<Vec<u64>> = f
        .src
        .carrier()
        .rows()
        .iter()
        .map(|a| {
            let mut v = f.apply(a);
            v.extend(g.apply(a).into_iter().map(|x| r.neg(x)));
            v
        })
        .collect();
    let w = bc.submodule(&rows)?;
    let (p, q) = bc.quotient_with_map(w.carrier())?;
    let gb = f.tgt.ambient();
    let gc = g.tgt.ambient();
    let inc_b = RMatrix::identity(r, gb).hstack(&RMatrix::zeros(r, gb, gc))?;
    let inc_c = RMatrix::zeros(r, gc, gb).hstack(&RMatrix::identity(r, gc))?;
    let to_p_b = ModMap::new(f.tgt.clone(), p.clone(), inc_b.mul(&q)?)?;
    let to_p_c = ModMap::new(g.tgt.clone(), p.clone(), inc_c.mul(&q)?)?;
    Ok((p, to_p_b, to_p_c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::Ring;

    fn zn(p: u64, n: u32) -> Arc<FiniteAlgebra> {
        let r = Ring::new(p, n).unwrap();
        Arc::new(FiniteAlgebra::free(r, vec![vec![vec![1]]], vec![1]).unwrap())
    }

    fn cyclic(a: &Arc<FiniteAlgebra>, k: u32) -> FModule {
        let m = FModule::regular(a.clone()).unwrap();
        let r = a.ring();
        m.quotient(&Subgroup::from_rows(r, 1, vec![vec![r.pow_p(k)]])).unwrap()
    }

    #[test]
    fn hom_z4_z2() {
        let a = zn(2, 2);
        let z4 = FModule::regular(a.clone()).unwrap();
        let z2 = cyclic(&a, 1);
        assert_eq!(hom_space(&z4, &z2).unwrap().order_log(), 1);
        assert_eq!(hom_space(&z2, &z4).unwrap().order_log(), 1);
        let zero = FModule::zero(a.clone());
        assert!(hom_space(&z4, &zero).unwrap().sub.is_zero());
        let e = hom_space(&z4, &z4).unwrap();
        let id = RMatrix::identity(a.ring(), 1);
        assert!(e.sub.contains_vec(&e.key(&id)));
    }

    #[test]
    fn end_ring_of_z4() {
        let a = zn(2, 2);
        let z4 = FModule::regular(a.clone()).unwrap();
        let (e, _) = end_ring(&z4).unwrap();
        assert_eq!(e.order_log(), 2);
    }

    #[test]
    fn split_and_pushout() {
        let a = zn(2, 2);
        let z4 = FModule::regular(a.clone()).unwrap();
        let z2 = cyclic(&a, 1);
        let sum = z2.direct_sum(&z4).unwrap();
        let r = a.ring();
        let mut xm = RMatrix::zeros(r, z2.ambient(), sum.ambient());
        for i in 0..z2.ambient() {
            xm.set(i, i, 1);
        }
        let f = ModMap::new(z2.clone(), sum.clone(), xm).unwrap();
        assert!(is_split_mono(&f).unwrap());
        // 2: Z/2 → Z/4 is not split
        let y = hom_space(&z2, &z4).unwrap();
        let (_, nz) = y.elements().into_iter().find(|(k, _)| k.iter().any(|&v| v != 0)).unwrap();
        let g = ModMap::new(z2.clone(), z4.clone(), nz).unwrap();
        assert!(!is_split_mono(&g).unwrap());
        let (p, _, _) = pushout(&ModMap::identity(&z4), &ModMap::identity(&z4)).unwrap();
        assert_eq!(p.order_log(), 2);
    }
}
