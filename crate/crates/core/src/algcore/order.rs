use std::sync::Arc;

use super::module::FModule;
use super::{hom_space, Budget, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::exactlin::{max_exponent, smith, RMatrix, Ring, Subgroup};

/// Default number of p-adic digits carried by lattice data.
pub fn default_precision(p: u64) -> u32 {
    max_exponent(p).min(32)
}

/// A Z_p-order given by exact integer structure constants on a Z_p-basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderDatum {
    p: u64,
    consts: Vec<Vec<Vec<i64>>>,
    unit: Vec<i64>,
    /// Simple components of the rational algebra with their Z_p-dimensions, when known.
    pub components: Vec<(String, usize)>,
}

impl OrderDatum {
    pub fn new(p: u64, consts: Vec<Vec<Vec<i64>>>, unit: Vec<i64>) -> Result<OrderDatum> {
        Ring::new(p, 1)?;
        let d = unit.len();
        if consts.len() != d || consts.iter().any(|r| r.len() != d || r.iter().any(|v| v.len() != d)) {
            return Err(Error::Dimension("structure constants must be d×d×d".into()));
        }
        let o = OrderDatum { p, consts, unit, components: Vec::new() };
        let e = |i: usize| {
            let mut v = vec![0i64; d];
            v[i] = 1;
            v
        };
        for i in 0..d {
            if o.mul(&o.unit, &e(i)) != e(i) || o.mul(&e(i), &o.unit) != e(i) {
                return Err(Error::Invalid(format!("unit law fails on basis element {}", i + 1)));
            }
            for j in 0..d {
                for k in 0..d {
                    if o.mul(&o.mul(&e(i), &e(j)), &e(k)) != o.mul(&e(i), &o.mul(&e(j), &e(k))) {
                        return Err(Error::Invalid("associativity fails".into()));
                    }
                }
            }
        }
        Ok(o)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn dim(&self) -> usize {
        self.unit.len()
    }
    pub fn unit(&self) -> &[i64] {
        &self.unit
    }
    pub fn consts(&self) -> &[Vec<Vec<i64>>] {
        &self.consts
    }

    pub fn mul(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        let d = self.dim();
        let mut out = vec![0i128; d];
        for i in 0..d {
            if x[i] == 0 {
                continue;
            }
            for j in 0..d {
                if y[j] == 0 {
                    continue;
                }
                for k in 0..d {
                    out[k] += x[i] as i128 * y[j] as i128 * self.consts[i][j][k] as i128;
                }
            }
        }
        out.into_iter().map(|v| v as i64).collect()
    }

    /// Λ/p^kΛ as a free algebra over Z/p^k.
    pub fn algebra_mod(&self, k: u32) -> Result<Arc<FiniteAlgebra>> {
        let r = Ring::new(self.p, k)?;
        let consts = self
            .consts
            .iter()
            .map(|a| a.iter().map(|v| v.iter().map(|&x| r.from_i64(x)).collect()).collect())
            .collect();
        let unit = self.unit.iter().map(|&x| r.from_i64(x)).collect();
        Ok(Arc::new(FiniteAlgebra::free(r, consts, unit)?))
    }

    /// Matrix of y ↦ y·e_i at the given ring.
    pub fn right_mult(&self, i: usize, ring: Ring) -> RMatrix {
        let d = self.dim();
        let rows: Vec<Vec<i64>> = (0..d).map(|k| self.consts[k][i].clone()).collect();
        RMatrix::from_i64_rows(ring, d, &rows).expect("square")
    }

    /// Z_p-generators of rad(Λ): lifts of rad(Λ/pΛ) together with pΛ.
    pub fn radical(&self, budget: &Budget) -> Result<Vec<Vec<i64>>> {
        let a = self.algebra_mod(1)?;
        let rad = a.radical(budget.limit)?;
        let d = self.dim();
        let mut rows: Vec<Vec<i64>> = rad.rows().iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
        for i in 0..d {
            let mut v = vec![0i64; d];
            v[i] = self.p as i64;
            rows.push(v);
        }
        Ok(rows)
    }

    /// The regular lattice Λ_Λ.
    pub fn regular(self: &Arc<Self>, prec: u32) -> Result<LatticeModule> {
        let ring = Ring::new(self.p, prec)?;
        let actions = (0..self.dim()).map(|i| self.right_mult(i, ring)).collect();
        LatticeModule::new(self.clone(), actions)
    }
}

/// A Λ-lattice: Z_p^r with action matrices for the basis of Λ, known modulo p^prec.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeModule {
    order: Arc<OrderDatum>,
    rank: usize,
    ring: Ring,
    actions: Vec<RMatrix>,
}

impl LatticeModule {
    pub fn new(order: Arc<OrderDatum>, actions: Vec<RMatrix>) -> Result<LatticeModule> {
        if actions.len() != order.dim() {
            return Err(Error::Arity(format!("{} action matrices for an order of rank {}", actions.len(), order.dim())));
        }
        let ring = actions.first().map(|a| a.ring()).ok_or_else(|| Error::Invalid("order of rank 0".into()))?;
        let rank = actions[0].rows();
        if ring.p() != order.p() {
            return Err(Error::RingMismatch("action ring has the wrong prime".into()));
        }
        for a in &actions {
            if a.rows() != rank || a.cols() != rank || a.ring() != ring {
                return Err(Error::Dimension("action matrices must share size and precision".into()));
            }
        }
        let l = LatticeModule { order, rank, ring, actions };
        l.check_laws()?;
        Ok(l)
    }

    pub fn from_i64(order: Arc<OrderDatum>, rank: usize, actions: &[Vec<Vec<i64>>], prec: u32) -> Result<LatticeModule> {
        let ring = Ring::new(order.p(), prec)?;
        let mats = actions.iter().map(|a| RMatrix::from_i64_rows(ring, rank, a)).collect::<Result<Vec<_>>>()?;
        for m in &mats {
            if m.rows() != rank {
                return Err(Error::Dimension(format!("action needs {rank} rows")));
            }
        }
        LatticeModule::new(order, mats)
    }

    pub fn zero(order: Arc<OrderDatum>, prec: u32) -> Result<LatticeModule> {
        let ring = Ring::new(order.p(), prec)?;
        let d = order.dim();
        Ok(LatticeModule { order, rank: 0, ring, actions: vec![RMatrix::zeros(ring, 0, 0); d] })
    }

    fn check_laws(&self) -> Result<()> {
        let o = &self.order;
        let d = o.dim();
        let unit = self.action_of_i64(o.unit());
        if unit != RMatrix::identity(self.ring, self.rank) {
            return Err(Error::Invalid("unit does not act as identity".into()));
        }
        for i in 0..d {
            for j in 0..d {
                let lhs = self.actions[i].mul(&self.actions[j])?;
                let rhs = self.action_of_i64(&o.consts()[i][j]);
                if lhs != rhs {
                    return Err(Error::Invalid(format!("action violates e{}·e{}", i + 1, j + 1)));
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> &Arc<OrderDatum> {
        &self.order
    }
    pub fn rank(&self) -> usize {
        self.rank
    }
    pub fn prec(&self) -> u32 {
        self.ring.exp()
    }
    pub fn ring(&self) -> Ring {
        self.ring
    }
    pub fn actions(&self) -> &[RMatrix] {
        &self.actions
    }
    pub fn is_zero(&self) -> bool {
        self.rank == 0
    }

    pub fn action_of_i64(&self, a: &[i64]) -> RMatrix {
        let mut out = RMatrix::zeros(self.ring, self.rank, self.rank);
        for (i, &c) in a.iter().enumerate() {
            if c != 0 {
                out = out.add(&self.actions[i].scale(self.ring.from_i64(c))).expect("shape");
            }
        }
        out
    }

    pub fn at_precision(&self, k: u32) -> Result<LatticeModule> {
        if k > self.prec() {
            return Err(Error::Precision(format!("requested {k} digits, only {} known", self.prec())));
        }
        let ring = self.ring.with_exp(k)?;
        Ok(LatticeModule {
            order: self.order.clone(),
            rank: self.rank,
            ring,
            actions: self.actions.iter().map(|a| a.reduce_to(ring)).collect(),
        })
    }

    pub fn direct_sum(&self, other: &LatticeModule) -> Result<LatticeModule> {
        if self.order != other.order {
            return Err(Error::RingMismatch("lattices over different orders".into()));
        }
        let k = self.prec().min(other.prec());
        let (a, b) = (self.at_precision(k)?, other.at_precision(k)?);
        let actions = a.actions.iter().zip(&b.actions).map(|(x, y)| RMatrix::block_diag(&[x, y])).collect();
        Ok(LatticeModule { order: self.order.clone(), rank: a.rank + b.rank, ring: a.ring, actions })
    }

    /// M/Mp^k as a module over Λ/p^kΛ.
    pub fn reduce_mod(&self, k: u32) -> Result<FModule> {
        if k > self.prec() {
            return Err(Error::Precision(format!("reduction mod p^{k} of a lattice known to {} digits", self.prec())));
        }
        let alg = self.order.algebra_mod(k)?;
        let ring = alg.ring();
        let actions = self.actions.iter().map(|a| a.reduce_to(ring)).collect();
        FModule::new(alg, Subgroup::full(ring, self.rank), actions)
    }

    /// M/Mp^k over a caller-supplied copy of Λ/p^kΛ (so that modules share an algebra).
    pub fn reduce_over(&self, alg: &Arc<FiniteAlgebra>) -> Result<FModule> {
        let k = alg.ring().exp();
        if k > self.prec() {
            return Err(Error::Precision(format!("reduction mod p^{k} of a lattice known to {} digits", self.prec())));
        }
        let actions = self.actions.iter().map(|a| a.reduce_to(alg.ring())).collect();
        FModule::new(alg.clone(), Subgroup::full(alg.ring(), self.rank), actions)
    }

    /// The sublattice with Z_p-basis given by the rows of t (full rank), with the induced action.
    pub fn sublattice(&self, t: &RMatrix) -> Result<LatticeModule> {
        let (inv, e) = inverse_scaled(t)?;
        let mut actions = Vec::with_capacity(self.actions.len());
        for a in &self.actions {
            let num = t.mul(a)?.reduce_to(inv.ring()).mul(&inv)?;
            actions.push(exact_div(&num, e)?);
        }
        let ring = actions.first().map(|a: &RMatrix| a.ring()).unwrap_or(self.ring);
        let lat = LatticeModule { order: self.order.clone(), rank: t.rows(), ring, actions };
        lat.check_laws()?;
        Ok(lat)
    }
}

/// For a square matrix t of full rank, returns (p^e·t⁻¹, e); the result is known to
/// e fewer digits than t.
pub fn inverse_scaled(t: &RMatrix) -> Result<(RMatrix, u32)> {
    let ring = t.ring();
    let n = t.rows();
    if t.cols() != n {
        return Err(Error::Dimension("inverse of a non-square matrix".into()));
    }
    let s = smith(t);
    let e = s.diag.iter().copied().max().unwrap_or(0);
    if e * 2 >= ring.exp() {
        return Err(Error::Precision(format!("elementary divisor p^{e} too close to the precision p^{}", ring.exp())));
    }
    // t = U⁻¹ D V⁻¹, so p^e t⁻¹ = V (p^e D⁻¹) U
    let mut dinv = RMatrix::zeros(ring, n, n);
    for (i, &v) in s.diag.iter().enumerate() {
        dinv.set(i, i, ring.pow_p(e - v));
    }
    let out = s.v.mul(&dinv)?.mul(&s.u)?;
    let keep = ring.with_exp(ring.exp() - e)?;
    Ok((out.reduce_to(keep), e))
}

/// Divide every entry by p^k; entries must be divisible. Precision drops by k.
pub fn exact_div(m: &RMatrix, k: u32) -> Result<RMatrix> {
    let ring = m.ring();
    if k == 0 {
        return Ok(m.clone());
    }
    if k >= ring.exp() {
        return Err(Error::Precision("division exhausts the precision".into()));
    }
    let pk = ring.pow_p(k);
    let out = ring.with_exp(ring.exp() - k)?;
    let mut data = Vec::with_capacity(m.data().len());
    for &x in m.data() {
        if x % pk != 0 {
            return Err(Error::Precision("entry not divisible at this precision".into()));
        }
        data.push((x / pk) % out.modulus());
    }
    Ok(RMatrix::from_flat(out, m.rows(), m.cols(), data))
}

/// Z_p-basis of {x : x·c = 0} for a matrix known modulo p^K, with the largest finite
/// elementary-divisor valuation. Fails when some divisor is too close to p^K to tell
/// apart from zero.
pub fn zp_kernel(c: &RMatrix) -> Result<(Vec<Vec<u64>>, u32)> {
    let ring = c.ring();
    let big = ring.exp();
    let s = smith(c);
    let mut rows = Vec::new();
    let mut maxv = 0;
    for i in 0..c.rows() {
        let v = s.diag.get(i).copied().unwrap_or(big);
        if v >= big {
            rows.push(s.u.row(i).to_vec());
        } else {
            if 2 * v >= big {
                return Err(Error::Precision(format!("elementary divisor p^{v} not separated from p^{big}")));
            }
            maxv = maxv.max(v);
        }
    }
    Ok((rows, maxv))
}

/// A Z_p-basis of Hom_Λ(L, M) as r_L × r_M matrices, known to `valid` digits.
#[derive(Clone, Debug)]
pub struct LatticeHoms {
    pub basis: Vec<RMatrix>,
    pub valid: u32,
    pub rows: usize,
    pub cols: usize,
}

impl LatticeHoms {
    /// Image of the homs in r_L × r_M matrices over Z/p^t (flattened row-major).
    pub fn image_mod(&self, t: u32) -> Result<Subgroup> {
        if t > self.valid {
            return Err(Error::Precision(format!("homs known to {} digits, {} requested", self.valid, t)));
        }
        let ring = Ring::new(self.basis_ring_p(), t)?;
        let rows = self.basis.iter().map(|b| b.reduce_to(ring).data().to_vec()).collect();
        Ok(Subgroup::from_rows(ring, self.rows * self.cols, rows))
    }

    fn basis_ring_p(&self) -> u64 {
        self.basis.first().map(|b| b.ring().p()).unwrap_or(2)
    }
}

fn hom_conditions(l: &LatticeModule, m: &LatticeModule, ring: Ring) -> RMatrix {
    let (rl, rm) = (l.rank, m.rank);
    let len = rl * rm;
    let mut cols: Vec<Vec<u64>> = Vec::new();
    for (al, am) in l.actions.iter().zip(&m.actions) {
        let al = al.reduce_to(ring);
        let am = am.reduce_to(ring);
        for k in 0..rl {
            for c in 0..rm {
                let mut col = vec![0u64; len];
                for j in 0..rl {
                    col[j * rm + c] = ring.add(col[j * rm + c], al.get(k, j));
                }
                for j in 0..rm {
                    col[k * rm + j] = ring.sub(col[k * rm + j], am.get(j, c));
                }
                cols.push(col);
            }
        }
    }
    RMatrix::from_rows(ring, len, &cols).expect("shape").transpose()
}

/// Hom_Λ(L, M), computed at `work` digits and checked against 2·work digits.
pub fn lattice_homs(l: &LatticeModule, m: &LatticeModule, work: u32) -> Result<LatticeHoms> {
    if l.order != m.order {
        return Err(Error::RingMismatch("lattices over different orders".into()));
    }
    let avail = l.prec().min(m.prec());
    let hi = (2 * work).min(avail);
    if hi <= work {
        return Err(Error::Precision(format!("need {} digits for the stability check, have {avail}", 2 * work)));
    }
    let (rl, rm) = (l.rank, m.rank);
    let p = l.order.p();
    if rl * rm == 0 {
        return Ok(LatticeHoms { basis: vec![], valid: hi, rows: rl, cols: rm });
    }
    let ring_lo = Ring::new(p, work)?;
    let ring_hi = Ring::new(p, hi)?;
    let (k_lo, _) = zp_kernel(&hom_conditions(l, m, ring_lo))?;
    let (k_hi, v_hi) = zp_kernel(&hom_conditions(l, m, ring_hi))?;
    if k_lo.len() != k_hi.len() {
        return Err(Error::Precision(format!(
            "Hom rank {} at {work} digits but {} at {hi}",
            k_lo.len(),
            k_hi.len()
        )));
    }
    let valid = hi - v_hi;
    let out_ring = Ring::new(p, valid)?;
    let basis = k_hi
        .into_iter()
        .map(|r| RMatrix::from_flat(ring_hi, rl, rm, r).reduce_to(out_ring))
        .collect();
    let hs = LatticeHoms { basis, valid, rows: rl, cols: rm };
    // the two precisions must agree on the image mod p^(work - v)
    let t = work.saturating_sub(v_hi).max(1).min(valid);
    let lo_img = Subgroup::from_rows(Ring::new(p, t)?, rl * rm, k_lo.iter().map(|r| r.iter().map(|&x| x % p.pow(t)).collect()).collect());
    if lo_img != hs.image_mod(t)? {
        return Err(Error::Precision("Hom image changes between precisions".into()));
    }
    Ok(hs)
}

/// Invariant factors of Ext¹_Λ(L, M), via Ext¹[p^t] = coker(Hom(L,M) → Hom(L/p^t, M/p^t)).
pub fn ext1(l: &LatticeModule, m: &LatticeModule, work: u32) -> Result<Vec<u64>> {
    let homs = lattice_homs(l, m, work)?;
    let mut prev: Option<(u32, Vec<u64>)> = None;
    for t in 1..homs.valid {
        let alg = l.order.algebra_mod(t)?;
        let lt = l.reduce_over(&alg)?;
        let mt = m.reduce_over(&alg)?;
        let h = hom_space(&lt, &mt)?;
        let img = homs.image_mod(t)?;
        if !h.sub.contains(&img) {
            return Err(Error::Precision("reduced lattice homs are not module homs".into()));
        }
        let size = h.sub.order_log() - img.order_log();
        if let Some((s, inv)) = &prev {
            if *s == size {
                return Ok(inv.clone());
            }
        }
        prev = Some((size, h.sub.quotient_invariants(&img)?));
    }
    Err(Error::Precision("Ext group did not stabilize within the available digits".into()))
}

/// Least k with p^k·Ext¹(L, M) = 0.
pub fn annihilator_exponent(l: &LatticeModule, m: &LatticeModule, work: u32) -> Result<u32> {
    let inv = ext1(l, m, work)?;
    let p = l.order.p();
    Ok(inv
        .iter()
        .map(|&q| {
            let mut k = 0;
            let mut x = q;
            while x > 1 {
                x /= p;
                k += 1;
            }
            k
        })
        .max()
        .unwrap_or(0))
}

/// Image of End_Λ(L) in M_r(F_p), as a subgroup of flattened matrices.
fn end_mod_p(l: &LatticeModule, work: u32) -> Result<Subgroup> {
    lattice_homs(l, l, work)?.image_mod(1)
}

fn rank_mod_p(ring: Ring, r: usize, flat: &[u64]) -> usize {
    let rows = flat.chunks(r).map(|c| c.to_vec()).collect();
    Subgroup::from_rows(ring, r, rows).pivots().len()
}

/// L ≅ M iff some homomorphism is invertible modulo p.
pub fn lattice_iso(l: &LatticeModule, m: &LatticeModule, work: u32, budget: &Budget) -> Result<bool> {
    if l.rank != m.rank {
        return Ok(false);
    }
    if l.rank == 0 {
        return Ok(true);
    }
    let img = lattice_homs(l, m, work)?.image_mod(1)?;
    let ring = img.ring();
    if (ring.p() as u128).pow(img.order_log()) > budget.limit {
        return Err(Error::Budget(format!("Hom mod p has p^{} elements", img.order_log())));
    }
    let elems = img.elements();
    let r = l.rank;
    Ok(crate::par::find_any(&elems, |x| rank_mod_p(ring, r, x) == r).is_some())
}

/// L is indecomposable iff the image of End(L) mod p has no idempotent besides 0 and 1.
pub fn lattice_is_indecomposable(l: &LatticeModule, work: u32, budget: &Budget) -> Result<bool> {
    if l.rank == 0 {
        return Ok(false);
    }
    let img = end_mod_p(l, work)?;
    let ring = img.ring();
    if (ring.p() as u128).pow(img.order_log()) > budget.limit {
        return Err(Error::Budget(format!("End mod p has p^{} elements", img.order_log())));
    }
    let r = l.rank;
    let id = RMatrix::identity(ring, r);
    let elems = img.elements();
    let found = crate::par::find_any(&elems, |x| {
        let e = RMatrix::from_flat(ring, r, r, x.clone());
        !e.is_zero() && e != id && e.mul(&e).expect("square") == e
    });
    Ok(found.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Λ = {(a,b) ∈ Z_2 × Z_2 : a ≡ b mod 2} with basis (1,1), (0,2).
    pub(crate) fn e1_order() -> Arc<OrderDatum> {
        let consts = vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![0, 2]]];
        Arc::new(OrderDatum::new(2, consts, vec![1, 0]).unwrap())
    }

    fn r1r2(o: &Arc<OrderDatum>) -> (LatticeModule, LatticeModule) {
        let r1 = LatticeModule::from_i64(o.clone(), 1, &[vec![vec![1]], vec![vec![0]]], 32).unwrap();
        let r2 = LatticeModule::from_i64(o.clone(), 1, &[vec![vec![1]], vec![vec![2]]], 32).unwrap();
        (r1, r2)
    }

    #[test]
    fn e1_ext_and_iso() {
        let o = e1_order();
        let lam = o.regular(32).unwrap();
        let (r1, r2) = r1r2(&o);
        assert!(ext1(&lam, &r1, 8).unwrap().is_empty());
        assert_eq!(ext1(&r1, &r2, 8).unwrap(), vec![2]);
        assert_eq!(annihilator_exponent(&r2, &r1, 8).unwrap(), 1);
        let b = Budget::default();
        assert!(!lattice_iso(&r1, &r2, 8, &b).unwrap());
        assert!(lattice_iso(&r1, &r1, 8, &b).unwrap());
        assert!(!lattice_iso(&lam, &r1.direct_sum(&r2).unwrap(), 8, &b).unwrap());
        assert!(lattice_is_indecomposable(&lam, 8, &b).unwrap());
        assert!(!lattice_is_indecomposable(&r1.direct_sum(&r2).unwrap(), 8, &b).unwrap());
    }

    #[test]
    fn e1_radical_and_reduction() {
        let o = e1_order();
        let rad = o.radical(&Budget::default()).unwrap();
        let ring = Ring::new(2, 4).unwrap();
        let s = Subgroup::from_rows(ring, 2, rad.iter().map(|r| r.iter().map(|&x| ring.from_i64(x)).collect()).collect());
        // rad Λ = 2Γ ∩ Λ has Λ-coordinates spanned by (2,-1) and (0,1)
        let expect = Subgroup::from_rows(ring, 2, vec![vec![2, ring.from_i64(-1)], vec![0, 1]]);
        assert_eq!(s, expect);
        let lam = o.regular(32).unwrap();
        let red = lam.reduce_mod(1).unwrap();
        assert_eq!(red.order_log(), 2);
    }

    #[test]
    fn sublattice_of_lambda() {
        let o = e1_order();
        let lam = o.regular(32).unwrap();
        let t = RMatrix::from_i64_rows(lam.ring(), 2, &[vec![2, 0], vec![0, 1]]).unwrap();
        let sub = lam.sublattice(&t).unwrap();
        assert_eq!(sub.rank(), 2);
        assert!(sub.prec() < 32);
    }
}
