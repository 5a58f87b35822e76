use std::sync::Arc;

use super::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::exactlin::{solve, RMatrix, Ring, Subgroup};

/// A finite module over a finite algebra, embedded in (Z/p^N)^g.
///
/// The module is the carrier subgroup U; spanning element e_i of the algebra
/// acts by x ↦ x·A_i, with U·A_i ⊆ U.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FModule {
    alg: Arc<FiniteAlgebra>,
    carrier: Subgroup,
    actions: Vec<RMatrix>,
}

impl FModule {
    pub fn new(alg: Arc<FiniteAlgebra>, carrier: Subgroup, actions: Vec<RMatrix>) -> Result<FModule> {
        let ring = alg.ring();
        let g = carrier.ambient();
        if carrier.ring() != ring {
            return Err(Error::RingMismatch(format!("carrier over {} for algebra over {}", carrier.ring(), ring)));
        }
        if actions.len() != alg.dim() {
            return Err(Error::Arity(format!("{} action matrices for {} spanning elements", actions.len(), alg.dim())));
        }
        for a in &actions {
            if a.rows() != g || a.cols() != g || a.ring() != ring {
                return Err(Error::Dimension(format!("action matrix must be {g}x{g} over {ring}")));
            }
        }
        let m = FModule { alg, carrier, actions };
        m.check_laws()?;
        Ok(m)
    }

    fn check_laws(&self) -> Result<()> {
        let b = self.carrier.rows();
        for (i, a) in self.actions.iter().enumerate() {
            for row in b {
                if !self.carrier.contains_vec(&a.apply(row)) {
                    return Err(Error::Invalid(format!("carrier not stable under e{}", i + 1)));
                }
            }
        }
        for row in b {
            if self.act(row, self.alg.unit()) != *row {
                return Err(Error::Invalid("unit does not act as identity".into()));
            }
            for i in 0..self.alg.dim() {
                let ui = self.actions[i].apply(row);
                for j in 0..self.alg.dim() {
                    let lhs = self.actions[j].apply(&ui);
                    let rhs = self.act(row, &self.alg.consts()[i][j]);
                    if lhs != rhs {
                        return Err(Error::Invalid(format!("action violates e{}·e{}", i + 1, j + 1)));
                    }
                }
            }
            for r in self.alg.relations().rows() {
                if self.act(row, r).iter().any(|&x| x != 0) {
                    return Err(Error::Invalid("action does not respect the algebra relations".into()));
                }
            }
        }
        Ok(())
    }

    /// The zero module.
    pub fn zero(alg: Arc<FiniteAlgebra>) -> FModule {
        let ring = alg.ring();
        let actions = vec![RMatrix::zeros(ring, 0, 0); alg.dim()];
        FModule { alg, carrier: Subgroup::zero(ring, 0), actions }
    }

    /// The regular right module A_A.
    pub fn regular(alg: Arc<FiniteAlgebra>) -> Result<FModule> {
        Ok(FModule::regular_with_map(alg)?.0)
    }

    /// The regular module with the matrix sending spanning coordinates of an
    /// algebra element to its ambient vector.
    pub fn regular_with_map(alg: Arc<FiniteAlgebra>) -> Result<(FModule, RMatrix)> {
        let d = alg.dim();
        let ring = alg.ring();
        let actions = (0..d).map(|i| alg.right_mult(i)).collect();
        let free = FModule { alg: alg.clone(), carrier: Subgroup::full(ring, d), actions };
        if alg.is_free() {
            Ok((free, RMatrix::identity(ring, d)))
        } else {
            free.quotient_with_map(alg.relations())
        }
    }

    /// A^n as a right module.
    pub fn free(alg: Arc<FiniteAlgebra>, n: usize) -> Result<FModule> {
        let r = FModule::regular(alg.clone())?;
        let mut out = FModule::zero(alg);
        for _ in 0..n {
            out = out.direct_sum(&r)?;
        }
        Ok(out)
    }

    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        &self.alg
    }
    pub fn ring(&self) -> Ring {
        self.alg.ring()
    }
    pub fn carrier(&self) -> &Subgroup {
        &self.carrier
    }
    pub fn actions(&self) -> &[RMatrix] {
        &self.actions
    }
    pub fn ambient(&self) -> usize {
        self.carrier.ambient()
    }
    pub fn order_log(&self) -> u32 {
        self.carrier.order_log()
    }
    pub fn is_zero(&self) -> bool {
        self.carrier.is_zero()
    }

    /// x·a for an algebra element a in spanning coordinates.
    pub fn act(&self, x: &[u64], a: &[u64]) -> Vec<u64> {
        let r = self.ring();
        let mut out = vec![0u64; self.ambient()];
        for (i, &c) in a.iter().enumerate() {
            if c % r.modulus() == 0 {
                continue;
            }
            let y = self.actions[i].apply(x);
            for (o, v) in out.iter_mut().zip(y) {
                *o = r.add(*o, r.mul(c, v));
            }
        }
        out
    }

    /// Matrix of x ↦ x·a on the ambient.
    pub fn action_of(&self, a: &[u64]) -> RMatrix {
        let r = self.ring();
        let g = self.ambient();
        let mut out = RMatrix::zeros(r, g, g);
        for (i, &c) in a.iter().enumerate() {
            if c % r.modulus() != 0 {
                out = out.add(&self.actions[i].scale(c)).expect("shape");
            }
        }
        out
    }

    pub fn same_algebra(&self, other: &FModule) -> Result<()> {
        if Arc::ptr_eq(&self.alg, &other.alg) || self.alg == other.alg {
            Ok(())
        } else {
            Err(Error::RingMismatch("modules over different algebras".into()))
        }
    }

    pub fn elements(&self) -> Vec<Vec<u64>> {
        self.carrier.sorted_elements()
    }

    pub fn direct_sum(&self, other: &FModule) -> Result<FModule> {
        self.same_algebra(other)?;
        let carrier = self.carrier.product(&other.carrier);
        let actions = self
            .actions
            .iter()
            .zip(&other.actions)
            .map(|(a, b)| RMatrix::block_diag(&[a, b]))
            .collect();
        Ok(FModule { alg: self.alg.clone(), carrier, actions })
    }

    /// Submodule generated by the given elements.
    pub fn submodule(&self, gens: &[Vec<u64>]) -> Result<FModule> {
        let mut rows: Vec<Vec<u64>> = gens.to_vec();
        let mut sub = Subgroup::from_rows(self.ring(), self.ambient(), rows.clone());
        loop {
            for r in sub.rows() {
                for a in &self.actions {
                    rows.push(a.apply(r));
                }
            }
            let next = Subgroup::from_rows(self.ring(), self.ambient(), rows.clone());
            if next == sub {
                break;
            }
            sub = next;
        }
        if !self.carrier.contains(&sub) {
            return Err(Error::Containment("generators lie outside the module".into()));
        }
        Ok(FModule { alg: self.alg.clone(), carrier: sub, actions: self.actions.clone() })
    }

    pub fn is_submodule(&self, s: &Subgroup) -> bool {
        self.carrier.contains(s) && s.rows().iter().all(|r| self.actions.iter().all(|a| s.contains_vec(&a.apply(r))))
    }

    /// Quotient by a submodule, returned with the projection matrix (ambient → new ambient).
    pub fn quotient_with_map(&self, w: &Subgroup) -> Result<(FModule, RMatrix)> {
        let w = Subgroup::from_rows(self.ring(), self.ambient(), w.rows().to_vec());
        let w = w.intersect(&self.carrier)?;
        if !self.is_submodule(&w) {
            return Err(Error::Containment("quotient by a non-submodule".into()));
        }
        let ring = self.ring();
        let ann = w.annihilator();
        // columns of q generate the annihilator of w, so ker(x ↦ xq) = w
        let q = ann.basis().transpose();
        let qn = q.cols();
        let b = self.carrier.basis();
        let bq = b.mul(&q)?;
        let carrier = Subgroup::from_rows(ring, qn, bq.row_vecs());
        let mut actions = Vec::with_capacity(self.actions.len());
        for a in &self.actions {
            let target = b.mul(a)?.mul(&q)?;
            actions.push(right_solve(&bq, &target)?);
        }
        Ok((FModule { alg: self.alg.clone(), carrier, actions }, q))
    }

    pub fn quotient(&self, w: &Subgroup) -> Result<FModule> {
        Ok(self.quotient_with_map(w)?.0)
    }

    /// The same module viewed over an algebra with the same spanning set and constants
    /// but a smaller exponent; requires p^k·U = 0 where k is the new exponent.
    pub fn change_ring(&self, alg: Arc<FiniteAlgebra>) -> Result<FModule> {
        let old = self.ring();
        let new = alg.ring();
        if new.p() != old.p() || new.exp() > old.exp() {
            return Err(Error::RingMismatch(format!("{old} to {new}")));
        }
        if new == old {
            return FModule::new(alg, self.carrier.clone(), self.actions.clone());
        }
        if !self.carrier.scale_p(new.exp()).is_zero() {
            return Err(Error::Invalid(format!("module is not killed by p^{}", new.exp())));
        }
        // elements killed by p^k have every coordinate divisible by p^(t-k)
        let shift = old.pow_p(old.exp() - new.exp());
        let div = |v: &[u64]| -> Vec<u64> { v.iter().map(|&x| (x / shift) % new.modulus()).collect() };
        let carrier = Subgroup::from_rows(new, self.ambient(), self.carrier.rows().iter().map(|r| div(r)).collect());
        let actions = self.actions.iter().map(|a| a.reduce_to(new)).collect();
        FModule::new(alg, carrier, actions)
    }

    /// Restriction of scalars along the given images of the new algebra's spanning elements.
    pub fn restrict(&self, alg: Arc<FiniteAlgebra>, images: &[Vec<u64>]) -> Result<FModule> {
        if images.len() != alg.dim() {
            return Err(Error::Arity("one image per spanning element".into()));
        }
        let actions = images.iter().map(|a| self.action_of(a)).collect();
        FModule::new(alg, self.carrier.clone(), actions)
    }
}

/// Solve M·X = T for X (M: r×q, T: r×c), returning X (q×c).
pub fn right_solve(m: &RMatrix, t: &RMatrix) -> Result<RMatrix> {
    let mt = m.transpose();
    let tt = t.transpose();
    let mut cols = Vec::with_capacity(t.cols());
    for j in 0..t.cols() {
        match solve(&mt, tt.row(j))? {
            Some((x, _)) => cols.push(x),
            None => return Err(Error::Invalid("linear system has no solution".into())),
        }
    }
    Ok(RMatrix::from_rows(m.ring(), m.cols(), &cols)?.transpose())
}
