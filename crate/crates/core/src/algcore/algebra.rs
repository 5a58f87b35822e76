use crate::error::{Error, Result};
use crate::exactlin::{RMatrix, Ring, Subgroup};

/// A finite algebra over Z/p^N given by spanning elements e_1..e_d, structure
/// constants e_i·e_j = Σ c_ijk e_k, a unit, and the relations among the e_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    ring: Ring,
    dim: usize,
    consts: Vec<Vec<Vec<u64>>>,
    unit: Vec<u64>,
    rel: Subgroup,
}

impl FiniteAlgebra {
    pub fn new(ring: Ring, consts: Vec<Vec<Vec<u64>>>, unit: Vec<u64>, rel: Subgroup) -> Result<FiniteAlgebra> {
        let dim = unit.len();
        if consts.len() != dim || consts.iter().any(|r| r.len() != dim || r.iter().any(|v| v.len() != dim)) {
            return Err(Error::Dimension("structure constants must be d×d×d".into()));
        }
        if rel.ambient() != dim || rel.ring() != ring {
            return Err(Error::Dimension("relations live in the wrong ambient".into()));
        }
        let m = ring.modulus();
        let consts = consts
            .into_iter()
            .map(|r| r.into_iter().map(|v| v.into_iter().map(|x| x % m).collect()).collect())
            .collect();
        let unit = unit.into_iter().map(|x| x % m).collect();
        let a = FiniteAlgebra { ring, dim, consts, unit, rel };
        a.check_laws()?;
        Ok(a)
    }

    pub fn free(ring: Ring, consts: Vec<Vec<Vec<u64>>>, unit: Vec<u64>) -> Result<FiniteAlgebra> {
        let d = unit.len();
        FiniteAlgebra::new(ring, consts, unit, Subgroup::zero(ring, d))
    }

    /// The zero algebra over `ring`.
    pub fn zero(ring: Ring) -> FiniteAlgebra {
        FiniteAlgebra { ring, dim: 0, consts: vec![], unit: vec![], rel: Subgroup::zero(ring, 0) }
    }

    fn check_laws(&self) -> Result<()> {
        let d = self.dim;
        let basis = |i: usize| {
            let mut v = vec![0; d];
            v[i] = 1;
            v
        };
        for r in self.rel.rows() {
            for i in 0..d {
                if !self.rel.contains_vec(&self.mul(r, &basis(i))) || !self.rel.contains_vec(&self.mul(&basis(i), r)) {
                    return Err(Error::Invalid("relations are not an ideal".into()));
                }
            }
        }
        for i in 0..d {
            let ei = basis(i);
            if !self.eq(&self.mul(&self.unit, &ei), &ei) || !self.eq(&self.mul(&ei, &self.unit), &ei) {
                return Err(Error::Invalid(format!("unit law fails on e{}", i + 1)));
            }
            for j in 0..d {
                let ej = basis(j);
                let eij = self.mul(&ei, &ej);
                for k in 0..d {
                    let ek = basis(k);
                    if !self.eq(&self.mul(&eij, &ek), &self.mul(&ei, &self.mul(&ej, &ek))) {
                        return Err(Error::Invalid(format!("associativity fails on e{} e{} e{}", i + 1, j + 1, k + 1)));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn unit(&self) -> &[u64] {
        &self.unit
    }
    pub fn relations(&self) -> &Subgroup {
        &self.rel
    }
    pub fn consts(&self) -> &[Vec<Vec<u64>>] {
        &self.consts
    }
    pub fn is_free(&self) -> bool {
        self.rel.is_zero()
    }

    pub fn basis_elem(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0; self.dim];
        v[i] = 1 % self.ring.modulus();
        v
    }

    pub fn mul(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let r = self.ring;
        let mut out = vec![0u64; self.dim];
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let ab = r.mul(a, b);
                for (o, &c) in out.iter_mut().zip(&self.consts[i][j]) {
                    *o = r.add(*o, r.mul(ab, c));
                }
            }
        }
        out
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter().zip(y).map(|(&a, &b)| self.ring.add(a, b)).collect()
    }

    pub fn canonical(&self, x: &[u64]) -> Vec<u64> {
        self.rel.reduce(x)
    }

    pub fn eq(&self, x: &[u64], y: &[u64]) -> bool {
        let d: Vec<u64> = x.iter().zip(y).map(|(&a, &b)| self.ring.sub(a, b)).collect();
        self.rel.contains_vec(&d)
    }

    pub fn is_zero_elem(&self, x: &[u64]) -> bool {
        self.rel.contains_vec(x)
    }

    /// Matrix of y ↦ y·e_i on coordinate vectors (row convention).
    pub fn right_mult(&self, i: usize) -> RMatrix {
        let d = self.dim;
        let rows: Vec<Vec<u64>> = (0..d).map(|k| self.consts[k][i].clone()).collect();
        RMatrix::from_rows(self.ring, d, &rows).expect("square")
    }

    /// Matrix of y ↦ y·x.
    pub fn right_mult_by(&self, x: &[u64]) -> RMatrix {
        let d = self.dim;
        let rows: Vec<Vec<u64>> = (0..d).map(|k| self.mul(&self.basis_elem(k), x)).collect();
        RMatrix::from_rows(self.ring, d, &rows).expect("square")
    }

    /// log_p of the number of elements.
    pub fn order_log(&self) -> u32 {
        self.ring.exp() * self.dim as u32 - self.rel.order_log()
    }

    /// Canonical representatives of all elements.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let r = self.ring;
        let mut ranges = vec![r.modulus(); self.dim];
        for &(j, v) in self.rel.pivots() {
            ranges[j] = r.pow_p(v).max(1);
        }
        let mut out = vec![vec![]];
        for &n in &ranges {
            let mut next = Vec::with_capacity(out.len() * n as usize);
            for base in &out {
                for c in 0..n {
                    let mut v: Vec<u64> = base.clone();
                    v.push(c);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    pub fn pow(&self, x: &[u64], k: usize) -> Vec<u64> {
        let mut acc = self.unit.clone();
        for _ in 0..k {
            acc = self.mul(&acc, x);
        }
        acc
    }

    pub fn is_nilpotent(&self, x: &[u64]) -> bool {
        let mut acc = x.to_vec();
        let bound = (self.order_log() as usize).max(1) + 1;
        for _ in 0..bound {
            if self.is_zero_elem(&acc) {
                return true;
            }
            acc = self.mul(&acc, x);
        }
        self.is_zero_elem(&acc)
    }

    pub fn is_idempotent(&self, x: &[u64]) -> bool {
        self.eq(&self.mul(x, x), x)
    }

    /// Drop spanning elements that are redundant modulo the relations.
    /// Returns the new algebra and the d×d' rewrite matrix sending old coordinates to new.
    pub fn minimize(&self) -> (FiniteAlgebra, RMatrix) {
        let (a, w, _) = self.minimize_indexed();
        (a, w)
    }

    /// As `minimize`, also returning the old indices of the kept spanning elements.
    pub fn minimize_indexed(&self) -> (FiniteAlgebra, RMatrix, Vec<usize>) {
        let r = self.ring;
        let d = self.dim;
        let redundant: Vec<Option<usize>> = {
            let mut v = vec![None; d];
            for (k, &(j, val)) in self.rel.pivots().iter().enumerate() {
                if val == 0 {
                    v[j] = Some(k);
                }
            }
            v
        };
        let kept: Vec<usize> = (0..d).filter(|&j| redundant[j].is_none()).collect();
        let dk = kept.len();
        let mut w = vec![vec![0u64; dk]; d];
        for j in (0..d).rev() {
            match redundant[j] {
                None => {
                    let pos = kept.iter().position(|&c| c == j).unwrap();
                    w[j][pos] = 1 % r.modulus();
                }
                Some(k) => {
                    // e_j = -Σ_{l>j} row[l] e_l
                    let row = self.rel.rows()[k].clone();
                    let mut acc = vec![0u64; dk];
                    for l in (j + 1)..d {
                        if row[l] != 0 {
                            let c = r.neg(row[l]);
                            for t in 0..dk {
                                acc[t] = r.add(acc[t], r.mul(c, w[l][t]));
                            }
                        }
                    }
                    w[j] = acc;
                }
            }
        }
        let wm = RMatrix::from_rows(r, dk, &w).expect("shape");
        let rel = self.rel.map(&wm).expect("shape");
        let consts = kept
            .iter()
            .map(|&a| kept.iter().map(|&b| wm.apply(&self.consts[a][b])).collect())
            .collect();
        let unit = wm.apply(&self.unit);
        let alg = FiniteAlgebra { ring: r, dim: dk, consts, unit, rel };
        (alg, wm, kept)
    }

    /// Jacobson radical of an algebra over Z/p: elements x with x·y nilpotent for all y.
    /// Over Z/p^N it is the preimage of the radical of A/pA.
    pub fn radical(&self, budget: u128) -> Result<Subgroup> {
        let r = self.ring;
        let f = Ring::new(r.p(), 1)?;
        let red = FiniteAlgebra {
            ring: f,
            dim: self.dim,
            consts: self
                .consts
                .iter()
                .map(|a| a.iter().map(|v| v.iter().map(|&x| x % f.modulus()).collect()).collect())
                .collect(),
            unit: self.unit.iter().map(|&x| x % f.modulus()).collect(),
            rel: self.rel.reduce_to(f),
        };
        let size = (f.p() as u128).pow(red.order_log());
        if size * size > budget.max(1 << 24) {
            return Err(Error::Budget(format!("radical search over {size} elements")));
        }
        let elems = red.elements();
        let rad: Vec<Vec<u64>> = crate::par::filter(&elems, |x| elems.iter().all(|y| red.is_nilpotent(&red.mul(x, y))));
        let mut rows: Vec<Vec<u64>> = rad.into_iter().collect();
        let mut lifted: Vec<Vec<u64>> = Vec::new();
        lifted.append(&mut rows);
        for i in 0..self.dim {
            let mut v = vec![0; self.dim];
            v[i] = r.p() % r.modulus();
            lifted.push(v);
        }
        lifted.extend(self.rel.rows().iter().cloned());
        Ok(Subgroup::from_rows(r, self.dim, lifted))
    }

    /// Quotient algebra by a two-sided ideal containing the relations.
    pub fn quotient(&self, ideal: &Subgroup) -> Result<FiniteAlgebra> {
        let rel = self.rel.sum(ideal)?;
        FiniteAlgebra::new(self.ring, self.consts.clone(), self.unit.clone(), rel)
    }
}
