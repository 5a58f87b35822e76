use super::{RMatrix, Ring};
use crate::error::{Error, Result};

/// A subgroup of (Z/p^N)^n stored by its Howell basis.
///
/// Pivot columns strictly increase down the rows, each pivot is a power p^v,
/// and entries above a pivot lie in [0, p^v).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    ring: Ring,
    n: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<(usize, u32)>,
}

fn howell_rows(ring: Ring, n: usize, input: Vec<Vec<u64>>) -> (Vec<Vec<u64>>, Vec<(usize, u32)>) {
    let big_n = ring.exp();
    let mut work: Vec<Vec<u64>> = input.into_iter().filter(|r| r.iter().any(|&x| x != 0)).collect();
    let mut out: Vec<Vec<u64>> = Vec::new();
    let mut pivots = Vec::new();
    for j in 0..n {
        if work.is_empty() {
            break;
        }
        let mut best: Option<(usize, u32)> = None;
        for (i, r) in work.iter().enumerate() {
            if r[j] != 0 {
                let v = ring.val(r[j]);
                if best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((i, v));
                    if v == 0 {
                        break;
                    }
                }
            }
        }
        let Some((bi, v)) = best else { continue };
        let mut piv = work.swap_remove(bi);
        let (_, u) = ring.split(piv[j]);
        let uinv = ring.inv(u % ring.modulus()).expect("unit part");
        for x in piv.iter_mut() {
            *x = ring.mul(*x, uinv);
        }
        let pv = ring.pow_p(v);
        debug_assert_eq!(piv[j], pv);
        for r in work.iter_mut() {
            if r[j] != 0 {
                let c = r[j] / pv;
                for (x, &y) in r.iter_mut().zip(&piv) {
                    *x = ring.sub(*x, ring.mul(c, y));
                }
            }
        }
        if v > 0 {
            let s = ring.pow_p(big_n - v);
            let sat: Vec<u64> = piv.iter().map(|&y| ring.mul(s, y)).collect();
            if sat.iter().any(|&x| x != 0) {
                work.push(sat);
            }
        }
        work.retain(|r| r.iter().any(|&x| x != 0));
        out.push(piv);
        pivots.push((j, v));
    }
    for k in 0..out.len() {
        let (j, v) = pivots[k];
        let pv = ring.pow_p(v);
        let (head, tail) = out.split_at_mut(k);
        let prow = &tail[0];
        for r in head.iter_mut() {
            let q = r[j] / pv;
            if q != 0 {
                for (x, &y) in r.iter_mut().zip(prow.iter()) {
                    *x = ring.sub(*x, ring.mul(q, y));
                }
            }
        }
    }
    (out, pivots)
}

impl Subgroup {
    pub fn zero(ring: Ring, n: usize) -> Subgroup {
        Subgroup { ring, n, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ring: Ring, n: usize) -> Subgroup {
        Subgroup::from_rows(ring, n, RMatrix::identity(ring, n).row_vecs())
    }

    /// Howell form of the span of the given rows.
    pub fn from_rows(ring: Ring, n: usize, rows: Vec<Vec<u64>>) -> Subgroup {
        let rows = rows
            .into_iter()
            .map(|r| {
                assert_eq!(r.len(), n, "row length vs ambient rank");
                r.into_iter().map(|x| x % ring.modulus()).collect()
            })
            .collect();
        let (rows, pivots) = howell_rows(ring, n, rows);
        Subgroup { ring, n, rows, pivots }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }
    pub fn ambient(&self) -> usize {
        self.n
    }
    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }
    pub fn pivots(&self) -> &[(usize, u32)] {
        &self.pivots
    }
    pub fn basis(&self) -> RMatrix {
        RMatrix::from_rows(self.ring, self.n, &self.rows).expect("basis shape")
    }
    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }
    pub fn is_full(&self) -> bool {
        self.pivots.len() == self.n && self.pivots.iter().all(|&(_, v)| v == 0)
    }

    /// log_p of the cardinality.
    pub fn order_log(&self) -> u32 {
        self.pivots.iter().map(|&(_, v)| self.ring.exp() - v).sum()
    }

    pub fn order(&self) -> u128 {
        (self.ring.p() as u128).pow(self.order_log())
    }

    /// Canonical representative of x + self.
    pub fn reduce(&self, x: &[u64]) -> Vec<u64> {
        let r = self.ring;
        let mut x: Vec<u64> = x.iter().map(|&a| a % r.modulus()).collect();
        for (row, &(j, v)) in self.rows.iter().zip(&self.pivots) {
            let q = x[j] / r.pow_p(v);
            if q != 0 {
                for (a, &b) in x.iter_mut().zip(row) {
                    *a = r.sub(*a, r.mul(q, b));
                }
            }
        }
        x
    }

    pub fn contains_vec(&self, x: &[u64]) -> bool {
        self.reduce(x).iter().all(|&a| a == 0)
    }

    /// True iff `other` ⊆ self.
    pub fn contains(&self, other: &Subgroup) -> bool {
        self.n == other.n && other.rows.iter().all(|r| self.contains_vec(r))
    }

    fn check(&self, other: &Subgroup) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Ambient(format!("rank {} vs {}", self.n, other.n)));
        }
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!("{} vs {}", self.ring, other.ring)));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subgroup) -> Result<Subgroup> {
        self.check(other)?;
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(Subgroup::from_rows(self.ring, self.n, rows))
    }

    pub fn intersect(&self, other: &Subgroup) -> Result<Subgroup> {
        self.check(other)?;
        let n = self.n;
        let mut rows = Vec::new();
        for r in &self.rows {
            let mut v = r.clone();
            v.extend_from_slice(r);
            rows.push(v);
        }
        for r in &other.rows {
            let mut v = r.clone();
            v.extend(std::iter::repeat(0).take(n));
            rows.push(v);
        }
        Ok(right_block_of_left_zero(self.ring, n, n, rows))
    }

    /// The subgroup p^k·self.
    pub fn scale_p(&self, k: u32) -> Subgroup {
        let c = self.ring.pow_p(k);
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&x| self.ring.mul(x, c)).collect())
            .collect();
        Subgroup::from_rows(self.ring, self.n, rows)
    }

    /// Invariant factors of self/sub as prime powers, ascending.
    pub fn quotient_invariants(&self, sub: &Subgroup) -> Result<Vec<u64>> {
        self.check(sub)?;
        if !self.contains(sub) {
            return Err(Error::Containment("quotient by a non-subgroup".into()));
        }
        let base = sub.order_log();
        let sizes: Vec<u32> = (0..=self.ring.exp())
            .map(|i| self.scale_p(i).sum(sub).expect("same ambient").order_log() - base)
            .collect();
        // sizes[i] - sizes[i+1] counts cyclic factors of order at least p^(i+1)
        let mut out = Vec::new();
        let e = self.ring.exp() as usize;
        for i in 0..e {
            let ge_i1 = sizes[i] - sizes[i + 1];
            let ge_i2 = if i + 2 <= e { sizes[i + 1] - sizes[i + 2] } else { 0 };
            for _ in 0..(ge_i1 - ge_i2) {
                out.push(self.ring.p().pow(i as u32 + 1));
            }
        }
        Ok(out)
    }

    /// Image of the subgroup under x ↦ x·m.
    pub fn map(&self, m: &RMatrix) -> Result<Subgroup> {
        if m.rows() != self.n {
            return Err(Error::Dimension(format!("map of rank {} by {} rows", self.n, m.rows())));
        }
        let rows = self.rows.iter().map(|r| m.apply(r)).collect();
        Ok(Subgroup::from_rows(self.ring, m.cols(), rows))
    }

    /// Reduction to a ring of the same prime and smaller exponent.
    pub fn reduce_to(&self, ring: Ring) -> Subgroup {
        assert!(ring.p() == self.ring.p() && ring.exp() <= self.ring.exp());
        Subgroup::from_rows(ring, self.n, self.rows.clone())
    }

    /// All elements; caller is responsible for the size.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let r = self.ring;
        let mut out = vec![vec![0u64; self.n]];
        for (row, &(_, v)) in self.rows.iter().zip(&self.pivots) {
            let count = if v == 0 { r.modulus() } else { r.pow_p(r.exp() - v) };
            let mut next = Vec::with_capacity(out.len() * count as usize);
            for base in &out {
                let mut cur = base.clone();
                for _ in 0..count {
                    next.push(cur.clone());
                    for (a, &b) in cur.iter_mut().zip(row) {
                        *a = r.add(*a, b);
                    }
                }
            }
            out = next;
        }
        out
    }

    /// Elements in a deterministic (lexicographic) order.
    pub fn sorted_elements(&self) -> Vec<Vec<u64>> {
        let mut e = self.elements();
        e.sort();
        e
    }

    /// The subgroup inside coordinates `cols` (projection).
    pub fn project(&self, cols: &[usize]) -> Subgroup {
        let rows = self.rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
        Subgroup::from_rows(self.ring, cols.len(), rows)
    }

    /// Direct product self × other in the concatenated ambient.
    pub fn product(&self, other: &Subgroup) -> Subgroup {
        let n = self.n + other.n;
        let mut rows = Vec::new();
        for r in &self.rows {
            let mut v = r.clone();
            v.extend(std::iter::repeat(0).take(other.n));
            rows.push(v);
        }
        for r in &other.rows {
            let mut v = vec![0; self.n];
            v.extend_from_slice(r);
            rows.push(v);
        }
        Subgroup::from_rows(self.ring, n, rows)
    }

    /// {y : s·y = 0 for all s in self}.
    pub fn annihilator(&self) -> Subgroup {
        kernel(&self.basis().transpose())
    }
}

/// Rows of [left | right] with left part in `lw` columns; returns the right parts of the
/// span elements whose left part vanishes.
fn right_block_of_left_zero(ring: Ring, lw: usize, rw: usize, rows: Vec<Vec<u64>>) -> Subgroup {
    let (h, piv) = howell_rows(ring, lw + rw, rows);
    let out = h
        .into_iter()
        .zip(piv)
        .filter(|(_, (j, _))| *j >= lw)
        .map(|(r, _)| r[lw..].to_vec())
        .collect();
    Subgroup::from_rows(ring, rw, out)
}

fn augmented(m: &RMatrix) -> Vec<Vec<u64>> {
    let id = RMatrix::identity(m.ring(), m.rows());
    m.hstack(&id).expect("same rows").row_vecs()
}

/// {x : x·m = 0}.
pub fn kernel(m: &RMatrix) -> Subgroup {
    if m.rows() == 0 {
        return Subgroup::zero(m.ring(), 0);
    }
    right_block_of_left_zero(m.ring(), m.cols(), m.rows(), augmented(m))
}

/// Row span of m.
pub fn image(m: &RMatrix) -> Subgroup {
    Subgroup::from_rows(m.ring(), m.cols(), m.row_vecs())
}

/// One solution of x·m = target plus the kernel, or None.
pub fn solve(m: &RMatrix, target: &[u64]) -> Result<Option<(Vec<u64>, Subgroup)>> {
    if target.len() != m.cols() {
        return Err(Error::Dimension(format!(
            "target of length {} for {} columns",
            target.len(),
            m.cols()
        )));
    }
    let ring = m.ring();
    let (c, r) = (m.cols(), m.rows());
    let (h, piv) = howell_rows(ring, c + r, augmented(m));
    let mut x: Vec<u64> = target.iter().map(|&a| a % ring.modulus()).collect();
    x.extend(std::iter::repeat(0).take(r));
    for (row, &(j, v)) in h.iter().zip(&piv) {
        if j >= c {
            break;
        }
        let q = x[j] / ring.pow_p(v);
        if q != 0 {
            for (a, &b) in x.iter_mut().zip(row) {
                *a = ring.sub(*a, ring.mul(q, b));
            }
        }
    }
    if x[..c].iter().any(|&a| a != 0) {
        return Ok(None);
    }
    let sol: Vec<u64> = x[c..].iter().map(|&a| ring.neg(a)).collect();
    let ker: Vec<Vec<u64>> = h
        .into_iter()
        .zip(piv)
        .filter(|(_, (j, _))| *j >= c)
        .map(|(row, _)| row[c..].to_vec())
        .collect();
    Ok(Some((sol, Subgroup::from_rows(ring, r, ker))))
}

/// {x : x·m ∈ s}.
pub fn preimage(m: &RMatrix, s: &Subgroup) -> Result<Subgroup> {
    if m.cols() != s.ambient() {
        return Err(Error::Ambient(format!("map into rank {} vs subgroup rank {}", m.cols(), s.ambient())));
    }
    let (c, r) = (m.cols(), m.rows());
    let mut rows = augmented(m);
    for b in s.rows() {
        let mut v = b.clone();
        v.extend(std::iter::repeat(0).take(r));
        rows.push(v);
    }
    Ok(right_block_of_left_zero(m.ring(), c, r, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn span_brute(ring: Ring, n: usize, rows: &[Vec<u64>]) -> BTreeSet<Vec<u64>> {
        let mut set = BTreeSet::new();
        set.insert(vec![0; n]);
        loop {
            let mut added = Vec::new();
            for s in &set {
                for r in rows {
                    let v: Vec<u64> = s.iter().zip(r).map(|(&a, &b)| ring.add(a, b % ring.modulus())).collect();
                    if !set.contains(&v) {
                        added.push(v);
                    }
                }
            }
            if added.is_empty() {
                return set;
            }
            set.extend(added);
        }
    }

    #[test]
    fn howell_examples() {
        let z4 = Ring::new(2, 2).unwrap();
        let a = Subgroup::from_rows(z4, 2, vec![vec![2, 0], vec![0, 2]]);
        assert_eq!(a.rows(), &[vec![2, 0], vec![0, 2]]);
        let b = Subgroup::from_rows(z4, 2, vec![vec![1, 1], vec![1, 3]]);
        let c = Subgroup::from_rows(z4, 2, vec![vec![1, 1], vec![0, 2]]);
        assert_eq!(b, c);
        let set: BTreeSet<_> = b.elements().into_iter().collect();
        assert_eq!(set, span_brute(z4, 2, &[vec![1, 1], vec![1, 3]]));
        assert!(Subgroup::from_rows(z4, 3, vec![]).is_zero());
    }

    #[test]
    fn kernel_image_solve() {
        let z4 = Ring::new(2, 2).unwrap();
        let two = RMatrix::from_rows(z4, 1, &[vec![2]]).unwrap();
        assert_eq!(kernel(&two).sorted_elements(), vec![vec![0], vec![2]]);
        assert!(image(&RMatrix::identity(z4, 3)).is_full());
        assert!(solve(&two, &[1]).unwrap().is_none());
        let (x, k) = solve(&two, &[2]).unwrap().unwrap();
        assert_eq!(two.apply(&x), vec![2]);
        assert_eq!(k.order(), 2);
    }

    #[test]
    fn subgroup_arith_examples() {
        let z4 = Ring::new(2, 2).unwrap();
        let s = Subgroup::from_rows(z4, 1, vec![vec![2]]);
        assert_eq!(s.sum(&s).unwrap(), s);
        let full = Subgroup::full(z4, 1);
        assert_eq!(full.intersect(&s).unwrap(), s);
        assert_eq!(full.quotient_invariants(&s).unwrap(), vec![2]);
        let z = Subgroup::zero(z4, 1);
        assert_eq!(full.quotient_invariants(&z).unwrap(), vec![4]);
    }

    #[test]
    fn preimage_of_zero_is_kernel() {
        let z8 = Ring::new(2, 3).unwrap();
        let m = RMatrix::from_rows(z8, 2, &[vec![2, 4], vec![6, 0], vec![1, 2]]).unwrap();
        assert_eq!(preimage(&m, &Subgroup::zero(z8, 2)).unwrap(), kernel(&m));
    }
}
