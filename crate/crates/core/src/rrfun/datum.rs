use std::sync::Arc;

use crate::algcore::{inverse_scaled, Budget, FiniteAlgebra, OrderDatum};
use crate::error::{Error, Result};
use crate::exactlin::{RMatrix, Ring, Subgroup};

/// Orders Λ ⊆ Γ over Z_p, a Γ-ideal I ⊆ rad Λ, and exponents with p^n ∈ I, p^mΓ ⊆ Λ.
#[derive(Clone, Debug)]
pub struct BaeckstroemDatum {
    lambda: Arc<OrderDatum>,
    gamma: Arc<OrderDatum>,
    /// Row i: the i-th basis element of Λ in Γ-coordinates.
    embed: Vec<Vec<i64>>,
    /// Z_p-generators of I in Λ-coordinates.
    ideal: Vec<Vec<i64>>,
    n: u32,
    m: u32,
    prec: u32,
    /// Row j: p^m·γ_j in Λ-coordinates, modulo p^prec.
    conductor: RMatrix,
    baeckstroem: bool,
}

fn span(ring: Ring, d: usize, rows: &[Vec<i64>]) -> Subgroup {
    Subgroup::from_rows(ring, d, rows.iter().map(|r| r.iter().map(|&x| ring.from_i64(x)).collect()).collect())
}

fn vec_mod(ring: Ring, v: &[i64]) -> Vec<u64> {
    v.iter().map(|&x| ring.from_i64(x)).collect()
}

fn row_times(v: &[i64], m: &[Vec<i64>]) -> Vec<i64> {
    let mut out = vec![0i64; m.first().map_or(0, |r| r.len())];
    for (c, row) in v.iter().zip(m) {
        for (o, x) in out.iter_mut().zip(row) {
            *o += c * x;
        }
    }
    out
}

impl BaeckstroemDatum {
    /// I defaults to rad Λ when `ideal` is None.
    pub fn new(
        lambda: Arc<OrderDatum>,
        gamma: Arc<OrderDatum>,
        embed: Vec<Vec<i64>>,
        ideal: Option<Vec<Vec<i64>>>,
        n: u32,
        m: u32,
        prec: u32,
    ) -> Result<BaeckstroemDatum> {
        let p = lambda.p();
        if gamma.p() != p {
            return Err(Error::RingMismatch("Λ and Γ over different primes".into()));
        }
        let (dl, dg) = (lambda.dim(), gamma.dim());
        if dl != dg {
            return Err(Error::Dimension(format!("Λ has rank {dl}, Γ has rank {dg}")));
        }
        if embed.len() != dl || embed.iter().any(|r| r.len() != dg) {
            return Err(Error::Dimension("embedding must be rank(Λ) × rank(Γ)".into()));
        }
        if prec <= 2 * (n + m) + 2 {
            return Err(Error::Precision(format!("precision {prec} too small for n = {n}, m = {m}")));
        }
        let budget = Budget::default();
        let ideal = match ideal {
            Some(i) => i,
            None => lambda.radical(&budget)?,
        };
        if ideal.iter().any(|r| r.len() != dl) {
            return Err(Error::Dimension("ideal generators must be in Λ-coordinates".into()));
        }
        // multiplicativity of the embedding
        let e = |i: usize| {
            let mut v = vec![0i64; dl];
            v[i] = 1;
            v
        };
        if row_times(lambda.unit(), &embed) != gamma.unit() {
            return Err(Error::Invalid("embedding does not preserve the unit".into()));
        }
        for i in 0..dl {
            for j in 0..dl {
                let lhs = row_times(&lambda.mul(&e(i), &e(j)), &embed);
                if lhs != gamma.mul(&embed[i], &embed[j]) {
                    return Err(Error::Invalid(format!("embedding is not multiplicative on basis pair ({}, {})", i + 1, j + 1)));
                }
            }
        }
        let ring = Ring::new(p, prec)?;
        let em = RMatrix::from_i64_rows(ring, dg, &embed)?;
        let (inv, e_inv) = inverse_scaled(&em)?;
        if e_inv > m {
            return Err(Error::Invalid(format!("p^{m}Γ is not contained in Λ")));
        }
        let conductor = inv.scale(inv.ring().pow_p(m - e_inv));
        let check = conductor.mul(&em.reduce_to(conductor.ring()))?;
        if check != RMatrix::scalar(conductor.ring(), dg, conductor.ring().pow_p(m)) {
            return Err(Error::Invalid("conductor computation failed".into()));
        }
        let lring = conductor.ring();
        let i_lam = span(lring, dl, &ideal);
        let pn: Vec<u64> = vec_mod(lring, lambda.unit()).into_iter().map(|x| lring.mul(x, lring.pow_p(n))).collect();
        if !i_lam.contains_vec(&pn) {
            return Err(Error::Invalid(format!("p^{n} is not in I")));
        }
        let rad = span(lring, dl, &lambda.radical(&budget)?);
        if !rad.contains(&i_lam) {
            return Err(Error::Invalid("I is not contained in rad Λ".into()));
        }
        let ideal_g: Vec<Vec<i64>> = ideal.iter().map(|r| row_times(r, &embed)).collect();
        let i_gam = span(lring, dg, &ideal_g);
        for x in &ideal_g {
            for j in 0..dg {
                let mut g = vec![0i64; dg];
                g[j] = 1;
                for y in [gamma.mul(x, &g), gamma.mul(&g, x)] {
                    if !i_gam.contains_vec(&vec_mod(lring, &y)) {
                        return Err(Error::Invalid("I is not an ideal of Γ".into()));
                    }
                }
            }
        }
        let rad_g = span(lring, dg, &gamma.radical(&budget)?);
        let baeckstroem = i_lam == rad && i_gam == rad_g && !span(lring, dg, &embed).is_full();
        Ok(BaeckstroemDatum { lambda, gamma, embed, ideal, n, m, prec, conductor, baeckstroem })
    }

    pub fn lambda(&self) -> &Arc<OrderDatum> {
        &self.lambda
    }
    pub fn gamma(&self) -> &Arc<OrderDatum> {
        &self.gamma
    }
    pub fn embed(&self) -> &[Vec<i64>] {
        &self.embed
    }
    pub fn ideal(&self) -> &[Vec<i64>] {
        &self.ideal
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn p(&self) -> u64 {
        self.lambda.p()
    }
    pub fn precision(&self) -> u32 {
        self.prec
    }
    /// Whether I = rad Λ = rad Γ with Λ ≠ Γ.
    pub fn is_baeckstroem(&self) -> bool {
        self.baeckstroem
    }

    /// Row j: p^m·γ_j in Λ-coordinates, as signed representatives.
    pub fn conductor_rows(&self) -> Vec<Vec<i64>> {
        self.conductor.signed_rows()
    }

    /// Generators of I in Γ-coordinates.
    pub fn ideal_in_gamma(&self) -> Vec<Vec<i64>> {
        self.ideal.iter().map(|r| row_times(r, &self.embed)).collect()
    }

    /// p^m·g in Λ-coordinates for g given in Γ-coordinates.
    pub fn scaled_to_lambda(&self, g: &[i64]) -> Vec<i64> {
        let ring = self.conductor.ring();
        let v: Vec<u64> = vec_mod(ring, g);
        self.conductor.apply(&v).into_iter().map(|x| ring.to_signed(x)).collect()
    }

    /// Λ/I, Γ/I and the triangular matrix algebra D built from them.
    pub fn build_d(&self) -> Result<DAlgebra> {
        let lam_n = self.lambda.algebra_mod(self.n)?;
        let ring = lam_n.ring();
        let lam_i = lam_n.quotient(&span(ring, self.lambda.dim(), &self.ideal))?;
        let (lam, _, lam_kept) = lam_i.minimize_indexed();
        let gam_n = self.gamma.algebra_mod(self.n)?;
        let gam_i = gam_n.quotient(&span(ring, self.gamma.dim(), &self.ideal_in_gamma()))?;
        let (gam, gw, gam_kept) = gam_i.minimize_indexed();
        let iota: Vec<Vec<u64>> = lam_kept.iter().map(|&k| gw.apply(&vec_mod(ring, &self.embed[k]))).collect();
        let (d1, d2) = (lam.dim(), gam.dim());
        let dd = d1 + 2 * d2;
        let zero = vec![0u64; dd];
        let place = |part: usize, v: &[u64]| -> Vec<u64> {
            let mut out = zero.clone();
            let off = match part {
                0 => 0,
                1 => d1,
                _ => d1 + d2,
            };
            out[off..off + v.len()].copy_from_slice(v);
            out
        };
        let part_of = |i: usize| -> (usize, usize) {
            if i < d1 {
                (0, i)
            } else if i < d1 + d2 {
                (1, i - d1)
            } else {
                (2, i - d1 - d2)
            }
        };
        let mut consts = vec![vec![zero.clone(); dd]; dd];
        for (i, row) in consts.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                *c = match (part_of(i), part_of(j)) {
                    ((0, a), (0, b)) => place(0, &lam.consts()[a][b]),
                    ((0, a), (1, b)) => place(1, &gam.mul(&iota[a], &gam.basis_elem(b))),
                    ((1, a), (2, b)) => place(1, &gam.consts()[a][b]),
                    ((2, a), (2, b)) => place(2, &gam.consts()[a][b]),
                    _ => zero.clone(),
                };
            }
        }
        let mut unit = place(0, lam.unit());
        for (o, v) in unit.iter_mut().zip(place(2, gam.unit())) {
            *o = ring.add(*o, v);
        }
        let mut rel = Vec::new();
        for r in lam.relations().rows() {
            rel.push(place(0, r));
        }
        for r in gam.relations().rows() {
            rel.push(place(1, r));
            rel.push(place(2, r));
        }
        let d = FiniteAlgebra::new(ring, consts, unit, Subgroup::from_rows(ring, dd, rel))?;
        Ok(DAlgebra {
            lam: Arc::new(lam),
            gam: Arc::new(gam),
            iota,
            lam_kept,
            gam_kept,
            algebra: Arc::new(d),
        })
    }
}

/// D = [[Λ/I, Γ/I], [0, Γ/I]] with its diagonal pieces. Spanning elements of D are
/// those of Λ/I, then Γ/I in the corner, then Γ/I on the diagonal.
#[derive(Clone, Debug)]
pub struct DAlgebra {
    pub lam: Arc<FiniteAlgebra>,
    pub gam: Arc<FiniteAlgebra>,
    /// Images of the spanning elements of Λ/I in Γ/I.
    pub iota: Vec<Vec<u64>>,
    /// Λ-basis indices behind the spanning elements of Λ/I.
    pub lam_kept: Vec<usize>,
    /// Γ-basis indices behind the spanning elements of Γ/I.
    pub gam_kept: Vec<usize>,
    pub algebra: Arc<FiniteAlgebra>,
}

impl DAlgebra {
    pub fn ring(&self) -> Ring {
        self.algebra.ring()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.lam.dim(), self.gam.dim())
    }

    /// The element [[a, b], [0, c]].
    pub fn element(&self, a: &[u64], b: &[u64], c: &[u64]) -> Vec<u64> {
        let mut v = a.to_vec();
        v.extend_from_slice(b);
        v.extend_from_slice(c);
        v
    }

    /// ι(a) for a ∈ Λ/I.
    pub fn iota_of(&self, a: &[u64]) -> Vec<u64> {
        let ring = self.ring();
        let mut out = vec![0u64; self.gam.dim()];
        for (&c, row) in a.iter().zip(&self.iota) {
            for (o, &x) in out.iter_mut().zip(row) {
                *o = ring.add(*o, ring.mul(c, x));
            }
        }
        out
    }

    pub fn e11(&self) -> Vec<u64> {
        let (_, d2) = self.dims();
        self.element(self.lam.unit(), &vec![0; d2], &vec![0; d2])
    }

    pub fn e22(&self) -> Vec<u64> {
        let (d1, d2) = self.dims();
        self.element(&vec![0; d1], &vec![0; d2], self.gam.unit())
    }

    pub fn e12(&self) -> Vec<u64> {
        let (d1, d2) = self.dims();
        self.element(&vec![0; d1], self.gam.unit(), &vec![0; d2])
    }
}
