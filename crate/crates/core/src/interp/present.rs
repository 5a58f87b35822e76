use std::sync::Arc;

use super::{apply_object, InterpSpec, Probe};
use crate::algcore::{fp_pushout, FpMap, FpModule, LatticeModule, OrderDatum};
use crate::error::{Error, Result};
use crate::exactlin::{RMatrix, Ring, Subgroup};

/// Lattices A, B and δ: A → B with coker Hom(δ, M) ≅ I(M) on lattices M, together
/// with the tuple of A through which Hom(A, M) maps onto φ(M).
#[derive(Clone, Debug)]
pub struct FunctorPresentation {
    pub a: LatticeModule,
    pub b: LatticeModule,
    /// r_A × r_B matrix of δ.
    pub delta: RMatrix,
    pub tuple: Vec<Vec<u64>>,
}

fn relation(col: &[Vec<i64>], slot: impl Fn(usize) -> usize, gens: usize, ring: Ring) -> Vec<u64> {
    let d = col.first().map(|c| c.len()).unwrap_or(0);
    let mut v = vec![0u64; gens * d];
    for (r, c) in col.iter().enumerate() {
        for (i, &x) in c.iter().enumerate() {
            let k = slot(r) * d + i;
            v[k] = ring.add(v[k], ring.from_i64(x));
        }
    }
    v
}

fn unit_block(order: &OrderDatum, ring: Ring, gens: usize, k: usize) -> Vec<u64> {
    let d = order.dim();
    let mut v = vec![0u64; gens * d];
    for (i, &u) in order.unit().iter().enumerate() {
        v[k * d + i] = ring.from_i64(u);
    }
    v
}

/// Build the presentation from the pair: C realizes the equations of φ on x̄ȳ, D those of
/// φ and ψ on x̄ȳz̄, ε: C → D is the identity on generators, A and B are the
/// torsion-free quotients of C and of the pushout of C → A along ε.
pub fn presentation(spec: &InterpSpec, order: &Arc<OrderDatum>, prec: u32) -> Result<FunctorPresentation> {
    let ring = Ring::new(order.p(), prec)?;
    let d = order.dim();
    if spec.source.dim() != d {
        return Err(Error::RingMismatch("specification is not over this order".into()));
    }
    let (phi, psi) = (&spec.pair.phi, &spec.pair.psi);
    let n = spec.arity();
    let (m1, m2) = (phi.bound_arity(), psi.bound_arity());
    let gc = n + m1;
    let gd = n + m1 + m2;
    let c_rel: Vec<Vec<u64>> = phi.columns().iter().map(|col| relation(col, |r| r, gc, ring)).collect();
    let mut d_rel: Vec<Vec<u64>> = phi.columns().iter().map(|col| relation(col, |r| r, gd, ring)).collect();
    d_rel.extend(
        psi.columns()
            .iter()
            .map(|col| relation(col, |r| if r < n { r } else { n + m1 + (r - n) }, gd, ring)),
    );
    let c = FpModule::new(order.clone(), ring, gc, c_rel)?;
    let dm = FpModule::new(order.clone(), ring, gd, d_rel)?;
    let (a, pc) = c.torsionfree_quotient()?;
    let ka = pc.ring();
    let ra = a.rank();
    let (afp, _) = FpModule::from_lattice(&a.at_precision(ka.exp().min(a.prec()))?);
    let ka = afp.ring();
    let c = c.at_precision(ka.exp())?;
    let dm = dm.at_precision(ka.exp())?;
    let pc = pc.reduce_to(ka);
    let coords: Vec<Vec<u64>> = (0..gc).map(|k| pc.apply(&unit_block(order, ka, gc, k))).collect();
    let mut f_img = RMatrix::zeros(ka, gc, ra * d);
    for (k, alpha) in coords.iter().enumerate() {
        for (j, &aj) in alpha.iter().enumerate() {
            for (i, &u) in order.unit().iter().enumerate() {
                f_img.set(k, j * d + i, ka.mul(aj, ka.from_i64(u)));
            }
        }
    }
    let f = FpMap::new(c.clone(), afp, f_img)?;
    let eps_rows: Vec<Vec<u64>> = (0..gc).map(|k| unit_block(order, ka, gd, k)).collect();
    let eps = FpMap::new(c, dm, RMatrix::from_rows(ka, gd * d, &eps_rows)?)?;
    let (p, to_a, _) = fp_pushout(&f, &eps)?;
    let (b, pp) = p.torsionfree_quotient()?;
    let kb = pp.ring();
    let via = to_a.matrix().reduce_to(kb).mul(&pp)?;
    let mut delta = RMatrix::zeros(kb, ra, b.rank());
    for j in 0..ra {
        let row = via.apply(&unit_block(order, kb, ra, j));
        for (t, x) in row.into_iter().enumerate() {
            delta.set(j, t, x);
        }
    }
    let a = a.at_precision(kb.exp().min(a.prec()))?;
    let b = b.at_precision(kb.exp().min(b.prec()))?;
    let tuple = coords[..n].iter().map(|v| v.iter().map(|&x| x % kb.modulus()).collect()).collect();
    Ok(FunctorPresentation { a, b, delta, tuple })
}

#[derive(Clone, Debug)]
pub struct MemberCheck {
    pub index: usize,
    /// Hom(A, M) → I(M) is onto.
    pub onto: bool,
    /// δ∘β maps to zero for every β: B → M.
    pub kills_image: bool,
    /// log_p of |coker Hom(δ, M)| and of |I(M)|.
    pub coker_log: u32,
    pub target_log: u32,
}

impl MemberCheck {
    pub fn ok(&self) -> bool {
        self.onto && self.kills_image && self.coker_log == self.target_log
    }
}

#[derive(Clone, Debug)]
pub struct PresentationCheck {
    pub members: Vec<MemberCheck>,
    /// The comparison maps commute with I(f) for all family homomorphisms f.
    pub natural: bool,
}

impl PresentationCheck {
    pub fn ok(&self) -> bool {
        self.natural && self.members.iter().all(|m| m.ok())
    }
}

/// Compare coker Hom(δ, M) with I(M) through h ↦ [h(c̄)] on every lattice of the family.
pub fn presentation_verify(pres: &FunctorPresentation, spec: &InterpSpec, family: &[Probe]) -> Result<PresentationCheck> {
    let mut members = Vec::new();
    let mut objects = Vec::new();
    let mut a_homs = Vec::new();
    for (index, m) in family.iter().enumerate() {
        let work = match m {
            Probe::Lattice { work, .. } => *work,
            Probe::Finite(_) => return Err(Error::Invalid("presentations are checked on lattices".into())),
        };
        let ring = m.ring()?;
        let pa = Probe::Lattice { lattice: pres.a.clone(), work };
        let pb = Probe::Lattice { lattice: pres.b.clone(), work };
        let obj = apply_object(spec, m)?;
        let delta = pres.delta.reduce_to(ring);
        let hs = pa.hom_generators(m)?;
        let theta = |h: &RMatrix| -> Result<Vec<u64>> {
            let x: Vec<u64> = pres.tuple.iter().flat_map(|t| h.apply(&reduce(t, ring))).collect();
            obj.project(&x)
        };
        let mut imgs = Vec::new();
        for h in &hs {
            imgs.push(theta(h)?);
        }
        let g = obj.module.ambient();
        let tr = obj.module.ring();
        let onto = Subgroup::from_rows(tr, g, imgs).contains(obj.module.carrier());
        let mut kills = true;
        let mut js = Vec::new();
        for beta in pb.hom_generators(m)? {
            let h = delta.mul(&beta)?;
            if theta(&h)?.iter().any(|&v| v != 0) {
                kills = false;
            }
            js.push(h.data().to_vec());
        }
        let width = pres.a.rank() * m.width();
        let hsub = Subgroup::from_rows(ring, width, hs.iter().map(|h| h.data().to_vec()).collect());
        let jsub = Subgroup::from_rows(ring, width, js);
        let coker_log = hsub.order_log() - hsub.intersect(&jsub)?.order_log();
        members.push(MemberCheck { index, onto, kills_image: kills, coker_log, target_log: obj.module.order_log() });
        objects.push(obj);
        a_homs.push(hs);
    }
    let mut natural = true;
    for (i, m) in family.iter().enumerate() {
        for (j, n) in family.iter().enumerate() {
            let ring = n.ring()?;
            for f in m.hom_generators(n)? {
                let inf = objects[i].map_to(&objects[j], &f)?;
                for h in &a_homs[i] {
                    let hf = h.reduce_to(ring).mul(&f.reduce_to(ring))?;
                    let lhs = objects[j].project(&pres.tuple.iter().flat_map(|t| hf.apply(&reduce(t, ring))).collect::<Vec<_>>())?;
                    let x: Vec<u64> = pres.tuple.iter().flat_map(|t| h.apply(&reduce(t, h.ring()))).collect();
                    let rhs = inf.apply(&objects[i].project(&x)?);
                    if lhs != rhs {
                        natural = false;
                    }
                }
            }
        }
    }
    Ok(PresentationCheck { members, natural })
}

fn reduce(v: &[u64], ring: Ring) -> Vec<u64> {
    v.iter().map(|&x| x % ring.modulus()).collect()
}
