//! Interpretation functors M ↦ φ(M)/ψ(M) with target action given by pp-definable graphs.

mod present;

use std::sync::Arc;

use crate::algcore::{hom_space, lattice_homs, right_solve, FModule, FiniteAlgebra, LatticeModule, ModMap};
use crate::error::{Error, Result};
use crate::exactlin::{solve, RMatrix, Ring, Subgroup};
use crate::ppdsl::{evaluate, evaluate_lattice, ElemEnv, PpBuilder, PpFormula, PpPair, Var};

pub use present::{presentation, presentation_verify, FunctorPresentation, PresentationCheck};

/// A source object: a finite module, or a lattice read modulo p^work.
#[derive(Clone, Debug)]
pub enum Probe {
    Finite(FModule),
    Lattice { lattice: LatticeModule, work: u32 },
}

impl Probe {
    pub fn ring(&self) -> Result<Ring> {
        match self {
            Probe::Finite(m) => Ok(m.ring()),
            Probe::Lattice { lattice, work } => Ring::new(lattice.order().p(), *work),
        }
    }

    /// Number of ambient coordinates of one element.
    pub fn width(&self) -> usize {
        match self {
            Probe::Finite(m) => m.ambient(),
            Probe::Lattice { lattice, .. } => lattice.rank(),
        }
    }

    /// The underlying group (all of (Z/p^w)^r for a lattice).
    pub fn carrier(&self) -> Result<Subgroup> {
        Ok(match self {
            Probe::Finite(m) => m.carrier().clone(),
            Probe::Lattice { lattice, .. } => Subgroup::full(self.ring()?, lattice.rank()),
        })
    }

    pub fn evaluate(&self, f: &PpFormula) -> Result<Subgroup> {
        match self {
            Probe::Finite(m) => evaluate(f, m),
            Probe::Lattice { lattice, work } => evaluate_lattice(f, lattice, *work),
        }
    }

    /// Additive generators of Hom(self, other) as ambient matrices.
    pub fn hom_generators(&self, other: &Probe) -> Result<Vec<RMatrix>> {
        match (self, other) {
            (Probe::Finite(a), Probe::Finite(b)) => Ok(hom_space(a, b)?.ext),
            (Probe::Lattice { lattice: a, work: w1 }, Probe::Lattice { lattice: b, work: w2 }) => {
                let w = (*w1).min(*w2);
                let homs = lattice_homs(a, b, w)?;
                if homs.valid < w {
                    return Err(Error::Precision(format!("homs known to {} digits, {w} needed", homs.valid)));
                }
                let ring = Ring::new(a.order().p(), w)?;
                Ok(homs.basis.iter().map(|h| h.reduce_to(ring)).collect())
            }
            _ => Err(Error::RingMismatch("homomorphisms between a finite module and a lattice".into())),
        }
    }

    pub fn direct_sum(&self, other: &Probe) -> Result<Probe> {
        match (self, other) {
            (Probe::Finite(a), Probe::Finite(b)) => Ok(Probe::Finite(a.direct_sum(b)?)),
            (Probe::Lattice { lattice: a, work: w1 }, Probe::Lattice { lattice: b, work: w2 }) => {
                Ok(Probe::Lattice { lattice: a.direct_sum(b)?, work: (*w1).min(*w2) })
            }
            _ => Err(Error::RingMismatch("direct sum of a finite module and a lattice".into())),
        }
    }
}

/// The functor data: a pair φ/ψ over the source and, for every spanning element of
/// the target algebra, a 2n-ary formula whose solutions are the graph of its action.
#[derive(Clone, Debug)]
pub struct InterpSpec {
    pub source: ElemEnv,
    pub target: Arc<FiniteAlgebra>,
    pub pair: PpPair,
    pub rho: Vec<PpFormula>,
}

impl InterpSpec {
    pub fn new(source: ElemEnv, target: Arc<FiniteAlgebra>, pair: PpPair, rho: Vec<PpFormula>) -> Result<InterpSpec> {
        if rho.len() != target.dim() {
            return Err(Error::Arity(format!("{} graphs for {} spanning elements", rho.len(), target.dim())));
        }
        let n = pair.arity();
        for (i, r) in rho.iter().enumerate() {
            if r.free_arity() != 2 * n {
                return Err(Error::Arity(format!("graph {} has arity {}, expected {}", i + 1, r.free_arity(), 2 * n)));
            }
            if r.dim() != source.dim() {
                return Err(Error::RingMismatch(format!("graph {} has coefficients of the wrong length", i + 1)));
            }
        }
        Ok(InterpSpec { source, target, pair, rho })
    }

    /// The graph x̄·a = ȳ of right multiplication by a source element, for arity n.
    pub fn multiplication_graph(source: &ElemEnv, n: usize, a: &[i64]) -> PpFormula {
        let mut b = PpBuilder::new(2 * n, source.dim());
        let minus: Vec<i64> = source.unit().iter().map(|&u| -u).collect();
        for i in 0..n {
            b.equation(&[(Var::Free(i), a.to_vec()), (Var::Free(n + i), minus.clone())]);
        }
        b.finish(source)
    }

    /// x=x / x=0 with the target equal to the source algebra.
    pub fn identity(alg: &Arc<FiniteAlgebra>) -> InterpSpec {
        let env = ElemEnv::from_algebra(alg);
        let d = env.dim();
        let pair = PpPair::new(PpFormula::top(1, d), PpFormula::bottom(1, d, env.unit())).expect("same arity");
        let rho = (0..d)
            .map(|i| {
                let mut e = vec![0i64; d];
                e[i] = 1;
                InterpSpec::multiplication_graph(&env, 1, &e)
            })
            .collect();
        InterpSpec { source: env, target: alg.clone(), pair, rho }
    }

    /// M ↦ M/Mp: the pair x=x / ∃y x = y·p over the source, acting through
    /// the target's spanning elements, which must correspond to the source basis.
    pub fn reduction_mod_p(source: ElemEnv, target: Arc<FiniteAlgebra>, p: i64) -> Result<InterpSpec> {
        let d = source.dim();
        let mut b = PpBuilder::new(1, d);
        let y = b.bound();
        let pu: Vec<i64> = source.unit().iter().map(|&u| u * p).collect();
        let minus: Vec<i64> = source.unit().iter().map(|&u| -u).collect();
        b.equation(&[(Var::Free(0), minus), (y, pu)]);
        let psi = b.finish(&source);
        let pair = PpPair::new(PpFormula::top(1, d), psi)?;
        let rho = (0..d)
            .map(|i| {
                let mut e = vec![0i64; d];
                e[i] = 1;
                InterpSpec::multiplication_graph(&source, 1, &e)
            })
            .collect();
        InterpSpec::new(source, target, pair, rho)
    }

    pub fn arity(&self) -> usize {
        self.pair.arity()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailureKind {
    /// ψ(M) ⊄ φ(M).
    PairOrder,
    /// Some x in φ(M) has no image.
    NotTotal,
    /// Some x has two images differing outside ψ(M).
    NotSingleValued,
    /// ψ(M) is not mapped into ψ(M).
    PsiNotPreserved,
    UnitLaw,
    ProductLaw(usize, usize),
    RelationLaw,
    /// φ(M)/ψ(M) is not killed by the characteristic of the target.
    Exponent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub kind: FailureKind,
    /// Index of the offending graph, if one is responsible.
    pub generator: Option<usize>,
    /// A tuple of M exhibiting the failure.
    pub witness: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct MemberReport {
    pub index: usize,
    pub failures: Vec<Failure>,
}

impl MemberReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub members: Vec<MemberReport>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.members.iter().all(|m| m.ok())
    }
}

/// I(M) together with the data needed to push tuples of M into it.
#[derive(Clone, Debug)]
pub struct InterpObject {
    pub module: FModule,
    phi: Subgroup,
    psi: Subgroup,
    q: RMatrix,
    src_ring: Ring,
}

impl InterpObject {
    pub fn phi(&self) -> &Subgroup {
        &self.phi
    }
    pub fn psi(&self) -> &Subgroup {
        &self.psi
    }

    /// The class of a tuple of φ(M) in I(M).
    pub fn project(&self, x: &[u64]) -> Result<Vec<u64>> {
        if !self.phi.contains_vec(x) {
            return Err(Error::Containment("tuple outside φ(M)".into()));
        }
        Ok(descend_vec(&self.q.apply(x), self.src_ring, self.module.ring()))
    }

    /// I(f) for f given by its ambient matrix.
    pub fn map_to(&self, other: &InterpObject, f: &RMatrix) -> Result<ModMap> {
        let n = if f.rows() == 0 { 0 } else { self.phi.ambient() / f.rows() };
        let blocks: Vec<&RMatrix> = (0..n).map(|_| f).collect();
        let fn_ = if blocks.is_empty() { RMatrix::zeros(f.ring(), 0, 0) } else { RMatrix::block_diag(&blocks) };
        let tr = other.module.ring();
        let mut us = Vec::new();
        let mut ws = Vec::new();
        for x in self.phi.rows() {
            let z = fn_.apply(x);
            if !other.phi.contains_vec(&z) {
                return Err(Error::Validation("homomorphism does not preserve φ".into()));
            }
            us.push(self.project(x)?);
            ws.push(other.project(&z)?);
        }
        let (gs, gt) = (self.module.ambient(), other.module.ambient());
        let y = if us.is_empty() || gs == 0 || gt == 0 {
            RMatrix::zeros(tr, gs, gt)
        } else {
            right_solve(&RMatrix::from_rows(tr, gs, &us)?, &RMatrix::from_rows(tr, gt, &ws)?)?
        };
        ModMap::new(self.module.clone(), other.module.clone(), y)
    }
}

fn descend_vec(v: &[u64], from: Ring, to: Ring) -> Vec<u64> {
    if from.exp() >= to.exp() {
        let s = from.pow_p(from.exp() - to.exp());
        v.iter().map(|&x| (x / s) % to.modulus()).collect()
    } else {
        let s = to.pow_p(to.exp() - from.exp());
        v.iter().map(|&x| to.mul(x, s)).collect()
    }
}

/// Reinterpret a matrix over Z/p^a as one over Z/p^b (reduce or lift representatives).
fn retype(m: &RMatrix, to: Ring) -> RMatrix {
    if m.ring().exp() >= to.exp() {
        m.reduce_to(to)
    } else {
        m.lift_to(to)
    }
}

struct Analysis {
    failures: Vec<Failure>,
    object: Option<InterpObject>,
}

fn analyze(spec: &InterpSpec, probe: &Probe) -> Result<Analysis> {
    let ring = probe.ring()?;
    let n = spec.arity();
    let g = probe.width();
    let phi = probe.evaluate(&spec.pair.phi)?;
    let psi_raw = probe.evaluate(&spec.pair.psi)?;
    let mut failures = Vec::new();
    if let Some(w) = psi_raw.rows().iter().find(|r| !phi.contains_vec(r)) {
        failures.push(Failure { kind: FailureKind::PairOrder, generator: None, witness: w.clone() });
    }
    let psi = psi_raw.intersect(&phi)?;
    let ng = n * g;
    let phi2 = phi.product(&phi);
    let mut images: Vec<Vec<Vec<u64>>> = Vec::new();
    for (s, rho) in spec.rho.iter().enumerate() {
        let graph = probe.evaluate(rho)?.intersect(&phi2)?;
        let first: Vec<usize> = (0..ng).collect();
        let second: Vec<usize> = (ng..2 * ng).collect();
        let dom = graph.project(&first);
        if let Some(w) = phi.rows().iter().find(|r| !dom.contains_vec(r)) {
            failures.push(Failure { kind: FailureKind::NotTotal, generator: Some(s), witness: w.clone() });
            continue;
        }
        let zero_first = Subgroup::zero(ring, ng).product(&Subgroup::full(ring, ng));
        let ambiguity = graph.intersect(&zero_first)?.project(&second);
        if let Some(w) = ambiguity.rows().iter().find(|r| !psi.contains_vec(r)) {
            let mut t = vec![0u64; ng];
            t.extend_from_slice(w);
            failures.push(Failure { kind: FailureKind::NotSingleValued, generator: Some(s), witness: t });
            continue;
        }
        let into_psi = graph.intersect(&Subgroup::full(ring, ng).product(&psi))?.project(&first);
        if let Some(w) = psi.rows().iter().find(|r| !into_psi.contains_vec(r)) {
            failures.push(Failure { kind: FailureKind::PsiNotPreserved, generator: Some(s), witness: w.clone() });
            continue;
        }
        let gb = graph.basis();
        let left = gb.submatrix(0..gb.rows(), 0..ng);
        let right = gb.submatrix(0..gb.rows(), ng..2 * ng);
        let mut ys = Vec::new();
        for x in phi.rows() {
            let (c, _) = solve(&left, x)?.expect("x lies in the domain");
            ys.push(right.apply(&c));
        }
        images.push(ys);
    }
    if !failures.is_empty() {
        return Ok(Analysis { failures, object: None });
    }
    let q = psi.annihilator().basis().transpose();
    let h = q.cols();
    let us: Vec<Vec<u64>> = phi.rows().iter().map(|x| q.apply(x)).collect();
    let carrier = Subgroup::from_rows(ring, h, us.clone());
    let mut actions = Vec::with_capacity(images.len());
    for ys in &images {
        let a = if us.is_empty() || h == 0 {
            RMatrix::zeros(ring, h, h)
        } else {
            let t: Vec<Vec<u64>> = ys.iter().map(|y| q.apply(y)).collect();
            right_solve(&RMatrix::from_rows(ring, h, &us)?, &RMatrix::from_rows(ring, h, &t)?)?
        };
        actions.push(a);
    }
    let target = &spec.target;
    let tr = target.ring();
    let lift = |v: &[u64]| -> Vec<u64> { v.iter().map(|&x| x % ring.modulus()).collect() };
    let act = |x: &[u64], a: &[u64]| -> Vec<u64> {
        let mut out = vec![0u64; h];
        for (i, &c) in lift(a).iter().enumerate() {
            if c != 0 {
                for (o, v) in out.iter_mut().zip(actions[i].apply(x)) {
                    *o = ring.add(*o, ring.mul(c, v));
                }
            }
        }
        out
    };
    // laws are checked on the generators x_r of φ(M), reported by their tuples
    let killed = if ring.exp() > tr.exp() { carrier.scale_p(tr.exp()).is_zero() } else { true };
    if !killed {
        let w = phi.rows().iter().zip(&us).find(|(_, u)| !ring_kills(ring, tr.exp(), u)).map(|(x, _)| x.clone()).unwrap_or_default();
        failures.push(Failure { kind: FailureKind::Exponent, generator: None, witness: w });
    }
    for (x, u) in phi.rows().iter().zip(&us) {
        if act(u, target.unit()) != *u {
            failures.push(Failure { kind: FailureKind::UnitLaw, generator: None, witness: x.clone() });
            break;
        }
    }
    'prod: for i in 0..target.dim() {
        for j in 0..target.dim() {
            for (x, u) in phi.rows().iter().zip(&us) {
                let lhs = actions[j].apply(&actions[i].apply(u));
                if lhs != act(u, &target.consts()[i][j]) {
                    failures.push(Failure { kind: FailureKind::ProductLaw(i, j), generator: None, witness: x.clone() });
                    break 'prod;
                }
            }
        }
    }
    'rel: for r in target.relations().rows() {
        for (x, u) in phi.rows().iter().zip(&us) {
            if act(u, r).iter().any(|&v| v != 0) {
                failures.push(Failure { kind: FailureKind::RelationLaw, generator: None, witness: x.clone() });
                break 'rel;
            }
        }
    }
    if !failures.is_empty() {
        return Ok(Analysis { failures, object: None });
    }
    let carrier_t = Subgroup::from_rows(tr, h, carrier.rows().iter().map(|r| descend_vec(r, ring, tr)).collect());
    let actions_t = actions.iter().map(|a| retype(a, tr)).collect();
    let module = FModule::new(target.clone(), carrier_t, actions_t)?;
    Ok(Analysis { failures, object: Some(InterpObject { module, phi, psi, q, src_ring: ring }) })
}

fn ring_kills(ring: Ring, k: u32, u: &[u64]) -> bool {
    let pk = ring.pow_p(k);
    u.iter().all(|&x| ring.mul(x, pk) == 0)
}

/// Check the graphs and target laws on every family member.
pub fn validate(spec: &InterpSpec, family: &[Probe]) -> Result<ValidationReport> {
    let results = crate::par::map(family, |p| analyze(spec, p).map(|a| a.failures));
    let mut members = Vec::with_capacity(family.len());
    for (index, r) in results.into_iter().enumerate() {
        members.push(MemberReport { index, failures: r? });
    }
    Ok(ValidationReport { members })
}

/// I(M) as a module over the target algebra.
pub fn apply_object(spec: &InterpSpec, m: &Probe) -> Result<InterpObject> {
    let a = analyze(spec, m)?;
    match a.object {
        Some(o) => Ok(o),
        None => Err(Error::Validation(format!("specification fails on this object: {:?}", a.failures[0].kind))),
    }
}

/// I(f) for f: M → N given by its ambient matrix.
pub fn apply_morphism(spec: &InterpSpec, m: &Probe, n: &Probe, f: &RMatrix) -> Result<ModMap> {
    apply_object(spec, m)?.map_to(&apply_object(spec, n)?, f)
}

/// M lies in the kernel of I iff φ(M) = ψ(M).
pub fn kernel_member(spec: &InterpSpec, m: &Probe) -> Result<bool> {
    let phi = m.evaluate(&spec.pair.phi)?;
    let psi = m.evaluate(&spec.pair.psi)?;
    Ok(psi.contains(&phi))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairStatus {
    Surjective,
    /// A homomorphism of images (by its key in Hom_S) with no preimage.
    NotSurjective { witness: Vec<u64> },
}

#[derive(Clone, Debug)]
pub struct PairReport {
    pub source: usize,
    pub target: usize,
    pub status: PairStatus,
    /// log_p |Hom_S(IL, IN)| and log_p of the image of Hom_R(L, N).
    pub hom_log: u32,
    pub image_log: u32,
}

#[derive(Clone, Debug)]
pub struct FullnessReport {
    pub pairs: Vec<PairReport>,
}

impl FullnessReport {
    pub fn full(&self) -> bool {
        self.pairs.iter().all(|p| p.status == PairStatus::Surjective)
    }
}

/// Whether Hom(L, N) → Hom_S(IL, IN) is onto for all L in `xs`, N in `targets`.
/// The image is a subgroup generated by the images of additive generators, so it is
/// compared with Hom_S exactly.
pub fn fullness_check(spec: &InterpSpec, xs: &[Probe], targets: &[Probe]) -> Result<FullnessReport> {
    let objs_x: Vec<InterpObject> = xs.iter().map(|p| apply_object(spec, p)).collect::<Result<_>>()?;
    let objs_t: Vec<InterpObject> = targets.iter().map(|p| apply_object(spec, p)).collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (0..xs.len()).flat_map(|i| (0..targets.len()).map(move |j| (i, j))).collect();
    let results = crate::par::map(&pairs, |&(i, j)| -> Result<PairReport> {
        let (il, inn) = (&objs_x[i], &objs_t[j]);
        let hs = hom_space(&il.module, &inn.module)?;
        let mut keys = Vec::new();
        for f in xs[i].hom_generators(&targets[j])? {
            keys.push(hs.key(&il.map_to(inn, &f)?.x));
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
