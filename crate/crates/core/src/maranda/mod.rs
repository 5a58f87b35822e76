//! Reduction of lattices modulo p^k, the exponent k₀ of a family, and the checks
//! that reductions above k₀ detect isomorphism, indecomposability and endolength.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::algcore::{
    annihilator_exponent, end_submodules, endolength, is_indecomposable, iso_test, lattice_is_indecomposable,
    lattice_iso, Budget, FModule, IsoOutcome, LatticeModule,
};
use crate::error::{Error, Result};
use crate::exactlin::Subgroup;
use crate::latdim::FiniteLattice;
use crate::ppdsl::{evaluate, pptype_generator, ElemEnv, PointedModule};

/// Largest reduction accepted by [`interval_lattice`].
pub const INTERVAL_LIMIT: u128 = 1 << 16;

/// Least k with p^k·Ext¹(L, M) = 0 for all L, M in the family. Relative to the
/// family only.
pub fn k0_family(family: &[LatticeModule], work: u32) -> Result<u32> {
    let pairs: Vec<(usize, usize)> = (0..family.len()).flat_map(|i| (0..family.len()).map(move |j| (i, j))).collect();
    let exps = crate::par::map(&pairs, |&(i, j)| annihilator_exponent(&family[i], &family[j], work));
    exps.into_iter().try_fold(0, |acc, e| Ok(acc.max(e?)))
}

/// Outcome of comparing two lattices through their reductions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoCheck {
    pub k: u32,
    pub reduced_iso: bool,
    pub lattice_iso: bool,
    /// k ≥ k₀ + 1 for the supplied k₀.
    pub in_hypotheses: bool,
}

impl IsoCheck {
    /// Disagreement inside the hypotheses of the reduction theorem.
    pub fn alarm(&self) -> bool {
        self.in_hypotheses && self.reduced_iso != self.lattice_iso
    }
}

fn reduce_pair(m: &LatticeModule, n: &LatticeModule, k: u32) -> Result<(FModule, FModule)> {
    let alg = m.order().algebra_mod(k)?;
    Ok((m.reduce_over(&alg)?, n.reduce_over(&alg)?))
}

fn decide(o: IsoOutcome) -> Result<bool> {
    match o {
        IsoOutcome::Iso(_) => Ok(true),
        IsoOutcome::NotIso => Ok(false),
        IsoOutcome::Unknown => Err(Error::Budget("isomorphism search".into())),
    }
}

/// M/Mp^k ≅ N/Np^k against M ≅ N, each decided on its own.
pub fn maranda_iso_check(
    m: &LatticeModule,
    n: &LatticeModule,
    k: u32,
    k0: u32,
    work: u32,
    budget: &Budget,
) -> Result<IsoCheck> {
    if m.order() != n.order() {
        return Err(Error::RingMismatch("lattices over different orders".into()));
    }
    if k > m.prec().min(n.prec()) {
        return Err(Error::Precision(format!("k = {k} exceeds the lattice precision")));
    }
    let reduced_iso = if k == 0 {
        true
    } else {
        let (a, b) = reduce_pair(m, n, k)?;
        decide(iso_test(&a, &b, budget)?)?
    };
    let prec = m.prec().min(n.prec());
    let lat = lattice_iso(&m.at_precision(prec)?, &n.at_precision(prec)?, work, budget)?;
    Ok(IsoCheck { k, reduced_iso, lattice_iso: lat, in_hypotheses: k > k0 })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransferStatus {
    /// M and its reduction are both indecomposable.
    Confirmed,
    /// M is decomposable, so nothing is claimed.
    Inapplicable,
    /// k ≤ k₀.
    OutsideHypotheses,
    /// M is indecomposable but its reduction is not.
    Alarm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndecTransfer {
    pub k: u32,
    pub lattice_indecomposable: bool,
    pub reduced_indecomposable: bool,
    pub status: TransferStatus,
}

pub fn indec_transfer_check(m: &LatticeModule, k: u32, k0: u32, work: u32, budget: &Budget) -> Result<IndecTransfer> {
    if k == 0 {
        return Err(Error::Invalid("reduction level must be positive".into()));
    }
    let lat = lattice_is_indecomposable(m, work, budget)?;
    let red = is_indecomposable(&m.reduce_mod(k)?, budget)?;
    let status = if k <= k0 {
        TransferStatus::OutsideHypotheses
    } else if !lat {
        TransferStatus::Inapplicable
    } else if red {
        TransferStatus::Confirmed
    } else {
        TransferStatus::Alarm
    };
    Ok(IndecTransfer { k, lattice_indecomposable: lat, reduced_indecomposable: red, status })
}

/// endolength(M/Mp^k)/k, cross-checked against level k + 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pseudoendolength {
    pub k: u32,
    pub endolength_k: usize,
    pub endolength_next: usize,
    /// Both quotients are integers and agree.
    pub integral: bool,
}

impl Pseudoendolength {
    /// The value when the cross-check passes.
    pub fn value(&self) -> Option<usize> {
        self.integral.then_some(self.endolength_k / self.k as usize)
    }

    /// endolength_k / k as a reduced fraction.
    pub fn ratio(&self) -> (usize, usize) {
        let (a, b) = (self.endolength_k, self.k as usize);
        let g = gcd(a, b).max(1);
        (a / g, b / g)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn pseudoendolength(m: &LatticeModule, k: u32, budget: &Budget) -> Result<Pseudoendolength> {
    if k == 0 {
        return Err(Error::Invalid("reduction level must be positive".into()));
    }
    if k + 1 > m.prec() {
        return Err(Error::Precision(format!("the cross-check at level {} exceeds the lattice precision", k + 1)));
    }
    let e0 = endolength(&m.reduce_mod(k)?, budget)?;
    let e1 = endolength(&m.reduce_mod(k + 1)?, budget)?;
    let (k0, k1) = (k as usize, k as usize + 1);
    let integral = e0 % k0 == 0 && e1 % k1 == 0 && e0 / k0 == e1 / k1;
    Ok(Pseudoendolength { k, endolength_k: e0, endolength_next: e1, integral })
}

/// Additivity of pseudoendolength over M ⊕ N: (value on the sum, sum of values).
pub fn additivity_check(
    m: &LatticeModule,
    n: &LatticeModule,
    k: u32,
    budget: &Budget,
) -> Result<(Pseudoendolength, Pseudoendolength, Pseudoendolength)> {
    let s = pseudoendolength(&m.direct_sum(n)?, k, budget)?;
    Ok((s, pseudoendolength(m, k, budget)?, pseudoendolength(n, k, budget)?))
}

fn check_interval_size(x: &FModule) -> Result<()> {
    match (x.ring().p() as u128).checked_pow(x.order_log()) {
        Some(s) if s <= INTERVAL_LIMIT => Ok(()),
        _ => Err(Error::Budget(format!("M/Mp^k has {}^{} elements", x.ring().p(), x.order_log()))),
    }
}

fn lattice_of(subs: &[Subgroup]) -> Result<FiniteLattice> {
    let leq: Vec<Vec<bool>> = subs.iter().map(|a| subs.iter().map(|b| b.contains(a)).collect()).collect();
    let mut l = FiniteLattice::from_leq(leq)?;
    l.labels = subs.iter().map(|s| format!("{:?}", s.rows())).collect();
    Ok(l)
}

/// The End(X)-invariant subgroups of X = M/Mp^k that contain pX, ordered by
/// inclusion, together with the subgroups themselves.
pub fn interval_subgroups(m: &LatticeModule, k: u32, budget: &Budget) -> Result<Vec<Subgroup>> {
    let x = m.reduce_mod(k)?;
    check_interval_size(&x)?;
    let px = x.carrier().scale_p(1);
    Ok(end_submodules(&x, budget)?.into_iter().filter(|s| s.contains(&px)).collect())
}

pub fn interval_lattice(m: &LatticeModule, k: u32, budget: &Budget) -> Result<FiniteLattice> {
    lattice_of(&interval_subgroups(m, k, budget)?)
}

/// The same interval computed from pp-definable subgroups: every pp-definable
/// subgroup of a finite module is the sum of the solution sets of the pp-types
/// of its elements.
pub fn pp_interval_subgroups(m: &LatticeModule, k: u32) -> Result<Vec<Subgroup>> {
    let x = m.reduce_mod(k)?;
    check_interval_size(&x)?;
    let env = ElemEnv::from_algebra(x.algebra());
    let mut cyclic = Vec::new();
    for a in x.carrier().sorted_elements() {
        let phi = pptype_generator(&PointedModule::new(x.clone(), vec![a])?, &env)?;
        cyclic.push(evaluate(&phi, &x)?);
    }
    cyclic.sort_by(|a, b| (a.order_log(), a.rows()).cmp(&(b.order_log(), b.rows())));
    cyclic.dedup();
    let zero = Subgroup::zero(x.ring(), x.ambient());
    let mut seen: HashSet<Subgroup> = HashSet::from([zero.clone()]);
    let mut frontier = vec![zero];
    while let Some(s) = frontier.pop() {
        for c in &cyclic {
            let t = s.sum(c)?;
            if seen.insert(t.clone()) {
                frontier.push(t);
            }
        }
    }
    let px = x.carrier().scale_p(1);
    let mut out: Vec<Subgroup> = seen.into_iter().filter(|s| s.contains(&px)).collect();
    out.sort_by(|a, b| (a.order_log(), a.rows()).cmp(&(b.order_log(), b.rows())));
    Ok(out)
}

/// Both routes to the interval agree.
pub fn interval_routes_agree(m: &LatticeModule, k: u32, budget: &Budget) -> Result<bool> {
    Ok(interval_subgroups(m, k, budget)? == pp_interval_subgroups(m, k)?)
}

/// Maranda checks over a named family at levels k₀ and k₀ + 1.
#[derive(Clone, Debug)]
pub struct MarandaReport {
    pub names: Vec<String>,
    pub k0: u32,
    /// iso[level][i][j] for levels k₀ and k₀ + 1.
    pub iso: [Vec<Vec<IsoCheck>>; 2],
    pub indec: Vec<IndecTransfer>,
}

impl MarandaReport {
    pub fn build(family: &[(String, LatticeModule)], work: u32, budget: &Budget) -> Result<MarandaReport> {
        let lats: Vec<LatticeModule> = family.iter().map(|(_, l)| l.clone()).collect();
        let k0 = k0_family(&lats, work)?;
        let table = |k: u32| -> Result<Vec<Vec<IsoCheck>>> {
            let pairs: Vec<(usize, usize)> =
                (0..lats.len()).flat_map(|i| (0..lats.len()).map(move |j| (i, j))).collect();
            let flat = crate::par::map(&pairs, |&(i, j)| maranda_iso_check(&lats[i], &lats[j], k, k0, work, budget));
            let flat: Vec<IsoCheck> = flat.into_iter().collect::<Result<_>>()?;
            Ok(flat.chunks(lats.len().max(1)).map(|c| c.to_vec()).collect())
        };
        let iso = [table(k0)?, table(k0 + 1)?];
        let indec = lats
            .iter()
            .map(|l| indec_transfer_check(l, k0 + 1, k0, work, budget))
            .collect::<Result<_>>()?;
        Ok(MarandaReport { names: family.iter().map(|(n, _)| n.clone()).collect(), k0, iso, indec })
    }

    pub fn alarms(&self) -> usize {
        let iso = self.iso.iter().flatten().flatten().filter(|c| c.alarm()).count();
        iso + self.indec.iter().filter(|t| t.status == TransferStatus::Alarm).count()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "k0 = {} (family-relative: computed over the listed lattices only)", self.k0);
        for (lvl, table) in self.iso.iter().enumerate() {
            let _ = writeln!(s, "level k = {}", self.k0 + lvl as u32);
            for (i, row) in table.iter().enumerate() {
                for (j, c) in row.iter().enumerate() {
                    let flag = if c.alarm() { "  ALARM" } else { "" };
                    let _ = writeln!(
                        s,
                        "  {} vs {}: reduced_iso={} lattice_iso={}{}",
                        self.names[i], self.names[j], c.reduced_iso, c.lattice_iso, flag
                    );
                }
            }
        }
        for (n, t) in self.names.iter().zip(&self.indec) {
            let _ = writeln!(
                s,
                "indecomposable {n}: lattice={} reduction(k={})={} status={:?}",
                t.lattice_indecomposable, t.k, t.reduced_indecomposable, t.status
            );
        }
        let _ = writeln!(s, "alarms = {}", self.alarms());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{e1_order, e1_r1};

    #[test]
    fn zero_lattice_values() {
        let o = e1_order();
        let z = LatticeModule::zero(o, 16).unwrap();
        let b = Budget::default();
        assert_eq!(pseudoendolength(&z, 2, &b).unwrap().value(), Some(0));
        assert_eq!(interval_lattice(&z, 1, &b).unwrap().size(), 1);
    }

    #[test]
    fn ratio_is_reduced() {
        let p = Pseudoendolength { k: 4, endolength_k: 6, endolength_next: 7, integral: false };
        assert_eq!(p.ratio(), (3, 2));
        assert_eq!(p.value(), None);
    }

    #[test]
    fn k_zero_reductions_agree() {
        let o = e1_order();
        let r1 = e1_r1(&o, 16).unwrap();
        let c = maranda_iso_check(&r1, &r1, 0, 0, 8, &Budget::default()).unwrap();
        assert!(c.reduced_iso && c.lattice_iso && !c.in_hypotheses);
    }
}
